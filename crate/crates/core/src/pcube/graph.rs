use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{MediaError, Result};
use crate::token_core::TokenSystem;
use crate::wg_sets::display_set;

/// Hypercube coordinates: one finite set per vertex over a named ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexLabels {
    pub ground: Vec<String>,
    pub sets: Vec<BitSet>,
}

/// A simple undirected graph on named vertices.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted. Edge labels, when
/// present, run parallel to the edge list and hold the token moving `u` to
/// `v` and the token moving `v` back to `u`.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
    pub labels: Option<VertexLabels>,
    pub edge_labels: Option<Vec<(String, String)>>,
}

impl LabeledGraph {
    /// Builds a graph; loops are rejected and repeated edges collapsed.
    pub fn new(
        vertices: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(MediaError::invalid(format!("duplicate vertex `{v}`")));
            }
        }
        let n = vertices.len();
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(MediaError::invalid("edge endpoint out of range"));
            }
            if u == v {
                return Err(MediaError::invalid(format!(
                    "loop at vertex `{}`",
                    vertices[u]
                )));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        list.dedup();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Self {
            vertices,
            edges: list,
            adj,
            index,
            labels: None,
            edge_labels: None,
        })
    }

    pub fn from_named_edges<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let index: HashMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let look = |v: &S| {
            index.get(v.as_ref()).copied().ok_or_else(|| {
                MediaError::invalid(format!("edge uses undeclared vertex `{}`", v.as_ref()))
            })
        };
        let edges = edges
            .iter()
            .map(|(u, v)| Ok((look(u)?, look(v)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices, edges)
    }

    /// Parses whitespace-separated text: each non-empty line not starting
    /// with `#` holds either `u v` (an edge) or `u` (a vertex). Vertices are
    /// numbered in order of first appearance.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut vertices: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            if words.len() > 2 {
                return Err(MediaError::Parse(format!(
                    "line {}: expected `u v` or `u`, found {} fields",
                    lineno + 1,
                    words.len()
                )));
            }
            let ids: Vec<usize> = words
                .iter()
                .map(|w| {
                    *index.entry(w.to_string()).or_insert_with(|| {
                        vertices.push(w.to_string());
                        vertices.len() - 1
                    })
                })
                .collect();
            if let [u, v] = ids[..] {
                if u == v {
                    return Err(MediaError::Parse(format!(
                        "line {}: loop at `{}`",
                        lineno + 1,
                        words[0]
                    )));
                }
                edges.push((u, v));
            }
        }
        Self::new(vertices, edges)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text)?;
        Self::from_json(&raw)
    }

    /// Reads vertices and edges; any labels in the input are ignored.
    pub fn from_json(raw: &GraphJson) -> Result<Self> {
        let edges: Vec<(&str, &str)> = raw
            .edges
            .iter()
            .map(|(u, v)| (u.as_str(), v.as_str()))
            .collect();
        let vertices: Vec<&str> = raw.vertices.iter().map(String::as_str).collect();
        Self::from_named_edges(&vertices, &edges)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| (self.vertices[u].clone(), self.vertices[v].clone()))
                .collect(),
            ground: self.labels.as_ref().map(|l| l.ground.clone()),
            labels: self.labels.as_ref().map(|l| {
                l.sets
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        (
                            self.vertices[i].clone(),
                            s.iter().map(|x| l.ground[x].clone()).collect(),
                        )
                    })
                    .collect()
            }),
            tokens: self.edge_labels.clone(),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    /// Breadth-first distances from `src`; `u32::MAX` marks unreachable vertices.
    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n_vertices()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n_vertices() > 0 && self.bfs(0).iter().all(|&d| d != u32::MAX)
    }

    /// Largest finite distance.
    pub fn diameter(&self) -> u32 {
        (0..self.n_vertices())
            .flat_map(|v| self.bfs(v))
            .filter(|&d| d != u32::MAX)
            .max()
            .unwrap_or(0)
    }

    /// DOT with vertices and edges in stored order; vertex coordinate sets
    /// appear as tooltips and edge token pairs as labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            match &self.labels {
                Some(l) => {
                    let _ = writeln!(
                        out,
                        "  {} [tooltip={}];",
                        quote(v),
                        quote(&display_set(&l.ground, &l.sets[i]))
                    );
                }
                None => {
                    let _ = writeln!(out, "  {};", quote(v));
                }
            }
        }
        for (k, &(u, v)) in self.edges.iter().enumerate() {
            let (u, v) = (quote(&self.vertices[u]), quote(&self.vertices[v]));
            match &self.edge_labels {
                Some(l) => {
                    let _ = writeln!(
                        out,
                        "  {u} -- {v} [label={}];",
                        quote(&format!("{}/{}", l[k].0, l[k].1))
                    );
                }
                None => {
                    let _ = writeln!(out, "  {u} -- {v};");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// On-disk form of a graph. `ground`, `labels` and `tokens` are written on
/// output and ignored on input.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<(String, String)>>,
}

/// The graph of a token system: an edge joins `S ≠ T` whenever some token
/// moves one to the other. Each edge is labelled by the least token moving
/// its lower endpoint to its higher one and the least token moving back
/// (empty if there is none).
pub fn medium_graph(ts: &TokenSystem) -> LabeledGraph {
    let mut fwd: BTreeMap<(usize, usize), (Option<usize>, Option<usize>)> = BTreeMap::new();
    for t in 0..ts.n_tokens() {
        for s in 0..ts.n_states() {
            let v = ts.act(t, s);
            if v == s {
                continue;
            }
            let e = fwd.entry((s.min(v), s.max(v))).or_default();
            let slot = if s < v { &mut e.0 } else { &mut e.1 };
            slot.get_or_insert(t);
        }
    }
    let mut g = LabeledGraph::new(ts.states().to_vec(), fwd.keys().copied())
        .expect("a token system has distinct states and no loops");
    let name = |t: Option<usize>| t.map(|t| ts.token_name(t).to_string()).unwrap_or_default();
    g.edge_labels = Some(fwd.values().map(|&(a, b)| (name(a), name(b))).collect());
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_parsing() {
        let g = LabeledGraph::parse_edge_list("# triangle\na b\nb c\nc a\n\nd\n").unwrap();
        assert_eq!(g.vertices(), &["a", "b", "c", "d"]);
        assert_eq!(g.n_edges(), 3);
        assert!(!g.is_connected());
        assert!(LabeledGraph::parse_edge_list("a a").is_err());
        assert!(LabeledGraph::parse_edge_list("a b c").is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"vertices":["u","v"],"edges":[["u","v"]]}"#;
        let g = LabeledGraph::from_json_str(text).unwrap();
        assert_eq!(serde_json::to_string(&g.to_json()).unwrap(), text);
        assert!(LabeledGraph::from_json_str(r#"{"vertices":["u"],"edges":[["u","w"]]}"#).is_err());
    }

    #[test]
    fn two_state_medium_graph_is_an_edge() {
        let ts = TokenSystem::from_moves(
            &["S", "T"],
            &[("t", "t~")],
            &[("t", "S", "T"), ("t~", "T", "S")],
        )
        .unwrap();
        let g = medium_graph(&ts);
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(
            g.edge_labels.as_ref().unwrap()[0],
            ("t".to_string(), "t~".to_string())
        );
        assert!(g.to_dot().contains("\"S\" -- \"T\" [label=\"t/t~\"];"));
    }

    #[test]
    fn distances_on_a_path() {
        let g = LabeledGraph::parse_edge_list("a b\nb c\nc d").unwrap();
        assert_eq!(g.bfs(0), vec![0, 1, 2, 3]);
        assert_eq!(g.diameter(), 3);
    }
}
