use serde::Serialize;

use super::graph::{LabeledGraph, VertexLabels};
use crate::bitset::BitSet;
use crate::error::{MediaError, Result};
use crate::token_core::TokenSystem;
use crate::wg_sets::{family_to_medium_named, SetFamily};

/// An isometric embedding into a hypercube with one coordinate per Θ-class.
#[derive(Clone, Debug)]
pub struct Labeling {
    /// Θ-class of each edge, in edge order.
    pub class_of_edge: Vec<usize>,
    /// Edges of each class; classes are numbered by their least edge.
    pub classes: Vec<Vec<usize>>,
    pub labels: VertexLabels,
}

/// Why a graph is not a partial cube. Edges are given as vertex-name pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NotPartialCube {
    /// A closed walk of odd length; consecutive vertices (and last and
    /// first) are adjacent.
    OddCycle { cycle: Vec<String> },
    /// `e Θ f` and `f Θ g` but not `e Θ g`.
    NotTransitive {
        e: (String, String),
        f: (String, String),
        g: (String, String),
    },
    /// The label distance of `u, v` differs from their graph distance.
    NotIsometric {
        u: String,
        v: String,
        distance: u32,
        label_distance: usize,
    },
}

#[derive(Clone, Debug)]
pub enum PartialCube {
    Accept(Labeling),
    Reject(NotPartialCube),
}

impl PartialCube {
    pub fn is_accept(&self) -> bool {
        matches!(self, PartialCube::Accept(_))
    }
}

fn edge_names(g: &LabeledGraph, e: usize) -> (String, String) {
    let (u, v) = g.edges()[e];
    (g.vertex_name(u).to_string(), g.vertex_name(v).to_string())
}

fn odd_cycle(g: &LabeledGraph) -> Option<Vec<String>> {
    let n = g.n_vertices();
    let mut depth = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    depth[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if depth[w] == u32::MAX {
                depth[w] = depth[u] + 1;
                parent[w] = u;
                queue.push_back(w);
            } else if depth[w] == depth[u] {
                let (mut a, mut b) = (u, w);
                let (mut left, mut right) = (vec![a], vec![b]);
                while a != b {
                    a = parent[a];
                    b = parent[b];
                    left.push(a);
                    right.push(b);
                }
                right.pop();
                left.extend(right.into_iter().rev());
                return Some(left.iter().map(|&v| g.vertex_name(v).to_string()).collect());
            }
        }
    }
    None
}

/// Decides whether a connected graph is a partial cube: it must be
/// bipartite with a transitive Djoković–Winkler relation, and the induced
/// labeling is then checked to be isometric. For each Θ-class the
/// coordinate is carried by the side not containing the least-named vertex.
pub fn is_partial_cube(g: &LabeledGraph) -> Result<PartialCube> {
    if g.n_vertices() == 0 {
        return Err(MediaError::invalid("graph has no vertices"));
    }
    if !g.is_connected() {
        return Err(MediaError::invalid("graph is not connected"));
    }
    if let Some(cycle) = odd_cycle(g) {
        return Ok(PartialCube::Reject(NotPartialCube::OddCycle { cycle }));
    }
    let edges = g.edges();
    let m = edges.len();
    let root = (0..g.n_vertices())
        .min_by(|&a, &b| g.vertex_name(a).cmp(g.vertex_name(b)))
        .unwrap();
    // Θ-row of edge e: every f = xy with d(x,u) + d(y,v) ≠ d(y,u) + d(x,v).
    let theta_row = |e: usize| -> (Vec<bool>, Vec<u32>, Vec<u32>) {
        let (u, v) = edges[e];
        let (du, dv) = (g.bfs(u), g.bfs(v));
        let row = edges
            .iter()
            .map(|&(x, y)| du[x] + dv[y] != du[y] + dv[x])
            .collect();
        (row, du, dv)
    };
    let mut class_of_edge = vec![usize::MAX; m];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut sets = vec![BitSet::new(); g.n_vertices()];
    let witness = |a: usize, b: usize, c: usize| {
        Ok(PartialCube::Reject(NotPartialCube::NotTransitive {
            e: edge_names(g, a),
            f: edge_names(g, b),
            g: edge_names(g, c),
        }))
    };
    for e in 0..m {
        if class_of_edge[e] != usize::MAX {
            continue;
        }
        let k = classes.len();
        let (row, du, dv) = theta_row(e);
        let mut members = Vec::new();
        for (f, &related) in row.iter().enumerate() {
            if !related {
                continue;
            }
            if class_of_edge[f] != usize::MAX {
                let rep = classes[class_of_edge[f]][0];
                return witness(rep, f, e);
            }
            class_of_edge[f] = k;
            members.push(f);
        }
        let root_side = du[root] < dv[root];
        for (x, set) in sets.iter_mut().enumerate() {
            if (du[x] < dv[x]) != root_side {
                set.insert(k);
            }
        }
        classes.push(members);
    }
    for f in 0..m {
        let k = class_of_edge[f];
        let rep = classes[k][0];
        if rep == f {
            continue;
        }
        let (row, _, _) = theta_row(f);
        for (h, &related) in row.iter().enumerate() {
            let same = class_of_edge[h] == k;
            if related && !same {
                return witness(rep, f, h);
            }
            if !related && same {
                return witness(h, rep, f);
            }
        }
    }
    for u in 0..g.n_vertices() {
        let du = g.bfs(u);
        for v in u + 1..g.n_vertices() {
            let ld = sets[u].distance(&sets[v]);
            if ld != du[v] as usize {
                return Ok(PartialCube::Reject(NotPartialCube::NotIsometric {
                    u: g.vertex_name(u).to_string(),
                    v: g.vertex_name(v).to_string(),
                    distance: du[v],
                    label_distance: ld,
                }));
            }
        }
    }
    let ground = (0..classes.len()).map(|k| format!("c{k}")).collect();
    Ok(PartialCube::Accept(Labeling {
        class_of_edge,
        classes,
        labels: VertexLabels { ground, sets },
    }))
}

/// The medium of the labeled family of a partial cube, keeping the vertex
/// names as state ids.
pub fn graph_to_medium(g: &LabeledGraph) -> Result<TokenSystem> {
    match is_partial_cube(g)? {
        PartialCube::Accept(lab) => {
            let f = SetFamily::new(lab.labels.ground, lab.labels.sets)?;
            family_to_medium_named(&f, g.vertices().to_vec())
        }
        PartialCube::Reject(w) => Err(MediaError::invalid(format!(
            "not a partial cube: {}",
            serde_json::to_string(&w).unwrap_or_default()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(text: &str) -> LabeledGraph {
        LabeledGraph::parse_edge_list(text).unwrap()
    }

    fn accept(text: &str) -> Labeling {
        match is_partial_cube(&g(text)).unwrap() {
            PartialCube::Accept(l) => l,
            PartialCube::Reject(w) => panic!("rejected: {w:?}"),
        }
    }

    fn reject(text: &str) -> NotPartialCube {
        match is_partial_cube(&g(text)).unwrap() {
            PartialCube::Accept(_) => panic!("accepted"),
            PartialCube::Reject(w) => w,
        }
    }

    #[test]
    fn hexagon_has_three_classes() {
        let lab = accept("1 2\n2 3\n3 4\n4 5\n5 6\n6 1");
        assert_eq!(lab.classes.len(), 3);
        assert!(lab.labels.sets[0].is_empty());
        assert_eq!(lab.labels.sets[3].len(), 3);
    }

    #[test]
    fn triangle_gives_odd_cycle() {
        let NotPartialCube::OddCycle { cycle } = reject("a b\nb c\nc a") else {
            panic!()
        };
        assert_eq!(cycle.len(), 3);
    }

    #[test]
    fn k23_fails_transitivity() {
        let graph = g("a x\na y\na z\nb x\nb y\nb z");
        let PartialCube::Reject(NotPartialCube::NotTransitive { e, f, g: h }) =
            is_partial_cube(&graph).unwrap()
        else {
            panic!()
        };
        let id = |p: &(String, String)| {
            let (u, v) = (
                graph.vertex_id(&p.0).unwrap(),
                graph.vertex_id(&p.1).unwrap(),
            );
            (u, v)
        };
        let theta = |a: (usize, usize), b: (usize, usize)| {
            let (du, dv) = (graph.bfs(a.0), graph.bfs(a.1));
            du[b.0] + dv[b.1] != du[b.1] + dv[b.0]
        };
        assert!(theta(id(&e), id(&f)));
        assert!(theta(id(&f), id(&h)));
        assert!(!theta(id(&e), id(&h)));
    }

    #[test]
    fn disconnected_is_an_error() {
        assert!(is_partial_cube(&g("a b\nc d")).is_err());
    }

    #[test]
    fn single_vertex_and_edge() {
        assert_eq!(accept("a").classes.len(), 0);
        let ts = graph_to_medium(&g("a b")).unwrap();
        assert_eq!((ts.n_states(), ts.n_tokens()), (2, 2));
        let ts = graph_to_medium(&g("a b\nb c")).unwrap();
        assert_eq!((ts.n_states(), ts.n_tokens()), (3, 4));
        assert_eq!(ts.states(), &["a", "b", "c"]);
    }
}
