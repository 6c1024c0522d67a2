use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use super::graph::{medium_graph, LabeledGraph};
use crate::error::{MediaError, Result};
use crate::token_core::TokenSystem;

pub const DEFAULT_ISO_CAP: usize = 2000;

/// State and token bijections with `Sτ = T ⇔ α(S)β(τ) = α(T)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MediaIsomorphism {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
}

impl MediaIsomorphism {
    /// Name tables, in the order of the first system's ids.
    pub fn named(
        &self,
        ts1: &TokenSystem,
        ts2: &TokenSystem,
    ) -> (BTreeMap<String, String>, BTreeMap<String, String>) {
        let alpha = self
            .alpha
            .iter()
            .enumerate()
            .map(|(s, &v)| (ts1.state_name(s).to_string(), ts2.state_name(v).to_string()))
            .collect();
        let beta = self
            .beta
            .iter()
            .enumerate()
            .map(|(t, &u)| (ts1.token_name(t).to_string(), ts2.token_name(u).to_string()))
            .collect();
        (alpha, beta)
    }
}

pub fn media_isomorphic(ts1: &TokenSystem, ts2: &TokenSystem) -> Result<Option<MediaIsomorphism>> {
    media_isomorphic_capped(ts1, ts2, DEFAULT_ISO_CAP)
}

/// Finds an isomorphism of two media by matching their graphs and reading
/// the token bijection off corresponding edges. Each graph isomorphism found
/// is checked against the full action tables before it is returned.
pub fn media_isomorphic_capped(
    ts1: &TokenSystem,
    ts2: &TokenSystem,
    cap: usize,
) -> Result<Option<MediaIsomorphism>> {
    let n = ts1.n_states().max(ts2.n_states());
    if n > cap {
        return Err(MediaError::CapExceeded {
            what: "isomorphism state count",
            limit: cap,
            actual: n,
        });
    }
    if ts1.n_states() != ts2.n_states() || ts1.n_tokens() != ts2.n_tokens() {
        return Ok(None);
    }
    let g1 = medium_graph(ts1);
    let g2 = medium_graph(ts2);
    if g1.n_edges() != g2.n_edges() {
        return Ok(None);
    }
    let (c1, c2) = refine(&g1, &class_sizes(ts1, &g1), &g2, &class_sizes(ts2, &g2));
    let hist = |c: &[u64]| {
        let mut h = c.to_vec();
        h.sort_unstable();
        h
    };
    if hist(&c1) != hist(&c2) {
        return Ok(None);
    }
    let order = bfs_order(&g1, &c1);
    let mut search = Search {
        g1: &g1,
        g2: &g2,
        c1: &c1,
        c2: &c2,
        order: &order,
        map: vec![usize::MAX; g1.n_vertices()],
        used: vec![false; g2.n_vertices()],
        found: None,
        accept: &mut |alpha: &[usize]| read_beta(ts1, ts2, alpha),
    };
    search.extend(0);
    Ok(search.found)
}

/// For each edge, the number of edges carrying the same token pair; in a
/// medium this is the size of its Θ-class.
fn class_sizes(ts: &TokenSystem, g: &LabeledGraph) -> Vec<usize> {
    let labels = g
        .edge_labels
        .as_ref()
        .expect("medium graphs carry edge labels");
    let key = |l: &(String, String)| {
        let (a, b) = (ts.token_id(&l.0).ok(), ts.token_id(&l.1).ok());
        (a.min(b), a.max(b))
    };
    let mut count: HashMap<(Option<usize>, Option<usize>), usize> = HashMap::new();
    for l in labels {
        *count.entry(key(l)).or_default() += 1;
    }
    labels.iter().map(|l| count[&key(l)]).collect()
}

fn mix(h: u64, x: u64) -> u64 {
    (h ^ x
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(h << 6)
        .wrapping_add(h >> 2))
    .wrapping_mul(0xbf58_476d_1ce4_e5b9)
}

/// Colour refinement run jointly on both graphs so colours are comparable.
/// The initial colour is the degree with the sorted Θ-class sizes of the
/// incident edges.
fn refine(
    g1: &LabeledGraph,
    s1: &[usize],
    g2: &LabeledGraph,
    s2: &[usize],
) -> (Vec<u64>, Vec<u64>) {
    let init = |g: &LabeledGraph, sizes: &[usize]| -> Vec<u64> {
        (0..g.n_vertices())
            .map(|v| {
                let mut inc: Vec<usize> = g
                    .neighbors(v)
                    .iter()
                    .map(|&w| sizes[g.edge_index(v, w).unwrap()])
                    .collect();
                inc.sort_unstable();
                inc.iter()
                    .fold(mix(17, g.degree(v) as u64), |h, &s| mix(h, s as u64))
            })
            .collect()
    };
    let (mut c1, mut c2) = (init(g1, s1), init(g2, s2));
    let distinct = |a: &[u64], b: &[u64]| {
        let mut all: Vec<u64> = a.iter().chain(b).copied().collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    };
    let mut classes = distinct(&c1, &c2);
    loop {
        let step = |g: &LabeledGraph, c: &[u64]| -> Vec<u64> {
            (0..g.n_vertices())
                .map(|v| {
                    let mut nb: Vec<u64> = g.neighbors(v).iter().map(|&w| c[w]).collect();
                    nb.sort_unstable();
                    nb.iter().fold(mix(c[v], 31), |h, &x| mix(h, x))
                })
                .collect()
        };
        let (n1, n2) = (step(g1, &c1), step(g2, &c2));
        let next = distinct(&n1, &n2);
        c1 = n1;
        c2 = n2;
        if next == classes {
            return (c1, c2);
        }
        classes = next;
    }
}

/// Vertices of each component in breadth-first order, each component
/// started from a vertex of its rarest colour.
fn bfs_order(g: &LabeledGraph, c: &[u64]) -> Vec<usize> {
    let mut freq: HashMap<u64, usize> = HashMap::new();
    for &x in c {
        *freq.entry(x).or_default() += 1;
    }
    let mut starts: Vec<usize> = (0..g.n_vertices()).collect();
    starts.sort_by_key(|&v| (freq[&c[v]], v));
    let mut seen = vec![false; g.n_vertices()];
    let mut order = Vec::with_capacity(g.n_vertices());
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

struct Search<'a> {
    g1: &'a LabeledGraph,
    g2: &'a LabeledGraph,
    c1: &'a [u64],
    c2: &'a [u64],
    order: &'a [usize],
    map: Vec<usize>,
    used: Vec<bool>,
    found: Option<MediaIsomorphism>,
    accept: &'a mut dyn FnMut(&[usize]) -> Option<Vec<usize>>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            if let Some(beta) = (self.accept)(&self.map) {
                self.found = Some(MediaIsomorphism {
                    alpha: self.map.clone(),
                    beta,
                });
                return true;
            }
            return false;
        }
        let v = self.order[depth];
        let anchor = self
            .g1
            .neighbors(v)
            .iter()
            .copied()
            .find(|&w| self.map[w] != usize::MAX);
        let candidates: Vec<usize> = match anchor {
            Some(w) => self.g2.neighbors(self.map[w]).to_vec(),
            None => (0..self.g2.n_vertices()).collect(),
        };
        for x in candidates {
            if self.used[x] || self.c1[v] != self.c2[x] || !self.consistent(v, x) {
                continue;
            }
            self.map[v] = x;
            self.used[x] = true;
            if self.extend(depth + 1) {
                return true;
            }
            self.map[v] = usize::MAX;
            self.used[x] = false;
        }
        false
    }

    /// Mapped neighbours of `v` go to neighbours of `x`; together with equal
    /// degrees this preserves non-adjacency as well.
    fn consistent(&self, v: usize, x: usize) -> bool {
        let mapped = self
            .g1
            .neighbors(v)
            .iter()
            .filter(|&&w| self.map[w] != usize::MAX);
        let mut count = 0;
        for &w in mapped {
            if !self.g2.has_edge(x, self.map[w]) {
                return false;
            }
            count += 1;
        }
        let images = self
            .g2
            .neighbors(x)
            .iter()
            .filter(|&&y| self.used[y])
            .count();
        images == count
    }
}

/// The token bijection induced by a state bijection, if one exists.
fn read_beta(ts1: &TokenSystem, ts2: &TokenSystem, alpha: &[usize]) -> Option<Vec<usize>> {
    let mut beta = vec![usize::MAX; ts1.n_tokens()];
    for (t, b) in beta.iter_mut().enumerate() {
        let s = (0..ts1.n_states()).find(|&s| ts1.act(t, s) != s)?;
        let (from, to) = (alpha[s], alpha[ts1.act(t, s)]);
        *b = (0..ts2.n_tokens()).find(|&u| ts2.act(u, from) == to)?;
    }
    let mut hit = vec![false; ts2.n_tokens()];
    for &b in &beta {
        if std::mem::replace(&mut hit[b], true) {
            return None;
        }
    }
    let exact = (0..ts1.n_tokens())
        .all(|t| (0..ts1.n_states()).all(|s| alpha[ts1.act(t, s)] == ts2.act(beta[t], alpha[s])));
    exact.then_some(beta)
}
