use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::TokenSystem;
use crate::bitset::BitSet;
use crate::error::{MediaError, Result};

/// A finite word over the tokens of a system, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Message(Vec<usize>);

impl Message {
    pub fn new(tokens: Vec<usize>) -> Self {
        Self(tokens)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_names<S: AsRef<str>>(ts: &TokenSystem, names: &[S]) -> Result<Self> {
        names
            .iter()
            .map(|n| ts.token_id(n.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn names(&self, ts: &TokenSystem) -> Vec<String> {
        self.0
            .iter()
            .map(|&t| ts.token_name(t).to_string())
            .collect()
    }

    pub fn tokens(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, t: usize) {
        self.0.push(t);
    }

    /// The set of distinct tokens.
    pub fn content(&self) -> BitSet {
        self.0.iter().copied().collect()
    }

    pub fn concat(&self, other: &Message) -> Message {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    /// The reversed word with every token replaced by its reverse.
    pub fn reversed(&self, ts: &TokenSystem) -> Result<Message> {
        self.0
            .iter()
            .rev()
            .map(|&t| {
                ts.reverse(t)
                    .ok_or_else(|| MediaError::MissingReverse(ts.token_name(t).to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl TokenSystem {
    fn check_message(&self, m: &Message) -> Result<()> {
        match m.0.iter().find(|&&t| t >= self.n_tokens()) {
            Some(t) => Err(MediaError::UnknownToken(format!("#{t}"))),
            None => Ok(()),
        }
    }

    pub fn apply(&self, s: usize, m: &Message) -> Result<usize> {
        self.check_state(s)?;
        self.check_message(m)?;
        Ok(m.0.iter().fold(s, |cur, &t| self.act(t, cur)))
    }

    /// The sequence of states visited, starting with `s`.
    pub fn trajectory(&self, s: usize, m: &Message) -> Result<Vec<usize>> {
        self.check_state(s)?;
        self.check_message(m)?;
        let mut out = Vec::with_capacity(m.len() + 1);
        out.push(s);
        let mut cur = s;
        for &t in &m.0 {
            cur = self.act(t, cur);
            out.push(cur);
        }
        Ok(out)
    }

    /// Every prefix application changes the state.
    pub fn is_stepwise_effective(&self, s: usize, m: &Message) -> Result<bool> {
        Ok(self.trajectory(s, m)?.windows(2).all(|w| w[0] != w[1]))
    }

    /// No token occurs together with its reverse.
    pub fn is_consistent(&self, m: &Message) -> Result<bool> {
        self.require_pairing()?;
        self.check_message(m)?;
        let c = m.content();
        Ok(c.iter().all(|t| !c.contains(self.reverse(t).unwrap())))
    }

    /// The occurrences pair off into mutually reverse tokens, i.e. every
    /// token occurs exactly as often as its reverse.
    pub fn is_vacuous(&self, m: &Message) -> Result<bool> {
        self.require_pairing()?;
        self.check_message(m)?;
        let mut count: HashMap<usize, i64> = HashMap::new();
        for &t in &m.0 {
            *count.entry(t).or_default() += 1;
        }
        Ok(count
            .iter()
            .all(|(&t, &c)| count.get(&self.reverse(t).unwrap()).copied().unwrap_or(0) == c))
    }

    /// Shortest stepwise-effective consistent message from `s` to `v`.
    ///
    /// Tokens without a declared reverse impose no consistency constraint.
    pub fn straight_message(&self, s: usize, v: usize) -> Result<Option<Message>> {
        self.check_state(s)?;
        self.check_state(v)?;
        if s == v {
            return Err(MediaError::invalid(
                "straight messages join distinct states",
            ));
        }
        let search = StraightSearch::run(self, s, None, |node| node.state == v);
        Ok(search.hit.map(|i| search.message(i)))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct SearchNode {
    pub state: usize,
    pub used: BitSet,
    pub depth: usize,
    parent: usize,
    token: usize,
}

/// Breadth-first enumeration of `(state, used tokens)` pairs reachable from
/// a start by straight messages. Each pair is kept once, at its minimal
/// depth; everything reachable within a length bound is therefore visited.
pub(crate) struct StraightSearch {
    pub nodes: Vec<SearchNode>,
    pub hit: Option<usize>,
}

impl StraightSearch {
    pub fn run(
        ts: &TokenSystem,
        start: usize,
        max_len: Option<usize>,
        mut stop: impl FnMut(&SearchNode) -> bool,
    ) -> Self {
        let root = SearchNode {
            state: start,
            used: BitSet::new(),
            depth: 0,
            parent: usize::MAX,
            token: usize::MAX,
        };
        let mut seen: HashSet<(usize, BitSet)> = HashSet::from([(start, BitSet::new())]);
        let mut nodes = vec![root];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let (state, depth) = (nodes[i].state, nodes[i].depth);
            if max_len.is_some_and(|b| depth >= b) {
                continue;
            }
            for t in 0..ts.n_tokens() {
                let next = ts.act(t, state);
                if next == state {
                    continue;
                }
                let used = &nodes[i].used;
                if ts.reverse(t).is_some_and(|r| used.contains(r)) {
                    continue;
                }
                let mut used = used.clone();
                used.insert(t);
                if !seen.insert((next, used.clone())) {
                    continue;
                }
                let node = SearchNode {
                    state: next,
                    used,
                    depth: depth + 1,
                    parent: i,
                    token: t,
                };
                let done = stop(&node);
                nodes.push(node);
                if done {
                    let hit = nodes.len() - 1;
                    return Self {
                        nodes,
                        hit: Some(hit),
                    };
                }
                queue.push_back(nodes.len() - 1);
            }
        }
        Self { nodes, hit: None }
    }

    pub fn message(&self, mut i: usize) -> Message {
        let mut out = Vec::new();
        while self.nodes[i].parent != usize::MAX {
            out.push(self.nodes[i].token);
            i = self.nodes[i].parent;
        }
        out.reverse();
        Message(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge() -> TokenSystem {
        TokenSystem::from_moves(
            &["S", "T"],
            &[("t", "t~")],
            &[("t", "S", "T"), ("t~", "T", "S")],
        )
        .unwrap()
    }

    #[test]
    fn apply_single_edge_and_identity() {
        let ts = edge();
        let m = Message::from_names(&ts, &["t"]).unwrap();
        assert_eq!(ts.apply(0, &m).unwrap(), 1);
        assert_eq!(ts.apply(0, &Message::empty()).unwrap(), 0);
    }

    #[test]
    fn apply_rejects_bad_ids() {
        let ts = edge();
        assert!(matches!(
            ts.apply(7, &Message::empty()),
            Err(MediaError::UnknownState(_))
        ));
        assert!(ts.apply(0, &Message::new(vec![9])).is_err());
        assert!(matches!(
            Message::from_names(&ts, &["nope"]),
            Err(MediaError::UnknownToken(_))
        ));
    }

    #[test]
    fn content_examples() {
        let ts = edge();
        let m = Message::new(vec![0, 0, 1]);
        assert_eq!(m.content().iter().collect::<Vec<_>>(), vec![0, 1]);
        assert!(m.content().len() <= m.len());
        assert!(Message::empty().content().is_empty());
        let tt = Message::from_names(&ts, &["t", "t~"]).unwrap();
        assert_eq!(tt.content().len(), 2);
    }

    #[test]
    fn stepwise_effective_examples() {
        let ts = edge();
        let t = ts.token_id("t").unwrap();
        assert!(!ts
            .is_stepwise_effective(0, &Message::new(vec![t, t]))
            .unwrap());
        assert!(ts.is_stepwise_effective(0, &Message::new(vec![t])).unwrap());
    }

    #[test]
    fn consistency_and_vacuousness() {
        let ts = TokenSystem::from_moves(
            &["A", "B", "C"],
            &[("t", "t~"), ("s", "s~")],
            &[
                ("t", "A", "B"),
                ("t~", "B", "A"),
                ("s", "B", "C"),
                ("s~", "C", "B"),
            ],
        )
        .unwrap();
        let m = |names: &[&str]| Message::from_names(&ts, names).unwrap();
        assert!(!ts.is_consistent(&m(&["t", "t~"])).unwrap());
        assert!(ts.is_vacuous(&m(&["t", "t~"])).unwrap());
        assert!(ts.is_vacuous(&m(&["t", "s", "t~", "s~"])).unwrap());
        assert!(!ts.is_vacuous(&m(&["t", "t", "t~"])).unwrap());
        assert!(ts.is_consistent(&m(&["t", "s"])).unwrap());
    }

    #[test]
    fn consistency_needs_pairing() {
        let ts = TokenSystem::new(
            vec!["S".into(), "T".into()],
            vec!["t".into()],
            vec![vec![1, 1]],
            vec![None],
        )
        .unwrap();
        assert!(matches!(
            ts.is_consistent(&Message::empty()),
            Err(MediaError::MissingReverse(_))
        ));
        assert!(ts.is_vacuous(&Message::empty()).is_err());
    }

    #[test]
    fn straight_message_on_edge_and_empty_system() {
        let ts = edge();
        let m = ts.straight_message(0, 1).unwrap().unwrap();
        assert_eq!(m.names(&ts), vec!["t"]);
        let bare = TokenSystem::new(vec!["P".into(), "R".into()], vec![], vec![], vec![]).unwrap();
        assert_eq!(bare.straight_message(0, 1).unwrap(), None);
        assert!(ts.straight_message(0, 0).is_err());
    }

    #[test]
    fn reversed_message() {
        let ts = edge();
        let m = Message::from_names(&ts, &["t", "t~", "t"]).unwrap();
        assert_eq!(m.reversed(&ts).unwrap().names(&ts), vec!["t~", "t", "t~"]);
    }
}
