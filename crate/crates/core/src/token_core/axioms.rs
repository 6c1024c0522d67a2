use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::message::StraightSearch;
use super::{Message, TokenSystem};
use crate::error::{MediaError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Decided exactly.
    Holds,
    /// No counterexample among messages up to the bound.
    HoldsUpToBound,
    /// A counterexample was found; failures are always exact.
    Fails,
}

impl Verdict {
    pub fn passes(self) -> bool {
        !matches!(self, Verdict::Fails)
    }
}

/// A counterexample, expressed with state and token ids so it can be
/// replayed through [`TokenSystem::apply`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `token` lacks a unique reverse. When `state` is set, `state·first`
    /// is effective and `second` does not undo it.
    Reverse {
        token: String,
        reason: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        state: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        message: Option<Vec<String>>,
    },
    /// No straight message leads from `from` to `to`.
    Unreachable { from: String, to: String },
    /// A stepwise effective message from `state` that is ineffective but not
    /// vacuous, or effective but vacuous.
    Message {
        state: String,
        message: Vec<String>,
        effective: bool,
        vacuous: bool,
    },
    /// Two straight messages reaching the same state that contain a token and
    /// its reverse.
    Joint {
        first_state: String,
        first: Vec<String>,
        second_state: String,
        second: Vec<String>,
        target: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomResult {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl AxiomResult {
    fn holds(exact: bool) -> Self {
        Self {
            verdict: if exact {
                Verdict::Holds
            } else {
                Verdict::HoldsUpToBound
            },
            witness: None,
        }
    }

    fn fails(w: Witness) -> Self {
        Self {
            verdict: Verdict::Fails,
            witness: Some(w),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub bound: usize,
    #[serde(rename = "M1")]
    pub m1: AxiomResult,
    #[serde(rename = "M2")]
    pub m2: AxiomResult,
    #[serde(rename = "M3")]
    pub m3: AxiomResult,
    #[serde(rename = "M4")]
    pub m4: AxiomResult,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        [&self.m1, &self.m2, &self.m3, &self.m4]
            .iter()
            .all(|r| r.verdict.passes())
    }
}

pub fn default_bound(ts: &TokenSystem) -> usize {
    (2 * ts.n_tokens()).max(1)
}

/// Checks [M1] and [M2*] exactly and falsifies [M3] and [M4] over all
/// stepwise effective messages of length at most `bound`.
pub fn check_axioms(ts: &TokenSystem, bound: usize) -> Result<AxiomReport> {
    if bound == 0 {
        return Err(MediaError::invalid(
            "message-length bound must be at least 1",
        ));
    }
    Ok(AxiomReport {
        bound,
        m1: check_m1(ts),
        m2: check_m2(ts),
        m3: check_m3(ts, bound),
        m4: check_m4(ts, bound),
    })
}

fn names(ts: &TokenSystem, m: &Message) -> Vec<String> {
    m.names(ts)
}

pub(crate) fn check_m1(ts: &TokenSystem) -> AxiomResult {
    for t in 0..ts.n_tokens() {
        let tname = ts.token_name(t).to_string();
        let Some(r) = ts.reverse(t) else {
            return AxiomResult::fails(Witness::Reverse {
                token: tname,
                reason: "no reverse declared".into(),
                state: None,
                message: None,
            });
        };
        if let Some((s, first, second)) = ts.reverse_violation(t, r) {
            return AxiomResult::fails(Witness::Reverse {
                token: tname,
                reason: format!(
                    "declared reverse `{}` does not undo `{}`",
                    ts.token_name(r),
                    ts.token_name(first)
                ),
                state: Some(ts.state_name(s).to_string()),
                message: Some(vec![
                    ts.token_name(first).to_string(),
                    ts.token_name(second).to_string(),
                ]),
            });
        }
        if let Some(o) = (0..ts.n_tokens()).find(|&o| o != r && ts.is_reverse_of(t, o)) {
            return AxiomResult::fails(Witness::Reverse {
                token: tname,
                reason: format!(
                    "reverse is not unique: `{}` and `{}` both reverse it",
                    ts.token_name(r),
                    ts.token_name(o)
                ),
                state: None,
                message: None,
            });
        }
    }
    AxiomResult::holds(true)
}

fn check_m2(ts: &TokenSystem) -> AxiomResult {
    for s in 0..ts.n_states() {
        let search = StraightSearch::run(ts, s, None, |_| false);
        let mut reached = vec![false; ts.n_states()];
        for node in &search.nodes {
            reached[node.state] = true;
        }
        if let Some(v) = (0..ts.n_states()).find(|&v| v != s && !reached[v]) {
            return AxiomResult::fails(Witness::Unreachable {
                from: ts.state_name(s).to_string(),
                to: ts.state_name(v).to_string(),
            });
        }
    }
    AxiomResult::holds(true)
}

/// Position of each token within the declared pairing: `(pair, sign)`, or
/// `None` for a token without a declared reverse.
fn pair_slots(ts: &TokenSystem) -> (Vec<Option<(usize, i32)>>, usize) {
    let mut slot = vec![None; ts.n_tokens()];
    let mut pairs = 0;
    for t in 0..ts.n_tokens() {
        if let Some(r) = ts.reverse(t) {
            if t < r {
                slot[t] = Some((pairs, 1));
                slot[r] = Some((pairs, -1));
                pairs += 1;
            }
        }
    }
    (slot, pairs)
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct M3Key {
    state: usize,
    imbalance: Vec<i32>,
    unpaired: bool,
}

fn check_m3(ts: &TokenSystem, bound: usize) -> AxiomResult {
    let (slot, pairs) = pair_slots(ts);
    for start in 0..ts.n_states() {
        // Messages with equal key agree on effectiveness and vacuousness, so
        // one representative per key suffices.
        let root = M3Key {
            state: start,
            imbalance: vec![0; pairs],
            unpaired: false,
        };
        let mut seen: HashSet<M3Key> = HashSet::from([root.clone()]);
        let mut nodes: Vec<(M3Key, usize, usize, usize)> = vec![(root, usize::MAX, usize::MAX, 0)];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let depth = nodes[i].3;
            if depth >= bound {
                continue;
            }
            let cur = nodes[i].0.state;
            for t in 0..ts.n_tokens() {
                let next = ts.act(t, cur);
                if next == cur {
                    continue;
                }
                let mut key = M3Key {
                    state: next,
                    imbalance: nodes[i].0.imbalance.clone(),
                    unpaired: nodes[i].0.unpaired,
                };
                match slot[t] {
                    Some((p, sign)) => key.imbalance[p] += sign,
                    None => key.unpaired = true,
                }
                if seen.contains(&key) {
                    continue;
                }
                let vacuous = !key.unpaired && key.imbalance.iter().all(|&x| x == 0);
                let effective = next != start;
                seen.insert(key.clone());
                nodes.push((key, i, t, depth + 1));
                let j = nodes.len() - 1;
                if effective == vacuous {
                    let mut m = Vec::new();
                    let mut k = j;
                    while nodes[k].1 != usize::MAX {
                        m.push(nodes[k].2);
                        k = nodes[k].1;
                    }
                    m.reverse();
                    return AxiomResult::fails(Witness::Message {
                        state: ts.state_name(start).to_string(),
                        message: names(ts, &Message::new(m)),
                        effective,
                        vacuous,
                    });
                }
                queue.push_back(j);
            }
        }
    }
    AxiomResult::holds(false)
}

fn check_m4(ts: &TokenSystem, bound: usize) -> AxiomResult {
    // first[target][token] = (start, message) of the first straight message
    // into `target` whose content holds `token`.
    let mut first: Vec<Vec<Option<(usize, Message)>>> =
        vec![vec![None; ts.n_tokens()]; ts.n_states()];
    for start in 0..ts.n_states() {
        let search = StraightSearch::run(ts, start, Some(bound), |_| false);
        for (i, node) in search.nodes.iter().enumerate().skip(1) {
            for t in node.used.iter() {
                if first[node.state][t].is_none() {
                    first[node.state][t] = Some((start, search.message(i)));
                }
            }
        }
    }
    for (target, row) in first.iter().enumerate() {
        for t in 0..ts.n_tokens() {
            let Some(r) = ts.reverse(t) else { continue };
            if let (Some((s1, m1)), Some((s2, m2))) = (&row[t], &row[r]) {
                return AxiomResult::fails(Witness::Joint {
                    first_state: ts.state_name(*s1).to_string(),
                    first: names(ts, m1),
                    second_state: ts.state_name(*s2).to_string(),
                    second: names(ts, m2),
                    target: ts.state_name(target).to_string(),
                });
            }
        }
    }
    AxiomResult::holds(false)
}
