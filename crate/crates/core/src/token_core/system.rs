use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{MediaError, Result};

/// A finite set of states together with a finite set of tokens acting on it.
///
/// States and tokens are addressed by dense indices; their string ids are
/// kept for I/O. The action table is total. A token may carry a declared
/// reverse; declared reverses always form a fixed-point-free involution,
/// but whether a declared reverse actually reverses the token's action is
/// a property checked by [`check_axioms`](super::check_axioms), not here.
#[derive(Clone, Debug)]
pub struct TokenSystem {
    states: Vec<String>,
    tokens: Vec<String>,
    // action[t * n_states + s]
    action: Vec<usize>,
    reverse: Vec<Option<usize>>,
    state_index: HashMap<String, usize>,
    token_index: HashMap<String, usize>,
}

fn index_names(kind: &str, names: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(MediaError::invalid(format!("duplicate {kind} id `{n}`")));
        }
    }
    Ok(index)
}

impl TokenSystem {
    /// Builds a token system from per-token action tables (`action[t][s]`).
    pub fn new(
        states: Vec<String>,
        tokens: Vec<String>,
        action: Vec<Vec<usize>>,
        reverse: Vec<Option<usize>>,
    ) -> Result<Self> {
        let n = states.len();
        if n < 2 {
            return Err(MediaError::invalid(
                "a token system needs at least two states",
            ));
        }
        let state_index = index_names("state", &states)?;
        let token_index = index_names("token", &tokens)?;
        if action.len() != tokens.len() || reverse.len() != tokens.len() {
            return Err(MediaError::invalid(
                "action/reverse tables do not match the token list",
            ));
        }
        let mut flat = Vec::with_capacity(n * tokens.len());
        for (t, row) in action.iter().enumerate() {
            if row.len() != n {
                return Err(MediaError::invalid(format!(
                    "action of token `{}` is not total",
                    tokens[t]
                )));
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= n) {
                return Err(MediaError::invalid(format!(
                    "token `{}` maps to out-of-range state {bad}",
                    tokens[t]
                )));
            }
            if row.iter().enumerate().all(|(s, &v)| s == v) {
                return Err(MediaError::invalid(format!(
                    "token `{}` acts as the identity",
                    tokens[t]
                )));
            }
            flat.extend_from_slice(row);
        }
        for (t, r) in reverse.iter().enumerate() {
            if let Some(r) = *r {
                if r >= tokens.len() || r == t || reverse[r] != Some(t) {
                    return Err(MediaError::invalid(format!(
                        "reverse pairing of token `{}` is not a fixed-point-free involution",
                        tokens[t]
                    )));
                }
            }
        }
        Ok(Self {
            states,
            tokens,
            action: flat,
            reverse,
            state_index,
            token_index,
        })
    }

    /// Builds a system from a list of effective moves `(token, from, to)`;
    /// every state not listed as a source of a token is a fixed point of it.
    pub fn from_moves(
        states: &[&str],
        token_pairs: &[(&str, &str)],
        moves: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let mut tokens = Vec::new();
        let mut reverse = Vec::new();
        for (a, b) in token_pairs {
            tokens.push(a.to_string());
            tokens.push(b.to_string());
            let i = reverse.len();
            reverse.push(Some(i + 1));
            reverse.push(Some(i));
        }
        let s_index = index_names("state", &states)?;
        let t_index = index_names("token", &tokens)?;
        let mut action: Vec<Vec<usize>> = vec![(0..states.len()).collect(); tokens.len()];
        for (t, from, to) in moves {
            let t = *t_index
                .get(*t)
                .ok_or_else(|| MediaError::UnknownToken(t.to_string()))?;
            let f = *s_index
                .get(*from)
                .ok_or_else(|| MediaError::UnknownState(from.to_string()))?;
            let v = *s_index
                .get(*to)
                .ok_or_else(|| MediaError::UnknownState(to.to_string()))?;
            action[t][f] = v;
        }
        Self::new(states, tokens, action, reverse)
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_tokens(&self) -> usize {
        self.tokens.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn token_name(&self, t: usize) -> &str {
        &self.tokens[t]
    }

    pub fn state_id(&self, name: &str) -> Result<usize> {
        self.state_index
            .get(name)
            .copied()
            .ok_or_else(|| MediaError::UnknownState(name.to_string()))
    }

    pub fn token_id(&self, name: &str) -> Result<usize> {
        self.token_index
            .get(name)
            .copied()
            .ok_or_else(|| MediaError::UnknownToken(name.to_string()))
    }

    /// `s·t`. Panics on out-of-range indices.
    #[inline]
    pub fn act(&self, t: usize, s: usize) -> usize {
        self.action[t * self.states.len() + s]
    }

    pub fn action_row(&self, t: usize) -> &[usize] {
        let n = self.states.len();
        &self.action[t * n..(t + 1) * n]
    }

    pub fn reverse(&self, t: usize) -> Option<usize> {
        self.reverse[t]
    }

    pub fn reverse_table(&self) -> &[Option<usize>] {
        &self.reverse
    }

    pub fn has_complete_pairing(&self) -> bool {
        self.reverse.iter().all(Option::is_some)
    }

    pub(crate) fn require_pairing(&self) -> Result<()> {
        match self.reverse.iter().position(Option::is_none) {
            Some(t) => Err(MediaError::MissingReverse(self.tokens[t].clone())),
            None => Ok(()),
        }
    }

    pub(crate) fn check_state(&self, s: usize) -> Result<()> {
        if s < self.states.len() {
            Ok(())
        } else {
            Err(MediaError::UnknownState(format!("#{s}")))
        }
    }

    /// Checks the defining property of a reverse: for all distinct `S, V`,
    /// `S·t = V` iff `V·r = S`. On failure returns `(state, first, second)`
    /// such that `state·first` moves and `second` does not undo it.
    pub fn reverse_violation(&self, t: usize, r: usize) -> Option<(usize, usize, usize)> {
        for s in 0..self.n_states() {
            let v = self.act(t, s);
            if v != s && self.act(r, v) != s {
                return Some((s, t, r));
            }
            let w = self.act(r, s);
            if w != s && self.act(t, w) != s {
                return Some((s, r, t));
            }
        }
        None
    }

    pub fn is_reverse_of(&self, t: usize, r: usize) -> bool {
        self.reverse_violation(t, r).is_none()
    }

    /// Reduction to a subset of states: each token keeps the moves that land
    /// inside the subset and fixes every other state. Identity reductions
    /// are discarded, equal reductions merged, and the reverse pairing is
    /// recomputed from the reduced action.
    pub fn reduce(&self, subset: &[usize]) -> Result<TokenSystem> {
        Ok(self.reduce_with_map(subset)?.system)
    }

    pub fn reduce_with_map(&self, subset: &[usize]) -> Result<Reduction> {
        let mut q: Vec<usize> = subset.to_vec();
        q.sort_unstable();
        q.dedup();
        if q.len() < 2 {
            return Err(MediaError::invalid("a reduction needs at least two states"));
        }
        for &s in &q {
            self.check_state(s)?;
        }
        let mut pos = vec![usize::MAX; self.n_states()];
        for (i, &s) in q.iter().enumerate() {
            pos[s] = i;
        }
        let rows: Vec<Vec<usize>> = (0..self.n_tokens())
            .map(|t| {
                q.iter()
                    .enumerate()
                    .map(|(i, &s)| {
                        let v = self.act(t, s);
                        if pos[v] != usize::MAX {
                            pos[v]
                        } else {
                            i
                        }
                    })
                    .collect()
            })
            .collect();
        let states: Vec<String> = q.iter().map(|&s| self.states[s].clone()).collect();
        let (system, token_map) = Self::from_rows_merged(states, &self.tokens, rows)?;
        Ok(Reduction {
            system,
            states: q,
            token_map,
        })
    }

    /// Builds a system from candidate token rows: identity rows are
    /// discarded, equal rows merged under a `|`-joined name, and the reverse
    /// pairing inferred from the action. Returns the surviving index of each
    /// candidate.
    pub(crate) fn from_rows_merged(
        states: Vec<String>,
        names: &[String],
        candidates: Vec<Vec<usize>>,
    ) -> Result<(TokenSystem, Vec<Option<usize>>)> {
        let mut rows: Vec<Vec<usize>> = Vec::new();
        let mut merged: Vec<Vec<&str>> = Vec::new();
        let mut map = vec![None; candidates.len()];
        for (t, row) in candidates.into_iter().enumerate() {
            if row.iter().enumerate().all(|(i, &v)| i == v) {
                continue;
            }
            match rows.iter().position(|r| *r == row) {
                Some(k) => {
                    merged[k].push(&names[t]);
                    map[t] = Some(k);
                }
                None => {
                    map[t] = Some(rows.len());
                    rows.push(row);
                    merged.push(vec![&names[t]]);
                }
            }
        }
        let tokens: Vec<String> = merged.iter().map(|n| n.join("|")).collect();
        let reverse = infer_reverse(states.len(), &rows);
        Ok((TokenSystem::new(states, tokens, rows, reverse)?, map))
    }

    /// Structural equality: same ids, same action, same pairing.
    pub fn same_as(&self, other: &TokenSystem) -> bool {
        self.states == other.states
            && self.tokens == other.tokens
            && self.action == other.action
            && self.reverse == other.reverse
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: TokenSystemJson = serde_json::from_str(text)?;
        Self::from_json(raw)
    }

    pub fn from_json(raw: TokenSystemJson) -> Result<Self> {
        let states = raw.states;
        let s_index = index_names("state", &states)?;
        let tokens: Vec<String> = raw.tokens.iter().map(|t| t.id.clone()).collect();
        let t_index = index_names("token", &tokens)?;
        let mut reverse: Vec<Option<usize>> = vec![None; tokens.len()];
        for (t, spec) in raw.tokens.iter().enumerate() {
            if let Some(r) = &spec.reverse {
                let r = *t_index
                    .get(r)
                    .ok_or_else(|| MediaError::UnknownToken(r.clone()))?;
                for (a, b) in [(t, r), (r, t)] {
                    match reverse[a] {
                        None => reverse[a] = Some(b),
                        Some(x) if x == b => {}
                        Some(_) => {
                            return Err(MediaError::invalid(format!(
                                "token `{}` has conflicting reverse declarations",
                                tokens[a]
                            )))
                        }
                    }
                }
            }
        }
        if let Some(extra) = raw.action.keys().find(|k| !t_index.contains_key(*k)) {
            return Err(MediaError::Parse(format!(
                "action: entry for undeclared token `{extra}`"
            )));
        }
        let mut action = Vec::with_capacity(tokens.len());
        for t in &tokens {
            let map = raw.action.get(t).ok_or_else(|| {
                MediaError::Parse(format!("action: missing entry for token `{t}`"))
            })?;
            let mut row = vec![usize::MAX; states.len()];
            for (from, to) in map {
                let f = *s_index.get(from).ok_or_else(|| {
                    MediaError::Parse(format!("action.{t}: unknown state `{from}`"))
                })?;
                let v = *s_index.get(to).ok_or_else(|| {
                    MediaError::Parse(format!("action.{t}.{from}: unknown state `{to}`"))
                })?;
                row[f] = v;
            }
            if let Some(missing) = row.iter().position(|&v| v == usize::MAX) {
                return Err(MediaError::Parse(format!(
                    "action.{t}: missing entry for state `{}` (action maps must be total)",
                    states[missing]
                )));
            }
            action.push(row);
        }
        Self::new(states, tokens, action, reverse)
    }

    pub fn to_json(&self) -> TokenSystemJson {
        TokenSystemJson {
            states: self.states.clone(),
            tokens: (0..self.n_tokens())
                .map(|t| TokenSpec {
                    id: self.tokens[t].clone(),
                    reverse: self.reverse[t].map(|r| self.tokens[r].clone()),
                })
                .collect(),
            action: (0..self.n_tokens())
                .map(|t| {
                    let row = (0..self.n_states())
                        .map(|s| (self.states[s].clone(), self.states[self.act(t, s)].clone()))
                        .collect();
                    (self.tokens[t].clone(), row)
                })
                .collect(),
        }
    }
}

/// Pairs tokens whose unique reverse is mutual.
fn infer_reverse(n_states: usize, rows: &[Vec<usize>]) -> Vec<Option<usize>> {
    let is_rev = |t: usize, r: usize| {
        (0..n_states).all(|s| {
            let v = rows[t][s];
            let w = rows[r][s];
            (v == s || rows[r][v] == s) && (w == s || rows[t][w] == s)
        })
    };
    let unique: Vec<Option<usize>> = (0..rows.len())
        .map(|t| {
            let mut found = (0..rows.len()).filter(|&r| is_rev(t, r));
            match (found.next(), found.next()) {
                (Some(r), None) if r != t => Some(r),
                _ => None,
            }
        })
        .collect();
    (0..rows.len())
        .map(|t| unique[t].filter(|&r| unique[r] == Some(t)))
        .collect()
}

/// A reduced system with the bookkeeping needed to relate it to its source.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub system: TokenSystem,
    /// Source state of each reduced state.
    pub states: Vec<usize>,
    /// Reduced token of each source token, `None` when it reduced to the identity.
    pub token_map: Vec<Option<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reverse: Option<String>,
}

/// On-disk form of a token system.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenSystemJson {
    pub states: Vec<String>,
    pub tokens: Vec<TokenSpec>,
    pub action: BTreeMap<String, BTreeMap<String, String>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> TokenSystem {
        TokenSystem::from_moves(
            &["P", "Q", "R"],
            &[("a", "a~"), ("b", "b~")],
            &[
                ("a", "P", "Q"),
                ("a~", "Q", "P"),
                ("b", "Q", "R"),
                ("b~", "R", "Q"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_identity_token() {
        let err = TokenSystem::new(
            vec!["S".into(), "T".into()],
            vec!["t".into()],
            vec![vec![0, 1]],
            vec![None],
        )
        .unwrap_err();
        assert!(err.to_string().contains("identity"));
    }

    #[test]
    fn rejects_single_state() {
        assert!(TokenSystem::new(vec!["S".into()], vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn rejects_partial_action_at_parse_time() {
        let text = r#"{"states":["S","T"],"tokens":[{"id":"t","reverse":"u"},{"id":"u"}],
            "action":{"t":{"S":"T","T":"T"},"u":{"T":"S"}}}"#;
        let err = TokenSystem::from_json_str(text).unwrap_err();
        assert!(
            err.to_string().contains("missing entry for state `S`"),
            "{err}"
        );
    }

    #[test]
    fn one_sided_reverse_declaration_is_mutual() {
        let text = r#"{"states":["S","T"],"tokens":[{"id":"t","reverse":"u"},{"id":"u"}],
            "action":{"t":{"S":"T","T":"T"},"u":{"S":"S","T":"S"}}}"#;
        let ts = TokenSystem::from_json_str(text).unwrap();
        assert_eq!(ts.reverse(1), Some(0));
        let again = TokenSystem::from_json(ts.to_json()).unwrap();
        assert!(again.same_as(&ts));
    }

    #[test]
    fn reduction_to_non_adjacent_pair_has_no_tokens() {
        let ts = path3();
        let p = ts.state_id("P").unwrap();
        let r = ts.state_id("R").unwrap();
        let red = ts.reduce(&[p, r]).unwrap();
        assert_eq!(red.n_states(), 2);
        assert_eq!(red.n_tokens(), 0);
    }

    #[test]
    fn reduction_to_all_states_is_identity() {
        let ts = path3();
        let red = ts.reduce(&[0, 1, 2]).unwrap();
        assert!(red.same_as(&ts));
    }

    #[test]
    fn reduction_needs_two_states() {
        assert!(path3().reduce(&[1]).is_err());
        assert!(path3().reduce(&[1, 1]).is_err());
    }

    #[test]
    fn reduction_merges_equal_tokens() {
        // x and y agree once C is dropped.
        let ts = TokenSystem::from_moves(
            &["A", "B", "C"],
            &[("x", "x~"), ("y", "y~")],
            &[
                ("x", "A", "B"),
                ("x~", "B", "A"),
                ("y", "A", "B"),
                ("y", "C", "A"),
                ("y~", "B", "A"),
                ("y~", "A", "C"),
            ],
        )
        .unwrap();
        let red = ts.reduce_with_map(&[0, 1]).unwrap();
        assert_eq!(
            red.system.tokens(),
            &["x|y".to_string(), "x~|y~".to_string()]
        );
        assert_eq!(red.system.reverse(0), Some(1));
        assert_eq!(red.token_map, vec![Some(0), Some(1), Some(0), Some(1)]);
    }
}
