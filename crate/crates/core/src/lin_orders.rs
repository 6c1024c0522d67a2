//! The medium of linear orders on `{1, ..., n}` under adjacent transpositions.
//!
//! The reference order `L₀` is `1 < 2 < ... < n`. Its pairs `ij` (`i < j`)
//! are numbered lexicographically and form the ground set of the encoding
//! `L ↦ L ∩ L₀`.

use crate::bitset::BitSet;
use crate::error::{MediaError, Result};
use crate::token_core::TokenSystem;
use crate::wg_sets::SetFamily;

pub const DEFAULT_MAX_N: usize = 7;
/// Element names are single digits.
pub const HARD_MAX_N: usize = 9;

/// Index of the pair `i < j` (zero-based elements) among the pairs of `L₀`.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Pair names `12, 13, ..., (n-1)n` in index order.
pub fn pair_names(n: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in i + 1..n {
            out.push(format!("{}{}", i + 1, j + 1));
        }
    }
    out
}

/// A linear order stored as its sequence of zero-based elements, first to last.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearOrder {
    seq: Vec<usize>,
    pos: Vec<usize>,
}

impl LinearOrder {
    pub fn new(seq: Vec<usize>) -> Result<Self> {
        let n = seq.len();
        let mut pos = vec![usize::MAX; n];
        for (p, &x) in seq.iter().enumerate() {
            if x >= n || pos[x] != usize::MAX {
                return Err(MediaError::invalid("sequence is not a permutation of 0..n"));
            }
            pos[x] = p;
        }
        Ok(Self { seq, pos })
    }

    /// Parses a digit string such as `"213"`.
    pub fn parse(text: &str) -> Result<Self> {
        let seq = text
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if d >= 1 => Ok(d as usize - 1),
                _ => Err(MediaError::UnknownElement(c.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(seq)
    }

    pub fn reference(n: usize) -> Self {
        Self::new((0..n).collect()).unwrap()
    }

    pub fn n(&self) -> usize {
        self.seq.len()
    }

    pub fn seq(&self) -> &[usize] {
        &self.seq
    }

    pub fn name(&self) -> String {
        self.seq.iter().map(|x| (x + 1).to_string()).collect()
    }

    fn check(&self, x: usize) -> Result<()> {
        if x < self.n() {
            Ok(())
        } else {
            Err(MediaError::UnknownElement((x + 1).to_string()))
        }
    }

    /// `x` comes before `y`.
    pub fn precedes(&self, x: usize, y: usize) -> bool {
        self.pos[x] < self.pos[y]
    }

    /// `y` immediately precedes `x`.
    pub fn covers(&self, x: usize, y: usize) -> Result<bool> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.pos[y] + 1 == self.pos[x])
    }

    /// `τ_xy`: swaps `y, x` into `x, y` when `x` covers `y`, else no change.
    pub fn apply_token(&self, x: usize, y: usize) -> Result<LinearOrder> {
        if !self.covers(x, y)? {
            return Ok(self.clone());
        }
        let mut seq = self.seq.clone();
        seq.swap(self.pos[y], self.pos[x]);
        Ok(LinearOrder::new(seq).unwrap())
    }

    /// `L ∩ L₀`: the pairs `ij`, `i < j`, with `i` before `j`.
    pub fn encode(&self) -> BitSet {
        let n = self.n();
        let mut out = BitSet::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.precedes(i, j) {
                    out.insert(pair_index(n, i, j));
                }
            }
        }
        out
    }

    /// The order as a set of ordered pairs `(x, y)` with `x` before `y`.
    pub fn relation(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, &x) in self.seq.iter().enumerate() {
            for &y in &self.seq[a + 1..] {
                out.push((x, y));
            }
        }
        out
    }
}

/// All orders in lexicographic order of their sequences.
pub fn all_orders(n: usize) -> Vec<LinearOrder> {
    let mut seq: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        out.push(LinearOrder::new(seq.clone()).unwrap());
        // Next lexicographic permutation.
        let Some(i) = (1..n).rev().find(|&i| seq[i - 1] < seq[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| seq[j] > seq[i - 1]).unwrap();
        seq.swap(i - 1, j);
        seq[i..].reverse();
    }
}

/// Lexicographic rank of a permutation of `0..n`.
fn rank(seq: &[usize]) -> usize {
    let n = seq.len();
    let mut fact = vec![1usize; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1] * i;
    }
    let mut r = 0;
    for i in 0..n {
        let smaller = seq[i + 1..].iter().filter(|&&y| y < seq[i]).count();
        r += smaller * fact[n - 1 - i];
    }
    r
}

pub fn token_name(x: usize, y: usize) -> String {
    format!("t:{}<{}", x + 1, y + 1)
}

/// The medium together with its encoding family (states in the same order).
#[derive(Clone, Debug)]
pub struct LinearMedium {
    pub orders: Vec<LinearOrder>,
    pub system: TokenSystem,
    pub family: SetFamily,
}

pub fn linear_medium(n: usize) -> Result<LinearMedium> {
    linear_medium_capped(n, DEFAULT_MAX_N)
}

/// States are all orders, tokens `τ_xy` and `τ_yx` for each pair of `L₀`
/// (adjacent in the token list and mutually reverse).
pub fn linear_medium_capped(n: usize, cap: usize) -> Result<LinearMedium> {
    if n < 2 {
        return Err(MediaError::invalid("linear medium needs n >= 2"));
    }
    let cap = cap.min(HARD_MAX_N);
    if n > cap {
        return Err(MediaError::CapExceeded {
            what: "linear-order size",
            limit: cap,
            actual: n,
        });
    }
    let orders = all_orders(n);
    let states: Vec<String> = orders.iter().map(LinearOrder::name).collect();
    let mut tokens = Vec::new();
    let mut action = Vec::new();
    let mut reverse = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for (x, y) in [(i, j), (j, i)] {
                tokens.push(token_name(x, y));
                action.push(
                    orders
                        .iter()
                        .map(|l| rank(l.apply_token(x, y).unwrap().seq()))
                        .collect(),
                );
                let k = reverse.len();
                reverse.push(Some(if x < y { k + 1 } else { k - 1 }));
            }
        }
    }
    let system = TokenSystem::new(states, tokens, action, reverse)?;
    let family = SetFamily::new(
        pair_names(n),
        orders.iter().map(LinearOrder::encode).collect(),
    )?;
    Ok(LinearMedium {
        orders,
        system,
        family,
    })
}

fn transitive(n: usize, rel: &BitSet) -> bool {
    for i in 0..n {
        for j in i + 1..n {
            if !rel.contains(pair_index(n, i, j)) {
                continue;
            }
            for k in j + 1..n {
                if rel.contains(pair_index(n, j, k)) && !rel.contains(pair_index(n, i, k)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether `p ⊆ L₀` equals `L₀ ∩ L'` for some linear order `L'`, decided by
/// the criterion that `p` and `L₀ \ p` are both partial orders.
pub fn is_alpha_image(p: &BitSet, n: usize) -> Result<bool> {
    if p.bound() > pair_count(n) {
        return Err(MediaError::invalid(
            "set is not a subset of the reference order",
        ));
    }
    let rest = BitSet::full(pair_count(n)).difference(p);
    Ok(transitive(n, p) && transitive(n, &rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token_core::Message;
    use std::collections::HashSet;

    fn lo(s: &str) -> LinearOrder {
        LinearOrder::parse(s).unwrap()
    }

    #[test]
    fn covers_examples() {
        assert!(lo("123").covers(1, 0).unwrap());
        assert!(!lo("123").covers(2, 0).unwrap());
        assert!(lo("213").covers(0, 1).unwrap());
        assert!(lo("321").covers(0, 1).unwrap());
        assert!(!lo("321").covers(1, 0).unwrap());
        assert!(lo("12").covers(5, 0).is_err());
    }

    #[test]
    fn covers_agrees_with_adjacent_pairs() {
        for l in all_orders(4) {
            let adjacent: HashSet<(usize, usize)> =
                l.seq().windows(2).map(|w| (w[1], w[0])).collect();
            for x in 0..4 {
                for y in 0..4 {
                    if x != y {
                        assert_eq!(l.covers(x, y).unwrap(), adjacent.contains(&(x, y)));
                    }
                }
            }
        }
    }

    #[test]
    fn token_examples() {
        assert_eq!(lo("123").apply_token(1, 0).unwrap(), lo("213"));
        assert_eq!(lo("123").apply_token(2, 0).unwrap(), lo("123"));
        for l in all_orders(4) {
            for x in 0..4 {
                for y in 0..4 {
                    if x == y {
                        continue;
                    }
                    let m = l.apply_token(x, y).unwrap();
                    if m != l {
                        assert_eq!(m.apply_token(y, x).unwrap(), l);
                    }
                    assert_eq!(m != l, l.covers(x, y).unwrap());
                }
            }
        }
    }

    #[test]
    fn encode_examples() {
        let names = pair_names(3);
        let show = |s: BitSet| s.iter().map(|i| names[i].clone()).collect::<Vec<_>>();
        assert_eq!(show(lo("123").encode()), vec!["12", "13", "23"]);
        assert!(lo("321").encode().is_empty());
        assert_eq!(show(lo("312").encode()), vec!["12"]);
    }

    #[test]
    fn encode_is_injective() {
        for n in 1..=5 {
            let images: HashSet<BitSet> = all_orders(n).iter().map(LinearOrder::encode).collect();
            assert_eq!(images.len(), (1..=n).product::<usize>());
        }
    }

    #[test]
    fn rank_matches_enumeration() {
        for (i, l) in all_orders(5).iter().enumerate() {
            assert_eq!(rank(l.seq()), i);
        }
    }

    #[test]
    fn three_transpositions_reverse_the_order() {
        let m = linear_medium(3).unwrap();
        let ts = &m.system;
        let msg = Message::from_names(ts, &["t:2<1", "t:3<1", "t:3<2"]).unwrap();
        let s = ts.state_id("123").unwrap();
        assert_eq!(ts.state_name(ts.apply(s, &msg).unwrap()), "321");
        assert!(ts.is_stepwise_effective(s, &msg).unwrap());
    }

    #[test]
    fn small_media_shapes() {
        let m = linear_medium(2).unwrap();
        assert_eq!((m.system.n_states(), m.system.n_tokens()), (2, 2));
        let m = linear_medium(3).unwrap();
        assert_eq!((m.system.n_states(), m.system.n_tokens()), (6, 6));
        assert!(linear_medium(1).is_err());
        assert!(matches!(
            linear_medium(8),
            Err(MediaError::CapExceeded { .. })
        ));
        assert!(matches!(
            linear_medium_capped(10, 99),
            Err(MediaError::CapExceeded { .. })
        ));
    }

    #[test]
    fn pullback_identity() {
        for n in 2..=5 {
            let m = linear_medium(n).unwrap();
            let f = &m.family;
            for l in &m.orders {
                for i in 0..n {
                    for j in i + 1..n {
                        let k = pair_index(n, i, j);
                        for (x, y, add) in [(i, j, true), (j, i, false)] {
                            let lhs = l.apply_token(x, y).unwrap().encode();
                            let set = l.encode();
                            let moved = set.with_toggled(k);
                            let rhs = if set.contains(k) != add && f.contains(&moved) {
                                moved
                            } else {
                                set
                            };
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_image_criterion_matches_enumeration() {
        for n in 2..=5 {
            let images: HashSet<BitSet> = all_orders(n).iter().map(LinearOrder::encode).collect();
            let m = pair_count(n);
            for mask in 0u32..1 << m {
                let p: BitSet = (0..m).filter(|b| mask >> b & 1 == 1).collect();
                assert_eq!(
                    is_alpha_image(&p, n).unwrap(),
                    images.contains(&p),
                    "n={n} p={p:?}"
                );
            }
        }
    }

    #[test]
    fn alpha_image_examples() {
        let n = 3;
        let full = BitSet::full(3);
        assert!(is_alpha_image(&full, n).unwrap());
        let p: BitSet = [pair_index(3, 0, 1), pair_index(3, 1, 2)]
            .into_iter()
            .collect();
        assert!(!is_alpha_image(&p, n).unwrap());
        assert!(!is_alpha_image(&BitSet::singleton(pair_index(3, 0, 2)), n).unwrap());
        assert!(is_alpha_image(&BitSet::singleton(7), n).is_err());
    }
}
