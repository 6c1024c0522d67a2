use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{MediaError, Result};
use crate::wg_sets::SetFamily;

/// Ranks `r(x) = min{|A| : x ∈ A ∈ F}` of a well-graded family containing `∅`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankTable {
    /// Rank per ground element; `None` for elements of no member.
    pub ranks: Vec<Option<usize>>,
    /// Index of a least member containing each element.
    pub witnesses: Vec<Option<usize>>,
}

impl RankTable {
    /// `X_k`, the elements of rank `k`.
    pub fn stratum(&self, k: usize) -> BitSet {
        (0..self.ranks.len())
            .filter(|&x| self.ranks[x] == Some(k))
            .collect()
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.iter().flatten().copied().max().unwrap_or(0)
    }
}

pub fn rank_table(f: &SetFamily) -> Result<RankTable> {
    if !f.contains(&BitSet::new()) {
        return Err(MediaError::invalid(
            "rank table needs the empty set in the family",
        ));
    }
    if let Some((i, j)) = f.well_graded_witness() {
        return Err(MediaError::invalid(format!(
            "family is not well graded: no line segment from {} to {}",
            f.display(&f.sets()[i]),
            f.display(&f.sets()[j])
        )));
    }
    let n = f.ground().len();
    let mut ranks = vec![None; n];
    let mut witnesses = vec![None; n];
    for (i, s) in f.sets().iter().enumerate() {
        for x in s.iter() {
            if ranks[x].is_none_or(|r| s.len() < r) {
                ranks[x] = Some(s.len());
                witnesses[x] = Some(i);
            }
        }
    }
    Ok(RankTable { ranks, witnesses })
}

/// The cube isometry `S ↦ π(S Δ A)` on subsets of a fixed ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeIsometry {
    ground: Vec<String>,
    translation: BitSet,
    perm: Vec<usize>,
}

impl CubeIsometry {
    pub fn new(ground: Vec<String>, translation: BitSet, perm: Vec<usize>) -> Result<Self> {
        let n = ground.len();
        if perm.len() != n || translation.bound() > n {
            return Err(MediaError::invalid(
                "isometry does not match its ground set",
            ));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(MediaError::invalid("isometry map is not a permutation"));
            }
        }
        Ok(Self {
            ground,
            translation,
            perm,
        })
    }

    pub fn identity(ground: Vec<String>) -> Self {
        let perm = (0..ground.len()).collect();
        Self {
            ground,
            translation: BitSet::new(),
            perm,
        }
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn translation(&self) -> &BitSet {
        &self.translation
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.translation.is_empty() && self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn apply(&self, s: &BitSet) -> Result<BitSet> {
        if s.bound() > self.ground.len() {
            return Err(MediaError::invalid(
                "set leaves the ground set of the isometry",
            ));
        }
        Ok(self.apply_unchecked(s))
    }

    fn apply_unchecked(&self, s: &BitSet) -> BitSet {
        s.symmetric_difference(&self.translation)
            .map(|x| self.perm[x])
    }

    fn check_ground(&self, other: &CubeIsometry) -> Result<()> {
        if self.ground != other.ground {
            return Err(MediaError::invalid(
                "isometries act on different ground sets",
            ));
        }
        Ok(())
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &CubeIsometry) -> Result<CubeIsometry> {
        self.check_ground(other)?;
        let inv = other.inverse_perm();
        let perm = other.perm.iter().map(|&x| self.perm[x]).collect();
        let translation = other
            .translation
            .symmetric_difference(&self.translation.map(|x| inv[x]));
        Ok(CubeIsometry {
            ground: self.ground.clone(),
            translation,
            perm,
        })
    }

    pub fn invert(&self) -> CubeIsometry {
        CubeIsometry {
            ground: self.ground.clone(),
            translation: self.translation.map(|x| self.perm[x]),
            perm: self.inverse_perm(),
        }
    }

    fn inverse_perm(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (x, &y) in self.perm.iter().enumerate() {
            inv[y] = x;
        }
        inv
    }
}

/// Extends an isometry `α : f1 → f2` (given as `alpha[i]` = index in `f2`
/// of the image of member `i` of `f1`) to an isometry of the whole cube.
///
/// Both families are translated so that a chosen member and its image
/// become `∅`; the permutation is then read off least witnesses, stratum by
/// stratum. Elements in no member of `f1` are sent, in ground order, to the
/// least remaining elements.
pub fn extend_isometry(f1: &SetFamily, f2: &SetFamily, alpha: &[usize]) -> Result<CubeIsometry> {
    if f1.ground() != f2.ground() {
        return Err(MediaError::invalid(
            "families are over different ground sets",
        ));
    }
    if f1.is_empty() || alpha.len() != f1.len() || f2.len() != f1.len() {
        return Err(MediaError::invalid(
            "map must be a bijection between non-empty families",
        ));
    }
    let mut hit = vec![false; f2.len()];
    for &a in alpha {
        if a >= f2.len() || std::mem::replace(&mut hit[a], true) {
            return Err(MediaError::invalid("map is not a bijection"));
        }
    }
    for (i, p) in f1.sets().iter().enumerate() {
        for (j, q) in f1.sets().iter().enumerate().skip(i + 1) {
            if p.distance(q) != f2.sets()[alpha[i]].distance(&f2.sets()[alpha[j]]) {
                return Err(MediaError::invalid(format!(
                    "map is not an isometry: d({}, {}) changes",
                    f1.display(p),
                    f1.display(q)
                )));
            }
        }
    }
    for f in [f1, f2] {
        if !f.is_well_graded() {
            return Err(MediaError::invalid("families must be well graded"));
        }
    }
    let n = f1.ground().len();
    let p = f1.sets()[0].clone();
    let q = f2.sets()[alpha[0]].clone();
    let g1 = f1.translate(&p)?;
    let g2 = f2.translate(&q)?;
    let r1 = rank_table(&g1)?;
    let r2 = rank_table(&g2)?;
    let defect = |msg: String| Err(MediaError::Defect(msg));

    let mut perm = vec![usize::MAX; n];
    for (i, a) in g1.sets().iter().enumerate() {
        for x in a.iter() {
            if r1.ranks[x] != Some(a.len()) {
                continue;
            }
            let Some(k) = g1.index_of(&a.with_toggled(x)) else {
                return defect(format!(
                    "least member containing {} lacks its predecessor",
                    f1.ground()[x]
                ));
            };
            let (big, small) = (&g2.sets()[alpha[i]], &g2.sets()[alpha[k]]);
            let added = big.difference(small);
            if !small.is_subset(big) || added.len() != 1 {
                return defect("image of a witness pair is not a one-element extension".into());
            }
            let y = added.iter().next().unwrap();
            if r2.ranks[y] != r1.ranks[x] {
                return defect(format!(
                    "{} and its image have different ranks",
                    f1.ground()[x]
                ));
            }
            match perm[x] {
                usize::MAX => perm[x] = y,
                z if z == y => {}
                _ => {
                    return defect(format!(
                        "witnesses disagree on the image of {}",
                        f1.ground()[x]
                    ))
                }
            }
        }
    }
    for k in 1..=r1.max_rank().max(r2.max_rank()) {
        let (s1, s2) = (r1.stratum(k), r2.stratum(k));
        let image: BitSet = s1.iter().map(|x| perm[x]).collect();
        if s1.len() != s2.len() || image != s2 {
            return defect(format!("rank-{k} correspondence is not a bijection"));
        }
    }
    let taken: BitSet = perm.iter().copied().filter(|&y| y != usize::MAX).collect();
    let mut free = (0..n).filter(|y| !taken.contains(*y));
    for slot in perm.iter_mut().filter(|y| **y == usize::MAX) {
        *slot = free.next().expect("unused elements match in number");
    }
    // S ↦ π(S Δ P) Δ Q = π(S Δ P Δ π⁻¹(Q)).
    let mut inv = vec![0; n];
    for (x, &y) in perm.iter().enumerate() {
        inv[y] = x;
    }
    let translation = p.symmetric_difference(&q.map(|y| inv[y]));
    let iso = CubeIsometry::new(f1.ground().to_vec(), translation, perm)?;
    for (i, s) in f1.sets().iter().enumerate() {
        if iso.apply_unchecked(s) != f2.sets()[alpha[i]] {
            return defect(format!(
                "extension disagrees with the map on {}",
                f1.display(s)
            ));
        }
    }
    Ok(iso)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(ground: &[&str], sets: &[&[&str]]) -> SetFamily {
        SetFamily::from_names(ground, sets).unwrap()
    }

    fn seventh() -> SetFamily {
        fam(
            &["a", "b", "c"],
            &[&[], &["a"], &["b"], &["a", "b"], &["a", "b", "c"]],
        )
    }

    #[test]
    fn seventh_family_ranks() {
        let r = rank_table(&seventh()).unwrap();
        assert_eq!(r.ranks, vec![Some(1), Some(1), Some(3)]);
        assert_eq!(r.stratum(1), [0, 1].into_iter().collect());
        assert!(r.stratum(2).is_empty());
        assert_eq!(r.stratum(3), BitSet::singleton(2));
    }

    #[test]
    fn chain_and_edge_ranks() {
        let chain = fam(
            &["a", "b", "c"],
            &[&[], &["a"], &["a", "b"], &["a", "b", "c"]],
        );
        assert_eq!(
            rank_table(&chain).unwrap().ranks,
            vec![Some(1), Some(2), Some(3)]
        );
        assert_eq!(
            rank_table(&fam(&["a"], &[&[], &["a"]])).unwrap().ranks,
            vec![Some(1)]
        );
        assert!(rank_table(&fam(&["a"], &[&["a"]])).is_err());
    }

    #[test]
    fn extends_a_single_edge() {
        let f1 = fam(&["a", "b"], &[&[], &["a"]]);
        let f2 = fam(&["a", "b"], &[&[], &["b"]]);
        let iso = extend_isometry(&f1, &f2, &[0, 1]).unwrap();
        assert_eq!(iso.perm(), &[1, 0]);
        assert!(iso.translation().is_empty());
    }

    #[test]
    fn identity_on_seventh_family() {
        let f = seventh();
        let iso = extend_isometry(&f, &f, &[0, 1, 2, 3, 4]).unwrap();
        assert!(iso.is_identity());
    }

    #[test]
    fn rejects_non_isometries_and_ground_mismatch() {
        let f1 = fam(&["a", "b"], &[&[], &["a"], &["a", "b"]]);
        let f2 = fam(&["a", "b"], &[&[], &["b"], &["a", "b"]]);
        assert!(extend_isometry(&f1, &f2, &[0, 2, 1]).is_err());
        let f3 = fam(&["a", "c"], &[&[], &["a"], &["a", "c"]]);
        assert!(extend_isometry(&f1, &f3, &[0, 1, 2]).is_err());
    }

    #[test]
    fn group_operation_examples() {
        let ground: Vec<String> = vec!["a".into(), "b".into()];
        let id = CubeIsometry::identity(ground.clone());
        let ab: BitSet = [0, 1].into_iter().collect();
        assert_eq!(id.apply(&ab).unwrap(), ab);
        let t = CubeIsometry::new(ground.clone(), BitSet::singleton(0), vec![0, 1]).unwrap();
        assert_eq!(t.apply(&ab).unwrap(), BitSet::singleton(1));
        let other = CubeIsometry::identity(vec!["x".into(), "y".into()]);
        assert!(t.compose(&other).is_err());
        assert!(CubeIsometry::new(ground, BitSet::new(), vec![0, 0]).is_err());
    }

    fn isometry(n: usize) -> impl Strategy<Value = CubeIsometry> {
        (
            proptest::collection::vec(any::<bool>(), n),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(move |(bits, perm)| {
                let ground = (0..n).map(|i| format!("x{i}")).collect();
                let a = (0..n).filter(|&i| bits[i]).collect();
                CubeIsometry::new(ground, a, perm).unwrap()
            })
    }

    fn subset(n: usize) -> impl Strategy<Value = BitSet> {
        proptest::collection::vec(any::<bool>(), n)
            .prop_map(|b| (0..b.len()).filter(|&i| b[i]).collect())
    }

    proptest! {
        #[test]
        fn group_laws(s in isometry(6), t in isometry(6), x in subset(6), y in subset(6)) {
            let st = s.compose(&t).unwrap();
            prop_assert_eq!(st.apply(&x).unwrap(), s.apply(&t.apply(&x).unwrap()).unwrap());
            prop_assert!(s.compose(&s.invert()).unwrap().is_identity());
            prop_assert!(s.invert().compose(&s).unwrap().is_identity());
            prop_assert_eq!(s.apply(&x).unwrap().distance(&s.apply(&y).unwrap()), x.distance(&y));
        }
    }
}
