//! Families of finite sets under the symmetric-difference metric.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{MediaError, Result};
use crate::token_core::TokenSystem;

/// `|p Δ q|`.
pub fn distance(p: &BitSet, q: &BitSet) -> usize {
    p.distance(q)
}

/// `p ∩ q ⊆ r ⊆ p ∪ q`.
pub fn between(p: &BitSet, r: &BitSet, q: &BitSet) -> bool {
    p.intersection(q).is_subset(r) && r.is_subset(&p.union(q))
}

/// `d(p, r) + d(r, q) = d(p, q)`; always agrees with [`between`].
pub fn between_metric(p: &BitSet, r: &BitSet, q: &BitSet) -> bool {
    p.distance(r) + r.distance(q) == p.distance(q)
}

/// A ground set `X` of named elements with a list of distinct subsets.
#[derive(Clone, Debug)]
pub struct SetFamily {
    ground: Vec<String>,
    sets: Vec<BitSet>,
    element_index: HashMap<String, usize>,
    set_index: HashMap<BitSet, usize>,
}

impl PartialEq for SetFamily {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.sets == other.sets
    }
}

impl Eq for SetFamily {}

/// Elements removed by [`SetFamily::normalize`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Normalization {
    /// Elements of every member, deleted from ground and from every set.
    pub common: Vec<String>,
    /// Ground elements in no member.
    pub unused: Vec<String>,
}

impl SetFamily {
    pub fn new(ground: Vec<String>, sets: Vec<BitSet>) -> Result<Self> {
        let mut element_index = HashMap::with_capacity(ground.len());
        for (i, x) in ground.iter().enumerate() {
            if element_index.insert(x.clone(), i).is_some() {
                return Err(MediaError::invalid(format!(
                    "duplicate ground element `{x}`"
                )));
            }
        }
        let mut set_index = HashMap::with_capacity(sets.len());
        for (i, s) in sets.iter().enumerate() {
            if s.bound() > ground.len() {
                return Err(MediaError::invalid(format!(
                    "set #{i} has an element outside the ground set"
                )));
            }
            if set_index.insert(s.clone(), i).is_some() {
                return Err(MediaError::invalid(format!(
                    "set {} occurs twice",
                    display_set(&ground, s)
                )));
            }
        }
        Ok(Self {
            ground,
            sets,
            element_index,
            set_index,
        })
    }

    pub fn from_names<S: AsRef<str>>(ground: &[S], sets: &[&[S]]) -> Result<Self> {
        let ground: Vec<String> = ground.iter().map(|x| x.as_ref().to_string()).collect();
        let index: HashMap<&str, usize> = ground
            .iter()
            .enumerate()
            .map(|(i, x)| (x.as_str(), i))
            .collect();
        let sets = sets
            .iter()
            .map(|s| {
                s.iter()
                    .map(|x| {
                        index
                            .get(x.as_ref())
                            .copied()
                            .ok_or_else(|| MediaError::UnknownElement(x.as_ref().to_string()))
                    })
                    .collect::<Result<BitSet>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ground, sets)
    }

    /// Every subset of `ground`, ordered by size then elements.
    pub fn power_set(ground: Vec<String>) -> Result<Self> {
        let n = ground.len();
        if n > 20 {
            return Err(MediaError::CapExceeded {
                what: "power-set ground size",
                limit: 20,
                actual: n,
            });
        }
        let mut sets: Vec<BitSet> = (0u64..1 << n)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect();
        sets.sort();
        Self::new(ground, sets)
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn sets(&self) -> &[BitSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn index_of(&self, s: &BitSet) -> Option<usize> {
        self.set_index.get(s).copied()
    }

    pub fn contains(&self, s: &BitSet) -> bool {
        self.set_index.contains_key(s)
    }

    pub fn element_id(&self, x: &str) -> Result<usize> {
        self.element_index
            .get(x)
            .copied()
            .ok_or_else(|| MediaError::UnknownElement(x.to_string()))
    }

    pub fn parse_set<S: AsRef<str>>(&self, names: &[S]) -> Result<BitSet> {
        names.iter().map(|x| self.element_id(x.as_ref())).collect()
    }

    /// `{a,b}` in ground order; `{}` for the empty set.
    pub fn display(&self, s: &BitSet) -> String {
        display_set(&self.ground, s)
    }

    pub fn element_names(&self, s: &BitSet) -> Vec<String> {
        s.iter().map(|i| self.ground[i].clone()).collect()
    }

    pub fn union_all(&self) -> BitSet {
        self.sets.iter().fold(BitSet::new(), |acc, s| acc.union(s))
    }

    pub fn intersection_all(&self) -> BitSet {
        match self.sets.split_first() {
            None => BitSet::new(),
            Some((first, rest)) => rest
                .iter()
                .fold(first.clone(), |acc, s| acc.intersection(s)),
        }
    }

    /// `∪F \ ∩F`: the elements that carry a token pair in a well-graded family.
    pub fn active_elements(&self) -> BitSet {
        self.union_all().difference(&self.intersection_all())
    }

    pub fn is_normalized(&self) -> bool {
        self.intersection_all().is_empty() && self.union_all() == BitSet::full(self.ground.len())
    }

    /// Deletes the common elements and drops unused ones, so that `∩F = ∅`
    /// and `∪F = X`.
    pub fn normalize(&self) -> Result<(SetFamily, Normalization)> {
        let union = self.union_all();
        let common = self.intersection_all();
        let keep: Vec<usize> = (0..self.ground.len())
            .filter(|&i| union.contains(i) && !common.contains(i))
            .collect();
        let mut new_index = vec![usize::MAX; self.ground.len()];
        for (j, &i) in keep.iter().enumerate() {
            new_index[i] = j;
        }
        let sets = self
            .sets
            .iter()
            .map(|s| {
                s.iter()
                    .filter(|&i| new_index[i] != usize::MAX)
                    .map(|i| new_index[i])
                    .collect()
            })
            .collect();
        let names = |pred: &dyn Fn(usize) -> bool| -> Vec<String> {
            (0..self.ground.len())
                .filter(|&i| pred(i))
                .map(|i| self.ground[i].clone())
                .collect()
        };
        let report = Normalization {
            common: names(&|i| common.contains(i)),
            unused: names(&|i| !union.contains(i)),
        };
        let ground = keep.iter().map(|&i| self.ground[i].clone()).collect();
        Ok((SetFamily::new(ground, sets)?, report))
    }

    /// A pair `(P, Q)` of members joined by no line segment inside the
    /// family, or `None` if the family is well graded.
    ///
    /// A line segment from `P` to `Q` exists for every pair iff every `P ≠ Q`
    /// has a neighbour `P Δ {x}` in the family with `x ∈ P Δ Q`.
    pub fn well_graded_witness(&self) -> Option<(usize, usize)> {
        for (i, p) in self.sets.iter().enumerate() {
            for (j, q) in self.sets.iter().enumerate() {
                if i == j {
                    continue;
                }
                let step = p
                    .symmetric_difference(q)
                    .iter()
                    .any(|x| self.contains(&p.with_toggled(x)));
                if !step {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_well_graded(&self) -> bool {
        self.well_graded_witness().is_none()
    }

    /// A unit-step geodesic `p = P_0, ..., P_n = q` inside the family. Among
    /// several next steps the least ground element is tried first.
    pub fn line_segment(&self, p: &BitSet, q: &BitSet) -> Result<Option<Vec<BitSet>>> {
        for s in [p, q] {
            if !self.contains(s) {
                return Err(MediaError::invalid(format!(
                    "{} is not a member of the family",
                    self.display(s)
                )));
            }
        }
        let mut dead: HashSet<BitSet> = HashSet::new();
        let mut path = vec![p.clone()];
        Ok(self.extend_segment(q, &mut path, &mut dead).then_some(path))
    }

    fn extend_segment(
        &self,
        q: &BitSet,
        path: &mut Vec<BitSet>,
        dead: &mut HashSet<BitSet>,
    ) -> bool {
        let cur = path.last().unwrap().clone();
        if cur == *q {
            return true;
        }
        for x in cur.symmetric_difference(q).iter() {
            let next = cur.with_toggled(x);
            if !self.contains(&next) || dead.contains(&next) {
                continue;
            }
            path.push(next);
            if self.extend_segment(q, path, dead) {
                return true;
            }
            dead.insert(path.pop().unwrap());
        }
        false
    }

    /// For every member `S` and every `x ∈ ∪F \ ∩F`, `S Δ {x}` is a member.
    pub fn is_complete(&self) -> bool {
        let active = self.active_elements();
        self.sets
            .iter()
            .all(|s| active.iter().all(|x| self.contains(&s.with_toggled(x))))
    }

    /// The image under `S ↦ S Δ a`.
    pub fn translate(&self, a: &BitSet) -> Result<SetFamily> {
        if a.bound() > self.ground.len() {
            return Err(MediaError::invalid("translation set leaves the ground set"));
        }
        let sets = self
            .sets
            .iter()
            .map(|s| s.symmetric_difference(a))
            .collect();
        SetFamily::new(self.ground.clone(), sets)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: SetFamilyJson = serde_json::from_str(text)?;
        Self::from_json(&raw)
    }

    pub fn from_json(raw: &SetFamilyJson) -> Result<Self> {
        let sets: Vec<&[String]> = raw.sets.iter().map(Vec::as_slice).collect();
        Self::from_names(&raw.ground, &sets)
    }

    pub fn to_json(&self) -> SetFamilyJson {
        SetFamilyJson {
            ground: self.ground.clone(),
            sets: self.sets.iter().map(|s| self.element_names(s)).collect(),
        }
    }
}

pub(crate) fn display_set(ground: &[String], s: &BitSet) -> String {
    let names: Vec<&str> = s.iter().map(|i| ground[i].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

/// On-disk form of a set family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFamilyJson {
    pub ground: Vec<String>,
    pub sets: Vec<Vec<String>>,
}

/// The token system `(F, G_F)`: one candidate pair `+x`, `-x` per ground
/// element, acting as the reductions to `F` of adding and removing `x`.
/// Reductions that fix every member are discarded.
pub fn family_to_medium(f: &SetFamily) -> Result<TokenSystem> {
    let names = f.sets.iter().map(|s| f.display(s)).collect();
    family_to_medium_named(f, names)
}

/// As [`family_to_medium`], with caller-chosen state ids.
pub(crate) fn family_to_medium_named(f: &SetFamily, states: Vec<String>) -> Result<TokenSystem> {
    let mut names = Vec::with_capacity(2 * f.ground.len());
    let mut rows = Vec::with_capacity(2 * f.ground.len());
    for (x, name) in f.ground.iter().enumerate() {
        for add in [true, false] {
            names.push(format!("{}{name}", if add { '+' } else { '-' }));
            rows.push(
                f.sets
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        if s.contains(x) == add {
                            return i;
                        }
                        f.index_of(&s.with_toggled(x)).unwrap_or(i)
                    })
                    .collect(),
            );
        }
    }
    Ok(TokenSystem::from_rows_merged(states, &names, rows)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(ground: &[&str], sets: &[&[&str]]) -> SetFamily {
        SetFamily::from_names(ground, sets).unwrap()
    }

    fn set(f: &SetFamily, names: &[&str]) -> BitSet {
        f.parse_set(names).unwrap()
    }

    fn hexagon() -> SetFamily {
        fam(
            &["a", "b", "c"],
            &[
                &["a"],
                &["b"],
                &["c"],
                &["a", "b"],
                &["a", "c"],
                &["b", "c"],
            ],
        )
    }

    fn seventh() -> SetFamily {
        fam(
            &["a", "b", "c"],
            &[&[], &["a"], &["b"], &["a", "b"], &["a", "b", "c"]],
        )
    }

    #[test]
    fn distance_examples() {
        let f = fam(&["a", "b", "c"], &[]);
        assert_eq!(distance(&set(&f, &["a", "b"]), &set(&f, &["b", "c"])), 2);
        assert_eq!(distance(&set(&f, &["a"]), &set(&f, &["a"])), 0);
        let lo = fam(&["12", "13", "23"], &[]);
        assert_eq!(
            distance(&set(&lo, &["13", "23"]), &set(&lo, &["12", "13", "23"])),
            1
        );
    }

    #[test]
    fn between_examples() {
        let f = fam(&["a", "b", "c"], &[]);
        let (a, ab, abc) = (
            set(&f, &["a"]),
            set(&f, &["a", "b"]),
            set(&f, &["a", "b", "c"]),
        );
        assert!(between(&a, &ab, &abc));
        assert!(between(&a, &a, &abc));
        assert!(!between(&BitSet::new(), &ab, &a));
        assert!(!between_metric(&BitSet::new(), &ab, &a));
    }

    #[test]
    fn well_gradedness_examples() {
        assert!(fam(&["a", "b"], &[&[], &["a"], &["a", "b"]]).is_well_graded());
        let gap = fam(&["a", "b"], &[&[], &["a", "b"]]);
        assert_eq!(gap.well_graded_witness(), Some((0, 1)));
        assert!(seventh().is_well_graded());
        assert!(hexagon().is_well_graded());
    }

    #[test]
    fn line_segment_examples() {
        let chain = fam(&["a", "b"], &[&[], &["a"], &["a", "b"]]);
        let seg = chain
            .line_segment(&BitSet::new(), &set(&chain, &["a", "b"]))
            .unwrap()
            .unwrap();
        assert_eq!(
            seg,
            vec![BitSet::new(), set(&chain, &["a"]), set(&chain, &["a", "b"])]
        );
        let a = set(&chain, &["a"]);
        assert_eq!(
            chain.line_segment(&a, &a).unwrap().unwrap(),
            vec![a.clone()]
        );
        assert!(chain.line_segment(&a, &set(&chain, &["b"])).is_err());
        let gap = fam(&["a", "b"], &[&[], &["a", "b"]]);
        assert_eq!(
            gap.line_segment(&BitSet::new(), &set(&gap, &["a", "b"]))
                .unwrap(),
            None
        );
    }

    #[test]
    fn line_segment_breaks_ties_by_ground_order() {
        let sq = SetFamily::power_set(vec!["a".into(), "b".into()]).unwrap();
        let seg = sq
            .line_segment(&BitSet::new(), &BitSet::full(2))
            .unwrap()
            .unwrap();
        assert_eq!(seg[1], BitSet::singleton(0));
    }

    #[test]
    fn medium_of_small_families() {
        let edge = fam(&["a"], &[&[], &["a"]]);
        let ts = family_to_medium(&edge).unwrap();
        assert_eq!((ts.n_states(), ts.n_tokens()), (2, 2));
        assert_eq!(ts.states(), &["{}".to_string(), "{a}".to_string()]);
        assert_eq!(ts.reverse(0), Some(1));

        let gap = fam(&["a", "b"], &[&[], &["a", "b"]]);
        assert_eq!(family_to_medium(&gap).unwrap().n_tokens(), 0);

        let ts = family_to_medium(&hexagon()).unwrap();
        assert_eq!((ts.n_states(), ts.n_tokens()), (6, 6));
    }

    #[test]
    fn completeness_examples() {
        assert!(SetFamily::power_set(vec!["a".into(), "b".into()])
            .unwrap()
            .is_complete());
        assert!(!hexagon().is_complete());
        assert!(!seventh().is_complete());
    }

    #[test]
    fn translate_examples() {
        let edge = fam(&["a"], &[&[], &["a"]]);
        let t = edge.translate(&BitSet::singleton(0)).unwrap();
        assert_eq!(t.sets(), &[BitSet::singleton(0), BitSet::new()]);
        assert_eq!(hexagon().translate(&BitSet::new()).unwrap(), hexagon());
        let h = hexagon();
        let flipped = h.translate(&BitSet::full(3)).unwrap();
        let mut a: Vec<_> = flipped.sets().to_vec();
        let mut b: Vec<_> = h.sets().to_vec();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn normalize_reports_removed_elements() {
        let f = fam(&["a", "b", "z"], &[&["a"], &["a", "b"]]);
        let (g, rep) = f.normalize().unwrap();
        assert_eq!(rep.common, vec!["a".to_string()]);
        assert_eq!(rep.unused, vec!["z".to_string()]);
        assert_eq!(g.ground(), &["b".to_string()]);
        assert!(g.is_normalized());
        assert!(!f.is_normalized());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let text = r#"{"ground":["a","b"],"sets":[[],["a"]]}"#;
        let f = SetFamily::from_json_str(text).unwrap();
        assert_eq!(serde_json::to_string(&f.to_json()).unwrap(), text);
        assert!(SetFamily::from_json_str(r#"{"ground":["a"],"sets":[["q"]]}"#).is_err());
        assert!(SetFamily::from_json_str(r#"{"ground":["a"],"sets":[["a"],["a"]]}"#).is_err());
    }

    fn small_set() -> impl Strategy<Value = BitSet> {
        proptest::collection::vec(0usize..12, 0..8).prop_map(|v| v.into_iter().collect())
    }

    proptest! {
        #[test]
        fn betweenness_forms_agree(p in small_set(), r in small_set(), q in small_set()) {
            prop_assert_eq!(between(&p, &r, &q), between_metric(&p, &r, &q));
        }

        #[test]
        fn triangle_and_region_identity(si in small_set(), sj in small_set(), sk in small_set()) {
            let (dij, djk, dik) = (distance(&si, &sj), distance(&sj, &sk), distance(&si, &sk));
            prop_assert!(dik <= dij + djk);
            // Uj: in Sj only; Vj: in Si and Sk but not Sj.
            let uj = sj.difference(&si.union(&sk));
            let vj = si.intersection(&sk).difference(&sj);
            prop_assert_eq!(dij + djk, dik + 2 * (uj.len() + vj.len()));
        }

        #[test]
        fn translation_is_an_isometric_involution(
            sets in proptest::collection::btree_set(small_set(), 1..10),
            a in small_set(),
        ) {
            let ground: Vec<String> = (0..12).map(|i| format!("x{i}")).collect();
            let f = SetFamily::new(ground, sets.into_iter().collect()).unwrap();
            let g = f.translate(&a).unwrap();
            for (p, pp) in f.sets().iter().zip(g.sets()) {
                for (q, qq) in f.sets().iter().zip(g.sets()) {
                    prop_assert_eq!(distance(p, q), distance(pp, qq));
                }
            }
            prop_assert_eq!(g.translate(&a).unwrap(), f);
        }
    }
}
