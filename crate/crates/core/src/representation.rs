//! Contents, orientations, set-family representations of media, and the
//! exact decision whether a token system is a medium.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{MediaError, Result};
use crate::pcube::{
    is_partial_cube, media_isomorphic, medium_graph, LabeledGraph, NotPartialCube, PartialCube,
    DEFAULT_ISO_CAP,
};
use crate::token_core::{check_m1, TokenSystem, Verdict, Witness};
use crate::wg_sets::SetFamily;

/// Image of a token under `β`: adding or removing one ground element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TokenImage {
    pub element: usize,
    pub add: bool,
}

/// A token system verified to be a medium, with a set representation.
///
/// `family` lists one set per state, in state order, so `α` is the identity
/// on indices; `beta[t]` is the coordinate action of token `t`.
#[derive(Clone, Debug)]
pub struct Medium {
    system: TokenSystem,
    graph: LabeledGraph,
    family: SetFamily,
    beta: Vec<TokenImage>,
}

impl Medium {
    pub fn system(&self) -> &TokenSystem {
        &self.system
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn family(&self) -> &SetFamily {
        &self.family
    }

    pub fn beta(&self) -> &[TokenImage] {
        &self.beta
    }

    pub fn to_json(&self) -> RepresentationJson {
        representation_json(&self.system, &self.family, &self.beta)
    }
}

/// Why a token system is not a medium.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NotMedium {
    Axiom {
        axiom: String,
        witness: Witness,
    },
    Graph {
        witness: NotPartialCube,
    },
    /// `state·token` differs from the move its coordinate dictates.
    Token {
        token: String,
        state: String,
        expected: String,
        actual: String,
        reason: String,
    },
}

#[derive(Clone, Debug)]
pub enum MediumDecision {
    Medium(Box<Medium>),
    NotMedium(NotMedium),
}

impl MediumDecision {
    pub fn is_medium(&self) -> bool {
        matches!(self, MediumDecision::Medium(_))
    }

    pub fn medium(self) -> Option<Medium> {
        match self {
            MediumDecision::Medium(m) => Some(*m),
            MediumDecision::NotMedium(_) => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            MediumDecision::Medium(m) => {
                let mut v = serde_json::to_value(m.to_json()).expect("plain data serializes");
                v["verdict"] = "medium".into();
                v
            }
            MediumDecision::NotMedium(w) => serde_json::json!({
                "verdict": "not-medium",
                "witness": w,
            }),
        }
    }
}

/// Decides exactly whether `ts` is a medium: every token must have a unique
/// declared reverse, the graph must be a partial cube, and every token must
/// act on every state exactly as adding or removing one coordinate does,
/// fixed points included.
///
/// On success the canonical representation labels the least-named state by
/// `∅` and names each coordinate after the token that adds it.
pub fn decide_medium(ts: &TokenSystem) -> MediumDecision {
    let m1 = check_m1(ts);
    if m1.verdict == Verdict::Fails {
        return MediumDecision::NotMedium(NotMedium::Axiom {
            axiom: "M1".into(),
            witness: m1.witness.expect("failures carry witnesses"),
        });
    }
    let graph = medium_graph(ts);
    let reach = graph.bfs(0);
    if let Some(v) = reach.iter().position(|&d| d == u32::MAX) {
        return MediumDecision::NotMedium(NotMedium::Axiom {
            axiom: "M2".into(),
            witness: Witness::Unreachable {
                from: ts.state_name(0).to_string(),
                to: ts.state_name(v).to_string(),
            },
        });
    }
    let labeling = match is_partial_cube(&graph).expect("graph is connected and non-empty") {
        PartialCube::Accept(l) => l,
        PartialCube::Reject(witness) => {
            return MediumDecision::NotMedium(NotMedium::Graph { witness })
        }
    };
    let sets = labeling.labels.sets;
    let dims = labeling.classes.len();
    let index: std::collections::HashMap<&BitSet, usize> =
        sets.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut beta = Vec::with_capacity(ts.n_tokens());
    for t in 0..ts.n_tokens() {
        let mut image: Option<TokenImage> = None;
        for s in 0..ts.n_states() {
            let v = ts.act(t, s);
            if v == s {
                continue;
            }
            let diff = sets[s].symmetric_difference(&sets[v]);
            let element = diff.iter().next().expect("adjacent labels differ");
            let here = TokenImage {
                element,
                add: !sets[s].contains(element),
            };
            match image {
                None => image = Some(here),
                Some(prev) if prev == here => {}
                Some(_) => {
                    return MediumDecision::NotMedium(NotMedium::Token {
                        token: ts.token_name(t).to_string(),
                        state: ts.state_name(s).to_string(),
                        expected: String::new(),
                        actual: ts.state_name(v).to_string(),
                        reason: "token moves along two different coordinates or directions".into(),
                    })
                }
            }
        }
        let image = image.expect("tokens are not the identity");
        for s in 0..ts.n_states() {
            let toggled = sets[s].with_toggled(image.element);
            let expected = if sets[s].contains(image.element) != image.add {
                index.get(&toggled).copied().unwrap_or(s)
            } else {
                s
            };
            let actual = ts.act(t, s);
            if actual != expected {
                return MediumDecision::NotMedium(NotMedium::Token {
                    token: ts.token_name(t).to_string(),
                    state: ts.state_name(s).to_string(),
                    expected: ts.state_name(expected).to_string(),
                    actual: ts.state_name(actual).to_string(),
                    reason: "action differs from the coordinate move".into(),
                });
            }
        }
        beta.push(image);
    }
    let mut owner: Vec<[Option<usize>; 2]> = vec![[None, None]; dims];
    for (t, b) in beta.iter().enumerate() {
        let slot = &mut owner[b.element][b.add as usize];
        if slot.replace(t).is_some() {
            return MediumDecision::NotMedium(NotMedium::Token {
                token: ts.token_name(t).to_string(),
                state: String::new(),
                expected: String::new(),
                actual: String::new(),
                reason: "two tokens share one coordinate move".into(),
            });
        }
    }
    let mut ground = Vec::with_capacity(dims);
    for pair in &owner {
        match pair {
            [Some(_), Some(add)] => ground.push(ts.token_name(*add).to_string()),
            _ => {
                return MediumDecision::NotMedium(NotMedium::Token {
                    token: String::new(),
                    state: String::new(),
                    expected: String::new(),
                    actual: String::new(),
                    reason: "a coordinate lacks an adding or a removing token".into(),
                })
            }
        }
    }
    let family = SetFamily::new(ground, sets).expect("isometric labels are distinct");
    let mut graph = graph;
    graph.labels = Some(crate::pcube::VertexLabels {
        ground: family.ground().to_vec(),
        sets: family.sets().to_vec(),
    });
    MediumDecision::Medium(Box::new(Medium {
        system: ts.clone(),
        graph,
        family,
        beta,
    }))
}

/// A partition of the tokens closed under reversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub positive: BitSet,
    pub negative: BitSet,
}

/// The content `Ŝ` of every state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContentTable {
    pub contents: Vec<BitSet>,
}

impl ContentTable {
    pub fn positive(&self, s: usize, o: &Orientation) -> BitSet {
        self.contents[s].intersection(&o.positive)
    }

    pub fn negative(&self, s: usize, o: &Orientation) -> BitSet {
        self.contents[s].intersection(&o.negative)
    }
}

/// Contents from a single base state: along a breadth-first tree the path
/// messages are straight, `V̂ \ Ŝ₀` is the content of the path to `V`, and
/// the rest of `V̂` follows since each state holds one token of every pair.
pub fn contents(m: &Medium) -> ContentTable {
    contents_from(m, 0)
}

fn contents_from(m: &Medium, base: usize) -> ContentTable {
    let ts = &m.system;
    let n = ts.n_states();
    let mut path: Vec<Option<BitSet>> = vec![None; n];
    path[base] = Some(BitSet::new());
    let mut queue = VecDeque::from([base]);
    while let Some(s) = queue.pop_front() {
        for t in 0..ts.n_tokens() {
            let v = ts.act(t, s);
            if path[v].is_none() {
                let mut c = path[s].clone().unwrap();
                c.insert(t);
                path[v] = Some(c);
                queue.push_back(v);
            }
        }
    }
    let path: Vec<BitSet> = path
        .into_iter()
        .map(|p| p.expect("media are connected"))
        .collect();
    let rev = |c: &BitSet| c.map(|t| ts.reverse(t).expect("media have complete pairings"));
    let away = path.iter().fold(BitSet::new(), |acc, c| acc.union(c));
    let base_content = rev(&away);
    let contents = path
        .iter()
        .map(|c| base_content.difference(&rev(c)).union(c))
        .collect();
    ContentTable { contents }
}

/// The orientation with `T⁻ = Ŝ₀`.
pub fn orient_from_state(m: &Medium, s0: usize) -> Result<Orientation> {
    let ts = &m.system;
    if s0 >= ts.n_states() {
        return Err(MediaError::UnknownState(format!("#{s0}")));
    }
    let negative = contents_from(m, s0).contents[s0].clone();
    let positive = BitSet::full(ts.n_tokens()).difference(&negative);
    Ok(Orientation { positive, negative })
}

/// A family `{Ŝ⁺}` over the positive tokens with the bijections `α`, `β`.
#[derive(Clone, Debug)]
pub struct Representation {
    pub family: SetFamily,
    /// `alpha[s]` is the index in `family` of the image of state `s`.
    pub alpha: Vec<usize>,
    pub beta: Vec<TokenImage>,
}

impl Representation {
    pub fn to_json(&self, ts: &TokenSystem) -> RepresentationJson {
        let family = SetFamily::new(
            self.family.ground().to_vec(),
            self.alpha
                .iter()
                .map(|&i| self.family.sets()[i].clone())
                .collect(),
        )
        .expect("alpha is a bijection");
        representation_json(ts, &family, &self.beta)
    }
}

/// Builds `F = {Ŝ⁺}` and checks `Sτ = T ⇔ α(S)β(τ) = α(T)` on every state
/// and token.
pub fn positive_content_family(m: &Medium, o: &Orientation) -> Result<Representation> {
    let ts = &m.system;
    let n_tokens = ts.n_tokens();
    if o.positive.union(&o.negative) != BitSet::full(n_tokens)
        || !o.positive.is_disjoint(&o.negative)
    {
        return Err(MediaError::invalid(
            "orientation does not partition the tokens",
        ));
    }
    for t in o.positive.iter() {
        if !o
            .negative
            .contains(ts.reverse(t).expect("media have complete pairings"))
        {
            return Err(MediaError::invalid("orientation separates no reverse pair"));
        }
    }
    let positives: Vec<usize> = o.positive.iter().collect();
    let mut element = vec![usize::MAX; n_tokens];
    for (i, &t) in positives.iter().enumerate() {
        element[t] = i;
    }
    let table = contents(m);
    let sets: Vec<BitSet> = (0..ts.n_states())
        .map(|s| table.positive(s, o).map(|t| element[t]))
        .collect();
    let ground = positives
        .iter()
        .map(|&t| ts.token_name(t).to_string())
        .collect();
    let family = SetFamily::new(ground, sets)?;
    let beta: Vec<TokenImage> = (0..n_tokens)
        .map(|t| match element[t] {
            usize::MAX => TokenImage {
                element: element[ts.reverse(t).unwrap()],
                add: false,
            },
            e => TokenImage {
                element: e,
                add: true,
            },
        })
        .collect();
    for (t, b) in beta.iter().enumerate() {
        for s in 0..ts.n_states() {
            let set = &family.sets()[s];
            let moved = if set.contains(b.element) != b.add {
                family.index_of(&set.with_toggled(b.element)).unwrap_or(s)
            } else {
                s
            };
            if moved != ts.act(t, s) {
                return Err(MediaError::Defect(format!(
                    "positive contents do not represent token `{}` at state `{}`",
                    ts.token_name(t),
                    ts.state_name(s)
                )));
            }
        }
    }
    Ok(Representation {
        alpha: (0..ts.n_states()).collect(),
        family,
        beta,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaEntry {
    pub element: String,
    pub polarity: &'static str,
}

/// JSON form of a representation: the family schema plus `α` and `β` tables.
#[derive(Clone, Debug, Serialize)]
pub struct RepresentationJson {
    pub ground: Vec<String>,
    pub sets: Vec<Vec<String>>,
    pub alpha: BTreeMap<String, Vec<String>>,
    pub beta: BTreeMap<String, BetaEntry>,
}

fn representation_json(
    ts: &TokenSystem,
    family: &SetFamily,
    beta: &[TokenImage],
) -> RepresentationJson {
    RepresentationJson {
        ground: family.ground().to_vec(),
        sets: family
            .sets()
            .iter()
            .map(|s| family.element_names(s))
            .collect(),
        alpha: (0..ts.n_states())
            .map(|s| {
                (
                    ts.state_name(s).to_string(),
                    family.element_names(&family.sets()[s]),
                )
            })
            .collect(),
        beta: beta
            .iter()
            .enumerate()
            .map(|(t, b)| {
                (
                    ts.token_name(t).to_string(),
                    BetaEntry {
                        element: family.ground()[b.element].clone(),
                        polarity: if b.add { "add" } else { "remove" },
                    },
                )
            })
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingCheck {
    /// `Sτ = T ⇔ α(S)β(τ) = α(T)` for all `S, T, τ`.
    pub embedding: bool,
    /// The reduction of the target to `α(S)` is isomorphic to the source.
    pub reduction_isomorphic: bool,
}

/// Checks whether injective maps `α`, `β` embed `ts1` into `ts2`.
pub fn verify_embedding(
    ts1: &TokenSystem,
    ts2: &TokenSystem,
    alpha: &[usize],
    beta: &[usize],
) -> Result<EmbeddingCheck> {
    let injective = |map: &[usize], len: usize, range: usize| {
        let mut hit = vec![false; range];
        map.len() == len
            && map
                .iter()
                .all(|&x| x < range && !std::mem::replace(&mut hit[x], true))
    };
    if !injective(alpha, ts1.n_states(), ts2.n_states()) {
        return Err(MediaError::invalid("state map is not a total injection"));
    }
    if !injective(beta, ts1.n_tokens(), ts2.n_tokens()) {
        return Err(MediaError::invalid("token map is not a total injection"));
    }
    let embedding = (0..ts1.n_tokens())
        .all(|t| (0..ts1.n_states()).all(|s| alpha[ts1.act(t, s)] == ts2.act(beta[t], alpha[s])));
    let red = ts2.reduce_with_map(alpha)?;
    let position = |x: usize| {
        red.states
            .binary_search(&x)
            .expect("image state is in the reduction")
    };
    let induced = red.system.n_tokens() == ts1.n_tokens()
        && beta.iter().all(|&u| red.token_map[u].is_some())
        && {
            let b: Vec<usize> = beta.iter().map(|&u| red.token_map[u].unwrap()).collect();
            let mut seen = vec![false; red.system.n_tokens()];
            b.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
                && (0..ts1.n_tokens()).all(|t| {
                    (0..ts1.n_states()).all(|s| {
                        position(alpha[ts1.act(t, s)]) == red.system.act(b[t], position(alpha[s]))
                    })
                })
        };
    let reduction_isomorphic = induced
        || (ts1.n_states() <= DEFAULT_ISO_CAP && media_isomorphic(ts1, &red.system)?.is_some());
    Ok(EmbeddingCheck {
        embedding,
        reduction_isomorphic,
    })
}
