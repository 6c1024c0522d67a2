//! Regions of finite line arrangements in the plane, in exact arithmetic.
//!
//! Line `k` (1-based in names) is `ℓ_k(x, y) = a·x + b·y + c`; its positive
//! side is `ℓ_k > 0`. A region is encoded by `J_P`, the set of lines having
//! it on their positive side.

use std::collections::{HashSet, VecDeque};
use std::str::FromStr;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{MediaError, Result};
use crate::pcube::LabeledGraph;
use crate::token_core::TokenSystem;
use crate::wg_sets::{display_set, SetFamily};

pub type Rational = BigRational;
pub type Point = (Rational, Rational);

/// A line with primitive integer coefficients, orientation preserved.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl Line {
    /// Scales `(a, b, c)` by a positive factor to coprime integers.
    pub fn new(a: &Rational, b: &Rational, c: &Rational) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(MediaError::invalid("line has a = b = 0"));
        }
        let den = a.denom().lcm(b.denom()).lcm(c.denom());
        let scale = |q: &Rational| (q * Rational::from_integer(den.clone())).to_integer();
        let (a, b, c) = (scale(a), scale(b), scale(c));
        let g = a.gcd(&b).gcd(&c);
        Ok(Self {
            a: a / &g,
            b: b / &g,
            c: c / &g,
        })
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Result<Self> {
        let q = |x: i64| Rational::from_integer(x.into());
        Self::new(&q(a), &q(b), &q(c))
    }

    pub fn eval(&self, p: &Point) -> Rational {
        let q = |x: &BigInt| Rational::from_integer(x.clone());
        q(&self.a) * &p.0 + q(&self.b) * &p.1 + q(&self.c)
    }

    fn negated(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
        }
    }

    /// Intersection point of two non-parallel lines.
    fn meet(&self, other: &Line) -> Option<Point> {
        let det = &self.a * &other.b - &self.b * &other.a;
        if det.is_zero() {
            return None;
        }
        let x = &self.b * &other.c - &self.c * &other.b;
        let y = &self.c * &other.a - &self.a * &other.c;
        let det = Rational::from_integer(det);
        Some((
            Rational::from_integer(x) / &det,
            Rational::from_integer(y) / det,
        ))
    }

    /// A point on the line and a direction vector.
    fn parametrize(&self) -> (Point, Point) {
        let q = |x: &BigInt| Rational::from_integer(x.clone());
        let p = if !self.b.is_zero() {
            (Rational::zero(), -q(&self.c) / q(&self.b))
        } else {
            (-q(&self.c) / q(&self.a), Rational::zero())
        };
        (p, (-q(&self.b), q(&self.a)))
    }

    /// The point of the line nearest the origin.
    fn foot(&self) -> Point {
        let q = |x: &BigInt| Rational::from_integer(x.clone());
        let n = q(&self.a) * q(&self.a) + q(&self.b) * q(&self.b);
        (-q(&self.a) * q(&self.c) / &n, -q(&self.b) * q(&self.c) / n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    lines: Vec<Line>,
}

impl Arrangement {
    /// Rejects empty arrangements and lines equal up to a non-zero factor.
    pub fn new(lines: Vec<Line>) -> Result<Self> {
        if lines.is_empty() {
            return Err(MediaError::invalid("arrangement has no lines"));
        }
        let mut seen: HashSet<&Line> = HashSet::new();
        let negs: Vec<Line> = lines.iter().map(Line::negated).collect();
        for (i, l) in lines.iter().enumerate() {
            if seen.contains(l) || seen.contains(&negs[i]) {
                return Err(MediaError::invalid(format!(
                    "line {} repeats an earlier line",
                    i + 1
                )));
            }
            seen.insert(l);
        }
        Ok(Self { lines })
    }

    pub fn from_ints(lines: &[(i64, i64, i64)]) -> Result<Self> {
        Self::new(
            lines
                .iter()
                .map(|&(a, b, c)| Line::from_ints(a, b, c))
                .collect::<Result<_>>()?,
        )
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn line_names(&self) -> Vec<String> {
        (1..=self.len()).map(|k| k.to_string()).collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: ArrangementJson = serde_json::from_str(text)?;
        let parse = |k: usize, field: &str, s: &str| {
            Rational::from_str(s.trim()).map_err(|_| {
                MediaError::Parse(format!("lines[{k}].{field}: `{s}` is not a rational"))
            })
        };
        let lines = raw
            .lines
            .iter()
            .enumerate()
            .map(|(k, l)| {
                Line::new(
                    &parse(k, "a", &l.a)?,
                    &parse(k, "b", &l.b)?,
                    &parse(k, "c", &l.c)?,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(lines)
    }

    pub fn to_json(&self) -> ArrangementJson {
        ArrangementJson {
            lines: self
                .lines
                .iter()
                .map(|l| LineJson {
                    a: l.a.to_string(),
                    b: l.b.to_string(),
                    c: l.c.to_string(),
                })
                .collect(),
        }
    }

    /// Sign vector of a point off every line, `true` for the positive side.
    pub fn signs_at(&self, p: &Point) -> Option<Vec<bool>> {
        self.lines
            .iter()
            .map(|l| {
                let v = l.eval(p);
                (!v.is_zero()).then(|| v.is_positive())
            })
            .collect()
    }

    /// Whether line `k` carries a facet of the cell with sign vector `signs`:
    /// the points of line `k` strictly on the prescribed side of every other
    /// line form a non-degenerate interval.
    pub fn has_facet(&self, signs: &[bool], k: usize) -> bool {
        let (p, d) = self.lines[k].parametrize();
        let mut lo: Option<Rational> = None;
        let mut hi: Option<Rational> = None;
        for (j, l) in self.lines.iter().enumerate() {
            if j == k {
                continue;
            }
            // ℓ_j(p + t·d) = alpha + beta·t
            let alpha = l.eval(&p);
            let beta = Rational::from_integer(l.a.clone()) * &d.0
                + Rational::from_integer(l.b.clone()) * &d.1;
            let want = if signs[j] {
                Rational::one()
            } else {
                -Rational::one()
            };
            if beta.is_zero() {
                if (alpha * want).is_positive() {
                    continue;
                }
                return false;
            }
            let root = -alpha / &beta;
            if (beta * want).is_positive() {
                if lo.as_ref().is_none_or(|x| root > *x) {
                    lo = Some(root);
                }
            } else if hi.as_ref().is_none_or(|x| root < *x) {
                hi = Some(root);
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) => l < h,
            _ => true,
        }
    }

    /// Half-width of a square centred at the origin containing every
    /// pairwise intersection and the foot of every line, with margin 1.
    fn box_radius(&self) -> Rational {
        let mut m = Rational::zero();
        let mut grow = |p: &Point| {
            for c in [&p.0, &p.1] {
                if c.abs() > m {
                    m = c.abs();
                }
            }
        };
        for (i, l) in self.lines.iter().enumerate() {
            grow(&l.foot());
            for other in &self.lines[i + 1..] {
                if let Some(p) = l.meet(other) {
                    grow(&p);
                }
            }
        }
        m + Rational::one()
    }

    /// The closed cell of `signs` cut to the bounding square.
    fn clip(&self, signs: &[bool], r: &Rational) -> Vec<Point> {
        let mut poly: Vec<Point> = vec![
            (-r.clone(), -r.clone()),
            (r.clone(), -r.clone()),
            (r.clone(), r.clone()),
            (-r.clone(), r.clone()),
        ];
        for (l, &s) in self.lines.iter().zip(signs) {
            let val = |p: &Point| if s { l.eval(p) } else { -l.eval(p) };
            let mut out = Vec::with_capacity(poly.len() + 1);
            for i in 0..poly.len() {
                let (p, q) = (&poly[i], &poly[(i + 1) % poly.len()]);
                let (vp, vq) = (val(p), val(q));
                if !vp.is_negative() {
                    out.push(p.clone());
                }
                if (vp.is_positive() && vq.is_negative()) || (vp.is_negative() && vq.is_positive())
                {
                    let t = &vp / (&vp - &vq);
                    out.push((&p.0 + (&q.0 - &p.0) * &t, &p.1 + (&q.1 - &p.1) * &t));
                }
            }
            out.dedup();
            if out.len() > 1 && out.first() == out.last() {
                out.pop();
            }
            poly = out;
            if poly.len() < 3 {
                return Vec::new();
            }
        }
        poly
    }

    /// An interior point of the cell, if the cell is non-empty.
    fn interior_point(&self, signs: &[bool], r: &Rational) -> Option<Point> {
        let poly = self.clip(signs, r);
        if poly.len() < 3 || twice_area(&poly).is_zero() {
            return None;
        }
        let n = Rational::from_integer(poly.len().into());
        let sx = poly.iter().fold(Rational::zero(), |acc, p| acc + &p.0);
        let sy = poly.iter().fold(Rational::zero(), |acc, p| acc + &p.1);
        Some((sx / &n, sy / n))
    }
}

fn twice_area(poly: &[Point]) -> Rational {
    let mut s = Rational::zero();
    for i in 0..poly.len() {
        let (p, q) = (&poly[i], &poly[(i + 1) % poly.len()]);
        s += &p.0 * &q.1 - &q.0 * &p.1;
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineJson {
    pub a: String,
    pub b: String,
    pub c: String,
}

/// On-disk form: coefficients as decimal integers or `p/q` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrangementJson {
    pub lines: Vec<LineJson>,
}

/// A full-dimensional cell with a strict interior point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub signs: Vec<bool>,
    pub witness: Point,
}

impl Region {
    /// `J_P`, zero-based.
    pub fn positive_set(&self) -> BitSet {
        (0..self.signs.len()).filter(|&k| self.signs[k]).collect()
    }

    /// `J_P` with 1-based line ids, e.g. `{1,3}`.
    pub fn name(&self) -> String {
        let names: Vec<String> = (1..=self.signs.len()).map(|k| k.to_string()).collect();
        display_set(&names, &self.positive_set())
    }

    pub fn sign_string(&self) -> String {
        self.signs
            .iter()
            .map(|&s| if s { '+' } else { '-' })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionJson {
    pub id: String,
    pub signs: String,
    pub witness: (String, String),
}

pub fn regions_json(regions: &[Region]) -> Vec<RegionJson> {
    regions
        .iter()
        .map(|r| RegionJson {
            id: r.name(),
            signs: r.sign_string(),
            witness: (r.witness.0.to_string(), r.witness.1.to_string()),
        })
        .collect()
}

/// All regions, ordered by `J_P` (size first). Regions are found by
/// crossing facets from a seed cell; each gets an interior point as the
/// vertex average of the cell cut to a square holding every vertex of the
/// arrangement.
pub fn enumerate_regions(arr: &Arrangement) -> Result<Vec<Region>> {
    // A line meets the parabola y = x² + 1/7 at most twice.
    let seed = (0i64..)
        .map(|t| {
            let t = Rational::from_integer(t.into());
            let y = &t * &t + Rational::new(1.into(), 7.into());
            (t, y)
        })
        .find_map(|p| arr.signs_at(&p))
        .expect("finitely many lines miss some parabola point");
    let mut seen: HashSet<Vec<bool>> = HashSet::from([seed.clone()]);
    let mut queue = VecDeque::from([seed]);
    let mut cells = Vec::new();
    while let Some(signs) = queue.pop_front() {
        for k in 0..arr.len() {
            if arr.has_facet(&signs, k) {
                let mut next = signs.clone();
                next[k] = !next[k];
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        cells.push(signs);
    }
    let r = arr.box_radius();
    let mut regions = cells
        .into_iter()
        .map(|signs| {
            let witness = arr.interior_point(&signs, &r).ok_or_else(|| {
                MediaError::Defect("a cell reached by facet crossing has no interior".into())
            })?;
            if arr.signs_at(&witness).as_deref() != Some(&signs[..]) {
                return Err(MediaError::Defect("interior point misses its cell".into()));
            }
            Ok(Region { signs, witness })
        })
        .collect::<Result<Vec<_>>>()?;
    regions.sort_by_cached_key(Region::positive_set);
    Ok(regions)
}

/// Number of non-empty cells among all `2^n` sign vectors, decided by
/// clipping each cell to the bounding square.
pub fn count_regions_brute_force(arr: &Arrangement) -> Result<usize> {
    let n = arr.len();
    if n > 20 {
        return Err(MediaError::CapExceeded {
            what: "brute-force line count",
            limit: 20,
            actual: n,
        });
    }
    let r = arr.box_radius();
    Ok((0u32..1 << n)
        .filter(|mask| {
            let signs: Vec<bool> = (0..n).map(|k| mask >> k & 1 == 1).collect();
            arr.interior_point(&signs, &r).is_some()
        })
        .count())
}

fn flip_target(regions: &[Region]) -> impl Fn(&[bool], usize) -> Option<usize> + '_ {
    let index: std::collections::HashMap<&[bool], usize> = regions
        .iter()
        .enumerate()
        .map(|(i, r)| (&r.signs[..], i))
        .collect();
    move |signs: &[bool], k: usize| {
        let mut next = signs.to_vec();
        next[k] = !next[k];
        index.get(&next[..]).copied()
    }
}

/// Regions sharing a facet are adjacent; the edge is labelled by the token
/// crossing it from the lower-indexed region and its reverse.
pub fn region_adjacency(arr: &Arrangement, regions: &[Region]) -> Result<LabeledGraph> {
    let target = flip_target(regions);
    let mut edges = Vec::new();
    for (i, r) in regions.iter().enumerate() {
        for k in 0..arr.len() {
            if arr.has_facet(&r.signs, k) {
                match target(&r.signs, k) {
                    Some(j) if j > i => edges.push((i, j, k)),
                    Some(_) => {}
                    None => {
                        return Err(MediaError::Defect(
                            "facet leads outside the region list".into(),
                        ))
                    }
                }
            }
        }
    }
    edges.sort();
    let names = regions.iter().map(Region::name).collect();
    let mut g = LabeledGraph::new(names, edges.iter().map(|&(i, j, _)| (i, j)))?;
    g.edge_labels = Some(
        edges
            .iter()
            .map(|&(i, _, k)| {
                let (fwd, back) = if regions[i].signs[k] {
                    ('-', '+')
                } else {
                    ('+', '-')
                };
                (format!("{fwd}{}", k + 1), format!("{back}{}", k + 1))
            })
            .collect(),
    );
    g.labels = Some(crate::pcube::VertexLabels {
        ground: arr.line_names(),
        sets: regions.iter().map(Region::positive_set).collect(),
    });
    Ok(g)
}

/// `{J_P}` over the ground set of line ids.
pub fn region_family(arr: &Arrangement, regions: &[Region]) -> Result<SetFamily> {
    SetFamily::new(
        arr.line_names(),
        regions.iter().map(Region::positive_set).collect(),
    )
}

/// Tokens `+k`, `-k` move a region across line `k` to the positive or
/// negative side when line `k` carries one of its facets; otherwise they fix it.
pub fn arrangement_medium(arr: &Arrangement, regions: &[Region]) -> Result<TokenSystem> {
    let target = flip_target(regions);
    let mut tokens = Vec::new();
    let mut action = Vec::new();
    let mut reverse = Vec::new();
    for k in 0..arr.len() {
        for to_positive in [true, false] {
            tokens.push(format!("{}{}", if to_positive { '+' } else { '-' }, k + 1));
            action.push(
                regions
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        if r.signs[k] != to_positive && arr.has_facet(&r.signs, k) {
                            target(&r.signs, k).unwrap_or(i)
                        } else {
                            i
                        }
                    })
                    .collect(),
            );
            let t = reverse.len();
            reverse.push(Some(if to_positive { t + 1 } else { t - 1 }));
        }
    }
    TokenSystem::new(
        regions.iter().map(Region::name).collect(),
        tokens,
        action,
        reverse,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MosaicKind {
    /// Three pencils `x = i`, `y = j`, `x + y = k`: an affine image of the
    /// equilateral triangle tiling, whose region graph is the hexagonal lattice.
    Triangular,
    /// Four pencils `x = i`, `y = j`, `x + y = k`, `x - y = k`, whose region
    /// graph is the 1-skeleton of the (4.8²) tiling.
    TruncatedSquare,
}

impl FromStr for MosaicKind {
    type Err = MediaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triangular" => Ok(Self::Triangular),
            "truncated-square" => Ok(Self::TruncatedSquare),
            other => Err(MediaError::invalid(format!(
                "unknown mosaic `{other}` (expected triangular or truncated-square)"
            ))),
        }
    }
}

/// The lines of the mosaic within Euclidean distance `radius` of the origin.
pub fn mosaic_window(kind: MosaicKind, radius: u32) -> Result<Arrangement> {
    if radius < 1 {
        return Err(MediaError::invalid("mosaic radius must be at least 1"));
    }
    let r = i64::from(radius);
    let mut lines = Vec::new();
    for i in -r..=r {
        lines.push((1, 0, -i));
    }
    for j in -r..=r {
        lines.push((0, 1, -j));
    }
    // |k| / √2 ≤ r
    let diag: Vec<i64> = (-2 * r..=2 * r).filter(|k| k * k <= 2 * r * r).collect();
    for &k in &diag {
        lines.push((1, 1, -k));
    }
    if kind == MosaicKind::TruncatedSquare {
        for &k in &diag {
            lines.push((1, -1, -k));
        }
    }
    Arrangement::from_ints(&lines)
}

/// Lossy coordinates for display only.
pub fn approx(p: &Point) -> (f64, f64) {
    (
        p.0.to_f64().unwrap_or(f64::NAN),
        p.1.to_f64().unwrap_or(f64::NAN),
    )
}
