//! Ordinals below `ω²`, the rank `Ord M` of a finite set system, and a
//! windowed surrogate for membership of `σ` in `A(X, d)`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::families::PointFamily;
use crate::par;
use crate::space::{padded_max_dist, window_points, Limits, Point, Window};

/// `ω·q + r`, or the marker `∞` above every ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordinal {
    Value { q: u64, r: u64 },
    Infinite,
}

impl Ordinal {
    pub const ZERO: Ordinal = Ordinal::Value { q: 0, r: 0 };

    pub fn finite(r: u64) -> Self {
        Ordinal::Value { q: 0, r }
    }

    pub fn omega_plus(r: u64) -> Self {
        Ordinal::Value { q: 1, r }
    }

    /// Limit part `ω·q`.
    pub fn limit_part(&self) -> Option<Ordinal> {
        match *self {
            Ordinal::Value { q, .. } => Some(Ordinal::Value { q, r: 0 }),
            Ordinal::Infinite => None,
        }
    }

    /// Finite part `r`.
    pub fn finite_part(&self) -> Option<u64> {
        match *self {
            Ordinal::Value { r, .. } => Some(r),
            Ordinal::Infinite => None,
        }
    }

    pub fn successor(&self) -> Ordinal {
        match *self {
            Ordinal::Value { q, r } => Ordinal::Value { q, r: r + 1 },
            Ordinal::Infinite => Ordinal::Infinite,
        }
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ordinal::Infinite, Ordinal::Infinite) => Ordering::Equal,
            (Ordinal::Infinite, _) => Ordering::Greater,
            (_, Ordinal::Infinite) => Ordering::Less,
            (Ordinal::Value { q: a, r: b }, Ordinal::Value { q: c, r: d }) => (a, b).cmp(&(c, d)),
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Ordinal::Infinite => write!(f, "inf"),
            Ordinal::Value { q: 0, r } => write!(f, "{r}"),
            Ordinal::Value { q, r } => {
                if q == 1 {
                    write!(f, "w")?;
                } else {
                    write!(f, "w*{q}")?;
                }
                if r > 0 {
                    write!(f, "+{r}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum OrdinalRepr {
    Value { q: u64, r: u64 },
    Infinite { inf: bool },
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Ordinal::Value { q, r } => OrdinalRepr::Value { q, r },
            Ordinal::Infinite => OrdinalRepr::Infinite { inf: true },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match OrdinalRepr::deserialize(d)? {
            OrdinalRepr::Value { q, r } => Ok(Ordinal::Value { q, r }),
            OrdinalRepr::Infinite { inf: true } => Ok(Ordinal::Infinite),
            OrdinalRepr::Infinite { inf: false } => Err(serde::de::Error::custom("\"inf\" must be true")),
        }
    }
}

/// A finite collection of distinct finite nonempty subsets of `ℕ`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct SetSystem {
    members: BTreeSet<BTreeSet<u32>>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    members: Vec<Vec<u32>>,
}

impl TryFrom<RawSystem> for SetSystem {
    type Error = Error;

    fn try_from(raw: RawSystem) -> Result<Self> {
        let mut members = BTreeSet::new();
        for (i, m) in raw.members.into_iter().enumerate() {
            let set: BTreeSet<u32> = m.iter().copied().collect();
            if set.len() != m.len() {
                return Err(Error::InvalidInput(format!("member {i} repeats an element")));
            }
            if set.is_empty() {
                return Err(Error::InvalidInput(format!("member {i} is empty")));
            }
            if !members.insert(set) {
                return Err(Error::InvalidInput(format!("member {i} appears twice")));
            }
        }
        Ok(SetSystem { members })
    }
}

impl From<SetSystem> for RawSystem {
    fn from(s: SetSystem) -> Self {
        RawSystem {
            members: s.members.into_iter().map(|m| m.into_iter().collect()).collect(),
        }
    }
}

impl SetSystem {
    pub fn empty() -> Self {
        SetSystem::default()
    }

    /// Drops empty sets; duplicates collapse.
    pub fn new<I, S>(members: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = u32>,
    {
        SetSystem {
            members: members
                .into_iter()
                .map(|m| m.into_iter().collect::<BTreeSet<u32>>())
                .filter(|m| !m.is_empty())
                .collect(),
        }
    }

    /// All nonempty subsets of `{1, …, m}`.
    pub fn powerset(m: u32) -> Self {
        SetSystem::new((1u64..1 << m).map(|mask| (1..=m).filter(move |&e| mask >> (e - 1) & 1 == 1)))
    }

    pub fn members(&self) -> &BTreeSet<BTreeSet<u32>> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &SetSystem) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Elements appearing in some member.
    pub fn support(&self) -> BTreeSet<u32> {
        self.members.iter().flatten().copied().collect()
    }
}

/// `M^σ`: the nonempty `τ` disjoint from `σ` with `τ ∪ σ ∈ M`.
pub fn restrict(m: &SetSystem, sigma: &BTreeSet<u32>) -> SetSystem {
    SetSystem {
        members: m
            .members
            .iter()
            .filter(|s| s.is_superset(sigma))
            .map(|s| s.difference(sigma).copied().collect::<BTreeSet<u32>>())
            .filter(|t| !t.is_empty())
            .collect(),
    }
}

/// `Ord M`: zero for the empty system, otherwise one more than the largest
/// `Ord M^{a}` over elements `a` of the support.
pub fn ord_of(m: &SetSystem) -> Ordinal {
    Ordinal::finite(rank(m))
}

fn rank(m: &SetSystem) -> u64 {
    if m.is_empty() {
        return 0;
    }
    let support: Vec<u32> = m.support().into_iter().collect();
    let below = par::map(&support, |&a| rank(&restrict(m, &BTreeSet::from([a]))));
    below.into_iter().max().unwrap_or(0) + 1
}

/// Default cap on window points for [`a_set_member`].
pub const DEFAULT_SEARCH_CAP: usize = 64;

/// Is there no cover of the window by families `𝒰ᵢ`, `i ∈ σ`, with `𝒰ᵢ`
/// `i`-disjoint and every member of diameter at most `bound`?
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawQuery")]
pub struct ASetQuery {
    pub sigma: BTreeSet<u32>,
    pub window: Window,
    pub bound: u64,
}

#[derive(Deserialize)]
struct RawQuery {
    sigma: Vec<u32>,
    window: Window,
    bound: u64,
}

impl TryFrom<RawQuery> for ASetQuery {
    type Error = Error;

    fn try_from(raw: RawQuery) -> Result<Self> {
        ASetQuery::new(raw.sigma, raw.window, raw.bound)
    }
}

impl ASetQuery {
    pub fn new(sigma: impl IntoIterator<Item = u32>, window: Window, bound: u64) -> Result<Self> {
        let sigma: BTreeSet<u32> = sigma.into_iter().collect();
        if sigma.is_empty() {
            return Err(Error::Parameter("sigma must be nonempty".into()));
        }
        if sigma.contains(&0) {
            return Err(Error::Parameter("sigma elements must be at least 1".into()));
        }
        if bound == 0 {
            return Err(Error::Parameter("bound must be positive".into()));
        }
        Ok(ASetQuery { sigma, window, bound })
    }
}

/// Blocks of one family: the classes of points chained by steps shorter
/// than `disjointness`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverFamily {
    pub disjointness: u32,
    pub blocks: Vec<Vec<Point>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ASetVerdict {
    pub member: bool,
    /// The cover found when `member` is false.
    pub witness: Option<Vec<CoverFamily>>,
}

impl CoverFamily {
    pub fn to_point_family(&self, level: usize) -> PointFamily {
        PointFamily {
            level,
            label: format!("U{}", self.disjointness),
            members: self
                .blocks
                .iter()
                .map(|b| b.iter().map(|p| p.coords().to_vec()).collect())
                .collect(),
            refs: Vec::new(),
        }
    }
}

#[derive(Clone)]
struct Block {
    points: Vec<usize>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl Block {
    fn diameter(&self) -> u64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| a.abs_diff(*b)).max().unwrap_or(0)
    }
}

struct Search<'a> {
    points: &'a [Point],
    labels: Vec<u32>,
    bound: u64,
}

impl Search<'_> {
    /// Adds point `p` to a family, merging every block it comes within
    /// `r` of. Fails when the merged block is wider than the bound.
    fn place(&self, blocks: &[Block], p: usize, r: u32) -> Option<Vec<Block>> {
        let c = self.points[p].coords();
        let mut merged = Block {
            points: vec![p],
            lo: c.to_vec(),
            hi: c.to_vec(),
        };
        let mut rest = Vec::with_capacity(blocks.len());
        for b in blocks {
            let close = b
                .points
                .iter()
                .any(|&q| padded_max_dist(self.points[q].coords(), c) < u64::from(r));
            if close {
                merged.points.extend(&b.points);
                for (i, (lo, hi)) in b.lo.iter().zip(&b.hi).enumerate() {
                    merged.lo[i] = merged.lo[i].min(*lo);
                    merged.hi[i] = merged.hi[i].max(*hi);
                }
            } else {
                rest.push(b.clone());
            }
        }
        if merged.diameter() > self.bound {
            return None;
        }
        rest.push(merged);
        Some(rest)
    }

    fn run(&self, p: usize, state: &mut Vec<Vec<Block>>) -> bool {
        if p == self.points.len() {
            return true;
        }
        for (f, &r) in self.labels.iter().enumerate() {
            let Some(next) = self.place(&state[f], p, r) else { continue };
            let prev = std::mem::replace(&mut state[f], next);
            if self.run(p + 1, state) {
                return true;
            }
            state[f] = prev;
        }
        false
    }
}

/// Exhaustive search over assignments of window points to the labels of
/// `σ`, points in lexicographic order and labels in increasing order.
pub fn a_set_member(q: &ASetQuery, cap: usize) -> Result<ASetVerdict> {
    let points = window_points(&q.window, &Limits::uniform(cap as u64))?;
    let search = Search {
        points: &points,
        labels: q.sigma.iter().copied().collect(),
        bound: q.bound,
    };
    let mut state = vec![Vec::new(); search.labels.len()];
    if !search.run(0, &mut state) {
        return Ok(ASetVerdict {
            member: true,
            witness: None,
        });
    }
    let families = search
        .labels
        .iter()
        .zip(state)
        .map(|(&r, blocks)| {
            let mut blocks: Vec<Vec<Point>> = blocks
                .into_iter()
                .map(|b| {
                    let mut pts: Vec<Point> = b.points.iter().map(|&i| points[i].clone()).collect();
                    pts.sort();
                    pts
                })
                .collect();
            blocks.sort();
            CoverFamily {
                disjointness: r,
                blocks,
            }
        })
        .collect();
    Ok(ASetVerdict {
        member: false,
        witness: Some(families),
    })
}
