//! Discrete Lebesgue covering checks and the obstruction pipeline.
//!
//! Given candidate families `𝒱₀, …, 𝒱ₘ` on level `m+1` with `𝒱ⱼ` (`j ≥ 1`)
//! `(n+4m+4)`-disjoint and all of them `B`-bounded, the pipeline works on
//! the integer grid `[0, S]^{m+1}` with `S ≥ B + n` a multiple of `m+1`:
//!
//! 1. restrict every family to `X_{m+1} ∩ [0, S]^{m+1}` and check covering;
//! 2. check the disjointness and boundedness hypotheses;
//! 3. thicken `⋃𝒰ᵢ` (`i ≥ 1`) by the closed ball of radius `m+1` to `Ũᵢ`
//!    and let `Ũ₀` be the rest of the grid;
//! 4. find a path `α` in `Ũ₀` from `x₀ = 0` to `x₀ = S`;
//! 5. collect the side-`(m+1)` lattice cubes `𝒲` meeting `α` and route a
//!    path `β` along their edges between the same facets.
//!
//! Cube edges lie in `X_{m+1}`, and every point of a cube in `𝒲` is within
//! `m+1` of `α`, so `β` avoids `⋃𝒰ᵢ` for `i ≥ 1` and lies in `⋃𝒰₀`. Its
//! diameter is at least `S > B`, which no single `B`-bounded member can
//! contain; consecutive points of `β` that change member are at distance 1.

mod grid;
mod lebesgue;
mod ops;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cover::CheckKind;
use crate::error::{Error, Result};
use crate::families::{first_uncovered_points, set_diameter, set_dist, BoxFamily, MemberRef, PointFamily, VerifyReport};
use crate::space::{Limits, Point, Window};

pub use grid::Adjacency;
pub use lebesgue::{exhaustive_lebesgue, lebesgue_witness, verify_span_witness, CellCover, ExhaustiveSummary, LabeledCells, SpanWitness};
pub use ops::{complement_closure, thicken, Domain};

use grid::Grid;

/// A candidate family, symbolic or explicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CandidateFamily {
    Boxes(BoxFamily),
    Points(PointFamily),
}

impl CandidateFamily {
    fn level(&self) -> usize {
        match self {
            CandidateFamily::Boxes(f) => f.level(),
            CandidateFamily::Points(f) => f.level,
        }
    }

    fn restrict(&self, w: &Window, limits: &Limits) -> Result<PointFamily> {
        match self {
            CandidateFamily::Boxes(f) => f.materialize(w, limits),
            CandidateFamily::Points(f) => f.restrict(w),
        }
    }
}

/// Families `𝒱₀, …, 𝒱ₘ` on level `m+1` with the parameters they claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionCandidate {
    pub m: usize,
    pub k: u64,
    pub n: u64,
    pub bound: u64,
    /// Window side; `bound + n` when absent. Rounded up to a multiple of
    /// `m+1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<u64>,
    pub families: Vec<CandidateFamily>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ViolationFound,
    NoViolation,
    InvalidInput,
}

/// Two members of `𝒰₀` met by consecutive points of `β`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blame {
    /// Index into `β` of the first point outside member `a`.
    pub step: usize,
    pub a: MemberRef,
    pub b: MemberRef,
    pub distance: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ObstructionWitness {
    /// The path `β` in `⋃𝒰₀` joining `x₀ = 0` to `x₀ = side`.
    Skeleton {
        path: Vec<Point>,
        diameter: u64,
        bound: u64,
        /// Two distinct members met by the path and closer than `k`;
        /// always present when `k ≥ 2`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        blame: Option<Blame>,
    },
    /// A hypothesis on the candidate families fails.
    Family {
        family: usize,
        check: CheckKind,
        parameter: u64,
        report: VerifyReport,
    },
    Uncovered { point: Point },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stages {
    pub grid_points: usize,
    /// Sizes of `Ũ₁, …, Ũₘ`.
    pub thickened: Vec<usize>,
    pub rest: usize,
    pub multiplicity: usize,
    pub alpha: usize,
    pub cubes: usize,
    pub beta: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub verdict: Verdict,
    pub side: u64,
    pub witness: Option<ObstructionWitness>,
    pub stages: Stages,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ObstructionReport {
    fn early(verdict: Verdict, side: u64, witness: ObstructionWitness) -> Self {
        ObstructionReport {
            verdict,
            side,
            witness: Some(witness),
            stages: Stages::default(),
            note: None,
        }
    }
}

fn scale_note(side: u64, what: &str) -> String {
    format!("no violation at side {side}: {what}; this says the window is too small, not that the candidate is a valid cover")
}

pub fn obstruction_run(c: &ObstructionCandidate, limits: &Limits) -> Result<ObstructionReport> {
    let d = c.m + 1;
    if c.k == 0 || c.n == 0 || c.bound == 0 {
        return Err(Error::Parameter("k, n and bound must be positive".into()));
    }
    if c.families.len() != d {
        return Err(Error::Parameter(format!("expected {d} families for m = {}, got {}", c.m, c.families.len())));
    }
    if let Some(f) = c.families.iter().find(|f| f.level() != d) {
        return Err(Error::LevelMismatch {
            family: f.level(),
            window: d,
        });
    }
    let raw_side = c.side.unwrap_or(c.bound + c.n).max(1);
    let side = raw_side.div_ceil(d as u64) * d as u64;
    let window = Window::new(d, 0, side as i64)?;

    // restriction and covering
    let fams = c
        .families
        .iter()
        .map(|f| f.restrict(&window, limits))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&PointFamily> = fams.iter().collect();
    if let Some(point) = first_uncovered_points(&refs, &window, limits)? {
        return Ok(ObstructionReport::early(Verdict::InvalidInput, side, ObstructionWitness::Uncovered { point }));
    }

    // hypotheses
    let sep = c.n + 4 * c.m as u64 + 4;
    for (i, f) in fams.iter().enumerate() {
        if i >= 1 {
            let report = f.verify_disjoint(sep);
            if !report.verdict {
                let w = ObstructionWitness::Family {
                    family: i,
                    check: CheckKind::Disjoint,
                    parameter: sep,
                    report,
                };
                return Ok(ObstructionReport::early(Verdict::ViolationFound, side, w));
            }
        }
        let report = f.verify_bounded(c.bound);
        if !report.verdict {
            let w = ObstructionWitness::Family {
                family: i,
                check: CheckKind::Bounded,
                parameter: c.bound,
                report,
            };
            return Ok(ObstructionReport::early(Verdict::ViolationFound, side, w));
        }
    }

    // thickening
    let grid = Grid::new(d, side as usize + 1, limits)?;
    let masks: Vec<Vec<bool>> = fams
        .iter()
        .map(|f| {
            let mut m = vec![false; grid.len];
            for p in f.members.iter().flatten() {
                m[grid.index(p).expect("restricted to the window")] = true;
            }
            m
        })
        .collect();
    let thick: Vec<Vec<bool>> = masks[1..].iter().map(|m| ops::dilate(&grid, m, d)).collect();
    let rest: Vec<bool> = (0..grid.len).map(|i| !thick.iter().any(|t| t[i])).collect();
    let multiplicity = (0..grid.len)
        .map(|i| usize::from(rest[i]) + thick.iter().filter(|t| t[i]).count())
        .max()
        .unwrap_or(0);
    if multiplicity > d {
        return Err(Error::Contradiction(format!("multiplicity {multiplicity} exceeds {d}")));
    }
    let comp_bound = c.bound + 2 * d as u64;
    for (i, t) in thick.iter().enumerate() {
        for comp in grid.components(t, Adjacency::Closed) {
            let diam = grid.diameter(&comp);
            if diam > comp_bound {
                return Err(Error::Contradiction(format!(
                    "component of thickened family {} has diameter {diam} > {comp_bound}",
                    i + 1
                )));
            }
        }
    }
    let mut stages = Stages {
        grid_points: grid.len,
        thickened: thick.iter().map(|t| t.iter().filter(|&&x| x).count()).collect(),
        rest: rest.iter().filter(|&&x| x).count(),
        multiplicity,
        ..Stages::default()
    };
    let no_violation = |stages: Stages, note: String| ObstructionReport {
        verdict: Verdict::NoViolation,
        side,
        witness: None,
        stages,
        note: Some(note),
    };

    // spanning path in the rest
    let Some(alpha) = grid.crossing_path(&rest, 0, Adjacency::Closed) else {
        if stages.rest == 0 {
            return Ok(no_violation(stages, scale_note(side, "the thickened families fill the window")));
        }
        for (i, t) in thick.iter().enumerate() {
            if lebesgue::spanning_component(&grid, t, i + 1, Adjacency::Closed).is_some() {
                if side > comp_bound {
                    return Err(Error::Contradiction(format!("thickened family {} spans a window of side {side}", i + 1)));
                }
                return Ok(no_violation(
                    stages,
                    scale_note(side, &format!("thickened family {} spans axis {}", i + 1, i + 1)),
                ));
            }
        }
        return Err(Error::Contradiction("no set of the thickened cover spans its axis".into()));
    };
    stages.alpha = alpha.len();

    // cubes meeting alpha
    let step = d as i64;
    let cells_per_axis = side as i64 / step;
    let mut cubes: BTreeSet<Vec<i64>> = BTreeSet::new();
    for &i in &alpha {
        let p = grid.coords(i);
        let choices: Vec<Vec<i64>> = p
            .iter()
            .map(|&x| {
                let mut v = Vec::new();
                if x % step == 0 && x > 0 {
                    v.push(x / step - 1);
                }
                if x / step < cells_per_axis {
                    v.push(x / step);
                }
                v
            })
            .collect();
        let mut idx = vec![0usize; d];
        'cubes: loop {
            cubes.insert(idx.iter().enumerate().map(|(b, &j)| choices[b][j]).collect());
            for b in (0..d).rev() {
                if idx[b] + 1 < choices[b].len() {
                    idx[b] += 1;
                    idx[b + 1..].iter_mut().for_each(|x| *x = 0);
                    continue 'cubes;
                }
            }
            break;
        }
    }
    stages.cubes = cubes.len();

    // edges of those cubes
    let mut adj: BTreeMap<Vec<i64>, BTreeSet<Vec<i64>>> = BTreeMap::new();
    for cube in &cubes {
        for corner in 0..1usize << d {
            let v: Vec<i64> = (0..d).map(|b| (cube[b] + (corner >> b & 1) as i64) * step).collect();
            for b in 0..d {
                if corner >> b & 1 == 0 {
                    let mut u = v.clone();
                    u[b] += step;
                    adj.entry(v.clone()).or_default().insert(u.clone());
                    adj.entry(u).or_default().insert(v.clone());
                }
            }
        }
    }
    let corners = skeleton_path(&adj, side as i64).ok_or_else(|| {
        Error::Contradiction("edges of the cubes met by the spanning path do not join the facets".into())
    })?;
    let mut beta: Vec<Vec<i64>> = vec![corners[0].clone()];
    for pair in corners.windows(2) {
        let b = (0..d).find(|&b| pair[0][b] != pair[1][b]).expect("distinct corners");
        let dir = (pair[1][b] - pair[0][b]).signum();
        let mut cur = pair[0].clone();
        while cur != pair[1] {
            cur[b] += dir;
            beta.push(cur.clone());
        }
    }
    stages.beta = beta.len();

    // beta avoids the thickened families and stays in the rest's members
    let other: Vec<bool> = (0..grid.len).map(|i| masks[1..].iter().any(|m| m[i])).collect();
    for p in &beta {
        let i = grid.index(p).expect("corners lie in the window");
        if other[i] || !masks[0][i] {
            return Err(Error::Contradiction(format!("skeleton point {p:?} is not in the first family alone")));
        }
    }
    let diameter = set_diameter(&beta);
    if diameter < side {
        return Err(Error::Contradiction(format!("skeleton path diameter {diameter} below side {side}")));
    }
    if diameter <= c.bound {
        return Ok(no_violation(
            stages,
            scale_note(side, &format!("the spanning path has diameter {diameter} ≤ bound {}", c.bound)),
        ));
    }
    let blame = blame(&fams[0], &beta, c.k);
    if c.k >= 2 && blame.is_none() {
        return Err(Error::Contradiction("path of large diameter inside a single bounded member".into()));
    }
    let path = beta.into_iter().map(|x| Point::new(d, x)).collect::<Result<Vec<_>>>()?;
    Ok(ObstructionReport {
        verdict: Verdict::ViolationFound,
        side,
        witness: Some(ObstructionWitness::Skeleton {
            path,
            diameter,
            bound: c.bound,
            blame,
        }),
        stages,
        note: None,
    })
}

/// Breadth-first search over cube corners from `x₀ = 0` to `x₀ = side`,
/// visiting neighbours in lexicographic order.
fn skeleton_path(adj: &BTreeMap<Vec<i64>, BTreeSet<Vec<i64>>>, side: i64) -> Option<Vec<Vec<i64>>> {
    let mut parent: HashMap<&Vec<i64>, &Vec<i64>> = HashMap::new();
    let mut queue = VecDeque::new();
    for v in adj.keys().filter(|v| v[0] == 0) {
        parent.insert(v, v);
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        if v[0] == side {
            let mut path = vec![v.clone()];
            let mut cur = v;
            while parent[cur] != cur {
                cur = parent[cur];
                path.push(cur.clone());
            }
            path.reverse();
            return Some(path);
        }
        for u in &adj[v] {
            if !parent.contains_key(u) {
                parent.insert(u, v);
                queue.push_back(u);
            }
        }
    }
    None
}

/// The first step of `β` that leaves the member holding the previous
/// point, when the two members are closer than `k`.
fn blame(f: &PointFamily, beta: &[Vec<i64>], k: u64) -> Option<Blame> {
    let mut owners: HashMap<&[i64], Vec<usize>> = HashMap::new();
    for (i, m) in f.members.iter().enumerate() {
        for p in m {
            owners.entry(p.as_slice()).or_default().push(i);
        }
    }
    let cur = *owners.get(beta.first()?.as_slice())?.first()?;
    for (s, p) in beta.iter().enumerate().skip(1) {
        let here = owners.get(p.as_slice())?;
        if here.contains(&cur) {
            continue;
        }
        let next = here[0];
        let distance = set_dist(&f.members[cur], &f.members[next]);
        if distance >= k {
            return None;
        }
        return Some(Blame {
            step: s,
            a: f.member_ref(cur),
            b: f.member_ref(next),
            distance,
        });
    }
    None
}
