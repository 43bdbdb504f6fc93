//! Per-axis evaluation of family checks.
//!
//! A clipped member `box ∩ X_n ∩ W` is the union over line axes `a` of the
//! product sets that keep axis `a` whole and restrict every other axis to
//! multiples of `n`. Distances and diameters between product sets split into
//! per-axis terms, and the indices of a template are independent per axis,
//! so every extremum over members reduces to small per-axis tables.

use std::collections::{BTreeMap, HashMap};

use super::line::Prog;
use super::{AxisPiece, BoxFamily, ClosestPair, MemberRef, Widest};
use crate::error::Result;
use crate::par;
use crate::space::{Limits, Point, Window};

const FULL: usize = 0;
const LAT: usize = 1;

#[derive(Debug, Clone, Copy)]
struct Choice {
    idx: i64,
    full: Prog,
    lat: Option<Prog>,
}

impl Choice {
    fn role(&self, r: usize) -> Option<&Prog> {
        if r == FULL {
            Some(&self.full)
        } else {
            self.lat.as_ref()
        }
    }
}

struct View {
    axes: Vec<Vec<Choice>>,
    /// Line axes along which some member of the template is nonempty.
    live: Vec<usize>,
}

fn view(template: &[AxisPiece], w: &Window, limits: &Limits) -> Result<View> {
    let n = w.level as i64;
    let mut axes = Vec::with_capacity(template.len());
    for piece in template {
        let mut choices = Vec::new();
        if let Some((first, last)) = piece.index_range(w.lo, w.hi) {
            limits.check_members("indices on one axis", (last - first) as u128 + 1)?;
            for idx in first..=last {
                let (lo, hi) = piece.instance(idx);
                if let Some(full) = Prog::full(lo.max(w.lo), hi.min(w.hi)) {
                    let lat = Prog::lattice(full.lo, full.hi, n);
                    choices.push(Choice { idx, full, lat });
                }
            }
        }
        axes.push(choices);
    }
    let has_lat: Vec<bool> = axes.iter().map(|c| c.iter().any(|x| x.lat.is_some())).collect();
    let live = (0..axes.len())
        .filter(|&a| {
            !axes[a].is_empty() && (0..axes.len()).all(|b| b == a || has_lat[b])
        })
        .collect();
    Ok(View { axes, live })
}

#[inline]
fn role(line_axis: usize, b: usize) -> usize {
    if line_axis == b {
        FULL
    } else {
        LAT
    }
}

#[derive(Debug, Clone, Copy)]
struct AxisBest {
    dist: u64,
    i: usize,
    j: usize,
}

fn axis_best(c1: &[Choice], r1: usize, c2: &[Choice], r2: usize, distinct: bool) -> Option<AxisBest> {
    let mut best: Option<AxisBest> = None;
    for (i, x) in c1.iter().enumerate() {
        let Some(px) = x.role(r1) else { continue };
        for (j, y) in c2.iter().enumerate() {
            if distinct && i == j {
                continue;
            }
            let Some(py) = y.role(r2) else { continue };
            let d = px.dist(py);
            if best.is_none_or(|b| d < b.dist) {
                best = Some(AxisBest { dist: d, i, j });
                if d == 0 {
                    return best;
                }
            }
        }
    }
    best
}

type Table = Vec<[[Option<AxisBest>; 2]; 2]>;

fn table(vs: &View, vt: &View, distinct: bool) -> Table {
    vs.axes
        .iter()
        .zip(&vt.axes)
        .map(|(c1, c2)| {
            let mut t = [[None; 2]; 2];
            for (r1, row) in t.iter_mut().enumerate() {
                for (r2, cell) in row.iter_mut().enumerate() {
                    *cell = axis_best(c1, r1, c2, r2, distinct);
                }
            }
            t
        })
        .collect()
}

fn pair_best(f: &BoxFamily, views: &[View], s: usize, t: usize) -> Option<ClosestPair> {
    let (vs, vt) = (&views[s], &views[t]);
    if vs.live.is_empty() || vt.live.is_empty() {
        return None;
    }
    let same = s == t;
    let n = f.level();
    let g = table(vs, vt, false);
    let h = if same { table(vs, vt, true) } else { Vec::new() };

    // (distance, a1, a2, axis on which the indices differ)
    let mut top: Option<(u64, usize, usize, Option<usize>)> = None;
    let mut gs = vec![0u64; n];
    for &a1 in &vs.live {
        'lines: for &a2 in &vt.live {
            for (b, slot) in gs.iter_mut().enumerate() {
                match g[b][role(a1, b)][role(a2, b)] {
                    Some(x) => *slot = x.dist,
                    None => continue 'lines,
                }
            }
            let cand = if !same {
                Some((gs.iter().copied().max().unwrap_or(0), None))
            } else {
                // max of gs with one axis left out, via the two largest
                let (mut m1, mut m1_at, mut m2) = (0u64, usize::MAX, 0u64);
                for (b, &v) in gs.iter().enumerate() {
                    if v > m1 || m1_at == usize::MAX {
                        m2 = m1;
                        m1 = v;
                        m1_at = b;
                    } else if v > m2 {
                        m2 = v;
                    }
                }
                let mut best: Option<(u64, usize)> = None;
                for c in 0..n {
                    let Some(hc) = h[c][role(a1, c)][role(a2, c)] else { continue };
                    let others = if c == m1_at { m2 } else { m1 };
                    let d = hc.dist.max(if n == 1 { 0 } else { others });
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, c));
                    }
                }
                best.map(|(d, c)| (d, Some(c)))
            };
            if let Some((d, c)) = cand {
                if top.is_none_or(|x| d < x.0) {
                    top = Some((d, a1, a2, c));
                }
            }
        }
    }
    let (distance, a1, a2, differ) = top?;
    let mut i1 = Vec::with_capacity(n);
    let mut i2 = Vec::with_capacity(n);
    for b in 0..n {
        let src = if differ == Some(b) { &h } else { &g };
        let ab = src[b][role(a1, b)][role(a2, b)].expect("table entry checked above");
        i1.push(vs.axes[b][ab.i].idx);
        i2.push(vt.axes[b][ab.j].idx);
    }
    Some(ClosestPair {
        a: MemberRef::of(f, s, i1),
        b: MemberRef::of(f, t, i2),
        distance,
    })
}

pub(super) fn closest_pair(f: &BoxFamily, w: &Window, limits: &Limits) -> Result<Option<ClosestPair>> {
    let views = f
        .templates()
        .iter()
        .map(|t| view(t, w, limits))
        .collect::<Result<Vec<_>>>()?;
    let count = views.len();
    let pairs: Vec<(usize, usize)> = (0..count).flat_map(|s| (s..count).map(move |t| (s, t))).collect();
    let found = par::map(&pairs, |&(s, t)| pair_best(f, &views, s, t));
    Ok(found.into_iter().flatten().min_by_key(|c| c.distance))
}

fn template_widest(f: &BoxFamily, v: &View, s: usize) -> Option<Widest> {
    let n = f.level();
    let mut top: Option<(i64, Vec<i64>)> = None;
    for &a1 in &v.live {
        'lines: for &a2 in &v.live {
            let mut index = Vec::with_capacity(n);
            let mut span = i64::MIN;
            let mut span_axis = 0;
            let mut span_idx = 0;
            for b in 0..n {
                let (r1, r2) = (role(a1, b), role(a2, b));
                let mut first = None;
                for c in &v.axes[b] {
                    let (Some(p1), Some(p2)) = (c.role(r1), c.role(r2)) else { continue };
                    first.get_or_insert(c.idx);
                    let d = p1.hi - p2.lo;
                    if d > span {
                        span = d;
                        span_axis = b;
                        span_idx = c.idx;
                    }
                }
                match first {
                    Some(i) => index.push(i),
                    None => continue 'lines,
                }
            }
            index[span_axis] = span_idx;
            if top.as_ref().is_none_or(|(d, _)| span > *d) {
                top = Some((span, index));
            }
        }
    }
    let (span, index) = top?;
    Some(Widest {
        member: MemberRef::of(f, s, index),
        diameter: span.max(0) as u64,
    })
}

pub(super) fn widest(f: &BoxFamily, w: &Window, limits: &Limits) -> Result<Option<Widest>> {
    let views = f
        .templates()
        .iter()
        .map(|t| view(t, w, limits))
        .collect::<Result<Vec<_>>>()?;
    let found = par::map_range(0..views.len(), |s| template_widest(f, &views[s], s));
    // first template attaining the maximum
    Ok(found.into_iter().flatten().fold(None, |acc: Option<Widest>, x| match acc {
        Some(a) if a.diameter >= x.diameter => Some(a),
        _ => Some(x),
    }))
}

struct Class {
    on_lattice: bool,
    sig: Vec<u64>,
    rep: i64,
}

type Memo = HashMap<(usize, Vec<u64>, bool), Option<Vec<i64>>>;

fn search(b: usize, mask: &[u64], off_used: bool, classes: &[Vec<Class>], memo: &mut Memo) -> Option<Vec<i64>> {
    if b == classes.len() {
        return mask.iter().all(|&x| x == 0).then(Vec::new);
    }
    let key = (b, mask.to_vec(), off_used);
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let mut out = None;
    for c in &classes[b] {
        if off_used && !c.on_lattice {
            continue;
        }
        let next: Vec<u64> = mask.iter().zip(&c.sig).map(|(m, s)| m & s).collect();
        if let Some(mut suffix) = search(b + 1, &next, off_used || !c.on_lattice, classes, memo) {
            suffix.insert(0, c.rep);
            out = Some(suffix);
            break;
        }
    }
    memo.insert(key, out.clone());
    out
}

/// A window point is covered iff some template covers each of its
/// coordinates on the matching axis. Axis values are grouped into classes
/// with identical behaviour, and a memoized search in lexicographic order
/// finds the first point whose running template mask empties.
pub(super) fn first_uncovered(fs: &[&BoxFamily], w: &Window, limits: &Limits) -> Result<Option<Point>> {
    let n = w.level;
    let pieces: Vec<&[AxisPiece]> = fs
        .iter()
        .flat_map(|f| f.templates().iter().map(Vec::as_slice))
        .collect();
    limits.check_points("window axis values", (w.side() as u128 + 1) * n as u128)?;
    let words = pieces.len().div_ceil(64);
    let step = n as i64;
    let classes: Vec<Vec<Class>> = par::map_range(0..n, |b| {
        let mut by_key: BTreeMap<(bool, Vec<u64>), i64> = BTreeMap::new();
        for v in w.lo..=w.hi {
            let mut sig = vec![0u64; words];
            for (t, p) in pieces.iter().enumerate() {
                if p[b].covers(v) {
                    sig[t / 64] |= 1 << (t % 64);
                }
            }
            by_key.entry((v.rem_euclid(step) == 0, sig)).or_insert(v);
        }
        let mut out: Vec<Class> = by_key
            .into_iter()
            .map(|((on_lattice, sig), rep)| Class { on_lattice, sig, rep })
            .collect();
        out.sort_by_key(|c| c.rep);
        out
    });
    let mut mask = vec![u64::MAX; words];
    if let Some(last) = mask.last_mut() {
        let rem = pieces.len() % 64;
        if rem != 0 {
            *last = (1u64 << rem) - 1;
        }
    }
    let mut memo = Memo::new();
    Ok(search(0, &mask, false, &classes, &mut memo).map(|c| Point::from_parts(n, c)))
}
