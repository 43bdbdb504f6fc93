//! Brute-force checks over explicit point sets.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::{BoxFamily, ClosestPair, MemberRef, VerifyReport, Widest};
use crate::error::{Error, Result};
use crate::par;
use crate::space::{for_each_window_point, in_space, padded_max_dist, Limits, Point, Window};

/// A finite family given by its members' points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFamily {
    pub level: usize,
    pub label: String,
    pub members: Vec<Vec<Vec<i64>>>,
    /// Identity of each member; filled in when the family was materialized
    /// from a [`BoxFamily`].
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub refs: Vec<MemberRef>,
}

impl PointFamily {
    pub fn new(level: usize, label: impl Into<String>, members: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        for m in &members {
            for p in m {
                if p.len() != level {
                    return Err(Error::Dimension {
                        expected: level,
                        got: p.len(),
                    });
                }
            }
        }
        Ok(PointFamily {
            level,
            label: label.into(),
            members,
            refs: Vec::new(),
        })
    }

    /// Keeps only points of `X_level ∩ w` and drops members left empty.
    pub fn restrict(&self, w: &Window) -> Result<PointFamily> {
        if self.level != w.level {
            return Err(Error::LevelMismatch {
                family: self.level,
                window: w.level,
            });
        }
        let mut members = Vec::new();
        let mut refs = Vec::new();
        for (i, m) in self.members.iter().enumerate() {
            let mut kept: Vec<Vec<i64>> = m
                .iter()
                .filter(|p| w.contains(p) && in_space(p, self.level))
                .cloned()
                .collect();
            kept.sort();
            kept.dedup();
            if kept.is_empty() {
                continue;
            }
            refs.push(self.member_ref(i));
            members.push(kept);
        }
        Ok(PointFamily {
            level: self.level,
            label: self.label.clone(),
            members,
            refs,
        })
    }

    pub fn member_ref(&self, i: usize) -> MemberRef {
        if let Some(r) = self.refs.get(i) {
            return r.clone();
        }
        let m = &self.members[i];
        let bounds = (0..self.level)
            .map(|b| {
                let lo = m.iter().map(|p| p[b]).min().unwrap_or(0);
                let hi = m.iter().map(|p| p[b]).max().unwrap_or(0);
                [lo, hi]
            })
            .collect();
        MemberRef {
            template: i,
            index: Vec::new(),
            bounds,
        }
    }

    pub fn contains(&self, coords: &[i64]) -> bool {
        self.members.iter().any(|m| m.iter().any(|p| p == coords))
    }

    /// Closest pair of distinct members, by direct comparison of points.
    pub fn closest_pair(&self) -> Option<ClosestPair> {
        let boxes: Vec<Vec<(i64, i64)>> = self.members.iter().map(|m| bbox(m, self.level)).collect();
        let mut order: Vec<usize> = (0..self.members.len()).filter(|&i| !self.members[i].is_empty()).collect();
        order.sort_by_key(|&i| (boxes[i].first().map_or(0, |b| b.0), i));
        let best = AtomicU64::new(u64::MAX);
        let found = par::map_range(0..order.len(), |pos| {
            let i = order[pos];
            let mut local: Option<(u64, usize, usize)> = None;
            for &j in &order[pos + 1..] {
                let cut = best.load(Ordering::Relaxed);
                if self.level > 0 && boxes[j][0].0 > boxes[i][0].1 && boxes[j][0].0.abs_diff(boxes[i][0].1) > cut {
                    break;
                }
                if box_gap(&boxes[i], &boxes[j]) > cut {
                    continue;
                }
                let d = set_dist(&self.members[i], &self.members[j]);
                let key = (d, i.min(j), i.max(j));
                if local.is_none_or(|l| key < l) {
                    local = Some(key);
                }
                best.fetch_min(d, Ordering::Relaxed);
            }
            local
        });
        let (d, i, j) = found.into_iter().flatten().min()?;
        Some(ClosestPair {
            a: self.member_ref(i),
            b: self.member_ref(j),
            distance: d,
        })
    }

    /// Widest member; the max-metric diameter of a finite set is its largest
    /// coordinate range.
    pub fn widest(&self) -> Option<Widest> {
        let mut top: Option<(u64, usize)> = None;
        for (i, m) in self.members.iter().enumerate() {
            if m.is_empty() {
                continue;
            }
            let d = set_diameter(m);
            if top.is_none_or(|(td, _)| d > td) {
                top = Some((d, i));
            }
        }
        let (diameter, i) = top?;
        Some(Widest {
            member: self.member_ref(i),
            diameter,
        })
    }

    pub fn verify_disjoint(&self, r: u64) -> VerifyReport {
        super::disjoint_report(self.closest_pair(), r)
    }

    pub fn verify_bounded(&self, bound: u64) -> VerifyReport {
        super::bounded_report(self.widest(), bound)
    }
}

fn bbox(m: &[Vec<i64>], level: usize) -> Vec<(i64, i64)> {
    (0..level)
        .map(|b| {
            let lo = m.iter().map(|p| p[b]).min().unwrap_or(0);
            let hi = m.iter().map(|p| p[b]).max().unwrap_or(0);
            (lo, hi)
        })
        .collect()
}

fn box_gap(a: &[(i64, i64)], b: &[(i64, i64)]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| super::line::interval_gap(x.0, x.1, y.0, y.1))
        .max()
        .unwrap_or(0)
}

/// Minimum max-metric distance between two point sets.
pub fn set_dist(a: &[Vec<i64>], b: &[Vec<i64>]) -> u64 {
    let mut best = u64::MAX;
    for p in a {
        for q in b {
            best = best.min(padded_max_dist(p, q));
            if best == 0 {
                return 0;
            }
        }
    }
    best
}

/// Max-metric diameter of a point set.
pub fn set_diameter(m: &[Vec<i64>]) -> u64 {
    let level = m.first().map_or(0, Vec::len);
    bbox(m, level)
        .iter()
        .map(|&(lo, hi)| lo.abs_diff(hi))
        .max()
        .unwrap_or(0)
}

pub(super) fn materialize(f: &BoxFamily, w: &Window, limits: &Limits) -> Result<PointFamily> {
    let mut members = Vec::new();
    let mut refs = Vec::new();
    let mut total_points: u128 = 0;
    for (t, template) in f.templates().iter().enumerate() {
        let ranges: Option<Vec<(i64, i64)>> = template.iter().map(|p| p.index_range(w.lo, w.hi)).collect();
        let Some(ranges) = ranges else { continue };
        let count = ranges
            .iter()
            .fold(1u128, |acc, &(a, b)| acc.saturating_mul((b - a) as u128 + 1));
        limits.check_members("family members", count + members.len() as u128)?;
        let mut index: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'members: loop {
            let m = MemberRef::of(f, t, index.clone());
            let pts = m.points(w);
            if !pts.is_empty() {
                total_points += pts.len() as u128;
                limits.check_points("member points", total_points)?;
                members.push(pts);
                refs.push(m);
            }
            // odometer step, last axis fastest
            let mut axis = ranges.len();
            while axis > 0 {
                axis -= 1;
                if index[axis] < ranges[axis].1 {
                    index[axis] += 1;
                    for (k, r) in ranges.iter().enumerate().skip(axis + 1) {
                        index[k] = r.0;
                    }
                    continue 'members;
                }
            }
            break;
        }
    }
    Ok(PointFamily {
        level: f.level(),
        label: f.label().to_string(),
        members,
        refs,
    })
}

/// Lexicographically first point of `X_level ∩ w` outside every member.
pub fn first_uncovered(fs: &[&PointFamily], w: &Window, limits: &Limits) -> Result<Option<Point>> {
    let covered: HashSet<&[i64]> = fs
        .iter()
        .flat_map(|f| f.members.iter().flatten().map(Vec::as_slice))
        .collect();
    let mut first = None;
    for_each_window_point(w, limits, |c| {
        if first.is_none() && !covered.contains(c) {
            first = Some(c.to_vec());
        }
    })?;
    Ok(first.map(|c| Point::from_parts(w.level, c)))
}

/// Cover check over explicit families.
pub fn verify_cover_points(fs: &[&PointFamily], w: &Window, limits: &Limits) -> Result<VerifyReport> {
    Ok(super::cover_report(first_uncovered(fs, w, limits)?))
}
