//! Dense boxes of integer positions with lexicographic indexing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::Limits;

/// Which positions of a grid count as touching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Adjacency {
    /// Closed unit cells meeting in any face, edge or corner (`3^d − 1`
    /// neighbours). Unions of closed cells are connected exactly along this
    /// relation.
    #[default]
    Closed,
    /// Cells sharing a `(d−1)`-face (`2d` neighbours).
    Face,
}

/// `{0, …, side−1}^dim`, axis 0 most significant.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    pub dim: usize,
    pub side: usize,
    pub len: usize,
    strides: Vec<usize>,
    face: Vec<Vec<i64>>,
    closed: Vec<Vec<i64>>,
}

impl Grid {
    pub fn new(dim: usize, side: usize, limits: &Limits) -> Result<Grid> {
        if dim == 0 || side == 0 {
            return Err(Error::Parameter("grid needs positive dimension and side".into()));
        }
        let len = (side as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        limits.check_points("grid positions", len)?;
        let len = len as usize;
        let mut strides = vec![1usize; dim];
        for b in (0..dim - 1).rev() {
            strides[b] = strides[b + 1] * side;
        }
        // offsets in {-1,0,1}^dim, lexicographic
        let mut closed = Vec::new();
        let total = 3usize.pow(dim as u32);
        for code in 0..total {
            let mut c = code;
            let mut off = vec![0i64; dim];
            for b in (0..dim).rev() {
                off[b] = (c % 3) as i64 - 1;
                c /= 3;
            }
            if off.iter().any(|&x| x != 0) {
                closed.push(off);
            }
        }
        let face = closed
            .iter()
            .filter(|o| o.iter().filter(|&&x| x != 0).count() == 1)
            .cloned()
            .collect();
        Ok(Grid {
            dim,
            side,
            len,
            strides,
            face,
            closed,
        })
    }

    pub fn coord(&self, i: usize, axis: usize) -> i64 {
        ((i / self.strides[axis]) % self.side) as i64
    }

    pub fn coords(&self, i: usize) -> Vec<i64> {
        (0..self.dim).map(|b| self.coord(i, b)).collect()
    }

    pub fn index(&self, c: &[i64]) -> Option<usize> {
        if c.len() != self.dim {
            return None;
        }
        let mut i = 0;
        for (b, &x) in c.iter().enumerate() {
            if x < 0 || x as usize >= self.side {
                return None;
            }
            i += x as usize * self.strides[b];
        }
        Some(i)
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Neighbours of `i` in increasing index order.
    pub fn neighbors(&self, i: usize, adj: Adjacency, out: &mut Vec<usize>) {
        out.clear();
        let c = self.coords(i);
        let offsets = match adj {
            Adjacency::Closed => &self.closed,
            Adjacency::Face => &self.face,
        };
        'next: for off in offsets {
            let mut j = i as i64;
            for b in 0..self.dim {
                let x = c[b] + off[b];
                if x < 0 || x as usize >= self.side {
                    continue 'next;
                }
                j += off[b] * self.strides[b] as i64;
            }
            out.push(j as usize);
        }
    }

    /// Connected components of `mask`, each sorted, ordered by first index.
    pub fn components(&self, mask: &[bool], adj: Adjacency) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len];
        let mut out = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        let mut nb = Vec::new();
        for start in 0..self.len {
            if !mask[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                self.neighbors(v, adj, &mut nb);
                for &u in &nb {
                    if mask[u] && !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Largest coordinate range over a set of positions.
    pub fn diameter(&self, cells: &[usize]) -> u64 {
        (0..self.dim)
            .map(|b| {
                let lo = cells.iter().map(|&i| self.coord(i, b)).min().unwrap_or(0);
                let hi = cells.iter().map(|&i| self.coord(i, b)).max().unwrap_or(0);
                lo.abs_diff(hi)
            })
            .max()
            .unwrap_or(0)
    }

    /// Shortest path inside `mask` from any position with `x_axis = 0` to
    /// one with `x_axis = side − 1`. Sources enter the queue in index order
    /// and neighbours are expanded in index order, so the result is the
    /// lexicographically first among shortest paths found this way.
    pub fn crossing_path(&self, mask: &[bool], axis: usize, adj: Adjacency) -> Option<Vec<usize>> {
        let last = self.side as i64 - 1;
        let mut parent = vec![usize::MAX; self.len];
        let mut queue = std::collections::VecDeque::new();
        for i in 0..self.len {
            if mask[i] && self.coord(i, axis) == 0 {
                parent[i] = i;
                queue.push_back(i);
            }
        }
        let mut nb = Vec::new();
        while let Some(v) = queue.pop_front() {
            if self.coord(v, axis) == last {
                let mut path = vec![v];
                let mut cur = v;
                while parent[cur] != cur {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            self.neighbors(v, adj, &mut nb);
            for &u in &nb {
                if mask[u] && parent[u] == usize::MAX {
                    parent[u] = v;
                    queue.push_back(u);
                }
            }
        }
        None
    }
}

/// Union-find with path halving.
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
