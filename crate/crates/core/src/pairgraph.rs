//! The digraph of digit-carry pairs.
//!
//! For pairwise coprime `P`, `Q`, `b`, each node `(i, j)` with `0 <= i < P`,
//! `0 <= j < Q` has the `b` out-edges
//!
//! ```text
//! (i, j) -> ( ⌊(i + rP)/b⌋, ⌊(j + rQ)/b⌋ ),    r = 0, ..., b-1.
//! ```
//!
//! The component of `(0, 0)` is exactly `C = {(⌊tP⌋, ⌊tQ⌋) : 0 <= t < 1}`,
//! a monotone staircase from `(0, 0)` to `(P-1, Q-1)` with `P + Q - 1`
//! nodes, every one of which also reaches back to `(0, 0)`. Both facts are
//! verified at construction time.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::sieve::pairwise_coprime;

/// Upper bound on the scales `P`, `Q` accepted by [`build_component`].
pub const MAX_SCALE: u64 = 1_000_000;

/// The strongly connected component of `(0, 0)` in the pair digraph,
/// with members sorted lexicographically.
#[derive(Clone, Debug)]
pub struct ComponentC {
    base: u32,
    p: u64,
    q: u64,
    members: Vec<(u64, u64)>,
}

impl ComponentC {
    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in lexicographic order; for a monotone staircase this is also
    /// the path order from `(0, 0)` to `(P-1, Q-1)`.
    pub fn members(&self) -> &[(u64, u64)] {
        &self.members
    }

    /// Index of `(i, j)` in [`members`](ComponentC::members), if present.
    pub fn index_of(&self, i: u64, j: u64) -> Option<usize> {
        self.members.binary_search(&(i, j)).ok()
    }

    pub fn contains(&self, i: u64, j: u64) -> bool {
        self.index_of(i, j).is_some()
    }

    pub fn pair_at(&self, idx: usize) -> (u64, u64) {
        self.members[idx]
    }
}

/// The `b` out-neighbours of `(i, j)`, in order of the digit `r`;
/// multiplicities are preserved (targets may repeat).
pub fn edge_targets(i: u64, j: u64, base: u32, p: u64, q: u64) -> Vec<(u64, u64)> {
    let b = base as u128;
    (0..base as u128)
        .map(|r| {
            let ti = (i as u128 + r * p as u128) / b;
            let tj = (j as u128 + r * q as u128) / b;
            (ti as u64, tj as u64)
        })
        .collect()
}

/// Breadth-first closure of `(0, 0)` under the edge map, verified to be
/// strongly connected and of size `P + Q - 1`.
pub fn build_component(base: u32, p: u64, q: u64) -> Result<ComponentC> {
    if base < 2 {
        return Err(Error::invalid("base must be at least 2"));
    }
    if p == 0 || q == 0 {
        return Err(Error::invalid("P and Q must be positive"));
    }
    if p > MAX_SCALE || q > MAX_SCALE {
        return Err(Error::too_large(format!(
            "P={p}, Q={q} exceed the {MAX_SCALE} scale cap"
        )));
    }
    if !pairwise_coprime(p, q, base as u64) {
        return Err(Error::NotCoprime {
            p,
            q,
            base: base as u64,
        });
    }

    let mut seen = BTreeSet::new();
    let mut queue = vec![(0u64, 0u64)];
    seen.insert((0u64, 0u64));
    while let Some((i, j)) = queue.pop() {
        for (ti, tj) in edge_targets(i, j, base, p, q) {
            if seen.insert((ti, tj)) {
                queue.push((ti, tj));
            }
        }
    }
    let members: Vec<(u64, u64)> = seen.into_iter().collect();

    let expected = (p + q - 1) as usize;
    if members.len() != expected {
        return Err(Error::internal(format!(
            "component of (0,0) for P={p}, Q={q}, b={base} has {} members, expected {expected}",
            members.len()
        )));
    }

    // Strong connectivity: walk the reversed edges from (0, 0) and demand
    // that every member is reached.
    let n = members.len();
    let index = |i: u64, j: u64| members.binary_search(&(i, j)).ok();
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (src, &(i, j)) in members.iter().enumerate() {
        for (ti, tj) in edge_targets(i, j, base, p, q) {
            let dst = index(ti, tj).ok_or_else(|| {
                Error::internal(format!(
                    "edge from ({i},{j}) leaves the component at ({ti},{tj})"
                ))
            })?;
            reverse[dst].push(src);
        }
    }
    let root = index(0, 0)
        .ok_or_else(|| Error::internal("component lost its root (0,0)".to_string()))?;
    let mut back = vec![false; n];
    back[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &u in &reverse[v] {
            if !back[u] {
                back[u] = true;
                stack.push(u);
            }
        }
    }
    if back.iter().any(|&r| !r) {
        return Err(Error::internal(format!(
            "component for P={p}, Q={q}, b={base} is not strongly connected"
        )));
    }

    Ok(ComponentC {
        base,
        p,
        q,
        members,
    })
}

/// Independent construction of the component members: enumerate the
/// breakpoints `{k/P} ∪ {k/Q}` of `t -> (⌊tP⌋, ⌊tQ⌋)` on `[0, 1)` as exact
/// rationals and evaluate the floors at each breakpoint.
pub fn sweep_members(p: u64, q: u64) -> Vec<(u64, u64)> {
    assert!(p >= 1 && q >= 1, "scales must be positive");
    // Breakpoint t = k/d, represented as (k, d).
    let mut points: Vec<(u64, u64)> = (0..p).map(|k| (k, p)).chain((1..q).map(|k| (k, q))).collect();
    points.sort_by(|&(a, b), &(c, d)| (a as u128 * d as u128).cmp(&(c as u128 * b as u128)));
    points.dedup_by(|&mut (a, b), &mut (c, d)| a as u128 * d as u128 == c as u128 * b as u128);
    let mut members: Vec<(u64, u64)> = points
        .into_iter()
        .map(|(k, d)| {
            let i = (k as u128 * p as u128 / d as u128) as u64;
            let j = (k as u128 * q as u128 / d as u128) as u64;
            (i, j)
        })
        .collect();
    members.sort_unstable();
    members.dedup();
    members
}

/// The unique digit `i0 < b` with both `(i0, b-1)` and `(i0, b)` in the
/// component. Requires `b < P < Q`; a missing or non-unique `i0` is an
/// internal inconsistency.
pub fn find_i0(component: &ComponentC) -> Result<u64> {
    let b = component.base() as u64;
    if !(b < component.p() && component.p() < component.q()) {
        return Err(Error::invalid(format!(
            "find_i0 requires b < P < Q, got b={b}, P={}, Q={}",
            component.p(),
            component.q()
        )));
    }
    let mut found: Option<u64> = None;
    for i in 0..b {
        if component.contains(i, b - 1) && component.contains(i, b) {
            if let Some(prev) = found {
                return Err(Error::internal(format!(
                    "both i0={prev} and i0={i} admit edges through (i0, b-1), (i0, b)"
                )));
            }
            found = Some(i);
        }
    }
    found.ok_or_else(|| {
        Error::internal(format!(
            "no i0 < {b} with (i0, {}) and (i0, {b}) in the component",
            b - 1
        ))
    })
}

/// Counts of length-`length` paths between all pairs of component members.
#[derive(Clone, Debug)]
pub struct PathCountMatrix {
    length: u32,
    n: usize,
    data: Vec<u128>,
}

impl PathCountMatrix {
    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> u128 {
        self.data[row * self.n + col]
    }

    pub fn row_sums(&self) -> Vec<u128> {
        (0..self.n)
            .map(|r| self.data[r * self.n..(r + 1) * self.n].iter().sum())
            .collect()
    }
}

/// Count directed paths of exactly `length` edges between members.
///
/// Every node has out-degree `b` (with multiplicity), so each row sums to
/// `b^length`; the count is exact and `b^length` must stay below 2^127.
pub fn path_counts(component: &ComponentC, length: u32) -> Result<PathCountMatrix> {
    if length == 0 {
        return Err(Error::invalid("path length must be at least 1"));
    }
    let b = component.base() as u128;
    let total = b
        .checked_pow(length)
        .filter(|&v| v <= 1u128 << 127)
        .ok_or_else(|| Error::overflow(format!("b^{length} exceeds 2^127")))?;
    let n = component.len();
    // One adjacency step as a sparse row list with multiplicities.
    let mut step: Vec<Vec<(usize, u128)>> = Vec::with_capacity(n);
    for &(i, j) in component.members() {
        let mut row: Vec<(usize, u128)> = Vec::new();
        for (ti, tj) in edge_targets(i, j, component.base(), component.p(), component.q()) {
            let idx = component.index_of(ti, tj).ok_or_else(|| {
                Error::internal(format!("edge target ({ti},{tj}) outside component"))
            })?;
            match row.iter_mut().find(|(c, _)| *c == idx) {
                Some((_, m)) => *m += 1,
                None => row.push((idx, 1)),
            }
        }
        step.push(row);
    }

    let mut data = vec![0u128; n * n];
    for r in 0..n {
        data[r * n + r] = 1;
    }
    for _ in 0..length {
        let mut next = vec![0u128; n * n];
        for r in 0..n {
            for c in 0..n {
                let v = data[r * n + c];
                if v == 0 {
                    continue;
                }
                for &(dst, m) in &step[c] {
                    next[r * n + dst] += v * m;
                }
            }
        }
        data = next;
    }

    let matrix = PathCountMatrix {
        length,
        n,
        data,
    };
    for (r, s) in matrix.row_sums().into_iter().enumerate() {
        if s != total {
            return Err(Error::internal(format!(
                "row {r} of the path-count matrix sums to {s}, expected {total}"
            )));
        }
    }
    Ok(matrix)
}

/// Check `⌊(⌊tP⌋ + rP)/b⌋ = ⌊(t + r)·P/b⌋` for `t = t_num/t_den`, evaluated
/// in exact integer arithmetic.
pub fn verify_floor_identity(base: u32, p: u64, t_num: u64, t_den: u64, r: u32) -> bool {
    assert!(t_den > 0 && t_num < t_den, "t must lie in [0, 1)");
    assert!(r < base, "r must be a digit");
    let (p, b) = (p as u128, base as u128);
    let floor_tp = t_num as u128 * p / t_den as u128;
    let lhs = (floor_tp + r as u128 * p) / b;
    let rhs = (t_num as u128 + r as u128 * t_den as u128) * p / (b * t_den as u128);
    lhs == rhs
}
