//! Latin hypercube sampling plans with local maximin optimization and nested
//! high-fidelity subsets.
//!
//! Points are stored as integer cell indices: coordinate `k` of an `n`-point
//! plan sits at `(k + 0.5) / n`. Squared distances are therefore integers
//! scaled by `1/n^2`, and every comparison made by the swap searches is exact.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingPlan {
    cells: Vec<Vec<u32>>,
    dim: usize,
    seed: u64,
}

impl SamplingPlan {
    /// Builds a plan from explicit cell indices, checking the Latin property.
    pub fn from_cells(cells: Vec<Vec<u32>>, seed: u64) -> Result<Self> {
        let n = cells.len();
        if n < 2 {
            return Err(Error::Size(format!("a plan needs at least 2 points, got {n}")));
        }
        let dim = cells[0].len();
        if dim == 0 || cells.iter().any(|c| c.len() != dim) {
            return Err(Error::Size("all points must share a positive dimension".into()));
        }
        for k in 0..dim {
            let mut col: Vec<u32> = cells.iter().map(|c| c[k]).collect();
            col.sort_unstable();
            if col.iter().enumerate().any(|(i, &v)| v as usize != i) {
                return Err(Error::Design(format!("column {k} is not a permutation of 0..{n}")));
            }
        }
        Ok(Self { cells, dim, seed })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cells(&self) -> &[Vec<u32>] {
        &self.cells
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        let n = self.len() as f64;
        self.cells[i].iter().map(|&k| (f64::from(k) + 0.5) / n).collect()
    }

    /// Points in the unit hypercube.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Squared distance between two points in cell units (multiply by `1/n^2`
    /// for the unit-hypercube value).
    pub fn cell_dist2(&self, i: usize, j: usize) -> u64 {
        cell_dist2(&self.cells[i], &self.cells[j])
    }

    /// Minimum pairwise Euclidean distance in the unit hypercube.
    pub fn min_distance(&self) -> f64 {
        let n = self.len();
        let best = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.cell_dist2(i, j))
            .min()
            .unwrap_or(u64::MAX);
        (best as f64).sqrt() / n as f64
    }
}

fn cell_dist2(a: &[u32], b: &[u32]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum()
}

/// Random midpoint Latin hypercube plan with `n_low` points in `dim` dimensions.
pub fn lhs_plan(n_low: usize, dim: usize, seed: u64) -> Result<SamplingPlan> {
    if n_low < 2 {
        return Err(Error::Size(format!("n_l must be at least 2, got {n_low}")));
    }
    if dim == 0 {
        return Err(Error::Size("dimension must be positive".into()));
    }
    let mut rng = rng::seeded(seed);
    let mut cells = vec![vec![0u32; dim]; n_low];
    let mut column: Vec<u32> = (0..n_low as u32).collect();
    for k in 0..dim {
        column.shuffle(&mut rng);
        for (i, &v) in column.iter().enumerate() {
            cells[i][k] = v;
        }
    }
    Ok(SamplingPlan { cells, dim, seed })
}

/// Pairwise squared distances and their minimum, maintained across swaps.
struct DistanceTable {
    n: usize,
    d2: Vec<u64>,
}

impl DistanceTable {
    fn new(cells: &[Vec<u32>]) -> Self {
        let n = cells.len();
        let mut d2 = vec![0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = cell_dist2(&cells[i], &cells[j]);
                d2[i * n + j] = v;
                d2[j * n + i] = v;
            }
        }
        Self { n, d2 }
    }

    fn get(&self, i: usize, j: usize) -> u64 {
        self.d2[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: u64) {
        self.d2[i * self.n + j] = v;
        self.d2[j * self.n + i] = v;
    }

    fn min_pairs(&self) -> (u64, Vec<(usize, usize)>) {
        let mut best = u64::MAX;
        let mut pairs = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let v = self.get(i, j);
                if v < best {
                    best = v;
                    pairs.clear();
                }
                if v == best {
                    pairs.push((i, j));
                }
            }
        }
        (best, pairs)
    }
}

/// Squared distance from `p` to `m` after coordinate `k` of `p` is replaced by `value`.
fn swapped_dist2(current: u64, cells: &[Vec<u32>], p: usize, m: usize, k: usize, value: u32) -> u64 {
    let old = i64::from(cells[p][k]) - i64::from(cells[m][k]);
    let new = i64::from(value) - i64::from(cells[m][k]);
    (current as i64 - old * old + new * new) as u64
}

/// Locally optimizes a plan for the maximin criterion by coordinate exchanges.
///
/// Candidate swaps `(i, j, k)` exchange coordinate `k` of points `i < j` and are
/// scanned lexicographically; the first swap that strictly increases the
/// minimum pairwise distance is applied and the scan restarts. The search
/// stops when no swap improves, so the result is a local optimum and the Latin
/// property is untouched. A swap can only help if it moves a point of every
/// closest pair, which lets the scan skip every other candidate without
/// changing which swap is accepted.
pub fn optimize_plan(plan: &SamplingPlan) -> SamplingPlan {
    let mut cells = plan.cells.clone();
    let n = cells.len();
    let mut table = DistanceTable::new(&cells);
    loop {
        let (current, closest) = table.min_pairs();
        let covers = |i: usize, j: usize| closest.iter().all(|&(a, b)| a == i || a == j || b == i || b == j);
        let mut accepted = None;
        'scan: for i in 0..n {
            for j in i + 1..n {
                if !covers(i, j) {
                    continue;
                }
                for k in 0..plan.dim {
                    if cells[i][k] == cells[j][k] {
                        continue;
                    }
                    let (vi, vj) = (cells[j][k], cells[i][k]);
                    // Distance between i and j is invariant under the swap.
                    let mut new_min = table.get(i, j);
                    for m in 0..n {
                        if m == i || m == j {
                            continue;
                        }
                        let di = swapped_dist2(table.get(i, m), &cells, i, m, k, vi);
                        let dj = swapped_dist2(table.get(j, m), &cells, j, m, k, vj);
                        new_min = new_min.min(di).min(dj);
                        if new_min <= current {
                            break;
                        }
                    }
                    if new_min > current {
                        accepted = Some((i, j, k));
                        break 'scan;
                    }
                }
            }
        }
        let Some((i, j, k)) = accepted else { break };
        let (vi, vj) = (cells[j][k], cells[i][k]);
        for m in 0..n {
            if m == i || m == j {
                continue;
            }
            let di = swapped_dist2(table.get(i, m), &cells, i, m, k, vi);
            let dj = swapped_dist2(table.get(j, m), &cells, j, m, k, vj);
            table.set(i, m, di);
            table.set(j, m, dj);
        }
        cells[i][k] = vi;
        cells[j][k] = vj;
    }
    SamplingPlan {
        cells,
        dim: plan.dim,
        seed: plan.seed,
    }
}

/// A low-fidelity plan together with the indices of its high-fidelity subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedDesign {
    plan: SamplingPlan,
    subset: Vec<usize>,
}

impl NestedDesign {
    pub fn new(plan: SamplingPlan, mut subset: Vec<usize>) -> Result<Self> {
        subset.sort_unstable();
        let before = subset.len();
        subset.dedup();
        if subset.len() != before {
            return Err(Error::Design("subset indices must be distinct".into()));
        }
        if subset.is_empty() || subset.iter().any(|&i| i >= plan.len()) {
            return Err(Error::Design("subset indices must be non-empty and inside the plan".into()));
        }
        Ok(Self { plan, subset })
    }

    pub fn plan(&self) -> &SamplingPlan {
        &self.plan
    }

    /// Sorted indices into the plan.
    pub fn subset_indices(&self) -> &[usize] {
        &self.subset
    }

    pub fn n_high(&self) -> usize {
        self.subset.len()
    }

    pub fn n_low(&self) -> usize {
        self.plan.len()
    }

    pub fn low_points(&self) -> Vec<Vec<f64>> {
        self.plan.points()
    }

    pub fn high_points(&self) -> Vec<Vec<f64>> {
        self.subset.iter().map(|&i| self.plan.point(i)).collect()
    }

    /// Minimum pairwise distance within the high-fidelity subset (`+inf` for one point).
    pub fn subset_min_distance(&self) -> f64 {
        match subset_min_dist2(&self.plan, &self.subset) {
            u64::MAX => f64::INFINITY,
            v => (v as f64).sqrt() / self.plan.len() as f64,
        }
    }
}

fn subset_min_dist2(plan: &SamplingPlan, subset: &[usize]) -> u64 {
    let mut best = u64::MAX;
    for (a, &i) in subset.iter().enumerate() {
        for &j in &subset[a + 1..] {
            best = best.min(plan.cell_dist2(i, j));
        }
    }
    best
}

/// Chooses `n_high` points of `plan` as a locally maximin nested subset.
///
/// Starts from a seeded random subset, then scans (inside, outside) exchanges
/// in ascending index order and applies the first one that strictly increases
/// the subset's minimum pairwise distance, restarting after each exchange.
pub fn nested_subset(plan: &SamplingPlan, n_high: usize, seed: u64) -> Result<NestedDesign> {
    let n = plan.len();
    if n_high == 0 || n_high > n {
        return Err(Error::Size(format!("n_h must lie in 1..={n}, got {n_high}")));
    }
    let mut rng = rng::seeded(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut inside = vec![false; n];
    for &i in &order[..n_high] {
        inside[i] = true;
    }

    if n_high > 1 && n_high < n {
        loop {
            let members: Vec<usize> = (0..n).filter(|&i| inside[i]).collect();
            let current = subset_min_dist2(plan, &members);
            // Removing p can only help if p belongs to every closest pair.
            let closest: Vec<(usize, usize)> = members
                .iter()
                .enumerate()
                .flat_map(|(a, &i)| members[a + 1..].iter().map(move |&j| (i, j)))
                .filter(|&(i, j)| plan.cell_dist2(i, j) == current)
                .collect();
            let mut accepted = None;
            'scan: for &p in &members {
                if !closest.iter().all(|&(a, b)| a == p || b == p) {
                    continue;
                }
                let rest: Vec<usize> = members.iter().copied().filter(|&m| m != p).collect();
                let rest_min = subset_min_dist2(plan, &rest);
                if rest_min <= current {
                    continue;
                }
                for q in (0..n).filter(|&q| !inside[q]) {
                    let to_rest = rest.iter().map(|&m| plan.cell_dist2(q, m)).min().unwrap_or(u64::MAX);
                    if to_rest.min(rest_min) > current {
                        accepted = Some((p, q));
                        break 'scan;
                    }
                }
            }
            let Some((p, q)) = accepted else { break };
            inside[p] = false;
            inside[q] = true;
        }
    }
    let subset = (0..n).filter(|&i| inside[i]).collect();
    NestedDesign::new(plan.clone(), subset)
}

/// Convenience: random LHS, maximin optimization, then a nested subset.
pub fn build_nested_design(n_high: usize, n_low: usize, dim: usize, seed: u64) -> Result<NestedDesign> {
    if n_high > n_low {
        return Err(Error::Size(format!("n_h ({n_high}) exceeds n_l ({n_low})")));
    }
    let plan = optimize_plan(&lhs_plan(n_low, dim, seed)?);
    nested_subset(&plan, n_high, rng::derive(seed, &[1]))
}

const PLAN_MAGIC: &str = "bifid-plan";
const PLAN_VERSION: u32 = 1;

/// Serializes a nested design as a versioned whitespace-separated table.
///
/// ```text
/// bifid-plan 1
/// n_l 6
/// n_h 3
/// d 1
/// seed 42
/// # cell indices (one column per dimension), then 1 if the point is in X_h
/// 0 1
/// ...
/// ```
pub fn write_plan_string(design: &NestedDesign) -> String {
    let plan = design.plan();
    let mut out = String::new();
    let _ = writeln!(out, "{PLAN_MAGIC} {PLAN_VERSION}");
    let _ = writeln!(out, "n_l {}", plan.len());
    let _ = writeln!(out, "n_h {}", design.n_high());
    let _ = writeln!(out, "d {}", plan.dim());
    let _ = writeln!(out, "seed {}", plan.seed());
    let _ = writeln!(out, "# cell indices (one column per dimension), then 1 if the point is in X_h");
    let mut member = vec![false; plan.len()];
    for &i in design.subset_indices() {
        member[i] = true;
    }
    for (i, c) in plan.cells().iter().enumerate() {
        for v in c {
            let _ = write!(out, "{v} ");
        }
        let _ = writeln!(out, "{}", u8::from(member[i]));
    }
    out
}

pub fn read_plan_str(text: &str) -> Result<NestedDesign> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };

    let (ln, magic) = lines.next().ok_or_else(|| perr(1, "empty plan file"))?;
    match magic.split_whitespace().collect::<Vec<_>>().as_slice() {
        [m, v] if *m == PLAN_MAGIC => {
            let v: u32 = v.parse().map_err(|_| perr(ln, "bad version"))?;
            if v != PLAN_VERSION {
                return Err(perr(ln, &format!("unsupported plan version {v}")));
            }
        }
        _ => return Err(perr(ln, "missing `bifid-plan` header")),
    }
    let mut header = |key: &str| -> Result<u64> {
        let (ln, l) = lines.next().ok_or_else(|| perr(0, &format!("missing `{key}`")))?;
        match l.split_whitespace().collect::<Vec<_>>().as_slice() {
            [k, v] if *k == key => v.parse().map_err(|_| perr(ln, &format!("bad value for `{key}`"))),
            _ => Err(perr(ln, &format!("expected `{key} <value>`"))),
        }
    };
    let n_low = header("n_l")? as usize;
    let n_high = header("n_h")? as usize;
    let dim = header("d")? as usize;
    let seed = header("seed")?;

    let mut cells = Vec::with_capacity(n_low);
    let mut subset = Vec::with_capacity(n_high);
    for (ln, l) in lines {
        let fields: Vec<u32> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| perr(ln, "expected integer cell indices")))
            .collect::<Result<_>>()?;
        if fields.len() != dim + 1 {
            return Err(perr(ln, &format!("expected {} fields, got {}", dim + 1, fields.len())));
        }
        if fields[dim] == 1 {
            subset.push(cells.len());
        }
        cells.push(fields[..dim].to_vec());
    }
    if cells.len() != n_low || subset.len() != n_high {
        return Err(Error::Design(format!(
            "plan declares n_l={n_low}, n_h={n_high} but lists {} points with {} in X_h",
            cells.len(),
            subset.len()
        )));
    }
    NestedDesign::new(SamplingPlan::from_cells(cells, seed)?, subset)
}

pub fn write_plan(path: &Path, design: &NestedDesign) -> Result<()> {
    std::fs::write(path, write_plan_string(design))?;
    Ok(())
}

pub fn read_plan(path: &Path) -> Result<NestedDesign> {
    read_plan_str(&std::fs::read_to_string(path)?)
}
