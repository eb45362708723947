//! Brute-force reference implementations and fixtures shared by the
//! integration tests. Written independently of the library code paths.
#![allow(dead_code)]

pub mod wilcoxon_fixtures;

use bifid_core::filtering::InstanceMetadataRow;
use bifid_core::sampling::SamplingPlan;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(lo..hi)).collect()
}

pub fn random_points(r: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| random_vec(r, d, 0.0, 1.0)).collect()
}

/// Pearson r via raw sums of squares and cross products.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        let (a, b) = (x[i] - mx, y[i] - my);
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    sxy / (sxx * syy).sqrt()
}

pub fn cc(l: &[f64], h: &[f64]) -> f64 {
    pearson(l, h).powi(2)
}

pub fn rmse(l: &[f64], h: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..l.len() {
        s += (l[i] - h[i]) * (l[i] - h[i]);
    }
    (s / l.len() as f64).sqrt()
}

pub fn rrmse(l: &[f64], h: &[f64]) -> f64 {
    let max = h.iter().cloned().fold(f64::MIN, f64::max);
    let min = h.iter().cloned().fold(f64::MAX, f64::min);
    rmse(l, h) / (max - min)
}

/// Weighted correlation with weights normalized to sum to one first.
pub fn wcc(l: &[f64], h: &[f64], w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|v| v / total).collect();
    let ml: f64 = (0..l.len()).map(|i| p[i] * l[i]).sum();
    let mh: f64 = (0..l.len()).map(|i| p[i] * h[i]).sum();
    let cov: f64 = (0..l.len()).map(|i| p[i] * (l[i] - ml) * (h[i] - mh)).sum();
    let vl: f64 = (0..l.len()).map(|i| p[i] * (l[i] - ml).powi(2)).sum();
    let vh: f64 = (0..l.len()).map(|i| p[i] * (h[i] - mh).powi(2)).sum();
    (cov / (vl * vh).sqrt()).powi(2)
}

pub fn lcc_at(x: &[Vec<f64>], l: &[f64], h: &[f64], centre: &[f64], r: f64) -> Option<f64> {
    let d = centre.len() as f64;
    let mut w = Vec::new();
    for p in x {
        let mut s = 0.0;
        for k in 0..p.len() {
            s += (p[k] - centre[k]).powi(2);
        }
        let v = 1.0 - s.sqrt() / (r * d.sqrt());
        w.push(if v > 0.0 { v } else { 0.0 });
    }
    if w.iter().filter(|v| **v > 0.0).count() < 2 {
        return None;
    }
    Some(wcc(l, h, &w))
}

/// (proportions at each threshold, mean, sd, coefficient of variation).
pub fn lcc_family(x: &[Vec<f64>], l: &[f64], h: &[f64], r: f64, ps: &[f64]) -> (Vec<f64>, f64, f64, f64) {
    let vals: Vec<f64> = x.iter().filter_map(|c| lcc_at(x, l, h, c, r)).collect();
    let n = vals.len() as f64;
    let props = ps.iter().map(|p| vals.iter().filter(|v| **v >= *p).count() as f64 / n).collect();
    let mean = vals.iter().sum::<f64>() / n;
    let sd = if vals.len() > 1 {
        (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (props, mean, sd, if mean > 0.0 { sd / mean } else { 0.0 })
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Adjusted R^2 through the normal equations.
pub fn adjusted_r2(x: &[Vec<f64>], y: &[f64], interactions: bool) -> f64 {
    let rows: Vec<Vec<f64>> = x
        .iter()
        .map(|p| {
            let mut r = vec![1.0];
            r.extend_from_slice(p);
            if interactions {
                for i in 0..p.len() {
                    for j in i + 1..p.len() {
                        r.push(p[i] * p[j]);
                    }
                }
            }
            r
        })
        .collect();
    let m = rows[0].len();
    let mut ata = vec![vec![0.0; m]; m];
    let mut aty = vec![0.0; m];
    for (r, yi) in rows.iter().zip(y) {
        for i in 0..m {
            aty[i] += r[i] * yi;
            for j in 0..m {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let beta = gauss_solve(ata, aty);
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let mut sse = 0.0;
    let mut sst = 0.0;
    for (r, yi) in rows.iter().zip(y) {
        let fit: f64 = r.iter().zip(&beta).map(|(a, b)| a * b).sum();
        sse += (yi - fit).powi(2);
        sst += (yi - mean).powi(2);
    }
    1.0 - (sse / sst) * (n - 1.0) / (n - m as f64)
}

pub fn uniformity(f: &[Vec<f64>]) -> f64 {
    let n = f.len();
    let mut nn = vec![f64::INFINITY; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d: f64 = f[i].iter().zip(&f[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                if d < nn[i] {
                    nn[i] = d;
                }
            }
        }
    }
    let mean = nn.iter().sum::<f64>() / n as f64;
    let var = nn.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    1.0 - var.sqrt() / mean
}

/// Lower-tail signed-rank p-value by enumerating all 2^n sign patterns.
pub fn signed_rank_enumerate(d: &[f64]) -> f64 {
    let n = d.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs()));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && d[idx[j + 1]].abs() == d[idx[i]].abs() {
            j += 1;
        }
        for k in i..=j {
            ranks[idx[k]] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    let nz: Vec<f64> = (0..n).filter(|&k| d[k] != 0.0).map(|k| ranks[k]).collect();
    let obs: f64 = (0..n).filter(|&k| d[k] > 0.0).map(|k| ranks[k]).sum();
    let m = nz.len();
    let mut count = 0u64;
    for mask in 0u64..(1 << m) {
        let t: f64 = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| nz[b]).sum();
        if t <= obs + 1e-9 {
            count += 1;
        }
    }
    count as f64 / (1u64 << m) as f64
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Greedy removal over rows sorted by (tier desc, id desc).
pub fn greedy_filter(rows: &[InstanceMetadataRow], theta: f64, label_aware: bool) -> Vec<String> {
    let mut order: Vec<&InstanceMetadataRow> = rows.iter().collect();
    order.sort_by(|a, b| (b.priority_tier, &b.instance_id).cmp(&(a.priority_tier, &a.instance_id)));
    let mut alive: Vec<&str> = rows.iter().map(|r| r.instance_id.as_str()).collect();
    for r in order {
        let close = rows.iter().any(|o| {
            o.instance_id != r.instance_id
                && alive.contains(&o.instance_id.as_str())
                && dist(&o.features, &r.features) <= theta
                && (!label_aware || o.delta == r.delta)
        });
        if close {
            alive.retain(|id| *id != r.instance_id);
        }
    }
    rows.iter().filter(|r| alive.contains(&r.instance_id.as_str())).map(|r| r.instance_id.clone()).collect()
}

pub fn random_rows(seed: u64, n: usize, dim: usize, tiers: u32) -> Vec<InstanceMetadataRow> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| InstanceMetadataRow {
            instance_id: format!("inst{i:04}"),
            features: random_vec(&mut r, dim, -2.0, 2.0),
            delta: vec![r.gen_bool(0.5), r.gen_bool(0.5)],
            priority_tier: r.gen_range(0..tiers),
        })
        .collect()
}

pub fn plan_min_dist2(cells: &[Vec<u32>]) -> u64 {
    let mut best = u64::MAX;
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let d: u64 = cells[i].iter().zip(&cells[j]).map(|(a, b)| (i64::from(*a) - i64::from(*b)).pow(2) as u64).sum();
            best = best.min(d);
        }
    }
    best
}

/// Naive coordinate-exchange maximin: full lexicographic scan, first strict
/// improvement, restart.
pub fn naive_optimize(plan: &SamplingPlan) -> Vec<Vec<u32>> {
    let mut cells = plan.cells().to_vec();
    let n = cells.len();
    loop {
        let cur = plan_min_dist2(&cells);
        let mut moved = false;
        'scan: for i in 0..n {
            for j in i + 1..n {
                for k in 0..plan.dim() {
                    let mut c = cells.clone();
                    let t = c[i][k];
                    c[i][k] = c[j][k];
                    c[j][k] = t;
                    if plan_min_dist2(&c) > cur {
                        cells = c;
                        moved = true;
                        break 'scan;
                    }
                }
            }
        }
        if !moved {
            return cells;
        }
    }
}

/// True when no single coordinate exchange raises the minimum distance.
pub fn is_swap_optimal(cells: &[Vec<u32>]) -> bool {
    let cur = plan_min_dist2(cells);
    let d = cells[0].len();
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            for k in 0..d {
                let mut c = cells.to_vec();
                let t = c[i][k];
                c[i][k] = c[j][k];
                c[j][k] = t;
                if plan_min_dist2(&c) > cur {
                    return false;
                }
            }
        }
    }
    true
}

pub fn subset_min_dist2(cells: &[Vec<u32>], subset: &[usize]) -> u64 {
    let s: Vec<Vec<u32>> = subset.iter().map(|&i| cells[i].clone()).collect();
    if s.len() < 2 {
        return u64::MAX;
    }
    plan_min_dist2(&s)
}
