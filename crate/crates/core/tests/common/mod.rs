#![allow(dead_code)]

//! Brute-force reference implementations shared by the integration tests.

use std::path::PathBuf;

/// All vectors of length n over {0..c-1}, in lexicographic order.
pub fn all_label_vectors(n: usize, c: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..c).map(move |l| {
                    let mut w = v.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
    }
    out
}

/// Label vectors whose classes appear in order 0, 1, 2, …, at most c of them.
pub fn first_appearance_vectors(n: usize, c: usize) -> Vec<Vec<usize>> {
    all_label_vectors(n, c)
        .into_iter()
        .filter(|v| {
            let mut next = 0;
            v.iter().all(|&l| {
                if l == next {
                    next += 1;
                }
                l < next
            })
        })
        .collect()
}

/// NMI from the joint and marginal probability tables, geometric
/// normalization, natural logs.
pub fn nmi_oracle(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let ka = a.iter().max().unwrap() + 1;
    let kb = b.iter().max().unwrap() + 1;
    let mut counts = vec![vec![0usize; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        counts[x][y] += 1;
    }
    let joint: Vec<Vec<f64>> = counts.iter().map(|r| r.iter().map(|&c| c as f64 / n).collect()).collect();
    let pa: Vec<f64> = counts.iter().map(|r| r.iter().sum::<usize>() as f64 / n).collect();
    let pb: Vec<f64> = (0..kb).map(|j| counts.iter().map(|r| r[j]).sum::<usize>() as f64 / n).collect();
    let h = |p: &[f64]| -> f64 { p.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.ln()).sum() };
    let (ha, hb) = (h(&pa), h(&pb));
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    if ha == 0.0 || hb == 0.0 {
        return 0.0;
    }
    let mut mi = 0.0;
    for i in 0..ka {
        for j in 0..kb {
            if joint[i][j] > 0.0 {
                mi += joint[i][j] * (joint[i][j] / (pa[i] * pb[j])).ln();
            }
        }
    }
    mi / (ha * hb).sqrt()
}

pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

/// ACC by trying every one-to-one map of predicted labels onto true labels.
pub fn accuracy_oracle(pred: &[usize], truth: &[usize]) -> f64 {
    let m = (pred.iter().max().unwrap() + 1).max(truth.iter().max().unwrap() + 1);
    let best = permutations(m)
        .iter()
        .map(|p| pred.iter().zip(truth).filter(|(&x, &y)| p[x] == y).count())
        .max()
        .unwrap();
    best as f64 / pred.len() as f64
}

/// Minimum total cost over all permutations of the zero-padded square.
pub fn assignment_oracle(cost: &[Vec<f64>]) -> f64 {
    let rows = cost.len();
    let cols = cost[0].len();
    let m = rows.max(cols);
    permutations(m)
        .iter()
        .map(|p| {
            (0..m)
                .map(|i| if i < rows && p[i] < cols { cost[i][p[i]] } else { 0.0 })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Directory holding user-supplied benchmark files: `RESAMPLE_KERNEL_DATA`
/// if set, otherwise `data/` at the workspace root.
pub fn data_dir() -> PathBuf {
    std::env::var_os("RESAMPLE_KERNEL_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}
