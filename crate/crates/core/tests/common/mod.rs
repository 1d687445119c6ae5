#![allow(dead_code, clippy::needless_range_loop)]

use dpscd::data::{center_labels, generate, normalize, normalize_rows, Dataset, SyntheticSpec, Task};

pub const LAMBDA: f64 = 0.1;

/// Normalized, centered synthetic ridge instance.
pub fn ridge_instance(n: usize, m: usize, seed: u64) -> Dataset {
    let (raw, _) = generate(&SyntheticSpec::new(n, m, Task::Regression, seed).label_noise(0.5));
    let (centered, _) = center_labels(&normalize(&raw).dataset);
    centered
}

/// The same instance with unit-norm feature rows instead.
pub fn row_normalized_ridge(n: usize, m: usize, seed: u64) -> Dataset {
    let (raw, _) = generate(&SyntheticSpec::new(n, m, Task::Regression, seed).label_noise(0.5));
    let (centered, _) = center_labels(&raw);
    normalize_rows(&centered).0
}

pub fn classification_instance(n: usize, m: usize, seed: u64) -> Dataset {
    let (raw, _) = generate(&SyntheticSpec::new(n, m, Task::Classification, seed).label_noise(0.3));
    normalize(&raw).dataset
}

/// Ridge optimum from the normal equations `(XXᵀ/N + λI) θ = Xy/N`, solved by
/// Cholesky factorization on dense copies.
pub fn ridge_optimum(data: &Dataset, lambda: f64) -> Vec<f64> {
    let m = data.n_features();
    let n = data.n_examples() as f64;
    let cols = data.matrix().to_dense_columns();
    let mut a = vec![vec![0.0; m]; m];
    let mut b = vec![0.0; m];
    for (x, &y) in cols.iter().zip(data.labels()) {
        for r in 0..m {
            b[r] += x[r] * y / n;
            for c in 0..m {
                a[r][c] += x[r] * x[c] / n;
            }
        }
    }
    for r in 0..m {
        a[r][r] += lambda;
    }
    let mut l = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                l[i][j] = (a[i][i] - s).sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    let mut z = vec![0.0; m];
    for i in 0..m {
        let s: f64 = (0..i).map(|k| l[i][k] * z[k]).sum();
        z[i] = (b[i] - s) / l[i][i];
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let s: f64 = (i + 1..m).map(|k| l[k][i] * x[k]).sum();
        x[i] = (z[i] - s) / l[i][i];
    }
    x
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
