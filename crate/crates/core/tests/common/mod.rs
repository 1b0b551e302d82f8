//! Shared fixtures and small independent reference implementations.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use rpens_core::LabeledDataset;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, p: usize) -> Vec<f64> {
    (0..p).map(|_| rng.sample(StandardNormal)).collect()
}

/// Two Gaussian classes with identity covariance; class 1 is shifted by `shift`
/// in every coordinate. Labels alternate so both classes are present.
pub fn two_class(n: usize, p: usize, shift: f64, seed: u64) -> LabeledDataset {
    let mut r = rng(seed);
    let mut features = Vec::with_capacity(n * p);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let y = (i % 2) as u8;
        for _ in 0..p {
            let z: f64 = r.sample(StandardNormal);
            features.push(z + shift * y as f64);
        }
        labels.push(y);
    }
    LabeledDataset::new(features, p, labels).unwrap()
}

/// Like [`two_class`] but with labels drawn at random (class 1 with probability `pi1`).
pub fn random_labels(n: usize, p: usize, shift: f64, pi1: f64, seed: u64) -> LabeledDataset {
    let mut r = rng(seed);
    let mut features = Vec::with_capacity(n * p);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let y = u8::from(r.random::<f64>() < pi1);
        for _ in 0..p {
            let z: f64 = r.sample(StandardNormal);
            features.push(z + shift * y as f64);
        }
        labels.push(y);
    }
    LabeledDataset::new(features, p, labels).unwrap()
}

pub type Mat = Vec<Vec<f64>>;

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(a: &Mat) -> Mat {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs())).unwrap();
        m.swap(c, piv);
        let d = m[c][c];
        assert!(d.abs() > 1e-300, "singular matrix");
        for v in m[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn mat_vec(a: &Mat, v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Plug-in estimates computed with plain loops: priors, class means, pooled
/// covariance over `n - 2` and per-class covariances over `n_r - 1`.
pub struct NaiveFit {
    pub pi: [f64; 2],
    pub mu: [Vec<f64>; 2],
    pub pooled: Mat,
    pub class_cov: [Mat; 2],
}

pub fn naive_fit(data: &LabeledDataset) -> NaiveFit {
    let p = data.dim();
    let n = data.n();
    let mut counts = [0usize; 2];
    let mut mu = [vec![0.0; p], vec![0.0; p]];
    for i in 0..n {
        let y = data.label(i) as usize;
        counts[y] += 1;
        for j in 0..p {
            mu[y][j] += data.row(i)[j];
        }
    }
    for r in 0..2 {
        for v in mu[r].iter_mut() {
            *v /= counts[r] as f64;
        }
    }
    let mut scatter = [vec![vec![0.0; p]; p], vec![vec![0.0; p]; p]];
    for i in 0..n {
        let y = data.label(i) as usize;
        let x = data.row(i);
        for a in 0..p {
            for b in 0..p {
                scatter[y][a][b] += (x[a] - mu[y][a]) * (x[b] - mu[y][b]);
            }
        }
    }
    let pooled = (0..p)
        .map(|a| (0..p).map(|b| (scatter[0][a][b] + scatter[1][a][b]) / (n - 2) as f64).collect())
        .collect();
    let class_cov = [0, 1].map(|r| {
        scatter[r]
            .iter()
            .map(|row| row.iter().map(|v| v / (counts[r] as f64 - 1.0)).collect())
            .collect()
    });
    NaiveFit { pi: [counts[0] as f64 / n as f64, counts[1] as f64 / n as f64], mu, pooled, class_cov }
}

/// LDA discriminant from the naive fit.
pub fn naive_lda_score(fit: &NaiveFit, x: &[f64]) -> f64 {
    let inv = inverse(&fit.pooled);
    let diff: Vec<f64> = fit.mu[1].iter().zip(&fit.mu[0]).map(|(a, b)| a - b).collect();
    let mid: Vec<f64> = fit.mu[1].iter().zip(&fit.mu[0]).map(|(a, b)| 0.5 * (a + b)).collect();
    let w = mat_vec(&inv, &diff);
    let centred: Vec<f64> = x.iter().zip(&mid).map(|(a, b)| a - b).collect();
    (fit.pi[1] / fit.pi[0]).ln() + dot(&centred, &w)
}

/// Determinant by LU elimination.
pub fn det(a: &Mat) -> f64 {
    let n = a.len();
    let mut m = a.clone();
    let mut d = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs())).unwrap();
        if piv != c {
            m.swap(c, piv);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    d
}

pub fn naive_qda_score(fit: &NaiveFit, x: &[f64]) -> f64 {
    let q = |r: usize| {
        let inv = inverse(&fit.class_cov[r]);
        let c: Vec<f64> = x.iter().zip(&fit.mu[r]).map(|(a, b)| a - b).collect();
        dot(&c, &mat_vec(&inv, &c))
    };
    (fit.pi[1] / fit.pi[0]).ln() - 0.5 * (det(&fit.class_cov[1]).ln() - det(&fit.class_cov[0]).ln())
        - 0.5 * (q(1) - q(0))
}

/// kNN by full sort of `(squared distance, index)`; vote ties go to the
/// larger training class, then to class 0.
pub fn naive_knn(train: &LabeledDataset, k: usize, x: &[f64], skip: Option<usize>) -> u8 {
    let mut d: Vec<(f64, usize)> = (0..train.n())
        .filter(|&i| Some(i) != skip)
        .map(|i| (train.row(i).iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let ones = d[..k].iter().filter(|(_, i)| train.label(*i) == 1).count();
    let zeros = k - ones;
    if ones != zeros {
        return u8::from(ones > zeros);
    }
    let mut counts = [0usize; 2];
    for i in (0..train.n()).filter(|&i| Some(i) != skip) {
        counts[train.label(i) as usize] += 1;
    }
    u8::from(counts[1] > counts[0])
}

pub fn frobenius(a: &nalgebra::DMatrix<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}
