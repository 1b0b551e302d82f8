mod common;

use proptest::prelude::*;

use rpens_core::projection::{check_distortion, jl_dimension_bound, sample_sparse, JlParams};
use rpens_core::{Error, LabeledDataset, Projection, ProjectionFamily, RngSeed};

fn entries(family: ProjectionFamily, d: usize, p: usize, draws: u64) -> Vec<f64> {
    (0..draws).flat_map(|s| family.sample(d, p, RngSeed(s)).unwrap().entries().to_vec()).collect()
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0))
}

#[test]
fn gaussian_entry_moments() {
    // 50 000 entries of N(0, 1/50): sd of the mean ~ 6e-4, sd of the variance ~ 1.3e-4
    let (p, d) = (50, 20);
    let v = entries(ProjectionFamily::Gaussian, d, p, 50);
    let (m, var) = mean_var(&v);
    assert!(m.abs() < 3e-3, "mean {m}");
    assert!((var - 1.0 / p as f64).abs() < 7e-4, "variance {var}");
    // fourth moment of N(0, s^2) is 3 s^4
    let m4 = v.iter().map(|x| x.powi(4)).sum::<f64>() / v.len() as f64;
    assert!((m4 / (3.0 / (p * p) as f64) - 1.0).abs() < 0.05, "fourth moment ratio {}", m4 * (p * p) as f64 / 3.0);
}

#[test]
fn gaussian_row_norms_concentrate() {
    // |row|^2 is chi^2_p / p: mean 1, variance 2/p
    let p = 200;
    let norms: Vec<f64> = (0..400)
        .map(|s| {
            let a = ProjectionFamily::Gaussian.sample(1, p, RngSeed(1000 + s)).unwrap();
            a.row(0).iter().map(|x| x * x).sum()
        })
        .collect();
    let (m, var) = mean_var(&norms);
    assert!((m - 1.0).abs() < 0.025, "mean {m}");
    assert!((var / (2.0 / p as f64) - 1.0).abs() < 0.25, "variance {var}");
}

#[test]
fn haar_rows_are_orthonormal() {
    for (d, p, s) in [(1, 1, 0), (1, 7, 1), (3, 3, 2), (5, 40, 3), (20, 20, 4)] {
        let a = ProjectionFamily::Haar.sample(d, p, RngSeed(s)).unwrap().matrix();
        let gram = &a * a.transpose();
        let dev = gram - nalgebra::DMatrix::<f64>::identity(d, d);
        assert!(common::frobenius(&dev) < 1e-10, "d={d} p={p}");
    }
}

fn ks_uniform(mut xs: Vec<f64>, lo: f64, hi: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn haar_coordinates_are_uniform_on_the_sphere() {
    // a uniform point on S^2 has each coordinate Uniform(-1, 1); the 1% KS
    // critical value for 4000 draws is 1.63 / sqrt(4000) ~ 0.026
    for coord in [0, 2] {
        let xs: Vec<f64> = (0..4000)
            .map(|s| ProjectionFamily::Haar.sample(1, 3, RngSeed(s)).unwrap().row(0)[coord])
            .collect();
        let ks = ks_uniform(xs, -1.0, 1.0);
        assert!(ks < 0.026, "coordinate {coord}: KS {ks}");
    }
    // second row of a 2 x 3 draw is marginally uniform as well
    let xs: Vec<f64> =
        (0..4000).map(|s| ProjectionFamily::Haar.sample(2, 3, RngSeed(s)).unwrap().row(1)[1]).collect();
    assert!(ks_uniform(xs, -1.0, 1.0) < 0.026);
}

#[test]
fn haar_entries_have_second_moment_one_over_p() {
    let p = 12;
    let v = entries(ProjectionFamily::Haar, 4, p, 2000);
    let m2 = v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
    assert!((m2 * p as f64 - 1.0).abs() < 0.03, "{m2}");
    let m1 = v.iter().sum::<f64>() / v.len() as f64;
    assert!(m1.abs() < 0.01);
}

#[test]
fn axis_aligned_structure_and_uniformity() {
    let (d, p, draws) = (3, 10, 6000);
    let mut hits = vec![0usize; p];
    for s in 0..draws {
        let a = ProjectionFamily::AxisAligned.sample(d, p, RngSeed(s)).unwrap();
        let mut chosen = Vec::new();
        for i in 0..d {
            let row = a.row(i);
            assert_eq!(row.iter().filter(|&&v| v == 1.0).count(), 1);
            assert_eq!(row.iter().filter(|&&v| v == 0.0).count(), p - 1);
            chosen.push(row.iter().position(|&v| v == 1.0).unwrap());
        }
        let mut sorted = chosen.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), d, "rows must select distinct coordinates");
        for c in chosen {
            hits[c] += 1;
        }
    }
    // each coordinate appears with probability d/p = 0.3: expected 1800, sd ~ 35
    for h in hits {
        assert!((h as f64 - 1800.0).abs() < 175.0, "{h}");
    }
}

#[test]
fn sparse_entries_follow_the_three_point_law() {
    let (d, p, s) = (10, 100, 4.0);
    let v: Vec<f64> = (0..50).flat_map(|seed| sample_sparse(d, p, s, RngSeed(seed)).unwrap().entries().to_vec()).collect();
    let mag = (s / p as f64).sqrt();
    assert!(v.iter().all(|&x| x == 0.0 || (x.abs() - mag).abs() < 1e-15));
    let zeros = v.iter().filter(|&&x| x == 0.0).count() as f64 / v.len() as f64;
    // P(0) = 1 - 1/s = 0.75 over 50 000 entries: sd ~ 0.002
    assert!((zeros - 0.75).abs() < 0.01, "{zeros}");
    let m2 = v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
    assert!((m2 * p as f64 - 1.0).abs() < 0.04, "{m2}");
    let positive = v.iter().filter(|&&x| x > 0.0).count() as f64;
    let negative = v.iter().filter(|&&x| x < 0.0).count() as f64;
    assert!((positive / (positive + negative) - 0.5).abs() < 0.02);
}

#[test]
fn sparse_default_uses_root_p() {
    let a = ProjectionFamily::Sparse { s: None }.sample(2, 16, RngSeed(5)).unwrap();
    let b = sample_sparse(2, 16, 4.0, RngSeed(5)).unwrap();
    assert_eq!(a.entries(), b.entries());
}

#[test]
fn sampling_is_deterministic_per_seed() {
    for f in [
        ProjectionFamily::Gaussian,
        ProjectionFamily::Haar,
        ProjectionFamily::AxisAligned,
        ProjectionFamily::Sparse { s: Some(3.0) },
    ] {
        assert_eq!(f.sample(3, 9, RngSeed(11)).unwrap(), f.sample(3, 9, RngSeed(11)).unwrap());
        assert_ne!(f.sample(3, 9, RngSeed(11)).unwrap().entries(), f.sample(3, 9, RngSeed(12)).unwrap().entries());
    }
}

#[test]
fn project_matches_row_by_row_application() {
    let data = common::two_class(15, 6, 1.0, 3);
    let a = ProjectionFamily::Gaussian.sample(2, 6, RngSeed(9)).unwrap();
    let z = rpens_core::project(&a, &data).unwrap();
    assert_eq!(z.labels(), data.labels());
    for i in 0..data.n() {
        let expected: Vec<f64> = (0..2).map(|r| common::dot(a.row(r), data.row(i))).collect();
        for (u, v) in z.row(i).iter().zip(&expected) {
            assert!((u - v).abs() < 1e-12);
        }
    }
    let wrong = ProjectionFamily::Gaussian.sample(2, 5, RngSeed(9)).unwrap();
    assert_eq!(rpens_core::project(&wrong, &data).unwrap_err(), Error::DimMismatch { expected: 5, found: 6 });
}

#[test]
fn jl_bound_examples() {
    assert_eq!(jl_dimension_bound(&JlParams::new(0.1, 0.01, 1000).unwrap()), 18422);
    assert_eq!(jl_dimension_bound(&JlParams::new(0.5, 0.5, 2).unwrap()), 90);
    assert_eq!(jl_dimension_bound(&JlParams::new(0.5, 0.1, 50).unwrap()), 399);
    assert!(JlParams::new(0.0, 0.1, 5).is_err());
    assert!(JlParams::new(0.5, 1.0, 5).is_err());
    assert!(JlParams::new(0.5, 0.1, 1).is_err());
}

#[test]
fn jl_guarantee_holds_empirically() {
    let (n, p, eps, delta) = (20, 300, 0.5, 0.2);
    let d = jl_dimension_bound(&JlParams::new(eps, delta, n).unwrap());
    assert!(d <= p);
    let trials = 40;
    let good = (0..trials)
        .filter(|&t| {
            let mut r = common::rng(77 + t);
            let pts: Vec<Vec<f64>> = (0..n).map(|_| common::normal_vec(&mut r, p)).collect();
            let a = ProjectionFamily::Gaussian.sample(d, p, RngSeed(500 + t)).unwrap();
            check_distortion(&a, &pts).unwrap().within(eps)
        })
        .count();
    assert!(good as f64 >= (1.0 - delta) * trials as f64, "{good}/{trials}");
}

#[test]
fn distortion_of_identity_and_duplicates() {
    let pts = vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![-1.0, 0.5]];
    let r = check_distortion(&Projection::identity(2).unwrap(), &pts).unwrap();
    assert_eq!((r.min_ratio, r.max_ratio, r.pairs), (1.0, 1.0, 3));
    let dup = vec![vec![0.0, 1.0], vec![0.0, 1.0]];
    assert_eq!(
        check_distortion(&Projection::identity(2).unwrap(), &dup).unwrap_err(),
        Error::DuplicatePoints { i: 0, j: 1 }
    );
}

#[test]
fn projection_serde_round_trip() {
    let a = ProjectionFamily::Haar.sample(3, 8, RngSeed(4)).unwrap();
    let json = serde_json::to_string(&a).unwrap();
    let b: Projection = serde_json::from_str(&json).unwrap();
    assert_eq!(a, b);
    let data = LabeledDataset::new(vec![1.0; 8], 8, vec![0]).unwrap();
    assert_eq!(rpens_core::project(&a, &data).unwrap(), rpens_core::project(&b, &data).unwrap());
}

proptest! {
    #[test]
    fn projection_is_linear(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0, xs in prop::collection::vec(-5.0f64..5.0, 16)) {
        let (x, y) = xs.split_at(8);
        let proj = ProjectionFamily::Gaussian.sample(3, 8, RngSeed(seed)).unwrap();
        let combo: Vec<f64> = x.iter().zip(y).map(|(u, v)| a * u + b * v).collect();
        let lhs = proj.apply(&combo).unwrap();
        let ax = proj.apply(x).unwrap();
        let ay = proj.apply(y).unwrap();
        for i in 0..3 {
            let rhs = a * ax[i] + b * ay[i];
            prop_assert!((lhs[i] - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn haar_preserves_norms_when_square(seed in 0u64..1000, xs in prop::collection::vec(-5.0f64..5.0, 6)) {
        let q = ProjectionFamily::Haar.sample(6, 6, RngSeed(seed)).unwrap();
        let z = q.apply(&xs).unwrap();
        let nx: f64 = xs.iter().map(|v| v * v).sum();
        let nz: f64 = z.iter().map(|v| v * v).sum();
        prop_assert!((nx - nz).abs() <= 1e-10 * (1.0 + nx));
    }

    #[test]
    fn jl_bound_is_monotone(n in 2usize..5000, eps in 0.05f64..0.95, delta in 0.01f64..0.95) {
        let base = jl_dimension_bound(&JlParams::new(eps, delta, n).unwrap());
        prop_assert!(jl_dimension_bound(&JlParams::new(eps, delta, n + 1).unwrap()) >= base);
        prop_assert!(jl_dimension_bound(&JlParams::new((eps + 0.04).min(0.99), delta, n).unwrap()) <= base);
        prop_assert!(jl_dimension_bound(&JlParams::new(eps, (delta + 0.04).min(0.99), n).unwrap()) <= base);
        // strictly above the real-valued bound
        prop_assert!(base as f64 > 16.0 * (n as f64 / delta).ln() / (eps * eps));
    }
}
