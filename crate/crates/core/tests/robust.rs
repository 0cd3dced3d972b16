use nalgebra::DMatrix;
use simplesel::robust::{
    contaminated_normal, cstep, default_h, fs_progression, mcd_approx, EllipsoidEstimate, UpdateBackend,
};
use simplesel::select::ComparisonBreakdown;
use simplesel::MersenneTwister;

#[test]
fn clean_start_stays_clean() {
    let mut rng = MersenneTwister::new(21);
    let n = 60;
    let h = default_h(n, 2);
    let mut x = contaminated_normal(n, 2, 0.0, 0.0, &mut rng).unwrap();
    // the last n - h rows become remote outliers
    for i in h..n {
        x[(i, 0)] += 50.0;
        x[(i, 1)] -= 50.0;
    }
    let clean: Vec<usize> = (0..h).collect();
    let est = EllipsoidEstimate::fit(&x, &clean).unwrap();
    let mut c = ComparisonBreakdown::default();
    for b in UpdateBackend::ALL {
        let next = cstep(&x, &est, h, b, &mut rng, &mut c).unwrap();
        assert_eq!(next.subset, clean);
    }
}

#[test]
fn tight_cluster_is_found() {
    let mut rng = MersenneTwister::new(22);
    let n = 40;
    let h = default_h(n, 2);
    let mut x = DMatrix::zeros(n, 2);
    for i in 0..n {
        for j in 0..2 {
            x[(i, j)] = if i < h { 5.0 + 1e-3 * rng.next_normal() } else { 3.0 * rng.next_normal() };
        }
    }
    let fit = mcd_approx(&x, h, 20, &mut rng, UpdateBackend::Select).unwrap();
    assert_eq!(fit.best.subset, (0..h).collect::<Vec<_>>());
    assert!(fit.best.det < 1e-10);
}

#[test]
fn backends_give_identical_mcd() {
    for rep in 0..10 {
        let mut data_rng = MersenneTwister::new(300 + rep);
        let x = contaminated_normal(80, 2, 0.25, 4.0, &mut data_rng).unwrap();
        let fits: Vec<_> = UpdateBackend::ALL
            .iter()
            .map(|&b| mcd_approx(&x, default_h(80, 2), 10, &mut MersenneTwister::new(rep), b).unwrap())
            .collect();
        for f in &fits[1..] {
            assert_eq!(f.best.subset, fits[0].best.subset);
            assert_eq!(f.best.log_det, fits[0].best.log_det);
        }
    }
}

#[test]
fn centred_on_clean_group_under_heavy_contamination() {
    let runs = 200;
    let n = 100;
    let h = default_h(n, 2);
    let bound = 3.0 / (h as f64).sqrt();
    let mut hits = 0;
    for rep in 0..runs {
        let mut rng = MersenneTwister::new(5000 + rep);
        let x = contaminated_normal(n, 2, 0.4, 10.0, &mut rng).unwrap();
        let fit = mcd_approx(&x, h, 10, &mut rng, UpdateBackend::Select).unwrap();
        if fit.best.mu.iter().all(|m| m.abs() < bound) {
            hits += 1;
        }
    }
    assert!(hits as f64 >= 0.95 * runs as f64, "{hits}/{runs}");
}

#[test]
fn random_hint_does_not_help_mcd() {
    // mean reduction of total comparisons stays within 5% either way
    let (mut plain, mut hinted) = (0u64, 0u64);
    for rep in 0..60 {
        let mut data_rng = MersenneTwister::new(900 + rep);
        let eps = 0.4 * data_rng.next_uniform();
        let x = contaminated_normal(100, 2, eps, 5.0, &mut data_rng).unwrap();
        let h = default_h(100, 2);
        let a = mcd_approx(&x, h, 10, &mut MersenneTwister::new(rep), UpdateBackend::Select).unwrap();
        let b = mcd_approx(&x, h, 10, &mut MersenneTwister::new(rep), UpdateBackend::SelectOracle).unwrap();
        assert_eq!(a.best.subset, b.best.subset);
        plain += a.counts.total();
        hinted += b.counts.total();
    }
    let reduction = 1.0 - hinted as f64 / plain as f64;
    assert!(reduction.abs() <= 0.05, "reduction {reduction}");
}

#[test]
fn forward_search_backend_sweep() {
    for rep in 0..100 {
        let mut rng = MersenneTwister::new(7000 + rep);
        let eps = 0.3 * rng.next_uniform();
        let x = contaminated_normal(40, 2, eps, 4.0, &mut rng).unwrap();
        let sorted = fs_progression(&x, 3, UpdateBackend::Sort).unwrap();
        let hinted = fs_progression(&x, 3, UpdateBackend::SelectOracle).unwrap();
        assert_eq!(sorted.len(), hinted.len());
        for (a, b) in sorted.iter().zip(&hinted) {
            assert_eq!(a.state, b.state);
        }
        for w in sorted.windows(2) {
            assert_eq!(w[1].state.m, w[0].state.m + 1);
        }
    }
}

#[test]
fn mahalanobis_rejects_near_singular_scatter() {
    let x = DMatrix::from_row_slice(4, 2, &[0., 0., 1., 1., 2., 2.0 + 1e-9, 3., 3.]);
    assert!(EllipsoidEstimate::fit(&x, &[0, 1, 2, 3]).is_err());
}
