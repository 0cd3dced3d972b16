use simplesel::harness::{sample, Dist};
use simplesel::medcouple::{medcouple_fast, medcouple_naive, sample_median};
use simplesel::raster::{add_salt_pepper, gradient};
use simplesel::vervaat::{vervaat_pdf_cdf, vervaat_rnd, VervaatParams, VervaatTable};
use simplesel::MersenneTwister;

#[test]
fn lognormal_median_near_one() {
    let mut rng = MersenneTwister::new(40);
    let x = sample(Dist::LogNormal { mu: 0.0, sigma: 1.0 }, 100_000, &mut rng).unwrap();
    let m = sample_median(&x).unwrap();
    assert!((m - 1.0).abs() < 0.03, "{m}");
}

#[test]
fn salt_and_pepper_rate() {
    let clean = gradient(300, 300, 3);
    let mut rng = MersenneTwister::new(41);
    let noisy = add_salt_pepper(&clean, 0.2, &mut rng).unwrap();
    let hit = noisy.samples.iter().filter(|&&v| v == 0 || v == 255).count();
    let frac = hit as f64 / noisy.samples.len() as f64;
    assert!((frac - 0.2).abs() < 0.01, "{frac}");
    let zeros = noisy.samples.iter().filter(|&&v| v == 0).count();
    assert!((zeros as f64 / hit as f64 - 0.5).abs() < 0.02);
}

#[test]
fn medcouple_lognormal_is_positive() {
    let mut rng = MersenneTwister::new(42);
    for _ in 0..20 {
        let x = sample(Dist::LogNormal { mu: 0.0, sigma: 1.0 }, 101, &mut rng).unwrap();
        assert!(medcouple_naive(&x).unwrap() > 0.0);
        assert!(medcouple_fast(&x).unwrap() > 0.0);
    }
}

#[test]
fn medcouple_negation() {
    // n = 4j + 1 without ties gives an odd number of kernel values, where the
    // lower median is the median and negation flips the sign exactly.
    let mut rng = MersenneTwister::new(43);
    for j in 1..15 {
        let x: Vec<f64> = (0..4 * j + 1).map(|_| rng.next_normal()).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(medcouple_fast(&neg).unwrap(), -medcouple_fast(&x).unwrap());
    }
}

#[test]
fn vervaat_cdf_monotone_for_several_betas() {
    for beta in [0.5, 1.0, 3.0] {
        let t = VervaatTable::new(beta);
        let mut prev = 0.0;
        let mut x = 1e-3;
        while x < t.support_end() + 5.0 {
            let f = t.cdf(x);
            assert!(f >= prev, "beta {beta}, x {x}");
            assert!(f <= 1.0 + 1e-9);
            prev = f;
            x += 1e-3;
        }
    }
}

#[test]
fn vervaat_density_is_cdf_slope() {
    for beta in [0.7, 1.0, 2.5] {
        let params = VervaatParams::new(beta).unwrap();
        let xs = [0.3, 0.9, 1.4, 2.2, 3.7];
        let h = 1e-5;
        let (pdf, _) = vervaat_pdf_cdf(&params, &xs).unwrap();
        let up: Vec<f64> = xs.iter().map(|x| x + h).collect();
        let down: Vec<f64> = xs.iter().map(|x| x - h).collect();
        let (_, cu) = vervaat_pdf_cdf(&params, &up).unwrap();
        let (_, cd) = vervaat_pdf_cdf(&params, &down).unwrap();
        for i in 0..xs.len() {
            let slope = (cu[i] - cd[i]) / (2.0 * h);
            assert!((slope - pdf[i]).abs() < 1e-3, "beta {beta} x {}: {slope} vs {}", xs[i], pdf[i]);
        }
    }
}

#[test]
fn vervaat_sampler_mean_is_beta() {
    for beta in [1.0, 2.0] {
        let mut rng = MersenneTwister::new(44);
        let y = vervaat_rnd(beta, 100_000, &mut rng, 1e-12).unwrap();
        let m = y.iter().sum::<f64>() / y.len() as f64;
        assert!((m - beta).abs() / beta < 0.02, "beta {beta}: mean {m}");
    }
}

#[test]
fn dickman_known_value() {
    // Dickman rho(2) = 1 - ln 2, and the density is e^-gamma rho(x).
    let (pdf, _) = vervaat_pdf_cdf(&VervaatParams::new(1.0).unwrap(), &[2.0, 3.0]).unwrap();
    let e = (-simplesel::vervaat::EULER_GAMMA).exp();
    assert!((pdf[0] - e * (1.0 - 2f64.ln())).abs() < 1e-10);
    // rho(3) = 0.0486083882911316...
    assert!((pdf[1] - e * 0.048_608_388_291_131_6).abs() < 1e-10);
}
