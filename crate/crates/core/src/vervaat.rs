//! Vervaat perpetuities `Y = W1 + W1 W2 + W1 W2 W3 + ...` with `W ~ U^(1/beta)`.
//!
//! `beta = 1` is the Dickman distribution, the limit law of the normalized
//! comparison count of find-max selection.
//!
//! Two evaluators are provided for the density and distribution function:
//!
//! * [`XdfMethod::DelayEquation`] (default) integrates the delay equation
//!   `F'(x) = beta (F(x) - F(x - 1)) / x` on a fine grid, starting from the
//!   closed form `F(x) = exp(-beta*gamma) x^beta / Gamma(beta + 1)` on (0, 1].
//!   The grid carries `1 - F` so the upper tail keeps relative precision.
//!   Accuracy is around 1e-12 everywhere.
//! * [`XdfMethod::PostWidder`] inverts the Laplace transform
//!   `exp(-beta Ein(s))` with the order-`n` Post-Widder formula at
//!   `s = n / x`, following the FSDA `vervaatxdf` recursion. Its error is
//!   O(1/n); it smooths the kinks of the density at the integers.
//!
//! The Post-Widder derivatives are carried as scaled Taylor coefficients
//! `a_j = (-s)^j phi^(j)(s) / j!`, which are all in [0, 1] and obey a
//! recursion with non-negative terms only, so no digits are lost to
//! alternating sums.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::rng::MersenneTwister;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Post-Widder order used by the reference implementation.
pub const DEFAULT_SERIES_TERMS: usize = 100;

/// Grid cells per unit length for the delay-equation table.
const CELLS_PER_UNIT: usize = 1024;
const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Exponential integral `E1(s)` for `s > 0`: power series up to 1, continued
/// fraction beyond.
pub fn exp_integral_e1(s: f64) -> f64 {
    assert!(s > 0.0, "E1 needs a positive argument");
    if s <= 1.0 {
        -EULER_GAMMA - s.ln() + ein_series(s)
    } else {
        // Modified Lentz on the continued fraction of e^s E1(s).
        let tiny = 1e-300;
        let mut b = s + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-s).exp()
    }
}

/// `Ein(s) = sum_{k>=1} (-1)^(k+1) s^k / (k k!)`, fine for moderate `s`.
fn ein_series(s: f64) -> f64 {
    let mut term = 1.0; // s^k / k!
    let mut sum = 0.0;
    for k in 1..200 {
        term *= s / k as f64;
        let t = term / k as f64;
        if k % 2 == 1 {
            sum += t;
        } else {
            sum -= t;
        }
        if t < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Complementary exponential integral `Ein(s) = gamma + ln s + E1(s)`.
pub fn ein(s: f64) -> f64 {
    if s <= 1.0 {
        ein_series(s)
    } else {
        EULER_GAMMA + s.ln() + exp_integral_e1(s)
    }
}

/// Laplace transform of the Vervaat perpetuity, `exp(-beta Ein(s))`.
pub fn laplace_transform(beta: f64, s: f64) -> f64 {
    (-beta * ein(s)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XdfMethod {
    DelayEquation,
    PostWidder { n_terms: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VervaatParams {
    pub beta: f64,
    pub method: XdfMethod,
}

impl VervaatParams {
    pub fn new(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(VervaatParams {
            beta,
            method: XdfMethod::DelayEquation,
        })
    }

    /// Post-Widder series of order `n_terms` instead of the delay equation.
    pub fn series(beta: f64, n_terms: usize) -> Result<Self> {
        check_beta(beta)?;
        if n_terms == 0 {
            return Err(Error::InvalidParameter("series order must be >= 1".into()));
        }
        Ok(VervaatParams {
            beta,
            method: XdfMethod::PostWidder { n_terms },
        })
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")))
    }
}

fn check_xs(xs: &[f64]) -> Result<()> {
    match xs.iter().find(|&&x| !(x > 0.0)) {
        Some(x) => Err(Error::InvalidParameter(format!("x must be positive, got {x}"))),
        None => Ok(()),
    }
}

/// Density and distribution function at each `x` (all `x > 0`).
pub fn vervaat_pdf_cdf(params: &VervaatParams, xs: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_beta(params.beta)?;
    check_xs(xs)?;
    match params.method {
        XdfMethod::DelayEquation => {
            let table = VervaatTable::new(params.beta);
            Ok(xs.iter().map(|&x| (table.pdf(x), table.cdf(x))).unzip())
        }
        XdfMethod::PostWidder { n_terms } => Ok(xs
            .iter()
            .map(|&x| post_widder_point(params.beta, n_terms, x))
            .unzip()),
    }
}

fn dickman_table() -> &'static VervaatTable {
    static TABLE: OnceLock<VervaatTable> = OnceLock::new();
    TABLE.get_or_init(|| VervaatTable::new(1.0))
}

/// Dickman distribution function (`beta = 1`).
pub fn dickman_cdf(xs: &[f64]) -> Result<Vec<f64>> {
    check_xs(xs)?;
    let t = dickman_table();
    Ok(xs.iter().map(|&x| t.cdf(x)).collect())
}

/// Dickman density (`beta = 1`).
pub fn dickman_pdf(xs: &[f64]) -> Result<Vec<f64>> {
    check_xs(xs)?;
    let t = dickman_table();
    Ok(xs.iter().map(|&x| t.pdf(x)).collect())
}

/// `beta P(Poisson(s) >= k)` for `k = 1..=n`.
fn poisson_tail_coefficients(beta: f64, s: f64, n: usize) -> Vec<f64> {
    let ln_s = s.ln();
    let mut ln_fact = 0.0;
    let ln_pmf: Vec<f64> = (0..=n + 400)
        .map(|i| {
            if i > 0 {
                ln_fact += (i as f64).ln();
            }
            -s + i as f64 * ln_s - ln_fact
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    let mut lower = 0.0; // P(Poisson < k)
    for k in 1..=n {
        lower += ln_pmf[k - 1].exp();
        let tail = if ((k - 1) as f64) < s {
            1.0 - lower
        } else {
            let mut sum = 0.0;
            for &lp in &ln_pmf[k..] {
                let t = lp.exp();
                sum += t;
                if t <= 1e-18 * sum {
                    break;
                }
            }
            sum
        };
        out.push(beta * tail.clamp(0.0, 1.0));
    }
    out
}

/// Post-Widder density and distribution at one point.
fn post_widder_point(beta: f64, n: usize, x: f64) -> (f64, f64) {
    let s = n as f64 / x;
    let c = poisson_tail_coefficients(beta, s, n);
    let mut a = Vec::with_capacity(n + 1);
    a.push(laplace_transform(beta, s));
    for m in 0..n {
        let acc: f64 = (0..=m).map(|j| c[m - j] * a[j]).sum();
        a.push(acc / (m + 1) as f64);
    }
    let f = s * a[n];
    let big_f: f64 = a.iter().sum();
    (f, big_f)
}

/// Tabulated solution of the delay equation for one `beta`.
///
/// The survival function `G = 1 - F` obeys the same equation and is what the
/// table carries: in the upper tail `F` is 1 to within rounding, while `G`
/// keeps its relative precision, so `1 - G` stays monotone.
#[derive(Debug, Clone)]
pub struct VervaatTable {
    beta: f64,
    /// `exp(-beta gamma) / Gamma(beta)`: density constant on (0, 1].
    head: f64,
    step: f64,
    /// Grid values from x = 1 onwards: `sf[i]` at `1 + i * step`.
    sf: Vec<f64>,
    pdf: Vec<f64>,
}

impl VervaatTable {
    pub fn new(beta: f64) -> Self {
        assert!(beta > 0.0 && beta.is_finite());
        let head = (-beta * EULER_GAMMA).exp() / statrs::function::gamma::gamma(beta);
        let step = 1.0 / CELLS_PER_UNIT as f64;
        let mut t = VervaatTable {
            beta,
            head,
            step,
            sf: vec![1.0 - head / beta],
            pdf: vec![head],
        };
        let x_cap = 40.0 + 20.0 * beta;
        let mut i = 0usize;
        loop {
            let x0 = 1.0 + i as f64 * step;
            let x1 = x0 + step;
            // (G x^-beta)' = -beta G(x - 1) x^(-beta - 1), integrated over the cell
            let integral = if i == 0 {
                // G(t - 1) = 1 - c (t - 1)^beta: substitute t = 1 + step v^m
                let m = (1.0 / beta).ceil().clamp(1.0, 24.0);
                let mut acc = 0.0;
                for (node, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                    let v = 0.5 * (1.0 + node);
                    let y = step * v.powf(m);
                    let dy = step * m * v.powf(m - 1.0);
                    acc += w * t.sf(y) * (1.0 + y).powf(-beta - 1.0) * dy;
                }
                0.5 * acc
            } else {
                let half = 0.5 * step;
                let mid = x0 + half;
                let mut acc = 0.0;
                for (node, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                    let tt = mid + half * node;
                    acc += w * t.sf(tt - 1.0) * tt.powf(-beta - 1.0);
                }
                half * acc
            };
            let g1 = x1.powf(beta) * (t.sf[i] * x0.powf(-beta) - beta * integral);
            let d1 = beta * (t.sf(x1 - 1.0) - g1) / x1;
            t.sf.push(g1);
            t.pdf.push(d1);
            i += 1;
            if (x1 > beta + 2.0 && d1 * x1 < 1e-17) || x1 >= x_cap {
                break;
            }
        }
        t
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Largest tabulated abscissa; beyond it the density is treated as 0.
    pub fn support_end(&self) -> f64 {
        1.0 + (self.sf.len() - 1) as f64 * self.step
    }

    /// Survival function `1 - F(x)`.
    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if x <= 1.0 {
            return 1.0 - self.head / self.beta * x.powf(self.beta);
        }
        let u = (x - 1.0) / self.step;
        let i = u.floor() as usize;
        if i + 1 >= self.sf.len() {
            return *self.sf.last().expect("table is never empty");
        }
        // cubic Hermite on the cell using G and G' = -f at both ends
        let tau = u - i as f64;
        let (y0, y1) = (self.sf[i], self.sf[i + 1]);
        let (m0, m1) = (-self.pdf[i] * self.step, -self.pdf[i + 1] * self.step);
        let t2 = tau * tau;
        let t3 = t2 * tau;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + tau) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 1.0 {
            // direct form keeps full relative precision near 0
            return if x <= 0.0 { 0.0 } else { self.head / self.beta * x.powf(self.beta) };
        }
        1.0 - self.sf(x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x <= 1.0 {
            return self.head * x.powf(self.beta - 1.0);
        }
        if x >= self.support_end() {
            return 0.0;
        }
        self.beta * (self.sf(x - 1.0) - self.sf(x)) / x
    }
}

/// Perpetuity variates, truncating the series once the running product of
/// the `W` factors drops below `eps`.
pub fn vervaat_rnd(beta: f64, count: usize, rng: &mut MersenneTwister, eps: f64) -> Result<Vec<f64>> {
    check_beta(beta)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let inv_beta = 1.0 / beta;
    Ok((0..count)
        .map(|_| {
            let mut product = 1.0;
            let mut sum = 0.0;
            loop {
                product *= rng.next_uniform().powf(inv_beta);
                sum += product;
                if product < eps {
                    break sum;
                }
            }
        })
        .collect())
}
