//! Self-contained statistical kernel: two-sample Kolmogorov-Smirnov,
//! Pearson correlation, one-sample t-test, ordinary least squares, and
//! ECDF utilities.
//!
//! Tail probabilities go through the regularized incomplete beta
//! function evaluated with Lentz's continued fraction (|err| < 1e-12),
//! so the kernel has no dependency on an external stats crate.

use crate::error::{Error, Result};

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub n_x: usize,
    pub n_y: usize,
    pub method: &'static str,
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection formula
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Continued fraction for the incomplete beta function (modified
/// Lentz's method).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "beta_reg requires positive parameters");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Two-sided p-value of a Student-t statistic with `nu` degrees of freedom.
pub fn student_t_two_sided(t: f64, nu: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    let x = nu / (nu + t * t);
    beta_reg(nu / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Survival function Q(lambda) of the Kolmogorov distribution,
/// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
///
/// Below lambda ~ 1.18 the alternating series converges slowly, so the
/// Jacobi-transformed theta series is used there instead.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        let pi = std::f64::consts::PI;
        let t = pi * pi / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for j in (1..100u32).step_by(2) {
            let term = (-(j as f64) * (j as f64) * t).exp();
            cdf += term;
            if term < 1e-18 {
                break;
            }
        }
        cdf *= (2.0 * pi).sqrt() / lambda;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sf = 0.0;
        let mut sign = 1.0;
        for k in 1..100u32 {
            let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
            sf += sign * term;
            sign = -sign;
            if term < 1e-18 {
                break;
            }
        }
        (2.0 * sf).clamp(0.0, 1.0)
    }
}

fn check_sample(name: &str, s: &[f64]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::Stats(format!("empty sample {name}")));
    }
    Ok(())
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    v
}

/// Fraction of the sorted sample that is <= v.
fn ecdf_at(sorted_sample: &[f64], v: f64) -> f64 {
    let n = sorted_sample.len();
    let k = sorted_sample.partition_point(|&s| s <= v);
    k as f64 / n as f64
}

/// Two-sample Kolmogorov-Smirnov test.
///
/// D is the supremum ECDF distance over the pooled support; the p-value
/// uses the asymptotic Kolmogorov distribution with effective size
/// n_x * n_y / (n_x + n_y).
pub fn ks_two_sample(x: &[f64], y: &[f64]) -> Result<TestResult> {
    check_sample("x", x)?;
    check_sample("y", y)?;
    let xs = sorted(x);
    let ys = sorted(y);
    let mut d: f64 = 0.0;
    for &v in xs.iter().chain(ys.iter()) {
        let diff = (ecdf_at(&xs, v) - ecdf_at(&ys, v)).abs();
        if diff > d {
            d = diff;
        }
    }
    let ne = (xs.len() as f64 * ys.len() as f64) / (xs.len() + ys.len()) as f64;
    let p = kolmogorov_sf(ne.sqrt() * d);
    Ok(TestResult {
        statistic: d,
        p_value: p,
        n_x: xs.len(),
        n_y: ys.len(),
        method: "ks_two_sample_asymptotic",
    })
}

/// Pearson correlation with a two-sided p-value from the exact t
/// transform r * sqrt((n-2) / (1-r^2)).
pub fn pearson(x: &[f64], y: &[f64]) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(Error::Stats(format!(
            "pearson sample length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Stats(format!("pearson needs n >= 3, got {n}")));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Stats("undefined correlation: constant sample".into()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let nu = (n - 2) as f64;
    let p = if (1.0 - r * r) < 1e-15 {
        0.0
    } else {
        let t = r * (nu / (1.0 - r * r)).sqrt();
        student_t_two_sided(t, nu)
    };
    Ok(TestResult {
        statistic: r,
        p_value: p,
        n_x: n,
        n_y: n,
        method: "pearson",
    })
}

/// Two-sided one-sample t-test of mean(x) = mu0.
pub fn t_test_one_sample(x: &[f64], mu0: f64) -> Result<TestResult> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Stats(format!("t-test needs n >= 2, got {n}")));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Err(Error::Stats("t-test undefined: zero variance".into()));
    }
    let t = (mean - mu0) / (var / n as f64).sqrt();
    let p = student_t_two_sided(t, (n - 1) as f64);
    Ok(TestResult {
        statistic: t,
        p_value: p,
        n_x: n,
        n_y: 0,
        method: "t_one_sample",
    })
}

/// Ordinary least squares fit y = slope * x + intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    /// Pearson correlation of x and y (0 when y is constant).
    pub r: f64,
}

pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<Regression> {
    if x.len() != y.len() {
        return Err(Error::Stats(format!(
            "regression sample length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::Stats(format!("regression needs n >= 2, got {n}")));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Stats("regression undefined: constant x".into()));
    }
    let slope = sxy / sxx;
    let r = if syy == 0.0 {
        0.0
    } else {
        (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
    };
    Ok(Regression {
        slope,
        intercept: my - slope * mx,
        r,
    })
}

/// Sample quartiles by linear interpolation (the numpy default scheme).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }

    /// Tukey outlier fences Q1 - 1.5*IQR and Q3 + 1.5*IQR.
    pub fn fences(&self) -> (f64, f64) {
        let iqr = self.iqr();
        (self.q1 - 1.5 * iqr, self.q3 + 1.5 * iqr)
    }
}

pub fn quartiles(sample: &[f64]) -> Result<Quartiles> {
    check_sample("quartiles", sample)?;
    let s = sorted(sample);
    let at = |q: f64| -> f64 {
        let pos = q * (s.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        if lo == hi {
            s[lo]
        } else {
            let frac = pos - lo as f64;
            s[lo] * (1.0 - frac) + s[hi] * frac
        }
    };
    Ok(Quartiles {
        q1: at(0.25),
        median: at(0.5),
        q3: at(0.75),
    })
}

/// Difference in cumulative frequencies of two samples, evaluated at
/// every point of the pooled support in ascending order.
pub fn cumulative_frequency_difference(x: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let xs = sorted(x);
    let ys = sorted(y);
    let mut support: Vec<f64> = xs.iter().chain(ys.iter()).copied().collect();
    support.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    support.dedup();
    support
        .into_iter()
        .map(|v| (v, ecdf_at(&xs, v) - ecdf_at(&ys, v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_identical_samples() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let r = ks_two_sample(&x, &x).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn ks_disjoint_samples() {
        let x = vec![1.0, 2.0, 3.0];
        let y = vec![10.0, 11.0, 12.0];
        let r = ks_two_sample(&x, &y).unwrap();
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn ks_symmetric_and_bounded() {
        let x = vec![0.3, 1.5, 2.2, 0.1, 4.4, 2.0];
        let y = vec![0.5, 1.0, 3.3, 2.1];
        let a = ks_two_sample(&x, &y).unwrap();
        let b = ks_two_sample(&y, &x).unwrap();
        assert_eq!(a.statistic, b.statistic);
        assert!(a.statistic >= 0.0 && a.statistic <= 1.0);
        assert!(a.p_value >= 0.0 && a.p_value <= 1.0);
    }

    #[test]
    fn ks_empty_sample_is_error() {
        assert!(ks_two_sample(&[], &[1.0]).is_err());
    }

    #[test]
    fn pearson_exact_lines() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson(&x, &y).unwrap().statistic - 1.0).abs() < 1e-12);
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &y).unwrap().statistic + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_constant_is_error() {
        let x = vec![1.0, 1.0, 1.0, 1.0];
        let y = vec![1.0, 2.0, 3.0, 4.0];
        assert!(pearson(&x, &y).is_err());
    }

    #[test]
    fn pearson_affine_invariance() {
        let x = vec![0.3, 1.5, 2.2, 0.1, 4.4, 2.0, 3.3];
        let y = vec![0.5, 1.0, 3.3, 2.1, 4.0, 1.8, 2.2];
        let r0 = pearson(&x, &y).unwrap().statistic;
        let xs: Vec<f64> = x.iter().map(|v| 3.0 * v + 7.0).collect();
        let ys: Vec<f64> = y.iter().map(|v| 0.5 * v - 2.0).collect();
        let r1 = pearson(&xs, &ys).unwrap().statistic;
        assert!((r0 - r1).abs() < 1e-12);
    }

    #[test]
    fn t_test_trivial_cases() {
        let r = t_test_one_sample(&[-1.0, 1.0], 0.0).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let r = t_test_one_sample(&[1.0, 2.0, 3.0], 2.0).unwrap();
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn t_test_zero_variance_is_error() {
        assert!(t_test_one_sample(&[2.0, 2.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn regression_collinear() {
        let x = vec![10.0, 20.0, 30.0];
        let y = vec![1.0, 2.0, 3.0];
        let f = linear_regression(&x, &y).unwrap();
        assert!((f.slope - 0.1).abs() < 1e-12);
        assert!(f.intercept.abs() < 1e-12);
        assert!((f.r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regression_constant_x_is_error() {
        assert!(linear_regression(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn p_monotone_in_statistic() {
        // fixed n, larger |t| must not increase p
        let mut last = 1.0;
        for k in 0..40 {
            let t = 0.2 * k as f64;
            let p = student_t_two_sided(t, 12.0);
            assert!(p <= last + 1e-15);
            last = p;
        }
        let mut last = 1.0;
        for k in 0..40 {
            let d = 0.05 * k as f64;
            let p = kolmogorov_sf(d * (25.0f64).sqrt());
            assert!(p <= last + 1e-15);
            last = p;
        }
    }

    #[test]
    fn quartile_fences_match_definition() {
        let q = quartiles(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]).unwrap();
        let (lo, hi) = q.fences();
        assert!((lo - (q.q1 - 1.5 * (q.q3 - q.q1))).abs() < 1e-12);
        assert!((hi - (q.q3 + 1.5 * (q.q3 - q.q1))).abs() < 1e-12);
    }

    #[test]
    fn kolmogorov_series_regimes_agree() {
        // both series evaluated near the switch point agree
        for &l in &[1.0, 1.1, 1.18, 1.2, 1.3] {
            let pi = std::f64::consts::PI;
            let theta: f64 = (1..200u32)
                .step_by(2)
                .map(|j| (-(j as f64).powi(2) * pi * pi / (8.0 * l * l)).exp())
                .sum::<f64>()
                * (2.0 * pi).sqrt()
                / l;
            let alt: f64 = 2.0
                * (1..200u32)
                    .map(|k| {
                        let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                        s * (-2.0 * (k as f64).powi(2) * l * l).exp()
                    })
                    .sum::<f64>();
            assert!(((1.0 - theta) - alt).abs() < 1e-12, "lambda {l}");
            assert!((kolmogorov_sf(l) - alt).abs() < 1e-12);
        }
    }
}
