//! Distribution-level test statistics used by the statistical checks:
//! Kolmogorov–Smirnov (one- and two-sample) and a chi-square
//! goodness-of-fit helper.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// One-sample KS statistic: sup_t |F_n(t) - F(t)| for a sorted copy of the
/// sample against the reference CDF `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i as f64 + 1.0) / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Two-sample KS statistic: sup_t |F_a(t) - F_b(t)| over the pooled points.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|p, q| p.total_cmp(q));
    xb.sort_by(|p, q| p.total_cmp(q));
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let t = xa[i].min(xb[j]);
        while i < na && xa[i] <= t {
            i += 1;
        }
        while j < nb && xb[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    d
}

/// Asymptotic KS critical value at level `alpha` for one sample of size `n`:
/// c(α)/√n with c(α) = sqrt(-ln(α/2)/2).
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    ((-(alpha / 2.0).ln()) / 2.0).sqrt() / (n as f64).sqrt()
}

/// Two-sample KS critical value at level `alpha` for sizes `n1`, `n2`.
pub fn ks_two_sample_critical(n1: usize, n2: usize, alpha: f64) -> f64 {
    let c = ((-(alpha / 2.0).ln()) / 2.0).sqrt();
    c * ((n1 + n2) as f64 / (n1 as f64 * n2 as f64)).sqrt()
}

/// Chi-square goodness-of-fit statistic for observed bin counts against
/// expected counts (same length, expected all positive).
pub fn chi_square_statistic(observed: &[usize], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let diff = o as f64 - e;
            diff * diff / e
        })
        .sum()
}

/// Upper-tail chi-square critical value: the `1 - alpha` quantile with
/// `dof` degrees of freedom. Inverts the (accurate) regularized-gamma CDF by
/// bisection; the library's own quantile routine is only good to ~1e-3.
pub fn chi_square_critical(dof: usize, alpha: f64) -> f64 {
    let dist = ChiSquared::new(dof as f64).expect("dof > 0");
    let p = 1.0 - alpha;
    let mut lo = 0.0f64;
    let mut hi = dof as f64;
    while dist.cdf(hi) < p {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist.cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{tag, Stream};

    #[test]
    fn ks_statistic_on_tiny_sample() {
        // Sample {0.25, 0.75} against U(0,1): steps at 0.25 and 0.75.
        let d = ks_statistic(&[0.25, 0.75], |t| t.clamp(0.0, 1.0));
        assert!((d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ks_critical_values_match_closed_form() {
        // c(0.01) = 1.6276…, c(0.001) = 1.9495…
        assert!((ks_critical(1, 0.01) - 1.6276236307187293).abs() < 1e-12);
        assert!((ks_critical(1, 0.001) - 1.9494746035204051).abs() < 1e-12);
        assert!((ks_critical(10_000, 0.01) - 0.016276236307187293).abs() < 1e-15);
    }

    #[test]
    fn uniform_sample_passes_its_own_cdf() {
        let mut s = Stream::from_key(&[tag::MONTE_CARLO, 7]);
        let xs: Vec<f64> = (0..20_000).map(|_| s.next_open01()).collect();
        let d = ks_statistic(&xs, |t| t.clamp(0.0, 1.0));
        assert!(d < ks_critical(xs.len(), 0.001), "d = {d}");
    }

    #[test]
    fn shifted_sample_fails() {
        let mut s = Stream::from_key(&[tag::MONTE_CARLO, 8]);
        let xs: Vec<f64> = (0..5_000).map(|_| 0.9 * s.next_open01()).collect();
        let d = ks_statistic(&xs, |t| t.clamp(0.0, 1.0));
        assert!(d > ks_critical(xs.len(), 0.001));
    }

    #[test]
    fn two_sample_agrees_and_discriminates() {
        let mut s = Stream::from_key(&[tag::MONTE_CARLO, 9]);
        let a: Vec<f64> = (0..8_000).map(|_| s.next_open01()).collect();
        let b: Vec<f64> = (0..6_000).map(|_| s.next_open01()).collect();
        let d_same = ks_two_sample(&a, &b);
        assert!(d_same < ks_two_sample_critical(a.len(), b.len(), 0.001));
        let c: Vec<f64> = b.iter().map(|x| x * x).collect();
        let d_diff = ks_two_sample(&a, &c);
        assert!(d_diff > ks_two_sample_critical(a.len(), c.len(), 0.001));
    }

    #[test]
    fn chi_square_critical_pinned() {
        // 0.99 quantile with 49 dof.
        let got = chi_square_critical(49, 0.01);
        assert!((got - 74.91947430847816).abs() < 1e-6, "got {got:.12}");
    }

    #[test]
    fn chi_square_statistic_basics() {
        let stat = chi_square_statistic(&[12, 8], &[10.0, 10.0]);
        assert!((stat - 0.8).abs() < 1e-12);
    }
}
