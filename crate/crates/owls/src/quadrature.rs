//! Gauss quadrature rules for the built-in measures, plus composite and
//! tensor-product helpers. All rules are expressed against the normalized
//! probability measures, so weights always sum to one and integrating a
//! normalized density is exact by construction.

use crate::basis::BasisFamily;
use crate::linalg::Matrix;
use crate::{Error, Result};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of a one-dimensional quadrature rule.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn gl_cache() -> &'static Mutex<HashMap<usize, Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn gh_cache() -> &'static Mutex<HashMap<usize, Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre rule on [-1, 1] for the measure dt (weights sum to 2).
/// Nodes are the roots of the degree-`n` Legendre polynomial, found by
/// Newton iteration from the Chebyshev-angle initial guesses.
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    assert!(n >= 1);
    if let Some(r) = gl_cache().lock().unwrap().get(&n) {
        return r.clone();
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Evaluate (P_n, P_{n-1}) by the three-term recurrence.
    let eval = |x: f64| -> (f64, f64) {
        let (mut p0, mut p1) = (1.0, x);
        for j in 2..=n {
            let jf = j as f64;
            let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
            p0 = p1;
            p1 = p2;
        }
        (p1, p0)
    };
    let half = n.div_ceil(2);
    for i in 0..half {
        // Chebyshev-angle guess for the i-th positive-side root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        if n == 1 {
            x = 0.0;
        }
        let mut dp = 1.0;
        for _ in 0..100 {
            let (pn, pm) = eval(x);
            dp = if n == 1 {
                1.0
            } else {
                n as f64 * (x * pn - pm) / (x * x - 1.0)
            };
            if n == 1 {
                break;
            }
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (pn2, pm2) = eval(x);
                dp = n as f64 * (x * pn2 - pm2) / (x * x - 1.0);
                break;
            }
        }
        let w = if n == 1 {
            2.0
        } else {
            2.0 / ((1.0 - x * x) * dp * dp)
        };
        // The guesses walk down from the largest root; mirror into place.
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let rule = Arc::new(Rule { nodes, weights });
    gl_cache().lock().unwrap().insert(n, rule.clone());
    rule
}

/// Gauss–Hermite rule for the standard Gaussian probability measure
/// (weights sum to 1), via Golub–Welsch: the Jacobi matrix of the
/// orthonormal probabilists' Hermite recurrence has zero diagonal and
/// off-diagonal sqrt(k); its eigenvalues are the nodes and the squared first
/// eigenvector components are the weights.
pub fn gauss_hermite(n: usize) -> Arc<Rule> {
    assert!(n >= 1);
    if let Some(r) = gh_cache().lock().unwrap().get(&n) {
        return r.clone();
    }
    let mut j = Matrix::zeros(n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        j.set(k - 1, k, b);
        j.set(k, k - 1, b);
    }
    let (vals, _) = j.jacobi_eigen();
    // Eigenvalues locate the nodes to ~1e-12; polish each with Newton on the
    // orthonormal polynomial h_n (h_n' = sqrt(n) h_{n-1}), then take the
    // Christoffel weights w_i = 1 / sum_{k<n} h_k(x_i)^2, which are exact for
    // Gauss rules and numerically benign.
    let eval = |x: f64| -> (f64, f64) {
        // returns (h_n(x), h_{n-1}(x))
        let (mut prev, mut cur) = (1.0f64, x);
        if n == 1 {
            return (x, 1.0);
        }
        for k in 1..n {
            let kf = k as f64;
            let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
            prev = cur;
            cur = next;
        }
        (cur, prev)
    };
    let mut nodes = vals;
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = nodes[i];
        for _ in 0..3 {
            let (hn, hn1) = eval(x);
            let dh = (n as f64).sqrt() * hn1;
            if dh != 0.0 {
                x -= hn / dh;
            }
        }
        nodes[i] = x;
        let mut k_sum = 1.0; // h_0(x)^2
        let (mut prev, mut cur) = (1.0f64, x); // h_0, h_1
        if n > 1 {
            k_sum += cur * cur;
        }
        for k in 2..n {
            let kf = (k - 1) as f64;
            let next = (x * cur - kf.sqrt() * prev) / (kf + 1.0).sqrt();
            prev = cur;
            cur = next;
            k_sum += cur * cur;
        }
        weights[i] = 1.0 / k_sum;
    }
    let rule = Arc::new(Rule { nodes, weights });
    gh_cache().lock().unwrap().insert(n, rule.clone());
    rule
}

/// Gauss–Chebyshev rule for the normalized arcsine measure (weights sum
/// to 1); nodes in ascending order.
pub fn gauss_chebyshev(n: usize) -> Rule {
    assert!(n >= 1);
    let nodes: Vec<f64> = (0..n)
        .rev()
        .map(|i| ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos())
        .collect();
    Rule {
        nodes,
        weights: vec![1.0 / n as f64; n],
    }
}

/// Gauss rule of `n` points for a family's normalized measure: exact for
/// polynomials up to degree 2n-1 against dρ.
pub fn family_rule(family: BasisFamily, n: usize) -> Rule {
    match family {
        BasisFamily::LegendreUniform => {
            let gl = gauss_legendre(n);
            Rule {
                nodes: gl.nodes.clone(),
                weights: gl.weights.iter().map(|w| w * 0.5).collect(),
            }
        }
        BasisFamily::ChebyshevArcsine => gauss_chebyshev(n),
        BasisFamily::HermiteGaussian => (*gauss_hermite(n)).clone(),
    }
}

/// Composite Gauss–Legendre integration of `f` over [lo, hi] against dt,
/// with panels no wider than `max_panel` and `nodes` points per panel.
pub fn composite_gl(
    lo: f64,
    hi: f64,
    max_panel: f64,
    nodes: usize,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let rule = gauss_legendre(nodes);
    let panels = (((hi - lo) / max_panel).ceil() as usize).max(1);
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let mid = a + 0.5 * h;
        let scale = 0.5 * h;
        let mut s = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            s += w * f(mid + scale * x);
        }
        total += scale * s;
    }
    total
}

/// Tensor-product integration of `f` against the product measure of
/// `families`, with `n` nodes per coordinate. Intended for low dimensions;
/// refuses to build grids beyond d = 6.
pub fn tensor_integrate(
    families: &[BasisFamily],
    n: usize,
    mut f: impl FnMut(&[f64]) -> f64,
) -> Result<f64> {
    let d = families.len();
    if d == 0 || d > 6 {
        return Err(Error::invalid(format!(
            "tensor quadrature supports 1 ≤ d ≤ 6, got {d}"
        )));
    }
    let rules: Vec<Rule> = families.iter().map(|&fam| family_rule(fam, n)).collect();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut total = 0.0;
    'outer: loop {
        let mut w = 1.0;
        for (q, &i) in idx.iter().enumerate() {
            x[q] = rules[q].nodes[i];
            w *= rules[q].weights[i];
        }
        total += w * f(&x);
        // Odometer increment.
        for q in 0..d {
            idx[q] += 1;
            if idx[q] < n {
                continue 'outer;
            }
            idx[q] = 0;
        }
        break;
    }
    Ok(total)
}
