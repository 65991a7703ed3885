//! Shared numerics: composite Gauss–Legendre quadrature, certified
//! maximization of smooth periodic functions, integer threshold search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("quadrature did not converge: value {value}, error estimate {err_est} > tol {tol}")]
    QuadratureNotConverged { value: f64, err_est: f64, tol: f64 },
    #[error("invalid quadrature config: {0}")]
    InvalidConfig(String),
    #[error("derivative bound must be finite and nonnegative, got {0}")]
    InvalidDerivBound(f64),
    #[error("maximization exceeded the evaluation budget (best {best}, margin {margin})")]
    CertificationFailed { best: f64, margin: f64 },
    #[error("threshold search exceeded cap {cap}")]
    SearchCapExceeded { cap: u64 },
}

/// Composite Gauss–Legendre configuration.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    /// Nodes per panel.
    pub order: usize,
    /// Initial number of panels; doubled until the halving comparison meets `tol`.
    pub panels: usize,
    /// Target absolute error.
    pub tol: f64,
    /// Maximum number of panel doublings before giving up.
    pub max_doublings: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            order: 16,
            panels: 64,
            tol: 1e-10,
            max_doublings: 6,
        }
    }
}

impl QuadratureConfig {
    pub fn with_panels(panels: usize) -> Self {
        QuadratureConfig {
            panels: panels.max(1),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        if self.order < 2 {
            return Err(NumericsError::InvalidConfig(format!(
                "order must be >= 2, got {}",
                self.order
            )));
        }
        if self.panels < 1 {
            return Err(NumericsError::InvalidConfig("panels must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(NumericsError::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// A quadrature value with its halving-comparison error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub err_est: f64,
    pub panels_used: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre polynomial.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P'_n(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Pairwise (cascade) summation; bit-stable regardless of thread count
/// because the inputs arrive in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

fn composite_gl<F>(f: &F, a: f64, b: f64, order: usize, panels: usize) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let rule;
    let (nodes, weights) = if order == 16 {
        gl16()
    } else {
        rule = gauss_legendre(order);
        &rule
    };
    let h = (b - a) / panels as f64;
    let per_panel: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|p| {
            let lo = a + p as f64 * h;
            let mut acc = 0.0;
            for (x, w) in nodes.iter().zip(weights) {
                acc += w * f(lo + h * (x + 1.0) / 2.0);
            }
            acc * h / 2.0
        })
        .collect();
    pairwise_sum(&per_panel)
}

/// Composite Gauss–Legendre estimate of `∫_a^b f`, with the error estimated
/// by comparing successive panel doublings.
pub fn integrate<F>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Quadrature, NumericsError>
where
    F: Fn(f64) -> f64 + Sync,
{
    cfg.validate()?;
    assert!(a < b, "integrate requires a < b");
    let mut panels = cfg.panels;
    let mut prev = composite_gl(&f, a, b, cfg.order, panels);
    for _ in 0..cfg.max_doublings {
        panels *= 2;
        let next = composite_gl(&f, a, b, cfg.order, panels);
        let err_est = (next - prev).abs();
        if err_est <= cfg.tol {
            return Ok(Quadrature {
                value: next,
                err_est,
                panels_used: panels,
            });
        }
        prev = next;
    }
    Err(NumericsError::QuadratureNotConverged {
        value: prev,
        err_est: f64::INFINITY,
        tol: cfg.tol,
    })
}

/// A certified maximum: the true supremum lies in `[value, value + margin]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedMax {
    pub value: f64,
    pub argmax: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    lo: f64,
    width: f64,
    ub: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.ub == other.ub && self.lo == other.lo
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap by upper bound, ties broken by position for determinism.
        self.ub
            .total_cmp(&other.ub)
            .then(other.lo.total_cmp(&self.lo))
    }
}

const MAX_EVALS: usize = 200_000_000;

/// Certified maximum of a 1-periodic function over `[0, 1)`.
///
/// `deriv_bound` must be a valid Lipschitz constant for `f`.  The search is
/// an adaptive grid (branch and bound): an interval of width `w` with
/// midpoint value `m` bounds the supremum on it by `m + deriv_bound·w/2`,
/// and intervals are split until the global gap is below `tol`.
pub fn max_periodic<F>(f: F, deriv_bound: f64, tol: f64) -> Result<CertifiedMax, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !deriv_bound.is_finite() || deriv_bound < 0.0 {
        return Err(NumericsError::InvalidDerivBound(deriv_bound));
    }
    assert!(tol > 0.0, "tol must be positive");

    let init = 64usize;
    let mut best = f64::NEG_INFINITY;
    let mut argmax = 0.0;
    let mut heap: BinaryHeap<Interval> = BinaryHeap::with_capacity(4096);
    let mut evals = 0usize;
    let push = |heap: &mut BinaryHeap<Interval>,
                    best: &mut f64,
                    argmax: &mut f64,
                    lo: f64,
                    width: f64,
                    fmid: f64| {
        if fmid > *best {
            *best = fmid;
            *argmax = lo + width / 2.0;
        }
        heap.push(Interval {
            lo,
            width,
            ub: fmid + deriv_bound * width / 2.0,
        });
    };

    let w0 = 1.0 / init as f64;
    for i in 0..init {
        let lo = i as f64 * w0;
        let fm = f(lo + w0 / 2.0);
        evals += 1;
        push(&mut heap, &mut best, &mut argmax, lo, w0, fm);
    }

    loop {
        let top = *heap.peek().expect("heap never empty");
        let margin = top.ub - best;
        if margin <= tol {
            return Ok(CertifiedMax {
                value: best,
                argmax,
                margin: margin.max(0.0),
            });
        }
        if evals > MAX_EVALS {
            return Err(NumericsError::CertificationFailed { best, margin });
        }
        heap.pop();
        let w = top.width / 2.0;
        for half in 0..2 {
            let lo = top.lo + half as f64 * w;
            let fm = f(lo + w / 2.0);
            evals += 1;
            push(&mut heap, &mut best, &mut argmax, lo, w, fm);
        }
    }
}

/// Outcome of one predicate evaluation in [`smallest_true`]: whether it
/// holds and how far the underlying quantity is from the decision boundary.
#[derive(Debug, Clone, Copy)]
pub struct PredicateOutcome {
    pub holds: bool,
    pub margin: f64,
}

/// Result of an integer threshold search.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdResult {
    /// Least `n ≥ start` where the predicate holds.
    pub value: u64,
    /// Margin recorded at `value − 1` (absent when `value == start`).
    pub witness_below: Option<f64>,
    /// Margin recorded at `value`.
    pub witness_at: f64,
}

/// Least `n ≥ start` with `pred(n)` true.  Linear scan for a short window,
/// then exponential steps and bisection; the caller asserts the predicate is
/// eventually true and monotone over the search range.  `pred(value − 1)` is
/// re-evaluated at the end so the reported threshold always satisfies
/// `¬pred(value−1) ∧ pred(value)`.
pub fn smallest_true<F>(mut pred: F, start: u64, cap: u64) -> Result<ThresholdResult, NumericsError>
where
    F: FnMut(u64) -> PredicateOutcome,
{
    const LINEAR_WINDOW: u64 = 64;

    let mut first_true: Option<(u64, f64)> = None;
    let mut below: Option<f64> = None;

    let mut n = start;
    while n < start.saturating_add(LINEAR_WINDOW) {
        if n > cap {
            return Err(NumericsError::SearchCapExceeded { cap });
        }
        let out = pred(n);
        if out.holds {
            first_true = Some((n, out.margin));
            break;
        }
        below = Some(out.margin);
        n += 1;
    }

    if first_true.is_none() {
        // Exponential bracketing from the end of the linear window.
        let mut lo = n - 1; // last known false
        let mut step = LINEAR_WINDOW;
        let hi = loop {
            let probe = lo.saturating_add(step).min(cap);
            let out = pred(probe);
            if out.holds {
                break (probe, out.margin);
            }
            below = Some(out.margin);
            if probe == cap {
                return Err(NumericsError::SearchCapExceeded { cap });
            }
            lo = probe;
            step = step.saturating_mul(2);
        };
        // Bisection on (lo, hi]: lo false, hi true.
        let (mut hi, mut hi_margin) = hi;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            let out = pred(mid);
            if out.holds {
                hi = mid;
                hi_margin = out.margin;
            } else {
                below = Some(out.margin);
                lo = mid;
            }
        }
        first_true = Some((hi, hi_margin));
    }

    let (mut value, mut witness_at) = first_true.unwrap();
    // Confirm the boundary; walk down if the probe order skipped a true.
    while value > start {
        let out = pred(value - 1);
        if out.holds {
            value -= 1;
            witness_at = out.margin;
        } else {
            below = Some(out.margin);
            break;
        }
    }

    Ok(ThresholdResult {
        value,
        witness_below: if value > start { below } else { None },
        witness_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // Exact (to 1e-14) on polynomials of degree < 2·order per panel.
        for order in [2usize, 4, 8, 16] {
            let (nodes, weights) = gauss_legendre(order);
            let deg = 2 * order - 1;
            // ∫_{-1}^{1} x^deg dx = 0 (odd), and x^{deg-1}: 2/deg.
            let int_odd: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| w * x.powi(deg as i32))
                .sum();
            assert!(int_odd.abs() < 1e-14, "order {order}");
            let int_even: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| w * x.powi(deg as i32 - 1))
                .sum();
            let exact = 2.0 / deg as f64;
            assert!((int_even - exact).abs() < 1e-14, "order {order}");
        }
    }

    #[test]
    fn integrate_constant() {
        let q = integrate(|_| 1.0, 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert!((q.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integrate_cosine() {
        let q = integrate(|x| x.cos(), 0.0, PI / 2.0, &QuadratureConfig::default()).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_sinc_matches_t_infty_1() {
        // ∫_{-1/2}^{1/2} sin(πt)/(πt) dt = 0.87265429946…
        let f = |t: f64| {
            let u = PI * t;
            if u.abs() < 1e-4 {
                1.0 - u * u / 6.0 + u.powi(4) / 120.0
            } else {
                u.sin() / u
            }
        };
        let q = integrate(f, -0.5, 0.5, &QuadratureConfig::default()).unwrap();
        assert!((q.value - 0.8726542994606027).abs() < 1e-9, "{}", q.value);
    }

    #[test]
    fn max_periodic_sine() {
        let m = max_periodic(|x| (2.0 * PI * x).sin(), 2.0 * PI, 1e-10).unwrap();
        assert!((m.value - 1.0).abs() < 1e-10);
        assert!((m.argmax - 0.25).abs() < 1e-4);
        assert!(m.margin <= 1e-10);
    }

    #[test]
    fn max_periodic_constant() {
        let m = max_periodic(|_| 3.5, 0.0, 1e-12).unwrap();
        assert_eq!(m.value, 3.5);
        assert!(m.margin <= 1e-12);
    }

    #[test]
    fn max_periodic_never_exceeds_true_max() {
        // Sharp quadratic-peak test functions with known maxima.
        for &c in &[0.1, 0.31, 0.77] {
            let f = |x: f64| {
                let d = (x - c) - (x - c).round();
                1.0 - 30.0 * d * d
            };
            let m = max_periodic(f, 30.0, 1e-9).unwrap();
            assert!(m.value <= 1.0 + 1e-15);
            assert!(m.value + m.margin >= 1.0 - 1e-15);
        }
    }

    #[test]
    fn max_periodic_rejects_bad_bound() {
        assert!(max_periodic(|x| x, f64::NAN, 1e-6).is_err());
    }

    #[test]
    fn smallest_true_basics() {
        let r = smallest_true(
            |n| PredicateOutcome {
                holds: n >= 5,
                margin: (n as f64 - 5.0).abs(),
            },
            1,
            1000,
        )
        .unwrap();
        assert_eq!(r.value, 5);
        assert!(r.witness_below.is_some());

        let r = smallest_true(
            |_| PredicateOutcome {
                holds: true,
                margin: 1.0,
            },
            3,
            1000,
        )
        .unwrap();
        assert_eq!(r.value, 3);
        assert!(r.witness_below.is_none());
    }

    #[test]
    fn smallest_true_beyond_linear_window() {
        // Threshold far past the linear window exercises bracket + bisection.
        for t in [97u64, 1000, 12345] {
            let r = smallest_true(
                |n| PredicateOutcome {
                    holds: n >= t,
                    margin: 1.0,
                },
                1,
                1 << 20,
            )
            .unwrap();
            assert_eq!(r.value, t);
        }
    }

    #[test]
    fn smallest_true_cap_exceeded() {
        let r = smallest_true(
            |_| PredicateOutcome {
                holds: false,
                margin: 0.0,
            },
            1,
            100,
        );
        assert!(matches!(r, Err(NumericsError::SearchCapExceeded { .. })));
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }
}
