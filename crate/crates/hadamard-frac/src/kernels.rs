//! The four fractional integral operators and the Hadamard–Caputo
//! derivative, over closed-form integrand tags or sampled data.
//!
//! Hadamard operators reduce to Riemann–Liouville ones through the
//! substitution s = e^u, so a single singular-kernel engine backs both
//! families. The kernel singularity is always absorbed by the Gauss–Jacobi
//! weight of the canonical form in [`crate::quad`] and never sampled.

use crate::error::{Error, Result};
use crate::quad::{self, QuadratureSpec};
use crate::special::{gamma_pos, gamma_ratio};

/// Fractional order and interval for one operator evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    pub sigma: f64,
    pub a: f64,
    pub t_end: f64,
}

impl FracParams {
    /// `sigma > 0` and `a < t_end`. Hadamard operators additionally require
    /// `a > 0`; Riemann–Liouville ones accept any real interval (they are
    /// applied to log-domain intervals whose left endpoint may be <= 0).
    pub fn new(sigma: f64, a: f64, t_end: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!("order sigma must be > 0, got {sigma}")));
        }
        if !(a < t_end) || !a.is_finite() || !t_end.is_finite() {
            return Err(Error::Domain(format!(
                "interval must satisfy a < T, got [{a}, {t_end}]"
            )));
        }
        Ok(Self { sigma, a, t_end })
    }

    fn require_positive_left(&self) -> Result<()> {
        if self.a <= 0.0 {
            return Err(Error::Domain(format!(
                "Hadamard operators require a > 0, got a = {}",
                self.a
            )));
        }
        Ok(())
    }

    fn check_eval_point(&self, t: f64) -> Result<()> {
        if !(t >= self.a && t <= self.t_end) {
            return Err(Error::Domain(format!(
                "evaluation point {t} outside [{}, {}]",
                self.a, self.t_end
            )));
        }
        Ok(())
    }
}

/// Real samples on a grid uniform in ln t, `t_k = a (T/a)^{k/(n-1)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGridFunction {
    pub a: f64,
    pub t_end: f64,
    values: Vec<f64>,
}

impl LogGridFunction {
    pub fn new(a: f64, t_end: f64, values: Vec<f64>) -> Result<Self> {
        if !(a > 0.0 && t_end > a) {
            return Err(Error::Grid(format!(
                "log grid needs 0 < a < T, got [{a}, {t_end}]"
            )));
        }
        if values.len() < 2 {
            return Err(Error::Grid(format!(
                "log grid needs at least 2 samples, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("log grid contains non-finite values".into()));
        }
        Ok(Self { a, t_end, values })
    }

    /// Sample a closed-form function onto an `n`-point log-uniform grid.
    pub fn sample(a: f64, t_end: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Grid(format!("need n >= 2 samples, got {n}")));
        }
        let values = (0..n).map(|k| f(Self::node_of(a, t_end, n, k))).collect();
        Self::new(a, t_end, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn node_of(a: f64, t_end: f64, n: usize, k: usize) -> f64 {
        let frac = k as f64 / (n - 1) as f64;
        a * (t_end / a).powf(frac)
    }

    pub fn node(&self, k: usize) -> f64 {
        Self::node_of(self.a, self.t_end, self.values.len(), k)
    }

    /// Grid spacing in the ln t coordinate.
    pub fn log_step(&self) -> f64 {
        (self.t_end / self.a).ln() / (self.values.len() - 1) as f64
    }

    /// 4-point Lagrange interpolation in the ln t coordinate.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.values.len();
        let pos = (t / self.a).ln() / self.log_step();
        if n < 4 {
            // Linear fallback for tiny grids.
            let i = (pos.floor() as usize).min(n - 2);
            let frac = pos - i as f64;
            return self.values[i] * (1.0 - frac) + self.values[i + 1] * frac;
        }
        let i0 = ((pos.round() as isize) - 2).clamp(0, n as isize - 4) as usize;
        let mut acc = 0.0;
        for j in 0..4 {
            let xj = (i0 + j) as f64;
            let mut lj = 1.0;
            for m in 0..4 {
                if m != j {
                    let xm = (i0 + m) as f64;
                    lj *= (pos - xm) / (xj - xm);
                }
            }
            acc += lj * self.values[i0 + j];
        }
        acc
    }

    /// Samples of t f'(t) = df/d(ln t), by second-order centered differences
    /// in the ln t coordinate (one-sided at the endpoints).
    pub fn log_derivative(&self) -> LogGridFunction {
        let n = self.values.len();
        let h = self.log_step();
        let v = &self.values;
        let mut d = vec![0.0; n];
        if n == 2 {
            let slope = (v[1] - v[0]) / h;
            d[0] = slope;
            d[1] = slope;
        } else {
            d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
            for k in 1..n - 1 {
                d[k] = (v[k + 1] - v[k - 1]) / (2.0 * h);
            }
            d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
        }
        LogGridFunction {
            a: self.a,
            t_end: self.t_end,
            values: d,
        }
    }
}

/// Closed-form integrand tags plus sampled data.
#[derive(Debug, Clone, PartialEq)]
pub enum Integrand {
    /// t ↦ c
    Constant(f64),
    /// t ↦ (ln t/a)^β with β > −1
    LogPower(f64),
    /// t ↦ (ln T/a)^{−κ} (ln T/t)^{κ} with κ ≥ 1
    MuFamily(f64),
    /// Interpolated log-grid samples
    Sampled(LogGridFunction),
}

impl Integrand {
    pub fn validate(&self) -> Result<()> {
        match self {
            Integrand::Constant(c) if !c.is_finite() => {
                Err(Error::Domain("Constant integrand must be finite".into()))
            }
            Integrand::LogPower(beta) if !(*beta > -1.0) => Err(Error::Domain(format!(
                "LogPower requires beta > -1 for integrability, got {beta}"
            ))),
            Integrand::MuFamily(kappa) if !(*kappa >= 1.0) => Err(Error::Domain(format!(
                "MuFamily requires kappa >= 1, got {kappa}"
            ))),
            _ => Ok(()),
        }
    }

    /// Value at time t (interval context comes from `p` for the tags that
    /// reference a or T).
    pub fn eval(&self, t: f64, p: &FracParams) -> f64 {
        match self {
            Integrand::Constant(c) => *c,
            Integrand::LogPower(beta) => (t / p.a).ln().powf(*beta),
            Integrand::MuFamily(kappa) => {
                (p.t_end / p.a).ln().powf(-kappa) * (p.t_end / t).ln().powf(*kappa)
            }
            Integrand::Sampled(g) => g.eval(t),
        }
    }

    /// t f'(t), the derivative in the ln t coordinate, where it exists in
    /// closed form. Sampled integrands are differenced by the caller.
    fn log_deriv_closed(&self, t: f64, p: &FracParams) -> f64 {
        match self {
            Integrand::Constant(_) => 0.0,
            Integrand::LogPower(beta) => {
                if *beta == 0.0 {
                    0.0
                } else {
                    beta * (t / p.a).ln().powf(beta - 1.0)
                }
            }
            Integrand::MuFamily(kappa) => {
                -kappa
                    * (p.t_end / p.a).ln().powf(-kappa)
                    * (p.t_end / t).ln().powf(kappa - 1.0)
            }
            Integrand::Sampled(_) => unreachable!("sampled derivative handled by caller"),
        }
    }
}

/// Left Riemann–Liouville integral of a closure:
/// (I_a^σ g)(t) = (1/Γ(σ)) ∫_a^t (t−s)^{σ−1} g(s) ds.
pub fn rl_left_fn(
    sigma: f64,
    a: f64,
    t: f64,
    g: impl Fn(f64) -> f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    if t == a {
        return Ok(0.0);
    }
    if t < a {
        return Err(Error::Domain(format!("evaluation point {t} below left endpoint {a}")));
    }
    let len = t - a;
    // s = t − len·τ puts the kernel singularity at τ = 0.
    let r = quad::weighted_01(q, 0.0, sigma - 1.0, |tau| g(t - len * tau))?;
    Ok(len.powf(sigma) / gamma_pos(sigma) * r.value)
}

/// Right Riemann–Liouville integral of a closure:
/// (I_T^σ g)(t) = (1/Γ(σ)) ∫_t^T (s−t)^{σ−1} g(s) ds.
pub fn rl_right_fn(
    sigma: f64,
    t: f64,
    t_end: f64,
    g: impl Fn(f64) -> f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    if t == t_end {
        return Ok(0.0);
    }
    if t > t_end {
        return Err(Error::Domain(format!(
            "evaluation point {t} above right endpoint {t_end}"
        )));
    }
    let len = t_end - t;
    let r = quad::weighted_01(q, 0.0, sigma - 1.0, |tau| g(t + len * tau))?;
    Ok(len.powf(sigma) / gamma_pos(sigma) * r.value)
}

/// (I_a^σ f)(t) for a tagged integrand.
pub fn rl_left_integral(f: &Integrand, p: &FracParams, t: f64, q: &QuadratureSpec) -> Result<f64> {
    f.validate()?;
    p.check_eval_point(t)?;
    rl_left_fn(p.sigma, p.a, t, |s| f.eval(s, p), q)
}

/// (I_T^σ f)(t) for a tagged integrand.
pub fn rl_right_integral(f: &Integrand, p: &FracParams, t: f64, q: &QuadratureSpec) -> Result<f64> {
    f.validate()?;
    p.check_eval_point(t)?;
    rl_right_fn(p.sigma, t, p.t_end, |s| f.eval(s, p), q)
}

/// (J_a^σ f)(t), computed through the log substitution as the left
/// Riemann–Liouville integral of f∘exp on [ln a, ln t].
pub fn hadamard_left_integral(
    f: &Integrand,
    p: &FracParams,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    f.validate()?;
    p.require_positive_left()?;
    p.check_eval_point(t)?;
    rl_left_fn(p.sigma, p.a.ln(), t.ln(), |u| f.eval(u.exp(), p), q)
}

/// (J_T^σ f)(t), the right-sided mirror of [`hadamard_left_integral`].
pub fn hadamard_right_integral(
    f: &Integrand,
    p: &FracParams,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    f.validate()?;
    p.require_positive_left()?;
    p.check_eval_point(t)?;
    rl_right_fn(p.sigma, t.ln(), p.t_end.ln(), |u| f.eval(u.exp(), p), q)
}

/// (J_a^σ f)(t) integrated directly in the s variable, without the log
/// substitution. The kernel (ln t/s)^{σ−1} is split into τ^{σ−1} times a
/// smooth ratio so the Jacobi weight still absorbs the singularity. Kept as
/// an independent route for cross-checking the conjugation identity.
#[allow(dead_code)] // exercised by the conjugation cross-check tests
pub(crate) fn hadamard_left_direct(
    f: &Integrand,
    p: &FracParams,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    f.validate()?;
    p.require_positive_left()?;
    p.check_eval_point(t)?;
    if t == p.a {
        return Ok(0.0);
    }
    let len = t - p.a;
    let r = quad::weighted_01(q, 0.0, p.sigma - 1.0, |tau| {
        let s = t - len * tau;
        // ln(t/s) / τ, finite as τ → 0 (limit len/t).
        let ratio = -(((s - t) / t) as f64).ln_1p() / tau;
        ratio.powf(p.sigma - 1.0) * f.eval(s, p) / s
    })?;
    Ok(len / gamma_pos(p.sigma) * r.value)
}

/// Left/forward Hadamard–Caputo derivative of order α ∈ (0, 1):
/// (𝒟_a^α f)(t) = J_a^{1−α}(t f')(t).
pub fn hadamard_caputo_derivative(
    f: &Integrand,
    alpha: f64,
    p: &FracParams,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    f.validate()?;
    p.require_positive_left()?;
    p.check_eval_point(t)?;
    if t == p.a {
        return Ok(0.0);
    }
    if let Integrand::LogPower(beta) = f {
        if *beta < 0.0 {
            return Err(Error::Domain(format!(
                "LogPower({beta}) is not absolutely continuous at t = a; \
                 the Hadamard-Caputo derivative needs beta >= 0"
            )));
        }
    }
    match f {
        Integrand::Sampled(g) => {
            let d = g.log_derivative();
            rl_left_fn(1.0 - alpha, p.a.ln(), t.ln(), |u| d.eval(u.exp()), q)
        }
        Integrand::LogPower(beta) => {
            if *beta == 0.0 {
                return Ok(0.0);
            }
            // t f' = β (ln s/a)^{β−1} is itself singular at s = a for β < 1;
            // folding that power into the Jacobi weight keeps the rule
            // spectrally accurate: with u = ln t − len·τ both endpoint powers
            // τ^{−α} and (1−τ)^{β−1} sit in the weight.
            let len = (t / p.a).ln();
            let r = quad::weighted_01(q, -alpha, beta - 1.0, |_| 1.0)?;
            Ok(beta * len.powf(beta - alpha) / gamma_pos(1.0 - alpha) * r.value)
        }
        _ => rl_left_fn(1.0 - alpha, p.a.ln(), t.ln(), |u| {
            f.log_deriv_closed(u.exp(), p)
        }, q),
    }
}

/// Both sides of the conjugation identity (J_a^σ f)(t) = (I_{ln a}^σ f∘exp)(ln t).
///
/// The left side runs through the Hadamard entry point, the right side calls
/// the Riemann–Liouville engine on the log-domain interval; the caller
/// asserts their agreement.
pub fn conjugate_check(
    f: &Integrand,
    p: &FracParams,
    t: f64,
    q: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let lhs = hadamard_left_integral(f, p, t, q)?;
    let rhs = rl_left_fn(p.sigma, p.a.ln(), t.ln(), |u| f.eval(u.exp(), p), q)?;
    Ok((lhs, rhs))
}

/// Residual of the integration-by-parts rule
/// ∫_a^T (J_a^σ f) g dt/t − ∫_a^T f (J_T^σ g) dt/t, which is 0 exactly.
///
/// The outer integrals run in the u = ln t coordinate under a tanh-sinh
/// rule, which tolerates the algebraic endpoint behavior of both the images
/// and the log-power integrands without knowing the exponents.
// Inner integrals at outer nodes within ~1e-15 of an endpoint are pure
// rounding noise on an absolutely negligible value; keep the best estimate
// rather than poisoning the outer rule.
fn best_value(r: Result<f64>) -> f64 {
    match r {
        Ok(v) => v,
        Err(Error::QuadratureNonConvergence { value, .. }) => value,
        Err(_) => f64::NAN,
    }
}

// The outer integrals of the integration-by-parts identity. Closed-form
// integrands go through tanh-sinh, which handles the algebraic endpoint
// behavior of the fractional images without knowing the exponents. Sampled
// interpolants are only piecewise smooth, which stalls tanh-sinh, so they
// take a composite Gauss-Legendre rule aligned with the interpolation grid
// and refined dyadically into the two endpoint cells.
fn outer_integral(
    f: &Integrand,
    g: &Integrand,
    lo: f64,
    hi: f64,
    outer_tol: f64,
    integrand: impl Fn(f64) -> f64,
) -> Result<f64> {
    let cells = [f, g]
        .iter()
        .filter_map(|i| match i {
            Integrand::Sampled(grid) => Some(2 * (grid.len() - 1)),
            _ => None,
        })
        .max();
    let Some(cells) = cells else {
        return Ok(quad::tanh_sinh(&integrand, lo, hi, outer_tol)?.value);
    };
    let gl = quad::legendre_rule_01(12)?;
    let h = (hi - lo) / cells as f64;
    let mut total = 0.0;
    for k in 0..cells {
        let clo = lo + k as f64 * h;
        if k == 0 || k == cells - 1 {
            // panels shrinking geometrically toward the interval endpoint
            let levels = 42;
            for j in 0..levels {
                let (plo, phi) = if k == 0 {
                    (lo + h * 2f64.powi(-(j as i32) - 1), lo + h * 2f64.powi(-(j as i32)))
                } else {
                    (hi - h * 2f64.powi(-(j as i32)), hi - h * 2f64.powi(-(j as i32) - 1))
                };
                let ph = phi - plo;
                total += ph * gl.apply(|v| integrand(plo + ph * v));
            }
            // the leftover sliver next to the endpoint, where the integrand
            // is continuous (the images vanish there)
            let sliver = h * 2f64.powi(-(levels as i32));
            let (plo, ph) = if k == 0 { (lo, sliver) } else { (hi - sliver, sliver) };
            total += ph * gl.apply(|v| integrand(plo + ph * v));
        } else {
            total += h * gl.apply(|v| integrand(clo + h * v));
        }
    }
    Ok(total)
}

// A log power or a fractional-exponent mu integrand has an algebraic
// singularity at the far end of the inner interval, where the Jacobi weight
// cannot absorb it; the graded mesh resolves it at every distance scale.
fn inner_spec(i: &Integrand, q: &QuadratureSpec) -> QuadratureSpec {
    match i {
        Integrand::LogPower(e) | Integrand::MuFamily(e) if e.fract() != 0.0 => QuadratureSpec {
            rule: quad::QuadRule::AdaptiveGraded,
            points: q.points.clamp(8, 24),
            rel_tol: q.rel_tol.max(1e-10),
        },
        _ => *q,
    }
}

pub fn integration_by_parts_residual(
    f: &Integrand,
    g: &Integrand,
    p: &FracParams,
    q: &QuadratureSpec,
) -> Result<f64> {
    f.validate()?;
    g.validate()?;
    p.require_positive_left()?;
    let outer_tol = q.rel_tol.max(1e-9);
    let (lo, hi) = (p.a.ln(), p.t_end.ln());
    let qf = inner_spec(f, q);
    let qg = inner_spec(g, q);
    let side1 = outer_integral(f, g, lo, hi, outer_tol, |u| {
        let t = u.exp();
        let jf = best_value(rl_left_fn(p.sigma, lo, u, |v| f.eval(v.exp(), p), &qf));
        jf * g.eval(t, p)
    })?;
    let side2 = outer_integral(f, g, lo, hi, outer_tol, |u| {
        let t = u.exp();
        let jg = best_value(rl_right_fn(p.sigma, u, hi, |v| g.eval(v.exp(), p), &qg));
        f.eval(t, p) * jg
    })?;
    let residual = side1 - side2;
    if !residual.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            value: residual,
            achieved: f64::NAN,
            requested: q.rel_tol,
        });
    }
    Ok(residual)
}

/// Magnitude of the first side of the integration-by-parts identity, for
/// scaling residual tolerances.
pub fn integration_by_parts_scale(
    f: &Integrand,
    g: &Integrand,
    p: &FracParams,
    q: &QuadratureSpec,
) -> Result<f64> {
    let (lo, hi) = (p.a.ln(), p.t_end.ln());
    let outer_tol = q.rel_tol.max(1e-9);
    let qf = inner_spec(f, q);
    let side1 = outer_integral(f, g, lo, hi, outer_tol, |u| {
        let t = u.exp();
        let jf = best_value(rl_left_fn(p.sigma, lo, u, |v| f.eval(v.exp(), p), &qf));
        (jf * g.eval(t, p)).abs()
    })?;
    Ok(side1.abs())
}

/// Closed-form image used as a test oracle throughout:
/// J_a^σ (ln t/a)^β = Γ(β+1)/Γ(β+σ+1) (ln t/a)^{β+σ}.
pub fn log_power_left_image(beta: f64, sigma: f64, a: f64, t: f64) -> f64 {
    gamma_ratio(beta + 1.0, beta + sigma + 1.0) * (t / a).ln().powf(beta + sigma)
}

/// Oracle for the Hadamard–Caputo derivative of a log power:
/// 𝒟_a^α (ln t/a)^β = Γ(β+1)/Γ(β+1−α) (ln t/a)^{β−α}.
pub fn log_power_caputo_image(beta: f64, alpha: f64, a: f64, t: f64) -> f64 {
    gamma_ratio(beta + 1.0, beta + 1.0 - alpha) * (t / a).ln().powf(beta - alpha)
}
