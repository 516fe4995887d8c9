//! The concrete test-function family: the time weight μ and η = μ/t, smooth
//! radial cutoffs ξ_R with exact plateau and support, and the composite
//! φ(t, x) = η(t) ξ_R^ℓ(x), together with the closed-form fractional images
//! of μ.

use crate::error::{Error, Result};
use crate::special::gamma_ratio;

/// Parameters of μ(t) = (ln T/a)^{−κ} (ln T/t)^{κ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuParams {
    pub a: f64,
    pub t_end: f64,
    pub kappa: f64,
}

impl MuParams {
    pub fn new(a: f64, t_end: f64, kappa: f64) -> Result<Self> {
        if !(a > 0.0 && t_end > a) {
            return Err(Error::Domain(format!(
                "mu needs 0 < a < T, got [{a}, {t_end}]"
            )));
        }
        if !(kappa >= 1.0) {
            return Err(Error::Domain(format!("mu needs kappa >= 1, got {kappa}")));
        }
        Ok(Self { a, t_end, kappa })
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !(t >= self.a && t <= self.t_end) {
            return Err(Error::Domain(format!(
                "t = {t} outside [{}, {}]",
                self.a, self.t_end
            )));
        }
        Ok(())
    }

    /// ln(T/a), the log length of the interval.
    pub fn log_length(&self) -> f64 {
        (self.t_end / self.a).ln()
    }
}

/// μ(t); equals 1 at t = a and 0 at t = T.
pub fn mu_eval(m: &MuParams, t: f64) -> Result<f64> {
    m.check_t(t)?;
    Ok(m.log_length().powf(-m.kappa) * (m.t_end / t).ln().powf(m.kappa))
}

/// Closed form of (J_T^σ μ)(t):
/// Γ(κ+1)/Γ(σ+κ+1) (ln T/a)^{−κ} (ln T/t)^{σ+κ}.
pub fn mu_right_image(m: &MuParams, sigma: f64, t: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be > 0, got {sigma}")));
    }
    m.check_t(t)?;
    Ok(gamma_ratio(m.kappa + 1.0, sigma + m.kappa + 1.0)
        * m.log_length().powf(-m.kappa)
        * (m.t_end / t).ln().powf(sigma + m.kappa))
}

/// Closed form of t (J_T^σ μ)'(t):
/// −Γ(κ+1)/Γ(σ+κ) (ln T/a)^{−κ} (ln T/t)^{σ+κ−1}; nonpositive everywhere.
pub fn mu_right_image_tderiv(m: &MuParams, sigma: f64, t: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be > 0, got {sigma}")));
    }
    m.check_t(t)?;
    Ok(-gamma_ratio(m.kappa + 1.0, sigma + m.kappa)
        * m.log_length().powf(-m.kappa)
        * (m.t_end / t).ln().powf(sigma + m.kappa - 1.0))
}

/// Spatial cutoff parameters: radius R, power ℓ, dimension N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffParams {
    pub radius: f64,
    pub ell: u32,
    pub dim: u32,
}

impl CutoffParams {
    pub fn new(radius: f64, ell: u32, dim: u32) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("cutoff radius must be > 0, got {radius}")));
        }
        if ell < 2 {
            return Err(Error::Domain(format!("cutoff power ell must be >= 2, got {ell}")));
        }
        if dim < 1 {
            return Err(Error::Domain("dimension must be >= 1".into()));
        }
        Ok(Self { radius, ell, dim })
    }
}

// Profile ψ(r) = h(2−r)/(h(2−r) + h(r−1)), h(s) = exp(−1/s) for s > 0.
// C^∞ with ψ ≡ 1 on r <= 1 and ψ ≡ 0 on r >= 2 exactly. A guard band
// around the seams avoids evaluating h at denormal arguments.
const SEAM_GUARD: f64 = 1e-12;

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

fn bump_d1(s: f64) -> f64 {
    if s > 0.0 {
        bump(s) / (s * s)
    } else {
        0.0
    }
}

fn bump_d2(s: f64) -> f64 {
    if s > 0.0 {
        bump(s) * (1.0 - 2.0 * s) / s.powi(4)
    } else {
        0.0
    }
}

/// ψ, ψ', ψ'' at the normalized radius r̂ = |x|/R.
fn psi_all(r: f64) -> (f64, f64, f64) {
    if r <= 1.0 + SEAM_GUARD {
        return (1.0, 0.0, 0.0);
    }
    if r >= 2.0 - SEAM_GUARD {
        return (0.0, 0.0, 0.0);
    }
    let a = bump(2.0 - r);
    let a1 = -bump_d1(2.0 - r);
    let a2 = bump_d2(2.0 - r);
    let b = bump(r - 1.0);
    let b1 = bump_d1(r - 1.0);
    let b2 = bump_d2(r - 1.0);
    let s = a + b;
    let s1 = a1 + b1;
    let s2 = a2 + b2;
    let psi = a / s;
    let psi1 = (a1 * s - a * s1) / (s * s);
    let psi2 = (a2 * s - a * s2) / (s * s) - 2.0 * s1 * (a1 * s - a * s1) / (s * s * s);
    (psi, psi1, psi2)
}

/// ξ_R(x) as a function of |x|: 1 on B_R, 0 outside B_{2R}, smooth between.
pub fn cutoff_eval(c: &CutoffParams, x_norm: f64) -> f64 {
    psi_all(x_norm / c.radius).0
}

/// |∇ξ_R| = |ψ'(|x|/R)| / R.
pub fn cutoff_grad_norm(c: &CutoffParams, x_norm: f64) -> f64 {
    psi_all(x_norm / c.radius).1.abs() / c.radius
}

/// Δξ_R = ψ''(r̂)/R² + (N−1) ψ'(r̂)/(R |x|); the origin takes the smooth
/// limit N ψ''(0)/R², which is 0 on the plateau.
pub fn cutoff_laplacian(c: &CutoffParams, x_norm: f64) -> f64 {
    let r_hat = x_norm / c.radius;
    let (_, d1, d2) = psi_all(r_hat);
    if x_norm == 0.0 {
        return c.dim as f64 * d2 / (c.radius * c.radius);
    }
    d2 / (c.radius * c.radius) + (c.dim as f64 - 1.0) * d1 / (c.radius * x_norm)
}

/// Δ(ξ_R^ℓ) via the identity
/// Δ(ξ^ℓ) = ℓ ξ^{ℓ−2} ((ℓ−1)|∇ξ|² + ξ Δξ).
pub fn laplacian_of_power(c: &CutoffParams, x_norm: f64) -> f64 {
    let r_hat = x_norm / c.radius;
    let (psi, d1, _) = psi_all(r_hat);
    if psi == 0.0 {
        return 0.0;
    }
    let grad2 = (d1 / c.radius).powi(2);
    let lap = cutoff_laplacian(c, x_norm);
    let ell = c.ell as f64;
    ell * psi.powi(c.ell as i32 - 2) * ((ell - 1.0) * grad2 + psi * lap)
}

/// The annulus factorization ξ^{−ℓ/(p−1)} |Δ(ξ^ℓ)|^{p/(p−1)}, combined so the
/// negative power of ξ cancels before any evaluation can blow up. The net
/// exponent ℓ − 2p/(p−1) must be positive (checked by the probe guards).
pub fn k22_density(c: &CutoffParams, p: f64, x_norm: f64) -> f64 {
    let r_hat = x_norm / c.radius;
    let (psi, d1, _) = psi_all(r_hat);
    if psi == 0.0 || psi == 1.0 {
        return 0.0;
    }
    let pp = p / (p - 1.0);
    let ell = c.ell as f64;
    let grad2 = (d1 / c.radius).powi(2);
    let lap = cutoff_laplacian(c, x_norm);
    let inner = ell * ((ell - 1.0) * grad2 + psi * lap);
    // ξ^{(ℓ−2)p/(p−1) − ℓ/(p−1)} = ξ^{ℓ − 2p/(p−1)}
    psi.powf(ell - 2.0 * pp) * inner.abs().powf(pp)
}

/// The composite test function φ(t, x) = η(t) ξ_R^ℓ(x), η = μ/t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub mu: MuParams,
    pub cutoff: CutoffParams,
}

impl TestFunction {
    pub fn new(mu: MuParams, cutoff: CutoffParams) -> Self {
        Self { mu, cutoff }
    }

    /// η(t) = μ(t)/t.
    pub fn eta(&self, t: f64) -> Result<f64> {
        Ok(mu_eval(&self.mu, t)? / t)
    }

    /// φ(t, x) for |x| = x_norm.
    pub fn eval(&self, t: f64, x_norm: f64) -> Result<f64> {
        Ok(self.eta(t)? * cutoff_eval(&self.cutoff, x_norm).powi(self.cutoff.ell as i32))
    }
}

/// The scalar factor of (J_{T|t}^{1−α} tφ)(a, x) = factor · ξ_R^ℓ(x):
/// Γ(κ+1)/Γ(κ+2−α) (ln T/a)^{1−α}. Since tφ = μ ξ_R^ℓ, this is the μ image
/// at t = a.
pub fn phi_weighted_image_at_a(tf: &TestFunction, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let kappa = tf.mu.kappa;
    Ok(gamma_ratio(kappa + 1.0, kappa + 2.0 - alpha) * tf.mu.log_length().powf(1.0 - alpha))
}

/// Smallest integer κ with κ − αp/(p−1) comfortably positive.
pub fn default_kappa(alpha: f64, p: f64) -> f64 {
    (alpha * p / (p - 1.0)).ceil() + 2.0
}

/// Smallest integer ℓ with ℓ − 2p/(p−1) comfortably positive.
pub fn default_ell(p: f64) -> u32 {
    (2.0 * p / (p - 1.0)).ceil() as u32 + 2
}
