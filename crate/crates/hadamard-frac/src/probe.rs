//! Numerical verification of the proof-chain estimates: the K₁/K₂
//! factorizations and their upper bounds, the master inequality under the
//! T = exp(R^θ) scaling, the decay exponent, and the weak-formulation
//! residuals.
//!
//! With θ = 2/α the scaled interval length ln(T/a) = R^θ exceeds anything
//! representable as T itself, so this module computes every time integral in
//! the u = ln(t/a) coordinate and never materializes T.

use serde::Serialize;

use crate::criterion::{duality_coefficients, ProblemParams, SignFunctionals};
use crate::error::{Error, Result};
use crate::initial::{cutoff_weighted_integral, sphere_area, RadialProfile};
use crate::quad::{self, QuadratureSpec};
use crate::special::gamma_ratio;
use crate::testfn::{
    cutoff_eval, k22_density, laplacian_of_power, mu_eval, mu_right_image, mu_right_image_tderiv,
    CutoffParams, MuParams,
};

/// Configuration for one probe run.
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    pub pp: ProblemParams,
    /// Exponent κ of the time weight μ; must exceed αp/(p−1).
    pub kappa: f64,
    /// Cutoff power ℓ; must exceed 2p/(p−1).
    pub ell: u32,
    pub r_grid: Vec<f64>,
    /// Scaling exponent in T = exp(R^θ); 2/α equalizes the two R powers.
    pub theta: f64,
    pub quad: QuadratureSpec,
    /// Radial profiles feeding f₁ and f₂; when absent the left-hand side
    /// falls back to the full sign functionals.
    pub f_real: Option<RadialProfile>,
    pub f_imag: Option<RadialProfile>,
}

impl ProbeConfig {
    pub fn new(
        pp: ProblemParams,
        kappa: f64,
        ell: u32,
        r_grid: Vec<f64>,
        theta: f64,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        let pq = pp.p / (pp.p - 1.0);
        if !(kappa > pp.alpha * pq) {
            return Err(Error::Config(format!(
                "kappa = {kappa} must exceed alpha*p/(p-1) = {}",
                pp.alpha * pq
            )));
        }
        if !((ell as f64) > 2.0 * pq) {
            return Err(Error::Config(format!(
                "ell = {ell} must exceed 2p/(p-1) = {}",
                2.0 * pq
            )));
        }
        if !(pp.gamma < pp.p - 1.0) {
            return Err(Error::Config(format!(
                "gamma = {} must be below p-1 = {} for the K integrals to converge",
                pp.gamma,
                pp.p - 1.0
            )));
        }
        if r_grid.is_empty() || r_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("R grid must be nonempty and increasing".into()));
        }
        if !(theta > 0.0) {
            return Err(Error::Config(format!("theta must be > 0, got {theta}")));
        }
        Ok(Self {
            pp,
            kappa,
            ell,
            r_grid,
            theta,
            quad,
            f_real: None,
            f_imag: None,
        })
    }

    pub fn with_profiles(mut self, f_real: Option<RadialProfile>, f_imag: Option<RadialProfile>) -> Self {
        self.f_real = f_real;
        self.f_imag = f_imag;
        self
    }

    fn cutoff_at(&self, radius: f64) -> CutoffParams {
        CutoffParams::new(radius, self.ell, self.pp.dim).expect("validated in constructor")
    }
}

/// One row of the R sweep. All time dependence enters through
/// `ln_t_over_a` = ln(T/a) = R^θ.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProbeRow {
    pub r: f64,
    pub ln_t_over_a: f64,
    pub k11_quad: f64,
    pub k11_bound: f64,
    pub k12: f64,
    pub k21_quad: f64,
    pub k21_bound: f64,
    pub k22: f64,
    pub k1: f64,
    pub k2: f64,
    pub lhs: f64,
    pub rhs_bound: f64,
    pub decay_exponent: f64,
}

/// (Nα(p−1) − 2(α+γ)) / (α(p−1)), the R power of the scaled right side.
pub fn decay_exponent(pp: &ProblemParams) -> f64 {
    let n = pp.dim as f64;
    (n * pp.alpha * (pp.p - 1.0) - 2.0 * (pp.alpha + pp.gamma)) / (pp.alpha * (pp.p - 1.0))
}

/// The two R exponents of the scaled master inequality; θ = 2/α makes them
/// equal (to the decay exponent) as exact real arithmetic.
pub fn r_exponents(pp: &ProblemParams, theta: f64) -> (f64, f64) {
    let n = pp.dim as f64;
    let pm1 = pp.p - 1.0;
    let e1 = n + theta * (pp.alpha - (pp.gamma + pp.alpha * pp.p) / pm1);
    let e2 = n - 2.0 * pp.p / pm1 + theta * (pp.alpha - pp.gamma / pm1);
    (e1, e2)
}

/// K₁₁ by quadrature and its closed-form upper bound.
///
/// The integrand collapses, through the closed form of t(J_T^{1−α}μ)'(t),
/// to a Beta-type integral in u = ln(t/a); only the left-endpoint power
/// u^{−γ/(p−1)} is absorbed by the Jacobi weight, the smooth
/// (1 − u/L)^{κ−αp/(p−1)} factor is sampled.
pub fn k1_terms(cfg: &ProbeConfig, radius: f64) -> Result<(f64, f64, f64, f64)> {
    let pp = &cfg.pp;
    let pq = pp.p / (pp.p - 1.0);
    let gq = pp.gamma / (pp.p - 1.0);
    let big_l = radius.powf(cfg.theta);
    let c_gamma = gamma_ratio(cfg.kappa + 1.0, 1.0 - pp.alpha + cfg.kappa).powf(pq);
    let smooth_exp = cfg.kappa - pp.alpha * pq;

    let shape = quad::weighted_01(&cfg.quad, 0.0, -gq, |tau| (1.0 - tau).powf(smooth_exp))?;
    let k11_quad = c_gamma * big_l.powf(1.0 - gq - pp.alpha * pq) * shape.value;
    let k11_bound =
        c_gamma * (1.0 - gq).recip() * big_l.powf(1.0 - (pp.gamma + pp.alpha * pp.p) / (pp.p - 1.0));

    let k12 = cutoff_mass(cfg, radius)?;
    Ok((k11_quad, k11_bound, k12, k11_quad * k12))
}

/// ∫ ξ_R^ℓ dx: exact ball volume on the plateau plus quadrature over the
/// annulus.
fn cutoff_mass(cfg: &ProbeConfig, radius: f64) -> Result<f64> {
    let n = cfg.pp.dim as f64;
    let omega = sphere_area(cfg.pp.dim)?;
    let c = cfg.cutoff_at(radius);
    let plateau = radius.powf(n) / n;
    let annulus = quad::tanh_sinh(
        |r| cutoff_eval(&c, r).powi(cfg.ell as i32) * r.powf(n - 1.0),
        radius,
        2.0 * radius,
        1e-10,
    )?;
    Ok(omega * (plateau + annulus.value))
}

/// K₂₁ by quadrature with its bound, and K₂₂ over the annulus.
pub fn k2_terms(cfg: &ProbeConfig, radius: f64) -> Result<(f64, f64, f64, f64)> {
    let pp = &cfg.pp;
    let gq = pp.gamma / (pp.p - 1.0);
    let big_l = radius.powf(cfg.theta);

    // ∫₀^L u^{−γ/(p−1)} (1 − u/L)^κ du / L^κ … = L^{1−γ/(p−1)} ∫₀¹ τ^{−gq}(1−τ)^κ dτ
    let shape = quad::weighted_01(&cfg.quad, 0.0, -gq, |tau| (1.0 - tau).powf(cfg.kappa))?;
    let k21_quad = big_l.powf(1.0 - gq) * shape.value;
    let k21_bound = (1.0 - gq).recip() * big_l.powf(1.0 - gq);

    let n = pp.dim as f64;
    let omega = sphere_area(pp.dim)?;
    let c = cfg.cutoff_at(radius);
    // |Δ(ξ^ℓ)|^{p/(p−1)} has kinks where the Laplacian changes sign inside
    // the annulus; integrate piecewise between those roots.
    let mut k22 = 0.0;
    let breaks = laplacian_sign_changes(&c, radius);
    for seg in breaks.windows(2) {
        let piece = quad::tanh_sinh(
            |r| k22_density(&c, pp.p, r) * r.powf(n - 1.0),
            seg[0],
            seg[1],
            1e-9,
        )?;
        k22 += omega * piece.value;
    }
    Ok((k21_quad, k21_bound, k22, k21_quad * k22))
}

/// Points of [R, 2R] where Δ(ξ_R^ℓ) crosses zero, bracketed by a scan and
/// sharpened by bisection; returned with the endpoints included.
fn laplacian_sign_changes(c: &CutoffParams, radius: f64) -> Vec<f64> {
    let scan = 256;
    let mut breaks = vec![radius];
    let step = radius / scan as f64;
    let mut prev_r = radius + 1e-9 * radius;
    let mut prev = laplacian_of_power(c, prev_r);
    for k in 1..=scan {
        let r = radius + step * k as f64;
        let v = laplacian_of_power(c, r.min(2.0 * radius - 1e-9 * radius));
        if prev != 0.0 && v != 0.0 && prev.signum() != v.signum() {
            let (mut lo, mut hi) = (prev_r, r);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if laplacian_of_power(c, mid).signum() == prev.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            breaks.push(0.5 * (lo + hi));
        }
        prev_r = r;
        prev = v;
    }
    breaks.push(2.0 * radius);
    breaks
}

/// Assemble one probe row: both K factorizations, the scaled right side
/// (with unit constant), and the cutoff-weighted left side.
pub fn master_inequality(cfg: &ProbeConfig, sf: &SignFunctionals, radius: f64) -> Result<ProbeRow> {
    if !sf.triggered() {
        return Err(Error::Config(
            "master inequality needs I1 > 0 or I2 > 0 selected".into(),
        ));
    }
    let (k11_quad, k11_bound, k12, k1) = k1_terms(cfg, radius)?;
    let (k21_quad, k21_bound, k22, k2) = k2_terms(cfg, radius)?;
    let big_l = radius.powf(cfg.theta);

    // Divide out the left-hand-side weight Γ(κ+1)/Γ(κ+2−α) (ln T/a)^{1−α}.
    let phi_factor =
        gamma_ratio(cfg.kappa + 1.0, cfg.kappa + 2.0 - cfg.pp.alpha) * big_l.powf(1.0 - cfg.pp.alpha);
    let rhs_bound = (k1 + k2) / phi_factor;

    let lhs = cutoff_weighted_functional(cfg, sf, radius)?;

    Ok(ProbeRow {
        r: radius,
        ln_t_over_a: big_l,
        k11_quad,
        k11_bound,
        k12,
        k21_quad,
        k21_bound,
        k22,
        k1,
        k2,
        lhs,
        rhs_bound,
        decay_exponent: decay_exponent(&cfg.pp),
    })
}

/// The selected sign functional with the initial data weighted by ξ_R^ℓ;
/// without profiles the full functional stands in (its R → ∞ limit).
fn cutoff_weighted_functional(cfg: &ProbeConfig, sf: &SignFunctionals, radius: f64) -> Result<f64> {
    let use_i1 = sf.i1 > 0.0;
    if cfg.f_real.is_none() && cfg.f_imag.is_none() {
        return Ok(if use_i1 { sf.i1 } else { sf.i2 });
    }
    let c = cfg.cutoff_at(radius);
    let d = duality_coefficients(cfg.pp.alpha)?;
    let f1 = cfg
        .f_real
        .as_ref()
        .map(|rp| cutoff_weighted_integral(rp, &c))
        .transpose()?
        .unwrap_or(0.0);
    let f2 = cfg
        .f_imag
        .as_ref()
        .map(|rp| cutoff_weighted_integral(rp, &c))
        .transpose()?
        .unwrap_or(0.0);
    Ok(if use_i1 {
        cfg.pp.lambda.0 * (d.r_alpha * f1 - d.s_alpha * f2)
    } else {
        cfg.pp.lambda.1 * (d.s_alpha * f1 + d.r_alpha * f2)
    })
}

/// Result of sweeping the R grid.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub rows: Vec<ProbeRow>,
    /// Least-squares slope of ln rhs_bound against ln R.
    pub fitted_slope: f64,
    pub decay_exponent: f64,
    /// Whether the decay exponent is negative, i.e. the right side shrinks
    /// and the contradiction argument applies.
    pub contradiction_regime: bool,
    /// The two R exponents of the scaled inequality at the configured θ.
    pub r_exponent_first: f64,
    pub r_exponent_second: f64,
}

/// Drive [`master_inequality`] over the R grid and fit the observed slope.
pub fn sweep(cfg: &ProbeConfig, sf: &SignFunctionals) -> Result<SweepSummary> {
    let rows: Vec<ProbeRow> = cfg
        .r_grid
        .iter()
        .map(|&radius| master_inequality(cfg, sf, radius))
        .collect::<Result<_>>()?;

    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|row| (row.r.ln(), row.rhs_bound.ln()))
        .collect();
    let fitted_slope = least_squares_slope(&pts);
    let exponent = decay_exponent(&cfg.pp);
    let (e1, e2) = r_exponents(&cfg.pp, cfg.theta);
    Ok(SweepSummary {
        rows,
        fitted_slope,
        decay_exponent: exponent,
        contradiction_regime: exponent < 0.0,
        r_exponent_first: e1,
        r_exponent_second: e2,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Optimal constant C(ε) of the scalar Young inequality
/// xy ≤ ε x^p + C(ε) y^{p/(p−1)}.
pub fn young_constant(eps: f64, p: f64) -> f64 {
    (p - 1.0) / p * (eps * p).powf(-1.0 / (p - 1.0))
}

/// Real and imaginary parts of a complex field sampled on a tensor grid:
/// log-uniform in t on [a, T], uniform in |x| on [0, 2R].
#[derive(Debug, Clone)]
pub struct SampledComplexField {
    pub a: f64,
    pub t_end: f64,
    /// Cutoff radius R; the radial grid extends to 2R.
    pub radius: f64,
    pub nt: usize,
    pub nr: usize,
    /// Row-major [time][radius] samples.
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl SampledComplexField {
    pub fn sample(
        a: f64,
        t_end: f64,
        radius: f64,
        nt: usize,
        nr: usize,
        field: impl Fn(f64, f64) -> (f64, f64),
    ) -> Result<Self> {
        // Simpson with one halving step needs nt, nr ≡ 1 (mod 4).
        if nt < 5 || nr < 5 || (nt - 1) % 4 != 0 || (nr - 1) % 4 != 0 {
            return Err(Error::Grid(format!(
                "tensor grid sizes must be 4k+1 and >= 5, got ({nt}, {nr})"
            )));
        }
        if !(a > 0.0 && t_end > a && radius > 0.0) {
            return Err(Error::Grid("field needs 0 < a < T and R > 0".into()));
        }
        let mut u1 = Vec::with_capacity(nt * nr);
        let mut u2 = Vec::with_capacity(nt * nr);
        for i in 0..nt {
            let t = a * (t_end / a).powf(i as f64 / (nt - 1) as f64);
            for j in 0..nr {
                let r = 2.0 * radius * j as f64 / (nr - 1) as f64;
                let (re, im) = field(t, r);
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::Grid(format!("non-finite field sample at ({t}, {r})")));
                }
                u1.push(re);
                u2.push(im);
            }
        }
        Ok(Self {
            a,
            t_end,
            radius,
            nt,
            nr,
            u1,
            u2,
        })
    }

    pub fn zero(a: f64, t_end: f64, radius: f64, nt: usize, nr: usize) -> Result<Self> {
        Self::sample(a, t_end, radius, nt, nr, |_, _| (0.0, 0.0))
    }

    fn time_node(&self, i: usize) -> f64 {
        self.a * (self.t_end / self.a).powf(i as f64 / (self.nt - 1) as f64)
    }

    fn radial_node(&self, j: usize) -> f64 {
        2.0 * self.radius * j as f64 / (self.nr - 1) as f64
    }
}

/// Composite Simpson weights on an odd-length uniform grid.
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = if i == 0 || i == n - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        } * h
            / 3.0;
    }
    w
}

/// Tensor Simpson of a sampled integrand with one Richardson step
/// (full grid vs every-other-node grid, fourth-order extrapolation).
fn tensor_integral(values: &[f64], nt: usize, nr: usize, ht: f64, hr: f64) -> f64 {
    let full = tensor_simpson(values, nt, nr, ht, hr, 1);
    let half = tensor_simpson(values, nt, nr, ht, hr, 2);
    (16.0 * full - half) / 15.0
}

fn tensor_simpson(values: &[f64], nt: usize, nr: usize, ht: f64, hr: f64, stride: usize) -> f64 {
    let mt = (nt - 1) / stride + 1;
    let mr = (nr - 1) / stride + 1;
    let wt = simpson_weights(mt, ht * stride as f64);
    let wr = simpson_weights(mr, hr * stride as f64);
    let mut acc = 0.0;
    for (ii, wti) in wt.iter().enumerate() {
        let i = ii * stride;
        for (jj, wrj) in wr.iter().enumerate() {
            let j = jj * stride;
            acc += wti * wrj * values[i * nr + j];
        }
    }
    acc
}

/// Residuals of the two weak-formulation identities for a sampled field.
///
/// Each residual is (nonlinear term + initial-data term) − (Laplacian term −
/// time-derivative term); a true weak solution makes both vanish.
pub fn weak_residuals(u: &SampledComplexField, cfg: &ProbeConfig) -> Result<(f64, f64)> {
    let pp = &cfg.pp;
    let mu = MuParams::new(u.a, u.t_end, cfg.kappa)?;
    let c = CutoffParams::new(u.radius, cfg.ell, pp.dim)?;
    let d = duality_coefficients(pp.alpha)?;
    let omega = sphere_area(pp.dim)?;
    let n = pp.dim as f64;
    let ell = cfg.ell as i32;

    let ht = (u.t_end / u.a).ln() / (u.nt - 1) as f64;
    let hr = 2.0 * u.radius / (u.nr - 1) as f64;

    let nt = u.nt;
    let nr = u.nr;
    let mut nonlinear = vec![0.0; nt * nr];
    let mut lap1 = vec![0.0; nt * nr];
    let mut lap2 = vec![0.0; nt * nr];
    let mut tder1 = vec![0.0; nt * nr];
    let mut tder2 = vec![0.0; nt * nr];

    for i in 0..nt {
        let t = u.time_node(i);
        let eta = mu_eval(&mu, t)? / t;
        let djmu = mu_right_image_tderiv(&mu, 1.0 - pp.alpha, t)? / t;
        for j in 0..nr {
            let r = u.radial_node(j);
            let xi_pow = cutoff_eval(&c, r).powi(ell);
            let radial = omega * r.powf(n - 1.0);
            // time measure: dt = t du in the log coordinate
            let measure = radial * t;
            let idx = i * nr + j;
            let (u1, u2) = (u.u1[idx], u.u2[idx]);
            let magnitude = (u1 * u1 + u2 * u2).sqrt().powf(pp.p);
            if magnitude != 0.0 {
                nonlinear[idx] = (t / u.a).ln().powf(pp.gamma) * magnitude * eta * xi_pow * measure;
            }
            let lap_phi = eta * laplacian_of_power(&c, r);
            lap1[idx] = u1 * lap_phi * measure;
            lap2[idx] = u2 * lap_phi * measure;
            let dt_term = djmu * xi_pow;
            tder1[idx] = (d.r_alpha * u1 - d.s_alpha * u2) * dt_term * measure;
            tder2[idx] = (d.s_alpha * u1 + d.r_alpha * u2) * dt_term * measure;
        }
    }

    let nonlinear_total = tensor_integral(&nonlinear, nt, nr, ht, hr);
    let lap1_total = tensor_integral(&lap1, nt, nr, ht, hr);
    let lap2_total = tensor_integral(&lap2, nt, nr, ht, hr);
    let tder1_total = tensor_integral(&tder1, nt, nr, ht, hr);
    let tder2_total = tensor_integral(&tder2, nt, nr, ht, hr);

    // Initial-data terms over the same radial grid (Simpson + Richardson in
    // one dimension via a degenerate tensor call).
    let factor = mu_right_image(&mu, 1.0 - pp.alpha, u.a)?;
    let mut data1 = vec![0.0; nr];
    let mut data2 = vec![0.0; nr];
    for j in 0..nr {
        let r = u.radial_node(j);
        let xi_pow = cutoff_eval(&c, r).powi(ell);
        let radial = omega * r.powf(n - 1.0);
        let f1 = cfg
            .f_real
            .as_ref()
            .map(|rp| rp.reduced_density(r) / r.powf(n - 1.0).max(f64::MIN_POSITIVE))
            .unwrap_or(0.0);
        let f2 = cfg
            .f_imag
            .as_ref()
            .map(|rp| rp.reduced_density(r) / r.powf(n - 1.0).max(f64::MIN_POSITIVE))
            .unwrap_or(0.0);
        data1[j] = (d.r_alpha * f1 - d.s_alpha * f2) * factor * xi_pow * radial;
        data2[j] = (d.s_alpha * f1 + d.r_alpha * f2) * factor * xi_pow * radial;
    }
    let data1_total = radial_integral(&data1, nr, hr);
    let data2_total = radial_integral(&data2, nr, hr);

    let res1 = pp.lambda.0 * nonlinear_total + data1_total - (lap1_total - tder1_total);
    let res2 = pp.lambda.1 * nonlinear_total + data2_total - (lap2_total - tder2_total);
    Ok((res1, res2))
}

fn radial_integral(values: &[f64], nr: usize, hr: f64) -> f64 {
    let full: f64 = simpson_weights(nr, hr)
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum();
    let m = (nr - 1) / 2 + 1;
    let half: f64 = simpson_weights(m, 2.0 * hr)
        .iter()
        .enumerate()
        .map(|(j, w)| w * values[2 * j])
        .sum();
    (16.0 * full - half) / 15.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{ProfilePart, ProfileTag};
    use crate::special::gamma_fn;
    use crate::testfn::{default_ell, default_kappa};
    use approx::assert_relative_eq;

    fn canonical_cfg() -> ProbeConfig {
        let pp = ProblemParams::new(0.5, 0.0, 1, 2.0, (1.0, 0.0), 1.0).unwrap();
        ProbeConfig::new(
            pp,
            default_kappa(0.5, 2.0),
            default_ell(2.0),
            vec![10.0, 20.0, 40.0, 80.0],
            4.0,
            QuadratureSpec::default(),
        )
        .unwrap()
    }

    fn sign_pos() -> SignFunctionals {
        SignFunctionals { i1: 1.0, i2: 0.0 }
    }

    #[test]
    fn guards_reject_small_exponents() {
        let pp = ProblemParams::new(0.5, 0.0, 1, 2.0, (1.0, 0.0), 1.0).unwrap();
        assert!(ProbeConfig::new(pp, 1.0, 6, vec![10.0], 4.0, QuadratureSpec::default()).is_err());
        assert!(ProbeConfig::new(pp, 3.0, 2, vec![10.0], 4.0, QuadratureSpec::default()).is_err());
        assert!(ProbeConfig::new(pp, 3.0, 6, vec![], 4.0, QuadratureSpec::default()).is_err());
        assert!(
            ProbeConfig::new(pp, 3.0, 6, vec![10.0, 5.0], 4.0, QuadratureSpec::default()).is_err()
        );
    }

    #[test]
    fn k11_quad_below_bound_and_spot_value() {
        // α=0.5, γ=0, p=2, κ=4, L=1: bound = [Γ(5)/Γ(4.5)]².
        let pp = ProblemParams::new(0.5, 0.0, 1, 2.0, (1.0, 0.0), 1.0).unwrap();
        let cfg = ProbeConfig::new(
            pp,
            4.0,
            6,
            vec![1.0],
            1.0, // L = R^θ = 1 at R = 1
            QuadratureSpec::default(),
        )
        .unwrap();
        let (k11_quad, k11_bound, _, _) = k1_terms(&cfg, 1.0).unwrap();
        let expected_bound = (24.0 / gamma_fn(4.5).unwrap()).powi(2);
        assert_relative_eq!(k11_bound, expected_bound, max_relative = 1e-11);
        assert!(k11_quad <= k11_bound * (1.0 + 1e-12));
        // γ = 0, κ − αp/(p−1) = 3: integral is exactly 1/4 of the bound's 1.
        assert_relative_eq!(k11_quad, expected_bound / 4.0, max_relative = 1e-10);
    }

    #[test]
    fn k11_bound_power_law_in_log_length() {
        let cfg = canonical_cfg();
        let (_, b1, _, _) = k1_terms(&cfg, 10.0).unwrap();
        let (_, b2, _, _) = k1_terms(&cfg, 10.0 * 2f64.powf(1.0 / cfg.theta)).unwrap();
        // doubling ln(T/a) scales the bound by 2^{1−(γ+αp)/(p−1)}
        let pp = &cfg.pp;
        let scale = 2f64.powf(1.0 - (pp.gamma + pp.alpha * pp.p) / (pp.p - 1.0));
        assert_relative_eq!(b2 / b1, scale, max_relative = 1e-9);
    }

    #[test]
    fn k12_below_ball_volume() {
        let cfg = canonical_cfg();
        for &radius in &[5.0, 20.0] {
            let (_, _, k12, _) = k1_terms(&cfg, radius).unwrap();
            let n = cfg.pp.dim as f64;
            let ball = sphere_area(cfg.pp.dim).unwrap() / n * (2.0 * radius).powf(n);
            assert!(k12 > 0.0 && k12 <= ball, "k12 {k12} vs Vol(B_2R) {ball}");
        }
    }

    #[test]
    fn k21_quad_below_bound_and_gamma_zero_value() {
        let cfg = canonical_cfg();
        let radius = 3.0;
        let (k21_quad, k21_bound, _, _) = k2_terms(&cfg, radius).unwrap();
        assert!(k21_quad <= k21_bound * (1.0 + 1e-12));
        // γ = 0: bound is exactly ln(T/a)
        assert_relative_eq!(k21_bound, radius.powf(cfg.theta), max_relative = 1e-12);
    }

    #[test]
    fn k22_scaling_sweep() {
        let cfg = canonical_cfg();
        let (_, _, k22_a, _) = k2_terms(&cfg, 10.0).unwrap();
        let (_, _, k22_b, _) = k2_terms(&cfg, 20.0).unwrap();
        let pp = &cfg.pp;
        let expected = 2f64.powf(pp.dim as f64 - 2.0 * pp.p / (pp.p - 1.0));
        let ratio = k22_b / k22_a;
        assert!(
            (ratio / expected - 1.0).abs() < 0.05,
            "ratio {ratio} vs 2^(N-2p/(p-1)) = {expected}"
        );
    }

    #[test]
    fn theta_equalizes_r_exponents() {
        for (alpha, gamma, dim, p) in [
            (0.5, 0.0, 1u32, 2.0),
            (0.3, 0.1, 3, 1.8),
            (0.8, -0.2, 5, 1.4),
        ] {
            let pp = ProblemParams::new(alpha, gamma, dim, p, (1.0, 0.0), 1.0).unwrap();
            let (e1, e2) = r_exponents(&pp, 2.0 / alpha);
            assert_relative_eq!(e1, e2, max_relative = 1e-12, epsilon = 1e-12);
            assert_relative_eq!(e1, decay_exponent(&pp), max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn canonical_decay_exponent_is_minus_one() {
        let pp = ProblemParams::new(0.5, 0.0, 1, 2.0, (1.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(decay_exponent(&pp), -1.0, max_relative = 1e-15);
    }

    #[test]
    fn sweep_slope_matches_decay_exponent() {
        let cfg = canonical_cfg();
        let summary = sweep(&cfg, &sign_pos()).unwrap();
        assert!(summary.contradiction_regime);
        assert!(
            (summary.fitted_slope - summary.decay_exponent).abs() < 0.05,
            "slope {} vs exponent {}",
            summary.fitted_slope,
            summary.decay_exponent
        );
        for row in &summary.rows {
            assert!(row.k11_quad <= row.k11_bound * (1.0 + 1e-10));
            assert!(row.k21_quad <= row.k21_bound * (1.0 + 1e-10));
        }
    }

    #[test]
    fn out_of_region_p_grows() {
        // decay exponent > 0: the right side grows with R, no contradiction.
        let pp = ProblemParams::new(0.5, 0.0, 1, 6.0, (1.0, 0.0), 1.0).unwrap();
        let cfg = ProbeConfig::new(
            pp,
            default_kappa(0.5, 6.0),
            default_ell(6.0),
            vec![10.0, 20.0, 40.0],
            4.0,
            QuadratureSpec::default(),
        )
        .unwrap();
        let summary = sweep(&cfg, &sign_pos()).unwrap();
        assert!(summary.decay_exponent > 0.0);
        assert!(!summary.contradiction_regime);
        assert!(summary.fitted_slope > 0.0);
    }

    #[test]
    fn lhs_stabilizes_to_full_functional() {
        let pp = ProblemParams::new(0.5, 1.0 / 3.0, 3, 2.0, (1.0, 0.0), 1.0).unwrap();
        let profile = RadialProfile::new(ProfileTag::ExpDecay, 3, ProfilePart::Real).unwrap();
        let total = crate::initial::total_integral(&profile).unwrap();
        let d = duality_coefficients(0.5).unwrap();
        let full = d.r_alpha * total;
        let cfg = ProbeConfig::new(
            pp,
            default_kappa(0.5, 2.0),
            default_ell(2.0),
            vec![5.0, 40.0],
            4.0,
            QuadratureSpec::default(),
        )
        .unwrap()
        .with_profiles(Some(profile), None);
        let sf = SignFunctionals { i1: full, i2: 0.0 };
        let rows = sweep(&cfg, &sf).unwrap().rows;
        assert!((rows[1].lhs - full).abs() < 1e-8 * full);
        assert!(rows[0].lhs < rows[1].lhs);
    }

    #[test]
    fn young_inequality_scalar() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let x = 10.0 * next();
            let y = 10.0 * next();
            let p = 1.2 + 3.0 * next();
            let eps = 0.05 + next();
            let c = young_constant(eps, p);
            let q = p / (p - 1.0);
            assert!(x * y <= eps * x.powf(p) + c * y.powf(q) + 1e-9);
        }
    }

    #[test]
    fn weak_residuals_zero_everything() {
        let cfg = ProbeConfig::new(
            ProblemParams::new(0.5, 0.5, 3, 2.0, (1.0, 0.0), 1.0).unwrap(),
            default_kappa(0.5, 2.0),
            default_ell(2.0),
            vec![2.0],
            4.0,
            QuadratureSpec::default(),
        )
        .unwrap();
        let u = SampledComplexField::zero(1.0, std::f64::consts::E, 2.0, 65, 129).unwrap();
        let (r1, r2) = weak_residuals(&u, &cfg).unwrap();
        assert_eq!(r1, 0.0);
        assert_eq!(r2, 0.0);
    }

    #[test]
    fn weak_residuals_initial_data_only() {
        let profile = RadialProfile::new(ProfileTag::ExpDecay, 3, ProfilePart::Real).unwrap();
        let cfg = ProbeConfig::new(
            ProblemParams::new(0.5, 0.5, 3, 2.0, (1.0, 0.0), 1.0).unwrap(),
            default_kappa(0.5, 2.0),
            default_ell(2.0),
            vec![6.0],
            4.0,
            QuadratureSpec::default(),
        )
        .unwrap()
        .with_profiles(Some(profile.clone()), None);
        let radius = 6.0;
        let u = SampledComplexField::zero(1.0, std::f64::consts::E, radius, 65, 513).unwrap();
        let (r1, r2) = weak_residuals(&u, &cfg).unwrap();
        // Only the initial-data term survives: factor × cutoff-weighted ∫ r_α f₁.
        let mu = MuParams::new(1.0, std::f64::consts::E, cfg.kappa).unwrap();
        let factor = mu_right_image(&mu, 0.5, 1.0).unwrap();
        let c = CutoffParams::new(radius, cfg.ell, 3).unwrap();
        let d = duality_coefficients(0.5).unwrap();
        let oracle1 = factor * d.r_alpha * cutoff_weighted_integral(&profile, &c).unwrap();
        let oracle2 = factor * d.s_alpha * cutoff_weighted_integral(&profile, &c).unwrap();
        assert_relative_eq!(r1, oracle1, max_relative = 1e-7);
        assert_relative_eq!(r2, oracle2, max_relative = 1e-7);
        assert!(r1 > 0.0);
    }

    #[test]
    fn weak_residuals_linear_in_field() {
        let cfg = ProbeConfig::new(
            ProblemParams::new(0.5, 0.5, 2, 2.0, (1.0, 0.0), 1.0).unwrap(),
            default_kappa(0.5, 2.0),
            default_ell(2.0),
            vec![2.0],
            4.0,
            QuadratureSpec::default(),
        )
        .unwrap();
        let field = |t: f64, r: f64| {
            let bump = (-r * r).exp() * (t.ln() + 1.0);
            (bump, 0.5 * bump)
        };
        let u1 = SampledComplexField::sample(1.0, std::f64::consts::E, 2.0, 65, 129, field).unwrap();
        let u2 =
            SampledComplexField::sample(1.0, std::f64::consts::E, 2.0, 65, 129, |t, r| {
                let (a, b) = field(t, r);
                (2.0 * a, 2.0 * b)
            })
            .unwrap();
        let (ra, _) = weak_residuals(&u1, &cfg).unwrap();
        let (rb, _) = weak_residuals(&u2, &cfg).unwrap();
        // The u-dependent part of the residual is the nonlinear term (power
        // p = 2 scales by 4) minus linear terms (scale by 2); recompute the
        // difference directly.
        let (rc, _) = weak_residuals(
            &SampledComplexField::sample(1.0, std::f64::consts::E, 2.0, 65, 129, |t, r| {
                let (a, b) = field(t, r);
                (3.0 * a, 3.0 * b)
            })
            .unwrap(),
            &cfg,
        )
        .unwrap();
        // residual(u) = q(u) + l(u) + const with q quadratic (p = 2 nonlinear
        // term is |u|² which is quadratic) and l linear; three evaluations
        // pin the quadratic: r(2u) − 2r(u) + r(0) style identity.
        let (r0, _) = weak_residuals(
            &SampledComplexField::zero(1.0, std::f64::consts::E, 2.0, 65, 129).unwrap(),
            &cfg,
        )
        .unwrap();
        // For a quadratic-in-u functional: r(3u) − 3r(2u) + 3r(u) − r(0) = 0.
        let third_diff = rc - 3.0 * rb + 3.0 * ra - r0;
        let scale = ra.abs().max(rb.abs()).max(1e-12);
        assert!(third_diff.abs() < 1e-9 * scale.max(1.0), "third diff {third_diff}");
    }
}
