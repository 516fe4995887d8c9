//! Exact exponent-region arithmetic and the nonexistence verdict.
//!
//! All interval bounds are strict open intervals; a p on
//! a boundary is Inconclusive. Comparisons are exact IEEE comparisons on
//! directly computed expressions, and the report carries every margin so
//! near-boundary cases stay visible. Inconclusive only means the sufficient
//! conditions fail; it never asserts existence.

use serde::Serialize;

use crate::error::{Error, Result};

/// Full parameter tuple (α, γ, N, p, λ, a) of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    pub alpha: f64,
    pub gamma: f64,
    pub dim: u32,
    pub p: f64,
    pub lambda: (f64, f64),
    pub a: f64,
}

impl ProblemParams {
    pub fn new(alpha: f64, gamma: f64, dim: u32, p: f64, lambda: (f64, f64), a: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be finite, got {gamma}")));
        }
        if dim < 1 {
            return Err(Error::Domain("dimension N must be >= 1".into()));
        }
        if !(p > 1.0) {
            return Err(Error::Domain(format!("nonlinearity power p must be > 1, got {p}")));
        }
        if lambda.0 == 0.0 && lambda.1 == 0.0 {
            return Err(Error::Domain("lambda must be nonzero".into()));
        }
        if !(a > 0.0) {
            return Err(Error::Domain(format!("left endpoint a must be > 0, got {a}")));
        }
        Ok(Self {
            alpha,
            gamma,
            dim,
            p,
            lambda,
            a,
        })
    }
}

/// (r_α, s_α) = (cos(πα/2), sin(πα/2)), the real/imaginary splitting
/// coefficients of i^α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityCoefficients {
    pub r_alpha: f64,
    pub s_alpha: f64,
}

pub fn duality_coefficients(alpha: f64) -> Result<DualityCoefficients> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let half = std::f64::consts::FRAC_PI_2 * alpha;
    Ok(DualityCoefficients {
        r_alpha: half.cos(),
        s_alpha: half.sin(),
    })
}

/// The two initial-data sign functionals of the nonexistence condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignFunctionals {
    /// λ₁ ∫ (r_α f₁ − s_α f₂) dx
    pub i1: f64,
    /// λ₂ ∫ (s_α f₁ + r_α f₂) dx
    pub i2: f64,
}

pub fn sign_functionals(pp: &ProblemParams, f1_integral: f64, f2_integral: f64) -> Result<SignFunctionals> {
    if !f1_integral.is_finite() || !f2_integral.is_finite() {
        return Err(Error::Domain("initial-data integrals must be finite".into()));
    }
    let d = duality_coefficients(pp.alpha)?;
    Ok(SignFunctionals {
        i1: pp.lambda.0 * (d.r_alpha * f1_integral - d.s_alpha * f2_integral),
        i2: pp.lambda.1 * (d.s_alpha * f1_integral + d.r_alpha * f2_integral),
    })
}

impl SignFunctionals {
    pub fn triggered(&self) -> bool {
        self.i1 > 0.0 || self.i2 > 0.0
    }
}

/// One exponent region: admissibility of the side conditions plus the open
/// p interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub admissible: bool,
    pub p_lower: f64,
    pub p_upper: f64,
}

/// T1 region: γ > −α, γ(Nα − 2) < 2α,
/// max{1, 1+γ} < p < 1 + 2(α+γ)/(Nα).
pub fn region_t1(alpha: f64, gamma: f64, dim: u32) -> Region {
    let n = dim as f64;
    let admissible = gamma > -alpha && gamma * (n * alpha - 2.0) < 2.0 * alpha;
    Region {
        admissible,
        p_lower: 1f64.max(1.0 + gamma),
        p_upper: 1.0 + 2.0 * (alpha + gamma) / (n * alpha),
    }
}

/// T2 region: γ > 0, 1 + γ < p < 1 + γ/α.
pub fn region_t2(alpha: f64, gamma: f64) -> Region {
    Region {
        admissible: gamma > 0.0,
        p_lower: 1.0 + gamma,
        p_upper: 1.0 + gamma / alpha,
    }
}

/// Which branch realizes the combined upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ActiveBranch {
    T1,
    T2,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombinedRegion {
    pub admissible: bool,
    pub p_lower: f64,
    pub p_upper: f64,
    pub active_branch: ActiveBranch,
}

/// Combined (corollary) region for γ > 0:
/// 1 + γ < p < max{1 + 2(α+γ)/(Nα), 1 + γ/α}. The branch indicator follows
/// the piecewise formula: T1 when (N−2)γ < 2α, T2 when 2α < (N−2)γ, and a
/// tie exactly at (N−2)γ = 2α where the two values coincide.
pub fn region_combined(alpha: f64, gamma: f64, dim: u32) -> CombinedRegion {
    let n = dim as f64;
    let t1 = region_t1(alpha, gamma, dim);
    let t2 = region_t2(alpha, gamma);
    let admissible = gamma > 0.0 && gamma * (n * alpha - 2.0) < 2.0 * alpha;
    let discriminant = (n - 2.0) * gamma;
    let active_branch = if discriminant < 2.0 * alpha {
        ActiveBranch::T1
    } else if discriminant > 2.0 * alpha {
        ActiveBranch::T2
    } else {
        ActiveBranch::Tie
    };
    CombinedRegion {
        admissible,
        p_lower: 1.0 + gamma,
        p_upper: t1.p_upper.max(t2.p_upper),
        active_branch,
    }
}

/// Verdict of the criterion evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    NonexistenceT1,
    NonexistenceT2,
    NonexistenceCorollary,
    Inconclusive,
}

/// Auditable verdict: every condition that was checked, the interval
/// bounds, the margins to each bound, and the comparison exponents from the
/// Caputo-kernel literature.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub verdict: Verdict,
    pub p: f64,
    pub p_lower: f64,
    pub p_upper_t1: Option<f64>,
    pub p_upper_t2: Option<f64>,
    pub p_upper_combined: Option<f64>,
    pub active_branch: Option<ActiveBranch>,
    pub sign: SignFunctionals,
    pub conditions: Vec<(String, bool)>,
    pub margins: Vec<(String, f64)>,
    pub comparison_exponents: ComparisonExponents,
    /// What Inconclusive means: the sufficient conditions fail; nothing is
    /// claimed about existence.
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonExponents {
    /// 1 + 2(α+1)/(N − 2α), defined when N > 2α.
    pub kirane_nabti: Option<f64>,
    /// 1 + 2/N, the Fujita exponent of the semilinear heat equation.
    pub fujita: f64,
}

/// Check the regions in order combined → T1 → T2 and report the first
/// whose hypotheses all hold. For γ > 0 the T1 region is contained in the
/// corollary region, so the ordering loses nothing.
pub fn evaluate(pp: &ProblemParams, sf: &SignFunctionals) -> CriterionReport {
    let n = pp.dim as f64;
    let t1 = region_t1(pp.alpha, pp.gamma, pp.dim);
    let t2 = region_t2(pp.alpha, pp.gamma);
    let combined = region_combined(pp.alpha, pp.gamma, pp.dim);
    let sign_ok = sf.triggered();

    let t1_in = t1.admissible && pp.p > t1.p_lower && pp.p < t1.p_upper;
    let t2_in = t2.admissible && pp.p > t2.p_lower && pp.p < t2.p_upper;
    let combined_in = combined.admissible && pp.p > combined.p_lower && pp.p < combined.p_upper;

    let verdict = if combined_in && sign_ok {
        Verdict::NonexistenceCorollary
    } else if t1_in && sign_ok {
        Verdict::NonexistenceT1
    } else if t2_in && sign_ok {
        Verdict::NonexistenceT2
    } else {
        Verdict::Inconclusive
    };

    let conditions = vec![
        ("gamma > -alpha".to_string(), pp.gamma > -pp.alpha),
        (
            "gamma*(N*alpha - 2) < 2*alpha".to_string(),
            pp.gamma * (n * pp.alpha - 2.0) < 2.0 * pp.alpha,
        ),
        ("gamma > 0".to_string(), pp.gamma > 0.0),
        ("p > p_lower_T1".to_string(), pp.p > t1.p_lower),
        ("p < p_upper_T1".to_string(), pp.p < t1.p_upper),
        ("p > 1 + gamma".to_string(), pp.p > t2.p_lower),
        ("p < p_upper_T2".to_string(), pp.p < t2.p_upper),
        ("p < p_upper_combined".to_string(), pp.p < combined.p_upper),
        ("I1 > 0 or I2 > 0".to_string(), sign_ok),
    ];
    let margins = vec![
        ("p - p_lower_T1".to_string(), pp.p - t1.p_lower),
        ("p_upper_T1 - p".to_string(), t1.p_upper - pp.p),
        ("p_upper_T2 - p".to_string(), t2.p_upper - pp.p),
        ("p_upper_combined - p".to_string(), combined.p_upper - pp.p),
    ];

    let kirane_nabti = if n > 2.0 * pp.alpha {
        Some(1.0 + 2.0 * (pp.alpha + 1.0) / (n - 2.0 * pp.alpha))
    } else {
        None
    };

    CriterionReport {
        verdict,
        p: pp.p,
        p_lower: if pp.gamma > 0.0 { combined.p_lower } else { t1.p_lower },
        p_upper_t1: t1.admissible.then_some(t1.p_upper),
        p_upper_t2: t2.admissible.then_some(t2.p_upper),
        p_upper_combined: combined.admissible.then_some(combined.p_upper),
        active_branch: combined.admissible.then_some(combined.active_branch),
        sign: *sf,
        conditions,
        margins,
        comparison_exponents: ComparisonExponents {
            kirane_nabti,
            fujita: 1.0 + 2.0 / n,
        },
        note: "Inconclusive means the sufficient nonexistence conditions fail; \
               it does not assert that a global weak solution exists."
            .to_string(),
    }
}

impl CriterionReport {
    /// Names of the conditions that failed (empty iff nothing failed).
    pub fn failed_conditions(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| name.as_str())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sign_pos() -> SignFunctionals {
        SignFunctionals { i1: 1.0, i2: 0.0 }
    }

    #[test]
    fn duality_half_alpha() {
        let d = duality_coefficients(0.5).unwrap();
        let half_sqrt2 = 0.5f64.sqrt();
        assert_relative_eq!(d.r_alpha, half_sqrt2, max_relative = 1e-15);
        assert_relative_eq!(d.s_alpha, half_sqrt2, max_relative = 1e-15);
    }

    #[test]
    fn duality_pythagorean_and_limits() {
        for i in 1..100 {
            let alpha = i as f64 / 100.0;
            let d = duality_coefficients(alpha).unwrap();
            assert_relative_eq!(
                d.r_alpha * d.r_alpha + d.s_alpha * d.s_alpha,
                1.0,
                max_relative = 1e-14
            );
            assert!(d.r_alpha > 0.0 && d.r_alpha < 1.0);
            assert!(d.s_alpha > 0.0 && d.s_alpha < 1.0);
        }
        let d = duality_coefficients(1e-9).unwrap();
        assert_relative_eq!(d.r_alpha, 1.0, max_relative = 1e-12);
        assert!(d.s_alpha.abs() < 1e-8);
        assert!(duality_coefficients(0.0).is_err());
        assert!(duality_coefficients(1.0).is_err());
    }

    #[test]
    fn region_t1_example_values() {
        // Example with N = 5: interval (1, 1 + 1/N)
        let r = region_t1(0.5, -0.25, 5);
        assert!(r.admissible);
        assert_relative_eq!(r.p_lower, 1.0, max_relative = 1e-15);
        assert_relative_eq!(r.p_upper, 1.2, max_relative = 1e-14);
        // N = 2: interval (1.5, 3)
        let r = region_t1(0.5, 0.5, 2);
        assert!(r.admissible);
        assert_relative_eq!(r.p_lower, 1.5, max_relative = 1e-15);
        assert_relative_eq!(r.p_upper, 3.0, max_relative = 1e-14);
        // γ = 0 recovers the Fujita-type bound
        let r = region_t1(0.7, 0.0, 4);
        assert_relative_eq!(r.p_upper, 1.5, max_relative = 1e-14);
    }

    #[test]
    fn region_t2_values() {
        let r = region_t2(0.5, 1.0);
        assert!(r.admissible);
        assert_relative_eq!(r.p_lower, 2.0, max_relative = 1e-15);
        assert_relative_eq!(r.p_upper, 3.0, max_relative = 1e-15);
        let r = region_t2(0.5, 0.5);
        assert_relative_eq!(r.p_lower, 1.5, max_relative = 1e-15);
        assert_relative_eq!(r.p_upper, 2.0, max_relative = 1e-15);
        assert!(!region_t2(0.5, 0.0).admissible);
        assert!(!region_t2(0.5, -0.2).admissible);
    }

    #[test]
    fn region_combined_branches() {
        // (0.5, 0.5, 2): (N−2)γ = 0 < 1 = 2α, T1 branch, upper 3
        let c = region_combined(0.5, 0.5, 2);
        assert!(c.admissible);
        assert_eq!(c.active_branch, ActiveBranch::T1);
        assert_relative_eq!(c.p_upper, 3.0, max_relative = 1e-14);
        // (0.5, 1, 4): T1 upper 2.5, T2 upper 3, T2 branch
        let c = region_combined(0.5, 1.0, 4);
        assert!(c.admissible);
        assert_eq!(c.active_branch, ActiveBranch::T2);
        assert_relative_eq!(c.p_upper, 3.0, max_relative = 1e-14);
        // (0.5, 1, 3): both uppers equal 3, tie
        let c = region_combined(0.5, 1.0, 3);
        assert_eq!(c.active_branch, ActiveBranch::Tie);
        assert_relative_eq!(c.p_upper, 3.0, max_relative = 1e-14);
        let t1 = region_t1(0.5, 1.0, 3);
        let t2 = region_t2(0.5, 1.0);
        assert_relative_eq!(t1.p_upper, t2.p_upper, max_relative = 1e-14);
    }

    #[test]
    fn sign_functionals_examples() {
        // real positive f, λ = 1, α = 1/2: I1 = (√2/2) ∫f₁ > 0
        let pp = ProblemParams::new(0.5, -0.25, 5, 1.1, (1.0, 0.0), 1.0).unwrap();
        let sf = sign_functionals(&pp, 2.0, 0.0).unwrap();
        assert_relative_eq!(sf.i1, 0.5f64.sqrt() * 2.0, max_relative = 1e-14);
        assert_eq!(sf.i2, 0.0);
        // f = i g with g >= 0 and λ = −1: I1 = (−1)(−√2/2)∫g > 0
        let pp = ProblemParams::new(0.5, 0.5, 2, 2.0, (-1.0, 0.0), 1.0).unwrap();
        let sf = sign_functionals(&pp, 0.0, 3.0).unwrap();
        assert_relative_eq!(sf.i1, 0.5f64.sqrt() * 3.0, max_relative = 1e-14);
        // zero data
        let sf = sign_functionals(&pp, 0.0, 0.0).unwrap();
        assert_eq!((sf.i1, sf.i2), (0.0, 0.0));
    }

    #[test]
    fn evaluate_example_one_is_t1() {
        let pp = ProblemParams::new(0.5, -0.25, 5, 1.1, (1.0, 0.0), 1.0).unwrap();
        let report = evaluate(&pp, &sign_pos());
        assert_eq!(report.verdict, Verdict::NonexistenceT1);
    }

    #[test]
    fn evaluate_example_three_is_corollary() {
        let pp = ProblemParams::new(0.5, 1.0, 3, 2.5, (1.0, 0.0), 1.0).unwrap();
        let report = evaluate(&pp, &sign_pos());
        assert_eq!(report.verdict, Verdict::NonexistenceCorollary);
    }

    #[test]
    fn evaluate_outside_interval_is_inconclusive() {
        let pp = ProblemParams::new(0.5, -0.25, 5, 5.0, (1.0, 0.0), 1.0).unwrap();
        let report = evaluate(&pp, &sign_pos());
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert!(report.failed_conditions().contains(&"p < p_upper_T1"));
    }

    #[test]
    fn endpoints_are_inconclusive() {
        // exact upper endpoint of the N = 5 interval
        let pp = ProblemParams::new(0.5, -0.25, 5, 1.2, (1.0, 0.0), 1.0).unwrap();
        let report = evaluate(&pp, &sign_pos());
        assert_eq!(report.verdict, Verdict::Inconclusive);
        // exact lower endpoint of the T2 interval
        let pp = ProblemParams::new(0.5, 1.0, 3, 2.0, (1.0, 0.0), 1.0).unwrap();
        let report = evaluate(&pp, &sign_pos());
        assert_eq!(report.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn verdict_monotone_in_evidence() {
        let pp = ProblemParams::new(0.5, -0.25, 5, 1.1, (1.0, 0.0), 1.0).unwrap();
        let weak = SignFunctionals { i1: 0.0, i2: 0.0 };
        let strong = SignFunctionals { i1: 1e-12, i2: 0.0 };
        assert_eq!(evaluate(&pp, &weak).verdict, Verdict::Inconclusive);
        assert_eq!(evaluate(&pp, &strong).verdict, Verdict::NonexistenceT1);
    }

    #[test]
    fn comparison_exponents_reported() {
        let pp = ProblemParams::new(0.5, 0.0, 4, 1.2, (1.0, 0.0), 1.0).unwrap();
        let report = evaluate(&pp, &sign_pos());
        assert_relative_eq!(report.comparison_exponents.fujita, 1.5, max_relative = 1e-15);
        // 1 + 2(α+1)/(N−2α) = 1 + 3/3 = 2
        assert_relative_eq!(
            report.comparison_exponents.kirane_nabti.unwrap(),
            2.0,
            max_relative = 1e-14
        );
        // N <= 2α leaves it undefined
        let pp = ProblemParams::new(0.9, 0.0, 1, 1.2, (1.0, 0.0), 1.0).unwrap();
        let report = evaluate(&pp, &sign_pos());
        assert!(report.comparison_exponents.kirane_nabti.is_none());
    }

    #[test]
    fn problem_params_validation() {
        assert!(ProblemParams::new(1.2, 0.0, 3, 2.0, (1.0, 0.0), 1.0).is_err());
        assert!(ProblemParams::new(0.5, 0.0, 0, 2.0, (1.0, 0.0), 1.0).is_err());
        assert!(ProblemParams::new(0.5, 0.0, 3, 1.0, (1.0, 0.0), 1.0).is_err());
        assert!(ProblemParams::new(0.5, 0.0, 3, 2.0, (0.0, 0.0), 1.0).is_err());
        assert!(ProblemParams::new(0.5, 0.0, 3, 2.0, (1.0, 0.0), 0.0).is_err());
    }
}
