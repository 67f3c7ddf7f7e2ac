//! Linesearch-free stepsize updates.
//!
//! The two-parameter rule ([`adapg_stepsize`]) and the time-varying rule
//! ([`general_stepsize`]) both compute `γₖ₊₁ = γₖ·min{growth, curvature}`
//! from the previous two stepsizes and the curvature estimates `(ℓₖ, Lₖ)`.
//! The curvature term is `+∞` whenever its bracket clamps to zero.
//!
//! Also here: the schedule constraints for `(πₖ, ξₖ)`, the recovery
//! recursion `m(ε)`, and the theoretical lower bounds on the stepsizes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureEstimates;
use crate::error::{Error, Result};

/// Upper limit on `q` for the simplified lower bound, `(3 + √5)/2`.
pub const GOLDEN_Q_LIMIT: f64 = 2.618_033_988_749_895;

/// `(3 − √5)/2`: for `ε` at or above this value, `m(ε) = √min{1, ε}`.
pub const M_EPSILON_THRESHOLD: f64 = 0.381_966_011_250_105_1;

/// Relative slack of the `r ≥ ½` check.
const HALF_SLACK: f64 = 4.0 * f64::EPSILON;

/// Constant parameters `π ≡ q`, `ξ ≡ q/r − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    pub q: f64,
    pub r: f64,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self { q: 1.5, r: 0.75 }
    }
}

impl FixedParams {
    /// Requires `q > r ≥ ½`.
    pub fn new(q: f64, r: f64) -> Result<Self> {
        if !(q.is_finite() && r.is_finite() && q > r && r >= 0.5) {
            return Err(Error::InvalidParameters(format!(
                "requires q > r ≥ 1/2, got q = {q}, r = {r}"
            )));
        }
        Ok(Self { q, r })
    }

    /// `ξ = q/r − 1`
    pub fn xi(&self) -> f64 {
        self.q / self.r - 1.0
    }

    /// The equivalent constant schedule `π ≡ q`, `ξ ≡ q/r − 1`.
    pub fn schedule(&self) -> ScheduleParams {
        let xi = self.xi();
        ScheduleParams { pi_min: self.q, pi_max: self.q, xi_min: xi, pi: self.q, xi }
    }
}

/// A row of the suggested-parameter table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: &'static str,
    pub q: f64,
    pub r: f64,
    /// `γ_min · L` for this choice.
    pub gamma_min_times_l: f64,
    /// Rows flagged as a good balance between growth and the lower bound.
    pub balanced: bool,
}

impl Preset {
    pub fn params(&self) -> FixedParams {
        FixedParams { q: self.q, r: self.r }
    }
}

/// The six suggested `(q, r)` pairs with their `γ_min·L` values.
pub fn preset_table1() -> Vec<Preset> {
    const ROWS: [(&str, f64, f64, bool); 6] = [
        ("q10/9-r5/6", 10.0 / 9.0, 5.0 / 6.0, true),
        ("q8/5-r24/25", 8.0 / 5.0, 24.0 / 25.0, false),
        ("q5/3-r5/6", 5.0 / 3.0, 5.0 / 6.0, true),
        ("q3/2-r3/4", 1.5, 0.75, true),
        ("q1-r1/2", 1.0, 0.5, false),
        ("q5/2-r1", 2.5, 1.0, false),
    ];
    ROWS.iter()
        .map(|&(name, q, r, balanced)| Preset {
            name,
            q,
            r,
            gamma_min_times_l: simplified_lower_bound(q, r, 1.0),
            balanced,
        })
        .collect()
}

/// Looks a preset up by name or by `q:r` pair as written in the table.
pub fn preset_by_name(name: &str) -> Option<Preset> {
    preset_table1().into_iter().find(|p| p.name == name)
}

/// Time-varying parameters `(πₖ, ξₖ)` with their admissible bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub pi_min: f64,
    pub pi_max: f64,
    pub xi_min: f64,
    pub pi: f64,
    pub xi: f64,
}

impl ScheduleParams {
    /// `r = π/(1 + ξ)`
    pub fn r(&self) -> f64 {
        self.pi / (1.0 + self.xi)
    }

    /// Same bounds, new current values.
    pub fn with(&self, pi: f64, xi: f64) -> Self {
        Self { pi, xi, ..*self }
    }

    /// Checks `½ < π_min ≤ π_max`, `0 < ξ_min ≤ 2π_min − 1`, and that the
    /// current values lie in range.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut v = Vec::new();
        if !(self.pi_min > 0.5 && self.pi_min <= self.pi_max && self.pi_max.is_finite()) {
            v.push(Violation::InvalidBounds("requires 1/2 < pi_min <= pi_max".into()));
        }
        if !(self.xi_min > 0.0 && self.xi_min <= 2.0 * self.pi_min - 1.0 + HALF_SLACK * self.pi_min) {
            v.push(Violation::InvalidBounds("requires 0 < xi_min <= 2 pi_min - 1".into()));
        }
        if self.pi < self.pi_min {
            v.push(Violation::PiBelowMin);
        }
        if self.pi > self.pi_max {
            v.push(Violation::PiAboveMax);
        }
        if !(self.xi >= self.xi_min) {
            v.push(Violation::XiBelowMin);
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }
}

/// A violated schedule constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    XiBelowMin,
    RBelowHalf,
    PiBelowMin,
    PiAboveMax,
    PiGrowthGate,
    InvalidBounds(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::XiBelowMin => write!(f, "xi below minimum"),
            Violation::RBelowHalf => write!(f, "r below one-half"),
            Violation::PiBelowMin => write!(f, "pi below minimum"),
            Violation::PiAboveMax => write!(f, "pi above maximum"),
            Violation::PiGrowthGate => write!(f, "pi growth gate"),
            Violation::InvalidBounds(s) => write!(f, "invalid bounds: {s}"),
        }
    }
}

/// Validates the transition `(πₖ, ξₖ) → (πₖ₊₁, ξₖ₊₁)`:
/// `ξₖ₊₁ ≥ ξ_min`, `rₖ₊₁ ≥ ½` and
/// `π_min ≤ πₖ₊₁ ≤ min{π_max, πₖ + 𝟙[γₖℓₖ ≥ 1]}`. Returns every violation.
pub fn validate_schedule_step(
    prev: &ScheduleParams,
    next: &ScheduleParams,
    gamma_k: f64,
    ell_k: f64,
) -> Result<(), Vec<Violation>> {
    let mut v = match next.validate() {
        Ok(()) => Vec::new(),
        Err(v) => v,
    };
    if next.r() < 0.5 * (1.0 - HALF_SLACK) {
        v.push(Violation::RBelowHalf);
    }
    let gate = if gamma_k * ell_k >= 1.0 { 1.0 } else { 0.0 };
    if next.pi > prev.pi + gate && next.pi <= next.pi_max {
        v.push(Violation::PiGrowthGate);
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// `(γₖ₋₁, γₖ)` together with `ρₖ = γₖ/γₖ₋₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepsizePair {
    pub gamma_prev: f64,
    pub gamma_curr: f64,
    pub rho: f64,
}

impl StepsizePair {
    /// `γ₀ = γ₋₁`, so `ρ₀ = 1`.
    pub fn initial(gamma0: f64) -> Self {
        Self { gamma_prev: gamma0, gamma_curr: gamma0, rho: 1.0 }
    }

    pub fn advance(&self, gamma_next: f64) -> Self {
        Self { gamma_prev: self.gamma_curr, gamma_curr: gamma_next, rho: gamma_next / self.gamma_curr }
    }
}

/// `[γ²L² + 2γℓ(r − 1) − (2r − 1)]₊`
fn curvature_bracket(gamma: f64, est: CurvatureEstimates, r: f64) -> f64 {
    let gl = gamma * est.big_l;
    let bracket = gl * gl + 2.0 * gamma * est.ell * (r - 1.0) - (2.0 * r - 1.0);
    bracket.max(0.0)
}

/// `√(numerator / [bracket]₊)` with `1/0 = ∞`.
fn curvature_term(numerator: f64, bracket: f64) -> f64 {
    if bracket > 0.0 {
        (numerator / bracket).sqrt()
    } else {
        f64::INFINITY
    }
}

/// Next stepsize of the two-parameter rule:
///
/// ```text
/// γₖ₊₁ = γₖ·min{ √(1/q + γₖ/γₖ₋₁),
///                √((1 − r/q) / [γₖ²Lₖ² + 2γₖℓₖ(r − 1) − (2r − 1)]₊) }
/// ```
pub fn adapg_stepsize(sp: &StepsizePair, est: CurvatureEstimates, p: &FixedParams) -> f64 {
    let growth = (1.0 / p.q + sp.rho).sqrt();
    let bracket = curvature_bracket(sp.gamma_curr, est, p.r);
    let curvature = curvature_term(1.0 - p.r / p.q, bracket);
    sp.gamma_curr * growth.min(curvature)
}

/// Next stepsize of the time-varying rule:
///
/// ```text
/// γₖ₊₁ = γₖ·min{ √((1 + πₖρₖ)/πₖ₊₁),
///                √((rₖ₊₁/πₖ₊₁)·ξₖ / [γₖ²Lₖ² + 2γₖℓₖ(rₖ₊₁ − 1) − (2rₖ₊₁ − 1)]₊) }
/// ```
///
/// `next` must be an admissible successor of `prev`.
pub fn general_stepsize(
    sp: &StepsizePair,
    est: CurvatureEstimates,
    prev: &ScheduleParams,
    next: &ScheduleParams,
) -> Result<f64, Vec<Violation>> {
    validate_schedule_step(prev, next, sp.gamma_curr, est.ell)?;
    let growth = ((1.0 + prev.pi * sp.rho) / next.pi).sqrt();
    let r = next.r();
    let bracket = curvature_bracket(sp.gamma_curr, est, r);
    let curvature = curvature_term(r / next.pi * prev.xi, bracket);
    Ok(sp.gamma_curr * growth.min(curvature))
}

/// Largest admissible `ρₖ₊₁²` for the Lyapunov decrease:
///
/// ```text
/// min{ (1 + πₖρₖ)/πₖ₊₁,
///      ξₖ / ((1 + ξₖ₊₁)[γₖ²Lₖ² + 2γₖℓₖ(rₖ₊₁ − 1) + (1 − 2rₖ₊₁)]₊) }
/// ```
pub fn rho_sq_cap(sp: &StepsizePair, est: CurvatureEstimates, prev: &ScheduleParams, next: &ScheduleParams) -> f64 {
    let first = (1.0 + prev.pi * sp.rho) / next.pi;
    let r = next.r();
    let bracket = curvature_bracket(sp.gamma_curr, est, r);
    let second = if bracket > 0.0 { prev.xi / ((1.0 + next.xi) * bracket) } else { f64::INFINITY };
    first.min(second)
}

/// Guaranteed floor on `γₖ₊₁` when `γₖℓₖ < 1`:
/// `min{γₖ√(1/π_max + ρₖ), √(ξ_min·r_min/π_max)/Lₖ}`. `None` when the
/// premise `γₖℓₖ < 1` fails.
pub fn one_step_lower_bound(
    sp: &StepsizePair,
    est: CurvatureEstimates,
    pi_max: f64,
    xi_min: f64,
    r_min: f64,
) -> Option<f64> {
    if sp.gamma_curr * est.ell >= 1.0 {
        return None;
    }
    let first = sp.gamma_curr * (1.0 / pi_max + sp.rho).sqrt();
    let second = if est.big_l > 0.0 { (xi_min * r_min / pi_max).sqrt() / est.big_l } else { f64::INFINITY };
    Some(first.min(second))
}

/// Result of the recursion `ρ₁ = √ε`, `ρₜ₊₁ = √(ε + ρₜ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MEpsilon {
    /// Largest `t` with `ρ₁, …, ρₜ < 1` (zero when `ε ≥ 1`).
    pub t_eps: u64,
    /// `∏_{t ≤ t_eps} ρₜ`, the worst-case shrink factor of the stepsize.
    pub m: f64,
}

/// Computes `(t_ε, m(ε))`. Runs in `O(1/ε)`.
pub fn m_epsilon(eps: f64) -> Result<MEpsilon> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameters(format!("m(eps) requires eps > 0, got {eps}")));
    }
    let mut rho = eps.sqrt();
    let mut t_eps = 0;
    let mut m = 1.0;
    while rho < 1.0 {
        t_eps += 1;
        m *= rho;
        rho = (eps + rho).sqrt();
    }
    Ok(MEpsilon { t_eps, m })
}

/// `2⌈log_{1+1/q}(1/(γ₀L))⌉₊`: iteration after which the lower bound holds.
pub fn lower_bound_threshold(q: f64, gamma0: f64, lipschitz: f64) -> usize {
    let ratio = 1.0 / (gamma0 * lipschitz);
    if !(ratio > 1.0) {
        return 0;
    }
    let steps = (ratio.ln() / (1.0 + 1.0 / q).ln()).ceil();
    2 * steps.max(0.0) as usize
}

/// `√((1 − r/q)/max{1, q}) / L`, valid for `q ≤ (3 + √5)/2`.
fn simplified_lower_bound(q: f64, r: f64, lipschitz: f64) -> f64 {
    ((1.0 - r / q) / q.max(1.0)).sqrt() / lipschitz
}

/// `m(1/π_max)·√(ξ_min·r_min/π_max) / L`
pub fn general_lower_bound(pi_max: f64, xi_min: f64, r_min: f64, lipschitz: f64) -> Result<f64> {
    let m = m_epsilon(1.0 / pi_max)?.m;
    Ok(m * (xi_min * r_min / pi_max).sqrt() / lipschitz)
}

/// Both lower bounds for constant parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBounds {
    /// Always available.
    pub general: f64,
    /// Only when `q ≤ (3 + √5)/2`.
    pub simplified: Option<f64>,
}

pub fn lower_bounds(q: f64, r: f64, lipschitz: f64) -> Result<LowerBounds> {
    let p = FixedParams::new(q, r)?;
    if !(lipschitz > 0.0) {
        return Err(Error::InvalidParameters(format!("lipschitz modulus must be positive, got {lipschitz}")));
    }
    let general = general_lower_bound(p.q, p.xi(), p.r, lipschitz)?;
    let simplified = (q <= GOLDEN_Q_LIMIT).then(|| simplified_lower_bound(q, r, lipschitz));
    Ok(LowerBounds { general, simplified })
}

/// Eventual floor `γ_min` on the stepsizes for constant `(q, r)`.
pub fn stepsize_lower_bound(q: f64, r: f64, lipschitz: f64) -> Result<f64> {
    let b = lower_bounds(q, r, lipschitz)?;
    Ok(b.simplified.unwrap_or(b.general))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn est(ell: f64, big_l: f64) -> CurvatureEstimates {
        CurvatureEstimates { ell, big_l }
    }

    #[test]
    fn adapg_examples() {
        let p = FixedParams::new(1.5, 0.75).unwrap();
        let sp = StepsizePair::initial(1.0);
        let g = adapg_stepsize(&sp, est(1.0, 1.0), &p);
        assert!((g - 1.2909944487358056).abs() < 1e-15);
        let g = adapg_stepsize(&sp, est(2.0, 2.0), &p);
        assert!((g - 0.4472135954999579).abs() < 1e-15);

        let p = FixedParams::new(1.0, 0.5).unwrap();
        let sp = StepsizePair::initial(0.3);
        let g = adapg_stepsize(&sp, est(0.0, 0.0), &p);
        assert!((g - 0.3 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn general_examples() {
        let s = ScheduleParams { pi_min: 1.0, pi_max: 1.0, xi_min: 1.0, pi: 1.0, xi: 1.0 };
        let sp = StepsizePair::initial(1.0);
        let g = general_stepsize(&sp, est(1.0, 1.0), &s, &s).unwrap();
        assert!((g - 2f64.sqrt()).abs() < 1e-15);

        let lo = ScheduleParams { pi_min: 1.0, pi_max: 3.0, xi_min: 1.0, pi: 1.0, xi: 1.0 };
        let hi = lo.with(2.0, 1.0);
        // γℓ = 0.5 < 1: gate closed
        let sp = StepsizePair::initial(0.5);
        let err = general_stepsize(&sp, est(1.0, 1.0), &lo, &hi).unwrap_err();
        assert_eq!(err, vec![Violation::PiGrowthGate]);
        assert_eq!(err[0].to_string(), "pi growth gate");
        // γℓ = 2 ≥ 1: gate open
        let sp = StepsizePair::initial(2.0);
        assert!(general_stepsize(&sp, est(1.0, 1.0), &lo, &hi).is_ok());
    }

    #[test]
    fn schedule_validation_examples() {
        let s = ScheduleParams { pi_min: 1.5, pi_max: 1.5, xi_min: 1.0, pi: 1.5, xi: 1.0 };
        assert!(validate_schedule_step(&s, &s, 1.0, 1.0).is_ok());

        let lo = ScheduleParams { pi_min: 1.0, pi_max: 2.0, xi_min: 1.0, pi: 1.0, xi: 1.0 };
        let err = validate_schedule_step(&lo, &lo.with(2.0, 1.0), 1.0, 0.5).unwrap_err();
        assert_eq!(err, vec![Violation::PiGrowthGate]);

        // r = 1/(1 + 1.5) = 0.4
        let err = validate_schedule_step(&lo, &lo.with(1.0, 1.5), 1.0, 0.5).unwrap_err();
        assert_eq!(err, vec![Violation::RBelowHalf]);

        let err = validate_schedule_step(&lo, &lo.with(1.0, 0.5), 1.0, 0.5).unwrap_err();
        assert!(err.contains(&Violation::XiBelowMin));

        let bad = ScheduleParams { pi_min: 0.5, pi_max: 1.0, xi_min: 0.1, pi: 0.5, xi: 0.1 };
        assert!(matches!(bad.validate().unwrap_err()[0], Violation::InvalidBounds(_)));
    }

    #[test]
    fn fixed_params_domain() {
        assert!(FixedParams::new(1.0, 1.0).is_err());
        assert!(FixedParams::new(1.0, 0.4).is_err());
        assert!(FixedParams::new(0.9, 1.0).is_err());
        let p = FixedParams::new(1.0, 0.5).unwrap();
        assert_eq!(p.xi(), 1.0);
        assert!(p.schedule().validate().is_ok());
        for preset in preset_table1() {
            assert!(preset.params().schedule().validate().is_ok(), "{}", preset.name);
        }
    }

    #[test]
    fn m_epsilon_examples() {
        assert_eq!(m_epsilon(1.0).unwrap(), MEpsilon { t_eps: 0, m: 1.0 });
        assert_eq!(m_epsilon(3.0).unwrap(), MEpsilon { t_eps: 0, m: 1.0 });
        let m = m_epsilon(0.5).unwrap();
        assert_eq!(m.t_eps, 1);
        assert!((m.m - 0.5f64.sqrt()).abs() < 1e-15);
        // ρ₁ ≈ 0.44721, ρ₂ ≈ 0.80450, ρ₃ ≈ 1.00225
        let m = m_epsilon(0.2).unwrap();
        assert_eq!(m.t_eps, 2);
        assert!((m.m - 0.35978148798957343).abs() < 1e-14);
        assert!(m_epsilon(0.0).is_err());
        assert!(m_epsilon(-1.0).is_err());
        assert!(m_epsilon(f64::NAN).is_err());
    }

    #[test]
    fn m_epsilon_sweep_against_closed_form() {
        for i in 1..=200 {
            let eps = i as f64 * 0.01;
            let m = m_epsilon(eps).unwrap();
            if eps >= M_EPSILON_THRESHOLD {
                assert!((m.m - eps.min(1.0).sqrt()).abs() < 1e-12, "eps = {eps}");
                assert!(m.t_eps <= 1);
            } else {
                let ceiling = (1.0 / (eps * (2.0 - eps))).ceil() as u64;
                assert!(m.t_eps > 1 && m.t_eps <= ceiling, "eps = {eps}: t = {}", m.t_eps);
                assert!(eps.powf(m.t_eps as f64 / 2.0) < m.m && m.m < eps.sqrt());
            }
        }
    }

    #[test]
    fn lower_bound_examples() {
        assert!((stepsize_lower_bound(1.0, 0.5, 1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((stepsize_lower_bound(1.5, 0.75, 1.0).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((stepsize_lower_bound(10.0 / 9.0, 5.0 / 6.0, 2.0).unwrap() - 0.23717082451262844).abs() < 1e-15);
        assert!(stepsize_lower_bound(1.0, 1.0, 1.0).is_err());
        assert!(stepsize_lower_bound(1.0, 0.5, 0.0).is_err());

        // both forms agree whenever the simplified one applies
        for p in preset_table1() {
            let b = lower_bounds(p.q, p.r, 3.0).unwrap();
            assert!((b.general - b.simplified.unwrap()).abs() < 1e-15);
        }
        // beyond the golden limit only the general bound is reported
        let b = lower_bounds(4.0, 1.0, 1.0).unwrap();
        assert!(b.simplified.is_none());
        let m = m_epsilon(0.25).unwrap().m;
        assert!((b.general - m * (0.75f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn table_rows_match_closed_forms() {
        let rows = preset_table1();
        let expect = [
            1.5 * 0.1f64.sqrt(),
            0.5,
            0.3f64.sqrt(),
            1.0 / 3f64.sqrt(),
            1.0 / 2f64.sqrt(),
            6f64.sqrt() / 5.0,
        ];
        for (row, e) in rows.iter().zip(expect) {
            assert!((row.gamma_min_times_l - e).abs() < 1e-15, "{}", row.name);
        }
        assert_eq!(rows.iter().filter(|r| r.balanced).count(), 3);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(lower_bound_threshold(1.0, 1.0, 1.0), 0);
        assert_eq!(lower_bound_threshold(1.0, 1e3, 1.0), 0);
        // log₂(1000) ≈ 9.97 → 10 → 20
        assert_eq!(lower_bound_threshold(1.0, 1e-3, 1.0), 20);
    }

    #[test]
    fn zero_curvature_growth_converges_to_root() {
        for p in preset_table1() {
            let params = p.params();
            let mut sp = StepsizePair::initial(1e-3);
            for _ in 0..200 {
                let g = adapg_stepsize(&sp, CurvatureEstimates::ZERO, &params);
                sp = sp.advance(g);
            }
            let root = (1.0 + (1.0 + 4.0 / p.q).sqrt()) / 2.0;
            assert!((sp.rho - root).abs() < 1e-9, "{}", p.name);
            assert!(sp.gamma_curr > 1e20);
        }
    }

    #[test]
    fn reduction_matches_within_four_ulps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let presets = preset_table1();
        for _ in 0..1000 {
            let p = presets[rng.random_range(0..presets.len())].params();
            let gamma_prev = 10f64.powf(rng.random_range(-3.0..3.0));
            let gamma_curr = 10f64.powf(rng.random_range(-3.0..3.0));
            let sp = StepsizePair { gamma_prev, gamma_curr, rho: gamma_curr / gamma_prev };
            let big_l = 10f64.powf(rng.random_range(-3.0..3.0));
            let ell = big_l * rng.random_range(0.0..1.0);
            let e = est(ell, big_l);
            let s = p.schedule();
            let a = adapg_stepsize(&sp, e, &p);
            let b = general_stepsize(&sp, e, &s, &s).unwrap();
            let ulps = (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs();
            assert!(ulps <= 4, "{a} vs {b}: {ulps} ulps");
        }
    }

    proptest! {
        #[test]
        fn output_respects_cap(
            gamma_prev in 1e-3f64..1e3,
            gamma_curr in 1e-3f64..1e3,
            big_l in 0.0f64..100.0,
            frac in 0.0f64..1.0,
            idx in 0usize..6,
        ) {
            let p = preset_table1()[idx].params();
            let sp = StepsizePair { gamma_prev, gamma_curr, rho: gamma_curr / gamma_prev };
            let e = est(big_l * frac, big_l);
            let s = p.schedule();
            let next = adapg_stepsize(&sp, e, &p);
            let rho = next / gamma_curr;
            prop_assert!(rho > 0.0);
            let cap = rho_sq_cap(&sp, e, &s, &s);
            prop_assert!(rho * rho <= cap * (1.0 + 1e-12));
        }

        #[test]
        fn one_step_bound_holds(
            gamma_prev in 1e-3f64..1e3,
            gamma_curr in 1e-3f64..1e3,
            big_l in 0.0f64..100.0,
            frac in 0.0f64..1.0,
            idx in 0usize..6,
        ) {
            let p = preset_table1()[idx].params();
            let sp = StepsizePair { gamma_prev, gamma_curr, rho: gamma_curr / gamma_prev };
            let e = est(big_l * frac, big_l);
            let next = adapg_stepsize(&sp, e, &p);
            if let Some(lb) = one_step_lower_bound(&sp, e, p.q, p.xi(), p.r) {
                prop_assert!(next >= lb * (1.0 - 1e-12));
            }
        }
    }
}
