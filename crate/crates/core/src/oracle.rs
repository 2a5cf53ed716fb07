//! Finite-difference oracle for the first and second variations of the
//! Willmore energy along surfaces of revolution through `T_r`.
//!
//! A profile variation `γ = ρ + tδ` moves the surface along `−δ n`, where `n`
//! is the unit normal of `T_r` used throughout the crate. The second
//! variation is measured along the constraint-corrected family
//! `γ_t = ρ + τ(t) + tδ`, with the shift `τ(t)` chosen so that the conformal
//! class `ω` stays at its value on `T_r`. The `a`-coordinate vanishes on every
//! surface of revolution, so this family preserves the full conformal class.

use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numdiff::{first_derivative, second_derivative_from_samples};
use crate::revolution::{clifford_profile, conformal_class, conformal_class_shift_derivative, willmore_energy, Profile};
use crate::roots::newton_bisect;
use crate::spectrum::{e_value, lagrange_multiplier, lb_symbol, lw_symbol, sign_factor, ModeIndex};
use crate::torus::{geometric_data, TorusParameter};

pub const DEFAULT_STEP: f64 = 1e-2;
pub const DEFAULT_LEVELS: usize = 3;
pub const DEFAULT_SAMPLES: usize = 256;
pub const DEFAULT_TOLERANCE: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "l", rename_all = "lowercase")]
pub enum Direction {
    Sin(u32),
    Cos(u32),
    Const,
}

impl Direction {
    pub fn eval(&self, v: f64) -> f64 {
        match *self {
            Direction::Sin(l) => (l as f64 * v).sin(),
            Direction::Cos(l) => (l as f64 * v).cos(),
            Direction::Const => 1.0,
        }
    }

    /// `(1/2π)∮δ dv`.
    pub fn mean(&self) -> f64 {
        match *self {
            Direction::Cos(0) | Direction::Const => 1.0,
            Direction::Sin(_) | Direction::Cos(_) => 0.0,
        }
    }

    pub fn frequency(&self) -> u32 {
        match *self {
            Direction::Sin(l) | Direction::Cos(l) => l,
            Direction::Const => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationSpec {
    pub torus: TorusParameter,
    pub direction: Direction,
    /// Largest Richardson step `h₀`; the stencil reaches `2h₀`.
    pub step: f64,
    pub levels: usize,
    pub samples: usize,
    pub tolerance: f64,
}

impl VariationSpec {
    pub fn new(torus: TorusParameter, direction: Direction) -> Self {
        Self {
            torus,
            direction,
            step: DEFAULT_STEP,
            levels: DEFAULT_LEVELS,
            samples: DEFAULT_SAMPLES,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rho = self.torus.rho();
        let limit = 0.1 * rho.min(FRAC_PI_2 - rho);
        if !(self.step > 0.0 && self.step < limit) {
            return Err(Error::Domain(format!("step {} is not in (0, {limit:e}) at r = {}", self.step, self.torus.r())));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Domain(format!("tolerance {} is not positive", self.tolerance)));
        }
        if matches!(self.direction, Direction::Sin(0)) {
            return Err(Error::Domain("sin(0·v) is the zero direction".into()));
        }
        if self.samples < 16 || !self.samples.is_power_of_two() {
            return Err(Error::InvalidProfile(format!("sample count {} is not a power of two >= 16", self.samples)));
        }
        Ok(())
    }

    fn base_profile(&self) -> Result<Profile> {
        clifford_profile(&self.torus, self.samples)
    }

    /// `ρ + tδ` without correction.
    pub fn raw_profile(&self, t: f64) -> Result<Profile> {
        let rho = self.torus.rho();
        Profile::from_fn(self.samples, |v| rho + t * self.direction.eval(v))
    }
}

/// Largest admissible default step at `T`.
pub fn default_step(t: &TorusParameter) -> f64 {
    let rho = t.rho();
    DEFAULT_STEP.min(0.05 * rho.min(FRAC_PI_2 - rho))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectedProfile {
    pub profile: Profile,
    pub tau: f64,
    /// `|ω(γ_t) − ω(ρ)|`.
    pub residual: f64,
}

/// `ρ + τ(t) + tδ` with `ω` restored to its value at `t = 0`.
pub fn corrected_profile(spec: &VariationSpec, t: f64) -> Result<CorrectedProfile> {
    spec.validate()?;
    let target = conformal_class(&spec.base_profile()?)?;
    correct(spec, t, target)
}

fn correct(spec: &VariationSpec, t: f64, target: f64) -> Result<CorrectedProfile> {
    if t == 0.0 {
        let profile = spec.base_profile()?;
        return Ok(CorrectedProfile { profile, tau: 0.0, residual: 0.0 });
    }
    if t.abs() > 2.0 * spec.step {
        return Err(Error::Domain(format!("|t| = {} exceeds the stencil range {}", t.abs(), 2.0 * spec.step)));
    }
    let raw = spec.raw_profile(t)?;
    let rho = spec.torus.rho();
    let (lo, hi) = (-0.5 * rho, 0.5 * (FRAC_PI_2 - rho));
    let eval = |tau: f64| -> (f64, f64) {
        match raw.shifted(tau) {
            Ok(p) => match (conformal_class(&p), conformal_class_shift_derivative(&p)) {
                (Ok(w), Ok(dw)) => (w - target, dw),
                _ => (f64::NAN, f64::NAN),
            },
            Err(_) => (f64::NAN, f64::NAN),
        }
    };
    if eval(lo).0.is_nan() || eval(hi).0.is_nan() {
        return Err(Error::Correction(format!("bracket ({lo}, {hi}) leaves the admissible profiles at t = {t}")));
    }
    let ftol = 1e-14 * target.abs().max(1.0);
    let tau = newton_bisect(eval, lo, hi, 0.0, ftol, 1e-16).map_err(|e| Error::Correction(format!("t = {t}: {e}")))?;
    let profile = raw.shifted(tau)?;
    let residual = (conformal_class(&profile)? - target).abs();
    Ok(CorrectedProfile { profile, tau, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauSample {
    pub t: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub r: f64,
    pub direction: Direction,
    pub l: u32,
    /// `2π²rs·E(0,l;r)`.
    pub predicted: f64,
    pub measured: f64,
    pub rel_error: f64,
    /// `2π²rs·(lw − λ·lb)(0,l)`.
    pub operator_predicted: f64,
    pub operator_rel_error: f64,
    pub richardson_change: f64,
    pub noise_floor: f64,
    pub converged: bool,
    pub inconsistent: bool,
    pub constraint_residual: f64,
    pub tau_values: Vec<TauSample>,
}

fn rel_error(measured: f64, predicted: f64) -> f64 {
    (measured - predicted).abs() / predicted.abs().max(1.0)
}

/// `L²` norm squared of `sin(lv)·n` over `Σ_r`.
fn mode_norm_sq(t: &TorusParameter) -> f64 {
    2.0 * PI * PI * t.r() * t.s()
}

fn predictions(spec: &VariationSpec) -> Result<(f64, f64)> {
    let l = spec.direction.frequency();
    if matches!(spec.direction, Direction::Const) || l == 0 {
        return Ok((0.0, 0.0));
    }
    let t = &spec.torus;
    let mode = ModeIndex::new(0, l);
    let op = lw_symbol(t, mode) - lagrange_multiplier(t) * lb_symbol(t, mode)?;
    Ok((mode_norm_sq(t) * e_value(t, 0, l)?, mode_norm_sq(t) * op))
}

/// `d²/dt² W(γ_t)` at `t = 0` along the corrected family.
pub fn second_variation_fd(spec: &VariationSpec) -> Result<OracleReport> {
    spec.validate()?;
    let (predicted, operator_predicted) = predictions(spec)?;
    let base = spec.base_profile()?;
    let target = conformal_class(&base)?;
    let w0 = willmore_energy(&base)?;
    let taus = RefCell::new(Vec::new());
    let residual = RefCell::new(0.0f64);
    let failure = RefCell::new(None);
    let energy = |t: f64| -> f64 {
        match correct(spec, t, target).and_then(|c| Ok((willmore_energy(&c.profile)?, c))) {
            Ok((w, c)) => {
                taus.borrow_mut().push(TauSample { t, tau: c.tau });
                let mut res = residual.borrow_mut();
                *res = res.max(c.residual);
                w
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let rich = second_derivative_from_samples(
        w0,
        |h| (energy(h), energy(-h), energy(2.0 * h), energy(-2.0 * h)),
        spec.step,
        spec.levels,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut tau_values = taus.into_inner();
    tau_values.sort_by(|a, b| a.t.total_cmp(&b.t));
    let h_min = rich.steps.last().copied().unwrap_or(spec.step);
    let roundoff = 64.0 * f64::EPSILON * w0.abs() / (h_min * h_min);
    let measured = rich.value;
    let scale = predicted.abs().max(1.0);
    Ok(OracleReport {
        r: spec.torus.r(),
        direction: spec.direction,
        l: spec.direction.frequency(),
        predicted,
        measured,
        rel_error: rel_error(measured, predicted),
        operator_predicted,
        operator_rel_error: rel_error(measured, operator_predicted),
        richardson_change: rich.change,
        noise_floor: rich.change.max(roundoff),
        converged: rich.change < 0.1 * spec.tolerance * scale,
        inconsistent: measured.abs() < 1e-8 && predicted.abs() > 1e-4,
        constraint_residual: residual.into_inner(),
        tau_values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstVariation {
    pub measured: f64,
    /// `½∫⟨W⃗, −δ n⟩ dμ = −½·wgrad·area·mean(δ)`.
    pub predicted: f64,
    pub richardson_change: f64,
}

/// `d/dt W(ρ + tδ)` at `t = 0`, uncorrected.
pub fn first_variation_fd(t: &TorusParameter, direction: Direction) -> Result<FirstVariation> {
    let mut spec = VariationSpec::new(*t, direction);
    spec.step = default_step(t);
    spec.validate()?;
    let failure = RefCell::new(None);
    let energy = |x: f64| match spec.raw_profile(x).and_then(|p| willmore_energy(&p)) {
        Ok(w) => w,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let rich = first_derivative(energy, spec.step, spec.levels);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let predicted = -0.5 * geometric_data(t).wgrad * t.area() * direction.mean();
    Ok(FirstVariation { measured: rich.value, predicted, richardson_change: rich.change })
}

fn class_derivative(t: &TorusParameter, direction: Direction) -> Result<(f64, f64)> {
    let mut spec = VariationSpec::new(*t, direction);
    spec.step = default_step(t);
    spec.validate()?;
    let failure = RefCell::new(None);
    let omega = |x: f64| match spec.raw_profile(x).and_then(|p| conformal_class(&p)) {
        Ok(w) => w,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let rich = first_derivative(omega, spec.step, spec.levels);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok((rich.value, rich.change)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DbVerdict {
    /// `1/(16π²r³s)`.
    PaperConstant,
    /// `1/(4π²r³s)`.
    ChainRuleConstant,
    Both,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DbReport {
    pub r: f64,
    pub direction: Direction,
    /// `d/dt ω(ρ + tδ)` at `t = 0`.
    pub measured: f64,
    pub paper_candidate: f64,
    pub chain_rule_candidate: f64,
    pub verdict: DbVerdict,
}

/// Measures `dω` along `ρ + tδ` and compares with `κ·∫⟨−δn, n⟩dμ` up to sign,
/// for both candidate constants `κ`.
pub fn db_fd(t: &TorusParameter, direction: Direction) -> Result<DbReport> {
    let (measured, _) = class_derivative(t, direction)?;
    let (r, s) = (t.r(), t.s());
    let flux = t.area() * direction.mean();
    let paper_candidate = flux / (16.0 * PI * PI * r * r * r * s);
    let chain_rule_candidate = flux / (4.0 * PI * PI * r * r * r * s);
    let agrees = |c: f64| (measured - c).abs() <= 1e-8 * c.abs().max(1.0);
    let verdict = match (agrees(paper_candidate), agrees(chain_rule_candidate)) {
        (true, true) => DbVerdict::Both,
        (true, false) => DbVerdict::PaperConstant,
        (false, true) => DbVerdict::ChainRuleConstant,
        (false, false) => DbVerdict::Neither,
    };
    Ok(DbReport { r, direction, measured, paper_candidate, chain_rule_candidate, verdict })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaCheck {
    pub r: f64,
    pub closed_form: f64,
    /// `‖W⃗‖²/(2 Dℬ(W⃗))` from measured variations.
    pub quotient: f64,
    pub dw_drho: f64,
    pub domega_drho: f64,
}

/// Rebuilds `λ` from the measured first variations of `W` and `ω` under a
/// constant shift of the profile.
pub fn lambda_check(t: &TorusParameter) -> Result<LambdaCheck> {
    let dw_drho = first_variation_fd(t, Direction::Const)?.measured;
    let (domega_drho, _) = class_derivative(t, Direction::Const)?;
    // W⃗ = w·n with dW/dρ = ½∫⟨W⃗, −n⟩ = −½·w·area; the field w·n is the
    // profile shift −w, so Dℬ(W⃗) = −w·dω/dρ.
    let w = -2.0 * dw_drho / t.area();
    let norm_sq = w * w * t.area();
    let db_of_gradient = -w * domega_drho;
    let quotient = if w == 0.0 { 0.0 } else { norm_sq / (2.0 * db_of_gradient) };
    Ok(LambdaCheck { r: t.r(), closed_form: lagrange_multiplier(t), quotient, dw_drho, domega_drho })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeVerification {
    pub r: f64,
    pub l: u32,
    pub sin: OracleReport,
    pub cos: OracleReport,
    /// `l ≥ 2` and `l²r² < 1`.
    pub expected_negative: bool,
    /// `|m_sin − m_cos| / max(|m_sin|, |m_cos|, 1)`.
    pub isotropy: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Runs the oracle in the `sin(lv)` and `cos(lv)` directions and checks them
/// against `2π²rs·E(0,l;r)`, the predicted sign, and each other.
pub fn verify_mode(spec: &VariationSpec, l: u32) -> Result<ModeVerification> {
    if l == 0 {
        return Err(Error::ZeroMode);
    }
    let sin_spec = VariationSpec { direction: Direction::Sin(l), ..*spec };
    let cos_spec = VariationSpec { direction: Direction::Cos(l), ..*spec };
    let (sin, cos) = rayon::join(|| second_variation_fd(&sin_spec), || second_variation_fd(&cos_spec));
    let (sin, cos) = (sin?, cos?);
    let t = &spec.torus;
    let expected_negative = l >= 2 && sign_factor(t, 0, l) < 0.0;
    let mut failures = Vec::new();
    for rep in [&sin, &cos] {
        let name = match rep.direction {
            Direction::Sin(_) => "sin",
            _ => "cos",
        };
        if rep.rel_error > spec.tolerance {
            failures.push(format!(
                "{name}: measured {:.6e} vs predicted {:.6e} (relative error {:.3e} > {:.1e})",
                rep.measured, rep.predicted, rep.rel_error, spec.tolerance
            ));
        }
        if !rep.converged {
            failures.push(format!("{name}: Richardson change {:.3e} not converged", rep.richardson_change));
        }
        if rep.inconsistent {
            failures.push(format!("{name}: loss of significance"));
        }
        if rep.constraint_residual > 1e-12 {
            failures.push(format!("{name}: constraint residual {:.3e}", rep.constraint_residual));
        }
        if l == 1 {
            if rep.measured.abs() > rep.noise_floor.max(1e-6) {
                failures.push(format!("{name}: zero mode measured {:.3e}", rep.measured));
            }
        } else if (rep.measured < 0.0) != expected_negative {
            failures.push(format!("{name}: sign of {:.6e} contradicts expected_negative = {expected_negative}", rep.measured));
        }
    }
    let isotropy = (sin.measured - cos.measured).abs() / sin.measured.abs().max(cos.measured.abs()).max(1.0);
    if isotropy > 1e-6 {
        failures.push(format!("sin/cos disagree: relative {isotropy:.3e}"));
    }
    let report = ModeVerification {
        r: t.r(),
        l,
        sin,
        cos,
        expected_negative,
        isotropy,
        passed: failures.is_empty(),
        failures,
    };
    if report.passed {
        Ok(report)
    } else {
        Err(Error::VerificationFailed(Box::new(report)))
    }
}
