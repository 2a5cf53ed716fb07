//! The constrained stability operator of `T_r` as a Fourier multiplier.
//!
//! On a normal field `φ n` with `φ ∈ 𝒜_{k,l}` the Hessian of the Willmore
//! energy and of the Teichmüller coordinate `b` act diagonally. With
//! `m = k²/r² + l²/s²` their symbols are
//!
//! ```text
//! lw = ½(m² − m/(2r²s²)) − k²/r⁴ − l²/s⁴ + (r⁴ + s⁴)/(2r⁴s⁴)
//! lb = −(1/(4π²r²)) (k²/r² − l²/s² + (r² − s² + c_r(k,l))/(r²s²))
//! ```
//!
//! and the constrained operator is `L_r = L^W − λ L^B` with the multiplier
//! `λ = −π²(r² − s²)/s²`. The factored eigenvalue
//!
//! ```text
//! E(k,l;r) = N / (r⁴s⁴(k²s² + l²r²)),
//! N = [(k⁴ − k²)s⁴ + (l⁴ − l²)r⁴ + 2k²l²r²s²] (k²s² + l²r² − 1)
//! ```
//!
//! carries the sign of the second variation. Algebraically
//! `lw − λ·lb = E/2`; both values are reported in [`SpectrumEntry`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierField;
pub use crate::fourier::{ModeIndex, Parity};
use crate::roots::bisect;
use crate::tensor::c_constant;
use crate::torus::TorusParameter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Negative
        } else if x > 0.0 {
            Sign::Positive
        } else {
            Sign::Zero
        }
    }
}

/// All multipliers of one mode `(k, l)` at a fixed torus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub mode: ModeIndex,
    pub multiplicity: u32,
    pub c: f64,
    pub laplace_symbol: f64,
    pub lw: f64,
    pub lb: f64,
    pub lambda: f64,
    #[serde(rename = "N")]
    pub big_n: f64,
    /// Factored eigenvalue `E(k,l;r)`.
    #[serde(rename = "E")]
    pub e: f64,
    /// `lw − λ·lb`, the multiplier of `L_r` on `𝒜_{k,l}`.
    pub operator_eigenvalue: f64,
    pub sign: Sign,
}

/// `λ(r) = −π²(r² − s²)/s²`.
pub fn lagrange_multiplier(t: &TorusParameter) -> f64 {
    PI * PI * (t.s() - t.r()) * (t.s() + t.r()) / t.s2()
}

pub fn lw_symbol(t: &TorusParameter, mode: ModeIndex) -> f64 {
    let (r2, s2) = (t.r2(), t.s2());
    let (k2, l2) = ((mode.k * mode.k) as f64, (mode.l * mode.l) as f64);
    let m = k2 / r2 + l2 / s2;
    let r4s4 = r2 * r2 * s2 * s2;
    0.5 * (m * m - m / (2.0 * r2 * s2)) - k2 / (r2 * r2) - l2 / (s2 * s2) + (r2 * r2 + s2 * s2) / (2.0 * r4s4)
}

pub fn lb_symbol(t: &TorusParameter, mode: ModeIndex) -> Result<f64> {
    let (r2, s2) = (t.r2(), t.s2());
    let (k2, l2) = ((mode.k * mode.k) as f64, (mode.l * mode.l) as f64);
    let c = c_constant(t, mode.k, mode.l)?;
    Ok(-(1.0 / (4.0 * PI * PI * r2)) * (-l2 / s2 + k2 / r2 + (t.r2_minus_s2() + c) / (r2 * s2)))
}

/// `(k⁴ − k²)s⁴ + (l⁴ − l²)r⁴ + 2k²l²r²s²`, nonnegative and zero only for
/// `(k,l) ∈ {(0,0), (1,0), (0,1)}`.
pub fn prefactor(t: &TorusParameter, k: u32, l: u32) -> f64 {
    let (r2, s2) = (t.r2(), t.s2());
    let (k2, l2) = ((k * k) as f64, (l * l) as f64);
    (k2 * k2 - k2) * s2 * s2 + (l2 * l2 - l2) * r2 * r2 + 2.0 * k2 * l2 * r2 * s2
}

/// `k²s² + l²r² − 1`, evaluated as `(k² − 1)s² + (l² − 1)r²` and snapped to
/// zero when it is below the rounding level of its terms.
pub fn sign_factor(t: &TorusParameter, k: u32, l: u32) -> f64 {
    let a = ((k * k) as f64 - 1.0) * t.s2();
    let b = ((l * l) as f64 - 1.0) * t.r2();
    let d = a + b;
    if d.abs() <= 8.0 * f64::EPSILON * (a.abs() + b.abs()) {
        0.0
    } else {
        d
    }
}

/// `E(k,l;r)` from the factored numerator.
pub fn e_value(t: &TorusParameter, k: u32, l: u32) -> Result<f64> {
    if k == 0 && l == 0 {
        return Err(Error::ZeroMode);
    }
    let (r2, s2) = (t.r2(), t.s2());
    let denom = r2 * r2 * s2 * s2 * ((k * k) as f64 * s2 + (l * l) as f64 * r2);
    Ok(positive_zero(prefactor(t, k, l) * sign_factor(t, k, l) / denom))
}

fn positive_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

pub fn eigenvalue(t: &TorusParameter, mode: ModeIndex) -> Result<SpectrumEntry> {
    if mode.is_zero() {
        return Err(Error::ZeroMode);
    }
    let (k, l) = (mode.k, mode.l);
    let p = prefactor(t, k, l);
    let d = sign_factor(t, k, l);
    let e = e_value(t, k, l)?;
    let lw = lw_symbol(t, mode);
    let lb = lb_symbol(t, mode)?;
    let lambda = lagrange_multiplier(t);
    Ok(SpectrumEntry {
        mode,
        multiplicity: mode.multiplicity(),
        c: c_constant(t, k, l)?,
        laplace_symbol: FourierField::laplace_symbol(t, k as i32, l as i32),
        lw,
        lb,
        lambda,
        big_n: positive_zero(p * d),
        e,
        operator_eigenvalue: lw - lambda * lb,
        sign: Sign::of(e),
    })
}

/// Rows for every mode with `k ≤ kmax`, `l ≤ lmax`, `(k,l) ≠ (0,0)`, in
/// lexicographic order.
pub fn spectrum_table(t: &TorusParameter, kmax: u32, lmax: u32) -> Vec<SpectrumEntry> {
    (0..=kmax)
        .flat_map(|k| (0..=lmax).map(move |l| (k, l)))
        .filter(|&kl| kl != (0, 0))
        .map(|(k, l)| eigenvalue(t, ModeIndex::new(k, l)).expect("nonzero mode"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeEigen {
    pub mode: ModeIndex,
    pub e: f64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub r: f64,
    pub b: f64,
    pub stable: bool,
    pub negative_modes: Vec<ModeEigen>,
    pub zero_modes: Vec<ModeEigen>,
    /// Number of distinct `(k,l)` with `E < 0`.
    pub morse_index: u32,
    /// Number of negative eigenfunctions, counted with multiplicity.
    pub morse_index_weighted: u32,
}

/// Counts the negative modes of the constrained operator.
///
/// `E(k,l;r) < 0` requires `k²s² + l²r² < 1`, hence `k < 1/s` and `l < 1/r`,
/// so the enumeration below is finite and exhaustive.
pub fn morse_index(t: &TorusParameter) -> StabilityReport {
    let kmax = (1.0 / t.s()).floor() as u32;
    let lmax = (1.0 / t.r()).floor() as u32;
    let mut negative_modes = Vec::new();
    let mut zero_modes = Vec::new();
    for k in 0..=kmax {
        for l in 0..=lmax {
            if (k, l) == (0, 0) || sign_factor(t, k, l) > 0.0 {
                continue;
            }
            let mode = ModeIndex::new(k, l);
            let e = e_value(t, k, l).expect("nonzero mode");
            let entry = ModeEigen { mode, e, multiplicity: mode.multiplicity() };
            match Sign::of(e) {
                Sign::Negative => negative_modes.push(entry),
                Sign::Zero => zero_modes.push(entry),
                Sign::Positive => {}
            }
        }
    }
    let morse_index = negative_modes.len() as u32;
    let morse_index_weighted = negative_modes.iter().map(|m| m.multiplicity).sum();
    StabilityReport {
        r: t.r(),
        b: t.b(),
        stable: negative_modes.is_empty(),
        negative_modes,
        zero_modes,
        morse_index,
        morse_index_weighted,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", content = "index", rename_all = "lowercase")]
pub enum ModeFamily {
    /// Modes `(k, 0)`; `E` changes sign at `r = √(k² − 1)/k`.
    U(u32),
    /// Modes `(0, l)`; `E` changes sign at `r = 1/l`.
    V(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub family: ModeFamily,
    pub mode: ModeIndex,
    pub closed_form: f64,
    pub bisected: f64,
}

/// Zero crossings of `E` along the families `(0, l)` and `(k, 0)`,
/// `2 ≤ l, k ≤ max_k`, each located by bisection on `r ↦ E(k,l;r)` to
/// `|Δr| ≤ 1e-12`.
pub fn thresholds(max_k: u32) -> Result<Vec<Threshold>> {
    if max_k < 2 {
        return Err(Error::Domain(format!("max_k = {max_k} must be at least 2")));
    }
    let mut out = Vec::new();
    let families = (2..=max_k)
        .map(ModeFamily::V)
        .chain((2..=max_k).map(ModeFamily::U));
    for family in families {
        let (mode, closed_form) = match family {
            ModeFamily::V(l) => (ModeIndex::new(0, l), 1.0 / l as f64),
            ModeFamily::U(k) => {
                let kf = k as f64;
                (ModeIndex::new(k, 0), (kf * kf - 1.0).sqrt() / kf)
            }
        };
        let f = |r: f64| {
            let t = TorusParameter::new(r).expect("bracket inside (0,1)");
            e_value(&t, mode.k, mode.l).expect("nonzero mode")
        };
        let bisected = bisect(f, 1e-3, 1.0 - 1e-6, 1e-12)
            .map_err(|e| Error::Domain(format!("threshold of {mode}: {e}")))?;
        out.push(Threshold { family, mode, closed_form, bisected });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Operator {
    /// Hessian of the Willmore energy, `L^W`.
    Willmore,
    /// Hessian of the Teichmüller coordinate `b`, `L^B`.
    Constraint,
    /// `L_r = L^W − λ L^B`.
    Full,
}

/// Applies `L^W`, `L^B` or `L_r` to the normal field `φ n`, given by `φ`.
pub fn apply_operator(t: &TorusParameter, field: &FourierField, which: Operator) -> Result<FourierField> {
    if field.coeff(0, 0) != Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroMode);
    }
    let lambda = lagrange_multiplier(t);
    let symbol = |k: i32, l: i32| -> f64 {
        let mode = ModeIndex::new(k.unsigned_abs(), l.unsigned_abs());
        let lb = || lb_symbol(t, mode).expect("nonzero mode");
        match which {
            Operator::Willmore => lw_symbol(t, mode),
            Operator::Constraint => lb(),
            Operator::Full => lw_symbol(t, mode) - lambda * lb(),
        }
    };
    Ok(field.apply_symbol(|k, l| Complex64::new(symbol(k, l), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn torus(r: f64) -> TorusParameter {
        TorusParameter::new(r).unwrap()
    }

    #[test]
    fn multiplier_values() {
        assert_eq!(lagrange_multiplier(&TorusParameter::square()), 0.0);
        let half = lagrange_multiplier(&torus(0.5));
        assert!((half - 2.0 * PI * PI / 3.0).abs() < 1e-14);
        for r in [0.2, 0.4, 0.6, 0.9] {
            let t = torus(r);
            let lhs = t.s2() * lagrange_multiplier(&t);
            let rhs = -t.r2() * lagrange_multiplier(&t.swapped());
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn lw_at_square_torus() {
        // r²s² = 1/4 and r⁴ = s⁴ = 1/4: ½(4 − 4) − 4 + 4 = 0 for (1,0).
        let sq = TorusParameter::square();
        assert!(lw_symbol(&sq, ModeIndex::new(1, 0)).abs() < 1e-14);
        assert!(lw_symbol(&sq, ModeIndex::new(0, 1)).abs() < 1e-14);
        // (0,2): m = 8, ½(64 − 16) − 16 + 4 = 12.
        assert!((lw_symbol(&sq, ModeIndex::new(0, 2)) - 12.0).abs() < 1e-13);
    }

    #[test]
    fn lw_swap_symmetry() {
        for r in [0.15, 0.4, 0.77] {
            let t = torus(r);
            for (k, l) in [(1, 0), (2, 3), (4, 1)] {
                let a = lw_symbol(&t, ModeIndex::new(k, l));
                let b = lw_symbol(&t.swapped(), ModeIndex::new(l, k));
                assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn lb_values() {
        let sq = TorusParameter::square();
        assert!(lb_symbol(&sq, ModeIndex::new(1, 1)).unwrap().abs() < 1e-15);
        // (0,2) at r = s: c = −1, so −(1/(2π²))(−8 + (0 − 1)·4) = 6/π².
        let v = lb_symbol(&sq, ModeIndex::new(0, 2)).unwrap();
        assert!((v - 6.0 / (PI * PI)).abs() < 1e-14);
        assert!(matches!(lb_symbol(&sq, ModeIndex::new(0, 0)), Err(Error::ZeroMode)));
    }

    #[test]
    fn eigenvalue_examples() {
        for r in [0.1, 0.33, 0.5, FRAC_1_SQRT_2, 0.9] {
            let t = torus(r);
            assert_eq!(e_value(&t, 1, 0).unwrap(), 0.0);
            assert_eq!(e_value(&t, 0, 1).unwrap(), 0.0);
            assert_eq!(e_value(&t, 1, 1).unwrap(), 0.0);
        }
        let entry = eigenvalue(&TorusParameter::square(), ModeIndex::new(0, 2)).unwrap();
        assert!((entry.e - 24.0).abs() < 1e-12);
        assert!((entry.operator_eigenvalue - 12.0).abs() < 1e-12);
        assert_eq!(entry.multiplicity, 2);
        assert_eq!(entry.sign, Sign::Positive);
        let e = e_value(&torus(0.4), 0, 2).unwrap();
        assert!((e - (-0.110592 / (0.0256 * 0.7056 * 0.64))).abs() < 1e-12);
        assert!(e < 0.0);
        assert!(matches!(eigenvalue(&torus(0.4), ModeIndex::new(0, 0)), Err(Error::ZeroMode)));
    }

    #[test]
    fn operator_chain_is_half_the_factored_eigenvalue() {
        for r in [0.05, 0.2, 0.45, FRAC_1_SQRT_2, 0.8, 0.97] {
            let t = torus(r);
            for k in 0..=10 {
                for l in 0..=10 {
                    if (k, l) == (0, 0) {
                        continue;
                    }
                    let e = eigenvalue(&t, ModeIndex::new(k, l)).unwrap();
                    let scale = e.lw.abs() + (e.lambda * e.lb).abs() + 1.0;
                    assert!(
                        (e.operator_eigenvalue - 0.5 * e.e).abs() <= 1e-12 * scale,
                        "r={r} ({k},{l}): {} vs {}",
                        e.operator_eigenvalue,
                        0.5 * e.e
                    );
                }
            }
        }
    }

    #[test]
    fn morse_index_examples() {
        let rep = morse_index(&torus(0.6));
        assert!(rep.stable);
        assert_eq!(rep.morse_index, 0);

        let rep = morse_index(&torus(0.3));
        assert_eq!(rep.morse_index, 2);
        assert_eq!(rep.morse_index_weighted, 4);
        let modes: Vec<_> = rep.negative_modes.iter().map(|m| (m.mode.k, m.mode.l, m.multiplicity)).collect();
        assert_eq!(modes, vec![(0, 2, 2), (0, 3, 2)]);
        assert!(rep.zero_modes.iter().any(|m| (m.mode.k, m.mode.l) == (1, 1)));

        let rep = morse_index(&torus(0.96));
        let modes: Vec<_> = rep.negative_modes.iter().map(|m| (m.mode.k, m.mode.l)).collect();
        assert_eq!(modes, vec![(2, 0), (3, 0)]);
    }

    #[test]
    fn interval_endpoints_are_stable() {
        assert!(morse_index(&torus(0.5)).stable);
        assert!(morse_index(&torus(3f64.sqrt() / 2.0)).stable);
        assert!(!morse_index(&torus(0.5 - 1e-9)).stable);
        assert!(!morse_index(&torus(3f64.sqrt() / 2.0 + 1e-9)).stable);
    }

    #[test]
    fn threshold_locations() {
        let th = thresholds(3).unwrap();
        assert_eq!(th.len(), 4);
        for t in &th {
            assert!((t.bisected - t.closed_form).abs() <= 1e-12, "{t:?}");
        }
        assert!((th[0].closed_form - 0.5).abs() < 1e-16);
        assert!((th[1].closed_form - 1.0 / 3.0).abs() < 1e-16);
        assert!((th[2].closed_form - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(thresholds(1).is_err());
    }

    #[test]
    fn apply_operator_is_diagonal() {
        let sq = TorusParameter::square();
        let m = ModeIndex::with_parity(0, 2, Parity::Cos, Parity::Sin).unwrap();
        let phi = FourierField::mode(sq, m);
        let out = apply_operator(&sq, &phi, Operator::Full).unwrap();
        assert!(out.max_abs_diff(&phi.scale(12.0)) < 1e-12);
        let zero = apply_operator(&sq, &FourierField::mode(sq, ModeIndex::new(1, 0)), Operator::Full).unwrap();
        assert!(zero.max_abs_coeff() < 1e-13);
        assert!(matches!(
            apply_operator(&sq, &FourierField::constant(sq, 1.0), Operator::Willmore),
            Err(Error::ZeroMode)
        ));
    }

    #[test]
    fn apply_operator_is_linear() {
        let t = torus(0.37);
        let f = FourierField::mode(t, ModeIndex::new(2, 1));
        let g = FourierField::mode(t, ModeIndex::new(0, 3));
        let combo = &f.scale(1.5) + &g.scale(-0.25);
        for which in [Operator::Willmore, Operator::Constraint, Operator::Full] {
            let lhs = apply_operator(&t, &combo, which).unwrap();
            let rhs = &apply_operator(&t, &f, which).unwrap().scale(1.5)
                + &apply_operator(&t, &g, which).unwrap().scale(-0.25);
            assert!(lhs.max_abs_diff(&rhs) < 1e-10 * rhs.max_abs_coeff().max(1.0));
        }
    }
}
