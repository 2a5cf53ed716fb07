//! Finite Fourier series on the flat torus `Σ_r = R² / (2πr Z × 2πs Z)`.
//!
//! A real field is stored as complex coefficients of `exp(i(k u/r + l v/s))`
//! over `(k, l) ∈ Z²`, conjugate-symmetric so that the field is real. All
//! derivatives are diagonal multipliers in this representation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::TorusParameter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Cos,
    Sin,
}

/// Fourier mode `(k, l)` of `Σ_r`, with the parity of each factor of a basis
/// function `u(x/r) v(y/s)` of `𝒜_{k,l}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub k: u32,
    pub l: u32,
    pub parity_u: Parity,
    pub parity_v: Parity,
}

impl ModeIndex {
    /// The `cos ⊗ cos` representative of `𝒜_{k,l}`.
    pub fn new(k: u32, l: u32) -> Self {
        Self { k, l, parity_u: Parity::Cos, parity_v: Parity::Cos }
    }

    pub fn with_parity(k: u32, l: u32, parity_u: Parity, parity_v: Parity) -> Result<Self> {
        if (k == 0 && parity_u == Parity::Sin) || (l == 0 && parity_v == Parity::Sin) {
            return Err(Error::Domain(format!("sin factor at zero frequency in mode ({k},{l})")));
        }
        Ok(Self { k, l, parity_u, parity_v })
    }

    pub fn is_zero(&self) -> bool {
        self.k == 0 && self.l == 0
    }

    /// Dimension of `𝒜_{k,l}`.
    pub fn multiplicity(&self) -> u32 {
        (if self.k > 0 { 2 } else { 1 }) * (if self.l > 0 { 2 } else { 1 })
    }

    /// All basis functions of `𝒜_{k,l}`, one per parity combination.
    pub fn basis(k: u32, l: u32) -> Vec<ModeIndex> {
        let pu: &[Parity] = if k == 0 { &[Parity::Cos] } else { &[Parity::Cos, Parity::Sin] };
        let pv: &[Parity] = if l == 0 { &[Parity::Cos] } else { &[Parity::Cos, Parity::Sin] };
        pu.iter()
            .flat_map(|&a| pv.iter().map(move |&b| ModeIndex { k, l, parity_u: a, parity_v: b }))
            .collect()
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

/// Real scalar field on `Σ_r` as a finite Fourier series.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    torus: TorusParameter,
    coeffs: BTreeMap<(i32, i32), Complex64>,
}

/// One-dimensional factor `cos(k·)` or `sin(k·)` as exponential coefficients.
fn factor(freq: i32, parity: Parity) -> Vec<(i32, Complex64)> {
    match (freq, parity) {
        (0, _) => vec![(0, Complex64::new(1.0, 0.0))],
        (k, Parity::Cos) => vec![(k, Complex64::new(0.5, 0.0)), (-k, Complex64::new(0.5, 0.0))],
        (k, Parity::Sin) => vec![(k, Complex64::new(0.0, -0.5)), (-k, Complex64::new(0.0, 0.5))],
    }
}

impl FourierField {
    pub fn zero(torus: TorusParameter) -> Self {
        Self { torus, coeffs: BTreeMap::new() }
    }

    pub fn constant(torus: TorusParameter, value: f64) -> Self {
        let mut f = Self::zero(torus);
        f.insert(0, 0, Complex64::new(value, 0.0));
        f
    }

    /// Basis function `u(k x/r) v(l y/s)` of `𝒜_{k,l}`.
    pub fn mode(torus: TorusParameter, mode: ModeIndex) -> Self {
        let mut f = Self::zero(torus);
        for (p, a) in factor(mode.k as i32, mode.parity_u) {
            for (q, b) in factor(mode.l as i32, mode.parity_v) {
                f.insert(p, q, a * b);
            }
        }
        f
    }

    /// Adds `c e^{iθ} + conj(c) e^{-iθ}`, `θ = k u/r + l v/s`; the result stays real.
    pub fn add_real_mode(&mut self, k: i32, l: i32, c: Complex64) {
        if k == 0 && l == 0 {
            self.insert(0, 0, Complex64::new(c.re, 0.0));
        } else {
            self.insert(k, l, c);
            self.insert(-k, -l, c.conj());
        }
    }

    fn insert(&mut self, k: i32, l: i32, c: Complex64) {
        *self.coeffs.entry((k, l)).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn torus(&self) -> &TorusParameter {
        &self.torus
    }

    pub fn coeff(&self, k: i32, l: i32) -> Complex64 {
        self.coeffs.get(&(k, l)).copied().unwrap_or_default()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = ((i32, i32), Complex64)> + '_ {
        self.coeffs.iter().map(|(&kl, &c)| (kl, c))
    }

    pub fn mean(&self) -> f64 {
        self.coeff(0, 0).re
    }

    /// `k²/r² + l²/s²`, the symbol of `−Δ`.
    pub fn laplace_symbol(torus: &TorusParameter, k: i32, l: i32) -> f64 {
        let (k, l) = (k as f64, l as f64);
        k * k / torus.r2() + l * l / torus.s2()
    }

    /// Multiplies every coefficient by `symbol(k, l)`.
    pub fn apply_symbol<F>(&self, symbol: F) -> Self
    where
        F: Fn(i32, i32) -> Complex64,
    {
        let coeffs = self.coeffs.iter().map(|(&(k, l), &c)| ((k, l), c * symbol(k, l))).collect();
        Self { torus: self.torus, coeffs }
    }

    /// `∂/∂u`, the derivative along the circle of radius `r`.
    pub fn d1(&self) -> Self {
        let r = self.torus.r();
        self.apply_symbol(|k, _| Complex64::new(0.0, k as f64 / r))
    }

    /// `∂/∂v`, the derivative along the circle of radius `s`.
    pub fn d2(&self) -> Self {
        let s = self.torus.s();
        self.apply_symbol(|_, l| Complex64::new(0.0, l as f64 / s))
    }

    pub fn laplacian(&self) -> Self {
        let t = self.torus;
        self.apply_symbol(|k, l| Complex64::new(-Self::laplace_symbol(&t, k, l), 0.0))
    }

    /// Zero-mean solution `u` of `Δu = rhs`.
    pub fn solve_poisson(rhs: &FourierField) -> Result<FourierField> {
        let scale = rhs.max_abs_coeff().max(1.0);
        let mean = rhs.coeff(0, 0).norm();
        if mean > 1e-14 * scale {
            return Err(Error::NonzeroMean(mean));
        }
        let t = rhs.torus;
        let coeffs = rhs
            .coeffs
            .iter()
            .filter(|(&kl, _)| kl != (0, 0))
            .map(|(&(k, l), &c)| ((k, l), c / -Self::laplace_symbol(&t, k, l)))
            .collect();
        Ok(Self { torus: t, coeffs })
    }

    pub fn scale(&self, a: f64) -> Self {
        self.apply_symbol(|_, _| Complex64::new(a, 0.0))
    }

    /// `∫_{Σ_r} f g dμ` for real fields.
    pub fn inner(&self, other: &FourierField) -> f64 {
        let sum: f64 = self
            .coeffs
            .iter()
            .map(|(kl, c)| (c * other.coeffs.get(kl).copied().unwrap_or_default().conj()).re)
            .sum();
        sum * self.torus.area()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &FourierField) -> f64 {
        (self - other).max_abs_coeff()
    }

    /// Largest violation of `c_{-k,-l} = conj(c_{k,l})`.
    pub fn reality_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(k, l), c)| (c - self.coeff(-k, -l).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Point value at `(u, v)` with `u ∈ [0, 2πr)`, `v ∈ [0, 2πs)`.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        let (r, s) = (self.torus.r(), self.torus.s());
        self.coeffs
            .iter()
            .map(|(&(k, l), c)| {
                let theta = k as f64 * u / r + l as f64 * v / s;
                (c * Complex64::from_polar(1.0, theta)).re
            })
            .sum()
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn prune(mut self, tol: f64) -> Self {
        self.coeffs.retain(|_, c| c.norm() > tol);
        self
    }
}

impl Add for &FourierField {
    type Output = FourierField;
    fn add(self, rhs: &FourierField) -> FourierField {
        let mut out = self.clone();
        for (&(k, l), &c) in &rhs.coeffs {
            out.insert(k, l, c);
        }
        out
    }
}

impl Sub for &FourierField {
    type Output = FourierField;
    fn sub(self, rhs: &FourierField) -> FourierField {
        let mut out = self.clone();
        for (&(k, l), &c) in &rhs.coeffs {
            out.insert(k, l, -c);
        }
        out
    }
}

impl Neg for &FourierField {
    type Output = FourierField;
    fn neg(self) -> FourierField {
        self.scale(-1.0)
    }
}

/// Pointwise product, a convolution of the coefficient sequences.
impl Mul for &FourierField {
    type Output = FourierField;
    fn mul(self, rhs: &FourierField) -> FourierField {
        let mut out = FourierField::zero(self.torus);
        for (&(k1, l1), &a) in &self.coeffs {
            for (&(k2, l2), &b) in &rhs.coeffs {
                out.insert(k1 + k2, l1 + l2, a * b);
            }
        }
        out
    }
}

impl Mul<f64> for &FourierField {
    type Output = FourierField;
    fn mul(self, a: f64) -> FourierField {
        self.scale(a)
    }
}
