//! Surfaces of revolution `h_γ(u,v) = (cos γ(v) e^{iu}, sin γ(v) e^{iv})` in
//! `S³ ⊂ C² = R⁴` from a sampled periodic profile `γ`.
//!
//! Every quantity is independent of `u`, so samples are taken on the
//! meridian `u = 0` and integrals in `u` contribute an exact factor `2π`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use nalgebra::Vector4;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::TorusParameter;

const DEGENERATION_MARGIN: f64 = 1e-6;

/// Samples `γ(v_j)` at `v_j = 2πj/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct Profile {
    n: usize,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawProfile {
    n: usize,
    values: Vec<f64>,
}

impl TryFrom<RawProfile> for Profile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        if raw.values.len() != raw.n {
            return Err(Error::InvalidProfile(format!("n = {} but {} samples", raw.n, raw.values.len())));
        }
        Profile::new(raw.values)
    }
}

fn check_sample_count(n: usize) -> Result<()> {
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::InvalidProfile(format!("sample count {n} is not a power of two >= 16")));
    }
    Ok(())
}

impl Profile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_sample_count(values.len())?;
        if let Some((j, g)) = values.iter().enumerate().find(|(_, &g)| !(g > 0.0 && g < FRAC_PI_2)) {
            return Err(Error::InvalidProfile(format!("sample {j} = {g} is not in (0, π/2)")));
        }
        Ok(Self { n: values.len(), values })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_sample_count(n)?;
        Self::new((0..n).map(|j| f(Self::node(n, j))).collect())
    }

    fn node(n: usize, j: usize) -> f64 {
        2.0 * PI * j as f64 / n as f64
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| Self::node(self.n, j))
    }

    /// `γ + τ`.
    pub fn shifted(&self, tau: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|g| g + tau).collect())
    }

    /// `v ↦ γ(v + 2πm/n)`, a rotation of the surface.
    pub fn rotated(&self, m: usize) -> Self {
        let mut values = self.values.clone();
        values.rotate_left(m % self.n);
        Self { n: self.n, values }
    }
}

/// Constant profile `γ ≡ arccos r`, whose surface is `T_r`.
pub fn clifford_profile(t: &TorusParameter, n: usize) -> Result<Profile> {
    let rho = t.rho();
    Profile::from_fn(n, |_| rho)
}

/// First and second derivatives by Fourier multiplication. The Nyquist
/// coefficient is dropped for the odd first derivative and kept for the second.
pub fn spectral_derivatives(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut spec: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    forward.process(&mut spec);
    let freq = |j: usize| if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
    let mut d1: Vec<Complex64> = spec
        .iter()
        .enumerate()
        .map(|(j, &c)| if 2 * j == n { Complex64::default() } else { c * Complex64::new(0.0, freq(j)) })
        .collect();
    let mut d2: Vec<Complex64> = spec.iter().enumerate().map(|(j, &c)| c * -(freq(j) * freq(j))).collect();
    inverse.process(&mut d1);
    inverse.process(&mut d2);
    let scale = 1.0 / n as f64;
    (d1.iter().map(|c| c.re * scale).collect(), d2.iter().map(|c| c.re * scale).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceSample {
    pub v: f64,
    pub gamma: f64,
    pub dgamma: f64,
    pub ddgamma: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(skip)]
    pub position: Vector4<f64>,
    #[serde(skip)]
    pub hu: Vector4<f64>,
    #[serde(skip)]
    pub hv: Vector4<f64>,
    #[serde(skip)]
    pub normal: Vector4<f64>,
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
    /// `g^{ij} A_ij`.
    pub h: f64,
    /// `√(EG − F²)`.
    pub area_element: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceData {
    pub samples: Vec<SurfaceSample>,
}

fn complex_pair(z1: Complex64, z2: Complex64) -> Vector4<f64> {
    Vector4::new(z1.re, z1.im, z2.re, z2.im)
}

/// Unit normal: the reference `(sin γ e^{iu}, −cos γ e^{iv})` orthonormalized
/// against the position and both tangents.
fn unit_normal(position: &Vector4<f64>, hu: &Vector4<f64>, hv: &Vector4<f64>, reference: &Vector4<f64>) -> Vector4<f64> {
    let mut basis: Vec<Vector4<f64>> = Vec::with_capacity(3);
    for w in [position, hu, hv] {
        let mut e = *w;
        for b in &basis {
            e -= b * b.dot(&e);
        }
        basis.push(e.normalize());
    }
    let mut n = *reference;
    for b in &basis {
        n -= b * b.dot(&n);
    }
    let n = n.normalize();
    if n.dot(reference) < 0.0 {
        -n
    } else {
        n
    }
}

pub fn surface_data(p: &Profile) -> Result<SurfaceData> {
    if let Some((j, g)) = p
        .values
        .iter()
        .enumerate()
        .find(|(_, &g)| !(DEGENERATION_MARGIN..=FRAC_PI_2 - DEGENERATION_MARGIN).contains(&g))
    {
        return Err(Error::Geometry(format!("profile sample {j} = {g} touches a degenerate circle")));
    }
    let (dg, ddg) = spectral_derivatives(&p.values);
    let samples = p
        .nodes()
        .zip(p.values.iter())
        .zip(dg.iter().zip(ddg.iter()))
        .map(|((v, &gamma), (&d, &dd))| {
            let (sg, cg) = gamma.sin_cos();
            let ev = Complex64::from_polar(1.0, v);
            let i = Complex64::i();
            let position = complex_pair(Complex64::new(cg, 0.0), ev * sg);
            let hu = complex_pair(Complex64::new(0.0, cg), Complex64::default());
            let hv = complex_pair(Complex64::new(-sg * d, 0.0), ev * (cg * d + i * sg));
            let huu = complex_pair(Complex64::new(-cg, 0.0), Complex64::default());
            let huv = complex_pair(Complex64::new(0.0, -sg * d), Complex64::default());
            let hvv = complex_pair(
                Complex64::new(-cg * d * d - sg * dd, 0.0),
                ev * (-sg * (d * d + 1.0) + cg * dd + i * (2.0 * cg * d)),
            );
            let reference = complex_pair(Complex64::new(sg, 0.0), ev * -cg);
            let normal = unit_normal(&position, &hu, &hv, &reference);
            let (e, f, g) = (hu.dot(&hu), hu.dot(&hv), hv.dot(&hv));
            let (a11, a12, a22) = (huu.dot(&normal), huv.dot(&normal), hvv.dot(&normal));
            let det = e * g - f * f;
            let h = (g * a11 - 2.0 * f * a12 + e * a22) / det;
            SurfaceSample {
                v,
                gamma,
                dgamma: d,
                ddgamma: dd,
                e,
                f,
                g,
                position,
                hu,
                hv,
                normal,
                a11,
                a12,
                a22,
                h,
                area_element: det.sqrt(),
            }
        })
        .collect();
    Ok(SurfaceData { samples })
}

impl SurfaceData {
    /// Per-sample `v, gamma, E, G, h` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("v,gamma,E,G,h\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}", s.v, s.gamma, s.e, s.g, s.h);
        }
        out
    }

    fn mean_of(&self, f: impl Fn(&SurfaceSample) -> f64) -> f64 {
        self.samples.iter().map(f).sum::<f64>() / self.samples.len() as f64
    }
}

/// `∫(h²/4 + 1) dμ` by the trapezoid rule in `v` and exactly in `u`.
pub fn willmore_energy(p: &Profile) -> Result<f64> {
    let data = surface_data(p)?;
    Ok(4.0 * PI * PI * data.mean_of(|s| (0.25 * s.h * s.h + 1.0) * s.area_element))
}

/// `ω = (1/2π)∮ √(γ'² + sin²γ)/cos γ dv`, the `b`-coordinate of `h_γ`.
pub fn conformal_class(p: &Profile) -> Result<f64> {
    let data = surface_data(p)?;
    Ok(data.mean_of(|s| s.g.sqrt() / s.gamma.cos()))
}

/// `∂ω/∂τ` of the shifted profile `γ + τ` at `τ = 0`.
pub fn conformal_class_shift_derivative(p: &Profile) -> Result<f64> {
    let data = surface_data(p)?;
    Ok(data.mean_of(|s| {
        let (sg, cg) = s.gamma.sin_cos();
        let root = s.g.sqrt();
        sg / root + root * sg / (cg * cg)
    }))
}
