//! The CMC Clifford tori `T_r = r S¹ × s S¹ ⊂ S³` and their curvature data.
//!
//! Every normal-valued quantity on `T_r` is a constant multiple of the unit
//! normal `n = (s e^{iu/r}, -r e^{iv/s})`, so the normal is never stored; only
//! the scalar coefficients along it are.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};

/// Radius pair `(r, s)` with `r² + s² = 1`.
///
/// Squares are stored alongside the radii so that `r² + s² = 1` holds with
/// the least rounding; the square torus is stored with `r == s` exactly, so
/// quantities that are odd under `r ↔ s` vanish exactly there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusParameter {
    r: f64,
    s: f64,
    r2: f64,
    s2: f64,
}

impl TorusParameter {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("radius r = {r} is not in (0, 1)")));
        }
        if (r - FRAC_1_SQRT_2).abs() <= 2.0 * f64::EPSILON {
            return Ok(Self::square());
        }
        let r2 = r * r;
        let s2 = 1.0 - r2;
        Ok(Self { r, s: s2.sqrt(), r2, s2 })
    }

    /// The minimal Clifford torus, `r = s = 1/√2`.
    pub fn square() -> Self {
        Self { r: FRAC_1_SQRT_2, s: FRAC_1_SQRT_2, r2: 0.5, s2: 0.5 }
    }

    /// The torus with the radii exchanged, `T_s`.
    pub fn swapped(&self) -> Self {
        Self { r: self.s, s: self.r, r2: self.s2, s2: self.r2 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn s2(&self) -> f64 {
        self.s2
    }

    /// `r² − s²`, exactly zero on the square torus.
    pub fn r2_minus_s2(&self) -> f64 {
        (self.r - self.s) * (self.r + self.s)
    }

    /// Teichmüller coordinate `b = s/r`.
    pub fn b(&self) -> f64 {
        self.s / self.r
    }

    /// Latitude `ρ = arccos r` of the torus in the surface-of-revolution chart.
    pub fn rho(&self) -> f64 {
        self.r.acos()
    }

    /// Area `4π² r s` of the flat torus `Σ_r`.
    pub fn area(&self) -> f64 {
        4.0 * PI * PI * self.r * self.s
    }
}

impl Serialize for TorusParameter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("TorusParameter", 5)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("b", &self.b())?;
        st.serialize_field("rho", &self.rho())?;
        st.serialize_field("area", &self.area())?;
        st.end()
    }
}

/// Convenience wrapper for [`TorusParameter::new`].
pub fn make_torus(r: f64) -> Result<TorusParameter> {
    TorusParameter::new(r)
}

/// Curvature coefficients of `f_r` along the unit normal, in the isometric
/// coordinates `(u, v)` of `Σ_r` where the metric is euclidean.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GeometricData {
    pub a11: f64,
    pub a22: f64,
    /// Mean curvature `a11 + a22`.
    pub h: f64,
    /// `A° = atf · q² ⊗ n` with `q² = dv² − du²`.
    pub atf: f64,
    /// Coefficient of the Willmore gradient `W(f_r)` along `n`.
    pub wgrad: f64,
}

impl GeometricData {
    pub fn a12(&self) -> f64 {
        0.0
    }

    /// Trace-free second fundamental form as a 2×2 coefficient matrix.
    pub fn tracefree(&self) -> [[f64; 2]; 2] {
        let half = 0.5 * self.h;
        [[self.a11 - half, self.a12()], [self.a12(), self.a22 - half]]
    }
}

pub fn geometric_data(t: &TorusParameter) -> GeometricData {
    let (r, s) = (t.r, t.s);
    let rs = r * s;
    GeometricData {
        a11: -s / r,
        a22: r / s,
        h: t.r2_minus_s2() / rs,
        atf: 0.5 / rs,
        wgrad: t.r2_minus_s2() / (2.0 * rs * rs * rs),
    }
}

/// Closed form `π²/(rs)` of the Willmore energy of `T_r`.
///
/// With `h = (r² − s²)/(rs)` and `r² + s² = 1`,
/// `(h²/4 + 1)·4π²rs = ((r² + s²)²/(4r²s²))·4π²rs = π²/(rs)`.
pub fn willmore_energy_clifford(t: &TorusParameter) -> f64 {
    PI * PI / (t.r * t.s)
}

/// Euclidean contraction `Σ_ij a_ij q_ij` of constant 2-tensors.
fn contract(a: &[[f64; 2]; 2], q: &[[f64; 2]; 2]) -> f64 {
    a[0][0] * q[0][0] + a[0][1] * q[0][1] + a[1][0] * q[1][0] + a[1][1] * q[1][1]
}

const Q1: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
const Q2: [[f64; 2]; 2] = [[-1.0, 0.0], [0.0, 1.0]];

/// `|W − ((r² − s²)/(2r²s²))·g(A°, q²)|` along the normal.
pub fn constrained_residual(t: &TorusParameter) -> f64 {
    let geo = geometric_data(t);
    let multiplier = t.r2_minus_s2() / (2.0 * t.r2 * t.s2);
    (geo.wgrad - multiplier * contract(&geo.tracefree(), &Q2)).abs()
}

/// Normal coefficient of `g(A°, q¹)`; vanishes because `f_r` is isothermic.
pub fn isothermic_residual(t: &TorusParameter) -> f64 {
    contract(&geometric_data(t).tracefree(), &Q1)
}
