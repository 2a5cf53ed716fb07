//! Symmetric 2-tensors on the flat torus `Σ_r`: trace, divergence, their
//! first variations in the metric, and the trace-free Poisson solve that
//! produces the constants `c_r(k,l)`.
//!
//! Coordinates are `(u, v)`, index 1 along the circle of radius `r` and
//! index 2 along the circle of radius `s`. The pointwise pairing of tensors
//! is `⟨q, p⟩ = Σ_ij q_ij p_ij`.

use crate::error::{Error, Result};
use crate::fourier::{FourierField, ModeIndex};
use crate::torus::TorusParameter;

/// Constant-coefficient Riemannian metric on `Σ_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatMetric {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl FlatMetric {
    pub fn new(g11: f64, g12: f64, g22: f64) -> Result<Self> {
        let det = g11 * g22 - g12 * g12;
        if !(g11 > 0.0 && det > 0.0) {
            return Err(Error::DegenerateMetric(format!(
                "g = [[{g11}, {g12}], [{g12}, {g22}]] is not positive definite"
            )));
        }
        Ok(Self { g11, g12, g22 })
    }

    pub fn euclidean() -> Self {
        Self { g11: 1.0, g12: 0.0, g22: 1.0 }
    }

    /// The chart metric `g_{a,b} = du² + 2a(r/s) du dv + (a² + b²)(r²/s²) dv²`,
    /// which is the euclidean metric at `(a, b) = (0, s/r)`.
    pub fn teichmuller_chart(torus: &TorusParameter, a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::Domain(format!("b = {b} is not in the upper half-plane")));
        }
        let ratio = torus.r() / torus.s();
        Self::new(1.0, a * ratio, (a * a + b * b) * ratio * ratio)
    }

    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn inverse(&self) -> Result<[[f64; 2]; 2]> {
        let det = self.det();
        if !(self.g11 > 0.0 && det > 0.0) {
            return Err(Error::DegenerateMetric(format!("det g = {det}")));
        }
        Ok([[self.g22 / det, -self.g12 / det], [-self.g12 / det, self.g11 / det]])
    }

    pub fn is_euclidean(&self) -> bool {
        *self == Self::euclidean()
    }
}

/// Symmetric 2-tensor field with Fourier-series components.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField {
    pub t11: FourierField,
    pub t12: FourierField,
    pub t22: FourierField,
}

/// 1-form field with Fourier-series components.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormField {
    pub w1: FourierField,
    pub w2: FourierField,
}

impl OneFormField {
    pub fn component(&self, m: usize) -> &FourierField {
        match m {
            0 => &self.w1,
            _ => &self.w2,
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.w1.max_abs_coeff().max(self.w2.max_abs_coeff())
    }

    pub fn max_abs_diff(&self, other: &OneFormField) -> f64 {
        self.w1.max_abs_diff(&other.w1).max(self.w2.max_abs_diff(&other.w2))
    }

    pub fn eval(&self, u: f64, v: f64) -> [f64; 2] {
        [self.w1.eval(u, v), self.w2.eval(u, v)]
    }
}

fn sum_fields(torus: TorusParameter, terms: impl IntoIterator<Item = FourierField>) -> FourierField {
    terms.into_iter().fold(FourierField::zero(torus), |acc, f| &acc + &f)
}

impl SymTensorField {
    pub fn zero(torus: TorusParameter) -> Self {
        let z = FourierField::zero(torus);
        Self { t11: z.clone(), t12: z.clone(), t22: z }
    }

    fn constant(torus: TorusParameter, c11: f64, c12: f64, c22: f64) -> Self {
        Self {
            t11: FourierField::constant(torus, c11),
            t12: FourierField::constant(torus, c12),
            t22: FourierField::constant(torus, c22),
        }
    }

    /// `q¹ = du ⊗ dv + dv ⊗ du`.
    pub fn q1(torus: TorusParameter) -> Self {
        Self::constant(torus, 0.0, 1.0, 0.0)
    }

    /// `q² = dv ⊗ dv − du ⊗ du`.
    pub fn q2(torus: TorusParameter) -> Self {
        Self::constant(torus, -1.0, 0.0, 1.0)
    }

    /// A constant metric viewed as a tensor field.
    pub fn from_metric(torus: TorusParameter, g: &FlatMetric) -> Self {
        Self::constant(torus, g.g11, g.g12, g.g22)
    }

    /// `α₁ q¹ + α₂ q²`.
    pub fn tracefree(alpha1: &FourierField, alpha2: &FourierField) -> Self {
        Self { t11: -alpha2, t12: alpha1.clone(), t22: alpha2.clone() }
    }

    pub fn torus(&self) -> &TorusParameter {
        self.t11.torus()
    }

    pub fn component(&self, i: usize, j: usize) -> &FourierField {
        match (i, j) {
            (0, 0) => &self.t11,
            (1, 1) => &self.t22,
            _ => &self.t12,
        }
    }

    /// Pointwise product `φ · self`.
    pub fn times(&self, phi: &FourierField) -> Self {
        Self { t11: phi * &self.t11, t12: phi * &self.t12, t22: phi * &self.t22 }
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { t11: self.t11.scale(a), t12: self.t12.scale(a), t22: self.t22.scale(a) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { t11: &self.t11 + &other.t11, t12: &self.t12 + &other.t12, t22: &self.t22 + &other.t22 }
    }

    /// Largest coefficient of `t11 + t22`.
    pub fn trace_defect(&self) -> f64 {
        (&self.t11 + &self.t22).max_abs_coeff()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        [&self.t11, &self.t12, &self.t22].iter().map(|f| f.max_abs_coeff()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.t11
            .max_abs_diff(&other.t11)
            .max(self.t12.max_abs_diff(&other.t12))
            .max(self.t22.max_abs_diff(&other.t22))
    }

    /// `∫ Σ_ij q_ij p_ij dμ` over `Σ_r` with the euclidean area element.
    pub fn inner(&self, other: &Self) -> f64 {
        self.t11.inner(&other.t11) + 2.0 * self.t12.inner(&other.t12) + self.t22.inner(&other.t22)
    }

    pub fn eval(&self, u: f64, v: f64) -> [[f64; 2]; 2] {
        let off = self.t12.eval(u, v);
        [[self.t11.eval(u, v), off], [off, self.t22.eval(u, v)]]
    }
}

fn partial(f: &FourierField, i: usize) -> FourierField {
    match i {
        0 => f.d1(),
        _ => f.d2(),
    }
}

/// `tr_g q = g^{ij} q_ij`.
pub fn trace(g: &FlatMetric, q: &SymTensorField) -> Result<FourierField> {
    let gi = g.inverse()?;
    Ok(sum_fields(
        *q.torus(),
        [q.t11.scale(gi[0][0]), q.t12.scale(2.0 * gi[0][1]), q.t22.scale(gi[1][1])],
    ))
}

/// `(div_g q)_m = g^{ij} ∂_i q_{jm}` for a constant metric.
pub fn divergence(g: &FlatMetric, q: &SymTensorField) -> Result<OneFormField> {
    let gi = g.inverse()?;
    let torus = *q.torus();
    let comp = |m: usize| {
        sum_fields(
            torus,
            (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| {
                partial(q.component(j, m), i).scale(gi[i][j])
            }),
        )
    };
    Ok(OneFormField { w1: comp(0), w2: comp(1) })
}

/// First variation of the trace in the metric: `−g^{ij} g^{kl} q_ik h_jl`.
pub fn d_trace(g: &FlatMetric, q: &SymTensorField, h: &SymTensorField) -> Result<FourierField> {
    let gi = g.inverse()?;
    let mut terms = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let w = gi[i][j] * gi[k][l];
                    if w != 0.0 {
                        terms.push((q.component(i, k) * h.component(j, l)).scale(-w));
                    }
                }
            }
        }
    }
    Ok(sum_fields(*q.torus(), terms))
}

/// First variation of the divergence in the metric, at the euclidean metric:
///
/// `(D₁θ(g,q)h)_m = −h_ik ∂_i q_km − (div h)_k q_km + ½ ∂_k(tr h) q_km − ½ (∂_m h_ik) q_ik`.
pub fn d_divergence(g: &FlatMetric, q: &SymTensorField, h: &SymTensorField) -> Result<OneFormField> {
    if !g.is_euclidean() {
        return Err(Error::UnsupportedMetric(
            "the metric derivative of the divergence is only available at the euclidean metric".into(),
        ));
    }
    let torus = *q.torus();
    let div_h = divergence(g, h)?;
    let tr_h = trace(g, h)?;
    let comp = |m: usize| {
        let mut terms = Vec::new();
        for i in 0..2 {
            for k in 0..2 {
                terms.push(-&(h.component(i, k) * &partial(q.component(k, m), i)));
                terms.push((&partial(h.component(i, k), m) * q.component(i, k)).scale(-0.5));
            }
        }
        for k in 0..2 {
            terms.push(-&(div_h.component(k) * q.component(k, m)));
            terms.push((&partial(&tr_h, k) * q.component(k, m)).scale(0.5));
        }
        sum_fields(torus, terms)
    };
    Ok(OneFormField { w1: comp(0), w2: comp(1) })
}

/// Variation `η° = u₁q¹ + u₂q²` of the trace-free TT tensor `q²` under the metric
/// perturbation `α = α₁q¹ + α₂q²`, determined mode-wise by
///
/// `Δu₁ = (∂₁² − ∂₂²)α₁ + 2∂₁∂₂α₂`, `Δu₂ = 2∂₁∂₂α₁ − (∂₁² − ∂₂²)α₂`
///
/// with zero-mean `u₁, u₂`, so that `η°` is `L²`-orthogonal to `q¹` and `q²`.
pub fn tt_perturbation(alpha: &SymTensorField) -> Result<SymTensorField> {
    let defect = alpha.trace_defect();
    if defect > 1e-13 * alpha.max_abs_coeff().max(1.0) {
        return Err(Error::NotTraceFree(defect));
    }
    let a1 = &alpha.t12;
    let a2 = &alpha.t22;
    let wave = |f: &FourierField| &f.d1().d1() - &f.d2().d2();
    let mixed = |f: &FourierField| f.d1().d2().scale(2.0);
    let u1 = FourierField::solve_poisson(&(&wave(a1) + &mixed(a2)))?;
    let u2 = FourierField::solve_poisson(&(&mixed(a1) - &wave(a2)))?;
    Ok(SymTensorField::tracefree(&u1, &u2))
}

/// `c_r(k,l) = (k²s² − l²r²)/(k²s² + l²r²)`.
pub fn c_constant(torus: &TorusParameter, k: u32, l: u32) -> Result<f64> {
    if k == 0 && l == 0 {
        return Err(Error::ZeroMode);
    }
    let ks = (k * k) as f64 * torus.s2();
    let lr = (l * l) as f64 * torus.r2();
    Ok((ks - lr) / (ks + lr))
}

/// `c_r(k,l)` recovered from the Poisson solve: with `α = φ q²` and
/// `φ ∈ 𝒜_{k,l}`, the solution has `u₂ = −c_r(k,l) φ`.
pub fn c_from_poisson(torus: &TorusParameter, k: u32, l: u32) -> Result<f64> {
    if k == 0 && l == 0 {
        return Err(Error::ZeroMode);
    }
    let phi = FourierField::mode(*torus, ModeIndex::new(k, l));
    let alpha = SymTensorField::q2(*torus).times(&phi);
    let eta = tt_perturbation(&alpha)?;
    Ok(-eta.t22.inner(&phi) / phi.norm_sq())
}

/// `Dπ(g_euc) h = (s/r) Σ_μ ⟨h, q^μ⟩ / ‖q^μ‖² e_μ`: the `L²` projection onto
/// the TT tensors followed by `Dπ q^μ = (s/r) e_μ`.
pub fn teichmuller_differential(h: &SymTensorField) -> [f64; 2] {
    let torus = *h.torus();
    let scale = torus.s() / torus.r();
    let q1 = SymTensorField::q1(torus);
    let q2 = SymTensorField::q2(torus);
    [scale * h.inner(&q1) / q1.inner(&q1), scale * h.inner(&q2) / q2.inner(&q2)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::Parity;
    use std::f64::consts::PI;

    fn torus() -> TorusParameter {
        TorusParameter::new(0.45).unwrap()
    }

    #[test]
    fn traces_of_basic_tensors() {
        let t = torus();
        let g = FlatMetric::euclidean();
        assert_eq!(trace(&g, &SymTensorField::q1(t)).unwrap().max_abs_coeff(), 0.0);
        assert_eq!(trace(&g, &SymTensorField::q2(t)).unwrap().max_abs_coeff(), 0.0);
        let id = SymTensorField::from_metric(t, &g);
        assert_eq!(trace(&g, &id).unwrap().mean(), 2.0);
    }

    #[test]
    fn degenerate_metric_rejected() {
        assert!(FlatMetric::new(1.0, 1.0, 1.0).is_err());
        assert!(FlatMetric::new(-1.0, 0.0, -1.0).is_err());
        let bad = FlatMetric { g11: 1.0, g12: 2.0, g22: 1.0 };
        assert!(matches!(trace(&bad, &SymTensorField::q1(torus())), Err(Error::DegenerateMetric(_))));
    }

    #[test]
    fn divergence_of_constant_tensor_vanishes() {
        let t = torus();
        let g = FlatMetric::new(1.3, 0.2, 0.8).unwrap();
        let d = divergence(&g, &SymTensorField::q2(t).scale(3.0)).unwrap();
        assert_eq!(d.max_abs_coeff(), 0.0);
    }

    #[test]
    fn divergence_of_modulated_tt_tensors() {
        let t = torus();
        let g = FlatMetric::euclidean();
        let phi = FourierField::mode(t, ModeIndex::with_parity(2, 3, Parity::Sin, Parity::Cos).unwrap());
        let d = divergence(&g, &SymTensorField::q2(t).times(&phi)).unwrap();
        assert!(d.w1.max_abs_diff(&-&phi.d1()) < 1e-13);
        assert!(d.w2.max_abs_diff(&phi.d2()) < 1e-13);
        let d = divergence(&g, &SymTensorField::q1(t).times(&phi)).unwrap();
        assert!(d.w1.max_abs_diff(&phi.d2()) < 1e-13);
        assert!(d.w2.max_abs_diff(&phi.d1()) < 1e-13);
    }

    #[test]
    fn d_trace_examples() {
        let t = torus();
        let g = FlatMetric::euclidean();
        let (q1, q2) = (SymTensorField::q1(t), SymTensorField::q2(t));
        assert_eq!(d_trace(&g, &q2, &q2).unwrap().mean(), -2.0);
        assert_eq!(d_trace(&g, &q1, &q2).unwrap().max_abs_coeff(), 0.0);
        assert_eq!(d_trace(&g, &q1, &SymTensorField::zero(t)).unwrap().max_abs_coeff(), 0.0);
    }

    #[test]
    fn d_divergence_trivial_cases() {
        let t = torus();
        let g = FlatMetric::euclidean();
        let phi = FourierField::mode(t, ModeIndex::new(1, 2));
        let q = SymTensorField::q1(t).times(&phi);
        let z = d_divergence(&g, &q, &SymTensorField::zero(t)).unwrap();
        assert_eq!(z.max_abs_coeff(), 0.0);
        let c = d_divergence(&g, &SymTensorField::q2(t), &SymTensorField::q1(t).scale(0.3)).unwrap();
        assert_eq!(c.max_abs_coeff(), 0.0);
    }

    #[test]
    fn d_divergence_requires_euclidean_base() {
        let t = torus();
        let g = FlatMetric::new(2.0, 0.0, 1.0).unwrap();
        let q = SymTensorField::q1(t);
        assert!(matches!(d_divergence(&g, &q, &q), Err(Error::UnsupportedMetric(_))));
    }

    #[test]
    fn tt_perturbation_of_q2_modes() {
        for r in [0.3, 0.45, std::f64::consts::FRAC_1_SQRT_2, 0.8] {
            let t = TorusParameter::new(r).unwrap();
            for (k, l) in [(1, 0), (0, 1), (2, 3), (5, 1)] {
                for mode in ModeIndex::basis(k, l) {
                    let phi = FourierField::mode(t, mode);
                    let eta = tt_perturbation(&SymTensorField::q2(t).times(&phi)).unwrap();
                    let c = c_constant(&t, k, l).unwrap();
                    assert!(eta.t22.max_abs_diff(&phi.scale(-c)) < 1e-13);
                    assert!(eta.trace_defect() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn tt_perturbation_of_q1_modes_has_plus_sign() {
        let t = torus();
        for (k, l) in [(1, 0), (0, 2), (3, 1)] {
            let phi = FourierField::mode(t, ModeIndex::new(k, l));
            let eta = tt_perturbation(&SymTensorField::q1(t).times(&phi)).unwrap();
            let c = c_constant(&t, k, l).unwrap();
            assert!(eta.t12.max_abs_diff(&phi.scale(c)) < 1e-13);
        }
    }

    #[test]
    fn tt_perturbation_of_constant_is_zero() {
        let t = torus();
        let eta = tt_perturbation(&SymTensorField::q2(t).scale(2.5)).unwrap();
        assert_eq!(eta.max_abs_coeff(), 0.0);
    }

    #[test]
    fn tt_perturbation_rejects_trace() {
        let t = torus();
        let g = SymTensorField::from_metric(t, &FlatMetric::euclidean());
        assert!(matches!(tt_perturbation(&g), Err(Error::NotTraceFree(_))));
    }

    #[test]
    fn c_constant_examples() {
        for r in [0.2, 0.5, 0.9] {
            let t = TorusParameter::new(r).unwrap();
            assert_eq!(c_constant(&t, 1, 0).unwrap(), 1.0);
            for l in 1..6 {
                assert_eq!(c_constant(&t, 0, l).unwrap(), -1.0);
            }
        }
        let sq = TorusParameter::square();
        for k in 1..6 {
            assert_eq!(c_constant(&sq, k, k).unwrap(), 0.0);
        }
        assert!(matches!(c_constant(&sq, 0, 0), Err(Error::ZeroMode)));
    }

    #[test]
    fn tt_norms() {
        let t = torus();
        let (q1, q2) = (SymTensorField::q1(t), SymTensorField::q2(t));
        let expect = 8.0 * PI * PI * t.r() * t.s();
        assert!((q1.inner(&q1) - expect).abs() < 1e-12);
        assert!((q2.inner(&q2) - expect).abs() < 1e-12);
        assert_eq!(q1.inner(&q2), 0.0);
    }

    #[test]
    fn chart_is_euclidean_at_base_point() {
        let t = torus();
        let g = FlatMetric::teichmuller_chart(&t, 0.0, t.b()).unwrap();
        assert!((g.g11 - 1.0).abs() < 1e-15 && g.g12 == 0.0 && (g.g22 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn teichmuller_differential_inverts_chart() {
        // π(g_{a,b}) = (a, b), so the chart derivatives map to the unit vectors.
        let t = torus();
        let eps = 1e-5;
        let diff = |a0: f64, b0: f64, a1: f64, b1: f64| {
            let gp = FlatMetric::teichmuller_chart(&t, a1, b1).unwrap();
            let gm = FlatMetric::teichmuller_chart(&t, a0, b0).unwrap();
            SymTensorField::from_metric(t, &gp)
                .add(&SymTensorField::from_metric(t, &gm).scale(-1.0))
                .scale(0.5 / eps)
        };
        let b = t.b();
        let da = teichmuller_differential(&diff(-eps, b, eps, b));
        let db = teichmuller_differential(&diff(0.0, b - eps, 0.0, b + eps));
        assert!((da[0] - 1.0).abs() < 1e-9 && da[1].abs() < 1e-9);
        assert!(db[0].abs() < 1e-9 && (db[1] - 1.0).abs() < 1e-9);
        let sr = t.s() / t.r();
        let q = teichmuller_differential(&SymTensorField::q2(t));
        assert!((q[1] - sr).abs() < 1e-14 && q[0] == 0.0);
    }
}
