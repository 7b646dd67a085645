//! Classical and quantum Fisher information.
//!
//! The QFI is evaluated through the spectral form of the SLD formula,
//! `F = 2 Σ |⟨ψᵢ|∂ρ|ψ_k⟩|² / (pᵢ + p_k)`, summing only pairs with
//! `pᵢ + p_k` above a cutoff. A second, independent estimate comes from the
//! Uhlmann fidelity between neighbouring family members.

use crate::channels::{pd_apply, pd_derivative};
use crate::error::{Error, Result};
use crate::linalg::{herm_eigen, ComplexMatrix, C64, ONE, ZERO};
use crate::state::{DensityMatrix, Hamiltonian};

/// Pairs with pᵢ + p_k at or below this are dropped from the QFI sum.
pub const QFI_CUTOFF: f64 = 1e-12;

/// Default half-step of the fidelity oracle. Smaller steps lose more to
/// cancellation in 1 − Fid than they gain in truncation error once the
/// QFI drops below ~10⁻³.
pub const ORACLE_STEP: f64 = 1e-3;

// Eigenvalues of ρ kept when restricting to its support in the oracle.
const SUPPORT_CUTOFF: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let d = elements
            .first()
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?
            .dim();
        let mut sum = ComplexMatrix::zeros(d);
        for (k, m) in elements.iter().enumerate() {
            if m.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: m.dim(),
                });
            }
            let eig =
                herm_eigen(m, tol).map_err(|e| Error::InvalidPovm(format!("element {k}: {e}")))?;
            if eig.min_value() < -tol {
                return Err(Error::InvalidPovm(format!(
                    "element {k} has eigenvalue {:e}",
                    eig.min_value()
                )));
            }
            sum = &sum + m;
        }
        let defect = (&sum - &ComplexMatrix::identity(d)).max_abs();
        if defect > tol {
            return Err(Error::InvalidPovm(format!(
                "elements sum to I only within {defect:e}"
            )));
        }
        Ok(Povm { elements })
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// p(x) = tr(ρ M_x)
    pub fn probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.elements.iter().map(|m| m.inner(rho).re).collect()
    }
}

/// ρ(θ) together with ∂ρ(θ).
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoint {
    state: DensityMatrix,
    derivative: ComplexMatrix,
}

impl ParamPoint {
    pub fn new(state: DensityMatrix, derivative: ComplexMatrix, tol: f64) -> Result<Self> {
        if derivative.dim() != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: state.dim(),
                found: derivative.dim(),
            });
        }
        let deviation = derivative.hermiticity_defect();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = derivative.trace().norm();
        if tr > tol {
            return Err(Error::InvalidArgument(format!(
                "derivative has trace {tr:e}, expected 0"
            )));
        }
        Ok(ParamPoint { state, derivative })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn derivative(&self) -> &ComplexMatrix {
        &self.derivative
    }
}

/// Point of the PD family at strength θ.
pub fn dephasing_point(rho: &DensityMatrix, theta: f64) -> Result<ParamPoint> {
    Ok(ParamPoint {
        state: pd_apply(theta, rho)?,
        derivative: pd_derivative(theta, rho)?,
    })
}

/// Point of the phase family e^{−iHt}ρe^{iHt} at t = 0, ∂ρ = −i[H, ρ].
pub fn phase_point(rho: &DensityMatrix, h: &Hamiltonian) -> Result<ParamPoint> {
    if rho.dim() != h.mat().dim() {
        return Err(Error::DimensionMismatch {
            expected: h.mat().dim(),
            found: rho.dim(),
        });
    }
    let comm = &(h.mat() * rho.mat()) - &(rho.mat() * h.mat());
    Ok(ParamPoint {
        state: rho.clone(),
        derivative: comm.scale(C64::new(0.0, -1.0)),
    })
}

pub fn qfi(point: &ParamPoint, cutoff: f64) -> f64 {
    let eig = herm_eigen(point.state.mat(), f64::INFINITY).expect("validated state");
    let v = &eig.vectors;
    let d_eig = &(&v.adjoint() * &point.derivative) * v;
    let p = &eig.values;
    let mut total = 0.0;
    for i in 0..p.len() {
        for k in 0..p.len() {
            let s = p[i] + p[k];
            if s > cutoff {
                total += d_eig[(i, k)].norm_sqr() / s;
            }
        }
    }
    2.0 * total
}

/// QFI of the PD family at θ > 0.
pub fn dephasing_qfi(rho: &DensityMatrix, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "dephasing QFI needs θ > 0, got {theta}"
        )));
    }
    Ok(qfi(&dephasing_point(rho, theta)?, QFI_CUTOFF))
}

/// Σ_x (∂p_x)² / p_x with p_x = tr(ρM_x).
pub fn classical_fi(povm: &Povm, point: &ParamPoint, tol: f64) -> Result<f64> {
    if povm.dim() != point.state.dim() {
        return Err(Error::DimensionMismatch {
            expected: point.state.dim(),
            found: povm.dim(),
        });
    }
    let p = povm.probabilities(point.state.mat());
    let dp = povm.probabilities(&point.derivative);
    let mut total = 0.0;
    for (outcome, (&px, &dpx)) in p.iter().zip(&dp).enumerate() {
        if px <= tol {
            if dpx.abs() <= tol {
                continue;
            }
            return Err(Error::SingularProbability { outcome });
        }
        total += dpx * dpx / px;
    }
    Ok(total)
}

/// Three-outcome POVM resolving the coherence between |x⟩ and |y⟩.
pub fn witness_povm(x: usize, y: usize, beta: f64, n: usize) -> Result<Povm> {
    let d = 1usize << n;
    for v in [x, y] {
        if v >= d {
            return Err(Error::OutOfRange {
                what: "basis index",
                value: v as i64,
                range: format!("[0, {d})"),
            });
        }
    }
    if x == y {
        return Err(Error::InvalidArgument("witness POVM needs x ≠ y".into()));
    }
    let ph = C64::from_polar(0.5, -beta);
    let build = |sign: f64| {
        let mut m = ComplexMatrix::zeros(d);
        m[(x, x)] = C64::new(0.5, 0.0);
        m[(y, y)] = C64::new(0.5, 0.0);
        m[(x, y)] = ph * sign;
        m[(y, x)] = ph.conj() * sign;
        m
    };
    let mut rest = ComplexMatrix::identity(d);
    rest[(x, x)] = ZERO;
    rest[(y, y)] = ZERO;
    Ok(Povm {
        elements: vec![build(1.0), build(-1.0), rest],
    })
}

/// β with ρ_xy = |ρ_xy| e^{−iβ}; zero when ρ_xy vanishes.
pub fn witness_phase(rho: &DensityMatrix, x: usize, y: usize) -> f64 {
    let v = rho.entry(x, y);
    if v == ZERO {
        0.0
    } else {
        -v.arg()
    }
}

/// 2 Σ (pᵢ − p_k)² / (pᵢ + p_k) |⟨ψᵢ|H|ψ_k⟩|²
pub fn pe_qfi(rho: &DensityMatrix, h: &Hamiltonian) -> Result<f64> {
    if rho.dim() != h.mat().dim() {
        return Err(Error::DimensionMismatch {
            expected: h.mat().dim(),
            found: rho.dim(),
        });
    }
    let eig = herm_eigen(rho.mat(), f64::INFINITY)?;
    let v = &eig.vectors;
    let h_eig = &(&v.adjoint() * h.mat()) * v;
    let p = &eig.values;
    let mut total = 0.0;
    for i in 0..p.len() {
        for k in 0..p.len() {
            let s = p[i] + p[k];
            if s > QFI_CUTOFF {
                let diff = p[i] - p[k];
                total += diff * diff / s * h_eig[(i, k)].norm_sqr();
            }
        }
    }
    Ok(2.0 * total)
}

/// Root fidelity tr√(√ρ σ √ρ), evaluated on the support of ρ.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let eig = herm_eigen(rho.mat(), f64::INFINITY)?;
    let support: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] > SUPPORT_CUTOFF)
        .collect();
    let vecs: Vec<Vec<C64>> = support.iter().map(|&k| eig.vector(k)).collect();
    let sv: Vec<Vec<C64>> = vecs.iter().map(|v| sigma.mat().mul_vec(v)).collect();
    let m = ComplexMatrix::from_fn(support.len(), |a, b| {
        let inner: C64 = vecs[a].iter().zip(&sv[b]).map(|(u, w)| u.conj() * w).sum();
        inner * (eig.values[support[a]] * eig.values[support[b]]).sqrt()
    });
    let inner = herm_eigen(&m, f64::INFINITY)?;
    Ok(inner.values.iter().map(|&l| l.max(0.0).sqrt()).sum())
}

/// QFI ≈ 8(1 − Fid(ρ_{θ−dθ}, ρ_{θ+dθ})) / (2dθ)².
pub fn qfi_fidelity_oracle<F>(family: F, theta: f64, dtheta: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    if dtheta.is_nan() || dtheta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {dtheta}"
        )));
    }
    let a = family(theta - dtheta)?;
    let b = family(theta + dtheta)?;
    let fid = uhlmann_fidelity(&a, &b)?.min(1.0);
    Ok(8.0 * (1.0 - fid) / (4.0 * dtheta * dtheta))
}

/// The trivial single-outcome measurement.
pub fn trivial_povm(n: usize) -> Povm {
    Povm {
        elements: vec![ComplexMatrix::identity(1 << n)],
    }
}

/// Rank-one projective measurement in the computational basis.
pub fn computational_povm(n: usize) -> Povm {
    let d = 1usize << n;
    Povm {
        elements: (0..d)
            .map(|i| {
                let mut m = ComplexMatrix::zeros(d);
                m[(i, i)] = ONE;
                m
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{density_from_bloch, two_term_state, BlochVector};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn zero_derivative_gives_zero() {
        let rho = two_term_state(1, 0, 1);
        let p = ParamPoint::new(rho, ComplexMatrix::zeros(2), 1e-12).unwrap();
        assert_eq!(qfi(&p, QFI_CUTOFF), 0.0);
    }

    #[test]
    fn psi1_psi2_closed_forms() {
        for theta in [0.2f64, 0.5, 1.0] {
            let e2: f64 = (-2.0 * theta).exp();
            let e4: f64 = (-4.0 * theta).exp();
            let f1 = dephasing_qfi(&two_term_state(1, 0, 1), theta).unwrap();
            let f2 = dephasing_qfi(&two_term_state(2, 0, 3), theta).unwrap();
            assert!(rel(f1, e2 / (1.0 - e2)) < 1e-10);
            assert!(rel(f2, 4.0 * e4 / (1.0 - e4)) < 1e-10);
        }
        assert!(dephasing_qfi(&two_term_state(1, 0, 1), 0.0).is_err());
    }

    #[test]
    fn bloch_closed_form() {
        let (r, z, theta): (f64, f64, f64) = (0.6, 0.6, 0.5);
        let rho = density_from_bloch(&BlochVector::new(r, 0.0, z, 1e-9).unwrap());
        let e = (-2.0 * theta).exp();
        let want = r * r * e * (1.0 - z * z) / (1.0 - z * z - r * r * e);
        assert!(rel(dephasing_qfi(&rho, theta).unwrap(), want) < 1e-10);
    }

    #[test]
    fn diagonal_state_is_free() {
        let rho = DensityMatrix::diagonal(&[0.1, 0.2, 0.3, 0.4], 1e-9).unwrap();
        assert!(dephasing_qfi(&rho, 0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn witness_probabilities() {
        let povm = witness_povm(0, 1, 0.0, 1).unwrap();
        let theta = 0.5f64;
        let p = povm.probabilities(pd_apply(theta, &two_term_state(1, 0, 1)).unwrap().mat());
        assert!((p[0] - (1.0 + (-theta).exp()) / 2.0).abs() < 1e-15);
        assert!(witness_povm(1, 1, 0.0, 1).is_err());
        let sum = povm
            .elements()
            .iter()
            .fold(ComplexMatrix::zeros(2), |a, m| &a + m);
        assert!((&sum - &ComplexMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn single_outcome_fi_is_zero() {
        let point = dephasing_point(&two_term_state(1, 0, 1), 0.3).unwrap();
        assert_eq!(classical_fi(&trivial_povm(1), &point, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn pe_qfi_examples() {
        let eps = 0.7;
        let h1 = Hamiltonian::new(1, eps).unwrap();
        let b = BlochVector::from_cylindrical(0.5, 1.1, 0.4, 1e-9).unwrap();
        let v = pe_qfi(&density_from_bloch(&b), &h1).unwrap();
        assert!(rel(v, 0.25 * eps * eps) < 1e-10);
        let h2 = Hamiltonian::new(2, eps).unwrap();
        assert!(pe_qfi(&two_term_state(2, 1, 2), &h2).unwrap().abs() < 1e-14);
    }

    #[test]
    fn fidelity_oracle_on_pd_family() {
        let rho = density_from_bloch(&BlochVector::new(0.6, 0.0, 0.6, 1e-9).unwrap());
        let oracle = qfi_fidelity_oracle(|t| pd_apply(t, &rho), 0.5, ORACLE_STEP).unwrap();
        let exact = dephasing_qfi(&rho, 0.5).unwrap();
        assert!(rel(oracle, exact) < 1e-4, "{oracle} vs {exact}");
        let constant = qfi_fidelity_oracle(|_| Ok(rho.clone()), 0.5, ORACLE_STEP).unwrap();
        assert!(constant.abs() < 1e-6);
    }
}
