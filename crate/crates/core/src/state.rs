//! Quantum states on n qubits: validated density matrices, single-qubit
//! Bloch vectors, the non-interacting Hamiltonian and a few named states.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamming::hd;
use crate::linalg::{herm_eigen, ComplexMatrix, C64, ZERO};

/// Default validation tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotQubitDimension(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Hermitian, positive semidefinite, unit-trace matrix of dimension 2ⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, tol: f64) -> Result<Self> {
        let n_qubits = qubits_for_dim(mat.dim())?;
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let eig = herm_eigen(&mat, tol)?;
        if eig.min_value() < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: eig.min_value(),
            });
        }
        let trace = mat.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::BadTrace {
                trace: trace.re,
                expected: 1.0,
            });
        }
        Ok(DensityMatrix { n_qubits, mat })
    }

    /// Skips validation. Callers guarantee physicality (e.g. outputs of
    /// CPTP maps applied to valid states).
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        let n_qubits = qubits_for_dim(mat.dim()).expect("qubit dimension");
        DensityMatrix { n_qubits, mat }
    }

    /// |ψ⟩⟨ψ| for a normalized amplitude vector.
    pub fn pure(amplitudes: &[C64], tol: f64) -> Result<Self> {
        qubits_for_dim(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol {
            return Err(Error::Unnormalized { norm });
        }
        Ok(Self::from_trusted(ComplexMatrix::outer(
            amplitudes, amplitudes,
        )))
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64], tol: f64) -> Result<Self> {
        let d: Vec<C64> = populations.iter().map(|&p| C64::new(p, 0.0)).collect();
        Self::new(ComplexMatrix::diagonal(&d), tol)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1usize << n;
        Self::from_trusted(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    /// Convex combination Σ wᵢ ρᵢ. Weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("mixture of zero states".into()))?;
        let dim = first.1.dim();
        let mut acc = ComplexMatrix::zeros(dim);
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {w}")));
            }
            total += w;
            acc = &acc + &rho.mat.scale_real(*w);
        }
        if (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        Ok(Self::from_trusted(acc))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_trusted(self.mat.kron(&other.mat))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    pub fn entry(&self, x: usize, y: usize) -> C64 {
        self.mat[(x, y)]
    }

    /// tr(ρ²)
    pub fn purity(&self) -> f64 {
        self.mat.inner(&self.mat).re
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64, tol: f64) -> Result<Self> {
        let b = BlochVector { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = b.norm();
        if norm > 1.0 + tol {
            return Err(Error::OutsideBlochBall { norm });
        }
        Ok(b)
    }

    /// (r cos φ, r sin φ, z)
    pub fn from_cylindrical(r: f64, phi: f64, z: f64, tol: f64) -> Result<Self> {
        if r < 0.0 {
            return Err(Error::InvalidArgument(format!("negative radius {r}")));
        }
        Self::new(r * phi.cos(), r * phi.sin(), z, tol)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Transverse radius √(x² + y²).
    pub fn r(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn phi(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

/// ½[[1+z, r e^{−iφ}], [r e^{iφ}, 1−z]]
pub fn density_from_bloch(b: &BlochVector) -> DensityMatrix {
    let off = C64::new(b.x, -b.y) * 0.5;
    let mat = ComplexMatrix::from_rows(vec![
        vec![C64::new((1.0 + b.z) / 2.0, 0.0), off],
        vec![off.conj(), C64::new((1.0 - b.z) / 2.0, 0.0)],
    ])
    .expect("2x2");
    DensityMatrix::from_trusted(mat)
}

pub fn bloch_from_density(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.n_qubits() != 1 {
        return Err(Error::WrongQubitCount {
            expected: 1,
            found: rho.n_qubits(),
        });
    }
    let off = rho.entry(0, 1) * 2.0;
    Ok(BlochVector {
        x: off.re,
        y: -off.im,
        z: (rho.entry(0, 0) - rho.entry(1, 1)).re,
    })
}

/// ρ^(h): the entries of ρ at index pairs with Hamming distance h.
pub fn hamming_mode(rho: &DensityMatrix, h: usize) -> Result<ComplexMatrix> {
    let n = rho.n_qubits();
    if h > n {
        return Err(Error::OutOfRange {
            what: "Hamming mode",
            value: h as i64,
            range: format!("[0, {n}]"),
        });
    }
    Ok(rho
        .mat()
        .map(|x, y, v| if hd(x, y) as usize == h { v } else { ZERO }))
}

/// (1/√2ⁿ) Σ e^{−iη_x}|x⟩
pub fn uniform_superposition(n: usize, phases: &[f64]) -> Result<DensityMatrix> {
    let d = 1usize << n;
    if phases.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: phases.len(),
        });
    }
    let amp = 1.0 / (d as f64).sqrt();
    let psi: Vec<C64> = phases
        .iter()
        .map(|&eta| C64::from_polar(amp, -eta))
        .collect();
    Ok(DensityMatrix::from_trusted(ComplexMatrix::outer(
        &psi, &psi,
    )))
}

/// Σ_{i≠j} |ρ_ij|
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    l1_offdiag(rho.mat())
}

pub(crate) fn l1_offdiag(m: &ComplexMatrix) -> f64 {
    let d = m.dim();
    (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| m[(i, j)].norm())
        .sum()
}

/// H = Σ_i popcount(i)·ε |i⟩⟨i| for n non-interacting qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    n_qubits: usize,
    epsilon: f64,
    mat: ComplexMatrix,
}

impl Hamiltonian {
    pub fn new(n_qubits: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "energy unit must be positive, got {epsilon}"
            )));
        }
        let d = 1usize << n_qubits;
        let diag: Vec<C64> = (0..d)
            .map(|i| C64::new(i.count_ones() as f64 * epsilon, 0.0))
            .collect();
        Ok(Hamiltonian {
            n_qubits,
            epsilon,
            mat: ComplexMatrix::diagonal(&diag),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn energy(&self, i: usize) -> f64 {
        self.mat[(i, i)].re
    }

    /// e^{−iHt} ρ e^{iHt}
    pub fn evolve(&self, rho: &DensityMatrix, t: f64) -> DensityMatrix {
        let m = rho
            .mat()
            .map(|x, y, v| v * C64::from_polar(1.0, -(self.energy(x) - self.energy(y)) * t));
        DensityMatrix::from_trusted(m)
    }
}

/// Normalized (|a⟩ + |b⟩)/√2 on n qubits.
pub fn two_term_state(n: usize, a: usize, b: usize) -> DensityMatrix {
    let mut psi = vec![ZERO; 1 << n];
    psi[a] += C64::new(FRAC_1_SQRT_2, 0.0);
    psi[b] += C64::new(FRAC_1_SQRT_2, 0.0);
    DensityMatrix::pure(&psi, 1e-12).expect("normalized")
}
