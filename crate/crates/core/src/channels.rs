//! CPTP maps as explicit Kraus lists, their Choi matrices, the phase-damping
//! (PD) and completely-dephasing channels, and the library of named channels.
//!
//! Choi layout: block (x, y) of `J` is `E(|x⟩⟨y|)`, so
//! `J[x·d + i, y·d + j] = ⟨i|E(|x⟩⟨y|)|j⟩`. Vectorized Kraus operators use
//! the matching column-stacked index `x·d + i ↔ K[i, x]`, so that
//! `J = Σ_l |K_l⟩⟩⟨⟨K_l|`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;

use crate::error::{Error, Result};
use crate::hamming::hd;
use crate::linalg::{herm_eigen, ComplexMatrix, C64, ONE, ZERO};
use crate::state::{qubits_for_dim, DensityMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    n_qubits: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Structural checks only (non-empty, equal qubit dimensions, finite).
    /// Use [`KrausChannel::validate_cptp`] or [`KrausChannel::checked`] for
    /// physicality.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let d = first.dim();
        let n_qubits = qubits_for_dim(d)?;
        for k in &kraus {
            if k.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: k.dim(),
                });
            }
            if !k.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(KrausChannel { n_qubits, kraus })
    }

    /// Like [`KrausChannel::new`] but also requires trace preservation.
    pub fn checked(kraus: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let ch = Self::new(kraus)?;
        let deviation = ch.trace_defect();
        if deviation > tol {
            return Err(Error::NotTracePreserving { deviation });
        }
        if !ch.choi().is_psd(tol) {
            return Err(Error::NotPositive {
                min_eigenvalue: ch.choi().min_eigenvalue(),
            });
        }
        Ok(ch)
    }

    pub fn identity(n: usize) -> Self {
        KrausChannel {
            n_qubits: n,
            kraus: vec![ComplexMatrix::identity(1 << n)],
        }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn into_kraus(self) -> Vec<ComplexMatrix> {
        self.kraus
    }

    /// max |Σ K†K − I|
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim();
        let sum = self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(d), |acc, k| &acc + &(&k.adjoint() * k));
        (&sum - &ComplexMatrix::identity(d)).max_abs()
    }

    /// Trace preserving and completely positive within `tol`.
    pub fn validate_cptp(&self, tol: f64) -> bool {
        self.trace_defect() <= tol && self.choi().is_psd(tol)
    }

    /// Σ_l K_l M K_l† for an arbitrary operator M.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(m.dim(), self.dim(), "operator dimension mismatch");
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim()), |acc, k| {
                &acc + &k.sandwich(m)
            })
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(DensityMatrix::from_trusted(self.apply_matrix(rho.mat())))
    }

    pub fn choi(&self) -> ChoiMatrix {
        let d = self.dim();
        let mut mat = ComplexMatrix::zeros(d * d);
        for k in &self.kraus {
            let v = vectorize(k);
            for (r, a) in v.iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                for (c, b) in v.iter().enumerate() {
                    mat[(r, c)] += a * b.conj();
                }
            }
        }
        ChoiMatrix {
            n_qubits: self.n_qubits,
            mat,
        }
    }

    /// Kraus list {A_i B_j}: first `b`, then `a`.
    pub fn compose(a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
        if a.n_qubits != b.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        let kraus = a
            .kraus
            .iter()
            .flat_map(|ka| b.kraus.iter().map(move |kb| ka * kb))
            .filter(|k| k.max_abs() > 0.0)
            .collect::<Vec<_>>();
        if kraus.is_empty() {
            return Ok(KrausChannel {
                n_qubits: a.n_qubits,
                kraus: vec![ComplexMatrix::zeros(a.dim())],
            });
        }
        KrausChannel::new(kraus)
    }

    /// Kraus list of Σ pᵢ Eᵢ, weights non-negative.
    pub fn convex_mixture(parts: &[(f64, &KrausChannel)]) -> Result<KrausChannel> {
        let n = parts.first().ok_or(Error::EmptyKraus)?.1.n_qubits;
        let mut kraus = Vec::new();
        for (p, ch) in parts {
            if ch.n_qubits != n {
                return Err(Error::DimensionMismatch {
                    expected: 1 << n,
                    found: ch.dim(),
                });
            }
            if *p < 0.0 {
                return Err(Error::InvalidArgument(format!("negative weight {p}")));
            }
            if *p == 0.0 {
                continue;
            }
            let s = p.sqrt();
            kraus.extend(ch.kraus.iter().map(|k| k.scale_real(s)));
        }
        KrausChannel::new(kraus)
    }

    /// E ⊗ F on n_E + n_F qubits (E acts on the high-order bits).
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kron(b)))
            .collect();
        KrausChannel {
            n_qubits: self.n_qubits + other.n_qubits,
            kraus,
        }
    }

    /// Canonical Kraus operators from the Choi eigendecomposition,
    /// eigenvalues ≤ `cutoff` discarded. Independent of the stored list.
    pub fn canonical(&self, cutoff: f64) -> KrausChannel {
        let kraus = self.choi().canonical_kraus(cutoff);
        if kraus.is_empty() {
            return self.clone();
        }
        KrausChannel {
            n_qubits: self.n_qubits,
            kraus,
        }
    }
}

/// Column-stacked vectorization: index x·d + i holds K[i, x].
pub fn vectorize(k: &ComplexMatrix) -> Vec<C64> {
    let d = k.dim();
    let mut v = Vec::with_capacity(d * d);
    for x in 0..d {
        for i in 0..d {
            v.push(k[(i, x)]);
        }
    }
    v
}

pub fn unvectorize(v: &[C64], d: usize) -> ComplexMatrix {
    assert_eq!(v.len(), d * d);
    ComplexMatrix::from_fn(d, |i, x| v[x * d + i])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    n_qubits: usize,
    mat: ComplexMatrix,
}

impl ChoiMatrix {
    /// Wraps a raw 4ⁿ×4ⁿ matrix laid out as described in the module docs.
    pub fn from_matrix(mat: ComplexMatrix) -> Result<Self> {
        let dd = mat.dim();
        let d = (dd as f64).sqrt().round() as usize;
        if d * d != dd {
            return Err(Error::InvalidArgument(format!(
                "Choi dimension {dd} is not a square"
            )));
        }
        Ok(ChoiMatrix {
            n_qubits: qubits_for_dim(d)?,
            mat,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// ⟨i|E(|x⟩⟨y|)|j⟩
    pub fn entry(&self, i: usize, j: usize, x: usize, y: usize) -> C64 {
        let d = self.dim();
        self.mat[(x * d + i, y * d + j)]
    }

    /// E(|x⟩⟨y|)
    pub fn block(&self, x: usize, y: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), |i, j| self.entry(i, j, x, y))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        herm_eigen(&self.mat, f64::INFINITY)
            .map(|e| e.min_value())
            .unwrap_or(f64::NAN)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.mat.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    /// max |tr E(|x⟩⟨y|) − δ_xy|
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for x in 0..d {
            for y in 0..d {
                let t: C64 = (0..d).map(|i| self.entry(i, i, x, y)).sum();
                let want = if x == y { ONE } else { ZERO };
                worst = worst.max((t - want).norm());
            }
        }
        worst
    }

    pub fn distance(&self, other: &ChoiMatrix) -> f64 {
        (&self.mat - &other.mat).frobenius_norm()
    }

    /// Kraus operators √λ_k·unvec(v_k) for Choi eigenpairs with λ_k > cutoff.
    pub fn canonical_kraus(&self, cutoff: f64) -> Vec<ComplexMatrix> {
        let d = self.dim();
        let eig = herm_eigen(&self.mat, f64::INFINITY).expect("finite Choi matrix");
        eig.values
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &lam)| lam > cutoff)
            .map(|(k, &lam)| {
                let v: Vec<C64> = eig.vector(k).iter().map(|z| z * lam.sqrt()).collect();
                unvectorize(&v, d)
            })
            .collect()
    }

    /// Orthonormal basis of the Kraus span, i.e. the Choi support.
    pub fn support_basis(&self, cutoff: f64) -> Vec<Vec<C64>> {
        let eig = herm_eigen(&self.mat, f64::INFINITY).expect("finite Choi matrix");
        eig.values
            .iter()
            .enumerate()
            .filter(|(_, &lam)| lam > cutoff)
            .map(|(k, _)| eig.vector(k))
            .collect()
    }
}

/// ‖J_a − J_b‖_F ≤ tol
pub fn channels_equal(a: &KrausChannel, b: &KrausChannel, tol: f64) -> bool {
    a.n_qubits == b.n_qubits && a.choi().distance(&b.choi()) <= tol
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "dephasing strength must be finite and non-negative, got {theta}"
        )));
    }
    Ok(())
}

/// ρ_xy ↦ e^{−h(x,y)θ} ρ_xy
pub fn pd_apply(theta: f64, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_theta(theta)?;
    let m = rho
        .mat()
        .map(|x, y, v| v * (-(hd(x, y) as f64) * theta).exp());
    Ok(DensityMatrix::from_trusted(m))
}

/// ∂/∂θ of [`pd_apply`]: ρ_xy ↦ −h(x,y)e^{−h(x,y)θ} ρ_xy.
pub fn pd_derivative(theta: f64, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    check_theta(theta)?;
    Ok(rho.mat().map(|x, y, v| {
        let h = hd(x, y) as f64;
        v * (-h * (-h * theta).exp())
    }))
}

/// n-qubit PD channel as a tensor power of the single-qubit Kraus pair
/// {diag(1, e^{−θ}), diag(0, √(1 − e^{−2θ}))}. All Kraus operators are diagonal.
pub fn pd_channel(n: usize, theta: f64) -> Result<KrausChannel> {
    check_theta(theta)?;
    let lam = (-theta).exp();
    let k0 = ComplexMatrix::diagonal(&[ONE, C64::new(lam, 0.0)]);
    let k1 = ComplexMatrix::diagonal(&[ZERO, C64::new((1.0 - lam * lam).max(0.0).sqrt(), 0.0)]);
    let single = KrausChannel {
        n_qubits: 1,
        kraus: if theta == 0.0 { vec![k0] } else { vec![k0, k1] },
    };
    let mut ch = KrausChannel::identity(0);
    for _ in 0..n {
        ch = ch.tensor(&single);
    }
    Ok(ch)
}

/// Completely dephasing channel Δ with projector Kraus operators.
pub fn cd_channel(n: usize) -> KrausChannel {
    let d = 1usize << n;
    KrausChannel {
        n_qubits: n,
        kraus: (0..d).map(|i| ComplexMatrix::unit(d, i, i)).collect(),
    }
}

/// Channels appearing as worked examples and counterexamples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NamedChannel {
    /// HDP but neither SIO nor SHP (n ≥ 2).
    W,
    /// SIO ∩ HDP but not SHP (n ≥ 3).
    R,
    /// DIO but neither SIO nor HDP (n ≥ 2).
    N,
    /// Single-qubit, not HDP, yet never increases the dephasing QFI.
    Z,
    /// Exchange of |2⟩ and |3⟩: SIO but not HDP (n ≥ 2).
    USio,
    /// Two-qubit HDP unitary flipping the low bit.
    VSwap,
    /// diag(1, e^{−iφ}).
    UPhase(f64),
}

impl NamedChannel {
    pub fn name(&self) -> &'static str {
        match self {
            NamedChannel::W => "W",
            NamedChannel::R => "R",
            NamedChannel::N => "N",
            NamedChannel::Z => "Z",
            NamedChannel::USio => "U_sio",
            NamedChannel::VSwap => "V_swap",
            NamedChannel::UPhase(_) => "U_phase",
        }
    }

    pub fn parse(name: &str, phi: f64) -> Result<Self> {
        Ok(match name {
            "W" | "w" => NamedChannel::W,
            "R" | "r" => NamedChannel::R,
            "N" | "n" => NamedChannel::N,
            "Z" | "z" => NamedChannel::Z,
            "U_sio" | "u_sio" | "usio" => NamedChannel::USio,
            "V" | "V_swap" | "v_swap" | "v" => NamedChannel::VSwap,
            "U_phase" | "u_phase" | "uphase" => NamedChannel::UPhase(phi),
            other => return Err(Error::InvalidArgument(format!("unknown channel {other}"))),
        })
    }

    /// Smallest (and for fixed-size channels, only) supported qubit count.
    pub fn default_qubits(&self) -> usize {
        match self {
            NamedChannel::W | NamedChannel::N | NamedChannel::USio | NamedChannel::VSwap => 2,
            NamedChannel::R => 3,
            NamedChannel::Z | NamedChannel::UPhase(_) => 1,
        }
    }

    fn supports(&self, n: usize) -> bool {
        match self {
            NamedChannel::W | NamedChannel::N | NamedChannel::USio => n >= 2,
            NamedChannel::R => n >= 3,
            NamedChannel::VSwap => n == 2,
            NamedChannel::Z | NamedChannel::UPhase(_) => n == 1,
        }
    }
}

impl fmt::Display for NamedChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sparse builder: Σ c |row⟩⟨col|.
fn sparse(d: usize, terms: &[(f64, usize, usize)]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d);
    for &(c, row, col) in terms {
        m[(row, col)] += C64::new(c, 0.0);
    }
    m
}

/// I − Σ_{k∈ks} |k⟩⟨k|
fn identity_without(d: usize, ks: &[usize]) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(d);
    for &k in ks {
        m[(k, k)] = ZERO;
    }
    m
}

pub fn named_channel(name: NamedChannel, n: usize) -> Result<KrausChannel> {
    if !name.supports(n) {
        return Err(Error::UnsupportedQubits {
            name: name.name().to_string(),
            n,
        });
    }
    let d = 1usize << n;
    let half = 0.5;
    let q = 1.0 / (2.0 * SQRT_2); // 1/(2√2)
    let s3 = 3f64.sqrt();
    let t = 1.0 / (2.0 * s3); // 1/(2√3)
    let s6 = 6f64.sqrt();
    let kraus = match name {
        NamedChannel::W => vec![
            sparse(d, &[(half, 0, 1), (q, 1, 0), (q, 2, 0)]),
            sparse(d, &[(half, 1, 1), (q, 0, 0), (q, 3, 0)]),
            sparse(d, &[(half, 2, 1), (q, 0, 0), (-q, 3, 0)]),
            sparse(d, &[(half, 3, 1), (q, 1, 0), (-q, 2, 0)]),
            identity_without(d, &[0, 1]),
        ],
        NamedChannel::R => vec![
            sparse(d, &[(FRAC_1_SQRT_2, 0, 0), (half, 2, 1), (half, 3, 6)]),
            sparse(d, &[(FRAC_1_SQRT_2, 6, 0), (half, 2, 1), (-half, 3, 6)]),
            sparse(d, &[(half, 1, 1), (half, 6, 6), (FRAC_1_SQRT_2, 7, 7)]),
            sparse(d, &[(half, 4, 1), (-half, 3, 6), (FRAC_1_SQRT_2, 7, 7)]),
            identity_without(d, &[0, 1, 6, 7]),
        ],
        NamedChannel::N => vec![
            sparse(d, &[(half, 0, 1), (t, 1, 0), (-t, 2, 0), (t, 3, 0)]),
            sparse(
                d,
                &[
                    (t, 0, 0),
                    (FRAC_1_SQRT_2, 0, 2),
                    (1.0 / s6, 0, 3),
                    (half, 1, 1),
                    (t, 2, 0),
                    (t, 3, 0),
                ],
            ),
            sparse(
                d,
                &[
                    (t, 0, 0),
                    (-FRAC_1_SQRT_2, 0, 2),
                    (1.0 / s6, 0, 3),
                    (t, 1, 0),
                    (half, 2, 1),
                    (-t, 3, 0),
                ],
            ),
            sparse(
                d,
                &[
                    (t, 0, 0),
                    (-s6 / 3.0, 0, 3),
                    (-t, 1, 0),
                    (-t, 2, 0),
                    (half, 3, 1),
                ],
            ),
            identity_without(d, &[0, 1, 2, 3]),
        ],
        NamedChannel::Z => vec![
            sparse(2, &[(half, 0, 0), (half, 1, 1)]),
            sparse(2, &[(half, 0, 1), (half, 1, 0)]),
            sparse(2, &[(half, 0, 0), (half, 0, 1)]),
            sparse(2, &[(half, 1, 0), (-half, 1, 1)]),
        ],
        NamedChannel::USio => {
            let mut u = identity_without(d, &[2, 3]);
            u[(2, 3)] = ONE;
            u[(3, 2)] = ONE;
            vec![u]
        }
        NamedChannel::VSwap => vec![sparse(
            4,
            &[(1.0, 0, 1), (1.0, 1, 0), (1.0, 2, 3), (1.0, 3, 2)],
        )],
        NamedChannel::UPhase(phi) => {
            vec![ComplexMatrix::diagonal(&[ONE, C64::from_polar(1.0, -phi)])]
        }
    };
    // identity_without(…) vanishes when the named block fills the space
    KrausChannel::new(kraus.into_iter().filter(|k| k.max_abs() > 0.0).collect())
}
