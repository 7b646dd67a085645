//! State transformations under HDP and SHP: the single-qubit reachability
//! cone and its extreme channel, the off-diagonal bound for HDP outputs,
//! golden-state preparation, HDP unitaries, and coherence merging.

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::hamming::{enumerate_hdf, hd, HdFunction, MAX_HDF_BITS};
use crate::linalg::{herm_eigen, psd_sqrt, ComplexMatrix, C64};
use crate::random::{self, SeededRng};
use crate::state::{BlochVector, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeQuery {
    pub source: BlochVector,
    pub target: BlochVector,
}

/// Largest r′ reachable from `source` at height z′.
pub fn cone_r_max(source: &BlochVector, z_target: f64) -> f64 {
    let (r, z) = (source.r(), source.z);
    if z_target.abs() < z.abs() {
        return r;
    }
    let denom = 1.0 - z * z;
    if denom <= 0.0 {
        return 0.0;
    }
    r * ((1.0 - z_target * z_target).max(0.0) / denom).sqrt()
}

/// Whether `target` is reachable from `source` by a single-qubit HDP channel.
pub fn hdp_cone_contains(q: &ConeQuery, tol: f64) -> bool {
    q.target.r() <= cone_r_max(&q.source, q.target.z) + tol
}

/// (z′, r′_max) along the cone boundary, for plotting.
pub fn cone_boundary(source: &BlochVector, z_grid: &[f64]) -> Vec<(f64, f64)> {
    z_grid.iter().map(|&z| (z, cone_r_max(source, z))).collect()
}

/// cos and sin of half the angle whose cosine is `c`, without trigonometry.
fn half_angle(c: f64) -> (f64, f64) {
    let c = c.clamp(-1.0, 1.0);
    (((1.0 + c) / 2.0).sqrt(), ((1.0 - c) / 2.0).sqrt())
}

/// Two-Kraus HDP channel taking `source` to the boundary point of its cone
/// at the target's height and azimuth. Saturating targets are reached
/// exactly; interior targets are dominated in r.
pub fn extreme_cone_channel(q: &ConeQuery, tol: f64) -> Result<KrausChannel> {
    if !hdp_cone_contains(q, tol) {
        return Err(Error::OutsideCone);
    }
    let (z, zt) = (q.source.z, q.target.z);
    // cos 2θ₀, cos 2θ₁
    let (c0, c1) = if zt.abs() < z.abs() {
        let c = zt / z;
        (c, c)
    } else if zt == 0.0 {
        (1.0, 1.0)
    } else if (1.0 - z).abs() <= 0.0 {
        (zt, 1.0)
    } else if (1.0 + z).abs() <= 0.0 {
        (1.0, -zt)
    } else {
        (
            (z + zt * zt) / (zt * (1.0 + z)),
            (z - zt * zt) / (zt * (1.0 - z)),
        )
    };
    let (cos0, sin0) = half_angle(c0);
    let (cos1, sin1) = half_angle(c1);
    let (phi, phi_t) = (q.source.phi(), q.target.phi());
    let mut k1 = ComplexMatrix::zeros(2);
    k1[(0, 0)] = C64::new(cos0, 0.0);
    k1[(1, 1)] = C64::from_polar(cos1, phi_t - phi);
    let mut k2 = ComplexMatrix::zeros(2);
    k2[(0, 1)] = C64::from_polar(sin1, -(phi + phi_t));
    k2[(1, 0)] = C64::new(sin0, 0.0);
    KrausChannel::new(vec![k1, k2])
}

/// Conditional probabilities p[i][x] = p(i|x) must form stochastic columns.
fn check_stochastic(p: &[Vec<f64>], d: usize, tol: f64) -> Result<()> {
    if p.len() != d || p.iter().any(|row| row.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.len(),
        });
    }
    for x in 0..d {
        let sum: f64 = p.iter().map(|row| row[x]).sum();
        if (sum - 1.0).abs() > tol || p.iter().any(|row| row[x] < -tol) {
            return Err(Error::NotStochastic { column: x, sum });
        }
    }
    Ok(())
}

/// Σ′_{x,y : h(x,y) = h(i,j)} |ρ_xy| √(p(i|x) p(j|y)); for i = j this is the
/// exact output population Σ_x ρ_xx p(i|x).
pub fn hdp_offdiag_bound(
    rho: &DensityMatrix,
    i: usize,
    j: usize,
    p: &[Vec<f64>],
    tol: f64,
) -> Result<f64> {
    let d = rho.dim();
    check_stochastic(p, d, tol)?;
    if i >= d || j >= d {
        return Err(Error::OutOfRange {
            what: "basis index",
            value: i.max(j) as i64,
            range: format!("[0, {d})"),
        });
    }
    let h = hd(i, j);
    let mut total = 0.0;
    for x in 0..d {
        for y in 0..d {
            if hd(x, y) == h {
                total += rho.entry(x, y).norm() * (p[i][x].max(0.0) * p[j][y].max(0.0)).sqrt();
            }
        }
    }
    Ok(total)
}

/// p(i|x) = ⟨i|E(|x⟩⟨x|)|i⟩ read off the Choi diagonal, as p[i][x].
pub fn transition_probabilities(ch: &KrausChannel) -> Vec<Vec<f64>> {
    let choi = ch.choi();
    let d = ch.dim();
    (0..d)
        .map(|i| (0..d).map(|x| choi.entry(i, i, x, x).re).collect())
        .collect()
}

fn check_normalized(amplitudes: &[C64], tol: f64) -> Result<usize> {
    let n = crate::state::qubits_for_dim(amplitudes.len())?;
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > tol {
        return Err(Error::Unnormalized { norm });
    }
    Ok(n)
}

/// SHP channel taking the uniform superposition with phases η (amplitudes
/// e^{−iη_x}/√2ⁿ) to the pure state with the given amplitudes:
/// K_z = Σ_x a_x e^{iη_{z⊕x}} |x⟩⟨z⊕x|.
pub fn golden_transform(target: &[C64], eta: &[f64], tol: f64) -> Result<KrausChannel> {
    check_normalized(target, tol)?;
    let d = target.len();
    if eta.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: eta.len(),
        });
    }
    let kraus = (0..d)
        .map(|z| {
            let mut k = ComplexMatrix::zeros(d);
            for (x, a) in target.iter().enumerate() {
                k[(x, z ^ x)] = a * C64::from_polar(1.0, eta[z ^ x]);
            }
            k
        })
        .collect();
    KrausChannel::new(kraus)
}

/// U = Σ_x e^{−iω_x} |π(x)⟩⟨x|
pub fn hdp_unitary(pi: &HdFunction, omega: &[f64]) -> Result<KrausChannel> {
    let d = pi.table().len();
    if omega.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: omega.len(),
        });
    }
    let mut u = ComplexMatrix::zeros(d);
    for x in 0..d {
        u[(pi.apply(x), x)] = C64::from_polar(1.0, -omega[x]);
    }
    KrausChannel::unitary(u)
}

/// Coherence structure required for merging: all nonzero off-diagonal
/// entries sit at one Hamming distance `c`, and their supports are disjoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergePairing {
    pub c: u32,
    /// (x, y(x)) with x < y(x)
    pub pairs: Vec<(usize, usize)>,
}

/// `None` when the conditions fail or when ρ has no coherence at all
/// (then no distance c is singled out).
pub fn check_c1_c2(rho: &DensityMatrix, tol: f64) -> Option<MergePairing> {
    let d = rho.dim();
    let pairs: Vec<(usize, usize)> = (0..d)
        .tuple_combinations()
        .filter(|&(x, y)| rho.entry(x, y).norm() > tol)
        .collect();
    let c = hd(pairs.first()?.0, pairs.first()?.1);
    if pairs.iter().any(|&(x, y)| hd(x, y) != c) {
        return None;
    }
    let mut used = vec![false; d];
    for &(x, y) in &pairs {
        if used[x] || used[y] {
            return None;
        }
        used[x] = true;
        used[y] = true;
    }
    Some(MergePairing { c, pairs })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MergeSpec {
    pub rho: DensityMatrix,
    pub i: usize,
    pub j: usize,
    /// p(i|x) for every basis index x.
    pub p_i: Vec<f64>,
    /// p(j|x) for every basis index x.
    pub p_j: Vec<f64>,
}

impl MergeSpec {
    /// Routes x to i and y(x) to j with certainty for every pair, which
    /// maximizes the merged element.
    pub fn optimal(rho: DensityMatrix, i: usize, j: usize, tol: f64) -> Result<Self> {
        let pairing = check_c1_c2(&rho, tol)
            .ok_or_else(|| Error::MergeConditions("state has no admissible pairing".into()))?;
        let d = rho.dim();
        let mut p_i = vec![0.0; d];
        let mut p_j = vec![0.0; d];
        for (x, y) in pairing.pairs {
            p_i[x] = 1.0;
            p_j[y] = 1.0;
        }
        Ok(MergeSpec {
            rho,
            i,
            j,
            p_i,
            p_j,
        })
    }
}

/// Merging channel K₀ ∪ {K_{x,1}, K_{x,2}} with
/// K_{x,1} = √p(i|x) e^{−iφ_x}|i⟩⟨x| + √p(j|y)|j⟩⟨y|,
/// K_{x,2} = √p(j|x) e^{−iφ_x}|j⟩⟨x| + √p(i|y)|i⟩⟨y|,
/// φ_x = arg ρ_{x y(x)}, and K₀ the square root of the remaining weight.
pub fn merge_channel(spec: &MergeSpec, tol: f64) -> Result<KrausChannel> {
    let rho = &spec.rho;
    let d = rho.dim();
    let pairing = check_c1_c2(rho, tol).ok_or_else(|| {
        Error::MergeConditions("no single Hamming distance with disjoint supports".into())
    })?;
    if spec.i >= d || spec.j >= d || spec.i == spec.j {
        return Err(Error::InvalidArgument(format!(
            "target indices ({}, {}) must be distinct and below {d}",
            spec.i, spec.j
        )));
    }
    if hd(spec.i, spec.j) != pairing.c {
        return Err(Error::MergeConditions(format!(
            "h(i,j) = {} but the coherence lives at distance {}",
            hd(spec.i, spec.j),
            pairing.c
        )));
    }
    if spec.p_i.len() != d || spec.p_j.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: spec.p_i.len().min(spec.p_j.len()),
        });
    }
    for x in 0..d {
        let (a, b) = (spec.p_i[x], spec.p_j[x]);
        if a < -tol || b < -tol || a + b > 1.0 + tol {
            return Err(Error::InvalidArgument(format!(
                "branch probabilities at x = {x} are ({a}, {b})"
            )));
        }
    }
    let sq = |p: f64| C64::new(p.max(0.0).sqrt(), 0.0);
    let mut kraus = Vec::new();
    for &(x, y) in &pairing.pairs {
        let phase = C64::from_polar(1.0, -rho.entry(x, y).arg());
        for (a, b) in [(spec.i, spec.j), (spec.j, spec.i)] {
            let (pa, pb) = if a == spec.i {
                (spec.p_i[x], spec.p_j[y])
            } else {
                (spec.p_j[x], spec.p_i[y])
            };
            let mut k = ComplexMatrix::zeros(d);
            k[(a, x)] = sq(pa) * phase;
            k[(b, y)] = sq(pb);
            if k.max_abs() > 0.0 {
                kraus.push(k);
            }
        }
    }
    let used = kraus
        .iter()
        .fold(ComplexMatrix::zeros(d), |acc, k| &acc + &(&k.adjoint() * k));
    let residual = &ComplexMatrix::identity(d) - &used;
    let min_eigenvalue = herm_eigen(&residual, f64::INFINITY)?.min_value();
    if min_eigenvalue < -tol {
        return Err(Error::CompletionNotPositive { min_eigenvalue });
    }
    let k0 = psd_sqrt(&residual, f64::INFINITY)?;
    if k0.max_abs() > tol {
        kraus.push(k0);
    }
    KrausChannel::new(kraus)
}

/// Random SHP channel: L HDFs drawn with replacement and complex
/// coefficients normalized so that Σ_l |c_lx|² = 1 for every column.
pub fn random_shp(n: usize, num_kraus: usize, seed: u64) -> Result<KrausChannel> {
    random_shp_with(n, num_kraus, &mut random::rng(seed))
}

pub fn random_shp_with(n: usize, num_kraus: usize, rng: &mut SeededRng) -> Result<KrausChannel> {
    if num_kraus == 0 {
        return Err(Error::EmptyKraus);
    }
    if !(1..=MAX_HDF_BITS).contains(&n) {
        return Err(Error::OutOfRange {
            what: "n",
            value: n as i64,
            range: format!("[1, {MAX_HDF_BITS}]"),
        });
    }
    let hdfs = enumerate_hdf(n)?;
    let d = 1usize << n;
    let picks: Vec<&HdFunction> = (0..num_kraus)
        .map(|_| &hdfs[rng.random_range(0..hdfs.len())])
        .collect();
    let coeffs: Vec<Vec<C64>> = (0..num_kraus)
        .map(|_| {
            (0..d)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let norms: Vec<f64> = (0..d)
        .map(|x| coeffs.iter().map(|c| c[x].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let kraus = picks
        .iter()
        .zip(&coeffs)
        .map(|(f, c)| {
            let mut k = ComplexMatrix::zeros(d);
            for x in 0..d {
                k[(f.apply(x), x)] = c[x] / norms[x];
            }
            k
        })
        .collect();
    KrausChannel::new(kraus)
}

/// Single-qubit SIO in normal form: K₁ = diag(a₁, b₁), K₂ = [[0, b₂], [a₂, 0]],
/// K₃ = a₃|0⟩⟨0|, K₄ = a₄|1⟩⟨0| with real a, Σa² = Σ|b|² = 1.
pub fn sio_qubit_normal_form(a: [f64; 4], b: [C64; 2], tol: f64) -> Result<KrausChannel> {
    let sa: f64 = a.iter().map(|x| x * x).sum();
    let sb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    if (sa - 1.0).abs() > tol || (sb - 1.0).abs() > tol {
        return Err(Error::Unnormalized {
            norm: sa.max(sb).sqrt(),
        });
    }
    let r = |x: f64| C64::new(x, 0.0);
    let k1 = ComplexMatrix::diagonal(&[r(a[0]), b[0]]);
    let mut k2 = ComplexMatrix::zeros(2);
    k2[(0, 1)] = b[1];
    k2[(1, 0)] = r(a[1]);
    let mut k3 = ComplexMatrix::zeros(2);
    k3[(0, 0)] = r(a[2]);
    let mut k4 = ComplexMatrix::zeros(2);
    k4[(1, 0)] = r(a[3]);
    KrausChannel::new(vec![k1, k2, k3, k4])
}

pub fn random_sio_qubit(rng: &mut SeededRng) -> KrausChannel {
    let a = random::random_vector(4, rng);
    let a = [a[0].norm(), a[1].norm(), a[2].norm(), a[3].norm()];
    let b = random::random_vector(2, rng);
    sio_qubit_normal_form(a, [b[0], b[1]], 1e-9).expect("normalized by construction")
}
