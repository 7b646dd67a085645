//! Membership tests for the HDP, DIO, SIO and SHP operation classes.
//!
//! HDP and DIO are decided exactly from the Choi matrix. SIO and SHP are
//! properties of *some* Kraus decomposition, so they get a decomposition
//! verifier for membership and span certificates for non-membership: if a
//! channel has a Kraus list drawn from a family of sparsity patterns, the
//! Kraus span (the Choi support) is the sum of its intersections with those
//! pattern subspaces. A strictly smaller sum rules membership out.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::channels::{cd_channel, vectorize, KrausChannel};
use crate::hamming::{enumerate_hdf, hd, HdFunction, MAX_HDF_BITS};
use crate::linalg::{herm_eigen, span_basis, ComplexMatrix, C64, ZERO};
use crate::state::{l1_coherence, two_term_state, uniform_superposition, DensityMatrix};

/// Default absolute tolerance for zero tests on Choi entries.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Choi eigenvalues above this define the Kraus span.
pub const SPAN_CUTOFF: f64 = 1e-9;

/// Largest qubit count for the all-permutation SIO span test.
pub const SIO_SPAN_MAX_QUBITS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NonMember,
    MemberByDecomposition,
    Inconclusive,
}

impl Verdict {
    pub fn is_member(self) -> bool {
        matches!(self, Verdict::Member | Verdict::MemberByDecomposition)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    None,
    /// ⟨i|E(|x⟩⟨y|)|j⟩ with h(i,j) ≠ h(x,y).
    ChoiEntry {
        i: usize,
        j: usize,
        x: usize,
        y: usize,
        re: f64,
        im: f64,
    },
    /// ‖J(Δ∘E) − J(E∘Δ)‖_F
    CommutatorDistance {
        distance: f64,
    },
    /// For each Kraus operator, the row hit by each column (None = zero column).
    Decomposition {
        patterns: Vec<Vec<Option<usize>>>,
    },
    DecompositionFailure {
        kraus_index: usize,
        reason: String,
    },
    /// Span of the per-pattern intersections is smaller than the Kraus span.
    SpanDeficit {
        kraus_span_dim: usize,
        pattern_dims: Vec<usize>,
        pattern_sum_dim: usize,
    },
    L1Increase {
        before: f64,
        after: f64,
        probe: Vec<Vec<[f64; 2]>>,
    },
    /// Non-membership inherited from a containing class.
    Implied {
        class: String,
        by: Box<Certificate>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub verdict: Verdict,
    pub certificate: Certificate,
}

impl ClassVerdict {
    fn new(verdict: Verdict, certificate: Certificate) -> Self {
        ClassVerdict {
            verdict,
            certificate,
        }
    }

    fn inconclusive() -> Self {
        Self::new(Verdict::Inconclusive, Certificate::None)
    }
}

impl Certificate {
    /// Re-derives the claimed violation straight from the Kraus operators of
    /// `ch`, without reusing any classifier state. True if it reproduces.
    pub fn recheck(&self, ch: &KrausChannel, tol: f64) -> bool {
        match self {
            Certificate::None => false,
            Certificate::ChoiEntry { i, j, x, y, re, im } => {
                let v: C64 = ch
                    .kraus()
                    .iter()
                    .map(|k| k[(*i, *x)] * k[(*j, *y)].conj())
                    .sum();
                hd(*i, *j) != hd(*x, *y) && v.norm() > tol && (v - C64::new(*re, *im)).norm() <= tol
            }
            Certificate::CommutatorDistance { distance } => {
                let delta = cd_channel(ch.n_qubits());
                let d = 1usize << ch.n_qubits();
                let mut worst = 0.0f64;
                for x in 0..d {
                    for y in 0..d {
                        let e = ComplexMatrix::unit(d, x, y);
                        let a = delta.apply_matrix(&ch.apply_matrix(&e));
                        let b = ch.apply_matrix(&delta.apply_matrix(&e));
                        worst = worst.max((&a - &b).max_abs());
                    }
                }
                *distance > tol && worst > tol
            }
            Certificate::Decomposition { .. } | Certificate::DecompositionFailure { .. } => false,
            Certificate::SpanDeficit {
                kraus_span_dim,
                pattern_sum_dim,
                ..
            } => {
                let n = ch.n_qubits();
                if n > MAX_HDF_BITS {
                    return false;
                }
                let v = kraus_span(ch);
                let hdf_sum = pattern_sum(&v, &hdf_patterns(n)).1;
                let perm_sum =
                    (n <= SIO_SPAN_MAX_QUBITS).then(|| pattern_sum(&v, &permutation_patterns(n)).1);
                v.len() == *kraus_span_dim
                    && (hdf_sum == *pattern_sum_dim || perm_sum == Some(*pattern_sum_dim))
                    && pattern_sum_dim < kraus_span_dim
            }
            Certificate::L1Increase { probe, .. } => {
                let rows: Vec<Vec<C64>> = probe
                    .iter()
                    .map(|r| r.iter().map(|[a, b]| C64::new(*a, *b)).collect())
                    .collect();
                let Ok(m) = ComplexMatrix::from_rows(rows) else {
                    return false;
                };
                let Ok(rho) = DensityMatrix::new(m, 1e-9) else {
                    return false;
                };
                let Ok(out) = ch.apply(&rho) else {
                    return false;
                };
                l1_coherence(&out) > l1_coherence(&rho) + tol
            }
            Certificate::Implied { by, .. } => by.recheck(ch, tol),
        }
    }
}

/// Exact HDP test: every Choi entry with h(i,j) ≠ h(x,y) must vanish.
/// The certificate is the largest violating entry, first in row-major
/// Choi order on ties.
pub fn is_hdp(ch: &KrausChannel, tol: f64) -> ClassVerdict {
    let choi = ch.choi();
    let d = ch.dim();
    let mut worst: Option<(f64, usize, usize, usize, usize, C64)> = None;
    for x in 0..d {
        for i in 0..d {
            for y in 0..d {
                for j in 0..d {
                    if hd(i, j) == hd(x, y) {
                        continue;
                    }
                    let v = choi.entry(i, j, x, y);
                    let m = v.norm();
                    if m > tol && worst.is_none_or(|w| m > w.0) {
                        worst = Some((m, i, j, x, y, v));
                    }
                }
            }
        }
    }
    match worst {
        None => ClassVerdict::new(Verdict::Member, Certificate::None),
        Some((_, i, j, x, y, v)) => ClassVerdict::new(
            Verdict::NonMember,
            Certificate::ChoiEntry {
                i,
                j,
                x,
                y,
                re: v.re,
                im: v.im,
            },
        ),
    }
}

/// Δ∘E = E∘Δ, compared on Choi matrices.
pub fn is_dio(ch: &KrausChannel, tol: f64) -> ClassVerdict {
    let delta = cd_channel(ch.n_qubits());
    let a = KrausChannel::compose(&delta, ch).expect("same size");
    let b = KrausChannel::compose(ch, &delta).expect("same size");
    let distance = a.choi().distance(&b.choi());
    if distance <= tol {
        ClassVerdict::new(Verdict::Member, Certificate::None)
    } else {
        ClassVerdict::new(
            Verdict::NonMember,
            Certificate::CommutatorDistance { distance },
        )
    }
}

/// Column → row map of a matrix with at most one entry above `tol` per row
/// and per column; `Err` names the offending line.
fn generalized_permutation(k: &ComplexMatrix, tol: f64) -> Result<Vec<Option<usize>>, String> {
    let d = k.dim();
    let mut map = vec![None; d];
    let mut row_used = vec![false; d];
    for x in 0..d {
        for i in 0..d {
            if k[(i, x)].norm() > tol {
                if map[x].is_some() {
                    return Err(format!("column {x} has more than one nonzero entry"));
                }
                if row_used[i] {
                    return Err(format!("row {i} has more than one nonzero entry"));
                }
                map[x] = Some(i);
                row_used[i] = true;
            }
        }
    }
    Ok(map)
}

/// Checks the given Kraus list for the SIO form (generalized permutations).
pub fn is_sio_decomposition(ch: &KrausChannel, tol: f64) -> ClassVerdict {
    let mut patterns = Vec::new();
    for (idx, k) in ch.kraus().iter().enumerate() {
        match generalized_permutation(k, tol) {
            Ok(p) => patterns.push(p),
            Err(reason) => {
                return ClassVerdict::new(
                    Verdict::NonMember,
                    Certificate::DecompositionFailure {
                        kraus_index: idx,
                        reason,
                    },
                )
                .demote()
            }
        }
    }
    ClassVerdict::new(
        Verdict::MemberByDecomposition,
        Certificate::Decomposition { patterns },
    )
}

impl ClassVerdict {
    // A failed decomposition check says nothing about other decompositions.
    fn demote(self) -> Self {
        ClassVerdict::new(Verdict::Inconclusive, self.certificate)
    }
}

/// Checks the given Kraus list for the SHP form: each operator is supported
/// on the graph of some HDF, and Σ_l |c_lx|² = 1 for every column x.
pub fn is_shp_decomposition(ch: &KrausChannel, tol: f64) -> ClassVerdict {
    let n = ch.n_qubits();
    if n > MAX_HDF_BITS {
        return ClassVerdict::inconclusive();
    }
    let hdfs = enumerate_hdf(n).expect("n within enumeration range");
    let d = ch.dim();
    let mut patterns = Vec::new();
    let mut column_weight = vec![0.0f64; d];
    for (idx, k) in ch.kraus().iter().enumerate() {
        let fail = |reason: String| {
            ClassVerdict::new(
                Verdict::Inconclusive,
                Certificate::DecompositionFailure {
                    kraus_index: idx,
                    reason,
                },
            )
        };
        let map = match generalized_permutation(k, tol) {
            Ok(m) => m,
            Err(reason) => return fail(reason),
        };
        let fits = |f: &HdFunction| {
            map.iter()
                .enumerate()
                .all(|(x, r)| r.is_none_or(|r| f.apply(x) == r))
        };
        if !hdfs.iter().any(fits) {
            return fail(
                "support is not the graph of a Hamming-distance-preserving function".into(),
            );
        }
        for (x, w) in column_weight.iter_mut().enumerate() {
            *w += (0..d).map(|i| k[(i, x)].norm_sqr()).sum::<f64>();
        }
        patterns.push(map);
    }
    if let Some((x, w)) = column_weight
        .iter()
        .enumerate()
        .find(|(_, w)| (*w - 1.0).abs() > tol)
    {
        return ClassVerdict::new(
            Verdict::Inconclusive,
            Certificate::DecompositionFailure {
                kraus_index: usize::MAX,
                reason: format!("column {x} carries total weight {w}"),
            },
        );
    }
    ClassVerdict::new(
        Verdict::MemberByDecomposition,
        Certificate::Decomposition { patterns },
    )
}

/// Orthonormal basis of the Kraus span in vectorized form, read off the
/// Choi eigenvectors so it does not depend on the stored Kraus list.
fn kraus_span(ch: &KrausChannel) -> Vec<Vec<C64>> {
    ch.choi().support_basis(SPAN_CUTOFF)
}

/// Vectorized index sets {x·d + π(x)} for every HDF π.
fn hdf_patterns(n: usize) -> Vec<Vec<usize>> {
    let d = 1usize << n;
    enumerate_hdf(n)
        .expect("n within enumeration range")
        .iter()
        .map(|f| (0..d).map(|x| x * d + f.apply(x)).collect())
        .collect()
}

fn permutation_patterns(n: usize) -> Vec<Vec<usize>> {
    let d = 1usize << n;
    (0..d)
        .permutations(d)
        .map(|p| (0..d).map(|x| x * d + p[x]).collect())
        .collect()
}

/// Basis of V ∩ span{e_k : k ∈ pattern}.
fn intersect_with_pattern(basis: &[Vec<C64>], pattern: &[usize]) -> Vec<Vec<C64>> {
    let r = basis.len();
    if r == 0 {
        return Vec::new();
    }
    let len = basis[0].len();
    let mut inside = vec![false; len];
    for &k in pattern {
        inside[k] = true;
    }
    // Gram matrix of the off-pattern parts; its kernel gives the intersection
    let gram = ComplexMatrix::from_fn(r, |a, b| {
        (0..len)
            .filter(|&k| !inside[k])
            .map(|k| basis[a][k].conj() * basis[b][k])
            .sum()
    });
    let eig = herm_eigen(&gram, f64::INFINITY).expect("Gram matrix is Hermitian");
    eig.values
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam <= SPAN_CUTOFF)
        .map(|(c, _)| {
            let mut v = vec![ZERO; len];
            for (a, b) in basis.iter().enumerate() {
                let coef = eig.vectors[(a, c)];
                for k in pattern {
                    v[*k] += coef * b[*k];
                }
            }
            v
        })
        .collect()
}

/// (per-pattern intersection dims, dim of their sum)
fn pattern_sum(basis: &[Vec<C64>], patterns: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let mut dims = Vec::with_capacity(patterns.len());
    let mut all = Vec::new();
    for p in patterns {
        let part = intersect_with_pattern(basis, p);
        dims.push(part.len());
        all.extend(part);
    }
    let total = span_basis(&all, SPAN_CUTOFF).len();
    (dims, total)
}

fn span_certificate(ch: &KrausChannel, patterns: &[Vec<usize>]) -> ClassVerdict {
    let v = kraus_span(ch);
    let (pattern_dims, pattern_sum_dim) = pattern_sum(&v, patterns);
    let cert = Certificate::SpanDeficit {
        kraus_span_dim: v.len(),
        pattern_dims,
        pattern_sum_dim,
    };
    if pattern_sum_dim < v.len() {
        ClassVerdict::new(Verdict::NonMember, cert)
    } else {
        ClassVerdict::new(Verdict::Inconclusive, cert)
    }
}

/// Sound SHP non-membership test over all HDF patterns (n ≤ 4).
pub fn shp_nonmembership_certifier(ch: &KrausChannel) -> ClassVerdict {
    if ch.n_qubits() > MAX_HDF_BITS {
        return ClassVerdict::inconclusive();
    }
    span_certificate(ch, &hdf_patterns(ch.n_qubits()))
}

/// Sound SIO non-membership test over all permutation patterns (n ≤ 2).
pub fn sio_span_certifier(ch: &KrausChannel) -> ClassVerdict {
    if ch.n_qubits() > SIO_SPAN_MAX_QUBITS {
        return ClassVerdict::inconclusive();
    }
    span_certificate(ch, &permutation_patterns(ch.n_qubits()))
}

/// SIO never increases l₁ coherence; an increase on ρ certifies E ∉ SIO.
pub fn sio_nonmembership_by_l1(ch: &KrausChannel, rho: &DensityMatrix, tol: f64) -> ClassVerdict {
    let Ok(out) = ch.apply(rho) else {
        return ClassVerdict::inconclusive();
    };
    let before = l1_coherence(rho);
    let after = l1_coherence(&out);
    if after > before + tol {
        let d = rho.dim();
        let probe = (0..d)
            .map(|x| {
                (0..d)
                    .map(|y| {
                        let v = rho.entry(x, y);
                        [v.re, v.im]
                    })
                    .collect()
            })
            .collect();
        ClassVerdict::new(
            Verdict::NonMember,
            Certificate::L1Increase {
                before,
                after,
                probe,
            },
        )
    } else {
        ClassVerdict::inconclusive()
    }
}

/// Splits each Kraus operator of a single-qubit HDP channel into its diagonal
/// and off-diagonal parts. The result is an explicit SHP decomposition of
/// the same channel.
pub fn single_qubit_shp_reconstruction(ch: &KrausChannel) -> Option<KrausChannel> {
    if ch.n_qubits() != 1 {
        return None;
    }
    let mut kraus = Vec::new();
    for k in ch.kraus() {
        let s = ComplexMatrix::from_fn(2, |i, j| if i == j { k[(i, j)] } else { ZERO });
        let t = ComplexMatrix::from_fn(2, |i, j| if i != j { k[(i, j)] } else { ZERO });
        for m in [s, t] {
            if m.max_abs() > 0.0 {
                kraus.push(m);
            }
        }
    }
    KrausChannel::new(kraus).ok()
}

/// Where a channel sits among SHP ⊆ SIO ∩ HDP, SIO ∪ HDP ⊆ DIO.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Shp,
    SioAndHdpMinusShp,
    SioAndHdp,
    HdpMinusSio,
    Hdp,
    SioMinusHdp,
    DioMinusSioUnionHdp,
    DioMinusHdp,
    OutsideDio,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Shp => "SHP",
            Region::SioAndHdpMinusShp => "(SIO∩HDP)∖SHP",
            Region::SioAndHdp => "SIO∩HDP",
            Region::HdpMinusSio => "HDP∖SIO",
            Region::Hdp => "HDP",
            Region::SioMinusHdp => "SIO∖HDP",
            Region::DioMinusSioUnionHdp => "DIO∖(SIO∪HDP)",
            Region::DioMinusHdp => "DIO∖HDP",
            Region::OutsideDio => "outside DIO",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyReport {
    pub n_qubits: usize,
    pub hdp: ClassVerdict,
    pub dio: ClassVerdict,
    pub sio: ClassVerdict,
    pub shp: ClassVerdict,
    pub region: Region,
}

fn implied(class: &str, from: &ClassVerdict) -> ClassVerdict {
    ClassVerdict::new(
        Verdict::NonMember,
        Certificate::Implied {
            class: class.to_string(),
            by: Box::new(from.certificate.clone()),
        },
    )
}

/// Probe states for the l₁ test: every (|x⟩+|y⟩)/√2 and |+ⁿ⟩.
fn l1_probes(n: usize) -> Vec<DensityMatrix> {
    let d = 1usize << n;
    let mut probes: Vec<DensityMatrix> = (0..d)
        .tuple_combinations()
        .map(|(x, y)| two_term_state(n, x, y))
        .collect();
    probes.push(uniform_superposition(n, &vec![0.0; d]).expect("valid phases"));
    probes
}

fn classify_sio(
    ch: &KrausChannel,
    canonical: &KrausChannel,
    dio: &ClassVerdict,
    tol: f64,
) -> ClassVerdict {
    for list in [ch, canonical] {
        let v = is_sio_decomposition(list, tol);
        if v.verdict.is_member() {
            return v;
        }
    }
    if dio.verdict == Verdict::NonMember {
        return implied("DIO", dio);
    }
    for probe in l1_probes(ch.n_qubits()) {
        let v = sio_nonmembership_by_l1(ch, &probe, tol);
        if v.verdict == Verdict::NonMember {
            return v;
        }
    }
    sio_span_certifier(ch)
}

fn classify_shp(
    ch: &KrausChannel,
    canonical: &KrausChannel,
    hdp: &ClassVerdict,
    sio: &ClassVerdict,
    tol: f64,
) -> ClassVerdict {
    if hdp.verdict == Verdict::Member {
        for list in [ch, canonical] {
            let v = is_shp_decomposition(list, tol);
            if v.verdict.is_member() {
                return v;
            }
        }
        if let Some(rebuilt) = single_qubit_shp_reconstruction(ch) {
            let v = is_shp_decomposition(&rebuilt, tol);
            if v.verdict.is_member() {
                return v;
            }
        }
    }
    let span = shp_nonmembership_certifier(ch);
    if span.verdict == Verdict::NonMember {
        return span;
    }
    if hdp.verdict == Verdict::NonMember {
        return implied("HDP", hdp);
    }
    if sio.verdict == Verdict::NonMember {
        return implied("SIO", sio);
    }
    span
}

/// Runs every classifier and places the channel in the hierarchy.
pub fn hierarchy_report(ch: &KrausChannel, tol: f64) -> HierarchyReport {
    let canonical = ch.canonical(SPAN_CUTOFF);
    let hdp = is_hdp(ch, tol);
    let dio = is_dio(ch, tol);
    let sio = classify_sio(ch, &canonical, &dio, tol);
    let shp = classify_shp(ch, &canonical, &hdp, &sio, tol);

    let in_hdp = hdp.verdict.is_member();
    let region = if shp.verdict.is_member() {
        Region::Shp
    } else if dio.verdict == Verdict::NonMember {
        Region::OutsideDio
    } else {
        match (in_hdp, sio.verdict) {
            (true, s) if s.is_member() => {
                if shp.verdict == Verdict::NonMember {
                    Region::SioAndHdpMinusShp
                } else {
                    Region::SioAndHdp
                }
            }
            (true, Verdict::NonMember) => Region::HdpMinusSio,
            (true, _) => Region::Hdp,
            (false, s) if s.is_member() => Region::SioMinusHdp,
            (false, Verdict::NonMember) => Region::DioMinusSioUnionHdp,
            (false, _) => Region::DioMinusHdp,
        }
    };
    HierarchyReport {
        n_qubits: ch.n_qubits(),
        hdp,
        dio,
        sio,
        shp,
        region,
    }
}

/// Choi-level view used by certificate rechecks and reports.
pub fn kraus_span_dim(ch: &KrausChannel) -> usize {
    kraus_span(ch).len()
}

/// Vectorized Kraus operators, exposed for span diagnostics.
pub fn vectorized_kraus(ch: &KrausChannel) -> Vec<Vec<C64>> {
    ch.kraus().iter().map(vectorize).collect()
}
