//! Seeded random states, isometries and channels for property tests and
//! demos. Everything is driven by an explicit ChaCha8 seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::KrausChannel;
use crate::linalg::{herm_eigen, ComplexMatrix, C64, ZERO};
use crate::state::DensityMatrix;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (real and imaginary parts N(0, 1/2)).
pub fn gaussian(rng: &mut SeededRng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_vector(len: usize, rng: &mut SeededRng) -> Vec<C64> {
    let v: Vec<C64> = (0..len).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-random pure state amplitudes on n qubits.
pub fn random_amplitudes(n: usize, rng: &mut SeededRng) -> Vec<C64> {
    random_vector(1 << n, rng)
}

pub fn random_pure(n: usize, rng: &mut SeededRng) -> DensityMatrix {
    DensityMatrix::pure(&random_amplitudes(n, rng), 1e-9).expect("normalized amplitudes")
}

/// Ginibre ensemble G G† / tr(G G†) with G of size 2ⁿ × rank.
pub fn random_mixed(n: usize, rank: usize, rng: &mut SeededRng) -> DensityMatrix {
    let d = 1usize << n;
    let g: Vec<Vec<C64>> = (0..rank)
        .map(|_| (0..d).map(|_| gaussian(rng)).collect())
        .collect();
    let mut m = ComplexMatrix::zeros(d);
    for col in &g {
        m = &m + &ComplexMatrix::outer(col, col);
    }
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr), 1e-9).expect("Ginibre state is physical")
}

/// Full-rank random state.
pub fn random_state(n: usize, rng: &mut SeededRng) -> DensityMatrix {
    random_mixed(n, 1 << n, rng)
}

pub fn random_diagonal(n: usize, rng: &mut SeededRng) -> DensityMatrix {
    let d = 1usize << n;
    let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    DensityMatrix::diagonal(&w.iter().map(|x| x / s).collect::<Vec<_>>(), 1e-9)
        .expect("probability vector")
}

/// Random `rows × cols` isometry (rows ≥ cols) as a list of rows, with
/// orthonormal columns.
pub fn random_isometry(rows: usize, cols: usize, rng: &mut SeededRng) -> Vec<Vec<C64>> {
    assert!(rows >= cols, "isometry needs rows ≥ cols");
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while columns.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| gaussian(rng)).collect();
        // two Gram-Schmidt passes for stability
        for _ in 0..2 {
            for c in &columns {
                let proj: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(c) {
                    *x -= proj * a;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            columns.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    (0..rows)
        .map(|r| columns.iter().map(|c| c[r]).collect())
        .collect()
}

pub fn random_unitary(d: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let rows = random_isometry(d, d, rng);
    ComplexMatrix::from_fn(d, |i, j| rows[i][j])
}

/// New Kraus list K′_a = Σ_b u_ab K_b for a random isometry u with
/// `extra` more rows than columns. Describes the same channel.
pub fn remix_kraus(ch: &KrausChannel, extra: usize, rng: &mut SeededRng) -> KrausChannel {
    let k = ch.kraus();
    let u = random_isometry(k.len() + extra, k.len(), rng);
    let mixed = u
        .iter()
        .map(|row| {
            row.iter()
                .zip(k)
                .fold(ComplexMatrix::zeros(ch.dim()), |acc, (c, kb)| {
                    &acc + &kb.scale(*c)
                })
        })
        .collect();
    KrausChannel::new(mixed).expect("same dimensions")
}

/// Generic CPTP map: K_l = G_l (Σ G†G)^{−1/2} for Gaussian G_l.
pub fn random_channel(n: usize, num_kraus: usize, rng: &mut SeededRng) -> KrausChannel {
    let d = 1usize << n;
    let g: Vec<ComplexMatrix> = (0..num_kraus.max(1))
        .map(|_| ComplexMatrix::from_fn(d, |_, _| gaussian(rng)))
        .collect();
    let s = g.iter().fold(ComplexMatrix::zeros(d), |acc, gl| {
        &acc + &(&gl.adjoint() * gl)
    });
    let eig = herm_eigen(&s, f64::INFINITY).expect("Gram matrix is Hermitian");
    let inv_sqrt = ComplexMatrix::from_fn(d, |i, j| {
        (0..d)
            .map(|k| eig.vectors[(i, k)] * eig.vectors[(j, k)].conj() / eig.values[k].sqrt())
            .fold(ZERO, |a, b| a + b)
    });
    KrausChannel::new(g.iter().map(|gl| gl * &inv_sqrt).collect()).expect("same dimensions")
}

/// Random probability vector of the given length.
pub fn random_simplex(len: usize, rng: &mut SeededRng) -> Vec<f64> {
    let w: Vec<f64> = (0..len)
        .map(|_| -(rng.random::<f64>().max(f64::MIN_POSITIVE)).ln())
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}
