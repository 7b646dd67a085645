//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL] criterion N`
//! line followed by its sub-checks, then asserts.
//!
//! cargo test -p deqfi --test acceptance -- --nocapture --test-threads=1

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use deqfi::scenarios::{self, Params};
use deqfi_core::channels::{
    channels_equal, named_channel, pd_apply, pd_channel, KrausChannel, NamedChannel,
};
use deqfi_core::classify::{
    hierarchy_report, is_hdp, is_shp_decomposition, is_sio_decomposition,
    single_qubit_shp_reconstruction, Certificate, Region, Verdict, CLASSIFY_TOL,
};
use deqfi_core::fisher::{
    classical_fi, dephasing_point, dephasing_qfi, pe_qfi, qfi_fidelity_oracle, witness_phase,
    witness_povm, ORACLE_STEP,
};
use deqfi_core::hamming::{enumerate_hdf, factor_hdf, is_hdf, HdFunction};
use deqfi_core::linalg::{ComplexMatrix, C64};
use deqfi_core::random::{
    random_amplitudes, random_channel, random_diagonal, random_mixed, random_state, remix_kraus,
    rng, SeededRng,
};
use deqfi_core::state::{
    bloch_from_density, density_from_bloch, l1_coherence, two_term_state, uniform_superposition,
    BlochVector, DensityMatrix, Hamiltonian,
};
use deqfi_core::transform::{
    cone_r_max, extreme_cone_channel, golden_transform, hdp_cone_contains, hdp_offdiag_bound,
    hdp_unitary, merge_channel, random_shp_with, ConeQuery, MergeSpec,
};
use itertools::Itertools;
use rand::Rng;

const THETAS: [f64; 3] = [0.2, 0.5, 1.0];

struct Criterion {
    number: u32,
    title: &'static str,
    subs: Vec<(String, bool, String)>,
}

impl Criterion {
    fn new(number: u32, title: &'static str) -> Self {
        Criterion {
            number,
            title,
            subs: Vec::new(),
        }
    }

    fn sub(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.subs.push((name.into(), ok, detail.into()));
    }

    fn finish(self) {
        let failed: Vec<&str> = self
            .subs
            .iter()
            .filter(|s| !s.1)
            .map(|s| s.0.as_str())
            .collect();
        let tag = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {}", self.number, self.title);
        for (name, ok, detail) in &self.subs {
            println!("    [{}] {name}: {detail}", if *ok { "ok" } else { "FAIL" });
        }
        assert!(
            failed.is_empty(),
            "criterion {} failed: {}",
            self.number,
            failed.join("; ")
        );
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn random_bloch(r: &mut SeededRng) -> BlochVector {
    loop {
        let v: [f64; 3] = [
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        ];
        if v.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
            return BlochVector::new(v[0], v[1], v[2], 1e-12).unwrap();
        }
    }
}

/// Mixtures of random SHP channels, hidden behind an isometric remix.
fn random_hdp(n: usize, r: &mut SeededRng) -> KrausChannel {
    let a = random_shp_with(n, 1 + r.random_range(0..4), r).unwrap();
    let b = random_shp_with(n, 1 + r.random_range(0..3), r).unwrap();
    let t: f64 = r.random();
    let mix = KrausChannel::convex_mixture(&[(t, &a), (1.0 - t, &b)]).unwrap();
    remix_kraus(&mix, r.random_range(0..2), r)
}

fn state_family(n: usize, k: usize, r: &mut SeededRng) -> DensityMatrix {
    match k % 3 {
        0 => random_state(n, r),
        1 => random_mixed(n, 2, r),
        _ => {
            let pure = DensityMatrix::pure(&random_amplitudes(n, r), 1e-9).unwrap();
            let mixed = DensityMatrix::maximally_mixed(n);
            DensityMatrix::mixture(&[(0.9, &pure), (0.1, &mixed)]).unwrap()
        }
    }
}

#[test]
fn criterion_01_closed_form_qfi() {
    let mut c = Criterion::new(1, "closed-form QFI values");
    let psi1 = two_term_state(2, 0, 1);
    let psi2 = two_term_state(2, 0, 3);
    let (mut w1, mut w2, mut wq) = (0.0f64, 0.0f64, 0.0f64);
    for t in THETAS {
        let e2 = (-2.0 * t).exp();
        let e4 = (-4.0 * t).exp();
        w1 = w1.max(rel(dephasing_qfi(&psi1, t).unwrap(), e2 / (1.0 - e2)));
        w2 = w2.max(rel(dephasing_qfi(&psi2, t).unwrap(), 4.0 * e4 / (1.0 - e4)));
        for i in 0..5 {
            let r = 0.1 + 0.2 * i as f64;
            for j in 0..5 {
                let z = (-0.8 + 0.4 * j as f64) * (1.0 - r * r).sqrt();
                let rho = density_from_bloch(&BlochVector::new(r, 0.0, z, 1e-12).unwrap());
                let a = r * r * e2;
                let want = a * (1.0 - z * z) / (1.0 - z * z - a);
                wq = wq.max(rel(dephasing_qfi(&rho, t).unwrap(), want));
            }
        }
    }
    c.sub(
        "psi1 = e^-2t/(1-e^-2t)",
        w1 <= 1e-8,
        format!("max rel err {w1:.2e}"),
    );
    c.sub(
        "psi2 = 4e^-4t/(1-e^-4t)",
        w2 <= 1e-8,
        format!("max rel err {w2:.2e}"),
    );
    c.sub(
        "single-qubit 5x5 (r,z) grid",
        wq <= 1e-8,
        format!("max rel err {wq:.2e}"),
    );

    let mut r = rng(101);
    let mut wpe = 0.0f64;
    for _ in 0..50 {
        let b = random_bloch(&mut r);
        let eps = r.random_range(0.5..2.0);
        let h = Hamiltonian::new(1, eps).unwrap();
        let got = pe_qfi(&density_from_bloch(&b), &h).unwrap();
        let want = b.r() * b.r() * eps * eps;
        wpe = wpe.max((got - want).abs() / want.max(1e-3));
    }
    c.sub(
        "single-qubit pe_qfi = r^2 eps^2",
        wpe <= 1e-8,
        format!("max rel err {wpe:.2e}"),
    );

    // a|0⟩ + b|3⟩ (the pairs the formula addresses), ε drawn per sample
    let (mut w4, mut ratio) = (0.0f64, 0.0f64);
    for k in 0..21 {
        let alpha = if k == 0 {
            PI / 4.0
        } else {
            r.random_range(0.05..1.5)
        };
        let phi = r.random_range(-PI..PI);
        let amps = [
            C64::new(alpha.cos(), 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(alpha.sin(), phi),
        ];
        let eps = r.random_range(0.5..2.0);
        let h = Hamiltonian::new(2, eps).unwrap();
        let got = pe_qfi(&DensityMatrix::pure(&amps, 1e-12).unwrap(), &h).unwrap();
        let (p0, p3) = (alpha.cos().powi(2), alpha.sin().powi(2));
        let g = p0 + p3 - (p0 - p3).powi(2);
        w4 = w4.max(rel(got, g * eps * eps));
        ratio = got / (g * eps * eps);
    }
    c.sub(
        "two-qubit pure pe_qfi = g(psi0,psi3) eps^2",
        w4 <= 1e-8,
        format!("max rel err {w4:.2e}; observed pe_qfi / (g eps^2) = {ratio:.6}"),
    );
    c.finish();
}

#[test]
fn criterion_02_fidelity_oracle() {
    let mut c = Criterion::new(2, "spectral QFI vs fidelity oracle");
    let mut r = rng(202);
    let (mut wpd, mut wpe) = (0.0f64, 0.0f64);
    for k in 0..100 {
        let n = 1 + k % 2;
        let rho = state_family(n, k / 2, &mut r);
        let t = 0.2 + r.random::<f64>();
        let exact = dephasing_qfi(&rho, t).unwrap();
        let oracle = qfi_fidelity_oracle(|s| pd_apply(s, &rho), t, ORACLE_STEP).unwrap();
        wpd = wpd.max(rel(oracle, exact));

        let h = Hamiltonian::new(n, 0.5 + r.random::<f64>()).unwrap();
        let exact = pe_qfi(&rho, &h).unwrap();
        let oracle = qfi_fidelity_oracle(|s| Ok(h.evolve(&rho, s)), 0.0, ORACLE_STEP).unwrap();
        wpe = wpe.max(rel(oracle, exact));
    }
    c.sub(
        "100 PD families",
        wpd < 1e-4,
        format!("max rel dev {wpd:.2e}"),
    );
    c.sub(
        "100 PE families",
        wpe < 1e-4,
        format!("max rel dev {wpe:.2e}"),
    );
    c.finish();
}

#[test]
fn criterion_03_qfi_properties() {
    let mut c = Criterion::new(3, "additivity, convexity, monotonicity under HDP");
    let mut r = rng(303);
    let (mut add, mut conv, mut mono) = (0.0f64, f64::INFINITY, f64::INFINITY);
    for k in 0..200 {
        let t = THETAS[k % 3];
        let n = 1 + k % 2;
        let a = state_family(1, k, &mut r);
        let b = state_family(n, k + 1, &mut r);
        let sum = dephasing_qfi(&a, t).unwrap() + dephasing_qfi(&b, t).unwrap();
        add = add.max(rel(dephasing_qfi(&a.tensor(&b), t).unwrap(), sum));

        let d = state_family(n, k + 2, &mut r);
        let q: f64 = r.random();
        let mix = DensityMatrix::mixture(&[(q, &b), (1.0 - q, &d)]).unwrap();
        let rhs = q * dephasing_qfi(&b, t).unwrap() + (1.0 - q) * dephasing_qfi(&d, t).unwrap();
        conv = conv.min(rhs - dephasing_qfi(&mix, t).unwrap());

        let ch = random_hdp(n, &mut r);
        assert_eq!(is_hdp(&ch, CLASSIFY_TOL).verdict, Verdict::Member);
        mono = mono
            .min(dephasing_qfi(&b, t).unwrap() - dephasing_qfi(&ch.apply(&b).unwrap(), t).unwrap());
    }
    c.sub(
        "additivity",
        add <= 1e-8,
        format!("max rel defect {add:.2e}"),
    );
    c.sub("convexity", conv >= -1e-8, format!("min slack {conv:.2e}"));
    c.sub(
        "monotonicity under 200 HDP channels",
        mono >= -1e-8,
        format!("min slack {mono:.2e}"),
    );
    c.finish();
}

#[test]
fn criterion_04_free_states() {
    let mut c = Criterion::new(4, "free states and the witness POVM");
    let mut r = rng(404);
    let mut worst_free = 0.0f64;
    for k in 0..100 {
        let rho = random_diagonal(1 + k % 3, &mut r);
        worst_free = worst_free.max(dephasing_qfi(&rho, THETAS[k % 3]).unwrap());
    }
    c.sub(
        "diagonal states",
        worst_free <= 1e-8,
        format!("max QFI {worst_free:.2e}"),
    );

    let (mut tested, mut min_fi, mut gap) = (0usize, f64::INFINITY, f64::NEG_INFINITY);
    while tested < 100 {
        let n = 1 + tested % 2;
        let rho = state_family(n, tested, &mut r);
        let Some((x, y)) =
            (0..rho.dim())
                .tuple_combinations()
                .max_by(|a: &(usize, usize), b: &(usize, usize)| {
                    rho.entry(a.0, a.1)
                        .norm()
                        .total_cmp(&rho.entry(b.0, b.1).norm())
                })
        else {
            continue;
        };
        if rho.entry(x, y).norm() < 1e-2 {
            continue;
        }
        tested += 1;
        let t = THETAS[tested % 3];
        let povm = witness_povm(x, y, witness_phase(&rho, x, y), n).unwrap();
        let fi = classical_fi(&povm, &dephasing_point(&rho, t).unwrap(), 1e-12).unwrap();
        min_fi = min_fi.min(fi);
        gap = gap.max(fi - dephasing_qfi(&rho, t).unwrap());
    }
    c.sub(
        "witness FI > 1e-6 on 100 coherent states",
        min_fi > 1e-6,
        format!("min FI {min_fi:.4e}"),
    );
    c.sub("FI <= QFI", gap <= 1e-8, format!("max FI - QFI {gap:.2e}"));
    c.finish();
}

#[test]
fn criterion_05_classifier_ground_truth() {
    let mut c = Criterion::new(5, "classifier ground truth");
    let cases = [
        (
            "W",
            named_channel(NamedChannel::W, 2).unwrap(),
            Region::HdpMinusSio,
        ),
        (
            "R",
            named_channel(NamedChannel::R, 3).unwrap(),
            Region::SioAndHdpMinusShp,
        ),
        (
            "N",
            named_channel(NamedChannel::N, 2).unwrap(),
            Region::DioMinusSioUnionHdp,
        ),
        (
            "U_sio",
            named_channel(NamedChannel::USio, 2).unwrap(),
            Region::SioMinusHdp,
        ),
        (
            "V",
            named_channel(NamedChannel::VSwap, 2).unwrap(),
            Region::Shp,
        ),
    ];
    for (name, ch, want) in cases {
        let h = hierarchy_report(&ch, CLASSIFY_TOL);
        let certs = [&h.hdp, &h.dio, &h.sio, &h.shp]
            .iter()
            .filter(|v| v.verdict == Verdict::NonMember)
            .all(|v| v.certificate.recheck(&ch, CLASSIFY_TOL));
        c.sub(
            format!("{name} in {want}"),
            h.region == want && certs,
            format!("region {}, certificates recheck: {certs}", h.region),
        );
    }
    for phi in [0.0, 0.7, -2.1, PI] {
        let u = named_channel(NamedChannel::UPhase(phi), 1).unwrap();
        let v = is_shp_decomposition(&u, CLASSIFY_TOL);
        c.sub(
            format!("U_phase({phi}) in SHP"),
            v.verdict.is_member(),
            format!("{:?}", v.verdict),
        );
    }
    let z = named_channel(NamedChannel::Z, 1).unwrap();
    let zv = is_hdp(&z, CLASSIFY_TOL);
    c.sub(
        "Z not HDP",
        zv.verdict == Verdict::NonMember
            && matches!(zv.certificate, Certificate::ChoiEntry { .. })
            && zv.certificate.recheck(&z, CLASSIFY_TOL),
        format!("{:?}", zv.certificate),
    );
    // F(σ) ≥ F(Z(σ)) on the 10×10×3 grid, minimum expression 3e^{2θ} − 1/3 at (1, 0)
    let (mut slack, mut expr_ok) = (f64::INFINITY, true);
    for t in THETAS {
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..10 {
            let r = i as f64 / 9.0;
            for j in 0..10 {
                let zz = (-1.0 + 2.0 * j as f64 / 9.0) * (1.0 - r * r).max(0.0).sqrt();
                let sigma = density_from_bloch(&BlochVector::new(r, 0.0, zz, 1e-12).unwrap());
                let f0 = dephasing_qfi(&sigma, t).unwrap();
                let f1 = dephasing_qfi(&z.apply(&sigma).unwrap(), t).unwrap();
                slack = slack.min(f0 - f1);
                if r > 0.0 {
                    let e = 3.0 / (r * r * (-2.0 * t).exp()) - 4.0 / (4.0 - r * r)
                        + 1.0 / (1.0 - zz * zz);
                    if e < best.0 {
                        best = (e, r, zz);
                    }
                }
            }
        }
        let want = 3.0 * (2.0 * t).exp() - 1.0 / 3.0;
        expr_ok &=
            rel(best.0, want) < 1e-12 && (best.1 - 1.0).abs() < 1e-12 && best.2.abs() < 1e-12;
    }
    c.sub(
        "Z never increases dephasing QFI on the grid",
        slack >= -1e-9,
        format!("min slack {slack:.3e}"),
    );
    c.sub(
        "grid minimum 3e^(2t) - 1/3 at (r,z) = (1,0)",
        expr_ok,
        "theta in {0.2, 0.5, 1.0}",
    );
    let report = scenarios::appendix_a(&Params::default()).unwrap();
    c.sub(
        "appendix-a scenario",
        report.passed(),
        format!("{} checks", report.checks.len()),
    );
    c.finish();
}

fn pd_commutator(ch: &KrausChannel, t: f64) -> f64 {
    let pd = pd_channel(ch.n_qubits(), t).unwrap();
    KrausChannel::compose(ch, &pd)
        .unwrap()
        .choi()
        .distance(&KrausChannel::compose(&pd, ch).unwrap().choi())
}

#[test]
fn criterion_06_hdp_iff_commutes_with_pd() {
    let mut c = Criterion::new(6, "HDP iff commutation with PD");
    for n in 1..=2usize {
        let mut r = rng(600 + n as u64);
        let (mut hdp_max, mut non_min, mut counts) = (0.0f64, f64::INFINITY, [0usize; 2]);
        for k in 0..200 {
            let ch = match k % 4 {
                0 => random_channel(n, 1 + k % 3, &mut r),
                1 | 2 => random_hdp(n, &mut r),
                _ => {
                    let s = random_hdp(n, &mut r);
                    let g = random_channel(n, 2, &mut r);
                    KrausChannel::convex_mixture(&[(0.7, &s), (0.3, &g)]).unwrap()
                }
            };
            let member = is_hdp(&ch, CLASSIFY_TOL).verdict == Verdict::Member;
            counts[member as usize] += 1;
            for t in [0.3, 1.0] {
                let d = pd_commutator(&ch, t);
                if member {
                    hdp_max = hdp_max.max(d);
                } else {
                    non_min = non_min.min(d);
                }
            }
        }
        c.sub(
            format!("n={n} HDP channels commute"),
            hdp_max <= 1e-9 && counts[1] > 0,
            format!("{} channels, max distance {hdp_max:.2e}", counts[1]),
        );
        c.sub(
            format!("n={n} others do not"),
            non_min > 1e-6 && counts[0] > 0,
            format!("{} channels, min distance {non_min:.2e}", counts[0]),
        );
    }
    c.finish();
}

#[test]
fn criterion_07_single_qubit_collapse() {
    let mut c = Criterion::new(7, "single-qubit HDP = SHP = SIO ∩ HDP");
    let mut r = rng(707);
    let (mut eq, mut shp, mut sio) = (0usize, 0usize, 0usize);
    for k in 0..100 {
        let ch = if k % 4 == 3 {
            let s = random_bloch(&mut r);
            let t = random_bloch(&mut r);
            let zt = t.z;
            let b = BlochVector::from_cylindrical(
                cone_r_max(&s, zt) * r.random::<f64>(),
                t.phi(),
                zt,
                1e-9,
            )
            .unwrap();
            let e = extreme_cone_channel(
                &ConeQuery {
                    source: s,
                    target: b,
                },
                1e-12,
            )
            .unwrap();
            remix_kraus(&e, 1, &mut r)
        } else {
            random_hdp(1, &mut r)
        };
        assert_eq!(is_hdp(&ch, CLASSIFY_TOL).verdict, Verdict::Member);
        let Some(rebuilt) = single_qubit_shp_reconstruction(&ch) else {
            continue;
        };
        eq += channels_equal(&ch, &rebuilt, 1e-9) as usize;
        shp += is_shp_decomposition(&rebuilt, CLASSIFY_TOL)
            .verdict
            .is_member() as usize;
        sio += is_sio_decomposition(&rebuilt, CLASSIFY_TOL)
            .verdict
            .is_member() as usize;
    }
    c.sub(
        "reconstruction equals the channel",
        eq == 100,
        format!("{eq}/100"),
    );
    c.sub("passes the SHP verifier", shp == 100, format!("{shp}/100"));
    c.sub("passes the SIO verifier", sio == 100, format!("{sio}/100"));
    c.finish();
}

#[test]
fn criterion_08_cone() {
    let mut c = Criterion::new(8, "single-qubit HDP cone");
    let mut r = rng(808);
    let (mut agree, mut sat) = (0usize, 0.0f64);
    for _ in 0..10_000 {
        let s = random_bloch(&mut r);
        let t = random_bloch(&mut r);
        let q = ConeQuery {
            source: s,
            target: t,
        };
        let b = BlochVector::from_cylindrical(cone_r_max(&s, t.z), t.phi(), t.z, 1e-9).unwrap();
        let e = extreme_cone_channel(
            &ConeQuery {
                source: s,
                target: b,
            },
            1e-12,
        )
        .unwrap();
        let o = bloch_from_density(&e.apply(&density_from_bloch(&s)).unwrap()).unwrap();
        sat = sat
            .max((o.x - b.x).abs())
            .max((o.y - b.y).abs())
            .max((o.z - b.z).abs());
        let reachable = t.r() <= o.r() + 1e-12 && (o.z - t.z).abs() < 1e-9;
        agree += (hdp_cone_contains(&q, 1e-12) == reachable) as usize;
    }
    c.sub(
        "membership matches extreme reachability",
        agree == 10_000,
        format!("{agree}/10000"),
    );
    c.sub(
        "boundary saturation",
        sat <= 1e-9,
        format!("max Bloch deviation {sat:.2e}"),
    );

    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = deqfi::run(["deqfi", "reproduce", "cone", "--csv"], &mut out, &mut err);
    let csv = String::from_utf8(out).unwrap();
    let (x, z0) = (0.6f64, 0.6f64);
    let mut worst = 0.0f64;
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let want = if v[0].abs() >= z0.abs() {
            x * ((1.0 - v[0] * v[0]) / (1.0 - z0 * z0)).sqrt()
        } else {
            x
        };
        worst = worst.max((v[1] - want).abs());
        rows += 1;
    }
    c.sub(
        "cone CSV for source (0.6,0,0.6)",
        code == 0 && csv.starts_with("z,r_max\n") && rows > 100 && worst <= 1e-9,
        format!("exit {code}, {rows} rows, max deviation {worst:.2e}"),
    );
    c.finish();
}

#[test]
fn criterion_09_golden_states() {
    let mut c = Criterion::new(9, "golden states");
    let mut r = rng(909);
    for n in 1..=3usize {
        let (mut min_fid, mut shp) = (f64::INFINITY, 0usize);
        for _ in 0..100 {
            let target = random_amplitudes(n, &mut r);
            let eta: Vec<f64> = (0..1usize << n).map(|_| r.random_range(-PI..PI)).collect();
            let ch = golden_transform(&target, &eta, 1e-9).unwrap();
            let out = ch.apply(&uniform_superposition(n, &eta).unwrap()).unwrap();
            let mut f = C64::new(0.0, 0.0);
            for x in 0..out.dim() {
                for y in 0..out.dim() {
                    f += target[x].conj() * out.entry(x, y) * target[y];
                }
            }
            min_fid = min_fid.min(f.re);
            shp += is_shp_decomposition(&ch, CLASSIFY_TOL).verdict.is_member() as usize;
        }
        c.sub(
            format!("n={n} fidelity"),
            min_fid >= 1.0 - 1e-9,
            format!("min {min_fid:.15}"),
        );
        c.sub(
            format!("n={n} SHP verifier"),
            shp == 100,
            format!("{shp}/100"),
        );
    }
    c.finish();
}

#[test]
fn criterion_10_hdf_enumeration() {
    let mut c = Criterion::new(10, "Hamming-distance-preserving functions");
    for n in 1..=4usize {
        let all = enumerate_hdf(n).unwrap();
        let want = (1usize << n) * (1..=n).product::<usize>();
        c.sub(
            format!("n={n} count"),
            all.len() == want,
            format!("{} vs {want}", all.len()),
        );
        let rt = all.iter().all(|f| {
            let (m, re) = factor_hdf(f.table(), n).unwrap();
            HdFunction::from_factors(n, m, &re).unwrap().table() == f.table()
        });
        c.sub(format!("n={n} factorization round-trips"), rt, "");
        if n <= 3 {
            // independent filter: pairwise popcount comparison
            let mut brute: Vec<Vec<usize>> = (0..1usize << n)
                .permutations(1 << n)
                .filter(|t| {
                    (0..t.len()).all(|x| {
                        (0..t.len()).all(|y| (x ^ y).count_ones() == (t[x] ^ t[y]).count_ones())
                    })
                })
                .collect();
            let mut listed: Vec<Vec<usize>> = all.iter().map(|f| f.table().to_vec()).collect();
            brute.sort();
            listed.sort();
            c.sub(
                format!("n={n} equals brute force"),
                brute == listed,
                format!("{} tables", brute.len()),
            );
            c.sub(
                format!("n={n} is_hdf agrees"),
                listed.iter().all(|t| is_hdf(t, n).unwrap()),
                "",
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_11_l1_increase_under_w() {
    let mut c = Criterion::new(11, "l1 coherence 1 -> sqrt2 under W");
    let w = named_channel(NamedChannel::W, 2).unwrap();
    let rho = DensityMatrix::new(
        ComplexMatrix::from_real_rows(&[
            &[0.5, 0.5, 0.0, 0.0],
            &[0.5, 0.5, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap(),
        1e-12,
    )
    .unwrap();
    let (before, after) = (l1_coherence(&rho), l1_coherence(&w.apply(&rho).unwrap()));
    c.sub(
        "before",
        (before - 1.0).abs() <= 1e-9,
        format!("{before:.12}"),
    );
    c.sub(
        "after",
        (after - SQRT_2).abs() <= 1e-9,
        format!("{after:.12}"),
    );
    let h = hierarchy_report(&w, CLASSIFY_TOL);
    c.sub(
        "W not SIO, certificate rechecks",
        h.sio.verdict == Verdict::NonMember && h.sio.certificate.recheck(&w, CLASSIFY_TOL),
        format!("{:?}", h.sio.certificate),
    );
    c.finish();
}

#[test]
fn criterion_12_merge_and_prop8() {
    let mut c = Criterion::new(12, "merging and V improve PE-QFI at fixed dephasing QFI");
    let mut r = rng(1212);
    let (mut purity, mut gain, mut pd) = (0.0f64, f64::INFINITY, 0.0f64);
    for k in 0..20 {
        let n = 2 + k % 2;
        let rho = scenarios::merge_mixture(n, &mut r).unwrap();
        let spec = MergeSpec::optimal(rho.clone(), 0, (1 << n) - 1, 1e-12).unwrap();
        let ch = merge_channel(&spec, 1e-12).unwrap();
        let out = ch.apply(&rho).unwrap();
        purity = purity.max((1.0 - out.purity()).abs());
        let h = Hamiltonian::new(n, 1.0).unwrap();
        gain = gain.min(pe_qfi(&out, &h).unwrap() - pe_qfi(&rho, &h).unwrap());
        for t in THETAS {
            pd = pd.max((dephasing_qfi(&out, t).unwrap() - dephasing_qfi(&rho, t).unwrap()).abs());
        }
    }
    c.sub(
        "pure outputs",
        purity <= 1e-9,
        format!("max |1 - tr rho^2| {purity:.2e}"),
    );
    c.sub(
        "strict PE-QFI increase",
        gain > 1e-6,
        format!("min gain {gain:.4e}"),
    );
    c.sub(
        "dephasing QFI preserved",
        pd <= 1e-8,
        format!("max change {pd:.2e}"),
    );

    let amps: Vec<C64> = [0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]
        .iter()
        .map(|&a| C64::new(a, 0.0))
        .collect();
    let rep = scenarios::prop8_case("psi1", &amps, &Params::default()).unwrap();
    let before = rep.values["pe_qfi_before"].as_f64().unwrap();
    let after = rep.values["pe_qfi_after"].as_f64().unwrap();
    let eps = 1.0;
    c.sub(
        "prop8 scenario: PE-QFI 0 -> eps^2",
        before.abs() < 1e-9 && (after - eps * eps).abs() < 1e-9,
        format!("{before:.9} -> {after:.9} (eps = {eps})"),
    );
    c.sub(
        "prop8 scenario: dephasing QFI unchanged under V",
        rep.find("dephasing QFI unchanged under V")
            .is_some_and(|ch| ch.passed),
        "",
    );
    c.finish();
}

fn counterexample_state() -> DensityMatrix {
    let s = FRAC_1_SQRT_2;
    DensityMatrix::new(
        ComplexMatrix::from_real_rows(&[
            &[1.0, s, s, 0.0],
            &[s, 1.0, 0.0, 0.0],
            &[s, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap()
        .scale_real(0.25),
        1e-12,
    )
    .unwrap()
}

/// Two-qubit channel from the generator families: tensor products of
/// single-qubit extreme channels, HDP unitaries, random SHP, and convex
/// mixtures or compositions of those.
fn generated_two_qubit_hdp(r: &mut SeededRng, depth: usize) -> KrausChannel {
    let pick = if depth == 0 {
        r.random_range(0..3)
    } else {
        r.random_range(0..5)
    };
    match pick {
        0 => {
            let mut qubit = || {
                let s = random_bloch(r);
                let t = random_bloch(r);
                let b =
                    BlochVector::from_cylindrical(cone_r_max(&s, t.z), t.phi(), t.z, 1e-9).unwrap();
                extreme_cone_channel(
                    &ConeQuery {
                        source: s,
                        target: b,
                    },
                    1e-12,
                )
                .unwrap()
            };
            qubit().tensor(&qubit())
        }
        1 => {
            let all = enumerate_hdf(2).unwrap();
            let omega: Vec<f64> = (0..4).map(|_| r.random_range(-PI..PI)).collect();
            hdp_unitary(&all[r.random_range(0..all.len())], &omega).unwrap()
        }
        2 => random_shp_with(2, 1 + r.random_range(0..4), r).unwrap(),
        3 => {
            let a = generated_two_qubit_hdp(r, depth - 1);
            let b = generated_two_qubit_hdp(r, depth - 1);
            let t: f64 = r.random();
            KrausChannel::convex_mixture(&[(t, &a), (1.0 - t, &b)]).unwrap()
        }
        _ => {
            let a = generated_two_qubit_hdp(r, depth - 1);
            let b = generated_two_qubit_hdp(r, depth - 1);
            KrausChannel::compose(&a, &b).unwrap()
        }
    }
}

#[test]
fn criterion_13_offdiagonal_bound_counterexample() {
    let mut c = Criterion::new(
        13,
        "off-diagonal bound is not attained on the counterexample",
    );
    let rho = counterexample_state();
    let (cs, sn) = (0.4f64, 0.6f64);
    let mut p = vec![vec![0.0; 4]; 4];
    p[0][0] = cs;
    p[1][1] = cs;
    p[1][2] = cs;
    p[1][0] = sn;
    p[0][1] = sn;
    p[0][2] = sn;
    p[3][3] = 1.0;
    let bound = hdp_offdiag_bound(&rho, 0, 1, &p, 1e-12).unwrap();
    let target = SQRT_2 / 4.0;
    c.sub(
        "bound with optimal p",
        (bound - target).abs() < 1e-12,
        format!("{bound:.15}"),
    );

    let mut r = rng(1313);
    let (mut best, mut hdp_ok) = (0.0f64, true);
    for k in 0..10_000 {
        let ch = generated_two_qubit_hdp(&mut r, 2);
        if k % 500 == 0 {
            hdp_ok &= is_hdp(&ch, CLASSIFY_TOL).verdict == Verdict::Member;
        }
        best = best.max(ch.apply(&rho).unwrap().entry(0, 1).norm());
    }
    c.sub(
        "sampled channels are HDP",
        hdp_ok,
        "every 500th sample classified",
    );
    c.sub(
        "no sample reaches sqrt2/4 - 1e-6",
        best < target - 1e-6,
        format!("best |<0|E(rho)|1>| = {best:.9} vs {target:.9}"),
    );
    c.finish();
}
