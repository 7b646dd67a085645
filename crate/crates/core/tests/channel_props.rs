use deqfi_core::channels::{channels_equal, pd_channel, KrausChannel};
use deqfi_core::classify::{is_hdp, Verdict, CLASSIFY_TOL};
use deqfi_core::linalg::herm_eigen;
use deqfi_core::random::{random_channel, random_state, remix_kraus, rng};
use deqfi_core::transform::random_shp_with;
use proptest::prelude::*;

fn commutes_with_pd(ch: &KrausChannel, theta: f64) -> f64 {
    let pd = pd_channel(ch.n_qubits(), theta).unwrap();
    let a = KrausChannel::compose(ch, &pd).unwrap();
    let b = KrausChannel::compose(&pd, ch).unwrap();
    a.choi().distance(&b.choi())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outputs_are_states(seed in any::<u64>(), n in 1usize..=2, l in 1usize..=4) {
        let mut r = rng(seed);
        let ch = random_channel(n, l, &mut r);
        let rho = random_state(n, &mut r);
        let out = ch.apply(&rho).unwrap();
        prop_assert!((out.mat().trace().re - 1.0).abs() < 1e-9);
        prop_assert!(herm_eigen(out.mat(), 1e-9).unwrap().min_value() > -1e-9);
    }

    #[test]
    fn choi_is_linear_in_the_channel(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let a = random_channel(2, 2, &mut r);
        let b = random_channel(2, 3, &mut r);
        let mix = KrausChannel::convex_mixture(&[(p, &a), (1.0 - p, &b)]).unwrap();
        let expect = &a.choi().mat().scale_real(p) + &b.choi().mat().scale_real(1.0 - p);
        prop_assert!((mix.choi().mat() - &expect).max_abs() < 1e-12);
    }

    #[test]
    fn pd_is_a_semigroup(theta in 0.0f64..2.0, tau in 0.0f64..2.0, n in 1usize..=3) {
        let a = pd_channel(n, theta).unwrap();
        let b = pd_channel(n, tau).unwrap();
        let ab = KrausChannel::compose(&a, &b).unwrap();
        prop_assert!(channels_equal(&ab, &pd_channel(n, theta + tau).unwrap(), 1e-9));
    }

    #[test]
    fn isometric_remixing_preserves_the_channel(seed in any::<u64>(), extra in 0usize..3) {
        let mut r = rng(seed);
        let ch = random_channel(2, 3, &mut r);
        prop_assert!(channels_equal(&ch, &remix_kraus(&ch, extra, &mut r), 1e-9));
    }
}

#[test]
fn commutation_with_pd_characterizes_hdp() {
    for n in 1..=2usize {
        let mut r = rng(1000 + n as u64);
        let mut seen = [0usize; 2];
        for k in 0..200 {
            let ch = match k % 4 {
                0 => random_channel(n, 1 + k % 3, &mut r),
                1 => random_shp_with(n, 1 + k % 4, &mut r).unwrap(),
                2 => {
                    let s = random_shp_with(n, 2, &mut r).unwrap();
                    remix_kraus(&s, 1, &mut r)
                }
                _ => {
                    let s = random_shp_with(n, 3, &mut r).unwrap();
                    let g = random_channel(n, 2, &mut r);
                    KrausChannel::convex_mixture(&[(0.5, &s), (0.5, &g)]).unwrap()
                }
            };
            let hdp = is_hdp(&ch, CLASSIFY_TOL).verdict == Verdict::Member;
            seen[hdp as usize] += 1;
            for theta in [0.3, 1.0] {
                let dist = commutes_with_pd(&ch, theta);
                if hdp {
                    assert!(dist <= 1e-9, "n={n} k={k} θ={theta}: {dist}");
                } else {
                    assert!(dist > 1e-6, "n={n} k={k} θ={theta}: {dist}");
                }
            }
        }
        assert!(seen[0] > 50 && seen[1] > 50, "{seen:?}");
    }
}
