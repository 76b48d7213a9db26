use opverify::chain::{homology, random_complex, shift, sphere, tensor, ChainComplex};
use opverify::doldkan::{dk_inverse, dk_round_trip, is_invertible, SimplicialModule};
use opverify::exactlin::{kernel_sparse, q, RatMatrix, Solver};
use opverify::report::{emit_report, parse_report, run_suite, Config, Format};
use opverify::symseq::{compose, free_sigma_seq, invariants, unit_seq, SymSeq};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex(seed: u64, lo: i64, len: i64, dim: usize) -> (ChainComplex, Vec<(i64, usize)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (c, mut e) = random_complex(&mut rng, lo, lo + len, dim);
    e.retain(|x| x.1 > 0);
    (c, e)
}

fn matrix(rows: usize, cols: usize, entries: &[i64]) -> RatMatrix {
    let t = entries.iter().enumerate().filter(|(_, x)| **x != 0).map(|(k, x)| (k / cols, k % cols, q(*x))).collect();
    RatMatrix::new(rows, cols, t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_nullity(rows in 1usize..6, cols in 1usize..6, entries in prop::collection::vec(-3i64..=3, 36)) {
        let m = matrix(rows, cols, &entries[..rows * cols]);
        let k = kernel_sparse(&m);
        prop_assert_eq!(m.rank() + k.len(), cols);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        for v in &k {
            prop_assert!(m.mul_svec(v).is_empty());
        }
    }

    #[test]
    fn solver_finds_preimages(rows in 1usize..6, cols in 1usize..6, entries in prop::collection::vec(-3i64..=3, 36), x in prop::collection::vec(-2i64..=2, 6)) {
        let m = matrix(rows, cols, &entries[..rows * cols]);
        let v: Vec<_> = x[..cols].iter().enumerate().filter(|(_, a)| **a != 0).map(|(i, a)| (i, q(*a))).collect();
        let b = m.mul_svec(&v);
        let s = Solver::new(&m).solve(&b).expect("b lies in the image");
        prop_assert_eq!(m.mul_svec(&s), b);
    }

    #[test]
    fn random_complexes_have_planted_homology(seed in any::<u64>(), lo in -3i64..=3, len in 0i64..=5) {
        let (c, e) = complex(seed, lo, len, 4);
        let d = c.total_d();
        prop_assert!(d.mul(&d).unwrap().is_zero());
        prop_assert_eq!(homology(&c).nonzero(), e.clone());
        let back = ChainComplex::from_text(&c.to_text()).unwrap();
        prop_assert_eq!(homology(&back).nonzero(), e.clone());
        let shifted: Vec<_> = e.iter().map(|(n, k)| (n + 2, *k)).collect();
        prop_assert_eq!(homology(&shift(&c, 2).unwrap()).nonzero(), shifted.clone());
        // Künneth against a sphere
        prop_assert_eq!(homology(&tensor(&c, &sphere(2, 0).unwrap()).unwrap()).nonzero(), shifted);
    }

    #[test]
    fn dold_kan_round_trip(seed in any::<u64>(), len in 0i64..=2) {
        let (c, _) = complex(seed, 0, len, 2);
        let (_, n, f) = dk_round_trip(&c, len as usize + 1).unwrap();
        prop_assert_eq!(n.complex.trimmed().dims(), c.trimmed().dims());
        prop_assert!(is_invertible(&f.total()));
    }

    #[test]
    fn simplicial_text_round_trip(seed in any::<u64>(), len in 0i64..=2) {
        let (c, _) = complex(seed, 0, len, 2);
        let m = dk_inverse(&c, 2).unwrap().module;
        prop_assert_eq!(SimplicialModule::from_text(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn composition_unit_and_text(r in 2usize..=3, which in 0usize..3) {
        let c = [ChainComplex::ground(), sphere(1, 0).unwrap(), opverify::chain::disk(0).unwrap()][which].clone();
        let m = SymSeq::direct_sum(&[unit_seq(3).unwrap(), free_sigma_seq(&c, r, 3).unwrap()]).unwrap();
        let u = unit_seq(3).unwrap();
        prop_assert_eq!(invariants(&compose(&u, &m).unwrap()), invariants(&m));
        prop_assert_eq!(invariants(&compose(&m, &u).unwrap()), invariants(&m));
        prop_assert_eq!(SymSeq::from_text(&m.to_text()).unwrap().dims(), m.dims());
    }

    #[test]
    fn config_round_trip(arity in 2usize..=5, lo in -4i64..=4, w in 0i64..6, s in 0usize..=4, seed in any::<u64>()) {
        let text = format!("arity = {arity}\nwindow = {lo}, {}\nsmax = {s}\nstages = 1, 3, 5\nseed = {seed}\n", lo + w);
        let c = Config::from_text(&text).unwrap();
        prop_assert_eq!(c, Config { arity, window: (lo, lo + w), s_max: s, stages: vec![1, 3, 5], seed });
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn reports_round_trip_through_json(seed in any::<u64>()) {
        let cfg = Config { seed, ..Config::default() };
        let r = run_suite("symseq", &cfg).unwrap();
        let text = emit_report(&r, Format::Json);
        prop_assert_eq!(parse_report(&text).unwrap(), r.clone());
        prop_assert_eq!(emit_report(&run_suite("symseq", &cfg).unwrap(), Format::Json), text);
    }
}
