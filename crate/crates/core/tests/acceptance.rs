//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the numbers listed in `EXPECTED_FAIL` are known negative results and are
//! reported as FAIL rather than hidden.

use opverify::barcobar::{arity_verdicts, bar, bar_cobar, cobar};
use opverify::chain::{direct_sum, disk, homology, random_complex, sphere, ChainComplex};
use opverify::coalg::{coextend, gamma_factorization, sk0_coalgebra, truncated_polynomial, FilteredCoalgebra, Verdict};
use opverify::doldkan::{composite_comparison, dk_inverse, dk_round_trip, is_invertible, lax_associativity, transfer_checks, CofibrantOperad, SimplicialModule};
use opverify::exactlin::{q, RatMatrix};
use opverify::frame::{eta_report, frame_decomposition_check, CosimplicialFrame};
use opverify::operad::{commutative_operad, free_binary, Operad};
use opverify::oprealize::{theorem_a, SimplicialOperad};
use opverify::report::{emit_report, generating_maps, run_suite, Config, Format};
use opverify::resolution::augmentation_check;
use opverify::symseq::{compose, free_sigma_seq, invariants, pushout_product_check, unit_seq, SymSeq};
use opverify::chain::ChainMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::io::Write;

const EXPECTED_FAIL: [usize; 2] = [9, 11];

type Outcome = (bool, String);

/// Set partitions of `items`.
fn partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
        let mut q = p.clone();
        q.insert(0, vec![first]);
        out.push(q);
    }
    out
}

/// Rooted trees with leaves labelled by `leaves`, vertices of valence ≥ 2
/// decorated by a graded module: (vertex count, degree) → dimension.
fn tree_dims(leaves: &[usize], gens: &dyn Fn(usize) -> Vec<(i64, usize)>) -> BTreeMap<(usize, i64), usize> {
    let mut out = BTreeMap::new();
    if leaves.len() == 1 {
        out.insert((0, 0), 1);
        return out;
    }
    for p in partitions(leaves) {
        if p.len() < 2 {
            continue;
        }
        let mut acc: BTreeMap<(usize, i64), usize> = gens(p.len()).into_iter().map(|(d, k)| ((1, d), k)).collect();
        for block in &p {
            let sub = tree_dims(block, gens);
            let mut next = BTreeMap::new();
            for ((u, d), k) in &acc {
                for ((u2, d2), k2) in &sub {
                    *next.entry((u + u2, d + d2)).or_insert(0) += k * k2;
                }
            }
            acc = next;
        }
        for (key, k) in acc {
            *out.entry(key).or_insert(0) += k;
        }
    }
    out.retain(|_, k| *k > 0);
    out
}

fn c1_chain_complexes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..100 {
        let lo = rng.gen_range(-3..=3);
        let hi = lo + rng.gen_range(0..=5);
        let (c, mut expected) = random_complex(&mut rng, lo, hi, 5);
        expected.retain(|x| x.1 > 0);
        let d = c.total_d();
        if !d.mul(&d).unwrap().is_zero() {
            return (false, format!("d² ≠ 0 on complex {k}"));
        }
        let h = homology(&c).nonzero();
        let euler: i64 = c.degrees().map(|n| (-1i64).pow(n.rem_euclid(2) as u32) * c.dim(n) as i64).sum();
        let alt: i64 = h.iter().map(|(n, x)| (-1i64).pow(n.rem_euclid(2) as u32) * *x as i64).sum();
        // rank-nullity oracle, degree by degree
        let ranks: BTreeMap<i64, usize> = c.degrees().map(|n| (n, c.d(n).rank())).collect();
        let betti: Vec<(i64, usize)> = c
            .degrees()
            .map(|n| (n, c.dim(n) - ranks[&n] - ranks.get(&(n + 1)).copied().unwrap_or(0)))
            .filter(|x| x.1 > 0)
            .collect();
        if euler != alt || h != expected || h != betti {
            return (false, format!("complex {k}: homology {h:?}, expected {expected:?}"));
        }
    }
    for n in 0..=4 {
        if !homology(&disk(n).unwrap()).nonzero().is_empty() {
            return (false, format!("H(D({n})) ≠ 0"));
        }
    }
    (true, "100 random complexes and D(0..4)".into())
}

fn c2_cofree_coalgebras() -> Outcome {
    let vs = [
        ("D0", disk(0).unwrap()),
        ("D1", disk(1).unwrap()),
        ("D2", disk(2).unwrap()),
        ("D0+D1", direct_sum(&[disk(0).unwrap(), disk(1).unwrap()]).unwrap()),
    ];
    for (name, v) in &vs {
        let z = v.trimmed().dim(0);
        let fc = FilteredCoalgebra::build(v, &[1, 2, 4, 6], &[vec![q(0); z]]).unwrap();
        for st in &fc.stages {
            if let Err(e) = st.coalgebra.check_axioms() {
                return (false, format!("{name} order {}: {e}", st.order));
            }
        }
        let r = fc.report().unwrap();
        if r.verdict != Verdict::Pass || r.eventual_ranks.first() != Some(&vec![(0, 1)]) {
            return (false, format!("{name}: {r:?}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let d0 = disk(0).unwrap();
    let mut count = 0;
    for n in 0..=4usize {
        for _ in 0..5 {
            let c = sk0_coalgebra(n);
            let vals: Vec<i64> = (0..=n).map(|_| rng.gen_range(-4..=4)).collect();
            let m = RatMatrix::from_i64(&[&vals]);
            let f = ChainMap::from_fn(&c.complex, &d0, 0, |k| if k == 0 { m.clone() } else { RatMatrix::zero(d0.dim(k), 0) }).unwrap();
            let r = coextend(&f, &c, 6).unwrap();
            // the coextension lifts f
            if r.solution_kernel != 0 || r.stage.pi.mul(&r.map).unwrap() != f.total() {
                return (false, format!("coextension of {vals:?} not unique or not a lift"));
            }
            count += 1;
        }
    }
    (true, format!("4 complexes at orders 1,2,4,6; {count} unique coextensions"))
}

fn c3_gamma() -> Outcome {
    let mut count = 0;
    for n in 1..=4usize {
        for m in 1..=n {
            for c in [0i64, 1, 2, -3] {
                let s = truncated_polynomial(n);
                let a = truncated_polynomial(m);
                let f = RatMatrix::new(m, n, (0..m).map(|j| (j, j, q(c.pow(j as u32)))).collect()).unwrap();
                let g = gamma_factorization(&s, &a, &f).unwrap();
                if !(g.gamma_gamma_prime && g.gamma_prime_gamma) {
                    return (false, format!("x ↦ {c}x from degree {n} to {m}"));
                }
                count += 1;
            }
        }
    }
    (count >= 10, format!("{count} instances"))
}

fn small_seq(rng: &mut ChaCha8Rng) -> SymSeq {
    let mut parts = vec![unit_seq(4).unwrap()];
    for _ in 0..rng.gen_range(1..=2) {
        let r = rng.gen_range(2..=3);
        let c = [ChainComplex::ground(), sphere(1, 0).unwrap(), disk(0).unwrap()][rng.gen_range(0..3)].clone();
        parts.push(if rng.gen_bool(0.5) { SymSeq::concentrated(r, &c, 4, rng.gen_bool(0.5)).unwrap() } else { free_sigma_seq(&c, r, 4).unwrap() });
    }
    SymSeq::direct_sum(&parts).unwrap()
}

fn c4_composition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let u = unit_seq(4).unwrap();
    for _ in 0..5 {
        let m = small_seq(&mut rng);
        if invariants(&compose(&u, &m).unwrap()) != invariants(&m) || invariants(&compose(&m, &u).unwrap()) != invariants(&m) {
            return (false, "unit law".into());
        }
    }
    for k in 0..10 {
        let (x, y, z) = (small_seq(&mut rng), small_seq(&mut rng), small_seq(&mut rng));
        let l = invariants(&compose(&compose(&x, &y).unwrap(), &z).unwrap());
        let r = invariants(&compose(&x, &compose(&y, &z).unwrap()).unwrap());
        if l != r {
            return (false, format!("associativity on triple {k}"));
        }
    }
    // orbit oracle: partitions of [3] into blocks of size in supp(n), block count in supp(m)
    let orbit = |sizes: &[usize], counts: &[usize]| {
        partitions(&[0, 1, 2]).into_iter().filter(|p| counts.contains(&p.len()) && p.iter().all(|b| sizes.contains(&b.len()))).count()
    };
    let two = SymSeq::concentrated(2, &ChainComplex::ground(), 3, false).unwrap();
    let m = SymSeq::direct_sum(&[unit_seq(3).unwrap(), two.clone()]).unwrap();
    let with = compose(&m, &m).unwrap().arity(3).total_dim();
    let without = compose(&two, &two).unwrap().arity(3).total_dim();
    let (ow, oo) = (orbit(&[1, 2], &[1, 2]), orbit(&[2], &[2]));
    (with == ow && without == oo && ow == 3, format!("(m∘m)(3) = {with} (oracle {ow}), without unit {without} (oracle {oo})"))
}

fn c5_pushout_product() -> Outcome {
    let gens = generating_maps(3).unwrap();
    let mut n = 0;
    for (ni, i, ia) in &gens {
        for (nj, j, ja) in &gens {
            let rep = pushout_product_check(i, j, 3).unwrap();
            if !rep.arities.iter().all(|a| a.injective) {
                return (false, format!("{ni} □ {nj} not injective"));
            }
            if (*ia || *ja) && !rep.arities.iter().all(|a| a.cokernel_acyclic == Some(true)) {
                return (false, format!("{ni} □ {nj} cokernel not acyclic"));
            }
            n += 1;
        }
    }
    (true, format!("{n} pairs"))
}

fn c6_free_operad() -> Outcome {
    let f = free_binary(5).unwrap();
    if let Err(e) = f.operad.check() {
        return (false, e.to_string());
    }
    let one = |k: usize| if k == 2 { vec![(0, 1)] } else { Vec::new() };
    for r in 2..=5 {
        let leaves: Vec<usize> = (0..r).collect();
        let trees: usize = tree_dims(&leaves, &one).values().sum();
        let dfact: usize = (1..r).map(|k| 2 * k - 1).product();
        if f.operad.dim(r) != trees || trees != dfact {
            return (false, format!("arity {r}: {} vs {trees} trees vs {dfact}", f.operad.dim(r)));
        }
    }
    (true, "dims 1, 3, 15, 105".into())
}

fn c7_cobar_filtration() -> Outcome {
    let f = free_binary(4).unwrap();
    let b = bar(&f.operad).unwrap();
    let c = cobar(&b.cooperad).unwrap();
    let rep = c.filtration_report();
    let qbar = b.cooperad.seq().clone();
    let gens = |k: usize| if k >= 2 { qbar.arity(k).dims().into_iter().map(|(d, n)| (d - 1, n)).collect() } else { Vec::new() };
    let oracle = tree_dims(&[0, 1, 2, 3], &gens);
    let mut found = BTreeMap::new();
    for l in rep.levels.iter().filter(|l| l.arity == 4) {
        for (d, n) in &l.dims {
            if *n > 0 {
                found.insert((l.level, *d), *n);
            }
        }
    }
    let ok = rep.raises_vertex_count && rep.filtered && found == oracle;
    (ok, format!("{} graded pieces in arity 4", found.len()))
}

fn c8_bar_cobar() -> Outcome {
    for (name, p) in [("F(μ)", free_binary(4).unwrap().operad), ("Com", commutative_operad(4).unwrap().operad)] {
        let r = bar_cobar(&p).unwrap();
        let v = arity_verdicts(&r.counit, 4).unwrap();
        let inside = v.iter().all(|a| a.source_homology.iter().all(|(d, _)| (0..=8).contains(d)));
        if !inside || !v.iter().all(|a| a.quasi_iso) {
            return (false, format!("{name}: {v:?}"));
        }
    }
    (true, "F(μ) and Com, arity ≤ 4".into())
}

fn c9_frame() -> Outcome {
    let f = CosimplicialFrame::build(2, 1).unwrap();
    let ids = f.check().is_ok();
    let phi = (0..=2).all(|n| frame_decomposition_check(&f, n).unwrap());
    let eta = eta_report(1, &[1, 2, 4, 6]).unwrap();
    let detail = format!("identities {ids}, Φ/Ψ inverse {phi}, η verdict {} with stage homology {:?}", eta.verdict, eta.level_one.stage_homology.last());
    (ids && phi && eta.verdict == Verdict::Pass, detail)
}

fn c10_theorem_a() -> Outcome {
    let inputs: Vec<(&str, Operad)> = vec![
        ("F(μ)", free_binary(3).unwrap().operad),
        ("B^cB(Com)", bar_cobar(&commutative_operad(3).unwrap().operad).unwrap().cobar.operad),
    ];
    for (name, p) in inputs {
        for r in 2..=3 {
            let expected = homology(p.seq().arity(r)).nonzero();
            let t = theorem_a(&SimplicialOperad::constant(&p, 2), r, &[1, 2, 4, 6]).unwrap();
            for st in &t.stages {
                if st.verdict() != Verdict::Pass || st.trees.iter().any(|x| x.verdict != Verdict::Pass) || st.lhs_homology != expected {
                    return (false, format!("{name} arity {r} order {}", st.order));
                }
            }
            if t.verdict != Verdict::Pass || t.stages.is_empty() {
                return (false, format!("{name} arity {r}: {}", t.verdict));
            }
        }
    }
    (true, "F(μ) and B^cB(Com), r ≤ 3, s = 2".into())
}

fn c11_augmentation() -> Outcome {
    let f = free_binary(3).unwrap();
    let rep = augmentation_check(&f.operad, 3, 2, &[1, 2, 4, 6]).unwrap();
    let detail = format!("chain-level {}, operadic {}", rep.chain_verdict, rep.operadic_verdict);
    (rep.chain_verdict == Verdict::Pass && rep.operadic_verdict == Verdict::Pass, detail)
}

fn c12_dold_kan() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for k in 0..50 {
        let hi = rng.gen_range(0..=3);
        let (c, _) = random_complex(&mut rng, 0, hi, 3);
        let (_, n, f) = dk_round_trip(&c, hi as usize + 1).unwrap();
        if n.complex.trimmed().dims() != c.trimmed().dims() || !is_invertible(&f.total()) {
            return (false, format!("round trip on complex {k}"));
        }
    }
    let pool = [
        dk_inverse(&disk(0).unwrap(), 3).unwrap().module,
        dk_inverse(&sphere(1, 0).unwrap(), 3).unwrap().module,
        SimplicialModule::constant(2, 3),
    ];
    for k in 0..10 {
        let (x, y, z) = (k % 3, (k / 3) % 3, (k + 1) % 3);
        if !lax_associativity(&pool[x], &pool[y], &pool[z]).unwrap() {
            return (false, format!("lax associativity on triple {k}"));
        }
    }
    let b = SymSeq::direct_sum(&[unit_seq(4).unwrap(), free_sigma_seq(&sphere(1, 0).unwrap(), 2, 4).unwrap()]).unwrap();
    let a = free_sigma_seq(&ChainComplex::ground(), 2, 4).unwrap();
    let rows = composite_comparison(&a, &b, 4, 4).unwrap();
    let nontrivial = rows.iter().any(|r| !r.check.source.is_empty());
    let ok = rows.iter().all(|r| r.check.verdict == Verdict::Pass) && nontrivial && rows.iter().map(|r| r.arity).max() == Some(4);
    (ok, "50 round trips, 10 triples, composite comparison up to arity 4".into())
}

fn c13_transfer() -> Outcome {
    let free = transfer_checks(&CofibrantOperad::Free(free_binary(3).unwrap()), None, 2).unwrap();
    if !free.generators.levelwise_iso || free.unit_verdict != Verdict::Pass || free.counit_verdict != Verdict::Pass {
        return (false, "free operad".into());
    }
    for (name, p) in [("F(μ)", free_binary(3).unwrap().operad), ("Com", commutative_operad(3).unwrap().operad)] {
        let cp = CofibrantOperad::BarCobar(bar_cobar(&p).unwrap());
        let rep = transfer_checks(&cp, None, 2).unwrap();
        let gens_ok = rep.generators.arities.iter().all(|r| r.check.verdict == Verdict::Pass);
        if !gens_ok || rep.unit_verdict != Verdict::Pass || rep.counit_verdict != Verdict::Pass {
            return (false, format!("B^cB({name})"));
        }
    }
    (true, "exact on F(μ); quasi-iso, unit and counit on B^cB(F(μ)), B^cB(Com)".into())
}

fn c14_determinism() -> Outcome {
    let cfg = Config::default();
    let a = run_suite("all", &cfg).unwrap();
    let b = run_suite("all", &cfg).unwrap();
    let (ja, jb) = (emit_report(&a, Format::Json), emit_report(&b, Format::Json));
    let same = ja == jb && emit_report(&a, Format::Markdown) == emit_report(&b, Format::Markdown);
    (same && a.suites.len() >= 8, format!("{} sub-suites, {} bytes", a.suites.len(), ja.len()))
}

#[test]
fn acceptance() {
    let criteria: Vec<(usize, &str, fn() -> Outcome)> = vec![
        (1, "chain complexes and exact homology", c1_chain_complexes),
        (2, "cofree coalgebra stages", c2_cofree_coalgebras),
        (3, "finite stage factorizations", c3_gamma),
        (4, "composition product", c4_composition),
        (5, "pushout-product", c5_pushout_product),
        (6, "free operad dimensions", c6_free_operad),
        (7, "cobar vertex filtration", c7_cobar_filtration),
        (8, "bar-cobar resolution", c8_bar_cobar),
        (9, "cosimplicial frame", c9_frame),
        (10, "realization of constant operads", c10_theorem_a),
        (11, "augmentation of the resolution", c11_augmentation),
        (12, "Dold-Kan and the lifted composite", c12_dold_kan),
        (13, "transferred adjunction", c13_transfer),
        (14, "deterministic reports", c14_determinism),
    ];
    let mut unexpected = Vec::new();
    for (n, name, f) in criteria {
        let (ok, detail) = f();
        // straight to the handle so the lines survive libtest's capture
        let _ = writeln!(std::io::stderr(), "{} criterion {n:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok && !EXPECTED_FAIL.contains(&n) {
            unexpected.push(n);
        }
    }
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}

#[test]
fn known_failures_keep_their_attainable_parts() {
    // frame identities and Φ/Ψ hold even though η does not
    let f = CosimplicialFrame::build(2, 1).unwrap();
    assert!(f.check().is_ok());
    assert!((0..=2).all(|n| frame_decomposition_check(&f, n).unwrap()));
    // the chain-level augmentation holds even though the operadic one does not
    let rep = augmentation_check(&free_binary(3).unwrap().operad, 3, 2, &[1, 2]).unwrap();
    assert_eq!(rep.chain_verdict, Verdict::Pass);
    assert_eq!(rep.operadic_verdict, Verdict::Fail);
}
