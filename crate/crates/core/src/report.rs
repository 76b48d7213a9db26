//! Verification suites, reports and their serialized forms.

use crate::barcobar::{arity_verdicts, bar, bar_cobar, ArityVerdict};
use crate::chain::{disk, homology, random_complex, sphere, ChainComplex, ChainMap};
use crate::coalg::{coextend, gamma_factorization, FilteredCoalgebra, sk0_coalgebra, truncated_polynomial, Verdict};
use crate::doldkan::{composite_comparison, dk_round_trip, lax_associativity, transfer_checks, CofibrantOperad, SimplicialModule};
use crate::error::{usage, Error, Result};
use crate::exactlin::{q, RatMatrix};
use crate::frame::{eta_report, frame_decomposition_check, CosimplicialFrame};
use crate::operad::{commutative_operad, free_binary, Operad};
use crate::oprealize::{theorem_a, SimplicialOperad};
use crate::resolution::augmentation_check;
use crate::symseq::{compose, factorial, free_sigma_seq, invariants, sum_embeddings, pushout_product_check, unit_seq, SymSeq, SymSeqMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const SUITES: [&str; 7] = ["coalgebra", "symseq", "operad", "barcobar", "theorem-a", "resolution", "transfer"];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Config {
    pub arity: usize,
    pub window: (i64, i64),
    pub s_max: usize,
    pub stages: Vec<u32>,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config { arity: 4, window: (0, 8), s_max: 2, stages: vec![1, 2, 4, 6], seed: 0 }
    }
}

impl Config {
    /// key = value lines; keys arity, window, smax, stages, seed.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Config::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Usage(format!("config line without '=': {line}")))?;
            c.set(k.trim(), v.trim())?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::Usage(format!("bad value for {key}: {value}"));
        match key {
            "arity" => self.arity = value.parse().map_err(|_| bad())?,
            "window" => {
                let (a, b) = value.split_once(',').ok_or_else(bad)?;
                self.window = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            }
            "smax" | "s_max" => self.s_max = value.parse().map_err(|_| bad())?,
            "stages" => self.stages = value.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?,
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            _ => return usage(format!("unknown config key {key}")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=5).contains(&self.arity) {
            return usage("arity bound must lie in 2..=5");
        }
        if self.window.0 > self.window.1 {
            return usage("empty degree window");
        }
        if self.s_max > 4 {
            return usage("s_max must be at most 4");
        }
        if self.stages.is_empty() || self.stages.windows(2).any(|w| w[0] >= w[1]) || self.stages[0] == 0 {
            return usage("stages must be a nonempty increasing list of positive orders");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Params {
    pub arity: usize,
    pub window: (i64, i64),
    pub s_max: usize,
    pub stages: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HomologyTable {
    pub label: String,
    pub dims: Vec<(i64, usize)>,
}

/// Smallest evidence of a failure.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Witness {
    pub degree: Option<i64>,
    pub expected: Option<usize>,
    pub found: Option<usize>,
    pub note: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub params: Params,
    pub verdict: Verdict,
    pub homology: Vec<HomologyTable>,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VerificationReport {
    pub suite: String,
    pub config: Config,
    pub verdict: Verdict,
    pub suites: Vec<SuiteReport>,
}

/// FAIL dominates, then INCONCLUSIVE.
pub fn combine(vs: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::Pass;
    for v in vs {
        match v {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Inconclusive => out = Verdict::Inconclusive,
            Verdict::Pass => {}
        }
    }
    out
}

pub fn verdict_of(ok: bool) -> Verdict {
    if ok { Verdict::Pass } else { Verdict::Fail }
}

impl VerificationReport {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 3,
        }
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.suites.iter().flat_map(|s| s.checks.iter())
    }
}

struct Builder<'a> {
    cfg: &'a Config,
    checks: Vec<Check>,
}

impl<'a> Builder<'a> {
    fn params(&self, arity: usize) -> Params {
        Params { arity, window: self.cfg.window, s_max: self.cfg.s_max, stages: self.cfg.stages.clone() }
    }

    fn push(&mut self, name: &str, anchor: &str, arity: usize, verdict: Verdict, homology: Vec<HomologyTable>, witness: Option<Witness>, notes: Vec<String>) {
        let witness = if verdict == Verdict::Fail && witness.is_none() {
            Some(Witness { degree: None, expected: None, found: None, note: "check returned false".into() })
        } else if verdict == Verdict::Pass {
            None
        } else {
            witness
        };
        self.checks.push(Check { name: name.into(), anchor: anchor.into(), params: self.params(arity), verdict, homology, witness, notes });
    }

    /// A check that is a single boolean, with an error turned into FAIL.
    fn boolean(&mut self, name: &str, anchor: &str, arity: usize, r: Result<(bool, Vec<String>)>) {
        match r {
            Ok((ok, notes)) => self.push(name, anchor, arity, verdict_of(ok), Vec::new(), None, notes),
            Err(e) => self.error(name, anchor, arity, e),
        }
    }

    fn error(&mut self, name: &str, anchor: &str, arity: usize, e: Error) {
        let w = Witness { degree: None, expected: None, found: None, note: e.to_string() };
        self.push(name, anchor, arity, Verdict::Fail, Vec::new(), Some(w), Vec::new());
    }

    fn finish(mut self, suite: &str) -> SuiteReport {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        SuiteReport { suite: suite.into(), verdict: combine(self.checks.iter().map(|c| c.verdict)), checks: self.checks }
    }
}

fn table(label: impl Into<String>, dims: Vec<(i64, usize)>) -> HomologyTable {
    HomologyTable { label: label.into(), dims }
}

/// First degree where two homology tables differ.
pub fn homology_witness(expected: &[(i64, usize)], found: &[(i64, usize)]) -> Option<Witness> {
    let get = |t: &[(i64, usize)], n: i64| t.iter().find(|x| x.0 == n).map(|x| x.1).unwrap_or(0);
    let mut degs: Vec<i64> = expected.iter().chain(found).map(|x| x.0).collect();
    degs.sort();
    degs.dedup();
    degs.into_iter().find(|n| get(expected, *n) != get(found, *n)).map(|n| Witness {
        degree: Some(n),
        expected: Some(get(expected, n)),
        found: Some(get(found, n)),
        note: "homology rank mismatch".into(),
    })
}

fn arity_tables(v: &[ArityVerdict]) -> (Vec<HomologyTable>, Option<Witness>) {
    let mut t = Vec::new();
    let mut w = None;
    for a in v {
        t.push(table(format!("source arity {}", a.arity), a.source_homology.clone()));
        t.push(table(format!("target arity {}", a.arity), a.target_homology.clone()));
        if !a.quasi_iso && w.is_none() {
            w = homology_witness(&a.target_homology, &a.source_homology).or(Some(Witness {
                degree: None,
                expected: None,
                found: None,
                note: format!("induced map not an isomorphism in arity {}", a.arity),
            }));
        }
    }
    (t, w)
}

pub fn run_suite(id: &str, cfg: &Config) -> Result<VerificationReport> {
    cfg.validate()?;
    let ids: Vec<&str> = match id {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        _ => return usage(format!("unknown suite {id}; expected one of {} or all", SUITES.join(", "))),
    };
    let mut suites = Vec::new();
    for s in ids {
        match s {
            "coalgebra" => suites.push(coalgebra_suite(cfg)),
            "symseq" => suites.push(symseq_suite(cfg)),
            "operad" => suites.push(operad_suite(cfg)),
            "barcobar" => suites.extend(barcobar_suite(cfg)),
            "theorem-a" => suites.push(theorem_a_suite(cfg)),
            "resolution" => suites.push(resolution_suite(cfg)),
            _ => suites.extend(transfer_suite(cfg)),
        }
    }
    let verdict = combine(suites.iter().map(|s| s.verdict));
    Ok(VerificationReport { suite: id.into(), config: cfg.clone(), verdict, suites })
}

fn coalgebra_suite(cfg: &Config) -> SuiteReport {
    let mut b = Builder { cfg, checks: Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // exact kernel on random complexes with known homology
    let mut bad = None;
    for k in 0..100 {
        let lo = rng.gen_range(-2..=1);
        let hi = lo + rng.gen_range(0..=5);
        let (c, mut expected) = random_complex(&mut rng, lo, hi, 5);
        expected.retain(|x| x.1 > 0);
        let d = c.total_d();
        let h = homology(&c).nonzero();
        let euler: i64 = c.degrees().map(|n| if n % 2 == 0 { c.dim(n) as i64 } else { -(c.dim(n) as i64) }).sum();
        let alt: i64 = h.iter().map(|(n, x)| if n % 2 == 0 { *x as i64 } else { -(*x as i64) }).sum();
        let ok = d.mul(&d).map(|m| m.is_zero()).unwrap_or(false) && euler == alt && h == expected;
        if !ok && bad.is_none() {
            bad = homology_witness(&expected, &h).map(|mut w| {
                w.note = format!("random complex {k}");
                w
            });
        }
    }
    let disks_ok = (0..=4).all(|n| disk(n).map(|d| homology(&d).nonzero().is_empty()).unwrap_or(false));
    b.push("chain.random_complexes", "exact homology kernel", 0, verdict_of(bad.is_none() && disks_ok), Vec::new(), bad, vec!["100 complexes, window ≤ 6, dims ≤ 5; H(D(n)) = 0 for n ≤ 4".into()]);
    // contractibility of cofree stages
    let cases: Vec<(&str, Result<ChainComplex>)> = vec![
        ("D0", disk(0)),
        ("D1", disk(1)),
        ("D2", disk(2)),
        ("D0+D1", disk(0).and_then(|a| crate::chain::direct_sum(&[a, disk(1)?]))),
    ];
    for (name, v) in cases {
        let check = format!("coalg.contractible.{name}");
        let run = v.and_then(|v| {
            let z = v.trimmed().dim(0);
            let fc = FilteredCoalgebra::build(&v, &cfg.stages, &[vec![q(0); z]])?;
            for st in &fc.stages {
                st.coalgebra.check_axioms()?;
            }
            fc.report()
        });
        match run {
            Ok(r) => {
                let tables = r.stage_homology.iter().zip(&r.orders).map(|(h, o)| table(format!("stage {o}"), h.clone())).collect();
                let w = r.eventual_ranks.last().and_then(|e| homology_witness(&[(0, 1)], e));
                b.push(&check, "the cofree coalgebra on a contractible complex is contractible", 0, r.verdict, tables, w, Vec::new());
            }
            Err(e) => b.error(&check, "the cofree coalgebra on a contractible complex is contractible", 0, e),
        }
    }
    // unique coextensions
    let res = (|| -> Result<(bool, Vec<String>)> {
        let d0 = disk(0)?;
        let mut count = 0;
        let mut ok = true;
        for n in 0..=3usize {
            for _ in 0..5 {
                let c = sk0_coalgebra(n);
                let vals: Vec<i64> = (0..=n).map(|_| rng.gen_range(-3..=3)).collect();
                let row: Vec<&[i64]> = vec![&vals];
                let m = RatMatrix::from_i64(&row);
                let f = ChainMap::from_fn(&c.complex, &d0, 0, |k| if k == 0 { m.clone() } else { RatMatrix::zero(d0.dim(k), 0) })?;
                let r = coextend(&f, &c, *cfg.stages.last().unwrap_or(&4))?;
                ok &= r.solution_kernel == 0;
                count += 1;
            }
        }
        Ok((ok, vec![format!("{count} instances, unique solution each")]))
    })();
    b.boolean("coalg.coextend_unique", "coextension through the cofree coalgebra exists and is unique", 0, res);
    // Γ Γ' round trips
    let res = (|| -> Result<(bool, Vec<String>)> {
        let mut ok = true;
        let mut count = 0;
        for n in 1..=4usize {
            for m in 1..=n {
                for c in [0i64, 1, 2, -1] {
                    let s = truncated_polynomial(n);
                    let a = truncated_polynomial(m);
                    let f = RatMatrix::new(m, n, (0..m).map(|j| (j, j, q(c.pow(j as u32)))).collect())?;
                    let g = gamma_factorization(&s, &a, &f)?;
                    ok &= g.gamma_gamma_prime && g.gamma_prime_gamma;
                    count += 1;
                }
            }
        }
        Ok((ok, vec![format!("{count} algebra maps between truncated polynomial algebras")]))
    })();
    b.boolean("coalg.gamma_round_trips", "maps out of a finite stage factor through their image", 0, res);
    b.finish("coalgebra")
}

fn random_symseq(rng: &mut ChaCha8Rng, bound: usize) -> Result<SymSeq> {
    let mut parts = Vec::new();
    if rng.gen_bool(0.7) {
        parts.push(unit_seq(bound)?);
    }
    let pool = rng.gen_range(1..=2);
    for _ in 0..pool {
        let r = rng.gen_range(2..=3.min(bound));
        let c = match rng.gen_range(0..3) {
            0 => ChainComplex::ground(),
            1 => sphere(1, 0)?,
            _ => disk(0)?,
        };
        parts.push(match rng.gen_range(0..3) {
            0 => SymSeq::concentrated(r, &c, bound, false)?,
            1 => SymSeq::concentrated(r, &c, bound, true)?,
            _ => free_sigma_seq(&c, r, bound)?,
        });
    }
    SymSeq::direct_sum(&parts)
}

fn symseq_suite(cfg: &Config) -> SuiteReport {
    let mut b = Builder { cfg, checks: Vec::new() };
    let bound = cfg.arity.min(4);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let res = (|| -> Result<(bool, Vec<String>)> {
        let u = unit_seq(bound)?;
        let mut ok = true;
        for _ in 0..5 {
            let m = random_symseq(&mut rng, bound)?;
            ok &= invariants(&compose(&u, &m)?) == invariants(&m) && invariants(&compose(&m, &u)?) == invariants(&m);
        }
        Ok((ok, vec!["invariants of 𝕀∘m and m∘𝕀 equal those of m on 5 random m".into()]))
    })();
    b.boolean("symseq.unit_laws", "unit of the composition product", bound, res);
    let res = (|| -> Result<(bool, Vec<String>)> {
        let mut ok = true;
        for _ in 0..10 {
            let (x, y, z) = (random_symseq(&mut rng, bound)?, random_symseq(&mut rng, bound)?, random_symseq(&mut rng, bound)?);
            ok &= invariants(&compose(&compose(&x, &y)?, &z)?) == invariants(&compose(&x, &compose(&y, &z)?)?);
        }
        Ok((ok, vec!["dimensions, differential ranks, characters and homology agree on 10 random triples".into()]))
    })();
    b.boolean("symseq.associativity", "associativity of the composition product", bound, res);
    let res = (|| -> Result<(bool, Vec<String>)> {
        let m = SymSeq::direct_sum(&[unit_seq(3)?, SymSeq::concentrated(2, &ChainComplex::ground(), 3, false)?])?;
        let with_unit = compose(&m, &m)?.arity(3).total_dim();
        let bare = SymSeq::concentrated(2, &ChainComplex::ground(), 3, false)?;
        let without = compose(&bare, &bare)?.arity(3).total_dim();
        Ok((with_unit == 3 && without == 0, vec![format!("(m∘m)(3) = {with_unit} with unit, {without} without")]))
    })();
    b.boolean("symseq.composite_dimension", "composite as a sum over surjection orbits", 3, res);
    let res = (|| -> Result<(bool, Vec<String>)> {
        let gens = generating_maps(3)?;
        let mut n = 0;
        for (ni, i, iacyc) in &gens {
            for (nj, j, jacyc) in &gens {
                let rep = pushout_product_check(i, j, 3)?;
                let inj = rep.arities.iter().all(|a| a.injective);
                let acyc = !(*iacyc || *jacyc) || rep.arities.iter().all(|a| a.cokernel_acyclic != Some(false));
                if !(inj && acyc) {
                    return Ok((false, vec![format!("fails on {ni} □ {nj}")]));
                }
                n += 1;
            }
        }
        Ok((true, vec![format!("{n} pairs of generating (acyclic) cofibrations")]))
    })();
    b.boolean("symseq.pushout_product", "pushout-product of cofibrations", 3, res);
    b.finish("symseq")
}

/// Generating cofibrations S(n)⊗Σ_r → D(n)⊗Σ_r and acyclic ones 0 → D(n)⊗Σ_r,
/// r ≤ bound, n ∈ {0, 1}, each with the unit adjoined.
pub fn generating_maps(bound: usize) -> Result<Vec<(String, SymSeqMap, bool)>> {
    let mut out = Vec::new();
    let u = unit_seq(bound)?;
    for r in 1..=bound {
        for n in 0..=1i64 {
            let s = free_sigma_seq(&sphere(n, n.min(0))?, r, bound)?;
            let d = free_sigma_seq(&disk(n)?, r, bound)?;
            let z = SymSeq::zero(bound)?;
            let fact = factorial(r);
            // sphere generator ↦ bottom of the disk, per group element
            let sd: Vec<RatMatrix> = (0..=bound)
                .map(|k| {
                    if k != r {
                        return RatMatrix::zero(d.arity(k).total_dim(), s.arity(k).total_dim());
                    }
                    RatMatrix::new(2 * fact, fact, (0..fact).map(|a| (a, a, q(1))).collect()).expect("in range")
                })
                .collect();
            let zd: Vec<RatMatrix> = (0..=bound).map(|k| RatMatrix::zero(d.arity(k).total_dim(), 0)).collect();
            for (tag, src, mats, acyclic) in [("S", &s, sd, false), ("0", &z, zd, true)] {
                let a = SymSeq::direct_sum(&[u.clone(), src.clone()])?;
                let bb = SymSeq::direct_sum(&[u.clone(), d.clone()])?;
                let lifted: Vec<RatMatrix> = (0..=bound)
                    .map(|k| {
                        let es = sum_embeddings(&[u.arity(k).clone(), src.arity(k).clone()], a.arity(k));
                        let et = sum_embeddings(&[u.arity(k).clone(), d.arity(k).clone()], bb.arity(k));
                        let mut t: Vec<(usize, usize, crate::exactlin::Q)> = es[0].iter().zip(&et[0]).map(|(c, r)| (*r, *c, q(1))).collect();
                        t.extend(mats[k].entries().iter().map(|(r, c, x)| (et[1][*r], es[1][*c], x.clone())));
                        RatMatrix::new(bb.arity(k).total_dim(), a.arity(k).total_dim(), t).expect("in range")
                    })
                    .collect();
                out.push((format!("{tag}({n})⊗Σ_{r}→D({n})⊗Σ_{r}"), SymSeqMap::from_totals(&a, &bb, &lifted)?, acyclic));
            }
        }
    }
    Ok(out)
}

/// (2r − 3)!!
pub fn double_factorial_count(r: usize) -> usize {
    (1..r).map(|k| 2 * k - 1).product()
}

fn operad_suite(cfg: &Config) -> SuiteReport {
    let mut b = Builder { cfg, checks: Vec::new() };
    let bound = cfg.arity.max(2);
    let res = (|| -> Result<(bool, Vec<String>)> {
        let f = free_binary(bound)?;
        f.operad.check()?;
        let dims = f.operad.dims();
        let ok = (2..=bound).all(|r| dims[r] == double_factorial_count(r));
        Ok((ok, vec![format!("dims {:?}", &dims[2..])]))
    })();
    b.boolean("operad.free_dims", "free operad as decorated trees", bound, res);
    let res = (|| -> Result<(bool, Vec<String>)> {
        let c = commutative_operad(bound)?;
        c.operad.check()?;
        let ok = (1..=bound).all(|r| c.operad.dim(r) == 1);
        Ok((ok, vec![format!("dims {:?}", c.operad.dims())]))
    })();
    b.boolean("operad.commutative_quotient", "quotient of the free operad by associativity", bound, res);
    b.finish("operad")
}

fn barcobar_suite(cfg: &Config) -> Vec<SuiteReport> {
    let mut b = Builder { cfg, checks: Vec::new() };
    let bound = cfg.arity.min(4);
    let res = (|| -> Result<(bool, Vec<String>)> {
        let f = free_binary(bound)?;
        let bb = bar(&f.operad)?;
        let c = crate::barcobar::cobar(&bb.cooperad)?;
        let rep = c.filtration_report();
        Ok((rep.raises_vertex_count && rep.filtered, vec![format!("{} filtration levels", rep.levels.len())]))
    })();
    b.boolean("barcobar.filtration", "the vertex filtration isolates the cobar differential", bound, res);
    for (name, p) in [("free", free_binary(bound).map(|f| f.operad)), ("commutative", commutative_operad(bound).map(|c| c.operad))] {
        let check = format!("barcobar.resolution.{name}");
        match p.and_then(|p| bar_cobar(&p)).and_then(|r| arity_verdicts(&r.counit, bound)) {
            Ok(v) => {
                let (t, w) = arity_tables(&v);
                b.push(&check, "the bar-cobar construction is a cofibrant model", bound, verdict_of(v.iter().all(|a| a.quasi_iso)), t, w, Vec::new());
            }
            Err(e) => b.error(&check, "the bar-cobar construction is a cofibrant model", bound, e),
        }
    }
    let res = (|| -> Result<(bool, Vec<String>)> {
        let f = CosimplicialFrame::build(2, 1)?;
        f.check()?;
        let mut ok = true;
        for n in 0..=2 {
            ok &= frame_decomposition_check(&f, n)?;
        }
        Ok((ok, vec!["cosimplicial identities and Φ/Ψ inverse for n ≤ 2 at order 1".into()]))
    })();
    let main = b.finish("barcobar");
    let mut b = Builder { cfg, checks: Vec::new() };
    b.boolean("frame.identities", "the cosimplicial frame", 0, res);
    match eta_report(1, &cfg.stages) {
        Ok(r) => {
            let tables = r.level_one.stage_homology.iter().zip(&r.level_one.orders).map(|(h, o)| table(format!("level 1, stage {o}"), h.clone())).collect();
            let w = r.level_one.eventual_ranks.last().and_then(|e| homology_witness(&[(0, 1)], e));
            b.push("frame.eta", "the frame is a resolution of the constant object", 0, r.verdict, tables, w, Vec::new());
        }
        Err(e) => b.error("frame.eta", "the frame is a resolution of the constant object", 0, e),
    }
    vec![main, b.finish("frame")]
}

fn theorem_a_suite(cfg: &Config) -> SuiteReport {
    let mut b = Builder { cfg, checks: Vec::new() };
    let bound = cfg.arity.min(3);
    let s = cfg.s_max.min(2);
    let inputs: Vec<(&str, Result<Operad>)> = vec![
        ("free", free_binary(bound).map(|f| f.operad)),
        ("bar_cobar_commutative", commutative_operad(bound).and_then(|c| bar_cobar(&c.operad)).map(|r| r.cobar.operad)),
    ];
    for (name, p) in inputs {
        for r in 2..=bound {
            let check = format!("realization.{name}.arity{r}");
            let anchor = "realization commutes with the underlying chains";
            let run = p.as_ref().map_err(|e| Error::Internal(e.to_string())).and_then(|p| theorem_a(&SimplicialOperad::constant(p, s), r, &cfg.stages));
            match run {
                Ok(trace) => {
                    let mut tables = Vec::new();
                    let mut notes = Vec::new();
                    let mut w = None;
                    for st in &trace.stages {
                        tables.push(table(format!("order {} realization", st.order), st.lhs_homology.clone()));
                        tables.push(table(format!("order {} chains", st.order), st.rhs_homology.clone()));
                        tables.push(table(format!("order {} level 0", st.order), st.level0_homology.clone()));
                        for t in &st.trees {
                            notes.push(format!("order {} tree {}: {} {:?} {:?}", st.order, t.tree, t.verdict, t.lhs, t.rhs));
                        }
                        if st.verdict() == Verdict::Fail && w.is_none() {
                            w = homology_witness(&st.level0_homology, &st.lhs_homology);
                        }
                    }
                    if !trace.unavailable.is_empty() {
                        notes.push(format!("no frame at orders {:?} for s_max = {s}", trace.unavailable));
                    }
                    b.push(&check, anchor, r, trace.verdict, tables, w, notes);
                }
                Err(e) => b.error(&check, anchor, r, e),
            }
        }
    }
    b.finish("theorem-a")
}

fn resolution_suite(cfg: &Config) -> SuiteReport {
    let mut b = Builder { cfg, checks: Vec::new() };
    let bound = cfg.arity.min(3);
    let s = cfg.s_max.max(2).min(3);
    match free_binary(bound).and_then(|f| augmentation_check(&f.operad, bound, s, &cfg.stages)) {
        Ok(rep) => {
            let mut tables = Vec::new();
            for c in &rep.chain {
                tables.push(table(format!("normalized arity {}", c.arity), c.normalized_homology.clone()));
                tables.push(table(format!("target arity {}", c.arity), c.target_homology.clone()));
            }
            let w = rep.chain.iter().find(|c| c.verdict == Verdict::Fail).and_then(|c| homology_witness(&c.target_homology, &c.normalized_homology));
            b.push("resolution.chain_augmentation", "the comonadic resolution is a weak equivalence", bound, rep.chain_verdict, tables, w, vec![format!("s_max = {s}")]);
            let mut tables = Vec::new();
            let mut w = None;
            for st in &rep.operadic {
                let (t, wi) = arity_tables(&st.arities);
                tables.extend(t.into_iter().map(|mut x| {
                    x.label = format!("order {} {}", st.order, x.label);
                    x
                }));
                if w.is_none() {
                    w = wi;
                }
            }
            let notes = if rep.unavailable.is_empty() { Vec::new() } else { vec![format!("no frame at orders {:?}", rep.unavailable)] };
            b.push("resolution.operadic_augmentation", "the realized resolution is a weak equivalence", bound, rep.operadic_verdict, tables, w, notes);
        }
        Err(e) => {
            b.error("resolution.chain_augmentation", "the comonadic resolution is a weak equivalence", bound, e.clone());
            b.error("resolution.operadic_augmentation", "the realized resolution is a weak equivalence", bound, e);
        }
    }
    b.finish("resolution")
}

fn transfer_suite(cfg: &Config) -> Vec<SuiteReport> {
    let mut b = Builder { cfg, checks: Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
    let res = (|| -> Result<(bool, Vec<String>)> {
        let mut ok = true;
        for _ in 0..50 {
            let lo = 0;
            let hi = rng.gen_range(0..=3);
            let (c, _) = random_complex(&mut rng, lo, hi, 3);
            let (_, _, f) = dk_round_trip(&c, hi as usize + 1)?;
            ok &= crate::doldkan::is_invertible(&f.total());
        }
        Ok((ok, vec!["50 random complexes, window ≤ 3".into()]))
    })();
    b.boolean("doldkan.round_trip", "normalization inverts the Dold-Kan functor", 0, res);
    let res = (|| -> Result<(bool, Vec<String>)> {
        let mut ok = true;
        let pool: Vec<SimplicialModule> = vec![
            crate::doldkan::dk_inverse(&disk(0)?, 3)?.module,
            crate::doldkan::dk_inverse(&sphere(1, 0)?, 3)?.module,
            SimplicialModule::from_chain(&crate::realize::free_on_simplex(1, 3)?)?,
            SimplicialModule::constant(2, 3),
        ];
        for _ in 0..10 {
            let (x, y, z) = (rng.gen_range(0..pool.len()), rng.gen_range(0..pool.len()), rng.gen_range(0..pool.len()));
            ok &= lax_associativity(&pool[x], &pool[y], &pool[z])?;
        }
        Ok((ok, vec!["10 triples".into()]))
    })();
    b.boolean("doldkan.lax_associativity", "coherence of the lax monoidal structure", 0, res);
    let dk = b.finish("doldkan");
    let mut b = Builder { cfg, checks: Vec::new() };
    let bound = cfg.arity.min(4);
    let s = 4.max(cfg.s_max);
    let instances: Vec<(&str, Result<(SymSeq, SymSeq)>)> = vec![
        ("acyclic", (|| Ok((free_sigma_seq(&disk(0)?, 2, bound)?, SymSeq::direct_sum(&[unit_seq(bound)?, free_sigma_seq(&sphere(1, 0)?, 2, bound)?])?)))()),
        ("spheres", (|| Ok((free_sigma_seq(&ChainComplex::ground(), 2, bound)?, SymSeq::direct_sum(&[unit_seq(bound)?, free_sigma_seq(&sphere(1, 0)?, 2, bound)?])?)))()),
    ];
    for (name, inst) in instances {
        let check = format!("transfer.composite_comparison.{name}");
        let anchor = "the lifted pair is weak monoidal";
        match inst.and_then(|(a, bb)| composite_comparison(&a, &bb, bound, s)) {
            Ok(rows) => {
                let mut tables = Vec::new();
                let mut w = None;
                for r in &rows {
                    tables.push(table(format!("source arity {}", r.arity), r.check.source.clone()));
                    tables.push(table(format!("target arity {}", r.arity), r.check.target.clone()));
                    if r.check.verdict == Verdict::Fail && w.is_none() {
                        w = homology_witness(&r.check.source, &r.check.target);
                    }
                }
                let v = combine(rows.iter().map(|r| r.check.verdict));
                b.push(&check, anchor, bound, v, tables, w, vec![format!("s_max = {s}")]);
            }
            Err(e) => b.error(&check, anchor, bound, e),
        }
    }
    let tb = cfg.arity.min(3);
    let st = cfg.s_max.max(2);
    let cases: Vec<(&str, Result<CofibrantOperad>, bool)> = vec![
        ("free", free_binary(tb).map(CofibrantOperad::Free), true),
        ("bar_cobar_free", free_binary(tb).and_then(|f| bar_cobar(&f.operad)).map(CofibrantOperad::BarCobar), false),
        ("bar_cobar_commutative", commutative_operad(tb).and_then(|c| bar_cobar(&c.operad)).map(CofibrantOperad::BarCobar), false),
    ];
    for (name, p, exact) in cases {
        let anchor_g = "the adjoint of the unit on generators";
        let anchor_u = "unit and counit of the transferred adjunction";
        match p.and_then(|p| transfer_checks(&p, None, st)) {
            Ok(rep) => {
                let tables: Vec<HomologyTable> =
                    rep.unit.iter().flat_map(|r| [table(format!("P({})", r.arity), r.check.source.clone()), table(format!("N L(P)({})", r.arity), r.check.target.clone())]).collect();
                let gv = if exact { verdict_of(rep.generators.levelwise_iso) } else { combine(rep.generators.arities.iter().map(|r| r.check.verdict)) };
                let note = format!("levelwise isomorphism: {}", rep.generators.levelwise_iso);
                b.push(&format!("transfer.generators.{name}"), anchor_g, tb, gv, tables.clone(), None, vec![note]);
                b.push(&format!("transfer.unit.{name}"), anchor_u, tb, rep.unit_verdict, tables, None, vec![format!("s_max = {st}")]);
                let ct: Vec<HomologyTable> = rep.counit.iter().flat_map(|r| [table(format!("N L(Q^c)({})", r.arity), r.check.source.clone()), table(format!("N q({})", r.arity), r.check.target.clone())]).collect();
                b.push(&format!("transfer.counit.{name}"), anchor_u, tb, rep.counit_verdict, ct, None, Vec::new());
            }
            Err(e) => {
                b.error(&format!("transfer.generators.{name}"), anchor_g, tb, e.clone());
                b.error(&format!("transfer.unit.{name}"), anchor_u, tb, e.clone());
                b.error(&format!("transfer.counit.{name}"), anchor_u, tb, e);
            }
        }
    }
    vec![dk, b.finish("transfer")]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => usage(format!("unknown format {s}")),
        }
    }
}

pub fn emit_report(r: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(r).expect("report serializes") + "\n",
        Format::Markdown => markdown(r),
    }
}

pub fn parse_report(text: &str) -> Result<VerificationReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("report: {e}")))
}

fn dims_text(d: &[(i64, usize)]) -> String {
    if d.is_empty() {
        return "0".into();
    }
    d.iter().map(|(n, k)| format!("H{n}={k}")).collect::<Vec<_>>().join(" ")
}

fn markdown(r: &VerificationReport) -> String {
    let c = &r.config;
    let mut s = format!("# Verification report: {}\n\nOverall: **{}**\n\n", r.suite, r.verdict);
    s.push_str(&format!(
        "Config: arity ≤ {}, window [{}, {}], s_max = {}, stages {:?}, seed {}\n\n",
        c.arity, c.window.0, c.window.1, c.s_max, c.stages, c.seed
    ));
    for suite in &r.suites {
        s.push_str(&format!("## {} ({})\n\n| check | verdict | arity | anchor |\n|---|---|---|---|\n", suite.suite, suite.verdict));
        for ch in &suite.checks {
            s.push_str(&format!("| {} | {} | {} | {} |\n", ch.name, ch.verdict, ch.params.arity, ch.anchor));
        }
        s.push('\n');
        for ch in &suite.checks {
            if ch.homology.is_empty() && ch.witness.is_none() && ch.notes.is_empty() {
                continue;
            }
            s.push_str(&format!("### {}\n\n", ch.name));
            if !ch.homology.is_empty() {
                s.push_str("| complex | homology |\n|---|---|\n");
                for t in &ch.homology {
                    s.push_str(&format!("| {} | {} |\n", t.label, dims_text(&t.dims)));
                }
                s.push('\n');
            }
            if let Some(w) = &ch.witness {
                s.push_str(&format!("Witness: {} (degree {:?}, expected {:?}, found {:?})\n\n", w.note, w.degree, w.expected, w.found));
            }
            for n in &ch.notes {
                s.push_str(&format!("- {n}\n"));
            }
            if !ch.notes.is_empty() {
                s.push('\n');
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text() {
        let c = Config::from_text("arity = 3\nwindow = -1, 4\nstages = 1,2\n# comment\nseed=7").unwrap();
        assert_eq!(c, Config { arity: 3, window: (-1, 4), s_max: 2, stages: vec![1, 2], seed: 7 });
        assert!(Config::from_text("stages = 2,1").is_err());
        assert!(Config::from_text("colour = red").is_err());
    }

    #[test]
    fn empty_and_single_reports_round_trip() {
        let empty = VerificationReport { suite: "all".into(), config: Config::default(), verdict: Verdict::Pass, suites: Vec::new() };
        assert_eq!(parse_report(&emit_report(&empty, Format::Json)).unwrap(), empty);
        let cfg = Config::default();
        let r = run_suite("operad", &cfg).unwrap();
        let text = emit_report(&r, Format::Json);
        let back = parse_report(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(emit_report(&back, Format::Json), text);
        assert!(emit_report(&r, Format::Markdown).contains("operad.free_dims"));
        assert!(run_suite("nope", &cfg).is_err());
    }
}
