//! The comonadic resolution Res_k(P) = (FU)^{k+1}(P), its augmentation and
//! extra degeneracy, and the two augmentation checks.

use crate::barcobar::{arity_verdicts, verdict_of, ArityVerdict};
use crate::chain::koszul;
use crate::coalg::Verdict;
use crate::error::{Error, Result};
use crate::exactlin::{svec_get, RatMatrix, SVec, Q};
use crate::multi::{btree_to_svec, matrix_from_fn};
use crate::operad::{augmentation_ideal, eval_matrices, free_operad, FreeOperad, Operad, OperadMap};
use crate::oprealize::{realize_operad, stabilized, OperadRealization, SimplicialOperad};
use crate::realize::unit;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// F U(x) on the augmentation ideal.
pub fn fu(x: &Operad) -> Result<FreeOperad> {
    free_operad(&augmentation_ideal(x.seq())?, x.bound())
}

fn corolla_matrix(f: &FreeOperad, k: usize, src_dim: usize) -> RatMatrix {
    matrix_from_fn(f.operad.dim(k), src_dim, |i| if k < 2 { Vec::new() } else { f.trees.corolla(k, i).map(unit).unwrap_or_default() })
}

/// ε_X: F U X → X.
pub fn counit(fx: &FreeOperad, x: &Operad) -> Result<OperadMap> {
    let phi: Vec<RatMatrix> =
        (0..=x.bound()).map(|k| if k < 2 { RatMatrix::zero(x.dim(k), 0) } else { RatMatrix::identity(x.dim(k)) }).collect();
    fx.extend(x, &phi)
}

/// F U(g) for g: X → Y.
pub fn fu_map(src: &FreeOperad, tgt: &FreeOperad, g: &OperadMap) -> Result<OperadMap> {
    let phi: Vec<RatMatrix> = (0..=src.trees.bound)
        .map(|k| {
            if k < 2 {
                return Ok(RatMatrix::zero(tgt.operad.dim(k), 0));
            }
            corolla_matrix(tgt, k, g.target.dim(k)).mul(&g.total(k))
        })
        .collect::<Result<Vec<_>>>()?;
    src.extend(&tgt.operad, &phi)
}

/// η_{UX}: U X → U F U X on underlying sequences (the unit in arity 1).
pub fn eta(fx: &FreeOperad, x: &Operad) -> Vec<RatMatrix> {
    (0..=x.bound()).map(|k| if k == 1 { RatMatrix::identity(1) } else { corolla_matrix(fx, k, x.dim(k)) }).collect()
}

pub struct ComonadResolution {
    pub base: Operad,
    /// Res_k = levels[k]
    pub levels: Vec<FreeOperad>,
    pub simplicial: SimplicialOperad,
    /// Res_0 → P
    pub augmentation: OperadMap,
    /// extra[k]: U Res_{k-1} → U Res_k (k = 0: U P → U Res_0), per arity
    pub extra: Vec<Vec<RatMatrix>>,
}

pub fn comonad_resolution(p: &Operad, s: usize) -> Result<ComonadResolution> {
    let mut levels: Vec<FreeOperad> = Vec::new();
    for k in 0..=s {
        let below = if k == 0 { p.clone() } else { levels[k - 1].operad.clone() };
        levels.push(fu(&below)?);
    }
    let below = |k: usize| if k == 0 { p } else { &levels[k - 1].operad };
    let augmentation = counit(&levels[0], p)?;
    // afaces[k]: faces out of level k, with afaces[0] = [ε]
    let mut afaces: Vec<Vec<OperadMap>> = vec![vec![augmentation.clone()]];
    for k in 1..=s {
        let mut fs = vec![counit(&levels[k], below(k))?];
        for i in 1..=k {
            fs.push(fu_map(&levels[k], &levels[k - 1], &afaces[k - 1][i - 1])?);
        }
        afaces.push(fs);
    }
    let mut degens: Vec<Vec<OperadMap>> = vec![Vec::new(); s + 1];
    for k in 0..s {
        // s_0 = F(η_{U Res_{k-1}})
        let e = eta(&levels[k], below(k));
        let phi: Vec<RatMatrix> = (0..=p.bound())
            .map(|a| if a < 2 { Ok(RatMatrix::zero(levels[k + 1].operad.dim(a), 0)) } else { corolla_matrix(&levels[k + 1], a, levels[k].operad.dim(a)).mul(&e[a]) })
            .collect::<Result<Vec<_>>>()?;
        let mut ds = vec![levels[k].extend(&levels[k + 1].operad, &phi)?];
        for j in 1..=k {
            let g = degens[k - 1][j - 1].clone();
            ds.push(fu_map(&levels[k], &levels[k + 1], &g)?);
        }
        degens[k] = ds;
    }
    let mut faces = afaces.clone();
    faces[0] = Vec::new();
    let simplicial = SimplicialOperad::new(levels.iter().map(|f| f.operad.clone()).collect(), faces, degens)?;
    let extra = (0..=s).map(|k| eta(&levels[k], below(k))).collect();
    Ok(ComonadResolution { base: p.clone(), levels, simplicial, augmentation, extra })
}

impl ComonadResolution {
    pub fn s_max(&self) -> usize {
        self.levels.len() - 1
    }

    fn aug_face(&self, k: usize, i: usize, r: usize) -> RatMatrix {
        if k == 0 {
            self.augmentation.total(r)
        } else {
            self.simplicial.faces[k][i].total(r)
        }
    }

    /// d_0 s_{-1} = id, d_{i+1} s_{-1} = s_{-1} d_i, s_{j+1} s_{-1} = s_{-1} s_j.
    pub fn check_extra_degeneracy(&self) -> Result<()> {
        let s = self.s_max();
        for r in 0..=self.base.bound() {
            for k in 0..=s {
                let h = &self.extra[k][r];
                let dim = if k == 0 { self.base.dim(r) } else { self.levels[k - 1].operad.dim(r) };
                if self.aug_face(k, 0, r).mul(h)? != RatMatrix::identity(dim) {
                    return Err(Error::Precondition(format!("d_0 s_-1 ≠ id at level {k}, arity {r}")));
                }
                if k >= 1 {
                    for i in 0..k {
                        let lhs = self.aug_face(k, i + 1, r).mul(h)?;
                        let rhs = self.extra[k - 1][r].mul(&self.aug_face(k - 1, i, r))?;
                        if lhs != rhs {
                            return Err(Error::Precondition(format!("d_{} s_-1 ≠ s_-1 d_{i} at level {k}", i + 1)));
                        }
                    }
                }
                if k + 1 <= s && k >= 1 {
                    for j in 0..k {
                        let lhs = self.simplicial.degens[k][j + 1].total(r).mul(h)?;
                        let rhs = self.extra[k + 1][r].mul(&self.simplicial.degens[k - 1][j].total(r))?;
                        if lhs != rhs {
                            return Err(Error::Precondition(format!("s_{} s_-1 ≠ s_-1 s_{j} at level {k}", j + 1)));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ChainAugmentation {
    pub arity: usize,
    /// D H + H D = id on the augmented normalized complex below the top level
    pub contraction: bool,
    /// the top normalized level vanishes, so the truncation is exact
    pub exact: bool,
    pub normalized_homology: Vec<(i64, usize)>,
    pub target_homology: Vec<(i64, usize)>,
    pub quasi_iso: bool,
    pub verdict: Verdict,
}

/// Chain-level check: N_*(Res_•(P)(r)) → P(r) with the extra-degeneracy
/// contraction H = (-1)^q s_{-1}.
pub fn chain_augmentation(res: &ComonadResolution, r: usize) -> Result<ChainAugmentation> {
    let s = res.s_max();
    let x = res.simplicial.arity(r);
    let n = x.normalized()?;
    let nc = n.complex().clone();
    let pr = res.base.seq().arity(r);
    let pdeg = pr.global_degrees();
    let aug = res.augmentation.total(r);
    let deg_of = |k: usize, g: usize| x.levels[k].global_degrees()[g];
    // augmentation N → P(r) on level-0 classes
    let aug_n = matrix_from_fn(pr.total_dim(), nc.total_dim(), |q| {
        let (k, g) = n.locate(q);
        if k == 0 {
            aug.column(g)
        } else {
            Vec::new()
        }
    });
    let f = crate::chain::ChainMap::from_total(&nc, pr, 0, &aug_n)?;
    let v = crate::chain::is_quasi_iso(&f, None)?;
    // augmented vectors: (classes in N, vector in P(r))
    type Aug = (BTreeMap<usize, Q>, BTreeMap<usize, Q>);
    let add = |m: &mut BTreeMap<usize, Q>, v: &SVec, c: &Q| {
        for (i, x) in v {
            *m.entry(*i).or_insert_with(Q::zero) += x * c;
        }
    };
    let dn = nc.total_d();
    let dp = pr.total_d();
    let d_aug = |(a, b): &Aug| -> Aug {
        let (mut na, mut nb) = (BTreeMap::new(), BTreeMap::new());
        let av = btree_to_svec(a.clone());
        add(&mut na, &dn.mul_svec(&av), &Q::from_integer(1.into()));
        for (q, c) in &av {
            let (k, g) = n.locate(*q);
            if k == 0 {
                add(&mut nb, &aug.column(g), &(c * koszul(deg_of(0, g))));
            }
        }
        add(&mut nb, &dp.mul_svec(&btree_to_svec(b.clone())), &Q::from_integer(1.into()));
        (na, nb)
    };
    let h = |(a, b): &Aug| -> Aug {
        let mut na = BTreeMap::new();
        for (q, c) in a {
            let (k, g) = n.locate(*q);
            if k < s {
                let img = res.extra[k + 1][r].column(g);
                add(&mut na, &n.class(k + 1, &img), &(c * koszul(deg_of(k, g))));
            }
        }
        for (i, c) in b {
            add(&mut na, &n.class(0, &res.extra[0][r].column(*i)), &(c * koszul(pdeg[*i])));
        }
        (na, BTreeMap::new())
    };
    let clean = |(mut a, mut b): Aug| -> Aug {
        a.retain(|_, v| !v.is_zero());
        b.retain(|_, v| !v.is_zero());
        (a, b)
    };
    let mut contraction = true;
    let mut inputs: Vec<Aug> = (0..pr.total_dim()).map(|i| (BTreeMap::new(), BTreeMap::from([(i, Q::from_integer(1.into()))]))).collect();
    for q in 0..nc.total_dim() {
        if n.locate(q).0 + 1 <= s {
            inputs.push((BTreeMap::from([(q, Q::from_integer(1.into()))]), BTreeMap::new()));
        }
    }
    for e in inputs {
        let x1 = d_aug(&h(&e));
        let x2 = h(&d_aug(&e));
        let mut sum = x1.clone();
        for (i, c) in x2.0 {
            *sum.0.entry(i).or_insert_with(Q::zero) += c;
        }
        for (i, c) in x2.1 {
            *sum.1.entry(i).or_insert_with(Q::zero) += c;
        }
        if clean(sum) != clean(e.clone()) {
            contraction = false;
        }
    }
    let exact = n.top_vanishes();
    let verdict = if contraction && v.ok && exact {
        Verdict::Pass
    } else if !exact && contraction {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    };
    Ok(ChainAugmentation {
        arity: r,
        contraction,
        exact,
        normalized_homology: crate::chain::homology(&nc).nonzero(),
        target_homology: crate::chain::homology(pr).nonzero(),
        quasi_iso: v.ok,
        verdict,
    })
}

/// Res_k → P: the augmentation after d_0^k.
fn level_augmentation(res: &ComonadResolution, k: usize, r: usize) -> Result<RatMatrix> {
    let mut m = res.augmentation.total(r);
    for j in 1..=k {
        m = m.mul(&res.simplicial.faces[j][0].total(r))?;
    }
    Ok(m)
}

/// |Res_•(P)| → P on generators s^{-1}[y ⊗ c] ↦ ε(c) aug_k(x) when y = s x is
/// a corolla, zero otherwise.
pub fn realized_augmentation(res: &ComonadResolution, real: &OperadRealization) -> Result<OperadMap> {
    let p = &res.base;
    let b = p.bound();
    let mut phi = Vec::new();
    for r in 0..=b {
        let Some(c) = &real.coends[r] else {
            phi.push(RatMatrix::zero(p.dim(r), real.cobar.trees.gens.arity(r).total_dim()));
            continue;
        };
        let amb = |k: usize, y: usize, e: usize| -> Result<SVec> {
            let bt = &real.bars.bars[k].trees;
            let (t, tup) = bt.basis(r, y);
            let eps = svec_get(&real.frame.level(k).counit, e);
            if t.nvertices() != 1 || eps.is_zero() {
                return Ok(Vec::new());
            }
            Ok(level_augmentation(res, k, r)?.column(tup[0]).into_iter().map(|(i, v)| (i, v * &eps)).collect())
        };
        let m = matrix_from_fn(p.dim(r), c.complex().total_dim(), |q| {
            let (k, y, e) = c.locate(q);
            amb(k, y, e).unwrap_or_default()
        });
        for (k, rows) in c.index.iter().enumerate() {
            for (y, row) in rows.iter().enumerate() {
                for (e, g) in row.iter().enumerate() {
                    if m.mul_svec(&c.quotient.project(&unit(*g))) != amb(k, y, e)? {
                        return Err(Error::Internal(format!("augmentation does not respect the coend at level {k}")));
                    }
                }
            }
        }
        phi.push(m);
    }
    let mats = eval_matrices(&real.cobar.trees, p, &phi)?;
    OperadMap::new(real.operad().clone(), p.clone(), &mats)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OperadicStage {
    pub order: u32,
    pub arities: Vec<ArityVerdict>,
    pub verdict: Verdict,
    pub stage_independent: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AugmentationReport {
    pub chain: Vec<ChainAugmentation>,
    pub chain_verdict: Verdict,
    pub operadic: Vec<OperadicStage>,
    pub unavailable: Vec<u32>,
    pub operadic_verdict: Verdict,
}

pub fn augmentation_check(p: &Operad, max_arity: usize, s: usize, orders: &[u32]) -> Result<AugmentationReport> {
    let res = comonad_resolution(p, s)?;
    res.check_extra_degeneracy()?;
    let chain = (1..=max_arity.min(p.bound())).map(|r| chain_augmentation(&res, r)).collect::<Result<Vec<_>>>()?;
    let chain_verdict = combine(chain.iter().map(|c| c.verdict));
    let mut operadic = Vec::new();
    let mut unavailable = Vec::new();
    for &o in orders {
        match realize_operad(&res.simplicial, o) {
            Ok(real) => {
                let f = realized_augmentation(&res, &real)?;
                let arities = arity_verdicts(&f, max_arity)?;
                let verdict = verdict_of(&arities);
                operadic.push(OperadicStage { order: o, arities, verdict, stage_independent: real.carried_by_level_zero() });
            }
            Err(Error::Unsupported(_)) => unavailable.push(o),
            Err(e) => return Err(e),
        }
    }
    let operadic_verdict = stabilized(&operadic.iter().map(|s| (s.verdict, s.stage_independent)).collect::<Vec<_>>());
    Ok(AugmentationReport { chain, chain_verdict, operadic, unavailable, operadic_verdict })
}

pub fn combine(v: impl IntoIterator<Item = Verdict>) -> Verdict {
    let v: Vec<Verdict> = v.into_iter().collect();
    if v.contains(&Verdict::Fail) {
        Verdict::Fail
    } else if v.contains(&Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{free_binary, unit_operad};

    #[test]
    fn resolution_levels() {
        let f = free_binary(3).unwrap();
        let res = comonad_resolution(&f.operad, 2).unwrap();
        let dims: Vec<usize> = res.levels.iter().map(|l| l.operad.dim(3)).collect();
        assert_eq!(dims, vec![6, 9, 12]);
        res.check_extra_degeneracy().unwrap();
    }

    #[test]
    fn chain_augmentation_contracts() {
        let f = free_binary(3).unwrap();
        let res = comonad_resolution(&f.operad, 2).unwrap();
        for r in 1..=3 {
            let c = chain_augmentation(&res, r).unwrap();
            assert!(c.contraction, "{c:?}");
            assert_eq!(c.verdict, Verdict::Pass, "{c:?}");
        }
        let u = unit_operad(3).unwrap();
        let res = comonad_resolution(&u, 1).unwrap();
        assert_eq!(chain_augmentation(&res, 1).unwrap().verdict, Verdict::Pass);
    }
}

