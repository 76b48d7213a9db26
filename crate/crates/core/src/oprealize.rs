//! Simplicial operads, their realization B^c(∫^k B(P_k) ⊗̄ C(Δ^k)) and the
//! comparison Γ: |B^c B(P_•)(r)| → |P_•|(r) with its per-tree pieces Γ_T.

use crate::barcobar::{bar, bar_map, cobar, cobar_map, Bar, Cobar};
use crate::chain::{homology, koszul, ChainComplex, ChainMap};
use crate::coalg::Verdict;
use crate::error::{Error, Result};
use crate::exactlin::{RatMatrix, SVec, Q};
use crate::frame::CosimplicialFrame;
use crate::label::Label;
use crate::multi::{btree_to_svec, matrix_from_fn};
use crate::operad::{keys, Cooperad, Operad, OperadMap};
use crate::realize::{coalgebra_iterated, coend, qi_verdict, unit, Coend, CosimplicialChain, SimplicialChain};
use crate::symseq::SymSeq;
use crate::tree::{Decoration, PTree, Tree};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct SimplicialOperad {
    pub levels: Vec<Operad>,
    /// faces[n][i]: P_n → P_{n-1}
    pub faces: Vec<Vec<OperadMap>>,
    /// degens[n][j]: P_n → P_{n+1}, n < s
    pub degens: Vec<Vec<OperadMap>>,
}

impl SimplicialOperad {
    pub fn new(levels: Vec<Operad>, faces: Vec<Vec<OperadMap>>, degens: Vec<Vec<OperadMap>>) -> Result<Self> {
        let p = SimplicialOperad { levels, faces, degens };
        p.check()?;
        Ok(p)
    }

    pub fn constant(p: &Operad, s: usize) -> Self {
        let id = OperadMap::identity(p);
        SimplicialOperad {
            levels: vec![p.clone(); s + 1],
            faces: (0..=s).map(|n| if n == 0 { Vec::new() } else { vec![id.clone(); n + 1] }).collect(),
            degens: (0..=s).map(|n| if n == s { Vec::new() } else { vec![id.clone(); n + 1] }).collect(),
        }
    }

    pub fn s_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn bound(&self) -> usize {
        self.levels.iter().map(|p| p.bound()).min().unwrap_or(0)
    }

    /// The simplicial chain complex P_•(r).
    pub fn arity(&self, r: usize) -> SimplicialChain {
        SimplicialChain {
            levels: self.levels.iter().map(|p| p.seq().arity(r).clone()).collect(),
            faces: self.faces.iter().map(|fs| fs.iter().map(|f| f.total(r)).collect()).collect(),
            degens: self.degens.iter().map(|fs| fs.iter().map(|f| f.total(r)).collect()).collect(),
        }
    }

    pub fn check(&self) -> Result<()> {
        for r in 0..=self.bound() {
            self.arity(r).check().map_err(|e| Error::Precondition(format!("arity {r}: {e}")))?;
        }
        Ok(())
    }
}

/// B(P_k) for every level with the induced cooperad maps.
#[derive(Clone, Debug)]
pub struct LevelBars {
    pub bars: Vec<Bar>,
    pub faces: Vec<Vec<Vec<RatMatrix>>>,
    pub degens: Vec<Vec<Vec<RatMatrix>>>,
}

impl LevelBars {
    pub fn new(p: &SimplicialOperad) -> Result<Self> {
        let bars = p.levels.iter().map(bar).collect::<Result<Vec<_>>>()?;
        let s = p.s_max();
        let mut faces = vec![Vec::new(); s + 1];
        let mut degens = vec![Vec::new(); s + 1];
        for n in 0..=s {
            for f in &p.faces[n] {
                faces[n].push(bar_map(&bars[n], &bars[n - 1], f)?);
            }
            for g in &p.degens[n] {
                degens[n].push(bar_map(&bars[n], &bars[n + 1], g)?);
            }
        }
        Ok(LevelBars { bars, faces, degens })
    }

    pub fn arity(&self, r: usize) -> SimplicialChain {
        SimplicialChain {
            levels: self.bars.iter().map(|b| b.cooperad.seq().arity(r).clone()).collect(),
            faces: self.faces.iter().map(|fs| fs.iter().map(|f| f[r].clone()).collect()).collect(),
            degens: self.degens.iter().map(|fs| fs.iter().map(|f| f[r].clone()).collect()).collect(),
        }
    }

    /// B^c B(P_k) for every level with the induced operad maps.
    pub fn cobars(&self) -> Result<LevelCobars> {
        let cobars = self.bars.iter().map(|b| cobar(&b.cooperad)).collect::<Result<Vec<_>>>()?;
        let s = self.bars.len() - 1;
        let mut faces = vec![Vec::new(); s + 1];
        let mut degens = vec![Vec::new(); s + 1];
        for n in 0..=s {
            for f in &self.faces[n] {
                faces[n].push(cobar_map(&cobars[n], &cobars[n - 1], f)?);
            }
            for g in &self.degens[n] {
                degens[n].push(cobar_map(&cobars[n], &cobars[n + 1], g)?);
            }
        }
        Ok(LevelCobars { cobars, faces, degens })
    }
}

pub struct LevelCobars {
    pub cobars: Vec<Cobar>,
    pub faces: Vec<Vec<OperadMap>>,
    pub degens: Vec<Vec<OperadMap>>,
}

impl LevelCobars {
    /// B^c B(P_•)(r), with the full differential or its internal part only.
    pub fn arity(&self, r: usize, internal_only: bool) -> SimplicialChain {
        SimplicialChain {
            levels: self
                .cobars
                .iter()
                .map(|c| if internal_only { c.trees.complex(r).clone() } else { c.operad.seq().arity(r).clone() })
                .collect(),
            faces: self.faces.iter().map(|fs| fs.iter().map(|f| f.total(r)).collect()).collect(),
            degens: self.degens.iter().map(|fs| fs.iter().map(|f| f.total(r)).collect()).collect(),
        }
    }
}

/// Whether the level-0 summand maps isomorphically onto the coend, so that
/// the result does not depend on the higher frame levels.
pub fn carried_by_level_zero(c: &Coend) -> bool {
    let n = c.complex().total_dim();
    if c.parts[0].total_dim() != n {
        return false;
    }
    let cols: Vec<SVec> = c.index[0].iter().flat_map(|row| row.iter().map(|g| c.quotient.project(&unit(*g)))).collect();
    RatMatrix::from_columns(n, &cols).rank() == n
}

/// The coend cooperad ∫^k B(P_k) ⊗̄ C(Δ^k), computed aritywise.
pub fn coend_cooperad(bars: &LevelBars, frame: &CosimplicialFrame) -> Result<(Cooperad, Vec<Option<Coend>>)> {
    let b = bars.bars[0].cooperad.bound();
    let cs = CosimplicialChain::of_frame(frame);
    let mut coends: Vec<Option<Coend>> = vec![None, None];
    for r in 2..=b {
        coends.push(Some(coend(&bars.arity(r), &cs)?));
    }
    let base = bars.bars[0].cooperad.seq();
    let mut comps = Vec::new();
    let mut actions = Vec::new();
    for r in 0..=b {
        match &coends[r] {
            None => {
                comps.push(base.arity(r).clone());
                actions.push(Vec::new());
            }
            Some(c) => {
                comps.push(c.complex().clone());
                actions.push(
                    (0..r - 1)
                        .map(|j| {
                            matrix_from_fn(c.complex().total_dim(), c.complex().total_dim(), |q| {
                                let (k, x, y) = c.locate(q);
                                let t = bars.bars[k].cooperad.seq().transposition(r, j);
                                let v: SVec = t.column(x).into_iter().map(|(a, w)| (c.index[k][a][y], w)).collect();
                                let mut v = v;
                                v.sort_by_key(|e| e.0);
                                c.quotient.project(&v)
                            })
                        })
                        .collect(),
                );
            }
        }
    }
    let seq = SymSeq::new(comps, actions)?;
    let dim = |r: usize| seq.arity(r).total_dim();
    let mut dec = BTreeMap::new();
    for key in keys(b) {
        let (m, n, _) = key;
        let r = m + n - 1;
        let dn = dim(n);
        let t = matrix_from_fn(dim(m) * dn, dim(r), |g| {
            if m == 1 {
                return unit(g);
            }
            if n == 1 {
                return unit(g * dn);
            }
            let c = coends[r].as_ref().expect("arity ≥ 2");
            let (cm, cn) = (coends[m].as_ref().expect("arity ≥ 2"), coends[n].as_ref().expect("arity ≥ 2"));
            let (k, x, y) = c.locate(g);
            let q = &bars.bars[k].cooperad;
            let coal = frame.level(k);
            let cdeg = coal.complex.global_degrees();
            let mut out: BTreeMap<usize, Q> = BTreeMap::new();
            for (a, bb, w) in q.decompose(key, x) {
                for (c1, c2, v) in &coal.delta[y] {
                    let s = koszul(q.degree(n, bb) * cdeg[*c1]);
                    let coef = &w * v * s;
                    for (u, e1) in cm.class(k, a, *c1) {
                        for (z, e2) in cn.class(k, bb, *c2) {
                            *out.entry(u * dn + z).or_insert_with(Q::zero) += &coef * &e1 * e2;
                        }
                    }
                }
            }
            btree_to_svec(out)
        });
        dec.insert(key, t);
    }
    let q = Cooperad::new(seq, dec).map_err(|e| Error::Internal(format!("coend cooperad: {e}")))?;
    Ok((q, coends))
}

/// |P_•| = B^c(∫^k B(P_k) ⊗̄ C(Δ^k)) at one frame stage.
pub struct OperadRealization {
    pub order: u32,
    pub frame: CosimplicialFrame,
    pub bars: LevelBars,
    pub coends: Vec<Option<Coend>>,
    pub cooperad: Cooperad,
    pub cobar: Cobar,
}

pub fn realize_operad(p: &SimplicialOperad, order: u32) -> Result<OperadRealization> {
    let frame = CosimplicialFrame::build(p.s_max(), order)?;
    let bars = LevelBars::new(p)?;
    let (cooperad, coends) = coend_cooperad(&bars, &frame)?;
    let cobar = cobar(&cooperad)?;
    Ok(OperadRealization { order, frame, bars, coends, cooperad, cobar })
}

impl OperadRealization {
    pub fn operad(&self) -> &Operad {
        &self.cobar.operad
    }

    pub fn carried_by_level_zero(&self) -> bool {
        self.coends.iter().flatten().all(carried_by_level_zero)
    }
}

fn restrict(c: &ChainComplex, idx: &[usize]) -> Result<ChainComplex> {
    let pos: BTreeMap<usize, usize> = idx.iter().enumerate().map(|(j, g)| (*g, j)).collect();
    let d = c.total_d();
    let mut cols = Vec::new();
    for g in idx {
        let mut v = Vec::new();
        for (h, x) in d.column(*g) {
            let j = pos.get(&h).ok_or_else(|| Error::Internal("tree block is not a subcomplex".into()))?;
            v.push((*j, x));
        }
        v.sort_by_key(|e| e.0);
        cols.push(v);
    }
    let total = RatMatrix::from_columns(idx.len(), &cols);
    let basis: Vec<Vec<Label>> = c
        .degrees()
        .map(|n| idx.iter().filter_map(|g| { let (dd, i) = c.locate(*g); (dd == n).then(|| c.basis(n)[i].clone()) }).collect())
        .collect();
    ChainComplex::from_total(c.t(), c.lo(), basis, &total)
}

fn submatrix(m: &RatMatrix, rows: &[usize], cols: &[usize]) -> RatMatrix {
    let pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(j, g)| (*g, j)).collect();
    matrix_from_fn(rows.len(), cols.len(), |j| m.column(cols[j]).into_iter().filter_map(|(h, x)| pos.get(&h).map(|p| (*p, x))).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TreeRow {
    pub tree: String,
    pub lhs: Vec<(i64, usize)>,
    pub rhs: Vec<(i64, usize)>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GammaReport {
    pub arity: usize,
    pub order: u32,
    pub lhs_homology: Vec<(i64, usize)>,
    pub rhs_homology: Vec<(i64, usize)>,
    /// H(P_0(r))
    pub level0_homology: Vec<(i64, usize)>,
    pub gamma: Verdict,
    pub trees: Vec<TreeRow>,
    /// both coends are carried by level 0, so every stage gives this answer
    pub stage_independent: bool,
}

impl GammaReport {
    pub fn verdict(&self) -> Verdict {
        if self.gamma == Verdict::Pass && self.trees.iter().all(|t| t.verdict == Verdict::Pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Γ on the ambient sum ⊕_k B^c B(P_k)(r) ⊗ C(Δ^k), then on classes.
pub fn gamma_comparison(p: &SimplicialOperad, real: &OperadRealization, r: usize) -> Result<GammaReport> {
    if r < 2 {
        return Err(Error::Usage("Γ is compared in arities r ≥ 2".into()));
    }
    let cobars = real.bars.cobars()?;
    let cs = CosimplicialChain::of_frame(&real.frame);
    let lhs = coend(&cobars.arity(r, false), &cs)?;
    let lhs_int = coend(&cobars.arity(r, true), &cs)?;
    let rhs_tm = &real.cobar.trees;
    let rdim = rhs_tm.dim(r);
    let amb = |k: usize, g: usize, y: usize| -> SVec {
        let c = &cobars.cobars[k];
        let (t, _) = c.trees.basis(r, g);
        let decs = c.trees.decorations(r, g);
        let coal = real.frame.level(k);
        let cdeg = coal.complex.global_degrees();
        let mut out = BTreeMap::new();
        for (ys, coef) in coalgebra_iterated(coal, y, decs.len()) {
            let mut sign = 0;
            for u in 0..ys.len() {
                for w in u + 1..ys.len() {
                    sign += cdeg[ys[u]] * decs[w].degree;
                }
            }
            let nd: Vec<Decoration> = decs
                .iter()
                .zip(&ys)
                .map(|(d, yv)| Decoration {
                    arity: d.arity,
                    vec: real.coends[d.arity].as_ref().expect("arity ≥ 2").class(k, d.vec[0].0, *yv),
                    degree: d.degree + cdeg[*yv],
                })
                .collect();
            if nd.iter().any(|d| d.vec.is_empty()) {
                continue;
            }
            rhs_tm.normalize_into(&mut out, r, &PTree::from_tree(t, 0), &nd, &(coef * koszul(sign)));
        }
        btree_to_svec(out)
    };
    let gamma = matrix_from_fn(rdim, lhs.complex().total_dim(), |q| {
        let (k, g, y) = lhs.locate(q);
        amb(k, g, y)
    });
    // well defined on classes
    for (k, m) in lhs.index.iter().enumerate() {
        for (g, row) in m.iter().enumerate() {
            for (y, e) in row.iter().enumerate() {
                if gamma.mul_svec(&lhs.quotient.project(&unit(*e))) != amb(k, g, y) {
                    return Err(Error::Internal(format!("Γ does not respect the coend relations at level {k}")));
                }
            }
        }
    }
    let rhs = real.operad().seq().arity(r);
    let gmap = ChainMap::from_total(lhs.complex(), rhs, 0, &gamma)?;
    let (gv, lh, rh) = qi_verdict(&gmap)?;
    // associated graded: one block per tree shape
    let shape_l = |q: usize| -> Tree {
        let (k, g, _) = lhs_int.locate(q);
        cobars.cobars[k].trees.basis(r, g).0.clone()
    };
    let mut blocks: BTreeMap<Tree, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for q in 0..lhs_int.complex().total_dim() {
        blocks.entry(shape_l(q)).or_default().0.push(q);
    }
    for h in 0..rdim {
        blocks.entry(rhs_tm.basis(r, h).0.clone()).or_default().1.push(h);
    }
    let mut trees = Vec::new();
    for (t, (li, ri)) in blocks {
        let lc = restrict(lhs_int.complex(), &li)?;
        let rc = restrict(rhs_tm.complex(r), &ri)?;
        let m = ChainMap::from_total(&lc, &rc, 0, &submatrix(&gamma, &ri, &li))?;
        let (v, a, b) = qi_verdict(&m)?;
        trees.push(TreeRow { tree: t.to_string(), lhs: a, rhs: b, verdict: v });
    }
    Ok(GammaReport {
        arity: r,
        order: real.order,
        lhs_homology: lh,
        rhs_homology: rh,
        level0_homology: homology(p.levels[0].seq().arity(r)).nonzero(),
        gamma: gv,
        trees,
        stage_independent: real.carried_by_level_zero() && carried_by_level_zero(&lhs),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StageTrace {
    pub stages: Vec<GammaReport>,
    /// orders for which no frame is available at this truncation
    pub unavailable: Vec<u32>,
    pub verdict: Verdict,
}

/// Γ at every available stage; stabilized when the last two stages agree
/// or every computed stage is carried by level 0.
pub fn theorem_a(p: &SimplicialOperad, r: usize, orders: &[u32]) -> Result<StageTrace> {
    let mut stages = Vec::new();
    let mut unavailable = Vec::new();
    for &o in orders {
        match realize_operad(p, o) {
            Ok(real) => stages.push(gamma_comparison(p, &real, r)?),
            Err(Error::Unsupported(_)) => unavailable.push(o),
            Err(e) => return Err(e),
        }
    }
    let verdict = stabilized(&stages.iter().map(|s| (s.verdict(), s.stage_independent)).collect::<Vec<_>>());
    Ok(StageTrace { stages, unavailable, verdict })
}

pub fn stabilized(v: &[(Verdict, bool)]) -> Verdict {
    match v {
        [] => Verdict::Inconclusive,
        [.., a, b] if a.0 == b.0 => b.0,
        _ if v.iter().all(|x| x.1) => v[v.len() - 1].0,
        _ => Verdict::Inconclusive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{free_binary, unit_operad};

    #[test]
    fn constant_free_binary() {
        let f = free_binary(3).unwrap();
        for s in 0..=2 {
            let p = SimplicialOperad::constant(&f.operad, s);
            p.check().unwrap();
            let real = realize_operad(&p, 1).unwrap();
            assert!(real.carried_by_level_zero());
            for r in 2..=3 {
                let g = gamma_comparison(&p, &real, r).unwrap();
                assert_eq!(g.verdict(), Verdict::Pass, "{g:?}");
                assert_eq!(g.lhs_homology, g.level0_homology);
                assert_eq!(g.rhs_homology, g.level0_homology);
            }
        }
    }

    #[test]
    fn constant_unit() {
        let u = unit_operad(3).unwrap();
        let p = SimplicialOperad::constant(&u, 1);
        let real = realize_operad(&p, 1).unwrap();
        assert_eq!(real.operad().dims(), u.dims());
    }
}
