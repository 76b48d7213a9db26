//! Connected operads and cooperads given by partial (de)composition tables,
//! free operads and cofree cooperads on trees, operadic ideals, quotients and
//! coequalizers.
//!
//! Tables are indexed by (m, n, i) with 0 ≤ i < m. For ∘_i the column of the
//! pair (a, b) ∈ P(m) × P(n) is a·dim P(n) + b; for Δ_i this is the row.

use crate::chain::{koszul, shift, ChainComplex, ChainMap};
use crate::coalg::Coalgebra;
use crate::error::{internal, usage, Error, Result};
use crate::exactlin::{svec_axpy, svec_scale, Echelon, RatMatrix, SVec, Q};
use crate::multi::{btree_to_svec, matrix_from_fn, QuotientComplex, TensorSum};
use crate::symseq::{SymSeq, SymSeqMap};
use crate::tree::{Tree, TreeModule};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

pub type Key = (usize, usize, usize);

fn unit_vec(i: usize) -> SVec {
    vec![(i, Q::one())]
}

fn sv_sub(a: &SVec, b: &SVec) -> SVec {
    svec_axpy(a, &-Q::one(), b)
}

/// Image of slot positions under σ with slot i widened to n consecutive points.
pub fn block_perm(sigma: &[usize], i: usize, n: usize) -> Vec<usize> {
    let m = sigma.len();
    let si = sigma[i];
    let start_src = |p: usize| if p > i { p + n - 1 } else { p };
    let start_tgt = |q: usize| if q > si { q + n - 1 } else { q };
    let mut out = vec![0; m + n - 1];
    for p in 0..m {
        let w = if p == i { n } else { 1 };
        for o in 0..w {
            out[start_src(p) + o] = start_tgt(sigma[p]) + o;
        }
    }
    out
}

fn transposition_perm(m: usize, j: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..m).collect();
    p.swap(j, j + 1);
    p
}

/// Keys (m, n, i) with m, n ≥ 1 and m + n - 1 ≤ bound.
pub fn keys(bound: usize) -> Vec<Key> {
    let mut out = Vec::new();
    for m in 1..=bound {
        for n in 1..=bound + 1 - m {
            for i in 0..m {
                out.push((m, n, i));
            }
        }
    }
    out
}

fn check_connected(seq: &SymSeq) -> Result<()> {
    if seq.arity(0).total_dim() != 0 {
        return usage("connected: arity 0 must vanish");
    }
    if seq.bound() >= 1 {
        let c = seq.arity(1);
        if c.total_dim() != 1 || c.dim(0) != 1 {
            return usage("connected: arity 1 must be the ground field in degree 0");
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Operad {
    seq: SymSeq,
    comp: BTreeMap<Key, RatMatrix>,
    degs: Vec<Vec<i64>>,
}

impl Operad {
    pub fn new(seq: SymSeq, comp: BTreeMap<Key, RatMatrix>) -> Result<Self> {
        let p = Self::new_unchecked(seq, comp)?;
        p.check()?;
        Ok(p)
    }

    pub fn new_unchecked(seq: SymSeq, comp: BTreeMap<Key, RatMatrix>) -> Result<Self> {
        check_connected(&seq)?;
        let b = seq.bound();
        for k in keys(b) {
            let (m, n, _) = k;
            let Some(t) = comp.get(&k) else { return usage(format!("missing composition table {k:?}")) };
            let r = m + n - 1;
            if t.rows() != seq.arity(r).total_dim() || t.cols() != seq.arity(m).total_dim() * seq.arity(n).total_dim() {
                return usage(format!("composition table {k:?} has the wrong shape"));
            }
        }
        let degs = (0..=b).map(|r| seq.arity(r).global_degrees()).collect();
        Ok(Operad { seq, comp, degs })
    }

    /// Table from a closure on basis pairs.
    pub fn from_fn(seq: SymSeq, mut f: impl FnMut(Key, usize, usize) -> SVec) -> Result<Self> {
        let comp = Self::tables(&seq, &mut f);
        Self::new(seq, comp)
    }

    pub fn from_fn_unchecked(seq: SymSeq, mut f: impl FnMut(Key, usize, usize) -> SVec) -> Result<Self> {
        let comp = Self::tables(&seq, &mut f);
        Self::new_unchecked(seq, comp)
    }

    fn tables(seq: &SymSeq, f: &mut impl FnMut(Key, usize, usize) -> SVec) -> BTreeMap<Key, RatMatrix> {
        let mut comp = BTreeMap::new();
        for k in keys(seq.bound()) {
            let (m, n, _) = k;
            let (dm, dn) = (seq.arity(m).total_dim(), seq.arity(n).total_dim());
            let r = m + n - 1;
            let t = matrix_from_fn(seq.arity(r).total_dim(), dm * dn, |c| f(k, c / dn.max(1), c % dn.max(1)));
            comp.insert(k, t);
        }
        comp
    }

    pub fn seq(&self) -> &SymSeq {
        &self.seq
    }

    pub fn bound(&self) -> usize {
        self.seq.bound()
    }

    pub fn dim(&self, r: usize) -> usize {
        self.seq.arity(r).total_dim()
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.bound()).map(|r| self.dim(r)).collect()
    }

    pub fn degree(&self, r: usize, x: usize) -> i64 {
        self.degs[r][x]
    }

    pub fn table(&self, k: Key) -> Option<&RatMatrix> {
        self.comp.get(&k)
    }

    /// x ∘_i y on basis elements; zero beyond the arity bound.
    pub fn compose_basis(&self, m: usize, i: usize, x: usize, n: usize, y: usize) -> SVec {
        match self.comp.get(&(m, n, i)) {
            Some(t) => t.column(x * self.dim(n) + y),
            None => Vec::new(),
        }
    }

    /// a ∘_i b for vectors a ∈ P(m), b ∈ P(n).
    pub fn partial(&self, m: usize, i: usize, a: &SVec, n: usize, b: &SVec) -> Result<SVec> {
        if i >= m {
            return usage(format!("composition slot {i} out of range for arity {m}"));
        }
        Ok(self.partial_unchecked(m, i, a, n, b))
    }

    fn partial_unchecked(&self, m: usize, i: usize, a: &SVec, n: usize, b: &SVec) -> SVec {
        let Some(t) = self.comp.get(&(m, n, i)) else { return Vec::new() };
        let dn = self.dim(n);
        let mut out: BTreeMap<usize, Q> = BTreeMap::new();
        for (x, u) in a {
            for (y, v) in b {
                for (r, w) in t.column(x * dn + y) {
                    *out.entry(r).or_insert_with(Q::zero) += u * v * w;
                }
            }
        }
        btree_to_svec(out)
    }

    pub fn unit(&self) -> SVec {
        unit_vec(0)
    }

    pub fn check(&self) -> Result<()> {
        let b = self.bound();
        let seq = &self.seq;
        let d: Vec<RatMatrix> = (0..=b).map(|r| seq.arity(r).total_d()).collect();
        let fail = |what: String| -> Result<()> { Err(Error::Usage(format!("operad axiom fails: {what}"))) };
        for (m, n, i) in keys(b) {
            let r = m + n - 1;
            for x in 0..self.dim(m) {
                for y in 0..self.dim(n) {
                    let xy = self.compose_basis(m, i, x, n, y);
                    if m == 1 && xy != unit_vec(y) {
                        return fail(format!("left unit in arity {n}"));
                    }
                    if n == 1 && xy != unit_vec(x) {
                        return fail(format!("right unit at slot {i} of arity {m}"));
                    }
                    // derivation
                    let lhs = d[r].mul_svec(&xy);
                    let dx = self.partial_unchecked(m, i, &d[m].column(x), n, &unit_vec(y));
                    let dy = self.partial_unchecked(m, i, &unit_vec(x), n, &d[n].column(y));
                    let rhs = svec_axpy(&dx, &koszul(self.degs[m][x]), &dy);
                    if lhs != rhs {
                        return fail(format!("d is not a derivation for ∘_{i} on arities ({m},{n})"));
                    }
                    // equivariance in the first argument
                    for j in 0..m.saturating_sub(1) {
                        let s = transposition_perm(m, j);
                        let sx = seq.transposition(m, j).column(x);
                        let l = self.partial_unchecked(m, s[i], &sx, n, &unit_vec(y));
                        let rr = seq.perm_action(r, &block_perm(&s, i, n)).mul_svec(&xy);
                        if l != rr {
                            return fail(format!("equivariance in the first argument, ({m},{n},{i}), s_{j}"));
                        }
                    }
                    for j in 0..n.saturating_sub(1) {
                        let sy = seq.transposition(n, j).column(y);
                        let l = self.partial_unchecked(m, i, &unit_vec(x), n, &sy);
                        let rr = seq.transposition(r, i + j).mul_svec(&xy);
                        if l != rr {
                            return fail(format!("equivariance in the second argument, ({m},{n},{i}), s_{j}"));
                        }
                    }
                    // associativity against a third argument
                    for p in 1..=b + 2 - m - n {
                        for z in 0..self.dim(p) {
                            for j in 0..n {
                                let l = self.partial_unchecked(r, i + j, &xy, p, &unit_vec(z));
                                let yz = self.compose_basis(n, j, y, p, z);
                                let rr = self.partial_unchecked(m, i, &unit_vec(x), n + p - 1, &yz);
                                if l != rr {
                                    return fail(format!("sequential associativity ({m},{n},{p}), slots {i},{j}"));
                                }
                            }
                            for k in i + 1..m {
                                let l = self.partial_unchecked(r, k + n - 1, &xy, p, &unit_vec(z));
                                let xz = self.compose_basis(m, k, x, p, z);
                                let rr = self.partial_unchecked(m + p - 1, i, &xz, n, &unit_vec(y));
                                let s = koszul(self.degs[n][y] * self.degs[p][z]);
                                if l != svec_scale(&rr, &s) {
                                    return fail(format!("parallel associativity ({m},{n},{p}), slots {i},{k}"));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Operad truncated to a smaller arity bound.
    pub fn truncate(&self, bound: usize) -> Result<Operad> {
        let b = bound.min(self.bound());
        let seq = self.seq.with_bound(b)?;
        let comp = self.comp.iter().filter(|(k, _)| k.0 + k.1 - 1 <= b).map(|(k, v)| (*k, v.clone())).collect();
        Operad::new_unchecked(seq, comp)
    }
}

/// 𝕀 as an operad: 𝕜 in arity 1.
pub fn unit_operad(bound: usize) -> Result<Operad> {
    let seq = crate::symseq::unit_seq(bound)?;
    Operad::from_fn(seq, |_, x, y| if x == 0 && y == 0 { unit_vec(0) } else { Vec::new() })
}

#[derive(Clone, Debug)]
pub struct OperadMap {
    pub source: Operad,
    pub target: Operad,
    pub map: SymSeqMap,
}

impl OperadMap {
    pub fn new(source: Operad, target: Operad, mats: &[RatMatrix]) -> Result<Self> {
        let f = Self::new_unchecked(source, target, mats)?;
        f.check()?;
        Ok(f)
    }

    pub fn new_unchecked(source: Operad, target: Operad, mats: &[RatMatrix]) -> Result<Self> {
        let map = SymSeqMap::from_totals(source.seq(), target.seq(), mats)?;
        Ok(OperadMap { source, target, map })
    }

    pub fn total(&self, r: usize) -> RatMatrix {
        self.map.total(r)
    }

    pub fn check(&self) -> Result<()> {
        self.map.check()?;
        let (s, t) = (&self.source, &self.target);
        for (m, n, i) in keys(s.bound().min(t.bound())) {
            let (fm, fn_, fr) = (self.total(m), self.total(n), self.total(m + n - 1));
            for x in 0..s.dim(m) {
                for y in 0..s.dim(n) {
                    let l = fr.mul_svec(&s.compose_basis(m, i, x, n, y));
                    let r = t.partial_unchecked(m, i, &fm.column(x), n, &fn_.column(y));
                    if l != r {
                        return usage(format!("map does not commute with ∘_{i} on arities ({m},{n})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, g: &OperadMap) -> Result<OperadMap> {
        let b = g.source.bound();
        let mats = (0..=b).map(|r| self.total(r).mul(&g.total(r))).collect::<Result<Vec<_>>>()?;
        OperadMap::new(g.source.clone(), self.target.clone(), &mats)
    }

    pub fn identity(p: &Operad) -> Self {
        let map = SymSeqMap::identity(p.seq());
        OperadMap { source: p.clone(), target: p.clone(), map }
    }
}

/// Tree-indexed operad: grafting on a tree module, with the given total
/// differential per arity (None keeps the internal one).
pub fn tree_operad(tm: &TreeModule, d: Option<&[RatMatrix]>) -> Result<Operad> {
    let seq = tree_seq(tm, d)?;
    Operad::from_fn(seq, |(m, n, i), x, y| tm.graft(m, x, n, y, i))
}

fn tree_seq(tm: &TreeModule, d: Option<&[RatMatrix]>) -> Result<SymSeq> {
    let base = tm.seq()?;
    let Some(d) = d else { return Ok(base) };
    let comps = (0..=tm.bound)
        .map(|r| {
            let c = tm.complex(r);
            let basis = c.degrees().map(|n| c.basis(n).to_vec()).collect();
            ChainComplex::from_total(c.t(), c.lo(), basis, &d[r])
        })
        .collect::<Result<Vec<_>>>()?;
    let actions = (0..=tm.bound).map(|r| base.transpositions(r).to_vec()).collect();
    SymSeq::new(comps, actions)
}

/// Free operad on a reduced symmetric sequence, with its tree basis.
#[derive(Clone, Debug)]
pub struct FreeOperad {
    pub trees: TreeModule,
    pub operad: Operad,
}

pub fn free_operad(m: &SymSeq, bound: usize) -> Result<FreeOperad> {
    let trees = TreeModule::new(m, bound)?;
    let operad = tree_operad(&trees, None)?;
    Ok(FreeOperad { trees, operad })
}

impl FreeOperad {
    /// The inclusion of generators as corollas.
    pub fn generator_inclusion(&self) -> Result<SymSeqMap> {
        let g = &self.trees.gens;
        let mats: Vec<RatMatrix> = (0..=self.trees.bound)
            .map(|k| {
                let n = self.operad.dim(k);
                matrix_from_fn(n, g.arity(k).total_dim(), |i| self.trees.corolla(k, i).map(unit_vec).unwrap_or_default())
            })
            .collect();
        let gens = g.with_bound(self.trees.bound)?;
        SymSeqMap::from_totals(&gens, self.operad.seq(), &mats)
    }

    /// The operad map F(M) → P extending phi: M → U(P) (phi[k]: M(k) → P(k)).
    pub fn extend(&self, target: &Operad, phi: &[RatMatrix]) -> Result<OperadMap> {
        extend_from(&self.trees, &self.operad, target, phi)
    }
}

/// Evaluation of decorated trees in `target`, vertex generators sent by phi.
pub fn extend_from(tm: &TreeModule, source: &Operad, target: &Operad, phi: &[RatMatrix]) -> Result<OperadMap> {
    let mats = eval_matrices(tm, target, phi)?;
    OperadMap::new(source.clone(), target.clone(), &mats)
}

pub fn eval_matrices(tm: &TreeModule, target: &Operad, phi: &[RatMatrix]) -> Result<Vec<RatMatrix>> {
    if target.bound() < tm.bound {
        return usage("target operad has a smaller arity bound");
    }
    let mut mats = Vec::new();
    for r in 0..=tm.bound {
        mats.push(matrix_from_fn(target.dim(r), tm.dim(r), |g| {
            let (t, tup) = tm.basis(r, g);
            let mut pos = 0;
            eval_sub(target, phi, t, tup, &mut pos).0
        }));
    }
    Ok(mats)
}

fn eval_sub(target: &Operad, phi: &[RatMatrix], t: &Tree, decs: &[usize], pos: &mut usize) -> (SVec, Vec<usize>) {
    match t {
        Tree::Leaf(i) => (unit_vec(0), vec![*i]),
        Tree::Node(ch) => {
            let k = ch.len();
            let id = *pos;
            *pos += 1;
            let mut acc = phi.get(k).map(|p| p.column(decs[id])).unwrap_or_default();
            let mut ar = k;
            let mut offset = 0;
            let mut leaves = Vec::new();
            for c in ch {
                let (v, lv) = eval_sub(target, phi, c, decs, pos);
                let n = lv.len();
                acc = target.partial_unchecked(ar, offset, &acc, n, &v);
                ar += n - 1;
                offset += n;
                leaves.extend(lv);
            }
            let mut sorted = leaves.clone();
            sorted.sort();
            let pi: Vec<usize> = leaves.iter().map(|l| sorted.binary_search(l).unwrap()).collect();
            if pi.iter().enumerate().any(|(a, b)| a != *b) {
                acc = target.seq().perm_action(ar, &pi).mul_svec(&acc);
            }
            (acc, sorted)
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cooperad {
    seq: SymSeq,
    dec: BTreeMap<Key, RatMatrix>,
    degs: Vec<Vec<i64>>,
}

impl Cooperad {
    pub fn new(seq: SymSeq, dec: BTreeMap<Key, RatMatrix>) -> Result<Self> {
        let q = Self::new_unchecked(seq, dec)?;
        q.check()?;
        Ok(q)
    }

    pub fn new_unchecked(seq: SymSeq, dec: BTreeMap<Key, RatMatrix>) -> Result<Self> {
        check_connected(&seq)?;
        for k in keys(seq.bound()) {
            let (m, n, _) = k;
            let Some(t) = dec.get(&k) else { return usage(format!("missing decomposition table {k:?}")) };
            if t.cols() != seq.arity(m + n - 1).total_dim() || t.rows() != seq.arity(m).total_dim() * seq.arity(n).total_dim() {
                return usage(format!("decomposition table {k:?} has the wrong shape"));
            }
        }
        let degs = (0..=seq.bound()).map(|r| seq.arity(r).global_degrees()).collect();
        Ok(Cooperad { seq, dec, degs })
    }

    pub fn seq(&self) -> &SymSeq {
        &self.seq
    }

    pub fn bound(&self) -> usize {
        self.seq.bound()
    }

    pub fn dim(&self, r: usize) -> usize {
        self.seq.arity(r).total_dim()
    }

    pub fn degree(&self, r: usize, x: usize) -> i64 {
        self.degs[r][x]
    }

    /// Δ_i(x) as pairs (a, b, coefficient).
    pub fn decompose(&self, (m, n, i): Key, x: usize) -> Vec<(usize, usize, Q)> {
        let Some(t) = self.dec.get(&(m, n, i)) else { return Vec::new() };
        let dn = self.dim(n).max(1);
        t.column(x).into_iter().map(|(row, c)| (row / dn, row % dn, c)).collect()
    }

    fn decompose_vec(&self, k: Key, v: &SVec) -> BTreeMap<(usize, usize), Q> {
        let mut out: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for (x, c) in v {
            for (a, b, w) in self.decompose(k, *x) {
                *out.entry((a, b)).or_insert_with(Q::zero) += c * w;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn check(&self) -> Result<()> {
        let b = self.bound();
        let seq = &self.seq;
        let d: Vec<RatMatrix> = (0..=b).map(|r| seq.arity(r).total_d()).collect();
        let fail = |what: String| -> Result<()> { Err(Error::Usage(format!("cooperad axiom fails: {what}"))) };
        type Triple = BTreeMap<(usize, usize, usize), Q>;
        let add = |m: &mut Triple, k: (usize, usize, usize), v: Q| {
            *m.entry(k).or_insert_with(Q::zero) += v;
        };
        for (m, n, i) in keys(b) {
            let r = m + n - 1;
            for x in 0..self.dim(r) {
                let dx = self.decompose((m, n, i), x);
                if m == 1 && dx != vec![(0, x, Q::one())] {
                    return fail(format!("left counit in arity {n}"));
                }
                if n == 1 && dx != vec![(x, 0, Q::one())] {
                    return fail(format!("right counit at slot {i} of arity {m}"));
                }
                // coderivation
                let lhs = self.decompose_vec((m, n, i), &d[r].column(x));
                let mut rhs: BTreeMap<(usize, usize), Q> = BTreeMap::new();
                for (a, bb, c) in &dx {
                    for (a2, w) in d[m].column(*a) {
                        *rhs.entry((a2, *bb)).or_insert_with(Q::zero) += c * w;
                    }
                    let s = koszul(self.degs[m][*a]);
                    for (b2, w) in d[n].column(*bb) {
                        *rhs.entry((*a, b2)).or_insert_with(Q::zero) += c * w * &s;
                    }
                }
                rhs.retain(|_, v| !v.is_zero());
                if lhs != rhs {
                    return fail(format!("d is not a coderivation for Δ_{i} on arities ({m},{n})"));
                }
                // equivariance: Δ_{σ(i)}(B·x) = (σ⊗1)Δ_i(x), and Δ_i(s_{i+j} x) = (1⊗s_j)Δ_i(x)
                for j in 0..m.saturating_sub(1) {
                    let s = transposition_perm(m, j);
                    let bx = seq.perm_action(r, &block_perm(&s, i, n)).mul_svec(&unit_vec(x));
                    let l = self.decompose_vec((m, n, s[i]), &bx);
                    let sm = seq.transposition(m, j);
                    let mut rr: BTreeMap<(usize, usize), Q> = BTreeMap::new();
                    for (a, bb, c) in &dx {
                        for (a2, w) in sm.column(*a) {
                            *rr.entry((a2, *bb)).or_insert_with(Q::zero) += c * w;
                        }
                    }
                    rr.retain(|_, v| !v.is_zero());
                    if l != rr {
                        return fail(format!("equivariance in the first factor, ({m},{n},{i}), s_{j}"));
                    }
                }
                for j in 0..n.saturating_sub(1) {
                    let l = self.decompose_vec((m, n, i), &seq.transposition(r, i + j).column(x));
                    let sn = seq.transposition(n, j);
                    let mut rr: BTreeMap<(usize, usize), Q> = BTreeMap::new();
                    for (a, bb, c) in &dx {
                        for (b2, w) in sn.column(*bb) {
                            *rr.entry((*a, b2)).or_insert_with(Q::zero) += c * w;
                        }
                    }
                    rr.retain(|_, v| !v.is_zero());
                    if l != rr {
                        return fail(format!("equivariance in the second factor, ({m},{n},{i}), s_{j}"));
                    }
                }
            }
            // coassociativity on x ∈ Q(m+n+p-2)
            for p in 1..=b + 2 - m - n {
                let big = m + n + p - 2;
                for x in 0..self.dim(big) {
                    for j in 0..n {
                        let mut l: Triple = BTreeMap::new();
                        for (u, z, c) in self.decompose((r, p, i + j), x) {
                            for (a, y, w) in self.decompose((m, n, i), u) {
                                add(&mut l, (a, y, z), &c * w);
                            }
                        }
                        let mut rr: Triple = BTreeMap::new();
                        for (a, w, c) in self.decompose((m, n + p - 1, i), x) {
                            for (y, z, v) in self.decompose((n, p, j), w) {
                                add(&mut rr, (a, y, z), &c * v);
                            }
                        }
                        l.retain(|_, v| !v.is_zero());
                        rr.retain(|_, v| !v.is_zero());
                        if l != rr {
                            return fail(format!("sequential coassociativity ({m},{n},{p}), slots {i},{j}"));
                        }
                    }
                    for k in i + 1..m {
                        let mut l: Triple = BTreeMap::new();
                        for (u, z, c) in self.decompose((r, p, k + n - 1), x) {
                            for (a, y, w) in self.decompose((m, n, i), u) {
                                add(&mut l, (a, y, z), &c * w);
                            }
                        }
                        let mut rr: Triple = BTreeMap::new();
                        for (u, y, c) in self.decompose((m + p - 1, n, i), x) {
                            for (a, z, w) in self.decompose((m, p, k), u) {
                                let s = koszul(self.degs[n][y] * self.degs[p][z]);
                                add(&mut rr, (a, y, z), &c * w * s);
                            }
                        }
                        l.retain(|_, v| !v.is_zero());
                        rr.retain(|_, v| !v.is_zero());
                        if l != rr {
                            return fail(format!("parallel coassociativity ({m},{n},{p}), slots {i},{k}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Decomposition tables transposed from a grafting table on the same basis.
fn cut_tables(tm: &TreeModule) -> BTreeMap<Key, RatMatrix> {
    let mut dec = BTreeMap::new();
    for k in keys(tm.bound) {
        let (m, n, i) = k;
        let dn = tm.dim(n);
        let t = matrix_from_fn(tm.dim(m + n - 1), tm.dim(m) * dn, |c| tm.graft(m, c / dn.max(1), n, c % dn.max(1), i));
        dec.insert(k, t.transpose());
    }
    dec
}

/// Cofree (conilpotent) cooperad on a reduced symmetric sequence: the same
/// tree basis as the free operad, decompositions cut along internal edges.
#[derive(Clone, Debug)]
pub struct CofreeCooperad {
    pub trees: TreeModule,
    pub cooperad: Cooperad,
}

pub fn cofree_cooperad(m: &SymSeq, bound: usize) -> Result<CofreeCooperad> {
    let trees = TreeModule::new(m, bound)?;
    let seq = trees.seq()?;
    let cooperad = Cooperad::new(seq, cut_tables(&trees))?;
    Ok(CofreeCooperad { trees, cooperad })
}

/// Tree cooperad with a modified total differential per arity.
pub fn tree_cooperad(tm: &TreeModule, d: Option<&[RatMatrix]>) -> Result<Cooperad> {
    Cooperad::new(tree_seq(tm, d)?, cut_tables(tm))
}

/// Q ⊗̄ C: 𝕜 in arity 1, Q(r) ⊗ C for r ≥ 2, decompositions through Δ_C.
pub fn cooperad_tensor_coalgebra(q: &Cooperad, c: &Coalgebra) -> Result<Cooperad> {
    let b = q.bound();
    let cc = &c.complex;
    let cdeg = cc.global_degrees();
    let mut sums: Vec<Option<TensorSum>> = Vec::new();
    let mut comps = Vec::new();
    let mut actions = Vec::new();
    for r in 0..=b {
        if r < 2 {
            comps.push(q.seq().arity(r).clone());
            actions.push(Vec::new());
            sums.push(None);
            continue;
        }
        let ts = TensorSum::new(vec!["qc".into()], vec![vec![q.seq().arity(r).clone(), cc.clone()]])?;
        let acts = (0..r - 1)
            .map(|j| {
                let s = q.seq().transposition(r, j);
                matrix_from_fn(ts.len(), ts.len(), |g| {
                    let (_, tup) = ts.elem(g);
                    s.column(tup[0]).into_iter().map(|(a, v)| (ts.index(0, &[a, tup[1]]).unwrap(), v)).collect::<Vec<_>>()
                })
            })
            .map(|m| sort_cols(&m))
            .collect();
        comps.push(ts.complex.clone());
        actions.push(acts);
        sums.push(Some(ts));
    }
    let seq = SymSeq::new(comps, actions)?;
    let dim = |r: usize| seq.arity(r).total_dim();
    let mut dec = BTreeMap::new();
    for k in keys(b) {
        let (m, n, _) = k;
        let r = m + n - 1;
        let dn = dim(n);
        let t = matrix_from_fn(dim(m) * dn, dim(r), |g| {
            let mut out: BTreeMap<usize, Q> = BTreeMap::new();
            if m == 1 {
                return unit_vec(g);
            }
            if n == 1 {
                return unit_vec(g * dn);
            }
            let ts = sums[r].as_ref().unwrap();
            let (_, tup) = ts.elem(g);
            let (x, cg) = (tup[0], tup[1]);
            let (tm, tn) = (sums[m].as_ref().unwrap(), sums[n].as_ref().unwrap());
            for (a, bb, w) in q.decompose(k, x) {
                for (c1, c2, v) in &c.delta[cg] {
                    let s = koszul(q.degree(n, bb) * cdeg[*c1]);
                    let left = tm.index(0, &[a, *c1]).unwrap();
                    let right = tn.index(0, &[bb, *c2]).unwrap();
                    *out.entry(left * dn + right).or_insert_with(Q::zero) += &w * v * s;
                }
            }
            btree_to_svec(out)
        });
        dec.insert(k, t);
    }
    Cooperad::new(seq, dec)
}

fn sort_cols(m: &RatMatrix) -> RatMatrix {
    let cols: Vec<SVec> = (0..m.cols())
        .map(|c| {
            let mut v = m.column(c);
            v.sort_by_key(|e| e.0);
            v
        })
        .collect();
    RatMatrix::from_columns(m.rows(), &cols)
}

/// Smallest operadic ideal containing the given homogeneous elements:
/// closed under d, the Σ actions and ∘_i with arbitrary elements on either side.
pub fn ideal_closure(p: &Operad, gens: &[(usize, SVec)]) -> Result<Vec<Echelon>> {
    let b = p.bound();
    let mut ech: Vec<Echelon> = (0..=b).map(|r| Echelon::empty(p.dim(r))).collect();
    let mut work: Vec<(usize, SVec)> = Vec::new();
    let push = |ech: &mut Vec<Echelon>, work: &mut Vec<(usize, SVec)>, r: usize, v: SVec| {
        if r <= b && !v.is_empty() && ech[r].insert(&v) {
            work.push((r, v));
        }
    };
    let degs: Vec<Vec<i64>> = (0..=b).map(|r| p.seq().arity(r).global_degrees()).collect();
    for (r, v) in gens {
        if *r > b {
            return usage("ideal generator beyond the arity bound");
        }
        // split into homogeneous pieces
        let mut by_deg: BTreeMap<i64, SVec> = BTreeMap::new();
        for (i, c) in v {
            by_deg.entry(degs[*r][*i]).or_default().push((*i, c.clone()));
        }
        for (_, piece) in by_deg {
            push(&mut ech, &mut work, *r, piece);
        }
    }
    let d: Vec<RatMatrix> = (0..=b).map(|r| p.seq().arity(r).total_d()).collect();
    while let Some((k, v)) = work.pop() {
        push(&mut ech, &mut work, k, d[k].mul_svec(&v));
        for j in 0..k.saturating_sub(1) {
            push(&mut ech, &mut work, k, p.seq().transposition(k, j).mul_svec(&v));
        }
        for m in 1..=b {
            if m + k - 1 > b {
                break;
            }
            for x in 0..p.dim(m) {
                for i in 0..m {
                    push(&mut ech, &mut work, m + k - 1, p.partial_unchecked(m, i, &unit_vec(x), k, &v));
                }
                for i in 0..k {
                    push(&mut ech, &mut work, m + k - 1, p.partial_unchecked(k, i, &v, m, &unit_vec(x)));
                }
            }
        }
    }
    Ok(ech)
}

/// P / I with its projection.
#[derive(Clone, Debug)]
pub struct QuotientOperad {
    pub operad: Operad,
    pub projection: OperadMap,
    pub quotients: Vec<QuotientComplex>,
}

pub fn quotient_operad(p: &Operad, gens: &[(usize, SVec)]) -> Result<QuotientOperad> {
    let ech = ideal_closure(p, gens)?;
    if ech.len() > 1 && ech[1].rank() > 0 {
        return Err(Error::Precondition("the ideal contains the unit".into()));
    }
    let b = p.bound();
    let quotients = (0..=b)
        .map(|r| {
            let rows: Vec<SVec> = ech[r].pivots.iter().map(|x| x.1.clone()).collect();
            QuotientComplex::new(p.seq().arity(r), &rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let comps = quotients.iter().map(|q| q.complex.clone()).collect();
    let actions = (0..=b)
        .map(|r| {
            (0..r.saturating_sub(1))
                .map(|j| {
                    let s = p.seq().transposition(r, j);
                    quotients[r].induced(&quotients[r], |g| s.column(g))
                })
                .collect()
        })
        .collect();
    let seq = SymSeq::new(comps, actions)?;
    let op = Operad::from_fn(seq, |(m, n, i), x, y| {
        let v = p.compose_basis(m, i, quotients[m].lift(x), n, quotients[n].lift(y));
        quotients[m + n - 1].project(&v)
    })?;
    let mats: Vec<RatMatrix> = quotients.iter().map(|q| q.projection_matrix()).collect();
    let projection = OperadMap::new(p.clone(), op.clone(), &mats)?;
    Ok(QuotientOperad { operad: op, projection, quotients })
}

/// Coequalizer of two operad maps with common source and target.
pub fn coequalizer(d0: &OperadMap, d1: &OperadMap) -> Result<QuotientOperad> {
    d0.check()?;
    d1.check()?;
    if d0.source.dims() != d1.source.dims() || d0.target.dims() != d1.target.dims() {
        return usage("coequalizer needs parallel maps");
    }
    let mut gens = Vec::new();
    for r in 0..=d0.source.bound().min(d0.target.bound()) {
        let (a, b) = (d0.total(r), d1.total(r));
        for x in 0..d0.source.dim(r) {
            let v = sv_sub(&a.column(x), &b.column(x));
            if !v.is_empty() {
                gens.push((r, v));
            }
        }
    }
    quotient_operad(&d0.target, &gens)
}

impl QuotientOperad {
    /// The unique map out of the quotient through which g factors, if g
    /// kills the ideal.
    pub fn factor(&self, g: &OperadMap) -> Result<OperadMap> {
        let b = self.operad.bound();
        for r in 0..=b {
            let gt = g.total(r);
            let q = &self.quotients[r];
            for k in 0..q.ambient_dim() {
                let v = gt.mul_svec(&unit_vec(k));
                let lifted: SVec = q.project(&unit_vec(k)).into_iter().map(|(j, c)| (q.lift(j), c)).collect();
                let back = gt.mul_svec(&lifted);
                if v != back {
                    return Err(Error::Precondition(format!("map does not vanish on the ideal in arity {r}")));
                }
            }
        }
        let mats: Vec<RatMatrix> = (0..=b)
            .map(|r| {
                let gt = g.total(r);
                let q = &self.quotients[r];
                matrix_from_fn(g.target.dim(r), q.complex.total_dim(), |k| gt.column(q.lift(k)))
            })
            .collect();
        OperadMap::new(self.operad.clone(), g.target.clone(), &mats)
    }
}

/// Suspension Σ^s of the arity ≥ 2 part, same actions.
pub fn suspend_reduced(p: &SymSeq, s: i64) -> Result<SymSeq> {
    let comps = (0..=p.bound())
        .map(|r| {
            if r < 2 {
                return Ok(ChainComplex::zero(0));
            }
            let c = p.arity(r).trimmed();
            let c = c.with_t(c.t().min(c.t() + s))?;
            shift(&c, s)
        })
        .collect::<Result<Vec<_>>>()?;
    let actions = (0..=p.bound()).map(|r| if r < 2 { Vec::new() } else { p.transpositions(r).to_vec() }).collect();
    SymSeq::new(comps, actions)
}

/// Arity-wise augmentation ideal of a connected operad's underlying sequence.
pub fn augmentation_ideal(p: &SymSeq) -> Result<SymSeq> {
    suspend_reduced(p, 0)
}

/// The canonical pair F(U F(P̄)) ⇉ F(P̄) for a connected operad P, built on
/// the reduced generators P̄ = arities ≥ 2.
pub struct CanonicalPair {
    pub inner: FreeOperad,
    pub outer: FreeOperad,
    /// Adjoint of the identity of U F(P̄): evaluation of nested trees.
    pub d0: OperadMap,
    /// F(U ε_P): ε_P applied to every vertex decoration.
    pub d1: OperadMap,
    /// ε_P : F(P̄) → P.
    pub counit: OperadMap,
}

pub fn canonical_pair(p: &Operad) -> Result<CanonicalPair> {
    let b = p.bound();
    let pbar = augmentation_ideal(p.seq())?;
    let inner = free_operad(&pbar, b)?;
    let id_mats: Vec<RatMatrix> = (0..=b).map(|r| if r >= 2 { RatMatrix::identity(p.dim(r)) } else { RatMatrix::zero(p.dim(r), 0) }).collect();
    let counit = inner.extend(p, &id_mats)?;
    let fbar = augmentation_ideal(inner.operad.seq())?;
    let outer = free_operad(&fbar, b)?;
    let ident: Vec<RatMatrix> = (0..=b)
        .map(|r| if r >= 2 { RatMatrix::identity(inner.operad.dim(r)) } else { RatMatrix::zero(inner.operad.dim(r), 0) })
        .collect();
    let d0 = outer.extend(&inner.operad, &ident)?;
    let push: Vec<RatMatrix> = (0..=b)
        .map(|r| {
            if r < 2 {
                return RatMatrix::zero(inner.operad.dim(r), 0);
            }
            let e = counit.total(r);
            matrix_from_fn(inner.operad.dim(r), inner.operad.dim(r), |x| {
                e.column(x).into_iter().map(|(a, c)| (inner.trees.corolla(r, a).expect("corolla"), c)).collect::<Vec<_>>()
            })
        })
        .map(|m| sort_cols(&m))
        .collect();
    let d1 = outer.extend(&inner.operad, &push)?;
    Ok(CanonicalPair { inner, outer, d0, d1, counit })
}

/// P generated by one binary operation of degree 0 with the trivial action.
pub fn binary_generator(bound: usize) -> Result<SymSeq> {
    SymSeq::concentrated(2, &ChainComplex::ground_labeled(crate::label::Label::atom("mu")), bound, false)
}

/// The free operad F(μ) on one commutative binary operation.
pub fn free_binary(bound: usize) -> Result<FreeOperad> {
    free_operad(&binary_generator(bound)?, bound)
}

/// F(μ)/(associativity): the commutative operad, one dimension per arity.
pub fn commutative_operad(bound: usize) -> Result<QuotientOperad> {
    let f = free_binary(bound)?;
    if bound < 3 {
        return quotient_operad(&f.operad, &[]);
    }
    let mu = f.trees.corolla(2, 0).ok_or_else(|| internal::<()>("missing corolla").unwrap_err())?;
    let left = f.operad.compose_basis(2, 0, mu, 2, mu);
    let right = f.operad.compose_basis(2, 1, mu, 2, mu);
    quotient_operad(&f.operad, &[(3, sv_sub(&left, &right))])
}

/// Chain map of arity r underlying an operad map.
pub fn arity_map(f: &OperadMap, r: usize) -> Result<ChainMap> {
    ChainMap::from_total(f.source.seq().arity(r), f.target.seq().arity(r), 0, &f.total(r))
}

pub fn index_of_tree(tm: &TreeModule, r: usize, t: &Tree) -> Option<usize> {
    tm.arities.get(r)?.tree_index(t)
}

pub fn tree_index_map(tm: &TreeModule, r: usize) -> HashMap<Tree, usize> {
    tm.arities[r].trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalg::sk0_coalgebra;

    #[test]
    fn block_perms() {
        // σ = (0 1) on 3 slots, slot 0 widened to 2 points
        assert_eq!(block_perm(&[1, 0, 2], 0, 2), vec![1, 2, 0, 3]);
        assert_eq!(block_perm(&[1, 0, 2], 1, 2), vec![2, 0, 1, 3]);
    }

    #[test]
    fn free_binary_operad() {
        let f = free_binary(4).unwrap();
        assert_eq!(f.operad.dims(), vec![0, 1, 1, 3, 15]);
        let mu = f.trees.corolla(2, 0).unwrap();
        let l = f.operad.compose_basis(2, 0, mu, 2, mu);
        let r = f.operad.compose_basis(2, 1, mu, 2, mu);
        assert_ne!(l, r);
        let (tl, _) = f.trees.basis(3, l[0].0);
        let (tr, _) = f.trees.basis(3, r[0].0);
        assert_eq!(tl.token(), "((1 2) 3)");
        assert_eq!(tr.token(), "(1 (2 3))");
        // unit laws
        assert_eq!(f.operad.partial(2, 1, &unit_vec(mu), 1, &unit_vec(0)).unwrap(), unit_vec(mu));
        assert_eq!(f.operad.partial(1, 0, &unit_vec(0), 2, &unit_vec(mu)).unwrap(), unit_vec(mu));
        assert!(f.operad.partial(2, 2, &unit_vec(mu), 1, &unit_vec(0)).is_err());
        // the three 3-leaf trees come from grafting and the Σ_3 action
        let s = f.operad.seq();
        let mut e = Echelon::empty(3);
        for v in [l.clone(), r.clone(), s.transposition(3, 1).mul_svec(&l)] {
            e.insert(&v);
        }
        assert_eq!(e.rank(), 3);
    }

    #[test]
    fn free_extension_of_inclusion_is_identity() {
        let f = free_binary(4).unwrap();
        let inc = f.generator_inclusion().unwrap();
        let mats: Vec<RatMatrix> = (0..=4).map(|r| inc.total(r)).collect();
        let ext = f.extend(&f.operad, &mats).unwrap();
        for r in 0..=4 {
            assert_eq!(ext.total(r), RatMatrix::identity(f.operad.dim(r)));
        }
    }

    #[test]
    fn cofree_cuts() {
        let g = binary_generator(4).unwrap();
        let c = cofree_cooperad(&g, 4).unwrap();
        // partial cuts only see subtrees on consecutive leaves
        for x in 0..3 {
            let cuts: usize = (0..2).map(|i| c.cooperad.decompose((2, 2, i), x).len()).sum();
            let t = c.trees.basis(3, x).0.token();
            assert_eq!(cuts, if t == "((1 3) 2)" { 0 } else { 1 }, "{t}");
        }
        let z = cofree_cooperad(&SymSeq::zero(4).unwrap(), 4).unwrap();
        assert_eq!((0..=4).map(|r| z.cooperad.dim(r)).collect::<Vec<_>>(), vec![0, 1, 0, 0, 0]);
    }

    #[test]
    fn commutative_quotient() {
        let c = commutative_operad(4).unwrap();
        assert_eq!(c.operad.dims(), vec![0, 1, 1, 1, 1]);
    }

    #[test]
    fn coequalizers() {
        let f = free_binary(4).unwrap();
        let cp = canonical_pair(&f.operad).unwrap();
        let q = coequalizer(&cp.d0, &cp.d1).unwrap();
        assert_eq!(q.operad.dims(), f.operad.dims());
        let same = coequalizer(&cp.d0, &cp.d0).unwrap();
        assert_eq!(same.operad.dims(), cp.inner.operad.dims());
        // ε_P coequalizes the pair and factors through the coequalizer
        let g = q.factor(&cp.counit).unwrap();
        for r in 0..=4 {
            assert_eq!(g.total(r).rank(), f.operad.dim(r));
        }
        let com = commutative_operad(4).unwrap();
        let cp = canonical_pair(&com.operad).unwrap();
        let q = coequalizer(&cp.d0, &cp.d1).unwrap();
        assert_eq!(q.operad.dims(), vec![0, 1, 1, 1, 1]);
    }

    #[test]
    fn tensor_with_coalgebra() {
        let g = binary_generator(4).unwrap();
        let c = cofree_cooperad(&g, 4).unwrap();
        let qc = cooperad_tensor_coalgebra(&c.cooperad, &sk0_coalgebra(1)).unwrap();
        for r in 2..=4 {
            assert_eq!(qc.dim(r), 2 * c.cooperad.dim(r));
        }
        let q1 = cooperad_tensor_coalgebra(&c.cooperad, &Coalgebra::ground()).unwrap();
        assert_eq!((0..=4).map(|r| q1.dim(r)).collect::<Vec<_>>(), (0..=4).map(|r| c.cooperad.dim(r)).collect::<Vec<_>>());
    }
}
