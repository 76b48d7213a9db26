//! Symmetric sequences of chain complexes and the composition product.
//!
//! Arity r carries a complex and one matrix per adjacent transposition
//! s_i = (i i+1), acting on the total space. A general permutation acts
//! through a reduced word.

use crate::chain::{homology, is_quasi_iso, parse_chain_block, ChainComplex, ChainMap, QuasiIsoVerdict};
use crate::error::{usage, Error, Result};
use crate::exactlin::{fmt_q, parse_q, RatMatrix, SVec, Q};
use crate::label::Label;
use crate::multi::{btree_to_svec, koszul_permutation, matrix_from_fn, QuotientComplex, TensorSum};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Largest arity any symmetric sequence may carry.
pub const MAX_ARITY: usize = 8;

#[derive(Clone, Debug)]
pub struct SymSeq {
    comps: Vec<ChainComplex>,
    actions: Vec<Vec<RatMatrix>>,
    zero: ChainComplex,
}

/// All permutations of 0..n in lexicographic order.
pub fn all_perms(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

/// Adjacent swaps a_1, …, a_m with σ = s_{a_m} ⋯ s_{a_1}.
pub fn perm_word(perm: &[usize]) -> Vec<usize> {
    let mut p = perm.to_vec();
    let mut w = Vec::new();
    loop {
        let Some(a) = (0..p.len().saturating_sub(1)).find(|&a| p[a] > p[a + 1]) else { break };
        p.swap(a, a + 1);
        w.push(a);
    }
    w
}

pub fn compose_perms(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

/// A permutation with the given cycle lengths on consecutive points.
pub fn cycle_type_rep(lengths: &[usize]) -> Vec<usize> {
    let mut p = Vec::new();
    let mut start = 0;
    for &l in lengths {
        for k in 0..l {
            p.push(start + (k + 1) % l);
        }
        start += l;
    }
    p
}

/// Integer partitions of n, largest part first.
pub fn integer_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            go(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Set partitions of 0..n as restricted growth strings (blocks numbered by
/// their minima).
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(n: usize, cur: &mut Vec<usize>, nb: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=nb {
            cur.push(b);
            go(n, cur, nb.max(b + 1), out);
            cur.pop();
        }
    }
    go(n, &mut cur, 0, &mut out);
    out
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn perm_string(p: &[usize]) -> String {
    let body: Vec<String> = p.iter().map(|x| (x + 1).to_string()).collect();
    format!("p{}", body.join("."))
}

fn check_square(m: &RatMatrix, c: &ChainComplex, what: &str) -> Result<()> {
    let n = c.total_dim();
    if m.rows() != n || m.cols() != n {
        return usage(format!("{what}: action matrix has shape {}x{}, expected {n}x{n}", m.rows(), m.cols()));
    }
    let degs = c.global_degrees();
    if m.entries().iter().any(|(r, k, _)| degs[*r] != degs[*k]) {
        return usage(format!("{what}: action does not preserve degree"));
    }
    Ok(())
}

impl SymSeq {
    /// Validates shapes, chain-map property and the Coxeter relations.
    pub fn new(comps: Vec<ChainComplex>, actions: Vec<Vec<RatMatrix>>) -> Result<Self> {
        let s = Self::new_unchecked(comps, actions)?;
        s.check()?;
        Ok(s)
    }

    pub fn new_unchecked(comps: Vec<ChainComplex>, actions: Vec<Vec<RatMatrix>>) -> Result<Self> {
        if comps.is_empty() || comps.len() > MAX_ARITY + 1 {
            return usage(format!("arity bound must lie in 0..={MAX_ARITY}"));
        }
        if actions.len() != comps.len() {
            return usage("one action list per arity is required");
        }
        for (r, a) in actions.iter().enumerate() {
            if a.len() != r.saturating_sub(1) {
                return usage(format!("arity {r} needs {} transposition matrices", r.saturating_sub(1)));
            }
            for m in a {
                check_square(m, &comps[r], &format!("arity {r}"))?;
            }
        }
        Ok(SymSeq { comps, actions, zero: ChainComplex::zero(0) })
    }

    pub fn check(&self) -> Result<()> {
        for r in 0..self.comps.len() {
            let c = &self.comps[r];
            let n = c.total_dim();
            let d = c.total_d();
            let id = RatMatrix::identity(n);
            let a = &self.actions[r];
            for (i, s) in a.iter().enumerate() {
                if s.mul(&d)? != d.mul(s)? {
                    return usage(format!("arity {r}: s_{i} is not a chain map"));
                }
                if s.mul(s)? != id {
                    return usage(format!("arity {r}: s_{i} is not an involution"));
                }
                for (j, t) in a.iter().enumerate().skip(i + 1) {
                    let st = s.mul(t)?;
                    let ts = t.mul(s)?;
                    if j == i + 1 {
                        if st.mul(s)? != ts.mul(t)? {
                            return usage(format!("arity {r}: braid relation fails for s_{i}, s_{j}"));
                        }
                    } else if st != ts {
                        return usage(format!("arity {r}: s_{i} and s_{j} do not commute"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn bound(&self) -> usize {
        self.comps.len() - 1
    }

    pub fn arity(&self, r: usize) -> &ChainComplex {
        self.comps.get(r).unwrap_or(&self.zero)
    }

    pub fn components(&self) -> &[ChainComplex] {
        &self.comps
    }

    /// Matrix of s_i = (i i+1), 0-based, on arity r.
    pub fn transposition(&self, r: usize, i: usize) -> RatMatrix {
        match self.actions.get(r).and_then(|a| a.get(i)) {
            Some(m) => m.clone(),
            None => RatMatrix::zero(self.arity(r).total_dim(), self.arity(r).total_dim()),
        }
    }

    pub fn transpositions(&self, r: usize) -> &[RatMatrix] {
        self.actions.get(r).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Matrix of an arbitrary permutation σ (σ[i] = image of i) on arity r.
    pub fn perm_action(&self, r: usize, perm: &[usize]) -> RatMatrix {
        let n = self.arity(r).total_dim();
        let mut acc = RatMatrix::identity(n);
        for a in perm_word(perm) {
            acc = self.actions[r][a].mul(&acc).expect("square");
        }
        acc
    }

    /// (1/r!) Σ_σ σ on arity r.
    pub fn symmetrizer(&self, r: usize) -> RatMatrix {
        let n = self.arity(r).total_dim();
        let mut acc = RatMatrix::zero(n, n);
        let perms = all_perms(r);
        for p in &perms {
            acc = acc.add(&self.perm_action(r, p)).expect("square");
        }
        acc.scale(&Q::new(1.into(), (perms.len() as i64).into()))
    }

    /// Trace of σ on the degree-n part of arity r.
    pub fn character(&self, r: usize, n: i64, perm: &[usize]) -> Q {
        let c = self.arity(r);
        let off = c.offset(n);
        let m = self.perm_action(r, perm);
        let mut tr = Q::zero();
        for (i, j, v) in m.entries() {
            if i == j && *i >= off && *i < off + c.dim(n) {
                tr += v;
            }
        }
        tr
    }

    pub fn zero(bound: usize) -> Result<Self> {
        let comps = vec![ChainComplex::zero(0); bound + 1];
        let actions = (0..=bound).map(|r| vec![RatMatrix::zero(0, 0); r.saturating_sub(1)]).collect();
        Self::new_unchecked(comps, actions)
    }

    /// c in arity r with the trivial action (sign = false) or the sign action.
    pub fn concentrated(r: usize, c: &ChainComplex, bound: usize, sign: bool) -> Result<Self> {
        if r > bound {
            return usage("arity exceeds the bound");
        }
        let mut comps = vec![ChainComplex::zero(0); bound + 1];
        comps[r] = c.clone();
        let n = c.total_dim();
        let mut actions: Vec<Vec<RatMatrix>> =
            (0..=bound).map(|k| vec![RatMatrix::zero(0, 0); k.saturating_sub(1)]).collect();
        let g = if sign { RatMatrix::identity(n).neg() } else { RatMatrix::identity(n) };
        actions[r] = vec![g; r.saturating_sub(1)];
        Self::new(comps, actions)
    }

    /// Direct sum arity by arity.
    pub fn direct_sum(parts: &[SymSeq]) -> Result<Self> {
        let bound = parts.iter().map(|p| p.bound()).max().unwrap_or(0);
        let mut comps = Vec::new();
        let mut actions = Vec::new();
        for r in 0..=bound {
            let cs: Vec<ChainComplex> = parts.iter().map(|p| p.arity(r).clone()).collect();
            let s = crate::chain::direct_sum(&cs)?;
            let idx = sum_embeddings(&cs, &s);
            let mut acts = Vec::new();
            for i in 0..r.saturating_sub(1) {
                let mut trip = Vec::new();
                for (k, p) in parts.iter().enumerate() {
                    if p.arity(r).total_dim() == 0 {
                        continue;
                    }
                    for (a, b, v) in p.transposition(r, i).entries() {
                        trip.push((idx[k][*a], idx[k][*b], v.clone()));
                    }
                }
                acts.push(RatMatrix::new(s.total_dim(), s.total_dim(), trip)?);
            }
            comps.push(s);
            actions.push(acts);
        }
        Self::new(comps, actions)
    }

    /// Arity 0 and arity 1 vanish.
    pub fn is_reduced(&self) -> bool {
        self.arity(0).total_dim() == 0 && self.arity(1).total_dim() == 0
    }

    pub fn with_bound(&self, bound: usize) -> Result<Self> {
        let mut comps = Vec::new();
        let mut actions = Vec::new();
        for r in 0..=bound {
            comps.push(self.arity(r).clone());
            actions.push(if r <= self.bound() {
                self.actions[r].clone()
            } else {
                vec![RatMatrix::zero(0, 0); r.saturating_sub(1)]
            });
        }
        Self::new_unchecked(comps, actions)
    }

    pub fn dims(&self) -> Vec<Vec<(i64, usize)>> {
        self.comps.iter().map(|c| c.trimmed().dims()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("symseq bound={}\n", self.bound());
        for r in 0..=self.bound() {
            s.push_str(&format!("arity {r}\n"));
            s.push_str(&self.comps[r].to_text());
            for (i, m) in self.actions[r].iter().enumerate() {
                s.push_str(&format!("action {i} {} {}\n", m.rows(), m.nnz()));
                for (a, b, v) in m.entries() {
                    s.push_str(&format!("{a} {b} {}\n", fmt_q(v)));
                }
            }
        }
        s.push_str("end\n");
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let perr = |m: &str| Error::Parse(format!("symseq: {m}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).peekable();
        let head = lines.next().ok_or_else(|| perr("empty input"))?;
        let bound: usize = head
            .strip_prefix("symseq bound=")
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| perr("bad header"))?;
        let mut comps = Vec::new();
        let mut actions = Vec::new();
        for r in 0..=bound {
            if lines.next() != Some(format!("arity {r}").as_str()) {
                return Err(perr("expected arity line"));
            }
            comps.push(parse_chain_block(&mut lines)?);
            let mut acts = Vec::new();
            for i in 0..r.saturating_sub(1) {
                let h = lines.next().ok_or_else(|| perr("missing action"))?;
                let f: Vec<&str> = h.split_whitespace().collect();
                if f.len() != 4 || f[0] != "action" || f[1] != i.to_string() {
                    return Err(perr("bad action header"));
                }
                let n: usize = f[2].parse().map_err(|_| perr("bad size"))?;
                let nnz: usize = f[3].parse().map_err(|_| perr("bad nnz"))?;
                let mut trip = Vec::new();
                for _ in 0..nnz {
                    let l = lines.next().ok_or_else(|| perr("missing entry"))?;
                    let e: Vec<&str> = l.split_whitespace().collect();
                    if e.len() != 3 {
                        return Err(perr("bad entry"));
                    }
                    let a = e[0].parse().map_err(|_| perr("bad row"))?;
                    let b = e[1].parse().map_err(|_| perr("bad column"))?;
                    trip.push((a, b, parse_q(e[2])?));
                }
                acts.push(RatMatrix::new(n, n, trip)?);
            }
            actions.push(acts);
        }
        if lines.next() != Some("end") {
            return Err(perr("missing end"));
        }
        Self::new(comps, actions)
    }
}

/// Global index maps of each summand into a direct sum.
pub fn sum_embeddings(parts: &[ChainComplex], s: &ChainComplex) -> Vec<Vec<usize>> {
    parts
        .iter()
        .enumerate()
        .map(|(k, c)| {
            (0..c.total_dim())
                .map(|g| {
                    let (n, i) = c.locate(g);
                    let before: usize = parts[..k].iter().map(|p| p.dim(n)).sum();
                    s.offset(n) + before + i
                })
                .collect()
        })
        .collect()
}

/// 𝕀: the ground field in arity 1.
pub fn unit_seq(bound: usize) -> Result<SymSeq> {
    SymSeq::concentrated(1, &ChainComplex::ground(), bound.max(1), false)
}

/// k ⊗ 𝕜[Σ_r] in arity r with the left regular action on the group factor.
pub fn free_sigma_seq(k: &ChainComplex, r: usize, bound: usize) -> Result<SymSeq> {
    if r > bound {
        return usage("arity exceeds the bound");
    }
    let perms = all_perms(r);
    let pidx: HashMap<Vec<usize>, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let group = ChainComplex::graded(0, vec![(0, perms.iter().map(|p| Label::atom(perm_string(p))).collect())])?;
    let ts = TensorSum::new(vec!["reg".into()], vec![vec![k.clone(), group]])?;
    let mut acts = Vec::new();
    for a in 0..r.saturating_sub(1) {
        let m = matrix_from_fn(ts.len(), ts.len(), |g| {
            let (_, tup) = ts.elem(g);
            let sg: Vec<usize> = perms[tup[1]].iter().map(|&x| if x == a { a + 1 } else if x == a + 1 { a } else { x }).collect();
            vec![(ts.index(0, &[tup[0], pidx[&sg]]).unwrap(), Q::one())]
        });
        acts.push(m);
    }
    let mut comps = vec![ChainComplex::zero(0); bound + 1];
    let mut actions: Vec<Vec<RatMatrix>> =
        (0..=bound).map(|k| vec![RatMatrix::zero(0, 0); k.saturating_sub(1)]).collect();
    comps[r] = ts.complex.clone();
    actions[r] = acts;
    SymSeq::new(comps, actions)
}

/// Degree-zero equivariant map between symmetric sequences.
#[derive(Clone, Debug)]
pub struct SymSeqMap {
    pub source: SymSeq,
    pub target: SymSeq,
    pub comps: Vec<ChainMap>,
}

impl SymSeqMap {
    pub fn new(source: SymSeq, target: SymSeq, comps: Vec<ChainMap>) -> Result<Self> {
        let f = SymSeqMap { source, target, comps };
        f.check()?;
        Ok(f)
    }

    /// Builds from total matrices per arity.
    pub fn from_totals(source: &SymSeq, target: &SymSeq, mats: &[RatMatrix]) -> Result<Self> {
        let bound = source.bound().max(target.bound());
        if mats.len() != bound + 1 {
            return usage("one matrix per arity is required");
        }
        let comps = (0..=bound)
            .map(|r| ChainMap::from_total(source.arity(r), target.arity(r), 0, &mats[r]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source.clone(), target.clone(), comps)
    }

    pub fn check(&self) -> Result<()> {
        let bound = self.source.bound().max(self.target.bound());
        if self.comps.len() != bound + 1 {
            return usage("one component per arity is required");
        }
        for r in 0..=bound {
            let f = &self.comps[r];
            if f.shift() != 0 {
                return usage("symmetric sequence maps have degree 0");
            }
            f.check()?;
            let ft = f.total();
            for i in 0..r.saturating_sub(1) {
                let lhs = self.target.transposition(r, i).mul(&ft)?;
                let rhs = ft.mul(&self.source.transposition(r, i))?;
                if lhs != rhs {
                    return usage(format!("arity {r}: map does not commute with s_{i}"));
                }
            }
        }
        Ok(())
    }

    pub fn identity(s: &SymSeq) -> Self {
        let comps = (0..=s.bound()).map(|r| ChainMap::identity(s.arity(r))).collect();
        SymSeqMap { source: s.clone(), target: s.clone(), comps }
    }

    pub fn total(&self, r: usize) -> RatMatrix {
        match self.comps.get(r) {
            Some(f) => f.total(),
            None => RatMatrix::zero(self.target.arity(r).total_dim(), self.source.arity(r).total_dim()),
        }
    }

    pub fn compose(&self, g: &SymSeqMap) -> Result<SymSeqMap> {
        let comps = self.comps.iter().zip(&g.comps).map(|(a, b)| a.compose(b)).collect::<Result<Vec<_>>>()?;
        SymSeqMap::new(g.source.clone(), self.target.clone(), comps)
    }

    pub fn is_injective(&self) -> bool {
        self.comps.iter().all(|f| f.is_injective())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelwiseVerdict {
    pub ok: bool,
    pub failing_arities: Vec<usize>,
    pub arities: Vec<QuasiIsoVerdict>,
}

pub fn is_levelwise_quasi_iso(f: &SymSeqMap) -> Result<LevelwiseVerdict> {
    let mut arities = Vec::new();
    let mut failing = Vec::new();
    for (r, c) in f.comps.iter().enumerate() {
        let v = is_quasi_iso(c, None)?;
        if !v.ok {
            failing.push(r);
        }
        arities.push(v);
    }
    Ok(LevelwiseVerdict { ok: failing.is_empty(), failing_arities: failing, arities })
}

/// Summand key of the composite: block assignment (restricted growth string)
/// and the number of empty blocks placed after the nonempty ones.
pub type BlockKey = (Vec<usize>, usize);

/// One arity of m∘n: the sum over orbit representatives, before and after
/// the identification by the stabilizers of empty blocks.
#[derive(Clone, Debug)]
pub struct CompositeArity {
    pub sum: TensorSum,
    pub quot: QuotientComplex,
    pub keys: Vec<BlockKey>,
    key_index: HashMap<BlockKey, usize>,
}

impl CompositeArity {
    pub fn summand(&self, key: &BlockKey) -> Option<usize> {
        self.key_index.get(key).copied()
    }
}

#[derive(Clone, Debug)]
pub struct Composite {
    pub seq: SymSeq,
    pub arities: Vec<CompositeArity>,
}

fn blocks_of(rgs: &[usize]) -> Vec<Vec<usize>> {
    let nb = rgs.iter().map(|b| b + 1).max().unwrap_or(0);
    let mut out = vec![Vec::new(); nb];
    for (i, b) in rgs.iter().enumerate() {
        out[*b].push(i);
    }
    out
}

fn key_tag(key: &BlockKey) -> String {
    let mut parts: Vec<String> = blocks_of(&key.0)
        .iter()
        .map(|b| b.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join("."))
        .collect();
    parts.extend(std::iter::repeat("_".to_string()).take(key.1));
    format!("b{}", parts.join("|"))
}

/// m∘n in arities 0..=bound.
pub fn compose(m: &SymSeq, n: &SymSeq) -> Result<SymSeq> {
    Ok(compose_full(m, n, m.bound().min(n.bound()))?.seq)
}

pub fn compose_to(m: &SymSeq, n: &SymSeq, bound: usize) -> Result<SymSeq> {
    Ok(compose_full(m, n, bound)?.seq)
}

pub fn compose_full(m: &SymSeq, n: &SymSeq, bound: usize) -> Result<Composite> {
    if bound > MAX_ARITY {
        return usage(format!("composite arity {bound} exceeds the bound {MAX_ARITY}"));
    }
    let empties_allowed = n.arity(0).total_dim() > 0;
    let mut comps = Vec::new();
    let mut actions = Vec::new();
    let mut arities = Vec::new();
    for r in 0..=bound {
        let mut keys: Vec<BlockKey> = Vec::new();
        for rgs in set_partitions(r) {
            let j = rgs.iter().map(|b| b + 1).max().unwrap_or(0);
            let max_e = if empties_allowed { m.bound().saturating_sub(j) } else { 0 };
            for e in 0..=max_e {
                if j + e <= m.bound() {
                    keys.push((rgs.clone(), e));
                }
            }
        }
        let mut factors = Vec::new();
        for (rgs, e) in &keys {
            let bl = blocks_of(rgs);
            let mut fs = vec![m.arity(bl.len() + e).clone()];
            for b in &bl {
                fs.push(n.arity(b.len()).clone());
            }
            for _ in 0..*e {
                fs.push(n.arity(0).clone());
            }
            factors.push(fs);
        }
        let tags = keys.iter().map(key_tag).collect();
        let sum = TensorSum::new(tags, factors)?;
        let key_index: HashMap<BlockKey, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        // identification of permuted empty blocks
        let mut rels = Vec::new();
        for g in 0..sum.len() {
            let (s, tup) = sum.elem(g);
            let (rgs, e) = &keys[s];
            let j = blocks_of(rgs).len();
            for a in 0..e.saturating_sub(1) {
                let img = swap_blocks(m, &sum, s, tup, j + a);
                let mut v: BTreeMap<usize, Q> = img.into_iter().collect();
                *v.entry(g).or_insert_with(Q::zero) -= Q::one();
                let v = btree_to_svec(v);
                if !v.is_empty() {
                    rels.push(v);
                }
            }
        }
        let quot = if rels.is_empty() { QuotientComplex::trivial(&sum.complex) } else { QuotientComplex::new(&sum.complex, &rels)? };
        let arity = CompositeArity { sum, quot, keys, key_index };
        let mut acts = Vec::new();
        for i in 0..r.saturating_sub(1) {
            acts.push(arity.quot.induced(&arity.quot, |g| composite_transposition(m, n, &arity, g, i)));
        }
        comps.push(arity.quot.complex.clone());
        actions.push(acts);
        arities.push(arity);
    }
    let seq = SymSeq::new(comps, actions)?;
    Ok(Composite { seq, arities })
}

/// Applies the block transposition (a a+1) of Σ_k to an element: m-factor by
/// s_a, the two n-factors exchanged with the Koszul sign.
fn swap_blocks(m: &SymSeq, sum: &TensorSum, s: usize, tup: &[usize], a: usize) -> Vec<(usize, Q)> {
    let col = m.transposition(tup.len() - 1, a).column(tup[0]);
    let degs: Vec<i64> = (1..tup.len()).map(|p| sum.factor_degree(s, p, tup[p])).collect();
    let mut perm: Vec<usize> = (0..degs.len()).collect();
    perm.swap(a, a + 1);
    let sign = koszul_permutation(&degs, &perm);
    let mut out = BTreeMap::new();
    let mut parts: Vec<SVec> = vec![col];
    for p in 0..degs.len() {
        parts.push(vec![(tup[1 + perm[p]], Q::one())]);
    }
    sum.expand_into(&mut out, s, &parts, &sign);
    out.into_iter().collect()
}

/// Action of s_i (on points i, i+1) on a basis element of the ambient sum.
fn composite_transposition(m: &SymSeq, n: &SymSeq, ar: &CompositeArity, g: usize, i: usize) -> SVec {
    let (s, tup) = ar.sum.elem(g);
    let (rgs, e) = &ar.keys[s];
    let (a, b) = (rgs[i], rgs[i + 1]);
    let bl = blocks_of(rgs);
    if a == b {
        let pos = bl[a].iter().position(|&x| x == i).unwrap();
        let col = n.transposition(bl[a].len(), pos).column(tup[1 + a]);
        let mut parts: Vec<SVec> = tup.iter().map(|&x| vec![(x, Q::one())]).collect();
        parts[1 + a] = col;
        let mut out = BTreeMap::new();
        ar.sum.expand_into(&mut out, s, &parts, &Q::one());
        return btree_to_svec(out);
    }
    let mut new_rgs = rgs.clone();
    new_rgs[i] = b;
    new_rgs[i + 1] = a;
    let swap_order = bl[a][0] == i && bl[b][0] == i + 1;
    if !swap_order {
        let t = ar.summand(&(new_rgs, *e)).expect("summand present");
        return vec![(ar.sum.index(t, tup).expect("tuple present"), Q::one())];
    }
    // block minima exchanged: relabel blocks a <-> b (b = a + 1)
    for x in new_rgs.iter_mut() {
        if *x == a {
            *x = b;
        } else if *x == b {
            *x = a;
        }
    }
    let t = ar.summand(&(new_rgs, *e)).expect("summand present");
    let degs: Vec<i64> = (1..tup.len()).map(|p| ar.sum.factor_degree(s, p, tup[p])).collect();
    let mut perm: Vec<usize> = (0..degs.len()).collect();
    perm.swap(a, b);
    let sign = koszul_permutation(&degs, &perm);
    let mut parts: Vec<SVec> = vec![m.transposition(tup.len() - 1, a.min(b)).column(tup[0])];
    for p in 0..degs.len() {
        parts.push(vec![(tup[1 + perm[p]], Q::one())]);
    }
    let mut out = BTreeMap::new();
    ar.sum.expand_into(&mut out, t, &parts, &sign);
    btree_to_svec(out)
}

/// f∘g : m∘n → m'∘n' in arities 0..=bound.
pub fn compose_maps(f: &SymSeqMap, g: &SymSeqMap, bound: usize) -> Result<(Composite, Composite, SymSeqMap)> {
    let src = compose_full(&f.source, &g.source, bound)?;
    let tgt = compose_full(&f.target, &g.target, bound)?;
    let mut mats = Vec::new();
    for r in 0..=bound {
        let (sa, ta) = (&src.arities[r], &tgt.arities[r]);
        let m = sa.quot.induced(&ta.quot, |x| {
            let (s, tup) = sa.sum.elem(x);
            let Some(t) = ta.summand(&sa.keys[s]) else { return Vec::new() };
            let k = tup.len() - 1;
            let mut parts = vec![f.total(k).column(tup[0])];
            let key = &sa.keys[s];
            let bl = blocks_of(&key.0);
            for p in 1..tup.len() {
                let ar = if p - 1 < bl.len() { bl[p - 1].len() } else { 0 };
                parts.push(g.total(ar).column(tup[p]));
            }
            let mut out = BTreeMap::new();
            ta.sum.expand_into(&mut out, t, &parts, &Q::one());
            btree_to_svec(out)
        });
        mats.push(m);
    }
    let h = SymSeqMap::from_totals(&src.seq, &tgt.seq, &mats)?;
    Ok((src, tgt, h))
}

/// Invariants used to compare symmetric sequences up to isomorphism:
/// chain dimensions, ranks of d, Σ_r characters per degree on every cycle
/// type, and homology dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArityInvariants {
    pub arity: usize,
    pub dims: Vec<(i64, usize)>,
    pub d_ranks: Vec<(i64, usize)>,
    pub characters: Vec<(i64, Vec<String>)>,
    pub homology: Vec<(i64, usize)>,
}

pub fn invariants(s: &SymSeq) -> Vec<ArityInvariants> {
    let types = |r: usize| integer_partitions(r).into_iter().map(|p| cycle_type_rep(&p)).collect::<Vec<_>>();
    (0..=s.bound())
        .map(|r| {
            let c = s.arity(r).trimmed();
            let dims: Vec<(i64, usize)> = c.dims().into_iter().filter(|x| x.1 > 0).collect();
            let d_ranks = c.degrees().map(|n| (n, c.d(n).rank())).filter(|x| x.1 > 0).collect();
            let reps = types(r);
            let characters = dims
                .iter()
                .map(|(n, _)| (*n, reps.iter().map(|p| fmt_q(&s.character(r, *n, p))).collect()))
                .collect();
            let homology = homology(&c).nonzero();
            ArityInvariants { arity: r, dims, d_ranks, characters, homology }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PushoutProductArity {
    pub arity: usize,
    pub pushout_dim: usize,
    pub target_dim: usize,
    pub injective: bool,
    /// Present when i or j is a levelwise quasi-isomorphism.
    pub cokernel_acyclic: Option<bool>,
    /// Cokernel character vanishes off the identity in every degree.
    pub cokernel_sigma_free: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PushoutProductReport {
    pub ok: bool,
    pub arities: Vec<PushoutProductArity>,
}

/// Comparison map A'∘B ⊔_{A∘B} A∘B' → A'∘B' for injective i: A → A', j: B → B'.
pub fn pushout_product_check(i: &SymSeqMap, j: &SymSeqMap, bound: usize) -> Result<PushoutProductReport> {
    if !i.is_injective() || !j.is_injective() {
        return usage("pushout-product inputs must be injective");
    }
    let acyclic_expected = is_levelwise_quasi_iso(i)?.ok || is_levelwise_quasi_iso(j)?.ok;
    let id_a = SymSeqMap::identity(&i.source);
    let id_a2 = SymSeqMap::identity(&i.target);
    let id_b = SymSeqMap::identity(&j.source);
    let id_b2 = SymSeqMap::identity(&j.target);
    let (x0, x1, i_b) = compose_maps(i, &id_b, bound)?; // A∘B → A'∘B
    let (_, x2, a_j) = compose_maps(&id_a, j, bound)?; // A∘B → A∘B'
    let (_, y, a2_j) = compose_maps(&id_a2, j, bound)?; // A'∘B → A'∘B'
    let (_, _, i_b2) = compose_maps(i, &id_b2, bound)?; // A∘B' → A'∘B'
    let mut arities = Vec::new();
    let mut ok = true;
    for r in 0..=bound {
        let c1 = x1.seq.arity(r).clone();
        let c2 = x2.seq.arity(r).clone();
        let sum = crate::chain::direct_sum(&[c1.clone(), c2.clone()])?;
        let emb = sum_embeddings(&[c1.clone(), c2.clone()], &sum);
        let (ib, aj) = (i_b.total(r), a_j.total(r));
        let rels: Vec<SVec> = (0..x0.seq.arity(r).total_dim())
            .map(|g| {
                let mut v: Vec<(usize, Q)> = ib.column(g).into_iter().map(|(k, x)| (emb[0][k], x)).collect();
                v.extend(aj.column(g).into_iter().map(|(k, x)| (emb[1][k], -x)));
                v.sort_by_key(|e| e.0);
                v
            })
            .collect();
        let p = QuotientComplex::new(&sum, &rels)?;
        let (a2j, ib2) = (a2_j.total(r), i_b2.total(r));
        let ycx = y.seq.arity(r);
        let inv1: HashMap<usize, usize> = emb[0].iter().enumerate().map(|(a, b)| (*b, a)).collect();
        let inv2: HashMap<usize, usize> = emb[1].iter().enumerate().map(|(a, b)| (*b, a)).collect();
        let psi = matrix_from_fn(ycx.total_dim(), p.complex.total_dim(), |k| {
            let amb = p.lift(k);
            match inv1.get(&amb) {
                Some(&a) => a2j.column(a),
                None => ib2.column(inv2[&amb]),
            }
        });
        let rank = psi.rank();
        let injective = rank == p.complex.total_dim();
        let img: Vec<SVec> = (0..psi.cols()).map(|k| psi.column(k)).filter(|v| !v.is_empty()).collect();
        let coker = QuotientComplex::new(ycx, &img)?;
        let cokernel_acyclic = if acyclic_expected { Some(homology(&coker.complex).is_zero()) } else { None };
        let ysq = &y.seq;
        let perms = all_perms(r);
        let mut free = true;
        if coker.complex.total_dim() > 0 {
            let cdeg = coker.complex.global_degrees();
            for perm in perms.iter().filter(|p| p.iter().enumerate().any(|(a, b)| a != *b)) {
                let act = ysq.perm_action(r, perm);
                let ind = coker.induced(&coker, |g| act.column(g));
                for n in coker.complex.degrees() {
                    let tr: Q = ind.entries().iter().filter(|(a, b, _)| a == b && cdeg[*a] == n).map(|e| e.2.clone()).sum();
                    if !tr.is_zero() {
                        free = false;
                    }
                }
            }
        }
        ok &= injective && cokernel_acyclic.unwrap_or(true);
        arities.push(PushoutProductArity {
            arity: r,
            pushout_dim: p.complex.total_dim(),
            target_dim: ycx.total_dim(),
            injective,
            cokernel_acyclic,
            cokernel_sigma_free: free,
        });
    }
    Ok(PushoutProductReport { ok, arities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{disk, sphere};

    fn binary(bound: usize) -> SymSeq {
        SymSeq::concentrated(2, &ChainComplex::ground(), bound, false).unwrap()
    }

    #[test]
    fn perms_and_words() {
        assert_eq!(all_perms(3).len(), 6);
        for p in all_perms(4) {
            let mut acc: Vec<usize> = (0..4).collect();
            for a in perm_word(&p) {
                let mut s: Vec<usize> = (0..4).collect();
                s.swap(a, a + 1);
                acc = compose_perms(&s, &acc);
            }
            assert_eq!(acc, p);
        }
        assert_eq!(set_partitions(4).len(), 15);
        assert_eq!(integer_partitions(5).len(), 7);
    }

    #[test]
    fn unit_and_small_composites() {
        let u = unit_seq(4).unwrap();
        assert_eq!(u.arity(1).total_dim(), 1);
        assert_eq!(u.arity(2).total_dim(), 0);
        let uu = compose(&u, &u).unwrap();
        assert_eq!(invariants(&uu), invariants(&u));
        let b = binary(4);
        let ub = SymSeq::direct_sum(&[u.clone(), b.clone()]).unwrap();
        let c = compose(&ub, &ub).unwrap();
        assert_eq!(c.arity(3).total_dim(), 3);
        let c0 = compose(&b, &b).unwrap();
        assert_eq!(c0.arity(3).total_dim(), 0);
        assert_eq!(c0.arity(4).total_dim(), 3);
    }

    #[test]
    fn unit_laws_with_nontrivial_action() {
        let u = unit_seq(4).unwrap();
        let f3 = free_sigma_seq(&sphere(1, 0).unwrap(), 3, 4).unwrap();
        let m = SymSeq::direct_sum(&[binary(4), f3, SymSeq::concentrated(2, &disk(0).unwrap(), 4, true).unwrap()]).unwrap();
        assert_eq!(invariants(&compose(&u, &m).unwrap()), invariants(&m));
        assert_eq!(invariants(&compose(&m, &u).unwrap()), invariants(&m));
    }

    #[test]
    fn free_sigma() {
        let f2 = free_sigma_seq(&ChainComplex::ground(), 2, 3).unwrap();
        assert_eq!(f2.arity(2).total_dim(), 2);
        let f1 = free_sigma_seq(&ChainComplex::ground(), 1, 3).unwrap();
        assert_eq!(invariants(&f1), invariants(&unit_seq(3).unwrap()));
        // (K⊗Σ_2) ∘ (𝕀 ⊕ binary) at arity 3: ordered decompositions 3 = J1 ⊔ J2
        // with one part of size 1 and the other of size 2: 6 of them.
        let b = SymSeq::direct_sum(&[unit_seq(3).unwrap(), binary(3)]).unwrap();
        let f2 = free_sigma_seq(&ChainComplex::ground(), 2, 3).unwrap();
        assert_eq!(compose(&f2, &b).unwrap().arity(3).total_dim(), 6);
    }

    #[test]
    fn symmetrizer_is_idempotent() {
        let f3 = free_sigma_seq(&disk(0).unwrap(), 3, 3).unwrap();
        let e = f3.symmetrizer(3);
        assert_eq!(e.mul(&e).unwrap(), e);
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn arity_zero_identifications() {
        // n(0) = 𝕜 and m = commutative-type in arity 2: (m∘n)(0) = m(2)⊗_{Σ_2} 𝕜⊗𝕜.
        let n0 = SymSeq::concentrated(0, &ChainComplex::ground(), 2, false).unwrap();
        let n = SymSeq::direct_sum(&[n0, unit_seq(2).unwrap()]).unwrap();
        let triv = binary(2);
        assert_eq!(compose(&triv, &n).unwrap().arity(0).total_dim(), 1);
        let sgn = SymSeq::concentrated(2, &ChainComplex::ground(), 2, true).unwrap();
        assert_eq!(compose(&sgn, &n).unwrap().arity(0).total_dim(), 0);
        // odd arity-0 element: the sign representation survives instead
        let n0odd = SymSeq::concentrated(0, &sphere(1, 0).unwrap(), 2, false).unwrap();
        let nodd = SymSeq::direct_sum(&[n0odd, unit_seq(2).unwrap()]).unwrap();
        assert_eq!(compose(&sgn, &nodd).unwrap().arity(0).total_dim(), 1);
        assert_eq!(compose(&triv, &nodd).unwrap().arity(0).total_dim(), 0);
    }

    fn inclusion(a: &SymSeq, b: &SymSeq, r: usize, m: RatMatrix) -> SymSeqMap {
        let bound = a.bound().max(b.bound());
        let mats = (0..=bound)
            .map(|k| if k == r { m.clone() } else { RatMatrix::zero(b.arity(k).total_dim(), a.arity(k).total_dim()) })
            .collect::<Vec<_>>();
        SymSeqMap::from_totals(a, b, &mats).unwrap()
    }

    #[test]
    fn levelwise_verdicts() {
        let s = SymSeq::concentrated(2, &sphere(0, 0).unwrap(), 3, false).unwrap();
        let d = SymSeq::concentrated(2, &disk(0).unwrap(), 3, false).unwrap();
        assert!(is_levelwise_quasi_iso(&SymSeqMap::identity(&s)).unwrap().ok);
        let z = SymSeq::zero(3).unwrap();
        let v = is_levelwise_quasi_iso(&inclusion(&s, &z, 2, RatMatrix::zero(0, 1))).unwrap();
        assert!(!v.ok);
        assert_eq!(v.failing_arities, vec![2]);
        // S ⊕ D → S killing the disk summand
        let sd = SymSeq::direct_sum(&[s.clone(), d]).unwrap();
        let proj = RatMatrix::from_i64(&[&[1, 0, 0]]);
        assert!(is_levelwise_quasi_iso(&inclusion(&sd, &s, 2, proj)).unwrap().ok);
    }

    #[test]
    fn pushout_products() {
        let u = unit_seq(4).unwrap();
        let s = SymSeq::concentrated(2, &sphere(0, 0).unwrap(), 4, false).unwrap();
        let d = SymSeq::concentrated(2, &disk(0).unwrap(), 4, false).unwrap();
        let z = SymSeq::zero(4).unwrap();
        let b = SymSeq::direct_sum(&[u.clone(), s.clone()]).unwrap();
        let b2 = SymSeq::direct_sum(&[u.clone(), d.clone()]).unwrap();
        // S -> D sends the sphere generator to the bottom of the disk
        let sd = RatMatrix::from_i64(&[&[1], &[0]]);
        let j = inclusion(&b, &b2, 2, sd.clone());
        let mut mats: Vec<RatMatrix> = j.comps.iter().map(|c| c.total()).collect();
        mats[1] = RatMatrix::identity(1);
        let j = SymSeqMap::from_totals(&b, &b2, &mats).unwrap();
        let i = inclusion(&s, &d, 2, sd);
        let rep = pushout_product_check(&i, &j, 4).unwrap();
        assert!(rep.ok);
        assert!(rep.arities.iter().all(|a| a.cokernel_acyclic.is_none()));
        let i0 = inclusion(&z, &d, 2, RatMatrix::zero(2, 0));
        let rep = pushout_product_check(&i0, &j, 4).unwrap();
        assert!(rep.ok);
        assert!(rep.arities.iter().all(|a| a.cokernel_acyclic == Some(true)));
        assert!(rep.arities.iter().any(|a| a.target_dim > a.pushout_dim));
        let idb = SymSeqMap::identity(&b);
        let rep = pushout_product_check(&SymSeqMap::identity(&b2), &idb, 4).unwrap();
        assert!(rep.arities.iter().all(|a| a.injective && a.pushout_dim == a.target_dim));
        let rep = pushout_product_check(&inclusion(&z, &d, 2, RatMatrix::zero(2, 0)), &inclusion(&z, &b2, 2, RatMatrix::zero(2, 0)), 4).unwrap();
        assert!(rep.arities.iter().all(|a| a.injective && a.pushout_dim == 0));
        let bad = inclusion(&d, &z, 2, RatMatrix::zero(0, 2));
        assert!(pushout_product_check(&bad, &idb, 4).is_err());
    }

    #[test]
    fn text_round_trip() {
        let f = free_sigma_seq(&disk(1).unwrap(), 3, 3).unwrap();
        let back = SymSeq::from_text(&f.to_text()).unwrap();
        assert_eq!(back.to_text(), f.to_text());
    }
}
