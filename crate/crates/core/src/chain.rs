//! Truncated chain complexes over the rationals.

use crate::error::{internal, usage, Error, Result};
use crate::exactlin::{
    fmt_q, kernel_sparse, parse_q, q, svec_from_dense, Echelon, RatMatrix, Solver, SVec, Q,
};
use crate::label::Label;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Largest absolute degree any construction may produce.
pub const MAX_DEGREE: i64 = 64;

pub fn koszul(n: i64) -> Q {
    if n.rem_euclid(2) == 0 {
        Q::one()
    } else {
        q(-1)
    }
}

pub fn is_odd(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

/// A chain complex concentrated in the window [lo, hi], zero below t.
/// `d[n - lo]` is the differential out of degree n, a matrix with
/// dim(n-1) rows and dim(n) columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    t: i64,
    lo: i64,
    basis: Vec<Vec<Label>>,
    d: Vec<RatMatrix>,
}

impl ChainComplex {
    /// Builds and validates a complex. `basis[k]` and `d[k]` refer to degree lo + k.
    pub fn new(t: i64, lo: i64, basis: Vec<Vec<Label>>, d: Vec<RatMatrix>) -> Result<Self> {
        if lo < t {
            return usage(format!("window starts at {lo}, below truncation {t}"));
        }
        if basis.len() != d.len() {
            return usage("basis and differential lists differ in length");
        }
        let hi = lo + basis.len() as i64 - 1;
        if lo.abs() > MAX_DEGREE || hi.abs() > MAX_DEGREE {
            return usage(format!("degree window [{lo},{hi}] exceeds the bound {MAX_DEGREE}"));
        }
        let c = ChainComplex { t, lo, basis, d };
        c.validate()?;
        Ok(c)
    }

    pub(crate) fn new_unchecked(t: i64, lo: i64, basis: Vec<Vec<Label>>, d: Vec<RatMatrix>) -> Self {
        ChainComplex { t, lo, basis, d }
    }

    fn validate(&self) -> Result<()> {
        for k in 0..self.basis.len() {
            let n = self.lo + k as i64;
            let m = &self.d[k];
            if m.cols() != self.dim(n) || m.rows() != self.dim(n - 1) {
                return usage(format!(
                    "d_{n} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    self.dim(n - 1),
                    self.dim(n)
                ));
            }
            if k == 0 && !m.is_zero() {
                return usage("differential leaves the window");
            }
        }
        for n in self.lo + 1..=self.hi() {
            if !self.d(n - 1).mul(&self.d(n))?.is_zero() {
                return usage(format!("d_{} d_{} != 0", n - 1, n));
            }
        }
        Ok(())
    }

    /// Zero complex.
    pub fn zero(t: i64) -> Self {
        ChainComplex { t, lo: t.max(-MAX_DEGREE), basis: vec![vec![]], d: vec![RatMatrix::zero(0, 0)] }
    }

    /// The ground field in degree 0.
    pub fn ground() -> Self {
        Self::ground_labeled(Label::one())
    }

    pub fn ground_labeled(l: Label) -> Self {
        ChainComplex { t: 0, lo: 0, basis: vec![vec![l]], d: vec![RatMatrix::zero(0, 1)] }
    }

    /// Graded vector space with zero differential; `parts` is a list of (degree, labels).
    pub fn graded(t: i64, parts: Vec<(i64, Vec<Label>)>) -> Result<Self> {
        if parts.is_empty() {
            return Ok(Self::zero(t));
        }
        let lo = parts.iter().map(|p| p.0).min().unwrap();
        let hi = parts.iter().map(|p| p.0).max().unwrap();
        let mut basis = vec![Vec::new(); (hi - lo + 1) as usize];
        for (n, ls) in parts {
            basis[(n - lo) as usize].extend(ls);
        }
        let d = (0..basis.len())
            .map(|k| RatMatrix::zero(if k == 0 { 0 } else { basis[k - 1].len() }, basis[k].len()))
            .collect();
        Self::new(t, lo, basis, d)
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.basis.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn dim(&self, n: i64) -> usize {
        if n < self.lo || n > self.hi() {
            0
        } else {
            self.basis[(n - self.lo) as usize].len()
        }
    }

    pub fn dims(&self) -> Vec<(i64, usize)> {
        self.degrees().map(|n| (n, self.dim(n))).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.basis.iter().map(|b| b.len()).sum()
    }

    pub fn basis(&self, n: i64) -> &[Label] {
        if n < self.lo || n > self.hi() {
            &[]
        } else {
            &self.basis[(n - self.lo) as usize]
        }
    }

    /// Differential out of degree n.
    pub fn d(&self, n: i64) -> RatMatrix {
        if n < self.lo || n > self.hi() {
            RatMatrix::zero(self.dim(n - 1), self.dim(n))
        } else {
            self.d[(n - self.lo) as usize].clone()
        }
    }

    pub fn d_ref(&self, n: i64) -> Option<&RatMatrix> {
        if n < self.lo || n > self.hi() {
            None
        } else {
            Some(&self.d[(n - self.lo) as usize])
        }
    }

    pub fn index_of(&self, n: i64, l: &Label) -> Option<usize> {
        self.basis(n).iter().position(|x| x == l)
    }

    /// Map from labels to positions in degree n.
    pub fn index_map(&self, n: i64) -> HashMap<Label, usize> {
        self.basis(n).iter().cloned().enumerate().map(|(i, l)| (l, i)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|n| if is_odd(n) { -(self.dim(n) as i64) } else { self.dim(n) as i64 }).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Same complex with truncation lowered or raised.
    pub fn with_t(&self, t: i64) -> Result<Self> {
        let c = self.trimmed();
        if c.total_dim() > 0 && c.lo < t {
            return usage("content below the requested truncation");
        }
        let mut c = c;
        c.t = t;
        if c.lo < t {
            c.lo = t;
        }
        Ok(c)
    }

    /// Drops zero-dimensional degrees at the window ends.
    pub fn trimmed(&self) -> Self {
        let nz: Vec<i64> = self.degrees().filter(|n| self.dim(*n) > 0).collect();
        if nz.is_empty() {
            return ChainComplex::zero(self.t);
        }
        let (lo, hi) = (nz[0], *nz.last().unwrap());
        self.restrict_window(lo, hi)
    }

    /// Same data presented over the window [lo, hi]; content outside must be zero.
    pub fn restrict_window(&self, lo: i64, hi: i64) -> Self {
        let mut basis = Vec::new();
        let mut d = Vec::new();
        for n in lo..=hi {
            basis.push(self.basis(n).to_vec());
            if n == lo {
                d.push(RatMatrix::zero(0, self.dim(n)));
            } else {
                d.push(self.d(n));
            }
        }
        ChainComplex { t: self.t.min(lo), lo, basis, d }
    }

    /// Extends the window (zero padding) to contain [lo, hi].
    pub fn widened(&self, lo: i64, hi: i64) -> Self {
        self.restrict_window(lo.min(self.lo), hi.max(self.hi()))
    }

    /// Same complex with different labels (same shapes).
    pub fn relabeled(&self, f: impl Fn(i64, &Label) -> Label) -> Self {
        let mut c = self.clone();
        for (k, b) in c.basis.iter_mut().enumerate() {
            let n = self.lo + k as i64;
            for l in b.iter_mut() {
                *l = f(n, l);
            }
        }
        c
    }

    /// Position of the first basis vector of degree n in the global ordering
    /// (degrees ascending).
    pub fn offset(&self, n: i64) -> usize {
        self.degrees().filter(|k| *k < n).map(|k| self.dim(k)).sum()
    }

    /// (degree, index within degree) of a global index.
    pub fn locate(&self, mut g: usize) -> (i64, usize) {
        for n in self.degrees() {
            if g < self.dim(n) {
                return (n, g);
            }
            g -= self.dim(n);
        }
        panic!("global index out of range")
    }

    /// Degree of every global basis index.
    pub fn global_degrees(&self) -> Vec<i64> {
        self.degrees().flat_map(|n| std::iter::repeat(n).take(self.dim(n))).collect()
    }

    /// Differential on the total space as a square matrix.
    pub fn total_d(&self) -> RatMatrix {
        let mut t = Vec::new();
        for n in self.degrees() {
            let (ro, co) = (self.offset(n - 1), self.offset(n));
            if let Some(m) = self.d_ref(n) {
                for (r, c, v) in m.entries() {
                    t.push((ro + r, co + c, v.clone()));
                }
            }
        }
        RatMatrix::from_triplets_unchecked(self.total_dim(), self.total_dim(), t)
    }

    /// Complex with the given total differential (must be of degree -1).
    pub fn from_total(t: i64, lo: i64, basis: Vec<Vec<Label>>, total: &RatMatrix) -> Result<Self> {
        let dims: Vec<usize> = basis.iter().map(|b| b.len()).collect();
        let mut offs = vec![0usize];
        for d in &dims {
            offs.push(offs.last().unwrap() + d);
        }
        let deg = |g: usize| -> usize { offs.iter().rposition(|o| *o <= g && g < offs[offs.len() - 1]).unwrap() };
        let mut per: Vec<Vec<(usize, usize, Q)>> = vec![Vec::new(); dims.len()];
        for (r, c, v) in total.entries() {
            let (kr, kc) = (deg(*r), deg(*c));
            if kr + 1 != kc {
                return usage("total differential is not of degree -1");
            }
            per[kc].push((r - offs[kr], c - offs[kc], v.clone()));
        }
        let d = per
            .into_iter()
            .enumerate()
            .map(|(k, tr)| RatMatrix::new(if k == 0 { 0 } else { dims[k - 1] }, dims[k], tr))
            .collect::<Result<Vec<_>>>()?;
        Self::new(t, lo, basis, d)
    }

    /// Per-degree blocks of a degree-preserving square map on the total space.
    pub fn split_total(&self, target: &ChainComplex, m: &RatMatrix, shift: i64) -> Vec<RatMatrix> {
        let mut blocks: Vec<Vec<(usize, usize, Q)>> = vec![Vec::new(); self.basis.len()];
        let tdeg = target.global_degrees();
        let sdeg = self.global_degrees();
        for (r, c, v) in m.entries() {
            let n = sdeg[*c];
            debug_assert_eq!(tdeg[*r], n + shift);
            blocks[(n - self.lo) as usize].push((r - target.offset(n + shift), c - self.offset(n), v.clone()));
        }
        blocks
            .into_iter()
            .enumerate()
            .map(|(k, t)| {
                let n = self.lo + k as i64;
                RatMatrix::from_triplets_unchecked(target.dim(n + shift), self.dim(n), t)
            })
            .collect()
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for n in self.lo + 1..=self.hi() {
            if !self.d(n - 1).mul(&self.d(n))?.is_zero() {
                return internal(format!("d^2 != 0 at degree {n}"));
            }
        }
        Ok(())
    }
}

/// Offsets of the summands a_p ⊗ b_q inside (a⊗b)_n.
pub fn tensor_offsets(a: &ChainComplex, b: &ChainComplex, n: i64) -> Vec<(i64, usize)> {
    let mut out = Vec::new();
    let mut off = 0;
    for p in a.degrees() {
        let qd = n - p;
        let (da, db) = (a.dim(p), b.dim(qd));
        if da * db > 0 {
            out.push((p, off));
            off += da * db;
        }
    }
    out
}

/// Index of a_p[i] ⊗ b_{n-p}[j] in (a⊗b)_n.
pub fn tensor_index(a: &ChainComplex, b: &ChainComplex, p: i64, i: usize, qd: i64, j: usize) -> usize {
    let n = p + qd;
    let offs = tensor_offsets(a, b, n);
    let off = offs.iter().find(|x| x.0 == p).expect("summand present").1;
    off + i * b.dim(qd) + j
}

/// Tensor product with the Koszul sign in the Leibniz rule.
pub fn tensor(a: &ChainComplex, b: &ChainComplex) -> Result<ChainComplex> {
    let a = a.trimmed();
    let b = b.trimmed();
    let t = a.t() + b.t();
    if a.is_zero() || b.is_zero() {
        return Ok(ChainComplex::zero(t.max(-MAX_DEGREE)));
    }
    let lo = a.lo() + b.lo();
    let hi = a.hi() + b.hi();
    if lo.abs() > MAX_DEGREE || hi.abs() > MAX_DEGREE {
        return usage("tensor product window overflow");
    }
    let mut basis = Vec::new();
    let mut offsets = Vec::new();
    for n in lo..=hi {
        let mut bl = Vec::new();
        let offs = tensor_offsets(&a, &b, n);
        for (p, _) in &offs {
            for x in a.basis(*p) {
                for y in b.basis(n - p) {
                    bl.push(Label::tensor(vec![x.clone(), y.clone()]));
                }
            }
        }
        basis.push(bl);
        offsets.push(offs);
    }
    let mut d = Vec::new();
    for n in lo..=hi {
        let k = (n - lo) as usize;
        let rows = if n == lo { 0 } else { basis[k - 1].len() };
        let mut trip = Vec::new();
        if n > lo {
            let src = &offsets[k];
            let tgt = &offsets[k - 1];
            let find = |p: i64| tgt.iter().find(|x| x.0 == p).map(|x| x.1);
            for (p, off) in src {
                let qd = n - p;
                let (dima, dimb) = (a.dim(*p), b.dim(qd));
                // d(x)⊗y
                if let Some(toff) = find(p - 1) {
                    let dbq = b.dim(qd);
                    for (r, c, v) in a.d(*p).entries() {
                        for j in 0..dimb {
                            trip.push((toff + r * dbq + j, off + c * dimb + j, v.clone()));
                        }
                    }
                }
                // (-1)^p x⊗d(y)
                if let Some(toff) = find(*p) {
                    let s = koszul(*p);
                    let dbq1 = b.dim(qd - 1);
                    for (r, c, v) in b.d(qd).entries() {
                        for i in 0..dima {
                            trip.push((toff + i * dbq1 + r, off + i * dimb + c, &s * v));
                        }
                    }
                }
            }
        }
        d.push(RatMatrix::new(rows, basis[k].len(), trip)?);
    }
    let c = ChainComplex::new_unchecked(t, lo, basis, d);
    c.check_d_squared()?;
    Ok(c)
}

/// Iterated tensor product, left-nested.
pub fn tensor_all(parts: &[ChainComplex]) -> Result<ChainComplex> {
    let mut acc = ChainComplex::ground();
    for p in parts {
        acc = tensor(&acc, p)?;
    }
    Ok(acc)
}

/// Direct sum; labels are tagged with the summand index.
pub fn direct_sum(parts: &[ChainComplex]) -> Result<ChainComplex> {
    let nz: Vec<&ChainComplex> = parts.iter().filter(|c| !c.is_zero()).collect();
    let t = parts.iter().map(|c| c.t()).min().unwrap_or(0);
    if nz.is_empty() {
        return Ok(ChainComplex::zero(t));
    }
    let lo = nz.iter().map(|c| c.lo()).min().unwrap();
    let hi = nz.iter().map(|c| c.hi()).max().unwrap();
    let mut basis = Vec::new();
    let mut d = Vec::new();
    for n in lo..=hi {
        let mut bl = Vec::new();
        for (i, c) in parts.iter().enumerate() {
            for l in c.basis(n) {
                bl.push(Label::tag(i.to_string(), l.clone()));
            }
        }
        basis.push(bl);
        let blocks: Vec<RatMatrix> = parts.iter().map(|c| c.d(n)).collect();
        let refs: Vec<&RatMatrix> = blocks.iter().collect();
        let m = RatMatrix::block_diag(&refs);
        d.push(if n == lo { RatMatrix::zero(0, m.cols()) } else { m });
    }
    ChainComplex::new(t, lo, basis, d)
}

/// D(n): basis x in degree n, y in degree n+1, d y = x.
pub fn disk(n: i64) -> Result<ChainComplex> {
    disk_t(n, 0)
}

pub fn disk_t(n: i64, t: i64) -> Result<ChainComplex> {
    if n < t {
        return usage(format!("disk({n}) lies below truncation {t}"));
    }
    ChainComplex::new(
        t,
        n,
        vec![vec![Label::atom("x")], vec![Label::atom("y")]],
        vec![RatMatrix::zero(0, 1), RatMatrix::identity(1)],
    )
}

/// S(n): one basis vector in degree n.
pub fn sphere(n: i64, t: i64) -> Result<ChainComplex> {
    if n < t {
        return usage("sphere below truncation");
    }
    ChainComplex::new(t, n, vec![vec![Label::atom("x")]], vec![RatMatrix::zero(0, 1)])
}

/// Σ^s c, with differential multiplied by (-1)^s. Labels are kept.
pub fn shift(c: &ChainComplex, s: i64) -> Result<ChainComplex> {
    let c = c.trimmed();
    if c.is_zero() {
        return Ok(ChainComplex::zero(c.t()));
    }
    if c.lo() + s < c.t() {
        return usage(format!("shift by {s} leaves Ch_{{>={}}}", c.t()));
    }
    let sign = koszul(s);
    let d = c.d.iter().map(|m| m.scale(&sign)).collect();
    ChainComplex::new(c.t(), c.lo() + s, c.basis.clone(), d)
}

/// Mapping cone of a degree-0 chain map: cone_n = A_{n-1} ⊕ B_n,
/// d(a, b) = (-da, f a + d b). A-labels are tagged "s".
pub fn cone(f: &ChainMap) -> Result<ChainComplex> {
    if f.shift() != 0 {
        return usage("cone needs a degree-0 map");
    }
    let a = f.source();
    let b = f.target();
    let lo = (a.lo() + 1).min(b.lo());
    let hi = (a.hi() + 1).max(b.hi());
    let t = a.t().min(b.t());
    let mut basis = Vec::new();
    let mut d = Vec::new();
    for n in lo..=hi {
        let mut bl: Vec<Label> = a.basis(n - 1).iter().map(|l| Label::tag("s", l.clone())).collect();
        bl.extend(b.basis(n).iter().cloned());
        basis.push(bl);
        let (an1, bn) = (a.dim(n - 1), b.dim(n));
        let (an2, bn1) = (a.dim(n - 2), b.dim(n - 1));
        let mut trip = Vec::new();
        if n > lo {
            for (r, c, v) in a.d(n - 1).entries() {
                trip.push((*r, *c, -v.clone()));
            }
            for (r, c, v) in f.component(n - 1).entries() {
                trip.push((an2 + r, *c, v.clone()));
            }
            for (r, c, v) in b.d(n).entries() {
                trip.push((an2 + r, an1 + c, v.clone()));
            }
            d.push(RatMatrix::new(an2 + bn1, an1 + bn, trip)?);
        } else {
            d.push(RatMatrix::zero(0, an1 + bn));
        }
    }
    ChainComplex::new(t, lo, basis, d)
}

/// Normalized chains on the standard k-simplex.
pub fn normalized_simplex_chains(k: usize) -> ChainComplex {
    let mut basis: Vec<Vec<Label>> = vec![Vec::new(); k + 1];
    for mask in 1u64..(1u64 << (k + 1)) {
        let v: Vec<usize> = (0..=k).filter(|i| mask >> i & 1 == 1).collect();
        basis[v.len() - 1].push(Label::Simplex(v));
    }
    for b in basis.iter_mut() {
        b.sort();
    }
    let mut d = vec![RatMatrix::zero(0, basis[0].len())];
    for n in 1..=k {
        let idx: HashMap<&Label, usize> = basis[n - 1].iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut trip = Vec::new();
        for (c, l) in basis[n].iter().enumerate() {
            let Label::Simplex(v) = l else { unreachable!() };
            for i in 0..v.len() {
                let mut f = v.clone();
                f.remove(i);
                trip.push((idx[&Label::Simplex(f)], c, koszul(i as i64)));
            }
        }
        d.push(RatMatrix::from_triplets_unchecked(basis[n - 1].len(), basis[n].len(), trip));
    }
    ChainComplex::new_unchecked(0, 0, basis, d)
}

/// A chain map of degree `shift`: component n goes from degree n of the
/// source to degree n + shift of the target. It satisfies
/// d f = (-1)^shift f d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    shift: i64,
    comps: Vec<RatMatrix>,
}

impl ChainMap {
    /// Map given by a matrix on total spaces; must respect degrees.
    pub fn from_total(source: &ChainComplex, target: &ChainComplex, shift: i64, m: &RatMatrix) -> Result<Self> {
        let sd = source.global_degrees();
        let td = target.global_degrees();
        if m.rows() != td.len() || m.cols() != sd.len() {
            return usage("total map has the wrong shape");
        }
        for (r, c, _) in m.entries() {
            if td[*r] != sd[*c] + shift {
                return usage("total map does not have the stated degree");
            }
        }
        let comps = source.split_total(target, m, shift);
        Self::new(source.clone(), target.clone(), shift, comps)
    }

    /// Matrix on total spaces.
    pub fn total(&self) -> RatMatrix {
        let mut t = Vec::new();
        for n in self.source.degrees() {
            let (ro, co) = (self.target.offset(n + self.shift), self.source.offset(n));
            for (r, c, v) in self.component(n).entries() {
                t.push((ro + r, co + c, v.clone()));
            }
        }
        RatMatrix::from_triplets_unchecked(self.target.total_dim(), self.source.total_dim(), t)
    }

    /// `comps[k]` is the component on source degree source.lo() + k.
    pub fn new(source: ChainComplex, target: ChainComplex, shift: i64, comps: Vec<RatMatrix>) -> Result<Self> {
        let f = Self::new_unchecked(source, target, shift, comps)?;
        f.check()?;
        Ok(f)
    }

    /// Shapes checked, commutation not.
    pub fn new_unchecked(source: ChainComplex, target: ChainComplex, shift: i64, comps: Vec<RatMatrix>) -> Result<Self> {
        if comps.len() != source.basis.len() {
            return usage("one component per source degree is required");
        }
        for (k, m) in comps.iter().enumerate() {
            let n = source.lo() + k as i64;
            if m.cols() != source.dim(n) || m.rows() != target.dim(n + shift) {
                return usage(format!(
                    "component {n} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    target.dim(n + shift),
                    source.dim(n)
                ));
            }
        }
        Ok(ChainMap { source, target, shift, comps })
    }

    /// Builds a map from a closure giving the component on each degree.
    pub fn from_fn(
        source: &ChainComplex,
        target: &ChainComplex,
        shift: i64,
        mut f: impl FnMut(i64) -> RatMatrix,
    ) -> Result<Self> {
        let comps = source.degrees().map(&mut f).collect();
        Self::new(source.clone(), target.clone(), shift, comps)
    }

    pub fn from_fn_unchecked(
        source: &ChainComplex,
        target: &ChainComplex,
        shift: i64,
        mut f: impl FnMut(i64) -> RatMatrix,
    ) -> Result<Self> {
        let comps = source.degrees().map(&mut f).collect();
        Self::new_unchecked(source.clone(), target.clone(), shift, comps)
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let comps = c.degrees().map(|n| RatMatrix::identity(c.dim(n))).collect();
        ChainMap { source: c.clone(), target: c.clone(), shift: 0, comps }
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex, shift: i64) -> Self {
        let comps = source.degrees().map(|n| RatMatrix::zero(target.dim(n + shift), source.dim(n))).collect();
        ChainMap { source: source.clone(), target: target.clone(), shift, comps }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn component(&self, n: i64) -> RatMatrix {
        if n < self.source.lo() || n > self.source.hi() {
            RatMatrix::zero(self.target.dim(n + self.shift), self.source.dim(n))
        } else {
            self.comps[(n - self.source.lo()) as usize].clone()
        }
    }

    pub fn component_ref(&self, n: i64) -> Option<&RatMatrix> {
        if n < self.source.lo() || n > self.source.hi() {
            None
        } else {
            Some(&self.comps[(n - self.source.lo()) as usize])
        }
    }

    /// Checks d f = (-1)^shift f d in every degree.
    pub fn check(&self) -> Result<()> {
        let s = koszul(self.shift);
        for n in self.source.lo()..=self.source.hi() + 1 {
            let lhs = self.target.d(n + self.shift).mul(&self.component(n))?;
            let rhs = self.component(n - 1).mul(&self.source.d(n))?.scale(&s);
            if lhs != rhs {
                return Err(Error::Precondition(format!("not a chain map at degree {n}")));
            }
        }
        Ok(())
    }

    pub fn is_chain_map(&self) -> bool {
        self.check().is_ok()
    }

    /// self ∘ g
    pub fn compose(&self, g: &ChainMap) -> Result<ChainMap> {
        if g.target.trimmed().dims() != self.source.trimmed().dims() {
            return usage("composition shape mismatch");
        }
        let comps = g
            .source
            .degrees()
            .map(|n| self.component(n + g.shift).mul(&g.component(n)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChainMap { source: g.source.clone(), target: self.target.clone(), shift: self.shift + g.shift, comps })
    }

    pub fn add(&self, g: &ChainMap) -> Result<ChainMap> {
        if self.shift != g.shift {
            return usage("sum of maps of different degrees");
        }
        let comps = self
            .source
            .degrees()
            .map(|n| self.component(n).add(&g.component(n)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChainMap { source: self.source.clone(), target: self.target.clone(), shift: self.shift, comps })
    }

    pub fn scale(&self, c: &Q) -> ChainMap {
        let mut f = self.clone();
        f.comps = f.comps.iter().map(|m| m.scale(c)).collect();
        f
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|m| m.is_zero())
    }

    pub fn is_injective(&self) -> bool {
        self.source.degrees().all(|n| self.component(n).rank() == self.source.dim(n))
    }

    pub fn is_surjective(&self) -> bool {
        self.source.degrees().all(|n| self.component(n).rank() == self.target.dim(n + self.shift))
            && self.target.degrees().all(|m| self.target.dim(m) == 0 || self.source.dim(m - self.shift) > 0)
    }

    pub fn is_isomorphism(&self) -> bool {
        let degs: Vec<i64> = self.source.degrees().chain(self.target.degrees().map(|m| m - self.shift)).collect();
        degs.iter().all(|n| {
            let (a, b) = (self.source.dim(*n), self.target.dim(n + self.shift));
            a == b && self.component(*n).rank() == a
        })
    }

    /// Image of a sparse vector in source degree n.
    pub fn apply(&self, n: i64, v: &SVec) -> SVec {
        match self.component_ref(n) {
            Some(m) => m.mul_svec(v),
            None => Vec::new(),
        }
    }
}

/// Tensor product of maps with the Koszul sign (f⊗g)(x⊗y) = (-1)^{|g||x|} f(x)⊗g(y).
pub fn tensor_maps(f: &ChainMap, g: &ChainMap) -> Result<ChainMap> {
    let src = tensor(f.source(), g.source())?;
    let tgt = tensor(f.target(), g.target())?;
    let (a, b, a2, b2) = (f.source().trimmed(), g.source().trimmed(), f.target().trimmed(), g.target().trimmed());
    let shift = f.shift() + g.shift();
    let comps = src
        .degrees()
        .map(|n| {
            let mut trip = Vec::new();
            for (p, off) in tensor_offsets(&a, &b, n) {
                let qd = n - p;
                let (fp, gq) = (f.component(p), g.component(qd));
                if fp.is_zero() || gq.is_zero() {
                    continue;
                }
                let p2 = p + f.shift();
                let q2 = qd + g.shift();
                let toffs = tensor_offsets(&a2, &b2, n + shift);
                let Some(&(_, toff)) = toffs.iter().find(|x| x.0 == p2) else { continue };
                let s = koszul(g.shift() * p);
                let k = fp.kron(&gq);
                let _ = q2;
                for (r, c, v) in k.entries() {
                    trip.push((toff + r, off + c, &s * v));
                }
            }
            RatMatrix::new(tgt.dim(n + shift), src.dim(n), trip)
        })
        .collect::<Result<Vec<_>>>()?;
    ChainMap::new(src, tgt, shift, comps)
}

/// Symmetry isomorphism a⊗b -> b⊗a, x⊗y ↦ (-1)^{pq} y⊗x.
pub fn switch(a: &ChainComplex, b: &ChainComplex) -> Result<ChainMap> {
    let src = tensor(a, b)?;
    let tgt = tensor(b, a)?;
    let (a, b) = (a.trimmed(), b.trimmed());
    let comps = src
        .degrees()
        .map(|n| {
            let mut trip = Vec::new();
            for (p, off) in tensor_offsets(&a, &b, n) {
                let qd = n - p;
                let s = koszul(p * qd);
                let toff = tensor_offsets(&b, &a, n).iter().find(|x| x.0 == qd).unwrap().1;
                for i in 0..a.dim(p) {
                    for j in 0..b.dim(qd) {
                        trip.push((toff + j * a.dim(p) + i, off + i * b.dim(qd) + j, s.clone()));
                    }
                }
            }
            RatMatrix::new(tgt.dim(n), src.dim(n), trip)
        })
        .collect::<Result<Vec<_>>>()?;
    ChainMap::new(src, tgt, 0, comps)
}

/// Inclusion of summand i into a direct sum.
pub fn sum_inclusion(parts: &[ChainComplex], i: usize) -> Result<ChainMap> {
    let s = direct_sum(parts)?;
    ChainMap::from_fn(&parts[i], &s, 0, |n| {
        let off: usize = parts[..i].iter().map(|c| c.dim(n)).sum();
        let t = (0..parts[i].dim(n)).map(|k| (off + k, k, Q::one())).collect();
        RatMatrix::from_triplets_unchecked(s.dim(n), parts[i].dim(n), t)
    })
}

pub fn sum_projection(parts: &[ChainComplex], i: usize) -> Result<ChainMap> {
    let s = direct_sum(parts)?;
    ChainMap::from_fn(&s, &parts[i], 0, |n| {
        let off: usize = parts[..i].iter().map(|c| c.dim(n)).sum();
        let t = (0..parts[i].dim(n)).map(|k| (k, off + k, Q::one())).collect();
        RatMatrix::from_triplets_unchecked(parts[i].dim(n), s.dim(n), t)
    })
}

/// Inclusion of the target of f into its cone.
pub fn cone_inclusion(f: &ChainMap) -> Result<ChainMap> {
    let c = cone(f)?;
    let b = f.target();
    ChainMap::from_fn(b, &c, 0, |n| {
        let off = f.source().dim(n - 1);
        let t = (0..b.dim(n)).map(|k| (off + k, k, Q::one())).collect();
        RatMatrix::from_triplets_unchecked(c.dim(n), b.dim(n), t)
    })
}

/// Homology in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyDegree {
    pub degree: i64,
    pub dim: usize,
    pub cycles_dim: usize,
    pub boundaries_dim: usize,
    /// Representative cycles, as dense coordinate vectors written as strings.
    #[serde(skip)]
    pub reps: Vec<SVec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homology {
    pub degrees: Vec<HomologyDegree>,
}

impl Homology {
    pub fn dim(&self, n: i64) -> usize {
        self.degrees.iter().find(|h| h.degree == n).map_or(0, |h| h.dim)
    }

    pub fn dims(&self) -> Vec<(i64, usize)> {
        self.degrees.iter().map(|h| (h.degree, h.dim)).collect()
    }

    /// Nonzero dims only.
    pub fn nonzero(&self) -> Vec<(i64, usize)> {
        self.dims().into_iter().filter(|x| x.1 > 0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.iter().all(|h| h.dim == 0)
    }

    pub fn total(&self) -> usize {
        self.degrees.iter().map(|h| h.dim).sum()
    }
}

fn homology_degree(c: &ChainComplex, n: i64) -> HomologyDegree {
    let z = kernel_sparse(&c.d(n));
    let b: Vec<SVec> = c.d(n + 1).sparse_columns();
    let mut e = Echelon::of_span(c.dim(n), &b);
    let bdim = e.rank();
    let mut reps = Vec::new();
    for v in &z {
        if e.insert(v) {
            reps.push(v.clone());
        }
    }
    HomologyDegree { degree: n, dim: reps.len(), cycles_dim: z.len(), boundaries_dim: bdim, reps }
}

pub fn homology(c: &ChainComplex) -> Homology {
    Homology { degrees: c.degrees().map(|n| homology_degree(c, n)).collect() }
}

pub fn homology_in(c: &ChainComplex, window: (i64, i64)) -> Homology {
    Homology { degrees: (window.0..=window.1).map(|n| homology_degree(c, n)).collect() }
}

/// Coordinates of cycles modulo boundaries in a chosen homology basis.
pub struct HomologyCoords {
    dim: usize,
    solver: Solver,
}

impl HomologyCoords {
    pub fn new(c: &ChainComplex, h: &HomologyDegree) -> Self {
        let n = h.degree;
        let mut cols = h.reps.clone();
        cols.extend(c.d(n + 1).sparse_columns());
        let m = RatMatrix::from_columns(c.dim(n), &cols);
        HomologyCoords { dim: h.reps.len(), solver: Solver::new(&m) }
    }

    /// Homology class coordinates of a cycle; None if v is not a cycle-class combination.
    pub fn coords(&self, v: &SVec) -> Option<SVec> {
        let x = self.solver.solve(v)?;
        Some(x.into_iter().filter(|(i, _)| *i < self.dim).collect())
    }
}

/// Matrix of H_n(f) in the chosen homology bases.
pub fn induced_on_homology(f: &ChainMap, hs: &Homology, ht: &Homology, n: i64) -> Result<RatMatrix> {
    let hsn = hs.degrees.iter().find(|h| h.degree == n);
    let m = n + f.shift();
    let htn = ht.degrees.iter().find(|h| h.degree == m);
    let (Some(hsn), Some(htn)) = (hsn, htn) else {
        let rows = htn.map_or(0, |h| h.dim);
        let cols = hsn.map_or(0, |h| h.dim);
        return Ok(RatMatrix::zero(rows, cols));
    };
    let coords = HomologyCoords::new(f.target(), htn);
    let mut cols = Vec::new();
    for r in &hsn.reps {
        let img = f.apply(n, r);
        let c = coords
            .coords(&img)
            .ok_or_else(|| Error::Precondition(format!("image of a cycle in degree {n} is not a cycle")))?;
        cols.push(c);
    }
    Ok(RatMatrix::from_columns(htn.dim, &cols))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRanks {
    pub degree: i64,
    pub source: usize,
    pub target: usize,
    pub induced_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiIsoVerdict {
    pub ok: bool,
    pub degrees: Vec<DegreeRanks>,
    /// First failing degree, if any.
    pub witness: Option<DegreeRanks>,
}

/// Whether f induces isomorphisms on H_n for n in the window (source degrees).
pub fn is_quasi_iso(f: &ChainMap, window: Option<(i64, i64)>) -> Result<QuasiIsoVerdict> {
    let s = f.shift();
    let (lo, hi) = window.unwrap_or_else(|| {
        let lo = f.source().lo().min(f.target().lo() - s);
        let hi = f.source().hi().max(f.target().hi() - s);
        (lo, hi)
    });
    let hs = homology_in(f.source(), (lo, hi));
    let ht = homology_in(f.target(), (lo + s, hi + s));
    let mut degrees = Vec::new();
    for n in lo..=hi {
        let m = induced_on_homology(f, &hs, &ht, n)?;
        degrees.push(DegreeRanks { degree: n, source: hs.dim(n), target: ht.dim(n + s), induced_rank: m.rank() });
    }
    let witness = degrees.iter().find(|d| !(d.source == d.target && d.induced_rank == d.source)).cloned();
    Ok(QuasiIsoVerdict { ok: witness.is_none(), degrees, witness })
}

impl ChainComplex {
    /// Line-oriented text form; see `from_text`.
    pub fn to_text(&self) -> String {
        let mut s = format!("chain t={} lo={} hi={}\n", self.t, self.lo, self.hi());
        for n in self.degrees() {
            s.push_str(&format!("degree {} {}\n", n, self.dim(n)));
            for l in self.basis(n) {
                s.push_str(&format!("basis {l}\n"));
            }
        }
        for n in self.degrees() {
            let m = self.d(n);
            if m.is_zero() {
                continue;
            }
            s.push_str(&format!("d {} {} {} {}\n", n, m.rows(), m.cols(), m.nnz()));
            for (r, c, v) in m.entries() {
                s.push_str(&format!("{} {} {}\n", r, c, fmt_q(v)));
            }
        }
        s.push_str("end\n");
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let c = parse_chain_block(&mut lines)?;
        Ok(c)
    }
}

pub(crate) fn parse_chain_block<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<ChainComplex> {
    let perr = |m: String| Error::Parse(m);
    let head = lines.next().ok_or_else(|| perr("empty input".into()))?;
    let mut it = head.split_whitespace();
    if it.next() != Some("chain") {
        return Err(perr(format!("expected 'chain' header, got '{head}'")));
    }
    let mut kv = HashMap::new();
    for tok in it {
        let (k, v) = tok.split_once('=').ok_or_else(|| perr(format!("bad header field '{tok}'")))?;
        kv.insert(k.to_string(), v.parse::<i64>().map_err(|_| perr(format!("bad integer '{v}'")))?);
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| perr(format!("missing header field {k}")));
    let (t, lo, hi) = (get("t")?, get("lo")?, get("hi")?);
    if hi < lo {
        return Err(perr("empty window".into()));
    }
    let mut basis: Vec<Vec<Label>> = vec![Vec::new(); (hi - lo + 1) as usize];
    let mut dims = vec![0usize; basis.len()];
    let mut d: Vec<Option<RatMatrix>> = vec![None; basis.len()];
    let mut cur: Option<usize> = None;
    loop {
        let line = lines.next().ok_or_else(|| perr("missing 'end'".into()))?;
        if line == "end" {
            break;
        }
        let (kw, rest) = line.split_once(' ').unwrap_or((line, ""));
        match kw {
            "degree" => {
                let v: Vec<i64> = rest
                    .split_whitespace()
                    .map(|x| x.parse().map_err(|_| perr(format!("bad degree line '{line}'"))))
                    .collect::<Result<_>>()?;
                if v.len() != 2 || v[0] < lo || v[0] > hi {
                    return Err(perr(format!("bad degree line '{line}'")));
                }
                let k = (v[0] - lo) as usize;
                dims[k] = v[1] as usize;
                cur = Some(k);
            }
            "basis" => {
                let k = cur.ok_or_else(|| perr("basis before degree".into()))?;
                basis[k].push(Label::parse(rest)?);
            }
            "d" => {
                let v: Vec<i64> = rest
                    .split_whitespace()
                    .map(|x| x.parse().map_err(|_| perr(format!("bad d line '{line}'"))))
                    .collect::<Result<_>>()?;
                if v.len() != 4 || v[0] < lo || v[0] > hi {
                    return Err(perr(format!("bad d line '{line}'")));
                }
                let mut trip = Vec::new();
                for _ in 0..v[3] {
                    let e = lines.next().ok_or_else(|| perr("truncated matrix".into()))?;
                    let p: Vec<&str> = e.split_whitespace().collect();
                    if p.len() != 3 {
                        return Err(perr(format!("bad entry '{e}'")));
                    }
                    let r: usize = p[0].parse().map_err(|_| perr(format!("bad entry '{e}'")))?;
                    let c: usize = p[1].parse().map_err(|_| perr(format!("bad entry '{e}'")))?;
                    trip.push((r, c, parse_q(p[2])?));
                }
                d[(v[0] - lo) as usize] = Some(RatMatrix::new(v[1] as usize, v[2] as usize, trip)?);
            }
            _ => return Err(perr(format!("unknown line '{line}'"))),
        }
    }
    for k in 0..basis.len() {
        if basis[k].len() != dims[k] {
            return Err(perr(format!("degree {} declares {} basis labels, found {}", lo + k as i64, dims[k], basis[k].len())));
        }
    }
    let dm = (0..basis.len())
        .map(|k| {
            d[k].take().unwrap_or_else(|| RatMatrix::zero(if k == 0 { 0 } else { dims[k - 1] }, dims[k]))
        })
        .collect();
    ChainComplex::new(t, lo, basis, dm)
}

/// Random complex with known homology: a direct sum of spheres and disks
/// conjugated by random invertible matrices. Returns the complex and the
/// expected Betti numbers.
pub fn random_complex(
    rng: &mut impl rand::Rng,
    lo: i64,
    hi: i64,
    max_dim: usize,
) -> (ChainComplex, Vec<(i64, usize)>) {
    let len = (hi - lo + 1) as usize;
    let mut spheres = vec![0usize; len];
    let mut disks = vec![0usize; len]; // disk with bottom in this degree
    let mut dims = vec![0usize; len];
    for k in 0..len {
        let cap = max_dim - dims[k];
        let s = rng.gen_range(0..=cap.min(2));
        let dk = if k + 1 < len { rng.gen_range(0..=(cap - s).min(2)) } else { 0 };
        spheres[k] = s;
        disks[k] = dk;
        dims[k] += s + dk;
        if k + 1 < len {
            dims[k + 1] += dk;
        }
    }
    // standard basis per degree: [incoming disk tops | spheres | outgoing disk bottoms]
    let mut d = vec![RatMatrix::zero(0, dims[0])];
    for k in 1..len {
        let incoming = disks[k - 1];
        // bottoms of those disks sit at the end of degree k-1
        let bottom_off = dims[k - 1] - disks[k - 1];
        let t = (0..incoming).map(|i| (bottom_off + i, i, Q::one())).collect();
        d.push(RatMatrix::from_triplets_unchecked(dims[k - 1], dims[k], t));
    }
    // random invertible change of basis in each degree
    let mut gs = Vec::new();
    for &n in &dims {
        gs.push(random_unitriangular_pair(rng, n));
    }
    let mut dd = Vec::new();
    for k in 0..len {
        if k == 0 {
            dd.push(d[0].clone());
        } else {
            let (g_prev, _) = &gs[k - 1];
            let (_, ginv) = &gs[k];
            dd.push(g_prev.mul(&d[k]).unwrap().mul(ginv).unwrap());
        }
    }
    let basis = (0..len)
        .map(|k| (0..dims[k]).map(|i| Label::atom(format!("e{}_{}", lo + k as i64, i))).collect())
        .collect();
    let c = ChainComplex::new(lo.min(0), lo, basis, dd).expect("valid random complex");
    let betti = (0..len).map(|k| (lo + k as i64, spheres[k])).collect();
    (c, betti)
}

/// Random matrix g = L U with unit diagonals, and its inverse.
fn random_unitriangular_pair(rng: &mut impl rand::Rng, n: usize) -> (RatMatrix, RatMatrix) {
    let mut lt = Vec::new();
    let mut ut = Vec::new();
    for i in 0..n {
        lt.push((i, i, Q::one()));
        ut.push((i, i, Q::one()));
        for j in 0..i {
            let a: i64 = rng.gen_range(-2..=2);
            if a != 0 {
                lt.push((i, j, q(a)));
            }
            let b: i64 = rng.gen_range(-2..=2);
            if b != 0 {
                ut.push((j, i, q(b)));
            }
        }
    }
    let l = RatMatrix::from_triplets_unchecked(n, n, lt);
    let u = RatMatrix::from_triplets_unchecked(n, n, ut);
    let g = l.mul(&u).unwrap();
    let inv = invert(&g).expect("unitriangular product is invertible");
    (g, inv)
}

/// Inverse of a square matrix, if invertible.
pub fn invert(m: &RatMatrix) -> Option<RatMatrix> {
    if m.rows() != m.cols() {
        return None;
    }
    let n = m.rows();
    let s = Solver::new(m);
    if s.rank() < n {
        return None;
    }
    let cols: Vec<SVec> = (0..n).map(|i| s.solve(&vec![(i, Q::one())]).unwrap()).collect();
    Some(RatMatrix::from_columns(n, &cols))
}

/// Sparse vector helper for dense input.
pub fn sv(v: &[i64]) -> SVec {
    svec_from_dense(&v.iter().map(|x| q(*x)).collect::<Vec<_>>())
}

pub fn is_zero_q(x: &Q) -> bool {
    x.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kk() -> ChainComplex {
        ChainComplex::ground()
    }

    #[test]
    fn unit_laws_for_tensor() {
        let d1 = disk(1).unwrap();
        let t = tensor(&d1, &kk()).unwrap();
        assert_eq!(t.dims(), d1.dims());
        assert_eq!(t.d(2), d1.d(2));
        let t2 = tensor(&kk(), &d1).unwrap();
        assert_eq!(t2.d(2), d1.d(2));
    }

    #[test]
    fn disk_squared() {
        let d0 = disk(0).unwrap();
        let t = tensor(&d0, &d0).unwrap();
        assert_eq!(t.dims(), vec![(0, 1), (1, 2), (2, 1)]);
        assert!(homology(&t).is_zero());
    }

    #[test]
    fn switch_signs() {
        let a = sphere(1, 0).unwrap();
        let s = switch(&a, &a).unwrap();
        assert_eq!(s.component(2).get(0, 0), q(-1));
        let b = sphere(2, 0).unwrap();
        let s = switch(&a, &b).unwrap();
        assert_eq!(s.component(3).get(0, 0), q(1));
        let s = switch(&kk(), &kk()).unwrap();
        assert_eq!(s.component(0).get(0, 0), q(1));
    }

    #[test]
    fn switch_involution() {
        let a = direct_sum(&[disk(0).unwrap(), sphere(1, 0).unwrap()]).unwrap();
        let b = disk(1).unwrap();
        let s1 = switch(&a, &b).unwrap();
        let s2 = switch(&b, &a).unwrap();
        assert_eq!(s2.compose(&s1).unwrap(), ChainMap::identity(s1.source()));
    }

    #[test]
    fn homology_examples() {
        let h = homology(&kk());
        assert_eq!(h.nonzero(), vec![(0, 1)]);
        for n in 0..=4 {
            assert!(homology(&disk(n).unwrap()).is_zero());
        }
        // 0 -> Q -> Q^2 -> Q -> 0, each d of rank 1
        let c = ChainComplex::new(
            0,
            0,
            vec![vec![Label::atom("a")], vec![Label::atom("b"), Label::atom("c")], vec![Label::atom("e")]],
            vec![
                RatMatrix::zero(0, 1),
                RatMatrix::from_i64(&[&[1, 1]]),
                RatMatrix::from_i64(&[&[1], &[-1]]),
            ],
        )
        .unwrap();
        assert!(homology(&c).is_zero());
    }

    #[test]
    fn disk_below_truncation() {
        assert!(disk(-1).is_err());
        assert_eq!(disk(2).unwrap().dims(), vec![(2, 1), (3, 1)]);
    }

    #[test]
    fn quasi_iso_examples() {
        let c = disk(1).unwrap();
        assert!(is_quasi_iso(&ChainMap::identity(&c), None).unwrap().ok);
        let z = ChainMap::zero(&kk(), &ChainComplex::zero(0), 0);
        assert!(!is_quasi_iso(&z, None).unwrap().ok);
        let parts = [disk(0).unwrap(), kk()];
        let p = sum_projection(&parts, 1).unwrap();
        assert!(is_quasi_iso(&p, None).unwrap().ok);
    }

    #[test]
    fn shifts() {
        let c = disk(1).unwrap();
        assert_eq!(shift(&c, 0).unwrap(), c);
        assert_eq!(shift(&shift(&c, 1).unwrap(), -1).unwrap(), c);
        assert_eq!(shift(&kk(), 1).unwrap().dims(), vec![(1, 1)]);
        assert!(shift(&kk(), -1).is_err());
    }

    #[test]
    fn cones() {
        let c = cone(&ChainMap::identity(&kk())).unwrap();
        assert_eq!(c.dims(), disk(0).unwrap().dims());
        assert!(homology(&c).is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let (x, _) = random_complex(&mut rng, 0, 3, 3);
            let f = ChainMap::identity(&x);
            assert!(homology(&cone(&f).unwrap()).is_zero());
            assert!(cone_inclusion(&f).unwrap().is_injective());
        }
    }

    #[test]
    fn simplex_chains() {
        assert_eq!(normalized_simplex_chains(0).dims(), vec![(0, 1)]);
        assert_eq!(normalized_simplex_chains(1).dims(), vec![(0, 2), (1, 1)]);
        let c = normalized_simplex_chains(2);
        assert_eq!(c.dims(), vec![(0, 3), (1, 3), (2, 1)]);
        c.check_d_squared().unwrap();
        assert_eq!(homology(&c).nonzero(), vec![(0, 1)]);
    }

    #[test]
    fn random_complexes_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let (c, betti) = random_complex(&mut rng, 0, 5, 5);
            let h = homology(&c);
            for (n, b) in betti {
                assert_eq!(h.dim(n), b);
            }
            let alt: i64 = h.dims().iter().map(|(n, d)| if is_odd(*n) { -(*d as i64) } else { *d as i64 }).sum();
            assert_eq!(alt, c.euler_characteristic());
        }
    }

    #[test]
    fn text_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (c, _) = random_complex(&mut rng, 1, 4, 4);
        let c = tensor(&c, &disk(0).unwrap()).unwrap();
        let txt = c.to_text();
        let back = ChainComplex::from_text(&txt).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), txt);
    }

    #[test]
    fn tensor_associative_up_to_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let (a, _) = random_complex(&mut rng, 0, 2, 2);
            let (b, _) = random_complex(&mut rng, 0, 2, 2);
            let (c, _) = random_complex(&mut rng, 0, 1, 2);
            let l = tensor(&tensor(&a, &b).unwrap(), &c).unwrap();
            let r = tensor(&a, &tensor(&b, &c).unwrap()).unwrap();
            let flat = |x: &Label| -> Label {
                let Label::Tensor(v) = x else { unreachable!() };
                let mut out = Vec::new();
                for p in v {
                    match p {
                        Label::Tensor(w) => out.extend(w.iter().cloned()),
                        o => out.push(o.clone()),
                    }
                }
                Label::Tensor(out)
            };
            for n in l.degrees() {
                let li: Vec<Label> = l.basis(n).iter().map(flat).collect();
                let ri: HashMap<Label, usize> = r.basis(n).iter().map(flat).enumerate().map(|(i, x)| (x, i)).collect();
                let perm: Vec<usize> = li.iter().map(|x| ri[x]).collect();
                // d_r(perm(e_j)) == perm(d_l(e_j))
                let dl = l.d(n);
                let dr = r.d(n);
                let lprev: Vec<Label> = l.basis(n - 1).iter().map(flat).collect();
                let rprev: HashMap<Label, usize> =
                    r.basis(n - 1).iter().map(flat).enumerate().map(|(i, x)| (x, i)).collect();
                for (j, pj) in perm.iter().enumerate() {
                    for (i, x) in lprev.iter().enumerate() {
                        assert_eq!(dl.get(i, j), dr.get(rprev[x], *pj));
                    }
                }
            }
        }
    }
}
