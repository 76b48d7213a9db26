//! Exact sparse linear algebra over the rationals.

use crate::error::{usage, Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Sparse vector: sorted indices, no zeros.
pub type SVec = Vec<(usize, Q)>;

pub fn svec_from_dense(v: &[Q]) -> SVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn svec_to_dense(v: &SVec, n: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); n];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

pub fn svec_get(v: &SVec, i: usize) -> Q {
    match v.binary_search_by_key(&i, |e| e.0) {
        Ok(k) => v[k].1.clone(),
        Err(_) => Q::zero(),
    }
}

/// a + c*b
pub fn svec_axpy(a: &SVec, c: &Q, b: &SVec) -> SVec {
    if c.is_zero() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let s = &a[i].1 + c * &b[j].1;
            if !s.is_zero() {
                out.push((a[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn svec_scale(a: &SVec, c: &Q) -> SVec {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(i, x)| (*i, x * c)).collect()
}

/// Sparse matrix in sorted triplet form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Q)>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for (r, c, v) in &self.entries {
            write!(f, " ({r},{c})={v}")?;
        }
        write!(f, " ]")
    }
}

impl RatMatrix {
    /// Builds a matrix; duplicate positions are summed and zeros dropped.
    pub fn new(rows: usize, cols: usize, triplets: Vec<(usize, usize, Q)>) -> Result<Self> {
        for (r, c, _) in &triplets {
            if *r >= rows || *c >= cols {
                return usage(format!("entry ({r},{c}) out of bounds for {rows}x{cols}"));
            }
        }
        Ok(Self::from_triplets_unchecked(rows, cols, triplets))
    }

    pub(crate) fn from_triplets_unchecked(
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, Q)>,
    ) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut entries: Vec<(usize, usize, Q)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| !e.2.is_zero());
        RatMatrix { rows, cols, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        RatMatrix { rows: n, cols: n, entries: (0..n).map(|i| (i, i, Q::one())).collect() }
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Result<Self> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != nc {
                return usage("ragged dense matrix");
            }
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    t.push((i, j, x.clone()));
                }
            }
        }
        Ok(RatMatrix { rows: nr, cols: nc, entries: t })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|x| q(*x)).collect()).collect();
        Self::from_dense(&dense).expect("rectangular")
    }

    /// Matrix whose columns are the given sparse vectors.
    pub fn from_columns(rows: usize, cols: &[SVec]) -> Self {
        let mut t = Vec::new();
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c {
                t.push((*i, j, x.clone()));
            }
        }
        Self::from_triplets_unchecked(rows, cols.len(), t)
    }

    pub fn from_dense_columns(rows: usize, cols: &[Vec<Q>]) -> Self {
        let sv: Vec<SVec> = cols.iter().map(|c| svec_from_dense(c)).collect();
        Self::from_columns(rows, &sv)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, Q)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        match self.entries.binary_search_by(|e| (e.0, e.1).cmp(&(r, c))) {
            Ok(k) => self.entries[k].2.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut out = vec![vec![Q::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r][*c] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let t = self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect();
        Self::from_triplets_unchecked(self.cols, self.rows, t)
    }

    pub fn sparse_rows(&self) -> Vec<SVec> {
        let mut out = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            out[*r].push((*c, v.clone()));
        }
        out
    }

    pub fn sparse_columns(&self) -> Vec<SVec> {
        let mut out = vec![Vec::new(); self.cols];
        for (r, c, v) in &self.entries {
            out[*c].push((*r, v.clone()));
        }
        out
    }

    pub fn column(&self, c: usize) -> SVec {
        self.entries.iter().filter(|e| e.1 == c).map(|e| (e.0, e.2.clone())).collect()
    }

    /// self * other
    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return usage(format!(
                "product shape mismatch {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let orows = other.sparse_rows();
        let mut t = Vec::new();
        for row in self.sparse_rows().iter().enumerate() {
            let (i, row) = row;
            let mut acc: SVec = Vec::new();
            for (k, a) in row {
                acc = svec_axpy(&acc, a, &orows[*k]);
            }
            for (j, v) in acc {
                t.push((i, j, v));
            }
        }
        Ok(RatMatrix { rows: self.rows, cols: other.cols, entries: t })
    }

    pub fn mul_svec(&self, v: &SVec) -> SVec {
        let mut acc: std::collections::BTreeMap<usize, Q> = Default::default();
        let cols = self.sparse_columns();
        for (j, x) in v {
            if *j >= self.cols {
                continue;
            }
            for (i, a) in &cols[*j] {
                *acc.entry(*i).or_insert_with(Q::zero) += a * x;
            }
        }
        acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    }

    pub fn mul_vec(&self, v: &[Q]) -> Result<Vec<Q>> {
        if v.len() != self.cols {
            return usage(format!("vector length {} vs {} columns", v.len(), self.cols));
        }
        let mut out = vec![Q::zero(); self.rows];
        for (r, c, a) in &self.entries {
            if !v[*c].is_zero() {
                out[*r] += a * &v[*c];
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return usage("sum shape mismatch");
        }
        let mut t = self.entries.clone();
        t.extend(other.entries.iter().cloned());
        Ok(Self::from_triplets_unchecked(self.rows, self.cols, t))
    }

    pub fn scale(&self, c: &Q) -> RatMatrix {
        if c.is_zero() {
            return RatMatrix::zero(self.rows, self.cols);
        }
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(r, k, v)| (*r, *k, v * c)).collect(),
        }
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix> {
        self.add(&other.scale(&q(-1)))
    }

    pub fn neg(&self) -> RatMatrix {
        self.scale(&q(-1))
    }

    /// [self | other]
    pub fn hstack(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.rows != other.rows {
            return usage("hstack row mismatch");
        }
        let mut t = self.entries.clone();
        t.extend(other.entries.iter().map(|(r, c, v)| (*r, c + self.cols, v.clone())));
        Ok(Self::from_triplets_unchecked(self.rows, self.cols + other.cols, t))
    }

    pub fn vstack(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.cols {
            return usage("vstack column mismatch");
        }
        let mut t = self.entries.clone();
        t.extend(other.entries.iter().map(|(r, c, v)| (r + self.rows, *c, v.clone())));
        Ok(Self::from_triplets_unchecked(self.rows + other.rows, self.cols, t))
    }

    pub fn block_diag(blocks: &[&RatMatrix]) -> RatMatrix {
        let (mut r0, mut c0) = (0, 0);
        let mut t = Vec::new();
        for b in blocks {
            t.extend(b.entries.iter().map(|(r, c, v)| (r + r0, c + c0, v.clone())));
            r0 += b.rows;
            c0 += b.cols;
        }
        Self::from_triplets_unchecked(r0, c0, t)
    }

    /// Kronecker product.
    pub fn kron(&self, other: &RatMatrix) -> RatMatrix {
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, a) in &self.entries {
            for (r2, c2, b) in &other.entries {
                t.push((r1 * other.rows + r2, c1 * other.cols + c2, a * b));
            }
        }
        Self::from_triplets_unchecked(self.rows * other.rows, self.cols * other.cols, t)
    }

    /// Rows subset (in given order).
    pub fn select_rows(&self, idx: &[usize]) -> RatMatrix {
        let rows = self.sparse_rows();
        let mut t = Vec::new();
        for (k, &i) in idx.iter().enumerate() {
            for (j, v) in &rows[i] {
                t.push((k, *j, v.clone()));
            }
        }
        Self::from_triplets_unchecked(idx.len(), self.cols, t)
    }

    pub fn select_cols(&self, idx: &[usize]) -> RatMatrix {
        self.transpose().select_rows(idx).transpose()
    }

    pub fn rank(&self) -> usize {
        Echelon::column_major(self).pivots.len()
    }
}

/// Row echelon data of a matrix reduced with the column-major pivot rule:
/// columns left to right, pivot = first unused row with a nonzero entry.
/// Rows are stored fully reduced (RREF), pivot entries equal to one.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub ncols: usize,
    /// (pivot column, reduced row)
    pub pivots: Vec<(usize, SVec)>,
}

impl Echelon {
    pub fn empty(ncols: usize) -> Self {
        Echelon { ncols, pivots: Vec::new() }
    }

    pub fn column_major(m: &RatMatrix) -> Self {
        let mut rows: Vec<Option<SVec>> = m.sparse_rows().into_iter().map(Some).collect();
        // column -> rows having an entry there; kept approximately, checked on use
        let mut pivots: Vec<(usize, SVec)> = Vec::new();
        for col in 0..m.cols() {
            let mut found = None;
            for (i, r) in rows.iter().enumerate() {
                if let Some(r) = r {
                    if !svec_get(r, col).is_zero() {
                        found = Some(i);
                        break;
                    }
                }
            }
            let Some(pi) = found else { continue };
            let prow = rows[pi].take().unwrap();
            let inv = svec_get(&prow, col).recip();
            let prow = svec_scale(&prow, &inv);
            for r in rows.iter_mut().flatten() {
                let c = svec_get(r, col);
                if !c.is_zero() {
                    *r = svec_axpy(r, &-c, &prow);
                }
            }
            for (_, r) in pivots.iter_mut() {
                let c = svec_get(r, col);
                if !c.is_zero() {
                    *r = svec_axpy(r, &-c, &prow);
                }
            }
            pivots.push((col, prow));
        }
        Echelon { ncols: m.cols(), pivots }
    }

    /// Echelon form of the span of the given vectors (as rows).
    pub fn of_span(ncols: usize, vecs: &[SVec]) -> Self {
        let m = RatMatrix::from_columns(ncols, vecs).transpose();
        Self::column_major(&m)
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        self.pivots.iter().map(|p| p.0).collect()
    }

    /// Residual of v after subtracting the span; zero iff v in the span.
    pub fn reduce(&self, v: &SVec) -> SVec {
        let mut r = v.clone();
        for (col, row) in &self.pivots {
            let c = svec_get(&r, *col);
            if !c.is_zero() {
                r = svec_axpy(&r, &-c, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds v if independent; keeps rows fully reduced. Returns true if added.
    pub fn insert(&mut self, v: &SVec) -> bool {
        let r = self.reduce(v);
        if r.is_empty() {
            return false;
        }
        let col = r[0].0;
        let inv = r[0].1.recip();
        let r = svec_scale(&r, &inv);
        for (_, row) in self.pivots.iter_mut() {
            let c = svec_get(row, col);
            if !c.is_zero() {
                *row = svec_axpy(row, &-c, &r);
            }
        }
        self.pivots.push((col, r));
        true
    }

    /// Standard basis indices not among the pivot columns (a complement).
    pub fn free_cols(&self) -> Vec<usize> {
        let mut is_piv = vec![false; self.ncols];
        for (c, _) in &self.pivots {
            is_piv[*c] = true;
        }
        (0..self.ncols).filter(|c| !is_piv[*c]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankKernelImage {
    pub rank: usize,
    pub kernel: Vec<Vec<Q>>,
    pub image: Vec<Vec<Q>>,
}

/// Rank, kernel basis and image basis of m. The image basis consists of the
/// pivot columns of m; the kernel basis has one vector per free column.
pub fn rank_kernel_image(m: &RatMatrix) -> RankKernelImage {
    let e = Echelon::column_major(m);
    let kernel = kernel_from_echelon(&e)
        .into_iter()
        .map(|v| svec_to_dense(&v, m.cols()))
        .collect();
    let image = e.pivots.iter().map(|(c, _)| svec_to_dense(&m.column(*c), m.rows())).collect();
    RankKernelImage { rank: e.rank(), kernel, image }
}

pub(crate) fn kernel_from_echelon(e: &Echelon) -> Vec<SVec> {
    let mut out = Vec::new();
    for f in e.free_cols() {
        let mut v: SVec = vec![(f, Q::one())];
        for (pc, row) in &e.pivots {
            let c = svec_get(row, f);
            if !c.is_zero() {
                v.push((*pc, -c));
            }
        }
        v.sort_by_key(|x| x.0);
        out.push(v);
    }
    out
}

/// Sparse kernel basis.
pub fn kernel_sparse(m: &RatMatrix) -> Vec<SVec> {
    kernel_from_echelon(&Echelon::column_major(m))
}

/// Solves m x = b. None iff b is not in the image.
pub fn solve_linear(m: &RatMatrix, b: &[Q]) -> Result<Option<(Vec<Q>, Vec<Vec<Q>>)>> {
    if b.len() != m.rows() {
        return usage(format!("right-hand side has length {} but matrix has {} rows", b.len(), m.rows()));
    }
    let bcol = RatMatrix::from_dense_columns(m.rows(), &[b.to_vec()]);
    let aug = m.hstack(&bcol)?;
    let e = Echelon::column_major(&aug);
    if e.pivots.iter().any(|(c, _)| *c == m.cols()) {
        return Ok(None);
    }
    let mut x = vec![Q::zero(); m.cols()];
    for (c, row) in &e.pivots {
        x[*c] = svec_get(row, m.cols());
    }
    let mut e_m = e.clone();
    e_m.ncols = m.cols() + 1;
    let kernel = kernel_from_echelon(&e_m)
        .into_iter()
        .filter(|v| v.iter().all(|(i, _)| *i < m.cols()))
        .map(|v| svec_to_dense(&v, m.cols()))
        .collect();
    Ok(Some((x, kernel)))
}

/// Sparse solve for many right-hand sides sharing one matrix.
pub struct Solver {
    ncols: usize,
    nrows: usize,
    /// row operations recorded as the echelon of [m^T]; we instead keep
    /// the echelon of the column space with coordinates tracked.
    basis: Vec<(usize, SVec, SVec)>,
}

impl Solver {
    /// Prepares to express vectors as combinations of the columns of m.
    pub fn new(m: &RatMatrix) -> Self {
        let mut basis: Vec<(usize, SVec, SVec)> = Vec::new();
        for (j, col) in m.sparse_columns().into_iter().enumerate() {
            let mut v = col;
            let mut coord: SVec = vec![(j, Q::one())];
            for (pc, row, rc) in &basis {
                let c = svec_get(&v, *pc);
                if !c.is_zero() {
                    v = svec_axpy(&v, &-c.clone(), row);
                    coord = svec_axpy(&coord, &-c, rc);
                }
            }
            if v.is_empty() {
                continue;
            }
            let pc = v[0].0;
            let inv = v[0].1.recip();
            let v = svec_scale(&v, &inv);
            let coord = svec_scale(&coord, &inv);
            for (_, row, rc) in basis.iter_mut() {
                let c = svec_get(row, pc);
                if !c.is_zero() {
                    *row = svec_axpy(row, &-c.clone(), &v);
                    *rc = svec_axpy(rc, &-c, &coord);
                }
            }
            basis.push((pc, v, coord));
        }
        Solver { ncols: m.cols(), nrows: m.rows(), basis }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    /// Some(x) with m x = b, or None.
    pub fn solve(&self, b: &SVec) -> Option<SVec> {
        let mut v = b.clone();
        let mut x: SVec = Vec::new();
        for (pc, row, rc) in &self.basis {
            let c = svec_get(&v, *pc);
            if !c.is_zero() {
                v = svec_axpy(&v, &-c.clone(), row);
                x = svec_axpy(&x, &c, rc);
            }
        }
        if v.is_empty() {
            Some(x)
        } else {
            None
        }
    }
}

/// Map induced by f: A -> B on A/subA -> B/subB, in the complement bases
/// given by the non-pivot standard vectors of each subspace.
pub fn induced_map_on_quotients(f: &RatMatrix, sub_a: &[Vec<Q>], sub_b: &[Vec<Q>]) -> Result<RatMatrix> {
    let (na, nb) = (f.cols(), f.rows());
    for v in sub_a {
        if v.len() != na {
            return usage("subA vector has wrong length");
        }
    }
    for v in sub_b {
        if v.len() != nb {
            return usage("subB vector has wrong length");
        }
    }
    let sa: Vec<SVec> = sub_a.iter().map(|v| svec_from_dense(v)).collect();
    let sb: Vec<SVec> = sub_b.iter().map(|v| svec_from_dense(v)).collect();
    let ea = Echelon::of_span(na, &sa);
    let eb = Echelon::of_span(nb, &sb);
    for v in &sa {
        if !eb.contains(&f.mul_svec(v)) {
            return Err(Error::Precondition("f(subA) is not contained in span(subB)".into()));
        }
    }
    let qa = ea.free_cols();
    let qb = eb.free_cols();
    let mut pos_b = vec![usize::MAX; nb];
    for (k, c) in qb.iter().enumerate() {
        pos_b[*c] = k;
    }
    let mut t = Vec::new();
    for (j, &c) in qa.iter().enumerate() {
        let img = eb.reduce(&f.mul_svec(&vec![(c, Q::one())]));
        for (i, v) in img {
            t.push((pos_b[i], j, v));
        }
    }
    Ok(RatMatrix::from_triplets_unchecked(qb.len(), qa.len(), t))
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() || d.is_negative() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix() {
        let r = rank_kernel_image(&RatMatrix::zero(2, 3));
        assert_eq!((r.rank, r.kernel.len(), r.image.len()), (0, 3, 0));
    }

    #[test]
    fn identity_matrix() {
        let r = rank_kernel_image(&RatMatrix::identity(3));
        assert_eq!((r.rank, r.kernel.len()), (3, 0));
    }

    #[test]
    fn rank_one() {
        let r = rank_kernel_image(&RatMatrix::from_i64(&[&[1, 2], &[2, 4]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel, vec![vec![q(-2), q(1)]]);
    }

    #[test]
    fn solves() {
        let m = RatMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let (x, k) = solve_linear(&m, &[q(1), q(1)]).unwrap().unwrap();
        assert_eq!(x, vec![qf(1, 2), qf(1, 3)]);
        assert!(k.is_empty());
        assert!(solve_linear(&RatMatrix::zero(2, 2), &[q(1), q(0)]).unwrap().is_none());
        assert!(solve_linear(&m, &[q(1)]).is_err());
        let id = RatMatrix::identity(3);
        let b = vec![q(4), qf(-1, 7), q(0)];
        assert_eq!(solve_linear(&id, &b).unwrap().unwrap().0, b);
    }

    #[test]
    fn quotients() {
        let id = RatMatrix::identity(2);
        let full = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        assert_eq!(induced_map_on_quotients(&id, &full, &full).unwrap(), RatMatrix::zero(0, 0));
        assert_eq!(induced_map_on_quotients(&id, &[], &[]).unwrap(), RatMatrix::identity(2));
        let s = vec![vec![q(1), q(0)]];
        assert_eq!(induced_map_on_quotients(&id, &s, &s).unwrap(), RatMatrix::identity(1));
        let s2 = vec![vec![q(0), q(1)]];
        assert!(induced_map_on_quotients(&id, &s, &s2).is_err());
    }

    #[test]
    fn rational_text() {
        for s in ["0", "-3", "5/7", "-12/5"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert!(parse_q("1/0").is_err());
    }
}
