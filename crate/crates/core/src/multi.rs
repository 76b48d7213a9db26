//! Direct sums of multi-factor tensor products with explicit basis tuples,
//! and quotient complexes by subcomplexes.

use crate::chain::{koszul, ChainComplex, ChainMap, MAX_DEGREE};
use crate::error::{usage, Error, Result};
use crate::exactlin::{Echelon, RatMatrix, SVec, Q};
use crate::label::Label;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

/// ⊕_s F_{s,1} ⊗ … ⊗ F_{s,k_s}. Basis elements are (summand, tuple of factor
/// global indices), ordered by degree, then summand, then tuple.
#[derive(Clone, Debug)]
pub struct TensorSum {
    pub complex: ChainComplex,
    factors: Vec<Vec<ChainComplex>>,
    fdeg: Vec<Vec<Vec<i64>>>,
    elems: Vec<(usize, Vec<usize>)>,
    index: HashMap<(usize, Vec<usize>), usize>,
}

impl TensorSum {
    pub fn new(tags: Vec<String>, factors: Vec<Vec<ChainComplex>>) -> Result<Self> {
        if tags.len() != factors.len() {
            return usage("one tag per summand is required");
        }
        let fdeg: Vec<Vec<Vec<i64>>> =
            factors.iter().map(|fs| fs.iter().map(|f| f.global_degrees()).collect()).collect();
        let mut elems: Vec<(i64, usize, Vec<usize>)> = Vec::new();
        let mut t = i64::MAX;
        for (s, fs) in factors.iter().enumerate() {
            t = t.min(fs.iter().map(|f| f.t()).sum::<i64>());
            let dims: Vec<usize> = fs.iter().map(|f| f.total_dim()).collect();
            if dims.iter().any(|d| *d == 0) {
                continue;
            }
            for tup in odometer(&dims) {
                let deg: i64 = tup.iter().enumerate().map(|(p, i)| fdeg[s][p][*i]).sum();
                elems.push((deg, s, tup));
            }
        }
        elems.sort();
        if t == i64::MAX {
            t = 0;
        }
        let t = t.max(-MAX_DEGREE);
        if elems.is_empty() {
            return Ok(TensorSum {
                complex: ChainComplex::zero(t),
                factors,
                fdeg,
                elems: Vec::new(),
                index: HashMap::new(),
            });
        }
        let lo = elems[0].0;
        let hi = elems.last().unwrap().0;
        if lo.abs() > MAX_DEGREE || hi.abs() > MAX_DEGREE {
            return usage("tensor sum degree window overflow");
        }
        let t = t.min(lo);
        let mut basis = vec![Vec::new(); (hi - lo + 1) as usize];
        let mut index = HashMap::new();
        for (g, (deg, s, tup)) in elems.iter().enumerate() {
            let parts = tup.iter().enumerate().map(|(p, i)| {
                let (n, k) = factors[*s][p].locate(*i);
                factors[*s][p].basis(n)[k].clone()
            });
            basis[(deg - lo) as usize].push(Label::tag(tags[*s].clone(), Label::tensor(parts.collect())));
            index.insert((*s, tup.clone()), g);
        }
        let elems: Vec<(usize, Vec<usize>)> = elems.into_iter().map(|(_, s, t)| (s, t)).collect();
        let dcols: Vec<Vec<Vec<SVec>>> =
            factors.iter().map(|fs| fs.iter().map(|f| f.total_d().sparse_columns()).collect()).collect();
        let mut trip = Vec::new();
        for (g, (s, tup)) in elems.iter().enumerate() {
            let mut before = 0i64;
            for p in 0..tup.len() {
                let sign = koszul(before);
                for (i, v) in &dcols[*s][p][tup[p]] {
                    let mut t2 = tup.clone();
                    t2[p] = *i;
                    let r = index[&(*s, t2)];
                    trip.push((r, g, &sign * v));
                }
                before += fdeg[*s][p][tup[p]];
            }
        }
        let n = elems.len();
        let total = RatMatrix::new(n, n, trip)?;
        let complex = ChainComplex::from_total(t, lo, basis, &total)?;
        Ok(TensorSum { complex, factors, fdeg, elems, index })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn index(&self, s: usize, tup: &[usize]) -> Option<usize> {
        self.index.get(&(s, tup.to_vec())).copied()
    }

    pub fn elem(&self, g: usize) -> (usize, &[usize]) {
        let (s, t) = &self.elems[g];
        (*s, t)
    }

    pub fn factors(&self, s: usize) -> &[ChainComplex] {
        &self.factors[s]
    }

    pub fn nsummands(&self) -> usize {
        self.factors.len()
    }

    /// Degree of basis element `i` of factor `p` in summand `s`.
    pub fn factor_degree(&self, s: usize, p: usize, i: usize) -> i64 {
        self.fdeg[s][p][i]
    }

    /// Adds c · (v_1 ⊗ … ⊗ v_k) placed in summand s to `out`.
    pub fn expand_into(&self, out: &mut BTreeMap<usize, Q>, s: usize, parts: &[SVec], c: &Q) {
        if c.is_zero() || parts.iter().any(|p| p.is_empty()) {
            return;
        }
        let mut idx = vec![0usize; parts.len()];
        loop {
            let mut coef = c.clone();
            let tup: Vec<usize> = idx
                .iter()
                .enumerate()
                .map(|(p, k)| {
                    coef *= &parts[p][*k].1;
                    parts[p][*k].0
                })
                .collect();
            let g = self.index(s, &tup).expect("tuple inside the tensor sum");
            let e = out.entry(g).or_insert_with(Q::zero);
            *e += coef;
            let mut p = parts.len();
            loop {
                if p == 0 {
                    return finish(out);
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < parts[p].len() {
                    break;
                }
                idx[p] = 0;
            }
        }
    }
}

fn finish(out: &mut BTreeMap<usize, Q>) {
    out.retain(|_, v| !v.is_zero());
}

pub fn btree_to_svec(m: BTreeMap<usize, Q>) -> SVec {
    m.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Matrix whose columns are given by a closure on source indices.
pub fn matrix_from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize) -> SVec) -> RatMatrix {
    let cs: Vec<SVec> = (0..cols).map(&mut f).collect();
    RatMatrix::from_columns(rows, &cs)
}

/// c / S for a subcomplex S spanned by homogeneous vectors (global indices).
/// The quotient basis is the set of standard vectors off the pivot columns.
#[derive(Clone, Debug)]
pub struct QuotientComplex {
    pub complex: ChainComplex,
    ech: Echelon,
    keep: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl QuotientComplex {
    pub fn new(c: &ChainComplex, sub: &[SVec]) -> Result<Self> {
        let n = c.total_dim();
        let ech = Echelon::of_span(n, sub);
        let d = c.total_d();
        for (_, row) in &ech.pivots {
            if !ech.contains(&d.mul_svec(row)) {
                return Err(Error::Precondition("subspace is not closed under d".into()));
            }
        }
        let degs = c.global_degrees();
        for (_, row) in &ech.pivots {
            if row.iter().any(|(i, _)| degs[*i] != degs[row[0].0]) {
                return Err(Error::Precondition("subspace is not graded".into()));
            }
        }
        let keep = ech.free_cols();
        let mut pos = vec![None; n];
        for (k, i) in keep.iter().enumerate() {
            pos[*i] = Some(k);
        }
        let mut basis = vec![Vec::new(); c.degrees().count()];
        for &i in &keep {
            let (deg, k) = c.locate(i);
            basis[(deg - c.lo()) as usize].push(c.basis(deg)[k].clone());
        }
        let mut trip = Vec::new();
        for (j, &i) in keep.iter().enumerate() {
            for (r, v) in ech.reduce(&d.column(i)) {
                trip.push((pos[r].expect("reduced vectors live on kept columns"), j, v));
            }
        }
        let m = keep.len();
        let total = RatMatrix::new(m, m, trip)?;
        let complex = ChainComplex::from_total(c.t(), c.lo(), basis, &total)?;
        Ok(QuotientComplex { complex, ech, keep, pos })
    }

    /// Identity quotient (no relations).
    pub fn trivial(c: &ChainComplex) -> Self {
        let n = c.total_dim();
        QuotientComplex {
            complex: c.clone(),
            ech: Echelon::empty(n),
            keep: (0..n).collect(),
            pos: (0..n).map(Some).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.pos.len()
    }

    pub fn relations_rank(&self) -> usize {
        self.ech.rank()
    }

    /// Class of an ambient vector in quotient coordinates.
    pub fn project(&self, v: &SVec) -> SVec {
        let mut out: Vec<(usize, Q)> =
            self.ech.reduce(v).into_iter().map(|(i, x)| (self.pos[i].expect("kept column"), x)).collect();
        out.sort_by_key(|e| e.0);
        out
    }

    /// Ambient index of quotient basis vector k.
    pub fn lift(&self, k: usize) -> usize {
        self.keep[k]
    }

    pub fn in_relations(&self, v: &SVec) -> bool {
        self.ech.contains(v)
    }

    pub fn projection_matrix(&self) -> RatMatrix {
        let n = self.ambient_dim();
        matrix_from_fn(self.keep.len(), n, |i| self.project(&vec![(i, Q::one())]))
    }

    pub fn projection(&self, ambient: &ChainComplex) -> Result<ChainMap> {
        ChainMap::from_total(ambient, &self.complex, 0, &self.projection_matrix())
    }

    /// Map induced on quotients by an ambient map given on ambient basis vectors.
    pub fn induced(&self, target: &QuotientComplex, f: impl Fn(usize) -> SVec) -> RatMatrix {
        matrix_from_fn(target.complex.total_dim(), self.complex.total_dim(), |k| target.project(&f(self.lift(k))))
    }
}

/// Sign of the permutation sorting graded elements: moving the items into the
/// order `perm` (new position j holds old item perm[j]).
pub fn koszul_permutation(degs: &[i64], perm: &[usize]) -> Q {
    let mut odd = 0i64;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                odd += degs[perm[a]] * degs[perm[b]];
            }
        }
    }
    koszul(odd)
}

/// All tuples with entries below the given bounds, lexicographic.
pub fn odometer(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &d in dims {
        out = out.into_iter().flat_map(|t| (0..d).map(move |i| {
            let mut t = t.clone();
            t.push(i);
            t
        })).collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{disk, homology, sphere, tensor_all};

    #[test]
    fn matches_iterated_tensor() {
        let a = disk(0).unwrap();
        let b = sphere(1, 0).unwrap();
        let ts = TensorSum::new(vec!["x".into()], vec![vec![a.clone(), b.clone(), a.clone()]]).unwrap();
        let it = tensor_all(&[a.clone(), b.clone(), a.clone()]).unwrap();
        assert_eq!(ts.complex.dims(), it.trimmed().dims());
        assert!(homology(&ts.complex).is_zero());
        let two = TensorSum::new(vec!["p".into(), "q".into()], vec![vec![b.clone()], vec![b.clone(), b]]).unwrap();
        assert_eq!(homology(&two.complex).dims(), vec![(1, 1), (2, 1)]);
    }

    #[test]
    fn quotient_by_disk() {
        let c = crate::chain::direct_sum(&[disk(0).unwrap(), sphere(0, 0).unwrap()]).unwrap();
        // the disk summand occupies global indices 0 (degree 0) and 2 (degree 1)
        let qc = QuotientComplex::new(&c, &[vec![(0, Q::one())], vec![(2, Q::one())]]).unwrap();
        assert_eq!(qc.complex.dims(), vec![(0, 1), (1, 0)]);
        assert_eq!(qc.project(&vec![(1, Q::one())]), vec![(0, Q::one())]);
        assert!(QuotientComplex::new(&c, &[vec![(2, Q::one())]]).is_err());
    }
}
