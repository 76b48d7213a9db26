//! Finite-dimensional commutative dg algebras (non-positively graded) and
//! free graded-commutative algebras with their finite quotients.

use crate::chain::{is_odd, koszul, ChainComplex};
use crate::error::{usage, Error, Result};
use crate::exactlin::{q, svec_axpy, svec_scale, Echelon, RatMatrix, SVec, Q};
use crate::label::Label;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};

/// A finite-dimensional graded-commutative dg algebra. Indices are global
/// indices of the underlying complex (degrees ascending, so most negative first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    pub complex: ChainComplex,
    /// mult[a][b] = e_a e_b
    pub mult: Vec<Vec<SVec>>,
    pub unit: SVec,
}

impl FiniteAlgebra {
    pub fn new(complex: ChainComplex, mult: Vec<Vec<SVec>>, unit: SVec) -> Result<Self> {
        let a = FiniteAlgebra { complex, mult, unit };
        a.check()?;
        Ok(a)
    }

    pub fn dim(&self) -> usize {
        self.complex.total_dim()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.complex.global_degrees()
    }

    pub fn mul(&self, x: &SVec, y: &SVec) -> SVec {
        let mut acc = Vec::new();
        for (a, u) in x {
            for (b, v) in y {
                acc = svec_axpy(&acc, &(u * v), &self.mult[*a][*b]);
            }
        }
        acc
    }

    /// Left multiplication by x as a matrix.
    pub fn left_mul(&self, x: &SVec) -> RatMatrix {
        let n = self.dim();
        let cols: Vec<SVec> = (0..n).map(|b| self.mul(x, &vec![(b, Q::one())])).collect();
        RatMatrix::from_columns(n, &cols)
    }

    pub fn d_vec(&self, x: &SVec) -> SVec {
        self.complex.total_d().mul_svec(x)
    }

    /// Associativity, graded commutativity, unit and Leibniz rule.
    pub fn check(&self) -> Result<()> {
        let n = self.dim();
        if self.complex.hi() > 0 && (1..=self.complex.hi()).any(|k| self.complex.dim(k) > 0) {
            return usage("algebra must be non-positively graded");
        }
        if self.mult.len() != n || self.mult.iter().any(|r| r.len() != n) {
            return usage("multiplication table has the wrong size");
        }
        let deg = self.degrees();
        let dt = self.complex.total_d();
        let dcols = dt.sparse_columns();
        for a in 0..n {
            for b in 0..n {
                for (k, _) in &self.mult[a][b] {
                    if deg[*k] != deg[a] + deg[b] {
                        return usage("multiplication does not respect degrees");
                    }
                }
                let ab = &self.mult[a][b];
                let ba = svec_scale(&self.mult[b][a], &koszul(deg[a] * deg[b]));
                if ab != &ba {
                    return usage(format!("not graded commutative on ({a},{b})"));
                }
                // Leibniz: d(ab) = da b + (-1)^|a| a db
                let lhs = dt.mul_svec(ab);
                let r1 = self.mul(&dcols[a], &vec![(b, Q::one())]);
                let r2 = self.mul(&vec![(a, Q::one())], &dcols[b]);
                let rhs = svec_axpy(&r1, &koszul(deg[a]), &r2);
                if lhs != rhs {
                    return usage(format!("d is not a derivation on ({a},{b})"));
                }
            }
        }
        for a in 0..n {
            let ea = vec![(a, Q::one())];
            if self.mul(&self.unit, &ea) != ea {
                return usage("unit law fails");
            }
            for b in 0..n {
                for c in 0..n {
                    let l = self.mul(&self.mult[a][b], &vec![(c, Q::one())]);
                    let r = self.mul(&ea, &self.mult[b][c]);
                    if l != r {
                        return usage(format!("not associative on ({a},{b},{c})"));
                    }
                }
            }
        }
        if !dt.mul_svec(&self.unit).is_empty() {
            return usage("d(1) != 0");
        }
        Ok(())
    }

    /// Quotient by a subspace that must be a dg ideal. Basis of the quotient:
    /// the standard vectors not eliminated by the ideal (free columns).
    pub fn quotient(&self, ideal: &[SVec]) -> Result<(FiniteAlgebra, RatMatrix)> {
        let n = self.dim();
        let e = Echelon::of_span(n, ideal);
        let dt = self.complex.total_d();
        for v in &e.pivots {
            if !e.contains(&dt.mul_svec(&v.1)) {
                return Err(Error::Precondition("ideal is not closed under d".into()));
            }
            for b in 0..n {
                if !e.contains(&self.mul(&v.1, &vec![(b, Q::one())])) {
                    return Err(Error::Precondition("subspace is not an ideal".into()));
                }
            }
        }
        let free = e.free_cols();
        let mut pos = vec![usize::MAX; n];
        for (k, c) in free.iter().enumerate() {
            pos[*c] = k;
        }
        let proj = |v: &SVec| -> SVec {
            let r = e.reduce(v);
            let mut out: SVec = r.into_iter().map(|(i, x)| (pos[i], x)).collect();
            out.sort_by_key(|x| x.0);
            out
        };
        // projection matrix
        let cols: Vec<SVec> = (0..n).map(|i| proj(&vec![(i, Q::one())])).collect();
        let pm = RatMatrix::from_columns(free.len(), &cols);
        let deg = self.degrees();
        let lo = self.complex.lo();
        let hi = self.complex.hi();
        let mut basis = vec![Vec::new(); (hi - lo + 1) as usize];
        for &c in &free {
            let (dn, i) = self.complex.locate(c);
            basis[(dn - lo) as usize].push(self.complex.basis(dn)[i].clone());
        }
        let _ = deg;
        let total: Vec<SVec> = free.iter().map(|&c| proj(&dt.mul_svec(&vec![(c, Q::one())]))).collect();
        let tm = RatMatrix::from_columns(free.len(), &total);
        let complex = ChainComplex::from_total(self.complex.t(), lo, basis, &tm)?;
        let mult = free
            .iter()
            .map(|&a| free.iter().map(|&b| proj(&self.mult[a][b])).collect())
            .collect();
        let unit = proj(&self.unit);
        Ok((FiniteAlgebra::new(complex, mult, unit)?, pm))
    }

    /// Checks that a matrix A -> B is a unital dg algebra map.
    pub fn check_map(&self, target: &FiniteAlgebra, f: &RatMatrix) -> Result<()> {
        if f.cols() != self.dim() || f.rows() != target.dim() {
            return usage("algebra map has the wrong shape");
        }
        if f.mul_svec(&self.unit) != target.unit {
            return Err(Error::Precondition("map is not unital".into()));
        }
        let (sd, td) = (self.degrees(), target.degrees());
        for (r, c, _) in f.entries() {
            if sd[*c] != td[*r] {
                return Err(Error::Precondition("map does not preserve degree".into()));
            }
        }
        let lhs = target.complex.total_d().mul(f)?;
        let rhs = f.mul(&self.complex.total_d())?;
        if lhs != rhs {
            return Err(Error::Precondition("map does not commute with d".into()));
        }
        let fc = f.sparse_columns();
        for a in 0..self.dim() {
            for b in 0..self.dim() {
                if f.mul_svec(&self.mult[a][b]) != target.mul(&fc[a], &fc[b]) {
                    return Err(Error::Precondition("map is not multiplicative".into()));
                }
            }
        }
        Ok(())
    }

    /// Degree-zero part as a subalgebra: indices of degree-0 basis vectors.
    pub fn degree_zero_indices(&self) -> Vec<usize> {
        let off = self.complex.offset(0);
        (off..off + self.complex.dim(0)).collect()
    }

    /// Direct product of algebras (block multiplication).
    pub fn product(parts: &[FiniteAlgebra]) -> Result<FiniteAlgebra> {
        if parts.is_empty() {
            return usage("empty product");
        }
        let lo = parts.iter().map(|a| a.complex.lo()).min().unwrap();
        let hi = 0;
        // global index of part p, its global index g
        let mut basis = vec![Vec::new(); (hi - lo + 1) as usize];
        let mut map: Vec<Vec<usize>> = parts.iter().map(|a| vec![0; a.dim()]).collect();
        let mut next = 0;
        for n in lo..=hi {
            for (p, a) in parts.iter().enumerate() {
                let off = a.complex.offset(n);
                for (i, l) in a.complex.basis(n).iter().enumerate() {
                    basis[(n - lo) as usize].push(Label::tag(format!("p{p}"), l.clone()));
                    map[p][off + i] = next;
                    next += 1;
                }
            }
        }
        let total = next;
        let mut dt = Vec::new();
        let mut mult = vec![vec![Vec::new(); total]; total];
        let mut unit = Vec::new();
        for (p, a) in parts.iter().enumerate() {
            for (r, c, v) in a.complex.total_d().entries() {
                dt.push((map[p][*r], map[p][*c], v.clone()));
            }
            for x in 0..a.dim() {
                for y in 0..a.dim() {
                    let mut v: SVec = a.mult[x][y].iter().map(|(k, c)| (map[p][*k], c.clone())).collect();
                    v.sort_by_key(|e| e.0);
                    mult[map[p][x]][map[p][y]] = v;
                }
            }
            unit.extend(a.unit.iter().map(|(k, c)| (map[p][*k], c.clone())));
        }
        unit.sort_by_key(|e| e.0);
        let tm = RatMatrix::from_triplets_unchecked(total, total, dt);
        let complex = ChainComplex::from_total(lo.min(0), lo, basis, &tm)?;
        FiniteAlgebra::new(complex, mult, unit)
    }
}

/// Monomial in a free graded-commutative algebra: exponent per generator.
pub type Mono = Vec<u32>;

/// Free graded-commutative algebra on generators of the given degrees,
/// with a derivation given on generators.
#[derive(Clone, Debug)]
pub struct FreeGca {
    pub degs: Vec<i64>,
    pub names: Vec<String>,
    pub dgen: Vec<SVec>,
}

impl FreeGca {
    pub fn ngens(&self) -> usize {
        self.degs.len()
    }

    pub fn deg(&self, m: &Mono) -> i64 {
        m.iter().zip(&self.degs).map(|(e, d)| *e as i64 * d).sum()
    }

    pub fn one(&self) -> Mono {
        vec![0; self.ngens()]
    }

    pub fn gen(&self, i: usize) -> Mono {
        let mut m = self.one();
        m[i] = 1;
        m
    }

    /// a * b in normal form, with sign; None if an odd generator squares.
    pub fn mul(&self, a: &Mono, b: &Mono) -> Option<(Q, Mono)> {
        let mut parity = 0u32;
        let mut out = a.clone();
        for i in 0..self.ngens() {
            if b[i] == 0 {
                continue;
            }
            if is_odd(self.degs[i]) {
                if a[i] > 0 {
                    return None;
                }
                // b's odd generator i moves left past a's odd generators j > i
                for j in i + 1..self.ngens() {
                    if is_odd(self.degs[j]) && a[j] > 0 {
                        parity ^= 1;
                    }
                }
            }
            out[i] += b[i];
        }
        Some((koszul(parity as i64), out))
    }

    pub fn name(&self, m: &Mono) -> String {
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| if *e == 1 { self.names[i].clone() } else { format!("{}^{}", self.names[i], e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(".")
        }
    }

    /// Derivation applied to a monomial.
    pub fn d(&self, m: &Mono) -> BTreeMap<Mono, Q> {
        let letters: Vec<usize> = (0..self.ngens()).flat_map(|i| std::iter::repeat(i).take(m[i] as usize)).collect();
        let mut out: BTreeMap<Mono, Q> = BTreeMap::new();
        for j in 0..letters.len() {
            let mut prefix = self.one();
            let mut pdeg = 0;
            for &l in &letters[..j] {
                prefix[l] += 1;
                pdeg += self.degs[l];
            }
            let mut suffix = self.one();
            for &l in &letters[j + 1..] {
                suffix[l] += 1;
            }
            let s0 = koszul(pdeg);
            for (g, c) in &self.dgen[letters[j]] {
                let Some((s1, pm)) = self.mul(&prefix, &self.gen(*g)) else { continue };
                let Some((s2, full)) = self.mul(&pm, &suffix) else { continue };
                let e = out.entry(full).or_insert_with(Q::zero);
                *e += &s0 * &s1 * &s2 * c;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

/// The quotient of a free algebra by a finite-codimension dg ideal,
/// with the images of the generators.
#[derive(Clone, Debug)]
pub struct StageAlgebra {
    pub algebra: FiniteAlgebra,
    /// image of generator i in the algebra
    pub gens: Vec<SVec>,
}

/// Local stage at the origin: ΛW / (m^k + d(m^k) + (degree < -k)), where m is
/// generated by the degree-zero generators and k = order.
pub fn local_stage(gca: &FreeGca, order: u32) -> Result<StageAlgebra> {
    let m = order.max(1);
    let zero_gens: Vec<usize> = (0..gca.ngens()).filter(|i| gca.degs[*i] == 0).collect();
    let other: Vec<usize> = (0..gca.ngens()).filter(|i| gca.degs[*i] != 0).collect();
    if gca.degs.iter().any(|d| *d > 0) {
        return usage("generators must be non-positively graded");
    }
    let min_deg = -(m as i64);
    // monomials in the nonzero-degree generators with degree >= min_deg
    let mut others: Vec<Mono> = vec![gca.one()];
    for &g in &other {
        let mut next = Vec::new();
        for mono in &others {
            let mut e = 0u32;
            loop {
                let mut x = mono.clone();
                x[g] = e;
                if gca.deg(&x) < min_deg {
                    break;
                }
                next.push(x);
                if is_odd(gca.degs[g]) && e == 1 {
                    break;
                }
                e += 1;
            }
        }
        others = next;
    }
    // monomials in degree-zero generators of total exponent < m
    let mut polys: Vec<Mono> = vec![gca.one()];
    for &g in &zero_gens {
        let mut next = Vec::new();
        for mono in &polys {
            let used: u32 = zero_gens.iter().map(|z| mono[*z]).sum();
            for e in 0..(m - used) {
                let mut x = mono.clone();
                x[g] = e;
                next.push(x);
            }
        }
        polys = next;
    }
    let mut ambient: Vec<Mono> = Vec::new();
    for p in &polys {
        for o in &others {
            let x: Mono = p.iter().zip(o).map(|(a, b)| a + b).collect();
            ambient.push(x);
        }
    }
    // order: by degree ascending, then higher polynomial degree first
    let pdeg = |x: &Mono| -> u32 { zero_gens.iter().map(|z| x[*z]).sum() };
    ambient.sort_by(|a, b| gca.deg(a).cmp(&gca.deg(b)).then(pdeg(b).cmp(&pdeg(a))).then(b.cmp(a)));
    let index: HashMap<Mono, usize> = ambient.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    let to_vec = |terms: &BTreeMap<Mono, Q>| -> SVec {
        let mut v: SVec = terms.iter().filter_map(|(mo, c)| index.get(mo).map(|i| (*i, c.clone()))).collect();
        v.sort_by_key(|e| e.0);
        v
    };
    // ideal generators: d(x^a) * N with |a| = m
    let mut ideal: Vec<SVec> = Vec::new();
    let mut tops: Vec<Mono> = vec![gca.one()];
    for (k, &g) in zero_gens.iter().enumerate() {
        let mut next = Vec::new();
        for mono in &tops {
            let used: u32 = zero_gens.iter().map(|z| mono[*z]).sum();
            if k + 1 == zero_gens.len() {
                let mut x = mono.clone();
                x[g] = m - used;
                next.push(x);
            } else {
                for e in 0..=(m - used) {
                    let mut x = mono.clone();
                    x[g] = e;
                    next.push(x);
                }
            }
        }
        tops = next;
    }
    if !zero_gens.is_empty() {
        for t in &tops {
            let dt = gca.d(t);
            for o in &others {
                let mut prod: BTreeMap<Mono, Q> = BTreeMap::new();
                for (mono, c) in &dt {
                    if let Some((s, x)) = gca.mul(mono, o) {
                        *prod.entry(x).or_insert_with(Q::zero) += &s * c;
                    }
                }
                prod.retain(|_, v| !v.is_zero());
                let v = to_vec(&prod);
                if !v.is_empty() {
                    ideal.push(v);
                }
            }
        }
    }
    // ambient algebra data
    let n = ambient.len();
    let lo = ambient.iter().map(|x| gca.deg(x)).min().unwrap_or(0);
    let mut basis = vec![Vec::new(); (-lo + 1) as usize];
    for x in &ambient {
        basis[(gca.deg(x) - lo) as usize].push(Label::atom(gca.name(x)));
    }
    let mut dt = Vec::new();
    for (c, x) in ambient.iter().enumerate() {
        for (r, v) in to_vec(&gca.d(x)) {
            dt.push((r, c, v));
        }
    }
    let tm = RatMatrix::from_triplets_unchecked(n, n, dt);
    let complex = ChainComplex::from_total(lo, lo, basis, &tm)?;
    let mut mult = vec![vec![Vec::new(); n]; n];
    for (a, x) in ambient.iter().enumerate() {
        for (b, y) in ambient.iter().enumerate() {
            if let Some((s, z)) = gca.mul(x, y) {
                if let Some(i) = index.get(&z) {
                    mult[a][b] = vec![(*i, s)];
                }
            }
        }
    }
    let unit = vec![(index[&gca.one()], Q::one())];
    let amb = FiniteAlgebra { complex, mult, unit };
    let (alg, proj) = amb.quotient(&ideal)?;
    let gens = (0..gca.ngens())
        .map(|i| match index.get(&gca.gen(i)) {
            Some(k) => proj.mul_svec(&vec![(*k, Q::one())]),
            None => Vec::new(),
        })
        .collect();
    Ok(StageAlgebra { algebra: alg, gens })
}

/// Free graded-commutative algebra on the dual of a non-negatively graded
/// complex v: generator i is dual to global basis vector i of v, of degree
/// -|v_i|; the derivation is the transpose of d_v.
pub fn dual_generators(v: &ChainComplex) -> Result<FreeGca> {
    if v.lo() < 0 && v.degrees().any(|n| n < 0 && v.dim(n) > 0) {
        return usage("complex must be non-negatively graded");
    }
    let degs: Vec<i64> = v.global_degrees().iter().map(|d| -d).collect();
    let names = (0..degs.len()).map(|i| format!("v{i}")).collect();
    let dt = v.total_d().transpose();
    let dgen = dt.sparse_columns();
    Ok(FreeGca { degs, names, dgen })
}

/// Characteristic polynomial (coefficients, constant term first, monic) by
/// the Faddeev-LeVerrier recursion.
pub fn char_poly(m: &RatMatrix) -> Vec<Q> {
    let n = m.rows();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut mk = RatMatrix::zero(n, n);
    for k in 1..=n {
        let prev = coeffs[n - k + 1].clone();
        mk = m.mul(&mk).unwrap().add(&RatMatrix::identity(n).scale(&prev)).unwrap();
        let amk = m.mul(&mk).unwrap();
        let tr: Q = (0..n).map(|i| amk.get(i, i)).fold(Q::zero(), |a, b| a + b);
        coeffs[n - k] = -tr / q(k as i64);
    }
    coeffs
}

fn poly_eval(p: &[Q], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn divisors(n: &num_bigint::BigInt) -> Option<Vec<num_bigint::BigInt>> {
    use num_bigint::BigInt;
    use num_traits::Signed;
    let n = n.abs();
    if n.is_zero() {
        return Some(vec![]);
    }
    if n > BigInt::from(1_000_000_000_000i64) {
        return None;
    }
    let v: i64 = n.to_string().parse().ok()?;
    let mut out = Vec::new();
    let mut d = 1i64;
    while d * d <= v {
        if v % d == 0 {
            out.push(BigInt::from(d));
            if d * d != v {
                out.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// All rational roots of a polynomial (constant term first). None if the
/// search space is too large.
pub fn rational_roots(p: &[Q]) -> Option<Vec<Q>> {
    use num_integer::Integer;
    let mut p: Vec<Q> = p.to_vec();
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    let mut roots = Vec::new();
    if p.len() <= 1 {
        return Some(roots);
    }
    if p[0].is_zero() {
        roots.push(Q::zero());
        while p[0].is_zero() {
            p.remove(0);
        }
    }
    if p.len() <= 1 {
        return Some(roots);
    }
    let l = p.iter().fold(num_bigint::BigInt::one(), |a, c| a.lcm(c.denom()));
    let ints: Vec<num_bigint::BigInt> = p.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
    let a0 = divisors(&ints[0])?;
    let an = divisors(ints.last().unwrap())?;
    let mut cands: Vec<Q> = Vec::new();
    for a in &a0 {
        for b in &an {
            for s in [1, -1] {
                let c = Q::new(a * s, b.clone());
                if !cands.contains(&c) {
                    cands.push(c);
                }
            }
        }
    }
    cands.sort();
    for c in cands {
        if poly_eval(&p, &c).is_zero() {
            roots.push(c);
        }
    }
    roots.sort();
    Some(roots)
}

/// Joint eigenvalues of commuting matrices over the rationals. Errors when an
/// eigenvalue is not rational.
pub fn joint_eigenvalues(ms: &[RatMatrix]) -> Result<Vec<Vec<Q>>> {
    if ms.is_empty() {
        return Ok(vec![vec![]]);
    }
    let n = ms[0].rows();
    if n == 0 {
        return Ok(vec![]);
    }
    let mut per: Vec<Vec<Q>> = Vec::new();
    for m in ms {
        let cp = char_poly(m);
        let roots = rational_roots(&cp).ok_or_else(|| Error::Unsupported("eigenvalue search too large".into()))?;
        // every root must be rational: multiplicities must add up to n
        let mut count = 0;
        for r in &roots {
            let shifted = m.sub(&RatMatrix::identity(n).scale(r)).unwrap();
            let mut p = shifted.clone();
            for _ in 1..n {
                p = p.mul(&shifted).unwrap();
            }
            count += n - p.rank();
        }
        if count != n {
            return Err(Error::Unsupported("multiplication operator has irrational eigenvalues".into()));
        }
        per.push(roots);
    }
    let mut tuples: Vec<Vec<Q>> = vec![vec![]];
    for roots in &per {
        let mut next = Vec::new();
        for t in &tuples {
            for r in roots {
                let mut x = t.clone();
                x.push(r.clone());
                next.push(x);
            }
        }
        tuples = next;
    }
    let mut out = Vec::new();
    for t in tuples {
        let mut stacked = RatMatrix::zero(0, n);
        for (m, r) in ms.iter().zip(&t) {
            stacked = stacked.vstack(&m.sub(&RatMatrix::identity(n).scale(r)).unwrap()).unwrap();
        }
        if stacked.rank() < n {
            out.push(t);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::disk;

    #[test]
    fn disk0_stage_dims() {
        let g = dual_generators(&disk(0).unwrap()).unwrap();
        for m in 1..=6u32 {
            let s = local_stage(&g, m).unwrap();
            assert_eq!(s.algebra.dim(), 2 * m as usize - 1, "order {m}");
        }
    }

    #[test]
    fn roots() {
        // (x-1)(x+2)x = x^3 + x^2 - 2x
        let p = vec![q(0), q(-2), q(1), q(1)];
        assert_eq!(rational_roots(&p).unwrap(), vec![q(-2), q(0), q(1)]);
        let m = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(char_poly(&m), vec![q(1), q(-2), q(1)]);
        let rot = RatMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert!(joint_eigenvalues(&[rot]).is_err());
    }
}
