//! Cocommutative dg coalgebras, finite stages of cofree coalgebras and
//! coextension of chain maps.

use crate::algebra::{dual_generators, joint_eigenvalues, local_stage, FiniteAlgebra, FreeGca, StageAlgebra};
use crate::chain::{
    homology, induced_on_homology, koszul, tensor, ChainComplex, ChainMap, Homology,
};
use crate::error::{usage, Error, Result};
use crate::exactlin::{kernel_sparse, q, svec_axpy, svec_get, RatMatrix, SVec, Solver, Q};
use crate::label::Label;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Terms of a coproduct: (left global index, right global index, coefficient).
pub type Terms = Vec<(usize, usize, Q)>;

/// A finite-dimensional coalgebra; indices are global indices of the
/// underlying complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalgebra {
    pub complex: ChainComplex,
    pub delta: Vec<Terms>,
    pub counit: SVec,
}

fn add_term(map: &mut BTreeMap<Vec<usize>, Q>, k: Vec<usize>, v: Q) {
    let e = map.entry(k).or_insert_with(Q::zero);
    *e += v;
}

fn clean(mut map: BTreeMap<Vec<usize>, Q>) -> BTreeMap<Vec<usize>, Q> {
    map.retain(|_, v| !v.is_zero());
    map
}

impl Coalgebra {
    pub fn new(complex: ChainComplex, delta: Vec<Terms>, counit: SVec) -> Result<Self> {
        let c = Self::new_unchecked(complex, delta, counit);
        c.check_axioms()?;
        Ok(c)
    }

    pub fn new_unchecked(complex: ChainComplex, delta: Vec<Terms>, counit: SVec) -> Self {
        let delta = delta.into_iter().map(normalize_terms).collect();
        Coalgebra { complex, delta, counit }
    }

    pub fn dim(&self) -> usize {
        self.complex.total_dim()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.complex.global_degrees()
    }

    /// The ground field with its grouplike 1.
    pub fn ground() -> Self {
        Coalgebra {
            complex: ChainComplex::ground(),
            delta: vec![vec![(0, 0, Q::one())]],
            counit: vec![(0, Q::one())],
        }
    }

    pub fn coproduct_of(&self, v: &SVec) -> BTreeMap<Vec<usize>, Q> {
        let mut out = BTreeMap::new();
        for (i, c) in v {
            for (a, b, x) in &self.delta[*i] {
                add_term(&mut out, vec![*a, *b], c * x);
            }
        }
        clean(out)
    }

    pub fn counit_of(&self, v: &SVec) -> Q {
        let mut acc = Q::zero();
        for (i, c) in v {
            acc += c * svec_get(&self.counit, *i);
        }
        acc
    }

    /// Checks coassociativity, cocommutativity, counit laws, that d is a
    /// coderivation and that the counit is a chain map.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.dim();
        if self.complex.degrees().any(|k| k < 0 && self.complex.dim(k) > 0) {
            return usage("coalgebra must be non-negatively graded");
        }
        if self.delta.len() != n {
            return usage("coproduct table has the wrong size");
        }
        let deg = self.degrees();
        let dt = self.complex.total_d();
        let dcols = dt.sparse_columns();
        for (i, _) in &self.counit {
            if deg[*i] != 0 {
                return usage("counit is nonzero outside degree 0");
            }
        }
        for e in 0..n {
            for (a, b, _) in &self.delta[e] {
                if deg[*a] + deg[*b] != deg[e] {
                    return usage("coproduct does not preserve degree");
                }
            }
            // coassociativity
            let mut l = BTreeMap::new();
            let mut r = BTreeMap::new();
            for (a, b, c) in &self.delta[e] {
                for (a1, a2, x) in &self.delta[*a] {
                    add_term(&mut l, vec![*a1, *a2, *b], c * x);
                }
                for (b1, b2, x) in &self.delta[*b] {
                    add_term(&mut r, vec![*a, *b1, *b2], c * x);
                }
            }
            if clean(l) != clean(r) {
                return Err(Error::Precondition(format!("not coassociative on basis vector {e}")));
            }
            // cocommutativity
            let mut s = BTreeMap::new();
            let mut t = BTreeMap::new();
            for (a, b, c) in &self.delta[e] {
                add_term(&mut s, vec![*a, *b], c.clone());
                add_term(&mut t, vec![*b, *a], c * koszul(deg[*a] * deg[*b]));
            }
            if clean(s) != clean(t) {
                return Err(Error::Precondition(format!("not cocommutative on basis vector {e}")));
            }
            // counit laws
            let mut l: SVec = Vec::new();
            let mut r: SVec = Vec::new();
            for (a, b, c) in &self.delta[e] {
                let ea = svec_get(&self.counit, *a);
                if !ea.is_zero() {
                    l = svec_axpy(&l, &(c * ea), &vec![(*b, Q::one())]);
                }
                let eb = svec_get(&self.counit, *b);
                if !eb.is_zero() {
                    r = svec_axpy(&r, &(c * eb), &vec![(*a, Q::one())]);
                }
            }
            let id = vec![(e, Q::one())];
            if l != id || r != id {
                return Err(Error::Precondition(format!("counit law fails on basis vector {e}")));
            }
            // coderivation: Δ d = (d⊗1 + 1⊗d) Δ
            let lhs = self.coproduct_of(&dcols[e]);
            let mut rhs = BTreeMap::new();
            for (a, b, c) in &self.delta[e] {
                for (da, x) in &dcols[*a] {
                    add_term(&mut rhs, vec![*da, *b], c * x);
                }
                let s = koszul(deg[*a]);
                for (db, x) in &dcols[*b] {
                    add_term(&mut rhs, vec![*a, *db], c * x * &s);
                }
            }
            if lhs != clean(rhs) {
                return Err(Error::Precondition(format!("d is not a coderivation on basis vector {e}")));
            }
        }
        // ε d = 0
        for col in &dcols {
            if !self.counit_of(col).is_zero() {
                return Err(Error::Precondition("counit is not a chain map".into()));
            }
        }
        Ok(())
    }

    /// Coproduct as a chain map into the tensor square.
    pub fn delta_map(&self) -> Result<ChainMap> {
        let c = &self.complex;
        let sq = tensor(c, c)?;
        let idx = tensor_global_index(c, c, &sq);
        let mut t = Vec::new();
        for (e, terms) in self.delta.iter().enumerate() {
            for (a, b, x) in terms {
                t.push((idx[*a][*b], e, x.clone()));
            }
        }
        let m = RatMatrix::new(sq.total_dim(), c.total_dim(), t)?;
        ChainMap::from_total(c, &sq, 0, &m)
    }

    pub fn counit_map(&self) -> Result<ChainMap> {
        let k = ChainComplex::ground();
        let t = self.counit.iter().map(|(i, x)| (0, *i, x.clone())).collect();
        let m = RatMatrix::new(1, self.dim(), t)?;
        ChainMap::from_total(&self.complex, &k, 0, &m)
    }

    /// Grouplike elements among basis vectors.
    pub fn basis_grouplikes(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|e| self.delta[*e] == vec![(*e, *e, Q::one())] && svec_get(&self.counit, *e) == Q::one())
            .collect()
    }

    /// Dual algebra: degree -n part dual to degree n; multiplication is the
    /// transpose of the coproduct and d is the transpose of d.
    pub fn dual_algebra(&self) -> Result<FiniteAlgebra> {
        let c = &self.complex;
        let hi = c.hi().max(0);
        let basis: Vec<Vec<Label>> =
            (-hi..=0).map(|n| c.basis(-n).iter().map(|l| Label::tag("dual", l.clone())).collect()).collect();
        let dual = ChainComplex::new_unchecked(-hi, -hi, basis, vec![RatMatrix::zero(0, 0); (hi + 1) as usize]);
        let map = dual_index_map(c, &dual);
        let n = self.dim();
        let mut dt = Vec::new();
        for (r, cc, v) in c.total_d().entries() {
            // d_C: e_cc -> e_r ; dual: e_r^* -> e_cc^*
            dt.push((map[*cc], map[*r], v.clone()));
        }
        let tm = RatMatrix::from_triplets_unchecked(n, n, dt);
        let basis2: Vec<Vec<Label>> = (-hi..=0).map(|k| dual.basis(k).to_vec()).collect();
        let complex = ChainComplex::from_total(-hi, -hi, basis2, &tm)?;
        let mut mult = vec![vec![Vec::new(); n]; n];
        for (e, terms) in self.delta.iter().enumerate() {
            for (a, b, x) in terms {
                let entry: &mut SVec = &mut mult[map[*a]][map[*b]];
                *entry = svec_axpy(entry, x, &vec![(map[e], Q::one())]);
            }
        }
        let unit = {
            let mut u: SVec = self.counit.iter().map(|(i, x)| (map[*i], x.clone())).collect();
            u.sort_by_key(|e| e.0);
            u
        };
        FiniteAlgebra::new(complex, mult, unit)
    }

    /// Coalgebra dual to a finite algebra.
    pub fn from_algebra(a: &FiniteAlgebra) -> Result<Coalgebra> {
        let ac = &a.complex;
        let lo = ac.lo().min(0);
        let hi = -lo;
        let basis: Vec<Vec<Label>> =
            (0..=hi).map(|n| ac.basis(-n).iter().map(|l| Label::tag("dual", l.clone())).collect()).collect();
        let shell = ChainComplex::new_unchecked(0, 0, basis.clone(), vec![RatMatrix::zero(0, 0); (hi + 1) as usize]);
        // map: algebra global index -> coalgebra global index
        let map = dual_index_map(ac, &shell);
        let n = a.dim();
        let mut dt = Vec::new();
        for (r, c, v) in ac.total_d().entries() {
            dt.push((map[*c], map[*r], v.clone()));
        }
        let tm = RatMatrix::from_triplets_unchecked(n, n, dt);
        let complex = ChainComplex::from_total(0, 0, basis, &tm)?;
        let mut delta = vec![Vec::new(); n];
        for x in 0..n {
            for y in 0..n {
                for (k, v) in &a.mult[x][y] {
                    delta[map[*k]].push((map[x], map[y], v.clone()));
                }
            }
        }
        let mut counit: SVec = a.unit.iter().map(|(i, x)| (map[*i], x.clone())).collect();
        counit.sort_by_key(|e| e.0);
        Coalgebra::new(complex, delta, counit)
    }

    /// Checks that a matrix on total spaces is a morphism of dg coalgebras.
    pub fn check_morphism(&self, target: &Coalgebra, f: &RatMatrix) -> Result<()> {
        if f.cols() != self.dim() || f.rows() != target.dim() {
            return usage("coalgebra map has the wrong shape");
        }
        let (sd, td) = (self.degrees(), target.degrees());
        for (r, c, _) in f.entries() {
            if sd[*c] != td[*r] {
                return Err(Error::Precondition("map does not preserve degree".into()));
            }
        }
        if target.complex.total_d().mul(f)? != f.mul(&self.complex.total_d())? {
            return Err(Error::Precondition("map does not commute with d".into()));
        }
        let fc = f.sparse_columns();
        for e in 0..self.dim() {
            if target.counit_of(&fc[e]) != svec_get(&self.counit, e) {
                return Err(Error::Precondition("map does not preserve the counit".into()));
            }
            let lhs = target.coproduct_of(&fc[e]);
            let mut rhs = BTreeMap::new();
            for (a, b, c) in &self.delta[e] {
                for (x, u) in &fc[*a] {
                    for (y, v) in &fc[*b] {
                        add_term(&mut rhs, vec![*x, *y], c * u * v);
                    }
                }
            }
            if lhs != clean(rhs) {
                return Err(Error::Precondition(format!("map is not comultiplicative on basis vector {e}")));
            }
        }
        Ok(())
    }

    /// Tensor product coalgebra: Δ(c⊗d) = Σ ± (c1⊗d1)⊗(c2⊗d2), sign (-1)^{|c2||d1|}.
    pub fn tensor(&self, other: &Coalgebra) -> Result<Coalgebra> {
        let t = tensor(&self.complex, &other.complex)?;
        let idx = tensor_global_index(&self.complex, &other.complex, &t);
        let (da, db) = (self.degrees(), other.degrees());
        let mut delta = vec![Vec::new(); t.total_dim()];
        let mut counit = Vec::new();
        for a in 0..self.dim() {
            for b in 0..other.dim() {
                let e = idx[a][b];
                let mut terms = Vec::new();
                for (a1, a2, x) in &self.delta[a] {
                    for (b1, b2, y) in &other.delta[b] {
                        let s = koszul(da[*a2] * db[*b1]);
                        terms.push((idx[*a1][*b1], idx[*a2][*b2], x * y * s));
                    }
                }
                delta[e] = terms;
                let c = svec_get(&self.counit, a) * svec_get(&other.counit, b);
                if !c.is_zero() {
                    counit.push((e, c));
                }
            }
        }
        counit.sort_by_key(|e| e.0);
        Ok(Coalgebra::new_unchecked(t, delta, counit))
    }

    /// Direct sum of coalgebras (not counital-compatible with the ground
    /// field; each summand keeps its own counit).
    pub fn direct_sum(parts: &[Coalgebra]) -> Result<Coalgebra> {
        let cs: Vec<ChainComplex> = parts.iter().map(|p| p.complex.clone()).collect();
        let s = crate::chain::direct_sum(&cs)?;
        let maps = sum_index_maps(&cs, &s);
        let mut delta = vec![Vec::new(); s.total_dim()];
        let mut counit = Vec::new();
        for (p, c) in parts.iter().enumerate() {
            for e in 0..c.dim() {
                delta[maps[p][e]] = c.delta[e].iter().map(|(a, b, x)| (maps[p][*a], maps[p][*b], x.clone())).collect();
            }
            counit.extend(c.counit.iter().map(|(i, x)| (maps[p][*i], x.clone())));
        }
        counit.sort_by_key(|e| e.0);
        Ok(Coalgebra::new_unchecked(s, delta, counit))
    }

    /// Image of a sub-coalgebra: restrict to a subcomplex spanned by basis
    /// vectors `keep` (must be closed under Δ and d).
    pub fn identity_matrix(&self) -> RatMatrix {
        RatMatrix::identity(self.dim())
    }
}

fn normalize_terms(t: Terms) -> Terms {
    let mut m: BTreeMap<(usize, usize), Q> = BTreeMap::new();
    for (a, b, x) in t {
        *m.entry((a, b)).or_insert_with(Q::zero) += x;
    }
    m.into_iter().filter(|(_, v)| !v.is_zero()).map(|((a, b), v)| (a, b, v)).collect()
}

/// For each global index of `from` (degree n), the global index in `to` of
/// the basis vector at the same position in degree -n.
fn dual_index_map(from: &ChainComplex, to: &ChainComplex) -> Vec<usize> {
    let mut out = vec![0; from.total_dim()];
    for n in from.degrees() {
        for i in 0..from.dim(n) {
            out[from.offset(n) + i] = to.offset(-n) + i;
        }
    }
    out
}

/// idx[a][b] = global index of e_a ⊗ e_b in the tensor complex t.
pub fn tensor_global_index(a: &ChainComplex, b: &ChainComplex, t: &ChainComplex) -> Vec<Vec<usize>> {
    let (a, b) = (a.trimmed(), b.trimmed());
    let mut out = vec![vec![0; b.total_dim()]; a.total_dim()];
    for n in t.degrees() {
        for (p, off) in crate::chain::tensor_offsets(&a, &b, n) {
            let qd = n - p;
            for i in 0..a.dim(p) {
                for j in 0..b.dim(qd) {
                    out[a.offset(p) + i][b.offset(qd) + j] = t.offset(n) + off + i * b.dim(qd) + j;
                }
            }
        }
    }
    out
}

/// maps[p][g] = global index in the direct sum of global index g of part p.
pub fn sum_index_maps(parts: &[ChainComplex], s: &ChainComplex) -> Vec<Vec<usize>> {
    let mut maps: Vec<Vec<usize>> = parts.iter().map(|c| vec![0; c.total_dim()]).collect();
    for n in s.degrees() {
        let mut off = s.offset(n);
        for (p, c) in parts.iter().enumerate() {
            for i in 0..c.dim(n) {
                maps[p][c.offset(n) + i] = off + i;
            }
            off += c.dim(n);
        }
    }
    maps
}

/// n+1 grouplikes g_0..g_n in degree 0.
pub fn sk0_coalgebra(n: usize) -> Coalgebra {
    let basis = vec![(0..=n).map(|i| Label::atom(format!("g{i}"))).collect()];
    let complex = ChainComplex::new_unchecked(0, 0, basis, vec![RatMatrix::zero(0, n + 1)]);
    let delta = (0..=n).map(|i| vec![(i, i, Q::one())]).collect();
    let counit = (0..=n).map(|i| (i, Q::one())).collect();
    Coalgebra { complex, delta, counit }
}

/// A finite stage of the cofree coalgebra on v: the dual of
/// ΛV^∨ / J where J is the product over the points p of
/// (m_p^k + d(m_p^k)) plus the degree truncation (< -k).
#[derive(Clone, Debug)]
pub struct CofreeStage {
    pub v: ChainComplex,
    pub order: u32,
    /// Points in the coordinates of the degree-0 basis of v.
    pub points: Vec<Vec<Q>>,
    pub algebra: FiniteAlgebra,
    /// Image of each dual generator v_i^* in the algebra.
    pub gens: Vec<SVec>,
    pub coalgebra: Coalgebra,
    /// π: stage -> v on total spaces.
    pub pi: RatMatrix,
    /// local algebra pieces, one per point, and their offsets
    local: StageAlgebra,
}

impl CofreeStage {
    pub fn pi_map(&self) -> Result<ChainMap> {
        ChainMap::from_total(&self.coalgebra.complex, &self.v, 0, &self.pi)
    }

    pub fn local_dim(&self) -> usize {
        self.local.algebra.dim()
    }
}

fn zero_degree_positions(v: &ChainComplex) -> Vec<usize> {
    let off = v.offset(0);
    (off..off + v.dim(0)).collect()
}

/// Stage `order` of the cofree coalgebra on v, localized at the origin.
pub fn cofree_stage(v: &ChainComplex, order: u32) -> Result<CofreeStage> {
    let z = v.dim(0);
    cofree_stage_at(v, order, &[vec![Q::zero(); z]])
}

/// Stage `order` of the cofree coalgebra on v supported at the given points
/// of v_0 (coordinates in the degree-0 basis of v).
pub fn cofree_stage_at(v: &ChainComplex, order: u32, points: &[Vec<Q>]) -> Result<CofreeStage> {
    if v.degrees().any(|n| n < 0 && v.dim(n) > 0) {
        return usage("cofree stage needs a non-negatively graded complex");
    }
    if points.is_empty() {
        return usage("at least one point is required");
    }
    let v = v.trimmed().with_t(0)?;
    let gca: FreeGca = dual_generators(&v)?;
    let local = local_stage(&gca, order)?;
    let zpos = zero_degree_positions(&v);
    for p in points {
        if p.len() != zpos.len() {
            return usage("point has the wrong number of coordinates");
        }
    }
    let pieces = vec![local.algebra.clone(); points.len()];
    let algebra = if points.len() == 1 { local.algebra.clone() } else { FiniteAlgebra::product(&pieces)? };
    // embedding of each local piece into the product
    let ln = local.algebra.dim();
    let piece_map: Vec<Vec<usize>> = if points.len() == 1 {
        vec![(0..ln).collect()]
    } else {
        let mut maps = vec![vec![0; ln]; points.len()];
        let lc = &local.algebra.complex;
        let pc = &algebra.complex;
        for n in lc.degrees() {
            for (p, m) in maps.iter_mut().enumerate() {
                for i in 0..lc.dim(n) {
                    m[lc.offset(n) + i] = pc.offset(n) + p * lc.dim(n) + i;
                }
            }
        }
        maps
    };
    let mut gens = Vec::new();
    for g in 0..gca.ngens() {
        let mut acc: SVec = Vec::new();
        for (p, pt) in points.iter().enumerate() {
            let local_img: SVec = local.gens[g].iter().map(|(i, x)| (piece_map[p][*i], x.clone())).collect();
            let mut local_img = local_img;
            local_img.sort_by_key(|e| e.0);
            acc = svec_axpy(&acc, &Q::one(), &local_img);
            if let Some(k) = zpos.iter().position(|z| *z == g) {
                let unit: SVec = {
                    let mut u: SVec = local.algebra.unit.iter().map(|(i, x)| (piece_map[p][*i], x.clone())).collect();
                    u.sort_by_key(|e| e.0);
                    u
                };
                acc = svec_axpy(&acc, &pt[k], &unit);
            }
        }
        gens.push(acc);
    }
    let coalgebra = Coalgebra::from_algebra(&algebra)?;
    // π(φ) = Σ_i φ(v_i^*) v_i ; algebra index a -> coalgebra index via duality
    let shell = &coalgebra.complex;
    let amap = dual_index_map(&algebra.complex, shell);
    let mut t = Vec::new();
    for (g, img) in gens.iter().enumerate() {
        for (a, x) in img {
            t.push((g, amap[*a], x.clone()));
        }
    }
    let pi = RatMatrix::new(v.total_dim(), coalgebra.dim(), t)?;
    Ok(CofreeStage { v, order, points: points.to_vec(), algebra, gens, coalgebra, pi, local })
}

/// Inclusion stage(order) -> stage(order2) for order <= order2 with equal points.
pub fn stage_inclusion(small: &CofreeStage, big: &CofreeStage) -> Result<RatMatrix> {
    if small.points != big.points || small.order > big.order || small.v != big.v {
        return usage("stages are not comparable");
    }
    // algebra quotient big -> small, determined by generators: solve for the
    // unique algebra map sending generators to generators.
    let psi = solve_algebra_map(&big.algebra, &big.gens, &small.algebra, &small.gens)?
        .ok_or_else(|| Error::Internal("stage quotient map does not exist".into()))?;
    let f = dualize_algebra_map(&big.algebra, &small.algebra, &psi, &small.coalgebra, &big.coalgebra);
    small.coalgebra.check_morphism(&big.coalgebra, &f)?;
    Ok(f)
}

/// Transposes an algebra map A -> B into the coalgebra map B^∨ -> A^∨.
fn dualize_algebra_map(a: &FiniteAlgebra, b: &FiniteAlgebra, psi: &RatMatrix, bc: &Coalgebra, ac: &Coalgebra) -> RatMatrix {
    let amap = dual_index_map(&a.complex, &ac.complex);
    let bmap = dual_index_map(&b.complex, &bc.complex);
    let t = psi.entries().iter().map(|(r, c, v)| (amap[*c], bmap[*r], v.clone())).collect();
    RatMatrix::from_triplets_unchecked(ac.dim(), bc.dim(), t)
}

/// Solves for an algebra map Ψ: A -> B with Ψ(gen_i) = target_i, where A is
/// generated by the gens. Returns None if none exists; errors if the
/// solution is not unique.
pub fn solve_algebra_map(a: &FiniteAlgebra, a_gens: &[SVec], b: &FiniteAlgebra, targets: &[SVec]) -> Result<Option<RatMatrix>> {
    match solve_algebra_map_count(a, a_gens, b, targets)? {
        (None, _) => Ok(None),
        (Some(m), 0) => Ok(Some(m)),
        (Some(_), k) => Err(Error::Internal(format!("algebra map not unique ({k}-dimensional family)"))),
    }
}

/// Same as `solve_algebra_map`, returning also the dimension of the solution
/// space of the homogeneous system.
pub fn solve_algebra_map_count(
    a: &FiniteAlgebra,
    a_gens: &[SVec],
    b: &FiniteAlgebra,
    targets: &[SVec],
) -> Result<(Option<RatMatrix>, usize)> {
    let (na, nb) = (a.dim(), b.dim());
    let (ad, bd) = (a.degrees(), b.degrees());
    // unknowns: Ψ[r][c] for deg(r) == deg(c)
    let mut var: HashMap<(usize, usize), usize> = HashMap::new();
    let mut vars = Vec::new();
    for c in 0..na {
        for r in 0..nb {
            if ad[c] == bd[r] {
                var.insert((r, c), vars.len());
                vars.push((r, c));
            }
        }
    }
    let nv = vars.len();
    let mut rows: Vec<(SVec, Q)> = Vec::new();
    // Ψ applied to vector x, as coefficient rows per output coordinate r
    let apply = |x: &SVec| -> BTreeMap<usize, SVec> {
        let mut out: BTreeMap<usize, SVec> = BTreeMap::new();
        for (c, coef) in x {
            for r in 0..nb {
                if let Some(k) = var.get(&(r, *c)) {
                    let e = out.entry(r).or_default();
                    *e = svec_axpy(e, coef, &vec![(*k, Q::one())]);
                }
            }
        }
        out
    };
    let eq_vec = |lhs: BTreeMap<usize, SVec>, rhs: &SVec, rows: &mut Vec<(SVec, Q)>| {
        let mut keys: Vec<usize> = lhs.keys().copied().collect();
        keys.extend(rhs.iter().map(|e| e.0));
        keys.sort();
        keys.dedup();
        for r in keys {
            let l = lhs.get(&r).cloned().unwrap_or_default();
            rows.push((l, svec_get(rhs, r)));
        }
    };
    // Ψ(1) = 1
    eq_vec(apply(&a.unit), &b.unit, &mut rows);
    // Ψ(gen) = target
    for (g, t) in a_gens.iter().zip(targets) {
        eq_vec(apply(g), t, &mut rows);
    }
    // Ψ(g w) = t_g Ψ(w)
    for (g, t) in a_gens.iter().zip(targets) {
        let lt = b.left_mul(t);
        for w in 0..na {
            let gw = a.mul(g, &vec![(w, Q::one())]);
            let lhs = apply(&gw);
            // rhs = L_t Ψ(e_w): coefficient rows
            let pw = apply(&vec![(w, Q::one())]);
            let mut rhs_rows: BTreeMap<usize, SVec> = BTreeMap::new();
            for (r2, row) in &pw {
                for (r, _, x) in lt.entries().iter().filter(|e| e.1 == *r2) {
                    let e = rhs_rows.entry(*r).or_default();
                    *e = svec_axpy(e, x, row);
                }
            }
            let mut keys: Vec<usize> = lhs.keys().chain(rhs_rows.keys()).copied().collect();
            keys.sort();
            keys.dedup();
            for r in keys {
                let l = lhs.get(&r).cloned().unwrap_or_default();
                let rr = rhs_rows.get(&r).cloned().unwrap_or_default();
                rows.push((svec_axpy(&l, &q(-1), &rr), Q::zero()));
            }
        }
    }
    // Ψ d = d Ψ
    let da = a.complex.total_d();
    let db = b.complex.total_d();
    for w in 0..na {
        let lhs = apply(&da.mul_svec(&vec![(w, Q::one())]));
        let pw = apply(&vec![(w, Q::one())]);
        let mut rhs_rows: BTreeMap<usize, SVec> = BTreeMap::new();
        for (r2, row) in &pw {
            for (r, _, x) in db.entries().iter().filter(|e| e.1 == *r2) {
                let e = rhs_rows.entry(*r).or_default();
                *e = svec_axpy(e, x, row);
            }
        }
        let mut keys: Vec<usize> = lhs.keys().chain(rhs_rows.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        for r in keys {
            let l = lhs.get(&r).cloned().unwrap_or_default();
            let rr = rhs_rows.get(&r).cloned().unwrap_or_default();
            rows.push((svec_axpy(&l, &q(-1), &rr), Q::zero()));
        }
    }
    let rows: Vec<(SVec, Q)> = rows.into_iter().filter(|(l, r)| !(l.is_empty() && r.is_zero())).collect();
    if rows.iter().any(|(l, r)| l.is_empty() && !r.is_zero()) {
        return Ok((None, 0));
    }
    let mut trip = Vec::new();
    for (i, (l, _)) in rows.iter().enumerate() {
        for (k, x) in l {
            trip.push((i, *k, x.clone()));
        }
    }
    let m = RatMatrix::new(rows.len(), nv, trip)?;
    let rhs: SVec = rows.iter().enumerate().filter(|(_, (_, r))| !r.is_zero()).map(|(i, (_, r))| (i, r.clone())).collect();
    let solver = Solver::new(&m);
    let kdim = nv - solver.rank();
    match solver.solve(&rhs) {
        None => Ok((None, kdim)),
        Some(x) => {
            let t = x.iter().map(|(k, v)| (vars[*k].0, vars[*k].1, v.clone())).collect();
            Ok((Some(RatMatrix::new(nb, na, t)?), kdim))
        }
    }
}

/// Result of a coextension.
#[derive(Clone, Debug)]
pub struct Coextension {
    pub stage: CofreeStage,
    /// coalgebra map c -> stage on total spaces
    pub map: RatMatrix,
    /// dimension of the space of homogeneous solutions (0 = unique)
    pub solution_kernel: usize,
    /// stages tried before success
    pub tried: Vec<u32>,
}

/// Points of v_0 hit by the grouplike-like spectrum of c under f: joint
/// eigenvalues of multiplication by f^∨(x_i^*) on the degree-0 part of c^∨.
pub fn coextension_points(c: &Coalgebra, f: &ChainMap, cdual: &FiniteAlgebra) -> Result<Vec<Vec<Q>>> {
    let v = f.target().trimmed();
    let zpos = zero_degree_positions(&v);
    if zpos.is_empty() {
        return Ok(vec![vec![]]);
    }
    let targets = dual_map_targets(c, f, cdual)?;
    let zero_idx = cdual.degree_zero_indices();
    let mut ops = Vec::new();
    for g in &zpos {
        let full = cdual.left_mul(&targets[*g]);
        let sub = full.select_rows(&zero_idx).select_cols(&zero_idx);
        ops.push(sub);
    }
    joint_eigenvalues(&ops)
}

/// f^∨(v_i^*) ∈ c^∨ for each global basis vector v_i of the target.
fn dual_map_targets(c: &Coalgebra, f: &ChainMap, cdual: &FiniteAlgebra) -> Result<Vec<SVec>> {
    let v = f.target();
    let fm = f.total();
    let cmap = dual_index_map(&c.complex, &cdual.complex);
    let rows = fm.sparse_rows();
    let mut out = Vec::new();
    for g in 0..v.total_dim() {
        let mut s: SVec = rows[g].iter().map(|(k, x)| (cmap[*k], x.clone())).collect();
        s.sort_by_key(|e| e.0);
        out.push(s);
    }
    Ok(out)
}

/// Coextends f: U(c) -> v to a coalgebra map c -> stage of the cofree
/// coalgebra on v, trying orders 1..=max_order.
pub fn coextend(f: &ChainMap, c: &Coalgebra, max_order: u32) -> Result<Coextension> {
    if f.shift() != 0 {
        return usage("coextension needs a degree-0 map");
    }
    if f.source().trimmed().dims() != c.complex.trimmed().dims() {
        return usage("map source is not the underlying complex of the coalgebra");
    }
    let v = f.target().trimmed().with_t(0)?;
    let f = ChainMap::from_total(&c.complex, &v, 0, &f.total())?;
    let cdual = c.dual_algebra()?;
    let points = coextension_points(c, &f, &cdual)?;
    if points.is_empty() {
        return Err(Error::Exhausted("coalgebra has no points".into()));
    }
    let targets = dual_map_targets(c, &f, &cdual)?;
    let mut tried = Vec::new();
    for order in 1..=max_order {
        tried.push(order);
        let stage = cofree_stage_at(&v, order, &points)?;
        let (sol, kdim) = solve_algebra_map_count(&stage.algebra, &stage.gens, &cdual, &targets)?;
        if let Some(psi) = sol {
            let map = dualize_algebra_map(&stage.algebra, &cdual, &psi, c, &stage.coalgebra);
            c.check_morphism(&stage.coalgebra, &map)?;
            if stage.pi.mul(&map)? != f.total() {
                return Err(Error::Internal("coextension does not project to f".into()));
            }
            return Ok(Coextension { stage, map, solution_kernel: kdim, tried });
        }
    }
    Err(Error::Exhausted(format!("no stage up to order {max_order} admits the coextension")))
}

/// Eventual-image report for a directed system of stages.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ContractibilityReport {
    pub orders: Vec<u32>,
    /// homology dims per stage: (degree, dim) nonzero entries
    pub stage_homology: Vec<Vec<(i64, usize)>>,
    /// rank of H(stage_i) -> H(stage_{i+1}) per degree, nonzero entries
    pub pair_ranks: Vec<Vec<(i64, usize)>>,
    /// rank of H(stage_i) -> H(last stage)
    pub eventual_ranks: Vec<Vec<(i64, usize)>>,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

fn ranks_between(f: &ChainMap, hs: &Homology, ht: &Homology) -> Result<Vec<(i64, usize)>> {
    let mut out = Vec::new();
    for h in &hs.degrees {
        let m = induced_on_homology(f, hs, ht, h.degree)?;
        let r = m.rank();
        if r > 0 {
            out.push((h.degree, r));
        }
    }
    Ok(out)
}

/// Homology of the stages of a directed system and the eventual images.
/// PASS when the last two consecutive pairs both have image exactly the
/// ground field in degree 0.
pub fn directed_system_report(orders: &[u32], stages: &[Coalgebra], incl: &[RatMatrix]) -> Result<ContractibilityReport> {
    let hs: Vec<Homology> = stages.iter().map(|s| homology(&s.complex)).collect();
    let mut pair_ranks = Vec::new();
    let mut eventual_ranks = Vec::new();
    let n = stages.len();
    let mut to_last: Vec<RatMatrix> = vec![RatMatrix::identity(stages[n - 1].dim())];
    for i in (0..n - 1).rev() {
        let m = to_last[0].mul(&incl[i])?;
        to_last.insert(0, m);
    }
    for i in 0..n {
        if i + 1 < n {
            let f = ChainMap::from_total(&stages[i].complex, &stages[i + 1].complex, 0, &incl[i])?;
            pair_ranks.push(ranks_between(&f, &hs[i], &hs[i + 1])?);
        }
        let f = ChainMap::from_total(&stages[i].complex, &stages[n - 1].complex, 0, &to_last[i])?;
        eventual_ranks.push(ranks_between(&f, &hs[i], &hs[n - 1])?);
    }
    let target = vec![(0i64, 1usize)];
    let verdict = if pair_ranks.len() < 2 {
        Verdict::Inconclusive
    } else {
        let k = pair_ranks.len();
        if pair_ranks[k - 1] == target && pair_ranks[k - 2] == target {
            Verdict::Pass
        } else if pair_ranks[k - 1] == pair_ranks[k - 2] {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    };
    Ok(ContractibilityReport {
        orders: orders.to_vec(),
        stage_homology: hs.iter().map(|h| h.nonzero()).collect(),
        pair_ranks,
        eventual_ranks,
        verdict,
    })
}

/// Directed system of cofree stages at fixed points.
#[derive(Clone, Debug)]
pub struct FilteredCoalgebra {
    pub orders: Vec<u32>,
    pub stages: Vec<CofreeStage>,
    /// inclusions stage_i -> stage_{i+1}
    pub inclusions: Vec<RatMatrix>,
}

impl FilteredCoalgebra {
    pub fn build(v: &ChainComplex, orders: &[u32], points: &[Vec<Q>]) -> Result<Self> {
        let mut orders = orders.to_vec();
        orders.sort();
        orders.dedup();
        let stages = orders.iter().map(|o| cofree_stage_at(v, *o, points)).collect::<Result<Vec<_>>>()?;
        let mut inclusions = Vec::new();
        for w in stages.windows(2) {
            let f = stage_inclusion(&w[0], &w[1])?;
            if f.rank() != w[0].coalgebra.dim() {
                return Err(Error::Internal("stage inclusion is not injective".into()));
            }
            if w[1].pi.mul(&f)? != w[0].pi {
                return Err(Error::Internal("projections disagree across stages".into()));
            }
            inclusions.push(f);
        }
        Ok(FilteredCoalgebra { orders, stages, inclusions })
    }

    pub fn report(&self) -> Result<ContractibilityReport> {
        let cs: Vec<Coalgebra> = self.stages.iter().map(|s| s.coalgebra.clone()).collect();
        directed_system_report(&self.orders, &cs, &self.inclusions)
    }
}

/// Contractibility of the cofree coalgebra on an acyclic complex, via
/// eventual images of stage homology.
pub fn contractibility_check(v: &ChainComplex, orders: &[u32]) -> Result<ContractibilityReport> {
    if !homology(v).is_zero() {
        return usage("contractibility check needs an acyclic complex");
    }
    let z = v.trimmed().dim(0);
    let fc = FilteredCoalgebra::build(v, orders, &[vec![Q::zero(); z]])?;
    fc.report()
}

/// Round trip between algebra maps out of a finite stage and maps out of
/// the quotient by their kernel.
#[derive(Clone, Debug)]
pub struct GammaFactorization {
    /// kernel of f (a dg ideal of finite codimension)
    pub kernel: Vec<SVec>,
    /// quotient algebra S/ker f and the projection
    pub quotient: FiniteAlgebra,
    pub projection: RatMatrix,
    /// induced injective map S/ker f -> A
    pub induced: RatMatrix,
    /// Γ Γ'(f) = f
    pub gamma_gamma_prime: bool,
    /// Γ' Γ([g]) = [g] for the factored representative
    pub gamma_prime_gamma: bool,
}

/// Factors an algebra map f: S -> A through S/ker f and checks both round trips.
pub fn gamma_factorization(s: &FiniteAlgebra, a: &FiniteAlgebra, f: &RatMatrix) -> Result<GammaFactorization> {
    s.check_map(a, f)?;
    let kernel = kernel_sparse(f);
    let (quotient, projection) = s.quotient(&kernel)?;
    // induced map: for each quotient basis vector (a standard vector of S), f of it
    let free = crate::exactlin::Echelon::of_span(s.dim(), &kernel).free_cols();
    let cols: Vec<SVec> = free.iter().map(|c| f.mul_svec(&vec![(*c, Q::one())])).collect();
    let induced = RatMatrix::from_columns(a.dim(), &cols);
    quotient.check_map(a, &induced)?;
    // Γ(Γ'(f)) = induced ∘ projection
    let gg = induced.mul(&projection)? == *f;
    // Γ'(Γ(g)) for g = induced: ker(g ∘ proj) contains the kernel and the
    // factorization through it reproduces g
    let g_tilde = induced.mul(&projection)?;
    let k2 = kernel_sparse(&g_tilde);
    let e1 = crate::exactlin::Echelon::of_span(s.dim(), &kernel);
    let e2 = crate::exactlin::Echelon::of_span(s.dim(), &k2);
    let same_kernel = e1.rank() == e2.rank() && kernel.iter().all(|k| e2.contains(k));
    let free2 = e2.free_cols();
    let cols2: Vec<SVec> = free2.iter().map(|c| g_tilde.mul_svec(&vec![(*c, Q::one())])).collect();
    let induced2 = RatMatrix::from_columns(a.dim(), &cols2);
    let gpg = same_kernel && induced2 == induced && induced.rank() == quotient.dim();
    Ok(GammaFactorization { kernel, quotient, projection, induced, gamma_gamma_prime: gg, gamma_prime_gamma: gpg })
}

/// Truncated polynomial algebra 𝕜[x]/(x^n) with |x| = 0.
pub fn truncated_polynomial(n: usize) -> FiniteAlgebra {
    let basis = vec![(0..n).map(|i| Label::atom(format!("x^{i}"))).collect()];
    let complex = ChainComplex::new_unchecked(0, 0, basis, vec![RatMatrix::zero(0, n)]);
    let mult = (0..n)
        .map(|a| (0..n).map(|b| if a + b < n { vec![(a + b, Q::one())] } else { vec![] }).collect())
        .collect();
    FiniteAlgebra { complex, mult, unit: vec![(0, Q::one())] }
}

/// Exterior algebra Λ(y) on one generator of degree deg (odd, negative).
pub fn exterior_one(deg: i64) -> Result<FiniteAlgebra> {
    if deg >= 0 || deg % 2 == 0 {
        return usage("exterior generator must have odd negative degree");
    }
    let mut basis = vec![Vec::new(); (-deg + 1) as usize];
    basis[0].push(Label::atom("y"));
    basis[(-deg) as usize].push(Label::atom("1"));
    let d = basis.iter().enumerate().map(|(k, b)| RatMatrix::zero(if k == 0 { 0 } else { basis[k - 1].len() }, b.len())).collect();
    let complex = ChainComplex::new(deg, deg, basis, d)?;
    // global: 0 = y (degree deg), 1 = 1
    let mult = vec![vec![vec![], vec![(0, Q::one())]], vec![vec![(0, Q::one())], vec![(1, Q::one())]]];
    FiniteAlgebra::new(complex, mult, vec![(1, Q::one())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{direct_sum, disk};

    #[test]
    fn sk0_axioms() {
        for n in 0..=4 {
            let c = sk0_coalgebra(n);
            c.check_axioms().unwrap();
            assert_eq!(c.basis_grouplikes().len(), n + 1);
        }
    }

    #[test]
    fn finite_duals() {
        let k = Coalgebra::from_algebra(&truncated_polynomial(1)).unwrap();
        assert_eq!(k.dim(), 1);
        let a = truncated_polynomial(2);
        let c = Coalgebra::from_algebra(&a).unwrap();
        assert_eq!(c.dim(), 2);
        let back = c.dual_algebra().unwrap();
        assert_eq!(back.mult, a.mult);
        let e = exterior_one(-1).unwrap();
        let c = Coalgebra::from_algebra(&e).unwrap();
        assert_eq!(c.complex.dims(), vec![(0, 1), (1, 1)]);
        // the degree-1 dual generator is primitive
        let y = c.complex.offset(1);
        let unit = c.complex.offset(0);
        let mut terms = c.delta[y].clone();
        terms.sort();
        assert_eq!(terms, vec![(unit, y, Q::one()), (y, unit, Q::one())]);
    }

    #[test]
    fn cofree_stages() {
        let zero = ChainComplex::zero(0);
        for m in 1..=3 {
            assert_eq!(cofree_stage(&zero, m).unwrap().coalgebra.dim(), 1);
        }
        let d0 = disk(0).unwrap();
        for m in 1..=6 {
            let s = cofree_stage(&d0, m).unwrap();
            assert_eq!(s.coalgebra.dim(), 2 * m as usize - 1);
            s.coalgebra.check_axioms().unwrap();
        }
        let d1 = disk(1).unwrap();
        let s = cofree_stage(&d1, 4).unwrap();
        // Λ(x*, y*) with |x*| = -1 odd, |y*| = -2 even, degree >= -4:
        // 1, x, y, xy, y^2, xy... : 1, x*, y*, x*y*, y*^2
        assert_eq!(s.coalgebra.complex.dims(), vec![(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)]);
    }

    #[test]
    fn contractible_stages() {
        let orders = [1, 2, 4, 6];
        for v in [disk(0).unwrap(), disk(1).unwrap(), disk(2).unwrap()] {
            let r = contractibility_check(&v, &orders).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        }
        let mixed = direct_sum(&[disk(0).unwrap(), disk(1).unwrap()]).unwrap();
        let r = contractibility_check(&mixed, &orders).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(contractibility_check(&ChainComplex::ground(), &orders).is_err());
    }

    #[test]
    fn coextension_examples() {
        // f = 0 from a grouplike
        let c = sk0_coalgebra(0);
        let d0 = disk(0).unwrap();
        let f = ChainMap::zero(&c.complex, &d0, 0);
        let r = coextend(&f, &c, 4).unwrap();
        assert_eq!(r.solution_kernel, 0);
        // g0 -> 0, g1 -> x
        let c = sk0_coalgebra(1);
        let m = RatMatrix::from_i64(&[&[0, 1]]);
        let f = ChainMap::from_fn(&c.complex, &d0, 0, |n| if n == 0 { m.clone() } else { RatMatrix::zero(d0.dim(n), 0) })
            .unwrap();
        let r = coextend(&f, &c, 4).unwrap();
        assert_eq!(r.solution_kernel, 0);
        assert_eq!(r.stage.points.len(), 2);
        // v = 0
        let z = ChainComplex::zero(0);
        let c = sk0_coalgebra(0);
        let f = ChainMap::zero(&c.complex, &z, 0);
        assert_eq!(coextend(&f, &c, 2).unwrap().stage.coalgebra.dim(), 1);
    }

    #[test]
    fn kernel_quotient_round_trip() {
        // Λ(x)/(x^3) -> k[x]/(x^2), x -> x
        let s = truncated_polynomial(3);
        let a = truncated_polynomial(2);
        let f = RatMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0]]);
        let g = gamma_factorization(&s, &a, &f).unwrap();
        assert_eq!(g.kernel.len(), 1);
        assert!(g.gamma_gamma_prime && g.gamma_prime_gamma);
        // identity
        let g = gamma_factorization(&s, &s, &RatMatrix::identity(3)).unwrap();
        assert!(g.kernel.is_empty() && g.gamma_gamma_prime && g.gamma_prime_gamma);
        // augmentation
        let k = truncated_polynomial(1);
        let g = gamma_factorization(&s, &k, &RatMatrix::from_i64(&[&[1, 0, 0]])).unwrap();
        assert_eq!(g.kernel.len(), 2);
    }
}
