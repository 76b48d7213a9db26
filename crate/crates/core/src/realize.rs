//! Truncated simplicial objects, their realizations as coends, the α, AW and
//! ÃW comparison maps, the realization comparison Γ and the comonadic
//! resolution Res_•(P).

use crate::chain::{direct_sum, homology, is_quasi_iso, koszul, normalized_simplex_chains, shift, tensor, ChainComplex, ChainMap};
use crate::coalg::{tensor_global_index, Coalgebra, Verdict};
use crate::error::{usage, Error, Result};
use crate::exactlin::{RatMatrix, SVec, Q};
use crate::label::Label;
use crate::multi::{btree_to_svec, matrix_from_fn, QuotientComplex};
use crate::symseq::sum_embeddings;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub(crate) fn unit(i: usize) -> SVec {
    vec![(i, Q::one())]
}

fn add_into(out: &mut BTreeMap<usize, Q>, v: &SVec, c: &Q) {
    for (i, x) in v {
        let e = out.entry(*i).or_insert_with(Q::zero);
        *e += x * c;
    }
}

/// f ⊗ g for degree-0 maps, as a matrix between tensor complexes.
pub fn tensor_matrix(a1: &ChainComplex, b1: &ChainComplex, f: &RatMatrix, a2: &ChainComplex, b2: &ChainComplex, g: &RatMatrix) -> Result<RatMatrix> {
    let (t1, t2) = (tensor(a1, b1)?, tensor(a2, b2)?);
    let (i1, i2) = (tensor_global_index(a1, b1, &t1), tensor_global_index(a2, b2, &t2));
    let mut cols = vec![Vec::new(); t1.total_dim()];
    for x in 0..a1.total_dim() {
        let fx = f.column(x);
        for y in 0..b1.total_dim() {
            let gy = g.column(y);
            let mut out = BTreeMap::new();
            for (u, c) in &fx {
                for (v, e) in &gy {
                    add_into(&mut out, &unit(i2[*u][*v]), &(c * e));
                }
            }
            cols[i1[x][y]] = btree_to_svec(out);
        }
    }
    Ok(RatMatrix::from_columns(t2.total_dim(), &cols))
}

/// X_0, ..., X_s with faces[n][i]: X_n → X_{n-1} and degens[n][j]:
/// X_n → X_{n+1} (for n < s), all degree-0 chain maps given on totals.
#[derive(Clone, Debug)]
pub struct SimplicialChain {
    pub levels: Vec<ChainComplex>,
    pub faces: Vec<Vec<RatMatrix>>,
    pub degens: Vec<Vec<RatMatrix>>,
}

/// Y^0, ..., Y^s with cofaces[n][i]: Y^{n-1} → Y^n and codegens[n][j]:
/// Y^{n+1} → Y^n (for n < s).
#[derive(Clone, Debug)]
pub struct CosimplicialChain {
    pub levels: Vec<ChainComplex>,
    pub cofaces: Vec<Vec<RatMatrix>>,
    pub codegens: Vec<Vec<RatMatrix>>,
}

fn check_chain_map(s: &ChainComplex, t: &ChainComplex, m: &RatMatrix, what: &str) -> Result<()> {
    ChainMap::from_total(s, t, 0, m).map(|_| ()).map_err(|e| Error::Precondition(format!("{what}: {e}")))
}

fn expect_eq(a: RatMatrix, b: RatMatrix, what: String) -> Result<()> {
    if a != b {
        return Err(Error::Precondition(format!("identity fails: {what}")));
    }
    Ok(())
}

impl SimplicialChain {
    pub fn s_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn new(levels: Vec<ChainComplex>, faces: Vec<Vec<RatMatrix>>, degens: Vec<Vec<RatMatrix>>) -> Result<Self> {
        let x = SimplicialChain { levels, faces, degens };
        x.check()?;
        Ok(x)
    }

    /// The constant object on c.
    pub fn constant(c: &ChainComplex, s: usize) -> Self {
        let id = RatMatrix::identity(c.total_dim());
        SimplicialChain {
            levels: vec![c.clone(); s + 1],
            faces: (0..=s).map(|n| if n == 0 { Vec::new() } else { vec![id.clone(); n + 1] }).collect(),
            degens: (0..=s).map(|n| if n == s { Vec::new() } else { vec![id.clone(); n + 1] }).collect(),
        }
    }

    pub fn check(&self) -> Result<()> {
        let s = self.s_max();
        if self.faces.len() != s + 1 || self.degens.len() != s + 1 {
            return usage("simplicial object: wrong number of structure maps");
        }
        for n in 1..=s {
            for (i, f) in self.faces[n].iter().enumerate() {
                check_chain_map(&self.levels[n], &self.levels[n - 1], f, &format!("d_{i} at level {n}"))?;
            }
        }
        for n in 0..s {
            for (j, g) in self.degens[n].iter().enumerate() {
                check_chain_map(&self.levels[n], &self.levels[n + 1], g, &format!("s_{j} at level {n}"))?;
            }
        }
        let (d, sg) = (&self.faces, &self.degens);
        for n in 2..=s {
            for j in 0..=n {
                for i in 0..j {
                    expect_eq(d[n - 1][i].mul(&d[n][j])?, d[n - 1][j - 1].mul(&d[n][i])?, format!("d_{i} d_{j} at {n}"))?;
                }
            }
        }
        for n in 0..s.saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=j {
                    expect_eq(sg[n + 1][i].mul(&sg[n][j])?, sg[n + 1][j + 1].mul(&sg[n][i])?, format!("s_{i} s_{j} at {n}"))?;
                }
            }
        }
        for n in 0..s {
            for j in 0..=n {
                for i in 0..=n + 1 {
                    let lhs = d[n + 1][i].mul(&sg[n][j])?;
                    let rhs = if i < j {
                        sg[n - 1][j - 1].mul(&d[n][i])?
                    } else if i == j || i == j + 1 {
                        RatMatrix::identity(self.levels[n].total_dim())
                    } else {
                        sg[n - 1][j].mul(&d[n][i - 1])?
                    };
                    expect_eq(lhs, rhs, format!("d_{i} s_{j} at {n}"))?;
                }
            }
        }
        Ok(())
    }

    /// Levelwise tensor product X ⊗ Y.
    pub fn tensor(&self, other: &SimplicialChain) -> Result<SimplicialChain> {
        let s = self.s_max().min(other.s_max());
        let levels = (0..=s).map(|n| tensor(&self.levels[n], &other.levels[n])).collect::<Result<Vec<_>>>()?;
        let mut faces = vec![Vec::new(); s + 1];
        let mut degens = vec![Vec::new(); s + 1];
        for n in 0..=s {
            if n > 0 {
                for i in 0..=n {
                    let (a, b) = (&self.levels, &other.levels);
                    faces[n].push(tensor_matrix(&a[n], &b[n], &self.faces[n][i], &a[n - 1], &b[n - 1], &other.faces[n][i])?);
                }
            }
            if n < s {
                for j in 0..=n {
                    let (a, b) = (&self.levels, &other.levels);
                    degens[n].push(tensor_matrix(&a[n], &b[n], &self.degens[n][j], &a[n + 1], &b[n + 1], &other.degens[n][j])?);
                }
            }
        }
        Ok(SimplicialChain { levels, faces, degens })
    }

    /// θ^* for the monotone injection [m] → [n] with image `v`.
    pub fn face_along(&self, n: usize, v: &[usize]) -> RatMatrix {
        let mut m = RatMatrix::identity(self.levels[n].total_dim());
        let mut cur = n;
        for i in (0..=n).rev() {
            if !v.contains(&i) {
                m = self.faces[cur][i].mul(&m).expect("shapes");
                cur -= 1;
            }
        }
        m
    }

    /// Total complex ⊕ X_n[n] with D = d + (-1)^q Σ (-1)^i d_i, modulo
    /// degeneracies.
    pub fn normalized(&self) -> Result<Normalized> {
        let s = self.s_max();
        let parts = (0..=s).map(|n| shift(&self.levels[n], n as i64)).collect::<Result<Vec<_>>>()?;
        let sum = direct_sum(&parts)?;
        let emb = sum_embeddings(&parts, &sum);
        let mut cols = vec![Vec::new(); sum.total_dim()];
        for n in 0..=s {
            let x = &self.levels[n];
            let dx = x.total_d();
            let degs = x.global_degrees();
            for g in 0..x.total_dim() {
                let mut out = BTreeMap::new();
                add_into(&mut out, &dx.column(g).into_iter().map(|(i, c)| (emb[n][i], c)).collect(), &Q::one());
                if n > 0 {
                    for i in 0..=n {
                        let v: SVec = self.faces[n][i].column(g).into_iter().map(|(j, c)| (emb[n - 1][j], c)).collect();
                        add_into(&mut out, &v, &koszul(degs[g] + i as i64));
                    }
                }
                cols[emb[n][g]] = btree_to_svec(out);
            }
        }
        let total = RatMatrix::from_columns(sum.total_dim(), &cols);
        let basis: Vec<Vec<Label>> = sum.degrees().map(|d| sum.basis(d).to_vec()).collect();
        let ambient = ChainComplex::from_total(sum.t(), sum.lo(), basis, &total)?;
        let mut rels = Vec::new();
        for n in 0..s {
            for j in 0..=n {
                for g in 0..self.levels[n].total_dim() {
                    let v: SVec = self.degens[n][j].column(g).into_iter().map(|(i, c)| (emb[n + 1][i], c)).collect();
                    if !v.is_empty() {
                        rels.push(v);
                    }
                }
            }
        }
        let quotient = QuotientComplex::new(&ambient, &rels)?;
        Ok(Normalized { ambient, emb, quotient })
    }
}

/// N_*(X) as a quotient of the total complex by degenerate elements.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub ambient: ChainComplex,
    /// emb[n][g]: ambient index of basis g of X_n
    pub emb: Vec<Vec<usize>>,
    pub quotient: QuotientComplex,
}

impl Normalized {
    pub fn complex(&self) -> &ChainComplex {
        &self.quotient.complex
    }

    /// Class of x ∈ X_n.
    pub fn class(&self, n: usize, x: &SVec) -> SVec {
        self.quotient.project(&x.iter().map(|(i, c)| (self.emb[n][*i], c.clone())).collect())
    }

    /// (level, basis index) of quotient basis vector k.
    pub fn locate(&self, k: usize) -> (usize, usize) {
        let a = self.quotient.lift(k);
        for (n, e) in self.emb.iter().enumerate() {
            if let Some(g) = e.iter().position(|x| *x == a) {
                return (n, g);
            }
        }
        unreachable!("ambient index belongs to a level")
    }

    /// Whether the top normalized level vanishes, so the truncation loses
    /// nothing for objects degenerate above it.
    pub fn top_vanishes(&self) -> bool {
        let top = self.emb.len() - 1;
        (0..self.quotient.complex.total_dim()).all(|k| self.locate(k).0 != top)
    }
}

impl CosimplicialChain {
    pub fn s_max(&self) -> usize {
        self.levels.len() - 1
    }

    /// N_*(Δ^•).
    pub fn simplices(s: usize) -> Self {
        let levels: Vec<ChainComplex> = (0..=s).map(normalized_simplex_chains).collect();
        let along = |src: &ChainComplex, tgt: &ChainComplex, f: &dyn Fn(usize) -> usize| {
            let idx: BTreeMap<Label, usize> = (0..tgt.total_dim()).map(|g| {
                let (d, i) = tgt.locate(g);
                (tgt.basis(d)[i].clone(), g)
            }).collect();
            matrix_from_fn(tgt.total_dim(), src.total_dim(), |g| {
                let (d, i) = src.locate(g);
                let Label::Simplex(v) = &src.basis(d)[i] else { unreachable!() };
                let w: Vec<usize> = v.iter().map(|x| f(*x)).collect();
                if w.windows(2).any(|p| p[0] == p[1]) {
                    return Vec::new();
                }
                unit(idx[&Label::Simplex(w)])
            })
        };
        let mut cofaces = vec![Vec::new(); s + 1];
        let mut codegens = vec![Vec::new(); s + 1];
        for n in 0..=s {
            if n > 0 {
                for i in 0..=n {
                    cofaces[n].push(along(&levels[n - 1], &levels[n], &|x| if x < i { x } else { x + 1 }));
                }
            }
            if n < s {
                for j in 0..=n {
                    codegens[n].push(along(&levels[n + 1], &levels[n], &|x| if x <= j { x } else { x - 1 }));
                }
            }
        }
        CosimplicialChain { levels, cofaces, codegens }
    }

    /// Underlying complexes of a cosimplicial frame.
    pub fn of_frame(f: &crate::frame::CosimplicialFrame) -> Self {
        let s = f.n_max();
        CosimplicialChain {
            levels: (0..=s).map(|n| f.level(n).complex.clone()).collect(),
            cofaces: f.cofaces.clone(),
            codegens: (0..=s).map(|n| if n < s { f.codegeneracies[n].clone() } else { Vec::new() }).collect(),
        }
    }
}

/// ∫^{k ≤ s} X_k ⊗ Y^k as a quotient of ⊕ X_k ⊗ Y^k.
#[derive(Clone, Debug)]
pub struct Coend {
    pub ambient: ChainComplex,
    pub parts: Vec<ChainComplex>,
    /// index[k][x][y]: ambient index of x ⊗ y at level k
    pub index: Vec<Vec<Vec<usize>>>,
    pub quotient: QuotientComplex,
}

impl Coend {
    pub fn complex(&self) -> &ChainComplex {
        &self.quotient.complex
    }

    pub fn class(&self, k: usize, x: usize, y: usize) -> SVec {
        self.quotient.project(&unit(self.index[k][x][y]))
    }

    /// (level, x, y) of the ambient basis vector under quotient vector q.
    pub fn locate(&self, q: usize) -> (usize, usize, usize) {
        let a = self.quotient.lift(q);
        for (k, m) in self.index.iter().enumerate() {
            for (x, row) in m.iter().enumerate() {
                if let Some(y) = row.iter().position(|g| *g == a) {
                    return (k, x, y);
                }
            }
        }
        unreachable!("ambient index belongs to a level")
    }
}

pub fn coend(x: &SimplicialChain, y: &CosimplicialChain) -> Result<Coend> {
    let s = x.s_max().min(y.s_max());
    let parts = (0..=s).map(|k| tensor(&x.levels[k], &y.levels[k])).collect::<Result<Vec<_>>>()?;
    let ambient = direct_sum(&parts)?;
    let emb = sum_embeddings(&parts, &ambient);
    let index: Vec<Vec<Vec<usize>>> = (0..=s)
        .map(|k| tensor_global_index(&x.levels[k], &y.levels[k], &parts[k]).into_iter().map(|r| r.into_iter().map(|g| emb[k][g]).collect()).collect())
        .collect();
    let mut rels = Vec::new();
    let mut push = |out: BTreeMap<usize, Q>| {
        let v = btree_to_svec(out);
        if !v.is_empty() {
            rels.push(v);
        }
    };
    for n in 1..=s {
        for i in 0..=n {
            for a in 0..x.levels[n].total_dim() {
                let da = x.faces[n][i].column(a);
                for b in 0..y.levels[n - 1].total_dim() {
                    let mut out = BTreeMap::new();
                    for (u, c) in &da {
                        add_into(&mut out, &unit(index[n - 1][*u][b]), c);
                    }
                    for (v, c) in y.cofaces[n][i].column(b) {
                        add_into(&mut out, &unit(index[n][a][v]), &-c);
                    }
                    push(out);
                }
            }
        }
    }
    for n in 0..s {
        for j in 0..=n {
            for a in 0..x.levels[n].total_dim() {
                let sa = x.degens[n][j].column(a);
                for b in 0..y.levels[n + 1].total_dim() {
                    let mut out = BTreeMap::new();
                    for (u, c) in &sa {
                        add_into(&mut out, &unit(index[n + 1][*u][b]), c);
                    }
                    for (v, c) in y.codegens[n][j].column(b) {
                        add_into(&mut out, &unit(index[n][a][v]), &-c);
                    }
                    push(out);
                }
            }
        }
    }
    let quotient = QuotientComplex::new(&ambient, &rels)?;
    Ok(Coend { ambient, parts, index, quotient })
}

/// |X| = ∫^k X_k ⊗ N_*(Δ^k).
pub fn realize_chain(x: &SimplicialChain) -> Result<Coend> {
    coend(x, &CosimplicialChain::simplices(x.s_max()))
}

fn simplex_index(c: &ChainComplex, v: &[usize]) -> usize {
    let d = v.len() as i64 - 1;
    let i = c.basis(d).iter().position(|l| *l == Label::Simplex(v.to_vec())).expect("simplex");
    c.offset(d) + i
}

/// α: [x ⊗ σ] ↦ [σ^* x], as a matrix from the realization to N_*(X).
pub fn alpha(x: &SimplicialChain, r: &Coend, n: &Normalized) -> Result<ChainMap> {
    let cs = CosimplicialChain::simplices(x.s_max());
    let m = matrix_from_fn(n.complex().total_dim(), r.complex().total_dim(), |q| {
        let (k, a, b) = r.locate(q);
        let (deg, i) = cs.levels[k].locate(b);
        let Label::Simplex(v) = &cs.levels[k].basis(deg)[i] else { unreachable!() };
        let fx = x.face_along(k, v).column(a);
        n.class(v.len() - 1, &fx)
    });
    ChainMap::from_total(r.complex(), n.complex(), 0, &m)
}

/// α': x ↦ [x ⊗ ι].
pub fn alpha_inv(x: &SimplicialChain, r: &Coend, n: &Normalized) -> Result<ChainMap> {
    let cs = CosimplicialChain::simplices(x.s_max());
    let m = matrix_from_fn(r.complex().total_dim(), n.complex().total_dim(), |q| {
        let (k, a) = n.locate(q);
        let top: Vec<usize> = (0..=k).collect();
        r.class(k, a, simplex_index(&cs.levels[k], &top))
    });
    ChainMap::from_total(n.complex(), r.complex(), 0, &m)
}

/// Front face d_{p+1} ⋯ d_n and back face d_0^{n-p}.
fn front(x: &SimplicialChain, n: usize, p: usize) -> RatMatrix {
    x.face_along(n, &(0..=p).collect::<Vec<_>>())
}

fn back(x: &SimplicialChain, n: usize, p: usize) -> RatMatrix {
    x.face_along(n, &(p..=n).collect::<Vec<_>>())
}

/// AW: N_*(K ⊗ L) → N_*(K) ⊗ N_*(L), a ⊗ b ↦ Σ_p front_p(a) ⊗ back_p(b).
pub fn alexander_whitney(k: &SimplicialChain, l: &SimplicialChain) -> Result<AwMap> {
    let kl = k.tensor(l)?;
    let (nk, nl, nkl) = (k.normalized()?, l.normalized()?, kl.normalized()?);
    let target = tensor(nk.complex(), nl.complex())?;
    let tix = tensor_global_index(nk.complex(), nl.complex(), &target);
    let m = matrix_from_fn(target.total_dim(), nkl.complex().total_dim(), |q| {
        let (n, g) = nkl.locate(q);
        let ti = tensor_global_index(&k.levels[n], &l.levels[n], &kl.levels[n]);
        let (a, b) = (0..k.levels[n].total_dim())
            .flat_map(|a| (0..l.levels[n].total_dim()).map(move |b| (a, b)))
            .find(|(a, b)| ti[*a][*b] == g)
            .expect("tensor basis");
        let qa = k.levels[n].global_degrees()[a];
        let mut out = BTreeMap::new();
        for p in 0..=n {
            let fa = nk.class(p, &front(k, n, p).column(a));
            let bb = nl.class(n - p, &back(l, n, p).column(b));
            let sign = koszul((n - p) as i64 * qa);
            for (u, c) in &fa {
                for (v, e) in &bb {
                    add_into(&mut out, &unit(tix[*u][*v]), &(c * e * &sign));
                }
            }
        }
        btree_to_svec(out)
    });
    let map = ChainMap::from_total(nkl.complex(), &target, 0, &m)?;
    Ok(AwMap { map, source: nkl, left: nk, right: nl })
}

pub struct AwMap {
    pub map: ChainMap,
    pub source: Normalized,
    pub left: Normalized,
    pub right: Normalized,
}

/// ÃW: |K ⊗ L| → |K| ⊗ |L|, [x ⊗ y ⊗ ι_n] ↦ Σ_k [ι(0..k)^* x ⊗ ι_k] ⊗ [ι(k..n)^* y ⊗ ι_{n-k}].
pub fn aw_tilde(k: &SimplicialChain, l: &SimplicialChain) -> Result<(Coend, Coend, Coend, ChainMap)> {
    let kl = k.tensor(l)?;
    let (rk, rl, rkl) = (realize_chain(k)?, realize_chain(l)?, realize_chain(&kl)?);
    let cs = CosimplicialChain::simplices(kl.s_max());
    let target = tensor(rk.complex(), rl.complex())?;
    let tix = tensor_global_index(rk.complex(), rl.complex(), &target);
    let m = matrix_from_fn(target.total_dim(), rkl.complex().total_dim(), |q| {
        let (n0, g0, sb) = rkl.locate(q);
        let (deg, i) = cs.levels[n0].locate(sb);
        let Label::Simplex(v) = &cs.levels[n0].basis(deg)[i] else { unreachable!() };
        // reduce to a top simplex: [z ⊗ σ] = [σ^* z ⊗ ι]
        let n = v.len() - 1;
        let z = kl.face_along(n0, v).column(g0);
        let ti = tensor_global_index(&k.levels[n], &l.levels[n], &kl.levels[n]);
        let mut out = BTreeMap::new();
        for (g, cz) in z {
            let (a, b) = (0..k.levels[n].total_dim())
                .flat_map(|a| (0..l.levels[n].total_dim()).map(move |b| (a, b)))
                .find(|(a, b)| ti[*a][*b] == g)
                .expect("tensor basis");
            let qa = k.levels[n].global_degrees()[a];
            for p in 0..=n {
                let fa = front(k, n, p).column(a);
                let bb = back(l, n, p).column(b);
                let sign = koszul((n - p) as i64 * qa) * &cz;
                let ta = simplex_index(&cs.levels[p], &(0..=p).collect::<Vec<_>>());
                let tb = simplex_index(&cs.levels[n - p], &(0..=n - p).collect::<Vec<_>>());
                for (u, c) in &fa {
                    let cu = rk.class(p, *u, ta);
                    for (w, e) in &bb {
                        let cw = rl.class(n - p, *w, tb);
                        for (x1, c1) in &cu {
                            for (x2, c2) in &cw {
                                add_into(&mut out, &unit(tix[*x1][*x2]), &(c * e * c1 * c2 * &sign));
                            }
                        }
                    }
                }
            }
        }
        btree_to_svec(out)
    });
    let map = ChainMap::from_total(rkl.complex(), &target, 0, &m)?;
    Ok((rk, rl, rkl, map))
}

/// Simplicial chain complex underlying a simplicial vector space given by
/// level dimensions (all in degree 0) and face/degeneracy matrices.
pub fn simplicial_module(dims: &[usize], faces: Vec<Vec<RatMatrix>>, degens: Vec<Vec<RatMatrix>>) -> Result<SimplicialChain> {
    let levels = dims.iter().map(|d| ChainComplex::graded(0, vec![(0, (0..*d).map(|i| Label::atom(format!("e{i}"))).collect())])).collect::<Result<Vec<_>>>()?;
    SimplicialChain::new(levels, faces, degens)
}

/// The free simplicial vector space on Δ^k truncated at s: basis in level n
/// is the set of monotone maps [n] → [k].
pub fn free_on_simplex(k: usize, s: usize) -> Result<SimplicialChain> {
    fn monotone(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for _ in 0..=n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<usize>| {
                    let lo = v.last().copied().unwrap_or(0);
                    (lo..=k).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }
    let bases: Vec<Vec<Vec<usize>>> = (0..=s).map(|n| monotone(n, k)).collect();
    let pos = |n: usize, w: &Vec<usize>| bases[n].iter().position(|x| x == w).expect("monotone");
    let mut faces = vec![Vec::new(); s + 1];
    let mut degens = vec![Vec::new(); s + 1];
    for n in 0..=s {
        if n > 0 {
            for i in 0..=n {
                faces[n].push(matrix_from_fn(bases[n - 1].len(), bases[n].len(), |g| {
                    let mut w = bases[n][g].clone();
                    w.remove(i);
                    unit(pos(n - 1, &w))
                }));
            }
        }
        if n < s {
            for j in 0..=n {
                degens[n].push(matrix_from_fn(bases[n + 1].len(), bases[n].len(), |g| {
                    let mut w = bases[n][g].clone();
                    w.insert(j, w[j]);
                    unit(pos(n + 1, &w))
                }));
            }
        }
    }
    let dims: Vec<usize> = bases.iter().map(|b| b.len()).collect();
    simplicial_module(&dims, faces, degens)
}

/// Quasi-isomorphism verdict with homology tables of both sides.
pub fn qi_verdict(f: &ChainMap) -> Result<(Verdict, Vec<(i64, usize)>, Vec<(i64, usize)>)> {
    let v = is_quasi_iso(f, None)?;
    Ok((if v.ok { Verdict::Pass } else { Verdict::Fail }, homology(f.source()).nonzero(), homology(f.target()).nonzero()))
}

pub(crate) fn coalgebra_iterated(c: &Coalgebra, x: usize, parts: usize) -> BTreeMap<Vec<usize>, Q> {
    let mut cur: BTreeMap<Vec<usize>, Q> = BTreeMap::from([(vec![x], Q::one())]);
    let degs = c.complex.global_degrees();
    for _ in 1..parts {
        let mut next = BTreeMap::new();
        for (k, v) in cur {
            let last = *k.last().expect("nonempty");
            for (a, b, w) in &c.delta[last] {
                let mut nk = k[..k.len() - 1].to_vec();
                nk.push(*a);
                nk.push(*b);
                let e = next.entry(nk).or_insert_with(Q::zero);
                *e += &v * w;
            }
        }
        next.retain(|_, v: &mut Q| !v.is_zero());
        cur = next;
    }
    let _ = degs;
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::disk;

    #[test]
    fn free_simplex_normalizes() {
        let x = free_on_simplex(1, 3).unwrap();
        let n = x.normalized().unwrap();
        assert_eq!(n.complex().trimmed().dims(), vec![(0, 2), (1, 1)]);
        assert!(n.top_vanishes());
        let r = realize_chain(&x).unwrap();
        assert_eq!(homology(r.complex()).nonzero(), vec![(0, 1)]);
    }

    #[test]
    fn alpha_is_inverse_pair() {
        for x in [free_on_simplex(1, 2).unwrap(), free_on_simplex(2, 2).unwrap(), SimplicialChain::constant(&disk(0).unwrap(), 2)] {
            let r = realize_chain(&x).unwrap();
            let n = x.normalized().unwrap();
            let a = alpha(&x, &r, &n).unwrap();
            let b = alpha_inv(&x, &r, &n).unwrap();
            assert!(a.compose(&b).unwrap().total() == RatMatrix::identity(n.complex().total_dim()));
            assert!(b.compose(&a).unwrap().total() == RatMatrix::identity(r.complex().total_dim()));
        }
    }

    #[test]
    fn constant_realizes_to_itself() {
        let c = disk(1).unwrap();
        let r = realize_chain(&SimplicialChain::constant(&c, 2)).unwrap();
        assert_eq!(r.complex().trimmed().dims(), c.trimmed().dims());
    }

    #[test]
    fn aw_is_quasi_iso_and_square_commutes() {
        let k = free_on_simplex(1, 2).unwrap();
        let l = free_on_simplex(1, 2).unwrap();
        let aw = alexander_whitney(&k, &l).unwrap();
        assert_eq!(qi_verdict(&aw.map).unwrap().0, Verdict::Pass);
        let (rk, rl, rkl, at) = aw_tilde(&k, &l).unwrap();
        let kl = k.tensor(&l).unwrap();
        let a_kl = alpha(&kl, &rkl, &aw.source).unwrap();
        let a_k = alpha(&k, &rk, &aw.left).unwrap();
        let a_l = alpha(&l, &rl, &aw.right).unwrap();
        let aa = crate::chain::tensor_maps(&a_k, &a_l).unwrap();
        assert_eq!(aa.compose(&at).unwrap().total(), aw.map.compose(&a_kl).unwrap().total());
    }
}
