//! Simplicial ℚ-modules: the Dold–Kan pair (Γ, N), the shuffle lax structure,
//! the lifted pair on symmetric sequences and the operadic left adjoint L.

use crate::chain::{is_quasi_iso, tensor, ChainComplex, ChainMap};
use crate::coalg::{tensor_global_index, Verdict};
use crate::error::{usage, Error, Result};
use crate::exactlin::{kernel_sparse, RatMatrix, SVec, Solver, Q};
use crate::label::Label;
use crate::multi::{btree_to_svec, matrix_from_fn};
use crate::realize::{unit, SimplicialChain};
use crate::oprealize::SimplicialOperad;
use crate::operad::{canonical_pair, coequalizer, free_operad, quotient_operad, FreeOperad, Operad, OperadMap, QuotientOperad};
use crate::tree::{Decoration, PTree};
use crate::symseq::{compose_full, compose_maps, Composite, SymSeq, SymSeqMap};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Finite-dimensional simplicial vector space truncated at level s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialModule {
    pub dims: Vec<usize>,
    /// faces[n][i]: X_n → X_{n-1}
    pub faces: Vec<Vec<RatMatrix>>,
    /// degens[n][j]: X_n → X_{n+1}, n < s
    pub degens: Vec<Vec<RatMatrix>>,
}

pub fn vector_space(n: usize, tag: &str) -> ChainComplex {
    if n == 0 {
        return ChainComplex::zero(0);
    }
    ChainComplex::graded(0, vec![(0, (0..n).map(|i| Label::atom(format!("{tag}{i}"))).collect())]).expect("degree-0 space")
}

impl SimplicialModule {
    pub fn new(dims: Vec<usize>, faces: Vec<Vec<RatMatrix>>, degens: Vec<Vec<RatMatrix>>) -> Result<Self> {
        let x = SimplicialModule { dims, faces, degens };
        x.to_chain().check()?;
        Ok(x)
    }

    pub fn s_max(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn to_chain(&self) -> SimplicialChain {
        SimplicialChain {
            levels: self.dims.iter().map(|d| vector_space(*d, "e")).collect(),
            faces: self.faces.clone(),
            degens: self.degens.clone(),
        }
    }

    pub fn from_chain(x: &SimplicialChain) -> Result<Self> {
        if x.levels.iter().any(|c| c.degrees().any(|n| n != 0 && c.dim(n) > 0)) {
            return usage("a simplicial module has every level in degree 0");
        }
        Ok(SimplicialModule { dims: x.levels.iter().map(|c| c.total_dim()).collect(), faces: x.faces.clone(), degens: x.degens.clone() })
    }

    pub fn constant(d: usize, s: usize) -> Self {
        let id = RatMatrix::identity(d);
        SimplicialModule {
            dims: vec![d; s + 1],
            faces: (0..=s).map(|n| if n == 0 { Vec::new() } else { vec![id.clone(); n + 1] }).collect(),
            degens: (0..=s).map(|n| if n == s { Vec::new() } else { vec![id.clone(); n + 1] }).collect(),
        }
    }

    /// Levelwise tensor product; x_a ⊗ y_b has index a · dim Y_n + b.
    pub fn tensor(&self, other: &SimplicialModule) -> SimplicialModule {
        let s = self.s_max().min(other.s_max());
        SimplicialModule {
            dims: (0..=s).map(|n| self.dims[n] * other.dims[n]).collect(),
            faces: (0..=s).map(|n| (0..self.faces[n].len()).map(|i| self.faces[n][i].kron(&other.faces[n][i])).collect()).collect(),
            degens: (0..=s)
                .map(|n| if n == s { Vec::new() } else { (0..self.degens[n].len()).map(|j| self.degens[n][j].kron(&other.degens[n][j])).collect() })
                .collect(),
        }
    }

    pub fn tensor_all(parts: &[&SimplicialModule]) -> SimplicialModule {
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            out = out.tensor(p);
        }
        out
    }

    /// s_{seq[last]} ⋯ s_{seq[0]}: X_n → X_{n + len}.
    pub fn degen_seq(&self, n: usize, seq: &[usize]) -> RatMatrix {
        let mut m = RatMatrix::identity(self.dims[n]);
        for (t, j) in seq.iter().enumerate() {
            m = self.degens[n + t][*j].mul(&m).expect("shapes");
        }
        m
    }

    /// w^*: X_k → X_n for a monotone surjection w: [n] → [k].
    pub fn degen_along(&self, w: &[usize]) -> RatMatrix {
        let n = w.len() - 1;
        match (0..n).rev().find(|p| w[*p] == w[*p + 1]) {
            None => RatMatrix::identity(self.dims[n]),
            Some(p) => {
                let mut shorter = w.to_vec();
                shorter.remove(p + 1);
                self.degens[n - 1][p].mul(&self.degen_along(&shorter)).expect("shapes")
            }
        }
    }
}


impl SimplicialModule {
    /// Line-oriented text form mirroring the chain format.
    pub fn to_text(&self) -> String {
        let mut out = format!("simplicial s={}\n", self.s_max());
        for (n, d) in self.dims.iter().enumerate() {
            out.push_str(&format!("level {n} {d}\n"));
        }
        let mut block = |kw: &str, n: usize, i: usize, m: &RatMatrix| {
            out.push_str(&format!("{kw} {n} {i} {} {} {}\n", m.rows(), m.cols(), m.nnz()));
            for (r, c, v) in m.entries() {
                out.push_str(&format!("{r} {c} {}\n", crate::exactlin::fmt_q(v)));
            }
        };
        for n in 0..=self.s_max() {
            for (i, m) in self.faces[n].iter().enumerate() {
                block("face", n, i, m);
            }
            for (j, m) in self.degens[n].iter().enumerate() {
                block("degen", n, j, m);
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let perr = |m: &str| Error::Parse(format!("simplicial: {m}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let s: usize = lines
            .next()
            .and_then(|h| h.strip_prefix("simplicial s="))
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| perr("bad header"))?;
        let mut dims = vec![0; s + 1];
        let mut faces: Vec<Vec<Option<RatMatrix>>> = (0..=s).map(|n| vec![None; if n == 0 { 0 } else { n + 1 }]).collect();
        let mut degens: Vec<Vec<Option<RatMatrix>>> = (0..=s).map(|n| vec![None; if n == s { 0 } else { n + 1 }]).collect();
        loop {
            let line = lines.next().ok_or_else(|| perr("missing end"))?;
            if line == "end" {
                break;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |k: usize| -> Result<usize> { f.get(k).and_then(|x| x.parse().ok()).ok_or_else(|| perr(&format!("bad line '{line}'"))) };
            match f[0] {
                "level" => {
                    let n = num(1)?;
                    *dims.get_mut(n).ok_or_else(|| perr("level out of range"))? = num(2)?;
                }
                "face" | "degen" => {
                    let (n, i, rows, cols, nnz) = (num(1)?, num(2)?, num(3)?, num(4)?, num(5)?);
                    let mut trip = Vec::new();
                    for _ in 0..nnz {
                        let e: Vec<&str> = lines.next().ok_or_else(|| perr("missing entry"))?.split_whitespace().collect();
                        if e.len() != 3 {
                            return Err(perr("bad entry"));
                        }
                        let r = e[0].parse().map_err(|_| perr("bad row"))?;
                        let c = e[1].parse().map_err(|_| perr("bad column"))?;
                        trip.push((r, c, crate::exactlin::parse_q(e[2])?));
                    }
                    let m = RatMatrix::new(rows, cols, trip)?;
                    let slot = if f[0] == "face" { faces.get_mut(n) } else { degens.get_mut(n) };
                    *slot.and_then(|v| v.get_mut(i)).ok_or_else(|| perr("index out of range"))? = Some(m);
                }
                _ => return Err(perr(&format!("unknown line '{line}'"))),
            }
        }
        let take = |v: Vec<Vec<Option<RatMatrix>>>| -> Result<Vec<Vec<RatMatrix>>> {
            v.into_iter().map(|l| l.into_iter().map(|m| m.ok_or_else(|| perr("missing structure map"))).collect()).collect()
        };
        SimplicialModule::new(dims, take(faces)?, take(degens)?)
    }
}

/// N(X)_n = ∩_{i ≥ 1} ker d_i with differential d_0, and the projection
/// X_n → N(X)_n along the degenerate elements.
#[derive(Clone, Debug)]
pub struct KernelNormal {
    pub complex: ChainComplex,
    /// basis vectors of N_n inside X_n
    pub basis: Vec<Vec<SVec>>,
    pub proj: Vec<RatMatrix>,
}

impl KernelNormal {
    /// Global index in the complex of coordinate i at level n.
    pub fn global(&self, n: usize, i: usize) -> usize {
        self.complex.offset(n as i64) + i
    }

    /// Global coordinates of v ∈ X_n (its normalized component).
    pub fn coords(&self, n: usize, v: &SVec) -> SVec {
        if n > self.complex.hi().max(0) as usize || self.complex.dim(n as i64) == 0 {
            return Vec::new();
        }
        self.proj[n].mul_svec(v).into_iter().map(|(i, c)| (self.global(n, i), c)).collect()
    }

    /// The vector in X_n of global basis element g.
    pub fn vector(&self, g: usize) -> (usize, SVec) {
        let (n, i) = self.complex.locate(g);
        (n as usize, self.basis[n as usize][i].clone())
    }

    /// N(f) for a simplicial map given levelwise.
    pub fn induced(&self, target: &KernelNormal, f: &[RatMatrix]) -> RatMatrix {
        matrix_from_fn(target.complex.total_dim(), self.complex.total_dim(), |g| {
            let (n, v) = self.vector(g);
            target.coords(n, &f[n].mul_svec(&v))
        })
    }
}

pub fn normalize(x: &SimplicialModule) -> Result<KernelNormal> {
    let s = x.s_max();
    let mut basis = Vec::new();
    let mut proj = Vec::new();
    for n in 0..=s {
        let dim = x.dims[n];
        let k: Vec<SVec> = if n == 0 {
            (0..dim).map(unit).collect()
        } else {
            let mut stack = RatMatrix::zero(0, dim);
            for i in 1..=n {
                stack = stack.vstack(&x.faces[n][i])?;
            }
            kernel_sparse(&stack)
        };
        let mut cols = k.clone();
        if n > 0 {
            for j in 0..n {
                cols.extend(x.degens[n - 1][j].sparse_columns());
            }
        }
        let solver = Solver::new(&RatMatrix::from_columns(dim, &cols));
        let nk = k.len();
        let p = matrix_from_fn(nk, dim, |g| {
            let sol = solver.solve(&unit(g)).expect("X_n = N_n ⊕ D_n");
            sol.into_iter().filter(|(i, _)| *i < nk).collect()
        });
        basis.push(k);
        proj.push(p);
    }
    let labels: Vec<Vec<Label>> = (0..=s).map(|n| (0..basis[n].len()).map(|i| Label::atom(format!("n{n}.{i}"))).collect()).collect();
    let mut d = vec![RatMatrix::zero(0, basis[0].len())];
    for n in 1..=s {
        let m = matrix_from_fn(basis[n - 1].len(), basis[n].len(), |i| proj[n - 1].mul_svec(&x.faces[n][0].mul_svec(&basis[n][i])));
        d.push(m);
    }
    let complex = ChainComplex::new(0, 0, labels, d)?;
    Ok(KernelNormal { complex, basis, proj })
}

/// Monotone surjections [n] → [k] with k ≤ kmax, by k then lexicographically.
pub fn surjections(n: usize, kmax: usize) -> Vec<Vec<usize>> {
    let mut all = vec![vec![0usize]];
    for _ in 0..n {
        all = all
            .into_iter()
            .flat_map(|w| {
                let last = *w.last().expect("nonempty");
                [0, 1].into_iter().map(move |step| {
                    let mut v = w.clone();
                    v.push(last + step);
                    v
                })
            })
            .collect();
    }
    let mut out: Vec<Vec<usize>> = all.into_iter().filter(|w| w[n] <= kmax).collect();
    out.sort_by(|a, b| (a[n], a).cmp(&(b[n], b)));
    out
}

/// Γ(c): level n is ⊕_{w: [n] ↠ [k]} c_k.
#[derive(Clone, Debug)]
pub struct DkInverse {
    pub complex: ChainComplex,
    pub module: SimplicialModule,
    /// elems[n][g] = (w, global index in c)
    pub elems: Vec<Vec<(Vec<usize>, usize)>>,
    index: Vec<HashMap<(Vec<usize>, usize), usize>>,
}

impl DkInverse {
    pub fn index(&self, n: usize, w: &[usize], x: usize) -> Option<usize> {
        self.index[n].get(&(w.to_vec(), x)).copied()
    }

    /// The element (id_{[k]}, x) for x of degree k.
    pub fn top(&self, x: usize) -> (usize, usize) {
        let (k, _) = self.complex.locate(x);
        let k = k as usize;
        (k, self.index(k, &(0..=k).collect::<Vec<_>>(), x).expect("identity summand"))
    }

    /// Γ(f) levelwise for a degree-0 chain map f: c → c' given on totals.
    pub fn map_to(&self, target: &DkInverse, f: &RatMatrix) -> Vec<RatMatrix> {
        (0..self.elems.len())
            .map(|n| {
                matrix_from_fn(target.module.dims[n], self.module.dims[n], |g| {
                    let (w, x) = &self.elems[n][g];
                    let mut v: SVec = f.column(*x).into_iter().filter_map(|(y, c)| target.index(n, w, y).map(|i| (i, c))).collect();
                    v.sort_by_key(|e| e.0);
                    v
                })
            })
            .collect()
    }
}

pub fn dk_inverse(c: &ChainComplex, s: usize) -> Result<DkInverse> {
    let c = c.trimmed();
    if c.total_dim() > 0 && c.lo() < 0 {
        return usage("Γ needs a nonnegatively graded complex");
    }
    let hi = if c.total_dim() == 0 { 0 } else { c.hi().max(0) as usize };
    let mut elems = Vec::new();
    let mut index = Vec::new();
    for n in 0..=s {
        let mut e = Vec::new();
        for w in surjections(n, hi) {
            let k = w[n] as i64;
            for i in 0..c.dim(k) {
                e.push((w.clone(), c.offset(k) + i));
            }
        }
        index.push(e.iter().cloned().enumerate().map(|(g, k)| (k, g)).collect::<HashMap<_, _>>());
        elems.push(e);
    }
    let d = c.total_d();
    let mut faces = vec![Vec::new(); s + 1];
    let mut degens = vec![Vec::new(); s + 1];
    for n in 0..=s {
        if n > 0 {
            for i in 0..=n {
                faces[n].push(matrix_from_fn(elems[n - 1].len(), elems[n].len(), |g| {
                    let (w, x) = &elems[n][g];
                    let k = w[n];
                    let mut v = w.clone();
                    v.remove(i);
                    let mut img = v.clone();
                    img.dedup();
                    let eps: Vec<usize> = v.iter().map(|a| img.iter().position(|b| b == a).expect("in image")).collect();
                    if img.len() == k + 1 {
                        unit(index[n - 1][&(eps, *x)])
                    } else if img.len() == k && img[0] == 1 {
                        let mut out: SVec = d.column(*x).into_iter().map(|(y, c)| (index[n - 1][&(eps.clone(), y)], c)).collect();
                        out.sort_by_key(|e| e.0);
                        out
                    } else {
                        Vec::new()
                    }
                }));
            }
        }
        if n < s {
            for j in 0..=n {
                degens[n].push(matrix_from_fn(elems[n + 1].len(), elems[n].len(), |g| {
                    let (w, x) = &elems[n][g];
                    let mut v = w.clone();
                    v.insert(j, w[j]);
                    unit(index[n + 1][&(v, *x)])
                }));
            }
        }
    }
    let module = SimplicialModule::new(elems.iter().map(|e| e.len()).collect(), faces, degens)?;
    Ok(DkInverse { complex: c, module, elems, index })
}

/// The exact comparison c → N Γ(c), x ↦ (id, x).
pub fn dk_round_trip(c: &ChainComplex, s: usize) -> Result<(DkInverse, KernelNormal, ChainMap)> {
    let g = dk_inverse(c, s)?;
    let n = normalize(&g.module)?;
    let cc = g.complex.clone();
    let m = matrix_from_fn(n.complex.total_dim(), cc.total_dim(), |x| {
        let (k, i) = g.top(x);
        if k > s {
            return Vec::new();
        }
        n.coords(k, &unit(i))
    });
    let f = ChainMap::from_total(&cc, &n.complex, 0, &m)?;
    Ok((g, n, f))
}

/// (p_1, …, p_m)-shuffles: for each factor the positions it keeps, with the
/// sign of the block permutation.
pub fn shuffles(ps: &[usize]) -> Vec<(Vec<Vec<usize>>, Q)> {
    let total: usize = ps.iter().sum();
    let mut out = Vec::new();
    fn go(ps: &[usize], used: &mut Vec<usize>, pos: usize, total: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == total {
            out.push(cur.clone());
            return;
        }
        for f in 0..ps.len() {
            if used[f] < ps[f] {
                used[f] += 1;
                cur.push(f);
                go(ps, used, pos + 1, total, cur, out);
                cur.pop();
                used[f] -= 1;
            }
        }
    }
    let mut owners = Vec::new();
    go(ps, &mut vec![0; ps.len()], 0, total, &mut Vec::new(), &mut owners);
    for own in owners {
        let mut inv = 0i64;
        for a in 0..total {
            for b in a + 1..total {
                if own[a] > own[b] {
                    inv += 1;
                }
            }
        }
        let blocks: Vec<Vec<usize>> = (0..ps.len()).map(|f| (0..total).filter(|p| own[*p] == f).collect()).collect();
        out.push((blocks, crate::chain::koszul(inv)));
    }
    out
}

/// ∇(x_1 ⊗ ⋯ ⊗ x_m) for x_i ∈ (X_i)_{p_i}, as terms over tuples of level-P
/// basis indices.
pub fn shuffle_product(mods: &[&SimplicialModule], elems: &[(usize, SVec)]) -> BTreeMap<Vec<usize>, Q> {
    let ps: Vec<usize> = elems.iter().map(|e| e.0).collect();
    let total: usize = ps.iter().sum();
    let mut out: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
    if mods.iter().any(|m| m.s_max() < total) {
        return out;
    }
    for (blocks, sign) in shuffles(&ps) {
        let vecs: Vec<SVec> = blocks
            .iter()
            .enumerate()
            .map(|(f, keep)| {
                let comp: Vec<usize> = (0..total).filter(|p| !keep.contains(p)).collect();
                mods[f].degen_seq(ps[f], &comp).mul_svec(&elems[f].1)
            })
            .collect();
        let mut acc: Vec<(Vec<usize>, Q)> = vec![(Vec::new(), sign.clone())];
        for v in &vecs {
            acc = acc.into_iter().flat_map(|(t, c)| v.iter().map(move |(i, x)| {
                let mut t2 = t.clone();
                t2.push(*i);
                (t2, &c * x)
            })).collect();
        }
        for (t, c) in acc {
            *out.entry(t).or_insert_with(Q::zero) += c;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Mixed-radix index of a tuple in the levelwise tensor product.
pub fn tuple_index(mods: &[&SimplicialModule], n: usize, t: &[usize]) -> usize {
    t.iter().zip(mods).fold(0, |acc, (i, m)| acc * m.dims[n] + i)
}

pub struct LaxPhi {
    pub left: KernelNormal,
    pub right: KernelNormal,
    pub product: SimplicialModule,
    pub target: KernelNormal,
    pub map: ChainMap,
}

/// φ: N(X) ⊗ N(Y) → N(X ⊗ Y), the shuffle map followed by the projection.
pub fn lax_phi(x: &SimplicialModule, y: &SimplicialModule) -> Result<LaxPhi> {
    let (nx, ny) = (normalize(x)?, normalize(y)?);
    let xy = x.tensor(y);
    let nxy = normalize(&xy)?;
    let full = tensor(&nx.complex, &ny.complex)?;
    let tix = tensor_global_index(&nx.complex, &ny.complex, &full);
    // the degrees ≤ s subcomplex, where the truncated target is exact
    let src = full.restrict_window(full.lo(), full.hi().min(xy.s_max() as i64));
    let mut cols = vec![Vec::new(); src.total_dim()];
    for a in 0..nx.complex.total_dim() {
        for b in 0..ny.complex.total_dim() {
            let ((p, va), (q, vb)) = (nx.vector(a), ny.vector(b));
            if p + q > xy.s_max() {
                continue;
            }
            let terms = shuffle_product(&[x, y], &[(p, va), (q, vb)]);
            let v: SVec = btree_to_svec(terms.into_iter().map(|(t, c)| (tuple_index(&[x, y], p + q, &t), c)).fold(BTreeMap::new(), |mut m, (i, c)| {
                *m.entry(i).or_insert_with(Q::zero) += c;
                m
            }));
            cols[tix[a][b]] = nxy.coords(p + q, &v);
        }
    }
    let m = RatMatrix::from_columns(nxy.complex.total_dim(), &cols);
    let map = ChainMap::from_total(&src, &nxy.complex, 0, &m)?;
    Ok(LaxPhi { left: nx, right: ny, product: xy, target: nxy, map })
}

/// φ(φ(a ⊗ b) ⊗ c) = φ(a ⊗ φ(b ⊗ c)) on all basis triples.
pub fn lax_associativity(x: &SimplicialModule, y: &SimplicialModule, z: &SimplicialModule) -> Result<bool> {
    let xy = lax_phi(x, y)?;
    let yz = lax_phi(y, z)?;
    let xy_z = lax_phi(&xy.product, z)?;
    let x_yz = lax_phi(x, &yz.product)?;
    let (nx, ny, nz) = (&xy.left, &xy.right, &yz.right);
    let t_xy = tensor_global_index(&nx.complex, &ny.complex, &tensor(&nx.complex, &ny.complex)?);
    let t_yz = tensor_global_index(&ny.complex, &nz.complex, &tensor(&ny.complex, &nz.complex)?);
    let t_l = tensor_global_index(&xy.target.complex, &nz.complex, &tensor(&xy.target.complex, &nz.complex)?);
    let t_r = tensor_global_index(&nx.complex, &yz.target.complex, &tensor(&nx.complex, &yz.target.complex)?);
    let (ml, mr) = (xy_z.map.total(), x_yz.map.total());
    let (mxy, myz) = (xy.map.total(), yz.map.total());
    for a in 0..nx.complex.total_dim() {
        for b in 0..ny.complex.total_dim() {
            for c in 0..nz.complex.total_dim() {
                let deg = nx.vector(a).0 + ny.vector(b).0 + nz.vector(c).0;
                if deg > xy_z.product.s_max() {
                    continue;
                }
                let mut left = BTreeMap::new();
                for (u, e) in mxy.column(t_xy[a][b]) {
                    for (w, f) in ml.column(t_l[u][c]) {
                        *left.entry(w).or_insert_with(Q::zero) += &e * f;
                    }
                }
                let mut right = BTreeMap::new();
                for (u, e) in myz.column(t_yz[b][c]) {
                    for (w, f) in mr.column(t_r[a][u]) {
                        *right.entry(w).or_insert_with(Q::zero) += &e * f;
                    }
                }
                if btree_to_svec(left) != btree_to_svec(right) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WindowVerdict {
    pub window: (i64, i64),
    pub source: Vec<(i64, usize)>,
    pub target: Vec<(i64, usize)>,
    pub verdict: Verdict,
}

/// Quasi-isomorphism on degrees [lo, hi] where truncation is exact.
pub fn window_verdict(f: &ChainMap, window: (i64, i64)) -> Result<WindowVerdict> {
    let v = is_quasi_iso(f, Some(window))?;
    let pick = |d: &dyn Fn(&crate::chain::DegreeRanks) -> usize| v.degrees.iter().map(|r| (r.degree, d(r))).filter(|x| x.1 > 0).collect();
    Ok(WindowVerdict {
        window,
        source: pick(&|r| r.source),
        target: pick(&|r| r.target),
        verdict: if v.ok { Verdict::Pass } else { Verdict::Fail },
    })
}

pub fn is_invertible(m: &RatMatrix) -> bool {
    m.rows() == m.cols() && m.rank() == m.rows()
}


/// A simplicial symmetric sequence, levelwise of degree-0 spaces.
#[derive(Clone, Debug)]
pub struct SimplicialSeq {
    pub levels: Vec<SymSeq>,
    pub faces: Vec<Vec<SymSeqMap>>,
    pub degens: Vec<Vec<SymSeqMap>>,
}

impl SimplicialSeq {
    pub fn s_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn bound(&self) -> usize {
        self.levels[0].bound()
    }

    pub fn arity(&self, r: usize) -> SimplicialModule {
        let s = self.s_max();
        SimplicialModule {
            dims: self.levels.iter().map(|l| l.arity(r).total_dim()).collect(),
            faces: (0..=s).map(|n| self.faces[n].iter().map(|f| f.total(r)).collect()).collect(),
            degens: (0..=s).map(|n| self.degens[n].iter().map(|f| f.total(r)).collect()).collect(),
        }
    }
}

/// λ̄(m): Γ applied aritywise, with Σ_r acting through Γ(ρ).
#[derive(Clone, Debug)]
pub struct LiftedSeq {
    pub seq: SimplicialSeq,
    pub dk: Vec<DkInverse>,
}

pub fn lift_symseq(m: &SymSeq, s: usize) -> Result<LiftedSeq> {
    let bound = m.bound();
    let dk: Vec<DkInverse> = (0..=bound).map(|r| dk_inverse(m.arity(r), s)).collect::<Result<_>>()?;
    let acts: Vec<Vec<Vec<RatMatrix>>> =
        (0..=bound).map(|r| m.transpositions(r).iter().map(|t| dk[r].map_to(&dk[r], t)).collect()).collect();
    let levels: Vec<SymSeq> = (0..=s)
        .map(|n| {
            let comps = (0..=bound).map(|r| vector_space(dk[r].module.dims[n], &format!("g{r}."))).collect();
            let actions = (0..=bound).map(|r| acts[r].iter().map(|a| a[n].clone()).collect()).collect();
            SymSeq::new(comps, actions)
        })
        .collect::<Result<_>>()?;
    let mut faces = vec![Vec::new(); s + 1];
    let mut degens = vec![Vec::new(); s + 1];
    for n in 0..=s {
        if n > 0 {
            for i in 0..=n {
                let mats: Vec<RatMatrix> = (0..=bound).map(|r| dk[r].module.faces[n][i].clone()).collect();
                faces[n].push(SymSeqMap::from_totals(&levels[n], &levels[n - 1], &mats)?);
            }
        }
        if n < s {
            for j in 0..=n {
                let mats: Vec<RatMatrix> = (0..=bound).map(|r| dk[r].module.degens[n][j].clone()).collect();
                degens[n].push(SymSeqMap::from_totals(&levels[n], &levels[n + 1], &mats)?);
            }
        }
    }
    Ok(LiftedSeq { seq: SimplicialSeq { levels, faces, degens }, dk })
}

/// R̄: the kernel model aritywise, with the induced Σ actions.
pub fn normalize_seq(x: &SimplicialSeq) -> Result<(SymSeq, Vec<KernelNormal>)> {
    let mut comps = Vec::new();
    let mut actions = Vec::new();
    let mut norms = Vec::new();
    for r in 0..=x.bound() {
        let m = x.arity(r);
        let nk = normalize(&m)?;
        let acts: Vec<RatMatrix> = (0..r.saturating_sub(1))
            .map(|i| {
                let lv: Vec<RatMatrix> = x.levels.iter().map(|l| l.transposition(r, i)).collect();
                nk.induced(&nk, &lv)
            })
            .collect();
        comps.push(nk.complex.clone());
        actions.push(acts);
        norms.push(nk);
    }
    Ok((SymSeq::new(comps, actions)?, norms))
}

/// The exact, equivariant comparison m → R̄λ̄(m).
pub fn lift_round_trip(m: &SymSeq, s: usize) -> Result<SymSeqMap> {
    let l = lift_symseq(m, s)?;
    let (rl, norms) = normalize_seq(&l.seq)?;
    let mats: Vec<RatMatrix> = (0..=m.bound())
        .map(|r| {
            matrix_from_fn(rl.arity(r).total_dim(), m.arity(r).total_dim(), |x| {
                let (k, i) = l.dk[r].top(x);
                if k > s { Vec::new() } else { norms[r].coords(k, &unit(i)) }
            })
        })
        .collect();
    SymSeqMap::from_totals(m, &rl, &mats)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArityWindow {
    pub arity: usize,
    pub check: WindowVerdict,
}

/// N(λ̄A ∘ λ̄B) compared with A ∘ B through the iterated shuffle map, which
/// is the N-level form of λ̄(A∘B) → λ̄A ∘ λ̄B.
pub fn composite_comparison(a: &SymSeq, b: &SymSeq, bound: usize, s: usize) -> Result<Vec<ArityWindow>> {
    let la = lift_symseq(a, s)?;
    let lb = lift_symseq(b, s)?;
    let levels: Vec<Composite> = (0..=s).map(|n| compose_full(&la.seq.levels[n], &lb.seq.levels[n], bound)).collect::<Result<_>>()?;
    let mut faces = vec![Vec::new(); s + 1];
    let mut degens = vec![Vec::new(); s + 1];
    for n in 0..=s {
        if n > 0 {
            for i in 0..=n {
                faces[n].push(compose_maps(&la.seq.faces[n][i], &lb.seq.faces[n][i], bound)?.2);
            }
        }
        if n < s {
            for j in 0..=n {
                degens[n].push(compose_maps(&la.seq.degens[n][j], &lb.seq.degens[n][j], bound)?.2);
            }
        }
    }
    let comp = SimplicialSeq { levels: levels.iter().map(|c| c.seq.clone()).collect(), faces, degens };
    let ab = compose_full(a, b, bound)?;
    let mut out = Vec::new();
    for r in 0..=bound {
        let target = normalize(&comp.arity(r))?;
        let src_full = ab.seq.arity(r).clone();
        if src_full.total_dim() == 0 {
            continue;
        }
        let top = src_full.trimmed().hi();
        let src = src_full.restrict_window(src_full.lo(), src_full.hi().min(s as i64));
        let ar = &ab.arities[r];
        let m = matrix_from_fn(target.complex.total_dim(), src.total_dim(), |g| {
            let (sidx, tup) = ar.sum.elem(ar.quot.lift(g));
            let key = &ar.keys[sidx];
            let nb = key.0.iter().map(|x| x + 1).max().unwrap_or(0);
            let mut ars = vec![nb + key.1];
            ars.extend((0..nb).map(|blk| key.0.iter().filter(|x| **x == blk).count()));
            ars.extend(std::iter::repeat(0).take(key.1));
            let dks: Vec<&DkInverse> = (0..tup.len()).map(|p| if p == 0 { &la.dk[ars[0]] } else { &lb.dk[ars[p]] }).collect();
            let elems: Vec<(usize, SVec)> = (0..tup.len()).map(|p| {
                let (k, i) = dks[p].top(tup[p]);
                (k, unit(i))
            }).collect();
            let refs: Vec<&SimplicialModule> = dks.iter().map(|d| &d.module).collect();
            let level = elems.iter().map(|e| e.0).sum::<usize>();
            let lar = &levels[level].arities[r];
            let t = lar.summand(key).expect("same summands levelwise");
            let mut amb = BTreeMap::new();
            for (tt, c) in shuffle_product(&refs, &elems) {
                if let Some(x) = lar.sum.index(t, &tt) {
                    *amb.entry(x).or_insert_with(Q::zero) += c;
                }
            }
            let v = lar.quot.project(&btree_to_svec(amb));
            target.coords(level, &v)
        });
        let f = ChainMap::from_total(&src, &target.complex, 0, &m)?;
        out.push(ArityWindow { arity: r, check: window_verdict(&f, (src.lo().max(0), top.min(s as i64 - 1)))? });
    }
    Ok(out)
}


/// Generator matrices sending each generator to its corolla.
fn corolla_mats(target: &FreeOperad, map: &SymSeqMap, bound: usize) -> Vec<RatMatrix> {
    (0..=bound)
        .map(|k| {
            let t = map.total(k);
            matrix_from_fn(target.operad.dim(k), t.cols(), |x| {
                let mut v: SVec = t.column(x).into_iter().map(|(a, c)| (target.trees.corolla(k, a).expect("corolla"), c)).collect();
                v.sort_by_key(|e| e.0);
                v
            })
        })
        .collect()
}

type Levels = (Vec<FreeOperad>, Vec<Vec<OperadMap>>, Vec<Vec<OperadMap>>);

/// F(λ̄M) levelwise with the free extensions of the structure maps.
fn free_levels(l: &LiftedSeq, bound: usize) -> Result<Levels> {
    let s = l.seq.s_max();
    let frees: Vec<FreeOperad> = l.seq.levels.iter().map(|m| free_operad(m, bound)).collect::<Result<_>>()?;
    let mut faces = vec![Vec::new(); s + 1];
    let mut degens = vec![Vec::new(); s + 1];
    for n in 0..=s {
        if n > 0 {
            for f in &l.seq.faces[n] {
                faces[n].push(frees[n].extend(&frees[n - 1].operad, &corolla_mats(&frees[n - 1], f, bound))?);
            }
        }
        if n < s {
            for f in &l.seq.degens[n] {
                degens[n].push(frees[n].extend(&frees[n + 1].operad, &corolla_mats(&frees[n + 1], f, bound))?);
            }
        }
    }
    Ok((frees, faces, degens))
}

/// L(P) as a simplicial operad, with its presentation by F(λ̄ P̄).
#[derive(Clone, Debug)]
pub struct LOperad {
    pub simplicial: SimplicialOperad,
    /// λ̄ of the reduced generators
    pub gens: LiftedSeq,
    pub frees: Vec<FreeOperad>,
    pub quotients: Vec<QuotientOperad>,
}

impl LOperad {
    /// The image of generator x ∈ P̄(r) of degree k, as an element of L_k(r).
    pub fn generator(&self, r: usize, x: usize) -> (usize, SVec) {
        let (k, i) = self.gens.dk[r].top(x);
        let c = self.frees[k].trees.corolla(r, i).expect("corolla");
        (k, self.quotients[k].projection.total(r).column(c))
    }
}

/// L(F(M)) = F(λ̄M) levelwise.
pub fn l_free(m: &SymSeq, bound: usize, s: usize) -> Result<LOperad> {
    let gens = lift_symseq(m, s)?;
    let (frees, faces, degens) = free_levels(&gens, bound)?;
    let quotients: Vec<QuotientOperad> = frees.iter().map(|f| quotient_operad(&f.operad, &[])).collect::<Result<_>>()?;
    let simplicial = SimplicialOperad::new(frees.iter().map(|f| f.operad.clone()).collect(), faces, degens)?;
    Ok(LOperad { simplicial, gens, frees, quotients })
}

/// L(P) for a connected operad: levelwise coequalizer of
/// F(λ̄ Ū F P̄) ⇉ F(λ̄ P̄), with d1 = F(λ̄ Uε) and d0 the iterated comonoidal map.
pub fn operad_l(p: &Operad, s: usize) -> Result<LOperad> {
    let bound = p.bound();
    let pair = canonical_pair(p)?;
    let lp = lift_symseq(&pair.inner.trees.gens, s)?;
    let lq = lift_symseq(&pair.outer.trees.gens, s)?;
    let (bfree, bfaces, bdegens) = free_levels(&lp, bound)?;
    let afree: Vec<FreeOperad> = lq.seq.levels.iter().map(|m| free_operad(m, bound)).collect::<Result<_>>()?;
    let inner = &pair.inner.trees;
    let mut cache: HashMap<Vec<usize>, (SimplicialModule, KernelNormal)> = HashMap::new();
    let mut quotients = Vec::new();
    for n in 0..=s {
        let mut g0 = Vec::new();
        let mut g1 = Vec::new();
        for k in 0..=bound {
            let src = &lq.dk[k];
            let dim_a = src.module.dims[n];
            g1.push(if k < 2 {
                RatMatrix::zero(bfree[n].operad.dim(k), dim_a)
            } else {
                let eps = src.map_to(&lp.dk[k], &pair.counit.total(k));
                let g = SymSeqMap::from_totals(&lq.seq.levels[n], &lp.seq.levels[n], &(0..=bound).map(|r| if r == k { eps[n].clone() } else { RatMatrix::zero(lp.seq.levels[n].arity(r).total_dim(), lq.seq.levels[n].arity(r).total_dim()) }).collect::<Vec<_>>())?;
                corolla_mats(&bfree[n], &g, bound).swap_remove(k)
            });
            let mut cols = Vec::new();
            for (w, x) in src.elems[n].iter().take(dim_a) {
                if k < 2 {
                    break;
                }
                let (tree, decs) = inner.basis(k, *x);
                let tree = tree.clone();
                let decs = decs.to_vec();
                let ars = tree.vertex_arities();
                let mods: Vec<&SimplicialModule> = ars.iter().map(|a| &lp.dk[*a].module).collect();
                let elems: Vec<(usize, SVec)> = ars
                    .iter()
                    .zip(&decs)
                    .map(|(a, d)| {
                        let (lv, i) = lp.dk[*a].top(*d);
                        (lv, unit(i))
                    })
                    .collect();
                let level: usize = elems.iter().map(|e| e.0).sum();
                if !cache.contains_key(&ars) {
                    let z = SimplicialModule::tensor_all(&mods);
                    let nz = normalize(&z)?;
                    cache.insert(ars.clone(), (z, nz));
                }
                let (z, nz) = &cache[&ars];
                let mut v = BTreeMap::new();
                for (t, c) in shuffle_product(&mods, &elems) {
                    *v.entry(tuple_index(&mods, level, &t)).or_insert_with(Q::zero) += c;
                }
                let coords = nz.proj[level].mul_svec(&btree_to_svec(v));
                let mut normal = BTreeMap::new();
                for (i, c) in coords {
                    for (j, e) in &nz.basis[level][i] {
                        *normal.entry(*j).or_insert_with(Q::zero) += &c * e;
                    }
                }
                let img = z.degen_along(w).mul_svec(&btree_to_svec(normal));
                let pt = PTree::from_tree(&tree, 0);
                let mut out = BTreeMap::new();
                for (g, c) in img {
                    let mut rest = g;
                    let mut tup = vec![0; mods.len()];
                    for p in (0..mods.len()).rev() {
                        tup[p] = rest % mods[p].dims[n];
                        rest /= mods[p].dims[n];
                    }
                    let decs: Vec<Decoration> =
                        ars.iter().zip(&tup).map(|(a, i)| Decoration { arity: *a, vec: unit(*i), degree: 0 }).collect();
                    bfree[n].trees.normalize_into(&mut out, k, &pt, &decs, &c);
                }
                cols.push(btree_to_svec(out));
            }
            g0.push(if k < 2 { RatMatrix::zero(bfree[n].operad.dim(k), dim_a) } else { RatMatrix::from_columns(bfree[n].operad.dim(k), &cols) });
        }
        let d0 = afree[n].extend(&bfree[n].operad, &g0)?;
        let d1 = afree[n].extend(&bfree[n].operad, &g1)?;
        quotients.push(coequalizer(&d0, &d1)?);
    }
    let mut faces = vec![Vec::new(); s + 1];
    let mut degens = vec![Vec::new(); s + 1];
    for n in 0..=s {
        if n > 0 {
            for f in &bfaces[n] {
                faces[n].push(quotients[n].factor(&quotients[n - 1].projection.compose(f)?)?);
            }
        }
        if n < s {
            for f in &bdegens[n] {
                degens[n].push(quotients[n].factor(&quotients[n + 1].projection.compose(f)?)?);
            }
        }
    }
    let simplicial = SimplicialOperad::new(quotients.iter().map(|q| q.operad.clone()).collect(), faces, degens)?;
    Ok(LOperad { simplicial, gens: lp, frees: bfree, quotients })
}

/// R̄q = N(q) aritywise, composition through the shuffle map.
#[derive(Clone, Debug)]
pub struct NormalizedOperad {
    pub operad: Operad,
    pub modules: Vec<SimplicialModule>,
    pub norms: Vec<KernelNormal>,
}

pub fn normalize_operad(q: &SimplicialOperad) -> Result<NormalizedOperad> {
    let s = q.s_max();
    let bound = q.bound();
    let modules: Vec<SimplicialModule> = (0..=bound).map(|r| SimplicialModule::from_chain(&q.arity(r))).collect::<Result<_>>()?;
    let norms: Vec<KernelNormal> = modules.iter().map(normalize).collect::<Result<_>>()?;
    let comps = norms.iter().map(|n| n.complex.clone()).collect();
    let actions = (0..=bound)
        .map(|r| {
            (0..r.saturating_sub(1))
                .map(|i| norms[r].induced(&norms[r], &q.levels.iter().map(|l| l.seq().transposition(r, i)).collect::<Vec<_>>()))
                .collect()
        })
        .collect();
    let seq = SymSeq::new(comps, actions)?;
    let operad = Operad::from_fn(seq, |(m, n, i), x, y| {
        let (p, vx) = norms[m].vector(x);
        let (p2, vy) = norms[n].vector(y);
        if p + p2 > s {
            return Vec::new();
        }
        let mut acc = BTreeMap::new();
        for (t, c) in shuffle_product(&[&modules[m], &modules[n]], &[(p, vx), (p2, vy)]) {
            for (z, e) in q.levels[p + p2].compose_basis(m, i, t[0], n, t[1]) {
                *acc.entry(z).or_insert_with(Q::zero) += &c * e;
            }
        }
        norms[m + n - 1].coords(p + p2, &btree_to_svec(acc))
    })?;
    Ok(NormalizedOperad { operad, modules, norms })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeneratorComparison {
    /// λ̄UP → UL(P) is an isomorphism at every level and arity
    pub levelwise_iso: bool,
    /// its N-adjoint P(r) → N(UL(P)(r))
    pub arities: Vec<ArityWindow>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TransferReport {
    pub s_max: usize,
    pub generators: GeneratorComparison,
    /// P → R̄L(P) is an operad map and a quasi-isomorphism
    pub unit: Vec<ArityWindow>,
    pub unit_verdict: Verdict,
    /// L(B^c B(R̄q)) → q for q = L(P)
    pub counit: Vec<ArityWindow>,
    pub counit_verdict: Verdict,
}

fn all_pass(rows: &[ArityWindow]) -> Verdict {
    if rows.iter().all(|r| r.check.verdict == Verdict::Pass) { Verdict::Pass } else { Verdict::Fail }
}

fn window_of(c: &ChainComplex, s: usize) -> (i64, i64) {
    let t = c.trimmed();
    if t.total_dim() == 0 {
        return (0, 0);
    }
    (t.lo().max(0), t.hi().min(s as i64 - 1))
}

/// The adjoint of λ̄UP → UL(P), aritywise: x ↦ [corolla(ι x)].
pub fn unit_map(p: &Operad, l: &LOperad, nl: &NormalizedOperad) -> Result<OperadMap> {
    let s = l.simplicial.s_max();
    let mats: Vec<RatMatrix> = (0..=p.bound())
        .map(|r| {
            matrix_from_fn(nl.operad.dim(r), p.dim(r), |x| {
                if r == 1 {
                    return nl.norms[1].coords(0, &unit(0));
                }
                let (k, v) = l.generator(r, x);
                if k > s { Vec::new() } else { nl.norms[r].coords(k, &v) }
            })
        })
        .collect();
    OperadMap::new(p.clone(), nl.operad.clone(), &mats)
}

/// The counit L(B^c B(R̄q)) → q for a simplicial operad q, as an N-level map.
pub fn counit_comparison(q: &SimplicialOperad) -> Result<Vec<ArityWindow>> {
    let s = q.s_max();
    let bound = q.bound();
    let nq = normalize_operad(q)?;
    let res = crate::barcobar::bar_cobar(&nq.operad)?;
    let pc = &res.cobar.operad;
    let lpc = operad_l(pc, s)?;
    let mut maps = Vec::new();
    for n in 0..=s {
        let phi: Vec<RatMatrix> = (0..=bound)
            .map(|k| {
                let dk = &lpc.gens.dk[k];
                let eps = res.counit.total(k);
                matrix_from_fn(q.levels[n].dim(k), dk.module.dims[n], |g| {
                    let (w, x) = &dk.elems[n][g];
                    let mut acc = BTreeMap::new();
                    for (y, c) in eps.column(*x) {
                        let (lv, v) = nq.norms[k].vector(y);
                        debug_assert_eq!(lv, w[n]);
                        for (j, e) in nq.modules[k].degen_along(w).mul_svec(&v) {
                            *acc.entry(j).or_insert_with(Q::zero) += &c * e;
                        }
                    }
                    btree_to_svec(acc)
                })
            })
            .collect();
        let f = lpc.frees[n].extend(&q.levels[n], &phi)?;
        maps.push(lpc.quotients[n].factor(&f)?);
    }
    let nl = normalize_operad(&lpc.simplicial)?;
    let mut rows = Vec::new();
    for r in 2..=bound {
        let m = nl.norms[r].induced(&nq.norms[r], &maps.iter().map(|f| f.total(r)).collect::<Vec<_>>());
        let f = ChainMap::from_total(&nl.norms[r].complex, &nq.norms[r].complex, 0, &m)?;
        rows.push(ArityWindow { arity: r, check: window_verdict(&f, window_of(pc.seq().arity(r), s))? });
    }
    Ok(rows)
}

/// Operads that are cofibrant by construction.
#[derive(Clone, Debug)]
pub enum CofibrantOperad {
    Free(FreeOperad),
    BarCobar(crate::barcobar::Resolution),
}

impl CofibrantOperad {
    pub fn operad(&self) -> &Operad {
        match self {
            CofibrantOperad::Free(f) => &f.operad,
            CofibrantOperad::BarCobar(r) => &r.cobar.operad,
        }
    }

    /// Accepts p if it is free on its indecomposables with zero differential
    /// on generators; anything else must come through bar_cobar.
    pub fn free_on(p: &Operad, gens: &SymSeq) -> Result<Self> {
        let f = free_operad(gens, p.bound())?;
        if f.operad.dims() != p.dims() {
            return usage("not free on the given generators");
        }
        Ok(CofibrantOperad::Free(f))
    }
}

/// Transfer along (L, R̄) with s_max = s; the counit is checked on q, or on
/// L(p) when q is absent.
pub fn transfer_checks(cp: &CofibrantOperad, q: Option<&SimplicialOperad>, s: usize) -> Result<TransferReport> {
    let p = cp.operad();
    let l = operad_l(p, s)?;
    let nl = normalize_operad(&l.simplicial)?;
    let u = unit_map(p, &l, &nl)?;
    let mut iso = true;
    for n in 0..=s {
        for r in 2..=p.bound() {
            let m = matrix_from_fn(l.simplicial.levels[n].dim(r), l.gens.dk[r].module.dims[n], |i| {
                let c = l.frees[n].trees.corolla(r, i).expect("corolla");
                l.quotients[n].projection.total(r).column(c)
            });
            iso &= is_invertible(&m);
        }
    }
    let mut unit_rows = Vec::new();
    for r in 2..=p.bound() {
        let f = ChainMap::from_total(p.seq().arity(r), &nl.norms[r].complex, 0, &u.total(r))?;
        unit_rows.push(ArityWindow { arity: r, check: window_verdict(&f, window_of(p.seq().arity(r), s))? });
    }
    let unit_verdict = all_pass(&unit_rows);
    let generators = GeneratorComparison { levelwise_iso: iso, arities: unit_rows.clone(), verdict: if iso { Verdict::Pass } else { Verdict::Fail } };
    let counit = counit_comparison(q.unwrap_or(&l.simplicial))?;
    let counit_verdict = all_pass(&counit);
    Ok(TransferReport { s_max: s, generators, unit: unit_rows, unit_verdict, counit, counit_verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{disk, homology, normalized_simplex_chains, sphere};
    use crate::realize::free_on_simplex;

    #[test]
    fn surjection_counts() {
        // binomial(n, k) surjections [n] ↠ [k]
        assert_eq!(surjections(3, 3).len(), 8);
        assert_eq!(surjections(3, 1).len(), 4);
    }

    #[test]
    fn round_trip_is_exact() {
        for c in [disk(1).unwrap(), sphere(2, 0).unwrap(), normalized_simplex_chains(2)] {
            let (g, n, f) = dk_round_trip(&c, 4).unwrap();
            assert_eq!(g.complex.trimmed().dims(), n.complex.trimmed().dims());
            assert!(is_invertible(&f.total()));
        }
    }

    #[test]
    fn kernel_model_of_simplex() {
        // N(𝕜Δ^1) ≃ 𝕜, concentrated in degrees 0 and 1 with rank-one differential
        let x = SimplicialModule::from_chain(&free_on_simplex(1, 3).unwrap()).unwrap();
        let n = normalize(&x).unwrap();
        assert_eq!(n.complex.trimmed().dims(), vec![(0, 2), (1, 1)]);
        assert_eq!(homology(&n.complex).nonzero(), vec![(0, 1)]);
    }

    #[test]
    fn shuffle_map_and_associativity() {
        let x = SimplicialModule::from_chain(&free_on_simplex(1, 3).unwrap()).unwrap();
        let y = dk_inverse(&disk(1).unwrap(), 3).unwrap().module;
        let phi = lax_phi(&x, &y).unwrap();
        assert_eq!(phi.map.source().total_dim(), 3 * 2);
        let k = SimplicialModule::constant(1, 3);
        let unit_phi = lax_phi(&k, &x).unwrap();
        assert!(is_invertible(&unit_phi.map.total()));
        assert!(lax_associativity(&x, &y, &x).unwrap());
    }
    #[test]
    fn lifted_sequences() {
        use crate::symseq::SymSeq;
        let m = SymSeq::concentrated(2, &disk(1).unwrap(), 3, false).unwrap();
        let f = lift_round_trip(&m, 3).unwrap();
        for r in 0..=3 {
            assert!(is_invertible(&f.total(r)));
        }
        let a = SymSeq::concentrated(2, &sphere(1, 0).unwrap(), 3, false).unwrap();
        let b = SymSeq::concentrated(1, &crate::chain::direct_sum(&[disk(1).unwrap(), sphere(1, 0).unwrap()]).unwrap(), 3, false).unwrap();
        let rows = composite_comparison(&a, &b, 3, 4).unwrap();
        assert!(!rows.is_empty());
        for row in rows {
            assert_eq!(row.check.verdict, Verdict::Pass, "{row:?}");
        }
    }
    #[test]
    fn transfer_of_free_binary() {
        let p = CofibrantOperad::Free(crate::operad::free_binary(3).unwrap());
        let rep = transfer_checks(&p, None, 2).unwrap();
        assert!(rep.generators.levelwise_iso);
        assert_eq!(rep.unit_verdict, Verdict::Pass);
        assert_eq!(rep.counit_verdict, Verdict::Pass);
    }
    #[test]
    fn transfer_of_commutative_model() {
        let com = crate::operad::commutative_operad(3).unwrap().operad;
        let p = CofibrantOperad::BarCobar(crate::barcobar::bar_cobar(&com).unwrap());
        let q = operad_l(&com, 2).unwrap().simplicial;
        let rep = transfer_checks(&p, Some(&q), 2).unwrap();
        assert!(rep.generators.levelwise_iso);
        assert_eq!((rep.unit_verdict, rep.counit_verdict), (Verdict::Pass, Verdict::Pass));
    }
    #[test]
    fn text_round_trip_and_units() {
        let x = dk_inverse(&sphere(1, 0).unwrap(), 3).unwrap().module;
        assert_eq!(SimplicialModule::from_text(&x.to_text()).unwrap(), x);
        // Γ(𝕜) is the constant module
        let k = dk_inverse(&crate::chain::ChainComplex::ground(), 3).unwrap().module;
        assert_eq!(k, SimplicialModule::constant(1, 3));
        assert!(dk_inverse(&sphere(-1, -1).unwrap(), 2).is_err());
    }

    #[test]
    fn shuffle_map_of_simplices_is_quasi_iso() {
        let x = SimplicialModule::from_chain(&free_on_simplex(1, 4).unwrap()).unwrap();
        let phi = lax_phi(&x, &x).unwrap();
        let v = window_verdict(&phi.map, (0, 3)).unwrap();
        assert_eq!(v.verdict, Verdict::Pass);
        assert_eq!(v.source, vec![(0, 1)]);
    }
}
