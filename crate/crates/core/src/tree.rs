//! Reduced rooted trees with labeled leaves, and symmetric sequences of
//! decorated trees (the underlying objects of free operads and cofree
//! cooperads).

use crate::chain::ChainComplex;
use crate::error::{usage, Error, Result};
use crate::exactlin::{RatMatrix, SVec, Q};
use crate::multi::{btree_to_svec, koszul_permutation, matrix_from_fn, TensorSum};
use crate::symseq::{set_partitions, SymSeq};
use num_traits::One;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Leaves are 0-based. A canonical tree has the children of every vertex
/// sorted by their minimal leaf.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Leaf(usize),
    Node(Vec<Tree>),
}

impl Tree {
    pub fn min_leaf(&self) -> usize {
        match self {
            Tree::Leaf(i) => *i,
            Tree::Node(c) => c.iter().map(|t| t.min_leaf()).min().unwrap(),
        }
    }

    pub fn leaves(&self) -> Vec<usize> {
        match self {
            Tree::Leaf(i) => vec![*i],
            Tree::Node(c) => c.iter().flat_map(|t| t.leaves()).collect(),
        }
    }

    pub fn nleaves(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(c) => c.iter().map(|t| t.nleaves()).sum(),
        }
    }

    /// Arities of the vertices in preorder.
    pub fn vertex_arities(&self) -> Vec<usize> {
        let mut out = Vec::new();
        fn go(t: &Tree, out: &mut Vec<usize>) {
            if let Tree::Node(c) = t {
                out.push(c.len());
                for x in c {
                    go(x, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    pub fn nvertices(&self) -> usize {
        self.vertex_arities().len()
    }

    pub fn canonical(&self) -> Tree {
        match self {
            Tree::Leaf(i) => Tree::Leaf(*i),
            Tree::Node(c) => {
                let mut c: Vec<Tree> = c.iter().map(|t| t.canonical()).collect();
                c.sort_by_key(|t| t.min_leaf());
                Tree::Node(c)
            }
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Replaces leaf i by `other`, whose leaves are shifted by i; leaves of
    /// self above i shift by other.nleaves() - 1.
    pub fn graft(&self, i: usize, other: &Tree) -> Tree {
        let n = other.nleaves();
        match self {
            Tree::Leaf(j) if *j == i => other.relabel(&|x| x + i),
            Tree::Leaf(j) if *j > i => Tree::Leaf(j + n - 1),
            Tree::Leaf(j) => Tree::Leaf(*j),
            Tree::Node(c) => Tree::Node(c.iter().map(|t| t.graft(i, other)).collect()),
        }
    }

    pub fn relabel(&self, f: &dyn Fn(usize) -> usize) -> Tree {
        match self {
            Tree::Leaf(i) => Tree::Leaf(f(*i)),
            Tree::Node(c) => Tree::Node(c.iter().map(|t| t.relabel(f)).collect()),
        }
    }

    /// Nested parenthesized leaf lists with 1-based leaves, e.g. "(1 (2 3))".
    pub fn token(&self) -> String {
        match self {
            Tree::Leaf(i) => (i + 1).to_string(),
            Tree::Node(c) => format!("({})", c.iter().map(|t| t.token()).collect::<Vec<_>>().join(" ")),
        }
    }

    /// Same structure with braces and commas, usable inside labels.
    pub fn tag(&self) -> String {
        match self {
            Tree::Leaf(i) => (i + 1).to_string(),
            Tree::Node(c) => format!("{{{}}}", c.iter().map(|t| t.tag()).collect::<Vec<_>>().join(",")),
        }
    }

    pub fn parse(s: &str) -> Result<Tree> {
        let toks: Vec<String> = s.replace('(', " ( ").replace(')', " ) ").split_whitespace().map(String::from).collect();
        let mut pos = 0;
        fn go(t: &[String], pos: &mut usize) -> Result<Tree> {
            let err = || Error::Parse("bad tree token".into());
            let tok = t.get(*pos).ok_or_else(err)?;
            *pos += 1;
            if tok == "(" {
                let mut c = Vec::new();
                while t.get(*pos).map(|x| x.as_str()) != Some(")") {
                    c.push(go(t, pos)?);
                }
                *pos += 1;
                if c.len() < 2 {
                    return Err(Error::Parse("tree vertices need at least two inputs".into()));
                }
                Ok(Tree::Node(c))
            } else {
                let i: usize = tok.parse().map_err(|_| err())?;
                if i == 0 {
                    return Err(err());
                }
                Ok(Tree::Leaf(i - 1))
            }
        }
        let t = go(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(Error::Parse("trailing input in tree".into()));
        }
        let mut l = t.leaves();
        l.sort();
        if l != (0..l.len()).collect::<Vec<_>>() {
            return Err(Error::Parse("tree leaves must be 1..r".into()));
        }
        Ok(t)
    }

    /// Internal edges as (parent preorder index, child slot, child preorder index).
    pub fn internal_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let mut counter = 0;
        fn go(t: &Tree, counter: &mut usize, out: &mut Vec<(usize, usize, usize)>) {
            if let Tree::Node(c) = t {
                let me = *counter;
                *counter += 1;
                for (slot, x) in c.iter().enumerate() {
                    if let Tree::Node(_) = x {
                        out.push((me, slot, *counter));
                    }
                    go(x, counter, out);
                }
            }
        }
        go(self, &mut counter, &mut out);
        out
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

/// Canonical reduced trees on leaves 0..r whose vertex arities pass `allowed`.
pub fn enumerate_trees(r: usize, allowed: &dyn Fn(usize) -> bool) -> Vec<Tree> {
    let leaves: Vec<usize> = (0..r).collect();
    let mut out = trees_on(&leaves, allowed);
    out.sort();
    out
}

fn trees_on(s: &[usize], allowed: &dyn Fn(usize) -> bool) -> Vec<Tree> {
    if s.len() == 1 {
        return vec![Tree::Leaf(s[0])];
    }
    let mut out = Vec::new();
    for rgs in set_partitions(s.len()) {
        let k = rgs.iter().max().unwrap() + 1;
        if k < 2 || !allowed(k) {
            continue;
        }
        let mut blocks = vec![Vec::new(); k];
        for (i, b) in rgs.iter().enumerate() {
            blocks[*b].push(s[i]);
        }
        let mut acc: Vec<Vec<Tree>> = vec![Vec::new()];
        for b in &blocks {
            let sub = trees_on(b, allowed);
            acc = acc
                .into_iter()
                .flat_map(|pre| {
                    sub.iter().map(move |t| {
                        let mut p = pre.clone();
                        p.push(t.clone());
                        p
                    })
                })
                .collect();
        }
        out.extend(acc.into_iter().map(Tree::Node));
    }
    out
}

/// Planar tree whose vertices carry ids into a list of decorations.
#[derive(Clone, Debug)]
pub enum PTree {
    Leaf(usize),
    Node(usize, Vec<PTree>),
}

impl PTree {
    /// Vertex ids follow the preorder.
    pub fn from_tree(t: &Tree, first_id: usize) -> PTree {
        let mut c = first_id;
        fn go(t: &Tree, c: &mut usize) -> PTree {
            match t {
                Tree::Leaf(i) => PTree::Leaf(*i),
                Tree::Node(ch) => {
                    let id = *c;
                    *c += 1;
                    PTree::Node(id, ch.iter().map(|x| go(x, c)).collect())
                }
            }
        }
        go(t, &mut c)
    }

    pub fn min_leaf(&self) -> usize {
        match self {
            PTree::Leaf(i) => *i,
            PTree::Node(_, c) => c.iter().map(|t| t.min_leaf()).min().unwrap(),
        }
    }

    /// Replaces leaf `i` by `other` with the same leaf shifts as Tree::graft.
    pub fn graft(&self, i: usize, other: &PTree, n: usize) -> PTree {
        match self {
            PTree::Leaf(j) if *j == i => other.relabel(&|x| x + i),
            PTree::Leaf(j) if *j > i => PTree::Leaf(j + n - 1),
            PTree::Leaf(j) => PTree::Leaf(*j),
            PTree::Node(id, c) => PTree::Node(*id, c.iter().map(|t| t.graft(i, other, n)).collect()),
        }
    }

    pub fn relabel(&self, f: &dyn Fn(usize) -> usize) -> PTree {
        match self {
            PTree::Leaf(i) => PTree::Leaf(f(*i)),
            PTree::Node(id, c) => PTree::Node(*id, c.iter().map(|t| t.relabel(f)).collect()),
        }
    }
}

/// A vertex decoration: an element of gens(arity), homogeneous of `degree`.
#[derive(Clone, Debug)]
pub struct Decoration {
    pub arity: usize,
    pub vec: SVec,
    pub degree: i64,
}

/// Symmetric sequence of gens-decorated canonical trees in arities 1..=bound.
/// The tensor factors of a tree follow the preorder of its vertices.
#[derive(Clone, Debug)]
pub struct TreeModule {
    pub gens: SymSeq,
    pub bound: usize,
    pub arities: Vec<TreeArity>,
    gdeg: Vec<Vec<i64>>,
}

#[derive(Clone, Debug)]
pub struct TreeArity {
    pub trees: Vec<Tree>,
    pub sum: TensorSum,
    index: HashMap<Tree, usize>,
}

impl TreeArity {
    pub fn tree_index(&self, t: &Tree) -> Option<usize> {
        self.index.get(t).copied()
    }
}

impl TreeModule {
    pub fn new(gens: &SymSeq, bound: usize) -> Result<Self> {
        if !gens.is_reduced() {
            return usage("tree decorations must vanish in arities 0 and 1");
        }
        let gens = gens.with_bound(bound.max(gens.bound()))?;
        let nonzero: Vec<bool> = (0..=bound).map(|k| gens.arity(k).total_dim() > 0).collect();
        let mut arities = Vec::new();
        for r in 0..=bound {
            let trees = if r == 0 { Vec::new() } else { enumerate_trees(r, &|k| k <= bound && nonzero[k]) };
            let factors = trees.iter().map(|t| t.vertex_arities().iter().map(|k| gens.arity(*k).clone()).collect()).collect();
            let sum = TensorSum::new(trees.iter().map(|t| format!("t{}", t.tag())).collect(), factors)?;
            let index = trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
            arities.push(TreeArity { trees, sum, index });
        }
        let gdeg = (0..=gens.bound()).map(|k| gens.arity(k).global_degrees()).collect();
        Ok(TreeModule { gens, bound, arities, gdeg })
    }

    pub fn dim(&self, r: usize) -> usize {
        self.arities.get(r).map(|a| a.sum.len()).unwrap_or(0)
    }

    pub fn complex(&self, r: usize) -> &ChainComplex {
        &self.arities[r].sum.complex
    }

    pub fn basis(&self, r: usize, g: usize) -> (&Tree, &[usize]) {
        let a = &self.arities[r];
        let (s, tup) = a.sum.elem(g);
        (&a.trees[s], tup)
    }

    pub fn degree(&self, r: usize, g: usize) -> i64 {
        let (t, tup) = self.basis(r, g);
        t.vertex_arities().iter().zip(tup).map(|(k, i)| self.gdeg[*k][*i]).sum()
    }

    pub fn vertex_count(&self, r: usize, g: usize) -> usize {
        self.basis(r, g).0.nvertices()
    }

    /// Decorations of a basis element in preorder.
    pub fn decorations(&self, r: usize, g: usize) -> Vec<Decoration> {
        let (t, tup) = self.basis(r, g);
        t.vertex_arities()
            .iter()
            .zip(tup)
            .map(|(k, i)| Decoration { arity: *k, vec: vec![(*i, Q::one())], degree: self.gdeg[*k][*i] })
            .collect()
    }

    pub fn decoration_degree(&self, k: usize, v: &SVec) -> i64 {
        v.first().map(|(i, _)| self.gdeg[k][*i]).unwrap_or(0)
    }

    /// Adds coef · (tree `pt` decorated by `decs`, listed in tensor order) in
    /// canonical form. Children are sorted by minimal leaf, each decoration is
    /// acted on by the induced reordering of its inputs, and the Koszul sign of
    /// moving the decorations into preorder is applied.
    pub fn normalize_into(&self, out: &mut BTreeMap<usize, Q>, r: usize, pt: &PTree, decs: &[Decoration], coef: &Q) {
        let mut vecs: Vec<Option<SVec>> = decs.iter().map(|d| Some(d.vec.clone())).collect();
        let mut order = Vec::new();
        let tree = self.sort_tree(pt, &mut vecs, &mut order);
        let degs: Vec<i64> = decs.iter().map(|d| d.degree).collect();
        let sign = koszul_permutation(&degs, &order);
        let Some(s) = self.arities[r].tree_index(&tree) else { return };
        let parts: Vec<SVec> = order.iter().map(|id| vecs[*id].clone().unwrap()).collect();
        self.arities[r].sum.expand_into(out, s, &parts, &(coef * sign));
    }

    fn sort_tree(&self, pt: &PTree, vecs: &mut [Option<SVec>], order: &mut Vec<usize>) -> Tree {
        match pt {
            PTree::Leaf(i) => Tree::Leaf(*i),
            PTree::Node(id, ch) => {
                let k = ch.len();
                let mut idx: Vec<usize> = (0..k).collect();
                idx.sort_by_key(|&p| ch[p].min_leaf());
                // old slot p moves to new slot pi[p]
                let mut pi = vec![0; k];
                for (newp, &oldp) in idx.iter().enumerate() {
                    pi[oldp] = newp;
                }
                if pi.iter().enumerate().any(|(a, b)| a != *b) {
                    let v = vecs[*id].take().unwrap();
                    vecs[*id] = Some(self.gens.perm_action(k, &pi).mul_svec(&v));
                }
                order.push(*id);
                let mut kids = Vec::new();
                for &p in &idx {
                    kids.push(self.sort_tree(&ch[p], vecs, order));
                }
                Tree::Node(kids)
            }
        }
    }

    /// s_i = (i i+1) on arity r.
    pub fn transposition(&self, r: usize, i: usize) -> RatMatrix {
        let n = self.dim(r);
        matrix_from_fn(n, n, |g| {
            let (t, _) = self.basis(r, g);
            let pt = PTree::from_tree(t, 0).relabel(&|x| if x == i { i + 1 } else if x == i + 1 { i } else { x });
            let mut out = BTreeMap::new();
            self.normalize_into(&mut out, r, &pt, &self.decorations(r, g), &Q::one());
            btree_to_svec(out)
        })
    }

    /// Underlying symmetric sequence with the internal differential.
    pub fn seq(&self) -> Result<SymSeq> {
        let comps = (0..=self.bound).map(|r| self.complex(r).clone()).collect();
        let actions = (0..=self.bound).map(|r| (0..r.saturating_sub(1)).map(|i| self.transposition(r, i)).collect()).collect();
        SymSeq::new(comps, actions)
    }

    /// Grafting of basis elements x ∈ arity m and y ∈ arity n at leaf i.
    pub fn graft(&self, m: usize, x: usize, n: usize, y: usize, i: usize) -> SVec {
        let r = m + n - 1;
        if r > self.bound {
            return Vec::new();
        }
        let (t1, _) = self.basis(m, x);
        let (t2, _) = self.basis(n, y);
        let v1 = t1.nvertices();
        let p1 = PTree::from_tree(t1, 0);
        let p2 = PTree::from_tree(t2, v1);
        let pt = p1.graft(i, &p2, n);
        let mut decs = self.decorations(m, x);
        decs.extend(self.decorations(n, y));
        let mut out = BTreeMap::new();
        self.normalize_into(&mut out, r, &pt, &decs, &Q::one());
        btree_to_svec(out)
    }

    /// Index of the corolla on a generator basis element of arity k.
    pub fn corolla(&self, k: usize, i: usize) -> Option<usize> {
        let t = Tree::Node((0..k).map(Tree::Leaf).collect());
        let a = self.arities.get(k)?;
        let s = a.tree_index(&t)?;
        a.sum.index(s, &[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainComplex;

    fn double_factorial(n: i64) -> usize {
        (1..=n).rev().step_by(2).product::<i64>() as usize
    }

    #[test]
    fn tree_counts() {
        let all = |_: usize| true;
        let counts: Vec<usize> = (1..=5).map(|r| enumerate_trees(r, &all).len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 26, 236]);
        let bin = |k: usize| k == 2;
        for r in 2..=6 {
            assert_eq!(enumerate_trees(r, &bin).len(), double_factorial(2 * r as i64 - 3));
        }
        for t in enumerate_trees(4, &all) {
            assert!(t.is_canonical());
            assert_eq!(Tree::parse(&t.token()).unwrap(), t);
        }
    }

    #[test]
    fn grafting_combs() {
        let mu = Tree::Node(vec![Tree::Leaf(0), Tree::Leaf(1)]);
        let left = mu.graft(0, &mu);
        let right = mu.graft(1, &mu);
        assert_eq!(left.token(), "((1 2) 3)");
        assert_eq!(right.token(), "(1 (2 3))");
        assert!(left.is_canonical() && right.is_canonical());
        assert_eq!(left.internal_edges(), vec![(0, 0, 1)]);
    }

    #[test]
    fn free_on_binary() {
        let g = SymSeq::concentrated(2, &ChainComplex::ground(), 4, false).unwrap();
        let tm = TreeModule::new(&g, 4).unwrap();
        assert_eq!((1..=4).map(|r| tm.dim(r)).collect::<Vec<_>>(), vec![1, 1, 3, 15]);
        let s = tm.seq().unwrap();
        assert_eq!(s.arity(3).total_dim(), 3);
    }
}
