//! The bound quiver algebra A = kQ/I with an explicit path basis and
//! multiplication table, plus the constructions that stay at algebra level:
//! opposite, full subcategory eAe, quotients by two-sided ideals,
//! triangularity and annihilators.

use crate::matrix::Matrix;
use crate::quiver::{Arrow, Quiver, Relation};
use crate::scalar::{FieldSpec, Scalar};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};
use thiserror::Error;

static NEXT_ALGEBRA_ID: AtomicU64 = AtomicU64::new(1);

pub const NILPOTENCY_CAP: usize = 64;
pub const PATH_COUNT_CAP: usize = 200_000;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("ideal is not admissible: no nilpotency degree found below cap {0}")]
    NotAdmissible(usize),
    #[error("path enumeration exceeded {0} paths; quiver too wild for desk scale")]
    PathExplosion(usize),
    #[error("relation has a term of length < 2")]
    ShortRelation,
    #[error("relation terms are not parallel")]
    NotParallel,
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// One basis element: a reduced path representative. Empty `path` means the
/// trivial path e_src (src == tgt).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisPath {
    pub path: Vec<usize>,
    pub src: usize,
    pub tgt: usize,
}

impl BasisPath {
    pub fn len(&self) -> usize {
        self.path.len()
    }
}

pub type SparseVec = Vec<(usize, Scalar)>;

#[derive(Debug)]
pub struct BoundAlgebra {
    pub id: u64,
    pub field: FieldSpec,
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
    /// Reduced path representatives, ordered by (length, lexicographic on
    /// arrow indices); trivial paths come first in vertex order.
    pub basis: Vec<BasisPath>,
    /// Basis index of each trivial path e_x.
    pub unit_basis: Vec<usize>,
    /// Basis index of each arrow (arrows always survive in an admissible quotient).
    pub arrow_basis: Vec<usize>,
    /// Minimal m with rad^m = 0.
    pub nilpotency: usize,
    by_pair: BTreeMap<(usize, usize), Vec<usize>>,
    mult: Vec<SparseVec>,
    op_cache: OnceLock<Arc<BoundAlgebra>>,
}

fn path_order_key(q: &Quiver, p: &[usize]) -> (usize, Vec<usize>, usize) {
    // trivial paths tie-break by their vertex
    let v = if p.is_empty() { 0 } else { q.arrows[p[0]].src };
    (p.len(), p.to_vec(), v)
}

/// All composable paths of length <= cap, ordered by (length, lex),
/// trivial paths first in vertex order.
fn enumerate_paths(q: &Quiver, cap: usize) -> Result<Vec<BasisPath>, BuildError> {
    let mut out: Vec<BasisPath> = Vec::new();
    for x in 0..q.n_vertices() {
        out.push(BasisPath {
            path: vec![],
            src: x,
            tgt: x,
        });
    }
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    for len in 1..=cap {
        let mut next = Vec::new();
        for p in &frontier {
            let end = if p.is_empty() { None } else { Some(q.path_tgt(p)) };
            for (ai, a) in q.arrows.iter().enumerate() {
                if let Some(e) = end {
                    if a.src != e {
                        continue;
                    }
                }
                let mut np = p.clone();
                np.push(ai);
                next.push(np);
            }
        }
        if len == 1 {
            // paths of length 1 from the empty frontier: every arrow, but the
            // loop above pairs the empty path with every arrow already
            next = q.arrows.iter().enumerate().map(|(i, _)| vec![i]).collect();
        }
        next.sort();
        for p in &next {
            out.push(BasisPath {
                path: p.clone(),
                src: q.path_src(p),
                tgt: q.path_tgt(p),
            });
        }
        if out.len() > PATH_COUNT_CAP {
            return Err(BuildError::PathExplosion(PATH_COUNT_CAP));
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// Row space with "largest index is the pivot" echelon discipline, so that
/// reduction rewrites long/late paths into combinations of earlier ones.
struct TailReducer {
    dim: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl TailReducer {
    fn new(dim: usize, field: FieldSpec) -> Self {
        let _ = field;
        TailReducer {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn reduce_in_place(&self, v: &mut [Scalar]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for j in 0..self.dim {
                if !row[j].is_zero() {
                    v[j] = &v[j] - &(&f * &row[j]);
                }
            }
        }
    }

    /// Returns true when the vector enlarged the span.
    fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        self.reduce_in_place(&mut v);
        let Some(p) = (0..self.dim).rev().find(|&j| !v[j].is_zero()) else {
            return false;
        };
        let inv = v[p].inv().unwrap();
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
        for (row, &rp) in self.rows.iter_mut().zip(&self.pivots) {
            let _ = rp;
            if !row[p].is_zero() {
                let f = row[p].clone();
                for j in 0..self.dim {
                    row[j] = &row[j] - &(&f * &v[j]);
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    fn contains(&self, v: &[Scalar]) -> bool {
        let mut w = v.to_vec();
        self.reduce_in_place(&mut w);
        w.iter().all(|x| x.is_zero())
    }
}

struct ClassSpace {
    /// indices into the global path list, ascending order
    members: Vec<usize>,
    lookup: BTreeMap<Vec<usize>, usize>, // path -> position in members
    red: TailReducer,
}

fn build_class_spaces(paths: &[BasisPath], field: FieldSpec, n_vertices: usize) -> BTreeMap<(usize, usize), ClassSpace> {
    let _ = n_vertices;
    let mut classes: BTreeMap<(usize, usize), ClassSpace> = BTreeMap::new();
    for (i, bp) in paths.iter().enumerate() {
        let cls = classes.entry((bp.src, bp.tgt)).or_insert_with(|| ClassSpace {
            members: Vec::new(),
            lookup: BTreeMap::new(),
            red: TailReducer::new(0, field),
        });
        cls.lookup.insert(bp.path.clone(), cls.members.len());
        cls.members.push(i);
    }
    for cls in classes.values_mut() {
        cls.red = TailReducer::new(cls.members.len(), field);
    }
    classes
}

/// Builds the bound quiver algebra. Finds the minimal m with rad^m contained
/// in the ideal, then reduces paths of length < m by the truncated ideal.
pub fn build_algebra(
    quiver: Quiver,
    relations: Vec<Relation>,
    field: FieldSpec,
) -> Result<Arc<BoundAlgebra>, BuildError> {
    for r in &relations {
        if r.terms.iter().any(|(_, p)| p.len() < 2) {
            return Err(BuildError::ShortRelation);
        }
        let (s, t) = (r.src(&quiver), r.tgt(&quiver));
        if r.terms
            .iter()
            .any(|(_, p)| quiver.path_src(p) != s || quiver.path_tgt(p) != t)
        {
            return Err(BuildError::NotParallel);
        }
    }

    let max_rel_len = relations
        .iter()
        .flat_map(|r| r.terms.iter().map(|(_, p)| p.len()))
        .max()
        .unwrap_or(0);

    // search for the nilpotency degree
    let mut m_found: Option<usize> = None;
    let mut lambda = max_rel_len.max(2);
    while lambda <= NILPOTENCY_CAP {
        let paths = enumerate_paths(&quiver, lambda)?;
        let mut classes = build_class_spaces(&paths, field, quiver.n_vertices());
        // exact ideal span: products p * rho * q with every term of length <= lambda
        for rel in &relations {
            let rel_src = rel.src(&quiver);
            let rel_tgt = rel.tgt(&quiver);
            let rmax: usize = rel.terms.iter().map(|(_, p)| p.len()).max().unwrap();
            for left in &paths {
                if left.tgt != rel_src || left.len() + rmax > lambda {
                    continue;
                }
                for right in &paths {
                    if right.src != rel_tgt || left.len() + rmax + right.len() > lambda {
                        continue;
                    }
                    let cls = classes.get_mut(&(left.src, right.tgt)).unwrap();
                    let mut v = vec![field.zero(); cls.members.len()];
                    for (c, w) in &rel.terms {
                        let mut full = left.path.clone();
                        full.extend_from_slice(w);
                        full.extend_from_slice(&right.path);
                        let pos = *cls.lookup.get(&full).expect("composable product path");
                        v[pos] = &v[pos] + c;
                    }
                    cls.red.insert(v);
                }
            }
        }
        // smallest m <= lambda with every length-m path in the span
        'search: for m in 1..=lambda {
            if m == 1 && quiver.n_arrows() > 0 {
                continue;
            }
            for (i, bp) in paths.iter().enumerate() {
                let _ = i;
                if bp.len() != m {
                    continue;
                }
                let cls = &classes[&(bp.src, bp.tgt)];
                let pos = cls.lookup[&bp.path];
                let mut unit = vec![field.zero(); cls.members.len()];
                unit[pos] = field.one();
                if !cls.red.contains(&unit) {
                    continue 'search;
                }
            }
            m_found = Some(m);
            break;
        }
        if m_found.is_some() {
            break;
        }
        lambda += 1;
    }
    let m = m_found.ok_or(BuildError::NotAdmissible(NILPOTENCY_CAP))?;

    // quotient space over paths of length < m
    let paths = enumerate_paths(&quiver, m.saturating_sub(1))?;
    let mut classes = build_class_spaces(&paths, field, quiver.n_vertices());
    for rel in &relations {
        let rel_src = rel.src(&quiver);
        let rel_tgt = rel.tgt(&quiver);
        let rmin: usize = rel.terms.iter().map(|(_, p)| p.len()).min().unwrap();
        for left in paths.iter().filter(|p| p.tgt == rel_src) {
            if left.len() + rmin >= m {
                continue;
            }
            for right in paths.iter().filter(|p| p.src == rel_tgt) {
                if left.len() + rmin + right.len() >= m {
                    continue;
                }
                let cls = classes.get_mut(&(left.src, right.tgt)).unwrap();
                let mut v = vec![field.zero(); cls.members.len()];
                let mut nonzero = false;
                for (c, w) in &rel.terms {
                    if left.len() + w.len() + right.len() >= m {
                        continue; // dies in rad^m
                    }
                    let mut full = left.path.clone();
                    full.extend_from_slice(w);
                    full.extend_from_slice(&right.path);
                    let pos = *cls.lookup.get(&full).expect("composable product path");
                    v[pos] = &v[pos] + c;
                    nonzero = true;
                }
                if nonzero {
                    cls.red.insert(v);
                }
            }
        }
    }

    // surviving basis: non-pivot paths per class, in global path order
    let mut is_pivot = vec![false; paths.len()];
    for cls in classes.values() {
        for &p in &cls.red.pivots {
            is_pivot[cls.members[p]] = true;
        }
    }
    let mut basis: Vec<BasisPath> = Vec::new();
    let mut global_of_path: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (i, bp) in paths.iter().enumerate() {
        if !is_pivot[i] {
            global_of_path.insert(bp.path.clone(), basis.len());
            basis.push(bp.clone());
        }
    }
    basis.sort_by(|a, b| path_order_key(&quiver, &a.path).cmp(&path_order_key(&quiver, &b.path)));
    global_of_path.clear();
    for (i, bp) in basis.iter().enumerate() {
        global_of_path.insert(bp.path.clone(), i);
    }

    let unit_basis: Vec<usize> = (0..quiver.n_vertices())
        .map(|x| {
            basis
                .iter()
                .position(|b| b.path.is_empty() && b.src == x)
                .expect("trivial paths survive")
        })
        .collect();
    let arrow_basis: Vec<usize> = (0..quiver.n_arrows())
        .map(|a| {
            basis
                .iter()
                .position(|b| b.path.as_slice() == [a])
                .expect("arrows survive an admissible quotient")
        })
        .collect();

    let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, b) in basis.iter().enumerate() {
        by_pair.entry((b.src, b.tgt)).or_default().push(i);
    }

    // reduction of an arbitrary short path into basis coordinates
    let reduce_path = |p: &[usize]| -> SparseVec {
        if p.len() >= m {
            return Vec::new();
        }
        let (s, t) = if p.is_empty() {
            unreachable!()
        } else {
            (quiver.path_src(p), quiver.path_tgt(p))
        };
        let cls = &classes[&(s, t)];
        let pos = cls.lookup[p.to_vec().as_slice()];
        let mut v = vec![field.zero(); cls.members.len()];
        v[pos] = field.one();
        cls.red.reduce_in_place(&mut v);
        let mut out = Vec::new();
        for (j, c) in v.iter().enumerate() {
            if !c.is_zero() {
                let g = global_of_path[&paths[cls.members[j]].path];
                out.push((g, c.clone()));
            }
        }
        out.sort_by_key(|(g, _)| *g);
        out
    };

    let n = basis.len();
    let mut mult: Vec<SparseVec> = vec![Vec::new(); n * n];
    for i in 0..n {
        for j in 0..n {
            if basis[i].tgt != basis[j].src {
                continue;
            }
            let prod: SparseVec = if basis[i].path.is_empty() {
                vec![(j, field.one())]
            } else if basis[j].path.is_empty() {
                vec![(i, field.one())]
            } else {
                let mut p = basis[i].path.clone();
                p.extend_from_slice(&basis[j].path);
                reduce_path(&p)
            };
            mult[i * n + j] = prod;
        }
    }

    Ok(Arc::new(BoundAlgebra {
        id: NEXT_ALGEBRA_ID.fetch_add(1, Ordering::Relaxed),
        field,
        quiver,
        relations,
        basis,
        unit_basis,
        arrow_basis,
        nilpotency: m,
        by_pair,
        mult,
        op_cache: OnceLock::new(),
    }))
}

/// Dense coordinate vector over the algebra basis.
pub type AlgElem = Vec<Scalar>;

impl BoundAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn pair_basis(&self, s: usize, t: usize) -> &[usize] {
        self.by_pair.get(&(s, t)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn mult_coords(&self, i: usize, j: usize) -> &SparseVec {
        &self.mult[i * self.dim() + j]
    }

    pub fn zero_elem(&self) -> AlgElem {
        vec![self.field.zero(); self.dim()]
    }

    pub fn basis_elem(&self, i: usize) -> AlgElem {
        let mut v = self.zero_elem();
        v[i] = self.field.one();
        v
    }

    pub fn unit_elem(&self) -> AlgElem {
        let mut v = self.zero_elem();
        for &e in &self.unit_basis {
            v[e] = self.field.one();
        }
        v
    }

    pub fn mul_elems(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        let mut out = self.zero_elem();
        for (i, ca) in a.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                for (k, c) in self.mult_coords(i, j) {
                    out[*k] = &out[*k] + &(&(ca * cb) * c);
                }
            }
        }
        out
    }

    pub fn elem_display(&self, v: &AlgElem) -> String {
        let mut parts = Vec::new();
        for (i, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = if self.basis[i].path.is_empty() {
                format!("e{}", self.quiver.vertices[self.basis[i].src])
            } else {
                self.quiver.path_display(&self.basis[i].path)
            };
            parts.push(format!("{}*{}", c, name));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Opposite algebra: pure data transform (reversed paths, transposed
    /// multiplication). Applying it twice returns an identical copy.
    pub fn opposite(self: &Arc<Self>) -> Arc<BoundAlgebra> {
        let n = self.dim();
        let mut mult = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                mult[i * n + j] = self.mult[j * n + i].clone();
            }
        }
        let basis: Vec<BasisPath> = self
            .basis
            .iter()
            .map(|b| BasisPath {
                path: b.path.iter().rev().cloned().collect(),
                src: b.tgt,
                tgt: b.src,
            })
            .collect();
        let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, b) in basis.iter().enumerate() {
            by_pair.entry((b.src, b.tgt)).or_default().push(i);
        }
        Arc::new(BoundAlgebra {
            id: NEXT_ALGEBRA_ID.fetch_add(1, Ordering::Relaxed),
            field: self.field,
            quiver: self.quiver.opposite(),
            relations: self.relations.iter().map(Relation::reversed).collect(),
            basis,
            unit_basis: self.unit_basis.clone(),
            arrow_basis: self.arrow_basis.clone(),
            nilpotency: self.nilpotency,
            by_pair,
            mult,
            op_cache: OnceLock::new(),
        })
    }

    /// Cached opposite algebra: `a.op().op()` is pointer-identical to `a`,
    /// so double duals live over the same algebra value.
    pub fn op(self: &Arc<Self>) -> Arc<BoundAlgebra> {
        self.op_cache
            .get_or_init(|| {
                let o = self.opposite();
                let _ = o.op_cache.set(self.clone());
                o
            })
            .clone()
    }

    /// True iff no cycle through distinct vertices exists in the nonzero-hom
    /// digraph, and no vertex carries a nontrivial path back to itself.
    pub fn is_triangular(&self) -> bool {
        let n = self.quiver.n_vertices();
        for x in 0..n {
            if self.pair_basis(x, x).len() > 1 {
                return false;
            }
        }
        // DFS cycle detection on edges x -> y with e_x A e_y != 0, x != y
        let mut color = vec![0u8; n];
        fn dfs(v: usize, color: &mut [u8], alg: &BoundAlgebra) -> bool {
            color[v] = 1;
            for y in 0..color.len() {
                if y != v && !alg.pair_basis(v, y).is_empty() {
                    match color[y] {
                        1 => return false,
                        0 => {
                            if !dfs(y, color, alg) {
                                return false;
                            }
                        }
                        _ => {}
                    }
                }
            }
            color[v] = 2;
            true
        }
        for v in 0..n {
            if color[v] == 0 && !dfs(v, &mut color, self) {
                return false;
            }
        }
        true
    }

    pub fn is_connected(&self) -> bool {
        self.quiver.components().len() <= 1
    }
}

/// An algebra constructed inside a parent: full subcategory eAe or a quotient
/// A/I. Records how new generators sit in the parent.
pub struct AlgebraMap {
    pub algebra: Arc<BoundAlgebra>,
    pub parent_id: u64,
    /// new vertex index -> parent vertex index
    pub vertex_parent: Vec<usize>,
    /// new arrow index -> element of the parent (dense coords)
    pub arrow_images: Vec<AlgElem>,
}

struct QuotientSpace<'a> {
    parent: &'a BoundAlgebra,
    keep: Vec<bool>,     // parent basis indices kept (endpoint filter)
    red: TailReducer,    // ideal reducer over full parent coordinates
}

impl<'a> QuotientSpace<'a> {
    fn project(&self, v: &AlgElem) -> AlgElem {
        let mut w = v.clone();
        for (i, k) in self.keep.iter().enumerate() {
            if !k {
                w[i] = self.parent.field.zero();
            }
        }
        self.red.reduce_in_place(&mut w);
        w
    }

    fn mul(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        self.project(&self.parent.mul_elems(a, b))
    }
}

fn present_inside(
    parent: &Arc<BoundAlgebra>,
    vertices: &[usize],
    ideal_rows: &[AlgElem],
) -> Result<AlgebraMap, BuildError> {
    let field = parent.field;
    let dim = parent.dim();
    let keep: Vec<bool> = parent
        .basis
        .iter()
        .map(|b| vertices.contains(&b.src) && vertices.contains(&b.tgt))
        .collect();

    // block-decompose the ideal: e_s v e_t stays in a two-sided ideal
    let mut red = TailReducer::new(dim, field);
    for row in ideal_rows {
        let mut blocks: BTreeMap<(usize, usize), AlgElem> = BTreeMap::new();
        for (i, c) in row.iter().enumerate() {
            if c.is_zero() || !keep[i] {
                continue;
            }
            let key = (parent.basis[i].src, parent.basis[i].tgt);
            let entry = blocks
                .entry(key)
                .or_insert_with(|| vec![field.zero(); dim]);
            entry[i] = c.clone();
        }
        for (_, v) in blocks {
            red.insert(v);
        }
    }
    let qs = QuotientSpace {
        parent,
        keep,
        red,
    };

    // surviving vertices: idempotents not killed by the ideal
    let mut vmap = Vec::new();
    for &x in vertices {
        let e = qs.project(&parent.basis_elem(parent.unit_basis[x]));
        if e.iter().any(|c| !c.is_zero()) {
            vmap.push(x);
        }
    }

    // radical of the quotient = image of the parent radical; arrows = a basis
    // of rad/rad^2 per vertex pair, representatives in parent basis order
    let mut rad_gens: Vec<(usize, usize, AlgElem)> = Vec::new(); // (src,tgt,elem)
    for (i, b) in parent.basis.iter().enumerate() {
        if b.path.is_empty() || !qs.keep[i] {
            continue;
        }
        let v = qs.project(&parent.basis_elem(i));
        if v.iter().any(|c| !c.is_zero()) {
            rad_gens.push((b.src, b.tgt, v));
        }
    }
    // rad^2 spans per pair
    let mut rad2: BTreeMap<(usize, usize), TailReducer> = BTreeMap::new();
    for (s1, _, a) in &rad_gens {
        for (_, t2, b) in &rad_gens {
            let prod = qs.mul(a, b);
            if prod.iter().all(|c| c.is_zero()) {
                continue;
            }
            rad2.entry((*s1, *t2))
                .or_insert_with(|| TailReducer::new(dim, field))
                .insert(prod);
        }
    }
    let mut arrows: Vec<Arrow> = Vec::new();
    let mut arrow_images: Vec<AlgElem> = Vec::new();
    {
        let mut span: BTreeMap<(usize, usize), TailReducer> = BTreeMap::new();
        for (s, t, v) in &rad_gens {
            let r = span.entry((*s, *t)).or_insert_with(|| {
                let mut init = TailReducer::new(dim, field);
                if let Some(r2) = rad2.get(&(*s, *t)) {
                    for row in &r2.rows {
                        init.insert(row.clone());
                    }
                }
                init
            });
            if r.insert(v.clone()) {
                let ns = vmap.iter().position(|&x| x == *s);
                let nt = vmap.iter().position(|&x| x == *t);
                if let (Some(ns), Some(nt)) = (ns, nt) {
                    arrows.push(Arrow {
                        name: format!("g{}", arrows.len() + 1),
                        src: ns,
                        tgt: nt,
                    });
                    arrow_images.push(v.clone());
                }
            }
        }
    }

    let new_quiver = Quiver {
        vertices: vmap
            .iter()
            .map(|&x| parent.quiver.vertices[x].clone())
            .collect(),
        arrows,
    };

    // FGLM-style relation extraction: walk new paths by (length, lex); a path
    // whose evaluation depends on accepted ones yields a relation and is cut
    let mut accepted: Vec<(Vec<usize>, (usize, usize))> = Vec::new(); // (path, (s,t)) in new quiver
    let mut evals: BTreeMap<(usize, usize), (Vec<Vec<usize>>, TailReducer, Vec<AlgElem>)> =
        BTreeMap::new();
    let mut relations: Vec<Relation> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = (0..new_quiver.n_arrows()).map(|a| vec![a]).collect();
    frontier.sort();
    for a in &frontier {
        let (s, t) = (new_quiver.path_src(a), new_quiver.path_tgt(a));
        let entry = evals
            .entry((s, t))
            .or_insert_with(|| (Vec::new(), TailReducer::new(dim, field), Vec::new()));
        entry.0.push(a.clone());
        entry.1.insert(arrow_images[a[0]].clone());
        entry.2.push(arrow_images[a[0]].clone());
        accepted.push((a.clone(), (s, t)));
    }
    let mut guard = 0usize;
    while !frontier.is_empty() {
        guard += 1;
        if guard > dim + 2 {
            return Err(BuildError::Internal(
                "presentation path search did not terminate".into(),
            ));
        }
        let mut next = Vec::new();
        for p in &frontier {
            let t = new_quiver.path_tgt(p);
            for (ai, a) in new_quiver.arrows.iter().enumerate() {
                if a.src != t {
                    continue;
                }
                let mut np = p.clone();
                np.push(ai);
                next.push(np);
            }
        }
        next.sort();
        frontier = Vec::new();
        for p in next {
            let (s, t) = (new_quiver.path_src(&p), new_quiver.path_tgt(&p));
            // evaluate in the quotient
            let mut v = qs.project(&parent.basis_elem(parent.unit_basis[vmap[s]]));
            for &ai in &p {
                v = qs.mul(&v, &arrow_images[ai]);
            }
            let entry = evals
                .entry((s, t))
                .or_insert_with(|| (Vec::new(), TailReducer::new(dim, field), Vec::new()));
            if v.iter().all(|c| c.is_zero()) {
                relations.push(Relation {
                    terms: vec![(field.one(), p.clone())],
                });
                continue;
            }
            let before = entry.1.rows.len();
            let enlarged = entry.1.insert(v.clone());
            let _ = before;
            if enlarged {
                entry.0.push(p.clone());
                entry.2.push(v);
                frontier.push(p);
            } else {
                // dependency: express v in accepted evaluations of this class
                let basis_mat = Matrix::from_rows(entry.2.clone(), dim, field);
                let target = Matrix::from_rows(vec![v], dim, field);
                let x = Matrix::express_rows(&basis_mat, &target).ok_or_else(|| {
                    BuildError::Internal("dependent path not in accepted span".into())
                })?;
                let mut terms = vec![(field.one(), p.clone())];
                for (j, q) in entry.0.iter().enumerate() {
                    let c = x.get(0, j).clone();
                    if !c.is_zero() {
                        terms.push((c.neg(), q.clone()));
                    }
                }
                if terms.iter().any(|(_, q)| q.len() < 2) {
                    return Err(BuildError::Internal(
                        "presentation produced a non-admissible relation".into(),
                    ));
                }
                relations.push(Relation { terms });
            }
        }
    }

    let algebra = build_algebra(new_quiver, relations, field)?;
    // dimension audit: the new algebra must match the quotient space size
    let expected: usize = {
        let mut count = 0usize;
        let mut seen: BTreeMap<(usize, usize), TailReducer> = BTreeMap::new();
        for (i, b) in parent.basis.iter().enumerate() {
            if !qs.keep[i] {
                continue;
            }
            let v = qs.project(&parent.basis_elem(i));
            if v.iter().all(|c| c.is_zero()) {
                continue;
            }
            let r = seen
                .entry((b.src, b.tgt))
                .or_insert_with(|| TailReducer::new(dim, field));
            if r.insert(v) {
                count += 1;
            }
        }
        count
    };
    if algebra.dim() != expected {
        return Err(BuildError::Internal(format!(
            "presentation dimension mismatch: rebuilt {} vs quotient {}",
            algebra.dim(),
            expected
        )));
    }

    Ok(AlgebraMap {
        algebra,
        parent_id: parent.id,
        vertex_parent: vmap,
        arrow_images,
    })
}

/// Full subcategory eAe on the chosen vertices, re-presented as a bound
/// quiver algebra. Multiplication closure on the selected basis is automatic
/// for path-basis algebras and audited during construction.
pub fn full_subcategory(
    parent: &Arc<BoundAlgebra>,
    vertices: &[usize],
) -> Result<AlgebraMap, BuildError> {
    assert!(!vertices.is_empty(), "vertex subset must be nonempty");
    let mut vs: Vec<usize> = vertices.to_vec();
    vs.sort_unstable();
    vs.dedup();
    present_inside(parent, &vs, &[])
}

/// Quotient of A by a two-sided ideal given by spanning rows.
pub fn quotient_by_ideal(
    parent: &Arc<BoundAlgebra>,
    ideal_rows: &[AlgElem],
) -> Result<AlgebraMap, BuildError> {
    let all: Vec<usize> = (0..parent.quiver.n_vertices()).collect();
    present_inside(parent, &all, ideal_rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::parse_spec;

    pub fn alg(text: &str) -> Arc<BoundAlgebra> {
        let (q, r, f) = parse_spec(text).unwrap();
        build_algebra(q, r, f).unwrap()
    }

    pub const EX22B: &str = "field Q\nvertex 1 2 3 4 5\narrow b1 2 1\narrow b2 3 2\narrow b3 4 3\narrow b4 5 4\nrel rad2\n";
    pub const KRON: &str = "field Q\nvertex 1 2\narrow a 1 2\narrow b 1 2\n";

    #[test]
    fn chain_dimension_and_nilpotency() {
        let a = alg(EX22B);
        assert_eq!(a.dim(), 9); // 5 trivial paths + 4 arrows
        assert_eq!(a.nilpotency, 2);
    }

    #[test]
    fn semisimple_and_kronecker() {
        let a = alg("field Q\nvertex 1\n");
        assert_eq!((a.dim(), a.nilpotency), (1, 1));
        let k = alg(KRON);
        assert_eq!((k.dim(), k.nilpotency), (4, 2));
    }

    #[test]
    fn mixed_length_relation() {
        // d is a shortcut for the composite a.b; relation d.c = a.b.c
        let a = alg(
            "field Q\nvertex 1 2 3 4\narrow a 1 2\narrow b 2 3\narrow c 3 4\narrow d 1 3\nrel 1*d.c + -1*a.b.c\n",
        );
        // 12 paths, one dependency
        assert_eq!(a.dim(), 11);
    }

    #[test]
    fn idempotents_are_orthogonal_and_sum_to_one() {
        let a = alg(EX22B);
        let one = a.unit_elem();
        for x in 0..5 {
            for y in 0..5 {
                let ex = a.basis_elem(a.unit_basis[x]);
                let ey = a.basis_elem(a.unit_basis[y]);
                let prod = a.mul_elems(&ex, &ey);
                if x == y {
                    assert_eq!(prod, ex);
                } else {
                    assert!(prod.iter().all(|c| c.is_zero()));
                }
            }
        }
        for i in 0..a.dim() {
            let b = a.basis_elem(i);
            assert_eq!(a.mul_elems(&one, &b), b);
            assert_eq!(a.mul_elems(&b, &one), b);
        }
    }

    #[test]
    fn associativity_exhaustive_at_desk_scale() {
        for text in [EX22B, KRON] {
            let a = alg(text);
            let n = a.dim();
            assert!(n <= 64);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let ij = a.mul_elems(&a.basis_elem(i), &a.basis_elem(j));
                        let jk = a.mul_elems(&a.basis_elem(j), &a.basis_elem(k));
                        let left = a.mul_elems(&ij, &a.basis_elem(k));
                        let right = a.mul_elems(&a.basis_elem(i), &jk);
                        assert_eq!(left, right);
                    }
                }
            }
        }
    }

    #[test]
    fn opposite_is_an_involution() {
        let a = alg(EX22B);
        let op = a.opposite();
        assert_eq!(op.dim(), 9);
        let opop = op.opposite();
        assert_eq!(opop.basis, a.basis);
        assert_eq!(opop.quiver, a.quiver);
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                assert_eq!(opop.mult_coords(i, j), a.mult_coords(i, j));
            }
        }
    }

    #[test]
    fn build_is_deterministic() {
        let a = alg(EX22B);
        let b = alg(EX22B);
        assert_eq!(a.basis, b.basis);
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                assert_eq!(a.mult_coords(i, j), b.mult_coords(i, j));
            }
        }
    }

    #[test]
    fn full_subcategory_examples() {
        let a = alg(EX22B);
        // {1,2,3}: A3 chain with rad^2 = 0, dim 5
        let sub = full_subcategory(&a, &[0, 1, 2]).unwrap();
        assert_eq!(sub.algebra.dim(), 5);
        assert_eq!(sub.algebra.quiver.n_arrows(), 2);
        assert_eq!(sub.algebra.nilpotency, 2);
        // {1,3,5}: no surviving arrows, semisimple of dim 3
        let sub = full_subcategory(&a, &[0, 2, 4]).unwrap();
        assert_eq!(sub.algebra.dim(), 3);
        assert_eq!(sub.algebra.quiver.n_arrows(), 0);
        // full subset: same algebra
        let sub = full_subcategory(&a, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(sub.algebra.dim(), 9);
        assert_eq!(sub.algebra.quiver.n_arrows(), 4);
    }

    #[test]
    fn full_subcategory_is_transitive() {
        let a = alg(EX22B);
        let mid = full_subcategory(&a, &[0, 1, 2, 3]).unwrap();
        let nested = full_subcategory(&mid.algebra, &[0, 1, 2]).unwrap();
        let direct = full_subcategory(&a, &[0, 1, 2]).unwrap();
        assert_eq!(nested.algebra.dim(), direct.algebra.dim());
        assert_eq!(
            nested.algebra.quiver.n_arrows(),
            direct.algebra.quiver.n_arrows()
        );
        assert_eq!(nested.algebra.nilpotency, direct.algebra.nilpotency);
    }

    #[test]
    fn triangularity() {
        assert!(alg(EX22B).is_triangular());
        assert!(alg(KRON).is_triangular());
        let loopy = alg("field Q\nvertex 1\narrow l 1 1\nrel 1*l.l\n");
        assert_eq!(loopy.dim(), 2);
        assert!(!loopy.is_triangular());
    }
}
