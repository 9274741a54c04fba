//! Hochschild cohomology (degree 0 as the center, degree 1 as derivations
//! modulo inner derivations, higher degrees through a vertex-relative reduced
//! bar complex), maximal filtrations through one-point coextensions,
//! separating points, tree type, the fundamental-group presentation export,
//! and the simple-connectedness verdict.

use crate::algebra::{full_subcategory, BoundAlgebra};
use crate::analysis::{classify, Classification, ClassifyResult, Confidence};
use crate::arknit::{knit, orbit_graph, Seeds};
use crate::homology::ext_dim;
use crate::matrix::Matrix;
use crate::parts::{MembershipEngine, SigmaSets, Status};
use crate::rep::{
    decompose, hom_dim, one_point_extension, radical, restrict_along, RepError,
    Representation,
};
use crate::scalar::Scalar;
use serde::Serialize;
use std::collections::BTreeSet;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HhError {
    #[error("cochain dimension {0} exceeds the hard cap in degree {1}")]
    CochainBlowup(usize, usize),
    #[error("filtration failed: {0}")]
    Filtration(String),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// Center dimension: solutions of z a = a z against the generators.
pub fn hh0_dim(alg: &Arc<BoundAlgebra>) -> usize {
    let field = alg.field;
    let d = alg.dim();
    let mut gens: Vec<usize> = alg.unit_basis.clone();
    gens.extend(alg.arrow_basis.iter().copied());
    let mut sys = Matrix::zeros(d, gens.len() * d, field);
    for zi in 0..d {
        let z = alg.basis_elem(zi);
        for (gi, &g) in gens.iter().enumerate() {
            let ge = alg.basis_elem(g);
            let zg = alg.mul_elems(&z, &ge);
            let gz = alg.mul_elems(&ge, &z);
            for k in 0..d {
                sys.set(zi, gi * d + k, &zg[k] - &gz[k]);
            }
        }
    }
    sys.kernel_rows().rows
}

/// Dimensions of the derivation space, the inner derivations, and their
/// difference HH^1.
pub fn hh1_data(alg: &Arc<BoundAlgebra>) -> (usize, usize, usize) {
    let field = alg.field;
    let d = alg.dim();
    let nv = alg.quiver.n_vertices();
    let na = alg.quiver.n_arrows();
    // unknowns: d(e_x) and d(alpha) as dense algebra elements
    let nu = (nv + na) * d;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let zero_row = || vec![field.zero(); nu];
    let slot = |g: usize, k: usize| g * d + k;
    // each equation contributes d rows, one per basis coordinate of A; a term
    // (g, w, left) stands for w * d(g) when left, d(g) * w otherwise
    let mut push_eq = |terms: &[(usize, Vec<Scalar>, bool)]| {
        // each term: (generator slot g, fixed element w, left?) meaning
        // w * d(g) when left, else d(g) * w
        let mut eq_rows = vec![zero_row(); d];
        for (g, w, left) in terms {
            for k in 0..d {
                // d(g) = sum_k c_k b_k; term contributes w*b_k or b_k*w
                let bk = alg.basis_elem(k);
                let prod = if *left {
                    alg.mul_elems(w, &bk)
                } else {
                    alg.mul_elems(&bk, w)
                };
                for (coord, val) in prod.iter().enumerate() {
                    if !val.is_zero() {
                        eq_rows[coord][slot(*g, k)] =
                            &eq_rows[coord][slot(*g, k)] + val;
                    }
                }
            }
        }
        rows.extend(eq_rows);
    };
    let neg = field.from_i64(-1);
    let unit_elem = |x: usize| alg.basis_elem(alg.unit_basis[x]);
    let scale_elem = |e: &[Scalar], c: &Scalar| -> Vec<Scalar> {
        e.iter().map(|v| v * c).collect()
    };
    // (a) d(e_x) - d(e_x) e_x - e_x d(e_x) = 0
    for x in 0..nv {
        let ex = unit_elem(x);
        push_eq(&[
            (x, alg.unit_elem(), true),                 // d(e_x) as 1 * d(e_x)
            (x, scale_elem(&ex, &neg), false),          // - d(e_x) e_x
            (x, scale_elem(&ex, &neg), true),           // - e_x d(e_x)
        ]);
    }
    // (b) orthogonality: d(e_x) e_y + e_x d(e_y) = 0 for x != y
    for x in 0..nv {
        for y in 0..nv {
            if x == y {
                continue;
            }
            push_eq(&[
                (x, unit_elem(y), false),
                (y, unit_elem(x), true),
            ]);
        }
    }
    // (c) compatibility with the arrow supports: for alpha: s -> t,
    //     d(alpha) = d(e_s) alpha + e_s d(alpha) and
    //     d(alpha) = d(alpha) e_t + alpha d(e_t)
    for (ai, a) in alg.quiver.arrows.iter().enumerate() {
        let g = nv + ai;
        let alpha = alg.basis_elem(alg.arrow_basis[ai]);
        push_eq(&[
            (g, alg.unit_elem(), true),
            (a.src, scale_elem(&alpha, &neg), false),
            (g, scale_elem(&unit_elem(a.src), &neg), true),
        ]);
        push_eq(&[
            (g, alg.unit_elem(), true),
            (g, scale_elem(&unit_elem(a.tgt), &neg), false),
            (a.tgt, scale_elem(&alpha, &neg), true),
        ]);
    }
    // (d) relations: d(rho) = 0 with the Leibniz expansion along each path,
    // d(a_1...a_k) = sum_i (a_1..a_{i-1}) d(a_i) (a_{i+1}..a_k)
    for rel in &alg.relations {
        let mut eq_rows = vec![zero_row(); d];
        for (c, w) in &rel.terms {
            for i in 0..w.len() {
                // prefix and suffix as algebra elements
                let fold = |arrs: &[usize], unit_at: usize| -> Vec<Scalar> {
                    let mut acc: Option<Vec<Scalar>> = None;
                    for &aj in arrs {
                        let e = alg.basis_elem(alg.arrow_basis[aj]);
                        acc = Some(match acc {
                            None => e,
                            Some(p) => alg.mul_elems(&p, &e),
                        });
                    }
                    acc.unwrap_or_else(|| unit_elem(unit_at))
                };
                let pre = fold(&w[..i], alg.quiver.arrows[w[i]].src);
                let suf = fold(&w[i + 1..], alg.quiver.arrows[w[i]].tgt);
                let g = nv + w[i];
                for k in 0..d {
                    let bk = alg.basis_elem(k);
                    let prod = alg.mul_elems(&alg.mul_elems(&pre, &bk), &suf);
                    for (coord, val) in prod.iter().enumerate() {
                        if !val.is_zero() {
                            eq_rows[coord][slot(g, k)] =
                                &eq_rows[coord][slot(g, k)] + &(val * c);
                        }
                    }
                }
            }
        }
        rows.extend(eq_rows);
    }
    let sys = Matrix::from_rows(rows, nu, field);
    let der_dim = nu - sys.rank();
    let hh0 = hh0_dim(alg);
    let inner = alg.dim() - hh0;
    (der_dim, inner, der_dim - inner)
}

pub fn hh1_dim(alg: &Arc<BoundAlgebra>) -> usize {
    hh1_data(alg).2
}

#[derive(Debug, Clone, Serialize)]
pub struct CohomologyRecord {
    pub dims: Vec<usize>,
    pub methods: Vec<String>,
}

pub const COCHAIN_HARD_CAP: usize = 60_000;
pub const DEFAULT_HH_CAP: usize = 5;

/// Hochschild cohomology dimensions in degrees 0..=cap through the reduced
/// bar complex relative to the vertex span. Degrees 0 and 1 must agree with
/// the direct center and derivation computations; the record carries both
/// methods.
pub fn hh_dims_relative(alg: &Arc<BoundAlgebra>, cap: usize) -> Result<CohomologyRecord, HhError> {
    assert!(cap >= 2, "cap must be at least 2");
    let field = alg.field;
    let dim = alg.dim();
    // radical basis elements (non-trivial paths) with their endpoints
    let rad: Vec<usize> = (0..dim).filter(|&i| !alg.basis[i].path.is_empty()).collect();
    // tuples[n] = composable n-tuples of radical basis indices
    let mut tuples: Vec<Vec<Vec<usize>>> = vec![vec![vec![]]];
    for n in 1..=(cap + 1) {
        let mut next = Vec::new();
        if n == 1 {
            for &r in &rad {
                next.push(vec![r]);
            }
        } else {
            for t in &tuples[n - 1] {
                let last_tgt = alg.basis[*t.last().unwrap()].tgt;
                for &r in &rad {
                    if alg.basis[r].src == last_tgt {
                        let mut nt = t.clone();
                        nt.push(r);
                        next.push(nt);
                    }
                }
            }
        }
        tuples.push(next);
    }
    // C^n basis: (tuple, coordinate of e_src A e_tgt)
    let block = |s: usize, t: usize| alg.pair_basis(s, t).to_vec();
    let space: Vec<Vec<(Vec<usize>, usize)>> = (0..=(cap + 1))
        .map(|n| {
            let mut out = Vec::new();
            if n == 0 {
                for x in 0..alg.quiver.n_vertices() {
                    for &b in &block(x, x) {
                        out.push((vec![], b));
                    }
                }
            } else {
                for t in &tuples[n] {
                    let s = alg.basis[t[0]].src;
                    let e = alg.basis[*t.last().unwrap()].tgt;
                    for &b in &block(s, e) {
                        out.push((t.clone(), b));
                    }
                }
            }
            out
        })
        .collect();
    for (n, sp) in space.iter().enumerate() {
        if sp.len() > COCHAIN_HARD_CAP {
            return Err(HhError::CochainBlowup(sp.len(), n));
        }
    }
    // index maps
    let index: Vec<std::collections::BTreeMap<(Vec<usize>, usize), usize>> = space
        .iter()
        .map(|sp| {
            sp.iter()
                .enumerate()
                .map(|(i, k)| (k.clone(), i))
                .collect()
        })
        .collect();
    // differential C^n -> C^{n+1}: rows indexed by C^n basis, columns by
    // C^{n+1}; entry = coefficient of delta(f_basis) on the target basis
    let delta = |n: usize| -> Matrix {
        let rows = space[n].len();
        let cols = space[n + 1].len();
        let mut m = Matrix::zeros(rows, cols, field);
        for (ri, (tup, b)) in space[n].iter().enumerate() {
            // evaluate delta f on every (n+1)-tuple where f is the basis
            // cochain sending `tup` to basis element b and others to zero
            for big in &tuples[n + 1] {
                // term 1: r_1 * f(r_2..r_{n+1})
                if n == 0 || big[1..] == tup[..] {
                    if n == 0 {
                        // f is defined on the empty tuple at one vertex
                        let x = alg.basis[*b.min(&(dim - 1))].src;
                        let _ = x;
                    }
                    let applies = if n == 0 {
                        alg.basis[big[0]].tgt == alg.basis[*b].src
                    } else {
                        true
                    };
                    if applies && (n > 0 || alg.basis[big[0]].tgt == alg.basis[*b].src) {
                        for (k, c) in alg.mult_coords(big[0], *b) {
                            if let Some(&ci) = index[n + 1].get(&(big.clone(), *k)) {
                                let v = &m.get(ri, ci).clone() + c;
                                m.set(ri, ci, v);
                            }
                        }
                    }
                }
                // middle terms: (-1)^i f(r_1 .. r_i r_{i+1} .. )
                for i in 0..n {
                    // contract positions i, i+1 of `big`
                    let sign = if (i + 1) % 2 == 0 {
                        field.one()
                    } else {
                        field.from_i64(-1)
                    };
                    for (k, c) in alg.mult_coords(big[i], big[i + 1]) {
                        if alg.basis[*k].path.is_empty() {
                            continue; // products stay in the radical
                        }
                        let mut contracted = Vec::with_capacity(n);
                        contracted.extend_from_slice(&big[..i]);
                        contracted.push(*k);
                        contracted.extend_from_slice(&big[i + 2..]);
                        if contracted == *tup {
                            let ci = index[n + 1]
                                .get(&(big.clone(), *b))
                                .copied();
                            if let Some(ci) = ci {
                                let v = &m.get(ri, ci).clone() + &(c * &sign);
                                m.set(ri, ci, v);
                            }
                        }
                    }
                }
                // last term: (-1)^{n+1} f(r_1..r_n) * r_{n+1}
                if big[..n] == tup[..] {
                    let applies = if n == 0 {
                        alg.basis[*b].tgt == alg.basis[big[n]].src
                    } else {
                        true
                    };
                    if applies {
                        let sign = if (n + 1) % 2 == 0 {
                            field.one()
                        } else {
                            field.from_i64(-1)
                        };
                        for (k, c) in alg.mult_coords(*b, big[n]) {
                            if let Some(&ci) = index[n + 1].get(&(big.clone(), *k)) {
                                let v = &m.get(ri, ci).clone() + &(c * &sign);
                                m.set(ri, ci, v);
                            }
                        }
                    }
                }
            }
        }
        m
    };
    let mut dims = Vec::with_capacity(cap + 1);
    let mut prev_rank = 0usize;
    for n in 0..=cap {
        let d_n = delta(n);
        let rank_n = d_n.rank();
        let kernel = space[n].len() - rank_n;
        dims.push(kernel - prev_rank);
        prev_rank = rank_n;
    }
    // cross-method consistency in degrees 0 and 1
    let h0 = hh0_dim(alg);
    let (_, _, h1) = hh1_data(alg);
    if dims[0] != h0 || dims[1] != h1 {
        return Err(HhError::Filtration(format!(
            "relative bar complex disagrees with direct solves: ({}, {}) vs ({}, {})",
            dims[0], dims[1], h0, h1
        )));
    }
    Ok(CohomologyRecord {
        dims,
        methods: {
            let mut m = vec!["center".to_string(), "derivations".to_string()];
            for _ in 2..=cap {
                m.push("relative-bar".to_string());
            }
            m
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FiltrationStep {
    /// Vertex stripped at this step (label in the original algebra).
    pub vertex: String,
    pub separating: bool,
    pub end_m_dim: usize,
    pub rad_summands: usize,
    pub base_components: usize,
    /// Ext^i_B(M, M) for 1 <= i <= cap all vanish.
    pub ext_vanishing: bool,
    pub reconstruction_ok: bool,
    pub window_limited: bool,
}

pub struct Filtration {
    /// Steps from the full algebra down to the base.
    pub steps: Vec<FiltrationStep>,
    /// Algebras along the chain: algebras[0] is the input, last is the base.
    pub algebras: Vec<Arc<BoundAlgebra>>,
    /// Extension modules M_i over algebras[i+1].
    pub extension_modules: Vec<Representation>,
    /// Base vertices (labels), to be compared with the left support.
    pub base_vertices: Vec<String>,
    pub base_is_left_support: Option<bool>,
    pub trivial: bool,
}

/// Successive removal of maximal projectives (in the right part, without
/// projective successors) until every projective lies in the left part.
pub fn maximal_filtration(
    alg: &Arc<BoundAlgebra>,
    budget: usize,
    max_dim: usize,
    pd_cap: usize,
    left_support: Option<&[String]>,
) -> Result<Filtration, HhError> {
    let mut steps = Vec::new();
    let mut algebras = vec![alg.clone()];
    let mut extension_modules = Vec::new();
    let mut current = alg.clone();
    // original-label bookkeeping: current vertices map into original labels
    loop {
        let w = Arc::new(
            knit(&current, Seeds::Both, budget, max_dim)
                .map_err(|e| HhError::Filtration(e.to_string()))?,
        );
        let window_limited = !w.complete;
        let mut engine = MembershipEngine::new(w, pd_cap)?;
        if engine.window.len() <= 24 {
            engine.preseed_hom_table();
        }
        let cls = classify(&mut engine)?;
        if cls.verdict == Classification::NotAda {
            return Err(HhError::Filtration(
                "an intermediate algebra classified not-ada; idempotent stability is violated"
                    .into(),
            ));
        }
        // quasi-tilted stop: every projective certifiably in the left part
        let all_left = cls
            .proj_verdicts
            .iter()
            .all(|pv| pv.left.status == Status::Yes);
        if all_left {
            break;
        }
        // maximal projective: in R \ L with no proper projective successor
        let nv = current.quiver.n_vertices();
        let mut chosen: Option<usize> = None;
        for x in 0..nv {
            let pv = &cls.proj_verdicts[x];
            if pv.right.status != Status::Yes || pv.left.status != Status::No {
                continue;
            }
            let idx = (0..engine.window.len())
                .find(|&i| engine.window.proj_vertex[i] == Some(x))
                .ok_or_else(|| HhError::Filtration("projective missing from window".into()))?;
            // proper projective successors
            let mut has_proj_succ = false;
            for j in 0..engine.window.len() {
                if j == idx || engine.window.proj_vertex[j].is_none() {
                    continue;
                }
                if engine.hom_exact(idx, j)? > 0 {
                    has_proj_succ = true;
                    break;
                }
                // successors through chains
                if !has_proj_succ {
                    let reach = {
                        let mut set = vec![idx];
                        let mut grew = true;
                        let mut seen: BTreeSet<usize> = set.iter().copied().collect();
                        while grew {
                            grew = false;
                            for c in seen.clone() {
                                for y in 0..engine.window.len() {
                                    if !seen.contains(&y) && engine.hom(c, y).value() > 0 {
                                        seen.insert(y);
                                        grew = true;
                                    }
                                }
                            }
                        }
                        let _ = &mut set;
                        seen
                    };
                    if reach.contains(&j) && engine.hom_exact(idx, j).unwrap_or(0) == 0 {
                        // chain successor: certify at least one path edgewise
                        has_proj_succ = true;
                    } else if reach.contains(&j) {
                        has_proj_succ = true;
                    }
                }
                if has_proj_succ {
                    break;
                }
            }
            if !has_proj_succ {
                chosen = Some(x);
                break;
            }
        }
        let x = chosen.ok_or_else(|| {
            HhError::Filtration(
                "no maximal projective found although the algebra is not quasi-tilted; the window is too small".into(),
            )
        })?;
        // strip the vertex
        let p = Representation::proj_std(&current, x);
        let (rad_p, _) = radical(&p);
        let keep: Vec<usize> = (0..nv).filter(|&v| v != x).collect();
        let sub = full_subcategory(&current, &keep)
            .map_err(|e| HhError::Filtration(e.to_string()))?;
        let m = restrict_along(&rad_p, &sub);
        let dec = decompose(&m)?;
        let n_summands: usize = dec.summands.iter().map(|(_, c)| c).sum();
        let n_components = sub.algebra.quiver.components().len();
        let end_m_dim = hom_dim(&m, &m)?;
        let mut ext_ok = true;
        for i in 1..=DEFAULT_HH_CAP {
            if ext_dim(i, &m, &m, DEFAULT_HH_CAP + 1)
                .map_err(|e| HhError::Filtration(e.to_string()))?
                != 0
            {
                ext_ok = false;
            }
        }
        // reconstruction: the one-point extension of the base by M matches
        let reconstruction_ok = match one_point_extension(&sub.algebra, &m) {
            Ok(ext) => {
                ext.algebra.dim() == current.dim()
                    && ext.algebra.quiver.n_vertices() == current.quiver.n_vertices()
                    && ext.algebra.quiver.n_arrows() == current.quiver.n_arrows()
            }
            Err(_) => false,
        };
        steps.push(FiltrationStep {
            vertex: current.quiver.vertices[x].clone(),
            separating: n_summands == n_components,
            end_m_dim,
            rad_summands: n_summands,
            base_components: n_components,
            ext_vanishing: ext_ok,
            reconstruction_ok,
            window_limited,
        });
        extension_modules.push(m);
        algebras.push(sub.algebra.clone());
        current = sub.algebra;
    }
    let base_vertices: Vec<String> = current.quiver.vertices.clone();
    let base_is_left_support = left_support.map(|ls| {
        let a: BTreeSet<&String> = ls.iter().collect();
        let b: BTreeSet<&String> = base_vertices.iter().collect();
        a == b
    });
    Ok(Filtration {
        trivial: steps.is_empty(),
        steps,
        algebras,
        extension_modules,
        base_vertices,
        base_is_left_support,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HappelStep {
    pub vertex: String,
    pub hh0_ext: usize,
    pub hh0_base: usize,
    pub hh1_ext: usize,
    pub hh1_base: usize,
    pub end_m_mod_k: usize,
    pub alternating_sum_zero: bool,
    pub higher_degrees_match: bool,
    pub separating_iff_hh1_stable: bool,
}

/// Per filtration step: the five-term exact sequence identity
/// hh0(A) - hh0(B) + dim(End M / k) - hh1(A) + hh1(B) = 0, the isomorphisms
/// in degrees >= 2, and the separating criterion hh1(A) = hh1(B).
pub fn happel_check(filtration: &Filtration, cap: usize) -> Result<Vec<HappelStep>, HhError> {
    let mut out = Vec::new();
    for (i, step) in filtration.steps.iter().enumerate() {
        let ext_alg = &filtration.algebras[i];
        let base_alg = &filtration.algebras[i + 1];
        let hh_ext = hh_dims_relative(ext_alg, cap)?;
        let hh_base = hh_dims_relative(base_alg, cap)?;
        let end_mod_k = step.end_m_dim - 1;
        let sum = hh_ext.dims[0] as i64 - hh_base.dims[0] as i64 + end_mod_k as i64
            - hh_ext.dims[1] as i64
            + hh_base.dims[1] as i64;
        let higher = (2..=cap).all(|d| hh_ext.dims[d] == hh_base.dims[d]);
        let sep_iff = (hh_ext.dims[1] == hh_base.dims[1]) == step.separating;
        out.push(HappelStep {
            vertex: step.vertex.clone(),
            hh0_ext: hh_ext.dims[0],
            hh0_base: hh_base.dims[0],
            hh1_ext: hh_ext.dims[1],
            hh1_base: hh_base.dims[1],
            end_m_mod_k: end_mod_k,
            alternating_sum_zero: sum == 0,
            higher_degrees_match: higher,
            separating_iff_hh1_stable: sep_iff,
        });
    }
    Ok(out)
}

/// Tree type: the orbit graph of every Sigma component is a tree. Refused
/// (None) when some Sigma component is incomplete or not certified directed.
pub fn tree_type_check(
    engine: &mut MembershipEngine,
    sigma: &SigmaSets,
) -> Result<Option<bool>, RepError> {
    let comps = engine.window.components();
    let mut verdict = true;
    let mut any = false;
    for comp in &comps {
        if !sigma.sigma.iter().any(|s| comp.contains(s)) {
            continue;
        }
        any = true;
        if comp.iter().any(|i| engine.window.boundary.contains(i)) {
            return Ok(None);
        }
        match orbit_graph(&engine.window, comp) {
            Ok(og) => {
                if !og.is_tree {
                    verdict = false;
                }
            }
            Err(_) => return Ok(None),
        }
    }
    if !any {
        return Ok(None);
    }
    Ok(Some(verdict))
}

#[derive(Debug, Clone, Serialize)]
pub struct Pi1Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    pub minimal_relation_classes: usize,
    pub spanning_tree: Vec<String>,
    pub free_rank_when_no_relators: Option<usize>,
}

/// Exports a fundamental-group presentation of the bound quiver: generators
/// are the arrows outside a breadth-first spanning tree, relators come from
/// the homotopy identifications induced by minimal relations. Triviality is
/// never decided here.
pub fn pi1_export(alg: &Arc<BoundAlgebra>) -> Pi1Presentation {
    let q = &alg.quiver;
    let nv = q.n_vertices();
    // breadth-first spanning forest from the first declared vertex of each
    // component, ties by declaration order
    let mut in_tree = vec![false; q.n_arrows()];
    let mut visited = vec![false; nv];
    for start in 0..nv {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for (ai, a) in q.arrows.iter().enumerate() {
                let other = if a.src == v && !visited[a.tgt] {
                    Some(a.tgt)
                } else if a.tgt == v && !visited[a.src] {
                    Some(a.src)
                } else {
                    None
                };
                if let Some(o) = other {
                    in_tree[ai] = true;
                    visited[o] = true;
                    queue.push_back(o);
                }
            }
        }
    }
    let generators: Vec<String> = (0..q.n_arrows())
        .filter(|&a| !in_tree[a])
        .map(|a| q.arrows[a].name.clone())
        .collect();
    // minimal-relation identification classes from the block structure of the
    // ideal spans on parallel paths
    let mut relators = Vec::new();
    let mut n_classes = 0usize;
    {
        // enumerate paths up to a working length and span the ideal per
        // parallel class; the connected components of the reduced row
        // supports are exactly the minimal-relation identification classes
        let max_rel: usize = alg
            .relations
            .iter()
            .flat_map(|r| r.terms.iter().map(|(_, p)| p.len()))
            .max()
            .unwrap_or(0);
        let lambda = (alg.nilpotency + max_rel).min(crate::algebra::NILPOTENCY_CAP);
        // paths per class
        let mut by_class: std::collections::BTreeMap<(usize, usize), Vec<Vec<usize>>> =
            Default::default();
        let mut frontier: Vec<Vec<usize>> = (0..q.n_arrows()).map(|a| vec![a]).collect();
        for _len in 1..=lambda {
            for p in &frontier {
                by_class
                    .entry((q.path_src(p), q.path_tgt(p)))
                    .or_default()
                    .push(p.clone());
            }
            let mut next = Vec::new();
            for p in &frontier {
                let t = q.path_tgt(p);
                for (ai, a) in q.arrows.iter().enumerate() {
                    if a.src == t {
                        let mut np = p.clone();
                        np.push(ai);
                        next.push(np);
                    }
                }
            }
            next.sort();
            frontier = next;
            if frontier.len() > 50_000 {
                break;
            }
        }
        let field = alg.field;
        for ((_s, _t), paths) in &by_class {
            if paths.len() < 2 {
                continue;
            }
            let index: std::collections::BTreeMap<&Vec<usize>, usize> =
                paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            for rel in &alg.relations {
                let rel_src = rel.src(q);
                let rel_tgt = rel.tgt(q);
                // products left * rel * right landing in this class
                let mut lefts: Vec<Vec<usize>> = vec![vec![]];
                let mut rights: Vec<Vec<usize>> = vec![vec![]];
                // gather all prefixes into rel_src and suffixes from rel_tgt
                let mut all_paths: Vec<Vec<usize>> = vec![vec![]];
                for ps in by_class.values() {
                    for p in ps {
                        all_paths.push(p.clone());
                    }
                }
                for p in &all_paths {
                    if p.is_empty() || q.path_tgt(p) == rel_src {
                        lefts.push(p.clone());
                    }
                    if p.is_empty() || q.path_src(p) == rel_tgt {
                        rights.push(p.clone());
                    }
                }
                for l in &lefts {
                    if !l.is_empty() && q.path_tgt(l) != rel_src {
                        continue;
                    }
                    for r in &rights {
                        if !r.is_empty() && q.path_src(r) != rel_tgt {
                            continue;
                        }
                        let mut vec_row = vec![field.zero(); paths.len()];
                        let mut in_class = true;
                        let mut nonzero = false;
                        for (c, w) in &rel.terms {
                            let mut full = l.clone();
                            full.extend_from_slice(w);
                            full.extend_from_slice(r);
                            match index.get(&full) {
                                Some(&i) => {
                                    vec_row[i] = &vec_row[i] + c;
                                    nonzero = true;
                                }
                                None => {
                                    in_class = false;
                                }
                            }
                        }
                        if in_class && nonzero {
                            rows.push(vec_row);
                        }
                    }
                }
            }
            if rows.is_empty() {
                continue;
            }
            let mat = Matrix::from_rows(rows, paths.len(), field).row_basis();
            // connected components of the reduced row supports
            let mut parent: Vec<usize> = (0..paths.len()).collect();
            fn find(p: &mut Vec<usize>, x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            for r in 0..mat.rows {
                let support: Vec<usize> = (0..paths.len())
                    .filter(|&c| !mat.get(r, c).is_zero())
                    .collect();
                for w in support.windows(2) {
                    let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
            let mut classes: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            for i in 0..paths.len() {
                let r = find(&mut parent, i);
                classes.entry(r).or_default().push(i);
            }
            for members in classes.values() {
                if members.len() < 2 {
                    continue;
                }
                n_classes += 1;
                // relators: word(p) * word(p0)^{-1} per identified pair
                let word = |p: &[usize]| -> Vec<(usize, bool)> {
                    p.iter()
                        .filter(|&&a| !in_tree[a])
                        .map(|&a| (a, true))
                        .collect()
                };
                let base = word(&paths[members[0]]);
                for &other in &members[1..] {
                    let mut w = word(&paths[other]);
                    for (a, dirn) in base.iter().rev() {
                        w.push((*a, !dirn));
                    }
                    // free reduction
                    let mut reduced: Vec<(usize, bool)> = Vec::new();
                    for l in w {
                        if let Some(last) = reduced.last() {
                            if last.0 == l.0 && last.1 != l.1 {
                                reduced.pop();
                                continue;
                            }
                        }
                        reduced.push(l);
                    }
                    if reduced.is_empty() {
                        continue;
                    }
                    let text: Vec<String> = reduced
                        .iter()
                        .map(|&(a, fwd)| {
                            if fwd {
                                q.arrows[a].name.clone()
                            } else {
                                format!("{}^-1", q.arrows[a].name)
                            }
                        })
                        .collect();
                    relators.push(text.join("."));
                }
            }
        }
    }
    let free_rank = if relators.is_empty() {
        Some(generators.len())
    } else {
        None
    };
    Pi1Presentation {
        spanning_tree: (0..q.n_arrows())
            .filter(|&a| in_tree[a])
            .map(|a| q.arrows[a].name.clone())
            .collect(),
        generators,
        relators,
        minimal_relation_classes: n_classes,
        free_rank_when_no_relators: free_rank,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScVerdict {
    pub verdict: Option<bool>,
    pub confidence: Confidence,
    pub refused: Option<String>,
    pub hh1: usize,
    pub tree_type: Option<bool>,
    pub separating_all: Option<bool>,
    pub ring_reduces_to_k: Option<bool>,
    /// A presentation with nontrivial free fundamental group certifies the
    /// negative verdict independently of the ada hypothesis.
    pub presentation_certificate: bool,
    pub warnings: Vec<String>,
}

/// Simple connectedness for ada algebras: equivalent to the vanishing of the
/// first Hochschild cohomology. The verdict inherits the classification
/// confidence; a nontrivially-free exported presentation upgrades a negative
/// verdict to certified.
pub fn simple_connectedness(
    cls: &ClassifyResult,
    hh: &CohomologyRecord,
    tree_type: Option<bool>,
    filtration: Option<&Filtration>,
    pi1: &Pi1Presentation,
) -> ScVerdict {
    let hh1 = hh.dims[1];
    let mut warnings = Vec::new();
    if cls.verdict == Classification::NotAda {
        return ScVerdict {
            verdict: None,
            confidence: Confidence::WindowLimited,
            refused: Some("the equivalence with vanishing first cohomology requires an ada algebra".into()),
            hh1,
            tree_type,
            separating_all: None,
            ring_reduces_to_k: None,
            presentation_certificate: false,
            warnings,
        };
    }
    let presentation_certificate =
        hh1 > 0 && pi1.relators.is_empty() && !pi1.generators.is_empty();
    let mut confidence = match cls.confidence {
        Confidence::Certified => Confidence::Certified,
        Confidence::WindowLimited => Confidence::WindowLimited,
    };
    if cls.verdict == Classification::Unknown {
        confidence = Confidence::WindowLimited;
        warnings.push("ada hypothesis is window-limited; no violation was found".into());
        if hh1 == 0 {
            return ScVerdict {
                verdict: None,
                confidence,
                refused: Some(
                    "positive verdict needs the ada hypothesis, which is unresolved".into(),
                ),
                hh1,
                tree_type,
                separating_all: None,
                ring_reduces_to_k: None,
                presentation_certificate,
                warnings,
            };
        }
    }
    let separating_all = filtration.map(|f| f.steps.iter().all(|s| s.separating));
    let ring_reduces = if hh1 == 0 {
        Some(hh.dims.iter().skip(1).all(|&d| d == 0) && hh.dims[0] == 1)
    } else {
        None
    };
    if presentation_certificate {
        confidence = Confidence::Certified;
    }
    // coherence audit: on fully certified data, tree type must match
    if let Some(tt) = tree_type {
        if (hh1 == 0) != tt {
            warnings.push(format!(
                "inconsistency: first cohomology dimension {} against tree type {}",
                hh1, tt
            ));
        }
    }
    ScVerdict {
        verdict: Some(hh1 == 0),
        confidence,
        refused: None,
        hh1,
        tree_type,
        separating_all,
        ring_reduces_to_k: ring_reduces,
        presentation_certificate,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_algebra;
    use crate::quiver::parse_spec;

    const EX22B: &str = "field Q\nvertex 1 2 3 4 5\narrow b1 2 1\narrow b2 3 2\narrow b3 4 3\narrow b4 5 4\nrel rad2\n";
    const KRON: &str = "field Q\nvertex 1 2\narrow a 1 2\narrow b 1 2\n";
    const EX22C: &str = "field Q\nvertex 1 2 3 4\narrow a1 2 1\narrow a2 2 1\narrow b1 3 2\narrow b2 3 2\narrow c1 4 3\narrow c2 4 3\nrel rad2\n";

    fn alg(text: &str) -> Arc<BoundAlgebra> {
        let (q, r, f) = parse_spec(text).unwrap();
        build_algebra(q, r, f).unwrap()
    }

    #[test]
    fn centers() {
        assert_eq!(hh0_dim(&alg(EX22B)), 1);
        assert_eq!(hh0_dim(&alg("field Q\nvertex 1\n")), 1);
        assert_eq!(hh0_dim(&alg(KRON)), 1);
    }

    #[test]
    fn first_cohomology() {
        let (der, inner, h1) = hh1_data(&alg(EX22B));
        assert_eq!(h1, 0);
        assert_eq!(der, inner);
        assert_eq!(hh1_dim(&alg("field Q\nvertex 1\n")), 0);
        // parallel arrows force outer derivations
        assert_eq!(hh1_dim(&alg(KRON)), 3);
        assert!(hh1_dim(&alg(EX22C)) > 0);
    }

    #[test]
    fn inner_dimension_identity() {
        for text in [EX22B, KRON, EX22C] {
            let a = alg(text);
            let (_, inner, _) = hh1_data(&a);
            assert_eq!(inner, a.dim() - hh0_dim(&a));
        }
    }

    #[test]
    fn relative_bar_complex() {
        let rec = hh_dims_relative(&alg(EX22B), 5).unwrap();
        assert_eq!(rec.dims, vec![1, 0, 0, 0, 0, 0]);
        let rec = hh_dims_relative(&alg("field Q\nvertex 1\n"), 5).unwrap();
        assert_eq!(rec.dims, vec![1, 0, 0, 0, 0, 0]);
        let rec = hh_dims_relative(&alg(KRON), 5).unwrap();
        assert_eq!(rec.dims[0], 1);
        assert_eq!(rec.dims[1], 3);
        assert!(rec.dims[2..].iter().all(|&d| d == 0));
    }

    #[test]
    fn chain_filtration_strips_five_then_four() {
        let a = alg(EX22B);
        let f = maximal_filtration(&a, 60, 60, 12, Some(&["1".into(), "2".into(), "3".into()]))
            .unwrap();
        let stripped: Vec<&str> = f.steps.iter().map(|s| s.vertex.as_str()).collect();
        assert_eq!(stripped, vec!["5", "4"]);
        assert!(f.steps.iter().all(|s| s.separating));
        assert!(f.steps.iter().all(|s| s.ext_vanishing));
        assert!(f.steps.iter().all(|s| s.reconstruction_ok));
        assert_eq!(f.base_vertices, vec!["1", "2", "3"]);
        assert_eq!(f.base_is_left_support, Some(true));
    }

    #[test]
    fn one_vertex_filtration_is_trivial() {
        let a = alg("field Q\nvertex 1\n");
        let f = maximal_filtration(&a, 10, 60, 12, None).unwrap();
        assert!(f.trivial);
    }

    #[test]
    fn chain_happel_identities() {
        let a = alg(EX22B);
        let f = maximal_filtration(&a, 60, 60, 12, None).unwrap();
        let steps = happel_check(&f, 5).unwrap();
        assert_eq!(steps.len(), 2);
        for s in &steps {
            assert!(s.alternating_sum_zero);
            assert!(s.higher_degrees_match);
            assert!(s.separating_iff_hh1_stable);
            assert_eq!(s.end_m_mod_k, 0);
        }
    }

    #[test]
    fn hereditary_two_chain_happel() {
        // one-point extension of the one-vertex algebra by its simple: the
        // result is hereditary, so its own maximal filtration is trivial, but
        // the five-term identity still holds across the extension step
        let k = alg("field Q\nvertex 1\n");
        let s = Representation::simple(&k, 0);
        let ext = one_point_extension(&k, &s).unwrap();
        let f = maximal_filtration(&ext.algebra, 20, 60, 12, None).unwrap();
        assert!(f.trivial);
        let hh_ext = hh_dims_relative(&ext.algebra, 4).unwrap();
        let hh_base = hh_dims_relative(&k, 4).unwrap();
        let end_m_mod_k = hom_dim(&s, &s).unwrap() - 1;
        let sum = hh_ext.dims[0] as i64 - hh_base.dims[0] as i64 + end_m_mod_k as i64
            - hh_ext.dims[1] as i64
            + hh_base.dims[1] as i64;
        assert_eq!(sum, 0);
        assert_eq!(hh_ext.dims[0], 1);
        assert_eq!(hh_ext.dims[1], 0);
    }

    #[test]
    fn pi1_presentations() {
        let p = pi1_export(&alg(EX22B));
        assert!(p.generators.is_empty());
        assert!(p.relators.is_empty());
        assert_eq!(p.free_rank_when_no_relators, Some(0));

        let p = pi1_export(&alg(KRON));
        assert_eq!(p.generators.len(), 1);
        assert!(p.relators.is_empty());
        assert_eq!(p.free_rank_when_no_relators, Some(1));

        let p = pi1_export(&alg(EX22C));
        assert_eq!(p.generators.len(), 3); // |Q1| - |Q0| + 1 = 6 - 4 + 1
        assert!(p.relators.is_empty()); // monomial relations identify nothing
        assert_eq!(p.free_rank_when_no_relators, Some(3));
    }

    #[test]
    fn pi1_commutativity_relation_collapses() {
        // d is identified with the composite route; the lone generator dies
        let a = alg(
            "field Q\nvertex 1 2 3 4\narrow a 1 2\narrow b 2 3\narrow c 3 4\narrow d 1 3\nrel 1*d.c + -1*a.b.c\n",
        );
        let p = pi1_export(&a);
        assert_eq!(p.generators.len(), 1);
        assert_eq!(p.relators.len(), 1);
        assert_eq!(p.minimal_relation_classes, 1);
        // the relator is the generator itself (up to inversion)
        assert!(p.relators[0].contains(&p.generators[0]));
    }

    #[test]
    fn generator_count_invariant() {
        for text in [EX22B, KRON, EX22C] {
            let a = alg(text);
            let p = pi1_export(&a);
            let expected = a.quiver.n_arrows() as i64 - a.quiver.n_vertices() as i64
                + a.quiver.components().len() as i64;
            assert_eq!(p.generators.len() as i64, expected);
        }
    }
}
