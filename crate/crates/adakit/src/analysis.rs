//! Top-level classification (ada / quasi-tilted / strict / not ada /
//! unknown), the left and right supports, the component structure report and
//! the middle part.

use crate::algebra::{full_subcategory, BoundAlgebra};
use crate::homology::{global_dimension, inj_dim, proj_dim};
use crate::parts::{
    ann_quotient_slice, right_section_check, MembershipEngine, SectionReport, Side,
    SigmaSets, SliceReport, Status, Verdict, WitnessChain,
};
use crate::rep::{hom_dim, is_isomorphic, RepError, Representation};
use serde::Serialize;
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    StrictAda,
    Ada,
    QuasiTilted,
    NotAda,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    Certified,
    WindowLimited,
}

/// Verd['L'], Verdict['R'] for one standard module.
#[derive(Debug, Clone)]
pub struct PairVerdicts {
    pub left: Verdict,
    pub right: Verdict,
}

impl PairVerdicts {
    pub fn satisfied(&self) -> bool {
        self.left.status == Status::Yes || self.right.status == Status::Yes
    }

    pub fn violated(&self) -> bool {
        self.left.status == Status::No && self.right.status == Status::No
    }

    pub fn window_limited(&self) -> bool {
        (self.left.status == Status::Yes && self.left.window_limited)
            || (self.right.status == Status::Yes && self.right.window_limited)
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyResult {
    pub verdict: Classification,
    pub confidence: Confidence,
    /// per vertex: verdicts for P_x and I_x
    pub proj_verdicts: Vec<PairVerdicts>,
    pub inj_verdicts: Vec<PairVerdicts>,
    /// vertices whose projective or injective has no yes and no double no
    pub pending: Vec<String>,
    /// double-NO witnesses: (module label, left witness, right witness)
    pub violations: Vec<(String, WitnessChain, WitnessChain)>,
    pub warnings: Vec<String>,
}

/// Locates every standard module in the window; they are all inserted by a
/// both-seeded knit unless a budget intervened.
fn locate_standards(engine: &mut MembershipEngine) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let nv = engine.window.alg.quiver.n_vertices();
    let mut proj = vec![None; nv];
    let mut inj = vec![None; nv];
    for i in 0..engine.window.len() {
        if let Some(x) = engine.window.proj_vertex[i] {
            proj[x] = Some(i);
        }
        if let Some(x) = engine.window.inj_vertex[i] {
            inj[x] = Some(i);
        }
    }
    (proj, inj)
}

pub fn classify(engine: &mut MembershipEngine) -> Result<ClassifyResult, RepError> {
    let nv = engine.window.alg.quiver.n_vertices();
    let (proj_loc, inj_loc) = locate_standards(engine);
    let mut warnings = Vec::new();
    let verdicts_for = |engine: &mut MembershipEngine,
                        loc: &Option<usize>|
     -> Result<PairVerdicts, RepError> {
        match loc {
            Some(i) => Ok(PairVerdicts {
                left: engine.membership(*i, Side::Left)?,
                right: engine.membership(*i, Side::Right)?,
            }),
            None => Ok(PairVerdicts {
                left: Verdict {
                    status: Status::Unknown,
                    rule: crate::parts::Rule::Refused,
                    witness: None,
                    window_limited: true,
                    notes: vec!["standard module missing from the window".into()],
                },
                right: Verdict {
                    status: Status::Unknown,
                    rule: crate::parts::Rule::Refused,
                    witness: None,
                    window_limited: true,
                    notes: vec![],
                },
            }),
        }
    };
    let mut proj_verdicts = Vec::with_capacity(nv);
    let mut inj_verdicts = Vec::with_capacity(nv);
    for x in 0..nv {
        proj_verdicts.push(verdicts_for(engine, &proj_loc[x])?);
        inj_verdicts.push(verdicts_for(engine, &inj_loc[x])?);
    }
    let mut violations = Vec::new();
    let mut pending = Vec::new();
    for x in 0..nv {
        for (tag, pv) in [("P", &proj_verdicts[x]), ("I", &inj_verdicts[x])] {
            let label = format!("{}{}", tag, engine.window.alg.quiver.vertices[x]);
            if pv.violated() {
                violations.push((
                    label,
                    pv.left.witness.clone().unwrap(),
                    pv.right.witness.clone().unwrap(),
                ));
            } else if !pv.satisfied() {
                pending.push(label);
            }
        }
    }
    let verdict;
    let mut confidence = Confidence::Certified;
    if !violations.is_empty() {
        verdict = Classification::NotAda;
    } else if pending.is_empty() {
        let all_p_left = proj_verdicts.iter().all(|pv| pv.left.status == Status::Yes);
        let some_p_left_no = proj_verdicts.iter().any(|pv| pv.left.status == Status::No);
        if all_p_left {
            verdict = Classification::QuasiTilted;
        } else if some_p_left_no {
            verdict = Classification::StrictAda;
        } else {
            verdict = Classification::Ada;
            warnings
                .push("quasi-tilted distinction unresolved: a projective has an unknown left verdict".into());
        }
        if proj_verdicts
            .iter()
            .chain(inj_verdicts.iter())
            .any(PairVerdicts::window_limited)
        {
            confidence = Confidence::WindowLimited;
        }
    } else {
        verdict = Classification::Unknown;
        confidence = Confidence::WindowLimited;
        warnings.push(format!(
            "membership pending for: {}",
            pending.join(", ")
        ));
    }
    Ok(ClassifyResult {
        verdict,
        confidence,
        proj_verdicts,
        inj_verdicts,
        pending,
        violations,
        warnings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportSelection {
    pub vertices: Vec<String>,
    pub unknown_vertices: Vec<String>,
    pub components: Vec<Vec<String>>,
    /// gd <= 2 evidence per connected component (None when capped).
    pub component_gd_le_2: Vec<Option<bool>>,
    pub convex: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Supports {
    pub left: SupportSelection,
    pub right: SupportSelection,
    pub intersection: Vec<String>,
    pub covers_all_vertices: Option<bool>,
}

/// Left support A_lambda = vertices with P_x in the left part; right support
/// A_rho dually. Checks the vertex cover and convexity of the left support.
pub fn supports(
    engine: &mut MembershipEngine,
    cls: &ClassifyResult,
) -> Result<Supports, RepError> {
    let alg = engine.window.alg.clone();
    let nv = alg.quiver.n_vertices();
    let build = |yes: &[bool], unknown: &[bool], alg: &Arc<BoundAlgebra>| -> SupportSelection {
        let vertices: Vec<String> = (0..nv)
            .filter(|&x| yes[x])
            .map(|x| alg.quiver.vertices[x].clone())
            .collect();
        let unknown_vertices: Vec<String> = (0..nv)
            .filter(|&x| unknown[x])
            .map(|x| alg.quiver.vertices[x].clone())
            .collect();
        let chosen: Vec<usize> = (0..nv).filter(|&x| yes[x]).collect();
        let mut components = Vec::new();
        let mut component_gd = Vec::new();
        if !chosen.is_empty() {
            if let Ok(map) = full_subcategory(alg, &chosen) {
                for comp in map.algebra.quiver.components() {
                    components.push(
                        comp.iter()
                            .map(|&v| map.algebra.quiver.vertices[v].clone())
                            .collect::<Vec<_>>(),
                    );
                    let comp_parent: Vec<usize> =
                        comp.iter().map(|&v| map.vertex_parent[v]).collect();
                    let gd = full_subcategory(alg, &comp_parent)
                        .ok()
                        .and_then(|m| global_dimension(&m.algebra, 12).ok())
                        .map(|d| d.at_most(2));
                    component_gd.push(gd);
                }
            }
        }
        // convexity in the vertex digraph e_x A e_y != 0
        let mut convex = true;
        let edge = |a: usize, b: usize| a != b && !alg.pair_basis(a, b).is_empty();
        for &x in &chosen {
            for &y in &chosen {
                if x == y {
                    continue;
                }
                // nodes on x -> y paths
                let mut reach = vec![false; nv];
                reach[x] = true;
                loop {
                    let mut grew = false;
                    for a in 0..nv {
                        if reach[a] {
                            continue;
                        }
                        if (0..nv).any(|b| reach[b] && edge(b, a)) {
                            reach[a] = true;
                            grew = true;
                        }
                    }
                    if !grew {
                        break;
                    }
                }
                let mut coreach = vec![false; nv];
                coreach[y] = true;
                loop {
                    let mut grew = false;
                    for a in 0..nv {
                        if coreach[a] {
                            continue;
                        }
                        if (0..nv).any(|b| coreach[b] && edge(a, b)) {
                            coreach[a] = true;
                            grew = true;
                        }
                    }
                    if !grew {
                        break;
                    }
                }
                for mid in 0..nv {
                    if reach[mid] && coreach[mid] && !chosen.contains(&mid) {
                        convex = false;
                    }
                }
            }
        }
        SupportSelection {
            vertices,
            unknown_vertices,
            components,
            component_gd_le_2: component_gd,
            convex,
            notes: Vec::new(),
        }
    };
    let mut l_yes = vec![false; nv];
    let mut l_unknown = vec![false; nv];
    let mut r_yes = vec![false; nv];
    let mut r_unknown = vec![false; nv];
    for x in 0..nv {
        match cls.proj_verdicts[x].left.status {
            Status::Yes => l_yes[x] = true,
            Status::Unknown => l_unknown[x] = true,
            Status::No => {}
        }
        match cls.inj_verdicts[x].right.status {
            Status::Yes => r_yes[x] = true,
            Status::Unknown => r_unknown[x] = true,
            Status::No => {}
        }
    }
    let left = build(&l_yes, &l_unknown, &alg);
    let right = build(&r_yes, &r_unknown, &alg);
    let intersection: Vec<String> = (0..nv)
        .filter(|&x| l_yes[x] && r_yes[x])
        .map(|x| alg.quiver.vertices[x].clone())
        .collect();
    let covers = if (0..nv).any(|x| l_unknown[x] || r_unknown[x]) {
        None
    } else {
        Some((0..nv).all(|x| l_yes[x] || r_yes[x]))
    };
    Ok(Supports {
        left,
        right,
        intersection,
        covers_all_vertices: covers,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub members: Vec<String>,
    pub has_sigma: bool,
    pub directed: Option<bool>,
    pub generalized_standard: Option<bool>,
    pub convex_in_window: bool,
    pub section: Option<SectionReport>,
    pub slice: Option<SliceReport>,
    /// For non-Sigma components: entirely supported in the left or right
    /// support ("left" / "right" / "both" / "neither").
    pub support_side: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremAReport {
    pub refused: Option<String>,
    pub sigma_components: usize,
    pub components: Vec<ComponentReport>,
    /// An explicit nonzero hom between distinct Sigma components, when found:
    /// (from label, to label, exact dimension).
    pub cross_hom: Option<(String, String, usize)>,
    pub window_limited: bool,
}

/// Directedness of a component: certified true when the prefiltered edge
/// superset is acyclic and every member is a brick; certified false when an
/// exact cycle is exhibited; None otherwise.
fn component_directed(
    engine: &mut MembershipEngine,
    comp: &[usize],
) -> Result<Option<bool>, RepError> {
    // self-loops: a non-brick member lies on a cycle
    for &i in comp {
        let m = engine.window.modules[i].clone();
        match crate::rep::certified_brick(&m, &crate::matrix::PREFILTER_PRIMES) {
            Some(true) => {}
            _ => {
                let e = hom_dim(&m, &m)?;
                if e > 1 {
                    return Ok(Some(false));
                }
            }
        }
    }
    // candidate edges (superset of true edges)
    let n = comp.len();
    let mut adj = vec![vec![false; n]; n];
    for (ai, &a) in comp.iter().enumerate() {
        for (bi, &b) in comp.iter().enumerate() {
            if a != b && engine.hom(a, b).value() > 0 {
                adj[ai][bi] = true;
            }
        }
    }
    // cycle detection on the superset
    let mut color = vec![0u8; n];
    let mut cycle_free = true;
    fn dfs(v: usize, adj: &Vec<Vec<bool>>, color: &mut [u8]) -> bool {
        color[v] = 1;
        for w in 0..adj.len() {
            if adj[v][w] {
                if color[w] == 1 {
                    return false;
                }
                if color[w] == 0 && !dfs(w, adj, color) {
                    return false;
                }
            }
        }
        color[v] = 2;
        true
    }
    for v in 0..n {
        if color[v] == 0 && !dfs(v, &adj, &mut color) {
            cycle_free = false;
            break;
        }
    }
    if cycle_free {
        return Ok(Some(true));
    }
    // verify a cycle exactly: recompute edges on strongly connected pairs
    for (ai, &a) in comp.iter().enumerate() {
        for (bi, &b) in comp.iter().enumerate() {
            if ai < bi && adj[ai][bi] && adj[bi][ai] {
                if engine.hom_exact(a, b)? > 0 && engine.hom_exact(b, a)? > 0 {
                    return Ok(Some(false));
                }
            }
        }
    }
    Ok(None)
}

/// rad^infty vanishing by iterating the radical of the window category to
/// stability. Only meaningful on complete windows.
fn generalized_standard(engine: &mut MembershipEngine, comp: &[usize]) -> Result<bool, RepError> {
    use crate::matrix::Matrix;
    let field = engine.window.alg.field;
    let n = comp.len();
    // flattened hom bases; radical = all maps for distinct modules, radical
    // endomorphisms on the diagonal (bricks: zero)
    let mut rad: Vec<Vec<Matrix>> = vec![vec![]; n * n];
    let flat_dim = |m: &Representation, w: &Representation| -> usize {
        m.dims.iter().zip(&w.dims).map(|(&a, &b)| a * b).sum()
    };
    for (ai, &a) in comp.iter().enumerate() {
        for (bi, &b) in comp.iter().enumerate() {
            let (ma, mb) = (
                engine.window.modules[a].clone(),
                engine.window.modules[b].clone(),
            );
            let cols = flat_dim(&ma, &mb);
            if cols == 0 {
                rad[ai * n + bi] = vec![Matrix::zeros(0, 0, field)];
                continue;
            }
            let basis = crate::rep::hom_basis(&ma, &mb)?;
            let rows: Vec<Vec<crate::scalar::Scalar>> = basis
                .iter()
                .filter(|f| {
                    if a != b {
                        return true;
                    }
                    // keep only non-invertible endomorphisms; for bricks the
                    // identity is the whole End space
                    !f.mats
                        .iter()
                        .all(|m| m.rows == m.cols && (m.rows == 0 || m.inverse().is_some()))
                })
                .map(|f| {
                    let mut v = Vec::new();
                    for mat in &f.mats {
                        for i in 0..mat.rows {
                            for j in 0..mat.cols {
                                v.push(mat.get(i, j).clone());
                            }
                        }
                    }
                    v
                })
                .collect();
            let basis_mat = Matrix::from_rows(rows, cols, field).row_basis();
            rad[ai * n + bi] = vec![basis_mat];
        }
    }
    // represent each rad power as a row space of flattened maps; compose by
    // unflattening
    let unflatten = |v: &[crate::scalar::Scalar], ma: &Representation, mb: &Representation| {
        let mut mats = Vec::new();
        let mut off = 0;
        for vtx in 0..ma.dims.len() {
            let (r, c) = (ma.dims[vtx], mb.dims[vtx]);
            let mut m = Matrix::zeros(r, c, field);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, v[off + i * c + j].clone());
                }
            }
            off += r * c;
            mats.push(m);
        }
        crate::rep::ModuleMap { mats }
    };
    let mut current: Vec<Matrix> = rad.iter().map(|v| v[0].clone()).collect();
    let total = |pows: &[Matrix]| -> usize { pows.iter().map(|m| m.rows).sum() };
    let mut last_total = total(&current);
    for _round in 0..(2 * engine.window.len() + 4) {
        // next = current o rad (compose one more radical layer)
        let mut next: Vec<Matrix> = Vec::with_capacity(n * n);
        for ai in 0..n {
            for bi in 0..n {
                let ma = engine.window.modules[comp[ai]].clone();
                let mb = engine.window.modules[comp[bi]].clone();
                let cols = flat_dim(&ma, &mb);
                let mut rows: Vec<Vec<crate::scalar::Scalar>> = Vec::new();
                for ki in 0..n {
                    let mk = engine.window.modules[comp[ki]].clone();
                    let first = &rad[ai * n + ki][0];
                    let second = &current[ki * n + bi];
                    for r1 in 0..first.rows {
                        let f = unflatten(first.row(r1), &ma, &mk);
                        for r2 in 0..second.rows {
                            let g = unflatten(second.row(r2), &mk, &mb);
                            let comp_map = f.compose(&g);
                            let mut v = Vec::new();
                            for mat in &comp_map.mats {
                                for i in 0..mat.rows {
                                    for j in 0..mat.cols {
                                        v.push(mat.get(i, j).clone());
                                    }
                                }
                            }
                            rows.push(v);
                        }
                    }
                }
                next.push(Matrix::from_rows(rows, cols, field).row_basis());
            }
        }
        let t = total(&next);
        current = next;
        if t == 0 {
            return Ok(true);
        }
        if t == last_total {
            // stabilized at a nonzero space: rad^infty != 0
            return Ok(false);
        }
        last_total = t;
    }
    Ok(false)
}

fn convex_in_window(engine: &mut MembershipEngine, comp: &[usize]) -> bool {
    let n = engine.window.len();
    let comp_set: BTreeSet<usize> = comp.iter().copied().collect();
    for &a in comp {
        let fwd = {
            let mut set = BTreeSet::new();
            set.insert(a);
            loop {
                let mut grew = false;
                for x in 0..n {
                    if set.contains(&x) {
                        continue;
                    }
                    if set.iter().any(|&c| engine.hom(c, x).value() > 0) {
                        set.insert(x);
                        grew = true;
                    }
                }
                if !grew {
                    break;
                }
            }
            set
        };
        for &b in comp {
            if a == b {
                continue;
            }
            let bwd = {
                let mut set = BTreeSet::new();
                set.insert(b);
                loop {
                    let mut grew = false;
                    for x in 0..n {
                        if set.contains(&x) {
                            continue;
                        }
                        if set.iter().any(|&c| engine.hom(x, c).value() > 0) {
                            set.insert(x);
                            grew = true;
                        }
                    }
                    if !grew {
                        break;
                    }
                }
                set
            };
            for mid in fwd.intersection(&bwd) {
                if !comp_set.contains(mid) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn theorem_a_report(
    engine: &mut MembershipEngine,
    sigma: &SigmaSets,
    cls: &ClassifyResult,
    sup: &Supports,
) -> Result<TheoremAReport, RepError> {
    if cls.verdict != Classification::StrictAda {
        return Ok(TheoremAReport {
            refused: Some(format!(
                "component structure requires a strict ada classification (got {:?})",
                cls.verdict
            )),
            sigma_components: 0,
            components: Vec::new(),
            cross_hom: None,
            window_limited: true,
        });
    }
    let comps = engine.window.components();
    let mut sigma_comp_ids = Vec::new();
    for (ci, comp) in comps.iter().enumerate() {
        if sigma.sigma.iter().any(|s| comp.contains(s)) {
            sigma_comp_ids.push(ci);
        }
    }
    let mut reports = Vec::new();
    for (ci, comp) in comps.iter().enumerate() {
        let has_sigma = sigma_comp_ids.contains(&ci);
        let directed = component_directed(engine, comp)?;
        let complete_comp = comp.iter().all(|i| !engine.window.boundary.contains(i));
        let gen_std = if complete_comp && engine.window.complete {
            Some(generalized_standard(engine, comp)?)
        } else {
            None
        };
        let convex = convex_in_window(engine, comp);
        let (section, slice) = if has_sigma {
            let members: Vec<usize> = sigma
                .sigma
                .iter()
                .copied()
                .filter(|s| comp.contains(s))
                .collect();
            let sec = right_section_check(engine, &members, comp)?;
            let (_, sl) = ann_quotient_slice(engine, &members, comp)?;
            (Some(sec), Some(sl))
        } else {
            (None, None)
        };
        // non-Sigma components: supported in one of the supports?
        let support_side = if !has_sigma {
            let lset: BTreeSet<&String> = sup.left.vertices.iter().collect();
            let rset: BTreeSet<&String> = sup.right.vertices.iter().collect();
            let labels = &engine.window.alg.quiver.vertices;
            let in_left = comp.iter().all(|&i| {
                engine.window.modules[i]
                    .support()
                    .iter()
                    .all(|&v| lset.contains(&labels[v]))
            });
            let in_right = comp.iter().all(|&i| {
                engine.window.modules[i]
                    .support()
                    .iter()
                    .all(|&v| rset.contains(&labels[v]))
            });
            Some(
                match (in_left, in_right) {
                    (true, true) => "both",
                    (true, false) => "left",
                    (false, true) => "right",
                    (false, false) => "neither",
                }
                .to_string(),
            )
        } else {
            None
        };
        let mut notes = Vec::new();
        // hom clauses for non-Sigma components
        if !has_sigma {
            let mut into_sigma = false;
            let mut from_sigma = false;
            for &x in comp {
                for &sci in &sigma_comp_ids {
                    for &y in &comps[sci] {
                        if engine.hom(x, y).value() > 0 {
                            into_sigma = true;
                        }
                        if engine.hom(y, x).value() > 0 {
                            from_sigma = true;
                        }
                    }
                }
            }
            if into_sigma && support_side.as_deref() != Some("left")
                && support_side.as_deref() != Some("both")
            {
                notes.push("maps into a Sigma component but is not left-supported".into());
            }
            if from_sigma && support_side.as_deref() != Some("right")
                && support_side.as_deref() != Some("both")
            {
                notes.push("receives maps from a Sigma component but is not right-supported".into());
            }
        }
        reports.push(ComponentReport {
            members: comp.iter().map(|&i| engine.window.labels[i].clone()).collect(),
            has_sigma,
            directed,
            generalized_standard: gen_std,
            convex_in_window: convex,
            section,
            slice,
            support_side,
            notes,
        });
    }
    // explicit cross hom between distinct Sigma components, smallest pairs first
    let mut cross_hom = None;
    'outer: for (i, &ca) in sigma_comp_ids.iter().enumerate() {
        for &cb in sigma_comp_ids.iter().skip(i + 1) {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for &x in &comps[ca] {
                for &y in &comps[cb] {
                    pairs.push((x, y));
                    pairs.push((y, x));
                }
            }
            pairs.sort_by_key(|&(x, y)| {
                engine.window.modules[x].total_dim() + engine.window.modules[y].total_dim()
            });
            for (x, y) in pairs {
                if engine.hom(x, y).value() > 0 {
                    let d = engine.hom_exact(x, y)?;
                    if d > 0 {
                        cross_hom = Some((
                            engine.window.labels[x].clone(),
                            engine.window.labels[y].clone(),
                            d,
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(TheoremAReport {
        refused: None,
        sigma_components: sigma_comp_ids.len(),
        components: reports,
        cross_hom,
        window_limited: !engine.window.complete,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MiddleEntry {
    pub label: String,
    pub dims: Vec<usize>,
    pub pd_witness: Vec<String>,
    pub id_witness: Vec<String>,
    pub path_from_sigma_prime: Option<Vec<String>>,
    pub path_to_sigma: Option<Vec<String>>,
    pub support_in_intersection: Option<bool>,
    pub generated_by_sigma_prime: Option<bool>,
    pub cogenerated_by_sigma: Option<bool>,
}

/// Modules outside both parts, with the structural certificates: paths from
/// the Ext-injective slice and into the Ext-projective slice, support inside
/// the support intersection, and (on complete windows) generation and
/// cogeneration rank tests.
pub fn middle_part(
    engine: &mut MembershipEngine,
    sigma: &SigmaSets,
    sup: &Supports,
) -> Result<Vec<MiddleEntry>, RepError> {
    let alg = engine.window.alg.clone();
    let mut entries: Vec<MiddleEntry> = Vec::new();
    let c_set: BTreeSet<&String> = sup.intersection.iter().collect();
    let c_known = sup.left.unknown_vertices.is_empty() && sup.right.unknown_vertices.is_empty();
    let mut seen_dims: Vec<Representation> = Vec::new();
    // window members with certified double NO
    let n = engine.window.len();
    let mut candidates: Vec<(Representation, Option<usize>)> = Vec::new();
    for i in 0..n {
        candidates.push((engine.window.modules[i].clone(), Some(i)));
    }
    for p in engine.probes.clone() {
        candidates.push((p, None));
    }
    for (m, widx) in candidates {
        // dedup across window and probes
        if seen_dims
            .iter()
            .any(|p| p.dims == m.dims && is_isomorphic(p, &m).map(|o| o.is_some()).unwrap_or(false))
        {
            continue;
        }
        let (l_no, r_no) = match widx {
            Some(i) => {
                let l = engine.membership(i, Side::Left)?;
                let r = engine.membership(i, Side::Right)?;
                (
                    (l.status == Status::No).then(|| l.witness.unwrap()),
                    (r.status == Status::No).then(|| r.witness.unwrap()),
                )
            }
            None => {
                let pd = proj_dim(&m, engine.pd_cap)?;
                let id = inj_dim(&m, engine.pd_cap)?;
                let mk = |kind: &'static str, v: usize| WitnessChain {
                    chain: vec![m.clone()],
                    hom_dims: vec![],
                    bound_kind: kind,
                    bound_value: v,
                };
                (
                    pd.at_least(2).then(|| mk("pd", pd.lower_bound())),
                    id.at_least(2).then(|| mk("id", id.lower_bound())),
                )
            }
        };
        let (Some(lw), Some(rw)) = (l_no, r_no) else {
            continue;
        };
        // paths to and from the slices
        let sigma_prime_reps: Vec<usize> = sigma.sigma_prime.clone();
        let sigma_reps: Vec<usize> = sigma.sigma.clone();
        let path_from = match widx {
            Some(i) => {
                let mut found = None;
                for &sp in &sigma_prime_reps {
                    if engine.hom_exact(sp, i)? > 0 {
                        found = Some(vec![
                            engine.window.labels[sp].clone(),
                            engine.window.labels[i].clone(),
                        ]);
                        break;
                    }
                }
                found
            }
            None => {
                let mut found = None;
                for &sp in &sigma_prime_reps {
                    let s = engine.window.modules[sp].clone();
                    if hom_dim(&s, &m)? > 0 {
                        found = Some(vec![engine.window.labels[sp].clone(), m.label.clone()]);
                        break;
                    }
                }
                found
            }
        };
        let path_to = match widx {
            Some(i) => {
                let mut found = None;
                for &sg in &sigma_reps {
                    if engine.hom_exact(i, sg)? > 0 {
                        found = Some(vec![
                            engine.window.labels[i].clone(),
                            engine.window.labels[sg].clone(),
                        ]);
                        break;
                    }
                }
                found
            }
            None => {
                let mut found = None;
                for &sg in &sigma_reps {
                    let s = engine.window.modules[sg].clone();
                    if hom_dim(&m, &s)? > 0 {
                        found = Some(vec![m.label.clone(), engine.window.labels[sg].clone()]);
                        break;
                    }
                }
                found
            }
        };
        let support_ok = if c_known {
            Some(
                m.support()
                    .iter()
                    .all(|&v| c_set.contains(&alg.quiver.vertices[v])),
            )
        } else {
            None
        };
        // generation and cogeneration tests on complete windows
        let (gen, cogen) = if engine.window.complete {
            let gen = {
                let mut stacked: Vec<crate::matrix::Matrix> = (0..alg.quiver.n_vertices())
                    .map(|v| crate::matrix::Matrix::zeros(0, m.dims[v], alg.field))
                    .collect();
                for &sp in &sigma_prime_reps {
                    let s = engine.window.modules[sp].clone();
                    for f in crate::rep::hom_basis(&s, &m)? {
                        for v in 0..alg.quiver.n_vertices() {
                            stacked[v] = stacked[v].vstack(&f.mats[v]);
                        }
                    }
                }
                Some((0..alg.quiver.n_vertices()).all(|v| stacked[v].rank() == m.dims[v]))
            };
            let cogen = {
                let mut joint: Vec<crate::matrix::Matrix> = (0..alg.quiver.n_vertices())
                    .map(|v| crate::matrix::Matrix::zeros(m.dims[v], 0, alg.field))
                    .collect();
                for &sg in &sigma_reps {
                    let s = engine.window.modules[sg].clone();
                    for f in crate::rep::hom_basis(&m, &s)? {
                        for v in 0..alg.quiver.n_vertices() {
                            joint[v] = joint[v].hstack(&f.mats[v]);
                        }
                    }
                }
                Some(
                    (0..alg.quiver.n_vertices())
                        .all(|v| joint[v].kernel_rows().rows == 0),
                )
            };
            (gen, cogen)
        } else {
            (None, None)
        };
        entries.push(MiddleEntry {
            label: m.label.clone(),
            dims: m.dims.clone(),
            pd_witness: lw.labels(),
            id_witness: rw.labels(),
            path_from_sigma_prime: path_from,
            path_to_sigma: path_to,
            support_in_intersection: support_ok,
            generated_by_sigma_prime: gen,
            cogenerated_by_sigma: cogen,
        });
        seen_dims.push(m);
    }
    Ok(entries)
}

/// Structural consistency audits run after classification: the homological
/// bound (pd <= 2 or id <= 1) on every window module of an ada algebra, and
/// the two cover identities on complete windows. Violations mean the
/// classification is inconsistent and poison the report.
pub fn consistency_checks(
    engine: &mut MembershipEngine,
    cls: &ClassifyResult,
    sup: &Supports,
) -> Result<Vec<String>, RepError> {
    let mut violations = Vec::new();
    let is_ada = matches!(
        cls.verdict,
        Classification::Ada | Classification::StrictAda | Classification::QuasiTilted
    );
    if !is_ada {
        return Ok(violations);
    }
    let alg = engine.window.alg.clone();
    for i in 0..engine.window.len() {
        let pd = engine.pd_of(i)?;
        let id = engine.id_of(i)?;
        if !(pd.at_most(2) || id.at_most(1)) {
            violations.push(format!(
                "{} has pd {} and id {}",
                engine.window.labels[i], pd, id
            ));
        }
        if engine.window.complete {
            // every module lies in the left part or over the right support,
            // and in the right part or over the left support
            let l = engine.membership(i, Side::Left)?.status;
            let r = engine.membership(i, Side::Right)?.status;
            let in_rho = engine.window.modules[i]
                .support()
                .iter()
                .all(|&v| sup.right.vertices.contains(&alg.quiver.vertices[v]));
            let in_lambda = engine.window.modules[i]
                .support()
                .iter()
                .all(|&v| sup.left.vertices.contains(&alg.quiver.vertices[v]));
            if l != Status::Yes && !in_rho {
                violations.push(format!(
                    "{} escapes both the left part and the right support",
                    engine.window.labels[i]
                ));
            }
            if r != Status::Yes && !in_lambda {
                violations.push(format!(
                    "{} escapes both the right part and the left support",
                    engine.window.labels[i]
                ));
            }
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_algebra;
    use crate::arknit::{knit, Seeds};
    use crate::quiver::parse_spec;

    const EX22B: &str = "field Q\nvertex 1 2 3 4 5\narrow b1 2 1\narrow b2 3 2\narrow b3 4 3\narrow b4 5 4\nrel rad2\n";
    const KRON: &str = "field Q\nvertex 1 2\narrow a 1 2\narrow b 1 2\n";
    const EX22B_EXT: &str = "field Q\nvertex 1 2 3 4 5 6\narrow b1 2 1\narrow b2 3 2\narrow b3 4 3\narrow b4 5 4\narrow b5 6 5\nrel rad2\n";

    fn engine_for(text: &str, budget: usize) -> MembershipEngine {
        let (q, r, f) = parse_spec(text).unwrap();
        let a = build_algebra(q, r, f).unwrap();
        let w = Arc::new(knit(&a, Seeds::Both, budget, 60).unwrap());
        let mut e = MembershipEngine::new(w, 12).unwrap();
        e.preseed_hom_table();
        e
    }

    #[test]
    fn chain_is_strict_ada_certified() {
        let mut e = engine_for(EX22B, 50);
        let cls = classify(&mut e).unwrap();
        assert_eq!(cls.verdict, Classification::StrictAda);
        assert_eq!(cls.confidence, Confidence::Certified);
        assert!(cls.violations.is_empty());
        assert!(cls.pending.is_empty());
    }

    #[test]
    fn extended_chain_is_not_ada_with_witness_pair() {
        let mut e = engine_for(EX22B_EXT, 60);
        let cls = classify(&mut e).unwrap();
        assert_eq!(cls.verdict, Classification::NotAda);
        assert!(!cls.violations.is_empty());
        for (label, lw, rw) in &cls.violations {
            assert!(lw.replay(12).unwrap(), "left witness replays for {}", label);
            assert!(rw.replay(12).unwrap(), "right witness replays for {}", label);
        }
        // the offender is the middle projective-injective P4 = I3
        let names: Vec<&str> = cls.violations.iter().map(|(l, _, _)| l.as_str()).collect();
        assert!(names.contains(&"P4") || names.contains(&"I3"));
    }

    #[test]
    fn kronecker_is_quasi_tilted() {
        let mut e = engine_for(KRON, 14);
        let cls = classify(&mut e).unwrap();
        assert_eq!(cls.verdict, Classification::QuasiTilted);
        assert_eq!(cls.confidence, Confidence::WindowLimited);
    }

    #[test]
    fn chain_supports() {
        let mut e = engine_for(EX22B, 50);
        let cls = classify(&mut e).unwrap();
        let sup = supports(&mut e, &cls).unwrap();
        assert_eq!(sup.left.vertices, vec!["1", "2", "3"]);
        assert_eq!(sup.right.vertices, vec!["3", "4", "5"]);
        assert_eq!(sup.intersection, vec!["3"]);
        assert_eq!(sup.covers_all_vertices, Some(true));
        assert!(sup.left.convex);
        assert_eq!(sup.left.components.len(), 1);
        assert_eq!(sup.left.component_gd_le_2, vec![Some(true)]);
    }

    #[test]
    fn chain_theorem_a() {
        let mut e = engine_for(EX22B, 50);
        let cls = classify(&mut e).unwrap();
        let sup = supports(&mut e, &cls).unwrap();
        let sig = crate::parts::sigma_sets(&mut e).unwrap();
        let rep = theorem_a_report(&mut e, &sig, &cls, &sup).unwrap();
        assert!(rep.refused.is_none());
        assert_eq!(rep.sigma_components, 1);
        assert_eq!(rep.components.len(), 1);
        let c = &rep.components[0];
        assert_eq!(c.directed, Some(true));
        assert_eq!(c.generalized_standard, Some(true));
        assert!(c.convex_in_window);
        assert!(c.section.as_ref().unwrap().passes);
        assert!(c.slice.as_ref().unwrap().consistent_with_tilted);
        assert!(!rep.window_limited);
    }

    #[test]
    fn theorem_a_refused_without_strictness() {
        let mut e = engine_for("field Q\nvertex 1\n", 5);
        let cls = classify(&mut e).unwrap();
        assert_eq!(cls.verdict, Classification::QuasiTilted);
        let sup = supports(&mut e, &cls).unwrap();
        let sig = crate::parts::sigma_sets(&mut e).unwrap();
        let rep = theorem_a_report(&mut e, &sig, &cls, &sup).unwrap();
        assert!(rep.refused.is_some());
    }

    #[test]
    fn chain_middle_part_is_the_inner_simple() {
        let mut e = engine_for(EX22B, 50);
        let cls = classify(&mut e).unwrap();
        let sup = supports(&mut e, &cls).unwrap();
        let sig = crate::parts::sigma_sets(&mut e).unwrap();
        let mids = middle_part(&mut e, &sig, &sup).unwrap();
        assert_eq!(mids.len(), 1);
        let m = &mids[0];
        assert_eq!(m.dims, vec![0, 0, 1, 0, 0]);
        assert_eq!(m.support_in_intersection, Some(true));
        assert_eq!(m.generated_by_sigma_prime, Some(true));
        assert_eq!(m.cogenerated_by_sigma, Some(true));
        assert!(m.path_from_sigma_prime.is_some());
        assert!(m.path_to_sigma.is_some());
    }

    #[test]
    fn chain_consistency_checks_pass() {
        let mut e = engine_for(EX22B, 50);
        let cls = classify(&mut e).unwrap();
        let sup = supports(&mut e, &cls).unwrap();
        assert!(consistency_checks(&mut e, &cls, &sup).unwrap().is_empty());
    }

    #[test]
    fn subcategory_spot_checks_stay_ada() {
        // random-but-seeded vertex subsets of the chain never classify not-ada
        let (q, r, f) = parse_spec(EX22B).unwrap();
        let a = build_algebra(q, r, f).unwrap();
        let mut rng = crate::scalar::DetRng::new(0xADA);
        for _ in 0..6 {
            let subset: Vec<usize> = (0..5)
                .filter(|_| rng.next_u64() % 2 == 0)
                .collect();
            if subset.is_empty() {
                continue;
            }
            let sub = full_subcategory(&a, &subset).unwrap();
            let w = Arc::new(knit(&sub.algebra, Seeds::Both, 40, 60).unwrap());
            let mut e = MembershipEngine::new(w, 12).unwrap();
            let cls = classify(&mut e).unwrap();
            assert_ne!(
                cls.verdict,
                Classification::NotAda,
                "subset {:?} broke the idempotent stability",
                subset
            );
        }
    }
}
