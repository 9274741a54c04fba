//! End-to-end analysis pipeline, the versioned JSON report, and DOT export
//! of knitted windows. Reports are byte-identical across runs for identical
//! inputs and configuration.

use crate::algebra::BoundAlgebra;
use crate::analysis::{
    classify, consistency_checks, middle_part, supports, theorem_a_report, Classification,
    ClassifyResult, Confidence, MiddleEntry, Supports, TheoremAReport,
};
use crate::arknit::{knit, ArWindow, Seeds};
use crate::hochschild::{
    happel_check, hh_dims_relative, maximal_filtration, pi1_export, simple_connectedness,
    tree_type_check, Filtration, HappelStep, HhError, Pi1Presentation, DEFAULT_HH_CAP,
};
use crate::homology::{global_dimension, DEFAULT_PD_CAP};
use crate::parts::{sigma_sets, MembershipEngine, SigmaSets, Status, Verdict};
use crate::rep::RepError;
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Hochschild(#[from] HhError),
    #[error("knitting failed: {0}")]
    Knit(String),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub budget: usize,
    pub max_dim: usize,
    pub pd_cap: usize,
    pub hh_cap: usize,
    pub seeds: Seeds,
    pub strict_certify: bool,
}

pub const HARD_BUDGET_CAP: usize = 10_000;
pub const HARD_DIM_CAP: usize = 512;
pub const HARD_HH_CAP: usize = 8;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            budget: crate::arknit::DEFAULT_BUDGET,
            max_dim: crate::arknit::DEFAULT_MAX_DIM,
            pd_cap: DEFAULT_PD_CAP,
            hh_cap: DEFAULT_HH_CAP,
            seeds: Seeds::Both,
            strict_certify: false,
        }
    }
}

impl RunConfig {
    pub fn validated(mut self) -> Self {
        self.budget = self.budget.clamp(1, HARD_BUDGET_CAP);
        self.max_dim = self.max_dim.clamp(1, HARD_DIM_CAP);
        self.hh_cap = self.hh_cap.clamp(2, HARD_HH_CAP);
        self.pd_cap = self.pd_cap.max(1);
        self
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictJson {
    pub status: Status,
    pub rule: crate::parts::Rule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
    pub window_limited: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct WitnessJson {
    pub chain: Vec<String>,
    pub hom_dims: Vec<usize>,
    pub bound: String,
    pub value: usize,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        VerdictJson {
            status: v.status,
            rule: v.rule,
            witness: v.witness.as_ref().map(|w| WitnessJson {
                chain: w.labels(),
                hom_dims: w.hom_dims.clone(),
                bound: w.bound_kind.to_string(),
                value: w.bound_value,
            }),
            window_limited: v.window_limited,
            notes: v.notes.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MembershipEntry {
    pub module: String,
    pub left: VerdictJson,
    pub right: VerdictJson,
}

#[derive(Debug, Serialize)]
pub struct WindowJson {
    pub modules: usize,
    pub complete: bool,
    pub budget_hit: bool,
    pub dim_cap_hit: bool,
    pub boundary: Vec<String>,
    pub components: usize,
    pub labels: Vec<String>,
    pub dim_vectors: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize)]
pub struct SigmaJson {
    pub sigma: Vec<String>,
    pub sigma_pending: Vec<String>,
    pub sigma_prime: Vec<String>,
    pub sigma_prime_pending: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ClassificationJson {
    pub verdict: Classification,
    pub confidence: Confidence,
    pub pending: Vec<String>,
    pub violations: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct HochschildJson {
    pub dims: Vec<usize>,
    pub methods: Vec<String>,
    pub derivation_dim: usize,
    pub inner_dim: usize,
    pub filtration: Option<FiltrationJson>,
    pub happel: Vec<HappelStep>,
}

#[derive(Debug, Serialize)]
pub struct FiltrationJson {
    pub steps: Vec<crate::hochschild::FiltrationStep>,
    pub base_vertices: Vec<String>,
    pub base_is_left_support: Option<bool>,
    pub trivial: bool,
}

#[derive(Debug, Serialize)]
pub struct ScJson {
    pub verdict: Option<bool>,
    pub confidence: Confidence,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refused: Option<String>,
    pub hh1: usize,
    pub tree_type: Option<bool>,
    pub separating_all: Option<bool>,
    pub ring_reduces_to_k: Option<bool>,
    pub presentation_certificate: bool,
}

/// The full JSON report. Field names are the stable external schema.
#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub schema: u32,
    pub header: HeaderJson,
    pub classification: ClassificationJson,
    pub membership: Vec<MembershipEntry>,
    pub standard_isomorphisms: Vec<String>,
    pub global_dimension: String,
    pub window: WindowJson,
    pub supports: Supports,
    pub sigma: SigmaJson,
    pub components: Option<TheoremAReport>,
    pub middle: Vec<MiddleEntry>,
    pub hochschild: HochschildJson,
    pub filtration: Option<FiltrationJson>,
    pub simply_connected: ScJson,
    pub pi1: Pi1Presentation,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct HeaderJson {
    pub tool: String,
    pub field: String,
    pub vertices: usize,
    pub arrows: usize,
    pub algebra_dim: usize,
    pub nilpotency: usize,
    pub triangular: bool,
    pub connected: bool,
    pub setting: String,
}

pub struct FullReport {
    pub json: ReportJson,
    pub window: Arc<ArWindow>,
    pub classification: ClassifyResult,
    pub sigma: SigmaSets,
    pub engine_sigma_labels: Vec<String>,
    pub r_certified: Vec<bool>,
}

/// Runs the whole pipeline: knit, membership, classification, supports,
/// component structure, middle part, filtration, cohomology and the
/// simple-connectedness verdict.
pub fn analyze(alg: &Arc<BoundAlgebra>, config: &RunConfig) -> Result<FullReport, ReportError> {
    let config = config.clone().validated();
    let window = Arc::new(
        knit(alg, config.seeds, config.budget, config.max_dim)
            .map_err(|e| ReportError::Knit(e.to_string()))?,
    );
    let mut engine = MembershipEngine::new(window.clone(), config.pd_cap)?;
    if window.len() <= 80 {
        engine.preseed_hom_table();
    }
    let cls = classify(&mut engine)?;
    let sup = supports(&mut engine, &cls)?;
    let sigma = sigma_sets(&mut engine)?;
    let thma = theorem_a_report(&mut engine, &sigma, &cls, &sup)?;
    let middle = middle_part(&mut engine, &sigma, &sup)?;
    let mut warnings: Vec<String> = Vec::new();
    warnings.extend(cls.warnings.clone());
    for v in consistency_checks(&mut engine, &cls, &sup)? {
        warnings.push(format!("classification inconsistency: {}", v));
    }
    if !window.complete {
        warnings.push("window incomplete: verdicts beyond it are window-limited".into());
    }
    if window.budget_hit {
        warnings.push("knitting budget exhausted".into());
    }
    if window.dim_cap_hit {
        warnings.push("module dimension cap reached during knitting".into());
    }
    // cohomology and filtration
    let hh = hh_dims_relative(alg, config.hh_cap)?;
    let (der_dim, inner_dim, _) = crate::hochschild::hh1_data(alg);
    let filtration: Option<Filtration> = match cls.verdict {
        Classification::StrictAda => Some(maximal_filtration(
            alg,
            config.budget,
            config.max_dim,
            config.pd_cap,
            Some(
                &sup.left
                    .vertices
                    .iter()
                    .cloned()
                    .collect::<Vec<String>>(),
            ),
        )?),
        Classification::QuasiTilted | Classification::Ada => Some(Filtration {
            steps: Vec::new(),
            algebras: vec![alg.clone()],
            extension_modules: Vec::new(),
            base_vertices: alg.quiver.vertices.clone(),
            base_is_left_support: None,
            trivial: true,
        }),
        _ => None,
    };
    let happel = match &filtration {
        Some(f) if !f.trivial => happel_check(f, config.hh_cap)?,
        _ => Vec::new(),
    };
    let tree = tree_type_check(&mut engine, &sigma)?;
    let pi1 = pi1_export(alg);
    let sc = simple_connectedness(&cls, &hh, tree, filtration.as_ref(), &pi1);
    warnings.extend(sc.warnings.clone());
    if let Some(r) = &thma.refused {
        if cls.verdict != Classification::QuasiTilted {
            warnings.push(format!("component report refused: {}", r));
        }
    }
    // standard-module coincidences (P_x = I_y detections)
    let mut std_isos = Vec::new();
    for i in 0..window.len() {
        if let (Some(p), Some(q)) = (window.proj_vertex[i], window.inj_vertex[i]) {
            std_isos.push(format!(
                "P{} = I{}",
                alg.quiver.vertices[p], alg.quiver.vertices[q]
            ));
        }
    }
    let gd = global_dimension(alg, config.pd_cap)?;
    let r_certified: Vec<bool> = {
        let mut v = Vec::with_capacity(window.len());
        for i in 0..window.len() {
            let s = engine.membership(i, crate::parts::Side::Right)?;
            v.push(s.status == Status::Yes);
        }
        v
    };
    let membership: Vec<MembershipEntry> = {
        let nv = alg.quiver.n_vertices();
        let mut out = Vec::new();
        for x in 0..nv {
            out.push(MembershipEntry {
                module: format!("P{}", alg.quiver.vertices[x]),
                left: (&cls.proj_verdicts[x].left).into(),
                right: (&cls.proj_verdicts[x].right).into(),
            });
        }
        for x in 0..nv {
            out.push(MembershipEntry {
                module: format!("I{}", alg.quiver.vertices[x]),
                left: (&cls.inj_verdicts[x].left).into(),
                right: (&cls.inj_verdicts[x].right).into(),
            });
        }
        out
    };
    let label_list = |ix: &Vec<usize>| -> Vec<String> {
        let mut v: Vec<String> = ix.iter().map(|&i| window.labels[i].clone()).collect();
        v.sort();
        v
    };
    let filtration_json = filtration.as_ref().map(|f| FiltrationJson {
        steps: f.steps.clone(),
        base_vertices: f.base_vertices.clone(),
        base_is_left_support: f.base_is_left_support,
        trivial: f.trivial,
    });
    let json = ReportJson {
        schema: 1,
        header: HeaderJson {
            tool: "adakit".into(),
            field: alg.field.to_string(),
            vertices: alg.quiver.n_vertices(),
            arrows: alg.quiver.n_arrows(),
            algebra_dim: alg.dim(),
            nilpotency: alg.nilpotency,
            triangular: alg.is_triangular(),
            connected: alg.is_connected(),
            setting: "bound quiver algebra over an exact field; statements checked in this setting"
                .into(),
        },
        classification: ClassificationJson {
            verdict: cls.verdict,
            confidence: cls.confidence,
            pending: cls.pending.clone(),
            violations: cls.violations.iter().map(|(l, _, _)| l.clone()).collect(),
        },
        membership,
        standard_isomorphisms: std_isos,
        global_dimension: gd.to_string(),
        window: WindowJson {
            modules: window.len(),
            complete: window.complete,
            budget_hit: window.budget_hit,
            dim_cap_hit: window.dim_cap_hit,
            boundary: window
                .boundary
                .iter()
                .map(|&i| window.labels[i].clone())
                .collect(),
            components: window.components().len(),
            labels: window.labels.clone(),
            dim_vectors: window.modules.iter().map(|m| m.dims.clone()).collect(),
        },
        supports: sup,
        sigma: SigmaJson {
            sigma: label_list(&sigma.sigma),
            sigma_pending: label_list(&sigma.sigma_pending),
            sigma_prime: label_list(&sigma.sigma_prime),
            sigma_prime_pending: label_list(&sigma.sigma_prime_pending),
        },
        components: Some(thma),
        middle,
        hochschild: HochschildJson {
            dims: hh.dims.clone(),
            methods: hh.methods.clone(),
            derivation_dim: der_dim,
            inner_dim,
            filtration: filtration_json.as_ref().map(|f| FiltrationJson {
                steps: f.steps.clone(),
                base_vertices: f.base_vertices.clone(),
                base_is_left_support: f.base_is_left_support,
                trivial: f.trivial,
            }),
            happel,
        },
        filtration: filtration_json,
        simply_connected: ScJson {
            verdict: sc.verdict,
            confidence: sc.confidence,
            refused: sc.refused.clone(),
            hh1: sc.hh1,
            tree_type: sc.tree_type,
            separating_all: sc.separating_all,
            ring_reduces_to_k: sc.ring_reduces_to_k,
            presentation_certificate: sc.presentation_certificate,
        },
        pi1,
        warnings,
    };
    let sigma_labels = json.sigma.sigma.clone();
    Ok(FullReport {
        json,
        window,
        classification: cls,
        sigma,
        engine_sigma_labels: sigma_labels,
        r_certified,
    })
}

/// Deterministic DOT rendering: solid edges are irreducible maps, dashed
/// edges are tau links; slice members are annotated and modules certified in
/// the right part carry a star.
pub fn render_dot(
    window: &ArWindow,
    sigma: Option<&SigmaSets>,
    r_certified: Option<&[bool]>,
) -> String {
    let mut out = String::from("digraph ar_window {\n  rankdir=LR;\n  node [shape=box];\n");
    for i in 0..window.len() {
        let dims = window.modules[i]
            .dims
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut marks = String::new();
        if let Some(rc) = r_certified {
            if rc[i] {
                marks.push('*');
            }
        }
        if let Some(s) = sigma {
            if s.sigma.contains(&i) {
                marks.push_str(" [S]");
            }
            if s.sigma_prime.contains(&i) {
                marks.push_str(" [S']");
            }
        }
        out.push_str(&format!(
            "  n{} [label=\"{}:({}){}\"];\n",
            i, window.labels[i], dims, marks
        ));
    }
    let mut solid: Vec<(usize, usize)> = window.arrows.iter().map(|a| (a.from, a.to)).collect();
    solid.sort_unstable();
    for (f, t) in solid {
        out.push_str(&format!("  n{} -> n{};\n", f, t));
    }
    let mut dashed: Vec<(usize, usize)> = window
        .tau
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.map(|t| (i, t)))
        .collect();
    dashed.sort_unstable();
    for (f, t) in dashed {
        out.push_str(&format!(
            "  n{} -> n{} [style=dashed, constraint=false];\n",
            f, t
        ));
    }
    out.push_str("}\n");
    out
}

/// Serializes the report with stable field order.
pub fn to_json_string(report: &ReportJson) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_algebra;
    use crate::quiver::parse_spec;

    const EX22B: &str = "field Q\nvertex 1 2 3 4 5\narrow b1 2 1\narrow b2 3 2\narrow b3 4 3\narrow b4 5 4\nrel rad2\n";

    fn alg(text: &str) -> Arc<BoundAlgebra> {
        let (q, r, f) = parse_spec(text).unwrap();
        build_algebra(q, r, f).unwrap()
    }

    #[test]
    fn chain_report_end_to_end() {
        let a = alg(EX22B);
        let rep = analyze(&a, &RunConfig::default()).unwrap();
        assert_eq!(rep.json.classification.verdict, Classification::StrictAda);
        assert_eq!(rep.json.classification.confidence, Confidence::Certified);
        assert_eq!(rep.json.global_dimension, "4");
        assert_eq!(rep.json.hochschild.dims, vec![1, 0, 0, 0, 0, 0]);
        assert_eq!(rep.json.simply_connected.verdict, Some(true));
        assert!(rep.json.warnings.is_empty());
        // P2=I1, P3=I2, P4=I3, P5=I4 all detected
        assert_eq!(rep.json.standard_isomorphisms.len(), 4);
    }

    #[test]
    fn reports_are_byte_identical() {
        let a = alg(EX22B);
        let r1 = to_json_string(&analyze(&a, &RunConfig::default()).unwrap().json);
        let b = alg(EX22B);
        let r2 = to_json_string(&analyze(&b, &RunConfig::default()).unwrap().json);
        assert_eq!(r1, r2);
    }

    #[test]
    fn dot_is_stable_and_complete() {
        let a = alg(EX22B);
        let rep = analyze(&a, &RunConfig::default()).unwrap();
        let dot = render_dot(&rep.window, Some(&rep.sigma), Some(&rep.r_certified));
        // 9 nodes, 8 irreducible maps, 4 tau links in the simple orbit
        assert_eq!(dot.matches("[label=").count(), 9);
        assert_eq!(dot.matches("style=dashed").count(), 4);
        let solid = dot.lines().filter(|l| l.contains("->") && !l.contains("dashed")).count();
        assert_eq!(solid, 8);
        let dot2 = render_dot(&rep.window, Some(&rep.sigma), Some(&rep.r_certified));
        assert_eq!(dot, dot2);
    }
}
