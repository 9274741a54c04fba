use adakit::algebra::build_algebra;
use adakit::analysis::Classification;
use adakit::arknit::{knit, Seeds};
use adakit::hochschild::{hh_dims_relative, maximal_filtration, pi1_export};
use adakit::parts::{MembershipEngine, Side};
use adakit::quiver::parse_spec;
use adakit::rep::module_literal;
use adakit::report::{analyze, render_dot, to_json_string, RunConfig};
use adakit::BoundAlgebra;
use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::sync::Arc;

/// Decides whether a bound quiver algebra is an ada algebra and verifies the
/// structural and cohomological consequences on it.
#[derive(Parser)]
#[command(name = "adakit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedArg {
    Projectives,
    Injectives,
    Both,
}

impl From<SeedArg> for Seeds {
    fn from(s: SeedArg) -> Seeds {
        match s {
            SeedArg::Projectives => Seeds::Projectives,
            SeedArg::Injectives => Seeds::Injectives,
            SeedArg::Both => Seeds::Both,
        }
    }
}

#[derive(Subcommand)]
enum Commands {
    /// Full analysis: classification, supports, components, middle part,
    /// Hochschild cohomology and simple connectedness.
    Analyze {
        /// Algebra file
        file: PathBuf,
        /// Write the JSON report here
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write a DOT rendering of the knitted window here
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Knitting budget: maximum number of window modules
        #[arg(long)]
        budget: Option<usize>,
        /// Maximum total dimension of a window module
        #[arg(long)]
        max_dim: Option<usize>,
        /// Cap for projective/injective resolutions
        #[arg(long)]
        pd_cap: Option<usize>,
        /// Top cohomology degree
        #[arg(long)]
        hh_cap: Option<usize>,
        /// Knitting seeds
        #[arg(long, value_enum, default_value = "both")]
        seeds: SeedArg,
        /// Exit nonzero when the classification is only window-limited
        #[arg(long)]
        strict_certify: bool,
        /// Print the report to stdout even when --json is given
        #[arg(short, long)]
        verbose: bool,
    },
    /// Membership of one module in the left and right parts.
    Membership {
        file: PathBuf,
        /// Module literal: P<x>, I<x>, S<x> or @file.rep
        #[arg(long)]
        module: String,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        max_dim: Option<usize>,
    },
    /// Knit an AR window and optionally render it.
    Knit {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        from: SeedArg,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        max_dim: Option<usize>,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Hochschild cohomology dimensions.
    Hochschild {
        file: PathBuf,
        #[arg(long, default_value_t = 5)]
        degree_cap: usize,
    },
    /// Maximal filtration through one-point coextensions.
    Filtration {
        file: PathBuf,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Fundamental group presentation export.
    Pi1 { file: PathBuf },
}

fn load(file: &PathBuf) -> Result<Arc<BoundAlgebra>> {
    let text = std::fs::read_to_string(file)
        .with_context(|| format!("cannot read {}", file.display()))?;
    let (q, rels, f) =
        parse_spec(&text).with_context(|| format!("parse error in {}", file.display()))?;
    let alg = build_algebra(q, rels, f)
        .with_context(|| format!("cannot build the algebra from {}", file.display()))?;
    Ok(alg)
}

fn env_budget() -> Option<usize> {
    std::env::var("ADAKIT_BUDGET").ok().and_then(|v| v.parse().ok())
}

fn run() -> Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Commands::Analyze {
            file,
            json,
            dot,
            budget,
            max_dim,
            pd_cap,
            hh_cap,
            seeds,
            strict_certify,
            verbose,
        } => {
            let alg = load(&file)?;
            let mut config = RunConfig::default();
            if let Some(b) = budget.or_else(env_budget) {
                config.budget = b;
            }
            if let Some(d) = max_dim {
                config.max_dim = d;
            }
            if let Some(c) = pd_cap {
                config.pd_cap = c;
            }
            if let Some(c) = hh_cap {
                config.hh_cap = c;
            }
            config.seeds = seeds.into();
            config.strict_certify = strict_certify;
            let report = analyze(&alg, &config)?;
            let text = to_json_string(&report.json);
            match &json {
                Some(path) => {
                    std::fs::write(path, &text)
                        .with_context(|| format!("cannot write {}", path.display()))?;
                    if verbose {
                        println!("{}", text);
                    } else {
                        println!(
                            "classification: {:?} ({:?}); report written to {}",
                            report.json.classification.verdict,
                            report.json.classification.confidence,
                            path.display()
                        );
                    }
                }
                None => println!("{}", text),
            }
            if let Some(path) = dot {
                let dot_text =
                    render_dot(&report.window, Some(&report.sigma), Some(&report.r_certified));
                std::fs::write(&path, dot_text)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            if strict_certify
                && (report.json.classification.confidence
                    != adakit::analysis::Confidence::Certified
                    || report.json.classification.verdict == Classification::Unknown)
            {
                return Ok(3);
            }
            Ok(0)
        }
        Commands::Membership {
            file,
            module,
            budget,
            max_dim,
        } => {
            let alg = load(&file)?;
            let budget = budget
                .or_else(env_budget)
                .unwrap_or(adakit::arknit::DEFAULT_BUDGET);
            let max_dim = max_dim.unwrap_or(adakit::arknit::DEFAULT_MAX_DIM);
            let m = module_literal(&alg, &module, &|p| {
                std::fs::read_to_string(p).map_err(|e| e.to_string())
            })?;
            let window = Arc::new(knit(&alg, Seeds::Both, budget, max_dim)?);
            let mut engine = MembershipEngine::new(window.clone(), 12)?;
            let idx = window
                .find(&m)
                .context("module not reachable in the knitted window")?;
            for (side, name) in [(Side::Left, "left part"), (Side::Right, "right part")] {
                let v = engine.membership(idx, side)?;
                print!("{}: {:?} (rule {:?})", name, v.status, v.rule);
                if let Some(w) = &v.witness {
                    print!(
                        " witness: {} with {} {}",
                        w.labels().join(" ~> "),
                        w.bound_kind,
                        w.bound_value
                    );
                }
                if v.window_limited {
                    print!(" [window-limited]");
                }
                println!();
            }
            Ok(0)
        }
        Commands::Knit {
            file,
            from,
            budget,
            max_dim,
            dot,
        } => {
            let alg = load(&file)?;
            let budget = budget
                .or_else(env_budget)
                .unwrap_or(adakit::arknit::DEFAULT_BUDGET);
            let max_dim = max_dim.unwrap_or(adakit::arknit::DEFAULT_MAX_DIM);
            let window = knit(&alg, from.into(), budget, max_dim)?;
            println!(
                "window: {} modules, {} components, complete: {}",
                window.len(),
                window.components().len(),
                window.complete
            );
            for i in 0..window.len() {
                let dims = window.modules[i]
                    .dims
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                let mark = if window.boundary.contains(&i) {
                    " (boundary)"
                } else {
                    ""
                };
                println!("  {}:({}){}", window.labels[i], dims, mark);
            }
            if let Some(path) = dot {
                std::fs::write(&path, render_dot(&window, None, None))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            Ok(0)
        }
        Commands::Hochschild { file, degree_cap } => {
            let alg = load(&file)?;
            let rec = hh_dims_relative(&alg, degree_cap.clamp(2, 8))?;
            for (d, v) in rec.dims.iter().enumerate() {
                println!(
                    "HH^{}: {}  ({})",
                    d,
                    v,
                    rec.methods[d.min(rec.methods.len() - 1)]
                );
            }
            Ok(0)
        }
        Commands::Filtration { file, budget } => {
            let alg = load(&file)?;
            let budget = budget
                .or_else(env_budget)
                .unwrap_or(adakit::arknit::DEFAULT_BUDGET);
            let f = maximal_filtration(&alg, budget, adakit::arknit::DEFAULT_MAX_DIM, 12, None)?;
            if f.trivial {
                println!("trivial filtration: every projective already lies in the left part");
            }
            for s in &f.steps {
                println!(
                    "strip vertex {}: separating: {}, End(M) dim {}, Ext vanishing: {}",
                    s.vertex, s.separating, s.end_m_dim, s.ext_vanishing
                );
            }
            println!("base vertices: {}", f.base_vertices.join(" "));
            Ok(0)
        }
        Commands::Pi1 { file } => {
            let alg = load(&file)?;
            let p = pi1_export(&alg);
            println!(
                "generators: {}",
                if p.generators.is_empty() {
                    "(none)".into()
                } else {
                    p.generators.join(" ")
                }
            );
            println!(
                "relators: {}",
                if p.relators.is_empty() {
                    "(none)".into()
                } else {
                    p.relators.join("  ")
                }
            );
            match p.free_rank_when_no_relators {
                Some(r) => println!("presentation is free of rank {}", r),
                None => println!("presentation has relators; triviality is not decided here"),
            }
            Ok(0)
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            // operational failures (parse, i/o) exit with 2; negative
            // mathematical verdicts still exit 0
            eprintln!("error: {:#}", e);
            std::process::exit(2);
        }
    }
}
