use adakit::algebra::build_algebra;
use adakit::quiver::parse_spec;
use adakit::report::{analyze, RunConfig};
use std::time::Instant;

fn main() {
    let file = std::env::args().nth(1).unwrap_or("fixtures/ex22c.alg".into());
    let text = std::fs::read_to_string(&file).unwrap();
    let (q, r, f) = parse_spec(&text).unwrap();
    let a = build_algebra(q, r, f).unwrap();
    let t = Instant::now();
    let rep = analyze(&a, &RunConfig::default()).unwrap();
    println!("analyze({}): {:?}", file, t.elapsed());
    println!(
        "verdict {:?}, middles {}, window {}",
        rep.json.classification.verdict,
        rep.json.middle.len(),
        rep.window.len()
    );
}
