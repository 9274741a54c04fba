// quick profiling harness
use adakit::algebra::build_algebra;
use adakit::arknit::{knit, Seeds};
use adakit::parts::MembershipEngine;
use adakit::quiver::parse_spec;
use std::sync::Arc;
use std::time::Instant;

fn main() {
    let text = std::fs::read_to_string("fixtures/ex22c.alg").unwrap();
    let (q, r, f) = parse_spec(&text).unwrap();
    let a = build_algebra(q, r, f).unwrap();
    let t0 = Instant::now();
    let w = Arc::new(knit(&a, Seeds::Both, 200, 60).unwrap());
    println!("knit: {:?} ({} modules)", t0.elapsed(), w.len());
    let t1 = Instant::now();
    let probes = adakit::parts::build_probes(&a, 12).unwrap();
    println!("probes: {:?} ({} probes)", t1.elapsed(), probes.len());
    let t2 = Instant::now();
    let table = adakit::par::hom_dim_table(&w);
    println!("hom table: {:?} ({} pairs)", t2.elapsed(), table.len());
    let t3 = Instant::now();
    let mut e = MembershipEngine::new(w.clone(), 12).unwrap();
    e.preseed_hom_table();
    let mut yes = 0;
    for i in 0..w.len() {
        for side in [adakit::parts::Side::Left, adakit::parts::Side::Right] {
            if e.membership(i, side).unwrap().status == adakit::parts::Status::Yes {
                yes += 1;
            }
        }
    }
    println!("all verdicts: {:?} ({} yes)", t3.elapsed(), yes);
}
