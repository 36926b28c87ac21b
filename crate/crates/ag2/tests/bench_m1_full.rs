//! Per-verifier m = 1 probes (ignored by default). Uses the disk cache so
//! repeated runs skip the construction.
use ag2::ba::*;
use ag2::diffop::{make_d1, make_d2};
use std::time::Instant;

fn cached(via: BuildRoute) -> BAFunction {
    std::env::set_var("AG2_CACHE_DIR", "target/ag2-cache");
    let t = Instant::now();
    let (ba, hit) = ag2::io::cached_ba(1, via).unwrap();
    eprintln!("load m=1 {:?}: hit={} in {:.1?}", via, hit, t.elapsed());
    ba
}

#[test]
#[ignore]
fn m1_step_construct() {
    let ba = cached(BuildRoute::D1);
    eprintln!("deg {} c_exact {}", ba.z_degree(), ba.c_divides_exactly);
}

#[test]
#[ignore]
fn m1_step_axioms() {
    let ba = cached(BuildRoute::D1);
    let t = Instant::now();
    let ax = verify_axioms(&ba);
    eprintln!("axioms {:?} in {:.1?}", ax, t.elapsed());
    assert!(ax.values().all(|&v| v));
}

#[test]
#[ignore]
fn m1_step_eigen_d1() {
    let ba = cached(BuildRoute::D1);
    let t = Instant::now();
    let ok = verify_eigen_difference(&ba, &make_d1(1));
    eprintln!("eigen d1 {} in {:.1?}", ok, t.elapsed());
    assert!(ok);
}

#[test]
#[ignore]
fn m1_step_eigen_d2() {
    let ba = cached(BuildRoute::D1);
    let t = Instant::now();
    let ok = verify_eigen_difference(&ba, &make_d2(1));
    eprintln!("eigen d2 {} in {:.1?}", ok, t.elapsed());
    assert!(ok);
}

#[test]
#[ignore]
fn m1_step_subleading() {
    let ba = cached(BuildRoute::D1);
    let t = Instant::now();
    let ok = verify_subleading(&ba);
    eprintln!("subleading {} in {:.1?}", ok, t.elapsed());
    assert!(ok);
}

#[test]
#[ignore]
fn m1_step_schrodinger() {
    let ba = cached(BuildRoute::D1);
    let t = Instant::now();
    let ok = verify_eigen_schrodinger(&ba);
    eprintln!("schrodinger {} in {:.1?}", ok, t.elapsed());
    assert!(ok);
}
