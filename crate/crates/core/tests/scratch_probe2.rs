use smale_core::axioms::search_axiom_constants;
use smale_core::solenoid::Solenoid;
use smale_core::Rational;

fn r(n: i64, d: i64) -> Rational { Rational::new(n, d) }

#[test]
#[ignore]
fn probe_solenoid_k2() {
    let sys = Solenoid::new();
    let t0 = std::time::Instant::now();
    let outcome = search_axiom_constants(
        &sys,
        2..=3,
        &[r(1, 4), r(1, 2), r(3, 4)],
        &[r(1, 9), r(1, 27), r(1, 243)],
        &r(1, 729),
        None,
    )
    .unwrap();
    println!("elapsed: {:?}", t0.elapsed());
    for a in &outcome.attempts {
        println!(
            "attempt K={} beta={} gamma={} a1={} a2={:?} {}",
            a.constants.big_k, a.constants.beta, a.constants.gamma, a.axiom1_pass, a.axiom2_pass, a.detail
        );
    }
    match &outcome.found {
        Some((c, a1, a2)) => println!(
            "FOUND K={} beta={} gamma={} | worst={:?} a1pairs={} | a2 samples={} worst={:?}",
            c.big_k, c.beta, c.gamma, a1.worst_ratio, a1.pairs_checked, a2.pairs_checked, a2.worst_ratio
        ),
        None => println!("NONE FOUND"),
    }
}
