use qflab::groups::{amalgam_with_handle_trace, bend, octagon_fuchsian, separating_curve_trace};
use qflab::orbit::{critical_exponent, enumerate_orbit, OrbitParams};

fn main() {
    let oct = octagon_fuchsian();
    let run = |label: &str, g: &qflab::groups::GroupPresentation, depth: usize, prune: f64| {
        let orbit = enumerate_orbit(
            g,
            &OrbitParams { max_len: depth, prune: Some(prune), element_cap: 8_000_000 },
        )
        .unwrap();
        let fit = critical_exponent(&orbit).unwrap();
        println!(
            "{label} d={depth} prune={prune:.0e}: n={} p={:.4}+-{:.4}",
            orbit.elements.len(),
            fit.p_hat,
            fit.stderr
        );
    };
    run("octagon", &oct, 14, 1e6);
    for th in [2.9f64, 3.0, 3.2, 3.6] {
        let ama = amalgam_with_handle_trace(th);
        println!("-- handle trace {th} trK={:+.2}", separating_curve_trace(&ama).re);
        run("  base  ", &ama, 14, 1e6);
        for theta in [0.2, 0.3, 0.45] {
            run(
                &format!("  bent:{theta}"),
                &bend(&ama, theta).unwrap(),
                14,
                1e6,
            );
        }
    }
}
