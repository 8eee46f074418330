use mvlab::estimate::*;
use mvlab::moments::Family;
fn main() {
    let cases: [(Family, [[f64;2];2], [f64;2]); 2] = [
        (Family::InverseGaussian, [[1.3140045310803656, 0.36595837540661136], [3.2449501617251486, 0.2827407206419462]], [0.709932175533593, 0.290067824466407]),
        (Family::Gamma, [[0.6376686340567954, 1.8515097898746085], [0.6171643672316027, 0.823870391123889]], [0.21174006406310042, 0.7882599359368996]),
    ];
    for (family, comps, weights) in cases {
        for d in [5usize, 8] {
            let target = forward_moments(family, &comps, &weights, d);
            let sys = MomentSystem::new(family, 2, target).unwrap();
            let mut cfg = SolverConfig::default();
            cfg.seed = 1000 * 2024 + 13;
            let set = solve(&sys, &cfg);
            let rec = planted_recovered(&set, &comps, &weights, 1e-6);
            println!("{family} d={d}: verdict {:?} clusters {} converged {} recovered {rec}",
                set.verdict, set.solutions.len(), set.converged_starts);
            for s in set.solutions.iter().take(4) {
                println!("   residual {:.2e} basin {:3} comps {:?} w {:?}", s.residual, s.basin_count, s.components, s.weights);
            }
        }
    }
}
