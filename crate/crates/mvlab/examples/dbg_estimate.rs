use mvlab::estimate::*;
use mvlab::moments::Family;
use mvlab::rng::rng_for;
fn main() {
    let trials = 20;
    for seed in [2024u64, 7, 99] {
        for family in [Family::InverseGaussian, Family::Gamma] {
            let mut rng = rng_for(seed, &format!("tune/{family}"));
            let mut min_basin = usize::MAX;
            let mut clusters_gt1 = 0; let mut rec5 = 0; let mut rec8 = 0; let mut none8 = 0;
            for t in 0..trials {
                let (comps, weights) = plant_mixture(family, 2, &mut rng);
                let target = forward_moments(family, &comps, &weights, 8);
                let sys = MomentSystem::new(family, 2, target).unwrap();
                let mut cfg = SolverConfig::default();
                cfg.seed = 1000 * seed + t as u64;
                let set = solve(&sys, &cfg);
                let b = set.solutions.iter().map(|s| s.basin_count).max().unwrap_or(0);
                min_basin = min_basin.min(b);
                if set.solutions.len() > 1 { clusters_gt1 += 1; }
                if set.solutions.is_empty() { none8 += 1; }
                if planted_recovered(&set, &comps, &weights, 1e-6) { rec8 += 1; }
                let target5 = forward_moments(family, &comps, &weights, 5);
                let sys5 = MomentSystem::new(family, 2, target5).unwrap();
                let set5 = solve(&sys5, &cfg);
                if planted_recovered(&set5, &comps, &weights, 1e-6) { rec5 += 1; }
            }
            println!("seed {seed} {family}: rec8 {rec8}/{trials} rec5 {rec5}/{trials} multi-cluster@d8 {clusters_gt1} none@d8 {none8} min_basin {min_basin}");
        }
    }
}
