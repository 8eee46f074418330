//! Command-line front end: exact moments, determinantal minors, secant
//! dimension certificates, blowup traces, Picard lattice checks, and the
//! mixture estimator, all with deterministic seeding and JSON output.
//!
//! Exit codes: 0 on success (and passing verdicts), 1 on failing verdicts or
//! infeasible inputs, 2 on usage errors.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;

use mvlab::blowup;
use mvlab::estimate::{self, SolverConfig};
use mvlab::minors;
use mvlab::moments::{
    self, parse_rational, ComponentParams, Family, GammaParams, IGParams, MixtureParams,
    MomentVector,
};
use mvlab::picard::{self, SurfaceDescriptor};
use mvlab::secant;

#[derive(Parser)]
#[command(
    name = "mvlab",
    version,
    about = "Moment varieties of inverse Gaussian and gamma mixtures: exact certificates and estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FamilyArg {
    /// Distribution family: `ig` or `gamma`.
    #[arg(long, value_parser = parse_family)]
    family: Family,
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::parse(s).ok_or_else(|| format!("unknown family `{s}` (expected `ig` or `gamma`)"))
}

#[derive(Subcommand)]
enum Command {
    /// Exact moments of a component or mixture.
    Moments {
        #[command(flatten)]
        family: FamilyArg,
        /// Highest moment order.
        #[arg(long)]
        d: usize,
        /// Component parameters `a,b` as exact rationals (`mu,lambda` or
        /// `theta,shape`); repeat for mixtures.
        #[arg(long = "component", required = true)]
        components: Vec<String>,
        /// Mixture weights as exact rationals, comma separated.
        #[arg(long)]
        weights: Option<String>,
        /// Emit float-mode values instead of exact rationals.
        #[arg(long)]
        float: bool,
        /// JSON output.
        #[arg(long)]
        json: bool,
    },
    /// Maximal minors of the 3×d moment matrix.
    Minors {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        d: usize,
        /// Include the minors themselves in text form.
        #[arg(long)]
        polynomials: bool,
        /// JSON output.
        #[arg(long)]
        json: bool,
    },
    /// Certify the dimension of the k-th secant variety by exact Jacobian
    /// rank at seeded random points.
    #[command(name = "secant-dim")]
    SecantDim {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long, default_value_t = 5)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples drawn before reporting Inconclusive.
        #[arg(long, default_value_t = secant::DEFAULT_RETRIES)]
        retries: usize,
        /// Run the whole base-case grid 2 <= d <= 8 instead of one (d, k).
        #[arg(long)]
        sweep: bool,
        /// JSON output.
        #[arg(long)]
        json: bool,
    },
    /// Trace the blowup resolution of the parametrization.
    #[command(name = "blowup-trace")]
    BlowupTrace {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        d: usize,
        /// Only the chain over this base point (label as printed, e.g. P1).
        #[arg(long)]
        point: Option<String>,
        /// JSON output (the full resolution tree).
        #[arg(long)]
        json: bool,
    },
    /// Picard lattice checks: degree identities or reduction ledgers.
    Picard {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        d: usize,
        /// `degree` or `ledger`.
        #[arg(long)]
        check: String,
        /// Mixture count for the ledger check.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// JSON output.
        #[arg(long)]
        json: bool,
    },
    /// Method-of-moments estimation from a moment vector file.
    Estimate {
        #[command(flatten)]
        family: FamilyArg,
        #[arg(long)]
        k: usize,
        /// Path to a MomentVector JSON file (float or exact mode).
        #[arg(long)]
        moments: std::path::PathBuf,
        /// Use only the first d moments of the file.
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON output.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("MVLAB_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Moments {
            family,
            d,
            components,
            weights,
            float,
            json,
        } => cmd_moments(family.family, d, &components, weights.as_deref(), float, json),
        Command::Minors {
            family,
            d,
            polynomials,
            json,
        } => cmd_minors(family.family, d, polynomials, json),
        Command::SecantDim {
            family,
            d,
            k,
            seed,
            retries,
            sweep,
            json,
        } => cmd_secant(family.family, d, k, seed, retries, sweep, json),
        Command::BlowupTrace {
            family,
            d,
            point,
            json,
        } => cmd_blowup(family.family, d, point.as_deref(), json),
        Command::Picard {
            family,
            d,
            check,
            k,
            json,
        } => cmd_picard(family.family, d, &check, k, json),
        Command::Estimate {
            family,
            k,
            moments,
            d,
            starts,
            seed,
            json,
        } => cmd_estimate(family.family, k, &moments, d, starts, seed, json),
    }
}

fn parse_rational_list(s: &str) -> Result<Vec<BigRational>, String> {
    s.split(',').map(|p| parse_rational(p.trim())).collect()
}

fn cmd_moments(
    family: Family,
    d: usize,
    components: &[String],
    weights: Option<&str>,
    float: bool,
    json: bool,
) -> Result<ExitCode, String> {
    let comps: Vec<ComponentParams> = components
        .iter()
        .map(|spec| {
            let vals = parse_rational_list(spec)?;
            if vals.len() != 2 {
                return Err(format!("component `{spec}` must have exactly two parameters"));
            }
            Ok(match family {
                Family::InverseGaussian => ComponentParams::InverseGaussian(IGParams {
                    mu: vals[0].clone(),
                    lambda: vals[1].clone(),
                }),
                Family::Gamma => ComponentParams::Gamma(GammaParams {
                    theta: vals[0].clone(),
                    shape: vals[1].clone(),
                }),
            })
        })
        .collect::<Result<_, String>>()?;
    let weights = match weights {
        Some(w) => parse_rational_list(w)?,
        None if comps.len() == 1 => vec![BigRational::from_integer(1.into())],
        None => return Err("mixtures need --weights".into()),
    };
    let mix = MixtureParams::new(family, comps, weights).map_err(|e| e.to_string())?;
    let mv = moments::mixture_moments(&mix, d).map_err(|e| e.to_string())?;
    let mv = if float {
        MomentVector::float(family, mv.float_values())
    } else {
        mv
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&mv).map_err(|e| e.to_string())?);
    } else {
        let values = match &mv.values {
            moments::MomentValues::Exact(v) => v
                .iter()
                .map(|r| format!("{}/{}", r.numer(), r.denom()))
                .collect::<Vec<_>>(),
            moments::MomentValues::Float(v) => v.iter().map(|x| format!("{x}")).collect(),
        };
        for (r, v) in values.iter().enumerate() {
            println!("m_{r} = {v}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_minors(family: Family, d: usize, polynomials: bool, json: bool) -> Result<ExitCode, String> {
    let matrix = minors::build_matrix(family, d).map_err(|e| e.to_string())?;
    let set = minors::maximal_minors(&matrix);
    let report = set.report(polynomials);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
        );
    } else {
        println!("family {family}, d = {d}: {} maximal minors", report.count);
        for (deg, count) in &report.degree_histogram {
            println!("  degree {deg}: {count}");
        }
        if let Some(polys) = &report.polynomials {
            for p in polys {
                println!("  {p}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_secant(
    family: Family,
    d: usize,
    k: usize,
    seed: u64,
    retries: usize,
    sweep: bool,
    json: bool,
) -> Result<ExitCode, String> {
    let certs = if sweep {
        secant::base_case_sweep(family, seed, retries)
    } else {
        vec![secant::certify(family, d, k, seed, retries)]
    };
    if json {
        let body = if sweep {
            serde_json::to_string_pretty(&certs)
        } else {
            serde_json::to_string_pretty(&certs[0])
        };
        println!("{}", body.map_err(|e| e.to_string())?);
    } else {
        for c in &certs {
            println!(
                "{} d={} k={}: rank {} of expected {} -> {:?} ({} ms)",
                c.family, c.d, c.k, c.jacobian_rank, c.expected_dim, c.verdict, c.elapsed_ms
            );
        }
    }
    let all_ok = certs
        .iter()
        .all(|c| c.verdict == secant::Verdict::Nondefective);
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_blowup(
    family: Family,
    d: usize,
    point: Option<&str>,
    json: bool,
) -> Result<ExitCode, String> {
    let mut tree = blowup::resolve(family, d).map_err(|e| e.to_string())?;
    if let Some(label) = point {
        tree.chains.retain(|c| c.base.label == label);
        if tree.chains.is_empty() {
            return Err(format!("no base point labeled `{label}`"));
        }
    }
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&tree).map_err(|e| e.to_string())?
        );
        return Ok(ExitCode::SUCCESS);
    }
    for chain in &tree.chains {
        println!("base point {} (chart {})", chain.base.label, chain.base.chart);
        match &chain.kind {
            blowup::ChainKind::Blowups(steps) => {
                for step in steps {
                    println!(
                        "  E_{{{},{}}}: multiplicity {}, chart ({}, {}), removed {}",
                        chain.base_index,
                        step.j,
                        step.multiplicity,
                        step.chart.vars[0],
                        step.chart.vars[1],
                        step.factor
                    );
                    for (i, c) in step.chart.coords.iter().enumerate() {
                        println!("    f{i} = {c}");
                    }
                    match &step.next_center {
                        Some(c) => println!("    next center ({}, {})", c[0], c[1]),
                        None => println!("    no further base points"),
                    }
                }
            }
            blowup::ChainKind::AlgebraicFamily {
                count,
                multiplicity,
            } => {
                println!(
                    "  {count} conjugate simple points (multiplicity {multiplicity}), one blowup each, no new base points"
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_picard(
    family: Family,
    d: usize,
    check: &str,
    k: usize,
    json: bool,
) -> Result<ExitCode, String> {
    match check {
        "degree" => {
            let result = picard::degree_check(family, d);
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&result).map_err(|e| e.to_string())?
                );
            } else {
                println!(
                    "family {family}, d = {d}: H^2 = {}, expected {} -> {}",
                    result.hsq,
                    result.expected,
                    if result.ok { "ok" } else { "MISMATCH" }
                );
            }
            Ok(if result.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        "ledger" => {
            let surface = SurfaceDescriptor::new(family, d);
            let a = picard::cone_residual_class(&surface, k);
            let catalog = picard::reduction_catalog(&surface);
            let ledger = picard::ledger_reduce(&a, &catalog).map_err(|e| e.to_string())?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&ledger).map_err(|e| e.to_string())?
                );
            } else {
                println!("start: {}", ledger.start);
                for e in &ledger.entries {
                    println!(
                        "  remove {} (intersection {}), rest {}",
                        e.component, e.intersection, e.remainder
                    );
                }
                println!("terminal: {}", ledger.terminal);
            }
            Ok(ExitCode::SUCCESS)
        }
        other => Err(format!("unknown check `{other}` (expected `degree` or `ledger`)")),
    }
}

fn cmd_estimate(
    family: Family,
    k: usize,
    path: &std::path::Path,
    d: Option<usize>,
    starts: usize,
    seed: u64,
    json: bool,
) -> Result<ExitCode, String> {
    let body = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mv: MomentVector = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    if mv.family != family {
        return Err(format!(
            "moment file is for family {}, requested {family}",
            mv.family
        ));
    }
    let mut values = mv.float_values();
    values.remove(0); // drop m_0
    if let Some(d) = d {
        if d > values.len() {
            return Err(format!("file provides {} moments, need d = {d}", values.len()));
        }
        values.truncate(d);
    }
    // Closed form for a single component fed exactly two moments.
    if k == 1 && values.len() == 2 {
        let params = estimate::invert_single(family, values[0], values[1])
            .map_err(|e| e.to_string())?;
        let names = match family {
            Family::InverseGaussian => ["mu", "lambda"],
            Family::Gamma => ["theta", "shape"],
        };
        if json {
            println!(
                "{}",
                serde_json::json!({
                    "family": family.tag(),
                    "k": 1,
                    "solutions": [{
                        "components": [params],
                        "weights": [1.0],
                        "residual": 0.0,
                    }],
                    "verdict": "UniqueUpToPermutation",
                })
            );
        } else {
            println!("{} = {}, {} = {}", names[0], params[0], names[1], params[1]);
        }
        return Ok(ExitCode::SUCCESS);
    }
    let sys = estimate::MomentSystem::new(family, k, values).map_err(|e| e.to_string())?;
    let config = SolverConfig {
        starts,
        seed,
        ..SolverConfig::default()
    };
    let set = estimate::solve(&sys, &config);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&set).map_err(|e| e.to_string())?
        );
    } else {
        println!(
            "{} k={} d={}: {:?}, {} cluster(s) from {}/{} converged starts",
            set.family,
            set.k,
            set.d,
            set.verdict,
            set.solutions.len(),
            set.converged_starts,
            set.total_starts
        );
        for s in &set.solutions {
            println!(
                "  residual {:.2e}, basin {}: components {:?}, weights {:?}",
                s.residual, s.basin_count, s.components, s.weights
            );
        }
    }
    Ok(
        if set.verdict == estimate::UniquenessVerdict::NoneFound {
            ExitCode::from(1)
        } else {
            ExitCode::SUCCESS
        },
    )
}
