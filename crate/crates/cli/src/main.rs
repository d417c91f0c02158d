use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::json;

use p3hc::exact::{cycle_brute_force, loop_bound_holds, loop_partition_function, verify_lemma1_template};
use p3hc::gibbs::{
    certificate_holds, crude_activity_bound, glauber_sample, polymer_series_bound, tau_threshold, Boundary,
    SampleManifest,
};
use p3hc::golden::{parse_rational, GoldenNumber};
use p3hc::graph::Parity;
use p3hc::ground_state::{exact_density, pattern_window_density, window_density, Configuration};
use p3hc::partition::{template_of_kind, PatternKind};
use p3hc::pipeline::{Patch, Pipeline};
use p3hc::render::{file_name, render_ground_state, render_overlay, render_tiling, Layers, RenderStyle};
use p3hc::substitution::SeedKind;
use p3hc::Error;

#[derive(Parser, Debug)]
#[command(name = "p3hc", version, about = "Penrose P3 tilings and the hard-core lattice gas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    #[arg(long, global = true, default_value = "sun", value_parser = parse_seed)]
    seed: SeedKind,
    #[arg(long, global = true, default_value_t = 8)]
    k: u32,
    /// Activity, as p/q, an integer or a decimal.
    #[arg(long, global = true, default_value = "100000", value_parser = parse_u)]
    u: BigRational,
    #[arg(long, global = true, default_value_t = 100_000)]
    steps: u64,
    #[arg(long = "rng-seed", global = true, default_value_t = 1)]
    rng_seed: u64,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// KEY=VALUE render style override; repeatable.
    #[arg(long = "style", global = true, value_parser = parse_style)]
    style: Vec<(String, String)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tiling JSON and SVG.
    Generate,
    /// Pattern partition JSON and overlay SVG.
    Partition,
    /// Ground state JSON, density report and SVG.
    GroundState,
    /// Exact maximum independent sets of the pattern templates.
    VerifyLemma1 {
        #[arg(long)]
        all: bool,
        #[arg(long, value_parser = parse_pattern)]
        pattern: Option<PatternKind>,
    },
    /// Exact ground-state density, and the density on a generated window.
    Density {
        /// Only the exact value.
        #[arg(long)]
        exact: bool,
    },
    /// Loop partition function table.
    LoopZ {
        #[arg(long, default_value_t = 6)]
        max_m: u32,
    },
    /// Convergence thresholds and the contour series bound.
    Bounds,
    /// Glauber dynamics on the safe window with a frozen boundary.
    Sample {
        #[arg(long, default_value = "ground", value_parser = parse_boundary)]
        boundary: Boundary,
        #[arg(long, default_value = "ground")]
        init: String,
    },
}

fn parse_seed(s: &str) -> Result<SeedKind, String> {
    s.parse()
}

fn parse_u(s: &str) -> Result<BigRational, String> {
    let u = parse_rational(s).ok_or_else(|| format!("'{s}' is not a rational number"))?;
    if u < BigRational::from_integer(0.into()) {
        return Err("activity must be non-negative".into());
    }
    Ok(u)
}

fn parse_style(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("style '{s}' is not KEY=VALUE"))?;
    RenderStyle::default().set(k, v)?;
    Ok((k.to_string(), v.to_string()))
}

fn parse_pattern(s: &str) -> Result<PatternKind, String> {
    s.parse()
}

fn parse_boundary(s: &str) -> Result<Boundary, String> {
    s.parse()
}

/// A failed check, as opposed to a broken invariant.
#[derive(Debug)]
struct VerificationFailure(String);

impl std::fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailure {}

struct Run {
    common: Common,
    command: String,
    outputs: Vec<String>,
    extra: serde_json::Value,
}

impl Run {
    fn write(&mut self, name: &str, body: &str) -> anyhow::Result<()> {
        fs::create_dir_all(&self.common.out).with_context(|| format!("creating {}", self.common.out.display()))?;
        let p = self.common.out.join(name);
        fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn style(&self) -> RenderStyle {
        let mut s = RenderStyle::default();
        for (k, v) in &self.common.style {
            s.set(k, v).expect("validated while parsing");
        }
        s
    }

    fn manifest(&mut self) -> anyhow::Result<()> {
        let c = &self.common;
        let m = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": c.seed.name(),
            "k": c.k,
            "u": c.u.to_string(),
            "steps": c.steps,
            "rng_seed": c.rng_seed,
            "style": c.style.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>(),
            "argv": std::env::args().skip(1).collect::<Vec<_>>(),
            "outputs": self.outputs,
            "details": self.extra,
        });
        let body = serde_json::to_string_pretty(&m)?;
        self.write(&format!("{}_manifest.json", self.command), &body)
    }

    fn prefix(&self) -> String {
        format!("{}_{}", self.common.seed.name(), self.common.k)
    }
}

fn approx(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn golden_report(x: &GoldenNumber) -> String {
    format!("{x} ≈ {:.6}", x.to_f64())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let name = match &cli.command {
        Command::Generate => "generate",
        Command::Partition => "partition",
        Command::GroundState => "ground-state",
        Command::VerifyLemma1 { .. } => "verify-lemma1",
        Command::Density { .. } => "density",
        Command::LoopZ { .. } => "loop-z",
        Command::Bounds => "bounds",
        Command::Sample { .. } => "sample",
    };
    let mut r = Run { common: cli.common.clone(), command: name.into(), outputs: Vec::new(), extra: json!({}) };
    let c = cli.common;
    match cli.command {
        Command::Generate => {
            let patch = Patch::new(c.seed, c.k)?;
            let t = &patch.tiling;
            let census = t.census();
            println!("seed {} k {}: {} rhombi, {} vertices, {} edges", c.seed.name(), c.k, t.rhombi.len(), t.vertices.len(), patch.graph.edges.len());
            println!("half census: thin {} thick {}", census.thin, census.thick);
            r.write(&format!("{}_tiling.json", r.prefix()), &t.to_json()?)?;
            r.write(&format!("{}_graph.json", r.prefix()), &patch.graph.to_json(Some(&patch.classes))?)?;
            r.write(&file_name(c.seed, c.k, "tiling"), &render_tiling(t, &r.style()))?;
            r.extra = json!({"rhombi": t.rhombi.len(), "vertices": t.vertices.len()});
        }
        Command::Partition => {
            let p = Pipeline::new(c.seed, c.k)?;
            let part = &p.partition;
            for k in PatternKind::ALL {
                println!("{:<9} {}", k.name(), part.kind_census().get(&k).copied().unwrap_or(0));
            }
            let unmatched = p.rktt.unmatched_stars().len();
            println!("safe window: {} vertices, all covered once", part.safe_count());
            println!("rktt: {} complete stars, {} outside the seven rules", p.rktt.stars.len(), unmatched);
            r.write(&format!("{}_partition.json", r.prefix()), &part.to_json()?)?;
            let layers = Layers { supertiling: Some(&p.supertiling), rktt: Some(&p.rktt), partition: Some(part) };
            r.write(&file_name(c.seed, c.k, "overlay"), &render_overlay(&p.patch.tiling, layers, &r.style()))?;
            r.extra = json!({"patterns": part.patterns.len(), "safe": part.safe_count(), "rktt_unmatched": unmatched});
        }
        Command::GroundState => {
            let p = Pipeline::new(c.seed, c.k)?;
            let d = pattern_window_density(&p.ground, &p.partition)?;
            println!("particles {} on {} window vertices", p.ground.count(), p.partition.complete_window().iter().filter(|&&b| b).count());
            println!("window density {d} ≈ {:.6}", approx(&d));
            println!("exact density {}", golden_report(&exact_density()));
            r.write(&format!("{}_ground.json", r.prefix()), &p.ground.to_json()?)?;
            r.write(&file_name(c.seed, c.k, "ground"), &render_ground_state(&p.patch.tiling, &p.patch.graph, &p.ground, &r.style())?)?;
            r.extra = json!({"density": d.to_string(), "density_approx": approx(&d)});
        }
        Command::VerifyLemma1 { all, pattern } => {
            let kinds: Vec<PatternKind> = match (all, pattern) {
                (_, Some(k)) => vec![k],
                (true, None) => PatternKind::ALL.to_vec(),
                (false, None) => bail!(VerificationFailure("give --all or --pattern NAME".into())),
            };
            let mut reports = Vec::new();
            let mut failed = false;
            for k in kinds {
                let rep = verify_lemma1_template(template_of_kind(k));
                println!(
                    "{} {:<9} best {} second {} unique {}",
                    if rep.passed { "PASS" } else { "FAIL" },
                    k.name(),
                    rep.best,
                    rep.second_best,
                    rep.unique
                );
                failed |= !rep.passed;
                reports.push(rep);
            }
            r.write("lemma1_report.json", &serde_json::to_string_pretty(&reports)?)?;
            if failed {
                r.manifest()?;
                bail!(VerificationFailure("a pattern failed the unique-maximum check".into()));
            }
        }
        Command::Density { exact } => {
            let x = exact_density();
            println!("exact density {} = (57-25√5)/2 ≈ {:.6}", x, x.to_f64());
            let mut extra = json!({"exact": x.to_string(), "approx": x.to_f64()});
            if !exact {
                let p = Pipeline::new(c.seed, c.k)?;
                let d = pattern_window_density(&p.ground, &p.partition)?;
                println!("window density (seed {}, k {}) {} ≈ {:.6}", c.seed.name(), c.k, d, approx(&d));
                extra["window"] = json!(d.to_string());
            }
            r.extra = extra;
        }
        Command::LoopZ { max_m } => {
            let mut rows = Vec::new();
            println!("{:>3} {:>30} {:>8} {:>6}", "m", "Z", "oracle", "bound");
            for m in 2..=max_m.max(2) {
                let z = loop_partition_function(m, &c.u);
                let oracle = 2 * m <= 24 && cycle_brute_force(2 * m, &c.u) == z;
                let bound = loop_bound_holds(m, &c.u);
                println!("{m:>3} {:>30} {:>8} {:>6}", z.to_string(), oracle, bound);
                rows.push(json!({"m": m, "z": z.to_string(), "oracle": oracle, "bound": bound}));
                if !oracle || !bound {
                    r.extra = json!(rows);
                    r.manifest()?;
                    bail!(VerificationFailure(format!("loop partition function check failed at m = {m}")));
                }
            }
            r.write("loop_z.json", &serde_json::to_string_pretty(&rows)?)?;
        }
        Command::Bounds => {
            let t = tau_threshold(5, 150.0);
            let cert = certificate_holds(5, 150.0, t.tau0 + 0.01) && !certificate_holds(5, 150.0, t.tau0 - 1.0);
            let crude = crude_activity_bound(5, 150.0);
            println!("tau0 {:.4}  crude tau {:.4}  certificate {}", t.tau0, t.crude_tau, cert);
            println!("log u-bar: sum form {:.4}, product form {:.4}", crude.sum_log, crude.product_log);
            println!("{:>12} {:>14} {:>14} {:>9}", "u", "lhs ratio", "rhs ratio", "converges");
            let mut scan = Vec::new();
            for e in [2.0, 3.0, 4.0, 5.0, 5.5, 6.0, 7.0] {
                let u = 10f64.powf(e);
                let b = polymer_series_bound(u);
                println!("{u:>12.0} {:>14.6e} {:>14.6e} {:>9}", b.lhs_ratio, b.rhs_ratio, b.converges);
                scan.push(json!({"u": u, "bound": b}));
            }
            r.write("bounds.json", &serde_json::to_string_pretty(&json!({"tau": t, "crude": crude, "scan": scan}))?)?;
            if !cert {
                r.manifest()?;
                bail!(VerificationFailure("certificate inequality failed".into()));
            }
        }
        Command::Sample { boundary, init } => {
            let p = Pipeline::new(c.seed, c.k)?;
            let g = &p.patch.graph;
            let window = &p.partition.safe;
            let outside = match boundary {
                Boundary::Free => Configuration::empty(g.len()),
                Boundary::Even => Configuration::sublattice(g, Parity::Even),
                Boundary::Odd => Configuration::sublattice(g, Parity::Odd),
                Boundary::Ground => p.ground.clone(),
            };
            let inside = match init.as_str() {
                "ground" => p.ground.clone(),
                "even" => Configuration::sublattice(g, Parity::Even),
                "odd" => Configuration::sublattice(g, Parity::Odd),
                "empty" => Configuration::empty(g.len()),
                other => bail!(clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("unknown init '{other}'\n"))),
            };
            let mut start = Configuration::empty(g.len());
            for v in 0..g.len() {
                start.occupied[v] = if window[v] { inside.occupied[v] } else { outside.occupied[v] };
            }
            // the frozen layer must not clash with the chosen start
            for v in 0..g.len() {
                if window[v] && start.occupied[v] && g.adj[v].iter().any(|&w| !window[w as usize] && start.occupied[w as usize]) {
                    start.occupied[v] = false;
                }
            }
            let frozen: Vec<bool> = window.iter().map(|w| !w).collect();
            let u = approx(&c.u);
            let end = glauber_sample(g, u, c.steps, c.rng_seed, &start, &frozen)?;
            let density = approx(&window_density(&end, window)?);
            let agree = (0..g.len()).filter(|&v| window[v] && end.occupied[v] == p.ground.occupied[v]).count();
            let overlap = agree as f64 / p.partition.safe_count() as f64;
            println!("density {density:.6}  overlap with ground state {overlap:.6}");
            let m = SampleManifest {
                seed_kind: c.seed.name().into(),
                k: c.k,
                u: c.u.to_string(),
                steps: c.steps,
                rng_seed: c.rng_seed,
                boundary,
                init,
                density,
                overlap_with_ground_state: overlap,
            };
            r.write(&format!("{}_sample.json", r.prefix()), &end.to_json()?)?;
            r.extra = serde_json::to_value(m)?;
        }
    }
    r.manifest()?;
    for o in &r.outputs {
        println!("wrote {}", Path::new(&c.out).join(o).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(v) = e.downcast_ref::<VerificationFailure>() {
                eprintln!("verification failed: {v}");
                ExitCode::from(1)
            } else if let Some(ce) = e.downcast_ref::<clap::Error>() {
                let _ = ce.print();
                ExitCode::from(2)
            } else if let Some(le) = e.downcast_ref::<Error>() {
                eprintln!("internal invariant breach: {le}");
                eprintln!("witness: {le:?}");
                ExitCode::from(3)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(3)
            }
        }
    }
}
