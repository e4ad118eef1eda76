//! Command line front end: validate and generate instance files, compute Ext
//! and Hochschild dimension tables, and run the verification suite.

use std::path::PathBuf;
use std::process::ExitCode;
use std::rc::Rc;

use clap::{Parser, Subcommand};

use homcat::comparison::{
    hochschild_dims, run_check, run_suite, workspace, CheckConfig, CheckReport, CHECK_NAMES,
};
use homcat::exact::Field;
use homcat::instance::{
    decode, generate_fixture, generate_random, load, realize_bimodule, to_json,
    BimoduleSpec, Instance, FIXTURE_IDS,
};
use homcat::lincat::ext_dims;
use homcat::prestack::{r_category, twist_category};
use homcat::Result;

#[derive(Parser)]
#[command(
    name = "homcat",
    about = "Exact homological algebra over prestacks on finite categories",
    version
)]
struct Cli {
    /// Path to an instance file, or a built-in id (FIX0..FIX4)
    #[arg(long, global = true)]
    instance: Option<String>,
    /// Truncation degree for dimension tables
    #[arg(long, global = true)]
    max_degree: Option<usize>,
    /// Hard cap on nerve degrees
    #[arg(long, global = true)]
    nerve_cap: Option<usize>,
    /// Seed for randomized module families
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Machine-readable JSON output
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load an instance and run every structural validation
    Validate,
    /// Emit an instance file for a built-in fixture or a random instance
    Generate {
        /// FIX0..FIX4, or "random" (seeded via --seed)
        what: String,
        /// Write to a file instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
        /// Prime modulus instead of the rationals
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Ext dimension tables for all ordered pairs of the instance's bimodules
    Ext,
    /// Hochschild cohomology dimensions of the instance's prestack
    Hochschild,
    /// Run a single named check
    Check {
        /// One of the suite check names
        name: String,
    },
    /// Run every check
    Suite,
}

fn load_instance(cli: &Cli) -> Result<Instance> {
    let spec = cli.instance.as_deref().unwrap_or("FIX1");
    let path = PathBuf::from(spec);
    if path.exists() {
        load(&path)
    } else if FIXTURE_IDS.contains(&spec) {
        decode(&generate_fixture(spec, Field::Rationals)?)
    } else {
        Err(homcat::Error::ParseError {
            path: spec.to_string(),
            message: format!("no such file, and not one of {FIXTURE_IDS:?}"),
        })
    }
}

fn config_of(cli: &Cli, inst: &Instance) -> CheckConfig {
    CheckConfig {
        max_degree: cli.max_degree.unwrap_or(inst.config.max_degree),
        nerve_cap: cli.nerve_cap.unwrap_or(inst.config.nerve_cap),
        seed: cli.seed.unwrap_or(inst.config.seed),
    }
}

fn print_reports(reports: &[CheckReport], json: bool) -> bool {
    if json {
        println!("{}", serde_json::to_string_pretty(reports).expect("reports serialize"));
    } else {
        for r in reports {
            let status = if r.pass { "pass" } else { "FAIL" };
            let note = r.note.as_deref().unwrap_or("");
            println!("{:<22} {:<8} {:>6} ms  {}", r.check, status, r.millis, note);
        }
    }
    reports.iter().all(|r| r.pass)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.cmd {
        Command::Validate => {
            let inst = load_instance(cli)?;
            // instance decoding already validates the base, fibers,
            // restrictions and coherence; also build and validate the
            // derived categories
            let t = twist_category(&inst.prestack, &inst.prestack)?;
            let r = r_category(&inst.prestack, &inst.prestack)?;
            if let Some(b) = &inst.prestack_b {
                twist_category(b, b)?;
            }
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "instance": inst.id,
                        "valid": true,
                        "base_objects": inst.base().objects.len(),
                        "base_poset": inst.base().is_poset(),
                        "graded_objects": t.objects.len(),
                        "graded_total_dim": t.cat.total_hom_dim(),
                        "bimodule_index_objects": r.objects.len(),
                        "bimodule_index_total_dim": r.cat.total_hom_dim(),
                    })
                );
            } else {
                println!("{}: valid", inst.id);
                println!(
                    "  base: {} objects, {} morphisms, poset: {}",
                    inst.base().objects.len(),
                    inst.base().morphisms.len(),
                    inst.base().is_poset()
                );
                println!(
                    "  graded bimodule category: {} objects, total hom dim {}",
                    t.objects.len(),
                    t.cat.total_hom_dim()
                );
                println!(
                    "  bimodule index category: {} objects, total hom dim {}",
                    r.objects.len(),
                    r.cat.total_hom_dim()
                );
            }
            Ok(true)
        }
        Command::Generate {
            what,
            output,
            prime,
        } => {
            let field = match prime {
                Some(p) => Field::prime(*p)?,
                None => Field::Rationals,
            };
            let file = if what == "random" {
                generate_random(cli.seed.unwrap_or(0), field)
            } else {
                generate_fixture(what, field)?
            };
            let json = to_json(&file);
            match output {
                Some(p) => std::fs::write(p, &json)?,
                None => print!("{json}"),
            }
            Ok(true)
        }
        Command::Ext => {
            let inst = load_instance(cli)?;
            let cfg = config_of(cli, &inst);
            let ws = workspace(&inst.prestack)?;
            let specs: Vec<BimoduleSpec> = if inst.bimodules.is_empty() {
                vec![BimoduleSpec {
                    name: "diagonal".into(),
                    kind: "diagonal".into(),
                    object: None,
                    seed: None,
                    max_dim: None,
                }]
            } else {
                inst.bimodules.clone()
            };
            let mods: Vec<(String, Rc<homcat::lincat::FDModule>)> = specs
                .iter()
                .map(|s| Ok((s.name.clone(), realize_bimodule(&ws, s)?)))
                .collect::<Result<_>>()?;
            let mut rows = Vec::new();
            for (mn, m) in &mods {
                for (nn, n) in &mods {
                    rows.push((mn.clone(), nn.clone(), ext_dims(m, n, cfg.max_degree)));
                }
            }
            if cli.json {
                let body: Vec<serde_json::Value> = rows
                    .iter()
                    .map(|(m, n, d)| serde_json::json!({"m": m, "n": n, "dims": d}))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&body).expect("serializes"));
            } else {
                for (m, n, d) in &rows {
                    println!("Ext({m}, {n}) = {d:?}");
                }
            }
            Ok(true)
        }
        Command::Hochschild => {
            let inst = load_instance(cli)?;
            let cfg = config_of(cli, &inst);
            let ws = workspace(&inst.prestack)?;
            let dims = hochschild_dims(&ws, cfg.max_degree)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::json!({"instance": inst.id, "dims": dims})
                );
            } else {
                println!("HH({}) = {:?}", inst.id, dims);
            }
            Ok(true)
        }
        Command::Check { name } => {
            if !CHECK_NAMES.contains(&name.as_str()) {
                return Err(homcat::Error::ParseError {
                    path: "check".into(),
                    message: format!("unknown check {name:?}; available: {CHECK_NAMES:?}"),
                });
            }
            let inst = load_instance(cli)?;
            let cfg = config_of(cli, &inst);
            let report = run_check(&inst.prestack, name, &inst.id, &cfg)?;
            Ok(print_reports(&[report], cli.json))
        }
        Command::Suite => {
            let inst = load_instance(cli)?;
            let cfg = config_of(cli, &inst);
            let reports = run_suite(&inst.prestack, &inst.id, &cfg)?;
            Ok(print_reports(&reports, cli.json))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
