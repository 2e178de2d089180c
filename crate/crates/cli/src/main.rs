//! `cspiso`: partition functions, isomorphism witnesses, gadgets and
//! intertwiners from JSON files.
//!
//! Exit codes: 0 success, 1 negative result, 2 usage or input error,
//! 3 a configured cap was exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cspiso::config::{Format, RunConfig};
use cspiso::holant::decompose;
use cspiso::interpolation::{distinguish, Outcome};
use cspiso::intertwiners::{gadget_span, intertwiner_basis, is_intertwiner, PermutationGroup, SpanStatus};
use cspiso::io;
use cspiso::partition::{partition_function_capped, pinned_partition_capped};
use cspiso::structure::{automorphisms, contract_twins, find_isomorphisms, twin_classes};
use cspiso::{selftest, Error, FlatMatrix, Result};

#[derive(Parser)]
#[command(name = "cspiso", version, about = "Exact #CSP partition functions, isomorphism witnesses and Holant gadgets")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on assignments per partition function (env CSPISO_TERM_CAP).
    #[arg(long, global = true)]
    term_cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate Z(K), or Z^ψ(K) with --pin.
    Zeval {
        #[arg(long)]
        functions: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        /// Pins as label=value, 1-based, e.g. "1=2,2=1".
        #[arg(long)]
        pin: Option<String>,
    },
    /// List every isomorphism between two function sets.
    Iso {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Twin classes and the contracted set.
    Twins {
        #[arg(long)]
        f: PathBuf,
    },
    /// An isomorphism, or an instance on which the partition functions differ.
    Distinguish {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        pin_f: Option<String>,
        #[arg(long)]
        pin_g: Option<String>,
        /// Catalog prefix searched (env CSPISO_CATALOG_CAP).
        #[arg(long)]
        max_catalog: Option<usize>,
    },
    /// Signature matrix of a gadget.
    Sigmat {
        #[arg(long)]
        gadget: PathBuf,
    },
    /// Express a gadget through the fundamental gadgets and check the result.
    Decompose {
        #[arg(long)]
        gadget: PathBuf,
    },
    /// Orbit basis of C_Aut(F)(k, l) against the span of gadget matrices.
    Intertwiners {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        /// Largest gadget vertex count (env CSPISO_SPAN_BOUND).
        #[arg(long)]
        span_bound: Option<usize>,
    },
    /// Randomized pass over the core identities.
    Selftest {
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    let outcome = RunConfig::from_process_env().and_then(|mut config| {
        config.format = format;
        if let Some(seed) = cli.seed {
            config.seed = seed;
        }
        if let Some(cap) = cli.term_cap {
            config.term_cap = cap;
        }
        run(cli.command, config)
    });
    match outcome {
        Ok(report) => {
            match format {
                Format::Text => println!("{}", report.text),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("serializable")),
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            let code = if e.is_cap() { 3 } else { 2 };
            match format {
                Format::Text => eprintln!("error: {e}"),
                Format::Json => println!("{}", json!({"error": e.to_string(), "exit": code})),
            }
            ExitCode::from(code)
        }
    }
}

fn run(command: Command, mut config: RunConfig) -> Result<Report> {
    config.validate()?;
    match command {
        Command::Zeval { functions, instance, pin } => zeval(&config, functions, instance, pin),
        Command::Iso { f, g } => iso(f, g),
        Command::Twins { f } => twins(f),
        Command::Distinguish { f, g, pin_f, pin_g, max_catalog } => {
            if let Some(cap) = max_catalog {
                config.catalog_cap = cap;
            }
            config.validate()?;
            run_distinguish(&config, f, g, pin_f, pin_g)
        }
        Command::Sigmat { gadget } => {
            let g = io::parse_gadget(&gadget)?;
            let t = g.signature_matrix();
            Ok(Report::ok(matrix_text(&t), matrix_json(&t)))
        }
        Command::Decompose { gadget } => run_decompose(gadget),
        Command::Intertwiners { f, k, l, span_bound } => {
            if let Some(b) = span_bound {
                config.span_bound = b;
            }
            config.validate()?;
            run_intertwiners(&config, f, k, l)
        }
        Command::Selftest { cases } => {
            let report = selftest::run(config.seed, cases);
            let mut text = String::new();
            for c in &report.checks {
                let verdict = if c.passed() { "PASS" } else { "FAIL" };
                text.push_str(&format!("{verdict} {} ({} cases)\n", c.name, c.cases));
                for f in &c.failures {
                    text.push_str(&format!("  {f}\n"));
                }
            }
            let passed = report.checks.iter().filter(|c| c.passed()).count();
            text.push_str(&format!("{passed}/{} checks passed", report.checks.len()));
            let json = json!({
                "seed": report.seed,
                "passed": report.passed(),
                "checks": report.checks.iter().map(|c| json!({
                    "name": c.name, "cases": c.cases, "passed": c.passed(), "failures": c.failures,
                })).collect::<Vec<_>>(),
            });
            Ok(Report { text, json, code: if report.passed() { 0 } else { 1 } })
        }
    }
}

/// Pins given as `label=value` pairs; the label count is the number of pairs.
fn pins(text: Option<&str>, q: usize) -> Result<Vec<usize>> {
    match text {
        None => Ok(vec![]),
        Some(t) => io::parse_pins(t, t.split(',').filter(|p| !p.trim().is_empty()).count(), q),
    }
}

fn zeval(config: &RunConfig, functions: PathBuf, instance: PathBuf, pin: Option<String>) -> Result<Report> {
    let set = io::parse_function_set(&functions)?;
    let inst = io::parse_instance(&instance, Some(&set))?;
    let z = match pin {
        None => partition_function_capped(&set, &inst, config.term_cap)?,
        Some(p) => {
            let psi = io::parse_pins(&p, inst.k(), set.q())?;
            pinned_partition_capped(&set, &inst, &psi, config.term_cap)?
        }
    };
    Ok(Report::ok(z.to_string(), json!({"value": z.to_string()})))
}

fn iso(f: PathBuf, g: PathBuf) -> Result<Report> {
    let (f, g) = (io::parse_function_set(&f)?, io::parse_function_set(&g)?);
    let all = find_isomorphisms(&f, &g)?;
    let text = if all.is_empty() {
        "none".to_string()
    } else {
        all.iter().map(|s| format!("{} {}", io::permutation_one_line(s), s.cycle_string())).collect::<Vec<_>>().join("\n")
    };
    let json = json!({"isomorphisms": all.iter().map(io::permutation_to_json).collect::<Vec<_>>()});
    Ok(Report { text, json, code: if all.is_empty() { 1 } else { 0 } })
}

fn classes_one_based(classes: &[Vec<usize>]) -> Vec<Vec<usize>> {
    classes.iter().map(|c| c.iter().map(|i| i + 1).collect()).collect()
}

fn twins(f: PathBuf) -> Result<Report> {
    let set = io::parse_function_set(&f)?;
    let classes = classes_one_based(&twin_classes(&set));
    let mut text: Vec<String> =
        classes.iter().map(|c| format!("{{{}}}", c.iter().map(usize::to_string).collect::<Vec<_>>().join(", "))).collect();
    let contracted = match contract_twins(&set) {
        Ok(c) => {
            text.push(format!("contracted: {}", io::function_set_to_json(&c.set)));
            io::function_set_to_json(&c.set)
        }
        Err(Error::VanishingWeight { class }) => {
            text.push(format!("class {} has vanishing total weight", class + 1));
            Value::Null
        }
        Err(e) => return Err(e),
    };
    Ok(Report::ok(text.join("\n"), json!({"classes": classes, "contracted": contracted})))
}

fn run_distinguish(config: &RunConfig, f: PathBuf, g: PathBuf, pin_f: Option<String>, pin_g: Option<String>) -> Result<Report> {
    let (f, g) = (io::parse_function_set(&f)?, io::parse_function_set(&g)?);
    let phi = pins(pin_f.as_deref(), f.q())?;
    let psi = pins(pin_g.as_deref(), g.q())?;
    Ok(match distinguish(&f, &g, &phi, &psi, &config.distinguish())? {
        Outcome::Isomorphic { sigma } => Report::ok(
            format!("isomorphic via σ={} {}", io::permutation_one_line(&sigma), sigma.cycle_string()),
            json!({"outcome": "isomorphic", "sigma": io::permutation_to_json(&sigma)}),
        ),
        Outcome::Equivalent { sigma } => Report {
            text: format!(
                "not isomorphic, but equivalent after twin contraction via σ={}; no instance distinguishes them",
                io::permutation_one_line(&sigma)
            ),
            json: json!({"outcome": "equivalent", "sigma": io::permutation_to_json(&sigma)}),
            code: 1,
        },
        Outcome::Witness(w) => {
            let inst = io::instance_to_json(&w.instance);
            Report {
                text: format!(
                    "not isomorphic; witness from the {} catalog:\n{}\nZ_F = {}\nZ_G = {}",
                    w.source.name(),
                    serde_json::to_string_pretty(&inst).expect("serializable"),
                    w.z_f,
                    w.z_g
                ),
                json: json!({
                    "outcome": "witness",
                    "instance": inst,
                    "z_f": w.z_f.to_string(),
                    "z_g": w.z_g.to_string(),
                    "simple": w.instance.is_simple(),
                    "source": w.source.name(),
                    "examined": w.examined,
                }),
                code: 1,
            }
        }
    })
}

fn run_decompose(path: PathBuf) -> Result<Report> {
    let g = io::parse_gadget(&path)?;
    let d = decompose(&g)?;
    let expr = d.expr();
    let matches = expr.evaluate(g.q(), g.functions())? == g.signature_matrix();
    let stages: Vec<String> = d.stages.iter().map(|s| s.to_string()).collect();
    let text = format!(
        "{d}\n{expr}\nsignature matrix {}",
        if matches { "matches" } else { "DIFFERS" }
    );
    let json = json!({"stages": stages, "expression": expr.to_string(), "matches": matches});
    Ok(Report { text, json, code: if matches { 0 } else { 1 } })
}

fn run_intertwiners(config: &RunConfig, f: PathBuf, k: usize, l: usize) -> Result<Report> {
    let set = io::parse_function_set(&f)?;
    let aut = PermutationGroup::from_elements(set.q(), automorphisms(&set))?;
    let space = intertwiner_basis(&aut, k, l);
    let mut basis_ok = true;
    for b in space.basis() {
        basis_ok &= is_intertwiner(b, &aut, k, l)?;
    }
    let span = gadget_span(&set, k, l, &config.span())?;
    let mut text = vec![
        format!("|Aut(F)| = {}", aut.order()),
        format!("dim C_Aut(F)({k},{l}) = {}", space.dimension()),
        format!("orbit basis passes the intertwiner check: {basis_ok}"),
    ];
    for (b, d) in span.dimensions.iter().enumerate() {
        text.push(format!("span dimension at bound {}: {d}", b + 1));
    }
    text.push(format!("every gadget matrix lies in C_Aut(F)({k},{l}): {}", span.within_intertwiners));
    text.push(format!("status: {} after {} gadgets", span.status.name(), span.gadgets));
    let json = json!({
        "automorphisms": aut.elements().iter().map(io::permutation_to_json).collect::<Vec<_>>(),
        "orbit_dimension": space.dimension(),
        "basis_intertwines": basis_ok,
        "span_dimensions": span.dimensions,
        "within_intertwiners": span.within_intertwiners,
        "gadgets": span.gadgets,
        "status": span.status.name(),
    });
    let code = match span.status {
        SpanStatus::Certified if basis_ok && span.within_intertwiners => 0,
        SpanStatus::CapReached => 3,
        _ => 1,
    };
    Ok(Report { text: text.join("\n"), json, code })
}

fn matrix_text(t: &FlatMatrix) -> String {
    (0..t.rows())
        .map(|r| (0..t.cols()).map(|c| t.get(r, c).to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

fn matrix_json(t: &FlatMatrix) -> Value {
    let rows: Vec<Vec<String>> =
        (0..t.rows()).map(|r| (0..t.cols()).map(|c| t.get(r, c).to_string()).collect()).collect();
    json!({"rows": t.rows(), "cols": t.cols(), "entries": rows})
}
