use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ccv::canon::canonicalize_expr;
use ccv::corpus::{enumerate, Pools};
use ccv::cps::{cps_colon, cps_standard, cps_standard_mod, simulate_step, sn_top, DEFAULT_SEARCH_FUEL};
use ccv::measure::places;
use ccv::parse::{parse_expr, parse_term, parse_tgt};
use ccv::reduce::{is_sn, one_step, trace, RuleSet, Strategy};
use ccv::suite::{run_suite, suite_names, SuiteParams};
use ccv::target::Sort;
use ccv::term::path_string;
use ccv::types::{check_ccv, check_tgt, infer_nf, type_sn, CcvDerivation, TgtDerivation};
use ccv::CcvError;

#[derive(Parser)]
#[command(name = "ccv", version, about = "Workbench for the call-by-value lambda-mu calculus with let")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Step, node or search budget (default depends on the command).
    #[arg(long, global = true)]
    fuel: Option<usize>,
    /// Corpus size bound.
    #[arg(long, global = true)]
    size: Option<usize>,
    /// Seed for random traces and random corpora.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    json: bool,
    /// Comma-separated reduction rules, e.g. beta_mu,beta_jmp,eta_mu.
    #[arg(long, global = true, value_parser = parse_filter)]
    filter: Option<RuleSet>,
    #[arg(long, global = true, value_enum, default_value_t = Variant::Colon)]
    variant: Variant,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Standard,
    Colon,
    Mod,
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    Ccv,
    Target,
    TargetDot,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a term or jump and print it back.
    Parse { input: String },
    /// Canonical representative of the equality class.
    Canon { input: String },
    /// All one-step reducts.
    Reduce { input: String },
    /// One reduction path, leftmost unless --seed is given.
    Trace { input: String },
    /// Bounded strong-normalization check.
    Sn { input: String },
    /// Sight ordinal of a term.
    Sight { input: String },
    /// Places with their visions and breadths.
    Places { input: String },
    /// CPS translation selected by --variant.
    Cps { input: String },
    /// SN-preserving translation with the dot operator.
    Sntrans { input: String },
    /// Checks the simulation of every one-step reduction of a term.
    Simulate { input: String },
    /// Validates a JSON derivation file ("-" for stdin).
    CheckDeriv {
        file: String,
        #[arg(long, value_enum, default_value_t = System::Ccv)]
        system: System,
    },
    /// Types a beta-normal target term.
    TypecheckNf {
        input: String,
        #[arg(long, value_parser = parse_sort)]
        sort: Option<Sort>,
    },
    /// Types a strongly normalizing target term.
    TypeSn {
        input: String,
        #[arg(long, value_parser = parse_sort)]
        sort: Option<Sort>,
    },
    /// Lists the canonical terms up to --size.
    Enumerate {
        #[arg(long, value_delimiter = ',', default_value = "x,y")]
        vars: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "k,l")]
        conames: Vec<String>,
    },
    /// Runs a property suite, or all of them.
    Suite { name: String },
}

fn parse_filter(s: &str) -> Result<RuleSet, String> {
    RuleSet::parse(s)
}

fn parse_sort(s: &str) -> Result<Sort, String> {
    match s {
        "T" | "t" => Ok(Sort::T),
        "Q" | "q" => Ok(Sort::Q),
        "W" | "w" => Ok(Sort::W),
        "K" | "k" => Ok(Sort::K),
        _ => Err(format!("unknown sort {s}; expected T, Q, W or K")),
    }
}

enum Exit {
    Ok,
    Fail,
    Inconclusive,
}

fn code_of(e: &CcvError) -> u8 {
    match e {
        CcvError::Parse { .. } | CcvError::Json(_) | CcvError::UnknownSuite(_) | CcvError::SizeCap(..) => 2,
        CcvError::CapExceeded(_) | CcvError::OutOfFuel(_) => 3,
        _ => 1,
    }
}

fn read_input(s: &str) -> Result<String, CcvError> {
    if s == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| CcvError::Json(e.to_string()))?;
        Ok(buf)
    } else {
        Ok(s.to_string())
    }
}

fn emit(json: bool, v: Value, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("{}", text());
    }
}

fn run(cli: &Cli) -> Result<Exit, CcvError> {
    let filter = cli.filter.unwrap_or(RuleSet::ALL);
    match &cli.cmd {
        Cmd::Parse { input } => {
            let e = parse_expr(&read_input(input)?)?;
            emit(cli.json, e.to_json(), || e.to_string());
        }
        Cmd::Canon { input } => {
            let e = canonicalize_expr(&parse_expr(&read_input(input)?)?)?;
            emit(cli.json, e.to_json(), || e.to_string());
        }
        Cmd::Reduce { input } => {
            let steps = one_step(&parse_term(&read_input(input)?)?, filter)?;
            let v = Value::Array(steps.iter().map(|s| s.to_json()).collect());
            emit(cli.json, v, || steps.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("\n"));
        }
        Cmd::Trace { input } => {
            let t = parse_term(&read_input(input)?)?;
            let fuel = cli.fuel.unwrap_or(100);
            let strategy = cli.seed.map_or(Strategy::Leftmost, Strategy::Random);
            let steps = trace(&t, strategy, fuel)?;
            let last = steps.last().map_or(t.clone(), |s| s.target.clone());
            let normal = one_step(&last, RuleSet::ALL)?.is_empty();
            let v = json!({ "start": t.to_string(), "steps": steps.iter().map(|s| s.to_json()).collect::<Vec<_>>(), "normal": normal });
            emit(cli.json, v, || {
                let mut lines = vec![t.to_string()];
                lines.extend(steps.iter().map(|s| s.to_string()));
                lines.join("\n")
            });
            if !normal {
                return Ok(Exit::Inconclusive);
            }
        }
        Cmd::Sn { input } => {
            let t = parse_term(&read_input(input)?)?;
            let fuel = cli.fuel.unwrap_or(20_000);
            let v = is_sn(&t, filter, fuel)?;
            let cycle: Vec<String> = match &v {
                ccv::graph::Verdict::NotSn { cycle } => cycle.iter().map(|s| s.to_string()).collect(),
                _ => vec![],
            };
            emit(cli.json, json!({ "verdict": v.label(), "sn": v.is_sn(), "cycle": cycle }), || {
                let mut lines = vec![v.label()];
                lines.extend(cycle.iter().cloned());
                lines.join("\n")
            });
            if v.is_unknown() {
                return Ok(Exit::Inconclusive);
            }
        }
        Cmd::Sight { input } => {
            let pm = places(&parse_term(&read_input(input)?)?);
            let s = pm.sight();
            let breadths: serde_json::Map<String, Value> = pm
                .places
                .iter()
                .map(|p| (path_string(p.path()), json!(pm.breadth[p.id])))
                .collect();
            emit(cli.json, json!({ "sight": s.to_string(), "breadths": breadths }), || s.to_string());
        }
        Cmd::Places { input } => {
            let pm = places(&parse_term(&read_input(input)?)?);
            emit(cli.json, pm.to_json(), || {
                pm.places
                    .iter()
                    .map(|p| {
                        let vis: Vec<String> = pm.vision[p.id].iter().map(|q| format!("p{q}")).collect();
                        format!(
                            "p{} @ {}{}  vision {{{}}}  breadth {}",
                            p.id,
                            path_string(p.path()),
                            if p.is_mu { " (mu)" } else { "" },
                            vis.join(", "),
                            pm.breadth[p.id]
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            });
        }
        Cmd::Cps { input } => {
            let t = parse_term(&read_input(input)?)?;
            let out = match cli.variant {
                Variant::Standard => cps_standard(&t),
                Variant::Colon => cps_colon(&t),
                Variant::Mod => cps_standard_mod(&t),
            };
            emit(cli.json, out.to_json(), || out.to_string());
        }
        Cmd::Sntrans { input } => {
            let (out, env) = sn_top(&parse_term(&read_input(input)?)?);
            let pairs: Vec<Value> = env.pairs().map(|(k, kt)| json!([k, kt])).collect();
            emit(cli.json, json!({ "term": out.to_json(), "text": out.to_string(), "tildes": pairs }), || {
                out.to_string()
            });
        }
        Cmd::Simulate { input } => {
            let t = parse_term(&read_input(input)?)?;
            let fuel = cli.fuel.unwrap_or(DEFAULT_SEARCH_FUEL);
            let (mut failed, mut unknown) = (false, false);
            let mut rows = Vec::new();
            for s in one_step(&t, filter)? {
                let sim = simulate_step(&s, fuel);
                let status = if sim.holds() {
                    "simulated"
                } else if sim.is_unknown() {
                    unknown = true;
                    "inconclusive"
                } else {
                    failed = true;
                    "failed"
                };
                rows.push((s, sim, status));
            }
            let v = Value::Array(
                rows.iter()
                    .map(|(s, sim, st)| {
                        json!({ "step": s.to_json(), "status": st, "source": sim.source.to_string(), "goal": sim.target.to_string() })
                    })
                    .collect(),
            );
            emit(cli.json, v, || {
                rows.iter().map(|(s, _, st)| format!("{st:12} {s}")).collect::<Vec<_>>().join("\n")
            });
            if failed {
                return Ok(Exit::Fail);
            }
            if unknown {
                return Ok(Exit::Inconclusive);
            }
        }
        Cmd::CheckDeriv { file, system } => {
            let text = if file == "-" {
                read_input("-")?
            } else {
                std::fs::read_to_string(file).map_err(|e| CcvError::Json(format!("{file}: {e}")))?
            };
            let v: Value = serde_json::from_str(&text).map_err(|e| CcvError::Json(e.to_string()))?;
            let res = match system {
                System::Ccv => check_ccv(&CcvDerivation::from_json(&v)?),
                System::Target => check_tgt(&TgtDerivation::from_json(&v)?, false),
                System::TargetDot => check_tgt(&TgtDerivation::from_json(&v)?, true),
            };
            match res {
                Ok(()) => emit(cli.json, json!({ "valid": true }), || "valid".into()),
                Err(e) => {
                    let path: Vec<usize> = e.path.clone();
                    emit(cli.json, json!({ "valid": false, "path": path, "error": e.to_string() }), || {
                        format!("invalid: {e}")
                    });
                    return Ok(Exit::Fail);
                }
            }
        }
        Cmd::TypecheckNf { input, sort } => {
            let d = infer_nf(&parse_tgt(&read_input(input)?)?, *sort)?;
            print_tgt_derivation(cli.json, &d);
        }
        Cmd::TypeSn { input, sort } => {
            let d = type_sn(&parse_tgt(&read_input(input)?)?, *sort, cli.fuel.unwrap_or(20_000))?;
            print_tgt_derivation(cli.json, &d);
        }
        Cmd::Enumerate { vars, conames } => {
            let vs: Vec<&str> = vars.iter().map(String::as_str).collect();
            let ks: Vec<&str> = conames.iter().map(String::as_str).collect();
            let size = cli.size.unwrap_or(3);
            let ts = enumerate(size, &Pools::new(&vs, &ks))?;
            let v = json!({ "size": size, "vars": vars, "conames": conames, "count": ts.len(),
                "terms": ts.iter().map(|t| t.to_string()).collect::<Vec<_>>() });
            emit(cli.json, v, || ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("\n"));
        }
        Cmd::Suite { name } => {
            let p = SuiteParams { size: cli.size, fuel: cli.fuel, seed: cli.seed };
            let names: Vec<&str> = if name == "all" { suite_names() } else { vec![name.as_str()] };
            let mut reports = Vec::new();
            for n in names {
                let r = run_suite(n, &p)?;
                if !cli.json {
                    println!("{}", r.line());
                    for e in &r.examples {
                        println!("    {e}");
                    }
                }
                reports.push(r);
            }
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&reports).expect("json"));
            }
            if reports.iter().any(|r| r.failed > 0) {
                return Ok(Exit::Fail);
            }
            if reports.iter().any(|r| !r.pass) {
                return Ok(Exit::Inconclusive);
            }
        }
    }
    Ok(Exit::Ok)
}

fn print_tgt_derivation(json: bool, d: &TgtDerivation) {
    emit(json, d.to_json(), || format!("{} : {}", d.root.subject, d.root.ty));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Exit::Ok) => ExitCode::SUCCESS,
        Ok(Exit::Fail) => ExitCode::from(1),
        Ok(Exit::Inconclusive) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(code_of(&e))
        }
    }
}
