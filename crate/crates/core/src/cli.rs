//! The `ilp` command line: `solve`, `hypspace` and `encode`.
//!
//! Exit codes: 0 on success (for `solve`: at least one attempt emitted),
//! 1 on invalid input, 2 when `solve` emitted no attempt.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};

use crate::bias::ModeBias;
use crate::config::{SpaceParams, PARAM_NAMES};
use crate::driver::{Driver, DriverConfig, Profile};
use crate::instance::parse_instance;
use crate::rule::Language;
use crate::solver::Solver;
use crate::space::asp::{emit_encoding, generate_space_asp};
use crate::space::native::{enumerate_with, NativeOptions};
use crate::space::Backend;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_ATTEMPT: i32 = 2;

fn flag_name(param: &str) -> String {
    param.replace('_', "-")
}

fn param_args() -> Vec<Arg> {
    PARAM_NAMES
        .iter()
        .map(|p| {
            Arg::new(*p)
                .long(flag_name(p))
                .value_name("N")
                .value_parser(value_parser!(i64))
                .help_heading("Space parameters")
        })
        .collect()
}

fn bias_args() -> Vec<Arg> {
    vec![
        Arg::new("instance")
            .long("instance")
            .value_name("FILE")
            .value_parser(value_parser!(PathBuf))
            .help("take target and relevant predicates from an instance file"),
        Arg::new("target")
            .long("target")
            .value_name("DECL")
            .help("target predicate, e.g. valid_move(cell,time)"),
        Arg::new("relevant")
            .long("relevant")
            .value_name("DECL")
            .action(ArgAction::Append)
            .help("relevant predicate, repeatable"),
        Arg::new("climit")
            .long("climit")
            .value_name("N")
            .default_value("6")
            .value_parser(value_parser!(i64)),
        Arg::new("no-invention")
            .long("no-invention")
            .action(ArgAction::SetTrue)
            .help("disable predicate invention"),
    ]
}

pub fn command() -> Command {
    let backend = Arg::new("backend")
        .long("backend")
        .value_name("asp|native")
        .value_parser(value_parser!(Backend));
    let solve = Command::new("solve")
        .about("learn from an instance and print prediction attempts")
        .arg(
            Arg::new("file")
                .required(true)
                .value_parser(value_parser!(PathBuf)),
        )
        .arg(
            Arg::new("batch")
                .long("batch")
                .action(ArgAction::SetTrue)
                .help(
                    "search one hypothesis for all examples together (examples must not interfere)",
                ),
        )
        .arg(
            Arg::new("report")
                .long("report")
                .value_name("FILE")
                .value_parser(value_parser!(PathBuf))
                .help("write a line-delimited JSON run report"),
        )
        .arg(
            Arg::new("profile")
                .long("profile")
                .value_name("competition|general")
                .default_value("competition")
                .value_parser(value_parser!(Profile)),
        )
        .arg(
            Arg::new("climit-min")
                .long("climit-min")
                .value_name("N")
                .value_parser(value_parser!(i64)),
        )
        .arg(
            Arg::new("climit-max")
                .long("climit-max")
                .value_name("N|inf")
                .help("upper cost limit, `inf` for none"),
        )
        .arg(
            Arg::new("time-limit")
                .long("time-limit")
                .value_name("SECS")
                .value_parser(value_parser!(f64))
                .help("per solver call, 0 for none"),
        )
        .arg(
            Arg::new("budget")
                .long("budget")
                .value_name("SECS")
                .value_parser(value_parser!(f64))
                .help("overall wall-clock budget"),
        )
        .arg(backend.clone())
        .arg(
            Arg::new("no-invention")
                .long("no-invention")
                .action(ArgAction::SetTrue),
        )
        .args(param_args());
    let hypspace = Command::new("hypspace")
        .about("print the hypothesis space as cost<TAB>rule lines")
        .args(bias_args())
        .arg(backend.default_value("asp"))
        .args(param_args());
    let encode = Command::new("encode")
        .about("print the hypothesis generation program")
        .args(bias_args())
        .args(param_args());
    Command::new("ilp")
        .about("cost-graded hypothesis spaces and rule induction with an ASP solver")
        .long_about(
            "Learns rules for a target predicate from agent traces. The solver executable \
             is `clingo` unless ILP_CLINGO is set; ILP_CLINGO_ARGS adds solver flags.",
        )
        .subcommand_required(true)
        .subcommand(solve)
        .subcommand(hypspace)
        .subcommand(encode)
}

fn params(m: &ArgMatches) -> Result<SpaceParams, String> {
    let mut p = SpaceParams::default();
    for name in PARAM_NAMES {
        if let Some(v) = m.get_one::<i64>(name) {
            p.set(name, *v).map_err(|e| e.to_string())?;
        }
    }
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn bias(m: &ArgMatches) -> Result<ModeBias, String> {
    if let Some(path) = m.get_one::<PathBuf>("instance") {
        let inst = parse_instance(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(inst.bias());
    }
    let target = m
        .get_one::<String>("target")
        .ok_or("a bias is required: --instance FILE or --target DECL [--relevant DECL ...]")?;
    let relevant: Vec<&str> = m
        .get_many::<String>("relevant")
        .map(|v| v.map(String::as_str).collect())
        .unwrap_or_default();
    let b = ModeBias::from_decls(target, &relevant).map_err(|e| e.to_string())?;
    b.validate().map_err(|e| e.to_string())?;
    Ok(b)
}

fn secs(v: f64) -> Option<Duration> {
    (v > 0.0).then(|| Duration::from_secs_f64(v))
}

fn driver_config(m: &ArgMatches) -> Result<DriverConfig, String> {
    let profile = *m.get_one::<Profile>("profile").expect("has default");
    let mut cfg = DriverConfig::profile(profile);
    cfg.params = params(m)?;
    if let Some(v) = m.get_one::<i64>("climit-min") {
        cfg.climit_min = *v;
    }
    if let Some(v) = m.get_one::<String>("climit-max") {
        cfg.climit_max = match v.as_str() {
            "inf" | "none" => None,
            n => Some(
                n.parse()
                    .map_err(|_| format!("invalid --climit-max `{n}`"))?,
            ),
        };
    }
    if let Some(v) = m.get_one::<f64>("time-limit") {
        cfg.time_limit = secs(*v);
    }
    if let Some(v) = m.get_one::<f64>("budget") {
        cfg.global_budget = secs(*v);
    }
    if let Some(b) = m.get_one::<Backend>("backend") {
        cfg.backend = *b;
    }
    if m.get_flag("no-invention") {
        cfg.invention = false;
    }
    if cfg.climit_min < 1 {
        return Err("--climit-min must be at least 1".into());
    }
    if let Some(max) = cfg.climit_max {
        if max < cfg.climit_min {
            return Err("--climit-max is below --climit-min".into());
        }
    }
    Ok(cfg)
}

fn solve(m: &ArgMatches, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let path = m.get_one::<PathBuf>("file").expect("required");
    let inst = match read(path)
        .and_then(|t| parse_instance(&t).map_err(|e| format!("{}: {e}", path.display())))
    {
        Ok(i) => i,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let cfg = match driver_config(m) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let mut report = match m.get_one::<PathBuf>("report") {
        Some(p) => match File::create(p) {
            Ok(f) => Some(BufWriter::new(f)),
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", p.display());
                return EXIT_INPUT;
            }
        },
        None => None,
    };
    let mut driver = Driver::new(&inst, cfg, Solver::from_env());
    if let Some(r) = report.as_mut() {
        driver = driver.with_report(r);
    }
    let outcome = if m.get_flag("batch") {
        driver.run_batch(out)
    } else {
        driver.run(out)
    };
    drop(driver);
    if let Some(mut r) = report {
        let _ = r.flush();
    }
    match &outcome.hypothesis {
        Some(h) => {
            let _ = writeln!(
                err,
                "learned hypothesis (cost {}, {} of {} examples):",
                h.total_cost, outcome.quality, outcome.examples
            );
            let _ = err.write_all(h.program().as_bytes());
        }
        None => {
            let _ = writeln!(err, "no hypothesis found");
        }
    }
    if outcome.attempts.is_empty() {
        EXIT_NO_ATTEMPT
    } else {
        EXIT_OK
    }
}

fn hypspace(m: &ArgMatches, out: &mut dyn Write) -> Result<(), String> {
    let bias = bias(m)?;
    let p = params(m)?;
    let climit = *m.get_one::<i64>("climit").expect("has default");
    let invention = !m.get_flag("no-invention");
    let lang = Language::new(bias, p.limits);
    let space = match m.get_one::<Backend>("backend").copied().unwrap_or_default() {
        Backend::Native => enumerate_with(
            &lang,
            &p.costs,
            climit,
            NativeOptions {
                invention,
                prune: true,
            },
        ),
        Backend::Asp => generate_space_asp(
            &lang,
            &p.costs,
            climit,
            invention,
            &Solver::from_env(),
            None,
        )
        .map_err(|e| e.to_string())?,
    };
    out.write_all(space.listing().as_bytes())
        .map_err(|e| e.to_string())
}

fn encode(m: &ArgMatches, out: &mut dyn Write) -> Result<(), String> {
    let bias = bias(m)?;
    let p = params(m)?;
    let climit = *m.get_one::<i64>("climit").expect("has default");
    let bundle = emit_encoding(
        &bias,
        &p.limits,
        &p.costs,
        climit,
        !m.get_flag("no-invention"),
    )
    .map_err(|e| e.to_string())?;
    out.write_all(bundle.standalone().as_bytes())
        .map_err(|e| e.to_string())
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match matches.subcommand() {
        Some(("solve", m)) => return solve(m, out, err),
        Some(("hypspace", m)) => hypspace(m, out),
        Some(("encode", m)) => encode(m, out),
        _ => Err("unknown command".into()),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
