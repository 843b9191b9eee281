//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs without the libtest harness so the report stays readable.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::*;
use ilp_core::canonical::alpha_key;
use ilp_core::config::CostConfig;
use ilp_core::cost::rule_cost;
use ilp_core::driver::{Driver, DriverConfig, Profile};
use ilp_core::evaluation::Evaluator;
use ilp_core::induction::find_hypothesis;
use ilp_core::instance::{parse_instance, InstanceFile, Verdict};
use ilp_core::rule::{HypHead, HypLiteral, HypRule, HypVar, Language, Polarity};
use ilp_core::space::asp::generate_space_asp;
use ilp_core::space::native::{enumerate_with, NativeOptions};
use ilp_core::space::{Backend, HypothesisSpace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const TL: Option<Duration> = Some(Duration::from_secs(20));

fn native(lang: &Language, climit: i64, invention: bool) -> HypothesisSpace {
    enumerate_with(
        lang,
        &CostConfig::default(),
        climit,
        NativeOptions {
            invention,
            prune: true,
        },
    )
}

fn asp(lang: &Language, climit: i64, invention: bool) -> Result<HypothesisSpace, String> {
    generate_space_asp(
        lang,
        &CostConfig::default(),
        climit,
        invention,
        &solver(),
        None,
    )
    .map_err(|e| e.to_string())
}

fn cost_buckets() -> Check {
    let lang = lang(grid_bias());
    let mut notes = Vec::new();
    for backend in [Backend::Asp, Backend::Native] {
        let t = Instant::now();
        let space = match backend {
            Backend::Asp => asp(&lang, 6, true)?,
            Backend::Native => native(&lang, 6, true),
        };
        let took = t.elapsed();
        let b = buckets(&space);
        let (four, five) = (
            b.get(&4).copied().unwrap_or(0),
            b.get(&5).copied().unwrap_or(0),
        );
        ensure!(
            four == 9 && five == 14,
            "{backend:?}: cost 4 -> {four}, cost 5 -> {five}"
        );
        ensure!(took < Duration::from_secs(10), "{backend:?} took {took:?}");
        notes.push(format!("{backend:?} {:.2}s", took.as_secs_f64()));
    }
    Ok(format!(
        "9 rules of cost 4, 14 of cost 5 ({})",
        notes.join(", ")
    ))
}

fn single_rule_cost() -> Check {
    let v = |i, t: &str| HypVar::new(i, t);
    let rule = HypRule::new(
        HypHead {
            pred_id: "t1".into(),
            predicate: "valid_move".into(),
            args: vec![v(5, "cell"), v(10, "time")],
        },
        vec![HypLiteral {
            pred_id: "r2".into(),
            predicate: "agent_at".into(),
            polarity: Polarity::Neg,
            slot: 1,
            args: vec![v(5, "cell"), v(10, "time")],
        }],
        vec![],
    );
    let cost = rule_cost(&rule, &CostConfig::default());
    ensure!(
        cost.total == 2,
        "total {} from {:?}",
        cost.total,
        cost.nonzero_items()
    );
    let items: Vec<&str> = cost
        .nonzero_items()
        .iter()
        .map(|i| i.name.as_str())
        .collect();
    ensure!(items == ["negbodyliteral"], "components {items:?}");
    // the generator must agree on the same rule
    let space = asp(&lang(grid_bias()), 3, true)?;
    let found = space.rules.iter().find(|r| r.text == rule.render());
    ensure!(
        found.map(|r| r.cost.total) == Some(2),
        "ASP backend: {:?}",
        found.map(|r| r.cost.total)
    );
    Ok("total 2, all from the negative body literal".into())
}

fn backend_equivalence() -> Check {
    let t = Instant::now();
    let biases = [
        ("grid", grid_bias(), true),
        ("minus h_adjacent", grid_bias().without("h_adjacent"), true),
        ("invention disabled", grid_bias(), false),
    ];
    let mut compared = 0;
    for (name, bias, invention) in biases {
        let lang = lang(bias);
        for climit in 2..=7 {
            let a = asp(&lang, climit, invention)?;
            let n = native(&lang, climit, invention);
            ensure!(
                a.exhaustive,
                "{name} climit {climit}: ASP enumeration incomplete"
            );
            if a.pairs() != n.pairs() {
                let only_a: Vec<_> = a.pairs().difference(&n.pairs()).take(3).cloned().collect();
                let only_n: Vec<_> = n.pairs().difference(&a.pairs()).take(3).cloned().collect();
                return Err(format!(
                    "{name} climit {climit}: asp-only {only_a:?}, native-only {only_n:?}"
                ));
            }
            compared += 1;
        }
    }
    let took = t.elapsed();
    ensure!(took < Duration::from_secs(120), "took {took:?}");
    Ok(format!(
        "{compared} (bias, climit) pairs identical in {:.1}s",
        took.as_secs_f64()
    ))
}

fn end_to_end() -> Check {
    let inst = grid();
    let bk = inst.background_text();
    // fixture check: one minimal hypothesis per example among rules of cost <= 6
    let space = native(&lang(inst.bias()), 7, true);
    for ex in &inst.examples {
        let (best, hyps) = minimal_hypotheses(&bk, ex, &space, "valid_move");
        ensure!(
            hyps.len() == 1,
            "example {}: {} minimal hypotheses of cost {best}",
            ex.id,
            hyps.len()
        );
        if let Some(inv) = cheapest_invention_pair(&space) {
            ensure!(
                inv > best,
                "invention pair of cost {inv} competes with {best}"
            );
        }
    }
    let t = Instant::now();
    let mut out = Vec::new();
    let outcome =
        Driver::new(&inst, DriverConfig::profile(Profile::Competition), solver()).run(&mut out);
    let took = t.elapsed();
    ensure!(
        outcome.quality == 2 && outcome.examples == 2,
        "quality {}/{}",
        outcome.quality,
        outcome.examples
    );
    ensure!(!outcome.attempts.is_empty(), "no attempt");
    let last = outcome.attempts.last().unwrap();
    ensure!(
        last.predictions == [(0, Verdict::Valid), (1, Verdict::Invalid)],
        "predictions {:?}",
        last.predictions
    );
    ensure!(took < Duration::from_secs(30), "took {took:?}");
    Ok(format!(
        "2/2 with {} attempt(s), tests predicted correctly in {:.1}s",
        outcome.attempts.len(),
        took.as_secs_f64()
    ))
}

fn soundness() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let target = grid_bias().target;
    let space = native(&lang(grid_bias()), 8, true);
    let s = solver();
    let mut found = 0;
    for k in 0..50 {
        let world = World::random(&mut rng);
        let bk = world.background(3);
        let ex = world.example(&mut rng, k, 3);
        let h = find_hypothesis(&bk, &ex.trace, &ex.valid_moves, &space, &target, &s, TL)
            .map_err(|e| format!("instance {k}: {e}"))?;
        let Some(h) = h else { continue };
        found += 1;
        let ev = Evaluator {
            bk: &bk,
            target: &target,
            solver: &s,
            time_limit: TL,
        };
        ensure!(
            ev.check_example(&h.program(), &ex),
            "instance {k} ({world:?}): hypothesis fails its example:\n{}",
            h.program()
        );
    }
    ensure!(
        found >= 25,
        "only {found} of 50 instances produced a hypothesis"
    );
    let took = t.elapsed();
    ensure!(took < Duration::from_secs(300), "took {took:?}");
    Ok(format!(
        "{found}/50 hypotheses found, all sound, {:.1}s",
        took.as_secs_f64()
    ))
}

fn monotone_and_canonical() -> Check {
    let mut biases = vec![grid_bias(), grid_bias().without("h_adjacent")];
    biases.push(
        ilp_core::bias::ModeBias::from_decls(
            "assigned(person,desk)",
            &["prefers(person,desk)", "between(desk,desk,desk)"],
        )
        .map_err(|e| e.to_string())?,
    );
    let mut checked = 0;
    for bias in biases {
        let lang = lang(bias);
        let spaces: Vec<_> = (1..=7).map(|c| native(&lang, c, true)).collect();
        for (i, s) in spaces.iter().enumerate() {
            let keys: BTreeSet<String> = s.rules.iter().map(|r| alpha_key(&r.rule)).collect();
            ensure!(
                keys.len() == s.len(),
                "climit {}: alpha-equivalent rules",
                i + 1
            );
            for later in &spaces[i..] {
                ensure!(
                    s.pairs().is_subset(&later.pairs()),
                    "space {} not contained in {}",
                    s.climit,
                    later.climit
                );
            }
            checked += s.len();
        }
        let top = asp(&lang, 7, true)?;
        let keys: BTreeSet<String> = top.rules.iter().map(|r| alpha_key(&r.rule)).collect();
        ensure!(
            keys.len() == top.len(),
            "ASP space at climit 7: alpha-equivalent rules"
        );
    }
    Ok(format!(
        "{checked} rules across nested spaces, no alpha-equivalent pairs"
    ))
}

/// Replays a run report and checks the attempt rules against it.
fn audit_report(report: &str, examples: &InstanceFile) -> Result<usize, String> {
    let events: Vec<Value> = report
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let n = examples.examples.len() as u64;
    let mut best = 0u64;
    let mut attempts = 0;
    let mut last_len = 0u64;
    let mut i = 0;
    while i < events.len() {
        let e = &events[i];
        match e["event"].as_str().unwrap() {
            "example" => {
                let len = e["trace_len"].as_u64().unwrap();
                ensure!(len >= last_len, "examples not visited shortest trace first");
                last_len = len;
            }
            "hypothesis" => {
                let q = e["quality"].as_u64().unwrap();
                let next = events.get(i + 1).map(|n| n["event"].as_str().unwrap());
                if q > best {
                    ensure!(
                        next == Some("attempt"),
                        "improvement to {q} without attempt"
                    );
                    ensure!(
                        events[i + 1]["quality"].as_u64() == Some(q),
                        "attempt quality mismatch"
                    );
                    best = q;
                    attempts += 1;
                    i += 1;
                    if q == n {
                        let rest = events.get(i + 1).map(|n| n["event"].as_str().unwrap());
                        ensure!(
                            rest == Some("done"),
                            "run continued after full quality: {rest:?}"
                        );
                    }
                } else {
                    ensure!(
                        next != Some("attempt"),
                        "attempt without improvement (quality {q}, best {best})"
                    );
                }
            }
            "attempt" => return Err("attempt not preceded by an improving hypothesis".into()),
            _ => {}
        }
        i += 1;
    }
    Ok(attempts)
}

fn attempt_discipline() -> Check {
    let mut instances = vec![
        ("two-step", parse_instance(TWO_STEP).unwrap()),
        ("grid", grid()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for k in 0..4 {
        let world = World::random(&mut rng);
        let mut text = format!("#background\n{}\n", world.background(3));
        text.push_str("#target_predicate\nvalid_move(cell,time)\n#relevant_predicates\n");
        text.push_str(
            "gap(cell)\nagent_at(cell,time)\nh_adjacent(cell,cell)\nv_adjacent(cell,cell)\n",
        );
        for id in 0..3 {
            let ex = world.example(&mut rng, id, 1 + id as usize);
            text.push_str(&format!("#Example({id})\n#trace\n"));
            for a in &ex.trace {
                text.push_str(&format!("{a}.\n"));
            }
            text.push_str("#valid_moves\n");
            for a in &ex.valid_moves {
                text.push_str(&format!("{a}.\n"));
            }
        }
        text.push_str("#Test(0)\n#trace\nagent_at((0,0),0).\n");
        instances.push((
            ["w0", "w1", "w2", "w3"][k],
            parse_instance(&text).map_err(|e| e.to_string())?,
        ));
    }
    let mut total = 0;
    let mut improved_twice = false;
    for (name, inst) in &instances {
        let mut cfg = DriverConfig::profile(Profile::Competition);
        cfg.climit_max = Some(8);
        let mut report = Vec::new();
        let mut out = Vec::new();
        let outcome = Driver::new(inst, cfg, solver())
            .with_report(&mut report)
            .run(&mut out);
        let n = audit_report(&String::from_utf8(report).unwrap(), inst)
            .map_err(|e| format!("{name}: {e}"))?;
        ensure!(
            n == outcome.attempts.len(),
            "{name}: report and outcome disagree"
        );
        let qs: Vec<usize> = outcome.attempts.iter().map(|a| a.quality).collect();
        ensure!(
            qs.windows(2).all(|w| w[0] < w[1]),
            "{name}: attempt qualities {qs:?}"
        );
        ensure!(
            String::from_utf8(out).unwrap().matches("#attempt").count() == n,
            "{name}: printed attempts differ"
        );
        improved_twice |= qs.len() >= 2;
        total += n;
    }
    let two = &instances[0].1;
    let mut out = Vec::new();
    let o = Driver::new(two, DriverConfig::profile(Profile::Competition), solver()).run(&mut out);
    let qs: Vec<usize> = o.attempts.iter().map(|a| a.quality).collect();
    ensure!(qs == [1, 2], "two-step fixture attempt qualities {qs:?}");
    ensure!(improved_twice, "no run exercised a second improvement");
    Ok(format!(
        "{total} attempts over {} instrumented runs",
        instances.len()
    ))
}

fn dev_instances() -> Check {
    let Some(spec) = std::env::var_os("ILP_DEV_INSTANCES") else {
        return Ok("no development instances provided; substituted by criteria 1-7".into());
    };
    let mut files: Vec<PathBuf> = Vec::new();
    for p in std::env::split_paths(&spec) {
        if p.is_dir() {
            let mut v: Vec<PathBuf> = std::fs::read_dir(&p)
                .map_err(|e| format!("{}: {e}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            v.sort();
            files.extend(v);
        } else {
            files.push(p);
        }
    }
    let mut with_attempt = 0;
    for f in &files {
        let text = std::fs::read_to_string(f).map_err(|e| format!("{}: {e}", f.display()))?;
        let inst = parse_instance(&text).map_err(|e| format!("{}: {e}", f.display()))?;
        let mut cfg = DriverConfig::profile(Profile::Competition);
        cfg.global_budget = Some(Duration::from_secs(600));
        let t = Instant::now();
        let mut out = Vec::new();
        let o = Driver::new(&inst, cfg, solver()).run(&mut out);
        if !o.attempts.is_empty() && t.elapsed() < Duration::from_secs(600) {
            with_attempt += 1;
        }
    }
    ensure!(
        with_attempt >= 1,
        "no attempt on any of {} instances",
        files.len()
    );
    Ok(format!(
        "attempts on {with_attempt} of {} development instances",
        files.len()
    ))
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 8] = [
        ("cost buckets", cost_buckets),
        ("single-rule cost", single_rule_cost),
        ("backend equivalence", backend_equivalence),
        ("end-to-end learning", end_to_end),
        ("induction soundness", soundness),
        ("monotonicity and canonicality", monotone_and_canonical),
        ("attempt discipline", attempt_discipline),
        ("development instances", dev_instances),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if n == 8 && failed > 0 && std::env::var_os("ILP_DEV_INSTANCES").is_none() {
            println!("FAIL {n} {name}: substitute requires criteria 1-7 to pass");
            failed += 1;
            continue;
        }
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(note) => println!("PASS {n} {name}: {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {n} {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
