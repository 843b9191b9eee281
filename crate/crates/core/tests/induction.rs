mod common;

use std::time::Duration;

use common::*;
use ilp_core::driver::{Driver, DriverConfig, Profile};
use ilp_core::evaluation::Evaluator;
use ilp_core::induction::{find_hypothesis, find_hypothesis_multi};
use ilp_core::instance::{parse_instance, Verdict};
use ilp_core::space::native::enumerate_space;
use ilp_core::space::HypothesisSpace;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TL: Option<Duration> = Some(Duration::from_secs(20));

fn native_cfg() -> DriverConfig {
    let mut cfg = DriverConfig::profile(Profile::Competition);
    cfg.backend = ilp_core::space::Backend::Native;
    cfg.time_limit = TL;
    cfg
}

#[test]
fn fixture_examples_have_unique_minimal_hypotheses() {
    let inst = grid();
    let bk = inst.background_text();
    let lang = lang(inst.bias());
    let space = enumerate_space(&lang, &Default::default(), 9);
    for ex in &inst.examples {
        let (best, hyps) = minimal_hypotheses(&bk, ex, &space, "valid_move");
        assert_eq!(hyps.len(), 1, "example {}: {hyps:?}", ex.id);
        if let Some(inv) = cheapest_invention_pair(&space) {
            assert!(inv > best);
        }
        let found = find_hypothesis(
            &bk,
            &ex.trace,
            &ex.valid_moves,
            &space,
            &inst.target,
            &solver(),
            TL,
        )
        .unwrap()
        .expect("a hypothesis exists");
        assert!(found.proven_optimal);
        assert_eq!(found.total_cost, best);
        let mut texts: Vec<String> = found.rules.iter().map(|r| r.text.clone()).collect();
        texts.sort();
        assert_eq!(texts, hyps[0]);
    }
}

#[test]
fn empty_space_or_unreachable_label_gives_none() {
    let inst = grid();
    let bk = inst.background_text();
    let ex = &inst.examples[0];
    let empty = HypothesisSpace::new(3, Vec::new(), true);
    assert!(find_hypothesis(
        &bk,
        &ex.trace,
        &ex.valid_moves,
        &empty,
        &inst.target,
        &solver(),
        TL
    )
    .unwrap()
    .is_none());
    // no rule of cost below 2 derives anything
    let lang = lang(inst.bias());
    let tiny = enumerate_space(&lang, &Default::default(), 2);
    assert!(find_hypothesis(
        &bk,
        &ex.trace,
        &ex.valid_moves,
        &tiny,
        &inst.target,
        &solver(),
        TL
    )
    .unwrap()
    .is_none());
}

#[test]
fn larger_limits_never_raise_the_optimum() {
    let inst = grid();
    let bk = inst.background_text();
    let lang = lang(inst.bias());
    let ex = &inst.examples[0];
    let mut prev = i64::MAX;
    for climit in [5, 6, 8] {
        let space = enumerate_space(&lang, &Default::default(), climit);
        if let Some(h) = find_hypothesis(
            &bk,
            &ex.trace,
            &ex.valid_moves,
            &space,
            &inst.target,
            &solver(),
            TL,
        )
        .unwrap()
        {
            assert!(h.total_cost <= prev);
            prev = h.total_cost;
        }
    }
    assert!(prev < i64::MAX);
}

#[test]
fn batch_search_covers_disjoint_examples() {
    let inst = parse_instance(DISJOINT).unwrap();
    let bk = inst.background_text();
    let lang = lang(inst.bias());
    let space = enumerate_space(&lang, &Default::default(), 7);
    let h = find_hypothesis_multi(&bk, &inst.examples, &space, &inst.target, &solver(), TL)
        .unwrap()
        .expect("one hypothesis for both examples");
    let ev = Evaluator {
        bk: &bk,
        target: &inst.target,
        solver: &solver(),
        time_limit: TL,
    };
    assert_eq!(ev.quality(&h.program(), &inst.examples), 2);

    let mut out = Vec::new();
    let outcome = Driver::new(&inst, native_cfg(), solver()).run_batch(&mut out);
    assert!(outcome.complete());
    assert_eq!(outcome.attempts.len(), 1);
}

#[test]
fn evaluation_is_deterministic() {
    let inst = grid();
    let bk = inst.background_text();
    let program = "valid_move(V5,V10) :- h_adjacent(V6,V5), agent_at(V6,V10).\n\
                   valid_move(V5,V10) :- v_adjacent(V6,V5), agent_at(V6,V10).\n";
    let s = solver();
    let ev = Evaluator {
        bk: &bk,
        target: &inst.target,
        solver: &s,
        time_limit: TL,
    };
    let first: Vec<_> = inst.tests.iter().map(|t| ev.predict(program, t)).collect();
    assert_eq!(first, vec![Verdict::Valid, Verdict::Invalid]);
    for _ in 0..5 {
        assert_eq!(ev.quality(program, &inst.examples), 2);
        let again: Vec<_> = inst.tests.iter().map(|t| ev.predict(program, t)).collect();
        assert_eq!(again, first);
    }
}

#[test]
fn found_hypotheses_reproduce_their_example() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lang = lang(grid_bias());
    let space = enumerate_space(&lang, &Default::default(), 7);
    let target = grid_bias().target;
    for k in 0..8 {
        let world = World::random(&mut rng);
        let bk = world.background(3);
        let ex = world.example(&mut rng, k, 3);
        let Some(h) = find_hypothesis(
            &bk,
            &ex.trace,
            &ex.valid_moves,
            &space,
            &target,
            &solver(),
            TL,
        )
        .unwrap() else {
            continue;
        };
        let ev = Evaluator {
            bk: &bk,
            target: &target,
            solver: &solver(),
            time_limit: TL,
        };
        assert!(
            ev.check_example(&h.program(), &ex),
            "{world:?}\n{}",
            h.program()
        );
    }
}

#[test]
fn driver_learns_the_fixture() {
    let inst = grid();
    let mut out = Vec::new();
    let outcome = Driver::new(&inst, native_cfg(), solver()).run(&mut out);
    assert!(outcome.complete());
    let text = String::from_utf8(out).unwrap();
    assert!(text.contains("#attempt"));
    let last = outcome.attempts.last().unwrap();
    assert_eq!(
        last.predictions,
        vec![(0, Verdict::Valid), (1, Verdict::Invalid)]
    );
}
