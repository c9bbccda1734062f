//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the summary is always printed.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use tsrm_core::cli::{planted_triples, YesNo};
use tsrm_core::evaluate::{self, brute_force_opt, brute_force_opt_with, eval_explicit, eval_stochastic, eval_tsrm, Objective};
use tsrm_core::instances::{gen_from_2partition, gen_from_3dm, gen_from_set_cover, gen_line_counterexample, gen_surplus_counterexample};
use tsrm_core::matching::{bottleneck_matching, bottleneck_value, min_weight_max_cardinality_matching, min_weight_perfect_matching};
use tsrm_core::model::{MetricInstance, ScenarioSet};
use tsrm_core::solvers::{
    p_supplier_3approx, solve_greedy, solve_k1, solve_no_surplus, solve_p_scenarios, solve_single_scenario,
    solve_small_surplus, solve_two_scenarios, supplier_radius,
};
use tsrm_core::variants::{solve_tsrm_balanced, solve_tsrm_greedy, solve_tsrm_no_surplus, solve_tssmb_no_surplus};
use tsrm_core::FirstStageDecision;

const LIMIT: u128 = 5_000_000;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn within_time(out: Outcome, took: Duration, budget: Duration) -> Outcome {
    if out.ok && took > budget {
        return fail(format!("{} but took {:.1}s, budget {}s", out.detail, took.as_secs_f64(), budget.as_secs()));
    }
    out
}

/// Counts the seeds in `seeds` where `bad` returns a message; reports the
/// first one.
fn sweep(seeds: impl IntoIterator<Item = u64>, what: &str, mut bad: impl FnMut(u64) -> Option<String>) -> Outcome {
    let mut n = 0;
    let mut failures = 0;
    let mut first = None;
    for seed in seeds {
        n += 1;
        if let Some(msg) = bad(seed) {
            failures += 1;
            first.get_or_insert(format!("seed {seed}: {msg}"));
        }
    }
    match first {
        None => pass(format!("{n} {what}, all within bound")),
        Some(f) => fail(format!("{failures}/{n} {what} violate the bound; first {f}")),
    }
}

fn robust_total(inst: &MetricInstance, d1: &FirstStageDecision) -> f64 {
    evaluate::evaluate(inst, d1, LIMIT).unwrap().total
}

fn c1_matching() -> Outcome {
    let mut mismatches = Vec::new();
    for seed in 0..500u64 {
        let mut r = rng(seed);
        let (rows, cols) = (r.gen_range(1..=7), r.gen_range(1..=7));
        let w = random_matrix(&mut r, rows, cols, 0.3);
        let all = saturating_assignments(&w);
        let best_total = all.iter().map(|a| a.0).reduce(f64::min);
        let best_max = all.iter().map(|a| a.1).reduce(f64::min);

        let perfect = min_weight_perfect_matching(&w).ok().map(|m| m.total_weight);
        let agree = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => (x - y).abs() <= TOL,
            (None, None) => true,
            _ => false,
        };
        if !agree(perfect, best_total) {
            mismatches.push(format!("seed {seed}: perfect {perfect:?} vs {best_total:?}"));
        }
        let m = min_weight_max_cardinality_matching(&w);
        let (card, weight) = brute_max_card_min_weight(&w);
        if m.len() != card || (m.total_weight - weight).abs() > TOL {
            mismatches.push(format!("seed {seed}: max-card ({}, {}) vs ({card}, {weight})", m.len(), m.total_weight));
        }
        let b = bottleneck_value(&w).ok();
        let bm = bottleneck_matching(&w).ok().map(|m| m.bottleneck);
        if !agree(b, best_max) || !agree(bm, best_max) {
            mismatches.push(format!("seed {seed}: bottleneck {b:?}/{bm:?} vs {best_max:?}"));
        }
    }
    match mismatches.first() {
        None => pass("500 matrices agree with enumeration"),
        Some(f) => fail(format!("{} mismatches; first {f}", mismatches.len())),
    }
}

fn c2_single_exact() -> Outcome {
    sweep(1000..1200, "single-scenario instances", |seed| {
        let inst = small_explicit(seed, 1);
        let s = inst.scenarios().explicit().unwrap()[0].clone();
        let got = eval_explicit(&inst, &solve_single_scenario(&inst, &s).unwrap()).unwrap().total;
        let opt = brute_force_opt(&inst, LIMIT).unwrap().total;
        ((got - opt).abs() > TOL).then(|| format!("solver {got} vs optimum {opt}"))
    })
}

fn c3_greedy_line() -> Outcome {
    let inst = gen_line_counterexample(3, 0.1).unwrap();
    let greedy = eval_explicit(&inst, &solve_greedy(&inst).unwrap()).unwrap().total;
    let opt = brute_force_opt(&inst, LIMIT).unwrap().total;
    if (greedy - 7.6).abs() > TOL || (opt - 2.0).abs() > TOL {
        return fail(format!("m=3: greedy {greedy}, optimum {opt}"));
    }
    let mut ratios = Vec::new();
    for m in 1..=6 {
        let inst = gen_line_counterexample(m, 0.1).unwrap();
        let g = eval_explicit(&inst, &solve_greedy(&inst).unwrap()).unwrap().total;
        let o = brute_force_opt(&inst, LIMIT).unwrap().total;
        ratios.push(g / o);
    }
    let step = 1.9 / 2.0;
    let linear = ratios.iter().enumerate().all(|(i, r)| (r - step * (i as f64 + 2.0)).abs() <= TOL);
    if linear {
        pass(format!("greedy 7.6, optimum 2.0; ratios {ratios:.3?} grow by {step} per step"))
    } else {
        fail(format!("ratios {ratios:?} are not linear in m"))
    }
}

fn c4_two_scenarios() -> Outcome {
    sweep(2000..2200, "two-scenario instances", |seed| {
        let inst = small_explicit(seed, 2);
        let got = eval_explicit(&inst, &solve_two_scenarios(&inst).unwrap()).unwrap().total;
        let opt = brute_force_opt(&inst, LIMIT).unwrap();
        (got > opt.opt1 + 5.0 * opt.opt2 + TOL).then(|| format!("total {got} > {} + 5 * {}", opt.opt1, opt.opt2))
    })
}

fn c5_p_scenarios() -> Outcome {
    sweep(3000..3100, "four-scenario instances", |seed| {
        let inst = small_explicit(seed, 4);
        let got = eval_explicit(&inst, &solve_p_scenarios(&inst).unwrap()).unwrap().total;
        let opt = brute_force_opt(&inst, LIMIT).unwrap();
        (got > opt.opt1 + 17.0 * opt.opt2 + TOL).then(|| format!("total {got} > {} + 17 * {}", opt.opt1, opt.opt2))
    })
}

fn c6_no_surplus() -> Outcome {
    sweep(4000..4150, "implicit zero-surplus instances", |seed| {
        let mut r = rng(seed);
        let k = r.gen_range(1..=3);
        let inst = implicit(seed, r.gen_range(1..=4), r.gen_range(k..=8), k, 0);
        let got = robust_total(&inst, &solve_no_surplus(&inst).unwrap());
        let opt = brute_force_opt(&inst, LIMIT).unwrap();
        (got > opt.opt1 + 3.0 * opt.opt2 + TOL).then(|| format!("total {got} > {} + 3 * {}", opt.opt1, opt.opt2))
    })
}

fn c7_small_surplus() -> Outcome {
    sweep(5000..5100, "implicit k=3 instances", |seed| {
        let mut r = rng(seed);
        let inst = implicit(seed, r.gen_range(1..=3), r.gen_range(18..=20), 3, r.gen_range(1..=2));
        let got = robust_total(&inst, &solve_small_surplus(&inst).unwrap());
        let opt = brute_force_opt(&inst, LIMIT).unwrap();
        (got > 3.0 * opt.opt1 + 17.0 * opt.opt2 + TOL)
            .then(|| format!("total {got} > 3 * {} + 17 * {}", opt.opt1, opt.opt2))
    })
}

fn c8_k1() -> Outcome {
    let random = sweep(6000..6150, "k=1 instances", |seed| {
        let mut r = rng(seed);
        let r1 = r.gen_range(1..=4);
        let inst = implicit(seed, r1, r.gen_range(2..=7), 1, r.gen_range(0..=r1 + 1));
        let got = robust_total(&inst, &solve_k1(&inst).unwrap());
        let opt = brute_force_opt(&inst, LIMIT).unwrap();
        (got > opt.opt1 + 15.0 * opt.opt2 + TOL).then(|| format!("total {got} > {} + 15 * {}", opt.opt1, opt.opt2))
    });
    if !random.ok {
        return random;
    }
    let mut k1 = Vec::new();
    let mut single = Vec::new();
    for m in 2..=6 {
        let inst = gen_surplus_counterexample(m).unwrap();
        k1.push(robust_total(&inst, &solve_k1(&inst).unwrap()));
        single.push(robust_total(&inst, &solve_single_scenario(&inst, &[0]).unwrap()));
    }
    let bounded = k1.iter().all(|&t| t <= k1[0] + TOL);
    let steps: Vec<f64> = single.windows(2).map(|w| w[1] - w[0]).collect();
    let linear = steps.iter().all(|s| *s > TOL && (s - steps[0]).abs() <= TOL);
    if bounded && linear {
        pass(format!("{}; chains m=2..6: k1 totals {k1:.2?}, single-end totals {single:.2?}", random.detail))
    } else {
        fail(format!("chains m=2..6: k1 totals {k1:?} (bounded: {bounded}), single-end totals {single:?} (linear: {linear})"))
    }
}

fn c9_p_supplier() -> Outcome {
    use itertools::Itertools;
    sweep(7000..7100, "p-supplier instances", |seed| {
        let mut r = rng(seed);
        let (n, d) = (r.gen_range(1..=8), r.gen_range(1..=9));
        let p = r.gen_range(1..=d);
        let grid = r.gen_bool(0.3);
        let inst = point_instance(&mut r, 1, n, d, ScenarioSet::Implicit { k: 1 }, grid);
        let clients: Vec<usize> = (0..n).collect();
        let chosen = p_supplier_3approx(&inst, &clients, &inst.all_drivers(), p).unwrap();
        let got = supplier_radius(&inst, &clients, &chosen);
        let opt = (0..d).combinations(p).map(|c| supplier_radius(&inst, &clients, &c)).fold(f64::INFINITY, f64::min);
        (chosen.len() != p || got > 3.0 * opt + TOL).then(|| format!("{} centers, radius {got} vs optimum {opt}", chosen.len()))
    })
}

fn c10_variants() -> Outcome {
    let tssmb = sweep(8000..8100, "stochastic instances", |seed| {
        let mut r = rng(seed);
        let p = r.gen_range(1..=3);
        let inst = no_surplus_explicit(seed, p);
        let raw: Vec<f64> = (0..p).map(|_| r.gen_range(0.1..1.0)).collect();
        let probs: Vec<f64> = raw.iter().map(|x| x / raw.iter().sum::<f64>()).collect();
        let got = eval_stochastic(&inst, &solve_tssmb_no_surplus(&inst, &probs).unwrap(), &probs).unwrap();
        let opt = brute_force_opt_with(&inst, &Objective::Stochastic(probs), LIMIT).unwrap();
        (got > opt.opt1 + 3.0 * opt.opt2 + TOL).then(|| format!("total {got} > {} + 3 * {}", opt.opt1, opt.opt2))
    });
    let tsrm = |base: u64, what: &str, check: fn(&MetricInstance, f64, f64, f64) -> Option<String>| {
        sweep(base..base + 100, what, |seed| {
            let p = rng(seed).gen_range(1..=3);
            let inst = no_surplus_explicit(seed, p);
            let opt = brute_force_opt_with(&inst, &Objective::Tsrm, LIMIT).unwrap();
            check(&inst, opt.opt1, opt.opt2, opt.total)
        })
    };
    let greedy = tsrm(9000, "TSRM greedy instances", |inst, o1, o2, _| {
        let got = eval_tsrm(inst, &solve_tsrm_greedy(inst).unwrap()).unwrap().total;
        (got > 3.0 * o1 + o2 + TOL).then(|| format!("greedy {got} > 3 * {o1} + {o2}"))
    });
    let reserve = tsrm(10_000, "TSRM reserve-first instances", |inst, o1, o2, _| {
        let got = eval_tsrm(inst, &solve_tsrm_no_surplus(inst).unwrap()).unwrap().total;
        (got > o1 + 5.0 * o2 + TOL).then(|| format!("reserve-first {got} > {o1} + 5 * {o2}"))
    });
    let balanced = tsrm(11_000, "TSRM balanced instances", |inst, _, _, total| {
        let got = eval_tsrm(inst, &solve_tsrm_balanced(inst).unwrap()).unwrap().total;
        (got > 7.0 / 3.0 * total + TOL).then(|| format!("balanced {got} > 7/3 * {total}"))
    });
    let parts = [tssmb, greedy, reserve, balanced];
    let detail = parts.iter().map(|o| o.detail.as_str()).collect::<Vec<_>>().join("; ");
    Outcome { ok: parts.iter().all(|o| o.ok), detail }
}

fn c11_reductions() -> Outcome {
    let robust = |inst: MetricInstance| brute_force_opt(&inst, LIMIT).unwrap().total;
    let got = [
        robust(gen_from_3dm(3, &planted_triples(YesNo::Yes, 3).unwrap(), 3).unwrap()),
        robust(gen_from_3dm(3, &planted_triples(YesNo::No, 3).unwrap(), 3).unwrap()),
        robust(gen_from_set_cover(3, &[vec![0, 1, 2], vec![0], vec![1]], 1).unwrap()),
        robust(gen_from_set_cover(3, &[vec![0, 1], vec![1, 2], vec![0, 2]], 1).unwrap()),
        brute_force_opt_with(&gen_from_2partition(&[1, 1, 1, 1]).unwrap(), &Objective::Tsrm, LIMIT).unwrap().total,
    ];
    let want = [2.0, 4.0, 2.0, 4.0, 26.0];
    if got == want {
        pass(format!("3-DM {} / {}, set cover {} / {}, 2-partition {}", got[0], got[1], got[2], got[3], got[4]))
    } else {
        fail(format!("got {got:?}, want {want:?}"))
    }
}

fn c12_pipeline() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("trips.csv");
    std::fs::write(&log, planted_trip_log(12)).unwrap();
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_tsrm"))
            .args(["bench", "--trips"])
            .arg(&log)
            .args(["--window", PLANTED_WINDOW, "--seed", "42", "--repeats", "3"])
            .output()
            .unwrap();
        (out.status.code(), String::from_utf8(out.stdout).unwrap())
    };
    let (a, b) = (run(), run());
    if a.0 != Some(0) || a != b {
        return fail(format!("runs differ or failed: {a:?} vs {b:?}"));
    }
    let lines: Vec<&str> = a.1.lines().collect();
    let header: Vec<&str> = lines[0].split(',').collect();
    let col = header.iter().position(|h| *h == "alg_over_opt").unwrap();
    let Some(row) = lines.get(1) else { return fail("no rows") };
    let alg: f64 = row.split(',').nth(col).unwrap().parse().unwrap();
    if (alg - 1.0).abs() <= TOL && lines.len() == 2 {
        pass(format!("two runs byte-identical ({} bytes), alg_over_opt {alg}", a.1.len()))
    } else {
        fail(format!("alg_over_opt {alg}, {} lines", lines.len()))
    }
}

type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 12] = [
        ("C1 matching primitives vs enumeration", c1_matching, 30),
        ("C2 single-scenario solver is exact", c2_single_exact, 60),
        ("C3 greedy line counterexample", c3_greedy_line, 600),
        ("C4 two scenarios within OPT1 + 5 OPT2", c4_two_scenarios, 300),
        ("C5 four scenarios within OPT1 + 17 OPT2", c5_p_scenarios, 600),
        ("C6 no surplus within OPT1 + 3 OPT2", c6_no_surplus, 600),
        ("C7 small surplus within 3 OPT1 + 17 OPT2", c7_small_surplus, 600),
        ("C8 k=1 within OPT1 + 15 OPT2", c8_k1, 600),
        ("C9 p-supplier within 3x optimal radius", c9_p_supplier, 600),
        ("C10 stochastic and total-weight variants", c10_variants, 600),
        ("C11 reduction families", c11_reductions, 600),
        ("C12 bench determinism", c12_pipeline, 600),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| name.contains(x.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| fail("panicked"));
        let took = start.elapsed();
        let out = within_time(out, took, Duration::from_secs(budget));
        failed += usize::from(!out.ok);
        println!("{} {name} ({:.1}s): {}", if out.ok { "PASS" } else { "FAIL" }, took.as_secs_f64(), out.detail);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
