//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion.
//!
//! Runs without the libtest harness so that every criterion is reported even
//! when an earlier one fails; the process exits non-zero if any failed.

use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tollsub_core::netmodel::{
    Commodity, Edge, GameInstance, LatencyFunction, RoutingProblem, SensitivityClass,
    SensitivityModel,
};
use tollsub_core::poa::{
    affine_subsidy_poa_formula, affine_toll_poa_formula, affine_worstcase_search,
    nes_poa_formula, smc_poa_formula, AffineGrid, SensitivitySpec,
};
use tollsub_core::sweeps::theorem1_check;
use tollsub_core::{affine_transform, certify, nash_flow, Mechanism, SolverParams, EPS_EQ};

type Outcome = Result<String, String>;

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "untolled Pigou PoA", limit: secs(1), run: c1_pigou },
        Criterion { id: 2, name: "marginal-cost optimality", limit: secs(5), run: c2_marginal_cost },
        Criterion { id: 3, name: "bounded toll formula", limit: secs(120), run: c3_toll },
        Criterion { id: 4, name: "bounded subsidy formula", limit: secs(120), run: c4_subsidy },
        Criterion { id: 5, name: "subsidy beats toll", limit: secs(120), run: c5_strictness },
        Criterion { id: 6, name: "nominal equivalence, homogeneous", limit: secs(60), run: c6_transform },
        Criterion { id: 7, name: "sensitivity map, heterogeneous", limit: secs(120), run: c7_sensitivity },
        Criterion { id: 8, name: "scaled marginal cost curves", limit: secs(300), run: c8_smc },
        Criterion { id: 9, name: "subsidy/toll formula identity", limit: secs(1), run: c9_identity },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!(
                "{detail}; took {:.2}s, limit {}s",
                elapsed.as_secs_f64(),
                c.limit.as_secs()
            )),
            other => other,
        };
        match outcome {
            Ok(detail) => println!(
                "[PASS] criterion {}: {} ({:.2}s) {detail}",
                c.id,
                c.name,
                elapsed.as_secs_f64()
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "[FAIL] criterion {}: {} ({:.2}s) {detail}",
                    c.id,
                    c.name,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!(
        "[NOTE] criterion 10: suprema over all games are not computable; grid families and the \
         randomized suites above stand in for them and every CSV header says so"
    );
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into())
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn experiment(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../experiments").join(name)
}

/// Output of `tollsub solve`, run in-process through the same entry point
/// as the binary.
fn solve_stdout(instance: &str, mech: &str) -> Result<String, String> {
    let path = experiment(instance);
    let mut out = Vec::new();
    let code = tollsub_cli::run(
        ["tollsub", "solve", "--instance", path.to_str().unwrap(), "--mech", mech],
        &mut out,
    );
    if code != 0 {
        return Err(format!("solve {instance} {mech} exited {code}"));
    }
    String::from_utf8(out).map_err(|e| e.to_string())
}

fn line_value(text: &str, prefix: &str) -> Result<f64, String> {
    let rest = text
        .lines()
        .find_map(|l| l.strip_prefix(prefix))
        .ok_or_else(|| format!("no `{prefix}` line"))?;
    let token = rest.split_whitespace().next().unwrap_or("");
    token.parse().map_err(|_| format!("cannot parse `{token}` after `{prefix}`"))
}

fn c1_pigou() -> Outcome {
    let out = solve_stdout("pigou1.json", "none")?;
    let poa = line_value(&out, "PoA:")?;
    check((poa - 4.0 / 3.0).abs() <= 1e-6, format!("PoA {poa:.9}"))
}

fn c2_marginal_cost() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for p in 1..=4 {
        let out = solve_stdout(&format!("pigou{p}.json"), "mc")?;
        let f1 = line_value(&out, "nash flow: e1=")?;
        let poa = line_value(&out, "PoA:")?;
        let want = (1.0 / (p as f64 + 1.0)).powf(1.0 / p as f64);
        ok &= (f1 - want).abs() <= 1e-6 && (poa - 1.0).abs() <= 1e-6;
        detail.push(format!("p={p} f1={f1:.9} (want {want:.9}) PoA={poa:.9}"));
    }
    check(ok, detail.join("; "))
}

const BETAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn homogeneous_sup(mech: Mechanism) -> Result<(f64, usize), String> {
    let r = affine_worstcase_search(
        &mech,
        &SensitivitySpec::Homogeneous,
        &AffineGrid::default(),
        &SolverParams::default(),
    )
    .map_err(|e| e.to_string())?;
    Ok((r.sup(), r.uncertified))
}

fn formula_band(kind: &str, make: fn(f64) -> tollsub_core::Result<Mechanism>, formula: fn(f64) -> tollsub_core::Result<f64>) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for beta in BETAS {
        let mech = make(beta).map_err(|e| e.to_string())?;
        let (sup, uncertified) = homogeneous_sup(mech)?;
        let want = formula(beta).map_err(|e| e.to_string())?;
        ok &= sup >= want - 5e-3 && sup <= want + 1e-6 && uncertified == 0;
        detail.push(format!("{kind} β={beta}: sup {sup:.6} formula {want:.6}"));
    }
    check(ok, detail.join("; "))
}

fn c3_toll() -> Outcome {
    formula_band("toll", Mechanism::opt_bounded_toll, affine_toll_poa_formula)
}

fn c4_subsidy() -> Outcome {
    formula_band("subsidy", Mechanism::opt_bounded_subsidy, affine_subsidy_poa_formula)
}

fn c5_strictness() -> Outcome {
    let rows = theorem1_check(
        &[0.2, 0.4, 0.6, 0.8],
        &AffineGrid::default(),
        0.01,
        &SolverParams::default(),
    )
    .map_err(|e| e.to_string())?;
    let ok = rows.iter().all(|r| r.pass && r.margin >= 0.01);
    let detail = rows
        .iter()
        .map(|r| {
            format!(
                "β={}: toll {:.6} subsidy {:.6} margin {:.6}",
                r.param,
                r.toll.sup(),
                r.subsidy.sup(),
                r.margin
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    check(ok, detail)
}

fn random_affine(rng: &mut ChaCha8Rng) -> LatencyFunction {
    let a = if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.05..3.0) };
    let b = if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.0..2.0) };
    LatencyFunction::affine(a, b).unwrap()
}

fn random_polynomial(rng: &mut ChaCha8Rng) -> LatencyFunction {
    let degree = rng.gen_range(1..=4);
    let coeffs = (0..=degree)
        .map(|i| if i > 0 && rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..2.0) })
        .collect::<Vec<f64>>();
    let mut coeffs = coeffs;
    coeffs[degree] = rng.gen_range(0.1..2.0);
    LatencyFunction::new(coeffs).unwrap()
}

/// Wheatstone network o→a→d, o→b→d with the bridge a→b.
fn bridge(latencies: Vec<LatencyFunction>) -> RoutingProblem {
    let ends = [(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)];
    let edges = ends
        .iter()
        .zip(latencies)
        .enumerate()
        .map(|(i, (&(tail, head), latency))| Edge { id: format!("e{}", i + 1), tail, head, latency })
        .collect();
    RoutingProblem::new(
        ["o", "a", "b", "d"].iter().map(|s| s.to_string()).collect(),
        edges,
        vec![Commodity { origin: 0, destination: 3, demand: 1.0 }],
    )
    .unwrap()
}

fn random_affine_mechanism(rng: &mut ChaCha8Rng, bounds: (f64, f64)) -> Mechanism {
    let (lo, hi) = bounds;
    match rng.gen_range(0..6) {
        0 => Mechanism::None,
        1 => Mechanism::MarginalCost,
        2 => Mechanism::opt_bounded_toll(rng.gen_range(0.0..1.5)).unwrap(),
        3 => Mechanism::opt_bounded_subsidy(rng.gen_range(0.0..0.9)).unwrap(),
        4 => Mechanism::scaled_marginal_cost(lo, hi).unwrap(),
        _ => Mechanism::nominally_equivalent_subsidy(lo, hi).unwrap(),
    }
}

fn c6_transform() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e55_a1);
    let params = SolverParams::default();
    let mut worst_gap: f64 = 0.0;
    let mut worst_diff: f64 = 0.0;
    for trial in 0..100 {
        let affine = rng.gen_bool(0.6);
        let latency = |rng: &mut ChaCha8Rng| {
            if affine {
                random_affine(rng)
            } else {
                random_polynomial(rng)
            }
        };
        let problem = if rng.gen_bool(0.3) {
            bridge((0..5).map(|_| latency(&mut rng)).collect())
        } else {
            let k = rng.gen_range(2..=4);
            RoutingProblem::parallel((0..k).map(|_| latency(&mut rng)).collect()).unwrap()
        };
        let mechanism = if affine {
            random_affine_mechanism(&mut rng, (1.0, 1.0))
        } else if rng.gen_bool(0.5) {
            Mechanism::MarginalCost
        } else {
            Mechanism::None
        };
        let lambda = rng.gen_range(0.1..3.0);
        let transformed = affine_transform(&mechanism, lambda).map_err(|e| e.to_string())?;
        let sensitivity = SensitivityModel::homogeneous();

        let base = GameInstance::with_mechanism(problem.clone(), sensitivity.clone(), &mechanism)
            .map_err(|e| e.to_string())?;
        let moved = GameInstance::with_mechanism(problem, sensitivity, &transformed)
            .map_err(|e| e.to_string())?;
        let here = nash_flow(&base, &params).map_err(|e| format!("trial {trial}: {e}"))?;
        let cert = certify(&moved, &here.class_flows).map_err(|e| e.to_string())?;
        let there = nash_flow(&moved, &params).map_err(|e| format!("trial {trial}: {e}"))?;
        let diff = (here.total_latency - there.total_latency).abs();
        worst_gap = worst_gap.max(cert.vi_gap);
        worst_diff = worst_diff.max(diff);
        if cert.vi_gap > 10.0 * EPS_EQ || diff > 10.0 * EPS_EQ {
            return Err(format!(
                "trial {trial}: {mechanism} λ={lambda}: gap {:.3e}, latency difference {diff:.3e}",
                cert.vi_gap
            ));
        }
    }
    Ok(format!("100 triples, max gap {worst_gap:.2e}, max latency difference {worst_diff:.2e}"))
}

fn c7_sensitivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e_5171);
    let params = SolverParams::default();
    let mut worst_gap: f64 = 0.0;
    for trial in 0..100 {
        let links = rng.gen_range(2..=4);
        let problem =
            RoutingProblem::parallel((0..links).map(|_| random_affine(&mut rng)).collect()).unwrap();
        let lo = rng.gen_range(0.25..1.5);
        let hi = lo * rng.gen_range(1.0..8.0);
        let n = rng.gen_range(2..=3);
        let mut weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let classes = weights
            .iter()
            .enumerate()
            .map(|(i, &mass)| SensitivityClass {
                mass,
                s: match i {
                    0 => lo,
                    1 => hi,
                    _ => rng.gen_range(lo..=hi),
                },
            })
            .collect();
        let sensitivity = SensitivityModel::new(classes, (lo, hi)).map_err(|e| e.to_string())?;
        let mechanism = random_affine_mechanism(&mut rng, (lo, hi));
        let lambda = rng.gen_range(0.05..1.0);

        let base = GameInstance::with_mechanism(problem.clone(), sensitivity.clone(), &mechanism)
            .map_err(|e| e.to_string())?;
        let here = nash_flow(&base, &params).map_err(|e| format!("trial {trial}: {e}"))?;
        let mapped = sensitivity.mapped(lambda).map_err(|e| e.to_string())?;
        let transformed = affine_transform(&mechanism, lambda).map_err(|e| e.to_string())?;
        let moved = GameInstance::with_mechanism(problem, mapped, &transformed)
            .map_err(|e| e.to_string())?;
        let cert = certify(&moved, &here.class_flows).map_err(|e| e.to_string())?;
        worst_gap = worst_gap.max(cert.vi_gap);
        if cert.vi_gap > 10.0 * EPS_EQ {
            return Err(format!(
                "trial {trial}: {mechanism} λ={lambda} {n} classes: gap {:.3e}",
                cert.vi_gap
            ));
        }
    }
    Ok(format!("100 instances, max gap {worst_gap:.2e}"))
}

fn c8_smc() -> Outcome {
    let grid = AffineGrid { fully_utilized_only: true, ..AffineGrid::default() };
    let params = SolverParams::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for q in [0.1, 0.25, 0.5, 0.75, 1.0] {
        let (s_low, s_high) = (1.0, 1.0 / q);
        let mech = Mechanism::scaled_marginal_cost(s_low, s_high).map_err(|e| e.to_string())?;
        let report = affine_worstcase_search(
            &mech,
            &SensitivitySpec::TwoClass { s_low, s_high },
            &grid,
            &params,
        )
        .map_err(|e| e.to_string())?;
        let sup = report.sup();
        let smc = smc_poa_formula(q).map_err(|e| e.to_string())?;
        let nes = nes_poa_formula(s_low, s_high).map_err(|e| e.to_string())?;
        let bounded = sup <= smc + 1e-6;
        let attained = sup >= smc - 5e-3;
        let ordered = if q < 1.0 { nes > smc } else { nes >= smc };
        ok &= bounded && attained && ordered && report.uncertified == 0;
        let mut line = format!("q={q}: sup {sup:.6} formula {smc:.6} nes {nes:.6}");
        if !bounded {
            if let Some(p) = report.argmax {
                line.push_str(&format!(
                    " exceeded at a1={} b1={} a2={} b2={} mass_low={}",
                    p.a1, p.b1, p.a2, p.b2, p.mass_low
                ));
            }
        }
        if !ordered {
            line.push_str(" nes below smc");
        }
        detail.push(line);
    }
    check(ok, detail.join("; "))
}

fn c9_identity() -> Outcome {
    for i in 0..1000 {
        let beta = 0.5 * i as f64 / 1000.0;
        let subsidy = affine_subsidy_poa_formula(beta).map_err(|e| e.to_string())?;
        let toll = affine_toll_poa_formula(1.0 / (1.0 - beta) - 1.0).map_err(|e| e.to_string())?;
        if subsidy != toll {
            return Err(format!("β={beta}: subsidy {subsidy} toll {toll}"));
        }
    }
    Ok("1000 points identical".into())
}
