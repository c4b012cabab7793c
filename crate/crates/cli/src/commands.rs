use std::io::Write;
use std::path::{Path, PathBuf};

use tollsub_core::sweeps::{self, TheoremRow};
use tollsub_core::{
    optimal_flow, parse_instance, worst_case_nash, AffineGrid, EquilibriumResult, Error,
    GameInstance, GridReport, Mechanism, PoAReport, SensitivityModel, SolverParams, EPS_EQ,
};

use crate::config::ExperimentConfig;
use crate::ranges::parse_grid;
use crate::report::{num, Table};
use crate::{CheckArgs, Common, Failure, Fig1Args, Fig2aArgs, Fig2bArgs, GridArgs, InstanceArgs};

const MAX_P: usize = 6;

struct Run {
    restarts: usize,
    seed: u64,
    out: Option<PathBuf>,
    params: SolverParams,
}

fn run_settings(c: &Common, cfg: &ExperimentConfig) -> Run {
    Run {
        restarts: c.restarts.or(cfg.restarts).unwrap_or(0),
        seed: c.seed.or(cfg.seed).unwrap_or(0),
        out: c.out.clone().or_else(|| cfg.out.clone()),
        params: SolverParams::default(),
    }
}

fn grid_settings(g: &GridArgs, cfg: &ExperimentConfig) -> Result<AffineGrid, Failure> {
    let grid = AffineGrid {
        points: g.grid_points.or(cfg.grid_points).unwrap_or(21),
        mass_splits: g.mass_splits.or(cfg.mass_splits).unwrap_or(11),
        ..AffineGrid::default()
    };
    if grid.points < 2 || grid.mass_splits < 2 {
        return Err(Failure::Usage("grid points and mass splits must be at least 2".into()));
    }
    Ok(grid)
}

fn grid_comment(t: &mut Table, grid: &AffineGrid, run: &Run) {
    t.comment(format!(
        "family: two-link affine l_i = a_i f + b_i, {} points per coefficient on [0, {}], links unordered, {} mass splits for two classes, instances with zero optimal latency excluded",
        grid.points, grid.max, grid.mass_splits
    ));
    t.comment(format!(
        "solver: tol {:e}, max_iters {}, restarts {}, seed {}",
        run.params.tol, run.params.max_iters, run.restarts, run.seed
    ));
}

fn values(flag: &Option<String>, cfg: &Option<String>, default: &str) -> Result<Vec<f64>, Failure> {
    let text = flag.clone().or_else(|| cfg.clone()).unwrap_or_else(|| default.to_string());
    parse_grid(&text).map_err(Failure::Usage)
}

fn load_instance(path: &Path) -> Result<GameInstance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| match e {
        Error::Parse { .. } | Error::Invalid { .. } => {
            Failure::Input(format!("{}: {e}", path.display()))
        }
        other => other.into(),
    })
}

/// Applies the sensitivity and mechanism overrides of `args`.
fn prepare(args: &InstanceArgs, cfg: &ExperimentConfig, path: &Path) -> Result<(GameInstance, String), Failure> {
    let mut game = load_instance(path)?;
    let s_low = args.s_low.or(cfg.s_low);
    let s_high = args.s_high.or(cfg.s_high);
    match (s_low, s_high) {
        (Some(lo), Some(hi)) => {
            let m = args.mass_low.or(cfg.mass_low).unwrap_or(0.5);
            game = game.with_sensitivity(SensitivityModel::two_class(m, lo, hi)?);
        }
        (None, None) => {}
        _ => return Err(Failure::Usage("--sL and --sU must be given together".into())),
    }
    let label = match args.mech.clone().or_else(|| cfg.mech.clone()) {
        Some(text) => {
            let mech = Mechanism::parse(&text).map_err(|e| Failure::Usage(e.to_string()))?;
            game = game.remechanised(&mech)?;
            mech.to_string()
        }
        None => "file".to_string(),
    };
    Ok((game, label))
}

fn instance_paths(args: &InstanceArgs, cfg: &ExperimentConfig) -> Vec<PathBuf> {
    if args.instance.is_empty() {
        cfg.instance.clone().unwrap_or_default()
    } else {
        args.instance.clone()
    }
}

fn edge_list(game: &GameInstance, flows: &[f64]) -> String {
    game.problem()
        .edges()
        .iter()
        .zip(flows)
        .map(|(e, f)| format!("{}={f:.12}", e.id))
        .collect::<Vec<_>>()
        .join(" ")
}

const REPORT_HEADER: [&str; 12] = [
    "instance", "mechanism", "s_L", "s_U", "nash_latency", "opt_latency", "poa", "vi_gap",
    "opt_gap", "restarts", "seed", "uncertified",
];

fn report_row(id: &str, r: &PoAReport, run: &Run) -> Vec<String> {
    vec![
        id.to_string(),
        r.mechanism.clone(),
        num(r.s_bounds.0),
        num(r.s_bounds.1),
        num(r.nash_latency),
        num(r.opt_latency),
        num(r.poa),
        num(r.nash_gap),
        num(r.opt_gap),
        run.restarts.to_string(),
        run.seed.to_string(),
        (r.nash_gap > EPS_EQ || r.opt_gap > EPS_EQ).to_string(),
    ]
}

pub fn solve(args: &InstanceArgs, cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let paths = instance_paths(args, cfg);
    let [path] = paths.as_slice() else {
        return Err(Failure::Usage("solve needs exactly one --instance".into()));
    };
    let run = run_settings(&args.common, cfg);
    let (game, label) = prepare(args, cfg, path)?;
    let opt = optimal_flow(game.problem(), &run.params)?;
    let nash: EquilibriumResult = worst_case_nash(&game, run.restarts, run.seed, &run.params)?;
    let (lo, hi) = game.sensitivity().bounds();
    writeln!(out, "instance: {}", path.display())?;
    writeln!(out, "mechanism: {label}")?;
    let classes: Vec<String> = game
        .sensitivity()
        .classes()
        .iter()
        .map(|c| format!("{}@s={}", c.mass, c.s))
        .collect();
    writeln!(out, "sensitivity: [{lo}, {hi}] classes {}", classes.join(" "))?;
    writeln!(out, "optimal flow: {}", edge_list(&game, opt.flow.edge_flows()))?;
    writeln!(out, "optimal latency: {:.12}", opt.total_latency)?;
    writeln!(out, "nash flow: {}", edge_list(&game, nash.flow.edge_flows()))?;
    if nash.class_flows.len() > 1 {
        for (c, f) in nash.class_flows.iter().enumerate() {
            writeln!(out, "class {c} flow: {}", edge_list(&game, f.edge_flows()))?;
        }
    }
    writeln!(out, "nash latency: {:.12}", nash.total_latency)?;
    writeln!(out, "fully utilized: {}", nash.fully_utilized)?;
    writeln!(out, "vi gap: nash {:e}, optimal {:e}", nash.vi_gap, opt.vi_gap)?;
    if opt.total_latency > 0.0 {
        let poa = nash.total_latency / opt.total_latency;
        writeln!(out, "PoA: {poa:.12}")?;
        if let Some(path) = &run.out {
            let report = PoAReport {
                instance_id: path.display().to_string(),
                nash_latency: nash.total_latency,
                opt_latency: opt.total_latency,
                poa,
                mechanism: label,
                s_bounds: (lo, hi),
                nash_gap: nash.vi_gap,
                opt_gap: opt.vi_gap,
                fully_utilized: nash.fully_utilized,
            };
            let mut t = Table::new("solve", &REPORT_HEADER);
            t.row(report_row(&report.instance_id, &report, &run));
            t.emit(Some(path), out)?;
        }
    } else {
        writeln!(out, "PoA: undefined (optimal latency is zero)")?;
    }
    Ok(())
}

pub fn poa(args: &InstanceArgs, cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let paths = instance_paths(args, cfg);
    if paths.is_empty() {
        return Err(Failure::Usage("poa needs at least one --instance".into()));
    }
    let run = run_settings(&args.common, cfg);
    let mut t = Table::new("poa", &REPORT_HEADER);
    t.comment(format!("family: {} instance file(s) as listed", paths.len()));
    let mut worst: Option<(String, PoAReport)> = None;
    let mut excluded = 0;
    for path in &paths {
        let (game, label) = prepare(args, cfg, path)?;
        match tollsub_core::poa_instance(&game, run.restarts, run.seed, &run.params) {
            Ok(mut r) => {
                r.mechanism = label;
                let id = path.display().to_string();
                t.row(report_row(&id, &r, &run));
                if worst.as_ref().map_or(true, |(_, w)| r.poa > w.poa) {
                    worst = Some((id, r));
                }
            }
            Err(Error::Degenerate(m)) => {
                log::warn!("{}: {m}; excluded", path.display());
                excluded += 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
    t.comment(format!("excluded (zero optimal latency): {excluded}"));
    match &worst {
        Some((id, w)) => {
            t.row(report_row(&format!("sup:{id}"), w, &run));
            eprintln!("sup PoA {:.12} at {id}", w.poa);
        }
        None => return Err(Failure::Input("every instance has zero optimal latency".into())),
    }
    t.emit(run.out.as_deref(), out)
}

pub fn fig1(args: &Fig1Args, cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let run = run_settings(&args.common, cfg);
    let p_max = args.p_max.or(cfg.p_max).unwrap_or(4);
    if !(1..=MAX_P).contains(&p_max) {
        return Err(Failure::Usage(format!("--p-max must lie in 1..={MAX_P}")));
    }
    let betas = values(&args.beta_grid, &cfg.beta_grid, "0:4:0.25")?;
    if betas.iter().any(|b| *b < 0.0) {
        return Err(Failure::Usage("β values must be non-negative".into()));
    }
    let rows = sweeps::fig1(&betas, p_max, run.restarts, run.seed, &run.params)?;
    let mut header = vec!["beta".to_string()];
    header.extend((1..=p_max).map(|p| format!("toll_p{p}")));
    header.extend((1..=p_max).map(|p| format!("subsidy_p{p}")));
    header.extend(
        ["toll_sup", "subsidy_sup", "vi_gap", "restarts", "seed", "uncertified"].map(String::from),
    );
    let refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut t = Table::new("fig1", &refs);
    t.comment(format!(
        "family: Pigou networks l1 = f^p, l2 = 1 for p = 1..{p_max}; toll min(beta, p) l1 on link 1, subsidy -min(beta, p/(p+1)) on link 2"
    ));
    t.comment(format!("solver: tol {:e}, restarts {}, seed {}", run.params.tol, run.restarts, run.seed));
    for r in rows {
        let mut cells = vec![num(r.beta)];
        cells.extend(r.toll.iter().map(|v| num(*v)));
        cells.extend(r.subsidy.iter().map(|v| num(*v)));
        cells.extend([
            num(r.toll_sup),
            num(r.subsidy_sup),
            num(r.max_gap),
            run.restarts.to_string(),
            run.seed.to_string(),
            (r.max_gap > EPS_EQ).to_string(),
        ]);
        t.row(cells);
    }
    t.emit(run.out.as_deref(), out)
}

fn uncertified(reports: &[&GridReport]) -> bool {
    reports.iter().any(|r| r.uncertified > 0 || r.max_gap > EPS_EQ || r.worst.is_none())
}

fn argmax(r: &GridReport) -> String {
    r.worst.as_ref().map(|w| w.instance_id.clone()).unwrap_or_default()
}

pub fn fig2a(args: &Fig2aArgs, cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let run = run_settings(&args.common, cfg);
    let grid = grid_settings(&args.grid, cfg)?;
    let betas = values(&args.beta_grid, &cfg.beta_grid, "0:1:0.05")?;
    let rows = sweeps::fig2a(&betas, &grid, &run.params)?;
    let mut t = Table::new(
        "fig2a",
        &[
            "beta", "toll_formula", "subsidy_formula", "toll_empirical", "subsidy_empirical",
            "toll_argmax", "subsidy_argmax", "vi_gap", "evaluated", "excluded_zero_opt",
            "unconverged", "restarts", "seed", "uncertified",
        ],
    );
    grid_comment(&mut t, &grid, &run);
    t.comment("users: homogeneous");
    for r in rows {
        t.row(vec![
            num(r.beta),
            num(r.toll_formula),
            num(r.subsidy_formula),
            num(r.toll.sup()),
            num(r.subsidy.sup()),
            argmax(&r.toll),
            argmax(&r.subsidy),
            num(r.toll.max_gap.max(r.subsidy.max_gap)),
            (r.toll.evaluated + r.subsidy.evaluated).to_string(),
            (r.toll.excluded_zero_opt + r.subsidy.excluded_zero_opt).to_string(),
            (r.toll.uncertified + r.subsidy.uncertified).to_string(),
            run.restarts.to_string(),
            run.seed.to_string(),
            uncertified(&[&r.toll, &r.subsidy]).to_string(),
        ]);
    }
    t.emit(run.out.as_deref(), out)
}

pub fn fig2b(args: &Fig2bArgs, cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let run = run_settings(&args.common, cfg);
    let mut grid = grid_settings(&args.grid, cfg)?;
    grid.fully_utilized_only = !args.all_equilibria;
    let qs = values(&args.q_grid, &cfg.q_grid, "0.1:1:0.05")?;
    let s_low = args.s_low.or(cfg.s_low).unwrap_or(1.0);
    let rows = sweeps::fig2b(&qs, s_low, &grid, &run.params)?;
    let mut t = Table::new(
        "fig2b",
        &[
            "q", "s_L", "s_U", "smc_formula", "nes_formula", "smc_empirical", "nes_empirical",
            "smc_argmax", "nes_argmax", "vi_gap", "evaluated", "excluded_not_utilized",
            "excluded_zero_opt", "unconverged", "restarts", "seed", "uncertified",
        ],
    );
    grid_comment(&mut t, &grid, &run);
    t.comment(format!(
        "users: two classes s_L = {s_low}, s_U = s_L/q; equilibria leaving a link unused {}",
        if grid.fully_utilized_only { "excluded" } else { "kept" }
    ));
    for r in rows {
        t.row(vec![
            num(r.q),
            num(r.s_low),
            num(r.s_high),
            num(r.smc_formula),
            num(r.nes_formula),
            num(r.smc.sup()),
            num(r.nes.sup()),
            argmax(&r.smc),
            argmax(&r.nes),
            num(r.smc.max_gap.max(r.nes.max_gap)),
            (r.smc.evaluated + r.nes.evaluated).to_string(),
            (r.smc.excluded_not_utilized + r.nes.excluded_not_utilized).to_string(),
            (r.smc.excluded_zero_opt + r.nes.excluded_zero_opt).to_string(),
            (r.smc.uncertified + r.nes.uncertified).to_string(),
            run.restarts.to_string(),
            run.seed.to_string(),
            uncertified(&[&r.smc, &r.nes]).to_string(),
        ]);
    }
    t.emit(run.out.as_deref(), out)
}

pub fn check(args: &CheckArgs, cfg: &ExperimentConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let run = run_settings(&args.common, cfg);
    let grid = grid_settings(&args.grid, cfg)?;
    let theorem = args
        .theorem
        .or(cfg.theorem)
        .ok_or_else(|| Failure::Usage("check needs --theorem 1 or --theorem 2".into()))?;
    let (rows, users) = match theorem {
        1 => {
            let betas = values(&args.beta_grid, &cfg.beta_grid, "0.2:0.8:0.2")?;
            let min_margin = args.min_margin.or(cfg.min_margin).unwrap_or(0.0);
            let rows = sweeps::theorem1_check(&betas, &grid, min_margin, &run.params)?;
            (rows, format!("users: homogeneous; margin = toll - subsidy, required >= {min_margin}"))
        }
        2 => {
            let qs = values(&args.q_grid, &cfg.q_grid, "0.25:1:0.25")?;
            let beta = args.beta.or(cfg.beta).unwrap_or(0.5);
            let rows = sweeps::theorem2_check(&qs, beta, &grid, &run.params)?;
            (
                rows,
                format!(
                    "users: two classes s_L = 1, s_U = 1/q; toll beta+ = {beta}, subsidy beta- = beta+/(1+beta+); margin = subsidy - toll, required >= 0"
                ),
            )
        }
        other => return Err(Failure::Usage(format!("unknown theorem {other}; use 1 or 2"))),
    };
    let mut t = Table::new(
        "check",
        &[
            "theorem", "param", "toll_beta", "subsidy_beta", "toll_sup", "subsidy_sup", "margin",
            "pass", "vi_gap", "restarts", "seed", "uncertified",
        ],
    );
    grid_comment(&mut t, &grid, &run);
    t.comment(users);
    let mut failed = 0;
    for r in &rows {
        print_check(out, theorem, r)?;
        if !r.pass {
            failed += 1;
        }
        t.row(vec![
            theorem.to_string(),
            num(r.param),
            num(r.toll_beta),
            num(r.subsidy_beta),
            num(r.toll.sup()),
            num(r.subsidy.sup()),
            num(r.margin),
            r.pass.to_string(),
            num(r.toll.max_gap.max(r.subsidy.max_gap)),
            run.restarts.to_string(),
            run.seed.to_string(),
            uncertified(&[&r.toll, &r.subsidy]).to_string(),
        ]);
    }
    if let Some(path) = &run.out {
        t.emit(Some(path), out)?;
    }
    if failed > 0 {
        return Err(Failure::Violation(format!(
            "theorem {theorem}: {failed} of {} grid points violate the inequality",
            rows.len()
        )));
    }
    eprintln!("theorem {theorem}: all {} grid points pass", rows.len());
    Ok(())
}

fn print_check(out: &mut dyn Write, theorem: u8, r: &TheoremRow) -> Result<(), Failure> {
    let name = if theorem == 1 { "beta" } else { "q" };
    writeln!(
        out,
        "{} {name}={} toll={:.9} subsidy={:.9} margin={:+.9}",
        if r.pass { "PASS" } else { "FAIL" },
        r.param,
        r.toll.sup(),
        r.subsidy.sup(),
        r.margin
    )?;
    Ok(())
}
