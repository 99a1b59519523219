//! The six subcommands. Each returns the JSON `results` block of its manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use deadcore::game::{run_game, GameConfig};
use deadcore::geometry::{
    check_nondegeneracy, default_radii, distance_bounds, estimate_porosity, fit_gradient_decay, fit_growth_exponent,
    l2_hessian_average, measure_density, FitReport, PositivitySet,
};
use deadcore::operators::pde_residual;
use deadcore::radial::RadialDeadCore;
use deadcore::solver::{dpp_iterate, liouville_sweep, solve_dirichlet, LiouvilleMode, Scheme, SolverConfig};
use deadcore::{
    compute_beta, compute_cnd, BoundaryData, GridDomain, ProblemSpec, SolutionField, SolveReport, StructuralParams,
    ThieleSpec,
};
use serde_json::{json, Value};

use crate::config::{
    BoundaryKind, ExperimentConfig, GridBlock, Mode, ProblemBlock, SchemeKind, Shape, SolverBlock, Source,
};
use crate::output::{ensure_dir, write_json, Cell, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Radial,
    Solve,
    Analyze,
    Game,
    Liouville,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Radial => "radial",
            Command::Solve => "solve",
            Command::Analyze => "analyze",
            Command::Game => "game",
            Command::Liouville => "liouville",
            Command::Sweep => "sweep",
        }
    }
}

/// Command-line overrides on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<String>,
    pub seed: Option<u64>,
}

/// Reads a config file, or the `config` field of a manifest written by an earlier run.
pub fn load_config_text(path: &Path) -> Result<String, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        return v["config"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| CliError::Config(format!("{}: manifest has no config text", path.display())));
    }
    Ok(text)
}

/// Runs one command and writes its manifest. Returns the manifest.
pub fn run(command: Command, config_text: &str, opts: &RunOptions) -> Result<Value, CliError> {
    let mut cfg = ExperimentConfig::parse(config_text)?;
    if let Some(seed) = opts.seed {
        cfg.run.seed = seed;
    }
    if let Some(out) = &opts.out {
        cfg.run.out = out.clone();
    }
    let dir = ensure_dir(&cfg.run.out)?;
    let start = Instant::now();
    let mut out = Outputs { dir, files: Vec::new(), stalled: Vec::new() };
    let results = match command {
        Command::Radial => cmd_radial(&cfg, &mut out)?,
        Command::Solve => cmd_solve(&cfg, &mut out)?,
        Command::Analyze => cmd_analyze(&cfg, &mut out)?,
        Command::Game => cmd_game(&cfg, &mut out)?,
        Command::Liouville => cmd_liouville(&cfg, &mut out)?,
        Command::Sweep => cmd_sweep(&cfg, &mut out)?,
    };
    let manifest = json!({
        "command": command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cfg.run.seed,
        "threads": rayon::current_num_threads(),
        "wall_time_s": start.elapsed().as_secs_f64(),
        "outputs": out.files,
        "converged": out.stalled.is_empty(),
        "results": results,
        "config": cfg.to_ini_string(),
    });
    write_json(&out.dir.join("manifest.json"), &manifest)?;
    if !out.stalled.is_empty() {
        return Err(CliError::NotConverged(out.stalled.join("; ")));
    }
    Ok(manifest)
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
    /// Solves that hit `max_iter`; reported after the outputs are written.
    stalled: Vec<String>,
}

impl Outputs {
    fn write(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        table.write(&self.dir.join(name))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn check(&mut self, what: String, report: &SolveReport) {
        if !report.converged {
            self.stalled.push(format!("{what} stopped after {} iterations", report.iterations));
        }
    }
}

fn block<'a, T>(b: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    b.as_ref().ok_or_else(|| CliError::Config(format!("this command needs a [{name}] section")))
}

fn params_of(b: &ProblemBlock) -> Result<StructuralParams, CliError> {
    let prm = StructuralParams::new(b.n, b.p, b.gamma, b.m)?;
    if prm.is_critical() {
        return Err(deadcore::Error::CriticalRegime.into());
    }
    Ok(prm)
}

fn solver_config(b: &SolverBlock) -> SolverConfig {
    SolverConfig {
        scheme: match b.scheme {
            SchemeKind::FdRelax => Scheme::FdRelax,
            SchemeKind::DppIter => Scheme::DppIter,
        },
        eps_g: b.eps_g,
        relax: b.relax,
        tol: b.tol,
        max_iter: b.max_iter,
        eps_dpp: b.eps_dpp,
    }
}

fn build_grid(g: &GridBlock, n: usize) -> Result<Arc<GridDomain>, CliError> {
    let grid = match (g.shape, n) {
        (Shape::Box, 1) => GridDomain::box_1d(g.lower, g.upper, g.cells)?,
        (Shape::Box, 2) => GridDomain::box_2d(g.lower, g.upper, g.cells)?,
        (Shape::Box, _) => return Err(CliError::Config(format!("box grids exist in 1 and 2 dimensions, not {n}"))),
        (Shape::Ball, _) => GridDomain::ball(n, g.radius, g.cells_per_radius, g.pad)?,
    };
    Ok(Arc::new(grid))
}

fn profile_of(prm: StructuralParams, b: &ProblemBlock) -> Result<RadialDeadCore, CliError> {
    Ok(RadialDeadCore::exact(prm, b.lambda0, vec![0.0; prm.n], b.core_radius)?)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn data_of(kind: BoundaryKind, value: f64, profile: Option<&RadialDeadCore>) -> Result<BoundaryData, CliError> {
    Ok(match kind {
        BoundaryKind::Profile => {
            let prof = profile
                .cloned()
                .ok_or_else(|| CliError::Config("boundary = profile needs a [problem] section".into()))?;
            BoundaryData::new(move |x| prof.value(x))
        }
        BoundaryKind::Constant => BoundaryData::constant(value),
        BoundaryKind::Linear => BoundaryData::new(move |x| value * x[0]),
        BoundaryKind::CosTheta => BoundaryData::new(|x| {
            let r = norm(x);
            if r > 0.0 {
                x[0] / r
            } else {
                1.0
            }
        }),
    })
}

fn report_json(r: &SolveReport) -> Value {
    json!({
        "iterations": r.iterations,
        "max_update": r.max_update,
        "residual_norm": r.residual_norm,
        "bracket_violations": r.bracket_violations,
        "converged": r.converged,
    })
}

/// `max |u − profile| / max |profile|` over interior nodes.
fn rel_sup_error(u: &SolutionField, prof: &RadialDeadCore) -> f64 {
    let dim = u.grid.dim();
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for &k in u.grid.interior_nodes() {
        let exact = prof.value(&u.grid.coords(k)[..dim]);
        err = err.max((u.values[k] - exact).abs());
        scale = scale.max(exact.abs());
    }
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

/// Deterministic sample directions: alternating signs on the line, the golden
/// angle in the plane, a Fibonacci lattice on the sphere (padded with zeros above).
fn direction(n: usize, k: usize, count: usize) -> Vec<f64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let phi = golden * k as f64;
    let mut d = vec![0.0; n];
    match n {
        1 => d[0] = if k.is_multiple_of(2) { 1.0 } else { -1.0 },
        2 => {
            d[0] = phi.cos();
            d[1] = phi.sin();
        }
        _ => {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let s = (1.0 - z * z).sqrt();
            d[0] = s * phi.cos();
            d[1] = s * phi.sin();
            d[2] = z;
        }
    }
    d
}

fn coord(x: &[f64], i: usize) -> Cell {
    x.get(i).map_or(Cell::Empty, |&v| Cell::F(v))
}

fn cmd_radial(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let b = block(&cfg.radial, "radial")?;
    let mut table = Table::new(&["n", "p", "gamma", "m", "lambda0", "x1", "x2", "x3", "rho", "value", "abs_residual"]);
    let mut worst = 0.0f64;
    let mut instances = 0usize;
    for &n in &b.n {
        for &p in &b.p {
            for &gamma in &b.gamma {
                let ms = b.m.iter().copied().chain(b.m_fraction.iter().map(|f| f * (gamma + 1.0)));
                for m in ms {
                    let prm = StructuralParams::new(n, p, gamma, m)?;
                    if prm.is_critical() {
                        return Err(deadcore::Error::CriticalRegime.into());
                    }
                    for &lambda0 in &b.lambda0 {
                        let prof = RadialDeadCore::exact(prm, lambda0, vec![0.0; n], b.core_radius)?;
                        let thiele = ThieleSpec::constant(lambda0)?;
                        instances += 1;
                        for k in 0..b.samples {
                            let t = 0.05 + 0.95 * (k as f64 + 0.5) / b.samples as f64;
                            let rho = b.core_radius + t;
                            let x: Vec<f64> = direction(n, k, b.samples).iter().map(|d| rho * d).collect();
                            let res = pde_residual(&prof, &x, &prm, &thiele, 0.0)?.value.abs();
                            worst = worst.max(res);
                            table.push(vec![
                                n.into(),
                                p.into(),
                                gamma.into(),
                                m.into(),
                                lambda0.into(),
                                coord(&x, 0),
                                coord(&x, 1),
                                coord(&x, 2),
                                rho.into(),
                                prof.value(&x).into(),
                                res.into(),
                            ]);
                        }
                    }
                }
            }
        }
    }
    out.write("radial.csv", &table)?;
    Ok(json!({ "instances": instances, "rows": table.rows.len(), "max_abs_residual": worst }))
}

fn cmd_solve(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let pb = block(&cfg.problem, "problem")?;
    let prm = params_of(pb)?;
    let grid = build_grid(block(&cfg.grid, "grid")?, prm.n)?;
    let solver = solver_config(&cfg.solver);
    if solver.scheme != Scheme::FdRelax {
        return Err(CliError::Config(
            "solve runs the fd_relax scheme; the DPP iteration lives in the game command".into(),
        ));
    }
    let prof = profile_of(prm, pb)?;
    let data = data_of(pb.boundary, pb.value, Some(&prof))?;
    let problem = ProblemSpec::new(prm, ThieleSpec::constant(pb.lambda0)?, data)?;
    let sol = solve_dirichlet(&problem, grid.clone(), &solver)?;
    let u = &sol.solution;
    let mut table = Table::new(&["x", "y", "u"]);
    for k in 0..grid.len() {
        let x = grid.coords(k);
        let y = if grid.dim() == 2 { x[1] } else { 0.0 };
        table.push(vec![x[0].into(), y.into(), u.values[k].into()]);
    }
    out.write("solution.csv", &table)?;
    out.check("the dead-core solve".into(), &u.report);
    let rel = (pb.boundary == BoundaryKind::Profile).then(|| rel_sup_error(u, &prof));
    Ok(json!({
        "report": report_json(&u.report),
        "upper_report": report_json(&sol.upper.report),
        "lower_report": report_json(&sol.lower.report),
        "h": grid.h(),
        "beta": compute_beta(&prm)?,
        "c_nd": compute_cnd(&prm, pb.lambda0)?,
        "rel_sup_error": rel,
    }))
}

/// Reads `solution.csv` back onto `grid`, checking the node coordinates.
fn load_snapshot(path: &str, grid: Arc<GridDomain>) -> Result<SolutionField, CliError> {
    let bad = |msg: String| CliError::Config(format!("snapshot {path}: {msg}"));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let mut values = Vec::with_capacity(grid.len());
    let tol = 1e-9 * (1.0 + grid.h());
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .ok_or_else(|| bad(format!("row {k} is short")))?
                .parse()
                .map_err(|e| bad(format!("row {k}: {e}")))
        };
        if k >= grid.len() {
            return Err(bad(format!("more rows than the {} grid nodes", grid.len())));
        }
        let x = grid.coords(k);
        let y = if grid.dim() == 2 { x[1] } else { 0.0 };
        if (num(0)? - x[0]).abs() > tol || (num(1)? - y).abs() > tol {
            return Err(bad(format!("row {k} does not sit on the node of [grid]")));
        }
        values.push(num(2)?);
    }
    if values.len() != grid.len() {
        return Err(bad(format!("{} rows for {} grid nodes", values.len(), grid.len())));
    }
    Ok(SolutionField::new(grid, values)?)
}

const REPORT_HEADER: [&str; 5] = ["r", "statistic", "target", "exponent", "note"];

fn error_note(e: &deadcore::Error) -> String {
    match e {
        deadcore::Error::NoFreeBoundary => "NoFreeBoundary".into(),
        other => other.to_string(),
    }
}

fn note_row(note: String) -> Vec<Cell> {
    vec![Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, note.into()]
}

fn fit_rows(table: &mut Table, fit: &FitReport, what: &str) {
    for (r, v) in fit.radii.iter().zip(&fit.values) {
        table.push(vec![(*r).into(), (*v).into(), fit.target.into(), fit.exponent.into(), what.into()]);
    }
}

fn skipped_rows(table: &mut Table, skipped: &[f64], why: &str) {
    for &r in skipped {
        table.push(vec![r.into(), Cell::Empty, Cell::Empty, Cell::Empty, format!("skipped: {why}").into()]);
    }
}

fn cmd_analyze(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let pb = block(&cfg.problem, "problem")?;
    let ab = block(&cfg.analyze, "analyze")?;
    let prm = params_of(pb)?;
    let grid = build_grid(block(&cfg.grid, "grid")?, prm.n)?;
    let u_tol = solver_config(&cfg.solver).u_tol();
    let u = match ab.source {
        Source::Snapshot => load_snapshot(&ab.snapshot, grid.clone())?,
        Source::Profile => {
            let prof = profile_of(prm, pb)?;
            SolutionField::from_fn(grid.clone(), move |x| prof.value(x))
        }
    };
    if ab.anchor.len() != prm.n {
        return Err(CliError::Config(format!("anchor has {} coordinates, n = {}", ab.anchor.len(), prm.n)));
    }
    let names = [
        "growth.csv",
        "nondegeneracy.csv",
        "density.csv",
        "porosity.csv",
        "gradient.csv",
        "l2_average.csv",
        "distance_bounds.csv",
    ];
    let mut tables: Vec<Table> = names.iter().map(|_| Table::new(&REPORT_HEADER)).collect();
    let set = PositivitySet::extract(&u, u_tol);
    let Some(x0) = set.nearest_free_boundary_point(&ab.anchor) else {
        for (name, t) in names.iter().zip(&mut tables) {
            t.push(note_row("NoFreeBoundary".into()));
            out.write(name, t)?;
        }
        return Ok(json!({ "free_boundary": false }));
    };
    let h = grid.h();
    let radii = if ab.radii.is_empty() { default_radii(&grid, &x0) } else { ab.radii.clone() };
    let reach = grid.distance_to_boundary(&x0);
    let (inside, outside): (Vec<f64>, Vec<f64>) = radii.iter().partition(|&&r| r <= reach);
    let leaves = "ball leaves the domain";
    let beta = compute_beta(&prm)?;
    let mut summary = serde_json::Map::new();
    summary.insert("free_boundary".into(), json!(true));
    summary.insert("anchor".into(), json!(x0));

    let [growth, nondeg, density, porosity, gradient, l2, dist] = &mut tables[..] else { unreachable!() };
    match fit_growth_exponent(&u, &x0, &inside, beta, u_tol) {
        Ok(fit) => {
            fit_rows(growth, &fit, "sup u over B_r");
            summary.insert("growth_exponent".into(), json!(fit.exponent));
        }
        Err(e) => growth.push(note_row(error_note(&e))),
    }
    skipped_rows(growth, &outside, leaves);

    match check_nondegeneracy(&u, &x0, &inside, &prm, pb.lambda0, u_tol) {
        Ok(rep) => {
            for (r, q) in rep.radii.iter().zip(&rep.ratios) {
                nondeg.push(vec![(*r).into(), (*q).into(), 1.0.into(), Cell::Empty, "sup u / (C_ND r^beta)".into()]);
            }
            summary.insert("min_nondegeneracy_ratio".into(), json!(rep.min_ratio));
        }
        Err(e) => nondeg.push(note_row(error_note(&e))),
    }
    skipped_rows(nondeg, &outside, leaves);

    match measure_density(&u, &x0, &radii, u_tol) {
        Ok(rep) => {
            for (r, t) in rep.radii.iter().zip(&rep.theta) {
                density.push(vec![(*r).into(), (*t).into(), Cell::Empty, Cell::Empty, "positive fraction".into()]);
            }
            skipped_rows(density, &rep.skipped, leaves);
            summary.insert("min_density".into(), json!(rep.min_theta));
        }
        Err(e) => density.push(note_row(error_note(&e))),
    }

    let por_radii =
        if ab.porosity_radii.is_empty() { vec![4.0 * h, 8.0 * h, 16.0 * h] } else { ab.porosity_radii.clone() };
    match estimate_porosity(&u, &por_radii, u_tol) {
        Ok(rep) => {
            for ((r, lo), med) in rep.radii.iter().zip(&rep.min_delta).zip(&rep.median_delta) {
                porosity.push(vec![(*r).into(), (*lo).into(), Cell::Empty, Cell::Empty, "min delta".into()]);
                porosity.push(vec![(*r).into(), (*med).into(), Cell::Empty, Cell::Empty, "median delta".into()]);
            }
            summary.insert("min_porosity".into(), json!(rep.overall_min()));
        }
        Err(e) => porosity.push(note_row(error_note(&e))),
    }

    match fit_gradient_decay(&u, &x0, &inside, &prm, u_tol) {
        Ok(fit) => {
            fit_rows(gradient, &fit, "sup |grad u| over B_r");
            summary.insert("gradient_exponent".into(), json!(fit.exponent));
        }
        Err(e) => gradient.push(note_row(error_note(&e))),
    }
    skipped_rows(gradient, &outside, leaves);

    match l2_hessian_average(&u, &x0, &inside, &prm, u_tol) {
        Ok(rep) => {
            fit_rows(l2, &rep.fit, "S(r)");
            skipped_rows(l2, &rep.skipped, "no interior jets");
            let note = format!("bound constant; bound holds: {}, slope ok: {}", rep.bound_holds, rep.slope_ok);
            l2.push(vec![Cell::Empty, rep.bound_constant.into(), Cell::Empty, Cell::Empty, note.into()]);
            summary.insert("l2_exponent".into(), json!(rep.fit.exponent));
        }
        Err(e) => l2.push(note_row(error_note(&e))),
    }
    skipped_rows(l2, &outside, leaves);

    match distance_bounds(&u, &prm, u_tol) {
        Ok(rep) => {
            let note = |what: &str| format!("{what} over {} nodes", rep.nodes_used);
            dist.push(vec![Cell::Empty, rep.c_sharp.into(), Cell::Empty, beta.into(), note("c_sharp").into()]);
            dist.push(vec![Cell::Empty, rep.c_star.into(), Cell::Empty, beta.into(), note("c_star").into()]);
            summary.insert("c_sharp".into(), json!(rep.c_sharp));
            summary.insert("c_star".into(), json!(rep.c_star));
        }
        Err(e) => dist.push(note_row(error_note(&e))),
    }

    for (name, t) in names.iter().zip(&tables) {
        out.write(name, t)?;
    }
    Ok(Value::Object(summary))
}

fn cmd_game(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let gb = block(&cfg.game, "game")?;
    if gb.payoff == BoundaryKind::Profile {
        return Err(CliError::Config("the game payoff is constant, linear or cos_theta".into()));
    }
    if gb.x0.len() != gb.dim {
        return Err(CliError::Config(format!("x0 has {} coordinates, dim = {}", gb.x0.len(), gb.dim)));
    }
    if !(gb.eps_cells >= 2.0) {
        return Err(CliError::Config(format!("eps_cells must be at least 2, got {}", gb.eps_cells)));
    }
    let pad = gb.eps_cells.ceil() as usize + 1;
    let grid = Arc::new(GridDomain::ball(gb.dim, 1.0, gb.cells_per_radius, pad)?);
    let eps = gb.eps_cells * grid.h();
    let payoff = data_of(gb.payoff, gb.value, None)?;
    let u = dpp_iterate(grid.clone(), &payoff, gb.p, eps, &solver_config(&cfg.solver))?;
    let game = GameConfig { p: gb.p, eps, n_walks: gb.n_walks, max_steps: gb.max_steps, seed: cfg.run.seed, payoff };
    let stats = run_game(&gb.x0, &u, &game)?;
    let start = grid.nearest_node(&gb.x0);
    let xs = grid.coords(start);
    let dpp_value = u.values[start];
    let mut table = Table::new(&[
        "x1",
        "x2",
        "p",
        "eps",
        "n_walks",
        "mean",
        "sd",
        "ci_half_width",
        "mean_exit_time",
        "truncated",
        "truncation_warning",
        "dpp_value",
    ]);
    table.push(vec![
        xs[0].into(),
        if gb.dim == 2 { xs[1].into() } else { Cell::Empty },
        gb.p.into(),
        eps.into(),
        stats.n_walks.into(),
        stats.mean.into(),
        stats.sd.into(),
        stats.ci_half_width.into(),
        stats.mean_exit_time.into(),
        stats.truncated.into(),
        stats.truncation_warning.into(),
        dpp_value.into(),
    ]);
    out.write("game.csv", &table)?;
    out.check("the DPP iteration".into(), &u.report);
    Ok(json!({
        "dpp_report": report_json(&u.report),
        "mean": stats.mean,
        "ci_half_width": stats.ci_half_width,
        "dpp_value": dpp_value,
        "within_3ci": (stats.mean - dpp_value).abs() <= 3.0 * stats.ci_half_width,
        "truncation_warning": stats.truncation_warning,
    }))
}

fn cmd_liouville(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let pb = block(&cfg.problem, "problem")?;
    let lb = block(&cfg.liouville, "liouville")?;
    let prm = params_of(pb)?;
    let probes: Vec<Vec<f64>> = match prm.n {
        1 => lb.probe_x.iter().map(|&x| vec![x]).collect(),
        2 if lb.probe_x.len() == lb.probe_y.len() => {
            lb.probe_x.iter().zip(&lb.probe_y).map(|(&x, &y)| vec![x, y]).collect()
        }
        2 => return Err(CliError::Config("probe_x and probe_y must have the same length".into())),
        n => return Err(CliError::Config(format!("liouville runs in 1 or 2 dimensions, not {n}"))),
    };
    let mode = match lb.mode {
        Mode::Level => LiouvilleMode::Level { theta: lb.theta },
        Mode::Growth => LiouvilleMode::Growth { s: lb.s },
    };
    let solver = solver_config(&cfg.solver);
    let rows = liouville_sweep(mode, &prm, pb.lambda0, &lb.radii, &probes, lb.cells_per_radius, &solver)?;
    let mut table = Table::new(&["R", "sup_ratio", "probe", "x1", "x2", "u", "v_R", "iterations", "converged"]);
    for row in &rows {
        for (j, x) in probes.iter().enumerate() {
            table.push(vec![
                row.outer_radius.into(),
                row.sup_ratio.into(),
                j.into(),
                coord(x, 0),
                coord(x, 1),
                row.probe_values[j].into(),
                row.barrier_values[j].into(),
                row.report.iterations.into(),
                row.report.converged.into(),
            ]);
        }
        out.check(format!("the solve on B_{}", row.outer_radius), &row.report);
    }
    out.write("liouville.csv", &table)?;
    let tol = solver.u_tol();
    let monotone =
        rows.windows(2).all(|w| w[1].probe_values.iter().zip(&w[0].probe_values).all(|(b, a)| *b <= a + tol));
    let dominated =
        rows.iter().all(|r| r.probe_values.iter().zip(&r.barrier_values).all(|(u, v)| v.is_nan() || *u <= v + tol));
    let decay = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => Some(
            b.probe_values
                .iter()
                .zip(&a.probe_values)
                .map(|(l, f)| if *f > 0.0 { l / f } else { 0.0 })
                .fold(0.0, f64::max),
        ),
        _ => None,
    };
    Ok(json!({ "monotone_in_R": monotone, "below_barrier": dominated, "last_over_first": decay }))
}

fn cmd_sweep(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Value, CliError> {
    let pb = block(&cfg.problem, "problem")?;
    let gb = block(&cfg.grid, "grid")?;
    let sb = block(&cfg.sweep, "sweep")?;
    if pb.boundary != BoundaryKind::Profile {
        return Err(CliError::Config("the refinement sweep measures errors against boundary = profile".into()));
    }
    let prm = params_of(pb)?;
    let prof = profile_of(prm, pb)?;
    let solver = solver_config(&cfg.solver);
    let mut table = Table::new(&["cells", "h", "rel_sup_error", "iterations", "converged", "bracket_violations"]);
    let mut errors = Vec::new();
    for &cells in &sb.cells {
        let g = GridBlock { cells, cells_per_radius: cells, ..*gb };
        let grid = build_grid(&g, prm.n)?;
        let data = data_of(BoundaryKind::Profile, 0.0, Some(&prof))?;
        let problem = ProblemSpec::new(prm, ThieleSpec::constant(pb.lambda0)?, data)?;
        let u = solve_dirichlet(&problem, grid.clone(), &solver)?.solution;
        let err = rel_sup_error(&u, &prof);
        errors.push((grid.h(), err));
        table.push(vec![
            cells.into(),
            grid.h().into(),
            err.into(),
            u.report.iterations.into(),
            u.report.converged.into(),
            u.report.bracket_violations.into(),
        ]);
        out.check(format!("the solve with {cells} cells"), &u.report);
    }
    out.write("sweep.csv", &table)?;
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln()).collect();
    Ok(json!({ "observed_orders": orders }))
}
