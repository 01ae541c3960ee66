//! Subcommand orchestration and CSV output.

use std::fs;
use std::path::{Path, PathBuf};

use eplab::analysis::{convexity_audit_potential, convexity_audit_stream, multistart_uniqueness, AuditOptions, ConvexityReport};
use eplab::elliptic::{coercivity_probe, picard_solve, Formulation, InitialGuess, IterationReport, Problem, SolutionState};
use eplab::{integrate_background, BackgroundProfile, FieldCase};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Background,
    SolvePotential,
    SolveStream,
    AuditConvexity,
    UniquenessTest,
    CoercivityProbe,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Background => "background",
            Subcommand::SolvePotential => "solve-potential",
            Subcommand::SolveStream => "solve-stream",
            Subcommand::AuditConvexity => "audit-convexity",
            Subcommand::UniquenessTest => "uniqueness-test",
            Subcommand::CoercivityProbe => "coercivity-probe",
        }
    }
}

/// What a run produced, plus warnings for the user.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub summary: Vec<String>,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

struct Table {
    path: PathBuf,
    writer: csv::Writer<fs::File>,
}

impl Table {
    fn create(dir: &Path, name: &str, header: &[&str]) -> CliResult<Self> {
        let path = dir.join(name);
        let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
        writer.write_record(header)?;
        Ok(Self { path, writer })
    }

    fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) -> CliResult<()> {
        self.writer.write_record(cells.into_iter().collect::<Vec<_>>())?;
        Ok(())
    }

    fn finish(mut self, out: &mut RunOutput) -> CliResult<()> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))?;
        out.files.push(self.path);
        Ok(())
    }
}

fn background(cfg: &RunConfig) -> CliResult<BackgroundProfile> {
    Ok(integrate_background(
        &cfg.law()?,
        &cfg.doping()?,
        cfg.flux,
        cfg.rho0,
        cfg.e0,
        cfg.length,
        cfg.nx,
        cfg.background_options(),
    )?)
}

fn problem(cfg: &RunConfig, formulation: Formulation) -> CliResult<Problem> {
    Ok(Problem::new(formulation, cfg.grid()?, background(cfg)?, cfg.doping()?, cfg.boundary()?)?)
}

/// Runs one subcommand, writing its CSVs and `manifest.txt` into `out_dir`.
pub fn run(cmd: Subcommand, cfg: &RunConfig, out_dir: &Path) -> CliResult<RunOutput> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut out = RunOutput::default();
    write_manifest(cmd, cfg, out_dir, &mut out)?;
    match cmd {
        Subcommand::Background => run_background(cfg, out_dir, &mut out)?,
        Subcommand::SolvePotential => run_solve(cfg, Formulation::Potential, out_dir, &mut out)?,
        Subcommand::SolveStream => run_solve(cfg, Formulation::Stream, out_dir, &mut out)?,
        Subcommand::AuditConvexity => run_audit(cfg, out_dir, &mut out)?,
        Subcommand::UniquenessTest => run_uniqueness(cfg, out_dir, &mut out)?,
        Subcommand::CoercivityProbe => run_coercivity(cfg, out_dir, &mut out)?,
    }
    Ok(out)
}

fn write_manifest(cmd: Subcommand, cfg: &RunConfig, dir: &Path, out: &mut RunOutput) -> CliResult<()> {
    let path = dir.join("manifest.txt");
    let text = format!(
        "# eplab-cli {} (eplab {})\n# subcommand = {}\n{}",
        env!("CARGO_PKG_VERSION"),
        eplab::VERSION,
        cmd.name(),
        cfg.to_text()
    );
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    out.files.push(path);
    Ok(())
}

fn run_background(cfg: &RunConfig, dir: &Path, out: &mut RunOutput) -> CliResult<()> {
    let bg = background(cfg)?;
    let mach = bg.mach_profile();
    let mut t = Table::create(dir, "background.csv", &["x1", "rho_bar", "u_bar", "E_bar", "Phi_bar", "mach"])?;
    for i in 0..bg.len() {
        t.row([bg.x[i], bg.rho[i], bg.u[i], bg.e[i], bg.phi[i], mach[i]].map(num))?;
    }
    t.finish(out)?;
    out.summary.push(format!("min subsonic margin p'(rho) - u^2 = {:e}", bg.subsonic_margin));
    Ok(())
}

fn write_state(state: &SolutionState, dir: &Path, out: &mut RunOutput) -> CliResult<()> {
    let g = state.grid;
    let mut t = Table::create(dir, "fields.csv", &["x1", "x2", "phi_or_psi", "Phi", "rho", "u1", "u2", "mach"])?;
    for i in 0..=g.nx {
        for j in 0..=g.ny {
            t.row(
                [
                    g.x1(i),
                    g.x2(j),
                    state.primary.get(i, j),
                    state.big_phi.get(i, j),
                    state.rho.get(i, j),
                    state.u1.get(i, j),
                    state.u2.get(i, j),
                    state.mach.get(i, j),
                ]
                .map(num),
            )?;
        }
    }
    t.finish(out)
}

fn write_report(report: &IterationReport, dir: &Path, out: &mut RunOutput) -> CliResult<()> {
    let mut t = Table::create(dir, "iterations.csv", &["iter", "residual", "ratio"])?;
    for (k, r) in report.residual_history.iter().enumerate() {
        let ratio = if k == 0 { String::new() } else { num(report.contraction_ratios[k - 1]) };
        t.row([(k + 1).to_string(), num(*r), ratio])?;
    }
    t.finish(out)
}

fn run_solve(cfg: &RunConfig, formulation: Formulation, dir: &Path, out: &mut RunOutput) -> CliResult<()> {
    let p = problem(cfg, formulation)?;
    let (state, report) = picard_solve(&p, &cfg.picard())?;
    write_state(&state, dir, out)?;
    write_report(&report, dir, out)?;
    let mut t = Table::create(dir, "summary.csv", &["quantity", "value"])?;
    let margin_name = match formulation {
        Formulation::Potential => "delta_star",
        Formulation::Stream => "lambda_star",
    };
    let rows = [
        ("converged", (report.converged as u8) as f64),
        ("iterations", report.iterations as f64),
        ("final_residual", report.final_residual),
        (margin_name, state.margin_min),
        ("rho_min", state.rho_min),
        ("rho_max", state.rho_max),
        ("lambda0", state.lambda0),
        ("Lambda0", state.big_lambda0),
        ("admissible", (state.admissible as u8) as f64),
    ];
    for (k, v) in rows {
        t.row([k.to_string(), num(v)])?;
    }
    t.finish(out)?;
    out.summary.push(format!(
        "{} iterations, final residual {:e}, {margin_name} = {:e}",
        report.iterations, report.final_residual, state.margin_min
    ));
    if !state.admissible {
        out.warnings.push("solution is not subsonic everywhere; labeled inadmissible".into());
    }
    if !report.converged {
        return Err(CliError::NotConverged {
            iterations: report.iterations,
            last_update: report.residual_history.last().copied().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

fn audit_row(set: &str, mode: &str, gamma: f64, level: f64, r: &ConvexityReport) -> Vec<String> {
    let v = r.first_violation;
    vec![
        set.into(),
        mode.into(),
        num(gamma),
        num(level),
        r.pairs.to_string(),
        r.rejected.to_string(),
        r.violations.to_string(),
        num(r.min_margin_along_paths),
        if r.max_second_difference.is_finite() { num(r.max_second_difference) } else { String::new() },
        v.map(|s| num(s.t)).unwrap_or_default(),
        v.map(|s| num(s.margin)).unwrap_or_default(),
    ]
}

const AUDIT_HEADER: [&str; 11] = [
    "set",
    "mode",
    "gamma",
    "level",
    "pairs",
    "rejected",
    "violations",
    "min_margin",
    "max_second_difference",
    "first_violation_t",
    "first_violation_margin",
];

fn stream_audit_row(cfg: &RunConfig, out: &mut RunOutput) -> CliResult<Option<Vec<String>>> {
    if cfg.gamma <= 1.0 {
        out.warnings.push("stream lambda-set audit skipped: it needs gamma > 1".into());
        return Ok(None);
    }
    let r = convexity_audit_stream(cfg.gamma, cfg.lambda, &AuditOptions::stream(cfg.n_pairs, cfg.n_t, cfg.seed))?;
    let mode = if cfg.gamma >= 3.0 { "audit" } else { "counterexample" };
    out.summary.push(format!("stream lambda-set ({mode}): {} violations in {} pairs", r.violations, r.pairs));
    Ok(Some(audit_row("stream", mode, cfg.gamma, cfg.lambda, &r)))
}

fn run_audit(cfg: &RunConfig, dir: &Path, out: &mut RunOutput) -> CliResult<()> {
    let law = cfg.law()?;
    let p = convexity_audit_potential(&law, cfg.delta, &AuditOptions::potential(cfg.n_pairs, cfg.n_t, cfg.seed))?;
    out.summary.push(format!("potential delta-set: {} violations in {} pairs", p.violations, p.pairs));
    let s = stream_audit_row(cfg, out)?;
    let mut t = Table::create(dir, "convexity.csv", &AUDIT_HEADER)?;
    t.row(audit_row("potential", "audit", cfg.gamma, cfg.delta, &p))?;
    if let Some(row) = s {
        t.row(row)?;
    }
    t.finish(out)
}

/// Initial guesses of the uniqueness test, scaled to the data and mesh.
pub fn uniqueness_guesses(cfg: &RunConfig) -> Vec<InitialGuess> {
    let h = (cfg.length / cfg.nx as f64).min(cfg.width / cfg.ny as f64);
    let scale = cfg.perturb.abs().max(1e-3);
    vec![
        InitialGuess::Background,
        InitialGuess::SmoothMode { amplitude: 2.0 * scale * 1e-2 },
        InitialGuess::Noise { amplitude: 1e-2 * scale * h, seed: cfg.seed },
    ]
}

fn run_uniqueness(cfg: &RunConfig, dir: &Path, out: &mut RunOutput) -> CliResult<()> {
    let formulation = cfg.default_formulation()?;
    let case = cfg.doping()?.case;
    let counterexample = case == FieldCase::Gravitational && cfg.gamma < 3.0;
    if counterexample {
        out.warnings.push(format!(
            "uniqueness in the gravitational case is only guaranteed for gamma >= 3 (gamma = {}); \
             running in counterexample mode",
            cfg.gamma
        ));
        let mut t = Table::create(dir, "convexity.csv", &AUDIT_HEADER)?;
        if let Some(row) = stream_audit_row(cfg, out)? {
            t.row(row)?;
        }
        t.finish(out)?;
    }
    let p = problem(cfg, formulation)?;
    let report = multistart_uniqueness(&p, &cfg.picard(), &uniqueness_guesses(cfg))?;
    let mut starts = Table::create(dir, "starts.csv", &["start", "guess", "status", "iterations", "final_residual"])?;
    for (k, o) in report.outcomes.iter().enumerate() {
        let guess = match o.guess {
            InitialGuess::Background => "background".to_string(),
            InitialGuess::SmoothMode { amplitude } => format!("smooth({})", num(amplitude)),
            InitialGuess::Noise { amplitude, seed } => format!("noise({},{seed})", num(amplitude)),
        };
        let (status, iters, res) = match &o.result {
            Ok((s, r)) if r.converged && s.admissible => ("converged".to_string(), r.iterations.to_string(), num(r.final_residual)),
            Ok((_, r)) if r.converged => ("inadmissible".to_string(), r.iterations.to_string(), num(r.final_residual)),
            Ok((_, r)) => ("not-converged".to_string(), r.iterations.to_string(), num(r.final_residual)),
            Err(e) => (format!("error: {e}"), String::new(), String::new()),
        };
        starts.row([k.to_string(), guess, status, iters, res])?;
    }
    starts.finish(out)?;
    let mut pairs = Table::create(dir, "uniqueness.csv", &["a", "b", "distance", "energy"])?;
    for pd in &report.pairs {
        pairs.row([pd.a.to_string(), pd.b.to_string(), num(pd.distance), pd.energy.map(num).unwrap_or_default()])?;
    }
    pairs.finish(out)?;
    out.summary.push(match report.max_distance() {
        Some(d) => format!("{} converged pairs, max distance {d:e}", report.pairs.len()),
        None => "fewer than two starts converged; nothing to compare".into(),
    });
    Ok(())
}

fn run_coercivity(cfg: &RunConfig, dir: &Path, out: &mut RunOutput) -> CliResult<()> {
    let p = problem(cfg, cfg.default_formulation()?)?;
    let r = coercivity_probe(&p, cfg.n_samples, cfg.seed)?;
    let mut t = Table::create(dir, "coercivity.csv", &["sample", "margin"])?;
    for (k, m) in r.margins.iter().enumerate() {
        t.row([k.to_string(), num(*m)])?;
    }
    t.finish(out)?;
    out.summary.push(format!(
        "min margin {:e} over {} samples (lambda0 = {:e}, mu = {:e})",
        r.min_margin,
        r.margins.len(),
        r.lambda0,
        r.mu
    ));
    Ok(())
}
