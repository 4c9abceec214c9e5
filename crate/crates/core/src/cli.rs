//! Command-line front end.
//!
//! Every command loads the effective [`RunConfig`], echoes it to
//! `<out>/config.json` and writes its artifacts next to it. Exit codes: 0 on
//! success, 1 on numerical or regime failure, 2 on usage or validation
//! errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dynamics::{
    phase_portrait, shock_experiment, verify_branch, BranchCheck, PhasePortrait, PortraitWindow,
};
use crate::empirics::{event_study, generate_panel, monte_carlo, twfe_did, DidResult, EventStudyResult};
use crate::error::{Error, Result};
use crate::firm_q::{firm_steady_state, investment_rate};
use crate::io::{
    num, parse_config, parse_formats, write_sweep_csv, write_table, ArtifactWriter, Format, Meta,
    Overrides, RunConfig, ShockOverrides,
};
use crate::model::{ModelParams, Regime, SteadyState};
use crate::par::Execution;
use crate::svg::{render_svg, Artifact, FigureKind, RenderSpec};
use crate::sweep::{
    grid_sweep, iso_equilibrium_contour, sensitivity_signs, spearman, threshold_curve, IsoContour,
    Sensitivity, SweepGrid, Threshold, Variable,
};

#[derive(Debug, Parser)]
#[command(
    name = "dataecon",
    version,
    about = "Steady states, phase portraits, parameter sweeps and DID simulation for a data-economy growth model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON configuration file (unknown keys are rejected).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Comma-separated artifact formats: csv, json, svg.
    #[arg(long, global = true, value_name = "LIST")]
    pub format: Option<String>,
    /// Seed for the synthetic panel generator.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub w: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady state, regime and local comparative-statics signs.
    Steady,
    /// Steady states over the (θ, η) grid.
    Sweep,
    /// Consumption-maximising η for each configured θ.
    Threshold,
    /// Iso-equilibrium contour over the (θ, η) grid.
    Contour {
        /// Contour level; defaults to the value at the configured reference point.
        #[arg(long, allow_negative_numbers = true)]
        level: Option<f64>,
    },
    /// Phase portrait with nullclines, stable branches and vector field.
    Phase,
    /// Before/after portraits for a parameter change.
    Shock {
        #[arg(long)]
        eta_before: Option<f64>,
        #[arg(long)]
        eta_after: Option<f64>,
        #[arg(long)]
        theta_before: Option<f64>,
        #[arg(long)]
        theta_after: Option<f64>,
    },
    /// Steady state of the q-theory investment block.
    Qsteady {
        /// Discount rate; defaults to ρ.
        #[arg(long)]
        r: Option<f64>,
    },
    /// Simulate a staggered-adoption panel and estimate TWFE DID and an event study.
    DidSim {
        /// Monte-Carlo replications (overrides the config file).
        #[arg(long)]
        replications: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Sweep => "sweep",
            Command::Threshold => "threshold",
            Command::Contour { .. } => "contour",
            Command::Phase => "phase",
            Command::Shock { .. } => "shock",
            Command::Qsteady { .. } => "qsteady",
            Command::DidSim { .. } => "did-sim",
        }
    }
}

impl GlobalArgs {
    fn overrides(&self, command: &Command) -> Result<Overrides> {
        let shock = match *command {
            Command::Shock {
                eta_before,
                eta_after,
                theta_before,
                theta_after,
            } => ShockOverrides {
                eta_before,
                eta_after,
                theta_before,
                theta_after,
            },
            _ => ShockOverrides::default(),
        };
        Ok(Overrides {
            alpha: self.alpha,
            beta: self.beta,
            eta: self.eta,
            theta: self.theta,
            w: self.w,
            delta: self.delta,
            rho: self.rho,
            sigma: self.sigma,
            a: self.a,
            seed: self.seed,
            formats: self.format.as_deref().map(parse_formats).transpose()?,
            shock,
        })
    }
}

/// Parse `args` (including the program name), run, report errors on stderr
/// and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Resolve the configuration for `cli` and execute its command.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let overrides = cli.global.overrides(&cli.command)?;
    let mut cfg = parse_config(cli.global.config.as_deref(), &overrides)?;
    // command-specific flags also take precedence over the file
    match cli.command {
        Command::Contour { level: Some(l) } => cfg.contour.level = Some(l),
        Command::DidSim {
            replications: Some(r),
        } => {
            cfg.did.replications = r;
            cfg.validate()?;
        }
        _ => {}
    }
    execute(&cli.command, &cfg, &cli.global.out)
}

/// Run `command` under `cfg`, writing into `out`. Returns the files written.
pub fn execute(command: &Command, cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let mut w = ArtifactWriter::new(out, Meta::new(command.name(), cfg))?;
    w.echo_config()?;
    let fmt = |f: Format| cfg.formats.contains(&f);
    match command {
        Command::Steady => steady(cfg, &mut w, fmt(Format::Json), fmt(Format::Csv))?,
        Command::Sweep => sweep(cfg, &mut w, fmt(Format::Json), fmt(Format::Csv), fmt(Format::Svg))?,
        Command::Threshold => threshold(cfg, &mut w, fmt(Format::Json), fmt(Format::Csv))?,
        Command::Contour { .. } => {
            contour(cfg, &mut w, fmt(Format::Json), fmt(Format::Csv), fmt(Format::Svg))?
        }
        Command::Phase => phase(cfg, &mut w, fmt(Format::Json), fmt(Format::Csv), fmt(Format::Svg))?,
        Command::Shock { .. } => shock(cfg, &mut w, fmt(Format::Json), fmt(Format::Csv), fmt(Format::Svg))?,
        Command::Qsteady { r } => qsteady(cfg, *r, &mut w, fmt(Format::Json))?,
        Command::DidSim { .. } => did_sim(cfg, &mut w, fmt(Format::Json), fmt(Format::Csv), fmt(Format::Svg))?,
    }
    Ok(w.written().to_vec())
}

#[derive(Serialize)]
struct SteadyReport {
    params: ModelParams,
    regime: Regime,
    steady_state: SteadyState,
    /// Absent where a finite-difference neighbour is singular or infeasible.
    sensitivity: Option<Sensitivity>,
}

fn steady(cfg: &RunConfig, w: &mut ArtifactWriter, json: bool, csv: bool) -> Result<()> {
    let m = cfg.params.validate()?;
    let ss = m.steady_state()?;
    if json {
        w.json(
            "steady.json",
            &SteadyReport {
                params: cfg.params,
                regime: m.regime(),
                steady_state: ss,
                sensitivity: sensitivity_signs(&cfg.params, cfg.sensitivity_step).ok(),
            },
        )?;
    }
    if csv {
        w.csv("steady.csv", |buf| {
            write_table(
                buf,
                &["k_star", "c_star", "l_star", "y_star", "r_star", "feasible"],
                [vec![
                    num(ss.k_star),
                    num(ss.c_star),
                    num(ss.l_star),
                    num(ss.y_star),
                    num(ss.r_star),
                    ss.feasible.to_string(),
                ]],
            )
        })?;
    }
    Ok(())
}

fn run_grid(cfg: &RunConfig) -> Result<SweepGrid> {
    grid_sweep(&cfg.params, &cfg.grid.theta.points(), &cfg.grid.eta.points())
}

fn contour_level(cfg: &RunConfig) -> Result<f64> {
    if let Some(l) = cfg.contour.level {
        return Ok(l);
    }
    let (theta, eta) = cfg.contour.reference;
    let ss = cfg.params.with_theta(theta).with_eta(eta).validate()?.steady_state()?;
    Ok(cfg.contour.variable.of(&ss))
}

#[derive(Serialize)]
struct SweepSummary {
    shape: (usize, usize),
    ok: usize,
    singular: usize,
    infeasible: usize,
    degenerate: usize,
}

fn sweep(cfg: &RunConfig, w: &mut ArtifactWriter, json: bool, csv: bool, svg: bool) -> Result<()> {
    use crate::sweep::CellStatus;
    let grid = run_grid(cfg)?;
    if csv {
        w.csv("sweep.csv", |buf| write_sweep_csv(&grid, buf))?;
    }
    if json {
        w.json(
            "sweep.json",
            &SweepSummary {
                shape: grid.shape(),
                ok: grid.count(CellStatus::Ok),
                singular: grid.count(CellStatus::Singular),
                infeasible: grid.count(CellStatus::Infeasible),
                degenerate: grid.count(CellStatus::Degenerate),
            },
        )?;
    }
    if svg {
        let overlay = [iso_equilibrium_contour(&grid, cfg.contour.variable, contour_level(cfg)?)];
        for (variable, name) in [(Variable::KStar, "surface_k_star.svg"), (Variable::CStar, "surface_c_star.svg")] {
            let overlays: &[IsoContour] = if variable == cfg.contour.variable { &overlay } else { &[] };
            let doc = render_svg(
                &Artifact::Surface {
                    grid: &grid,
                    variable,
                    overlays,
                },
                &RenderSpec::new(FigureKind::SurfaceHeatmap),
            )?;
            w.svg(name, &doc)?;
        }
    }
    Ok(())
}

fn threshold(cfg: &RunConfig, w: &mut ArtifactWriter, json: bool, csv: bool) -> Result<()> {
    let t = &cfg.threshold;
    let curve: Vec<Threshold> =
        threshold_curve(&cfg.params, &t.thetas, t.eta_range, t.tol, Execution::default())?;
    if json {
        w.json("threshold.json", &curve)?;
    }
    if csv {
        let rows = curve.iter().flat_map(|th| {
            th.segments.iter().enumerate().map(move |(i, s)| {
                vec![
                    num(th.theta),
                    i.to_string(),
                    num(s.eta_lo),
                    num(s.eta_hi),
                    num(s.eta_star),
                    num(s.c_star_max),
                    s.shape.as_str().to_string(),
                ]
            })
        });
        w.csv("threshold.csv", |buf| {
            write_table(
                buf,
                &["theta", "segment", "eta_lo", "eta_hi", "eta_star", "c_star_max", "shape"],
                rows,
            )
        })?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ContourReport<'a> {
    contour: &'a IsoContour,
    /// Spearman correlation of (θ, η) along the contour for η ∈ (0.6, 0.95).
    spearman_high_eta: Option<f64>,
}

fn contour(cfg: &RunConfig, w: &mut ArtifactWriter, json: bool, csv: bool, svg: bool) -> Result<()> {
    let grid = run_grid(cfg)?;
    let c = iso_equilibrium_contour(&grid, cfg.contour.variable, contour_level(cfg)?);
    if json {
        let (x, y): (Vec<f64>, Vec<f64>) = c
            .points()
            .filter(|p| p[1] > 0.6 && p[1] < 0.95)
            .map(|p| (p[0], p[1]))
            .unzip();
        w.json(
            "contour.json",
            &ContourReport {
                contour: &c,
                spearman_high_eta: spearman(&x, &y),
            },
        )?;
    }
    if csv {
        let rows = c.lines.iter().enumerate().flat_map(|(i, line)| {
            line.iter().map(move |p| vec![i.to_string(), num(p[0]), num(p[1])])
        });
        w.csv("contour.csv", |buf| write_table(buf, &["line", "theta", "eta"], rows))?;
    }
    if svg {
        let extent = (
            (grid.theta_axis[0], *grid.theta_axis.last().unwrap()),
            (grid.eta_axis[0], *grid.eta_axis.last().unwrap()),
        );
        let extent = (
            if extent.0 .1 > extent.0 .0 { extent.0 } else { (0.0, 1.0) },
            if extent.1 .1 > extent.1 .0 { extent.1 } else { (0.0, 1.0) },
        );
        let doc = render_svg(
            &Artifact::Contour {
                contours: std::slice::from_ref(&c),
                extent,
            },
            &RenderSpec::new(FigureKind::Contour),
        )?;
        w.svg("contour.svg", &doc)?;
    }
    Ok(())
}

fn window(cfg: &RunConfig, k_star: f64) -> PortraitWindow {
    let mut win = PortraitWindow::around(k_star);
    if let Some(r) = cfg.phase.k_range {
        win.k_range = r;
    }
    win
}

fn portrait_tables(w: &mut ArtifactWriter, prefix: &str, p: &PhasePortrait) -> Result<()> {
    let nc = p
        .nullclines
        .k_nullcline
        .iter()
        .map(|q| ("k_dot_zero", q))
        .chain(p.nullclines.c_nullcline.iter().map(|q| ("c_dot_zero", q)))
        .map(|(name, q)| vec![name.to_string(), num(q[0]), num(q[1])]);
    w.csv(&format!("{prefix}_nullclines.csv"), |buf| {
        write_table(buf, &["curve", "k", "c"], nc)
    })?;
    let paths = p.stable_paths.iter().enumerate().flat_map(|(i, b)| {
        let name = if i == 0 { "lower" } else { "upper" };
        b.path
            .samples
            .iter()
            .map(move |s| vec![name.to_string(), num(s.t), num(s.state.c), num(s.state.k)])
    });
    w.csv(&format!("{prefix}_stable_paths.csv"), |buf| {
        write_table(buf, &["branch", "t", "c", "k"], paths)
    })?;
    let field = p
        .vector_field
        .iter()
        .map(|s| vec![num(s.k), num(s.c), num(s.k_dot), num(s.c_dot)]);
    w.csv(&format!("{prefix}_field.csv"), |buf| {
        write_table(buf, &["k", "c", "k_dot", "c_dot"], field)
    })
}

#[derive(Serialize)]
struct PhaseReport<'a> {
    portrait: &'a PhasePortrait,
    /// Forward re-integration check of each stable branch.
    branch_checks: Vec<BranchCheck>,
}

fn phase(cfg: &RunConfig, w: &mut ArtifactWriter, json: bool, csv: bool, svg: bool) -> Result<()> {
    let m = cfg.params.validate()?;
    let ss = m.steady_state()?;
    let p = phase_portrait(&m, window(cfg, ss.k_star), cfg.phase.saddle)?;
    if json {
        let branch_checks = p
            .stable_paths
            .iter()
            .map(|b| verify_branch(&m, &b.path, p.equilibrium, cfg.rtol))
            .collect::<Result<_>>()?;
        w.json(
            "phase.json",
            &PhaseReport {
                portrait: &p,
                branch_checks,
            },
        )?;
    }
    if csv {
        portrait_tables(w, "phase", &p)?;
    }
    if svg {
        let doc = render_svg(&Artifact::Phase(&[&p]), &RenderSpec::new(FigureKind::Phase))?;
        w.svg("phase.svg", &doc)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ShockReport {
    before: ModelParams,
    after: ModelParams,
    steady_before: SteadyState,
    steady_after: SteadyState,
    delta_k_star: f64,
    delta_c_star: f64,
}

fn shock(cfg: &RunConfig, w: &mut ArtifactWriter, json: bool, csv: bool, svg: bool) -> Result<()> {
    let (pb, pa) = cfg.shock.resolve(&cfg.params);
    let (mb, ma) = (pb.validate()?, pa.validate()?);
    let window = cfg.phase.k_range.map(|r| PortraitWindow {
        k_range: r,
        ..PortraitWindow::around(1.0)
    });
    let ex = shock_experiment(&mb, &ma, window, cfg.phase.saddle)?;
    if json {
        w.json(
            "shock.json",
            &ShockReport {
                before: pb,
                after: pa,
                steady_before: mb.steady_state()?,
                steady_after: ma.steady_state()?,
                delta_k_star: ex.delta_k_star,
                delta_c_star: ex.delta_c_star,
            },
        )?;
    }
    if csv {
        portrait_tables(w, "shock_before", &ex.before)?;
        portrait_tables(w, "shock_after", &ex.after)?;
    }
    if svg {
        let doc = render_svg(
            &Artifact::Phase(&[&ex.before, &ex.after]),
            &RenderSpec::new(FigureKind::Phase),
        )?;
        w.svg("shock.svg", &doc)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct QReport {
    r: f64,
    q: f64,
    k: f64,
    investment_rate: f64,
    household_k_star: f64,
}

fn qsteady(cfg: &RunConfig, r: Option<f64>, w: &mut ArtifactWriter, json: bool) -> Result<()> {
    let m = cfg.params.validate()?;
    let r = r.unwrap_or(cfg.params.rho);
    if !(r > -cfg.params.delta) || !r.is_finite() {
        return Err(Error::Usage(format!("discount rate {r} must exceed -delta")));
    }
    let s = firm_steady_state(r, &m)?;
    if json {
        w.json(
            "qsteady.json",
            &QReport {
                r,
                q: s.q,
                k: s.k,
                investment_rate: investment_rate(s.q, &m),
                household_k_star: m.steady_state()?.k_star,
            },
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DidReport<'a> {
    did: &'a DidResult,
    event_study: &'a EventStudyResult,
    monte_carlo: Option<MonteCarloSummary>,
}

#[derive(Serialize)]
struct MonteCarloSummary {
    replications: usize,
    mean_att: f64,
    sd_att: f64,
    mean_se: f64,
    /// `3·mean(SE)/√R`.
    tolerance: f64,
}

fn did_sim(cfg: &RunConfig, w: &mut ArtifactWriter, json: bool, csv: bool, svg: bool) -> Result<()> {
    let d = &cfg.did;
    let panel = generate_panel(&d.dgp)?;
    let did = twfe_did(&panel, &d.options)?;
    let es = event_study(&panel, &d.options, d.event_window)?;
    let mc = if d.replications > 1 {
        let draws = monte_carlo(&d.dgp, d.replications, Execution::default(), |p| {
            twfe_did(p, &d.options).map(|r| (r.att, r.se))
        })?;
        if csv {
            let rows = draws
                .iter()
                .enumerate()
                .map(|(i, (a, s))| vec![i.to_string(), num(*a), num(*s)]);
            w.csv("monte_carlo.csv", |buf| write_table(buf, &["replication", "att", "se"], rows))?;
        }
        let n = draws.len() as f64;
        let mean_att = draws.iter().map(|x| x.0).sum::<f64>() / n;
        let mean_se = draws.iter().map(|x| x.1).sum::<f64>() / n;
        let sd_att = (draws.iter().map(|x| (x.0 - mean_att).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        Some(MonteCarloSummary {
            replications: draws.len(),
            mean_att,
            sd_att,
            mean_se,
            tolerance: 3.0 * mean_se / n.sqrt(),
        })
    } else {
        None
    };
    if csv {
        w.csv("panel.csv", |buf| panel.write_csv(buf))?;
        let rows = es
            .periods
            .iter()
            .zip(&es.coefficients)
            .zip(&es.se)
            .map(|((e, b), s)| vec![e.to_string(), num(*b), num(*s)]);
        w.csv("event_study.csv", |buf| write_table(buf, &["period", "coefficient", "se"], rows))?;
    }
    if json {
        w.json(
            "did.json",
            &DidReport {
                did: &did,
                event_study: &es,
                monte_carlo: mc,
            },
        )?;
    }
    if svg {
        let doc = render_svg(&Artifact::EventStudy(&es), &RenderSpec::new(FigureKind::EventStudy))?;
        w.svg("event_study.svg", &doc)?;
    }
    Ok(())
}
