use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hfbem::bem::{AssemblyOptions, BoundarySpace, Mesh};
use hfbem::curves::{Curve, CurveSpec};
use hfbem::harness::{run_sweep, run_verification, sweep_failures, write_atomic, SweepConfig, VerifyConfig};
use hfbem::kernels::Formulation;
use hfbem::scattering::{solve_scattering, IncidentField, ScatteringSolution};
use hfbem::specfun::BesselSequence;
use hfbem::spectral::{CircleSpectrum, WaveNumber};

#[derive(Parser)]
#[command(name = "hfbem", version, about = "Galerkin BEM for 2-d sound-soft Helmholtz scattering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the combined-field operator on the unit circle.
    Eigs(EigsArgs),
    /// Solve for the boundary density of a plane wave.
    Solve(SolveArgs),
    /// Total field on a grid.
    Field(FieldArgs),
    /// Wavenumber sweep at fixed hk.
    Sweep(SweepArgs),
    /// Circle verification suite.
    Verify(VerifyArgs),
    #[command(hide = true)]
    SpecfunTable(SpecfunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct EigsArgs {
    #[arg(long)]
    k: f64,
    #[arg(long)]
    max_mode: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Discretization {
    #[arg(long, default_value = "circle")]
    curve: CurveSpec,
    #[arg(long)]
    k: f64,
    #[arg(long, conflicts_with = "n_panels")]
    hk: Option<f64>,
    #[arg(long)]
    n_panels: Option<usize>,
    #[arg(long, default_value_t = 0)]
    p: usize,
    #[arg(long, default_value = "indirect")]
    formulation: Formulation,
    /// Incident direction in radians.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
}

impl Discretization {
    fn solve(&self) -> Result<ScatteringSolution<f64>> {
        let curve = Curve::from_spec(&self.curve);
        let mesh = match (self.hk, self.n_panels) {
            (_, Some(n)) => Mesh::equal_arclength(curve, n)?,
            (hk, None) => Mesh::for_hk(curve, self.k, hk.unwrap_or(0.5))?,
        };
        let space = BoundarySpace::new(mesh, self.p)?;
        let incident = IncidentField::plane_wave(self.k, self.theta)?;
        let sol = solve_scattering(&space, &incident, self.formulation, AssemblyOptions::default())?;
        log::info!(
            "{} panels, {} dofs, relative residual {:.3e}",
            space.mesh().n_panels(),
            space.dim(),
            sol.relative_residual
        );
        Ok(sol)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    disc: Discretization,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FieldArgs {
    #[command(flatten)]
    disc: Discretization,
    /// `nx:ny:xmin:xmax:ymin:ymax`
    #[arg(long, default_value = "41:41:-3:3:-3:3")]
    grid: Grid,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Grid {
    nx: usize,
    ny: usize,
    x: (f64, f64),
    y: (f64, f64),
}

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 6 {
            return Err(format!("expected nx:ny:xmin:xmax:ymin:ymax, got '{s}'"));
        }
        let n = |v: &str| v.parse::<usize>().map_err(|e| format!("'{v}': {e}"));
        let f = |v: &str| v.parse::<f64>().map_err(|e| format!("'{v}': {e}"));
        let g = Grid {
            nx: n(parts[0])?,
            ny: n(parts[1])?,
            x: (f(parts[2])?, f(parts[3])?),
            y: (f(parts[4])?, f(parts[5])?),
        };
        if g.nx == 0 || g.ny == 0 {
            return Err("grid needs at least one point per direction".into());
        }
        Ok(g)
    }
}

impl Grid {
    fn points(&self) -> Vec<[f64; 2]> {
        let at = |(lo, hi): (f64, f64), i: usize, n: usize| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push([at(self.x, i, self.nx), at(self.y, j, self.ny)]);
            }
        }
        out
    }
}

#[derive(Args)]
struct SweepArgs {
    /// JSON file with the sweep configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    curve: Option<CurveSpec>,
    #[arg(long, value_delimiter = ',')]
    k_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    hk_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    hk43_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    formulation: Option<Vec<Formulation>>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_condition: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Extend the default grid to k = 320.
    #[arg(long)]
    stretch: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_delimiter = ',')]
    k_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    condition_k_values: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpecfunArgs {
    #[arg(long)]
    x: f64,
    #[arg(long, default_value_t = 10)]
    max_order: usize,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn eigs(a: &EigsArgs) -> Result<bool> {
    let k = WaveNumber::new(a.k)?;
    let max_mode = a.max_mode.unwrap_or((4.0 * a.k).ceil() as usize);
    let sp = CircleSpectrum::new(k, max_mode)?;
    let rows: Vec<(usize, f64, f64, f64)> = (0..=max_mode)
        .map(|m| {
            let l = sp.lambda(m as i64);
            (m, l.re, l.im, (l - 1.0).norm() * m as f64 / a.k)
        })
        .collect();
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("m,re_lambda,im_lambda,tail\n");
            for (m, re, im, t) in &rows {
                let _ = writeln!(s, "{m},{re:.16e},{im:.16e},{t:.16e}");
            }
            s
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(m, re, im, t)| serde_json::json!({"m": m, "re_lambda": re, "im_lambda": im, "tail": t}))
                .collect();
            serde_json::to_string_pretty(&serde_json::json!({"k": a.k, "modes": v}))? + "\n"
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(true)
}

fn solve(a: &SolveArgs) -> Result<bool> {
    let sol = a.disc.solve()?;
    let space = sol.space();
    let mut s = String::from("panel,dof,re,im\n");
    for i in 0..space.mesh().n_panels() {
        for l in 0..space.local_dim() {
            let d = space.dof(i, l);
            let c = sol.density.coeffs[d];
            let _ = writeln!(s, "{i},{d},{:.16e},{:.16e}", c.re, c.im);
        }
    }
    emit(a.out.as_deref(), &s)?;
    Ok(true)
}

fn field(a: &FieldArgs) -> Result<bool> {
    let sol = a.disc.solve()?;
    let curve = *sol.space().curve();
    let pts = a.grid.points();
    let (inside, outside): (Vec<usize>, Vec<usize>) = (0..pts.len()).partition(|&i| curve.contains(pts[i]));
    let outer: Vec<[f64; 2]> = outside.iter().map(|&i| pts[i]).collect();
    let values = sol.reconstruct_field(&outer)?;
    let mut u = vec![None; pts.len()];
    for (&i, v) in outside.iter().zip(values) {
        u[i] = Some(v);
    }
    log::info!("{} grid points inside the obstacle", inside.len());
    let mut s = String::from("x,y,re_u,im_u,inside_flag\n");
    for (p, v) in pts.iter().zip(u) {
        let (re, im, flag) = v.map_or((0.0, 0.0, 1), |v| (v.re, v.im, 0));
        let _ = writeln!(s, "{:.16e},{:.16e},{re:.16e},{im:.16e},{flag}", p[0], p[1]);
    }
    emit(a.out.as_deref(), &s)?;
    Ok(true)
}

fn sweep(a: &SweepArgs) -> Result<bool> {
    let mut cfg = match &a.config {
        Some(p) => SweepConfig::from_json_file(p)?,
        None => SweepConfig::circle_default(if a.stretch { 320.0 } else { 160.0 }),
    };
    if let Some(c) = a.curve {
        cfg.curve = c;
    }
    if let Some(v) = &a.k_values {
        cfg.k_values = v.clone();
    }
    if let Some(v) = &a.hk_values {
        cfg.hk_values = v.clone();
    }
    if let Some(v) = &a.hk43_values {
        cfg.hk43_values = v.clone();
    }
    if let Some(v) = &a.formulation {
        cfg.formulations = v.clone();
    }
    if let Some(p) = a.p {
        cfg.p = p;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.no_condition {
        cfg.condition = false;
    }
    if let Some(o) = &a.out {
        cfg.output = Some(o.clone());
    }
    if cfg.output.is_none() {
        cfg.output = Some(PathBuf::from("sweep_out"));
    }
    let records = run_sweep(&cfg)?;
    let mut table = String::new();
    for r in &records {
        let _ = writeln!(
            table,
            "{:<20} k={:<6} N={:<6} rel_err={:.4e} best={:.4e} qo={:.4} cond={:.4} creg={:.4} {:.0} ms{}",
            r.series.stem(),
            r.k,
            r.n,
            r.rel_err,
            r.best_approx,
            r.qo_ratio,
            r.cond_norm,
            r.creg_ratio,
            r.ms,
            r.error.as_deref().map(|e| format!(" error: {e}")).unwrap_or_default()
        );
    }
    print!("{table}");
    let failures = sweep_failures(&cfg, &records);
    for f in &failures {
        eprintln!("FAIL {f}");
    }
    if let Some(o) = &cfg.output {
        eprintln!("outputs in {}", o.display());
    }
    Ok(failures.is_empty())
}

fn verify(a: &VerifyArgs) -> Result<bool> {
    let mut cfg = VerifyConfig::default();
    if let Some(v) = &a.k_values {
        cfg.k_values = v.clone();
    }
    if let Some(v) = &a.condition_k_values {
        cfg.condition_k_values = v.clone();
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let report = run_verification(&cfg);
    let text = report.render();
    print!("{text}");
    if let Some(p) = &a.out {
        write_atomic(p, text.as_bytes())?;
    }
    Ok(report.all_passed())
}

fn specfun_table(a: &SpecfunArgs) -> Result<bool> {
    if !(a.x > 0.0) {
        bail!("x must be positive");
    }
    let seq = BesselSequence::new(a.max_order, a.x)?;
    let mut s = String::from("m,x,J,J',ReH,ImH\n");
    for m in 0..=a.max_order {
        let h = seq.h(m).to_complex();
        let _ = writeln!(
            s,
            "{m},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            a.x,
            seq.j(m).to_real(),
            seq.j_prime(m).to_real(),
            h.re,
            h.im
        );
    }
    print!("{s}");
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eigs(a) => eigs(a),
        Command::Solve(a) => solve(a),
        Command::Field(a) => field(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::SpecfunTable(a) => specfun_table(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
