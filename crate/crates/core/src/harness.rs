//! Wavenumber sweeps at fixed `hk`, the circle verification suite and result
//! files.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bem::{
    assemble_many, estimate_qo_condition_norm, solve_galerkin, AssemblyOptions, BoundarySpace, ConditionOptions,
    DensityVector, Mesh, Projector, Target,
};
use crate::curves::{Curve, CurveSpec};
use crate::error::{Error, Result};
use crate::kernels::Formulation;
use crate::scattering::{boundary_data, IncidentField};
use crate::spectral::{
    cutoff_smoothing_constant, dgs_min_real, exact_density, hf_multiplier_norms_above, lambda_tail_constant,
    sobolev_norm, verify_inverse_decomposition, CutoffSpec, FourierCoefficients, WaveNumber,
};

pub const CSV_HEADER: &str = "k,h,N,rel_err,best_approx,qo_ratio,cond_norm,creg_ratio,ms";

/// How the mesh width follows `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshScaling {
    /// `h k = c`
    Hk,
    /// `h k^(4/3) = c`
    Hk43,
}

impl MeshScaling {
    pub fn name(self) -> &'static str {
        match self {
            MeshScaling::Hk => "hk",
            MeshScaling::Hk43 => "hk43",
        }
    }

    /// `hk` giving `h k^e = c`.
    pub fn hk(self, c: f64, k: f64) -> f64 {
        match self {
            MeshScaling::Hk => c,
            MeshScaling::Hk43 => c * k.powf(-1.0 / 3.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTolerances {
    pub max_qo_ratio: f64,
    /// Allowed `rel_err(k) / rel_err(k_first)`.
    pub max_error_growth: f64,
}

impl Default for SweepTolerances {
    fn default() -> Self {
        Self {
            max_qo_ratio: 4.5,
            max_error_growth: 1.5,
        }
    }
}

fn default_formulations() -> Vec<Formulation> {
    Formulation::ALL.to_vec()
}

fn default_true() -> bool {
    true
}

fn default_refinements() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub curve: CurveSpec,
    #[serde(default = "default_formulations")]
    pub formulations: Vec<Formulation>,
    #[serde(default)]
    pub p: usize,
    pub hk_values: Vec<f64>,
    /// Values of `h k^(4/3)` for the contrast series.
    #[serde(default)]
    pub hk43_values: Vec<f64>,
    pub k_values: Vec<f64>,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub tolerances: SweepTolerances,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Estimate the quasi-optimality condition norm (unit circle only).
    #[serde(default = "default_true")]
    pub condition: bool,
    /// Bisections of the mesh for the reference solution on other curves.
    #[serde(default = "default_refinements")]
    pub reference_refinements: usize,
}

impl SweepConfig {
    /// Circle, both formulations, `hk = 0.5`, `k = 10 * 2^j` up to `k_max`.
    pub fn circle_default(k_max: f64) -> Self {
        let mut k_values = vec![];
        let mut k = 10.0;
        while k <= k_max {
            k_values.push(k);
            k *= 2.0;
        }
        Self {
            curve: CurveSpec::unit_circle(),
            formulations: default_formulations(),
            p: 0,
            hk_values: vec![0.5],
            hk43_values: vec![],
            k_values,
            theta: 0.0,
            tolerances: SweepTolerances::default(),
            output: None,
            seed: 0x5eed,
            condition: true,
            reference_refinements: 2,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_values.is_empty() || self.hk_values.is_empty() && self.hk43_values.is_empty() {
            return Err(Error::invalid("sweep needs at least one k and one mesh width"));
        }
        if self.formulations.is_empty() {
            return Err(Error::invalid("sweep needs at least one formulation"));
        }
        for &k in &self.k_values {
            WaveNumber::with_min(k, WaveNumber::<f64>::DEFAULT_K_MIN)?;
        }
        for &c in self.hk_values.iter().chain(&self.hk43_values) {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::invalid(format!("mesh width parameter must be positive, got {c}")));
            }
        }
        if !self.theta.is_finite() {
            return Err(Error::invalid("incident angle must be finite"));
        }
        Ok(())
    }

    pub fn series(&self) -> Vec<Series> {
        let mut out = vec![];
        for &f in &self.formulations {
            for &c in &self.hk_values {
                out.push(Series {
                    formulation: f,
                    scaling: MeshScaling::Hk,
                    value: c,
                });
            }
            for &c in &self.hk43_values {
                out.push(Series {
                    formulation: f,
                    scaling: MeshScaling::Hk43,
                    value: c,
                });
            }
        }
        out
    }
}

/// One curve of the sweep: formulation and mesh rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub formulation: Formulation,
    pub scaling: MeshScaling,
    pub value: f64,
}

impl Series {
    /// File stem such as `indirect_hk0.5`.
    pub fn stem(&self) -> String {
        format!("{}_{}{}", self.formulation, self.scaling.name(), self.value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub series: Series,
    pub k: f64,
    pub h: f64,
    /// Degrees of freedom.
    pub n: usize,
    pub rel_err: f64,
    pub best_approx: f64,
    pub qo_ratio: f64,
    /// `NaN` when not estimated.
    pub cond_norm: f64,
    /// `NaN` off the unit circle.
    pub creg_ratio: f64,
    pub ms: f64,
    #[serde(default)]
    pub error: Option<String>,
}

impl SweepRecord {
    fn failed(series: Series, k: f64, h: f64, n: usize, ms: f64, err: &Error) -> Self {
        Self {
            series,
            k,
            h,
            n,
            rel_err: f64::NAN,
            best_approx: f64::NAN,
            qo_ratio: f64::NAN,
            cond_norm: f64::NAN,
            creg_ratio: f64::NAN,
            ms,
            error: Some(err.to_string()),
        }
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Mesh width and `(k, mesh rule)` cell.
#[derive(Clone, Copy, Debug)]
struct Cell {
    scaling: MeshScaling,
    value: f64,
    k: f64,
}

/// Runs every `(series, k)` cell; failed cells carry an error tag. Writes the
/// outputs when `config.output` is set.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let mut cells = vec![];
    for (scaling, values) in [(MeshScaling::Hk, &config.hk_values), (MeshScaling::Hk43, &config.hk43_values)] {
        for &value in values {
            for &k in &config.k_values {
                cells.push(Cell { scaling, value, k });
            }
        }
    }
    let per_cell: Vec<Vec<SweepRecord>> = cells.par_iter().map(|c| run_cell(config, *c)).collect();
    let mut records = vec![];
    for s in config.series() {
        for cell_records in &per_cell {
            records.extend(cell_records.iter().filter(|r| r.series == s).cloned());
        }
    }
    if let Some(dir) = &config.output {
        emit_outputs(config, &records, dir)?;
    }
    Ok(records)
}

fn run_cell(config: &SweepConfig, cell: Cell) -> Vec<SweepRecord> {
    let start = Instant::now();
    let series = |f| Series {
        formulation: f,
        scaling: cell.scaling,
        value: cell.value,
    };
    let curve = Curve::<f64>::from_spec(&config.curve);
    let mesh = Mesh::for_hk(curve, cell.k, cell.scaling.hk(cell.value, cell.k));
    let (h, n) = mesh.as_ref().map_or((f64::NAN, 0), |m| (m.h(), m.n_panels() * (config.p + 1)));
    let result = mesh.and_then(|m| measure_cell(config, cell, m));
    let ms = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(rows) => rows
            .into_iter()
            .map(|(f, m)| SweepRecord {
                series: series(f),
                k: cell.k,
                h,
                n,
                rel_err: m.rel_err,
                best_approx: m.best_approx,
                qo_ratio: m.rel_err / m.best_approx,
                cond_norm: m.cond_norm,
                creg_ratio: m.creg_ratio,
                ms,
                error: None,
            })
            .collect(),
        Err(e) => {
            log::warn!("sweep cell {} = {} at k = {} failed: {e}", cell.scaling.name(), cell.value, cell.k);
            config
                .formulations
                .iter()
                .map(|&f| SweepRecord::failed(series(f), cell.k, h, n, ms, &e))
                .collect()
        }
    }
}

struct Measured {
    rel_err: f64,
    best_approx: f64,
    cond_norm: f64,
    creg_ratio: f64,
}

/// Galerkin densities for all formulations on one space.
fn solve_all(
    space: &BoundarySpace<f64>,
    incident: &IncidentField<f64>,
    formulations: &[Formulation],
) -> Result<Vec<DensityVector<f64>>> {
    let systems = assemble_many(space, incident.k, formulations, AssemblyOptions::default())?;
    systems
        .into_iter()
        .zip(formulations)
        .map(|(sys, &f)| {
            let rhs = boundary_data(space, incident, f)?;
            let report = solve_galerkin(&sys.with_rhs(rhs.coeffs)?)?;
            Ok(report.density)
        })
        .collect()
}

/// Largest Fourier mode kept for exact circle densities.
pub fn exact_density_modes(k: f64) -> usize {
    (2.0 * k).ceil() as usize + 60
}

/// `||v||_{H^1} / (k ||v||_{L^2})`.
pub fn creg_ratio(v: &FourierCoefficients<f64>, k: f64) -> f64 {
    sobolev_norm(v, 1.0) / (k * sobolev_norm(v, 0.0))
}

fn measure_cell(config: &SweepConfig, cell: Cell, mesh: Mesh<f64>) -> Result<Vec<(Formulation, Measured)>> {
    let k = cell.k;
    let space = BoundarySpace::new(mesh, config.p)?;
    let incident = IncidentField::plane_wave(k, config.theta)?;
    let fs = &config.formulations;
    let approx = solve_all(&space, &incident, fs)?;
    let wk = WaveNumber::new(k)?;

    let exact = config.curve.is_unit_circle();
    let cond_norm = if exact && config.condition {
        let opts = ConditionOptions {
            seed: config.seed,
            ..ConditionOptions::default()
        };
        estimate_qo_condition_norm(wk, &space, Projector::Panel, opts)?.norm
    } else {
        f64::NAN
    };

    let measure = |target: &Target<'_, f64>, vn: &DensityVector<f64>| -> Result<(f64, f64)> {
        let norm = space.target_norm(target)?;
        Ok((space.l2_distance(target, vn)? / norm, space.best_approx_error(target)? / norm))
    };

    let mut out = vec![];
    if exact {
        for (&f, vn) in fs.iter().zip(&approx) {
            let v = exact_density(f, wk, config.theta, exact_density_modes(k))?;
            let (rel_err, best_approx) = measure(&Target::Fourier(&v), vn)?;
            out.push((
                f,
                Measured {
                    rel_err,
                    best_approx,
                    cond_norm,
                    creg_ratio: creg_ratio(&v, k),
                },
            ));
        }
    } else {
        let mut fine = space.mesh().clone();
        for _ in 0..config.reference_refinements {
            fine = fine.refine();
        }
        let fine = BoundarySpace::new(fine, config.p)?;
        let reference = solve_all(&fine, &incident, fs)?;
        for ((&f, vn), v) in fs.iter().zip(&approx).zip(&reference) {
            let (rel_err, best_approx) = measure(&Target::Density(&fine, v), vn)?;
            out.push((
                f,
                Measured {
                    rel_err,
                    best_approx,
                    cond_norm,
                    creg_ratio: f64::NAN,
                },
            ));
        }
    }
    Ok(out)
}

/// `qo_ratio` and flat-error checks of a sweep against its tolerances.
pub fn sweep_failures(config: &SweepConfig, records: &[SweepRecord]) -> Vec<String> {
    let mut out = vec![];
    for s in config.series() {
        let rows: Vec<&SweepRecord> = records.iter().filter(|r| r.series == s).collect();
        let Some(first) = rows.first() else { continue };
        for r in &rows {
            if let Some(e) = &r.error {
                out.push(format!("{} k={}: {e}", s.stem(), r.k));
                continue;
            }
            if !(r.qo_ratio <= config.tolerances.max_qo_ratio) {
                out.push(format!(
                    "{} k={}: qo_ratio {:.4} > {}",
                    s.stem(),
                    r.k,
                    r.qo_ratio,
                    config.tolerances.max_qo_ratio
                ));
            }
            if !(r.rel_err <= config.tolerances.max_error_growth * first.rel_err) {
                out.push(format!(
                    "{} k={}: rel_err {:.4e} exceeds {} x {:.4e}",
                    s.stem(),
                    r.k,
                    r.rel_err,
                    config.tolerances.max_error_growth,
                    first.rel_err
                ));
            }
        }
    }
    out
}

fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn csv_row(r: &SweepRecord) -> Vec<String> {
    vec![
        fmt17(r.k),
        fmt17(r.h),
        r.n.to_string(),
        fmt17(r.rel_err),
        fmt17(r.best_approx),
        fmt17(r.qo_ratio),
        fmt17(r.cond_norm),
        fmt17(r.creg_ratio),
        fmt17(r.ms),
    ]
}

/// CSV text for one series, 17 significant digits.
pub fn records_to_csv(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    let io = |e: csv::Error| Error::invalid(format!("csv: {e}"));
    w.write_record(CSV_HEADER.split(',')).map_err(io)?;
    for r in records {
        w.write_record(csv_row(r)).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

/// Reads records written by [`records_to_csv`] for `series`.
pub fn parse_csv(text: &str, series: Series, origin: &Path) -> Result<Vec<SweepRecord>> {
    let perr = |message: String| Error::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| perr(e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(perr(format!("unexpected header '{}'", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = vec![];
    for (line, row) in rd.records().enumerate() {
        let row = row.map_err(|e| perr(e.to_string()))?;
        let f = |i: usize| -> Result<f64> {
            row.get(i)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| perr(format!("row {}: bad field {i}", line + 1)))
        };
        let n: usize = row
            .get(2)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| perr(format!("row {}: bad N", line + 1)))?;
        out.push(SweepRecord {
            series,
            k: f(0)?,
            h: f(1)?,
            n,
            rel_err: f(3)?,
            best_approx: f(4)?,
            qo_ratio: f(5)?,
            cond_norm: f(6)?,
            creg_ratio: f(7)?,
            ms: f(8)?,
            error: None,
        });
    }
    Ok(out)
}

/// Writes `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    config: &'a SweepConfig,
    records: &'a [SweepRecord],
}

/// Writes `sweep.json`, one CSV per series and one plot-data file per
/// formulation into `dir`. Returns the paths written.
pub fn emit_outputs(config: &SweepConfig, records: &[SweepRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::invalid("no records to write"));
    }
    let mut written = vec![];
    let doc = SweepDocument { config, records };
    let json = serde_json::to_string_pretty(&doc).map_err(|e| Error::invalid(format!("json: {e}")))?;
    let path = dir.join("sweep.json");
    write_atomic(&path, json.as_bytes())?;
    written.push(path);

    let series = config.series();
    for s in &series {
        let rows: Vec<SweepRecord> = records.iter().filter(|r| r.series == *s).cloned().collect();
        if rows.is_empty() {
            continue;
        }
        let path = dir.join(format!("sweep_{}.csv", s.stem()));
        write_atomic(&path, records_to_csv(&rows)?.as_bytes())?;
        written.push(path);
    }

    for &f in &config.formulations {
        let mut text = String::from("# k rel_err best_approx qo_ratio N\n");
        for s in series.iter().filter(|s| s.formulation == f) {
            let _ = writeln!(text, "# series {}={}", s.scaling.name(), s.value);
            for r in records.iter().filter(|r| r.series == *s && r.ok()) {
                let _ = writeln!(
                    text,
                    "{} {} {} {} {}",
                    fmt17(r.k),
                    fmt17(r.rel_err),
                    fmt17(r.best_approx),
                    fmt17(r.qo_ratio),
                    r.n
                );
            }
            text.push_str("\n\n");
        }
        let path = dir.join(format!("plot_{f}.dat"));
        write_atomic(&path, text.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Parameters of [`run_verification`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub k_values: Vec<f64>,
    /// Modes `|m| <= mode_factor k`.
    pub mode_factor: f64,
    pub cutoff: CutoffSpec<f64>,
    pub condition_k_values: Vec<f64>,
    pub condition_hk: f64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            k_values: vec![5.0, 10.0, 20.0, 40.0, 80.0],
            mode_factor: 4.0,
            cutoff: CutoffSpec::default(),
            condition_k_values: vec![10.0, 20.0, 40.0, 80.0],
            condition_hk: 0.5,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub items: Vec<CheckItem>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    /// One `PASS`/`FAIL` line per item.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for i in &self.items {
            let _ = writeln!(s, "{} {}: {}", if i.passed { "PASS" } else { "FAIL" }, i.name, i.detail);
        }
        s
    }
}

/// Largest over smallest of positive values.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Exponent `e` in `C(k) ~ k^e` between the last two points.
fn growth_exponent(ks: &[f64], values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    (values[n - 1] / values[n - 2]).ln() / (ks[n - 1] / ks[n - 2]).ln()
}

/// Largest growth exponent of the high-frequency norms counted as bounded,
/// probed between the last grid wavenumber and twice it. The transition region
/// `m ~ k` grows like `k^(1/3)`.
pub const HF_GROWTH_LIMIT: f64 = 1.0 / 6.0;

/// Circle checks with pass/fail per item; never errors, failures are reported.
pub fn run_verification(config: &VerifyConfig) -> VerificationReport {
    let mut items = vec![];
    let mut push = |name: String, r: Result<(bool, String)>| {
        let (passed, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
        items.push(CheckItem { name, passed, detail });
    };
    let modes = |k: f64| (config.mode_factor * k).ceil() as usize;
    let wk = |k: f64| WaveNumber::new(k);

    for &k in &config.k_values {
        push(
            format!("dgs_min_real k={k}"),
            (|| {
                let d = dgs_min_real(wk(k)?, modes(k))?;
                Ok((d.min_real >= 1.0 - 1e-9, format!("min Re lambda = {:.12} at m = {}", d.min_real, d.argmin)))
            })(),
        );
    }

    push(
        "lambda_tail_constant".into(),
        (|| {
            let c: Vec<f64> = config
                .k_values
                .iter()
                .map(|&k| {
                    let m = (8.0 * k).max((1.5 * k).ceil() + 50.0) as usize;
                    lambda_tail_constant(wk(k)?, 0.5, m)
                })
                .collect::<Result<_>>()?;
            let r = spread(&c);
            Ok((r <= 2.0, format!("constants {} spread {r:.4}", list(&c))))
        })(),
    );

    push(
        "hf_multiplier_norms".into(),
        (|| {
            config.cutoff.validate()?;
            // 1 - chi vanishes below m^2 = plateau_end k^2
            let ratio = config.cutoff.plateau_end;
            let mut ks = config.k_values.clone();
            if let Some(&last) = ks.last() {
                ks.push(2.0 * last);
            }
            let norms: Vec<_> = ks
                .iter()
                .map(|&k| hf_multiplier_norms_above(wk(k)?, ratio))
                .collect::<Result<_>>()?;
            let cs: Vec<f64> = norms.iter().map(|n| n.c_s).collect();
            let cd: Vec<f64> = norms.iter().map(|n| n.c_d).collect();
            let es = growth_exponent(&ks, &cs);
            let ed = growth_exponent(&ks, &cd);
            let finite = cs.iter().chain(&cd).all(|v| v.is_finite());
            Ok((
                finite && es <= HF_GROWTH_LIMIT && ed <= HF_GROWTH_LIMIT,
                format!("C_S {} (growth {es:.3}), C_D {} (growth {ed:.3}), m^2 >= {ratio} k^2", list(&cs), list(&cd)),
            ))
        })(),
    );

    for &k in &config.k_values {
        push(
            format!("inverse_decomposition k={k}"),
            (|| {
                let r = verify_inverse_decomposition(wk(k)?, modes(k))?;
                Ok((r <= 1e-8, format!("residual {r:.3e}")))
            })(),
        );
    }

    push(
        "cutoff_smoothing".into(),
        (|| {
            config.cutoff.validate()?;
            let mut ok = true;
            let mut vals = vec![];
            for &k in &config.k_values {
                let c = cutoff_smoothing_constant(&config.cutoff, wk(k)?, modes(k));
                let bound = (1.0 / (k * k) + config.cutoff.support_end).sqrt();
                ok &= c <= bound;
                vals.push(c);
            }
            Ok((ok, format!("constants {} bound sqrt(1/k^2 + {})", list(&vals), config.cutoff.support_end)))
        })(),
    );

    for f in Formulation::ALL {
        push(
            format!("creg_ratio {f}"),
            (|| {
                let c: Vec<f64> = config
                    .k_values
                    .iter()
                    .map(|&k| Ok(creg_ratio(&exact_density(f, wk(k)?, 0.0, exact_density_modes(k))?, k)))
                    .collect::<Result<_>>()?;
                let r = spread(&c);
                Ok((r <= 2.0, format!("ratios {} spread {r:.4}", list(&c))))
            })(),
        );
    }

    for &k in &config.condition_k_values {
        push(
            format!("condition_norm k={k}"),
            (|| {
                let space = BoundarySpace::new(Mesh::for_hk(Curve::Circle(1.0), k, config.condition_hk)?, 0)?;
                let opts = ConditionOptions {
                    seed: config.seed,
                    ..ConditionOptions::default()
                };
                let e = estimate_qo_condition_norm(wk(k)?, &space, Projector::Panel, opts)?;
                Ok((
                    e.norm < 1.0,
                    format!("estimate {:.6} after {} iterations, hk = {}", e.norm, e.iterations, config.condition_hk),
                ))
            })(),
        );
    }
    VerificationReport { items }
}

fn list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SweepConfig {
        SweepConfig {
            k_values: vec![5.0, 10.0],
            ..SweepConfig::circle_default(10.0)
        }
    }

    #[test]
    fn default_grid_is_geometric() {
        assert_eq!(SweepConfig::circle_default(160.0).k_values, vec![10.0, 20.0, 40.0, 80.0, 160.0]);
    }

    #[test]
    fn circle_sweep_records_are_consistent() {
        let cfg = small_config();
        let recs = run_sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 4);
        for r in &recs {
            assert!(r.ok(), "{r:?}");
            assert!(r.qo_ratio >= 1.0 - 1e-12 && r.qo_ratio < 4.5, "{r:?}");
            assert!((r.rel_err - r.qo_ratio * r.best_approx).abs() <= 1e-15 * r.rel_err.max(1.0));
            assert!(r.cond_norm > 0.0 && r.cond_norm < 1.0);
            assert!(r.creg_ratio > 0.0);
        }
    }

    #[test]
    fn failed_cell_is_isolated() {
        let mut cfg = small_config();
        // at k = 30 the coarsest admissible mesh still has hk > MAX_HK
        cfg.k_values = vec![3.0, 30.0];
        cfg.hk_values = vec![1.0, 50.0];
        cfg.condition = false;
        let recs = run_sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 8);
        let failed: Vec<_> = recs.iter().filter(|r| !r.ok()).collect();
        assert_eq!(failed.len(), 2);
        assert!(failed.iter().all(|r| r.k == 30.0 && r.series.value == 50.0 && r.rel_err.is_nan()));
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = small_config();
        let strip = |mut v: Vec<SweepRecord>| {
            v.iter_mut().for_each(|r| r.ms = 0.0);
            v
        };
        let a = strip(run_sweep(&cfg).unwrap());
        let b = strip(run_sweep(&cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn reference_sweep_off_circle() {
        let cfg = SweepConfig {
            curve: CurveSpec::Kite,
            formulations: vec![Formulation::Indirect],
            k_values: vec![4.0],
            condition: false,
            ..SweepConfig::circle_default(10.0)
        };
        let recs = run_sweep(&cfg).unwrap();
        assert!(recs[0].ok() && recs[0].cond_norm.is_nan() && recs[0].creg_ratio.is_nan());
        assert!(recs[0].qo_ratio >= 1.0 && recs[0].rel_err < 0.5, "{:?}", recs[0]);
    }

    #[test]
    fn contrast_series_uses_finer_meshes() {
        let cfg = SweepConfig {
            formulations: vec![Formulation::Indirect],
            hk_values: vec![],
            hk43_values: vec![1.0],
            k_values: vec![8.0, 27.0],
            condition: false,
            ..SweepConfig::circle_default(10.0)
        };
        let recs = run_sweep(&cfg).unwrap();
        // h k^(4/3) = 1 gives hk = k^(-1/3)
        assert!((recs[0].h * 8.0 - 0.5).abs() < 0.02);
        assert!((recs[1].h * 27.0 - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn verification_negative_control() {
        let mut cfg = VerifyConfig {
            k_values: vec![10.0, 20.0, 40.0, 80.0],
            condition_k_values: vec![],
            ..VerifyConfig::default()
        };
        let hf = |cfg: &VerifyConfig| run_verification(cfg).items.into_iter().find(|i| i.name == "hf_multiplier_norms").unwrap();
        assert!(hf(&cfg).passed, "{:?}", hf(&cfg));
        cfg.cutoff.plateau_end = 0.5;
        assert!(!hf(&cfg).passed, "{:?}", hf(&cfg));
    }

    #[test]
    fn config_rejects_small_k_and_unknown_keys() {
        let mut cfg = small_config();
        cfg.k_values = vec![0.5];
        assert!(cfg.validate().is_err());
        let text = r#"{"curve":{"kind":"circle","radius":1.0},"hk_values":[0.5],"k_values":[10],"bogus":1}"#;
        assert!(serde_json::from_str::<SweepConfig>(text).is_err());
        let text = r#"{"curve":{"kind":"kite"},"hk_values":[0.5],"k_values":[10]}"#;
        let cfg: SweepConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.formulations.len(), 2);
        assert_eq!(cfg.reference_refinements, 2);
    }
}
