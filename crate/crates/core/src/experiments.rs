//! Seeded Monte Carlo harness: boundary-length tables, convergence curves
//! and figure rendering, driven by a JSON configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geom::PointSet;
use crate::hull::{build_hull, write_arcs_csv, RConvexHull};
use crate::raster::{hausdorff_boundaries, hausdorff_masks, measure_distance, rasterize, Grid, DEFAULT_WIDTH};
use crate::shapes::{sample_uniform, SampleRequest, ShapeSpec, Variant};

mod svg;

pub use svg::{curves_svg, hull_svg, mask_svg, render_svg, SvgObject};

/// Keys a configuration document must carry, no more and no fewer.
pub const CONFIG_KEYS: [&str; 10] = [
    "experiment",
    "shape",
    "shape_params",
    "r_list",
    "n_list",
    "replications",
    "master_seed",
    "grid_h",
    "out_dir",
    "workers",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// Mean and spread of `L(S_n)` per `(r, n)`.
    Table1,
    /// Median raster distances between `S_n` and `S` per `(r, n)`.
    Convergence,
    /// One hull rendered to SVG per `(r, n)`, replication 0.
    Figure2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub shape: String,
    pub shape_params: BTreeMap<String, f64>,
    pub r_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
    /// Raster cell size; `null` selects `diagonal / 2048` of the shape box.
    pub grid_h: Option<f64>,
    pub out_dir: PathBuf,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl ExperimentConfig {
    /// Parses and validates a JSON document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("not valid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Config("top level must be a JSON object".into()))?;
        for k in obj.keys() {
            if !CONFIG_KEYS.contains(&k.as_str()) {
                return Err(Error::Config(format!("unknown key `{k}`")));
            }
        }
        for k in CONFIG_KEYS {
            if !obj.contains_key(k) {
                return Err(Error::Config(format!("missing key `{k}`")));
            }
        }
        let cfg: ExperimentConfig =
            serde_json::from_value(value).map_err(|e| Error::Config(format!("bad value: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.replications < 1 {
            return bad("replications must be >= 1".into());
        }
        if self.r_list.is_empty() || self.n_list.is_empty() {
            return bad("r_list and n_list must be nonempty".into());
        }
        if let Some(r) = self.r_list.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return bad(format!("every r must be finite and > 0, got {r}"));
        }
        if self.n_list.contains(&0) {
            return bad("every n must be >= 1".into());
        }
        if let Some(h) = self.grid_h {
            if !(h > 0.0 && h.is_finite()) {
                return bad(format!("grid_h must be null or > 0, got {h}"));
            }
        }
        self.shape_spec()?;
        Ok(())
    }

    pub fn shape_spec(&self) -> Result<ShapeSpec> {
        let variant: Variant = self.shape.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        let params: Vec<(String, f64)> = self.shape_params.iter().map(|(k, v)| (k.clone(), *v)).collect();
        ShapeSpec::new(variant, &params).map_err(|e| Error::Config(e.to_string()))
    }

    /// Grid used for raster comparisons against the shape.
    pub fn comparison_grid(&self, shape: &ShapeSpec) -> Result<Grid> {
        let b = shape.bounding_box;
        let h = self.grid_h.unwrap_or(b.diagonal() / DEFAULT_WIDTH as f64);
        Grid::covering(b, 4.0 * h, h)
    }

    /// `(r, n, replication)` triples in output order.
    fn jobs(&self) -> Vec<(f64, usize, usize)> {
        let mut jobs = Vec::new();
        for &r in &self.r_list {
            for &n in &self.n_list {
                for k in 0..self.replications {
                    jobs.push((r, n, k));
                }
            }
        }
        jobs
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", self.workers)))
    }
}

/// Seed of replication `i`: the first 8 bytes (little endian) of
/// SHA-256 over `master_seed` and `i`, both as little-endian u64.
pub fn replication_seed(master_seed: u64, i: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update(i.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub shape: String,
    pub r: f64,
    pub n: usize,
    pub replication: usize,
    pub seed: u64,
    pub length: f64,
    pub wall_time: f64,
    pub isolated: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub shape: String,
    pub r: f64,
    pub n: usize,
    pub mean: f64,
    /// Across-run sample standard deviation (0 for one run).
    pub std: f64,
    pub stderr: f64,
    pub l_true: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Output {
    pub records: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
}

/// Header of `runs.csv`. Wall times go to `timings.csv` so that `runs.csv`
/// is identical across repeated runs.
pub const RUNS_HEADER: &str = "shape,r,n,replication,seed,length,isolated";

fn hull_run(shape: &ShapeSpec, r: f64, n: usize, seed: u64) -> Result<(PointSet, RConvexHull)> {
    let sample = sample_uniform(&SampleRequest { shape: shape.clone(), n, seed })?;
    let hull = build_hull(&sample, r)?;
    let l = hull.boundary_length();
    if !l.is_finite() || l < 0.0 {
        return Err(Error::Numeric(format!("L(S_n) = {l} for r = {r}, n = {n}, seed = {seed}")));
    }
    Ok((sample, hull))
}

/// `R` replications of sample, hull and boundary length for every `(r, n)`.
pub fn run_table1(config: &ExperimentConfig) -> Result<Table1Output> {
    config.validate()?;
    let shape = config.shape_spec()?;
    let l_true = shape.analytic_length();
    if l_true.is_none() {
        log::warn!("shape {} has no analytic length; summary omits L_true", shape.name());
    }
    let name = shape.name().to_string();
    let records: Vec<RunRecord> = config.pool()?.install(|| {
        config
            .jobs()
            .into_par_iter()
            .map(|(r, n, k)| {
                let seed = replication_seed(config.master_seed, k as u64);
                let t0 = Instant::now();
                let (_, hull) = hull_run(&shape, r, n, seed)?;
                Ok(RunRecord {
                    shape: name.clone(),
                    r,
                    n,
                    replication: k,
                    seed,
                    length: hull.boundary_length(),
                    wall_time: t0.elapsed().as_secs_f64(),
                    isolated: hull.isolated.len(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = summarize(&records, l_true);
    Ok(Table1Output { records, summary })
}

/// Mean, sample std and standard error of `L` per `(r, n)`, in first-seen
/// order. Replications are sorted by index before summing, so the result
/// does not depend on the record order.
pub fn summarize(records: &[RunRecord], l_true: Option<f64>) -> Vec<SummaryRow> {
    let mut keys: Vec<(f64, usize)> = Vec::new();
    for rec in records {
        if !keys.iter().any(|k| k.0 == rec.r && k.1 == rec.n) {
            keys.push((rec.r, rec.n));
        }
    }
    keys.into_iter()
        .map(|(r, n)| {
            let mut group: Vec<&RunRecord> = records.iter().filter(|x| x.r == r && x.n == n).collect();
            group.sort_by_key(|x| x.replication);
            let m = group.len() as f64;
            let mean = group.iter().map(|x| x.length).sum::<f64>() / m;
            let std = if group.len() > 1 {
                (group.iter().map(|x| (x.length - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                shape: group[0].shape.clone(),
                r,
                n,
                mean,
                std,
                stderr: std / m.sqrt(),
                l_true,
            }
        })
        .collect()
}

pub fn runs_csv(records: &[RunRecord]) -> String {
    let mut s = format!("{RUNS_HEADER}\n");
    for x in records {
        s.push_str(&format!("{},{},{},{},{},{},{}\n", x.shape, x.r, x.n, x.replication, x.seed, x.length, x.isolated));
    }
    s
}

pub fn timings_csv(records: &[RunRecord]) -> String {
    let mut s = String::from("shape,r,n,replication,wall_time\n");
    for x in records {
        s.push_str(&format!("{},{},{},{},{}\n", x.shape, x.r, x.n, x.replication, x.wall_time));
    }
    s
}

/// `summary.csv`; the `L_true` column is dropped when the shape has no
/// analytic length.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let with_truth = rows.iter().all(|x| x.l_true.is_some());
    let mut s = String::from("shape,r,n,mean,std,stderr");
    s.push_str(if with_truth { ",L_true\n" } else { "\n" });
    for x in rows {
        s.push_str(&format!("{},{},{},{},{},{}", x.shape, x.r, x.n, x.mean, x.std, x.stderr));
        match x.l_true {
            Some(l) if with_truth => s.push_str(&format!(",{l}\n")),
            _ => s.push('\n'),
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRecord {
    pub r: f64,
    pub n: usize,
    pub replication: usize,
    pub seed: u64,
    pub d_h: f64,
    pub d_h_boundary: f64,
    pub d_mu: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub r: f64,
    pub n: usize,
    pub median_d_h: f64,
    pub median_d_h_boundary: f64,
    pub median_d_mu: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveTable {
    pub shape: String,
    pub grid_h: f64,
    pub records: Vec<ConvergenceRecord>,
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("shape,r,n,median_d_h,median_d_h_boundary,median_d_mu\n");
        for x in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.shape, x.r, x.n, x.median_d_h, x.median_d_h_boundary, x.median_d_mu
            ));
        }
        s
    }

    pub fn runs_to_csv(&self) -> String {
        let mut s = String::from("shape,r,n,replication,seed,d_h,d_h_boundary,d_mu\n");
        for x in &self.records {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                self.shape, x.r, x.n, x.replication, x.seed, x.d_h, x.d_h_boundary, x.d_mu
            ));
        }
        s
    }
}

/// Median of a nonempty slice (mean of the middle pair for even length).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Per `(r, n)`: medians over replications of `d_H(S_n, S)`,
/// `d_H(∂S_n, ∂S)` and `d_mu(S_n, S)` on the comparison grid.
pub fn run_convergence(config: &ExperimentConfig) -> Result<CurveTable> {
    config.validate()?;
    let shape = config.shape_spec()?;
    let grid = config.comparison_grid(&shape)?;
    let truth = rasterize(&shape, &grid, 0.0)?;
    let records: Vec<ConvergenceRecord> = config.pool()?.install(|| {
        config
            .jobs()
            .into_par_iter()
            .map(|(r, n, k)| {
                let seed = replication_seed(config.master_seed, k as u64);
                let (_, hull) = hull_run(&shape, r, n, seed)?;
                let est = rasterize(&hull, &grid, 0.0)?;
                let rec = ConvergenceRecord {
                    r,
                    n,
                    replication: k,
                    seed,
                    d_h: hausdorff_masks(&est, &truth)?,
                    d_h_boundary: hausdorff_boundaries(&est, &truth)?,
                    d_mu: measure_distance(&est, &truth)?,
                };
                if ![rec.d_h, rec.d_h_boundary, rec.d_mu].iter().all(|v| v.is_finite()) {
                    return Err(Error::Numeric(format!(
                        "non-finite distance for r = {r}, n = {n}, seed = {seed} (empty raster hull?)"
                    )));
                }
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut rows = Vec::new();
    for &r in &config.r_list {
        for &n in &config.n_list {
            let g: Vec<&ConvergenceRecord> = records.iter().filter(|x| x.r == r && x.n == n).collect();
            let pick = |f: fn(&ConvergenceRecord) -> f64| median(&g.iter().map(|x| f(x)).collect::<Vec<_>>());
            rows.push(CurveRow {
                r,
                n,
                median_d_h: pick(|x| x.d_h),
                median_d_h_boundary: pick(|x| x.d_h_boundary),
                median_d_mu: pick(|x| x.d_mu),
            });
        }
    }
    Ok(CurveTable {
        shape: shape.name().to_string(),
        grid_h: grid.h,
        records,
        rows,
    })
}

/// Files written by [`run`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOutputs {
    pub files: Vec<PathBuf>,
}

fn write(out: &mut RunOutputs, dir: &Path, name: &str, text: &str) -> Result<()> {
    let p = dir.join(name);
    std::fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
    out.files.push(p);
    Ok(())
}

/// Runs the configured experiment and writes its outputs to `out_dir`.
///
/// * `table1`: `runs.csv`, `summary.csv`, `timings.csv`.
/// * `convergence`: the same three files plus `curves.csv`,
///   `convergence_runs.csv` and `curves.svg`.
/// * `figure2`: `hull_r{r}_n{n}.svg` and `hull_r{r}_n{n}_arcs.csv` per pair.
pub fn run(config: &ExperimentConfig) -> Result<RunOutputs> {
    config.validate()?;
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = RunOutputs::default();
    match config.experiment {
        ExperimentKind::Table1 => {
            let t = run_table1(config)?;
            write_table1(&mut out, dir, &t)?;
        }
        ExperimentKind::Convergence => {
            let c = run_convergence(config)?;
            let t = run_table1(config)?;
            write_table1(&mut out, dir, &t)?;
            write(&mut out, dir, "curves.csv", &c.to_csv())?;
            write(&mut out, dir, "convergence_runs.csv", &c.runs_to_csv())?;
            let p = dir.join("curves.svg");
            render_svg(&SvgObject::Curves(&c), &p)?;
            out.files.push(p);
        }
        ExperimentKind::Figure2 => {
            let shape = config.shape_spec()?;
            let seed = replication_seed(config.master_seed, 0);
            for &r in &config.r_list {
                for &n in &config.n_list {
                    let (_, hull) = hull_run(&shape, r, n, seed)?;
                    let stem = format!("hull_r{r}_n{n}");
                    let p = dir.join(format!("{stem}.svg"));
                    render_svg(&SvgObject::Hull { hull: &hull, show_sample: true }, &p)?;
                    out.files.push(p);
                    let p = dir.join(format!("{stem}_arcs.csv"));
                    write_arcs_csv(&hull, &p)?;
                    out.files.push(p);
                }
            }
        }
    }
    Ok(out)
}

fn write_table1(out: &mut RunOutputs, dir: &Path, t: &Table1Output) -> Result<()> {
    write(out, dir, "runs.csv", &runs_csv(&t.records))?;
    write(out, dir, "summary.csv", &summary_csv(&t.summary))?;
    write(out, dir, "timings.csv", &timings_csv(&t.records))
}
