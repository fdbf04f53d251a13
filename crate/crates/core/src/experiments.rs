//! Monte-Carlo studies of final conflict on signed Erdős–Rényi graphs.
//!
//! Each trial gets its own seed, `derive_seed(master_seed, trial)`, and
//! splits it into three streams: parameter draw, graph generation and the
//! dynamics. Results are therefore identical for any worker count.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{derive_seed, run_sih, run_sioh, stream_rng, OpinionVector, SihParams, SiohParams, SiohState, SimRng};
use crate::error::{Error, Result};
use crate::graph::AppraisalMatrix;

const PARAM_STREAM: u64 = 0;
const GRAPH_STREAM: u64 = 1;
const DYNAMICS_STREAM: u64 = 2;

pub const CSV_HEADER: [&str; 11] = [
    "trial", "seed", "n", "p", "p_neg", "c0", "c_inf", "rho_link", "n_triad", "steps", "absorbed",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErParams {
    pub n: usize,
    pub p: f64,
    pub p_neg: f64,
}

impl ErParams {
    pub fn new(n: usize, p: f64, p_neg: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must be at least 2, got {n}")));
        }
        for (name, v) in [("p", p), ("p_neg", p_neg)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParams(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(Self { n, p, p_neg })
    }
}

/// Bilateral signed ER graph: each pair is linked both ways with
/// probability `p`, then each directed link turns negative with
/// probability `p_neg`.
pub fn gen_er_signed(params: &ErParams, seed: u64) -> AppraisalMatrix {
    gen_er_signed_with(params, &mut stream_rng(seed, GRAPH_STREAM))
}

fn gen_er_signed_with(params: &ErParams, rng: &mut SimRng) -> AppraisalMatrix {
    let n = params.n;
    let mut x = AppraisalMatrix::zeros(n).expect("n >= 2");
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(params.p) {
                x.set(i, j, 1);
                x.set(j, i, 1);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if x.get(i, j) != 0 && rng.random_bool(params.p_neg) {
                x.set(i, j, -1);
            }
        }
    }
    x
}

/// Fraction of nonzero entries that are negative; `None` without links.
pub fn conflict_ratio(x: &AppraisalMatrix) -> Option<f64> {
    let links = x.nonzero_count();
    (links > 0).then(|| x.negative_count() as f64 / links as f64)
}

/// Nonzero entries over `n(n-1)`. Zero for a single node.
pub fn link_density(x: &AppraisalMatrix) -> f64 {
    let n = x.n();
    if n < 2 {
        return 0.0;
    }
    x.nonzero_count() as f64 / (n * (n - 1)) as f64
}

/// Triangles whose three pairs are linked in both directions.
pub fn count_triads(x: &AppraisalMatrix) -> usize {
    let n = x.n();
    let both = |i: usize, j: usize| x.get(i, j) != 0 && x.get(j, i) != 0;
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if !both(i, j) {
                continue;
            }
            count += (j + 1..n).filter(|&k| both(i, k) && both(j, k)).count();
        }
    }
    count
}

/// Least-squares fit `y = k x + b` with Pearson `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    /// `None` when `x` is constant.
    pub k: Option<f64>,
    pub b: f64,
    /// `None` when either axis is constant.
    pub r: Option<f64>,
    pub n_points: usize,
}

fn mean_exact(v: &[f64]) -> (f64, bool) {
    if v.iter().all(|&a| a == v[0]) {
        (v[0], true)
    } else {
        (v.iter().sum::<f64>() / v.len() as f64, false)
    }
}

pub fn linear_regression(xs: &[f64], ys: &[f64]) -> Result<RegressionResult> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPoints(xs.len()));
    }
    let (mx, x_const) = mean_exact(xs);
    let (my, y_const) = mean_exact(ys);
    let n_points = xs.len();
    if x_const {
        return Ok(RegressionResult { k: None, b: my, r: None, n_points });
    }
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let k = sxy / sxx;
    let r = (!y_const).then(|| (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0));
    Ok(RegressionResult {
        k: Some(k),
        b: my - k * mx,
        r,
        n_points,
    })
}

/// One row of a study. `c0` and `c_inf` are `None` for a linkless graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub p: f64,
    pub p_neg: f64,
    pub c0: Option<f64>,
    pub c_inf: Option<f64>,
    pub rho_link: f64,
    pub n_triad: usize,
    pub steps: u64,
    pub absorbed: bool,
}

impl TrialRecord {
    pub fn params(&self) -> ErParams {
        ErParams {
            n: self.n,
            p: self.p,
            p_neg: self.p_neg,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Sih,
    /// SIOH with opinions drawn uniformly at random.
    Sioh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    C0,
    Density,
    Triads,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::C0 => "c0",
            Study::Density => "density",
            Study::Triads => "triads",
        }
    }

    fn regressor(self, r: &TrialRecord) -> f64 {
        match self {
            Study::C0 => r.c0.expect("filtered"),
            Study::Density => r.rho_link,
            Study::Triads => r.n_triad as f64,
        }
    }
}

/// Settings shared by every study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudyConfig {
    pub n: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub max_steps: u64,
    pub engine: Engine,
    pub sih: SihParams,
    pub sioh: SiohParams,
    /// Worker cap; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            n: 8,
            trials: 3000,
            master_seed: 0,
            max_steps: 1_000_000,
            engine: Engine::Sih,
            sih: SihParams::default(),
            sioh: SiohParams::default(),
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyOutcome {
    pub study: Study,
    /// The fixed generator parameter: `p` for c0 and triads, `p_neg` for
    /// density and triads.
    pub fixed_p: Option<f64>,
    pub fixed_p_neg: Option<f64>,
    pub records: Vec<TrialRecord>,
    pub regression: Option<RegressionResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub study: String,
    pub n: usize,
    pub p: Option<f64>,
    pub p_neg: Option<f64>,
    pub master_seed: u64,
    pub trials: u64,
    pub k: Option<f64>,
    pub b: Option<f64>,
    pub r: Option<f64>,
    pub regression_points: usize,
    pub absorbed_fraction: f64,
    pub mean_steps: f64,
}

impl StudyOutcome {
    pub fn summary(&self, config: &StudyConfig) -> StudySummary {
        let trials = self.records.len();
        let absorbed = self.records.iter().filter(|r| r.absorbed).count();
        let steps: u64 = self.records.iter().map(|r| r.steps).sum();
        StudySummary {
            study: self.study.name().to_string(),
            n: config.n,
            p: self.fixed_p,
            p_neg: self.fixed_p_neg,
            master_seed: config.master_seed,
            trials: trials as u64,
            k: self.regression.and_then(|r| r.k),
            b: self.regression.map(|r| r.b),
            r: self.regression.and_then(|r| r.r),
            regression_points: self.regression.map_or(0, |r| r.n_points),
            absorbed_fraction: absorbed as f64 / trials.max(1) as f64,
            mean_steps: steps as f64 / trials.max(1) as f64,
        }
    }
}

enum Draw {
    Fixed(f64),
    Uniform,
}

fn run_trial(config: &StudyConfig, trial: u64, p: &Draw, p_neg: &Draw) -> Result<TrialRecord> {
    let seed = derive_seed(config.master_seed, trial);
    let mut param_rng = stream_rng(seed, PARAM_STREAM);
    let mut draw = |d: &Draw| match *d {
        Draw::Fixed(v) => v,
        Draw::Uniform => param_rng.random::<f64>(),
    };
    let params = ErParams::new(config.n, draw(p), draw(p_neg))?;
    let mut graph_rng = stream_rng(seed, GRAPH_STREAM);
    let x0 = gen_er_signed_with(&params, &mut graph_rng);
    let dyn_seed = derive_seed(seed, DYNAMICS_STREAM);
    let record = if x0.nonzero_count() == 0 {
        None
    } else {
        Some(match config.engine {
            Engine::Sih => run_sih(&x0, &config.sih, dyn_seed, config.max_steps, false)?,
            Engine::Sioh => {
                let y = OpinionVector::random(config.n, &mut graph_rng);
                let state = SiohState::new(x0.clone(), y)?;
                run_sioh(&state, &config.sioh, dyn_seed, config.max_steps, false)?
            }
        })
    };
    Ok(TrialRecord {
        trial,
        seed,
        n: params.n,
        p: params.p,
        p_neg: params.p_neg,
        c0: conflict_ratio(&x0),
        c_inf: record.as_ref().and_then(|r| conflict_ratio(&r.final_state)),
        rho_link: link_density(&x0),
        n_triad: count_triads(&x0),
        steps: record.as_ref().map_or(0, |r| r.steps),
        // A linkless graph is already balanced.
        absorbed: record.as_ref().is_none_or(|r| r.absorbed),
    })
}

fn run_trials(config: &StudyConfig, p: Draw, p_neg: Draw) -> Result<Vec<TrialRecord>> {
    if config.trials < 2 {
        return Err(Error::InvalidParams(format!("trials must be at least 2, got {}", config.trials)));
    }
    let job = || {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, t, &p, &p_neg))
            .collect::<Result<Vec<_>>>()
    };
    match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::InvalidParams(e.to_string()))?
            .install(job),
        None => job(),
    }
}

fn finish(study: Study, fixed_p: Option<f64>, fixed_p_neg: Option<f64>, records: Vec<TrialRecord>) -> StudyOutcome {
    let (xs, ys): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter(|r| r.c0.is_some())
        .map(|r| (study.regressor(r), r.c_inf.expect("linked graph")))
        .unzip();
    StudyOutcome {
        study,
        fixed_p,
        fixed_p_neg,
        regression: linear_regression(&xs, &ys).ok(),
        records,
    }
}

/// Fixed `p`, `p_neg ~ U[0, 1]`; regresses `c_inf` on `c0`.
pub fn run_study_c0(config: &StudyConfig, p: f64) -> Result<StudyOutcome> {
    let records = run_trials(config, Draw::Fixed(p), Draw::Uniform)?;
    Ok(finish(Study::C0, Some(p), None, records))
}

/// Fixed `p_neg`, `p ~ U[0, 1]`; regresses `c_inf` on `rho_link`.
pub fn run_study_density(config: &StudyConfig, p_neg: f64) -> Result<StudyOutcome> {
    let records = run_trials(config, Draw::Uniform, Draw::Fixed(p_neg))?;
    Ok(finish(Study::Density, None, Some(p_neg), records))
}

/// Fixed `p` and `p_neg`; regresses `c_inf` on `n_triad`.
pub fn run_study_triads(config: &StudyConfig, p: f64, p_neg: f64) -> Result<StudyOutcome> {
    let records = run_trials(config, Draw::Fixed(p), Draw::Fixed(p_neg))?;
    Ok(finish(Study::Triads, Some(p), Some(p_neg), records))
}

pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one row per record, in the given order, under [`CSV_HEADER`].
pub fn export_csv(records: &[TrialRecord], path: impl AsRef<Path>) -> Result<()> {
    write_csv(records, std::fs::File::create(path)?)
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_extremes() {
        let empty = gen_er_signed(&ErParams::new(6, 0.0, 0.5).unwrap(), 1);
        assert_eq!(empty.nonzero_count(), 0);
        let full = gen_er_signed(&ErParams::new(6, 1.0, 0.0).unwrap(), 1);
        assert_eq!(full.nonzero_count(), 30);
        assert!(!full.has_negative());
        for seed in 0..50 {
            assert!(gen_er_signed(&ErParams::new(8, 0.4, 0.5).unwrap(), seed).is_bilateral());
        }
        assert!(ErParams::new(1, 0.5, 0.5).is_err());
        assert!(ErParams::new(3, 1.5, 0.5).is_err());
    }

    #[test]
    fn metric_examples() {
        let x = AppraisalMatrix::from_edge_list(3, &[(1, 2, -1), (2, 1, 1), (1, 3, 1), (3, 1, 1)]).unwrap();
        assert_eq!(conflict_ratio(&x), Some(0.25));
        assert_eq!(conflict_ratio(&AppraisalMatrix::zeros(3).unwrap()), None);
        assert_eq!(link_density(&AppraisalMatrix::zeros(4).unwrap()), 0.0);

        let mut eight = AppraisalMatrix::zeros(8).unwrap();
        for i in 0..7 {
            eight.set(i, i + 1, 1);
            eight.set(i + 1, i, 1);
        }
        assert_eq!(link_density(&eight), 0.25);

        let complete = gen_er_signed(&ErParams::new(8, 1.0, 0.3).unwrap(), 9);
        assert_eq!(count_triads(&complete), 56);
        assert_eq!(link_density(&complete), 1.0);

        let square = AppraisalMatrix::from_edge_list(
            4,
            &[(1, 2, 1), (2, 1, 1), (2, 3, 1), (3, 2, 1), (3, 4, 1), (4, 3, 1), (4, 1, 1), (1, 4, 1)],
        )
        .unwrap();
        assert_eq!(count_triads(&square), 0);
        // One-way link breaks the triad.
        let one_way =
            AppraisalMatrix::from_edge_list(3, &[(1, 2, 1), (2, 1, 1), (2, 3, 1), (3, 2, 1), (1, 3, 1)]).unwrap();
        assert_eq!(count_triads(&one_way), 0);
    }

    #[test]
    fn regression_examples() {
        let r = linear_regression(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert_eq!(r.k, Some(2.0));
        assert_eq!(r.b, 1.0);
        assert!((r.r.unwrap() - 1.0).abs() < 1e-15);

        let flat = linear_regression(&[0.0, 1.0, 2.0], &[0.7; 3]).unwrap();
        assert_eq!((flat.k, flat.b, flat.r), (Some(0.0), 0.7, None));

        let vertical = linear_regression(&[0.1; 3], &[1.0, 2.0, 6.0]).unwrap();
        assert_eq!((vertical.k, vertical.r), (None, None));
        assert_eq!(vertical.b, 3.0);

        assert_eq!(linear_regression(&[1.0], &[1.0]), Err(Error::TooFewPoints(1)));
        assert_eq!(linear_regression(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch(2, 1)));
    }

    #[test]
    fn regression_matches_normal_equations() {
        let mut rng = stream_rng(5, 0);
        let xs: Vec<f64> = (0..20).map(|_| rng.random::<f64>()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.3 * x + rng.random::<f64>()).collect();
        // Normal equations [[sum x^2, sum x], [sum x, n]] [k b]^T = [sum xy, sum y].
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let syy: f64 = ys.iter().map(|y| y * y).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let det = sxx * n - sx * sx;
        let k = (sxy * n - sx * sy) / det;
        let b = (sxx * sy - sx * sxy) / det;
        let r = (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
        let fit = linear_regression(&xs, &ys).unwrap();
        assert!((fit.k.unwrap() - k).abs() < 1e-10);
        assert!((fit.b - b).abs() < 1e-10);
        assert!((fit.r.unwrap() - r).abs() < 1e-10);
    }

    #[test]
    fn degenerate_study_runs() {
        let config = StudyConfig {
            trials: 2,
            ..StudyConfig::default()
        };
        let out = run_study_c0(&config, 0.2).unwrap();
        assert_eq!(out.records.len(), 2);
        let one = StudyConfig { trials: 1, ..config };
        assert!(run_study_c0(&one, 0.2).is_err());
    }

    #[test]
    fn complete_graph_triads_have_no_slope() {
        let config = StudyConfig {
            trials: 10,
            ..StudyConfig::default()
        };
        let out = run_study_triads(&config, 1.0, 0.5).unwrap();
        assert!(out.records.iter().all(|r| r.n_triad == 56));
        assert_eq!(out.regression.unwrap().k, None);
    }

    #[test]
    fn csv_shapes() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_HEADER.join(",")));

        let config = StudyConfig {
            trials: 3,
            ..StudyConfig::default()
        };
        let out = run_study_density(&config, 0.3).unwrap();
        let mut buf = Vec::new();
        write_csv(&out.records, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().lines().count(), 4);
        assert_eq!(read_csv(buf.as_slice()).unwrap(), out.records);
    }

    #[test]
    fn linkless_trial_has_empty_ratios() {
        let rec = run_trial(
            &StudyConfig::default(),
            0,
            &Draw::Fixed(0.0),
            &Draw::Fixed(0.5),
        )
        .unwrap();
        assert_eq!((rec.c0, rec.c_inf, rec.steps, rec.absorbed), (None, None, 0, true));
        let mut buf = Vec::new();
        write_csv(&[rec.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",8,0.0,0.5,,,0.0,0,0,true"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), vec![rec]);
    }
}
