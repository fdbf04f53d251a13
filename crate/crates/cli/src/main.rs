//! `balance-lab`: command-line front end for the balance-lab library.
//!
//! Exit codes: 0 success or absorbed, 1 usage, 2 input, 3 size guard,
//! 4 step budget exhausted.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use balance_lab::balance::{
    all_cycles_positive, all_ego_networks_two_faction, detect_two_faction, is_triad_wise_balanced,
};
use balance_lab::chordal::{check_equivalence_conditions, verify_equivalence_exhaustive};
use balance_lab::dynamics::{
    constructive_sih_sequence, constructive_sioh_sequence, potential_h, potential_h_xy, run_sih,
    run_sioh, sioh_aligned, stream_rng, AbsorptionRecord, OpinionVector, SihParams, SiohParams,
    SiohState,
};
use balance_lab::experiments::{
    conflict_ratio, count_triads, export_csv, gen_er_signed, link_density, run_study_c0,
    run_study_density, run_study_triads, Engine, ErParams, StudyConfig,
};
use balance_lab::graph::{parse_edge_list, write_edge_list};
use balance_lab::{balance::triad_balanced, AppraisalMatrix, Error};
use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{AnalyzeReport, EquivalenceOut, SimulateReport};

const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;
const OPINION_STREAM: u64 = 3;

#[derive(Parser)]
#[command(
    name = "balance-lab",
    version,
    about = "Structural balance on signed appraisal networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Balance checks and metrics for one appraisal network.
    Analyze(AnalyzeArgs),
    /// Certify when triad-wise and two-faction balance coincide on a skeleton.
    Equivalence(EquivalenceArgs),
    /// Run the dynamics from a file or a random graph.
    Simulate(SimulateArgs),
    /// Monte-Carlo study on signed Erdős–Rényi graphs.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge-list file.
    #[arg(long)]
    input: PathBuf,
    /// Also test the sign of every simple cycle.
    #[arg(long)]
    all_cycles: bool,
    /// Lift the size guards.
    #[arg(long)]
    force: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EquivalenceArgs {
    /// Edge-list file; signs are ignored.
    #[arg(long)]
    input: PathBuf,
    /// Also try every sign assignment on the skeleton.
    #[arg(long)]
    verify_exhaustive: bool,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimEngine {
    Sih,
    Sioh,
    /// Deterministic SIH sequence.
    Constructive,
    /// Deterministic SIOH sequence.
    ConstructiveSioh,
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long, default_value_t = 1.0 / 3.0)]
    p1: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    p2: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    p3: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    q1: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    q2: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    q3: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Edge-list file; otherwise a graph is generated from --n, --p, --p-neg.
    #[arg(long, conflicts_with_all = ["n", "p", "p_neg"])]
    input: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p_neg: Option<f64>,
    #[arg(long, value_enum, default_value = "sih")]
    engine: SimEngine,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: u64,
    /// Initial opinions as comma-separated signs; drawn from the seed if absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    opinions: Option<Vec<i8>>,
    #[command(flatten)]
    weights: WeightArgs,
    /// Write the final edge list here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one JSON line per update here.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyKind {
    C0,
    Density,
    Triads,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyEngine {
    Sih,
    Sioh,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    study: StudyKind,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    p_neg: Option<f64>,
    #[arg(long, default_value_t = 3000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: u64,
    #[arg(long, value_enum, default_value = "sih")]
    engine: StudyEngine,
    #[command(flatten)]
    weights: WeightArgs,
    /// Per-trial CSV.
    #[arg(long)]
    out: PathBuf,
    /// Also write the JSON summary here.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Worker cap.
    #[arg(long, env = "BALANCE_LAB_THREADS")]
    threads: Option<usize>,
}

enum Failure {
    Usage(String),
    Input(String),
    Guard(String),
    MaxSteps,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Guard(_) => 3,
            Failure::MaxSteps => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::GuardExceeded { .. } => Failure::Guard(e.to_string()),
            Error::InvalidParams(_) | Error::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Equivalence(a) => equivalence(a),
        Command::Simulate(a) => simulate(a),
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Input(m) | Failure::Guard(m) => {
                    eprintln!("error: {m}")
                }
                Failure::MaxSteps => eprintln!("error: step budget exhausted before absorption"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn read_matrix(path: &Path) -> CliResult<AppraisalMatrix> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_edge_list(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
    match out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn analyze(args: AnalyzeArgs) -> CliResult<()> {
    let x = read_matrix(&args.input)?;
    let all_cycles = if args.all_cycles {
        Some(all_cycles_positive(&x, args.force)?)
    } else {
        None
    };
    let ego: Vec<bool> = (0..x.n())
        .map(|i| {
            let (_, sub) = x.ego_network(i).expect("node in range");
            detect_two_faction(&sub.graph).is_some()
        })
        .collect();
    let report = AnalyzeReport::new(
        &x,
        &is_triad_wise_balanced(&x),
        detect_two_faction(&x).as_ref(),
        &ego,
        all_ego_networks_two_faction(&x),
        conflict_ratio(&x),
        link_density(&x),
        count_triads(&x),
        all_cycles,
    );
    emit_json(&report, args.out.as_deref())
}

fn equivalence(args: EquivalenceArgs) -> CliResult<()> {
    let g = read_matrix(&args.input)?.skeleton();
    let conditions = check_equivalence_conditions(&g, args.force)?;
    let exhaustive = if args.verify_exhaustive {
        Some(verify_equivalence_exhaustive(&g, args.force)?)
    } else {
        None
    };
    let report = EquivalenceOut::new(&g, &conditions, exhaustive.as_ref());
    emit_json(&report, args.out.as_deref())
}

fn check_sum(names: &str, w: [f64; 3]) -> CliResult<()> {
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(Failure::Usage(format!("{names} must sum to 1, got {sum}")));
    }
    Ok(())
}

impl WeightArgs {
    /// The samplers only read the first two weights as thresholds, so the
    /// third is taken as the exact complement once the sum is checked.
    fn sih(&self) -> CliResult<SihParams> {
        check_sum("--p1, --p2, --p3", [self.p1, self.p2, self.p3])?;
        if self.p3 <= 0.0 {
            return Err(Failure::Usage("--p3 must be positive".into()));
        }
        Ok(SihParams::new(self.p1, self.p2, 1.0 - self.p1 - self.p2)?)
    }

    fn sioh(&self) -> CliResult<SiohParams> {
        check_sum("--q1, --q2, --q3", [self.q1, self.q2, self.q3])?;
        if self.q3 <= 0.0 {
            return Err(Failure::Usage("--q3 must be positive".into()));
        }
        Ok(SiohParams::new(
            self.q1,
            self.q2,
            1.0 - self.q1 - self.q2,
            self.sih()?,
        )?)
    }
}

fn simulate(args: SimulateArgs) -> CliResult<()> {
    let x0 = match (&args.input, args.n, args.p, args.p_neg) {
        (Some(path), ..) => read_matrix(path)?,
        (None, Some(n), Some(p), Some(p_neg)) => {
            gen_er_signed(&ErParams::new(n, p, p_neg)?, args.seed)
        }
        _ => {
            return Err(Failure::Usage(
                "give --input or all of --n, --p, --p-neg".into(),
            ))
        }
    };
    if args.max_steps == 0 {
        return Err(Failure::Usage("--max-steps must be positive".into()));
    }
    let opinions = || -> CliResult<OpinionVector> {
        match &args.opinions {
            Some(y) => {
                let y = OpinionVector::new(y.clone())?;
                if y.len() != x0.n() {
                    return Err(Failure::Usage(format!(
                        "--opinions has {} values for {} nodes",
                        y.len(),
                        x0.n()
                    )));
                }
                Ok(y)
            }
            None => Ok(OpinionVector::random(
                x0.n(),
                &mut stream_rng(args.seed, OPINION_STREAM),
            )),
        }
    };
    let sih = args.weights.sih()?;
    let (record, initial_h, symmetrization_steps, state0): (
        AbsorptionRecord,
        usize,
        Option<usize>,
        Option<SiohState>,
    ) = match args.engine {
        SimEngine::Sih => (
            run_sih(&x0, &sih, args.seed, args.max_steps, args.log.is_some())?,
            potential_h(&x0),
            None,
            None,
        ),
        SimEngine::Constructive => {
            let seq = constructive_sih_sequence(&x0);
            (
                seq.record,
                potential_h(&x0),
                Some(seq.symmetrization_steps),
                None,
            )
        }
        SimEngine::Sioh => {
            let s = SiohState::new(x0.clone(), opinions()?)?;
            let rec = run_sioh(
                &s,
                &args.weights.sioh()?,
                args.seed,
                args.max_steps,
                args.log.is_some(),
            )?;
            (rec, potential_h_xy(&s), None, Some(s))
        }
        SimEngine::ConstructiveSioh => {
            let s = SiohState::new(x0.clone(), opinions()?)?;
            let seq = constructive_sioh_sequence(&s);
            (
                seq.record,
                potential_h_xy(&s),
                Some(seq.symmetrization_steps),
                Some(s),
            )
        }
    };
    let (final_h, balanced) = match &record.final_opinions {
        Some(y) => {
            let fin = SiohState::new(record.final_state.clone(), y.clone())?;
            (potential_h_xy(&fin), sioh_aligned(&fin))
        }
        None => (
            potential_h(&record.final_state),
            triad_balanced(&record.final_state),
        ),
    };
    if let Some(path) = &args.out {
        write_file(path, &write_edge_list(&record.final_state))?;
    }
    if let Some(path) = &args.log {
        let mut text = String::new();
        for e in record.event_log.as_deref().unwrap_or(&[]) {
            text.push_str(&e.to_json_line());
            text.push('\n');
        }
        write_file(path, &text)?;
    }
    let engine = args
        .engine
        .to_possible_value()
        .expect("named")
        .get_name()
        .to_string();
    let report = SimulateReport::new(
        engine,
        args.seed,
        &x0,
        state0.as_ref().map(|s| &s.y),
        &record,
        initial_h,
        final_h,
        balanced,
        symmetrization_steps,
    );
    emit_json(&report, None)?;
    if record.absorbed {
        Ok(())
    } else {
        Err(Failure::MaxSteps)
    }
}

fn experiment(args: ExperimentArgs) -> CliResult<()> {
    if args.trials < 2 {
        return Err(Failure::Usage(format!(
            "--trials must be at least 2, got {}",
            args.trials
        )));
    }
    if args.threads == Some(0) {
        return Err(Failure::Usage(
            "BALANCE_LAB_THREADS must be positive".into(),
        ));
    }
    let config = StudyConfig {
        n: args.n,
        trials: args.trials,
        master_seed: args.seed,
        max_steps: args.max_steps,
        engine: match args.engine {
            StudyEngine::Sih => Engine::Sih,
            StudyEngine::Sioh => Engine::Sioh,
        },
        sih: args.weights.sih()?,
        sioh: args.weights.sioh()?,
        threads: args.threads,
    };
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Failure::Usage(format!("this study needs {flag}")))
    };
    let outcome = match args.study {
        StudyKind::C0 => run_study_c0(&config, need(args.p, "--p")?)?,
        StudyKind::Density => run_study_density(&config, need(args.p_neg, "--p-neg")?)?,
        StudyKind::Triads => {
            run_study_triads(&config, need(args.p, "--p")?, need(args.p_neg, "--p-neg")?)?
        }
    };
    export_csv(&outcome.records, &args.out)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", args.out.display())))?;
    let summary = outcome.summary(&config);
    if let Some(path) = &args.summary {
        emit_json(&summary, Some(path))?;
    }
    emit_json(&summary, None)
}
