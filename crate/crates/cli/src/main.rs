use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use toeplitz_pcg::{EvenRule, RhsKind};
use toeplitz_pcg_cli::config::DEFAULT_SEED;
use toeplitz_pcg_cli::{
    emit_svg, run_equidist, run_fig1, run_fig2, run_solve, run_spectrum, ExperimentConfig,
    IndefinitePolicy, PlotKind, PreconditionerKind, SymbolKind,
};

#[derive(Parser, Debug)]
#[command(
    name = "toeplitz-pcg",
    version,
    about = "Strang-preconditioned CG experiments on random Hermitian Toeplitz systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iteration counts per trial at one dimension.
    Fig1 {
        #[arg(long, default_value_t = 65)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Average iteration counts over a ladder n = 2m + 1.
    Fig2 {
        #[arg(long, default_value_t = 10)]
        m_min: usize,
        #[arg(long, default_value_t = 120)]
        m_max: usize,
        #[arg(long, default_value_t = 1)]
        m_step: usize,
        /// Explicit list of m values; overrides the range.
        #[arg(long, value_delimiter = ',')]
        m_values: Option<Vec<usize>>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Eigenvalues of the preconditioned matrix for each trial.
    Spectrum {
        #[arg(long, default_value_t = 65)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        trials: usize,
        /// Radius of the cluster around 1.
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Treat the preconditioned matrix as general and emit complex eigenvalues.
        #[arg(long)]
        complex: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Residual history of a single solve.
    Solve {
        #[arg(long, default_value_t = 65)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        trial: u64,
        #[arg(long, value_enum, default_value_t = PrecondArg::Strang)]
        precond: PrecondArg,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Equidistribution discrepancies over a ladder of dimensions.
    Equidist {
        #[arg(long, value_delimiter = ',', default_values_t = [33usize, 65, 129, 257])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        trial: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = EvenRuleArg::Average)]
    even_rule: EvenRuleArg,
    #[arg(long, value_enum, default_value_t = SymbolArg::RandomPhase)]
    symbol: SymbolArg,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Defaults to 4n.
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, value_enum, default_value_t = RhsArg::Ones)]
    rhs: RhsArg,
    /// What to do with realizations that are not positive definite.
    #[arg(long, value_enum, default_value_t = IndefiniteArg::Solve)]
    indefinite: IndefiniteArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EvenRuleArg {
    Zero,
    Average,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum RhsArg {
    Ones,
    SeededRandom,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum IndefiniteArg {
    Solve,
    Skip,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SymbolArg {
    RandomPhase,
    ZeroPhase,
    Circulant,
    Constant,
    Cosine,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PrecondArg {
    Strang,
    None,
}

impl Common {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        cfg.seed = self.seed;
        cfg.even_rule = match self.even_rule {
            EvenRuleArg::Zero => EvenRule::Zero,
            EvenRuleArg::Average => EvenRule::Average,
        };
        cfg.symbol = match self.symbol {
            SymbolArg::RandomPhase => SymbolKind::RandomPhase,
            SymbolArg::ZeroPhase => SymbolKind::ZeroPhase,
            SymbolArg::Circulant => SymbolKind::Circulant,
            SymbolArg::Constant => SymbolKind::Constant,
            SymbolArg::Cosine => SymbolKind::Cosine,
        };
    }
}

impl SolverArgs {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        cfg.tol = self.tol;
        cfg.max_iter = self.max_iter;
        cfg.rhs = match self.rhs {
            RhsArg::Ones => RhsKind::Ones,
            RhsArg::SeededRandom => RhsKind::SeededRandom,
        };
        cfg.indefinite = match self.indefinite {
            IndefiniteArg::Solve => IndefinitePolicy::Solve,
            IndefiniteArg::Skip => IndefinitePolicy::Skip,
        };
    }
}

fn write_outputs(common: &Common, csv: &str, svg: Option<Result<String>>) -> Result<()> {
    match &common.out {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => io::stdout().lock().write_all(csv.as_bytes())?,
    }
    if let (Some(path), Some(svg)) = (&common.svg, svg) {
        fs::write(path, svg?).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = ExperimentConfig::default();
    match cli.command {
        Command::Fig1 {
            n,
            trials,
            common,
            solver,
        } => {
            cfg.n = vec![n];
            cfg.trials = trials;
            common.apply(&mut cfg);
            solver.apply(&mut cfg);
            let out = run_fig1(&cfg)?;
            for t in &out.trials {
                for w in &t.warnings {
                    eprintln!("warning: trial {}: {w}", t.trial);
                }
            }
            eprintln!("{}", out.summary());
            let svg = common.svg.as_ref().map(|_| {
                emit_svg(
                    &out.series(),
                    PlotKind::Line,
                    &format!("Iterations, n = {n}"),
                )
            });
            write_outputs(&common, &out.to_csv(), svg)
        }
        Command::Fig2 {
            m_min,
            m_max,
            m_step,
            m_values,
            trials,
            common,
            solver,
        } => {
            cfg.m_values = match m_values {
                Some(v) => v,
                None => {
                    anyhow::ensure!(m_step >= 1, "m-step must be positive");
                    anyhow::ensure!(m_min <= m_max, "m-min {m_min} exceeds m-max {m_max}");
                    (m_min..=m_max).step_by(m_step).collect()
                }
            };
            cfg.trials = trials;
            common.apply(&mut cfg);
            solver.apply(&mut cfg);
            let out = run_fig2(&cfg)?;
            eprint!("{}", out.summary());
            let svg = common
                .svg
                .as_ref()
                .map(|_| emit_svg(&out.series(), PlotKind::Line, "Average iterations"));
            write_outputs(&common, &out.to_csv(), svg)
        }
        Command::Spectrum {
            n,
            trials,
            epsilon,
            complex,
            common,
        } => {
            cfg.n = vec![n];
            cfg.trials = trials;
            cfg.epsilon = epsilon;
            cfg.complex = complex;
            common.apply(&mut cfg);
            let out = run_spectrum(&cfg)?;
            eprint!("{}", out.summary());
            let svg = common.svg.as_ref().map(|_| {
                emit_svg(
                    &out.series(),
                    PlotKind::Scatter,
                    &format!("Spectrum, n = {n}"),
                )
            });
            write_outputs(&common, &out.to_csv(), svg)
        }
        Command::Solve {
            n,
            trial,
            precond,
            common,
            solver,
        } => {
            cfg.n = vec![n];
            cfg.trial = trial;
            cfg.preconditioner = match precond {
                PrecondArg::Strang => PreconditionerKind::Strang,
                PrecondArg::None => PreconditionerKind::None,
            };
            common.apply(&mut cfg);
            solver.apply(&mut cfg);
            let out = run_solve(&cfg)?;
            eprintln!("{}", out.summary());
            let svg = common
                .svg
                .as_ref()
                .map(|_| emit_svg(&out.series(), PlotKind::Line, "Residual history"));
            write_outputs(&common, &out.to_csv(), svg)
        }
        Command::Equidist { n, trial, common } => {
            cfg.n = n;
            cfg.trial = trial;
            common.apply(&mut cfg);
            let out = run_equidist(&cfg)?;
            let svg = common.svg.as_ref().map(|_| {
                emit_svg(
                    &out.series(),
                    PlotKind::Line,
                    "Equidistribution discrepancy",
                )
            });
            write_outputs(&common, &out.to_csv(), svg)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
