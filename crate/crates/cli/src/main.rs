// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use rand::Rng;
use serde::Serialize;

use modal_core::decoherence::{cross_term_report, generate_decohered_state, triorthogonal_check, DecoherenceModel};
use modal_core::envariance::{invariance_defect, row_sum_identity_defect, DegeneracyFrame, EnvariancePair};
use modal_core::hilbert::{HermitianOperator, PureState};
use modal_core::io::{
    read_observable, read_state, BornReport, CountEntry, CrossTermJson, DecompositionReport, EnvarianceReport, LatticeReport,
    SampleReport, StabilityReport, TriorthoReport,
};
use modal_core::lattice::{definite_lattice, modal_lattice, orthodox_lattice, DefiniteLattice};
use modal_core::measure::{born_measure, sample_counts};
use modal_core::random::{random_unitary, rng_from_seed};
use modal_core::schmidt::decompose;
use modal_core::stability::{degeneracy_sweep, Generator};
use modal_core::{CMatrix, Tolerances, C64};

use config::{OutputFormat, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "modal", version, about = "Modal-interpretation kernel for bipartite pure states")]
struct Cli {
    /// Report format; overrides `output_format` from the run configuration.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("route").args(["preferred", "modal", "orthodox"])))]
struct LatticeChoice {
    /// Preferred observable on the whole space.
    #[arg(long, value_name = "OBSFILE")]
    preferred: Option<PathBuf>,

    /// Spectral projectors of the factor-1 reduced operator (default).
    #[arg(long)]
    modal: bool,

    /// Preferred observable equal to the identity.
    #[arg(long)]
    orthodox: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Schmidt decomposition with degeneracy clusters.
    Decompose { state: PathBuf },

    /// Atoms of the definite lattice.
    Lattice {
        state: PathBuf,
        #[command(flatten)]
        choice: LatticeChoice,
    },

    /// Born weights of the lattice atoms.
    Born {
        state: PathBuf,
        #[command(flatten)]
        choice: LatticeChoice,
    },

    /// Seeded actualization counts over the modal atoms.
    Sample {
        state: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "OBSFILE")]
        preferred: Option<PathBuf>,
    },

    /// Random envariance trials on a flat state of dimension `dim`.
    Envariance {
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        seed: Option<u64>,
    },

    /// Cross terms of a branching state with imperfectly orthogonal
    /// environments.
    Decohere {
        #[arg(long)]
        branches: usize,
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        theta: f64,
        /// Observable on the system; defaults to the projector onto the
        /// uniform superposition of branch states.
        #[arg(long, value_name = "FILE")]
        observable: Option<PathBuf>,
    },

    /// Triorthogonal-form test for a three-factor state.
    Triortho { state: PathBuf },

    /// Leading Schmidt-subspace rotation against the weight gap.
    Stability {
        #[arg(long, value_delimiter = ',', required = true)]
        gaps: Vec<f64>,
        #[arg(long)]
        delta: f64,
        /// Use seeded random generators instead of Z⊗X.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 16)]
        trials: usize,
    },
}

/// Exit status classes.
enum Failure {
    Input(String),
    Contract(String),
}

impl From<modal_core::Error> for Failure {
    fn from(e: modal_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Context {
    tol: Tolerances,
    seed: u64,
    format: OutputFormat,
}

impl Context {
    fn emit<T: Serialize>(&self, report: &T, text: impl FnOnce(&T) -> String) {
        match self.format {
            OutputFormat::Json => println!("{}", serde_json::to_string(report).expect("reports serialize")),
            OutputFormat::Text => print!("{}", text(report)),
        }
    }

    fn state(&self, path: &Path) -> Result<PureState, Failure> {
        read_state(path, self.tol.norm_tol).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }

    fn observable(&self, path: &Path) -> Result<HermitianOperator, Failure> {
        read_observable(path, self.tol.herm_tol).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }

    fn lattice(&self, state: &PureState, choice: &LatticeChoice) -> Result<DefiniteLattice, Failure> {
        let lat = if let Some(path) = &choice.preferred {
            definite_lattice(state, &self.observable(path)?, &self.tol)?
        } else if choice.orthodox {
            orthodox_lattice(state, &self.tol)?
        } else {
            modal_lattice(state, &self.tol)?
        };
        let limit = self.tol.subspace_eq_tol;
        for (name, defect) in [
            ("orthogonality", lat.orthogonality_defect()),
            ("completeness", lat.completeness_defect()),
            ("commutativity", lat.commutator_defect()),
        ] {
            if !(defect <= limit) {
                return Err(Failure::Contract(format!("lattice {name} defect {defect:.3e} exceeds {limit:e}")));
            }
        }
        Ok(lat)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match RunConfig::from_env() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let ctx = Context { tol: config.tolerances, seed: config.seed, format: cli.format.unwrap_or(config.output_format) };
    match run(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Contract(msg)) => {
            eprintln!("contract violation: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(ctx: &Context, command: Command) -> Outcome {
    match command {
        Command::Decompose { state } => decompose_cmd(ctx, &state),
        Command::Lattice { state, choice } => {
            let lat = ctx.lattice(&ctx.state(&state)?, &choice)?;
            ctx.emit(&LatticeReport::from(&lat), lattice_text);
            Ok(())
        }
        Command::Born { state, choice } => {
            let psi = ctx.state(&state)?;
            let lat = ctx.lattice(&psi, &choice)?;
            let measure = born_measure(&psi, &lat)?;
            let total = measure.total();
            if (total - 1.0).abs() > ctx.tol.norm_tol {
                return Err(Failure::Contract(format!("Born weights sum to {total:.17}")));
            }
            ctx.emit(&BornReport::new(&lat, &measure), |r| {
                r.atoms.iter().map(|a| format!("{}\t{:?}\n", a.label, a.weight)).collect()
            });
            Ok(())
        }
        Command::Sample { state, n, seed, preferred } => {
            let psi = ctx.state(&state)?;
            let choice = LatticeChoice { modal: preferred.is_none(), preferred, orthodox: false };
            let lat = ctx.lattice(&psi, &choice)?;
            let measure = born_measure(&psi, &lat)?;
            let seed = seed.unwrap_or(ctx.seed);
            let counts = sample_counts(&measure, n, seed)?;
            let atoms = counts
                .iter()
                .enumerate()
                .map(|(k, &count)| CountEntry { label: lat.atom_name(k), weight: measure.atom_weights[k], count })
                .collect();
            ctx.emit(&SampleReport { n, seed, atoms }, |r| {
                let mut out = format!("n {}\nseed {}\n", r.n, r.seed);
                for a in &r.atoms {
                    let _ = writeln!(out, "{}\t{:?}\t{}", a.label, a.weight, a.count);
                }
                out
            });
            Ok(())
        }
        Command::Envariance { trials, dim, seed } => envariance_cmd(ctx, trials, dim, seed.unwrap_or(ctx.seed)),
        Command::Decohere { branches, qubits, theta, observable } => decohere_cmd(ctx, branches, qubits, theta, observable.as_deref()),
        Command::Triortho { state } => {
            let result = triorthogonal_check(&ctx.state(&state)?, &ctx.tol)?;
            ctx.emit(&TriorthoReport::from(result), |r| format!("{}\n", r.result));
            Ok(())
        }
        Command::Stability { gaps, delta, seed, trials } => {
            let (generator, name, trials) = match seed {
                Some(seed) => (Generator::Random { seed }, "random".to_string(), trials),
                None => (Generator::Fixed, "Z⊗X".to_string(), 1),
            };
            let points = degeneracy_sweep(&gaps, delta, generator, trials, &ctx.tol)?;
            ctx.emit(&StabilityReport::new(delta, name, trials, &points), |r| {
                let mut out = format!("# delta {:?} generator {} trials {}\n# gap\tangle\n", r.delta, r.generator, r.trials);
                for p in &r.points {
                    let _ = writeln!(out, "{:?}\t{:?}", p.gap, p.angle);
                }
                out
            });
            Ok(())
        }
    }
}

fn decompose_cmd(ctx: &Context, path: &Path) -> Outcome {
    let psi = ctx.state(path)?;
    let sd = decompose(&psi, &ctx.tol)?;
    let err = sd.reconstruction_error(&psi);
    if !(err <= ctx.tol.recon_tol) {
        return Err(Failure::Contract(format!("reconstruction error {err:.3e} exceeds {:e}", ctx.tol.recon_tol)));
    }
    ctx.emit(&DecompositionReport::from(&sd), |r| {
        let mut out = format!("dims {}x{}\nschmidt_rank {}\n# weight\tmultiplicity\n", r.left_dim, r.right_dim, r.schmidt_rank);
        for c in &r.clusters {
            let _ = writeln!(out, "{:?}\t{}", c.weight, c.multiplicity);
        }
        out
    });
    Ok(())
}

fn lattice_text(r: &LatticeReport) -> String {
    let mut out = format!("scope {}\nambient_dim {}\n# label\tkind\tdimension\tweight\n", r.scope, r.ambient_dim);
    for a in &r.atoms {
        let _ = writeln!(out, "{}\t{}\t{}\t{:?}", a.label, a.kind, a.dimension, a.weight);
    }
    out
}

fn envariance_cmd(ctx: &Context, trials: usize, dim: usize, seed: u64) -> Outcome {
    if dim == 0 {
        return Err(Failure::Input("--dim must be positive".into()));
    }
    let mut rng = rng_from_seed(seed);
    let frame = DegeneracyFrame::standard(dim);
    let (mut invariance, mut unitarity, mut row_sum) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let u1 = random_unitary(dim, &mut rng);
        let phases: Vec<f64> = (0..dim).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
        let pair = EnvariancePair::new(u1, phases, &ctx.tol)?;
        let omega = frame.omega(&pair.phases)?;
        invariance = invariance.max(invariance_defect(&omega, &frame, &pair, &ctx.tol)?);
        unitarity = unitarity.max(pair.unitarity_defect());
        row_sum = row_sum.max(row_sum_identity_defect(&pair.u1));
    }
    let contract = ctx.tol.env_tol;
    let pass = invariance <= contract && unitarity <= contract && row_sum <= contract;
    let report = EnvarianceReport {
        trials,
        dim,
        seed,
        max_invariance_defect: invariance,
        max_unitarity_defect: unitarity,
        max_row_sum_defect: row_sum,
        contract,
        pass,
    };
    ctx.emit(&report, |r| {
        format!(
            "trials {}\ndim {}\nseed {}\nmax_invariance_defect {:?}\nmax_unitarity_defect {:?}\nmax_row_sum_defect {:?}\ncontract {:?}\npass {}\n",
            r.trials, r.dim, r.seed, r.max_invariance_defect, r.max_unitarity_defect, r.max_row_sum_defect, r.contract, r.pass
        )
    });
    if pass {
        Ok(())
    } else {
        Err(Failure::Contract(format!(
            "envariance defects (invariance {invariance:.3e}, unitarity {unitarity:.3e}, row sum {row_sum:.3e}) exceed {contract:e}"
        )))
    }
}

fn decohere_cmd(ctx: &Context, branches: usize, qubits: usize, theta: f64, observable: Option<&Path>) -> Outcome {
    let model = DecoherenceModel::uniform(branches, qubits, theta);
    let psi = generate_decohered_state(&model, &ctx.tol)?;
    let a = match observable {
        Some(path) => ctx.observable(path)?,
        None => {
            let fill = C64::new(1.0 / branches as f64, 0.0);
            HermitianOperator::new(CMatrix::from_element(branches, branches, fill), ctx.tol.herm_tol)?
        }
    };
    let report = cross_term_report(&psi, &a, &model.branches(), &ctx.tol)?;
    let slack = report.overlap_bound - report.cross_magnitude;
    if !(slack >= -ctx.tol.recon_tol) {
        return Err(Failure::Contract(format!(
            "cross term {:.17e} exceeds the overlap bound {:.17e}",
            report.cross_magnitude, report.overlap_bound
        )));
    }
    ctx.emit(&CrossTermJson::from(&report), |r| {
        format!(
            "total_expectation {:?}\nbranch_expectation {:?}\ncross_magnitude {:?}\noverlap_bound {:?}\nadditivity_defect {:?}\n",
            r.total_expectation, r.branch_expectation, r.cross_magnitude, r.overlap_bound, r.additivity_defect
        )
    });
    Ok(())
}
