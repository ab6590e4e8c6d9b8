//! Command-line interface: generate Gaussian states, measure
//! entanglement, sweep thermal noise, verify state files, and
//! canonicalize to standard form.
//!
//! Exit codes (stable for scripting): 0 success, 2 domain error,
//! 3 unphysical state, 4 parse error, 5 optimization failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gaussent::nalgebra::DMatrix;
use gaussent::{
    alpha_entropy, alpha_eoe, apply_symplectic, direct_sum, entropy, geof, gluo,
    mixed3_standard_form, n_mode_eoe, sweep_nbar, thermal, three_mode_squeezer,
    two_mode_squeezer, vacuum, CovarianceMatrix, EntropyValue, GaussianState, GeofMode,
    OptimizationConfig, Partition, SweepScenario,
};
use gaussent_cli::statefile::{ParseError, StateFile};

const EXIT_DOMAIN: u8 = 2;
const EXIT_UNPHYSICAL: u8 = 3;
const EXIT_PARSE: u8 = 4;
const EXIT_OPTIMIZATION: u8 = 5;

/// Env var consulted for the default optimizer seed.
const SEED_ENV: &str = "GAUSSENT_SEED";

#[derive(Parser)]
#[command(
    name = "gaussent",
    version,
    about = "Multipartite Gaussian entanglement measures on covariance matrices"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a state file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Compute a measure of a state file and print it.
    Measure {
        measure: MeasureKind,
        state: PathBuf,
        /// Partition in text syntax, e.g. "1|23" (defaults to the finest).
        #[arg(long)]
        partition: Option<String>,
        /// Report nats instead of bits.
        #[arg(long)]
        nats: bool,
        #[command(flatten)]
        opt: OptFlags,
    },
    /// Sweep thermal input noise through the three-mode squeezer and
    /// write a CSV of GEoF values.
    Sweep {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        r3: f64,
        /// Comma-separated list of mean occupations.
        #[arg(long, value_delimiter = ',')]
        nbars: Vec<f64>,
        #[arg(long)]
        partition: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        opt: OptFlags,
    },
    /// Diagnose a state file: symmetry, physicality, purity, q-p form.
    Verify { state: PathBuf },
    /// Reduce a three-mode state to the mixed standard form.
    StandardForm {
        state: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Vacuum state.
    Vacuum {
        #[arg(long, default_value_t = 1)]
        modes: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Single-mode thermal state.
    Thermal {
        #[arg(long)]
        nbar: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Two-mode squeezer applied to thermal inputs.
    Tms {
        #[arg(long)]
        r: f64,
        /// Mean occupations of the two input modes.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.0])]
        nbar: Vec<f64>,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Three-mode squeezer applied to thermal inputs.
    S3 {
        #[arg(long)]
        r3: f64,
        /// Mean occupations of the three input modes.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.0, 0.0])]
        nbar: Vec<f64>,
        #[command(flatten)]
        common: GenCommon,
    },
    /// GHZ/W state (three-mode squeezer on vacuum).
    Ghzw {
        #[arg(long)]
        r3: f64,
        #[command(flatten)]
        common: GenCommon,
    },
}

#[derive(Args)]
struct GenCommon {
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    label: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureKind {
    Entropy,
    AlphaEntropy,
    Eoe,
    Neoe,
    Geof,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptMode {
    Auto,
    General12,
    Qp6,
}

#[derive(Args)]
struct OptFlags {
    /// Optimizer RNG seed (default: $GAUSSENT_SEED or 0).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 20_000)]
    max_evals: usize,
    #[arg(long, value_enum, default_value_t = OptMode::Auto)]
    opt_mode: OptMode,
}

impl OptFlags {
    fn config(&self) -> Result<OptimizationConfig, CliError> {
        let seed = match self.seed {
            Some(s) => s,
            None => match std::env::var(SEED_ENV) {
                Ok(text) => text.parse().map_err(|_| {
                    CliError::Domain(format!("{SEED_ENV} must be an unsigned integer"))
                })?,
                Err(_) => 0,
            },
        };
        Ok(OptimizationConfig {
            restarts: self.restarts,
            max_evals: self.max_evals,
            rng_seed: seed,
            mode: match self.opt_mode {
                OptMode::Auto => GeofMode::Auto,
                OptMode::General12 => GeofMode::General12,
                OptMode::Qp6 => GeofMode::Qp6,
            },
            ..OptimizationConfig::default()
        })
    }
}

enum CliError {
    Lib(gaussent::Error),
    Parse(ParseError),
    Domain(String),
    Io(String),
}

impl From<gaussent::Error> for CliError {
    fn from(e: gaussent::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

impl CliError {
    fn message(&self) -> String {
        match self {
            CliError::Lib(e) => e.to_string(),
            CliError::Parse(e) => e.to_string(),
            CliError::Domain(m) | CliError::Io(m) => m.clone(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Io(_) => EXIT_PARSE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Lib(e) => match e {
                gaussent::Error::Unphysical { .. } => EXIT_UNPHYSICAL,
                gaussent::Error::Numerical { .. }
                | gaussent::Error::OptimizationFailed { .. } => EXIT_OPTIMIZATION,
                _ => EXIT_DOMAIN,
            },
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Gen { kind } => cmd_gen(kind),
        Cmd::Measure {
            measure,
            state,
            partition,
            nats,
            opt,
        } => cmd_measure(measure, &state, partition.as_deref(), nats, &opt),
        Cmd::Sweep {
            scenario,
            r3,
            nbars,
            partition,
            out,
            opt,
        } => cmd_sweep(&scenario, r3, &nbars, partition.as_deref(), &out, &opt),
        Cmd::Verify { state } => cmd_verify(&state),
        Cmd::StandardForm { state, out } => cmd_standard_form(&state, &out),
    }
}

fn write_state(state: &GaussianState, common: &GenCommon) -> Result<(), CliError> {
    let file = StateFile::from_state(state, common.label.clone());
    file.write(&common.out)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", common.out.display())))?;
    println!("wrote {}", common.out.display());
    Ok(())
}

fn thermal_chain(nbars: &[f64]) -> Result<GaussianState, CliError> {
    let mut state = thermal(nbars[0])?;
    for &nb in &nbars[1..] {
        state = direct_sum(&state, &thermal(nb)?);
    }
    Ok(state)
}

fn cmd_gen(kind: GenKind) -> Result<(), CliError> {
    match kind {
        GenKind::Vacuum { modes, common } => {
            if modes == 0 {
                return Err(CliError::Domain("modes must be positive".into()));
            }
            write_state(&vacuum(modes), &common)
        }
        GenKind::Thermal { nbar, common } => write_state(&thermal(nbar)?, &common),
        GenKind::Tms { r, nbar, common } => {
            if nbar.len() != 2 {
                return Err(CliError::Domain(format!(
                    "tms takes 2 occupations, got {}",
                    nbar.len()
                )));
            }
            let state = apply_symplectic(&thermal_chain(&nbar)?, &two_mode_squeezer(r)?)?;
            write_state(&state, &common)
        }
        GenKind::S3 { r3, nbar, common } => {
            if nbar.len() != 3 {
                return Err(CliError::Domain(format!(
                    "s3 takes 3 occupations, got {}",
                    nbar.len()
                )));
            }
            let state = apply_symplectic(&thermal_chain(&nbar)?, &three_mode_squeezer(r3)?)?;
            write_state(&state, &common)
        }
        GenKind::Ghzw { r3, common } => {
            let state = apply_symplectic(&vacuum(3), &three_mode_squeezer(r3)?)?;
            write_state(&state, &common)
        }
    }
}

fn load_state(path: &Path) -> Result<GaussianState, CliError> {
    let file = StateFile::read(path)?;
    Ok(file.to_state()?)
}

fn parse_partition(text: Option<&str>, n_modes: usize) -> Result<Partition, CliError> {
    match text {
        Some(t) => {
            let p = Partition::parse(t)?;
            if p.n_modes() != n_modes {
                return Err(CliError::Domain(format!(
                    "partition covers {} modes but the state has {}",
                    p.n_modes(),
                    n_modes
                )));
            }
            Ok(p)
        }
        None => Ok(Partition::finest(n_modes)),
    }
}

fn print_value(v: EntropyValue, nats: bool) {
    // 12 significant digits
    if nats {
        println!("{:.11e}", v.nats());
    } else {
        println!("{:.11e}", v.bits());
    }
}

fn cmd_measure(
    measure: MeasureKind,
    state_path: &Path,
    partition: Option<&str>,
    nats: bool,
    opt: &OptFlags,
) -> Result<(), CliError> {
    let state = load_state(state_path)?;
    let alpha = parse_partition(partition, state.n_modes())?;
    match measure {
        MeasureKind::Entropy => {
            print_value(entropy(state.cov())?, nats);
        }
        MeasureKind::AlphaEntropy => {
            print_value(alpha_entropy(state.cov(), &alpha)?, nats);
        }
        MeasureKind::Eoe => {
            let v = alpha_eoe(state.cov(), &alpha).map_err(purity_hint)?;
            print_value(v, nats);
        }
        MeasureKind::Neoe => {
            let v = n_mode_eoe(state.cov()).map_err(purity_hint)?;
            print_value(v, nats);
        }
        MeasureKind::Geof => {
            let cfg = opt.config()?;
            let out = geof(&state, &alpha, &cfg)?;
            print_value(out.value, nats);
            println!("residual {:.3e}", out.residual);
            println!("converged {}", out.converged);
            println!("mode {}", out.mode_used);
            println!("evals {}", out.evals);
        }
    }
    Ok(())
}

fn purity_hint(e: gaussent::Error) -> CliError {
    match e {
        gaussent::Error::NotPure { deviation } => CliError::Domain(format!(
            "measure requires a pure state (max |nu - 1| = {deviation:.3e}); \
             use geof for mixed states"
        )),
        other => CliError::Lib(other),
    }
}

fn cmd_sweep(
    scenario: &str,
    r3: f64,
    nbars: &[f64],
    partition: Option<&str>,
    out: &Path,
    opt: &OptFlags,
) -> Result<(), CliError> {
    if nbars.is_empty() {
        return Err(CliError::Domain("nbars list is empty".into()));
    }
    let scenario: SweepScenario = scenario.parse()?;
    let alpha = parse_partition(partition, 3)?;
    let cfg = opt.config()?;
    let rows = sweep_nbar(scenario, r3, nbars, &alpha, &cfg)?;

    // Assemble the whole CSV before touching the filesystem, so failed
    // sweeps never leave a partial file behind.
    let mut csv = String::from("nbar,geof_bits,residual,evals,converged\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{:.12e},{:.3e},{},{}\n",
            row.nbar,
            row.value.bits(),
            row.residual,
            row.evals,
            row.converged
        ));
    }
    std::fs::write(out, csv)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
    println!("wrote {} ({} rows)", out.display(), rows.len());
    Ok(())
}

fn cmd_verify(path: &Path) -> Result<(), CliError> {
    let file = StateFile::read(path)?;
    println!("modes {}", file.n_modes);

    let asym = max_asymmetry(&file.covariance);
    let scale = file
        .covariance
        .iter()
        .fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let symmetric = asym <= gaussent::SYMMETRY_RTOL * scale;
    println!(
        "symmetric {} (max asymmetry {:.3e})",
        if symmetric { "yes" } else { "no" },
        asym
    );
    if !symmetric {
        return Err(CliError::Domain(
            "covariance matrix is not symmetric".into(),
        ));
    }

    let cov = CovarianceMatrix::new(file.covariance.clone())?;
    let phys = cov.validate_physical()?;
    println!(
        "physical {} (min nu {:.12})",
        if phys.is_physical() { "yes" } else { "no" },
        phys.min_nu()
    );
    let purity_dev = cov.purity_deviation()?;
    println!(
        "pure {} (max |nu-1| {:.3e})",
        if purity_dev <= gaussent::PURITY_TOL {
            "yes"
        } else {
            "no"
        },
        purity_dev
    );
    let qp = gaussent::is_qp(&cov);
    println!("qp {}", if qp { "yes" } else { "no" });

    if !phys.is_physical() {
        return Err(CliError::Lib(gaussent::Error::Unphysical {
            min_nu: phys.min_nu(),
        }));
    }
    Ok(())
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn cmd_standard_form(path: &Path, out: &Path) -> Result<(), CliError> {
    let in_file = StateFile::read(path)?;
    let state = in_file.to_state()?;
    if state.n_modes() != 3 {
        return Err(CliError::Lib(gaussent::Error::UnsupportedSize {
            n_modes: state.n_modes(),
        }));
    }
    let (sf, g) = mixed3_standard_form(state.cov())?;
    let transformed = apply_symplectic(&state, &gluo(&g))?;

    let zero_targets = [(0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 5)];
    let worst = zero_targets
        .iter()
        .fold(0.0_f64, |acc, &(i, j)| acc.max(sf.matrix()[(i, j)].abs()));
    println!("{g}");
    println!("zero-pattern residual {worst:.3e}");

    let label = Some(match in_file.label {
        Some(l) => format!("{l} (standard form)"),
        None => "standard form".to_string(),
    });
    let mut file = StateFile::from_state(&transformed, label);
    // use the canonical matrix (identical up to roundoff)
    file.covariance = sf.matrix().clone();
    file.write(out)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
    println!("wrote {}", out.display());
    Ok(())
}
