use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};

use seqsteer::steering::CorrSign;
use seqsteer::MeasurementSet;
use seqsteer_cli::{find_violation_window_on_set, run_sweep, write_csv, SweepMode, SweepSpec};

/// Sweeps the sharpness of the first observers on each side of a singlet
/// pair, reports the steering parameters of all four observer pairs as CSV,
/// and can bisect the sharpness window where every pair violates its
/// steering bound simultaneously.
#[derive(Debug, Parser)]
#[command(name = "seqsteer", version)]
struct Args {
    /// Sweep shape: both sharpnesses equal, or eta_B pinned via --eta-b.
    #[arg(long, value_enum, default_value_t = ModeArg::Symmetric)]
    mode: ModeArg,

    /// Setting count to run (repeatable). Supported: 2, 3, 4, 6, 10.
    /// Defaults to 3 when neither --n nor --set-file is given.
    #[arg(long = "n", value_name = "N")]
    n: Vec<usize>,

    /// Lower end of the sharpness grid.
    #[arg(long, default_value_t = 0.0)]
    eta_start: f64,

    /// Upper end of the sharpness grid.
    #[arg(long, default_value_t = 1.0)]
    eta_end: f64,

    /// Number of grid points.
    #[arg(long, default_value_t = 201)]
    points: usize,

    /// Bob's pinned sharpness (fixed-b mode only).
    #[arg(long)]
    eta_b: Option<f64>,

    /// CSV output path; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report the symmetric-sharpness window on which all four observer
    /// pairs violate the bound, instead of sweeping.
    #[arg(long)]
    window: bool,

    /// Bisection tolerance for --window.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,

    /// Measurement directions from a file (one "x y z" triple per line)
    /// instead of the built-in sets.
    #[arg(long, value_name = "PATH")]
    set_file: Option<PathBuf>,

    /// Print the measurement set as a plain-text table and exit.
    #[arg(long)]
    dump_set: bool,

    /// Report the raw outcome-product average, which is negative on the
    /// anticorrelated singlet, instead of flipping its sign.
    #[arg(long)]
    no_corr_sign: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Symmetric,
    FixedB,
}

enum CliError {
    /// Invalid arguments or input data; exit code 1.
    Args(String),
    /// Filesystem or stream failure; exit code 2.
    Io(String),
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Args(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(args: Args) -> Result<(), CliError> {
    let sign = if args.no_corr_sign {
        CorrSign::Raw
    } else {
        CorrSign::Anticorrelation
    };

    if args.set_file.is_some() && !args.n.is_empty() {
        return Err(CliError::Args(
            "--set-file and --n are mutually exclusive".into(),
        ));
    }
    let custom_set = match &args.set_file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let set = MeasurementSet::parse_table(&text)
                .map_err(|e| CliError::Args(format!("{}: {e}", path.display())))?;
            if !set.is_spherical_two_design() {
                eprintln!(
                    "warning: {} is not a spherical 2-design; steering parameters will depend on the set geometry",
                    path.display()
                );
            }
            Some(set)
        }
        None => None,
    };
    let n_list = if custom_set.is_some() {
        Vec::new()
    } else if args.n.is_empty() {
        vec![3]
    } else {
        args.n.clone()
    };

    let mode = match (args.mode, args.eta_b) {
        (ModeArg::Symmetric, None) => SweepMode::Symmetric,
        (ModeArg::Symmetric, Some(_)) => {
            return Err(CliError::Args(
                "--eta-b only applies to --mode fixed-b".into(),
            ))
        }
        (ModeArg::FixedB, Some(eta_b)) => SweepMode::FixedB { eta_b },
        (ModeArg::FixedB, None) => {
            return Err(CliError::Args("--mode fixed-b requires --eta-b".into()))
        }
    };

    if args.dump_set {
        return dump_set(&args, custom_set.as_ref(), &n_list);
    }

    // Named sets evaluated in order; a custom set runs as a single block.
    let sets: Vec<(Option<usize>, MeasurementSet)> = match &custom_set {
        Some(set) => vec![(None, set.clone())],
        None => n_list
            .iter()
            .map(|&n| {
                MeasurementSet::platonic(n)
                    .map(|set| (Some(n), set))
                    .map_err(|e| CliError::Args(e.to_string()))
            })
            .collect::<Result<_, _>>()?,
    };

    if args.window {
        for (label, set) in &sets {
            let window = find_violation_window_on_set(set, sign, args.tol)
                .map_err(|e| CliError::Args(e.to_string()))?;
            let name = match label {
                Some(n) => format!("n={n}"),
                None => format!("set ({} directions)", set.len()),
            };
            match window {
                Some((lo, hi)) => {
                    println!("{name}: all four pairs violate for eta in [{lo:.9}, {hi:.9}]")
                }
                None => println!("{name}: no simultaneous violation window"),
            }
        }
        if args.out.is_none() {
            return Ok(());
        }
    }

    let spec = SweepSpec {
        mode,
        n_list,
        eta_start: args.eta_start,
        eta_end: args.eta_end,
        points: args.points,
        sign,
        custom_set,
    };
    spec.validate().map_err(|e| CliError::Args(e.to_string()))?;
    let rows = run_sweep(&spec).map_err(|e| CliError::Args(e.to_string()))?;

    match &args.out {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut writer = io::BufWriter::new(file);
            write_csv(&mut writer, &rows)
                .and_then(|()| writer.flush())
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_csv(&mut lock, &rows).map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn dump_set(
    args: &Args,
    custom_set: Option<&MeasurementSet>,
    n_list: &[usize],
) -> Result<(), CliError> {
    let set = match custom_set {
        Some(set) => set.clone(),
        None => {
            if n_list.len() != 1 {
                return Err(CliError::Args(
                    "--dump-set needs exactly one set: a single --n or a --set-file".into(),
                ));
            }
            MeasurementSet::platonic(n_list[0]).map_err(|e| CliError::Args(e.to_string()))?
        }
    };
    let table = set.to_table();
    match &args.out {
        Some(path) => {
            fs::write(path, table).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{table}");
            Ok(())
        }
    }
}
