//! `cohctl`: run catalog sweeps, audit channel files and run the built-in
//! verification suite.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};

use cohinfo::chanfile::{self, FileError};
use cohinfo::cohinfo::coherent_information;
use cohinfo::qstate::DensityMatrix;
use cohinfo::superop::{check_cp_tp, Superoperator};
use cohinfo::sweep::{format_sig, run_scenario, Scenario, SweepError, SweepRequest, DEFAULT_STEPS};
use cohinfo::verify;

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_IO: u8 = 4;

/// Tolerance for auditing user-supplied channels.
const CHECK_TOL: f64 = 1e-9;

struct Failure {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> Failure {
    Failure {
        code,
        msg: msg.to_string(),
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        let code = match e {
            SweepError::Usage(_) => EXIT_USAGE,
            SweepError::Domain(_) => EXIT_DOMAIN,
            SweepError::Io { .. } => EXIT_IO,
        };
        fail(code, e)
    }
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        let code = match e {
            FileError::Parse { .. } => EXIT_USAGE,
            FileError::Io { .. } => EXIT_IO,
        };
        fail(code, e)
    }
}

fn common_run_args() -> Vec<Arg> {
    vec![
        Arg::new("sweep")
            .long("sweep")
            .value_name("NAME=MIN:MAX[:COUNT]")
            .action(ArgAction::Append)
            .global(true)
            .help_heading("Sweep")
            .help("Sweep a parameter (at most two axes in total)"),
        Arg::new("steps")
            .long("steps")
            .value_name("N")
            .value_parser(value_parser!(usize))
            .global(true)
            .help_heading("Sweep")
            .help(format!("Points per axis [default: {DEFAULT_STEPS}]")),
        Arg::new("out")
            .long("out")
            .value_name("PATH")
            .value_parser(value_parser!(PathBuf))
            .global(true)
            .help_heading("Sweep")
            .help("Write CSV here instead of stdout"),
        Arg::new("spec")
            .long("spec")
            .value_name("FILE")
            .value_parser(value_parser!(PathBuf))
            .global(true)
            .help_heading("Sweep")
            .help("Read a sweep from key = value lines; flags override it"),
        Arg::new("threads")
            .long("threads")
            .value_name("N")
            .value_parser(value_parser!(usize))
            .global(true)
            .help_heading("Sweep")
            .help("Worker threads for the sweep"),
    ]
}

fn cli() -> Command {
    let mut run = Command::new("run")
        .about("Evaluate a catalog channel over a parameter grid and emit CSV")
        .args(common_run_args());
    for sc in Scenario::ALL {
        let mut sub = Command::new(sc.name())
            .about(sc.about())
            .allow_negative_numbers(true);
        for p in sc.params() {
            let range = match p.axis {
                Some((lo, hi)) => format!(" [default: swept over {lo}..{hi}]"),
                None => format!(" [default: {}]", p.default),
            };
            sub = sub.arg(
                Arg::new(p.name)
                    .long(p.name)
                    .value_name("VALUE")
                    .value_parser(value_parser!(f64))
                    .allow_negative_numbers(true)
                    .help(format!("{}{range}", p.help)),
            );
        }
        run = run.subcommand(sub);
    }
    Command::new("cohctl")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Coherent information of quantum channels")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(run)
        .subcommand(Command::new("verify").about("Run the built-in verification suite"))
        .subcommand(
            Command::new("check")
                .about("Audit a channel file for complete positivity and trace preservation")
                .arg(
                    Arg::new("file")
                        .required(true)
                        .value_parser(value_parser!(PathBuf)),
                )
                .arg(
                    Arg::new("input")
                        .long("input")
                        .value_name("FILE")
                        .value_parser(value_parser!(PathBuf))
                        .help("Density matrix file; prints the coherent information report"),
                ),
        )
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| fail(EXIT_IO, e)),
    }
}

fn cmd_run(m: &ArgMatches) -> Result<(), Failure> {
    let mut req = SweepRequest::default();
    if let Some(path) = m.get_one::<PathBuf>("spec") {
        let text = chanfile::read_text(path)?;
        req = SweepRequest::parse_spec(&text)?;
    }
    let mut flags = SweepRequest::default();
    let sub = match m.subcommand() {
        Some((name, sub)) => {
            flags.scenario = Some(name.to_string());
            let sc = Scenario::from_name(name).expect("registered scenario");
            for p in sc.params() {
                if let Some(&v) = sub.get_one::<f64>(p.name) {
                    flags.fixed.insert(p.name.to_string(), v);
                }
            }
            sub
        }
        None => m,
    };
    flags.axes = sub
        .get_many::<String>("sweep")
        .map(|v| v.cloned().collect())
        .unwrap_or_default();
    flags.steps = sub.get_one::<usize>("steps").copied();
    flags.out = sub.get_one::<PathBuf>("out").cloned();
    let threads = sub.get_one::<usize>("threads").copied();
    let spec = req.merge(flags).resolve()?;
    let csv = run_scenario(&spec, threads)?;
    write_output(spec.out.as_deref(), &csv)
}

fn cmd_verify() -> Result<(), Failure> {
    let report = verify::run();
    write_output(None, &report.render())?;
    if report.all_pass() {
        Ok(())
    } else {
        Err(fail(EXIT_VERIFY, "verification failed"))
    }
}

fn cmd_check(m: &ArgMatches) -> Result<(), Failure> {
    let path = m.get_one::<PathBuf>("file").expect("required");
    let file = chanfile::parse_channel(&chanfile::read_text(path)?)
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let s = Superoperator::from_blocks(file.dim_in, file.dim_out, file.blocks)
        .map_err(|e| fail(EXIT_DOMAIN, e))?;
    let r = check_cp_tp(&s, CHECK_TOL);
    let mut out = format!(
        "dims {} {}\ncp {}\ntp {}\nmin_choi_eig {}\nmax_trace_dev {}\nmax_hermiticity_dev {}\n",
        s.dim_in(),
        s.dim_out(),
        r.cp,
        r.tp,
        format_sig(r.min_choi_eig),
        format_sig(r.max_trace_dev),
        format_sig(r.max_hermiticity_dev)
    );
    let physical = r.cp && r.tp;
    if let Some(input) = m.get_one::<PathBuf>("input") {
        let mat = chanfile::parse_matrix(&chanfile::read_text(input)?)
            .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", input.display())))?;
        let rho = DensityMatrix::new(mat)
            .map_err(|e| fail(EXIT_DOMAIN, format!("{}: {e}", input.display())))?;
        if physical {
            let c = coherent_information(&s, &rho).map_err(|e| fail(EXIT_DOMAIN, e))?;
            let list = |v: &[f64]| {
                v.iter()
                    .map(|&x| format_sig(x))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            for (key, v) in [
                ("s_in", c.s_in),
                ("s_out", c.s_out),
                ("s_e", c.s_e),
                ("i_c", c.i_c),
                ("raw_ic", c.raw_ic),
            ] {
                out.push_str(&format!("{key} {}\n", format_sig(v)));
            }
            out.push_str(&format!(
                "eig_out {}\neig_alpha {}\n",
                list(&c.eig_out),
                list(&c.eig_alpha)
            ));
        } else {
            out.push_str("coherent information skipped: channel is not CP/TP\n");
        }
    }
    write_output(None, &out)?;
    if physical {
        Ok(())
    } else {
        Err(fail(
            EXIT_DOMAIN,
            "channel is not completely positive and trace preserving",
        ))
    }
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match matches.subcommand() {
        Some(("run", m)) => cmd_run(m),
        Some(("verify", _)) => cmd_verify(),
        Some(("check", m)) => cmd_check(m),
        _ => unreachable!("subcommand required"),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cohctl: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
