use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qkd_collective::attack::{evolve, mdi_leak_bound, AttackParams};
use qkd_collective::entangled::{attack_on_bell, chsh_value};
use qkd_collective::keyrate::{key_rate, threshold, ProofVariant};
use qkd_collective::oracle::{verify_grid_perturbed, DEFAULT_GRID};
use qkd_collective::output::{Cell, Table};
use qkd_collective::usd::{chi_total, sweep_alpha};

/// Probability offset applied by `oracle-check --inject-error`.
const INJECTED_ERROR: f64 = 1e-6;
const ORACLE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Verification(String),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl From<qkd_collective::Error> for CliError {
    fn from(e: qkd_collective::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "qkd-collective", version, about = "Collective-attack leakage, key rates and thresholds for BB84-type QKD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Leakage χ as a function of the basis rotation α
    SweepAlpha {
        #[command(flatten)]
        attack: AttackSpec,
        #[arg(long, default_value_t = 257)]
        samples: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Largest tolerable BER for a proof variant
    Threshold {
        #[arg(long)]
        proof: ProofVariant,
    },
    /// Key rate at a given BER, for one or all proof variants
    Keyrate {
        #[arg(long)]
        pe: f64,
        #[arg(long)]
        proof: Option<ProofVariant>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Full attack summary for one parameter point
    AttackReport {
        #[arg(long, value_enum, default_value_t = Protocol::Bb84)]
        protocol: Protocol,
        #[command(flatten)]
        attack: AttackSpec,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long = "pe-a")]
        pe_a: Option<f64>,
        #[arg(long = "pe-b")]
        pe_b: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare closed forms against the brute-force unitary simulation
    OracleCheck {
        #[arg(long, default_value_t = DEFAULT_GRID.0)]
        alpha_steps: usize,
        #[arg(long, default_value_t = DEFAULT_GRID.1)]
        c_steps: usize,
        #[arg(long, default_value_t = DEFAULT_GRID.2)]
        theta_steps: usize,
        /// Perturb the oracle probabilities so the check must fail
        #[arg(long)]
        inject_error: bool,
    },
}

#[derive(Args)]
struct AttackSpec {
    /// Bit-error rate; implies θ = 0 and c = 1 − 4 p_e
    #[arg(long)]
    pe: Option<f64>,
    /// Ancilla overlap c; overrides --pe
    #[arg(long)]
    overlap: Option<f64>,
    #[arg(long, requires = "overlap", default_value_t = 0.0)]
    theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Protocol {
    Bb84,
    Mdi,
    Di,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, table: &Table) -> Result<(), CliError> {
        let mut w: Box<dyn Write> = match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(io::stdout().lock()),
        };
        match self.format {
            Format::Csv => table.write_csv(&mut w)?,
            Format::Json => table.write_json(&mut w)?,
        }
        w.flush()?;
        Ok(())
    }
}

enum Spec {
    Ber(f64),
    Overlap(f64, f64),
}

impl AttackSpec {
    fn resolve(&self) -> Result<Spec, CliError> {
        match (self.overlap, self.pe) {
            (Some(c), _) => Ok(Spec::Overlap(c, self.theta)),
            (None, Some(p)) => Ok(Spec::Ber(p)),
            (None, None) => Err(CliError::Invalid("an attack needs --pe or --overlap".into())),
        }
    }

    fn params(&self, alpha: f64) -> Result<AttackParams, CliError> {
        Ok(match self.resolve()? {
            Spec::Ber(p) => AttackParams::from_ber(alpha, p)?,
            Spec::Overlap(c, theta) => AttackParams::new(alpha, c, theta)?,
        })
    }
}

fn sweep(attack: &AttackSpec, samples: usize) -> Result<Table, CliError> {
    let mut table = Table::new(&["alpha", "chi_z", "chi_x", "chi_total"]);
    match attack.resolve()? {
        Spec::Ber(p) => {
            for r in sweep_alpha(p, samples)? {
                table.push(vec![r.alpha.into(), r.chi_z.into(), r.chi_x.into(), r.chi_total.into()]);
            }
        }
        Spec::Overlap(..) => {
            if samples < 2 {
                return Err(CliError::Invalid("--samples must be at least 2".into()));
            }
            for i in 0..samples {
                let alpha = if i + 1 == samples { FRAC_PI_2 } else { FRAC_PI_2 * i as f64 / (samples - 1) as f64 };
                let r = chi_total(&attack.params(alpha)?);
                table.push(vec![alpha.into(), r.chi_z.into(), r.chi_x.into(), r.chi_total.into()]);
            }
        }
    }
    Ok(table)
}

fn keyrate_table(pe: f64, proof: Option<ProofVariant>) -> Result<Table, CliError> {
    let mut table = Table::new(&["p_e", "proof", "mutual_info", "leakage", "rate", "secure", "chsh"]);
    let variants = proof.map_or(ProofVariant::ALL.to_vec(), |v| vec![v]);
    let s = chsh_value(pe)?;
    for v in variants {
        let r = key_rate(pe, v)?;
        table.push(vec![
            pe.into(),
            v.name().into(),
            r.mutual_info.into(),
            r.leakage.into(),
            r.rate.into(),
            r.secure.into(),
            s.into(),
        ]);
    }
    Ok(table)
}

fn rate_fields(p_e: f64) -> Result<Vec<(&'static str, Cell)>, CliError> {
    let pur = key_rate(p_e, ProofVariant::Purification)?;
    let col = key_rate(p_e, ProofVariant::Collective)?;
    let chsh = key_rate(p_e, ProofVariant::Chsh)?;
    Ok(vec![
        ("rate_purification", pur.rate.into()),
        ("rate_collective", col.rate.into()),
        ("rate_chsh", chsh.rate.into()),
        ("secure_purification", pur.secure.into()),
        ("secure_collective", col.secure.into()),
        ("secure_chsh", chsh.secure.into()),
    ])
}

fn attack_report(
    protocol: Protocol,
    attack: &AttackSpec,
    alpha: f64,
    pe_a: Option<f64>,
    pe_b: Option<f64>,
) -> Result<Table, CliError> {
    let mut fields: Vec<(&str, Cell)> = Vec::new();
    match protocol {
        Protocol::Bb84 => {
            let params = attack.params(alpha)?;
            let out = evolve(&params);
            let leak = chi_total(&params);
            let p = out.probs;
            fields.extend([
                ("protocol", "bb84".into()),
                ("alpha", params.alpha().into()),
                ("overlap_c", params.overlap_c().into()),
                ("theta", params.theta().into()),
                ("p00", p.p00.into()),
                ("p01", p.p01.into()),
                ("p10", p.p10.into()),
                ("p11", p.p11.into()),
                ("ppp", p.ppp.into()),
                ("ppm", p.ppm.into()),
                ("pmp", p.pmp.into()),
                ("pmm", p.pmm.into()),
                ("ber_z", out.ber_z.into()),
                ("ber_x", out.ber_x.into()),
                ("ber_total", out.ber_total.into()),
                ("guess_z_right", leak.guess_z.p_right.into()),
                ("guess_z_wrong", leak.guess_z.p_wrong.into()),
                ("guess_x_right", leak.guess_x.p_right.into()),
                ("guess_x_wrong", leak.guess_x.p_wrong.into()),
                ("chi_z", leak.chi_z.into()),
                ("chi_x", leak.chi_x.into()),
                ("chi_total", leak.chi_total.into()),
                ("holevo_standard_z", leak.holevo_standard_z.into()),
                ("holevo_standard_x", leak.holevo_standard_x.into()),
            ]);
            fields.extend(rate_fields(out.ber_total)?);
        }
        Protocol::Mdi => {
            let (Some(a), Some(b)) = (pe_a, pe_b) else {
                return Err(CliError::Invalid("mdi needs --pe-a and --pe-b".into()));
            };
            let leak = mdi_leak_bound(a, b)?;
            fields.extend([
                ("protocol", "mdi".into()),
                ("pe_a", a.into()),
                ("pe_b", b.into()),
                ("total_ber", leak.total_ber.into()),
                ("leak_bound", leak.leak_bound.into()),
            ]);
        }
        Protocol::Di => {
            // --pe fixes the pair BER, so each channel carries overlap √(1 − 4 p_e).
            let params = match attack.resolve()? {
                Spec::Ber(p) => {
                    if !(0.0..=0.25).contains(&p) {
                        return Err(CliError::Invalid(format!("p_e = {p} is outside [0, 0.25]")));
                    }
                    AttackParams::new(alpha, (1.0 - 4.0 * p).sqrt(), 0.0)?
                }
                Spec::Overlap(c, theta) => AttackParams::new(alpha, c, theta)?,
            };
            let joint = attack_on_bell(&params);
            let ber = joint.ber_total.clamp(0.0, 0.5);
            let r = key_rate(ber, ProofVariant::Chsh)?;
            fields.extend([
                ("protocol", "di".into()),
                ("alpha", params.alpha().into()),
                ("overlap_c", params.overlap_c().into()),
                ("theta", params.theta().into()),
                ("ber_z", joint.ber_z.into()),
                ("ber_x", joint.ber_x.into()),
                ("ber_total", joint.ber_total.into()),
                ("chsh", chsh_value(ber)?.into()),
                ("rate", r.rate.into()),
                ("secure", r.secure.into()),
            ]);
        }
    }
    Ok(Table::record(fields))
}

fn oracle_check(alpha: usize, c: usize, theta: usize, inject: bool) -> Result<(), CliError> {
    let perturbation = if inject { INJECTED_ERROR } else { 0.0 };
    let r = verify_grid_perturbed(alpha, c, theta, perturbation)?;
    println!("grid points: {}", r.grid_size);
    println!("max_prob_error: {:e}", r.max_prob_error);
    println!("max_state_error: {:e}", r.max_state_error);
    println!("max_completeness_error: {:e}", r.max_completeness_error);
    println!("max_bound_error: {:e}", r.max_bound_error);
    if r.passes(ORACLE_TOL) {
        println!("oracle check passed");
        Ok(())
    } else {
        let at = r
            .worst
            .map(|p| format!("alpha={:.6} c={:.6} theta={:.6}", p.alpha(), p.overlap_c(), p.theta()))
            .unwrap_or_default();
        Err(CliError::Verification(format!("oracle mismatch at {at}")))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::SweepAlpha { attack, samples, out } => out.emit(&sweep(&attack, samples)?),
        Command::Threshold { proof } => {
            println!("{:.6}", threshold(proof));
            Ok(())
        }
        Command::Keyrate { pe, proof, out } => out.emit(&keyrate_table(pe, proof)?),
        Command::AttackReport {
            protocol,
            attack,
            alpha,
            pe_a,
            pe_b,
            out,
        } => out.emit(&attack_report(protocol, &attack, alpha, pe_a, pe_b)?),
        Command::OracleCheck {
            alpha_steps,
            c_steps,
            theta_steps,
            inject_error,
        } => oracle_check(alpha_steps, c_steps, theta_steps, inject_error),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
