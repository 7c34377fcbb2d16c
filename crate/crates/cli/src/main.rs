//! `nodal-lab`: spectra, nodal decompositions and inequality verification
//! on model domains, with reproducible JSON/CSV reports.

mod claims;
mod report;

use clap::{Args, Parser, Subcommand};
use claims::{run_claim, VerifyConfig};
use nodal_lab_core::bounds::{chiti_constant, smith_sogge_alpha, sogge_delta};
use nodal_lab_core::error::Error;
use nodal_lab_core::specfun::{bessel_first_zero, unit_ball_volume, BesselOrder};
use nodal_lab_core::spectra::{
    analytic_spectrum, fd_spectrum, load_spectrum, save_spectrum, BoundaryCondition, DomainSpec,
    MaskShape,
};
use report::{sig12, write_report, Meta, Report, TOOL_VERSION};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nodal. lab",
    bin_name = "nodal-lab",
    version,
    about = "Eigenfunction nodal-domain laboratory: spectra, superlevel volumes, bound checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute (or load from cache) a spectrum and print its eigenvalue
    /// table as CSV
    Spectrum(SpectrumArgs),
    /// Run the verification pipeline for one claim id and write a report
    Verify(VerifyArgs),
    /// Print the constant and exponent table as CSV
    Constants(ConstantsArgs),
}

#[derive(Args, Clone, Serialize)]
struct DomainArgs {
    /// Domain kind: rect | box | torus | disk | sphere | lshape | rect-fd | disk-fd
    #[arg(long)]
    domain: Option<String>,
    /// First side length (rect/box/torus)
    #[arg(long)]
    a: Option<f64>,
    /// Second side length
    #[arg(long)]
    b: Option<f64>,
    /// Third side length (box / 3-torus)
    #[arg(long)]
    c: Option<f64>,
    /// Disk radius / L-shape arm
    #[arg(long)]
    radius: Option<f64>,
    /// Sampling resolution (points per unit length; latitude count on the
    /// sphere)
    #[arg(long)]
    res: Option<u32>,
    /// Grid spacing for finite-difference domains
    #[arg(long)]
    h: Option<f64>,
    /// Boundary condition for finite-difference domains: dirichlet | neumann
    #[arg(long)]
    bc: Option<String>,
}

impl DomainArgs {
    fn resolve(&self) -> Result<Option<DomainSpec>, Error> {
        let Some(kind) = &self.domain else {
            return Ok(None);
        };
        let bc = match self.bc.as_deref() {
            None | Some("dirichlet") => BoundaryCondition::Dirichlet,
            Some("neumann") => BoundaryCondition::Neumann,
            Some(other) => {
                return Err(Error::domain(
                    "cli",
                    format!("unknown boundary condition {other:?}"),
                ))
            }
        };
        let spec = match kind.as_str() {
            "rect" => DomainSpec::rectangle(self.a.unwrap_or(1.0), self.b.unwrap_or(1.0)),
            "box" => DomainSpec::box3(
                self.a.unwrap_or(1.0),
                self.b.unwrap_or(1.0),
                self.c.unwrap_or(1.0),
            ),
            "torus" => DomainSpec::torus2(
                self.a.unwrap_or(2.0 * std::f64::consts::PI),
                self.b.unwrap_or(2.0 * std::f64::consts::PI),
            ),
            "disk" => DomainSpec::disk(self.radius.unwrap_or(1.0)),
            "sphere" => DomainSpec::sphere(),
            "lshape" => DomainSpec::MaskedGrid {
                shape: MaskShape::LShape {
                    arm: self.radius.unwrap_or(1.0),
                },
                h: self.h.unwrap_or(1.0 / 32.0),
                bc,
            },
            "rect-fd" => DomainSpec::MaskedGrid {
                shape: MaskShape::Rectangle {
                    width: self.a.unwrap_or(1.0),
                    height: self.b.unwrap_or(1.0),
                },
                h: self.h.unwrap_or(1.0 / 32.0),
                bc,
            },
            "disk-fd" => DomainSpec::MaskedGrid {
                shape: MaskShape::Disk {
                    radius: self.radius.unwrap_or(1.0),
                },
                h: self.h.unwrap_or(1.0 / 32.0),
                bc,
            },
            other => {
                return Err(Error::domain(
                    "cli",
                    format!("unknown domain kind {other:?}"),
                ))
            }
        };
        Ok(Some(match self.res {
            Some(r) => spec.with_resolution(r),
            None => spec,
        }))
    }
}

#[derive(Args, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// Number of eigenpairs
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Spectrum cache directory
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// Claim id (see `--claim help` for the supported set)
    #[arg(long)]
    claim: String,
    #[command(flatten)]
    domain: DomainArgs,
    /// Number of eigenpairs / family size
    #[arg(long)]
    count: Option<usize>,
    /// Superlevel thresholds, comma separated, each in (0, 1)
    #[arg(long, default_value = "0.1,0.3,0.5,0.7,0.9", value_delimiter = ',')]
    deltas: Vec<f64>,
    /// Norm exponents, comma separated (claims pick sensible defaults when
    /// omitted)
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Output directory for report.json and CSV tables
    #[arg(long, default_value = "nodal-lab-out")]
    out: PathBuf,
    /// Spectrum cache directory
    #[arg(long)]
    cache: Option<PathBuf>,
    /// RNG seed; also pins report timestamps so reruns are byte-identical
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize)]
struct ConstantsArgs {
    /// Dimensions, comma separated
    #[arg(long, default_value = "2,3,4", value_delimiter = ',')]
    n: Vec<u32>,
    /// Norm exponents, comma separated
    #[arg(long, default_value = "1,2", value_delimiter = ',')]
    p: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Constants(args) => cmd_constants(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<ExitCode, Error> {
    let domain = args.domain.resolve()?.ok_or_else(|| {
        Error::domain("spectrum", "--domain is required (rect, box, torus, disk, sphere, lshape, rect-fd, disk-fd)")
    })?;
    let pairs = if let Some(dir) = &args.cache {
        match load_spectrum(dir, &domain, args.count) {
            Ok(Some(pairs)) => pairs,
            Ok(None) => {
                let pairs = compute_spectrum(&domain, args.count)?;
                save_spectrum(dir, &domain, &pairs)?;
                pairs
            }
            Err(Error::Cache(msg)) => {
                eprintln!("cache invalid, recomputing: {msg}");
                let pairs = compute_spectrum(&domain, args.count)?;
                save_spectrum(dir, &domain, &pairs)?;
                pairs
            }
            Err(e) => return Err(e),
        }
    } else {
        compute_spectrum(&domain, args.count)?
    };
    println!("index,lambda");
    for pair in &pairs {
        println!("{},{}", pair.index, sig12(pair.lambda));
    }
    Ok(ExitCode::SUCCESS)
}

fn compute_spectrum(
    domain: &DomainSpec,
    count: usize,
) -> Result<Vec<nodal_lab_core::spectra::EigenPair>, Error> {
    match domain {
        DomainSpec::MaskedGrid { .. } => fd_spectrum(domain, count),
        _ => analytic_spectrum(domain, count),
    }
}

fn now_stamp(fixed: bool) -> String {
    if fixed {
        "1970-01-01T00:00:00+00:00".to_string()
    } else {
        chrono::Utc::now().to_rfc3339()
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let started = now_stamp(args.seed.is_some());
    let domain = args.domain.resolve()?;
    let config = serde_json::json!({
        "command": "verify",
        "claim": args.claim,
        "domain": domain,
        "count": args.count,
        "deltas": args.deltas,
        "p": args.p,
        "seed": args.seed,
    });
    let cfg = VerifyConfig {
        claim: args.claim.clone(),
        domain,
        count: args.count,
        deltas: args.deltas.clone(),
        p_list: args.p.clone(),
        seed: args.seed.unwrap_or(0),
        cache: args.cache.clone(),
    };
    let claim = run_claim(&cfg)?;
    let failed = claim.failed();
    let report = Report {
        meta: Meta {
            version: TOOL_VERSION.to_string(),
            config,
            started,
            finished: now_stamp(args.seed.is_some()),
        },
        claims: vec![claim],
    };
    write_report(&args.out, &report)
        .map_err(|e| Error::domain("verify", format!("writing report: {e}")))?;
    let claim = &report.claims[0];
    println!(
        "{}: {} ({} rows{})",
        claim.id,
        claim.verdict,
        claim.rows.len(),
        claim
            .fit
            .as_ref()
            .map(|f| format!(", slope {:.4}", f.slope))
            .unwrap_or_default()
    );
    Ok(if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_constants(args: ConstantsArgs) -> Result<ExitCode, Error> {
    println!("n,p,K_np,quad_error,j_order,ball_volume,delta_p,alpha_p");
    for &n in &args.n {
        let j = bessel_first_zero(BesselOrder::for_dimension(n)?)?;
        let alpha_n = unit_ball_volume(n)?;
        for &p in &args.p {
            let k = chiti_constant(n, p)?;
            let delta = if p >= 2.0 {
                sig12(sogge_delta(n, p)?)
            } else {
                String::new()
            };
            let alpha = if p >= 2.0 && n >= 3 {
                sig12(smith_sogge_alpha(n, p)?)
            } else {
                String::new()
            };
            println!(
                "{n},{},{},{},{},{},{delta},{alpha}",
                sig12(p),
                sig12(k.value),
                sig12(k.quad_error),
                sig12(j),
                sig12(alpha_n)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
