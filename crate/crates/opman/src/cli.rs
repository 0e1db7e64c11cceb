use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use opman_core::random::haar_unitary;
use opman_core::{
    apply_gauge_field, check_isomorphism, construct_local_onb, extract_gauge_transformation,
    gauge_from_local_onb, generate_random_manifold, spin_dimension_profile,
    validate_operator_manifold, verify_suite, Isomorphism, SplitMix64, EPS_CHECK, EPS_VALID,
};

use crate::error::{Error, Result};
use crate::format::cell_ids;
use crate::io;

#[derive(Debug, Parser)]
#[command(
    name = "opman",
    version,
    about = "Finite operator manifolds: decomposition, spin dimension and gauges"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the spectral-measure axioms of a manifold file
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = EPS_VALID)]
        tol: f64,
    },
    /// Build a local orthonormal basis and write its gauge
    Decompose {
        file: PathBuf,
        #[arg(long, default_value = "standard")]
        seed_basis: SeedBasis,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the spin-dimension strata, one per line
    Classify { file: PathBuf },
    /// Extract the gauge field taking the first gauge to the second
    GaugeDiff {
        g1: PathBuf,
        g2: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a gauge field to a wave section
    ApplyField {
        field: PathBuf,
        section: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide whether two manifolds over the same cells are isomorphic
    IsoCheck { file1: PathBuf, file2: PathBuf },
    /// Run the full invariant suite on a manifold
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = EPS_CHECK)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a seeded random manifold
    Random {
        #[arg(long)]
        cells: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Seed columns for the local ONB construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedBasis {
    Standard,
    /// Columns of a Haar unitary drawn from this seed.
    Random(u64),
}

impl FromStr for SeedBasis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "standard" {
            return Ok(SeedBasis::Standard);
        }
        match s.strip_prefix("random:").map(str::parse) {
            Some(Ok(seed)) => Ok(SeedBasis::Random(seed)),
            _ => Err(format!(
                "expected `standard` or `random:<seed>`, found `{s}`"
            )),
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// exit code: 0 on success, 1 when checks fail, 2 on usage, parse or IO
/// errors. The first line written to `stderr` on failure is always
/// `<code>: <message>`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => return report_clap_error(&e, stdout, stderr),
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "{}: {}", e.code(), single_line(&e.to_string()));
            if let Error::Validation { report, .. } = &e {
                let _ = writeln!(stderr, "{report}");
            }
            e.exit_code()
        }
    }
}

fn single_line(s: &str) -> String {
    s.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

fn report_clap_error(e: &clap::Error, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    use clap::error::ErrorKind;
    let text = e.render().to_string();
    if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        let _ = write!(stdout, "{text}");
        return 0;
    }
    let mut lines = text.lines();
    let first = lines.next().unwrap_or_default();
    let first = first.strip_prefix("error: ").unwrap_or(first);
    let _ = writeln!(stderr, "usage: {first}");
    for line in lines {
        let _ = writeln!(stderr, "{line}");
    }
    2
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { file, tol } => {
            let om = io::read_manifold(&file)?;
            let report = validate_operator_manifold(&om, tol);
            let _ = writeln!(stdout, "{report}");
            if !report.passed() {
                return Err(Error::Validation {
                    what: "manifold validation".into(),
                    report,
                });
            }
        }
        Command::Decompose {
            file,
            seed_basis,
            out,
        } => {
            let om = io::load_manifold(&file)?;
            let seed = match seed_basis {
                SeedBasis::Standard => None,
                SeedBasis::Random(s) => {
                    Some(haar_unitary(om.hilbert_dim(), &mut SplitMix64::new(s)))
                }
            };
            let onb = construct_local_onb(&om, seed.as_ref())?;
            let gauge = gauge_from_local_onb(&om, &onb)?;
            io::save_gauge(&gauge, &om, &out)?;
            let _ = writeln!(
                stdout,
                "{} local basis vectors; gauge written to {}",
                onb.len(),
                out.display()
            );
        }
        Command::Classify { file } => {
            let om = io::load_manifold(&file)?;
            let ids = cell_ids(&om);
            for (m, region) in spin_dimension_profile(&om, None).strata() {
                let names: Vec<&str> = region.iter().map(|k| ids[k].as_str()).collect();
                let _ = writeln!(stdout, "D_{m}: {}", names.join(" "));
            }
        }
        Command::GaugeDiff { g1, g2, out } => {
            let (a, ids_a) = io::load_gauge(&g1)?;
            let (b, ids_b) = io::load_gauge(&g2)?;
            same_cells(&ids_a, &ids_b, &g1, &g2)?;
            for (gauge, path) in [(&a, &g1), (&b, &g2)] {
                let report = gauge.check(EPS_CHECK);
                if !report.passed() {
                    return Err(Error::Validation {
                        what: format!("gauge {}", path.display()),
                        report,
                    });
                }
            }
            let field = extract_gauge_transformation(&a, &b)?;
            io::save_field(&field, &ids_a, &out)?;
            let _ = writeln!(
                stdout,
                "gauge field written to {} (unitarity residual {:.3e})",
                out.display(),
                field.unitarity_residual()
            );
        }
        Command::ApplyField {
            field,
            section,
            out,
        } => {
            let (w, ids_w) = io::load_field(&field)?;
            let (psi, ids_psi) = io::load_section(&section)?;
            same_cells(&ids_w, &ids_psi, &field, &section)?;
            let transformed = apply_gauge_field(&w, &psi)?;
            io::save_section(&transformed, &ids_w, &out)?;
            let _ = writeln!(stdout, "section written to {}", out.display());
        }
        Command::IsoCheck { file1, file2 } => {
            let om1 = io::load_manifold(&file1)?;
            let om2 = io::load_manifold(&file2)?;
            match check_isomorphism(&om1, &om2)? {
                Isomorphism::Unitary(_) => {
                    let _ = writeln!(stdout, "isomorphic");
                }
                Isomorphism::Obstructed { cell, left, right } => {
                    let _ = writeln!(
                        stderr,
                        "not isomorphic: spin dimension differs at {}",
                        om1.cells()[cell].id()
                    );
                    let _ = writeln!(
                        stderr,
                        "m = {left} in {}, m = {right} in {}",
                        file1.display(),
                        file2.display()
                    );
                    return Ok(1);
                }
            }
        }
        Command::Verify { file, tol, seed } => {
            let om = io::load_manifold(&file)?;
            let report = verify_suite(&om, tol, seed)?;
            let _ = writeln!(stdout, "{report}");
            if !report.passed() {
                let failed = report.failures().count();
                let first = report.failures().next().expect("a failing check exists");
                let _ = writeln!(
                    stderr,
                    "failed: {failed} of {} checks exceed tolerance, first {} residual {:e}",
                    report.checks.len(),
                    first.name,
                    first.residual
                );
                return Ok(1);
            }
        }
        Command::Random {
            cells,
            dim,
            ranks,
            seed,
            out,
        } => {
            let om = generate_random_manifold(cells, dim, &ranks, seed)
                .map_err(|e| Error::usage(e.to_string()))?;
            io::save_manifold(&om, &out)?;
            let _ = writeln!(stdout, "manifold written to {}", out.display());
        }
    }
    Ok(0)
}

fn same_cells(a: &[String], b: &[String], pa: &Path, pb: &Path) -> Result<()> {
    if a == b {
        return Ok(());
    }
    Err(opman_core::Error::Incompatible(format!(
        "{} and {} list different cells",
        pa.display(),
        pb.display()
    ))
    .into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_basis_parses() {
        assert_eq!("standard".parse(), Ok(SeedBasis::Standard));
        assert_eq!("random:42".parse(), Ok(SeedBasis::Random(42)));
        assert!("random:".parse::<SeedBasis>().is_err());
        assert!("haar".parse::<SeedBasis>().is_err());
    }

    #[test]
    fn clap_errors_get_a_usage_code() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["opman", "classify"], &mut out, &mut err);
        assert_eq!(code, 2);
        let err = String::from_utf8(err).unwrap();
        assert!(err.starts_with("usage: "), "{err}");
    }

    #[test]
    fn help_goes_to_stdout() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["opman", "--help"], &mut out, &mut err), 0);
        assert!(err.is_empty());
        assert!(String::from_utf8(out).unwrap().contains("gauge-diff"));
    }
}
