use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use monodromy::braid::BraidWord;
use monodromy::certify::{self, CertifyError, InfinityCertificate};
use monodromy::coset::{self, DEFAULT_MAX_COSETS};
use monodromy::hurwitz::{builtin, Factorization};
use monodromy::orbit::{self, OrbitOptions, DEFAULT_MAX_VERTICES};
use monodromy::sl2::{IntMatrix2, TorusCurve, TwistPower};
use monodromy::symplectic::{verify_relation, Relation};

/// Exit codes: 0 success, 1 negative but valid outcome, 2 invalid input,
/// 3 verification failure.
#[derive(Parser)]
#[command(
    name = "monodromy",
    version,
    about = "Hurwitz orbits of torus monodromy factorizations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a Hurwitz orbit and print a JSON summary
    Orbit {
        /// Builtin id (q:N, E:D, eta1:G, eta2:G, eta3:G) or a JSON file
        input: String,
        #[arg(short = 'm', long, default_value_t = DEFAULT_MAX_VERTICES, value_parser = positive)]
        max_vertices: usize,
        /// Also write the orbit graph as DOT
        #[arg(short = 'd', long)]
        dot: Option<PathBuf>,
        #[arg(short = 't', long, env = "MONODROMY_THREADS", value_parser = positive)]
        threads: Option<usize>,
    },
    /// Search for an infinite-orbit certificate
    Certify {
        input: String,
        /// Replay bound: σ^k is checked for 0 <= k <= K
        #[arg(short = 'K', long = "bound", default_value_t = certify::DEFAULT_BOUND)]
        bound: usize,
        /// Certify the self fiber sum of the input instead
        #[arg(short = 'f', long)]
        fiber_sum: bool,
        /// Also write the certificate to this file
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Check that braid words generate the stabilizer of a factorization
    Index {
        input: String,
        /// Comma-separated braid words, e.g. "s1^3, s2 s1 s2^-1"
        #[arg(short = 's', long = "sub")]
        sub: String,
        #[arg(short = 'm', long, default_value_t = DEFAULT_MAX_VERTICES, value_parser = positive)]
        max_vertices: usize,
        #[arg(short = 'c', long, default_value_t = DEFAULT_MAX_COSETS, value_parser = positive)]
        max_cosets: usize,
        #[arg(short = 't', long, env = "MONODROMY_THREADS", value_parser = positive)]
        threads: Option<usize>,
    },
    /// Check the hyperelliptic relations on homology
    VerifyRelations {
        /// A genus or an inclusive range such as 2..4
        #[arg(short = 'g', long)]
        genus: String,
    },
    /// Replay a certificate file
    Verify { certificate: PathBuf },
    /// Write the orbit graph as DOT
    ExportDot {
        input: String,
        #[arg(short = 'm', long, default_value_t = DEFAULT_MAX_VERTICES, value_parser = positive)]
        max_vertices: usize,
        /// Output file; stdout when omitted
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[arg(short = 't', long, env = "MONODROMY_THREADS", value_parser = positive)]
        threads: Option<usize>,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

const SUCCESS: u8 = 0;
const NEGATIVE: u8 = 1;
const INVALID: u8 = 2;
const VERIFICATION: u8 = 3;

struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn invalid(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: INVALID,
        error: error.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn load(input: &str) -> Result<Factorization, Failure> {
    let path = Path::new(input);
    if path.is_file() {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {input}"))
            .map_err(invalid)?;
        return Factorization::from_json(&text)
            .with_context(|| format!("parsing {input}"))
            .map_err(invalid);
    }
    builtin(input)
        .with_context(|| format!("{input:?} is neither a file nor a builtin"))
        .map_err(invalid)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(invalid)
}

fn enumerate(
    f: &Factorization,
    max_vertices: usize,
    threads: Option<usize>,
) -> Result<orbit::OrbitGraph, Failure> {
    orbit::enumerate(
        f,
        OrbitOptions {
            max_vertices,
            threads,
        },
    )
    .map_err(invalid)
}

fn cmd_orbit(
    input: &str,
    max_vertices: usize,
    dot: Option<&Path>,
    threads: Option<usize>,
) -> Outcome {
    let f = load(input)?;
    let g = enumerate(&f, max_vertices, threads)?;
    println!(
        "{}",
        serde_json::to_string(&orbit::summary(&g)).expect("summary serializes")
    );
    if let Some(path) = dot {
        write(path, &orbit::export_dot(&g))?;
    }
    Ok(if g.is_complete() { SUCCESS } else { NEGATIVE })
}

fn cmd_export_dot(
    input: &str,
    max_vertices: usize,
    output: Option<&Path>,
    threads: Option<usize>,
) -> Outcome {
    let f = load(input)?;
    let g = enumerate(&f, max_vertices, threads)?;
    let dot = orbit::export_dot(&g);
    match output {
        Some(path) => write(path, &dot)?,
        None => print!("{dot}"),
    }
    Ok(if g.is_complete() { SUCCESS } else { NEGATIVE })
}

fn certify_failure(e: CertifyError) -> Failure {
    match e {
        CertifyError::ReplayFailed(_) => Failure {
            code: VERIFICATION,
            error: e.into(),
        },
        other => invalid(other),
    }
}

fn cmd_certify(input: &str, bound: usize, fiber_sum: bool, output: Option<&Path>) -> Outcome {
    let f = load(input)?;
    let found = if fiber_sum {
        certify::auroux_divergence(&f, &f, bound)
    } else {
        certify::certify_infinite(&f, bound)
    }
    .map_err(certify_failure)?;
    let Some(cert) = found else {
        println!("NOT FOUND");
        return Ok(NEGATIVE);
    };
    let json = cert.to_json();
    println!("{json}");
    if let Some(path) = output {
        write(path, &json)?;
    }
    Ok(SUCCESS)
}

fn cmd_verify(path: &Path) -> Outcome {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(invalid)?;
    let cert = InfinityCertificate::from_json(&text).map_err(invalid)?;
    let report = cert.replay().map_err(certify_failure)?;
    let growth = report
        .growth
        .map(|g| g.iter().map(ToString::to_string).collect::<Vec<_>>());
    let out = serde_json::json!({
        "valid": true,
        "strategy": cert.strategy.to_string(),
        "distinct_keys": report.distinct_keys,
        "growth": growth,
    });
    println!("{out}");
    Ok(SUCCESS)
}

fn cmd_index(
    input: &str,
    sub: &str,
    max_vertices: usize,
    max_cosets: usize,
    threads: Option<usize>,
) -> Outcome {
    let f = load(input)?;
    let words = sub
        .split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| BraidWord::parse(f.len(), w))
        .collect::<Result<Vec<_>, _>>()
        .map_err(invalid)?;
    if words.is_empty() {
        return Err(invalid(anyhow!("no subgroup words given")));
    }
    let report = coset::cross_check_index(
        &f,
        &words,
        OrbitOptions {
            max_vertices,
            threads,
        },
        max_cosets,
    )
    .map_err(invalid)?;
    println!(
        "{}",
        serde_json::to_string(&report).expect("report serializes")
    );
    Ok(if report.verdict { SUCCESS } else { NEGATIVE })
}

fn genus_range(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || invalid(anyhow!("invalid genus range {text:?}"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            )
        }
        None => {
            let g = text.trim().parse().map_err(|_| bad())?;
            (g, g)
        }
    };
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn cmd_verify_relations(genus: &str) -> Outcome {
    let (lo, hi) = genus_range(genus)?;
    let mut all = true;
    let mut report = |label: String, ok: bool| {
        all &= ok;
        println!("{label} {}", if ok { "PASS" } else { "FAIL" });
    };
    if lo == 1 {
        let a = TwistPower::positive(TorusCurve::alpha()).matrix();
        let b = TwistPower::positive(TorusCurve::beta()).matrix();
        let ab = &a * &b;
        report(
            "torus (TaTb)^3 = -I".into(),
            ab.pow(3) == IntMatrix2::neg_identity(),
        );
        report("torus (TaTb)^6 = I".into(), ab.pow(6).is_identity());
    }
    for g in lo..=hi {
        for r in Relation::ALL {
            let ok = verify_relation(r, g).map_err(invalid)?;
            report(format!("{r} g={g}"), ok);
        }
    }
    Ok(if all { SUCCESS } else { VERIFICATION })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Orbit {
            input,
            max_vertices,
            dot,
            threads,
        } => cmd_orbit(&input, max_vertices, dot.as_deref(), threads),
        Command::Certify {
            input,
            bound,
            fiber_sum,
            output,
        } => cmd_certify(&input, bound, fiber_sum, output.as_deref()),
        Command::Index {
            input,
            sub,
            max_vertices,
            max_cosets,
            threads,
        } => cmd_index(&input, &sub, max_vertices, max_cosets, threads),
        Command::VerifyRelations { genus } => cmd_verify_relations(&genus),
        Command::Verify { certificate } => cmd_verify(&certificate),
        Command::ExportDot {
            input,
            max_vertices,
            output,
            threads,
        } => cmd_export_dot(&input, max_vertices, output.as_deref(), threads),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
