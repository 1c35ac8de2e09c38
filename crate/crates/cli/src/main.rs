//! `ccvar`: check structure files, build derived structures, and run
//! the acceptance suite.
//!
//! Reports go to stdout as JSON and are byte-identical across runs
//! with the same inputs and flags; progress and timing go to stderr.
//! Exit codes: 0 every check passed, 1 a law failed (the report
//! carries a witness), 2 the input was unusable or a bound was hit.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use ccvar_core::acceptance::{Level, CRITERIA};
use ccvar_core::clone::bicross::{bicross_build, bicross_certificate};
use ccvar_core::clone::dual::dual_decompose;
use ccvar_core::clone::{decompose, unary_composite, Theory};
use ccvar_core::matched::{
    b_bmset, bm_exponential, bm_exponential_certificate, bm_product, bm_product_certificate,
    extract_from_endos, free_bmset, free_bmset_certificate, m_bmset, matched_pair_certificate,
    terminal_bmset, MatchedPair, MatchedTheoryData,
};
use ccvar_core::report::Report;
use ccvar_core::schema::{check_doc, parse_doc, BmsetDoc, Doc, DualOpDoc, MatchedPairDoc};
use ccvar_core::{Certificate, Check, Error, Limits, Result, Witness};

#[derive(Parser)]
#[command(
    name = "ccvar",
    version,
    about = "Finite-instance workbench for Boolean-algebra actions, matched pairs, and clone \
             decompositions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Largest Boolean algebra, in atoms.
    #[arg(long, global = true)]
    max_atoms: Option<u32>,

    /// Largest monoid carrier enumerated or searched.
    #[arg(long, global = true)]
    max_monoid: Option<usize>,

    /// Largest operation arity enumerated.
    #[arg(long, global = true)]
    max_arity: Option<usize>,

    /// Largest exhaustive sweep, in instances.
    #[arg(long, global = true)]
    max_naive: Option<u64>,

    /// Reserved for future randomized modes; accepted and ignored.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a structure file (kind is read from the file) and
    /// print the certificate of the laws it was checked against.
    Check {
        /// JSON document of any supported kind.
        file: PathBuf,
    },
    /// Build a derived structure and print it with an embedded
    /// certificate (or write it to --out and print the report).
    Construct {
        #[command(subcommand)]
        kind: Construct,
    },
    /// Run the acceptance criteria and print the aggregate report.
    Suite {
        /// How much of the advertised instance ranges to cover.
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
}

#[derive(Subcommand)]
enum Construct {
    /// Hom-set carrier of two two-sorted actions over the same pair.
    Exp {
        /// Argument object, a bmset document.
        #[arg(long)]
        y: PathBuf,
        /// Result object, a bmset document.
        #[arg(long)]
        z: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Free two-sorted action on a finite generator set.
    Free {
        /// Matched-pair document to build over.
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = 1)]
        generators: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Componentwise product of two two-sorted actions.
    Product {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matched pair extracted from the full endofunction clone on a
    /// finite set.
    ExtractEndos {
        /// Number of points of the base set.
        #[arg(long)]
        size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-level clone presented by a matched pair, reported with its
    /// operation counts per arity.
    Bicross {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, default_value_t = 2)]
        arity_bound: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split one operation of a function clone into its hyperaffine
    /// and unary parts, with the uniqueness sweep.
    Decompose {
        /// A dual_op document.
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

fn main() {
    let cli = Cli::parse();
    let mut limits = Limits::default();
    if let Some(v) = cli.max_atoms {
        limits.max_atoms = v;
    }
    if let Some(v) = cli.max_monoid {
        limits.max_monoid = v;
    }
    if let Some(v) = cli.max_arity {
        limits.max_arity = v;
    }
    if let Some(v) = cli.max_naive {
        limits.max_naive = v;
    }

    let started = Instant::now();
    let code = match cli.command {
        Command::Check { file } => cmd_check(&file, &limits),
        Command::Construct { kind } => cmd_construct(kind, &limits),
        Command::Suite { level } => cmd_suite(&limits, level),
    };
    eprintln!("finished in {:.1?}", started.elapsed());
    std::process::exit(code);
}

fn read_doc(path: &Path) -> Result<Doc> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    parse_doc(&text)
}

fn read_bmset(path: &Path, limits: &Limits) -> Result<ccvar_core::matched::BMSet> {
    match read_doc(path)? {
        Doc::Bmset(d) => d.to_core(limits),
        other => Err(Error::input(format!(
            "{} holds a {} document, expected bmset",
            path.display(),
            kind_name(&other)
        ))),
    }
}

fn read_pair(path: &Path, limits: &Limits) -> Result<MatchedPair> {
    match read_doc(path)? {
        Doc::MatchedPair(d) => d.to_core(limits),
        other => Err(Error::input(format!(
            "{} holds a {} document, expected matched_pair",
            path.display(),
            kind_name(&other)
        ))),
    }
}

fn kind_name(doc: &Doc) -> &'static str {
    match doc {
        Doc::Boolean(_) => "boolean",
        Doc::Monoid(_) => "monoid",
        Doc::Maction(_) => "maction",
        Doc::Bset(_) => "bset",
        Doc::Eqfamily(_) => "eqfamily",
        Doc::Ifthenelse(_) => "ifthenelse",
        Doc::DualOp(_) => "dual_op",
        Doc::MatchedPair(_) => "matched_pair",
        Doc::Bmset(_) => "bmset",
    }
}

/// Turn a law failure into a failing report with its witness; other
/// errors stay hard errors.
fn report_outcome(command: &str, outcome: Result<Certificate>) -> Report {
    match outcome {
        Ok(cert) => Report::from_certificate(command, cert),
        Err(Error::Law(w)) => {
            let mut cert = Certificate::new();
            let tag = w.law.clone();
            cert.push(Check::of(&tag, 1, Some(w)));
            Report::from_certificate(command, cert)
        }
        Err(e) => Report::error(command, &e),
    }
}

fn cmd_check(file: &Path, limits: &Limits) -> i32 {
    let outcome = read_doc(file).and_then(|doc| check_doc(&doc, limits));
    let report = report_outcome("check", outcome);
    println!("{}", report.to_json());
    report.exit_code()
}

/// A construct result: the output document, extra top-level fields,
/// and the certificate to embed.
struct Built {
    doc: Doc,
    extras: Vec<(&'static str, serde_json::Value)>,
    certificate: Certificate,
}

fn cmd_construct(kind: Construct, limits: &Limits) -> i32 {
    let (name, out, outcome) = match kind {
        Construct::Exp { y, z, out } => ("construct exp", out, build_exp(&y, &z, limits)),
        Construct::Free { pair, generators, out } => {
            ("construct free", out, build_free(&pair, generators, limits))
        }
        Construct::Product { x, y, out } => {
            ("construct product", out, build_product(&x, &y, limits))
        }
        Construct::ExtractEndos { size, out } => {
            ("construct extract-endos", out, build_extract(size, limits))
        }
        Construct::Bicross { pair, arity_bound, out } => {
            ("construct bicross", out, build_bicross(&pair, arity_bound, limits))
        }
        Construct::Decompose { file, out } => {
            ("construct decompose", out, build_decompose(&file, limits))
        }
    };
    match outcome {
        Ok(built) => {
            let report = Report::from_certificate(name, built.certificate);
            let mut value = serde_json::to_value(&built.doc).expect("document serialization");
            let fields = value.as_object_mut().expect("documents are objects");
            for (key, extra) in built.extras {
                fields.insert(key.into(), extra);
            }
            fields.insert(
                "certificate".into(),
                serde_json::to_value(&report.certificate).expect("certificate serialization"),
            );
            let text = serde_json::to_string_pretty(&value).expect("document serialization");
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text + "\n") {
                        let report = Report::error(
                            name,
                            &Error::input(format!("cannot write {}: {e}", path.display())),
                        );
                        println!("{}", report.to_json());
                        return report.exit_code();
                    }
                    println!("{}", report.to_json());
                }
                None => println!("{text}"),
            }
            report.exit_code()
        }
        Err(e) => {
            let report = report_outcome(name, Err(e));
            println!("{}", report.to_json());
            report.exit_code()
        }
    }
}

fn build_exp(y: &Path, z: &Path, limits: &Limits) -> Result<Built> {
    let y = read_bmset(y, limits)?;
    let z = read_bmset(z, limits)?;
    let exp = bm_exponential(&y, &z, limits)?;
    let mut certificate = Certificate::new();
    for x in [terminal_bmset(&y.pair, limits)?, m_bmset(&y.pair, limits)?] {
        certificate.merge(bm_exponential_certificate(&x, &y, &z, &exp, limits)?);
    }
    Ok(Built { doc: Doc::Bmset(BmsetDoc::of(&exp.bmset)), extras: vec![], certificate })
}

fn build_free(pair: &Path, generators: usize, limits: &Limits) -> Result<Built> {
    let pair = read_pair(pair, limits)?;
    let free = free_bmset(&pair, generators, limits)?;
    let mut certificate = Certificate::new();
    for target in [terminal_bmset(&pair, limits)?, m_bmset(&pair, limits)?, b_bmset(&pair, limits)?]
    {
        certificate.merge(free_bmset_certificate(&free, &target, limits)?);
    }
    let unit = serde_json::to_value(&free.unit).expect("unit serialization");
    Ok(Built {
        doc: Doc::Bmset(BmsetDoc::of(&free.bmset)),
        extras: vec![("unit", unit)],
        certificate,
    })
}

fn build_product(x: &Path, y: &Path, limits: &Limits) -> Result<Built> {
    let x = read_bmset(x, limits)?;
    let y = read_bmset(y, limits)?;
    let product = bm_product(&x, &y, limits)?;
    let certificate = bm_product_certificate(&product, &x, &y, limits)?;
    Ok(Built { doc: Doc::Bmset(BmsetDoc::of(&product)), extras: vec![], certificate })
}

fn build_extract(size: usize, limits: &Limits) -> Result<Built> {
    let pair = extract_from_endos(size, limits)?;
    let certificate = matched_pair_certificate(&pair, limits)?;
    Ok(Built { doc: Doc::MatchedPair(MatchedPairDoc::of(&pair)), extras: vec![], certificate })
}

fn build_bicross(pair: &Path, arity_bound: usize, limits: &Limits) -> Result<Built> {
    let pair = read_pair(pair, limits)?;
    let data = MatchedTheoryData { pair };
    let clone = bicross_build(&data, arity_bound, limits)?;
    let certificate = bicross_certificate(&clone, limits)?;
    let counts: Vec<usize> =
        (1..=arity_bound).map(|k| clone.ops(k).map(|ops| ops.len())).collect::<Result<_>>()?;
    Ok(Built {
        doc: Doc::MatchedPair(MatchedPairDoc::of(&data.pair)),
        extras: vec![
            ("arity_bound", serde_json::to_value(arity_bound).expect("count serialization")),
            ("ops_per_arity", serde_json::to_value(&counts).expect("count serialization")),
        ],
        certificate,
    })
}

fn build_decompose(file: &Path, limits: &Limits) -> Result<Built> {
    let doc = match read_doc(file)? {
        Doc::DualOp(d) => d,
        other => {
            return Err(Error::input(format!(
                "{} holds a {} document, expected dual_op",
                file.display(),
                kind_name(&other)
            )))
        }
    };
    let (clone, op) = doc.to_core(limits)?;
    let (h, m) = dual_decompose(&op);
    let mut certificate = Certificate::new();
    let glued = unary_composite(&clone, &h, &m)?;
    certificate.push(Check::of(
        "dualop.split",
        1,
        (glued != op).then(|| Witness::new("dualop.split", &[("arity", op.arity as u64)])),
    ));
    let dec = decompose(&clone, &op)?;
    certificate.merge(dec.certificate);
    let unique = dec.hyperaffine == h && dec.unary == m;
    certificate.push(Check::of(
        "dualop.split-unique",
        1,
        (!unique).then(|| Witness::new("dualop.split-unique", &[("arity", op.arity as u64)])),
    ));
    Ok(Built {
        doc: Doc::DualOp(doc.clone()),
        extras: vec![
            (
                "hyperaffine",
                serde_json::to_value(Doc::DualOp(DualOpDoc::of(doc.base, &h)))
                    .expect("part serialization"),
            ),
            (
                "unary",
                serde_json::to_value(Doc::DualOp(DualOpDoc::of(doc.base, &m)))
                    .expect("part serialization"),
            ),
            ("unique", serde_json::Value::Bool(unique)),
        ],
        certificate,
    })
}

fn cmd_suite(limits: &Limits, level: LevelArg) -> i32 {
    let (level, name) = match level {
        LevelArg::Quick => (Level::Quick, "suite quick"),
        LevelArg::Full => (Level::Full, "suite full"),
    };
    let mut certificate = Certificate::new();
    for criterion in CRITERIA {
        let started = Instant::now();
        match (criterion.run)(limits, level) {
            Ok(cert) => {
                let verdict = if cert.ok() { "pass" } else { "FAIL" };
                eprintln!(
                    "{}: {verdict} ({} instances, {:.1?})",
                    criterion.name,
                    cert.instances(),
                    started.elapsed()
                );
                certificate.merge(cert.scoped(criterion.name));
            }
            Err(e) => {
                eprintln!("{}: error ({e})", criterion.name);
                let tag = format!("{}.error: {e}", criterion.name);
                certificate.push(Check::of(&tag, 0, Some(Witness::new(&tag, &[]))));
            }
        }
    }
    let report = Report::from_certificate(name, certificate);
    println!("{}", report.to_json());
    report.exit_code()
}
