use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use permsep_core::arrow::{derive_normal_form, CanonicalKey};
use permsep_core::norm_group::{
    all_permutations, census_by_type, class_count, enumerate_classes, is_norm_preserving,
    ClassDescriptor, MAX_FILTER_R,
};
use permsep_core::selftest::{self, DEFAULT_SEED};
use permsep_core::state_io::{parse_state, write_state};
use permsep_core::tensor::{
    evaluate_criteria, make_state, DensityMatrix, StateKind, DEFAULT_TOLERANCE,
};
use permsep_core::{canonical_key, compose, parse_permutation, Permutation};

/// Permutation separability criteria: canonical forms, class census and
/// numerical evaluation.
#[derive(Parser)]
#[command(name = "permsep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Basis,
    Bell,
    Ghz,
    Mixed,
    Separable,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a permutation to its disjoint arrow configuration and class key.
    Canon {
        #[arg(short = 'r')]
        r: usize,
        /// Print every rewrite step and its norm-preserving multiplier.
        #[arg(long)]
        trace: bool,
        /// Cycle notation "(a,b,…)(…)" or one-line "[p1 … p2r]".
        perm: String,
    },
    /// Decide whether two permutations give the same criterion.
    Equiv {
        #[arg(short = 'r')]
        r: usize,
        first: String,
        second: String,
    },
    /// List every nontrivial class with its representative and the census.
    List {
        #[arg(short = 'r')]
        r: usize,
        /// Print only the census.
        #[arg(long)]
        census: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate every class criterion on a state file.
    Eval {
        state: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Partition all of S_2r into right cosets by canonical key (r <= 4).
    EnumerateCosets {
        #[arg(short = 'r')]
        r: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the acceptance checks.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Write a test state in the state-file format.
    MakeState {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(short = 'r')]
        r: usize,
        #[arg(short = 'd', default_value_t = 2)]
        d: usize,
        /// Subsystems of the Bell pair, e.g. "1,2".
        #[arg(long, default_value = "1,2")]
        pair: String,
        /// Local levels of a basis product, e.g. "0,1,0". Default all zero.
        #[arg(long)]
        levels: Option<String>,
        /// Product terms of a separable state.
        #[arg(long, default_value_t = 4)]
        terms: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => m,
        }
    }
}

type CliResult = Result<String, CliError>;

fn parse_perm(text: &str, r: usize) -> Result<Permutation, CliError> {
    parse_permutation(text, 2 * r)
        .map_err(|e| CliError::Usage(format!("cannot parse \"{text}\": {e}")))
}

fn check_r(r: usize) -> Result<(), CliError> {
    if r == 0 {
        return Err(CliError::Usage("-r must be at least 1".into()));
    }
    Ok(())
}

fn cmd_canon(r: usize, trace: bool, text: &str) -> CliResult {
    check_r(r)?;
    let sigma = parse_perm(text, r)?;
    let derivation = derive_normal_form(&sigma);
    let config = &derivation.configuration;
    let key =
        CanonicalKey::from_configuration(config).map_err(|e| CliError::Internal(e.to_string()))?;
    let class = ClassDescriptor::from_key(key.clone());
    let mut out = String::new();
    if trace {
        writeln!(out, "{:<16}{}", "cycles", derivation.cycles).unwrap();
        for step in &derivation.steps {
            writeln!(out, "{:<16}{}", step.rule.to_string(), step.result).unwrap();
            writeln!(out, "{:<16}  * {}", "", step.multiplier).unwrap();
        }
        if (config.heads(), config.tails()) != (key.heads().to_vec(), key.tails().to_vec()) {
            let flipped = key.configuration();
            let m = compose(
                &config.as_permutation().inverse(),
                &flipped.as_permutation(),
            )
            .map_err(|e| CliError::Internal(e.to_string()))?;
            writeln!(out, "{:<16}{}", "flip", flipped).unwrap();
            writeln!(out, "{:<16}  * {}", "", m).unwrap();
        }
    }
    writeln!(out, "{:<16}{}", "permutation", sigma).unwrap();
    writeln!(out, "{:<16}{}", "configuration", config).unwrap();
    writeln!(out, "{:<16}{}", "key", key).unwrap();
    writeln!(out, "{:<16}{}", "label", class.type_label).unwrap();
    writeln!(out, "{:<16}{}", "family", class.family_label).unwrap();
    writeln!(
        out,
        "{:<16}{}",
        "trivial",
        if class.trivial { "yes" } else { "no" }
    )
    .unwrap();
    Ok(out)
}

fn cmd_equiv(r: usize, first: &str, second: &str) -> CliResult {
    check_r(r)?;
    let sigma = parse_perm(first, r)?;
    let tau = parse_perm(second, r)?;
    let key1 = canonical_key(&sigma);
    let key2 = canonical_key(&tau);
    let quotient =
        compose(&tau.inverse(), &sigma).map_err(|e| CliError::Internal(e.to_string()))?;
    let parity = is_norm_preserving(&quotient);
    if (key1 == key2) != parity {
        return Err(CliError::Internal(format!(
            "internal error: keys {key1} / {key2} disagree with parity test on {quotient}"
        )));
    }
    let mut out = String::new();
    writeln!(out, "{}", if parity { "EQUIVALENT" } else { "INDEPENDENT" }).unwrap();
    writeln!(out, "{:<16}{}  {}", "first", sigma, key1).unwrap();
    writeln!(out, "{:<16}{}  {}", "second", tau, key2).unwrap();
    writeln!(
        out,
        "{:<16}{}  {}",
        "tau^-1 sigma",
        quotient,
        if parity {
            "norm-preserving"
        } else {
            "not norm-preserving"
        }
    )
    .unwrap();
    Ok(out)
}

fn join(set: &[usize]) -> String {
    set.iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_list(r: usize, census_only: bool, format: Format) -> CliResult {
    let classes = enumerate_classes(r).map_err(|e| CliError::Data(e.to_string()))?;
    let census = census_by_type(r).map_err(|e| CliError::Data(e.to_string()))?;
    let nontrivial: Vec<&ClassDescriptor> = classes.iter().filter(|c| !c.trivial).collect();
    let mut out = String::new();
    match (format, census_only) {
        (Format::Csv, true) => out.push_str(&census.to_csv()),
        (Format::Csv, false) => {
            writeln!(
                out,
                "r,heads,tails,arrows,loops,label,family,representative"
            )
            .unwrap();
            for c in &nontrivial {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r,
                    join(c.key.heads()),
                    join(c.key.tails()),
                    c.arrow_count,
                    c.loop_count,
                    c.type_label,
                    c.family_label,
                    c.representative()
                )
                .unwrap();
            }
        }
        (Format::Text, _) => {
            if !census_only {
                let key_width = nontrivial
                    .iter()
                    .map(|c| c.key.to_string().len())
                    .max()
                    .unwrap_or(3);
                writeln!(
                    out,
                    "{:>3}  {:<key_width$}  {:<10}  {:<10}  {:<20}  configuration",
                    "#", "key", "label", "family", "representative"
                )
                .unwrap();
                for (i, c) in nontrivial.iter().enumerate() {
                    writeln!(
                        out,
                        "{:>3}  {:<key_width$}  {:<10}  {:<10}  {:<20}  {}",
                        i + 1,
                        c.key.to_string(),
                        c.type_label,
                        c.family_label,
                        c.representative().to_string(),
                        c.key.configuration()
                    )
                    .unwrap();
                }
                writeln!(out).unwrap();
            }
            writeln!(out, "{census}").unwrap();
            writeln!(
                out,
                "r = {r}: {} classes, {} nontrivial (C({},{})/2 - 1 = {})",
                classes.len(),
                nontrivial.len(),
                2 * r,
                r,
                class_count(r) - 1
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn load_state(path: &PathBuf) -> Result<DensityMatrix, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let op = parse_state(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let diag = op.diagnose();
    if !diag.is_valid() {
        return Err(CliError::Data(format!(
            "{}: not a valid state: {}",
            path.display(),
            diag.violations().join("; ")
        )));
    }
    DensityMatrix::new(op).map_err(|e| CliError::Data(e.to_string()))
}

fn cmd_eval(path: &PathBuf, tolerance: f64, format: Format) -> CliResult {
    let rho = load_state(path)?;
    let report = evaluate_criteria(&rho, tolerance).map_err(|e| CliError::Data(e.to_string()))?;
    let mut out = String::new();
    match format {
        Format::Csv => {
            writeln!(out, "norm,heads,tails,label,representative").unwrap();
            for rec in report.ranked() {
                writeln!(
                    out,
                    "{:.9},{},{},{},{}",
                    rec.norm,
                    join(rec.class.key.heads()),
                    join(rec.class.key.tails()),
                    rec.class.type_label,
                    rec.representative
                )
                .unwrap();
            }
            writeln!(
                out,
                "# max_norm={:.9} verdict={}",
                report.max_norm, report.verdict
            )
            .unwrap();
        }
        Format::Text => {
            writeln!(
                out,
                "state r={} d={}, {} criteria",
                report.r,
                report.d,
                report.records.len()
            )
            .unwrap();
            let key_width = report
                .records
                .iter()
                .map(|rec| rec.class.key.to_string().len())
                .max()
                .unwrap_or(3);
            writeln!(
                out,
                "{:>12}  {:<key_width$}  {:<8}  representative",
                "norm", "key", "label"
            )
            .unwrap();
            for rec in report.ranked() {
                writeln!(
                    out,
                    "{:>12.9}  {:<key_width$}  {:<8}  {}",
                    rec.norm,
                    rec.class.key.to_string(),
                    rec.class.type_label,
                    rec.representative
                )
                .unwrap();
            }
            writeln!(out, "max norm {:.9}", report.max_norm).unwrap();
            writeln!(
                out,
                "verdict {} (tolerance {:e})",
                report.verdict, report.tolerance
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn cmd_enumerate_cosets(r: usize, format: Format) -> CliResult {
    if r == 0 || r > MAX_FILTER_R {
        return Err(CliError::Data(format!(
            "enumerate-cosets needs 1 <= r <= {MAX_FILTER_R}"
        )));
    }
    let mut cosets: BTreeMap<CanonicalKey, (usize, Permutation)> = BTreeMap::new();
    let mut total = 0;
    for sigma in all_permutations(2 * r) {
        total += 1;
        let entry = cosets.entry(canonical_key(&sigma)).or_insert((0, sigma));
        entry.0 += 1;
    }
    let mut out = String::new();
    match format {
        Format::Csv => {
            writeln!(out, "heads,tails,size,first_member").unwrap();
            for (key, (size, first)) in &cosets {
                writeln!(
                    out,
                    "{},{},{},{}",
                    join(key.heads()),
                    join(key.tails()),
                    size,
                    first
                )
                .unwrap();
            }
        }
        Format::Text => {
            let key_width = cosets
                .keys()
                .map(|k| k.to_string().len())
                .max()
                .unwrap_or(3);
            writeln!(out, "{:<key_width$}  {:>6}  first member", "key", "size").unwrap();
            for (key, (size, first)) in &cosets {
                writeln!(
                    out,
                    "{:<key_width$}  {:>6}  {}",
                    key.to_string(),
                    size,
                    first
                )
                .unwrap();
            }
            writeln!(out, "{total} permutations in {} cosets", cosets.len()).unwrap();
        }
    }
    Ok(out)
}

fn cmd_selftest(seed: u64) -> Result<String, CliError> {
    let outcomes = selftest::run_all(seed);
    let mut out = String::new();
    for o in &outcomes {
        writeln!(out, "{o}").unwrap();
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    writeln!(out, "{passed}/{} passed", outcomes.len()).unwrap();
    if passed == outcomes.len() {
        Ok(out)
    } else {
        Err(CliError::Internal(out))
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--{what} must be comma-separated integers")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_make_state(
    kind: Kind,
    r: usize,
    d: usize,
    pair: &str,
    levels: Option<&str>,
    terms: usize,
    seed: u64,
    output: Option<&PathBuf>,
) -> CliResult {
    let kind = match kind {
        Kind::Basis => StateKind::BasisProduct(match levels {
            Some(l) => parse_list(l, "levels")?,
            None => Vec::new(),
        }),
        Kind::Bell => {
            let p = parse_list(pair, "pair")?;
            if p.len() != 2 {
                return Err(CliError::Usage("--pair takes two subsystems".into()));
            }
            StateKind::BellPair(p[0], p[1])
        }
        Kind::Ghz => StateKind::Ghz,
        Kind::Mixed => StateKind::MaximallyMixed,
        Kind::Separable => StateKind::RandomSeparable { terms, seed },
        Kind::Random => StateKind::RandomState { seed },
    };
    let rho = make_state(&kind, r, d).map_err(|e| CliError::Data(e.to_string()))?;
    let text = write_state(rho.operator());
    match output {
        Some(path) => {
            fs::write(path, text)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Canon { r, trace, perm } => cmd_canon(r, trace, &perm),
        Command::Equiv { r, first, second } => cmd_equiv(r, &first, &second),
        Command::List { r, census, format } => cmd_list(r, census, format),
        Command::Eval {
            state,
            tolerance,
            format,
        } => cmd_eval(&state, tolerance, format),
        Command::EnumerateCosets { r, format } => cmd_enumerate_cosets(r, format),
        Command::Selftest { seed } => cmd_selftest(seed),
        Command::MakeState {
            kind,
            r,
            d,
            pair,
            levels,
            terms,
            seed,
            output,
        } => cmd_make_state(
            kind,
            r,
            d,
            &pair,
            levels.as_deref(),
            terms,
            seed,
            output.as_ref(),
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprint!("{}", e.message());
            if !e.message().ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(e.exit_code())
        }
    }
}
