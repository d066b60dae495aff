//! Command-line front end for the group-search toolkit.
//!
//! Three families of subcommands: `ctab` answers exact character-table
//! queries, `group` enumerates and measures concrete groups, and `search`
//! runs the randomized subgroup pipeline and replays its witness files.
//!
//! Exit codes: 0 success, 1 query error (unknown class, missing file),
//! 2 validation error (malformed table/config, failed certification),
//! 3 overflow or exhausted budget. Every randomized path takes its seed
//! from an explicit flag or config field; there is no implicit entropy.

mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use groupsleuth_core::blackbox::{
    centralizer_bruteforce, BlackboxError, GeneratedGroup, GroupElement,
};
use groupsleuth_core::chartab::{CharacterTable, TableError};
use groupsleuth_core::cyclo::Cyclotomic;
use groupsleuth_core::files::{self, FilesError};
use groupsleuth_core::search::{
    builtin_profile, classify_a5_embedding, find_inverting_involutions,
    inverting_involutions_exhaustive, recertify_witness, run_pipeline, PipelineConfig, ProfileRef,
    SearchError, SubgroupWitness, TargetProfile, DEFAULT_DRAW_BUDGET, DEFAULT_ENUMERATION_CAP,
};
use groupsleuth_core::slp::Slp;

use manifest::RunManifest;

const EXIT_QUERY: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_OVERFLOW: u8 = 3;

#[derive(Parser)]
#[command(name = "groupsleuth", version, about = "Black-box group search toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact character-table queries
    #[command(subcommand)]
    Ctab(CtabCommand),
    /// Enumeration and measurement of concrete groups
    #[command(subcommand)]
    Group(GroupCommand),
    /// Randomized subgroup search and witness replay
    #[command(subcommand)]
    Search(SearchCommand),
}

#[derive(Subcommand)]
enum CtabCommand {
    /// Class multiplication coefficient of a class triple
    Cmc {
        table: String,
        class_a: String,
        class_b: String,
        class_c: String,
    },
    /// Classes matching character-value probes
    ///
    /// Each probe is DEGREE=VALUE or #ROW=VALUE; a degree picks the first
    /// row of that degree. VALUE must be a plain integer.
    Identify {
        table: String,
        /// Probes, e.g. 299=-13 or #5=4371
        #[arg(required = true)]
        probes: Vec<String>,
        /// Keep only classes of this element order
        #[arg(long)]
        order: Option<u64>,
    },
    /// Class of the k-th powers of a class
    Power { table: String, class: String, k: u64 },
    /// Load a table and run all structural checks
    Validate { table: String },
}

#[derive(Subcommand)]
enum GroupCommand {
    /// Enumerate a group file and print its order
    Enumerate {
        group: String,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Print the set of element orders
    Spectrum {
        group: String,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        /// Sample orders randomly instead of enumerating (needs --seed)
        #[arg(long, requires = "seed")]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print orbit lengths on the permutation domain
    Orbits { group: String },
    /// Order of the centralizer of the given elements
    Centralizer {
        group: String,
        /// Program over the group generators; repeatable; @FILE reads a file
        #[arg(long = "element", required = true)]
        elements: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum SearchCommand {
    /// Census of involutions inverting a fixed element
    Invert(InvertArgs),
    /// Full search pipeline from a config file
    Pipeline(PipelineArgs),
    /// Orbit profile and certificate of an alternating-degree-5 witness
    ClassifyA5(ClassifyArgs),
    /// Replay a witness file and re-run its certificates
    Verify(VerifyArgs),
}

#[derive(Args)]
struct InvertArgs {
    config: PathBuf,
    /// Write the JSON report here
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Print the JSON report on stdout instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PipelineArgs {
    config: PathBuf,
    /// Worker threads; 1 is the defined deterministic mode
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the JSON report here
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the witness file here (input for `search verify`)
    #[arg(long)]
    witnesses: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Print the JSON report on stdout instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Group file with the witness generators
    group: String,
    /// Enumerable ambient group file, for the centralizer size
    #[arg(long)]
    ambient: Option<String>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Witness file written by `search pipeline --witnesses`
    witnesses: PathBuf,
    /// Ambient enumeration cap for centralizer recomputation
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

// ---------------------------------------------------------------------------
// Failure plumbing

struct Failure {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, Failure>;

fn fail<T, M: Into<String>>(code: u8, message: M) -> CliResult<T> {
    Err(Failure {
        code,
        message: message.into(),
    })
}

fn table_failure(e: &TableError) -> u8 {
    match e {
        TableError::UnknownClass(_) => EXIT_QUERY,
        TableError::Io { .. } => EXIT_QUERY,
        _ => EXIT_VALIDATION,
    }
}

fn files_failure(e: &FilesError) -> u8 {
    match e {
        FilesError::NotFound { .. } | FilesError::Io { .. } => EXIT_QUERY,
        _ => EXIT_VALIDATION,
    }
}

fn blackbox_failure(e: &BlackboxError) -> u8 {
    match e {
        BlackboxError::Overflow { .. } | BlackboxError::OrderOverflow { .. } => EXIT_OVERFLOW,
        _ => EXIT_QUERY,
    }
}

fn search_failure(e: &SearchError) -> u8 {
    match e {
        SearchError::Stage { source, .. } => search_failure(source),
        SearchError::Blackbox(b) => blackbox_failure(b),
        SearchError::Files(f) => files_failure(f),
        SearchError::Table(t) => table_failure(t),
        SearchError::Slp(_) => EXIT_VALIDATION,
        SearchError::Config(_)
        | SearchError::UnknownProfile(_)
        | SearchError::BadProfile { .. } => EXIT_VALIDATION,
        SearchError::RelatorFails { .. }
        | SearchError::DegenerateImage { .. }
        | SearchError::OrderMismatch { .. }
        | SearchError::SpectrumMismatch { .. } => EXIT_VALIDATION,
        SearchError::PresentationSearchExhausted { .. } => EXIT_OVERFLOW,
        SearchError::NonRealTarget(_) | SearchError::NotCharacterised(_) => EXIT_QUERY,
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        Failure {
            code: search_failure(&e),
            message: e.to_string(),
        }
    }
}

fn io_failure(what: &str, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_QUERY,
        message: format!("{what}: {e}"),
    }
}

// ---------------------------------------------------------------------------
// Shared loading helpers

fn load_table(name: &str) -> CliResult<(CharacterTable, PathBuf)> {
    let path = files::resolve_data_path(name)
        .map_err(|e| Failure { code: files_failure(&e), message: e.to_string() })?;
    match CharacterTable::load(&path) {
        Ok(t) => Ok((t, path)),
        Err(e) => Err(Failure {
            code: table_failure(&e),
            message: format!("{}: {e}", path.display()),
        }),
    }
}

fn load_group(name: &str) -> CliResult<(Vec<GroupElement>, PathBuf)> {
    let path = files::resolve_data_path(name)
        .map_err(|e| Failure { code: files_failure(&e), message: e.to_string() })?;
    match files::load_group(&path) {
        Ok(g) => Ok((g, path)),
        Err(e) => Err(Failure {
            code: files_failure(&e),
            message: format!("{}: {e}", path.display()),
        }),
    }
}

fn class_index(table: &CharacterTable, name: &str) -> CliResult<usize> {
    table.class_index(name).map_err(|e| Failure {
        code: EXIT_QUERY,
        message: e.to_string(),
    })
}

fn element_text(g: &GroupElement) -> String {
    match g {
        GroupElement::Perm(p) => p.to_string(),
        GroupElement::Mat(m) => format!("{m:?}"),
    }
}

/// Evaluate a program argument (`@path` reads the program from a file).
fn eval_slp_arg(arg: &str, gens: &[GroupElement]) -> CliResult<GroupElement> {
    let text = match arg.strip_prefix('@') {
        Some(p) => std::fs::read_to_string(p).map_err(|e| io_failure(p, e))?,
        None => arg.to_string(),
    };
    let slp = Slp::parse(&text, gens.len())
        .map_err(|e| Failure { code: EXIT_VALIDATION, message: format!("program: {e}") })?;
    slp.evaluate(gens).map_err(|e| Failure {
        code: EXIT_VALIDATION,
        message: format!("program evaluation: {e}"),
    })
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

// ---------------------------------------------------------------------------
// ctab

fn run_ctab(cmd: CtabCommand) -> CliResult<()> {
    match cmd {
        CtabCommand::Cmc { table, class_a, class_b, class_c } => {
            let (t, _) = load_table(&table)?;
            let a = class_index(&t, &class_a)?;
            let b = class_index(&t, &class_b)?;
            let c = class_index(&t, &class_c)?;
            let v = t
                .class_mult_coefficient(a, b, c)
                .map_err(|e| Failure { code: EXIT_QUERY, message: e.to_string() })?;
            println!("{v}");
            Ok(())
        }
        CtabCommand::Identify { table, probes, order } => {
            let (t, _) = load_table(&table)?;
            let mut parsed = Vec::with_capacity(probes.len());
            for p in &probes {
                parsed.push(parse_probe(&t, p)?);
            }
            let mut hits = t.identify_class(&parsed);
            if let Some(o) = order {
                hits.retain(|&c| t.classes()[c].order == o);
            }
            let names: Vec<&str> = hits.iter().map(|&c| t.classes()[c].name.as_str()).collect();
            println!("{}", names.join(" "));
            Ok(())
        }
        CtabCommand::Power { table, class, k } => {
            let (t, _) = load_table(&table)?;
            let c = class_index(&t, &class)?;
            let p = t
                .power_class(c, k)
                .map_err(|e| Failure { code: EXIT_QUERY, message: e.to_string() })?;
            println!("{}", t.classes()[p].name);
            Ok(())
        }
        CtabCommand::Validate { table } => {
            let (t, path) = load_table(&table)?;
            println!(
                "{}: {} classes, {} irreducibles, order {}, conductor {}: valid",
                path.display(),
                t.class_count(),
                t.row_count(),
                t.order(),
                t.conductor()
            );
            Ok(())
        }
    }
}

/// `DEGREE=VALUE` or `#ROW=VALUE`, VALUE an integer.
fn parse_probe(t: &CharacterTable, probe: &str) -> CliResult<(usize, Cyclotomic)> {
    let Some((left, right)) = probe.split_once('=') else {
        return fail(EXIT_QUERY, format!("probe `{probe}` is not ROW=VALUE"));
    };
    let row = match left.strip_prefix('#') {
        Some(idx) => {
            let r: usize = idx
                .parse()
                .map_err(|_| Failure { code: EXIT_QUERY, message: format!("bad row index `{idx}`") })?;
            if r >= t.row_count() {
                return fail(EXIT_QUERY, format!("row {r} outside table with {} rows", t.row_count()));
            }
            r
        }
        None => (0..t.row_count())
            .find(|&r| t.degree(r).to_string() == left)
            .ok_or_else(|| Failure {
                code: EXIT_QUERY,
                message: format!("no character of degree {left}"),
            })?,
    };
    let value: i64 = right
        .parse()
        .map_err(|_| Failure { code: EXIT_QUERY, message: format!("bad probe value `{right}`") })?;
    Ok((row, Cyclotomic::from_integer(value)))
}

// ---------------------------------------------------------------------------
// group

fn enumerate_or_note(grp: &mut GeneratedGroup, cap: usize) -> CliResult<usize> {
    match grp.enumerate(cap) {
        Ok(cache) => Ok(cache.len()),
        Err(BlackboxError::Overflow { cap }) => fail(
            EXIT_OVERFLOW,
            format!("enumeration passed {cap} elements without closing; partial size > {cap}"),
        ),
        Err(e) => Err(Failure { code: blackbox_failure(&e), message: e.to_string() }),
    }
}

fn run_group(cmd: GroupCommand) -> CliResult<()> {
    match cmd {
        GroupCommand::Enumerate { group, cap } => {
            let (gens, _) = load_group(&group)?;
            let mut grp = GeneratedGroup::new(gens)
                .map_err(|e| Failure { code: blackbox_failure(&e), message: e.to_string() })?;
            println!("{}", enumerate_or_note(&mut grp, cap)?);
            Ok(())
        }
        GroupCommand::Spectrum { group, cap, samples, seed } => {
            let (gens, _) = load_group(&group)?;
            let mut grp = GeneratedGroup::with_seed(gens, seed.unwrap_or(0))
                .map_err(|e| Failure { code: blackbox_failure(&e), message: e.to_string() })?;
            let spectrum = match samples {
                Some(n) => grp.sampled_spectrum(n),
                None => grp.order_spectrum(cap),
            }
            .map_err(|e| match e {
                BlackboxError::Overflow { cap } => Failure {
                    code: EXIT_OVERFLOW,
                    message: format!(
                        "enumeration passed {cap} elements without closing; partial size > {cap}"
                    ),
                },
                other => Failure { code: blackbox_failure(&other), message: other.to_string() },
            })?;
            let parts: Vec<String> = spectrum.orders().iter().map(|o| o.to_string()).collect();
            println!("{}", parts.join(" "));
            Ok(())
        }
        GroupCommand::Orbits { group } => {
            let (gens, _) = load_group(&group)?;
            let grp = GeneratedGroup::new(gens)
                .map_err(|e| Failure { code: blackbox_failure(&e), message: e.to_string() })?;
            let mut lengths = grp
                .orbit_lengths()
                .map_err(|e| Failure { code: blackbox_failure(&e), message: e.to_string() })?;
            lengths.sort_unstable_by(|a, b| b.cmp(a));
            let parts: Vec<String> = lengths.iter().map(|l| l.to_string()).collect();
            println!("{}", parts.join(" "));
            Ok(())
        }
        GroupCommand::Centralizer { group, elements, cap } => {
            let (gens, _) = load_group(&group)?;
            let targets: Vec<GroupElement> = elements
                .iter()
                .map(|a| eval_slp_arg(a, &gens))
                .collect::<CliResult<_>>()?;
            let mut grp = GeneratedGroup::new(gens)
                .map_err(|e| Failure { code: blackbox_failure(&e), message: e.to_string() })?;
            enumerate_or_note(&mut grp, cap)?;
            let cache = grp.cached().expect("just enumerated");
            let cz = centralizer_bruteforce(cache.elements(), &targets)
                .map_err(|e| Failure { code: blackbox_failure(&e), message: e.to_string() })?;
            println!("{}", cz.len());
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// search invert

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InvertConfig {
    ambient: String,
    element_slp: String,
    seed: u64,
    #[serde(default)]
    budget: Option<u64>,
    #[serde(default)]
    expected: Option<usize>,
    #[serde(default)]
    exhaustive: bool,
    #[serde(default)]
    cap: Option<usize>,
}

#[derive(Serialize)]
struct InvertReport {
    ambient: String,
    seed: u64,
    exhaustive: bool,
    budget: u64,
    draws: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected: Option<usize>,
    found: usize,
    complete: bool,
    budget_exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
    involutions: Vec<String>,
}

fn run_invert(args: InvertArgs) -> CliResult<()> {
    let started = Instant::now();
    let config_path = files::resolve_data_path(&args.config.display().to_string())
        .map_err(|e| Failure { code: files_failure(&e), message: e.to_string() })?;
    let text = std::fs::read_to_string(&config_path)
        .map_err(|e| io_failure(&config_path.display().to_string(), e))?;
    let config: InvertConfig = serde_json::from_str(&text).map_err(|e| Failure {
        code: EXIT_VALIDATION,
        message: format!("{}: {e}", config_path.display()),
    })?;
    let mut man = RunManifest::new("search invert");
    man.config = Some(config_path.display().to_string());
    man.seed = Some(config.seed);
    man.record_input(&config_path)
        .map_err(|e| io_failure("manifest input", e))?;

    let (gens, ambient_path) = load_group(&config.ambient)?;
    man.record_input(&ambient_path)
        .map_err(|e| io_failure("manifest input", e))?;
    let g = eval_slp_arg(&config.element_slp, &gens)?;
    let mut ambient = GeneratedGroup::with_seed(gens, config.seed)
        .map_err(|e| Failure { code: blackbox_failure(&e), message: e.to_string() })?;
    let budget = config.budget.unwrap_or(DEFAULT_DRAW_BUDGET);

    let report = if config.exhaustive {
        let cap = config.cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
        enumerate_or_note(&mut ambient, cap)?;
        let cache = ambient.cached().expect("just enumerated");
        let involutions = inverting_involutions_exhaustive(cache, &g, |_| true)?;
        let found = involutions.len();
        InvertReport {
            ambient: config.ambient.clone(),
            seed: config.seed,
            exhaustive: true,
            budget: 0,
            draws: 0,
            expected: config.expected,
            found,
            complete: true,
            budget_exhausted: false,
            warning: config.expected.and_then(|e| {
                (e != found).then(|| format!("full scan found {found}, config expected {e}"))
            }),
            involutions: involutions.iter().map(element_text).collect(),
        }
    } else {
        let census =
            find_inverting_involutions(&mut ambient, &g, config.expected, |_| true, budget)?;
        InvertReport {
            ambient: config.ambient.clone(),
            seed: config.seed,
            exhaustive: false,
            budget,
            draws: census.draws,
            expected: census.expected,
            found: census.involutions.len(),
            complete: census.complete,
            budget_exhausted: census.budget_exhausted,
            warning: census.warning.clone(),
            involutions: census.involutions.iter().map(element_text).collect(),
        }
    };

    if let Some(path) = &args.report {
        let mut bytes = serde_json::to_vec_pretty(&report).expect("report serializes");
        bytes.push(b'\n');
        man.write_output(path, &bytes)
            .map_err(|e| io_failure(&path.display().to_string(), e))?;
    }
    if let Some(path) = &args.manifest {
        man.save(path)
            .map_err(|e| io_failure(&path.display().to_string(), e))?;
    }
    if args.json {
        print_json(&report);
    } else {
        println!(
            "inverting involutions of {}: {} found{}{}",
            element_text(&g),
            report.found,
            match report.expected {
                Some(e) => format!(" (expected {e})"),
                None => String::new(),
            },
            if report.exhaustive {
                " by full scan".to_string()
            } else {
                format!(" in {} draws", report.draws)
            }
        );
        for j in &report.involutions {
            println!("  {j}");
        }
        if let Some(w) = &report.warning {
            println!("warning: {w}");
        }
    }
    eprintln!("wall: {:.1?}", started.elapsed());
    Ok(())
}

// ---------------------------------------------------------------------------
// search pipeline

/// Self-contained replay file: the resolved profile, the ambient reference,
/// and every witness with its certificates.
#[derive(Serialize, Deserialize)]
struct WitnessFile {
    profile: TargetProfile,
    ambient: String,
    witnesses: Vec<SubgroupWitness>,
}

fn resolved_profile(config: &PipelineConfig) -> CliResult<TargetProfile> {
    let p = match &config.profile {
        ProfileRef::Name(n) => builtin_profile(n)?,
        ProfileRef::Inline(p) => (**p).clone(),
    };
    Ok(p)
}

fn run_pipeline_cmd(args: PipelineArgs) -> CliResult<()> {
    let started = Instant::now();
    let config_path = files::resolve_data_path(&args.config.display().to_string())
        .map_err(|e| Failure { code: files_failure(&e), message: e.to_string() })?;
    let config = PipelineConfig::load(&config_path)?;
    let mut man = RunManifest::new("search pipeline");
    man.config = Some(config_path.display().to_string());
    man.seed = Some(config.seed);
    man.record_input(&config_path)
        .map_err(|e| io_failure("manifest input", e))?;
    for input in [Some(&config.ambient), config.table.as_ref()].into_iter().flatten() {
        if let Ok(path) = files::resolve_data_path(input) {
            man.record_input(&path)
                .map_err(|e| io_failure("manifest input", e))?;
        }
    }

    let outcome = run_pipeline(&config, args.jobs.max(1))?;

    if let Some(path) = &args.report {
        let mut bytes = serde_json::to_vec_pretty(&outcome.report).expect("report serializes");
        bytes.push(b'\n');
        man.write_output(path, &bytes)
            .map_err(|e| io_failure(&path.display().to_string(), e))?;
    }
    if let Some(path) = &args.witnesses {
        let file = WitnessFile {
            profile: resolved_profile(&config)?,
            ambient: config.ambient.clone(),
            witnesses: outcome.witnesses.clone(),
        };
        let mut bytes = serde_json::to_vec_pretty(&file).expect("witness file serializes");
        bytes.push(b'\n');
        man.write_output(path, &bytes)
            .map_err(|e| io_failure(&path.display().to_string(), e))?;
    }
    if let Some(path) = &args.manifest {
        man.save(path)
            .map_err(|e| io_failure(&path.display().to_string(), e))?;
    }

    if args.json {
        print_json(&serde_json::json!({
            "report": outcome.report,
            "witnesses": outcome.witnesses,
            "classes": outcome.classes,
        }));
    } else {
        let r = &outcome.report;
        println!("profile: {}", r.profile);
        println!("ambient: {}", r.ambient);
        if let Some(class) = &r.seed_class {
            println!("seed element class: {class}");
        }
        let expectation = match &r.expected_inverters {
            Some(e) => format!(" (expected {e})"),
            None => String::new(),
        };
        println!(
            "inverting involutions: {}{}{}",
            r.inverters_found,
            expectation,
            if r.census_complete { ", census complete" } else { "" }
        );
        if let Some(w) = &r.census_warning {
            println!("warning: {w}");
        }
        println!(
            "candidates: {} certified, {} rejected",
            r.witness_count,
            r.rejections.len()
        );
        for rej in &r.rejections {
            println!("  candidate {} rejected at {}: {}", rej.candidate, rej.stage, rej.reason);
        }
        println!("witness classes: {}", r.classes.len());
        for (k, c) in r.classes.iter().enumerate() {
            println!(
                "  class {k}: {} member(s), order {}{}",
                c.members.len(),
                c.order,
                match c.centralizer_size {
                    Some(z) => format!(", centralizer {z}"),
                    None => String::new(),
                }
            );
        }
    }
    eprintln!("wall: {:.1?}", started.elapsed());
    Ok(())
}

// ---------------------------------------------------------------------------
// search classify-a5

fn run_classify(args: ClassifyArgs) -> CliResult<()> {
    let (gens, _) = load_group(&args.group)?;
    let ambient_cache;
    let cache_ref = match &args.ambient {
        Some(name) => {
            let (agens, _) = load_group(name)?;
            let mut amb = GeneratedGroup::new(agens)
                .map_err(|e| Failure { code: blackbox_failure(&e), message: e.to_string() })?;
            enumerate_or_note(&mut amb, args.cap)?;
            ambient_cache = amb;
            Some(ambient_cache.cached().expect("just enumerated"))
        }
        None => None,
    };
    let emb = classify_a5_embedding(&gens, cache_ref)?;
    if args.json {
        print_json(&emb);
    } else {
        let parts: Vec<String> = emb.orbit_lengths.iter().map(|l| l.to_string()).collect();
        println!("orbit lengths: {}", parts.join(" "));
        if let Some(z) = emb.centralizer_size {
            println!("ambient centralizer: {z}");
        }
        println!(
            "presentation: certified ({} relators)",
            emb.certificate.relators_checked.len()
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// search verify

#[derive(Serialize)]
struct VerifyReport {
    witnesses: usize,
    certified: usize,
    mismatched: Vec<usize>,
}

fn run_verify(args: VerifyArgs) -> CliResult<()> {
    let started = Instant::now();
    let text = std::fs::read_to_string(&args.witnesses)
        .map_err(|e| io_failure(&args.witnesses.display().to_string(), e))?;
    let file: WitnessFile = serde_json::from_str(&text).map_err(|e| Failure {
        code: EXIT_VALIDATION,
        message: format!("{}: {e}", args.witnesses.display()),
    })?;
    file.profile.validate()?;
    let mut man = RunManifest::new("search verify");
    man.record_input(&args.witnesses)
        .map_err(|e| io_failure("manifest input", e))?;
    let (gens, ambient_path) = load_group(&file.ambient)?;
    man.record_input(&ambient_path)
        .map_err(|e| io_failure("manifest input", e))?;

    // The centralizer re-check needs the enumerated ambient; on overflow
    // the stored sizes are carried through unverified, with a note.
    let mut ambient = GeneratedGroup::new(gens.clone())
        .map_err(|e| Failure { code: blackbox_failure(&e), message: e.to_string() })?;
    let cache = match ambient.enumerate(args.cap) {
        Ok(_) => Some(ambient.cached().expect("just enumerated")),
        Err(BlackboxError::Overflow { cap }) => {
            eprintln!("note: ambient larger than {cap}; centralizer sizes not re-checked");
            None
        }
        Err(e) => {
            return Err(Failure { code: blackbox_failure(&e), message: e.to_string() })
        }
    };

    let mut mismatched = Vec::new();
    for (i, w) in file.witnesses.iter().enumerate() {
        let fresh = recertify_witness(&gens, w, &file.profile, cache)?;
        let stored = serde_json::to_value(&w.certificates).expect("certificates serialize");
        let recomputed = serde_json::to_value(&fresh).expect("certificates serialize");
        if stored == recomputed {
            println!("witness {i}: certified");
        } else {
            println!("witness {i}: MISMATCH");
            println!("  stored:     {stored}");
            println!("  recomputed: {recomputed}");
            mismatched.push(i);
        }
    }
    let report = VerifyReport {
        witnesses: file.witnesses.len(),
        certified: file.witnesses.len() - mismatched.len(),
        mismatched: mismatched.clone(),
    };
    if let Some(path) = &args.manifest {
        man.save(path)
            .map_err(|e| io_failure(&path.display().to_string(), e))?;
    }
    if args.json {
        print_json(&report);
    }
    eprintln!("wall: {:.1?}", started.elapsed());
    if !mismatched.is_empty() {
        return fail(
            EXIT_VALIDATION,
            format!("{} of {} witnesses failed re-certification", mismatched.len(), report.witnesses),
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Ctab(c) => run_ctab(c),
        Command::Group(c) => run_group(c),
        Command::Search(SearchCommand::Invert(a)) => run_invert(a),
        Command::Search(SearchCommand::Pipeline(a)) => run_pipeline_cmd(a),
        Command::Search(SearchCommand::ClassifyA5(a)) => run_classify(a),
        Command::Search(SearchCommand::Verify(a)) => run_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
