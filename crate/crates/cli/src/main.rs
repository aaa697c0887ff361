use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fano2_core::catalog::{self, completion_ambiguity, Catalog, TableId};
use fano2_core::lattice::{make_host_model, HostKind, HostModel};
use fano2_core::link::{enumerate_completions, LinkCandidate, SearchBounds};
use fano2_core::rational::{parse_rational, show, Rational};
use fano2_core::report::{self, Selection};
use fano2_core::smallness::{certify_smallness, SearchOptions, SmallnessCertificate};
use serde::Serialize;

const DATA_DIR_ENV: &str = "FANO2_DATA_DIR";

#[derive(Parser)]
#[command(name = "fano2", version, about = "Exact numerics for two-ray links of blown-up rank-one Fano threefolds")]
struct Cli {
    /// Directory holding the table files. Defaults to $FANO2_DATA_DIR, then the built-in tables.
    #[arg(long, global = true, value_name = "DIR")]
    data_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute every derived column and compare with the printed tables.
    Verify(VerifyArgs),
    /// Emit a smallness certificate for a curve blow-up.
    Certify(CertifyArgs),
    /// List numerically admissible second legs for a host.
    Solve(SolveArgs),
    /// Regenerate the table files from the engine and diff them against the inputs.
    Export(ExportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    /// Verify every table (the default when nothing is selected).
    #[arg(long)]
    all: bool,
    /// Restrict to these tables (e1e1, e1e2, e1e34, e1e5, e2e2, e3e3, e5e5).
    #[arg(long, value_delimiter = ',')]
    table: Vec<String>,
    /// Row numbers, e.g. `10`, `2,10,39` or `40-50`.
    #[arg(long)]
    rows: Option<String>,
    /// A single row such as `e1e1:10`.
    #[arg(long)]
    case: Option<String>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    E1,
    E2,
    E34,
    E5,
}

/// Raw host description: a blow-up of a rank-one Fano with the given `−K_Y³`.
#[derive(Args)]
struct HostArgs {
    /// Row to take the host from, e.g. `e1e1:10`.
    #[arg(long)]
    case: Option<String>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Index of Y (curve blow-ups only).
    #[arg(long)]
    r: Option<u32>,
    /// −K_Y³, as an integer, fraction or decimal.
    #[arg(long, allow_hyphen_values = true)]
    ky3: Option<String>,
    /// Degree of the blown-up curve.
    #[arg(long)]
    d: Option<u32>,
    /// Genus of the blown-up curve.
    #[arg(long)]
    g: Option<u32>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    host: HostArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Largest modulus tried for a local obstruction to −2.
    #[arg(long, default_value_t = 64)]
    max_modulus: u32,
    /// Search bound on |y| for a class of square −2.
    #[arg(long, default_value_t = 10_000)]
    search_bound: i64,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    host: HostArgs,
    /// Curve bounds for the second leg, `dmax,gmax`.
    #[arg(long, value_name = "DMAX,GMAX")]
    bounds: Option<String>,
    /// Keep candidates whose (H⁺, E⁺) do not span the Picard lattice of X.
    #[arg(long)]
    no_lattice_check: bool,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Write regenerated files into this directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, value_delimiter = ',')]
    table: Vec<String>,
}

/// Failure modes, mapped onto exit codes 1 and 2.
enum Failure {
    Mismatch,
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_catalog(cli.data_dir.as_deref()).and_then(|catalog| match cli.command {
        Command::Verify(args) => verify(&catalog, args),
        Command::Certify(args) => certify(&catalog, args),
        Command::Solve(args) => solve(&catalog, args),
        Command::Export(args) => export(&catalog, args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("fano2: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_catalog(flag: Option<&Path>) -> Result<Catalog, Failure> {
    let dir = flag
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(DATA_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    match dir {
        Some(dir) => Ok(Catalog::load_dir(&dir)?),
        None => Ok(Catalog::builtin()),
    }
}

fn emit(text: &str, path: Option<&Path>) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_tables(names: &[String]) -> Result<Option<Vec<TableId>>, Failure> {
    if names.is_empty() {
        return Ok(None);
    }
    let ids = names.iter().map(|n| n.parse::<TableId>()).collect::<Result<Vec<_>, _>>()?;
    Ok(Some(ids))
}

fn parse_rows(spec: &str) -> Result<Vec<u32>, Failure> {
    let bad = || Failure::Input(format!("bad row list {spec:?}"));
    let mut rows = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
                let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                rows.extend(lo..=hi);
            }
            None => rows.push(part.parse().map_err(|_| bad())?),
        }
    }
    if rows.is_empty() {
        return Err(bad());
    }
    Ok(rows)
}

fn verify(catalog: &Catalog, args: VerifyArgs) -> Outcome {
    let mut selection =
        Selection { tables: parse_tables(&args.table)?, rows: args.rows.as_deref().map(parse_rows).transpose()? };
    if let Some(case) = &args.case {
        if args.all || selection != Selection::all() {
            return Err(Failure::Input("--case cannot be combined with --all, --table or --rows".into()));
        }
        let row = catalog.resolve(case)?;
        selection = Selection { tables: Some(vec![row.table]), rows: Some(vec![row.no]) };
    } else if args.all && selection != Selection::all() {
        return Err(Failure::Input("--all cannot be combined with --table or --rows".into()));
    }

    let report = report::verify_catalog(catalog, &selection, &SearchOptions::default());
    if report.rows.is_empty() {
        return Err(Failure::Input("selection matches no rows".into()));
    }
    let text = match args.format {
        Format::Human => report::render_human(&report),
        Format::Json => report::render_json(&report),
        Format::Csv => report::render_csv(&report),
    };
    emit(&text, args.report.as_deref())?;
    if args.report.is_some() {
        let c = report.counts;
        eprintln!("pass {}  fail {}  open {}  skipped {}", c.pass, c.fail, c.open, c.skipped);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

struct ResolvedHost {
    case_id: Option<String>,
    model: HostModel,
}

fn resolve_host(catalog: &Catalog, args: &HostArgs) -> Result<ResolvedHost, Failure> {
    let raw = args.kind.is_some() || args.r.is_some() || args.ky3.is_some() || args.d.is_some() || args.g.is_some();
    if let Some(case) = &args.case {
        if raw {
            return Err(Failure::Input("--case cannot be combined with raw host parameters".into()));
        }
        let row = catalog.resolve(case)?;
        let model = fano2_core::link::row_host_model(row)?;
        return Ok(ResolvedHost { case_id: Some(row.id()), model });
    }
    let ky3 = args
        .ky3
        .as_deref()
        .ok_or_else(|| Failure::Input("give --case or a host via --ky3 (with --r --d --g for curves)".into()))?;
    let ky3: Rational = parse_rational(ky3)?;
    let kind = match args.kind.unwrap_or(KindArg::E1) {
        KindArg::E1 => {
            let need = |v: Option<u32>, flag: &str| v.ok_or_else(|| Failure::Input(format!("curve host needs {flag}")));
            HostKind::E1 { r: need(args.r, "--r")?, d: need(args.d, "--d")?, g: need(args.g, "--g")? }
        }
        other => {
            if args.r.is_some() || args.d.is_some() || args.g.is_some() {
                return Err(Failure::Input("--r, --d and --g only apply to curve hosts".into()));
            }
            match other {
                KindArg::E2 => HostKind::E2,
                KindArg::E34 => HostKind::E3E4,
                _ => HostKind::E5,
            }
        }
    };
    if !catalog::admissible_base(kind, &ky3) {
        let index = match kind {
            HostKind::E1 { r, .. } => format!(" of index {r}"),
            _ => String::new(),
        };
        return Err(Failure::Input(format!(
            "no rank-one Fano threefold{index} has -K^3 = {} as a base for {kind}",
            show(&ky3)
        )));
    }
    let model = make_host_model(kind, &ky3)?;
    Ok(ResolvedHost { case_id: None, model })
}

fn certify(catalog: &Catalog, args: CertifyArgs) -> Outcome {
    let host = resolve_host(catalog, &args.host)?;
    if let Some(case) = &host.case_id {
        let row = catalog.resolve(case)?;
        if let Some(alt) = completion_ambiguity(row.table, row.no) {
            eprintln!(
                "warning: {case} has numerics shared with an {alt} link; its E1-E1 type is not determined by this certificate"
            );
        }
    }
    let opts = SearchOptions { max_modulus: args.max_modulus, search_bound: args.search_bound };
    let cert = certify_smallness(&host.model, host.case_id.clone(), &opts)?;
    let text = match args.format {
        Format::Json => {
            let mut s = cert.to_json();
            s.push('\n');
            s
        }
        Format::Human => certificate_human(&cert),
        Format::Csv => certificate_csv(&cert),
    };
    emit(&text, args.report.as_deref())
}

fn certificate_human(c: &SmallnessCertificate) -> String {
    let mut out = String::new();
    let id = c.case_id.as_deref().unwrap_or("(raw host)");
    writeln!(out, "case        {id}").unwrap();
    writeln!(out, "K^2.H, K^2.E {}, {}", c.c1, c.c2).unwrap();
    writeln!(out, "D           {}", c.d_class).unwrap();
    writeln!(out, "gram        ({}, {}, {})", c.gram.hh, c.gram.hc, c.gram.cc).unwrap();
    writeln!(out, "(D|S)^2     {}", c.square).unwrap();
    writeln!(out, "point case  {}", if c.point_excluded { "excluded" } else { "not excluded" }).unwrap();
    let routes: Vec<_> = c.curve_routes.iter().map(|r| r.token()).collect();
    if routes.is_empty() {
        writeln!(out, "curve case  not excluded").unwrap();
    } else {
        writeln!(out, "curve case  excluded ({})", routes.join(", ")).unwrap();
    }
    writeln!(out, "-2 class    {:?}", c.minus_two).unwrap();
    writeln!(out, "verdict     {:?}", c.verdict).unwrap();
    out
}

fn certificate_csv(c: &SmallnessCertificate) -> String {
    let r = c.record();
    let reason = r.curve_reason.map(|x| x.token()).unwrap_or("");
    format!(
        "case_id,c1,c2,a,b,hh,hc,cc,square,point_excluded,curve_reason,verdict\n{},{},{},{},{},{},{},{},{},{},{},{:?}\n",
        r.case_id.unwrap_or_default(),
        r.c1,
        r.c2,
        r.d[0],
        r.d[1],
        r.gram[0],
        r.gram[1],
        r.gram[2],
        r.square,
        r.point_excluded,
        reason,
        r.verdict
    )
}

fn parse_bounds(spec: &str) -> Result<(u32, u32), Failure> {
    let bad = || Failure::Input(format!("--bounds expects DMAX,GMAX, got {spec:?}"));
    let (d, g) = spec.split_once(',').ok_or_else(bad)?;
    let d: u32 = d.trim().parse().map_err(|_| bad())?;
    let g: u32 = g.trim().parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok((d, g))
}

#[derive(Serialize)]
struct CandidateRecord {
    completion: String,
    r: Option<u32>,
    d: Option<u32>,
    g: Option<u32>,
    alpha: String,
    beta: String,
    e: String,
    kyp3: String,
}

impl From<&LinkCandidate> for CandidateRecord {
    fn from(c: &LinkCandidate) -> Self {
        let (r, d, g) = match HostKind::from(c.completion) {
            HostKind::E1 { r, d, g } => (Some(r), Some(d), Some(g)),
            _ => (None, None, None),
        };
        CandidateRecord {
            completion: c.completion.to_string(),
            r,
            d,
            g,
            alpha: show(&c.alpha),
            beta: show(&c.beta),
            e: show(&c.e),
            kyp3: show(&c.minus_ky_plus3),
        }
    }
}

#[derive(Serialize)]
struct SolveRecord {
    case_id: Option<String>,
    host: String,
    ky3: String,
    kx3: String,
    d_max: u32,
    g_max: u32,
    candidates: Vec<CandidateRecord>,
}

fn solve(catalog: &Catalog, args: SolveArgs) -> Outcome {
    let host = resolve_host(catalog, &args.host)?;
    let mut bounds = SearchBounds { lattice_check: !args.no_lattice_check, ..SearchBounds::default() };
    if let Some(spec) = &args.bounds {
        (bounds.d_max, bounds.g_max) = parse_bounds(spec)?;
    }
    let candidates = enumerate_completions(&host.model, &bounds);
    let record = SolveRecord {
        case_id: host.case_id.clone(),
        host: host.model.kind().to_string(),
        ky3: show(&host.model.minus_ky3()),
        kx3: show(&host.model.minus_k3()),
        d_max: bounds.d_max,
        g_max: bounds.g_max,
        candidates: candidates.iter().map(CandidateRecord::from).collect(),
    };
    let text = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&record)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("completion,r,d,g,alpha,beta,e,kyp3\n");
            let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
            for c in &record.candidates {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    c.completion,
                    opt(c.r),
                    opt(c.d),
                    opt(c.g),
                    c.alpha,
                    c.beta,
                    c.e,
                    c.kyp3
                )
                .unwrap();
            }
            s
        }
        Format::Human => {
            let mut s = String::new();
            writeln!(
                s,
                "host {} with -K_Y^3 = {}, -K_X^3 = {}; d+ <= {}, g+ <= {}",
                record.host, record.ky3, record.kx3, record.d_max, record.g_max
            )
            .unwrap();
            writeln!(s, "{:<20} {:>8} {:>8} {:>8} {:>8}", "completion", "alpha", "beta", "e", "-K_Y+^3").unwrap();
            for c in &record.candidates {
                writeln!(s, "{:<20} {:>8} {:>8} {:>8} {:>8}", c.completion, c.alpha, c.beta, c.e, c.kyp3).unwrap();
            }
            writeln!(s, "{} candidate(s)", record.candidates.len()).unwrap();
            s
        }
    };
    emit(&text, args.report.as_deref())
}

fn export(catalog: &Catalog, args: ExportArgs) -> Outcome {
    if args.format == Format::Human {
        return Err(Failure::Input("export writes csv or json".into()));
    }
    let selected = parse_tables(&args.table)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    }
    let mut differs = false;
    for table in &catalog.tables {
        if selected.as_ref().is_some_and(|s| !s.contains(&table.id)) {
            continue;
        }
        let regenerated = report::regenerate_table(table);
        let name = table.id.file_name();
        if regenerated != table.source {
            differs = true;
            let diff = similar::TextDiff::from_lines(table.source.as_str(), regenerated.as_str());
            print!("{}", diff.unified_diff().header(&format!("a/{name}"), &format!("b/{name}")));
        }
        if let Some(dir) = &args.out {
            let (path, body) = match args.format {
                Format::Json => (dir.join(name.replace(".csv", ".json")), report::regenerate_table_json(table)),
                _ => (dir.join(&name), regenerated),
            };
            fs::write(&path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        }
    }
    if differs {
        Err(Failure::Mismatch)
    } else {
        eprintln!("regenerated tables are identical to the inputs");
        Ok(())
    }
}
