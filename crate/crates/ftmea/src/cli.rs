//! Subcommand definitions and orchestration.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, ColorChoice, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use ftmea_core::faultsim::{all_stuck_at_sites, attack_toggle_campaign, fault_campaign, CampaignResult};
use ftmea_core::rpn::{compute_rpn, rank, rank_changes};
use ftmea_core::scoap::compute_scoap;
use ftmea_core::structural::{derive_bundle, DerivationRequest};
use ftmea_core::{CdcfBundle, NetAnchors, Netlist, RiskError, VectorSource, Worksheet};

use crate::error::{Error, FormatError};
use crate::json_io::{load_cdcf, load_risk_matrix, render_cdcf, render_effective, render_evidence};
use crate::report;
use crate::worksheet_csv::{parse_applicability, parse_item_anchors, parse_items, parse_measures};

/// Set to any value to turn off colored diagnostics.
pub const NO_COLOR_ENV: &str = "FTMEA_NO_COLOR";

#[derive(Debug, Parser)]
#[command(name = "ftmea", version, about = "Integrated safety and security risk analysis (FMEA + TARA)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank items by corrected RPN and report rank changes against classical FMEA.
    Analyze(AnalyzeArgs),
    /// Derive CDCFs from netlist structure.
    DeriveCdcf(DeriveArgs),
    /// SCOAP controllability and observability per net.
    Scoap(ScoapArgs),
    /// Fan-in (or fan-out) cone of a set of nets.
    Coi(CoiArgs),
    /// Stuck-at fault and attack-toggle campaigns.
    Faultsim(FaultsimArgs),
    /// Rank and RPN deltas between two CSV reports.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct WorksheetArgs {
    /// Items CSV: id,kind,description,effect_group,S,O,D
    #[arg(long)]
    pub worksheet: PathBuf,
    /// Measures CSV: id,kind,domain,description,effect_nets,alarm_nets,attack_input_nets
    #[arg(long)]
    pub measures: PathBuf,
    /// Applicability CSV: item_id,measure_id
    #[arg(long)]
    pub applicability: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Markdown,
    Json,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub worksheet: WorksheetArgs,
    /// Configured CDCF JSON.
    #[arg(long)]
    pub cdcf: Option<PathBuf>,
    /// Bench netlist; enables structural derivation.
    #[arg(long)]
    pub netlist: Option<PathBuf>,
    /// The design without the anchored prevention measures.
    #[arg(long, requires = "netlist")]
    pub variant_netlist: Option<PathBuf>,
    /// Item anchors CSV: item_id,effect_nets,alarm_nets,attack_input_nets
    #[arg(long, requires = "netlist")]
    pub item_anchors: Option<PathBuf>,
    /// Unified risk matrix JSON, echoed into markdown and JSON reports.
    #[arg(long)]
    pub risk_matrix: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    #[command(flatten)]
    pub worksheet: WorksheetArgs,
    /// Bench netlist of the design with every measure in place.
    #[arg(long)]
    pub netlist: PathBuf,
    /// The design without the anchored prevention measures.
    #[arg(long)]
    pub variant_netlist: Option<PathBuf>,
    /// Item anchors CSV: item_id,effect_nets,alarm_nets,attack_input_nets
    #[arg(long)]
    pub item_anchors: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoapArgs {
    /// Bench netlist.
    #[arg(long)]
    pub netlist: PathBuf,
    /// Output directory; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoiArgs {
    /// Bench netlist.
    #[arg(long)]
    pub netlist: PathBuf,
    /// Comma-separated root nets.
    #[arg(long, value_delimiter = ',', required = true)]
    pub roots: Vec<String>,
    /// Follow fan-out instead of fan-in.
    #[arg(long, action = ArgAction::SetTrue)]
    pub forward: bool,
    /// Output directory; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FaultsimArgs {
    /// Bench netlist.
    #[arg(long)]
    pub netlist: PathBuf,
    /// Comma-separated nets observed by the stuck-at campaign.
    #[arg(long, value_delimiter = ',')]
    pub monitored: Vec<String>,
    /// Comma-separated pseudo-inputs the attacker controls.
    #[arg(long, value_delimiter = ',')]
    pub attack_inputs: Vec<String>,
    /// Sample vectors from this seed instead of sweeping every assignment.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Vectors per campaign in sampled mode.
    #[arg(long, default_value_t = 4096, requires = "seed")]
    pub samples: u64,
    /// Output directory; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Earlier rpn_report.csv.
    pub before: PathBuf,
    /// Later rpn_report.csv.
    pub after: PathBuf,
    /// Output directory; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|_| Error::input(path, FormatError::NotUtf8))
}

fn load_worksheet(args: &WorksheetArgs) -> Result<Worksheet, Error> {
    let items = parse_items(&read(&args.worksheet)?).map_err(|e| Error::input(&args.worksheet, e))?;
    let measures = parse_measures(&read(&args.measures)?).map_err(|e| Error::input(&args.measures, e))?;
    let pairs =
        parse_applicability(&read(&args.applicability)?).map_err(|e| Error::input(&args.applicability, e))?;
    let duplicate_item = |id: &str| items.iter().filter(|i| i.id == id).count() > 1;
    let path = |e: &RiskError| match e {
        RiskError::DanglingReference { .. } | RiskError::DuplicatePair(..) => &args.applicability,
        RiskError::DuplicateId(id) if !duplicate_item(id) => &args.measures,
        RiskError::InvalidNetName(_) => &args.measures,
        _ => &args.worksheet,
    };
    Worksheet::new(items.clone(), measures, pairs).map_err(|e| Error::input(path(&e), e))
}

fn load_netlist(path: &Path) -> Result<Netlist, Error> {
    Netlist::parse_bench(&read(path)?).map_err(|e| Error::input(path, e))
}

fn load_item_anchors(path: Option<&Path>) -> Result<BTreeMap<String, NetAnchors>, Error> {
    match path {
        Some(p) => parse_item_anchors(&read(p)?).map_err(|e| Error::input(p, e)),
        None => Ok(BTreeMap::new()),
    }
}

struct Derived {
    bundle: CdcfBundle,
    evidence: String,
}

fn derive(
    worksheet: &Worksheet,
    netlist_path: &Path,
    variant_path: Option<&Path>,
    anchors_path: Option<&Path>,
) -> Result<Derived, Error> {
    let netlist = load_netlist(netlist_path)?;
    let variant = variant_path.map(load_netlist).transpose()?;
    let anchors = load_item_anchors(anchors_path)?;
    let mut request = DerivationRequest::new(&netlist, worksheet).with_item_anchors(anchors);
    if let Some(v) = &variant {
        request = request.with_variant(v);
    }
    let missing = request.validate();
    if !missing.is_empty() {
        return Err(Error::Anchors(missing));
    }
    let derivation = derive_bundle(&request, worksheet)?;
    Ok(Derived { evidence: render_evidence(&derivation.evidence), bundle: derivation.bundle })
}

/// Writes every file to a temporary sibling first and renames only once all
/// contents are on disk.
pub fn write_outputs(dir: &Path, files: &[(&str, String)]) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let mut tmp = tempfile::Builder::new()
            .prefix(&format!(".{name}."))
            .tempfile_in(dir)
            .map_err(|e| Error::io(dir, e))?;
        tmp.write_all(contents.as_bytes()).map_err(|e| Error::io(tmp.path(), e))?;
        tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, target) in staged {
        tmp.persist(&target).map_err(|e| Error::io(&target, e.error))?;
    }
    Ok(())
}

fn emit(out: Option<&Path>, name: &str, contents: String, stdout: &mut dyn Write) -> Result<(), Error> {
    match out {
        Some(dir) => write_outputs(dir, &[(name, contents)]),
        None => stdout.write_all(contents.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn analyze(args: &AnalyzeArgs) -> Result<(), Error> {
    let ws = load_worksheet(&args.worksheet)?;
    let configured = match &args.cdcf {
        Some(p) => load_cdcf(&read(p)?, &ws).map_err(|e| Error::input(p, e))?,
        None => CdcfBundle::empty(&ws),
    };
    let risk_matrix = match &args.risk_matrix {
        Some(p) => Some(load_risk_matrix(&read(p)?).map_err(|e| Error::input(p, e))?),
        None => None,
    };
    let mut files = Vec::new();
    let bundle = match &args.netlist {
        Some(n) => {
            let d = derive(&ws, n, args.variant_netlist.as_deref(), args.item_anchors.as_deref())?;
            files.push(("cdcf_evidence.json", d.evidence));
            CdcfBundle::merge(&configured, &d.bundle)?
        }
        None => configured,
    };
    let results = compute_rpn(&ws, &bundle)?;
    let changes = rank_changes(&results);
    let ranked = rank(results);
    match args.format {
        Format::Csv => {
            files.push(("rpn_report.csv", report::rpn_csv(&ranked)));
            files.push(("rank_changes.csv", report::rank_changes_csv(&changes)));
        }
        Format::Markdown => {
            files.push(("rpn_report.md", report::rpn_markdown(&ranked, &changes, &bundle, risk_matrix.as_ref())))
        }
        Format::Json => files.push(("rpn_report.json", report::rpn_json(&ranked, &changes, &bundle, risk_matrix.as_ref()))),
    }
    files.push(("cdcf_effective.json", render_effective(&bundle)));
    write_outputs(&args.out, &files)
}

fn derive_cdcf(args: &DeriveArgs) -> Result<(), Error> {
    let ws = load_worksheet(&args.worksheet)?;
    let d = derive(&ws, &args.netlist, args.variant_netlist.as_deref(), args.item_anchors.as_deref())?;
    write_outputs(&args.out, &[("cdcf_derived.json", render_cdcf(&d.bundle)), ("cdcf_evidence.json", d.evidence)])
}

fn faultsim(args: &FaultsimArgs, stdout: &mut dyn Write) -> Result<(), Error> {
    if args.monitored.is_empty() && args.attack_inputs.is_empty() {
        return Err(Error::Usage("faultsim needs --monitored and/or --attack-inputs".into()));
    }
    let n = load_netlist(&args.netlist)?;
    let source = match args.seed {
        Some(seed) => VectorSource::Sampled { seed, count: args.samples },
        None => VectorSource::Exhaustive,
    };
    let mut result = CampaignResult { seed: args.seed, ..CampaignResult::default() };
    if !args.monitored.is_empty() {
        let monitored = n.resolve(args.monitored.iter().map(String::as_str))?;
        result = result.merge(fault_campaign(&n, &monitored, &all_stuck_at_sites(&n), source)?);
    }
    if !args.attack_inputs.is_empty() {
        let attack = n.resolve(args.attack_inputs.iter().map(String::as_str))?;
        result = result.merge(attack_toggle_campaign(&n, &attack, source)?);
    }
    emit(args.out.as_deref(), "faultsim.json", report::faultsim_json(&n, &result), stdout)
}

/// Runs one parsed command, writing single-output results to `stdout` when no `--out` is given.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), Error> {
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::DeriveCdcf(a) => derive_cdcf(a),
        Command::Scoap(a) => {
            let n = load_netlist(&a.netlist)?;
            let r = compute_scoap(&n)?;
            emit(a.out.as_deref(), "scoap.csv", report::scoap_csv(&n, &r), stdout)
        }
        Command::Coi(a) => {
            let n = load_netlist(&a.netlist)?;
            let roots = n.resolve(a.roots.iter().map(String::as_str))?;
            let cone = if a.forward { n.fanout_cone(&roots)? } else { n.fanin_cone(&roots)? };
            emit(a.out.as_deref(), "coi.json", report::coi_json(&n, &roots, a.forward, &cone), stdout)
        }
        Command::Faultsim(a) => faultsim(a, stdout),
        Command::Compare(a) => {
            let load = |p: &Path| report::parse_rpn_csv(&read(p)?).map_err(|e| Error::input(p, e));
            let (before, after) = (load(&a.before)?, load(&a.after)?);
            emit(a.out.as_deref(), "comparison.csv", report::comparison_csv(&before, &after), stdout)
        }
    }
}

fn color_enabled() -> bool {
    std::env::var_os(NO_COLOR_ENV).is_none() && std::io::stderr().is_terminal()
}

/// Parses `args`, runs the command and maps the outcome to an exit code:
/// 0 success, 1 invalid input or usage, 2 I/O failure.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = color_enabled();
    let command = Cli::command().color(if color { ColorChoice::Auto } else { ColorChoice::Never });
    let cli = match command.try_get_matches_from(args).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(&cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let prefix = if color { "\x1b[1;31merror:\x1b[0m" } else { "error:" };
            let _ = writeln!(std::io::stderr(), "{prefix} {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
