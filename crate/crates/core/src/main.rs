use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use warntrack::corpus::{Corpus, CorpusConfig, Manifest, ManifestEntry};
use warntrack::diff::{build_line_mapping, compute_diff, LineImage};
use warntrack::evaluation::{
    compare_approaches, compute_metrics, parse_labels, render_table, MetricsReport,
};
use warntrack::ingest::{
    parse_refactorings, parse_report, split_lines, ParseOptions, ReportFormat, SourceTree,
};
use warntrack::tracker::{track, CommitIds};
use warntrack::{Approach, Error, MatchConfig, Side, TrackingReport};

#[derive(Parser)]
#[command(
    name = "warntrack",
    version,
    about = "Track static-analysis warnings between two revisions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify warnings of a commit pair as persistent, resolved or newly introduced
    Track(Box<TrackArgs>),
    /// Score one or two tracking reports against ground-truth labels
    Eval(EvalArgs),
    /// Show the line diff and line mapping between two files
    Diff(DiffArgs),
    /// Write a seeded synthetic corpus of commit pairs
    GenCorpus(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproachArg {
    Soa,
    Improved,
}

impl From<ApproachArg> for Approach {
    fn from(a: ApproachArg) -> Self {
        match a {
            ApproachArg::Soa => Approach::Soa,
            ApproachArg::Improved => Approach::Improved,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Spotbugs,
    Pmd,
    Generic,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Spotbugs => ReportFormat::Spotbugs,
            FormatArg::Pmd => ReportFormat::Pmd,
            FormatArg::Generic => ReportFormat::Generic,
        }
    }
}

#[derive(Args)]
struct TrackArgs {
    #[arg(long, value_enum)]
    approach: ApproachArg,
    /// Commit pairs to track; replaces the single-pair flags
    #[arg(long, conflicts_with_all = ["pre_root", "post_root", "pre_warnings", "post_warnings", "refactorings"])]
    manifest: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    pre_root: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    post_root: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    pre_warnings: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    post_warnings: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "spotbugs")]
    format: FormatArg,
    #[arg(long)]
    refactorings: Option<PathBuf>,
    /// Report file, or output directory with --manifest; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file overriding matching constants
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "")]
    pre_commit: String,
    #[arg(long, default_value = "")]
    post_commit: String,
    /// Project name stamped on XML-report warnings
    #[arg(long, default_value = "")]
    project: String,
    /// Analyzed root removed from absolute paths in XML reports
    #[arg(long)]
    strip_prefix: Option<String>,
    /// Commit pairs tracked concurrently with --manifest
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct EvalArgs {
    /// One report, or two (baseline first) for a comparison
    #[arg(long = "report", required = true, num_args = 1, action = clap::ArgAction::Append)]
    reports: Vec<PathBuf>,
    #[arg(long)]
    labels: PathBuf,
    /// Print metrics as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DiffArgs {
    #[arg(long)]
    pre: PathBuf,
    #[arg(long)]
    post: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Number of pairs, spread over all scenarios
    #[arg(long, default_value_t = 60, conflicts_with = "mix")]
    pairs: usize,
    /// Explicit scenario counts, e.g. `method-rename=5,greedy-trap=2`
    #[arg(long)]
    mix: Option<String>,
}

/// Styled output unless disabled or not a terminal.
struct Style {
    on: bool,
}

impl Style {
    fn detect() -> Self {
        Style {
            on: std::env::var_os("WARNTRACK_NO_COLOR").is_none() && std::io::stdout().is_terminal(),
        }
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.on {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                    path: parent.display().to_string(),
                    source,
                })?;
            }
            std::fs::write(p, text).map_err(|source| Error::Io {
                path: p.display().to_string(),
                source,
            })
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

struct PairInputs<'a> {
    pre_root: &'a Path,
    post_root: &'a Path,
    pre_warnings: &'a Path,
    post_warnings: &'a Path,
    format: ReportFormat,
    refactorings: Option<&'a Path>,
    commits: CommitIds,
}

fn track_pair(
    approach: Approach,
    input: &PairInputs<'_>,
    opts: &ParseOptions,
    cfg: &MatchConfig,
) -> Result<TrackingReport, Error> {
    let pre = parse_report(input.format, &read(input.pre_warnings)?, Side::Pre, opts)?;
    let post = parse_report(input.format, &read(input.post_warnings)?, Side::Post, opts)?;
    let records = match input.refactorings {
        Some(p) if approach == Approach::Improved => parse_refactorings(&read(p)?)?,
        _ => Vec::new(),
    };
    for root in [input.pre_root, input.post_root] {
        if !root.is_dir() {
            return Err(Error::FileMissing(root.display().to_string()));
        }
    }
    let pre_src = SourceTree::open(input.pre_root);
    let post_src = SourceTree::open(input.post_root);
    track(
        approach,
        &pre,
        &post,
        &pre_src,
        &post_src,
        &records,
        cfg,
        &input.commits,
    )
}

fn cmd_track(args: TrackArgs) -> Result<(), Error> {
    let approach = Approach::from(args.approach);
    let cfg = match &args.config {
        Some(p) => MatchConfig::load(p)?,
        None => MatchConfig::default(),
    };
    let opts = ParseOptions {
        project: args.project.clone(),
        strip_prefix: args.strip_prefix.clone(),
    };
    if approach == Approach::Soa && args.refactorings.is_some() {
        eprintln!(
            "note: the soa approach does not use refactoring records; --refactorings is ignored"
        );
    }
    if let Some(manifest) = &args.manifest {
        return track_manifest(approach, manifest, &args, &opts, &cfg);
    }
    let input = PairInputs {
        pre_root: args.pre_root.as_deref().expect("required by clap"),
        post_root: args.post_root.as_deref().expect("required by clap"),
        pre_warnings: args.pre_warnings.as_deref().expect("required by clap"),
        post_warnings: args.post_warnings.as_deref().expect("required by clap"),
        format: args.format.into(),
        refactorings: args.refactorings.as_deref(),
        commits: CommitIds {
            pre: args.pre_commit.clone(),
            post: args.post_commit.clone(),
        },
    };
    let report = track_pair(approach, &input, &opts, &cfg)?;
    write_out(args.out.as_deref(), &report.to_json())
}

fn track_manifest(
    approach: Approach,
    manifest_path: &Path,
    args: &TrackArgs,
    opts: &ParseOptions,
    cfg: &MatchConfig,
) -> Result<(), Error> {
    let manifest = Manifest::load(manifest_path)?;
    let out_dir = args
        .out
        .clone()
        .ok_or_else(|| Error::Config("--manifest needs --out <directory>".into()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let run = |e: &ManifestEntry| -> Result<(TrackingReport, Option<MetricsReport>), Error> {
        let at = |rel: &str| Manifest::resolve(manifest_path, rel);
        let (pre_root, post_root) = (at(&e.pre_root), at(&e.post_root));
        let (pre_w, post_w) = (at(&e.pre_warnings), at(&e.post_warnings));
        let refs = e.refactorings.as_deref().map(at);
        let input = PairInputs {
            pre_root: &pre_root,
            post_root: &post_root,
            pre_warnings: &pre_w,
            post_warnings: &post_w,
            format: e.format.parse()?,
            refactorings: refs.as_deref(),
            commits: CommitIds {
                pre: e.pre_commit.clone(),
                post: e.post_commit.clone(),
            },
        };
        let report = track_pair(approach, &input, opts, cfg)?;
        let metrics = match &e.labels {
            Some(l) => Some(compute_metrics(&report, &parse_labels(&read(&at(l))?)?)?),
            None => None,
        };
        write_out(
            Some(&out_dir.join(format!("{}.json", e.name))),
            &report.to_json(),
        )?;
        Ok((report, metrics))
    };
    let results: Vec<_> = pool.install(|| manifest.pairs.par_iter().map(run).collect());
    let mut all_metrics = Vec::new();
    for (e, r) in manifest.pairs.iter().zip(results) {
        let (report, metrics) = r.map_err(|err| annotate(&e.name, err))?;
        println!(
            "{}: {} persistent, {} resolved, {} newly introduced",
            e.name,
            report.persistent_count(),
            report.resolved.len(),
            report.newly_introduced.len()
        );
        all_metrics.extend(metrics);
    }
    if !all_metrics.is_empty() {
        let total = MetricsReport::aggregate(&all_metrics);
        print!("{}", render_table(&[(approach.as_str(), &total)]));
    }
    Ok(())
}

fn annotate(pair: &str, err: Error) -> Error {
    match err {
        Error::SchemaViolation(m) => Error::SchemaViolation(format!("{pair}: {m}")),
        Error::Config(m) => Error::Config(format!("{pair}: {m}")),
        other => other,
    }
}

fn cmd_eval(args: EvalArgs) -> Result<(), Error> {
    if args.reports.len() > 2 {
        return Err(Error::Config("--report accepts at most two reports".into()));
    }
    let labels = parse_labels(&read(&args.labels)?)?;
    let mut columns = Vec::new();
    for path in &args.reports {
        let text = String::from_utf8_lossy(&read(path)?).into_owned();
        let report = TrackingReport::from_json(&text)?;
        let metrics = compute_metrics(&report, &labels)?;
        columns.push((report.approach.as_str().to_string(), metrics));
    }
    let text = if args.json {
        let value = match columns.as_slice() {
            [(_, one)] => serde_json::to_value(one),
            [(_, soa), (_, imp)] => serde_json::to_value(compare_approaches(soa, imp)),
            _ => unreachable!("one or two reports"),
        }
        .expect("metrics serialize");
        serde_json::to_string_pretty(&value).expect("value serializes") + "\n"
    } else {
        let style = Style::detect();
        let named: Vec<(&str, &MetricsReport)> =
            columns.iter().map(|(n, m)| (n.as_str(), m)).collect();
        let table = render_table(&named);
        let mut lines = table.lines();
        let mut out = style.paint("1", lines.next().unwrap_or("")) + "\n";
        for l in lines {
            out.push_str(l);
            out.push('\n');
        }
        if let [(_, soa), (_, imp)] = columns.as_slice() {
            let c = compare_approaches(soa, imp);
            out.push_str(&format!(
                "FP count change: {:+}, precision change: {:+.1} points\n",
                c.fp_count_delta,
                c.precision_delta * 100.0
            ));
        }
        out
    };
    write_out(None, &text)
}

fn cmd_diff(args: DiffArgs) -> Result<(), Error> {
    let load = |p: &Path| -> Result<Vec<String>, Error> {
        Ok(split_lines(&String::from_utf8_lossy(&read(p)?)))
    };
    let (a, b) = (load(&args.pre)?, load(&args.post)?);
    let script = compute_diff(&a, &b);
    let style = Style::detect();
    let mut out = String::new();
    for line in script.render(&a, &b).lines() {
        let painted = match line.as_bytes().first() {
            Some(b'@') => style.paint("36", line),
            Some(b'-') => style.paint("31", line),
            Some(b'+') => style.paint("32", line),
            _ => line.to_string(),
        };
        out.push_str(&painted);
        out.push('\n');
    }
    out.push_str(&style.paint("1", "pre -> post"));
    out.push('\n');
    for (line, image) in build_line_mapping(&script).iter() {
        let shown = match image {
            LineImage::Exact(p) => p.to_string(),
            LineImage::Interval(r) => format!("[{}, {}]", r.start(), r.end()),
            LineImage::Absent => "-".to_string(),
        };
        out.push_str(&format!("{line} -> {shown}\n"));
    }
    write_out(None, &out)
}

fn cmd_gen_corpus(args: GenArgs) -> Result<(), Error> {
    let cfg = match &args.mix {
        Some(mix) => CorpusConfig::with_mix(args.seed, mix)?,
        None => CorpusConfig::balanced(args.seed, args.pairs),
    };
    let corpus = Corpus::generate(&cfg);
    let manifest = corpus.write_to(&args.out)?;
    println!(
        "wrote {} commit pairs to {} ({:.1}% refactoring-affected pre warnings)",
        manifest.pairs.len(),
        args.out.display(),
        corpus.affected_fraction() * 100.0
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Track(a) => cmd_track(*a),
        Command::Eval(a) => cmd_eval(a),
        Command::Diff(a) => cmd_diff(a),
        Command::GenCorpus(a) => cmd_gen_corpus(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("warntrack: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
