//! Batch command line: `validate`, `klassen`, `lq`, `hac` and `mvhac`.
//!
//! Exit codes: 0 on success, 1 for invalid data or a failed stage (the
//! diagnostic names the file, row and column, or the stage), 2 for usage
//! errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::dataset::{self, parse_panel, validate_input, AnalysisInput, DatasetError, Panel};
use crate::hac::{agglomerate, HacError, Linkage};
use crate::klassen::{klassen_districts, klassen_sectors, KlassenError};
use crate::lq::{lq_profile, LqError, DEFAULT_EPSILON};
use crate::multiview::{run_mvhac, FeatureSource, MvhacConfig, MvhacError};
use crate::output::{
    indicator_csv, klassen_csv, lq_values_csv, render_klassen_table, render_lq_table,
    render_tables, render_text, report_json, to_dot, to_newick, DendrogramReport, KlassenSection,
    LqSection,
};

#[derive(Debug, Parser)]
#[command(name = "mvhac", version, about = "Klassen quadrants, location quotients and per-quadrant clustering of regional GRDP panels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that two panels parse and describe the same regions and sectors.
    Validate(PairArgs),
    /// District-level (and optionally sector-level) Klassen typology.
    Klassen(KlassenArgs),
    /// Location quotients of the current panel.
    Lq(LqArgs),
    /// Cluster the rows of a numeric CSV (`label,x1,x2,...`).
    Hac(HacArgs),
    /// Full pipeline: Klassen quadrants, then clustering inside each quadrant.
    Mvhac(MvhacArgs),
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Current-year panel CSV.
    #[arg(long)]
    current: PathBuf,
    /// Previous-year panel CSV.
    #[arg(long)]
    previous: PathBuf,
    /// Region id of the reference (province) row.
    #[arg(long)]
    reference: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct KlassenArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Also classify every (district, sector) cell.
    #[arg(long)]
    sectors: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: TableFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LqArgs {
    #[arg(long)]
    current: PathBuf,
    #[arg(long)]
    reference: String,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// With `--format csv`, write quotients instead of ±1 indicators.
    #[arg(long)]
    values: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: TableFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TreeFormat {
    Newick,
    Dot,
    Text,
    Json,
}

#[derive(Debug, Args)]
struct HacArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "average")]
    linkage: Linkage,
    #[arg(long, value_enum, default_value = "newick")]
    format: TreeFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct MvhacArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value = "average")]
    linkage: Linkage,
    /// lq, raw_current or growth_contribution.
    #[arg(long, default_value = "lq")]
    features: FeatureSource,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// z-score feature columns inside each quadrant.
    #[arg(long)]
    standardize: bool,
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    /// Directory for one Newick file per nonempty quadrant (`Q1.nwk`...).
    #[arg(long)]
    newick: Option<PathBuf>,
    /// Directory for one DOT file per nonempty quadrant (`Q1.dot`...).
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Directory for `klassen.csv`, `indicators.csv`, `lq.csv` and `tables.txt`.
    #[arg(long)]
    tables: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Data {
        path: PathBuf,
        source: DatasetError,
    },
    #[error("{0}")]
    Pair(DatasetError),
    #[error("klassen: {0}")]
    Klassen(#[from] KlassenError),
    #[error("lq: {0}")]
    Lq(#[from] LqError),
    #[error("hac: {0}")]
    Hac(#[from] HacError),
    #[error("{0}")]
    Mvhac(#[from] MvhacError),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_panel(path: &Path, reference: &str, year: &str) -> Result<Panel, CliError> {
    let mut panel = parse_panel(&read(path)?, reference).map_err(|source| CliError::Data {
        path: path.to_path_buf(),
        source,
    })?;
    panel.year = year.to_string();
    Ok(panel)
}

fn load_pair(args: &PairArgs) -> Result<AnalysisInput, CliError> {
    let current = load_panel(&args.current, &args.reference, dataset::CURRENT_YEAR)?;
    let previous = load_panel(&args.previous, &args.reference, dataset::PREVIOUS_YEAR)?;
    validate_input(current, previous).map_err(CliError::Pair)
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => write(path, text),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Reads `label,x1,x2,...` rows; the header row is skipped. Unlike panels,
/// negative coordinates are allowed.
fn parse_observations(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| DatasetError::Csv(e.to_string()))?
        .clone();
    if header.len() < 2 {
        return Err(DatasetError::NoSectors);
    }
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DatasetError::Csv(e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header.len() {
            return Err(DatasetError::RaggedRow {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        let label = record.get(0).unwrap_or("").to_string();
        let mut row = Vec::with_capacity(header.len() - 1);
        for (cell, column) in record.iter().skip(1).zip(header.iter().skip(1)) {
            let value = dataset::parse_decimal(cell).ok_or_else(|| DatasetError::NonNumeric {
                line,
                region: label.clone(),
                column: column.to_string(),
                value: cell.to_string(),
            })?;
            row.push(value);
        }
        labels.push(label);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(DatasetError::EmptyBody);
    }
    Ok((labels, rows))
}

fn run(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Validate(args) => {
            let input = load_pair(&args)?;
            let msg = format!(
                "ok: {} district(s), {} sector(s), reference {}\n",
                input.district_ids().len(),
                input.sector_names().len(),
                input.reference()
            );
            emit(&None, &msg, stdout)
        }
        Command::Klassen(args) => {
            let input = load_pair(&args.pair)?;
            let mut result = klassen_districts(&input)?;
            if args.sectors {
                result.sectors = Some(klassen_sectors(&input)?);
            }
            let text = match args.format {
                TableFormat::Text => render_klassen_table(&result),
                TableFormat::Csv => klassen_csv(&result),
                TableFormat::Json => json(&KlassenSection::from_result(&result)),
            };
            emit(&args.out, &text, stdout)
        }
        Command::Lq(args) => {
            let panel = load_panel(&args.current, &args.reference, dataset::CURRENT_YEAR)?;
            let profile = lq_profile(&panel, args.epsilon)?;
            let text = match args.format {
                TableFormat::Text => render_lq_table(&profile),
                TableFormat::Csv if args.values => lq_values_csv(&profile),
                TableFormat::Csv => indicator_csv(&profile),
                TableFormat::Json => json(&LqSection::from_profile(&profile)),
            };
            emit(&args.out, &text, stdout)
        }
        Command::Hac(args) => {
            let (labels, rows) = parse_observations(&read(&args.input)?).map_err(|source| CliError::Data {
                path: args.input.clone(),
                source,
            })?;
            let dendrogram = agglomerate(&rows, args.linkage)?.with_labels(labels)?;
            let text = match args.format {
                TreeFormat::Newick => format!("{}\n", to_newick(&dendrogram)),
                TreeFormat::Dot => to_dot(&dendrogram),
                TreeFormat::Text => render_text(&dendrogram),
                TreeFormat::Json => json(&DendrogramReport::from_dendrogram(&dendrogram)),
            };
            emit(&args.out, &text, stdout)
        }
        Command::Mvhac(args) => {
            let input = load_pair(&args.pair)?;
            let config = MvhacConfig {
                linkage: args.linkage,
                epsilon: args.epsilon,
                features: args.features,
                standardize: args.standardize,
            };
            let result = run_mvhac(&input, &config)?;

            let text = match args.format {
                ReportFormat::Json => report_json(&result),
                ReportFormat::Text => {
                    let mut s = render_tables(&result);
                    for v in &result.views {
                        s.push_str(&format!("\n{} {}\n", v.quadrant.code(), v.quadrant.label()));
                        match &v.dendrogram {
                            Some(d) => s.push_str(&render_text(d)),
                            None => s.push_str("(empty)\n"),
                        }
                    }
                    s
                }
            };
            emit(&args.out, &text, stdout)?;

            for (dir, ext, render) in [
                (&args.newick, "nwk", (|d| format!("{}\n", to_newick(d))) as fn(&_) -> String),
                (&args.dot, "dot", |d| to_dot(d)),
            ] {
                let Some(dir) = dir else { continue };
                create_dir(dir)?;
                for v in &result.views {
                    if let Some(d) = &v.dendrogram {
                        write(&dir.join(format!("{}.{ext}", v.quadrant.code())), &render(d))?;
                    }
                }
            }
            if let Some(dir) = &args.tables {
                create_dir(dir)?;
                write(&dir.join("klassen.csv"), &klassen_csv(&result.klassen))?;
                write(&dir.join("indicators.csv"), &indicator_csv(&result.lq))?;
                write(&dir.join("lq.csv"), &lq_values_csv(&result.lq))?;
                write(&dir.join("tables.txt"), &render_tables(&result))?;
            }
            Ok(())
        }
    }
}

/// Runs the CLI with `args` (including the program name) and returns the
/// process exit code.
pub fn cli_main<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    match run(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
