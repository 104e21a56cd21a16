//! `lzsi`: build, query and inspect LZ self-indexes.
//!
//! Text positions are 1-based everywhere, in arguments and in output.

mod bench;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lzsi_core::index::{build_index, IndexConfig, IndexCore, Variant};
use lzsi_core::parsing::{compute_height, compute_source_depths, parse, Flavor};
use lzsi_core::selftest::{run_suite, SuiteOptions};
use serde_json::json;
use thiserror::Error;

/// Largest input the self-test looks at.
const SELFTEST_LIMIT: usize = 1 << 20;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<lzsi_core::Error> for CliError {
    fn from(e: lzsi_core::Error) -> Self {
        match e {
            lzsi_core::Error::OutOfRange { .. } => CliError::Usage(e.to_string()),
            lzsi_core::Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "lzsi", version, about = "Self-index over LZ77 and LZ-End parsings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an index file from a text file.
    Build {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value = "lz77")]
        flavor: Flavor,
        /// 1 both tries, 2 ids and reverse trie, 3 trie and reverse ids,
        /// 4 both ids, 5 implicit ids.
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u8).range(1..=5))]
        variant: u8,
        /// Sampling rate of the sparse bitmaps.
        #[arg(long, env = "LZSI_SAMPLE_RATE", default_value_t = 32,
              value_parser = clap::value_parser!(u64).range(1..))]
        sample_rate: u64,
    },
    /// Print the sorted start positions of a pattern.
    Locate {
        index: PathBuf,
        /// The pattern, or @FILE to read it from a file.
        pattern: String,
        #[arg(long)]
        json: bool,
    },
    /// Print the number of occurrences (found by locating them).
    Count { index: PathBuf, pattern: String },
    /// Print whether a pattern occurs.
    Exists { index: PathBuf, pattern: String },
    /// Write `length` bytes starting at `start` to standard output.
    Extract {
        index: PathBuf,
        start: usize,
        length: usize,
    },
    /// Print the parsing of a text file, one phrase per line.
    Parse {
        input: PathBuf,
        #[arg(long, default_value = "lz77")]
        flavor: Flavor,
    },
    /// Print index statistics and component sizes.
    Stats {
        index: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Time random extractions and locates.
    Bench {
        index: PathBuf,
        /// Defaults to 10, or n if shorter.
        #[arg(long)]
        pattern_len: Option<usize>,
        #[arg(long, default_value_t = 100)]
        queries: usize,
        /// Defaults to 1000, or n if shorter.
        #[arg(long)]
        extract_len: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check every flavor and variant against brute force on a text file.
    Selftest {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        patterns: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lzsi: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> CliResult {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match command {
        Command::Build {
            input,
            output,
            flavor,
            variant,
            sample_rate,
        } => {
            let text = read_input(&input)?;
            let config = IndexConfig {
                sample_rate: sample_rate as usize,
                ..IndexConfig::new(flavor, Variant::from_number(variant).expect("range checked"))
            };
            let idx = build_index(&text, config)?;
            let file = File::create(&output).map_err(|e| CliError::io(&output, e))?;
            let mut w = BufWriter::new(file);
            idx.write_to(&mut w)?;
            w.flush().map_err(|e| CliError::io(&output, e))?;
            print_stats(&mut out, &idx, false)?;
        }
        Command::Locate { index, pattern, json } => {
            let idx = load(&index)?;
            let p = pattern_bytes(&pattern)?;
            let occ = idx.locate(&p)?;
            if json {
                let v = json!({
                    "positions": occ.positions,
                    "primary": occ.primary_count,
                    "secondary": occ.secondary_count,
                });
                writeln!(out, "{v}").map_err(stdout_err)?;
            } else {
                for x in &occ.positions {
                    writeln!(out, "{x}").map_err(stdout_err)?;
                }
            }
        }
        Command::Count { index, pattern } => {
            let idx = load(&index)?;
            let n = idx.count(&pattern_bytes(&pattern)?)?;
            writeln!(out, "{n}").map_err(stdout_err)?;
        }
        Command::Exists { index, pattern } => {
            let idx = load(&index)?;
            let found = idx.exists(&pattern_bytes(&pattern)?)?;
            writeln!(out, "{found}").map_err(stdout_err)?;
        }
        Command::Extract { index, start, length } => {
            if length == 0 {
                return Err(CliError::Usage("length must be at least 1".into()));
            }
            let idx = load(&index)?;
            let bytes = idx.extract(start, start.saturating_add(length - 1))?;
            out.write_all(&bytes).map_err(stdout_err)?;
        }
        Command::Parse { input, flavor } => {
            let text = read_input(&input)?;
            let parsing = parse(&text, flavor);
            let height = compute_height(&parsing);
            let depths = compute_source_depths(&parsing);
            out.write_all(parsing.dump(&text).as_bytes()).map_err(stdout_err)?;
            writeln!(out, "h {} delta {} avg_c {:.3}", height.h, depths.delta, height.avg_c).map_err(stdout_err)?;
        }
        Command::Stats { index, json } => {
            let idx = load(&index)?;
            print_stats(&mut out, &idx, json)?;
        }
        Command::Bench {
            index,
            pattern_len,
            queries,
            extract_len,
            seed,
            json,
        } => {
            let idx = load(&index)?;
            let report = bench::run(
                &idx,
                &bench::BenchOptions {
                    pattern_len: pattern_len.unwrap_or(idx.len().min(10)),
                    queries,
                    extract_len: extract_len.unwrap_or(idx.len().min(1000)),
                    seed,
                },
            )?;
            if json {
                writeln!(out, "{}", report.to_json()).map_err(stdout_err)?;
            } else {
                out.write_all(report.to_text().as_bytes()).map_err(stdout_err)?;
            }
        }
        Command::Selftest { input, seed, patterns } => {
            let mut text = read_input(&input)?;
            text.truncate(SELFTEST_LIMIT);
            let opts = SuiteOptions {
                patterns,
                seed,
                ..Default::default()
            };
            let report = run_suite(&text, &opts)?;
            for (kind, t) in report.iter() {
                match &t.first_failure {
                    None => writeln!(out, "PASS {kind} ({} checks)", t.passed),
                    Some(d) => writeln!(out, "FAIL {kind} ({} of {} failed): {d}", t.failed, t.passed + t.failed),
                }
                .map_err(stdout_err)?;
            }
            if !report.all_passed() {
                out.flush().map_err(stdout_err)?;
                return Err(CliError::Data("self-test failed".into()));
            }
        }
    }
    out.flush().map_err(stdout_err)
}

fn stdout_err(e: io::Error) -> CliError {
    CliError::Io(format!("standard output: {e}"))
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    let text = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if text.is_empty() {
        return Err(CliError::Data(format!("{}: empty input", path.display())));
    }
    Ok(text)
}

fn load(path: &Path) -> CliResult<IndexCore> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    IndexCore::read_from(BufReader::new(file)).map_err(|e| match e {
        lzsi_core::Error::Io(e) => CliError::io(path, e),
        other => CliError::Data(format!("{}: {other}", path.display())),
    })
}

/// Inline patterns are taken as typed; `@path` reads the pattern bytes
/// from a file.
fn pattern_bytes(arg: &str) -> CliResult<Vec<u8>> {
    let bytes = match arg.strip_prefix('@') {
        Some(path) => fs::read(path).map_err(|e| CliError::io(Path::new(path), e))?,
        None => arg.as_bytes().to_vec(),
    };
    if bytes.is_empty() {
        return Err(CliError::Usage("empty pattern".into()));
    }
    Ok(bytes)
}

fn print_stats(out: &mut impl Write, idx: &IndexCore, json: bool) -> CliResult {
    let st = idx.stats();
    let res = if json {
        let components: serde_json::Map<String, serde_json::Value> =
            st.components.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let v = json!({
            "flavor": idx.flavor().to_string(),
            "variant": idx.variant().number(),
            "n": st.n,
            "n_prime": st.n_prime,
            "sigma": st.sigma,
            "h": st.h,
            "delta": st.delta,
            "avg_c": st.avg_c,
            "avg_depth": st.avg_depth,
            "components": components,
            "total_bytes": st.total_bytes,
            "lz_bits": st.lz_bits,
            "ratio_to_lz": st.ratio_to_lz(),
        });
        writeln!(out, "{v}")
    } else {
        let mut s = format!(
            "flavor {} variant {}\nn {}\nn' {}\nsigma {}\nh {}\ndelta {}\navg_c {:.3}\navg_depth {:.3}\n",
            idx.flavor(),
            idx.variant().number(),
            st.n,
            st.n_prime,
            st.sigma,
            st.h,
            st.delta,
            st.avg_c,
            st.avg_depth
        );
        for (name, bytes) in &st.components {
            s.push_str(&format!("section {name} {bytes} bytes\n"));
        }
        s.push_str(&format!(
            "total {} bytes\n|LZ| {} bits\nratio {:.3}\n",
            st.total_bytes,
            st.lz_bits,
            st.ratio_to_lz()
        ));
        out.write_all(s.as_bytes())
    };
    res.map_err(stdout_err)
}
