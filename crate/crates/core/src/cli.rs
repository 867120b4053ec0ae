//! Command-line front end. Exit codes: 0 success or feasible, 2 usage or
//! input error, 3 infeasible or inconsistent, 4 undecided, 5 internal
//! verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::constructive::{embed_m_dim_with_origin, embed_n_dim_with, NDimParameters};
use crate::error::{Error, Result};
use crate::experiments::{frontier_check, scan, FrontierOptions, ScanOptions};
use crate::geometry::{parse_embedding, verify_embedding, Embedding, Metric};
use crate::obstructions::{all_certificates, three_voter_obstruction};
use crate::profile::{parse_profile, parse_spec, PreferenceProfile};
use crate::recognizer::{recognize_2d_with, RecognizerConfig};
use crate::render::{render_embedding, FigureSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_UNDECIDED: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "manhattan", version, about = "Manhattan embeddings of preference profiles")]
pub struct Cli {
    /// Print coordinates as decimals instead of exact rationals.
    #[arg(long, global = true)]
    decimal: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    L1,
    L2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    NDim,
    MDim,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a profile (or a tie-group pattern) and print it normalized.
    ParseCheck {
        #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
        profile: Option<PathBuf>,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Check an embedding against a profile.
    Verify {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long, value_enum, default_value = "l1")]
        metric: MetricArg,
    },
    /// Build a high-dimensional Manhattan embedding.
    Embed {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        profile: PathBuf,
        /// Offset constant of the n-dim method (default n*m).
        #[arg(long)]
        offset: Option<usize>,
        /// Alternative placed at the origin by the m-dim method (default m).
        #[arg(long)]
        origin: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List BE/EX certificates and three-voter obstructions.
    Detect {
        #[arg(long)]
        profile: PathBuf,
    },
    /// Decide whether a profile embeds in the L1 plane.
    Recognize {
        #[arg(long)]
        profile: PathBuf,
        /// Node limit; exhausting it yields "undecided".
        #[arg(long)]
        budget: Option<u64>,
        /// Skip the three-voter obstruction test.
        #[arg(long)]
        no_fast_path: bool,
        /// Also write the witness embedding to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recognize every canonical profile of a size, writing JSON lines.
    Scan {
        #[arg(long)]
        voters: usize,
        #[arg(long)]
        alts: usize,
        /// Canonical index range `a:b` (half-open).
        #[arg(long, value_parser = parse_shard)]
        shard: Option<(u64, u64)>,
        #[arg(long)]
        store_witnesses: bool,
        #[arg(long)]
        budget: Option<u64>,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the known feasible and infeasible sizes.
    Frontier {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Skip the exhaustive (3,5) and (4,4) cells.
        #[arg(long)]
        quick: bool,
    },
    /// Draw a planar embedding as SVG.
    Plot {
        #[arg(long)]
        embedding: PathBuf,
        /// Voters whose circles are drawn, e.g. `v1,v2` or `1,2`.
        #[arg(long, default_value = "")]
        circles: String,
        #[arg(long, default_value_t = 10)]
        scale: i64,
        #[arg(long)]
        no_labels: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_shard(s: &str) -> std::result::Result<(u64, u64), String> {
    let (a, b) = s.split_once(':').ok_or("expected a:b")?;
    let a = a.trim().parse().map_err(|_| format!("bad shard start {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad shard end {b:?}"))?;
    if a > b {
        return Err("shard start exceeds end".into());
    }
    Ok((a, b))
}

fn parse_voters(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.trim_start_matches(['v', 'V']).parse::<usize>().map_err(|_| format!("bad voter {t:?}")))
        .collect()
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Verification(_) => EXIT_INTERNAL,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(Error::from)
}

fn load_profile(path: &Path) -> Result<PreferenceProfile> {
    parse_profile(&read(path)?)
}

fn embedding_text(e: &Embedding, decimal: bool) -> String {
    if !decimal {
        return e.to_text();
    }
    let mut s = format!("{} {} {}\n", e.dim(), e.voters().len(), e.alts().len());
    for p in e.voters().iter().chain(e.alts()) {
        let row: Vec<String> = p.coords().iter().map(|c| c.to_decimal(6)).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::ParseCheck { profile, spec } => {
            if let Some(path) = spec {
                let s = parse_spec(&read(path)?)?;
                print!("{s}");
                println!("# {} expansion(s)", s.expansion_count());
            } else if let Some(path) = profile {
                print!("{}", load_profile(path)?.to_text());
            }
            Ok(EXIT_OK)
        }
        Command::Verify { profile, embedding, metric } => {
            let p = load_profile(profile)?;
            let e = parse_embedding(&read(embedding)?)?;
            let metric = match metric {
                MetricArg::L1 => Metric::L1,
                MetricArg::L2 => Metric::L2,
            };
            let v = verify_embedding(&p, &e, metric)?;
            println!("{}", serde_json::to_string(&v)?);
            Ok(if v.is_consistent() { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::Embed { method, profile, offset, origin, out } => {
            let p = load_profile(profile)?;
            let e = match method {
                Method::NDim => {
                    let params = match offset {
                        Some(k) => NDimParameters::with_offset(&p, *k)?,
                        None => NDimParameters::default_for(&p),
                    };
                    embed_n_dim_with(&p, params)
                }
                Method::MDim => embed_m_dim_with_origin(&p, origin.unwrap_or(p.m()))?,
            };
            if !verify_embedding(&p, &e, Metric::L1)?.is_consistent() {
                return Err(Error::Verification("construction failed verification".into()));
            }
            emit(&embedding_text(&e, cli.decimal), out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Detect { profile } => {
            let p = load_profile(profile)?;
            let mut triples = vec![];
            for i in 1..=p.n() {
                for j in i + 1..=p.n() {
                    for k in j + 1..=p.n() {
                        let v = three_voter_obstruction(&p, [i, j, k])?;
                        triples.push(json!({ "voters": [i, j, k], "verdict": v }));
                    }
                }
            }
            let report = json!({ "certificates": all_certificates(&p), "triples": triples });
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(EXIT_OK)
        }
        Command::Recognize { profile, budget, no_fast_path, out } => {
            let p = load_profile(profile)?;
            let cfg = RecognizerConfig { budget: *budget, obstruction_fast_path: !no_fast_path };
            let o = recognize_2d_with(&p, &cfg)?;
            let witness = o.witness().map(|e| embedding_text(e, cli.decimal));
            if let (Some(path), Some(text)) = (out, &witness) {
                fs::write(path, text)?;
            }
            let mut report = json!({
                "verdict": o.label(),
                "nodes": o.stats.nodes,
                "prunes": o.stats.prunes,
                "millis": o.stats.millis,
            });
            if let Some(text) = witness {
                report["witness"] = json!(text);
            }
            if let Some(c) = &o.fast_certificate {
                report["obstruction"] = serde_json::to_value(c)?;
            }
            println!("{}", serde_json::to_string(&report)?);
            Ok(if o.is_feasible() {
                EXIT_OK
            } else if o.is_infeasible() {
                EXIT_INFEASIBLE
            } else {
                EXIT_UNDECIDED
            })
        }
        Command::Scan { voters, alts, shard, store_witnesses, budget, threads, out } => {
            let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let opts = ScanOptions { shard: *shard, store_witnesses: *store_witnesses, budget: *budget, threads };
            let s = scan(*voters, *alts, &opts, out)?;
            println!("{}", serde_json::to_string(&s)?);
            Ok(if s.infeasible > 0 {
                EXIT_INFEASIBLE
            } else if s.undecided > 0 {
                EXIT_UNDECIDED
            } else {
                EXIT_OK
            })
        }
        Command::Frontier { out, samples, seed, quick } => {
            let opts = FrontierOptions { samples: *samples, seed: *seed, exhaustive: !quick, ..FrontierOptions::default() };
            let report = frontier_check(&opts)?;
            print!("{report}");
            if let Some(path) = out {
                fs::write(path, serde_json::to_string_pretty(&report)?)?;
            }
            Ok(if report.all_pass() { EXIT_OK } else { EXIT_INTERNAL })
        }
        Command::Plot { embedding, circles, scale, no_labels, out } => {
            if *scale <= 0 {
                return Err(Error::InvalidParameter("scale must be positive".into()));
            }
            let circles = parse_voters(circles).map_err(Error::InvalidParameter)?;
            let e = parse_embedding(&read(embedding)?)?;
            let mut f = FigureSpec::new(e)?.with_circles(&circles)?;
            f.scale = (*scale).into();
            f.labels = !no_labels;
            fs::write(out, render_embedding(&f))?;
            Ok(EXIT_OK)
        }
    }
}
