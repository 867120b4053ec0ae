//! Exhaustive scans over canonical profiles and the boundary report.
//!
//! A scan writes one JSON object per line:
//!
//! ```text
//! {"index":17,"verdict":"feasible","nodes":42,"millis":3,"witness":"scan.jsonl.witnesses/17.txt"}
//! ```
//!
//! `witness` is present only when witnesses are stored; the path is relative
//! to the directory of the record file.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constructive::{embed_m_dim, embed_n_dim};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::geometry::{parse_embedding, verify_embedding, Metric};
use crate::profile::{enumerate_canonical, random_profile, PreferenceProfile};
use crate::recognizer::{recognize_2d_with, RecognitionOutcome, RecognizerConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanVerdict {
    Feasible,
    Infeasible,
    Undecided,
}

impl ScanVerdict {
    pub fn of(outcome: &RecognitionOutcome) -> Self {
        if outcome.is_feasible() {
            ScanVerdict::Feasible
        } else if outcome.is_infeasible() {
            ScanVerdict::Infeasible
        } else {
            ScanVerdict::Undecided
        }
    }
}

impl fmt::Display for ScanVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanVerdict::Feasible => "feasible",
            ScanVerdict::Infeasible => "infeasible",
            ScanVerdict::Undecided => "undecided",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub index: u64,
    pub verdict: ScanVerdict,
    pub nodes: u64,
    pub millis: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Half-open canonical index range; `None` is the whole enumeration.
    pub shard: Option<(u64, u64)>,
    pub store_witnesses: bool,
    /// Per-profile node cap.
    pub budget: Option<u64>,
    pub threads: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { shard: None, store_witnesses: false, budget: None, threads: 1 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub n: usize,
    pub m: usize,
    pub start: u64,
    pub end: u64,
    pub total: u64,
    pub feasible: u64,
    pub infeasible: u64,
    pub undecided: u64,
    /// Records already present in the output file and not re-solved.
    pub resumed: u64,
    pub millis: u64,
}

impl ScanSummary {
    fn count(&mut self, v: ScanVerdict) {
        self.total += 1;
        match v {
            ScanVerdict::Feasible => self.feasible += 1,
            ScanVerdict::Infeasible => self.infeasible += 1,
            ScanVerdict::Undecided => self.undecided += 1,
        }
    }
}

/// Parses a record file. A truncated final line (an interrupted write) is
/// ignored; any other malformed line is an error.
pub fn read_records(path: &Path) -> Result<Vec<ScanRecord>> {
    let text = fs::read_to_string(path)?;
    let complete = text.ends_with('\n');
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(r) => out.push(r),
            Err(_) if i + 1 == lines.len() && !complete => {}
            Err(e) => return Err(Error::Parse { line: i + 1, msg: e.to_string() }),
        }
    }
    Ok(out)
}

fn witness_dir(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".witnesses");
    out.with_file_name(name)
}

/// Runs the recognizer over canonical `(n, m)` profiles in the shard and
/// appends one record per profile to `out`. Indices already recorded in
/// `out` are skipped.
pub fn scan(n: usize, m: usize, opts: &ScanOptions, out: &Path) -> Result<ScanSummary> {
    let started = Instant::now();
    let profiles = enumerate_canonical(n, m)?;
    if profiles.is_empty() {
        return Err(Error::InvalidParameter(format!("no canonical profiles with {n} voters over {m} alternatives")));
    }
    let (start, end) = opts.shard.unwrap_or((0, profiles.len()));
    if start > end || end > profiles.len() {
        return Err(Error::InvalidParameter(format!("shard {start}:{end} outside 0:{}", profiles.len())));
    }
    let mut summary = ScanSummary { n, m, start, end, ..ScanSummary::default() };
    let mut done = HashSet::new();
    if out.exists() {
        for r in read_records(out)? {
            if (start..end).contains(&r.index) && done.insert(r.index) {
                summary.count(r.verdict);
                summary.resumed += 1;
            }
        }
        // drop the tail of an interrupted write
        let bytes = fs::read(out)?;
        if bytes.last().is_some_and(|&b| b != b'\n') {
            let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            OpenOptions::new().write(true).open(out)?.set_len(keep as u64)?;
        }
    }
    let wdir = witness_dir(out);
    if opts.store_witnesses {
        fs::create_dir_all(&wdir)?;
    }
    let wdir_name = wdir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut file = OpenOptions::new().create(true).append(true).open(out)?;
    let config = RecognizerConfig { budget: opts.budget, obstruction_fast_path: true };
    let next = AtomicU64::new(start);
    let (tx, rx) = mpsc::channel::<Result<(ScanRecord, Option<String>)>>();

    std::thread::scope(|s| -> Result<()> {
        for _ in 0..opts.threads.max(1) {
            let tx = tx.clone();
            let (next, done, profiles, config) = (&next, &done, &profiles, &config);
            let store = opts.store_witnesses;
            s.spawn(move || loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= end {
                    break;
                }
                if done.contains(&index) {
                    continue;
                }
                let p = profiles.get(index).expect("index within enumeration");
                let t = Instant::now();
                let res = recognize_2d_with(&p, config).map(|o| {
                    let witness = if store { o.witness().map(|e| e.to_text()) } else { None };
                    let rec = ScanRecord {
                        index,
                        verdict: ScanVerdict::of(&o),
                        nodes: o.stats.nodes,
                        millis: t.elapsed().as_millis() as u64,
                        witness: None,
                    };
                    (rec, witness)
                });
                let failed = res.is_err();
                if tx.send(res).is_err() || failed {
                    break;
                }
            });
        }
        drop(tx);
        for msg in rx {
            let (mut rec, witness) = msg?;
            if let Some(text) = witness {
                let name = format!("{}.txt", rec.index);
                fs::write(wdir.join(&name), text)?;
                rec.witness = Some(format!("{wdir_name}/{name}"));
            }
            summary.count(rec.verdict);
            writeln!(file, "{}", serde_json::to_string(&rec)?)?;
            file.flush()?;
        }
        Ok(())
    })?;
    summary.millis = started.elapsed().as_millis() as u64;
    Ok(summary)
}

/// Re-verifies every stored witness of a record file against its canonical
/// profile; returns how many were checked.
pub fn verify_stored_witnesses(n: usize, m: usize, records: &Path) -> Result<usize> {
    let profiles = enumerate_canonical(n, m)?;
    let base = records.parent().unwrap_or(Path::new("."));
    let mut checked = 0;
    for r in read_records(records)? {
        let Some(rel) = &r.witness else { continue };
        let p = profiles
            .get(r.index)
            .ok_or(Error::IndexOutOfRange { what: "profile", index: r.index as usize, max: profiles.len() as usize })?;
        let e = parse_embedding(&fs::read_to_string(base.join(rel))?)?;
        let v = verify_embedding(&p, &e, Metric::L1)?;
        if !v.is_consistent() {
            return Err(Error::Verification(format!("stored witness for profile {} rejected: {v:?}", r.index)));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Merges shard files into one record list sorted by index; later files win
/// on duplicate indices.
pub fn merge_records(paths: &[PathBuf]) -> Result<Vec<ScanRecord>> {
    let mut by_index = BTreeMap::new();
    for p in paths {
        let f = BufReader::new(File::open(p)?);
        for (i, line) in f.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let r: ScanRecord =
                serde_json::from_str(&line).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
            by_index.insert(r.index, r);
        }
    }
    Ok(by_index.into_values().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierCell {
    pub name: String,
    pub voters: usize,
    pub alts: usize,
    pub expected: ScanVerdict,
    pub profiles: u64,
    /// Profiles whose observed verdict differs from `expected`.
    pub mismatches: u64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontierReport {
    pub cells: Vec<FrontierCell>,
}

impl FrontierReport {
    pub fn all_pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn cell(&self, name: &str) -> Option<&FrontierCell> {
        self.cells.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for FrontierReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:>3} {:>3} {:>10} {:>8} {:>9}  result", "cell", "n", "m", "expected", "profiles", "mismatch")?;
        for c in &self.cells {
            writeln!(
                f,
                "{:<28} {:>3} {:>3} {:>10} {:>8} {:>9}  {}",
                c.name,
                c.voters,
                c.alts,
                c.expected.to_string(),
                c.profiles,
                c.mismatches,
                if c.pass { "pass" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FrontierOptions {
    /// Random profiles per sampled cell.
    pub samples: usize,
    pub seed: u64,
    /// Include the exhaustive (3,5) and (4,4) cells.
    pub exhaustive: bool,
    /// The three-voter six-alternative counterexample. If it differs from the
    /// library fixture its expected verdict is recomputed with the default
    /// recognizer.
    pub three_voter_counterexample: PreferenceProfile,
}

impl Default for FrontierOptions {
    fn default() -> Self {
        FrontierOptions { samples: 20, seed: 7, exhaustive: true, three_voter_counterexample: fixtures::three_voter_counterexample() }
    }
}

/// Runs the boundary table with the default recognizer.
pub fn frontier_check(opts: &FrontierOptions) -> Result<FrontierReport> {
    frontier_check_with(opts, &|p| Ok(ScanVerdict::of(&recognize_2d_with(p, &RecognizerConfig::default())?)))
}

type Recognize<'a> = &'a (dyn Fn(&PreferenceProfile) -> Result<ScanVerdict> + Sync);

/// Runs the boundary table with an arbitrary recognizer.
pub fn frontier_check_with(opts: &FrontierOptions, recognize: Recognize<'_>) -> Result<FrontierReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut report = FrontierReport::default();

    let cell = |name: String, n: usize, m: usize, expected: ScanVerdict, ps: &mut dyn Iterator<Item = PreferenceProfile>| -> Result<FrontierCell> {
        let mut c = FrontierCell { name, voters: n, alts: m, expected, profiles: 0, mismatches: 0, pass: true, notes: vec![] };
        for p in ps {
            c.profiles += 1;
            let got = recognize(&p)?;
            if got != expected {
                c.mismatches += 1;
                if c.notes.len() < 3 {
                    c.notes.push(format!("observed {got} on [{}]", p.to_text().trim().replace('\n', " / ")));
                }
            }
        }
        c.pass = c.mismatches == 0 && c.profiles > 0;
        Ok(c)
    };

    // two voters: the voter-axis construction is already planar
    for m in 1..=6 {
        let ps: Vec<_> = (0..opts.samples).map(|_| random_profile(&mut rng, 2, m)).collect();
        let mut c = cell(format!("two voters, m={m}"), 2, m, ScanVerdict::Feasible, &mut ps.clone().into_iter())?;
        for p in &ps {
            if !verify_embedding(p, &embed_n_dim(p), Metric::L1)?.is_consistent() {
                c.pass = false;
                c.notes.push("construction rejected".into());
            }
        }
        report.cells.push(c);
    }
    // three alternatives: the alternative-axis construction is planar
    for n in 1..=6 {
        let ps: Vec<_> = (0..opts.samples).map(|_| random_profile(&mut rng, n, 3)).collect();
        let mut c = cell(format!("three alternatives, n={n}"), n, 3, ScanVerdict::Feasible, &mut ps.clone().into_iter())?;
        for p in &ps {
            if !verify_embedding(p, &embed_m_dim(p)?, Metric::L1)?.is_consistent() {
                c.pass = false;
                c.notes.push("construction rejected".into());
            }
        }
        report.cells.push(c);
    }
    if opts.exhaustive {
        for (n, m) in [(3, 5), (4, 4)] {
            let all = enumerate_canonical(n, m)?;
            let mut it = all.iter().map(|(_, p)| p);
            report.cells.push(cell(format!("exhaustive ({n},{m})"), n, m, ScanVerdict::Feasible, &mut it)?);
        }
    }

    let p = &opts.three_voter_counterexample;
    let mut notes = vec![];
    let expected = if *p == fixtures::three_voter_counterexample() {
        ScanVerdict::Infeasible
    } else {
        notes.push("expected verdict recomputed for a modified profile".to_string());
        ScanVerdict::of(&recognize_2d_with(p, &RecognizerConfig::default())?)
    };
    let mut c = cell("three voters, six alts".into(), p.n(), p.m(), expected, &mut std::iter::once(p.clone()))?;
    c.notes.extend(notes);
    report.cells.push(c);
    let spec = fixtures::four_voter_counterexample_spec();
    let mut it = spec.expand().into_iter();
    report.cells.push(cell("four voters, five alts".into(), spec.n(), spec.m(), ScanVerdict::Infeasible, &mut it)?);
    let spec = fixtures::five_voter_counterexample_spec();
    let mut it = spec.expand().into_iter();
    report.cells.push(cell("five voters, four alts".into(), spec.n(), spec.m(), ScanVerdict::Infeasible, &mut it)?);
    Ok(report)
}
