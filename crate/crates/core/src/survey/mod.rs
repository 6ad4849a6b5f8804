//! Parameter enumeration, resumable parallel sweeps to JSONL, and the
//! checks run over sweep output.

mod record;
mod search;
mod selftest;
mod verify;

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_integer::Integer as _;
use rayon::prelude::*;
use thiserror::Error;

use crate::exactnum::{format_rational, FactorBudget, Integer, Rational};
use crate::family::build;
use crate::localred::{support_oracle, tamagawa_with};

pub use record::{
    quick_record, JsonInt, LocalRecord, SurveyRecord, FLAG_DEGENERATE, FLAG_OK, FLAG_RATIONAL_POINT,
    SCHEMA_VERSION,
};
pub use search::{
    candidate_ts, condition1, condition2, search_v13_4, Condition2, SearchRecord, TripleSource,
};
pub use selftest::{selftest, CheckOutcome};
pub use verify::{
    dedup_by_field_and_j, rational_primes_of_t, structural_checks, verify_parity,
    verify_unique_v13_2, ParityReport, UniquenessReport, E2_J,
};

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: malformed record: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("could not build thread pool: {0}")]
    Pool(String),
}

/// All `t = r/q` in lowest terms with `q ≥ 1`, `max(|r|, q) ≤ h` and
/// `t ∉ {0, 1}`, ordered by height, then numerator, then denominator.
pub fn enumerate_t(h: u64) -> Vec<Rational> {
    let h = h as i64;
    let mut out = Vec::new();
    for height in 1..=h {
        let mut level: Vec<(i64, i64)> = (1..=height)
            .flat_map(|q| (-height..=height).map(move |r| (r, q)))
            .filter(|&(r, q)| r.abs().max(q) == height && r.gcd(&q) == 1 && r != 0 && r != q)
            .collect();
        level.sort();
        out.extend(level.into_iter().map(|(r, q)| Rational::new(Integer::from(r), Integer::from(q))));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub max_height: u64,
    pub jobs: usize,
    pub out_path: PathBuf,
    pub resume: bool,
    pub factor_budget: FactorBudget,
    /// Also factor the norm of the discriminant and check that no bad prime
    /// falls outside the support. Slow beyond small heights.
    pub oracle_mode: bool,
    /// Fill the `timing` field. Makes output differ between runs.
    pub record_timing: bool,
}

impl RunConfig {
    pub fn new(max_height: u64, out_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            max_height,
            jobs: 1,
            out_path: out_path.into(),
            resume: false,
            factor_budget: FactorBudget::default(),
            oracle_mode: false,
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<(), SurveyError> {
        if self.max_height < 2 {
            return Err(SurveyError::Config(format!("max_height must be at least 2, got {}", self.max_height)));
        }
        if self.jobs < 1 {
            return Err(SurveyError::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Full record for one parameter: the curve, its Tamagawa data, and every
/// structural check. Check failures turn the flag into `error:`.
pub fn compute_record(t: &Rational, budget: FactorBudget, oracle: bool) -> SurveyRecord {
    let fc = match build(t) {
        Ok(fc) => fc,
        Err(e) => return SurveyRecord::from_family_error(t, &e),
    };
    let g = match tamagawa_with(&fc, budget) {
        Ok(g) => g,
        Err(e) => return SurveyRecord::from_error(t, e),
    };
    let mut rec = SurveyRecord::from_curve(&fc, &g);
    let mut problems = structural_checks(&fc, &g);
    if oracle {
        match support_oracle(&fc, budget) {
            Ok(missed) if missed.is_empty() => {}
            Ok(missed) => problems.push(format!(
                "bad primes outside the support: {}",
                missed.iter().map(Integer::to_string).collect::<Vec<_>>().join(", ")
            )),
            Err(e) => problems.push(format!("oracle failed: {e}")),
        }
    }
    if !problems.is_empty() {
        rec.flags = format!("error:{}", problems.join("; "));
    }
    rec
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepSummary {
    pub enumerated: usize,
    pub computed: usize,
    pub skipped: usize,
}

/// Parameters handed to the workers at once; output is flushed after each.
const CHUNK: usize = 64;

/// Runs the sweep described by `cfg`, writing one JSON line per parameter in
/// enumeration order. With `resume`, parameters already in the file are
/// skipped and a truncated last line is dropped.
pub fn sweep(cfg: &RunConfig) -> Result<SweepSummary, SurveyError> {
    cfg.validate()?;
    let path = &cfg.out_path;
    let io_err = |source| SurveyError::Io { path: path.clone(), source };
    let ts = enumerate_t(cfg.max_height);

    let done: HashSet<String> = if cfg.resume && path.exists() {
        let (records, valid_len) = read_records_lenient(path)?;
        let f = OpenOptions::new().write(true).open(path).map_err(io_err)?;
        f.set_len(valid_len).map_err(io_err)?;
        records.into_iter().map(|r| r.t).collect()
    } else {
        HashSet::new()
    };
    let todo: Vec<&Rational> = ts.iter().filter(|t| !done.contains(&format_rational(t))).collect();

    let file = if cfg.resume {
        let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io_err)?;
        f.seek(SeekFrom::End(0)).map_err(io_err)?;
        f
    } else {
        File::create(path).map_err(io_err)?
    };
    let mut out = BufWriter::new(file);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| SurveyError::Pool(e.to_string()))?;
    for chunk in todo.chunks(CHUNK) {
        let records: Vec<SurveyRecord> = pool.install(|| {
            chunk
                .par_iter()
                .map(|t| {
                    let start = Instant::now();
                    let mut rec = compute_record(t, cfg.factor_budget, cfg.oracle_mode);
                    if cfg.record_timing {
                        rec.timing = Some(start.elapsed().as_secs_f64());
                    }
                    rec
                })
                .collect()
        });
        for rec in &records {
            writeln!(out, "{}", rec.to_json_line()).map_err(io_err)?;
        }
        out.flush().map_err(io_err)?;
    }
    Ok(SweepSummary { enumerated: ts.len(), computed: todo.len(), skipped: ts.len() - todo.len() })
}

/// Reads every record of a JSONL file. Blank lines are ignored.
pub fn read_records(path: &Path) -> Result<Vec<SurveyRecord>, SurveyError> {
    let file = File::open(path).map_err(|source| SurveyError::Io { path: path.into(), source })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| SurveyError::Io { path: path.into(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| SurveyError::Parse {
            path: path.into(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Like `read_records`, but tolerates an unterminated or unparsable final
/// line (an interrupted write). Returns the records and the byte length of
/// the valid prefix.
fn read_records_lenient(path: &Path) -> Result<(Vec<SurveyRecord>, u64), SurveyError> {
    let bytes = std::fs::read(path).map_err(|source| SurveyError::Io { path: path.into(), source })?;
    let mut records = Vec::new();
    let mut valid = 0usize;
    let mut start = 0usize;
    let mut line_no = 0usize;
    while start < bytes.len() {
        line_no += 1;
        let Some(nl) = bytes[start..].iter().position(|&b| b == b'\n') else {
            break; // unterminated tail
        };
        let line = &bytes[start..start + nl];
        let end = start + nl + 1;
        if !line.iter().all(u8::is_ascii_whitespace) {
            match serde_json::from_slice::<SurveyRecord>(line) {
                Ok(r) => records.push(r),
                Err(_) if end == bytes.len() => break,
                Err(e) => {
                    return Err(SurveyError::Parse { path: path.into(), line: line_no, msg: e.to_string() })
                }
            }
        }
        valid = end;
        start = end;
    }
    Ok((records, valid as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(ts: &[Rational]) -> Vec<String> {
        ts.iter().map(format_rational).collect()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(strs(&enumerate_t(1)), vec!["-1"]);
        assert_eq!(strs(&enumerate_t(2)), vec!["-1", "-2", "-1/2", "1/2", "2"]);
        let ts = enumerate_t(10);
        for t in &ts {
            assert!(t.numer().gcd(t.denom()) == Integer::from(1));
            assert!(crate::exactnum::height(t) <= Integer::from(10));
        }
        let unique: HashSet<String> = strs(&ts).into_iter().collect();
        assert_eq!(unique.len(), ts.len());
        // brute force count: reduced r/q, |r| ≤ 10, 1 ≤ q ≤ 10, minus 0 and 1
        let mut count = 0;
        for q in 1..=10i64 {
            for r in -10..=10i64 {
                if r.gcd(&q) == 1 && r != 0 && r != q {
                    count += 1;
                }
            }
        }
        assert_eq!(ts.len(), count);
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::new(1, "x").validate().is_err());
        let mut c = RunConfig::new(2, "x");
        c.jobs = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn record_round_trip() {
        for t in ["2", "-2", "0"] {
            let rec = compute_record(&crate::exactnum::parse_rational(t).unwrap(), FactorBudget::default(), false);
            let line = rec.to_json_line();
            let back: SurveyRecord = serde_json::from_str(&line).unwrap();
            assert_eq!(back, rec);
        }
        let big = JsonInt::from(&(Integer::from(1) << 60usize));
        assert_eq!(serde_json::to_string(&big).unwrap(), "\"1152921504606846976\"");
        let small = JsonInt::from(&Integer::from(-17));
        assert_eq!(serde_json::to_string(&small).unwrap(), "-17");
    }
}
