use std::time::Instant;

use lzsi_core::index::IndexCore;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{CliError, CliResult};

pub struct BenchOptions {
    pub pattern_len: usize,
    pub queries: usize,
    pub extract_len: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub n: usize,
    pub n_prime: usize,
    pub variant: u8,
    pub flavor: String,
    pub queries: usize,
    pub pattern_len: usize,
    pub extract_len: usize,
    pub occurrences: usize,
    pub extract_chars_per_sec: Option<f64>,
    pub usec_per_occurrence: Option<f64>,
}

impl BenchReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "n_prime": self.n_prime,
            "variant": self.variant,
            "flavor": self.flavor,
            "queries": self.queries,
            "pattern_len": self.pattern_len,
            "extract_len": self.extract_len,
            "occurrences": self.occurrences,
            "extract_chars_per_sec": self.extract_chars_per_sec,
            "usec_per_occurrence": self.usec_per_occurrence,
        })
    }

    pub fn to_text(&self) -> String {
        let fmt = |v: Option<f64>, unit: &str| match v {
            Some(x) => format!("{x:.2} {unit}"),
            None => "n/a".to_string(),
        };
        format!(
            "index {} variant {}, n {}, n' {}\n{} queries, pattern length {}, {} occurrences\nextract: {}\nlocate: {}\n",
            self.flavor,
            self.variant,
            self.n,
            self.n_prime,
            self.queries,
            self.pattern_len,
            self.occurrences,
            fmt(self.extract_chars_per_sec, "chars/s"),
            fmt(self.usec_per_occurrence, "usec/occurrence"),
        )
    }
}

/// Locates `queries` random substrings of the text, then extracts
/// `queries` random ranges of `extract_len` bytes.
pub fn run(idx: &IndexCore, opts: &BenchOptions) -> CliResult<BenchReport> {
    let n = idx.len();
    if opts.pattern_len == 0 || opts.pattern_len > n {
        return Err(CliError::Usage(format!("pattern length must be between 1 and {n}")));
    }
    if opts.extract_len == 0 || opts.extract_len > n {
        return Err(CliError::Usage(format!("extract length must be between 1 and {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut patterns = Vec::with_capacity(opts.queries);
    for _ in 0..opts.queries {
        let s = rng.gen_range(1..=n - opts.pattern_len + 1);
        patterns.push(idx.extract(s, s + opts.pattern_len - 1)?);
    }
    let starts: Vec<usize> = (0..opts.queries)
        .map(|_| rng.gen_range(1..=n - opts.extract_len + 1))
        .collect();

    let clock = Instant::now();
    let mut occurrences = 0;
    for p in &patterns {
        occurrences += idx.locate(p)?.len();
    }
    let locate_secs = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let mut extracted = 0;
    for &s in &starts {
        extracted += idx.extract(s, s + opts.extract_len - 1)?.len();
    }
    let extract_secs = clock.elapsed().as_secs_f64();

    Ok(BenchReport {
        n,
        n_prime: idx.phrase_count(),
        variant: idx.variant().number(),
        flavor: idx.flavor().to_string(),
        queries: opts.queries,
        pattern_len: opts.pattern_len,
        extract_len: opts.extract_len,
        occurrences,
        extract_chars_per_sec: (extracted > 0).then(|| extracted as f64 / extract_secs.max(1e-9)),
        usec_per_occurrence: (occurrences > 0).then(|| locate_secs * 1e6 / occurrences as f64),
    })
}
