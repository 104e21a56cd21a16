//! Runs every flavor and variant of the index on one text and compares the
//! answers with the brute-force oracles.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{random_range, sample_patterns};
use crate::error::{Error, Result};
use crate::index::{build_from_parsing, IndexConfig, IndexCore, OccurrenceSet, Variant};
use crate::oracle::{naive_classify, naive_locate};
use crate::parsing::{parse, validate_parsing, Flavor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    /// Both parsings pass validation.
    Parsing,
    /// LZ-End never has fewer phrases than LZ77.
    PhraseCount,
    Build,
    /// Tries have at most `2n'` nodes.
    TrieNodes,
    Extract,
    /// Extraction never nests deeper than the parsing height.
    Depth,
    /// LZ-End extraction up to a phrase end visits at most one phrase per
    /// extracted byte.
    LzEndSteps,
    Locate,
    /// Primary and secondary counts agree with the plaintext classification.
    Classify,
    Exists,
    /// No occurrence is reported twice.
    Distinct,
    /// All flavors and variants give the same occurrences.
    Variants,
    RoundTrip,
}

impl CheckKind {
    pub const ALL: [CheckKind; 13] = [
        CheckKind::Parsing,
        CheckKind::PhraseCount,
        CheckKind::Build,
        CheckKind::TrieNodes,
        CheckKind::Extract,
        CheckKind::Depth,
        CheckKind::LzEndSteps,
        CheckKind::Locate,
        CheckKind::Classify,
        CheckKind::Exists,
        CheckKind::Distinct,
        CheckKind::Variants,
        CheckKind::RoundTrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Parsing => "parsing-valid",
            CheckKind::PhraseCount => "lzend-phrase-count",
            CheckKind::Build => "build",
            CheckKind::TrieNodes => "trie-node-bound",
            CheckKind::Extract => "extract",
            CheckKind::Depth => "extract-depth",
            CheckKind::LzEndSteps => "lzend-extract-steps",
            CheckKind::Locate => "locate",
            CheckKind::Classify => "classify",
            CheckKind::Exists => "exists",
            CheckKind::Distinct => "distinct",
            CheckKind::Variants => "variant-agreement",
            CheckKind::RoundTrip => "serialize-roundtrip",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    tallies: BTreeMap<CheckKind, Tally>,
}

impl SuiteReport {
    pub fn record(&mut self, kind: CheckKind, ok: bool, detail: impl FnOnce() -> String) {
        let t = self.tallies.entry(kind).or_default();
        if ok {
            t.passed += 1;
        } else {
            t.failed += 1;
            if t.first_failure.is_none() {
                t.first_failure = Some(detail());
            }
        }
    }

    pub fn merge(&mut self, other: SuiteReport) {
        for (kind, o) in other.tallies {
            let t = self.tallies.entry(kind).or_default();
            t.passed += o.passed;
            t.failed += o.failed;
            if t.first_failure.is_none() {
                t.first_failure = o.first_failure;
            }
        }
    }

    pub fn get(&self, kind: CheckKind) -> Option<&Tally> {
        self.tallies.get(&kind)
    }

    /// True when every listed check ran at least once and never failed.
    pub fn passed_all(&self, kinds: &[CheckKind]) -> bool {
        kinds
            .iter()
            .all(|k| self.get(*k).is_some_and(|t| t.failed == 0 && t.passed > 0))
    }

    pub fn all_passed(&self) -> bool {
        self.tallies.values().all(|t| t.failed == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (CheckKind, &Tally)> {
        self.tallies.iter().map(|(k, t)| (*k, t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub patterns: usize,
    pub max_pattern_len: usize,
    pub extract_ranges: usize,
    pub max_extract_len: usize,
    pub variants: Vec<Variant>,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            patterns: 20,
            max_pattern_len: 20,
            extract_ranges: 100,
            max_extract_len: 100,
            variants: Variant::ALL.to_vec(),
            seed: 0,
        }
    }
}

fn show(p: &[u8]) -> String {
    p.escape_ascii().to_string()
}

/// Checks every flavor and variant on `text`, which must be nonempty.
pub fn run_suite(text: &[u8], opts: &SuiteOptions) -> Result<SuiteReport> {
    if text.is_empty() {
        return Err(Error::invalid("self-test needs a nonempty text"));
    }
    if opts.max_pattern_len == 0 || opts.max_extract_len == 0 {
        return Err(Error::invalid("pattern and extraction lengths must be positive"));
    }
    let n = text.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let patterns = sample_patterns(&mut rng, text, opts.patterns, opts.max_pattern_len);
    let ranges: Vec<(usize, usize)> = (0..opts.extract_ranges)
        .map(|_| random_range(&mut rng, n, opts.max_extract_len))
        .collect();
    let truth: Vec<Vec<usize>> = patterns
        .iter()
        .map(|p| naive_locate(text, p))
        .collect::<Result<_>>()?;

    let mut report = SuiteReport::default();
    let mut phrase_counts = Vec::new();
    // first answer seen for every pattern
    let mut reference: Vec<Option<Vec<usize>>> = vec![None; patterns.len()];

    for flavor in Flavor::ALL {
        let parsing = parse(text, flavor);
        let valid = validate_parsing(&parsing, text);
        report.record(CheckKind::Parsing, valid.is_ok(), || {
            format!("{flavor}: {}", valid.as_ref().unwrap_err())
        });
        phrase_counts.push(parsing.len());
        let ends = parsing.phrase_ends();
        let classes: Vec<(Vec<usize>, Vec<usize>)> = patterns
            .iter()
            .map(|p| naive_classify(text, &parsing, p))
            .collect::<Result<_>>()?;
        let mut flavor_answers: Option<Vec<OccurrenceSet>> = None;

        for &variant in &opts.variants {
            let tag = format!("{flavor} variant {variant}");
            let idx = match build_from_parsing(text, &parsing, IndexConfig::new(flavor, variant)) {
                Ok(idx) => {
                    report.record(CheckKind::Build, true, String::new);
                    idx
                }
                Err(e) => {
                    report.record(CheckKind::Build, false, || format!("{tag}: {e}"));
                    continue;
                }
            };
            let (st, rt) = idx.trie_node_counts();
            for count in [st, rt].into_iter().flatten() {
                report.record(CheckKind::TrieNodes, count <= 2 * parsing.len(), || {
                    format!("{tag}: {count} nodes for {} phrases", parsing.len())
                });
            }

            check_extraction(&mut report, &idx, text, &ranges, &ends, &tag);

            let mut answers = Vec::with_capacity(patterns.len());
            for (q, p) in patterns.iter().enumerate() {
                let detail = || format!("{tag}, pattern {:?}", show(p));
                let (raw, primary) = match idx.locate_raw(p) {
                    Ok(r) => r,
                    Err(e) => {
                        report.record(CheckKind::Locate, false, || format!("{}: {e}", detail()));
                        continue;
                    }
                };
                let mut sorted = raw.clone();
                sorted.sort_unstable();
                let before = sorted.len();
                sorted.dedup();
                report.record(CheckKind::Distinct, sorted.len() == before, detail);
                report.record(CheckKind::Locate, sorted == truth[q], || {
                    format!("{}: got {:?}, expected {:?}", detail(), sorted, truth[q])
                });
                let (tp, ts) = &classes[q];
                let mut prim: Vec<usize> = raw[..primary].to_vec();
                prim.sort_unstable();
                report.record(
                    CheckKind::Classify,
                    &prim == tp && before - primary == ts.len(),
                    || format!("{}: primary {:?} vs {:?}", detail(), prim, tp),
                );
                let exists = idx.exists(p);
                report.record(
                    CheckKind::Exists,
                    exists.as_ref().ok() == Some(&!truth[q].is_empty()),
                    detail,
                );
                match &reference[q] {
                    Some(r) => report.record(CheckKind::Variants, *r == sorted, detail),
                    None => reference[q] = Some(sorted.clone()),
                }
                answers.push(OccurrenceSet {
                    positions: sorted,
                    primary_count: primary,
                    secondary_count: before - primary,
                });
            }
            match &flavor_answers {
                Some(first) => report.record(CheckKind::Variants, *first == answers, || {
                    format!("{tag}: occurrence sets differ within the flavor")
                }),
                None => flavor_answers = Some(answers),
            }

            let back = IndexCore::deserialize(&idx.serialize());
            let same = back.as_ref().is_ok_and(|b| *b == idx);
            report.record(CheckKind::RoundTrip, same, || match back {
                Err(e) => format!("{tag}: {e}"),
                Ok(_) => format!("{tag}: reloaded index differs"),
            });
        }
    }
    report.record(CheckKind::PhraseCount, phrase_counts[1] >= phrase_counts[0], || {
        format!("lzend {} < lz77 {}", phrase_counts[1], phrase_counts[0])
    });
    Ok(report)
}

fn check_extraction(
    report: &mut SuiteReport,
    idx: &IndexCore,
    text: &[u8],
    ranges: &[(usize, usize)],
    ends: &[usize],
    tag: &str,
) {
    for &(s, e) in ranges {
        match idx.extract_traced(s, e) {
            Ok((got, trace)) => {
                report.record(CheckKind::Extract, got == text[s - 1..e], || format!("{tag}: [{s}, {e}]"));
                report.record(CheckKind::Depth, trace.max_depth <= idx.height(), || {
                    format!("{tag}: [{s}, {e}] depth {} > h {}", trace.max_depth, idx.height())
                });
            }
            Err(err) => report.record(CheckKind::Extract, false, || format!("{tag}: [{s}, {e}]: {err}")),
        }
        if idx.flavor() == Flavor::LzEnd {
            // stretch the range to the next phrase end
            let e = ends[ends.partition_point(|&x| x < e)];
            let steps = idx.extract_traced(s, e).map(|(_, t)| t.steps);
            report.record(
                CheckKind::LzEndSteps,
                steps.as_ref().is_ok_and(|&st| st <= e - s + 1),
                || format!("{tag}: [{s}, {e}] took {steps:?} steps"),
            );
        }
    }
}
