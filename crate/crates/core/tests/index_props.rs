use lzsi_core::corpus::{alphabet, repetitive_text};
use lzsi_core::index::{build_from_parsing, IndexConfig, IndexCore, Variant};
use lzsi_core::oracle::{naive_classify, naive_locate};
use lzsi_core::parsing::{parse, Flavor, Parsing};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_text() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        proptest::collection::vec(prop_oneof![Just(b'a'), Just(b'b')], 1..300),
        proptest::collection::vec(b'a'..=b'd', 1..300),
        proptest::collection::vec(any::<u8>(), 1..200),
        (any::<u64>(), 20usize..120, 2usize..8, 0.0f64..0.05).prop_map(|(seed, len, copies, rate)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            repetitive_text(&mut rng, &alphabet(3), len, copies, rate)
        }),
    ]
}

fn flavor() -> impl Strategy<Value = Flavor> {
    prop_oneof![Just(Flavor::Lz77), Just(Flavor::LzEnd)]
}

fn variant() -> impl Strategy<Value = Variant> {
    proptest::sample::select(Variant::ALL.to_vec())
}

/// A text with a few patterns, half of them cut from the text.
fn text_and_patterns() -> impl Strategy<Value = (Vec<u8>, Vec<Vec<u8>>)> {
    small_text().prop_flat_map(|t| {
        let n = t.len();
        let cut = (0..n, 1usize..12).prop_map({
            let t = t.clone();
            move |(s, m)| t[s..(s + m).min(n)].to_vec()
        });
        let free = proptest::collection::vec(b'a'..=b'd', 1..6);
        let pats = proptest::collection::vec(prop_oneof![cut, free], 1..8);
        (Just(t), pats)
    })
}

fn build(text: &[u8], flavor: Flavor, variant: Variant) -> (Parsing, IndexCore) {
    let parsing = parse(text, flavor);
    let idx = build_from_parsing(text, &parsing, IndexConfig::new(flavor, variant)).unwrap();
    (parsing, idx)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn locate_matches_scan((text, pats) in text_and_patterns(), flavor in flavor(), variant in variant()) {
        let (parsing, idx) = build(&text, flavor, variant);
        for p in &pats {
            let want = naive_locate(&text, p).unwrap();
            let (raw, primary) = idx.locate_raw(p).unwrap();
            let mut got = raw.clone();
            got.sort_unstable();
            got.dedup();
            prop_assert_eq!(got.len(), raw.len(), "duplicates for {:?}", p);
            prop_assert_eq!(&got, &want);
            let (tp, ts) = naive_classify(&text, &parsing, p).unwrap();
            let mut prim = raw[..primary].to_vec();
            prim.sort_unstable();
            prop_assert_eq!(prim, tp);
            prop_assert_eq!(raw.len() - primary, ts.len());
            prop_assert_eq!(idx.exists(p).unwrap(), !want.is_empty());
            prop_assert_eq!(idx.count(p).unwrap(), want.len());
        }
    }

    #[test]
    fn extract_matches_text(text in small_text(), flavor in flavor(), variant in variant(), picks in proptest::collection::vec((any::<usize>(), any::<usize>()), 20)) {
        let (_, idx) = build(&text, flavor, variant);
        let n = text.len();
        for (a, b) in picks {
            let (s, e) = {
                let (x, y) = (a % n + 1, b % n + 1);
                (x.min(y), x.max(y))
            };
            let (got, trace) = idx.extract_traced(s, e).unwrap();
            prop_assert_eq!(&got[..], &text[s - 1..e]);
            prop_assert!(trace.max_depth <= idx.height());
        }
        prop_assert_eq!(idx.extract(1, n).unwrap(), text);
    }

    #[test]
    fn variants_agree((text, pats) in text_and_patterns()) {
        let indexes: Vec<IndexCore> = Flavor::ALL
            .iter()
            .flat_map(|&f| Variant::ALL.map(|v| build(&text, f, v).1))
            .collect();
        for p in &pats {
            let first = indexes[0].locate(p).unwrap().positions;
            for idx in &indexes[1..] {
                prop_assert_eq!(&idx.locate(p).unwrap().positions, &first);
            }
        }
    }

    #[test]
    fn reload_is_identical(text in small_text(), flavor in flavor(), variant in variant()) {
        let (_, idx) = build(&text, flavor, variant);
        let back = IndexCore::deserialize(&idx.serialize()).unwrap();
        prop_assert_eq!(&back, &idx);
        prop_assert_eq!(back.stats(), idx.stats());
    }

    #[test]
    fn chase_reports_the_secondary_occurrences((text, pats) in text_and_patterns(), flavor in flavor()) {
        let (parsing, idx) = build(&text, flavor, Variant::ImplicitIds);
        for p in &pats {
            let (_, secondary) = naive_classify(&text, &parsing, p).unwrap();
            let mut found = Vec::new();
            for hit in idx.find_primary(p).unwrap() {
                idx.chase_sources(hit.position, p.len(), &mut |y| found.push(y)).unwrap();
            }
            found.sort_unstable();
            prop_assert_eq!(found, secondary);
        }
    }
}

#[test]
fn lzend_extraction_to_phrase_ends_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let text = repetitive_text(&mut rng, &alphabet(4), 400, 10, 0.01);
    let (parsing, idx) = build(&text, Flavor::LzEnd, Variant::ImplicitIds);
    for e in parsing.phrase_ends() {
        for s in [1, e / 2 + 1, e.saturating_sub(30).max(1), e] {
            let (got, trace) = idx.extract_traced(s, e).unwrap();
            assert_eq!(got, &text[s - 1..e]);
            assert!(trace.steps <= e - s + 1, "[{s}, {e}] took {} steps", trace.steps);
        }
    }
}

#[test]
fn repetitive_index_is_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let text = repetitive_text(&mut rng, &alphabet(26), 5000, 40, 0.001);
    let (_, idx) = build(&text, Flavor::Lz77, Variant::ImplicitIds);
    let st = idx.stats();
    assert!(st.ratio_to_lz() < 3.0, "ratio {}", st.ratio_to_lz());
    let (_, big) = build(&text, Flavor::Lz77, Variant::BothTries);
    assert!(big.stats().total_bytes > st.total_bytes);
}
