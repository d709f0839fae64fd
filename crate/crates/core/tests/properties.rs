mod common;

use std::collections::HashSet;

use common::*;
use proptest::prelude::*;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdfsheet_core::mapping::log::LogRecord;
use rdfsheet_core::mapping::{EditOp, RandomIds, Workbook, WorkbookOptions};
use rdfsheet_core::metrics::MetricsReport;
use rdfsheet_core::rdf::{canonicalize, ntriples, turtle, Graph, Iri, Triple};

/// A random edit, occasionally targeting a resource already in the graph.
fn next_edit(rng: &mut ChaCha8Rng, wb: &Workbook) -> EditOp {
    if rng.random_bool(0.1) {
        let subjects: Vec<Iri> = wb.graph().iter().map(|t| t.subject.clone()).collect();
        if let Some(iri) = subjects.choose(rng).cloned() {
            return if rng.random_bool(0.5) {
                EditOp::SetComment {
                    iri,
                    text: ["", "a note", "another note"][rng.random_range(0..3)].into(),
                }
            } else {
                EditOp::PasteReference {
                    sheet: rng.random_range(0..2),
                    row: rng.random_range(0..3),
                    col: rng.random_range(0..3),
                    iri,
                }
            };
        }
    }
    random_edit(rng)
}

fn triples(g: &Graph) -> HashSet<Triple> {
    g.iter().cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deltas_are_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut wb = seeded(seed);
        for _ in 0..60 {
            let edit = next_edit(&mut rng, &wb);
            let before = triples(wb.graph());
            let rev = wb.revision();
            match wb.apply_edit(&edit) {
                Ok((delta, new_rev)) => {
                    prop_assert_eq!(new_rev, rev + 1);
                    let mut expected = before.clone();
                    for t in &delta.removed {
                        prop_assert!(expected.remove(t), "removed triple was absent: {}", t);
                    }
                    for t in &delta.added {
                        prop_assert!(expected.insert(t.clone()), "added triple was present: {}", t);
                    }
                    prop_assert_eq!(&expected, &triples(wb.graph()));
                    for m in &delta.minted {
                        prop_assert!(m.iri.as_str().starts_with(wb.generated_ns().as_str()));
                    }
                }
                Err(_) => {
                    prop_assert_eq!(wb.revision(), rev);
                    prop_assert_eq!(&before, &triples(wb.graph()));
                }
            }
            assert_labels_consistent(&wb);
            for sheet in wb.sheets() {
                prop_assert_eq!(sheet.class_iri.is_some(), !sheet.name.is_empty());
                for h in sheet.rows.values().chain(sheet.columns.values()) {
                    prop_assert_eq!(h.node.is_some(), !h.raw_text.is_empty());
                }
            }
        }
    }

    #[test]
    fn replay_reproduces_graph_and_structure(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut wb = seeded(seed);
        let mut log = Vec::new();
        for _ in 0..60 {
            let edit = next_edit(&mut rng, &wb);
            if let Ok((delta, rev)) = wb.apply_edit(&edit) {
                log.push(LogRecord::new(rev, edit, &delta, None));
            }
        }
        let mut replayed = Workbook::new("test", WorkbookOptions::default()).unwrap();
        let deltas = rdfsheet_core::mapping::log::replay_records(&mut replayed, &log).unwrap();
        prop_assert_eq!(deltas.len(), log.len());
        prop_assert_eq!(ntriples::serialize(replayed.graph()), ntriples::serialize(wb.graph()));
        prop_assert_eq!(replayed.state(), wb.state());
    }

    #[test]
    fn restored_state_behaves_like_the_original(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut wb = seeded(seed);
        for _ in 0..40 {
            let edit = next_edit(&mut rng, &wb);
            let _ = wb.apply_edit(&edit);
        }
        let json = serde_json::to_string(&wb.state()).unwrap();
        let graph = ntriples::parse(&ntriples::serialize(wb.graph())).unwrap();
        let mut restored = Workbook::from_state(serde_json::from_str(&json).unwrap(), graph, Box::new(RandomIds)).unwrap();
        for _ in 0..40 {
            let edit = random_edit(&mut rng);
            let a = wb.apply_edit(&edit).map(|(d, _)| (d.added, d.removed, d.minted.len()));
            let b = restored.apply_edit(&edit).map(|(d, _)| (d.added, d.removed, d.minted.len()));
            match (a, b) {
                (Ok(a), Ok(b)) if a.2 == 0 && b.2 == 0 => prop_assert_eq!(a, b),
                (Ok(_), Ok(_)) => break, // minted IRIs differ from here on
                (a, b) => prop_assert_eq!(a.is_ok(), b.is_ok()),
            }
        }
    }

    #[test]
    fn order_of_edits_on_distinct_targets_is_irrelevant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut script = random_script(&mut rng, 20);
        let mut reference = seeded(1);
        apply_all(&mut reference, &script);
        let expected = reference.canonical_ntriples().unwrap();
        for i in 0..3 {
            script.shuffle(&mut rng);
            let mut wb = seeded(100 + i);
            apply_all(&mut wb, &script);
            prop_assert_eq!(&wb.canonical_ntriples().unwrap(), &expected);
        }
    }

    #[test]
    fn serializations_round_trip(seed in any::<u64>(), size in 0usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, size);
        let nt = ntriples::serialize(&g);
        prop_assert_eq!(&ntriples::parse(&nt).unwrap(), &g);
        let ttl = turtle::serialize(&g);
        prop_assert_eq!(&turtle::parse(&ttl).unwrap(), &g, "{}", ttl);
        // serialization is deterministic
        prop_assert_eq!(ntriples::serialize(&ntriples::parse(&nt).unwrap()), nt);
    }

    #[test]
    fn canonicalization_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut wb = seeded(seed);
        apply_all(&mut wb, &random_script(&mut rng, 25));
        let once = canonicalize(wb.graph(), wb.generated_ns()).unwrap();
        let twice = canonicalize(&once, wb.generated_ns()).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.len(), wb.graph().len());
    }

    #[test]
    fn metrics_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut wb = seeded(seed);
        apply_all(&mut wb, &random_script(&mut rng, 30));
        let g = wb.graph();
        let m = MetricsReport::compute(g);
        if let Some(r) = m.relationship_richness {
            prop_assert!(r <= num_rational::Ratio::from_integer(1));
        }
        if let Some(r) = m.class_richness {
            prop_assert!(r <= num_rational::Ratio::from_integer(1));
        }
        if let Some(p) = m.average_population {
            prop_assert_eq!(p * num_rational::Ratio::from_integer(m.classes as u64), num_rational::Ratio::from_integer(m.instances as u64));
        }
        let renamed = canonicalize(g, wb.generated_ns()).unwrap();
        prop_assert_eq!(&MetricsReport::compute(&renamed), &m);
        let mut doubled = g.clone();
        doubled.merge(g);
        prop_assert_eq!(&MetricsReport::compute(&doubled), &m);
    }

    #[test]
    fn classifier_agrees_with_oracle(text in "\\PC{0,12}|'?[+-]?[0-9.eE]{0,12}|(?i:https?)://\\PC{0,8}") {
        let oracle = CellOracle::new();
        check_classification(&oracle, &text);
    }
}

fn check_classification(oracle: &CellOracle, text: &str) {
    if let Some(msg) = classifier_mismatch(oracle, text) {
        panic!("{msg}");
    }
}

#[test]
fn classifier_agrees_with_oracle_on_boundary_corpus() {
    let oracle = CellOracle::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2000 {
        check_classification(&oracle, &fuzz_string(&mut rng));
    }
}
