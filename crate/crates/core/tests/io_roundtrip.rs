//! Artifact formats read back exactly what was written.

use proptest::prelude::*;

use evospike::io::{self, FitnessRow, GenomeRecord};
use evospike::rng;
use evospike::{Connectivity, GeneBounds, Genome, GridLayout, ModelKind, Spike};

fn kind() -> impl Strategy<Value = ModelKind> {
    prop_oneof![Just(ModelKind::Ca), Just(ModelKind::Network)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn genome_json_is_exact(genes in prop::array::uniform7(0.0f64..=1.0), kind in kind(), seed in any::<u64>()) {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("g.json");
        let record = GenomeRecord::new(Genome::new(genes).unwrap(), GeneBounds::defaults(kind), seed).unwrap();
        io::write_genome(&path, &record).unwrap();
        let back = io::read_genome(&path).unwrap();
        prop_assert_eq!(back.genes, record.genes);
        prop_assert_eq!(back.params, record.params);
        prop_assert_eq!(back.bounds, record.bounds);
        prop_assert_eq!(back.seed, seed);
    }

    #[test]
    fn spike_csv_is_exact(raw in prop::collection::vec((0u32..1500, 0usize..60), 0..300)) {
        let tmp = tempfile::tempdir().unwrap();
        let path = tmp.path().join("s.csv");
        let mut spikes: Vec<Spike> = raw
            .iter()
            .map(|&(step, channel)| Spike { time_s: evospike::sim::step_time(step, 0.04), channel })
            .collect();
        spikes.sort_by(|a, b| a.time_s.total_cmp(&b.time_s).then(a.channel.cmp(&b.channel)));
        io::write_spike_events(&path, &spikes).unwrap();
        prop_assert_eq!(io::load_spike_events(&path, None).unwrap(), spikes);
    }

    #[test]
    fn connectivity_csv_is_exact(kind in kind(), seed in any::<u64>(), g in prop::array::uniform7(0.0f64..=1.0)) {
        let tmp = tempfile::tempdir().unwrap();
        let params = GeneBounds::defaults(kind).decode(&Genome::new(g).unwrap()).unwrap();
        let conn = Connectivity::instantiate(&GridLayout::default(), &params, &mut rng::stream(seed)).unwrap();
        let (e, s) = (tmp.path().join("e.csv"), tmp.path().join("s.csv"));
        io::write_connectivity(&e, &s, &conn).unwrap();
        prop_assert_eq!(io::read_connectivity(&e, &s, kind).unwrap(), conn);
    }
}

#[test]
fn fitness_and_asdr_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let rows: Vec<FitnessRow> = (0..12)
        .map(|i| {
            let objective = if i == 5 { f64::INFINITY } else { i as f64 / 7.0 };
            FitnessRow {
                trial: 1,
                generation: i / 4,
                individual: (i % 4) as usize,
                objective,
                score: 1.0 - objective,
            }
        })
        .collect();
    let path = tmp.path().join("fitness.csv");
    io::write_fitness(&path, &rows).unwrap();
    assert_eq!(io::read_fitness(&path).unwrap(), rows);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("trial,generation,individual,objective_f,score\n"));

    let counts = vec![0u64, 7, 3, 0, 12];
    let path = tmp.path().join("asdr.csv");
    io::write_asdr(&path, &counts).unwrap();
    assert_eq!(io::read_asdr(&path).unwrap(), counts);
}

#[test]
fn spike_loading_windows_and_offsets() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("s.csv");
    std::fs::write(&path, "time_s,channel\n61.5,2\n0.2,1\n60.0,3\n59.99,0\n").unwrap();
    let first = io::load_spike_events(&path, Some(60.0)).unwrap();
    assert_eq!(first.iter().map(|s| s.channel).collect::<Vec<_>>(), [1, 0]);
    let later = io::load_spike_events_at(&path, 60.0, Some(60.0)).unwrap();
    assert_eq!(later.len(), 2);
    assert_eq!(later[0].time_s, 0.0);
    assert_eq!(later[0].channel, 3);
}

#[test]
fn parse_errors_name_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("bad.csv");
    std::fs::write(&path, "time_s,channel\n0.1,3\n0.2,60\n").unwrap();
    let err = io::load_spike_events(&path, None).unwrap_err();
    match err {
        evospike::Error::Parse { line, .. } => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other}"),
    }
}
