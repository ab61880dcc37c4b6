use std::collections::BTreeMap;

use edgeav_core::ingest::{
    aggregate_hourly, parse_trace, read_demand, synthesize_trace, write_demand, write_trace, AreaGrid, Columns,
    SynthProfile, TaggedRecord, Target, TraceRecord,
};
use proptest::prelude::*;

fn tag(records: &[TraceRecord], grid: &AreaGrid) -> Vec<TaggedRecord> {
    records
        .iter()
        .map(|r| TaggedRecord {
            area: grid.locate(r.x, r.y),
            record: r.clone(),
        })
        .collect()
}

fn profile() -> impl Strategy<Value = SynthProfile> {
    let target = (1u32..200, 1.0f64..25.0).prop_map(|(fifths, speed)| Target {
        vehicles: fifths as f64 / 5.0 + 1.0,
        speed_mps: (speed * 100.0).round() / 100.0,
    });
    let hours = prop::collection::btree_map(0u8..24, target, 1..4);
    (any::<u64>(), prop::collection::btree_map(prop::sample::select(vec!["A1", "A2", "A3", "A4"]), hours, 1..4)).prop_map(
        |(seed, areas)| SynthProfile {
            seed,
            areas: areas.into_iter().map(|(a, h)| (a.to_string(), h)).collect(),
        },
    )
}

fn grid() -> AreaGrid {
    AreaGrid::square_block(2, 2, 2000.0).unwrap()
}

#[test]
fn reference_profile_round_trips_through_files() {
    let grid = AreaGrid::cologne();
    let profile = SynthProfile::cologne_shaped(7);
    let records = synthesize_trace(&profile, &grid).unwrap();
    let mut trace = Vec::new();
    write_trace(&mut trace, &records).unwrap();
    let parsed = parse_trace(trace.as_slice(), &grid, Columns::Projected).unwrap();
    assert_eq!(parsed.malformed, 0);
    let demand = aggregate_hourly(&parsed.records, &grid);
    assert_eq!(demand.len(), 9 * 24);
    for d in &demand {
        let t = profile.target(&d.area_id, d.hour).unwrap();
        assert!((d.avg_vehicles - t.vehicles).abs() <= 0.05 * t.vehicles, "{d:?} vs {t:?}");
        let s = d.avg_speed_mps.unwrap();
        assert!((s - t.speed_mps).abs() <= 0.05 * t.speed_mps, "{d:?} vs {t:?}");
    }
    let mut csv = Vec::new();
    write_demand(&mut csv, &demand).unwrap();
    assert_eq!(read_demand(csv.as_slice()).unwrap(), demand);
}

#[test]
fn reference_profile_matches_headline_counts() {
    let p = SynthProfile::cologne_shaped(1);
    assert_eq!(p.target("A5", 16).unwrap().vehicles, 1800.0);
    assert_eq!(p.target("A3", 16).unwrap().vehicles, 750.0);
    assert_eq!(p.target("A7", 16).unwrap().vehicles, 400.0);
    for hour in [7, 8, 12, 15, 16, 17, 18] {
        for quiet in [0, 3, 10, 21] {
            assert!(p.target("A5", hour).unwrap().vehicles > p.target("A5", quiet).unwrap().vehicles);
        }
    }
    // Rush-hour traffic in the busiest areas crawls below 16 mph.
    assert!(p.target("A5", 16).unwrap().speed_mps < 7.15);
}

#[test]
fn shipped_profile_file_matches_builtin() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/cologne_profile.json")).unwrap();
    assert_eq!(SynthProfile::from_json(&text).unwrap(), SynthProfile::cologne_shaped(1));
}

#[test]
fn shipped_grid_file_matches_builtin() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/grid.json")).unwrap();
    assert_eq!(AreaGrid::from_json(&text).unwrap(), AreaGrid::cologne());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aggregation_recovers_targets(p in profile()) {
        let grid = grid();
        let records = synthesize_trace(&p, &grid).unwrap();
        let demand = aggregate_hourly(&tag(&records, &grid), &grid);
        for d in &demand {
            match p.target(&d.area_id, d.hour) {
                Some(t) => {
                    prop_assert!((d.avg_vehicles - t.vehicles).abs() <= 0.05 * t.vehicles, "{:?} vs {:?}", d, t);
                    let s = d.avg_speed_mps.unwrap();
                    prop_assert!((s - t.speed_mps).abs() <= 0.05 * t.speed_mps, "{:?} vs {:?}", d, t);
                }
                None => prop_assert_eq!((d.avg_vehicles, d.avg_speed_mps), (0.0, None)),
            }
        }
    }

    #[test]
    fn synthetic_samples_stay_in_their_area(p in profile()) {
        let grid = grid();
        for r in synthesize_trace(&p, &grid).unwrap() {
            let area = grid.locate(r.x, r.y).map(|i| grid.area_id(i).to_string());
            let expected = r.vehicle_id.split('-').next().map(str::to_string);
            prop_assert_eq!(area, expected);
        }
    }

    #[test]
    fn generation_is_deterministic(p in profile()) {
        let grid = grid();
        prop_assert_eq!(synthesize_trace(&p, &grid).unwrap(), synthesize_trace(&p, &grid).unwrap());
    }

    #[test]
    fn record_order_does_not_matter(p in profile(), seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let grid = grid();
        let tagged = tag(&synthesize_trace(&p, &grid).unwrap(), &grid);
        let mut shuffled = tagged.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(aggregate_hourly(&tagged, &grid), aggregate_hourly(&shuffled, &grid));
    }

    #[test]
    fn duplicate_records_do_not_inflate_counts(p in profile()) {
        let grid = grid();
        let tagged = tag(&synthesize_trace(&p, &grid).unwrap(), &grid);
        let doubled: Vec<TaggedRecord> = tagged.iter().flat_map(|r| [r.clone(), r.clone()]).collect();
        let once = aggregate_hourly(&tagged, &grid);
        let twice = aggregate_hourly(&doubled, &grid);
        let counts = |d: &[edgeav_core::ingest::HourlyDemand]| d.iter().map(|h| h.avg_vehicles).collect::<Vec<_>>();
        prop_assert_eq!(counts(&once), counts(&twice));
    }

    #[test]
    fn trace_file_round_trip(p in profile()) {
        let grid = grid();
        let records = synthesize_trace(&p, &grid).unwrap();
        let mut buf = Vec::new();
        write_trace(&mut buf, &records).unwrap();
        let parsed = parse_trace(buf.as_slice(), &grid, Columns::Projected).unwrap();
        let back: Vec<TraceRecord> = parsed.records.into_iter().map(|t| t.record).collect();
        prop_assert_eq!(back, records);
    }
}

#[test]
fn empty_hours_have_no_speed() {
    let grid = grid();
    let p = SynthProfile {
        seed: 3,
        areas: BTreeMap::from([("A2".to_string(), BTreeMap::from([(5u8, Target { vehicles: 4.0, speed_mps: 9.0 })]))]),
    };
    let demand = aggregate_hourly(&tag(&synthesize_trace(&p, &grid).unwrap(), &grid), &grid);
    let nonzero: Vec<_> = demand.iter().filter(|d| d.avg_vehicles > 0.0).collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!((nonzero[0].area_id.as_str(), nonzero[0].hour, nonzero[0].avg_vehicles), ("A2", 5, 4.0));
    assert!(demand.iter().filter(|d| d.avg_vehicles == 0.0).all(|d| d.avg_speed_mps.is_none()));
}
