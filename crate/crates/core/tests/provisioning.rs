use edgeav_core::provisioning::{
    average_config, cluster_hours, kmeans_1d, peak_config, safe_speed, TrafficLevel,
};
use edgeav_core::search::configuration_search;
use edgeav_core::{sched, EdgeConfig, HourlyConfig, HourlyConfigTable, ModelParams, SchedParams, SearchParams};
use proptest::prelude::*;

/// Hourly `(vehicles, speed)` demand for one area.
fn demand() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((1.0f64..60.0, 4.0f64..14.0), 2..8)
}

fn configure(hours: &[(f64, f64)], blind: f64, model: &ModelParams) -> HourlyConfigTable {
    hours
        .iter()
        .enumerate()
        .map(|(h, &(v, s))| HourlyConfig {
            area_id: "A1".into(),
            hour: h as u8,
            blind_m: blind,
            config: configuration_search(&SearchParams::from_model(model, blind, v, s)).unwrap().config,
        })
        .collect()
}

fn misses(v: f64, s: f64, capacity: f64, cores: u64, blind: f64, model: &ModelParams) -> u64 {
    let vehicles = v.ceil() as u64;
    let t = (model.data_size_bits * vehicles as f64 / capacity * 1000.0).ceil() as u64;
    let d = (blind / s * 1000.0).floor() as u64;
    sched(&SchedParams::new(cores, t, 16, vehicles, d, 60_000).unwrap()).deadline_misses
}

#[test]
fn rush_hour_under_average_config_slows_down() {
    let model = ModelParams::default();
    let hours = [(40.0, 12.0), (40.0, 12.0), (40.0, 12.0), (900.0, 6.5)];
    let table = configure(&hours, 8.0, &model);
    let avg = average_config(&table, "A1", 8.0).unwrap();
    let quiet = safe_speed(40.0, 12.0, &avg, 8.0, &model).unwrap();
    assert_eq!((quiet.safe_mps, quiet.deadline_misses), (12.0, 0));
    let rush = safe_speed(900.0, 6.5, &avg, 8.0, &model).unwrap();
    assert!(rush.deadline_misses > 0);
    assert!(rush.safe_mps < 6.5);
    assert_eq!(rush.safe_mps, 8.0 * 1000.0 / rush.max_response_ms as f64);
}

#[test]
fn traffic_levels_follow_counts() {
    let counts: Vec<(u8, f64)> = [30.0, 20.0, 15.0, 400.0, 1800.0, 1700.0, 420.0, 380.0]
        .iter()
        .enumerate()
        .map(|(h, &v)| (h as u8, v))
        .collect();
    let levels: Vec<TrafficLevel> = cluster_hours(&counts).unwrap().into_iter().map(|(_, l)| l).collect();
    use TrafficLevel::*;
    assert_eq!(levels, vec![Low, Low, Low, Medium, High, High, Medium, Medium]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn peak_dominates_average_and_covers_every_hour(hours in demand(), blind in 2.0f64..20.0) {
        let model = ModelParams::default();
        let table = configure(&hours, blind, &model);
        let peak = peak_config(&table, "A1", blind).unwrap();
        let avg = average_config(&table, "A1", blind).unwrap();
        prop_assert!(peak.capacity_bps >= avg.capacity_bps && peak.cores >= avg.cores);
        for &(v, s) in &hours {
            prop_assert_eq!(misses(v, s, peak.capacity_bps, peak.cores, blind, &model), 0);
        }
    }

    #[test]
    fn safe_speed_is_capped_by_regular_speed(hours in demand(), blind in 2.0f64..20.0) {
        let model = ModelParams::default();
        let table = configure(&hours, blind, &model);
        let avg = average_config(&table, "A1", blind).unwrap();
        for &(v, s) in &hours {
            let safe = safe_speed(v, s, &avg, blind, &model).unwrap();
            prop_assert!(safe.safe_mps > 0.0);
            prop_assert!(safe.safe_mps <= s);
            prop_assert_eq!(safe.safe_mps == s, safe.deadline_misses == 0);
        }
    }

    #[test]
    fn dominance_on_arbitrary_tables(rows in prop::collection::vec((1e6f64..1e10, 1u64..200), 1..24)) {
        let table: HourlyConfigTable = rows
            .iter()
            .enumerate()
            .map(|(h, &(capacity_bps, cores))| HourlyConfig {
                area_id: "A9".into(),
                hour: h as u8,
                blind_m: 4.0,
                config: EdgeConfig { capacity_bps, cores },
            })
            .collect();
        let peak = peak_config(&table, "A9", 4.0).unwrap();
        let avg = average_config(&table, "A9", 4.0).unwrap();
        prop_assert!(peak.capacity_bps >= avg.capacity_bps && peak.cores >= avg.cores);
    }

    #[test]
    fn kmeans_is_deterministic_and_ordered(values in prop::collection::vec(0.0f64..2000.0, 3..24)) {
        prop_assume!({
            let mut d = values.clone();
            d.sort_by(f64::total_cmp);
            d.dedup();
            d.len() >= 3
        });
        let a = kmeans_1d(&values, 3).unwrap();
        prop_assert_eq!(&a, &kmeans_1d(&values, 3).unwrap());
        prop_assert!(a.centroids.windows(2).all(|w| w[0] <= w[1]));
        // Larger values never land in a lower cluster.
        for (i, &x) in values.iter().enumerate() {
            for (j, &y) in values.iter().enumerate() {
                if x < y {
                    prop_assert!(a.assignment[i] <= a.assignment[j]);
                }
            }
        }
    }
}
