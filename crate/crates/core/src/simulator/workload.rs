use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::scenario::{Region, Scenario};
use crate::constellation::GeoPosition;
use crate::offload::Task;

/// Draws a point uniformly by area inside a latitude/longitude box.
fn sample_position<R: Rng>(rng: &mut R, region: &Region, radius_km: f64) -> GeoPosition {
    let (s0, s1) = (region.lat_min_deg.to_radians().sin(), region.lat_max_deg.to_radians().sin());
    let lat = (s0 + (s1 - s0) * rng.random::<f64>()).asin().to_degrees();
    let lon = region.lon_min_deg + (region.lon_max_deg - region.lon_min_deg) * rng.random::<f64>();
    GeoPosition::new(lat, lon, radius_km)
}

/// The tasks of a scenario, ordered by generation time and numbered from 0.
///
/// Each region is an independent Poisson process whose rate is its share of
/// the total arrival rate. A configured single task replaces the arrivals.
pub fn generate_tasks(scenario: &Scenario) -> Vec<Task> {
    let w = &scenario.workload;
    let data_in_bits = scenario.data_in_bits();
    let radius = scenario.source_radius_km();
    let make = |id, source, destination, gen_time_s| Task {
        id,
        source,
        destination,
        gen_time_s,
        compute_gflo: w.compute_gflo,
        data_in_bits,
        data_out_bits: w.data_out_bits,
    };

    if let Some(t) = &w.single_task {
        let source = GeoPosition::new(t.source_lat_deg, t.source_lon_deg, radius);
        return vec![make(0, source, t.destination, t.gen_time_s)];
    }

    let mut rng = ChaCha8Rng::seed_from_u64(scenario.simulation.seed);
    let horizon = scenario.simulation.horizon_s;
    let total_weight: f64 = w.regions.iter().map(|r| r.weight).sum();
    let mut arrivals: Vec<(f64, usize, GeoPosition, usize)> = Vec::new();
    if w.arrival_rate_total > 0.0 && total_weight > 0.0 {
        for (ri, region) in w.regions.iter().enumerate() {
            let rate = w.arrival_rate_total * region.weight / total_weight / w.rate_unit_s;
            if rate <= 0.0 {
                continue;
            }
            let gap = Exp::new(rate).expect("positive rate");
            let mut t = gap.sample(&mut rng);
            while t < horizon {
                let source = sample_position(&mut rng, region, radius);
                let destination = rng.random_range(0..w.ground_sites.len());
                arrivals.push((t, ri, source, destination));
                t += gap.sample(&mut rng);
            }
        }
    }
    arrivals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    arrivals
        .into_iter()
        .enumerate()
        .map(|(i, (t, _, source, destination))| make(i as u64, source, destination, t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_is_empty() {
        let mut s = Scenario::default();
        s.workload.arrival_rate_total = 0.0;
        assert!(generate_tasks(&s).is_empty());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let s = Scenario::default();
        assert_eq!(generate_tasks(&s), generate_tasks(&s));
        let mut other = s.clone();
        other.simulation.seed = 2;
        assert_ne!(generate_tasks(&s), generate_tasks(&other));
    }

    #[test]
    fn poisson_count_within_three_sigma() {
        let mut s = Scenario::default();
        s.workload.arrival_rate_total = 1000.0;
        s.workload.rate_unit_s = 1.0;
        s.simulation.horizon_s = 10.0;
        let n = generate_tasks(&s).len() as f64;
        assert!((n - 10_000.0).abs() <= 300.0, "{n}");
    }

    #[test]
    fn sorted_and_inside_regions() {
        let mut s = Scenario::default();
        s.simulation.horizon_s = 120.0;
        let tasks = generate_tasks(&s);
        assert!(!tasks.is_empty());
        assert!(tasks.windows(2).all(|w| w[0].gen_time_s <= w[1].gen_time_s));
        for (i, t) in tasks.iter().enumerate() {
            assert_eq!(t.id, i as u64);
            assert!(t.gen_time_s < 120.0);
            assert!(t.destination < s.workload.ground_sites.len());
            assert!((t.source.radius_km - s.source_radius_km()).abs() < 1e-9);
            let inside = s.workload.regions.iter().any(|r| {
                (r.lat_min_deg - 1e-9..=r.lat_max_deg + 1e-9).contains(&t.source.lat_deg)
                    && (r.lon_min_deg - 1e-9..=r.lon_max_deg + 1e-9).contains(&t.source.lon_deg)
            });
            assert!(inside, "{:?}", t.source);
        }
    }

    #[test]
    fn region_shares_follow_weights() {
        let mut s = Scenario::default();
        s.workload.rate_unit_s = 1.0;
        s.simulation.horizon_s = 20.0;
        let tasks = generate_tasks(&s);
        let r = &s.workload.regions[0];
        let in_first = tasks
            .iter()
            .filter(|t| t.source.lat_deg >= r.lat_min_deg && t.source.lat_deg <= r.lat_max_deg && t.source.lon_deg >= r.lon_min_deg && t.source.lon_deg <= r.lon_max_deg)
            .count() as f64;
        let expected = 20_000.0 * r.weight;
        assert!((in_first - expected).abs() < 4.0 * expected.sqrt(), "{in_first} vs {expected}");
    }
}
