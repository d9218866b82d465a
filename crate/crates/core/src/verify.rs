//! Self-checks run by `leo-offload verify`: the search against exhaustive
//! enumeration and textbook Dijkstra, and the offloading invariants on
//! sampled tasks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constellation::{GeoPosition, EARTH_RADIUS_KM};
use crate::offload::{plan_offload, transmit_delay, NetworkState, ResourceTimeline, Scheme, Task, BITS_PER_GB};
use crate::simulator::{run, Scenario};
use crate::state_graph::{
    brute_force_shortest_path, path_length, search, shortest_path_with, validate_path, BruteForceOptions, DenseStateGraph,
    Extraction, PathError, SearchOptions, StateGraph, StateNode,
};

/// Deliberate defects for checking that the suites catch them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Negate one edge weight of every generated graph.
    NegateWeight,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub fault: Option<Fault>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    /// First failing case, if any.
    pub failure: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

struct Faulty<'a> {
    inner: &'a DenseStateGraph,
    fault: Option<Fault>,
}

impl StateGraph for Faulty<'_> {
    fn num_states(&self) -> usize {
        self.inner.num_states()
    }

    fn num_nodes(&self) -> usize {
        self.inner.num_nodes()
    }

    fn edge_weight(&self, state: usize, from: usize, to: usize, at: f64) -> f64 {
        let w = self.inner.edge_weight(state, from, to, at);
        match self.fault {
            Some(Fault::NegateWeight) if state == 0 && from == 0 && w.is_finite() => -w - 1.0,
            _ => w,
        }
    }

    fn transition_weight(&self, state: usize, node: usize, at: f64) -> f64 {
        self.inner.transition_weight(state, node, at)
    }
}

/// Random graph with integer weights in `0..=9`; each edge and transition
/// is absent with probability `absent`.
fn random_graph(rng: &mut ChaCha8Rng, num_states: usize, num_nodes: usize, absent: f64) -> DenseStateGraph {
    let mut g = DenseStateGraph::new(num_states, num_nodes);
    for k in 0..num_states {
        for a in 0..num_nodes {
            for b in 0..num_nodes {
                if a != b && !rng.random_bool(absent) {
                    g.set_edge(k, a, b, rng.random_range(0..=9) as f64);
                }
            }
            if k + 1 < num_states && !rng.random_bool(absent) {
                g.set_transition(k, a, rng.random_range(0..=9) as f64);
            }
        }
    }
    g
}

fn suite(name: &'static str, cases: usize, body: impl FnOnce() -> Result<(), String>) -> SuiteResult {
    SuiteResult { name, cases, failure: body().err() }
}

fn unreachable_as_infinity(e: PathError) -> Result<f64, PathError> {
    match e {
        PathError::Unreachable => Ok(f64::INFINITY),
        e => Err(e),
    }
}

fn oracle_equivalence(opts: &VerifyOptions) -> SuiteResult {
    let cases = 300;
    suite("oracle-equivalence", cases, || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for case in 0..cases {
            let (k, v) = (rng.random_range(1..=3), rng.random_range(1..=6));
            let dense = random_graph(&mut rng, k, v, 0.3);
            let g = Faulty { inner: &dense, fault: opts.fault };
            let (src, dst) = (rng.random_range(0..v), rng.random_range(0..v));
            let oracle = brute_force_shortest_path(&g, src, dst, 0.0, &BruteForceOptions::default())
                .map(|p| p.length)
                .or_else(unreachable_as_infinity)
                .map_err(|e| format!("case {case}: enumeration failed: {e}"))?;
            for extraction in [Extraction::LinearScan, Extraction::BinaryHeap] {
                let o = SearchOptions { extraction, stop_at: None };
                let got = shortest_path_with(&g, src, dst, 0.0, &o)
                    .map(|p| p.length)
                    .or_else(unreachable_as_infinity)
                    .map_err(|e| format!("case {case}: search failed: {e}"))?;
                if got != oracle {
                    return Err(format!("case {case} ({extraction:?}): search {got}, enumeration {oracle}"));
                }
            }
        }
        Ok(())
    })
}

// Textbook Dijkstra on one state, used to check the |K| = 1 reduction.
fn textbook_dijkstra(g: &DenseStateGraph, src: usize) -> Vec<f64> {
    let n = g.num_nodes();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[src] = 0.0;
    while let Some(u) = (0..n).filter(|&i| !done[i] && dist[i].is_finite()).min_by(|&a, &b| dist[a].total_cmp(&dist[b])) {
        done[u] = true;
        for w in 0..n {
            if w != u {
                dist[w] = dist[w].min(dist[u] + g.edge(0, u, w));
            }
        }
    }
    dist
}

fn classic_reduction(opts: &VerifyOptions) -> SuiteResult {
    let cases = 100;
    suite("classic-reduction", cases, || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
        for case in 0..cases {
            let v = rng.random_range(1..=30);
            let dense = random_graph(&mut rng, 1, v, 0.5);
            let g = Faulty { inner: &dense, fault: opts.fault };
            let src = rng.random_range(0..v);
            let st = search(&g, src, 0.0, &SearchOptions::default()).map_err(|e| format!("case {case}: {e}"))?;
            let expected = textbook_dijkstra(&dense, src);
            for (n, &want) in expected.iter().enumerate() {
                let got = st.dist(StateNode::new(0, n));
                if got != want {
                    return Err(format!("case {case}: node {n} distance {got}, expected {want}"));
                }
            }
        }
        Ok(())
    })
}

fn path_validity(opts: &VerifyOptions) -> SuiteResult {
    let cases = 200;
    suite("path-validity", cases, || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xa11d);
        for case in 0..cases {
            let (k, v) = (rng.random_range(1..=4), rng.random_range(2..=12));
            let dense = random_graph(&mut rng, k, v, 0.4);
            let g = Faulty { inner: &dense, fault: opts.fault };
            let st = search(&g, 0, 0.0, &SearchOptions::default()).map_err(|e| format!("case {case}: {e}"))?;
            if st.extraction_log().windows(2).any(|w| w[0].1 > w[1].1) {
                return Err(format!("case {case}: settled distances decrease"));
            }
            for target in 0..v {
                let Some(p) = st.path_to(StateNode::new(k - 1, target)) else { continue };
                validate_path(&p).map_err(|e| format!("case {case}: {e}"))?;
                let len = path_length(&g, &p, 0.0).map_err(|e| format!("case {case}: {e}"))?;
                if len != p.length {
                    return Err(format!("case {case}: reported length {} but path sums to {len}", p.length));
                }
            }
        }
        Ok(())
    })
}

fn sample_tasks(rng: &mut ChaCha8Rng, count: usize, sites: usize) -> Vec<Task> {
    (0..count)
        .map(|i| Task {
            id: i as u64,
            source: GeoPosition::new(rng.random_range(-60.0..60.0), rng.random_range(-180.0..180.0), EARTH_RADIUS_KM + 550.0),
            destination: rng.random_range(0..sites),
            gen_time_s: rng.random_range(0.0..600.0),
            compute_gflo: rng.random_range(1.0..2000.0),
            data_in_bits: rng.random_range(16.0..2.0 * BITS_PER_GB),
            data_out_bits: 16.0,
        })
        .collect()
}

// A default network whose links and CPUs already carry the reservations of
// a short contended run.
fn loaded_network(seed: u64) -> Result<NetworkState, String> {
    let mut s = Scenario::default();
    s.simulation.horizon_s = 30.0;
    s.simulation.seed = seed;
    let mut sim = crate::simulator::Simulation::new(&s).map_err(|e| e.to_string())?;
    while sim.step().map_err(|e| e.to_string())?.is_some() {}
    Ok(sim.network().clone())
}

fn offload_invariants(opts: &VerifyOptions) -> SuiteResult {
    let cases = 60;
    suite("offload-invariants", cases, || {
        let net = loaded_network(opts.seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x0ff1);
        for task in sample_tasks(&mut rng, cases, net.ground_sites().len()) {
            let plan = |s| plan_offload(&net, &task, s).map_err(|e| format!("task {}: {e}", task.id));
            let (a, g, o) = (plan(Scheme::Adaptive)?, plan(Scheme::Ground)?, plan(Scheme::OneHop)?);
            if a.overall_delay_s > g.overall_delay_s.min(o.overall_delay_s) + 1e-9 {
                return Err(format!(
                    "task {}: adaptive {} above ground {} / one-hop {}",
                    task.id, a.overall_delay_s, g.overall_delay_s, o.overall_delay_s
                ));
            }
            for p in [&a, &g, &o] {
                if (p.breakdown.total() - p.overall_delay_s).abs() > 1e-9 {
                    return Err(format!("task {} ({}): breakdown does not sum to the delay", task.id, p.scheme));
                }
                if p.path.transitions().count() != 1 {
                    return Err(format!("task {} ({}): expected one compute transition", task.id, p.scheme));
                }
                for leg in &p.legs {
                    let Some(service) = &leg.service else { continue };
                    let served: f64 = service.pieces.iter().map(|x| x.amount()).sum();
                    if (served - leg.amount).abs() > 1e-9 * leg.amount.max(1.0) {
                        return Err(format!("task {}: leg serves {served} of {}", task.id, leg.amount));
                    }
                }
            }
        }
        Ok(())
    })
}

fn fifo(opts: &VerifyOptions) -> SuiteResult {
    let cases = 200;
    suite("timeline-fifo", cases, || {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xf1f0);
        for case in 0..cases {
            let mut tl = ResourceTimeline::constant(5e9);
            let mut t = 0.0;
            for owner in 0..rng.random_range(0..8u64) {
                t += rng.random_range(0.0..3.0);
                let end = t + rng.random_range(0.01..2.0);
                tl.reserve_interval(t, end, owner).map_err(|e| format!("case {case}: {e}"))?;
                t = end;
            }
            let bits = rng.random_range(1.0..2e10);
            let mut last = f64::NEG_INFINITY;
            for i in 0..200 {
                let at = i as f64 * 0.1;
                let finish = at + transmit_delay(&tl, bits, at);
                if finish < last - 1e-9 {
                    return Err(format!("case {case}: departing at {at} finishes at {finish}, before {last}"));
                }
                last = finish;
            }
        }
        Ok(())
    })
}

fn determinism(opts: &VerifyOptions) -> SuiteResult {
    suite("determinism", 2, || {
        let mut s = Scenario::default();
        s.simulation.horizon_s = 20.0;
        s.simulation.seed = opts.seed;
        let a = run(&s).map_err(|e| e.to_string())?;
        let b = run(&s).map_err(|e| e.to_string())?;
        if a != b {
            return Err("two runs with one seed differ".into());
        }
        Ok(())
    })
}

/// Runs every suite in order.
pub fn run_suites(opts: &VerifyOptions) -> Vec<SuiteResult> {
    vec![
        oracle_equivalence(opts),
        classic_reduction(opts),
        path_validity(opts),
        offload_invariants(opts),
        fifo(opts),
        determinism(opts),
    ]
}
