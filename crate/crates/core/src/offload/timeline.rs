//! Piecewise-constant resource availability with exclusive reservations.
//!
//! A timeline covers `[0, ∞)` with segments of constant available capacity
//! (bits/s for a link, GFLOPS for a processor). Serving a demand integrates
//! the capacity forward from the arrival time until the demand is met, so a
//! job waits through zero-capacity stretches and fills any gaps in between.
//! Committing a job zeroes the capacity over the stretches it used.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TimelineError {
    #[error("timeline must start at t = 0")]
    BadStart,
    #[error("segment starts must be strictly increasing")]
    Unsorted,
    #[error("capacity {capacity} outside [0, {max}]")]
    Capacity { capacity: f64, max: f64 },
    #[error("reservation [{start}, {end}] overlaps {overlap} s of existing reservations")]
    Conflict { start: f64, end: f64, overlap: f64 },
}

/// One stretch of a served job: `[start, end]` at constant `capacity`.
/// `len` is the exact duration used for integration; `end` is the absolute
/// boundary used for reservations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub len: f64,
    pub capacity: f64,
}

impl Piece {
    pub fn amount(&self) -> f64 {
        self.capacity * self.len
    }
}

/// How a demand is served: contiguous pieces from the arrival time to the
/// finish time, including zero-capacity waits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Service {
    pub start: f64,
    pub finish: f64,
    pub pieces: Vec<Piece>,
}

impl Service {
    pub fn delay(&self) -> f64 {
        self.finish - self.start
    }

    /// Pieces with positive capacity.
    pub fn active(&self) -> impl Iterator<Item = &Piece> {
        self.pieces.iter().filter(|p| p.capacity > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub capacity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reservation {
    pub start: f64,
    pub end: f64,
    pub owner: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceTimeline {
    max_capacity: f64,
    starts: Vec<f64>,
    caps: Vec<f64>,
    base: (Vec<f64>, Vec<f64>),
    reservations: Vec<Reservation>,
}

// Zero-capacity overlap tolerated when reserving, seconds.
const SLIVER_S: f64 = 1e-9;

impl ResourceTimeline {
    /// Full capacity forever.
    pub fn constant(capacity: f64) -> Self {
        Self::from_breakpoints(capacity, &[(0.0, capacity)]).expect("constant timeline is valid")
    }

    /// Builds a timeline from `(start, capacity)` breakpoints; each capacity
    /// holds until the next start, the last one forever.
    pub fn from_breakpoints(max_capacity: f64, points: &[(f64, f64)]) -> Result<Self, TimelineError> {
        if points.first().map(|p| p.0) != Some(0.0) {
            return Err(TimelineError::BadStart);
        }
        if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(TimelineError::Unsorted);
        }
        if let Some(&(_, capacity)) = points.iter().find(|p| !(0.0..=max_capacity).contains(&p.1)) {
            return Err(TimelineError::Capacity { capacity, max: max_capacity });
        }
        let starts: Vec<f64> = points.iter().map(|p| p.0).collect();
        let caps: Vec<f64> = points.iter().map(|p| p.1).collect();
        let mut t = Self {
            max_capacity,
            base: (starts.clone(), caps.clone()),
            starts,
            caps,
            reservations: Vec::new(),
        };
        t.merge_all();
        t.base = (t.starts.clone(), t.caps.clone());
        Ok(t)
    }

    pub fn max_capacity(&self) -> f64 {
        self.max_capacity
    }

    pub fn reservations(&self) -> &[Reservation] {
        &self.reservations
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.starts.len()).map(move |i| Segment {
            start: self.starts[i],
            end: self.seg_end(i),
            capacity: self.caps[i],
        })
    }

    fn seg_end(&self, i: usize) -> f64 {
        self.starts.get(i + 1).copied().unwrap_or(f64::INFINITY)
    }

    fn seg_index(&self, t: f64) -> usize {
        self.starts.partition_point(|&s| s <= t).saturating_sub(1)
    }

    pub fn capacity_at(&self, t: f64) -> f64 {
        self.caps[self.seg_index(t)]
    }

    /// Walks forward from `start` until `amount` is integrated. Returns the
    /// finish time, or `None` if capacity stays at zero forever.
    fn walk(&self, start: f64, amount: f64, mut on_piece: impl FnMut(Piece)) -> Option<f64> {
        if amount <= 0.0 {
            return Some(start);
        }
        let mut i = self.seg_index(start);
        let mut cursor = start;
        let mut remaining = amount;
        loop {
            let (cap, end) = (self.caps[i], self.seg_end(i));
            if cap > 0.0 {
                let need = remaining / cap;
                if need <= end - cursor {
                    let finish = cursor + need;
                    on_piece(Piece { start: cursor, end: finish, len: need, capacity: cap });
                    return Some(finish);
                }
                let len = end - cursor;
                on_piece(Piece { start: cursor, end, len, capacity: cap });
                remaining -= cap * len;
            } else if end.is_infinite() {
                return None;
            } else if end > cursor {
                on_piece(Piece { start: cursor, end, len: end - cursor, capacity: 0.0 });
            }
            cursor = end;
            i += 1;
        }
    }

    /// Time needed to serve `amount` arriving at `start`; infinite if never.
    pub fn delay(&self, start: f64, amount: f64) -> f64 {
        self.walk(start, amount, |_| {}).map_or(f64::INFINITY, |f| f - start)
    }

    pub fn serve(&self, start: f64, amount: f64) -> Option<Service> {
        let mut pieces = Vec::new();
        let finish = self.walk(start, amount, |p| pieces.push(p))?;
        Some(Service { start, finish, pieces })
    }

    /// Integral of available capacity over `[start, start + len]`.
    pub fn integrate(&self, start: f64, len: f64) -> f64 {
        let mut i = self.seg_index(start);
        let mut cursor = start;
        let mut left = len;
        let mut total = 0.0;
        while left > 0.0 {
            let step = (self.seg_end(i) - cursor).min(left);
            total += self.caps[i] * step;
            left -= step;
            cursor = self.seg_end(i);
            i += 1;
            if i >= self.starts.len() && left > 0.0 {
                total += self.caps[i - 1] * left;
                break;
            }
        }
        total
    }

    /// Reserves the active pieces of `service` for `owner`.
    pub fn reserve(&mut self, service: &Service, owner: u64) -> Result<(), TimelineError> {
        for p in service.active() {
            self.reserve_interval(p.start, p.end, owner)?;
        }
        Ok(())
    }

    /// Zeroes capacity over `[start, end]`. Fails if more than a sliver of
    /// the interval is already unavailable.
    pub fn reserve_interval(&mut self, start: f64, end: f64, owner: u64) -> Result<(), TimelineError> {
        if !(end > start) {
            return Ok(());
        }
        let overlap = self.zero_measure(start, end);
        if overlap > SLIVER_S {
            return Err(TimelineError::Conflict { start, end, overlap });
        }
        self.zero(start, end);
        self.reservations.push(Reservation { start, end, owner });
        Ok(())
    }

    fn zero_measure(&self, start: f64, end: f64) -> f64 {
        let mut i = self.seg_index(start);
        let mut total = 0.0;
        while i < self.starts.len() && self.starts[i] < end {
            if self.caps[i] == 0.0 {
                total += self.seg_end(i).min(end) - self.starts[i].max(start);
            }
            i += 1;
        }
        total
    }

    fn split_at(&mut self, t: f64) -> usize {
        let i = self.seg_index(t);
        if self.starts[i] == t {
            return i;
        }
        self.starts.insert(i + 1, t);
        self.caps.insert(i + 1, self.caps[i]);
        i + 1
    }

    fn zero(&mut self, start: f64, end: f64) {
        let a = self.split_at(start);
        let b = if end.is_finite() { self.split_at(end) } else { self.starts.len() };
        for c in &mut self.caps[a..b] {
            *c = 0.0;
        }
        self.merge_all();
    }

    fn merge_all(&mut self) {
        let mut w = 0;
        for r in 0..self.starts.len() {
            if w > 0 && self.caps[w - 1] == self.caps[r] {
                continue;
            }
            self.starts[w] = self.starts[r];
            self.caps[w] = self.caps[r];
            w += 1;
        }
        self.starts.truncate(w);
        self.caps.truncate(w);
    }

    /// Re-applies every reservation, in order, to the original availability.
    pub fn replay(&self) -> Self {
        let mut t = Self {
            max_capacity: self.max_capacity,
            starts: self.base.0.clone(),
            caps: self.base.1.clone(),
            base: self.base.clone(),
            reservations: Vec::new(),
        };
        for r in &self.reservations {
            t.zero(r.start, r.end);
            t.reservations.push(*r);
        }
        t
    }

    /// True if no two reservations overlap by more than a sliver.
    pub fn reservations_disjoint(&self) -> bool {
        let mut spans: Vec<(f64, f64)> = self.reservations.iter().map(|r| (r.start, r.end)).collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        spans.windows(2).all(|w| w[1].0 >= w[0].1 - SLIVER_S)
    }
}

/// Where a computation would run, for the boundary cases of the compute
/// delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComputeNodeKind {
    /// The task's source never computes.
    Source,
    Satellite,
    /// Ground servers finish instantly.
    Ground,
}

/// Time to push `bits` through a link whose availability is `timeline`,
/// starting at `t_arrive`. Infinite if the link never carries enough data.
pub fn transmit_delay(timeline: &ResourceTimeline, bits: f64, t_arrive: f64) -> f64 {
    timeline.delay(t_arrive, bits)
}

/// Time to compute `gflo` on a node with availability `timeline`, starting
/// at `t_arrive`.
pub fn compute_delay(timeline: &ResourceTimeline, gflo: f64, t_arrive: f64, kind: ComputeNodeKind) -> f64 {
    match kind {
        ComputeNodeKind::Source => f64::INFINITY,
        ComputeNodeKind::Ground => 0.0,
        ComputeNodeKind::Satellite => timeline.delay(t_arrive, gflo),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const GBPS: f64 = 1e9;

    #[test]
    fn constant_rate_closed_form() {
        let sgl = ResourceTimeline::constant(GBPS);
        assert!((transmit_delay(&sgl, 3.2e9, 0.0) - 3.2).abs() < 1e-12);
    }

    #[test]
    fn waits_then_transmits() {
        let t = ResourceTimeline::from_breakpoints(5.0 * GBPS, &[(0.0, 0.0), (2.0, 5.0 * GBPS)]).unwrap();
        let d = transmit_delay(&t, 16.0, 0.0);
        assert!((d - (2.0 + 3.2e-9)).abs() < 1e-15, "{d}");
    }

    #[test]
    fn all_zero_never_finishes() {
        let t = ResourceTimeline::from_breakpoints(GBPS, &[(0.0, 0.0)]).unwrap();
        assert_eq!(transmit_delay(&t, 1.0, 0.0), f64::INFINITY);
        assert!(t.serve(0.0, 1.0).is_none());
    }

    #[test]
    fn compute_boundary_cases() {
        let cpu = ResourceTimeline::constant(200.0);
        assert!((compute_delay(&cpu, 1000.0, 0.0, ComputeNodeKind::Satellite) - 5.0).abs() < 1e-12);
        assert_eq!(compute_delay(&cpu, 1e6, 0.0, ComputeNodeKind::Ground), 0.0);
        assert_eq!(compute_delay(&cpu, 1.0, 0.0, ComputeNodeKind::Source), f64::INFINITY);
        assert_eq!(compute_delay(&cpu, 0.0, 3.0, ComputeNodeKind::Satellite), 0.0);
    }

    #[test]
    fn bad_breakpoints_rejected() {
        assert_eq!(ResourceTimeline::from_breakpoints(1.0, &[(1.0, 1.0)]), Err(TimelineError::BadStart));
        assert_eq!(
            ResourceTimeline::from_breakpoints(1.0, &[(0.0, 1.0), (0.0, 0.5)]),
            Err(TimelineError::Unsorted)
        );
        assert!(matches!(
            ResourceTimeline::from_breakpoints(1.0, &[(0.0, 2.0)]),
            Err(TimelineError::Capacity { .. })
        ));
    }

    #[test]
    fn reservation_blocks_second_job() {
        let mut t = ResourceTimeline::constant(10.0);
        let first = t.serve(0.0, 50.0).unwrap();
        assert_eq!(first.finish, 5.0);
        t.reserve(&first, 1).unwrap();
        let second = t.serve(0.0, 50.0).unwrap();
        assert_eq!(second.finish, 10.0);
        assert_eq!(second.pieces.len(), 2);
        assert_eq!(second.pieces[0].capacity, 0.0);
        assert!(t.reserve(&first, 2).is_err());
        t.reserve(&second, 2).unwrap();
        assert!(t.reservations_disjoint());
        assert_eq!(t.replay(), t);
    }

    #[test]
    fn later_job_fills_earlier_gap() {
        let mut t = ResourceTimeline::constant(1.0);
        t.reserve_interval(1.0, 2.0, 1).unwrap();
        t.reserve_interval(3.0, 4.0, 2).unwrap();
        // Needs 2.5 units from t = 0.5: [0.5,1] + [2,3] + [4,5].
        let s = t.serve(0.5, 2.5).unwrap();
        assert_eq!(s.finish, 5.0);
        assert_eq!(s.active().count(), 3);
        let total: f64 = s.pieces.iter().map(|p| t.integrate(p.start, p.len)).sum();
        assert!((total - 2.5).abs() < 1e-12);
    }

    #[test]
    fn segments_cover_half_line() {
        let mut t = ResourceTimeline::constant(4.0);
        t.reserve_interval(2.0, 3.0, 0).unwrap();
        let segs: Vec<_> = t.segments().collect();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[0].start, 0.0);
        assert_eq!(segs[2].end, f64::INFINITY);
        for w in segs.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
    }

    fn busy_timeline(gaps: &[(f64, f64)]) -> ResourceTimeline {
        let mut t = ResourceTimeline::constant(5.0 * GBPS);
        let mut at = 0.0;
        for (i, &(gap, busy)) in gaps.iter().enumerate() {
            at += gap;
            t.reserve_interval(at, at + busy, i as u64).unwrap();
            at += busy;
        }
        t
    }

    proptest! {
        #[test]
        fn inversion_is_exact(
            gaps in proptest::collection::vec((0.0..3.0f64, 0.0..3.0f64), 0..12),
            start in 0.0..40.0f64,
            amount in prop_oneof![Just(16.0), 1.0..1e10f64],
        ) {
            let t = busy_timeline(&gaps);
            let s = t.serve(start, amount).unwrap();
            let total: f64 = s.pieces.iter().map(|p| t.integrate(p.start, p.len)).sum();
            prop_assert!((total - amount).abs() <= 1e-9 * amount);
            // The pieces tile the served interval.
            prop_assert_eq!(s.pieces.first().map(|p| p.start), Some(start));
            for w in s.pieces.windows(2) {
                prop_assert_eq!(w[0].end, w[1].start);
            }
        }

        #[test]
        fn fifo_finish_times(
            gaps in proptest::collection::vec((0.0..3.0f64, 0.0..3.0f64), 0..12),
            t1 in 0.0..40.0f64, dt in 0.0..10.0f64,
            amount in 1.0..2e10f64,
        ) {
            let t = busy_timeline(&gaps);
            let t2 = t1 + dt;
            let f1 = t1 + transmit_delay(&t, amount, t1);
            let f2 = t2 + transmit_delay(&t, amount, t2);
            prop_assert!(f1 <= f2 + 1e-9);
        }

        #[test]
        fn replay_reconstructs(
            jobs in proptest::collection::vec((0.0..20.0f64, 1.0..30.0f64), 1..20),
        ) {
            let mut t = ResourceTimeline::constant(3.0);
            for (i, (at, amount)) in jobs.into_iter().enumerate() {
                let s = t.serve(at, amount).unwrap();
                t.reserve(&s, i as u64).unwrap();
            }
            prop_assert!(t.reservations_disjoint());
            prop_assert_eq!(t.replay(), t);
        }
    }
}
