//! Walker Star geometry: circular polar orbits, inter-satellite links and
//! ground visibility.
//!
//! The Earth is a sphere of radius [`EARTH_RADIUS_KM`]. By default it does not
//! rotate, so ground nodes are fixed in the same frame as the orbital planes.
//! Plane `p` of `P` has its ascending node at longitude `p * 180 / P` degrees
//! and every plane is polar, which puts the counter-rotating seam between
//! plane `0` and plane `P - 1`. Slot `i` of `S` starts at argument of latitude
//! `i * 360 / S` degrees at the epoch, with no phase offset between planes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub const EARTH_RADIUS_KM: f64 = 6371.0;
/// Standard gravitational parameter of the Earth, km³/s².
pub const EARTH_MU_KM3_S2: f64 = 398_600.441_8;
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_9e-5;
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstellationConfig {
    pub num_planes: usize,
    pub sats_per_plane: usize,
    pub altitude_km: f64,
    /// Inter-plane links are off while either endpoint is above this
    /// absolute latitude.
    pub polar_cutoff_lat_deg: f64,
    /// Minimum elevation for a satellite-to-ground link.
    pub min_elevation_deg: f64,
    pub epoch_s: f64,
    /// Rotate the Earth under the constellation. Set from the scenario
    /// toggles rather than the constellation section.
    #[serde(skip)]
    pub earth_rotation: bool,
}

impl Default for ConstellationConfig {
    fn default() -> Self {
        Self {
            num_planes: 8,
            sats_per_plane: 16,
            altitude_km: 500.0,
            polar_cutoff_lat_deg: 66.6,
            min_elevation_deg: 10.0,
            epoch_s: 0.0,
            earth_rotation: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("constellation.{key}: {reason}")]
pub struct ConstellationError {
    pub key: &'static str,
    pub reason: String,
}

impl ConstellationConfig {
    pub fn validate(&self) -> Result<(), ConstellationError> {
        let err = |key, reason: &str| Err(ConstellationError { key, reason: reason.to_string() });
        if self.num_planes == 0 {
            return err("num_planes", "must be at least 1");
        }
        if self.sats_per_plane == 0 {
            return err("sats_per_plane", "must be at least 1");
        }
        if !(self.altitude_km > 0.0 && self.altitude_km.is_finite()) {
            return err("altitude_km", "must be positive");
        }
        if !(0.0..=90.0).contains(&self.polar_cutoff_lat_deg) {
            return err("polar_cutoff_lat_deg", "must be within [0, 90]");
        }
        if !(-90.0..=90.0).contains(&self.min_elevation_deg) {
            return err("min_elevation_deg", "must be within [-90, 90]");
        }
        if !self.epoch_s.is_finite() {
            return err("epoch_s", "must be finite");
        }
        Ok(())
    }

    pub fn num_satellites(&self) -> usize {
        self.num_planes * self.sats_per_plane
    }

    pub fn orbit_radius_km(&self) -> f64 {
        EARTH_RADIUS_KM + self.altitude_km
    }

    /// Kepler's third law for the circular orbit.
    pub fn orbital_period_s(&self) -> f64 {
        2.0 * PI * (self.orbit_radius_km().powi(3) / EARTH_MU_KM3_S2).sqrt()
    }

    pub fn satellites(&self) -> impl Iterator<Item = SatelliteId> + '_ {
        (0..self.num_satellites()).map(|n| SatelliteId::from_node(self, n))
    }

    fn mean_motion_rad_s(&self) -> f64 {
        2.0 * PI / self.orbital_period_s()
    }

    /// Argument of latitude of `sat` at time `t`, radians.
    fn phase_rad(&self, sat: SatelliteId, t: f64) -> f64 {
        let slot = 2.0 * PI * sat.slot as f64 / self.sats_per_plane as f64;
        slot + self.mean_motion_rad_s() * (t - self.epoch_s)
    }

    fn ascending_node_rad(&self, sat: SatelliteId) -> f64 {
        PI * sat.plane as f64 / self.num_planes as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SatelliteId {
    pub plane: usize,
    pub slot: usize,
}

impl SatelliteId {
    pub const fn new(plane: usize, slot: usize) -> Self {
        Self { plane, slot }
    }

    /// Dense node id, `plane * sats_per_plane + slot`.
    pub fn node(self, cfg: &ConstellationConfig) -> usize {
        self.plane * cfg.sats_per_plane + self.slot
    }

    pub fn from_node(cfg: &ConstellationConfig, node: usize) -> Self {
        Self { plane: node / cfg.sats_per_plane, slot: node % cfg.sats_per_plane }
    }

    pub fn is_valid(self, cfg: &ConstellationConfig) -> bool {
        self.plane < cfg.num_planes && self.slot < cfg.sats_per_plane
    }
}

impl std::fmt::Display for SatelliteId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}", self.plane, self.slot)
    }
}

/// Earth-centred cartesian coordinates, km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub fn dot(self, o: Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

/// Geocentric spherical position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPosition {
    pub lat_deg: f64,
    /// In `(-180, 180]`.
    pub lon_deg: f64,
    pub radius_km: f64,
}

impl GeoPosition {
    pub fn new(lat_deg: f64, lon_deg: f64, radius_km: f64) -> Self {
        Self { lat_deg, lon_deg: wrap_lon_deg(lon_deg), radius_km }
    }

    pub fn to_cartesian(self) -> Vec3 {
        let (lat, lon) = (self.lat_deg.to_radians(), self.lon_deg.to_radians());
        Vec3([
            self.radius_km * lat.cos() * lon.cos(),
            self.radius_km * lat.cos() * lon.sin(),
            self.radius_km * lat.sin(),
        ])
    }

    pub fn from_cartesian(v: Vec3) -> Self {
        let [x, y, z] = v.0;
        let radius_km = v.norm();
        Self::new(z.atan2(x.hypot(y)).to_degrees(), y.atan2(x).to_degrees(), radius_km)
    }
}

/// Wraps a longitude into `(-180, 180]`.
pub fn wrap_lon_deg(lon: f64) -> f64 {
    let w = (lon + 180.0).rem_euclid(360.0) - 180.0;
    if w == -180.0 {
        180.0
    } else {
        w
    }
}

/// A ground endpoint: station, server and institution merged into one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundNode {
    pub lat_deg: f64,
    pub lon_deg: f64,
}

impl GroundNode {
    pub fn new(lat_deg: f64, lon_deg: f64) -> Self {
        Self { lat_deg, lon_deg }
    }

    pub fn position(self) -> GeoPosition {
        GeoPosition::new(self.lat_deg, self.lon_deg, EARTH_RADIUS_KM)
    }

    pub fn is_valid(self) -> bool {
        (-90.0..=90.0).contains(&self.lat_deg) && self.lon_deg.is_finite()
    }
}

/// Position of `sat` at time `t` on its circular polar orbit, in the
/// Earth-fixed frame (which equals the inertial frame unless Earth rotation
/// is enabled).
pub fn satellite_position(cfg: &ConstellationConfig, sat: SatelliteId, t: f64) -> GeoPosition {
    let u = cfg.phase_rad(sat, t);
    let raan = cfg.ascending_node_rad(sat);
    let r = cfg.orbit_radius_km();
    // Inclination 90 degrees: the orbit lies in the plane spanned by the
    // ascending-node direction and the pole.
    let (su, cu) = u.sin_cos();
    let mut pos = GeoPosition::from_cartesian(Vec3([r * raan.cos() * cu, r * raan.sin() * cu, r * su]));
    pos.radius_km = r;
    if cfg.earth_rotation {
        pos.lon_deg = wrap_lon_deg(pos.lon_deg - (EARTH_ROTATION_RAD_S * (t - cfg.epoch_s)).to_degrees());
    }
    pos
}

/// Latitude of `sat` at `t`, degrees. Cheaper than a full position.
pub fn satellite_latitude_deg(cfg: &ConstellationConfig, sat: SatelliteId, t: f64) -> f64 {
    cfg.phase_rad(sat, t).sin().clamp(-1.0, 1.0).asin().to_degrees()
}

fn inter_plane_link_up(cfg: &ConstellationConfig, a: SatelliteId, b: SatelliteId, t: f64) -> bool {
    satellite_latitude_deg(cfg, a, t).abs() <= cfg.polar_cutoff_lat_deg
        && satellite_latitude_deg(cfg, b, t).abs() <= cfg.polar_cutoff_lat_deg
}

/// Whether an inter-satellite link joins `a` and `b` at time `t`.
pub fn isl_connected(cfg: &ConstellationConfig, a: SatelliteId, b: SatelliteId, t: f64) -> bool {
    if a == b {
        return false;
    }
    let s = cfg.sats_per_plane;
    if a.plane == b.plane {
        return (a.slot + 1) % s == b.slot || (b.slot + 1) % s == a.slot;
    }
    // Planes 0 and P-1 are never adjacent: that pair is the seam.
    a.slot == b.slot && a.plane.abs_diff(b.plane) == 1 && inter_plane_link_up(cfg, a, b, t)
}

/// Neighbours of `sat` over live inter-satellite links at time `t`, sorted.
pub fn isl_neighbors(cfg: &ConstellationConfig, sat: SatelliteId, t: f64) -> Vec<SatelliteId> {
    let mut out = Vec::with_capacity(4);
    for other in isl_candidates(cfg, sat) {
        if isl_connected(cfg, sat, other, t) {
            out.push(other);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Every satellite that can ever share an inter-satellite link with `sat`,
/// regardless of time.
pub fn isl_candidates(cfg: &ConstellationConfig, sat: SatelliteId) -> Vec<SatelliteId> {
    let (p, i, s) = (sat.plane, sat.slot, cfg.sats_per_plane);
    let mut out = Vec::with_capacity(4);
    if s > 1 {
        out.push(SatelliteId::new(p, (i + 1) % s));
        out.push(SatelliteId::new(p, (i + s - 1) % s));
    }
    if p + 1 < cfg.num_planes {
        out.push(SatelliteId::new(p + 1, i));
    }
    if p > 0 {
        out.push(SatelliteId::new(p - 1, i));
    }
    out.sort();
    out.dedup();
    out
}

/// Elevation of `target` above the local horizon of `observer`, degrees.
pub fn elevation_deg(observer: GeoPosition, target: GeoPosition) -> f64 {
    let o = observer.to_cartesian();
    let d = target.to_cartesian().sub(o);
    let range = d.norm();
    if range == 0.0 {
        return 90.0;
    }
    (d.dot(o) / (range * o.norm())).clamp(-1.0, 1.0).asin().to_degrees()
}

/// Whether `sat` is at least `min_elevation_deg` above the horizon of
/// `ground` at time `t`.
pub fn sgl_visible(cfg: &ConstellationConfig, sat: SatelliteId, ground: GroundNode, t: f64) -> bool {
    elevation_deg(ground.position(), satellite_position(cfg, sat, t)) >= cfg.min_elevation_deg
}

/// Straight-line distance between two positions, km.
pub fn distance_km(a: GeoPosition, b: GeoPosition) -> f64 {
    a.to_cartesian().sub(b.to_cartesian()).norm()
}

/// Whether the segment between `a` and `b` clears the Earth's surface.
pub fn line_of_sight(a: GeoPosition, b: GeoPosition) -> bool {
    let (pa, pb) = (a.to_cartesian(), b.to_cartesian());
    let d = pb.sub(pa);
    let len2 = d.dot(d);
    let closest = if len2 == 0.0 {
        pa.norm()
    } else {
        let t = (-pa.dot(d) / len2).clamp(0.0, 1.0);
        Vec3([pa.0[0] + t * d.0[0], pa.0[1] + t * d.0[1], pa.0[2] + t * d.0[2]]).norm()
    };
    closest >= EARTH_RADIUS_KM * (1.0 - 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> ConstellationConfig {
        ConstellationConfig::default()
    }

    #[test]
    fn first_satellite_starts_at_ascending_node() {
        let p = satellite_position(&cfg(), SatelliteId::new(0, 0), 0.0);
        assert!(p.lat_deg.abs() < 1e-12);
        assert!(p.lon_deg.abs() < 1e-12);
        assert_eq!(p.radius_km, 6871.0);
    }

    #[test]
    fn period_matches_kepler() {
        let a: f64 = 6871.0;
        let kepler = 2.0 * PI * (a * a * a / 398_600.441_8).sqrt();
        let c = cfg();
        assert!((c.orbital_period_s() - kepler).abs() < 1e-9);
        for sat in [SatelliteId::new(0, 0), SatelliteId::new(3, 5), SatelliteId::new(7, 15)] {
            let p0 = satellite_position(&c, sat, 0.0);
            let p1 = satellite_position(&c, sat, kepler);
            assert!((p0.lat_deg - p1.lat_deg).abs() < 1e-6);
            let dlon = wrap_lon_deg(p0.lon_deg - p1.lon_deg).abs();
            assert!(dlon < 1e-6, "{sat}: {dlon}");
        }
    }

    #[test]
    fn opposite_slots_are_antipodal_in_plane() {
        let c = cfg();
        for t in [0.0, 123.4, 2000.0] {
            let a = satellite_position(&c, SatelliteId::new(0, 0), t).to_cartesian();
            let b = satellite_position(&c, SatelliteId::new(0, 8), t).to_cartesian();
            let cos = a.dot(b) / (a.norm() * b.norm());
            assert!((cos + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_satellite_has_four_links_at_equator() {
        let got = isl_neighbors(&cfg(), SatelliteId::new(3, 2), 0.0);
        let want = vec![SatelliteId::new(2, 2), SatelliteId::new(3, 1), SatelliteId::new(3, 3), SatelliteId::new(4, 2)];
        assert!(satellite_latitude_deg(&cfg(), SatelliteId::new(3, 2), 0.0).abs() < 66.6);
        assert_eq!(got, want);
    }

    #[test]
    fn seam_is_never_crossed() {
        let c = cfg();
        for slot in 0..16 {
            let n = isl_neighbors(&c, SatelliteId::new(0, slot), 0.0);
            assert!(n.iter().all(|s| s.plane != 7));
            let n = isl_neighbors(&c, SatelliteId::new(7, slot), 0.0);
            assert!(n.iter().all(|s| s.plane != 0));
        }
    }

    #[test]
    fn polar_satellite_keeps_only_intra_plane_links() {
        let c = cfg();
        // Slot 4 of 16 sits at 90 degrees of argument of latitude at t = 0.
        let sat = SatelliteId::new(3, 4);
        assert!(satellite_latitude_deg(&c, sat, 0.0) > c.polar_cutoff_lat_deg);
        assert_eq!(isl_neighbors(&c, sat, 0.0), vec![SatelliteId::new(3, 3), SatelliteId::new(3, 5)]);
    }

    #[test]
    fn overhead_is_visible_antipode_is_not() {
        let c = cfg();
        let sat = SatelliteId::new(2, 1);
        let p = satellite_position(&c, sat, 10.0);
        assert!(sgl_visible(&c, sat, GroundNode::new(p.lat_deg, p.lon_deg), 10.0));
        assert!((elevation_deg(GroundNode::new(p.lat_deg, p.lon_deg).position(), p) - 90.0).abs() < 1e-6);
        let anti = GroundNode::new(-p.lat_deg, wrap_lon_deg(p.lon_deg + 180.0));
        assert!(!sgl_visible(&c, sat, anti, 10.0));
    }

    /// Horizon geometry: the largest Earth central angle at which a satellite
    /// at radius r is seen at elevation e is acos(R cos e / r) - e.
    fn max_central_angle_deg(r: f64, elev_deg: f64) -> f64 {
        let e = elev_deg.to_radians();
        ((EARTH_RADIUS_KM * e.cos() / r).acos() - e).to_degrees()
    }

    #[test]
    fn visibility_matches_horizon_oracle() {
        let c = cfg();
        let lambda = max_central_angle_deg(c.orbit_radius_km(), c.min_elevation_deg);
        let ground_km = lambda.to_radians() * EARTH_RADIUS_KM;
        assert!((ground_km - 1563.0).abs() < 2.0, "{ground_km}");
        let sat = SatelliteId::new(0, 0);
        // Sub-satellite point is (0, 0) at t = 0; move the observer along the equator.
        for step in 0..200 {
            let dlon = step as f64 * 0.1;
            if (dlon - lambda).abs() < 1e-3 {
                continue;
            }
            let vis = sgl_visible(&c, sat, GroundNode::new(0.0, dlon), 0.0);
            assert_eq!(vis, dlon < lambda, "dlon {dlon}");
        }
    }

    #[test]
    fn chord_distance_examples() {
        let a = GeoPosition::new(10.0, 20.0, 7000.0);
        assert_eq!(distance_km(a, a), 0.0);
        let r = 6871.0;
        let d = distance_km(GeoPosition::new(0.0, 0.0, r), GeoPosition::new(0.0, 90.0, r));
        assert!((d - r * 2f64.sqrt()).abs() < 1e-9);
    }

    fn haversine_chord(a: GeoPosition, b: GeoPosition) -> f64 {
        let (p1, p2) = (a.lat_deg.to_radians(), b.lat_deg.to_radians());
        let dp = p2 - p1;
        let dl = (b.lon_deg - a.lon_deg).to_radians();
        let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
        let c = 2.0 * h.sqrt().clamp(0.0, 1.0).asin();
        // Law of cosines, written to avoid cancellation: 1 - cos c = 2 sin²(c/2).
        let (r1, r2) = (a.radius_km, b.radius_km);
        ((r1 - r2).powi(2) + 4.0 * r1 * r2 * (c / 2.0).sin().powi(2)).sqrt()
    }

    proptest! {
        #[test]
        fn chord_matches_haversine(
            lat1 in -90.0..90.0f64, lon1 in -180.0..180.0f64, r1 in 6371.0..8000.0f64,
            lat2 in -90.0..90.0f64, lon2 in -180.0..180.0f64, r2 in 6371.0..8000.0f64,
        ) {
            let a = GeoPosition::new(lat1, lon1, r1);
            let b = GeoPosition::new(lat2, lon2, r2);
            prop_assert!((distance_km(a, b) - haversine_chord(a, b)).abs() < 1e-9 * 16000.0);
        }

        #[test]
        fn neighbor_symmetry_and_degree(t in 0.0..20000.0f64) {
            let c = cfg();
            for sat in c.satellites() {
                let n = isl_neighbors(&c, sat, t);
                prop_assert!((2..=4).contains(&n.len()), "{} has {} links", sat, n.len());
                for other in n {
                    prop_assert!(isl_neighbors(&c, other, t).contains(&sat));
                }
            }
        }

        #[test]
        fn radius_is_conserved_and_periodic(t in 0.0..20000.0f64, node in 0usize..128) {
            let c = cfg();
            let sat = SatelliteId::from_node(&c, node);
            let p = satellite_position(&c, sat, t);
            prop_assert!((p.to_cartesian().norm() - c.orbit_radius_km()).abs() < 1e-6);
            let q = satellite_position(&c, sat, t + c.orbital_period_s());
            prop_assert!(distance_km(p, q) < 1e-5);
            prop_assert_eq!(isl_neighbors(&c, sat, t), isl_neighbors(&c, sat, t + c.orbital_period_s()));
        }
    }

    #[test]
    fn validation_rejects_bad_values() {
        let mut c = cfg();
        c.num_planes = 0;
        assert_eq!(c.validate().unwrap_err().key, "num_planes");
        let mut c = cfg();
        c.altitude_km = -1.0;
        assert_eq!(c.validate().unwrap_err().key, "altitude_km");
        assert!(cfg().validate().is_ok());
    }

    #[test]
    fn earth_rotation_shifts_longitude_only() {
        let mut c = cfg();
        let sat = SatelliteId::new(1, 1);
        let fixed = satellite_position(&c, sat, 600.0);
        c.earth_rotation = true;
        let rot = satellite_position(&c, sat, 600.0);
        assert!((fixed.lat_deg - rot.lat_deg).abs() < 1e-12);
        let shift = wrap_lon_deg(fixed.lon_deg - rot.lon_deg);
        assert!((shift - (EARTH_ROTATION_RAD_S * 600.0).to_degrees()).abs() < 1e-9);
    }

    #[test]
    fn line_of_sight_blocked_through_earth() {
        let a = GeoPosition::new(0.0, 0.0, 6871.0);
        assert!(!line_of_sight(a, GeoPosition::new(0.0, 180.0, 6871.0)));
        assert!(line_of_sight(a, GeoPosition::new(0.0, 10.0, 6871.0)));
    }
}
