//! Taxi GPS logs to batched matching instances.
//!
//! A pickup is a `0 -> 1` flip of the occupied flag between consecutive
//! records of one taxi; the rider is placed where the taxi was when the
//! flag flipped.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{MetricInstance, ScenarioSet};

const TIME_FORMAT: &str = "%Y-%m-%d %H:%M:%S";
const EARTH_RADIUS_M: f64 = 6_371_008.8;
const DAY: i64 = 86_400;

#[derive(Clone, Debug, PartialEq)]
pub struct TripRecord {
    pub taxi_id: String,
    /// Seconds since the Unix epoch, read as UTC.
    pub timestamp: i64,
    pub lon: f64,
    pub lat: f64,
    pub occupied: bool,
}

/// Axis-aligned lon/lat box given by its center and half extents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub lon: f64,
    pub lat: f64,
    pub half_lon: f64,
    pub half_lat: f64,
}

impl Default for BoundingBox {
    fn default() -> Self {
        BoundingBox { lon: 114.075, lat: 22.54, half_lon: 0.075, half_lat: 0.03 }
    }
}

impl BoundingBox {
    /// Accepts any coordinates.
    pub fn everywhere() -> Self {
        BoundingBox { lon: 0.0, lat: 0.0, half_lon: f64::INFINITY, half_lat: f64::INFINITY }
    }

    pub fn contains(&self, lon: f64, lat: f64) -> bool {
        (lon - self.lon).abs() <= self.half_lon && (lat - self.lat).abs() <= self.half_lat
    }
}

/// Time windows for one batch.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowSpec {
    pub t0: i64,
    /// Length of the first-stage window and of the second-stage window.
    pub stage_secs: i64,
    /// Past days whose second-stage window becomes a scenario.
    pub scenario_day_offsets: Vec<i64>,
    pub driver_lookback_secs: i64,
    pub driver_multiplier: f64,
}

impl WindowSpec {
    pub fn new(t0: i64) -> Self {
        WindowSpec {
            t0,
            stage_secs: 60,
            scenario_day_offsets: vec![7, 14],
            driver_lookback_secs: 300,
            driver_multiplier: 2.5,
        }
    }

    /// Parses `YYYY-MM-DD HH:MM:SS`.
    pub fn at(time: &str) -> Result<Self> {
        Ok(WindowSpec::new(parse_time(time).ok_or_else(|| Error::InvalidArgument(format!("bad time {time:?}")))?))
    }

    fn first_stage(&self) -> (i64, i64) {
        (self.t0, self.t0 + self.stage_secs)
    }

    fn second_stage(&self, days_back: i64) -> (i64, i64) {
        let start = self.t0 - days_back * DAY + self.stage_secs;
        (start, start + self.stage_secs)
    }
}

pub fn parse_time(s: &str) -> Option<i64> {
    NaiveDateTime::parse_from_str(s.trim(), TIME_FORMAT).ok().map(|t| t.and_utc().timestamp())
}

pub fn format_time(t: i64) -> String {
    DateTime::from_timestamp(t, 0).map_or_else(|| t.to_string(), |d| d.format(TIME_FORMAT).to_string())
}

/// Reads a trip log. Columns are found by header name; extra columns are
/// ignored and `speed`/`direction` are not interpreted.
pub fn read_trips_csv(path: &Path) -> Result<Vec<TripRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_error)?;
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse { line: 1, message: format!("missing column {name:?}") })
    };
    let (c_id, c_time, c_lon, c_lat, c_occ) = (col("taxi_id")?, col("time")?, col("lon")?, col("lat")?, col("occupied")?);
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| row.get(i).unwrap_or("");
        let bad = |what: &str, v: &str| Error::Parse { line, message: format!("bad {what} {v:?}") };
        let timestamp = parse_time(field(c_time)).ok_or_else(|| bad("time", field(c_time)))?;
        let lon: f64 = field(c_lon).parse().map_err(|_| bad("lon", field(c_lon)))?;
        let lat: f64 = field(c_lat).parse().map_err(|_| bad("lat", field(c_lat)))?;
        let occupied = match field(c_occ) {
            "0" => false,
            "1" => true,
            v => return Err(bad("occupied flag", v)),
        };
        out.push(TripRecord { taxi_id: field(c_id).to_string(), timestamp, lon, lat, occupied });
    }
    Ok(out)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse { line, message: format!("{other:?}") },
    }
}

/// A detected pickup.
#[derive(Clone, Debug, PartialEq)]
pub struct Pickup {
    pub taxi_id: String,
    pub timestamp: i64,
    pub lon: f64,
    pub lat: f64,
}

impl Pickup {
    pub fn label(&self) -> String {
        format!("{}@{}", self.taxi_id, format_time(self.timestamp))
    }
}

/// Per-taxi records inside `bbox`, time ordered (file order on ties).
fn by_taxi<'a>(records: &'a [TripRecord], bbox: &BoundingBox) -> BTreeMap<&'a str, Vec<&'a TripRecord>> {
    let mut map: BTreeMap<&str, Vec<&TripRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| bbox.contains(r.lon, r.lat)) {
        map.entry(&r.taxi_id).or_default().push(r);
    }
    for v in map.values_mut() {
        v.sort_by_key(|r| r.timestamp);
    }
    map
}

/// All pickups, ordered by time then taxi.
pub fn extract_pickups(records: &[TripRecord], bbox: &BoundingBox) -> Vec<Pickup> {
    let mut out: Vec<Pickup> = by_taxi(records, bbox)
        .into_values()
        .flat_map(|recs| {
            recs.windows(2)
                .filter(|w| !w[0].occupied && w[1].occupied)
                .map(|w| Pickup { taxi_id: w[1].taxi_id.clone(), timestamp: w[1].timestamp, lon: w[1].lon, lat: w[1].lat })
                .collect::<Vec<_>>()
        })
        .collect();
    out.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.taxi_id.cmp(&b.taxi_id)));
    out
}

/// Taxis seen in `[t0 - lookback, t0]` and never occupied there, at their
/// last position at or before `t0`. Sorted by taxi id.
pub fn available_drivers(records: &[TripRecord], bbox: &BoundingBox, t0: i64, lookback: i64) -> Vec<(String, f64, f64)> {
    by_taxi(records, bbox)
        .into_iter()
        .filter_map(|(id, recs)| {
            let window: Vec<&&TripRecord> = recs.iter().filter(|r| r.timestamp >= t0 - lookback && r.timestamp <= t0).collect();
            let last = window.last()?;
            if window.iter().any(|r| r.occupied) {
                return None;
            }
            Some((id.to_string(), last.lon, last.lat))
        })
        .collect()
}

/// Great-circle distance in meters.
pub fn haversine_m(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lon1, lat1) = (a.0.to_radians(), a.1.to_radians());
    let (lon2, lat2) = (b.0.to_radians(), b.1.to_radians());
    let h = ((lat2 - lat1) / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * ((lon2 - lon1) / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// One batch extracted from a log.
#[derive(Clone, Debug, PartialEq)]
pub struct TripInstance {
    /// Explicit scenarios are the nonempty past-day windows.
    pub instance: MetricInstance,
    /// `R2` indices of the pickups that actually followed the batch.
    pub realized: Vec<usize>,
    /// Pickup count of each past-day window in offset order, empty ones
    /// included.
    pub scenario_sizes: Vec<usize>,
}

pub fn ingest_trips_csv(path: &Path, window: &WindowSpec, bbox: &BoundingBox, seed: u64) -> Result<TripInstance> {
    build_trip_instance(&read_trips_csv(path)?, window, bbox, seed)
}

pub fn build_trip_instance(records: &[TripRecord], window: &WindowSpec, bbox: &BoundingBox, seed: u64) -> Result<TripInstance> {
    let pickups = extract_pickups(records, bbox);
    let within = |(lo, hi): (i64, i64)| -> Vec<&Pickup> { pickups.iter().filter(|p| p.timestamp >= lo && p.timestamp < hi).collect() };

    let r1 = within(window.first_stage());
    if r1.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let past: Vec<Vec<&Pickup>> = window.scenario_day_offsets.iter().map(|&d| within(window.second_stage(d))).collect();
    if past.iter().all(Vec::is_empty) {
        return Err(Error::EmptyWindow);
    }
    let realized = within(window.second_stage(0));

    let pool = available_drivers(records, bbox, window.t0, window.driver_lookback_secs);
    let want = (window.driver_multiplier * r1.len() as f64).ceil() as usize;
    let drivers: Vec<&(String, f64, f64)> = if pool.len() <= want {
        pool.iter().collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = index::sample(&mut rng, pool.len(), want).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| &pool[i]).collect()
    };
    if drivers.is_empty() {
        return Err(Error::InsufficientDrivers { needed: r1.len(), available: 0 });
    }

    let mut r2: Vec<&Pickup> = Vec::new();
    let mut scenarios = Vec::new();
    let mut scenario_sizes = Vec::new();
    for s in &past {
        scenario_sizes.push(s.len());
        if !s.is_empty() {
            scenarios.push((r2.len()..r2.len() + s.len()).collect::<Vec<_>>());
            r2.extend(s);
        }
    }
    let realized_idx: Vec<usize> = (r2.len()..r2.len() + realized.len()).collect();
    r2.extend(&realized);

    let points: Vec<(f64, f64)> = r1
        .iter()
        .chain(&r2)
        .map(|p| (p.lon, p.lat))
        .chain(drivers.iter().map(|d| (d.1, d.2)))
        .collect();
    let nv = points.len();
    let mut dist = vec![0.0; nv * nv];
    for u in 0..nv {
        for v in u + 1..nv {
            let d = haversine_m(points[u], points[v]);
            dist[u * nv + v] = d;
            dist[v * nv + u] = d;
        }
    }
    let labels = r2.iter().map(|p| p.label()).collect();
    let instance = MetricInstance::new(r1.len(), labels, drivers.len(), dist, ScenarioSet::Explicit(scenarios))?;
    Ok(TripInstance { instance, realized: realized_idx, scenario_sizes })
}
