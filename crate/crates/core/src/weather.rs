//! Hourly climate input, solar geometry and shortwave irradiance on the
//! chamber's exterior surfaces.

use std::path::Path;
use std::sync::Arc;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psychro::{self, P_ATM};

pub const WEATHER_HEADER: [&str; 6] = ["timestamp", "t_ext_c", "rh_ext", "ghi_wm2", "dni_wm2", "dhi_wm2"];

const HOURS_PER_YEAR: usize = 8760;
const HOURS_PER_LEAP_YEAR: usize = 8784;
/// Irradiance recorded while the sun is this far below the horizon for the
/// whole hour is treated as instrument noise.
const NIGHT_TOLERANCE_DEG: f64 = 0.5;
const MAX_IRRADIANCE: f64 = 1500.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub name: String,
    /// degrees north
    pub latitude: f64,
    /// degrees east
    pub longitude: f64,
    /// hours ahead of UTC for the local standard time used in the weather file
    pub utc_offset: f64,
    /// meters
    pub altitude: f64,
}

impl Location {
    pub fn new(name: &str, latitude: f64, longitude: f64, utc_offset: f64, altitude: f64) -> Result<Self> {
        let loc = Self {
            name: name.to_string(),
            latitude,
            longitude,
            utc_offset,
            altitude,
        };
        loc.validate()?;
        Ok(loc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.latitude) {
            return Err(Error::validation("latitude", format!("{}", self.latitude)));
        }
        if !(-180.0..=180.0).contains(&self.longitude) {
            return Err(Error::validation("longitude", format!("{}", self.longitude)));
        }
        if !(-14.0..=14.0).contains(&self.utc_offset) {
            return Err(Error::validation("utc_offset", format!("{}", self.utc_offset)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeatherRecord {
    /// local standard time at the start of the hour
    pub timestamp: NaiveDateTime,
    /// °C
    pub t_ext: f64,
    /// fraction 0–1
    pub rh_ext: f64,
    /// W m⁻²
    pub ghi: f64,
    pub dni: Option<f64>,
    pub dhi: Option<f64>,
}

impl WeatherRecord {
    fn validate(&self) -> Result<()> {
        if !self.t_ext.is_finite() || !(-90.0..=60.0).contains(&self.t_ext) {
            return Err(Error::validation("t_ext", format!("t_ext out of range: {}", self.t_ext)));
        }
        if !self.rh_ext.is_finite() || !(0.0..=1.0).contains(&self.rh_ext) {
            return Err(Error::validation("rh_ext", format!("rh_ext out of range: {}", self.rh_ext)));
        }
        for (field, v) in [("ghi", Some(self.ghi)), ("dni", self.dni), ("dhi", self.dhi)] {
            if let Some(v) = v {
                if !v.is_finite() || !(0.0..=MAX_IRRADIANCE).contains(&v) {
                    return Err(Error::validation(field, format!("{field} out of range: {v}")));
                }
            }
        }
        Ok(())
    }
}

/// Validated hourly weather for one location-year. Immutable after load.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    location: Location,
    records: Vec<WeatherRecord>,
    /// rows where dni or dhi was left empty
    missing_components: usize,
    /// rows with daytime irradiance recorded while the sun was down
    night_clipped: usize,
}

impl WeatherSeries {
    /// Validates values and hourly spacing; does not require a full year.
    pub fn new(location: Location, mut records: Vec<WeatherRecord>) -> Result<Self> {
        location.validate()?;
        if records.is_empty() {
            return Err(Error::Schema("weather series has no records".into()));
        }
        for r in &records {
            r.validate()?;
        }
        for w in records.windows(2) {
            if w[1].timestamp - w[0].timestamp != Duration::hours(1) {
                return Err(Error::Schema(format!(
                    "non-hourly spacing between {} and {}",
                    w[0].timestamp, w[1].timestamp
                )));
            }
        }
        let missing_components = records.iter().filter(|r| r.dni.is_none() || r.dhi.is_none()).count();
        let mut night_clipped = 0;
        for r in &mut records {
            let has_light = r.ghi > 0.0 || r.dni.unwrap_or(0.0) > 0.0 || r.dhi.unwrap_or(0.0) > 0.0;
            if has_light && sun_down_all_hour(&location, r.timestamp) {
                r.ghi = 0.0;
                r.dni = r.dni.map(|_| 0.0);
                r.dhi = r.dhi.map(|_| 0.0);
                night_clipped += 1;
            }
        }
        Ok(Self {
            location,
            records,
            missing_components,
            night_clipped,
        })
    }

    /// Constant conditions over one non-leap year, for tests and what-if runs.
    pub fn uniform(location: Location, year: i32, t_ext: f64, rh_ext: f64) -> Result<Self> {
        let start = NaiveDate::from_ymd_opt(year, 1, 1)
            .and_then(|d| d.and_hms_opt(0, 0, 0))
            .ok_or_else(|| Error::Domain(format!("invalid year {year}")))?;
        let records = (0..HOURS_PER_YEAR as i64)
            .map(|h| WeatherRecord {
                timestamp: start + Duration::hours(h),
                t_ext,
                rh_ext,
                ghi: 0.0,
                dni: Some(0.0),
                dhi: Some(0.0),
            })
            .collect();
        Self::new(location, records)
    }

    pub fn location(&self) -> &Location {
        &self.location
    }

    pub fn records(&self) -> &[WeatherRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn missing_components(&self) -> usize {
        self.missing_components
    }

    pub fn has_components(&self) -> bool {
        self.missing_components == 0
    }

    pub fn night_clipped(&self) -> usize {
        self.night_clipped
    }

    pub fn start(&self) -> NaiveDateTime {
        self.records[0].timestamp
    }

    pub fn is_leap_year(&self) -> bool {
        self.records.len() == HOURS_PER_LEAP_YEAR
    }

    /// Seconds covered by the series (each record spans one hour).
    pub fn duration_s(&self) -> f64 {
        self.records.len() as f64 * 3600.0
    }

    pub fn instant(&self, t_s: f64) -> NaiveDateTime {
        self.start() + Duration::milliseconds((t_s * 1000.0).round() as i64)
    }

    /// Conditions `t_s` seconds after the first record. Temperature and
    /// humidity are interpolated linearly between hourly values (the last
    /// hour interpolates towards the first, treating the year as periodic);
    /// irradiance is held constant over each hour.
    pub fn sample(&self, t_s: f64) -> Result<WeatherSample> {
        if !(0.0..self.duration_s()).contains(&t_s) {
            return Err(Error::Range(format!(
                "t = {t_s} s outside weather series ({} h)",
                self.records.len()
            )));
        }
        let pos = t_s / 3600.0;
        let i = (pos.floor() as usize).min(self.records.len() - 1);
        let frac = pos - i as f64;
        let a = &self.records[i];
        let b = &self.records[(i + 1) % self.records.len()];
        Ok(WeatherSample {
            t_ext: a.t_ext + (b.t_ext - a.t_ext) * frac,
            rh_ext: a.rh_ext + (b.rh_ext - a.rh_ext) * frac,
            ghi: a.ghi,
            dni: a.dni,
            dhi: a.dhi,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeatherSample {
    pub t_ext: f64,
    pub rh_ext: f64,
    pub ghi: f64,
    pub dni: Option<f64>,
    pub dhi: Option<f64>,
}

pub fn parse_weather(path: &Path, location: Location) -> Result<WeatherSeries> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_weather_str(&text, location, &path.display().to_string())
}

/// Parse weather CSV text. Requires a full year (8760 or 8784 rows).
pub fn parse_weather_str(text: &str, location: Location, source_name: &str) -> Result<WeatherSeries> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        msg,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| parse_err(1, format!("unreadable header: {e}")))?
        .clone();
    if header.iter().ne(WEATHER_HEADER.iter().copied()) {
        return Err(parse_err(
            1,
            format!("expected header `{}`", WEATHER_HEADER.join(",")),
        ));
    }
    let mut records = Vec::with_capacity(HOURS_PER_LEAP_YEAR);
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        if row.len() != WEATHER_HEADER.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", WEATHER_HEADER.len(), row.len()),
            ));
        }
        let timestamp = parse_timestamp(&row[0]).ok_or_else(|| parse_err(line, format!("bad timestamp `{}`", &row[0])))?;
        let num = |i: usize| -> Result<f64> {
            row[i]
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("bad number `{}` in column {}", &row[i], WEATHER_HEADER[i])))
        };
        let opt = |i: usize| -> Result<Option<f64>> {
            if row[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        let rec = WeatherRecord {
            timestamp,
            t_ext: num(1)?,
            rh_ext: num(2)?,
            ghi: num(3)?,
            dni: opt(4)?,
            dhi: opt(5)?,
        };
        rec.validate().map_err(|e| match e {
            Error::Validation { field, msg } => Error::Validation {
                field,
                msg: format!("{msg} (line {line})"),
            },
            other => other,
        })?;
        if let Some(prev) = records.last() {
            let prev: &WeatherRecord = prev;
            if rec.timestamp - prev.timestamp != Duration::hours(1) {
                return Err(Error::Schema(format!(
                    "line {line}: timestamp {} does not follow {} by one hour",
                    rec.timestamp, prev.timestamp
                )));
            }
        }
        records.push(rec);
    }
    if records.len() != HOURS_PER_YEAR && records.len() != HOURS_PER_LEAP_YEAR {
        return Err(Error::Schema(format!(
            "expected {HOURS_PER_YEAR} or {HOURS_PER_LEAP_YEAR} hourly rows, found {}",
            records.len()
        )));
    }
    if records.len() == HOURS_PER_LEAP_YEAR {
        let start = records[0].timestamp;
        let leap = NaiveDate::from_ymd_opt(start.year(), 2, 29).is_some();
        if !leap || start.ordinal() != 1 || start.hour() != 0 {
            return Err(Error::Schema(
                "8784-row file must cover a leap year starting Jan 1 00:00".into(),
            ));
        }
    }
    WeatherSeries::new(location, records)
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    ["%Y-%m-%dT%H:%M", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%d %H:%M:%S"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolarPosition {
    /// degrees above the horizon (geometric, no refraction)
    pub altitude: f64,
    /// degrees clockwise from north, in [0, 360)
    pub azimuth: f64,
}

fn julian_day(utc: NaiveDateTime) -> f64 {
    let secs = utc.and_utc().timestamp() as f64 + utc.and_utc().timestamp_subsec_nanos() as f64 * 1e-9;
    secs / 86_400.0 + 2_440_587.5
}

/// Solar altitude/azimuth for a local standard time at `location`
/// (low-precision solar ephemeris: declination, equation of time, hour angle).
pub fn solar_position(location: &Location, local: NaiveDateTime) -> SolarPosition {
    let utc = local - Duration::milliseconds((location.utc_offset * 3_600_000.0).round() as i64);
    let jc = (julian_day(utc) - 2_451_545.0) / 36_525.0;

    let mean_long = (280.466_46 + jc * (36_000.769_83 + jc * 0.000_303_2)).rem_euclid(360.0);
    let mean_anom = 357.529_11 + jc * (35_999.050_29 - 0.000_153_7 * jc);
    let ecc = 0.016_708_634 - jc * (0.000_042_037 + 0.000_000_126_7 * jc);
    let m = mean_anom.to_radians();
    let centre = m.sin() * (1.914_602 - jc * (0.004_817 + 0.000_014 * jc))
        + (2.0 * m).sin() * (0.019_993 - 0.000_101 * jc)
        + (3.0 * m).sin() * 0.000_289;
    let true_long = mean_long + centre;
    let omega = (125.04 - 1934.136 * jc).to_radians();
    let app_long = true_long - 0.005_69 - 0.004_78 * omega.sin();
    let mean_obliq = 23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.000_59 - jc * 0.001_813))) / 60.0) / 60.0;
    let obliq = (mean_obliq + 0.002_56 * omega.cos()).to_radians();
    let decl = (obliq.sin() * app_long.to_radians().sin()).asin();

    let y = (obliq / 2.0).tan().powi(2);
    let l0 = mean_long.to_radians();
    let eot_min = 4.0
        * (y * (2.0 * l0).sin() - 2.0 * ecc * m.sin() + 4.0 * ecc * y * m.sin() * (2.0 * l0).cos()
            - 0.5 * y * y * (4.0 * l0).sin()
            - 1.25 * ecc * ecc * (2.0 * m).sin())
        .to_degrees();

    let minutes = local.num_seconds_from_midnight() as f64 / 60.0 + local.nanosecond() as f64 * 1e-9 / 60.0;
    let true_solar = (minutes + eot_min + 4.0 * location.longitude - 60.0 * location.utc_offset).rem_euclid(1440.0);
    let hour_angle = (true_solar / 4.0 - 180.0).to_radians();

    let lat = location.latitude.to_radians();
    let cos_zen = (lat.sin() * decl.sin() + lat.cos() * decl.cos() * hour_angle.cos()).clamp(-1.0, 1.0);
    let altitude = 90.0 - cos_zen.acos().to_degrees();
    let az_south = hour_angle
        .sin()
        .atan2(hour_angle.cos() * lat.sin() - decl.tan() * lat.cos());
    let azimuth = (az_south.to_degrees() + 180.0).rem_euclid(360.0);
    SolarPosition { altitude, azimuth }
}

fn sun_down_all_hour(location: &Location, start: NaiveDateTime) -> bool {
    [0, 30, 60].iter().all(|&m| {
        solar_position(location, start + Duration::minutes(m)).altitude < -NIGHT_TOLERANCE_DEG
    })
}

/// Incident shortwave per exterior surface, W m⁻².
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceIrradiance {
    pub north: f64,
    pub east: f64,
    pub south: f64,
    pub west: f64,
    pub roof: f64,
    /// always 0: the floor faces the ground
    pub floor: f64,
}

impl SurfaceIrradiance {
    pub fn walls(&self) -> [f64; 4] {
        [self.north, self.east, self.south, self.west]
    }
}

/// Beam + isotropic diffuse on the four walls and the roof. `orientation` is
/// the azimuth of the "north" wall's outward normal. Without beam/diffuse
/// components the global value is treated as all-diffuse.
pub fn irradiance_on_surfaces(sample: &WeatherSample, sun: SolarPosition, orientation: f64) -> SurfaceIrradiance {
    let (dni, dhi) = match (sample.dni, sample.dhi) {
        (Some(dni), Some(dhi)) => (dni, dhi),
        _ => (0.0, sample.ghi),
    };
    if sun.altitude <= 0.0 && dhi <= 0.0 {
        return SurfaceIrradiance::default();
    }
    let beam = if sun.altitude > 0.0 { dni } else { 0.0 };
    let alt = sun.altitude.to_radians();
    let wall = |normal_az: f64| {
        let cos_inc = alt.cos() * (sun.azimuth - normal_az).to_radians().cos();
        beam * cos_inc.max(0.0) + 0.5 * dhi
    };
    SurfaceIrradiance {
        north: wall(orientation),
        east: wall(orientation + 90.0),
        south: wall(orientation + 180.0),
        west: wall(orientation + 270.0),
        roof: beam * alt.sin().max(0.0) + dhi,
        floor: 0.0,
    }
}

pub fn surface_irradiance(series: &WeatherSeries, t_s: f64, orientation: f64) -> Result<SurfaceIrradiance> {
    let sample = series.sample(t_s)?;
    let sun = solar_position(series.location(), series.instant(t_s));
    Ok(irradiance_on_surfaces(&sample, sun, orientation))
}

/// Exterior conditions resolved at every integration step, shared read-only
/// across all scenarios for one location.
#[derive(Debug, Clone)]
pub struct ClimateTrace {
    pub location: Location,
    pub dt: f64,
    pub steps: Vec<ClimateStep>,
    /// seconds after local midnight of the first step
    pub start_time_of_day: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClimateStep {
    pub t_ext: f64,
    pub rh_ext: f64,
    /// humidity ratio of outdoor air, kg kg⁻¹
    pub w_ext: f64,
    pub surfaces: SurfaceIrradiance,
    /// effective sky temperature, °C
    pub t_sky: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkyModel {
    /// clear-sky depression of the sky temperature below ambient, K
    pub clear_sky_offset: f64,
    /// cloudiness used when a day has no irradiance components
    pub default_cloudiness: f64,
}

impl Default for SkyModel {
    fn default() -> Self {
        Self {
            clear_sky_offset: 15.0,
            default_cloudiness: 0.5,
        }
    }
}

impl ClimateTrace {
    /// Resolve `days` days of weather at step `dt`.
    pub fn build(series: &WeatherSeries, dt: f64, days: u32, orientation: f64, sky: &SkyModel) -> Result<Arc<Self>> {
        if !(dt > 0.0) || 3600.0 % dt != 0.0 {
            return Err(Error::Domain(format!("step {dt} s must divide one hour")));
        }
        let horizon = days as f64 * 86_400.0;
        if horizon > series.duration_s() {
            return Err(Error::Range(format!(
                "{days} days requested but weather covers {} h",
                series.len()
            )));
        }
        let cloudiness = daily_cloudiness(series, sky.default_cloudiness);
        let n = (horizon / dt).round() as usize;
        let mut steps = Vec::with_capacity(n);
        for k in 0..n {
            let t = k as f64 * dt;
            let sample = series.sample(t)?;
            let sun = solar_position(series.location(), series.instant(t));
            let day = (t / 86_400.0) as usize;
            let cloud = cloudiness[day.min(cloudiness.len() - 1)];
            steps.push(ClimateStep {
                t_ext: sample.t_ext,
                rh_ext: sample.rh_ext,
                w_ext: psychro::humidity_ratio(sample.t_ext, sample.rh_ext, P_ATM),
                surfaces: irradiance_on_surfaces(&sample, sun, orientation),
                t_sky: sample.t_ext - sky.clear_sky_offset * (1.0 - cloud),
            });
        }
        Ok(Arc::new(Self {
            location: series.location().clone(),
            dt,
            steps,
            start_time_of_day: series.start().num_seconds_from_midnight() as f64,
        }))
    }
}

/// Per-day diffuse fraction Σdhi/Σghi, a proxy for cloud cover in [0, 1].
fn daily_cloudiness(series: &WeatherSeries, default: f64) -> Vec<f64> {
    series
        .records()
        .chunks(24)
        .map(|day| {
            let ghi: f64 = day.iter().map(|r| r.ghi).sum();
            let dhi: Option<f64> = day.iter().map(|r| r.dhi).sum();
            match dhi {
                Some(dhi) if ghi > 0.0 && series.has_components() => (dhi / ghi).clamp(0.0, 1.0),
                _ => default,
            }
        })
        .collect()
}
