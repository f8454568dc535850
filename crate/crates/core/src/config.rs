//! Run configuration: data paths, scenario axes, sites and model overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chamber::{ChamberConfig, ChamberGeometry};
use crate::econ::RateMode;
use crate::error::{Error, Result};
use crate::weather::Location;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Site {
    Trondheim,
    Shanghai,
    Dubai,
}

impl Site {
    pub const ALL: [Site; 3] = [Site::Trondheim, Site::Shanghai, Site::Dubai];

    pub fn code(self) -> char {
        match self {
            Site::Trondheim => 'T',
            Site::Shanghai => 'S',
            Site::Dubai => 'D',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        Site::ALL.into_iter().find(|s| s.code() == c)
    }

    /// Key used for per-site data files.
    pub fn key(self) -> &'static str {
        match self {
            Site::Trondheim => "trondheim",
            Site::Shanghai => "shanghai",
            Site::Dubai => "dubai",
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Site {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Site::ALL
            .into_iter()
            .find(|site| site.key().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown site `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub weather_dir: PathBuf,
    pub crop: PathBuf,
    pub hvac: PathBuf,
    pub costs_dir: PathBuf,
    pub supply_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxes {
    pub locations: Vec<Site>,
    pub insulation: Vec<bool>,
    pub ppfd: Vec<u32>,
    pub t_in: Vec<u32>,
    pub co2: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    pub latitude: f64,
    pub longitude: f64,
    pub utc_offset: f64,
    #[serde(default)]
    pub altitude: f64,
    /// file name inside the weather directory
    pub weather: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EconSettings {
    pub rate_mode: RateMode,
    /// CO₂ level of the electricity break-even table, ppm
    pub breakeven_co2: u32,
    /// upper end of the electricity price search, $ kWh⁻¹
    pub c_el_max: f64,
    /// upper end of the insulation cost search, $ m⁻²
    pub c_ins_max: f64,
}

impl Default for EconSettings {
    fn default() -> Self {
        Self {
            rate_mode: RateMode::Fisher,
            breakeven_co2: 900,
            c_el_max: 2.0,
            c_ins_max: 500.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    pub grid: GridAxes,
    pub sites: BTreeMap<Site, SiteConfig>,
    #[serde(default)]
    pub chamber: ChamberConfig,
    #[serde(default)]
    pub geometry: ChamberGeometry,
    #[serde(default)]
    pub econ: EconSettings,
}

impl RunConfig {
    /// Parse and validate; relative paths are resolved against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut c: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for p in [
            &mut c.paths.weather_dir,
            &mut c.paths.crop,
            &mut c.paths.hvac,
            &mut c.paths.costs_dir,
            &mut c.paths.supply_dir,
        ] {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text, path.parent().unwrap_or(Path::new(".")))
            .map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
                e => e,
            })
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        let axes = [
            ("locations", g.locations.len()),
            ("insulation", g.insulation.len()),
            ("ppfd", g.ppfd.len()),
            ("t_in", g.t_in.len()),
            ("co2", g.co2.len()),
        ];
        for (name, len) in axes {
            if len == 0 {
                return Err(Error::Config(format!("grid axis `{name}` is empty")));
            }
        }
        for site in &g.locations {
            let s = self
                .sites
                .get(site)
                .ok_or_else(|| Error::Config(format!("grid uses site `{site}` without a [sites.{site}] section")))?;
            self.location(*site, s)?;
        }
        self.chamber.validate().map_err(|e| Error::Config(format!("[chamber] {e}")))?;
        self.geometry.validate().map_err(|e| Error::Config(format!("[geometry] {e}")))?;
        let e = &self.econ;
        if !(e.c_el_max > 0.0 && e.c_ins_max > 0.0) {
            return Err(Error::Config("[econ] search bounds must be positive".into()));
        }
        Ok(())
    }

    fn location(&self, site: Site, s: &SiteConfig) -> Result<Location> {
        Location::new(site.key(), s.latitude, s.longitude, s.utc_offset, s.altitude)
            .map_err(|e| Error::Config(format!("[sites.{site}] {e}")))
    }

    pub fn site(&self, site: Site) -> Result<(Location, PathBuf)> {
        let s = self
            .sites
            .get(&site)
            .ok_or_else(|| Error::Config(format!("no [sites.{site}] section")))?;
        Ok((self.location(site, s)?, self.paths.weather_dir.join(&s.weather)))
    }

    /// Files whose content determines the results, in a fixed order.
    pub fn data_files(&self) -> Result<Vec<PathBuf>> {
        let mut files = vec![self.paths.crop.clone(), self.paths.hvac.clone()];
        let hvac_dir = self.paths.hvac.parent().unwrap_or(Path::new("."));
        files.extend(sorted_dir(hvac_dir, "csv")?);
        files.extend(sorted_dir(&self.paths.costs_dir, "toml")?);
        files.extend(sorted_dir(&self.paths.supply_dir, "toml")?);
        for site in &self.grid.locations {
            files.push(self.site(*site)?.1);
        }
        Ok(files)
    }
}

fn sorted_dir(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some(ext))
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn default_config_path() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/default.toml")
    }

    #[test]
    fn default_config_loads() {
        let c = RunConfig::load(&default_config_path()).unwrap();
        assert_eq!(c.grid.locations, Site::ALL);
        assert!(c.paths.crop.exists());
        assert!(c.data_files().unwrap().iter().all(|p| p.exists()));
    }

    #[test]
    fn empty_axis_is_a_config_error() {
        let text = std::fs::read_to_string(default_config_path()).unwrap();
        let bad = text.replace("ppfd = [100, 250, 400]", "ppfd = []");
        assert_ne!(bad, text);
        assert!(matches!(RunConfig::from_toml_str(&bad, Path::new(".")), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = std::fs::read_to_string(default_config_path()).unwrap();
        let bad = format!("{text}\n[mystery]\nx = 1\n");
        assert!(RunConfig::from_toml_str(&bad, Path::new(".")).is_err());
    }

    #[test]
    fn site_codes() {
        for s in Site::ALL {
            assert_eq!(Site::from_code(s.code()), Some(s));
            assert_eq!(s.key().parse::<Site>().unwrap(), s);
        }
        assert!("oslo".parse::<Site>().is_err());
    }
}
