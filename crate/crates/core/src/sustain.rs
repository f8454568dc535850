//! Carbon footprint of farm-grown versus imported lettuce.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeValues {
    pub truck: f64,
    pub ship: f64,
    pub airplane: f64,
}

impl ModeValues {
    fn iter(&self) -> [(&'static str, f64); 3] {
        [("truck", self.truck), ("ship", self.ship), ("airplane", self.airplane)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupplyChain {
    pub export_country: String,
    /// km
    pub distance: f64,
    pub mode_shares: ModeValues,
    /// g CO₂ per ton-km
    pub emission_factors: ModeValues,
    /// ton CO₂ per GWh, numerically g per kWh
    pub grid_factor: f64,
}

const SHARE_TOL: f64 = 1e-6;

impl SupplyChain {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance >= 0.0 && self.distance.is_finite()) {
            return Err(Error::validation("distance", format!("{}", self.distance)));
        }
        for (mode, s) in self.mode_shares.iter() {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::validation("mode_shares", format!("{mode} share {s} outside [0, 1]")));
            }
        }
        let total: f64 = self.mode_shares.iter().iter().map(|m| m.1).sum();
        if (total - 1.0).abs() > SHARE_TOL {
            return Err(Error::Config(format!("mode shares sum to {total}, expected 1")));
        }
        for (mode, f) in self.emission_factors.iter() {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::validation("emission_factors", format!("{mode} factor {f} must be positive")));
            }
        }
        if !(self.grid_factor >= 0.0 && self.grid_factor.is_finite()) {
            return Err(Error::validation("grid_factor", format!("{}", self.grid_factor)));
        }
        Ok(())
    }
}

pub fn parse_supply_str(text: &str, source_name: &str) -> Result<SupplyChain> {
    let c: SupplyChain = toml::from_str(text).map_err(|e| Error::Config(format!("{source_name}: {e}")))?;
    c.validate()?;
    Ok(c)
}

/// All `<location>.toml` files in `dir`, keyed by lower-case stem.
pub fn load_supply_dir(dir: &Path) -> Result<BTreeMap<String, SupplyChain>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        out.insert(stem.to_lowercase(), parse_supply_str(&text, &path.display().to_string())?);
    }
    Ok(out)
}

/// Transport emissions of imported lettuce, g CO₂ per kg.
pub fn import_footprint(chain: &SupplyChain) -> Result<f64> {
    chain.validate()?;
    let per_ton_km: f64 = chain
        .mode_shares
        .iter()
        .iter()
        .zip(chain.emission_factors.iter())
        .map(|((_, s), (_, f))| s * f)
        .sum();
    Ok(chain.distance * per_ton_km / 1000.0)
}

/// Operational emissions of farm lettuce, g CO₂ per kg, from kWh_el per kg.
pub fn vf_footprint(electricity: f64, grid_factor: f64) -> f64 {
    electricity * grid_factor
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Savings {
    /// g CO₂ per kg
    pub abs: f64,
    pub rel: f64,
    /// efficiency gain the farm would need to reach parity
    pub breakeven_efficiency_gain: f64,
}

pub fn savings(vf: f64, import: f64) -> Result<Savings> {
    if !(import > 0.0) {
        return Err(Error::Domain(format!("import footprint {import} must be positive")));
    }
    let abs = import - vf;
    let breakeven_efficiency_gain = if vf > 0.0 { (1.0 - import / vf).max(0.0) } else { 0.0 };
    Ok(Savings {
        abs,
        rel: abs / import,
        breakeven_efficiency_gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chains() -> BTreeMap<String, SupplyChain> {
        load_supply_dir(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/supply")).unwrap()
    }

    #[test]
    fn table_substitutions() {
        let c = chains();
        assert!((import_footprint(&c["trondheim"]).unwrap() - 334.22).abs() < 1e-9);
        assert!((import_footprint(&c["shanghai"]).unwrap() - 48.228).abs() < 1e-9);
        assert!((import_footprint(&c["dubai"]).unwrap() - 1212.075).abs() < 1e-9);
        let mut z = c["dubai"].clone();
        z.distance = 0.0;
        assert_eq!(import_footprint(&z).unwrap(), 0.0);
    }

    #[test]
    fn farm_footprint() {
        assert_eq!(vf_footprint(5.0, 15.0), 75.0);
        assert_eq!(vf_footprint(7.0, 585.0), 4095.0);
        assert_eq!(vf_footprint(7.0, 0.0), 0.0);
    }

    #[test]
    fn savings_cases() {
        let s = savings(100.0, 100.0).unwrap();
        assert_eq!((s.abs, s.rel, s.breakeven_efficiency_gain), (0.0, 0.0, 0.0));
        let s = savings(4017.0, 48.2).unwrap();
        assert!((s.breakeven_efficiency_gain - 0.988).abs() < 1e-3);
        assert!(s.abs < 0.0);
        assert!(savings(1.0, 0.0).is_err());
    }

    #[test]
    fn shares_must_sum_to_one() {
        let mut c = chains()["shanghai"].clone();
        c.mode_shares.ship = 0.7;
        assert!(matches!(import_footprint(&c), Err(Error::Config(_))));
        assert!(parse_supply_str("distance = 1", "x").is_err());
    }
}
