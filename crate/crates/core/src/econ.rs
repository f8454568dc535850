//! Capital and operating costs and the levelized cost of lettuce.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalCosts {
    /// $ W⁻¹
    pub c_light: f64,
    pub c_wir: f64,
    pub c_hvacd: f64,
    /// $ m⁻² of crop area
    pub c_vf: f64,
    /// $ m⁻² of envelope
    pub c_ins: f64,
    /// h kg⁻¹
    pub labor_rate: f64,
    /// years
    pub lifetime: u32,
    pub r_nom: f64,
    pub inflation: f64,
    pub led_replacement_years: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalCosts {
    /// $ kg⁻¹
    pub c_crop: f64,
    pub c_co2: f64,
    /// $ kWh⁻¹
    pub c_el: f64,
    /// $ m⁻³
    pub c_wat: f64,
    /// $ h⁻¹
    pub c_lab: f64,
    /// $ m⁻² yr⁻¹
    pub c_leas: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBook {
    pub global: GlobalCosts,
    /// keyed by lower-case location name
    pub locations: BTreeMap<String, LocalCosts>,
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(field, format!("{v} must be a non-negative number")))
    }
}

impl GlobalCosts {
    pub fn validate(&self) -> Result<()> {
        for (f, v) in [
            ("c_light", self.c_light),
            ("c_wir", self.c_wir),
            ("c_hvacd", self.c_hvacd),
            ("c_vf", self.c_vf),
            ("c_ins", self.c_ins),
            ("labor_rate", self.labor_rate),
            ("r_nom", self.r_nom),
            ("inflation", self.inflation),
        ] {
            non_negative(f, v)?;
        }
        if self.lifetime == 0 {
            return Err(Error::validation("lifetime", "must be at least one year"));
        }
        if let Some(&y) = self.led_replacement_years.iter().find(|&&y| y >= self.lifetime) {
            return Err(Error::validation(
                "led_replacement_years",
                format!("year {y} is not before the end of the {}-year lifetime", self.lifetime),
            ));
        }
        if self.inflation >= 1.0 || self.r_nom >= 1.0 {
            return Err(Error::validation("r_nom/inflation", "rates must be fractions below 1"));
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            c_light: self.c_light * k,
            c_wir: self.c_wir * k,
            c_hvacd: self.c_hvacd * k,
            c_vf: self.c_vf * k,
            c_ins: self.c_ins * k,
            ..self.clone()
        }
    }
}

impl LocalCosts {
    pub fn validate(&self) -> Result<()> {
        for (f, v) in [
            ("c_crop", self.c_crop),
            ("c_co2", self.c_co2),
            ("c_el", self.c_el),
            ("c_wat", self.c_wat),
            ("c_lab", self.c_lab),
            ("c_leas", self.c_leas),
        ] {
            non_negative(f, v)?;
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            c_crop: self.c_crop * k,
            c_co2: self.c_co2 * k,
            c_el: self.c_el * k,
            c_wat: self.c_wat * k,
            c_lab: self.c_lab * k,
            c_leas: self.c_leas * k,
        }
    }
}

pub fn parse_global_str(text: &str, source_name: &str) -> Result<GlobalCosts> {
    let g: GlobalCosts = toml::from_str(text).map_err(|e| Error::Config(format!("{source_name}: {e}")))?;
    g.validate()?;
    Ok(g)
}

pub fn parse_local_str(text: &str, source_name: &str) -> Result<LocalCosts> {
    let l: LocalCosts = toml::from_str(text).map_err(|e| Error::Config(format!("{source_name}: {e}")))?;
    l.validate()?;
    Ok(l)
}

impl CostBook {
    /// `global.toml` plus one `<location>.toml` per site in `dir`.
    pub fn load(dir: &Path) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let global_path = dir.join("global.toml");
        let global = parse_global_str(&read(&global_path)?, &global_path.display().to_string())?;
        let mut locations = BTreeMap::new();
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("toml") || path == global_path {
                continue;
            }
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else { continue };
            let local = parse_local_str(&read(&path)?, &path.display().to_string())?;
            locations.insert(stem.to_lowercase(), local);
        }
        Ok(Self { global, locations })
    }

    pub fn local(&self, location: &str) -> Result<&LocalCosts> {
        self.locations
            .get(&location.to_lowercase())
            .ok_or_else(|| Error::Config(format!("no cost data for location `{location}`")))
    }

    /// Every unit cost multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            global: self.global.scaled(k),
            locations: self.locations.iter().map(|(n, l)| (n.clone(), l.scaled(k))).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMode {
    /// (1 + r_nom)/(1 + i) − 1
    #[default]
    Fisher,
    /// (1 − r_nom)/(1 − i) − 1, kept for auditing the printed formula
    StrictPaper,
}

pub fn real_rate(r_nom: f64, inflation: f64, mode: RateMode) -> f64 {
    match mode {
        RateMode::Fisher => (1.0 + r_nom) / (1.0 + inflation) - 1.0,
        RateMode::StrictPaper => (1.0 - r_nom) / (1.0 - inflation) - 1.0,
    }
}

/// Capital recovery factor.
pub fn crf(r: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("capital recovery over zero years".into()));
    }
    if !(r > -1.0) {
        return Err(Error::Domain(format!("discount rate {r} must exceed -1")));
    }
    if r.abs() < 1e-12 {
        return Ok(1.0 / n as f64);
    }
    let g = (1.0 + r).powi(n as i32);
    Ok(r * g / (g - 1.0))
}

/// Present value of the LED replacements, $.
pub fn replacement_cost(global: &GlobalCosts, p_light: f64, r: f64) -> f64 {
    global
        .led_replacement_years
        .iter()
        .map(|&y| global.c_light * p_light / (1.0 + r).powi(y as i32))
        .sum()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Capex {
    pub lighting: f64,
    pub wiring: f64,
    pub hvacd: f64,
    pub chamber: f64,
    pub insulation: f64,
    pub total: f64,
}

/// Powers in W, areas in m².
pub fn capex(global: &GlobalCosts, p_light: f64, p_hvacd: f64, crop_area: f64, env_area: f64, insulated: bool) -> Result<Capex> {
    for (f, v) in [("p_light", p_light), ("p_hvacd", p_hvacd), ("crop_area", crop_area), ("env_area", env_area)] {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("{f} = {v} must be non-negative")));
        }
    }
    let mut c = Capex {
        lighting: global.c_light * p_light,
        wiring: global.c_wir * (p_light + p_hvacd),
        hvacd: global.c_hvacd * p_hvacd,
        chamber: global.c_vf * crop_area,
        insulation: if insulated { global.c_ins * env_area } else { 0.0 },
        total: 0.0,
    };
    c.total = c.lighting + c.wiring + c.hvacd + c.chamber + c.insulation;
    Ok(c)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OpexInputs {
    pub yield_kg: f64,
    /// kWh electric
    pub electricity: f64,
    /// m³ of net water
    pub water: f64,
    /// kg
    pub co2: f64,
    /// m² of leased floor
    pub footprint: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Opex {
    pub crop: f64,
    pub electricity: f64,
    pub water: f64,
    pub co2: f64,
    pub labor: f64,
    pub leasing: f64,
    pub total: f64,
    pub labor_hours: f64,
}

pub fn opex(global: &GlobalCosts, local: &LocalCosts, inputs: &OpexInputs) -> Opex {
    let labor_hours = global.labor_rate * inputs.yield_kg;
    let mut o = Opex {
        crop: inputs.yield_kg * local.c_crop,
        electricity: inputs.electricity * local.c_el,
        water: inputs.water.max(0.0) * local.c_wat,
        co2: inputs.co2 * local.c_co2,
        labor: labor_hours * local.c_lab,
        leasing: inputs.footprint * local.c_leas,
        total: 0.0,
        labor_hours,
    };
    o.total = o.crop + o.electricity + o.water + o.co2 + o.labor + o.leasing;
    o
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EconResult {
    pub capex: Capex,
    pub opex: Opex,
    pub c_rep: f64,
    pub r_real: f64,
    pub crf: f64,
    /// $ yr⁻¹
    pub annual_cost: f64,
    /// $ kg⁻¹
    pub lcol: f64,
}

pub fn lcol(global: &GlobalCosts, capex: Capex, opex: Opex, p_light: f64, yield_kg: f64, mode: RateMode) -> Result<EconResult> {
    if !(yield_kg > 0.0) {
        return Err(Error::Domain(format!("levelized cost needs a positive yield, got {yield_kg} kg")));
    }
    let r_real = real_rate(global.r_nom, global.inflation, mode);
    let crf = crf(r_real, global.lifetime)?;
    let c_rep = replacement_cost(global, p_light, r_real);
    let annual_cost = (capex.total + c_rep) * crf + opex.total;
    Ok(EconResult {
        capex,
        opex,
        c_rep,
        r_real,
        crf,
        annual_cost,
        lcol: annual_cost / yield_kg,
    })
}

/// Everything a scenario contributes to its cost evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EconInputs {
    /// W
    pub p_light: f64,
    pub p_hvacd: f64,
    /// m²
    pub crop_area: f64,
    pub env_area: f64,
    pub insulated: bool,
    pub opex: OpexInputs,
}

pub fn evaluate(global: &GlobalCosts, local: &LocalCosts, inputs: &EconInputs, mode: RateMode) -> Result<EconResult> {
    let cap = capex(global, inputs.p_light, inputs.p_hvacd, inputs.crop_area, inputs.env_area, inputs.insulated)?;
    let op = opex(global, local, &inputs.opex);
    lcol(global, cap, op, inputs.p_light, inputs.opex.yield_kg, mode)
}

/// Root of `f` on `[lo, hi]` by bisection to an interval width of `tol`.
pub fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<Option<f64>> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(Some(lo));
    }
    if f_hi == 0.0 {
        return Ok(Some(hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(Some(mid));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

pub const BREAKEVEN_TOL: f64 = 1e-4;

/// Electricity price at which scenarios `a` and `b` reach the same LCoL,
/// searched on `[0, c_el_max]` $ kWh⁻¹.
pub fn breakeven_electricity(
    global: &GlobalCosts,
    local: &LocalCosts,
    a: &EconInputs,
    b: &EconInputs,
    mode: RateMode,
    c_el_max: f64,
) -> Result<Option<f64>> {
    bisect(
        |c_el| {
            let l = LocalCosts { c_el, ..local.clone() };
            Ok(evaluate(global, &l, a, mode)?.lcol - evaluate(global, &l, b, mode)?.lcol)
        },
        0.0,
        c_el_max,
        BREAKEVEN_TOL,
    )
}

/// Insulation unit cost at which the insulated and bare variants tie,
/// searched on `[0, c_ins_max]` $ m⁻².
pub fn breakeven_insulation(
    global: &GlobalCosts,
    local: &LocalCosts,
    insulated: &EconInputs,
    bare: &EconInputs,
    mode: RateMode,
    c_ins_max: f64,
) -> Result<Option<f64>> {
    bisect(
        |c_ins| {
            let g = GlobalCosts { c_ins, ..global.clone() };
            Ok(evaluate(&g, local, insulated, mode)?.lcol - evaluate(&g, local, bare, mode)?.lcol)
        },
        0.0,
        c_ins_max,
        BREAKEVEN_TOL,
    )
}
