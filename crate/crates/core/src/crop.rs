//! Lettuce growth: dry/fresh matter, leaf area, CO2 response,
//! evapotranspiration and the harvest/replant cycle.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psychro::{self, P_ATM};
use crate::table::Table2D;

/// Seconds per day; ET is evaluated as a daily-equivalent rate.
const DAY_S: f64 = 86_400.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KcStage {
    pub name: String,
    /// stage begins once LAI reaches this value
    pub lai_from: f64,
    pub kc: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    #[serde(alias = "t_in", alias = "co2")]
    x: Vec<f64>,
    ppfd: Vec<f64>,
    values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CropFile {
    k: f64,
    sla: f64,
    rf: f64,
    dmc: f64,
    plant_density: f64,
    harvest_fm: f64,
    seed_dm: f64,
    lue: GridFile,
    fco2: GridFile,
    kc_stage: Vec<KcStage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CropParams {
    pub k: f64,
    /// m² g⁻¹ dry matter
    pub sla: f64,
    pub rf: f64,
    pub dmc: f64,
    /// g dry matter per μmol intercepted photons over (t_in, ppfd)
    pub lue_table: Table2D,
    /// multiplier over (co2 ppm, ppfd)
    pub fco2_table: Table2D,
    pub kc_stages: Vec<KcStage>,
    /// plants m⁻²
    pub plant_density: f64,
    /// g fresh matter per plant
    pub harvest_fm: f64,
    /// g m⁻² dry matter at transplant
    pub seed_dm: f64,
}

impl CropParams {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Parse the TOML schema of `data/crop/lettuce_default.toml`. LUE values in
    /// the file are g mol⁻¹.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let f: CropFile = toml::from_str(text).map_err(|e| Error::Config(format!("crop parameters: {e}")))?;
        let lue = Table2D::new(f.lue.x, f.lue.ppfd, f.lue.values)?.map_values(|v| v * 1e-6);
        let fco2 = Table2D::new(f.fco2.x, f.fco2.ppfd, f.fco2.values)?;
        let p = Self {
            k: f.k,
            sla: f.sla,
            rf: f.rf,
            dmc: f.dmc,
            lue_table: lue,
            fco2_table: fco2,
            kc_stages: f.kc_stage,
            plant_density: f.plant_density,
            harvest_fm: f.harvest_fm,
            seed_dm: f.seed_dm,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, field: &str, v: f64| {
            if ok {
                Ok(())
            } else {
                Err(Error::validation(field, format!("{field} = {v}")))
            }
        };
        check(self.k > 0.0 && self.k <= 1.5, "k", self.k)?;
        check(self.sla > 0.0 && self.sla.is_finite(), "sla", self.sla)?;
        check((0.0..0.5).contains(&self.rf), "rf", self.rf)?;
        check(self.dmc > 0.0 && self.dmc <= 0.15, "dmc", self.dmc)?;
        check(self.plant_density > 0.0 && self.plant_density.is_finite(), "plant_density", self.plant_density)?;
        check(self.harvest_fm > 0.0 && self.harvest_fm.is_finite(), "harvest_fm", self.harvest_fm)?;
        check(
            self.seed_dm > 0.0 && self.seed_dm / self.dmc < self.harvest_threshold(),
            "seed_dm",
            self.seed_dm,
        )?;
        for t in [&self.lue_table, &self.fco2_table] {
            if t.values().iter().flatten().any(|&v| v <= 0.0) {
                return Err(Error::validation("table", "all table values must be > 0"));
            }
        }
        if !self.fco2_table.xs().contains(&1200.0) {
            return Err(Error::validation("fco2", "table must have a 1200 ppm anchor"));
        }
        for &ppfd in self.fco2_table.ys() {
            let f = self.fco2_table.eval(1200.0, ppfd);
            if (f - 1.0).abs() > 1e-9 {
                return Err(Error::validation("fco2", format!("f(1200, {ppfd}) = {f}, expected 1")));
            }
        }
        if self.kc_stages.is_empty() {
            return Err(Error::validation("kc_stage", "at least one stage required"));
        }
        if self.kc_stages[0].lai_from != 0.0 {
            return Err(Error::validation("kc_stage", "first stage must start at lai_from = 0"));
        }
        if self.kc_stages.windows(2).any(|w| w[1].lai_from <= w[0].lai_from) {
            return Err(Error::validation("kc_stage", "lai_from must be strictly increasing"));
        }
        if self.kc_stages.iter().any(|s| !(s.kc > 0.0 && s.kc.is_finite())) {
            return Err(Error::validation("kc_stage", "kc must be > 0"));
        }
        Ok(())
    }

    /// Fresh matter per m² that triggers harvest.
    pub fn harvest_threshold(&self) -> f64 {
        self.plant_density * self.harvest_fm
    }

    pub fn lai_of(&self, dm: f64) -> f64 {
        self.sla * (1.0 - self.rf) * dm
    }

    pub fn stage_of(&self, lai: f64) -> usize {
        self.kc_stages.iter().rposition(|s| lai >= s.lai_from).unwrap_or(0)
    }

    pub fn kc(&self, stage: usize) -> f64 {
        self.kc_stages[stage.min(self.kc_stages.len() - 1)].kc
    }

    pub fn interception(&self, lai: f64) -> f64 {
        1.0 - (-self.k * lai).exp()
    }

    pub fn seed_state(&self, cycle_index: u32) -> CropState {
        let lai = self.lai_of(self.seed_dm);
        CropState {
            dm: self.seed_dm,
            fm: self.seed_dm / self.dmc,
            lai,
            age: 0.0,
            cycle_index,
            stage: self.stage_of(lai),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CropState {
    /// g m⁻²
    pub dm: f64,
    /// g m⁻²
    pub fm: f64,
    pub lai: f64,
    /// days since transplant
    pub age: f64,
    /// completed cycles
    pub cycle_index: u32,
    pub stage: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthStep {
    pub state: CropState,
    /// g m⁻²
    pub ddm: f64,
    /// g m⁻²
    pub dfm: f64,
    /// a table lookup fell outside its anchors
    pub clamped: bool,
}

pub fn growth_step(
    state: &CropState,
    params: &CropParams,
    ppfd: f64,
    t_in: f64,
    co2: f64,
    dt: f64,
    lights_on: bool,
) -> Result<GrowthStep> {
    for (name, v) in [("ppfd", ppfd), ("t_in", t_in), ("co2", co2), ("dt", dt), ("dm", state.dm)] {
        if !v.is_finite() {
            return Err(Error::Numeric(format!("growth_step: {name} = {v}")));
        }
    }
    if dt <= 0.0 {
        return Err(Error::Domain(format!("growth_step: dt = {dt} s")));
    }
    if ppfd < 0.0 {
        return Err(Error::Domain(format!("growth_step: ppfd = {ppfd}")));
    }
    let mut next = *state;
    next.age += dt / DAY_S;
    let (mut ddm, mut clamped) = (0.0, false);
    if lights_on && ppfd > 0.0 {
        let lue = params.lue_table.lookup(t_in, ppfd);
        let f = params.fco2_table.lookup(co2, ppfd);
        clamped = lue.clamped || f.clamped;
        ddm = ppfd * params.interception(state.lai) * lue.value * f.value * dt;
    }
    let dfm = ddm / params.dmc;
    next.dm += ddm;
    next.fm += dfm;
    next.lai = params.lai_of(next.dm);
    next.stage = params.stage_of(next.lai);
    Ok(GrowthStep {
        state: next,
        ddm,
        dfm,
        clamped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harvest {
    pub harvested: bool,
    /// kg m⁻² fresh matter; 0 when not harvested
    pub yield_fm: f64,
    /// g m⁻² dry matter removed with the harvest
    pub yield_dm: f64,
    pub cycle_days: f64,
    /// state after the check (reset to the seed state on harvest)
    pub state: CropState,
}

pub fn check_harvest(state: &CropState, params: &CropParams) -> Harvest {
    if state.fm >= params.harvest_threshold() {
        Harvest {
            harvested: true,
            yield_fm: state.fm / 1000.0,
            yield_dm: state.dm,
            cycle_days: state.age,
            state: params.seed_state(state.cycle_index + 1),
        }
    } else {
        Harvest {
            harvested: false,
            yield_fm: 0.0,
            yield_dm: 0.0,
            cycle_days: state.age,
            state: *state,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtFlux {
    /// kg s⁻¹ per m² of crop
    pub flux: f64,
    /// a negative radiation input was clamped to 0
    pub rad_clamped: bool,
}

/// Crop evapotranspiration (Penman-Monteith form with the 1.05 crop
/// correction) for net radiation `rad_n` in MJ m⁻² day⁻¹ and air speed `u`.
pub fn et_flux(state: &CropState, params: &CropParams, t_in: f64, rh_in: f64, rad_n: f64, u: f64) -> Result<EtFlux> {
    for (name, v) in [("t_in", t_in), ("rh_in", rh_in), ("rad_n", rad_n), ("u", u)] {
        if !v.is_finite() {
            return Err(Error::Numeric(format!("et_flux: {name} = {v}")));
        }
    }
    if u <= 0.0 {
        return Err(Error::Domain(format!("et_flux: u = {u}")));
    }
    let rad_clamped = rad_n < 0.0;
    let rad = rad_n.max(0.0);
    let vpd = psychro::vpd(t_in, rh_in)?;
    let delta = psychro::saturation_slope(t_in);
    let gamma = psychro::psychrometric_constant(P_ATM);
    let mm_day = 1.05 * (0.408 * delta * rad + 900.0 * u * gamma * vpd / (t_in + 273.15))
        / (delta + gamma * (1.0 + 0.34 * u))
        * params.kc(state.stage);
    Ok(EtFlux {
        flux: mm_day / DAY_S,
        rad_clamped,
    })
}

/// g CO2 fixed for `ddm` g m⁻² of dry matter over `area` m².
pub fn co2_uptake(ddm: f64, area: f64) -> f64 {
    2.0 * ddm * area
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn default_params() -> CropParams {
        let text = include_str!("../../../data/crop/lettuce_default.toml");
        CropParams::from_toml_str(text).unwrap()
    }

    fn state_with_lai(p: &CropParams, lai: f64) -> CropState {
        let dm = lai / (p.sla * (1.0 - p.rf));
        CropState {
            dm,
            fm: dm / p.dmc,
            lai,
            age: 3.0,
            cycle_index: 0,
            stage: p.stage_of(lai),
        }
    }

    /// Days to harvest with a fixed 16 h photoperiod starting at transplant.
    fn cycle_days(p: &CropParams, ppfd: f64, t: f64, co2: f64) -> f64 {
        let dt = 600.0;
        let mut s = p.seed_state(0);
        let mut n = 0u64;
        loop {
            let hour = (n as f64 * dt / 3600.0) % 24.0;
            s = growth_step(&s, p, ppfd, t, co2, dt, hour < 16.0).unwrap().state;
            n += 1;
            let h = check_harvest(&s, p);
            if h.harvested {
                return h.cycle_days;
            }
        }
    }

    #[test]
    fn default_file_is_valid() {
        let p = default_params();
        assert_eq!(p.harvest_threshold(), 6250.0);
        assert_eq!(p.fco2_table.eval(1200.0, 250.0), 1.0);
    }

    #[test]
    fn dark_step_only_ages() {
        let p = default_params();
        let s = state_with_lai(&p, 2.0);
        let g = growth_step(&s, &p, 250.0, 24.0, 900.0, 600.0, false).unwrap();
        assert_eq!(g.ddm, 0.0);
        assert_eq!(g.dfm, 0.0);
        assert_eq!(g.state.dm, s.dm);
        assert!((g.state.age - s.age - 600.0 / 86400.0).abs() < 1e-15);
    }

    #[test]
    fn substitution_at_lai_two() {
        let p = default_params();
        let s = state_with_lai(&p, 2.0);
        let g = growth_step(&s, &p, 250.0, 24.0, 1200.0, 600.0, true).unwrap();
        let interception = 1.0 - (-1.6f64).exp();
        assert!((interception - 0.798).abs() < 1e-3);
        let expected = 250.0 * interception * 1.2668e-6 * 600.0;
        assert!((g.ddm - expected).abs() < 1e-12 * expected.max(1.0));
        assert!((g.dfm - expected / 0.045).abs() < 1e-9);
    }

    #[test]
    fn dense_canopy_limit() {
        let p = default_params();
        let s = state_with_lai(&p, 60.0);
        let g = growth_step(&s, &p, 400.0, 24.0, 900.0, 600.0, true).unwrap();
        let limit = 400.0 * p.lue_table.eval(24.0, 400.0) * p.fco2_table.eval(900.0, 400.0) * 600.0;
        assert!((g.ddm - limit).abs() / limit < 1e-12);
    }

    #[test]
    fn bad_inputs() {
        let p = default_params();
        let s = p.seed_state(0);
        assert!(matches!(growth_step(&s, &p, 100.0, 24.0, 900.0, 0.0, true), Err(Error::Domain(_))));
        assert!(matches!(growth_step(&s, &p, f64::NAN, 24.0, 900.0, 600.0, true), Err(Error::Numeric(_))));
    }

    #[test]
    fn harvest_threshold_boundary() {
        let p = default_params();
        let mut s = p.seed_state(2);
        s.fm = 6249.0;
        assert!(!check_harvest(&s, &p).harvested);
        s.fm = 6250.0;
        s.age = 20.5;
        let h = check_harvest(&s, &p);
        assert!(h.harvested);
        assert!((h.yield_fm - 6.25).abs() < 1e-12);
        assert_eq!(h.cycle_days, 20.5);
        assert_eq!(h.state.cycle_index, 3);
        assert_eq!(h.state.dm, p.seed_dm);
    }

    #[test]
    fn reference_cycle_length() {
        let p = default_params();
        let d = cycle_days(&p, 400.0, 24.0, 900.0);
        assert!((d - 19.0).abs() <= 2.0, "{d}");
    }

    #[test]
    fn co2_shortening_targets() {
        let p = default_params();
        for (ppfd, target) in [(100.0, 0.31), (400.0, 0.22)] {
            let a = cycle_days(&p, ppfd, 24.0, 400.0);
            let b = cycle_days(&p, ppfd, 24.0, 1400.0);
            let cut = 1.0 - b / a;
            assert!((cut - target).abs() <= 0.05, "ppfd {ppfd}: {cut}");
        }
    }

    #[test]
    fn cycle_monotone_and_diminishing() {
        let p = default_params();
        for t in [20.0, 24.0, 28.0] {
            for co2 in [400.0, 900.0, 1400.0] {
                let c: Vec<f64> = [100.0, 250.0, 400.0].iter().map(|&q| cycle_days(&p, q, t, co2)).collect();
                assert!(c[0] >= c[1] && c[1] >= c[2], "{t} {co2} {c:?}");
                assert!(c[0] - c[1] > c[1] - c[2], "{t} {co2} {c:?}");
            }
            for ppfd in [100.0, 250.0, 400.0] {
                assert!(cycle_days(&p, ppfd, t, 400.0) >= cycle_days(&p, ppfd, t, 900.0));
            }
        }
    }

    #[test]
    fn dry_fresh_consistency_at_harvest() {
        let p = default_params();
        let mut s = p.seed_state(0);
        loop {
            s = growth_step(&s, &p, 250.0, 24.0, 900.0, 600.0, true).unwrap().state;
            if s.fm >= p.harvest_threshold() {
                break;
            }
        }
        assert!((s.fm * p.dmc - s.dm).abs() / s.dm < 0.05);
    }

    /// Independent FAO-56 style evaluation with its own saturation curve.
    fn et_oracle(t: f64, rh: f64, rad: f64, u: f64, kc: f64) -> f64 {
        let es = 0.6108 * (17.27 * t / (t + 237.3)).exp();
        let delta = 4098.0 * es / (t + 237.3).powi(2);
        let gamma = 0.665e-3 * 101.325;
        let vpd = es * (1.0 - rh);
        let num = 0.408 * delta * rad + gamma * 900.0 / (t + 273.15) * u * vpd;
        1.05 * kc * num / (delta + gamma * (1.0 + 0.34 * u)) / 86400.0
    }

    #[test]
    fn et_matches_hand_computation() {
        let mut p = default_params();
        p.kc_stages = vec![KcStage { name: "unit".into(), lai_from: 0.0, kc: 1.0 }];
        let s = p.seed_state(0);
        let v = et_flux(&s, &p, 20.0, 0.75, 10.0, 0.4).unwrap().flux;
        let o = et_oracle(20.0, 0.75, 10.0, 0.4, 1.0);
        assert!((v - o).abs() / o < 0.01, "{v} vs {o}");
        // frozen value of the oracle: 3.03 mm per day
        assert!((o * 86400.0 - 3.0316).abs() < 2e-3, "{}", o * 86400.0);
    }

    #[test]
    fn et_zero_drivers_and_kc_linearity() {
        let mut p = default_params();
        let s = p.seed_state(0);
        assert_eq!(et_flux(&s, &p, 24.0, 1.0, 0.0, 0.4).unwrap().flux, 0.0);
        let a = et_flux(&s, &p, 24.0, 0.75, 2.0, 0.4).unwrap().flux;
        for st in &mut p.kc_stages {
            st.kc *= 2.0;
        }
        let b = et_flux(&s, &p, 24.0, 0.75, 2.0, 0.4).unwrap().flux;
        assert!((b - 2.0 * a).abs() < 1e-18);
        let c = et_flux(&s, &p, 24.0, 1.0, -3.0, 0.4).unwrap();
        assert!(c.rad_clamped);
        assert_eq!(c.flux, 0.0);
    }

    #[test]
    fn stages_follow_lai() {
        let p = default_params();
        assert_eq!(p.stage_of(0.0), 0);
        assert_eq!(p.stage_of(1.0), 1);
        assert_eq!(p.stage_of(2.9), 1);
        assert_eq!(p.stage_of(10.0), 2);
    }

    #[test]
    fn uptake_arithmetic() {
        assert_eq!(co2_uptake(0.0, 90.0), 0.0);
        assert_eq!(co2_uptake(5.0, 90.0), 900.0);
        assert_eq!(co2_uptake(2.0, 90.0) + co2_uptake(3.0, 90.0), co2_uptake(5.0, 90.0));
    }

    #[test]
    fn rejects_bad_files() {
        let good = include_str!("../../../data/crop/lettuce_default.toml");
        assert!(CropParams::from_toml_str(&good.replace("k = 0.8", "k = 2.0")).is_err());
        assert!(CropParams::from_toml_str(&good.replace("[1.0, 1.0, 1.0]", "[1.0, 0.9, 1.0]")).is_err());
        assert!(CropParams::from_toml_str("k = 1").is_err());
    }
}
