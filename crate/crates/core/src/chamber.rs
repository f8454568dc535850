//! Growing-chamber balances under ideal setpoint control: sensible heat,
//! water vapour and CO2, integrated over a year.

use serde::{Deserialize, Serialize};

use crate::crop::{self, CropParams, CropState};
use crate::error::{Error, Result};
use crate::psychro::{self, P_ATM};
use crate::weather::{ClimateStep, ClimateTrace, SkyModel, SurfaceIrradiance};

pub const STEFAN_BOLTZMANN: f64 = 5.670_374e-8;
const KELVIN: f64 = 273.15;
/// μmol of PAR photons per joule of PAR energy (broadband conversion)
const PAR_UMOL_PER_J: f64 = 4.57;
const M_CO2_OVER_M_AIR: f64 = 44.01 / 28.965;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChamberGeometry {
    /// m
    pub side: f64,
    /// m
    pub height: f64,
    /// m², all tiers
    pub crop_area: f64,
    pub tiers: u32,
    /// W m⁻² K⁻¹
    pub u_insulated: f64,
    /// W m⁻² K⁻¹
    pub u_bare: f64,
    /// shortwave absorptance of the outer skin
    pub alpha: f64,
    /// longwave emissivity of the outer skin
    pub epsilon: f64,
    /// outside convective film coefficient, W m⁻² K⁻¹
    pub h_out: f64,
    /// azimuth of the "north" wall normal, degrees
    pub orientation: f64,
}

impl Default for ChamberGeometry {
    fn default() -> Self {
        Self {
            side: 7.0,
            height: 3.0,
            crop_area: 90.0,
            tiers: 3,
            u_insulated: 0.193,
            u_bare: 3.0,
            alpha: 0.4,
            epsilon: 0.85,
            h_out: 20.0,
            orientation: 0.0,
        }
    }
}

impl ChamberGeometry {
    pub fn footprint(&self) -> f64 {
        self.side * self.side
    }

    pub fn wall_area(&self) -> f64 {
        self.side * self.height
    }

    /// Four walls, roof and floor.
    pub fn envelope_area(&self) -> f64 {
        4.0 * self.wall_area() + 2.0 * self.footprint()
    }

    pub fn volume(&self) -> f64 {
        self.footprint() * self.height
    }

    pub fn u_value(&self, insulated: bool) -> f64 {
        if insulated {
            self.u_insulated
        } else {
            self.u_bare
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("side", self.side),
            ("height", self.height),
            ("crop_area", self.crop_area),
            ("u_insulated", self.u_insulated),
            ("u_bare", self.u_bare),
            ("h_out", self.h_out),
        ];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(name, format!("{name} = {v} must be positive")));
            }
        }
        if self.crop_area > self.tiers as f64 * self.footprint() {
            return Err(Error::validation("crop_area", "exceeds tiers × footprint"));
        }
        if self.u_insulated >= self.u_bare {
            return Err(Error::validation("u_insulated", "must be below u_bare"));
        }
        if self.u_bare >= self.h_out {
            return Err(Error::validation("u_bare", "must be below the outside film coefficient"));
        }
        for (name, v) in [("alpha", self.alpha), ("epsilon", self.epsilon)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::validation(name, format!("{name} = {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setpoints {
    /// °C
    pub t_in: f64,
    /// μmol m⁻² s⁻¹ at canopy
    pub ppfd: f64,
    /// ppm
    pub co2: f64,
    pub rh_light: f64,
    pub rh_dark: f64,
    /// hours per day
    pub photoperiod: f64,
    /// local clock hour
    pub lights_on_at: f64,
}

impl Setpoints {
    pub fn new(t_in: f64, ppfd: f64, co2: f64) -> Self {
        Self {
            t_in,
            ppfd,
            co2,
            rh_light: 0.75,
            rh_dark: 0.85,
            photoperiod: 16.0,
            lights_on_at: 4.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        psychro::saturation_pressure(self.t_in).map_err(|_| Error::validation("t_in", format!("{}", self.t_in)))?;
        if !(self.ppfd >= 0.0 && self.ppfd.is_finite()) {
            return Err(Error::validation("ppfd", format!("{}", self.ppfd)));
        }
        if !(self.co2 >= 0.0 && self.co2.is_finite()) {
            return Err(Error::validation("co2", format!("{}", self.co2)));
        }
        if !(0.0..=1.0).contains(&self.rh_light) || !(0.0..=1.0).contains(&self.rh_dark) {
            return Err(Error::validation("rh", "setpoints must lie in [0, 1]"));
        }
        if self.rh_dark <= self.rh_light {
            return Err(Error::validation("rh_dark", "must exceed rh_light"));
        }
        if !(0.0..=24.0).contains(&self.photoperiod) {
            return Err(Error::validation("photoperiod", format!("{}", self.photoperiod)));
        }
        if !(0.0..24.0).contains(&self.lights_on_at) {
            return Err(Error::validation("lights_on_at", format!("{}", self.lights_on_at)));
        }
        Ok(())
    }

    /// True when the lights are on at `seconds` after local midnight.
    pub fn lights_on(&self, seconds: f64) -> bool {
        let since_on = (seconds - self.lights_on_at * 3600.0).rem_euclid(86_400.0);
        self.ppfd > 0.0 && since_on < self.photoperiod * 3600.0
    }
}

/// Physical constants and plant-level assumptions of the chamber model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChamberConfig {
    /// J kg⁻¹ K⁻¹
    pub cp_air: f64,
    /// kg m⁻³
    pub rho_air: f64,
    /// air changes per hour with outdoor air
    pub ach: f64,
    /// cooling-coil apparatus dew point, °C
    pub adp: f64,
    /// ppm
    pub co2_ambient: f64,
    /// LED photon efficacy, μmol J⁻¹
    pub photon_efficacy: f64,
    /// fraction of emitted photons reaching the canopy
    pub eta_led: f64,
    /// air speed over the canopy, m s⁻¹
    pub air_speed: f64,
    /// molar mass of glucose, g mol⁻¹
    pub mw_glucose: f64,
    /// photosynthetic energy, J mol⁻¹
    pub de_photo: f64,
    /// include longwave exchange with sky and ground
    pub longwave: bool,
    pub sky: SkyModel,
    /// integration step, s
    pub dt: f64,
    pub days: u32,
    pub setpoints: SetpointDefaults,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SetpointDefaults {
    pub rh_light: f64,
    pub rh_dark: f64,
    pub photoperiod: f64,
    pub lights_on_at: f64,
}

impl Default for SetpointDefaults {
    fn default() -> Self {
        let s = Setpoints::new(0.0, 0.0, 0.0);
        Self {
            rh_light: s.rh_light,
            rh_dark: s.rh_dark,
            photoperiod: s.photoperiod,
            lights_on_at: s.lights_on_at,
        }
    }
}

impl Default for ChamberConfig {
    fn default() -> Self {
        Self {
            cp_air: 1006.0,
            rho_air: 1.2,
            ach: 0.5,
            adp: 10.0,
            co2_ambient: 400.0,
            photon_efficacy: 3.0,
            eta_led: 0.85,
            air_speed: 0.4,
            mw_glucose: 180.0,
            de_photo: 2807e3,
            longwave: true,
            sky: SkyModel::default(),
            dt: 600.0,
            days: 365,
            setpoints: SetpointDefaults::default(),
        }
    }
}

impl ChamberConfig {
    pub fn setpoints(&self, t_in: f64, ppfd: f64, co2: f64) -> Setpoints {
        Setpoints {
            t_in,
            ppfd,
            co2,
            rh_light: self.setpoints.rh_light,
            rh_dark: self.setpoints.rh_dark,
            photoperiod: self.setpoints.photoperiod,
            lights_on_at: self.setpoints.lights_on_at,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("cp_air", self.cp_air),
            ("rho_air", self.rho_air),
            ("photon_efficacy", self.photon_efficacy),
            ("air_speed", self.air_speed),
            ("mw_glucose", self.mw_glucose),
            ("dt", self.dt),
        ];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(name, format!("{name} = {v} must be positive")));
            }
        }
        if !(self.ach >= 0.0 && self.ach.is_finite()) {
            return Err(Error::validation("ach", format!("{}", self.ach)));
        }
        if !(0.0..=1.0).contains(&self.eta_led) {
            return Err(Error::validation("eta_led", format!("{}", self.eta_led)));
        }
        if self.dt > 600.0 || 3600.0 % self.dt != 0.0 {
            return Err(Error::validation("dt", "must divide one hour and be at most 600 s"));
        }
        if self.days == 0 || self.days > 365 {
            return Err(Error::validation("days", format!("{}", self.days)));
        }
        if !(self.co2_ambient >= 0.0) || self.de_photo < 0.0 {
            return Err(Error::validation("co2_ambient", "must be non-negative"));
        }
        psychro::saturation_pressure(self.adp).map_err(|_| Error::validation("adp", format!("{}", self.adp)))?;
        self.setpoints(20.0, 1.0, 400.0).validate()
    }

    /// Outdoor-air mass flow, kg s⁻¹.
    pub fn vent_mass_flow(&self, geometry: &ChamberGeometry) -> f64 {
        self.rho_air * geometry.volume() * self.ach / 3600.0
    }

    /// CO2 density in g m⁻³ for a volume fraction in ppm.
    pub fn co2_density(&self, ppm: f64) -> f64 {
        ppm * 1e-6 * M_CO2_OVER_M_AIR * self.rho_air * 1000.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightingPower {
    /// W electric
    pub p_electric: f64,
    /// W of heat released into the room
    pub q_into_room: f64,
}

/// Lighting electricity and room heat; `q_plant` is the power stored as
/// biomass over the same interval.
pub fn lighting_power(setpoints: &Setpoints, geometry: &ChamberGeometry, cfg: &ChamberConfig, lights_on: bool, q_plant: f64) -> LightingPower {
    if !lights_on || setpoints.ppfd <= 0.0 {
        return LightingPower {
            p_electric: 0.0,
            q_into_room: 0.0,
        };
    }
    let p_electric = setpoints.ppfd * geometry.crop_area / cfg.photon_efficacy;
    LightingPower {
        p_electric,
        q_into_room: p_electric - q_plant.clamp(0.0, p_electric),
    }
}

/// Net radiation at the canopy in MJ m⁻² day⁻¹ (daily-equivalent rate).
pub fn canopy_net_radiation(ppfd: f64, cfg: &ChamberConfig, interception: f64, lights_on: bool) -> f64 {
    if !lights_on {
        return 0.0;
    }
    cfg.eta_led * ppfd / PAR_UMOL_PER_J * interception * 86_400.0 / 1e6
}

#[derive(Debug, Clone, Copy)]
struct Surface {
    area: f64,
    irradiance: f64,
    sky_view: f64,
}

/// Steady outer-surface temperature of one opaque element, °C.
fn surface_temperature(
    s: &Surface,
    geometry: &ChamberGeometry,
    k_in: f64,
    t_in: f64,
    t_ext: f64,
    t_sky: f64,
    longwave: bool,
) -> f64 {
    let h = geometry.h_out;
    let a = geometry.alpha * s.irradiance;
    let mut ts = (a + h * t_ext + k_in * t_in) / (h + k_in);
    if !longwave {
        return ts;
    }
    let es = geometry.epsilon * STEFAN_BOLTZMANN;
    let sky4 = (t_sky + KELVIN).powi(4);
    let ext4 = (t_ext + KELVIN).powi(4);
    for _ in 0..30 {
        let tk = ts + KELVIN;
        let tk4 = tk.powi(4);
        let f = a + h * (t_ext - ts) - es * (s.sky_view * (tk4 - sky4) + (1.0 - s.sky_view) * (tk4 - ext4)) + k_in * (t_in - ts);
        let df = -h - k_in - 4.0 * es * tk.powi(3);
        let step = f / df;
        ts -= step;
        if step.abs() < 1e-10 {
            break;
        }
    }
    ts
}

/// Heat flow through the envelope, W; positive is a loss from the room.
/// Walls see half sky and half ground (at ambient temperature), the roof
/// sees full sky, and the floor only conducts to ambient.
pub fn envelope_flux(
    geometry: &ChamberGeometry,
    insulated: bool,
    t_in: f64,
    t_ext: f64,
    t_sky: f64,
    irr: &SurfaceIrradiance,
    longwave: bool,
) -> f64 {
    let u = geometry.u_value(insulated);
    let k_in = 1.0 / (1.0 / u - 1.0 / geometry.h_out);
    let wall = geometry.wall_area();
    let mut surfaces = [Surface { area: wall, irradiance: 0.0, sky_view: 0.5 }; 5];
    for (s, &i) in surfaces.iter_mut().zip(irr.walls().iter()) {
        s.irradiance = i;
    }
    surfaces[4] = Surface {
        area: geometry.footprint(),
        irradiance: irr.roof,
        sky_view: 1.0,
    };
    let mut q = u * geometry.footprint() * (t_in - t_ext);
    for s in &surfaces {
        let ts = surface_temperature(s, geometry, k_in, t_in, t_ext, t_sky, longwave);
        q += k_in * s.area * (t_in - ts);
    }
    q
}

/// Instantaneous chamber state. With ideal control the air is always at
/// setpoint; only the humidity ratio target moves between light and dark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChamberState {
    /// °C
    pub t_in: f64,
    /// kg kg⁻¹
    pub w: f64,
    /// ppm
    pub co2: f64,
    pub crop: CropState,
}

impl ChamberState {
    pub fn initial(setpoints: &Setpoints, params: &CropParams, lights_on: bool) -> Self {
        let rh = if lights_on { setpoints.rh_light } else { setpoints.rh_dark };
        Self {
            t_in: setpoints.t_in,
            w: psychro::humidity_ratio(setpoints.t_in, rh, P_ATM),
            co2: setpoints.co2,
            crop: params.seed_state(0),
        }
    }
}

/// Loads over one step, as mean rates. Thermal terms in W, water in kg s⁻¹,
/// CO2 in g s⁻¹.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepLoads {
    pub q_heat: f64,
    /// cooling-coil load, sensible plus latent
    pub q_cool: f64,
    pub q_cool_latent: f64,
    /// AHU dehumidification coil load, sensible plus latent
    pub q_dehum: f64,
    pub q_dehum_latent: f64,
    pub q_postheat: f64,
    /// envelope loss
    pub q_env: f64,
    /// ventilation sensible loss
    pub q_vent: f64,
    /// lighting heat released into the room
    pub q_light: f64,
    pub p_light: f64,
    pub q_plant: f64,
    pub q_eva: f64,
    pub q_hum: f64,
    pub m_et: f64,
    pub m_hum: f64,
    pub m_cond: f64,
    pub m_vent_in: f64,
    pub m_vent_out: f64,
    /// vapour added to room air storage
    pub m_store: f64,
    pub co2_injected: f64,
    pub co2_uptake: f64,
    pub co2_vented: f64,
    /// uptake plus ventilation loss that could not be met because injection
    /// cannot be negative
    pub co2_unheld: f64,
    pub ddm: f64,
    pub lights_on: bool,
    pub lue_clamped: bool,
    pub rad_clamped: bool,
}

impl StepLoads {
    /// Sensible balance residual, W; zero under ideal control.
    pub fn sensible_residual(&self) -> f64 {
        self.q_heat - (self.q_cool - self.q_cool_latent) + self.q_light
            - self.q_env
            - self.q_vent
            - self.q_eva
            - self.q_hum
            - (self.q_dehum - self.q_dehum_latent - self.q_postheat)
    }

    pub fn largest_term(&self) -> f64 {
        [
            self.q_heat,
            self.q_cool,
            self.q_dehum,
            self.q_postheat,
            self.q_env.abs(),
            self.q_vent.abs(),
            self.q_light,
            self.q_eva,
            self.q_hum,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Vapour balance residual, kg s⁻¹.
    pub fn water_residual(&self) -> f64 {
        self.m_et + self.m_hum + self.m_vent_in - self.m_vent_out - self.m_cond - self.m_store
    }
}

/// Everything one chamber simulation needs besides the weather.
#[derive(Debug, Clone)]
pub struct ChamberModel {
    pub geometry: ChamberGeometry,
    pub config: ChamberConfig,
    pub crop: CropParams,
}

/// Splits the sensible surplus `s` (W) and vapour surplus `m` (kg s⁻¹)
/// between heating, the cooling coil, spray humidification and the AHU.
fn solve_control(loads: &mut StepLoads, s: f64, m: f64, t_in: f64, w_target: f64, cfg: &ChamberConfig) -> Result<()> {
    let lambda = psychro::latent_heat(t_in);
    let dh_s = cfg.cp_air * (t_in - cfg.adp);
    let dw_c = (w_target - psychro::saturation_humidity_ratio(cfg.adp, P_ATM)).max(0.0);
    let dh_l = lambda * dw_c;
    let ahu = |excess: f64, loads: &mut StepLoads| -> Result<()> {
        if excess <= 0.0 {
            return Ok(());
        }
        if dw_c <= 0.0 {
            return Err(Error::Numeric(format!(
                "room humidity ratio {w_target:.5} at or below coil saturation; cannot remove {excess:.3e} kg/s"
            )));
        }
        let flow = excess / dw_c;
        loads.q_dehum = flow * (dh_s + dh_l);
        loads.q_dehum_latent = flow * dh_l;
        loads.q_postheat = flow * dh_s;
        loads.m_cond += excess;
        Ok(())
    };

    if s > 0.0 {
        if dh_s <= 0.0 {
            return Err(Error::Numeric(format!(
                "setpoint {t_in} °C not above coil apparatus dew point {} °C",
                cfg.adp
            )));
        }
        let flow = s / dh_s;
        if flow * dw_c >= m {
            // the coil alone would over-dry: spray back the difference
            let flow = (s + lambda * m) / (dh_s + dh_l);
            if flow > 0.0 {
                let cond = flow * dw_c;
                loads.q_cool = flow * (dh_s + dh_l);
                loads.q_cool_latent = flow * dh_l;
                loads.m_cond = cond;
                loads.m_hum = cond - m;
            } else {
                loads.m_hum = -m;
                loads.q_heat = lambda * loads.m_hum - s;
            }
            loads.q_hum = lambda * loads.m_hum;
        } else {
            let cond = flow * dw_c;
            loads.q_cool = flow * (dh_s + dh_l);
            loads.q_cool_latent = flow * dh_l;
            loads.m_cond = cond;
            ahu(m - cond, loads)?;
        }
    } else {
        loads.q_heat = -s;
        if m >= 0.0 {
            ahu(m, loads)?;
        } else {
            loads.m_hum = -m;
            loads.q_hum = lambda * loads.m_hum;
            loads.q_heat += loads.q_hum;
        }
    }
    Ok(())
}

/// Advance the chamber by `dt` seconds under ideal control.
#[allow(clippy::too_many_arguments)]
pub fn step(
    state: &ChamberState,
    climate: &ClimateStep,
    time_of_day: f64,
    setpoints: &Setpoints,
    insulated: bool,
    model: &ChamberModel,
    dt: f64,
) -> Result<(ChamberState, StepLoads)> {
    let geometry = &model.geometry;
    let cfg = &model.config;
    let params = &model.crop;
    if !(dt > 0.0 && dt <= 600.0) {
        return Err(Error::Domain(format!("step: dt = {dt} s must lie in (0, 600]")));
    }
    let lights_on = setpoints.lights_on(time_of_day);
    let t_in = setpoints.t_in;
    let rh = if lights_on { setpoints.rh_light } else { setpoints.rh_dark };
    let w_target = psychro::humidity_ratio(t_in, rh, P_ATM);
    let lambda = psychro::latent_heat(t_in);
    let mut loads = StepLoads {
        lights_on,
        ..Default::default()
    };

    let grown = crop::growth_step(&state.crop, params, setpoints.ppfd, t_in, setpoints.co2, dt, lights_on)?;
    loads.ddm = grown.ddm;
    loads.lue_clamped = grown.clamped;
    loads.q_plant = grown.ddm * geometry.crop_area / cfg.mw_glucose * cfg.de_photo / dt;
    let light = lighting_power(setpoints, geometry, cfg, lights_on, loads.q_plant);
    loads.p_light = light.p_electric;
    loads.q_light = light.q_into_room;
    loads.q_plant = light.p_electric - light.q_into_room;

    let rad_n = canopy_net_radiation(setpoints.ppfd, cfg, params.interception(state.crop.lai), lights_on);
    let et = crop::et_flux(&state.crop, params, t_in, rh, rad_n, cfg.air_speed)?;
    loads.rad_clamped = et.rad_clamped;
    loads.m_et = et.flux * geometry.crop_area;
    loads.q_eva = lambda * loads.m_et;

    loads.q_env = envelope_flux(geometry, insulated, t_in, climate.t_ext, climate.t_sky, &climate.surfaces, cfg.longwave);
    let m_air = cfg.vent_mass_flow(geometry);
    loads.q_vent = m_air * cfg.cp_air * (t_in - climate.t_ext);
    loads.m_vent_in = m_air * climate.w_ext;
    loads.m_vent_out = m_air * w_target;
    loads.m_store = cfg.rho_air * geometry.volume() * (w_target - state.w) / dt;

    let s = loads.q_light - loads.q_eva - loads.q_env - loads.q_vent;
    let m = loads.m_et + loads.m_vent_in - loads.m_vent_out - loads.m_store;
    solve_control(&mut loads, s, m, t_in, w_target, cfg)?;

    // CO2: hold the setpoint against uptake and exchange with outdoor air
    let vol_flow = m_air / cfg.rho_air;
    loads.co2_uptake = crop::co2_uptake(grown.ddm, geometry.crop_area) / dt;
    loads.co2_vented = vol_flow * (cfg.co2_density(setpoints.co2) - cfg.co2_density(cfg.co2_ambient));
    let demand = loads.co2_uptake + loads.co2_vented;
    loads.co2_injected = demand.max(0.0);
    loads.co2_unheld = (-demand).max(0.0);

    for v in [loads.q_heat, loads.q_cool, loads.q_dehum, loads.q_postheat, loads.m_hum, loads.m_cond] {
        if !v.is_finite() {
            return Err(Error::Numeric(format!("non-finite load in step: {loads:?}, state {state:?}")));
        }
    }
    let next = ChamberState {
        t_in,
        w: w_target,
        co2: setpoints.co2,
        crop: grown.state,
    };
    Ok((next, loads))
}

/// Daily totals in kWh.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DailyLoads {
    pub day: u32,
    pub q_heat: f64,
    pub q_cool: f64,
    pub q_dehum: f64,
    pub q_postheat: f64,
}

/// Hourly mean loads of the two heat pumps, kW.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HourlyLoads {
    pub t_ext: f64,
    /// heating + post-heating
    pub heat_unit: f64,
    /// cooling + dehumidification
    pub cool_unit: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WaterBalance {
    /// all in kg over the year
    pub et: f64,
    pub humidified: f64,
    pub condensed: f64,
    pub vent_in: f64,
    pub vent_out: f64,
    pub stored: f64,
    /// water leaving with harvested crops (fresh minus dry matter)
    pub crop_retained: f64,
}

impl WaterBalance {
    /// Net water consumption, L.
    pub fn net(&self) -> f64 {
        self.et + self.humidified - self.condensed + self.crop_retained
    }

    pub fn residual(&self) -> f64 {
        self.et + self.humidified + self.vent_in - self.vent_out - self.condensed - self.stored
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Co2Balance {
    /// kg over the year
    pub injected: f64,
    pub uptake: f64,
    pub vented: f64,
    pub stored: f64,
    pub unheld: f64,
}

impl Co2Balance {
    pub fn residual(&self) -> f64 {
        self.injected + self.unheld - self.uptake - self.vented - self.stored
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub lue_clamped_steps: u64,
    pub rad_clamped_steps: u64,
    pub co2_unheld_steps: u64,
    /// largest per-step sensible residual relative to the largest term
    pub max_energy_residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnualResult {
    /// kWh thermal
    pub heating: f64,
    pub cooling: f64,
    pub dehum: f64,
    pub postheat: f64,
    /// kWh of spray evaporation (free cooling)
    pub humidification: f64,
    pub envelope_loss: f64,
    /// kWh electric
    pub lighting_electric: f64,
    /// kg fresh matter from completed harvests
    pub yield_kg: f64,
    pub cycles: u32,
    pub cycle_days: Vec<f64>,
    /// L
    pub water_net: f64,
    /// kg
    pub co2_consumed: f64,
    /// kWh kg⁻¹, lighting electricity plus thermal loads
    pub sec: Option<f64>,
    /// g L⁻¹
    pub wue: Option<f64>,
    pub no_harvest: bool,
    /// peak hourly loads, kW
    pub peak_heat_unit: f64,
    pub peak_cool_unit: f64,
    pub p_light: f64,
    pub water: WaterBalance,
    pub co2: Co2Balance,
    pub diagnostics: Diagnostics,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub daily: Vec<DailyLoads>,
    #[serde(skip)]
    pub hourly: Vec<HourlyLoads>,
}

impl AnnualResult {
    pub fn thermal_total(&self) -> f64 {
        self.heating + self.cooling + self.dehum + self.postheat
    }

    pub fn total_energy(&self) -> f64 {
        self.thermal_total() + self.lighting_electric
    }
}

/// Run the chamber through the climate trace (a full year at defaults).
pub fn integrate_year(setpoints: &Setpoints, insulated: bool, climate: &ClimateTrace, model: &ChamberModel) -> Result<AnnualResult> {
    let cfg = &model.config;
    let geometry = &model.geometry;
    setpoints.validate()?;
    if (climate.dt - cfg.dt).abs() > 1e-9 {
        return Err(Error::Config(format!("climate step {} s differs from model step {} s", climate.dt, cfg.dt)));
    }
    let dt = cfg.dt;
    let steps_per_day = (86_400.0 / dt).round() as usize;
    let steps_per_hour = (3600.0 / dt).round() as usize;
    let n_steps = (cfg.days as usize * steps_per_day).min(climate.steps.len());
    let to_kwh = dt / 3.6e6;

    let mut state = ChamberState::initial(setpoints, &model.crop, setpoints.lights_on(climate.start_time_of_day));
    let mut r = AnnualResult {
        p_light: setpoints.ppfd * geometry.crop_area / cfg.photon_efficacy,
        ..Default::default()
    };
    r.daily.reserve(cfg.days as usize);
    r.hourly.reserve(n_steps / steps_per_hour + 1);
    let mut day = DailyLoads::default();
    let mut hour = HourlyLoads::default();

    for (k, climate_step) in climate.steps[..n_steps].iter().enumerate() {
        let tod = (climate.start_time_of_day + k as f64 * dt).rem_euclid(86_400.0);
        let day_index = (k / steps_per_day) as u32;
        let (next, l) = step(&state, climate_step, tod, setpoints, insulated, model, dt)
            .map_err(|e| Error::Simulation { day: day_index, source: Box::new(e) })?;
        state = next;

        r.heating += l.q_heat * to_kwh;
        r.cooling += l.q_cool * to_kwh;
        r.dehum += l.q_dehum * to_kwh;
        r.postheat += l.q_postheat * to_kwh;
        r.humidification += l.q_hum * to_kwh;
        r.envelope_loss += l.q_env * to_kwh;
        r.lighting_electric += l.p_light * to_kwh;

        r.water.et += l.m_et * dt;
        r.water.humidified += l.m_hum * dt;
        r.water.condensed += l.m_cond * dt;
        r.water.vent_in += l.m_vent_in * dt;
        r.water.vent_out += l.m_vent_out * dt;
        r.water.stored += l.m_store * dt;

        r.co2.injected += l.co2_injected * dt / 1000.0;
        r.co2.uptake += l.co2_uptake * dt / 1000.0;
        r.co2.vented += l.co2_vented * dt / 1000.0;
        r.co2.unheld += l.co2_unheld * dt / 1000.0;

        let d = &mut r.diagnostics;
        d.lue_clamped_steps += l.lue_clamped as u64;
        d.rad_clamped_steps += l.rad_clamped as u64;
        d.co2_unheld_steps += (l.co2_unheld > 0.0) as u64;
        let big = l.largest_term();
        if big > 0.0 {
            d.max_energy_residual = d.max_energy_residual.max(l.sensible_residual().abs() / big);
        }

        day.q_heat += l.q_heat * to_kwh;
        day.q_cool += l.q_cool * to_kwh;
        day.q_dehum += l.q_dehum * to_kwh;
        day.q_postheat += l.q_postheat * to_kwh;
        hour.t_ext += climate_step.t_ext;
        hour.heat_unit += (l.q_heat + l.q_postheat) / 1000.0;
        hour.cool_unit += (l.q_cool + l.q_dehum) / 1000.0;

        let h = crop::check_harvest(&state.crop, &model.crop);
        if h.harvested {
            r.cycles += 1;
            r.cycle_days.push(h.cycle_days);
            r.yield_kg += h.yield_fm * geometry.crop_area;
            r.water.crop_retained += (state.crop.fm - state.crop.dm) * geometry.crop_area / 1000.0;
            state.crop = h.state;
        }

        if (k + 1) % steps_per_hour == 0 {
            let n = steps_per_hour as f64;
            let hl = HourlyLoads {
                t_ext: hour.t_ext / n,
                heat_unit: hour.heat_unit / n,
                cool_unit: hour.cool_unit / n,
            };
            r.peak_heat_unit = r.peak_heat_unit.max(hl.heat_unit);
            r.peak_cool_unit = r.peak_cool_unit.max(hl.cool_unit);
            r.hourly.push(hl);
            hour = HourlyLoads::default();
        }
        if (k + 1) % steps_per_day == 0 {
            day.day = day_index + 1;
            r.daily.push(day);
            day = DailyLoads::default();
        }
    }

    r.water_net = r.water.net();
    r.co2_consumed = r.co2.injected;
    r.no_harvest = r.cycles == 0;
    if r.yield_kg > 0.0 {
        r.sec = Some(r.total_energy() / r.yield_kg);
        let net = r.water_net;
        r.wue = (net > 0.0).then(|| 1000.0 * r.yield_kg / net);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crop::CropParams;
    use crate::weather::{ClimateStep, Location, WeatherSeries};

    fn params() -> CropParams {
        CropParams::from_toml_str(include_str!("../../../data/crop/lettuce_default.toml")).unwrap()
    }

    fn model() -> ChamberModel {
        ChamberModel {
            geometry: ChamberGeometry::default(),
            config: ChamberConfig::default(),
            crop: params(),
        }
    }

    fn calm(t_ext: f64, rh: f64) -> ClimateStep {
        ClimateStep {
            t_ext,
            rh_ext: rh,
            w_ext: psychro::humidity_ratio(t_ext, rh, P_ATM),
            surfaces: SurfaceIrradiance::default(),
            t_sky: t_ext,
        }
    }

    #[test]
    fn geometry_defaults() {
        let g = ChamberGeometry::default();
        assert_eq!(g.envelope_area(), 182.0);
        assert_eq!(g.volume(), 147.0);
        assert_eq!(g.footprint(), 49.0);
        g.validate().unwrap();
    }

    #[test]
    fn lighting_substitution() {
        let g = ChamberGeometry::default();
        let c = ChamberConfig::default();
        let p250 = lighting_power(&Setpoints::new(24.0, 250.0, 900.0), &g, &c, true, 0.0);
        assert_eq!(p250.p_electric, 7500.0);
        let p400 = lighting_power(&Setpoints::new(24.0, 400.0, 900.0), &g, &c, true, 100.0);
        assert_eq!(p400.p_electric, 12000.0);
        assert_eq!(p400.q_into_room, 11900.0);
        let off = lighting_power(&Setpoints::new(24.0, 0.0, 900.0), &g, &c, true, 0.0);
        assert_eq!(off.p_electric, 0.0);
        assert_eq!(off.q_into_room, 0.0);
    }

    #[test]
    fn envelope_conduction_only() {
        let g = ChamberGeometry::default();
        let none = SurfaceIrradiance::default();
        let q = envelope_flux(&g, true, 20.0, 0.0, 0.0, &none, false);
        assert!((q - 0.193 * 182.0 * 20.0).abs() < 1e-9, "{q}");
        assert!((q - 702.5).abs() < 0.05);
        let bare = envelope_flux(&g, false, 20.0, 0.0, 0.0, &none, false);
        assert!((bare / q - g.u_bare / g.u_insulated).abs() < 1e-9);
        assert!((g.u_bare / g.u_insulated - 15.54).abs() < 0.01);
    }

    #[test]
    fn envelope_equilibrium_and_signs() {
        let g = ChamberGeometry::default();
        let none = SurfaceIrradiance::default();
        assert!(envelope_flux(&g, true, 15.0, 15.0, 15.0, &none, true).abs() < 1e-9);
        // clear night sky pulls the skin below ambient: extra loss
        let cold_sky = envelope_flux(&g, true, 15.0, 15.0, 0.0, &none, true);
        assert!(cold_sky > 0.0);
        let sun = SurfaceIrradiance { north: 50.0, east: 50.0, south: 500.0, west: 50.0, roof: 800.0, floor: 0.0 };
        assert!(envelope_flux(&g, true, 15.0, 15.0, 15.0, &sun, true) < 0.0);
    }

    #[test]
    fn dead_state_has_no_loads() {
        // dark, no exchange with outside, saturated air so the seedling
        // cannot transpire
        let mut m = model();
        m.config.ach = 0.0;
        let mut sp = Setpoints::new(20.0, 100.0, 400.0);
        sp.rh_light = 0.99;
        sp.rh_dark = 1.0;
        let st = ChamberState::initial(&sp, &m.crop, false);
        let (_, l) = step(&st, &calm(20.0, 0.85), 0.0, &sp, true, &m, 600.0).unwrap();
        for v in [l.q_heat, l.q_cool, l.q_dehum, l.q_postheat, l.q_hum, l.q_env, l.m_et, l.co2_injected] {
            assert!(v.abs() < 1e-9, "{l:?}");
        }
    }

    #[test]
    fn never_heats_and_cools_together() {
        let m = model();
        for (t_ext, ppfd, t_in) in [(-10.0, 100.0, 28.0), (40.0, 400.0, 20.0), (10.0, 250.0, 24.0), (22.0, 100.0, 24.0)] {
            let sp = Setpoints::new(t_in, ppfd, 900.0);
            let st = ChamberState::initial(&sp, &m.crop, true);
            for tod in [2.0 * 3600.0, 12.0 * 3600.0] {
                let (_, l) = step(&st, &calm(t_ext, 0.6), tod, &sp, true, &m, 600.0).unwrap();
                assert!(l.q_heat * l.q_cool == 0.0, "{l:?}");
                assert!(l.sensible_residual().abs() <= 1e-6 * l.largest_term().max(1.0), "{l:?}");
                assert!(l.water_residual().abs() < 1e-12);
                assert!(l.m_hum >= 0.0 && l.m_cond >= 0.0);
            }
        }
    }

    #[test]
    fn rejects_oversized_step() {
        let m = model();
        let sp = Setpoints::new(24.0, 250.0, 900.0);
        let st = ChamberState::initial(&sp, &m.crop, true);
        assert!(matches!(step(&st, &calm(10.0, 0.5), 0.0, &sp, true, &m, 900.0), Err(Error::Domain(_))));
    }

    #[test]
    fn lights_schedule() {
        let sp = Setpoints::new(24.0, 250.0, 900.0);
        assert!(!sp.lights_on(3.9 * 3600.0));
        assert!(sp.lights_on(4.0 * 3600.0));
        assert!(sp.lights_on(19.9 * 3600.0));
        assert!(!sp.lights_on(20.0 * 3600.0));
        let mut late = sp;
        late.lights_on_at = 18.0;
        assert!(late.lights_on(2.0 * 3600.0));
        assert!(!late.lights_on(12.0 * 3600.0));
    }

    #[test]
    fn no_light_year_flags_no_harvest() {
        let mut m = model();
        m.config.days = 20;
        let loc = Location::new("Trondheim", 63.43, 10.4, 1.0, 0.0).unwrap();
        let ws = WeatherSeries::uniform(loc, 2023, 5.0, 0.7).unwrap();
        let trace = ClimateTrace::build(&ws, 600.0, 20, 0.0, &m.config.sky).unwrap();
        let r = integrate_year(&Setpoints::new(24.0, 0.0, 900.0), true, &trace, &m).unwrap();
        assert!(r.no_harvest);
        assert_eq!(r.yield_kg, 0.0);
        assert_eq!(r.sec, None);
        assert_eq!(r.daily.len(), 20);
    }

    #[test]
    fn short_run_closes_balances() {
        let mut m = model();
        m.config.days = 40;
        let loc = Location::new("Trondheim", 63.43, 10.4, 1.0, 0.0).unwrap();
        let ws = WeatherSeries::uniform(loc, 2023, 5.0, 0.7).unwrap();
        let trace = ClimateTrace::build(&ws, 600.0, 40, 0.0, &m.config.sky).unwrap();
        let r = integrate_year(&Setpoints::new(24.0, 400.0, 900.0), true, &trace, &m).unwrap();
        assert!(r.cycles >= 1);
        assert!(r.water.residual().abs() < 1e-3 * r.water.et);
        assert!(r.co2.residual().abs() < 1e-3 * r.co2.injected);
        assert!(r.diagnostics.max_energy_residual < 1e-6);
        assert_eq!(r.hourly.len(), 40 * 24);
    }
}
