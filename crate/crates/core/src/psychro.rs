//! Moist-air properties (Magnus/Tetens saturation curve, FAO-style
//! psychrometric constant).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Standard barometric pressure, Pa.
pub const P_ATM: f64 = 101_325.0;

const MAGNUS_A: f64 = 0.6108;
const MAGNUS_B: f64 = 17.27;
const MAGNUS_C: f64 = 237.3;
const EPSILON_WATER: f64 = 0.621_945;
const R_DRY_AIR: f64 = 287.055;
const CP_DRY_AIR_KJ: f64 = 1.006;
const CP_VAPOUR_KJ: f64 = 1.86;
const H_FG0_KJ: f64 = 2501.0;

pub const T_MIN: f64 = -40.0;
pub const T_MAX: f64 = 60.0;

/// Magnus saturation vapour pressure in kPa without a range check.
#[inline]
pub(crate) fn psat_kpa(t: f64) -> f64 {
    MAGNUS_A * (MAGNUS_B * t / (t + MAGNUS_C)).exp()
}

/// Saturation vapour pressure over water, kPa.
pub fn saturation_pressure(t: f64) -> Result<f64> {
    if !(T_MIN..=T_MAX).contains(&t) {
        return Err(Error::Domain(format!(
            "saturation_pressure: t = {t} °C outside [{T_MIN}, {T_MAX}]"
        )));
    }
    Ok(psat_kpa(t))
}

/// Vapour pressure deficit, kPa.
pub fn vpd(t: f64, rh: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rh) {
        return Err(Error::Domain(format!("vpd: rh = {rh} outside [0, 1]")));
    }
    Ok(saturation_pressure(t)? * (1.0 - rh))
}

/// Slope of the saturation curve, kPa °C⁻¹ (analytic derivative of the Magnus form).
#[inline]
pub fn saturation_slope(t: f64) -> f64 {
    MAGNUS_B * MAGNUS_C * psat_kpa(t) / (t + MAGNUS_C).powi(2)
}

/// Psychrometric constant, kPa °C⁻¹, for pressure in Pa.
#[inline]
pub fn psychrometric_constant(p: f64) -> f64 {
    0.000_665 * p / 1000.0
}

/// Latent heat of vaporisation, J kg⁻¹.
#[inline]
pub fn latent_heat(t: f64) -> f64 {
    (2.501 - 0.002_361 * t) * 1.0e6
}

/// Humidity ratio for a partial vapour pressure (both in Pa).
#[inline]
pub fn humidity_ratio_from_pv(pv: f64, p: f64) -> f64 {
    EPSILON_WATER * pv / (p - pv)
}

/// Humidity ratio at temperature `t` and relative humidity `rh`.
#[inline]
pub fn humidity_ratio(t: f64, rh: f64, p: f64) -> f64 {
    humidity_ratio_from_pv(rh * psat_kpa(t) * 1000.0, p)
}

#[inline]
pub fn saturation_humidity_ratio(t: f64, p: f64) -> f64 {
    humidity_ratio(t, 1.0, p)
}

/// Dew point of a vapour pressure given in kPa.
pub fn dew_point_from_pv(pv_kpa: f64) -> f64 {
    let a = (pv_kpa / MAGNUS_A).ln();
    MAGNUS_C * a / (MAGNUS_B - a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoistAirState {
    pub t: f64,
    pub w: f64,
    pub p: f64,
}

impl MoistAirState {
    pub fn new(t: f64, w: f64, p: f64) -> Result<Self> {
        if !t.is_finite() || !w.is_finite() || !p.is_finite() || p <= 0.0 {
            return Err(Error::Numeric(format!(
                "non-finite moist air state (t={t}, w={w}, p={p})"
            )));
        }
        saturation_pressure(t)?;
        if w < 0.0 {
            return Err(Error::Domain(format!("humidity ratio {w} < 0")));
        }
        let w_sat = saturation_humidity_ratio(t, p);
        if w > w_sat * 1.001 {
            return Err(Error::Domain(format!(
                "humidity ratio {w} above saturation {w_sat} at {t} °C"
            )));
        }
        Ok(Self { t, w, p })
    }

    pub fn from_rh(t: f64, rh: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rh) {
            return Err(Error::Domain(format!("rh = {rh} outside [0, 1]")));
        }
        saturation_pressure(t)?;
        Self::new(t, humidity_ratio(t, rh, p), p)
    }

    /// Partial vapour pressure, kPa.
    pub fn vapour_pressure(&self) -> f64 {
        self.p * self.w / (EPSILON_WATER + self.w) / 1000.0
    }

    pub fn relative_humidity(&self) -> f64 {
        (self.vapour_pressure() / psat_kpa(self.t)).min(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedProps {
    /// °C
    pub dew_point: f64,
    /// kPa °C⁻¹
    pub delta: f64,
    /// kPa °C⁻¹
    pub gamma: f64,
    /// kJ per kg dry air
    pub enthalpy: f64,
    /// kg m⁻³ of moist air
    pub density: f64,
}

pub fn derived_props(state: &MoistAirState) -> DerivedProps {
    let t = state.t;
    let pv = state.vapour_pressure();
    let dew_point = if pv > 0.0 {
        dew_point_from_pv(pv).min(t)
    } else {
        f64::NEG_INFINITY
    };
    let t_k = t + 273.15;
    let density = state.p / (R_DRY_AIR * t_k) * (1.0 + state.w) / (1.0 + 1.607_858 * state.w);
    DerivedProps {
        dew_point,
        delta: saturation_slope(t),
        gamma: psychrometric_constant(state.p),
        enthalpy: CP_DRY_AIR_KJ * t + state.w * (H_FG0_KJ + CP_VAPOUR_KJ * t),
        density,
    }
}
