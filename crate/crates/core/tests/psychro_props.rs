use proptest::prelude::*;
use vfarm::psychro::{
    dew_point_from_pv, humidity_ratio, latent_heat, saturation_pressure, saturation_slope, vpd, MoistAirState, P_ATM,
};

proptest! {
    #[test]
    fn slope_matches_finite_difference(t in 0.0..40.0f64) {
        let h = 1e-4;
        let fd = (saturation_pressure(t + h).unwrap() - saturation_pressure(t - h).unwrap()) / (2.0 * h);
        prop_assert!((saturation_slope(t) - fd).abs() <= 1e-3 * fd);
    }

    #[test]
    fn saturation_pressure_increases(t in -39.0..59.0f64, dt in 0.01..1.0f64) {
        prop_assert!(saturation_pressure(t + dt).unwrap() > saturation_pressure(t).unwrap());
    }

    #[test]
    fn vpd_in_range(t in -20.0..50.0f64, rh in 0.0..=1.0f64) {
        let v = vpd(t, rh).unwrap();
        prop_assert!(v >= 0.0 && v <= saturation_pressure(t).unwrap() + 1e-12);
    }

    #[test]
    fn dew_point_not_above_dry_bulb(t in -20.0..50.0f64, rh in 0.05..=1.0f64) {
        let pv = rh * saturation_pressure(t).unwrap();
        prop_assert!(dew_point_from_pv(pv) <= t + 1e-9);
    }

    #[test]
    fn rh_round_trip(t in -20.0..50.0f64, rh in 0.01..=1.0f64) {
        let s = MoistAirState::from_rh(t, rh, P_ATM).unwrap();
        prop_assert!((s.relative_humidity() - rh).abs() < 1e-9);
        prop_assert!((s.w - humidity_ratio(t, rh, P_ATM)).abs() < 1e-12);
    }

    #[test]
    fn latent_heat_positive_and_falling(t in -20.0..50.0f64) {
        prop_assert!(latent_heat(t) > 2.3e6 && latent_heat(t + 1.0) < latent_heat(t));
    }
}

#[test]
fn vpd_ratio_between_20_and_28() {
    let r = vpd(28.0, 0.75).unwrap() / vpd(20.0, 0.75).unwrap();
    assert!((1.55..=1.70).contains(&r), "{r}");
}
