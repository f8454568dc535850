mod common;

use proptest::prelude::*;
use vfarm::hvac::{cop, electric_power, HeatPumpSpec, HvacConfig};

fn units() -> (HeatPumpSpec, HeatPumpSpec) {
    let c = HvacConfig::load(&common::data_dir().join("hvac/units.toml")).unwrap();
    let mut heat = c.heating.clone();
    let mut cool = c.cooling.clone();
    heat.q_nominal = 10.0;
    cool.q_nominal = 10.0;
    (heat, cool)
}

proptest! {
    #[test]
    fn power_is_bounded(q in 0.0..10.0f64, t in -30.0..50.0f64, heating in any::<bool>()) {
        let (h, c) = units();
        let s = if heating { h } else { c };
        let p = electric_power(&s, q, t).unwrap();
        prop_assert!(p >= 0.0);
        // COP never exceeds what the tables allow, so P has a floor
        prop_assert!(p + 1e-12 >= q / s.cop_max() + s.aux_coeff * q);
    }

    #[test]
    fn heating_cop_rises_with_outdoor_temperature(t in -30.0..40.0f64, dt in 0.0..10.0f64, plr in 0.05..1.0f64) {
        let (h, _) = units();
        prop_assert!(cop(&h, t + dt, plr).unwrap().cop + 1e-12 >= cop(&h, t, plr).unwrap().cop);
    }

    #[test]
    fn cooling_cop_falls_with_outdoor_temperature(t in -10.0..50.0f64, dt in 0.0..10.0f64, plr in 0.05..1.0f64) {
        let (_, c) = units();
        prop_assert!(cop(&c, t + dt, plr).unwrap().cop <= cop(&c, t, plr).unwrap().cop + 1e-12);
    }

    #[test]
    fn cooling_clamp_below_condenser_limit(t in -30.0..15.0f64, plr in 0.05..1.0f64) {
        let (_, c) = units();
        prop_assert_eq!(cop(&c, t, plr).unwrap().cop, cop(&c, 15.0, plr).unwrap().cop);
    }

    #[test]
    fn power_grows_with_load(q in 0.0..9.0f64, dq in 0.0..1.0f64, t in -20.0..45.0f64) {
        let (h, c) = units();
        for s in [h, c] {
            // more heat costs more electricity even where the PLF curve rises
            prop_assert!(electric_power(&s, q + dq, t).unwrap() + 1e-12 >= electric_power(&s, q, t).unwrap());
        }
    }
}

#[test]
fn rating_points_and_domain() {
    let (h, c) = units();
    assert!((cop(&h, 7.0, 1.0).unwrap().cop - 3.2).abs() < 1e-12);
    assert!((cop(&c, 35.0, 1.0).unwrap().cop - 3.0).abs() < 1e-12);
    assert!(cop(&h, 7.0, 0.0).is_err());
    assert!(cop(&h, 7.0, 1.5).is_err());
    assert!(electric_power(&h, -1.0, 7.0).is_err());
    assert!(electric_power(&h, 10.5, 7.0).is_err());
}
