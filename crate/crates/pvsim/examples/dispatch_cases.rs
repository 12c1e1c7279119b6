//! Simulates the four prosumer cases over one synthetic year and prints the
//! annual energy-flow table.
//!
//! ```bash
//! cargo run -p pvsim --example dispatch_cases
//! ```

use pvsim::{
    simulate_year, BatterySpec, BatteryState, Case, EnergySeries, PvSystemSpec, ScenarioSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // simple synthetic day repeated over the year: sun from 08:00 to 18:00,
    // household evening peak
    let generation: Vec<f64> = (0..8760)
        .map(|i| match i % 24 {
            8..=17 => 0.9,
            _ => 0.0,
        })
        .collect();
    let load: Vec<f64> = (0..8760)
        .map(|i| match i % 24 {
            0..=6 => 0.15,
            7..=17 => 0.25,
            18..=22 => 0.7,
            _ => 0.3,
        })
        .collect();

    let battery = BatterySpec {
        nominal_capacity_kwh: 3.3,
        nominal_power_kw: 3.0,
        depth_of_discharge: 0.90,
        charge_efficiency: 0.95,
        discharge_efficiency: 0.95,
        degradation_per_year: 0.02,
        replacement_year: Some(13),
    };

    println!("case  self_cons  charged  discharged  injected  curtailed  imported  unmet");
    for case in Case::ALL {
        let spec = ScenarioSpec {
            case,
            pv: PvSystemSpec {
                capacity_kwp: 1.5,
                module_unit_wp: Some(250.0),
                year25_power_fraction: 0.80,
            },
            battery: case.uses_battery().then(|| battery.clone()),
            battery_id: case.uses_battery().then(|| "B1".to_string()),
            load: EnergySeries::hourly(load.clone())?,
            generation_per_kwp: EnergySeries::hourly(generation.clone())?,
            tariff_id: "flat".into(),
            site_label: "demo".into(),
        };
        spec.validate(25)?;
        let (year, _) = simulate_year(&spec, 1, BatteryState::default());
        let t = year.totals;
        println!(
            "{:<4}  {:>9.1}  {:>7.1}  {:>10.1}  {:>8.1}  {:>9.1}  {:>8.1}  {:>5.1}",
            case.to_string(),
            t.self_consumed,
            t.charged_from_pv,
            t.discharged_to_load,
            t.injected,
            t.curtailed,
            t.imported,
            t.unmet,
        );
    }
    Ok(())
}
