//! Energy and savings indicators (SCR, SSR, BU, SMR) for a PV + battery
//! household, contrasted with the same system without storage.
//!
//! ```bash
//! cargo run -p pvsim --example kpi_report
//! ```

use pvsim::{
    kpi_report, simulate_year, BatterySpec, BatteryState, Case, EnergySeries, PvSystemSpec,
    ScenarioSpec, TariffSchedule,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let generation: Vec<f64> = (0..8760)
        .map(|i| match i % 24 {
            9..=16 => 0.85,
            8 | 17 => 0.35,
            _ => 0.0,
        })
        .collect();
    let load: Vec<f64> = (0..8760)
        .map(|i| match i % 24 {
            18..=22 => 0.65,
            7..=17 => 0.2,
            _ => 0.12,
        })
        .collect();
    let tariff = TariffSchedule::flat(0.1493, 0.2187);

    for case in [Case::II, Case::IV] {
        let spec = ScenarioSpec {
            case,
            pv: PvSystemSpec {
                capacity_kwp: 1.5,
                module_unit_wp: Some(250.0),
                year25_power_fraction: 0.80,
            },
            battery: case.uses_battery().then_some(BatterySpec {
                nominal_capacity_kwh: 3.3,
                nominal_power_kw: 3.0,
                depth_of_discharge: 0.90,
                charge_efficiency: 0.95,
                discharge_efficiency: 0.95,
                degradation_per_year: 0.02,
                replacement_year: Some(13),
            }),
            battery_id: case.uses_battery().then(|| "B1".to_string()),
            load: EnergySeries::hourly(load.clone())?,
            generation_per_kwp: EnergySeries::hourly(generation.clone())?,
            tariff_id: "flat".into(),
            site_label: "demo".into(),
        };
        spec.validate(25)?;

        let (year1, _) = simulate_year(&spec, 1, BatteryState::default());
        let savings = tariff.annual_energy_cost(&year1.avoided_series);
        let bill = tariff.annual_bill(&spec.load);
        let kpi = kpi_report(&year1, savings, bill)?;

        println!(
            "case {case}: SCR {:.4}  SSR {:.4}  BU {:.4}  SMR {:.4}",
            kpi.scr, kpi.ssr, kpi.bu, kpi.smr
        );
    }
    Ok(())
}
