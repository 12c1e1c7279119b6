//! Computes the full indicator set for a toy investment: 3 000 EUR up front,
//! a battery swap at year 13, and steady yearly savings.
//!
//! ```bash
//! cargo run -p pvsim --example econ_indicators
//! ```

use pvsim::{bc_ratio, irr, lcoe, npv, simple_payback, tlcc, CashFlowSchedule, EnergyBasis};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let years = 25;
    let discount_rate = 0.03;

    let mut investment = vec![0.0; years + 1];
    investment[0] = 3000.0;
    investment[13] = 1625.0; // replacement unit
    let savings: Vec<f64> = std::iter::once(0.0)
        .chain(std::iter::repeat(320.0))
        .take(years + 1)
        .collect();
    let revenue: Vec<f64> = std::iter::once(0.0)
        .chain(std::iter::repeat(45.0))
        .take(years + 1)
        .collect();
    let om: Vec<f64> = std::iter::once(0.0)
        .chain(std::iter::repeat(30.0))
        .take(years + 1)
        .collect();
    let cf = CashFlowSchedule::from_streams(investment, savings, revenue, om);

    let capex = pvsim::CostBreakdown {
        modules_cost: 1207.50,
        structures: 300.0,
        inverter: 1833.0,
        cables_other: 100.0,
        installation: 300.0,
        battery_unit: 1625.0,
        registration_fee: 170.0,
        capex_total: 3000.0, // toy figure; a real run derives this from the price table
    };

    let tlcc_value = tlcc(&capex, &cf, discount_rate);
    let basis = EnergyBasis(vec![2400.0; years]); // kWh considered per year
    println!("NPV   {:>10.2} EUR", npv(&cf, discount_rate));
    println!("TLCC  {:>10.2} EUR", tlcc_value);
    println!("LCOE  {:>10.4} EUR/kWh", lcoe(tlcc_value, &basis, discount_rate)?);
    match irr(&cf) {
        Some(rate) => println!("IRR   {:>10.2} %", rate * 100.0),
        None => println!("IRR          n/a"),
    }
    match simple_payback(&cf) {
        Some(years) => println!("SPB   {years:>10} years"),
        None => println!("SPB          beyond the horizon"),
    }
    println!("B/C   {:>10.2}", bc_ratio(&cf, discount_rate)?);
    Ok(())
}
