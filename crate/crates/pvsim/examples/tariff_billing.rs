//! Prices one year of grid consumption under a flat and a bi-hourly tariff,
//! and values a surplus stream at the monthly wholesale prices.
//!
//! ```bash
//! cargo run -p pvsim --example tariff_billing
//! ```

use pvsim::{surplus_revenue, EnergySeries, HourWindow, MarketPrices, TariffSchedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 2019 EDP Comercial residential prices
    let flat = TariffSchedule::flat(0.1493, 0.2187);
    let bi_hourly = TariffSchedule::bi_hourly_daily(0.1867, 0.1098, HourWindow::new(22, 8), 0.2282);

    // evening-heavy household: most consumption in peak hours
    let evening_heavy: Vec<f64> = (0..8760)
        .map(|i| match i % 24 {
            18..=21 => 0.9,
            7..=17 => 0.25,
            _ => 0.1,
        })
        .collect();
    // night-heavy variant of the same annual energy, shifted into off-peak
    let night_heavy: Vec<f64> = (0..8760)
        .map(|i| match i % 24 {
            22 | 23 | 0..=5 => 0.7625,
            7..=17 => 0.25,
            _ => 0.1,
        })
        .collect();

    for (label, profile) in [("evening-heavy", evening_heavy), ("night-heavy", night_heavy)] {
        let series = EnergySeries::hourly(profile)?;
        println!(
            "{label}: {:.0} kWh/yr -> flat {:.2} EUR, bi-hourly {:.2} EUR",
            series.annual_total(),
            flat.annual_bill(&series),
            bi_hourly.annual_bill(&series),
        );
    }

    // surplus sold to the grid: 90 % of the monthly OMIE average
    let omie_2018 = MarketPrices {
        monthly_eur_per_kwh: [
            0.0515, 0.0549, 0.0398, 0.0427, 0.0550, 0.0585, 0.0619, 0.0643, 0.0713, 0.0653,
            0.0620, 0.0618,
        ],
    };
    let injected = [40.0, 55.0, 80.0, 95.0, 120.0, 140.0, 150.0, 140.0, 100.0, 70.0, 45.0, 35.0];
    println!(
        "injected {:.0} kWh/yr -> {:.2} EUR of surplus revenue",
        injected.iter().sum::<f64>(),
        surplus_revenue(&injected, &omie_2018),
    );
    Ok(())
}
