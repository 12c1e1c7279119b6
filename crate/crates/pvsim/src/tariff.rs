//! Retail electricity pricing: flat and bi-hourly daily-cycle tariffs,
//! contracted-power fixed charges, and surplus remuneration at 90 % of the
//! monthly wholesale market price.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{EnergySeries, StepResolution};

/// Non-leap calendar used throughout the simulated year.
pub const DAYS_PER_MONTH: [usize; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

/// Days billed for the contracted-power charge.
pub const BILLING_DAYS_PER_YEAR: f64 = 365.0;

/// Daily hour interval `[start_hour, end_hour)` in local time; may wrap
/// midnight (e.g. 22 -> 8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HourWindow {
    pub start_hour: u8,
    pub end_hour: u8,
}

impl HourWindow {
    pub fn new(start_hour: u8, end_hour: u8) -> Self {
        Self { start_hour, end_hour }
    }

    pub fn validate(&self) -> Result<()> {
        if self.start_hour > 24 || self.end_hour > 24 {
            return Err(Error::Tariff(format!(
                "hour window {}..{} out of range 0..=24",
                self.start_hour, self.end_hour
            )));
        }
        if self.start_hour == self.end_hour {
            return Err(Error::Tariff(format!(
                "hour window {}..{} is empty",
                self.start_hour, self.end_hour
            )));
        }
        Ok(())
    }

    pub fn contains(&self, hour: u8) -> bool {
        debug_assert!(hour < 24);
        if self.start_hour < self.end_hour {
            (self.start_hour..self.end_hour).contains(&hour)
        } else {
            // wraps midnight
            hour >= self.start_hour || hour < self.end_hour
        }
    }
}

fn default_offpeak_window() -> HourWindow {
    // Standard Portuguese bi-hourly daily cycle: off-peak from 22:00 to 08:00.
    HourWindow::new(22, 8)
}

/// Energy prices of a schedule, in EUR/kWh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TariffRates {
    #[serde(rename = "flat")]
    Flat { normal: f64 },
    #[serde(rename = "bi-hourly-daily")]
    BiHourlyDaily {
        peak: f64,
        off_peak: f64,
        #[serde(default = "default_offpeak_window")]
        offpeak_window: HourWindow,
    },
}

/// A retail tariff: time-of-use energy prices plus the fixed daily
/// contracted-power charge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TariffSchedule {
    #[serde(flatten)]
    pub rates: TariffRates,
    /// Fixed charge in EUR per day.
    pub contracted_power_eur_per_day: f64,
}

impl TariffSchedule {
    pub fn flat(normal: f64, contracted_power_eur_per_day: f64) -> Self {
        Self {
            rates: TariffRates::Flat { normal },
            contracted_power_eur_per_day,
        }
    }

    pub fn bi_hourly_daily(
        peak: f64,
        off_peak: f64,
        offpeak_window: HourWindow,
        contracted_power_eur_per_day: f64,
    ) -> Self {
        Self {
            rates: TariffRates::BiHourlyDaily {
                peak,
                off_peak,
                offpeak_window,
            },
            contracted_power_eur_per_day,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.rates {
            TariffRates::Flat { normal } => {
                if *normal <= 0.0 || !normal.is_finite() {
                    return Err(Error::Tariff(format!("flat price must be positive, got {normal}")));
                }
            }
            TariffRates::BiHourlyDaily {
                peak,
                off_peak,
                offpeak_window,
            } => {
                for (name, p) in [("peak", peak), ("off_peak", off_peak)] {
                    if *p <= 0.0 || !p.is_finite() {
                        return Err(Error::Tariff(format!("{name} price must be positive, got {p}")));
                    }
                }
                offpeak_window.validate()?;
            }
        }
        if self.contracted_power_eur_per_day < 0.0 || !self.contracted_power_eur_per_day.is_finite()
        {
            return Err(Error::Tariff(format!(
                "contracted power price must be non-negative, got {}",
                self.contracted_power_eur_per_day
            )));
        }
        Ok(())
    }

    /// Energy price in EUR/kWh at a given hour of the day (0-23).
    pub fn energy_price_at(&self, hour_of_day: u8) -> f64 {
        assert!(hour_of_day < 24, "hour of day out of range");
        match &self.rates {
            TariffRates::Flat { normal } => *normal,
            TariffRates::BiHourlyDaily {
                peak,
                off_peak,
                offpeak_window,
            } => {
                if offpeak_window.contains(hour_of_day) {
                    *off_peak
                } else {
                    *peak
                }
            }
        }
    }

    /// Value of an energy series at the time-of-use prices, without the
    /// contracted-power charge.
    pub fn annual_energy_cost(&self, consumption: &EnergySeries) -> f64 {
        let res = consumption.resolution();
        consumption
            .values()
            .iter()
            .enumerate()
            .map(|(i, &kwh)| kwh * self.energy_price_at(hour_of_day(i, res)))
            .sum()
    }

    /// Full annual bill: time-of-use energy cost plus 365 days of the
    /// contracted-power charge.
    pub fn annual_bill(&self, consumption_from_grid: &EnergySeries) -> f64 {
        self.annual_energy_cost(consumption_from_grid)
            + BILLING_DAYS_PER_YEAR * self.contracted_power_eur_per_day
    }
}

/// Average monthly wholesale closing prices (OMIE), EUR/kWh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketPrices {
    pub monthly_eur_per_kwh: [f64; 12],
}

impl MarketPrices {
    pub fn validate(&self) -> Result<()> {
        for (m, &p) in self.monthly_eur_per_kwh.iter().enumerate() {
            if p <= 0.0 || !p.is_finite() {
                return Err(Error::Tariff(format!(
                    "market price for month {} must be positive, got {p}",
                    m + 1
                )));
            }
        }
        Ok(())
    }
}

/// Remuneration of grid-injected surplus: each month's energy is paid at
/// 90 % of that month's average wholesale price.
pub fn surplus_revenue(injected_by_month: &[f64; 12], prices: &MarketPrices) -> f64 {
    injected_by_month
        .iter()
        .zip(prices.monthly_eur_per_kwh.iter())
        .map(|(&kwh, &price)| {
            debug_assert!(kwh >= 0.0);
            kwh * price * 0.9
        })
        .sum()
}

/// Hour of the day (0-23) of a step index within the simulated year.
pub fn hour_of_day(step_index: usize, resolution: StepResolution) -> u8 {
    ((step_index / resolution.steps_per_hour()) % 24) as u8
}

/// Calendar month (1-12) of a step index, non-leap year starting January 1.
pub fn month_of_step(step_index: usize, resolution: StepResolution) -> u32 {
    assert!(
        step_index < resolution.steps_per_year(),
        "step {step_index} outside the simulated year"
    );
    let steps_per_day = 24 * resolution.steps_per_hour();
    let mut day = step_index / steps_per_day;
    for (m, &days) in DAYS_PER_MONTH.iter().enumerate() {
        if day < days {
            return (m + 1) as u32;
        }
        day -= days;
    }
    unreachable!("step within one year")
}
