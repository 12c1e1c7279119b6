//! Annual energy and savings indicators, computed from a representative
//! dispatch year (year 1, before any degradation).

use serde::Serialize;

use crate::dispatch::DispatchYearResult;
use crate::error::{Error, Result};

/// The four indicators reported per scenario. `smr` may exceed 1 when the
/// configuration earns more than the counterfactual bill.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KpiReport {
    pub scr: f64,
    pub ssr: f64,
    pub bu: f64,
    pub smr: f64,
}

/// Self-consumption rate: locally used PV energy over total PV generation.
pub fn scr(pv_consumption: f64, pv_generation: f64) -> Result<f64> {
    if pv_generation <= 0.0 {
        return Err(Error::ZeroDenominator("PV generation"));
    }
    let ratio = pv_consumption / pv_generation;
    assert!(
        (-1e-9..=1.0 + 1e-9).contains(&ratio),
        "self-consumption rate {ratio} outside [0, 1]"
    );
    Ok(ratio)
}

/// Self-supply rate: locally served load over total load.
pub fn ssr(pv_consumption: f64, load_total: f64) -> Result<f64> {
    if load_total <= 0.0 {
        return Err(Error::ZeroDenominator("annual load"));
    }
    Ok(pv_consumption / load_total)
}

/// Battery use: annual PV energy sent to the battery over total load.
pub fn bu(battery_sent: f64, load_total: f64) -> Result<f64> {
    if load_total <= 0.0 {
        return Err(Error::ZeroDenominator("annual load"));
    }
    Ok(battery_sent / load_total)
}

/// Saved money rate: year-1 savings plus revenue over the counterfactual
/// all-grid bill for the same year.
pub fn smr(savings_year: f64, bill_year: f64) -> Result<f64> {
    if bill_year <= 0.0 {
        return Err(Error::ZeroDenominator("annual bill"));
    }
    Ok(savings_year / bill_year)
}

/// Bundles the four indicators from the representative year's dispatch.
///
/// `savings_plus_revenue` is the year-1 money saved and earned at base
/// (unescalated) prices; `bill` the annual bill of the full load under the
/// scenario tariff.
pub fn kpi_report(
    year1: &DispatchYearResult,
    savings_plus_revenue: f64,
    bill: f64,
) -> Result<KpiReport> {
    Ok(KpiReport {
        scr: scr(year1.pv_consumption(), year1.generation_total())?,
        ssr: ssr(year1.pv_consumption(), year1.load_total())?,
        bu: bu(year1.totals.charged_from_pv, year1.load_total())?,
        smr: smr(savings_plus_revenue, bill)?,
    })
}
