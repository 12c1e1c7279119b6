//! Cash-flow construction and the discounted-cash-flow indicator set:
//! NPV, TLCC, LCOE, IRR, simple payback and the benefit-to-cost ratio.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dispatch::DispatchYearResult;
use crate::error::{Error, Result};
use crate::model::{Case, ScenarioSpec};
use crate::tariff::{surplus_revenue, MarketPrices, TariffSchedule, BILLING_DAYS_PER_YEAR};

/// Component price matrix: per-(case, PV size) line items plus module and
/// battery unit prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceTable {
    /// PV module price in EUR per Wp.
    pub module_eur_per_wp: f64,
    /// Battery unit prices by battery id.
    #[serde(default)]
    pub battery_eur: BTreeMap<String, f64>,
    pub cells: Vec<PriceCell>,
}

/// Line items for one (case, PV size) combination, all in EUR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceCell {
    pub case: Case,
    pub pv_kwp: f64,
    pub structures: f64,
    pub inverter: f64,
    pub cables_other: f64,
    pub installation: f64,
    /// Registration/exploitation fee owed under the self-consumption decree.
    pub registration_fee: f64,
}

impl PriceTable {
    pub fn cell(&self, case: Case, pv_kwp: f64) -> Result<&PriceCell> {
        self.cells
            .iter()
            .find(|c| c.case == case && c.pv_kwp == pv_kwp)
            .ok_or(Error::MissingPriceCell { case, pv_kwp })
    }
}

/// Initial investment, broken down by component. Only the first battery is
/// CAPEX; replacements enter the cash flows later.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub modules_cost: f64,
    pub structures: f64,
    pub inverter: f64,
    pub cables_other: f64,
    pub installation: f64,
    pub battery_unit: f64,
    pub registration_fee: f64,
    pub capex_total: f64,
}

/// Assembles the investment cost of a scenario from the price table.
pub fn build_capex(spec: &ScenarioSpec, table: &PriceTable) -> Result<CostBreakdown> {
    let cell = table.cell(spec.case, spec.pv.capacity_kwp)?;
    let modules_cost = spec.pv.capacity_kwp * 1000.0 * table.module_eur_per_wp;
    let battery_unit = match (&spec.battery, &spec.battery_id) {
        (None, _) => 0.0,
        (Some(_), Some(id)) => *table
            .battery_eur
            .get(id)
            .ok_or_else(|| Error::MissingBatteryPrice(id.clone()))?,
        (Some(_), None) => return Err(Error::MissingBatteryPrice("<unnamed>".into())),
    };
    let capex_total = modules_cost
        + cell.structures
        + cell.inverter
        + cell.cables_other
        + cell.installation
        + battery_unit
        + cell.registration_fee;
    Ok(CostBreakdown {
        modules_cost,
        structures: cell.structures,
        inverter: cell.inverter,
        cables_other: cell.cables_other,
        installation: cell.installation,
        battery_unit,
        registration_fee: cell.registration_fee,
        capex_total,
    })
}

/// Economic assumptions of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconConfig {
    pub horizon_years: u32,
    /// Annual discount rate as a fraction (0.03 = 3 %).
    pub discount_rate: f64,
    /// Annual inflation rate as a fraction.
    pub inflation_rate: f64,
    /// Annual O&M cost as a fraction of the total CAPEX.
    #[serde(default)]
    pub om_fraction_per_year: f64,
    /// Escalate savings, revenue, O&M and replacement costs with inflation.
    #[serde(default = "default_true")]
    pub escalate_prices_with_inflation: bool,
    /// Count the avoided contracted-power charge as savings for off-grid
    /// cases (I and III). Off by default: the baseline comparison keeps the
    /// same contract either way.
    #[serde(default)]
    pub count_contracted_power_savings_offgrid: bool,
}

fn default_true() -> bool {
    true
}

impl EconConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon_years < 1 {
            return Err(Error::Config("horizon_years must be at least 1".into()));
        }
        if self.discount_rate <= -1.0 || !self.discount_rate.is_finite() {
            return Err(Error::Config(format!(
                "discount_rate must be greater than -1, got {}",
                self.discount_rate
            )));
        }
        if self.inflation_rate < 0.0 || !self.inflation_rate.is_finite() {
            return Err(Error::Config(format!(
                "inflation_rate must be non-negative, got {}",
                self.inflation_rate
            )));
        }
        if self.om_fraction_per_year < 0.0 || !self.om_fraction_per_year.is_finite() {
            return Err(Error::Config(format!(
                "om_fraction_per_year must be non-negative, got {}",
                self.om_fraction_per_year
            )));
        }
        Ok(())
    }
}

/// Per-year money streams over the horizon. Index 0 is the investment year;
/// indices 1..=N are operating years.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CashFlowSchedule {
    pub investment: Vec<f64>,
    pub savings: Vec<f64>,
    pub revenue: Vec<f64>,
    pub om: Vec<f64>,
    pub net: Vec<f64>,
}

impl CashFlowSchedule {
    /// Builds a schedule from explicit streams, deriving the net flow.
    /// All vectors must have length N+1 with zeros in the unused slots.
    pub fn from_streams(
        investment: Vec<f64>,
        savings: Vec<f64>,
        revenue: Vec<f64>,
        om: Vec<f64>,
    ) -> Self {
        assert!(!investment.is_empty());
        assert!(
            investment.len() == savings.len()
                && savings.len() == revenue.len()
                && revenue.len() == om.len()
        );
        let net = (0..investment.len())
            .map(|n| savings[n] + revenue[n] - om[n] - investment[n])
            .collect();
        Self {
            investment,
            savings,
            revenue,
            om,
            net,
        }
    }

    /// Number of operating years (the schedule holds N+1 entries).
    pub fn horizon_years(&self) -> usize {
        self.net.len() - 1
    }

    /// Annual benefit net of running costs, the payback comparison stream.
    pub fn annual_net_benefit(&self, year: usize) -> f64 {
        self.savings[year] + self.revenue[year] - self.om[year]
    }
}

/// Builds the cash-flow schedule of a scenario from its dispatch results.
///
/// Savings value the locally served load at the tariff's time-of-use prices;
/// revenue applies the monthly wholesale remuneration to grid injection
/// (grid-connected cases only). Year-n prices carry an optional inflation
/// escalation of (1+a)^(n-1), so year 1 is always at base prices.
pub fn build_cashflows(
    spec: &ScenarioSpec,
    dispatch: &[DispatchYearResult],
    tariff: &TariffSchedule,
    prices: &MarketPrices,
    capex: &CostBreakdown,
    cfg: &EconConfig,
) -> CashFlowSchedule {
    let n_years = cfg.horizon_years as usize;
    assert_eq!(
        dispatch.len(),
        n_years,
        "dispatch results must cover the horizon"
    );

    let mut investment = vec![0.0; n_years + 1];
    let mut savings = vec![0.0; n_years + 1];
    let mut revenue = vec![0.0; n_years + 1];
    let mut om = vec![0.0; n_years + 1];

    investment[0] = capex.capex_total;
    if let Some(replacement) = spec.battery.as_ref().and_then(|b| b.replacement_year) {
        let replacement = replacement as usize;
        if replacement <= n_years {
            investment[replacement] = capex.battery_unit * escalation(cfg, replacement);
        }
    }

    for year in 1..=n_years {
        let esc = escalation(cfg, year);
        let result = &dispatch[year - 1];

        let mut base_savings = tariff.annual_energy_cost(&result.avoided_series);
        if cfg.count_contracted_power_savings_offgrid && spec.case.off_grid() {
            base_savings += BILLING_DAYS_PER_YEAR * tariff.contracted_power_eur_per_day;
        }
        savings[year] = base_savings * esc;

        if spec.case.grid_connected() {
            revenue[year] = surplus_revenue(&result.injected_by_month, prices) * esc;
        }

        om[year] = cfg.om_fraction_per_year * capex.capex_total * esc;
    }

    CashFlowSchedule::from_streams(investment, savings, revenue, om)
}

fn escalation(cfg: &EconConfig, year: usize) -> f64 {
    if cfg.escalate_prices_with_inflation {
        (1.0 + cfg.inflation_rate).powi(year as i32 - 1)
    } else {
        1.0
    }
}

/// Annual energy amounts entering the LCOE denominator, years 1..=N.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBasis(pub Vec<f64>);

/// Energy basis per case: PV generation for PV-only cases, PV generation
/// plus battery-delivered energy for the storage cases.
pub fn energy_basis(case: Case, dispatch: &[DispatchYearResult]) -> EnergyBasis {
    EnergyBasis(
        dispatch
            .iter()
            .map(|r| {
                if case.uses_battery() {
                    r.generation_total() + r.totals.discharged_to_load
                } else {
                    r.generation_total()
                }
            })
            .collect(),
    )
}

/// Net present value of the schedule at discount rate `d`.
pub fn npv(cf: &CashFlowSchedule, d: f64) -> f64 {
    assert!(d > -1.0, "discount rate must be greater than -1");
    cf.net
        .iter()
        .enumerate()
        .map(|(n, &f)| f / (1.0 + d).powi(n as i32))
        .sum()
}

/// Total life-cycle cost: the investment plus the present value of all
/// recurring costs, including replacement units.
pub fn tlcc(capex: &CostBreakdown, cf: &CashFlowSchedule, d: f64) -> f64 {
    assert!(d > -1.0);
    let recurring: f64 = (1..cf.net.len())
        .map(|n| (cf.om[n] + cf.investment[n]) / (1.0 + d).powi(n as i32))
        .sum();
    capex.capex_total + recurring
}

/// Levelized cost of energy: TLCC over the discounted energy basis.
pub fn lcoe(tlcc_value: f64, basis: &EnergyBasis, d: f64) -> Result<f64> {
    assert!(d > -1.0);
    let discounted: f64 = basis
        .0
        .iter()
        .enumerate()
        .map(|(i, &q)| q / (1.0 + d).powi(i as i32 + 1))
        .sum();
    if discounted <= 0.0 {
        return Err(Error::ZeroDenominator("discounted energy basis"));
    }
    Ok(tlcc_value / discounted)
}

const IRR_SEARCH_LO: f64 = -0.9999;
const IRR_SEARCH_HI: f64 = 10.0;
const IRR_SCAN_STEPS: usize = 4000;
const IRR_NPV_TOL: f64 = 1e-6;

/// Internal rate of return: the discount rate at which the NPV reaches zero.
///
/// Searches (-0.9999, 10.0] by bracketing plus bisection and returns the
/// root nearest zero when several exist. Returns `None` when the net stream
/// has no sign change, or when no bracket resolves to an NPV within the
/// tolerance — near -100 %/yr the NPV is so steep that no representable
/// rate zeroes it; those are the non-meaningful cases reported as blanks.
pub fn irr(cf: &CashFlowSchedule) -> Option<f64> {
    let has_positive = cf.net.iter().any(|&f| f > 0.0);
    let has_negative = cf.net.iter().any(|&f| f < 0.0);
    if !has_positive || !has_negative {
        return None;
    }

    let f = |d: f64| npv(cf, d);
    let mut roots: Vec<f64> = Vec::new();
    let width = (IRR_SEARCH_HI - IRR_SEARCH_LO) / IRR_SCAN_STEPS as f64;
    let mut d_prev = IRR_SEARCH_LO;
    let mut v_prev = f(d_prev);
    for k in 1..=IRR_SCAN_STEPS {
        let d = IRR_SEARCH_LO + width * k as f64;
        let v = f(d);
        if v_prev == 0.0 {
            roots.push(d_prev);
        } else if v_prev * v < 0.0 {
            if let Some(root) = bisect(&f, d_prev, d, v_prev) {
                roots.push(root);
            }
        }
        d_prev = d;
        v_prev = v;
    }
    if v_prev == 0.0 {
        roots.push(d_prev);
    }

    roots
        .into_iter()
        .min_by(|a, b| a.abs().partial_cmp(&b.abs()).expect("finite roots"))
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, mut v_lo: f64) -> Option<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v_mid = f(mid);
        if v_mid.abs() < IRR_NPV_TOL {
            return Some(mid);
        }
        // adjacent floats without reaching the tolerance: unresolvable root
        if (hi - lo) < f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
            return None;
        }
        if v_lo * v_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            v_lo = v_mid;
        }
    }
    None
}

/// Simple payback: the first year whose cumulative nondiscounted net benefit
/// covers the cumulative nondiscounted investment. `None` when the project
/// never pays back within the horizon.
pub fn simple_payback(cf: &CashFlowSchedule) -> Option<u32> {
    let mut cumulative_investment = cf.investment[0];
    let mut cumulative_benefit = 0.0;
    for year in 1..cf.net.len() {
        cumulative_investment += cf.investment[year];
        cumulative_benefit += cf.annual_net_benefit(year);
        if cumulative_benefit >= cumulative_investment {
            return Some(year as u32);
        }
    }
    None
}

/// Benefit-to-cost ratio: discounted benefits (savings plus revenue) over
/// discounted costs (investment plus O&M).
pub fn bc_ratio(cf: &CashFlowSchedule, d: f64) -> Result<f64> {
    assert!(d > -1.0);
    let mut benefits = 0.0;
    let mut costs = 0.0;
    for n in 0..cf.net.len() {
        let df = (1.0 + d).powi(n as i32);
        benefits += (cf.savings[n] + cf.revenue[n]) / df;
        costs += (cf.investment[n] + cf.om[n]) / df;
    }
    if costs <= 0.0 {
        return Err(Error::ZeroDenominator("discounted costs"));
    }
    Ok(benefits / costs)
}
