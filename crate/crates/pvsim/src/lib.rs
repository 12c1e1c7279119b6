//! Techno-economic simulation of residential PV self-consumption with
//! optional battery storage under the Portuguese UPAC regime (DL 153/2014).
//!
//! The library simulates hourly energy dispatch for four prosumer
//! configurations over a multi-year horizon:
//!
//! * **Case I** — off-grid PV, surplus wasted
//! * **Case II** — grid-connected PV, surplus sold at 90 % of the monthly
//!   wholesale price
//! * **Case III** — off-grid PV + battery, surplus stored, overflow wasted
//! * **Case IV** — grid-connected PV + battery, surplus stored, overflow sold
//!
//! and prices the outcome under flat or bi-hourly daily-cycle retail tariffs,
//! producing the discounted-cash-flow indicators (NPV, TLCC, LCOE, IRR,
//! simple payback, benefit-to-cost ratio) and the annual energy indicators
//! (self-consumption rate, self-supply rate, battery use, saved money rate).
//!
//! Start with the runnable programs in `examples/`; the `pvsim` binary runs
//! whole scenario sweeps from a JSON configuration.

pub mod config;
pub mod dispatch;
pub mod econ;
pub mod error;
pub mod kpi;
pub mod model;
pub mod runner;
pub mod series;
pub mod tariff;

pub use config::RunConfig;
pub use dispatch::{
    simulate_horizon, simulate_year, step_dispatch, BatteryState, DispatchYearResult, StepFlows,
};
pub use econ::{
    bc_ratio, build_capex, build_cashflows, energy_basis, irr, lcoe, npv, simple_payback, tlcc,
    CashFlowSchedule, CostBreakdown, EconConfig, EnergyBasis, PriceCell, PriceTable,
};
pub use error::{Error, Result};
pub use kpi::{bu, kpi_report, scr, smr, ssr, KpiReport};
pub use model::{battery_year_capacity, pv_year_factor, BatterySpec, Case, PvSystemSpec, ScenarioSpec};
pub use runner::{expand_matrix, load_sites, run_sweep, EconReport, SweepOptions};
pub use series::{load_profile_csv, EnergySeries, ProfileKind, StepResolution};
pub use tariff::{surplus_revenue, HourWindow, MarketPrices, TariffRates, TariffSchedule};
