//! Scenario-matrix expansion, sweep execution and CSV report emission.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::dispatch::{simulate_year, simulate_year_observed, BatteryState, DispatchYearResult};
use crate::econ::{
    bc_ratio, build_capex, build_cashflows, energy_basis, irr, lcoe, npv, simple_payback, tlcc,
    CashFlowSchedule, EconConfig, PriceTable,
};
use crate::error::{Error, Result};
use crate::kpi::{kpi_report, KpiReport};
use crate::model::{Case, ScenarioSpec};
use crate::series::{load_profile_csv, EnergySeries, ProfileKind};
use crate::tariff::{MarketPrices, TariffSchedule};

/// Hourly profiles of one site, ready for simulation.
#[derive(Debug, Clone)]
pub struct SiteData {
    pub load: EnergySeries,
    pub generation_per_kwp: EnergySeries,
}

/// Loads and normalizes every site's profiles: quarter-hourly data is
/// aggregated to hourly and the global generation multiplier is applied.
pub fn load_sites(cfg: &RunConfig) -> Result<BTreeMap<String, SiteData>> {
    let mut sites = BTreeMap::new();
    for (site_id, site) in &cfg.sites {
        let load_path = cfg.resolve_path(&site.load);
        let gen_path = cfg.resolve_path(&site.generation_per_kwp);
        let load = load_profile_csv(&load_path, ProfileKind::Load)?.resample_to_hourly();
        let generation = load_profile_csv(&gen_path, ProfileKind::GenerationPerKwp)?
            .resample_to_hourly()
            .scaled(cfg.pv.generation_multiplier)?;
        sites.insert(
            site_id.clone(),
            SiteData {
                load,
                generation_per_kwp: generation,
            },
        );
    }
    Ok(sites)
}

/// One expanded matrix cell with its report identifiers.
#[derive(Debug, Clone)]
pub struct ExpandedScenario {
    /// Stable identifier used for file names, e.g. `evora_flat_IVB1_3.45`.
    pub id: String,
    pub tariff_label: String,
    pub spec: ScenarioSpec,
}

/// Expands the configured matrix into concrete scenarios in a deterministic
/// (site, tariff, case, PV, battery) order. Cases I/II take no battery;
/// cases III/IV take one scenario per battery option.
pub fn expand_matrix(
    cfg: &RunConfig,
    sites: &BTreeMap<String, SiteData>,
) -> Result<Vec<ExpandedScenario>> {
    let mut scenarios = Vec::new();
    for (site_id, data) in sites {
        for label in &cfg.matrix.tariffs {
            let (tariff_id, _) = cfg.tariff_for(site_id, label)?;
            for &case in &cfg.matrix.cases {
                for &pv_kwp in &cfg.matrix.pv_kwp {
                    let battery_ids: Vec<Option<&String>> = if case.uses_battery() {
                        cfg.matrix.batteries.iter().map(Some).collect()
                    } else {
                        vec![None]
                    };
                    for battery_id in battery_ids {
                        let battery = match battery_id {
                            Some(id) => Some(
                                cfg.batteries
                                    .get(id)
                                    .ok_or_else(|| Error::UnknownBattery(id.clone()))?
                                    .clone(),
                            ),
                            None => None,
                        };
                        let spec = ScenarioSpec {
                            case,
                            pv: cfg.pv_spec(pv_kwp),
                            battery,
                            battery_id: battery_id.cloned(),
                            load: data.load.clone(),
                            generation_per_kwp: data.generation_per_kwp.clone(),
                            tariff_id: tariff_id.to_string(),
                            site_label: site_id.clone(),
                        };
                        spec.validate(cfg.econ.horizon_years)?;
                        let id = scenario_id(site_id, label, case, battery_id, pv_kwp);
                        scenarios.push(ExpandedScenario {
                            id,
                            tariff_label: label.clone(),
                            spec,
                        });
                    }
                }
            }
        }
    }
    Ok(scenarios)
}

fn scenario_id(
    site: &str,
    tariff_label: &str,
    case: Case,
    battery_id: Option<&String>,
    pv_kwp: f64,
) -> String {
    let battery = battery_id.map(String::as_str).unwrap_or("");
    format!("{site}_{tariff_label}_{case}{battery}_{pv_kwp:.2}")
}

/// The indicator bundle of one evaluated scenario.
#[derive(Debug, Clone, Serialize)]
pub struct EconReport {
    pub npv_eur: f64,
    pub tlcc_eur: f64,
    pub lcoe_eur_per_kwh: f64,
    pub irr: Option<f64>,
    pub simple_payback_years: Option<u32>,
    pub bc_ratio: f64,
    pub kpi: KpiReport,
}

/// Full outcome of one scenario evaluation.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub id: String,
    pub site: String,
    pub tariff_label: String,
    pub case: Case,
    pub pv_kwp: f64,
    pub battery_id: Option<String>,
    pub report: EconReport,
    pub cashflow: CashFlowSchedule,
    pub trace_csv: Option<String>,
}

/// Simulates, prices and scores one scenario.
pub fn evaluate_scenario(
    econ: &EconConfig,
    prices: &MarketPrices,
    price_table: &PriceTable,
    tariff: &TariffSchedule,
    scenario: &ExpandedScenario,
    trace_year: Option<u32>,
) -> Result<ScenarioOutcome> {
    let spec = &scenario.spec;
    let horizon = econ.horizon_years;
    let capex = build_capex(spec, price_table)?;

    let mut dispatch: Vec<DispatchYearResult> = Vec::with_capacity(horizon as usize);
    let mut state = BatteryState::default();
    let mut trace_csv = None;
    for year in 1..=horizon {
        if trace_year == Some(year) {
            let mut buf =
                String::from("step,gen,load,self,charge,discharge,inject,curtail,import,unmet,soc\n");
            let (result, next) = simulate_year_observed(spec, year, state, |i, gen, load, f, st| {
                buf.push_str(&format!(
                    "{i},{gen:.6},{load:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                    f.self_consumed,
                    f.charged_from_pv,
                    f.discharged_to_load,
                    f.injected,
                    f.curtailed,
                    f.imported,
                    f.unmet,
                    st.stored_kwh,
                ));
            });
            trace_csv = Some(buf);
            dispatch.push(result);
            state = next;
        } else {
            let (result, next) = simulate_year(spec, year, state);
            dispatch.push(result);
            state = next;
        }
    }

    let cashflow = build_cashflows(spec, &dispatch, tariff, prices, &capex, econ);
    let d = econ.discount_rate;
    let tlcc_value = tlcc(&capex, &cashflow, d);
    let basis = energy_basis(spec.case, &dispatch);
    let report = EconReport {
        npv_eur: npv(&cashflow, d),
        tlcc_eur: tlcc_value,
        lcoe_eur_per_kwh: lcoe(tlcc_value, &basis, d)?,
        irr: irr(&cashflow),
        simple_payback_years: simple_payback(&cashflow),
        bc_ratio: bc_ratio(&cashflow, d)?,
        kpi: kpi_report(
            &dispatch[0],
            cashflow.savings[1] + cashflow.revenue[1],
            tariff.annual_bill(&spec.load),
        )?,
    };

    Ok(ScenarioOutcome {
        id: scenario.id.clone(),
        site: spec.site_label.clone(),
        tariff_label: scenario.tariff_label.clone(),
        case: spec.case,
        pv_kwp: spec.pv.capacity_kwp,
        battery_id: spec.battery_id.clone(),
        report,
        cashflow,
        trace_csv,
    })
}

/// Sweep-level overrides supplied by the CLI.
#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    pub output_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub trace_year: Option<u32>,
}

/// Where a finished sweep wrote its files.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub output_dir: PathBuf,
    pub scenario_count: usize,
    pub results_path: PathBuf,
    pub summary_path: Option<PathBuf>,
}

/// Runs every scenario of the config and writes `results.csv`, one cash-flow
/// CSV per scenario, optional dispatch traces and `summary.csv`.
///
/// Scenarios are evaluated independently (in parallel when `jobs` permits)
/// and reported in expansion order, so outputs are identical regardless of
/// the worker count.
pub fn run_sweep(cfg: &RunConfig, opts: &SweepOptions) -> Result<SweepOutcome> {
    let trace_year = opts.trace_year.or(cfg.trace_year);
    if let Some(year) = trace_year {
        if year < 1 || year > cfg.econ.horizon_years {
            return Err(Error::Config(format!(
                "trace year {year} outside the {}-year horizon",
                cfg.econ.horizon_years
            )));
        }
    }

    let sites = load_sites(cfg)?;
    let scenarios = expand_matrix(cfg, &sites)?;

    let evaluate_all = || -> Vec<Result<ScenarioOutcome>> {
        scenarios
            .par_iter()
            .map(|scenario| {
                let (_, tariff) = cfg.tariff_for(&scenario.spec.site_label, &scenario.tariff_label)?;
                evaluate_scenario(
                    &cfg.econ,
                    &cfg.market_prices,
                    &cfg.price_table,
                    tariff,
                    scenario,
                    trace_year,
                )
                .map_err(|e| Error::ScenarioFailed {
                    scenario: scenario.id.clone(),
                    source: Box::new(e),
                })
            })
            .collect()
    };

    let evaluated = match opts.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            pool.install(evaluate_all)
        }
        None => evaluate_all(),
    };

    let mut outcomes = Vec::with_capacity(evaluated.len());
    for result in evaluated {
        outcomes.push(result?);
    }

    let out_dir = opts
        .output_dir
        .clone()
        .unwrap_or_else(|| cfg.output_dir.clone());
    fs::create_dir_all(&out_dir)?;

    let results_path = out_dir.join("results.csv");
    write_results_csv(&results_path, &outcomes)?;

    let cashflow_dir = out_dir.join("cashflows");
    fs::create_dir_all(&cashflow_dir)?;
    for outcome in &outcomes {
        let path = cashflow_dir.join(format!("{}.csv", outcome.id));
        write_cashflow_csv(&path, &outcome.cashflow, cfg.econ.discount_rate)?;
    }

    if trace_year.is_some() {
        let trace_dir = out_dir.join("trace");
        fs::create_dir_all(&trace_dir)?;
        for outcome in &outcomes {
            if let Some(trace) = &outcome.trace_csv {
                fs::write(trace_dir.join(format!("{}.csv", outcome.id)), trace)?;
            }
        }
    }

    let summary_path = if outcomes.is_empty() {
        None
    } else {
        let path = out_dir.join("summary.csv");
        fs::write(&path, emit_summary(&outcomes))?;
        Some(path)
    };

    Ok(SweepOutcome {
        output_dir: out_dir,
        scenario_count: outcomes.len(),
        results_path,
        summary_path,
    })
}

pub const RESULTS_HEADER: &str =
    "site,tariff,case,pv_kwp,battery,npv_eur,tlcc_eur,lcoe_eur_per_kwh,irr,spb_years,bc_ratio,scr,ssr,bu,smr";

fn write_results_csv(path: &Path, outcomes: &[ScenarioOutcome]) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{RESULTS_HEADER}")?;
    for o in outcomes {
        writeln!(w, "{}", results_row(o))?;
    }
    w.flush()?;
    Ok(())
}

/// One results.csv line. Money is serialized with 2 decimals, unit prices
/// and ratios with 4; absent indicators serialize as empty cells.
pub fn results_row(o: &ScenarioOutcome) -> String {
    let r = &o.report;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        o.site,
        o.tariff_label,
        o.case,
        fmt_fixed(o.pv_kwp, 2),
        o.battery_id.as_deref().unwrap_or(""),
        fmt_fixed(r.npv_eur, 2),
        fmt_fixed(r.tlcc_eur, 2),
        fmt_fixed(r.lcoe_eur_per_kwh, 4),
        r.irr.map(|v| fmt_fixed(v, 4)).unwrap_or_default(),
        r.simple_payback_years
            .map(|y| y.to_string())
            .unwrap_or_default(),
        fmt_fixed(r.bc_ratio, 4),
        fmt_fixed(r.kpi.scr, 4),
        fmt_fixed(r.kpi.ssr, 4),
        fmt_fixed(r.kpi.bu, 4),
        fmt_fixed(r.kpi.smr, 4),
    )
}

fn write_cashflow_csv(path: &Path, cf: &CashFlowSchedule, discount_rate: f64) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(
        w,
        "year,investment,savings,revenue,om,net,discounted_net,cumulative_nondiscounted"
    )?;
    let mut cumulative = 0.0;
    for year in 0..cf.net.len() {
        cumulative += cf.net[year];
        let discounted = cf.net[year] / (1.0 + discount_rate).powi(year as i32);
        writeln!(
            w,
            "{year},{},{},{},{},{},{},{}",
            fmt_fixed(cf.investment[year], 2),
            fmt_fixed(cf.savings[year], 2),
            fmt_fixed(cf.revenue[year], 2),
            fmt_fixed(cf.om[year], 2),
            fmt_fixed(cf.net[year], 2),
            fmt_fixed(discounted, 2),
            fmt_fixed(cumulative, 2),
        )?;
    }
    w.flush()?;
    Ok(())
}

pub const SUMMARY_HEADER: &str = "site,avg_spb_case_i,avg_spb_case_ii,avg_spb_case_iii,avg_spb_case_iv,best_npv_scenario,best_npv_eur,spb_ratio_case_ii_vs_i";

/// Builds `summary.csv`: per-site average simple payback by case (over the
/// scenarios that do pay back), the best-NPV configuration, and the
/// case II over case I average-payback ratio.
pub fn emit_summary(outcomes: &[ScenarioOutcome]) -> String {
    assert!(!outcomes.is_empty(), "summary of an empty sweep");
    let mut by_site: BTreeMap<&str, Vec<&ScenarioOutcome>> = BTreeMap::new();
    for o in outcomes {
        by_site.entry(o.site.as_str()).or_default().push(o);
    }

    let mut text = String::from(SUMMARY_HEADER);
    text.push('\n');
    for (site, rows) in by_site {
        let avg = |case: Case| -> Option<f64> {
            let paybacks: Vec<f64> = rows
                .iter()
                .filter(|o| o.case == case)
                .filter_map(|o| o.report.simple_payback_years.map(f64::from))
                .collect();
            (!paybacks.is_empty())
                .then(|| paybacks.iter().sum::<f64>() / paybacks.len() as f64)
        };
        let averages = [avg(Case::I), avg(Case::II), avg(Case::III), avg(Case::IV)];
        let best = rows
            .iter()
            .max_by(|a, b| {
                a.report
                    .npv_eur
                    .partial_cmp(&b.report.npv_eur)
                    .expect("finite NPVs")
            })
            .expect("site has scenarios");
        let ratio = match (averages[1], averages[0]) {
            (Some(ii), Some(i)) if i > 0.0 => Some(ii / i),
            _ => None,
        };
        text.push_str(&format!(
            "{site},{},{},{},{},{},{},{}\n",
            averages[0].map(|v| fmt_fixed(v, 2)).unwrap_or_default(),
            averages[1].map(|v| fmt_fixed(v, 2)).unwrap_or_default(),
            averages[2].map(|v| fmt_fixed(v, 2)).unwrap_or_default(),
            averages[3].map(|v| fmt_fixed(v, 2)).unwrap_or_default(),
            best.id,
            fmt_fixed(best.report.npv_eur, 2),
            ratio.map(|v| fmt_fixed(v, 4)).unwrap_or_default(),
        ));
    }
    text
}

/// Fixed-decimal formatting without a negative zero.
pub fn fmt_fixed(value: f64, decimals: usize) -> String {
    let s = format!("{value:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_fixed_normalizes_negative_zero() {
        assert_eq!(fmt_fixed(-0.0000001, 2), "0.00");
        assert_eq!(fmt_fixed(-0.004, 2), "0.00");
        assert_eq!(fmt_fixed(-0.006, 2), "-0.01");
        assert_eq!(fmt_fixed(1.23456, 4), "1.2346");
        assert_eq!(fmt_fixed(-12.5, 2), "-12.50");
    }

    #[test]
    fn scenario_ids_are_filesystem_safe() {
        let id = scenario_id("evora", "bi_hourly", Case::IV, Some(&"B1".to_string()), 3.45);
        assert_eq!(id, "evora_bi_hourly_IVB1_3.45");
        let id = scenario_id("porto", "flat", Case::I, None, 0.5);
        assert_eq!(id, "porto_flat_I_0.50");
    }

    fn outcome(site: &str, case: Case, npv: f64, spb: Option<u32>) -> ScenarioOutcome {
        let n = 2;
        let cashflow = CashFlowSchedule::from_streams(
            vec![100.0, 0.0, 0.0],
            vec![0.0; n + 1],
            vec![0.0; n + 1],
            vec![0.0; n + 1],
        );
        ScenarioOutcome {
            id: format!("{site}_{case}"),
            site: site.to_string(),
            tariff_label: "flat".into(),
            case,
            pv_kwp: 1.0,
            battery_id: None,
            report: EconReport {
                npv_eur: npv,
                tlcc_eur: 100.0,
                lcoe_eur_per_kwh: 0.1,
                irr: None,
                simple_payback_years: spb,
                bc_ratio: 1.0,
                kpi: KpiReport {
                    scr: 0.5,
                    ssr: 0.5,
                    bu: 0.0,
                    smr: 0.3,
                },
            },
            cashflow,
            trace_csv: None,
        }
    }

    #[test]
    fn summary_averages_paybacks_and_blanks_missing_ones() {
        let outcomes = vec![
            outcome("a", Case::I, 10.0, Some(8)),
            outcome("a", Case::I, 20.0, Some(10)),
            outcome("a", Case::II, 500.0, Some(6)),
            outcome("a", Case::III, -50.0, None),
        ];
        let summary = emit_summary(&outcomes);
        let lines: Vec<&str> = summary.lines().collect();
        assert_eq!(lines.len(), 2);
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells[0], "a");
        assert_eq!(cells[1], "9.00"); // average of 8 and 10
        assert_eq!(cells[2], "6.00");
        assert_eq!(cells[3], "", "no finite payback in case III");
        assert_eq!(cells[5], "a_II", "best NPV configuration");
        assert_eq!(cells[7], "0.6667"); // 6 / 9
    }

    #[test]
    fn summary_ratio_below_one_when_case_ii_dominates() {
        let outcomes = vec![
            outcome("x", Case::I, 1.0, Some(12)),
            outcome("x", Case::II, 2.0, Some(7)),
            outcome("y", Case::I, 1.0, Some(10)),
            outcome("y", Case::II, 2.0, Some(8)),
        ];
        let summary = emit_summary(&outcomes);
        for line in summary.lines().skip(1) {
            let ratio: f64 = line.split(',').nth(7).unwrap().parse().unwrap();
            assert!(ratio < 1.0);
        }
    }

    #[test]
    fn single_cell_matrix_expands_to_one_scenario() {
        let cfg: RunConfig = serde_json::from_value(serde_json::json!({
            "econ": {"horizon_years": 5, "discount_rate": 0.03, "inflation_rate": 0.0},
            "pv": {"module_unit_wp": 250.0, "year25_power_fraction": 0.80},
            "tariffs": {"flat": {"kind": "flat", "normal": 0.15, "contracted_power_eur_per_day": 0.2}},
            "market_prices": {"monthly_eur_per_kwh": [0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05]},
            "price_table": {
                "module_eur_per_wp": 0.35,
                "cells": [{"case": "I", "pv_kwp": 0.5, "structures": 50.0, "inverter": 199.0,
                            "cables_other": 50.0, "installation": 100.0, "registration_fee": 0.0}]
            },
            "batteries": {},
            "sites": {"s": {"load": "l.csv", "generation_per_kwp": "g.csv", "tariffs": {"flat": "flat"}}},
            "matrix": {"pv_kwp": [0.5], "cases": ["I"], "batteries": [], "tariffs": ["flat"]}
        }))
        .unwrap();
        let data = SiteData {
            load: EnergySeries::hourly(vec![0.2; 8760]).unwrap(),
            generation_per_kwp: EnergySeries::hourly(vec![0.1; 8760]).unwrap(),
        };
        let mut sites = BTreeMap::new();
        sites.insert("s".to_string(), data);
        let scenarios = expand_matrix(&cfg, &sites).unwrap();
        assert_eq!(scenarios.len(), 1);
        assert_eq!(scenarios[0].id, "s_flat_I_0.50");

        // cases needing a battery expand to nothing when none are offered
        let mut cfg = cfg;
        cfg.matrix.cases = vec![Case::III, Case::IV];
        // no price cells needed: expansion itself performs no price lookups
        let scenarios = expand_matrix(&cfg, &sites).unwrap();
        assert!(scenarios.is_empty());
    }
}
