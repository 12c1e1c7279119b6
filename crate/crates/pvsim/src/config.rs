//! Run configuration: a single JSON document holding every price, spec and
//! sweep axis, so that no market value is ever hard-coded in the library.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::econ::{EconConfig, PriceTable};
use crate::error::{Error, Result};
use crate::model::{BatterySpec, Case, PvSystemSpec};
use crate::tariff::{MarketPrices, TariffSchedule};

/// PV parameters shared by every scenario of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvDefaults {
    /// Unit module power in Wp; `null` skips the whole-module check.
    pub module_unit_wp: Option<f64>,
    /// Remaining output fraction at year 25.
    pub year25_power_fraction: f64,
    /// Global multiplier applied to the generation profiles (conversion
    /// losses not already contained in them).
    #[serde(default = "default_generation_multiplier")]
    pub generation_multiplier: f64,
}

fn default_generation_multiplier() -> f64 {
    1.0
}

/// One study site: profile paths plus its tariff-label resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    /// Consumption profile CSV (`step,kwh`), relative to the config file.
    pub load: PathBuf,
    /// Year-1 generation profile CSV (`step,kwh_per_kwp`).
    pub generation_per_kwp: PathBuf,
    /// Maps the matrix's tariff labels (e.g. "flat") to ids in the tariff
    /// table, so sites with different suppliers can share one matrix.
    pub tariffs: BTreeMap<String, String>,
}

/// The sweep axes. Cases I and II run once per (site, tariff, PV) cell;
/// cases III and IV run once per battery option.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixConfig {
    pub pv_kwp: Vec<f64>,
    pub cases: Vec<Case>,
    #[serde(default)]
    pub batteries: Vec<String>,
    /// Tariff labels, resolved per site.
    pub tariffs: Vec<String>,
}

/// Everything a sweep needs, parsed from one JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub econ: EconConfig,
    pub pv: PvDefaults,
    pub tariffs: BTreeMap<String, TariffSchedule>,
    pub market_prices: MarketPrices,
    pub price_table: PriceTable,
    pub batteries: BTreeMap<String, BatterySpec>,
    pub sites: BTreeMap<String, SiteConfig>,
    pub matrix: MatrixConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub trace_year: Option<u32>,
    /// Directory the config file was loaded from; profile paths resolve
    /// against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Parses a config file and runs the structural checks that don't need
    /// the profiles on disk.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.econ.validate()?;

        if !(self.pv.year25_power_fraction > 0.0 && self.pv.year25_power_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "year25_power_fraction must be in (0, 1], got {}",
                self.pv.year25_power_fraction
            )));
        }
        if self.pv.generation_multiplier < 0.0 || !self.pv.generation_multiplier.is_finite() {
            return Err(Error::Config(format!(
                "generation_multiplier must be non-negative, got {}",
                self.pv.generation_multiplier
            )));
        }

        for (id, tariff) in &self.tariffs {
            tariff
                .validate()
                .map_err(|e| Error::Config(format!("tariff `{id}`: {e}")))?;
        }
        self.market_prices.validate()?;

        for (id, battery) in &self.batteries {
            battery
                .validate(self.econ.horizon_years)
                .map_err(|e| Error::Config(format!("battery `{id}`: {e}")))?;
        }

        if self.sites.is_empty() {
            return Err(Error::Config("no sites defined".into()));
        }

        // every matrix cell must be resolvable up front
        for battery_id in &self.matrix.batteries {
            if !self.batteries.contains_key(battery_id) {
                return Err(Error::UnknownBattery(battery_id.clone()));
            }
            if !self.price_table.battery_eur.contains_key(battery_id) {
                return Err(Error::MissingBatteryPrice(battery_id.clone()));
            }
        }
        for (site_id, site) in &self.sites {
            for label in &self.matrix.tariffs {
                let tariff_id = site.tariffs.get(label).ok_or_else(|| {
                    Error::Config(format!("site `{site_id}` has no tariff for label `{label}`"))
                })?;
                if !self.tariffs.contains_key(tariff_id) {
                    return Err(Error::UnknownTariff(tariff_id.clone()));
                }
            }
        }
        for &case in &self.matrix.cases {
            for &pv_kwp in &self.matrix.pv_kwp {
                self.price_table.cell(case, pv_kwp)?;
                self.pv_spec(pv_kwp).validate()?;
            }
        }
        Ok(())
    }

    /// The PV spec for one matrix size.
    pub fn pv_spec(&self, capacity_kwp: f64) -> PvSystemSpec {
        PvSystemSpec {
            capacity_kwp,
            module_unit_wp: self.pv.module_unit_wp,
            year25_power_fraction: self.pv.year25_power_fraction,
        }
    }

    /// Resolves a site-relative profile path.
    pub fn resolve_path(&self, relative: &Path) -> PathBuf {
        if relative.is_absolute() {
            relative.to_path_buf()
        } else {
            self.base_dir.join(relative)
        }
    }

    /// The tariff schedule behind a (site, label) pair.
    pub fn tariff_for(&self, site_id: &str, label: &str) -> Result<(&str, &TariffSchedule)> {
        let site = self
            .sites
            .get(site_id)
            .ok_or_else(|| Error::Config(format!("unknown site `{site_id}`")))?;
        let tariff_id = site
            .tariffs
            .get(label)
            .ok_or_else(|| Error::UnknownTariff(format!("{site_id}/{label}")))?;
        let tariff = self
            .tariffs
            .get(tariff_id)
            .ok_or_else(|| Error::UnknownTariff(tariff_id.clone()))?;
        Ok((tariff_id.as_str(), tariff))
    }
}
