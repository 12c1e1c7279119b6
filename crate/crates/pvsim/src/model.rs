//! Scenario definitions: the four prosumer cases, PV and battery
//! specifications, and their year-dependent degradation factors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::EnergySeries;

/// The four studied prosumer configurations.
///
/// * `I`   — off-grid PV, surplus wasted
/// * `II`  — grid-connected PV, surplus sold
/// * `III` — off-grid PV + battery, surplus charges the battery, rest wasted
/// * `IV`  — grid-connected PV + battery, surplus charges the battery, rest sold
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::I, Case::II, Case::III, Case::IV];

    /// Cases III and IV require a battery; I and II must not have one.
    pub fn uses_battery(self) -> bool {
        matches!(self, Case::III | Case::IV)
    }

    /// Cases II and IV exchange energy with the grid.
    pub fn grid_connected(self) -> bool {
        matches!(self, Case::II | Case::IV)
    }

    pub fn off_grid(self) -> bool {
        !self.grid_connected()
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" => Ok(Case::I),
            "II" => Ok(Case::II),
            "III" => Ok(Case::III),
            "IV" => Ok(Case::IV),
            other => Err(Error::Config(format!(
                "unknown case `{other}` (expected I, II, III or IV)"
            ))),
        }
    }
}

/// Rated PV array, degrading linearly to `year25_power_fraction` at year 25.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvSystemSpec {
    /// Rated DC power of the array in kWp.
    pub capacity_kwp: f64,
    /// Unit module power in Wp. When set, the capacity must be a whole
    /// number of modules.
    pub module_unit_wp: Option<f64>,
    /// Remaining output fraction at year 25 (warranty-style endpoint).
    pub year25_power_fraction: f64,
}

impl PvSystemSpec {
    pub fn validate(&self) -> Result<()> {
        if self.capacity_kwp <= 0.0 || !self.capacity_kwp.is_finite() {
            return Err(Error::Scenario(format!(
                "capacity_kwp must be positive, got {}",
                self.capacity_kwp
            )));
        }
        if !(self.year25_power_fraction > 0.0 && self.year25_power_fraction <= 1.0) {
            return Err(Error::Scenario(format!(
                "year25_power_fraction must be in (0, 1], got {}",
                self.year25_power_fraction
            )));
        }
        if let Some(unit_wp) = self.module_unit_wp {
            if unit_wp <= 0.0 || !unit_wp.is_finite() {
                return Err(Error::Scenario(format!(
                    "module_unit_wp must be positive, got {unit_wp}"
                )));
            }
            let modules = self.capacity_kwp * 1000.0 / unit_wp;
            if (modules - modules.round()).abs() > 1e-6 {
                return Err(Error::Scenario(format!(
                    "capacity {} kWp is not a whole number of {unit_wp} Wp modules ({modules:.3})",
                    self.capacity_kwp
                )));
            }
        }
        Ok(())
    }
}

/// Remaining PV output fraction in a given 1-based year.
///
/// Linear from 1.0 at year 1 down to the year-25 fraction; the same per-year
/// slope keeps applying beyond year 25 (floored at zero). The slope is fixed
/// by the year-25 anchor and does not depend on the analysis horizon.
pub fn pv_year_factor(year: u32, pv: &PvSystemSpec) -> f64 {
    assert!(year >= 1, "year index is 1-based");
    let t = (year - 1) as f64 / 24.0;
    (1.0 + (pv.year25_power_fraction - 1.0) * t).max(0.0)
}

/// Battery unit: nameplate ratings plus the operating limits applied by the
/// dispatch simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatterySpec {
    pub nominal_capacity_kwh: f64,
    /// Symmetric charge/discharge power limit in kW.
    pub nominal_power_kw: f64,
    /// Usable fraction of the current capacity.
    #[serde(default = "default_depth_of_discharge")]
    pub depth_of_discharge: f64,
    #[serde(default = "default_efficiency")]
    pub charge_efficiency: f64,
    #[serde(default = "default_efficiency")]
    pub discharge_efficiency: f64,
    /// Fraction of the nominal capacity lost per year of age.
    pub degradation_per_year: f64,
    /// 1-based year in which a fresh unit replaces the old one. `null`
    /// disables replacement; omitting the field keeps the default mid-life
    /// swap at year 13.
    #[serde(default = "default_replacement_year")]
    pub replacement_year: Option<u32>,
}

fn default_depth_of_discharge() -> f64 {
    0.90
}

fn default_efficiency() -> f64 {
    0.95
}

fn default_replacement_year() -> Option<u32> {
    Some(13)
}

impl BatterySpec {
    pub fn validate(&self, horizon_years: u32) -> Result<()> {
        if self.nominal_capacity_kwh <= 0.0 || !self.nominal_capacity_kwh.is_finite() {
            return Err(Error::Scenario(format!(
                "nominal_capacity_kwh must be positive, got {}",
                self.nominal_capacity_kwh
            )));
        }
        if self.nominal_power_kw <= 0.0 || !self.nominal_power_kw.is_finite() {
            return Err(Error::Scenario(format!(
                "nominal_power_kw must be positive, got {}",
                self.nominal_power_kw
            )));
        }
        if !(self.depth_of_discharge > 0.0 && self.depth_of_discharge <= 1.0) {
            return Err(Error::Scenario(format!(
                "depth_of_discharge must be in (0, 1], got {}",
                self.depth_of_discharge
            )));
        }
        for (name, eff) in [
            ("charge_efficiency", self.charge_efficiency),
            ("discharge_efficiency", self.discharge_efficiency),
        ] {
            if !(eff > 0.0 && eff <= 1.0) {
                return Err(Error::Scenario(format!("{name} must be in (0, 1], got {eff}")));
            }
        }
        if !(0.0..1.0).contains(&self.degradation_per_year) {
            return Err(Error::Scenario(format!(
                "degradation_per_year must be in [0, 1), got {}",
                self.degradation_per_year
            )));
        }
        if let Some(r) = self.replacement_year {
            if r <= 1 || r > horizon_years {
                return Err(Error::Scenario(format!(
                    "replacement_year {r} must lie in (1, {horizon_years}]"
                )));
            }
        }
        Ok(())
    }
}

/// Effective battery capacity in kWh for a given 1-based year.
///
/// The unit ages linearly from the install year (age 0); a replacement resets
/// the age to 0 in the replacement year.
pub fn battery_year_capacity(year: u32, battery: &BatterySpec) -> f64 {
    assert!(year >= 1, "year index is 1-based");
    let age = match battery.replacement_year {
        Some(r) if year >= r => year - r,
        _ => year - 1,
    };
    (battery.nominal_capacity_kwh * (1.0 - battery.degradation_per_year * age as f64)).max(0.0)
}

/// One fully resolved configuration cell: site profiles, case, PV size,
/// battery choice and tariff.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub case: Case,
    pub pv: PvSystemSpec,
    /// Present exactly for cases III and IV.
    pub battery: Option<BatterySpec>,
    /// Identifier of the battery option, used for price lookup and reporting.
    pub battery_id: Option<String>,
    /// Household consumption, kWh per step.
    pub load: EnergySeries,
    /// Year-1 AC generation per kWp of installed power, kWh per step.
    pub generation_per_kwp: EnergySeries,
    /// Reference into the tariff table.
    pub tariff_id: String,
    pub site_label: String,
}

impl ScenarioSpec {
    pub fn validate(&self, horizon_years: u32) -> Result<()> {
        self.pv.validate()?;
        match (&self.battery, self.case.uses_battery()) {
            (Some(b), true) => b.validate(horizon_years)?,
            (None, false) => {}
            (Some(_), false) => {
                return Err(Error::Scenario(format!(
                    "case {} must not have a battery",
                    self.case
                )))
            }
            (None, true) => {
                return Err(Error::Scenario(format!(
                    "case {} requires a battery",
                    self.case
                )))
            }
        }
        if self.load.resolution() != self.generation_per_kwp.resolution() {
            return Err(Error::Scenario(
                "load and generation profiles must share the same step length".into(),
            ));
        }
        Ok(())
    }
}
