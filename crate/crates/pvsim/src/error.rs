use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}: bad header {found:?}, expected {expected:?}")]
    ProfileHeader {
        path: PathBuf,
        found: String,
        expected: String,
    },

    #[error("{path}: row {row}: {message}")]
    ProfileRow {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: wrong row count: {found} data rows (expected 8760 or 35040)")]
    WrongRowCount { path: PathBuf, found: usize },

    #[error("invalid series: {0}")]
    Series(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("invalid tariff: {0}")]
    Tariff(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown tariff id `{0}`")]
    UnknownTariff(String),

    #[error("unknown battery id `{0}`")]
    UnknownBattery(String),

    #[error("no price table cell for case {case} at {pv_kwp} kWp")]
    MissingPriceCell { case: crate::model::Case, pv_kwp: f64 },

    #[error("no battery price for `{0}` in the price table")]
    MissingBatteryPrice(String),

    #[error("{0} is zero; ratio undefined")]
    ZeroDenominator(&'static str),

    #[error("scenario `{scenario}` failed: {source}")]
    ScenarioFailed {
        scenario: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
