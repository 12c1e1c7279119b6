//! Regenerates the synthetic stand-in profiles bundled under `data/`.
//!
//! The shipped study configuration needs a year of consumption and per-site
//! PV generation. The original metered datasets (EDP Distribuição BTN C
//! estimates, SISIFO irradiation runs) are not redistributable, so the repo
//! ships smooth synthetic profiles with the right orders of magnitude
//! instead: a ~3 740 kWh/yr household recorded at 15-minute resolution and
//! hourly generation profiles scaled to typical annual yields for Évora,
//! Porto and the Azores.
//!
//! The generator is fully deterministic; running it again reproduces the
//! committed files byte for byte.
//!
//! ```bash
//! cargo run -p pvsim --example generate_profiles
//! ```

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

const QUARTERS_PER_DAY: usize = 96;
const DAYS_PER_YEAR: usize = 365;

/// Annual household consumption target, kWh (BTN C class stays below
/// 7 140 kWh/yr).
const LOAD_ANNUAL_KWH: f64 = 3740.0;

struct Site {
    name: &'static str,
    /// Annual yield target in kWh per kWp.
    annual_kwh_per_kwp: f64,
    /// Half-amplitude of the seasonal day-length swing, hours.
    day_length_amplitude: f64,
    /// Seasonal irradiance swing.
    season_amplitude: f64,
    /// How strongly overcast days attenuate output.
    cloud_amplitude: f64,
    /// Seed of the per-day cloudiness stream.
    cloud_seed: u64,
}

const SITES: [Site; 3] = [
    Site {
        name: "evora",
        annual_kwh_per_kwp: 1650.0,
        day_length_amplitude: 2.4,
        season_amplitude: 0.38,
        cloud_amplitude: 0.35,
        cloud_seed: 11,
    },
    Site {
        name: "porto",
        annual_kwh_per_kwp: 1480.0,
        day_length_amplitude: 2.6,
        season_amplitude: 0.40,
        cloud_amplitude: 0.50,
        cloud_seed: 23,
    },
    Site {
        name: "azores",
        annual_kwh_per_kwp: 1290.0,
        day_length_amplitude: 2.2,
        season_amplitude: 0.35,
        cloud_amplitude: 0.55,
        cloud_seed: 37,
    },
];

fn gaussian(x: f64, mu: f64, sigma: f64) -> f64 {
    (-0.5 * ((x - mu) / sigma).powi(2)).exp()
}

/// Raw household power draw in kW at an hour-of-day, before scaling.
fn load_shape(day: usize, hour: f64) -> f64 {
    // higher consumption in winter (day 0 = January 1)
    let seasonal = 1.0 + 0.16 * (2.0 * PI * (day as f64 - 20.0) / 365.0).cos();
    let base = 0.16;
    let morning = 0.34 * gaussian(hour, 8.0, 1.6);
    let midday = 0.22 * gaussian(hour, 13.5, 1.8);
    let evening = 0.62 * gaussian(hour, 20.0, 2.2);
    (base + morning + midday + evening) * seasonal
}

/// Deterministic per-day cloudiness factor in (0, 1].
fn cloud_factor(day: usize, seed: u64, amplitude: f64) -> f64 {
    let mut x = seed
        .wrapping_add(day as u64)
        .wrapping_mul(0x9e3779b97f4a7c15);
    x ^= x >> 29;
    x = x.wrapping_mul(0xbf58476d1ce4e5b9);
    x ^= x >> 32;
    let u = (x >> 11) as f64 / (1u64 << 53) as f64;
    // squaring biases the stream toward clear days
    1.0 - amplitude * u * u
}

/// Raw generation shape in arbitrary units at an hour-of-day.
fn generation_shape(site: &Site, day: usize, hour: usize) -> f64 {
    let doy = day as f64;
    let summer_phase = (2.0 * PI * (doy - 172.0) / 365.0).cos();
    let day_length = 12.0 + site.day_length_amplitude * summer_phase;
    let x = (hour as f64 + 0.5 - 12.5) / (day_length / 2.0);
    if x.abs() >= 1.0 {
        return 0.0;
    }
    let bell = (PI / 2.0 * x).cos().powf(1.3);
    let seasonal = 1.0 + site.season_amplitude * summer_phase;
    bell * seasonal * cloud_factor(day, site.cloud_seed, site.cloud_amplitude)
}

fn write_csv(path: &Path, header: &str, values: &[f64]) -> std::io::Result<()> {
    let mut text = String::with_capacity(values.len() * 14);
    text.push_str(header);
    text.push('\n');
    for (step, v) in values.iter().enumerate() {
        text.push_str(&format!("{step},{v:.6}\n"));
    }
    fs::write(path, text)
}

fn main() -> std::io::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .expect("workspace root");
    let data_dir = root.join("data");
    fs::create_dir_all(&data_dir)?;

    // -- load profile, 15-minute resolution --------------------------------
    let mut load: Vec<f64> = Vec::with_capacity(DAYS_PER_YEAR * QUARTERS_PER_DAY);
    for day in 0..DAYS_PER_YEAR {
        for quarter in 0..QUARTERS_PER_DAY {
            let hour = quarter as f64 / 4.0;
            load.push(load_shape(day, hour) * 0.25); // kW over a quarter hour
        }
    }
    let scale = LOAD_ANNUAL_KWH / load.iter().sum::<f64>();
    for v in &mut load {
        *v *= scale;
    }
    let path = data_dir.join("load_btn_c.csv");
    write_csv(&path, "step,kwh", &load)?;
    println!(
        "{} ({} rows, {:.1} kWh/yr)",
        path.display(),
        load.len(),
        load.iter().sum::<f64>()
    );

    // -- per-site generation profiles, hourly -------------------------------
    for site in &SITES {
        let mut gen: Vec<f64> = Vec::with_capacity(DAYS_PER_YEAR * 24);
        for day in 0..DAYS_PER_YEAR {
            for hour in 0..24 {
                gen.push(generation_shape(site, day, hour));
            }
        }
        let scale = site.annual_kwh_per_kwp / gen.iter().sum::<f64>();
        for v in &mut gen {
            *v *= scale;
        }
        let path = data_dir.join(format!("gen_{}.csv", site.name));
        write_csv(&path, "step,kwh_per_kwp", &gen)?;
        println!(
            "{} ({} rows, {:.1} kWh/kWp/yr)",
            path.display(),
            gen.len(),
            gen.iter().sum::<f64>()
        );
    }
    Ok(())
}
