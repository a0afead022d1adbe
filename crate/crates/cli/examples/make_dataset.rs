//! Regenerates `data/weekend_revenue.csv`, the bundled synthetic series.
//!
//! Weekly weekend takes from 1982 to 2010: a log-AR(1) around a slow seasonal
//! cycle, with occasional release weeks that jump and then decay.
//!
//!     cargo run -p boxtail --example make_dataset

use std::fmt::Write;
use std::path::Path;

use boxtail_core::Date;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SEED: u64 = 19_820_103;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let noise = Normal::new(0.0, 0.10).unwrap();
    let start = Date::from_ymd(1982, 1, 3).unwrap();
    let end = Date::from_ymd(2011, 1, 1).unwrap();

    let mut csv = String::from("date,revenue\n");
    let mut level = 0.0f64;
    let mut date = start;
    let mut week = 0u32;
    while date < end {
        let mut shock = noise.sample(&mut rng);
        if rng.random::<f64>() < 0.05 {
            shock += rng.random_range(0.10..0.45);
        }
        level = 0.62 * level + shock;
        let season = 0.18 * (2.0 * std::f64::consts::PI * (week as f64 / 52.18 - 0.45)).cos();
        let growth = 0.012 * week as f64 / 52.18;
        let revenue = (18.2 + growth + season + level).exp();
        writeln!(csv, "{date},{:.0}", revenue).unwrap();
        date = date.add_days(7);
        week += 1;
    }

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/weekend_revenue.csv");
    std::fs::write(&path, csv).unwrap();
    println!("wrote {} weeks to {}", week, path.display());
}
