//! Bundled reference data.

use crate::dataset::Dataset;

const IRIS_CSV: &str = include_str!("../data/iris.csv");

/// The 150-case Iris data, label column `class`.
pub fn iris() -> Dataset {
    Dataset::load_csv(IRIS_CSV.as_bytes(), "class").expect("bundled iris parses")
}

pub fn iris_csv() -> &'static str {
    IRIS_CSV
}
