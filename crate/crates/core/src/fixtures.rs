//! Bundled datasets.

/// Dried plant weights for a control group (`ctrl`) and two treatments
/// (`trt1`, `trt2`), ten observations each, in `group,value` CSV form.
pub const PLANT_GROWTH_CSV: &str = include_str!("../data/plant_growth.csv");
