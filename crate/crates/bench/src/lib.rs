//! Shared fixtures for the criterion benches.

use adelic_core::meanvalue::AdelicTestFunction;
use adelic_core::{NumberField, Region};

/// The fields the benches sweep over.
pub fn fields() -> Vec<NumberField> {
    ["Q", "Q(i)", "Q(sqrt2)"].iter().map(|l| NumberField::from_label(l).expect("built-in field")).collect()
}

/// Level-one ball indicator in dimension n·d.
pub fn ball(n: usize, radius: f64) -> AdelicTestFunction {
    AdelicTestFunction::level_one(n, Region::ball(radius).expect("positive radius"))
}
