//! Bundled configurations for the three- and four-mode systems, one per
//! table row, with the labels each row is expected to produce.

use crate::config::parse_config;
use crate::eigen_analysis::{analyze_zone_of, identify_zone, CrossingClass, ZoneReport};
use crate::error::{Error, Result};
use crate::model::SystemConfig;

use CrossingClass::{Attraction, Intermediate, Repulsion};

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../presets/", $name)))),*]
    };
}

/// `(file name, JSON text)` of every bundled preset.
pub const PRESETS: &[(&str, &str)] = bundled![
    "three_mode_table1_row_df.json",
    "three_mode_table1_row_gi.json",
    "three_mode_table1_row_jl.json",
    "three_mode_table1_row_mo.json",
    "four_mode_table2_row_df.json",
    "four_mode_table2_row_gi.json",
    "four_mode_table2_row_jl.json",
    "four_mode_table2_row_mo.json",
    "four_mode_table2_row_mo_alt.json",
];

/// Looks a preset up by file name, with or without the `.json` suffix.
pub fn preset_text(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    PRESETS
        .iter()
        .find(|(file, _)| file.strip_suffix(".json") == Some(stem))
        .map(|&(_, text)| text)
}

pub fn load_preset(name: &str) -> Result<SystemConfig> {
    let text = preset_text(name)
        .ok_or_else(|| Error::InvalidConfig(format!("no bundled preset named {name:?}")))?;
    parse_config(text)
}

/// One reproduction target: a preset, the zone to inspect and the expected
/// (real, imaginary) labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub row: &'static str,
    pub preset: &'static str,
    pub tunable: &'static str,
    pub fixed: &'static str,
    pub expected: (CrossingClass, CrossingClass),
}

impl TableRow {
    pub fn run(&self) -> Result<ZoneReport> {
        let config = load_preset(self.preset)?;
        let zone = identify_zone(&config, self.tunable, self.fixed)?;
        analyze_zone_of(&config, &zone)
    }

    pub fn matches(&self, report: &ZoneReport) -> bool {
        (report.real_class, report.imag_class) == self.expected
    }
}

const fn row(
    row: &'static str,
    preset: &'static str,
    fixed: &'static str,
    expected: (CrossingClass, CrossingClass),
) -> TableRow {
    TableRow {
        row,
        preset,
        tunable: "M",
        fixed,
        expected,
    }
}

pub const TABLE1: [TableRow; 4] = [
    row(
        "d-f",
        "three_mode_table1_row_df.json",
        "P2",
        (Attraction, Repulsion),
    ),
    row(
        "g-i",
        "three_mode_table1_row_gi.json",
        "P2",
        (Intermediate, Repulsion),
    ),
    row(
        "j-l",
        "three_mode_table1_row_jl.json",
        "P2",
        (Intermediate, Intermediate),
    ),
    row(
        "m-o",
        "three_mode_table1_row_mo.json",
        "P2",
        (Repulsion, Attraction),
    ),
];

pub const TABLE2: [TableRow; 4] = [
    row(
        "d-f",
        "four_mode_table2_row_df.json",
        "P3",
        (Attraction, Repulsion),
    ),
    row(
        "g-i",
        "four_mode_table2_row_gi.json",
        "P3",
        (Intermediate, Repulsion),
    ),
    row(
        "j-l",
        "four_mode_table2_row_jl.json",
        "P3",
        (Intermediate, Repulsion),
    ),
    row(
        "m-o",
        "four_mode_table2_row_mo.json",
        "P3",
        (Repulsion, Attraction),
    ),
];

/// The M-P1 zone of every three-mode row keeps the same labels.
pub const TABLE1_MP1: [TableRow; 4] = [
    row(
        "d-f",
        "three_mode_table1_row_df.json",
        "P1",
        (Attraction, Repulsion),
    ),
    row(
        "g-i",
        "three_mode_table1_row_gi.json",
        "P1",
        (Attraction, Repulsion),
    ),
    row(
        "j-l",
        "three_mode_table1_row_jl.json",
        "P1",
        (Attraction, Repulsion),
    ),
    row(
        "m-o",
        "three_mode_table1_row_mo.json",
        "P1",
        (Attraction, Repulsion),
    ),
];
