//! Reference table of nonlinearity values and bounds per dimension.
//!
//! Computed columns come from the closed forms in `mbfevo::bounds`. The
//! `lit_*` columns are best-known values from the literature for `5 <= n <= 14`
//! and are embedded as constants.

use std::io::Write;

use mbfevo::bounds::{majority_nonlinearity, monotone_upper_bound, simple_monotone_bound};
use mbfevo::walsh::covering_radius_bound;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const LITERATURE_FIRST_N: usize = 5;

/// Best-known nonlinearity of balanced functions, `n = 5..=14`.
pub const LIT_BALANCED: [u32; 10] = [12, 26, 56, 116, 240, 492, 992, 2010, 4036, 8120];
/// Best-known nonlinearity of arbitrary functions, `n = 5..=14`.
pub const LIT_IMBALANCED: [u32; 10] = [12, 28, 56, 120, 242, 496, 996, 2016, 4040, 8128];
/// Best-known upper bound on nonlinearity of arbitrary functions, `n = 5..=14`.
pub const LIT_BOUND: [u32; 10] = [12, 28, 58, 120, 244, 496, 1000, 2016, 4050, 8128];

/// Previously reported best evolved monotone nonlinearities, `n = 5..=14`;
/// `None` where no monotone function was found.
pub const REPORTED_BEST_EVOLVED: [(&str, [Option<u32>; 10]); 9] = [
    (
        "bal: TT",
        [
            Some(10),
            Some(22),
            Some(46),
            Some(94),
            Some(192),
            Some(388),
            Some(786),
            Some(1583),
            Some(2835),
            None,
        ],
    ),
    (
        "bal: TTw",
        [
            Some(10),
            Some(22),
            Some(44),
            Some(70),
            Some(34),
            Some(22),
            Some(18),
            Some(14),
            Some(12),
            Some(6),
        ],
    ),
    (
        "bal: GP",
        [
            Some(10),
            Some(22),
            Some(44),
            Some(84),
            Some(176),
            Some(336),
            Some(704),
            Some(1281),
            Some(2721),
            Some(5441),
        ],
    ),
    (
        "imb: TT, fit1",
        [
            Some(11),
            Some(23),
            Some(47),
            Some(96),
            Some(195),
            Some(396),
            Some(797),
            Some(1612),
            Some(3173),
            None,
        ],
    ),
    (
        "imb: TT, fit2",
        [
            Some(11),
            Some(23),
            Some(47),
            Some(96),
            Some(195),
            Some(396),
            Some(800),
            Some(1596),
            Some(1156),
            Some(498),
        ],
    ),
    (
        "imb: TT, fit3",
        [
            Some(11),
            Some(23),
            Some(47),
            Some(97),
            Some(195),
            Some(397),
            Some(799),
            Some(1610),
            Some(2462),
            None,
        ],
    ),
    (
        "imb: GP, fit1",
        [
            Some(11),
            Some(23),
            Some(46),
            Some(97),
            Some(196),
            Some(396),
            Some(802),
            Some(1581),
            Some(3072),
            Some(6651),
        ],
    ),
    (
        "imb: GP, fit2",
        [
            Some(11),
            Some(23),
            Some(46),
            Some(95),
            Some(196),
            Some(398),
            Some(796),
            Some(1619),
            Some(3401),
            Some(6750),
        ],
    ),
    (
        "imb: GP, fit3",
        [
            Some(11),
            Some(23),
            Some(46),
            Some(96),
            Some(198),
            Some(395),
            Some(767),
            Some(1642),
            Some(3293),
            Some(6659),
        ],
    ),
];

fn literature(table: &[u32; 10], n: usize) -> Option<u32> {
    n.checked_sub(LITERATURE_FIRST_N)
        .and_then(|i| table.get(i))
        .copied()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub n: usize,
    pub majority_nl: u64,
    /// Odd `n >= 5` or even `n >= 10` only.
    pub simple_monotone_bound: Option<u64>,
    pub bound_a: Option<u128>,
    pub bound_b: Option<u128>,
    pub bound_c: u128,
    pub bound_m: u128,
    pub monotone_bound: f64,
    pub monotone_bound_floor: u64,
    pub covering_radius_bound: f64,
    pub lit_balanced: Option<u32>,
    pub lit_imbalanced: Option<u32>,
    pub lit_bound: Option<u32>,
}

pub fn reference_row(n: usize) -> Result<ReferenceRow> {
    let mb = monotone_upper_bound(n)?;
    Ok(ReferenceRow {
        n,
        majority_nl: majority_nonlinearity(n)? as u64,
        simple_monotone_bound: simple_monotone_bound(n).ok(),
        bound_a: mb.a,
        bound_b: mb.b,
        bound_c: mb.c,
        bound_m: mb.m,
        monotone_bound: mb.bound,
        monotone_bound_floor: mb.floor(),
        covering_radius_bound: covering_radius_bound(n),
        lit_balanced: literature(&LIT_BALANCED, n),
        lit_imbalanced: literature(&LIT_IMBALANCED, n),
        lit_bound: literature(&LIT_BOUND, n),
    })
}

pub fn cmd_reference(from: usize, to: usize) -> Result<Vec<ReferenceRow>> {
    if from < 2 || from > to || to > mbfevo::truth_table::MAX_VARS {
        return Err(CliError::Config(format!(
            "reference range must satisfy 2 <= from <= to <= {}",
            mbfevo::truth_table::MAX_VARS
        )));
    }
    (from..=to).map(reference_row).collect()
}

pub fn write_reference_csv<W: Write>(out: W, rows: &[ReferenceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(CliError::io("<reference output>"))?;
    Ok(())
}
