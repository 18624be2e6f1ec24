//! CSV and text renderings. Exact values print as `p/q`; decimal renderings
//! are optional and prefixed with `~` to mark them approximate.

use std::fmt::{Display, Write as _};

use crate::exact::{render, render_decimal, Rational};
use crate::markov::WalkTrace;
use crate::probability::StringDistribution;

pub const DECIMAL_DIGITS: usize = 12;

fn approx(r: &Rational) -> String {
    format!("~{}", render_decimal(r, DECIMAL_DIGITS))
}

fn row(values: &[Rational], f: fn(&Rational) -> String) -> String {
    values.iter().map(f).collect::<Vec<_>>().join(",")
}

fn header(members: &[impl Display]) -> String {
    members
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Header of ids, one exact row, and with `decimal` one `~` row.
pub fn distribution_csv(members: &[impl Display], values: &[Rational], decimal: bool) -> String {
    let mut s = format!("{}\n{}\n", header(members), row(values, render));
    if decimal {
        writeln!(s, "{}", row(values, approx)).expect("string write");
    }
    s
}

/// Header of ids, then one row per id; with `decimal` the `~`
/// rows follow the exact block in the same order.
pub fn matrix_csv(members: &[impl Display], entries: &[Vec<Rational>], decimal: bool) -> String {
    let mut s = header(members);
    s.push('\n');
    for r in entries {
        writeln!(s, "{}", row(r, render)).expect("string write");
    }
    if decimal {
        for r in entries {
            writeln!(s, "{}", row(r, approx)).expect("string write");
        }
    }
    s
}

/// `output,probability_num,probability_den`, plus `probability_approx`
/// with `decimal`.
pub fn strings_csv(dist: &StringDistribution, decimal: bool) -> String {
    let mut s = String::from("output,probability_num,probability_den");
    if decimal {
        s.push_str(",probability_approx");
    }
    s.push('\n');
    for (o, p) in dist.iter() {
        write!(s, "{},{},{}", o.token(), p.numer(), p.denom()).expect("string write");
        if decimal {
            write!(s, ",{}", approx(p)).expect("string write");
        }
        s.push('\n');
    }
    s
}

pub fn walks_text(traces: &[WalkTrace]) -> String {
    let mut s = String::from("seed,bits,states,outputs\n");
    for t in traces {
        writeln!(s, "{t}").expect("string write");
    }
    s
}
