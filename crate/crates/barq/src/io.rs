//! Text formats for barcodes, complexes, profiles, and spectra, plus the
//! TSV emitters for reports.
//!
//! Formats are line-oriented with `#` comments; parse errors carry the
//! offending line number. Endpoints are written with Rust's shortest
//! round-trip float formatting, so serialize-then-parse is the identity on
//! canonical values.

use std::fmt::Write as _;

use thiserror::Error;

use crate::barcode::{Bar, Barcode};
use crate::complex::{FilteredComplex, Violation};
use crate::entropy::{EntropyReport, PositivePartReport};
use crate::geometry::{CroftonEstimate, TomographCensus};
use crate::profile::{ConvexProfile, ProfileError};
use crate::spectrum::{ChordSpectrum, SpectrumError};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    InvalidComplex { line: usize, source: Violation },
    #[error("{0}")]
    InvalidProfile(#[from] ProfileError),
    #[error("{0}")]
    InvalidSpectrum(#[from] SpectrumError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_f64(token: &str, line: usize, what: &str) -> Result<f64, ParseError> {
    token
        .parse::<f64>()
        .map_err(|_| syntax(line, format!("bad {what} `{token}`")))
}

/// Numbered non-comment, non-blank lines.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if stripped.is_empty() {
            None
        } else {
            Some((i + 1, stripped))
        }
    })
}

fn fmt_endpoint(value: f64) -> String {
    if value == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{value}")
    }
}

// --- barcode: `bar <birth> <death|inf> <multiplicity>` ---

pub fn write_barcode(barcode: &Barcode) -> String {
    let mut out = String::new();
    for bar in barcode.bars() {
        writeln!(
            out,
            "bar {} {} {}",
            fmt_endpoint(bar.birth()),
            fmt_endpoint(bar.death()),
            bar.multiplicity()
        )
        .expect("string write");
    }
    out
}

pub fn parse_barcode(text: &str) -> Result<Barcode, ParseError> {
    let mut bars = Vec::new();
    for (line, content) in content_lines(text) {
        let mut parts = content.split_whitespace();
        match parts.next() {
            Some("bar") => {}
            Some(other) => return Err(syntax(line, format!("expected `bar`, got `{other}`"))),
            None => continue,
        }
        let birth = parse_f64(
            parts.next().ok_or_else(|| syntax(line, "missing birth"))?,
            line,
            "birth",
        )?;
        let death_token = parts.next().ok_or_else(|| syntax(line, "missing death"))?;
        let death = if death_token == "inf" {
            f64::INFINITY
        } else {
            parse_f64(death_token, line, "death")?
        };
        let mult_token = parts
            .next()
            .ok_or_else(|| syntax(line, "missing multiplicity"))?;
        let multiplicity: u64 = mult_token
            .parse()
            .map_err(|_| syntax(line, format!("bad multiplicity `{mult_token}`")))?;
        if let Some(extra) = parts.next() {
            return Err(syntax(line, format!("unexpected token `{extra}`")));
        }
        let bar = Bar::new(birth, death, multiplicity)
            .map_err(|e| syntax(line, e.to_string()))?;
        bars.push(bar);
    }
    Ok(Barcode::new(bars))
}

// --- complex: header + `gen <id> <action>` + `bnd <id> <id>+` ---

pub const COMPLEX_HEADER: &str = "filtered-complex v1";

pub fn write_complex(complex: &FilteredComplex) -> String {
    let mut out = String::from(COMPLEX_HEADER);
    out.push('\n');
    for (id, action) in complex.generators() {
        writeln!(out, "gen {id} {}", fmt_endpoint(*action)).expect("string write");
    }
    for (id, _) in complex.generators() {
        if let Some(entries) = complex.boundary_of(id) {
            let mut line = format!("bnd {id}");
            for e in entries {
                line.push(' ');
                line.push_str(e);
            }
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

pub fn parse_complex(text: &str) -> Result<FilteredComplex, ParseError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, header)) if header == COMPLEX_HEADER => {}
        Some((line, other)) => {
            return Err(syntax(
                line,
                format!("expected header `{COMPLEX_HEADER}`, got `{other}`"),
            ))
        }
        None => return Err(syntax(1, format!("missing header `{COMPLEX_HEADER}`"))),
    }
    let mut complex = FilteredComplex::new();
    let mut seen_gen: std::collections::BTreeMap<String, usize> = Default::default();
    let mut seen_bnd: std::collections::BTreeMap<String, usize> = Default::default();
    for (line, content) in lines {
        let mut parts = content.split_whitespace();
        match parts.next() {
            Some("gen") => {
                let id = parts
                    .next()
                    .ok_or_else(|| syntax(line, "missing generator id"))?;
                let action = parse_f64(
                    parts.next().ok_or_else(|| syntax(line, "missing action"))?,
                    line,
                    "action",
                )?;
                if let Some(extra) = parts.next() {
                    return Err(syntax(line, format!("unexpected token `{extra}`")));
                }
                if seen_gen.insert(id.to_string(), line).is_some() {
                    return Err(ParseError::InvalidComplex {
                        line,
                        source: Violation::DuplicateId { id: id.to_string() },
                    });
                }
                complex.add_generator(id, action);
            }
            Some("bnd") => {
                let id = parts
                    .next()
                    .ok_or_else(|| syntax(line, "missing boundary id"))?;
                let entries: Vec<&str> = parts.collect();
                if entries.is_empty() {
                    return Err(syntax(line, "boundary needs at least one entry"));
                }
                if seen_bnd.insert(id.to_string(), line).is_some() {
                    return Err(syntax(line, format!("duplicate boundary for `{id}`")));
                }
                complex.set_boundary(id, entries);
            }
            Some(other) => {
                return Err(syntax(line, format!("expected `gen` or `bnd`, got `{other}`")))
            }
            None => continue,
        }
    }
    if let Err(violation) = complex.validate() {
        // attribute the violation to the line that declared the boundary
        // (or generator) it names
        let line = match &violation {
            Violation::DuplicateId { id } | Violation::NonFiniteAction { id } => {
                seen_gen.get(id).copied()
            }
            Violation::UnknownId { id, .. }
            | Violation::ActionNotDecreasing { id, .. }
            | Violation::BoundaryNotSquareZero { id } => seen_bnd.get(id).copied(),
        }
        .unwrap_or(1);
        return Err(ParseError::InvalidComplex {
            line,
            source: violation,
        });
    }
    Ok(complex)
}

// --- profile: `profile v1` + `rmax <v>` + `knot <r> <hprime>` ---

pub const PROFILE_HEADER: &str = "profile v1";

pub fn write_profile(profile: &ConvexProfile) -> String {
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    writeln!(out, "rmax {}", fmt_endpoint(profile.r_max())).expect("string write");
    for &(r, hp) in profile.knots() {
        writeln!(out, "knot {} {}", fmt_endpoint(r), fmt_endpoint(hp)).expect("string write");
    }
    out
}

pub fn parse_profile(text: &str) -> Result<ConvexProfile, ParseError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, header)) if header == PROFILE_HEADER => {}
        Some((line, other)) => {
            return Err(syntax(
                line,
                format!("expected header `{PROFILE_HEADER}`, got `{other}`"),
            ))
        }
        None => return Err(syntax(1, format!("missing header `{PROFILE_HEADER}`"))),
    }
    let mut rmax: Option<(usize, f64)> = None;
    let mut knots: Vec<(f64, f64)> = Vec::new();
    for (line, content) in lines {
        let mut parts = content.split_whitespace();
        match parts.next() {
            Some("rmax") => {
                let v = parse_f64(
                    parts.next().ok_or_else(|| syntax(line, "missing rmax"))?,
                    line,
                    "rmax",
                )?;
                rmax = Some((line, v));
            }
            Some("knot") => {
                let r = parse_f64(
                    parts.next().ok_or_else(|| syntax(line, "missing knot radius"))?,
                    line,
                    "radius",
                )?;
                let hp = parse_f64(
                    parts.next().ok_or_else(|| syntax(line, "missing knot h'"))?,
                    line,
                    "h'",
                )?;
                knots.push((r, hp));
            }
            Some(other) => {
                return Err(syntax(line, format!("expected `rmax` or `knot`, got `{other}`")))
            }
            None => continue,
        }
    }
    let profile = ConvexProfile::from_knots(knots)?;
    if let Some((line, v)) = rmax {
        if v != profile.r_max() {
            return Err(syntax(
                line,
                format!("rmax {v} disagrees with last knot {}", profile.r_max()),
            ));
        }
    }
    Ok(profile)
}

// --- spectrum: `spectrum v1` + `chord <length> <mult>` + `cutoff <t>` ---

pub const SPECTRUM_HEADER: &str = "spectrum v1";

pub fn write_spectrum(spectrum: &ChordSpectrum) -> String {
    let mut out = String::from(SPECTRUM_HEADER);
    out.push('\n');
    for &(length, mult) in spectrum.entries() {
        writeln!(out, "chord {} {mult}", fmt_endpoint(length)).expect("string write");
    }
    writeln!(out, "cutoff {}", fmt_endpoint(spectrum.cutoff())).expect("string write");
    out
}

pub fn parse_spectrum(text: &str) -> Result<ChordSpectrum, ParseError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, header)) if header == SPECTRUM_HEADER => {}
        Some((line, other)) => {
            return Err(syntax(
                line,
                format!("expected header `{SPECTRUM_HEADER}`, got `{other}`"),
            ))
        }
        None => return Err(syntax(1, format!("missing header `{SPECTRUM_HEADER}`"))),
    }
    let mut entries: Vec<(f64, u64)> = Vec::new();
    let mut cutoff: Option<f64> = None;
    for (line, content) in lines {
        if cutoff.is_some() {
            return Err(syntax(line, "content after `cutoff` line"));
        }
        let mut parts = content.split_whitespace();
        match parts.next() {
            Some("chord") => {
                let length = parse_f64(
                    parts.next().ok_or_else(|| syntax(line, "missing length"))?,
                    line,
                    "length",
                )?;
                let mult_token = parts
                    .next()
                    .ok_or_else(|| syntax(line, "missing multiplicity"))?;
                let mult: u64 = mult_token
                    .parse()
                    .map_err(|_| syntax(line, format!("bad multiplicity `{mult_token}`")))?;
                entries.push((length, mult));
            }
            Some("cutoff") => {
                let v = parse_f64(
                    parts.next().ok_or_else(|| syntax(line, "missing cutoff"))?,
                    line,
                    "cutoff",
                )?;
                cutoff = Some(v);
            }
            Some(other) => {
                return Err(syntax(
                    line,
                    format!("expected `chord` or `cutoff`, got `{other}`"),
                ))
            }
            None => continue,
        }
    }
    let cutoff = cutoff.ok_or_else(|| syntax(1, "missing trailing `cutoff` line"))?;
    Ok(ChordSpectrum::from_sorted(entries, cutoff)?)
}

// --- report TSVs ---

/// One header line, then one row per eps:
/// `eps  rate  window_lo  window_hi  residual`.
pub fn entropy_report_tsv(report: &EntropyReport) -> String {
    let mut out = format!("# normalization: {}\n", report.normalization.label());
    out.push_str("eps\trate\twindow_lo\twindow_hi\tresidual\n");
    for row in &report.rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            row.eps, row.rate, row.window.0, row.window.1, row.residual
        )
        .expect("string write");
    }
    out
}

/// Counts table for plotting: abscissa, then one count column per eps.
pub fn entropy_counts_tsv(report: &EntropyReport) -> String {
    let mut out = String::from("x");
    for row in &report.rows {
        write!(out, "\tn[eps={}]", row.eps).expect("string write");
    }
    out.push('\n');
    for (i, x) in report.xs.iter().enumerate() {
        write!(out, "{x}").expect("string write");
        for row in &report.rows {
            write!(out, "\t{}", row.counts[i]).expect("string write");
        }
        out.push('\n');
    }
    out
}

pub fn positive_part_tsv(report: &PositivePartReport) -> String {
    let mut out = String::from(
        "eps\tfull_rate\tpositive_rate_2eps\tpositive_rate_half_eps\tchain_holds\n",
    );
    for c in &report.chain {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            c.eps, c.full_rate, c.positive_rate_at_double, c.positive_rate_at_half, c.holds
        )
        .expect("string write");
    }
    out
}

pub fn crofton_tsv(estimates: &[CroftonEstimate]) -> String {
    let mut out = String::from("estimate\tstderr\tlength\tratio\tn_samples\tseed\n");
    for e in estimates {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            e.integral, e.std_error, e.length, e.ratio, e.n_samples, e.seed
        )
        .expect("string write");
    }
    out
}

pub fn tomograph_tsv(census: &TomographCensus) -> String {
    let mut out =
        String::from("mean_n\tmax_n\tdegenerate_fraction\tgraph_length\tn_samples\tseed\n");
    writeln!(
        out,
        "{}\t{}\t{}\t{}\t{}\t{}",
        census.mean_crossings,
        census.max_crossings,
        census.degenerate_fraction,
        census.graph_length,
        census.n_samples,
        census.seed
    )
    .expect("string write");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barcode_round_trip() {
        let barcode = Barcode::new([
            Bar::new(0.1, 2.75, 2).unwrap(),
            Bar::new(-1.0, f64::INFINITY, 1).unwrap(),
            Bar::new(1.0 / 3.0, 0.7000000001, 1).unwrap(),
        ]);
        let text = write_barcode(&barcode);
        assert_eq!(parse_barcode(&text).unwrap(), barcode);
    }

    #[test]
    fn barcode_parse_errors_carry_lines() {
        let err = parse_barcode("bar 0 1 1\nbar nope 2 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
        let err = parse_barcode("# fine\nbar 0 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
        let err = parse_barcode("line 0 1 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));
    }

    #[test]
    fn complex_round_trip() {
        let mut c = FilteredComplex::new();
        c.add_generator("a", 0.5);
        c.add_generator("b", 1.25);
        c.add_generator("z", 2.0);
        c.set_boundary("z", ["a", "b"]);
        let text = write_complex(&c);
        assert_eq!(parse_complex(&text).unwrap(), c);
    }

    #[test]
    fn complex_parser_rejections() {
        let err = parse_complex("gen a 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));

        let text = "filtered-complex v1\ngen a 1\ngen a 2\n";
        let err = parse_complex(text).unwrap_err();
        assert!(matches!(err, ParseError::InvalidComplex { line: 3, .. }));

        let text = "filtered-complex v1\ngen a 1\nbnd a ghost\n";
        let err = parse_complex(text).unwrap_err();
        assert!(
            matches!(
                &err,
                ParseError::InvalidComplex {
                    line: 3,
                    source: Violation::UnknownId { .. }
                }
            ),
            "{err:?}"
        );

        // action tie inside a boundary, attributed to the bnd line
        let text = "filtered-complex v1\ngen a 2\ngen b 2\nbnd b a\n";
        let err = parse_complex(text).unwrap_err();
        assert!(err.to_string().contains("strict action decrease"), "{err}");
        assert!(matches!(err, ParseError::InvalidComplex { line: 4, .. }));
    }

    #[test]
    fn boundary_sum_cancels_mod_two() {
        let text = "filtered-complex v1\ngen a 1\ngen b 2\nbnd b a a\n";
        let c = parse_complex(text).unwrap();
        assert!(c.boundary_of("b").is_none());
    }

    #[test]
    fn profile_round_trip() {
        let p = ConvexProfile::from_knots(vec![(1.0, 0.0), (1.5, 0.25), (2.0, 2.0)]).unwrap();
        let text = write_profile(&p);
        assert_eq!(parse_profile(&text).unwrap(), p);
        // rmax disagreement
        let bad = "profile v1\nrmax 3\nknot 1 0\nknot 2 2\n";
        assert!(parse_profile(bad).is_err());
    }

    #[test]
    fn spectrum_round_trip() {
        let s = ChordSpectrum::from_lengths([0.5, 0.5, 1.118033988749895], 1.2).unwrap();
        let text = write_spectrum(&s);
        assert_eq!(parse_spectrum(&text).unwrap(), s);
        assert!(parse_spectrum("spectrum v1\nchord 1 1\n").is_err());
        assert!(parse_spectrum("spectrum v1\ncutoff 2\nchord 1 1\n").is_err());
    }
}
