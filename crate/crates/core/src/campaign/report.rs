//! Deterministic render/parse of campaign outputs: CSV rows, summary JSON,
//! and bit-stable counterexample fixtures.
//!
//! Floats in CSV are printed with 17 significant digits, enough to
//! round-trip every f64 exactly; fixtures additionally carry the raw bit
//! patterns in hex so regression checks are immune to any formatting
//! subtlety.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stats::RetainedRow;
use super::{CampaignError, CampaignSummary};
use crate::linalg::{ComplexMatrix, DensityMatrix};

/// 17 significant digits: exact f64 round-trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const SPECTRA_CSV_HEADER: &str =
    "index,l1,l2,l3,l4,lA,lB,m1,m2,m3,m4,mA,mB,delta_min,delta_max,delta_mix,delta,delta_bar";

pub const STATE_CSV_HEADER: &str =
    "index,l1,l2,l3,l4,lA,lB,m1,m2,m3,m4,mA,mB,delta_min,delta_max,delta_mix,delta,delta_bar,delta_s";

fn push_row(out: &mut String, row: &RetainedRow, with_delta_s: bool) {
    let r = &row.report;
    let lam = r.inputs.rho.joint().sorted_desc();
    let mu = r.inputs.sigma.joint().sorted_desc();
    out.push_str(&row.index.to_string());
    for v in lam.probs() {
        out.push(',');
        out.push_str(&fmt_f64(*v));
    }
    for v in [r.inputs.rho.margin_a(), r.inputs.rho.margin_b()] {
        out.push(',');
        out.push_str(&fmt_f64(v));
    }
    for v in mu.probs() {
        out.push(',');
        out.push_str(&fmt_f64(*v));
    }
    for v in [r.inputs.sigma.margin_a(), r.inputs.sigma.margin_b()] {
        out.push(',');
        out.push_str(&fmt_f64(v));
    }
    for v in [r.delta_min, r.delta_max, r.delta_mix, r.delta, r.delta_bar] {
        out.push(',');
        out.push_str(&fmt_f64(v));
    }
    if with_delta_s {
        out.push(',');
        out.push_str(&fmt_f64(r.delta_s.unwrap_or(f64::NAN)));
    }
    out.push('\n');
}

/// CSV for spectra campaigns (no △S column).
pub fn spectra_csv(rows: &[RetainedRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 460 + 128);
    out.push_str(SPECTRA_CSV_HEADER);
    out.push('\n');
    for row in rows {
        push_row(&mut out, row, false);
    }
    out
}

/// CSV for density-matrix campaigns (△S appended).
pub fn state_csv(rows: &[RetainedRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 480 + 128);
    out.push_str(STATE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        push_row(&mut out, row, true);
    }
    out
}

/// Pretty JSON, trailing newline, deterministic field order.
pub fn summary_json(summary: &CampaignSummary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Retained rows as a JSON array (the `--format json` alternative to CSV).
pub fn rows_json(rows: &[RetainedRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

pub fn potential_counterexamples_json(list: &[super::PotentialCounterexample]) -> String {
    let mut s = serde_json::to_string_pretty(list).expect("list serializes");
    s.push('\n');
    s
}

/// A complex matrix pinned down to the bit: hex of each f64's raw bits,
/// plus decimal mirrors for human eyes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFixture {
    pub dim: usize,
    pub re_hex: Vec<String>,
    pub im_hex: Vec<String>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixFixture {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let entries = m.entries();
        Self {
            dim: m.rows(),
            re_hex: entries
                .iter()
                .map(|z| format!("{:016x}", z.re.to_bits()))
                .collect(),
            im_hex: entries
                .iter()
                .map(|z| format!("{:016x}", z.im.to_bits()))
                .collect(),
            re: entries.iter().map(|z| z.re).collect(),
            im: entries.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, CampaignError> {
        let n = self.dim;
        if self.re_hex.len() != n * n || self.im_hex.len() != n * n {
            return Err(CampaignError::Malformed(format!(
                "fixture entry count {} does not match dim {}",
                self.re_hex.len(),
                n
            )));
        }
        let parse = |hex: &str| -> Result<f64, CampaignError> {
            u64::from_str_radix(hex, 16)
                .map(f64::from_bits)
                .map_err(|e| CampaignError::Malformed(format!("bad hex float {hex}: {e}")))
        };
        let mut m = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let idx = r * n + c;
                m.set(
                    r,
                    c,
                    Complex64::new(parse(&self.re_hex[idx])?, parse(&self.im_hex[idx])?),
                );
            }
        }
        Ok(m)
    }
}

/// The best (most negative △S) pair found by a counterexample search,
/// serialized bit-exactly for regression use.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFixture {
    pub sample_index: u64,
    pub delta_s: f64,
    pub delta_s_hex: String,
    pub rho: MatrixFixture,
    pub sigma: MatrixFixture,
}

impl StateFixture {
    pub fn new(
        sample_index: u64,
        delta_s: f64,
        rho: &DensityMatrix,
        sigma: &DensityMatrix,
    ) -> Self {
        Self {
            sample_index,
            delta_s,
            delta_s_hex: format!("{:016x}", delta_s.to_bits()),
            rho: MatrixFixture::from_matrix(rho.matrix()),
            sigma: MatrixFixture::from_matrix(sigma.matrix()),
        }
    }

    /// Rebuild both states and re-evaluate △S.
    pub fn recompute(&self) -> Result<f64, CampaignError> {
        let rho = DensityMatrix::new(self.rho.to_matrix()?)?;
        let sigma = DensityMatrix::new(self.sigma.to_matrix()?)?;
        let v = crate::deltas::delta_s(&rho, &sigma)?;
        Ok(v.as_bits())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("fixture serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CampaignError> {
        serde_json::from_str(text)
            .map_err(|e| CampaignError::Malformed(format!("fixture parse error: {e}")))
    }
}

/// Parsed CSV: header names plus one f64 column per field.
#[derive(Debug, Clone)]
pub struct ParsedCsv {
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl ParsedCsv {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.header
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
    }
}

/// Parse a campaign CSV back into columns (everything as f64, including the
/// index column).
pub fn parse_csv(text: &str) -> Result<ParsedCsv, CampaignError> {
    let mut lines = text.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| CampaignError::Malformed("empty CSV".into()))?;
    let header: Vec<String> = header_line
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(CampaignError::Malformed(format!(
                "row {} has {} fields, expected {}",
                lineno + 2,
                fields.len(),
                header.len()
            )));
        }
        for (i, f) in fields.iter().enumerate() {
            let v: f64 = f.trim().parse().map_err(|e| {
                CampaignError::Malformed(format!("row {}: bad float {f}: {e}", lineno + 2))
            })?;
            columns[i].push(v);
        }
    }
    Ok(ParsedCsv { header, columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deltas::compute_deltas;
    use crate::entropy::Spectrum;
    use crate::marginal::QubitMarginTriple;

    #[test]
    fn f64_formatting_round_trips_exactly() {
        for v in [0.1, 1.0 / 3.0, 2.0_f64.sqrt(), -1e-13, 0.5208333333333333] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_round_trip_recomputes() {
        let rho = QubitMarginTriple::new(
            Spectrum::new(vec![0.5, 0.25, 0.15, 0.1]).unwrap(),
            0.28,
            0.33,
        )
        .unwrap();
        let sigma = QubitMarginTriple::new(
            Spectrum::new(vec![0.45, 0.3, 0.15, 0.1]).unwrap(),
            0.3,
            0.27,
        )
        .unwrap();
        let report = compute_deltas(&rho, &sigma).unwrap();
        let rows = vec![RetainedRow { index: 3, report }];
        let csv = spectra_csv(&rows);
        let parsed = parse_csv(&csv).unwrap();

        let l: Vec<f64> = (1..=4)
            .map(|i| parsed.column(&format!("l{i}")).unwrap()[0])
            .collect();
        let m: Vec<f64> = (1..=4)
            .map(|i| parsed.column(&format!("m{i}")).unwrap()[0])
            .collect();
        let rho2 = QubitMarginTriple::new(
            Spectrum::new(l).unwrap(),
            parsed.column("lA").unwrap()[0],
            parsed.column("lB").unwrap()[0],
        )
        .unwrap();
        let sigma2 = QubitMarginTriple::new(
            Spectrum::new(m).unwrap(),
            parsed.column("mA").unwrap()[0],
            parsed.column("mB").unwrap()[0],
        )
        .unwrap();
        let again = compute_deltas(&rho2, &sigma2).unwrap();
        assert!((again.delta - parsed.column("delta").unwrap()[0]).abs() <= 1e-12);
        assert!((again.delta_bar - parsed.column("delta_bar").unwrap()[0]).abs() <= 1e-12);
    }

    #[test]
    fn fixture_round_trip_is_bit_exact() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
        let rho = DensityMatrix::ginibre(4, &mut rng);
        let sigma = DensityMatrix::ginibre_full_rank(4, &mut rng, 1e-12);
        let ds = crate::deltas::delta_s(&rho, &sigma).unwrap().as_bits();
        let fix = StateFixture::new(5, ds, &rho, &sigma);
        let json = fix.to_json();
        let back = StateFixture::from_json(&json).unwrap();
        let recomputed = back.recompute().unwrap();
        assert_eq!(recomputed.to_bits(), ds.to_bits());
    }
}
