//! Text, CSV and JSON renderings of angle tables, probability reports and histograms.
//!
//! Reals are written with 17 significant digits so every value round-trips.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::angles::AngleTree;
use crate::distribution::{MassTree, Word};
use crate::error::{Error, Result};
use crate::simulator::{Histogram, GENERATOR_ID};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Text => "txt",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Validation(format!("unknown format '{s}' (expected text, csv or json)"))),
        }
    }
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialise");
    s.push('\n');
    s
}

/// Rows `word, p_w, theta` for every word of length `< n`.
pub fn angle_table(masses: &MassTree, angles: &AngleTree, format: OutputFormat) -> String {
    let rows: Vec<(Word, f64, f64)> = angles.iter().map(|(w, t)| (w, masses.mass(&w), t)).collect();
    match format {
        OutputFormat::Text => {
            let mut out = String::new();
            writeln!(
                out,
                "# n = {}; angles in the R(theta) convention, R(theta)|0> = cos(theta)|0> + sin(theta)|1>",
                angles.n()
            )
            .unwrap();
            writeln!(out, "{:<w$}  {:>24}  {:>24}", "word", "p_w", "theta_radians", w = word_width(angles)).unwrap();
            for (w, p, t) in rows {
                writeln!(
                    out,
                    "{:<width$}  {:>24}  {:>24}",
                    w.to_string(),
                    real(p),
                    real(t),
                    width = word_width(angles)
                )
                .unwrap();
            }
            out
        }
        OutputFormat::Csv => {
            let mut out = String::from("word,p_w,theta_radians\n");
            for (w, p, t) in rows {
                writeln!(out, "{w},{},{}", real(p), real(t)).unwrap();
            }
            out
        }
        OutputFormat::Json => {
            let mut map = Map::new();
            for (w, p, t) in rows {
                map.insert(w.to_string(), json!({ "p_w": p, "theta_radians": t }));
            }
            to_json(&json!({ "n": angles.n(), "convention": "R(theta) = R_y(2 theta)", "angles": map }))
        }
    }
}

fn word_width(angles: &AngleTree) -> usize {
    (angles.n() as usize).max(4)
}

/// Target vs simulated outcome probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityReport {
    pub n: u32,
    pub target: Vec<f64>,
    pub simulated: Vec<f64>,
    pub tol: f64,
}

impl ProbabilityReport {
    pub fn errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.target.iter().zip(&self.simulated).map(|(t, s)| (t - s).abs())
    }

    /// `(k, |error|)` of the worst outcome.
    pub fn worst(&self) -> (usize, f64) {
        self.errors().enumerate().fold((0, 0.0), |best, (k, e)| if e > best.1 { (k, e) } else { best })
    }

    pub fn passed(&self) -> bool {
        self.worst().1 <= self.tol
    }

    pub fn render(&self, format: OutputFormat) -> String {
        let (worst_k, worst) = self.worst();
        let word = |k: usize| Word::new(k as u64, self.n).unwrap().to_string();
        match format {
            OutputFormat::Text | OutputFormat::Csv => {
                let mut out = String::new();
                writeln!(out, "# max_abs_error = {} at k = {worst_k}", real(worst)).unwrap();
                writeln!(out, "# tolerance = {}", real(self.tol)).unwrap();
                writeln!(out, "k,word,p_target,p_simulated,abs_error").unwrap();
                for (k, ((t, s), e)) in self.target.iter().zip(&self.simulated).zip(self.errors()).enumerate() {
                    writeln!(out, "{k},{},{},{},{}", word(k), real(*t), real(*s), real(e)).unwrap();
                }
                out
            }
            OutputFormat::Json => {
                let rows: Vec<Value> = self
                    .target
                    .iter()
                    .zip(&self.simulated)
                    .zip(self.errors())
                    .enumerate()
                    .map(|(k, ((t, s), e))| json!({ "k": k, "word": word(k), "p_target": t, "p_simulated": s, "abs_error": e }))
                    .collect();
                to_json(&json!({
                    "n": self.n,
                    "tolerance": self.tol,
                    "max_abs_error": worst,
                    "worst_k": worst_k,
                    "rows": rows,
                }))
            }
        }
    }
}

/// CSV histogram; the seed and generator are recorded in header comments.
pub fn histogram_csv(h: &Histogram, n: u32) -> String {
    let mut out = String::new();
    writeln!(out, "# seed = {}", h.seed).unwrap();
    writeln!(out, "# generator = {GENERATOR_ID}").unwrap();
    writeln!(out, "# shots = {}", h.shots).unwrap();
    writeln!(out, "k,word,count,frequency").unwrap();
    for (k, (count, freq)) in h.counts.iter().zip(h.frequencies()).enumerate() {
        let w = Word::new(k as u64, n).unwrap();
        writeln!(out, "{k},{w},{count},{}", real(freq)).unwrap();
    }
    out
}
