use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use crate::error::{Error, Result};
use crate::models::{Signal, SupportSummary};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// `‖x_i − x_{i−1}‖ ≤ η‖x_i‖`.
    Converged,
    MaxIterations,
    /// Objective became non-finite or exceeded the blow-up threshold.
    Diverged,
}

/// One iterate and its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct IterationRecord<T> {
    pub iter: usize,
    pub x: Signal<T>,
    pub support: SupportSummary,
    pub f_value: T,
    /// `‖x_i − x_{i−1}‖`.
    pub step_norm: T,
    pub dist_to_truth: Option<T>,
}

/// The scalar part of a record, as written to CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TraceRow<T> {
    pub iter: usize,
    pub f_value: T,
    pub step_norm: T,
    pub dist_to_truth: Option<T>,
    pub support: SupportSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolverTrace<T> {
    /// Record 0 is the starting point `x₀ = 0`.
    pub records: Vec<IterationRecord<T>>,
    pub termination: Termination,
    pub config: SolverConfig<T>,
    /// The constant step used, when the step is not line-searched.
    pub mu: Option<T>,
    pub warnings: Vec<String>,
    /// Iterations at which the debias solve was skipped (rank deficiency).
    pub debias_skipped: Vec<usize>,
    pub wall_time_secs: f64,
}

/// Encodes a support for the CSV `support` column, 1-based:
/// `1;4;7` for entries, `g1;g3` for groups (`g` when empty), `r3` for a rank.
pub fn encode_support(s: &SupportSummary) -> String {
    let join = |v: &[usize], p: &str| {
        v.iter()
            .map(|i| format!("{p}{}", i + 1))
            .collect::<Vec<_>>()
            .join(";")
    };
    match s {
        SupportSummary::Indices(v) => join(v, ""),
        SupportSummary::Groups(v) if v.is_empty() => "g".into(),
        SupportSummary::Groups(v) => join(v, "g"),
        SupportSummary::Rank(r) => format!("r{r}"),
    }
}

pub fn decode_support(text: &str) -> Result<SupportSummary> {
    let bad = || Error::Parse(format!("invalid support field {text:?}"));
    let one_based = |tok: &str| -> Result<usize> {
        match tok.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(i - 1),
            _ => Err(bad()),
        }
    };
    let text = text.trim();
    if let Some(r) = text.strip_prefix('r') {
        return r.parse().map(SupportSummary::Rank).map_err(|_| bad());
    }
    if text == "g" {
        return Ok(SupportSummary::Groups(Vec::new()));
    }
    if text.is_empty() {
        return Ok(SupportSummary::Indices(Vec::new()));
    }
    if text.starts_with('g') {
        let ids = text
            .split(';')
            .map(|t| t.strip_prefix('g').ok_or_else(bad).and_then(one_based))
            .collect::<Result<_>>()?;
        return Ok(SupportSummary::Groups(ids));
    }
    Ok(SupportSummary::Indices(
        text.split(';').map(one_based).collect::<Result<_>>()?,
    ))
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct CsvRow<T> {
    iter: usize,
    f_value: T,
    step_norm: T,
    dist_to_truth: Option<T>,
    support: String,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

impl<T: Scalar> SolverTrace<T> {
    /// Number of iterations performed (records after the starting point).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_x(&self) -> &Signal<T> {
        &self.records.last().expect("trace holds the starting point").x
    }

    pub fn final_record(&self) -> &IterationRecord<T> {
        self.records.last().expect("trace holds the starting point")
    }

    pub fn f_values(&self) -> Vec<T> {
        self.records.iter().map(|r| r.f_value).collect()
    }

    pub fn diverged(&self) -> bool {
        self.termination == Termination::Diverged
    }

    pub fn rows(&self) -> Vec<TraceRow<T>> {
        self.records
            .iter()
            .map(|r| TraceRow {
                iter: r.iter,
                f_value: r.f_value,
                step_norm: r.step_norm,
                dist_to_truth: r.dist_to_truth,
                support: r.support.clone(),
            })
            .collect()
    }

    /// CSV with header `iter,f_value,step_norm,dist_to_truth,support`.
    pub fn to_csv(&self) -> Result<String> {
        write_csv(&self.rows())
    }

    /// Summary mirroring the CSV rows plus the configuration and termination
    /// (timing excluded, so reruns give identical output).
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = self
            .rows()
            .into_iter()
            .map(|r| {
                serde_json::json!({
                    "iter": r.iter,
                    "f_value": r.f_value,
                    "step_norm": r.step_norm,
                    "dist_to_truth": r.dist_to_truth,
                    "support": encode_support(&r.support),
                })
            })
            .collect();
        serde_json::json!({
            "config": self.config,
            "termination": self.termination,
            "iterations": self.iterations(),
            "mu": self.mu,
            "warnings": self.warnings,
            "debias_skipped": self.debias_skipped,
            "final_f_value": self.final_record().f_value,
            "rows": rows,
        })
    }
}

pub fn write_csv<T: Scalar>(rows: &[TraceRow<T>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(CsvRow {
            iter: r.iter,
            f_value: r.f_value,
            step_norm: r.step_norm,
            dist_to_truth: r.dist_to_truth,
            support: encode_support(&r.support),
        })
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_csv<T: Scalar>(text: &str) -> Result<Vec<TraceRow<T>>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize::<CsvRow<T>>()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            Ok(TraceRow {
                iter: row.iter,
                f_value: row.f_value,
                step_norm: row.step_norm,
                dist_to_truth: row.dist_to_truth,
                support: decode_support(&row.support)?,
            })
        })
        .collect()
}
