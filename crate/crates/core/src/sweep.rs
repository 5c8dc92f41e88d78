//! Parameter sweeps emitted as CSV.

use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bell::analytic_bell;
use crate::error::{Error, Result};
use crate::feasibility::deviation;
use crate::measures::{concurrence_det, entanglement_entropy};
use crate::schmidt::{schmidt_decompose, schmidt_eigenvalues};
use crate::state::from_moduli;

pub const CSV_HEADER: &str = "abs_x,abs_y,abs_x_sq,abs_y_sq,eta,mu_sq,abs_nu,valid,\
lambda_plus,lambda_minus,bell_analytic,d,concurrence,entropy_bits";

const MAX_ROWS: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    AbsX,
    AbsY,
    AbsXSq,
    AbsYSq,
    Eta,
    MuSq,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "abs_x" => SweepParam::AbsX,
            "abs_y" => SweepParam::AbsY,
            "abs_x_sq" => SweepParam::AbsXSq,
            "abs_y_sq" => SweepParam::AbsYSq,
            "eta" => SweepParam::Eta,
            "mu_sq" => SweepParam::MuSq,
            other => return Err(Error::InvalidSweep(format!("unknown parameter '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepRange {
    pub fn value(&self, i: usize) -> f64 {
        self.start + (self.stop - self.start) * i as f64 / (self.steps - 1) as f64
    }
}

impl FromStr for SweepRange {
    type Err = Error;

    /// `name=start:stop:steps`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSweep(format!("expected name=start:stop:steps, got '{s}'"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, steps] = parts.as_slice() else {
            return Err(bad());
        };
        Ok(SweepRange {
            param: name.trim().parse()?,
            start: start.trim().parse().map_err(|_| bad())?,
            stop: stop.trim().parse().map_err(|_| bad())?,
            steps: steps.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Values used for parameters that are not swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedValues {
    pub abs_x: f64,
    pub abs_y: f64,
    pub eta: f64,
    pub mu_sq: f64,
}

impl Default for FixedValues {
    fn default() -> Self {
        FixedValues {
            abs_x: 0.0,
            abs_y: 0.0,
            eta: PI,
            mu_sq: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub ranges: Vec<SweepRange>,
    pub fixed: FixedValues,
}

fn same_slot(a: SweepParam, b: SweepParam) -> bool {
    use SweepParam::*;
    matches!(
        (a, b),
        (AbsX | AbsXSq, AbsX | AbsXSq) | (AbsY | AbsYSq, AbsY | AbsYSq) | (Eta, Eta) | (MuSq, MuSq)
    )
}

fn check_value(param: SweepParam, v: f64) -> Result<()> {
    let ok = match param {
        SweepParam::AbsX | SweepParam::AbsY | SweepParam::AbsXSq | SweepParam::AbsYSq => {
            (0.0..1.0).contains(&v)
        }
        SweepParam::Eta => v.is_finite(),
        SweepParam::MuSq => v > 0.0 && v.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidSweep(format!(
            "{param:?} value {v} outside its domain"
        )))
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.ranges.is_empty() {
            return Err(Error::InvalidSweep("no parameter to sweep".into()));
        }
        let mut rows: usize = 1;
        for (i, r) in self.ranges.iter().enumerate() {
            if r.steps < 2 {
                return Err(Error::InvalidSweep(format!(
                    "{:?}: steps must be >= 2",
                    r.param
                )));
            }
            if r.start.is_nan() || r.stop.is_nan() || r.start >= r.stop {
                return Err(Error::InvalidSweep(format!(
                    "{:?}: empty range {}..{}",
                    r.param, r.start, r.stop
                )));
            }
            check_value(r.param, r.start)?;
            check_value(r.param, r.stop)?;
            if self.ranges[..i].iter().any(|o| same_slot(o.param, r.param)) {
                return Err(Error::InvalidSweep(format!("{:?} swept twice", r.param)));
            }
            rows = rows.saturating_mul(r.steps);
        }
        if rows > MAX_ROWS {
            return Err(Error::InvalidSweep(format!(
                "{rows} rows exceed the limit {MAX_ROWS}"
            )));
        }
        let f = self.fixed;
        check_value(SweepParam::AbsX, f.abs_x)?;
        check_value(SweepParam::AbsY, f.abs_y)?;
        check_value(SweepParam::Eta, f.eta)?;
        check_value(SweepParam::MuSq, f.mu_sq)?;
        Ok(())
    }

    pub fn row_count(&self) -> usize {
        self.ranges.iter().map(|r| r.steps).product()
    }

    /// Parameter values of row `k`; the first range varies slowest.
    fn point(&self, mut k: usize) -> FixedValues {
        let mut p = self.fixed;
        for r in self.ranges.iter().rev() {
            let v = r.value(k % r.steps);
            k /= r.steps;
            match r.param {
                SweepParam::AbsX => p.abs_x = v,
                SweepParam::AbsY => p.abs_y = v,
                SweepParam::AbsXSq => p.abs_x = v.sqrt(),
                SweepParam::AbsYSq => p.abs_y = v.sqrt(),
                SweepParam::Eta => p.eta = v,
                SweepParam::MuSq => p.mu_sq = v,
            }
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub abs_x: f64,
    pub abs_y: f64,
    pub eta: f64,
    pub mu_sq: f64,
    /// Report scalars; `None` when no normalized state exists at this point.
    pub values: Option<RowValues>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowValues {
    pub abs_nu: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub bell_analytic: f64,
    pub d: f64,
    pub concurrence: f64,
    pub entropy_bits: f64,
}

fn evaluate(p: FixedValues) -> Option<RowValues> {
    let abs_mu = p.mu_sq.sqrt();
    // Root continuing the unique solution |nu| = sqrt(1 - |mu|^2) of the
    // orthogonal case.
    let c = abs_mu * p.abs_x * p.abs_y * p.eta.cos();
    let disc = c * c - (p.mu_sq - 1.0);
    if disc < 0.0 {
        return None;
    }
    let abs_nu = -c + disc.sqrt();
    if abs_nu < 0.0 {
        return None;
    }
    let state = from_moduli(abs_mu, abs_nu, p.abs_x, p.abs_y, p.eta, true).ok()?;
    let form = schmidt_decompose(&state);
    let (lambda_plus, lambda_minus) = schmidt_eigenvalues(&state);
    let concurrence = concurrence_det(&state);
    Some(RowValues {
        abs_nu,
        lambda_plus,
        lambda_minus,
        bell_analytic: analytic_bell(&form),
        d: deviation(&form).value(),
        concurrence,
        entropy_bits: entanglement_entropy(concurrence),
    })
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    Ok((0..spec.row_count())
        .into_par_iter()
        .map(|k| {
            let p = spec.point(k);
            SweepRow {
                abs_x: p.abs_x,
                abs_y: p.abs_y,
                eta: p.eta,
                mu_sq: p.mu_sq,
                values: evaluate(p),
            }
        })
        .collect())
}

/// Formats with 12 significant digits, then prints the shortest
/// representation of the rounded value.
pub fn fmt_sig12(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{rounded}")
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let lead = [
            r.abs_x,
            r.abs_y,
            r.abs_x * r.abs_x,
            r.abs_y * r.abs_y,
            r.eta,
            r.mu_sq,
        ];
        let lead: Vec<String> = lead.iter().map(|&v| fmt_sig12(v)).collect();
        out.push_str(&lead.join(","));
        match r.values {
            Some(v) => {
                let tail = [
                    v.lambda_plus,
                    v.lambda_minus,
                    v.bell_analytic,
                    v.d,
                    v.concurrence,
                    v.entropy_bits,
                ];
                let tail: Vec<String> = tail.iter().map(|&x| fmt_sig12(x)).collect();
                let _ = write!(out, ",{},true,{}", fmt_sig12(v.abs_nu), tail.join(","));
            }
            None => out.push_str(",,false,,,,,,"),
        }
        out.push('\n');
    }
    out
}
