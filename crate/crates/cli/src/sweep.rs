//! Grid evaluation and CSV rows.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use cvmdi_core::calibration::{resolve_parameters, sampled_estimates, trusted_setup};
use cvmdi_core::keyrate::evaluate;
use cvmdi_core::{CaseId, Error, KeyRateBreakdown, PeMode, RinModel, Scenario};
use rayon::prelude::*;

use crate::error::CliError;

pub const HEADER: &str = "case,l_ac_km,l_bc_km,eta_m,v_rin,mode,i_ab,chi_ae,delta_n,rate_bits_per_use,status";

/// How the estimated and realistic rates are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum RinComparison {
    /// Model parameters substituted directly into the key-rate formula.
    #[default]
    Substitution,
    /// Each model's estimation data is simulated and re-estimated first;
    /// parameter estimation is then taken as ideal.
    SampleLevel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Nonpositive,
    Skipped,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Nonpositive => "nonpositive",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub case: CaseId,
    pub l_ac_km: f64,
    pub l_bc_km: f64,
    /// Monitor tap transmittance in use; 1 when the case has no monitor.
    pub eta_m: f64,
    pub v_rin: f64,
    pub mode: RinModel,
    pub i_ab: f64,
    pub chi_ae: f64,
    pub delta_n: f64,
    pub rate: f64,
    pub status: Status,
}

impl SweepRow {
    pub fn csv(&self) -> String {
        let mut s = format!("{},", self.case);
        for v in [self.l_ac_km, self.l_bc_km, self.eta_m, self.v_rin] {
            write!(s, "{v:.10e},").unwrap();
        }
        write!(s, "{},", self.mode).unwrap();
        for v in [self.i_ab, self.chi_ae, self.delta_n, self.rate] {
            write!(s, "{v:.10e},").unwrap();
        }
        s.push_str(self.status.as_str());
        s
    }
}

/// One grid point: a case, a total distance and the model to evaluate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub scenario: Scenario,
    pub case: CaseId,
    pub l_ab_km: f64,
    pub mode: RinModel,
}

impl Point {
    /// Sets the monitor tap on both sides.
    pub fn with_eta_m(mut self, eta_m: f64) -> Self {
        self.scenario.params.eta_m_alice = eta_m;
        self.scenario.params.eta_m_bob = eta_m;
        self
    }
}

/// Evaluation settings shared by every point of one run.
#[derive(Clone, Copy, Debug)]
pub struct Evaluator {
    pub comparison: RinComparison,
    pub samples: u64,
    pub seed: u64,
}

impl Evaluator {
    pub fn substitution() -> Self {
        Evaluator { comparison: RinComparison::Substitution, samples: 0, seed: 0 }
    }

    /// `index` decorrelates the sample-level streams of different points.
    pub fn row(&self, point: &Point, index: usize) -> Result<SweepRow, CliError> {
        let sc = &point.scenario;
        let (l_ac_km, l_bc_km) = sc.geometry.split(point.l_ab_km);
        let (t_m, t_k) = point.case.taps(sc.params.eta_m_alice, sc.params.eta_m_bob);
        let eta_m = if point.case.monitors_alice() { t_m } else { t_k };
        let outcome = match self.comparison {
            RinComparison::Substitution => sc.rate(point.case, point.l_ab_km, point.mode),
            RinComparison::SampleLevel => self.sampled(point, index),
        };
        let base = SweepRow {
            case: point.case,
            l_ac_km,
            l_bc_km,
            eta_m,
            v_rin: sc.params.v_rin,
            mode: point.mode,
            i_ab: f64::NAN,
            chi_ae: f64::NAN,
            delta_n: f64::NAN,
            rate: f64::NAN,
            status: Status::Skipped,
        };
        match outcome {
            Ok(r) => Ok(SweepRow {
                i_ab: r.i_ab,
                chi_ae: r.chi_ae,
                delta_n: r.delta_n,
                rate: r.rate,
                status: if r.is_positive() { Status::Ok } else { Status::Nonpositive },
                ..base
            }),
            // Estimates that admit no physical parameter set leave the point empty.
            Err(Error::Estimation(_)) => Ok(base),
            Err(e) => Err(e.into()),
        }
    }

    fn sampled(&self, point: &Point, index: usize) -> Result<KeyRateBreakdown, Error> {
        let sc = &point.scenario;
        let channel = sc.channel_at(point.l_ab_km)?;
        let base = trusted_setup(point.case, &sc.params, point.mode)?;
        let seed = self.seed.wrapping_add(index as u64);
        let est = sampled_estimates(point.case, &base, &channel, self.samples, seed)?;
        let (setup, ch) = resolve_parameters(point.case, &est, &base)?;
        evaluate(point.case, &setup, &ch, &ch.attack(sc.attack)?, sc.params.xi, &sc.fs, PeMode::Ideal)
    }

    /// Evaluates every point in parallel; rows keep the order of `points`.
    pub fn rows(&self, points: &[Point]) -> Result<Vec<SweepRow>, CliError> {
        points.par_iter().enumerate().map(|(i, p)| self.row(p, i)).collect()
    }
}

/// `from, from + step, ...` up to and including `to` (within rounding).
pub fn inclusive_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) {
        return Err(CliError::Config("grid bounds must be finite".into()));
    }
    if !(step > 0.0) {
        return Err(CliError::Config(format!("grid step must be > 0, got {step}")));
    }
    if to < from {
        return Err(CliError::Config(format!("empty grid: from {from} is above to {to}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

pub fn render(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(128 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv());
        out.push('\n');
    }
    out
}

/// Writes to `path`, or to standard output when absent.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
            }
            fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source })
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_endpoint() {
        assert_eq!(inclusive_grid(2.0, 50.0, 0.5).unwrap().len(), 97);
        assert_eq!(inclusive_grid(0.1, 0.3, 0.1).unwrap().len(), 3);
        assert_eq!(inclusive_grid(5.0, 5.0, 1.0).unwrap(), vec![5.0]);
        assert!(inclusive_grid(3.0, 2.0, 0.5).is_err());
        assert!(inclusive_grid(2.0, 3.0, 0.0).is_err());
    }

    #[test]
    fn row_format() {
        let point =
            Point { scenario: Scenario::default(), case: CaseId::Both, l_ab_km: 10.0, mode: RinModel::Realistic };
        let row = Evaluator::substitution().row(&point, 0).unwrap();
        let line = row.csv();
        assert_eq!(line.split(',').count(), HEADER.split(',').count());
        assert!(line.starts_with("both,0.0000000000e0,1.0000000000e1,9.0000000000e-1,"));
        assert!(line.ends_with(",ok"));
        assert_eq!(row.rate, point.scenario.rate(CaseId::Both, 10.0, RinModel::Realistic).unwrap().rate);
    }
}
