//! Monte Carlo parameter-estimation run with a text report.

use std::fmt::Write as _;

use cvmdi_core::calibration::{
    estimates_from_stats, invert_monitor, pool_estimates, scan_coupled_params, simulate_channel_stats,
    simulate_monitor_stats, stream_rng, trusted_setup, ChannelModel, MonitorStats, RegressionStats, ScanGrid,
};
use cvmdi_core::keyrate::{evaluate, worst_case_adjust};
use cvmdi_core::protocol::{eps_s_from_v_s, Side};
use cvmdi_core::{CaseId, EstimationResult, PeMode, RinModel, Scenario};
use rayon::prelude::*;

use crate::error::CliError;

/// Samples drawn per worker stream.
const CHUNK: u64 = 1 << 16;

pub const MIN_SAMPLES: u64 = 100;

pub struct Report {
    pub text: String,
    pub csv: String,
}

/// Simulates `samples` estimation symbols at `l_ab_km` under the RIN-aware
/// model, estimates every observable and compares ideal and worst-case rates.
pub fn run(sc: &Scenario, case: CaseId, l_ab_km: f64, samples: u64, seed: u64) -> Result<Report, CliError> {
    if samples < MIN_SAMPLES {
        return Err(CliError::Config(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let setup = trusted_setup(case, &sc.params, RinModel::Realistic)?;
    let channel = sc.channel_at(l_ab_km)?;
    let model = ChannelModel::new(&setup, &channel);
    let sides: Vec<Side> = [(case.monitors_alice(), Side::A), (case.monitors_bob(), Side::B)]
        .into_iter()
        .filter_map(|(on, s)| on.then_some(s))
        .collect();

    // Chunk k uses streams 3k (channel), 3k + 1 (side A) and 3k + 2 (side B).
    // Samples are spread evenly so no chunk is too small to regress.
    let chunks = samples.div_ceil(CHUNK);
    let (per, extra) = (samples / chunks, samples % chunks);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let n = per + u64::from(k < extra);
            let ch = simulate_channel_stats(&model, n, &mut stream_rng(seed, 3 * k))?;
            let mut mon = [MonitorStats::default(); 2];
            for &side in &sides {
                mon[side as usize] =
                    simulate_monitor_stats(&setup, side, n, &mut stream_rng(seed, 3 * k + 1 + side as u64))?;
            }
            Ok((ch, mon))
        })
        .collect::<Result<Vec<_>, cvmdi_core::Error>>()?;

    let mut ch = [RegressionStats::default(); 2];
    let mut mon = [MonitorStats::default(); 2];
    for (c, m) in &parts {
        ch[0].merge(&c[0]);
        ch[1].merge(&c[1]);
        mon[0].merge(&m[0]);
        mon[1].merge(&m[1]);
    }
    let mut est = estimates_from_stats(&ch)?;
    let eps = sides.iter().map(|&s| invert_monitor(&mon[s as usize], setup.v)).collect::<Result<Vec<_>, _>>()?;
    est.eps_s = pool_estimates(&eps);

    let truth = evaluate(case, &setup, &channel, &channel.attack(sc.attack)?, sc.params.xi, &sc.fs, PeMode::Ideal)?;
    let grid = ScanGrid::default();
    let scan =
        |e: &EstimationResult, mode| scan_coupled_params(case, e, &setup, &grid, sc.attack, sc.params.xi, &sc.fs, mode);
    let ideal = scan(&est, PeMode::Ideal)?;
    let worst = scan(&worst_case_adjust(&est, sc.fs.eps_pe)?, PeMode::WorstCase)?;

    let true_eps_s = eps_s_from_v_s(setup.t_s, setup.v_s);
    let rows: Vec<(&str, f64, Option<cvmdi_core::Estimate>)> = vec![
        ("t1", model.t1, Some(est.t1)),
        ("t2", model.t2, Some(est.t2)),
        ("sigma1_sq", model.sigma1_sq, Some(est.sigma1_sq)),
        ("sigma2_sq", model.sigma2_sq, Some(est.sigma2_sq)),
        ("eps_s", true_eps_s, est.eps_s),
    ];

    let mut text = String::new();
    writeln!(text, "case {case}, {} geometry, L_AB = {l_ab_km} km", sc.geometry).unwrap();
    writeln!(text, "samples {samples}, seed {seed}").unwrap();
    writeln!(text, "{:<10} {:>16} {:>16} {:>16}", "quantity", "true", "estimate", "std_error").unwrap();
    let mut csv = String::from("quantity,true_value,estimate,std_error\n");
    for (name, t, e) in &rows {
        match e {
            Some(e) => {
                writeln!(text, "{name:<10} {t:>16.9e} {:>16.9e} {:>16.9e}", e.value, e.std_error).unwrap();
                writeln!(csv, "{name},{t:.10e},{:.10e},{:.10e}", e.value, e.std_error).unwrap();
            }
            None => {
                writeln!(text, "{name:<10} {t:>16.9e} {:>16} {:>16}", "unmonitored", "-").unwrap();
                writeln!(csv, "{name},{t:.10e},NaN,NaN").unwrap();
            }
        }
    }
    writeln!(text, "rate at true parameters   {:.9e} bits/use", truth.rate).unwrap();
    writeln!(text, "rate, ideal estimation    {:.9e} bits/use (T_S = {:.4})", ideal.rate.rate, ideal.t_s).unwrap();
    writeln!(text, "rate, worst-case estimate {:.9e} bits/use (T_S = {:.4})", worst.rate.rate, worst.t_s).unwrap();
    for (name, r) in [("true_rate", truth.rate), ("ideal_rate", ideal.rate.rate), ("worst_case_rate", worst.rate.rate)]
    {
        writeln!(csv, "{name},NaN,{r:.10e},NaN").unwrap();
    }
    Ok(Report { text, csv })
}
