//! Shot-noise calibration, the RIN mis-calibration model, parameter
//! estimation on synthetic data and the estimated-versus-realistic rate gap.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{AttackModel, ChannelParams};
use crate::error::{Error, Result};
use crate::keyrate::{evaluate, rate_with_model, FiniteSizeParams, KeyRateBreakdown, PeMode};
use crate::protocol::{v_s_from_eps_s, CaseId, ProtocolParams, Side, TrustedSetup};

/// Detector-output variances in units of the original shot noise `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationModel {
    pub u: f64,
    pub v_el_raw: f64,
    pub v_rin: f64,
}

impl CalibrationModel {
    pub fn new(u: f64, v_el_raw: f64, v_rin: f64) -> Result<Self> {
        if !(u > 0.0) {
            return Err(Error::invalid("u", u, "must be > 0"));
        }
        if !(v_el_raw >= 0.0) {
            return Err(Error::invalid("v_el", v_el_raw, "must be >= 0"));
        }
        if !(v_rin >= 0.0) {
            return Err(Error::invalid("v_rin", v_rin, "must be >= 0"));
        }
        Ok(CalibrationModel { u, v_el_raw, v_rin })
    }

    /// Total output variance, used as the new shot-noise unit.
    pub fn u_prime(&self) -> f64 {
        self.u + self.v_el_raw + self.v_rin
    }

    /// The unit seen by users who ignore RIN: total minus electronic noise.
    pub fn u_bar(&self) -> f64 {
        self.u + self.v_rin
    }

    pub fn m(&self) -> f64 {
        1.0 + self.v_rin / self.u
    }

    pub fn eta_e(&self) -> f64 {
        self.u / self.u_prime()
    }
}

/// `u / (u + v_el + v_rin)`: electronic noise and RIN folded into one loss.
pub fn eta_e(u: f64, v_el: f64, v_rin: f64) -> Result<f64> {
    Ok(CalibrationModel::new(u, v_el, v_rin)?.eta_e())
}

/// `m = 1 + v_rin / u`.
pub fn miscalibration_factor(u: f64, v_rin: f64) -> Result<f64> {
    Ok(CalibrationModel::new(u, 0.0, v_rin)?.m())
}

/// `x' = sqrt(1/m) x + sqrt(1 - 1/m) v` with fresh standard normal `v`, so
/// variances map as `Var -> Var / m + 1 - 1/m`.
pub fn apply_rin_transform<R: Rng + ?Sized>(samples: &[f64], m: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(m >= 1.0) || !m.is_finite() {
        return Err(Error::invalid("m", m, "must be finite and >= 1"));
    }
    if m == 1.0 {
        return Ok(samples.to_vec());
    }
    let (a, b) = ((1.0 / m).sqrt(), (1.0 - 1.0 / m).sqrt());
    Ok(samples.iter().map(|&x| a * x + b * rng.sample::<f64, _>(StandardNormal)).collect())
}

/// Independent generator for stream `stream` under root seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Whether the users' model includes RIN.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RinModel {
    /// Source variance `V_S + V_RIN` and `eta_e` including RIN.
    #[default]
    Realistic,
    /// Source variance `V_S` and `eta_e` from electronic noise alone.
    Estimated,
}

impl RinModel {
    pub fn name(self) -> &'static str {
        match self {
            RinModel::Realistic => "realistic",
            RinModel::Estimated => "estimated",
        }
    }
}

impl fmt::Display for RinModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RinModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "realistic" => Ok(RinModel::Realistic),
            "estimated" => Ok(RinModel::Estimated),
            _ => Err(Error::Contract(format!("unknown rin mode `{s}`"))),
        }
    }
}

/// Trusted hardware description for `case` under `rin`. RIN is a property
/// of the lasers, so it raises the source noise on both sides.
pub fn trusted_setup(case: CaseId, params: &ProtocolParams, rin: RinModel) -> Result<TrustedSetup> {
    params.validate()?;
    let (t_m, t_k) = case.taps(params.eta_m_alice, params.eta_m_bob);
    let (v_s, eta_e) = match rin {
        RinModel::Realistic => (params.v_s + params.v_rin, eta_e(1.0, params.v_el, params.v_rin)?),
        RinModel::Estimated => (params.v_s, eta_e(1.0, params.v_el, 0.0)?),
    };
    let setup = TrustedSetup { v: params.v_mod + 1.0, t_s: params.t_s, v_s, t_m, t_k, eta_d: params.eta_d, eta_e };
    setup.validate()?;
    Ok(setup)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, std_error: 0.0 }
    }
}

/// Channel and source-noise estimates with standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimationResult {
    pub t1: Estimate,
    pub t2: Estimate,
    pub sigma1_sq: Estimate,
    pub sigma2_sq: Estimate,
    /// Absent when no side monitors its source.
    pub eps_s: Option<Estimate>,
    pub samples: u64,
}

/// Normal linear channel model `y = t x + z`, `z ~ N(0, sigma^2)`, for both
/// quadratures. `x` is the modified quadrature `x_A1 - x_B1` (resp. `p`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelModel {
    pub var_x: f64,
    pub t1: f64,
    pub t2: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
}

impl ChannelModel {
    /// `t1 = T_S T_M eta_A`, `t2 = T_S T_K eta_B`, `sigma^2 = 1 + t eps`.
    pub fn new(setup: &TrustedSetup, channel: &ChannelParams) -> Self {
        let t1 = setup.t_s * setup.t_m * channel.eta_a;
        let t2 = setup.t_s * setup.t_k * channel.eta_b;
        ChannelModel {
            var_x: 2.0 * (setup.v - 1.0),
            t1,
            t2,
            sigma1_sq: 1.0 + t1 * channel.epsilon_1,
            sigma2_sq: 1.0 + t2 * channel.epsilon_2,
        }
    }
}

/// Per-symbol estimation data.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EstimationSamples {
    pub x1: Vec<f64>,
    pub p2: Vec<f64>,
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
}

/// Running sums for one regression `y = t x + z`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RegressionStats {
    pub n: u64,
    pub sxx: f64,
    pub sxy: f64,
    pub syy: f64,
}

impl RegressionStats {
    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        self.sxx += x * x;
        self.sxy += x * y;
        self.syy += y * y;
    }

    pub fn merge(&mut self, other: &RegressionStats) {
        self.n += other.n;
        self.sxx += other.sxx;
        self.sxy += other.sxy;
        self.syy += other.syy;
    }

    pub fn from_pairs(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Contract(format!("{} regressors for {} outcomes", x.len(), y.len())));
        }
        let mut s = RegressionStats::default();
        x.iter().zip(y).for_each(|(&a, &b)| s.push(a, b));
        Ok(s)
    }

    /// ML estimates `(t, sigma^2)` with `SE(t) = sqrt(sigma^2 / sum x^2)` and
    /// `SE(sigma^2) = sigma^2 sqrt(2 / m)`. `sigma^2` keeps the `1/m`
    /// normalization, so it is biased low by `sigma^2 / m`.
    pub fn estimate(&self) -> Result<(Estimate, Estimate)> {
        if self.n < 2 {
            return Err(Error::Estimation(format!("{} samples, need at least 2", self.n)));
        }
        if !(self.sxx > 0.0) {
            return Err(Error::Estimation("degenerate regressor, sum of x^2 is zero".into()));
        }
        let m = self.n as f64;
        let t = self.sxy / self.sxx;
        let sigma_sq = ((self.syy - t * self.sxy) / m).max(0.0);
        Ok((
            Estimate { value: t, std_error: (sigma_sq / self.sxx).sqrt() },
            Estimate { value: sigma_sq, std_error: sigma_sq * (2.0 / m).sqrt() },
        ))
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn simulate_channel_data<R: Rng + ?Sized>(
    model: &ChannelModel,
    m_samples: usize,
    rng: &mut R,
) -> Result<EstimationSamples> {
    if m_samples < 2 {
        return Err(Error::invalid("samples", m_samples as f64, "need at least 2"));
    }
    let sx = model.var_x.sqrt();
    let (s1, s2) = (model.sigma1_sq.sqrt(), model.sigma2_sq.sqrt());
    let mut out = EstimationSamples {
        x1: Vec::with_capacity(m_samples),
        p2: Vec::with_capacity(m_samples),
        y1: Vec::with_capacity(m_samples),
        y2: Vec::with_capacity(m_samples),
    };
    for _ in 0..m_samples {
        let x1 = sx * normal(rng);
        let p2 = sx * normal(rng);
        out.y1.push(model.t1 * x1 + s1 * normal(rng));
        out.y2.push(model.t2 * p2 + s2 * normal(rng));
        out.x1.push(x1);
        out.p2.push(p2);
    }
    Ok(out)
}

/// Same draws as [`simulate_channel_data`] without storing them.
pub fn simulate_channel_stats<R: Rng + ?Sized>(
    model: &ChannelModel,
    m_samples: u64,
    rng: &mut R,
) -> Result<[RegressionStats; 2]> {
    if m_samples < 2 {
        return Err(Error::invalid("samples", m_samples as f64, "need at least 2"));
    }
    let sx = model.var_x.sqrt();
    let (s1, s2) = (model.sigma1_sq.sqrt(), model.sigma2_sq.sqrt());
    let mut stats = [RegressionStats::default(); 2];
    for _ in 0..m_samples {
        let x1 = sx * normal(rng);
        let p2 = sx * normal(rng);
        stats[0].push(x1, model.t1 * x1 + s1 * normal(rng));
        stats[1].push(p2, model.t2 * p2 + s2 * normal(rng));
    }
    Ok(stats)
}

/// ML channel estimates from stored samples; `eps_s` is left empty.
pub fn ml_estimators(samples: &EstimationSamples) -> Result<EstimationResult> {
    let s1 = RegressionStats::from_pairs(&samples.x1, &samples.y1)?;
    let s2 = RegressionStats::from_pairs(&samples.p2, &samples.y2)?;
    estimates_from_stats(&[s1, s2])
}

pub fn estimates_from_stats(stats: &[RegressionStats; 2]) -> Result<EstimationResult> {
    let (t1, sigma1_sq) = stats[0].estimate()?;
    let (t2, sigma2_sq) = stats[1].estimate()?;
    Ok(EstimationResult { t1, t2, sigma1_sq, sigma2_sq, eps_s: None, samples: stats[0].n })
}

/// Predicted monitor moments for one side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonitorMoments {
    /// `<x_A1 x_M3> = -sqrt(c) zeta1`.
    pub cross_x: f64,
    /// `<p_A1 p_M3> = +sqrt(c) zeta1`.
    pub cross_p: f64,
    /// `<x_M3^2> = c (V - 1 + eps_S) + 1`.
    pub var_m3: f64,
    /// `c = T_S eta_e eta_d (1 - T_M)`.
    pub coupling: f64,
}

pub fn monitor_moments(setup: &TrustedSetup, side: Side) -> Result<MonitorMoments> {
    setup.validate()?;
    let tap = setup.tap(side);
    if tap >= 1.0 {
        return Err(Error::Estimation("no monitor tap on this side, source noise is unidentifiable".into()));
    }
    let c = setup.t_s * setup.eta_e * setup.eta_d * (1.0 - tap);
    let zeta1 = (setup.v * setup.v - 1.0).sqrt();
    let eps_s = crate::protocol::eps_s_from_v_s(setup.t_s, setup.v_s);
    Ok(MonitorMoments {
        cross_x: -c.sqrt() * zeta1,
        cross_p: c.sqrt() * zeta1,
        var_m3: c * (setup.v - 1.0 + eps_s) + 1.0,
        coupling: c,
    })
}

/// Running sums of a side's reference quadratures and monitor outputs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MonitorStats {
    pub x: RegressionStats,
    pub p: RegressionStats,
}

impl MonitorStats {
    pub fn merge(&mut self, other: &MonitorStats) {
        self.x.merge(&other.x);
        self.p.merge(&other.p);
    }

    /// Sample moments `(<x_A1 x_M3>, <p_A1 p_M3>, <x_M3^2>)`.
    pub fn moments(&self) -> (f64, f64, f64) {
        let (nx, np) = (self.x.n as f64, self.p.n as f64);
        (self.x.sxy / nx, self.p.sxy / np, self.x.syy / nx)
    }
}

/// Draws `(x_A1, x_M3)` and `(p_A1, p_M3)` pairs with the predicted moments.
pub fn simulate_monitor_stats<R: Rng + ?Sized>(
    setup: &TrustedSetup,
    side: Side,
    m_samples: u64,
    rng: &mut R,
) -> Result<MonitorStats> {
    let mm = monitor_moments(setup, side)?;
    let sv = setup.v.sqrt();
    let beta_x = mm.cross_x / setup.v;
    let beta_p = mm.cross_p / setup.v;
    let resid = (mm.var_m3 - mm.cross_x * mm.cross_x / setup.v).sqrt();
    let mut stats = MonitorStats::default();
    for _ in 0..m_samples {
        let xa = sv * normal(rng);
        let pa = sv * normal(rng);
        stats.x.push(xa, beta_x * xa + resid * normal(rng));
        stats.p.push(pa, beta_p * pa + resid * normal(rng));
    }
    Ok(stats)
}

/// Source excess noise from one side's monitor data.
///
/// The cross moments fix `c = (<p_A1 p_M3> - <x_A1 x_M3>)^2 / (4 zeta1^2)`.
/// Writing `<x_M3^2>` as the part explained by Alice's known quadrature plus
/// a residual `r = c (eps_S - 1 + 1/V) + 1` gives
/// `eps_S = (r - 1) / c + 1 - 1/V`, which is far less noisy than solving
/// `<x_M3^2>` directly because the large signal term cancels.
pub fn invert_monitor(stats: &MonitorStats, v: f64) -> Result<Estimate> {
    let n = stats.x.n + stats.p.n;
    if stats.x.n < 2 || stats.p.n < 2 {
        return Err(Error::Estimation("too few monitor samples".into()));
    }
    let zeta1_sq = v * v - 1.0;
    let k = 0.5 * (stats.p.sxy / stats.p.n as f64 - stats.x.sxy / stats.x.n as f64);
    if !(k > 0.0) {
        return Err(Error::Estimation("monitor carries no signal correlation".into()));
    }
    let c = k * k / zeta1_sq;
    let rss = |s: &RegressionStats| s.syy - s.sxy * s.sxy / s.sxx;
    let r = (rss(&stats.x) + rss(&stats.p)) / n as f64;
    let m = n as f64 / 2.0;
    Ok(Estimate { value: (r - 1.0) / c + 1.0 - 1.0 / v, std_error: r / (c * m.sqrt()) })
}

/// Source-noise estimate expected from `m` symbols per quadrature, with the
/// standard error of [`invert_monitor`].
pub fn expected_eps_s(setup: &TrustedSetup, side: Side, m: f64) -> Result<Estimate> {
    let mm = monitor_moments(setup, side)?;
    let r = mm.var_m3 - mm.cross_x * mm.cross_x / setup.v;
    Ok(Estimate {
        value: crate::protocol::eps_s_from_v_s(setup.t_s, setup.v_s),
        std_error: r / (mm.coupling * m.sqrt()),
    })
}

/// Sides whose monitors inform the source-noise estimate.
fn monitored_sides(case: CaseId) -> &'static [Side] {
    match case {
        CaseId::Untrusted => &[],
        CaseId::AliceOnly => &[Side::A],
        CaseId::BobOnly => &[Side::B],
        CaseId::Both => &[Side::A, Side::B],
    }
}

/// Mean of independent estimates with the combined standard error.
pub fn pool_estimates(estimates: &[Estimate]) -> Option<Estimate> {
    if estimates.is_empty() {
        return None;
    }
    let k = estimates.len() as f64;
    Some(Estimate {
        value: estimates.iter().map(|e| e.value).sum::<f64>() / k,
        std_error: estimates.iter().map(|e| e.std_error.powi(2)).sum::<f64>().sqrt() / k,
    })
}

/// Estimates at their expectation values with the standard errors that `m`
/// estimation symbols would give.
pub fn expected_estimates(
    case: CaseId,
    setup: &TrustedSetup,
    channel: &ChannelParams,
    m: f64,
) -> Result<EstimationResult> {
    if !(m >= 2.0) {
        return Err(Error::invalid("estimation samples", m, "need at least 2"));
    }
    let model = ChannelModel::new(setup, channel);
    let t = |t: f64, s: f64| Estimate { value: t, std_error: (s / (m * model.var_x)).sqrt() };
    let s = |s: f64| Estimate { value: s, std_error: s * (2.0 / m).sqrt() };
    let eps = monitored_sides(case).iter().map(|&side| expected_eps_s(setup, side, m)).collect::<Result<Vec<_>>>()?;
    Ok(EstimationResult {
        t1: t(model.t1, model.sigma1_sq),
        t2: t(model.t2, model.sigma2_sq),
        sigma1_sq: s(model.sigma1_sq),
        sigma2_sq: s(model.sigma2_sq),
        eps_s: pool_estimates(&eps),
        samples: m as u64,
    })
}

/// Turns estimates into model parameters at the source transmittance of
/// `base`. See [`resolve_at`].
pub fn resolve_parameters(
    case: CaseId,
    est: &EstimationResult,
    base: &TrustedSetup,
) -> Result<(TrustedSetup, ChannelParams)> {
    resolve_at(case, est, base, base.t_s)
}

/// Solves the observable equations at a trial `t_s`:
/// `eta = t / (T_S T_tap)`, `eps = (sigma^2 - 1) / t` and
/// `V_S = 1 + T_S eps_S / (1 - T_S)`. Without a source-noise estimate the
/// `V_S` of `base` is kept. Fails when a transmittance leaves `(0, 1]` by
/// more than five standard errors of its estimate.
pub fn resolve_at(
    case: CaseId,
    est: &EstimationResult,
    base: &TrustedSetup,
    t_s: f64,
) -> Result<(TrustedSetup, ChannelParams)> {
    // A lossless link estimated from finite data lands just above one half
    // the time; within five standard errors it is read as lossless.
    let link = |t: &Estimate, tap: f64, sigma_sq: f64| -> Result<(f64, f64)> {
        let mut eta = t.value / (t_s * tap);
        let slack = (5.0 * t.std_error / (t_s * tap)).max(1e-9);
        if (eta - 1.0).abs() <= 1e-9 || (eta > 1.0 && eta - 1.0 <= slack) {
            eta = 1.0;
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::Estimation(format!("implied transmittance {eta:.6} outside (0, 1]")));
        }
        Ok((eta, ((sigma_sq - 1.0) / t.value).max(0.0)))
    };
    let (eta_a, eps_1) = link(&est.t1, base.t_m, est.sigma1_sq.value)?;
    let (eta_b, eps_2) = link(&est.t2, base.t_k, est.sigma2_sq.value)?;
    let v_s = match (est.eps_s, case) {
        (Some(e), c) if c != CaseId::Untrusted && t_s < 1.0 => v_s_from_eps_s(t_s, e.value.max(0.0))?,
        _ => base.v_s,
    };
    let setup = TrustedSetup { t_s, v_s, ..*base };
    setup.validate()?;
    Ok((setup, ChannelParams::new(eta_a, eta_b, eps_1, eps_2)?))
}

/// Grid of trial values `from + i * step` strictly below `to`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanGrid {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid { from: 0.9, to: 1.0, step: 1e-3 }
    }
}

impl ScanGrid {
    pub fn single(value: f64) -> Self {
        ScanGrid { from: value, to: value, step: 1.0 }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.from >= self.to {
            return vec![self.from];
        }
        let count = ((self.to - self.from) / self.step - 1e-9).ceil() as usize;
        (0..count).map(|i| self.from + i as f64 * self.step).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanOutcome {
    pub t_s: f64,
    pub setup: TrustedSetup,
    pub channel: ChannelParams,
    pub rate: KeyRateBreakdown,
    pub feasible_points: usize,
}

/// Scans the source transmittance, solves the other parameters from the
/// observables at each trial value and keeps the set with the lowest rate.
/// `base` supplies the calibrated hardware (taps, `eta_d`, `eta_e`, `V`).
#[allow(clippy::too_many_arguments)]
pub fn scan_coupled_params(
    case: CaseId,
    est: &EstimationResult,
    base: &TrustedSetup,
    grid: &ScanGrid,
    attack: AttackModel,
    xi: f64,
    fs: &FiniteSizeParams,
    pe_mode: PeMode,
) -> Result<ScanOutcome> {
    let mut best: Option<ScanOutcome> = None;
    let mut feasible = 0;
    for t_s in grid.points() {
        let Ok((setup, channel)) = resolve_at(case, est, base, t_s) else {
            continue;
        };
        let rate = evaluate(case, &setup, &channel, &channel.attack(attack)?, xi, fs, pe_mode)?;
        feasible += 1;
        if best.as_ref().is_none_or(|b| rate.rate < b.rate.rate) {
            best = Some(ScanOutcome { t_s, setup, channel, rate, feasible_points: 0 });
        }
    }
    let mut out = best.ok_or_else(|| Error::Estimation("no feasible point on the scan grid".into()))?;
    out.feasible_points = feasible;
    Ok(out)
}

/// `(R_est, R_real)`: the rate users who ignore RIN would claim, and the
/// rate the RIN-aware model supports.
pub fn estimated_vs_realistic(
    case: CaseId,
    params: &ProtocolParams,
    channel: &ChannelParams,
    attack: AttackModel,
    fs: &FiniteSizeParams,
    pe_mode: PeMode,
) -> Result<(KeyRateBreakdown, KeyRateBreakdown)> {
    Ok((
        rate_with_model(case, params, channel, attack, fs, pe_mode, RinModel::Estimated)?,
        rate_with_model(case, params, channel, attack, fs, pe_mode, RinModel::Realistic)?,
    ))
}

/// Simulates one model's estimation data and solves it at the true `T_S`.
pub fn sampled_estimates(
    case: CaseId,
    setup: &TrustedSetup,
    channel: &ChannelParams,
    m_samples: u64,
    seed: u64,
) -> Result<EstimationResult> {
    let model = ChannelModel::new(setup, channel);
    let stats = simulate_channel_stats(&model, m_samples, &mut stream_rng(seed, 0))?;
    let mut est = estimates_from_stats(&stats)?;
    let eps = monitored_sides(case)
        .iter()
        .map(|&side| {
            let stream = 1 + side as u64;
            let mon = simulate_monitor_stats(setup, side, m_samples, &mut stream_rng(seed, stream))?;
            invert_monitor(&mon, setup.v)
        })
        .collect::<Result<Vec<_>>>()?;
    est.eps_s = pool_estimates(&eps);
    Ok(est)
}

/// Sample-level counterpart of [`estimated_vs_realistic`]: each model
/// generates its own estimation data, which is re-estimated and fed back
/// into the key rate.
pub fn estimated_vs_realistic_sampled(
    case: CaseId,
    params: &ProtocolParams,
    channel: &ChannelParams,
    attack: AttackModel,
    fs: &FiniteSizeParams,
    m_samples: u64,
    seed: u64,
) -> Result<(KeyRateBreakdown, KeyRateBreakdown)> {
    let run = |rin: RinModel, stream_seed: u64| -> Result<KeyRateBreakdown> {
        let base = trusted_setup(case, params, rin)?;
        let est = sampled_estimates(case, &base, channel, m_samples, stream_seed)?;
        let (setup, ch) = resolve_parameters(case, &est, &base)?;
        evaluate(case, &setup, &ch, &ch.attack(attack)?, params.xi, fs, PeMode::Ideal)
    };
    Ok((run(RinModel::Estimated, seed)?, run(RinModel::Realistic, seed.wrapping_add(1))?))
}
