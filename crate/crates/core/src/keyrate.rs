//! Mutual information, Holevo bound, finite-size penalty and the resulting
//! secret key rate.

use std::fmt;
use std::str::FromStr;

use statrs::function::erf::erfc_inv;

use crate::calibration::{self, RinModel};
use crate::channel::{AttackModel, AttackParams, ChannelParams, Geometry, DEFAULT_ALPHA_DB_PER_KM};
use crate::error::{Error, Result};
use crate::gaussian::SymplecticSpectrum;
use crate::protocol::{assemble_case, CaseId, ProtocolParams, TrustedSetup};

/// Block length, key/estimation split and security parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteSizeParams {
    /// Total number of exchanged symbols `N`.
    pub block_n: f64,
    /// `n / N`, the share of symbols kept for the key.
    pub key_fraction: f64,
    pub eps_smooth: f64,
    pub eps_pa: f64,
    pub eps_pe: f64,
    pub dim_hx: u32,
}

impl Default for FiniteSizeParams {
    fn default() -> Self {
        FiniteSizeParams { block_n: 1e8, key_fraction: 0.1, eps_smooth: 1e-10, eps_pa: 1e-10, eps_pe: 1e-10, dim_hx: 2 }
    }
}

impl FiniteSizeParams {
    /// Infinite block, every symbol used for the key, so `delta_n` is zero.
    pub fn asymptotic() -> Self {
        FiniteSizeParams { block_n: f64::INFINITY, key_fraction: 1.0, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.block_n >= 1.0) {
            return Err(Error::invalid("block_n", self.block_n, "must be >= 1"));
        }
        if !(self.key_fraction > 0.0 && self.key_fraction <= 1.0) {
            return Err(Error::invalid("key_fraction", self.key_fraction, "must lie in (0, 1]"));
        }
        if self.key_n() < 1.0 {
            return Err(Error::invalid("key_fraction", self.key_fraction, "leaves no key symbols"));
        }
        for (name, eps) in [("eps_smooth", self.eps_smooth), ("eps_pa", self.eps_pa), ("eps_pe", self.eps_pe)] {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::invalid(name, eps, "must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    /// Key symbols `n`.
    pub fn key_n(&self) -> f64 {
        self.block_n * self.key_fraction
    }

    /// Symbols revealed for parameter estimation, `N - n`.
    pub fn estimation_m(&self) -> f64 {
        self.block_n - self.key_n()
    }
}

/// `(2 d + 3) sqrt(log2(2 / eps_smooth) / n) + (2 / n) log2(1 / eps_pa)`.
pub fn delta_n(fs: &FiniteSizeParams) -> f64 {
    let n = fs.key_n();
    let lead = f64::from(2 * fs.dim_hx + 3);
    lead * ((2.0 / fs.eps_smooth).log2() / n).sqrt() + 2.0 / n * (1.0 / fs.eps_pa).log2()
}

/// Alice-Bob information from Bob's heterodyne data, in bits per use.
pub fn mutual_information(v_x: f64, v_p: f64, v_x_cond: f64, v_p_cond: f64) -> Result<f64> {
    for (name, v) in [("V_x", v_x), ("V_p", v_p), ("V_x|a", v_x_cond), ("V_p|a", v_p_cond)] {
        if !(v > 0.0) {
            return Err(Error::invalid(name, v, "variance must be > 0"));
        }
    }
    if v_x_cond > v_x + 1e-9 || v_p_cond > v_p + 1e-9 {
        return Err(Error::Contract(format!(
            "conditional variances ({v_x_cond}, {v_p_cond}) exceed unconditional ({v_x}, {v_p})"
        )));
    }
    let ratio = ((v_x + 1.0) * (v_p + 1.0)) / ((v_x_cond + 1.0) * (v_p_cond + 1.0));
    Ok(0.5 * ratio.log2().max(0.0))
}

/// `S(joint) - S(conditional)` from the two spectra; sizes must match `case`.
pub fn holevo_bound(case: CaseId, nu_joint: &SymplecticSpectrum, nu_cond: &SymplecticSpectrum) -> Result<f64> {
    let joint = case.mode_order().len();
    if nu_joint.len() != joint || nu_cond.len() != joint - 1 {
        return Err(Error::Contract(format!(
            "case {case} expects spectra of sizes {joint}/{}, got {}/{}",
            joint - 1,
            nu_joint.len(),
            nu_cond.len()
        )));
    }
    Ok(nu_joint.entropy()? - nu_cond.entropy()?)
}

/// How the Holevo bound treats parameter estimation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PeMode {
    /// True model parameters; finite size enters only through `delta_n` and `n / N`.
    #[default]
    Ideal,
    /// Parameters moved to the pessimistic edge of the confidence region.
    WorstCase,
}

impl PeMode {
    pub fn name(self) -> &'static str {
        match self {
            PeMode::Ideal => "ideal",
            PeMode::WorstCase => "worst_case",
        }
    }
}

impl fmt::Display for PeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ideal" => Ok(PeMode::Ideal),
            "worst_case" | "worst" => Ok(PeMode::WorstCase),
            _ => Err(Error::Contract(format!("unknown pe mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeyRateBreakdown {
    pub case: CaseId,
    pub pe_mode: PeMode,
    pub i_ab: f64,
    pub chi_ae: f64,
    pub delta_n: f64,
    pub xi: f64,
    pub key_fraction: f64,
    /// Raw rate in bits per use; negative when no key can be extracted.
    pub rate: f64,
    pub nu_joint: SymplecticSpectrum,
    pub nu_cond: SymplecticSpectrum,
}

impl KeyRateBreakdown {
    /// Rate clamped at zero, for presentation.
    pub fn clamped(&self) -> f64 {
        self.rate.max(0.0)
    }

    pub fn is_positive(&self) -> bool {
        self.rate > 0.0
    }
}

/// Key rate for fully specified trusted and untrusted parameters.
pub fn evaluate(
    case: CaseId,
    setup: &TrustedSetup,
    channel: &ChannelParams,
    attack: &AttackParams,
    xi: f64,
    fs: &FiniteSizeParams,
    pe_mode: PeMode,
) -> Result<KeyRateBreakdown> {
    fs.validate()?;
    let m = assemble_case(case, setup, channel, attack)?;
    let nu_joint = m.joint.check_physical("state after the relay")?;
    let nu_cond = m.conditional.check_physical("state after Alice's heterodyne")?;
    let i_ab = mutual_information(m.b1.x, m.b1.p, m.b1.x_cond, m.b1.p_cond)?;
    let chi_ae = holevo_bound(case, &nu_joint, &nu_cond)?;
    let delta = delta_n(fs);
    Ok(KeyRateBreakdown {
        case,
        pe_mode,
        i_ab,
        chi_ae,
        delta_n: delta,
        xi,
        key_fraction: fs.key_fraction,
        rate: fs.key_fraction * (xi * i_ab - chi_ae - delta),
        nu_joint,
        nu_cond,
    })
}

/// Key rate under the RIN-aware model, with Eve's correlations chosen by
/// `attack` for the channel in use.
pub fn secret_key_rate(
    case: CaseId,
    params: &ProtocolParams,
    channel: &ChannelParams,
    attack: AttackModel,
    fs: &FiniteSizeParams,
    pe_mode: PeMode,
) -> Result<KeyRateBreakdown> {
    rate_with_model(case, params, channel, attack, fs, pe_mode, RinModel::Realistic)
}

/// Key rate the users compute when they model RIN as `rin`.
pub fn rate_with_model(
    case: CaseId,
    params: &ProtocolParams,
    channel: &ChannelParams,
    attack: AttackModel,
    fs: &FiniteSizeParams,
    pe_mode: PeMode,
    rin: RinModel,
) -> Result<KeyRateBreakdown> {
    params.validate()?;
    fs.validate()?;
    let setup = calibration::trusted_setup(case, params, rin)?;
    let (setup, channel) = match pe_mode {
        PeMode::Ideal => (setup, *channel),
        PeMode::WorstCase => {
            let expected = calibration::expected_estimates(case, &setup, channel, fs.estimation_m())?;
            let adjusted = worst_case_adjust(&expected, fs.eps_pe)?;
            calibration::resolve_parameters(case, &adjusted, &setup)?
        }
    };
    evaluate(case, &setup, &channel, &channel.attack(attack)?, params.xi, fs, pe_mode)
}

/// Two-sided Gaussian quantile for confidence `1 - eps_pe`:
/// `sqrt(2) erfinv(1 - eps_pe)`.
pub fn z_score(eps_pe: f64) -> Result<f64> {
    if !(eps_pe > 0.0 && eps_pe < 1.0) {
        return Err(Error::invalid("eps_pe", eps_pe, "must lie in (0, 1)"));
    }
    Ok(std::f64::consts::SQRT_2 * erfc_inv(eps_pe))
}

/// Moves every estimate `z` standard errors towards lower key rate:
/// transmittances down, noise variances and source noise up.
pub fn worst_case_adjust(
    estimates: &calibration::EstimationResult,
    eps_pe: f64,
) -> Result<calibration::EstimationResult> {
    let z = z_score(eps_pe)?;
    let mut out = estimates.clone();
    for t in [&mut out.t1, &mut out.t2] {
        t.value -= z * t.std_error;
        if !(t.value > 0.0) {
            return Err(Error::Estimation(format!(
                "worst-case transmittance {:.3e} is not positive; block too short",
                t.value
            )));
        }
    }
    for s in [&mut out.sigma1_sq, &mut out.sigma2_sq] {
        s.value += z * s.std_error;
    }
    if let Some(e) = out.eps_s.as_mut() {
        e.value += z * e.std_error;
    }
    Ok(out)
}

/// Full description of one evaluation point apart from distance and case.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    pub params: ProtocolParams,
    pub epsilon_1: f64,
    pub epsilon_2: f64,
    pub alpha_db_per_km: f64,
    pub geometry: Geometry,
    pub attack: AttackModel,
    pub fs: FiniteSizeParams,
    pub pe_mode: PeMode,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            params: ProtocolParams::default(),
            epsilon_1: 0.01,
            epsilon_2: 0.01,
            alpha_db_per_km: DEFAULT_ALPHA_DB_PER_KM,
            geometry: Geometry::Asymmetric,
            attack: AttackModel::NegativeEpr,
            fs: FiniteSizeParams::default(),
            pe_mode: PeMode::Ideal,
        }
    }
}

impl Scenario {
    /// Channel for a total Alice-Bob distance under this geometry.
    pub fn channel_at(&self, l_ab_km: f64) -> Result<ChannelParams> {
        let (l_ac, l_bc) = self.geometry.split(l_ab_km);
        ChannelParams::from_distances(l_ac, l_bc, self.epsilon_1, self.epsilon_2, self.alpha_db_per_km)
    }

    pub fn rate(&self, case: CaseId, l_ab_km: f64, rin: RinModel) -> Result<KeyRateBreakdown> {
        let channel = self.channel_at(l_ab_km)?;
        rate_with_model(case, &self.params, &channel, self.attack, &self.fs, self.pe_mode, rin)
    }

    /// Longest distance with a positive rate, to within 0.05 km. Zero when
    /// even the back-to-back rate is not positive.
    pub fn max_secure_distance(&self, case: CaseId, rin: RinModel) -> Result<f64> {
        max_secure_distance(|l| Ok(self.rate(case, l, rin)?.rate))
    }
}

/// Bisection tolerance of [`max_secure_distance`] in km.
pub const DISTANCE_TOL_KM: f64 = 0.05;

/// Largest `L` with `rate(L) > 0`, assuming the rate decreases with distance.
pub fn max_secure_distance(rate: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    if rate(0.0)? <= 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while rate(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 10_000.0 {
            return Err(Error::Numerical("key rate stays positive beyond 10000 km".into()));
        }
    }
    while hi - lo > DISTANCE_TOL_KM {
        let mid = 0.5 * (lo + hi);
        if rate(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn delta_values() {
        let fs = FiniteSizeParams { key_fraction: 1.0, ..Default::default() };
        let by_hand = 7.0 * (2e10f64.log2() / 1e8).sqrt() + 2e-8 * 1e10f64.log2();
        assert_eq!(delta_n(&fs), by_hand);
        assert!(close(delta_n(&fs), 4.0955e-3, 1e-6));
        let huge = FiniteSizeParams { block_n: 1e16, ..fs };
        assert!(delta_n(&huge) < 1e-6);
        assert_eq!(delta_n(&FiniteSizeParams::asymptotic()), 0.0);
    }

    #[test]
    fn mutual_information_values() {
        assert_eq!(mutual_information(3.0, 3.0, 3.0, 3.0).unwrap(), 0.0);
        assert_eq!(mutual_information(3.0, 3.0, 1.0, 1.0).unwrap(), 1.0);
        assert!(matches!(mutual_information(1.0, 1.0, 2.0, 1.0), Err(Error::Contract(_))));
    }

    #[test]
    fn holevo_values() {
        let pure = SymplecticSpectrum::from(vec![1.0, 1.0]);
        let one = SymplecticSpectrum::from(vec![1.0]);
        assert_eq!(holevo_bound(CaseId::Untrusted, &pure, &one).unwrap(), 0.0);
        let thermal = SymplecticSpectrum::from(vec![3.0, 1.0]);
        assert!(close(holevo_bound(CaseId::Untrusted, &thermal, &one).unwrap(), 2.0, 1e-12));
        assert!(holevo_bound(CaseId::Both, &thermal, &one).is_err());
    }

    #[test]
    fn z_value() {
        // Reference from an independent inverse-erfc implementation.
        assert!(close(z_score(1e-10).unwrap(), 6.466951087, 1e-8));
        assert!(close(z_score(1e-10).unwrap(), 6.4666, 1e-3));
        assert!(z_score(0.0).is_err());
    }

    #[test]
    fn rate_is_its_own_decomposition() {
        let sc = Scenario::default();
        for case in CaseId::ALL {
            let r = sc.rate(case, 10.0, RinModel::Realistic).unwrap();
            let recomposed = r.key_fraction * (r.xi * r.i_ab - r.chi_ae - r.delta_n);
            assert!(close(r.rate, recomposed, 1e-12));
            assert!(r.i_ab >= 0.0 && r.chi_ae >= -1e-9);
        }
    }

    #[test]
    fn long_distance_has_no_key() {
        let sc = Scenario { geometry: Geometry::Symmetric, ..Default::default() };
        let r = sc.rate(CaseId::Untrusted, 200.0, RinModel::Realistic).unwrap();
        assert!(r.rate <= 0.0);
        assert_eq!(r.clamped(), 0.0);
    }

    #[test]
    fn worst_case_is_pessimistic() {
        let ideal = Scenario::default();
        let worst = Scenario { pe_mode: PeMode::WorstCase, ..ideal };
        for case in CaseId::ALL {
            let a = ideal.rate(case, 15.0, RinModel::Realistic).unwrap().rate;
            let b = worst.rate(case, 15.0, RinModel::Realistic).unwrap().rate;
            assert!(b <= a, "{case}: {b} > {a}");
        }
    }

    #[test]
    fn bisection_on_a_line() {
        let d = max_secure_distance(|l| Ok(30.0 - l)).unwrap();
        assert!(close(d, 30.0, DISTANCE_TOL_KM));
        assert_eq!(max_secure_distance(|_| Ok(-1.0)).unwrap(), 0.0);
    }
}
