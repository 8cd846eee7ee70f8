//! Closed-form covariance matrices of the trusted modes for each monitoring
//! case, conditioned on the relay's Bell measurement.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix2};

use crate::channel::{AttackParams, ChannelParams, RelayNoise};
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, ModeLabel, Quadrature};

/// Which users monitor their source noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    Untrusted,
    AliceOnly,
    BobOnly,
    Both,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::Untrusted, CaseId::AliceOnly, CaseId::BobOnly, CaseId::Both];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Untrusted => "untrusted",
            CaseId::AliceOnly => "alice",
            CaseId::BobOnly => "bob",
            CaseId::Both => "both",
        }
    }

    pub fn monitors_alice(self) -> bool {
        matches!(self, CaseId::AliceOnly | CaseId::Both)
    }

    pub fn monitors_bob(self) -> bool {
        matches!(self, CaseId::BobOnly | CaseId::Both)
    }

    /// Tap transmittances `(T_M, T_K)`; an unmonitored side has no tap.
    pub fn taps(self, eta_m_alice: f64, eta_m_bob: f64) -> (f64, f64) {
        (if self.monitors_alice() { eta_m_alice } else { 1.0 }, if self.monitors_bob() { eta_m_bob } else { 1.0 })
    }

    /// Trusted modes kept after the relay, in matrix order.
    pub fn mode_order(self) -> &'static [&'static str] {
        match self {
            CaseId::Untrusted => &["B1", "A1"],
            CaseId::AliceOnly => &["B1", "A1", "F3", "F1", "M3", "P2"],
            CaseId::BobOnly => &["A1", "B1", "G3", "G1", "K3", "Q2"],
            CaseId::Both => &["A1", "F3", "F1", "M3", "P2", "B1", "G3", "G1", "K3", "Q2"],
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "untrusted" => Ok(CaseId::Untrusted),
            "alice" | "alice_only" | "aliceonly" => Ok(CaseId::AliceOnly),
            "bob" | "bob_only" | "bobonly" => Ok(CaseId::BobOnly),
            "both" => Ok(CaseId::Both),
            _ => Err(Error::Contract(format!("unknown case `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    /// Labels of `(A1, F3, F1, M3, P2)` or their Bob-side counterparts.
    pub fn labels(self) -> [&'static str; 5] {
        match self {
            Side::A => ["A1", "F3", "F1", "M3", "P2"],
            Side::B => ["B1", "G3", "G1", "K3", "Q2"],
        }
    }
}

/// User-side parameters shared by every case.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolParams {
    pub v_mod: f64,
    pub t_s: f64,
    pub v_s: f64,
    pub eta_m_alice: f64,
    pub eta_m_bob: f64,
    pub eta_d: f64,
    pub v_el: f64,
    pub v_rin: f64,
    pub xi: f64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams {
            v_mod: 60.0,
            t_s: 0.99,
            v_s: 3.0,
            eta_m_alice: 0.9,
            eta_m_bob: 0.9,
            eta_d: 0.6,
            v_el: 0.01,
            v_rin: 0.0,
            xi: 1.0,
        }
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_mod >= 0.0) || !self.v_mod.is_finite() {
            return Err(Error::invalid("v_mod", self.v_mod, "must be finite and >= 0"));
        }
        if !(self.t_s > 0.0 && self.t_s <= 1.0) {
            return Err(Error::invalid("t_s", self.t_s, "must lie in (0, 1]"));
        }
        if !(self.v_s >= 1.0) || !self.v_s.is_finite() {
            return Err(Error::invalid("v_s", self.v_s, "must be finite and >= 1"));
        }
        for (name, eta) in [("eta_m_alice", self.eta_m_alice), ("eta_m_bob", self.eta_m_bob)] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::invalid(name, eta, "must lie in (0, 1]"));
            }
        }
        if !(self.eta_d > 0.0 && self.eta_d < 1.0) {
            return Err(Error::invalid("eta_d", self.eta_d, "must lie in (0, 1)"));
        }
        if !(self.v_el >= 0.0) {
            return Err(Error::invalid("v_el", self.v_el, "must be >= 0"));
        }
        if !(self.v_rin >= 0.0) {
            return Err(Error::invalid("v_rin", self.v_rin, "must be >= 0"));
        }
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(Error::invalid("xi", self.xi, "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Source excess noise equivalent to `v_s`: `(V_S - 1)(1 - T_S) / T_S`.
    pub fn eps_s(&self) -> f64 {
        eps_s_from_v_s(self.t_s, self.v_s)
    }

    /// Sets `v_s = 1 + T_S eps_s / (1 - T_S)`.
    pub fn set_eps_s(&mut self, eps_s: f64) -> Result<()> {
        self.v_s = v_s_from_eps_s(self.t_s, eps_s)?;
        Ok(())
    }
}

pub fn v_s_from_eps_s(t_s: f64, eps_s: f64) -> Result<f64> {
    if !(eps_s >= 0.0) {
        return Err(Error::invalid("eps_s", eps_s, "must be >= 0"));
    }
    if t_s >= 1.0 {
        if eps_s > 0.0 {
            return Err(Error::invalid("t_s", t_s, "source noise needs t_s < 1"));
        }
        return Ok(1.0);
    }
    Ok(1.0 + t_s * eps_s / (1.0 - t_s))
}

pub fn eps_s_from_v_s(t_s: f64, v_s: f64) -> f64 {
    (v_s - 1.0) * (1.0 - t_s) / t_s
}

/// Everything the closed forms need about the users' hardware for one case.
/// `eta_e` comes from the calibration model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrustedSetup {
    pub v: f64,
    pub t_s: f64,
    pub v_s: f64,
    pub t_m: f64,
    pub t_k: f64,
    pub eta_d: f64,
    pub eta_e: f64,
}

impl TrustedSetup {
    pub fn validate(&self) -> Result<()> {
        if !(self.v >= 1.0) || !self.v.is_finite() {
            return Err(Error::invalid("V", self.v, "must be finite and >= 1"));
        }
        if !(self.v_s >= 1.0) || !self.v_s.is_finite() {
            return Err(Error::invalid("V_S", self.v_s, "must be finite and >= 1"));
        }
        for (name, t) in [("T_S", self.t_s), ("T_M", self.t_m), ("T_K", self.t_k), ("eta_e", self.eta_e)] {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::invalid(name, t, "must lie in (0, 1]"));
            }
        }
        if !(self.eta_d > 0.0 && self.eta_d < 1.0) {
            return Err(Error::invalid("eta_d", self.eta_d, "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn tap(&self, side: Side) -> f64 {
        match side {
            Side::A => self.t_m,
            Side::B => self.t_k,
        }
    }

    pub fn symbols(&self, side: Side) -> DerivedSymbols {
        DerivedSymbols::new(self, side)
    }
}

/// Shorthand quantities of the closed forms for one side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedSymbols {
    pub zeta1: f64,
    pub zeta2: f64,
    pub tau: f64,
    pub k: f64,
    pub varphi: f64,
    pub delta: f64,
    pub sigma: f64,
    /// Monitor efficiency of the kept `M3` (or `K3`) mode.
    pub eta_star: f64,
    /// Monitor efficiency of the kept `P2` (or `Q2`) mode.
    pub eta_star_prime: f64,
}

impl DerivedSymbols {
    pub fn new(s: &TrustedSetup, side: Side) -> Self {
        let (v, t_s, v_s) = (s.v, s.t_s, s.v_s);
        let tap = 1.0 - s.tap(side);
        DerivedSymbols {
            zeta1: (v * v - 1.0).sqrt(),
            zeta2: (v_s * v_s - 1.0).sqrt(),
            tau: (1.0 - t_s).sqrt(),
            k: s.eta_d / (1.0 - s.eta_d),
            varphi: (1.0 - t_s) * v + t_s * v_s,
            delta: (t_s * (1.0 - t_s)).sqrt() * (v - v_s),
            sigma: t_s * v + (1.0 - t_s) * v_s - 1.0,
            eta_star: s.eta_d * s.eta_e * tap,
            eta_star_prime: (1.0 - s.eta_d) * s.eta_e * tap,
        }
    }
}

fn put(m: &mut DMatrix<f64>, i: usize, j: usize, block: Matrix2<f64>) {
    m.fixed_view_mut::<2, 2>(2 * i, 2 * j).copy_from(&block);
    if i != j {
        m.fixed_view_mut::<2, 2>(2 * j, 2 * i).copy_from(&block.transpose());
    }
}

fn eye(a: f64) -> Matrix2<f64> {
    Matrix2::new(a, 0.0, 0.0, a)
}

fn zed(a: f64) -> Matrix2<f64> {
    Matrix2::new(a, 0.0, 0.0, -a)
}

/// Reduced state of one user's five trusted modes before the relay, in the
/// order given by [`Side::labels`]. Both sides share the same layout.
pub fn build_gamma_star(setup: &TrustedSetup, side: Side) -> Result<CovarianceMatrix> {
    setup.validate()?;
    let d = setup.symbols(side);
    let (v, t_s, v_s) = (setup.v, setup.t_s, setup.v_s);
    let (es, esp) = (d.eta_star, d.eta_star_prime);
    let (z1, z2, tau) = (d.zeta1, d.zeta2, d.tau);
    let mut m = DMatrix::zeros(10, 10);

    put(&mut m, 0, 0, eye(v));
    put(&mut m, 0, 1, zed(-tau * z1));
    put(&mut m, 0, 3, zed(-(es * t_s).sqrt() * z1));
    put(&mut m, 0, 4, zed((esp * t_s).sqrt() * z1));

    put(&mut m, 1, 1, eye(d.varphi));
    put(&mut m, 1, 2, zed(t_s.sqrt() * z2));
    put(&mut m, 1, 3, eye(es.sqrt() * d.delta));
    put(&mut m, 1, 4, eye(-esp.sqrt() * d.delta));

    put(&mut m, 2, 2, eye(v_s));
    put(&mut m, 2, 3, zed(-es.sqrt() * tau * z2));
    put(&mut m, 2, 4, zed(esp.sqrt() * tau * z2));

    put(&mut m, 3, 3, eye(es * d.sigma + 1.0));
    put(&mut m, 3, 4, eye(-(es * esp).sqrt() * d.sigma));

    put(&mut m, 4, 4, eye(esp * d.sigma + 1.0));

    let labels = side.labels().iter().map(|&l| ModeLabel::from(l)).collect();
    CovarianceMatrix::new(m, labels)
}

/// Relay outcome covariance `diag(theta / 2, theta' / 2)` over `(x_C, p_D)`.
pub fn build_relay_matrix(
    setup: &TrustedSetup,
    channel: &ChannelParams,
    attack: &AttackParams,
) -> Result<Matrix2<f64>> {
    let (theta, theta_prime) = relay_thetas(setup, channel, attack)?;
    if !(theta > 0.0) || !(theta_prime > 0.0) {
        return Err(Error::Unphysical { context: "relay outcome variance".into(), value: theta.min(theta_prime) });
    }
    Ok(Matrix2::new(theta / 2.0, 0.0, 0.0, theta_prime / 2.0))
}

/// `(theta, theta')`.
pub fn relay_thetas(setup: &TrustedSetup, channel: &ChannelParams, attack: &AttackParams) -> Result<(f64, f64)> {
    let sigma = setup.symbols(Side::A).sigma;
    let noise = RelayNoise::new(channel, attack)?;
    let base = (channel.eta_a * setup.t_m + channel.eta_b * setup.t_k) * sigma + channel.eta_a + channel.eta_b;
    Ok((base + noise.lambda(), base + noise.lambda_prime()))
}

/// One side's correlations with `(x_C, p_D)` before the channel and relay
/// prefactors. Side B exchanges the `I` and `Z` blocks.
fn side_correlations(setup: &TrustedSetup, side: Side) -> [Matrix2<f64>; 5] {
    let d = setup.symbols(side);
    type Block = fn(f64) -> Matrix2<f64>;
    let (p, q): (Block, Block) = match side {
        Side::A => (zed, eye),
        Side::B => (eye, zed),
    };
    [
        p(setup.t_s.sqrt() * d.zeta1),
        q(-d.delta),
        p(d.tau * d.zeta2),
        q(-d.eta_star.sqrt() * d.sigma),
        q(d.eta_star_prime.sqrt() * d.sigma),
    ]
}

/// Cross-covariance between the case's trusted modes and `(x_C, p_D)`, one
/// row per quadrature in [`CaseId::mode_order`].
pub fn build_correlations(case: CaseId, setup: &TrustedSetup, channel: &ChannelParams) -> DMatrix<f64> {
    let z1 = setup.symbols(Side::A).zeta1;
    let (eta_a, eta_b) = (channel.eta_a, channel.eta_b);
    let alice_bare = zed((0.5 * eta_a * setup.t_s).sqrt() * z1);
    let bob_bare = eye(-(0.5 * eta_b * setup.t_s).sqrt() * z1);
    let alice_full = || {
        let f = (0.5 * eta_a * setup.t_m).sqrt();
        side_correlations(setup, Side::A).map(|b| b * f)
    };
    let bob_full = || {
        let f = -(0.5 * eta_b * setup.t_k).sqrt();
        side_correlations(setup, Side::B).map(|b| b * f)
    };
    let blocks: Vec<Matrix2<f64>> = match case {
        CaseId::Untrusted => vec![bob_bare, alice_bare],
        CaseId::AliceOnly => std::iter::once(bob_bare).chain(alice_full()).collect(),
        CaseId::BobOnly => std::iter::once(alice_bare).chain(bob_full()).collect(),
        CaseId::Both => alice_full().into_iter().chain(bob_full()).collect(),
    };
    let mut c = DMatrix::zeros(2 * blocks.len(), 2);
    for (i, b) in blocks.iter().enumerate() {
        c.fixed_view_mut::<2, 2>(2 * i, 0).copy_from(b);
    }
    c
}

/// `gamma - C R^-1 C^T`.
pub fn condition_on_relay(gamma: &CovarianceMatrix, c: &DMatrix<f64>, r: &Matrix2<f64>) -> Result<CovarianceMatrix> {
    if c.nrows() != gamma.matrix().nrows() || c.ncols() != 2 {
        return Err(Error::Contract(format!(
            "correlation block is {}x{}, state has dimension {}",
            c.nrows(),
            c.ncols(),
            gamma.matrix().nrows()
        )));
    }
    let r_inv = r.try_inverse().ok_or_else(|| Error::SingularMeasurement("relay".into()))?;
    let r_inv = DMatrix::from_column_slice(2, 2, r_inv.as_slice());
    let out = gamma.matrix() - c * r_inv * c.transpose();
    CovarianceMatrix::new(out, gamma.labels().to_vec())
}

/// Trusted modes of `case` before the relay, in [`CaseId::mode_order`].
pub fn trusted_state(case: CaseId, setup: &TrustedSetup) -> Result<CovarianceMatrix> {
    setup.validate()?;
    let bare = |label: &str| CovarianceMatrix::thermal(label, setup.v);
    match case {
        CaseId::Untrusted => bare("B1")?.direct_sum(&bare("A1")?),
        CaseId::AliceOnly => bare("B1")?.direct_sum(&build_gamma_star(setup, Side::A)?),
        CaseId::BobOnly => bare("A1")?.direct_sum(&build_gamma_star(setup, Side::B)?),
        CaseId::Both => build_gamma_star(setup, Side::A)?.direct_sum(&build_gamma_star(setup, Side::B)?),
    }
}

/// An unmonitored side has no tap, so its transmittance must be exactly 1.
pub fn check_taps(case: CaseId, setup: &TrustedSetup) -> Result<()> {
    if (!case.monitors_alice() && setup.t_m != 1.0) || (!case.monitors_bob() && setup.t_k != 1.0) {
        return Err(Error::Contract(format!(
            "case {case} needs unit taps on unmonitored sides, got T_M = {}, T_K = {}",
            setup.t_m, setup.t_k
        )));
    }
    Ok(())
}

/// Bob's reference-mode variances entering the mutual information.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct B1Variances {
    pub x: f64,
    pub p: f64,
    pub x_cond: f64,
    pub p_cond: f64,
}

impl B1Variances {
    pub fn read(joint: &CovarianceMatrix, conditional: &CovarianceMatrix) -> Result<Self> {
        Ok(B1Variances {
            x: joint.variance("B1", Quadrature::X)?,
            p: joint.variance("B1", Quadrature::P)?,
            x_cond: conditional.variance("B1", Quadrature::X)?,
            p_cond: conditional.variance("B1", Quadrature::P)?,
        })
    }
}

/// Trusted-mode states after the relay, and after Alice's heterodyne on top.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseMatrices {
    pub case: CaseId,
    pub joint: CovarianceMatrix,
    pub conditional: CovarianceMatrix,
    pub b1: B1Variances,
}

pub fn assemble_case(
    case: CaseId,
    setup: &TrustedSetup,
    channel: &ChannelParams,
    attack: &AttackParams,
) -> Result<CaseMatrices> {
    check_taps(case, setup)?;
    let gamma = trusted_state(case, setup)?;
    let c = build_correlations(case, setup, channel);
    let r = build_relay_matrix(setup, channel, attack)?;
    let joint = condition_on_relay(&gamma, &c, &r)?;
    let conditional = joint.condition_heterodyne("A1")?;
    let b1 = B1Variances::read(&joint, &conditional)?;
    Ok(CaseMatrices { case, joint, conditional, b1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_setup() -> TrustedSetup {
        TrustedSetup { v: 61.0, t_s: 0.99, v_s: 3.0, t_m: 0.9, t_k: 0.9, eta_d: 0.6, eta_e: 1.0 / 1.01 }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn symbols_at_paper_point() {
        let d = paper_setup().symbols(Side::A);
        assert!(close(d.varphi, 3.58, 1e-12));
        assert!(close(d.sigma, 59.42, 1e-12));
        assert!(close(d.delta, 0.0099f64.sqrt() * 58.0, 1e-12));
        assert!(close(d.delta, 5.770927, 1e-6));
        assert!(close(d.k, 1.5, 1e-12));
    }

    #[test]
    fn gamma_star_is_physical() {
        let g = build_gamma_star(&paper_setup(), Side::A).unwrap();
        assert!(g.check_physical("gamma star").unwrap().min() >= 1.0 - 1e-9);
        let g = build_gamma_star(&paper_setup(), Side::B).unwrap();
        assert_eq!(g.labels()[3].as_str(), "K3");
    }

    #[test]
    fn gamma_star_decouples_without_noise_or_tap() {
        let s = TrustedSetup { t_s: 1.0, t_m: 1.0, ..paper_setup() };
        let g = build_gamma_star(&s, Side::A).unwrap();
        assert_eq!(g.block("A1", "A1").unwrap(), eye(61.0));
        for other in ["F3", "F1", "M3", "P2"] {
            assert_eq!(g.block("A1", other).unwrap(), Matrix2::zeros());
        }
        assert_eq!(g.block("M3", "M3").unwrap(), Matrix2::identity());
    }

    #[test]
    fn rejects_bad_detector_efficiency() {
        for eta_d in [0.0, 1.0] {
            let s = TrustedSetup { eta_d, ..paper_setup() };
            assert!(build_gamma_star(&s, Side::A).is_err());
        }
    }

    #[test]
    fn relay_lossless_limit() {
        let s = TrustedSetup { t_m: 1.0, t_k: 1.0, ..paper_setup() };
        let ch = ChannelParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let attack = AttackParams::one_mode(1.0, 1.0).unwrap();
        let r = build_relay_matrix(&s, &ch, &attack).unwrap();
        let sigma = s.symbols(Side::A).sigma;
        assert!(close(r[(0, 0)], sigma + 1.0, 1e-12));
        assert!(close(r[(1, 1)], sigma + 1.0, 1e-12));
    }

    #[test]
    fn correlation_shapes() {
        let s = paper_setup();
        let ch = ChannelParams::new(0.7, 0.4, 0.01, 0.01).unwrap();
        assert_eq!(build_correlations(CaseId::AliceOnly, &s, &ch).shape(), (12, 2));
        assert_eq!(build_correlations(CaseId::Both, &s, &ch).shape(), (20, 2));
        assert_eq!(build_correlations(CaseId::Untrusted, &s, &ch).shape(), (4, 2));

        let no_tap = TrustedSetup { t_m: 1.0, t_k: 1.0, ..s };
        let c = build_correlations(CaseId::Both, &no_tap, &ch);
        for mode in [3, 4, 8, 9] {
            assert_eq!(c.rows(2 * mode, 2).amax(), 0.0);
        }
    }

    #[test]
    fn conditioning_with_zero_correlation_is_identity() {
        let g = trusted_state(CaseId::AliceOnly, &paper_setup()).unwrap();
        let out = condition_on_relay(&g, &DMatrix::zeros(12, 2), &Matrix2::identity()).unwrap();
        assert_eq!(out, g);
        assert!(condition_on_relay(&g, &DMatrix::zeros(4, 2), &Matrix2::identity()).is_err());
    }

    #[test]
    fn spectrum_sizes() {
        let ch = ChannelParams::new(1.0, 0.436516, 0.01, 0.01).unwrap();
        let attack = ch.attack(Default::default()).unwrap();
        for (case, joint, cond) in
            [(CaseId::Untrusted, 2, 1), (CaseId::AliceOnly, 6, 5), (CaseId::BobOnly, 6, 5), (CaseId::Both, 10, 9)]
        {
            let (t_m, t_k) = case.taps(0.9, 0.9);
            let s = TrustedSetup { t_m, t_k, ..paper_setup() };
            let m = assemble_case(case, &s, &ch, &attack).unwrap();
            assert_eq!(m.joint.check_physical("joint").unwrap().len(), joint);
            assert_eq!(m.conditional.check_physical("cond").unwrap().len(), cond);
        }
    }

    #[test]
    fn cases_collapse_without_source_noise_or_taps() {
        let s = TrustedSetup { t_s: 1.0, t_m: 1.0, t_k: 1.0, ..paper_setup() };
        let ch = ChannelParams::new(0.8, 0.5, 0.01, 0.01).unwrap();
        let attack = ch.attack(Default::default()).unwrap();
        let reference = assemble_case(CaseId::Untrusted, &s, &ch, &attack).unwrap().b1;
        for case in CaseId::ALL {
            let b1 = assemble_case(case, &s, &ch, &attack).unwrap().b1;
            assert!(close(b1.x, reference.x, 1e-9) && close(b1.p, reference.p, 1e-9));
            assert!(close(b1.x_cond, reference.x_cond, 1e-9));
        }
    }

    #[test]
    fn eps_s_round_trip() {
        let mut p = ProtocolParams::default();
        let eps = p.eps_s();
        p.set_eps_s(eps).unwrap();
        assert!(close(p.v_s, 3.0, 1e-12));
        assert!(v_s_from_eps_s(1.0, 0.1).is_err());
        assert_eq!("Both".parse::<CaseId>().unwrap(), CaseId::Both);
        assert!("nobody".parse::<CaseId>().is_err());
    }
}
