//! First-principles circuit simulation of the whole protocol. It builds the
//! global pure state mode by mode and performs the relay measurement
//! explicitly, so it shares no algebra with the closed forms in
//! [`crate::protocol`] and serves as their independent check.

use crate::channel::{AttackParams, ChannelParams};
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, Quadrature};
use crate::protocol::{check_taps, B1Variances, CaseId, TrustedSetup};

/// Oracle outputs, in the same mode order as [`crate::protocol::assemble_case`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleOutput {
    pub case: CaseId,
    /// Global state before the relay measurement.
    pub global: CovarianceMatrix,
    pub joint: CovarianceMatrix,
    pub conditional: CovarianceMatrix,
    pub b1: B1Variances,
    /// Every mode outside the trusted set after the relay measurement.
    pub eve: CovarianceMatrix,
}

struct Circuit {
    state: Option<CovarianceMatrix>,
}

impl Circuit {
    fn add(&mut self, part: CovarianceMatrix) -> Result<()> {
        self.state = Some(match self.state.take() {
            None => part,
            Some(s) => s.direct_sum(&part)?,
        });
        Ok(())
    }

    fn state(&self) -> &CovarianceMatrix {
        self.state.as_ref().expect("circuit has modes")
    }

    /// Mixes `a` with a fresh vacuum `vac` and names the outputs.
    fn tap(&mut self, a: &str, vac: &str, t: f64, out_a: &str, out_b: &str) -> Result<()> {
        self.add(CovarianceMatrix::vacuum(vac))?;
        self.mix(a, vac, t, out_a, out_b)
    }

    fn mix(&mut self, a: &str, b: &str, t: f64, out_a: &str, out_b: &str) -> Result<()> {
        let s = self.state().beamsplitter(a, b, t)?;
        let s = s.rename(a, format!("{a}~"))?.rename(b, out_b)?.rename(&format!("{a}~"), out_a)?;
        self.state = Some(s);
        Ok(())
    }

    /// One user's transmitter up to the channel input. Returns the label of
    /// the mode sent into the fiber.
    ///
    /// The tap output `M1` first meets the detector-efficiency beamsplitter
    /// (`M2` transmitted, `P1` reflected); each branch then passes its own
    /// electronic-noise beamsplitter, whose transmitted outputs `M3` and `P2`
    /// are kept.
    fn transmitter(&mut self, setup: &TrustedSetup, names: &SideNames, tap: f64) -> Result<&'static str> {
        let [r, s2, s3, f1, f2, f3, m1, m2, m3, p1, p2, l2, l3, out] = names.modes;
        self.add(CovarianceMatrix::epr(r, s2, setup.v)?)?;
        self.add(CovarianceMatrix::epr(f1, f2, setup.v_s)?)?;
        self.mix(s2, f2, setup.t_s, s3, f3)?;
        if tap == 1.0 {
            return Ok(s3);
        }
        let [v0, v1, v2, v3] = names.vacua;
        self.tap(s3, v0, tap, out, m1)?;
        self.tap(m1, v1, setup.eta_d, m2, p1)?;
        self.tap(m2, v2, setup.eta_e, m3, l2)?;
        self.tap(p1, v3, setup.eta_e, p2, l3)?;
        Ok(out)
    }
}

struct SideNames {
    modes: [&'static str; 14],
    vacua: [&'static str; 4],
}

const ALICE: SideNames = SideNames {
    modes: ["A1", "A2", "A3", "F1", "F2", "F3", "M1", "M2", "M3", "P1", "P2", "X2", "X3", "A4"],
    vacua: ["v0", "v1", "v2", "v3"],
};

const BOB: SideNames = SideNames {
    modes: ["B1", "B2", "B3", "G1", "G2", "G3", "K1", "K2", "K3", "Q1", "Q2", "Y2", "Y3", "B4"],
    vacua: ["u0", "u1", "u2", "u3"],
};

/// Builds the protocol from sources, beamsplitters and Eve's purified
/// two-mode state, then measures `x_C` and `p_D` at the relay.
pub fn build_circuit_oracle(
    case: CaseId,
    setup: &TrustedSetup,
    channel: &ChannelParams,
    attack: &AttackParams,
) -> Result<OracleOutput> {
    setup.validate()?;
    check_taps(case, setup)?;
    for (eta, omega) in [(channel.eta_a, attack.omega_a), (channel.eta_b, attack.omega_b)] {
        if eta == 1.0 && omega > 1.0 {
            return Err(Error::invalid(
                "transmittance",
                eta,
                "a lossless link with thermal noise has no beamsplitter realization",
            ));
        }
    }

    let mut c = Circuit { state: None };
    let a_out = c.transmitter(setup, &ALICE, setup.t_m)?;
    let b_out = c.transmitter(setup, &BOB, setup.t_k)?;

    c.add(attack.eve_covariance()?.purify(&["E1r", "E2r"])?)?;
    c.mix(a_out, "E1", channel.eta_a, "A5", "E1o")?;
    c.mix(b_out, "E2", channel.eta_b, "B5", "E2o")?;
    // D = (A5 + B5)/sqrt2 is homodyned in p, C = (A5 - B5)/sqrt2 in x.
    c.mix("B5", "A5", 0.5, "D", "C")?;

    let global = c.state().clone();
    let measured = global.condition_homodyne("C", Quadrature::X)?.condition_homodyne("D", Quadrature::P)?;

    let keep = case.mode_order();
    let joint = measured.partial_trace(keep)?;
    let others: Vec<&str> = measured.labels().iter().map(|l| l.as_str()).filter(|l| !keep.contains(l)).collect();
    let eve = measured.partial_trace(&others)?;
    let conditional = joint.condition_heterodyne("A1")?;
    let b1 = B1Variances::read(&joint, &conditional)?;
    Ok(OracleOutput { case, global, joint, conditional, b1, eve })
}
