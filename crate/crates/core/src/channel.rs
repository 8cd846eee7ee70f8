//! Untrusted links: fiber loss, Eve's correlated two-mode attack and the
//! noise both links inject at the relay input.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;

pub const DEFAULT_ALPHA_DB_PER_KM: f64 = 0.2;

/// `10^(-alpha L / 10)`.
pub fn channel_transmittance(l_km: f64, alpha_db_per_km: f64) -> Result<f64> {
    if !(l_km >= 0.0) || !l_km.is_finite() {
        return Err(Error::invalid("distance", l_km, "must be finite and >= 0"));
    }
    if !(alpha_db_per_km >= 0.0) {
        return Err(Error::invalid("attenuation", alpha_db_per_km, "must be >= 0"));
    }
    Ok(10f64.powf(-alpha_db_per_km * l_km / 10.0))
}

/// Largest correlation the two thermal modes can carry:
/// `min{sqrt((wA-1)(wB+1)), sqrt((wA+1)(wB-1))}`.
pub fn negative_epr_phi(omega_a: f64, omega_b: f64) -> Result<f64> {
    check_omega(omega_a)?;
    check_omega(omega_b)?;
    let a = ((omega_a - 1.0) * (omega_b + 1.0)).sqrt();
    let b = ((omega_a + 1.0) * (omega_b - 1.0)).sqrt();
    Ok(a.min(b))
}

/// Thermal variance that makes a channel of transmittance `eta` add
/// input-referred excess noise `epsilon`: `1 + eta eps / (1 - eta)`.
pub fn omega_from_epsilon(eta: f64, epsilon: f64) -> Result<f64> {
    check_eta(eta)?;
    check_epsilon(epsilon)?;
    if eta == 1.0 {
        if epsilon > 0.0 {
            return Err(Error::invalid(
                "transmittance",
                eta,
                "a lossless link cannot carry excess noise through a finite thermal mode",
            ));
        }
        return Ok(1.0);
    }
    Ok(1.0 + eta * epsilon / (1.0 - eta))
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega >= 1.0) || !omega.is_finite() {
        return Err(Error::invalid("thermal variance", omega, "must be finite and >= 1"));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::invalid("transmittance", eta, "must lie in (0, 1]"));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid("excess noise", epsilon, "must be finite and >= 0"));
    }
    Ok(())
}

/// Eve's two injected thermal modes and their x/p correlations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AttackParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: f64,
    pub g_prime: f64,
}

impl AttackParams {
    /// Validated constructor; the resulting two-mode state must be physical.
    pub fn new(omega_a: f64, omega_b: f64, g: f64, g_prime: f64) -> Result<Self> {
        check_omega(omega_a)?;
        check_omega(omega_b)?;
        let attack = AttackParams { omega_a, omega_b, g, g_prime };
        attack.eve_covariance()?;
        Ok(attack)
    }

    /// `g = -phi`, `g' = phi`: the correlated attack that saturates the
    /// uncertainty relation.
    pub fn negative_epr(omega_a: f64, omega_b: f64) -> Result<Self> {
        let phi = negative_epr_phi(omega_a, omega_b)?;
        Ok(AttackParams { omega_a, omega_b, g: -phi, g_prime: phi })
    }

    /// Uncorrelated thermal modes, i.e. independent entangling cloners.
    pub fn one_mode(omega_a: f64, omega_b: f64) -> Result<Self> {
        check_omega(omega_a)?;
        check_omega(omega_b)?;
        Ok(AttackParams { omega_a, omega_b, g: 0.0, g_prime: 0.0 })
    }

    /// `[[wA I, G], [G, wB I]]` over modes `E1`, `E2`, with `G = diag(g, g')`.
    pub fn eve_covariance(&self) -> Result<CovarianceMatrix> {
        let (a, b) = (self.omega_a, self.omega_b);
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            a, 0.0, self.g, 0.0,
            0.0, a, 0.0, self.g_prime,
            self.g, 0.0, b, 0.0,
            0.0, self.g_prime, 0.0, b,
        ]);
        let gamma = CovarianceMatrix::new(m, vec!["E1".into(), "E2".into()])?;
        // The negative EPR choice sits exactly on the boundary, so allow the
        // usual roundoff slack before declaring the correlations unphysical.
        gamma.check_physical("Eve's two-mode state")?;
        Ok(gamma)
    }
}

pub fn eve_covariance(attack: &AttackParams) -> Result<CovarianceMatrix> {
    attack.eve_covariance()
}

/// Link transmittances and input-referred excess noise of both links.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub eta_a: f64,
    pub eta_b: f64,
    pub epsilon_1: f64,
    pub epsilon_2: f64,
}

impl ChannelParams {
    pub fn new(eta_a: f64, eta_b: f64, epsilon_1: f64, epsilon_2: f64) -> Result<Self> {
        check_eta(eta_a)?;
        check_eta(eta_b)?;
        check_epsilon(epsilon_1)?;
        check_epsilon(epsilon_2)?;
        Ok(ChannelParams { eta_a, eta_b, epsilon_1, epsilon_2 })
    }

    pub fn from_distances(
        l_ac_km: f64,
        l_bc_km: f64,
        epsilon_1: f64,
        epsilon_2: f64,
        alpha_db_per_km: f64,
    ) -> Result<Self> {
        Self::new(
            channel_transmittance(l_ac_km, alpha_db_per_km)?,
            channel_transmittance(l_bc_km, alpha_db_per_km)?,
            epsilon_1,
            epsilon_2,
        )
    }

    /// Thermal variance of Eve's mode on the Alice link. A lossless link
    /// reports `1 + eps`, the variance of the additive noise it injects.
    pub fn omega_a(&self) -> f64 {
        link_omega(self.eta_a, self.epsilon_1)
    }

    pub fn omega_b(&self) -> f64 {
        link_omega(self.eta_b, self.epsilon_2)
    }

    /// Attack parameters for `model` at this channel's thermal variances.
    pub fn attack(&self, model: AttackModel) -> Result<AttackParams> {
        match model {
            AttackModel::NegativeEpr => AttackParams::negative_epr(self.omega_a(), self.omega_b()),
            AttackModel::OneMode => AttackParams::one_mode(self.omega_a(), self.omega_b()),
        }
    }
}

fn link_omega(eta: f64, epsilon: f64) -> f64 {
    if eta == 1.0 {
        1.0 + epsilon
    } else {
        1.0 + eta * epsilon / (1.0 - eta)
    }
}

/// Which correlations Eve chooses once the thermal variances are fixed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum AttackModel {
    #[default]
    NegativeEpr,
    OneMode,
}

/// Relay position: symmetric puts it halfway, asymmetric next to Alice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Geometry {
    Symmetric,
    #[default]
    Asymmetric,
}

impl Geometry {
    /// `(L_AC, L_BC)` for a total Alice-Bob distance.
    pub fn split(self, l_ab_km: f64) -> (f64, f64) {
        match self {
            Geometry::Symmetric => (l_ab_km / 2.0, l_ab_km / 2.0),
            Geometry::Asymmetric => (0.0, l_ab_km),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Symmetric => "symmetric",
            Geometry::Asymmetric => "asymmetric",
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "symmetric" | "sym" => Ok(Geometry::Symmetric),
            "asymmetric" | "asym" => Ok(Geometry::Asymmetric),
            _ => Err(Error::Contract(format!("unknown geometry `{s}`"))),
        }
    }
}

/// Noise both links add to the relay's x and p outcomes, in SNU.
///
/// For `eta < 1` this is `(1 - eta) omega` per link and a cross term
/// `g sqrt((1 - eta_A)(1 - eta_B))`. A lossless link contributes its excess
/// noise directly, and the cross term follows the continuous limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelayNoise {
    pub noise_a: f64,
    pub noise_b: f64,
    pub corr_x: f64,
    pub corr_p: f64,
}

impl RelayNoise {
    pub fn new(channel: &ChannelParams, attack: &AttackParams) -> Result<Self> {
        let (nm_a, np_a) = split_noise(channel.eta_a, attack.omega_a);
        let (nm_b, np_b) = split_noise(channel.eta_b, attack.omega_b);
        let phi_max = negative_epr_phi(attack.omega_a, attack.omega_b)?;
        let scale = if phi_max > 0.0 { (nm_a * np_b).sqrt().min((np_a * nm_b).sqrt()) / phi_max } else { 0.0 };
        Ok(RelayNoise {
            noise_a: 0.5 * (nm_a + np_a),
            noise_b: 0.5 * (nm_b + np_b),
            corr_x: attack.g * scale,
            corr_p: attack.g_prime * scale,
        })
    }

    /// `lambda`, the x-quadrature sum.
    pub fn lambda(&self) -> f64 {
        self.noise_a + self.noise_b - 2.0 * self.corr_x
    }

    /// `lambda'`, the p-quadrature sum.
    pub fn lambda_prime(&self) -> f64 {
        self.noise_a + self.noise_b + 2.0 * self.corr_p
    }
}

/// `((1-eta)(omega-1), (1-eta)(omega+1))`, both replaced by `omega - 1` on a
/// lossless link.
fn split_noise(eta: f64, omega: f64) -> (f64, f64) {
    if eta == 1.0 {
        (omega - 1.0, omega - 1.0)
    } else {
        ((1.0 - eta) * (omega - 1.0), (1.0 - eta) * (omega + 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn transmittance() {
        assert_eq!(channel_transmittance(0.0, 0.2).unwrap(), 1.0);
        assert!(close(channel_transmittance(18.0, 0.2).unwrap(), 0.436516, 1e-6));
        assert!(close(channel_transmittance(50.0, 0.2).unwrap(), 0.1, 1e-15));
        assert!(channel_transmittance(-1.0, 0.2).is_err());
        let (a, b) = (channel_transmittance(7.0, 0.2).unwrap(), channel_transmittance(11.0, 0.2).unwrap());
        assert!(close(channel_transmittance(18.0, 0.2).unwrap(), a * b, 1e-12));
    }

    #[test]
    fn phi() {
        assert_eq!(negative_epr_phi(1.0, 5.0).unwrap(), 0.0);
        assert!(close(negative_epr_phi(2.0, 2.0).unwrap(), 3f64.sqrt(), 1e-15));
        assert!(close(negative_epr_phi(1.5, 3.0).unwrap(), 2f64.sqrt(), 1e-15));
        assert!(negative_epr_phi(0.9, 2.0).is_err());
    }

    #[test]
    fn omega() {
        assert_eq!(omega_from_epsilon(0.3, 0.0).unwrap(), 1.0);
        assert!(close(omega_from_epsilon(0.5, 0.01).unwrap(), 1.01, 1e-15));
        let eta = channel_transmittance(18.0, 0.2).unwrap();
        assert!(close(omega_from_epsilon(eta, 0.01).unwrap(), 1.0077467, 1e-7));
        assert_eq!(omega_from_epsilon(1.0, 0.0).unwrap(), 1.0);
        assert!(omega_from_epsilon(1.0, 0.01).is_err());
        assert!(omega_from_epsilon(0.0, 0.01).is_err());
    }

    #[test]
    fn eve_state() {
        let one = AttackParams::one_mode(1.2, 1.4).unwrap().eve_covariance().unwrap();
        assert_eq!(one.matrix()[(0, 2)], 0.0);
        assert_eq!(one.matrix()[(1, 3)], 0.0);

        let nepr = AttackParams::negative_epr(2.0, 2.0).unwrap();
        assert_eq!((nepr.g, nepr.g_prime), (-(3f64.sqrt()), 3f64.sqrt()));
        let nu = nepr.eve_covariance().unwrap().symplectic_eigenvalues().unwrap();
        assert!(close(nu.min(), 1.0, 1e-6));

        match AttackParams::new(1.1, 1.1, 10.0, 10.0) {
            Err(Error::Unphysical { .. }) => {}
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn relay_noise_terms() {
        let ch = ChannelParams::new(0.5, 0.5, 2.0, 2.0).unwrap();
        assert!(close(ch.omega_a(), 3.0, 1e-15));

        let ch = ChannelParams { eta_a: 0.5, eta_b: 0.5, epsilon_1: 1.0, epsilon_2: 1.0 };
        let attack = ch.attack(AttackModel::NegativeEpr).unwrap();
        let noise = RelayNoise::new(&ch, &attack).unwrap();
        assert!(close(noise.lambda(), 2.0 + 3f64.sqrt(), 1e-12));
        assert!(close(noise.lambda_prime(), 2.0 + 3f64.sqrt(), 1e-12));

        let off = RelayNoise::new(&ch, &ch.attack(AttackModel::OneMode).unwrap()).unwrap();
        assert_eq!(off.lambda(), off.lambda_prime());
        assert!(close(off.lambda(), 2.0, 1e-12));
    }

    #[test]
    fn lossless_link_limit() {
        let near = ChannelParams::new(1.0 - 1e-9, 0.4, 0.01, 0.01).unwrap();
        let at = ChannelParams::new(1.0, 0.4, 0.01, 0.01).unwrap();
        assert!(close(at.omega_a(), 1.01, 1e-15));
        let model = AttackModel::NegativeEpr;
        let n_near = RelayNoise::new(&near, &near.attack(model).unwrap()).unwrap();
        let n_at = RelayNoise::new(&at, &at.attack(model).unwrap()).unwrap();
        assert!(close(n_near.lambda(), n_at.lambda(), 1e-6));
        assert!(close(n_near.lambda_prime(), n_at.lambda_prime(), 1e-6));
    }

    #[test]
    fn geometry_split() {
        assert_eq!(Geometry::Symmetric.split(10.0), (5.0, 5.0));
        assert_eq!(Geometry::Asymmetric.split(10.0), (0.0, 10.0));
    }
}
