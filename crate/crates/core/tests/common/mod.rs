//! Random physical states and parameter points shared by the integration tests.

#![allow(dead_code)]

use cvmdi_core::channel::ChannelParams;
use cvmdi_core::protocol::{CaseId, TrustedSetup};
use cvmdi_core::{CovarianceMatrix, ModeLabel};
use nalgebra::DMatrix;
use rand::Rng;

/// Symplectic matrix acting on mode pair `(i, j)` of an `n`-mode system as a
/// beamsplitter of angle `theta`, built independently of the library.
fn mixer(n: usize, i: usize, j: usize, theta: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let (c, sn) = (theta.cos(), theta.sin());
    for q in 0..2 {
        let (a, b) = (2 * i + q, 2 * j + q);
        s[(a, a)] = c;
        s[(a, b)] = sn;
        s[(b, a)] = -sn;
        s[(b, b)] = c;
    }
    s
}

/// Single-mode squeezing by `r` followed by rotation `phi` on mode `i`.
fn squeezer(n: usize, i: usize, r: f64, phi: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    let (c, sn) = (phi.cos(), phi.sin());
    let (a, b) = (r.exp(), (-r).exp());
    let k = 2 * i;
    s[(k, k)] = c * a;
    s[(k, k + 1)] = -sn * b;
    s[(k + 1, k)] = sn * a;
    s[(k + 1, k + 1)] = c * b;
    s
}

/// Thermal product state pushed through a random passive-plus-squeezing
/// network. Labels are `m0, m1, ...`.
pub fn random_physical_state<R: Rng>(rng: &mut R, modes: usize) -> CovarianceMatrix {
    let n = modes;
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let nu = if rng.random_bool(0.3) { 1.0 } else { 1.0 + rng.random::<f64>() * 9.0 };
        g[(2 * i, 2 * i)] = nu;
        g[(2 * i + 1, 2 * i + 1)] = nu;
    }
    for _ in 0..2 * n {
        let i = rng.random_range(0..n);
        let s = squeezer(n, i, rng.random_range(-1.0..1.0), rng.random_range(0.0..6.3));
        g = &s * g * s.transpose();
        if n > 1 {
            let j = (i + rng.random_range(1..n)) % n;
            let m = mixer(n, i, j, rng.random_range(0.0..6.3));
            g = &m * g * m.transpose();
        }
    }
    let g = (&g + g.transpose()) * 0.5;
    let labels = (0..n).map(|i| ModeLabel::new(format!("m{i}"))).collect();
    CovarianceMatrix::new(g, labels).expect("valid random state")
}

/// A random valid hardware and channel point for `case`.
pub fn random_point<R: Rng>(rng: &mut R, case: CaseId) -> (TrustedSetup, ChannelParams) {
    let eta_m_a = rng.random_range(0.05..0.999);
    let eta_m_b = rng.random_range(0.05..0.999);
    let (t_m, t_k) = case.taps(eta_m_a, eta_m_b);
    let setup = TrustedSetup {
        v: rng.random_range(1.5..120.0),
        t_s: rng.random_range(0.5..0.999),
        v_s: rng.random_range(1.0..10.0),
        t_m,
        t_k,
        eta_d: rng.random_range(0.05..0.95),
        eta_e: rng.random_range(0.5..1.0),
    };
    let channel = ChannelParams::new(
        rng.random_range(0.01..0.999),
        rng.random_range(0.01..0.999),
        rng.random_range(0.0..0.1),
        rng.random_range(0.0..0.1),
    )
    .expect("valid channel");
    (setup, channel)
}
