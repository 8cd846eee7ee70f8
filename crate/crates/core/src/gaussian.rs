//! Covariance-matrix algebra for zero-mean Gaussian states.
//!
//! Matrices are stored in xpxp ordering: mode `i` occupies rows and columns
//! `2i` and `2i + 1`. Units are shot-noise units, so the vacuum is the 2x2
//! identity. The symplectic form is block diagonal with blocks `[[0, 1], [-1, 0]]`.

use std::fmt;

use nalgebra::{Complex, DMatrix, DVector, Matrix2, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative symmetry tolerance accepted by [`CovarianceMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Slack on the uncertainty relation `nu >= 1`.
pub const PHYSICAL_TOL: f64 = 1e-9;
/// Symplectic eigenvalues in `[1 - PURE_CLAMP, 1]` are treated as exactly 1.
pub const PURE_CLAMP: f64 = 1e-6;
/// Relative tolerance when pairing `+nu` with `-nu` in the spectrum of `i Omega gamma`.
pub const PAIRING_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeLabel(String);

impl ModeLabel {
    pub fn new(name: impl Into<String>) -> Self {
        ModeLabel(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ModeLabel {
    fn from(s: &str) -> Self {
        ModeLabel(s.to_owned())
    }
}

impl From<String> for ModeLabel {
    fn from(s: String) -> Self {
        ModeLabel(s)
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

/// Symplectic eigenvalues sorted in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticSpectrum(Vec<f64>);

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0.last().copied().unwrap_or(f64::INFINITY)
    }

    /// Von Neumann entropy in bits, `sum g((nu - 1) / 2)`.
    pub fn entropy(&self) -> Result<f64> {
        self.0.iter().try_fold(0.0, |acc, &nu| {
            if nu < 1.0 - PURE_CLAMP {
                return Err(Error::Unphysical { context: "symplectic eigenvalue below 1".into(), value: nu });
            }
            Ok(acc + g_entropy((nu.max(1.0) - 1.0) / 2.0)?)
        })
    }
}

impl From<Vec<f64>> for SymplecticSpectrum {
    fn from(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        SymplecticSpectrum(values)
    }
}

/// `g(x) = (x + 1) log2(x + 1) - x log2(x)`, the entropy of a thermal state
/// with mean photon number `x`.
pub fn g_entropy(x: f64) -> Result<f64> {
    if x.is_nan() || x < -1e-12 {
        return Err(Error::invalid("mean photon number", x, "must be >= 0"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).log2() - x * x.log2())
}

/// Block-diagonal symplectic form for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for i in 0..modes {
        omega[(2 * i, 2 * i + 1)] = 1.0;
        omega[(2 * i + 1, 2 * i)] = -1.0;
    }
    omega
}

/// Real symmetric `2N x 2N` covariance matrix over labelled modes.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DMatrix<f64>,
    labels: Vec<ModeLabel>,
}

impl CovarianceMatrix {
    /// Validates shape, symmetry and label uniqueness. The stored matrix is
    /// exactly symmetrized.
    pub fn new(matrix: DMatrix<f64>, labels: Vec<ModeLabel>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != 2 * labels.len() {
            return Err(Error::Contract(format!(
                "{}x{} matrix for {} modes",
                matrix.nrows(),
                matrix.ncols(),
                labels.len()
            )));
        }
        check_unique(&labels)?;
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if !asym.is_finite() || asym > SYMMETRY_TOL * scale {
            return Err(Error::Contract(format!("matrix not symmetric (max deviation {asym:.3e})")));
        }
        Ok(Self::from_parts(matrix, labels))
    }

    fn from_parts(matrix: DMatrix<f64>, labels: Vec<ModeLabel>) -> Self {
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        CovarianceMatrix { matrix, labels }
    }

    /// Thermal state `v I` on a single mode.
    pub fn thermal(label: impl Into<ModeLabel>, v: f64) -> Result<Self> {
        check_variance(v)?;
        Ok(CovarianceMatrix { matrix: DMatrix::identity(2, 2) * v, labels: vec![label.into()] })
    }

    pub fn vacuum(label: impl Into<ModeLabel>) -> Self {
        CovarianceMatrix { matrix: DMatrix::identity(2, 2), labels: vec![label.into()] }
    }

    /// Two-mode squeezed vacuum `[[V I, zeta Z], [zeta Z, V I]]`, `zeta = sqrt(V^2 - 1)`.
    pub fn epr(a: impl Into<ModeLabel>, b: impl Into<ModeLabel>, v: f64) -> Result<Self> {
        check_variance(v)?;
        let zeta = (v * v - 1.0).sqrt();
        let mut m = DMatrix::identity(4, 4) * v;
        m[(0, 2)] = zeta;
        m[(2, 0)] = zeta;
        m[(1, 3)] = -zeta;
        m[(3, 1)] = -zeta;
        let labels = vec![a.into(), b.into()];
        check_unique(&labels)?;
        Ok(CovarianceMatrix { matrix: m, labels })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }

    pub fn modes(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l.as_str() == label).ok_or_else(|| Error::UnknownMode(label.to_owned()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l.as_str() == label)
    }

    /// The 2x2 block coupling modes `a` and `b`.
    pub fn block(&self, a: &str, b: &str) -> Result<Matrix2<f64>> {
        let (i, j) = (2 * self.index_of(a)?, 2 * self.index_of(b)?);
        Ok(Matrix2::new(
            self.matrix[(i, j)],
            self.matrix[(i, j + 1)],
            self.matrix[(i + 1, j)],
            self.matrix[(i + 1, j + 1)],
        ))
    }

    pub fn variance(&self, mode: &str, q: Quadrature) -> Result<f64> {
        let k = 2 * self.index_of(mode)? + q.offset();
        Ok(self.matrix[(k, k)])
    }

    pub fn rename(mut self, from: &str, to: impl Into<ModeLabel>) -> Result<Self> {
        let to = to.into();
        let i = self.index_of(from)?;
        if self.labels.iter().enumerate().any(|(k, l)| k != i && *l == to) {
            return Err(Error::DuplicateMode(to.0));
        }
        self.labels[i] = to;
        Ok(self)
    }

    /// Mixes modes `a` and `b` on a beamsplitter of transmittance `t`.
    ///
    /// Output `a` carries `sqrt(t) a + sqrt(1-t) b` and output `b` carries
    /// `-sqrt(1-t) a + sqrt(t) b`.
    pub fn beamsplitter(&self, a: &str, b: &str, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid("transmittance", t, "must lie in [0, 1]"));
        }
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        if ia == ib {
            return Err(Error::Contract(format!("beamsplitter needs two modes, got `{a}` twice")));
        }
        let (ct, st) = (t.sqrt(), (1.0 - t).sqrt());
        let mut m = self.matrix.clone();
        for q in 0..2 {
            let (i, j) = (2 * ia + q, 2 * ib + q);
            let (ri, rj) = (m.row(i).clone_owned(), m.row(j).clone_owned());
            m.set_row(i, &(&ri * ct + &rj * st));
            m.set_row(j, &(&rj * ct - &ri * st));
        }
        for q in 0..2 {
            let (i, j) = (2 * ia + q, 2 * ib + q);
            let (ci, cj) = (m.column(i).clone_owned(), m.column(j).clone_owned());
            m.set_column(i, &(&ci * ct + &cj * st));
            m.set_column(j, &(&cj * ct - &ci * st));
        }
        Ok(Self::from_parts(m, self.labels.clone()))
    }

    /// Absolute eigenvalues of `i Omega gamma`, paired and sorted descending.
    ///
    /// Uses the Hermitian similarity `L^T (i Omega) L` with `gamma = L L^T`, so
    /// the matrix must be positive definite.
    pub fn symplectic_eigenvalues(&self) -> Result<SymplecticSpectrum> {
        let n = self.modes();
        let chol = self.matrix.clone().cholesky().ok_or_else(|| self.not_positive_definite())?;
        let l = chol.l();
        let a = l.transpose() * symplectic_form(n) * &l;
        let h = a.map(|x| Complex::new(0.0, x));
        let eig = SymmetricEigen::try_new(h, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        let mut values = Vec::with_capacity(n);
        for k in 0..n {
            let neg = -ev[k];
            let pos = ev[2 * n - 1 - k];
            if (pos - neg).abs() > PAIRING_TOL * pos.abs().max(1.0) {
                return Err(Error::Numerical(format!("symplectic pair mismatch: +{pos} vs -{neg}")));
            }
            values.push(0.5 * (pos + neg));
        }
        Ok(values.into())
    }

    fn not_positive_definite(&self) -> Error {
        let lowest = self.matrix.clone().symmetric_eigenvalues().min();
        Error::Unphysical { context: "covariance matrix is not positive definite".into(), value: lowest }
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<f64> {
        self.symplectic_eigenvalues()?.entropy()
    }

    /// Fails with [`Error::Unphysical`] unless every symplectic eigenvalue is
    /// at least `1 - PHYSICAL_TOL`.
    pub fn check_physical(&self, context: &str) -> Result<SymplecticSpectrum> {
        let spectrum = self.symplectic_eigenvalues().map_err(|e| match e {
            Error::Unphysical { value, context: c } => Error::Unphysical { context: format!("{context}: {c}"), value },
            other => other,
        })?;
        if spectrum.min() < 1.0 - PHYSICAL_TOL {
            return Err(Error::Unphysical { context: context.to_owned(), value: spectrum.min() });
        }
        Ok(spectrum)
    }

    pub fn is_physical(&self) -> bool {
        self.check_physical("").is_ok()
    }

    /// Conditional state of the other modes after homodyning `mode` on `q`.
    pub fn condition_homodyne(&self, mode: &str, q: Quadrature) -> Result<Self> {
        let m = self.index_of(mode)?;
        let k = 2 * m + q.offset();
        let v = self.matrix[(k, k)];
        if !(v > 0.0) {
            return Err(Error::SingularMeasurement(mode.to_owned()));
        }
        let rest = self.indices_without(m);
        let c = self.matrix.select_rows(&rest).column(k).clone_owned();
        let g = self.matrix.select_rows(&rest).select_columns(&rest);
        Ok(Self::from_parts(g - &c * c.transpose() / v, self.labels_without(m)))
    }

    /// Conditional state of the other modes after heterodyning `mode`:
    /// `gamma_rest - sigma (gamma_m + I)^-1 sigma^T`.
    pub fn condition_heterodyne(&self, mode: &str) -> Result<Self> {
        let m = self.index_of(mode)?;
        let rest = self.indices_without(m);
        let meas = [2 * m, 2 * m + 1];
        let sigma = self.matrix.select_rows(&rest).select_columns(&meas);
        let gm = self.matrix.select_rows(&meas).select_columns(&meas) + DMatrix::identity(2, 2);
        let inv = gm.try_inverse().ok_or_else(|| Error::SingularMeasurement(mode.to_owned()))?;
        let g = self.matrix.select_rows(&rest).select_columns(&rest);
        Ok(Self::from_parts(g - &sigma * inv * sigma.transpose(), self.labels_without(m)))
    }

    /// Reduced state on `keep`, in the given order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let mut labels = Vec::with_capacity(keep.len());
        let mut idx = Vec::with_capacity(2 * keep.len());
        for name in keep {
            let i = self.index_of(name)?;
            labels.push(self.labels[i].clone());
            idx.extend([2 * i, 2 * i + 1]);
        }
        check_unique(&labels)?;
        let m = self.matrix.select_rows(&idx).select_columns(&idx);
        Ok(CovarianceMatrix { matrix: m, labels })
    }

    /// Simultaneous row/column permutation; `order` must list every mode once.
    pub fn reorder(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.modes() {
            return Err(Error::Contract(format!("reorder expects {} labels, got {}", self.modes(), order.len())));
        }
        self.partial_trace(order)
    }

    pub fn direct_sum(&self, other: &CovarianceMatrix) -> Result<Self> {
        let (n, m) = (self.matrix.nrows(), other.matrix.nrows());
        let mut out = DMatrix::zeros(n + m, n + m);
        out.view_mut((0, 0), (n, n)).copy_from(&self.matrix);
        out.view_mut((n, n), (m, m)).copy_from(&other.matrix);
        let labels: Vec<ModeLabel> = self.labels.iter().chain(&other.labels).cloned().collect();
        check_unique(&labels)?;
        Ok(CovarianceMatrix { matrix: out, labels })
    }

    /// Williamson normal form: returns a symplectic `S` and the spectrum `nu`
    /// with `gamma = S diag(nu_1, nu_1, ..., nu_N, nu_N) S^T`. The diagonal
    /// follows the returned (descending) spectrum order.
    pub fn williamson(&self) -> Result<(DMatrix<f64>, SymplecticSpectrum)> {
        let n = self.modes();
        let dim = 2 * n;
        let eig = SymmetricEigen::new(self.matrix.clone());
        if eig.eigenvalues.min() <= 0.0 {
            return Err(self.not_positive_definite());
        }
        let u = &eig.eigenvectors;
        let sqrt = u * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * u.transpose();
        let inv_sqrt = u * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt())) * u.transpose();
        // K has eigenvalues +-i / nu; K^T K carries 1 / nu^2 twice.
        let k = &inv_sqrt * symplectic_form(n) * &inv_sqrt;
        let p = SymmetricEigen::new(k.transpose() * &k);

        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(dim);
        let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::with_capacity(n);
        let mut used = vec![false; dim];
        while pairs.len() < n {
            // Pick the unused eigenvector with the largest component outside
            // the span found so far; this stays stable under degeneracy.
            let mut best: Option<(usize, DVector<f64>, f64)> = None;
            for c in (0..dim).filter(|&c| !used[c]) {
                let mut v = p.eigenvectors.column(c).clone_owned();
                for b in &basis {
                    let d = b.dot(&v);
                    v.axpy(-d, b, 1.0);
                }
                let norm = v.norm();
                if best.as_ref().is_none_or(|(_, _, bn)| norm > *bn) {
                    best = Some((c, v, norm));
                }
            }
            let (c, v, norm) = best.ok_or_else(|| Error::Numerical("Williamson basis exhausted".into()))?;
            if norm < 1e-6 {
                return Err(Error::Numerical("Williamson basis degenerate".into()));
            }
            used[c] = true;
            let uvec = v / norm;
            let ku = &k * &uvec;
            let inv_nu = ku.norm();
            let w = ku / inv_nu;
            basis.push(uvec.clone());
            basis.push(w.clone());
            pairs.push((1.0 / inv_nu, w, uvec));
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

        let mut o = DMatrix::zeros(dim, dim);
        let mut scale = DVector::zeros(dim);
        for (i, (nu, w, uvec)) in pairs.iter().enumerate() {
            o.set_column(2 * i, w);
            o.set_column(2 * i + 1, uvec);
            scale[2 * i] = 1.0 / nu.sqrt();
            scale[2 * i + 1] = 1.0 / nu.sqrt();
        }
        let s = sqrt * o * DMatrix::from_diagonal(&scale);
        let spectrum = SymplecticSpectrum(pairs.iter().map(|p| p.0).collect());
        Ok((s, spectrum))
    }

    /// A pure state on `self` plus one ancilla per mode whose marginal on the
    /// original modes is `self`.
    pub fn purify(&self, ancillas: &[&str]) -> Result<Self> {
        let n = self.modes();
        if ancillas.len() != n {
            return Err(Error::Contract(format!(
                "purification of {n} modes needs {n} ancillas, got {}",
                ancillas.len()
            )));
        }
        let (s, spectrum) = self.williamson()?;
        if spectrum.min() < 1.0 - PHYSICAL_TOL {
            return Err(Error::Unphysical { context: "cannot purify".into(), value: spectrum.min() });
        }
        let dim = 2 * n;
        let mut diag = DMatrix::zeros(2 * dim, 2 * dim);
        for (i, &nu) in spectrum.values().iter().enumerate() {
            let nu = nu.max(1.0);
            let zeta = (nu * nu - 1.0).sqrt();
            let (a, b) = (2 * i, dim + 2 * i);
            for q in 0..2 {
                diag[(a + q, a + q)] = nu;
                diag[(b + q, b + q)] = nu;
                let sign = if q == 0 { 1.0 } else { -1.0 };
                diag[(a + q, b + q)] = sign * zeta;
                diag[(b + q, a + q)] = sign * zeta;
            }
        }
        let mut t = DMatrix::identity(2 * dim, 2 * dim);
        t.view_mut((0, 0), (dim, dim)).copy_from(&s);
        let labels: Vec<ModeLabel> =
            self.labels.iter().cloned().chain(ancillas.iter().map(|a| ModeLabel::from(*a))).collect();
        check_unique(&labels)?;
        Ok(Self::from_parts(&t * diag * t.transpose(), labels))
    }

    fn indices_without(&self, m: usize) -> Vec<usize> {
        (0..2 * self.modes()).filter(|&k| k / 2 != m).collect()
    }

    fn labels_without(&self, m: usize) -> Vec<ModeLabel> {
        self.labels.iter().enumerate().filter(|&(i, _)| i != m).map(|(_, l)| l.clone()).collect()
    }
}

pub fn epr_state(a: impl Into<ModeLabel>, b: impl Into<ModeLabel>, v: f64) -> Result<CovarianceMatrix> {
    CovarianceMatrix::epr(a, b, v)
}

pub fn thermal_state(label: impl Into<ModeLabel>, v: f64) -> Result<CovarianceMatrix> {
    CovarianceMatrix::thermal(label, v)
}

pub fn vacuum(label: impl Into<ModeLabel>) -> CovarianceMatrix {
    CovarianceMatrix::vacuum(label)
}

pub fn apply_beamsplitter(gamma: &CovarianceMatrix, a: &str, b: &str, t: f64) -> Result<CovarianceMatrix> {
    gamma.beamsplitter(a, b, t)
}

pub fn symplectic_eigenvalues(gamma: &CovarianceMatrix) -> Result<SymplecticSpectrum> {
    gamma.symplectic_eigenvalues()
}

pub fn gaussian_entropy(gamma: &CovarianceMatrix) -> Result<f64> {
    gamma.entropy()
}

pub fn condition_homodyne(gamma: &CovarianceMatrix, mode: &str, q: Quadrature) -> Result<CovarianceMatrix> {
    gamma.condition_homodyne(mode, q)
}

pub fn condition_heterodyne(gamma: &CovarianceMatrix, mode: &str) -> Result<CovarianceMatrix> {
    gamma.condition_heterodyne(mode)
}

pub fn partial_trace(gamma: &CovarianceMatrix, keep: &[&str]) -> Result<CovarianceMatrix> {
    gamma.partial_trace(keep)
}

pub fn reorder(gamma: &CovarianceMatrix, order: &[&str]) -> Result<CovarianceMatrix> {
    gamma.reorder(order)
}

pub fn direct_sum(a: &CovarianceMatrix, b: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    a.direct_sum(b)
}

fn check_variance(v: f64) -> Result<()> {
    if v.is_nan() || v < 1.0 {
        return Err(Error::invalid("variance", v, "must be >= 1 (vacuum)"));
    }
    Ok(())
}

fn check_unique(labels: &[ModeLabel]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateMode(l.0.clone()));
        }
    }
    Ok(())
}
