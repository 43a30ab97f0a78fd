//! Dense Hermitian matrices over labeled tensor-product bases.
//!
//! Sites are indexed from 0, and site 0 is the most significant digit of the
//! mixed-radix basis index. Input sites carry the polarization alphabet
//! `{H, V}`; channel output sites carry `{H, V, vac}`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entries may deviate from the conjugate transpose by at most this much.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Eigenvalues below this are treated as a genuine PSD violation.
pub const PSD_HARD_TOL: f64 = -1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    H,
    V,
    Vac,
}

impl Level {
    fn digit(self) -> usize {
        match self {
            Level::H => 0,
            Level::V => 1,
            Level::Vac => 2,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::H => "H",
            Level::V => "V",
            Level::Vac => "vac",
        })
    }
}

/// Per-site alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// `{H, V}`: a single-photon polarization qubit.
    Polarization,
    /// `{H, V, vac}`: polarization plus the no-photon level.
    WithVacuum,
}

impl Alphabet {
    pub fn size(self) -> usize {
        match self {
            Alphabet::Polarization => 2,
            Alphabet::WithVacuum => 3,
        }
    }

    fn level(self, digit: usize) -> Level {
        match digit {
            0 => Level::H,
            1 => Level::V,
            _ => Level::Vac,
        }
    }
}

/// Labeled mixed-radix basis of a multi-site Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Basis {
    sites: Vec<Alphabet>,
}

impl Basis {
    /// An empty basis (no sites) has dimension 1; it labels scalars such as
    /// the result of tracing out every site.
    pub fn new(sites: Vec<Alphabet>) -> Self {
        Basis { sites }
    }

    pub fn qubits(n: usize) -> Self {
        Basis::new(vec![Alphabet::Polarization; n])
    }

    pub fn qutrits(n: usize) -> Self {
        Basis::new(vec![Alphabet::WithVacuum; n])
    }

    pub fn sites(&self) -> &[Alphabet] {
        &self.sites
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn dim(&self) -> usize {
        self.sites.iter().map(|a| a.size()).product()
    }

    /// Basis index to per-site labels.
    pub fn label(&self, mut index: usize) -> Result<Vec<Level>> {
        if index >= self.dim() {
            return Err(Error::validation(format!(
                "basis index {index} out of range for dimension {}",
                self.dim()
            )));
        }
        let mut labels = vec![Level::H; self.sites.len()];
        for (slot, alphabet) in labels.iter_mut().zip(&self.sites).rev() {
            *slot = alphabet.level(index % alphabet.size());
            index /= alphabet.size();
        }
        Ok(labels)
    }

    /// Per-site labels to basis index.
    pub fn index(&self, labels: &[Level]) -> Result<usize> {
        if labels.len() != self.sites.len() {
            return Err(Error::validation(format!(
                "expected {} site labels, got {}",
                self.sites.len(),
                labels.len()
            )));
        }
        let mut index = 0;
        for (site, (&level, alphabet)) in labels.iter().zip(&self.sites).enumerate() {
            let digit = level.digit();
            if digit >= alphabet.size() {
                return Err(Error::validation(format!(
                    "level {level} not in the alphabet of site {site}"
                )));
            }
            index = index * alphabet.size() + digit;
        }
        Ok(index)
    }

    pub fn concat(&self, other: &Basis) -> Basis {
        let mut sites = self.sites.clone();
        sites.extend_from_slice(&other.sites);
        Basis::new(sites)
    }

    /// Per-site digits of every basis index, row-major.
    fn digits(&self) -> Vec<Vec<usize>> {
        let n = self.sites.len();
        (0..self.dim())
            .map(|mut index| {
                let mut d = vec![0; n];
                for (slot, alphabet) in d.iter_mut().zip(&self.sites).rev() {
                    *slot = index % alphabet.size();
                    index /= alphabet.size();
                }
                d
            })
            .collect()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.sites.len()];
        for s in (0..self.sites.len().saturating_sub(1)).rev() {
            strides[s] = strides[s + 1] * self.sites[s + 1].size();
        }
        strides
    }
}

/// A dense Hermitian matrix over a labeled basis.
///
/// Unit trace is not enforced, since channel blocks are subnormalized; use
/// [`DensityMatrix::validate_state`] when a normalized state is required.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: Basis,
    data: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(basis: Basis, data: DMatrix<Complex64>) -> Result<Self> {
        let dim = basis.dim();
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::validation(format!(
                "matrix is {}x{} but basis dimension is {dim}",
                data.nrows(),
                data.ncols()
            )));
        }
        let rho = DensityMatrix { basis, data };
        let dev = rho.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::validation(format!(
                "matrix is not Hermitian (max deviation {dev:e})"
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_parts(basis: Basis, data: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(data.nrows(), basis.dim());
        DensityMatrix { basis, data }
    }

    pub fn from_real(basis: Basis, data: DMatrix<f64>) -> Result<Self> {
        DensityMatrix::new(basis, data.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn from_diagonal(basis: Basis, diagonal: &[f64]) -> Result<Self> {
        if diagonal.len() != basis.dim() {
            return Err(Error::validation(format!(
                "diagonal has {} entries but basis dimension is {}",
                diagonal.len(),
                basis.dim()
            )));
        }
        let data = DMatrix::from_fn(diagonal.len(), diagonal.len(), |i, j| {
            if i == j {
                Complex64::new(diagonal[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(DensityMatrix { basis, data })
    }

    /// `|psi><psi|` for an amplitude vector over `basis`.
    pub fn from_pure(basis: Basis, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::validation(format!(
                "state vector has {} amplitudes but basis dimension is {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let n = amplitudes.len();
        let data = DMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj());
        Ok(DensityMatrix { basis, data })
    }

    /// Projector onto a single labeled basis vector.
    pub fn basis_projector(basis: Basis, labels: &[Level]) -> Result<Self> {
        let index = basis.index(labels)?;
        let mut diagonal = vec![0.0; basis.dim()];
        diagonal[index] = 1.0;
        DensityMatrix::from_diagonal(basis, &diagonal)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.data[(i, i)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn scaled(&self, factor: f64) -> DensityMatrix {
        DensityMatrix::from_parts(self.basis.clone(), self.data.map(|z| z * factor))
    }

    /// Max absolute entrywise difference from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.data.nrows();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Max absolute entrywise difference; `None` when the bases differ.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Option<f64> {
        if self.basis != other.basis {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.data)
    }

    /// Checks the full density-operator contract: Hermitian within `tol`,
    /// unit trace within `tol`, and no eigenvalue below `-1e-10`.
    pub fn validate_state(&self, tol: f64) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > tol {
            return Err(Error::validation(format!(
                "matrix is not Hermitian (max deviation {dev:e})"
            )));
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > tol {
            return Err(Error::validation(format!("trace is {trace}, expected 1")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -1e-10 {
            return Err(Error::PsdViolation { min_eigenvalue: min });
        }
        Ok(())
    }

    /// Reorders sites: site `s` of the result is site `perm[s]` of `self`.
    pub fn permute_sites(&self, perm: &[usize]) -> Result<DensityMatrix> {
        let n = self.basis.site_count();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::validation(format!(
                "{perm:?} is not a permutation of {n} sites"
            )));
        }
        let sites: Vec<Alphabet> = perm.iter().map(|&p| self.basis.sites[p]).collect();
        let new_basis = Basis::new(sites);
        let old_strides = self.basis.strides();
        let source: Vec<usize> = new_basis
            .digits()
            .iter()
            .map(|d| d.iter().zip(perm).map(|(&digit, &p)| digit * old_strides[p]).sum())
            .collect();
        let dim = new_basis.dim();
        let data = DMatrix::from_fn(dim, dim, |i, j| self.data[(source[i], source[j])]);
        Ok(DensityMatrix::from_parts(new_basis, data))
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `-sum x log2 x` over a spectrum, with `x log x := 0` for `x <= 0`.
///
/// The spectrum need not be normalized; for a subnormalized block of trace
/// `t` this equals `-t log2 t + t S(block / t)`.
pub fn spectral_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let dev = rho.hermiticity_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::validation(format!(
            "entropy of a non-Hermitian matrix (max deviation {dev:e})"
        )));
    }
    let ev = rho.eigenvalues();
    if let Some(&min) = ev.first() {
        if min < PSD_HARD_TOL {
            return Err(Error::PsdViolation { min_eigenvalue: min });
        }
    }
    Ok(spectral_entropy(&ev))
}

/// Traces out `sites`, keeping the remaining sites in their original order.
pub fn partial_trace(rho: &DensityMatrix, sites: &[usize]) -> Result<DensityMatrix> {
    let n = rho.basis.site_count();
    if let Some(&bad) = sites.iter().find(|&&s| s >= n) {
        return Err(Error::validation(format!(
            "site {bad} out of range for {n} sites"
        )));
    }
    let traced: Vec<bool> = (0..n).map(|s| sites.contains(&s)).collect();
    let kept_basis = Basis::new(
        (0..n)
            .filter(|&s| !traced[s])
            .map(|s| rho.basis.sites[s])
            .collect(),
    );
    let traced_basis = Basis::new(
        (0..n)
            .filter(|&s| traced[s])
            .map(|s| rho.basis.sites[s])
            .collect(),
    );
    let kept_strides = kept_basis.strides();
    let traced_strides = traced_basis.strides();

    // (kept index, traced index) of every full basis index
    let split: Vec<(usize, usize)> = rho
        .basis
        .digits()
        .iter()
        .map(|d| {
            let (mut k, mut t, mut ki, mut ti) = (0, 0, 0, 0);
            for (s, &digit) in d.iter().enumerate() {
                if traced[s] {
                    t += digit * traced_strides[ti];
                    ti += 1;
                } else {
                    k += digit * kept_strides[ki];
                    ki += 1;
                }
            }
            (k, t)
        })
        .collect();

    let dim = kept_basis.dim();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += rho.data[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::from_parts(kept_basis, out))
}

/// Tensor product `a ⊗ b`; the sites of `a` come first.
pub fn kron(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::from_parts(a.basis.concat(&b.basis), a.data.kronecker(&b.data))
}
