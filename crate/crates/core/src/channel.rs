//! The generalized erasure channel with polarization-dependent losses.
//!
//! A photon in polarization `H` (resp. `V`) survives with probability `p_h`
//! (resp. `p_v`); a lost photon leaves the vacuum level. On a qubit input the
//! channel acts as `Λ_F ⊕ (Tr ∘ Λ_G)` with `F = diag(√p_h, √p_v)` and
//! `G = diag(√(1-p_h), √(1-p_v))`. The complementary channel is the same map
//! with `p -> 1 - p`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmatrix::{hermitian_eigenvalues, spectral_entropy, von_neumann_entropy, Alphabet, Basis, DensityMatrix};

/// Largest block length for which the full `3^n`-dimensional output is built.
pub const DENSE_MAX_SITES: usize = 8;
/// Largest block length accepted by the erasure-pattern path.
pub const BLOCKED_MAX_SITES: usize = 16;
/// Block lengths up to this use the dense path in [`coherent_information_oracle`].
pub const DENSE_ORACLE_MAX_SITES: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Transmission factors of the horizontal and vertical polarizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    p_h: f64,
    p_v: f64,
}

impl ChannelParams {
    pub fn new(p_h: f64, p_v: f64) -> Result<Self> {
        for (name, p) in [("p_h", p_h), ("p_v", p_v)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::validation(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        Ok(ChannelParams { p_h, p_v })
    }

    pub fn p_h(&self) -> f64 {
        self.p_h
    }

    pub fn p_v(&self) -> f64 {
        self.p_v
    }

    /// Parameters of the complementary channel.
    pub fn complement(&self) -> ChannelParams {
        ChannelParams {
            p_h: 1.0 - self.p_h,
            p_v: 1.0 - self.p_v,
        }
    }

    /// Mirror image under `H <-> V`.
    pub fn swapped(&self) -> ChannelParams {
        ChannelParams {
            p_h: self.p_v,
            p_v: self.p_h,
        }
    }

    pub fn filters(&self) -> FilterPair {
        FilterPair {
            f: [self.p_h.sqrt(), self.p_v.sqrt()],
            g: [(1.0 - self.p_h).sqrt(), (1.0 - self.p_v).sqrt()],
        }
    }
}

impl fmt::Display for ChannelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p_h = {}, p_v = {})", self.p_h, self.p_v)
    }
}

/// Diagonals of the transmission filter `F` and the loss filter `G`, indexed
/// by polarization (`[H, V]`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterPair {
    pub f: [f64; 2],
    pub g: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    Degradable,
    Antidegradable,
    Both,
    Neither,
}

impl Classification {
    /// True for the antidegradable region, including points that are also degradable.
    pub fn is_antidegradable(self) -> bool {
        matches!(self, Classification::Antidegradable | Classification::Both)
    }

    pub fn is_degradable(self) -> bool {
        matches!(self, Classification::Degradable | Classification::Both)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Degradable => "degradable",
            Classification::Antidegradable => "antidegradable",
            Classification::Both => "both",
            Classification::Neither => "neither",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Exact set predicates; no tolerance is applied to the parameter values.
pub fn classify(params: ChannelParams) -> Classification {
    let (h, v) = (params.p_h, params.p_v);
    let anti = h.max(v) <= 0.5 || h == 0.0 || v == 0.0;
    let deg = h.min(v) >= 0.5 || h == 1.0 || v == 1.0;
    match (deg, anti) {
        (true, true) => Classification::Both,
        (true, false) => Classification::Degradable,
        (false, true) => Classification::Antidegradable,
        (false, false) => Classification::Neither,
    }
}

fn check_qubit_state(rho: &DensityMatrix) -> Result<()> {
    if rho.basis() != &Basis::qubits(1) {
        return Err(Error::validation("channel input must be a single polarization qubit"));
    }
    rho.validate_state(1e-9)
}

/// `Γ[ρ]` as a 3x3 matrix over `{H, V, vac}`.
pub fn apply_gamma(params: ChannelParams, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_qubit_state(rho)?;
    let FilterPair { f, .. } = params.filters();
    let m = rho.matrix();
    let mut out = DMatrix::<Complex64>::zeros(3, 3);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = m[(i, j)] * (f[i] * f[j]);
        }
    }
    out[(2, 2)] = Complex64::new(
        (1.0 - params.p_h) * m[(0, 0)].re + (1.0 - params.p_v) * m[(1, 1)].re,
        0.0,
    );
    Ok(DensityMatrix::from_parts(Basis::qutrits(1), out))
}

pub fn apply_gamma_complement(params: ChannelParams, rho: &DensityMatrix) -> Result<DensityMatrix> {
    apply_gamma(params.complement(), rho)
}

/// Kraus operators `K₁ = F` (embedded in `{H, V}`), `K₂ = √(1-p_h)|vac⟩⟨H|`,
/// `K₃ = √(1-p_v)|vac⟩⟨V|`, each 3x2.
pub fn kraus_operators(params: ChannelParams) -> [DMatrix<Complex64>; 3] {
    let FilterPair { f, g } = params.filters();
    let mut k1 = DMatrix::zeros(3, 2);
    k1[(0, 0)] = Complex64::new(f[0], 0.0);
    k1[(1, 1)] = Complex64::new(f[1], 0.0);
    let mut k2 = DMatrix::zeros(3, 2);
    k2[(2, 0)] = Complex64::new(g[0], 0.0);
    let mut k3 = DMatrix::zeros(3, 2);
    k3[(2, 1)] = Complex64::new(g[1], 0.0);
    [k1, k2, k3]
}

/// `Σ Kᵢ ρ Kᵢ†`.
pub fn apply_kraus(kraus: &[DMatrix<Complex64>], rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let rows = kraus.first().map_or(0, |k| k.nrows());
    kraus
        .iter()
        .fold(DMatrix::zeros(rows, rows), |acc, k| acc + k * rho * k.adjoint())
}

/// Environment output `W_ij = tr(Kᵢ ρ Kⱼ†)` of the Stinespring dilation built
/// from [`kraus_operators`]. Isometrically equivalent to
/// [`apply_gamma_complement`], so the two share a spectrum.
pub fn complement_via_gram(params: ChannelParams, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_qubit_state(rho)?;
    let kraus = kraus_operators(params);
    let m = rho.matrix();
    let w = DMatrix::from_fn(3, 3, |i, j| (&kraus[i] * m * kraus[j].adjoint()).trace());
    Ok(DensityMatrix::from_parts(Basis::qutrits(1), w))
}

fn check_tensor_input(rho: &DensityMatrix, limit: usize) -> Result<usize> {
    let n = rho.basis().site_count();
    if n == 0 || rho.basis().sites().iter().any(|&a| a != Alphabet::Polarization) {
        return Err(Error::validation("input must be a state of one or more polarization qubits"));
    }
    if n > limit {
        return Err(Error::ResourceLimit {
            what: "channel uses",
            requested: n,
            limit,
        });
    }
    let dev = rho.hermiticity_deviation();
    if dev > 1e-9 {
        return Err(Error::validation(format!("input is not Hermitian (max deviation {dev:e})")));
    }
    Ok(n)
}

/// `Γ^⊗n[ρ]` (or `Γ̃^⊗n[ρ]` when `complement` is set) as a dense `3^n` matrix.
pub fn apply_tensor_power(
    params: ChannelParams,
    rho: &DensityMatrix,
    complement: bool,
) -> Result<DensityMatrix> {
    apply_tensor_power_limited(params, rho, complement, DENSE_MAX_SITES)
}

pub fn apply_tensor_power_limited(
    params: ChannelParams,
    rho: &DensityMatrix,
    complement: bool,
    max_sites: usize,
) -> Result<DensityMatrix> {
    let n = check_tensor_input(rho, max_sites)?;
    let params = if complement { params.complement() } else { params };
    let FilterPair { f, g } = params.filters();
    let loss = [g[0] * g[0], g[1] * g[1]];

    // Sites are converted one at a time: after step s, sites 0..=s carry the
    // vacuum level and the rest are still qubits.
    let mut current = rho.matrix().clone();
    for s in 0..n {
        let low = 1usize << (n - s - 1);
        let in_dim = current.nrows();
        let out_dim = in_dim / 2 * 3;
        let split = |idx: usize| (idx / (2 * low), (idx / low) % 2, idx % low);
        let join = |hi: usize, d: usize, lo: usize| (hi * 3 + d) * low + lo;
        let mut next = DMatrix::<Complex64>::zeros(out_dim, out_dim);
        for c in 0..in_dim {
            let (hc, dc, lc) = split(c);
            for r in 0..in_dim {
                let z = current[(r, c)];
                if z == ZERO {
                    continue;
                }
                let (hr, dr, lr) = split(r);
                next[(join(hr, dr, lr), join(hc, dc, lc))] += z * (f[dr] * f[dc]);
                if dr == dc {
                    next[(join(hr, 2, lr), join(hc, 2, lc))] += z * loss[dr];
                }
            }
        }
        current = next;
    }
    Ok(DensityMatrix::from_parts(Basis::qutrits(n), current))
}

/// One direct summand of `Γ^⊗n[ρ]`: the photons at `erased` sites were lost,
/// the others survived. `block` lives on the surviving sites (in order) and
/// carries trace equal to the probability of this erasure pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ErasureBlock {
    pub erased: Vec<usize>,
    pub block: DensityMatrix,
}

impl ErasureBlock {
    pub fn probability(&self) -> f64 {
        self.block.trace()
    }

    /// `-Σ λ log₂ λ` over the unnormalized block spectrum.
    pub fn entropy(&self) -> f64 {
        spectral_entropy(&self.block.eigenvalues())
    }
}

/// `Γ^⊗n[ρ]` split into its `2^n` erasure-pattern blocks, ordered by the
/// bitmask of erased sites (site 0 is the most significant bit).
pub fn apply_tensor_power_blocked(
    params: ChannelParams,
    rho: &DensityMatrix,
    complement: bool,
) -> Result<Vec<ErasureBlock>> {
    let n = check_tensor_input(rho, BLOCKED_MAX_SITES)?;
    let params = if complement { params.complement() } else { params };
    let FilterPair { f, g } = params.filters();
    let m = rho.matrix();

    let masks: Vec<usize> = (0..1usize << n).collect();
    Ok(masks
        .into_par_iter()
        .map(|mask| {
            let bit = |s: usize| 1usize << (n - 1 - s);
            let erased: Vec<usize> = (0..n).filter(|&s| mask & bit(s) != 0).collect();
            let kept: Vec<usize> = (0..n).filter(|&s| mask & bit(s) == 0).collect();
            // survivor digits -> full index contribution, and F amplitude
            let kept_dim = 1usize << kept.len();
            let (kept_index, kept_amp): (Vec<usize>, Vec<f64>) = (0..kept_dim)
                .map(|a| {
                    kept.iter().enumerate().fold((0, 1.0), |(idx, amp), (pos, &s)| {
                        let d = (a >> (kept.len() - 1 - pos)) & 1;
                        (idx | (d * bit(s)), amp * f[d])
                    })
                })
                .unzip();
            let (erased_index, erased_weight): (Vec<usize>, Vec<f64>) = (0..1usize << erased.len())
                .map(|e| {
                    erased.iter().enumerate().fold((0, 1.0), |(idx, w), (pos, &s)| {
                        let d = (e >> (erased.len() - 1 - pos)) & 1;
                        (idx | (d * bit(s)), w * g[d] * g[d])
                    })
                })
                .unzip();
            let block = DMatrix::from_fn(kept_dim, kept_dim, |a, b| {
                let mut acc = ZERO;
                for (&ei, &w) in erased_index.iter().zip(&erased_weight) {
                    if w != 0.0 {
                        acc += m[(kept_index[a] | ei, kept_index[b] | ei)] * w;
                    }
                }
                acc * (kept_amp[a] * kept_amp[b])
            });
            ErasureBlock {
                erased,
                block: DensityMatrix::from_parts(Basis::qubits(kept.len()), block),
            }
        })
        .collect())
}

/// Total entropy of a block-diagonal output, summing over erasure patterns.
pub fn blocked_entropy(blocks: &[ErasureBlock]) -> f64 {
    blocks.iter().map(ErasureBlock::entropy).sum()
}

/// `S(Γ^⊗n[ρ]) - S(Γ̃^⊗n[ρ])` from the dense `3^n` outputs.
pub fn coherent_information_dense(params: ChannelParams, rho: &DensityMatrix) -> Result<f64> {
    let out = apply_tensor_power(params, rho, false)?;
    let env = apply_tensor_power(params, rho, true)?;
    Ok(von_neumann_entropy(&out)? - von_neumann_entropy(&env)?)
}

/// Same quantity from the erasure-pattern blocks.
pub fn coherent_information_blocked(params: ChannelParams, rho: &DensityMatrix) -> Result<f64> {
    let out = apply_tensor_power_blocked(params, rho, false)?;
    let env = apply_tensor_power_blocked(params, rho, true)?;
    Ok(blocked_entropy(&out) - blocked_entropy(&env))
}

/// Coherent information of `ρ` through `Γ^⊗n`, in bits: dense path for
/// `n <= 4`, erasure-pattern path above.
pub fn coherent_information_oracle(params: ChannelParams, rho: &DensityMatrix) -> Result<f64> {
    if rho.basis().site_count() <= DENSE_ORACLE_MAX_SITES {
        coherent_information_dense(params, rho)
    } else {
        coherent_information_blocked(params, rho)
    }
}

/// Smallest eigenvalue over every erasure block; used to sanity-check outputs.
pub fn min_block_eigenvalue(blocks: &[ErasureBlock]) -> f64 {
    blocks
        .iter()
        .flat_map(|b| hermitian_eigenvalues(b.block.matrix()))
        .fold(f64::INFINITY, f64::min)
}
