//! Input states: the diagonal one-shot ansatz, its tensor powers, W-state
//! codes and their doubled versions.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmatrix::{kron, Basis, DensityMatrix};

/// Largest number of qubits for which a dense input state is built.
pub const MAX_STATE_SITES: usize = 12;
/// Largest doubled-state block length `2n`.
pub const MAX_DOUBLED_SITES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub fn other(self) -> Polarization {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }

    /// Bit value of this polarization in a qubit basis index.
    fn bit(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

/// `ρ_HH |H⟩⟨H| + ρ_VV |V⟩⟨V|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalQubitState {
    rho_hh: f64,
    rho_vv: f64,
}

impl DiagonalQubitState {
    pub fn new(rho_hh: f64, rho_vv: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho_hh) || !(0.0..=1.0).contains(&rho_vv) {
            return Err(Error::validation(format!(
                "populations ({rho_hh}, {rho_vv}) must lie in [0, 1]"
            )));
        }
        if (rho_hh + rho_vv - 1.0).abs() > 1e-12 {
            return Err(Error::validation(format!(
                "populations ({rho_hh}, {rho_vv}) do not sum to 1"
            )));
        }
        Ok(DiagonalQubitState { rho_hh, rho_vv })
    }

    /// State with `ρ_HH = q`.
    pub fn from_hh(q: f64) -> Result<Self> {
        DiagonalQubitState::new(q, 1.0 - q)
    }

    pub fn rho_hh(&self) -> f64 {
        self.rho_hh
    }

    pub fn rho_vv(&self) -> f64 {
        self.rho_vv
    }

    pub fn population(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::H => self.rho_hh,
            Polarization::V => self.rho_vv,
        }
    }

    /// `ρ_HH ρ_VV`; zero exactly when the state is pure.
    pub fn coherence_weight(&self) -> f64 {
        self.rho_hh * self.rho_vv
    }

    pub fn swapped(&self) -> DiagonalQubitState {
        DiagonalQubitState {
            rho_hh: self.rho_vv,
            rho_vv: self.rho_hh,
        }
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_diagonal(Basis::qubits(1), &[self.rho_hh, self.rho_vv])
            .expect("2 entries for a qubit")
    }

    /// Diagonal of `(ρ)^⊗n`.
    pub fn product_diagonal(&self, n: usize) -> Vec<f64> {
        (0..1usize << n)
            .map(|idx| {
                let v = idx.count_ones() as i32;
                self.rho_hh.powi(n as i32 - v) * self.rho_vv.powi(v)
            })
            .collect()
    }
}

fn check_sites(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::ResourceLimit {
            what: "state qubits",
            requested: n,
            limit,
        });
    }
    Ok(())
}

/// Basis indices of the `n`-qubit vectors with exactly one `minority` photon,
/// ordered by the position of that photon from the last site to the first.
fn single_excitation_indices(n: usize, minority: Polarization) -> Vec<usize> {
    let all = (1usize << n) - 1;
    (0..n)
        .map(|pos| {
            let one = 1usize << pos;
            match minority {
                Polarization::V => one,
                Polarization::H => all ^ one,
            }
        })
        .collect()
}

/// `|W⁽ⁿ⁾⟩`: equal superposition of the `n` basis vectors with exactly one
/// photon of the non-majority polarization.
pub fn w_state(n: usize, majority: Polarization) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::validation("W state needs at least one qubit"));
    }
    check_sites(n, MAX_STATE_SITES)?;
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
    for idx in single_excitation_indices(n, majority.other()) {
        psi[idx] = amp;
    }
    Ok(psi)
}

/// `(ρ)^⊗n`.
pub fn product_state(state: DiagonalQubitState, n: usize) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::validation("product state needs at least one qubit"));
    }
    check_sites(n, MAX_STATE_SITES)?;
    DensityMatrix::from_diagonal(Basis::qubits(n), &state.product_diagonal(n))
}

/// Replaces the single-excitation block of `(ρ)^⊗n` by the rank-one operator
/// `n ρ_maj^(n-1) ρ_min |W⁽ⁿ⁾⟩⟨W⁽ⁿ⁾|`; everything else is the product state.
pub fn rho_n(state: DiagonalQubitState, n: usize, majority: Polarization) -> Result<DensityMatrix> {
    if n < 2 {
        return Err(Error::validation(format!("rho_n needs n >= 2, got {n}")));
    }
    check_sites(n, MAX_STATE_SITES)?;
    let diag = state.product_diagonal(n);
    let dim = diag.len();
    let mut m = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| {
        Complex64::new(if i == j { diag[i] } else { 0.0 }, 0.0)
    });
    let weight = state.population(majority).powi(n as i32 - 1) * state.population(majority.other());
    let block = single_excitation_indices(n, majority.other());
    for &i in &block {
        for &j in &block {
            m[(i, j)] = Complex64::new(weight, 0.0);
        }
    }
    Ok(DensityMatrix::from_parts(Basis::qubits(n), m))
}

/// The two-qubit code `ρ^⊗2 + ρ_HH ρ_VV (|HV⟩⟨VH| + |VH⟩⟨HV|)`.
pub fn rho2(state: DiagonalQubitState) -> DensityMatrix {
    rho_n(state, 2, Polarization::H).expect("n = 2 is in range")
}

/// `(ρ⁽ⁿ⁾)^⊗2` plus a coherence between `|maj⟩^⊗n|min⟩^⊗n` and
/// `|min⟩^⊗n|maj⟩^⊗n` equal to their common diagonal entry
/// `ρ_maj^n ρ_min^n`. For `n = 1` the base state is the diagonal ansatz itself,
/// which makes `xi_2n(state, 1, _)` equal to [`rho2`].
pub fn xi_2n(state: DiagonalQubitState, n: usize, majority: Polarization) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::validation("xi_2n needs n >= 1"));
    }
    check_sites(2 * n, MAX_DOUBLED_SITES)?;
    let base = if n == 1 {
        state.density()
    } else {
        rho_n(state, n, majority)?
    };
    let doubled = kron(&base, &base);
    let mut m = doubled.into_matrix();

    let ones = (1usize << n) - 1;
    let word = |pol: Polarization| if pol.bit() == 1 { ones } else { 0 };
    let a = (word(majority) << n) | word(majority.other());
    let b = (word(majority.other()) << n) | word(majority);
    let weight = (state.population(majority) * state.population(majority.other())).powi(n as i32);
    m[(a, b)] += Complex64::new(weight, 0.0);
    m[(b, a)] += Complex64::new(weight, 0.0);
    Ok(DensityMatrix::from_parts(Basis::qubits(2 * n), m))
}

/// The doubled two-qubit code `ρ⁽²⁾ ⊗ ρ⁽²⁾ + ρ_HH² ρ_VV² (|HHVV⟩⟨VVHH| + h.c.)`.
pub fn xi4(state: DiagonalQubitState) -> DensityMatrix {
    xi_2n(state, 2, Polarization::H).expect("4 qubits are in range")
}
