//! Thermal states, entropies, free energies, and average extractable work for
//! a qubit with Hamiltonian `H = |1⟩⟨1|` (energy in units of the gap, `k_B = 1`).

use crate::error::{Error, Result};
use crate::qmat::{CMat, DensityMatrix};
use crate::scalar::Real;
use crate::switch::OutcomeEnsemble;

/// Eigenvalues above this count towards the rank in the `α = 0` entropy.
const RANK_CUTOFF: f64 = 1e-12;
/// Renyi orders this close to 1 use the von Neumann limit.
const ALPHA_ONE_WINDOW: f64 = 1e-6;

/// The fixed qubit Hamiltonian `diag(0, 1)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Hamiltonian;

impl Hamiltonian {
    pub fn matrix<T: Real>(&self) -> CMat<T> {
        CMat::diag(&[T::zero(), T::one()]).expect("dim 2")
    }

    /// `Tr(ρ H)`
    pub fn energy<T: Real>(&self, rho: &DensityMatrix<T>) -> T {
        rho.population(1)
    }
}

/// Bath whose Gibbs state is `diag(p, 1 − p)`, at temperature
/// `1 / ln(p / (1 − p))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalBath<T: Real> {
    p: T,
    temperature: T,
}

impl<T: Real> ThermalBath<T> {
    /// Requires `p ∈ (0.5, 1)` so that the temperature is finite and positive.
    pub fn new(p: T) -> Result<Self> {
        let half = T::lit(0.5);
        if !(p > half && p < T::one()) {
            return Err(Error::OutOfRange {
                name: "bath p",
                value: p.to_f64().unwrap_or(f64::NAN),
                range: "(0.5, 1)",
            });
        }
        let temperature = T::one() / (p / (T::one() - p)).ln();
        if !temperature.is_finite() {
            return Err(Error::OutOfRange {
                name: "bath p",
                value: p.to_f64().unwrap_or(f64::NAN),
                range: "(0.5, 1)",
            });
        }
        Ok(Self { p, temperature })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn temperature(&self) -> T {
        self.temperature
    }

    /// The bath's own Gibbs state.
    pub fn gibbs_state(&self) -> DensityMatrix<T> {
        DensityMatrix::new_unchecked(CMat::diag(&[self.p, T::one() - self.p]).expect("dim 2"))
    }
}

/// Bath at the temperature of the thermal input `diag(r, 1 − r)`.
pub fn bath_from_state<T: Real>(r: T) -> Result<ThermalBath<T>> {
    ThermalBath::new(r)
}

/// `diag(p, 1 − p)`
pub fn tau<T: Real>(p: T) -> Result<DensityMatrix<T>> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p.to_f64().unwrap_or(f64::NAN),
            range: "[0, 1]",
        });
    }
    Ok(DensityMatrix::new_unchecked(CMat::diag(&[p, T::one() - p])?))
}

/// `−Σ λ log₂ λ` over the clipped spectrum, with `0 log 0 = 0`.
pub fn vn_entropy_bits<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let spectrum = rho.clipped_spectrum()?;
    let s = spectrum
        .into_iter()
        .filter(|&x| x > T::zero())
        .map(|x| -x * x.log2())
        .sum::<T>();
    Ok(s.max(T::zero()))
}

/// Renyi-α entropy in bits. `alpha = +∞` gives the min-entropy
/// `−log₂ λ_max`; orders within 1e-6 of 1 return the von Neumann entropy.
pub fn renyi_entropy_bits<T: Real>(rho: &DensityMatrix<T>, alpha: T) -> Result<T> {
    if !(alpha >= T::zero()) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha.to_f64().unwrap_or(f64::NAN),
            range: "[0, ∞]",
        });
    }
    if (alpha - T::one()).abs() < T::lit(ALPHA_ONE_WINDOW) {
        return vn_entropy_bits(rho);
    }
    let spectrum = rho.clipped_spectrum()?;
    if alpha.is_infinite() {
        let max = spectrum.iter().copied().fold(T::zero(), T::max);
        return Ok((-max.log2()).max(T::zero()));
    }
    if alpha == T::zero() {
        let rank = spectrum.iter().filter(|&&x| x > T::lit(RANK_CUTOFF)).count();
        return Ok(T::from_usize(rank).expect("small").log2());
    }
    let power_sum: T = spectrum
        .into_iter()
        .filter(|&x| x > T::zero())
        .map(|x| x.powf(alpha))
        .sum();
    Ok((power_sum.log2() / (T::one() - alpha)).max(T::zero()))
}

/// `Tr(ρH) − T · ln 2 · S(ρ)` with `S` in bits.
pub fn free_energy<T: Real>(rho: &DensityMatrix<T>, bath: &ThermalBath<T>) -> Result<T> {
    let s = vn_entropy_bits(rho)?;
    Ok(Hamiltonian.energy(rho) - bath.temperature * T::LN_2() * s)
}

/// [`free_energy`] with the Renyi-α entropy in place of von Neumann.
pub fn renyi_free_energy<T: Real>(rho: &DensityMatrix<T>, bath: &ThermalBath<T>, alpha: T) -> Result<T> {
    let s = renyi_entropy_bits(rho, alpha)?;
    Ok(Hamiltonian.energy(rho) - bath.temperature * T::LN_2() * s)
}

/// `Σ_k p_k (F(ρ_k) − F(τ_bath))`
pub fn avg_work<T: Real>(outcomes: &OutcomeEnsemble<T>, bath: &ThermalBath<T>) -> Result<T> {
    let reference = free_energy(&bath.gibbs_state(), bath)?;
    let mut acc = T::zero();
    for o in &outcomes.entries {
        acc = acc + o.probability * (free_energy(&o.state, bath)? - reference);
    }
    Ok(acc)
}
