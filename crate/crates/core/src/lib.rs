//! Quantum-switch composition of a generalized amplitude damping channel and a
//! phase-flip channel, with the thermodynamic bookkeeping (free energy,
//! average extractable work) needed to compare it against every causally
//! separable composition of the same two channels.
//!
//! The matrix kernel, channels, switch, and thermodynamics are generic over
//! [`Real`] (`f32` or `f64`); the experiment runners and the CLI work in `f64`.

// `!(x <= tol)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod qmat;
pub mod scalar;
pub mod switch;
pub mod table;
pub mod thermo;

pub use error::{Error, Result};
pub use qmat::{trace_distance, CMat, DensityMatrix, Ket, Subsystem};
pub use channels::{compose, gad_channel, pf_channel, CptpReport, KrausChannel, SeparableMixture};
pub use scalar::Real;
pub use switch::{
    apply_switch, closed_form_case1, closed_form_case2, measure_controller, switch_kraus, BranchSplit,
    ChannelOrder, ControlAssignment, MeasurementBasis, Outcome, OutcomeEnsemble, SwitchConfig,
};
pub use thermo::{
    avg_work, bath_from_state, free_energy, renyi_entropy_bits, renyi_free_energy, tau, vn_entropy_bits,
    Hamiltonian, ThermalBath,
};

pub type CMat64 = CMat<f64>;
pub type CMat32 = CMat<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type Ket64 = Ket<f64>;
pub type KrausChannel64 = KrausChannel<f64>;
pub type SwitchConfig64 = SwitchConfig<f64>;
pub type OutcomeEnsemble64 = OutcomeEnsemble<f64>;
pub type ThermalBath64 = ThermalBath<f64>;
