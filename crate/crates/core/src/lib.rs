//! Waveform-anchored bounded property checking.
//!
//! A design is compiled into an and-inverter graph ([`aig`]), either from a
//! small synthesizable Verilog subset ([`verilog`]) or from ASCII AIGER
//! ([`aiger`]). A recorded waveform ([`vcd`]) supplies the starting state and
//! input stimulus, and the [`engine`] walks forward through time, encoding a
//! sliding window of time frames into an incremental SAT instance
//! ([`sat`], [`encode`]) to ask whether any designated fail signal can become
//! 1 under some choice of the free inputs.

pub mod aig;
pub mod aiger;
pub mod design;
pub mod encode;
pub mod engine;
pub mod sat;
pub mod sim;
pub mod vcd;
pub mod verilog;

pub use aig::{AigLit, AigNode, Aignet, AignetBuilder, BitName, SimState};
pub use design::{load_design, Design};
pub use engine::{RunConfig, RunReport};
pub use sat::{Lit, SolveStatus, Solver};
pub use vcd::WaveDb;
