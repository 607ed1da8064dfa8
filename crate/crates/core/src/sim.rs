//! Concrete simulation into a waveform.

use crate::aig::{lit_value, Aignet, SimState};
use crate::vcd::WaveDb;

/// Simulates `g` from `init` with one input vector per cycle and records
/// every named signal, wrapped in `scope`, clocked by `scope.clock`.
pub fn simulate_wave(
    g: &Aignet,
    init: &[bool],
    inputs: &[Vec<bool>],
    clock: &str,
    scope: &str,
) -> WaveDb {
    let mut state = SimState {
        registers: init.to_vec(),
        time: 0,
    };
    let mut frames = Vec::with_capacity(inputs.len());
    for vector in inputs {
        frames.push(
            g.eval_comb(vector, &state.registers)
                .expect("input width matches"),
        );
        state = g.sim_step(&state, vector).expect("input width matches").1;
    }
    let prefix = |name: &str| {
        if scope.is_empty() {
            name.to_string()
        } else {
            format!("{scope}.{name}")
        }
    };
    let mut db = WaveDb::new(&prefix(clock), inputs.len(), 10);
    for (name, lits) in g.signals() {
        let samples = frames
            .iter()
            .map(|values| lits.iter().map(|&l| Some(lit_value(values, l))).collect())
            .collect();
        db.set_signal(&prefix(name), lits.len(), samples)
            .expect("shapes are consistent");
    }
    db
}
