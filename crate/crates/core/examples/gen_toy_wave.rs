//! Regenerates `corpus/toy/toy.vcd`: 40 cycles of the toy environment with
//! reset high for the first three cycles, `wave_op` held at 1 and `free_in`
//! held at 0, starting from all-zero registers.
//!
//!     cargo run -p wavecheck-core --example gen_toy_wave > corpus/toy/toy.vcd

use wavecheck_core::sim::simulate_wave;
use wavecheck_core::vcd::write_vcd;
use wavecheck_core::verilog::compile;

const CYCLES: usize = 40;

fn main() {
    let src = include_str!("../../../corpus/toy/toy.v");
    let g = compile(src, "top").expect("toy elaborates").aignet;
    let mut inputs = Vec::new();
    for cycle in 0..CYCLES {
        let mut v = vec![false; g.num_inputs()];
        v[g.find_input("reset", 0).unwrap()] = cycle < 3;
        v[g.find_input("wave_op", 0).unwrap()] = true;
        inputs.push(v);
    }
    let init = vec![false; g.num_registers()];
    let db = simulate_wave(&g, &init, &inputs, "clk", "top");
    print!("{}", write_vcd(&db, 10));
}
