//! Workload generators shared by the benches in `benches/`.

use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wavecheck_core::{AigLit, Aignet, AignetBuilder, Lit};

pub fn corpus(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(file)
}

/// Uniform random 3-CNF in DIMACS numbering.
pub fn random_3cnf(vars: usize, clauses: usize, seed: u64) -> Vec<Vec<Lit>> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..clauses)
        .map(|_| {
            rand::seq::index::sample(&mut rng, vars, 3)
                .into_iter()
                .map(|v| {
                    let l = v as i32 + 1;
                    Lit::from_dimacs(if rng.gen() { l } else { -l })
                })
                .collect()
        })
        .collect()
}

/// `holes + 1` pigeons into `holes` holes; always unsatisfiable.
pub fn pigeonhole(holes: usize) -> Vec<Vec<Lit>> {
    let var = |p: usize, h: usize| Lit::from_dimacs((p * holes + h + 1) as i32);
    let mut out: Vec<Vec<Lit>> = (0..=holes)
        .map(|p| (0..holes).map(|h| var(p, h)).collect())
        .collect();
    for h in 0..holes {
        for p in 0..=holes {
            for q in p + 1..=holes {
                out.push(vec![!var(p, h), !var(q, h)]);
            }
        }
    }
    out
}

/// Array multiplier `a * b` over `width`-bit inputs; output `p` has
/// `2 * width` bits.
pub fn multiplier(width: usize) -> Aignet {
    let mut b = AignetBuilder::new();
    let x = b.add_input("a", width).unwrap();
    let y = b.add_input("b", width).unwrap();
    let mut acc = vec![AigLit::FALSE; 2 * width];
    for (i, &yi) in y.iter().enumerate() {
        let mut carry = AigLit::FALSE;
        for j in 0..2 * width - i {
            let pp = if j < width {
                b.mk_and(x[j], yi)
            } else {
                AigLit::FALSE
            };
            let s = b.mk_xor(acc[i + j], pp);
            let sum = b.mk_xor(s, carry);
            let c1 = b.mk_and(acc[i + j], pp);
            let c2 = b.mk_and(s, carry);
            carry = b.mk_or(c1, c2);
            acc[i + j] = sum;
        }
    }
    b.add_output("p", acc).unwrap();
    b.seal().unwrap()
}
