//! Basis-replay execution.
//!
//! The oracles built here are classical on basis states: every gate is an X
//! or an MCX, and the only wire whose quantum state matters (the phase-kick
//! qubit) is never read. Replaying the oracle as plain bit operations per
//! vertex label therefore yields the exact set of sign flips each round
//! applies, and the flip set never changes between rounds. The diffusion
//! touches the vertex register alone, so the whole evolution collapses to
//! real arithmetic on 2^n amplitudes.

use rayon::prelude::*;

use crate::circuit::{Circuit, Gate, Polarity};
use crate::oracle::{build_diffusion, GroverPlan};

use super::{Engine, EngineRun, SimError, VertexDistribution, DEFAULT_TRACKED_LIMIT};

/// Compiled gate for registers up to 128 wires.
struct NarrowGate {
    pos: u128,
    neg: u128,
    flip: u128,
}

/// Compiled gate for wider registers, masks split into 64-bit words.
struct WideGate {
    pos: Vec<u64>,
    neg: Vec<u64>,
    target_word: usize,
    target_bit: u64,
}

/// Checks every oracle gate for classical replayability: H has no bit
/// semantics, and a control on the phase-kick wire would read a qubit that
/// is deliberately held in superposition.
fn validate_oracle(oracle: &Circuit, phase_qubit: usize) -> Result<(), SimError> {
    for (index, gate) in oracle.gates().iter().enumerate() {
        match gate {
            Gate::H { .. } => return Err(SimError::NonClassicalOracle { index }),
            Gate::X { .. } => {}
            Gate::Mcx { controls, .. } => {
                if controls.iter().any(|c| c.qubit == phase_qubit) {
                    return Err(SimError::OracleReadsPhaseQubit { index });
                }
            }
        }
    }
    Ok(())
}

fn compile_narrow(oracle: &Circuit) -> Vec<NarrowGate> {
    oracle
        .gates()
        .iter()
        .map(|gate| match gate {
            Gate::X { target } => NarrowGate { pos: 0, neg: 0, flip: 1u128 << target },
            Gate::Mcx { controls, target } => {
                let mut pos = 0u128;
                let mut neg = 0u128;
                for c in controls {
                    match c.polarity {
                        Polarity::Positive => pos |= 1u128 << c.qubit,
                        Polarity::Negative => neg |= 1u128 << c.qubit,
                    }
                }
                NarrowGate { pos, neg, flip: 1u128 << target }
            }
            Gate::H { .. } => unreachable!("validated before compiling"),
        })
        .collect()
}

fn compile_wide(oracle: &Circuit, words: usize) -> Vec<WideGate> {
    oracle
        .gates()
        .iter()
        .map(|gate| {
            let (controls, target): (&[_], usize) = match gate {
                Gate::X { target } => (&[], *target),
                Gate::Mcx { controls, target } => (controls, *target),
                Gate::H { .. } => unreachable!("validated before compiling"),
            };
            let mut pos = vec![0u64; words];
            let mut neg = vec![0u64; words];
            for c in controls {
                let mask = match c.polarity {
                    Polarity::Positive => &mut pos,
                    Polarity::Negative => &mut neg,
                };
                mask[c.qubit / 64] |= 1 << (c.qubit % 64);
            }
            WideGate { pos, neg, target_word: target / 64, target_bit: 1 << (target % 64) }
        })
        .collect()
}

fn flip_table_narrow(plan: &GroverPlan) -> Result<Vec<bool>, SimError> {
    let layout = &plan.layout;
    let n = layout.vertex_count() as usize;
    let phase_qubit = layout.oracle_qubit();
    let gates = compile_narrow(&plan.oracle);
    let vertex_mask = (1u128 << n) - 1;
    let aux_mask = ((1u128 << phase_qubit) - 1) ^ vertex_mask;
    (0..1u32 << n)
        .into_par_iter()
        .map(|label| {
            let mut init = 0u128;
            for p in 0..n {
                if label >> (n - 1 - p) & 1 == 1 {
                    init |= 1 << p;
                }
            }
            let mut bits = init;
            for g in &gates {
                if bits & g.pos == g.pos && bits & g.neg == 0 {
                    bits ^= g.flip;
                }
            }
            if bits & aux_mask != 0 {
                let qubit = (bits & aux_mask).trailing_zeros() as usize;
                return Err(SimError::AuxNotRestored { label, qubit });
            }
            if bits & vertex_mask != init {
                return Err(SimError::VertexDisturbed { label });
            }
            Ok(bits >> phase_qubit & 1 == 1)
        })
        .collect()
}

fn flip_table_wide(plan: &GroverPlan) -> Result<Vec<bool>, SimError> {
    let layout = &plan.layout;
    let n = layout.vertex_count() as usize;
    let phase_qubit = layout.oracle_qubit();
    let words = layout.total_qubits().div_ceil(64);
    let gates = compile_wide(&plan.oracle, words);
    // Vertex wires all live in word zero (the subset type caps them at 32).
    let vertex_mask = (1u64 << n) - 1;
    (0..1u32 << n)
        .into_par_iter()
        .map(|label| {
            let mut bits = vec![0u64; words];
            for p in 0..n {
                if label >> (n - 1 - p) & 1 == 1 {
                    bits[0] |= 1 << p;
                }
            }
            let init_vertex = bits[0];
            for g in &gates {
                let open = bits
                    .iter()
                    .zip(&g.pos)
                    .zip(&g.neg)
                    .all(|((b, p), ng)| b & p == *p && b & ng == 0);
                if open {
                    bits[g.target_word] ^= g.target_bit;
                }
            }
            for qubit in n..phase_qubit {
                if bits[qubit / 64] >> (qubit % 64) & 1 == 1 {
                    return Err(SimError::AuxNotRestored { label, qubit });
                }
            }
            if bits[0] & vertex_mask != init_vertex {
                return Err(SimError::VertexDisturbed { label });
            }
            Ok(bits[phase_qubit / 64] >> (phase_qubit % 64) & 1 == 1)
        })
        .collect()
}

/// Which vertex labels the oracle marks, by classical replay of the whole
/// register. Index `label` is true when the plan's oracle flips the sign of
/// that basis state.
pub fn oracle_flip_table(plan: &GroverPlan) -> Result<Vec<bool>, SimError> {
    validate_oracle(&plan.oracle, plan.layout.oracle_qubit())?;
    if plan.total_qubits() <= 128 {
        flip_table_narrow(plan)
    } else {
        flip_table_wide(plan)
    }
}

fn canonical_prep(plan: &GroverPlan) -> Circuit {
    let layout = &plan.layout;
    let mut c = Circuit::new(layout.total_qubits());
    for p in 0..layout.vertex_count() {
        c.push(Gate::h(layout.vertex(p)));
    }
    c.push(Gate::x(layout.oracle_qubit()));
    c.push(Gate::h(layout.oracle_qubit()));
    c
}

/// Runs the plan by classical phase replay, honoring the default vertex
/// width limit.
pub fn run_basis_tracked(plan: &GroverPlan) -> Result<EngineRun, SimError> {
    run_basis_tracked_with_limit(plan, DEFAULT_TRACKED_LIMIT)
}

pub fn run_basis_tracked_with_limit(
    plan: &GroverPlan,
    limit: u32,
) -> Result<EngineRun, SimError> {
    let n = plan.vertex_count();
    if n > limit {
        return Err(SimError::VertexLimitExceeded { vertices: n, limit });
    }
    // The replay shortcut is only faithful to the canonical plan shape;
    // reject anything else rather than silently diverging.
    if plan.prep != canonical_prep(plan) {
        return Err(SimError::NonCanonicalPrep);
    }
    if plan.diffusion != build_diffusion(&plan.layout) {
        return Err(SimError::NonCanonicalDiffusion);
    }
    let flips = oracle_flip_table(plan)?;

    let len = 1usize << n;
    // Amplitudes stay real: the preparation is real, sign flips are real,
    // and the inversion about the mean is real arithmetic.
    let mut amps = vec![1.0 / (len as f64).sqrt(); len];
    let snapshot = |amps: &[f64]| {
        VertexDistribution::from_probs(n, amps.iter().map(|a| a * a).collect())
    };
    let mut snapshots = vec![snapshot(&amps)];
    for _ in 0..plan.iterations {
        for (a, &flip) in amps.iter_mut().zip(&flips) {
            if flip {
                *a = -*a;
            }
        }
        let mean = amps.iter().sum::<f64>() / len as f64;
        for a in &mut amps {
            *a = 2.0 * mean - *a;
        }
        snapshots.push(snapshot(&amps));
    }
    Ok(EngineRun { engine: Engine::Tracked, snapshots, final_state: None })
}
