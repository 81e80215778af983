//! Full statevector execution.

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, Polarity};
use crate::oracle::GroverPlan;

use super::{dense_cap, Engine, EngineRun, SimError, VertexDistribution};

const NORM_WINDOW: f64 = 1e-9;

/// Complex amplitudes over the full register. Qubit 0 owns the most
/// significant bit of the amplitude index, so the vertex register is the
/// high-order prefix and a basis label reads off directly.
#[derive(Clone, Debug)]
pub struct StateVector {
    qubit_count: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0>.
    pub fn zero_state(qubit_count: usize) -> Self {
        let mut amps = vec![Complex64::ZERO; 1 << qubit_count];
        amps[0] = Complex64::ONE;
        StateVector { qubit_count, amps }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn index_bit(&self, qubit: usize) -> usize {
        assert!(qubit < self.qubit_count, "qubit {qubit} outside the register");
        1 << (self.qubit_count - 1 - qubit)
    }

    pub fn apply(&mut self, gate: &Gate) {
        match gate {
            Gate::H { target } => {
                let m = self.index_bit(*target);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let a = self.amps[i];
                        let b = self.amps[i | m];
                        self.amps[i] = (a + b) * s;
                        self.amps[i | m] = (a - b) * s;
                    }
                }
            }
            Gate::X { target } => {
                let m = self.index_bit(*target);
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        self.amps.swap(i, i | m);
                    }
                }
            }
            Gate::Mcx { controls, target } => {
                let m = self.index_bit(*target);
                let mut pos = 0usize;
                let mut neg = 0usize;
                for c in controls {
                    match c.polarity {
                        Polarity::Positive => pos |= self.index_bit(c.qubit),
                        Polarity::Negative => neg |= self.index_bit(c.qubit),
                    }
                }
                for i in 0..self.amps.len() {
                    if i & m == 0 && i & pos == pos && i & neg == 0 {
                        self.amps.swap(i, i | m);
                    }
                }
            }
        }
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) {
        assert_eq!(circuit.qubit_count(), self.qubit_count, "circuit width mismatch");
        for gate in circuit.gates() {
            self.apply(gate);
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Marginal over the leading `vertex_count` qubits.
    pub fn vertex_distribution(&self, vertex_count: u32) -> VertexDistribution {
        let shift = self.qubit_count - vertex_count as usize;
        let mut probs = vec![0.0; 1 << vertex_count];
        for (i, a) in self.amps.iter().enumerate() {
            probs[i >> shift] += a.norm_sqr();
        }
        VertexDistribution::from_probs(vertex_count, probs)
    }
}

fn check_norm(state: &StateVector, stage: &'static str) -> Result<(), SimError> {
    let norm = state.norm_sq();
    if (norm - 1.0).abs() > NORM_WINDOW {
        return Err(SimError::NormDrift { stage, norm });
    }
    Ok(())
}

/// Runs the plan gate by gate, honoring the width cap from [`dense_cap`].
pub fn run_dense(plan: &GroverPlan) -> Result<EngineRun, SimError> {
    run_dense_with_cap(plan, dense_cap())
}

pub fn run_dense_with_cap(plan: &GroverPlan, cap: usize) -> Result<EngineRun, SimError> {
    let qubits = plan.total_qubits();
    if qubits > cap {
        return Err(SimError::WidthCapExceeded { qubits, cap });
    }
    let n = plan.vertex_count();
    let mut state = StateVector::zero_state(qubits);
    state.apply_circuit(&plan.prep);
    check_norm(&state, "preparation")?;
    let mut snapshots = vec![state.vertex_distribution(n)];
    for _ in 0..plan.iterations {
        state.apply_circuit(&plan.oracle);
        check_norm(&state, "oracle")?;
        state.apply_circuit(&plan.diffusion);
        check_norm(&state, "diffusion")?;
        snapshots.push(state.vertex_distribution(n));
    }
    Ok(EngineRun { engine: Engine::Dense, snapshots, final_state: Some(state) })
}
