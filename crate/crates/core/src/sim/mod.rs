//! Plan execution engines and measurement utilities.
//!
//! Two engines produce identical vertex-register distributions by different
//! routes. The dense engine applies every gate to a full statevector and is
//! the ground truth at small widths. The basis-tracked engine exploits the
//! structure of the plans this crate builds: the oracle is classical on
//! basis states (X/MCX only, phase delivered through the kick qubit), so one
//! classical replay per vertex label yields the exact phase flip pattern,
//! and the diffusion acts on the vertex register alone.

mod dense;
mod tracked;

use std::fmt;
use std::io::{self, Write};

use rand::Rng;
use rand::SeedableRng;

pub use dense::{run_dense, run_dense_with_cap, StateVector};
pub use tracked::{oracle_flip_table, run_basis_tracked, run_basis_tracked_with_limit};

use crate::oracle::GroverPlan;

/// Executes a plan on the chosen engine with its default resource limit.
pub fn run_plan(plan: &GroverPlan, engine: Engine) -> Result<EngineRun, SimError> {
    match engine {
        Engine::Dense => run_dense(plan),
        Engine::Tracked => run_basis_tracked(plan),
    }
}

/// Register width the dense engine accepts by default (a 26-qubit state is
/// 1 GiB of amplitudes).
pub const DEFAULT_DENSE_CAP: usize = 26;

/// Vertex count the basis-tracked engine accepts by default.
pub const DEFAULT_TRACKED_LIMIT: u32 = 20;

/// Dense width cap, overridable through the `QMBS_DENSE_CAP` environment
/// variable.
pub fn dense_cap() -> usize {
    std::env::var("QMBS_DENSE_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_DENSE_CAP)
}

/// Which engine executed a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Dense,
    Tracked,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Engine::Dense => write!(f, "dense"),
            Engine::Tracked => write!(f, "tracked"),
        }
    }
}

/// Execution failures.
#[derive(Clone, Debug, PartialEq)]
pub enum SimError {
    /// Plan register is wider than the dense cap.
    WidthCapExceeded { qubits: usize, cap: usize },
    /// Vertex register is wider than the tracked limit.
    VertexLimitExceeded { vertices: u32, limit: u32 },
    /// Oracle contains a gate without classical bit semantics.
    NonClassicalOracle { index: usize },
    /// Oracle gate reads the phase-kick qubit, whose value is not classical.
    OracleReadsPhaseQubit { index: usize },
    /// A scratch wire was left set after the oracle; the uncomputation is
    /// broken.
    AuxNotRestored { label: u32, qubit: usize },
    /// The oracle moved population off the input vertex pattern.
    VertexDisturbed { label: u32 },
    /// Tracked execution needs the canonical preparation circuit.
    NonCanonicalPrep,
    /// Tracked execution needs the canonical diffusion circuit.
    NonCanonicalDiffusion,
    /// Statevector norm left the unit window.
    NormDrift { stage: &'static str, norm: f64 },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::WidthCapExceeded { qubits, cap } => {
                write!(f, "{qubits} qubits exceed the dense width cap of {cap}")
            }
            SimError::VertexLimitExceeded { vertices, limit } => {
                write!(f, "{vertices} vertex qubits exceed the tracked limit of {limit}")
            }
            SimError::NonClassicalOracle { index } => {
                write!(f, "oracle gate {index} has no classical bit semantics")
            }
            SimError::OracleReadsPhaseQubit { index } => {
                write!(f, "oracle gate {index} controls on the phase-kick qubit")
            }
            SimError::AuxNotRestored { label, qubit } => {
                write!(f, "scratch wire {qubit} left set for basis label {label:#b}")
            }
            SimError::VertexDisturbed { label } => {
                write!(f, "oracle changed the vertex register for basis label {label:#b}")
            }
            SimError::NonCanonicalPrep => {
                write!(f, "plan preparation is not the canonical uniform+phase circuit")
            }
            SimError::NonCanonicalDiffusion => {
                write!(f, "plan diffusion is not the canonical inversion about the mean")
            }
            SimError::NormDrift { stage, norm } => {
                write!(f, "statevector norm drifted to {norm} after {stage}")
            }
        }
    }
}

impl std::error::Error for SimError {}

/// Probabilities of the vertex register, indexed by label (the label integer
/// carries `v1` in its most significant bit).
#[derive(Clone, Debug, PartialEq)]
pub struct VertexDistribution {
    width: u32,
    probs: Vec<f64>,
}

impl VertexDistribution {
    pub fn from_probs(width: u32, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), 1usize << width, "probability vector length mismatch");
        VertexDistribution { width, probs }
    }

    pub fn uniform(width: u32) -> Self {
        let len = 1usize << width;
        VertexDistribution { width, probs: vec![1.0 / len as f64; len] }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, label: u32) -> f64 {
        self.probs[label as usize]
    }

    /// Binary label string, `v1` first.
    pub fn label(&self, label: u32) -> String {
        format!("{:0width$b}", label, width = self.width as usize)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Combined probability of a set of labels.
    pub fn mass_on(&self, labels: &[u32]) -> f64 {
        labels.iter().map(|&l| self.prob(l)).sum()
    }

    /// Largest absolute pointwise difference to another distribution.
    pub fn max_abs_diff(&self, other: &VertexDistribution) -> f64 {
        assert_eq!(self.width, other.width, "distribution width mismatch");
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Sampled measurement outcomes of one distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub width: u32,
    pub shots: u64,
    pub seed: u64,
    /// One count per label.
    pub counts: Vec<u64>,
}

/// Draws one measurement outcome from the distribution.
pub fn draw(dist: &VertexDistribution, rng: &mut impl Rng) -> u32 {
    let total = dist.total();
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (label, &p) in dist.probs().iter().enumerate() {
        acc += p;
        if u < acc {
            return label as u32;
        }
    }
    (dist.len() - 1) as u32
}

/// Samples `shots` independent measurements, deterministically for a seed.
pub fn sample(dist: &VertexDistribution, shots: u64, seed: u64) -> Histogram {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dist.len()];
    for _ in 0..shots {
        counts[draw(dist, &mut rng) as usize] += 1;
    }
    Histogram { width: dist.width(), shots, seed, counts }
}

/// The result of executing a plan: one distribution snapshot after the
/// preparation and one after each amplification round, plus the full final
/// state when the dense engine ran.
#[derive(Clone, Debug)]
pub struct EngineRun {
    pub engine: Engine,
    pub snapshots: Vec<VertexDistribution>,
    pub final_state: Option<StateVector>,
}

impl EngineRun {
    pub fn final_distribution(&self) -> &VertexDistribution {
        self.snapshots.last().expect("a run always has the preparation snapshot")
    }

    /// Amplification rounds the run performed.
    pub fn iterations(&self) -> usize {
        self.snapshots.len() - 1
    }
}

/// Writes `label,probability,count` rows, probabilities at 9 decimals.
pub fn write_distribution_csv<W: Write>(
    w: &mut W,
    dist: &VertexDistribution,
    hist: &Histogram,
) -> io::Result<()> {
    assert_eq!(dist.width(), hist.width, "distribution and histogram disagree on width");
    writeln!(w, "label,probability,count")?;
    for label in 0..dist.len() as u32 {
        writeln!(
            w,
            "{},{:.9},{}",
            dist.label(label),
            dist.prob(label),
            hist.counts[label as usize]
        )?;
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct DistributionRow {
    label: String,
    probability: f64,
    count: u64,
}

#[derive(serde::Serialize)]
struct DistributionDoc {
    seed: u64,
    shots: u64,
    iterations: usize,
    rows: Vec<DistributionRow>,
}

/// JSON form of the CSV table, with the sampling parameters attached.
pub fn write_distribution_json<W: Write>(
    w: &mut W,
    dist: &VertexDistribution,
    hist: &Histogram,
    iterations: usize,
) -> io::Result<()> {
    assert_eq!(dist.width(), hist.width, "distribution and histogram disagree on width");
    let doc = DistributionDoc {
        seed: hist.seed,
        shots: hist.shots,
        iterations,
        rows: (0..dist.len() as u32)
            .map(|label| DistributionRow {
                label: dist.label(label),
                probability: dist.prob(label),
                count: hist.counts[label as usize],
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)
}
