//! Reversible oracle construction and amplitude-amplification plans.
//!
//! The marking circuit for "is a biclique of admitted size" is assembled from
//! three reversible stages over the layout of [`crate::circuit::QubitLayout`]:
//!
//! 1. The biclique check computes, for every left-right pair, a real-edge
//!    wire (pair selected and edge present) and a virtual-edge wire (pair
//!    selected), XORs the first into the second, and sets the `bic` flag with
//!    one negatively-controlled MCX over all virtual wires. A subset is a
//!    biclique exactly when every selected pair is backed by an edge, i.e.
//!    when every XOR cancelled.
//! 2. The size counter runs one unary counting DP per side, seeded by `bic`
//!    so nothing is counted for non-bicliques, then combines the two side
//!    counts into one-hot size flags: products for edge counting, sums for
//!    vertex counting, and equal-split sums only for balanced counting.
//! 3. The kickback copies the selected flag (or every flag at or above the
//!    threshold; at most one is ever set) onto the phase qubit, which the
//!    preparation circuit placed in the |0>-|1> state, turning the bit flip
//!    into a phase flip on marked basis states.
//!
//! Stages 2 and 1 are then appended inverted, restoring every working wire
//! to 0 so the vertex register stays disentangled from the scratch space.

use std::fmt;

use crate::bigraph::{BipartiteGraph, Objective, SizeTarget};
use crate::circuit::{Circuit, Control, Gate, QubitLayout};
use crate::grover;

/// Requested size flag does not exist in the layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlagOutOfRange {
    pub k: u32,
    pub max: u32,
}

impl fmt::Display for FlagOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "size {} outside the flag range 1..={}", self.k, self.max)
    }
}

impl std::error::Error for FlagOutOfRange {}

/// Biclique check: leaves `bic` set iff the selected subset is a biclique
/// (vacuously for subsets with an empty side) and the pair wires holding the
/// intermediate edge comparisons.
///
/// Gate count is `m + 2*|L|*|R| + 1`.
pub fn build_ubic(g: &BipartiteGraph, layout: &QubitLayout) -> Circuit {
    assert_eq!(
        (layout.left(), layout.right()),
        (g.left_count(), g.right_count()),
        "layout dimensions do not match the graph"
    );
    let mut c = Circuit::new(layout.total_qubits());
    // Real edges: one Toffoli per existing edge, ascending (i, j).
    for (i, j) in g.edges() {
        c.push(Gate::mcx(
            vec![Control::pos(layout.vertex_left(i)), Control::pos(layout.vertex_right(j))],
            layout.real_edge(i, j),
        ));
    }
    // Virtual edges: one Toffoli per pair, edge or not.
    for i in 1..=layout.left() {
        for j in 1..=layout.right() {
            c.push(Gate::mcx(
                vec![Control::pos(layout.vertex_left(i)), Control::pos(layout.vertex_right(j))],
                layout.virtual_edge(i, j),
            ));
        }
    }
    // XOR the real wire into the virtual wire; survivors mark pairs selected
    // without an edge.
    for i in 1..=layout.left() {
        for j in 1..=layout.right() {
            c.push(Gate::cnot(layout.real_edge(i, j), layout.virtual_edge(i, j)));
        }
    }
    // All XORs cancelled -> biclique.
    let all_clear: Vec<Control> = (1..=layout.left())
        .flat_map(|i| (1..=layout.right()).map(move |j| (i, j)))
        .map(|(i, j)| Control::neg(layout.virtual_edge(i, j)))
        .collect();
    c.push(Gate::mcx(all_clear, layout.bic()));
    c
}

/// Emits one side's counting DP. Row `i` extends the count over the first
/// `i` vertices: `c_{i,j}` inherits `c_{i-1,j}` when vertex `i` is out and
/// `c_{i-1,j}` feeds `c_{i,j+1}` when it is in. Row 0 is the `bic` wire, so
/// counts exist only for bicliques. Wires in one row are written before any
/// of them is read, and at most one wire per row is ever 1.
fn push_side_dp(
    c: &mut Circuit,
    layout: &QubitLayout,
    side: u32,
    vertex_of: impl Fn(u32) -> usize,
    counter_of: impl Fn(u32, u32) -> usize,
) {
    for i in 1..=side {
        for j in 0..i {
            let source = if i == 1 { layout.bic() } else { counter_of(i - 1, j) };
            let v = vertex_of(i);
            c.push(Gate::mcx(
                vec![Control::pos(source), Control::neg(v)],
                counter_of(i, j),
            ));
            c.push(Gate::mcx(
                vec![Control::pos(source), Control::pos(v)],
                counter_of(i, j + 1),
            ));
        }
    }
}

/// Shared body of the three size counters: both side DPs, then one combining
/// Toffoli per `(i, j)` source pair produced by `flag_of`.
fn build_usize_with(
    layout: &QubitLayout,
    flag_of: impl Fn(u32, u32) -> Option<u32>,
) -> Circuit {
    let mut c = Circuit::new(layout.total_qubits());
    push_side_dp(
        &mut c,
        layout,
        layout.left(),
        |i| layout.vertex_left(i),
        |i, j| layout.counter_left(i, j),
    );
    push_side_dp(
        &mut c,
        layout,
        layout.right(),
        |j| layout.vertex_right(j),
        |i, j| layout.counter_right(i, j),
    );
    let (l, r) = (layout.left(), layout.right());
    for i in 1..=l {
        for j in 1..=r {
            if let Some(k) = flag_of(i, j) {
                c.push(Gate::mcx(
                    vec![
                        Control::pos(layout.counter_left(l, i)),
                        Control::pos(layout.counter_right(r, j)),
                    ],
                    layout.size_flag(k),
                ));
            }
        }
    }
    c
}

/// Edge-count flags: side counts `(i, j)` set flag `i*j`. At most one side
/// count pair is live per basis state, so the flags stay one-hot.
pub fn build_usize_edges(layout: &QubitLayout) -> Circuit {
    assert_eq!(layout.mode(), Objective::Edges, "layout was built for {}", layout.mode());
    build_usize_with(layout, |i, j| Some(i * j))
}

/// Vertex-count flags: side counts `(i, j)` set flag `i+j`. Subsets with an
/// empty side reach no flag and count as size 0.
pub fn build_usize_vertices(layout: &QubitLayout) -> Circuit {
    assert_eq!(layout.mode(), Objective::Vertices, "layout was built for {}", layout.mode());
    build_usize_with(layout, |i, j| Some(i + j))
}

/// Balanced flags: only equal side counts `(i, i)` set flag `2i`, so odd
/// flags and unbalanced bicliques never fire.
pub fn build_usize_balanced(layout: &QubitLayout) -> Circuit {
    assert_eq!(layout.mode(), Objective::Balanced, "layout was built for {}", layout.mode());
    build_usize_with(layout, |i, j| if i == j { Some(i + j) } else { None })
}

/// Size counter for the layout's own mode.
pub fn build_usize(layout: &QubitLayout) -> Circuit {
    match layout.mode() {
        Objective::Edges => build_usize_edges(layout),
        Objective::Vertices => build_usize_vertices(layout),
        Objective::Balanced => build_usize_balanced(layout),
    }
}

/// Phase kickback: copies the targeted size flag onto the phase qubit. In
/// threshold mode one CNOT is emitted for every flag at or above `k`; the
/// flags are one-hot, so at most one of them fires.
pub fn build_kickback(
    layout: &QubitLayout,
    target: SizeTarget,
) -> Result<Circuit, FlagOutOfRange> {
    let k = target.k();
    let max = layout.flag_count();
    if k < 1 || k > max {
        return Err(FlagOutOfRange { k, max });
    }
    let mut c = Circuit::new(layout.total_qubits());
    match target {
        SizeTarget::Exact(k) => c.push(Gate::cnot(layout.size_flag(k), layout.oracle_qubit())),
        SizeTarget::AtLeast(k) => {
            for kp in k..=max {
                c.push(Gate::cnot(layout.size_flag(kp), layout.oracle_qubit()));
            }
        }
    }
    Ok(c)
}

/// Inversion about the mean over the vertex register only: H and X on every
/// vertex qubit around a phase flip of the all-ones pattern, realized as an
/// H-MCX-H sandwich on the last vertex qubit.
pub fn build_diffusion(layout: &QubitLayout) -> Circuit {
    let n = layout.vertex_count();
    let mut c = Circuit::new(layout.total_qubits());
    for p in 0..n {
        c.push(Gate::h(layout.vertex(p)));
    }
    for p in 0..n {
        c.push(Gate::x(layout.vertex(p)));
    }
    let last = layout.vertex(n - 1);
    c.push(Gate::h(last));
    let controls: Vec<Control> = (0..n - 1).map(|p| Control::pos(layout.vertex(p))).collect();
    c.push(Gate::mcx(controls, last));
    c.push(Gate::h(last));
    for p in 0..n {
        c.push(Gate::x(layout.vertex(p)));
    }
    for p in 0..n {
        c.push(Gate::h(layout.vertex(p)));
    }
    c
}

/// Everything one amplitude-amplification run needs.
#[derive(Clone, Debug)]
pub struct GroverPlan {
    pub layout: QubitLayout,
    /// Uniform superposition on the vertex register, |0>-|1> on the phase
    /// qubit.
    pub prep: Circuit,
    /// Marking circuit including its own uncomputation.
    pub oracle: Circuit,
    pub diffusion: Circuit,
    /// Amplification rounds to run.
    pub iterations: usize,
    /// Exact solution count the iteration count was derived from.
    pub solutions: u64,
    pub objective: Objective,
    pub target: SizeTarget,
}

impl GroverPlan {
    /// Vertex register width.
    pub fn vertex_count(&self) -> u32 {
        self.layout.vertex_count()
    }

    /// Total register width.
    pub fn total_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    /// Basis state count of the vertex register.
    pub fn search_space(&self) -> u64 {
        1u64 << self.vertex_count()
    }
}

/// Builds the full plan for a graph, objective and size target, with
/// `solutions` the exact number of marked basis states. The iteration count
/// is `floor(pi/4 * sqrt(2^n / solutions))`; when no solution exists it
/// falls back to 0, meaning the equal superposition is measured directly.
pub fn build_plan(
    g: &BipartiteGraph,
    objective: Objective,
    target: SizeTarget,
    solutions: u64,
) -> Result<GroverPlan, FlagOutOfRange> {
    build_plan_with_fallback(g, objective, target, solutions, 0)
}

/// [`build_plan`] with an explicit iteration count for the no-solution case.
pub fn build_plan_with_fallback(
    g: &BipartiteGraph,
    objective: Objective,
    target: SizeTarget,
    solutions: u64,
    fallback_iterations: usize,
) -> Result<GroverPlan, FlagOutOfRange> {
    let layout = QubitLayout::new(g, objective);
    let width = layout.total_qubits();

    let mut prep = Circuit::new(width);
    for p in 0..layout.vertex_count() {
        prep.push(Gate::h(layout.vertex(p)));
    }
    prep.push(Gate::x(layout.oracle_qubit()));
    prep.push(Gate::h(layout.oracle_qubit()));

    let ubic = build_ubic(g, &layout);
    let usize_stage = build_usize(&layout);
    let kick = build_kickback(&layout, target)?;
    let oracle = ubic
        .compose(&usize_stage)
        .compose(&kick)
        .compose(&usize_stage.inverted())
        .compose(&ubic.inverted());

    let diffusion = build_diffusion(&layout);
    let iterations = if solutions >= 1 {
        grover::iteration_count(1u64 << layout.vertex_count(), solutions)
            .expect("solutions >= 1 was just checked")
    } else {
        fallback_iterations
    };

    Ok(GroverPlan {
        layout,
        prep,
        oracle,
        diffusion,
        iterations,
        solutions,
        objective,
        target,
    })
}
