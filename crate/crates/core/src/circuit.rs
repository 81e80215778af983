//! Gate-level circuit representation and the qubit layout shared by the
//! oracle builders and both engines.
//!
//! The gate alphabet is deliberately small: Hadamard, X, and multi-controlled
//! X with per-control polarity. Every gate is self-inverse, so inverting a
//! circuit is reversing it.

use std::fmt;

use crate::bigraph::{BipartiteGraph, Objective};

/// Control condition of an MCX gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    /// Fires when the control qubit is 1.
    Positive,
    /// Fires when the control qubit is 0.
    Negative,
}

/// One control wire of an MCX gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn pos(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Positive }
    }

    pub fn neg(qubit: usize) -> Self {
        Control { qubit, polarity: Polarity::Negative }
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.polarity {
            Polarity::Positive => '+',
            Polarity::Negative => '-',
        };
        write!(f, "{sign}{}", self.qubit)
    }
}

/// A single gate. All kinds square to the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    H { target: usize },
    X { target: usize },
    Mcx { controls: Vec<Control>, target: usize },
}

impl Gate {
    pub fn h(target: usize) -> Self {
        Gate::H { target }
    }

    pub fn x(target: usize) -> Self {
        Gate::X { target }
    }

    /// Multi-controlled X. Controls must be distinct and must not include the
    /// target.
    pub fn mcx(controls: Vec<Control>, target: usize) -> Self {
        for (a, c) in controls.iter().enumerate() {
            assert!(c.qubit != target, "MCX control {} equals its target", c.qubit);
            assert!(
                controls[..a].iter().all(|p| p.qubit != c.qubit),
                "MCX control {} repeated",
                c.qubit
            );
        }
        Gate::Mcx { controls, target }
    }

    /// CNOT with a positive control.
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::mcx(vec![Control::pos(control)], target)
    }

    pub fn target(&self) -> usize {
        match *self {
            Gate::H { target } | Gate::X { target } | Gate::Mcx { target, .. } => target,
        }
    }

    /// Highest qubit index the gate touches.
    fn max_qubit(&self) -> usize {
        match self {
            Gate::H { target } | Gate::X { target } => *target,
            Gate::Mcx { controls, target } => controls
                .iter()
                .map(|c| c.qubit)
                .chain(std::iter::once(*target))
                .max()
                .expect("chain is never empty"),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H { target } => write!(f, "H t={target}"),
            Gate::X { target } => write!(f, "X t={target}"),
            Gate::Mcx { controls, target } => {
                write!(f, "MCX t={target} c=")?;
                for (i, c) in controls.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

/// Replay failure for circuits containing gates without classical bit
/// semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonClassicalGate {
    /// Position of the offending gate in the circuit.
    pub index: usize,
}

impl fmt::Display for NonClassicalGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gate {} is not an X or MCX and cannot be replayed on bits", self.index)
    }
}

impl std::error::Error for NonClassicalGate {}

/// Ordered gate list over a fixed register width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubit_count: usize) -> Self {
        Circuit { qubit_count, gates: Vec::new() }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate. Panics if it touches a qubit outside the register.
    pub fn push(&mut self, gate: Gate) {
        assert!(
            gate.max_qubit() < self.qubit_count,
            "gate {gate} exceeds register width {}",
            self.qubit_count
        );
        self.gates.push(gate);
    }

    /// The inverse circuit: same gates in reverse order, since every kind in
    /// the alphabet is self-inverse.
    pub fn inverted(&self) -> Circuit {
        Circuit {
            qubit_count: self.qubit_count,
            gates: self.gates.iter().rev().cloned().collect(),
        }
    }

    /// Concatenation `self` then `other`. Panics on width mismatch.
    pub fn compose(&self, other: &Circuit) -> Circuit {
        assert_eq!(
            self.qubit_count, other.qubit_count,
            "cannot compose circuits of different widths"
        );
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Circuit { qubit_count: self.qubit_count, gates }
    }

    /// Classical bit semantics: X flips, MCX flips when every control matches
    /// its polarity. Fails on H.
    pub fn replay_bits(&self, bits: &mut [bool]) -> Result<(), NonClassicalGate> {
        assert_eq!(bits.len(), self.qubit_count, "bit vector width mismatch");
        for (index, gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::H { .. } => return Err(NonClassicalGate { index }),
                Gate::X { target } => bits[*target] = !bits[*target],
                Gate::Mcx { controls, target } => {
                    let fire = controls.iter().all(|c| match c.polarity {
                        Polarity::Positive => bits[c.qubit],
                        Polarity::Negative => !bits[c.qubit],
                    });
                    if fire {
                        bits[*target] = !bits[*target];
                    }
                }
            }
        }
        Ok(())
    }

    /// One gate per line, in order. Format: `H t=3`, `X t=5`,
    /// `MCX t=9 c=+0,-2`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for gate in &self.gates {
            out.push_str(&gate.to_string());
            out.push('\n');
        }
        out
    }
}

/// Role-indexed register map for one graph and one counting mode.
///
/// Index order: vertex qubits first (`v1..v|L|` then `u1..u|R|`), then real
/// edge wires, virtual edge wires, the biclique flag, left counters, right
/// counters, size flags, and the phase-kick qubit last. Counters `cl_{i,j}`
/// exist for `i` in `[1, |L|]`, `j` in `[0, i]`; the absent `cl_{0,0}` is
/// played by the biclique flag itself, which carries the count seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitLayout {
    left: u32,
    right: u32,
    mode: Objective,
}

impl QubitLayout {
    pub fn new(g: &BipartiteGraph, mode: Objective) -> Self {
        QubitLayout { left: g.left_count(), right: g.right_count(), mode }
    }

    pub fn left(&self) -> u32 {
        self.left
    }

    pub fn right(&self) -> u32 {
        self.right
    }

    pub fn mode(&self) -> Objective {
        self.mode
    }

    /// Vertex register width `n`.
    pub fn vertex_count(&self) -> u32 {
        self.left + self.right
    }

    /// Vertex qubit by 0-based position (`v1` is position 0).
    pub fn vertex(&self, p: u32) -> usize {
        assert!(p < self.vertex_count());
        p as usize
    }

    /// Qubit of left vertex `vi`, 1-based.
    pub fn vertex_left(&self, i: u32) -> usize {
        assert!((1..=self.left).contains(&i));
        (i - 1) as usize
    }

    /// Qubit of right vertex `uj`, 1-based.
    pub fn vertex_right(&self, j: u32) -> usize {
        assert!((1..=self.right).contains(&j));
        (self.left + j - 1) as usize
    }

    fn pair_offset(&self, i: u32, j: u32) -> usize {
        assert!((1..=self.left).contains(&i) && (1..=self.right).contains(&j));
        ((i - 1) * self.right + (j - 1)) as usize
    }

    /// Wire recording that edge `(vi, uj)` exists and both endpoints are
    /// selected.
    pub fn real_edge(&self, i: u32, j: u32) -> usize {
        self.vertex_count() as usize + self.pair_offset(i, j)
    }

    /// Wire recording that both endpoints of pair `(vi, uj)` are selected,
    /// edge or not.
    pub fn virtual_edge(&self, i: u32, j: u32) -> usize {
        self.vertex_count() as usize + self.pair_count() + self.pair_offset(i, j)
    }

    fn pair_count(&self) -> usize {
        (self.left * self.right) as usize
    }

    /// The biclique flag.
    pub fn bic(&self) -> usize {
        self.vertex_count() as usize + 2 * self.pair_count()
    }

    fn counter_left_base(&self) -> usize {
        self.bic() + 1
    }

    /// Triangle offset of row `i`: counters for rows `1..i` occupy
    /// `2 + 3 + .. + i` wires.
    fn triangle(i: u32) -> usize {
        ((i - 1) * (i + 2) / 2) as usize
    }

    /// Wires the left DP triangle occupies.
    fn counter_left_size(&self) -> usize {
        Self::triangle(self.left + 1)
    }

    fn counter_right_size(&self) -> usize {
        Self::triangle(self.right + 1)
    }

    /// Left counter `cl_{i,j}`: after processing `v1..vi`, exactly `j` of
    /// them are selected. `i` in `[1, |L|]`, `j` in `[0, i]`.
    pub fn counter_left(&self, i: u32, j: u32) -> usize {
        assert!((1..=self.left).contains(&i) && j <= i, "cl_{{{i},{j}}} does not exist");
        self.counter_left_base() + Self::triangle(i) + j as usize
    }

    /// Right counter `cr_{i,j}` over `u1..ui`.
    pub fn counter_right(&self, i: u32, j: u32) -> usize {
        assert!((1..=self.right).contains(&i) && j <= i, "cr_{{{i},{j}}} does not exist");
        self.counter_left_base() + self.counter_left_size() + Self::triangle(i) + j as usize
    }

    /// Number of size flags: one per reachable product in edge mode, one per
    /// vertex-count in the other modes.
    pub fn flag_count(&self) -> u32 {
        match self.mode {
            Objective::Edges => self.left * self.right,
            Objective::Vertices | Objective::Balanced => self.vertex_count(),
        }
    }

    /// Size flag `k`, 1-based; fires when the selected biclique has objective
    /// size exactly `k`.
    pub fn size_flag(&self, k: u32) -> usize {
        assert!(
            (1..=self.flag_count()).contains(&k),
            "size flag {k} out of range 1..={}",
            self.flag_count()
        );
        self.counter_left_base()
            + self.counter_left_size()
            + self.counter_right_size()
            + (k - 1) as usize
    }

    /// The phase-kick qubit, always last.
    pub fn oracle_qubit(&self) -> usize {
        self.size_flag(self.flag_count()) + 1
    }

    pub fn total_qubits(&self) -> usize {
        self.oracle_qubit() + 1
    }

    /// All wires that must return to 0 after an oracle application: everything
    /// between the vertex register and the phase-kick qubit.
    pub fn aux_range(&self) -> std::ops::Range<usize> {
        self.vertex_count() as usize..self.oracle_qubit()
    }

    /// Classical register state for a vertex basis label: vertex qubit `p`
    /// holds bit `n-1-p` of the label (so the label string reads `v1` first),
    /// every other wire starts at 0.
    pub fn basis_bits(&self, label: u32) -> Vec<bool> {
        let n = self.vertex_count();
        assert!(label < 1u32 << n, "label {label:#b} does not fit {n} vertex qubits");
        let mut bits = vec![false; self.total_qubits()];
        for p in 0..n {
            bits[p as usize] = label >> (n - 1 - p) & 1 == 1;
        }
        bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::BipartiteGraph;

    fn demo() -> BipartiteGraph {
        BipartiteGraph::new(2, 2, [(1, 1), (2, 1), (2, 2)]).unwrap()
    }

    #[test]
    #[should_panic(expected = "repeated")]
    fn mcx_rejects_duplicate_controls() {
        Gate::mcx(vec![Control::pos(0), Control::neg(0)], 1);
    }

    #[test]
    #[should_panic(expected = "equals its target")]
    fn mcx_rejects_target_as_control() {
        Gate::mcx(vec![Control::pos(1)], 1);
    }

    #[test]
    #[should_panic(expected = "exceeds register width")]
    fn push_rejects_out_of_range_qubits() {
        let mut c = Circuit::new(2);
        c.push(Gate::x(2));
    }

    #[test]
    fn dump_format_is_stable() {
        let mut c = Circuit::new(10);
        c.push(Gate::h(3));
        c.push(Gate::x(5));
        c.push(Gate::mcx(vec![Control::pos(0), Control::neg(2)], 9));
        c.push(Gate::cnot(1, 4));
        assert_eq!(c.dump(), "H t=3\nX t=5\nMCX t=9 c=+0,-2\nMCX t=4 c=+1\n");
    }

    #[test]
    fn inversion_reverses_and_is_an_involution() {
        let mut c = Circuit::new(3);
        c.push(Gate::x(0));
        c.push(Gate::cnot(0, 1));
        c.push(Gate::mcx(vec![Control::pos(0), Control::pos(1)], 2));
        let inv = c.inverted();
        assert_eq!(inv.gates()[0], c.gates()[2]);
        assert_eq!(inv.inverted(), c);

        // Replaying a circuit then its inverse restores every bit pattern.
        let round_trip = c.compose(&inv);
        for bits_in in 0..8u32 {
            let mut bits: Vec<bool> = (0..3).map(|q| bits_in >> q & 1 == 1).collect();
            let orig = bits.clone();
            round_trip.replay_bits(&mut bits).unwrap();
            assert_eq!(bits, orig, "pattern {bits_in:03b}");
        }
    }

    #[test]
    fn compose_concatenates() {
        let mut a = Circuit::new(2);
        a.push(Gate::x(0));
        let mut b = Circuit::new(2);
        b.push(Gate::x(1));
        b.push(Gate::cnot(0, 1));
        let ab = a.compose(&b);
        assert_eq!(ab.len(), 3);
        assert_eq!(ab.gates()[0], Gate::x(0));
        assert_eq!(ab.gates()[2], Gate::cnot(0, 1));
    }

    #[test]
    #[should_panic(expected = "different widths")]
    fn compose_rejects_width_mismatch() {
        Circuit::new(2).compose(&Circuit::new(3));
    }

    #[test]
    fn replay_applies_polarities_and_rejects_h() {
        let mut c = Circuit::new(2);
        c.push(Gate::mcx(vec![Control::neg(0)], 1));
        let mut bits = vec![false, false];
        c.replay_bits(&mut bits).unwrap();
        assert_eq!(bits, vec![false, true], "negative control fires on 0");

        let mut h = Circuit::new(1);
        h.push(Gate::h(0));
        assert_eq!(h.replay_bits(&mut [false]), Err(NonClassicalGate { index: 0 }));
    }

    #[test]
    fn demo_layout_indices_are_frozen() {
        let l = QubitLayout::new(&demo(), Objective::Edges);
        assert_eq!(l.vertex_left(1), 0);
        assert_eq!(l.vertex_left(2), 1);
        assert_eq!(l.vertex_right(1), 2);
        assert_eq!(l.vertex_right(2), 3);
        assert_eq!(l.real_edge(1, 1), 4);
        assert_eq!(l.real_edge(2, 2), 7);
        assert_eq!(l.virtual_edge(1, 1), 8);
        assert_eq!(l.virtual_edge(2, 2), 11);
        assert_eq!(l.bic(), 12);
        assert_eq!(l.counter_left(1, 0), 13);
        assert_eq!(l.counter_left(1, 1), 14);
        assert_eq!(l.counter_left(2, 0), 15);
        assert_eq!(l.counter_left(2, 2), 17);
        assert_eq!(l.counter_right(1, 0), 18);
        assert_eq!(l.counter_right(2, 2), 22);
        assert_eq!(l.size_flag(1), 23);
        assert_eq!(l.size_flag(4), 26);
        assert_eq!(l.oracle_qubit(), 27);
        assert_eq!(l.total_qubits(), 28);
        assert_eq!(l.aux_range(), 4..27);
    }

    #[test]
    fn small_layout_totals_are_frozen() {
        let one_one = BipartiteGraph::new(1, 1, [(1, 1)]).unwrap();
        assert_eq!(QubitLayout::new(&one_one, Objective::Edges).total_qubits(), 11);

        let one_two = BipartiteGraph::new(1, 2, [(1, 1)]).unwrap();
        assert_eq!(QubitLayout::new(&one_two, Objective::Edges).total_qubits(), 18);
        assert_eq!(QubitLayout::new(&one_two, Objective::Vertices).total_qubits(), 19);
        assert_eq!(QubitLayout::new(&one_two, Objective::Balanced).total_qubits(), 19);
    }

    #[test]
    fn layout_is_contiguous_and_matches_the_sum_formula() {
        for (left, right) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 2), (3, 3), (4, 3), (5, 5)] {
            let g = BipartiteGraph::new(left, right, []).unwrap();
            for mode in [Objective::Edges, Objective::Vertices, Objective::Balanced] {
                let l = QubitLayout::new(&g, mode);
                let n = (left + right) as usize;
                let pairs = (left * right) as usize;
                let counters = |s: u32| (s * (s + 3) / 2) as usize;
                let expected = n
                    + 2 * pairs
                    + 1
                    + counters(left)
                    + counters(right)
                    + l.flag_count() as usize
                    + 1;
                assert_eq!(l.total_qubits(), expected, "{left}x{right} {mode}");

                let mut seen = vec![false; l.total_qubits()];
                let mut mark = |q: usize| {
                    assert!(!seen[q], "{left}x{right} {mode}: wire {q} assigned twice");
                    seen[q] = true;
                };
                for p in 0..l.vertex_count() {
                    mark(l.vertex(p));
                }
                for i in 1..=left {
                    for j in 1..=right {
                        mark(l.real_edge(i, j));
                        mark(l.virtual_edge(i, j));
                    }
                }
                mark(l.bic());
                for i in 1..=left {
                    for j in 0..=i {
                        mark(l.counter_left(i, j));
                    }
                }
                for i in 1..=right {
                    for j in 0..=i {
                        mark(l.counter_right(i, j));
                    }
                }
                for k in 1..=l.flag_count() {
                    mark(l.size_flag(k));
                }
                mark(l.oracle_qubit());
                assert!(seen.iter().all(|&s| s), "{left}x{right} {mode}: wire gap");
            }
        }
    }
}
