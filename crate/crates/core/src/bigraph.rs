//! Bipartite graphs, vertex subsets, and the classical biclique predicate.
//!
//! A graph has left vertices `v1..v|L|` and right vertices `u1..u|R|`,
//! addressed 1-based. A [`VertexSubset`] packs one bit per vertex in the
//! order `v1..v|L| u1..u|R|`, with `v1` the most significant bit, so the
//! mask printed as a binary string reads the same way a measured register
//! is labelled: subset `{v1, u1}` of a 2x2 graph is `1010`.
//!
//! Everything here is exact and classical. The exhaustive routines are the
//! reference the quantum pipeline is tested against.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

/// Exhaustive enumeration refuses graphs with more vertices than this.
pub const EXHAUSTIVE_LIMIT: u32 = 24;

/// What "size" means for a biclique.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Number of edges, `|L(C)| * |R(C)|`.
    Edges,
    /// Number of vertices, `|L(C)| + |R(C)|`.
    Vertices,
    /// Number of vertices, restricted to subsets with `|L(C)| = |R(C)|`.
    Balanced,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Edges => write!(f, "edges"),
            Objective::Vertices => write!(f, "vertices"),
            Objective::Balanced => write!(f, "balanced"),
        }
    }
}

/// Size condition a subset is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SizeTarget {
    /// Objective size exactly `k`.
    Exact(u32),
    /// Objective size at least `k` (threshold mode).
    AtLeast(u32),
}

impl SizeTarget {
    /// The `k` the target was built with.
    pub fn k(&self) -> u32 {
        match *self {
            SizeTarget::Exact(k) | SizeTarget::AtLeast(k) => k,
        }
    }

    /// Whether a size passes the condition.
    pub fn admits(&self, size: u32) -> bool {
        match *self {
            SizeTarget::Exact(k) => size == k,
            SizeTarget::AtLeast(k) => size >= k,
        }
    }

    /// True for the threshold form.
    pub fn is_threshold(&self) -> bool {
        matches!(self, SizeTarget::AtLeast(_))
    }
}

impl fmt::Display for SizeTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SizeTarget::Exact(k) => write!(f, "= {k}"),
            SizeTarget::AtLeast(k) => write!(f, ">= {k}"),
        }
    }
}

/// Subset of the vertices of one graph, packed as described in the module doc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSubset {
    bits: u32,
    width: u32,
}

impl VertexSubset {
    /// Builds a subset from a packed mask. `width` is the vertex count of the
    /// owning graph; `bits` must fit in it.
    pub fn from_bits(bits: u32, width: u32) -> Self {
        assert!(width <= 32, "subset width {width} exceeds mask capacity");
        assert!(
            width == 32 || bits < (1u32 << width),
            "mask {bits:#b} does not fit in {width} bits"
        );
        VertexSubset { bits, width }
    }

    /// The empty subset.
    pub fn empty(width: u32) -> Self {
        Self::from_bits(0, width)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Membership of the vertex at 0-based position `p` (`v1` is position 0,
    /// `u1` is position `|L|`).
    pub fn contains(&self, p: u32) -> bool {
        assert!(p < self.width);
        self.bits >> (self.width - 1 - p) & 1 == 1
    }

    /// Total number of selected vertices.
    pub fn count(&self) -> u32 {
        self.bits.count_ones()
    }

    /// The mask as a binary string, `v1` first.
    pub fn label(&self) -> String {
        format!("{:0width$b}", self.bits, width = self.width as usize)
    }
}

impl fmt::Display for VertexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Construction errors for [`BipartiteGraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphError {
    /// Both sides need at least one vertex.
    EmptySide,
    /// An endpoint index is 0 or past its side's vertex count.
    EdgeOutOfRange { edge: (u32, u32) },
    /// The same edge was given twice.
    DuplicateEdge { edge: (u32, u32) },
    /// More edges requested than `|L| * |R|` distinct pairs exist.
    TooManyEdges { requested: usize, capacity: usize },
    /// More vertices than the 32-bit subset mask can hold.
    TooWide { vertices: u64 },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::EmptySide => write!(f, "both sides must have at least one vertex"),
            GraphError::EdgeOutOfRange { edge: (i, j) } => {
                write!(f, "edge ({i}, {j}) has an endpoint out of range")
            }
            GraphError::DuplicateEdge { edge: (i, j) } => {
                write!(f, "edge ({i}, {j}) listed more than once")
            }
            GraphError::TooManyEdges { requested, capacity } => {
                write!(f, "{requested} edges requested but only {capacity} pairs exist")
            }
            GraphError::TooWide { vertices } => {
                write!(f, "graph has {vertices} vertices; at most 32 are supported")
            }
        }
    }
}

impl std::error::Error for GraphError {}

/// Errors from [`BipartiteGraph::parse`], each carrying the 1-based line number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    /// The input had no non-comment lines.
    MissingHeader,
    /// The first data line was not two positive integers.
    BadHeader { line: usize, text: String },
    /// The header declared more vertices than a subset mask can hold.
    TooWide { line: usize, vertices: u64 },
    /// An edge line was not two integers.
    BadEdge { line: usize, text: String },
    /// An edge referenced a vertex outside the declared sides.
    OutOfRange { line: usize, edge: (u32, u32) },
    /// An edge appeared twice.
    Duplicate { line: usize, edge: (u32, u32) },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::MissingHeader => write!(f, "no header line found"),
            ParseError::BadHeader { line, text } => {
                write!(f, "line {line}: expected \"<left> <right>\", got {text:?}")
            }
            ParseError::TooWide { line, vertices } => {
                write!(f, "line {line}: graph has {vertices} vertices; at most 32 are supported")
            }
            ParseError::BadEdge { line, text } => {
                write!(f, "line {line}: expected \"<left> <right>\" edge, got {text:?}")
            }
            ParseError::OutOfRange { line, edge: (i, j) } => {
                write!(f, "line {line}: edge ({i}, {j}) out of range")
            }
            ParseError::Duplicate { line, edge: (i, j) } => {
                write!(f, "line {line}: duplicate edge ({i}, {j})")
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// Raised when an exhaustive routine is asked for more vertices than
/// [`EXHAUSTIVE_LIMIT`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LimitExceeded {
    pub vertices: u32,
    pub limit: u32,
}

impl fmt::Display for LimitExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} vertices exceed the exhaustive-enumeration limit of {}",
            self.vertices, self.limit
        )
    }
}

impl std::error::Error for LimitExceeded {}

/// Undirected bipartite graph with 1-based vertex names on each side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    left: u32,
    right: u32,
    edges: BTreeSet<(u32, u32)>,
    /// adj[i-1] bit (j-1) set iff edge (i, j) exists.
    adj: Vec<u32>,
}

impl BipartiteGraph {
    /// Builds a graph, validating side sizes, edge ranges and duplicates.
    pub fn new(
        left: u32,
        right: u32,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, GraphError> {
        if left == 0 || right == 0 {
            return Err(GraphError::EmptySide);
        }
        let vertices = left as u64 + right as u64;
        if vertices > 32 {
            return Err(GraphError::TooWide { vertices });
        }
        let mut set = BTreeSet::new();
        let mut adj = vec![0u32; left as usize];
        for (i, j) in edges {
            if i == 0 || j == 0 || i > left || j > right {
                return Err(GraphError::EdgeOutOfRange { edge: (i, j) });
            }
            if !set.insert((i, j)) {
                return Err(GraphError::DuplicateEdge { edge: (i, j) });
            }
            adj[(i - 1) as usize] |= 1 << (j - 1);
        }
        Ok(BipartiteGraph { left, right, edges: set, adj })
    }

    /// Parses the text format: a `<left> <right>` header line, then one
    /// `<i> <j>` line per edge. `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut header: Option<(u32, u32, usize)> = None;
        let mut edges: Vec<(u32, u32, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let pair = if fields.len() == 2 {
                match (fields[0].parse::<u32>(), fields[1].parse::<u32>()) {
                    (Ok(a), Ok(b)) => Some((a, b)),
                    _ => None,
                }
            } else {
                None
            };
            match (&header, pair) {
                (None, Some((l, r))) if l > 0 && r > 0 => header = Some((l, r, line)),
                (None, _) => {
                    return Err(ParseError::BadHeader { line, text: content.to_string() })
                }
                (Some(_), Some((i, j))) => edges.push((i, j, line)),
                (Some(_), None) => {
                    return Err(ParseError::BadEdge { line, text: content.to_string() })
                }
            }
        }
        let (left, right, header_line) = header.ok_or(ParseError::MissingHeader)?;
        let vertices = left as u64 + right as u64;
        if vertices > 32 {
            return Err(ParseError::TooWide { line: header_line, vertices });
        }
        let mut graph = BipartiteGraph::new(left, right, [])
            .expect("header already validated as positive and narrow");
        for (i, j, line) in edges {
            if i == 0 || j == 0 || i > left || j > right {
                return Err(ParseError::OutOfRange { line, edge: (i, j) });
            }
            if !graph.edges.insert((i, j)) {
                return Err(ParseError::Duplicate { line, edge: (i, j) });
            }
            graph.adj[(i - 1) as usize] |= 1 << (j - 1);
        }
        Ok(graph)
    }

    /// Samples a graph with exactly `edges` distinct edges, uniformly over
    /// pairs, deterministically for a given seed.
    pub fn synthetic(left: u32, right: u32, edges: usize, seed: u64) -> Result<Self, GraphError> {
        use rand::SeedableRng;
        if left == 0 || right == 0 {
            return Err(GraphError::EmptySide);
        }
        let capacity = (left as usize) * (right as usize);
        if edges > capacity {
            return Err(GraphError::TooManyEdges { requested: edges, capacity });
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let picked = rand::seq::index::sample(&mut rng, capacity, edges);
        let pairs = picked
            .iter()
            .map(|idx| ((idx / right as usize) as u32 + 1, (idx % right as usize) as u32 + 1));
        BipartiteGraph::new(left, right, pairs)
    }

    /// Serializes back to the text format accepted by [`Self::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.left, self.right);
        for (i, j) in &self.edges {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    pub fn left_count(&self) -> u32 {
        self.left
    }

    pub fn right_count(&self) -> u32 {
        self.right
    }

    /// Total vertex count `n = |L| + |R|`.
    pub fn vertex_count(&self) -> u32 {
        self.left + self.right
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: u32, j: u32) -> bool {
        i >= 1 && j >= 1 && i <= self.left && j <= self.right
            && self.adj[(i - 1) as usize] >> (j - 1) & 1 == 1
    }

    /// Edges in ascending `(i, j)` order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    /// Splits a subset into side masks: left bit `i-1` marks `vi`, right bit
    /// `j-1` marks `uj`.
    pub fn split(&self, c: VertexSubset) -> (u32, u32) {
        assert_eq!(c.width(), self.vertex_count(), "subset width mismatch");
        let mut left_mask = 0u32;
        for i in 1..=self.left {
            if c.contains(i - 1) {
                left_mask |= 1 << (i - 1);
            }
        }
        let mut right_mask = 0u32;
        for j in 1..=self.right {
            if c.contains(self.left + j - 1) {
                right_mask |= 1 << (j - 1);
            }
        }
        (left_mask, right_mask)
    }

    /// Number of selected vertices on each side.
    pub fn side_sizes(&self, c: VertexSubset) -> (u32, u32) {
        let (l, r) = self.split(c);
        (l.count_ones(), r.count_ones())
    }

    /// Whether every selected left vertex is adjacent to every selected right
    /// vertex. Subsets with an empty side pass vacuously.
    pub fn is_biclique(&self, c: VertexSubset) -> bool {
        let (left_mask, right_mask) = self.split(c);
        if left_mask == 0 || right_mask == 0 {
            return true;
        }
        let mut rest = left_mask;
        while rest != 0 {
            let i = rest.trailing_zeros();
            if self.adj[i as usize] & right_mask != right_mask {
                return false;
            }
            rest &= rest - 1;
        }
        true
    }

    /// Edge count `|L(C)| * |R(C)|` of a biclique. Calling this on a
    /// non-biclique is a contract violation and panics.
    pub fn edge_size(&self, c: VertexSubset) -> u32 {
        assert!(self.is_biclique(c), "edge_size called on non-biclique {c}");
        let (l, r) = self.side_sizes(c);
        l * r
    }

    /// Objective size of a subset, or `None` when it is not a biclique.
    /// Subsets with an empty side score 0 under every objective, and so do
    /// unbalanced bicliques under [`Objective::Balanced`].
    pub fn biclique_size(&self, c: VertexSubset, objective: Objective) -> Option<u32> {
        if !self.is_biclique(c) {
            return None;
        }
        let (l, r) = self.side_sizes(c);
        if l == 0 || r == 0 {
            return Some(0);
        }
        Some(match objective {
            Objective::Edges => l * r,
            Objective::Vertices => l + r,
            Objective::Balanced => {
                if l == r {
                    l + r
                } else {
                    0
                }
            }
        })
    }

    /// The predicate the search oracles mark: biclique with an admitted
    /// objective size.
    pub fn satisfies(&self, c: VertexSubset, objective: Objective, target: SizeTarget) -> bool {
        self.biclique_size(c, objective).is_some_and(|s| target.admits(s))
    }

    /// Exhaustively maximizes the objective over all `2^n` subsets. Ties go
    /// to the smallest mask value, so the empty subset is returned when no
    /// biclique scores above 0.
    pub fn brute_force_max(
        &self,
        objective: Objective,
    ) -> Result<(VertexSubset, u32), LimitExceeded> {
        let n = self.vertex_count();
        if n > EXHAUSTIVE_LIMIT {
            return Err(LimitExceeded { vertices: n, limit: EXHAUSTIVE_LIMIT });
        }
        let total = 1u64 << n;
        let best = (0..total)
            .into_par_iter()
            .fold(
                || (0u32, 0u32),
                |(best_bits, best_size), bits| {
                    let c = VertexSubset::from_bits(bits as u32, n);
                    match self.biclique_size(c, objective) {
                        Some(size) if size > best_size => (bits as u32, size),
                        _ => (best_bits, best_size),
                    }
                },
            )
            .reduce(
                || (0u32, 0u32),
                |a, b| {
                    if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                        b
                    } else {
                        a
                    }
                },
            );
        Ok((VertexSubset::from_bits(best.0, n), best.1))
    }

    /// Exact number of subsets that are bicliques with an admitted objective
    /// size.
    pub fn count_bicliques(&self, objective: Objective, target: SizeTarget) -> u64 {
        let n = self.vertex_count();
        assert!(
            n <= EXHAUSTIVE_LIMIT,
            "{n} vertices exceed the exhaustive-enumeration limit"
        );
        let total = 1u64 << n;
        (0..total)
            .into_par_iter()
            .filter(|&bits| {
                self.satisfies(VertexSubset::from_bits(bits as u32, n), objective, target)
            })
            .count() as u64
    }
}
