//! Iteration math and the verified search drivers.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bigraph::{
    BipartiteGraph, LimitExceeded, Objective, SizeTarget, VertexSubset, EXHAUSTIVE_LIMIT,
};
use crate::oracle::{build_plan_with_fallback, FlagOutOfRange};
use crate::sim::{self, Engine, EngineRun, SimError};

/// Raised for iteration math with no marked states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoSolutions;

impl fmt::Display for NoSolutions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "iteration count is undefined for zero marked states")
    }
}

impl std::error::Error for NoSolutions {}

/// Amplification rounds for `space` basis states containing `solutions`
/// marked ones: `floor(pi/4 * sqrt(space / solutions))`.
pub fn iteration_count(space: u64, solutions: u64) -> Result<usize, NoSolutions> {
    if solutions == 0 {
        return Err(NoSolutions);
    }
    assert!(solutions <= space, "more marked states than the space holds");
    let t = std::f64::consts::FRAC_PI_4 * (space as f64 / solutions as f64).sqrt();
    Ok(t as usize)
}

/// Probability that measuring after `iterations` rounds yields a marked
/// state: `sin^2((2T+1) * asin(sqrt(M/N)))`. At `T = 0` this is `M/N`, the
/// chance of hitting a marked state in the bare superposition. Zero marked
/// states give probability 0.
pub fn success_probability(space: u64, solutions: u64, iterations: usize) -> f64 {
    if solutions == 0 {
        return 0.0;
    }
    assert!(solutions <= space, "more marked states than the space holds");
    let theta = (solutions as f64 / space as f64).sqrt().asin();
    ((2 * iterations + 1) as f64 * theta).sin().powi(2)
}

/// Search failures.
#[derive(Clone, Debug, PartialEq)]
pub enum SearchError {
    /// The requested size has no flag wire in the layout.
    Flag(FlagOutOfRange),
    /// An engine refused or failed the run.
    Sim(SimError),
    /// The graph is too large for exact solution counting.
    Size(LimitExceeded),
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::Flag(e) => e.fmt(f),
            SearchError::Sim(e) => e.fmt(f),
            SearchError::Size(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for SearchError {}

impl From<FlagOutOfRange> for SearchError {
    fn from(e: FlagOutOfRange) -> Self {
        SearchError::Flag(e)
    }
}

impl From<SimError> for SearchError {
    fn from(e: SimError) -> Self {
        SearchError::Sim(e)
    }
}

impl From<LimitExceeded> for SearchError {
    fn from(e: LimitExceeded) -> Self {
        SearchError::Size(e)
    }
}

/// Knobs shared by the search drivers.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub engine: Engine,
    /// Seeds the measurement draws; a seed fixes every result exactly.
    pub seed: u64,
    /// Measurement attempts per executed plan before giving up.
    pub repeats: u32,
    /// Rounds to run when no marked state exists, where the iteration
    /// formula is undefined. The honest outcome of such a run is a uniform
    /// draw that fails verification.
    pub fallback_iterations: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            engine: Engine::Tracked,
            seed: 0,
            repeats: 3,
            fallback_iterations: 0,
        }
    }
}

/// Outcome of a fixed-size search.
#[derive(Clone, Debug)]
pub struct FixedSearchResult {
    pub objective: Objective,
    pub target: SizeTarget,
    /// Exact number of satisfying subsets.
    pub solutions: u64,
    /// Amplification rounds the plan ran.
    pub iterations: usize,
    /// Measurements drawn, including the successful one.
    pub attempts: u32,
    /// First measured subset that verified classically.
    pub subset: Option<VertexSubset>,
    /// The engine run behind the measurements, snapshots included.
    pub run: EngineRun,
}

/// One executed threshold probe inside a maximum search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeRecord {
    pub target: SizeTarget,
    pub solutions: u64,
    pub iterations: usize,
    pub attempts: u32,
    pub found: Option<VertexSubset>,
}

/// Outcome of a maximum search.
#[derive(Clone, Debug)]
pub struct MaxSearchResult {
    pub objective: Objective,
    /// Optimal objective value. Feasibility decisions rest on exact counts,
    /// so this is certain even when no witness was measured.
    pub size: u32,
    /// Witness subset of exactly the optimal size, when a measurement at
    /// the optimum verified. Absent for the degenerate zero optimum, which
    /// has no witness by definition.
    pub subset: Option<VertexSubset>,
    /// Whether a measured subset passed the classical biclique and size
    /// check; always false when `subset` is absent.
    pub verified: bool,
    pub probes: Vec<ProbeRecord>,
}

fn ensure_countable(g: &BipartiteGraph) -> Result<(), SearchError> {
    let n = g.vertex_count();
    if n > EXHAUSTIVE_LIMIT {
        return Err(LimitExceeded { vertices: n, limit: EXHAUSTIVE_LIMIT }.into());
    }
    Ok(())
}

/// Amplified search for a biclique matching `target`.
///
/// Builds the plan with the exact solution count, executes it once, then
/// draws up to `repeats` independent measurements and returns the first
/// subset that verifies classically. When nothing satisfies the target the
/// plan runs `fallback_iterations` rounds and a single draw documents the
/// failure; amplification cannot conjure a solution.
pub fn search_fixed(
    g: &BipartiteGraph,
    objective: Objective,
    target: SizeTarget,
    opts: &SearchOptions,
) -> Result<FixedSearchResult, SearchError> {
    ensure_countable(g)?;
    let solutions = g.count_bicliques(objective, target);
    let plan = build_plan_with_fallback(g, objective, target, solutions, opts.fallback_iterations)?;
    let run = sim::run_plan(&plan, opts.engine)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = g.vertex_count();
    let cap = if solutions == 0 { 1 } else { opts.repeats.max(1) };
    let mut subset = None;
    let mut attempts = 0;
    {
        let dist = run.final_distribution();
        for _ in 0..cap {
            attempts += 1;
            let c = VertexSubset::from_bits(sim::draw(dist, &mut rng), n);
            if g.satisfies(c, objective, target) {
                subset = Some(c);
                break;
            }
        }
    }
    Ok(FixedSearchResult {
        objective,
        target,
        solutions,
        iterations: plan.iterations,
        attempts,
        subset,
        run,
    })
}

fn probe(
    g: &BipartiteGraph,
    objective: Objective,
    target: SizeTarget,
    solutions: u64,
    opts: &SearchOptions,
    rng: &mut ChaCha8Rng,
) -> Result<ProbeRecord, SearchError> {
    let plan = build_plan_with_fallback(g, objective, target, solutions, opts.fallback_iterations)?;
    let run = sim::run_plan(&plan, opts.engine)?;
    let dist = run.final_distribution();
    let n = g.vertex_count();
    let cap = if solutions == 0 { 1 } else { opts.repeats.max(1) };
    let mut found = None;
    let mut attempts = 0;
    for _ in 0..cap {
        attempts += 1;
        let c = VertexSubset::from_bits(sim::draw(dist, rng), n);
        if g.satisfies(c, objective, target) {
            found = Some(c);
            break;
        }
    }
    Ok(ProbeRecord { target, solutions, iterations: plan.iterations, attempts, found })
}

/// Maximum-biclique search by monotone bisection over a size threshold.
///
/// The work is split: exact classical counts decide which thresholds are
/// feasible, making the reported size deterministic, while the amplified
/// runs supply witness subsets at the feasible probes. Infeasible probes
/// still execute their plan and observe the failed verification that a
/// threshold test without the count would have produced.
///
/// The bisection domain depends on the objective: edge count in
/// `[1, |L||R|]`, vertex count in `[2, n]`, or per-side size in
/// `[1, min(|L|, |R|)]` for balanced search (whose reported size is the
/// vertex count of the square biclique).
pub fn search_max(
    g: &BipartiteGraph,
    objective: Objective,
    opts: &SearchOptions,
) -> Result<MaxSearchResult, SearchError> {
    ensure_countable(g)?;
    let n = g.vertex_count();
    let (lo0, hi0) = match objective {
        Objective::Edges => (1, g.left_count() * g.right_count()),
        Objective::Vertices => (2, n),
        Objective::Balanced => (1, g.left_count().min(g.right_count())),
    };
    let target_of = |v: u32| match objective {
        Objective::Balanced => SizeTarget::AtLeast(2 * v),
        _ => SizeTarget::AtLeast(v),
    };
    let size_of = |v: u32| match objective {
        Objective::Balanced => 2 * v,
        _ => v,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut probes = Vec::new();

    if g.count_bicliques(objective, target_of(lo0)) == 0 {
        // No nonempty biclique exists; there is no witness to hunt for and
        // nothing a measurement could verify.
        return Ok(MaxSearchResult { objective, size: 0, subset: None, verified: false, probes });
    }

    let mut lo = lo0;
    let mut hi = hi0;
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        let solutions = g.count_bicliques(objective, target_of(mid));
        probes.push(probe(g, objective, target_of(mid), solutions, opts, &mut rng)?);
        if solutions > 0 {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }

    let best = target_of(lo);
    let mut witness = probes.iter().find(|p| p.target == best).and_then(|p| p.found);
    if witness.is_none() && !probes.iter().any(|p| p.target == best) {
        // Bisection midpoints never land on the bottom of the range; probe
        // it directly so the witness comes from the optimal threshold.
        let solutions = g.count_bicliques(objective, best);
        let record = probe(g, objective, best, solutions, opts, &mut rng)?;
        witness = record.found;
        probes.push(record);
    }
    Ok(MaxSearchResult {
        objective,
        size: size_of(lo),
        subset: witness,
        verified: witness.is_some(),
        probes,
    })
}
