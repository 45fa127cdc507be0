//! Sparse exact-cover search and cyclic-group orbit machinery.
//!
//! Cyclic Steiner systems are found by quotienting the cover problem by
//! the translation group Z_v: columns are t-subset orbits, rows are
//! k-subset orbits that cover each of their t-orbits exactly once per
//! element. This shrinks the SQS(26) instance from 2600 columns to 100,
//! which a backtracking search handles at desk scale.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::time::{Duration, Instant};

use itertools::Itertools;

use crate::designs::{lambda_s_params, verify_design, Design};
use crate::error::{Error, Result};
use crate::util::{binomial, derive_seed, SplitMix64};

/// An exact-cover instance: pick rows so every column is hit exactly once.
#[derive(Debug, Clone)]
pub struct ExactCoverInstance {
    num_columns: usize,
    rows: Vec<Vec<usize>>,
    row_labels: Vec<usize>,
}

impl ExactCoverInstance {
    /// Rows are sets of column indices; labels default to row positions.
    pub fn new(num_columns: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let labels = (0..rows.len()).collect();
        Self::with_labels(num_columns, rows, labels)
    }

    pub fn with_labels(num_columns: usize, rows: Vec<Vec<usize>>, row_labels: Vec<usize>) -> Result<Self> {
        if row_labels.len() != rows.len() {
            return Err(Error::Parameter(format!(
                "{} labels for {} rows",
                row_labels.len(),
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::Parameter(format!("row {i} is empty")));
            }
            for window in row.windows(2) {
                if window[0] >= window[1] {
                    return Err(Error::Parameter(format!(
                        "row {i} is not a strictly increasing column set"
                    )));
                }
            }
            if row[row.len() - 1] >= num_columns {
                return Err(Error::Parameter(format!(
                    "row {i} references column {} >= {num_columns}",
                    row[row.len() - 1]
                )));
            }
        }
        Ok(ExactCoverInstance {
            num_columns,
            rows,
            row_labels,
        })
    }

    pub fn num_columns(&self) -> usize {
        self.num_columns
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row_labels(&self) -> &[usize] {
        &self.row_labels
    }

    /// Check that `rows` is a partition of the column set.
    /// Independent of solver internals; used to validate any solution post hoc.
    pub fn is_exact_cover(&self, rows: &[usize]) -> bool {
        let mut hits = vec![0u32; self.num_columns];
        for &r in rows {
            let Some(cols) = self.rows.get(r) else {
                return false;
            };
            for &c in cols {
                hits[c] += 1;
            }
        }
        hits.iter().all(|&h| h == 1)
    }
}

/// Limits for one search.
#[derive(Debug, Clone)]
pub struct SolverBudget {
    pub max_nodes: u64,
    pub time_limit: Duration,
    pub seed: u64,
}

impl SolverBudget {
    pub fn new(max_nodes: u64, time_limit: Duration, seed: u64) -> Result<Self> {
        if max_nodes == 0 || time_limit.is_zero() {
            return Err(Error::Parameter("solver budget must be positive".into()));
        }
        Ok(SolverBudget {
            max_nodes,
            time_limit,
            seed,
        })
    }
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget {
            max_nodes: 400_000_000,
            time_limit: Duration::from_secs(600),
            seed: 0,
        }
    }
}

/// Search verdict. `Undecided` (budget ran out) is deliberately distinct
/// from `Infeasible` (search space exhausted): an interrupted search
/// proves nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved(Vec<usize>),
    Infeasible,
    Undecided,
}

struct Searcher<'a> {
    rows: &'a [Vec<usize>],
    /// Candidate rows per column, in seed-shuffled exploration order.
    col_rows: Vec<Vec<usize>>,
    row_active: Vec<bool>,
    col_active: Vec<bool>,
    col_count: Vec<usize>,
    solution: Vec<usize>,
    nodes: u64,
    max_nodes: u64,
    deadline: Instant,
}

enum Search {
    Found,
    Exhausted,
    Aborted,
}

impl<'a> Searcher<'a> {
    fn new(instance: &'a ExactCoverInstance, budget: &SolverBudget, deadline: Instant) -> Self {
        // Shuffle row exploration order once; everything after is
        // deterministic. Ties in column selection go to the lowest index.
        let mut order: Vec<usize> = (0..instance.rows.len()).collect();
        SplitMix64::new(budget.seed).shuffle(&mut order);
        let mut col_rows = vec![Vec::new(); instance.num_columns];
        for &r in &order {
            for &c in &instance.rows[r] {
                col_rows[c].push(r);
            }
        }
        let col_count = col_rows.iter().map(Vec::len).collect();
        Searcher {
            rows: &instance.rows,
            col_rows,
            row_active: vec![true; instance.rows.len()],
            col_active: vec![true; instance.num_columns],
            col_count,
            solution: Vec::new(),
            nodes: 0,
            max_nodes: budget.max_nodes,
            deadline,
        }
    }

    fn choose_column(&self) -> Option<usize> {
        let mut best = None;
        let mut best_count = usize::MAX;
        for c in 0..self.col_active.len() {
            if self.col_active[c] && self.col_count[c] < best_count {
                best = Some(c);
                best_count = self.col_count[c];
            }
        }
        best
    }

    /// Deactivate the row's columns and every row sharing one of them.
    /// Returns the list of deactivated rows for undo.
    ///
    /// The columns go inactive first so their candidate counts freeze at
    /// the pre-placement value; decrements then only touch live columns,
    /// which keeps `unplace` an exact mirror.
    fn place(&mut self, row: usize) -> Vec<usize> {
        for &c in &self.rows[row] {
            self.col_active[c] = false;
        }
        let mut undo = Vec::new();
        for &c in &self.rows[row] {
            for i in 0..self.col_rows[c].len() {
                let other = self.col_rows[c][i];
                if self.row_active[other] {
                    self.row_active[other] = false;
                    undo.push(other);
                    for &c2 in &self.rows[other] {
                        if self.col_active[c2] {
                            self.col_count[c2] -= 1;
                        }
                    }
                }
            }
        }
        undo
    }

    fn unplace(&mut self, row: usize, undo: Vec<usize>) {
        for &other in undo.iter().rev() {
            self.row_active[other] = true;
            for &c2 in &self.rows[other] {
                if self.col_active[c2] {
                    self.col_count[c2] += 1;
                }
            }
        }
        for &c in &self.rows[row] {
            self.col_active[c] = true;
        }
    }

    fn run(&mut self) -> Search {
        let Some(column) = self.choose_column() else {
            return Search::Found;
        };
        if self.col_count[column] == 0 {
            return Search::Exhausted;
        }
        for i in 0..self.col_rows[column].len() {
            let row = self.col_rows[column][i];
            if !self.row_active[row] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Search::Aborted;
            }
            if self.nodes % 16384 == 0 && Instant::now() >= self.deadline {
                return Search::Aborted;
            }
            self.solution.push(row);
            let undo = self.place(row);
            match self.run() {
                Search::Found => return Search::Found,
                Search::Aborted => return Search::Aborted,
                Search::Exhausted => {}
            }
            self.unplace(row, undo);
            self.solution.pop();
        }
        Search::Exhausted
    }
}

/// Algorithm-X style backtracking with minimum-remaining-candidates column
/// choice. Deterministic given the budget seed.
pub fn solve_exact_cover(instance: &ExactCoverInstance, budget: &SolverBudget) -> SolveOutcome {
    let deadline = Instant::now() + budget.time_limit;
    let mut searcher = Searcher::new(instance, budget, deadline);
    match searcher.run() {
        Search::Found => {
            let mut rows = searcher.solution.clone();
            rows.sort_unstable();
            debug_assert!(instance.is_exact_cover(&rows));
            SolveOutcome::Solved(rows)
        }
        Search::Exhausted => SolveOutcome::Infeasible,
        Search::Aborted => SolveOutcome::Undecided,
    }
}

/// One orbit of subsets under translation x -> x+1 (mod v).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Lexicographically least translate.
    pub rep: Vec<usize>,
    /// Number of distinct translates; divides v.
    pub len: usize,
}

/// Orbits of k-subsets and t-subsets of Z_v, with per-element coverage
/// counts of each t-orbit by each k-orbit.
#[derive(Debug, Clone)]
pub struct OrbitCatalog {
    pub v: usize,
    pub t: usize,
    pub k: usize,
    pub k_orbits: Vec<Orbit>,
    pub t_orbits: Vec<Orbit>,
    /// For each k-orbit, sorted (t-orbit index, coverage per t-orbit element).
    pub incidence: Vec<Vec<(usize, u64)>>,
}

/// Lexicographically least translate of a subset of Z_v.
fn canonical_translate(subset: &[usize], v: usize) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    for shift in 0..v {
        let mut translated: Vec<usize> = subset.iter().map(|&x| (x + shift) % v).collect();
        translated.sort_unstable();
        if best.as_ref().map_or(true, |b| translated < *b) {
            best = Some(translated);
        }
    }
    best.unwrap()
}

/// All distinct translates of a subset, sorted.
fn expand_orbit(rep: &[usize], v: usize) -> Vec<Vec<usize>> {
    let mut translates: BTreeSet<Vec<usize>> = BTreeSet::new();
    for shift in 0..v {
        let mut translated: Vec<usize> = rep.iter().map(|&x| (x + shift) % v).collect();
        translated.sort_unstable();
        translates.insert(translated);
    }
    translates.into_iter().collect()
}

fn enumerate_orbits(size: usize, v: usize) -> (Vec<Orbit>, HashMap<Vec<usize>, usize>) {
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut orbits: Vec<Orbit> = Vec::new();
    for subset in (0..v).combinations(size) {
        let canon = canonical_translate(&subset, v);
        match ids.get(&canon) {
            Some(&id) => orbits[id].len += 1,
            None => {
                ids.insert(canon.clone(), orbits.len());
                orbits.push(Orbit { rep: canon, len: 1 });
            }
        }
    }
    (orbits, ids)
}

/// Enumerate k- and t-subset orbits of Z_v and the coverage of each
/// t-orbit by each k-orbit, normalized per t-orbit element.
pub fn build_orbit_catalog(t: usize, v: usize, k: usize) -> Result<OrbitCatalog> {
    if !(0 < t && t < k && k < v) {
        return Err(Error::Parameter(format!(
            "orbit catalog needs 0 < t < k < v, got t={t} k={k} v={v}"
        )));
    }
    let (k_orbits, _) = enumerate_orbits(k, v);
    let (t_orbits, t_ids) = enumerate_orbits(t, v);
    debug_assert_eq!(
        k_orbits.iter().map(|o| o.len as u64).sum::<u64>(),
        binomial(v as u64, k as u64)
    );
    debug_assert_eq!(
        t_orbits.iter().map(|o| o.len as u64).sum::<u64>(),
        binomial(v as u64, t as u64)
    );

    let mut incidence = Vec::with_capacity(k_orbits.len());
    for orbit in &k_orbits {
        let blocks = expand_orbit(&orbit.rep, v);
        debug_assert_eq!(blocks.len(), orbit.len);
        let mut totals: HashMap<usize, u64> = HashMap::new();
        for block in &blocks {
            for subset in block.iter().copied().combinations(t) {
                let id = t_ids[&canonical_translate(&subset, v)];
                *totals.entry(id).or_insert(0) += 1;
            }
        }
        let mut per_element: Vec<(usize, u64)> = totals
            .into_iter()
            .map(|(id, total)| {
                let orbit_len = t_orbits[id].len as u64;
                // Coverage is constant across a t-orbit by symmetry, so the
                // aggregate must split evenly over its elements.
                assert!(
                    total % orbit_len == 0,
                    "t-orbit {id} coverage {total} not divisible by orbit length {orbit_len}"
                );
                (id, total / orbit_len)
            })
            .collect();
        per_element.sort_unstable();
        incidence.push(per_element);
    }
    Ok(OrbitCatalog {
        v,
        t,
        k,
        k_orbits,
        t_orbits,
        incidence,
    })
}

/// Result of a cyclic Steiner search.
#[derive(Debug, Clone)]
pub enum CyclicSearch {
    Found(Design),
    /// The quotient cover problem has no solution: no *cyclic* system of
    /// these parameters exists. Says nothing about non-cyclic designs.
    Infeasible,
    /// Budget exhausted before the search finished.
    Undecided,
}

/// Per-attempt node slice of the restart ladder inside
/// [`construct_cyclic_steiner`].
const RESTART_CHUNK_NODES: u64 = 4_000_000;

/// Search for a t-(v,k,1) design invariant under x -> x+1 (mod v).
///
/// Builds the orbit catalog, drops k-orbits that cover any t-orbit more
/// than once per element, and solves exact cover over (rows = admissible
/// k-orbits, columns = t-orbits). Runs a deterministic ladder of
/// restarts with seeds derived from `budget.seed`, accepting the first
/// success; each restart reshuffles the row exploration order.
pub fn construct_cyclic_steiner(t: usize, v: usize, k: usize, budget: &SolverBudget) -> Result<CyclicSearch> {
    for s in 0..=t {
        if lambda_s_params(t, v, k, 1, s).is_none() {
            return Err(Error::Admissibility(format!(
                "no {t}-({v},{k},1) design exists: lambda_{s} = C({},{})/C({},{}) is not an integer",
                v - s,
                t - s,
                k - s,
                t - s
            )));
        }
    }
    let catalog = build_orbit_catalog(t, v, k)?;
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (orbit_id, coverage) in catalog.incidence.iter().enumerate() {
        if coverage.iter().all(|&(_, c)| c == 1) {
            rows.push(coverage.iter().map(|&(id, _)| id).collect());
            labels.push(orbit_id);
        }
    }
    let instance = ExactCoverInstance::with_labels(catalog.t_orbits.len(), rows, labels)?;

    let deadline = Instant::now() + budget.time_limit;
    let mut nodes_left = budget.max_nodes;
    let mut attempt = 0u64;
    while nodes_left > 0 && Instant::now() < deadline {
        let chunk = RESTART_CHUNK_NODES.min(nodes_left);
        let attempt_budget = SolverBudget {
            max_nodes: chunk,
            time_limit: deadline.saturating_duration_since(Instant::now()),
            seed: derive_seed(budget.seed, "cyclic-restart", attempt),
        };
        match solve_exact_cover(&instance, &attempt_budget) {
            SolveOutcome::Solved(solution) => {
                let mut blocks = Vec::new();
                for row in solution {
                    let orbit = &catalog.k_orbits[instance.row_labels()[row]];
                    blocks.extend(expand_orbit(&orbit.rep, v));
                }
                let design = Design::new(t, v, k, 1, blocks)?;
                let report = verify_design(&design);
                if !report.is_valid {
                    return Err(Error::Verification(format!(
                        "cyclic search returned an invalid design ({} violations)",
                        report.violations.len()
                    )));
                }
                return Ok(CyclicSearch::Found(design));
            }
            // A completed search proves the quotient instance infeasible.
            SolveOutcome::Infeasible => return Ok(CyclicSearch::Infeasible),
            SolveOutcome::Undecided => {
                nodes_left -= chunk;
                attempt += 1;
            }
        }
    }
    Ok(CyclicSearch::Undecided)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_budget(seed: u64) -> SolverBudget {
        SolverBudget::new(1_000_000, Duration::from_secs(30), seed).unwrap()
    }

    #[test]
    fn orbit_catalog_fano_parameters() {
        let catalog = build_orbit_catalog(2, 7, 3).unwrap();
        assert_eq!(catalog.k_orbits.len(), 5);
        assert_eq!(catalog.k_orbits.iter().map(|o| o.len).sum::<usize>(), 35);
        assert_eq!(catalog.t_orbits.iter().map(|o| o.len).sum::<usize>(), 21);
    }

    #[test]
    fn orbit_catalog_sqs26_sizes() {
        let catalog = build_orbit_catalog(3, 26, 4).unwrap();
        assert_eq!(catalog.k_orbits.iter().map(|o| o.len).sum::<usize>(), 14950);
        assert_eq!(catalog.t_orbits.len(), 100);
        assert!(catalog.k_orbits.iter().all(|o| o.len == 26 || o.len == 13));
    }

    #[test]
    fn orbit_of_triple_under_z4_has_full_length() {
        let catalog = build_orbit_catalog(2, 4, 3).unwrap();
        let orbit = catalog
            .k_orbits
            .iter()
            .find(|o| o.rep == vec![0, 1, 2])
            .expect("orbit of {0,1,2}");
        assert_eq!(orbit.len, 4);
    }

    #[test]
    fn coverage_normalization_matches_direct_count() {
        // Per-element coverage of a t-orbit must equal the number of orbit
        // blocks through the orbit representative, counted directly.
        let catalog = build_orbit_catalog(3, 10, 4).unwrap();
        for (orbit, coverage) in catalog.k_orbits.iter().zip(&catalog.incidence) {
            let blocks = expand_orbit(&orbit.rep, 10);
            for &(t_id, per_element) in coverage {
                let rep = &catalog.t_orbits[t_id].rep;
                let direct = blocks
                    .iter()
                    .filter(|b| rep.iter().all(|p| b.contains(p)))
                    .count() as u64;
                assert_eq!(per_element, direct);
            }
        }
    }

    #[test]
    fn solver_finds_a_cover_of_the_toy_instance() {
        let instance =
            ExactCoverInstance::new(3, vec![vec![0, 1], vec![2], vec![0, 2], vec![1]]).unwrap();
        let SolveOutcome::Solved(rows) = solve_exact_cover(&instance, &quick_budget(0)) else {
            panic!("expected a solution");
        };
        assert!(instance.is_exact_cover(&rows));
        assert!(rows == vec![0, 1] || rows == vec![2, 3]);
    }

    #[test]
    fn solver_handles_empty_instance() {
        let instance = ExactCoverInstance::new(0, vec![]).unwrap();
        assert_eq!(
            solve_exact_cover(&instance, &quick_budget(0)),
            SolveOutcome::Solved(vec![])
        );
    }

    #[test]
    fn solver_reports_infeasible_when_a_column_is_uncoverable() {
        let instance = ExactCoverInstance::new(2, vec![vec![0]]).unwrap();
        assert_eq!(
            solve_exact_cover(&instance, &quick_budget(0)),
            SolveOutcome::Infeasible
        );
    }

    #[test]
    fn exhausted_node_budget_is_undecided_not_infeasible() {
        // Feasible instance, but one node is not enough to finish.
        let rows = vec![vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2]];
        let instance = ExactCoverInstance::new(3, rows).unwrap();
        let budget = SolverBudget::new(1, Duration::from_secs(5), 0).unwrap();
        assert_eq!(solve_exact_cover(&instance, &budget), SolveOutcome::Undecided);
    }

    #[test]
    fn cyclic_fano_search_succeeds() {
        let CyclicSearch::Found(design) = construct_cyclic_steiner(2, 7, 3, &quick_budget(0)).unwrap()
        else {
            panic!("expected a cyclic Fano plane");
        };
        assert_eq!(design.b(), 7);
        assert!(verify_design(&design).is_valid);
        assert!(design.contains_block(&[0, 1, 3]) || design.contains_block(&[0, 1, 5]));
    }

    #[test]
    fn cyclic_sts13_search_succeeds() {
        let CyclicSearch::Found(design) = construct_cyclic_steiner(2, 13, 3, &quick_budget(0)).unwrap()
        else {
            panic!("expected a cyclic STS(13)");
        };
        assert_eq!(design.b(), 26);
        assert!(verify_design(&design).is_valid);
    }

    #[test]
    fn cyclic_search_results_are_translation_closed() {
        let CyclicSearch::Found(design) = construct_cyclic_steiner(2, 13, 3, &quick_budget(3)).unwrap()
        else {
            panic!("expected a cyclic STS(13)");
        };
        for block in design.blocks() {
            let shifted: Vec<usize> = block.iter().map(|&x| (x + 1) % 13).collect();
            assert!(design.contains_block(&shifted));
        }
    }

    #[test]
    fn cyclic_search_is_deterministic_per_seed() {
        let a = construct_cyclic_steiner(2, 13, 3, &quick_budget(7)).unwrap();
        let b = construct_cyclic_steiner(2, 13, 3, &quick_budget(7)).unwrap();
        let (CyclicSearch::Found(a), CyclicSearch::Found(b)) = (a, b) else {
            panic!("expected solutions");
        };
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn inadmissible_cyclic_parameters_are_rejected() {
        // lambda_1 = C(7,2)/C(3,2) = 7 works but C(8,2)/C(3,2) does not.
        let err = construct_cyclic_steiner(2, 8, 3, &quick_budget(0)).unwrap_err();
        assert!(matches!(err, Error::Admissibility(_)));
    }
}
