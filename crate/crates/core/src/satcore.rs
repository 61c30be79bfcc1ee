//! Incremental SAT sessions and the CNF gadgets shared by the encoders.

use std::fmt::{self, Write as _};
use std::ops::Not;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// A literal in DIMACS convention: variable ids start at 1, negation flips the sign.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(i32);

impl Lit {
    pub fn positive(var: u32) -> Self {
        assert!(var >= 1 && var <= i32::MAX as u32);
        Lit(var as i32)
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_negated(self) -> bool {
        self.0 < 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// What the engine needs from a SAT solver. Conflict limits apply to a
/// single `solve` call; `None` from `solve` means the budget ran out.
pub trait SatBackend: Send {
    fn add_clause(&mut self, lits: &[i32]);
    fn solve(&mut self, assumptions: &[i32], conflict_limit: Option<u32>) -> Option<bool>;
    /// Value of a variable in the last model.
    fn value(&self, var: u32) -> bool;
    fn reserve(&mut self, num_vars: u32);
}

/// Embedded CaDiCaL.
pub struct CadicalBackend {
    solver: cadical::Solver,
}

impl Default for CadicalBackend {
    fn default() -> Self {
        CadicalBackend {
            solver: cadical::Solver::new(),
        }
    }
}

impl SatBackend for CadicalBackend {
    fn add_clause(&mut self, lits: &[i32]) {
        self.solver.add_clause(lits.iter().copied());
    }

    fn solve(&mut self, assumptions: &[i32], conflict_limit: Option<u32>) -> Option<bool> {
        if let Some(limit) = conflict_limit {
            let limit = limit.min(i32::MAX as u32) as i32;
            self.solver
                .set_limit("conflicts", limit)
                .expect("CaDiCaL supports conflict limits");
        }
        self.solver.solve_with(assumptions.iter().copied())
    }

    fn value(&self, var: u32) -> bool {
        self.solver.value(var as i32).unwrap_or(false)
    }

    fn reserve(&mut self, num_vars: u32) {
        self.solver.reserve(num_vars as i32);
    }
}

/// A satisfying assignment; index 0 is unused.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    pub fn new(values: Vec<bool>) -> Self {
        Model { values }
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len().saturating_sub(1) as u32
    }

    pub fn try_value(&self, lit: Lit) -> Result<bool> {
        self.values
            .get(lit.var() as usize)
            .filter(|_| lit.var() >= 1)
            .map(|&v| v ^ lit.is_negated())
            .ok_or(Error::ModelVariable(lit.var()))
    }

    pub fn value(&self, lit: Lit) -> bool {
        self.try_value(lit).expect("literal not covered by model")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(Model),
    Unsat,
    /// The conflict budget was exhausted.
    Limit,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveOutcome::Unsat)
    }

    pub fn is_limit(&self) -> bool {
        matches!(self, SolveOutcome::Limit)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub solve_calls: u32,
    pub sat: u32,
    pub unsat: u32,
    pub limit: u32,
    pub solve_time: Duration,
}

/// One incremental SAT problem: variable allocation, clauses, and solving.
///
/// Every clause is also kept for DIMACS export, so the formula can be
/// reproduced outside the process.
pub struct SolverSession {
    backend: Box<dyn SatBackend>,
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
    conflict_limit: Option<u32>,
    stats: SolverStats,
}

impl Default for SolverSession {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for SolverSession {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverSession")
            .field("num_vars", &self.num_vars)
            .field("num_clauses", &self.clauses.len())
            .field("conflict_limit", &self.conflict_limit)
            .field("stats", &self.stats)
            .finish()
    }
}

impl SolverSession {
    pub fn new() -> Self {
        Self::with_backend(Box::<CadicalBackend>::default())
    }

    pub fn with_backend(backend: Box<dyn SatBackend>) -> Self {
        SolverSession {
            backend,
            num_vars: 0,
            clauses: Vec::new(),
            conflict_limit: None,
            stats: SolverStats::default(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    pub fn conflict_limit(&self) -> Option<u32> {
        self.conflict_limit
    }

    /// Per-call conflict budget for subsequent `solve` calls.
    pub fn set_conflict_limit(&mut self, limit: Option<u32>) {
        self.conflict_limit = limit;
    }

    pub fn new_variable(&mut self) -> Lit {
        self.num_vars += 1;
        Lit::positive(self.num_vars)
    }

    pub fn add_clause(&mut self, lits: &[Lit]) {
        debug_assert!(lits.iter().all(|l| l.var() <= self.num_vars));
        let raw: Vec<i32> = lits.iter().map(|l| l.0).collect();
        self.backend.add_clause(&raw);
        self.clauses.push(lits.to_vec());
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        let raw: Vec<i32> = assumptions.iter().map(|l| l.0).collect();
        self.backend.reserve(self.num_vars);
        let start = Instant::now();
        let result = self.backend.solve(&raw, self.conflict_limit);
        self.stats.solve_time += start.elapsed();
        self.stats.solve_calls += 1;
        match result {
            Some(true) => {
                self.stats.sat += 1;
                let mut values = vec![false; self.num_vars as usize + 1];
                for v in 1..=self.num_vars {
                    values[v as usize] = self.backend.value(v);
                }
                SolveOutcome::Sat(Model::new(values))
            }
            Some(false) => {
                self.stats.unsat += 1;
                SolveOutcome::Unsat
            }
            None => {
                self.stats.limit += 1;
                SolveOutcome::Limit
            }
        }
    }

    /// `out ≡ a ∧ b` with three clauses.
    pub fn encode_and(&mut self, a: Lit, b: Lit) -> Lit {
        let out = self.new_variable();
        self.add_clause(&[!out, a]);
        self.add_clause(&[!out, b]);
        self.add_clause(&[out, !a, !b]);
        out
    }

    /// `out ≡ a ∨ b`.
    pub fn encode_or(&mut self, a: Lit, b: Lit) -> Lit {
        !self.encode_and(!a, !b)
    }

    /// `out ≡ ∨ lits`; a single literal is returned unchanged.
    pub fn encode_or_many(&mut self, lits: &[Lit]) -> Result<Lit> {
        match lits {
            [] => Err(Error::EmptyLiterals),
            [a] => Ok(*a),
            _ => {
                let out = self.new_variable();
                for &l in lits {
                    self.add_clause(&[out, !l]);
                }
                let mut big = Vec::with_capacity(lits.len() + 1);
                big.push(!out);
                big.extend_from_slice(lits);
                self.add_clause(&big);
                Ok(out)
            }
        }
    }

    /// `out ≡ a ⊕ b` with four clauses.
    pub fn encode_xor(&mut self, a: Lit, b: Lit) -> Lit {
        let out = self.new_variable();
        self.add_clause(&[!out, a, b]);
        self.add_clause(&[!out, !a, !b]);
        self.add_clause(&[out, !a, b]);
        self.add_clause(&[out, a, !b]);
        out
    }

    /// XOR of all literals as a left fold; uses `len - 1` auxiliaries.
    pub fn encode_xor_chain(&mut self, lits: &[Lit]) -> Result<Lit> {
        let (&first, rest) = lits.split_first().ok_or(Error::EmptyLiterals)?;
        Ok(rest.iter().fold(first, |acc, &l| self.encode_xor(acc, l)))
    }

    /// `a ↔ b`.
    pub fn add_equivalence(&mut self, a: Lit, b: Lit) {
        self.add_clause(&[!a, b]);
        self.add_clause(&[a, !b]);
    }

    /// Strict lexicographic order on indicator vectors where the *last*
    /// position is the most significant: the highest position in which `a`
    /// and `b` differ must be set in `b`, and `a = b` is excluded.
    ///
    /// Emits the classic chain of `w - 1` auxiliaries `c_j`: for each
    /// non-final position `(¬a ∨ b ∨ ¬c)`, `(¬a ∨ c' ∨ ¬c)`, `(b ∨ c' ∨ ¬c)`,
    /// then `(¬a ∨ ¬c)`, `(b ∨ ¬c)` for the least significant position. The
    /// literal `¬c_0` is omitted from the first triple.
    pub fn encode_lex_smaller(&mut self, a: &[Lit], b: &[Lit]) -> Result<()> {
        self.lex_smaller(None, a, b)
    }

    /// [`encode_lex_smaller`](Self::encode_lex_smaller), enforced only when
    /// `guard` is true.
    pub fn encode_lex_smaller_if(&mut self, guard: Lit, a: &[Lit], b: &[Lit]) -> Result<()> {
        self.lex_smaller(Some(guard), a, b)
    }

    fn lex_smaller(&mut self, guard: Option<Lit>, a: &[Lit], b: &[Lit]) -> Result<()> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch(a.len(), b.len()));
        }
        if a.is_empty() {
            return Err(Error::EmptyLiterals);
        }
        let w = a.len();
        // schema position t (1-based) reads vector position w - t
        let at = |v: &[Lit], t: usize| v[w - t];
        let mut prev: Option<Lit> = None;
        // later clauses are conditioned on an auxiliary, the first ones on the guard
        let with_prev = |mut c: Vec<Lit>, prev: Option<Lit>| {
            if let Some(p) = prev.or(guard) {
                c.push(!p);
            }
            c
        };
        for t in 1..w {
            let (x, y) = (at(a, t), at(b, t));
            let aux = self.new_variable();
            self.add_clause(&with_prev(vec![!x, y], prev));
            self.add_clause(&with_prev(vec![!x, aux], prev));
            self.add_clause(&with_prev(vec![y, aux], prev));
            prev = Some(aux);
        }
        let (x, y) = (at(a, w), at(b, w));
        self.add_clause(&with_prev(vec![!x], prev));
        self.add_clause(&with_prev(vec![y], prev));
        Ok(())
    }

    /// Sorting network over the inputs; output `k` is true iff at least
    /// `k + 1` inputs are true (descending order).
    pub fn encode_sorter(&mut self, inputs: &[Lit]) -> Vec<Lit> {
        let mut wires = inputs.to_vec();
        for (i, j) in odd_even_merge_pairs(wires.len()) {
            let (x, y) = (wires[i], wires[j]);
            wires[i] = self.encode_or(x, y);
            wires[j] = self.encode_and(x, y);
        }
        wires
    }

    /// Literal asserting that fewer than `p` sorter inputs are true, i.e. the
    /// negation of output `p - 1`. `p = 0` has no such literal.
    pub fn at_most_literal(&self, sorted: &[Lit], p: usize) -> Result<Option<Lit>> {
        if p > sorted.len() {
            return Err(Error::CardinalityBound {
                bound: p,
                width: sorted.len(),
            });
        }
        Ok(p.checked_sub(1).map(|k| !sorted[k]))
    }

    /// Permanently asserts that fewer than `p` inputs of the sorter are true.
    /// For `p = 0` this is unsatisfiable and adds the empty clause.
    pub fn constrain_at_most(&mut self, sorted: &[Lit], p: usize) -> Result<()> {
        match self.at_most_literal(sorted, p)? {
            Some(l) => self.add_clause(&[l]),
            None => self.add_clause(&[]),
        }
        Ok(())
    }

    /// The recorded formula in DIMACS CNF.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                write!(out, "{} ", l.0).unwrap();
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Comparator pairs `(i, j)`, `i < j`, of Batcher's odd-even merge sort for
/// `n` wires (arbitrary `n`).
pub fn odd_even_merge_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    let mut p = 1;
    while p < n {
        let mut k = p;
        while k >= 1 {
            let mut j = k % p;
            while j + k < n {
                for i in 0..k.min(n - j - k) {
                    if (i + j) / (2 * p) == (i + j + k) / (2 * p) {
                        pairs.push((i + j, i + j + k));
                    }
                }
                j += 2 * k;
            }
            k /= 2;
        }
        p *= 2;
    }
    pairs
}
