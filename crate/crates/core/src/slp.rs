//! XOR minimization for optimum abstract XAGs.
//!
//! Two independent stages: [`heuristic_min_support`] picks an `r`-step
//! abstract XAG whose linear forms have the fewest total entries, and
//! [`slp_minimize`] finds the shortest linear program computing a fixed set
//! of linear forms. [`rebuild_xag`] interleaves such a program with the AND
//! gates of the abstract XAG.

use std::fmt;
use std::str::FromStr;

use crate::boolfunc::{IndexSet, TruthTable};
use crate::encoder::{EncodingOptions, McInstance};
use crate::error::{Error, Result};
use crate::network::{AbstractXag, Gate, Xag};
use crate::satcore::{Lit, Model, SolveOutcome, SolverSession};

/// Boolean matrix of linear forms; row `l` holds the columns `j` with
/// `a_{lj} = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearMatrix {
    cols: usize,
    rows: Vec<IndexSet>,
}

impl LinearMatrix {
    pub fn new(cols: usize, rows: Vec<IndexSet>) -> Result<Self> {
        if cols > IndexSet::MAX_INDEX {
            return Err(Error::TooManyIndices(cols));
        }
        for r in &rows {
            if let Some(m) = IndexSet::max(*r).filter(|&m| m > cols) {
                return Err(Error::IndexOutOfRange { index: m, limit: cols });
            }
        }
        Ok(LinearMatrix { cols, rows })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[IndexSet] {
        &self.rows
    }

    pub fn entry(&self, l: usize, j: usize) -> bool {
        self.rows[l - 1].contains(j)
    }

    /// `max_l(|row l| - 1)` and the number of distinct rows with two or more
    /// entries; each such row needs its own step.
    pub fn lower_bound(&self) -> usize {
        let widest = self.rows.iter().map(|r| r.len().saturating_sub(1)).max();
        widest.unwrap_or(0).max(self.distinct_active_rows().len())
    }

    fn distinct_active_rows(&self) -> Vec<IndexSet> {
        let mut out: Vec<IndexSet> = Vec::new();
        for &r in &self.rows {
            if r.len() >= 2 && !out.contains(&r) {
                out.push(r);
            }
        }
        out
    }

    /// `(n, r)` of the abstract XAG this matrix was extracted from.
    fn abstract_shape(&self) -> Result<(usize, usize)> {
        let m = self.rows.len();
        let r = m.saturating_sub(1) / 2;
        if m % 2 == 0 || self.cols <= r {
            return Err(Error::LengthMismatch(m, self.cols));
        }
        Ok((self.cols - r, r))
    }

    /// Rows of AND fan-ins may only read columns produced before the gate.
    fn check_ordering(&self) -> Result<()> {
        let (n, _) = self.abstract_shape()?;
        for (l0, r) in self.rows.iter().enumerate().take(self.rows.len() - 1) {
            let limit = n + (l0 + 2) / 2 - 1;
            if let Some(m) = IndexSet::max(*r).filter(|&m| m > limit) {
                return Err(Error::IndexOutOfRange { index: m, limit });
            }
        }
        Ok(())
    }
}

impl fmt::Display for LinearMatrix {
    /// `m n` header, then one line of `n` bits per row.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows.len(), self.cols)?;
        for r in &self.rows {
            let line: String = (1..=self.cols)
                .map(|j| if r.contains(j) { '1' } else { '0' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl FromStr for LinearMatrix {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_err = |line: usize, message: &str| Error::Parse {
            line,
            message: message.to_string(),
        };
        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing `m n` header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(hline, "header must be two integers")))
            .collect::<Result<_>>()?;
        let [m, n] = dims[..] else {
            return Err(parse_err(hline, "header must be two integers"));
        };
        let mut rows = Vec::with_capacity(m);
        for (line, text) in lines {
            let bits: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
            if bits.len() != n {
                return Err(parse_err(line, &format!("expected {n} bits, got {}", bits.len())));
            }
            let mut row = IndexSet::empty();
            for (j, c) in bits.into_iter().enumerate() {
                match c {
                    '0' => {}
                    '1' => row.insert(j + 1),
                    _ => return Err(parse_err(line, &format!("invalid bit {c:?}"))),
                }
            }
            rows.push(row);
        }
        if rows.len() != m {
            return Err(parse_err(hline, &format!("expected {m} rows, got {}", rows.len())));
        }
        LinearMatrix::new(n, rows)
    }
}

/// Rows `Ŝ_1, ..., Ŝ_{2r+1}` over the `n + r` columns of an abstract XAG.
pub fn extract_matrix(net: &AbstractXag) -> LinearMatrix {
    LinearMatrix {
        cols: net.num_inputs() + net.num_steps(),
        rows: net.linear_forms(),
    }
}

/// Straight-line program of 2-input XOR steps over `num_inputs` columns.
/// Step `k` defines index `num_inputs + 1 + k`; `outputs[l]` is the index
/// computing row `l + 1` (0 for the constant).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearNetwork {
    pub num_inputs: usize,
    pub steps: Vec<(usize, usize)>,
    pub outputs: Vec<usize>,
}

impl LinearNetwork {
    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    /// Linear form of every index, `[0]` being the constant.
    pub fn forms(&self) -> Vec<IndexSet> {
        let mut forms: Vec<IndexSet> = Vec::with_capacity(self.num_inputs + 1 + self.steps.len());
        forms.push(IndexSet::empty());
        forms.extend((1..=self.num_inputs).map(IndexSet::singleton));
        for &(a, b) in &self.steps {
            forms.push(forms[a].symmetric_difference(forms[b]));
        }
        forms
    }

    pub fn computes(&self, matrix: &LinearMatrix) -> bool {
        let forms = self.forms();
        self.num_inputs == matrix.cols
            && self.outputs.len() == matrix.rows.len()
            && self
                .outputs
                .iter()
                .zip(&matrix.rows)
                .all(|(&o, &r)| forms.get(o) == Some(&r))
    }

    /// Every step's form contains every input of its fan-in cone.
    pub fn is_cancellation_free(&self) -> bool {
        let forms = self.forms();
        let mut cone: Vec<IndexSet> = forms[..=self.num_inputs].to_vec();
        for &(a, b) in &self.steps {
            cone.push(cone[a].union(cone[b]));
        }
        cone == forms
    }

    /// One left-to-right chain per distinct row, no sharing between rows.
    pub fn naive(matrix: &LinearMatrix) -> LinearNetwork {
        let n = matrix.cols;
        let mut steps = Vec::new();
        let mut done: Vec<(IndexSet, usize)> = Vec::new();
        let mut outputs = Vec::with_capacity(matrix.rows.len());
        for &row in &matrix.rows {
            let out = match row.len() {
                0 => 0,
                1 => row.min().unwrap(),
                _ => match done.iter().find(|(r, _)| *r == row) {
                    Some(&(_, o)) => o,
                    None => {
                        let mut it = row.iter();
                        let mut acc = it.next().unwrap();
                        for j in it {
                            steps.push((acc, j));
                            acc = n + steps.len();
                        }
                        done.push((row, acc));
                        acc
                    }
                },
            };
            outputs.push(out);
        }
        LinearNetwork {
            num_inputs: n,
            steps,
            outputs,
        }
    }
}

impl fmt::Display for LinearNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(a, b)) in self.steps.iter().enumerate() {
            writeln!(f, "x{} = x{a} ^ x{b}", self.num_inputs + 1 + k)?;
        }
        for (l, &o) in self.outputs.iter().enumerate() {
            if o == 0 {
                writeln!(f, "f{} = 0", l + 1)?;
            } else {
                writeln!(f, "f{} = x{o}", l + 1)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SlpOptions {
    /// Forbid rows of AND fan-ins from depending, through any step, on the
    /// outputs of that AND gate or later ones.
    pub ordering: bool,
    /// Require `ψ(j, i) ↔ φ(j, i)`.
    pub cancellation_free: bool,
}

impl SlpOptions {
    pub fn for_xag() -> Self {
        SlpOptions {
            ordering: true,
            cancellation_free: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlpOutcome {
    Network(LinearNetwork),
    Unsat,
    Limit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlpResult {
    pub network: LinearNetwork,
    /// False if a conflict limit forced the naive fallback.
    pub proven: bool,
}

struct SlpInstance {
    session: SolverSession,
    cols: usize,
    /// `b[s][j - 1]`: step `cols + 1 + s` reads index `j`.
    b: Vec<Vec<Lit>>,
    /// `f[l][s]` for active rows, `None` for pre-resolved ones.
    f: Vec<Option<Vec<Lit>>>,
    #[cfg_attr(not(test), allow(dead_code))]
    psi: Vec<Vec<Lit>>,
    #[cfg_attr(not(test), allow(dead_code))]
    phi: Option<Vec<Vec<Lit>>>,
}

impl SlpInstance {
    /// With `minimal`, only networks without a shorter equivalent are kept:
    /// every step is used, and adjacent independent steps appear in a fixed
    /// order.
    fn new(matrix: &LinearMatrix, num_steps: usize, opts: SlpOptions, minimal: bool) -> Result<Self> {
        let cols = matrix.cols;
        let ordering = if opts.ordering {
            Some(matrix.abstract_shape()?.0)
        } else {
            None
        };
        let mut session = SolverSession::new();
        let mut b = Vec::with_capacity(num_steps);
        for s in 0..num_steps {
            let lits: Vec<Lit> = (0..cols + s).map(|_| session.new_variable()).collect();
            for x in 0..lits.len() {
                let others: Vec<Lit> = (0..lits.len()).filter(|&y| y != x).map(|y| lits[y]).collect();
                session.add_clause(&others);
                for y in x + 1..lits.len() {
                    for z in y + 1..lits.len() {
                        session.add_clause(&[!lits[x], !lits[y], !lits[z]]);
                    }
                }
            }
            if lits.len() < 2 {
                session.add_clause(&[]);
            }
            b.push(lits);
        }
        let mut f = Vec::with_capacity(matrix.rows.len());
        for row in &matrix.rows {
            if row.len() < 2 {
                f.push(None);
                continue;
            }
            let lits: Vec<Lit> = (0..num_steps).map(|_| session.new_variable()).collect();
            session.add_clause(&lits);
            for x in 0..lits.len() {
                for y in x + 1..lits.len() {
                    session.add_clause(&[!lits[x], !lits[y]]);
                }
            }
            f.push(Some(lits));
        }
        let mut psi: Vec<Vec<Lit>> = vec![Vec::with_capacity(num_steps); cols + 1];
        for s in 0..num_steps {
            for j in 1..=cols {
                let mut terms = vec![b[s][j - 1]];
                for sp in 0..s {
                    let p = session.encode_and(b[s][cols + sp], psi[j][sp]);
                    terms.push(p);
                }
                let v = session.encode_xor_chain(&terms)?;
                psi[j].push(v);
            }
        }
        let phi = if ordering.is_some() || opts.cancellation_free {
            let mut phi: Vec<Vec<Lit>> = vec![Vec::with_capacity(num_steps); cols + 1];
            for s in 0..num_steps {
                for j in 1..=cols {
                    let mut terms = vec![b[s][j - 1]];
                    for sp in 0..s {
                        let p = session.encode_and(b[s][cols + sp], phi[j][sp]);
                        terms.push(p);
                    }
                    let v = session.encode_or_many(&terms)?;
                    phi[j].push(v);
                }
            }
            Some(phi)
        } else {
            None
        };
        for (row, fl) in matrix.rows.iter().zip(&f) {
            let Some(fl) = fl else { continue };
            for s in 0..num_steps {
                for j in 1..=cols {
                    let v = if row.contains(j) { psi[j][s] } else { !psi[j][s] };
                    session.add_clause(&[!fl[s], v]);
                }
            }
        }
        if let (Some(n), Some(phi)) = (ordering, &phi) {
            let m = matrix.rows.len();
            for l in 1..m {
                let Some(fl) = &f[l - 1] else { continue };
                for j in n + (l + 1) / 2..=cols {
                    for s in 0..num_steps {
                        session.add_clause(&[!fl[s], !phi[j][s]]);
                    }
                }
            }
        }
        if minimal {
            for s in 0..num_steps {
                let mut used: Vec<Lit> = f.iter().flatten().map(|fl| fl[s]).collect();
                used.extend(b[s + 1..].iter().map(|later| later[cols + s]));
                session.add_clause(&used);
                if s + 1 < num_steps {
                    let independent = !b[s + 1][cols + s];
                    session.encode_lex_smaller_if(independent, &b[s], &b[s + 1][..cols + s])?;
                }
            }
        }
        if opts.cancellation_free {
            let phi = phi.as_ref().unwrap();
            for j in 1..=cols {
                for s in 0..num_steps {
                    session.add_equivalence(psi[j][s], phi[j][s]);
                }
            }
        }
        Ok(SlpInstance {
            session,
            cols,
            b,
            f,
            psi,
            phi,
        })
    }

    fn decode(&self, matrix: &LinearMatrix, model: &Model) -> LinearNetwork {
        let steps = self
            .b
            .iter()
            .map(|lits| {
                let mut used = (1..=lits.len()).filter(|&j| model.value(lits[j - 1]));
                (used.next().unwrap(), used.next().unwrap())
            })
            .collect();
        let outputs = matrix
            .rows
            .iter()
            .zip(&self.f)
            .map(|(row, fl)| match fl {
                Some(fl) => self.cols + 1 + fl.iter().position(|&l| model.value(l)).unwrap(),
                None => IndexSet::min(*row).unwrap_or(0),
            })
            .collect();
        LinearNetwork {
            num_inputs: self.cols,
            steps,
            outputs,
        }
    }
}

/// Is there a linear network with exactly `num_steps` steps computing every
/// row? Rows with fewer than two entries are served directly by a column or
/// the constant.
pub fn slp_decide(
    matrix: &LinearMatrix,
    num_steps: usize,
    opts: SlpOptions,
    conflict_limit: Option<u32>,
) -> Result<SlpOutcome> {
    if opts.ordering {
        matrix.check_ordering()?;
    }
    decide(matrix, num_steps, opts, conflict_limit, false)
}

fn decide(
    matrix: &LinearMatrix,
    num_steps: usize,
    opts: SlpOptions,
    conflict_limit: Option<u32>,
    minimal: bool,
) -> Result<SlpOutcome> {
    let mut inst = SlpInstance::new(matrix, num_steps, opts, minimal)?;
    inst.session.set_conflict_limit(conflict_limit);
    Ok(match inst.session.solve(&[]) {
        SolveOutcome::Sat(m) => SlpOutcome::Network(inst.decode(matrix, &m)),
        SolveOutcome::Unsat => SlpOutcome::Unsat,
        SolveOutcome::Limit => SlpOutcome::Limit,
    })
}

/// Shortest linear network, sweeping the step count up from
/// [`LinearMatrix::lower_bound`]. The naive chains bound the sweep from
/// above and are returned unproven if a solve hits the conflict limit.
pub fn slp_minimize(
    matrix: &LinearMatrix,
    opts: SlpOptions,
    conflict_limit: Option<u32>,
) -> Result<SlpResult> {
    if opts.ordering {
        matrix.check_ordering()?;
    }
    let naive = LinearNetwork::naive(matrix);
    for k in matrix.lower_bound()..naive.num_steps() {
        // every smaller step count is infeasible, so symmetry breaking is safe
        match decide(matrix, k, opts, conflict_limit, true)? {
            SlpOutcome::Network(network) => {
                return Ok(SlpResult {
                    network,
                    proven: true,
                })
            }
            SlpOutcome::Unsat => {}
            SlpOutcome::Limit => {
                return Ok(SlpResult {
                    network: naive,
                    proven: false,
                })
            }
        }
    }
    Ok(SlpResult {
        network: naive,
        proven: true,
    })
}

/// Emits XOR steps in program order and each AND gate as soon as both of its
/// fan-in rows are available.
pub fn rebuild_xag(net: &AbstractXag, lin: &LinearNetwork) -> Result<Xag> {
    let n = net.num_inputs();
    let r = net.num_steps();
    let cols = n + r;
    if lin.num_inputs != cols || lin.outputs.len() != 2 * r + 1 {
        return Err(Error::LengthMismatch(lin.outputs.len(), 2 * r + 1));
    }
    let total = cols + lin.steps.len();
    // concrete node of every linear-network index, once emitted
    let mut node: Vec<Option<usize>> = vec![None; total + 1];
    node[0] = Some(0);
    for (j, slot) in node.iter_mut().enumerate().take(n + 1).skip(1) {
        *slot = Some(j);
    }
    let mut gates: Vec<Gate> = Vec::new();
    let mut and_done = vec![false; r];
    let mut step_done = vec![false; lin.steps.len()];
    loop {
        let mut progress = false;
        for k in 0..r {
            if and_done[k] {
                continue;
            }
            let (Some(a), Some(b)) = (node[lin.outputs[2 * k]], node[lin.outputs[2 * k + 1]]) else {
                continue;
            };
            if a == 0 || b == 0 {
                return Err(Error::EmptyFanin(n + 1 + k));
            }
            if a == b {
                return Err(Error::DegenerateStep(n + 1 + k));
            }
            gates.push(Gate::and(a.min(b), a.max(b)));
            node[n + 1 + k] = Some(n + gates.len());
            and_done[k] = true;
            progress = true;
        }
        for (s, &(a, b)) in lin.steps.iter().enumerate() {
            if step_done[s] {
                continue;
            }
            let (Some(a), Some(b)) = (node[a], node[b]) else {
                continue;
            };
            gates.push(Gate::xor(a.min(b), a.max(b)));
            node[cols + 1 + s] = Some(n + gates.len());
            step_done[s] = true;
            progress = true;
            // give AND gates waiting on this step the next slot
            break;
        }
        if !progress {
            break;
        }
    }
    if and_done.contains(&false) || step_done.contains(&false) {
        return Err(Error::Schedule);
    }
    let out = node[lin.outputs[2 * r]].ok_or(Error::Schedule)?;
    Xag::new(n, gates, out, net.output_inverted())
}

/// Result of the support-minimizing search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSearch {
    pub best: AbstractXag,
    /// `Σ_l |Ŝ_l|` of `best`.
    pub support: usize,
    /// False if a conflict limit stopped the descent.
    pub proven: bool,
    /// `best` followed by further distinct solutions with the same support.
    pub candidates: Vec<AbstractXag>,
}

/// Abstract XAG with `r` steps for `f` minimizing `Σ_l |Ŝ_l|`, found by
/// tightening a sorter bound over all `ŝ` variables. Up to
/// `max_candidates` solutions of that support are collected. The first solve
/// runs without a conflict limit.
pub fn heuristic_min_support(
    f: &TruthTable,
    r: usize,
    opts: &EncodingOptions,
    conflict_limit: Option<u32>,
    max_candidates: usize,
) -> Result<SupportSearch> {
    let mut inst = McInstance::new(*f, r, *opts)?;
    inst.constrain_all()?;
    let sel = inst.selection_vars();
    let sorted = inst.session_mut().encode_sorter(&sel);
    let model = match inst.solve(&[]) {
        SolveOutcome::Sat(m) => m,
        _ => return Err(Error::Infeasible(r)),
    };
    let mut best = inst.extract(&model)?;
    let mut last = model;
    let mut support = best.support();
    inst.session_mut().set_conflict_limit(conflict_limit);
    let mut proven = true;
    while let Some(fewer) = inst.session().at_most_literal(&sorted, support)? {
        match inst.solve(&[fewer]) {
            SolveOutcome::Sat(m) => {
                best = inst.extract(&m)?;
                support = best.support();
                last = m;
            }
            SolveOutcome::Unsat => break,
            SolveOutcome::Limit => {
                proven = false;
                break;
            }
        }
    }
    let mut candidates = vec![best.clone()];
    let within: Vec<Lit> = inst
        .session()
        .at_most_literal(&sorted, (support + 1).min(sorted.len()))?
        .filter(|_| support < sorted.len())
        .into_iter()
        .collect();
    let block = inst.blocking_clause(&last);
    inst.session_mut().add_clause(&block);
    while candidates.len() < max_candidates {
        match inst.solve(&within) {
            SolveOutcome::Sat(m) => {
                candidates.push(inst.extract(&m)?);
                let block = inst.blocking_clause(&m);
                inst.session_mut().add_clause(&block);
            }
            _ => break,
        }
    }
    Ok(SupportSearch {
        best,
        support,
        proven,
        candidates,
    })
}
