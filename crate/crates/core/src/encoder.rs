//! SAT encoding of "does an abstract XAG with `r` AND steps compute `f`?".
//!
//! Structure variables `s_{cij}` select `j ∈ S_{ci}` for AND step `i`, and
//! `s_j` selects `j ∈ S` for the output. The flattened view `ŝ_{lj}` orders the
//! linear forms as `Ŝ_1 = S_{1,n+1}, Ŝ_2 = S_{2,n+1}, ..., Ŝ_{2r+1} = S`; it
//! aliases the structure variables and never allocates new ones.
//!
//! Function constraints are added per input assignment `x`, which lets the
//! direct method constrain every assignment up front and the CEGAR loop add
//! them one counterexample at a time on the same session.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use crate::boolfunc::{IndexSet, TruthTable};
use crate::error::{Error, Result};
use crate::network::{AbstractXag, AndStep};
use crate::satcore::{Lit, Model, SolveOutcome, SolverSession};

/// Independent switches for the optional constraint families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EncodingOptions {
    pub nonconstant_fanin: bool,
    pub commutativity: bool,
    pub symmetric_variables: bool,
    pub all_used: bool,
    pub subset_free: bool,
    pub multilevel_subset: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintFamily {
    NonconstantFanin,
    Commutativity,
    SymmetricVariables,
    AllUsed,
    SubsetFree,
    MultilevelSubset,
}

impl ConstraintFamily {
    pub const ALL: [ConstraintFamily; 6] = [
        ConstraintFamily::NonconstantFanin,
        ConstraintFamily::Commutativity,
        ConstraintFamily::SymmetricVariables,
        ConstraintFamily::AllUsed,
        ConstraintFamily::SubsetFree,
        ConstraintFamily::MultilevelSubset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintFamily::NonconstantFanin => "nonconstant",
            ConstraintFamily::Commutativity => "commutativity",
            ConstraintFamily::SymmetricVariables => "symmetric",
            ConstraintFamily::AllUsed => "all-used",
            ConstraintFamily::SubsetFree => "subset-free",
            ConstraintFamily::MultilevelSubset => "multilevel",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl EncodingOptions {
    pub const fn all() -> Self {
        EncodingOptions {
            nonconstant_fanin: true,
            commutativity: true,
            symmetric_variables: true,
            all_used: true,
            subset_free: true,
            multilevel_subset: true,
        }
    }

    pub const fn none() -> Self {
        EncodingOptions {
            nonconstant_fanin: false,
            commutativity: false,
            symmetric_variables: false,
            all_used: false,
            subset_free: false,
            multilevel_subset: false,
        }
    }

    pub fn only(family: ConstraintFamily) -> Self {
        Self::none().with(family, true)
    }

    pub fn with(mut self, family: ConstraintFamily, enabled: bool) -> Self {
        *self.flag_mut(family) = enabled;
        self
    }

    pub fn enabled(&self, family: ConstraintFamily) -> bool {
        match family {
            ConstraintFamily::NonconstantFanin => self.nonconstant_fanin,
            ConstraintFamily::Commutativity => self.commutativity,
            ConstraintFamily::SymmetricVariables => self.symmetric_variables,
            ConstraintFamily::AllUsed => self.all_used,
            ConstraintFamily::SubsetFree => self.subset_free,
            ConstraintFamily::MultilevelSubset => self.multilevel_subset,
        }
    }

    fn flag_mut(&mut self, family: ConstraintFamily) -> &mut bool {
        match family {
            ConstraintFamily::NonconstantFanin => &mut self.nonconstant_fanin,
            ConstraintFamily::Commutativity => &mut self.commutativity,
            ConstraintFamily::SymmetricVariables => &mut self.symmetric_variables,
            ConstraintFamily::AllUsed => &mut self.all_used,
            ConstraintFamily::SubsetFree => &mut self.subset_free,
            ConstraintFamily::MultilevelSubset => &mut self.multilevel_subset,
        }
    }
}

impl Default for EncodingOptions {
    fn default() -> Self {
        Self::all()
    }
}

/// One decision instance for a fixed step budget `r`.
pub struct McInstance {
    function: TruthTable,
    num_inputs: usize,
    num_steps: usize,
    options: EncodingOptions,
    session: SolverSession,
    /// `fanin[k][c][j - 1]` is `s_{c+1, n+1+k, j}`.
    fanin: Vec<[Vec<Lit>; 2]>,
    /// `output[j - 1]` is `s_j`.
    output: Vec<Lit>,
    constrained: Vec<bool>,
    num_constrained: usize,
    products: HashMap<(usize, usize), Lit>,
}

impl fmt::Debug for McInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("McInstance")
            .field("function", &self.function)
            .field("num_steps", &self.num_steps)
            .field("options", &self.options)
            .field("num_constrained", &self.num_constrained)
            .field("session", &self.session)
            .finish()
    }
}

impl McInstance {
    /// Allocates all structure variables and encodes the enabled constraint
    /// families. No input assignment is constrained yet.
    pub fn new(function: TruthTable, num_steps: usize, options: EncodingOptions) -> Result<Self> {
        if !function.is_normal() {
            return Err(Error::NotNormal);
        }
        let n = function.num_vars();
        if n + num_steps > IndexSet::MAX_INDEX {
            return Err(Error::TooManyIndices(n + num_steps));
        }
        let mut session = SolverSession::new();
        let mut fanin = Vec::with_capacity(num_steps);
        for k in 0..num_steps {
            let width = n + k;
            let s1 = (0..width).map(|_| session.new_variable()).collect();
            let s2 = (0..width).map(|_| session.new_variable()).collect();
            fanin.push([s1, s2]);
        }
        let output = (0..n + num_steps).map(|_| session.new_variable()).collect();
        let mut inst = McInstance {
            function,
            num_inputs: n,
            num_steps,
            options,
            session,
            fanin,
            output,
            constrained: vec![false; function.len()],
            num_constrained: 0,
            products: HashMap::new(),
        };
        if options.nonconstant_fanin && !function.is_zero() {
            inst.add_nonconstant_fanin()?;
        }
        if options.commutativity {
            inst.add_commutativity();
        }
        if options.symmetric_variables {
            let pairs = function.symmetric_pairs();
            inst.add_symmetric_breaking(&pairs);
        }
        if options.all_used {
            let essential = function.essential_variables();
            inst.add_all_used(&essential);
        }
        if options.subset_free {
            inst.add_subset_free();
        }
        if options.multilevel_subset {
            inst.add_multilevel_subset();
        }
        Ok(inst)
    }

    pub fn function(&self) -> TruthTable {
        self.function
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_steps(&self) -> usize {
        self.num_steps
    }

    pub fn options(&self) -> EncodingOptions {
        self.options
    }

    pub fn session(&self) -> &SolverSession {
        &self.session
    }

    pub fn session_mut(&mut self) -> &mut SolverSession {
        &mut self.session
    }

    /// Number of linear forms, `2r + 1`.
    pub fn num_forms(&self) -> usize {
        2 * self.num_steps + 1
    }

    /// Largest index that may appear in `Ŝ_l` (1-based `l`).
    pub fn form_range(&self, l: usize) -> usize {
        assert!((1..=self.num_forms()).contains(&l));
        if l == self.num_forms() {
            self.num_inputs + self.num_steps
        } else {
            self.num_inputs + (l + 1) / 2 - 1
        }
    }

    /// `ŝ_{lj}`, or `None` if `j` is outside `Ŝ_l`'s range.
    pub fn selection(&self, l: usize, j: usize) -> Option<Lit> {
        if j == 0 || j > self.form_range(l) {
            return None;
        }
        Some(if l == self.num_forms() {
            self.output[j - 1]
        } else {
            self.fanin[(l - 1) / 2][(l - 1) % 2][j - 1]
        })
    }

    /// `s_{cij}` for `c ∈ {1, 2}`, `n < i <= n + r`, `1 <= j < i`.
    pub fn fanin_var(&self, c: usize, i: usize, j: usize) -> Lit {
        self.fanin[i - self.num_inputs - 1][c - 1][j - 1]
    }

    /// All `ŝ_{lj}` in order of `l`, then `j`.
    pub fn selection_vars(&self) -> Vec<Lit> {
        (1..=self.num_forms())
            .flat_map(|l| (1..=self.form_range(l)).map(move |j| (l, j)))
            .map(|(l, j)| self.selection(l, j).unwrap())
            .collect()
    }

    pub fn is_constrained(&self, x: u32) -> bool {
        self.constrained.get(x as usize).copied().unwrap_or(false)
    }

    pub fn num_constrained(&self) -> usize {
        self.num_constrained
    }

    /// Adds the gate and output clauses for assignment `x = (b_n ... b_1)_2`.
    pub fn constrain_assignment(&mut self, x: u32) -> Result<()> {
        if x == 0 || x as usize >= self.function.len() || self.constrained[x as usize] {
            return Err(Error::Assignment(x));
        }
        let n = self.num_inputs;
        let input = |j: usize| x >> (j - 1) & 1 == 1;
        // value literal of each AND step under x
        let mut step_value: Vec<Lit> = Vec::with_capacity(self.num_steps);
        for k in 0..self.num_steps {
            let i = n + 1 + k;
            let mut sides = [None; 2];
            for (c, side) in sides.iter_mut().enumerate() {
                let mut terms = Vec::with_capacity(i - 1);
                for j in 1..i {
                    let s = self.fanin[k][c][j - 1];
                    if j <= n {
                        if input(j) {
                            terms.push(s);
                        }
                    } else {
                        let v = step_value[j - n - 1];
                        terms.push(self.session.encode_and(s, v));
                    }
                }
                *side = Some(self.session.encode_xor_chain(&terms)?);
            }
            let v = self.session.encode_and(sides[0].unwrap(), sides[1].unwrap());
            step_value.push(v);
        }
        let mut terms = Vec::with_capacity(n + self.num_steps);
        for j in 1..=n + self.num_steps {
            let s = self.output[j - 1];
            if j <= n {
                if input(j) {
                    terms.push(s);
                }
            } else {
                terms.push(self.session.encode_and(s, step_value[j - n - 1]));
            }
        }
        let out = self.session.encode_xor_chain(&terms)?;
        let value = self.function.bit(x);
        self.session.add_clause(&[if value { out } else { !out }]);
        self.constrained[x as usize] = true;
        self.num_constrained += 1;
        Ok(())
    }

    /// Constrains every assignment `1 <= x < 2^n` not constrained yet.
    pub fn constrain_all(&mut self) -> Result<()> {
        for x in 1..self.function.len() as u32 {
            if !self.constrained[x as usize] {
                self.constrain_assignment(x)?;
            }
        }
        Ok(())
    }

    /// Every linear form selects at least one index.
    pub fn add_nonconstant_fanin(&mut self) -> Result<()> {
        if self.function.is_zero() {
            return Err(Error::ConstantFunction);
        }
        for l in 1..=self.num_forms() {
            let clause: Vec<Lit> = (1..=self.form_range(l))
                .map(|j| self.selection(l, j).unwrap())
                .collect();
            self.session.add_clause(&clause);
        }
        Ok(())
    }

    /// `S_{1i}` strictly lexicographically smaller than `S_{2i}`: the largest
    /// index in `S_{1i} △ S_{2i}` belongs to `S_{2i}`.
    pub fn add_commutativity(&mut self) {
        for k in 0..self.num_steps {
            let [a, b] = self.fanin[k].clone();
            self.session
                .encode_lex_smaller(&a, &b)
                .expect("fan-in vectors have equal nonzero width");
        }
    }

    /// For each symmetric pair `(j, k)`, `x_j` is used no later than `x_k`:
    /// `ŝ_{lk} → ∨_{l' <= l} ŝ_{l'j}`.
    pub fn add_symmetric_breaking(&mut self, pairs: &[(usize, usize)]) {
        for &(j, k) in pairs {
            for l in 1..=self.num_forms() {
                let Some(sk) = self.selection(l, k) else {
                    continue;
                };
                let mut clause = vec![!sk];
                clause.extend((1..=l).filter_map(|lp| self.selection(lp, j)));
                self.session.add_clause(&clause);
            }
        }
    }

    /// Each essential input and each AND step appears in some linear form.
    pub fn add_all_used(&mut self, essential: &[usize]) {
        let indices = essential
            .iter()
            .copied()
            .chain(self.num_inputs + 1..=self.num_inputs + self.num_steps);
        let indices: Vec<usize> = indices.collect();
        for i in indices {
            let clause: Vec<Lit> = (1..=self.num_forms())
                .filter_map(|l| self.selection(l, i))
                .collect();
            self.session.add_clause(&clause);
        }
    }

    /// Neither fan-in set of a step is a subset of the other.
    pub fn add_subset_free(&mut self) {
        for k in 0..self.num_steps {
            let width = self.num_inputs + k;
            let mut only1 = Vec::with_capacity(width);
            let mut only2 = Vec::with_capacity(width);
            for j in 0..width {
                let (a, b) = (self.fanin[k][0][j], self.fanin[k][1][j]);
                only1.push(self.session.encode_and(a, !b));
                only2.push(self.session.encode_and(!a, b));
            }
            self.session.add_clause(&only1);
            self.session.add_clause(&only2);
        }
    }

    /// `s_{1ij} ∧ s_{2ij}`, materialized once per `(i, j)`.
    fn product(&mut self, i: usize, j: usize) -> Lit {
        if let Some(&p) = self.products.get(&(i, j)) {
            return p;
        }
        let (a, b) = (self.fanin_var(1, i, j), self.fanin_var(2, i, j));
        let p = self.session.encode_and(a, b);
        self.products.insert((i, j), p);
        p
    }

    /// If `Ŝ_l` uses AND step `i = L_T ∧ L_U` and its other members below `i`
    /// form a set `S ⊆ T ∩ U`, then `S = T ∩ U`:
    /// `(ŝ_{li} ∧ ∧_{j<i}(ŝ_{lj} → p_{ij})) → ∧_{j<i}(ŝ_{lj} ↔ p_{ij})`
    /// with `p_{ij} = s_{1ij} s_{2ij}`.
    pub fn add_multilevel_subset(&mut self) {
        let n = self.num_inputs;
        for l in 1..=self.num_forms() {
            for i in n + 1..=self.form_range(l) {
                let uses = self.selection(l, i).unwrap();
                let mut premise = vec![!uses];
                let mut pairs = Vec::with_capacity(i - 1);
                for j in 1..i {
                    let sel = self.selection(l, j).unwrap();
                    let p = self.product(i, j);
                    let implied = self.session.encode_or(!sel, p);
                    premise.push(!implied);
                    pairs.push((sel, p));
                }
                for (sel, p) in pairs {
                    // the forward direction is part of the premise
                    let mut clause = premise.clone();
                    clause.extend([!p, sel]);
                    self.session.add_clause(&clause);
                }
            }
        }
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        self.session.solve(assumptions)
    }

    /// Reads `S_{ci} = {j : s_{cij}}` and `S = {j : s_j}` from a model.
    pub fn extract(&self, model: &Model) -> Result<AbstractXag> {
        let read = |lits: &[Lit]| -> Result<IndexSet> {
            let mut s = IndexSet::empty();
            for (j, &l) in lits.iter().enumerate() {
                if model.try_value(l)? {
                    s.insert(j + 1);
                }
            }
            Ok(s)
        };
        let mut steps = Vec::with_capacity(self.num_steps);
        for [a, b] in &self.fanin {
            steps.push(AndStep {
                s1: read(a)?,
                s2: read(b)?,
            });
        }
        AbstractXag::new(self.num_inputs, steps, read(&self.output)?, false)
    }

    /// Clause excluding exactly the `ŝ` assignment of `model`.
    pub fn blocking_clause(&self, model: &Model) -> Vec<Lit> {
        self.selection_vars()
            .into_iter()
            .map(|l| if model.value(l) { !l } else { l })
            .collect()
    }

    /// Sidecar text mapping structure variables to DIMACS ids, one per line:
    /// `s 1 4 2 -> 17` for `s_{1,4,2}` and `s 3 -> 40` for output selection.
    pub fn variable_map(&self) -> String {
        let mut out = String::new();
        for (k, sides) in self.fanin.iter().enumerate() {
            let i = self.num_inputs + 1 + k;
            for (c, lits) in sides.iter().enumerate() {
                for (j, l) in lits.iter().enumerate() {
                    writeln!(out, "s {} {i} {} -> {}", c + 1, j + 1, l.var()).unwrap();
                }
            }
        }
        for (j, l) in self.output.iter().enumerate() {
            writeln!(out, "s {} -> {}", j + 1, l.var()).unwrap();
        }
        out
    }

    pub fn to_dimacs(&self) -> String {
        self.session.to_dimacs()
    }
}
