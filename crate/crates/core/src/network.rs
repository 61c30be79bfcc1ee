//! XOR-AND graphs and their abstract form.
//!
//! A concrete [`Xag`] is a straight-line program of binary AND/XOR steps. An
//! [`AbstractXag`] only keeps the AND steps; each AND fan-in and the output are
//! linear forms `L_S` over inputs and earlier AND steps.

use std::fmt::{self, Write as _};

use crate::boolfunc::{IndexSet, TruthTable, MAX_VARS};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Xor,
}

impl GateKind {
    fn symbol(self) -> &'static str {
        match self {
            GateKind::And => "&",
            GateKind::Xor => "^",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub fanin1: usize,
    pub fanin2: usize,
}

impl Gate {
    pub fn and(fanin1: usize, fanin2: usize) -> Self {
        Gate {
            kind: GateKind::And,
            fanin1,
            fanin2,
        }
    }

    pub fn xor(fanin1: usize, fanin2: usize) -> Self {
        Gate {
            kind: GateKind::Xor,
            fanin1,
            fanin2,
        }
    }
}

/// A concrete XAG. Inputs are `x_1..x_n`, step `k` (0-based) defines
/// `x_{n+1+k}`, and `x_0` is the constant 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Xag {
    num_inputs: usize,
    steps: Vec<Gate>,
    output: usize,
    output_inverted: bool,
}

impl Xag {
    /// Builds a network, checking `1 <= fanin1 < fanin2 < i` for every step.
    pub fn new(
        num_inputs: usize,
        steps: Vec<Gate>,
        output: usize,
        output_inverted: bool,
    ) -> Result<Self> {
        if !(1..=MAX_VARS).contains(&num_inputs) {
            return Err(Error::VariableCount(num_inputs));
        }
        for (k, g) in steps.iter().enumerate() {
            let i = num_inputs + 1 + k;
            if !(1 <= g.fanin1 && g.fanin1 < g.fanin2 && g.fanin2 < i) {
                return Err(Error::FaninOrder {
                    step: i,
                    fanin1: g.fanin1,
                    fanin2: g.fanin2,
                });
            }
        }
        if output > num_inputs + steps.len() {
            return Err(Error::OutputIndex(output));
        }
        Ok(Xag {
            num_inputs,
            steps,
            output,
            output_inverted,
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn steps(&self) -> &[Gate] {
        &self.steps
    }

    pub fn output(&self) -> usize {
        self.output
    }

    pub fn output_inverted(&self) -> bool {
        self.output_inverted
    }

    pub fn set_output_inverted(&mut self, inverted: bool) {
        self.output_inverted = inverted;
    }

    pub fn and_count(&self) -> usize {
        self.count(GateKind::And)
    }

    pub fn xor_count(&self) -> usize {
        self.count(GateKind::Xor)
    }

    fn count(&self, kind: GateKind) -> usize {
        self.steps.iter().filter(|g| g.kind == kind).count()
    }

    /// Truth table of every node, indexed like the network (`[0]` is constant 0).
    pub fn node_tables(&self) -> Vec<TruthTable> {
        let n = self.num_inputs;
        let mut tables = Vec::with_capacity(n + 1 + self.steps.len());
        tables.push(TruthTable::zero(n).expect("validated input count"));
        for i in 1..=n {
            tables.push(TruthTable::projection(n, i).expect("validated input count"));
        }
        for g in &self.steps {
            let (a, b) = (tables[g.fanin1], tables[g.fanin2]);
            tables.push(match g.kind {
                GateKind::And => a & b,
                GateKind::Xor => a ^ b,
            });
        }
        tables
    }

    pub fn simulate(&self) -> TruthTable {
        let t = self.node_tables()[self.output];
        if self.output_inverted {
            !t
        } else {
            t
        }
    }

    /// ASCII netlist: one `x6 = x1 & x2` line per step, then `f = x9` or `f = !x9`.
    pub fn to_netlist(&self) -> String {
        let mut out = String::new();
        for (k, g) in self.steps.iter().enumerate() {
            let i = self.num_inputs + 1 + k;
            writeln!(
                out,
                "x{i} = x{} {} x{}",
                g.fanin1,
                g.kind.symbol(),
                g.fanin2
            )
            .unwrap();
        }
        let bang = if self.output_inverted { "!" } else { "" };
        writeln!(out, "f = {bang}x{}", self.output).unwrap();
        out
    }

    /// Parses the ASCII netlist format. Without an explicit input count, it is
    /// inferred from the first step index, or from the output index when the
    /// network has no steps. A missing `f =` line selects the last step.
    pub fn parse(text: &str, num_inputs: Option<usize>) -> Result<Self> {
        let mut raw: Vec<(usize, usize, Gate)> = Vec::new();
        let mut output: Option<(usize, bool)> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| Error::Parse {
                line: lineno + 1,
                message: message.to_string(),
            };
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| err("expected '='"))?;
            let lhs = lhs.trim();
            let rhs = rhs.trim();
            if lhs == "f" {
                if output.is_some() {
                    return Err(err("duplicate output line"));
                }
                let (inv, node) = match rhs.strip_prefix('!') {
                    Some(rest) => (true, rest.trim()),
                    None => (false, rhs),
                };
                output = Some((parse_node(node).ok_or_else(|| err("bad output node"))?, inv));
                continue;
            }
            if output.is_some() {
                return Err(err("step after output line"));
            }
            let index = parse_node(lhs).ok_or_else(|| err("bad step name"))?;
            let (kind, a, b) = if let Some((a, b)) = rhs.split_once('&') {
                (GateKind::And, a, b)
            } else if let Some((a, b)) = rhs.split_once('^') {
                (GateKind::Xor, a, b)
            } else {
                return Err(err("expected '&' or '^'"));
            };
            let a = parse_node(a.trim()).ok_or_else(|| err("bad fan-in"))?;
            let b = parse_node(b.trim()).ok_or_else(|| err("bad fan-in"))?;
            if a == b {
                return Err(err("identical fan-ins"));
            }
            let gate = Gate {
                kind,
                fanin1: a.min(b),
                fanin2: a.max(b),
            };
            raw.push((lineno + 1, index, gate));
        }
        let n = match (num_inputs, raw.first(), output) {
            (Some(n), _, _) => n,
            (None, Some(&(_, first, _)), _) => first.saturating_sub(1),
            (None, None, Some((o, _))) => o.max(1),
            (None, None, None) => 1,
        };
        let mut steps = Vec::with_capacity(raw.len());
        for (k, (line, index, gate)) in raw.into_iter().enumerate() {
            if index != n + 1 + k {
                return Err(Error::Parse {
                    line,
                    message: format!("expected step x{}, found x{index}", n + 1 + k),
                });
            }
            steps.push(gate);
        }
        let (out, inv) = output.unwrap_or((if steps.is_empty() { 0 } else { n + steps.len() }, false));
        Xag::new(n, steps, out, inv)
    }

    /// Graphviz rendering of the network.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph xag {\n  rankdir=BT;\n");
        if self.output == 0 {
            out.push_str("  x0 [label=\"0\", shape=box];\n");
        }
        for i in 1..=self.num_inputs {
            writeln!(out, "  x{i} [shape=circle];").unwrap();
        }
        for (k, g) in self.steps.iter().enumerate() {
            let i = self.num_inputs + 1 + k;
            writeln!(out, "  x{i} [label=\"x{i} {}\"];", g.kind.symbol()).unwrap();
            writeln!(out, "  x{} -> x{i};", g.fanin1).unwrap();
            writeln!(out, "  x{} -> x{i};", g.fanin2).unwrap();
        }
        out.push_str("  f [shape=box];\n");
        let style = if self.output_inverted {
            " [style=dashed]"
        } else {
            ""
        };
        writeln!(out, "  x{} -> f{style};", self.output).unwrap();
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for Xag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_netlist())
    }
}

fn parse_node(s: &str) -> Option<usize> {
    s.strip_prefix('x')?.parse().ok()
}

/// AND step `x_i = L_{S_1} ∧ L_{S_2}` of an abstract XAG.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AndStep {
    pub s1: IndexSet,
    pub s2: IndexSet,
}

impl AndStep {
    pub fn new(s1: impl Into<IndexSet>, s2: impl Into<IndexSet>) -> Self {
        AndStep {
            s1: s1.into(),
            s2: s2.into(),
        }
    }

    fn is_trivial(&self) -> bool {
        self.s1 == self.s2
    }
}

/// An abstract XAG with `r` AND steps; its multiplicative complexity is `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbstractXag {
    num_inputs: usize,
    steps: Vec<AndStep>,
    output: IndexSet,
    output_inverted: bool,
}

impl AbstractXag {
    pub fn new(
        num_inputs: usize,
        steps: Vec<AndStep>,
        output: IndexSet,
        output_inverted: bool,
    ) -> Result<Self> {
        if !(1..=MAX_VARS).contains(&num_inputs) {
            return Err(Error::VariableCount(num_inputs));
        }
        let total = num_inputs + steps.len();
        if total > IndexSet::MAX_INDEX {
            return Err(Error::TooManyIndices(total));
        }
        for (k, st) in steps.iter().enumerate() {
            let i = num_inputs + 1 + k;
            for s in [st.s1, st.s2] {
                if let Some(m) = s.max().filter(|&m| m >= i) {
                    return Err(Error::IndexOutOfRange { index: m, limit: i - 1 });
                }
            }
        }
        if let Some(m) = output.max().filter(|&m| m > total) {
            return Err(Error::IndexOutOfRange {
                index: m,
                limit: total,
            });
        }
        Ok(AbstractXag {
            num_inputs,
            steps,
            output,
            output_inverted,
        })
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    /// Number of AND steps `r`.
    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[AndStep] {
        &self.steps
    }

    pub fn output(&self) -> IndexSet {
        self.output
    }

    pub fn output_inverted(&self) -> bool {
        self.output_inverted
    }

    pub fn set_output_inverted(&mut self, inverted: bool) {
        self.output_inverted = inverted;
    }

    /// The `2r + 1` linear forms in order `S_{1,n+1}, S_{2,n+1}, ..., S`.
    pub fn linear_forms(&self) -> Vec<IndexSet> {
        self.steps
            .iter()
            .flat_map(|st| [st.s1, st.s2])
            .chain(std::iter::once(self.output))
            .collect()
    }

    /// `Σ_l |Ŝ_l|`.
    pub fn support(&self) -> usize {
        self.linear_forms().iter().map(|s| s.len()).sum()
    }

    /// XOR gates of the sharing-free translation: `Σ_l max(0, |Ŝ_l| - 1)`.
    pub fn xor_cost(&self) -> usize {
        self.linear_forms()
            .iter()
            .map(|s| s.len().saturating_sub(1))
            .sum()
    }

    /// Truth tables of inputs and AND steps, indexed from 1 (`[0]` is constant 0).
    pub fn node_tables(&self) -> Vec<TruthTable> {
        let n = self.num_inputs;
        let mut tables = Vec::with_capacity(n + 1 + self.steps.len());
        tables.push(TruthTable::zero(n).expect("validated input count"));
        for i in 1..=n {
            tables.push(TruthTable::projection(n, i).expect("validated input count"));
        }
        for st in &self.steps {
            let a = linear_over(&tables, st.s1);
            let b = linear_over(&tables, st.s2);
            tables.push(a & b);
        }
        tables
    }

    pub fn simulate(&self) -> TruthTable {
        let tables = self.node_tables();
        let t = linear_over(&tables, self.output);
        if self.output_inverted {
            !t
        } else {
            t
        }
    }

    /// Sharing-free translation: every linear form becomes its own
    /// left-to-right XOR chain in ascending index order.
    pub fn to_xag(&self) -> Result<Xag> {
        let n = self.num_inputs;
        // node of each abstract index in the concrete network
        let mut node: Vec<usize> = (0..=n).collect();
        let mut gates = Vec::new();
        fn chain(set: IndexSet, node: &[usize], n: usize, gates: &mut Vec<Gate>) -> usize {
            let mut it = set.iter();
            let Some(first) = it.next() else { return 0 };
            let mut acc = node[first];
            for j in it {
                let other = node[j];
                gates.push(Gate::xor(acc.min(other), acc.max(other)));
                acc = n + gates.len();
            }
            acc
        }
        for (k, st) in self.steps.iter().enumerate() {
            let i = n + 1 + k;
            if st.s1.is_empty() || st.s2.is_empty() {
                return Err(Error::EmptyFanin(i));
            }
            let a = chain(st.s1, &node, n, &mut gates);
            let b = chain(st.s2, &node, n, &mut gates);
            if a == b {
                return Err(Error::DegenerateStep(i));
            }
            gates.push(Gate::and(a.min(b), a.max(b)));
            node.push(n + gates.len());
        }
        let out = chain(self.output, &node, n, &mut gates);
        Xag::new(n, gates, out, self.output_inverted)
    }

    /// Merges every XOR gate into the linear forms between AND gates.
    pub fn from_xag(xag: &Xag) -> Result<AbstractXag> {
        let n = xag.num_inputs();
        let mut form: Vec<IndexSet> = Vec::with_capacity(n + 1 + xag.steps().len());
        form.push(IndexSet::empty());
        form.extend((1..=n).map(IndexSet::singleton));
        let mut steps = Vec::new();
        for g in xag.steps() {
            let (a, b) = (form[g.fanin1], form[g.fanin2]);
            match g.kind {
                GateKind::Xor => form.push(a.symmetric_difference(b)),
                GateKind::And => {
                    steps.push(AndStep { s1: a, s2: b });
                    let index = n + steps.len();
                    if index > IndexSet::MAX_INDEX {
                        return Err(Error::TooManyIndices(index));
                    }
                    form.push(IndexSet::singleton(index));
                }
            }
        }
        AbstractXag::new(n, steps, form[xag.output()], xag.output_inverted())
    }

    /// True if no step has one fan-in set contained in the other, ignoring
    /// trivial steps with `S_1 = S_2`.
    pub fn is_subset_free(&self) -> bool {
        self.steps
            .iter()
            .all(|st| st.is_trivial() || !(st.s1.is_subset(st.s2) || st.s2.is_subset(st.s1)))
    }

    /// Rewrites every step with `S_1 ⊆ S_2` (or vice versa) as
    /// `L_{S_1} ∧ L_{S_2 \ S_1}`, toggling `S_1` into every later linear form
    /// that references the step. Steps with `S_1 = S_2` or an empty fan-in
    /// compute a linear form (or 0); their references are replaced by that
    /// form and the step becomes the canonical trivial `L_a ∧ L_a`.
    pub fn subset_free_normalize(&self) -> AbstractXag {
        let n = self.num_inputs;
        let mut steps = self.steps.clone();
        let mut output = self.output;
        for k in 0..steps.len() {
            let i = n + 1 + k;
            let st = steps[k];
            let (small, large) = if st.s1.is_subset(st.s2) {
                (st.s1, st.s2)
            } else if st.s2.is_subset(st.s1) {
                (st.s2, st.s1)
            } else {
                continue;
            };
            // new x_i differs from the old one by `delta`
            let delta = if small == large || small.is_empty() {
                // the old step is L_small (or 0); substitute it and stop using x_i
                let a = small.min().map(IndexSet::singleton).unwrap_or_default();
                steps[k] = AndStep { s1: a, s2: a };
                let mut d = small;
                d.toggle(i);
                d
            } else {
                steps[k] = AndStep {
                    s1: small,
                    s2: large.difference(small),
                };
                small
            };
            let apply = |s: &mut IndexSet| {
                if s.contains(i) {
                    *s = s.symmetric_difference(delta);
                }
            };
            for later in steps.iter_mut().skip(k + 1) {
                apply(&mut later.s1);
                apply(&mut later.s2);
            }
            apply(&mut output);
        }
        AbstractXag {
            num_inputs: n,
            steps,
            output,
            output_inverted: self.output_inverted,
        }
    }

    /// Removes steps that compute a linear function (`S_1 = S_2` or an empty
    /// fan-in), substituting their value into later forms and renumbering.
    pub fn prune_linear_steps(&self) -> AbstractXag {
        let n = self.num_inputs;
        let mut map: Vec<IndexSet> = (0..=n).map(|j| {
            if j == 0 { IndexSet::empty() } else { IndexSet::singleton(j) }
        }).collect();
        let translate = |map: &[IndexSet], s: IndexSet| {
            s.iter().fold(IndexSet::empty(), |acc, j| acc.symmetric_difference(map[j]))
        };
        let mut steps = Vec::with_capacity(self.steps.len());
        for st in &self.steps {
            let (a, b) = (translate(&map, st.s1), translate(&map, st.s2));
            if a.is_empty() || b.is_empty() {
                map.push(IndexSet::empty());
            } else if a == b {
                map.push(a);
            } else {
                steps.push(AndStep { s1: a, s2: b });
                map.push(IndexSet::singleton(n + steps.len()));
            }
        }
        AbstractXag {
            num_inputs: n,
            steps,
            output: translate(&map, self.output),
            output_inverted: self.output_inverted,
        }
    }
}

fn linear_over(tables: &[TruthTable], set: IndexSet) -> TruthTable {
    set.iter().fold(tables[0], |acc, j| acc ^ tables[j])
}

fn fmt_form(f: &mut fmt::Formatter<'_>, s: IndexSet) -> fmt::Result {
    if s.is_empty() {
        return f.write_str("0");
    }
    for (k, j) in s.iter().enumerate() {
        if k > 0 {
            f.write_str(" ^ ")?;
        }
        write!(f, "x{j}")?;
    }
    Ok(())
}

impl fmt::Display for AbstractXag {
    /// One `x4 = (x1) & (x2 ^ x3)` line per step, then the output form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, st) in self.steps.iter().enumerate() {
            write!(f, "x{} = (", self.num_inputs + 1 + k)?;
            fmt_form(f, st.s1)?;
            f.write_str(") & (")?;
            fmt_form(f, st.s2)?;
            f.write_str(")\n")?;
        }
        f.write_str(if self.output_inverted { "f = !(" } else { "f = (" })?;
        fmt_form(f, self.output)?;
        f.write_str(")\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ite() -> TruthTable {
        TruthTable::from_hex("d8", 3).unwrap()
    }

    fn example1() -> Xag {
        Xag::new(
            3,
            vec![Gate::and(1, 2), Gate::and(1, 3), Gate::xor(4, 5), Gate::xor(3, 6)],
            7,
            false,
        )
        .unwrap()
    }

    fn example2() -> Xag {
        Xag::new(3, vec![Gate::xor(2, 3), Gate::and(1, 4), Gate::xor(3, 5)], 6, false).unwrap()
    }

    fn s(items: &[usize]) -> IndexSet {
        items.iter().copied().collect()
    }

    #[test]
    fn simulate_examples() {
        assert_eq!(example1().simulate(), ite());
        assert_eq!(example2().simulate(), ite());
        assert_eq!(example1().and_count(), 2);
        assert_eq!(example2().and_count(), 1);
        let empty = Xag::new(3, vec![], 0, false).unwrap();
        assert!(empty.simulate().is_zero());
    }

    #[test]
    fn invalid_fanins_rejected() {
        assert!(matches!(
            Xag::new(2, vec![Gate::and(2, 1)], 3, false),
            Err(Error::FaninOrder { step: 3, .. })
        ));
        assert!(Xag::new(2, vec![Gate::and(1, 3)], 3, false).is_err());
        assert_eq!(
            Xag::new(2, vec![Gate::and(1, 2)], 4, false),
            Err(Error::OutputIndex(4))
        );
    }

    #[test]
    fn xag_to_abstract_examples() {
        let a1 = AbstractXag::from_xag(&example1()).unwrap();
        assert_eq!(
            a1.steps(),
            &[AndStep::new([1], [2]), AndStep::new([1], [3])]
        );
        assert_eq!(a1.output(), s(&[3, 4, 5]));
        let a2 = AbstractXag::from_xag(&example2()).unwrap();
        assert_eq!(a2.steps(), &[AndStep::new([1], [2, 3])]);
        assert_eq!(a2.output(), s(&[3, 4]));

        let parity = Xag::new(3, vec![Gate::xor(1, 2), Gate::xor(3, 4)], 5, false).unwrap();
        let ap = AbstractXag::from_xag(&parity).unwrap();
        assert_eq!(ap.num_steps(), 0);
        assert_eq!(ap.output(), s(&[1, 2, 3]));
    }

    #[test]
    fn simulate_abstract_examples() {
        let a = AbstractXag::new(3, vec![AndStep::new([1], [2, 3])], s(&[3, 4]), false).unwrap();
        assert_eq!(a.simulate(), ite());
        let zero = AbstractXag::new(3, vec![AndStep::new([1], [2])], s(&[]), false).unwrap();
        assert!(zero.simulate().is_zero());
        // (x1 ^ x2)(x1 ^ x3), enumerated directly
        let q = AbstractXag::new(3, vec![AndStep::new([1, 2], [1, 3])], s(&[4]), false).unwrap();
        let expected = TruthTable::from_fn(3, |x| {
            let b = |i: u32| x >> i & 1 == 1;
            (b(0) ^ b(1)) & (b(0) ^ b(2))
        })
        .unwrap();
        assert_eq!(q.simulate(), expected);
        assert_eq!(expected.to_hex(), "42");
    }

    #[test]
    fn abstract_to_xag_examples() {
        let a = AbstractXag::new(3, vec![AndStep::new([1], [2, 3])], s(&[3, 4]), false).unwrap();
        let x = a.to_xag().unwrap();
        assert_eq!((x.and_count(), x.xor_count()), (1, 2));
        assert_eq!(x.simulate(), example2().simulate());
        assert_eq!(x, example2());

        let single = AbstractXag::new(2, vec![AndStep::new([1], [2])], s(&[3]), false).unwrap();
        let x = single.to_xag().unwrap();
        assert_eq!((x.and_count(), x.xor_count()), (1, 0));

        let wide =
            AbstractXag::new(5, vec![AndStep::new([1, 2], [3, 4, 5])], s(&[6]), false).unwrap();
        let x = wide.to_xag().unwrap();
        assert_eq!((x.and_count(), x.xor_count()), (1, 3));
        assert_eq!(x.simulate(), wide.simulate());

        let empty = AbstractXag::new(2, vec![AndStep::new([], [2])], s(&[3]), false).unwrap();
        assert_eq!(empty.to_xag(), Err(Error::EmptyFanin(3)));
    }

    #[test]
    fn xor_cost_examples() {
        let a2 = AbstractXag::from_xag(&example2()).unwrap();
        assert_eq!(a2.xor_cost(), 2);
        let a1 = AbstractXag::from_xag(&example1()).unwrap();
        assert_eq!(a1.xor_cost(), 2);
        let single = AbstractXag::new(2, vec![AndStep::new([1], [2])], s(&[3]), false).unwrap();
        assert_eq!(single.xor_cost(), 0);
    }

    #[test]
    fn subset_free_examples() {
        // x3 = L1 ∧ L{1,2}  ==  x1 ⊕ (x1 ∧ x2)
        let a = AbstractXag::new(2, vec![AndStep::new([1], [1, 2])], s(&[3]), false).unwrap();
        let b = a.subset_free_normalize();
        assert_eq!(b.steps(), &[AndStep::new([1], [2])]);
        assert_eq!(b.output(), s(&[1, 3]));
        assert_eq!(b.simulate(), a.simulate());
        assert!(b.is_subset_free());

        let free = AbstractXag::new(3, vec![AndStep::new([1], [2, 3])], s(&[3, 4]), false).unwrap();
        assert_eq!(free.subset_free_normalize(), free);

        let same = AbstractXag::new(2, vec![AndStep::new([1, 2], [1, 2])], s(&[3]), false).unwrap();
        let t = same.subset_free_normalize();
        assert_eq!(t.num_steps(), 1);
        assert_eq!(t.simulate(), TruthTable::from_hex("6", 2).unwrap());
        assert_eq!(t.simulate(), same.simulate());
        assert!(t.is_subset_free());
    }

    #[test]
    fn netlist_round_trip() {
        let text = example1().to_netlist();
        assert_eq!(text, "x4 = x1 & x2\nx5 = x1 & x3\nx6 = x4 ^ x5\nx7 = x3 ^ x6\nf = x7\n");
        assert_eq!(Xag::parse(&text, None).unwrap(), example1());
        let inv = Xag::parse("x3 = x2 & x1\nf = !x3", None).unwrap();
        assert_eq!(inv.steps(), &[Gate::and(1, 2)]);
        assert!(inv.output_inverted());
        let zero = Xag::parse("f = x0", Some(5)).unwrap();
        assert!(zero.simulate().is_zero());
        let implicit = Xag::parse("x3 = x1 & x2", None).unwrap();
        assert_eq!(implicit.output(), 3);
        assert!(matches!(
            Xag::parse("x4 = x1 & x2", Some(2)),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(Xag::parse("x3 = x1 | x2", None).is_err());
        assert!(example2().to_dot().contains("x5 [label=\"x5 &\"]"));
    }

    /// Every abstract XAG over `n` inputs with `r` steps (all index sets).
    fn all_abstract(n: usize, r: usize) -> Vec<AbstractXag> {
        let mut out = Vec::new();
        fn rec(n: usize, r: usize, steps: &mut Vec<AndStep>, out: &mut Vec<AbstractXag>) {
            let i = n + 1 + steps.len();
            if steps.len() == r {
                for o in 0..1u64 << (n + r) {
                    let output = IndexSet::from_bits(o << 1);
                    out.push(AbstractXag::new(n, steps.clone(), output, false).unwrap());
                }
                return;
            }
            for a in 0..1u64 << (i - 1) {
                for b in 0..1u64 << (i - 1) {
                    steps.push(AndStep {
                        s1: IndexSet::from_bits(a << 1),
                        s2: IndexSet::from_bits(b << 1),
                    });
                    rec(n, r, steps, out);
                    steps.pop();
                }
            }
        }
        rec(n, r, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn subset_free_exhaustive_small() {
        for (n, r) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            for a in all_abstract(n, r) {
                let b = a.subset_free_normalize();
                assert_eq!(b.num_steps(), a.num_steps());
                assert_eq!(b.simulate(), a.simulate(), "{a}");
                assert!(b.is_subset_free(), "{a} -> {b}");
            }
        }
    }

    #[test]
    fn prune_linear_steps_exhaustive_small() {
        for (n, r) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            for a in all_abstract(n, r) {
                let b = a.prune_linear_steps();
                assert_eq!(b.simulate(), a.simulate(), "{a}");
                assert!(b.steps().iter().all(|st| st.s1 != st.s2 && !st.s1.is_empty() && !st.s2.is_empty()));
                if a.steps().iter().all(|st| st.s1 != st.s2 && !st.s1.is_empty() && !st.s2.is_empty()) {
                    assert_eq!(b, a);
                }
            }
        }
    }

    fn arb_abstract() -> impl Strategy<Value = AbstractXag> {
        (1..=5usize, 0..=4usize)
            .prop_flat_map(|(n, r)| {
                let steps: Vec<_> = (0..r)
                    .map(|k| {
                        let width = n + k;
                        (1..1u64 << width, 1..1u64 << width)
                    })
                    .collect();
                (Just(n), steps, 0..1u64 << (n + r))
            })
            .prop_map(|(n, steps, out)| {
                let steps = steps
                    .into_iter()
                    .map(|(a, b)| AndStep {
                        s1: IndexSet::from_bits(a << 1),
                        s2: IndexSet::from_bits(b << 1),
                    })
                    .collect();
                AbstractXag::new(n, steps, IndexSet::from_bits(out << 1), false).unwrap()
            })
    }

    proptest! {
        #[test]
        fn abstract_round_trip(a in arb_abstract()) {
            // identical singleton fan-ins cannot be realized by a binary AND
            prop_assume!(a.steps().iter().all(|st| st.s1 != st.s2 || st.s1.len() > 1));
            let x = a.to_xag().unwrap();
            prop_assert_eq!(x.and_count(), a.num_steps());
            prop_assert_eq!(x.xor_count(), a.xor_cost());
            prop_assert_eq!(x.simulate(), a.simulate());
            // AND fan-ins may come back swapped
            let canon = |a: &AbstractXag| -> Vec<(IndexSet, IndexSet)> {
                a.steps().iter().map(|st| (Ord::min(st.s1, st.s2), Ord::max(st.s1, st.s2))).collect()
            };
            let b = AbstractXag::from_xag(&x).unwrap();
            prop_assert_eq!(canon(&b), canon(&a));
            prop_assert_eq!(b.output(), a.output());
        }

        #[test]
        fn netlist_parse_inverts_print(a in arb_abstract()) {
            prop_assume!(a.steps().iter().all(|st| st.s1 != st.s2 || st.s1.len() > 1));
            let x = a.to_xag().unwrap();
            let y = Xag::parse(&x.to_netlist(), Some(x.num_inputs())).unwrap();
            prop_assert_eq!(y, x);
        }
    }
}
