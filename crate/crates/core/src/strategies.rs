//! Drivers that sweep the AND budget `r` upward until an instance is SAT.

use std::time::{Duration, Instant};

use crate::boolfunc::TruthTable;
use crate::encoder::{EncodingOptions, McInstance};
use crate::error::{Error, Result};
use crate::network::{AbstractXag, Xag};
use crate::satcore::SolveOutcome;
use crate::slp::{extract_matrix, heuristic_min_support, rebuild_xag, slp_minimize, SlpOptions};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Constrain every input assignment up front.
    #[default]
    Direct,
    /// Constrain only counterexamples, smallest differing assignment first.
    Cegar,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum XorMode {
    /// Keep the first optimum.
    #[default]
    None,
    /// Enumerate optima and keep the one with the fewest XOR gates.
    Enumerate,
    /// Minimize total linear-form support with a sorter bound.
    Heuristic,
    /// `Heuristic`, then exact SLP on the chosen network.
    HeuristicSat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Optimality {
    ProvenOptimal,
    /// A conflict limit interrupted some UNSAT proof, or the starting bound
    /// was not known to be valid.
    UpperBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RoundOutcome {
    Sat,
    Unsat,
    Limit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundStats {
    pub r: usize,
    pub outcome: RoundOutcome,
    /// Input assignments constrained when the round ended.
    pub constrained: usize,
    pub solve_calls: u32,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisResult {
    pub mc: usize,
    pub witness: AbstractXag,
    pub status: Optimality,
    pub rounds: Vec<RoundStats>,
}

impl SynthesisResult {
    pub fn is_proven(&self) -> bool {
        self.status == Optimality::ProvenOptimal
    }

    pub fn elapsed(&self) -> Duration {
        self.rounds.iter().map(|r| r.elapsed).sum()
    }
}

/// Bounds on an upward sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SweepLimits {
    /// Per-solve conflict budget; `None` is unlimited.
    pub conflict_limit: Option<u32>,
    /// Give up with [`Error::UpperBoundExceeded`] beyond this many steps.
    pub r_high: Option<usize>,
}

/// `max(0, deg f - 1)`.
pub fn degree_lower_bound(f: &TruthTable) -> usize {
    f.anf_degree().saturating_sub(1)
}

pub fn find_mc_direct(f: &TruthTable, r_low: usize, opts: &EncodingOptions) -> Result<SynthesisResult> {
    find_mc(f, r_low, opts, Strategy::Direct, SweepLimits::default())
}

pub fn find_mc_cegar(f: &TruthTable, r_low: usize, opts: &EncodingOptions) -> Result<SynthesisResult> {
    find_mc(f, r_low, opts, Strategy::Cegar, SweepLimits::default())
}

/// Smallest `r >= r_low` with a SAT instance. The result is proven optimal
/// when every earlier round was UNSAT and `r_low` does not exceed the degree
/// bound.
pub fn find_mc(
    f: &TruthTable,
    r_low: usize,
    opts: &EncodingOptions,
    strategy: Strategy,
    limits: SweepLimits,
) -> Result<SynthesisResult> {
    if !f.is_normal() {
        return Err(Error::NotNormal);
    }
    let mut rounds = Vec::new();
    let mut limited = false;
    for r in r_low.. {
        if limits.r_high.is_some_and(|h| r > h) {
            return Err(Error::UpperBoundExceeded(limits.r_high.unwrap()));
        }
        let start = Instant::now();
        let mut inst = McInstance::new(*f, r, *opts)?;
        inst.session_mut().set_conflict_limit(limits.conflict_limit);
        let (outcome, witness) = match strategy {
            Strategy::Direct => {
                inst.constrain_all()?;
                match inst.solve(&[]) {
                    SolveOutcome::Sat(m) => (RoundOutcome::Sat, Some(inst.extract(&m)?)),
                    SolveOutcome::Unsat => (RoundOutcome::Unsat, None),
                    SolveOutcome::Limit => (RoundOutcome::Limit, None),
                }
            }
            Strategy::Cegar => cegar_round(&mut inst)?,
        };
        rounds.push(RoundStats {
            r,
            outcome,
            constrained: inst.num_constrained(),
            solve_calls: inst.session().stats().solve_calls,
            elapsed: start.elapsed(),
        });
        match outcome {
            RoundOutcome::Sat => {
                let proven = !limited && r_low <= degree_lower_bound(f);
                return Ok(SynthesisResult {
                    mc: r,
                    witness: witness.unwrap(),
                    status: if proven {
                        Optimality::ProvenOptimal
                    } else {
                        Optimality::UpperBound
                    },
                    rounds,
                });
            }
            RoundOutcome::Unsat => {}
            RoundOutcome::Limit => limited = true,
        }
    }
    unreachable!("the sweep only ends by returning")
}

fn cegar_round(inst: &mut McInstance) -> Result<(RoundOutcome, Option<AbstractXag>)> {
    let f = inst.function();
    loop {
        match inst.solve(&[]) {
            SolveOutcome::Sat(m) => {
                let cand = inst.extract(&m)?;
                match f.first_difference(&cand.simulate()) {
                    None => return Ok((RoundOutcome::Sat, Some(cand))),
                    Some(x) => inst.constrain_assignment(x)?,
                }
            }
            SolveOutcome::Unsat => return Ok((RoundOutcome::Unsat, None)),
            SolveOutcome::Limit => return Ok((RoundOutcome::Limit, None)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Enumeration {
    pub solutions: Vec<AbstractXag>,
    /// The instance became UNSAT: every solution was found.
    pub exhausted: bool,
    /// The instance had no solution at all.
    pub infeasible: bool,
    /// A conflict limit ended the enumeration.
    pub limited: bool,
}

/// Up to `limit` structurally distinct optima with `r` steps, each new one
/// excluded by a clause over all `ŝ` variables.
pub fn enumerate_optimum(
    f: &TruthTable,
    r: usize,
    limit: usize,
    opts: &EncodingOptions,
    conflict_limit: Option<u32>,
) -> Result<Enumeration> {
    let mut inst = McInstance::new(*f, r, *opts)?;
    inst.constrain_all()?;
    inst.session_mut().set_conflict_limit(conflict_limit);
    let mut out = Enumeration::default();
    while out.solutions.len() < limit {
        match inst.solve(&[]) {
            SolveOutcome::Sat(m) => {
                out.solutions.push(inst.extract(&m)?);
                let block = inst.blocking_clause(&m);
                inst.session_mut().add_clause(&block);
            }
            SolveOutcome::Unsat => {
                out.exhausted = true;
                out.infeasible = out.solutions.is_empty();
                break;
            }
            SolveOutcome::Limit => {
                out.limited = true;
                break;
            }
        }
    }
    Ok(out)
}

/// Everything [`minimize`] needs to know.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthesisConfig {
    pub strategy: Strategy,
    pub options: EncodingOptions,
    pub xor_mode: XorMode,
    /// Number of optima considered by the XOR modes.
    pub enumeration_limit: usize,
    /// Per-solve budget once the first optimum is known.
    pub abstract_conflict_limit: Option<u32>,
    pub linear_conflict_limit: Option<u32>,
    /// Budget during the MC sweep itself; unlimited by default.
    pub sweep_conflict_limit: Option<u32>,
    /// Overrides the degree bound as the starting `r`.
    pub r_low: Option<usize>,
    pub r_high: Option<usize>,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            strategy: Strategy::Direct,
            options: EncodingOptions::all(),
            xor_mode: XorMode::None,
            enumeration_limit: 50,
            abstract_conflict_limit: Some(50_000),
            linear_conflict_limit: Some(500_000),
            sweep_conflict_limit: None,
            r_low: None,
            r_high: None,
        }
    }
}

impl SynthesisConfig {
    /// A single optimum.
    pub fn run1() -> Self {
        Self::default()
    }

    /// Fewest XOR gates among up to 50 enumerated optima.
    pub fn run2() -> Self {
        SynthesisConfig {
            xor_mode: XorMode::Enumerate,
            ..Self::default()
        }
    }

    /// Minimum-support optima.
    pub fn run3() -> Self {
        SynthesisConfig {
            xor_mode: XorMode::Heuristic,
            ..Self::default()
        }
    }

    /// Minimum-support optima followed by exact SLP.
    pub fn run4() -> Self {
        SynthesisConfig {
            xor_mode: XorMode::HeuristicSat,
            ..Self::default()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "run1" => Some(Self::run1()),
            "run2" => Some(Self::run2()),
            "run3" => Some(Self::run3()),
            "run4" => Some(Self::run4()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minimized {
    /// Sweep result for the normalized function; `witness` is the optimum
    /// chosen by the XOR mode, with the output inversion applied.
    pub result: SynthesisResult,
    pub inverted: bool,
    pub network: Xag,
    /// False if a conflict limit cut short the XOR optimization.
    pub xor_proven: bool,
}

impl Minimized {
    pub fn mc(&self) -> usize {
        self.result.mc
    }

    pub fn xor_count(&self) -> usize {
        self.network.xor_count()
    }
}

/// Naive translation, pruning linear steps that cannot become binary ANDs.
fn translate(net: &AbstractXag) -> Result<Xag> {
    net.to_xag().or_else(|_| net.prune_linear_steps().to_xag())
}

/// Normalizes `f_raw`, finds its MC, then reduces XOR gates per
/// `config.xor_mode`. The returned network computes `f_raw`.
pub fn minimize(f_raw: &TruthTable, config: &SynthesisConfig) -> Result<Minimized> {
    let (f, inverted) = f_raw.normalize();
    let r_low = config.r_low.unwrap_or_else(|| degree_lower_bound(&f));
    let limits = SweepLimits {
        conflict_limit: config.sweep_conflict_limit,
        r_high: config.r_high,
    };
    let mut result = find_mc(&f, r_low, &config.options, config.strategy, limits)?;
    let opts = &config.options;
    let limit = config.enumeration_limit.max(1);
    let mut xor_proven = true;
    let (witness, mut network) = match config.xor_mode {
        XorMode::None => {
            let w = result.witness.clone();
            let x = translate(&w)?;
            (w, x)
        }
        XorMode::Enumerate => {
            let e = enumerate_optimum(&f, result.mc, limit, opts, config.abstract_conflict_limit)?;
            xor_proven = !e.limited;
            let w = e
                .solutions
                .into_iter()
                .min_by_key(AbstractXag::xor_cost)
                .unwrap_or_else(|| result.witness.clone());
            let x = translate(&w)?;
            (w, x)
        }
        XorMode::Heuristic | XorMode::HeuristicSat => {
            let s = heuristic_min_support(&f, result.mc, opts, config.abstract_conflict_limit, limit)?;
            xor_proven = s.proven;
            let w = s.candidates.into_iter().min_by_key(AbstractXag::xor_cost).unwrap();
            let mut x = translate(&w)?;
            if config.xor_mode == XorMode::HeuristicSat {
                let lin = slp_minimize(&extract_matrix(&w), SlpOptions::for_xag(), config.linear_conflict_limit)?;
                xor_proven &= lin.proven;
                let rebuilt = rebuild_xag(&w, &lin.network)?;
                if rebuilt.xor_count() < x.xor_count() {
                    x = rebuilt;
                }
            }
            (w, x)
        }
    };
    let mut witness = witness;
    witness.set_output_inverted(inverted);
    network.set_output_inverted(inverted);
    result.witness = witness;
    Ok(Minimized {
        result,
        inverted,
        network,
        xor_proven,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt(hex: &str, n: usize) -> TruthTable {
        TruthTable::from_hex(hex, n).unwrap()
    }

    #[test]
    fn direct_small_examples() {
        let all = EncodingOptions::all();
        let r = find_mc_direct(&tt("d8", 3), 1, &all).unwrap();
        assert_eq!(r.mc, 1);
        assert!(r.is_proven());
        assert_eq!(r.witness.simulate(), tt("d8", 3));
        let z = find_mc_direct(&tt("0", 2), 0, &all).unwrap();
        assert_eq!(z.mc, 0);
        assert_eq!(z.witness.num_steps(), 0);
        assert!(z.witness.output().is_empty());
        assert_eq!(find_mc_direct(&tt("7", 2), 0, &all), Err(Error::NotNormal));
    }

    #[test]
    fn cegar_small_examples() {
        let all = EncodingOptions::all();
        let r = find_mc_cegar(&tt("d8", 3), 1, &all).unwrap();
        assert_eq!(r.mc, 1);
        assert!(r.rounds.last().unwrap().constrained <= 7);
        assert_eq!(find_mc_cegar(&tt("96", 3), 0, &all).unwrap().mc, 0);
        assert_eq!(find_mc_cegar(&tt("88888888", 5), 0, &all).unwrap().mc, 1);
    }

    #[test]
    fn and_class_needs_three() {
        let f = tt("80008000", 5);
        let r = find_mc_direct(&f, 1, &EncodingOptions::all()).unwrap();
        assert_eq!(r.mc, 3);
        assert_eq!(r.rounds.len(), 3);
        assert_eq!(r.rounds[0].outcome, RoundOutcome::Unsat);
    }

    #[test]
    fn r_low_above_bound_is_unproven() {
        let r = find_mc_direct(&tt("8", 2), 1, &EncodingOptions::all()).unwrap();
        assert!(r.is_proven());
        let over = find_mc_direct(&tt("6", 2), 1, &EncodingOptions::all()).unwrap();
        assert_eq!(over.status, Optimality::UpperBound);
    }

    #[test]
    fn r_high_cap() {
        let limits = SweepLimits {
            conflict_limit: None,
            r_high: Some(1),
        };
        let f = tt("80", 3);
        assert_eq!(
            find_mc(&f, 0, &EncodingOptions::all(), Strategy::Direct, limits),
            Err(Error::UpperBoundExceeded(1))
        );
    }

    #[test]
    fn conflict_limit_downgrades_status() {
        let limits = SweepLimits {
            conflict_limit: Some(0),
            r_high: Some(6),
        };
        let f = tt("80000000", 5);
        match find_mc(&f, 3, &EncodingOptions::all(), Strategy::Direct, limits) {
            Ok(r) => {
                assert!(r.rounds.iter().any(|x| x.outcome == RoundOutcome::Limit));
                assert_eq!(r.status, Optimality::UpperBound);
                assert_eq!(r.witness.simulate(), f);
            }
            Err(e) => assert_eq!(e, Error::UpperBoundExceeded(6)),
        }
    }

    #[test]
    fn enumeration_and2() {
        let f = tt("8", 2);
        for opts in [EncodingOptions::none(), EncodingOptions::all()] {
            let e = enumerate_optimum(&f, 1, 1000, &opts, None).unwrap();
            assert!(e.exhausted && !e.infeasible && !e.limited);
            assert!(e.solutions.iter().all(|a| a.simulate() == f && a.num_steps() == 1));
            let distinct: std::collections::HashSet<_> = e.solutions.iter().collect();
            assert_eq!(distinct.len(), e.solutions.len());
            // brute force over all (S1, S2, S) with one step
            let mut expected = 0;
            for a in 0..4u64 {
                for b in 0..4u64 {
                    for o in 0..8u64 {
                        let st = crate::AndStep::new(
                            crate::IndexSet::from_bits(a << 1),
                            crate::IndexSet::from_bits(b << 1),
                        );
                        let net = AbstractXag::new(2, vec![st], crate::IndexSet::from_bits(o << 1), false).unwrap();
                        if net.simulate() == f && admitted(&net, &opts) {
                            expected += 1;
                        }
                    }
                }
            }
            assert_eq!(e.solutions.len(), expected);
        }
        let one = enumerate_optimum(&f, 1, 1, &EncodingOptions::all(), None).unwrap();
        assert_eq!(one.solutions.len(), 1);
        assert!(!one.exhausted);
        let none = enumerate_optimum(&f, 0, 5, &EncodingOptions::all(), None).unwrap();
        assert!(none.infeasible && none.solutions.is_empty());
    }

    /// The 2-input AND constraints with every family on, written out directly.
    fn admitted(net: &AbstractXag, opts: &EncodingOptions) -> bool {
        if *opts == EncodingOptions::none() {
            return true;
        }
        let st = net.steps()[0];
        let forms = net.linear_forms();
        let nonconst = forms.iter().all(|s| !s.is_empty());
        let d = st.s1.symmetric_difference(st.s2);
        let comm = d.max().is_some_and(|m| st.s2.contains(m));
        // x1, x2 symmetric: x2 may only appear once x1 has
        let sym = (0..forms.len())
            .all(|l| !forms[l].contains(2) || forms[..=l].iter().any(|s| s.contains(1)));
        let used = [1, 2, 3].iter().all(|&j| forms.iter().any(|s| s.contains(j)));
        let sf = !(st.s1.is_subset(st.s2) || st.s2.is_subset(st.s1));
        // output uses x3 = L_T ∧ L_U; its other members must not be a proper subset of T ∩ U
        let common = st.s1.intersection(st.s2);
        let rest = net.output().difference(crate::IndexSet::singleton(3));
        let ml = !net.output().contains(3) || !rest.is_subset(common) || rest == common;
        nonconst && comm && sym && used && sf && ml
    }

    #[test]
    fn minimize_examples() {
        let nand = minimize(&tt("7", 2), &SynthesisConfig::run1()).unwrap();
        assert_eq!(nand.mc(), 1);
        assert!(nand.inverted);
        assert_eq!(nand.network.simulate(), tt("7", 2));
        assert_eq!(nand.result.witness.simulate(), tt("7", 2));
        let ite = minimize(&tt("d8", 3), &SynthesisConfig::run4()).unwrap();
        assert_eq!((ite.network.and_count(), ite.xor_count()), (1, 2));
        assert_eq!(ite.network.simulate(), tt("d8", 3));
        let zero = minimize(&tt("00", 3), &SynthesisConfig::run4()).unwrap();
        assert_eq!(zero.mc(), 0);
        assert_eq!(zero.network.to_netlist().trim(), "f = x0");
        let one = minimize(&tt("ff", 3), &SynthesisConfig::run2()).unwrap();
        assert!(one.inverted);
        assert_eq!(one.network.simulate(), tt("ff", 3));
    }

    #[test]
    fn xor_modes_never_worse_than_run1() {
        for hex in ["e8", "96", "80", "6a", "ca"] {
            let f = tt(hex, 3);
            let base = minimize(&f, &SynthesisConfig::run1()).unwrap();
            let mut prev = usize::MAX;
            for cfg in [SynthesisConfig::run2(), SynthesisConfig::run3(), SynthesisConfig::run4()] {
                let m = minimize(&f, &cfg).unwrap();
                assert_eq!(m.mc(), base.mc(), "{hex}");
                assert_eq!(m.network.simulate(), f, "{hex}");
                assert_eq!(m.network.and_count(), m.mc());
                if cfg.xor_mode == XorMode::HeuristicSat {
                    assert!(m.xor_count() <= prev, "{hex}");
                }
                prev = m.xor_count();
            }
        }
    }
}
