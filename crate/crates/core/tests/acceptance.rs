//! One line per acceptance criterion, written straight to stdout so it
//! shows up without `--nocapture`.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use xagmc::affine5::{table, ClassTableEntry};
use xagmc::slp::{slp_minimize, LinearMatrix, SlpOptions};
use xagmc::strategies::{degree_lower_bound, RoundOutcome};
use xagmc::{
    find_mc_cegar, find_mc_direct, minimize, AbstractXag, AndStep, ConstraintFamily,
    EncodingOptions, IndexSet, Optimality, SynthesisConfig, TruthTable,
};

fn report(id: usize, name: &str, ok: bool, detail: String, started: Instant) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let line = format!(
        "acceptance {id:>2} {verdict} {name}: {detail} ({:.1}s)\n",
        started.elapsed().as_secs_f64()
    );
    std::io::stdout().write_all(line.as_bytes()).unwrap();
    assert!(ok, "criterion {id} failed: {detail}");
}

fn all_sets(n: usize) -> impl Iterator<Item = IndexSet> + Clone {
    (0u64..1 << n).map(move |bits| (1..=n).filter(|i| bits >> (i - 1) & 1 == 1).collect())
}

fn normal_functions(n: usize) -> Vec<TruthTable> {
    (0u32..1 << (1 << n))
        .map(|bits| TruthTable::from_fn(n, |x| bits >> x & 1 == 1).unwrap())
        .filter(|f| f.is_normal())
        .collect()
}

fn mc_direct(f: &TruthTable, opts: &EncodingOptions) -> usize {
    find_mc_direct(f, degree_lower_bound(f), opts).unwrap().mc
}

#[test]
fn c01_table_netlists_simulate() {
    let t = Instant::now();
    let bad: Vec<usize> = table()
        .iter()
        .filter(|e| e.simulate().ok() != Some(e.function))
        .map(|e| e.class)
        .collect();
    let fast = t.elapsed() < Duration::from_secs(1);
    report(
        1,
        "listed netlists simulate to their tables",
        bad.is_empty() && fast,
        format!("{}/48 ok, mismatches {bad:?}", 48 - bad.len()),
        t,
    );
}

#[test]
fn c02_c03_mc_and_unsat_proofs() {
    let t = Instant::now();
    let entries = table();
    let mut wrong = Vec::new();
    let mut unproven = Vec::new();
    let mut sum = 0;
    for e in &entries {
        let (f, _) = e.function.normalize();
        let deg = degree_lower_bound(&f);
        let res = find_mc_direct(&f, deg, &EncodingOptions::all()).unwrap();
        sum += res.mc;
        if res.mc != e.mc {
            wrong.push(e.class);
        }
        if e.mc >= 1 && e.mc - 1 >= deg {
            let unsat = res
                .rounds
                .iter()
                .any(|s| s.r == e.mc - 1 && s.outcome == RoundOutcome::Unsat);
            if !unsat || res.status != Optimality::ProvenOptimal {
                unproven.push(e.class);
            }
        }
    }
    let checked = entries
        .iter()
        .filter(|e| e.mc >= 1 && e.mc - 1 >= degree_lower_bound(&e.function.normalize().0))
        .count();
    report(
        2,
        "MC reproduced for all classes",
        wrong.is_empty() && sum == 162,
        format!("{}/48 match, sum {sum}, mismatches {wrong:?}", 48 - wrong.len()),
        t,
    );
    report(
        3,
        "r = MC-1 is UNSAT",
        unproven.is_empty(),
        format!("{checked} instances checked, failures {unproven:?}"),
        t,
    );
}

#[test]
fn c04_direct_equals_cegar() {
    let t = Instant::now();
    let opts = EncodingOptions::all();
    let mut functions = normal_functions(3);
    functions.extend(table().iter().map(|e| e.function.normalize().0));
    let diffs: Vec<String> = functions
        .iter()
        .filter_map(|f| {
            let deg = degree_lower_bound(f);
            let d = find_mc_direct(f, deg, &opts).unwrap().mc;
            let c = find_mc_cegar(f, deg, &opts).unwrap().mc;
            (d != c).then(|| format!("{f}: {d} vs {c}"))
        })
        .collect();
    report(
        4,
        "direct and CEGAR agree",
        diffs.is_empty(),
        format!("{} functions, differences {diffs:?}", functions.len()),
        t,
    );
}

#[test]
fn c05_lemma_suite() {
    let t = Instant::now();
    let n = 4;
    let l = |s: IndexSet| TruthTable::linear(n, s).unwrap();
    let q = |s: IndexSet, u: IndexSet| {
        TruthTable::from_fn(n, |x| {
            let bits: Vec<bool> = (0..n).map(|i| x >> i & 1 == 1).collect();
            xagmc::boolfunc::eval_quadratic(s, u, &bits).unwrap()
        })
        .unwrap()
    };
    let sets: Vec<IndexSet> = all_sets(n).collect();
    let mut checks = 0usize;
    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool| {
        checks += 1;
        if !ok && failures.len() < 5 {
            failures.push(name.to_string());
        }
    };
    for &a in &sets {
        for &b in &sets {
            if a.is_subset(b) {
                check("lemma 1", l(a) & l(b) == l(a) ^ (l(a) & l(b.difference(a))));
            }
            check("appendix lemma", l(a) & l(a.symmetric_difference(b)) == l(a) ^ (l(a) & l(b)));
            check("linear sum", l(a) ^ l(b) == l(a.symmetric_difference(b)));
            let (i, d) = (a.intersection(b), a.symmetric_difference(b));
            check(
                "product",
                l(a) & l(b) == l(i) ^ q(i, d) ^ q(a.difference(b), b.difference(a)),
            );
            for &c in &sets {
                if a.is_subset(b) && a.is_subset(c) {
                    let lhs = l(a) ^ (l(b) & l(c));
                    let rhs = l(b.difference(a)) ^ (l(b) & l(b.symmetric_difference(c)));
                    check("lemma 2", lhs == rhs);
                }
                if a.is_disjoint(b) && a.is_disjoint(c) && b.is_disjoint(c) {
                    check("quadratic sum", q(a, c) ^ q(b, c) == q(a.union(b), c));
                }
            }
        }
    }
    let fast = t.elapsed() < Duration::from_secs(60);
    report(
        5,
        "lemma and quadratic-form identities over 4 variables",
        failures.is_empty() && fast,
        format!("{checks} identities checked, failures {failures:?}"),
        t,
    );
}

fn abstract_xags(n: usize, r: usize, mut visit: impl FnMut(AbstractXag)) {
    fn go(n: usize, r: usize, steps: &mut Vec<AndStep>, visit: &mut dyn FnMut(AbstractXag)) {
        if steps.len() == r {
            for out in all_sets(n + r) {
                visit(AbstractXag::new(n, steps.clone(), out, false).unwrap());
            }
            return;
        }
        let avail = n + steps.len();
        for s1 in all_sets(avail) {
            for s2 in all_sets(avail) {
                steps.push(AndStep { s1, s2 });
                go(n, r, steps, visit);
                steps.pop();
            }
        }
    }
    go(n, r, &mut Vec::new(), &mut visit);
}

#[test]
fn c06_subset_free_rewrite() {
    let t = Instant::now();
    let mut total = 0usize;
    let mut failures = 0usize;
    for n in 1..=3 {
        for r in 0..=2 {
            abstract_xags(n, r, |net| {
                total += 1;
                let rewritten = net.subset_free_normalize();
                let ok = rewritten.simulate() == net.simulate()
                    && rewritten.num_steps() == net.num_steps()
                    && rewritten.is_subset_free();
                failures += usize::from(!ok);
            });
        }
    }
    report(
        6,
        "subset-free rewrite preserves function and size",
        failures == 0,
        format!("{total} networks, {failures} failures"),
        t,
    );
}

/// Breadth-first search over sets of computed forms.
fn shortest_program(m: &LinearMatrix, max_steps: usize) -> Option<usize> {
    let target: Vec<IndexSet> = m.rows().iter().copied().filter(|r| r.len() >= 2).collect();
    let start: Vec<IndexSet> = (1..=m.cols()).map(IndexSet::singleton).collect();
    let done = |forms: &[IndexSet]| target.iter().all(|r| forms.contains(r));
    let mut level = vec![start];
    for k in 0..=max_steps {
        if level.iter().any(|f| done(f)) {
            return Some(k);
        }
        let mut next = std::collections::HashSet::new();
        for forms in &level {
            for a in 0..forms.len() {
                for b in a + 1..forms.len() {
                    let new = forms[a].symmetric_difference(forms[b]);
                    if new.is_empty() || forms.contains(&new) {
                        continue;
                    }
                    let mut grown = forms.clone();
                    grown.push(new);
                    grown[m.cols()..].sort();
                    next.insert(grown);
                }
            }
        }
        level = next.into_iter().collect();
    }
    None
}

#[test]
fn c07_slp_oracle() {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(7);
    let mut checked = 0;
    let mut mismatches = Vec::new();
    while checked < 200 {
        let cols = rng.gen_range(1..=4);
        let rows: Vec<IndexSet> = (0..rng.gen_range(1..=3))
            .map(|_| (1..=cols).filter(|_| rng.gen_bool(0.5)).collect())
            .collect();
        let m = LinearMatrix::new(cols, rows).unwrap();
        let Some(expected) = shortest_program(&m, 4) else {
            continue;
        };
        checked += 1;
        let got = slp_minimize(&m, SlpOptions::default(), None).unwrap();
        if got.network.num_steps() != expected || !got.network.computes(&m) || !got.proven {
            mismatches.push(format!("{m:?}"));
        }
    }
    let mut rows_ok = true;
    for k in 1..=8 {
        let m = LinearMatrix::new(8, vec![(1..=k).collect()]).unwrap();
        let got = slp_minimize(&m, SlpOptions::default(), None).unwrap();
        rows_ok &= got.network.num_steps() == k - 1;
    }
    let fast = t.elapsed() < Duration::from_secs(600);
    report(
        7,
        "SLP minimum matches brute force",
        mismatches.is_empty() && rows_ok && fast,
        format!(
            "{checked} random matrices, mismatches {mismatches:?}, single rows k-1 {}",
            if rows_ok { "ok" } else { "wrong" }
        ),
        t,
    );
}

#[test]
fn c08_end_to_end_xor() {
    let t = Instant::now();
    let run4 = SynthesisConfig::run4();
    let ite = minimize(&TruthTable::from_hex("d8", 3).unwrap(), &run4).unwrap();
    let ite_ok = ite.network.simulate().to_hex() == "d8"
        && ite.network.and_count() == 1
        && ite.network.xor_count() == 2;
    let e44: ClassTableEntry = table().remove(44);
    let listed = e44.xag().unwrap();
    let c44 = minimize(&e44.function, &run4).unwrap();
    let c44_ok = c44.network.simulate() == e44.function
        && c44.network.and_count() == 2
        && c44.network.xor_count() == listed.xor_count();
    report(
        8,
        "run-4 XOR optimization end to end",
        ite_ok && c44_ok,
        format!(
            "ITE {} AND {} XOR; class 44 {} AND {} XOR (listed netlist has {} XOR)",
            ite.network.and_count(),
            ite.network.xor_count(),
            c44.network.and_count(),
            c44.network.xor_count(),
            listed.xor_count()
        ),
        t,
    );
}

#[test]
fn c09_run4_totals() {
    let t = Instant::now();
    let run4 = SynthesisConfig::run4();
    let (mut and, mut xor, mut wrong) = (0, 0, 0);
    for e in table() {
        let m = minimize(&e.function, &run4).unwrap();
        wrong += usize::from(m.network.simulate() != e.function);
        and += m.network.and_count();
        xor += m.network.xor_count();
    }
    report(
        9,
        "run-4 totals over all classes",
        and == 162 && xor <= 245 && wrong == 0,
        format!("AND {and}, XOR {xor} (bound 245), {wrong} wrong networks"),
        t,
    );
}

#[test]
fn c10_families_sound() {
    let t = Instant::now();
    let functions = normal_functions(3);
    let reference: Vec<usize> = functions
        .iter()
        .map(|f| mc_direct(f, &EncodingOptions::none()))
        .collect();
    let mut diffs = Vec::new();
    for family in ConstraintFamily::ALL {
        for opts in [
            EncodingOptions::only(family),
            EncodingOptions::all().with(family, false),
        ] {
            for (f, &mc) in functions.iter().zip(&reference) {
                if mc_direct(f, &opts) != mc {
                    diffs.push(format!("{} {f}", family.name()));
                }
            }
        }
    }
    report(
        10,
        "each constraint family toggled alone keeps MC",
        diffs.is_empty(),
        format!("{} functions x 12 settings, differences {diffs:?}", functions.len()),
        t,
    );
}
