//! Acceptance suite: one test per criterion, each printing a pass line with
//! its headline numbers (run with `--nocapture` to see them).
//!
//! Covered criteria:
//! 1. canonical-tree reconstruction is exact and unique on every all-essential
//!    read-once target over the two-input basis at n = 2..4, plus a 500-target
//!    random sample at n = 5, under five minutes;
//! 2. the 2-essentiality square-set test is a checking test of size at most
//!    4*C(n,2) for the same targets;
//! 3. the modeled equivalence oracle agrees with the direct one on 2000
//!    random pairs at n <= 6, within its query caps (bisection included);
//! 4. the identity-query-only learner identifies every non-constant monotone
//!    read-once target at n <= 5 within 4n^3 + 4n identity queries and no
//!    other query kinds;
//! 5. the subcube-identity/necessity/possibility adapters agree exhaustively
//!    with the direct oracles at n <= 4, two underlying queries per call;
//! 6. the threshold-family adversary bound holds at n = 2, 4, 6 (exhaustive
//!    one-elimination check, 500 random strategies below the budget keep two
//!    candidates alive, one equivalence query identifies), under two minutes;
//! 7. no sampled monotone threshold function is discriminatory, the
//!    fictitious-cascade property holds, and the brute-force 3-variable
//!    search reproduces the frozen discriminatory witness;
//! 8. candidate elimination with simulated equivalence queries identifies
//!    every target at n <= 4 with zero real equivalence queries, matching the
//!    unsimulated run, within the per-round caps.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use roql::checking::{
    binomial, build_hypercube_set, checking_test_for, is_discriminatory, verify_checking_test,
};
use roql::formula::{
    canonicalize_b2, parse_formula, Basis, CanonicalTree, FormulaNode, ReadOnceFormula,
};
use roql::learner::{
    learn_monotone_si, learn_via_equivalence_traced, random_canonical_tree, reconstruct_b2,
    CandidateSet,
};
use roql::lowerbound::{
    kn_family, run_adversary_experiment, AdversaryState, RandomStrategy, ThresholdFunction,
};
use roql::oracle::{
    bisect, equivalence_from_m_si, necessity_from_si_m, possibility_from_si_m, si_from_np, Answer,
    OracleSession, Query, QueryKind,
};
use roql::truth::{PartialAssignment, TotalAssignment, TruthTable, VarIndex, VarSet};

fn all_essential_targets(basis: &Basis, n: usize) -> Vec<TruthTable> {
    CandidateSet::enumerate(basis, n)
        .unwrap()
        .tables()
        .filter(|t| t.essential_vars() == VarSet::full(n))
        .cloned()
        .collect()
}

fn random_full_tree(rng: &mut ChaCha8Rng, n: usize) -> CanonicalTree {
    let vars: Vec<VarIndex> = (0..n).map(VarIndex).collect();
    CanonicalTree::Node(random_canonical_tree(rng, &vars, None))
}

/// Wrap a formula in double negation: structurally distinct, same function.
fn double_negate(f: &ReadOnceFormula, basis: &Basis) -> ReadOnceFormula {
    let not = basis
        .lookup(&TruthTable::from_bits_u64(1, 0b01).unwrap())
        .cloned()
        .expect("negation in basis");
    let inner = FormulaNode::Gate { func: not.clone(), children: vec![f.root().clone()] };
    let root = FormulaNode::Gate { func: not, children: vec![inner] };
    ReadOnceFormula::new(f.arity(), root).unwrap()
}

#[test]
fn criterion_1_reconstruction_exact_and_unique() {
    let started = Instant::now();
    let b2 = Basis::b2();
    let mut targets_run = 0usize;

    for n in 2..=4usize {
        let candidates = CandidateSet::enumerate(&b2, n).unwrap();
        for (table, first_witness) in candidates.items() {
            if table.essential_vars() != VarSet::full(n) {
                continue;
            }
            let mut session = OracleSession::new(table.clone());
            let tree = reconstruct_b2(&mut session, n).unwrap();
            assert_eq!(&tree.truth_table(n).unwrap(), table);
            tree.check_conditions().unwrap();

            // uniqueness: structurally distinct formulas with this table
            // canonicalize to the reconstructed tree
            assert_eq!(canonicalize_b2(first_witness).unwrap(), tree);
            if let Some(second) = candidates.second_witness(table) {
                assert_ne!(second, first_witness);
                assert_eq!(canonicalize_b2(second).unwrap(), tree);
            }
            targets_run += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..500 {
        let n = 5;
        let reference = random_full_tree(&mut rng, n);
        let table = reference.truth_table(n).unwrap();
        let mut session = OracleSession::new(table.clone());
        let tree = reconstruct_b2(&mut session, n).unwrap();
        tree.check_conditions().unwrap();
        assert_eq!(tree.truth_table(n).unwrap(), table);
        // the generating tree is canonical, so reconstruction must return it
        assert_eq!(tree, reference);
        // uniqueness through two distinct formula encodings
        let formula = reference.to_formula(n, &b2).unwrap();
        let variant = double_negate(&formula, &b2);
        assert_ne!(formula, variant);
        assert_eq!(canonicalize_b2(&formula).unwrap(), tree);
        assert_eq!(canonicalize_b2(&variant).unwrap(), tree);
        targets_run += 1;
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "criterion 1 exceeded five minutes: {elapsed:?}");
    println!(
        "criterion 1 (reconstruction exact + unique, n=2..4 exhaustive, 500 at n=5): \
         PASS ({targets_run} targets in {elapsed:.2?})"
    );
}

#[test]
fn criterion_2_checking_test_bound() {
    let b2 = Basis::b2();
    let mut targets_run = 0usize;
    let mut max_size = 0usize;

    let mut check = |table: &TruthTable, n: usize| {
        let set = build_hypercube_set(table, 2);
        assert_eq!(set.len(), binomial(n, 2), "squares exist for every pair");
        let test = set.checking_test(table).unwrap();
        assert!(test.len() <= 4 * binomial(n, 2), "size bound is exact");
        assert!(verify_checking_test(&test, &b2, n, table).unwrap());
        max_size = max_size.max(test.len());
        targets_run += 1;
    };

    for n in 2..=4usize {
        for table in all_essential_targets(&b2, n) {
            check(&table, n);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..500 {
        let table = random_full_tree(&mut rng, 5).truth_table(5).unwrap();
        check(&table, 5);
    }

    println!(
        "criterion 2 (square-set checking tests, size <= 4*C(n,2)): \
         PASS ({targets_run} targets, max size {max_size}, bound at n=5 is {})",
        4 * binomial(5, 2)
    );
}

#[test]
fn criterion_3_equivalence_modeling_fidelity() {
    let b2 = Basis::b2();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut yes_count = 0usize;

    for round in 0..2000usize {
        let n = 1 + (round % 6); // arities 1..=6
        let target = {
            let f = roql::learner::random_read_once_formula(&mut rng, n, &b2).unwrap();
            f.truth_table().unwrap()
        };
        let hypothesis = roql::learner::random_read_once_formula(&mut rng, n, &b2).unwrap();

        let mut session = OracleSession::new(target.clone());
        let modeled =
            equivalence_from_m_si(&mut session, &hypothesis, |t| checking_test_for(t, 2)).unwrap();

        let mut direct_session = OracleSession::new(target.clone()).with_basis(b2.clone());
        let direct =
            direct_session.answer(&Query::Equivalence(hypothesis.clone())).unwrap();

        match (&modeled, &direct) {
            (Answer::EquivalenceYes, Answer::EquivalenceYes) => yes_count += 1,
            (Answer::Counterexample(y), Answer::Counterexample(_)) => {
                assert_ne!(
                    target.get(y.bits()),
                    hypothesis.eval(y).unwrap(),
                    "counterexamples disagree with the hypothesis"
                );
            }
            other => panic!("modeled and direct oracles disagree: {other:?}"),
        }

        let c = session.counters();
        let cap_m = (4 * binomial(n, 2) + n + 1) as u64;
        let cap_si = (4 * binomial(n, 2) + 2 * n) as u64;
        assert!(c.membership <= cap_m, "membership {} over cap {cap_m} at n={n}", c.membership);
        assert!(c.si <= cap_si, "identity {} over cap {cap_si} at n={n}", c.si);
        assert_eq!(c.necessity + c.possibility + c.parity + c.equivalence, 0);
    }

    // bisection caps on random non-constant subcubes
    let mut bisect_runs = 0usize;
    'outer: for round in 0..4000usize {
        let n = 1 + (round % 6);
        let table = TruthTable::from_fn(n, |_| rng.gen_bool(0.5)).unwrap();
        let fixed = rng.gen_range(0..1u64 << n);
        let values = rng.gen_range(0..1u64 << n);
        let p = PartialAssignment::new(n, VarSet(fixed), values);
        if table.project(&p).unwrap().is_constant().is_some() {
            continue;
        }
        let c = rng.gen_bool(0.5);
        let mut session = OracleSession::new(table.clone());
        let y = bisect(&mut session, &p, c).unwrap();
        assert!(p.is_extended_by(&y));
        assert_ne!(table.get(y.bits()), c);
        let stars = p.star_count() as u64;
        assert!(session.counters().si <= 2 * stars);
        assert!(session.counters().membership <= stars + 1);
        bisect_runs += 1;
        if bisect_runs >= 1000 {
            break 'outer;
        }
    }
    assert!(bisect_runs >= 500);

    println!(
        "criterion 3 (modeled equivalence fidelity, 2000 pairs, n<=6): \
         PASS ({yes_count} equivalences, {bisect_runs} bisection runs within caps)"
    );
}

#[test]
fn criterion_4_monotone_identity_only_learning() {
    let and_or = Basis::and_or();
    let mut targets_run = 0usize;
    let mut max_ratio = 0f64;

    for n in 1..=5usize {
        let cap = (4 * n * n * n + 4 * n) as u64;
        for (table, _) in CandidateSet::enumerate(&and_or, n).unwrap().items() {
            assert_eq!(table.is_constant(), None, "no constants over this basis");
            let mut session =
                OracleSession::with_allowed(table.clone(), &[QueryKind::SubcubeIdentity]);
            let tree = learn_monotone_si(&mut session, n).unwrap();
            assert_eq!(&tree.truth_table(n).unwrap(), table);
            let c = session.counters();
            assert_eq!(c.total(), c.si, "identity queries are the only kind used");
            assert!(c.si <= cap, "{} identity queries over cap {cap} at n={n}", c.si);
            max_ratio = max_ratio.max(c.si as f64 / cap as f64);
            targets_run += 1;
        }
    }

    println!(
        "criterion 4 (identity-only monotone learning, n<=5, cap 4n^3+4n): \
         PASS ({targets_run} targets, worst cap usage {:.0}%)",
        max_ratio * 100.0
    );
}

#[test]
fn criterion_5_adapters_agree_exhaustively() {
    let b2 = Basis::b2();
    let mut calls = 0u64;

    for n in 0..=4usize {
        let patterns: Vec<PartialAssignment> = all_partial_assignments(n);
        for table in CandidateSet::enumerate(&b2, n).unwrap().tables() {
            for p in &patterns {
                let mut direct = OracleSession::new(table.clone());
                let si = direct.answer(&Query::SubcubeIdentity(*p)).unwrap();
                let nec = direct.answer(&Query::Necessity(*p)).unwrap();
                let pos = direct.answer(&Query::Possibility(*p)).unwrap();

                let mut s = OracleSession::new(table.clone());
                assert_eq!(si_from_np(&mut s, p).unwrap(), si);
                assert!(s.counters().total() <= 2);

                let mut s = OracleSession::new(table.clone());
                assert_eq!(necessity_from_si_m(&mut s, p).unwrap(), nec);
                assert!(s.counters().total() <= 2);

                let mut s = OracleSession::new(table.clone());
                assert_eq!(possibility_from_si_m(&mut s, p).unwrap(), pos);
                assert!(s.counters().total() <= 2);

                calls += 3;
            }
        }
    }

    println!(
        "criterion 5 (query adapters agree with direct oracles, exhaustive n<=4): \
         PASS ({calls} adapter calls, each within two underlying queries)"
    );
}

fn all_partial_assignments(n: usize) -> Vec<PartialAssignment> {
    let mut out = Vec::new();
    let mut digits = vec![0u8; n];
    loop {
        let mut fixed = VarSet::EMPTY;
        let mut values = 0u64;
        for (i, &d) in digits.iter().enumerate() {
            match d {
                0 => {}
                1 => fixed.insert(VarIndex(i)),
                2 => {
                    fixed.insert(VarIndex(i));
                    values |= 1 << i;
                }
                _ => unreachable!(),
            }
        }
        out.push(PartialAssignment::new(n, fixed, values));
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            digits[k] += 1;
            if digits[k] < 3 {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn criterion_6_adversary_lower_bound() {
    let started = Instant::now();

    for n in [2usize, 4, 6] {
        let k = n / 2;
        let cnk = binomial(n, k);
        let family = kn_family(n).unwrap();

        // exhaustive membership queries: at most one elimination each
        for bits in 0..1u64 << n {
            let mut st = AdversaryState::new(family.clone()).unwrap();
            let before = st.surviving();
            st.answer(&Query::Membership(TotalAssignment::new(n, bits))).unwrap();
            assert!(before - st.surviving() <= 1);
        }

        // exhaustive subcube identity patterns: at most one elimination, and
        // any elimination needs a unique weight-k total extension
        for p in all_partial_assignments(n) {
            let mut st = AdversaryState::new(family.clone()).unwrap();
            let before = st.surviving();
            st.answer(&Query::SubcubeIdentity(p)).unwrap();
            let eliminated = before - st.surviving();
            assert!(eliminated <= 1);
            if eliminated == 1 {
                let k_weight = p
                    .total_extensions()
                    .iter()
                    .filter(|a| a.weight() == k)
                    .count();
                assert_eq!(k_weight, 1, "eliminating query has a unique weight-k extension");
            }
        }

        // 500 random adaptive strategies under the budget keep two alive
        for run in 0..500u64 {
            let rng = ChaCha8Rng::seed_from_u64(0x5eed_0006 ^ (run << 8) ^ n as u64);
            let mut strat = RandomStrategy::new(rng);
            let res = run_adversary_experiment(&mut strat, n, cnk - 1).unwrap();
            assert!(res.survivors >= 2, "run {run} at n={n} left {}", res.survivors);
        }

        assert_eq!(roql::lowerbound::eq_identifies_kn(n).unwrap(), 1);
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "criterion 6 exceeded two minutes: {elapsed:?}");
    println!(
        "criterion 6 (adversary bound at n=2,4,6; exhaustive + 1500 runs): \
         PASS (in {elapsed:.2?})"
    );
}

/// Frozen by the brute-force search over all fully essential 3-variable
/// functions in ascending table order: 24 discriminatory functions exist;
/// the first is 0x1b (x1 selecting between ~x3 and ~x2) with witness {x1}.
const FIRST_DISCRIMINATORY_3VAR: u64 = 0x1b;
const DISCRIMINATORY_3VAR_COUNT: usize = 24;

#[test]
fn criterion_7_no_threshold_function_is_discriminatory() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let mut cascade_checked = 0usize;
    let mut discriminatory_checked = 0usize;

    for n in 3..=6usize {
        for _ in 0..1000 {
            let weights: Vec<_> = (0..n)
                .map(|_| {
                    num_rational_ratio(rng.gen_range(0..=8), rng.gen_range(1..=4))
                })
                .collect();
            let total: roql::lowerbound::Weight = weights.iter().copied().sum();
            let threshold = total * num_rational_ratio(rng.gen_range(1..=7) as i64, 8);
            let f = ThresholdFunction::new(weights.clone(), threshold);
            let table = f.truth_table().unwrap();

            // fictitious-variable cascade: a fictitious variable drags every
            // variable of smaller-or-equal weight with it
            let essential = table.essential_vars();
            for i in 0..n {
                if !essential.contains(VarIndex(i)) {
                    for j in 0..n {
                        if weights[j] <= weights[i] {
                            assert!(
                                !essential.contains(VarIndex(j)),
                                "cascade violated: x{} fictitious but x{} essential",
                                i + 1,
                                j + 1
                            );
                        }
                    }
                    cascade_checked += 1;
                }
            }

            // discriminatory search runs on the essential projection (the
            // search requires all variables essential)
            let core = table.essential_projection();
            if core.arity() >= 1 && core.is_constant().is_none() {
                assert_eq!(is_discriminatory(&core).unwrap(), None);
                discriminatory_checked += 1;
            }
        }
    }

    // positive control: the brute-force search over 3-variable functions
    // does find discriminatory functions, reproducing the frozen fixture
    let mut found = Vec::new();
    for bits in 0..256u64 {
        let f = TruthTable::from_bits_u64(3, bits).unwrap();
        if f.essential_vars() != VarSet::full(3) {
            continue;
        }
        if let Some(witness) = is_discriminatory(&f).unwrap() {
            found.push((bits, witness));
        }
    }
    assert_eq!(found.len(), DISCRIMINATORY_3VAR_COUNT);
    assert_eq!(found[0].0, FIRST_DISCRIMINATORY_3VAR);
    assert_eq!(found[0].1, VarSet::singleton(VarIndex(0)));

    println!(
        "criterion 7 (threshold functions are never discriminatory): \
         PASS ({discriminatory_checked} projections checked, {cascade_checked} cascades, \
         3-var control reproduces table {FIRST_DISCRIMINATORY_3VAR:#04x})"
    );
}

fn num_rational_ratio(num: i64, den: i64) -> roql::lowerbound::Weight {
    roql::lowerbound::Weight::new(num, den)
}

#[test]
fn criterion_8_simulated_equivalence_learning() {
    let b2 = Basis::b2();
    let mut targets_run = 0usize;

    for n in 0..=4usize {
        let cap_m_per_round = (4 * binomial(n, 2) + n + 1) as u64;
        let cap_si_per_round = (4 * binomial(n, 2) + 2 * n) as u64;
        for (table, _) in CandidateSet::enumerate(&b2, n).unwrap().items() {
            let mut sim_session = OracleSession::with_allowed(
                table.clone(),
                &[QueryKind::Membership, QueryKind::SubcubeIdentity, QueryKind::Equivalence],
            )
            .with_basis(b2.clone());
            let (sim_formula, rounds) =
                learn_via_equivalence_traced(&mut sim_session, &b2, n, true).unwrap();
            let c = sim_session.counters();
            assert_eq!(c.equivalence, 0, "simulation never asks a real equivalence query");
            assert!(c.membership <= rounds * cap_m_per_round);
            assert!(c.si <= rounds * cap_si_per_round);
            assert_eq!(&sim_formula.truth_table().unwrap(), table);

            let mut real_session =
                OracleSession::new(table.clone()).with_basis(b2.clone());
            let (real_formula, _) =
                learn_via_equivalence_traced(&mut real_session, &b2, n, false).unwrap();
            assert_eq!(
                sim_formula.truth_table().unwrap(),
                real_formula.truth_table().unwrap(),
                "simulated and direct drivers identify the same function"
            );
            targets_run += 1;
        }
    }

    println!(
        "criterion 8 (candidate elimination over simulated equivalence, n<=4): \
         PASS ({targets_run} targets, zero real equivalence queries)"
    );
}
