//! Executable property suites with seeded trials and greedy counterexample
//! shrinking.
//!
//! Each suite turns one family of metric laws into a falsification harness:
//! axioms (identity, triangle, symmetry, boundedness), kernel coincidence
//! against the direct quantifier deciders, the scheduler/approach spectrum,
//! (strict) non-expansiveness under parallel composition, backward
//! compatibility on the restricted classes, and engine cross-checks.
//!
//! Testing-metric laws that relate different semantics hold for the full
//! class of tests but not for an arbitrary fixed suite, so those checks run
//! on constructed suites (trace chains, dead-duplicated chains, pruning
//! closures) under which each law is a theorem.

use crate::achievable::{achievable_set, max_trace_prob, AchievableSet};
use crate::compose::{graph_equal_under, parallel_compose};
use crate::format::emit_process;
use crate::gen::{generate_random_npt, generate_random_pts, GenParams, SystemClass};
use crate::mdp::{dp_acyclic, opt_success_prob, Objective};
use crate::npt::build_interaction_system;
use crate::pts::{Pts, StateId};
use crate::rat::Rat;
use crate::relations::{
    check_backward_compat, check_relation, direct_preorder, disjoint_union, strict_bound,
    RelationKind, RelationQuery, RelationSemantics,
};
use crate::resolution::{
    enumerate_det_resolutions, realizable_trace_trie, trace_distribution, SchedulerClass,
    SchedulerMode,
};
use crate::testing_metrics::{
    pruning_closure, testing_distance, trace_suite, TestSuite, TestingApproach, TestingMetricSpec,
};
use crate::trace_metrics::{trace_distance, Direction, TraceApproach, TraceMetricSpec};
use crate::{Caps, Result};

/// A named suite of properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Axioms,
    Kernels,
    Spectrum,
    SupCollapse,
    NonExpansive,
    Backward,
    RoundTrip,
    /// A deliberately corrupted law; must fail. Validates the harness.
    SelfTestCorrupt,
}

impl Suite {
    pub fn all() -> &'static [Suite] {
        &[
            Suite::Axioms,
            Suite::Kernels,
            Suite::Spectrum,
            Suite::SupCollapse,
            Suite::NonExpansive,
            Suite::Backward,
            Suite::RoundTrip,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Kernels => "kernels",
            Suite::Spectrum => "spectrum",
            Suite::SupCollapse => "sup-collapse",
            Suite::NonExpansive => "nonexpansive",
            Suite::Backward => "backward",
            Suite::RoundTrip => "roundtrip",
            Suite::SelfTestCorrupt => "selftest-corrupt",
        }
    }

    pub fn by_name(name: &str) -> Option<Suite> {
        match name {
            "axioms" => Some(Suite::Axioms),
            "kernels" => Some(Suite::Kernels),
            "spectrum" => Some(Suite::Spectrum),
            "sup-collapse" => Some(Suite::SupCollapse),
            "nonexpansive" => Some(Suite::NonExpansive),
            "backward" => Some(Suite::Backward),
            "roundtrip" => Some(Suite::RoundTrip),
            "selftest-corrupt" => Some(Suite::SelfTestCorrupt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FailureReport {
    pub seed: u64,
    pub description: String,
    /// The shrunk counterexample, in the model text format.
    pub counterexample: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub trials: usize,
    pub passes: usize,
    pub failures: Vec<FailureReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The depth every suite works at.
const DEPTH: usize = 2;

fn caps() -> Caps {
    Caps::default()
}

type Predicate<'a> = dyn Fn(&Pts) -> Option<String> + 'a;

/// Greedy shrinking: drop transitions, drop states (beyond the two roots),
/// collapse distributions to their heaviest point, as long as the predicate
/// keeps failing.
fn shrink(p: &Pts, predicate: &Predicate) -> Pts {
    let mut current = p.clone();
    let budget = 400;
    let mut spent = 0;
    loop {
        let mut improved = false;
        for candidate in shrink_candidates(&current) {
            spent += 1;
            if spent > budget {
                return current;
            }
            if predicate(&candidate).is_some() {
                current = candidate;
                improved = true;
                break;
            }
        }
        if !improved {
            return current;
        }
    }
}

fn pts_raw(p: &Pts) -> (Vec<String>, Vec<String>, usize, Vec<(usize, usize, Vec<(usize, Rat)>)>) {
    let states = p.state_names().to_vec();
    let actions = p.action_names().to_vec();
    let mut triples = Vec::new();
    for s in p.states() {
        for t in p.transitions_from(s) {
            triples.push((
                s.0,
                t.label.0,
                t.target.iter().map(|(c, pr)| (c.0, pr.clone())).collect(),
            ));
        }
    }
    (states, actions, p.root().0, triples)
}

fn shrink_candidates(p: &Pts) -> Vec<Pts> {
    let (states, actions, root, triples) = pts_raw(p);
    let mut out = Vec::new();
    // Drop one transition.
    for i in 0..triples.len() {
        let mut t = triples.clone();
        t.remove(i);
        if let Ok(q) = Pts::new(p.name(), states.clone(), actions.clone(), root, t) {
            out.push(q);
        }
    }
    // Collapse one distribution to its heaviest point.
    for i in 0..triples.len() {
        if triples[i].2.len() > 1 {
            let mut t = triples.clone();
            let heaviest = t[i]
                .2
                .iter()
                .max_by(|a, b| a.1.cmp(&b.1))
                .map(|(s, _)| *s)
                .unwrap();
            t[i].2 = vec![(heaviest, Rat::one())];
            // Collapsing may create a duplicate transition; validation then
            // rejects the candidate, which is fine.
            if let Ok(q) = Pts::new(p.name(), states.clone(), actions.clone(), root, t) {
                out.push(q);
            }
        }
    }
    // Drop one non-root state and everything touching it.
    for dead in 2..states.len() {
        let mut new_states = states.clone();
        new_states.remove(dead);
        let remap = |s: usize| if s > dead { s - 1 } else { s };
        let mut t = Vec::new();
        for (src, lbl, dist) in &triples {
            if *src == dead || dist.iter().any(|(c, _)| *c == dead) {
                continue;
            }
            t.push((
                remap(*src),
                *lbl,
                dist.iter().map(|(c, pr)| (remap(*c), pr.clone())).collect(),
            ));
        }
        if let Ok(q) = Pts::new(p.name(), new_states, actions.clone(), remap(root), t) {
            out.push(q);
        }
    }
    out
}

fn run_trials(
    suite: Suite,
    trials: usize,
    base: &GenParams,
    check: impl Fn(&Pts, StateId, StateId, u64) -> Option<String>,
) -> SuiteReport {
    let mut passes = 0;
    let mut failures = Vec::new();
    for i in 0..trials {
        let seed = base.seed.wrapping_add(i as u64);
        let params = base.clone().with_seed(seed);
        let (p, r0, r1) = match generate_random_pts(&params) {
            Ok(x) => x,
            Err(e) => {
                failures.push(FailureReport {
                    seed,
                    description: format!("generator error: {e}"),
                    counterexample: String::new(),
                });
                continue;
            }
        };
        match check(&p, r0, r1, seed) {
            None => passes += 1,
            Some(description) => {
                let predicate = |q: &Pts| -> Option<String> {
                    if q.num_states() < 2 {
                        return None;
                    }
                    check(q, StateId(0), StateId(1), seed)
                };
                let shrunk = shrink(&p, &predicate);
                let final_desc = predicate(&shrunk).unwrap_or(description);
                failures.push(FailureReport {
                    seed,
                    description: final_desc,
                    counterexample: emit_process(&shrunk),
                });
            }
        }
    }
    SuiteReport {
        suite: suite.name(),
        trials,
        passes,
        failures,
    }
}

fn trace_specs() -> Vec<TraceMetricSpec> {
    let mut out = Vec::new();
    for approach in [TraceApproach::Dis, TraceApproach::Tbt, TraceApproach::Sup] {
        for sched in [SchedulerClass::Det, SchedulerClass::Rand] {
            out.push(TraceMetricSpec::new(
                approach,
                sched,
                Rat::new(1, 2),
                DEPTH,
            ));
        }
    }
    out
}

fn testing_specs() -> Vec<TestingMetricSpec> {
    let mut out = Vec::new();
    for approach in [
        TestingApproach::May,
        TestingApproach::Must,
        TestingApproach::MayMust,
        TestingApproach::Tbt,
        TestingApproach::Sup,
    ] {
        for sched in [SchedulerClass::Det, SchedulerClass::Rand] {
            out.push(
                TestingMetricSpec::new(approach, sched).with_lambda_depth(Rat::one(), DEPTH),
            );
        }
    }
    out
}

fn random_suite(p: &Pts, seed: u64) -> TestSuite {
    let mut suite = TestSuite::new();
    for k in 0..2u64 {
        let params = GenParams {
            max_states: 3,
            max_transitions_per_state: 2,
            max_support: 2,
            denominator_bound: 2,
            ..GenParams::default().with_seed(seed.wrapping_mul(31).wrapping_add(k))
        };
        if let Ok(mut npt) = generate_random_npt(p, &params) {
            // Names must be unique within a suite.
            let (states, actions, root, triples) = pts_raw(npt.pts());
            let renamed = Pts::new(format!("t{k}"), states, actions, root, triples).unwrap();
            npt = crate::npt::Npt::new(renamed, npt.success()).unwrap();
            let _ = suite.push(npt);
        }
    }
    suite
}

fn hemi(p: &Pts, a: StateId, b: StateId, spec: &TraceMetricSpec) -> Result<Rat> {
    let mut spec = spec.clone();
    spec.direction = Direction::LeftHemi;
    Ok(trace_distance(p, a, b, &spec, &caps())?.value)
}

fn te_hemi(
    p: &Pts,
    a: StateId,
    b: StateId,
    suite: &TestSuite,
    spec: &TestingMetricSpec,
) -> Result<Rat> {
    let mut spec = spec.clone();
    spec.direction = Direction::LeftHemi;
    Ok(testing_distance(p, a, b, suite, &spec, &caps())?.value)
}

fn axioms_check(p: &Pts, s: StateId, t: StateId, seed: u64) -> Option<String> {
    let u = if p.num_states() > 2 { StateId(2) } else { s };
    let go = || -> Result<Option<String>> {
        for spec in trace_specs() {
            let name = format!("trace {}/{}", spec.approach.as_str(), spec.scheduler.as_str());
            let d_ss = hemi(p, s, s, &spec)?;
            if !d_ss.is_zero() {
                return Ok(Some(format!("{name}: h(s,s) = {d_ss} ≠ 0")));
            }
            let d_st = hemi(p, s, t, &spec)?;
            let d_su = hemi(p, s, u, &spec)?;
            let d_ut = hemi(p, u, t, &spec)?;
            if d_st > &d_su + &d_ut {
                return Ok(Some(format!(
                    "{name}: triangle fails: {d_st} > {d_su} + {d_ut}"
                )));
            }
            if !d_st.is_unit() {
                return Ok(Some(format!("{name}: h(s,t) = {d_st} outside [0,1]")));
            }
            let m_st = trace_distance(p, s, t, &spec, &caps())?.value;
            let m_ts = trace_distance(p, t, s, &spec, &caps())?.value;
            if m_st != m_ts {
                return Ok(Some(format!("{name}: pseudometric asymmetric")));
            }
        }
        let suite = random_suite(p, seed);
        for spec in testing_specs() {
            let name = format!("testing {}/{}", spec.approach.as_str(), spec.scheduler.as_str());
            let d_ss = te_hemi(p, s, s, &suite, &spec)?;
            if !d_ss.is_zero() {
                return Ok(Some(format!("{name}: h(s,s) = {d_ss} ≠ 0")));
            }
            let d_st = te_hemi(p, s, t, &suite, &spec)?;
            let d_su = te_hemi(p, s, u, &suite, &spec)?;
            let d_ut = te_hemi(p, u, t, &suite, &spec)?;
            if d_st > &d_su + &d_ut {
                return Ok(Some(format!(
                    "{name}: triangle fails: {d_st} > {d_su} + {d_ut}"
                )));
            }
            if !d_st.is_unit() {
                return Ok(Some(format!("{name}: h(s,t) = {d_st} outside [0,1]")));
            }
            let m_st = testing_distance(p, s, t, &suite, &spec, &caps())?.value;
            let m_ts = testing_distance(p, t, s, &suite, &spec, &caps())?.value;
            if m_st != m_ts {
                return Ok(Some(format!("{name}: pseudometric asymmetric")));
            }
        }
        Ok(None)
    };
    flatten(go())
}

fn kernels_check(p: &Pts, s: StateId, t: StateId, seed: u64) -> Option<String> {
    let go = || -> Result<Option<String>> {
        // Depth-exact horizon: structural depth of the deepest root.
        let depth = [s, t]
            .iter()
            .filter_map(|&r| p.structure_info(r).depth)
            .max()
            .unwrap_or(DEPTH)
            .max(1);
        let suite = random_suite(p, seed);
        let all = [
            RelationSemantics::TrDis,
            RelationSemantics::TrTbt,
            RelationSemantics::TrSup,
            RelationSemantics::TeMay,
            RelationSemantics::TeMust,
            RelationSemantics::TeMayMust,
            RelationSemantics::TeTbt,
            RelationSemantics::TeSup,
        ];
        // Exercise the reflexive (zero-distance) side too.
        let pairs = [(s, t), (s, s)];
        for semantics in all {
            for sched in [SchedulerClass::Det, SchedulerClass::Rand] {
                for (a, b) in pairs {
                    let suite_opt = semantics.is_testing().then_some(&suite);
                    let query = RelationQuery {
                        semantics,
                        kind: RelationKind::Preorder,
                        scheduler: sched,
                        depth,
                    };
                    let metric = check_relation(p, a, b, &query, suite_opt, &caps())?.holds;
                    let direct =
                        direct_preorder(p, a, b, semantics, sched, depth, suite_opt, &caps())?;
                    if metric != direct {
                        return Ok(Some(format!(
                            "kernel mismatch for {} ({}) on ({},{}): metric {metric}, direct {direct}",
                            semantics.as_str(),
                            sched.as_str(),
                            p.state_name(a),
                            p.state_name(b),
                        )));
                    }
                }
            }
        }
        Ok(None)
    };
    flatten(go())
}

fn spectrum_check(p: &Pts, s: StateId, t: StateId, seed: u64) -> Option<String> {
    let go = || -> Result<Option<String>> {
        let lambda = Rat::one();
        let spec = |a, x| TraceMetricSpec::new(a, x, lambda.clone(), DEPTH);
        // Trace side: tbt below dis per scheduler; rand below det per approach.
        for x in [SchedulerClass::Det, SchedulerClass::Rand] {
            let tbt = hemi(p, s, t, &spec(TraceApproach::Tbt, x))?;
            let dis = hemi(p, s, t, &spec(TraceApproach::Dis, x))?;
            if tbt > dis {
                return Ok(Some(format!(
                    "trace spectrum: tbt {tbt} above dis {dis} under {}",
                    x.as_str()
                )));
            }
        }
        for a in [TraceApproach::Dis, TraceApproach::Tbt] {
            let rand = hemi(p, s, t, &spec(a, SchedulerClass::Rand))?;
            let det = hemi(p, s, t, &spec(a, SchedulerClass::Det))?;
            if rand > det {
                return Ok(Some(format!(
                    "trace spectrum: {} randomized {rand} above deterministic {det}",
                    a.as_str()
                )));
            }
        }
        // Testing side over a random suite: scheduler collapse and may/must
        // below their combination, supremal below trace-by-trace.
        let suite = random_suite(p, seed);
        let tspec = |a, x| TestingMetricSpec::new(a, x).with_lambda_depth(lambda.clone(), DEPTH);
        for a in [
            TestingApproach::May,
            TestingApproach::Must,
            TestingApproach::MayMust,
            TestingApproach::Sup,
        ] {
            let d = te_hemi(p, s, t, &suite, &tspec(a, SchedulerClass::Det))?;
            let r = te_hemi(p, s, t, &suite, &tspec(a, SchedulerClass::Rand))?;
            if d != r {
                return Ok(Some(format!(
                    "testing spectrum: {} differs across schedulers: {d} vs {r}",
                    a.as_str()
                )));
            }
        }
        let tbt_r = te_hemi(p, s, t, &suite, &tspec(TestingApproach::Tbt, SchedulerClass::Rand))?;
        let tbt_d = te_hemi(p, s, t, &suite, &tspec(TestingApproach::Tbt, SchedulerClass::Det))?;
        if tbt_r > tbt_d {
            return Ok(Some(format!(
                "testing spectrum: randomized tbt {tbt_r} above deterministic {tbt_d}"
            )));
        }
        for x in [SchedulerClass::Det, SchedulerClass::Rand] {
            let may = te_hemi(p, s, t, &suite, &tspec(TestingApproach::May, x))?;
            let must = te_hemi(p, s, t, &suite, &tspec(TestingApproach::Must, x))?;
            let mm = te_hemi(p, s, t, &suite, &tspec(TestingApproach::MayMust, x))?;
            if may > mm || must > mm {
                return Ok(Some("testing spectrum: may/must above their max".to_string()));
            }
            let sup = te_hemi(p, s, t, &suite, &tspec(TestingApproach::Sup, x))?;
            let tbt = te_hemi(p, s, t, &suite, &tspec(TestingApproach::Tbt, x))?;
            if sup > tbt {
                return Ok(Some(format!(
                    "testing spectrum: supremal {sup} above trace-by-trace {tbt} under {}",
                    x.as_str()
                )));
            }
        }
        // Suite-constructed comparisons: these laws quantify over all tests,
        // so they are checked on suites rich enough to realize them.
        let chains = trace_suite(p, &[s, t], DEPTH, false);
        let dup_chains = trace_suite(p, &[s, t], DEPTH, true);
        let closed = pruning_closure(p, &[s, t], &random_suite(p, seed), DEPTH);
        for x in [SchedulerClass::Det, SchedulerClass::Rand] {
            let tr_sup = hemi(p, s, t, &spec(TraceApproach::Sup, x))?;
            let te_sup = te_hemi(p, s, t, &chains, &tspec(TestingApproach::Sup, x))?;
            if tr_sup > te_sup {
                return Ok(Some(format!(
                    "spectrum: trace-sup {tr_sup} above testing-sup {te_sup} on chain tests"
                )));
            }
            let tr_tbt = hemi(p, s, t, &spec(TraceApproach::Tbt, x))?;
            let te_tbt = te_hemi(p, s, t, &dup_chains, &tspec(TestingApproach::Tbt, x))?;
            if tr_tbt > te_tbt {
                return Ok(Some(format!(
                    "spectrum: trace-tbt {tr_tbt} above testing-tbt {te_tbt} on duplicated chains"
                )));
            }
            let te_sup_closed = te_hemi(p, s, t, &closed, &tspec(TestingApproach::Sup, x))?;
            let may_closed = te_hemi(p, s, t, &closed, &tspec(TestingApproach::May, x))?;
            if te_sup_closed > may_closed {
                return Ok(Some(format!(
                    "spectrum: testing-sup {te_sup_closed} above may {may_closed} on a pruning-closed suite"
                )));
            }
        }
        Ok(None)
    };
    flatten(go())
}

fn sup_collapse_check(p: &Pts, s: StateId, t: StateId, _seed: u64) -> Option<String> {
    let go = || -> Result<Option<String>> {
        let lambda = Rat::one();
        let sup_det = hemi(
            p,
            s,
            t,
            &TraceMetricSpec::new(TraceApproach::Sup, SchedulerClass::Det, lambda.clone(), 3),
        )?;
        let sup_rand = hemi(
            p,
            s,
            t,
            &TraceMetricSpec::new(TraceApproach::Sup, SchedulerClass::Rand, lambda.clone(), 3),
        )?;
        let tbt_rand = hemi(
            p,
            s,
            t,
            &TraceMetricSpec::new(TraceApproach::Tbt, SchedulerClass::Rand, lambda.clone(), 3),
        )?;
        if sup_det != sup_rand || sup_det != tbt_rand {
            return Ok(Some(format!(
                "supremal collapse fails: det {sup_det}, rand {sup_rand}, tbt-rand {tbt_rand}"
            )));
        }
        // Independent route: enumerated deterministic and randomized
        // achievable maxima agree with the Bellman maximum per trace.
        let trie = realizable_trace_trie(p, &[s, t], 3);
        for n in trie.nonempty_nodes() {
            let trace = trie.trace_of(n);
            for root in [s, t] {
                let det_set =
                    achievable_set(p, root, &trace, SchedulerMode::det(), None, &caps())?;
                let rand_set =
                    achievable_set(p, root, &trace, SchedulerMode::rand(), None, &caps())?;
                let bellman = max_trace_prob(p, root, &trace);
                if det_set.max() != Some(&bellman) || rand_set.max() != Some(&bellman) {
                    return Ok(Some(format!(
                        "vertex attainment fails on trace {} from {}",
                        trace.display(p),
                        p.state_name(root)
                    )));
                }
            }
        }
        Ok(None)
    };
    flatten(go())
}

fn nonexpansive_check(p: &Pts, s1: StateId, t1: StateId, _seed: u64) -> Option<String> {
    let (s2, t2) = pick_second_pair(p);
    let go = || -> Result<Option<String>> {
        let lambda = Rat::one();
        // Strict non-expansiveness for the trace-by-trace and supremal
        // families, both schedulers.
        for approach in [TraceApproach::Tbt, TraceApproach::Sup] {
            for x in [SchedulerClass::Det, SchedulerClass::Rand] {
                let spec = TraceMetricSpec::new(approach, x, lambda.clone(), DEPTH);
                let (composed, d1, d2) = crate::relations::composed_trace_distance(
                    p,
                    ((s1, t1), (s2, t2)),
                    &spec,
                    &caps(),
                )?;
                let bound = strict_bound(&d1, &d2);
                if composed > bound {
                    return Ok(Some(format!(
                        "strict non-expansiveness fails for trace {}/{}: {composed} > {bound}",
                        approach.as_str(),
                        x.as_str()
                    )));
                }
            }
        }
        // Testing distances on suites of chain tests over the composed
        // alphabet; strict for the trace-indexed approaches, plain for
        // may/must and their combination.
        let left = parallel_compose(p, p, (s1, s2), true);
        let right = parallel_compose(p, p, (t1, t2), true);
        let (union, ls, rt) = disjoint_union((&left.pts, StateId(0)), (&right.pts, StateId(0)));
        let chains_union = trace_suite(&union, &[ls, rt], DEPTH, false);
        let dup_union = trace_suite(&union, &[ls, rt], DEPTH, true);
        let chains_comp = trace_suite(p, &[s1, t1, s2, t2], DEPTH, false);
        let dup_comp = trace_suite(p, &[s1, t1, s2, t2], DEPTH, true);
        let tspec = |a, x| TestingMetricSpec::new(a, x).with_lambda_depth(lambda.clone(), DEPTH);
        for x in [SchedulerClass::Det, SchedulerClass::Rand] {
            for (approach, strict) in [
                (TestingApproach::May, false),
                (TestingApproach::Must, false),
                (TestingApproach::MayMust, false),
                (TestingApproach::Tbt, true),
                (TestingApproach::Sup, true),
            ] {
                let (suite_u, suite_c) = if approach == TestingApproach::Tbt {
                    (&dup_union, &dup_comp)
                } else {
                    (&chains_union, &chains_comp)
                };
                let spec = tspec(approach, x);
                let composed = te_hemi(&union, ls, rt, suite_u, &spec)?;
                let d1 = te_hemi(p, s1, t1, suite_c, &spec)?;
                let d2 = te_hemi(p, s2, t2, suite_c, &spec)?;
                let bound = if strict {
                    strict_bound(&d1, &d2)
                } else {
                    &d1 + &d2
                };
                if composed > bound {
                    return Ok(Some(format!(
                        "non-expansiveness fails for testing {}/{}: {composed} > {bound}",
                        approach.as_str(),
                        x.as_str()
                    )));
                }
            }
        }
        Ok(None)
    };
    flatten(go())
}

fn pick_second_pair(p: &Pts) -> (StateId, StateId) {
    let n = p.num_states();
    if n >= 4 {
        (StateId(2), StateId(3))
    } else if n >= 3 {
        (StateId(2), StateId(0))
    } else {
        (StateId(0), StateId(1))
    }
}

fn backward_check(p: &Pts, s: StateId, t: StateId, _seed: u64) -> Option<String> {
    match check_backward_compat(p, s, t, DEPTH, &caps()) {
        Ok(report) => {
            if report.agree {
                None
            } else {
                Some(format!(
                    "backward compatibility disagrees on a {} system: reference {}, sup-det {}, sup-rand {}",
                    report.class, report.reference, report.sup_det, report.sup_rand
                ))
            }
        }
        Err(e) => Some(format!("backward compatibility errored: {e}")),
    }
}

fn roundtrip_check(p: &Pts, s: StateId, t: StateId, seed: u64) -> Option<String> {
    let go = || -> Result<Option<String>> {
        let depth = DEPTH.min(3);
        let trie = realizable_trace_trie(p, &[s], depth);
        // Enumerated distributions agree with the achievable sets, in both
        // inclusion directions.
        let resolutions = enumerate_det_resolutions(p, s, depth, false, &caps())?;
        let mut per_trace_values: Vec<Vec<Rat>> = vec![Vec::new(); trie.len()];
        for r in &resolutions {
            let d = trace_distribution(&r, p, depth);
            for n in trie.nonempty_nodes() {
                let v = d
                    .get(&trie.trace_of(n))
                    .cloned()
                    .unwrap_or_else(Rat::zero);
                if !per_trace_values[n].contains(&v) {
                    per_trace_values[n].push(v);
                }
            }
        }
        for n in trie.nonempty_nodes() {
            let trace = trie.trace_of(n);
            let set = achievable_set(p, s, &trace, SchedulerMode::det(), None, &caps())?;
            let enumerated = AchievableSet::from_points(per_trace_values[n].iter().cloned());
            if set != enumerated {
                return Ok(Some(format!(
                    "achievable set mismatch on {}: recursion {} vs enumeration {}",
                    trace.display(p),
                    set.render(),
                    enumerated.render()
                )));
            }
            let rand = achievable_set(p, s, &trace, SchedulerMode::rand(), None, &caps())?;
            let expected =
                AchievableSet::interval(Rat::zero(), max_trace_prob(p, s, &trace));
            if rand != expected {
                return Ok(Some(format!(
                    "randomized set mismatch on {}",
                    trace.display(p)
                )));
            }
        }
        // Parse/emit round trip.
        let text = emit_process(p);
        let reparsed = crate::format::parse_model(&text)?;
        if crate::format::emit_model(&reparsed) != text {
            return Ok(Some("emit/parse round trip unstable".to_string()));
        }
        // Composition: commutativity up to the pair-swap bijection, product
        // distributions summing to one.
        let pq = parallel_compose(p, p, (s, t), true);
        let qp = parallel_compose(p, p, (t, s), true);
        for st in pq.pts.states() {
            for tr in pq.pts.transitions_from(st) {
                let total: Rat = tr.target.iter().map(|(_, v)| v.clone()).sum();
                if !total.is_one() {
                    return Ok(Some("composed distribution does not sum to one".to_string()));
                }
            }
        }
        let map: Option<Vec<StateId>> = pq
            .pairs
            .iter()
            .map(|&(a, b)| qp.index_of(b, a))
            .collect();
        let swap_ok = match map {
            Some(m) => graph_equal_under(&pq.pts, &qp.pts, &m, (StateId(0), StateId(0))),
            None => false,
        };
        if !swap_ok {
            return Ok(Some("composition not commutative up to pair swap".to_string()));
        }
        // Associativity up to re-association.
        let u = if p.num_states() > 2 { StateId(2) } else { s };
        let ab = parallel_compose(p, p, (s, t), true);
        let ab_c = parallel_compose(&ab.pts, p, (StateId(0), u), true);
        let bc = parallel_compose(p, p, (t, u), true);
        let a_bc = parallel_compose(p, &bc.pts, (s, StateId(0)), true);
        let reassoc: Option<Vec<StateId>> = ab_c
            .pairs
            .iter()
            .map(|&(ab_state, c)| {
                let (a, b) = ab.pairs[ab_state.0];
                bc.index_of(b, c)
                    .and_then(|bc_state| a_bc.index_of(a, bc_state))
            })
            .collect();
        let assoc_ok = match reassoc {
            Some(m) => graph_equal_under(&ab_c.pts, &a_bc.pts, &m, (StateId(0), StateId(0))),
            None => false,
        };
        if !assoc_ok {
            return Ok(Some(
                "composition not associative up to re-association".to_string(),
            ));
        }
        // Optimal success probabilities: sup dominates inf, and the policy
        // route agrees with DP on acyclic interactions.
        let params = GenParams::default().with_seed(seed ^ 0x0bad_5eed);
        if let Ok(npt) = generate_random_npt(p, &params) {
            let sys = build_interaction_system(p, s, &npt);
            let sup = opt_success_prob(&sys, Objective::Sup);
            let inf = opt_success_prob(&sys, Objective::Inf);
            if sup < inf {
                return Ok(Some("sup below inf".to_string()));
            }
            if !sup.is_unit() || !inf.is_unit() {
                return Ok(Some("success probability outside [0,1]".to_string()));
            }
            let info = sys.pts().structure_info(sys.root());
            if info.acyclic {
                let target: Vec<bool> = (0..sys.pts().num_states())
                    .map(|i| sys.is_successful(StateId(i)))
                    .collect();
                for obj in [Objective::Sup, Objective::Inf] {
                    let dp = dp_acyclic(sys.pts(), sys.root(), &target, obj);
                    let general = opt_success_prob(&sys, obj);
                    if dp != general {
                        return Ok(Some("policy iteration disagrees with DP".to_string()));
                    }
                }
            }
        }
        Ok(None)
    };
    flatten(go())
}

/// Deliberately corrupted law: claims the trace-distribution distance is
/// bounded by the trace-by-trace distance, which reverses the spectrum.
fn selftest_corrupt_check(p: &Pts, s: StateId, t: StateId, _seed: u64) -> Option<String> {
    let go = || -> Result<Option<String>> {
        let spec = |a| TraceMetricSpec::new(a, SchedulerClass::Det, Rat::one(), DEPTH);
        let dis = hemi(p, s, t, &spec(TraceApproach::Dis))?;
        let tbt = hemi(p, s, t, &spec(TraceApproach::Tbt))?;
        if dis > tbt {
            return Ok(Some(format!(
                "corrupted law violated as expected: dis {dis} > tbt {tbt}"
            )));
        }
        Ok(None)
    };
    flatten(go())
}

fn flatten(r: Result<Option<String>>) -> Option<String> {
    match r {
        Ok(x) => x,
        Err(e) => Some(format!("error during check: {e}")),
    }
}

/// Runs a property suite for `trials` seeded instances.
pub fn run_property_suite(suite: Suite, trials: usize, base: &GenParams) -> SuiteReport {
    match suite {
        Suite::Axioms => run_trials(suite, trials, base, axioms_check),
        Suite::Kernels => {
            let params = GenParams {
                max_states: 4,
                force_acyclic: true,
                ..base.clone()
            };
            run_trials(suite, trials, &params, kernels_check)
        }
        Suite::Spectrum => {
            let params = GenParams {
                force_acyclic: true,
                ..base.clone()
            };
            run_trials(suite, trials, &params, spectrum_check)
        }
        Suite::SupCollapse => {
            let params = GenParams {
                max_states: 6,
                denominator_bound: 4,
                force_acyclic: true,
                ..base.clone()
            };
            run_trials(suite, trials, &params, sup_collapse_check)
        }
        Suite::NonExpansive => {
            let params = GenParams {
                max_states: 4,
                force_acyclic: true,
                ..base.clone()
            };
            run_trials(suite, trials, &params, nonexpansive_check)
        }
        Suite::Backward => {
            let half = trials / 2;
            let mut report = run_trials(
                suite,
                half,
                &GenParams {
                    class: SystemClass::FullyNondeterministic,
                    ..base.clone()
                },
                backward_check,
            );
            let second = run_trials(
                suite,
                trials - half,
                &GenParams {
                    class: SystemClass::FullyProbabilistic,
                    seed: base.seed.wrapping_add(0x9999),
                    ..base.clone()
                },
                backward_check,
            );
            report.trials += second.trials;
            report.passes += second.passes;
            report.failures.extend(second.failures);
            report
        }
        Suite::RoundTrip => run_trials(suite, trials, base, roundtrip_check),
        Suite::SelfTestCorrupt => run_trials(suite, trials, base, selftest_corrupt_check),
    }
}

/// Runs the given suites (or all standard ones) and returns their reports.
pub fn run_suites(suites: &[Suite], trials: usize, base: &GenParams) -> Vec<SuiteReport> {
    suites
        .iter()
        .map(|&s| run_property_suite(s, trials, base))
        .collect()
}
