//! Testing distances over a finite suite of tests: may, must, may/must,
//! trace-by-trace and supremal probabilities, as hemimetrics and
//! pseudometrics.
//!
//! The supremum over tests ranges over the user-supplied suite, so every
//! reported value is a lower bound on the corresponding all-tests quantity.
//! Quantification is over maximal resolutions of the interaction systems.

use std::collections::BTreeMap;

use crate::achievable::{extremal_trace_prob, hausdorff_one_sided, AchievableSet, Extreme};
use crate::mdp::{opt_success_prob, Objective};
use crate::npt::{build_interaction_system, InteractionSystem, Npt};
use crate::pts::{Pts, StateId, Trace};
use crate::rat::Rat;
use crate::resolution::{det_vector_set, extend_realizable_trie, SchedulerClass, TraceTrie};
use crate::trace_metrics::{Direction, MetricResult, Witness};
use crate::{Caps, Error, Result};

/// Which testing-distance family to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestingApproach {
    May,
    Must,
    /// Pointwise maximum of may and must.
    MayMust,
    /// Per test and trace, match maximal resolutions on success probability.
    Tbt,
    /// Per test and trace, compare supremal success probabilities.
    Sup,
}

impl TestingApproach {
    pub fn as_str(self) -> &'static str {
        match self {
            TestingApproach::May => "may",
            TestingApproach::Must => "must",
            TestingApproach::MayMust => "mM",
            TestingApproach::Tbt => "tbt",
            TestingApproach::Sup => "sup",
        }
    }

    pub fn is_trace_indexed(self) -> bool {
        matches!(self, TestingApproach::Tbt | TestingApproach::Sup)
    }
}

/// A named test with its weight.
#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub name: String,
    pub test: Npt,
    pub weight: Rat,
}

/// A finite, user-supplied suite of tests with per-test weights ω in (0,1].
#[derive(Debug, Clone, Default)]
pub struct TestSuite {
    entries: Vec<SuiteEntry>,
}

impl TestSuite {
    pub fn new() -> Self {
        TestSuite {
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, test: Npt) -> Result<()> {
        self.push_weighted(test, Rat::one())
    }

    pub fn push_weighted(&mut self, test: Npt, weight: Rat) -> Result<()> {
        if !weight.is_positive() || !weight.is_unit() {
            return Err(Error::Invalid(format!(
                "test weight ω = {weight} outside (0,1]"
            )));
        }
        let name = test.name().to_string();
        if self.entries.iter().any(|e| e.name == name) {
            return Err(Error::Invalid(format!("duplicate test name `{name}`")));
        }
        self.entries.push(SuiteEntry { name, test, weight });
        Ok(())
    }

    pub fn from_tests(tests: impl IntoIterator<Item = Npt>) -> Result<Self> {
        let mut s = TestSuite::new();
        for t in tests {
            s.push(t)?;
        }
        Ok(s)
    }

    pub fn set_weight(&mut self, name: &str, weight: Rat) -> Result<()> {
        if !weight.is_positive() || !weight.is_unit() {
            return Err(Error::Invalid(format!(
                "test weight ω = {weight} outside (0,1]"
            )));
        }
        match self.entries.iter_mut().find(|e| e.name == name) {
            Some(e) => {
                e.weight = weight;
                Ok(())
            }
            None => Err(Error::Invalid(format!("unknown test `{name}`"))),
        }
    }

    /// Derives ω(o) = λ^depth(o) for every test; all tests must be acyclic.
    pub fn weight_by_depth(&mut self, lambda: &Rat) -> Result<()> {
        if !lambda.is_positive() || !lambda.is_unit() {
            return Err(Error::Invalid(format!("discount λ = {lambda} outside (0,1]")));
        }
        let depths: Vec<usize> = self
            .entries
            .iter()
            .map(|e| {
                let info = e.test.pts().structure_info(e.test.root());
                info.depth.ok_or_else(|| Error::CyclicUnsupported {
                    context: format!("ω from λ for test `{}`", e.name),
                    detail: "test depth is unbounded".to_string(),
                })
            })
            .collect::<Result<_>>()?;
        for (e, d) in self.entries.iter_mut().zip(depths) {
            e.weight = lambda.pow(d as u32);
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &SuiteEntry> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Full specification of a testing-distance computation.
#[derive(Debug, Clone)]
pub struct TestingMetricSpec {
    pub approach: TestingApproach,
    pub scheduler: SchedulerClass,
    /// Discount per trace length; used by the trace-indexed approaches only.
    pub lambda: Rat,
    /// Trace horizon; used by the trace-indexed approaches only.
    pub depth: usize,
    pub direction: Direction,
}

impl TestingMetricSpec {
    pub fn new(approach: TestingApproach, scheduler: SchedulerClass) -> Self {
        TestingMetricSpec {
            approach,
            scheduler,
            lambda: Rat::one(),
            depth: 1,
            direction: Direction::Symmetric,
        }
    }

    pub fn with_lambda_depth(mut self, lambda: Rat, depth: usize) -> Self {
        self.lambda = lambda;
        self.depth = depth;
        self
    }

    pub fn with_direction(mut self, d: Direction) -> Self {
        self.direction = d;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.approach.is_trace_indexed() {
            if !self.lambda.is_positive() || !self.lambda.is_unit() {
                return Err(Error::Invalid(format!(
                    "discount λ = {} outside (0,1]",
                    self.lambda
                )));
            }
            if self.depth == 0 {
                return Err(Error::Invalid("depth must be at least 1".to_string()));
            }
        }
        Ok(())
    }
}

fn success_flags(sys: &InteractionSystem) -> Vec<bool> {
    (0..sys.pts().num_states())
        .map(|i| sys.is_successful(StateId(i)))
        .collect()
}

fn require_acyclic(sys: &InteractionSystem, context: &str) -> Result<()> {
    let info = sys.pts().structure_info(sys.root());
    if info.acyclic {
        Ok(())
    } else {
        Err(Error::CyclicUnsupported {
            context: context.to_string(),
            detail: format!(
                "interaction system `{}` has cycles through {} state(s)",
                sys.pts().name(),
                info.on_cycle.len()
            ),
        })
    }
}

/// Supremal success probability of `trace` in the interaction system, over
/// maximal resolutions. Requires an acyclic interaction system.
pub fn success_trace_max(sys: &InteractionSystem, trace: &Trace) -> Result<Rat> {
    require_acyclic(sys, "trace-indexed success probability")?;
    let succ = success_flags(sys);
    Ok(extremal_trace_prob(
        sys.pts(),
        sys.root(),
        trace,
        Some(&succ),
        Extreme::Max,
    ))
}

/// The success achievable set of `trace` over maximal resolutions of the
/// interaction system: deterministic point sets, or the randomized interval.
pub fn success_achievable_set(
    sys: &InteractionSystem,
    trace: &Trace,
    scheduler: SchedulerClass,
    caps: &Caps,
) -> Result<AchievableSet> {
    let succ = success_flags(sys);
    match scheduler {
        SchedulerClass::Det => {
            let mut trie = TraceTrie::new();
            let node = trie.insert(trace);
            let vectors = det_vector_set(sys.pts(), sys.root(), &trie, true, Some(&succ), caps)?;
            Ok(AchievableSet::from_points(
                vectors.into_iter().map(|v| v[node].clone()),
            ))
        }
        SchedulerClass::Rand => {
            let hi = extremal_trace_prob(sys.pts(), sys.root(), trace, Some(&succ), Extreme::Max);
            let lo = extremal_trace_prob(sys.pts(), sys.root(), trace, Some(&succ), Extreme::Min);
            Ok(AchievableSet::interval(lo, hi))
        }
    }
}

/// Computes the requested testing distance between `s` and `t` over the
/// suite.
pub fn testing_distance(
    p: &Pts,
    s: StateId,
    t: StateId,
    suite: &TestSuite,
    spec: &TestingMetricSpec,
    caps: &Caps,
) -> Result<MetricResult> {
    spec.validate()?;
    // Interactions per test, shared between directions.
    let systems: Vec<(&SuiteEntry, InteractionSystem, InteractionSystem)> = suite
        .iter()
        .map(|e| {
            let is_ = build_interaction_system(p, s, &e.test);
            let it = build_interaction_system(p, t, &e.test);
            (e, is_, it)
        })
        .collect();

    if spec.approach.is_trace_indexed() {
        for (e, is_, it) in &systems {
            require_acyclic(is_, &format!("{} testing with `{}`", spec.approach.as_str(), e.name))?;
            require_acyclic(it, &format!("{} testing with `{}`", spec.approach.as_str(), e.name))?;
        }
    }

    let one_sided = |swap: bool| -> Result<(Rat, Option<Witness>)> {
        let mut best = Rat::zero();
        let mut witness = None;
        for (e, is_, it) in &systems {
            let (left, right) = if swap { (it, is_) } else { (is_, it) };
            match spec.approach {
                TestingApproach::May | TestingApproach::Must | TestingApproach::MayMust => {
                    let mut consider = |objective: Objective, tag: &str| {
                        let vl = opt_success_prob(left, objective);
                        let vr = opt_success_prob(right, objective);
                        let term = &e.weight * &vl.monus(&vr);
                        if term > best {
                            best = term;
                            witness = Some(Witness {
                                trace: String::new(),
                                detail: format!(
                                    "test `{}` ({tag}): success {} against {}",
                                    e.name, vl, vr
                                ),
                            });
                        }
                    };
                    match spec.approach {
                        TestingApproach::May => consider(Objective::Sup, "may"),
                        TestingApproach::Must => consider(Objective::Inf, "must"),
                        _ => {
                            consider(Objective::Sup, "may");
                            consider(Objective::Inf, "must");
                        }
                    }
                }
                TestingApproach::Tbt | TestingApproach::Sup => {
                    let mut trie = TraceTrie::new();
                    extend_realizable_trie(&mut trie, left.pts(), left.root(), spec.depth);
                    extend_realizable_trie(&mut trie, right.pts(), right.root(), spec.depth);
                    for n in trie.nonempty_nodes() {
                        let trace = trie.trace_of(n);
                        let w = spec.lambda.pow((trace.len() - 1) as u32);
                        let term = match spec.approach {
                            TestingApproach::Sup => {
                                let ml = success_trace_max(left, &trace)?;
                                let mr = success_trace_max(right, &trace)?;
                                let d = &w * &ml.monus(&mr);
                                (d, format!("sup-success {ml} against {mr}", ))
                            }
                            _ => {
                                let a = success_achievable_set(left, &trace, spec.scheduler, caps)?;
                                let b = success_achievable_set(right, &trace, spec.scheduler, caps)?;
                                let d = &w * &hausdorff_one_sided(&a, &b)?;
                                (d, format!("A = {}, B = {}", a.render(), b.render()))
                            }
                        };
                        if term.0 > best {
                            best = term.0;
                            witness = Some(Witness {
                                trace: trace.display(left.pts()).to_string(),
                                detail: format!("test `{}`: {}", e.name, term.1),
                            });
                        }
                    }
                }
            }
        }
        Ok((best, witness))
    };

    let (value, witness) = match spec.direction {
        Direction::LeftHemi => one_sided(false)?,
        Direction::RightHemi => one_sided(true)?,
        Direction::Symmetric => {
            let (l, lw) = one_sided(false)?;
            let (r, rw) = one_sided(true)?;
            if l >= r {
                (l, lw)
            } else {
                (r, rw)
            }
        }
    };

    // May/must values are exact optima of finite systems; the trace-indexed
    // approaches are exact whenever the horizon covers the (acyclic)
    // interaction systems.
    let (bound, exact) = if spec.approach.is_trace_indexed() {
        let mut deepest = 0usize;
        for (_, is_, it) in &systems {
            for sys in [is_, it] {
                if let Some(d) = sys.pts().structure_info(sys.root()).depth {
                    deepest = deepest.max(d);
                }
            }
        }
        if deepest <= spec.depth {
            (Rat::zero(), true)
        } else if spec.lambda < Rat::one() {
            (spec.lambda.pow(spec.depth as u32), false)
        } else {
            (Rat::one(), false)
        }
    } else {
        (Rat::zero(), true)
    };

    Ok(MetricResult {
        value,
        truncation_bound: bound,
        exact,
        approximate_grid: None,
        witness,
    })
}

/// The testing hemimetric h(s, t).
pub fn testing_hemimetric(
    p: &Pts,
    s: StateId,
    t: StateId,
    suite: &TestSuite,
    spec: &TestingMetricSpec,
    caps: &Caps,
) -> Result<MetricResult> {
    let mut spec = spec.clone();
    spec.direction = Direction::LeftHemi;
    testing_distance(p, s, t, suite, &spec, caps)
}

/// The testing pseudometric m(s, t).
pub fn testing_pseudometric(
    p: &Pts,
    s: StateId,
    t: StateId,
    suite: &TestSuite,
    spec: &TestingMetricSpec,
    caps: &Caps,
) -> Result<MetricResult> {
    let mut spec = spec.clone();
    spec.direction = Direction::Symmetric;
    testing_distance(p, s, t, suite, &spec, caps)
}

/// The linear test performing `labels` then succeeding.
pub fn chain_test(name: &str, labels: &[&str]) -> Npt {
    let mut b = crate::gallery::PtsBuilder::new(name);
    b.root("q0");
    for (i, l) in labels.iter().enumerate() {
        let src = format!("q{i}");
        let dst = if i + 1 == labels.len() {
            "top".to_string()
        } else {
            format!("q{}", i + 1)
        };
        b.trans(&src, l, &[(&dst, Rat::one())]);
    }
    if labels.is_empty() {
        b.root("top");
    }
    b.build_npt("top")
}

/// The chain test with a dead duplicate of every step: at each position the
/// interaction may take the step toward success or an equally labeled step
/// into a sink, mirroring the halting options of non-maximal resolutions.
pub fn dup_chain_test(name: &str, labels: &[&str]) -> Npt {
    let mut b = crate::gallery::PtsBuilder::new(name);
    b.root("q0");
    for (i, l) in labels.iter().enumerate() {
        let src = format!("q{i}");
        let dst = if i + 1 == labels.len() {
            "top".to_string()
        } else {
            format!("q{}", i + 1)
        };
        b.trans(&src, l, &[(&dst, Rat::one())]);
        b.trans(&src, l, &[("dead", Rat::one())]);
    }
    if labels.is_empty() {
        b.root("top");
    }
    b.build_npt("top")
}

/// Restriction of a test to one trace: only transitions along the trace's
/// labels survive, and success counts only at exactly the trace's length.
/// The whole-success probability of the pruned interaction then equals the
/// trace-indexed success probability of the original one.
pub fn prune_test(o: &Npt, trace_labels: &[String]) -> Npt {
    let p = o.pts();
    let n = trace_labels.len();
    let mut b = crate::gallery::PtsBuilder::new(&format!(
        "{}[{}]",
        o.name(),
        trace_labels.join(" ")
    ));
    let fresh_top = "pruned_top";
    b.root(&format!("{}@0", p.state_name(o.root())));
    b.state(fresh_top);
    // Walk level by level.
    let mut frontier: Vec<StateId> = vec![o.root()];
    for (i, label) in trace_labels.iter().enumerate() {
        let mut next: Vec<StateId> = Vec::new();
        for &q in &frontier {
            for t in p.transitions_from(q) {
                if p.action_name(t.label) != label.as_str() {
                    continue;
                }
                let src = format!("{}@{i}", p.state_name(q));
                let dist: Vec<(String, Rat)> = t
                    .target
                    .iter()
                    .map(|(c, prob)| {
                        let is_final = i + 1 == n && c == o.success();
                        let dst = if is_final {
                            fresh_top.to_string()
                        } else {
                            format!("{}@{}", p.state_name(c), i + 1)
                        };
                        (dst, prob.clone())
                    })
                    .collect();
                let dist_refs: Vec<(&str, Rat)> =
                    dist.iter().map(|(s, r)| (s.as_str(), r.clone())).collect();
                b.trans(&src, label, &dist_refs);
                for (c, _) in t.target.iter() {
                    if !(i + 1 == n && c == o.success()) && !next.contains(&c) {
                        next.push(c);
                    }
                }
            }
        }
        frontier = next;
    }
    b.build_npt(fresh_top)
}

/// Chain tests for every realizable trace of length ≤ depth from the given
/// roots, plus optionally the dead-duplicated variants.
pub fn trace_suite(p: &Pts, roots: &[StateId], depth: usize, duplicated: bool) -> TestSuite {
    let trie = crate::resolution::realizable_trace_trie(p, roots, depth);
    let mut suite = TestSuite::new();
    for n in trie.nonempty_nodes() {
        let trace = trie.trace_of(n);
        let labels: Vec<&str> = trace.0.iter().map(|&a| p.action_name(a)).collect();
        let joined = labels.join("_");
        let chain = chain_test(&format!("chain_{joined}"), &labels);
        suite.push(chain).expect("fresh name");
        if duplicated {
            let dup = dup_chain_test(&format!("dup_{joined}"), &labels);
            suite.push(dup).expect("fresh name");
        }
    }
    suite
}

/// Extends a suite with the trace-pruned variants of its tests, up to the
/// given depth over each test's own action alphabet.
pub fn pruning_closure(p: &Pts, roots: &[StateId], suite: &TestSuite, depth: usize) -> TestSuite {
    let mut out = TestSuite::new();
    for e in suite.iter() {
        out.push_weighted(e.test.clone(), e.weight.clone()).unwrap();
    }
    for e in suite.iter() {
        // Traces realizable by either interaction, bounded by depth.
        let mut trie = TraceTrie::new();
        for &root in roots {
            let sys = build_interaction_system(p, root, &e.test);
            extend_realizable_trie(&mut trie, sys.pts(), sys.root(), depth);
        }
        // The interaction alphabet starts with p's actions; map through names.
        let sys0 = build_interaction_system(p, roots[0], &e.test);
        for n in trie.nonempty_nodes() {
            let trace = trie.trace_of(n);
            let labels: Vec<String> = trace
                .0
                .iter()
                .map(|&a| sys0.pts().action_name(a).to_string())
                .collect();
            let pruned = prune_test(&e.test, &labels);
            // Ignore duplicates by name.
            let _ = out.push_weighted(pruned, e.weight.clone());
        }
    }
    out
}

/// Convenience: the per-test success extremes used by relation checking.
pub fn success_extremes(
    p: &Pts,
    state: StateId,
    test: &Npt,
) -> (Rat, Rat) {
    let sys = build_interaction_system(p, state, test);
    (
        opt_success_prob(&sys, Objective::Inf),
        opt_success_prob(&sys, Objective::Sup),
    )
}

/// All (test, trace) success suprema over the suite, used by spectrum checks.
pub fn success_profile(
    p: &Pts,
    state: StateId,
    suite: &TestSuite,
    depth: usize,
) -> Result<BTreeMap<(String, Vec<String>), Rat>> {
    let mut out = BTreeMap::new();
    for e in suite.iter() {
        let sys = build_interaction_system(p, state, &e.test);
        require_acyclic(&sys, "success profile")?;
        let mut trie = TraceTrie::new();
        extend_realizable_trie(&mut trie, sys.pts(), sys.root(), depth);
        for n in trie.nonempty_nodes() {
            let trace = trie.trace_of(n);
            let labels: Vec<String> = trace
                .0
                .iter()
                .map(|&a| sys.pts().action_name(a).to_string())
                .collect();
            let v = success_trace_max(&sys, &trace)?;
            out.insert((e.name.clone(), labels), v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn suite_of(tests: Vec<Npt>) -> TestSuite {
        TestSuite::from_tests(tests).unwrap()
    }

    fn pseudo(p: &Pts, s: &str, t: &str, suite: &TestSuite, spec: &TestingMetricSpec) -> Rat {
        testing_pseudometric(
            p,
            p.state_by_name(s).unwrap(),
            p.state_by_name(t).unwrap(),
            suite,
            spec,
            &Caps::default(),
        )
        .unwrap()
        .value
    }

    #[test]
    fn must_and_may_on_t_u_with_o1() {
        let p = gallery::fig3();
        let suite = suite_of(vec![gallery::test_o1()]);
        for sched in [SchedulerClass::Det, SchedulerClass::Rand] {
            let must = TestingMetricSpec::new(TestingApproach::Must, sched);
            assert_eq!(pseudo(&p, "t", "u", &suite, &must), Rat::one());
            let may = TestingMetricSpec::new(TestingApproach::May, sched);
            assert_eq!(pseudo(&p, "t", "u", &suite, &may), Rat::zero());
        }
        // Weighted: ω(o1) scales the must distance.
        let mut weighted = suite_of(vec![gallery::test_o1()]);
        weighted.set_weight("o1", r(1, 2)).unwrap();
        let must = TestingMetricSpec::new(TestingApproach::Must, SchedulerClass::Det);
        assert_eq!(pseudo(&p, "t", "u", &weighted, &must), r(1, 2));
    }

    #[test]
    fn fig6_may_must_values() {
        let p = gallery::fig6();
        let suite = suite_of(vec![gallery::test_o2()]);
        let may = TestingMetricSpec::new(TestingApproach::May, SchedulerClass::Det);
        assert_eq!(pseudo(&p, "s", "t", &suite, &may), r(7, 10));
        let must = TestingMetricSpec::new(TestingApproach::Must, SchedulerClass::Det);
        assert_eq!(pseudo(&p, "s", "t", &suite, &must), r(3, 10));
        let mm = TestingMetricSpec::new(TestingApproach::MayMust, SchedulerClass::Det);
        assert_eq!(pseudo(&p, "s", "t", &suite, &mm), r(7, 10));
    }

    #[test]
    fn fig3_tbt_testing_with_o2() {
        let p = gallery::fig3();
        let suite = suite_of(vec![gallery::test_o2()]);
        for lambda in [r(1, 1), r(1, 2)] {
            let det = TestingMetricSpec::new(TestingApproach::Tbt, SchedulerClass::Det)
                .with_lambda_depth(lambda.clone(), 2);
            assert_eq!(pseudo(&p, "s", "t", &suite, &det), &lambda * &r(1, 2));
            let rand = TestingMetricSpec::new(TestingApproach::Tbt, SchedulerClass::Rand)
                .with_lambda_depth(lambda.clone(), 2);
            assert_eq!(pseudo(&p, "s", "t", &suite, &rand), Rat::zero());
        }
    }

    #[test]
    fn fig6_sup_testing() {
        let p = gallery::fig6();
        let suite = suite_of(vec![gallery::test_o2()]);
        let spec = TestingMetricSpec::new(TestingApproach::Sup, SchedulerClass::Det)
            .with_lambda_depth(r(1, 1), 2);
        assert_eq!(pseudo(&p, "s", "t", &suite, &spec), r(2, 5));
    }

    #[test]
    fn fig3_t_u_trace_indexed() {
        let p = gallery::fig3();
        let suite = suite_of(vec![gallery::test_o1()]);
        let sup = TestingMetricSpec::new(TestingApproach::Sup, SchedulerClass::Det)
            .with_lambda_depth(r(1, 1), 2);
        assert_eq!(pseudo(&p, "t", "u", &suite, &sup), Rat::zero());
        for lambda in [r(1, 1), r(1, 2)] {
            let tbt = TestingMetricSpec::new(TestingApproach::Tbt, SchedulerClass::Det)
                .with_lambda_depth(lambda.clone(), 2);
            assert_eq!(pseudo(&p, "t", "u", &suite, &tbt), lambda);
        }
    }

    #[test]
    fn fig7_family() {
        let p = gallery::fig7();
        let suite = suite_of(vec![
            gallery::test_op(&r(1, 4)),
            gallery::test_op(&r(1, 2)),
            gallery::test_op(&r(3, 4)),
        ]);
        let must = TestingMetricSpec::new(TestingApproach::Must, SchedulerClass::Det);
        assert_eq!(pseudo(&p, "s", "t", &suite, &must), r(1, 2));
        let tbt = TestingMetricSpec::new(TestingApproach::Tbt, SchedulerClass::Det)
            .with_lambda_depth(r(1, 1), 3);
        assert_eq!(pseudo(&p, "s", "t", &suite, &tbt), Rat::zero());
        let tbt_rand = TestingMetricSpec::new(TestingApproach::Tbt, SchedulerClass::Rand)
            .with_lambda_depth(r(1, 1), 3);
        assert_eq!(pseudo(&p, "s", "t", &suite, &tbt_rand), Rat::zero());
    }

    #[test]
    fn empty_suite_gives_zero() {
        let p = gallery::fig3();
        let suite = TestSuite::new();
        for approach in [
            TestingApproach::May,
            TestingApproach::Must,
            TestingApproach::MayMust,
            TestingApproach::Tbt,
            TestingApproach::Sup,
        ] {
            let spec = TestingMetricSpec::new(approach, SchedulerClass::Det)
                .with_lambda_depth(r(1, 1), 2);
            assert_eq!(pseudo(&p, "s", "t", &suite, &spec), Rat::zero());
        }
    }

    #[test]
    fn success_trace_max_examples() {
        let p = gallery::fig3();
        let o1 = gallery::test_o1();
        let t = p.state_by_name("t").unwrap();
        let u = p.state_by_name("u").unwrap();
        let it = build_interaction_system(&p, t, &o1);
        let iu = build_interaction_system(&p, u, &o1);
        let a = it.pts().action_by_name("a").unwrap();
        let b = it.pts().action_by_name("b").unwrap();
        let ab = Trace(vec![a, b]);
        assert_eq!(success_trace_max(&it, &ab).unwrap(), Rat::one());
        assert_eq!(success_trace_max(&iu, &ab).unwrap(), Rat::one());
        assert_eq!(success_trace_max(&it, &Trace::empty()).unwrap(), Rat::zero());
    }

    #[test]
    fn u_o1_det_maximal_success_set() {
        let p = gallery::fig3();
        let o1 = gallery::test_o1();
        let u = p.state_by_name("u").unwrap();
        let iu = build_interaction_system(&p, u, &o1);
        let a = iu.pts().action_by_name("a").unwrap();
        let b = iu.pts().action_by_name("b").unwrap();
        let ab = Trace(vec![a, b]);
        let set = success_achievable_set(&iu, &ab, SchedulerClass::Det, &Caps::default()).unwrap();
        assert_eq!(
            set,
            AchievableSet::from_points([r(0, 1), r(1, 2), r(1, 1)])
        );
    }

    #[test]
    fn cyclic_interaction_rejected_for_trace_indexed() {
        use crate::gallery::PtsBuilder;
        let mut b = PtsBuilder::new("loopy");
        b.root("s");
        b.trans("s", "a", &[("s", r(1, 1))]);
        let p = b.build();
        let mut tb = PtsBuilder::new("oloop");
        tb.root("o");
        tb.trans("o", "a", &[("o", r(1, 1))]);
        tb.trans("o", "b", &[("top", r(1, 1))]);
        let o = tb.build_npt("top");
        let suite = suite_of(vec![o]);
        let spec = TestingMetricSpec::new(TestingApproach::Tbt, SchedulerClass::Det)
            .with_lambda_depth(r(1, 1), 2);
        let res = testing_pseudometric(
            &p,
            p.state_by_name("s").unwrap(),
            p.state_by_name("s").unwrap(),
            &suite,
            &spec,
            &Caps::default(),
        );
        assert!(matches!(res, Err(Error::CyclicUnsupported { .. })));
        // May/must still fine on the same inputs.
        let may = TestingMetricSpec::new(TestingApproach::May, SchedulerClass::Det);
        let res = testing_pseudometric(
            &p,
            p.state_by_name("s").unwrap(),
            p.state_by_name("s").unwrap(),
            &suite,
            &may,
            &Caps::default(),
        );
        assert_eq!(res.unwrap().value, Rat::zero());
    }

    #[test]
    fn pruned_test_whole_success_matches_trace_indexed_success() {
        let p = gallery::fig6();
        let o2 = gallery::test_o2();
        let s = p.state_by_name("s").unwrap();
        let sys = build_interaction_system(&p, s, &o2);
        let a = sys.pts().action_by_name("a").unwrap();
        let c = sys.pts().action_by_name("c").unwrap();
        let ac = Trace(vec![a, c]);
        let expected = success_trace_max(&sys, &ac).unwrap();
        let pruned = prune_test(&o2, &["a".to_string(), "c".to_string()]);
        let psys = build_interaction_system(&p, s, &pruned);
        assert_eq!(opt_success_prob(&psys, Objective::Sup), expected);
        assert_eq!(expected, r(7, 10));
    }

    #[test]
    fn dup_chain_recovers_halting_options() {
        // Success sets of a dup-chain interaction match the non-maximal trace
        // achievable sets of the plain process.
        let p = gallery::fig1(&r(1, 10));
        let sp = p.state_by_name("sp").unwrap();
        let dup = dup_chain_test("dup_ab", &["a", "b"]);
        let sys = build_interaction_system(&p, sp, &dup);
        let a = sys.pts().action_by_name("a").unwrap();
        let b = sys.pts().action_by_name("b").unwrap();
        let ab = Trace(vec![a, b]);
        let got = success_achievable_set(&sys, &ab, SchedulerClass::Det, &Caps::default()).unwrap();
        let want = crate::achievable::achievable_set(
            &p,
            sp,
            &Trace(vec![
                p.action_by_name("a").unwrap(),
                p.action_by_name("b").unwrap(),
            ]),
            crate::resolution::SchedulerMode::det(),
            None,
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn weight_by_depth() {
        let mut suite = suite_of(vec![gallery::test_o1()]);
        suite.weight_by_depth(&r(1, 2)).unwrap();
        assert_eq!(suite.iter().next().unwrap().weight, r(1, 4));
    }
}
