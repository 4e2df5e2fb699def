//! Kernel relations, ε-robustness and backward compatibility.
//!
//! Every preorder and equivalence here is the kernel of the corresponding
//! distance: the relation holds exactly when the (hemi- or pseudo-) metric
//! vanishes at the given depth and suite. The module also carries direct
//! quantifier-form deciders built on explicit resolution enumeration, used to
//! cross-validate the kernels.

use std::collections::BTreeMap;

use crate::compose::parallel_compose;
use crate::npt::{build_interaction_system, InteractionSystem};
use crate::pts::{Pts, StateId, Trace};
use crate::rat::Rat;
use crate::resolution::{
    enumerate_det_resolutions, realizable_trace_trie, trace_distribution, Choice, ResolutionTree,
    SchedulerClass, TraceTrie,
};
use crate::simplex::in_hull;
use crate::testing_metrics::{testing_distance, TestSuite, TestingApproach, TestingMetricSpec};
use crate::trace_metrics::{trace_distance, Direction, MetricResult, TraceApproach, TraceMetricSpec};
use crate::{Caps, Error, Result};

/// The eight relation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationSemantics {
    TrDis,
    TrTbt,
    TrSup,
    TeMay,
    TeMust,
    TeMayMust,
    TeTbt,
    TeSup,
}

impl RelationSemantics {
    pub fn is_testing(self) -> bool {
        matches!(
            self,
            RelationSemantics::TeMay
                | RelationSemantics::TeMust
                | RelationSemantics::TeMayMust
                | RelationSemantics::TeTbt
                | RelationSemantics::TeSup
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelationSemantics::TrDis => "tr-dis",
            RelationSemantics::TrTbt => "tr-tbt",
            RelationSemantics::TrSup => "tr-sup",
            RelationSemantics::TeMay => "te-may",
            RelationSemantics::TeMust => "te-must",
            RelationSemantics::TeMayMust => "te-mm",
            RelationSemantics::TeTbt => "te-tbt",
            RelationSemantics::TeSup => "te-sup",
        }
    }
}

/// Preorder (one direction) or equivalence (both).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Preorder,
    Equivalence,
}

#[derive(Debug, Clone)]
pub struct RelationQuery {
    pub semantics: RelationSemantics,
    pub kind: RelationKind,
    pub scheduler: SchedulerClass,
    pub depth: usize,
}

#[derive(Debug, Clone)]
pub struct RelationOutcome {
    pub holds: bool,
    /// The distance whose kernel was queried.
    pub measured: MetricResult,
}

/// Decides the relation through its metric kernel: zero distance at the given
/// depth. Testing relations require a suite.
pub fn check_relation(
    p: &Pts,
    s: StateId,
    t: StateId,
    query: &RelationQuery,
    suite: Option<&TestSuite>,
    caps: &Caps,
) -> Result<RelationOutcome> {
    let direction = match query.kind {
        RelationKind::Preorder => Direction::LeftHemi,
        RelationKind::Equivalence => Direction::Symmetric,
    };
    let measured = if query.semantics.is_testing() {
        let suite = suite.ok_or_else(|| {
            Error::Invalid(format!(
                "relation {} requires a test suite",
                query.semantics.as_str()
            ))
        })?;
        let approach = match query.semantics {
            RelationSemantics::TeMay => TestingApproach::May,
            RelationSemantics::TeMust => TestingApproach::Must,
            RelationSemantics::TeMayMust => TestingApproach::MayMust,
            RelationSemantics::TeTbt => TestingApproach::Tbt,
            RelationSemantics::TeSup => TestingApproach::Sup,
            _ => unreachable!(),
        };
        let spec = TestingMetricSpec::new(approach, query.scheduler)
            .with_lambda_depth(Rat::one(), query.depth)
            .with_direction(direction);
        testing_distance(p, s, t, suite, &spec, caps)?
    } else {
        let approach = match query.semantics {
            RelationSemantics::TrDis => TraceApproach::Dis,
            RelationSemantics::TrTbt => TraceApproach::Tbt,
            RelationSemantics::TrSup => TraceApproach::Sup,
            _ => unreachable!(),
        };
        let spec = TraceMetricSpec::new(approach, query.scheduler, Rat::one(), query.depth)
            .with_direction(direction);
        trace_distance(p, s, t, &spec, caps)?
    };
    Ok(RelationOutcome {
        holds: measured.value.is_zero(),
        measured,
    })
}

// ---------------------------------------------------------------------------
// Direct quantifier-form deciders (cross-validation route).
// ---------------------------------------------------------------------------

fn enumerated_vectors(
    p: &Pts,
    root: StateId,
    trie: &TraceTrie,
    depth: usize,
    maximal: bool,
    caps: &Caps,
) -> Result<Vec<Vec<Rat>>> {
    let mut out: Vec<Vec<Rat>> = Vec::new();
    for r in enumerate_det_resolutions(p, root, depth, maximal, caps)? {
        let d = trace_distribution(&r, p, depth);
        let mut v = vec![Rat::zero(); trie.len()];
        v[0] = Rat::one();
        for n in trie.nonempty_nodes() {
            if let Some(val) = d.get(&trie.trace_of(n)) {
                v[n] = val.clone();
            }
        }
        if !out.contains(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Per-trace success values and the whole-success probability of one maximal
/// resolution of an interaction system.
fn success_values(
    r: &ResolutionTree,
    sys: &InteractionSystem,
    depth: usize,
) -> (BTreeMap<Trace, Rat>, Rat) {
    let mut per_trace = BTreeMap::new();
    let mut whole = Rat::zero();
    fn walk(
        r: &ResolutionTree,
        sys: &InteractionSystem,
        prefix: &mut Trace,
        weight: Rat,
        depth: usize,
        per_trace: &mut BTreeMap<Trace, Rat>,
        whole: &mut Rat,
    ) {
        if sys.is_successful(r.state) {
            let slot = per_trace.entry(prefix.clone()).or_insert_with(Rat::zero);
            *slot += &weight;
            *whole += &weight;
            return;
        }
        if prefix.len() == depth {
            return;
        }
        if let Choice::Chosen(i, kids) = &r.choice {
            let t = &sys.pts().transitions_from(r.state)[*i];
            prefix.push(t.label);
            for (kid, (_, prob)) in kids.iter().zip(t.target.iter()) {
                walk(kid, sys, prefix, &weight * prob, depth, per_trace, whole);
            }
            prefix.0.pop();
        }
    }
    walk(
        r,
        sys,
        &mut Trace::empty(),
        Rat::one(),
        depth,
        &mut per_trace,
        &mut whole,
    );
    (per_trace, whole)
}

fn interaction_depth(sys: &InteractionSystem) -> Result<usize> {
    sys.pts()
        .structure_info(sys.root())
        .depth
        .ok_or_else(|| Error::CyclicUnsupported {
            context: "direct testing decider".to_string(),
            detail: "cyclic interaction system".to_string(),
        })
}

/// Direct decision of a preorder by its defining quantifier alternation over
/// enumerated resolutions (deterministic schedulers) or their convex hulls
/// (randomized schedulers). Testing semantics require acyclic interactions.
pub fn direct_preorder(
    p: &Pts,
    s: StateId,
    t: StateId,
    semantics: RelationSemantics,
    scheduler: SchedulerClass,
    depth: usize,
    suite: Option<&TestSuite>,
    caps: &Caps,
) -> Result<bool> {
    match semantics {
        RelationSemantics::TrDis => {
            let trie = realizable_trace_trie(p, &[s, t], depth);
            let vs = enumerated_vectors(p, s, &trie, depth, false, caps)?;
            let vt = enumerated_vectors(p, t, &trie, depth, false, caps)?;
            let weights: Vec<Rat> = (0..trie.len())
                .map(|n| if n == 0 { Rat::zero() } else { Rat::one() })
                .collect();
            Ok(match scheduler {
                SchedulerClass::Det => vs.iter().all(|v| vt.contains(v)),
                SchedulerClass::Rand => vs.iter().all(|v| in_hull(v, &weights, &vt)),
            })
        }
        RelationSemantics::TrTbt | RelationSemantics::TrSup => {
            let trie = realizable_trace_trie(p, &[s, t], depth);
            let vs = enumerated_vectors(p, s, &trie, depth, false, caps)?;
            let vt = enumerated_vectors(p, t, &trie, depth, false, caps)?;
            for n in trie.nonempty_nodes() {
                let set_s: Vec<Rat> = vs.iter().map(|v| v[n].clone()).collect();
                let set_t: Vec<Rat> = vt.iter().map(|v| v[n].clone()).collect();
                let max_s = set_s.iter().max().cloned().unwrap_or_else(Rat::zero);
                let max_t = set_t.iter().max().cloned().unwrap_or_else(Rat::zero);
                let ok = match (semantics, scheduler) {
                    (RelationSemantics::TrSup, _) => max_s <= max_t,
                    // Randomized per-trace sets are the intervals [0, max].
                    (RelationSemantics::TrTbt, SchedulerClass::Rand) => max_s <= max_t,
                    (RelationSemantics::TrTbt, SchedulerClass::Det) => {
                        set_s.iter().all(|v| set_t.contains(v))
                    }
                    _ => unreachable!(),
                };
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => {
            let suite = suite.ok_or_else(|| {
                Error::Invalid("testing relation requires a suite".to_string())
            })?;
            for e in suite.iter() {
                let sys_s = build_interaction_system(p, s, &e.test);
                let sys_t = build_interaction_system(p, t, &e.test);
                let ds = interaction_depth(&sys_s)?.max(depth);
                let dt = interaction_depth(&sys_t)?.max(depth);
                let horizon = ds.max(dt);
                let rs = enumerate_det_resolutions(sys_s.pts(), sys_s.root(), horizon, true, caps)?;
                let rt = enumerate_det_resolutions(sys_t.pts(), sys_t.root(), horizon, true, caps)?;
                let vals_s: Vec<(BTreeMap<Trace, Rat>, Rat)> =
                    rs.iter().map(|r| success_values(r, &sys_s, horizon)).collect();
                let vals_t: Vec<(BTreeMap<Trace, Rat>, Rat)> =
                    rt.iter().map(|r| success_values(r, &sys_t, horizon)).collect();
                let whole_s: Vec<Rat> = vals_s.iter().map(|(_, w)| w.clone()).collect();
                let whole_t: Vec<Rat> = vals_t.iter().map(|(_, w)| w.clone()).collect();
                let sup_s = whole_s.iter().max().cloned().unwrap_or_else(Rat::zero);
                let sup_t = whole_t.iter().max().cloned().unwrap_or_else(Rat::zero);
                let inf_s = whole_s.iter().min().cloned().unwrap_or_else(Rat::zero);
                let inf_t = whole_t.iter().min().cloned().unwrap_or_else(Rat::zero);
                let ok = match semantics {
                    RelationSemantics::TeMay => sup_s <= sup_t,
                    RelationSemantics::TeMust => inf_s <= inf_t,
                    RelationSemantics::TeMayMust => sup_s <= sup_t && inf_s <= inf_t,
                    RelationSemantics::TeTbt | RelationSemantics::TeSup => {
                        let mut traces: Vec<Trace> = Vec::new();
                        for (m, _) in vals_s.iter().chain(vals_t.iter()) {
                            for k in m.keys() {
                                if !traces.contains(k) {
                                    traces.push(k.clone());
                                }
                            }
                        }
                        traces.iter().all(|alpha| {
                            let set_s: Vec<Rat> = vals_s
                                .iter()
                                .map(|(m, _)| m.get(alpha).cloned().unwrap_or_else(Rat::zero))
                                .collect();
                            let set_t: Vec<Rat> = vals_t
                                .iter()
                                .map(|(m, _)| m.get(alpha).cloned().unwrap_or_else(Rat::zero))
                                .collect();
                            match (semantics, scheduler) {
                                (RelationSemantics::TeSup, _) => {
                                    set_s.iter().max() <= set_t.iter().max()
                                }
                                (RelationSemantics::TeTbt, SchedulerClass::Det) => {
                                    set_s.iter().all(|v| set_t.contains(v))
                                }
                                (RelationSemantics::TeTbt, SchedulerClass::Rand) => {
                                    // Interval inclusion of the hulls.
                                    set_t.iter().min() <= set_s.iter().min()
                                        && set_s.iter().max() <= set_t.iter().max()
                                }
                                _ => unreachable!(),
                            }
                        })
                    }
                    _ => unreachable!(),
                };
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Direct equivalence: the preorder in both directions.
pub fn direct_equivalence(
    p: &Pts,
    s: StateId,
    t: StateId,
    semantics: RelationSemantics,
    scheduler: SchedulerClass,
    depth: usize,
    suite: Option<&TestSuite>,
    caps: &Caps,
) -> Result<bool> {
    Ok(
        direct_preorder(p, s, t, semantics, scheduler, depth, suite, caps)?
            && direct_preorder(p, t, s, semantics, scheduler, depth, suite, caps)?,
    )
}

// ---------------------------------------------------------------------------
// ε-robustness.
// ---------------------------------------------------------------------------

/// Which hemimetric direction a robustness query asks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobustnessView {
    /// h(spec, impl) ≤ ε: the implementation guarantees the specification's
    /// probabilities up to ε from below.
    SpecToImpl,
    /// h(impl, spec) ≤ ε: the implementation exceeds the specification's
    /// probabilities by at most ε.
    ImplToSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct RobustnessVerdict {
    pub verdict: Verdict,
    pub measured: MetricResult,
    pub epsilon: Rat,
    pub view: RobustnessView,
}

/// Distance selector for robustness queries.
#[derive(Debug, Clone)]
pub enum MetricSelector {
    Trace(TraceMetricSpec),
    Testing(TestingMetricSpec, TestSuite),
}

/// Combines two systems into one disjoint model so cross-system states can be
/// compared; returns the images of the two roots.
pub fn disjoint_union(a: (&Pts, StateId), b: (&Pts, StateId)) -> (Pts, StateId, StateId) {
    let (pa, ra) = a;
    let (pb, rb) = b;
    let mut prefix_a = pa.name().to_string();
    let mut prefix_b = pb.name().to_string();
    if prefix_a == prefix_b {
        prefix_a.push_str("#1");
        prefix_b.push_str("#2");
    }
    let mut states: Vec<String> = Vec::new();
    for s in pa.state_names() {
        states.push(format!("{prefix_a}.{s}"));
    }
    for s in pb.state_names() {
        states.push(format!("{prefix_b}.{s}"));
    }
    let mut actions: Vec<String> = pa.action_names().to_vec();
    for x in pb.action_names() {
        if !actions.contains(x) {
            actions.push(x.clone());
        }
    }
    let act_of = |p: &Pts, a: crate::pts::ActionId| -> usize {
        let name = p.action_name(a);
        actions.iter().position(|x| x == name).unwrap()
    };
    let offset = pa.num_states();
    let mut transitions = Vec::new();
    for s in pa.states() {
        for t in pa.transitions_from(s) {
            transitions.push((
                s.0,
                act_of(pa, t.label),
                t.target.iter().map(|(c, p)| (c.0, p.clone())).collect(),
            ));
        }
    }
    for s in pb.states() {
        for t in pb.transitions_from(s) {
            transitions.push((
                s.0 + offset,
                act_of(pb, t.label),
                t.target
                    .iter()
                    .map(|(c, p)| (c.0 + offset, p.clone()))
                    .collect(),
            ));
        }
    }
    let name = format!("{prefix_a}+{prefix_b}");
    let pts = Pts::new(name, states, actions, ra.0, transitions)
        .expect("union of valid systems is valid");
    (pts, ra, StateId(rb.0 + offset))
}

/// ε-robustness of an implementation against a specification in the selected
/// semantics and direction.
pub fn check_robustness(
    spec_side: (&Pts, StateId),
    impl_side: (&Pts, StateId),
    epsilon: &Rat,
    view: RobustnessView,
    selector: &MetricSelector,
    caps: &Caps,
) -> Result<RobustnessVerdict> {
    if epsilon.is_negative() {
        return Err(Error::Invalid(format!("tolerance ε = {epsilon} is negative")));
    }
    let (union, spec_root, impl_root) = disjoint_union(spec_side, impl_side);
    let (from, to) = match view {
        RobustnessView::SpecToImpl => (spec_root, impl_root),
        RobustnessView::ImplToSpec => (impl_root, spec_root),
    };
    let measured = match selector {
        MetricSelector::Trace(spec) => {
            let mut spec = spec.clone();
            spec.direction = Direction::LeftHemi;
            trace_distance(&union, from, to, &spec, caps)?
        }
        MetricSelector::Testing(spec, suite) => {
            let mut spec = spec.clone();
            spec.direction = Direction::LeftHemi;
            testing_distance(&union, from, to, suite, &spec, caps)?
        }
    };
    let verdict = if measured.value > *epsilon {
        Verdict::Fails
    } else if measured.exact || &measured.value + &measured.truncation_bound <= *epsilon {
        Verdict::Holds
    } else {
        Verdict::Inconclusive
    };
    Ok(RobustnessVerdict {
        verdict,
        measured,
        epsilon: epsilon.clone(),
        view,
    })
}

// ---------------------------------------------------------------------------
// Backward compatibility on the restricted classes.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackwardReport {
    /// Which restricted class the check ran under.
    pub class: &'static str,
    /// Does the supremal-probabilities equivalence hold (det schedulers)?
    pub sup_det: bool,
    /// Does it hold under randomized schedulers?
    pub sup_rand: bool,
    /// The classical reference relation for the class: trace-set equality for
    /// fully nondeterministic systems, per-trace probability equality for
    /// fully probabilistic ones. Depth-bounded.
    pub reference: bool,
    pub agree: bool,
}

/// Checks that the supremal-probabilities equivalences collapse to the
/// classical relation on the restricted classes.
pub fn check_backward_compat(
    p: &Pts,
    s: StateId,
    t: StateId,
    depth: usize,
    caps: &Caps,
) -> Result<BackwardReport> {
    let class = p.classify();
    let (class_name, reference) = if class.fully_nondeterministic {
        // Trace-set equality up to depth.
        let trie_s = realizable_trace_trie(p, &[s], depth);
        let trie_t = realizable_trace_trie(p, &[t], depth);
        let set = |trie: &TraceTrie| -> Vec<Trace> {
            trie.nonempty_nodes().map(|n| trie.trace_of(n)).collect()
        };
        ("fully-nondeterministic", set(&trie_s) == set(&trie_t))
    } else if class.fully_probabilistic {
        // Per-trace probability equality up to depth; a fully probabilistic
        // system has a single maximal resolution, whose trace values are the
        // Bellman maxima.
        let trie = realizable_trace_trie(p, &[s, t], depth);
        let equal = trie.nonempty_nodes().all(|n| {
            let trace = trie.trace_of(n);
            crate::achievable::max_trace_prob(p, s, &trace)
                == crate::achievable::max_trace_prob(p, t, &trace)
        });
        ("fully-probabilistic", equal)
    } else {
        return Err(Error::Invalid(
            "backward compatibility requires a fully nondeterministic or fully probabilistic system"
                .to_string(),
        ));
    };
    let outcome = |sched: SchedulerClass| -> Result<bool> {
        let spec = TraceMetricSpec::new(TraceApproach::Sup, sched, Rat::one(), depth);
        Ok(trace_distance(p, s, t, &spec, caps)?.value.is_zero())
    };
    let sup_det = outcome(SchedulerClass::Det)?;
    let sup_rand = outcome(SchedulerClass::Rand)?;
    Ok(BackwardReport {
        class: class_name,
        sup_det,
        sup_rand,
        reference,
        agree: sup_det == reference && sup_rand == reference,
    })
}

/// Exposes the strict non-expansiveness bound used by the property suites:
/// `d(s1,t1) + d(s2,t2) − d(s1,t1)·d(s2,t2)`.
pub fn strict_bound(d1: &Rat, d2: &Rat) -> Rat {
    &(d1 + d2) - &(d1 * d2)
}

/// Composes the pairs and evaluates a trace distance on the products,
/// returning (composed distance, component distances).
pub fn composed_trace_distance(
    p: &Pts,
    pairs: ((StateId, StateId), (StateId, StateId)),
    spec: &TraceMetricSpec,
    caps: &Caps,
) -> Result<(Rat, Rat, Rat)> {
    let ((s1, t1), (s2, t2)) = pairs;
    let d1 = trace_distance(p, s1, t1, spec, caps)?.value;
    let d2 = trace_distance(p, s2, t2, spec, caps)?.value;
    let left = parallel_compose(p, p, (s1, s2), true);
    let right = parallel_compose(p, p, (t1, t2), true);
    let (union, ls, rt) = disjoint_union((&left.pts, StateId(0)), (&right.pts, StateId(0)));
    let composed = trace_distance(&union, ls, rt, spec, caps)?.value;
    Ok((composed, d1, d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn query(
        semantics: RelationSemantics,
        kind: RelationKind,
        scheduler: SchedulerClass,
    ) -> RelationQuery {
        RelationQuery {
            semantics,
            kind,
            scheduler,
            depth: 2,
        }
    }

    #[test]
    fn fig2_zero_skew_relations() {
        let p = gallery::fig2(&r(0, 1), &r(0, 1));
        let s = p.state_by_name("s").unwrap();
        let t = p.state_by_name("t").unwrap();
        let tbt_eq = query(
            RelationSemantics::TrTbt,
            RelationKind::Equivalence,
            SchedulerClass::Det,
        );
        assert!(check_relation(&p, s, t, &tbt_eq, None, &Caps::default())
            .unwrap()
            .holds);
        let dis_eq = query(
            RelationSemantics::TrDis,
            RelationKind::Equivalence,
            SchedulerClass::Det,
        );
        let out = check_relation(&p, s, t, &dis_eq, None, &Caps::default()).unwrap();
        assert!(!out.holds);
        assert!(out.measured.witness.is_some());
    }

    #[test]
    fn fig3_sup_vs_tbt() {
        let p = gallery::fig3();
        let s = p.state_by_name("s").unwrap();
        let t = p.state_by_name("t").unwrap();
        let sup_eq = query(
            RelationSemantics::TrSup,
            RelationKind::Equivalence,
            SchedulerClass::Det,
        );
        assert!(check_relation(&p, s, t, &sup_eq, None, &Caps::default())
            .unwrap()
            .holds);
        let tbt_eq = query(
            RelationSemantics::TrTbt,
            RelationKind::Equivalence,
            SchedulerClass::Det,
        );
        assert!(!check_relation(&p, s, t, &tbt_eq, None, &Caps::default())
            .unwrap()
            .holds);
    }

    #[test]
    fn direct_deciders_agree_on_fig3() {
        let p = gallery::fig3();
        let s = p.state_by_name("s").unwrap();
        let t = p.state_by_name("t").unwrap();
        let caps = Caps::default();
        assert!(direct_equivalence(
            &p,
            s,
            t,
            RelationSemantics::TrSup,
            SchedulerClass::Det,
            2,
            None,
            &caps
        )
        .unwrap());
        assert!(!direct_equivalence(
            &p,
            s,
            t,
            RelationSemantics::TrTbt,
            SchedulerClass::Det,
            2,
            None,
            &caps
        )
        .unwrap());
        // Testing: t vs u with o1 under must differs, under may coincides.
        let u = p.state_by_name("u").unwrap();
        let tt = p.state_by_name("t").unwrap();
        let suite = TestSuite::from_tests(vec![gallery::test_o1()]).unwrap();
        assert!(direct_equivalence(
            &p,
            tt,
            u,
            RelationSemantics::TeMay,
            SchedulerClass::Det,
            2,
            Some(&suite),
            &caps
        )
        .unwrap());
        assert!(!direct_equivalence(
            &p,
            tt,
            u,
            RelationSemantics::TeMust,
            SchedulerClass::Det,
            2,
            Some(&suite),
            &caps
        )
        .unwrap());
    }

    #[test]
    fn robustness_examples() {
        let spec_sys = gallery::fig1(&r(1, 2));
        let t = spec_sys.state_by_name("t").unwrap();
        // Implementation s_{1/2}: h_tbt(t, s_{1/2}) = 0 ≤ 1/10.
        let selector = MetricSelector::Trace(TraceMetricSpec::new(
            TraceApproach::Tbt,
            SchedulerClass::Det,
            Rat::one(),
            2,
        ));
        let impl_ok = gallery::fig1(&r(1, 2));
        let sp_ok = impl_ok.state_by_name("sp").unwrap();
        let v = check_robustness(
            (&spec_sys, t),
            (&impl_ok, sp_ok),
            &r(1, 10),
            RobustnessView::SpecToImpl,
            &selector,
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
        // Implementation s_{1/10}: h = 2/5 > 1/10.
        let impl_bad = gallery::fig1(&r(1, 10));
        let sp_bad = impl_bad.state_by_name("sp").unwrap();
        let v = check_robustness(
            (&spec_sys, t),
            (&impl_bad, sp_bad),
            &r(1, 10),
            RobustnessView::SpecToImpl,
            &selector,
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Fails);
        assert_eq!(v.measured.value, r(2, 5));
        // ε = 1 always holds.
        let v = check_robustness(
            (&spec_sys, t),
            (&impl_bad, sp_bad),
            &Rat::one(),
            RobustnessView::SpecToImpl,
            &selector,
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Holds);
    }

    #[test]
    fn robustness_inconclusive_on_unbounded_tail() {
        use crate::gallery::PtsBuilder;
        // Cyclic at λ = 1: value 0 but no bound, ε < 1 is inconclusive.
        let mut b = PtsBuilder::new("cyc");
        b.root("x");
        b.trans("x", "a", &[("x", r(1, 1))]);
        b.trans("y", "a", &[("y", r(1, 1))]);
        let p = b.build();
        let x = p.state_by_name("x").unwrap();
        let y = p.state_by_name("y").unwrap();
        let selector = MetricSelector::Trace(TraceMetricSpec::new(
            TraceApproach::Sup,
            SchedulerClass::Det,
            Rat::one(),
            2,
        ));
        let v = check_robustness(
            (&p, x),
            (&p, y),
            &r(1, 2),
            RobustnessView::SpecToImpl,
            &selector,
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn backward_compat_classes() {
        use crate::gallery::PtsBuilder;
        // Fully nondeterministic: all-Dirac.
        let mut b = PtsBuilder::new("fn");
        b.root("s");
        b.trans("s", "a", &[("s1", r(1, 1))]);
        b.trans("s", "b", &[("s2", r(1, 1))]);
        b.trans("t", "a", &[("t1", r(1, 1))]);
        b.trans("t", "b", &[("t2", r(1, 1))]);
        let p = b.build();
        let rep = check_backward_compat(
            &p,
            p.state_by_name("s").unwrap(),
            p.state_by_name("t").unwrap(),
            2,
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(rep.class, "fully-nondeterministic");
        assert!(rep.reference && rep.sup_det && rep.sup_rand && rep.agree);

        // Fully probabilistic with one differing probability.
        let mut b = PtsBuilder::new("fp");
        b.root("s");
        b.trans("s", "a", &[("s1", r(1, 2)), ("nil", r(1, 2))]);
        b.trans("s1", "b", &[("nil", r(1, 1))]);
        b.trans("t", "a", &[("t1", r(1, 3)), ("nil", r(2, 3))]);
        b.trans("t1", "b", &[("nil", r(1, 1))]);
        let p = b.build();
        let rep = check_backward_compat(
            &p,
            p.state_by_name("s").unwrap(),
            p.state_by_name("t").unwrap(),
            2,
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(rep.class, "fully-probabilistic");
        assert!(!rep.reference && !rep.sup_det && !rep.sup_rand && rep.agree);

        // Reflexivity.
        let rep = check_backward_compat(
            &p,
            p.state_by_name("s").unwrap(),
            p.state_by_name("s").unwrap(),
            2,
            &Caps::default(),
        )
        .unwrap();
        assert!(rep.reference && rep.agree);

        // Wrong class rejected.
        let general = gallery::fig3();
        assert!(check_backward_compat(
            &general,
            general.state_by_name("s").unwrap(),
            general.state_by_name("t").unwrap(),
            2,
            &Caps::default(),
        )
        .is_err());
    }

    #[test]
    fn tightness_of_strict_bound_on_fig3() {
        let p = gallery::fig3();
        let zs = p.state_by_name("zs").unwrap();
        let zt = p.state_by_name("zt").unwrap();
        let spec = TraceMetricSpec::new(TraceApproach::Tbt, SchedulerClass::Det, Rat::one(), 2);
        let (composed, d1, d2) =
            composed_trace_distance(&p, ((zs, zt), (zs, zt)), &spec, &Caps::default()).unwrap();
        assert_eq!(d1, r(1, 2));
        assert_eq!(d2, r(1, 2));
        assert_eq!(composed, r(3, 4));
        assert_eq!(composed, strict_bound(&d1, &d2));
    }
}
