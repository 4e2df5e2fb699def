//! Achievable probability sets.
//!
//! For a state, a trace and a resolution class, the achievable set is the set
//! of probabilities that resolutions of that class assign to the trace (or,
//! success-filtered, to the successful completions of the trace).
//! Deterministic classes yield finite point sets; randomized classes yield
//! closed intervals, since the randomized vectors form the convex hull of the
//! deterministic ones.

use std::collections::BTreeSet;

use crate::pts::{Pts, StateId, Trace};
use crate::rat::Rat;
use crate::resolution::{det_vector_set, SchedulerClass, SchedulerMode, TraceTrie};
use crate::{Caps, Error, Result};

/// A finite union of disjoint closed rational intervals inside `[0,1]`.
/// Points are degenerate intervals. Kept normalized: sorted and merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AchievableSet {
    components: Vec<(Rat, Rat)>,
}

impl AchievableSet {
    pub fn from_points(points: impl IntoIterator<Item = Rat>) -> Self {
        Self::from_intervals(points.into_iter().map(|p| (p.clone(), p)))
    }

    pub fn from_intervals(intervals: impl IntoIterator<Item = (Rat, Rat)>) -> Self {
        let mut items: Vec<(Rat, Rat)> = intervals
            .into_iter()
            .inspect(|(lo, hi)| {
                assert!(lo <= hi, "reversed interval");
            })
            .collect();
        items.sort();
        let mut components: Vec<(Rat, Rat)> = Vec::new();
        for (lo, hi) in items {
            match components.last_mut() {
                Some((_, last_hi)) if lo <= *last_hi => {
                    if hi > *last_hi {
                        *last_hi = hi;
                    }
                }
                _ => components.push((lo, hi)),
            }
        }
        AchievableSet { components }
    }

    pub fn interval(lo: Rat, hi: Rat) -> Self {
        Self::from_intervals([(lo, hi)])
    }

    pub fn components(&self) -> &[(Rat, Rat)] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// True when every component is a single point.
    pub fn is_discrete(&self) -> bool {
        self.components.iter().all(|(lo, hi)| lo == hi)
    }

    pub fn min(&self) -> Option<&Rat> {
        self.components.first().map(|(lo, _)| lo)
    }

    pub fn max(&self) -> Option<&Rat> {
        self.components.last().map(|(_, hi)| hi)
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.components.iter().any(|(lo, hi)| lo <= x && x <= hi)
    }

    pub fn is_subset_of(&self, other: &AchievableSet) -> bool {
        self.components.iter().all(|(lo, hi)| {
            other
                .components
                .iter()
                .any(|(olo, ohi)| olo <= lo && hi <= ohi)
        })
    }

    /// Distance from a point to the set.
    pub fn distance_from(&self, x: &Rat) -> Rat {
        assert!(!self.is_empty(), "distance from empty set");
        let mut best: Option<Rat> = None;
        for (lo, hi) in &self.components {
            let d = if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                Rat::zero()
            };
            best = Some(match best {
                None => d,
                Some(b) => b.min(d),
            });
        }
        best.unwrap()
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(lo, hi)| {
                if lo == hi {
                    format!("{{{lo}}}")
                } else {
                    format!("[{lo},{hi}]")
                }
            })
            .collect();
        if parts.is_empty() {
            "∅".to_string()
        } else {
            parts.join(" ∪ ")
        }
    }
}

/// One-sided Hausdorff distance `sup_{x∈a} inf_{y∈b} |x−y|`, exactly.
///
/// The supremum over a closed union is attained either at a component
/// endpoint of `a` or at a midpoint of a gap of `b` lying inside `a`.
pub fn hausdorff_one_sided(a: &AchievableSet, b: &AchievableSet) -> Result<Rat> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Invalid(
            "one-sided Hausdorff distance over an empty set".to_string(),
        ));
    }
    let mut candidates: Vec<Rat> = Vec::new();
    for (lo, hi) in a.components() {
        candidates.push(lo.clone());
        candidates.push(hi.clone());
    }
    let two = Rat::from_int(2);
    for w in b.components().windows(2) {
        let (_, hi_prev) = &w[0];
        let (lo_next, _) = &w[1];
        let mid = &(hi_prev + lo_next) / &two;
        if a.contains(&mid) {
            candidates.push(mid);
        }
    }
    let mut best = Rat::zero();
    for x in candidates {
        let d = b.distance_from(&x);
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

/// Bellman objective over forced (maximal) trace-following.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Min,
    Max,
}

/// Extremal probability of realizing `trace` (success-filtered when
/// `success` is given) over maximal resolutions, by exact dynamic
/// programming.
///
/// For `Max` the value also equals the supremum over non-maximal and over
/// randomized resolutions; for `Min` maximality is essential (halting would
/// trivialize the infimum).
pub fn extremal_trace_prob(
    p: &Pts,
    root: StateId,
    trace: &Trace,
    success: Option<&[bool]>,
    which: Extreme,
) -> Rat {
    fn go(
        p: &Pts,
        s: StateId,
        trace: &Trace,
        at: usize,
        success: Option<&[bool]>,
        which: Extreme,
        memo: &mut std::collections::BTreeMap<(StateId, usize), Rat>,
    ) -> Rat {
        if at == trace.len() {
            return match success {
                Some(succ) => {
                    if succ[s.0] {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                }
                None => Rat::one(),
            };
        }
        if let Some(v) = memo.get(&(s, at)) {
            return v.clone();
        }
        let needed = trace.0[at];
        let ts = p.transitions_from(s);
        let mut result: Option<Rat> = None;
        for t in ts {
            let value = if t.label == needed {
                let mut acc = Rat::zero();
                for (child, prob) in t.target.iter() {
                    let v = go(p, child, trace, at + 1, success, which, memo);
                    acc += &(prob * &v);
                }
                acc
            } else {
                Rat::zero()
            };
            result = Some(match (result, which) {
                (None, _) => value,
                (Some(r), Extreme::Max) => r.max(value),
                (Some(r), Extreme::Min) => r.min(value),
            });
        }
        let out = result.unwrap_or_else(Rat::zero);
        memo.insert((s, at), out.clone());
        out
    }
    let mut memo = std::collections::BTreeMap::new();
    let v = go(p, root, trace, 0, success, which, &mut memo);
    match which {
        // A non-maximal maximum may also halt, but halting yields 0 ≤ max.
        Extreme::Max => v,
        Extreme::Min => v,
    }
}

/// Supremum of `Pr(C(z, trace))` over all resolutions: the Bellman maximum.
pub fn max_trace_prob(p: &Pts, root: StateId, trace: &Trace) -> Rat {
    extremal_trace_prob(p, root, trace, None, Extreme::Max)
}

/// The achievable set of `trace` from `root` under the given scheduler mode,
/// success-filtered when `success` is provided (testing semantics).
pub fn achievable_set(
    p: &Pts,
    root: StateId,
    trace: &Trace,
    mode: SchedulerMode,
    success: Option<&[bool]>,
    caps: &Caps,
) -> Result<AchievableSet> {
    match mode.class {
        SchedulerClass::Det => {
            let mut trie = TraceTrie::new();
            let node = trie.insert(trace);
            let vectors = det_vector_set(p, root, &trie, mode.maximal, success, caps)?;
            let points: BTreeSet<Rat> = vectors.into_iter().map(|v| v[node].clone()).collect();
            Ok(AchievableSet::from_points(points))
        }
        SchedulerClass::Rand => {
            let hi = extremal_trace_prob(p, root, trace, success, Extreme::Max);
            let lo = if mode.maximal {
                extremal_trace_prob(p, root, trace, success, Extreme::Min)
            } else {
                // Sub-stochastic halting convexifies down to zero.
                Rat::zero()
            };
            Ok(AchievableSet::interval(lo, hi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::pts::ActionId;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn set(points: &[Rat]) -> AchievableSet {
        AchievableSet::from_points(points.iter().cloned())
    }

    fn trace(p: &Pts, labels: &[&str]) -> Trace {
        Trace(
            labels
                .iter()
                .map(|l| p.action_by_name(l).unwrap())
                .collect(),
        )
    }

    #[test]
    fn normalization_merges_and_sorts() {
        let s = AchievableSet::from_intervals([
            (r(1, 2), r(3, 4)),
            (r(0, 1), r(1, 4)),
            (r(1, 4), r(1, 2)),
        ]);
        assert_eq!(s.components(), &[(r(0, 1), r(3, 4))]);
        let d = AchievableSet::from_points([r(1, 2), r(0, 1), r(1, 2)]);
        assert_eq!(d.components().len(), 2);
        assert!(d.is_discrete());
    }

    #[test]
    fn hausdorff_examples() {
        // Points against points with an off-grid middle element.
        let a = set(&[r(0, 1), r(1, 2), r(1, 1)]);
        let b = set(&[r(0, 1), r(1, 10), r(1, 1)]);
        assert_eq!(hausdorff_one_sided(&a, &b).unwrap(), r(2, 5));
        // Identity.
        assert_eq!(hausdorff_one_sided(&a, &a).unwrap(), Rat::zero());
        // Full interval against its endpoints: gap midpoint decides.
        let full = AchievableSet::interval(r(0, 1), r(1, 1));
        let ends = set(&[r(0, 1), r(1, 1)]);
        assert_eq!(hausdorff_one_sided(&full, &ends).unwrap(), r(1, 2));
        // Asymmetry.
        assert_eq!(hausdorff_one_sided(&ends, &full).unwrap(), Rat::zero());
    }

    #[test]
    fn hausdorff_rejects_empty() {
        let a = set(&[r(1, 2)]);
        let empty = AchievableSet::from_points(Vec::<Rat>::new());
        assert!(hausdorff_one_sided(&a, &empty).is_err());
        assert!(hausdorff_one_sided(&empty, &a).is_err());
    }

    #[test]
    fn fig1_trace_ab_sets() {
        let p = gallery::fig1(&r(1, 10));
        let t = p.state_by_name("t").unwrap();
        let sp = p.state_by_name("sp").unwrap();
        let ab = trace(&p, &["a", "b"]);
        let det = SchedulerMode::det();
        let t_set = achievable_set(&p, t, &ab, det, None, &Caps::default()).unwrap();
        assert_eq!(t_set, set(&[r(0, 1), r(1, 2), r(1, 1)]));
        let sp_set = achievable_set(&p, sp, &ab, det, None, &Caps::default()).unwrap();
        assert_eq!(sp_set, set(&[r(0, 1), r(1, 10), r(1, 1)]));
        // Randomized non-maximal: the full interval up to the maximum.
        let sp_rand = achievable_set(&p, sp, &ab, SchedulerMode::rand(), None, &Caps::default())
            .unwrap();
        assert_eq!(sp_rand, AchievableSet::interval(r(0, 1), r(1, 1)));
    }

    #[test]
    fn max_trace_prob_examples() {
        let p = gallery::fig1(&r(1, 10));
        let t = p.state_by_name("t").unwrap();
        let ab = trace(&p, &["a", "b"]);
        assert_eq!(max_trace_prob(&p, t, &ab), Rat::one());
        assert_eq!(max_trace_prob(&p, t, &Trace::empty()), Rat::one());
        let f3 = gallery::fig3();
        for root in ["s", "t"] {
            let s = f3.state_by_name(root).unwrap();
            let ab3 = trace(&f3, &["a", "b"]);
            assert_eq!(max_trace_prob(&f3, s, &ab3), Rat::one());
        }
    }

    #[test]
    fn det_max_equals_rand_max_equals_bellman() {
        let p = gallery::fig3();
        let u = p.state_by_name("u").unwrap();
        let ab = trace(&p, &["a", "b"]);
        let det = achievable_set(&p, u, &ab, SchedulerMode::det(), None, &Caps::default()).unwrap();
        let rand =
            achievable_set(&p, u, &ab, SchedulerMode::rand(), None, &Caps::default()).unwrap();
        let bellman = max_trace_prob(&p, u, &ab);
        assert_eq!(det.max(), Some(&bellman));
        assert_eq!(rand.max(), Some(&bellman));
    }

    #[test]
    fn nonmaximal_sets_contain_zero() {
        let p = gallery::fig3();
        let t = p.state_by_name("t").unwrap();
        let ab = trace(&p, &["a", "b"]);
        for mode in [SchedulerMode::det(), SchedulerMode::rand()] {
            let s = achievable_set(&p, t, &ab, mode, None, &Caps::default()).unwrap();
            assert!(s.contains(&Rat::zero()));
        }
    }

    #[test]
    fn unknown_action_trace_is_zero() {
        let p = gallery::fig3();
        let t = p.state_by_name("t").unwrap();
        let bogus = Trace(vec![ActionId(1), ActionId(1)]);
        assert_eq!(max_trace_prob(&p, t, &bogus), Rat::zero());
    }
}
