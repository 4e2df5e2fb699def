//! Optimal success probabilities on interaction systems.
//!
//! Acyclic systems use direct dynamic programming. Cyclic systems use policy
//! iteration over memoryless deterministic schedulers with exact rational
//! linear-system solves per policy, which terminates with the exact optimum.
//! Maximality is built in: halting is possible only at deadlocks, so a
//! policy always picks some transition where one exists.

use std::collections::{BTreeSet, VecDeque};

use crate::npt::InteractionSystem;
use crate::pts::{Pts, StateId};
use crate::rat::Rat;

/// Optimize for the supremum or the infimum success probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Sup,
    Inf,
}

/// Exact optimal probability of reaching a success configuration from the
/// root of the interaction system, over maximal resolutions.
pub fn opt_success_prob(sys: &InteractionSystem, objective: Objective) -> Rat {
    let p = sys.pts();
    let success: Vec<bool> = (0..p.num_states())
        .map(|i| sys.is_successful(StateId(i)))
        .collect();
    opt_reach_prob(p, sys.root(), &success, objective)
}

/// Optimal probability of reaching a target state set, over maximal
/// schedulers, from `root`.
pub fn opt_reach_prob(p: &Pts, root: StateId, target: &[bool], objective: Objective) -> Rat {
    if p.structure_info(root).acyclic {
        dp_acyclic(p, root, target, objective)
    } else {
        policy_iteration(p, root, target, objective)
    }
}

/// Direct DP for acyclic systems.
pub fn dp_acyclic(p: &Pts, root: StateId, target: &[bool], objective: Objective) -> Rat {
    fn go(
        p: &Pts,
        s: StateId,
        target: &[bool],
        objective: Objective,
        memo: &mut Vec<Option<Rat>>,
    ) -> Rat {
        if let Some(v) = &memo[s.0] {
            return v.clone();
        }
        let v = if target[s.0] {
            Rat::one()
        } else {
            let mut best: Option<Rat> = None;
            for t in p.transitions_from(s) {
                let mut acc = Rat::zero();
                for (child, prob) in t.target.iter() {
                    let cv = go(p, child, target, objective, memo);
                    acc += &(prob * &cv);
                }
                best = Some(match (best, objective) {
                    (None, _) => acc,
                    (Some(b), Objective::Sup) => b.max(acc),
                    (Some(b), Objective::Inf) => b.min(acc),
                });
            }
            best.unwrap_or_else(Rat::zero)
        };
        memo[s.0] = Some(v.clone());
        v
    }
    let mut memo = vec![None; p.num_states()];
    go(p, root, target, objective, &mut memo)
}

/// States from which some scheduler avoids the target with probability one
/// (greatest fixpoint: keep a state while it is a non-target deadlock or has
/// a transition whose entire support stays inside the set).
fn min_zero_states(p: &Pts, target: &[bool]) -> Vec<bool> {
    let mut avoid: Vec<bool> = (0..p.num_states()).map(|i| !target[i]).collect();
    loop {
        let mut changed = false;
        for s in p.states() {
            if !avoid[s.0] {
                continue;
            }
            let ts = p.transitions_from(s);
            let ok = ts.is_empty()
                || ts
                    .iter()
                    .any(|t| t.target.support().all(|c| avoid[c.0]));
            if !ok {
                avoid[s.0] = false;
                changed = true;
            }
        }
        if !changed {
            return avoid;
        }
    }
}

/// Exact reach probabilities of the Markov chain induced by a policy.
/// `policy[s]` is a transition index for every state with transitions.
fn evaluate_policy(p: &Pts, target: &[bool], pinned_zero: &[bool], policy: &[usize]) -> Vec<Rat> {
    let n = p.num_states();
    // States that can reach a target state in the chain graph.
    let mut can_reach = target.to_vec();
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| target[i]).collect();
    // Reverse adjacency under the policy.
    let mut preds: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for s in p.states() {
        if target[s.0] || pinned_zero[s.0] || p.is_deadlock(s) {
            continue;
        }
        let t = &p.transitions_from(s)[policy[s.0]];
        for (c, _) in t.target.iter() {
            preds[c.0].insert(s.0);
        }
    }
    while let Some(i) = queue.pop_front() {
        for &q in &preds[i] {
            if !can_reach[q] {
                can_reach[q] = true;
                queue.push_back(q);
            }
        }
    }

    let mut values = vec![Rat::zero(); n];
    for i in 0..n {
        if target[i] {
            values[i] = Rat::one();
        }
    }
    // Unknowns: states that can reach the target, are not targets, are not
    // pinned to zero, and are not deadlocked.
    let unknowns: Vec<usize> = (0..n)
        .filter(|&i| can_reach[i] && !target[i] && !pinned_zero[i] && !p.is_deadlock(StateId(i)))
        .collect();
    if unknowns.is_empty() {
        return values;
    }
    let index: std::collections::BTreeMap<usize, usize> = unknowns
        .iter()
        .enumerate()
        .map(|(k, &s)| (s, k))
        .collect();
    let m = unknowns.len();
    // Solve (I - Q) x = b.
    let mut a: Vec<Vec<Rat>> = vec![vec![Rat::zero(); m + 1]; m];
    for (k, &s) in unknowns.iter().enumerate() {
        a[k][k] = Rat::one();
        let t = &p.transitions_from(StateId(s))[policy[s]];
        for (c, prob) in t.target.iter() {
            if target[c.0] {
                a[k][m] += prob;
            } else if let Some(&j) = index.get(&c.0) {
                a[k][j] = &a[k][j] - prob;
            }
        }
    }
    gauss_solve(&mut a);
    for (k, &s) in unknowns.iter().enumerate() {
        values[s] = a[k][m].clone();
    }
    values
}

/// In-place Gaussian elimination on an augmented matrix with a unique
/// solution; leaves the solution in the last column.
fn gauss_solve(a: &mut [Vec<Rat>]) {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| !a[r][col].is_zero())
            .expect("singular policy-evaluation system");
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let prow = a[col].clone();
                for (x, pv) in a[r].iter_mut().zip(prow.iter()) {
                    *x = &*x - &(&f * pv);
                }
            }
        }
    }
}

/// Exact policy iteration for cyclic systems.
fn policy_iteration(p: &Pts, root: StateId, target: &[bool], objective: Objective) -> Rat {
    let n = p.num_states();
    let pinned_zero = match objective {
        Objective::Inf => min_zero_states(p, target),
        Objective::Sup => vec![false; n],
    };
    // Initial policy: first enabled transition.
    let mut policy = vec![0usize; n];
    let mut values = evaluate_policy(p, target, &pinned_zero, &policy);
    for i in 0..n {
        if pinned_zero[i] {
            values[i] = Rat::zero();
        }
    }
    loop {
        let mut changed = false;
        for s in p.states() {
            if target[s.0] || pinned_zero[s.0] || p.is_deadlock(s) {
                continue;
            }
            let mut best_idx = policy[s.0];
            let mut best_val = values[s.0].clone();
            for (i, t) in p.transitions_from(s).iter().enumerate() {
                let mut acc = Rat::zero();
                for (c, prob) in t.target.iter() {
                    let cv = if pinned_zero[c.0] {
                        Rat::zero()
                    } else {
                        values[c.0].clone()
                    };
                    acc += &(prob * &cv);
                }
                let improves = match objective {
                    Objective::Sup => acc > best_val,
                    Objective::Inf => acc < best_val,
                };
                if improves {
                    best_val = acc;
                    best_idx = i;
                }
            }
            if best_idx != policy[s.0] {
                policy[s.0] = best_idx;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        values = evaluate_policy(p, target, &pinned_zero, &policy);
        for i in 0..n {
            if pinned_zero[i] {
                values[i] = Rat::zero();
            }
        }
    }
    values[root.0].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::npt::build_interaction_system;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    #[test]
    fn fig4_interactions() {
        let p = gallery::fig3();
        let o1 = gallery::test_o1();
        let t = p.state_by_name("t").unwrap();
        let u = p.state_by_name("u").unwrap();
        let it = build_interaction_system(&p, t, &o1);
        let iu = build_interaction_system(&p, u, &o1);
        assert_eq!(opt_success_prob(&it, Objective::Inf), Rat::one());
        assert_eq!(opt_success_prob(&it, Objective::Sup), Rat::one());
        assert_eq!(opt_success_prob(&iu, Objective::Inf), Rat::zero());
        assert_eq!(opt_success_prob(&iu, Objective::Sup), Rat::one());
    }

    #[test]
    fn fig6_with_o2() {
        let p = gallery::fig6();
        let o2 = gallery::test_o2();
        let s = p.state_by_name("s").unwrap();
        let t = p.state_by_name("t").unwrap();
        let is_ = build_interaction_system(&p, s, &o2);
        let it = build_interaction_system(&p, t, &o2);
        assert_eq!(opt_success_prob(&is_, Objective::Sup), Rat::one());
        assert_eq!(opt_success_prob(&is_, Objective::Inf), Rat::zero());
        assert_eq!(opt_success_prob(&it, Objective::Sup), r(3, 10));
        assert_eq!(opt_success_prob(&it, Objective::Inf), r(3, 10));
    }

    #[test]
    fn policy_iteration_matches_dp_on_acyclic() {
        let p = gallery::fig6();
        let o2 = gallery::test_o2();
        for root in ["s", "t"] {
            let s = p.state_by_name(root).unwrap();
            let sys = build_interaction_system(&p, s, &o2);
            let target: Vec<bool> = (0..sys.pts().num_states())
                .map(|i| sys.is_successful(StateId(i)))
                .collect();
            for obj in [Objective::Sup, Objective::Inf] {
                let dp = dp_acyclic(sys.pts(), sys.root(), &target, obj);
                let pi = policy_iteration(sys.pts(), sys.root(), &target, obj);
                assert_eq!(dp, pi);
            }
        }
    }

    #[test]
    fn cyclic_loop_with_escape() {
        // s loops to itself with probability 1/2 and continues to the b-state
        // with probability 1/2; composed with the test `a* then b`, success
        // should be certain under sup, and the avoid-set makes inf zero when
        // a deadlocked branch exists.
        use crate::gallery::PtsBuilder;
        let mut b = PtsBuilder::new("loop");
        b.root("s");
        b.trans("s", "a", &[("s", r(1, 2)), ("s1", r(1, 2))]);
        b.trans("s1", "b", &[("nil", r(1, 1))]);
        let p = b.build();
        // Test: any number of a's then b to success.
        let mut tb = PtsBuilder::new("oloop");
        tb.root("o");
        tb.trans("o", "a", &[("o", r(1, 1))]);
        tb.trans("o", "b", &[("top", r(1, 1))]);
        let o = tb.build_npt("top");
        let sys = build_interaction_system(&p, p.state_by_name("s").unwrap(), &o);
        assert!(!sys.pts().structure_info(sys.root()).acyclic);
        // The a-loop happens with probability halving each round; reaching
        // s1 and then b is almost sure: sup = inf = 1 (single policy).
        assert_eq!(opt_success_prob(&sys, Objective::Sup), Rat::one());
        assert_eq!(opt_success_prob(&sys, Objective::Inf), Rat::one());
    }

    #[test]
    fn min_zero_detects_avoidable_target() {
        // Root can loop forever (avoiding success) or move to success.
        use crate::gallery::PtsBuilder;
        let mut b = PtsBuilder::new("avoid");
        b.root("s");
        b.trans("s", "a", &[("s", r(1, 1))]);
        b.trans("s", "b", &[("goal", r(1, 1))]);
        let p = b.build();
        let target: Vec<bool> = p
            .state_names()
            .iter()
            .map(|n| n == "goal")
            .collect();
        let root = p.state_by_name("s").unwrap();
        assert_eq!(
            opt_reach_prob(&p, root, &target, Objective::Inf),
            Rat::zero()
        );
        assert_eq!(
            opt_reach_prob(&p, root, &target, Objective::Sup),
            Rat::one()
        );
    }

    #[test]
    fn sup_escapes_zero_value_plateau() {
        // The initial policy loops at x with value 0; improvement must still
        // find the two-step escape x -> y -> goal.
        use crate::gallery::PtsBuilder;
        let mut b = PtsBuilder::new("plateau");
        b.root("x");
        b.trans("x", "a", &[("x", r(1, 1))]);
        b.trans("x", "b", &[("y", r(1, 1))]);
        b.trans("y", "c", &[("goal", r(1, 1))]);
        let p = b.build();
        let target: Vec<bool> = p.state_names().iter().map(|n| n == "goal").collect();
        let root = p.state_by_name("x").unwrap();
        assert_eq!(opt_reach_prob(&p, root, &target, Objective::Sup), Rat::one());
    }
}
