//! CSP-style synchronous parallel composition.
//!
//! Components synchronize on every shared action label; a label present in
//! only one component yields no composed transition. The product is
//! reachability-restricted from the given roots by default.

use std::collections::BTreeMap;

use crate::pts::{Pts, StateId};
use crate::rat::Rat;

/// A composed system together with the component-state map.
#[derive(Debug, Clone)]
pub struct Composed {
    pub pts: Pts,
    /// For each composed state, the pair of component states it stands for.
    pub pairs: Vec<(StateId, StateId)>,
}

impl Composed {
    pub fn index_of(&self, a: StateId, b: StateId) -> Option<StateId> {
        self.pairs.iter().position(|&p| p == (a, b)).map(StateId)
    }
}

/// Synchronous parallel composition of `p1` and `p2`, rooted at `roots`.
///
/// With `restrict` set, only the part reachable from the composed root is
/// kept; otherwise the full product state space is built.
pub fn parallel_compose(p1: &Pts, p2: &Pts, roots: (StateId, StateId), restrict: bool) -> Composed {
    // Merged alphabet: p1's actions in order, then p2's new ones.
    let mut actions: Vec<String> = p1.action_names().to_vec();
    for a in p2.action_names() {
        if !actions.contains(a) {
            actions.push(a.clone());
        }
    }
    let act_index = |name: &str| actions.iter().position(|a| a == name).unwrap();

    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let mut index: BTreeMap<(StateId, StateId), usize> = BTreeMap::new();
    let mut intern = |a: StateId, b: StateId, pairs: &mut Vec<(StateId, StateId)>| -> usize {
        *index.entry((a, b)).or_insert_with(|| {
            pairs.push((a, b));
            pairs.len() - 1
        })
    };

    let root_idx = intern(roots.0, roots.1, &mut pairs);
    debug_assert_eq!(root_idx, 0);
    if !restrict {
        for a in 0..p1.num_states() {
            for b in 0..p2.num_states() {
                intern(StateId(a), StateId(b), &mut pairs);
            }
        }
    }

    let mut transitions: Vec<(usize, usize, Vec<(usize, Rat)>)> = Vec::new();
    let mut cursor = 0;
    while cursor < pairs.len() {
        let (a, b) = pairs[cursor];
        for t1 in p1.transitions_from(a) {
            let label1 = p1.action_name(t1.label);
            for t2 in p2.transitions_from(b) {
                if p2.action_name(t2.label) != label1 {
                    continue;
                }
                let mut dist: Vec<(usize, Rat)> = Vec::new();
                for (s1, q1) in t1.target.iter() {
                    for (s2, q2) in t2.target.iter() {
                        let idx = intern(s1, s2, &mut pairs);
                        dist.push((idx, q1 * q2));
                    }
                }
                transitions.push((cursor, act_index(label1), dist));
            }
        }
        cursor += 1;
    }

    let state_names: Vec<String> = pairs
        .iter()
        .map(|&(a, b)| format!("({},{})", p1.state_name(a), p2.state_name(b)))
        .collect();
    let name = format!("({}||{})", p1.name(), p2.name());
    let pts = Pts::new(name, state_names, actions, 0, transitions)
        .expect("composition of valid systems is valid");
    Composed { pts, pairs }
}

/// Structural equality of `p` and `q` under an explicit state bijection
/// (`map[i]` is the q-state corresponding to p-state `i`). Actions are
/// matched by name; state names are ignored.
pub fn graph_equal_under(p: &Pts, q: &Pts, map: &[StateId], roots: (StateId, StateId)) -> bool {
    if p.num_states() != q.num_states() || map.len() != p.num_states() {
        return false;
    }
    let mut seen = vec![false; q.num_states()];
    for &m in map {
        if m.0 >= q.num_states() || seen[m.0] {
            return false;
        }
        seen[m.0] = true;
    }
    if map[roots.0 .0] != roots.1 {
        return false;
    }
    for s in p.states() {
        let ts_p = p.transitions_from(s);
        let ts_q = q.transitions_from(map[s.0]);
        if ts_p.len() != ts_q.len() {
            return false;
        }
        let mut normalized_p: Vec<(String, Vec<(StateId, Rat)>)> = ts_p
            .iter()
            .map(|t| {
                let mut d: Vec<(StateId, Rat)> =
                    t.target.iter().map(|(x, r)| (map[x.0], r.clone())).collect();
                d.sort();
                (p.action_name(t.label).to_string(), d)
            })
            .collect();
        let mut normalized_q: Vec<(String, Vec<(StateId, Rat)>)> = ts_q
            .iter()
            .map(|t| {
                let mut d: Vec<(StateId, Rat)> = t.target.iter().map(|(x, r)| (x, r.clone())).collect();
                d.sort();
                (q.action_name(t.label).to_string(), d)
            })
            .collect();
        normalized_p.sort();
        normalized_q.sort();
        if normalized_p != normalized_q {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pts::ActionId;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    /// a-chain of the given length, all Dirac.
    fn chain(name: &str, len: usize) -> Pts {
        let states: Vec<String> = (0..=len).map(|i| format!("{name}{i}")).collect();
        let transitions = (0..len)
            .map(|i| (i, 0, vec![(i + 1, r(1, 1))]))
            .collect();
        Pts::new(name, states, vec!["a".into()], 0, transitions).unwrap()
    }

    #[test]
    fn dirac_chains_compose_to_chain() {
        let p = chain("p", 2);
        let q = chain("q", 2);
        let c = parallel_compose(&p, &q, (StateId(0), StateId(0)), true);
        assert_eq!(c.pts.num_states(), 3);
        for s in c.pts.states() {
            for t in c.pts.transitions_from(s) {
                assert!(t.target.is_dirac());
            }
        }
    }

    #[test]
    fn disjoint_labels_deadlock() {
        let p = Pts::new(
            "p",
            vec!["p0".into(), "p1".into()],
            vec!["a".into()],
            0,
            vec![(0, 0, vec![(1, r(1, 1))])],
        )
        .unwrap();
        let q = Pts::new(
            "q",
            vec!["q0".into(), "q1".into()],
            vec!["b".into()],
            0,
            vec![(0, 0, vec![(1, r(1, 1))])],
        )
        .unwrap();
        let c = parallel_compose(&p, &q, (StateId(0), StateId(0)), true);
        assert_eq!(c.pts.num_states(), 1);
        assert!(c.pts.is_deadlock(StateId(0)));
        // Merged alphabet still carries both labels.
        assert_eq!(c.pts.action_names(), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn product_distributions_sum_to_one() {
        let p = Pts::new(
            "p",
            vec!["p0".into(), "p1".into(), "p2".into()],
            vec!["a".into()],
            0,
            vec![(0, 0, vec![(1, r(1, 3)), (2, r(2, 3))])],
        )
        .unwrap();
        let q = Pts::new(
            "q",
            vec!["q0".into(), "q1".into(), "q2".into()],
            vec!["a".into()],
            0,
            vec![(0, 0, vec![(1, r(1, 2)), (2, r(1, 2))])],
        )
        .unwrap();
        let c = parallel_compose(&p, &q, (StateId(0), StateId(0)), true);
        let t = &c.pts.transitions_from(StateId(0))[0];
        let total: Rat = t.target.iter().map(|(_, p)| p.clone()).sum();
        assert!(total.is_one());
        assert_eq!(t.target.len(), 4);
    }

    #[test]
    fn unrestricted_product_holds_all_pairs() {
        let p = chain("p", 1);
        let q = chain("q", 1);
        let c = parallel_compose(&p, &q, (StateId(0), StateId(0)), false);
        assert_eq!(c.pts.num_states(), 4);
    }

    #[test]
    fn commutative_up_to_pair_swap() {
        let p = chain("p", 2);
        let q = Pts::new(
            "q",
            vec!["q0".into(), "q1".into(), "q2".into()],
            vec!["a".into()],
            0,
            vec![
                (0, 0, vec![(1, r(1, 2)), (2, r(1, 2))]),
                (1, 0, vec![(2, r(1, 1))]),
            ],
        )
        .unwrap();
        let pq = parallel_compose(&p, &q, (StateId(0), StateId(0)), true);
        let qp = parallel_compose(&q, &p, (StateId(0), StateId(0)), true);
        let map: Vec<StateId> = pq
            .pairs
            .iter()
            .map(|&(a, b)| qp.index_of(b, a).expect("pair present"))
            .collect();
        assert!(graph_equal_under(
            &pq.pts,
            &qp.pts,
            &map,
            (StateId(0), StateId(0))
        ));
    }

    #[test]
    fn composed_root_label_sync() {
        // Fig.-3-style: Dirac a.b chain composed with an a-then-split system.
        let zs = Pts::new(
            "zs",
            vec!["zs".into(), "zs1".into(), "nil".into()],
            vec!["a".into(), "b".into()],
            0,
            vec![(0, 0, vec![(1, r(1, 1))]), (1, 1, vec![(2, r(1, 1))])],
        )
        .unwrap();
        let zt = Pts::new(
            "zt",
            vec!["zt".into(), "zt1".into(), "zt2".into(), "nil".into()],
            vec!["a".into(), "b".into(), "c".into()],
            0,
            vec![
                (0, 0, vec![(1, r(1, 2)), (2, r(1, 2))]),
                (1, 1, vec![(3, r(1, 1))]),
                (2, 2, vec![(3, r(1, 1))]),
            ],
        )
        .unwrap();
        let c = parallel_compose(&zs, &zt, (StateId(0), StateId(0)), true);
        let root_ts = c.pts.transitions_from(StateId(0));
        assert_eq!(root_ts.len(), 1);
        assert_eq!(root_ts[0].label, ActionId(0));
        let dist = &root_ts[0].target;
        assert_eq!(dist.len(), 2);
        for (_, p) in dist.iter() {
            assert_eq!(*p, r(1, 2));
        }
    }
}
