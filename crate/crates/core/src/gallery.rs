//! Small reference systems used by the test suites and the bundled example
//! gallery. Each builder returns a validated system; several carry multiple
//! roots so that distances between siblings can be computed directly.

use crate::npt::Npt;
use crate::pts::{Pts, StateId};
use crate::rat::Rat;

/// Incremental construction of a [`Pts`] by name, deduplicating transitions.
pub struct PtsBuilder {
    name: String,
    states: Vec<String>,
    actions: Vec<String>,
    transitions: Vec<(usize, usize, Vec<(usize, Rat)>)>,
    root: usize,
}

impl PtsBuilder {
    pub fn new(name: &str) -> Self {
        PtsBuilder {
            name: name.to_string(),
            states: Vec::new(),
            actions: Vec::new(),
            transitions: Vec::new(),
            root: 0,
        }
    }

    pub fn state(&mut self, name: &str) -> usize {
        if let Some(i) = self.states.iter().position(|s| s == name) {
            i
        } else {
            self.states.push(name.to_string());
            self.states.len() - 1
        }
    }

    pub fn action(&mut self, name: &str) -> usize {
        if let Some(i) = self.actions.iter().position(|a| a == name) {
            i
        } else {
            self.actions.push(name.to_string());
            self.actions.len() - 1
        }
    }

    pub fn root(&mut self, name: &str) {
        self.root = self.state(name);
    }

    /// Adds `src -act-> dist`; zero-probability entries are dropped and an
    /// exact duplicate of an existing transition is silently ignored.
    pub fn trans(&mut self, src: &str, act: &str, dist: &[(&str, Rat)]) {
        let src = self.state(src);
        let act = self.action(act);
        let entries: Vec<(usize, Rat)> = dist
            .iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(s, p)| (self.state(s), p.clone()))
            .collect();
        let mut sorted = entries.clone();
        sorted.sort();
        let duplicate = self.transitions.iter().any(|(s, a, d)| {
            let mut dd = d.clone();
            dd.sort();
            *s == src && *a == act && dd == sorted
        });
        if !duplicate {
            self.transitions.push((src, act, entries));
        }
    }

    pub fn build(self) -> Pts {
        Pts::new(
            self.name,
            self.states,
            self.actions,
            self.root,
            self.transitions,
        )
        .expect("builder produced an invalid system")
    }

    pub fn build_npt(mut self, success: &str) -> Npt {
        let succ = self.state(success);
        Npt::new(self.build(), StateId(succ)).expect("builder produced an invalid test")
    }
}

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

/// Two roots `sp` and `t`: three a-branches each, with a parameterized
/// probabilistic split on the outer branches of `sp`.
pub fn fig1(p: &Rat) -> Pts {
    let q = Rat::one() - p;
    let mut b = PtsBuilder::new("fig1");
    b.root("sp");
    b.trans("sp", "a", &[("sp1", p.clone()), ("nil", q.clone())]);
    b.trans("sp", "a", &[("sp2", r(1, 1))]);
    b.trans("sp", "a", &[("nil", q.clone()), ("sp3", p.clone())]);
    b.trans("sp1", "b", &[("nil", r(1, 1))]);
    b.trans("sp2", "b", &[("nil", r(1, 1))]);
    b.trans("sp2", "c", &[("nil", r(1, 1))]);
    b.trans("sp3", "c", &[("nil", r(1, 1))]);
    b.trans("t", "a", &[("t1", r(1, 1))]);
    b.trans("t", "a", &[("t2", r(1, 2)), ("t3", r(1, 2))]);
    b.trans("t", "a", &[("t4", r(1, 1))]);
    b.trans("t1", "b", &[("nil", r(1, 1))]);
    b.trans("t2", "b", &[("nil", r(1, 1))]);
    b.trans("t3", "c", &[("nil", r(1, 1))]);
    b.trans("t4", "c", &[("nil", r(1, 1))]);
    b.build()
}

/// Two roots `s` and `t`, each with two probabilistic a-branches over four
/// distinct continuations; `t`'s splits are skewed by `e1`, `e2`.
pub fn fig2(e1: &Rat, e2: &Rat) -> Pts {
    let half = r(1, 2);
    let mut b = PtsBuilder::new("fig2");
    b.root("s");
    b.trans("s", "a", &[("s1", half.clone()), ("s2", half.clone())]);
    b.trans("s", "a", &[("s3", half.clone()), ("s4", half.clone())]);
    b.trans("s1", "b", &[("nil", r(1, 1))]);
    b.trans("s2", "c", &[("nil", r(1, 1))]);
    b.trans("s3", "d", &[("nil", r(1, 1))]);
    b.trans("s4", "e", &[("nil", r(1, 1))]);
    b.trans(
        "t",
        "a",
        &[("t1", &half - e1), ("t2", &half + e1)],
    );
    b.trans(
        "t",
        "a",
        &[("t3", &half - e2), ("t4", &half + e2)],
    );
    b.trans("t1", "b", &[("nil", r(1, 1))]);
    b.trans("t2", "d", &[("nil", r(1, 1))]);
    b.trans("t3", "c", &[("nil", r(1, 1))]);
    b.trans("t4", "e", &[("nil", r(1, 1))]);
    b.build()
}

/// Roots `s`, `t`, `u`, `zs`, `zt`: the distinguishing-power family for the
/// supremal-probabilities approach, plus the tightness witnesses `zs`, `zt`.
pub fn fig3() -> Pts {
    let mut b = PtsBuilder::new("fig3");
    b.root("s");
    b.trans("s", "a", &[("s1", r(1, 1))]);
    b.trans("s1", "b", &[("nil", r(1, 1))]);
    b.trans("s1", "c", &[("nil", r(1, 1))]);
    b.trans("t", "a", &[("t1", r(1, 2)), ("t2", r(1, 2))]);
    for child in ["t1", "t2"] {
        b.trans(child, "b", &[("nil", r(1, 1))]);
        b.trans(child, "c", &[("nil", r(1, 1))]);
    }
    b.trans("u", "a", &[("u1", r(1, 1))]);
    b.trans("u", "a", &[("u2", r(1, 2)), ("u3", r(1, 2))]);
    b.trans("u", "a", &[("u4", r(1, 1))]);
    b.trans("u1", "b", &[("nil", r(1, 1))]);
    b.trans("u2", "b", &[("nil", r(1, 1))]);
    b.trans("u3", "c", &[("nil", r(1, 1))]);
    b.trans("u4", "c", &[("nil", r(1, 1))]);
    b.trans("zs", "a", &[("zs1", r(1, 1))]);
    b.trans("zs1", "b", &[("nil", r(1, 1))]);
    b.trans("zt", "a", &[("zt1", r(1, 2)), ("zt2", r(1, 2))]);
    b.trans("zt1", "b", &[("nil", r(1, 1))]);
    b.trans("zt2", "c", &[("nil", r(1, 1))]);
    b.build()
}

/// The linear test `a` then `b` to success.
pub fn test_o1() -> Npt {
    let mut b = PtsBuilder::new("o1");
    b.root("o1");
    b.trans("o1", "a", &[("o1p", r(1, 1))]);
    b.trans("o1p", "b", &[("top", r(1, 1))]);
    b.build_npt("top")
}

/// The branching test `a` then (`b` or `c`) to success.
pub fn test_o2() -> Npt {
    let mut b = PtsBuilder::new("o2");
    b.root("o2");
    b.trans("o2", "a", &[("o2p", r(1, 1))]);
    b.trans("o2p", "b", &[("top", r(1, 1))]);
    b.trans("o2p", "c", &[("top", r(1, 1))]);
    b.build_npt("top")
}

/// Roots `s` and `t`: the may-versus-must family with 3/10–7/10 splits.
pub fn fig6() -> Pts {
    let mut b = PtsBuilder::new("fig6");
    b.root("s");
    b.trans("s", "a", &[("s1", r(3, 10)), ("s2", r(7, 10))]);
    b.trans("s", "a", &[("s3", r(3, 10)), ("nil", r(7, 10))]);
    b.trans("s1", "b", &[("nil", r(1, 1))]);
    b.trans("s2", "c", &[("nil", r(1, 1))]);
    b.trans("s3", "d", &[("nil", r(1, 1))]);
    b.trans("t", "a", &[("t1", r(3, 10)), ("t2", r(7, 10))]);
    b.trans("t", "a", &[("t3", r(3, 10)), ("nil", r(7, 10))]);
    b.trans("t1", "b", &[("nil", r(1, 1))]);
    b.trans("t2", "d", &[("nil", r(1, 1))]);
    b.trans("t3", "c", &[("nil", r(1, 1))]);
    b.build()
}

/// Roots `s` and `t`: `s` duplicates a b-step inside one branch, `t` across
/// two a-branches.
pub fn fig7() -> Pts {
    let mut b = PtsBuilder::new("fig7");
    b.root("s");
    b.trans("s", "a", &[("s1", r(1, 1))]);
    b.trans("s1", "b", &[("s2", r(1, 1))]);
    b.trans("s1", "b", &[("s3", r(1, 1))]);
    b.trans("s2", "c", &[("nil", r(1, 1))]);
    b.trans("s3", "d", &[("nil", r(1, 1))]);
    b.trans("t", "a", &[("t1", r(1, 1))]);
    b.trans("t", "a", &[("t2", r(1, 1))]);
    b.trans("t1", "b", &[("t3", r(1, 1))]);
    b.trans("t2", "b", &[("t4", r(1, 1))]);
    b.trans("t3", "c", &[("nil", r(1, 1))]);
    b.trans("t4", "d", &[("nil", r(1, 1))]);
    b.build()
}

/// The probabilistic b-duplication test with split `p`, succeeding after
/// `a b c` on one branch and `a b d` on the other.
pub fn test_op(p: &Rat) -> Npt {
    let q = Rat::one() - p;
    let mut b = PtsBuilder::new(&format!("op_{}", p.to_string().replace('/', "_")));
    b.root("op");
    b.trans("op", "a", &[("o1", p.clone()), ("o2", q)]);
    b.trans("o1", "b", &[("o3", r(1, 1))]);
    b.trans("o2", "b", &[("o4", r(1, 1))]);
    b.trans("o3", "c", &[("top", r(1, 1))]);
    b.trans("o4", "d", &[("top", r(1, 1))]);
    b.build_npt("top")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_figures_validate() {
        for p in [r(0, 1), r(1, 10), r(1, 2), r(1, 1)] {
            let f1 = fig1(&p);
            assert!(f1.state_by_name("sp").is_some());
            assert!(f1.state_by_name("t").is_some());
        }
        fig2(&r(0, 1), &r(0, 1));
        fig2(&r(1, 8), &r(1, 4));
        fig3();
        fig6();
        fig7();
        test_o1();
        test_o2();
        test_op(&r(1, 2));
    }

    #[test]
    fn fig1_degenerate_p_zero_collapses_duplicates() {
        let f = fig1(&r(0, 1));
        let sp = f.state_by_name("sp").unwrap();
        // Left and right branches both become a Dirac onto nil and collapse.
        assert_eq!(f.transitions_from(sp).len(), 2);
    }

    #[test]
    fn fig3_u_is_general() {
        let f = fig3();
        let c = f.classify();
        assert!(!c.fully_nondeterministic);
        assert!(!c.fully_probabilistic);
        assert!(c.is_general());
    }

    #[test]
    fn fig1_depth_two() {
        let f = fig1(&r(1, 10));
        let sp = f.state_by_name("sp").unwrap();
        let info = f.structure_info(sp);
        assert!(info.acyclic);
        assert_eq!(info.depth, Some(2));
    }
}
