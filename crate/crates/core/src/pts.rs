//! The process model: finite nondeterministic probabilistic transition
//! systems over finitely supported rational distributions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::rat::Rat;
use crate::Error;

/// Index of a state within its owning [`Pts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// Index of an action label within its owning [`Pts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

/// A finitely supported probability distribution over states.
///
/// Entries are sorted by state, strictly positive, and sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteDistribution {
    entries: Vec<(StateId, Rat)>,
}

impl FiniteDistribution {
    /// Builds a distribution, dropping zero entries and merging duplicates.
    /// Fails unless the result has nonempty support, positive weights and
    /// total mass exactly one.
    pub fn new(entries: impl IntoIterator<Item = (StateId, Rat)>) -> Result<Self, String> {
        let mut map: BTreeMap<StateId, Rat> = BTreeMap::new();
        for (s, p) in entries {
            if p.is_zero() {
                continue;
            }
            if p.is_negative() {
                return Err(format!("negative probability {p}"));
            }
            let slot = map.entry(s).or_insert_with(Rat::zero);
            *slot += &p;
        }
        if map.is_empty() {
            return Err("empty support".to_string());
        }
        let sum: Rat = map.values().cloned().sum();
        if !sum.is_one() {
            return Err(format!("distribution sums to {sum}"));
        }
        for p in map.values() {
            if !p.is_unit() {
                return Err(format!("probability {p} outside (0,1]"));
            }
        }
        Ok(FiniteDistribution {
            entries: map.into_iter().collect(),
        })
    }

    pub fn dirac(s: StateId) -> Self {
        FiniteDistribution {
            entries: vec![(s, Rat::one())],
        }
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.entries.iter().map(|(s, _)| *s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &Rat)> + '_ {
        self.entries.iter().map(|(s, p)| (*s, p))
    }

    pub fn prob(&self, s: StateId) -> Rat {
        self.entries
            .iter()
            .find(|(t, _)| *t == s)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn is_dirac(&self) -> bool {
        self.entries.len() == 1
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One transition: a labeled step from a source state into a distribution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub label: ActionId,
    pub target: FiniteDistribution,
}

/// A finite nondeterministic probabilistic labeled transition system.
///
/// Immutable once validated; every operation in the crate treats it as a
/// shared read-only value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pts {
    name: String,
    states: Vec<String>,
    actions: Vec<String>,
    root: StateId,
    /// Outgoing transitions per state, in insertion order.
    transitions: Vec<Vec<Transition>>,
}

/// How the nondeterminism/probability mix of a system classifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    /// Every transition target is a Dirac distribution.
    pub fully_nondeterministic: bool,
    /// Every state enables at most one transition.
    pub fully_probabilistic: bool,
}

impl Classification {
    pub fn is_general(&self) -> bool {
        !self.fully_nondeterministic && !self.fully_probabilistic
    }
}

/// Reachability and cycle structure relative to a chosen root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureInfo {
    pub acyclic: bool,
    /// Longest path length from the root; `None` when a reachable cycle makes
    /// it unbounded.
    pub depth: Option<usize>,
    pub reachable: Vec<StateId>,
    /// Reachable states lying on a cycle.
    pub on_cycle: Vec<StateId>,
}

impl Pts {
    /// Validates and constructs a system. `transitions` entries are
    /// `(source, label, distribution)` with indices into `states`/`actions`.
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        actions: Vec<String>,
        root: usize,
        transitions: Vec<(usize, usize, Vec<(usize, Rat)>)>,
    ) -> Result<Self, Error> {
        let name = name.into();
        let mut violations = Vec::new();
        let mut seen_states = BTreeSet::new();
        for s in &states {
            if !seen_states.insert(s.clone()) {
                violations.push(format!("duplicate state name `{s}`"));
            }
        }
        let mut seen_actions = BTreeSet::new();
        for a in &actions {
            if !seen_actions.insert(a.clone()) {
                violations.push(format!("duplicate action name `{a}`"));
            }
        }
        if root >= states.len() {
            violations.push(format!("undeclared root state index {root}"));
        }
        let mut table: Vec<Vec<Transition>> = vec![Vec::new(); states.len()];
        let mut seen_trans = BTreeSet::new();
        for (src, label, dist) in transitions {
            if src >= states.len() {
                violations.push(format!("undeclared source state index {src}"));
                continue;
            }
            if label >= actions.len() {
                violations.push(format!(
                    "undeclared action index {label} from state `{}`",
                    states[src]
                ));
                continue;
            }
            let mut bad = false;
            for (t, _) in &dist {
                if *t >= states.len() {
                    violations.push(format!(
                        "undeclared target state index {t} from state `{}`",
                        states[src]
                    ));
                    bad = true;
                }
            }
            if bad {
                continue;
            }
            match FiniteDistribution::new(dist.into_iter().map(|(t, p)| (StateId(t), p))) {
                Ok(d) => {
                    let key = (src, label, d.clone());
                    if !seen_trans.insert(key) {
                        violations.push(format!(
                            "duplicate transition from `{}` on `{}`",
                            states[src], actions[label]
                        ));
                    } else {
                        table[src].push(Transition {
                            label: ActionId(label),
                            target: d,
                        });
                    }
                }
                Err(msg) => violations.push(format!(
                    "transition from `{}` on `{}`: {msg}",
                    states[src],
                    actions.get(label).map(String::as_str).unwrap_or("?")
                )),
            }
        }
        if violations.is_empty() {
            Ok(Pts {
                name,
                states,
                actions,
                root: StateId(root),
                transitions: table,
            })
        } else {
            Err(Error::Validation { violations })
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn root(&self) -> StateId {
        self.root
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn action_names(&self) -> &[String] {
        &self.actions
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.0]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name).map(ActionId)
    }

    pub fn transitions_from(&self, s: StateId) -> &[Transition] {
        &self.transitions[s.0]
    }

    pub fn is_deadlock(&self, s: StateId) -> bool {
        self.transitions[s.0].is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn classify(&self) -> Classification {
        let fully_nondeterministic = self
            .transitions
            .iter()
            .flatten()
            .all(|t| t.target.is_dirac());
        let fully_probabilistic = self.transitions.iter().all(|ts| ts.len() <= 1);
        Classification {
            fully_nondeterministic,
            fully_probabilistic,
        }
    }

    /// Successor states of `s`, over all transitions and support entries.
    pub fn successors(&self, s: StateId) -> BTreeSet<StateId> {
        self.transitions[s.0]
            .iter()
            .flat_map(|t| t.target.support())
            .collect()
    }

    /// Reachability, cycle and depth analysis from `root`.
    pub fn structure_info(&self, root: StateId) -> StructureInfo {
        assert!(root.0 < self.states.len(), "undeclared root");
        let mut reachable = Vec::new();
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([root]);
        seen[root.0] = true;
        while let Some(s) = queue.pop_front() {
            reachable.push(s);
            for t in self.successors(s) {
                if !seen[t.0] {
                    seen[t.0] = true;
                    queue.push_back(t);
                }
            }
        }
        reachable.sort();

        // Cycle detection via DFS colors on the reachable part.
        let mut color = vec![0u8; self.states.len()]; // 0 white, 1 gray, 2 black
        let mut on_cycle_set = BTreeSet::new();
        let mut stack: Vec<(StateId, usize)> = Vec::new();
        let mut path: Vec<StateId> = Vec::new();
        for &start in &reachable {
            if color[start.0] != 0 {
                continue;
            }
            stack.push((start, 0));
            color[start.0] = 1;
            path.push(start);
            while let Some(&mut (s, ref mut i)) = stack.last_mut() {
                let succs: Vec<StateId> = self.successors(s).into_iter().collect();
                if *i < succs.len() {
                    let t = succs[*i];
                    *i += 1;
                    match color[t.0] {
                        0 => {
                            color[t.0] = 1;
                            stack.push((t, 0));
                            path.push(t);
                        }
                        1 => {
                            // Back edge: everything from t onward in the path is cyclic.
                            let pos = path.iter().position(|&x| x == t).unwrap();
                            for &x in &path[pos..] {
                                on_cycle_set.insert(x);
                            }
                        }
                        _ => {}
                    }
                } else {
                    color[s.0] = 2;
                    stack.pop();
                    path.pop();
                }
            }
        }
        // Propagate: a state reaching a cycle state that reaches it back is on
        // a cycle; the back-edge marking above already covers the simple-cycle
        // members, which is what the report needs.
        let acyclic = on_cycle_set.is_empty();
        let depth = if acyclic {
            // Longest path via memoized DFS.
            let mut memo: Vec<Option<usize>> = vec![None; self.states.len()];
            fn longest(p: &Pts, s: StateId, memo: &mut Vec<Option<usize>>) -> usize {
                if let Some(d) = memo[s.0] {
                    return d;
                }
                let d = p
                    .successors(s)
                    .into_iter()
                    .map(|t| 1 + longest(p, t, memo))
                    .max()
                    .unwrap_or(0);
                memo[s.0] = Some(d);
                d
            }
            Some(longest(self, root, &mut memo))
        } else {
            None
        };
        StructureInfo {
            acyclic,
            depth,
            reachable,
            on_cycle: on_cycle_set.into_iter().collect(),
        }
    }
}

/// A finite action sequence. The empty trace is written `ε`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Trace(pub Vec<ActionId>);

impl Trace {
    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, a: ActionId) {
        self.0.push(a);
    }

    pub fn display<'a>(&'a self, pts: &'a Pts) -> TraceDisplay<'a> {
        TraceDisplay { trace: self, pts }
    }
}

pub struct TraceDisplay<'a> {
    trace: &'a Trace,
    pts: &'a Pts,
}

impl fmt::Display for TraceDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.trace.is_empty() {
            return write!(f, "ε");
        }
        for (i, a) in self.trace.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.pts.action_name(*a))?;
        }
        Ok(())
    }
}
