//! Seeded random generation of systems and tests for the property suites.
//! Deterministic in the seed: the same parameters always produce the same
//! model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::npt::Npt;
use crate::pts::{Pts, StateId};
use crate::rat::Rat;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemClass {
    General,
    FullyNondeterministic,
    FullyProbabilistic,
}

#[derive(Debug, Clone)]
pub struct GenParams {
    pub seed: u64,
    pub max_states: usize,
    pub max_transitions_per_state: usize,
    pub max_support: usize,
    pub denominator_bound: u64,
    pub alphabet_size: usize,
    pub force_acyclic: bool,
    pub class: SystemClass,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            max_states: 5,
            max_transitions_per_state: 2,
            max_support: 2,
            denominator_bound: 3,
            alphabet_size: 2,
            force_acyclic: true,
            class: SystemClass::General,
        }
    }
}

impl GenParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_states < 2
            || self.max_transitions_per_state == 0
            || self.max_support == 0
            || self.denominator_bound == 0
            || self.alphabet_size == 0
        {
            return Err(Error::Invalid(
                "generator bounds must be at least one (two states)".to_string(),
            ));
        }
        Ok(())
    }
}

fn random_distribution(
    rng: &mut ChaCha8Rng,
    candidates: &[usize],
    max_support: usize,
    denominator_bound: u64,
    dirac: bool,
) -> Vec<(usize, Rat)> {
    let support = if dirac {
        1
    } else {
        rng.gen_range(1..=max_support.min(candidates.len()))
    };
    let mut picked: Vec<usize> = Vec::new();
    while picked.len() < support {
        let c = candidates[rng.gen_range(0..candidates.len())];
        if !picked.contains(&c) {
            picked.push(c);
        }
    }
    picked.sort_unstable();
    if picked.len() == 1 {
        return vec![(picked[0], Rat::one())];
    }
    let weights: Vec<u64> = picked
        .iter()
        .map(|_| rng.gen_range(1..=denominator_bound))
        .collect();
    let total: u64 = weights.iter().sum();
    picked
        .into_iter()
        .zip(weights)
        .map(|(s, w)| (s, Rat::new(w as i64, total as i64)))
        .collect()
}

/// Generates a random system with two designated roots (states 0 and 1),
/// satisfying the requested class and acyclicity constraints.
pub fn generate_random_pts(params: &GenParams) -> Result<(Pts, StateId, StateId)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = rng.gen_range(2..=params.max_states);
    let k = rng.gen_range(1..=params.alphabet_size);
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let actions: Vec<String> = (0..k)
        .map(|i| {
            char::from_u32('a' as u32 + i as u32)
                .unwrap_or('z')
                .to_string()
        })
        .collect();
    let mut transitions: Vec<(usize, usize, Vec<(usize, Rat)>)> = Vec::new();
    for s in 0..n {
        let candidates: Vec<usize> = if params.force_acyclic {
            (s + 1..n).collect()
        } else {
            (0..n).collect()
        };
        if candidates.is_empty() {
            continue;
        }
        let max_tr = match params.class {
            SystemClass::FullyProbabilistic => 1,
            _ => params.max_transitions_per_state,
        };
        let ntr = rng.gen_range(0..=max_tr);
        for _ in 0..ntr {
            let label = rng.gen_range(0..k);
            let dirac = matches!(params.class, SystemClass::FullyNondeterministic);
            let dist = random_distribution(
                &mut rng,
                &candidates,
                params.max_support,
                params.denominator_bound,
                dirac,
            );
            let duplicate = transitions.iter().any(|(src, l, d)| {
                *src == s && *l == label && {
                    let mut a = d.clone();
                    let mut b = dist.clone();
                    a.sort();
                    b.sort();
                    a == b
                }
            });
            if !duplicate {
                transitions.push((s, label, dist));
            }
        }
    }
    let name = format!("rnd{}", params.seed);
    let pts = Pts::new(name, states, actions, 0, transitions)?;
    Ok((pts, StateId(0), StateId(1)))
}

/// Generates a small random acyclic test over (a subset of) the process's
/// alphabet, with a reachable success state.
pub fn generate_random_npt(p: &Pts, params: &GenParams) -> Result<Npt> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x5eed_7e57);
    let n = rng.gen_range(1..=params.max_states.max(1));
    let mut states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    states.push("top".to_string());
    let top = n;
    let alphabet: Vec<String> = p.action_names().to_vec();
    if alphabet.is_empty() {
        return Err(Error::Invalid("process has an empty alphabet".to_string()));
    }
    let mut transitions: Vec<(usize, usize, Vec<(usize, Rat)>)> = Vec::new();
    for q in 0..n {
        // Targets strictly above q, or the success state; always acyclic.
        let candidates: Vec<usize> = (q + 1..=top).collect();
        let ntr = rng.gen_range(1..=params.max_transitions_per_state);
        for _ in 0..ntr {
            let label = rng.gen_range(0..alphabet.len());
            let dist = random_distribution(
                &mut rng,
                &candidates,
                params.max_support,
                params.denominator_bound,
                false,
            );
            let duplicate = transitions.iter().any(|(src, l, d)| {
                *src == q && *l == label && {
                    let mut a = d.clone();
                    let mut b = dist.clone();
                    a.sort();
                    b.sort();
                    a == b
                }
            });
            if !duplicate {
                transitions.push((q, label, dist));
            }
        }
    }
    let name = format!("rndtest{}", params.seed);
    let pts = Pts::new(name, states, alphabet, 0, transitions)?;
    Npt::new(pts, StateId(top))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let params = GenParams::default().with_seed(1);
        let (a, _, _) = generate_random_pts(&params).unwrap();
        let (b, _, _) = generate_random_pts(&params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn class_constraints_hold() {
        for seed in 0..50 {
            let fp = GenParams {
                class: SystemClass::FullyProbabilistic,
                ..GenParams::default().with_seed(seed)
            };
            let (p, _, _) = generate_random_pts(&fp).unwrap();
            assert!(p.classify().fully_probabilistic, "seed {seed}");
            let fnd = GenParams {
                class: SystemClass::FullyNondeterministic,
                ..GenParams::default().with_seed(seed)
            };
            let (p, _, _) = generate_random_pts(&fnd).unwrap();
            assert!(p.classify().fully_nondeterministic, "seed {seed}");
        }
    }

    #[test]
    fn acyclicity_constraint_holds() {
        for seed in 0..50 {
            let params = GenParams::default().with_seed(seed);
            let (p, r0, _) = generate_random_pts(&params).unwrap();
            assert!(p.structure_info(r0).acyclic, "seed {seed}");
        }
    }

    #[test]
    fn generated_tests_validate() {
        let params = GenParams::default().with_seed(7);
        let (p, _, _) = generate_random_pts(&params).unwrap();
        for seed in 0..20 {
            let npt = generate_random_npt(&p, &GenParams::default().with_seed(seed)).unwrap();
            assert!(npt.pts().is_deadlock(npt.success()));
        }
    }
}
