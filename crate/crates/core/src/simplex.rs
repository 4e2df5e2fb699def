//! A small exact-rational linear-program solver.
//!
//! Dense two-phase simplex with Bland's rule, so it terminates on every input
//! and never rounds. Sized for the desk-scale programs this crate produces
//! (weighted Chebyshev distance from a point to the convex hull of a few
//! hundred generator vectors).

use crate::rat::Rat;

/// Solves `minimize c·x subject to A x = b, x ≥ 0`.
///
/// Returns `None` when infeasible. Unbounded programs cannot arise from the
/// callers in this crate (the feasible sets are polytopes); they would abort.
pub fn solve_min(
    mut a: Vec<Vec<Rat>>,
    mut b: Vec<Rat>,
    c: Vec<Rat>,
) -> Option<(Rat, Vec<Rat>)> {
    let rows = a.len();
    let cols = c.len();
    assert_eq!(b.len(), rows);
    for row in &a {
        assert_eq!(row.len(), cols);
    }
    // Normalize to b ≥ 0.
    for i in 0..rows {
        if b[i].is_negative() {
            for x in a[i].iter_mut() {
                *x = -x.clone();
            }
            b[i] = -b[i].clone();
        }
    }

    // Tableau layout: columns = original variables, then one artificial per
    // row, then the rhs.
    let total = cols + rows;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut row = Vec::with_capacity(total + 1);
        row.extend(a[i].iter().cloned());
        for j in 0..rows {
            row.push(if i == j { Rat::one() } else { Rat::zero() });
        }
        row.push(b[i].clone());
        t.push(row);
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    // Phase 1: minimize the sum of artificials.
    let mut phase1 = vec![Rat::zero(); total];
    for item in phase1.iter_mut().take(cols + rows).skip(cols) {
        *item = Rat::one();
    }
    let feasible_cols: Vec<bool> = vec![true; total];
    let opt1 = run_simplex(&mut t, &mut basis, &phase1, &feasible_cols);
    if !opt1.is_zero() {
        return None;
    }
    // Drive artificials out of the basis where possible; rows whose basic
    // artificial cannot leave are redundant and removed.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= cols {
            let mut pivot_col = None;
            for j in 0..cols {
                if !t[i][j].is_zero() {
                    pivot_col = Some(j);
                    break;
                }
            }
            match pivot_col {
                Some(j) => {
                    pivot(&mut t, &mut basis, i, j);
                    i += 1;
                }
                None => {
                    t.remove(i);
                    basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    // Phase 2: original objective, artificial columns frozen.
    let mut phase2 = vec![Rat::zero(); total];
    phase2[..cols].clone_from_slice(&c);
    let mut allowed = vec![false; total];
    for (j, slot) in allowed.iter_mut().enumerate().take(cols) {
        let _ = j;
        *slot = true;
    }
    let opt = run_simplex(&mut t, &mut basis, &phase2, &allowed);

    let mut solution = vec![Rat::zero(); cols];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < cols {
            solution[bj] = t[i].last().unwrap().clone();
        }
    }
    Some((opt, solution))
}

/// Runs simplex to optimality for the given objective; returns the optimum.
fn run_simplex(
    t: &mut Vec<Vec<Rat>>,
    basis: &mut [usize],
    objective: &[Rat],
    allowed: &[bool],
) -> Rat {
    loop {
        // Reduced costs: z_j - c_j with current basis.
        let rows = t.len();
        let total = objective.len();
        let mut entering = None;
        for j in 0..total {
            if !allowed[j] || basis.contains(&j) {
                continue;
            }
            let mut reduced = objective[j].clone();
            for i in 0..rows {
                if !t[i][j].is_zero() {
                    reduced -= &(&objective[basis[i]] * &t[i][j]);
                }
            }
            if reduced.is_negative() {
                entering = Some(j);
                break; // Bland: smallest index
            }
        }
        let j = match entering {
            Some(j) => j,
            None => break,
        };
        // Ratio test, Bland tie-break by basis index.
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..rows {
            if t[i][j].is_positive() {
                let ratio = &t[i][total] / &t[i][j];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && basis[i] < basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (i, _) = leave.expect("unbounded linear program");
        pivot(t, basis, i, j);
    }
    let rows = t.len();
    let total = objective.len();
    let mut value = Rat::zero();
    for i in 0..rows {
        value += &(&objective[basis[i]] * &t[i][total]);
    }
    value
}

fn pivot(t: &mut [Vec<Rat>], basis: &mut [usize], row: usize, col: usize) {
    let inv = t[row][col].recip();
    for x in t[row].iter_mut() {
        *x = &*x * &inv;
    }
    for i in 0..t.len() {
        if i == row || t[i][col].is_zero() {
            continue;
        }
        let factor = t[i][col].clone();
        let pivot_row = t[row].clone();
        for (x, pr) in t[i].iter_mut().zip(pivot_row.iter()) {
            *x = &*x - &(&factor * pr);
        }
    }
    basis[row] = col;
}

/// Minimal weighted Chebyshev distance from `target` to the convex hull of
/// `generators`: `min_{x ∈ conv(G)} max_i weights[i]·|target[i] − x[i]|`.
///
/// Coordinates with zero weight are ignored.
pub fn hull_distance(target: &[Rat], weights: &[Rat], generators: &[Vec<Rat>]) -> Rat {
    assert!(!generators.is_empty(), "empty generator set");
    let coords: Vec<usize> = (0..target.len())
        .filter(|&i| weights[i].is_positive())
        .collect();
    let m = generators.len();
    // Variables: c_1..c_m, eps, s_i, t_i per coordinate.
    let n = coords.len();
    let cols = m + 1 + 2 * n;
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(1 + 2 * n);
    let mut b: Vec<Rat> = Vec::with_capacity(1 + 2 * n);
    // Convexity row.
    let mut row = vec![Rat::zero(); cols];
    for slot in row.iter_mut().take(m) {
        *slot = Rat::one();
    }
    a.push(row);
    b.push(Rat::one());
    for (k, &i) in coords.iter().enumerate() {
        let w = &weights[i];
        // w·x_i + eps − s_k = w·v_i
        let mut up = vec![Rat::zero(); cols];
        for (j, g) in generators.iter().enumerate() {
            up[j] = w * &g[i];
        }
        up[m] = Rat::one();
        up[m + 1 + k] = -Rat::one();
        a.push(up);
        b.push(w * &target[i]);
        // w·x_i − eps + t_k = w·v_i
        let mut dn = vec![Rat::zero(); cols];
        for (j, g) in generators.iter().enumerate() {
            dn[j] = w * &g[i];
        }
        dn[m] = -Rat::one();
        dn[m + 1 + n + k] = Rat::one();
        a.push(dn);
        b.push(w * &target[i]);
    }
    let mut c = vec![Rat::zero(); cols];
    c[m] = Rat::one();
    let (value, _) = solve_min(a, b, c).expect("hull distance program is always feasible");
    value
}

/// Whether `target` lies in the convex hull of the generators (restricted to
/// positively weighted coordinates): zero hull distance.
pub fn in_hull(target: &[Rat], weights: &[Rat], generators: &[Vec<Rat>]) -> bool {
    hull_distance(target, weights, generators).is_zero()
}
