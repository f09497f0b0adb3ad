//! Exact feasibility through the Farkas alternative.
//!
//! For a system `A x ≥ d` with free `x`, exactly one of the following holds:
//! some `x` satisfies it, or some `y ≥ 0` has `Aᵀy = 0` and `dᵀy = 1`. The
//! second system has one equality per variable plus one, so its basis stays
//! small even when the original system has thousands of rows. It is solved
//! by a revised phase-one simplex with artificial variables, Dantzig
//! pricing and the lexicographic ratio test, which rules out cycling. A zero optimum leaves a certificate `y`; a positive optimum leaves
//! simplex multipliers `π` with `π·(A_k, d_k) ≤ 0` for every row `k` and
//! `π_d > 0`, so `x = −π_x / π_d` satisfies every row.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::linsys::{LinearSystem, Rational, Verdict};
use super::solver::SolveStats;

/// Column of the Farkas system for one kept row: the row's coefficients
/// followed by its bound in the last position.
struct Column {
    row: usize,
    entries: Vec<(usize, Rational)>,
    // entries times a positive integer, for pricing
    scaled: Vec<(usize, BigInt)>,
}

fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn solve(sys: &LinearSystem) -> (Verdict, SolveStats) {
    let mut stats = SolveStats {
        rows_in: sys.num_rows(),
        ..SolveStats::default()
    };

    // Identical left-hand sides: only the largest bound can matter.
    let mut best: HashMap<&[(usize, Rational)], usize> = HashMap::new();
    for (k, row) in sys.rows().iter().enumerate() {
        best.entry(row.coeffs.as_slice())
            .and_modify(|b| {
                if row.bound > sys.rows()[*b].bound {
                    *b = k;
                }
            })
            .or_insert(k);
    }
    let mut pool: Vec<usize> = best.into_values().collect();
    pool.sort_unstable();
    // Rows `Σ c x ≥ d` with every `c = 0` and `d ≤ 0` never help a certificate.
    pool.retain(|&k| {
        let row = &sys.rows()[k];
        !(row.coeffs.is_empty() && !row.bound.is_positive())
    });

    // Row generation: solve over an active subset, then add every pooled
    // row the witness violates. A certificate for a subset certifies the
    // whole system, and a witness that violates nothing is final.
    let mut active = vec![false; sys.num_rows()];
    let mut rows: Vec<usize> = pool
        .iter()
        .copied()
        .filter(|&k| !sys.rows()[k].bound.is_zero())
        .collect();
    let mut columns = Vec::new();
    let mut lp = PhaseOne::new(sys.num_vars() + 1);
    loop {
        for &k in &rows {
            active[k] = true;
        }
        columns.extend(rows.drain(..).map(|k| column(sys, k)));
        lp.run(&columns);
        stats.pivots = lp.pivots;
        stats.rows_used = columns.len();
        let verdict = lp.verdict(&columns);
        let Verdict::Feasible { witness } = &verdict else {
            return (verdict, stats);
        };
        let violated: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|&k| !active[k])
            .filter(|&k| {
                let row = &sys.rows()[k];
                row.evaluate(witness) < row.bound
            })
            .collect();
        if violated.is_empty() {
            return (verdict, stats);
        }
        rows = violated;
    }
}

fn column(sys: &LinearSystem, k: usize) -> Column {
    let row = &sys.rows()[k];
    let mut entries = row.coeffs.clone();
    if !row.bound.is_zero() {
        entries.push((sys.num_vars(), row.bound.clone()));
    }
    let scale = lcm_of_denominators(entries.iter().map(|(_, c)| c));
    let scaled = entries
        .iter()
        .map(|(i, c)| (*i, (c * &scale).to_integer()))
        .collect();
    Column {
        row: k,
        entries,
        scaled,
    }
}

// Basic variable ids from here up are artificials, so columns can be
// appended between runs without renumbering.
const ARTIFICIAL: usize = usize::MAX / 2;

/// Revised phase-one simplex for `M y + a = e_last`, minimizing `Σ a`.
struct PhaseOne {
    m: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    values: Vec<Rational>,
    // dense inverse of the basis matrix, row-major
    inverse: Vec<Vec<Rational>>,
    pivots: u64,
}

impl PhaseOne {
    fn new(m: usize) -> Self {
        let inverse = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        let mut values = vec![Rational::zero(); m];
        values[m - 1] = Rational::one();
        Self {
            m,
            basis: (0..m).map(|i| ARTIFICIAL + i).collect(),
            in_basis: Vec::new(),
            values,
            inverse,
            pivots: 0,
        }
    }

    fn is_artificial(&self, var: usize) -> bool {
        var >= ARTIFICIAL
    }

    fn objective(&self) -> Rational {
        self.basis
            .iter()
            .zip(&self.values)
            .filter(|(&v, _)| self.is_artificial(v))
            .fold(Rational::zero(), |acc, (_, x)| acc + x)
    }

    /// `π = c_Bᵀ B⁻¹`: sum of the inverse rows held by artificials.
    fn multipliers(&self) -> Vec<Rational> {
        let mut pi = vec![Rational::zero(); self.m];
        for (i, &var) in self.basis.iter().enumerate() {
            if self.is_artificial(var) {
                for (p, b) in pi.iter_mut().zip(&self.inverse[i]) {
                    if !b.is_zero() {
                        *p += b;
                    }
                }
            }
        }
        pi
    }

    /// Whether row `i` scaled by `1/ui` is lexicographically below row `r`
    /// scaled by `1/ur`, comparing the basic value first and then `B⁻¹`.
    fn lex_less(&self, i: usize, ui: &Rational, r: usize, ur: &Rational) -> bool {
        let a = &self.values[i] * ur;
        let b = &self.values[r] * ui;
        if a != b {
            return a < b;
        }
        for (x, y) in self.inverse[i].iter().zip(&self.inverse[r]) {
            let a = x * ur;
            let b = y * ui;
            if a != b {
                return a < b;
            }
        }
        false
    }

    fn verdict(&self, columns: &[Column]) -> Verdict {
        if self.objective().is_zero() {
            let certificate = self
                .basis
                .iter()
                .zip(&self.values)
                .filter(|(&var, x)| !self.is_artificial(var) && !x.is_zero())
                .map(|(&var, x)| (columns[var].row, x.clone()))
                .collect();
            Verdict::Infeasible { certificate }
        } else {
            let pi = self.multipliers();
            let scale = &pi[self.m - 1];
            debug_assert!(scale.is_positive());
            let witness = pi[..self.m - 1].iter().map(|p| -(p / scale)).collect();
            Verdict::Feasible { witness }
        }
    }

    fn run(&mut self, columns: &[Column]) {
        self.in_basis.resize(columns.len(), false);
        loop {
            let pi = self.multipliers();
            let common = lcm_of_denominators(&pi);
            let pi: Vec<BigInt> = pi.iter().map(|p| (p * &common).to_integer()).collect();
            // Dantzig pricing on integer-scaled columns: the largest positive
            // π·M_k, first on ties.
            let mut entering: Option<(usize, BigInt)> = None;
            for (k, column) in columns.iter().enumerate() {
                if self.in_basis[k] {
                    continue;
                }
                let score = column
                    .scaled
                    .iter()
                    .fold(BigInt::zero(), |acc, (i, c)| acc + &pi[*i] * c);
                if score.is_positive() && entering.as_ref().is_none_or(|(_, s)| score > *s) {
                    entering = Some((k, score));
                }
            }
            let Some((k, _)) = entering else { return };

            // u = B⁻¹ M_k
            let u: Vec<Rational> = self
                .inverse
                .iter()
                .map(|row| {
                    columns[k]
                        .entries
                        .iter()
                        .fold(Rational::zero(), |acc, (i, c)| acc + &row[*i] * c)
                })
                .collect();

            // Lexicographic ratio test on (x_B, B⁻¹) rows: no basis repeats,
            // whatever the pricing rule.
            let mut leave: Option<usize> = None;
            for (i, ui) in u.iter().enumerate() {
                if !ui.is_positive() {
                    continue;
                }
                leave = match leave {
                    Some(r) if !self.lex_less(i, &u[i], r, &u[r]) => Some(r),
                    _ => Some(i),
                };
            }
            let r = leave.expect("phase one is bounded below");
            let theta = &self.values[r] / &u[r];

            self.pivots += 1;
            for (i, ui) in u.iter().enumerate() {
                if i != r && !ui.is_zero() {
                    self.values[i] -= ui * &theta;
                }
            }
            self.values[r] = theta;

            let pivot = u[r].clone();
            for x in self.inverse[r].iter_mut() {
                if !x.is_zero() {
                    *x /= &pivot;
                }
            }
            let pivot_row = self.inverse[r].clone();
            let support: Vec<usize> = (0..self.m).filter(|&j| !pivot_row[j].is_zero()).collect();
            for (i, ui) in u.iter().enumerate() {
                if i == r || ui.is_zero() {
                    continue;
                }
                let row = &mut self.inverse[i];
                for &j in &support {
                    row[j] -= ui * &pivot_row[j];
                }
            }

            let old = self.basis[r];
            if !self.is_artificial(old) {
                self.in_basis[old] = false;
            }
            self.basis[r] = k;
            self.in_basis[k] = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use proptest::prelude::*;

    use super::*;
    use crate::metrizability::linsys::{int, verify_certificate};
    use crate::metrizability::simplex;

    fn system(vars: &[&str], rows: &[(&[(usize, i64)], i64)]) -> LinearSystem {
        let mut sys = LinearSystem::new(vars.iter().copied()).unwrap();
        for (terms, bound) in rows {
            sys.add_ge(terms.iter().map(|&(j, c)| (j, int(c))), int(*bound), "")
                .unwrap();
        }
        sys
    }

    #[test]
    fn bound_against_negation() {
        let sys = system(&["x"], &[(&[(0, 1)], 1), (&[(0, -1)], 0)]);
        let (v, _) = solve(&sys);
        assert_eq!(
            v,
            Verdict::Infeasible {
                certificate: BTreeMap::from([(0, int(1)), (1, int(1))])
            }
        );
    }

    #[test]
    fn chain_is_feasible() {
        let sys = system(&["x", "y"], &[(&[(0, 1)], 1), (&[(1, 1), (0, -1)], 0)]);
        let (v, _) = solve(&sys);
        let Verdict::Feasible { witness } = &v else {
            panic!("expected a witness")
        };
        assert!(witness[0] >= int(1) && witness[1] >= witness[0]);
        assert!(verify_certificate(&sys, &v).unwrap());
    }

    #[test]
    fn no_variables() {
        let bad = system(&[], &[(&[], 0), (&[], 2)]);
        // multipliers are scaled so the bounds combine to exactly 1
        assert_eq!(
            solve(&bad).0,
            Verdict::Infeasible {
                certificate: BTreeMap::from([(1, Rational::new(1.into(), 2.into()))])
            }
        );
        assert!(solve(&system(&[], &[(&[], -1)])).0.is_feasible());
    }

    #[test]
    fn late_rows_are_generated() {
        // Only the bound rows are active at first; x ≥ 1 alone is feasible
        // with x = 1, which the homogeneous rows then cut off.
        let sys = system(
            &["x", "y", "z"],
            &[
                (&[(0, 1)], 1),
                (&[(1, 1), (0, -2)], 0),
                (&[(2, 1), (1, -2)], 0),
                (&[(0, 1), (2, -1)], 0),
            ],
        );
        let (v, stats) = solve(&sys);
        assert!(v.is_infeasible());
        assert!(verify_certificate(&sys, &v).unwrap());
        assert_eq!(stats.rows_used, 4);
    }

    #[test]
    fn duplicate_rows_keep_the_largest_bound() {
        let sys = system(&["x"], &[(&[(0, -1)], -3), (&[(0, -1)], -1), (&[(0, 1)], 2)]);
        let (v, stats) = solve(&sys);
        assert!(v.is_infeasible());
        assert!(verify_certificate(&sys, &v).unwrap());
        assert_eq!(stats.rows_used, 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn agrees_with_primal(
            n in 1usize..5,
            raw in proptest::collection::vec(
                (proptest::collection::vec(-3i64..=3, 4), -4i64..=4), 1..9),
        ) {
            let mut sys = LinearSystem::new((0..n).map(|j| format!("x{j}"))).unwrap();
            for (coeffs, bound) in &raw {
                sys.add_ge(coeffs.iter().take(n).enumerate().map(|(j, &c)| (j, int(c))), int(*bound), "").unwrap();
            }
            let (dual, _) = solve(&sys);
            let (primal, _) = simplex::solve(&sys);
            prop_assert!(verify_certificate(&sys, &dual).unwrap());
            prop_assert_eq!(dual.is_feasible(), primal.is_feasible());
        }
    }
}
