//! Exact feasibility for rational inequality systems.
//!
//! A bounded-variable simplex in the style used by SMT arithmetic solvers:
//! every row `Σ c_j x_j ≥ d` gets a slack `s = Σ c_j x_j` with lower bound
//! `d`, single-variable rows become lower bounds on their variable, and the
//! tableau expresses basic variables in terms of nonbasic ones. Pivots
//! follow Bland's rule (smallest violated basic variable, smallest eligible
//! nonbasic variable), which guarantees termination. A basic variable that
//! violates its bound and has no eligible pivot yields a Farkas certificate
//! directly from its tableau row.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use super::linsys::{LinearSystem, Rational, Row, Verdict};
use super::solver::SolveStats;

/// Sparse linear form over solver variables, sorted by variable id.
type Form = Vec<(usize, Rational)>;

/// `a + k·b` for sparse sorted forms.
fn axpy(a: &Form, k: &Rational, b: &Form) -> Form {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((va, ca)), Some((vb, _))) if va < vb => {
                out.push((*va, ca.clone()));
                i += 1;
            }
            (Some((va, _)), Some((vb, cb))) if vb < va => {
                out.push((*vb, k * cb));
                j += 1;
            }
            (Some((va, ca)), Some((_, cb))) => {
                let c = ca + k * cb;
                if !c.is_zero() {
                    out.push((*va, c));
                }
                i += 1;
                j += 1;
            }
            (Some((va, ca)), None) => {
                out.push((*va, ca.clone()));
                i += 1;
            }
            (None, Some((vb, cb))) => {
                out.push((*vb, k * cb));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn coefficient(form: &Form, var: usize) -> Option<&Rational> {
    form.binary_search_by_key(&var, |(v, _)| *v)
        .ok()
        .map(|k| &form[k].1)
}

/// A lower bound together with the system row it came from and the factor
/// that turns the solver variable back into that row's left-hand side.
#[derive(Debug, Clone)]
struct Bound {
    value: Rational,
    row: usize,
    // row lhs = scale · variable
    scale: Rational,
}

struct Tableau {
    num_structural: usize,
    lower: Vec<Option<Bound>>,
    value: Vec<Rational>,
    // basic variable -> its form over nonbasic variables
    rows: BTreeMap<usize, Form>,
    pivots: u64,
}

pub fn solve(sys: &LinearSystem) -> (Verdict, SolveStats) {
    let n = sys.num_vars();
    let mut stats = SolveStats {
        rows_in: sys.num_rows(),
        ..SolveStats::default()
    };

    // Constant rows decide themselves.
    for (k, row) in sys.rows().iter().enumerate() {
        if row.coeffs.is_empty() && row.bound.is_positive() {
            let certificate = BTreeMap::from([(k, Rational::one())]);
            return (Verdict::Infeasible { certificate }, stats);
        }
    }

    // Tightest lower bound per variable from rows `c·x ≥ d` with c > 0.
    let mut lower: Vec<Option<Bound>> = vec![None; n];
    for (k, row) in sys.rows().iter().enumerate() {
        if let [(j, c)] = row.coeffs.as_slice() {
            if c.is_positive() {
                let value = &row.bound / c;
                let tighter = lower[*j].as_ref().is_none_or(|b| value > b.value);
                if tighter {
                    lower[*j] = Some(Bound {
                        value,
                        row: k,
                        scale: c.clone(),
                    });
                }
            }
        }
    }

    // Remaining rows become slacks, deduplicated by coefficient vector and
    // skipped when already implied by the variable bounds.
    let mut general: HashMap<&[(usize, Rational)], usize> = HashMap::new();
    for (k, row) in sys.rows().iter().enumerate() {
        if row.coeffs.is_empty() || is_bound_row(row) || implied_by_bounds(row, &lower) {
            continue;
        }
        general
            .entry(row.coeffs.as_slice())
            .and_modify(|best| {
                if row.bound > sys.rows()[*best].bound {
                    *best = k;
                }
            })
            .or_insert(k);
    }
    let mut slack_rows: Vec<usize> = general.into_values().collect();
    slack_rows.sort_unstable();
    stats.rows_used = slack_rows.len();

    let total = n + slack_rows.len();
    let mut value: Vec<Rational> = (0..n)
        .map(|j| lower[j].as_ref().map_or_else(Rational::zero, |b| b.value.clone()))
        .collect();
    let mut rows = BTreeMap::new();
    for (s, &k) in slack_rows.iter().enumerate() {
        let row = &sys.rows()[k];
        let var = n + s;
        value.push(row.evaluate(&value[..n]));
        lower.push(Some(Bound {
            value: row.bound.clone(),
            row: k,
            scale: Rational::one(),
        }));
        rows.insert(var, row.coeffs.clone());
    }
    debug_assert_eq!(value.len(), total);

    let mut tableau = Tableau {
        num_structural: n,
        lower,
        value,
        rows,
        pivots: 0,
    };
    let verdict = tableau.check();
    stats.pivots = tableau.pivots;
    (verdict, stats)
}

fn is_bound_row(row: &Row) -> bool {
    matches!(row.coeffs.as_slice(), [(_, c)] if c.is_positive())
}

fn implied_by_bounds(row: &Row, lower: &[Option<Bound>]) -> bool {
    let mut least = Rational::zero();
    for (j, c) in &row.coeffs {
        match &lower[*j] {
            Some(b) if c.is_positive() => least += c * &b.value,
            _ => return false,
        }
    }
    least >= row.bound
}

impl Tableau {
    fn violated(&self, var: usize) -> bool {
        matches!(&self.lower[var], Some(b) if self.value[var] < b.value)
    }

    fn at_lower(&self, var: usize) -> bool {
        matches!(&self.lower[var], Some(b) if self.value[var] <= b.value)
    }

    fn check(&mut self) -> Verdict {
        loop {
            let Some(basic) = self.rows.keys().copied().find(|&b| self.violated(b)) else {
                return Verdict::Feasible {
                    witness: self.value[..self.num_structural].to_vec(),
                };
            };
            // Increase `basic`: a positive coefficient lets its nonbasic grow
            // (no upper bounds), a negative one needs room to decrease.
            let entering = self.rows[&basic]
                .iter()
                .find(|(j, c)| c.is_positive() || !self.at_lower(*j))
                .map(|(j, _)| *j);
            match entering {
                Some(j) => {
                    let target = self.lower[basic].as_ref().expect("violated").value.clone();
                    self.pivot_and_update(basic, j, target);
                }
                None => return self.conflict(basic),
            }
        }
    }

    fn pivot_and_update(&mut self, basic: usize, entering: usize, target: Rational) {
        self.pivots += 1;
        let a = coefficient(&self.rows[&basic], entering)
            .expect("entering variable in row")
            .clone();
        let theta = (&target - &self.value[basic]) / &a;
        self.value[basic] = target;
        self.value[entering] += &theta;
        for (&other, form) in &self.rows {
            if other != basic {
                if let Some(c) = coefficient(form, entering) {
                    self.value[other] += c * &theta;
                }
            }
        }

        // basic = a·entering + rest  ⇒  entering = (basic − rest) / a
        let old = self.rows.remove(&basic).expect("basic row");
        let inv = Rational::one() / &a;
        let mut solved: Form = old
            .into_iter()
            .filter(|(v, _)| *v != entering)
            .map(|(v, c)| (v, -(c * &inv)))
            .collect();
        let pos = solved.partition_point(|(v, _)| *v < basic);
        solved.insert(pos, (basic, inv));

        for form in self.rows.values_mut() {
            if let Some(c) = coefficient(form, entering).cloned() {
                let without: Form = form.iter().filter(|(v, _)| *v != entering).cloned().collect();
                *form = axpy(&without, &c, &solved);
            }
        }
        self.rows.insert(entering, solved);
    }

    /// `basic − Σ t_j x_j ≡ 0` with every `t_j ≤ 0` on a bounded variable at
    /// its lower bound and no free variable left: weighting the source rows
    /// by `1` and `−t_j` gives `0 ≥ lower(basic) − value(basic) > 0`.
    fn conflict(&self, basic: usize) -> Verdict {
        let mut certificate: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut add = |var: usize, weight: Rational| {
            let bound = self.lower[var].as_ref().expect("bounded");
            *certificate.entry(bound.row).or_insert_with(Rational::zero) += weight / &bound.scale;
        };
        add(basic, Rational::one());
        for (j, t) in &self.rows[&basic] {
            debug_assert!(!t.is_positive());
            add(*j, -t.clone());
        }
        certificate.retain(|_, y| !y.is_zero());
        Verdict::Infeasible { certificate }
    }
}
