//! Empirical checks of the character-sum, common-neighbor and
//! nonresidue-run bounds over ranges of primes.

use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::SeedableRng;

use crate::error::Result;
use crate::numtheory::{is_admissible, primes_up_to, PrimeField};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditOptions {
    pub seed: u64,
    /// Largest tuple size for the character-sum check.
    pub max_k: usize,
    /// Random tuples per `(p, k)`.
    pub samples: usize,
    /// Character sums are sampled for primes up to here.
    pub burgess_limit: u64,
    /// Common-neighbor counts are computed for `p ≡ 1 (mod 4)` up to here.
    pub common_neighbor_limit: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            max_k: 4,
            samples: 200,
            burgess_limit: 199,
            common_neighbor_limit: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgessSummary {
    /// Largest `|S| / ((k − 1)√p)` over sampled tuples with `k ≥ 2`.
    pub max_ratio: f64,
    pub tuples: usize,
    pub violations: usize,
}

/// Samples distinct tuples of each size `1..=max_k` and compares the
/// character sum against `(k − 1)√p`. For `k = 1` the bound is `0`.
pub fn burgess_check(pf: &PrimeField, max_k: usize, samples: usize, rng: &mut StdRng) -> Result<BurgessSummary> {
    let p = pf.p();
    let mut summary = BurgessSummary {
        max_ratio: 0.0,
        tuples: 0,
        violations: 0,
    };
    for k in 1..=max_k.min(p as usize - 1) {
        for _ in 0..samples {
            let points: Vec<u64> = sample(rng, p as usize, k).into_iter().map(|x| x as u64).collect();
            let s = pf.character_sum(&points)?;
            summary.tuples += 1;
            // |s| ≤ (k−1)√p  ⇔  s² ≤ (k−1)² p
            let bound_sq = ((k - 1) * (k - 1)) as i128 * p as i128;
            if (s as i128) * (s as i128) > bound_sq {
                summary.violations += 1;
            }
            if k >= 2 {
                let ratio = s.unsigned_abs() as f64 / ((k - 1) as f64 * (p as f64).sqrt());
                summary.max_ratio = summary.max_ratio.max(ratio);
            }
        }
    }
    Ok(summary)
}

/// Largest `| |(Γ(x) ∩ Γ(y)) \ Γ(z)| − p/8 |` over distinct triples of the
/// Paley graph, taking `x = 0` by translation invariance.
pub fn common_neighbor_deviation(pf: &PrimeField) -> f64 {
    let p = pf.p() as usize;
    let words = p.div_ceil(64);
    let mut rows = vec![vec![0u64; words]; p];
    for (a, row) in rows.iter_mut().enumerate() {
        for b in 0..p {
            if a != b && pf.is_residue(pf.sub(a as u64, b as u64)) {
                row[b / 64] |= 1 << (b % 64);
            }
        }
    }
    let (mut lo, mut hi) = (usize::MAX, 0);
    for y in 1..p {
        let xy: Vec<u64> = rows[0].iter().zip(&rows[y]).map(|(a, b)| a & b).collect();
        for (z, row_z) in rows.iter().enumerate().skip(1) {
            if z == y {
                continue;
            }
            let count: usize = xy
                .iter()
                .zip(row_z)
                .map(|(a, b)| (a & !b).count_ones() as usize)
                .sum();
            lo = lo.min(count);
            hi = hi.max(count);
        }
    }
    let center = p as f64 / 8.0;
    (hi as f64 - center).max(center - lo as f64)
}

pub fn lemma_bound(p: u64) -> f64 {
    5.0 * (p as f64).sqrt() + 1.0
}

pub fn improved_bound(p: u64) -> f64 {
    2.0 * (p as f64).sqrt() + 2.0
}

/// `L_p ≤ √p`, compared exactly.
pub fn within_run_bound(p: u64, run: u64) -> bool {
    run * run <= p
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub p: u64,
    pub l_p: u64,
    pub run_bound_holds: bool,
    pub burgess: Option<BurgessSummary>,
    pub cn_max_deviation: Option<f64>,
    pub admissible: bool,
    /// Agreement of admissibility with `p ≡ 5 (mod 24)`.
    pub congruence_agrees: bool,
}

impl AuditRow {
    pub fn cn_within_lemma(&self) -> Option<bool> {
        self.cn_max_deviation.map(|d| d <= lemma_bound(self.p))
    }

    pub fn cn_within_improved(&self) -> Option<bool> {
        self.cn_max_deviation.map(|d| d <= improved_bound(self.p))
    }
}

/// One row per odd prime up to `max`. The random stream is drawn from a
/// single generator seeded once, in increasing order of `p`.
pub fn audit(max: u64, options: &AuditOptions) -> Result<Vec<AuditRow>> {
    let mut rng = StdRng::seed_from_u64(options.seed);
    let mut rows = Vec::new();
    for p in primes_up_to(max).into_iter().filter(|&p| p > 2) {
        let pf = PrimeField::new(p)?;
        let l_p = pf.max_nonresidue_run();
        let burgess = if p <= options.burgess_limit {
            Some(burgess_check(&pf, options.max_k, options.samples, &mut rng)?)
        } else {
            None
        };
        let cn_max_deviation =
            (p % 4 == 1 && p <= options.common_neighbor_limit).then(|| common_neighbor_deviation(&pf));
        let admissible = is_admissible(p);
        rows.push(AuditRow {
            p,
            l_p,
            run_bound_holds: within_run_bound(p, l_p),
            burgess,
            cn_max_deviation,
            admissible,
            congruence_agrees: admissible == (p > 5 && p % 24 == 5),
        });
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "p,L_p,burgess_max_ratio,cn_max_deviation,admissible";

/// CSV with the columns of [`CSV_HEADER`]; columns not computed for a prime
/// are left empty.
pub fn to_csv(rows: &[AuditRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let burgess = r.burgess.map(|b| format!("{:.6}", b.max_ratio)).unwrap_or_default();
        let cn = r.cn_max_deviation.map(|d| format!("{d:.3}")).unwrap_or_default();
        out.push_str(&format!("{},{},{},{},{}\n", r.p, r.l_p, burgess, cn, r.admissible));
    }
    out
}
