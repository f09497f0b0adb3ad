//! Quadratic residues over a prime field.
//!
//! Legendre symbols are computed with Euler's criterion and cached in a
//! [`PrimeField`] so that the graph and path-system builders can query
//! residuosity in constant time.

use crate::error::{Error, Result};

/// Smallest nontrivial divisor of `n`, by trial division up to `√n`.
///
/// Returns `None` when `n` is prime. `0` and `1` report themselves.
pub fn smallest_divisor(n: u64) -> Option<u64> {
    if n < 2 {
        return Some(n);
    }
    if n.is_multiple_of(2) {
        return if n == 2 { None } else { Some(2) };
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return Some(d);
        }
        d += 2;
    }
    None
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_divisor(n).is_none()
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p < 3 {
        return Err(Error::NotOddPrime { n: p });
    }
    match smallest_divisor(p) {
        None => Ok(()),
        Some(divisor) => Err(Error::NotPrime { n: p, divisor }),
    }
}

/// `base^exp mod modulus` by square-and-multiply.
pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc: u128 = 1;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Legendre symbol `(a/p)` by Euler's criterion.
pub fn legendre(a: u64, p: u64) -> Result<i8> {
    check_odd_prime(p)?;
    if a >= p {
        return Err(Error::OutOfField { a, p });
    }
    Ok(euler_criterion(a, p))
}

fn euler_criterion(a: u64, p: u64) -> i8 {
    if a == 0 {
        return 0;
    }
    match pow_mod(a, (p - 1) / 2, p) {
        1 => 1,
        r => {
            debug_assert_eq!(r, p - 1);
            -1
        }
    }
}

/// A prime field `F_p` together with its quadratic-residue table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    legendre: Vec<i8>,
    residues: Vec<u64>,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        check_odd_prime(p)?;
        let legendre: Vec<i8> = (0..p).map(|a| euler_criterion(a, p)).collect();
        let residues = (1..p).filter(|&a| legendre[a as usize] == 1).collect();
        Ok(Self {
            p,
            legendre,
            residues,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Cached Legendre symbol of `a mod p`.
    pub fn legendre(&self, a: u64) -> i8 {
        self.legendre[(a % self.p) as usize]
    }

    pub fn is_residue(&self, a: u64) -> bool {
        self.legendre(a) == 1
    }

    pub fn is_nonresidue(&self, a: u64) -> bool {
        self.legendre(a) == -1
    }

    /// Nonzero squares, ascending.
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    /// Nonsquares, ascending.
    pub fn nonresidues(&self) -> Vec<u64> {
        (1..self.p).filter(|&a| self.is_nonresidue(a)).collect()
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a % self.p + b % self.p) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a % self.p + self.p - b % self.p) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    /// Multiplicative inverse via Fermat's little theorem. `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "zero has no inverse");
        pow_mod(a, self.p - 2, self.p)
    }

    pub fn div(&self, a: u64, b: u64) -> u64 {
        self.mul(a, self.inv(b))
    }

    /// Length of the longest run `a, a+1, …` of consecutive nonresidues.
    ///
    /// Zero is neither a residue nor a nonresidue and ends every run, so
    /// runs live inside `1..p`.
    pub fn max_nonresidue_run(&self) -> u64 {
        let mut best = 0;
        let mut current = 0;
        for a in 1..self.p {
            if self.is_nonresidue(a) {
                current += 1;
                best = best.max(current);
            } else {
                current = 0;
            }
        }
        best
    }

    /// `Σ_x Π_i (x − a_i / p)` over the whole field.
    pub fn character_sum(&self, points: &[u64]) -> Result<i64> {
        if points.is_empty() || points.len() as u64 >= self.p {
            return Err(Error::PointCount {
                got: points.len(),
                max: (self.p - 1) as usize,
            });
        }
        let mut seen = vec![false; self.p as usize];
        for &a in points {
            if a >= self.p {
                return Err(Error::OutOfField { a, p: self.p });
            }
            if std::mem::replace(&mut seen[a as usize], true) {
                return Err(Error::DuplicatePoint(a));
            }
        }
        let sum = (0..self.p)
            .map(|x| {
                points
                    .iter()
                    .map(|&a| self.legendre(self.sub(x, a)) as i64)
                    .product::<i64>()
            })
            .sum();
        Ok(sum)
    }
}

/// Why `p` fails admissibility, checked in order: primality, `p > 5`,
/// `−1 ∈ R`, `2 ∈ N`, `3 ∈ N`. `None` means admissible.
pub fn admissibility_failure(p: u64) -> Option<String> {
    if !is_prime(p) {
        return Some(format!("{p} is not prime"));
    }
    if p <= 5 {
        return Some(format!("{p} is not greater than 5"));
    }
    let pf = PrimeField::new(p).expect("odd prime");
    if !pf.is_residue(p - 1) {
        return Some(format!("-1 is a quadratic non-residue mod {p}"));
    }
    if !pf.is_nonresidue(2) {
        return Some(format!("2 is a quadratic residue mod {p}"));
    }
    if !pf.is_nonresidue(3) {
        return Some(format!("3 is a quadratic residue mod {p}"));
    }
    None
}

/// Prime `p > 5` with `−1` a residue and `2`, `3` nonresidues.
pub fn is_admissible(p: u64) -> bool {
    admissibility_failure(p).is_none()
}

pub(crate) fn require_admissible(pf: &PrimeField) -> Result<()> {
    match admissibility_failure(pf.p()) {
        None => Ok(()),
        Some(reason) => Err(Error::NotAdmissible { p: pf.p(), reason }),
    }
}

/// All admissible primes up to `limit`, ascending.
pub fn admissible_primes(limit: u64) -> Vec<u64> {
    primes_up_to(limit)
        .into_iter()
        .filter(|&p| is_admissible(p))
        .collect()
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}
