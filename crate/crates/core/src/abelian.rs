//! Finite abelian groups given as products of cyclic factors.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `ℤ/n₁ ⊕ … ⊕ ℤ/n_k`. The factors need not form a divisibility chain;
/// [`FiniteAbelianGroup::normalized`] produces the canonical one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
}

impl TryFrom<Vec<u64>> for FiniteAbelianGroup {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FiniteAbelianGroup> for Vec<u64> {
    fn from(g: FiniteAbelianGroup) -> Self {
        g.factors
    }
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if let Some(bad) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::Group(format!("cyclic factor {} must be at least 2", bad)));
        }
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { factors: Vec::new() }
    }

    /// `ℤ/n`; the trivial group for `n = 1`.
    pub fn cyclic(n: u64) -> Result<Self> {
        match n {
            0 => Err(Error::Group("ℤ/0 is not finite".into())),
            1 => Ok(Self::trivial()),
            _ => Ok(FiniteAbelianGroup { factors: vec![n] }),
        }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |a, &n| a.lcm(&n))
    }

    /// Invariant factors `n₁ | n₂ | …`, all ≥ 2.
    pub fn normalized(&self) -> FiniteAbelianGroup {
        // collect prime powers per prime, then recombine from the largest down
        let mut by_prime: std::collections::BTreeMap<u64, Vec<u64>> = Default::default();
        for &n in &self.factors {
            for (p, e) in factorize(n) {
                by_prime.entry(p).or_default().push(p.pow(e));
            }
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut out = vec![1u64; len];
        for powers in by_prime.values_mut() {
            powers.sort_unstable_by(|a, b| b.cmp(a));
            for (k, q) in powers.iter().enumerate() {
                out[len - 1 - k] *= q;
            }
        }
        FiniteAbelianGroup { factors: out }
    }

    /// Smallest number of generators.
    pub fn min_generators(&self) -> usize {
        self.normalized().rank()
    }

    pub fn is_cyclic(&self) -> bool {
        self.min_generators() <= 1
    }

    pub fn is_isomorphic(&self, other: &FiniteAbelianGroup) -> bool {
        self.normalized() == other.normalized()
    }

    pub fn zero(&self) -> AbelianElement {
        AbelianElement { group: self.clone(), coords: vec![0; self.factors.len()] }
    }

    /// Element with the given coordinates, reduced modulo each factor.
    pub fn element(&self, coords: &[i64]) -> Result<AbelianElement> {
        if coords.len() != self.factors.len() {
            return Err(Error::Group(format!(
                "{} coordinates for a group with {} factors",
                coords.len(),
                self.factors.len()
            )));
        }
        let coords = coords
            .iter()
            .zip(&self.factors)
            .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
            .collect();
        Ok(AbelianElement { group: self.clone(), coords })
    }

    /// All elements in lexicographic coordinate order.
    pub fn elements(&self) -> impl Iterator<Item = AbelianElement> + '_ {
        let order = self.order();
        (0..order).map(move |mut idx| {
            let mut coords = vec![0; self.factors.len()];
            for (j, &n) in self.factors.iter().enumerate().rev() {
                coords[j] = idx % n;
                idx /= n;
            }
            AbelianElement { group: self.clone(), coords }
        })
    }

    /// Every abelian group of order `n`, up to isomorphism, in normalized form.
    pub fn all_of_order(n: u64) -> Vec<FiniteAbelianGroup> {
        if n == 0 {
            return Vec::new();
        }
        let mut groups = vec![Vec::<u64>::new()];
        for (p, e) in factorize(n) {
            let mut next = Vec::new();
            for part in partitions(e as usize) {
                for g in &groups {
                    let mut g = g.clone();
                    g.extend(part.iter().map(|&k| p.pow(k as u32)));
                    next.push(g);
                }
            }
            groups = next;
        }
        let mut out: Vec<FiniteAbelianGroup> = groups
            .into_iter()
            .map(|f| FiniteAbelianGroup { factors: f }.normalized())
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("ℤ/{}", n)).collect();
        write!(f, "{}", parts.join("×"))
    }
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            go(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// An element of a [`FiniteAbelianGroup`], coordinates reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianElement {
    group: FiniteAbelianGroup,
    coords: Vec<u64>,
}

impl AbelianElement {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn times(&self, k: i64) -> AbelianElement {
        let coords = self
            .coords
            .iter()
            .zip(&self.group.factors)
            .map(|(&c, &n)| ((c as i128 * k as i128).rem_euclid(n as i128)) as u64)
            .collect();
        AbelianElement { group: self.group.clone(), coords }
    }

    fn combine(&self, other: &AbelianElement, sign: i64) -> Result<AbelianElement> {
        if self.group != other.group {
            return Err(Error::Group(format!(
                "elements of {} and {} cannot be combined",
                self.group, other.group
            )));
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .zip(&self.group.factors)
            .map(|((&a, &b), &n)| (a as i128 + sign as i128 * b as i128).rem_euclid(n as i128) as u64)
            .collect();
        Ok(AbelianElement { group: self.group.clone(), coords })
    }

    pub fn try_add(&self, other: &AbelianElement) -> Result<AbelianElement> {
        self.combine(other, 1)
    }

    pub fn try_sub(&self, other: &AbelianElement) -> Result<AbelianElement> {
        self.combine(other, -1)
    }
}

impl Add for &AbelianElement {
    type Output = AbelianElement;
    fn add(self, rhs: &AbelianElement) -> AbelianElement {
        self.try_add(rhs).expect("elements of different groups")
    }
}

impl Sub for &AbelianElement {
    type Output = AbelianElement;
    fn sub(self, rhs: &AbelianElement) -> AbelianElement {
        self.try_sub(rhs).expect("elements of different groups")
    }
}

impl Neg for &AbelianElement {
    type Output = AbelianElement;
    fn neg(self) -> AbelianElement {
        self.times(-1)
    }
}

impl fmt::Display for AbelianElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Least `k ≥ 1` with `k·g = 0`.
pub fn element_order(g: &AbelianElement) -> u64 {
    g.coords
        .iter()
        .zip(&g.group.factors)
        .fold(1, |acc, (&c, &n)| acc.lcm(&(n / n.gcd(&c))))
}
