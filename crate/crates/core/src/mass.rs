//! Smith–Minkowski–Siegel masses, evaluated exactly.
//!
//! The standard mass carries powers of π (from Γ(j/2), ζ(2k) and L(s, χ)) that cancel; the
//! computation squares every factor, tracks the π exponent separately, checks it vanishes and
//! takes an exact rational square root at the end.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::genus::{Constituent, GenusSymbol, LocalSymbol};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MassValue {
    pub value: BigRational,
}

impl MassValue {
    pub fn new(value: BigRational) -> Self {
        MassValue { value }
    }

    pub fn zero() -> Self {
        MassValue { value: BigRational::zero() }
    }

    pub fn scale(&self, k: u64) -> Self {
        MassValue { value: &self.value * BigRational::from_integer(BigInt::from(k)) }
    }

    /// Parses `"p/q"` or an integer.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let (n, d) = t.split_once('/').unwrap_or((t, "1"));
        let n: BigInt = n.trim().parse().map_err(|_| Error::Parse { pos: 0, msg: format!("bad rational '{t}'") })?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Parse { pos: 0, msg: format!("bad rational '{t}'") })?;
        if d.is_zero() {
            return Err(Error::Parse { pos: 0, msg: "zero denominator".into() });
        }
        Ok(MassValue { value: BigRational::new(n, d) })
    }
}

impl fmt::Display for MassValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.value.numer(), self.value.denom())
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

fn binomial(n: u64, k: u64) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn ratio(a: impl Into<BigInt>, b: impl Into<BigInt>) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// Bernoulli numbers `B_0..=B_k` with `B_1 = −1/2`.
pub fn bernoulli_table(k: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(k + 1);
    for m in 0..=k {
        if m == 0 {
            b.push(BigRational::one());
            continue;
        }
        let mut s = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            s += BigRational::from_integer(binomial(m as u64 + 1, j as u64)) * bj;
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

pub fn bernoulli(k: usize) -> BigRational {
    bernoulli_table(k).pop().expect("nonempty")
}

/// Bernoulli polynomial `B_k(x)`.
fn bernoulli_poly(k: usize, x: &BigRational, table: &[BigRational]) -> BigRational {
    let mut s = BigRational::zero();
    let mut xp = BigRational::one();
    // Σ C(k,j) B_j x^{k−j}, accumulated from j = k downwards
    for j in (0..=k).rev() {
        s += BigRational::from_integer(binomial(k as u64, j as u64)) * &table[j] * &xp;
        xp *= x;
    }
    s
}

/// Discriminant of `ℚ(√d)`.
pub fn fundamental_discriminant(d: &BigInt) -> BigInt {
    assert!(!d.is_zero());
    let mut core = if d.is_negative() { -BigInt::one() } else { BigInt::one() };
    for p in arith::prime_divisors(d) {
        if arith::valuation(d, p) % 2 == 1 {
            core *= p;
        }
    }
    if core.mod_floor(&BigInt::from(4)) == BigInt::one() {
        core
    } else {
        core * 4
    }
}

/// Generalized Bernoulli number `B_{k,χ}` for the Kronecker character of a fundamental
/// discriminant `d0`, by the finite sum over residues mod the conductor.
pub fn character_bernoulli(k: usize, d0: &BigInt) -> BigRational {
    let f = d0.abs();
    let table = bernoulli_table(k);
    if f.is_one() {
        let mut b = table[k].clone();
        if k == 1 {
            b = -b;
        }
        return b;
    }
    let fu: u64 = f.clone().try_into().expect("conductor fits in u64");
    let mut s = BigRational::zero();
    for a in 1..=fu {
        let c = arith::kronecker(d0, a);
        if c != 0 {
            let x = ratio(a, fu);
            s += BigRational::from_integer(BigInt::from(c)) * bernoulli_poly(k, &x, &table);
        }
    }
    s * BigRational::from_integer(f.pow(k as u32 - 1))
}

fn rpow(p: u64, e: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(p).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        b
    } else {
        b.recip()
    }
}

/// `M(species)` at the prime `p`.
fn m_species(species: i64, p: u64) -> BigRational {
    if species == 0 {
        return BigRational::one();
    }
    let n = species.abs();
    let s = (n + 1) / 2;
    let mut mp = BigRational::from_integer(BigInt::from(2));
    for k in 1..s {
        mp *= BigRational::one() - rpow(p, -2 * k);
    }
    if n % 2 == 0 {
        let t = rpow(p, -s);
        mp *= if species > 0 { BigRational::one() - t } else { BigRational::one() + t };
    }
    mp.recip()
}

fn species_odd(c: &Constituent, p: u64) -> i64 {
    let n = c.dim as i64;
    if n % 2 == 1 {
        return n;
    }
    let minus_one = arith::kronecker_prime(&BigInt::from(-1), p);
    let expected = if (n / 2) % 2 == 0 { 1 } else { minus_one };
    if i32::from(c.det) == expected {
        n
    } else {
        -n
    }
}

/// Species of every 2-adic constituent, zero-dimensional ones included, from scale −1 to
/// one past the top.
fn species_two(cons: &[Constituent]) -> Vec<i64> {
    let top = cons.iter().map(|c| c.scale as i64).max().unwrap_or(0);
    let at = |s: i64| cons.iter().find(|c| c.scale as i64 == s && c.dim > 0);
    let odd = |s: i64| at(s).is_some_and(|c| c.odd);
    let mut out = Vec::new();
    for s in -1..=top + 1 {
        let free = !odd(s - 1) && !odd(s + 1);
        let (n, is_odd, det, oddity) = match at(s) {
            Some(c) => (c.dim as i64, c.odd, c.det, c.oddity),
            None => (0, false, 1, 0),
        };
        let octane = (oddity as i64 + if det == -1 { 4 } else { 0 }) % 8;
        let t = if !is_odd || n % 2 == 1 { n / 2 } else { n / 2 - 1 };
        let species = if free && matches!(octane, 0 | 1 | 7) {
            2 * t
        } else if free && matches!(octane, 3 | 4 | 5) {
            -2 * t
        } else {
            2 * t + 1
        };
        out.push(species);
    }
    out
}

/// Square of the local mass `m_p`.
fn local_mass_sq(l: &LocalSymbol) -> BigRational {
    let p = l.prime;
    let cons: Vec<&Constituent> = l.constituents.iter().filter(|c| c.dim > 0).collect();
    let mut m = BigRational::one();
    if p == 2 {
        for sp in species_two(&l.constituents) {
            m *= m_species(sp, 2);
        }
    } else {
        for c in &cons {
            m *= m_species(species_odd(c, p), p);
        }
    }
    let mut sq = &m * &m;
    for (i, a) in cons.iter().enumerate() {
        for b in &cons[i + 1..] {
            let e = (b.scale as i64 - a.scale as i64) * (a.dim * b.dim) as i64;
            sq *= rpow(p, e);
        }
    }
    if p == 2 {
        let n_ii: i64 = cons.iter().filter(|c| !c.odd).map(|c| c.dim as i64).sum();
        let n_i_i = cons
            .iter()
            .filter(|a| a.odd && cons.iter().any(|b| b.odd && b.scale == a.scale + 1))
            .count() as i64;
        sq *= rpow(2, 2 * (n_i_i - n_ii));
    }
    sq
}

/// Square of the standard local mass `std_p`.
fn std_local_sq(p: u64, n: usize, chi_p: i32) -> BigRational {
    let s = if n % 2 == 0 { n / 2 } else { (n + 1) / 2 } as i64;
    let mut d = BigRational::from_integer(BigInt::from(2));
    for k in 1..s {
        d *= BigRational::one() - rpow(p, -2 * k);
    }
    if n % 2 == 0 {
        d *= BigRational::one() - BigRational::from_integer(BigInt::from(chi_p)) * rpow(p, -s);
    }
    let v = d.recip();
    &v * &v
}

/// Exact mass of a positive-definite genus.
pub fn sms_mass(sym: &GenusSymbol) -> Result<MassValue> {
    let n = sym.rank();
    if sym.signature.1 != 0 {
        return Err(Error::Unsupported("mass of an indefinite genus".into()));
    }
    if n == 0 {
        return Err(Error::Domain("mass of the rank-0 genus is not defined".into()));
    }
    if n == 1 {
        // a single class with automorphism group {±1}
        return Ok(MassValue::new(ratio(1, 2)));
    }
    let s = if n % 2 == 0 { n / 2 } else { (n + 1) / 2 };
    let bern = bernoulli_table(2 * s);
    let mut sq = BigRational::from_integer(BigInt::from(4));
    let mut pi_exp: i64 = -((n * (n + 1)) as i64) / 2;
    for j in 1..=n as u64 {
        let g = if j % 2 == 0 {
            BigRational::from_integer(factorial(j / 2 - 1))
        } else {
            let m = (j - 1) / 2;
            pi_exp += 1;
            BigRational::new(factorial(2 * m), BigInt::from(4).pow(m as u32) * factorial(m))
        };
        sq *= &g * &g;
    }
    for k in 1..s {
        let z = bern[2 * k].abs() * BigRational::from_integer(BigInt::from(2).pow(2 * k as u32))
            / BigRational::from_integer(BigInt::from(2) * factorial(2 * k as u64));
        sq *= &z * &z;
        pi_exp += 4 * k as i64;
    }
    let det = sym.determinant();
    let d0 = if n % 2 == 0 {
        let d = if s % 2 == 0 { det.clone() } else { -det.clone() };
        let d0 = fundamental_discriminant(&d);
        let f = BigRational::from_integer(d0.abs());
        let b = character_bernoulli(s, &d0) / BigRational::from_integer(factorial(s as u64));
        let two_over_f = BigRational::from_integer(BigInt::from(2)) / &f;
        let mut l_sq = &f / BigRational::from_integer(BigInt::from(4)) * &b * &b;
        for _ in 0..2 * s {
            l_sq *= &two_over_f;
        }
        sq *= l_sq;
        pi_exp += 2 * s as i64;
        Some(d0)
    } else {
        None
    };
    if pi_exp != 0 {
        return Err(Error::Domain(format!("π exponent {pi_exp} does not cancel")));
    }
    for l in &sym.locals {
        let chi = d0.as_ref().map(|d| arith::kronecker_prime(d, l.prime)).unwrap_or(0);
        sq *= local_mass_sq(l) / std_local_sq(l.prime, n, chi);
    }
    let m = arith::rational_sqrt(&sq).ok_or_else(|| Error::Domain("mass² is not a rational square".into()))?;
    Ok(MassValue::new(m))
}
