//! p-adic Jordan decompositions and canonical genus symbols.
//!
//! Symbols use the Conway–Sloane conventions. At `p = 2` the raw Jordan data is reduced to a
//! canonical form by oddity fusion (only the total oddity of a compartment is kept, on its
//! first constituent) and sign walking (signs are pushed to the first constituent of each
//! train).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{self, RatMatrix};
use crate::error::{Error, Result};
use crate::lattice::IntLattice;

/// One Jordan constituent `(p^scale)^{±dim}`, with type and oddity at `p = 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constituent {
    pub scale: u32,
    pub dim: usize,
    /// ±1: the Legendre/Kronecker class of the unit part of the determinant.
    pub det: i8,
    /// Type I (odd); always false for odd primes.
    pub odd: bool,
    /// Oddity mod 8; zero unless `odd`.
    pub oddity: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalSymbol {
    pub prime: u64,
    /// Constituents of positive dimension, in increasing scale; dimensions sum to the rank.
    pub constituents: Vec<Constituent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenusSymbol {
    pub signature: (usize, usize),
    pub locals: Vec<LocalSymbol>,
}

impl GenusSymbol {
    pub fn rank(&self) -> usize {
        self.signature.0 + self.signature.1
    }

    pub fn local(&self, p: u64) -> Option<&LocalSymbol> {
        self.locals.iter().find(|l| l.prime == p)
    }

    /// Signed determinant implied by the symbol.
    pub fn determinant(&self) -> BigInt {
        let mut d = if self.signature.1 % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        for l in &self.locals {
            for c in &l.constituents {
                d *= BigInt::from(l.prime).pow(c.scale * c.dim as u32);
            }
        }
        d
    }

    /// Even lattice: the 2-adic unimodular constituent is absent or of type II.
    pub fn is_even(&self) -> bool {
        self.local(2)
            .map(|l| l.constituents.iter().all(|c| c.scale > 0 || !c.odd))
            .unwrap_or(true)
    }
}

struct Block {
    scale: i64,
    /// Unit part of the block determinant.
    unit_det: BigRational,
    /// Unit part of the entry for a 1×1 block.
    unit: Option<BigRational>,
}

fn pow_rat(p: u64, e: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(p).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        b
    } else {
        b.recip()
    }
}

fn split_off(a: &RatMatrix, idx: &[usize]) -> RatMatrix {
    let n = a.len();
    let rest: Vec<usize> = (0..n).filter(|i| !idx.contains(i)).collect();
    let b: RatMatrix = idx.iter().map(|&i| idx.iter().map(|&j| a[i][j].clone()).collect()).collect();
    let binv = arith::inverse_rat(&b).expect("pivot block is invertible");
    rest.iter()
        .map(|&i| {
            rest.iter()
                .map(|&j| {
                    let mut v = a[i][j].clone();
                    for (x, &k) in idx.iter().enumerate() {
                        for (y, &l) in idx.iter().enumerate() {
                            if !a[i][k].is_zero() && !a[l][j].is_zero() {
                                v -= &a[i][k] * &binv[x][y] * &a[l][j];
                            }
                        }
                    }
                    v
                })
                .collect()
        })
        .collect()
}

fn jordan_blocks(l: &IntLattice, p: u64) -> Result<Vec<Block>> {
    l.require_nondegenerate()?;
    let mut a = arith::to_rat_matrix(l.gram());
    let mut blocks = Vec::new();
    while !a.is_empty() {
        let n = a.len();
        let mut v = i64::MAX;
        for row in &a {
            for x in row {
                if !x.is_zero() {
                    v = v.min(arith::valuation_rat(x, p));
                }
            }
        }
        if v == i64::MAX {
            return Err(Error::Degenerate { radical_dim: n });
        }
        let val = |x: &BigRational| !x.is_zero() && arith::valuation_rat(x, p) == v;
        if let Some(i) = (0..n).find(|&i| val(&a[i][i])) {
            let u = &a[i][i] / pow_rat(p, v);
            blocks.push(Block { scale: v, unit_det: u.clone(), unit: Some(u) });
            a = split_off(&a, &[i]);
            continue;
        }
        let (i, j) = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| val(&a[i][j]))
            .expect("minimal valuation is attained off the diagonal");
        if p != 2 {
            // e_i ← e_i + e_j: the new diagonal entry has valuation exactly v
            for k in 0..n {
                let t = a[j][k].clone();
                a[i][k] += t;
            }
            for k in 0..n {
                let t = a[k][j].clone();
                a[k][i] += t;
            }
            let u = &a[i][i] / pow_rat(p, v);
            blocks.push(Block { scale: v, unit_det: u.clone(), unit: Some(u) });
            a = split_off(&a, &[i]);
        } else {
            let det = &a[i][i] * &a[j][j] - &a[i][j] * &a[j][i];
            blocks.push(Block { scale: v, unit_det: det / pow_rat(2, 2 * v), unit: None });
            a = split_off(&a, &[i, j]);
        }
    }
    Ok(blocks)
}

fn unit_class(x: &BigRational, p: u64) -> i8 {
    // x = a/b with both prime to p; its class is that of a·b
    let v = x.numer() * x.denom();
    arith::kronecker_prime(&v, p) as i8
}

fn unit_mod8(x: &BigRational) -> u8 {
    use num_integer::Integer;
    (x.numer() * x.denom()).mod_floor(&BigInt::from(8)).to_u8().expect("residue")
}

/// Raw (non-canonical) Jordan constituents of `L ⊗ ℤ_p`.
pub fn jordan_decomposition(l: &IntLattice, p: u64) -> Result<Vec<Constituent>> {
    if !arith::is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let blocks = jordan_blocks(l, p)?;
    let mut out: Vec<Constituent> = Vec::new();
    let mut scales: Vec<i64> = blocks.iter().map(|b| b.scale).collect();
    scales.sort();
    scales.dedup();
    for s in scales {
        if s < 0 {
            return Err(Error::Domain("negative scale in an integral lattice".into()));
        }
        let here: Vec<&Block> = blocks.iter().filter(|b| b.scale == s).collect();
        let dim: usize = here.iter().map(|b| if b.unit.is_some() { 1 } else { 2 }).sum();
        let mut det = BigRational::one();
        for b in &here {
            det *= &b.unit_det;
        }
        let odd = p == 2 && here.iter().any(|b| b.unit.is_some());
        let oddity = if odd {
            here.iter().filter_map(|b| b.unit.as_ref()).map(|u| u32::from(unit_mod8(u))).sum::<u32>() % 8
        } else {
            0
        };
        out.push(Constituent { scale: s as u32, dim, det: unit_class(&det, p), odd, oddity: oddity as u8 });
    }
    Ok(out)
}

fn compartments(sym: &[Constituent]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < sym.len() {
        if sym[i].odd {
            let mut c = vec![i];
            let mut j = i + 1;
            while j < sym.len() && sym[j].odd && sym[j].scale == sym[j - 1].scale + 1 {
                c.push(j);
                j += 1;
            }
            out.push(c);
            i = j;
        } else {
            i += 1;
        }
    }
    out
}

fn trains(sym: &[Constituent]) -> Vec<Vec<usize>> {
    if sym.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0];
    for i in 1..sym.len() {
        let (prev, c) = (&sym[i - 1], &sym[i]);
        let gap = c.scale - prev.scale;
        // consecutive type II forms (zero-dimensional forms count as type II) end a train
        let breaks = gap > 2 || (gap == 2 && !(prev.odd && c.odd)) || (!prev.odd && !c.odd);
        if breaks {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(i);
    }
    out.push(cur);
    out
}

/// Canonical 2-adic constituents (oddity fusion, then sign walking).
pub fn canonical_2adic(sym: &[Constituent]) -> Vec<Constituent> {
    let mut s: Vec<Constituent> = sym.iter().filter(|c| c.dim > 0).cloned().collect();
    s.sort_by_key(|c| c.scale);
    for c in s.iter_mut() {
        if !c.odd {
            c.oddity = 0;
        }
    }
    let comps = compartments(&s);
    for comp in &comps {
        let total: u32 = comp.iter().map(|&i| u32::from(s[i].oddity)).sum::<u32>() % 8;
        for &i in comp {
            s[i].oddity = 0;
        }
        s[comp[0]].oddity = total as u8;
    }
    for train in trains(&s) {
        for w in (1..train.len()).rev() {
            let (a, b) = (train[w - 1], train[w]);
            if s[b].det == -1 {
                s[b].det = 1;
                s[a].det = -s[a].det;
                for comp in &comps {
                    if comp.contains(&a) || comp.contains(&b) {
                        let f = comp[0];
                        s[f].oddity = (s[f].oddity + 4) % 8;
                    }
                }
            }
        }
    }
    s
}

/// Canonical genus symbol of a nondegenerate lattice.
pub fn genus_symbol(l: &IntLattice) -> Result<GenusSymbol> {
    let (pos, neg, zero) = l.signature();
    if zero > 0 {
        return Err(Error::Degenerate { radical_dim: zero });
    }
    let det = l.det();
    let mut primes = arith::prime_divisors(&(&det * BigInt::from(2)));
    primes.sort();
    let mut locals = Vec::new();
    for p in primes {
        let raw = jordan_decomposition(l, p)?;
        let constituents = if p == 2 { canonical_2adic(&raw) } else { raw };
        locals.push(LocalSymbol { prime: p, constituents });
    }
    Ok(GenusSymbol { signature: (pos, neg), locals })
}

pub fn same_genus(a: &IntLattice, b: &IntLattice) -> Result<bool> {
    Ok(genus_symbol(a)? == genus_symbol(b)?)
}

impl fmt::Display for GenusSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let even = self.is_even();
        write!(f, "{}_{{{},{}}}", if even { "II" } else { "I" }, self.signature.0, self.signature.1)?;
        let mut tokens = Vec::new();
        for l in &self.locals {
            for c in &l.constituents {
                if c.scale == 0 && !(l.prime == 2 && !even) {
                    continue;
                }
                let q = BigInt::from(l.prime).pow(c.scale);
                let sign = if c.det == 1 { '+' } else { '-' };
                let mut t = format!("{q}^{sign}{}", c.dim);
                if c.odd {
                    t.push_str(&format!("_{}", c.oddity));
                }
                tokens.push(t);
            }
        }
        if !tokens.is_empty() {
            write!(f, "({})", tokens.join(" "))?;
        }
        Ok(())
    }
}

pub fn format_symbol(s: &GenusSymbol) -> String {
    s.to_string()
}

struct Cursor<'a> {
    text: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn eat(&mut self, lit: &str) -> Result<()> {
        if self.text[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            Ok(())
        } else {
            self.err(format!("expected '{lit}'"))
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        Ok(std::str::from_utf8(&self.text[start..self.pos]).expect("ascii").parse().expect("digits"))
    }

    fn skip_spaces(&mut self) {
        while self.peek() == Some(b' ') {
            self.pos += 1;
        }
    }
}

fn prime_power(q: &BigInt) -> Option<(u64, u32)> {
    let q = q.to_u64()?;
    let f = arith::prime_factors_u64(q);
    match f.as_slice() {
        [(p, e)] => Some((*p, *e)),
        [] if q == 1 => None,
        _ => None,
    }
}

/// Parses `II_{a,b}(q^±d …)`; 2-adic odd constituents carry `_oddity`.
pub fn parse_symbol(text: &str) -> Result<GenusSymbol> {
    let mut c = Cursor { text: text.trim().as_bytes(), pos: 0 };
    let even = if c.text.starts_with(b"II_") {
        c.pos = 2;
        true
    } else if c.text.starts_with(b"I_") {
        c.pos = 1;
        false
    } else {
        return c.err("symbol must start with II_ or I_");
    };
    c.eat("_{")?;
    let pos = c.number()?;
    c.eat(",")?;
    let neg = c.number()?;
    c.eat("}")?;
    let signature = (pos.to_usize().unwrap_or(usize::MAX), neg.to_usize().unwrap_or(usize::MAX));
    let rank = signature.0.checked_add(signature.1).ok_or(Error::Parse { pos: 0, msg: "rank overflow".into() })?;
    let mut raw: Vec<(u64, Constituent)> = Vec::new();
    if c.peek() == Some(b'(') {
        c.pos += 1;
        loop {
            c.skip_spaces();
            if c.peek() == Some(b')') {
                c.pos += 1;
                break;
            }
            let at = c.pos;
            let q = c.number()?;
            let (p, scale) = if q.is_one() {
                if even {
                    return Err(Error::Parse { pos: at, msg: "unimodular token in an even symbol".into() });
                }
                (2, 0)
            } else {
                prime_power(&q).ok_or(Error::Parse { pos: at, msg: format!("{q} is not a prime power") })?
            };
            c.eat("^")?;
            let det = match c.peek() {
                Some(b'+') => 1,
                Some(b'-') => -1,
                _ => return c.err("expected sign"),
            };
            c.pos += 1;
            let dim = c.number()?.to_usize().unwrap_or(0);
            if dim == 0 {
                return Err(Error::Parse { pos: c.pos, msg: "zero dimension".into() });
            }
            let (odd, oddity) = if c.peek() == Some(b'_') {
                c.pos += 1;
                if p != 2 {
                    return c.err("oddity on an odd prime");
                }
                let o = c.number()?.to_u8().unwrap_or(8);
                if o >= 8 {
                    return c.err("oddity must be below 8");
                }
                (true, o)
            } else {
                (false, 0)
            };
            raw.push((p, Constituent { scale, dim, det, odd, oddity }));
        }
    }
    c.skip_spaces();
    if c.pos != c.text.len() {
        return c.err("trailing characters");
    }
    let mut primes: Vec<u64> = raw.iter().map(|(p, _)| *p).collect();
    primes.push(2);
    primes.sort();
    primes.dedup();
    let mut det = if signature.1 % 2 == 1 { -BigInt::one() } else { BigInt::one() };
    for (p, k) in &raw {
        det *= BigInt::from(*p).pow(k.scale * k.dim as u32);
    }
    let mut locals = Vec::new();
    for p in primes {
        let mut cons: Vec<Constituent> = raw.iter().filter(|(q, _)| *q == p).map(|(_, k)| k.clone()).collect();
        let used: usize = cons.iter().map(|k| k.dim).sum();
        if used > rank {
            return Err(Error::Parse { pos: text.len(), msg: format!("dimensions at {p} exceed the rank") });
        }
        let pb = BigInt::from(p);
        let mut unit = det.clone();
        while (&unit % &pb).is_zero() {
            unit /= &pb;
        }
        let expected = arith::kronecker_prime(&unit, p) as i8;
        let have: i8 = cons.iter().map(|k| k.det).product();
        let has_unimodular = cons.iter().any(|k| k.scale == 0);
        if rank > used && !has_unimodular {
            cons.push(Constituent { scale: 0, dim: rank - used, det: expected * have, odd: false, oddity: 0 });
        } else if expected != have {
            return Err(Error::Parse { pos: text.len(), msg: format!("signs at {p} contradict the determinant") });
        }
        cons.sort_by_key(|k| k.scale);
        let constituents = if p == 2 { canonical_2adic(&cons) } else { cons };
        locals.push(LocalSymbol { prime: p, constituents });
    }
    Ok(GenusSymbol { signature, locals })
}
