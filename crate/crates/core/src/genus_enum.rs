//! Classes of a positive-definite genus, by Kneser neighbour closure until the classes found
//! account for the whole mass.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::arith;
use crate::error::{Error, Result};
use crate::genus::genus_symbol;
use crate::isom::{aut_order, is_isometric};
use crate::lattice::IntLattice;
use crate::mass::{sms_mass, MassValue};
use crate::neighbor::{neighbor_along, OrbitLines};
use crate::shortvec;

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct EnumOptions {
    /// Neighbour prime; defaults to the smallest prime not dividing `2·det`.
    pub prime: Option<u64>,
    /// Maximum number of neighbours constructed.
    pub budget: u64,
    /// Further primes tried when the neighbour graph at the first one is exhausted.
    pub fallback_primes: usize,
    /// Progress lines on stderr.
    pub verbose: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { prime: None, budget: DEFAULT_BUDGET, fallback_primes: 2, verbose: false }
    }
}

#[derive(Clone, Debug)]
pub struct GenusClass {
    pub lattice: IntLattice,
    pub aut_order: BigInt,
}

#[derive(Clone, Debug)]
pub struct GenusEnumeration {
    pub classes: Vec<GenusClass>,
    pub accumulated_mass: MassValue,
    pub target_mass: MassValue,
    pub complete: bool,
    pub neighbors_evaluated: u64,
}

struct Record {
    lattice: IntLattice,
    aut: BigInt,
    generators: Vec<Vec<Vec<i64>>>,
    key: (u64, u64),
}

fn key_of(l: &IntLattice) -> Result<(u64, u64)> {
    let c = shortvec::norm_counts(&l.small_gram()?, 4);
    Ok((c[2], c[4]))
}

fn record(l: IntLattice, key: (u64, u64)) -> Result<Record> {
    let a = aut_order(&l)?;
    Ok(Record { lattice: l, aut: a.order, generators: a.generators, key })
}

/// Smallest prime not dividing `2·det` and greater than `after`.
pub fn neighbor_prime(det: &BigInt, after: u64) -> u64 {
    let mut p = after.max(2) + 1;
    loop {
        if arith::is_prime(p) && !(det % BigInt::from(p) == BigInt::from(0)) {
            return p;
        }
        p += 1;
    }
}

pub fn enumerate_genus(l: &IntLattice) -> Result<GenusEnumeration> {
    enumerate_genus_with(l, &EnumOptions::default())
}

pub fn enumerate_genus_with(l: &IntLattice, opts: &EnumOptions) -> Result<GenusEnumeration> {
    l.require_positive_definite()?;
    if !l.is_even() {
        return Err(Error::Domain("genus enumeration needs an even lattice".into()));
    }
    if l.rank() < 3 {
        return Err(Error::Domain("genus enumeration needs rank at least 3".into()));
    }
    let target = sms_mass(&genus_symbol(l)?)?;
    let (red, _) = shortvec::lll_reduce(&l.small_gram()?);
    let start = IntLattice::from_i64(&red, &l.label_or("L"))?;
    let key = key_of(&start)?;
    let mut classes = vec![record(start, key)?];
    let mut acc = BigRational::new(BigInt::one(), classes[0].aut.clone());
    let mut evaluated = 0u64;
    let det = l.det();
    let mut p = opts.prime.unwrap_or_else(|| neighbor_prime(&det, 2));
    let mut primes_left = opts.fallback_primes;
    'primes: loop {
        let mut ci = 0;
        while ci < classes.len() && acc != target.value {
            let mut lines = OrbitLines::new(&classes[ci].lattice, p, &classes[ci].generators)?;
            loop {
                if acc == target.value {
                    break;
                }
                let batch: Vec<Vec<i64>> = lines.by_ref().take(rayon::current_num_threads().max(1) * 4).collect();
                if batch.is_empty() {
                    break;
                }
                let base = &classes[ci].lattice;
                let found: Vec<(IntLattice, (u64, u64))> = batch
                    .par_iter()
                    .map(|v| {
                        let nb = neighbor_along(base, v, p)?;
                        let k = key_of(&nb)?;
                        Ok((nb, k))
                    })
                    .collect::<Result<_>>()?;
                for (nb, k) in found {
                    // counted per neighbour so that the count does not depend on the batch size
                    if evaluated == opts.budget {
                        break 'primes;
                    }
                    evaluated += 1;
                    let mut known = false;
                    for c in classes.iter().filter(|c| c.key == k) {
                        if is_isometric(&c.lattice, &nb)?.matrix.is_some() {
                            known = true;
                            break;
                        }
                    }
                    if known {
                        continue;
                    }
                    let r = record(nb, k)?;
                    acc += BigRational::new(BigInt::one(), r.aut.clone());
                    if acc > target.value {
                        return Err(Error::Domain(format!(
                            "accumulated mass {acc} exceeds the genus mass {}",
                            target.value
                        )));
                    }
                    if opts.verbose {
                        eprintln!(
                            "class {} |Aut| = {} key {:?} after {evaluated} neighbours (from class {}, p = {p})",
                            classes.len() + 1,
                            r.aut,
                            r.key,
                            ci + 1
                        );
                    }
                    classes.push(r);
                    if acc == target.value {
                        break;
                    }
                }
            }
            if opts.verbose {
                eprintln!("class {} swept at p = {p}, {evaluated} neighbours so far", ci + 1);
            }
            ci += 1;
        }
        if acc == target.value || primes_left == 0 {
            break;
        }
        primes_left -= 1;
        p = neighbor_prime(&det, p);
    }
    let complete = acc == target.value;
    let mut out: Vec<GenusClass> =
        classes.into_iter().map(|r| GenusClass { lattice: r.lattice, aut_order: r.aut }).collect();
    out.sort_by(|a, b| b.aut_order.cmp(&a.aut_order).then_with(|| a.lattice.gram().cmp(b.lattice.gram())));
    let seed_label = l.label_or("L");
    for (i, c) in out.iter_mut().enumerate() {
        if c.lattice.label.as_deref() != Some(seed_label.as_str()) {
            c.lattice.label = Some(format!("class{}", i + 1));
        }
    }
    Ok(GenusEnumeration {
        classes: out,
        accumulated_mass: MassValue::new(acc),
        target_mass: target,
        complete,
        neighbors_evaluated: evaluated,
    })
}

/// Checks the enumeration's invariants: pairwise non-isometric, one genus, mass sum.
pub fn verify_enumeration(e: &GenusEnumeration) -> Result<bool> {
    let mut total = BigRational::from_integer(BigInt::from(0));
    for c in &e.classes {
        total += BigRational::new(BigInt::one(), c.aut_order.clone());
    }
    if total != e.accumulated_mass.value {
        return Ok(false);
    }
    let sym = match e.classes.first() {
        Some(c) => genus_symbol(&c.lattice)?,
        None => return Ok(false),
    };
    for (i, a) in e.classes.iter().enumerate() {
        if genus_symbol(&a.lattice)? != sym {
            return Ok(false);
        }
        for b in &e.classes[i + 1..] {
            if is_isometric(&a.lattice, &b.lattice)?.matrix.is_some() {
                return Ok(false);
            }
        }
    }
    Ok(e.complete == (e.accumulated_mass == e.target_mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{direct_sum, e8, rescale, root_lattice};
    use crate::lie::LieType;

    #[test]
    fn single_class() {
        let e = enumerate_genus(&e8()).unwrap();
        assert!(e.complete);
        assert_eq!(e.classes.len(), 1);
        assert_eq!(e.classes[0].aut_order, BigInt::from(696729600u64));
    }

    #[test]
    fn small_genera() {
        let l = direct_sum(&root_lattice(LieType::A, 2).unwrap(), &root_lattice(LieType::A, 2).unwrap());
        let e = enumerate_genus(&l).unwrap();
        assert!(e.complete);
        assert!(verify_enumeration(&e).unwrap());
        let m = rescale(&root_lattice(LieType::A, 3).unwrap(), 2);
        let e = enumerate_genus(&m).unwrap();
        assert!(e.complete);
        assert!(verify_enumeration(&e).unwrap());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let l = rescale(&root_lattice(LieType::D, 12).unwrap(), 2);
        let e = enumerate_genus_with(&l, &EnumOptions { budget: 0, ..Default::default() }).unwrap();
        assert!(!e.complete);
        assert_eq!(e.classes.len(), 1);
        assert!(e.accumulated_mass < e.target_mass);
    }

    #[test]
    fn sqrt2_d12_two_classes() {
        let l = rescale(&root_lattice(LieType::D, 12).unwrap(), 2);
        let e = enumerate_genus(&l).unwrap();
        assert!(e.complete);
        assert_eq!(e.classes.len(), 2);
        let other = rescale(&direct_sum(&e8(), &root_lattice(LieType::D, 4).unwrap()), 2);
        assert!(e.classes.iter().any(|c| is_isometric(&c.lattice, &other).unwrap().matrix.is_some()));
        assert!(verify_enumeration(&e).unwrap());
    }
}
