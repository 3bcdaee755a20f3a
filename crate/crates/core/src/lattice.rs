//! Integral lattices given by Gram matrices, and the constructions that build them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, IntMatrix, RatMatrix};
use crate::error::{domain, Error, Result};
use crate::lie::LieType;

/// A finite-rank integral lattice, identified up to isometry by its Gram matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntLattice {
    gram: IntMatrix,
    pub label: Option<String>,
}

impl fmt::Debug for IntLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntLattice({:?}, rank {})", self.label, self.rank())
    }
}

impl IntLattice {
    pub fn new(gram: IntMatrix, label: Option<String>) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return domain("Gram matrix is not square");
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return domain(format!("Gram matrix is not symmetric at ({i},{j})"));
                }
            }
        }
        Ok(IntLattice { gram, label })
    }

    pub fn from_i64(gram: &[Vec<i64>], label: &str) -> Result<Self> {
        Self::new(arith::to_int_matrix(gram), Some(label.to_string()))
    }

    pub fn empty() -> Self {
        IntLattice { gram: Vec::new(), label: Some("0".into()) }
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn det(&self) -> BigInt {
        arith::det_int(&self.gram)
    }

    pub fn is_even(&self) -> bool {
        self.gram.iter().enumerate().all(|(i, r)| r[i].is_even())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label_or(&self, default: &str) -> String {
        self.label.clone().unwrap_or_else(|| default.to_string())
    }

    /// Gram matrix as machine integers, for the enumeration-heavy algorithms.
    pub fn small_gram(&self) -> Result<Vec<Vec<i64>>> {
        arith::to_i64_matrix(&self.gram).ok_or_else(|| Error::Overflow("Gram entry exceeds i64".into()))
    }

    /// `(n₊, n₋, radical dimension)` by symmetric elimination over ℚ.
    pub fn signature(&self) -> (usize, usize, usize) {
        signature_rat(&arith::to_rat_matrix(&self.gram))
    }

    pub fn is_positive_definite(&self) -> bool {
        let (p, _, z) = self.signature();
        p == self.rank() && z == 0
    }

    pub fn require_positive_definite(&self) -> Result<()> {
        let (p, m, z) = self.signature();
        if z > 0 {
            return Err(Error::Degenerate { radical_dim: z });
        }
        if m > 0 || p != self.rank() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(())
    }

    pub fn require_nondegenerate(&self) -> Result<()> {
        let (_, _, z) = self.signature();
        if z > 0 {
            return Err(Error::Degenerate { radical_dim: z });
        }
        Ok(())
    }

    /// Inner product of two coordinate vectors.
    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let mut s = BigInt::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                s += xi * &self.gram[i][j] * yj;
            }
        }
        s
    }

    /// Gram of the sublattice (or basis change) whose basis vectors are the columns of `b`.
    pub fn transform(&self, b: &IntMatrix) -> IntLattice {
        IntLattice { gram: arith::congruence_int(&self.gram, b), label: self.label.clone() }
    }

    pub fn to_json(&self) -> String {
        let label = serde_json::to_string(&self.label_or("")).expect("string serializes");
        let rows: Vec<String> = self
            .gram
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        format!("{{\"label\": {}, \"gram\": [{}]}}", label, rows.join(","))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse { pos: e.column(), msg: e.to_string() })?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self> {
        let label = v.get("label").and_then(|l| l.as_str()).map(str::to_string);
        let rows = v
            .get("gram")
            .and_then(|g| g.as_array())
            .ok_or_else(|| Error::Parse { pos: 0, msg: "missing \"gram\" array".into() })?;
        let mut gram = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse { pos: 0, msg: "Gram row is not an array".into() })?;
            let mut out = Vec::with_capacity(row.len());
            for x in row {
                let s = match x {
                    serde_json::Value::Number(n) => n.to_string(),
                    _ => return Err(Error::Parse { pos: 0, msg: format!("non-integer entry {x}") }),
                };
                let parsed: BigInt = s
                    .parse()
                    .map_err(|_| Error::Parse { pos: 0, msg: format!("non-integer entry {s}") })?;
                out.push(parsed);
            }
            gram.push(out);
        }
        IntLattice::new(gram, label)
    }
}

/// Signature of a symmetric rational matrix: `(n₊, n₋, radical dimension)`.
pub fn signature_rat(g: &RatMatrix) -> (usize, usize, usize) {
    let mut a = g.clone();
    let mut n = a.len();
    let (mut pos, mut neg) = (0, 0);
    while n > 0 {
        // bring a nonzero diagonal entry to position 0 of the active block
        let piv = (0..n).find(|&i| !a[i][i].is_zero());
        let piv = match piv {
            Some(i) => i,
            None => {
                let Some((i, j)) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero())
                else {
                    break;
                };
                // e_i ← e_i + e_j makes the diagonal 2·a_ij ≠ 0
                for k in 0..n {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for k in 0..n {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                i
            }
        };
        a.swap(0, piv);
        for r in a.iter_mut() {
            r.swap(0, piv);
        }
        let d = a[0][0].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        let mut next: RatMatrix = vec![vec![BigRational::zero(); n - 1]; n - 1];
        for i in 1..n {
            for j in 1..n {
                next[i - 1][j - 1] = &a[i][j] - &a[i][0] * &a[0][j] / &d;
            }
        }
        a = next;
        n -= 1;
    }
    let zero = g.len() - pos - neg;
    (pos, neg, zero)
}

/// Scales the form by `k`, i.e. realizes `√k·L`.
pub fn rescale(l: &IntLattice, k: u64) -> IntLattice {
    let kb = BigInt::from(k);
    let gram = l.gram.iter().map(|r| r.iter().map(|x| x * &kb).collect()).collect();
    let label = match (&l.label, k) {
        (Some(s), 1) => s.clone(),
        (Some(s), _) => format!("sqrt{k}({s})"),
        (None, _) => format!("sqrt{k}(L)"),
    };
    IntLattice { gram, label: Some(label) }
}

/// Orthogonal direct sum.
pub fn direct_sum(a: &IntLattice, b: &IntLattice) -> IntLattice {
    let (n, m) = (a.rank(), b.rank());
    let mut gram = vec![vec![BigInt::zero(); n + m]; n + m];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = a.gram[i][j].clone();
        }
    }
    for i in 0..m {
        for j in 0..m {
            gram[n + i][n + j] = b.gram[i][j].clone();
        }
    }
    let label = if n == 0 {
        b.label.clone()
    } else if m == 0 {
        a.label.clone()
    } else {
        match (&a.label, &b.label) {
            (Some(x), Some(y)) => Some(format!("{x}+{y}")),
            _ => None,
        }
    };
    IntLattice { gram, label }
}

pub fn direct_sum_all<'a>(parts: impl IntoIterator<Item = &'a IntLattice>) -> IntLattice {
    parts.into_iter().fold(IntLattice::empty(), |acc, l| direct_sum(&acc, l))
}

/// The even unimodular plane of signature (1,1).
pub fn hyperbolic_plane() -> IntLattice {
    IntLattice::from_i64(&[vec![0, -1], vec![-1, 0]], "II1,1").expect("symmetric")
}

/// Root lattice of a simply-laced type (`A_n`, `D_n`, `E_6..8`).
pub fn root_lattice(t: LieType, n: usize) -> Result<IntLattice> {
    match t {
        LieType::A | LieType::D | LieType::E => {
            let c = crate::lie::cartan_matrix(t, n)?;
            let gram: Vec<Vec<i64>> = c.iter().map(|r| r.to_vec()).collect();
            IntLattice::from_i64(&gram, &format!("{t}{n}"))
        }
        _ => domain(format!("{t}{n} is not simply laced")),
    }
}

pub fn e8() -> IntLattice {
    root_lattice(LieType::E, 8).expect("E8 is valid")
}

/// `D_n⁺`: the lattice `D_n ∪ (D_n + (½,…,½))`, even unimodular for `n ≡ 0 (mod 8)`.
pub fn d_plus(n: usize) -> Result<IntLattice> {
    if n == 0 || n % 8 != 0 {
        return domain(format!("D{n}+ needs n divisible by 8"));
    }
    let ambient: RatMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    let unit = |i: usize, s: i64| -> Vec<BigRational> {
        (0..n).map(|k| if k == i { arith::rat(s, 1) } else { BigRational::zero() }).collect()
    };
    let mut gens = Vec::new();
    for i in 0..n - 1 {
        let mut v = unit(i, 1);
        v[i + 1] = arith::rat(-1, 1);
        gens.push(v);
    }
    let mut last = unit(n - 2, 1);
    last[n - 1] = arith::rat(1, 1);
    gens.push(last);
    gens.push(vec![arith::rat(1, 2); n]);
    let span = RationalSpan::new(ambient, gens)?;
    Ok(lattice_from_generators(&span)?.into_lattice()?.with_label(format!("D{n}+")))
}

/// Exact rational generators inside an ambient quadratic space.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSpan {
    pub ambient_gram: RatMatrix,
    pub generators: Vec<Vec<BigRational>>,
}

impl RationalSpan {
    pub fn new(ambient_gram: RatMatrix, generators: Vec<Vec<BigRational>>) -> Result<Self> {
        let m = ambient_gram.len();
        for i in 0..m {
            if ambient_gram[i].len() != m {
                return domain("ambient Gram is not square");
            }
            for j in 0..i {
                if ambient_gram[i][j] != ambient_gram[j][i] {
                    return domain("ambient Gram is not symmetric");
                }
            }
        }
        if let Some(g) = generators.iter().find(|g| g.len() != m) {
            return domain(format!("generator of length {} in ambient dimension {m}", g.len()));
        }
        Ok(RationalSpan { ambient_gram, generators })
    }

    /// Integer coordinate vectors inside the lattice with Gram `gram`.
    pub fn from_lattice_vectors(gram: &IntMatrix, vectors: &[Vec<BigInt>]) -> Result<Self> {
        let conv = |v: &Vec<BigInt>| v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        Self::new(arith::to_rat_matrix(gram), vectors.iter().map(conv).collect())
    }

    pub fn pair(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    s += xi * &self.ambient_gram[i][j] * yj;
                }
            }
        }
        s
    }

    /// ℤ-basis of the generated module (ambient coordinates), by HNF on cleared denominators.
    pub fn module_basis(&self) -> Vec<Vec<BigRational>> {
        let den = arith::common_denominator(self.generators.iter().flatten());
        let rows: IntMatrix = self
            .generators
            .iter()
            .map(|g| g.iter().map(|x| (x * &den).to_integer()).collect())
            .collect();
        arith::hnf_rows(rows)
            .into_iter()
            .map(|r| r.into_iter().map(|x| BigRational::new(x, den.clone())).collect())
            .collect()
    }
}

/// A lattice produced from generators: its basis in ambient coordinates and rational Gram.
#[derive(Clone, Debug)]
pub struct SpanLattice {
    pub basis: Vec<Vec<BigRational>>,
    pub gram: RatMatrix,
    pub integral: bool,
}

impl SpanLattice {
    pub fn into_lattice(self) -> Result<IntLattice> {
        let n = self.gram.len();
        for i in 0..n {
            for j in 0..=i {
                if !self.gram[i][j].is_integer() {
                    return Err(Error::NonIntegral(j, i));
                }
            }
        }
        let gram = self.gram.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
        IntLattice::new(gram, None)
    }
}

/// Basis and Gram matrix of the ℤ-module generated by `span`. Fails on a degenerate span.
pub fn lattice_from_generators(span: &RationalSpan) -> Result<SpanLattice> {
    let basis = span.module_basis();
    let gram: RatMatrix = basis
        .iter()
        .map(|x| basis.iter().map(|y| span.pair(x, y)).collect())
        .collect();
    let (_, _, radical) = signature_rat(&gram);
    if radical > 0 {
        return Err(Error::Degenerate { radical_dim: radical });
    }
    let integral = gram.iter().flatten().all(|x| x.is_integer());
    Ok(SpanLattice { basis, gram, integral })
}

/// Structure of `L^∨/L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantGroup {
    /// Invariant factors greater than one, each dividing the next.
    pub elementary_divisors: Vec<BigInt>,
    pub order: BigInt,
}

pub fn dual_and_discriminant(l: &IntLattice) -> Result<DiscriminantGroup> {
    l.require_nondegenerate()?;
    let mut elementary_divisors: Vec<BigInt> =
        arith::smith_diagonal(&l.gram).into_iter().filter(|d| !d.is_one()).collect();
    elementary_divisors.sort();
    let order = l.det().abs();
    Ok(DiscriminantGroup { elementary_divisors, order })
}

/// Resolves the lattice shorthands used on the command line, e.g. `E8`, `sqrt2E8+D8`,
/// `II1,1`, `D16+`, `A1^3`.
pub fn named_lattice(name: &str) -> Result<IntLattice> {
    let mut parts = Vec::new();
    for term in name.split('+').filter(|t| !t.is_empty()) {
        parts.push(named_term(term)?);
    }
    // "D16+" splits into "D16" and a trailing empty term
    if name.ends_with('+') {
        let last = parts.pop().ok_or_else(|| Error::Parse { pos: 0, msg: "empty name".into() })?;
        let n = last.rank();
        if last.label.as_deref() != Some(&format!("D{n}")) {
            return Err(Error::Parse { pos: name.len() - 1, msg: "'+' glue only applies to D_n".into() });
        }
        parts.push(d_plus(n)?);
    }
    if parts.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty lattice name".into() });
    }
    Ok(direct_sum_all(&parts).with_label(name))
}

fn named_term(term: &str) -> Result<IntLattice> {
    let (term, power) = match term.split_once('^') {
        Some((t, p)) => (t, p.parse::<usize>().map_err(|_| Error::Parse { pos: 0, msg: format!("bad power in {term}") })?),
        None => (term, 1),
    };
    let (scale, body) = match term.strip_prefix("sqrt") {
        Some(rest) => {
            let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
            let k = digits.parse::<u64>().map_err(|_| Error::Parse { pos: 4, msg: format!("bad scale in {term}") })?;
            (k, &rest[digits.len()..])
        }
        None => (1, term),
    };
    let base = if body == "II1,1" {
        hyperbolic_plane()
    } else if body == "Z" {
        IntLattice::from_i64(&[vec![1]], "Z")?
    } else {
        let mut chars = body.chars();
        let letter = chars.next().ok_or_else(|| Error::Parse { pos: 0, msg: "empty term".into() })?;
        let t = LieType::from_letter(letter)
            .ok_or_else(|| Error::Parse { pos: 0, msg: format!("unknown lattice {body}") })?;
        let n: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Parse { pos: 1, msg: format!("bad rank in {body}") })?;
        root_lattice(t, n)?
    };
    let one = rescale(&base, scale);
    let copies = vec![one; power];
    let mut out = direct_sum_all(&copies);
    out.label = Some(format!("{}{}", if scale > 1 { format!("sqrt{scale}") } else { String::new() }, body));
    Ok(out)
}

/// Exact norm of an integer coordinate vector (machine-size helper).
pub fn norm_i64(gram: &[Vec<i64>], v: &[i64]) -> i64 {
    let mut s = 0i64;
    for i in 0..v.len() {
        if v[i] == 0 {
            continue;
        }
        let mut t = 0i64;
        for j in 0..v.len() {
            t += gram[i][j] * v[j];
        }
        s += v[i] * t;
    }
    s
}

pub fn det_to_u64(d: &BigInt) -> Option<u64> {
    d.abs().to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn rescale_and_sum() {
        let e8 = e8();
        assert_eq!(rescale(&e8, 1).gram(), e8.gram());
        let s = rescale(&e8, 2);
        assert!(s.gram().iter().enumerate().all(|(i, r)| r[i] == int(4)));
        let one = IntLattice::from_i64(&[vec![2]], "A1").unwrap();
        assert_eq!(rescale(&one, 3).gram()[0][0], int(6));
        let sum = direct_sum(&s, &root_lattice(LieType::D, 8).unwrap());
        assert_eq!(sum.rank(), 16);
        assert_eq!(sum.det(), int(1024));
        assert_eq!(direct_sum(&e8, &IntLattice::empty()).gram(), e8.gram());
    }

    #[test]
    fn hyperbolic_plane_basics() {
        let h = hyperbolic_plane();
        assert_eq!(h.det(), int(-1));
        assert!(h.is_even());
        assert_eq!(h.signature(), (1, 1, 0));
        let h2 = direct_sum(&h, &h);
        assert_eq!(h2.signature(), (2, 2, 0));
        assert_eq!(IntLattice::empty().det(), int(1));
        assert!(IntLattice::empty().is_even());
    }

    #[test]
    fn d_plus_constructions() {
        let d16 = d_plus(16).unwrap();
        assert_eq!(d16.rank(), 16);
        assert_eq!(d16.det(), int(1));
        assert!(d16.is_even());
        assert!(d_plus(12).is_err());
        assert_eq!(d_plus(8).unwrap().det(), int(1));
    }

    #[test]
    fn gcd_lattice_from_generators() {
        let span = RationalSpan::new(vec![vec![rat(1, 1)]], vec![vec![rat(2, 1)], vec![rat(3, 1)]]).unwrap();
        let l = lattice_from_generators(&span).unwrap().into_lattice().unwrap();
        assert_eq!(l.gram(), &vec![vec![int(1)]]);
    }

    #[test]
    fn degenerate_span_reports_radical() {
        let amb = vec![vec![rat(2, 1), rat(0, 1)], vec![rat(0, 1), rat(0, 1)]];
        let span = RationalSpan::new(amb, vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]).unwrap();
        assert_eq!(lattice_from_generators(&span).unwrap_err(), Error::Degenerate { radical_dim: 1 });
    }

    #[test]
    fn non_integral_is_flagged() {
        let span = RationalSpan::new(vec![vec![rat(1, 1)]], vec![vec![rat(1, 2)]]).unwrap();
        let s = lattice_from_generators(&span).unwrap();
        assert!(!s.integral);
        assert!(s.into_lattice().is_err());
    }

    #[test]
    fn discriminants() {
        assert_eq!(dual_and_discriminant(&e8()).unwrap().order, int(1));
        let d = dual_and_discriminant(&rescale(&e8(), 2)).unwrap();
        assert_eq!(d.elementary_divisors, vec![int(2); 8]);
        assert_eq!(d.order, int(256));
        let a1 = IntLattice::from_i64(&[vec![2]], "A1").unwrap();
        assert_eq!(dual_and_discriminant(&a1).unwrap().elementary_divisors, vec![int(2)]);
        let deg = IntLattice::from_i64(&[vec![0]], "0").unwrap();
        assert!(dual_and_discriminant(&deg).is_err());
    }

    #[test]
    fn json_round_trip_and_rejects_floats() {
        let l = named_lattice("sqrt2E8+D8").unwrap();
        let back = IntLattice::from_json(&l.to_json()).unwrap();
        assert_eq!(back, l);
        assert!(IntLattice::from_json(r#"{"label":"x","gram":[[2.5]]}"#).is_err());
        assert!(IntLattice::from_json(r#"{"label":"x","gram":[[2,1],[0,2]]}"#).is_err());
    }

    #[test]
    fn shorthands() {
        assert_eq!(named_lattice("E8").unwrap().det(), int(1));
        assert_eq!(named_lattice("sqrt2E8+D8").unwrap().det(), int(1024));
        assert_eq!(named_lattice("II1,1").unwrap().det(), int(-1));
        assert_eq!(named_lattice("D16+").unwrap().det(), int(1));
        assert_eq!(named_lattice("E8+E8").unwrap().rank(), 16);
        assert_eq!(named_lattice("A1^3").unwrap().det(), int(8));
        assert!(named_lattice("Q7").is_err());
    }
}
