//! Maximal lattices of extensions of affine vertex algebras, the mass of VH pairs, and the
//! table of Lie algebras of c = 24 holomorphic vertex operator algebras.
//!
//! Weights live in simple-root coordinates; component `i` carries the form `kᵢ·(,)ᵢ`, so the
//! floor `⊕√kᵢ Q_{gᵢ}` and the coset vectors `√kᵢ λᵢ` all have rational coordinates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Deserialize;

use crate::arith::{rat, RatMatrix};
use crate::error::{domain, Error, Result};
use crate::genus::genus_symbol;
use crate::genus_enum::GenusEnumeration;
use crate::lattice::{direct_sum_all, lattice_from_generators, rescale, IntLattice, RationalSpan};
use crate::lie::{self, LieType};
use crate::mass::{sms_mass, MassValue};
use crate::shortvec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffineComponent {
    pub lie_type: LieType,
    pub rank: usize,
    pub level: u64,
}

impl std::fmt::Display for AffineComponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}_{{{},{}}}", self.lie_type, self.rank, self.level)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineVoaSpec {
    pub components: Vec<AffineComponent>,
    /// One cominimal fundamental-weight index (0 for the zero weight) per component.
    pub cosets: Vec<Vec<usize>>,
    /// `[Aut L̃ : G]`, when known.
    pub index: Option<u64>,
}

#[derive(Deserialize)]
struct RawComponent {
    #[serde(rename = "type")]
    lie_type: String,
    rank: usize,
    level: u64,
}

#[derive(Deserialize)]
struct RawSpec {
    components: Vec<RawComponent>,
    #[serde(default)]
    cosets: Vec<Vec<usize>>,
    index: Option<u64>,
}

impl AffineVoaSpec {
    pub fn new(components: Vec<AffineComponent>, cosets: Vec<Vec<usize>>) -> Result<Self> {
        let spec = AffineVoaSpec { components, cosets, index: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse { pos: e.column(), msg: e.to_string() })?;
        let mut components = Vec::new();
        for c in raw.components {
            let mut chars = c.lie_type.chars();
            let t = match (chars.next().and_then(LieType::from_letter), chars.next()) {
                (Some(t), None) => t,
                _ => return domain(format!("unknown Lie type {:?}", c.lie_type)),
            };
            components.push(AffineComponent { lie_type: t, rank: c.rank, level: c.level });
        }
        let spec = AffineVoaSpec { components, cosets: raw.cosets, index: raw.index };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        for c in &self.components {
            lie::validate(c.lie_type, c.rank)?;
            if c.level == 0 {
                return domain(format!("{c} has level 0"));
            }
        }
        for (ci, coset) in self.cosets.iter().enumerate() {
            if coset.len() != self.components.len() {
                return domain(format!("coset {ci} has {} entries for {} components", coset.len(), self.components.len()));
            }
            for (c, &j) in self.components.iter().zip(coset) {
                if !lie::cominimal_weights(c.lie_type, c.rank)?.contains(&j) {
                    return domain(format!("coset {ci}: weight {j} of {c} is not cominimal"));
                }
            }
            let half = self.coset_norm(coset)? / rat(2, 1);
            if !half.is_integer() {
                return domain(format!("coset {ci} is not isotropic: half its norm is {half}"));
            }
        }
        Ok(())
    }

    /// `Σ kᵢ(λᵢ,λᵢ)`.
    pub fn coset_norm(&self, coset: &[usize]) -> Result<BigRational> {
        let mut q = BigRational::zero();
        for (c, &j) in self.components.iter().zip(coset) {
            let w = lie::fundamental_weight(c.lie_type, c.rank, j)?;
            q += lie::weight_norm(c.lie_type, c.rank, &w)? * rat(c.level as i64, 1);
        }
        Ok(q)
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }
}

/// `⊕ᵢ √kᵢ Q_{gᵢ}`.
pub fn affine_floor(spec: &AffineVoaSpec) -> Result<IntLattice> {
    let parts = spec
        .components
        .iter()
        .map(|c| Ok(rescale(&lie::long_root_lattice(c.lie_type, c.rank)?, c.level)))
        .collect::<Result<Vec<_>>>()?;
    let label = spec.components.iter().map(|c| c.to_string()).collect::<String>();
    Ok(direct_sum_all(&parts).with_label(format!("floor({label})")))
}

fn ambient_form(spec: &AffineVoaSpec) -> Result<RatMatrix> {
    let m = spec.rank();
    let mut g = vec![vec![BigRational::zero(); m]; m];
    let mut off = 0;
    for c in &spec.components {
        let s = lie::simple_root_products(c.lie_type, c.rank)?;
        let k = rat(c.level as i64, 1);
        for i in 0..c.rank {
            for j in 0..c.rank {
                g[off + i][off + j] = &s[i][j] * &k;
            }
        }
        off += c.rank;
    }
    Ok(g)
}

/// Generators of `Q_V` in the ambient weight space: simple coroots, then the coset vectors.
pub fn maximal_lattice_span(spec: &AffineVoaSpec) -> Result<RationalSpan> {
    let m = spec.rank();
    let mut gens = Vec::new();
    let mut off = 0;
    for c in &spec.components {
        for row in lie::coroot_vectors(c.lie_type, c.rank)? {
            let mut v = vec![BigRational::zero(); m];
            v[off..off + c.rank].clone_from_slice(&row);
            gens.push(v);
        }
        off += c.rank;
    }
    for coset in &spec.cosets {
        let mut v = Vec::with_capacity(m);
        for (c, &j) in spec.components.iter().zip(coset) {
            v.extend(lie::fundamental_weight(c.lie_type, c.rank, j)?);
        }
        gens.push(v);
    }
    RationalSpan::new(ambient_form(spec)?, gens)
}

pub fn maximal_lattice(spec: &AffineVoaSpec) -> Result<IntLattice> {
    spec.validate()?;
    let span = maximal_lattice_span(spec)?;
    let g = &span.generators;
    for i in 0..g.len() {
        for j in 0..=i {
            let p = span.pair(&g[i], &g[j]);
            if !p.is_integer() {
                return Err(Error::NonIntegral(j, i));
            }
            if i == j && p.to_integer().is_odd() {
                return Err(Error::NotEven(i));
            }
        }
    }
    let l = lattice_from_generators(&span)?.into_lattice()?;
    let (red, _) = shortvec::lll_reduce(&l.small_gram()?);
    IntLattice::from_i64(&red, "Q_V")
}

/// `mass(L_V)·[Aut L̃_V : G_V]`.
pub fn vh_mass(l: &IntLattice, index: u64) -> Result<MassValue> {
    if index == 0 {
        return domain("index must be positive");
    }
    l.require_positive_definite()?;
    Ok(sms_mass(&genus_symbol(l)?)?.scale(index))
}

/// Index `[Aut L̃ : G]` for the cases where it is known.
pub fn known_index(components: &[AffineComponent]) -> Option<u64> {
    let e8b8 = [
        AffineComponent { lie_type: LieType::E, rank: 8, level: 2 },
        AffineComponent { lie_type: LieType::B, rank: 8, level: 1 },
    ];
    (components == e8b8).then_some(1)
}

/// At index 1 every class `L₀` contributes `1/|Aut L₀|` on both sides, so the identity holds
/// exactly when the enumeration is complete and its class masses add up to the genus mass.
pub fn mass_fix_check(e: &GenusEnumeration, index: u64) -> Result<bool> {
    if index != 1 {
        return Err(Error::Unsupported(format!("mass_fix_check at index {index}")));
    }
    let mut total = BigRational::zero();
    for c in &e.classes {
        if c.aut_order <= BigInt::zero() {
            return Ok(false);
        }
        total += BigRational::new(1.into(), c.aut_order.clone());
    }
    Ok(e.complete && total == e.accumulated_mass.value && total == e.target_mass.value)
}

/// Number of norm-2 vectors of `Q_V` and number of long roots of level-1 components.
pub fn norm2_longroot_counts(spec: &AffineVoaSpec) -> Result<(usize, usize)> {
    let l = maximal_lattice(spec)?;
    let norm2 = shortvec::vectors_of_norm(&l, 2)?.len();
    let mut roots = 0;
    for c in spec.components.iter().filter(|c| c.level == 1) {
        roots += lie::long_root_count_formula(c.lie_type, c.rank)?;
    }
    Ok((norm2, roots))
}

pub fn norm2_longroot_check(spec: &AffineVoaSpec) -> Result<bool> {
    let (a, b) = norm2_longroot_counts(spec)?;
    Ok(a == b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HolTableEntry {
    pub lie_symbol: String,
    pub rank: usize,
    pub components: Vec<AffineComponent>,
}

const HOL_TABLE: &str = include_str!("../data/hol_table.tsv");

pub fn load_hol_table() -> Result<Vec<HolTableEntry>> {
    parse_hol_table(HOL_TABLE)
}

/// Parses `<rank>\t<symbol>` lines; errors carry the 1-based line number.
pub fn parse_hol_table(text: &str) -> Result<Vec<HolTableEntry>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |msg: String| Error::Parse { pos: no + 1, msg: format!("line {}: {msg}", no + 1) };
        let (rank, symbol) = line.split_once('\t').ok_or_else(|| at("expected <rank>\\t<symbol>".into()))?;
        let rank: usize = rank.trim().parse().map_err(|_| at(format!("bad rank {rank:?}")))?;
        let components = parse_lie_symbol(symbol).map_err(|e| at(e.to_string()))?;
        out.push(HolTableEntry { lie_symbol: symbol.to_string(), rank, components });
    }
    Ok(out)
}

/// Parses products like `(A_{3,2})^4(A_{1,1})^4`, `A_{2,1}^{12}` or `E_{8,2}B_{8,1}`.
pub fn parse_lie_symbol(s: &str) -> Result<Vec<AffineComponent>> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let err = |pos: usize, msg: &str| Error::Parse { pos, msg: format!("{msg} in {s:?}") };
    let number = |i: &mut usize| -> Result<u64> {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        s[start..*i].parse().map_err(|_| err(start, "expected a number"))
    };
    while i < b.len() {
        let paren = b[i] == b'(';
        if paren {
            i += 1;
        }
        let t = b.get(i).and_then(|&c| LieType::from_letter(c as char)).ok_or_else(|| err(i, "expected a Lie type"))?;
        i += 1;
        if !s[i..].starts_with("_{") {
            return Err(err(i, "expected _{"));
        }
        i += 2;
        let rank = number(&mut i)? as usize;
        if b.get(i) != Some(&b',') {
            return Err(err(i, "expected ','"));
        }
        i += 1;
        let level = number(&mut i)?;
        if b.get(i) != Some(&b'}') {
            return Err(err(i, "expected '}'"));
        }
        i += 1;
        if paren {
            if b.get(i) != Some(&b')') {
                return Err(err(i, "expected ')'"));
            }
            i += 1;
        }
        let mut power = 1;
        if b.get(i) == Some(&b'^') {
            i += 1;
            if b.get(i) == Some(&b'{') {
                i += 1;
                power = number(&mut i)?;
                if b.get(i) != Some(&b'}') {
                    return Err(err(i, "expected '}'"));
                }
                i += 1;
            } else {
                power = number(&mut i)?;
            }
        }
        lie::validate(t, rank).map_err(|e| err(i, &e.to_string()))?;
        for _ in 0..power {
            out.push(AffineComponent { lie_type: t, rank, level });
        }
    }
    if out.is_empty() {
        return Err(err(0, "empty symbol"));
    }
    Ok(out)
}

pub fn floor_of_entry(e: &HolTableEntry) -> Result<IntLattice> {
    affine_floor(&AffineVoaSpec { components: e.components.clone(), cosets: Vec::new(), index: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isom::is_isometric;
    use crate::lattice::{named_lattice, root_lattice};

    fn comp(t: LieType, rank: usize, level: u64) -> AffineComponent {
        AffineComponent { lie_type: t, rank, level }
    }

    #[test]
    fn floors() {
        let b12 = AffineVoaSpec::new(vec![comp(LieType::B, 12, 2)], vec![]).unwrap();
        let f = affine_floor(&b12).unwrap();
        assert!(is_isometric(&f, &named_lattice("sqrt2D12").unwrap()).unwrap().matrix.is_some());
        let a1 = AffineVoaSpec::new(vec![comp(LieType::A, 1, 1)], vec![]).unwrap();
        assert_eq!(affine_floor(&a1).unwrap().gram(), root_lattice(LieType::A, 1).unwrap().gram());
        let e8b8 = AffineVoaSpec::new(vec![comp(LieType::E, 8, 2), comp(LieType::B, 8, 1)], vec![]).unwrap();
        let f = affine_floor(&e8b8).unwrap();
        assert_eq!(genus_symbol(&f).unwrap().to_string(), "II_{16,0}(2^+10)");
    }

    #[test]
    fn empty_cosets_give_the_floor() {
        let s = AffineVoaSpec::new(vec![comp(LieType::B, 12, 2)], vec![]).unwrap();
        let m = maximal_lattice(&s).unwrap();
        assert!(is_isometric(&m, &affine_floor(&s).unwrap()).unwrap().matrix.is_some());
    }

    #[test]
    fn simple_current_of_b12() {
        // Λ₁ of B₁₂ has norm 1; at level 2 the coset is isotropic and adds √2·e₁ to √2D₁₂
        let s = AffineVoaSpec::new(vec![comp(LieType::B, 12, 2)], vec![vec![1]]).unwrap();
        let m = maximal_lattice(&s).unwrap();
        assert_eq!(m.det(), BigInt::from(4096));
        assert!(is_isometric(&m, &named_lattice("sqrt2Z^12").unwrap()).unwrap().matrix.is_some());
    }

    #[test]
    fn non_isotropic_cosets_are_rejected() {
        let c = vec![comp(LieType::A, 1, 1); 2];
        assert!(AffineVoaSpec::new(c.clone(), vec![vec![1, 0]]).is_err());
        // two level-1 A₁ currents: ½(½ + ½) = ½
        assert!(AffineVoaSpec::new(c, vec![vec![1, 1]]).is_err());
        let four = vec![comp(LieType::A, 1, 1); 4];
        let s = AffineVoaSpec::new(four, vec![vec![1, 1, 1, 1]]).unwrap();
        let m = maximal_lattice(&s).unwrap();
        assert!(is_isometric(&m, &named_lattice("D4").unwrap()).unwrap().matrix.is_some());
    }

    #[test]
    fn spec_json() {
        let s = AffineVoaSpec::from_json(
            r#"{"components": [{"type":"E","rank":8,"level":2},{"type":"B","rank":8,"level":1}], "cosets": [], "index": 1}"#,
        )
        .unwrap();
        assert_eq!(s.index, Some(1));
        assert_eq!(known_index(&s.components), Some(1));
        assert!(AffineVoaSpec::from_json(r#"{"components": [{"type":"Q","rank":8,"level":2}]}"#).is_err());
    }

    #[test]
    fn long_roots_at_level_one() {
        let s = AffineVoaSpec::new(vec![comp(LieType::E, 8, 2), comp(LieType::B, 8, 1)], vec![]).unwrap();
        assert_eq!(norm2_longroot_counts(&s).unwrap(), (112, 112));
        let s = AffineVoaSpec::new(vec![comp(LieType::B, 12, 2)], vec![]).unwrap();
        assert_eq!(norm2_longroot_counts(&s).unwrap(), (0, 0));
        let s = AffineVoaSpec::new(vec![comp(LieType::A, 1, 1)], vec![]).unwrap();
        assert!(norm2_longroot_check(&s).unwrap());
    }

    #[test]
    fn vh_mass_scales_with_index() {
        let e8 = crate::lattice::e8();
        assert_eq!(vh_mass(&e8, 1).unwrap().to_string(), "1/696729600");
        assert_eq!(vh_mass(&e8, 2).unwrap().to_string(), "1/348364800");
    }

    #[test]
    fn symbols() {
        let c = parse_lie_symbol("(A_{3,2})^4(A_{1,1})^4").unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(parse_lie_symbol("A_{2,1}^{12}").unwrap().len(), 12);
        assert_eq!(parse_lie_symbol("E_{8,2}B_{8,1}").unwrap(), vec![comp(LieType::E, 8, 2), comp(LieType::B, 8, 1)]);
        assert!(parse_lie_symbol("(B_{6,2})^2,B_{4,2})^3").is_err());
        let e = parse_hol_table("16\tE_{8,2}B_{8,1}\n12 B_{12,2}\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn bundled_table() {
        let t = load_hol_table().unwrap();
        assert_eq!(t.len(), 69);
        for e in &t {
            assert_eq!(e.components.iter().map(|c| c.rank).sum::<usize>(), e.rank, "{}", e.lie_symbol);
        }
        let e3 = t.iter().find(|e| e.lie_symbol == "(E_{8,1})^3").unwrap();
        assert_eq!(e3.rank, 24);
        let e8b8 = t.iter().find(|e| e.lie_symbol == "E_{8,2}B_{8,1}").unwrap();
        assert_eq!(genus_symbol(&floor_of_entry(e8b8).unwrap()).unwrap().to_string(), "II_{16,0}(2^+10)");
    }
}
