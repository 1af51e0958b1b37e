//! Canonical-form arithmetic for the supported group families.
//!
//! Every element carries a payload whose equality is group equality, so
//! elements can be hashed directly for ball enumeration.

pub mod grigorchuk;
pub mod madic;
mod steps;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use grigorchuk::GrigElement;
pub use madic::MAdic;
pub use steps::{Step, StepDistribution, CERTIFICATE_DEPTH};

/// A group family with its parameters, written as `z:2`, `free:2`, `heis`,
/// `lamplighter`, `bs:1:2` or `grigorchuk`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GroupFamily {
    Zd { d: usize },
    Free { k: usize },
    Heisenberg,
    Lamplighter,
    BaumslagSolitar { m: u32 },
    Grigorchuk,
}

impl GroupFamily {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidFamily(self.to_string(), msg.to_string()));
        match *self {
            GroupFamily::Zd { d: 0 } => bad("dimension must be at least 1"),
            GroupFamily::Zd { d } if d > 26 => bad("dimension must be at most 26"),
            GroupFamily::Free { k: 0 } => bad("rank must be at least 1"),
            GroupFamily::Free { k } if k > 26 => bad("rank must be at most 26"),
            GroupFamily::BaumslagSolitar { m } if m < 2 => bad("m must be at least 2"),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupFamily::Zd { d } => write!(f, "z:{d}"),
            GroupFamily::Free { k } => write!(f, "free:{k}"),
            GroupFamily::Heisenberg => write!(f, "heis"),
            GroupFamily::Lamplighter => write!(f, "lamplighter"),
            GroupFamily::BaumslagSolitar { m } => write!(f, "bs:1:{m}"),
            GroupFamily::Grigorchuk => write!(f, "grigorchuk"),
        }
    }
}

impl FromStr for GroupFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: &str| Error::InvalidFamily(s.to_string(), msg.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| p.parse::<i64>().map_err(|_| err("expected an integer parameter"));
        let family = match parts.as_slice() {
            ["z", d] => {
                let d = num(d)?;
                if d < 1 {
                    return Err(err("dimension must be at least 1"));
                }
                GroupFamily::Zd { d: d as usize }
            }
            ["free", k] => {
                let k = num(k)?;
                if k < 1 {
                    return Err(err("rank must be at least 1"));
                }
                GroupFamily::Free { k: k as usize }
            }
            ["heis"] => GroupFamily::Heisenberg,
            ["lamplighter"] => GroupFamily::Lamplighter,
            ["bs", n, m] => {
                if num(n)? != 1 {
                    return Err(err("only BS(1,m) is supported"));
                }
                let m = num(m)?;
                if !(2..=u32::MAX as i64).contains(&m) {
                    return Err(err("m must be at least 2"));
                }
                GroupFamily::BaumslagSolitar { m: m as u32 }
            }
            ["grigorchuk"] => GroupFamily::Grigorchuk,
            _ => return Err(err("unknown family")),
        };
        family.validate()?;
        Ok(family)
    }
}

impl TryFrom<String> for GroupFamily {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GroupFamily> for String {
    fn from(f: GroupFamily) -> String {
        f.to_string()
    }
}

/// A group element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    /// Integer vector.
    Zd(Vec<i64>),
    /// Freely reduced word; letter `2i` is generator `i`, `2i + 1` its inverse.
    Free(Vec<u8>),
    /// Upper unitriangular matrix `[[1, x, z], [0, 1, y], [0, 0, 1]]` as `[x, y, z]`.
    Heisenberg([i64; 3]),
    /// Finite set of lit lamps (sorted) and the lamplighter position.
    Lamplighter { lamps: Vec<i64>, pos: i64 },
    /// The affine map `x -> m^exp * x + shift`.
    Bs { m: u32, exp: i64, shift: MAdic },
    Grigorchuk(GrigElement),
}

impl GroupElement {
    fn kind(&self) -> String {
        match self {
            GroupElement::Zd(v) => format!("z:{}", v.len()),
            GroupElement::Free(_) => "free".into(),
            GroupElement::Heisenberg(_) => "heis".into(),
            GroupElement::Lamplighter { .. } => "lamplighter".into(),
            GroupElement::Bs { m, .. } => format!("bs:1:{m}"),
            GroupElement::Grigorchuk(_) => "grigorchuk".into(),
        }
    }

    fn mismatch(&self, other: &Self) -> Error {
        Error::FamilyMismatch(self.kind(), other.kind())
    }

    /// The product `self * other`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        use GroupElement::*;
        Ok(match (self, other) {
            (Zd(u), Zd(v)) if u.len() == v.len() => {
                Zd(u.iter().zip(v).map(|(a, b)| a + b).collect())
            }
            (Free(u), Free(v)) => {
                let mut w = u.clone();
                for &l in v {
                    if w.last() == Some(&(l ^ 1)) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                Free(w)
            }
            (Heisenberg([x, y, z]), Heisenberg([x2, y2, z2])) => {
                Heisenberg([x + x2, y + y2, z + z2 + x * y2])
            }
            (Lamplighter { lamps: f, pos: p }, Lamplighter { lamps: g, pos: q }) => {
                let shifted: Vec<i64> = g.iter().map(|i| i + p).collect();
                Lamplighter { lamps: symmetric_difference(f, &shifted), pos: p + q }
            }
            (Bs { m, exp: a, shift: b }, Bs { m: m2, exp: a2, shift: b2 }) if m == m2 => Bs {
                m: *m,
                exp: a + a2,
                shift: b.add(&b2.scale(*m, *a), *m),
            },
            (Grigorchuk(g), Grigorchuk(h)) => Grigorchuk(g.mul(h)),
            _ => return Err(self.mismatch(other)),
        })
    }

    pub fn inverse(&self) -> Self {
        use GroupElement::*;
        match self {
            Zd(v) => Zd(v.iter().map(|x| -x).collect()),
            Free(w) => Free(w.iter().rev().map(|l| l ^ 1).collect()),
            Heisenberg([x, y, z]) => Heisenberg([-x, -y, -z + x * y]),
            Lamplighter { lamps, pos } => Lamplighter {
                lamps: lamps.iter().map(|i| i - pos).collect(),
                pos: -pos,
            },
            Bs { m, exp, shift } => Bs { m: *m, exp: -exp, shift: shift.scale(*m, -exp).neg() },
            Grigorchuk(g) => Grigorchuk(g.inverse()),
        }
    }

    pub fn is_identity(&self) -> bool {
        use GroupElement::*;
        match self {
            Zd(v) => v.iter().all(|&x| x == 0),
            Free(w) => w.is_empty(),
            Heisenberg(c) => *c == [0, 0, 0],
            Lamplighter { lamps, pos } => lamps.is_empty() && *pos == 0,
            Bs { exp, shift, .. } => *exp == 0 && shift.is_zero(),
            Grigorchuk(g) => g.is_identity(),
        }
    }
}

fn symmetric_difference(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn free_letter(l: u8) -> char {
    let c = (b'a' + (l >> 1)) as char;
    if l & 1 == 1 {
        c.to_ascii_uppercase()
    } else {
        c
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GroupElement::*;
        match self {
            Zd(v) => write!(f, "({})", join(v)),
            Free(w) if w.is_empty() => write!(f, "e"),
            Free(w) => w.iter().try_for_each(|&l| write!(f, "{}", free_letter(l))),
            Heisenberg(c) => write!(f, "({})", join(c)),
            Lamplighter { lamps, pos } => write!(f, "{{{}}}@{}", join(lamps), pos),
            Bs { m, exp, shift } => write!(f, "(a={},b={})", exp, shift.display(*m)),
            Grigorchuk(g) => write!(f, "{g}"),
        }
    }
}

/// A named generator of a group family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: char,
    pub element: GroupElement,
}

/// A group context: the family, its identity and its standard generators in
/// declared order.
#[derive(Clone, Debug)]
pub struct Group {
    family: GroupFamily,
    identity: GroupElement,
    generators: Vec<Generator>,
}

impl Group {
    pub fn new(family: GroupFamily) -> Result<Self> {
        family.validate()?;
        let gen = |name: char, element: GroupElement| Generator { name, element };
        let (identity, generators) = match &family {
            GroupFamily::Zd { d } => {
                let mut gens = Vec::new();
                for i in 0..*d {
                    let mut e = vec![0; *d];
                    e[i] = 1;
                    let c = (b'a' + i as u8) as char;
                    gens.push(gen(c, GroupElement::Zd(e.clone())));
                    e[i] = -1;
                    gens.push(gen(c.to_ascii_uppercase(), GroupElement::Zd(e)));
                }
                (GroupElement::Zd(vec![0; *d]), gens)
            }
            GroupFamily::Free { k } => {
                let gens = (0..2 * *k as u8)
                    .map(|l| gen(free_letter(l), GroupElement::Free(vec![l])))
                    .collect();
                (GroupElement::Free(Vec::new()), gens)
            }
            GroupFamily::Heisenberg => (
                GroupElement::Heisenberg([0, 0, 0]),
                vec![
                    gen('x', GroupElement::Heisenberg([1, 0, 0])),
                    gen('X', GroupElement::Heisenberg([-1, 0, 0])),
                    gen('y', GroupElement::Heisenberg([0, 1, 0])),
                    gen('Y', GroupElement::Heisenberg([0, -1, 0])),
                ],
            ),
            GroupFamily::Lamplighter => {
                let el = |lamps: Vec<i64>, pos| GroupElement::Lamplighter { lamps, pos };
                (
                    el(vec![], 0),
                    vec![gen('t', el(vec![], 1)), gen('T', el(vec![], -1)), gen('s', el(vec![0], 0))],
                )
            }
            GroupFamily::BaumslagSolitar { m } => {
                let el = |exp, shift: i64| GroupElement::Bs { m: *m, exp, shift: MAdic::integer(shift) };
                (
                    el(0, 0),
                    vec![gen('a', el(1, 0)), gen('A', el(-1, 0)), gen('b', el(0, 1)), gen('B', el(0, -1))],
                )
            }
            GroupFamily::Grigorchuk => (
                GroupElement::Grigorchuk(GrigElement::identity()),
                ['a', 'b', 'c', 'd']
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| gen(c, GroupElement::Grigorchuk(GrigElement::from_letters(&[i as u8]))))
                    .collect(),
            ),
        };
        Ok(Self { family, identity, generators })
    }

    pub fn from_spec(spec: &str) -> Result<Self> {
        Self::new(spec.parse()?)
    }

    pub fn family(&self) -> &GroupFamily {
        &self.family
    }

    pub fn identity(&self) -> &GroupElement {
        &self.identity
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, name: char) -> Option<&GroupElement> {
        self.generators.iter().find(|g| g.name == name).map(|g| &g.element)
    }

    /// Whether `g` is an element of this family (same variant and parameters).
    pub fn contains(&self, g: &GroupElement) -> bool {
        match (&self.family, g) {
            (GroupFamily::Zd { d }, GroupElement::Zd(v)) => v.len() == *d,
            (GroupFamily::Free { k }, GroupElement::Free(w)) => w.iter().all(|&l| (l as usize) < 2 * k),
            (GroupFamily::Heisenberg, GroupElement::Heisenberg(_)) => true,
            (GroupFamily::Lamplighter, GroupElement::Lamplighter { .. }) => true,
            (GroupFamily::BaumslagSolitar { m }, GroupElement::Bs { m: m2, .. }) => m == m2,
            (GroupFamily::Grigorchuk, GroupElement::Grigorchuk(_)) => true,
            _ => false,
        }
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::FamilyMismatch(self.family.to_string(), g.kind()))
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        g.try_mul(h)
    }

    pub fn invert(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(g.inverse())
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        g.is_identity()
    }

    /// Left-translates every vertex of `path` by `g^-1`. This is the Cayley
    /// graph automorphism that sends `g` to the identity; it commutes with
    /// right multiplication by generators and so preserves the step law.
    pub fn translate_path(&self, g: &GroupElement, path: &[GroupElement]) -> Result<Vec<GroupElement>> {
        let inv = self.invert(g)?;
        path.iter().map(|v| self.multiply(&inv, v)).collect()
    }

    /// Product of generators named by the characters of `word`.
    pub fn word(&self, word: &str) -> Result<GroupElement> {
        let mut acc = self.identity.clone();
        for c in word.chars() {
            let s = self
                .generator(c)
                .ok_or_else(|| Error::ParseElement(word.to_string(), format!("unknown generator `{c}`")))?;
            acc = acc.try_mul(s)?;
        }
        Ok(acc)
    }

    /// Parses `e`, a word over generator names, or a coordinate tuple
    /// `(x1,...,xd)` for `Z^d` and `(x,y,z)` for the Heisenberg group.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(self.identity.clone());
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            let coords: Vec<i64> = inner
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::ParseElement(s.to_string(), "bad coordinate".into()))?;
            let el = match (&self.family, coords.as_slice()) {
                (GroupFamily::Zd { d }, c) if c.len() == *d => GroupElement::Zd(c.to_vec()),
                (GroupFamily::Heisenberg, &[x, y, z]) => GroupElement::Heisenberg([x, y, z]),
                _ => {
                    return Err(Error::ParseElement(
                        s.to_string(),
                        format!("tuple form not valid for {}", self.family),
                    ))
                }
            };
            return Ok(el);
        }
        // Bare integers are accepted for Z^1.
        if let (GroupFamily::Zd { d: 1 }, Ok(v)) = (&self.family, s.parse::<i64>()) {
            return Ok(GroupElement::Zd(vec![v]));
        }
        self.word(s)
    }

    /// Product of `len` generators drawn uniformly.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> GroupElement {
        let mut acc = self.identity.clone();
        for _ in 0..len {
            let s = &self.generators[rng.random_range(0..self.generators.len())].element;
            acc = acc.try_mul(s).expect("generators belong to the family");
        }
        acc
    }

    /// The uniform step law on the standard generators.
    pub fn uniform_steps(&self) -> StepDistribution {
        StepDistribution::uniform(self).expect("standard generators are strongly connected")
    }
}

/// Builds the `m`-adic shift from a numerator and exponent; used by decoders.
pub fn bs_element(m: u32, exp: i64, num: BigInt, den_exp: u32) -> GroupElement {
    GroupElement::Bs { m, exp, shift: MAdic::new(num, den_exp, m) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(s: &str) -> Group {
        Group::from_spec(s).unwrap()
    }

    #[test]
    fn family_specs_round_trip() {
        for s in ["z:2", "free:2", "heis", "lamplighter", "bs:1:2", "grigorchuk"] {
            assert_eq!(s.parse::<GroupFamily>().unwrap().to_string(), s);
        }
        for bad in ["z:0", "bs:1:1", "bs:2:3", "free:0", "sl2", "z:x"] {
            assert!(bad.parse::<GroupFamily>().is_err(), "{bad}");
        }
    }

    #[test]
    fn make_group_identities_and_generators() {
        let z2 = group("z:2");
        assert_eq!(z2.identity(), &GroupElement::Zd(vec![0, 0]));
        let gens: Vec<_> = z2.generators().iter().map(|g| g.element.to_string()).collect();
        assert_eq!(gens, ["(1,0)", "(-1,0)", "(0,1)", "(0,-1)"]);

        let f2 = group("free:2");
        assert_eq!(f2.identity().to_string(), "e");
        let names: String = f2.generators().iter().map(|g| g.name).collect();
        assert_eq!(names, "aAbB");

        let gr = group("grigorchuk");
        for g in gr.generators() {
            assert!(g.element.try_mul(&g.element).unwrap().is_identity());
            assert!(!g.element.is_identity());
        }
    }

    #[test]
    fn multiply_examples() {
        let f2 = group("free:2");
        assert!(f2.word("aA").unwrap().is_identity());
        let z2 = group("z:2");
        let p = z2.multiply(&z2.word("a").unwrap(), &z2.word("b").unwrap()).unwrap();
        assert_eq!(p, GroupElement::Zd(vec![1, 1]));
        let ll = group("lamplighter");
        assert_eq!(ll.word("tt").unwrap(), GroupElement::Lamplighter { lamps: vec![], pos: 2 });
        assert_eq!(ll.word("tsTs").unwrap().to_string(), "{0,1}@0");
    }

    #[test]
    fn invert_examples() {
        let z2 = group("z:2");
        assert_eq!(z2.invert(&GroupElement::Zd(vec![3, -1])).unwrap(), GroupElement::Zd(vec![-3, 1]));
        let f2 = group("free:2");
        assert_eq!(f2.invert(&f2.word("ab").unwrap()).unwrap().to_string(), "BA");
        let bs = group("bs:1:2");
        let g = bs.word("ab").unwrap();
        assert_eq!(g.to_string(), "(a=1,b=2)");
        let g = bs.word("ba").unwrap();
        assert_eq!(g.to_string(), "(a=1,b=1)");
        assert_eq!(bs.invert(&g).unwrap().to_string(), "(a=-1,b=-1/2)");
    }

    #[test]
    fn baumslag_solitar_relation() {
        let bs = group("bs:1:2");
        // a b a^-1 = b^2
        assert_eq!(bs.word("abA").unwrap(), bs.word("bb").unwrap());
        let bs3 = group("bs:1:3");
        assert_eq!(bs3.word("abA").unwrap(), bs3.word("bbb").unwrap());
    }

    #[test]
    fn heisenberg_commutator_is_central() {
        let h = group("heis");
        let comm = h.word("xyXY").unwrap();
        assert_eq!(comm, GroupElement::Heisenberg([0, 0, 1]));
        assert_eq!(h.word("xyXYx").unwrap(), h.word("xxyXY").unwrap());
    }

    #[test]
    fn grigorchuk_is_identity_examples() {
        let g = group("grigorchuk");
        assert!(g.word("adadadad").unwrap().is_identity());
        assert!(!g.word("ab").unwrap().is_identity());
        assert_eq!(g.word("bc").unwrap(), g.word("d").unwrap());
    }

    #[test]
    fn translate_path_examples() {
        let z2 = group("z:2");
        let p = [GroupElement::Zd(vec![2, 3]), GroupElement::Zd(vec![3, 3])];
        let t = z2.translate_path(&p[0], &p).unwrap();
        assert_eq!(t, [GroupElement::Zd(vec![0, 0]), GroupElement::Zd(vec![1, 0])]);

        let f2 = group("free:2");
        let p = [f2.word("ab").unwrap(), f2.word("aba").unwrap()];
        let t = f2.translate_path(&p[0], &p).unwrap();
        assert_eq!(t[0].to_string(), "e");
        assert_eq!(t[1].to_string(), "a");
        assert_eq!(f2.translate_path(f2.identity(), &p).unwrap(), p);
    }

    #[test]
    fn family_mismatch_rejected() {
        let z2 = group("z:2");
        let f2 = group("free:2");
        assert!(z2.multiply(z2.identity(), f2.identity()).is_err());
        assert!(z2.translate_path(f2.identity(), &[]).is_err());
        assert!(group("z:3").multiply(&GroupElement::Zd(vec![1, 0]), &GroupElement::Zd(vec![0, 1])).is_err());
    }

    #[test]
    fn parse_elements() {
        let z1 = group("z:1");
        assert_eq!(z1.parse_element("-3").unwrap(), GroupElement::Zd(vec![-3]));
        assert_eq!(z1.parse_element("aa").unwrap(), GroupElement::Zd(vec![2]));
        let z2 = group("z:2");
        assert_eq!(z2.parse_element("(2,-1)").unwrap(), GroupElement::Zd(vec![2, -1]));
        assert!(z2.parse_element("(2)").is_err());
        assert!(z2.parse_element("q").is_err());
    }
}
