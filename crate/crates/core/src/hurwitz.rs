//! Monodromy factorizations and the Hurwitz action of braids on them.
//!
//! The generator `σᵢ` replaces the adjacent pair `(tᵢ, tᵢ₊₁)` by
//! `(tᵢ tᵢ₊₁ tᵢ⁻¹, tᵢ)`. For twist powers this is `(T_{tᵢ(cᵢ₊₁)}^{kᵢ₊₁}, tᵢ)`,
//! so one move costs a single transvection of a curve.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{BraidError, BraidWord};
use crate::sl2::{recognize_twist, IntMatrix2, TorusCurve, TwistPower, TwistRecognition};
use crate::symplectic::{relation_word, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HurwitzError {
    #[error("position {index} out of range for a factorization of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("braid on {strands} strands cannot act on {len} entries")]
    StrandMismatch { strands: usize, len: usize },
    #[error("cannot fiber-sum a {0} factorization with a {1} factorization")]
    BaseMismatch(Base, Base),
    #[error("sphere factorization must multiply to the identity, got {0}")]
    NotIdentityProduct(Box<IntMatrix2>),
    #[error("unknown builtin {0:?} (expected q:<n>, E:<d>, eta1:<g>, eta2:<g> or eta3:<g>)")]
    UnknownBuiltin(String),
    #[error("invalid builtin parameter in {0:?}")]
    InvalidParameter(String),
    #[error("entry {index} is not a power of a Dehn twist: {matrix}")]
    NotATwist {
        index: usize,
        matrix: Box<IntMatrix2>,
    },
    #[error("malformed factorization: {0}")]
    Malformed(String),
    #[error(transparent)]
    Braid(#[from] BraidError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    Disk,
    Sphere,
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Base::Disk => "disk",
            Base::Sphere => "sphere",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    pub fn sign(self) -> i32 {
        match self {
            Direction::Forward => 1,
            Direction::Inverse => -1,
        }
    }
}

/// An ordered tuple of twist powers over a disk or a sphere.
///
/// Sphere factorizations multiply to the identity unless they are flagged
/// as partial, which marks sub-spider data cut out of a larger
/// factorization (for instance the genus-one part of a higher-genus
/// fibration).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    base: Base,
    entries: Vec<TwistPower>,
    partial: bool,
    product: IntMatrix2,
}

fn product_of(entries: &[TwistPower]) -> IntMatrix2 {
    entries
        .iter()
        .fold(IntMatrix2::identity(), |acc, t| &acc * &t.matrix())
}

impl Factorization {
    pub fn new(base: Base, entries: Vec<TwistPower>) -> Result<Self, HurwitzError> {
        let product = product_of(&entries);
        if base == Base::Sphere && !product.is_identity() {
            return Err(HurwitzError::NotIdentityProduct(Box::new(product)));
        }
        Ok(Self {
            base,
            entries,
            partial: false,
            product,
        })
    }

    pub fn disk(entries: Vec<TwistPower>) -> Self {
        let product = product_of(&entries);
        Self {
            base: Base::Disk,
            entries,
            partial: false,
            product,
        }
    }

    pub fn sphere(entries: Vec<TwistPower>) -> Result<Self, HurwitzError> {
        Self::new(Base::Sphere, entries)
    }

    /// Sphere-based sub-spider data; the identity-product check is waived.
    pub fn sub_spider(entries: Vec<TwistPower>) -> Self {
        let product = product_of(&entries);
        Self {
            base: Base::Sphere,
            entries,
            partial: true,
            product,
        }
    }

    /// Rebuilds a factorization with the same base and partial flag as
    /// `self` from entries known to come from the same orbit.
    pub(crate) fn sibling(&self, entries: Vec<TwistPower>) -> Self {
        Self {
            base: self.base,
            entries,
            partial: self.partial,
            product: self.product.clone(),
        }
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn entries(&self) -> &[TwistPower] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_partial(&self) -> bool {
        self.partial
    }

    /// All entries are positive Dehn twists.
    pub fn is_lefschetz(&self) -> bool {
        self.entries.iter().all(|t| t.exponent() == 1)
    }

    pub fn total_product(&self) -> &IntMatrix2 {
        &self.product
    }

    pub fn hurwitz_move(&self, i: usize, direction: Direction) -> Result<Self, HurwitzError> {
        let mut entries = self.entries.clone();
        move_entries(&mut entries, i, direction)?;
        Ok(self.sibling(entries))
    }

    /// Applies the braid rightmost letter first (a left action).
    pub fn apply_braid(&self, b: &BraidWord) -> Result<Self, HurwitzError> {
        let mut entries = self.entries.clone();
        act_on_entries(&mut entries, b)?;
        Ok(self.sibling(entries))
    }

    /// Simultaneous conjugation `tᵢ ↦ A tᵢ A⁻¹`, i.e. `cᵢ ↦ A·cᵢ`.
    pub fn conjugate(&self, a: &IntMatrix2) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|t| t.with_curve(t.curve().transform(a)))
            .collect();
        Self {
            base: self.base,
            entries,
            partial: self.partial,
            product: a.conjugate(&self.product),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("factorization serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, HurwitzError> {
        let file: FactorizationFile =
            serde_json::from_str(text).map_err(|e| HurwitzError::Malformed(e.to_string()))?;
        file.try_into()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.base)?;
        for (k, t) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// One Hurwitz move at 1-based position `i` on a bare entry slice.
pub fn move_entries(
    entries: &mut [TwistPower],
    i: usize,
    direction: Direction,
) -> Result<(), HurwitzError> {
    if i == 0 || i >= entries.len() {
        return Err(HurwitzError::IndexOutOfRange {
            index: i,
            len: entries.len(),
        });
    }
    let (x, y) = (&entries[i - 1], &entries[i]);
    let (new_x, new_y) = match direction {
        Direction::Forward => {
            let moved = y.with_curve(y.curve().twisted_by(x.curve(), x.exponent()));
            (moved, x.clone())
        }
        Direction::Inverse => {
            let moved = x.with_curve(x.curve().twisted_by(y.curve(), -y.exponent()));
            (y.clone(), moved)
        }
    };
    entries[i - 1] = new_x;
    entries[i] = new_y;
    Ok(())
}

/// Applies a braid word to a bare entry slice, rightmost letter first.
pub fn act_on_entries(entries: &mut [TwistPower], b: &BraidWord) -> Result<(), HurwitzError> {
    if b.strands() != entries.len() {
        return Err(HurwitzError::StrandMismatch {
            strands: b.strands(),
            len: entries.len(),
        });
    }
    for &l in b.letters().iter().rev() {
        let direction = if l > 0 {
            Direction::Forward
        } else {
            Direction::Inverse
        };
        move_entries(entries, l.unsigned_abs() as usize, direction)?;
    }
    Ok(())
}

pub fn hurwitz_move(
    f: &Factorization,
    i: usize,
    direction: Direction,
) -> Result<Factorization, HurwitzError> {
    f.hurwitz_move(i, direction)
}

pub fn apply_braid(f: &Factorization, b: &BraidWord) -> Result<Factorization, HurwitzError> {
    f.apply_braid(b)
}

pub fn total_product(f: &Factorization) -> IntMatrix2 {
    f.product.clone()
}

/// Concatenation of two factorizations over the same base.
pub fn fiber_sum(f1: &Factorization, f2: &Factorization) -> Result<Factorization, HurwitzError> {
    if f1.base != f2.base {
        return Err(HurwitzError::BaseMismatch(f1.base, f2.base));
    }
    if f1.base == Base::Sphere && !f1.partial && !f2.partial {
        for f in [f1, f2] {
            if !f.product.is_identity() {
                return Err(HurwitzError::NotIdentityProduct(Box::new(
                    f.product.clone(),
                )));
            }
        }
    }
    let mut entries = f1.entries.clone();
    entries.extend_from_slice(&f2.entries);
    Ok(Factorization {
        base: f1.base,
        entries,
        partial: f1.partial || f2.partial,
        product: &f1.product * &f2.product,
    })
}

/// Positive twists alternating α, β, α, … of the given length.
pub fn alternating(len: usize) -> Vec<TwistPower> {
    (0..len)
        .map(|k| {
            let c = if k % 2 == 0 {
                TorusCurve::alpha()
            } else {
                TorusCurve::beta()
            };
            TwistPower::positive(c)
        })
        .collect()
}

/// Built-in factorizations:
///
/// * `q:<n>`: `(Tα, Tβ, Tα, …)` of length `n ≥ 1` over the disk;
/// * `E:<d>`: `(Tα, Tβ)^{6d}` over the sphere;
/// * `eta1:<g>`, `eta2:<g>`, `eta3:<g>`: the hyperelliptic relations. For
///   `g = 1` this is the full torus factorization; for `g ≥ 2` it is the
///   sub-spider of entries about the first two chain curves, entered as
///   genus-one data.
pub fn builtin(name: &str) -> Result<Factorization, HurwitzError> {
    let (kind, param) = name
        .split_once(':')
        .ok_or_else(|| HurwitzError::UnknownBuiltin(name.to_string()))?;
    let value: usize = param
        .trim()
        .parse()
        .map_err(|_| HurwitzError::InvalidParameter(name.to_string()))?;
    if value == 0 {
        return Err(HurwitzError::InvalidParameter(name.to_string()));
    }
    match kind.trim() {
        "q" => Ok(Factorization::disk(alternating(value))),
        "E" => Factorization::sphere(alternating(12 * value)),
        "eta1" => eta(Relation::Eta1, value),
        "eta2" => eta(Relation::Eta2, value),
        "eta3" => eta(Relation::Eta3, value),
        _ => Err(HurwitzError::UnknownBuiltin(name.to_string())),
    }
}

fn eta(relation: Relation, genus: usize) -> Result<Factorization, HurwitzError> {
    let word = relation_word(relation, genus);
    if genus == 1 {
        // chain curves on the torus: α, β, α
        let entries = word
            .iter()
            .map(|&c| {
                let curve = if c % 2 == 1 {
                    TorusCurve::alpha()
                } else {
                    TorusCurve::beta()
                };
                TwistPower::positive(curve)
            })
            .collect();
        return Factorization::sphere(entries);
    }
    let entries = word
        .iter()
        .filter_map(|&c| match c {
            1 => Some(TwistPower::positive(TorusCurve::alpha())),
            2 => Some(TwistPower::positive(TorusCurve::beta())),
            _ => None,
        })
        .collect();
    Ok(Factorization::sub_spider(entries))
}

#[derive(Serialize, Deserialize)]
struct FactorizationFile {
    base: Base,
    entries: Vec<EntryFile>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    partial: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryFile {
    Twist(TwistPower),
    Matrix { matrix: IntMatrix2 },
}

impl From<&Factorization> for FactorizationFile {
    fn from(f: &Factorization) -> Self {
        Self {
            base: f.base,
            entries: f.entries.iter().cloned().map(EntryFile::Twist).collect(),
            partial: f.partial,
        }
    }
}

impl Serialize for Factorization {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FactorizationFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Factorization {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        FactorizationFile::deserialize(d)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

impl TryFrom<FactorizationFile> for Factorization {
    type Error = HurwitzError;

    fn try_from(file: FactorizationFile) -> Result<Self, HurwitzError> {
        let mut entries = Vec::with_capacity(file.entries.len());
        for (k, e) in file.entries.into_iter().enumerate() {
            match e {
                EntryFile::Twist(t) => entries.push(t),
                EntryFile::Matrix { matrix } => match recognize_twist(&matrix) {
                    TwistRecognition::Twist(t) => entries.push(t),
                    _ => {
                        return Err(HurwitzError::NotATwist {
                            index: k + 1,
                            matrix: Box::new(matrix),
                        })
                    }
                },
            }
        }
        if file.partial {
            if file.base != Base::Sphere {
                return Err(HurwitzError::Malformed(
                    "only sphere factorizations may be partial".into(),
                ));
            }
            return Ok(Factorization::sub_spider(entries));
        }
        Factorization::new(file.base, entries)
    }
}
