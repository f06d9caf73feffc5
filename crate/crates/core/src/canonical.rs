//! Canonical keys for factorizations.
//!
//! Disk factorizations are keyed by their exact entry tuple. Sphere
//! factorizations are keyed up to simultaneous conjugation: the first
//! curve is moved to `(1, 0)`, and the residual stabilizer of that curve
//! (the unipotent matrices `[[1, m], [0, 1]]`, up to `−I`) is spent on
//! reducing the first non-parallel curve `(p, q)` to `q > 0`, `0 ≤ p < q`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::hurwitz::{Base, Factorization};
use crate::sl2::{IntMatrix2, TorusCurve, TwistPower};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error("expected a {expected}-based factorization, found {found}")]
    WrongBase { expected: Base, found: Base },
    #[error("malformed key: {0}")]
    Decode(&'static str),
}

const TAG_DISK: u8 = 0;
const TAG_SPHERE: u8 = 1;
const TAG_PARTIAL: u8 = 2;

/// Opaque byte-string key. Equal keys mean equal disk tuples, or sphere
/// tuples related by simultaneous conjugation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(text: &str) -> Result<Self, CanonicalError> {
        let bytes = hex::decode(text).map_err(|_| CanonicalError::Decode("not hex"))?;
        let key = CanonicalKey(bytes);
        key.decode()?;
        Ok(key)
    }

    /// Rebuilds the factorization the key was serialized from. For sphere
    /// keys this is the canonical conjugate.
    pub fn decode(&self) -> Result<Factorization, CanonicalError> {
        let (&tag, mut rest) = self
            .0
            .split_first()
            .ok_or(CanonicalError::Decode("empty"))?;
        let mut entries = Vec::new();
        while !rest.is_empty() {
            let exponent = unzigzag(read_varint(&mut rest)?);
            let p = read_int(&mut rest)?;
            let q = read_int(&mut rest)?;
            let curve = TorusCurve::new(p, q).map_err(|_| CanonicalError::Decode("curve"))?;
            let twist =
                TwistPower::new(curve, exponent).map_err(|_| CanonicalError::Decode("exponent"))?;
            entries.push(twist);
        }
        match tag {
            TAG_DISK => Ok(Factorization::disk(entries)),
            TAG_SPHERE => {
                Factorization::sphere(entries).map_err(|_| CanonicalError::Decode("product"))
            }
            TAG_PARTIAL => Ok(Factorization::sub_spider(entries)),
            _ => Err(CanonicalError::Decode("base tag")),
        }
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn write_varint(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

fn read_varint(input: &mut &[u8]) -> Result<u64, CanonicalError> {
    let mut v = 0u64;
    for shift in (0..64).step_by(7) {
        let (&byte, rest) = input
            .split_first()
            .ok_or(CanonicalError::Decode("truncated"))?;
        *input = rest;
        v |= u64::from(byte & 0x7f) << shift;
        if byte & 0x80 == 0 {
            return Ok(v);
        }
    }
    Err(CanonicalError::Decode("varint overflow"))
}

fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

fn unzigzag(v: u64) -> i64 {
    ((v >> 1) as i64) ^ -((v & 1) as i64)
}

fn write_int(out: &mut Vec<u8>, v: &BigInt) {
    let bytes = v.to_signed_bytes_be();
    write_varint(out, bytes.len() as u64);
    out.extend_from_slice(&bytes);
}

fn read_int(input: &mut &[u8]) -> Result<BigInt, CanonicalError> {
    let len = read_varint(input)? as usize;
    if input.len() < len {
        return Err(CanonicalError::Decode("truncated"));
    }
    let (bytes, rest) = input.split_at(len);
    *input = rest;
    Ok(BigInt::from_signed_bytes_be(bytes))
}

fn encode<'a>(tag: u8, entries: impl Iterator<Item = (i64, &'a TorusCurve)>) -> CanonicalKey {
    let mut out = vec![tag];
    for (exponent, c) in entries {
        write_varint(&mut out, zigzag(exponent));
        write_int(&mut out, c.p());
        write_int(&mut out, c.q());
    }
    CanonicalKey(out)
}

/// Serialization of the sign-canonical entries, base tag included.
pub fn exact_key(f: &Factorization) -> CanonicalKey {
    let tag = match (f.base(), f.is_partial()) {
        (Base::Disk, _) => TAG_DISK,
        (Base::Sphere, false) => TAG_SPHERE,
        (Base::Sphere, true) => TAG_PARTIAL,
    };
    encode(tag, f.entries().iter().map(|t| (t.exponent(), t.curve())))
}

pub fn disk_key(f: &Factorization) -> Result<CanonicalKey, CanonicalError> {
    match f.base() {
        Base::Disk => Ok(exact_key(f)),
        found => Err(CanonicalError::WrongBase {
            expected: Base::Disk,
            found,
        }),
    }
}

pub fn sphere_key(f: &Factorization) -> Result<CanonicalKey, CanonicalError> {
    match f.base() {
        Base::Sphere => Ok(exact_key(&f.conjugate(&normalizing_matrix(f.entries())))),
        found => Err(CanonicalError::WrongBase {
            expected: Base::Sphere,
            found,
        }),
    }
}

/// The key appropriate to the factorization's base.
pub fn key(f: &Factorization) -> CanonicalKey {
    match f.base() {
        Base::Disk => exact_key(f),
        Base::Sphere => exact_key(&f.conjugate(&normalizing_matrix(f.entries()))),
    }
}

/// Canonical representative of the tuple under simultaneous conjugation.
pub fn conjugacy_normal_form(f: &Factorization) -> Factorization {
    f.conjugate(&normalizing_matrix(f.entries()))
}

/// `A ∈ SL2(Z)` with `A·c = (1, 0)`, built from Bézout coefficients.
fn to_alpha(c: &TorusCurve) -> IntMatrix2 {
    let e = c.p().extended_gcd(c.q());
    let (s, t) = if e.gcd.is_negative() {
        (-e.x, -e.y)
    } else {
        (e.x, e.y)
    };
    IntMatrix2::new(s, t, -c.q(), c.p().clone()).expect("Bézout matrix is unimodular")
}

fn normalizing_matrix(entries: &[TwistPower]) -> IntMatrix2 {
    let Some(first) = entries.first() else {
        return IntMatrix2::identity();
    };
    let a = to_alpha(first.curve());
    let pivot = entries
        .iter()
        .map(|t| t.curve().transform(&a))
        .find(|c| !c.q().is_zero());
    let Some(c) = pivot else {
        return a;
    };
    // Curves are unoriented, so (p, q) may be flipped to make q positive.
    let (p, q) = if c.q().is_negative() {
        (-c.p(), -c.q())
    } else {
        (c.p().clone(), c.q().clone())
    };
    let m = -p.div_floor(&q);
    let u = IntMatrix2::new(BigInt::one(), m, BigInt::zero(), BigInt::one())
        .expect("unipotent matrix is unimodular");
    &u * &a
}

/// Traces of every prefix product followed by traces of every product of
/// adjacent entries. Invariant under simultaneous conjugation, so it can
/// shard tables before full canonicalization.
pub fn trace_prehash(f: &Factorization) -> Vec<BigInt> {
    let matrices: Vec<IntMatrix2> = f.entries().iter().map(TwistPower::matrix).collect();
    let mut out = Vec::with_capacity(2 * matrices.len());
    let mut acc = IntMatrix2::identity();
    for m in &matrices {
        acc = &acc * m;
        out.push(acc.trace());
    }
    out.extend(matrices.windows(2).map(|w| (&w[0] * &w[1]).trace()));
    out
}
