//! Exact SL2(Z) arithmetic, simple closed curves on the torus and their
//! Dehn twists.
//!
//! A Dehn twist about the curve `c = (p, q)` acts on first homology as the
//! transvection `v ↦ v + ⟨v, c⟩ c` with `⟨(a, b), (p, q)⟩ = aq − bp`. This
//! convention sends the twists about `α = (1, 0)` and `β = (0, 1)` to
//! `[[1, −1], [0, 1]]` and `[[1, 0], [1, 1]]` respectively.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Deserializer;
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json_int::{JsonInt, OwnedJsonInt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sl2Error {
    #[error("matrix has determinant {0}, expected 1")]
    NotUnimodular(BigInt),
    #[error("({0}, {1}) is not a primitive integer vector")]
    NotPrimitive(BigInt, BigInt),
    #[error("twist exponent must be nonzero")]
    ZeroExponent,
}

/// A 2×2 integer matrix of determinant one, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl IntMatrix2 {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self, Sl2Error> {
        let m = Self::raw(a.into(), b.into(), c.into(), d.into());
        let det = m.det();
        if det.is_one() {
            Ok(m)
        } else {
            Err(Sl2Error::NotUnimodular(det))
        }
    }

    fn raw(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::raw(BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one())
    }

    pub fn neg_identity() -> Self {
        Self::raw(
            -BigInt::one(),
            BigInt::zero(),
            BigInt::zero(),
            -BigInt::one(),
        )
    }

    /// Entries in row-major order `[a, b, c, d]`.
    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    /// Inverse via the adjugate, valid because the determinant is one.
    pub fn inverse(&self) -> Self {
        Self::raw(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn pow(&self, exponent: i64) -> Self {
        let base = if exponent < 0 {
            self.inverse()
        } else {
            self.clone()
        };
        let mut e = exponent.unsigned_abs();
        let mut acc = Self::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        acc
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (&self.a * x + &self.b * y, &self.c * x + &self.d * y)
    }

    /// `self · other · self⁻¹`.
    pub fn conjugate(&self, other: &IntMatrix2) -> IntMatrix2 {
        &(self * other) * &self.inverse()
    }
}

impl Mul for &IntMatrix2 {
    type Output = IntMatrix2;

    fn mul(self, rhs: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2::raw(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }
}

impl Mul for IntMatrix2 {
    type Output = IntMatrix2;

    fn mul(self, rhs: IntMatrix2) -> IntMatrix2 {
        &self * &rhs
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl Serialize for IntMatrix2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows = [
            [JsonInt(&self.a), JsonInt(&self.b)],
            [JsonInt(&self.c), JsonInt(&self.d)],
        ];
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [[a, b], [c, d]] = <[[OwnedJsonInt; 2]; 2]>::deserialize(deserializer)?;
        IntMatrix2::new(a.0, b.0, c.0, d.0).map_err(serde::de::Error::custom)
    }
}

pub fn mat_mul(a: &IntMatrix2, b: &IntMatrix2) -> IntMatrix2 {
    a * b
}

pub fn mat_inv(a: &IntMatrix2) -> IntMatrix2 {
    a.inverse()
}

/// An isotopy class of essential simple closed curve on the torus.
///
/// Stored as a primitive integer vector whose first nonzero coordinate is
/// positive, since a curve and its reverse are the same isotopy class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusCurve {
    p: BigInt,
    q: BigInt,
}

impl TorusCurve {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self, Sl2Error> {
        let (p, q) = (p.into(), q.into());
        if !p.gcd(&q).is_one() {
            return Err(Sl2Error::NotPrimitive(p, q));
        }
        Ok(Self::canonical(p, q))
    }

    /// Builds a curve from a vector already known to be primitive.
    pub(crate) fn canonical(p: BigInt, q: BigInt) -> Self {
        if p.is_negative() || (p.is_zero() && q.is_negative()) {
            Self { p: -p, q: -q }
        } else {
            Self { p, q }
        }
    }

    /// The curve α = (1, 0).
    pub fn alpha() -> Self {
        Self::canonical(BigInt::one(), BigInt::zero())
    }

    /// The curve β = (0, 1).
    pub fn beta() -> Self {
        Self::canonical(BigInt::zero(), BigInt::one())
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    /// Image of the curve under a matrix, re-canonicalized.
    pub fn transform(&self, m: &IntMatrix2) -> TorusCurve {
        let (x, y) = m.apply(&self.p, &self.q);
        Self::canonical(x, y)
    }

    /// Image under the twist power `T_c^k`, computed as `v + k⟨v, c⟩c`.
    pub fn twisted_by(&self, c: &TorusCurve, k: i64) -> TorusCurve {
        let s = pairing(&self.p, &self.q, c) * k;
        if s.is_zero() {
            return self.clone();
        }
        Self::canonical(&self.p + &s * &c.p, &self.q + &s * &c.q)
    }

    pub fn is_parallel(&self, other: &TorusCurve) -> bool {
        intersection(self, other).is_zero()
    }
}

/// `⟨(x, y), c⟩ = x·c.q − y·c.p`.
fn pairing(x: &BigInt, y: &BigInt, c: &TorusCurve) -> BigInt {
    x * &c.q - y * &c.p
}

impl fmt::Display for TorusCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

impl Serialize for TorusCurve {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(&JsonInt(&self.p))?;
        seq.serialize_element(&JsonInt(&self.q))?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for TorusCurve {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [p, q] = <[OwnedJsonInt; 2]>::deserialize(deserializer)?;
        TorusCurve::new(p.0, q.0).map_err(serde::de::Error::custom)
    }
}

/// A nonzero power of a Dehn twist about a torus curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTwistPower", into = "RawTwistPower")]
pub struct TwistPower {
    curve: TorusCurve,
    exponent: i64,
}

#[derive(Serialize, Deserialize)]
struct RawTwistPower {
    curve: TorusCurve,
    power: i64,
}

impl TryFrom<RawTwistPower> for TwistPower {
    type Error = Sl2Error;

    fn try_from(raw: RawTwistPower) -> Result<Self, Sl2Error> {
        TwistPower::new(raw.curve, raw.power)
    }
}

impl From<TwistPower> for RawTwistPower {
    fn from(t: TwistPower) -> Self {
        RawTwistPower {
            curve: t.curve,
            power: t.exponent,
        }
    }
}

impl TwistPower {
    pub fn new(curve: TorusCurve, exponent: i64) -> Result<Self, Sl2Error> {
        if exponent == 0 {
            return Err(Sl2Error::ZeroExponent);
        }
        Ok(Self { curve, exponent })
    }

    /// Positive Dehn twist about `curve`.
    pub fn positive(curve: TorusCurve) -> Self {
        Self { curve, exponent: 1 }
    }

    pub fn curve(&self) -> &TorusCurve {
        &self.curve
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn inverse(&self) -> Self {
        Self {
            curve: self.curve.clone(),
            exponent: -self.exponent,
        }
    }

    pub fn with_curve(&self, curve: TorusCurve) -> Self {
        Self {
            curve,
            exponent: self.exponent,
        }
    }

    pub fn matrix(&self) -> IntMatrix2 {
        twist_matrix(self)
    }
}

impl fmt::Display for TwistPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 1 {
            write!(f, "T{}", self.curve)
        } else {
            write!(f, "T{}^{}", self.curve, self.exponent)
        }
    }
}

/// `[[1 + kpq, −kp²], [kq², 1 − kpq]]` for curve `(p, q)` and exponent `k`.
pub fn twist_matrix(t: &TwistPower) -> IntMatrix2 {
    let (p, q) = (&t.curve.p, &t.curve.q);
    let k = BigInt::from(t.exponent);
    let kpq = &k * p * q;
    IntMatrix2::raw(
        BigInt::one() + &kpq,
        -(&k * p * p),
        &k * q * q,
        BigInt::one() - &kpq,
    )
}

pub fn apply_to_curve(m: &IntMatrix2, c: &TorusCurve) -> TorusCurve {
    c.transform(m)
}

/// Geometric intersection number `|p₁q₂ − q₁p₂|`.
pub fn intersection(c1: &TorusCurve, c2: &TorusCurve) -> BigInt {
    (&c1.p * &c2.q - &c1.q * &c2.p).abs()
}

/// `i(d, T_c^k d)`, checked against the closed form `|k|·i(c, d)²`.
///
/// # Panics
///
/// Panics if the two values disagree, which can only happen if the twist
/// convention and the intersection form are out of sync.
pub fn intersection_growth(c: &TorusCurve, d: &TorusCurve, k: i64) -> BigInt {
    let image = d.transform(&twist_matrix(&TwistPower {
        curve: c.clone(),
        exponent: k,
    }));
    let direct = intersection(d, &image);
    let i = intersection(c, d);
    let closed = BigInt::from(k).abs() * &i * &i;
    assert_eq!(
        direct, closed,
        "intersection growth mismatch for c={c}, d={d}, k={k}"
    );
    direct
}

/// Outcome of [`recognize_twist`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistRecognition {
    Identity,
    Twist(TwistPower),
    NotATwist,
}

/// Recognizes a matrix of the form `[[1 + kpq, −kp²], [kq², 1 − kpq]]`.
pub fn recognize_twist(m: &IntMatrix2) -> TwistRecognition {
    if m.is_identity() {
        return TwistRecognition::Identity;
    }
    if m.trace() != BigInt::from(2) || !m.det().is_one() {
        return TwistRecognition::NotATwist;
    }
    // m − I = k · [[pq, −p²], [q², −pq]]
    let kp2 = -&m.b;
    let kq2 = m.c.clone();
    let g = kp2.gcd(&kq2);
    if g.is_zero() {
        return TwistRecognition::NotATwist;
    }
    let k = if kp2.is_positive() || (kp2.is_zero() && kq2.is_positive()) {
        g
    } else {
        -g
    };
    let (p2, q2) = (&kp2 / &k, &kq2 / &k);
    if p2.is_negative() || q2.is_negative() {
        return TwistRecognition::NotATwist;
    }
    let (p, q_abs) = (p2.sqrt(), q2.sqrt());
    if &p * &p != p2 || &q_abs * &q_abs != q2 {
        return TwistRecognition::NotATwist;
    }
    // sign of q from the off-diagonal entry a − 1 = kpq
    let kpq = &m.a - BigInt::one();
    let q = if (&k * &p * &q_abs) == kpq {
        q_abs
    } else {
        -q_abs
    };
    let Ok(exponent) = i64::try_from(&k) else {
        return TwistRecognition::NotATwist;
    };
    let Ok(curve) = TorusCurve::new(p, q) else {
        return TwistRecognition::NotATwist;
    };
    let candidate = TwistPower { curve, exponent };
    if &twist_matrix(&candidate) == m {
        TwistRecognition::Twist(candidate)
    } else {
        TwistRecognition::NotATwist
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> IntMatrix2 {
        IntMatrix2::new(a, b, c, d).unwrap()
    }

    fn curve(p: i64, q: i64) -> TorusCurve {
        TorusCurve::new(p, q).unwrap()
    }

    fn t_alpha() -> IntMatrix2 {
        TwistPower::positive(TorusCurve::alpha()).matrix()
    }

    fn t_beta() -> IntMatrix2 {
        TwistPower::positive(TorusCurve::beta()).matrix()
    }

    #[test]
    fn products() {
        assert_eq!(mat_mul(&t_alpha(), &t_beta()), m(0, -1, 1, 1));
        let a = m(2, 3, 1, 2);
        assert_eq!(mat_mul(&IntMatrix2::identity(), &a), a);
        let ab = mat_mul(&t_alpha(), &t_beta());
        assert_eq!(ab.pow(3), IntMatrix2::neg_identity());
        assert_eq!(ab.pow(6), IntMatrix2::identity());
    }

    #[test]
    fn inverses() {
        assert_eq!(mat_inv(&t_alpha()), m(1, 1, 0, 1));
        assert_eq!(mat_inv(&IntMatrix2::identity()), IntMatrix2::identity());
        assert!(mat_mul(&mat_inv(&t_beta()), &t_beta()).is_identity());
        assert_eq!(t_alpha().pow(-2), m(1, 2, 0, 1));
    }

    #[test]
    fn rejects_non_unimodular() {
        assert_eq!(
            IntMatrix2::new(2, 0, 0, 1),
            Err(Sl2Error::NotUnimodular(BigInt::from(2)))
        );
        assert!(TorusCurve::new(2, 4).is_err());
        assert!(TorusCurve::new(0, 0).is_err());
        assert_eq!(TwistPower::new(curve(1, 0), 0), Err(Sl2Error::ZeroExponent));
    }

    #[test]
    fn twist_matrices_match_reference() {
        assert_eq!(t_alpha(), m(1, -1, 0, 1));
        assert_eq!(t_beta(), m(1, 0, 1, 1));
        let inv = TwistPower::new(curve(1, 0), -1).unwrap();
        assert_eq!(twist_matrix(&inv), m(1, 1, 0, 1));
    }

    #[test]
    fn curves_are_sign_canonical() {
        assert_eq!(curve(-1, 1), curve(1, -1));
        assert_eq!(curve(0, -1), TorusCurve::beta());
        assert_eq!(
            apply_to_curve(&t_alpha(), &TorusCurve::beta()),
            curve(1, -1)
        );
        assert_eq!(apply_to_curve(&t_beta(), &TorusCurve::alpha()), curve(1, 1));
        let c = curve(3, -7);
        assert_eq!(apply_to_curve(&IntMatrix2::identity(), &c), c);
    }

    #[test]
    fn twisted_by_agrees_with_matrix_route() {
        let c = curve(2, -3);
        let d = curve(5, 1);
        for k in [-3, -1, 1, 2, 7] {
            let t = TwistPower::new(c.clone(), k).unwrap();
            assert_eq!(d.twisted_by(&c, k), d.transform(&t.matrix()));
        }
    }

    #[test]
    fn intersections() {
        assert_eq!(intersection(&curve(1, 0), &curve(0, 1)), BigInt::from(1));
        let c = curve(4, 9);
        assert_eq!(intersection(&c, &c), BigInt::zero());
        assert_eq!(intersection(&curve(1, -1), &curve(1, 1)), BigInt::from(2));
    }

    #[test]
    fn growth() {
        assert_eq!(
            intersection_growth(&curve(1, 0), &curve(0, 1), 3),
            BigInt::from(3)
        );
        assert_eq!(
            intersection_growth(&curve(2, 5), &curve(1, 7), 0),
            BigInt::zero()
        );
        assert_eq!(
            intersection_growth(&curve(1, -1), &curve(1, 1), 2),
            BigInt::from(8)
        );
    }

    #[test]
    fn recognition() {
        assert_eq!(
            recognize_twist(&m(1, -1, 0, 1)),
            TwistRecognition::Twist(TwistPower::positive(TorusCurve::alpha()))
        );
        assert_eq!(
            recognize_twist(&IntMatrix2::identity()),
            TwistRecognition::Identity
        );
        assert_eq!(
            recognize_twist(&m(0, -1, 1, 1)),
            TwistRecognition::NotATwist
        );
        // trace 2 but not unipotent of twist shape: −I is excluded by trace
        assert_eq!(
            recognize_twist(&IntMatrix2::neg_identity()),
            TwistRecognition::NotATwist
        );
        // square of a twist about a non-primitive-looking shape
        let t = TwistPower::new(curve(2, -3), -4).unwrap();
        assert_eq!(recognize_twist(&t.matrix()), TwistRecognition::Twist(t));
    }

    #[test]
    fn json_shapes() {
        assert_eq!(serde_json::to_string(&t_alpha()).unwrap(), "[[1,-1],[0,1]]");
        assert_eq!(serde_json::to_string(&curve(-2, 3)).unwrap(), "[2,-3]");
        let t: TwistPower = serde_json::from_str(r#"{"curve":[0,-1],"power":2}"#).unwrap();
        assert_eq!(t, TwistPower::new(TorusCurve::beta(), 2).unwrap());
        assert!(serde_json::from_str::<IntMatrix2>("[[1,1],[1,1]]").is_err());
        assert!(serde_json::from_str::<TwistPower>(r#"{"curve":[1,0],"power":0}"#).is_err());
    }

    proptest::proptest! {
        #[test]
        fn conjugated_twist_is_twist_about_image(p in -50i64..50, q in -50i64..50, k in -5i64..=5, t in -9i64..9, u in -9i64..9) {
            proptest::prop_assume!(num_integer::Integer::gcd(&p, &q) == 1 && k != 0);
            let c = TorusCurve::new(p, q).unwrap();
            let a = &IntMatrix2::new(1, t, 0, 1).unwrap() * &IntMatrix2::new(1, 0, u, 1).unwrap();
            let tw = TwistPower::new(c.clone(), k).unwrap();
            let image = TwistPower::new(c.transform(&a), k).unwrap();
            proptest::prop_assert_eq!(a.conjugate(&tw.matrix()), image.matrix());
            proptest::prop_assert_eq!(tw.matrix().trace(), BigInt::from(2));
        }
    }
}
