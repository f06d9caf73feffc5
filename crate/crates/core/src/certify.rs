//! Certificates that a factorization has an infinite Hurwitz orbit.
//!
//! A certificate selects a sub-tuple of the factorization whose curves
//! form a recognizable spider, a preparation braid that exposes a pair of
//! curves meeting at least twice, and a braid `σ` exchanging that pair.
//! Replaying `σᵏ` after the preparation must give pairwise distinct keys;
//! on a sphere, untouched non-parallel "marking" entries pin down the
//! conjugation ambiguity.
//!
//! The search runs over position subsequences of the stored tuple only. It
//! never tries Hurwitz moves to uncover a spider, so `None` means "no
//! certificate found", not "finite orbit".

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{BraidError, BraidWord};
use crate::canonical::key;
use crate::hurwitz::{act_on_entries, fiber_sum, Base, Factorization, HurwitzError};
use crate::sl2::{intersection, IntMatrix2, TorusCurve, TwistPower};

pub const DEFAULT_BOUND: usize = 50;

/// Cap on backtracking steps in a single pattern search.
const SEARCH_STEPS: usize = 1 << 24;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("invalid spider pattern: {0}")]
    Pattern(String),
    #[error("sub-tuple does not have the alternating profile (a, b, a, b, a) with i(a, b) = 1")]
    ProfileMismatch,
    #[error("factorization has a twist with exponent other than 1")]
    NotLefschetz,
    #[error("fiber-sum certificates need identical summands")]
    NotSelfSum,
    #[error("total product is not ±I, so cyclic rotation is not a Hurwitz move")]
    NotCentral,
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("certificate replay failed: {0}")]
    ReplayFailed(String),
    #[error(transparent)]
    Hurwitz(#[from] HurwitzError),
    #[error(transparent)]
    Braid(#[from] BraidError),
}

/// A constraint on the intersection number of two curve classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    Exactly(u64),
    AtLeast(u64),
}

impl Constraint {
    fn admits(self, i: &BigInt) -> bool {
        match self {
            Constraint::Exactly(n) => *i == BigInt::from(n),
            Constraint::AtLeast(n) => *i >= BigInt::from(n),
        }
    }
}

/// A topological type `(δ₁, …, δₖ)`: positions with the same class carry
/// the same curve, and listed class pairs satisfy intersection constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpiderPattern {
    classes: Vec<usize>,
    /// `(a, b, constraint)` with `a < b`.
    constraints: Vec<(usize, usize, Constraint)>,
}

impl SpiderPattern {
    /// `layout` names one class per position, e.g. `"abab"`.
    pub fn from_layout(
        layout: &str,
        constraints: &[(char, char, Constraint)],
    ) -> Result<Self, CertifyError> {
        let mut names: Vec<char> = Vec::new();
        let mut classes = Vec::new();
        for ch in layout.chars().filter(|c| !c.is_whitespace()) {
            let class = names.iter().position(|&c| c == ch).unwrap_or_else(|| {
                names.push(ch);
                names.len() - 1
            });
            classes.push(class);
        }
        let mut pairs = Vec::new();
        for &(x, y, c) in constraints {
            let find = |ch: char| {
                names
                    .iter()
                    .position(|&n| n == ch)
                    .ok_or_else(|| CertifyError::Pattern(format!("class {ch:?} not in layout")))
            };
            let (a, b) = (find(x)?, find(y)?);
            if a == b {
                return Err(CertifyError::Pattern(format!(
                    "class {x:?} constrained against itself"
                )));
            }
            let (a, b) = (a.min(b), a.max(b));
            if pairs.iter().any(|&(p, q, _)| (p, q) == (a, b)) {
                return Err(CertifyError::Pattern(format!(
                    "pair {x:?}, {y:?} constrained twice"
                )));
            }
            pairs.push((a, b, c));
        }
        Ok(Self {
            classes,
            constraints: pairs,
        })
    }

    /// `(a, b, a, b, …)` of the given length with `i(a, b) = 1`.
    pub fn alternating(len: usize) -> Self {
        let layout: String = (0..len)
            .map(|k| if k % 2 == 0 { 'a' } else { 'b' })
            .collect();
        Self::from_layout(&layout, &[('a', 'b', Constraint::Exactly(1))]).expect("valid layout")
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    fn constraint(&self, a: usize, b: usize) -> Option<Constraint> {
        let (a, b) = (a.min(b), a.max(b));
        self.constraints
            .iter()
            .find(|&&(p, q, _)| (p, q) == (a, b))
            .map(|&(_, _, c)| c)
    }
}

/// Increasing 1-based position tuples whose curves realize the pattern,
/// in lexicographic order; at most `limit` of them if given.
pub fn find_pattern(f: &Factorization, p: &SpiderPattern, limit: Option<usize>) -> Vec<Vec<usize>> {
    let curves: Vec<&TorusCurve> = f.entries().iter().map(TwistPower::curve).collect();
    let mut search = Search {
        curves,
        pattern: p,
        assigned: vec![None; p.classes.iter().max().map_or(0, |m| m + 1)],
        chosen: Vec::with_capacity(p.len()),
        found: Vec::new(),
        limit: limit.unwrap_or(usize::MAX),
        steps: 0,
    };
    if search.limit > 0 {
        search.extend(0);
    }
    search.found
}

struct Search<'a> {
    curves: Vec<&'a TorusCurve>,
    pattern: &'a SpiderPattern,
    assigned: Vec<Option<&'a TorusCurve>>,
    chosen: Vec<usize>,
    found: Vec<Vec<usize>>,
    limit: usize,
    steps: usize,
}

impl<'a> Search<'a> {
    /// Returns false once the search should stop.
    fn extend(&mut self, start: usize) -> bool {
        let k = self.chosen.len();
        if k == self.pattern.len() {
            self.found
                .push(self.chosen.iter().map(|&p| p + 1).collect());
            return self.found.len() < self.limit;
        }
        let remaining = self.pattern.len() - k;
        if self.curves.len() < remaining {
            return true;
        }
        let class = self.pattern.classes[k];
        for pos in start..=self.curves.len() - remaining {
            self.steps += 1;
            if self.steps > SEARCH_STEPS {
                return false;
            }
            let c = self.curves[pos];
            let fresh = match self.assigned[class] {
                Some(existing) if existing != c => continue,
                Some(_) => false,
                None => {
                    let consistent = self.assigned.iter().enumerate().all(|(other, d)| match d {
                        Some(d) => self
                            .pattern
                            .constraint(class, other)
                            .is_none_or(|con| con.admits(&intersection(c, d))),
                        None => true,
                    });
                    if !consistent {
                        continue;
                    }
                    true
                }
            };
            if fresh {
                self.assigned[class] = Some(c);
            }
            self.chosen.push(pos);
            let go_on = self.extend(pos + 1);
            self.chosen.pop();
            if fresh {
                self.assigned[class] = None;
            }
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// The braid `σ₂σ₁²σ₄` on five strands.
pub fn transform_5cycle_word() -> BraidWord {
    BraidWord::new(5, vec![2, 1, 1, 4]).expect("valid word")
}

/// Sends `(a, b, a, b, a)` with `i(a, b) = 1` to `(b, b, T_a b, T_b a, b)`,
/// whose middle pair meets twice.
pub fn transform_5cycle(sub: &[TwistPower]) -> Result<Vec<TwistPower>, CertifyError> {
    let f = Factorization::disk(sub.to_vec());
    if sub.len() != 5 || find_pattern(&f, &SpiderPattern::alternating(5), Some(1)).is_empty() {
        return Err(CertifyError::ProfileMismatch);
    }
    let mut out = sub.to_vec();
    act_on_entries(&mut out, &transform_5cycle_word())?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// A pair meeting at least twice, exchanged directly.
    S1,
    /// Alternating windows prepared by the five-entry transform.
    S2,
    /// The `(a, b, b, a, a, b, b, a)` pattern, prepared into S2 shape.
    S3,
    /// Self fiber sum with the second copy conjugated by one of its twists.
    #[serde(rename = "auroux")]
    Auroux,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::S1 => "S1",
            Strategy::S2 => "S2",
            Strategy::S3 => "S3",
            Strategy::Auroux => "auroux",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfinityCertificate {
    pub strategy: Strategy,
    /// The factorization being certified.
    pub factorization: Factorization,
    /// 1-based positions of the sub-tuple.
    pub positions: Vec<usize>,
    /// Braid on the sub-tuple applied once before iterating `sigma`.
    pub preparation: BraidWord,
    pub sigma: BraidWord,
    /// Sub-tuple positions left untouched that fix the conjugation
    /// ambiguity on a sphere.
    pub marking: Vec<usize>,
    pub invariant: String,
    /// Distinctness is checked for `σᵏ`, `0 ≤ k ≤ bound`.
    pub bound: usize,
    /// For fiber-sum certificates: `(i, j)` with `i(δᵢ, δⱼ) ≥ 1` in the
    /// summand, where block two is conjugated by `T_{δᵢ}`.
    pub witness_pair: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub distinct_keys: usize,
    /// `i(δⱼ, T_{δᵢ}ᵏ δⱼ)` for `k = 0..=bound` on fiber-sum certificates.
    pub growth: Option<Vec<BigInt>>,
}

impl InfinityCertificate {
    fn sub_tuple(&self) -> Result<Vec<TwistPower>, CertifyError> {
        let entries = self.factorization.entries();
        let increasing = self.positions.windows(2).all(|w| w[0] < w[1]);
        if !increasing || self.positions.iter().any(|&p| p == 0 || p > entries.len()) {
            return Err(CertifyError::Malformed(
                "positions must increase within range".into(),
            ));
        }
        let k = self.positions.len();
        if self.preparation.strands() != k || self.sigma.strands() != k {
            return Err(CertifyError::Malformed(
                "braid strand count differs from sub-tuple".into(),
            ));
        }
        if self.marking.iter().any(|&m| m == 0 || m > k) {
            return Err(CertifyError::Malformed("marking outside sub-tuple".into()));
        }
        Ok(self
            .positions
            .iter()
            .map(|&p| entries[p - 1].clone())
            .collect())
    }

    fn keyed(&self, entries: Vec<TwistPower>) -> Factorization {
        match self.factorization.base() {
            Base::Disk => Factorization::disk(entries),
            Base::Sphere => Factorization::sub_spider(entries),
        }
    }

    /// Recomputes every key from the stored factorization.
    pub fn replay(&self) -> Result<ReplayReport, CertifyError> {
        let mut current = self.sub_tuple()?;
        act_on_entries(&mut current, &self.preparation)?;
        let witness = self
            .witness_pair
            .map(|p| self.growth_witness(p))
            .transpose()?;
        let mut seen = HashSet::with_capacity(self.bound + 1);
        let mut growth = Vec::new();
        for k in 0..=self.bound {
            if !seen.insert(key(&self.keyed(current.clone()))) {
                return Err(CertifyError::ReplayFailed(format!(
                    "σ^{k} repeats an earlier key"
                )));
            }
            if let Some((j, n, unit)) = &witness {
                let value = intersection(current[*j].curve(), current[n + j].curve());
                let expected = unit * BigInt::from(k);
                if value != expected {
                    return Err(CertifyError::ReplayFailed(format!(
                        "intersection {value} at k = {k}, expected {expected}"
                    )));
                }
                growth.push(value);
            }
            act_on_entries(&mut current, &self.sigma)?;
        }
        let growth = witness.map(|_| growth);
        if let Some(g) = &growth {
            if g.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CertifyError::ReplayFailed(
                    "growth is not strictly increasing".into(),
                ));
            }
        }
        Ok(ReplayReport {
            distinct_keys: seen.len(),
            growth,
        })
    }

    /// `(j − 1, n, i(δᵢ, δⱼ)²)` for the fiber-sum growth check.
    fn growth_witness(
        &self,
        (i, j): (usize, usize),
    ) -> Result<(usize, usize, BigInt), CertifyError> {
        let entries = self.factorization.entries();
        let n = entries.len() / 2;
        if !entries.len().is_multiple_of(2) || i == 0 || j == 0 || i > n || j > n || i == j {
            return Err(CertifyError::Malformed("witness pair out of range".into()));
        }
        let m = intersection(entries[i - 1].curve(), entries[j - 1].curve());
        if m.is_zero() {
            return Err(CertifyError::Malformed(
                "witness curves are disjoint".into(),
            ));
        }
        Ok((j - 1, n, &m * &m))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CertificateFile::from(self)).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CertifyError> {
        let file: CertificateFile =
            serde_json::from_str(text).map_err(|e| CertifyError::Malformed(e.to_string()))?;
        file.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    strategy: Strategy,
    factorization: Factorization,
    positions: Vec<usize>,
    preparation: String,
    sigma: String,
    marking: Vec<usize>,
    invariant: String,
    bound: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness_pair: Option<(usize, usize)>,
}

impl From<&InfinityCertificate> for CertificateFile {
    fn from(c: &InfinityCertificate) -> Self {
        Self {
            strategy: c.strategy,
            factorization: c.factorization.clone(),
            positions: c.positions.clone(),
            preparation: c.preparation.to_string(),
            sigma: c.sigma.to_string(),
            marking: c.marking.clone(),
            invariant: c.invariant.clone(),
            bound: c.bound,
            witness_pair: c.witness_pair,
        }
    }
}

impl TryFrom<CertificateFile> for InfinityCertificate {
    type Error = CertifyError;

    fn try_from(file: CertificateFile) -> Result<Self, CertifyError> {
        let k = file.positions.len();
        Ok(Self {
            strategy: file.strategy,
            factorization: file.factorization,
            preparation: BraidWord::parse(k, &file.preparation)?,
            sigma: BraidWord::parse(k, &file.sigma)?,
            positions: file.positions,
            marking: file.marking,
            invariant: file.invariant,
            bound: file.bound,
            witness_pair: file.witness_pair,
        })
    }
}

struct Recipe {
    strategy: Strategy,
    layout: &'static str,
    constraint: Constraint,
    preparation: &'static [i32],
    sigma: i32,
    marking: &'static [usize],
    invariant: &'static str,
}

const EXCHANGE: &str = "exchanged pair meets at least twice, so σ acts with infinite order on it";

const DISK_RECIPES: &[Recipe] = &[
    Recipe {
        strategy: Strategy::S1,
        layout: "ab",
        constraint: Constraint::AtLeast(2),
        preparation: &[],
        sigma: 1,
        marking: &[],
        invariant: EXCHANGE,
    },
    Recipe {
        strategy: Strategy::S2,
        layout: "ababa",
        constraint: Constraint::Exactly(1),
        preparation: &[2, 1, 1, 4],
        sigma: 3,
        marking: &[],
        invariant:
            "s2 s1^2 s4 turns (a,b,a,b,a) into (b,b,T_a b,T_b a,b); the middle pair meets twice",
    },
];

const SPHERE_RECIPES: &[Recipe] = &[
    Recipe {
        strategy: Strategy::S1,
        layout: "abab",
        constraint: Constraint::AtLeast(2),
        preparation: &[],
        sigma: 1,
        marking: &[3, 4],
        invariant: "exchanged pair meets at least twice; the repeated pair fixes conjugation",
    },
    Recipe {
        strategy: Strategy::S2,
        layout: "ababababab",
        constraint: Constraint::Exactly(1),
        preparation: &[2, 1, 1, 4, 7, 6, 6, 9],
        sigma: 3,
        marking: &[8, 9],
        invariant: "five-entry transform on both windows; pair 3,4 meets twice, pair 8,9 fixes conjugation",
    },
    Recipe {
        strategy: Strategy::S3,
        layout: "abbaabba",
        constraint: Constraint::Exactly(1),
        preparation: &[5, 4, 4, 7, -5, -4, 3],
        sigma: 6,
        marking: &[1, 2],
        invariant: "s5^-1 s4^-1 s3 exposes an alternating window at 4..8, whose transform leaves pair 6,7 meeting twice; pair 1,2 fixes conjugation",
    },
];

/// Tries S1, S2, S3 in order and replays the first certificate found.
/// `Ok(None)` means no strategy applies; a certificate that fails replay
/// is an error.
pub fn certify_infinite(
    f: &Factorization,
    bound: usize,
) -> Result<Option<InfinityCertificate>, CertifyError> {
    if !f.is_lefschetz() {
        return Err(CertifyError::NotLefschetz);
    }
    let recipes = match f.base() {
        Base::Disk => DISK_RECIPES,
        Base::Sphere => SPHERE_RECIPES,
    };
    for r in recipes {
        let pattern = SpiderPattern::from_layout(r.layout, &[('a', 'b', r.constraint)])?;
        let Some(positions) = find_pattern(f, &pattern, Some(1)).pop() else {
            continue;
        };
        let k = positions.len();
        let cert = InfinityCertificate {
            strategy: r.strategy,
            factorization: f.clone(),
            positions,
            preparation: BraidWord::new(k, r.preparation.to_vec())?,
            sigma: BraidWord::new(k, vec![r.sigma])?,
            marking: r.marking.to_vec(),
            invariant: r.invariant.to_string(),
            bound,
            witness_pair: None,
        };
        cert.replay()?;
        return Ok(Some(cert));
    }
    Ok(None)
}

/// `σ_{n−1} ⋯ σ₁` (σ₁ first) followed by the rotation `σ₁ ⋯ σ_{n−1}`: when
/// the product is central, this conjugates the whole tuple by its first
/// entry.
fn conjugate_by_first(n: usize) -> Result<BraidWord, BraidError> {
    let c1: Vec<i32> = (1..n as i32).rev().collect();
    rotation(n)?.then_after(&BraidWord::new(n, c1)?)
}

/// `(x₁, …, xₙ) ↦ (xₙ, x₁, …, xₙ₋₁)` for a tuple with central product.
fn rotation(n: usize) -> Result<BraidWord, BraidError> {
    BraidWord::new(n, (1..n as i32).collect())
}

/// Braid on `n` strands conjugating a central-product tuple by entry `i`.
pub fn conjugation_braid(n: usize, i: usize) -> Result<BraidWord, BraidError> {
    let r = rotation(n)?;
    let m = ((n - i + 1) % n) as u32;
    r.pow(m)
        .inverse()
        .then_after(&conjugate_by_first(n)?)?
        .then_after(&r.pow(m))
}

/// Self fiber sum `f # f` with the braid conjugating the second copy by
/// `T_{δᵢ}` for the first intersecting pair `(δᵢ, δⱼ)` of `f`.
pub fn auroux_divergence(
    f: &Factorization,
    g: &Factorization,
    bound: usize,
) -> Result<Option<InfinityCertificate>, CertifyError> {
    if f != g {
        return Err(CertifyError::NotSelfSum);
    }
    let n = f.len();
    let entries = f.entries();
    let pair = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && !intersection(entries[i].curve(), entries[j].curve()).is_zero());
    let Some((i, j)) = pair else {
        return Ok(None);
    };
    let product = f.total_product();
    if !(product.is_identity() || *product == IntMatrix2::neg_identity()) {
        return Err(CertifyError::NotCentral);
    }
    let sum = fiber_sum(f, g)?;
    let beta = conjugation_braid(n, i + 1)?.shifted(n, 2 * n)?;
    let cert = InfinityCertificate {
        strategy: Strategy::Auroux,
        factorization: sum,
        positions: (1..=2 * n).collect(),
        preparation: BraidWord::identity(2 * n),
        sigma: beta,
        marking: (1..=n).collect(),
        invariant: "i(δj, T_δi^k δj) = k·i(δi, δj)^2 between entry j and entry n+j".to_string(),
        bound,
        witness_pair: Some((i + 1, j + 1)),
    };
    cert.replay()?;
    Ok(Some(cert))
}
