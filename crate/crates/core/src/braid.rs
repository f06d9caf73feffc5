//! Braid words and the Artin action on free groups.
//!
//! Letters are signed generator indices: `+i` is `σᵢ`, `−i` is `σᵢ⁻¹`. Words
//! act rightmost letter first, so `(b₁b₂)·x = b₁·(b₂·x)`.
//!
//! The Artin representation is faithful, which gives a word problem for
//! `Bₙ`: two words are equal iff they induce the same automorphism of the
//! free group `Fₙ = ⟨x₁, …, xₙ⟩`, where
//!
//! ```text
//! σᵢ:  xᵢ ↦ xᵢ xᵢ₊₁ xᵢ⁻¹,   xᵢ₊₁ ↦ xᵢ
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Default cap on the total letter count of free-group images.
pub const DEFAULT_FREE_LENGTH_BUDGET: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("generator index {index} out of range for {strands} strands")]
    IndexOutOfRange { index: usize, strands: usize },
    #[error("strand count mismatch: expected {expected}, found {found}")]
    StrandMismatch { expected: usize, found: usize },
    #[error("free group rank {rank} does not match {strands} strands")]
    RankMismatch { rank: usize, strands: usize },
    #[error("braid needs at least one strand")]
    NoStrands,
    #[error("free word length exceeded budget of {0} letters")]
    LengthBudget(usize),
    #[error("cannot parse braid word: {0}")]
    Parse(String),
}

/// A word in the Artin generators `σ₁, …, σₙ₋₁` of `Bₙ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        if strands == 0 {
            return Err(BraidError::NoStrands);
        }
        for &l in &letters {
            let index = l.unsigned_abs() as usize;
            if l == 0 || index >= strands {
                return Err(BraidError::IndexOutOfRange { index, strands });
            }
        }
        Ok(Self { strands, letters })
    }

    pub fn identity(strands: usize) -> Self {
        Self {
            strands,
            letters: Vec::new(),
        }
    }

    /// `σᵢ^power` as a word.
    pub fn generator_power(strands: usize, index: usize, power: i32) -> Result<Self, BraidError> {
        let letter = if power < 0 {
            -(index as i32)
        } else {
            index as i32
        };
        Self::new(strands, vec![letter; power.unsigned_abs() as usize])
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    /// The product `self · other` (apply `other` first).
    pub fn then_after(&self, other: &BraidWord) -> Result<Self, BraidError> {
        if self.strands != other.strands {
            return Err(BraidError::StrandMismatch {
                expected: self.strands,
                found: other.strands,
            });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Self {
            strands: self.strands,
            letters,
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        Self {
            strands: self.strands,
            letters: self.letters.repeat(k as usize),
        }
    }

    /// Word with adjacent `σᵢσᵢ⁻¹` pairs cancelled.
    pub fn freely_reduced(&self) -> Self {
        Self {
            strands: self.strands,
            letters: free_reduce(&self.letters),
        }
    }

    /// Re-embeds the word on a larger strand set, shifting every generator
    /// index by `offset`.
    pub fn shifted(&self, offset: usize, strands: usize) -> Result<Self, BraidError> {
        let letters = self
            .letters
            .iter()
            .map(|&l| l.signum() * (l.abs() + offset as i32))
            .collect();
        Self::new(strands, letters)
    }

    /// Induced permutation: entry `k` is the original (1-based) strand that
    /// ends up in position `k + 1`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut arrangement: Vec<usize> = (1..=self.strands).collect();
        for &l in self.letters.iter().rev() {
            let i = l.unsigned_abs() as usize;
            arrangement.swap(i - 1, i);
        }
        arrangement
    }

    /// Parses whitespace-separated tokens `s<i>` or `s<i>^<k>`; `1` or an
    /// empty string is the identity.
    pub fn parse(strands: usize, text: &str) -> Result<Self, BraidError> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (base, power) = match token.split_once('^') {
                Some((b, p)) => {
                    let p: i32 = p
                        .parse()
                        .map_err(|_| BraidError::Parse(format!("bad exponent in {token:?}")))?;
                    (b, p)
                }
                None => (token, 1),
            };
            let index: i32 = base
                .strip_prefix('s')
                .and_then(|s| s.parse().ok())
                .filter(|&i: &i32| i > 0)
                .ok_or_else(|| BraidError::Parse(format!("bad generator {token:?}")))?;
            let letter = if power < 0 { -index } else { index };
            letters.extend(std::iter::repeat_n(letter, power.unsigned_abs() as usize));
        }
        Self::new(strands, letters)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        let mut rest = &self.letters[..];
        while let Some(&l) = rest.first() {
            let run = rest.iter().take_while(|&&x| x == l).count();
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let power = run as i64 * l.signum() as i64;
            if power == 1 {
                write!(f, "s{}", l.abs())?;
            } else {
                write!(f, "s{}^{}", l.abs(), power)?;
            }
            rest = &rest[run..];
        }
        Ok(())
    }
}

/// A freely reduced word in the free group of the given rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<i32>,
}

impl FreeWord {
    /// Builds and freely reduces a word; letters are `±1..=±rank`.
    pub fn new(rank: usize, letters: &[i32]) -> Result<Self, BraidError> {
        for &l in letters {
            let index = l.unsigned_abs() as usize;
            if l == 0 || index > rank {
                return Err(BraidError::IndexOutOfRange {
                    index,
                    strands: rank,
                });
            }
        }
        Ok(Self {
            rank,
            letters: free_reduce(letters),
        })
    }

    pub fn generator(rank: usize, index: usize) -> Self {
        Self {
            rank,
            letters: vec![index as i32],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&l| {
                if l > 0 {
                    format!("x{l}")
                } else {
                    format!("x{}^-1", -l)
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Cancels adjacent inverse pairs until none remain.
pub fn free_reduce(letters: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn invert(letters: &[i32]) -> impl Iterator<Item = i32> + '_ {
    letters.iter().rev().map(|l| -l)
}

/// Images `φ_b(x₁), …, φ_b(xₙ)` of the free generators under the Artin
/// automorphism of `b`.
pub fn artin_images(b: &BraidWord, budget: usize) -> Result<Vec<Vec<i32>>, BraidError> {
    let n = b.strands;
    let mut images: Vec<Vec<i32>> = (1..=n as i32).map(|j| vec![j]).collect();
    // accumulate M ∘ φ_l left to right, so only two images change per letter
    for &l in &b.letters {
        let i = l.unsigned_abs() as usize - 1;
        let (xi, xj) = (images[i].clone(), images[i + 1].clone());
        let (new_i, new_j) = if l > 0 {
            let mut w = xi.clone();
            w.extend_from_slice(&xj);
            w.extend(invert(&xi));
            (free_reduce(&w), xi)
        } else {
            let mut w: Vec<i32> = invert(&xj).collect();
            w.extend_from_slice(&xi);
            w.extend_from_slice(&xj);
            (xj, free_reduce(&w))
        };
        images[i] = new_i;
        images[i + 1] = new_j;
        let total: usize = images.iter().map(Vec::len).sum();
        if total > budget {
            return Err(BraidError::LengthBudget(budget));
        }
    }
    Ok(images)
}

pub fn artin_act(b: &BraidWord, w: &FreeWord) -> Result<FreeWord, BraidError> {
    artin_act_with_budget(b, w, DEFAULT_FREE_LENGTH_BUDGET)
}

pub fn artin_act_with_budget(
    b: &BraidWord,
    w: &FreeWord,
    budget: usize,
) -> Result<FreeWord, BraidError> {
    if b.strands != w.rank {
        return Err(BraidError::RankMismatch {
            rank: w.rank,
            strands: b.strands,
        });
    }
    let images = artin_images(b, budget)?;
    let mut out = Vec::new();
    for &l in &w.letters {
        let image = &images[l.unsigned_abs() as usize - 1];
        if l > 0 {
            out.extend_from_slice(image);
        } else {
            out.extend(invert(image));
        }
        if out.len() > budget {
            return Err(BraidError::LengthBudget(budget));
        }
    }
    Ok(FreeWord {
        rank: w.rank,
        letters: free_reduce(&out),
    })
}

/// Equality in `Bₙ`, decided through the faithful Artin representation.
pub fn braid_equal(b1: &BraidWord, b2: &BraidWord) -> Result<bool, BraidError> {
    if b1.strands != b2.strands {
        return Err(BraidError::StrandMismatch {
            expected: b1.strands,
            found: b2.strands,
        });
    }
    let quotient = b1.then_after(&b2.inverse())?.freely_reduced();
    let images = artin_images(&quotient, DEFAULT_FREE_LENGTH_BUDGET)?;
    Ok(images
        .iter()
        .enumerate()
        .all(|(j, w)| w.as_slice() == [j as i32 + 1]))
}

fn check_pair(i: usize, j: usize, n: usize) -> Result<(), BraidError> {
    if i == 0 || i >= j {
        return Err(BraidError::IndexOutOfRange {
            index: i,
            strands: n,
        });
    }
    if j > n {
        return Err(BraidError::IndexOutOfRange {
            index: j,
            strands: n,
        });
    }
    Ok(())
}

/// The half-twist `σᵢⱼ` exchanging punctures `i < j`:
/// `P σᵢ P⁻¹` with `P = σⱼ₋₁ ⋯ σᵢ₊₁`.
pub fn halftwist_word(i: usize, j: usize, n: usize) -> Result<BraidWord, BraidError> {
    check_pair(i, j, n)?;
    let prefix: Vec<i32> = (i + 1..j).rev().map(|k| k as i32).collect();
    let mut letters = prefix.clone();
    letters.push(i as i32);
    letters.extend(invert(&prefix));
    BraidWord::new(n, letters)
}

/// The standard pure braid generator `Aᵢⱼ = σᵢⱼ²`.
pub fn pure_braid_generator(i: usize, j: usize, n: usize) -> Result<BraidWord, BraidError> {
    Ok(halftwist_word(i, j, n)?.pow(2).freely_reduced())
}

impl FromStr for FreeWord {
    type Err = BraidError;

    /// Parses `x1 x2^-1 …`; the rank is the largest index present.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for token in s.split_whitespace() {
            let (base, power) = match token.split_once('^') {
                Some((b, p)) => (
                    b,
                    p.parse::<i32>()
                        .map_err(|_| BraidError::Parse(format!("bad exponent in {token:?}")))?,
                ),
                None => (token, 1),
            };
            let index: i32 = base
                .strip_prefix('x')
                .and_then(|s| s.parse().ok())
                .filter(|&i: &i32| i > 0)
                .ok_or_else(|| BraidError::Parse(format!("bad generator {token:?}")))?;
            let letter = if power < 0 { -index } else { index };
            letters.extend(std::iter::repeat_n(letter, power.unsigned_abs() as usize));
        }
        let rank = letters
            .iter()
            .map(|l| l.unsigned_abs() as usize)
            .max()
            .unwrap_or(1);
        FreeWord::new(rank, &letters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bw(n: usize, s: &str) -> BraidWord {
        BraidWord::parse(n, s).unwrap()
    }

    #[test]
    fn reduction() {
        assert_eq!(free_reduce(&[1, 2, -2]), vec![1]);
        assert_eq!(free_reduce(&[]), Vec::<i32>::new());
        assert_eq!(free_reduce(&[1, -1, 1]), vec![1]);
        assert_eq!(free_reduce(&[2, 1, -1, -2, 3]), vec![3]);
    }

    #[test]
    fn generator_action() {
        let x1 = FreeWord::generator(2, 1);
        let img = artin_act(&bw(2, "s1"), &x1).unwrap();
        assert_eq!(img.letters(), &[1, 2, -1]);
        let w = FreeWord::new(3, &[1, -3, 2, 2]).unwrap();
        assert_eq!(artin_act(&BraidWord::identity(3), &w).unwrap(), w);
        let x2 = FreeWord::generator(2, 2);
        assert_eq!(artin_act(&bw(2, "s1 s1^-1"), &x2).unwrap(), x2);
        assert_eq!(artin_act(&bw(2, "s1^-1"), &x1).unwrap().letters(), &[2]);
    }

    #[test]
    fn rank_mismatch_is_an_error() {
        let w = FreeWord::generator(3, 1);
        assert!(matches!(
            artin_act(&bw(2, "s1"), &w),
            Err(BraidError::RankMismatch { .. })
        ));
    }

    #[test]
    fn length_budget_aborts() {
        let w = FreeWord::generator(3, 1);
        let long = bw(3, "s1 s2^-1").pow(40);
        assert_eq!(
            artin_act_with_budget(&long, &w, 1000),
            Err(BraidError::LengthBudget(1000))
        );
    }

    #[test]
    fn equality() {
        assert!(braid_equal(&bw(3, "s1 s2 s1"), &bw(3, "s2 s1 s2")).unwrap());
        assert!(!braid_equal(&bw(3, "s1"), &BraidWord::identity(3)).unwrap());
        let s13 = halftwist_word(1, 3, 3).unwrap();
        let s1c = bw(3, "s1^3");
        let lhs = s13.then_after(&s1c).unwrap().pow(3);
        let rhs = s1c.then_after(&s13).unwrap().pow(3);
        assert!(braid_equal(&lhs, &rhs).unwrap());
        assert!(braid_equal(&bw(2, "s1"), &bw(3, "s1")).is_err());
    }

    #[test]
    fn halftwists() {
        assert_eq!(halftwist_word(1, 2, 3).unwrap(), bw(3, "s1"));
        assert_eq!(halftwist_word(1, 3, 3).unwrap(), bw(3, "s2 s1 s2^-1"));
        assert_eq!(halftwist_word(2, 4, 4).unwrap(), bw(4, "s3 s2 s3^-1"));
        assert_eq!(
            halftwist_word(1, 4, 5).unwrap(),
            bw(5, "s3 s2 s1 s2^-1 s3^-1")
        );
        assert!(halftwist_word(2, 2, 4).is_err());
        assert!(halftwist_word(1, 5, 4).is_err());
        assert!(halftwist_word(0, 2, 4).is_err());
    }

    #[test]
    fn halftwist_permutation_is_a_transposition() {
        for n in 2..=8 {
            for i in 1..n {
                for j in i + 1..=n {
                    let perm = halftwist_word(i, j, n).unwrap().permutation();
                    let mut expected: Vec<usize> = (1..=n).collect();
                    expected.swap(i - 1, j - 1);
                    assert_eq!(perm, expected, "σ_{i}{j} in B_{n}");
                }
            }
        }
    }

    #[test]
    fn pure_generators() {
        assert_eq!(pure_braid_generator(1, 2, 2).unwrap(), bw(2, "s1^2"));
        assert_eq!(
            pure_braid_generator(1, 3, 3).unwrap(),
            bw(3, "s2 s1^2 s2^-1")
        );
        assert_eq!(pure_braid_generator(2, 3, 3).unwrap(), bw(3, "s2^2"));
        for n in 2..=6 {
            for i in 1..n {
                for j in i + 1..=n {
                    let a = pure_braid_generator(i, j, n).unwrap();
                    assert_eq!(a.permutation(), (1..=n).collect::<Vec<_>>());
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let b = bw(4, "s1 s2^-1 s1^3");
        assert_eq!(b.letters(), &[1, -2, 1, 1, 1]);
        assert_eq!(b.to_string(), "s1 s2^-1 s1^3");
        assert_eq!(BraidWord::identity(3).to_string(), "1");
        assert_eq!(bw(3, "1"), BraidWord::identity(3));
        assert!(BraidWord::parse(3, "s3").is_err());
        assert!(BraidWord::parse(3, "t1").is_err());
        assert!(BraidWord::parse(3, "s1^x").is_err());
        let w: FreeWord = "x1 x2^-1 x2 x3".parse().unwrap();
        assert_eq!(w.letters(), &[1, 3]);
    }

    #[test]
    fn artin_relations_hold_up_to_eight_strands() {
        for n in 2..=8 {
            for i in 1..n {
                let gi = bw(n, &format!("s{i}"));
                if i + 1 < n {
                    let lhs = bw(n, &format!("s{i} s{} s{i}", i + 1));
                    let rhs = bw(n, &format!("s{} s{i} s{}", i + 1, i + 1));
                    assert!(braid_equal(&lhs, &rhs).unwrap());
                }
                for j in i + 2..n {
                    let gj = bw(n, &format!("s{j}"));
                    let lhs = gi.then_after(&gj).unwrap();
                    let rhs = gj.then_after(&gi).unwrap();
                    assert!(braid_equal(&lhs, &rhs).unwrap());
                }
            }
        }
    }

    fn word(n: usize) -> impl proptest::strategy::Strategy<Value = BraidWord> {
        use proptest::prelude::*;
        let letter = (1..n as i32, any::<bool>()).prop_map(|(i, s)| if s { i } else { -i });
        proptest::collection::vec(letter, 0..8).prop_map(move |l| BraidWord::new(n, l).unwrap())
    }

    proptest::proptest! {
        #[test]
        fn artin_action_is_a_left_action(b1 in word(4), b2 in word(4), w in proptest::collection::vec(proptest::prop_oneof![1..=4i32, -4..=-1i32], 0..6)) {
            let w = FreeWord::new(4, &w).unwrap();
            let composed = artin_act(&b1.then_after(&b2).unwrap(), &w).unwrap();
            let stepwise = artin_act(&b1, &artin_act(&b2, &w).unwrap()).unwrap();
            proptest::prop_assert_eq!(composed, stepwise);
        }

        #[test]
        fn inverse_cancels(b in word(5)) {
            let e = b.then_after(&b.inverse()).unwrap();
            proptest::prop_assert!(braid_equal(&e, &BraidWord::identity(5)).unwrap());
            proptest::prop_assert!(e.freely_reduced().is_empty());
        }
    }
}
