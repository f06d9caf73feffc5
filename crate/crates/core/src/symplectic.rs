//! Homological shadow of the hyperelliptic relations in `Sp(2g, Z)`.
//!
//! Homology of `Σ_g` uses the ordered basis `x₁, y₁, …, x_g, y_g` with
//! `⟨xᵢ, yᵢ⟩ = 1`. A Dehn twist about a curve of class `v` acts as the
//! transvection `w ↦ w + ⟨w, v⟩ v`, which in genus one is exactly the
//! torus twist convention used by [`crate::sl2`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplecticError {
    #[error("genus must be at least 1")]
    ZeroGenus,
    #[error("transvection vector must be nonzero")]
    ZeroVector,
    #[error("vector of length {found} does not live in genus {genus} homology")]
    Dimension { genus: usize, found: usize },
    #[error("unknown relation {0:?} (expected eta1, eta2 or eta3)")]
    UnknownRelation(String),
}

/// The three hyperelliptic relations:
///
/// * `Eta1`: `(a₁ ⋯ a₂g₊₁² ⋯ a₂ a₁)² = 1`
/// * `Eta2`: `(a₁ ⋯ a₂g)^{2(2g+1)} = 1`
/// * `Eta3`: `(a₁ ⋯ a₂g₊₁)^{2g+2} = 1`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eta1,
    Eta2,
    Eta3,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Eta1, Relation::Eta2, Relation::Eta3];
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eta1 => "eta1",
            Relation::Eta2 => "eta2",
            Relation::Eta3 => "eta3",
        })
    }
}

impl FromStr for Relation {
    type Err = SymplecticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eta1" => Ok(Relation::Eta1),
            "eta2" => Ok(Relation::Eta2),
            "eta3" => Ok(Relation::Eta3),
            _ => Err(SymplecticError::UnknownRelation(s.to_string())),
        }
    }
}

/// The relation as a sequence of chain indices `1..=2g+1`, leftmost first.
pub fn relation_word(relation: Relation, genus: usize) -> Vec<usize> {
    let top = 2 * genus + 1;
    match relation {
        Relation::Eta1 => {
            let mut half: Vec<usize> = (1..=top).collect();
            half.push(top);
            half.extend((1..top).rev());
            half.repeat(2)
        }
        Relation::Eta2 => (1..top).collect::<Vec<_>>().repeat(2 * top),
        Relation::Eta3 => (1..=top).collect::<Vec<_>>().repeat(2 * genus + 2),
    }
}

/// Sign convention for transvections: `Standard` is `w ↦ w + ⟨w,v⟩v`,
/// `Opposite` is `w ↦ w − ⟨w,v⟩v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Convention {
    Standard,
    Opposite,
}

impl Convention {
    fn sign(self) -> i64 {
        match self {
            Convention::Standard => 1,
            Convention::Opposite => -1,
        }
    }
}

/// A `2g × 2g` integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpMatrix {
    genus: usize,
    entries: Vec<BigInt>,
}

impl SpMatrix {
    pub fn identity(genus: usize) -> Self {
        let n = 2 * genus;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigInt::one();
        }
        Self { genus, entries }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    fn dim(&self) -> usize {
        2 * self.genus
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.dim() + col]
    }

    pub fn mul(&self, other: &SpMatrix) -> SpMatrix {
        let n = self.dim();
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        SpMatrix {
            genus: self.genus,
            entries,
        }
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == SpMatrix::identity(self.genus)
    }

    /// `Mᵀ J M = J`, checked as `⟨Meᵢ, Meⱼ⟩ = ⟨eᵢ, eⱼ⟩` on basis vectors.
    pub fn is_symplectic(&self) -> bool {
        let n = self.dim();
        let cols: Vec<Vec<BigInt>> = (0..n)
            .map(|j| (0..n).map(|i| self.get(i, j).clone()).collect())
            .collect();
        let basis = |k: usize| -> Vec<BigInt> {
            (0..n)
                .map(|i| {
                    if i == k {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        };
        (0..n).all(|i| (0..n).all(|j| pairing(&cols[i], &cols[j]) == pairing(&basis(i), &basis(j))))
    }
}

/// The standard symplectic pairing `Σ (v_{xᵢ} w_{yᵢ} − v_{yᵢ} w_{xᵢ})`.
pub fn pairing(v: &[BigInt], w: &[BigInt]) -> BigInt {
    v.chunks(2)
        .zip(w.chunks(2))
        .map(|(a, b)| &a[0] * &b[1] - &a[1] * &b[0])
        .sum()
}

/// Homology class of the `index`-th curve of the standard chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainClass {
    pub index: usize,
    pub vector: Vec<BigInt>,
}

/// `[c₁] = x₁`, `[c₂ᵢ] = yᵢ`, `[c₂ᵢ₊₁] = xᵢ + xᵢ₊₁` (with `x_{g+1} = 0`).
pub fn chain_classes(genus: usize) -> Result<Vec<ChainClass>, SymplecticError> {
    if genus == 0 {
        return Err(SymplecticError::ZeroGenus);
    }
    let n = 2 * genus;
    let x = |i: usize| 2 * (i - 1);
    let y = |i: usize| 2 * (i - 1) + 1;
    let classes = (1..=2 * genus + 1)
        .map(|index| {
            let mut vector = vec![BigInt::zero(); n];
            if index == 1 {
                vector[x(1)] = BigInt::one();
            } else if index % 2 == 0 {
                vector[y(index / 2)] = BigInt::one();
            } else {
                let i = (index - 1) / 2;
                vector[x(i)] = BigInt::one();
                if i < genus {
                    vector[x(i + 1)] = BigInt::one();
                }
            }
            ChainClass { index, vector }
        })
        .collect();
    Ok(classes)
}

pub fn transvection(v: &[BigInt], genus: usize) -> Result<SpMatrix, SymplecticError> {
    transvection_with(v, genus, Convention::Standard)
}

pub fn transvection_with(
    v: &[BigInt],
    genus: usize,
    convention: Convention,
) -> Result<SpMatrix, SymplecticError> {
    if genus == 0 {
        return Err(SymplecticError::ZeroGenus);
    }
    let n = 2 * genus;
    if v.len() != n {
        return Err(SymplecticError::Dimension {
            genus,
            found: v.len(),
        });
    }
    if v.iter().all(Zero::is_zero) {
        return Err(SymplecticError::ZeroVector);
    }
    let mut m = SpMatrix::identity(genus);
    let sign = BigInt::from(convention.sign());
    for col in 0..n {
        // ⟨e_col, v⟩
        let coeff = if col % 2 == 0 {
            v[col + 1].clone()
        } else {
            -&v[col - 1]
        };
        if coeff.is_zero() {
            continue;
        }
        let coeff = coeff * &sign;
        for (row, x) in v.iter().enumerate() {
            m.entries[row * n + col] += &coeff * x;
        }
    }
    Ok(m)
}

/// Product of the relation's transvections, leftmost first.
pub fn relation_product(
    relation: Relation,
    genus: usize,
    convention: Convention,
) -> Result<SpMatrix, SymplecticError> {
    let classes = chain_classes(genus)?;
    let twists = classes
        .iter()
        .map(|c| transvection_with(&c.vector, genus, convention))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(relation_word(relation, genus)
        .iter()
        .fold(SpMatrix::identity(genus), |acc, &k| acc.mul(&twists[k - 1])))
}

pub fn verify_relation(relation: Relation, genus: usize) -> Result<bool, SymplecticError> {
    verify_relation_with(relation, genus, Convention::Standard)
}

pub fn verify_relation_with(
    relation: Relation,
    genus: usize,
    convention: Convention,
) -> Result<bool, SymplecticError> {
    Ok(relation_product(relation, genus, convention)?.is_identity())
}

/// Global conventions under which every relation holds at every listed genus.
pub fn passing_conventions(genera: &[usize]) -> Result<Vec<Convention>, SymplecticError> {
    let mut out = Vec::new();
    for convention in [Convention::Standard, Convention::Opposite] {
        let mut all = true;
        for &g in genera {
            for r in Relation::ALL {
                all &= verify_relation_with(r, g, convention)?;
            }
        }
        if all {
            out.push(convention);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Pairing pattern of a chain: `±1` on neighbours, `0` elsewhere.
    fn assert_chain_pattern(classes: &[ChainClass]) {
        for a in classes {
            for b in classes {
                let p = pairing(&a.vector, &b.vector);
                if a.index.abs_diff(b.index) == 1 {
                    assert!(
                        p == BigInt::one() || p == -BigInt::one(),
                        "{} {}",
                        a.index,
                        b.index
                    );
                } else {
                    assert!(p.is_zero(), "{} {}", a.index, b.index);
                }
            }
        }
    }

    #[test]
    fn chain_classes_form_a_chain() {
        let g1 = chain_classes(1).unwrap();
        let vs: Vec<_> = g1.iter().map(|c| c.vector.clone()).collect();
        assert_eq!(vs, vec![ints(&[1, 0]), ints(&[0, 1]), ints(&[1, 0])]);
        let g2 = chain_classes(2).unwrap();
        assert_eq!(g2[2].vector, ints(&[1, 0, 1, 0]));
        for g in 1..=5 {
            assert_chain_pattern(&chain_classes(g).unwrap());
        }
        assert!(pairing(&g2[0].vector, &g2[2].vector).is_zero());
        assert_eq!(chain_classes(0), Err(SymplecticError::ZeroGenus));
    }

    #[test]
    fn transvections() {
        let t = transvection(&ints(&[1, 0]), 1).unwrap();
        assert_eq!(t.entries, ints(&[1, -1, 0, 1]));
        let v = ints(&[2, -1, 3, 5]);
        let m = transvection(&v, 2).unwrap();
        assert_eq!(m.apply(&v), v);
        assert!(m.is_symplectic());
        assert_eq!(
            transvection(&ints(&[0, 0]), 1),
            Err(SymplecticError::ZeroVector)
        );
        assert!(transvection(&ints(&[1, 0]), 2).is_err());
    }

    #[test]
    fn relation_lengths() {
        for g in 1..=4 {
            assert_eq!(relation_word(Relation::Eta1, g).len(), 2 * (4 * g + 2));
            assert_eq!(
                relation_word(Relation::Eta2, g).len(),
                2 * g * 2 * (2 * g + 1)
            );
            assert_eq!(
                relation_word(Relation::Eta3, g).len(),
                (2 * g + 1) * (2 * g + 2)
            );
        }
        assert_eq!(relation_word(Relation::Eta1, 2).len(), 20);
        assert_eq!(relation_word(Relation::Eta2, 2).len(), 40);
        assert_eq!(relation_word(Relation::Eta3, 2).len(), 30);
    }

    #[test]
    fn relations_hold() {
        for g in 1..=4 {
            for r in Relation::ALL {
                assert!(verify_relation(r, g).unwrap(), "{r} at g={g}");
            }
        }
    }

    #[test]
    fn genus_one_matches_torus_twists() {
        let classes = chain_classes(1).unwrap();
        let ta = transvection(&classes[0].vector, 1).unwrap();
        let tb = transvection(&classes[1].vector, 1).unwrap();
        let ab = ta.mul(&tb);
        let mut cube = SpMatrix::identity(1);
        for _ in 0..3 {
            cube = cube.mul(&ab);
        }
        assert_eq!(cube.entries, ints(&[-1, 0, 0, -1]));
        assert!(cube.mul(&cube).is_identity());
    }

    #[test]
    fn products_stay_symplectic() {
        for g in 2..=3 {
            for r in Relation::ALL {
                let word = relation_word(r, g);
                let classes = chain_classes(g).unwrap();
                let mut acc = SpMatrix::identity(g);
                for k in word.iter().take(7) {
                    acc = acc.mul(&transvection(&classes[k - 1].vector, g).unwrap());
                    assert!(acc.is_symplectic());
                }
            }
        }
    }

    #[test]
    fn relation_names() {
        assert_eq!("eta2".parse::<Relation>().unwrap(), Relation::Eta2);
        assert!("eta4".parse::<Relation>().is_err());
    }
}
