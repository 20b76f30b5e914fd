//! Rank weight, sum-rank weight over block sequences, subspace distance and
//! Gaussian binomials.
//!
//! All ranks are taken over the base field, on the matrix image of a vector
//! under the basis map.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{BaseField, ExtElem, ExtField, Field};
use crate::matrix::BaseMatrix;

/// Rank of the `m x n` base-field image of `v`.
pub fn rank_weight(f: &ExtField, v: &[ExtElem]) -> usize {
    if v.iter().all(|&x| x == ExtElem::ZERO) {
        return 0;
    }
    f.ext_to_matrix(v).rank(f.base())
}

pub fn rank_distance(f: &ExtField, a: &[ExtElem], b: &[ExtElem]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let d: Vec<ExtElem> = a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect();
    Ok(rank_weight(f, &d))
}

/// A sequence of equal-length blocks over the extension field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockSequence {
    n: usize,
    blocks: Vec<Vec<ExtElem>>,
}

impl BlockSequence {
    pub fn new(n: usize, blocks: Vec<Vec<ExtElem>>) -> Result<Self> {
        if let Some(b) = blocks.iter().find(|b| b.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        Ok(BlockSequence { n, blocks })
    }

    pub fn zeros(n: usize, len: usize) -> Self {
        BlockSequence {
            n,
            blocks: vec![vec![ExtElem::ZERO; n]; len],
        }
    }

    pub fn block_len(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block(&self, i: usize) -> &[ExtElem] {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[Vec<ExtElem>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Vec<ExtElem>> {
        self.blocks
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }
}

pub fn sum_rank_weight(f: &ExtField, s: &BlockSequence) -> usize {
    s.blocks.iter().map(|b| rank_weight(f, b)).sum()
}

pub fn sum_rank_distance(f: &ExtField, s: &BlockSequence, t: &BlockSequence) -> Result<usize> {
    s.check_shape(t)?;
    let mut total = 0;
    for (a, b) in s.blocks.iter().zip(&t.blocks) {
        total += rank_distance(f, a, b)?;
    }
    Ok(total)
}

/// A subspace of `F_q^ambient`, stored by its reduced row echelon basis so
/// that equal subspaces compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: BaseMatrix,
}

impl Subspace {
    /// Row space of `a`.
    pub fn row_space(f: &BaseField, a: &BaseMatrix) -> Self {
        Subspace {
            ambient: a.cols(),
            basis: a.row_basis(f),
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: BaseMatrix::zeros(0, ambient),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &BaseMatrix {
        &self.basis
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        Ok(())
    }

    /// `U + V`.
    pub fn sum(&self, f: &BaseField, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        Ok(Subspace::row_space(f, &self.basis.vstack(&other.basis)))
    }

    pub fn intersection_dim(&self, f: &BaseField, other: &Self) -> Result<usize> {
        let s = self.sum(f, other)?;
        Ok(self.dim() + other.dim() - s.dim())
    }

    pub fn contains(&self, f: &BaseField, v: &[u16]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: v.len(),
            });
        }
        let row = BaseMatrix::from_vec(1, v.len(), v.to_vec());
        Ok(self.basis.vstack(&row).rank(f) == self.dim())
    }
}

/// `dim(U + V) - dim(U ∩ V)`.
pub fn subspace_distance(f: &BaseField, u: &Subspace, v: &Subspace) -> Result<usize> {
    let s = u.sum(f, v)?.dim();
    Ok(2 * s - u.dim() - v.dim())
}

/// Number of `r`-dimensional subspaces of `F_q^n`.
///
/// Uses the q-Pascal rule `[n r] = [n-1 r-1] + q^r [n-1 r]`, so every
/// intermediate is bounded by the result; overflow of `u128` is reported.
pub fn gaussian_binomial(q: u64, n: usize, r: usize) -> Result<u128> {
    if r > n {
        return Err(Error::InvalidParameters(format!("r = {r} exceeds n = {n}")));
    }
    let q = q as u128;
    let r = r.min(n - r);
    // row[j] = [i j] for the current i
    let mut row = vec![0u128; r + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=r.min(i)).rev() {
            let qj = q.checked_pow(j as u32).ok_or(Error::Overflow)?;
            row[j] = qj
                .checked_mul(row[j])
                .and_then(|v| v.checked_add(row[j - 1]))
                .ok_or(Error::Overflow)?;
        }
    }
    Ok(row[r])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf8() -> ExtField {
        ExtField::binary(3).unwrap()
    }

    #[test]
    fn rank_weight_examples() {
        let f = gf8();
        let a = f.alpha();
        assert_eq!(rank_weight(&f, &[ExtElem::ZERO; 3]), 0);
        assert_eq!(rank_weight(&f, &[f.one(), a, f.mul(a, a)]), 3);
        assert_eq!(rank_weight(&f, &[f.one(); 3]), 1);
    }

    #[test]
    fn sum_rank_examples() {
        let f = gf8();
        let a = f.alpha();
        let s = BlockSequence::new(
            3,
            vec![
                vec![f.one(), ExtElem::ZERO, f.one()],
                vec![a, a, ExtElem::ZERO],
            ],
        )
        .unwrap();
        assert_eq!(sum_rank_weight(&f, &s), 2);
        assert_eq!(sum_rank_weight(&f, &BlockSequence::zeros(3, 4)), 0);
        assert_eq!(sum_rank_distance(&f, &s, &s).unwrap(), 0);
        assert!(BlockSequence::new(3, vec![vec![a; 2]]).is_err());
        assert!(sum_rank_distance(&f, &s, &BlockSequence::zeros(3, 1)).is_err());
    }

    #[test]
    fn subspace_distance_examples() {
        let f = BaseField::binary();
        let e0 = Subspace::row_space(&f, &BaseMatrix::from_rows(2, &[vec![1, 0]]));
        let e1 = Subspace::row_space(&f, &BaseMatrix::from_rows(2, &[vec![0, 1]]));
        let all = Subspace::row_space(&f, &BaseMatrix::from_rows(2, &[vec![1, 1], vec![0, 1]]));
        assert_eq!(subspace_distance(&f, &e0, &e0).unwrap(), 0);
        assert_eq!(subspace_distance(&f, &e0, &e1).unwrap(), 2);
        assert_eq!(subspace_distance(&f, &e0, &all).unwrap(), 1);
        assert!(subspace_distance(&f, &e0, &Subspace::zero(3)).is_err());
        assert!(all.contains(&f, &[1, 0]).unwrap());
        assert!(!e1.contains(&f, &[1, 0]).unwrap());
    }

    #[test]
    fn row_space_is_canonical() {
        let f = BaseField::binary();
        let a = Subspace::row_space(
            &f,
            &BaseMatrix::from_rows(3, &[vec![1, 1, 0], vec![0, 1, 1]]),
        );
        let b = Subspace::row_space(
            &f,
            &BaseMatrix::from_rows(3, &[vec![1, 0, 1], vec![1, 1, 0], vec![0, 1, 1]]),
        );
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn gaussian_binomial_examples() {
        assert_eq!(gaussian_binomial(2, 5, 0).unwrap(), 1);
        assert_eq!(gaussian_binomial(2, 2, 1).unwrap(), 3);
        assert_eq!(gaussian_binomial(2, 4, 2).unwrap(), 35);
        assert_eq!(gaussian_binomial(3, 3, 1).unwrap(), 13);
        assert!(gaussian_binomial(2, 2, 3).is_err());
        assert_eq!(gaussian_binomial(2, 300, 150), Err(Error::Overflow));
    }

    // Direct product formula with exact rationals, as an oracle.
    fn product_formula(q: u64, n: usize, r: usize) -> u128 {
        let q = q as u128;
        let (mut num, mut den) = (1u128, 1u128);
        for i in 0..r {
            num *= q.pow(n as u32) - q.pow(i as u32);
            den *= q.pow(r as u32) - q.pow(i as u32);
        }
        assert_eq!(num % den, 0);
        num / den
    }

    #[test]
    fn gaussian_binomial_matches_product_formula_and_bounds() {
        for q in [2u64, 3] {
            for n in 0..=8 {
                for r in 0..=n {
                    let g = gaussian_binomial(q, n, r).unwrap();
                    assert_eq!(g, product_formula(q, n, r));
                    let low = (q as u128).pow((r * (n - r)) as u32);
                    assert!(low <= g && g <= 4 * low, "q={q} n={n} r={r}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn rank_distance_is_a_metric(seed in any::<u64>()) {
            let f = ExtField::new(FieldParams::new(2, 5).unwrap()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = f.random_vec(4, &mut rng);
            let b = f.random_vec(4, &mut rng);
            let c = f.random_vec(4, &mut rng);
            let ab = rank_distance(&f, &a, &b).unwrap();
            prop_assert_eq!(ab, rank_distance(&f, &b, &a).unwrap());
            prop_assert!(ab <= rank_distance(&f, &a, &c).unwrap() + rank_distance(&f, &c, &b).unwrap());
            prop_assert_eq!(rank_distance(&f, &a, &a).unwrap(), 0);
            prop_assert!(ab <= 4);
        }

        #[test]
        fn sum_rank_weight_is_bounded(seed in any::<u64>(), len in 1usize..5) {
            let f = ExtField::new(FieldParams::new(3, 3).unwrap()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let blocks: Vec<Vec<ExtElem>> = (0..len).map(|_| f.random_vec(4, &mut rng)).collect();
            let s = BlockSequence::new(4, blocks).unwrap();
            prop_assert!(sum_rank_weight(&f, &s) <= len * 3);
            let first = BlockSequence::new(4, vec![s.block(0).to_vec()]).unwrap();
            prop_assert_eq!(sum_rank_weight(&f, &first), rank_weight(&f, s.block(0)));
        }

        #[test]
        fn subspace_distance_is_a_metric(seed in any::<u64>()) {
            let f = BaseField::binary();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pick = |rng: &mut ChaCha8Rng| {
                let rows = rand::Rng::gen_range(rng, 0..=6);
                Subspace::row_space(&f, &BaseMatrix::random(&f, rows, 6, rng))
            };
            let (u, v, w) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let uv = subspace_distance(&f, &u, &v).unwrap();
            prop_assert_eq!(uv, subspace_distance(&f, &v, &u).unwrap());
            prop_assert_eq!(subspace_distance(&f, &u, &u).unwrap(), 0);
            prop_assert_eq!(uv == 0, u == v);
            prop_assert!(uv <= subspace_distance(&f, &u, &w).unwrap() + subspace_distance(&f, &w, &v).unwrap());
        }
    }
}
