//! Gabidulin codes and their error-erasure decoder.
//!
//! A codeword is the evaluation `c_j = f(g_j)` of a linearized polynomial `f`
//! of q-degree below `k` at the code locators, so encoding is `c = u G` with
//! the Moore generator `G` and `u` the coefficient vector of `f`.
//!
//! # Decoder
//!
//! [`GabidulinCode::decode_ee`] removes erasures first and then runs a Gao-type
//! errors-only decoder:
//!
//! 1. Column erasures. `B_C` is completed to an invertible `S` whose first
//!    `gamma` rows are `B_C`. With `T = S^-1` the erasure term `A_C B_C T`
//!    is confined to the first `gamma` positions, and `r T` punctured there is
//!    a word of the Gabidulin code with locators `(g T)[gamma..]`.
//! 2. Row erasures. The columns of `A_R` are mapped to field elements `a_l`,
//!    and applying their minimal subspace polynomial `Gamma` coordinate-wise
//!    annihilates `A_R B_R`. The codeword becomes an evaluation of
//!    `Gamma ∘ f`, of q-degree below `k + rho`.
//! 3. Errors. With `M` the minimal subspace polynomial of the punctured
//!    locators and `R` the interpolant of the transformed word, the extended
//!    Euclidean algorithm under right division on `(M, R)` is stopped at the
//!    first remainder `r_j` with `2 deg r_j < n' + k'`. Left division of
//!    `r_j` by its cofactor gives `Gamma ∘ f`; left division by `Gamma` gives
//!    `f`.
//!
//! The result is accepted only if the recovered error fits the radius
//! `2t + rho + gamma <= n - k`, with `t` measured exactly by
//! [`effective_error_rank`]. A returned codeword is therefore
//! always the unique one within the decoding radius.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{ExtElem, ExtField, Field, LinearizedPoly};
use crate::matrix::{BaseMatrix, Matrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GabidulinCode {
    n: usize,
    k: usize,
    g: Vec<ExtElem>,
    gen: Matrix<ExtElem>,
}

/// Why a block decode produced no codeword.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecodeFailure {
    #[error("rho + gamma = {0} exceeds the redundancy")]
    TooManyErasures(usize),
    #[error("key equation has no valid solution")]
    KeyEquation,
    #[error("closest candidate lies outside the decoding radius")]
    BeyondRadius,
    #[error("malformed input: {0}")]
    Malformed(Error),
}

/// Successful block decode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub codeword: Vec<ExtElem>,
    pub info: Vec<ExtElem>,
    /// Smallest number of full errors explaining `r - codeword` given the
    /// erasure side information.
    pub errors: usize,
}

/// Known parts of the error: the column space `A_R` (`m x rho`) of the row
/// erasures and the row space `B_C` (`gamma x n`) of the column erasures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasureSideInfo {
    a_r: BaseMatrix,
    b_c: BaseMatrix,
}

impl ErasureSideInfo {
    pub fn new(f: &ExtField, n: usize, a_r: BaseMatrix, b_c: BaseMatrix) -> Result<Self> {
        if a_r.rows() != f.m() {
            return Err(Error::DimensionMismatch {
                expected: f.m(),
                found: a_r.rows(),
            });
        }
        if b_c.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b_c.cols(),
            });
        }
        if a_r.rank(f.base()) != a_r.cols() || b_c.rank(f.base()) != b_c.rows() {
            return Err(Error::RankDeficient);
        }
        Ok(ErasureSideInfo { a_r, b_c })
    }

    pub fn none(m: usize, n: usize) -> Self {
        ErasureSideInfo {
            a_r: BaseMatrix::zeros(m, 0),
            b_c: BaseMatrix::zeros(0, n),
        }
    }

    pub fn rho(&self) -> usize {
        self.a_r.cols()
    }

    pub fn gamma(&self) -> usize {
        self.b_c.rows()
    }

    pub fn a_r(&self) -> &BaseMatrix {
        &self.a_r
    }

    pub fn b_c(&self) -> &BaseMatrix {
        &self.b_c
    }

    pub fn n(&self) -> usize {
        self.b_c.cols()
    }
}

/// `E = A_R B_R + A_C B_C + A_E B_E` with `rho`, `gamma`, `t` inner dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorDecomposition {
    pub a_r: BaseMatrix,
    pub b_r: BaseMatrix,
    pub a_c: BaseMatrix,
    pub b_c: BaseMatrix,
    pub a_e: BaseMatrix,
    pub b_e: BaseMatrix,
}

impl ErrorDecomposition {
    pub fn t(&self) -> usize {
        self.a_e.cols()
    }

    pub fn rho(&self) -> usize {
        self.a_r.cols()
    }

    pub fn gamma(&self) -> usize {
        self.b_c.rows()
    }

    /// Error-free decomposition of an `m x n` block.
    pub fn zero(m: usize, n: usize) -> Self {
        ErrorDecomposition {
            a_r: BaseMatrix::zeros(m, 0),
            b_r: BaseMatrix::zeros(0, n),
            a_c: BaseMatrix::zeros(m, 0),
            b_c: BaseMatrix::zeros(0, n),
            a_e: BaseMatrix::zeros(m, 0),
            b_e: BaseMatrix::zeros(0, n),
        }
    }

    pub fn matrix(&self, f: &ExtField) -> BaseMatrix {
        let b = f.base();
        self.a_r
            .mul(b, &self.b_r)
            .add(b, &self.a_c.mul(b, &self.b_c))
            .add(b, &self.a_e.mul(b, &self.b_e))
    }

    /// The error as a vector over the extension field.
    pub fn vector(&self, f: &ExtField) -> Vec<ExtElem> {
        f.matrix_to_ext(&self.matrix(f))
            .expect("error matrix has m rows")
    }

    pub fn side_info(&self) -> ErasureSideInfo {
        ErasureSideInfo {
            a_r: self.a_r.clone(),
            b_c: self.b_c.clone(),
        }
    }
}

/// Random error with `t` full errors, `rho` row and `gamma` column erasures.
///
/// The stacked factors `[A_R A_C A_E]` and `[B_R; B_C; B_E]` are sampled with
/// full rank, so the error matrix has rank exactly `t + rho + gamma`.
pub fn random_error<R: Rng + ?Sized>(
    f: &ExtField,
    n: usize,
    t: usize,
    rho: usize,
    gamma: usize,
    rng: &mut R,
) -> Result<ErrorDecomposition> {
    let m = f.m();
    let s = t + rho + gamma;
    if s > m.min(n) {
        return Err(Error::InvalidParameters(format!(
            "t + rho + gamma = {s} exceeds min(m, n) = {}",
            m.min(n)
        )));
    }
    let a = BaseMatrix::random_full_rank(f.base(), m, s, rng);
    let b = BaseMatrix::random_full_rank(f.base(), s, n, rng);
    Ok(ErrorDecomposition {
        a_r: a.col_range(0, rho),
        a_c: a.col_range(rho, rho + gamma),
        a_e: a.col_range(rho + gamma, s),
        b_r: b.row_range(0, rho),
        b_c: b.row_range(rho, rho + gamma),
        b_e: b.row_range(rho + gamma, s),
    })
}

/// Minimum number of full errors needed to explain the `m x n` error `e`
/// when `A_R` and `B_C` are known:
/// `rank [[E, A_R], [B_C, 0]] - rho - gamma`.
pub fn effective_error_rank(f: &ExtField, e: &BaseMatrix, side: &ErasureSideInfo) -> usize {
    let top = e.hstack(&side.a_r);
    let bottom = side
        .b_c
        .hstack(&BaseMatrix::zeros(side.gamma(), side.rho()));
    top.vstack(&bottom).rank(f.base()) - side.rho() - side.gamma()
}

// v * t for an extension-field row vector and a base-field matrix.
fn vec_base_mul(f: &ExtField, v: &[ExtElem], t: &BaseMatrix) -> Vec<ExtElem> {
    let mut out = vec![ExtElem::ZERO; t.cols()];
    for (i, &vi) in v.iter().enumerate() {
        if vi == ExtElem::ZERO {
            continue;
        }
        for (o, &c) in out.iter_mut().zip(t.row(i)) {
            *o = f.add(*o, f.scale(vi, c));
        }
    }
    out
}

impl GabidulinCode {
    pub fn new(f: &ExtField, g: Vec<ExtElem>, k: usize) -> Result<Self> {
        let n = g.len();
        if n == 0 || n > f.m() {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= n <= m, got n = {n}"
            )));
        }
        if k == 0 || k > n {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= k <= n, got k = {k}, n = {n}"
            )));
        }
        let gen = f.moore_matrix(&g, k)?;
        Ok(GabidulinCode { n, k, g, gen })
    }

    /// Code with the field basis as locators.
    pub fn with_basis_locators(f: &ExtField, n: usize, k: usize) -> Result<Self> {
        if n > f.m() {
            return Err(Error::InvalidParameters(format!(
                "n = {n} exceeds m = {}",
                f.m()
            )));
        }
        GabidulinCode::new(f, f.basis()[..n].to_vec(), k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Minimum rank distance `n - k + 1`.
    pub fn d(&self) -> usize {
        self.n - self.k + 1
    }

    pub fn locators(&self) -> &[ExtElem] {
        &self.g
    }

    pub fn generator(&self) -> &Matrix<ExtElem> {
        &self.gen
    }

    pub fn encode(&self, f: &ExtField, u: &[ExtElem]) -> Result<Vec<ExtElem>> {
        if u.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: u.len(),
            });
        }
        Ok(self.gen.vec_mul(f, u))
    }

    /// Information vector of a codeword, or [`Error::NotACodeword`].
    pub fn unencode(&self, f: &ExtField, c: &[ExtElem]) -> Result<Vec<ExtElem>> {
        if c.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: c.len(),
            });
        }
        let p = LinearizedPoly::interpolate(f, &self.g, c);
        if p.q_degree().is_some_and(|d| d >= self.k) {
            return Err(Error::NotACodeword);
        }
        Ok((0..self.k).map(|i| p.coeff(i)).collect())
    }

    pub fn is_codeword(&self, f: &ExtField, c: &[ExtElem]) -> bool {
        self.unencode(f, c).is_ok()
    }

    /// Errors-only decoding.
    pub fn decode(
        &self,
        f: &ExtField,
        r: &[ExtElem],
    ) -> core::result::Result<Decoded, DecodeFailure> {
        self.decode_ee(f, r, &ErasureSideInfo::none(f.m(), self.n))
    }

    /// Bounded minimum distance error-erasure decoding: succeeds whenever
    /// `2t + rho + gamma <= n - k`.
    pub fn decode_ee(
        &self,
        f: &ExtField,
        r: &[ExtElem],
        side: &ErasureSideInfo,
    ) -> core::result::Result<Decoded, DecodeFailure> {
        if r.len() != self.n {
            return Err(DecodeFailure::Malformed(Error::DimensionMismatch {
                expected: self.n,
                found: r.len(),
            }));
        }
        if side.n() != self.n || side.a_r.rows() != f.m() {
            return Err(DecodeFailure::Malformed(Error::DimensionMismatch {
                expected: self.n,
                found: side.n(),
            }));
        }
        let (rho, gamma) = (side.rho(), side.gamma());
        if rho + gamma > self.n - self.k {
            return Err(DecodeFailure::TooManyErasures(rho + gamma));
        }
        let base = f.base();

        // Column erasures: move them onto the first gamma positions and drop those.
        let (g2, r2) = if gamma == 0 {
            (self.g.clone(), r.to_vec())
        } else {
            let mut red = side.b_c.clone();
            let pivots = red.rref(base);
            let mut s = side.b_c.clone();
            for j in (0..self.n).filter(|j| !pivots.contains(j)) {
                let mut e = BaseMatrix::zeros(1, self.n);
                e[(0, j)] = 1;
                s = s.vstack(&e);
            }
            let t = s
                .inverse(base)
                .ok_or(DecodeFailure::Malformed(Error::RankDeficient))?;
            let gt = vec_base_mul(f, &self.g, &t);
            let rt = vec_base_mul(f, r, &t);
            (gt[gamma..].to_vec(), rt[gamma..].to_vec())
        };

        // Row erasures: annihilate the known column space.
        let a = f
            .matrix_to_ext(&side.a_r)
            .map_err(DecodeFailure::Malformed)?;
        let gamma_poly = LinearizedPoly::subspace_poly(f, &a);
        let r3: Vec<ExtElem> = r2.iter().map(|&x| gamma_poly.eval(f, x)).collect();

        let n2 = self.n - gamma;
        let k2 = self.k + rho;
        let fp = gao(f, &g2, &r3, k2).ok_or(DecodeFailure::KeyEquation)?;
        let (fpoly, rem) = fp.div_left(f, &gamma_poly);
        if !rem.is_zero() || fpoly.q_degree().is_some_and(|d| d >= self.k) {
            return Err(DecodeFailure::KeyEquation);
        }
        debug_assert!(n2 >= k2);

        let info: Vec<ExtElem> = (0..self.k).map(|i| fpoly.coeff(i)).collect();
        let codeword = self.encode(f, &info).expect("info has length k");
        let diff: Vec<ExtElem> = r
            .iter()
            .zip(&codeword)
            .map(|(&x, &y)| f.sub(x, y))
            .collect();
        let errors = effective_error_rank(f, &f.ext_to_matrix(&diff), side);
        if 2 * errors + rho + gamma > self.n - self.k {
            return Err(DecodeFailure::BeyondRadius);
        }
        Ok(Decoded {
            codeword,
            info,
            errors,
        })
    }
}

// Errors-only Gao decoding of `r` in the Gabidulin code with locators `g` and
// dimension `k`; returns the message polynomial.
fn gao(f: &ExtField, g: &[ExtElem], r: &[ExtElem], k: usize) -> Option<LinearizedPoly> {
    let n = g.len();
    let deg = |p: &LinearizedPoly| p.q_degree().map_or(-1, |d| d as isize);
    let done = |p: &LinearizedPoly| 2 * deg(p) < (n + k) as isize;

    let mut r_prev = LinearizedPoly::subspace_poly(f, g);
    let mut r_cur = LinearizedPoly::interpolate(f, g, r);
    let mut v_prev = LinearizedPoly::zero();
    let mut v_cur = LinearizedPoly::identity();
    while !done(&r_cur) {
        let (quot, rem) = r_prev.div_right(f, &r_cur);
        let v_next = v_prev.sub(f, &quot.compose(f, &v_cur));
        r_prev = core::mem::replace(&mut r_cur, rem);
        v_prev = core::mem::replace(&mut v_cur, v_next);
    }
    let (msg, rem) = r_cur.div_left(f, &v_cur);
    if !rem.is_zero() || deg(&msg) >= k as isize {
        return None;
    }
    Some(msg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;
    use crate::rank::rank_weight;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf256() -> ExtField {
        ExtField::binary(8).unwrap()
    }

    fn add(f: &ExtField, a: &[ExtElem], b: &[ExtElem]) -> Vec<ExtElem> {
        a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
    }

    // Minimum rank weight over all nonzero codewords, by enumerating messages
    // with coefficients in the whole field.
    fn min_weight(f: &ExtField, code: &GabidulinCode) -> usize {
        let els: Vec<ExtElem> = f.elements().collect();
        let q = els.len();
        let total = q.pow(code.k() as u32);
        let mut best = usize::MAX;
        for idx in 1..total {
            let mut c = idx;
            let u: Vec<ExtElem> = (0..code.k())
                .map(|_| {
                    let e = els[c % q];
                    c /= q;
                    e
                })
                .collect();
            best = best.min(rank_weight(f, &code.encode(f, &u).unwrap()));
        }
        best
    }

    #[test]
    fn mrd_by_exhaustive_enumeration() {
        for (q, m) in [(2u32, 3usize), (2, 4), (2, 5), (3, 2), (4, 2)] {
            let f = ExtField::new(FieldParams::new(q, m).unwrap()).unwrap();
            for n in 1..=m {
                for k in 1..=n {
                    if (q as f64).powi((m * k) as i32) > (1u64 << 20) as f64 {
                        continue;
                    }
                    let code = GabidulinCode::with_basis_locators(&f, n, k).unwrap();
                    assert_eq!(min_weight(&f, &code), n - k + 1, "q={q} m={m} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn construction_rules() {
        let f = ExtField::binary(4).unwrap();
        assert_eq!(GabidulinCode::with_basis_locators(&f, 4, 4).unwrap().d(), 1);
        assert_eq!(GabidulinCode::with_basis_locators(&f, 1, 1).unwrap().d(), 1);
        assert!(GabidulinCode::with_basis_locators(&f, 3, 4).is_err());
        assert!(GabidulinCode::with_basis_locators(&f, 5, 2).is_err());
        let a = f.alpha();
        assert_eq!(
            GabidulinCode::new(&f, vec![a, a], 1),
            Err(Error::DependentLocators)
        );
    }

    #[test]
    fn encode_examples() {
        let f = ExtField::binary(3).unwrap();
        let a = f.alpha();
        let g = vec![f.one(), a, f.mul(a, a)];
        let code = GabidulinCode::new(&f, g.clone(), 1).unwrap();
        assert_eq!(code.encode(&f, &[f.one()]).unwrap(), g);
        assert_eq!(
            code.encode(&f, &[ExtElem::ZERO]).unwrap(),
            vec![ExtElem::ZERO; 3]
        );
        assert!(code.encode(&f, &[f.one(), f.one()]).is_err());
    }

    #[test]
    fn unencode_rejects_non_codewords() {
        let f = gf256();
        let code = GabidulinCode::with_basis_locators(&f, 8, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let u = f.random_vec(3, &mut rng);
            let mut c = code.encode(&f, &u).unwrap();
            assert_eq!(code.unencode(&f, &c).unwrap(), u);
            // A rank-one error is closer than the minimum distance 6.
            let j = rng.gen_range(0..8);
            c[j] = f.add(c[j], f.random_nonzero(&mut rng));
            assert_eq!(code.unencode(&f, &c), Err(Error::NotACodeword));
        }
        assert_eq!(
            code.unencode(&f, &[ExtElem::ZERO; 8]).unwrap(),
            vec![ExtElem::ZERO; 3]
        );
    }

    #[test]
    fn random_error_ranks() {
        let f = gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let z = random_error(&f, 8, 0, 0, 0, &mut rng).unwrap();
        assert!(z.matrix(&f).is_zero());
        for t in 0..=4 {
            let e = random_error(&f, 8, t, 0, 0, &mut rng).unwrap();
            assert_eq!(e.matrix(&f).rank(f.base()), t);
        }
        let e = random_error(&f, 8, 0, 2, 0, &mut rng).unwrap();
        let cols = crate::rank::Subspace::row_space(f.base(), &e.matrix(&f).transpose());
        let ar = crate::rank::Subspace::row_space(f.base(), &e.a_r.transpose());
        assert_eq!(cols, ar);
        assert!(random_error(&f, 8, 5, 2, 2, &mut rng).is_err());
    }

    #[test]
    fn effective_rank_accounts_for_side_info() {
        let f = gf256();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (t, rho, gamma) = (
                rng.gen_range(0..3),
                rng.gen_range(0..3),
                rng.gen_range(0..3),
            );
            let e = random_error(&f, 8, t, rho, gamma, &mut rng).unwrap();
            assert_eq!(effective_error_rank(&f, &e.matrix(&f), &e.side_info()), t);
        }
    }

    #[test]
    fn decodes_rank_three_error_at_distance_seven() {
        let f = gf256();
        let code = GabidulinCode::with_basis_locators(&f, 8, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let u = f.random_vec(2, &mut rng);
            let c = code.encode(&f, &u).unwrap();
            let e = random_error(&f, 8, 3, 0, 0, &mut rng).unwrap();
            let out = code.decode(&f, &add(&f, &c, &e.vector(&f))).unwrap();
            assert_eq!(out.codeword, c);
            assert_eq!(out.info, u);
            assert_eq!(out.errors, 3);
        }
    }

    #[test]
    fn decodes_errors_and_both_erasure_kinds() {
        let f = gf256();
        let code = GabidulinCode::with_basis_locators(&f, 8, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let u = f.random_vec(2, &mut rng);
            let c = code.encode(&f, &u).unwrap();
            let e = random_error(&f, 8, 1, 2, 2, &mut rng).unwrap();
            let out = code
                .decode_ee(&f, &add(&f, &c, &e.vector(&f)), &e.side_info())
                .unwrap();
            assert_eq!(out.codeword, c);
        }
    }

    #[test]
    fn too_many_erasures_fail_immediately() {
        let f = gf256();
        let code = GabidulinCode::with_basis_locators(&f, 8, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let e = random_error(&f, 8, 0, 3, 2, &mut rng).unwrap();
        assert_eq!(
            code.decode_ee(&f, &e.vector(&f), &e.side_info()),
            Err(DecodeFailure::TooManyErasures(5))
        );
    }

    #[test]
    fn side_info_validation() {
        let f = ExtField::binary(4).unwrap();
        let dup = BaseMatrix::from_rows(4, &[vec![1, 0, 0, 0], vec![1, 0, 0, 0]]);
        assert_eq!(
            ErasureSideInfo::new(&f, 4, BaseMatrix::zeros(4, 0), dup),
            Err(Error::RankDeficient)
        );
        assert!(
            ErasureSideInfo::new(&f, 4, BaseMatrix::zeros(3, 0), BaseMatrix::zeros(0, 4)).is_err()
        );
    }

    proptest! {
        #[test]
        fn decoder_corrects_within_radius(seed in any::<u64>(), k in 1usize..7, q3 in any::<bool>()) {
            let f = if q3 {
                ExtField::new(FieldParams::new(3, 6).unwrap()).unwrap()
            } else {
                ExtField::binary(6).unwrap()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 6;
            let code = GabidulinCode::with_basis_locators(&f, n, k).unwrap();
            let budget = n - k;
            let rho = rng.gen_range(0..=budget);
            let gamma = rng.gen_range(0..=budget - rho);
            let t = (budget - rho - gamma) / 2;
            let u = f.random_vec(k, &mut rng);
            let c = code.encode(&f, &u).unwrap();
            let e = random_error(&f, n, t, rho, gamma, &mut rng).unwrap();
            let out = code.decode_ee(&f, &add(&f, &c, &e.vector(&f)), &e.side_info()).unwrap();
            prop_assert_eq!(out.codeword, c);
            prop_assert_eq!(out.info, u);
        }

        #[test]
        fn decoder_output_is_always_a_codeword(seed in any::<u64>()) {
            let f = ExtField::binary(6).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let code = GabidulinCode::with_basis_locators(&f, 6, 2).unwrap();
            // On the radius boundary plus one: 2t + rho + gamma = d.
            let (t, rho, gamma) = [(2, 1, 0), (1, 2, 1), (0, 3, 2), (2, 0, 1)][rng.gen_range(0..4)];
            let c = code.encode(&f, &f.random_vec(2, &mut rng)).unwrap();
            let e = random_error(&f, 6, t, rho, gamma, &mut rng).unwrap();
            if let Ok(out) = code.decode_ee(&f, &add(&f, &c, &e.vector(&f)), &e.side_info()) {
                prop_assert!(code.is_codeword(&f, &out.codeword));
                prop_assert!(2 * out.errors + rho + gamma <= 4);
            }
        }
    }
}
