//! (Partial) unit memory codes built from one Gabidulin code.
//!
//! A single Moore matrix `G_all = Moore(g, k + k1 - phi)` is split by rows into
//! `A` (`k1 - phi` rows), `Phi` (`phi` rows), `G01` (`k - k1` rows) and `B`
//! (`k1 - phi` rows). The encoder is
//!
//! ```text
//! c(i) = u(i) G0 + u(i-1) G1,   G0 = (A; Phi; G01),   G1 = (Phi; B; 0)
//! ```
//!
//! With `phi = 0` this is the low-rate construction where `A = G00` and
//! `B = G10`. Any run of consecutive rows of a Moore matrix is again a
//! Moore matrix, so every subcode used by the decoder is a Gabidulin code on
//! Frobenius-shifted locators `g^[s]`:
//!
//! | subcode | rows of `G_all`            | dimension        |
//! |---------|----------------------------|------------------|
//! | `C0`    | `A, Phi, G01`              | `k`              |
//! | `C1`    | `Phi, G01, B`              | `k`              |
//! | `C01`   | `G01`                      | `k - k1`         |
//! | `Csigma`| all                        | `k + k1 - phi`   |
//! | `C10`   | `B` (only when `phi = 0`)  | `k1`             |
//!
//! Every code block is `hat(i) G_all` for the stacked vector
//!
//! ```text
//! hat(i) = ( u(i)[..k1-phi] | u(i)[k1-phi..k1] + u(i-1)[..phi] | u(i)[k1..] | u(i-1)[phi..k1] )
//! ```
//!
//! which is what [`PumCode::solve_hats`] inverts.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::field::{ExtElem, ExtField, Field};
use crate::gabidulin::GabidulinCode;
use crate::matrix::Matrix;

/// A designed distance: an exact rational, or unbounded (a subcode that does
/// not exist has infinite distance).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Designed {
    Finite(Ratio<i64>),
    Unbounded,
}

impl Designed {
    pub fn int(v: usize) -> Self {
        Designed::Finite(Ratio::from_integer(v as i64))
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Designed::Unbounded)
    }

    pub fn finite(&self) -> Option<Ratio<i64>> {
        match self {
            Designed::Finite(r) => Some(*r),
            Designed::Unbounded => None,
        }
    }
}

impl Ord for Designed {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Designed::Finite(a), Designed::Finite(b)) => a.cmp(b),
            (Designed::Finite(_), Designed::Unbounded) => Ordering::Less,
            (Designed::Unbounded, Designed::Finite(_)) => Ordering::Greater,
            (Designed::Unbounded, Designed::Unbounded) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Designed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Designed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Designed::Finite(r) if r.is_integer() => write!(f, "{}", r.to_integer()),
            Designed::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Designed::Unbounded => f.write_str("inf"),
        }
    }
}

/// Closed-form distances of the subcodes and the designed slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceProfile {
    pub d0: usize,
    pub d1: usize,
    /// `None` when `k1 = k`.
    pub d01: Option<usize>,
    pub d_sigma: usize,
    pub d10: usize,
    /// Maximum number of consecutive zero code blocks between nonzero ones.
    pub ell: usize,
    /// `d_sigma / (ell + 1)`; equals `d_sigma` when `phi = 0`.
    pub slope: Ratio<i64>,
    /// Designed free rank distance `min(d01, d0 + d1)`.
    pub d_free: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Row,
    Column,
    ReverseColumn,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PumCode {
    n: usize,
    k: usize,
    k1: usize,
    phi: usize,
    g: Vec<ExtElem>,
    g_all: Matrix<ExtElem>,
    g0: Matrix<ExtElem>,
    g1: Matrix<ExtElem>,
    c0: GabidulinCode,
    c1: GabidulinCode,
    c01: Option<GabidulinCode>,
    c_sigma: GabidulinCode,
    c10: Option<GabidulinCode>,
    profile: DistanceProfile,
}

fn shifted(f: &ExtField, g: &[ExtElem], s: usize) -> Vec<ExtElem> {
    g.iter().map(|&x| f.frobenius(x, s)).collect()
}

/// Rank over the extension field of the highest-degree coefficient matrix
/// `[G(D)]_h` of `G(D) = G0 + G1 D`: row `i` is taken from `G1` when that row
/// is nonzero and from `G0` otherwise. A memory-one encoder in this form is
/// minimal basic iff the rank is full.
pub fn is_minimal_basic_generator(
    f: &ExtField,
    g0: &Matrix<ExtElem>,
    g1: &Matrix<ExtElem>,
) -> bool {
    if g0.rows() != g1.rows() || g0.cols() != g1.cols() {
        return false;
    }
    let rows: Vec<Vec<ExtElem>> = (0..g0.rows())
        .map(|i| {
            if g1.row(i).iter().any(|&x| x != ExtElem::ZERO) {
                g1.row(i).to_vec()
            } else {
                g0.row(i).to_vec()
            }
        })
        .collect();
    Matrix::from_rows(g0.cols(), &rows).rank(f) == g0.rows()
}

impl PumCode {
    /// Code on the field basis as locators.
    pub fn new(f: &ExtField, n: usize, k: usize, k1: usize, phi: usize) -> Result<Self> {
        if n > f.m() {
            return Err(Error::InvalidParameters(format!(
                "n = {n} exceeds m = {}",
                f.m()
            )));
        }
        PumCode::with_locators(f, f.basis()[..n].to_vec(), k, k1, phi)
    }

    pub fn with_locators(
        f: &ExtField,
        g: Vec<ExtElem>,
        k: usize,
        k1: usize,
        phi: usize,
    ) -> Result<Self> {
        let n = g.len();
        if k1 == 0 {
            return Err(Error::InvalidParameters("k1 must be at least 1".into()));
        }
        if k1 > k {
            return Err(Error::InvalidParameters(format!(
                "k1 = {k1} exceeds k = {k}"
            )));
        }
        if phi >= k1 {
            return Err(Error::InvalidParameters(format!(
                "phi = {phi} must be below k1 = {k1}"
            )));
        }
        if k + k1 - phi > n {
            return Err(Error::InvalidParameters(format!(
                "k + k1 - phi = {} exceeds n = {n}",
                k + k1 - phi
            )));
        }
        if n > f.m() {
            return Err(Error::InvalidParameters(format!(
                "n = {n} exceeds m = {}",
                f.m()
            )));
        }
        let kall = k + k1 - phi;
        let c_sigma = GabidulinCode::new(f, g.clone(), kall)?;
        let g_all = c_sigma.generator().clone();
        let g0 = g_all.row_range(0, k);
        let zero = Matrix::zeros(k - k1, n);
        let g1 = g_all
            .row_range(k1 - phi, k1)
            .vstack(&g_all.row_range(k, kall))
            .vstack(&zero);
        let c0 = GabidulinCode::new(f, g.clone(), k)?;
        let c1 = GabidulinCode::new(f, shifted(f, &g, k1 - phi), k)?;
        let c01 = if k1 < k {
            Some(GabidulinCode::new(f, shifted(f, &g, k1), k - k1)?)
        } else {
            None
        };
        let c10 = if phi == 0 {
            Some(GabidulinCode::new(f, shifted(f, &g, k), k1)?)
        } else {
            None
        };
        let ell = phi.div_ceil(k1 - phi);
        let d_sigma = n - kall + 1;
        let d01 = (k1 < k).then(|| n - k + k1 + 1);
        let d0 = n - k + 1;
        let profile = DistanceProfile {
            d0,
            d1: d0,
            d01,
            d_sigma,
            d10: n - k1 + 1,
            ell,
            slope: Ratio::new(d_sigma as i64, ell as i64 + 1),
            d_free: d01.map_or(2 * d0, |d| d.min(2 * d0)),
        };
        Ok(PumCode {
            n,
            k,
            k1,
            phi,
            g,
            g_all,
            g0,
            g1,
            c0,
            c1,
            c01,
            c_sigma,
            c10,
            profile,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    /// Memory; always one.
    pub fn memory(&self) -> usize {
        1
    }

    /// Overall constraint length: `k1` (equal to `k` for unit memory codes).
    pub fn constraint_length(&self) -> usize {
        self.k1
    }

    pub fn is_unit_memory(&self) -> bool {
        self.k1 == self.k
    }

    pub fn locators(&self) -> &[ExtElem] {
        &self.g
    }

    /// Length of the stacked vector `hat`: `k + k1 - phi`.
    pub fn hat_len(&self) -> usize {
        self.k + self.k1 - self.phi
    }

    pub fn g_all(&self) -> &Matrix<ExtElem> {
        &self.g_all
    }

    pub fn g0(&self) -> &Matrix<ExtElem> {
        &self.g0
    }

    pub fn g1(&self) -> &Matrix<ExtElem> {
        &self.g1
    }

    pub fn c0(&self) -> &GabidulinCode {
        &self.c0
    }

    pub fn c1(&self) -> &GabidulinCode {
        &self.c1
    }

    pub fn c01(&self) -> Option<&GabidulinCode> {
        self.c01.as_ref()
    }

    pub fn c_sigma(&self) -> &GabidulinCode {
        &self.c_sigma
    }

    /// `<G10>`; only a Gabidulin code when `phi = 0`.
    pub fn c10(&self) -> Option<&GabidulinCode> {
        self.c10.as_ref()
    }

    /// Block code for the terminating block: `C10` when `phi = 0`, else `C1`
    /// (which contains `<Phi; B>`).
    pub fn tail_code(&self) -> &GabidulinCode {
        self.c10.as_ref().unwrap_or(&self.c1)
    }

    pub fn profile(&self) -> &DistanceProfile {
        &self.profile
    }

    pub fn is_minimal_basic(&self, f: &ExtField) -> bool {
        is_minimal_basic_generator(f, &self.g0, &self.g1)
    }

    /// Designed active distance of order `j >= 1`.
    pub fn designed(&self, dir: Direction, j: usize) -> Result<Designed> {
        if j == 0 {
            return Err(Error::InvalidParameters(
                "designed distances start at order 1".into(),
            ));
        }
        let p = &self.profile;
        let (d0, d1) = (
            Ratio::from_integer(p.d0 as i64),
            Ratio::from_integer(p.d1 as i64),
        );
        let steps = |s: usize| p.slope * Ratio::from_integer(s as i64);
        Ok(match dir {
            Direction::Row if j == 1 => p.d01.map_or(Designed::Unbounded, Designed::int),
            Direction::Row => Designed::Finite(d0 + steps(j - 2) + d1),
            Direction::Column => Designed::Finite(d0 + steps(j - 1)),
            Direction::ReverseColumn => Designed::Finite(steps(j - 1) + d1),
        })
    }

    fn check_len(&self, v: &[ExtElem], len: usize) -> Result<()> {
        if v.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// The stacked vector `hat` for the current and previous info blocks.
    pub fn hat(&self, f: &ExtField, cur: &[ExtElem], prev: &[ExtElem]) -> Result<Vec<ExtElem>> {
        self.check_len(cur, self.k)?;
        self.check_len(prev, self.k)?;
        Ok(self.hat_unchecked(f, cur, prev))
    }

    fn hat_unchecked(&self, f: &ExtField, cur: &[ExtElem], prev: &[ExtElem]) -> Vec<ExtElem> {
        let (k, k1, phi) = (self.k, self.k1, self.phi);
        let mut h = Vec::with_capacity(self.hat_len());
        h.extend_from_slice(&cur[..k1 - phi]);
        for j in 0..phi {
            h.push(f.add(cur[k1 - phi + j], prev[j]));
        }
        h.extend_from_slice(&cur[k1..k]);
        h.extend_from_slice(&prev[phi..k1]);
        h
    }

    /// `u(i) G0 + u(i-1) G1`.
    pub fn encode_block(
        &self,
        f: &ExtField,
        cur: &[ExtElem],
        prev: &[ExtElem],
    ) -> Result<Vec<ExtElem>> {
        self.check_len(cur, self.k)?;
        self.check_len(prev, self.k)?;
        Ok(self.g_all.vec_mul(f, &self.hat_unchecked(f, cur, prev)))
    }

    /// Zero-terminated encoding: `N` info blocks give `N + 1` code blocks.
    pub fn encode(&self, f: &ExtField, u: &[Vec<ExtElem>]) -> Result<Vec<Vec<ExtElem>>> {
        let zero = vec![ExtElem::ZERO; self.k];
        let mut out = Vec::with_capacity(u.len() + 1);
        for i in 0..=u.len() {
            let cur = u.get(i).unwrap_or(&zero);
            let prev = if i == 0 { &zero } else { &u[i - 1] };
            out.push(self.encode_block(f, cur, prev)?);
        }
        Ok(out)
    }

    /// The state entering depth `i`: the first `k1` symbols of `u(i-1)`.
    pub fn state_of(&self, info: &[ExtElem]) -> Vec<ExtElem> {
        info[..self.k1].to_vec()
    }

    /// Unencodes the block at `depth` of an `n_info`-block sequence with the
    /// subcode that depth lives in and returns its `hat` vector.
    pub fn hat_of_block(
        &self,
        f: &ExtField,
        depth: usize,
        n_info: usize,
        c: &[ExtElem],
    ) -> Result<Vec<ExtElem>> {
        let (k, k1, phi) = (self.k, self.k1, self.phi);
        let mut h = vec![ExtElem::ZERO; self.hat_len()];
        if depth > n_info {
            return Err(Error::InvalidParameters(format!(
                "depth {depth} beyond {n_info}"
            )));
        }
        if depth == n_info {
            let x = self.tail_code().unencode(f, c)?;
            if phi == 0 {
                h[k..].copy_from_slice(&x);
            } else {
                if x[phi..phi + k - k1].iter().any(|&v| v != ExtElem::ZERO) {
                    return Err(Error::NotACodeword);
                }
                h[k1 - phi..k1].copy_from_slice(&x[..phi]);
                h[k..].copy_from_slice(&x[phi + k - k1..]);
            }
        } else if depth == 0 {
            let x = self.c0.unencode(f, c)?;
            h[..k].copy_from_slice(&x);
        } else {
            h = self.c_sigma.unencode(f, c)?;
        }
        Ok(h)
    }

    /// Recovers the info blocks determined by code blocks at the given depths
    /// of an `n_info`-block sequence (`u(-1) = u(N) = 0`).
    pub fn reconstruct_info(
        &self,
        f: &ExtField,
        n_info: usize,
        blocks: &[(usize, Vec<ExtElem>)],
    ) -> Result<Vec<Option<Vec<ExtElem>>>> {
        let mut hats = Vec::with_capacity(blocks.len());
        for (d, c) in blocks {
            let h = self
                .hat_of_block(f, *d, n_info, c)
                .map_err(|_| Error::InconsistentWindow(*d))?;
            hats.push((*d, h));
        }
        self.solve_hats(f, n_info, &hats)
    }

    /// Propagates the linear relations of the given `hat` vectors through the
    /// info sequence. Returns every fully determined info block; a
    /// contradiction between windows is reported with its depth.
    pub fn solve_hats(
        &self,
        f: &ExtField,
        n_info: usize,
        hats: &[(usize, Vec<ExtElem>)],
    ) -> Result<Vec<Option<Vec<ExtElem>>>> {
        Ok(self
            .solve_hats_partial(f, n_info, hats)?
            .into_iter()
            .map(|b| b.into_iter().collect::<Option<Vec<_>>>())
            .collect())
    }

    /// Like [`PumCode::solve_hats`] but keeps partially determined blocks
    /// symbol by symbol.
    pub fn solve_hats_partial(
        &self,
        f: &ExtField,
        n_info: usize,
        hats: &[(usize, Vec<ExtElem>)],
    ) -> Result<Vec<Vec<Option<ExtElem>>>> {
        let (k, k1, phi) = (self.k, self.k1, self.phi);
        let mut vals: Vec<Vec<Option<ExtElem>>> = vec![vec![None; k]; n_info];
        // Blocks -1 and N are zero; `block` is shifted by one.
        let get = |vals: &Vec<Vec<Option<ExtElem>>>, block: usize, j: usize| -> Option<ExtElem> {
            if block == 0 || block == n_info + 1 {
                Some(ExtElem::ZERO)
            } else {
                vals[block - 1][j]
            }
        };
        let set = |vals: &mut Vec<Vec<Option<ExtElem>>>,
                   block: usize,
                   j: usize,
                   v: ExtElem,
                   depth: usize|
         -> Result<bool> {
            if block == 0 || block == n_info + 1 {
                return if v == ExtElem::ZERO {
                    Ok(false)
                } else {
                    Err(Error::InconsistentWindow(depth))
                };
            }
            match vals[block - 1][j] {
                Some(old) if old == v => Ok(false),
                Some(_) => Err(Error::InconsistentWindow(depth)),
                None => {
                    vals[block - 1][j] = Some(v);
                    Ok(true)
                }
            }
        };
        let mut sums = Vec::new();
        for (d, h) in hats {
            let d = *d;
            if d > n_info || h.len() != self.hat_len() {
                return Err(Error::InconsistentWindow(d));
            }
            // cur = u(d) is block d + 1, prev = u(d - 1) is block d.
            let (cur, prev) = (d + 1, d);
            for j in 0..k1 - phi {
                set(&mut vals, cur, j, h[j], d)?;
            }
            for j in k1..k {
                set(&mut vals, cur, j, h[j], d)?;
            }
            for j in phi..k1 {
                set(&mut vals, prev, j, h[k + j - phi], d)?;
            }
            for j in 0..phi {
                sums.push((d, j, h[k1 - phi + j]));
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for &(d, j, s) in &sums {
                let (cur, prev) = (d + 1, d);
                let a = get(&vals, cur, k1 - phi + j);
                let b = get(&vals, prev, j);
                match (a, b) {
                    (Some(a), Some(b)) => {
                        if f.add(a, b) != s {
                            return Err(Error::InconsistentWindow(d));
                        }
                    }
                    (None, Some(b)) => {
                        changed |= set(&mut vals, cur, k1 - phi + j, f.sub(s, b), d)?
                    }
                    (Some(a), None) => changed |= set(&mut vals, prev, j, f.sub(s, a), d)?,
                    (None, None) => {}
                }
            }
        }
        Ok(vals)
    }
}
