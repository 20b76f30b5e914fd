//! Lifting of code blocks to subspaces, the multi-shot operator channel and
//! the receiver side that turns channel outputs back into error-erasure
//! decoding problems.
//!
//! A code block `c` of length `n` is sent as the `n x (n + m)` matrix
//! `X = [I_n  C^T]` with `C` the `m x n` matrix of `c`. The affine variant
//! drops the first identity column: `X = [Î  C^T]` with `Î = [0 I_{n-1}]^T`.
//! Affine combinations (coefficients summing to one) keep the missing column
//! implicit, so the receiver restores it as one minus the row sum of the
//! `Î` part and proceeds as in the linear case.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::brd::{brd_decode_arbitrary_rate, BrdFailure, BrdOutput, ReceivedBlock};
use crate::error::{Error, Result};
use crate::field::{BaseField, ExtElem, ExtField, Field};
use crate::gabidulin::ErasureSideInfo;
use crate::matrix::BaseMatrix;
use crate::pum::PumCode;
use crate::rank::Subspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lifting {
    Linear,
    Affine,
}

impl Lifting {
    /// Columns in front of `C^T`.
    pub fn overhead(self, n: usize) -> usize {
        match self {
            Lifting::Linear => n,
            Lifting::Affine => n - 1,
        }
    }
}

/// One transmitted packet matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransmittedShot {
    x: BaseMatrix,
    lifting: Lifting,
}

impl TransmittedShot {
    pub fn x(&self) -> &BaseMatrix {
        &self.x
    }

    pub fn lifting(&self) -> Lifting {
        self.lifting
    }

    /// Number of packets, which is the code length `n`.
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn subspace(&self, f: &BaseField) -> Subspace {
        Subspace::row_space(f, &self.x)
    }
}

/// `[I_n  C^T]` for an `m x n` matrix `C`.
pub fn lift_block(f: &BaseField, c: &BaseMatrix) -> TransmittedShot {
    let n = c.cols();
    TransmittedShot {
        x: BaseMatrix::identity(f, n).hstack(&c.transpose()),
        lifting: Lifting::Linear,
    }
}

/// `[Î  C^T]` where `Î` is `I_n` without its first column.
pub fn lift_affine(f: &BaseField, c: &BaseMatrix) -> TransmittedShot {
    let n = c.cols();
    let hat = BaseMatrix::identity(f, n).col_range(1, n);
    TransmittedShot {
        x: hat.hstack(&c.transpose()),
        lifting: Lifting::Affine,
    }
}

/// Lifts every block of a code sequence.
pub fn lift_sequence(f: &ExtField, blocks: &[Vec<ExtElem>], lifting: Lifting) -> Vec<TransmittedShot> {
    blocks
        .iter()
        .map(|c| {
            let c = f.ext_to_matrix(c);
            match lifting {
                Lifting::Linear => lift_block(f.base(), &c),
                Lifting::Affine => lift_affine(f.base(), &c),
            }
        })
        .collect()
}

/// Per-shot channel law.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChannelConfig {
    /// Packets lost before mixing; `A` has rank `n - erased_packets`.
    pub erased_packets: usize,
    /// Random error packets injected into the mix.
    pub error_packets: usize,
    /// Constrain every row of `A` to sum to one.
    pub affine: bool,
}

/// A channel realization `Y = A X + B Z` before dependent rows are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelShot {
    pub a: BaseMatrix,
    pub b: BaseMatrix,
    pub z: BaseMatrix,
}

/// A received packet matrix of full row rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceiverShot {
    y: BaseMatrix,
    n: usize,
    lifting: Lifting,
}

impl ReceiverShot {
    /// Wraps `y` as the output of a shot with `n` transmitted packets. The
    /// rows must be independent in the linear layout.
    pub fn new(f: &BaseField, y: BaseMatrix, n: usize, lifting: Lifting) -> Result<Self> {
        if n == 0 || y.cols() < lifting.overhead(n) {
            return Err(Error::MalformedShot(format!(
                "{} columns for {n} packets",
                y.cols()
            )));
        }
        let shot = ReceiverShot { y, n, lifting };
        let rank = shot.linear_y(f).rank(f);
        if rank != shot.y.rows() {
            return Err(Error::MalformedShot(format!(
                "{} rows but rank {rank}",
                shot.y.rows()
            )));
        }
        Ok(shot)
    }

    /// Keeps the first maximal independent subset of rows of `y`.
    pub fn discarding_dependent(f: &BaseField, y: &BaseMatrix, n: usize, lifting: Lifting) -> Result<Self> {
        let all = ReceiverShot {
            y: y.clone(),
            n,
            lifting,
        };
        let lin = all.linear_y(f);
        let mut kept = Vec::new();
        let mut basis = BaseMatrix::zeros(0, lin.cols());
        for i in 0..y.rows() {
            let trial = basis.vstack(&lin.row_range(i, i + 1));
            if trial.rank(f) == trial.rows() {
                basis = trial;
                kept.push(i);
            }
        }
        ReceiverShot::new(f, y.select_rows(&kept), n, lifting)
    }

    pub fn y(&self) -> &BaseMatrix {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lifting(&self) -> Lifting {
        self.lifting
    }

    /// Received packet count `n_i`.
    pub fn received(&self) -> usize {
        self.y.rows()
    }

    /// The received matrix in the linear layout: affine shots get their
    /// implicit first column back.
    pub fn linear_y(&self, f: &BaseField) -> BaseMatrix {
        match self.lifting {
            Lifting::Linear => self.y.clone(),
            Lifting::Affine => {
                let w = self.n - 1;
                let mut out = BaseMatrix::zeros(self.y.rows(), self.y.cols() + 1);
                for i in 0..self.y.rows() {
                    let row = self.y.row(i);
                    let s = row[..w].iter().fold(0, |acc, &v| f.add(acc, v));
                    out[(i, 0)] = f.sub(f.one(), s);
                    out.row_mut(i)[1..].copy_from_slice(row);
                }
                out
            }
        }
    }

    /// `Â`: the first `n` columns of the linear layout.
    pub fn a_hat(&self, f: &BaseField) -> BaseMatrix {
        self.linear_y(f).col_range(0, self.n)
    }

    pub fn gamma(&self, f: &BaseField) -> usize {
        self.n - self.a_hat(f).rank(f)
    }

    pub fn rho(&self, f: &BaseField) -> usize {
        self.received() - self.a_hat(f).rank(f)
    }
}

/// Random `rows x cols` matrix whose rows sum to one.
fn random_affine_rows<R: Rng + ?Sized>(
    f: &BaseField,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> BaseMatrix {
    let mut m = BaseMatrix::random(f, rows, cols, rng);
    for i in 0..rows {
        let row = m.row(i);
        let s = row[1..].iter().fold(0, |acc, &v| f.add(acc, v));
        m[(i, 0)] = f.sub(f.one(), s);
    }
    m
}

/// Sends one shot: drops `erased_packets` random packets, appends the error
/// packets and mixes everything with a random invertible matrix. Dependent
/// received rows are discarded.
pub fn operator_channel<R: Rng + ?Sized>(
    f: &BaseField,
    x: &TransmittedShot,
    cfg: ChannelConfig,
    rng: &mut R,
) -> Result<(ReceiverShot, ChannelShot)> {
    let n = x.n();
    if cfg.erased_packets > n {
        return Err(Error::InvalidParameters(format!(
            "{} erased packets out of {n}",
            cfg.erased_packets
        )));
    }
    let kept = n - cfg.erased_packets;
    let t = cfg.error_packets;
    let total = kept + t;
    // P selects the surviving packets.
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut survivors = order[..kept].to_vec();
    survivors.sort_unstable();
    let mut p = BaseMatrix::zeros(kept, n);
    for (r, &c) in survivors.iter().enumerate() {
        p[(r, c)] = f.one();
    }
    let m = loop {
        let m = if cfg.affine && kept > 0 {
            // Rows of the packet part sum to one; the error part is free.
            random_affine_rows(f, total, kept, rng).hstack(&BaseMatrix::random(f, total, t, rng))
        } else {
            BaseMatrix::random(f, total, total, rng)
        };
        if m.rank(f) == total {
            break m;
        }
    };
    let z = BaseMatrix::random(f, t, x.x().cols(), rng);
    let a = m.col_range(0, kept).mul(f, &p);
    let b = m.col_range(kept, total);
    let y = a.mul(f, x.x()).add(f, &b.mul(f, &z));
    let shot = ReceiverShot::discarding_dependent(f, &y, n, x.lifting())?;
    Ok((shot, ChannelShot { a, b, z }))
}

/// Receiver-side view of one shot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// `m x n` matrix whose vector form is handed to the block decoders.
    pub r: BaseMatrix,
    pub side: ErasureSideInfo,
    /// Identity columns without a pivot, in increasing order.
    pub u: Vec<usize>,
    /// The echelon form padded with zero rows to `n + rho` rows.
    pub rre0: BaseMatrix,
}

impl Decomposition {
    pub fn rho(&self) -> usize {
        self.side.rho()
    }

    pub fn gamma(&self) -> usize {
        self.side.gamma()
    }

    /// Rebuilds `[[I_n + B_C^T I_U^T, R^T], [0, A_R^T]]` from the parts and
    /// checks it against the padded echelon form, together with
    /// `I_U^T R^T = 0` and `I_U^T B_C^T = -I_gamma`.
    pub fn identities_hold(&self, f: &BaseField) -> bool {
        let n = self.r.cols();
        let m = self.r.rows();
        let (rho, gamma) = (self.rho(), self.gamma());
        let b_ct = self.side.b_c().transpose();
        if self.u.len() != gamma || b_ct.rows() != n || self.rre0.rows() != n + rho {
            return false;
        }
        let mut i_u = BaseMatrix::zeros(n, gamma);
        for (j, &u) in self.u.iter().enumerate() {
            i_u[(u, j)] = f.one();
        }
        let top_left = BaseMatrix::identity(f, n).add(f, &b_ct.mul(f, &i_u.transpose()));
        let top = top_left.hstack(&self.r.transpose());
        let bottom = BaseMatrix::zeros(rho, n).hstack(&self.side.a_r().transpose());
        if top.vstack(&bottom) != self.rre0 {
            return false;
        }
        let minus_i = BaseMatrix::zeros(gamma, gamma).sub(f, &BaseMatrix::identity(f, gamma));
        i_u.transpose().mul(f, &self.r.transpose()) == BaseMatrix::zeros(gamma, m)
            && i_u.transpose().mul(f, &b_ct) == minus_i
    }
}

/// Splits the echelon form of a received shot into `R`, `A_R` and `B_C`.
pub fn rre_decompose(f: &ExtField, shot: &ReceiverShot) -> Result<Decomposition> {
    let bf = f.base();
    let n = shot.n();
    let m = f.m();
    let mut y = shot.linear_y(bf);
    if y.cols() != n + m {
        return Err(Error::DimensionMismatch {
            expected: n + m,
            found: y.cols(),
        });
    }
    let pivots = y.rref(bf);
    if pivots.len() != y.rows() {
        return Err(Error::MalformedShot(format!(
            "{} rows but rank {}",
            y.rows(),
            pivots.len()
        )));
    }
    let a_rank = pivots.iter().filter(|&&p| p < n).count();
    let rho = pivots.len() - a_rank;
    let u: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    // Row i of the top block is the echelon row with pivot i, or zero.
    let mut rre0 = BaseMatrix::zeros(n + rho, n + m);
    for (row, &p) in pivots.iter().enumerate() {
        let target = if p < n { p } else { n + row - a_rank };
        rre0.row_mut(target).copy_from_slice(y.row(row));
    }
    let minus_one = bf.neg(bf.one());
    let mut b_c = BaseMatrix::zeros(u.len(), n);
    for (j, &uj) in u.iter().enumerate() {
        for i in 0..n {
            b_c[(j, i)] = if i == uj { minus_one } else { rre0[(i, uj)] };
        }
    }
    let r = rre0.row_range(0, n).col_range(n, n + m).transpose();
    let a_r = rre0.row_range(n, n + rho).col_range(n, n + m).transpose();
    let side = ErasureSideInfo::new(f, n, a_r, b_c)?;
    Ok(Decomposition { r, side, u, rre0 })
}

/// Per-shot receiver statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotDiagnostics {
    pub received: usize,
    pub rho: usize,
    pub gamma: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NetworkFailure {
    #[error("shot {shot}: {source}")]
    Shot { shot: usize, source: Error },
    #[error("sequence decoding failed: {failure}")]
    Decode {
        failure: BrdFailure,
        shots: Vec<ShotDiagnostics>,
    },
    #[error("blocks {failed:?} could not be recovered")]
    Incomplete {
        failed: Vec<usize>,
        shots: Vec<ShotDiagnostics>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkOutput {
    pub info: Vec<Vec<ExtElem>>,
    pub shots: Vec<ShotDiagnostics>,
    pub decoder: BrdOutput,
}

/// Received blocks for the sequence decoder, one per shot.
pub fn receive(f: &ExtField, shots: &[ReceiverShot]) -> core::result::Result<(Vec<ReceivedBlock>, Vec<ShotDiagnostics>), NetworkFailure> {
    let mut blocks = Vec::with_capacity(shots.len());
    let mut diag = Vec::with_capacity(shots.len());
    for (i, shot) in shots.iter().enumerate() {
        let wrap = |source| NetworkFailure::Shot { shot: i, source };
        let d = rre_decompose(f, shot).map_err(wrap)?;
        diag.push(ShotDiagnostics {
            received: shot.received(),
            rho: d.rho(),
            gamma: d.gamma(),
        });
        let r = f.matrix_to_ext(&d.r).map_err(wrap)?;
        blocks.push(ReceivedBlock::new(r, d.side).map_err(wrap)?);
    }
    Ok((blocks, diag))
}

/// Decodes a sequence of received shots to the information sequence.
pub fn network_decode(
    f: &ExtField,
    code: &PumCode,
    shots: &[ReceiverShot],
) -> core::result::Result<NetworkOutput, NetworkFailure> {
    let (blocks, diag) = receive(f, shots)?;
    let out = brd_decode_arbitrary_rate(f, code, &blocks).map_err(|failure| NetworkFailure::Decode {
        failure,
        shots: diag.clone(),
    })?;
    match out.info() {
        Some(info) => Ok(NetworkOutput {
            info,
            shots: diag,
            decoder: out,
        }),
        None => Err(NetworkFailure::Incomplete {
            failed: (0..out.status.len())
                .filter(|&i| out.code_sequence[i].is_none())
                .collect(),
            shots: diag,
        }),
    }
}
