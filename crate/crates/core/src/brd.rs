//! Bounded row distance (BRD) error-erasure decoding of (P)UM codes.
//!
//! The decoder builds a reduced trellis from block decoder outputs and runs a
//! min-sum Viterbi search on it:
//!
//! 1. Every block is decoded on its own: block 0 with `C0`, blocks
//!    `1..N-1` with `Csigma`, block `N` with the tail code (`C10`, or `C1`
//!    with a zero check when `phi > 0`). A success becomes a candidate edge
//!    once its states can be reconstructed; every block gets a metric `m`,
//!    the rank distance on success and `floor((d_sigma + 1 + rho + gamma) / 2)`
//!    otherwise.
//! 2. From every Step-1 candidate (and from the known zero states at both
//!    ends) the decoder walks `l_f` blocks forward with `C0` and `l_b` blocks
//!    backward with `C1`, subtracting the contribution of the known state.
//!    A walk stops at its first failure.
//! 3. Depths are visited left to right. For every pair of an incoming state
//!    that continues an edge of the previous depth and an outgoing state
//!    wanted by the next depth, not yet connected by an edge, both known
//!    contributions are subtracted and the residual is decoded with `C01`.
//!    Depth `N` instead receives the forced edge `s G1` for every such
//!    incoming state `s`.
//! 4. Runs of depths without any edge are bridged by wildcard edges with the
//!    metric `floor((d01 + 1 + rho + gamma) / 2)` per block, and the path of
//!    smallest total metric is selected.
//!
//! Ties in step 4 are broken by total metric, then by the steps that produced
//! the edges (compared depth by depth), then by the position of the edges in
//! their canonically sorted level.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{ExtElem, ExtField, Field};
use crate::gabidulin::{effective_error_rank, random_error, Decoded, ErasureSideInfo, GabidulinCode};
use crate::matrix::Matrix;
use crate::pum::{Designed, Direction, PumCode};
use crate::rank::rank_distance;

/// One received block with its erasure side information.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceivedBlock {
    pub r: Vec<ExtElem>,
    pub side: ErasureSideInfo,
}

impl ReceivedBlock {
    pub fn new(r: Vec<ExtElem>, side: ErasureSideInfo) -> Result<Self> {
        if side.n() != r.len() {
            return Err(Error::DimensionMismatch {
                expected: r.len(),
                found: side.n(),
            });
        }
        Ok(ReceivedBlock { r, side })
    }

    /// A block without erasures.
    pub fn plain(f: &ExtField, r: Vec<ExtElem>) -> Self {
        let side = ErasureSideInfo::none(f.m(), r.len());
        ReceivedBlock { r, side }
    }

    /// `rho + gamma`.
    pub fn erasures(&self) -> usize {
        self.side.rho() + self.side.gamma()
    }
}

/// Which step of the decoder produced an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Blockwise,
    Forward,
    Backward,
    GapClose,
    Wildcard,
}

impl Origin {
    /// Step number used for tie-breaking (wildcards come last).
    pub fn step(&self) -> u8 {
        match self {
            Origin::Blockwise => 1,
            Origin::Forward | Origin::Backward => 2,
            Origin::GapClose => 3,
            Origin::Wildcard => 4,
        }
    }
}

/// The block decoders the algorithm calls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decoder {
    C0,
    C1,
    C01,
    CSigma,
    C10,
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decoder::C0 => "C0",
            Decoder::C1 => "C1",
            Decoder::C01 => "C01",
            Decoder::CSigma => "Csigma",
            Decoder::C10 => "C10",
        })
    }
}

/// An edge of the reduced trellis.
///
/// `in_state` is `u(i-1)[..k1]` and `out_state` is `u(i)[..k1]`. Wildcard
/// edges carry no code block and may span several depths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrellisCandidate {
    pub depth: usize,
    pub c: Vec<ExtElem>,
    pub in_state: Vec<ExtElem>,
    pub out_state: Vec<ExtElem>,
    /// `u(i)`; `None` at depth `N` and for wildcards.
    pub info: Option<Vec<ExtElem>>,
    pub metric: usize,
    pub origin: Origin,
    pub wildcard: bool,
    /// Number of depths covered (1 unless a wildcard bridges a longer run).
    pub span: usize,
}

impl TrellisCandidate {
    fn same_edge(&self, other: &TrellisCandidate) -> bool {
        self.span == other.span
            && self.c == other.c
            && self.in_state == other.in_state
            && self.out_state == other.out_state
    }
}

/// Per-depth edge lists; edges connect when `out_state` at depth `i` equals
/// `in_state` at the depth where the next edge starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedTrellis {
    pub k1: usize,
    pub levels: Vec<Vec<TrellisCandidate>>,
}

impl ReducedTrellis {
    /// Sorts every level into the canonical order used for tie-breaking.
    pub fn canonicalize(&mut self) {
        for level in &mut self.levels {
            level.sort_by(|a, b| {
                (a.origin.step(), &a.c, &a.in_state, &a.out_state, a.span).cmp(&(
                    b.origin.step(),
                    &b.c,
                    &b.in_state,
                    &b.out_state,
                    b.span,
                ))
            });
        }
    }
}

/// A complete path: `(depth, index in level)` per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrellisPath {
    pub edges: Vec<(usize, usize)>,
    pub metric: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct PathKey {
    metric: usize,
    steps: Vec<u8>,
    idx: Vec<usize>,
}

/// Min-sum search from the zero state before depth 0 to the zero state after
/// the last depth. `None` when no complete path exists.
pub fn viterbi_min_sum(trellis: &ReducedTrellis) -> Option<TrellisPath> {
    let len = trellis.levels.len();
    let zero = vec![ExtElem::ZERO; trellis.k1];
    let mut best: Vec<BTreeMap<Vec<ExtElem>, (PathKey, Vec<(usize, usize)>)>> =
        vec![BTreeMap::new(); len + 1];
    best[0].insert(
        zero.clone(),
        (
            PathKey {
                metric: 0,
                steps: Vec::new(),
                idx: Vec::new(),
            },
            Vec::new(),
        ),
    );
    for b in 0..len {
        let nodes = core::mem::take(&mut best[b]);
        for (state, (key, edges)) in &nodes {
            for (idx, cand) in trellis.levels[b].iter().enumerate() {
                let end = b + cand.span;
                if &cand.in_state != state || end > len {
                    continue;
                }
                let mut k = key.clone();
                k.metric += cand.metric;
                for _ in 0..cand.span {
                    k.steps.push(cand.origin.step());
                    k.idx.push(idx);
                }
                let slot = best[end].get(&cand.out_state);
                if slot.is_none_or(|(old, _)| k < *old) {
                    let mut e = edges.clone();
                    e.push((b, idx));
                    best[end].insert(cand.out_state.clone(), (k, e));
                }
            }
        }
        best[b] = nodes;
    }
    best[len].get(&zero).map(|(k, e)| TrellisPath {
        edges: e.clone(),
        metric: k.metric,
    })
}

/// Smallest `j` for which the accumulated slack of the blocks ahead reaches
/// half the designed distance of order `j` minus their erasures.
///
/// `metrics` and `erasures` list the blocks in walking order starting with
/// the first block after the anchor. `dir` selects the designed distance
/// (`Column` forward, `ReverseColumn` backward, `Row` for the row-distance
/// variants) and `ell > 0` delays the slack by `ell` blocks and divides it by
/// `ell + 1`, the prolonged extent of the arbitrary-rate construction. When
/// no `j` qualifies the full slice length is returned.
pub fn window_extent(
    code: &PumCode,
    metrics: &[usize],
    erasures: &[usize],
    dir: Direction,
    ell: usize,
) -> usize {
    let len = metrics.len().min(erasures.len());
    let ds = code.profile().d_sigma as i64;
    let div = Ratio::from_integer(ell as i64 + 1);
    let two = Ratio::from_integer(2);
    let mut slack = Ratio::from_integer(0);
    let mut er = 0i64;
    for j in 1..=len {
        er += erasures[j - 1] as i64;
        if j > ell {
            slack += Ratio::from_integer(ds - metrics[j - ell - 1] as i64) / div;
        }
        // Orders start at 1, so `designed` cannot fail here.
        if let Ok(Designed::Finite(d)) = code.designed(dir, j) {
            if slack >= (d - Ratio::from_integer(er)) / two {
                return j;
            }
        }
    }
    len
}

/// First window `(start, len)` with `sum(2t + rho + gamma) >= d_r_des(len)`,
/// or `None` when every window satisfies the BRD condition. `weights[i]` is
/// `(t, rho + gamma)` of block `i`.
pub fn brd_violation(code: &PumCode, weights: &[(usize, usize)]) -> Option<(usize, usize)> {
    for i in 0..weights.len() {
        let mut sum = 0i64;
        for j in 1..=weights.len() - i {
            let (t, e) = weights[i + j - 1];
            sum += 2 * t as i64 + e as i64;
            if let Ok(Designed::Finite(d)) = code.designed(Direction::Row, j) {
                if Ratio::from_integer(sum) >= d {
                    return Some((i, j));
                }
            }
        }
    }
    None
}

pub fn brd_condition_holds(code: &PumCode, weights: &[(usize, usize)]) -> bool {
    brd_violation(code, weights).is_none()
}

/// One diagnostic line: one block decoder call (or its cached result).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: u8,
    pub depth: usize,
    pub decoder: Decoder,
    pub success: bool,
    pub metric: Option<usize>,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step={} depth={} decoder={} outcome={}",
            self.step,
            self.depth,
            self.decoder,
            if self.success { "ok" } else { "fail" }
        )?;
        match self.metric {
            Some(m) => write!(f, " metric={m}"),
            None => f.write_str(" metric=-"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockStatus {
    Decoded(Origin),
    /// The winning path bridged this block with a wildcard edge.
    Failed,
}

/// Everything the decoder saw on the way, for diagnostics and tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrdReport {
    pub step1_metrics: Vec<usize>,
    pub step1_success: Vec<bool>,
    pub forward_extents: Vec<usize>,
    pub backward_extents: Vec<usize>,
    /// The trellis levels after Step 2.
    pub after_step2: Vec<Vec<TrellisCandidate>>,
    pub trellis: ReducedTrellis,
    /// Block decoder invocations per depth (cache hits excluded).
    pub bmd_calls: Vec<usize>,
    pub trace: Vec<TraceEvent>,
}

impl BrdReport {
    /// Per-step outcome marks, one row per step and one entry per depth:
    /// Step 1 is marked everywhere; Step 2 only at depths without a Step-1
    /// edge that some walk reached; Step 3 at depths still empty after
    /// Step 2. `None` means the step did not touch the depth.
    pub fn step_marks(&self) -> [Vec<Option<bool>>; 3] {
        let len = self.step1_success.len();
        let s1 = self.step1_success.iter().map(|&b| Some(b)).collect();
        let s2 = (0..len)
            .map(|d| {
                if self.step1_success[d] {
                    None
                } else if !self.after_step2[d].is_empty() {
                    Some(true)
                } else if self.trace.iter().any(|e| e.step == 2 && e.depth == d) {
                    Some(false)
                } else {
                    None
                }
            })
            .collect();
        let s3 = (0..len)
            .map(|d| {
                if !self.after_step2[d].is_empty() {
                    None
                } else {
                    Some(self.trellis.levels[d].iter().any(|x| !x.wildcard))
                }
            })
            .collect();
        [s1, s2, s3]
    }

    /// For every gap between consecutive depths whose Step-1 candidate is
    /// correct (the ends of the sequence count as such), the number of depths
    /// inside the gap that still lack the correct edge after Step 2.
    pub fn uncovered_per_gap(
        &self,
        f: &ExtField,
        code: &PumCode,
        info: &[Vec<ExtElem>],
    ) -> Result<Vec<usize>> {
        let truth = correct_edges(f, code, info)?;
        let has = |level: &[TrellisCandidate], d: usize, origin: Option<Origin>| {
            let (c, i, o) = &truth[d];
            level.iter().any(|x| {
                origin.is_none_or(|og| x.origin == og)
                    && &x.c == c
                    && &x.in_state == i
                    && &x.out_state == o
            })
        };
        let mut anchors = vec![-1i64];
        for (d, level) in self.after_step2.iter().enumerate() {
            if has(level, d, Some(Origin::Blockwise)) {
                anchors.push(d as i64);
            }
        }
        anchors.push(self.after_step2.len() as i64);
        let mut gaps = Vec::new();
        for w in anchors.windows(2) {
            if w[1] - w[0] > 1 {
                let missing = ((w[0] + 1) as usize..w[1] as usize)
                    .filter(|&d| !has(&self.after_step2[d], d, None))
                    .count();
                gaps.push(missing);
            }
        }
        Ok(gaps)
    }
}

/// Passes `blocks` through an error of exact shape `(t, rho, gamma)` per
/// block and attaches the matching side information.
pub fn corrupt<R: Rng + ?Sized>(
    f: &ExtField,
    blocks: &[Vec<ExtElem>],
    shape: &[(usize, usize, usize)],
    rng: &mut R,
) -> Result<Vec<ReceivedBlock>> {
    if blocks.len() != shape.len() {
        return Err(Error::DimensionMismatch {
            expected: blocks.len(),
            found: shape.len(),
        });
    }
    blocks
        .iter()
        .zip(shape)
        .map(|(c, &(t, rho, gamma))| {
            let e = random_error(f, c.len(), t, rho, gamma, rng)?;
            let r = add(f, c, &e.vector(f));
            ReceivedBlock::new(r, e.side_info())
        })
        .collect()
}

/// `(c, in_state, out_state)` of the transmitted path for info blocks `info`.
pub fn correct_edges(
    f: &ExtField,
    code: &PumCode,
    info: &[Vec<ExtElem>],
) -> Result<Vec<(Vec<ExtElem>, Vec<ExtElem>, Vec<ExtElem>)>> {
    let blocks = code.encode(f, info)?;
    let zero = vec![ExtElem::ZERO; code.k1()];
    Ok(blocks
        .into_iter()
        .enumerate()
        .map(|(d, c)| {
            let i = if d == 0 {
                zero.clone()
            } else {
                code.state_of(&info[d - 1])
            };
            let o = if d == info.len() {
                zero.clone()
            } else {
                code.state_of(&info[d])
            };
            (c, i, o)
        })
        .collect())
}

/// Why no code sequence was produced.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BrdFailure {
    #[error("no state-consistent path through the reduced trellis")]
    NoPath,
    #[error("malformed input: {0}")]
    Malformed(Error),
}

impl From<Error> for BrdFailure {
    fn from(e: Error) -> Self {
        BrdFailure::Malformed(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrdOutput {
    /// `None` where the path used a wildcard edge.
    pub code_sequence: Vec<Option<Vec<ExtElem>>>,
    pub info_sequence: Vec<Option<Vec<ExtElem>>>,
    pub status: Vec<BlockStatus>,
    pub metric: usize,
    pub report: BrdReport,
}

impl BrdOutput {
    pub fn is_complete(&self) -> bool {
        self.status
            .iter()
            .all(|s| matches!(s, BlockStatus::Decoded(_)))
    }

    pub fn sequence(&self) -> Option<Vec<Vec<ExtElem>>> {
        self.code_sequence.iter().cloned().collect()
    }

    pub fn info(&self) -> Option<Vec<Vec<ExtElem>>> {
        self.info_sequence.iter().cloned().collect()
    }
}

/// BRD decoding of a low-rate (`phi = 0`) code.
pub fn brd_decode(
    f: &ExtField,
    code: &PumCode,
    received: &[ReceivedBlock],
) -> core::result::Result<BrdOutput, BrdFailure> {
    if code.phi() != 0 {
        return Err(BrdFailure::Malformed(Error::InvalidParameters(
            "phi > 0 needs brd_decode_arbitrary_rate".into(),
        )));
    }
    Decoding::new(f, code, received)?.run()
}

/// BRD decoding of the arbitrary-rate construction: Step-1 candidates need
/// `ell + 1` consecutive successes to recover their states and the forward
/// extents are prolonged by `ell`. Equals [`brd_decode`] when `phi = 0`.
pub fn brd_decode_arbitrary_rate(
    f: &ExtField,
    code: &PumCode,
    received: &[ReceivedBlock],
) -> core::result::Result<BrdOutput, BrdFailure> {
    Decoding::new(f, code, received)?.run()
}

type CacheKey = (usize, Decoder, Vec<ExtElem>);

struct Decoding<'a> {
    f: &'a ExtField,
    code: &'a PumCode,
    rx: &'a [ReceivedBlock],
    /// Index of the last block (`N`).
    last: usize,
    g0_top: Matrix<ExtElem>,
    g1_top: Matrix<ExtElem>,
    zero: Vec<ExtElem>,
    cache: BTreeMap<CacheKey, Option<Decoded>>,
    bmd_calls: Vec<usize>,
    trace: Vec<TraceEvent>,
    levels: Vec<Vec<TrellisCandidate>>,
}

fn sub(f: &ExtField, a: &[ExtElem], b: &[ExtElem]) -> Vec<ExtElem> {
    a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
}

fn add(f: &ExtField, a: &[ExtElem], b: &[ExtElem]) -> Vec<ExtElem> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

fn is_zero(v: &[ExtElem]) -> bool {
    v.iter().all(|&x| x == ExtElem::ZERO)
}

impl<'a> Decoding<'a> {
    fn new(f: &'a ExtField, code: &'a PumCode, rx: &'a [ReceivedBlock]) -> Result<Self> {
        if rx.len() < 2 {
            return Err(Error::InvalidParameters(format!(
                "need at least 2 received blocks, got {}",
                rx.len()
            )));
        }
        for b in rx {
            if b.r.len() != code.n() {
                return Err(Error::DimensionMismatch {
                    expected: code.n(),
                    found: b.r.len(),
                });
            }
            if b.side.n() != code.n() || b.side.a_r().rows() != f.m() {
                return Err(Error::DimensionMismatch {
                    expected: code.n(),
                    found: b.side.n(),
                });
            }
        }
        let k1 = code.k1();
        Ok(Decoding {
            f,
            code,
            rx,
            last: rx.len() - 1,
            g0_top: code.g0().row_range(0, k1),
            g1_top: code.g1().row_range(0, k1),
            zero: vec![ExtElem::ZERO; k1],
            cache: BTreeMap::new(),
            bmd_calls: vec![0; rx.len()],
            trace: Vec::new(),
            levels: vec![Vec::new(); rx.len()],
        })
    }

    fn subcode(&self, d: Decoder) -> Option<&'a GabidulinCode> {
        let code = self.code;
        match d {
            Decoder::C0 => Some(code.c0()),
            Decoder::C1 => Some(code.c1()),
            Decoder::C01 => code.c01(),
            Decoder::CSigma => Some(code.c_sigma()),
            Decoder::C10 => Some(code.tail_code()),
        }
    }

    fn bmd(&mut self, depth: usize, dec: Decoder, residual: Vec<ExtElem>) -> Option<Decoded> {
        let key = (depth, dec, residual);
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        self.bmd_calls[depth] += 1;
        let out = self
            .subcode(dec)
            .and_then(|c| c.decode_ee(self.f, &key.2, &self.rx[depth].side).ok());
        self.cache.insert(key, out.clone());
        out
    }

    /// An existing edge at `depth` that the walk would reach anyway. When
    /// it lies within the unique decoding radius of a code of distance
    /// `dist`, the decoder can only return this block, so no call is made.
    fn reuse(
        &self,
        depth: usize,
        dist: usize,
        keep: impl Fn(&TrellisCandidate) -> bool,
    ) -> Option<TrellisCandidate> {
        let rx = &self.rx[depth];
        self.levels[depth]
            .iter()
            .filter(|x| !x.wildcard && keep(x))
            .find(|x| {
                let e = self.f.ext_to_matrix(&sub(self.f, &rx.r, &x.c));
                2 * effective_error_rank(self.f, &e, &rx.side) + rx.erasures() < dist
            })
            .cloned()
    }

    fn metric(&self, depth: usize, c: &[ExtElem]) -> usize {
        rank_distance(self.f, &self.rx[depth].r, c).unwrap_or(usize::MAX)
    }

    fn event(&mut self, step: u8, depth: usize, decoder: Decoder, metric: Option<usize>) {
        self.trace.push(TraceEvent {
            step,
            depth,
            decoder,
            success: metric.is_some(),
            metric,
        });
    }

    /// Adds an edge unless an identical one exists; a duplicate keeps the
    /// earlier origin.
    fn push(&mut self, cand: TrellisCandidate) -> bool {
        let level = &mut self.levels[cand.depth];
        if let Some(old) = level.iter_mut().find(|x| x.same_edge(&cand)) {
            if (cand.metric, cand.origin) < (old.metric, old.origin) {
                old.metric = cand.metric;
                old.origin = cand.origin;
            }
            return false;
        }
        level.push(cand);
        true
    }

    fn edge(
        &self,
        depth: usize,
        c: Vec<ExtElem>,
        in_state: Vec<ExtElem>,
        info: Option<Vec<ExtElem>>,
        origin: Origin,
    ) -> TrellisCandidate {
        let out_state = info
            .as_ref()
            .map_or_else(|| self.zero.clone(), |u| self.code.state_of(u));
        TrellisCandidate {
            depth,
            metric: self.metric(depth, &c),
            c,
            in_state,
            out_state,
            info,
            origin,
            wildcard: false,
            span: 1,
        }
    }

    fn else_metric(&self, d: usize, depth: usize) -> usize {
        (d + 1 + self.rx[depth].erasures()) / 2
    }

    fn step1(&mut self, ell: usize) -> (Vec<usize>, Vec<bool>) {
        let last = self.last;
        let mut hats: Vec<Option<(Vec<ExtElem>, Vec<ExtElem>)>> = Vec::with_capacity(last + 1);
        let mut decs = Vec::with_capacity(last + 1);
        for d in 0..=last {
            let dec = if d == 0 {
                Decoder::C0
            } else if d == last {
                Decoder::C10
            } else {
                Decoder::CSigma
            };
            decs.push(dec);
            let r = self.rx[d].r.clone();
            let hat = self.bmd(d, dec, r).and_then(|x| {
                let h = self.code.hat_of_block(self.f, d, last, &x.codeword).ok()?;
                Some((x.codeword, h))
            });
            hats.push(hat);
        }
        // Windows of consecutive successes around each depth; `2 ell + 2`
        // blocks always suffice to pin down `u(i)` and `u(i-1)[..k1]`.
        let reach = if ell == 0 { 0 } else { 2 * ell + 1 };
        let mut success = vec![false; last + 1];
        for d in 0..=last {
            let Some((c, _)) = &hats[d] else { continue };
            let c = c.clone();
            for a in d.saturating_sub(reach)..=d {
                for b in d..=(a + reach).min(last) {
                    if (a..=b).any(|x| hats[x].is_none()) {
                        continue;
                    }
                    let window: Vec<_> = (a..=b)
                        .map(|x| (x, hats[x].as_ref().unwrap().1.clone()))
                        .collect();
                    let Ok(vals) = self.code.solve_hats_partial(self.f, last, &window) else {
                        continue;
                    };
                    let k1 = self.code.k1();
                    let in_state = if d == 0 {
                        Some(self.zero.clone())
                    } else {
                        vals[d - 1][..k1]
                            .iter()
                            .copied()
                            .collect::<Option<Vec<_>>>()
                    };
                    let info = if d == last {
                        Some(None)
                    } else {
                        vals[d]
                            .iter()
                            .copied()
                            .collect::<Option<Vec<_>>>()
                            .map(Some)
                    };
                    if let (Some(i), Some(u)) = (in_state, info) {
                        let cand = self.edge(d, c.clone(), i, u, Origin::Blockwise);
                        self.push(cand);
                        success[d] = true;
                    }
                }
            }
        }
        let ds = self.code.profile().d_sigma;
        let metrics: Vec<usize> = (0..=last)
            .map(|d| {
                self.levels[d]
                    .iter()
                    .map(|x| x.metric)
                    .min()
                    .unwrap_or_else(|| self.else_metric(ds, d))
            })
            .collect();
        for d in 0..=last {
            let m = success[d].then_some(metrics[d]);
            self.event(1, d, decs[d], m);
        }
        (metrics, success)
    }

    /// Decodes `len` blocks starting at depth `start`, entering with state `s`.
    fn forward(&mut self, start: usize, mut s: Vec<ExtElem>, len: usize) {
        let k1 = self.code.k1();
        for d in start..(start + len).min(self.last + 1) {
            if let Some(mut hit) = self.reuse(d, self.code.c0().d(), |x| x.in_state == s) {
                hit.origin = Origin::Forward;
                self.event(2, d, Decoder::C0, Some(hit.metric));
                s = hit.out_state.clone();
                self.push(hit);
                continue;
            }
            let known = self.g1_top.vec_mul(self.f, &s);
            let residual = sub(self.f, &self.rx[d].r, &known);
            let next = self.bmd(d, Decoder::C0, residual).and_then(|x| {
                if d == self.last && !is_zero(&x.info) {
                    return None;
                }
                Some(x)
            });
            let Some(x) = next else {
                self.event(2, d, Decoder::C0, None);
                return;
            };
            let c = add(self.f, &x.codeword, &known);
            let info = (d < self.last).then(|| x.info.clone());
            let cand = self.edge(d, c, s, info, Origin::Forward);
            let out = cand.out_state.clone();
            self.event(2, d, Decoder::C0, Some(cand.metric));
            self.push(cand);
            s = out;
            debug_assert_eq!(s.len(), k1);
        }
    }

    /// Decodes `len` blocks backwards ending at depth `end - 1`, where `s` is
    /// the state leaving that block.
    fn backward(&mut self, end: usize, mut s: Vec<ExtElem>, len: usize) {
        let (k, k1, phi) = (self.code.k(), self.code.k1(), self.code.phi());
        for d in (end.saturating_sub(len)..end).rev() {
            let zero_in = d == 0;
            let found = self.reuse(d, self.code.c1().d(), |x| {
                x.out_state == s && (!zero_in || is_zero(&x.in_state))
            });
            if let Some(mut hit) = found {
                hit.origin = Origin::Backward;
                self.event(2, d, Decoder::C1, Some(hit.metric));
                s = hit.in_state.clone();
                self.push(hit);
                continue;
            }
            let known = self.g0_top.vec_mul(self.f, &s);
            let residual = sub(self.f, &self.rx[d].r, &known);
            let next = self.bmd(d, Decoder::C1, residual).and_then(|x| {
                let mut in_state = x.info[..phi].to_vec();
                in_state.extend_from_slice(&x.info[phi + k - k1..]);
                let upper = x.info[phi..phi + k - k1].to_vec();
                if (d == 0 && !is_zero(&in_state)) || (d == self.last && !is_zero(&upper)) {
                    return None;
                }
                Some((x.codeword, in_state, upper))
            });
            let Some((cw, in_state, upper)) = next else {
                self.event(2, d, Decoder::C1, None);
                return;
            };
            let c = add(self.f, &cw, &known);
            let info = (d < self.last).then(|| {
                let mut u = s.clone();
                u.extend_from_slice(&upper);
                u
            });
            let cand = self.edge(d, c, in_state.clone(), info, Origin::Backward);
            self.event(2, d, Decoder::C1, Some(cand.metric));
            self.push(cand);
            s = in_state;
        }
    }

    fn step2(&mut self, metrics: &[usize], ell: usize) -> (Vec<usize>, Vec<usize>) {
        let last = self.last;
        let er: Vec<usize> = self.rx.iter().map(ReceivedBlock::erasures).collect();
        let anchors: Vec<(usize, Vec<ExtElem>, Vec<ExtElem>)> = self
            .levels
            .iter()
            .flatten()
            .filter(|x| x.origin == Origin::Blockwise)
            .map(|x| (x.depth, x.in_state.clone(), x.out_state.clone()))
            .collect();
        // Forward anchors are "after depth a - 1", backward ones "before depth b".
        let mut fwd = vec![(0usize, self.zero.clone())];
        let mut bwd = Vec::new();
        for (d, i, o) in &anchors {
            fwd.push((d + 1, o.clone()));
            bwd.push((*d, i.clone()));
        }
        bwd.push((last + 1, self.zero.clone()));
        let mut lf = Vec::new();
        for (start, s) in fwd {
            if start > last {
                continue;
            }
            let l = window_extent(
                self.code,
                &metrics[start..],
                &er[start..],
                Direction::Column,
                ell,
            );
            lf.push(l);
            self.forward(start, s, l);
        }
        let mut lb = Vec::new();
        for (end, s) in bwd {
            if end == 0 {
                continue;
            }
            let m: Vec<usize> = metrics[..end].iter().rev().copied().collect();
            let e: Vec<usize> = er[..end].iter().rev().copied().collect();
            let l = window_extent(self.code, &m, &e, Direction::ReverseColumn, 0);
            lb.push(l);
            self.backward(end, s, l);
        }
        (lf, lb)
    }

    fn states(&self, depth: usize, outgoing: bool) -> Vec<Vec<ExtElem>> {
        let set: BTreeSet<Vec<ExtElem>> = self.levels[depth]
            .iter()
            .map(|x| {
                if outgoing {
                    x.out_state.clone()
                } else {
                    x.in_state.clone()
                }
            })
            .collect();
        set.into_iter().collect()
    }

    /// Out-states at `depth` of edges whose in-state is in `reach`.
    fn reached(&self, depth: usize, reach: &[Vec<ExtElem>]) -> Vec<Vec<ExtElem>> {
        let set: BTreeSet<Vec<ExtElem>> = self.levels[depth]
            .iter()
            .filter(|x| reach.contains(&x.in_state))
            .map(|x| x.out_state.clone())
            .collect();
        set.into_iter().collect()
    }

    fn step3(&mut self) {
        let last = self.last;
        let k1 = self.code.k1();
        // States reachable from the zero state through the edges so far,
        // including the ones this step adds on its way right.
        let mut lefts = vec![self.zero.clone()];
        for d in 0..=last {
            if d > 0 {
                let prev = core::mem::take(&mut lefts);
                lefts = self.reached(d - 1, &prev);
                if lefts.is_empty() {
                    // Beyond the guarantee the reachable frontier can die;
                    // restart from every state of the previous depth.
                    lefts = self.states(d - 1, true);
                }
            }
            if d == last {
                for s in lefts.clone() {
                    let c = self.g1_top.vec_mul(self.f, &s);
                    let cand = self.edge(d, c, s, None, Origin::GapClose);
                    let m = cand.metric;
                    if self.push(cand) {
                        self.event(3, d, Decoder::C10, Some(m));
                    }
                }
                continue;
            }
            let rights = self.states(d + 1, false);
            for l in &lefts {
                for r in &rights {
                    let connected = self.levels[d]
                        .iter()
                        .any(|x| &x.in_state == l && &x.out_state == r);
                    if connected {
                        continue;
                    }
                    let known = add(
                        self.f,
                        &self.g1_top.vec_mul(self.f, l),
                        &self.g0_top.vec_mul(self.f, r),
                    );
                    let upper = if self.code.c01().is_some() {
                        let residual = sub(self.f, &self.rx[d].r, &known);
                        self.bmd(d, Decoder::C01, residual)
                            .map(|x| (x.codeword, x.info))
                    } else {
                        Some((vec![ExtElem::ZERO; self.code.n()], Vec::new()))
                    };
                    let Some((cw, upper)) = upper else {
                        self.event(3, d, Decoder::C01, None);
                        continue;
                    };
                    let c = add(self.f, &cw, &known);
                    let mut u = r.clone();
                    u.extend_from_slice(&upper);
                    debug_assert_eq!(u[..k1], r[..]);
                    let cand = self.edge(d, c, l.clone(), Some(u), Origin::GapClose);
                    self.event(3, d, Decoder::C01, Some(cand.metric));
                    self.push(cand);
                }
            }
        }
    }

    /// Bridges what Steps 1 to 3 left open. Runs of depths without edges get
    /// one wildcard per pair of neighbouring states; so does every pair of
    /// neighbouring states that no edge of a non-empty depth connects.
    fn wildcards(&mut self) {
        let last = self.last;
        let d01 = self.code.profile().d01.unwrap_or(self.code.n() + 1);
        let bounds = |this: &Self, a: usize, b: usize| {
            let lefts = if a == 0 {
                vec![this.zero.clone()]
            } else {
                this.states(a - 1, true)
            };
            let rights = if b == last {
                vec![this.zero.clone()]
            } else {
                this.states(b + 1, false)
            };
            (lefts, rights)
        };
        let mut runs = Vec::new();
        let mut d = 0;
        while d <= last {
            let a = d;
            if self.levels[d].is_empty() {
                while d <= last && self.levels[d].is_empty() {
                    d += 1;
                }
            } else {
                d += 1;
            }
            runs.push((a, d - 1));
        }
        let mut extra = Vec::new();
        for (a, b) in runs {
            let (lefts, rights) = bounds(self, a, b);
            let metric = (a..=b).map(|x| self.else_metric(d01, x)).sum();
            for l in &lefts {
                for r in &rights {
                    let connected = self.levels[a].iter().any(|x| &x.in_state == l && &x.out_state == r);
                    if !connected {
                        extra.push(TrellisCandidate {
                            depth: a,
                            c: Vec::new(),
                            in_state: l.clone(),
                            out_state: r.clone(),
                            info: None,
                            metric,
                            origin: Origin::Wildcard,
                            wildcard: true,
                            span: b - a + 1,
                        });
                    }
                }
            }
        }
        for w in extra {
            let a = w.depth;
            self.levels[a].push(w);
        }
    }

    /// Re-encodes a single-depth wildcard when the neighbouring states fix
    /// the block.
    fn rederive(&self, w: &TrellisCandidate) -> Option<(Vec<ExtElem>, Option<Vec<ExtElem>>)> {
        if w.span != 1 {
            return None;
        }
        let prev = self.g1_top.vec_mul(self.f, &w.in_state);
        if w.depth == self.last {
            return Some((prev, None));
        }
        if self.code.k1() == self.code.k() {
            let cur = self.g0_top.vec_mul(self.f, &w.out_state);
            return Some((add(self.f, &prev, &cur), Some(w.out_state.clone())));
        }
        None
    }

    fn run(mut self) -> core::result::Result<BrdOutput, BrdFailure> {
        let ell = self.code.profile().ell;
        let (metrics, success) = self.step1(ell);
        let (lf, lb) = self.step2(&metrics, ell);
        let after_step2 = self.levels.clone();
        self.step3();
        self.wildcards();
        let mut trellis = ReducedTrellis {
            k1: self.code.k1(),
            levels: core::mem::take(&mut self.levels),
        };
        trellis.canonicalize();
        let path = viterbi_min_sum(&trellis).ok_or(BrdFailure::NoPath)?;
        let last = self.last;
        let mut code_sequence = vec![None; last + 1];
        let mut info_sequence = vec![None; last];
        let mut status = vec![BlockStatus::Failed; last + 1];
        for &(d, idx) in &path.edges {
            let e = &trellis.levels[d][idx];
            if e.wildcard {
                if let Some((c, u)) = self.rederive(e) {
                    code_sequence[d] = Some(c);
                    if d < last {
                        info_sequence[d] = u;
                    }
                    status[d] = BlockStatus::Decoded(Origin::Wildcard);
                }
                continue;
            }
            code_sequence[d] = Some(e.c.clone());
            if d < last {
                info_sequence[d] = e.info.clone();
            }
            status[d] = BlockStatus::Decoded(e.origin);
        }
        Ok(BrdOutput {
            code_sequence,
            info_sequence,
            status,
            metric: path.metric,
            report: BrdReport {
                step1_metrics: metrics,
                step1_success: success,
                forward_extents: lf,
                backward_extents: lb,
                after_step2,
                trellis,
                bmd_calls: self.bmd_calls,
                trace: self.trace,
            },
        })
    }
}
