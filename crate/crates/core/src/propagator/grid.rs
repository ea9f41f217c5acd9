//! Batched synthesis of `Σ_ξ e^{ix·ξ} c(ξ) hⁿ` on the nodes of a ball grid.
//!
//! Two evaluation paths:
//! * direct sums, parallel over nodes;
//! * an inverse FFT of order `M` when the grid spacing satisfies `Δx·h·M = 2π`.
//!   Lattice indices are folded modulo `M`, which keeps the transform exact for
//!   any support. Each axis pass transforms only lines that carry data and
//!   keeps only the `2J+1` output bins the ball needs.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};
use crate::spectral::{BallQuadrature, SpectralFunction};

/// Which evaluation path a batched synthesis uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalPath {
    /// Cheaper of the two by operation count.
    #[default]
    Auto,
    Direct,
    Fft,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One axis pass: every child block (a prefix of folded indices one longer than
/// its parent's) is scattered into its parent's line at position `q`.
struct Stage {
    parents: usize,
    // children of parent `p` are `members[offsets[p]..offsets[p + 1]]`
    offsets: Vec<usize>,
    members: Vec<(usize, usize)>,
}

pub(crate) struct FftGrid {
    order: usize,
    keep: Vec<usize>,
    fft: Arc<dyn Fft<f64>>,
    stages: Vec<Stage>,
    // index of each ball node in the pruned (2J+1)ⁿ output
    node_slots: Vec<usize>,
}

impl FftGrid {
    // transforms longer than this are not worth planning
    const MAX_ORDER: usize = 1 << 16;

    pub(crate) fn new(f: &SpectralFunction, ball: &BallQuadrature) -> Option<Self> {
        let order = ball.fft_order(f.lattice())?;
        let dim = ball.dim();
        if order > Self::MAX_ORDER {
            return None;
        }
        let reach = ball.reach() as usize;
        let width = 2 * reach + 1;
        let keep = (0..width)
            .map(|p| (p as i64 - reach as i64).rem_euclid(order as i64) as usize)
            .collect();
        let node_slots = ball
            .offsets()
            .iter()
            .map(|j| (0..dim).fold(0, |acc, a| acc * width + (j[a] + reach as i32) as usize))
            .collect();
        let fft = FftPlanner::new().plan_fft_inverse(order);
        Some(Self {
            order,
            keep,
            fft,
            stages: Self::plan_stages(f, order, dim),
            node_slots,
        })
    }

    fn plan_stages(f: &SpectralFunction, order: usize, dim: usize) -> Vec<Stage> {
        let m = order as i64;
        let mut keys: Vec<Vec<usize>> = f
            .padded_indices()
            .iter()
            .map(|k| (0..dim).map(|a| k[a].rem_euclid(m) as usize).collect())
            .collect();
        let mut stages = Vec::with_capacity(dim);
        for axis in (0..dim).rev() {
            let mut ids = BTreeMap::new();
            let mut parent_of = Vec::with_capacity(keys.len());
            for key in &keys {
                let next = ids.len();
                let id = *ids.entry(key[..axis].to_vec()).or_insert(next);
                parent_of.push((id, key[axis]));
            }
            let parents = ids.len();
            let mut offsets = vec![0usize; parents + 1];
            for &(p, _) in &parent_of {
                offsets[p + 1] += 1;
            }
            for p in 0..parents {
                offsets[p + 1] += offsets[p];
            }
            let mut fill = offsets.clone();
            let mut members = vec![(0, 0); parent_of.len()];
            for (child, &(p, q)) in parent_of.iter().enumerate() {
                members[fill[p]] = (child, q);
                fill[p] += 1;
            }
            let mut parent_keys = vec![Vec::new(); parents];
            for (key, id) in ids {
                parent_keys[id] = key;
            }
            keys = parent_keys;
            stages.push(Stage {
                parents,
                offsets,
                members,
            });
        }
        stages
    }

    fn width(&self) -> usize {
        self.keep.len()
    }

    /// Rough operation count of one synthesis, for path selection.
    pub(crate) fn cost(&self, modes: usize) -> f64 {
        let m = self.order as f64;
        let w = self.width() as f64;
        let lines: f64 = self
            .stages
            .iter()
            .enumerate()
            .map(|(i, s)| s.parents as f64 * w.powi(i as i32))
            .sum();
        lines * (m * m.log2() * 2.5 + m + w) + 2.0 * modes as f64
    }

    pub(crate) fn workspace(&self) -> Workspace {
        Workspace {
            input: Vec::new(),
            next: Vec::new(),
            buf: vec![ZERO; BATCH * self.order],
            scratch: vec![ZERO; self.fft.get_inplace_scratch_len()],
        }
    }

    /// Synthesizes `ws.input` (mode coefficients in support order) onto the ball
    /// nodes. `ws.input` is clobbered.
    pub(crate) fn synthesize(&self, ws: &mut Workspace, out: &mut [Complex64]) {
        let m = self.order;
        let w = self.width();
        let mut cur = std::mem::take(&mut ws.input);
        let mut next = std::mem::take(&mut ws.next);
        let mut block = 1usize;
        for stage in &self.stages {
            let next_block = block * w;
            // every entry is overwritten below, so stale contents are harmless
            next.resize(stage.parents * next_block, ZERO);
            for p in 0..stage.parents {
                let children = &stage.members[stage.offsets[p]..stage.offsets[p + 1]];
                for s0 in (0..block).step_by(BATCH) {
                    let n = BATCH.min(block - s0);
                    let lines = &mut ws.buf[..n * m];
                    lines.iter_mut().for_each(|v| *v = ZERO);
                    for &(child, q) in children {
                        let src = &cur[child * block + s0..child * block + s0 + n];
                        for (i, v) in src.iter().enumerate() {
                            lines[i * m + q] += v;
                        }
                    }
                    self.fft.process_with_scratch(lines, &mut ws.scratch);
                    let base = p * next_block + s0;
                    for (k, &bin) in self.keep.iter().enumerate() {
                        let dst = &mut next[base + k * block..base + k * block + n];
                        for (i, d) in dst.iter_mut().enumerate() {
                            *d = lines[i * m + bin];
                        }
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
            block = next_block;
        }
        for (o, &slot) in out.iter_mut().zip(&self.node_slots) {
            *o = cur.get(slot).copied().unwrap_or(ZERO);
        }
        ws.input = cur;
        ws.next = next;
    }
}

// lines transformed together, so child blocks are read contiguously
const BATCH: usize = 16;

pub(crate) struct Workspace {
    pub(crate) input: Vec<Complex64>,
    next: Vec<Complex64>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

/// Per-mode factors `c(ξ)·e^{ix₀·ξ}·hⁿ` that put the ball center at the origin.
pub(crate) fn centered_coefficients(f: &SpectralFunction, center: &[f64]) -> Vec<Complex64> {
    let w = f.lattice().cell_volume();
    let d = f.dim();
    f.padded_frequencies()
        .iter()
        .zip(f.coefficients())
        .map(|(xi, &c)| {
            let phase: f64 = (0..d).map(|a| center[a] * xi[a]).sum();
            c * Complex64::from_polar(w, phase)
        })
        .collect()
}

fn check_dims(f: &SpectralFunction, ball: &BallQuadrature) -> Result<()> {
    if f.dim() != ball.dim() {
        return Err(invalid(format!(
            "function lives in dimension {} but the ball in {}",
            f.dim(),
            ball.dim()
        )));
    }
    Ok(())
}

fn direct_cost(modes: usize, nodes: usize) -> f64 {
    modes as f64 * nodes as f64 * 12.0
}

pub(crate) enum Resolved {
    Direct,
    Fft(FftGrid),
}

pub(crate) fn resolve_path(
    f: &SpectralFunction,
    ball: &BallQuadrature,
    path: EvalPath,
    direct_cost: f64,
    fft_repeats: f64,
) -> Result<Resolved> {
    check_dims(f, ball)?;
    match path {
        EvalPath::Direct => Ok(Resolved::Direct),
        EvalPath::Fft => FftGrid::new(f, ball)
            .map(Resolved::Fft)
            .ok_or_else(|| invalid("ball grid is not commensurate with the frequency lattice")),
        EvalPath::Auto => Ok(match FftGrid::new(f, ball) {
            Some(grid) if fft_repeats * grid.cost(f.len()) < direct_cost => Resolved::Fft(grid),
            _ => Resolved::Direct,
        }),
    }
}

/// Values of `Σ e^{ix·ξ} f̂(ξ) hⁿ` at every ball node.
pub fn synthesize_field(f: &SpectralFunction, ball: &BallQuadrature, path: EvalPath) -> Result<Vec<Complex64>> {
    let resolved = resolve_path(f, ball, path, direct_cost(f.len(), ball.len()), 1.0)?;
    let coeffs = centered_coefficients(f, ball.center());
    Ok(match resolved {
        Resolved::Fft(grid) => {
            let mut out = vec![ZERO; ball.len()];
            let mut ws = grid.workspace();
            ws.input = coeffs;
            grid.synthesize(&mut ws, &mut out);
            out
        }
        Resolved::Direct => {
            let d = f.dim();
            let dx = ball.spacing();
            let freqs = f.padded_frequencies();
            ball.offsets()
                .par_iter()
                .map(|j| {
                    let mut acc = ZERO;
                    for (xi, &c) in freqs.iter().zip(&coeffs) {
                        let phase: f64 = (0..d).map(|a| dx * j[a] as f64 * xi[a]).sum();
                        acc += c * Complex64::from_polar(1.0, phase);
                    }
                    acc
                })
                .collect()
        }
    })
}

/// How each time slice multiplies the coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Kernel {
    /// `e^{itP(ξ)}`
    Evolution,
    /// `e^{itP(ξ)} − 1`
    Increment,
}

fn kernel_value(kernel: Kernel, t: f64, p: f64) -> Complex64 {
    let theta = t * p;
    match kernel {
        Kernel::Evolution => Complex64::from_polar(1.0, theta),
        Kernel::Increment => {
            let half = (0.5 * theta).sin();
            Complex64::new(-2.0 * half * half, theta.sin())
        }
    }
}

/// Kernel values `K_t(ξ)` for successive times of a chunk.
///
/// On uniformly spaced times the evolution kernel is advanced by one complex
/// multiplication per mode and re-anchored exactly every `ANCHOR` steps.
struct PhaseStepper<'a> {
    kernel: Kernel,
    times: &'a [f64],
    symbol_values: &'a [f64],
    step: Option<Vec<Complex64>>,
    current: Vec<Complex64>,
}

const ANCHOR: usize = 64;

impl<'a> PhaseStepper<'a> {
    fn new(kernel: Kernel, times: &'a [f64], symbol_values: &'a [f64]) -> Self {
        let uniform = kernel == Kernel::Evolution && times.len() > 2 && {
            let dt = times[1] - times[0];
            times
                .windows(2)
                .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-12 * dt.abs().max(f64::MIN_POSITIVE))
        };
        let step = uniform.then(|| {
            let dt = times[1] - times[0];
            symbol_values.iter().map(|&p| Complex64::from_polar(1.0, dt * p)).collect()
        });
        Self {
            kernel,
            times,
            symbol_values,
            step,
            current: Vec::with_capacity(symbol_values.len()),
        }
    }

    /// Kernel at `times[j]`; calls must run `j = 0, 1, 2, …`.
    fn advance(&mut self, j: usize) -> &[Complex64] {
        match &self.step {
            Some(step) if !j.is_multiple_of(ANCHOR) => {
                self.current.iter_mut().zip(step).for_each(|(c, s)| *c *= s);
            }
            _ => {
                let (kernel, t) = (self.kernel, self.times[j]);
                self.current.clear();
                self.current
                    .extend(self.symbol_values.iter().map(|&p| kernel_value(kernel, t, p)));
            }
        }
        &self.current
    }
}

/// Per node, `max_t weight(t)·|Σ_ξ e^{ix·ξ} K_t(ξ) f̂(ξ) hⁿ|` over `times`.
pub(crate) fn sup_over_times<W>(
    f: &SpectralFunction,
    symbol_values: &[f64],
    ball: &BallQuadrature,
    times: &[f64],
    kernel: Kernel,
    weight: W,
    path: EvalPath,
) -> Result<Vec<f64>>
where
    W: Fn(f64) -> f64 + Sync,
{
    let n_modes = f.len();
    let n_nodes = ball.len();
    let direct = n_nodes as f64 * n_modes as f64 * (12.0 + 1.0 * times.len() as f64);
    let resolved = resolve_path(f, ball, path, direct, times.len() as f64)?;
    let coeffs = centered_coefficients(f, ball.center());
    // maxima are tracked as squares
    let weights: Vec<f64> = times
        .iter()
        .map(|&t| {
            let w = weight(t);
            w * w
        })
        .collect();

    match resolved {
        Resolved::Fft(grid) => {
            let chunk = times.len().div_ceil(rayon::current_num_threads()).max(1);
            let maxima = times
                .par_chunks(chunk)
                .zip(weights.par_chunks(chunk))
                .map(|(ts, ws)| {
                    let mut best = vec![0.0f64; n_nodes];
                    let mut vals = vec![ZERO; n_nodes];
                    let mut work = grid.workspace();
                    let mut phases = PhaseStepper::new(kernel, ts, symbol_values);
                    for (j, &w) in ws.iter().enumerate() {
                        work.input.clear();
                        work.input
                            .extend(coeffs.iter().zip(phases.advance(j)).map(|(&c, &e)| c * e));
                        grid.synthesize(&mut work, &mut vals);
                        for (b, v) in best.iter_mut().zip(&vals) {
                            *b = b.max(w * v.norm_sqr());
                        }
                    }
                    best
                })
                .reduce(
                    || vec![0.0; n_nodes],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x = x.max(y));
                        a
                    },
                );
            Ok(maxima.into_iter().map(f64::sqrt).collect())
        }
        Resolved::Direct => {
            // time table split into real/imaginary planes, blocked to bound memory
            let block = (1usize << 22).div_ceil(n_modes.max(1)).clamp(1, times.len().max(1));
            let mut best = vec![0.0f64; n_nodes];
            let d = f.dim();
            let dx = ball.spacing();
            let freqs = f.padded_frequencies();
            for (ts, ws) in times.chunks(block).zip(weights.chunks(block)) {
                let mut re = vec![0.0; ts.len() * n_modes];
                let mut im = vec![0.0; ts.len() * n_modes];
                for (q, &t) in ts.iter().enumerate() {
                    for (k, &p) in symbol_values.iter().enumerate() {
                        let e = kernel_value(kernel, t, p);
                        re[q * n_modes + k] = e.re;
                        im[q * n_modes + k] = e.im;
                    }
                }
                best.par_iter_mut().zip(ball.offsets().par_iter()).for_each(|(b, j)| {
                    let mut ar = vec![0.0; n_modes];
                    let mut ai = vec![0.0; n_modes];
                    for (k, (xi, &c)) in freqs.iter().zip(&coeffs).enumerate() {
                        let phase: f64 = (0..d).map(|a| dx * j[a] as f64 * xi[a]).sum();
                        let v = c * Complex64::from_polar(1.0, phase);
                        ar[k] = v.re;
                        ai[k] = v.im;
                    }
                    for (q, &w) in ws.iter().enumerate() {
                        let er = &re[q * n_modes..(q + 1) * n_modes];
                        let ei = &im[q * n_modes..(q + 1) * n_modes];
                        let (mut sr, mut si) = (0.0, 0.0);
                        for k in 0..n_modes {
                            sr += ar[k] * er[k] - ai[k] * ei[k];
                            si += ar[k] * ei[k] + ai[k] * er[k];
                        }
                        *b = b.max(w * (sr * sr + si * si));
                    }
                });
            }
            Ok(best.into_iter().map(f64::sqrt).collect())
        }
    }
}

