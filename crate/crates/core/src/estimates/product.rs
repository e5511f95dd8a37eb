//! Space-time products of fields given as per-mode time signals.
//!
//! Each input mode is `e^{i c d_tau t} envelope(t)`. The product of two modes
//! has carrier `c_a + c_b` and envelope `envelope_a * envelope_b`, so the
//! product is formed mode by mode without a global tau lattice: for every
//! output spatial mode, contributions are grouped by carrier, each group's
//! envelope is transformed once, and overlapping windows are summed.
//! Envelope aliasing is the only discretization error.

use num_complex::Complex64;

use crate::error::Result;
use crate::evolution::ModeSignal;
use crate::fields::norms::ModeNormAccumulator;
use crate::fields::spacetime::{window_values, SpaceTimeMode};
use crate::fields::{GridSpec, NormSpec, SpaceTimeField, TauSegment};
use crate::symbols::DispersionParams;

/// Dense lookup of mode signals over their bounding box.
struct ModeIndex {
    k_lo: i64,
    n_lo: [i64; 2],
    dims: [usize; 3],
    slots: Vec<u32>,
}

const EMPTY: u32 = u32::MAX;

impl ModeIndex {
    fn new(modes: &[ModeSignal]) -> Self {
        let k_lo = modes.iter().map(|m| m.k).min().unwrap_or(0);
        let k_hi = modes.iter().map(|m| m.k).max().unwrap_or(0);
        let n_lo = [0, 1].map(|i| modes.iter().map(|m| m.n[i]).min().unwrap_or(0));
        let n_hi = [0, 1].map(|i| modes.iter().map(|m| m.n[i]).max().unwrap_or(0));
        let dims = [
            (k_hi - k_lo + 1) as usize,
            (n_hi[0] - n_lo[0] + 1) as usize,
            (n_hi[1] - n_lo[1] + 1) as usize,
        ];
        let mut slots = vec![EMPTY; dims[0] * dims[1] * dims[2]];
        let mut idx = Self { k_lo, n_lo, dims, slots: Vec::new() };
        for (i, m) in modes.iter().enumerate() {
            let s = idx.slot(m.k, m.n).expect("mode inside its own bounding box");
            slots[s] = i as u32;
        }
        idx.slots = slots;
        idx
    }

    fn slot(&self, k: i64, n: [i64; 2]) -> Option<usize> {
        let a = k - self.k_lo;
        let b = n[0] - self.n_lo[0];
        let c = n[1] - self.n_lo[1];
        if a < 0 || b < 0 || c < 0 {
            return None;
        }
        let (a, b, c) = (a as usize, b as usize, c as usize);
        if a >= self.dims[0] || b >= self.dims[1] || c >= self.dims[2] {
            return None;
        }
        Some((a * self.dims[1] + b) * self.dims[2] + c)
    }

    fn get(&self, k: i64, n: [i64; 2]) -> Option<usize> {
        self.slot(k, n)
            .map(|s| self.slots[s])
            .filter(|&v| v != EMPTY)
            .map(|v| v as usize)
    }
}

/// Contributions to one output mode.
pub struct ProductMode<'a> {
    pub k: i64,
    pub n: [i64; 2],
    /// Constant multiplying every pair envelope (convolution measure and derivative).
    pub factor: Complex64,
    /// `(carrier, u index, v index)` sorted by carrier.
    pub pairs: &'a [(i64, u32, u32)],
}

/// Visits every output mode of `u v` (or `d_x (u v)` when `derivative`).
pub fn for_each_product_mode(
    grid: &GridSpec,
    u: &[ModeSignal],
    v: &[ModeSignal],
    derivative: bool,
    mut visit: impl FnMut(ProductMode<'_>) -> Result<()>,
) -> Result<()> {
    if u.is_empty() || v.is_empty() {
        return Ok(());
    }
    let conv = grid.space_constant() * grid.eta_measure();
    let vi = ModeIndex::new(v);
    let range = |m: &[ModeSignal], f: &dyn Fn(&ModeSignal) -> i64| {
        (m.iter().map(f).min().unwrap(), m.iter().map(f).max().unwrap())
    };
    let (uk0, uk1) = range(u, &|m| m.k);
    let (vk0, vk1) = range(v, &|m| m.k);
    let (un0, un1) = range(u, &|m| m.n[0]);
    let (vn0, vn1) = range(v, &|m| m.n[0]);
    let (um0, um1) = range(u, &|m| m.n[1]);
    let (vm0, vm1) = range(v, &|m| m.n[1]);

    // u entries grouped by k.
    let mut by_k: Vec<Vec<usize>> = vec![Vec::new(); (uk1 - uk0 + 1) as usize];
    for (i, m) in u.iter().enumerate() {
        by_k[(m.k - uk0) as usize].push(i);
    }

    let mut pairs: Vec<(i64, u32, u32)> = Vec::new();
    for k in (uk0 + vk0)..=(uk1 + vk1) {
        if derivative && k == 0 {
            continue;
        }
        let factor = if derivative {
            Complex64::new(0.0, k as f64 * conv)
        } else {
            Complex64::new(conv, 0.0)
        };
        for n0 in (un0 + vn0)..=(un1 + vn1) {
            for n1 in (um0 + vm0)..=(um1 + vm1) {
                pairs.clear();
                for ka in uk0.max(k - vk1)..=uk1.min(k - vk0) {
                    for &ia in &by_k[(ka - uk0) as usize] {
                        let a = &u[ia];
                        if let Some(ib) = vi.get(k - ka, [n0 - a.n[0], n1 - a.n[1]]) {
                            pairs.push((a.signal.center + v[ib].signal.center, ia as u32, ib as u32));
                        }
                    }
                }
                if pairs.is_empty() {
                    continue;
                }
                pairs.sort_unstable();
                visit(ProductMode { k, n: [n0, n1], factor, pairs: &pairs })?;
            }
        }
    }
    Ok(())
}

/// Index ranges of equal carrier inside sorted pairs.
fn carrier_runs(pairs: &[(i64, u32, u32)], out: &mut Vec<(i64, usize, usize)>) {
    out.clear();
    let mut i = 0;
    while i < pairs.len() {
        let c = pairs[i].0;
        let mut j = i;
        while j < pairs.len() && pairs[j].0 == c {
            j += 1;
        }
        out.push((c, i, j));
        i = j;
    }
}

/// Sum of `factor * envelope_a * envelope_b` over a run of pairs.
fn run_envelope(
    u: &[ModeSignal],
    v: &[ModeSignal],
    pairs: &[(i64, u32, u32)],
    factor: Complex64,
    out: &mut [Complex64],
) {
    out.fill(Complex64::new(0.0, 0.0));
    for &(_, a, b) in pairs {
        let (ea, eb) = (&u[a as usize].signal.envelope, &v[b as usize].signal.envelope);
        for ((o, x), y) in out.iter_mut().zip(ea).zip(eb) {
            *o += x * y;
        }
    }
    for o in out.iter_mut() {
        *o *= factor;
    }
}

/// Streams the tau windows of one output mode: each maximal cluster of
/// carriers closer than a window length is summed into one buffer and handed
/// to `emit(start, values)`; lone single-window clusters may instead be
/// claimed by `lone(run)` returning true.
#[allow(clippy::too_many_arguments)]
fn stream_mode_windows(
    grid: &GridSpec,
    u: &[ModeSignal],
    v: &[ModeSignal],
    pm: &ProductMode<'_>,
    runs: &mut Vec<(i64, usize, usize)>,
    scratch: &mut Scratch,
    mut lone: impl FnMut(&[(i64, u32, u32)]) -> bool,
    mut emit: impl FnMut(i64, &[Complex64]),
) {
    let tp = grid.t_points();
    let h = tp as i64 / 2;
    carrier_runs(pm.pairs, runs);
    let mut i = 0;
    while i < runs.len() {
        let mut j = i + 1;
        while j < runs.len() && runs[j].0 - runs[j - 1].0 < tp as i64 {
            j += 1;
        }
        if j == i + 1 && lone(&pm.pairs[runs[i].1..runs[i].2]) {
            i = j;
            continue;
        }
        let first = runs[i].0;
        let len = (runs[j - 1].0 - first) as usize + tp;
        scratch.merged.clear();
        scratch.merged.resize(len, Complex64::new(0.0, 0.0));
        for &(c, lo, hi) in &runs[i..j] {
            run_envelope(u, v, &pm.pairs[lo..hi], pm.factor, &mut scratch.envelope);
            window_values(grid, &mut scratch.envelope, &mut scratch.window);
            let off = (c - first) as usize;
            for (m, w) in scratch.merged[off..off + tp].iter_mut().zip(&scratch.window) {
                *m += w;
            }
        }
        emit(first - h, &scratch.merged);
        i = j;
    }
}

struct Scratch {
    envelope: Vec<Complex64>,
    window: Vec<Complex64>,
    merged: Vec<Complex64>,
}

impl Scratch {
    fn new(tp: usize) -> Self {
        Self {
            envelope: vec![Complex64::new(0.0, 0.0); tp],
            window: vec![Complex64::new(0.0, 0.0); tp],
            merged: Vec::new(),
        }
    }
}

/// Norm of `u v` (or `d_x (u v)`) without materializing the product.
pub fn product_norm(
    grid: &GridSpec,
    params: &DispersionParams,
    u: &[ModeSignal],
    v: &[ModeSignal],
    derivative: bool,
    spec: &NormSpec,
) -> Result<f64> {
    let mut acc = ModeNormAccumulator::new(*spec, *params, grid)?;
    let plain = acc.is_plain_l2();
    let tp = grid.t_points();
    let dt = grid.d_t();
    let d_eta = grid.d_eta();
    // |envelope|^2 per mode, for windows that overlap nothing.
    let mass = |m: &[ModeSignal]| -> Vec<f64> {
        if !plain {
            return Vec::new();
        }
        m.iter().flat_map(|s| s.signal.envelope.iter().map(|z| z.norm_sqr())).collect()
    };
    let (ua2, va2) = (mass(u), mass(v));
    let mut scratch = Scratch::new(tp);
    let mut runs = Vec::new();
    for_each_product_mode(grid, u, v, derivative, |pm| {
        let mut scope = acc.begin_mode(pm.k, [pm.n[0] as f64 * d_eta, pm.n[1] as f64 * d_eta]);
        let mut lone_mass = 0.0;
        let f2 = pm.factor.norm_sqr();
        stream_mode_windows(
            grid,
            u,
            v,
            &pm,
            &mut runs,
            &mut scratch,
            |run| {
                if !plain || run.len() != 1 {
                    return false;
                }
                let (a, b) = (run[0].1 as usize, run[0].2 as usize);
                let (x, y) = (&ua2[a * tp..(a + 1) * tp], &va2[b * tp..(b + 1) * tp]);
                lone_mass += f2 * dt * x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
                true
            },
            |start, values| acc.add_window(&mut scope, start, values),
        );
        acc.end_mode(scope);
        if lone_mass > 0.0 {
            acc.add_l2_mass(lone_mass);
        }
        Ok(())
    })?;
    Ok(acc.finish())
}

/// The product as a stored field (for inspection and small problems).
pub fn product_field(
    grid: &GridSpec,
    u: &[ModeSignal],
    v: &[ModeSignal],
    derivative: bool,
) -> Result<SpaceTimeField> {
    let mut modes = Vec::new();
    let mut scratch = Scratch::new(grid.t_points());
    let mut runs = Vec::new();
    for_each_product_mode(grid, u, v, derivative, |pm| {
        let mut segments = Vec::new();
        stream_mode_windows(grid, u, v, &pm, &mut runs, &mut scratch, |_| false, |start, values| {
            segments.push(TauSegment {
                start,
                values: values.to_vec(),
            })
        });
        modes.push(SpaceTimeMode {
            k: pm.k,
            n: pm.n,
            segments,
        });
        Ok(())
    })?;
    Ok(SpaceTimeField::new(*grid, modes))
}

/// Per-mode time signals of a stored field.
pub fn field_signals(f: &SpaceTimeField) -> Result<Vec<ModeSignal>> {
    Ok(f.signals()?
        .into_iter()
        .map(|(k, n, signal)| ModeSignal { k, n, signal })
        .collect())
}
