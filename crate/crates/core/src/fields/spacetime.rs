//! Space-time coefficients `F_hat(tau, k, eta)`.
//!
//! The phase reaches `|k|^{alpha+1}`, far beyond any dense tau lattice that
//! fits in memory, so each spatial mode stores only the tau windows where it
//! has content. A window is `t_points` long and sits on the global lattice
//! `tau_m = m d_tau`. In time it corresponds to a slowly varying envelope
//! times the lattice carrier `e^{i c d_tau t}`.
//!
//! Time transforms are unitary: `F_hat(tau) = (2 pi)^{-1/2} d_t sum_j f(t_j) e^{-i tau t_j}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::GridSpec;
use super::transform::plan;
use crate::error::{Error, Result};

/// Contiguous run of lattice values starting at index `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauSegment {
    pub start: i64,
    pub values: Vec<Complex64>,
}

impl TauSegment {
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64
    }
}

/// Time samples `f(t_j) = e^{i center d_tau t_j} envelope_j` on the window lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pub center: i64,
    pub envelope: Vec<Complex64>,
}

/// Coefficients of one spatial mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeMode {
    pub k: i64,
    pub n: [i64; 2],
    pub segments: Vec<TauSegment>,
}

impl SpaceTimeMode {
    pub fn is_zero(&self) -> bool {
        self.segments
            .iter()
            .all(|s| s.values.iter().all(|v| v.re == 0.0 && v.im == 0.0))
    }
}

#[inline]
fn alt(q: i64) -> f64 {
    if q & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Window coefficients of a time signal.
pub fn segment_from_signal(grid: &GridSpec, s: &TimeSignal) -> Result<TauSegment> {
    let tp = grid.t_points();
    if s.envelope.len() != tp {
        return Err(Error::ShapeMismatch {
            expected: tp.to_string(),
            found: s.envelope.len().to_string(),
        });
    }
    let mut buf = s.envelope.clone();
    let mut values = vec![Complex64::new(0.0, 0.0); tp];
    window_values(grid, &mut buf, &mut values);
    Ok(TauSegment {
        start: s.center - tp as i64 / 2,
        values,
    })
}

/// Transforms an envelope in place and writes its `t_points` window values,
/// lowest tau first, into `out`. The window starts at `carrier - t_points/2`.
pub(crate) fn window_values(grid: &GridSpec, envelope: &mut [Complex64], out: &mut [Complex64]) {
    let tp = envelope.len();
    plan(tp, false).process(envelope);
    let h = tp as i64 / 2;
    let c = grid.d_t() / (2.0 * PI).sqrt();
    for (o, q) in out.iter_mut().zip(-h..h) {
        *o = envelope[q.rem_euclid(tp as i64) as usize] * (c * alt(q));
    }
}

/// Time signal of a full-length window; the carrier is the window centre.
pub fn signal_from_segment(grid: &GridSpec, seg: &TauSegment) -> Result<TimeSignal> {
    let tp = grid.t_points();
    if seg.values.len() != tp {
        return Err(Error::ShapeMismatch {
            expected: tp.to_string(),
            found: seg.values.len().to_string(),
        });
    }
    let h = tp as i64 / 2;
    let c = grid.d_tau() / (2.0 * PI).sqrt();
    let mut buf = vec![Complex64::new(0.0, 0.0); tp];
    for (i, v) in seg.values.iter().enumerate() {
        let q = i as i64 - h;
        buf[q.rem_euclid(tp as i64) as usize] = v * (c * alt(q));
    }
    plan(tp, true).process(&mut buf);
    Ok(TimeSignal {
        center: seg.start + h,
        envelope: buf,
    })
}

/// Sums overlapping segments; the result is sorted and pairwise disjoint.
pub fn merge_segments(mut segs: Vec<TauSegment>) -> Vec<TauSegment> {
    if segs.len() < 2 {
        return segs;
    }
    segs.sort_by_key(|s| s.start);
    let mut out: Vec<TauSegment> = Vec::with_capacity(segs.len());
    let mut cluster: Vec<TauSegment> = Vec::new();
    let mut cluster_end = i64::MIN;
    let flush = |cluster: &mut Vec<TauSegment>, out: &mut Vec<TauSegment>| {
        if cluster.len() == 1 {
            out.push(cluster.pop().unwrap());
            return;
        }
        let start = cluster[0].start;
        let end = cluster.iter().map(|s| s.end()).max().unwrap();
        let mut values = vec![Complex64::new(0.0, 0.0); (end - start) as usize];
        for s in cluster.drain(..) {
            let off = (s.start - start) as usize;
            for (i, v) in s.values.into_iter().enumerate() {
                values[off + i] += v;
            }
        }
        out.push(TauSegment { start, values });
    };
    for s in segs {
        if !cluster.is_empty() && s.start >= cluster_end {
            flush(&mut cluster, &mut out);
        }
        cluster_end = if cluster.is_empty() { s.end() } else { cluster_end.max(s.end()) };
        cluster.push(s);
    }
    flush(&mut cluster, &mut out);
    out
}

/// Sparse space-time field: a list of spatial modes, each with disjoint tau windows.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: GridSpec,
    modes: Vec<SpaceTimeMode>,
}

impl SpaceTimeField {
    /// Builds a field, merging overlapping windows and dropping empty modes.
    /// Modes are sorted by `(k, n)`; repeated modes are combined.
    pub fn new(grid: GridSpec, modes: Vec<SpaceTimeMode>) -> Self {
        let mut modes = modes;
        modes.sort_by_key(|m| (m.k, m.n));
        let mut out: Vec<SpaceTimeMode> = Vec::with_capacity(modes.len());
        for m in modes {
            match out.last_mut() {
                Some(last) if last.k == m.k && last.n == m.n => last.segments.extend(m.segments),
                _ => out.push(m),
            }
        }
        for m in &mut out {
            let segs = std::mem::take(&mut m.segments);
            m.segments = merge_segments(segs);
        }
        out.retain(|m| !m.is_zero());
        Self { grid, modes: out }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn modes(&self) -> &[SpaceTimeMode] {
        &self.modes
    }

    pub fn is_mean_zero(&self) -> bool {
        self.modes.iter().all(|m| m.k != 0)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let modes = self
            .modes
            .iter()
            .map(|m| SpaceTimeMode {
                k: m.k,
                n: m.n,
                segments: m
                    .segments
                    .iter()
                    .map(|s| TauSegment {
                        start: s.start,
                        values: s.values.iter().map(|v| v * c).collect(),
                    })
                    .collect(),
            })
            .collect();
        Self::new(self.grid, modes)
    }

    pub fn add(&self, other: &SpaceTimeField) -> Self {
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        Self::new(self.grid, modes)
    }

    /// Drops the `k = 0` modes.
    pub fn project_mean_zero(&self) -> Self {
        Self {
            grid: self.grid,
            modes: self.modes.iter().filter(|m| m.k != 0).cloned().collect(),
        }
    }

    /// Time signals of every mode; each mode must hold one full-length window.
    pub fn signals(&self) -> Result<Vec<(i64, [i64; 2], TimeSignal)>> {
        self.modes
            .iter()
            .map(|m| {
                let seg = self.single_window(m)?;
                Ok((m.k, m.n, signal_from_segment(&self.grid, &seg)?))
            })
            .collect()
    }

    /// The mode's content as a single `t_points` window, if it fits in one.
    fn single_window(&self, m: &SpaceTimeMode) -> Result<TauSegment> {
        let tp = self.grid.t_points() as i64;
        let start = m.segments.first().map(|s| s.start).unwrap_or(-tp / 2);
        let end = m.segments.last().map(|s| s.end()).unwrap_or(start);
        if end - start > tp {
            return Err(Error::MultiSegment(m.segments.len()));
        }
        if m.segments.len() == 1 && m.segments[0].values.len() as i64 == tp {
            return Ok(m.segments[0].clone());
        }
        // Pad symmetrically inside one window.
        let lo = start - (tp - (end - start)) / 2;
        let mut values = vec![Complex64::new(0.0, 0.0); tp as usize];
        for s in &m.segments {
            for (i, v) in s.values.iter().enumerate() {
                values[(s.start - lo) as usize + i] = *v;
            }
        }
        Ok(TauSegment { start: lo, values })
    }

    /// Dense samples `f(t_j)` (carrier included) of one mode.
    pub fn mode_samples(&self, m: &SpaceTimeMode) -> Result<Vec<Complex64>> {
        let s = signal_from_segment(&self.grid, &self.single_window(m)?)?;
        let w = s.center as f64 * self.grid.d_tau();
        Ok(self
            .grid
            .times()
            .iter()
            .zip(&s.envelope)
            .map(|(t, e)| e * Complex64::from_polar(1.0, w * t))
            .collect())
    }

    /// Builds a field from dense samples `f(t_j)` per mode, i.e. on the base
    /// window `tau in [-pi/d_t, pi/d_t)`.
    pub fn from_samples(grid: GridSpec, samples: Vec<(i64, [i64; 2], Vec<Complex64>)>) -> Result<Self> {
        let modes = samples
            .into_iter()
            .map(|(k, n, f)| {
                let seg = segment_from_signal(&grid, &TimeSignal { center: 0, envelope: f })?;
                Ok(SpaceTimeMode { k, n, segments: vec![seg] })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(grid, modes))
    }

    /// Single lattice point `(tau_m, k, n)` with value `v`.
    pub fn delta(grid: GridSpec, m: i64, k: i64, n: [i64; 2], v: Complex64) -> Self {
        Self::new(
            grid,
            vec![SpaceTimeMode {
                k,
                n,
                segments: vec![TauSegment { start: m, values: vec![v] }],
            }],
        )
    }

    /// Space-time `L^2` norm `(d_tau d_eta^d sum |F_hat|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self
            .modes
            .iter()
            .flat_map(|m| m.segments.iter())
            .flat_map(|s| s.values.iter())
            .map(|v| v.norm_sqr())
            .sum();
        (s * self.grid.d_tau() * self.grid.eta_measure()).sqrt()
    }
}
