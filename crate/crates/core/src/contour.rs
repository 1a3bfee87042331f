//! Zeros of analytic functions in rectangles by the argument principle.
//!
//! The winding number of `f` along the boundary is accumulated from phase
//! increments between neighbouring boundary samples; cells with a nonzero
//! count are split into quadrants until each holds a single zero (or the
//! depth budget runs out), and the zero is then polished by Newton's method.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let ok = [re_min, re_max, im_min, im_max]
            .iter()
            .all(|v| v.is_finite())
            && re_min < re_max
            && im_min < im_max;
        if !ok {
            return Err(Error::InvalidInput(format!(
                "degenerate rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn square(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, lo, hi)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    fn grown(&self, frac: f64) -> Rect {
        let dx = frac * self.width();
        let dy = frac * self.height();
        Rect {
            re_min: self.re_min - dx,
            re_max: self.re_max + dx,
            im_min: self.im_min - dy,
            im_max: self.im_max + dy,
        }
    }

    /// Four quadrants split at a point offset from the centre by `bias`
    /// (a fraction of the side length).
    fn quadrants(&self, bias: f64) -> [Rect; 4] {
        let xm = self.re_min + (0.5 + bias) * self.width();
        let ym = self.im_min + (0.5 + bias) * self.height();
        [
            Rect {
                re_max: xm,
                im_max: ym,
                ..*self
            },
            Rect {
                re_min: xm,
                im_max: ym,
                ..*self
            },
            Rect {
                re_max: xm,
                im_min: ym,
                ..*self
            },
            Rect {
                re_min: xm,
                im_min: ym,
                ..*self
            },
        ]
    }

    /// Counter-clockwise boundary samples, `m` per edge.
    fn boundary(&self, m: usize) -> Vec<Complex64> {
        let corners = [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ];
        let mut pts = Vec::with_capacity(4 * m);
        for e in 0..4 {
            let a = corners[e];
            let b = corners[(e + 1) % 4];
            for k in 0..m {
                pts.push(a + (b - a) * (k as f64 / m as f64));
            }
        }
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroSearchOptions {
    /// Initial boundary samples per edge.
    pub points_per_edge: usize,
    /// Number of times a boundary segment may be halved where the phase of
    /// `f` turns too fast.
    pub max_refinement: usize,
    pub max_depth: usize,
    /// Newton stopping tolerance, relative to `max(1, |z|)`.
    pub tol: f64,
    /// Boundary values below this count as the contour hitting a zero.
    pub zero_floor: f64,
}

impl Default for ZeroSearchOptions {
    fn default() -> Self {
        Self {
            points_per_edge: 512,
            max_refinement: 20,
            max_depth: 12,
            tol: 1e-12,
            zero_floor: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoundZero {
    pub z: Complex64,
    pub multiplicity: usize,
    pub value: Complex64,
}

/// Largest accepted phase step between neighbouring samples.
const MAX_PHASE_STEP: f64 = std::f64::consts::FRAC_PI_4;

/// Phase increment of `f` from `a` to `b`, bisecting while a step exceeds
/// [`MAX_PHASE_STEP`].
fn segment_phase<F>(
    f: &F,
    a: (Complex64, Complex64),
    b: (Complex64, Complex64),
    level: usize,
    opts: &ZeroSearchOptions,
) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let step = (b.1 / a.1).arg();
    if step.abs() <= MAX_PHASE_STEP || level >= opts.max_refinement {
        return Ok(step);
    }
    let zm = 0.5 * (a.0 + b.0);
    let fm = f(zm)?;
    if fm.norm() < opts.zero_floor {
        return Err(Error::ContourThroughZero(fm.norm()));
    }
    let m = (zm, fm);
    Ok(segment_phase(f, a, m, level + 1, opts)? + segment_phase(f, m, b, level + 1, opts)?)
}

/// Number of zeros (with multiplicity) of `f` inside `rect`.
pub fn winding_number<F>(f: &F, rect: &Rect, opts: &ZeroSearchOptions) -> Result<usize>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let pts = rect.boundary(opts.points_per_edge.max(4));
    let values: Vec<Complex64> = pts.par_iter().map(|&z| f(z)).collect::<Result<_>>()?;
    let floor = values
        .iter()
        .map(|v| v.norm())
        .fold(f64::INFINITY, f64::min);
    if floor < opts.zero_floor {
        return Err(Error::ContourThroughZero(floor));
    }
    let n = pts.len();
    let total: f64 = (0..n)
        .into_par_iter()
        .map(|k| {
            let next = (k + 1) % n;
            segment_phase(f, (pts[k], values[k]), (pts[next], values[next]), 0, opts)
        })
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum();
    let turns = (total / std::f64::consts::TAU).round();
    if turns < 0.0 {
        // a pole inside the cell; the coefficient functions have none
        return Err(Error::InvalidInput(format!(
            "negative winding number {turns} on {rect:?}"
        )));
    }
    Ok(turns as usize)
}

/// Central-difference derivative of fourth order.
fn derivative<F>(f: &F, z: Complex64, h: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let h = Complex64::new(h, 0.0);
    Ok((f(z - 2.0 * h)? - 8.0 * f(z - h)? + 8.0 * f(z + h)? - f(z + 2.0 * h)?) / (12.0 * h))
}

fn newton<F>(f: &F, start: Complex64, multiplicity: usize, tol: f64) -> Option<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut z = start;
    let mut last_step = f64::INFINITY;
    for _ in 0..60 {
        let scale = z.norm().max(1.0);
        let fz = f(z).ok()?;
        if fz == Complex64::new(0.0, 0.0) {
            return Some(z);
        }
        let dfz = derivative(f, z, 1e-4 * scale).ok()?;
        if dfz.norm() == 0.0 || !dfz.is_finite() {
            return None;
        }
        let step = multiplicity as f64 * fz / dfz;
        z -= step;
        if !z.is_finite() {
            return None;
        }
        if step.norm() <= tol * scale {
            return Some(z);
        }
        last_step = step.norm() / scale;
    }
    // roundoff stalls multiple roots short of `tol`
    (last_step < 1e-6).then_some(z)
}

const SPLIT_BIASES: [f64; 2] = [0.0132, -0.0271];
const JITTER: f64 = 1.0e-3;

fn search<F>(
    f: &F,
    rect: Rect,
    count: usize,
    depth: usize,
    opts: &ZeroSearchOptions,
) -> Result<Vec<FoundZero>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    if count == 0 {
        return Ok(Vec::new());
    }
    if count == 1 || depth >= opts.max_depth {
        if let Some(z) = newton(f, rect.center(), count, opts.tol) {
            if rect.grown(0.05).contains(z) {
                return Ok(vec![FoundZero {
                    z,
                    multiplicity: count,
                    value: f(z)?,
                }]);
            }
        }
        if depth >= opts.max_depth {
            return Err(Error::BudgetExceeded(opts.max_depth));
        }
    }

    let mut last_err = None;
    for bias in SPLIT_BIASES {
        let children = rect.quadrants(bias);
        let counts: Result<Vec<usize>> = children
            .par_iter()
            .map(|c| winding_number(f, c, opts))
            .collect();
        match counts {
            Ok(counts) if counts.iter().sum::<usize>() == count => {
                let found: Vec<Vec<FoundZero>> = children
                    .par_iter()
                    .zip(counts.par_iter())
                    .map(|(c, &k)| search(f, *c, k, depth + 1, opts))
                    .collect::<Result<_>>()?;
                return Ok(found.into_iter().flatten().collect());
            }
            Ok(counts) => {
                last_err = Some(Error::InvalidInput(format!(
                    "child winding numbers {counts:?} do not add up to {count}"
                )));
            }
            Err(e @ Error::ContourThroughZero(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one split attempted"))
}

/// All zeros of `f` inside `rect`, sorted by `(Re, Im)`.
///
/// If the outer boundary passes through a zero the rectangle is enlarged by a
/// small fraction of its size and the count retried once.
pub fn find_zeros<F>(f: &F, rect: &Rect, opts: &ZeroSearchOptions) -> Result<Vec<FoundZero>>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let (rect, count) = match winding_number(f, rect, opts) {
        Ok(k) => (*rect, k),
        Err(Error::ContourThroughZero(_)) => {
            let moved = rect.grown(JITTER);
            (moved, winding_number(f, &moved, opts)?)
        }
        Err(e) => return Err(e),
    };
    let mut zeros = search(f, rect, count, 0, opts)?;
    zeros.sort_by(|a, b| {
        a.z.re
            .total_cmp(&b.z.re)
            .then_with(|| a.z.im.total_cmp(&b.z.im))
    });
    Ok(zeros)
}
