//! The triangular coefficient table `V[n][α]`, `1 ≤ n ≤ α ≤ A`.
//!
//! Each fundamental solution is a series in `e^{iαx}` whose α-th coefficient
//! is `Σ_{n≤α} V[n][α] / (n + μ)` for a shift `μ` depending on the solution
//! family and `λ`. The table itself does not depend on `λ` or `β`, only on
//! the potential, through
//!
//! ```text
//! α(α-n) V[n][α] + Σ_{s=n}^{α-1} q_{α-s} V[n][s] = 0,   1 ≤ n < α,
//! α Σ_{n=1}^{α} V[n][α] + q_α = 0.
//! ```

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `β` together with finitely many Fourier coefficients `q_1..q_N`.
///
/// Harmonics past `N` are exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierPotential {
    beta: f64,
    q: Vec<Complex64>,
}

impl FourierPotential {
    pub fn new(beta: f64, q: Vec<Complex64>) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "beta must be finite and positive, got {beta}"
            )));
        }
        if let Some(i) = q.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("q[{i}] is not finite")));
        }
        Ok(Self { beta, q })
    }

    pub fn zero(beta: f64) -> Result<Self> {
        Self::new(beta, Vec::new())
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Stored harmonics; index `i` holds `q_{i+1}`.
    pub fn harmonics(&self) -> &[Complex64] {
        &self.q
    }

    /// Number of stored harmonics `N`.
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// `q_n` (1-based); zero for `n = 0` and `n > N`.
    pub fn harmonic(&self, n: usize) -> Complex64 {
        if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.q.get(n - 1).copied().unwrap_or_default()
        }
    }

    /// `Σ |q_n|²`.
    pub fn energy(&self) -> f64 {
        self.q.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Evaluates `q(x) = Σ q_n e^{inx}` at a complex point.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let step = (Complex64::i() * x).exp();
        let mut phase = step;
        let mut acc = Complex64::new(0.0, 0.0);
        for &qn in &self.q {
            acc += qn * phase;
            phase *= step;
        }
        acc
    }
}

/// Triangular table `V[n][α]` for `1 ≤ n ≤ α ≤ order`, stored column by column.
#[derive(Debug, Clone)]
pub struct VTable {
    order: usize,
    entries: Vec<Complex64>,
    tail: OnceLock<TailWeight>,
    live_rows: OnceLock<Vec<bool>>,
}

impl PartialEq for VTable {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.entries == other.entries
    }
}

#[inline]
fn column_offset(alpha: usize) -> usize {
    alpha * (alpha - 1) / 2
}

impl VTable {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            entries: vec![Complex64::new(0.0, 0.0); order * (order + 1) / 2],
            tail: OnceLock::new(),
            live_rows: OnceLock::new(),
        }
    }

    /// Truncation order `A`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `V[n][α]`; zero outside `1 ≤ n ≤ α ≤ A`.
    #[inline]
    pub fn get(&self, n: usize, alpha: usize) -> Complex64 {
        if n == 0 || n > alpha || alpha > self.order {
            return Complex64::new(0.0, 0.0);
        }
        self.entries[column_offset(alpha) + n - 1]
    }

    #[inline]
    fn set(&mut self, n: usize, alpha: usize, value: Complex64) {
        debug_assert!(1 <= n && n <= alpha && alpha <= self.order);
        self.entries[column_offset(alpha) + n - 1] = value;
        self.tail.take();
        self.live_rows.take();
    }

    /// Whether row `n` has a nonzero entry.
    pub fn row_is_live(&self, n: usize) -> bool {
        let rows = self.live_rows.get_or_init(|| {
            let mut live = vec![false; self.order];
            for alpha in 1..=self.order {
                for (i, c) in self.column(alpha).iter().enumerate() {
                    if *c != Complex64::new(0.0, 0.0) {
                        live[i] = true;
                    }
                }
            }
            live
        });
        n >= 1 && n <= self.order && rows[n - 1]
    }

    /// Column `α` as the slice `V[1][α], …, V[α][α]`.
    pub fn column(&self, alpha: usize) -> &[Complex64] {
        assert!(
            alpha >= 1 && alpha <= self.order,
            "column {alpha} out of range"
        );
        let start = column_offset(alpha);
        &self.entries[start..start + alpha]
    }

    /// Diagonal `V[1][1], …, V[A][A]`.
    pub fn diagonal(&self) -> Vec<Complex64> {
        (1..=self.order).map(|n| self.get(n, n)).collect()
    }

    /// Largest `|α(α-n)V[n][α] + Σ q_{α-s}V[n][s]|` over `n < α`.
    pub fn row_recurrence_residual(&self, p: &FourierPotential) -> f64 {
        let mut worst = 0.0_f64;
        for alpha in 2..=self.order {
            for n in 1..alpha {
                let mut r = (alpha * (alpha - n)) as f64 * self.get(n, alpha);
                for s in n..alpha {
                    r += p.harmonic(alpha - s) * self.get(n, s);
                }
                worst = worst.max(r.norm());
            }
        }
        worst
    }

    /// Largest `|α Σ_n V[n][α] + q_α|` over `α ≤ A`.
    pub fn column_sum_residual(&self, p: &FourierPotential) -> f64 {
        (1..=self.order)
            .map(|alpha| {
                let s: Complex64 = self.column(alpha).iter().sum();
                (alpha as f64 * s + p.harmonic(alpha)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Builds `V` column by column from the potential.
pub fn forward_vtable(p: &FourierPotential, order: usize) -> VTable {
    let mut v = VTable::zeros(order);
    for alpha in 1..=order {
        let mut column_sum = Complex64::new(0.0, 0.0);
        for n in 1..alpha {
            let mut acc = Complex64::new(0.0, 0.0);
            for s in n..alpha {
                acc += p.harmonic(alpha - s) * v.get(n, s);
            }
            let value = -acc / (alpha * (alpha - n)) as f64;
            v.set(n, alpha, value);
            column_sum += value;
        }
        v.set(alpha, alpha, -p.harmonic(alpha) / alpha as f64 - column_sum);
    }
    v
}

/// Fills the table from its diagonal via
/// `V[n][α+n] = V[n][n] Σ_{m=1}^{α} V[m][α] / (m+n)`.
///
/// Entries of `diag` past the requested order are ignored; missing entries
/// are taken as zero.
pub fn diagonal_to_vtable(diag: &[Complex64], order: usize) -> VTable {
    let mut v = VTable::zeros(order);
    for c in 1..=order {
        v.set(c, c, diag.get(c - 1).copied().unwrap_or_default());
        for n in 1..c {
            let vnn = v.get(n, n);
            if vnn == Complex64::new(0.0, 0.0) {
                continue;
            }
            let alpha = c - n;
            let s: Complex64 = (1..=alpha).map(|m| v.get(m, alpha) / (m + n) as f64).sum();
            v.set(n, c, vnn * s);
        }
    }
    v
}

/// `q_α = -α Σ_n V[n][α]` for `α = 1..A`.
pub fn vtable_to_potential(v: &VTable) -> Vec<Complex64> {
    (1..=v.order())
        .map(|alpha| -(alpha as f64) * v.column(alpha).iter().sum::<Complex64>())
        .collect()
}

/// The weighted norm `Σ_n (1/n) Σ_α α|V[n][α]|` split into the stored part
/// and an extrapolated estimate of what truncation dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailWeight {
    pub stored: f64,
    pub tail: f64,
    /// False when the last-column contribution was not decreasing over the
    /// final five columns; `tail` is then a crude bound.
    pub converged: bool,
}

impl TailWeight {
    pub fn total(&self) -> f64 {
        self.stored + self.tail
    }
}

const TAIL_WINDOW: usize = 5;

/// Computed once per table and cached.
pub fn tail_weight(v: &VTable) -> TailWeight {
    *v.tail.get_or_init(|| compute_tail_weight(v))
}

fn compute_tail_weight(v: &VTable) -> TailWeight {
    let contributions: Vec<f64> = (1..=v.order())
        .map(|alpha| {
            v.column(alpha)
                .iter()
                .enumerate()
                .map(|(i, c)| alpha as f64 * c.norm() / (i + 1) as f64)
                .sum()
        })
        .collect();
    let stored: f64 = contributions.iter().sum();
    let Some(&last) = contributions.last() else {
        return TailWeight {
            stored: 0.0,
            tail: 0.0,
            converged: true,
        };
    };
    if last == 0.0 {
        return TailWeight {
            stored,
            tail: 0.0,
            converged: true,
        };
    }

    let window = &contributions[contributions.len().saturating_sub(TAIL_WINDOW)..];
    let decreasing = window.len() >= 2 && window.windows(2).all(|w| w[1] < w[0]);
    if !decreasing {
        return TailWeight {
            stored,
            tail: last * TAIL_WINDOW as f64,
            converged: false,
        };
    }
    let ratio = window[window.len() - 1] / window[window.len() - 2];
    TailWeight {
        stored,
        tail: last * ratio / (1.0 - ratio),
        converged: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_harmonic() -> FourierPotential {
        FourierPotential::new(1.0, vec![c(1.0, 0.0)]).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn rejects_bad_beta() {
        assert!(FourierPotential::new(0.0, vec![]).is_err());
        assert!(FourierPotential::new(-1.0, vec![]).is_err());
        assert!(FourierPotential::new(f64::NAN, vec![]).is_err());
        assert!(FourierPotential::new(f64::INFINITY, vec![]).is_err());
        assert!(FourierPotential::new(1.0, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn zero_potential_gives_zero_table() {
        let v = forward_vtable(&FourierPotential::zero(2.0).unwrap(), 5);
        assert!(v.entries.iter().all(|e| *e == c(0.0, 0.0)));
        assert_eq!(tail_weight(&v).total(), 0.0);
        assert!(vtable_to_potential(&v).iter().all(|e| *e == c(0.0, 0.0)));
    }

    #[test]
    fn single_harmonic_table() {
        let v = forward_vtable(&single_harmonic(), 3);
        let expected = [
            ((1, 1), -1.0),
            ((1, 2), 0.5),
            ((2, 2), -0.5),
            ((1, 3), -1.0 / 12.0),
            ((2, 3), 1.0 / 6.0),
            ((3, 3), -1.0 / 12.0),
        ];
        for ((n, a), want) in expected {
            assert!(close(v.get(n, a), c(want, 0.0), 1e-15), "V[{n}][{a}]");
        }
    }

    #[test]
    fn scaling_is_polynomial() {
        let k = c(0.3, -0.4);
        let v = forward_vtable(&FourierPotential::new(1.0, vec![k]).unwrap(), 3);
        assert_eq!(v.get(1, 1), -k);
        // q1-only: V[n][α] = (rational) * k^α
        assert!(close(v.get(1, 2), 0.5 * k * k, 1e-15));
        assert!(close(v.get(2, 3), k.powu(3) / 6.0, 1e-15));
    }

    #[test]
    fn diagonal_rebuild_small_cases() {
        let v = diagonal_to_vtable(&[c(-1.0, 0.0), c(-0.5, 0.0), c(-1.0 / 12.0, 0.0)], 3);
        let f = forward_vtable(&single_harmonic(), 3);
        for a in 1..=3 {
            for n in 1..=a {
                assert!(close(v.get(n, a), f.get(n, a), 1e-15));
            }
        }

        let w = c(0.7, 0.2);
        let v = diagonal_to_vtable(&[w], 2);
        assert!(close(v.get(1, 2), w * w / 2.0, 1e-15));

        let v = diagonal_to_vtable(&[], 4);
        assert_eq!(v, VTable::zeros(4));
    }

    #[test]
    fn potential_from_single_harmonic_table() {
        let q = vtable_to_potential(&forward_vtable(&single_harmonic(), 3));
        assert!(close(q[0], c(1.0, 0.0), 1e-15));
        assert!(q[1].norm() < 1e-15 && q[2].norm() < 1e-15);
    }

    #[test]
    fn tail_weight_of_single_harmonic() {
        let tw = tail_weight(&forward_vtable(&single_harmonic(), 3));
        assert!((tw.stored - (2.25 + 0.75 + 1.0 / 12.0)).abs() < 1e-14);
    }

    #[test]
    fn tail_weight_flags_growing_columns() {
        let mut v = VTable::zeros(6);
        for a in 1..=6 {
            v.set(1, a, c(a as f64, 0.0));
        }
        assert!(!tail_weight(&v).converged);
        let tw = tail_weight(&forward_vtable(&single_harmonic(), 30));
        assert!(tw.converged);
        assert!(tw.tail < 1e-30);
    }

    #[test]
    fn residual_helpers_vanish_on_forward_table() {
        let p = FourierPotential::new(1.0, vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.0, 0.9)]).unwrap();
        let v = forward_vtable(&p, 20);
        assert!(v.row_recurrence_residual(&p) < 1e-14);
        assert!(v.column_sum_residual(&p) < 1e-14);
    }

    #[test]
    fn potential_eval_matches_sum() {
        let p = FourierPotential::new(1.0, vec![c(1.0, 0.0), c(0.0, 2.0)]).unwrap();
        let x = c(0.4, 0.0);
        let want = (Complex64::i() * x).exp() + c(0.0, 2.0) * (2.0 * Complex64::i() * x).exp();
        assert!(close(p.eval(x), want, 1e-15));
    }
}
