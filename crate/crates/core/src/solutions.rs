//! Fundamental solutions `f1±`, `f2±` and their continuation across `x = 0`.
//!
//! All four share one shape: `f(x) = e^{κx} Σ_{α=0}^{A} c_α e^{iαx}` with
//! `c_0 = 1` and `c_α = Σ_{n≤α} V[n][α] / (n + μ)`, where `μ = -2iκ`:
//!
//! | solution | κ     | μ       | home side |
//! |----------|-------|---------|-----------|
//! | `f1+`    | `iλ`  | `2λ`    | `x ≥ 0`   |
//! | `f1-`    | `-iλ` | `-2λ`   | `x ≥ 0`   |
//! | `f2+`    | `λβ`  | `-2iλβ` | `x < 0`   |
//! | `f2-`    | `-λβ` | `2iλβ`  | `x < 0`   |
//!
//! The native series solves the constant-density equation of its own family on
//! the whole line. The solution of the glued problem agrees with it on the home
//! side and is continued to the other side by matching value and derivative at
//! `x = 0`.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::{tail_weight, FourierPotential, VTable};
use crate::error::{Error, Result};
use crate::scattering::{connection_coefficients, wronskian};
use crate::POLE_TOL;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Solution {
    F1Plus,
    F1Minus,
    F2Plus,
    F2Minus,
}

impl Solution {
    pub const ALL: [Solution; 4] = [
        Solution::F1Plus,
        Solution::F1Minus,
        Solution::F2Plus,
        Solution::F2Minus,
    ];

    pub fn f1(branch: Branch) -> Self {
        match branch {
            Branch::Plus => Solution::F1Plus,
            Branch::Minus => Solution::F1Minus,
        }
    }

    pub fn f2(branch: Branch) -> Self {
        match branch {
            Branch::Plus => Solution::F2Plus,
            Branch::Minus => Solution::F2Minus,
        }
    }

    pub fn branch(self) -> Branch {
        match self {
            Solution::F1Plus | Solution::F2Plus => Branch::Plus,
            Solution::F1Minus | Solution::F2Minus => Branch::Minus,
        }
    }

    pub fn is_f1(self) -> bool {
        matches!(self, Solution::F1Plus | Solution::F1Minus)
    }

    /// `f⁻(x, λ) = f⁺(x, -λ)`: the same family with the other branch.
    pub fn reflected(self) -> Self {
        match self {
            Solution::F1Plus => Solution::F1Minus,
            Solution::F1Minus => Solution::F1Plus,
            Solution::F2Plus => Solution::F2Minus,
            Solution::F2Minus => Solution::F2Plus,
        }
    }

    /// Whether the native series is valid at `x` (f1 on `x ≥ 0`, f2 on `x < 0`).
    pub fn is_home(self, x: f64) -> bool {
        if self.is_f1() {
            x >= 0.0
        } else {
            x < 0.0
        }
    }

    /// Exponent `κ` in `e^{κx}`.
    pub fn exponent(self, lam: Complex64, beta: f64) -> Complex64 {
        match self {
            Solution::F1Plus => I * lam,
            Solution::F1Minus => -I * lam,
            Solution::F2Plus => lam * beta,
            Solution::F2Minus => -lam * beta,
        }
    }

    /// Pole of the `n`-th term of the series, as a point in the λ-plane.
    pub fn pole(self, n: usize, beta: f64) -> Complex64 {
        let h = n as f64 / 2.0;
        match self {
            Solution::F1Plus => Complex64::new(-h, 0.0),
            Solution::F1Minus => Complex64::new(h, 0.0),
            Solution::F2Plus => Complex64::new(0.0, -h / beta),
            Solution::F2Minus => Complex64::new(0.0, h / beta),
        }
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solution::F1Plus => "f1+",
            Solution::F1Minus => "f1-",
            Solution::F2Plus => "f2+",
            Solution::F2Minus => "f2-",
        })
    }
}

impl FromStr for Solution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "f1+" => Ok(Solution::F1Plus),
            "f1-" => Ok(Solution::F1Minus),
            "f2+" => Ok(Solution::F2Plus),
            "f2-" => Ok(Solution::F2Minus),
            other => Err(Error::InvalidInput(format!(
                "unknown solution {other:?}, expected f1+, f1-, f2+ or f2-"
            ))),
        }
    }
}

/// Value, derivative and truncation bound of a solution at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionSample {
    pub value: Complex64,
    pub derivative: Complex64,
    pub truncation_error: f64,
}

/// Value and first two derivatives; closed under linear combination.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub err: f64,
}

impl Jet {
    pub fn sample(&self) -> SolutionSample {
        SolutionSample {
            value: self.value,
            derivative: self.d1,
            truncation_error: self.err,
        }
    }
}

impl Add for Jet {
    type Output = Jet;

    fn add(self, o: Jet) -> Jet {
        Jet {
            value: self.value + o.value,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            err: self.err + o.err,
        }
    }
}

impl Mul<Jet> for Complex64 {
    type Output = Jet;

    fn mul(self, j: Jet) -> Jet {
        Jet {
            value: self * j.value,
            d1: self * j.d1,
            d2: self * j.d2,
            err: self.norm() * j.err,
        }
    }
}

/// Native series of one solution at a fixed λ, ready for evaluation at many x.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    kind: Solution,
    kappa: Complex64,
    coeffs: Vec<Complex64>,
    tail_bound: f64,
}

impl SeriesSolution {
    pub fn new(v: &VTable, kind: Solution, lam: Complex64, beta: f64) -> Result<Self> {
        let kappa = kind.exponent(lam, beta);
        let mu = -2.0 * I * kappa;
        let order = v.order();

        let mut inv = Vec::with_capacity(order);
        let mut min_den = f64::INFINITY;
        for n in 1..=order {
            let den = n as f64 + mu;
            if !v.row_is_live(n) {
                inv.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let scale = if kind.is_f1() { 2.0 } else { 2.0 * beta };
            let distance = den.norm() / scale;
            // tolerate the roundoff made when λ was placed exactly at POLE_TOL
            let slack = 8.0 * f64::EPSILON * (1.0 + kind.pole(n, beta).norm());
            if distance + slack < POLE_TOL {
                return Err(Error::PoleProximity {
                    lam,
                    pole: kind.pole(n, beta),
                    distance,
                });
            }
            min_den = min_den.min(den.norm());
            inv.push(1.0 / den);
        }

        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(Complex64::new(1.0, 0.0));
        for alpha in 1..=order {
            let c = v
                .column(alpha)
                .iter()
                .zip(&inv)
                .map(|(vn, w)| vn * w)
                .sum::<Complex64>();
            coeffs.push(c);
        }

        let tail = tail_weight(v);
        let tail_bound = if tail.total() == 0.0 {
            0.0
        } else {
            tail.total() / min_den
        };
        Ok(Self {
            kind,
            kappa,
            coeffs,
            tail_bound,
        })
    }

    pub fn kind(&self) -> Solution {
        self.kind
    }

    /// Evaluates the truncated series and its first two derivatives.
    pub fn jet(&self, x: Complex64) -> Jet {
        let base = (self.kappa * x).exp();
        let step = (I * x).exp();
        let mut phase = Complex64::new(1.0, 0.0);
        let mut jet = Jet::default();
        for (alpha, c) in self.coeffs.iter().enumerate() {
            let k = self.kappa + I * alpha as f64;
            let term = c * phase;
            jet.value += term;
            jet.d1 += k * term;
            jet.d2 += k * k * term;
            phase *= step;
        }
        jet.value *= base;
        jet.d1 *= base;
        jet.d2 *= base;
        let growth = if x.im < 0.0 {
            (-(self.coeffs.len() as f64) * x.im).exp()
        } else {
            1.0
        };
        jet.err = base.norm() * growth * self.tail_bound;
        jet
    }
}

/// Native series evaluation of any of the four solutions at a complex point.
pub fn eval_native(
    v: &VTable,
    beta: f64,
    kind: Solution,
    lam: Complex64,
    x: Complex64,
) -> Result<SolutionSample> {
    Ok(SeriesSolution::new(v, kind, lam, beta)?.jet(x).sample())
}

/// `f1±(x, λ)` from its series. `β` does not enter the f1 family.
pub fn eval_f1(v: &VTable, lam: Complex64, x: f64, branch: Branch) -> Result<SolutionSample> {
    eval_native(v, 1.0, Solution::f1(branch), lam, x.into())
}

/// `f2±(x, λ)` from its series.
pub fn eval_f2(
    v: &VTable,
    beta: f64,
    lam: Complex64,
    x: f64,
    branch: Branch,
) -> Result<SolutionSample> {
    eval_native(v, beta, Solution::f2(branch), lam, x.into())
}

/// `f_n(x) = lim (n ± 2λ) f1±(x, λ)` at `λ = ∓n/2`, i.e.
/// `e^{-inx/2} Σ_{α≥n} V[n][α] e^{iαx}`.
///
/// Because `f1-(x, λ) = f1+(x, -λ)`, both signs give the same function.
pub fn eval_fn_limit(v: &VTable, n: usize, x: f64, _sign: Branch) -> Complex64 {
    let step = Complex64::new(0.0, x).exp();
    let mut phase = Complex64::new(0.0, x * n as f64 / 2.0).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for alpha in n..=v.order() {
        acc += v.get(n, alpha) * phase;
        phase *= step;
    }
    acc
}

/// The four native series at one λ plus the gluing data at `x = 0`.
///
/// Solutions whose series has a pole near λ are kept as errors and only
/// reported if a requested evaluation needs them.
#[derive(Debug, Clone)]
pub struct FundamentalSystem {
    lam: Complex64,
    beta: f64,
    series: [Result<SeriesSolution>; 4],
}

fn slot(kind: Solution) -> usize {
    match kind {
        Solution::F1Plus => 0,
        Solution::F1Minus => 1,
        Solution::F2Plus => 2,
        Solution::F2Minus => 3,
    }
}

impl FundamentalSystem {
    pub fn new(v: &VTable, beta: f64, lam: Complex64) -> Self {
        let series = Solution::ALL.map(|k| SeriesSolution::new(v, k, lam, beta));
        Self { lam, beta, series }
    }

    pub fn lam(&self) -> Complex64 {
        self.lam
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn series(&self, kind: Solution) -> Result<&SeriesSolution> {
        self.series[slot(kind)].as_ref().map_err(Clone::clone)
    }

    pub fn native(&self, kind: Solution, x: Complex64) -> Result<Jet> {
        Ok(self.series(kind)?.jet(x))
    }

    /// The solution of the glued problem that coincides with `kind` on its
    /// home side.
    pub fn extended(&self, kind: Solution, x: f64) -> Result<Jet> {
        if kind.is_home(x) {
            return self.native(kind, x.into());
        }
        if self.lam.norm() < POLE_TOL {
            return Err(Error::ZeroWavenumber(self.lam.norm()));
        }
        // basis (u, w) native to the other side
        let (u_kind, w_kind) = if kind.is_f1() {
            (Solution::F2Plus, Solution::F2Minus)
        } else {
            (Solution::F1Plus, Solution::F1Minus)
        };
        let zero = Complex64::new(0.0, 0.0);
        let g0 = self.native(kind, zero)?.sample();
        let u = self.series(u_kind)?;
        let w = self.series(w_kind)?;
        let u0 = u.jet(zero).sample();
        let w0 = w.jet(zero).sample();
        let omega = wronskian(&u0, &w0);
        let a = wronskian(&g0, &w0) / omega;
        let b = wronskian(&u0, &g0) / omega;
        let xc = Complex64::from(x);
        Ok(a * u.jet(xc) + b * w.jet(xc))
    }
}

/// `f2+` continued to `x ≥ 0` or `f1+` continued to `x < 0` (and likewise for
/// the minus branches via `λ → -λ`), written through the connection
/// coefficients:
///
/// ```text
/// f2+ = -(C11 f1+ + C12 f1-)   on x ≥ 0,
/// f1+ = -(C22 f2+ + C21 f2-)   on x < 0.
/// ```
///
/// On the home side the native series is returned.
pub fn extend_across_zero(
    v: &VTable,
    beta: f64,
    lam: Complex64,
    x: f64,
    kind: Solution,
) -> Result<SolutionSample> {
    if kind.branch() == Branch::Minus {
        return extend_across_zero(v, beta, -lam, x, kind.reflected());
    }
    if kind.is_home(x) {
        return eval_native(v, beta, kind, lam, x.into());
    }
    let cc = connection_coefficients(v, beta, lam)?;
    let sys = FundamentalSystem::new(v, beta, lam);
    let xc = Complex64::from(x);
    let jet = match kind {
        Solution::F2Plus => {
            -cc.c11 * sys.native(Solution::F1Plus, xc)?
                + -cc.c12 * sys.native(Solution::F1Minus, xc)?
        }
        Solution::F1Plus => {
            -cc.c22 * sys.native(Solution::F2Plus, xc)?
                + -cc.c21 * sys.native(Solution::F2Minus, xc)?
        }
        _ => unreachable!("minus branches handled above"),
    };
    Ok(jet.sample())
}

/// `ρ(x)`: 1 on `x ≥ 0`, `-β²` on `x < 0`.
pub fn density(x: f64, beta: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -beta * beta
    }
}

/// `-f'' + q f - λ² ρ f` for the glued solution `kind` at `x`, with `f''`
/// from term-wise differentiation.
pub fn ode_residual(
    p: &FourierPotential,
    v: &VTable,
    lam: Complex64,
    x: f64,
    kind: Solution,
) -> Result<Complex64> {
    let sys = FundamentalSystem::new(v, p.beta(), lam);
    let jet = sys.extended(kind, x)?;
    Ok(residual_of(&jet, p, lam, x))
}

pub(crate) fn residual_of(jet: &Jet, p: &FourierPotential, lam: Complex64, x: f64) -> Complex64 {
    -jet.d2 + p.eval(x.into()) * jet.value - lam * lam * density(x, p.beta()) * jet.value
}
