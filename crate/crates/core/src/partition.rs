//! Smooth partition of unity subordinate to the two atomic balls, its
//! analytic derivatives, and the constants c_A and C entering the bounds.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::MolecularSystem;
use crate::num::Real;

/// exp(−1/y) and its first two derivatives, extended by 0 for y ≤ 0.
///
/// Every derivative of exp(−1/y) vanishes as y → 0⁺, so once the
/// exponential underflows all three values are exactly 0.
fn bump_q<T: Real>(y: T) -> (T, T, T) {
    if y <= T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    let e = (-y.recip()).exp();
    if e == T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    let y2 = y * y;
    let q1 = e / y2;
    let q2 = e * ((y2 * y2).recip() - T::of(2.0) / (y2 * y));
    (e, q1, q2)
}

/// Smooth monotone ramp: 0 for x ≤ a, 1 for x ≥ b, with the complement
/// identity ramp(x) + ramp(a+b−x) = 1.
pub fn ramp<T: Real>(a: T, b: T, x: T) -> T {
    ramp_with_derivatives(a, b, x).0
}

/// (ramp, ramp′, ramp″) at x.
pub fn ramp_with_derivatives<T: Real>(a: T, b: T, x: T) -> (T, T, T) {
    debug_assert!(a < b, "ramp requires a < b");
    let (qs, qs1, qs2) = bump_q(x - a);
    let (qt, qt1, qt2) = bump_q(b - x);
    let d = qs + qt;
    if d == T::zero() {
        // Both factors underflow only in (a,b) with an extremely wide ramp;
        // treat the left half as 0, the right half as 1.
        let mid = (a + b) * T::of(0.5);
        let v = if x < mid { T::zero() } else { T::one() };
        return (v, T::zero(), T::zero());
    }
    let value = qs / d;
    // d/dx q(b−x) = −q′(b−x), hence:
    let g = qs1 * qt + qs * qt1;
    let dd = qs1 - qt1;
    let first = g / (d * d);
    let g1 = qs2 * qt - qs * qt2;
    let second = (g1 * d - T::of(2.0) * g * dd) / (d * d * d);
    (value, first, second)
}

/// Values and two derivatives of p₁, p₂, p₃ at one point.
#[derive(Debug, Clone, Copy)]
pub struct PartitionSample<T> {
    pub p: [T; 3],
    pub dp: [T; 3],
    pub ddp: [T; 3],
}

/// Radial partition of unity for the two balls Ω_k = B(±R, a_max):
/// p_k(x) = t(|x − R_k|) with a radial profile t that is 1 on [0, a_min]
/// and decays smoothly to 0 across [a_min, a_max]; p₃ is the complement.
///
/// The geometry is parametrized by the half-overlap ℓ: a_min = R − ℓ and
/// a_max = R + ℓ, so the two ramps overlap exactly on (−ℓ, ℓ), where the
/// complement identity of the ramp makes p₁ + p₂ = 1 pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity<T> {
    pub centers: [T; 2],
    pub a_min: T,
    pub a_max: T,
    pub ell: T,
}

impl<T: Real> PartitionOfUnity<T> {
    pub fn new(r: T, ell: T) -> Result<Self> {
        if !(ell > T::zero() && ell < r) {
            return Err(Error::Config(format!(
                "overlap parameter must satisfy 0 < ell < R, got ell = {ell}, R = {r}"
            )));
        }
        Ok(PartitionOfUnity {
            centers: [-r, r],
            a_min: r - ell,
            a_max: r + ell,
            ell,
        })
    }

    /// Radial profile (t, t′, t″) as a function of the distance r ≥ 0.
    fn radial(&self, r: T) -> (T, T, T) {
        if r <= self.a_min {
            (T::one(), T::zero(), T::zero())
        } else if r >= self.a_max {
            (T::zero(), T::zero(), T::zero())
        } else {
            let (v, d1, d2) = ramp_with_derivatives(self.a_min, self.a_max, r);
            (T::one() - v, -d1, -d2)
        }
    }

    pub fn eval(&self, x: T) -> PartitionSample<T> {
        let mut p = [T::zero(); 3];
        let mut dp = [T::zero(); 3];
        let mut ddp = [T::zero(); 3];
        for k in 0..2 {
            let d = x - self.centers[k];
            let r = d.abs();
            let s = if d < T::zero() { -T::one() } else { T::one() };
            let (t, t1, t2) = self.radial(r);
            p[k] = t;
            dp[k] = s * t1;
            ddp[k] = t2;
        }
        // Complement; clamp away the negative round-off.
        p[2] = (T::one() - p[0] - p[1]).max(T::zero());
        dp[2] = -dp[0] - dp[1];
        ddp[2] = -ddp[0] - ddp[1];
        PartitionSample { p, dp, ddp }
    }

    /// Ω_k radius (both balls share it).
    pub fn ball_radius(&self) -> T {
        self.a_max
    }
}

/// Golden-section search refining a local minimum of `f` bracketed by
/// [a, b]; returns (argmin, min).
fn golden_min<T: Real, F: Fn(T) -> T>(f: &F, mut a: T, mut b: T) -> (T, T) {
    let inv_phi = T::of(0.618_033_988_749_894_9);
    let tol = (b - a).abs() * T::of(1e-12) + T::of(1e-14);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Dense scan of `f` over [lo, hi] with golden-section refinement of every
/// bracketed local minimum; returns the global minimum found.
fn scan_min<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T, n_samples: usize) -> (T, T) {
    let n = n_samples.max(3);
    let step = (hi - lo) / T::of((n - 1) as f64);
    let values: Vec<(T, T)> = (0..n)
        .map(|i| {
            let x = lo + step * T::of(i as f64);
            (x, f(x))
        })
        .collect();
    let (mut best_x, mut best_f) = values[0];
    for &(x, fx) in &values {
        if fx < best_f {
            best_f = fx;
            best_x = x;
        }
    }
    for i in 1..n - 1 {
        if values[i].1 <= values[i - 1].1 && values[i].1 <= values[i + 1].1 {
            let (x, fx) = golden_min(f, values[i - 1].0, values[i + 1].0);
            if fx < best_f {
                best_f = fx;
                best_x = x;
            }
        }
    }
    (best_x, best_f)
}

/// Tight global minimum V̲ of the external potential, by dense scan plus
/// golden refinement over the region where the potential is non-trivial.
pub fn potential_minimum<T: Real>(sys: &MolecularSystem<T>) -> T {
    let span = sys.r + T::of(2.0) + T::of(4.0) * sys.alpha;
    let f = |x: T| sys.potential_total(x);
    scan_min(&f, -span, span, 8193).1
}

/// Mode for the operator-coercivity constant c_A.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaMode {
    /// 1/√λ₁ from a reference diagonalization (the sharpest admissible value).
    Optimal,
    /// 1/√(V̲ + ς) from the potential's global minimum — fully guaranteed,
    /// no eigenvalue information needed.
    Guaranteed,
}

/// The constant c_A with ‖v‖_{L²} ≤ c_A ‖v‖_A.
///
/// `lambda_1` is the reference ground-state eigenvalue, required by
/// `Optimal` mode.
pub fn constant_c_a<T: Real>(
    sys: &MolecularSystem<T>,
    mode: CaMode,
    lambda_1: Option<T>,
) -> Result<T> {
    match mode {
        CaMode::Optimal => {
            let lam = lambda_1.ok_or_else(|| {
                Error::Config("optimal c_A mode needs a reference eigenvalue".into())
            })?;
            if !(lam > T::zero()) {
                return Err(Error::NotCoercive(format!(
                    "reference eigenvalue {lam} is not positive"
                )));
            }
            Ok(lam.sqrt().recip())
        }
        CaMode::Guaranteed => {
            let vmin = potential_minimum(sys);
            let floor = vmin + sys.sigma;
            if !(floor > T::zero()) {
                return Err(Error::NotCoercive(format!(
                    "V̲ + ς = {floor} is not positive; increase the shift"
                )));
            }
            Ok(floor.sqrt().recip())
        }
    }
}

/// Pointwise integrand of the constant C:
/// Σ_k [ −¼p_k″ + |p_k′|²/(8p_k) + V_k(p_k−1) + (ς_k−ς)p_k ], with V₃ = 0
/// and the quotient term set to 0 wherever p_k vanishes numerically.
fn c_integrand<T: Real>(pu: &PartitionOfUnity<T>, sys: &MolecularSystem<T>, x: T) -> T {
    let s = pu.eval(x);
    let quarter = T::of(0.25);
    let eighth = T::of(0.125);
    let p_floor = T::of(1e-14);
    let mut total = T::zero();
    for k in 0..3 {
        let mut term = -quarter * s.ddp[k];
        if s.p[k] >= p_floor {
            term += eighth * s.dp[k] * s.dp[k] / s.p[k];
        }
        let (v_k, sigma_k) = match k {
            0 | 1 => (sys.atomic_potential(k, x), sys.atomic_shift(k)),
            _ => (T::zero(), sys.sigma_3),
        };
        term += v_k * (s.p[k] - T::one()) + (sigma_k - sys.sigma) * s.p[k];
        total += term;
    }
    total
}

/// The constant C = 1 + c_A²·(sup of the partition integrand)⁺.
///
/// The supremum is taken by dense sampling (4× the grid resolution) over the
/// box followed by golden-section refinement of each bracketed local
/// maximum.
pub fn constant_big_c<T: Real>(
    pu: &PartitionOfUnity<T>,
    sys: &MolecularSystem<T>,
    grid: &Grid<T>,
    c_a: T,
) -> T {
    let neg = |x: T| -c_integrand(pu, sys, x);
    let n_samples = 4 * grid.n_points();
    let (_, neg_min) = scan_min(&neg, grid.x_min(), grid.x_max(), n_samples);
    let sup = (-neg_min).max(T::zero());
    T::one() + c_a * c_a * sup
}
