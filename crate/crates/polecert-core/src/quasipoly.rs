//! Evaluation kernel for the closed-loop characteristic function
//!
//! ```text
//!     Δ(s) = s + a + e^{−τs} (α s + β)
//! ```
//!
//! together with the integral functions that make the pole-placement
//! formulas closed-form, and the scalar criterion functions used by the
//! dominance arguments.
//!
//! The integral functions are
//!
//! ```text
//!     f1(τ; u, v)       = ∫₀¹ e^{τ(t u + (1−t) v)} dt
//!     f2(τ; s₁, s₂, s₃) = ∫₀¹∫₀¹ (1−t₁) e^{τ(t₁ s₁ + (1−t₁)(t₂ s₂ + (1−t₂) s₃))} dt₂ dt₁
//! ```
//!
//! equal to the first resp. second divided difference of s ↦ e^{τs} divided
//! by τ resp. τ². Both are strictly positive and fully symmetric in their
//! spectral arguments. They are evaluated through cancellation-free kernels
//! built on `exp_m1`, with power series below the small-gap thresholds
//! (|τ·gap| < 1e−6 for f1, 1e−4 for f2), so the closed forms remain accurate
//! for every gap pattern down to coincident arguments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coefficients of the neutral quasipolynomial Δ(s) = s + a + e^{−τs}(αs + β).
///
/// For the delayed-PD closed loop, a is the linearized plant coefficient
/// ν − μ, α the derivative gain and β the proportional gain. α = 0 gives the
/// retarded (delayed-P) case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeutralQuasiPoly {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
}

/// Coefficients of the retarded quasipolynomial a + s + k_p′ e^{−τs}
/// produced by delayed-P designs. Evaluation goes through the neutral form
/// with α = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetardedQuasiPoly {
    pub a: f64,
    pub kp: f64,
    pub tau: f64,
}

impl From<RetardedQuasiPoly> for NeutralQuasiPoly {
    fn from(r: RetardedQuasiPoly) -> Self {
        NeutralQuasiPoly { a: r.a, alpha: 0.0, beta: r.kp, tau: r.tau }
    }
}

impl NeutralQuasiPoly {
    pub fn new(a: f64, alpha: f64, beta: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidInput(format!("delay must be positive and finite, got τ = {tau}")));
        }
        if !(a.is_finite() && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        Ok(NeutralQuasiPoly { a, alpha, beta, tau })
    }

    /// Δ(s). The exponential is computed once and fused with the affine
    /// delayed factor.
    #[inline]
    pub fn eval_delta(&self, s: Complex64) -> Complex64 {
        let w = (-self.tau * s).exp();
        s + self.a + w * (self.alpha * s + self.beta)
    }

    /// Δ′(s) = 1 + e^{−τs} (α − τ(αs + β)).
    #[inline]
    pub fn eval_delta_deriv(&self, s: Complex64) -> Complex64 {
        let w = (-self.tau * s).exp();
        w * (self.alpha - self.tau * (self.alpha * s + self.beta)) + 1.0
    }

    /// Δ restricted to the real axis.
    #[inline]
    pub fn eval_delta_real(&self, t: f64) -> f64 {
        let w = (-self.tau * t).exp();
        t + self.a + w * (self.alpha * t + self.beta)
    }

    /// Δ′ restricted to the real axis.
    #[inline]
    pub fn eval_delta_deriv_real(&self, t: f64) -> f64 {
        let w = (-self.tau * t).exp();
        w * (self.alpha - self.tau * (self.alpha * t + self.beta)) + 1.0
    }

    /// Real part of the essential-spectrum (root-chain) asymptote,
    /// ln|α| / τ. `None` in the retarded case α = 0, where no chain exists.
    pub fn chain_abscissa(&self) -> Option<f64> {
        if self.alpha == 0.0 {
            None
        } else {
            Some(self.alpha.abs().ln() / self.tau)
        }
    }
}

/// The delay-scaled shift of Δ around a real root s₂:
///
/// ```text
///     Δ′(z) = z − ξ + e^{−z} (θ z + ξ) = τ · Δ(s₂ + z/τ),
/// ```
///
/// with θ = α e^{−τ s₂} and ξ = −τ(a + s₂). The identity requires Δ(s₂) = 0.
/// Roots of Δ map to roots of the shifted function via z = τ(s − s₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedQuasiPoly {
    pub theta: f64,
    pub xi: f64,
}

impl ShiftedQuasiPoly {
    /// Scaled form around the real root `s2` of `qp`.
    pub fn from_root(qp: &NeutralQuasiPoly, s2: f64) -> Self {
        ShiftedQuasiPoly {
            theta: qp.alpha * (-qp.tau * s2).exp(),
            xi: -qp.tau * (qp.a + s2),
        }
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        z - self.xi + (-z).exp() * (self.theta * z + self.xi)
    }
}

/// (e^w − 1)/w, continued by its limit 1 at w = 0. Power series below
/// |w| < 1e−6, `exp_m1` otherwise; both branches are cancellation-free.
#[inline]
pub(crate) fn e1(w: f64) -> f64 {
    if w.abs() < 1e-6 {
        1.0 + w * (0.5 + w * (1.0 / 6.0 + w / 24.0))
    } else {
        w.exp_m1() / w
    }
}

/// First integral function f1(τ; u, v) = (e^{τu} − e^{τv}) / (τ(u − v)),
/// continued by e^{τu} at u = v. Strictly positive; arguments are sorted
/// descending first, so symmetry holds bit-exactly.
pub fn f1(tau: f64, u: f64, v: f64) -> f64 {
    let (u, v) = if u >= v { (u, v) } else { (v, u) };
    let w = tau * (u - v);
    (tau * v).exp() * e1(w)
}

/// Kernel of the second divided difference of exp: for p ≥ q ≥ 0,
///
/// ```text
///     K(p, q) = (q e^p − p e^q + p − q) / (p q (p − q))
///             = Σ_{n≥0} h_n(p, q) / (n + 2)!        (h_n complete homogeneous)
/// ```
///
/// All four evaluation branches are algebraically this same closed form,
/// grouped so that every branch sums terms of one sign.
pub(crate) fn f2_kernel(p: f64, q: f64) -> f64 {
    debug_assert!(p >= q && q >= 0.0);
    if p < 1e-4 {
        // All gaps small: positive power series in (p, q).
        let mut h = 1.0; // h_0
        let mut acc = h / 2.0;
        let mut qn = 1.0;
        let mut fact = 2.0; // (n+2)! running
        for n in 1..16 {
            qn *= q;
            h = p * h + qn;
            fact *= (n + 2) as f64;
            let term = h / fact;
            acc += term;
            if term < acc * 1e-18 {
                break;
            }
        }
        acc
    } else if q <= 0.5 * p && q <= 0.125 {
        // s₂ near s₃: K = (expm1(p) − p·(expm1(q)/q)) / (p(p−q)).
        (p.exp_m1() - p * e1(q)) / (p * (p - q))
    } else if p - q <= 0.125 {
        // s₁ near s₂: K = (q e^q · (expm1(w)/w) − expm1(q)) / (pq), w = p−q.
        let w = p - q;
        (q * q.exp() * e1(w) - q.exp_m1()) / (p * q)
    } else {
        (q * p.exp() - p * q.exp() + p - q) / (p * q * (p - q))
    }
}

/// Second integral function f2(τ; s₁, s₂, s₃), fully symmetric; arguments
/// are canonically sorted before evaluation so that every permutation takes
/// the identical code path (cyclic invariance holds bit-exactly).
pub fn f2(tau: f64, s1: f64, s2: f64, s3: f64) -> f64 {
    let mut v = [s1, s2, s3];
    v.sort_by(|a, b| b.partial_cmp(a).expect("f2 arguments must not be NaN"));
    let [x, y, z] = v;
    let p = tau * (x - z);
    let q = tau * (y - z);
    (tau * z).exp() * f2_kernel(p, q)
}

/// Hyperbolic cotangent with the 1/x + x/3 expansion below |x| < 1e−4.
pub fn coth(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 / x + x / 3.0
    } else {
        1.0 / x.tanh()
    }
}

/// The delay-Lyapunov dominance bound evaluated at a real candidate root:
///
/// ```text
///     V(s₀) = (|α| (1 + |s₀| τ) + |β| τ) e^{−s₀ τ}.
/// ```
///
/// V(s₀) < 1 is sufficient for s₀ to be the rightmost spectral value.
pub fn fvl_v(qp: &NeutralQuasiPoly, s0: f64) -> f64 {
    (qp.alpha.abs() * (1.0 + s0.abs() * qp.tau) + qp.beta.abs() * qp.tau) * (-s0 * qp.tau).exp()
}

/// Scaled form of V on the equidistributed three-root family, in the scaled
/// gap u = τd and scaled dominant root v = τs₁ (valid for s₁ ≤ 0):
///
/// ```text
///     W(u, v) = (1 − 2v + u + u·coth(u/2)) e^{−u}.
/// ```
pub fn gcrrid_w(u: f64, v: f64) -> f64 {
    (1.0 - 2.0 * v + u + u * coth(0.5 * u)) * (-u).exp()
}

/// The v solving W(u, v) = 1 for a given u > 0: the exact boundary of the
/// sufficiency region of W. W(u, ·) is affine and strictly decreasing in v,
/// so W ≥ 1 exactly below this boundary.
pub fn gcrrid_v_boundary(u: f64) -> f64 {
    0.5 * (u * coth(0.5 * u) + u + 1.0 - u.exp())
}

/// Scaled dominance-margin function of the exactly-two-root family, in the
/// scaled variables A = τa, u = τ(s₁ − s₂), v = τs₁:
///
/// ```text
///     u·Z(A, u, v) = e^{−u} (A + v − u)(2v − 1) + (A + v)(1 − 2v + u).
/// ```
///
/// For v ≤ 0 and 0 ≤ (A+v)/u < 1, Z equals the bound V evaluated on the
/// coefficients assigned by the two-root placement; Z < 1 certifies
/// dominance beyond the reach of the unscaled bound.
pub fn icrrid_z(a_scaled: f64, u: f64, v: f64) -> f64 {
    ((-u).exp() * (a_scaled + v - u) * (2.0 * v - 1.0) + (a_scaled + v) * (1.0 - 2.0 * v + u)) / u
}
