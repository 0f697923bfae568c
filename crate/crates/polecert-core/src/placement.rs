//! Closed-form partial pole placement for the neutral quasipolynomial
//! Δ(s) = s + a + e^{−τs}(αs + β).
//!
//! Assigning real spectral values pins the coefficients through a Cramer
//! system whose solution is expressed with the divided-difference integrals
//! F₁ and F₂ (see [`crate::quasipoly`]):
//!
//! * three roots s₃ < s₂ < s₁ determine (a, α, β) for any τ > 0, with
//!   α = F₂(s₁+s₂, s₁+s₃, s₂+s₃)/F₂(s₁, s₂, s₃) ∈ (0, e^{τs₁}), and s₁ is
//!   then strictly dominant;
//! * two roots s₂ < s₁ plus the plant coefficient a determine (α, β); the
//!   position of a possible third real root is classified by
//!   Λ₃ = (a+s₁)/(s₁−s₂) against three thresholds φ₁ < φ₂ < φ₃;
//! * the delay that places the rightmost root at s₁ for a given plant is
//!   recovered by inverting τ ↦ a(τ) = −s₁ − ζ(τ), where
//!   ζ = F₁(s₂,s₃)/(τF₂(s₁,s₂,s₃)).
//!
//! The remaining (nonreal) spectrum is characterized through the shifted
//! variable z = −τ(s − s₂): when the compatibility identity
//! ln(±θ) = ξ(θ−1)/(2θ) holds, all remaining roots sit on one vertical
//! line and their imaginary parts solve a tangent (three-root case) or
//! cotangent (two-root case) equation per branch ((2k−1)π, (2k+1)π);
//! otherwise the remaining roots form the essential chain approaching
//! Re(s) = ln|α|/τ.
//!
//! The exponential-estimate constants bound |y(t)| ≤ k·e^{(s₁+ε)t}‖y₀‖∞
//! through a Bromwich-contour integral evaluated by adaptive quadrature.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::quasipoly::{self, f2, NeutralQuasiPoly};
use crate::spectrum::DominanceCertificate;
use crate::{Error, Result};

/// Three prescribed real spectral values, strictly decreasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootTriple {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl RootTriple {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Result<Self> {
        if !(s1.is_finite() && s2.is_finite() && s3.is_finite()) {
            return Err(Error::InvalidInput("roots must be finite".into()));
        }
        if !(s3 < s2 && s2 < s1) {
            return Err(Error::InvalidInput(format!(
                "roots must be strictly decreasing: need s3 < s2 < s1, got ({s1}, {s2}, {s3})"
            )));
        }
        Ok(RootTriple { s1, s2, s3 })
    }

    /// Uniform spacing test: |s₁ − 2s₂ + s₃| < 1e−12 · (1 + Σ|sᵢ|).
    pub fn is_equidistributed(&self) -> bool {
        let scale = 1.0 + self.s1.abs() + self.s2.abs() + self.s3.abs();
        (self.s1 - 2.0 * self.s2 + self.s3).abs() < 1e-12 * scale
    }
}

/// Two prescribed real spectral values. Coincident values (s₂ = s₁) are
/// admitted only through [`RootPair::coincident`], for the double-root
/// entry points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootPair {
    pub s1: f64,
    pub s2: f64,
}

impl RootPair {
    pub fn new(s1: f64, s2: f64) -> Result<Self> {
        if !(s1.is_finite() && s2.is_finite()) {
            return Err(Error::InvalidInput("roots must be finite".into()));
        }
        if !(s2 < s1) {
            return Err(Error::InvalidInput(format!(
                "pair must be strictly decreasing: need s2 < s1, got ({s1}, {s2})"
            )));
        }
        Ok(RootPair { s1, s2 })
    }

    /// Double root s₁ = s₂, for the multiplicity-two design path.
    pub fn coincident(s1: f64) -> Result<Self> {
        if !s1.is_finite() {
            return Err(Error::InvalidInput("roots must be finite".into()));
        }
        Ok(RootPair { s1, s2: s1 })
    }

    pub fn is_coincident(&self) -> bool {
        self.s1 == self.s2
    }
}

/// Five-way classification of the two-root configuration by
/// Λ₃ = (a+s₁)/(s₁−s₂). R1–R3 carry a coexisting third real root x; R4 and
/// R5 have exactly two real roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Λ₃ ≤ φ₁: third root x > s₁; s₁ not dominant.
    R1,
    /// φ₁ < Λ₃ < φ₂: s₂ < x < s₁; s₁ strictly dominant.
    R2,
    /// φ₂ < Λ₃ ≤ φ₃: x < s₂; s₁ strictly dominant.
    R3,
    /// φ₃ < Λ₃ < 1: exactly two real roots; s₁ strictly dominant.
    R4,
    /// Λ₃ ≥ 1: exactly two real roots; s₁ not strictly dominant.
    R5,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Region::R1 => "R1",
            Region::R2 => "R2",
            Region::R3 => "R3",
            Region::R4 => "R4",
            Region::R5 => "R5",
        };
        f.write_str(s)
    }
}

/// Region label plus the located third real root for R1–R3. Ties of Λ₃
/// with a threshold (within 1e−12 relative) report the adjacent label in
/// `boundary_with`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub region: Region,
    /// The coexisting third real root; present exactly for R1, R2, R3.
    pub x: Option<f64>,
    pub boundary_with: Option<Region>,
}

/// Dominance status of a double real root s₁ (multiplicity two).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MidDominance {
    StrictlyDominant,
    DominantNotStrict,
    NotDominant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    P,
    Pd,
}

/// Roots a controller design was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignedRoots {
    Triple(RootTriple),
    Pair(RootPair),
}

impl AssignedRoots {
    pub fn s1(&self) -> f64 {
        match self {
            AssignedRoots::Triple(t) => t.s1,
            AssignedRoots::Pair(p) => p.s1,
        }
    }
}

/// Synthesized feedback gains. For PD designs k_d = α and k_p = β of the
/// closed-loop quasipolynomial; P designs carry k_p′ in `kp` with kd = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerDesign {
    pub kind: ControllerKind,
    pub kp: f64,
    pub kd: f64,
    pub tau: f64,
    /// Linearized plant coefficient ν − μ.
    pub plant_a: f64,
    pub assigned_roots: AssignedRoots,
    /// Filled by a later certification pass; designs are synthesized first.
    pub certificate: Option<DominanceCertificate>,
}

impl ControllerDesign {
    /// Closed-loop quasipolynomial of this design.
    pub fn quasipoly(&self) -> Result<NeutralQuasiPoly> {
        NeutralQuasiPoly::new(self.plant_a, self.kd, self.kp, self.tau)
    }
}

/// Location of all nonreal spectrum implied by a real-root assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCharacterization {
    /// Whether the compatibility identity pins the remaining roots onto a
    /// single vertical line.
    pub on_axis: bool,
    /// Common real part when on-axis; chain asymptote ln|α|/τ otherwise;
    /// absent for retarded (α = 0) designs, which have no neutral chain.
    pub axis_re: Option<f64>,
    pub theta: f64,
    pub xi: f64,
    /// Positive scaled imaginary parts, one per branch; the roots are
    /// axis_re ± iω/τ.
    pub omegas: Vec<f64>,
}

/// Constants of the exponential bound |y(t)| ≤ k·e^{rate·t}·‖y₀‖∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpEstimate {
    pub epsilon: f64,
    pub k: f64,
    pub k0: f64,
    /// s₁ + ε.
    pub rate: f64,
    /// Bromwich truncation height (T₁ or T₂); the tail beyond it
    /// contributes exactly 1/π to k₀.
    pub t_cut: f64,
}

/// Certified box in the (τa, τs₁) plane on which the dominance of s₁
/// persists although the classical sufficient bound is ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessBox {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub v1: f64,
    pub v2: f64,
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!("delay must be positive and finite, got {tau}")));
    }
    Ok(())
}

/// Coefficients (a, α, β) placing the three given roots, through the
/// F-function forms of the Cramer solution. α lands in (0, e^{τs₁}) and s₁
/// is strictly dominant for the returned quasipolynomial.
pub fn assign_three(roots: &RootTriple, tau: f64) -> Result<NeutralQuasiPoly> {
    check_tau(tau)?;
    let (s1, s2, s3) = (roots.s1, roots.s2, roots.s3);
    let alpha = f2(tau, s1 + s2, s1 + s3, s2 + s3) / f2(tau, s1, s2, s3);
    let zeta = zeta_three(roots, tau);
    let a = -s1 - zeta;
    let beta = -alpha * s1 + zeta * (tau * s1).exp();
    NeutralQuasiPoly::new(a, alpha, beta, tau)
}

/// ζ(τ) = F₁(s₂,s₃)/(τ·F₂(s₁,s₂,s₃)), evaluated through the shared
/// exponential kernels so the common factor e^{τs₃} cancels exactly and
/// the ratio never under- or overflows for τ(s₁−s₃) ≲ 400. Beyond that
/// the exponentially small ratio is assembled in log space.
fn zeta_three(roots: &RootTriple, tau: f64) -> f64 {
    let p = tau * (roots.s1 - roots.s3);
    let q = tau * (roots.s2 - roots.s3);
    if p <= 400.0 {
        return quasipoly::e1(q) / (tau * quasipoly::f2_kernel(p, q));
    }
    let w = p - q;
    // F₁(s₂,s₃) = e^{τs₃}·e1(q) with ln e1(q) = q − ln q + ln(1−e^{−q}) for
    // large q; F₂ = e^{τs₃}·K(p,q) with K ≈ e^p/(p·w) (w large) or
    // K ≈ e^q·(q·e1(w)−1)/(pq)·w/w (w moderate).
    let ln_e1q = if q > 40.0 { q - q.ln() } else { quasipoly::e1(q).ln() };
    let ln_k = if w > 40.0 {
        p - (p * w).ln()
    } else {
        q + (q * quasipoly::e1(w) - 1.0).ln() - (p * q).ln()
    };
    (ln_e1q - ln_k - tau.ln()).exp()
}

/// a(τ) = −s₁ − ζ(τ) of the three-root assignment: strictly below −s₁,
/// approaching it as τ → ∞ and −∞ as τ → 0⁺.
pub fn a_of_tau(roots: &RootTriple, tau: f64) -> f64 {
    -roots.s1 - zeta_three(roots, tau)
}

/// Coefficients (α, β) placing exactly the given pair for a fixed plant
/// coefficient a. Whether a third real root in fact coexists is the
/// business of [`classify_two_root`].
pub fn assign_two_exact(pair: &RootPair, a: f64, tau: f64) -> Result<NeutralQuasiPoly> {
    check_tau(tau)?;
    if pair.is_coincident() {
        return Err(Error::InvalidInput(
            "two-root assignment needs distinct roots; coincident pairs go through the double-root entry points".into(),
        ));
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput(format!("plant coefficient must be finite, got {a}")));
    }
    let (s1, s2) = (pair.s1, pair.s2);
    let e1t = (tau * s1).exp();
    let e2t = (tau * s2).exp();
    let alpha = (-(a + s1) * e1t + (a + s2) * e2t) / (s1 - s2);
    let beta = -alpha * s1 - e1t * (a + s1);
    NeutralQuasiPoly::new(a, alpha, beta, tau)
}

/// Thresholds (φ₁, φ₂, φ₃) separating the five Λ₃-regions, as functions of
/// u = τ(s₁−s₂); always φ₁ < φ₂ < φ₃ < 1. Series branches keep them
/// accurate for small u, where all three denominators vanish quadratically.
pub fn region_thresholds(u: f64) -> (f64, f64, f64) {
    let em1 = u.exp_m1();
    let phi3 = -1.0 / em1;
    let (d1, d2);
    if u < 1e-3 {
        // e^u(u−1)+1 = Σ_{n≥2} (n−1)/n!·uⁿ; e^u−1−u = Σ_{n≥2} uⁿ/n!.
        d1 = u * u * (0.5 + u * (1.0 / 3.0 + u * (0.125 + u / 30.0)));
        d2 = u * u * (0.5 + u * (1.0 / 6.0 + u * (1.0 / 24.0 + u / 120.0)));
    } else {
        // (u−1)·expm1(u) + u equals e^u(u−1)+1 with far milder cancellation.
        d1 = (u - 1.0) * em1 + u;
        d2 = em1 - u;
    }
    let phi1 = -em1 / d1;
    let phi2 = -u / d2;
    (phi1, phi2, phi3)
}

/// Classify the position of a possible third real root relative to the
/// assigned pair, by Λ₃ = (a+s₁)/(s₁−s₂) against the thresholds
/// φ₁ < φ₂ < φ₃ < 1. For R1–R3 the third root itself is located by
/// bisection of t ↦ Δ(t) on the bracket the label guarantees.
pub fn classify_two_root(pair: &RootPair, a: f64, tau: f64) -> Result<RegionLabel> {
    check_tau(tau)?;
    if pair.is_coincident() {
        return Err(Error::InvalidInput(
            "region classification needs distinct roots; use the double-root dominance check instead".into(),
        ));
    }
    let delta = pair.s1 - pair.s2;
    let u = tau * delta;
    let lambda3 = (a + pair.s1) / delta;
    let (phi1, phi2, phi3) = region_thresholds(u);
    let tol = 1e-12 * (1.0 + lambda3.abs());

    // Closed/open pattern: ≤ at φ₁ and φ₃, strict on both sides of φ₂,
    // ≥ at 1. Ties within tol also report the adjacent label.
    let region = if lambda3 <= phi1 {
        Region::R1
    } else if lambda3 < phi2 {
        Region::R2
    } else if lambda3 <= phi3 {
        Region::R3
    } else if lambda3 < 1.0 {
        Region::R4
    } else {
        Region::R5
    };
    let boundary_with = if (lambda3 - phi1).abs() <= tol {
        Some(if region == Region::R1 { Region::R2 } else { Region::R1 })
    } else if (lambda3 - phi2).abs() <= tol {
        Some(if region == Region::R2 { Region::R3 } else { Region::R2 })
    } else if (lambda3 - phi3).abs() <= tol {
        Some(if region == Region::R3 { Region::R4 } else { Region::R3 })
    } else if (lambda3 - 1.0).abs() <= tol {
        Some(if region == Region::R4 { Region::R5 } else { Region::R4 })
    } else {
        None
    };

    // At a threshold tie the third root has collided with s₁ (φ₁ locus),
    // with s₂ (φ₂), or escaped to −∞ (φ₃, the retarded locus α = 0); the
    // collided location is reported directly and the escaped root omitted.
    let x = match region {
        Region::R1 | Region::R2 | Region::R3 => match (region, boundary_with) {
            (Region::R1, Some(Region::R2)) | (Region::R2, Some(Region::R1)) => Some(pair.s1),
            (Region::R2, Some(Region::R3)) | (Region::R3, Some(Region::R2)) => Some(pair.s2),
            (_, Some(Region::R4)) => None,
            _ => {
                let qp = assign_two_exact(pair, a, tau)?;
                Some(locate_third_root(&qp, pair)?)
            }
        },
        _ => None,
    };
    Ok(RegionLabel { region, x, boundary_with })
}

/// The third real root is the unique zero of the deflated function
/// g(t) = Δ(t)/((t−s₁)(t−s₂)): whenever three real roots coexist (α > 0),
/// g is negative left of the root and positive right of it, in every
/// region. Deflation keeps the zero simple and well conditioned even when
/// it sits close to an assigned root, where Δ itself is noise-bound.
fn locate_third_root(qp: &NeutralQuasiPoly, pair: &RootPair) -> Result<f64> {
    let (s1, s2) = (pair.s1, pair.s2);
    let g = |t: f64| qp.eval_delta_real(t) / ((t - s1) * (t - s2));
    let mut hi = s1 + 1.0;
    let mut grow = 1.0;
    while !(g(hi) > 0.0) {
        grow *= 2.0;
        hi = s1 + grow;
        if grow > 1e12 {
            return Err(Error::Solver(format!(
                "no deflated sign change right of s1 = {s1} while locating the third root"
            )));
        }
    }
    let mut lo = s2 - 1.0;
    grow = 1.0;
    while !(g(lo) < 0.0) {
        grow *= 2.0;
        lo = s2 - grow;
        if grow > 1e12 {
            return Err(Error::Solver(format!(
                "no deflated sign change left of s2 = {s2} while locating the third root"
            )));
        }
    }
    let mut flo = g(lo);
    for _ in 0..200 {
        let mut mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let mut fm = g(mid);
        if !fm.is_finite() {
            // The midpoint landed on an assigned root; nudge off it.
            mid += 1e-9 * (hi - lo);
            if mid >= hi {
                break;
            }
            fm = g(mid);
            if !fm.is_finite() {
                break;
            }
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Dominance of a double real root s₁: strictly dominant iff
/// −1 ≤ τ(a+s₁) < 0, dominant but not strict at τ(a+s₁) = 0 (within
/// 1e−12), not dominant otherwise.
pub fn imid_check(s1: f64, a: f64, tau: f64) -> Result<MidDominance> {
    check_tau(tau)?;
    if !(s1.is_finite() && a.is_finite()) {
        return Err(Error::InvalidInput("arguments must be finite".into()));
    }
    let t = tau * (a + s1);
    Ok(if t.abs() <= 1e-12 {
        MidDominance::DominantNotStrict
    } else if (-1.0..0.0).contains(&t) {
        MidDominance::StrictlyDominant
    } else {
        MidDominance::NotDominant
    })
}

/// Search detail from [`solve_tau_for_a_detailed`]: the smallest positive
/// solution, plus how many further sign-change brackets the scan saw
/// (uniqueness is proven only for a_target = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauSearch {
    pub tau: f64,
    pub extra_brackets: usize,
}

fn bisect_a_crossing(roots: &RootTriple, a_target: f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = |t: f64| a_of_tau(roots, t) - a_target;
    let mut flo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = g(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest τ > 0 with a(τ) = a_target, with the bracket count; a scan of
/// a(τ) − a_target over a geometric grid supplies the brackets, each
/// resolved by bisection to 1e−15 relative. Equidistributed triples use
/// the closed form τ = (1/d)·ln((−s₃−a)/(−s₁−a)), verified against the
/// defining equation.
pub fn solve_tau_for_a_detailed(roots: &RootTriple, a_target: f64) -> Result<TauSearch> {
    if !a_target.is_finite() {
        return Err(Error::InvalidInput(format!("a_target must be finite, got {a_target}")));
    }
    if a_target >= -roots.s1 {
        return Err(Error::RateUnreachable);
    }
    if roots.is_equidistributed() {
        let d = roots.s1 - roots.s2;
        let tau = ((-roots.s3 - a_target) / (-roots.s1 - a_target)).ln() / d;
        let residual = a_of_tau(roots, tau) - a_target;
        if residual.abs() > 1e-9 * (1.0 + a_target.abs()) {
            return Err(Error::Solver(format!(
                "closed-form delay {tau} fails the defining equation by {residual}"
            )));
        }
        return Ok(TauSearch { tau, extra_brackets: 0 });
    }
    let g = |t: f64| a_of_tau(roots, t) - a_target;
    let mut brackets: Vec<(f64, f64)> = Vec::new();
    let mut t_prev = 1e-8;
    let mut g_prev = g(t_prev);
    let mut t = t_prev;
    while t < 1e4 {
        t *= 1.1;
        let g_now = g(t);
        if g_prev == 0.0 {
            brackets.push((t_prev, t_prev));
        } else if g_now != 0.0 && g_now.signum() != g_prev.signum() {
            brackets.push((t_prev, t));
        }
        t_prev = t;
        g_prev = g_now;
    }
    let first = match brackets.first() {
        Some(b) => *b,
        None => {
            return Err(Error::Solver(format!(
                "no delay in [1e-8, 1e4] reaches a(τ) = {a_target}"
            )))
        }
    };
    let tau = if first.0 == first.1 { first.0 } else { bisect_a_crossing(roots, a_target, first.0, first.1) };
    Ok(TauSearch { tau, extra_brackets: brackets.len() - 1 })
}

/// Smallest τ > 0 with a(τ) = a_target. See [`solve_tau_for_a_detailed`].
pub fn solve_tau_for_a(roots: &RootTriple, a_target: f64) -> Result<f64> {
    solve_tau_for_a_detailed(roots, a_target).map(|s| s.tau)
}

/// The unique τ* > 0 at which the three-root assignment needs no plant
/// stability margin (a(τ*) = 0); exists iff s₁ < 0.
pub fn tau_star_three(roots: &RootTriple) -> Result<f64> {
    if !(roots.s1 < 0.0) {
        return Err(Error::NoStabilizingTau);
    }
    if roots.is_equidistributed() {
        let d = roots.s1 - roots.s2;
        return Ok((roots.s3 / roots.s1).ln() / d);
    }
    solve_tau_for_a(roots, 0.0)
}

/// Largest admissible delay for the two-root (proportional) design at the
/// stability boundary: τ_p* = ln(s₂/s₁)/(s₁−s₂), degenerating to −1/s₁
/// for a coincident pair.
pub fn tau_star_pair(pair: &RootPair) -> Result<f64> {
    if !(pair.s1 < 0.0) {
        return Err(Error::NoStabilizingTau);
    }
    if pair.is_coincident() {
        return Ok(-1.0 / pair.s1);
    }
    Ok((pair.s2 / pair.s1).ln() / (pair.s1 - pair.s2))
}

/// Delayed-PD synthesis: for the plant ẏ = −νy + μσ(y) + I the linearized
/// coefficient is a = ν − μ; the delay solving a(τ) = ν − μ places the
/// prescribed triple, and the gains are k_d = α, k_p = β.
pub fn design_pd(nu: f64, mu: f64, roots: &RootTriple) -> Result<ControllerDesign> {
    if !(nu.is_finite() && mu.is_finite()) {
        return Err(Error::InvalidInput("plant coefficients must be finite".into()));
    }
    let plant_a = nu - mu;
    let search = solve_tau_for_a_detailed(roots, plant_a)?;
    let qp = assign_three(roots, search.tau)?;
    Ok(ControllerDesign {
        kind: ControllerKind::Pd,
        kp: qp.beta,
        kd: qp.alpha,
        tau: search.tau,
        plant_a,
        assigned_roots: AssignedRoots::Triple(*roots),
        certificate: None,
    })
}

/// Delayed-P synthesis for the retarded closed loop s + a + k_p′e^{−τs}:
/// distinct pairs use τ = ln((a+s₂)/(a+s₁))/(s₁−s₂) and
/// k_p′ = e^{τs₁}/(τ·e1(τ(s₁−s₂))); a coincident pair is placed as a double
/// root with τ = −1/(a+s₁), k_p′ = e^{τs₁}/τ.
pub fn design_p(nu: f64, mu: f64, pair: &RootPair) -> Result<ControllerDesign> {
    if !(nu.is_finite() && mu.is_finite()) {
        return Err(Error::InvalidInput("plant coefficients must be finite".into()));
    }
    let plant_a = nu - mu;
    if plant_a >= -pair.s1 {
        return Err(Error::RateUnreachable);
    }
    let (tau, kp) = if pair.is_coincident() {
        let tau = -1.0 / (plant_a + pair.s1);
        (tau, (tau * pair.s1).exp() / tau)
    } else {
        let delta = pair.s1 - pair.s2;
        let tau = ((plant_a + pair.s2) / (plant_a + pair.s1)).ln() / delta;
        (tau, (tau * pair.s1).exp() / (tau * quasipoly::e1(tau * delta)))
    };
    Ok(ControllerDesign {
        kind: ControllerKind::P,
        kp,
        kd: 0.0,
        tau,
        plant_a,
        assigned_roots: AssignedRoots::Pair(*pair),
        certificate: None,
    })
}

/// One sign-alternating entire form per branch equation: the tangent case
/// solves P·tan(ω/2) = ω as G(ω) = ω·cos(ω/2) − P·sin(ω/2), the cotangent
/// case P·cot(ω/2) = −ω as G(ω) = ω·sin(ω/2) + P·cos(ω/2). Either G takes
/// opposite signs at (2k−1)π and (2k+1)π, so bisection is safe on every
/// branch; Newton sharpens the root.
fn solve_branch(p: f64, tangent: bool, k: usize) -> Result<f64> {
    let g = |w: f64| {
        if tangent {
            w * (0.5 * w).cos() - p * (0.5 * w).sin()
        } else {
            w * (0.5 * w).sin() + p * (0.5 * w).cos()
        }
    };
    let dg = |w: f64| {
        let (s, c) = (0.5 * w).sin_cos();
        if tangent {
            c - 0.5 * w * s - 0.5 * p * c
        } else {
            s + 0.5 * w * c - 0.5 * p * s
        }
    };
    let mut lo = (2.0 * k as f64 - 1.0) * PI;
    let mut hi = (2.0 * k as f64 + 1.0) * PI;
    let mut flo = g(lo);
    if flo == 0.0 || g(hi) == 0.0 || flo.signum() == g(hi).signum() {
        return Err(Error::Solver(format!(
            "branch {k} endpoints fail to alternate for P = {p}"
        )));
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let fm = g(mid);
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut w = 0.5 * (lo + hi);
    for _ in 0..50 {
        let f = g(w);
        let d = dg(w);
        if d == 0.0 {
            break;
        }
        let step = f / d;
        w -= step;
        if step.abs() < 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    if g(w).abs() > 1e-10 * (1.0 + w.abs() + p.abs()) {
        return Err(Error::Solver(format!(
            "branch {k} root failed to converge: residual {} at ω = {w}",
            g(w)
        )));
    }
    Ok(w)
}

/// Remaining (nonreal) spectrum of a three-root assignment. When the
/// identity ln θ = ξ(θ−1)/(2θ) holds, every remaining root sits on
/// Re(s) = s₂ + ln(θ)/τ with scaled imaginary parts solving
/// (θ+1)/(2θ)·tan(ω/2) = ω/ξ, one per branch; otherwise the remaining
/// spectrum is the chain approaching Re(s) = ln(α)/τ.
pub fn remaining_spectrum_three(
    roots: &RootTriple,
    tau: f64,
    n_branches: usize,
) -> Result<SpectrumCharacterization> {
    if n_branches < 1 {
        return Err(Error::InvalidInput("n_branches must be at least 1".into()));
    }
    let qp = assign_three(roots, tau)?;
    let theta = qp.alpha * (-tau * roots.s2).exp();
    let p_big = tau * (roots.s1 - roots.s3);
    let q_big = tau * (roots.s2 - roots.s3);
    let xi = quasipoly::e1(p_big) / quasipoly::f2_kernel(p_big, q_big);
    let ln_theta = theta.ln();
    let on_axis = (ln_theta - xi * (theta - 1.0) / (2.0 * theta)).abs() <= 1e-10 * (1.0 + ln_theta.abs());
    if !on_axis {
        return Ok(SpectrumCharacterization {
            on_axis,
            axis_re: qp.chain_abscissa(),
            theta,
            xi,
            omegas: Vec::new(),
        });
    }
    let p = xi * (theta + 1.0) / (2.0 * theta);
    let mut omegas = Vec::with_capacity(n_branches);
    for k in 1..=n_branches {
        omegas.push(solve_branch(p, true, k)?);
    }
    Ok(SpectrumCharacterization {
        on_axis,
        axis_re: Some(roots.s2 + ln_theta / tau),
        theta,
        xi,
        omegas,
    })
}

/// Remaining spectrum when exactly two real roots are assigned (regions
/// R4/R5 only; a coexisting third real root belongs to the three-root
/// characterization). Handles the retarded limit α = 0 (no chain) and the
/// boundary α = −e^{τs₁} (roots exactly s₁ + 2πik/τ); otherwise tests
/// ln(−θ) = ξ(θ−1)/(2θ) and solves (θ+1)/(2θ)·cot(ω/2) = −ω/ξ per branch.
pub fn remaining_spectrum_two(
    pair: &RootPair,
    a: f64,
    tau: f64,
    n_branches: usize,
) -> Result<SpectrumCharacterization> {
    if n_branches < 1 {
        return Err(Error::InvalidInput("n_branches must be at least 1".into()));
    }
    // An R3 label tied to the φ₃ threshold is the retarded locus α = 0:
    // its "third root" sits at −∞, so the two-root description applies.
    let label = classify_two_root(pair, a, tau)?;
    if matches!(label.region, Region::R1 | Region::R2 | Region::R3)
        && label.boundary_with != Some(Region::R4)
    {
        return Err(Error::ThirdRealRootPresent);
    }
    let qp = assign_two_exact(pair, a, tau)?;
    let (s1, s2) = (pair.s1, pair.s2);
    let e1t = (tau * s1).exp();
    let theta = qp.alpha * (-tau * s2).exp();
    let f1v = quasipoly::f1(tau, s1, s2);
    // Noise floor of the α formula: below it α is numerically zero.
    let alpha_noise =
        ((a + s1).abs() * e1t + (a + s2).abs() * (tau * s2).exp()) / (s1 - s2);
    if qp.alpha.abs() <= 1e-13 * (alpha_noise + f64::MIN_POSITIVE) {
        // Retarded configuration: no neutral chain, no nonreal spectrum
        // near the axis.
        return Ok(SpectrumCharacterization {
            on_axis: false,
            axis_re: None,
            theta: 0.0,
            xi: e1t / f1v,
            omegas: Vec::new(),
        });
    }
    if (qp.alpha + e1t).abs() <= 1e-12 * e1t {
        // Boundary of dominance: the remaining roots are exactly
        // s₁ + 2πik/τ.
        let omegas = (1..=n_branches).map(|k| 2.0 * PI * k as f64).collect();
        return Ok(SpectrumCharacterization {
            on_axis: true,
            axis_re: Some(s1),
            theta,
            xi: 0.0,
            omegas,
        });
    }
    let xi = (qp.alpha + e1t) / f1v;
    let ln_mtheta = (-theta).ln();
    let on_axis =
        (ln_mtheta - xi * (theta - 1.0) / (2.0 * theta)).abs() <= 1e-10 * (1.0 + ln_mtheta.abs());
    if !on_axis {
        return Ok(SpectrumCharacterization {
            on_axis,
            axis_re: qp.chain_abscissa(),
            theta,
            xi,
            omegas: Vec::new(),
        });
    }
    let p = xi * (theta + 1.0) / (2.0 * theta);
    let mut omegas = Vec::with_capacity(n_branches);
    for k in 1..=n_branches {
        omegas.push(solve_branch(p, false, k)?);
    }
    Ok(SpectrumCharacterization {
        on_axis,
        axis_re: Some(s2 + ln_mtheta / tau),
        theta,
        xi,
        omegas,
    })
}

/// Adaptive Simpson quadrature with Richardson acceptance.
fn simpson_adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth >= 50 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1)
            + rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 0)
}

/// Constants of the exponential estimate |y(t)| ≤ k·e^{(s₁+ε)t}·‖y₀‖∞ for
/// a quasipolynomial carrying the given assigned roots. k₀ (or k₁) is the
/// Bromwich integral along Re(s) = s₁+ε, split at the height where |Δ|
/// admits a linear lower bound: the finite part is integrated adaptively
/// and the tail contributes exactly 1/π.
pub fn exp_estimate(
    qp: &NeutralQuasiPoly,
    roots: &AssignedRoots,
    epsilon: f64,
) -> Result<ExpEstimate> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let tau = qp.tau;
    let alpha = qp.alpha;
    match roots {
        AssignedRoots::Triple(t) => {
            let s1 = t.s1;
            let margin = 1.0 - alpha * (-tau * s1).exp();
            if margin <= 0.0 {
                return Err(Error::Solver(format!(
                    "estimate needs αe^(−τs₁) < 1, got margin {margin}"
                )));
            }
            let zeta = zeta_three(t, tau);
            let t1 = 4.0 * zeta / margin;
            let c1 = s1 + epsilon;
            let integrand = move |tt: f64| {
                let d = qp.eval_delta(num_complex::Complex64::new(c1, tt)).norm();
                1.0 / (d * (epsilon * epsilon + tt * tt).sqrt())
            };
            let rough = integrand(0.0) * t1.max(1e-300);
            let integral = 2.0 * simpson_adaptive(&integrand, 0.0, t1, 1e-12 * (1.0 + rough));
            let k0 = zeta / PI * integral + 1.0 / PI;
            let denom = 1.0 - alpha * (-tau * (s1 + epsilon)).exp();
            let k = (1.0 + k0) * (1.0 + alpha) / denom;
            Ok(ExpEstimate { epsilon, k, k0, rate: s1 + epsilon, t_cut: t1 })
        }
        AssignedRoots::Pair(p) => {
            let (s1, s2) = (p.s1, p.s2);
            let margin = 1.0 + alpha * (-tau * s1).exp();
            if margin <= 0.0 {
                return Err(Error::Solver(format!(
                    "estimate needs αe^(−τs₁) > −1, got margin {margin}"
                )));
            }
            let kappa = (alpha + (tau * s1).exp()) / (tau * quasipoly::f1(tau, s1, s2));
            let denom = 1.0 + alpha * (-tau * (s1 + epsilon)).exp();
            if kappa.abs() <= 1e-14 * (1.0 + (tau * s1).exp()) {
                // Degenerate boundary κ = 0: the contour term vanishes and
                // the estimate closes without an integral.
                let k = (1.0 + alpha.abs()) / denom;
                return Ok(ExpEstimate { epsilon, k, k0: 0.0, rate: s1 + epsilon, t_cut: 0.0 });
            }
            let t2 = 4.0 * kappa / margin;
            if !(t2 > 0.0) {
                return Err(Error::Solver(format!(
                    "estimate needs a positive truncation height, got {t2}"
                )));
            }
            let c1 = s1 + epsilon;
            let dist = s1 - s2 + epsilon;
            let integrand = move |tt: f64| {
                let d = qp.eval_delta(num_complex::Complex64::new(c1, tt)).norm();
                1.0 / (d * (dist * dist + tt * tt).sqrt())
            };
            let rough = integrand(0.0) * t2.max(1e-300);
            let integral = 2.0 * simpson_adaptive(&integrand, 0.0, t2, 1e-12 * (1.0 + rough));
            let k1 = kappa / PI * integral + 1.0 / PI;
            let k = (1.0 + k1) * (1.0 + alpha.abs()) / denom;
            Ok(ExpEstimate { epsilon, k, k0: k1, rate: s1 + epsilon, t_cut: t2 })
        }
    }
}

/// Certified witness box for two-root dominance beyond the classical
/// sufficient bound: for u = τδ, parameters with τa ∈ [A₁(u), A₂(u)] and
/// τs₁ ∈ [v₁, v₂] keep s₁ dominant while the bound function stays ≥ 1.
/// A₁ is the upper root of the discriminant D₁(·, u), found by bisection
/// between the parabola vertex and A₂.
pub fn icrrid_witness_box(u: f64) -> Result<WitnessBox> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::InvalidInput(format!("u must be positive, got {u}")));
    }
    let w = -(-u).exp_m1();
    let a2 = w * u / (w + u);
    let r = (1.0 + u) * w - u * (-u).exp();
    let a3 = r / (2.0 * w);
    // D₁(A) = 4w²A² + 4w(2(w+u) − r)A + r² − 8w²u, an upward parabola.
    let c2 = 4.0 * w * w;
    let c1 = 4.0 * w * (2.0 * (w + u) - r);
    let c0 = r * r - 8.0 * w * w * u;
    let d1 = |aa: f64| (c2 * aa + c1) * aa + c0;
    let vertex = -c1 / (2.0 * c2);
    if !(d1(vertex) < 0.0 && d1(a2) > 0.0) {
        return Err(Error::Solver(format!(
            "discriminant lacks a sign change below A2 at u = {u}"
        )));
    }
    let (mut lo, mut hi) = (vertex, a2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if d1(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a1 = 0.5 * (lo + hi);
    // Roots in v of N(A₂, u, v) = C_a v² + C_b v + C_c, solved stably and
    // sorted.
    let ca = -2.0 * w;
    let cb = -2.0 * w * a2 + r;
    let cc = (w + u) * a2 - w * u;
    let disc = (cb * cb - 4.0 * ca * cc).max(0.0);
    let qq = -0.5 * (cb + cb.signum() * disc.sqrt());
    let (ra, rb) = (qq / ca, if qq != 0.0 { cc / qq } else { 0.0 });
    let (v1, v2) = if ra <= rb { (ra, rb) } else { (rb, ra) };
    Ok(WitnessBox { a1, a2, a3, v1, v2 })
}
