use crate::error::{Error, Result};
use crate::mat2::{Vec2, C64, ONE, ZERO};
use serde::Serialize;

/// Boundary data (ψ(0), ψ(1)) and (−ψ′(0), ψ′(1)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryVector {
    pub phi: Vec2,
    pub phi_prime: Vec2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModeKind {
    Oscillatory { k: f64 },
    Evanescent { kappa: f64 },
    Zero,
}

impl ModeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModeKind::Oscillatory { .. } => "oscillatory",
            ModeKind::Evanescent { .. } => "evanescent",
            ModeKind::Zero => "zero",
        }
    }

    pub(crate) fn order(&self) -> u8 {
        match self {
            ModeKind::Evanescent { .. } => 0,
            ModeKind::Zero => 1,
            ModeKind::Oscillatory { .. } => 2,
        }
    }

    pub fn energy(&self) -> f64 {
        match *self {
            ModeKind::Oscillatory { k } => k * k,
            ModeKind::Evanescent { kappa } => -kappa * kappa,
            ModeKind::Zero => 0.0,
        }
    }
}

/// One normalized eigenfunction of −d²/dx².
///
/// ψ = a cos kx + b sin kx, a cosh κx + b sinh κx, or a + b x. Evanescent
/// modes are evaluated from the equivalent form
/// ψ = g e^{κ(x−1)} + d e^{−κx}, which stays accurate when the mode is
/// localized at one end.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub energy: f64,
    pub kind: ModeKind,
    pub coeff_a: C64,
    pub coeff_b: C64,
    /// L² norm of the kernel combination before normalization.
    pub norm: f64,
    growth: C64,
    decay: C64,
}

/// Two functions of a common kind and energy, in the internal representation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Raw {
    kind: ModeKind,
    // (a, b) for trigonometric and polynomial, (g, d) for exponential
    c: [C64; 2],
}

/// ∫₀¹ e^{−2κx} dx = ∫₀¹ e^{2κ(x−1)} dx
fn exp_integral(kappa: f64) -> f64 {
    if kappa < 1e-8 {
        1.0 - kappa
    } else {
        -(-2.0 * kappa).exp_m1() / (2.0 * kappa)
    }
}

/// ∫ cos², ∫ sin², ∫ sin·cos over [0, 1] at wavenumber k.
fn trig_integrals(k: f64) -> (f64, f64, f64) {
    let s2 = (2.0 * k).sin();
    let sk = k.sin();
    let (r, cs) = if k < 1e-4 {
        // sin 2k/(4k) and sin²k/(2k) to second order
        (0.5 - k * k / 3.0, k / 2.0)
    } else {
        (s2 / (4.0 * k), sk * sk / (2.0 * k))
    };
    (0.5 + r, 0.5 - r, cs)
}

impl Raw {
    /// Kernel vector `c` in the basis {cos kx, sin(kx)/k}.
    pub fn oscillatory(k: f64, c: [C64; 2]) -> Raw {
        Raw { kind: ModeKind::Oscillatory { k }, c: [c[0], c[1] / k] }
    }

    /// Kernel vector `c` in the basis {e^{−κx}, e^{κ(x−1)}}.
    pub fn evanescent_exp(kappa: f64, c: [C64; 2]) -> Raw {
        Raw { kind: ModeKind::Evanescent { kappa }, c: [c[1], c[0]] }
    }

    /// Kernel vector `c` in the basis {cosh κx, sinh(κx)/κ}.
    pub fn evanescent_hyperbolic(kappa: f64, c: [C64; 2]) -> Raw {
        let (a, b) = (c[0], c[1] / kappa);
        let g = (a + b) * 0.5 * kappa.exp();
        let d = (a - b) * 0.5;
        Raw { kind: ModeKind::Evanescent { kappa }, c: [g, d] }
    }

    /// Kernel vector in the basis {1, x}.
    pub fn zero(c: [C64; 2]) -> Raw {
        Raw { kind: ModeKind::Zero, c }
    }

    pub fn inner(&self, other: &Raw) -> C64 {
        let (p, q) = (&self.c, &other.c);
        match self.kind {
            ModeKind::Oscillatory { k } => {
                let (icc, iss, ics) = trig_integrals(k);
                p[0].conj() * q[0] * icc + p[1].conj() * q[1] * iss + (p[0].conj() * q[1] + p[1].conj() * q[0]) * ics
            }
            ModeKind::Evanescent { kappa } => {
                let i = exp_integral(kappa);
                let cross = (-kappa).exp();
                (p[0].conj() * q[0] + p[1].conj() * q[1]) * i + (p[0].conj() * q[1] + p[1].conj() * q[0]) * cross
            }
            ModeKind::Zero => {
                p[0].conj() * q[0] + p[1].conj() * q[1] / 3.0 + (p[0].conj() * q[1] + p[1].conj() * q[0]) * 0.5
            }
        }
    }

    fn scaled(&self, s: C64) -> Raw {
        Raw { kind: self.kind, c: [self.c[0] * s, self.c[1] * s] }
    }

    fn sub(&self, other: &Raw, s: C64) -> Raw {
        Raw { kind: self.kind, c: [self.c[0] - other.c[0] * s, self.c[1] - other.c[1] * s] }
    }

    /// Normalizes and fixes the phase so that the larger of the plain
    /// coefficients (a, b) is real and positive.
    pub fn into_mode(self) -> Mode {
        let n = self.inner(&self).re.max(0.0).sqrt();
        let unit = self.scaled(C64::new(1.0 / n, 0.0));
        let (a, b) = unit.plain();
        let lead = if a.norm() >= b.norm() { a } else { b };
        let phase = if lead.norm() > 0.0 { lead.conj() / lead.norm() } else { ONE };
        let unit = unit.scaled(phase);
        let (a, b) = unit.plain();
        let (growth, decay) = match self.kind {
            ModeKind::Evanescent { .. } => (unit.c[0], unit.c[1]),
            _ => (ZERO, ZERO),
        };
        Mode { energy: self.kind.energy(), kind: self.kind, coeff_a: a, coeff_b: b, norm: n, growth, decay }
    }

    fn plain(&self) -> (C64, C64) {
        match self.kind {
            ModeKind::Evanescent { kappa } => {
                let g = self.c[0] * (-kappa).exp();
                (g + self.c[1], g - self.c[1])
            }
            _ => (self.c[0], self.c[1]),
        }
    }
}

/// Orthonormal modes spanning a degenerate pair.
pub(crate) fn orthonormal_pair(first: Raw, second: Raw) -> [Mode; 2] {
    let n1 = first.inner(&first).re.sqrt();
    let e1 = first.scaled(C64::new(1.0 / n1, 0.0));
    let second = second.sub(&e1, e1.inner(&second));
    // one reorthogonalization pass
    let second = second.sub(&e1, e1.inner(&second));
    [first.into_mode(), second.into_mode()]
}

impl Mode {
    fn raw(&self) -> Raw {
        match self.kind {
            ModeKind::Evanescent { .. } => Raw { kind: self.kind, c: [self.growth, self.decay] },
            _ => Raw { kind: self.kind, c: [self.coeff_a, self.coeff_b] },
        }
    }

    /// ψ(x) without the domain check.
    pub fn value(&self, x: f64) -> C64 {
        match self.kind {
            ModeKind::Oscillatory { k } => {
                let (s, c) = (k * x).sin_cos();
                self.coeff_a * c + self.coeff_b * s
            }
            ModeKind::Evanescent { kappa } => self.growth * (kappa * (x - 1.0)).exp() + self.decay * (-kappa * x).exp(),
            ModeKind::Zero => self.coeff_a + self.coeff_b * x,
        }
    }

    /// ψ′(x)
    pub fn derivative(&self, x: f64) -> C64 {
        match self.kind {
            ModeKind::Oscillatory { k } => {
                let (s, c) = (k * x).sin_cos();
                (self.coeff_b * c - self.coeff_a * s) * k
            }
            ModeKind::Evanescent { kappa } => {
                (self.growth * (kappa * (x - 1.0)).exp() - self.decay * (-kappa * x).exp()) * kappa
            }
            ModeKind::Zero => self.coeff_b,
        }
    }

    pub fn boundary_vector(&self) -> BoundaryVector {
        BoundaryVector {
            phi: [self.value(0.0), self.value(1.0)],
            phi_prime: [-self.derivative(0.0), self.derivative(1.0)],
        }
    }

    /// Closed-form ⟨self|other⟩ when both share kind and energy.
    pub fn inner_same_level(&self, other: &Mode) -> Option<C64> {
        (self.kind == other.kind).then(|| self.raw().inner(&other.raw()))
    }

    /// ‖ψ‖² in closed form.
    pub fn norm_sqr(&self) -> f64 {
        let r = self.raw();
        r.inner(&r).re
    }

    /// ‖ψ′‖² in closed form.
    pub fn derivative_norm_sqr(&self) -> f64 {
        let c = self.raw().c;
        match self.kind {
            ModeKind::Oscillatory { k } => {
                let (icc, iss, ics) = trig_integrals(k);
                k * k * (c[0].norm_sqr() * iss + c[1].norm_sqr() * icc - 2.0 * (c[0].conj() * c[1]).re * ics)
            }
            ModeKind::Evanescent { kappa } => {
                let i = exp_integral(kappa);
                kappa
                    * kappa
                    * ((c[0].norm_sqr() + c[1].norm_sqr()) * i - 2.0 * (c[0].conj() * c[1]).re * (-kappa).exp())
            }
            ModeKind::Zero => c[1].norm_sqr(),
        }
    }
}

/// The normalized eigenfunction at x ∈ [0, 1].
pub fn mode_eval(m: &Mode, x: f64) -> Result<C64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(x));
    }
    Ok(m.value(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_ground_state_peak() {
        let m = Raw::oscillatory(PI, [ZERO, C64::new(-3.0, 0.0)]).into_mode();
        assert!((mode_eval(&m, 0.5).unwrap() - C64::new(2f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(mode_eval(&m, 1.5).is_err());
        assert!((m.derivative_norm_sqr() - PI * PI).abs() < 1e-12);
    }

    #[test]
    fn zero_mode_is_one() {
        let m = Raw::zero([C64::new(0.0, 2.0), ZERO]).into_mode();
        for x in [0.0, 0.3, 1.0] {
            assert!((m.value(x) - ONE).norm() < 1e-15);
        }
    }

    #[test]
    fn evanescent_forms_agree() {
        let kappa = 0.7;
        let a = Raw::evanescent_hyperbolic(kappa, [C64::new(1.0, 0.0), C64::new(0.4, 0.0)]).into_mode();
        // same function in the exponential basis: cosh κx + 0.4 sinh(κx)/κ
        let b = 0.4 / kappa;
        let d = (1.0 - b) / 2.0;
        let g = (1.0 + b) / 2.0 * kappa.exp();
        let e = Raw::evanescent_exp(kappa, [C64::new(d, 0.0), C64::new(g, 0.0)]).into_mode();
        for x in [0.0, 0.25, 1.0] {
            assert!((a.value(x) - e.value(x)).norm() < 1e-14);
        }
        assert!((a.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn localized_evanescent_keeps_precision() {
        let kappa = 300.0;
        let m = Raw::evanescent_exp(kappa, [ONE, ZERO]).into_mode();
        assert!((m.value(0.0).norm() - (2.0 * kappa).sqrt()).abs() < 1e-10);
        assert!(m.value(1.0).norm() < 1e-100);
        assert!((m.derivative_norm_sqr() - kappa * kappa).abs() < 1e-8 * kappa * kappa);
    }

    #[test]
    fn closed_form_integrals_match_quadrature() {
        let m = Raw::oscillatory(3.3, [C64::new(0.3, 0.2), C64::new(-1.0, 0.5)]).into_mode();
        let n = 20000;
        let h = 1.0 / n as f64;
        let (mut s, mut d) = (0.0, 0.0);
        for j in 0..n {
            let x = (j as f64 + 0.5) * h;
            s += m.value(x).norm_sqr() * h;
            d += m.derivative(x).norm_sqr() * h;
        }
        assert!((s - 1.0).abs() < 1e-8);
        assert!((d - m.derivative_norm_sqr()).abs() < 1e-6);
    }
}
