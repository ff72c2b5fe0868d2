//! Solving `ρ(f/η) = 1` for the Luxemburg-type norms.
//!
//! The modular `η ↦ ρ(f/η)` is continuous and strictly decreasing, and in
//! `s = log η` its log has slope between `-p₊` and `-p₋`. The solver keeps a
//! bracket `[lo, hi]` with `ρ(lo) > 1 ≥ ρ(hi)` and shrinks it by
//! Illinois-modified false position in `(log η, log ρ)`, which is exact for
//! constant exponents and superlinear otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
/// Stop once `|ρ − 1|` is this small.
pub const MODULAR_TOLERANCE: f64 = 1e-8;
/// ... or once the bracket is this narrow relative to the norm.
pub const BRACKET_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub modular_at_value: f64,
    pub bisection_iterations: usize,
    pub bracket: (f64, f64),
}

impl NormResult {
    pub fn zero() -> Self {
        NormResult {
            value: 0.0,
            modular_at_value: 0.0,
            bisection_iterations: 0,
            bracket: (0.0, 0.0),
        }
    }
}

/// Finds `η` with `modular(η) = 1`, starting from the upper guess `hi`.
pub fn solve_unit_level(modular: impl Fn(f64) -> f64, initial_hi: f64) -> Result<NormResult> {
    let counter = std::cell::Cell::new(0usize);
    let eval = |eta: f64| {
        counter.set(counter.get() + 1);
        modular(eta)
    };

    let mut hi = if initial_hi.is_finite() && initial_hi > 0.0 {
        initial_hi
    } else {
        1.0
    };
    let mut m_hi = eval(hi);
    let evals_now = || counter.get();
    while m_hi > 1.0 {
        if evals_now() >= MAX_ITERATIONS {
            return Err(no_convergence(evals_now(), hi, hi, m_hi));
        }
        hi *= 2.0;
        m_hi = eval(hi);
    }
    let mut lo = hi;
    let mut m_lo = m_hi;
    while m_lo <= 1.0 {
        if (m_lo - 1.0).abs() <= MODULAR_TOLERANCE {
            return Ok(NormResult {
                value: lo,
                modular_at_value: m_lo,
                bisection_iterations: evals_now(),
                bracket: (lo, lo),
            });
        }
        if evals_now() >= MAX_ITERATIONS {
            return Err(no_convergence(evals_now(), lo, hi, m_lo));
        }
        hi = lo;
        m_hi = m_lo;
        lo *= 0.5;
        m_lo = eval(lo);
    }
    if (m_hi - 1.0).abs() <= MODULAR_TOLERANCE {
        return Ok(done(hi, m_hi, evals_now(), lo, hi));
    }

    // φ(s) = log ρ(e^s): φ(s_lo) > 0 ≥ φ(s_hi)
    let (mut s_lo, mut s_hi) = (lo.ln(), hi.ln());
    let (mut phi_lo, mut phi_hi) = (m_lo.ln(), m_hi.ln());
    let mut side = 0i8;
    loop {
        if evals_now() >= MAX_ITERATIONS {
            return Err(no_convergence(evals_now(), s_lo.exp(), s_hi.exp(), m_hi));
        }
        let mut s = if phi_lo.is_finite() && phi_hi.is_finite() && phi_lo != phi_hi {
            s_hi - phi_hi * (s_hi - s_lo) / (phi_hi - phi_lo)
        } else {
            0.5 * (s_lo + s_hi)
        };
        if !(s > s_lo && s < s_hi) {
            s = 0.5 * (s_lo + s_hi);
        }
        let eta = s.exp();
        let m = eval(eta);
        if (m - 1.0).abs() <= MODULAR_TOLERANCE {
            return Ok(done(eta, m, evals_now(), s_lo.exp(), s_hi.exp()));
        }
        let phi = m.ln();
        if m > 1.0 {
            s_lo = s;
            phi_lo = phi;
            if side == -1 {
                phi_hi *= 0.5;
            }
            side = -1;
        } else {
            s_hi = s;
            phi_hi = phi;
            m_hi = m;
            if side == 1 {
                phi_lo *= 0.5;
            }
            side = 1;
        }
        let (lo, hi) = (s_lo.exp(), s_hi.exp());
        if hi - lo <= BRACKET_TOLERANCE * hi {
            return Ok(done(hi, m_hi, evals_now(), lo, hi));
        }
    }
}

fn done(value: f64, modular: f64, iterations: usize, lo: f64, hi: f64) -> NormResult {
    NormResult {
        value,
        modular_at_value: modular,
        bisection_iterations: iterations,
        bracket: (lo, hi),
    }
}

fn no_convergence(iterations: usize, lo: f64, hi: f64, modular: f64) -> Error {
    Error::NoConvergence {
        iterations,
        lo,
        hi,
        modular,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_exponent_is_exact() {
        // ρ(η) = 2/η², unit level at √2
        let r = solve_unit_level(|eta| 2.0 / (eta * eta), 3.0).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-12);
        assert!((r.modular_at_value - 1.0).abs() <= MODULAR_TOLERANCE);
        assert!(r.bisection_iterations < 10);
    }

    #[test]
    fn expands_bracket_upward() {
        let r = solve_unit_level(|eta| (1e6 / eta).powf(1.5), 1.0).unwrap();
        assert!((r.value - 1e6).abs() < 1e-3);
    }

    #[test]
    fn mixed_exponents() {
        let m = |eta: f64| 0.3 * (2.0 / eta).powf(1.2) + 0.7 * (0.5 / eta).powf(4.0);
        let r = solve_unit_level(m, 10.0).unwrap();
        assert!((m(r.value) - 1.0).abs() <= MODULAR_TOLERANCE);
        assert!(r.bracket.0 <= r.value && r.value <= r.bracket.1);
    }

    #[test]
    fn reports_divergence() {
        let r = solve_unit_level(|_| f64::INFINITY, 1.0);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }
}
