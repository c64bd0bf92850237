//! Polynomial vorticity function γ(s) on the stream-function range s ∈ [0, -p0].

use serde::{Deserialize, Serialize};

use crate::error::{Result, WaveError};

/// Number of equispaced samples used for the sign flags.
pub const SIGN_SAMPLES: usize = 4097;

/// Sign information for a function sampled on [0, -p0].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSign {
    pub min: f64,
    pub max: f64,
    /// The polynomial is identically zero (all coefficients vanish).
    pub identically_zero: bool,
}

impl RangeSign {
    pub fn nonpositive(&self) -> bool {
        self.identically_zero || self.max <= 0.0
    }

    pub fn nonnegative(&self) -> bool {
        self.identically_zero || self.min >= 0.0
    }

    pub fn negative(&self) -> bool {
        !self.identically_zero && self.max < 0.0
    }
}

/// γ(s) = Σ cᵢ sⁱ with s = -p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VorticitySpec {
    coefficients: Vec<f64>,
    s_max: f64,
    value_sign: RangeSign,
    derivative_sign: RangeSign,
    second_derivative_sign: RangeSign,
}

fn horner(coefficients: &[f64], s: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

fn derivative_coefficients(coefficients: &[f64]) -> Vec<f64> {
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

fn sample_sign(coefficients: &[f64], s_max: f64) -> RangeSign {
    let identically_zero = coefficients.iter().all(|&c| c == 0.0);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for k in 0..SIGN_SAMPLES {
        let s = s_max * k as f64 / (SIGN_SAMPLES - 1) as f64;
        let v = horner(coefficients, s);
        min = min.min(v);
        max = max.max(v);
    }
    RangeSign {
        min,
        max,
        identically_zero,
    }
}

impl VorticitySpec {
    /// Builds γ from its coefficients in increasing degree; `p0` is the relative mass flux.
    pub fn new(coefficients: Vec<f64>, p0: f64) -> Result<Self> {
        if !(p0 < 0.0) || !p0.is_finite() {
            return Err(WaveError::InvalidParameter("p0 must be negative".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(WaveError::InvalidParameter(
                "vorticity coefficients must be finite".into(),
            ));
        }
        let s_max = -p0;
        let first = derivative_coefficients(&coefficients);
        let second = derivative_coefficients(&first);
        Ok(Self {
            value_sign: sample_sign(&coefficients, s_max),
            derivative_sign: sample_sign(&first, s_max),
            second_derivative_sign: sample_sign(&second, s_max),
            coefficients,
            s_max,
        })
    }

    pub fn irrotational(p0: f64) -> Result<Self> {
        Self::new(Vec::new(), p0)
    }

    pub fn constant(gamma0: f64, p0: f64) -> Result<Self> {
        Self::new(vec![gamma0], p0)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    fn check(&self, s: f64) -> Result<()> {
        // a relative slack absorbs round-off in s = -p at the end points
        let slack = 1e-12 * self.s_max.max(1.0);
        if s < -slack || s > self.s_max + slack || !s.is_finite() {
            return Err(WaveError::VorticityDomain {
                s,
                s_max: self.s_max,
            });
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        Ok(horner(&self.coefficients, s))
    }

    pub fn eval_derivative(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        Ok(self.derivative_unchecked(s))
    }

    pub fn eval_second_derivative(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        let second = derivative_coefficients(&derivative_coefficients(&self.coefficients));
        Ok(horner(&second, s))
    }

    /// γ(-p) without the range check; callers iterate over grid nodes in [p0, 0].
    pub(crate) fn at_p(&self, p: f64) -> f64 {
        horner(&self.coefficients, -p)
    }

    /// γ'(s) at s = -p, no range check.
    pub(crate) fn derivative_at_p(&self, p: f64) -> f64 {
        self.derivative_unchecked(-p)
    }

    fn derivative_unchecked(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (i, &c)| acc * s + i as f64 * c)
    }

    /// ∫₀ˢ γ(t) dt, exact for the polynomial.
    pub(crate) fn antiderivative(&self, s: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, &c)| acc * s + c / (i + 1) as f64)
            * s
    }

    pub fn is_zero(&self) -> bool {
        self.value_sign.identically_zero
    }

    pub fn is_nonpositive_on_range(&self) -> bool {
        self.value_sign.nonpositive()
    }

    pub fn is_negative_on_range(&self) -> bool {
        self.value_sign.negative()
    }

    pub fn value_sign(&self) -> RangeSign {
        self.value_sign
    }

    pub fn derivative_sign_on_range(&self) -> RangeSign {
        self.derivative_sign
    }

    pub fn second_derivative_sign_on_range(&self) -> RangeSign {
        self.second_derivative_sign
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn evaluation_examples() {
        let zero = VorticitySpec::irrotational(-1.0).unwrap();
        assert_eq!(zero.eval(0.5).unwrap(), 0.0);
        assert!(zero.is_zero());

        let constant = VorticitySpec::constant(-0.3, -1.0).unwrap();
        assert_eq!(constant.eval(0.7).unwrap(), -0.3);
        assert_eq!(constant.eval_derivative(0.7).unwrap(), 0.0);

        let linear = VorticitySpec::new(vec![1.0, -2.0], -1.0).unwrap();
        assert_eq!(linear.eval(0.25).unwrap(), 0.5);
        assert_eq!(linear.eval_derivative(0.25).unwrap(), -2.0);
    }

    #[test]
    fn out_of_range_argument_is_a_domain_error() {
        let spec = VorticitySpec::constant(1.0, -1.0).unwrap();
        assert!(matches!(
            spec.eval(1.5),
            Err(WaveError::VorticityDomain { .. })
        ));
        assert!(spec.eval(-0.1).is_err());
        assert!(spec.eval_derivative(2.0).is_err());
    }

    #[test]
    fn positive_p0_rejected() {
        assert!(VorticitySpec::new(vec![], 0.5).is_err());
    }

    #[test]
    fn antiderivative_matches_closed_form() {
        let spec = VorticitySpec::new(vec![1.0, -2.0, 3.0], -2.0).unwrap();
        let s: f64 = 1.3;
        let exact = s - s * s + s.powi(3);
        assert!((spec.antiderivative(s) - exact).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn sign_flags_agree_with_brute_force(
            coefficients in proptest::collection::vec(-2.0f64..2.0, 0..4),
            depth in 0.2f64..3.0,
        ) {
            let spec = VorticitySpec::new(coefficients.clone(), -depth).unwrap();
            let n = 10_000;
            let mut max = f64::NEG_INFINITY;
            let mut min = f64::INFINITY;
            for k in 0..=n {
                let s = depth * k as f64 / n as f64;
                let v: f64 = coefficients.iter().enumerate().map(|(i, c)| c * s.powi(i as i32)).sum();
                max = max.max(v);
                min = min.min(v);
            }
            // sampled bounds converge to the brute-force extremes
            let scale = 1.0 + coefficients.iter().map(|c| c.abs()).sum::<f64>() * 9.0;
            prop_assert!((spec.value_sign().max - max).abs() < 1e-5 * scale);
            prop_assert!((spec.value_sign().min - min).abs() < 1e-5 * scale);
            if max < -1e-4 * scale {
                prop_assert!(spec.is_negative_on_range());
            }
            if max > 1e-4 * scale {
                prop_assert!(!spec.is_nonpositive_on_range());
            }
        }
    }
}
