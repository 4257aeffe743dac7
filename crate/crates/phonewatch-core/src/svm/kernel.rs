//! Kernel functions for the classifier: linear, polynomial, RBF, sigmoid.

use crate::error::{Error, Result};

/// Which kernel family to use; carries no parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Linear,
    Polynomial,
    Rbf,
    Sigmoid,
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Polynomial => "polynomial",
            KernelKind::Rbf => "rbf",
            KernelKind::Sigmoid => "sigmoid",
        }
    }

    pub fn parse(s: &str) -> Result<KernelKind> {
        match s {
            "linear" => Ok(KernelKind::Linear),
            "polynomial" | "poly" => Ok(KernelKind::Polynomial),
            "rbf" => Ok(KernelKind::Rbf),
            "sigmoid" => Ok(KernelKind::Sigmoid),
            other => Err(Error::Parse(format!("unknown kernel kind {other:?}"))),
        }
    }
}

/// A kernel family with its parameters.
///
/// The polynomial degree is a real number, not an integer; a negative
/// base raised to a fractional degree has no real value and surfaces as a
/// kernel-domain error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Linear,
    Polynomial { gamma: f64, coef0: f64, degree: f64 },
    Rbf { gamma: f64 },
    Sigmoid { gamma: f64, coef0: f64 },
}

impl KernelSpec {
    pub fn kind(&self) -> KernelKind {
        match self {
            KernelSpec::Linear => KernelKind::Linear,
            KernelSpec::Polynomial { .. } => KernelKind::Polynomial,
            KernelSpec::Rbf { .. } => KernelKind::Rbf,
            KernelSpec::Sigmoid { .. } => KernelKind::Sigmoid,
        }
    }

    /// Checks the parameter constraints (gamma > 0 where the kernel uses it).
    pub fn validate(&self) -> Result<()> {
        let gamma = match *self {
            KernelSpec::Linear => return Ok(()),
            KernelSpec::Polynomial { gamma, .. } => gamma,
            KernelSpec::Rbf { gamma } => gamma,
            KernelSpec::Sigmoid { gamma, .. } => gamma,
        };
        if gamma.is_nan() || gamma <= 0.0 || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "kernel gamma must be positive and finite, got {gamma}"
            )));
        }
        Ok(())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Evaluates the kernel on two equal-dimension vectors.
pub fn kernel_eval(spec: &KernelSpec, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "kernel arguments have different dimensions {} and {}",
            a.len(),
            b.len()
        )));
    }
    let value = match *spec {
        KernelSpec::Linear => dot(a, b),
        KernelSpec::Polynomial {
            gamma,
            coef0,
            degree,
        } => (gamma * dot(a, b) + coef0).powf(degree),
        KernelSpec::Rbf { gamma } => {
            let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            (-gamma * sq).exp()
        }
        KernelSpec::Sigmoid { gamma, coef0 } => (gamma * dot(a, b) + coef0).tanh(),
    };
    if !value.is_finite() {
        return Err(Error::KernelDomain(format!(
            "{} kernel produced non-finite value {value}",
            spec.kind().name()
        )));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_is_dot_product() {
        let k = kernel_eval(&KernelSpec::Linear, &[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(k, 11.0);
    }

    #[test]
    fn rbf_of_identical_points_is_one() {
        let spec = KernelSpec::Rbf { gamma: 2.5 };
        let k = kernel_eval(&spec, &[0.3, -1.0], &[0.3, -1.0]).unwrap();
        assert_eq!(k, 1.0);
    }

    #[test]
    fn polynomial_squares_the_base() {
        let spec = KernelSpec::Polynomial {
            gamma: 1.0,
            coef0: 0.0,
            degree: 2.0,
        };
        let k = kernel_eval(&spec, &[1.0, 1.0], &[1.0, 2.0]).unwrap();
        assert_eq!(k, 9.0);
    }

    #[test]
    fn fractional_degree_of_negative_base_is_domain_error() {
        let spec = KernelSpec::Polynomial {
            gamma: 1.0,
            coef0: 0.0,
            degree: 0.25,
        };
        let err = kernel_eval(&spec, &[1.0, 0.0], &[-1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::KernelDomain(_)));
    }

    #[test]
    fn sigmoid_is_tanh_of_affine_dot() {
        let spec = KernelSpec::Sigmoid {
            gamma: 0.5,
            coef0: 1.0,
        };
        let k = kernel_eval(&spec, &[2.0], &[3.0]).unwrap();
        assert!((k - (0.5f64 * 6.0 + 1.0).tanh()).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(kernel_eval(&KernelSpec::Linear, &[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn gamma_must_be_positive() {
        assert!(KernelSpec::Rbf { gamma: 0.0 }.validate().is_err());
        assert!(KernelSpec::Rbf { gamma: 1.0 }.validate().is_ok());
        assert!(KernelSpec::Linear.validate().is_ok());
    }
}
