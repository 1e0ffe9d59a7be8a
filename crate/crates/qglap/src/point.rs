use num_complex::Complex64;

/// A spectral point: the parameter `lambda` together with `mu = sqrt(lambda)`
/// on the branch with non-negative imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub mu: Complex64,
}

impl SpectralPoint {
    pub fn new(lambda: Complex64) -> Self {
        let mut mu = lambda.sqrt();
        if mu.im < 0.0 {
            mu = -mu;
        }
        SpectralPoint { lambda, mu }
    }

    pub fn from_real(lambda: f64) -> Self {
        Self::new(Complex64::new(lambda, 0.0))
    }

    pub fn is_real(&self) -> bool {
        self.lambda.im == 0.0
    }

    /// `kappa = sqrt(-lambda)` for real negative `lambda`.
    pub fn kappa(&self) -> Option<f64> {
        if self.is_real() && self.lambda.re < 0.0 {
            Some((-self.lambda.re).sqrt())
        } else {
            None
        }
    }
}
