//! Saturating nonlinearities with `S(0) = 0` and `S'(0) = 1`.

/// A saturating function together with the derivatives the analysis needs.
pub trait Saturation: Clone + core::fmt::Debug + Send + Sync {
    fn value(&self, x: f64) -> f64;

    /// `S'(x)`.
    fn slope(&self, x: f64) -> f64;

    /// `(S(0), S'(0), S''(0))`.
    fn derivatives_at_zero(&self) -> (f64, f64, f64);
}

/// Shifted hyperbolic tangent `S(x) = (tanh(x − ξ) + tanh ξ) cosh² ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShiftedTanh {
    pub xi: f64,
}

impl ShiftedTanh {
    pub fn new(xi: f64) -> Self {
        ShiftedTanh { xi }
    }

    fn cosh2(&self) -> f64 {
        let c = libm::cosh(self.xi);
        c * c
    }
}

impl Saturation for ShiftedTanh {
    fn value(&self, x: f64) -> f64 {
        saturation(x, self.xi)
    }

    fn slope(&self, x: f64) -> f64 {
        let t = libm::tanh(x - self.xi);
        (1.0 - t * t) * self.cosh2()
    }

    fn derivatives_at_zero(&self) -> (f64, f64, f64) {
        (0.0, 1.0, 2.0 * libm::tanh(self.xi))
    }
}

/// `S(x) = (tanh(x − ξ) − tanh(−ξ)) / sech² ξ`.
pub fn saturation(x: f64, xi: f64) -> f64 {
    let c = libm::cosh(xi);
    (libm::tanh(x - xi) + libm::tanh(xi)) * c * c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn origin_is_fixed() {
        for xi in [0.0, 0.6, 0.7] {
            assert_eq!(saturation(0.0, xi), 0.0);
        }
    }

    #[test]
    fn unit_slope_at_origin() {
        let h = 1e-5;
        let fd = (saturation(h, 0.7) - saturation(-h, 0.7)) / (2.0 * h);
        assert!((fd - 1.0).abs() < 1e-8, "{fd}");
        assert!((ShiftedTanh::new(0.7).slope(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn curvature_at_origin() {
        let s = ShiftedTanh::new(0.7);
        let (_, _, s2) = s.derivatives_at_zero();
        assert!((s2 - 1.208_735_5).abs() < 1e-7, "{s2}");
        let h = 1e-4;
        let fd = (saturation(h, 0.7) - 2.0 * saturation(0.0, 0.7) + saturation(-h, 0.7)) / (h * h);
        assert!((fd - s2).abs() < 1e-6, "{fd} vs {s2}");
        assert_eq!(ShiftedTanh::new(0.0).derivatives_at_zero().2, 0.0);
    }

    #[test]
    fn odd_without_shift() {
        for x in [0.1, 0.5, 2.0] {
            assert_eq!(saturation(-x, 0.0), -saturation(x, 0.0));
        }
    }

    proptest! {
        #[test]
        fn slope_matches_difference(x in -5.0f64..5.0, xi in 0.0f64..1.5) {
            let s = ShiftedTanh::new(xi);
            let h = 1e-6;
            let fd = (s.value(x + h) - s.value(x - h)) / (2.0 * h);
            prop_assert!((fd - s.slope(x)).abs() < 1e-6);
            prop_assert!(s.slope(x) >= 0.0);
        }

        #[test]
        fn bounded(x in -1e6f64..1e6, xi in 0.0f64..1.5) {
            let c = libm::cosh(xi);
            let bound = (1.0 + libm::tanh(xi)) * c * c;
            prop_assert!(saturation(x, xi).abs() <= bound + 1e-12);
        }
    }
}
