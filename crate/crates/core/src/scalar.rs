//! Scalar abstraction: every module is generic over the floating-point width.

use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar the library is generic over (`f32` or `f64`).
///
/// `nalgebra::RealField` supplies the elementary functions and the linear
/// algebra bounds; `FromPrimitive`/`ToPrimitive` move literals and error
/// payloads across the generic boundary. Stated accuracies (quadrature
/// tolerances, tail precision of the special functions) are only meaningful
/// at `f64`.
pub trait Real: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy {
    /// Lift an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Widen to `f64` (used for diagnostics and error payloads).
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Lift a count into `Self`.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Base-2 logarithm.
    #[inline]
    fn log2_(self) -> Self {
        self.ln() / Self::ln_2()
    }

    /// `2^self`.
    #[inline]
    fn exp2_(self) -> Self {
        (self * Self::ln_2()).exp()
    }
}

impl Real for f32 {}
impl Real for f64 {}
