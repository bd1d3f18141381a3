use crate::scalar::Real;

/// Numerical thresholds used across the crate.
///
/// Defaults are the documented `f64` values; for lower precision scalars each
/// one is floored at a small multiple of machine epsilon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T: Real> {
    /// Null-spin and traceless predicates, relative to the object's scale.
    pub algebra: T,
    /// Constraint residuals in `validate` and the proportionality check of
    /// `initial_velocity`.
    pub constraint: T,
    /// Minimum pole separation and minimum `Im x_j` accepted in data.
    pub pole_guard: T,
    /// `min Im x_j(t)` below which snapshots warn and integrations abort.
    pub boundary: T,
    /// Eigenvector condition number above which a snapshot is defective.
    pub defective_condition: T,
    /// Largest imaginary residue tolerated in a real field value.
    pub reality: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            algebra: T::tol(1e-10, 1e4),
            constraint: T::tol(1e-10, 1e4),
            pole_guard: T::tol(1e-8, 1e2),
            boundary: T::tol(1e-6, 1e2),
            defective_condition: T::lit(1e10).min(T::one() / (T::epsilon() * T::lit(1e3))),
            reality: T::tol(1e-8, 1e4),
        }
    }
}

impl<T: Real> Tolerances<T> {
    /// Same thresholds with the algebra and constraint tolerances replaced.
    pub fn with_tol(mut self, tol: T) -> Self {
        self.algebra = tol;
        self.constraint = tol;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_defaults() {
        let t = Tolerances::<f64>::default();
        assert_eq!(t.algebra, 1e-10);
        assert_eq!(t.pole_guard, 1e-8);
        assert_eq!(t.boundary, 1e-6);
        assert_eq!(t.defective_condition, 1e10);
        assert_eq!(t.reality, 1e-8);
    }

    #[test]
    fn f32_defaults_are_floored() {
        let t = Tolerances::<f32>::default();
        assert!(t.algebra > 1e-4 && t.algebra < 1e-2);
        assert!(t.defective_condition < 1e5);
    }
}
