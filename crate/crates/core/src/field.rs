//! Evaluator abstraction shared by sampled, exact and transported functions.

use crate::Result;

/// A map `[0,1]^d -> R^m` that can be evaluated pointwise.
///
/// Implementations must be pure: the certifier evaluates them from many
/// threads at once.
pub trait VectorField: Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn dim_in(&self) -> usize {
        (**self).dim_in()
    }
    fn dim_out(&self) -> usize {
        (**self).dim_out()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).eval(x)
    }
}

impl<T: VectorField + ?Sized> VectorField for Box<T> {
    fn dim_in(&self) -> usize {
        (**self).dim_in()
    }
    fn dim_out(&self) -> usize {
        (**self).dim_out()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).eval(x)
    }
}

/// Wraps a closure as a [`VectorField`].
pub struct FnField<F> {
    d: usize,
    m: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    pub fn new(d: usize, m: usize, f: F) -> Self {
        FnField { d, m, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    fn dim_in(&self) -> usize {
        self.d
    }
    fn dim_out(&self) -> usize {
        self.m
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok((self.f)(x))
    }
}

/// Scalar view of a one-dimensional field, `x -> h(x)[0]`.
pub(crate) fn scalar_at<F: VectorField + ?Sized>(f: &F, x: f64) -> Result<f64> {
    Ok(f.eval(&[x])?[0])
}
