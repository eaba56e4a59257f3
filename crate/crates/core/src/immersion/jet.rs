//! Second-order forward-mode jets.
//!
//! A [`Jet2`] carries a value, its gradient with respect to the n immersion
//! parameters, and the symmetric Hessian.  Arithmetic propagates truncated
//! Taylor data exactly (to roundoff), so second derivatives of parsed
//! immersions need no finite differencing and no symbolic expression swell.
//!
//! Unary functions use the chain rule
//! `(f∘x)'' = f'(x)·x'' + f''(x)·∇x∇xᵀ`; products use the Leibniz rule with
//! the symmetrized outer product of the two gradients.

use nalgebra::{DMatrix, DVector};

use super::expr::EvalScalar;

/// Value, gradient, and Hessian of a scalar quantity in n parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl Jet2 {
    pub fn constant(v: f64, n: usize) -> Jet2 {
        Jet2 {
            v,
            grad: DVector::zeros(n),
            hess: DMatrix::zeros(n, n),
        }
    }

    pub fn variable(v: f64, index: usize, n: usize) -> Jet2 {
        let mut grad = DVector::zeros(n);
        grad[index] = 1.0;
        Jet2 {
            v,
            grad,
            hess: DMatrix::zeros(n, n),
        }
    }

    /// Chain rule for a unary function with derivatives `fp` and `fpp` at
    /// the jet's value.
    fn chain(&self, f: f64, fp: f64, fpp: f64) -> Jet2 {
        let mut hess = &self.hess * fp;
        hess.ger(fpp, &self.grad, &self.grad, 1.0);
        Jet2 {
            v: f,
            grad: &self.grad * fp,
            hess,
        }
    }
}

impl EvalScalar for Jet2 {
    fn constant(value: f64, nvars: usize) -> Self {
        Jet2::constant(value, nvars)
    }

    fn variable(value: f64, index: usize, nvars: usize) -> Self {
        Jet2::variable(value, index, nvars)
    }

    fn value(&self) -> f64 {
        self.v
    }

    fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.grad.iter().all(|x| x.is_finite())
            && self.hess.iter().all(|x| x.is_finite())
    }

    fn neg(&self) -> Self {
        Jet2 {
            v: -self.v,
            grad: -&self.grad,
            hess: -&self.hess,
        }
    }

    fn add(&self, rhs: &Self) -> Self {
        Jet2 {
            v: self.v + rhs.v,
            grad: &self.grad + &rhs.grad,
            hess: &self.hess + &rhs.hess,
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        Jet2 {
            v: self.v - rhs.v,
            grad: &self.grad - &rhs.grad,
            hess: &self.hess - &rhs.hess,
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut hess = &self.hess * rhs.v + &rhs.hess * self.v;
        // Symmetrized cross term ∇a ∇bᵀ + ∇b ∇aᵀ.
        hess.ger(1.0, &self.grad, &rhs.grad, 1.0);
        hess.ger(1.0, &rhs.grad, &self.grad, 1.0);
        Jet2 {
            v: self.v * rhs.v,
            grad: &self.grad * rhs.v + &rhs.grad * self.v,
            hess,
        }
    }

    fn div(&self, rhs: &Self) -> Self {
        // a/b = a · (1/b) with 1/b by the chain rule.
        let inv = rhs.chain(1.0 / rhs.v, -1.0 / (rhs.v * rhs.v), 2.0 / (rhs.v * rhs.v * rhs.v));
        self.mul(&inv)
    }

    fn powi(&self, exp: i32) -> Result<Self, String> {
        let n = self.grad.len();
        if exp == 0 {
            return Ok(Jet2::constant(1.0, n));
        }
        if self.v == 0.0 && exp < 0 {
            return Err("zero raised to a negative exponent".into());
        }
        let k = exp as f64;
        let f = self.v.powi(exp);
        let fp = k * self.v.powi(exp - 1);
        let fpp = k * (k - 1.0) * self.v.powi(exp - 2);
        Ok(self.chain(f, fp, if exp == 1 { 0.0 } else { fpp }))
    }

    fn sin(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    fn cos(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    fn sqrt(&self) -> Result<Self, String> {
        if self.v <= 0.0 {
            return Err(format!(
                "square root of non-positive value {} has no finite derivatives",
                self.v
            ));
        }
        let s = self.v.sqrt();
        Ok(self.chain(s, 0.5 / s, -0.25 / (s * self.v)))
    }
}
