//! Forward-mode jets: values with exact first (and second) derivatives.
//!
//! `Jet1` carries a value and its gradient, `Jet2` additionally the Hessian.
//! Arithmetic propagates derivatives by the chain rule; Hessians are built
//! entry-by-entry for `i <= j` and mirrored, so symmetry holds to exact bit
//! equality.

/// Value plus gradient of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub grad: Vec<f64>,
}

/// Value, gradient, and symmetric Hessian.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    hess: Vec<f64>, // n*n, row-major, symmetric by construction
}

fn sym2(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = f(i, j);
            h[i * n + j] = v;
            h[j * n + i] = v;
        }
    }
    h
}

impl Jet1 {
    pub fn constant(c: f64, n: usize) -> Self {
        Self {
            value: c,
            grad: vec![0.0; n],
        }
    }

    pub fn variable(value: f64, index: usize, n: usize) -> Self {
        let mut grad = vec![0.0; n];
        grad[index] = 1.0;
        Self { value, grad }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.grad.len()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            value: self.value + o.value,
            grad: (0..self.n()).map(|i| self.grad[i] + o.grad[i]).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            value: self.value - o.value,
            grad: (0..self.n()).map(|i| self.grad[i] - o.grad[i]).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            value: self.value * o.value,
            grad: (0..self.n())
                .map(|i| self.grad[i] * o.value + self.value * o.grad[i])
                .collect(),
        }
    }

    /// Quotient; the caller is responsible for rejecting a zero denominator.
    pub fn div(&self, o: &Self) -> Self {
        let q = self.value / o.value;
        Self {
            value: q,
            grad: (0..self.n())
                .map(|i| (self.grad[i] - q * o.grad[i]) / o.value)
                .collect(),
        }
    }

    /// Chain rule for a unary function with value `f` and derivative `df`
    /// taken at `self.value`.
    pub fn apply(&self, f: f64, df: f64) -> Self {
        Self {
            value: f,
            grad: self.grad.iter().map(|g| df * g).collect(),
        }
    }

    /// Integer power by repeated multiplication (binary exponentiation).
    pub fn powi(&self, k: i32) -> Self {
        if k == 0 {
            return Self::constant(1.0, self.n());
        }
        let mut e = k.unsigned_abs();
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        let r = acc.expect("nonzero exponent");
        if k < 0 {
            Self::constant(1.0, self.n()).div(&r)
        } else {
            r
        }
    }
}

impl Jet2 {
    pub fn constant(c: f64, n: usize) -> Self {
        Self {
            value: c,
            grad: vec![0.0; n],
            hess: vec![0.0; n * n],
        }
    }

    pub fn variable(value: f64, index: usize, n: usize) -> Self {
        let mut grad = vec![0.0; n];
        grad[index] = 1.0;
        Self {
            value,
            grad,
            hess: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.grad.len()
    }

    /// Hessian entry `∂_i ∂_j`.
    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.n() + j]
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.n();
        Self {
            value: self.value + o.value,
            grad: (0..n).map(|i| self.grad[i] + o.grad[i]).collect(),
            hess: sym2(n, |i, j| self.hess(i, j) + o.hess(i, j)),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.n();
        Self {
            value: self.value - o.value,
            grad: (0..n).map(|i| self.grad[i] - o.grad[i]).collect(),
            hess: sym2(n, |i, j| self.hess(i, j) - o.hess(i, j)),
        }
    }

    pub fn neg(&self) -> Self {
        let n = self.n();
        Self {
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
            hess: sym2(n, |i, j| -self.hess(i, j)),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n();
        Self {
            value: self.value * o.value,
            grad: (0..n)
                .map(|i| self.grad[i] * o.value + self.value * o.grad[i])
                .collect(),
            hess: sym2(n, |i, j| {
                self.hess(i, j) * o.value
                    + self.grad[i] * o.grad[j]
                    + self.grad[j] * o.grad[i]
                    + self.value * o.hess(i, j)
            }),
        }
    }

    /// Quotient; the caller is responsible for rejecting a zero denominator.
    pub fn div(&self, o: &Self) -> Self {
        let n = self.n();
        let q = self.value / o.value;
        let grad: Vec<f64> = (0..n)
            .map(|i| (self.grad[i] - q * o.grad[i]) / o.value)
            .collect();
        let hess = sym2(n, |i, j| {
            (self.hess(i, j) - q * o.hess(i, j) - grad[i] * o.grad[j] - grad[j] * o.grad[i])
                / o.value
        });
        Self {
            value: q,
            grad,
            hess,
        }
    }

    /// Chain rule for a unary function with derivatives `df`, `d2f` taken at
    /// `self.value`.
    pub fn apply(&self, f: f64, df: f64, d2f: f64) -> Self {
        let n = self.n();
        Self {
            value: f,
            grad: self.grad.iter().map(|g| df * g).collect(),
            hess: sym2(n, |i, j| {
                df * self.hess(i, j) + d2f * self.grad[i] * self.grad[j]
            }),
        }
    }

    pub fn powi(&self, k: i32) -> Self {
        if k == 0 {
            return Self::constant(1.0, self.n());
        }
        let mut e = k.unsigned_abs();
        let mut base = self.clone();
        let mut acc: Option<Self> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        let r = acc.expect("nonzero exponent");
        if k < 0 {
            Self::constant(1.0, self.n()).div(&r)
        } else {
            r
        }
    }
}

/// Integer power of a plain float, using the same multiplication order as the
/// jet version so values agree bitwise.
pub(crate) fn powi_f64(base: f64, k: i32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut e = k.unsigned_abs();
    let mut b = base;
    let mut acc: Option<f64> = None;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => b,
                Some(a) => a * b,
            });
        }
        e >>= 1;
        if e > 0 {
            b = b * b;
        }
    }
    let r = acc.expect("nonzero exponent");
    if k < 0 {
        1.0 / r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hessian_is_bitwise_symmetric() {
        let x = Jet2::variable(1.3, 0, 3);
        let y = Jet2::variable(-0.7, 1, 3);
        let z = Jet2::variable(0.4, 2, 3);
        let e = x.mul(&y).add(&z.powi(3)).div(&y.apply(
            (-0.7f64).exp(),
            (-0.7f64).exp(),
            (-0.7f64).exp(),
        ));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(e.hess(i, j).to_bits(), e.hess(j, i).to_bits());
            }
        }
    }

    #[test]
    fn product_rule() {
        let x = Jet1::variable(2.0, 0, 2);
        let y = Jet1::variable(3.0, 1, 2);
        let p = x.mul(&y);
        assert_eq!(p.value, 6.0);
        assert_eq!(p.grad, vec![3.0, 2.0]);
    }

    #[test]
    fn powi_matches_plain_float() {
        for k in [-3, -1, 0, 1, 2, 5, 11] {
            let j = Jet1::variable(1.7, 0, 1).powi(k);
            assert_eq!(j.value.to_bits(), powi_f64(1.7, k).to_bits());
        }
    }
}
