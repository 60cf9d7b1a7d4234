//! Small dense tensors over a chart of runtime dimension `n`.
//!
//! These are plain row-major buffers with closure constructors; the index
//! meaning (which slot is which) is documented at each use site.

/// Dense rank-2 tensor (an `n`×`n` matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2 {
    n: usize,
    data: Vec<f64>,
}

/// Dense rank-3 tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

/// Dense rank-4 tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor2 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[i * n + j] = f(i, j);
            }
        }
        t
    }

    /// Builds a symmetric matrix by evaluating `f` only for `i <= j`.
    pub fn from_fn_sym(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                t.data[i * n + j] = v;
                t.data[j * n + i] = v;
            }
        }
        t
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute antisymmetric part `max |a[i][j] - a[j][i]|`.
    pub fn max_asym(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max((self.at(i, j) - self.at(j, i)).abs());
            }
        }
        m
    }
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    t.data[(a * n + b) * n + c] = f(a, b, c);
                }
            }
        }
        t
    }

    /// Builds a tensor symmetric in the last two slots, evaluating `f` only
    /// for `b <= c`.
    pub fn from_fn_sym23(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in b..n {
                    let v = f(a, b, c);
                    t.data[(a * n + b) * n + c] = v;
                    t.data[(a * n + c) * n + b] = v;
                }
            }
        }
        t
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.n + b) * self.n + c] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        t.data[((a * n + b) * n + c) * n + d] = f(a, b, c, d);
                    }
                }
            }
        }
        t
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[((a * self.n + b) * self.n + c) * self.n + d]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        self.data[((a * self.n + b) * self.n + c) * self.n + d] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Sum of `f(a)` for `a` in `0..n`.
#[inline]
pub fn sum(n: usize, mut f: impl FnMut(usize) -> f64) -> f64 {
    let mut acc = 0.0;
    for a in 0..n {
        acc += f(a);
    }
    acc
}

/// Packed index into triangular (`i <= j`) symmetric storage.
#[inline]
pub(crate) fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * n - a * (a + 1) / 2 + b
}

/// Number of independent entries of a symmetric `n`×`n` array.
#[inline]
pub(crate) fn sym_len(n: usize) -> usize {
    n * (n + 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_index_covers_triangle() {
        let n = 4;
        let mut seen = vec![false; sym_len(n)];
        for i in 0..n {
            for j in i..n {
                let k = sym_index(n, i, j);
                assert!(!seen[k], "collision at ({i},{j})");
                seen[k] = true;
                assert_eq!(k, sym_index(n, j, i));
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn from_fn_sym_mirrors() {
        let t = Tensor2::from_fn_sym(3, |i, j| (i * 10 + j) as f64);
        assert_eq!(t.at(2, 1), t.at(1, 2));
        assert_eq!(t.at(0, 2), 2.0);
        assert_eq!(t.at(2, 0), 2.0);
    }
}
