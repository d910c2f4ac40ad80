//! Dense real polynomials with a companion-matrix root solver
//! (balanced, then two Newton polish steps).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients in ascending order; always trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub c: Vec<f64>,
}

impl Poly {
    pub fn new(mut c: Vec<f64>) -> Self {
        while c.len() > 1 && c.last() == Some(&0.0) {
            c.pop();
        }
        if c.is_empty() {
            c.push(0.0);
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: vec![0.0] }
    }

    pub fn one() -> Self {
        Poly { c: vec![1.0] }
    }

    pub fn constant(v: f64) -> Self {
        Poly::new(vec![v])
    }

    /// (z - r)
    pub fn linear(r: f64) -> Self {
        Poly { c: vec![-r, 1.0] }
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 0.0
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.c.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.c.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(self.c.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0.0; n];
        for (i, &v) in self.c.iter().enumerate() {
            c[i] += v;
        }
        for (i, &v) in other.c.iter().enumerate() {
            c[i] += v;
        }
        Poly::new(c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, f: f64) -> Poly {
        Poly::new(self.c.iter().map(|&c| c * f).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0.0; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// z^M − v^M
    pub fn power_minus_const(m: u32, v: f64) -> Poly {
        let mut c = vec![0.0; m as usize + 1];
        c[0] = -v.powi(m as i32);
        c[m as usize] = 1.0;
        Poly::new(c)
    }

    /// (z^M − v^M)/(z − v) = z^{M−1} + v z^{M−2} + … + v^{M−1}
    pub fn cyclotomic_like(m: u32, v: f64) -> Poly {
        let mut c = vec![0.0; m as usize];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = v.powi((m as usize - 1 - k) as i32);
        }
        Poly::new(c)
    }

    /// All complex roots: balanced companion-matrix eigenvalues with two
    /// Newton polish steps.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let mut c = self.c.clone();
        while c.len() > 1 && c.last().map_or(false, |&v| v == 0.0) {
            c.pop();
        }
        // null leading coefficients relative to scale are roots "at infinity"
        let scale = c.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        if scale == 0.0 {
            return Err(Error::numeric("zero polynomial has no root set"));
        }
        while c.len() > 1 && c.last().map_or(false, |&v| v.abs() < 1e-14 * scale) {
            c.pop();
        }
        let n = c.len() - 1;
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = c[n];
        let monic: Vec<f64> = c[..n].iter().map(|&v| v / lead).collect();
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -monic[i];
        }
        balance(&mut companion);
        let eig = companion.complex_eigenvalues();
        let dp = self.derivative();
        let mut roots: Vec<Complex64> = eig
            .iter()
            .map(|&z0| {
                let mut z = Complex64::new(z0.re, z0.im);
                for _ in 0..2 {
                    let d = dp.eval(z);
                    if d.norm() > 1e-300 {
                        let step = self.eval(z) / d;
                        if step.norm().is_finite() {
                            z -= step;
                        }
                    }
                }
                z
            })
            .collect();
        roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        Ok(roots)
    }
}

/// Parlett–Reinsch style balancing by powers of two.
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    for _ in 0..32 {
        let mut converged = true;
        for i in 0..n {
            let mut c: f64 = (0..n).filter(|&j| j != i).map(|j| a[(j, i)].abs()).sum();
            let mut r: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = c + r;
            while c < r / radix {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while c >= r * radix {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if (c + r) < 0.95 * s && f != 1.0 {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_factored_polynomial() {
        // (z-1)(z-2)(z-3)(z+0.5)
        let p = Poly::linear(1.0)
            .mul(&Poly::linear(2.0))
            .mul(&Poly::linear(3.0))
            .mul(&Poly::linear(-0.5));
        let roots = p.roots().unwrap();
        let mut re: Vec<f64> = roots.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = [-0.5, 1.0, 2.0, 3.0];
        for (r, w) in re.iter().zip(want) {
            assert!((r - w).abs() < 1e-10);
        }
        assert!(roots.iter().all(|z| z.im.abs() < 1e-10));
    }

    #[test]
    fn complex_pair() {
        // z^2 + 1
        let p = Poly::new(vec![1.0, 0.0, 1.0]);
        let roots = p.roots().unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().any(|z| (z.im - 1.0).abs() < 1e-12));
        assert!(roots.iter().any(|z| (z.im + 1.0).abs() < 1e-12));
    }

    #[test]
    fn near_degenerate_leading_coefficient() {
        // degree drops when the top coefficient vanishes
        let p = Poly::new(vec![-6.0, 11.0, -6.0, 1.0, 0.0]);
        assert_eq!(p.degree(), 3);
        assert_eq!(p.roots().unwrap().len(), 3);
    }
}
