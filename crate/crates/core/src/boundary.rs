//! Locally constant functions on the boundary of the free group.
//!
//! The boundary carries the isotropic measure `nu(w) = 1 / (2k q^(|w|-1))`,
//! which is uniform across cylinders of equal depth. A [`CylinderFn`] of depth
//! `n` stores one value per cylinder, indexed by lexicographic rank; the
//! children of cylinder `r` at depth `n >= 1` are `r*q .. r*q + q`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::freegroup::{common_prefix_len, inv, Alphabet, Letter, Sphere, Word};

/// Exact measure of the cylinder below `w`.
pub fn cylinder_measure(alphabet: &Alphabet, w: &Word) -> Ratio<u128> {
    depth_measure_exact(alphabet, w.len())
}

pub fn depth_measure_exact(alphabet: &Alphabet, n: usize) -> Ratio<u128> {
    if n == 0 {
        return Ratio::from_integer(1);
    }
    let denom = alphabet.size() as u128 * (alphabet.q() as u128).pow(n as u32 - 1);
    Ratio::new(1, denom)
}

/// Measure of any single depth-`n` cylinder as a float.
pub fn depth_measure(alphabet: &Alphabet, n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        1.0 / (alphabet.size() as f64 * (alphabet.q() as f64).powi(n as i32 - 1))
    }
}

/// A function on the boundary that is constant on every cylinder of depth `depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderFn {
    alphabet: Alphabet,
    depth: usize,
    values: Vec<Complex64>,
}

impl CylinderFn {
    pub fn from_values(alphabet: Alphabet, depth: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != alphabet.sphere_size(depth) {
            return Err(Error::Dimension(format!(
                "depth {depth} needs {} values, got {}",
                alphabet.sphere_size(depth),
                values.len()
            )));
        }
        Ok(Self { alphabet, depth, values })
    }

    pub fn zero(alphabet: Alphabet, depth: usize) -> Self {
        Self { alphabet, depth, values: vec![Complex64::new(0.0, 0.0); alphabet.sphere_size(depth)] }
    }

    pub fn constant(alphabet: Alphabet, c: Complex64) -> Self {
        Self { alphabet, depth: 0, values: vec![c] }
    }

    pub fn one(alphabet: Alphabet) -> Self {
        Self::constant(alphabet, Complex64::new(1.0, 0.0))
    }

    /// Indicator of the cylinder below `w`, at depth `|w|`.
    pub fn indicator(alphabet: Alphabet, w: &Word) -> Self {
        let mut f = Self::zero(alphabet, w.len());
        f.values[alphabet.rank(w.letters())] = Complex64::new(1.0, 0.0);
        f
    }

    /// Builds a function from its coordinates in the orthonormal basis `1_w / sqrt(nu_n)`.
    pub fn from_coords(alphabet: Alphabet, depth: usize, coords: &[Complex64]) -> Result<Self> {
        let s = depth_measure(&alphabet, depth).sqrt().recip();
        Self::from_values(alphabet, depth, coords.iter().map(|c| c * s).collect())
    }

    /// Coordinates in the orthonormal basis `1_w / sqrt(nu_n)`.
    pub fn coords(&self) -> Vec<Complex64> {
        let s = depth_measure(&self.alphabet, self.depth).sqrt();
        self.values.iter().map(|v| v * s).collect()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Value on the cylinder containing every boundary point whose first letters are `w`.
    pub fn eval_prefix(&self, w: &[Letter]) -> Complex64 {
        debug_assert!(w.len() >= self.depth);
        self.values[self.alphabet.rank(&w[..self.depth])]
    }

    /// Ratio between the rank of a depth-`n` cylinder and that of its depth-`m` ancestor.
    fn block(&self, m: usize, n: usize) -> usize {
        debug_assert!(1 <= m && m <= n);
        self.alphabet.q().pow((n - m) as u32)
    }

    /// Same function represented at depth `n >= depth`.
    pub fn promote(&self, n: usize) -> Result<Self> {
        if n < self.depth {
            return Err(Error::Depth { requested: n, have: self.depth });
        }
        if n == self.depth {
            return Ok(self.clone());
        }
        let size = self.alphabet.sphere_size(n);
        let values = if self.depth == 0 {
            vec![self.values[0]; size]
        } else {
            let b = self.block(self.depth, n);
            (0..size).map(|r| self.values[r / b]).collect()
        };
        Ok(Self { alphabet: self.alphabet, depth: n, values })
    }

    /// Conditional expectation onto depth `n <= depth`.
    pub fn coarsen(&self, n: usize) -> Result<Self> {
        if n > self.depth {
            return Err(Error::Depth { requested: n, have: self.depth });
        }
        if n == self.depth {
            return Ok(self.clone());
        }
        let group = if n == 0 { self.values.len() } else { self.block(n, self.depth) };
        let values = self
            .values
            .chunks(group)
            .map(|c| c.iter().sum::<Complex64>() / group as f64)
            .collect();
        Ok(Self { alphabet: self.alphabet, depth: n, values })
    }

    fn lift_pair(&self, other: &Self) -> (Self, Self) {
        let d = self.depth.max(other.depth);
        (self.promote(d).expect("depth"), other.promote(d).expect("depth"))
    }

    /// `<f, g> = sum f conj(g) nu` over a common depth.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let (f, g) = self.lift_pair(other);
        let s: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).sum();
        s * depth_measure(&self.alphabet, f.depth)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * depth_measure(&self.alphabet, self.depth)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * depth_measure(&self.alphabet, self.depth)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    pub fn conj(&self) -> Self {
        Self { values: self.values.iter().map(|v| v.conj()).collect(), ..self.clone() }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let (f, g) = self.lift_pair(other);
        let values = f.values.iter().zip(&g.values).map(|(&a, &b)| op(a, b)).collect();
        Self { alphabet: self.alphabet, depth: f.depth, values }
    }

    /// Pointwise product at the larger of the two depths.
    pub fn pointwise_mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    /// `lambda(x) f`, i.e. `omega -> f(x^-1 omega)`, at depth `depth + |x|`.
    pub fn translate(&self, x: &Word) -> Self {
        let d = self.depth;
        let big = d + x.len();
        let mut values = Vec::with_capacity(self.alphabet.sphere_size(big));
        let mut buf = vec![0 as Letter; d];
        Sphere::new(self.alphabet, big, None, None).for_each(|w| {
            shifted_prefix(x.letters(), w, &mut buf);
            values.push(self.values[self.alphabet.rank(&buf)]);
        });
        Self { alphabet: self.alphabet, depth: big, values }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let (f, g) = self.lift_pair(other);
        f.values.iter().zip(&g.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// Writes the first `out.len()` letters of the reduced word `x^-1 w` into `out`.
///
/// Requires `|w| - |x| >= out.len()` so the prefix is determined by `w`.
pub(crate) fn shifted_prefix(x: &[Letter], w: &[Letter], out: &mut [Letter]) {
    let c = common_prefix_len(x, w);
    let head = x.len() - c;
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = if i < head { inv(x[x.len() - 1 - i]) } else { w[c + i - head] };
    }
}

impl Add for &CylinderFn {
    type Output = CylinderFn;
    fn add(self, rhs: &CylinderFn) -> CylinderFn {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &CylinderFn {
    type Output = CylinderFn;
    fn sub(self, rhs: &CylinderFn) -> CylinderFn {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<Complex64> for &CylinderFn {
    type Output = CylinderFn;
    fn mul(self, rhs: Complex64) -> CylinderFn {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(&ab(), s).unwrap()
    }

    fn ind(s: &str) -> CylinderFn {
        CylinderFn::indicator(ab(), &w(s))
    }

    /// Brute-force measure: split the mass evenly over letters, then over allowed extensions.
    fn measure_oracle(word: &Word) -> Ratio<u128> {
        let a = ab();
        let mut m = Ratio::from_integer(1u128);
        for (i, _) in word.letters().iter().enumerate() {
            let allowed = if i == 0 { a.size() } else { a.size() - 1 };
            m /= allowed as u128;
        }
        m
    }

    #[test]
    fn measure_examples() {
        let a = ab();
        assert_eq!(cylinder_measure(&a, &Word::identity()), Ratio::from_integer(1));
        assert_eq!(cylinder_measure(&a, &w("a")), Ratio::new(1, 4));
        assert_eq!(cylinder_measure(&a, &w("ab")), Ratio::new(1, 12));
        assert_eq!(cylinder_measure(&a, &w("abAB")), measure_oracle(&w("abAB")));
    }

    #[test]
    fn measure_is_additive_to_depth_six() {
        let a = ab();
        for n in 0..6 {
            for parent in Sphere::new(a, n, None, None).words() {
                let children: Ratio<u128> = a
                    .letters()
                    .filter(|&l| parent.last() != Some(inv(l)))
                    .map(|l| cylinder_measure(&a, &parent.mul(&Word::letter(&a, l))))
                    .sum();
                assert_eq!(children, cylinder_measure(&a, &parent));
            }
        }
    }

    #[test]
    fn promote_examples() {
        let one = CylinderFn::one(ab()).promote(1).unwrap();
        assert!(one.values().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        let p = ind("a").promote(2).unwrap();
        let support: Vec<Word> = Sphere::new(ab(), 2, None, None)
            .words()
            .into_iter()
            .zip(p.values())
            .filter(|(_, v)| v.re == 1.0)
            .map(|(x, _)| x)
            .collect();
        assert_eq!(support, vec![w("aa"), w("ab"), w("aB")]);
        assert!(ind("ab").promote(1).is_err());
    }

    #[test]
    fn coarsen_examples() {
        let c = ind("ab").coarsen(1).unwrap();
        let expected = ind("a").scale(Complex64::new(1.0 / 3.0, 0.0));
        assert!(c.max_abs_diff(&expected) < 1e-15);
        assert!(ind("a").coarsen(2).is_err());
    }

    #[test]
    fn inner_examples() {
        let one = CylinderFn::one(ab());
        assert!((one.inner(&one) - 1.0).norm() < 1e-15);
        assert!((ind("a").inner(&ind("a")) - 0.25).norm() < 1e-15);
        assert_eq!(ind("a").inner(&ind("b")), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn translate_examples() {
        assert!(ind("b").translate(&w("a")).max_abs_diff(&ind("ab")) < 1e-15);
        let expected = &CylinderFn::one(ab()) - &ind("A");
        let got = ind("a").translate(&w("A"));
        assert_eq!(got.depth(), 2);
        assert!(got.max_abs_diff(&expected) < 1e-15);
        assert_ne!(got.integral(), ind("a").integral());
        assert_eq!(ind("a").translate(&Word::identity()), ind("a"));
    }

    #[test]
    fn pointwise_examples() {
        assert_eq!(ind("a").pointwise_mul(&ind("a")), ind("a"));
        assert_eq!(ind("a").pointwise_mul(&ind("b")).max_abs(), 0.0);
    }

    #[test]
    fn orthonormal_basis_gram() {
        let a = ab();
        let n = 3;
        let basis: Vec<CylinderFn> = (0..a.sphere_size(n))
            .map(|r| {
                let mut c = vec![Complex64::new(0.0, 0.0); a.sphere_size(n)];
                c[r] = Complex64::new(1.0, 0.0);
                CylinderFn::from_coords(a, n, &c).unwrap()
            })
            .collect();
        for (i, f) in basis.iter().enumerate() {
            for (j, g) in basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((f.inner(g) - target).norm() < 1e-12);
            }
        }
    }
}
