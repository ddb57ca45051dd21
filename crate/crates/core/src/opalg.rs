//! Dense operator layer over the depth filtration `H_0 ⊂ H_1 ⊂ ...`.
//!
//! All matrices are written in the orthonormal cylinder basis `1_w / sqrt(nu_n)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::boundary::CylinderFn;
use crate::error::{Error, Result};
use crate::freegroup::Alphabet;

pub type Mat = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

/// Eigenvalues below `-PSD_TOL` reject a matrix as not positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;
/// Slack allowed by [`dominance`].
pub const DOMINANCE_TOL: f64 = 1e-9;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn dim(alphabet: &Alphabet, n: usize) -> usize {
    alphabet.sphere_size(n)
}

/// Hermitian part `(M + M*) / 2`.
pub fn hermitian_part(m: &Mat) -> Mat {
    (m + m.adjoint()) * c(0.5)
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn eigh(m: &Mat) -> (Vec<f64>, Mat) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Mat::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    (values, vectors)
}

pub fn min_eigenvalue(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn max_eigenvalue(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Square root of a positive semidefinite matrix; eigenvalues in `[-PSD_TOL, 0)` are clamped.
pub fn psd_sqrt(m: &Mat) -> Result<Mat> {
    let (values, u) = eigh(m);
    if let Some(&min) = values.first() {
        if min < -PSD_TOL {
            return Err(Error::NotPsd { min_eig: min });
        }
    }
    let d = Mat::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&l| c(l.max(0.0).sqrt()))));
    Ok(&u * d * u.adjoint())
}

pub fn trace(m: &Mat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `TR(S, T) = tr(sqrt(S) T sqrt(S))` for positive semidefinite `S`, `T`.
pub fn trace_pair(s: &Mat, t: &Mat) -> Result<f64> {
    check_square_pair(s, t)?;
    let min_t = min_eigenvalue(t);
    if min_t < -PSD_TOL {
        return Err(Error::NotPsd { min_eig: min_t });
    }
    let r = psd_sqrt(s)?;
    Ok(trace(&(&r * t * &r)).re)
}

/// `TR(v ⊗ v̄, T) = <T v, v>`.
pub fn trace_pair_rank_one(v: &Vector, t: &Mat) -> f64 {
    (v.adjoint() * t * v)[(0, 0)].re
}

fn check_square_pair(s: &Mat, t: &Mat) -> Result<()> {
    if s.shape() != t.shape() || !s.is_square() {
        return Err(Error::Dimension(format!("{:?} vs {:?}", s.shape(), t.shape())));
    }
    Ok(())
}

/// `(F, G) = sum_{a != b} TR(F_a, G_b)` on matrices of a common depth.
pub fn tuple_pair(f: &[Mat], g: &[Mat]) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::Dimension(format!("tuples of length {} and {}", f.len(), g.len())));
    }
    let Some(first) = g.first() else {
        return Ok(0.0);
    };
    let total_g = g.iter().skip(1).fold(first.clone(), |acc, m| acc + m);
    for m in g {
        let min = min_eigenvalue(m);
        if min < -PSD_TOL {
            return Err(Error::NotPsd { min_eig: min });
        }
    }
    let mut sum = 0.0;
    for (fa, ga) in f.iter().zip(g) {
        check_square_pair(fa, ga)?;
        let r = psd_sqrt(fa)?;
        sum += trace(&(&r * (&total_g - ga) * &r)).re;
    }
    Ok(sum)
}

/// Smallest eigenvalue of `C T - S`.
pub fn dominance_margin(s: &Mat, t: &Mat, constant: f64) -> f64 {
    min_eigenvalue(&(t * c(constant) - s))
}

/// `S <= C T` up to [`DOMINANCE_TOL`].
pub fn dominance(s: &Mat, t: &Mat, constant: f64) -> bool {
    dominance_margin(s, t, constant) >= -DOMINANCE_TOL
}

pub fn hs_norm(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn outer(v: &Vector, w: &Vector) -> Mat {
    v * w.adjoint()
}

/// Isometric inclusion `H_{n-1} -> H_n` in orthonormal coordinates.
pub fn promotion_matrix(alphabet: &Alphabet, n: usize) -> Mat {
    assert!(n >= 1);
    let (rows, cols) = (dim(alphabet, n), dim(alphabet, n - 1));
    let branch = if n == 1 { alphabet.size() } else { alphabet.q() };
    let w = c((branch as f64).sqrt().recip());
    let mut e = Mat::zeros(rows, cols);
    for r in 0..rows {
        e[(r, if n == 1 { 0 } else { r / branch })] = w;
    }
    e
}

/// Isometric inclusion `H_m -> H_n` for `m <= n`.
pub fn inclusion_matrix(alphabet: &Alphabet, m: usize, n: usize) -> Mat {
    let mut e = Mat::identity(dim(alphabet, m), dim(alphabet, m));
    for j in m + 1..=n {
        e = promotion_matrix(alphabet, j) * e;
    }
    e
}

/// Orthonormal basis of `W_n = H_n ⊖ H_{n-1}` built from Helmert contrasts within each sibling group.
pub fn new_layer_basis(alphabet: &Alphabet, n: usize) -> Mat {
    assert!(n >= 1);
    let rows = dim(alphabet, n);
    let branch = if n == 1 { alphabet.size() } else { alphabet.q() };
    let parents = rows / branch;
    let mut w = Mat::zeros(rows, parents * (branch - 1));
    for p in 0..parents {
        for j in 1..branch {
            let col = p * (branch - 1) + j - 1;
            let norm = ((j * (j + 1)) as f64).sqrt();
            for i in 0..j {
                w[(p * branch + i, col)] = c(1.0 / norm);
            }
            w[(p * branch + j, col)] = c(-(j as f64) / norm);
        }
    }
    w
}

pub fn vector_of(f: &CylinderFn, depth: usize) -> Result<Vector> {
    Ok(Vector::from_vec(f.promote(depth)?.coords()))
}

pub fn function_of(alphabet: Alphabet, depth: usize, v: &Vector) -> CylinderFn {
    CylinderFn::from_coords(alphabet, depth, v.as_slice()).expect("coordinate length")
}

/// A linear map sending depth-`n` functions to depth `n + displacement()`.
pub trait GradedMap {
    fn alphabet(&self) -> &Alphabet;

    fn displacement(&self) -> usize;

    fn apply(&self, f: &CylinderFn) -> CylinderFn;

    /// Matrix `H_n -> H_{n + displacement}` in orthonormal coordinates.
    fn matrix(&self, n: usize) -> Mat {
        let a = *self.alphabet();
        let d = dim(&a, n);
        let out = n + self.displacement();
        let mut m = Mat::zeros(dim(&a, out), d);
        for j in 0..d {
            let mut e = Vector::zeros(d);
            e[j] = c(1.0);
            let image = self.apply(&function_of(a, n, &e));
            m.set_column(j, &vector_of(&image, out).expect("graded map output depth"));
        }
        m
    }
}

/// Operator on the filtration given by its compressions `B_N` for `N` in `base..=max_depth`.
///
/// From `base` on the operator maps each `H_N` into itself, so
/// `B_{N+1} E = E B_N` and `E* B_{N+1} (1 - E E*) = 0` for the inclusion `E`.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    alphabet: Alphabet,
    base: usize,
    blocks: Vec<Mat>,
}

/// Relative tolerance for the filtration check at construction.
pub const FILTRATION_TOL: f64 = 1e-8;

impl BlockOperator {
    pub fn new(alphabet: Alphabet, base: usize, blocks: Vec<Mat>) -> Result<Self> {
        let op = Self { alphabet, base, blocks };
        op.check_filtration()?;
        Ok(op)
    }

    /// Builds without the filtration check; callers guarantee consistency.
    pub(crate) fn new_unchecked(alphabet: Alphabet, base: usize, blocks: Vec<Mat>) -> Self {
        Self { alphabet, base, blocks }
    }

    pub fn identity(alphabet: Alphabet, max_depth: usize) -> Self {
        let blocks = (0..=max_depth).map(|n| Mat::identity(dim(&alphabet, n), dim(&alphabet, n))).collect();
        Self { alphabet, base: 0, blocks }
    }

    pub fn zero(alphabet: Alphabet, max_depth: usize) -> Self {
        let blocks = (0..=max_depth).map(|n| Mat::zeros(dim(&alphabet, n), dim(&alphabet, n))).collect();
        Self { alphabet, base: 0, blocks }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Smallest depth from which the compressions are exact blocks.
    pub fn base(&self) -> usize {
        self.base
    }

    pub fn max_depth(&self) -> usize {
        self.base + self.blocks.len() - 1
    }

    /// Compression to `H_n`; below the base it is obtained from the base block.
    pub fn block(&self, n: usize) -> Result<Mat> {
        if n > self.max_depth() {
            return Err(Error::DepthUnavailable("block operator", n));
        }
        if n >= self.base {
            return Ok(self.blocks[n - self.base].clone());
        }
        let e = inclusion_matrix(&self.alphabet, n, self.base);
        Ok(e.adjoint() * &self.blocks[0] * e)
    }

    pub fn block_ref(&self, n: usize) -> Option<&Mat> {
        n.checked_sub(self.base).and_then(|i| self.blocks.get(i))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (usize, &Mat)> {
        self.blocks.iter().enumerate().map(move |(i, m)| (self.base + i, m))
    }

    pub fn check_filtration(&self) -> Result<()> {
        for (i, pair) in self.blocks.windows(2).enumerate() {
            let n = self.base + i + 1;
            let e = promotion_matrix(&self.alphabet, n);
            let scale = max_abs(&pair[1]).max(1.0);
            let d1 = max_abs(&(&pair[1] * &e - &e * &pair[0]));
            let p_perp = Mat::identity(e.nrows(), e.nrows()) - &e * e.adjoint();
            let d2 = max_abs(&(e.adjoint() * &pair[1] * p_perp));
            let defect = d1.max(d2) / scale;
            if defect > FILTRATION_TOL {
                return Err(Error::Filtration { depth: n, defect });
            }
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(usize, &Mat) -> Mat) -> Self {
        let blocks = self.blocks().map(|(n, m)| f(n, m)).collect();
        Self { alphabet: self.alphabet, base: self.base, blocks }
    }

    /// Combines two operators on their common depth range.
    pub fn zip_with(&self, other: &Self, f: impl Fn(&Mat, &Mat) -> Mat) -> Self {
        let base = self.base.max(other.base);
        let top = self.max_depth().min(other.max_depth());
        let blocks = (base..=top)
            .map(|n| f(&self.block(n).expect("depth"), &other.block(n).expect("depth")))
            .collect();
        Self { alphabet: self.alphabet, base, blocks }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|_, m| m * c(s))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn adjoint(&self) -> Self {
        self.map(|_, m| m.adjoint())
    }

    /// Largest entrywise deviation from Hermitian symmetry over all blocks.
    pub fn hermitian_defect(&self) -> f64 {
        self.blocks.iter().map(|m| max_abs(&(m - m.adjoint()))).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over all blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks.iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    pub fn apply(&self, f: &CylinderFn) -> Result<CylinderFn> {
        let n = f.depth().max(self.base);
        let v = vector_of(f, n)?;
        let m = self.block_ref(n).ok_or(Error::DepthUnavailable("block operator", n))?;
        Ok(function_of(self.alphabet, n, &(m * v)))
    }
}

/// A letter-indexed tuple of operators.
#[derive(Clone, Debug)]
pub struct EffTuple {
    components: Vec<BlockOperator>,
}

impl EffTuple {
    pub fn new(components: Vec<BlockOperator>) -> Self {
        Self { components }
    }

    pub fn components(&self) -> &[BlockOperator] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &BlockOperator {
        &self.components[a]
    }

    /// Compressions of every component at depth `n`.
    pub fn blocks(&self, n: usize) -> Result<Vec<Mat>> {
        self.components.iter().map(|f| f.block(n)).collect()
    }

    pub fn max_depth(&self) -> usize {
        self.components.iter().map(BlockOperator::max_depth).min().unwrap_or(0)
    }

    pub fn base(&self) -> usize {
        self.components.iter().map(BlockOperator::base).max().unwrap_or(0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.components.iter().map(|f| f.scale(s)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect())
    }

    /// `(self, other)` truncated at depth `n`.
    pub fn pair(&self, other: &Self, n: usize) -> Result<f64> {
        tuple_pair(&self.blocks(n)?, &other.blocks(n)?)
    }
}

/// `sum_i v_i ⊗ v̄_i`, kept as its list of vectors.
#[derive(Clone, Debug, Default)]
pub struct RankOneSum {
    vectors: Vec<CylinderFn>,
}

impl RankOneSum {
    pub fn new(vectors: Vec<CylinderFn>) -> Self {
        Self { vectors }
    }

    pub fn vectors(&self) -> &[CylinderFn] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Compression to `H_n`: `sum_i P_n v_i ⊗ conj(P_n v_i)`.
    pub fn compress(&self, alphabet: &Alphabet, n: usize) -> Result<Mat> {
        let d = dim(alphabet, n);
        let mut m = Mat::zeros(d, d);
        for v in &self.vectors {
            let p = if v.depth() >= n { v.coarsen(n)? } else { v.promote(n)? };
            let x = Vector::from_vec(p.coords());
            m += &x * x.adjoint();
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> Mat {
        Mat::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&x| c(x))))
    }

    #[test]
    fn sqrt_examples() {
        let id = Mat::identity(3, 3);
        assert!(max_abs(&(psd_sqrt(&id).unwrap() - &id)) < 1e-14);
        assert!(max_abs(&(psd_sqrt(&diag(&[4.0, 9.0])).unwrap() - diag(&[2.0, 3.0]))) < 1e-14);
        assert!(matches!(psd_sqrt(&diag(&[1.0, -1e-3])), Err(Error::NotPsd { .. })));
        assert!(psd_sqrt(&diag(&[1.0, -1e-12])).is_ok());
    }

    #[test]
    fn trace_pair_examples() {
        let a = Alphabet::new(2).unwrap();
        for n in 0..4 {
            let id = Mat::identity(dim(&a, n), dim(&a, n));
            assert!((trace_pair(&id, &id).unwrap() - dim(&a, n) as f64).abs() < 1e-10);
        }
        assert!((hs_norm(&Mat::identity(4, 4)) - 2.0).abs() < 1e-15);
        assert_eq!(hs_norm(&Mat::zeros(3, 3)), 0.0);
    }

    #[test]
    fn dominance_examples() {
        let id = Mat::identity(2, 2);
        assert!(dominance(&id, &id, 1.0));
        assert!(!dominance(&(&id * c(2.0)), &id, 1.0));
    }

    #[test]
    fn promotion_is_isometric_and_layers_are_complementary() {
        let a = Alphabet::new(2).unwrap();
        for n in 1..5 {
            let e = promotion_matrix(&a, n);
            let w = new_layer_basis(&a, n);
            let ide = e.adjoint() * &e;
            assert!(max_abs(&(ide - Mat::identity(e.ncols(), e.ncols()))) < 1e-14);
            let idw = w.adjoint() * &w;
            assert!(max_abs(&(idw - Mat::identity(w.ncols(), w.ncols()))) < 1e-14);
            assert!(max_abs(&(e.adjoint() * &w)) < 1e-14);
            assert_eq!(e.ncols() + w.ncols(), e.nrows());
        }
    }

    #[test]
    fn promotion_matrix_matches_function_promotion() {
        let a = Alphabet::new(2).unwrap();
        let f = CylinderFn::from_values(a, 1, (0..4).map(|i| Complex64::new(i as f64, 1.0)).collect()).unwrap();
        let via_matrix = promotion_matrix(&a, 2) * vector_of(&f, 1).unwrap();
        let direct = vector_of(&f, 2).unwrap();
        assert!((via_matrix - direct).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn rank_one_compression() {
        let a = Alphabet::new(2).unwrap();
        let v = CylinderFn::from_values(a, 2, (0..12).map(|i| Complex64::new(i as f64, -(i as f64))).collect()).unwrap();
        let sum = RankOneSum::new(vec![v.clone()]);
        let m = sum.compress(&a, 1).unwrap();
        let p = vector_of(&v.coarsen(1).unwrap(), 1).unwrap();
        assert!(max_abs(&(m - &p * p.adjoint())) < 1e-12);
    }
}
