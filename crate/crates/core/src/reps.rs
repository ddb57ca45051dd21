//! Principal series of the free group on its boundary and the two boundary
//! realizations built from it.
//!
//! `pi_z(x) f (omega) = P(x, omega)^z f(x^-1 omega)` with `P(x, omega) = q^(2 c - |x|)`,
//! where `c` is the common prefix length of `x` and `omega`, and `z = 1/2 + i t`.

use std::sync::Arc;

use nalgebra::SVD;
use num_complex::Complex64;

use crate::boundary::{depth_measure, shifted_prefix, CylinderFn};
use crate::error::{Error, Result};
use crate::freegroup::{common_prefix_len, inv, Alphabet, Letter, Sphere, Word};
use crate::opalg::{
    c, dim, function_of, max_abs, new_layer_basis, promotion_matrix, vector_of, BlockOperator, EffTuple, GradedMap, Mat,
};

/// Unitary principal series representation with parameter `z = 1/2 + i t`.
#[derive(Clone, Debug)]
pub struct PrincipalSeries {
    alphabet: Alphabet,
    t: f64,
}

impl PrincipalSeries {
    pub fn new(alphabet: Alphabet, t: f64) -> Self {
        Self { alphabet, t }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(0.5, self.t)
    }

    fn q(&self) -> f64 {
        self.alphabet.q() as f64
    }

    /// The representation with parameter `1 - z`.
    pub fn dual(&self) -> Self {
        Self { alphabet: self.alphabet, t: -self.t }
    }

    /// Angular frequency `2 t ln q` of the oscillation in matrix coefficients along spheres.
    pub fn frequency(&self) -> f64 {
        2.0 * self.t * self.q().ln()
    }

    /// True when `q^(2it) = 1`, where the two boundary models coincide.
    pub fn is_endpoint(&self) -> bool {
        let phase = self.frequency().rem_euclid(2.0 * std::f64::consts::PI);
        phase < 1e-9 || 2.0 * std::f64::consts::PI - phase < 1e-9
    }

    /// `q^(z j)` for an integer exponent `j`.
    pub fn kernel_power(&self, j: i64) -> Complex64 {
        let lq = self.q().ln();
        Complex64::from_polar((0.5 * j as f64 * lq).exp(), self.t * j as f64 * lq)
    }

    fn kernel_table(&self, n: usize) -> Vec<Complex64> {
        (-(n as i64)..=n as i64).map(|j| self.kernel_power(j)).collect()
    }

    /// `P(x, w) = q^(2 c(x, w) - |x|)`, constant on the cylinder of `w` when `|w| >= |x|`.
    pub fn poisson(&self, x: &Word, w: &Word) -> Result<f64> {
        if w.len() < x.len() {
            return Err(Error::DepthTooShallow { depth: w.len(), needed: x.len() });
        }
        let c = common_prefix_len(x.letters(), w.letters()) as i32;
        Ok(self.q().powi(2 * c - x.len() as i32))
    }

    /// `pi_z(x) f` at depth `depth(f) + |x|`.
    pub fn act(&self, x: &Word, f: &CylinderFn) -> CylinderFn {
        let n = x.len();
        let d = f.depth();
        let table = self.kernel_table(n);
        let mut values = Vec::with_capacity(self.alphabet.sphere_size(d + n));
        let mut buf = vec![0 as Letter; d];
        Sphere::new(self.alphabet, d + n, None, None).for_each(|w| {
            let cpl = common_prefix_len(x.letters(), w);
            shifted_prefix(x.letters(), w, &mut buf);
            values.push(table[2 * cpl] * f.eval_prefix(&buf));
        });
        CylinderFn::from_values(self.alphabet, d + n, values).expect("sphere size")
    }

    /// Orthogonal projection of `pi_z(x) f` onto `H_m`, computed without forming `pi_z(x) f`.
    ///
    /// Cost is `O(|S_m| (|x| + 2k))` instead of `O(|S_{|x| + depth f}|)`.
    pub fn act_coarse(&self, x: &Word, f: &CylinderFn, m: usize) -> CylinderFn {
        ActCoarse::new(self, f).apply(x.letters(), m)
    }

    /// `<w, pi_z(x) v>`.
    pub fn matrix_coeff(&self, w: &CylinderFn, x: &Word, v: &CylinderFn) -> Complex64 {
        w.inner(&self.act_coarse(x, v, w.depth()))
    }

    /// Matrix of `pi_z(x)` from `H_n` to `H_{n + |x|}` in orthonormal coordinates.
    pub fn action_matrix(&self, x: &Word, n: usize) -> Mat {
        let len = x.len();
        let out = n + len;
        let table = self.kernel_table(len);
        let ratio = (depth_measure(&self.alphabet, out) / depth_measure(&self.alphabet, n)).sqrt();
        let mut m = Mat::zeros(dim(&self.alphabet, out), dim(&self.alphabet, n));
        let mut buf = vec![0 as Letter; n];
        let mut row = 0;
        Sphere::new(self.alphabet, out, None, None).for_each(|w| {
            let cpl = common_prefix_len(x.letters(), w);
            shifted_prefix(x.letters(), w, &mut buf);
            m[(row, self.alphabet.rank(&buf))] = table[2 * cpl] * ratio;
            row += 1;
        });
        m
    }

    pub fn graded(&self, x: Word) -> GroupAction<'_> {
        GroupAction { rep: self, x }
    }
}

/// `pi_z(x)` as a graded map.
pub struct GroupAction<'a> {
    rep: &'a PrincipalSeries,
    x: Word,
}

impl GradedMap for GroupAction<'_> {
    fn alphabet(&self) -> &Alphabet {
        &self.rep.alphabet
    }

    fn displacement(&self) -> usize {
        self.x.len()
    }

    fn apply(&self, f: &CylinderFn) -> CylinderFn {
        self.rep.act(&self.x, f)
    }

    fn matrix(&self, n: usize) -> Mat {
        self.rep.action_matrix(&self.x, n)
    }
}

/// Precomputed data for repeated coarse actions on one vector.
pub struct ActCoarse<'a> {
    rep: &'a PrincipalSeries,
    /// `coarse[j]` is the projection of `f` to depth `j`.
    coarse: Vec<CylinderFn>,
    /// Mean of `f` over boundary points not starting with each letter.
    avoid_mean: Vec<Complex64>,
}

impl<'a> ActCoarse<'a> {
    pub fn new(rep: &'a PrincipalSeries, f: &CylinderFn) -> Self {
        let d = f.depth();
        let coarse: Vec<CylinderFn> = (0..=d).map(|j| f.coarsen(j).expect("depth")).collect();
        let a = rep.alphabet;
        let avoid_mean = a
            .letters()
            .map(|l| {
                if d == 0 {
                    coarse[0].values()[0]
                } else {
                    let s: Complex64 = a.letters().filter(|&b| b != l).map(|b| coarse[1].values()[b as usize]).sum();
                    s / a.q() as f64
                }
            })
            .collect();
        Self { rep, coarse, avoid_mean }
    }

    fn depth(&self) -> usize {
        self.coarse.len() - 1
    }

    /// Mean of `f` over the cylinder of `y`, truncating `y` at the depth of `f`.
    fn mean_on(&self, y: &[Letter]) -> Complex64 {
        let l = y.len().min(self.depth());
        self.coarse[l].eval_prefix(&y[..l])
    }

    pub fn apply(&self, x: &[Letter], m: usize) -> CylinderFn {
        let a = self.rep.alphabet;
        let n = x.len();
        let table = self.rep.kernel_table(n);
        let k = |j: i64| table[(j + n as i64) as usize];
        let mut values = Vec::with_capacity(a.sphere_size(m));
        let mut y: Vec<Letter> = Vec::with_capacity(n + m + 1);
        // The prefix case `u = x[..m]` with `m < n` is the same for every such `u`.
        let deep = (m < n).then(|| self.deep_shell_value(x, m, &k));
        Sphere::new(a, m, None, None).for_each(|u| {
            let j = common_prefix_len(x, u);
            let value = if j < n.min(m) {
                y.clear();
                y.extend(x[j..].iter().rev().map(|&l| inv(l)));
                y.extend_from_slice(&u[j..]);
                k(2 * j as i64 - n as i64) * self.mean_on(&y)
            } else if j == n {
                let rest = &u[n..];
                let mean = if rest.is_empty() && n > 0 { self.avoid_mean[inv(x[n - 1]) as usize] } else { self.mean_on(rest) };
                k(n as i64) * mean
            } else {
                deep.expect("prefix case needs m < n")
            };
            values.push(value);
        });
        CylinderFn::from_values(a, m, values).expect("sphere size")
    }

    /// Mean of `pi_z(x) f` over the cylinder of `x[..m]` when `m < |x|`.
    fn deep_shell_value(&self, x: &[Letter], m: usize, k: &impl Fn(i64) -> Complex64) -> Complex64 {
        let a = self.rep.alphabet;
        let n = x.len();
        let nu = |j: usize| depth_measure(&a, j);
        let mut total = k(n as i64) * nu(n) * self.avoid_mean[inv(x[n - 1]) as usize];
        let mut y: Vec<Letter> = Vec::with_capacity(n + 1);
        for jp in m..n {
            let mut shell = Complex64::new(0.0, 0.0);
            for b in a.letters() {
                if b == x[jp] || (jp >= 1 && b == inv(x[jp - 1])) {
                    continue;
                }
                y.clear();
                y.extend(x[jp..].iter().rev().map(|&l| inv(l)));
                y.push(b);
                shell += self.mean_on(&y);
            }
            total += k(2 * jp as i64 - n as i64) * nu(jp + 1) * shell;
        }
        total / nu(m)
    }
}

/// The radial unitary intertwiner from `pi_z` to `pi_{1-z}`, normalized by `I 1 = 1`.
#[derive(Clone, Debug)]
pub struct Intertwiner {
    op: BlockOperator,
    residuals: Vec<f64>,
    solution_dim: usize,
}

/// Singular values below this fraction of the largest are treated as zero.
const RANK_TOL: f64 = 1e-10;

impl Intertwiner {
    /// Solves `I pi_z(a) = pi_{1-z}(a) I` depth by depth up to depth `max_depth`.
    ///
    /// At depth `n`, `I` is known on `H_{n-1}`; the unknown `X = I|_{W_n}` solves
    /// `X (W* A_a) = A'_a I_{n-1} - E I_{n-1} E* A_a` for every letter `a`, where
    /// `A_a`, `A'_a` are the matrices of `pi_z(a)`, `pi_{1-z}(a)` on `H_{n-1}`.
    pub fn solve(rep: &PrincipalSeries, max_depth: usize) -> Result<Self> {
        if rep.is_endpoint() {
            return Err(Error::Endpoint(rep.t));
        }
        let a = rep.alphabet;
        let dual = rep.dual();
        let mut blocks = vec![Mat::identity(1, 1)];
        let mut residuals = Vec::new();
        let mut solution_dim = 1;
        for n in 1..=max_depth {
            let prev = &blocks[n - 1];
            let e = promotion_matrix(&a, n);
            let w = new_layer_basis(&a, n);
            let known = &e * prev * e.adjoint();
            let letters: Vec<Word> = a.letters().map(|l| Word::letter(&a, l)).collect();
            let cols = letters.len() * prev.ncols();
            let mut bmat = Mat::zeros(w.ncols(), cols);
            let mut rmat = Mat::zeros(e.nrows(), cols);
            for (i, x) in letters.iter().enumerate() {
                let act = rep.action_matrix(x, n - 1);
                let act_dual = dual.action_matrix(x, n - 1);
                let span = i * prev.ncols()..(i + 1) * prev.ncols();
                bmat.columns_mut(span.start, span.len()).copy_from(&(w.adjoint() * &act));
                rmat.columns_mut(span.start, span.len()).copy_from(&(act_dual * prev - &known * &act));
            }
            let svd = SVD::new(bmat.clone(), true, true);
            let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
            let rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOL * smax).count();
            solution_dim += w.ncols() - rank;
            if solution_dim != 1 {
                return Err(Error::NonUniqueIntertwiner(solution_dim));
            }
            let pinv = svd.pseudo_inverse(RANK_TOL * smax).map_err(|e| Error::Dimension(e.to_string()))?;
            let x = &rmat * pinv;
            let residual = max_abs(&(&x * &bmat - &rmat)) / max_abs(&rmat).max(1.0);
            if residual > 1e-8 {
                return Err(Error::InconsistentIntertwiner(residual));
            }
            residuals.push(residual);
            blocks.push(known + x * w.adjoint());
        }
        let op = BlockOperator::new(a, 0, blocks)?;
        Ok(Self { op, residuals, solution_dim })
    }

    pub fn operator(&self) -> &BlockOperator {
        &self.op
    }

    pub fn block(&self, n: usize) -> Result<Mat> {
        self.op.block(n)
    }

    pub fn max_depth(&self) -> usize {
        self.op.max_depth()
    }

    /// Least-squares residual of the intertwining equations at depths `1..=max_depth`.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Dimension of the solution space of the intertwining equations.
    pub fn solution_dim(&self) -> usize {
        self.solution_dim
    }

    /// `max |I_N* I_N - 1|` over the computed depths.
    pub fn unitarity_defect(&self) -> f64 {
        self.op
            .blocks()
            .map(|(_, m)| max_abs(&(m.adjoint() * m - Mat::identity(m.nrows(), m.ncols()))))
            .fold(0.0, f64::max)
    }

    /// Eigenvalue of `I` on `W_n = H_n ⊖ H_{n-1}`.
    pub fn layer_scalar(&self, n: usize) -> Result<Complex64> {
        let a = *self.op.alphabet();
        let w = new_layer_basis(&a, n);
        let b = self.op.block(n)?;
        let col = w.column(0);
        Ok((col.adjoint() * &b * col)[(0, 0)])
    }
}

/// Mixture weights `(s, r)` of a map `s mu_+ + r mu_-`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weights {
    pub plus: f64,
    pub minus: f64,
}

/// Boundary realization of the principal series given by its mu-map.
#[derive(Clone, Debug)]
pub struct Realization {
    rep: PrincipalSeries,
    intertwiner: Arc<Intertwiner>,
    weights: Weights,
}

impl Realization {
    /// Multiplication realization `mu_+(G) = M_G`.
    pub fn plus(rep: PrincipalSeries, intertwiner: Arc<Intertwiner>) -> Self {
        Self { rep, intertwiner, weights: Weights { plus: 1.0, minus: 0.0 } }
    }

    /// Realization through the intertwiner, `mu_-(G) = I* M_G I`.
    pub fn minus(rep: PrincipalSeries, intertwiner: Arc<Intertwiner>) -> Self {
        Self { rep, intertwiner, weights: Weights { plus: 0.0, minus: 1.0 } }
    }

    /// `(mu_+ + mu_-) / 2`; both inputs must be perfect.
    pub fn combined(plus: &Self, minus: &Self) -> Result<Self> {
        for r in [plus, minus] {
            if !r.is_perfect() {
                return Err(Error::Dimension("combined realization needs perfect inputs".into()));
            }
        }
        Ok(Self::mixture(plus.rep.clone(), plus.intertwiner.clone(), Weights { plus: 0.5, minus: 0.5 }))
    }

    /// `s mu_+ + r mu_-`; a boundary realization only when `s + r = 1`.
    pub fn mixture(rep: PrincipalSeries, intertwiner: Arc<Intertwiner>, weights: Weights) -> Self {
        Self { rep, intertwiner, weights }
    }

    /// Builds the representation, its intertwiner to `depth`, and both perfect realizations.
    pub fn pair(alphabet: Alphabet, t: f64, depth: usize) -> Result<(Self, Self)> {
        let rep = PrincipalSeries::new(alphabet, t);
        let intw = Arc::new(Intertwiner::solve(&rep, depth)?);
        Ok((Self::plus(rep.clone(), intw.clone()), Self::minus(rep, intw)))
    }

    pub fn rep(&self) -> &PrincipalSeries {
        &self.rep
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.rep.alphabet
    }

    pub fn intertwiner(&self) -> &Arc<Intertwiner> {
        &self.intertwiner
    }

    pub fn weights(&self) -> Weights {
        self.weights
    }

    pub fn label(&self) -> String {
        match (self.weights.plus, self.weights.minus) {
            (p, m) if p == 1.0 && m == 0.0 => "+".into(),
            (p, m) if p == 0.0 && m == 1.0 => "-".into(),
            (p, m) => format!("{p}(+) + {m}(-)"),
        }
    }

    /// A single unmixed realization is perfect.
    pub fn is_perfect(&self) -> bool {
        self.weights.plus * self.weights.minus == 0.0 && self.weights.plus + self.weights.minus == 1.0
    }

    pub fn max_depth(&self) -> usize {
        self.intertwiner.max_depth()
    }

    /// Compression of `mu(G)` to `H_n`, exact as a block when `n >= depth(G)`.
    pub fn mu_block(&self, g: &CylinderFn, n: usize) -> Result<Mat> {
        if n < g.depth() {
            return self.mu(g)?.block(n);
        }
        let diag = Mat::from_diagonal(&nalgebra::DVector::from_vec(g.promote(n)?.values().to_vec()));
        let Weights { plus, minus } = self.weights;
        let mut out = Mat::zeros(diag.nrows(), diag.ncols());
        if plus != 0.0 {
            out += &diag * c(plus);
        }
        if minus != 0.0 {
            let i = self.intertwiner.block(n)?;
            out += i.adjoint() * diag * i * c(minus);
        }
        Ok(out)
    }

    /// `mu(G) f` at depth `max(depth(G), depth(f))` without forming the block.
    pub fn mu_apply(&self, g: &CylinderFn, f: &CylinderFn) -> Result<CylinderFn> {
        let n = g.depth().max(f.depth());
        let diag = nalgebra::DVector::from_vec(g.promote(n)?.values().to_vec());
        let x = vector_of(f, n)?;
        let Weights { plus, minus } = self.weights;
        let mut out = x.component_mul(&diag) * c(plus);
        if minus != 0.0 {
            let i = self.intertwiner.block(n)?;
            out += i.adjoint() * (&i * x).component_mul(&diag) * c(minus);
        }
        Ok(function_of(*self.alphabet(), n, &out))
    }

    /// `mu(G)` as a block operator on depths `depth(G)..=max_depth`.
    pub fn mu(&self, g: &CylinderFn) -> Result<BlockOperator> {
        let top = self.max_depth();
        if g.depth() > top {
            return Err(Error::DepthUnavailable("mu", g.depth()));
        }
        let blocks = (g.depth()..=top).map(|n| self.mu_block(g, n)).collect::<Result<Vec<_>>>()?;
        Ok(BlockOperator::new_unchecked(*self.alphabet(), g.depth(), blocks))
    }

    /// The Eff-vector `F_a = mu(1_a)`.
    pub fn eff(&self) -> Result<EffTuple> {
        let a = *self.alphabet();
        let comps = a
            .letters()
            .map(|l| self.mu(&CylinderFn::indicator(a, &Word::letter(&a, l))))
            .collect::<Result<Vec<_>>>()?;
        Ok(EffTuple::new(comps))
    }
}

/// Letter indicators `1_a` in alphabet order.
pub fn letter_indicators(alphabet: Alphabet) -> Vec<CylinderFn> {
    alphabet.letters().map(|l| CylinderFn::indicator(alphabet, &Word::letter(&alphabet, l))).collect()
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

    fn sample_fn(depth: usize, seed: u64) -> CylinderFn {
        let n = ab().sphere_size(depth);
        let values = (0..n)
            .map(|i| {
                let x = (i as u64 * 2654435761 + seed * 97) % 1000;
                Complex64::new(x as f64 / 500.0 - 1.0, ((x * 7) % 1000) as f64 / 500.0 - 1.0)
            })
            .collect();
        CylinderFn::from_values(ab(), depth, values).unwrap()
    }

    #[test]
    fn poisson_examples() {
        let rep = PrincipalSeries::new(ab(), 0.3);
        assert_eq!(rep.poisson(&Word::identity(), &w("ab")).unwrap(), 1.0);
        assert!((rep.poisson(&w("a"), &w("ab")).unwrap() - 3.0).abs() < 1e-15);
        assert!((rep.poisson(&w("a"), &w("ba")).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(rep.poisson(&w("ab"), &w("a")), Err(Error::DepthTooShallow { .. })));
    }

    #[test]
    fn matrix_coeff_at_half() {
        let rep = PrincipalSeries::new(ab(), 0.0);
        let one = CylinderFn::one(ab());
        assert!((rep.matrix_coeff(&one, &Word::identity(), &one) - 1.0).norm() < 1e-15);
        let v = rep.matrix_coeff(&one, &w("B"), &one);
        assert!((v - 3f64.sqrt() / 2.0).norm() < 1e-12);
    }

    #[test]
    fn coarse_action_matches_full_action() {
        let rep = PrincipalSeries::new(ab(), 0.3);
        for (xs, d) in [("", 2), ("a", 0), ("a", 2), ("abA", 1), ("aBBa", 2), ("abab", 3), ("BaaB", 1)] {
            let x = w(xs);
            let f = sample_fn(d, xs.len() as u64 + d as u64);
            let full = rep.act(&x, &f);
            for m in 0..=full.depth() + 1 {
                let expected = if m <= full.depth() { full.coarsen(m).unwrap() } else { full.promote(m).unwrap() };
                let got = rep.act_coarse(&x, &f, m);
                assert!(got.max_abs_diff(&expected) < 1e-12, "x={xs} d={d} m={m}");
            }
        }
    }

    #[test]
    fn action_matrix_matches_graded_default() {
        struct Plain<'a>(&'a PrincipalSeries, Word);
        impl GradedMap for Plain<'_> {
            fn alphabet(&self) -> &Alphabet {
                self.0.alphabet()
            }
            fn displacement(&self) -> usize {
                self.1.len()
            }
            fn apply(&self, f: &CylinderFn) -> CylinderFn {
                self.0.act(&self.1, f)
            }
        }
        let rep = PrincipalSeries::new(ab(), 0.3);
        let x = w("aB");
        let fast = rep.graded(x.clone()).matrix(2);
        let slow = Plain(&rep, x).matrix(2);
        assert!(max_abs(&(fast - slow)) < 1e-14);
    }

    #[test]
    fn endpoint_is_rejected() {
        let rep = PrincipalSeries::new(ab(), 0.0);
        assert!(matches!(Intertwiner::solve(&rep, 2), Err(Error::Endpoint(_))));
        let t = std::f64::consts::PI / 3f64.ln();
        assert!(PrincipalSeries::new(ab(), t).is_endpoint());
    }

    #[test]
    fn first_layer_scalar_closed_form() {
        let rep = PrincipalSeries::new(ab(), 0.3);
        let intw = Intertwiner::solve(&rep, 2).unwrap();
        let z = rep.z();
        let q = Complex64::new(3.0, 0.0);
        let expected = (q.powc(1.0 - z) - q.powc(z - 1.0)) / (q.powc(z) - q.powc(-z));
        assert!((intw.layer_scalar(1).unwrap() - expected).norm() < 1e-12);
    }
}
