//! Schur orthogonality: Abel-summed ball sums of products of matrix coefficients
//! weighted by functions on the compactification, against the two-realization formula.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::boundary::CylinderFn;
use crate::error::{Error, Result};
use crate::freegroup::{Alphabet, Letter, Sphere, Word};
use crate::opalg::{c, vector_of};
use crate::par::Pool;
use crate::reps::{ActCoarse, PrincipalSeries, Realization};
use crate::transfer::{abel_extrapolate, AbelSeries};

/// A function on `Γ ⊔ ∂Γ`: explicit values on finitely many words, and beyond them
/// the boundary function `G∞` of depth `m` read on the first `m` letters.
///
/// Unlisted words shorter than `m` evaluate to `0`, so `1_w` is `1` exactly on the
/// finite and infinite words starting with `w`.
#[derive(Clone, Debug)]
pub struct CompactifiedFn {
    alphabet: Alphabet,
    interior: BTreeMap<Vec<Letter>, Complex64>,
    boundary: CylinderFn,
}

impl CompactifiedFn {
    pub fn from_boundary(boundary: CylinderFn) -> Self {
        Self { alphabet: *boundary.alphabet(), interior: BTreeMap::new(), boundary }
    }

    pub fn one(alphabet: Alphabet) -> Self {
        Self::from_boundary(CylinderFn::one(alphabet))
    }

    /// `1_{Γ(w) ⊔ ∂Γ(w)}`.
    pub fn indicator(alphabet: Alphabet, w: &Word) -> Self {
        Self::from_boundary(CylinderFn::indicator(alphabet, w))
    }

    /// Finitely supported function.
    pub fn finite(alphabet: Alphabet, values: impl IntoIterator<Item = (Word, Complex64)>) -> Self {
        let interior = values.into_iter().map(|(w, z)| (w.letters().to_vec(), z)).collect();
        Self { alphabet, interior, boundary: CylinderFn::zero(alphabet, 0) }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn boundary(&self) -> &CylinderFn {
        &self.boundary
    }

    /// Longest listed word, or `None` without listed words.
    fn interior_radius(&self) -> Option<usize> {
        self.interior.keys().map(Vec::len).max()
    }

    /// Radius beyond which values depend only on the first `depth(G∞)` letters.
    pub fn radius(&self) -> usize {
        self.interior_radius().map_or(0, |r| r + 1).max(self.boundary.depth())
    }

    pub fn eval(&self, x: &[Letter]) -> Complex64 {
        if let Some(z) = self.interior.get(x) {
            return *z;
        }
        let m = self.boundary.depth();
        if x.len() >= m {
            self.boundary.eval_prefix(&x[..m])
        } else {
            c(0.0)
        }
    }

    /// `G*(x) = conj(G(x^-1))`.
    pub fn eval_star(&self, x: &[Letter]) -> Complex64 {
        let inverse: Vec<Letter> = x.iter().rev().map(|&l| crate::freegroup::inv(l)).collect();
        self.eval(&inverse).conj()
    }

    pub fn sup_norm(&self) -> f64 {
        self.interior.values().map(|z| z.norm()).fold(self.boundary.max_abs(), f64::max)
    }

    /// Lists every word shorter than `radius` with the value of `f`.
    fn ball_values(alphabet: Alphabet, radius: usize, f: impl Fn(&[Letter]) -> Complex64) -> BTreeMap<Vec<Letter>, Complex64> {
        let mut out = BTreeMap::new();
        for n in 0..radius {
            Sphere::new(alphabet, n, None, None).for_each(|x| {
                out.insert(x.to_vec(), f(x));
            });
        }
        out
    }

    /// `alpha self + beta other`.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Self {
        let boundary = &(&self.boundary * alpha) + &(&other.boundary * beta);
        let radius = self.radius().max(other.radius());
        let f = |x: &[Letter]| self.eval(x) * alpha + other.eval(x) * beta;
        let mut interior = Self::ball_values(self.alphabet, radius, f);
        for key in self.interior.keys().chain(other.interior.keys()) {
            interior.insert(key.clone(), f(key));
        }
        Self { alphabet: self.alphabet, interior, boundary }
    }

    /// `(lambda(z) G)(x) = G(z^-1 x)`.
    pub fn translate(&self, z: &Word) -> Self {
        let boundary = self.boundary.translate(z);
        let radius = (self.boundary.depth() + z.len()).max(self.interior_radius().map_or(0, |r| r + z.len() + 1));
        let zi = z.inverse();
        let interior = Self::ball_values(self.alphabet, radius, |x| {
            let moved = zi.mul(&Word::from_letters(&self.alphabet, x.to_vec()).expect("reduced word"));
            self.eval(moved.letters())
        });
        Self { alphabet: self.alphabet, interior, boundary }
    }
}

/// Four vectors of a Schur sum: `<v1, pi(x) v3> conj(<v2, pi(x) v4>)`.
#[derive(Clone, Copy, Debug)]
pub struct SchurVectors<'a> {
    pub v1: &'a CylinderFn,
    pub v2: &'a CylinderFn,
    pub v3: &'a CylinderFn,
    pub v4: &'a CylinderFn,
}

impl<'a> SchurVectors<'a> {
    /// `v1 = v2 = w`, `v3 = v4 = v`.
    pub fn diagonal(w: &'a CylinderFn, v: &'a CylinderFn) -> Self {
        Self { v1: w, v2: w, v3: v, v4: v }
    }

    fn depth(&self) -> usize {
        [self.v1, self.v2, self.v3, self.v4].iter().map(|v| v.depth()).max().unwrap_or(0)
    }
}

/// Abel-extrapolated left side with its diagnostics.
#[derive(Clone, Debug)]
pub struct SchurLhs {
    pub limit: Complex64,
    pub error: f64,
    pub diverged: bool,
    pub tail_bound: f64,
    pub tail_excess: f64,
    /// Sphere sums `S_n`, with the skipped leading terms set to zero.
    pub terms: Vec<Complex64>,
}

/// Sums and extrapolation parameters for [`schur_lhs`].
#[derive(Clone, Copy, Debug)]
pub struct LhsSetup<'a> {
    pub n_max: usize,
    pub schedule: &'a [f64],
    /// Spheres `|x| < skip` are omitted; this leaves the Abel limit unchanged.
    pub skip: usize,
}

/// `S_n = sum_{|x| = n} G(x) G~*(x) <v1, pi(x) v3> conj(<v2, pi(x) v4>)`.
pub fn schur_sphere_sum(
    rep: &PrincipalSeries,
    g: &CompactifiedFn,
    gt: &CompactifiedFn,
    vs: SchurVectors<'_>,
    n: usize,
    pool: &Pool,
) -> Complex64 {
    let a = *rep.alphabet();
    let c3 = ActCoarse::new(rep, vs.v3);
    let c4 = ActCoarse::new(rep, vs.v4);
    pool.sphere_reduce(
        &Sphere::new(a, n, None, None),
        || c(0.0),
        |acc, x| {
            let weight = g.eval(x) * gt.eval_star(x);
            if weight == c(0.0) {
                return;
            }
            let left = vs.v1.inner(&c3.apply(x, vs.v1.depth()));
            let right = vs.v2.inner(&c4.apply(x, vs.v2.depth()));
            *acc += weight * left * right.conj();
        },
        |x, y| x + y,
    )
}

/// First sphere on which the sums follow the tail model, observed to be one below
/// the deepest of the weights and vectors.
fn onset(g: &CompactifiedFn, gt: &CompactifiedFn, vs: &SchurVectors<'_>) -> usize {
    g.radius().max(gt.radius()).max(vs.depth()).saturating_sub(1)
}

pub fn schur_lhs(
    rep: &PrincipalSeries,
    g: &CompactifiedFn,
    gt: &CompactifiedFn,
    vs: SchurVectors<'_>,
    setup: LhsSetup<'_>,
    pool: &Pool,
) -> Result<SchurLhs> {
    let terms: Vec<Complex64> = (0..=setup.n_max)
        .map(|n| if n < setup.skip { c(0.0) } else { schur_sphere_sum(rep, g, gt, vs, n, pool) })
        .collect();
    let q = rep.alphabet().q() as f64;
    let series = AbelSeries::scalar(&terms)?
        .with_frequency(rep.frequency())
        .with_transients(&[1.0 / q, -1.0 / q], onset(g, gt, &vs).max(setup.skip));
    let ext = abel_extrapolate(&series, setup.schedule)?;
    Ok(SchurLhs {
        limit: ext.limit[0],
        error: ext.error,
        diverged: ext.diverged,
        tail_bound: ext.tail_bound,
        tail_excess: ext.tail_excess,
        terms,
    })
}

/// `<mu(G) v, w>` on a depth block covering `G`, `v` and `w`.
fn mu_form(real: &Realization, g: &CylinderFn, v: &CylinderFn, w: &CylinderFn) -> Result<Complex64> {
    let n = g.depth().max(v.depth()).max(w.depth());
    let vv = vector_of(v, n)?;
    let ww = vector_of(w, n)?;
    Ok((ww.adjoint() * real.mu_block(g, n)? * vv)[(0, 0)])
}

/// `[<mu_+(G) v1, v2> conj(<mu_-(G~) v3, v4>) + <mu_-(G) v1, v2> conj(<mu_+(G~) v3, v4>)] / (F_+, F_-)`
/// with `G`, `G~` restricted to the boundary.
pub fn schur_rhs(
    plus: &Realization,
    minus: &Realization,
    g: &CompactifiedFn,
    gt: &CompactifiedFn,
    vs: SchurVectors<'_>,
    plus_minus: f64,
) -> Result<Complex64> {
    if !(plus_minus.is_finite() && plus_minus > 0.0) {
        return Err(Error::NotConverged(plus_minus));
    }
    let first = mu_form(plus, g.boundary(), vs.v1, vs.v2)? * mu_form(minus, gt.boundary(), vs.v3, vs.v4)?.conj();
    let second = mu_form(minus, g.boundary(), vs.v1, vs.v2)? * mu_form(plus, gt.boundary(), vs.v3, vs.v4)?.conj();
    Ok((first + second) / plus_minus)
}

#[derive(Clone, Debug)]
pub struct SchurComparison {
    pub lhs: SchurLhs,
    pub rhs: Complex64,
    pub rel_err: f64,
}

/// Left and right sides for `v1 = v2 = w`, `v3 = v4 = v`.
#[allow(clippy::too_many_arguments)]
pub fn schur_compare(
    plus: &Realization,
    minus: &Realization,
    plus_minus: f64,
    g: &CompactifiedFn,
    gt: &CompactifiedFn,
    w: &CylinderFn,
    v: &CylinderFn,
    setup: LhsSetup<'_>,
    pool: &Pool,
) -> Result<SchurComparison> {
    let vs = SchurVectors::diagonal(w, v);
    let lhs = schur_lhs(plus.rep(), g, gt, vs, setup, pool)?;
    let rhs = schur_rhs(plus, minus, g, gt, vs, plus_minus)?;
    let rel_err = (lhs.limit - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
    Ok(SchurComparison { lhs, rhs, rel_err })
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

    #[test]
    fn indicator_on_words() {
        let g = CompactifiedFn::indicator(ab(), &w("a"));
        assert_eq!(g.eval(w("ab").letters()), c(1.0));
        assert_eq!(g.eval(w("ba").letters()), c(0.0));
        assert_eq!(g.eval(&[]), c(0.0));
        assert_eq!(g.eval_star(w("bA").letters()), c(1.0));
        assert_eq!(g.eval_star(w("ab").letters()), c(0.0));
    }

    #[test]
    fn complement_keeps_identity() {
        let one = CompactifiedFn::one(ab());
        let g = one.combine(c(1.0), &CompactifiedFn::indicator(ab(), &w("b")), c(-1.0));
        assert_eq!(g.eval(&[]), c(1.0));
        assert_eq!(g.eval(w("b").letters()), c(0.0));
        assert_eq!(g.eval(w("aB").letters()), c(1.0));
        assert_eq!(g.eval(w("bab").letters()), c(0.0));
    }

    #[test]
    fn finite_support_vanishes_far_out() {
        let g = CompactifiedFn::finite(ab(), [(w("ab"), c(2.0)), (Word::identity(), c(1.0))]);
        assert_eq!(g.eval(w("ab").letters()), c(2.0));
        assert_eq!(g.eval(w("aba").letters()), c(0.0));
        assert_eq!(g.eval(w("abab").letters()), c(0.0));
    }

    #[test]
    fn translation_matches_definition() {
        let g = CompactifiedFn::indicator(ab(), &w("a")).combine(c(1.0), &CompactifiedFn::finite(ab(), [(w("B"), c(3.0))]), c(1.0));
        let z = w("bA");
        let t = g.translate(&z);
        for n in 0..6 {
            Sphere::new(ab(), n, None, None).for_each(|x| {
                let moved = z.inverse().mul(&Word::from_letters(&ab(), x.to_vec()).unwrap());
                assert_eq!(t.eval(x), g.eval(moved.letters()), "{x:?}");
            });
        }
    }
}
