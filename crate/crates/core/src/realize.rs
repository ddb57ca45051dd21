//! Realization toolkit: regenerating mu-maps from Eff-vectors, perfectness and
//! equivalence tests, the truncated GNS construction, the oddity block identity,
//! the bad-vector split and the finite-dimensional obstruction.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::boundary::CylinderFn;
use crate::error::{Error, Result};
use crate::freegroup::{inv, Letter, Sphere, Word};
use crate::opalg::{c, dim, eigh, hs_norm, max_abs, tuple_pair, vector_of, BlockOperator, EffTuple, Mat, Vector};
use crate::reps::{PrincipalSeries, Realization};
use crate::transfer::apply_t;

/// Tolerance for `T F = F` and `sum_a F_a = Id`.
pub const REALIZATION_TOL: f64 = 1e-8;

/// Largest entrywise `|(T F)_a - F_a|` over the depths where `T F` is computable.
pub fn fixed_point_defect(rep: &PrincipalSeries, f: &EffTuple) -> Result<f64> {
    let tf = apply_t(rep, f)?;
    let mut worst: f64 = 0.0;
    for n in tf.base()..=tf.max_depth() {
        for (x, y) in tf.blocks(n)?.iter().zip(f.blocks(n)?) {
            worst = worst.max(max_abs(&(x - y)));
        }
    }
    Ok(worst)
}

/// `mu(G) = sum_{|xa| = m} G(xa) pi(x) F_a pi(x)^-1` for `G` of depth `m >= 1`.
///
/// The compression to `H_n` needs `F` at depth `n + m - 1`, so the result covers
/// depths `m..=max_depth(F) - m + 1`.
pub fn mu_from_eff(f: &EffTuple, rep: &PrincipalSeries, g: &CylinderFn) -> Result<BlockOperator> {
    let defect = fixed_point_defect(rep, f)?;
    if defect > REALIZATION_TOL {
        return Err(Error::NotFixedPoint(defect));
    }
    let a = *rep.alphabet();
    let m = g.depth().max(1);
    let g = g.promote(m)?;
    let top = (f.max_depth() + 1).checked_sub(m).filter(|&t| t >= m).ok_or(Error::DepthUnavailable("mu from Eff", m))?;
    let heads = Sphere::new(a, m - 1, None, None).words();
    let blocks = (m..=top)
        .map(|n| {
            let fs = f.blocks(n + m - 1)?;
            let d = dim(&a, n);
            let mut out = Mat::zeros(d, d);
            for x in &heads {
                let mut weighted = Mat::zeros(fs[0].nrows(), fs[0].ncols());
                let mut word = x.letters().to_vec();
                word.push(0);
                for l in a.letters().filter(|&l| x.last() != Some(inv(l))) {
                    word[m - 1] = l;
                    let coef = g.values()[a.rank(&word)];
                    if coef != c(0.0) {
                        weighted += &fs[l as usize] * coef;
                    }
                }
                let cx = rep.action_matrix(&x.inverse(), n);
                out += cx.adjoint() * weighted * cx;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockOperator::new_unchecked(a, m, blocks))
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct Perfectness {
    pub perfect: bool,
    /// Largest `|F_a^2 - F_a|` in operator norm over all letters and depths.
    pub idempotent_defect: f64,
    pub sum_defect: f64,
    /// `(F, F)` at the top depth.
    pub self_pairing: f64,
    /// Whether the idempotency verdict agrees with `(F, F) < tol`.
    pub consistent: bool,
}

fn operator_norm_hermitian(m: &Mat) -> f64 {
    let (values, _) = eigh(m);
    values.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Perfect iff every `F_a` is a projection; cross-checked against `(F, F) = 0`.
pub fn perfectness_test(f: &EffTuple) -> Result<Perfectness> {
    let mut idempotent_defect: f64 = 0.0;
    let mut sum_defect: f64 = 0.0;
    for n in f.base()..=f.max_depth() {
        let blocks = f.blocks(n)?;
        let d = blocks[0].nrows();
        let total = blocks.iter().fold(Mat::zeros(d, d), |acc, b| acc + b);
        sum_defect = sum_defect.max(max_abs(&(total - Mat::identity(d, d))));
        for b in &blocks {
            idempotent_defect = idempotent_defect.max(operator_norm_hermitian(&(b * b - b)));
        }
    }
    if sum_defect > REALIZATION_TOL {
        return Err(Error::NotRealization(sum_defect));
    }
    let self_pairing = f.pair(f, f.max_depth())?;
    let perfect = idempotent_defect < REALIZATION_TOL;
    Ok(Perfectness {
        perfect,
        idempotent_defect,
        sum_defect,
        self_pairing,
        consistent: perfect == (self_pairing.abs() < REALIZATION_TOL),
    })
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct Equivalence {
    pub pairing: f64,
    pub both_perfect: bool,
    pub equivalent: bool,
}

/// Two perfect realizations are equivalent iff `(F, F~) = 0`.
pub fn equivalence_test(f: &EffTuple, g: &EffTuple) -> Result<Equivalence> {
    let both_perfect = perfectness_test(f)?.perfect && perfectness_test(g)?.perfect;
    let depth = f.max_depth().min(g.max_depth());
    let pairing = f.pair(g, depth)?;
    Ok(Equivalence { pairing, both_perfect, equivalent: both_perfect && pairing.abs() < REALIZATION_TOL })
}

/// Isometry `H_n -> L^2` of a perfect realization: the identity for `mu_+`, the intertwiner for `mu_-`.
pub fn perfect_isometry(real: &Realization, n: usize) -> Result<Mat> {
    let w = real.weights();
    if w.plus == 1.0 && w.minus == 0.0 {
        let d = dim(real.alphabet(), n);
        Ok(Mat::identity(d, d))
    } else if w.plus == 0.0 && w.minus == 1.0 {
        real.intertwiner().block(n)
    } else {
        Err(Error::Dimension(format!("realization {} is not perfect", real.label())))
    }
}

/// Relative eigenvalue threshold for the GNS quotient.
pub const GNS_NULL_TOL: f64 = 1e-10;

/// Truncated GNS space of `C(∂Γ) ⊗ H` for the form `<G ⊗ v, H ⊗ w> = <mu(H̄ G) v, w>`,
/// spanned by all `G_j ⊗ v_a`.
///
/// Coefficient vectors are indexed by `j * vectors + a`.
#[derive(Clone, Debug)]
pub struct GnsSpace {
    generators: Vec<CylinderFn>,
    vectors: Vec<CylinderFn>,
    depth: usize,
    gram: Mat,
    /// Columns are coefficient vectors of an orthonormal basis of the quotient.
    basis: Mat,
    min_gram_eigenvalue: f64,
    /// `iota(v_a)` in quotient coordinates, when `1` lies in the span of the generators.
    iota: Option<Mat>,
}

/// Coefficients of `target` in the span of `fns`, or `None` if it lies outside.
fn span_coefficients(fns: &[CylinderFn], target: &CylinderFn) -> Result<Option<Vec<Complex>>> {
    let depth = fns.iter().map(CylinderFn::depth).chain([target.depth()]).max().unwrap_or(0);
    let cols = fns.iter().map(|f| Ok(DVector::from_vec(f.promote(depth)?.values().to_vec()))).collect::<Result<Vec<_>>>()?;
    let a = Mat::from_columns(&cols);
    let b = DVector::from_vec(target.promote(depth)?.values().to_vec());
    let coef = a.clone().svd(true, true).solve(&b, 1e-12).map_err(|e| Error::Dimension(e.into()))?;
    let residual = (&a * &coef - &b).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((residual < 1e-10).then(|| coef.iter().copied().collect()))
}

type Complex = num_complex::Complex64;

impl GnsSpace {
    /// Builds the space at `depth`, which must cover every generator product and vector.
    pub fn build(real: &Realization, generators: &[CylinderFn], vectors: &[CylinderFn], depth: usize, null_tol: f64) -> Result<Self> {
        let nv = vectors.len();
        let ng = generators.len();
        let vs: Vec<Vector> = vectors.iter().map(|v| vector_of(v, depth)).collect::<Result<_>>()?;
        let pairs: Vec<(usize, usize)> = (0..ng).flat_map(|k| (0..ng).map(move |j| (k, j))).collect();
        let blocks: Vec<Mat> = pairs
            .par_iter()
            .map(|&(k, j)| real.mu_block(&generators[k].conj().pointwise_mul(&generators[j]), depth))
            .collect::<Result<_>>()?;
        let mut gram = Mat::zeros(ng * nv, ng * nv);
        for (&(k, j), m) in pairs.iter().zip(&blocks) {
            for b in 0..nv {
                for a in 0..nv {
                    gram[(k * nv + b, j * nv + a)] = (vs[b].adjoint() * m * &vs[a])[(0, 0)];
                }
            }
        }
        let (values, u) = eigh(&gram);
        let top = values.last().copied().unwrap_or(0.0).max(0.0);
        let min_gram_eigenvalue = values.first().copied().unwrap_or(0.0);
        if min_gram_eigenvalue < -REALIZATION_TOL * top.max(1.0) {
            return Err(Error::NotPsdGram(min_gram_eigenvalue));
        }
        let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > null_tol * top).collect();
        let mut basis = Mat::zeros(ng * nv, keep.len());
        for (col, &i) in keep.iter().enumerate() {
            basis.set_column(col, &(u.column(i) * c(values[i].sqrt().recip())));
        }
        let mut space = Self {
            generators: generators.to_vec(),
            vectors: vectors.to_vec(),
            depth,
            gram,
            basis,
            min_gram_eigenvalue,
            iota: None,
        };
        let one = CylinderFn::one(*real.alphabet());
        if let Some(beta) = span_coefficients(generators, &one)? {
            let mut coef = Mat::zeros(ng * nv, nv);
            for (j, b) in beta.iter().enumerate() {
                for a in 0..nv {
                    coef[(j * nv + a, a)] = *b;
                }
            }
            space.iota = Some(space.coordinates(&coef));
        }
        Ok(space)
    }

    /// Quotient coordinates of the coefficient vectors in the columns of `coef`.
    pub fn coordinates(&self, coef: &Mat) -> Mat {
        self.basis.adjoint() * &self.gram * coef
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    pub fn min_gram_eigenvalue(&self) -> f64 {
        self.min_gram_eigenvalue
    }

    pub fn iota(&self) -> Option<&Mat> {
        self.iota.as_ref()
    }

    fn vector_gram(&self) -> Result<Mat> {
        let vs: Vec<Vector> = self.vectors.iter().map(|v| vector_of(v, self.depth)).collect::<Result<_>>()?;
        let m = Mat::from_columns(&vs);
        Ok(m.adjoint() * m)
    }

    /// `max |<iota v_a, iota v_b> - <v_a, v_b>|`.
    pub fn isometry_defect(&self) -> Result<f64> {
        let iota = self.iota.as_ref().ok_or(Error::Dimension("1 is not in the span of the generators".into()))?;
        Ok(max_abs(&(iota.adjoint() * iota - self.vector_gram()?)))
    }

    /// Matrix of `pi'(G)` in the orthonormal quotient basis; `G G_j` must stay in the generator span.
    pub fn multiplication(&self, g: &CylinderFn) -> Result<Mat> {
        let ng = self.generators.len();
        let nv = self.vectors.len();
        let mut r = Mat::zeros(ng * nv, ng * nv);
        for (j, gj) in self.generators.iter().enumerate() {
            let coef = span_coefficients(&self.generators, &g.pointwise_mul(gj))?
                .ok_or(Error::Dimension("product leaves the generator span".into()))?;
            for (jp, z) in coef.iter().enumerate() {
                for a in 0..nv {
                    r[(jp * nv + a, j * nv + a)] = *z;
                }
            }
        }
        Ok(self.basis.adjoint() * &self.gram * r * &self.basis)
    }

    /// `max |<pi'(G) iota v_a, iota v_b> - <mu(G) v_a, v_b>|`.
    pub fn reproduction_defect(&self, real: &Realization, g: &CylinderFn) -> Result<f64> {
        let iota = self.iota.as_ref().ok_or(Error::Dimension("1 is not in the span of the generators".into()))?;
        let compressed = iota.adjoint() * self.multiplication(g)? * iota;
        let vs: Vec<Vector> = self.vectors.iter().map(|v| vector_of(v, self.depth)).collect::<Result<_>>()?;
        let v = Mat::from_columns(&vs);
        let direct = v.adjoint() * real.mu_block(g, self.depth)? * v;
        Ok(max_abs(&(compressed - direct)))
    }

    /// `max |<pi'(x) X, pi'(x) Y> - <X, Y>|` over the quotient basis, with
    /// `pi'(x) (G ⊗ v) = lambda(x) G ⊗ pi(x) v`.
    pub fn unitarity_defect(&self, real: &Realization, x: &Word) -> Result<f64> {
        let rep = real.rep();
        let deep = self.depth + x.len();
        let moved: Vec<Vector> = self.vectors.iter().map(|v| vector_of(&rep.act(x, v), deep)).collect::<Result<_>>()?;
        let ng = self.generators.len();
        let nv = self.vectors.len();
        let shifted: Vec<CylinderFn> = self.generators.iter().map(|g| g.translate(x)).collect();
        let mut gram = Mat::zeros(ng * nv, ng * nv);
        for k in 0..ng {
            for j in 0..ng {
                let m = real.mu_block(&shifted[k].conj().pointwise_mul(&shifted[j]), deep)?;
                for b in 0..nv {
                    for a in 0..nv {
                        gram[(k * nv + b, j * nv + a)] = (moved[b].adjoint() * &m * &moved[a])[(0, 0)];
                    }
                }
            }
        }
        Ok(max_abs(&(self.basis.adjoint() * (gram - &self.gram) * &self.basis)))
    }
}

/// Largest singular value.
pub fn operator_norm(m: &Mat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// The four quantities of the oddity block identity at one depth.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct OddSymBlock {
    pub depth: usize,
    /// `(F_1, F_1)` for `F_1 = iota* pi'(1_a) iota`.
    pub first: f64,
    /// `sum_a |P_2 pi'(1_a) P_1|_HS^2`.
    pub lower: f64,
    /// `sum_a |P_1 pi'(1_a) P_2|_HS^2`.
    pub upper: f64,
    /// `(F_2, F_2)` for the complementary realization on `P_2 H'`.
    pub second: f64,
    /// `|P_2 pi'(1) P_1|_HS`.
    pub identity_off_block: f64,
}

impl OddSymBlock {
    pub fn spread(&self) -> f64 {
        let xs = [self.first, self.lower, self.upper, self.second];
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

/// Oddity block identity for `H' = H ⊕ H` with `pi'(1_a)` multiplication in both
/// summands and `iota = (iota_1 ⊕ iota_2) / sqrt(2)`, checked on every depth `1..=n`.
pub fn odd_symm_check(first: &Realization, second: &Realization, n: usize) -> Result<Vec<OddSymBlock>> {
    let a = *first.alphabet();
    (1..=n)
        .map(|depth| {
            let d = dim(&a, depth);
            let mut j = Mat::zeros(2 * d, d);
            j.view_mut((0, 0), (d, d)).copy_from(&perfect_isometry(first, depth)?);
            j.view_mut((d, 0), (d, d)).copy_from(&perfect_isometry(second, depth)?);
            j *= c(std::f64::consts::FRAC_1_SQRT_2);
            let p1 = &j * j.adjoint();
            let p2 = Mat::identity(2 * d, 2 * d) - &p1;
            let (values, u) = eigh(&p2);
            let range: Vec<_> = (0..values.len()).filter(|&i| values[i] > 0.5).map(|i| u.column(i).into_owned()).collect();
            let k = Mat::from_columns(&range);
            let pis: Vec<Mat> = a
                .letters()
                .map(|l| {
                    let ind = CylinderFn::indicator(a, &Word::letter(&a, l)).promote(depth)?;
                    let diag: Vec<Complex> = ind.values().iter().chain(ind.values()).copied().collect();
                    Ok(Mat::from_diagonal(&DVector::from_vec(diag)))
                })
                .collect::<Result<_>>()?;
            let f1: Vec<Mat> = pis.iter().map(|p| j.adjoint() * p * &j).collect();
            let f2: Vec<Mat> = pis.iter().map(|p| k.adjoint() * p * &k).collect();
            let lower = pis.iter().map(|p| hs_norm(&(&p2 * p * &p1)).powi(2)).sum();
            let upper = pis.iter().map(|p| hs_norm(&(&p1 * p * &p2)).powi(2)).sum();
            let total = pis.iter().fold(Mat::zeros(2 * d, 2 * d), |acc, p| acc + p);
            Ok(OddSymBlock {
                depth,
                first: tuple_pair(&f1, &f1)?,
                lower,
                upper,
                second: tuple_pair(&f2, &f2)?,
                identity_off_block: hs_norm(&(&p2 * total * &p1)),
            })
        })
        .collect()
}

/// Singular values below this count as zero in [`boundary_split`].
pub const SPLIT_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct BoundarySplit {
    /// Orthonormal columns spanning the joint kernel of `mu(1_z) - mu(1_z)^2`, `|z| <= m`.
    pub bad: Mat,
    /// Orthonormal columns spanning its complement in `H_n`.
    pub good: Mat,
    /// `dim H_B` when probing `|z| <= p`, for `p = 0..=m`.
    pub bad_dims: Vec<usize>,
}

/// Splits `H_n` by the probes `mu(1_z) w = mu(1_z)^2 w` for `|z| <= m <= n`.
pub fn boundary_split(real: &Realization, n: usize, m: usize) -> Result<BoundarySplit> {
    if m > n {
        return Err(Error::DepthTooShallow { depth: n, needed: m });
    }
    let a = *real.alphabet();
    let d = dim(&a, n);
    let mut rows: Vec<Mat> = Vec::new();
    let mut bad_dims = Vec::with_capacity(m + 1);
    let mut last = None;
    for p in 0..=m {
        for z in Sphere::new(a, p, None, None).words() {
            let mu = real.mu_block(&CylinderFn::indicator(a, &z), n)?;
            rows.push(&mu - &mu * &mu);
        }
        let mut stacked = Mat::zeros(rows.len() * d, d);
        for (i, r) in rows.iter().enumerate() {
            stacked.view_mut((i * d, 0), (d, d)).copy_from(r);
        }
        let svd = stacked.svd(false, true);
        let vt = svd.v_t.expect("right singular vectors");
        let (null, range): (Vec<usize>, Vec<usize>) = (0..d).partition(|&i| svd.singular_values[i] < SPLIT_TOL);
        bad_dims.push(null.len());
        last = Some((vt, null, range));
    }
    let (vt, null, range) = last.expect("at least one probe depth");
    let cols = |idx: &[usize]| {
        let v: Vec<Vector> = idx.iter().map(|&i| vt.row(i).adjoint()).collect();
        if v.is_empty() { Mat::zeros(d, 0) } else { Mat::from_columns(&v) }
    };
    Ok(BoundarySplit { bad: cols(&null), good: cols(&range), bad_dims })
}

/// Outcome of the trace argument against finite-dimensional Eff-vectors.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Obstruction {
    /// Only the zero tuple exists (`d = 0`).
    Feasible,
    /// Farkas multipliers `y` with `A^T y >= 0` and `b^T y < 0`, rows ordered as
    /// the letter equations followed by the trace constraint.
    Infeasible { multipliers: Vec<i64> },
}

/// The trace system `t_a = sum_{b != a^-1} t_b`, `sum_a t_a = d` satisfied by
/// `t_a = tr F_a` for any `d`-dimensional Eff tuple with `sum_a F_a = Id`.
pub fn trace_system(k: usize, d: usize) -> (Vec<Vec<i64>>, Vec<i64>) {
    let size = 2 * k;
    let mut rows = Vec::with_capacity(size + 1);
    for a in 0..size {
        let row = (0..size)
            .map(|b| i64::from(a == b) - i64::from(b as Letter != inv(a as Letter)))
            .collect();
        rows.push(row);
    }
    rows.push(vec![1; size]);
    let mut rhs = vec![0; size];
    rhs.push(d as i64);
    (rows, rhs)
}

/// Certificate that no `d`-dimensional Eff tuple sums to the identity.
///
/// For `k = 1` the trace system is satisfiable in every dimension.
pub fn eff_finite_dim_obstruction(d: usize, k: usize) -> Obstruction {
    if d == 0 || k < 2 {
        return Obstruction::Feasible;
    }
    let q = 2 * k as i64 - 1;
    let mut multipliers = vec![-1; 2 * k];
    multipliers.push(-(q - 1));
    Obstruction::Infeasible { multipliers }
}

/// Checks a Farkas certificate exactly in integers.
pub fn verify_obstruction(k: usize, d: usize, obstruction: &Obstruction) -> bool {
    let (rows, rhs) = trace_system(k, d);
    match obstruction {
        Obstruction::Feasible => d == 0 || k < 2,
        Obstruction::Infeasible { multipliers } => {
            if multipliers.len() != rows.len() {
                return false;
            }
            let cols_ok = (0..2 * k).all(|j| rows.iter().zip(multipliers).map(|(r, y)| r[j] * y).sum::<i64>() >= 0);
            let value: i64 = rhs.iter().zip(multipliers).map(|(b, y)| b * y).sum();
            cols_ok && value < 0
        }
    }
}

/// Whether a finite-dimensional candidate with generator unitaries `gens[i]`
/// (for letters `2i`) satisfies `sum F_a = Id` and `T F = F` within tolerance.
pub fn is_finite_eff(f: &[Mat], gens: &[Mat]) -> bool {
    let d = f[0].nrows();
    let unitary = |l: usize| if l.is_multiple_of(2) { gens[l / 2].clone() } else { gens[l / 2].adjoint() };
    let total = f.iter().fold(Mat::zeros(d, d), |acc, m| acc + m);
    if max_abs(&(total - Mat::identity(d, d))) > REALIZATION_TOL {
        return false;
    }
    (0..f.len()).all(|a| {
        let u = unitary(a);
        let tf = (0..f.len())
            .filter(|&b| b != (a ^ 1))
            .fold(Mat::zeros(d, d), |acc, b| acc + &u * &f[b] * u.adjoint());
        max_abs(&(tf - &f[a])) <= REALIZATION_TOL
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::Alphabet;

    fn pair() -> (Realization, Realization) {
        Realization::pair(Alphabet::new(2).unwrap(), 0.3, 3).unwrap()
    }

    #[test]
    fn mu_from_eff_letter_and_constant() {
        let (plus, minus) = pair();
        let a = *plus.alphabet();
        for real in [&plus, &minus] {
            let f = real.eff().unwrap();
            for l in a.letters() {
                let g = CylinderFn::indicator(a, &Word::letter(&a, l));
                let m = mu_from_eff(&f, real.rep(), &g).unwrap();
                assert!(max_abs(&(m.block(2).unwrap() - f.component(l as usize).block(2).unwrap())) < 1e-12);
            }
            let one = mu_from_eff(&f, real.rep(), &CylinderFn::one(a)).unwrap();
            assert!(max_abs(&(one.block(2).unwrap() - Mat::identity(12, 12))) < 1e-10);
        }
    }

    #[test]
    fn mu_from_eff_depth_two_round_trip() {
        let (plus, minus) = pair();
        let a = *plus.alphabet();
        let g = CylinderFn::from_values(a, 2, (0..12).map(|i| Complex::new(i as f64 * 0.1 - 0.4, 0.05 * i as f64)).collect()).unwrap();
        for real in [&plus, &minus] {
            let regen = mu_from_eff(&real.eff().unwrap(), real.rep(), &g).unwrap();
            assert_eq!(regen.base(), 2);
            let direct = real.mu_block(&g, 2).unwrap();
            assert!(max_abs(&(regen.block(2).unwrap() - direct)) < 1e-9);
        }
    }

    #[test]
    fn non_fixed_tuple_is_rejected() {
        let (plus, _) = pair();
        let f = plus.eff().unwrap().scale(0.5);
        let g = CylinderFn::indicator(*plus.alphabet(), &Word::parse(plus.alphabet(), "a").unwrap());
        assert!(mu_from_eff(&f, plus.rep(), &g).is_ok());
        let mut comps = plus.eff().unwrap().components().to_vec();
        comps[0] = comps[0].scale(1.5);
        assert!(matches!(mu_from_eff(&EffTuple::new(comps), plus.rep(), &g), Err(Error::NotFixedPoint(_))));
    }

    #[test]
    fn perfectness_examples() {
        let (plus, minus) = pair();
        let comb = Realization::combined(&plus, &minus).unwrap();
        let p = perfectness_test(&plus.eff().unwrap()).unwrap();
        assert!(p.perfect && p.consistent);
        let c = perfectness_test(&comb.eff().unwrap()).unwrap();
        assert!(!c.perfect && c.consistent && c.idempotent_defect > 1e-3);
        let eq = equivalence_test(&plus.eff().unwrap(), &plus.eff().unwrap()).unwrap();
        assert!(eq.equivalent);
        let ne = equivalence_test(&plus.eff().unwrap(), &minus.eff().unwrap()).unwrap();
        assert!(!ne.equivalent && ne.pairing > 0.1);
    }

    #[test]
    fn gns_of_multiplication_collapses() {
        let (plus, _) = pair();
        let a = *plus.alphabet();
        let gens: Vec<CylinderFn> = a.letters().map(|l| CylinderFn::indicator(a, &Word::letter(&a, l))).collect();
        let vecs: Vec<CylinderFn> = (0..4)
            .map(|i| CylinderFn::from_coords(a, 1, &(0..4).map(|j| c(f64::from(u8::from(i == j)))).collect::<Vec<_>>()).unwrap())
            .collect();
        let space = GnsSpace::build(&plus, &gens, &vecs, 1, GNS_NULL_TOL).unwrap();
        assert_eq!(space.dimension(), 4);
        assert!(space.isometry_defect().unwrap() < 1e-12);
    }

    #[test]
    fn obstruction_examples() {
        assert_eq!(eff_finite_dim_obstruction(0, 2), Obstruction::Feasible);
        assert_eq!(eff_finite_dim_obstruction(3, 1), Obstruction::Feasible);
        for (k, d) in [(2, 1), (2, 4), (3, 7)] {
            let o = eff_finite_dim_obstruction(d, k);
            assert!(verify_obstruction(k, d, &o));
        }
        assert!(!verify_obstruction(2, 1, &Obstruction::Infeasible { multipliers: vec![1; 5] }));
    }

    #[test]
    fn split_of_perfect_realization_is_everything() {
        let (plus, _) = pair();
        let s = boundary_split(&plus, 2, 2).unwrap();
        assert_eq!(s.bad.ncols(), 12);
        assert_eq!(s.good.ncols(), 0);
    }
}
