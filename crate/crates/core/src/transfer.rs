//! The transfer operator `(T F)_a = sum_{b != a^-1} pi(a) F_b pi(a)^-1`, its
//! powers on rank-one tuples, Abel summation and the limit formulas built on them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::boundary::CylinderFn;
use crate::error::{Error, Result};
use crate::freegroup::{inv, Alphabet, Letter, Sphere, Word};
use crate::opalg::{
    c, dim, max_abs, trace_pair_rank_one, tuple_pair, vector_of, BlockOperator, EffTuple, Mat, RankOneSum, Vector,
};
use crate::par::Pool;
use crate::reps::{ActCoarse, PrincipalSeries, Realization};

fn letter_words(alphabet: &Alphabet) -> Vec<Word> {
    alphabet.letters().map(|l| Word::letter(alphabet, l)).collect()
}

/// Compression of `T F` to `H_n` from the compressions of `F` to `H_{n+1}`.
///
/// Uses `<pi(a) F_b pi(a)^-1 e_i, e_j> = <F_b C e_i, C e_j>` with `C` the matrix of
/// `pi(a^-1): H_n -> H_{n+1}`.
pub fn apply_t_blocks(rep: &PrincipalSeries, next: &[Mat], n: usize) -> Vec<Mat> {
    let a = rep.alphabet();
    let d = dim(a, n);
    letter_words(a)
        .iter()
        .map(|x| {
            let ca = rep.action_matrix(&x.inverse(), n);
            let l = x.letters()[0];
            a.letters()
                .filter(|&b| b != inv(l))
                .fold(Mat::zeros(d, d), |acc, b| acc + ca.adjoint() * &next[b as usize] * &ca)
        })
        .collect()
}

/// `T F` as a tuple of compressions on depths `base..max_depth - 1`.
pub fn apply_t(rep: &PrincipalSeries, f: &EffTuple) -> Result<EffTuple> {
    let top = f.max_depth();
    if top == 0 {
        return Err(Error::DepthUnavailable("transfer input", 1));
    }
    let base = f.base().min(top - 1);
    let per_depth: Vec<Vec<Mat>> = (base..top).map(|n| f.blocks(n + 1).map(|b| apply_t_blocks(rep, &b, n))).collect::<Result<_>>()?;
    let a = *rep.alphabet();
    let comps = (0..a.size())
        .map(|i| BlockOperator::new_unchecked(a, base, per_depth.iter().map(|blocks| blocks[i].clone()).collect()))
        .collect();
    Ok(EffTuple::new(comps))
}

/// `(T F)_a g` for every letter `a`, evaluated on a test vector `g` by acting with
/// `pi(a^-1)`, the depth blocks of `F`, and `pi(a)`; results live at depth `depth(g) + 2`.
pub fn apply_t_vectors(rep: &PrincipalSeries, f: &EffTuple, g: &CylinderFn) -> Result<Vec<CylinderFn>> {
    let a = *rep.alphabet();
    letter_words(&a)
        .iter()
        .map(|x| {
            let l = x.letters()[0];
            let pulled = rep.act(&x.inverse(), g);
            let mut acc = CylinderFn::zero(a, 0);
            for b in a.letters().filter(|&b| b != inv(l)) {
                let fb = f.component(b as usize).apply(&pulled)?;
                acc = &acc + &rep.act(x, &fb);
            }
            Ok(acc)
        })
        .collect()
}

/// `T S` for a tuple of operators supported in `H_d`, returned exactly on `H_{d+1}`.
pub fn push_forward(rep: &PrincipalSeries, s: &[Mat], d: usize) -> Vec<Mat> {
    let a = rep.alphabet();
    let big = dim(a, d + 1);
    letter_words(a)
        .iter()
        .map(|x| {
            let u = rep.action_matrix(x, d);
            let l = x.letters()[0];
            a.letters()
                .filter(|&b| b != inv(l))
                .fold(Mat::zeros(big, big), |acc, b| acc + &u * &s[b as usize] * u.adjoint())
        })
        .collect()
}

/// Components `{pi(x) v : x in sphere(n, a, b^-1)}` of `T^n F_0` with `F_0 = v ⊗ v̄` at letter `b`.
///
/// Vectors are stored projected to depth `resolution` when given, else at full depth.
pub fn iterate_t_rank_one(
    rep: &PrincipalSeries,
    v: &CylinderFn,
    b: Letter,
    n: usize,
    resolution: Option<usize>,
) -> Vec<RankOneSum> {
    let a = *rep.alphabet();
    let coarse = ActCoarse::new(rep, v);
    a.letters()
        .map(|start| {
            let mut vecs = Vec::new();
            Sphere::new(a, n, Some(start), Some(inv(b))).for_each(|x| {
                vecs.push(match resolution {
                    Some(m) => coarse.apply(x, m),
                    None => rep.act(&Word::from_letters(&a, x.to_vec()).expect("reduced"), v),
                });
            });
            RankOneSum::new(vecs)
        })
        .collect()
}

/// `sum_{x} P_m pi(x) v ⊗ conj(P_m pi(x) v)` over `sphere(n, start, forbid_last)`.
pub fn sphere_gram(
    rep: &PrincipalSeries,
    v: &CylinderFn,
    sphere: &Sphere,
    m: usize,
    pool: &Pool,
) -> Mat {
    let d = dim(rep.alphabet(), m);
    let coarse = ActCoarse::new(rep, v);
    pool.sphere_reduce(
        sphere,
        || Mat::zeros(d, d),
        |acc, x| {
            let p = Vector::from_vec(coarse.apply(x, m).coords());
            *acc += &p * p.adjoint();
        },
        |a, b| a + b,
    )
}

/// Depth-`m` compressions of `T^n F_0`.
///
/// With `b = Some(b)`, `F_0` is `v ⊗ v̄` at letter `b` and zero elsewhere; with
/// `b = None`, `F_0 = E` has `v ⊗ v̄` in every component.
pub fn potenza_t(rep: &PrincipalSeries, v: &CylinderFn, b: Option<Letter>, n: usize, m: usize, pool: &Pool) -> Vec<Mat> {
    let a = *rep.alphabet();
    if n == 0 {
        let p = Vector::from_vec(v.promote(v.depth().max(m)).and_then(|f| f.coarsen(m)).expect("depth").coords());
        let r1 = &p * p.adjoint();
        return a
            .letters()
            .map(|l| if b.is_none_or(|b| b == l) { r1.clone() } else { Mat::zeros(r1.nrows(), r1.ncols()) })
            .collect();
    }
    a.letters()
        .map(|start| match b {
            Some(b) => sphere_gram(rep, v, &Sphere::new(a, n, Some(start), Some(inv(b))), m, pool),
            None => sphere_gram(rep, v, &Sphere::new(a, n, Some(start), None), m, pool) * c(a.q() as f64),
        })
        .collect()
}

/// Terms `s_0, ..., s_{n_max}` with a common shape, flattened to complex vectors.
///
/// Beyond `n_max` the terms are replaced by a fitted model `sum_j c_j rho_j^n`. The
/// leading ratios are `1` and, with a frequency `w`, `e^{±iw}`; declared transient
/// ratios `r` add `r`, `r e^{±iw}`. The full model is fitted on `onset..=n_max` when
/// that has more points than unknowns, otherwise the leading model on the last
/// [`TAIL_WINDOW`] terms.
#[derive(Clone, Debug)]
pub struct AbelSeries {
    terms: Vec<Vec<Complex64>>,
    frequency: Option<f64>,
    transients: Vec<f64>,
    onset: usize,
    window: usize,
}

/// Finite Abel sum together with the tail bound it omits.
#[derive(Clone, Debug)]
pub struct AbelValue {
    pub value: Vec<Complex64>,
    pub tail_bound: f64,
}

/// Terms used to fit the leading tail model.
pub const TAIL_WINDOW: usize = 5;

impl AbelSeries {
    pub fn new(terms: Vec<Vec<Complex64>>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::Dimension("Abel series needs at least one term".into()));
        };
        let len = first.len();
        if terms.iter().any(|t| t.len() != len || t.iter().any(|z| !z.is_finite())) {
            return Err(Error::Dimension("Abel terms must be finite and equally shaped".into()));
        }
        Ok(Self { terms, frequency: None, transients: Vec::new(), onset: 0, window: TAIL_WINDOW })
    }

    pub fn scalar(terms: &[Complex64]) -> Result<Self> {
        Self::new(terms.iter().map(|&t| vec![t]).collect())
    }

    pub fn from_matrices(terms: &[Vec<Mat>]) -> Result<Self> {
        Self::new(terms.iter().map(|tuple| tuple.iter().flat_map(|m| m.iter().copied()).collect()).collect())
    }

    /// Declares that `s_n` approaches `alpha + beta e^{i w n} + gamma e^{-i w n}`.
    pub fn with_frequency(mut self, w: f64) -> Self {
        self.frequency = Some(w).filter(|w| w.abs() > 1e-12);
        self
    }

    /// Declares decaying ratios present from term `onset` on.
    pub fn with_transients(mut self, ratios: &[f64], onset: usize) -> Self {
        self.transients = ratios.to_vec();
        self.onset = onset;
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window.max(1);
        self
    }

    pub fn n_max(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn terms(&self) -> &[Vec<Complex64>] {
        &self.terms
    }

    pub fn sup(&self) -> f64 {
        self.terms.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `eps sum_{n <= n_max} e^{-eps n} s_n` and the bound `eps e^{-eps (n_max+1)} / (1 - e^{-eps}) sup|s|`.
    pub fn eval(&self, eps: f64) -> AbelValue {
        let len = self.terms[0].len();
        let mut value = vec![Complex64::new(0.0, 0.0); len];
        for (n, t) in self.terms.iter().enumerate() {
            let w = eps * (-eps * n as f64).exp();
            for (acc, z) in value.iter_mut().zip(t) {
                *acc += z * w;
            }
        }
        let tail_bound = eps * (-eps * (self.n_max() + 1) as f64).exp() / (1.0 - (-eps).exp()) * self.sup();
        AbelValue { value, tail_bound }
    }

    fn leading(&self) -> Vec<Complex64> {
        match self.frequency {
            Some(w) => vec![c(1.0), Complex64::from_polar(1.0, w), Complex64::from_polar(1.0, -w)],
            None => vec![c(1.0)],
        }
    }

    /// Ratios and fitting window of the tail model; `extra` reserves columns for a drift term.
    fn model(&self, extra: usize) -> (Vec<Complex64>, std::ops::Range<usize>) {
        let leading = self.leading();
        let len = self.terms.len();
        if !self.transients.is_empty() {
            let mut full = leading.clone();
            for &r in &self.transients {
                full.extend(leading.iter().map(|z| z * r));
            }
            if len > self.onset && len - self.onset > full.len() + extra {
                return (full, self.onset..len);
            }
        }
        let w = self.window.min(len);
        let mut modes = leading;
        if modes.len() + extra > w {
            modes.truncate(1);
        }
        (modes, len - w..len)
    }

    /// Whether the full model with the declared transients is identifiable from the terms.
    pub fn uses_transients(&self) -> bool {
        self.model(0).0.len() > self.leading().len()
    }

    /// Least-squares fit of `sum_j c_j rho_j^n` (optionally with a drift `delta n`) over `range`.
    fn fit(&self, modes: &[Complex64], range: std::ops::Range<usize>, drift: bool) -> Vec<Vec<Complex64>> {
        let cols = modes.len() + usize::from(drift);
        let mut design = DMatrix::<Complex64>::zeros(range.len(), cols);
        for (r, n) in range.clone().enumerate() {
            for (j, rho) in modes.iter().enumerate() {
                design[(r, j)] = rho.powu(n as u32);
            }
            if drift {
                design[(r, modes.len())] = c(n as f64);
            }
        }
        let len = self.terms[0].len();
        let mut rhs = DMatrix::<Complex64>::zeros(range.len(), len);
        for (r, n) in range.enumerate() {
            for (e, z) in self.terms[n].iter().enumerate() {
                rhs[(r, e)] = *z;
            }
        }
        let svd = design.svd(true, true);
        let coef = svd.solve(&rhs, 1e-12).expect("svd solve");
        (0..len).map(|e| coef.column(e).iter().copied().collect()).collect()
    }

    /// Whether the terms grow linearly on the fitting window.
    pub fn diverges(&self) -> bool {
        let (modes, range) = self.model(1);
        if range.len() < 2 {
            return false;
        }
        let coef = self.fit(&modes, range, true);
        let drift = coef.iter().map(|c| c[modes.len()].norm()).fold(0.0, f64::max);
        drift * (self.n_max() + 1) as f64 > 0.5 * self.sup()
    }

    /// Abel sum with the fitted tail model summed in closed form beyond `n_max`.
    pub fn completed(&self, eps: f64) -> Vec<Complex64> {
        let (modes, range) = self.model(0);
        let coef = self.fit(&modes, range, false);
        let start = (self.n_max() + 1) as u32;
        let decay = (-eps).exp();
        let tails: Vec<Complex64> = modes
            .iter()
            .map(|rho| {
                let r = rho * decay;
                eps * r.powu(start) / (c(1.0) - r)
            })
            .collect();
        let mut value = self.eval(eps).value;
        for (acc, cs) in value.iter_mut().zip(&coef) {
            *acc += cs.iter().zip(&tails).map(|(a, b)| a * b).sum::<Complex64>();
        }
        value
    }
}

/// Result of extrapolating Abel sums to `eps -> 0`.
#[derive(Clone, Debug)]
pub struct Extrapolation {
    pub limit: Vec<Complex64>,
    /// Size of the last correction in the extrapolation tableau.
    pub error: f64,
    pub diverged: bool,
    /// Largest omitted-tail bound over the schedule.
    pub tail_bound: f64,
    /// Largest `|completed(eps) - finite(eps)| - tail_bound(eps)` over the schedule; `<= 0` when consistent.
    pub tail_excess: f64,
    pub schedule: Vec<f64>,
}

/// Polynomial extrapolation to `eps = 0` of `A(eps) (1 - e^{-eps}) / eps` in the variable `u = 1 - e^{-eps}`.
///
/// The normalization makes constant series exact; in `u` a geometric term `r rho^n`
/// contributes `r u / (1 - rho (1 - u))`, which is smooth at `u = 0`.
pub fn abel_extrapolate(series: &AbelSeries, schedule: &[f64]) -> Result<Extrapolation> {
    if schedule.len() < 3 || schedule.windows(2).any(|w| w[1] >= w[0]) || schedule.iter().any(|&e| e <= 0.0) {
        return Err(Error::InsufficientSchedule);
    }
    let us: Vec<f64> = schedule.iter().map(|&e| 1.0 - (-e).exp()).collect();
    let normalized: Vec<Vec<Complex64>> = schedule
        .iter()
        .zip(&us)
        .map(|(&e, &u)| series.completed(e).into_iter().map(|z| z * (u / e)).collect())
        .collect();
    let mut tail_bound: f64 = 0.0;
    let mut tail_excess = f64::NEG_INFINITY;
    for &e in schedule {
        let finite = series.eval(e);
        let completed = series.completed(e);
        let gap = finite.value.iter().zip(&completed).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        tail_bound = tail_bound.max(finite.tail_bound);
        tail_excess = tail_excess.max(gap - finite.tail_bound);
    }
    let len = normalized[0].len();
    let m = us.len();
    let mut limit = Vec::with_capacity(len);
    let mut error: f64 = 0.0;
    for e in 0..len {
        let ys: Vec<Complex64> = normalized.iter().map(|v| v[e]).collect();
        let full = neville_at_zero(&us, &ys);
        let reduced = neville_at_zero(&us[1..m], &ys[1..m]);
        error = error.max((full - reduced).norm());
        limit.push(full);
    }
    Ok(Extrapolation {
        limit,
        error,
        diverged: series.diverges(),
        tail_bound,
        tail_excess,
        schedule: schedule.to_vec(),
    })
}

/// Value at `0` of the interpolating polynomial through `(xs, ys)`.
fn neville_at_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let mut p = ys.to_vec();
    let m = xs.len();
    for k in 1..m {
        for i in 0..m - k {
            p[i] = (p[i + 1] * xs[i] - p[i] * xs[i + k]) / (xs[i] - xs[i + k]);
        }
    }
    p[0]
}

/// Depth-indexed truncations of a tuple pairing.
#[derive(Clone, Debug, serde::Serialize)]
pub struct FtcValue {
    pub depths: Vec<usize>,
    pub values: Vec<f64>,
    pub converged: bool,
    pub last_increment: f64,
    pub value: f64,
}

/// Relative increment below which pairing truncations count as converged.
pub const FTC_TOL: f64 = 1e-6;

/// `(F, G)` truncated at each depth of `depths`.
pub fn ftc_value(f: &EffTuple, g: &EffTuple, depths: &[usize]) -> Result<FtcValue> {
    let values = depths.iter().map(|&n| f.pair(g, n)).collect::<Result<Vec<_>>>()?;
    let last = *values.last().ok_or(Error::InsufficientSchedule)?;
    let last_increment = if values.len() >= 2 {
        let prev = values[values.len() - 2];
        (last - prev).abs() / last.abs().max(f64::MIN_POSITIVE)
    } else {
        f64::INFINITY
    };
    let converged = last_increment < FTC_TOL || (last.abs() < 1e-12 && values.iter().all(|v| v.abs() < 1e-12));
    Ok(FtcValue { depths: depths.to_vec(), values, converged, last_increment, value: last })
}

/// Outcome of comparing the Abel limit of `T^n F_0` with the two-realization formula.
#[derive(Clone, Debug)]
pub struct DupLimReport {
    pub lhs: Vec<Mat>,
    pub rhs: Vec<Mat>,
    pub rel_err_per_letter: Vec<f64>,
    pub max_rel_err: f64,
    pub abel_error: f64,
    pub tail_bound: f64,
    pub tail_excess: f64,
    pub diverged: bool,
    /// `(F_0, F_+)`, `(F_0, F_-)` and `(F_+, F_-)`.
    pub f0_plus: f64,
    pub f0_minus: f64,
    pub plus_minus: f64,
}

/// Inputs of [`dup_limit_check`] beyond the vector and the letter.
#[derive(Clone, Debug)]
pub struct DupLimSetup<'a> {
    pub plus: &'a Realization,
    pub minus: &'a Realization,
    pub n_obs: usize,
    pub n_max: usize,
    pub schedule: &'a [f64],
    /// `(F_+, F_-)`, normally from [`ftc_value`].
    pub plus_minus: f64,
}

/// Compares `lim eps sum e^{-eps n} T^n F_0` with `[(F_0,F_-) F_+ + (F_0,F_+) F_-] / (F_+,F_-)`
/// on the depth-`n_obs` block.
pub fn dup_limit_check(v: &CylinderFn, b: Letter, setup: &DupLimSetup<'_>, pool: &Pool) -> Result<DupLimReport> {
    let rep = setup.plus.rep();
    let a = *rep.alphabet();
    let m = setup.n_obs;
    let terms: Vec<Vec<Mat>> = (0..=setup.n_max).map(|n| potenza_t(rep, v, Some(b), n, m, pool)).collect();
    let q = a.q() as f64;
    let onset = m.max(v.depth()).saturating_sub(1);
    let series = AbelSeries::from_matrices(&terms)?
        .with_frequency(rep.frequency())
        .with_transients(&[1.0 / q, -1.0 / q], onset);
    let ext = abel_extrapolate(&series, setup.schedule)?;
    let d = dim(&a, m);
    let lhs: Vec<Mat> = ext.limit.chunks(d * d).map(|chunk| Mat::from_column_slice(d, d, chunk)).collect();

    let depth = v.depth().max(1);
    let complement = &CylinderFn::one(a) - &CylinderFn::indicator(a, &Word::letter(&a, b));
    let vv = vector_of(v, depth)?;
    let f0_plus = trace_pair_rank_one(&vv, &setup.plus.mu_block(&complement, depth)?);
    let f0_minus = trace_pair_rank_one(&vv, &setup.minus.mu_block(&complement, depth)?);
    let fp = setup.plus.eff()?.blocks(m)?;
    let fm = setup.minus.eff()?.blocks(m)?;
    let rhs: Vec<Mat> = fp
        .iter()
        .zip(&fm)
        .map(|(p, q)| (p * c(f0_minus) + q * c(f0_plus)) * c(1.0 / setup.plus_minus))
        .collect();
    let rel_err_per_letter: Vec<f64> = lhs
        .iter()
        .zip(&rhs)
        .map(|(l, r)| {
            let scale = max_abs(r);
            let diff = max_abs(&(l - r));
            if scale > 0.0 { diff / scale } else { diff }
        })
        .collect();
    let max_rel_err = rel_err_per_letter.iter().copied().fold(0.0, f64::max);
    Ok(DupLimReport {
        lhs,
        rhs,
        rel_err_per_letter,
        max_rel_err,
        abel_error: ext.error,
        tail_bound: ext.tail_bound,
        tail_excess: ext.tail_excess,
        diverged: ext.diverged,
        f0_plus,
        f0_minus,
        plus_minus: setup.plus_minus,
    })
}

/// `(F_0, F)` for `F_0 = v ⊗ v̄` at letter `b`, through the tuple pairing at the depth of `v`.
pub fn rank_one_pairing(v: &CylinderFn, b: Letter, f: &EffTuple) -> Result<f64> {
    let a = *v.alphabet();
    let depth = v.depth().max(f.base());
    let vv = vector_of(v, depth)?;
    let d = vv.len();
    let f0: Vec<Mat> = a
        .letters()
        .map(|l| if l == b { &vv * vv.adjoint() } else { Mat::zeros(d, d) })
        .collect();
    tuple_pair(&f0, &f.blocks(depth)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(xs: impl IntoIterator<Item = f64>) -> Vec<Complex64> {
        xs.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
    }

    const SCHEDULE: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

    #[test]
    fn rank_one_iterate_counts_match_brute_force() {
        let a = Alphabet::new(2).unwrap();
        let rep = PrincipalSeries::new(a, 0.3);
        let v = CylinderFn::one(a);
        let b = a.parse_letter('a').unwrap();
        for n in 1..=3 {
            let all = Sphere::new(a, n, None, None).words();
            let comps = iterate_t_rank_one(&rep, &v, b, n, Some(0));
            for (start, comp) in a.letters().zip(&comps) {
                let brute = all.iter().filter(|x| x.first() == Some(start) && x.last() != Some(inv(b))).count();
                assert_eq!(comp.len(), brute);
            }
            let total: usize = comps.iter().map(RankOneSum::len).sum();
            assert_eq!(total, [3, 9, 27][n - 1]);
        }
        // n = 1: only `A` ends with the inverse of `a`.
        let first = iterate_t_rank_one(&rep, &v, b, 1, Some(0));
        assert_eq!(first.iter().map(RankOneSum::len).collect::<Vec<_>>(), vec![1, 0, 1, 1]);
    }

    #[test]
    fn abel_eval_examples() {
        for eps in [0.5f64, 0.1, 0.01] {
            let ones = AbelSeries::scalar(&cs(std::iter::repeat_n(1.0, 4000))).unwrap();
            let expected = eps / (1.0 - (-eps).exp());
            assert!((ones.eval(eps).value[0].re - expected).abs() < 1e-9);
            let alt = AbelSeries::scalar(&cs((0..4000).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }))).unwrap();
            let expected = eps / (1.0 + (-eps).exp());
            assert!((alt.eval(eps).value[0].re - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_series_is_exact() {
        let s = AbelSeries::scalar(&cs(std::iter::repeat_n(2.5, 9))).unwrap();
        let ext = abel_extrapolate(&s, &SCHEDULE).unwrap();
        assert!((ext.limit[0].re - 2.5).abs() < 1e-12);
        assert!(ext.error < 1e-12);
        assert!(!ext.diverged);
    }

    #[test]
    fn linear_growth_is_flagged() {
        let s = AbelSeries::scalar(&cs((0..9).map(f64::from))).unwrap();
        assert!(abel_extrapolate(&s, &SCHEDULE).unwrap().diverged);
    }

    #[test]
    fn geometric_perturbation_extrapolates_to_constant() {
        for rho in [0.1, -0.2, 0.05] {
            let terms = cs((0..60).map(|n| 1.5 + 0.8 * f64::powi(rho, n)));
            let ext = abel_extrapolate(&AbelSeries::scalar(&terms).unwrap(), &SCHEDULE).unwrap();
            assert!((ext.limit[0].re - 1.5).abs() < 1e-6, "rho = {rho}: {}", ext.limit[0]);
        }
    }

    #[test]
    fn slow_geometric_error_is_reported() {
        let terms = cs((0..60).map(|n| 1.5 + 0.8 * f64::powi(0.5, n)));
        let ext = abel_extrapolate(&AbelSeries::scalar(&terms).unwrap(), &SCHEDULE).unwrap();
        let actual = (ext.limit[0].re - 1.5).abs();
        assert!(actual < 4.0 * ext.error, "actual {actual} vs estimate {}", ext.error);
    }

    #[test]
    fn oscillating_tail_is_completed() {
        let w = 0.659;
        let terms: Vec<Complex64> = (0..9)
            .map(|n| {
                let n = n as f64;
                Complex64::new(1.0 + 0.7 * (w * n).cos() + 0.3 * 3f64.powf(-n), 0.0)
            })
            .collect();
        let s = AbelSeries::scalar(&terms).unwrap().with_frequency(w);
        let ext = abel_extrapolate(&s, &SCHEDULE).unwrap();
        assert!((ext.limit[0].re - 1.0).abs() < 1e-2, "{}", ext.limit[0]);
        assert!(!ext.diverged);
    }

    #[test]
    fn short_schedule_is_rejected() {
        let s = AbelSeries::scalar(&cs([1.0, 1.0])).unwrap();
        assert!(matches!(abel_extrapolate(&s, &[0.2, 0.1]), Err(Error::InsufficientSchedule)));
        assert!(matches!(abel_extrapolate(&s, &[0.1, 0.2, 0.05]), Err(Error::InsufficientSchedule)));
    }
}
