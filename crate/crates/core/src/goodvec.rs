//! Good and special good vectors: construction, certification and the sphere-sum
//! bounds they imply.

use num_complex::Complex64;

use crate::boundary::CylinderFn;
use crate::error::{Error, Result};
use crate::freegroup::Word;
use crate::opalg::{c, dim, dominance_margin, eigh, function_of, max_eigenvalue, psd_sqrt, vector_of, Mat, Vector, DOMINANCE_TOL, PSD_TOL};
use crate::par::Pool;
use crate::reps::{PrincipalSeries, Realization};
use crate::transfer::potenza_t;

/// How a certificate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CertMode {
    /// Both dominances checked on the depth block of `v`, which is exact.
    SpecialExact,
    /// `T^power E <= C F` checked on compressions to the observation depth.
    NumericAtDepth { power: usize, observation: usize },
}

#[derive(Clone, Debug)]
pub struct GoodVectorCertificate {
    pub v: CylinderFn,
    /// Witness word; `None` for numeric certificates.
    pub z: Option<Word>,
    pub constant: f64,
    pub depth: usize,
    pub mode: CertMode,
}

/// Smallest eigenvalues of `C mu(1_z) - v ⊗ v̄` and `C mu(1 - 1_z) - v ⊗ v̄`.
#[derive(Clone, Copy, Debug)]
pub struct SpecialGoodCheck {
    pub margin_inside: f64,
    pub margin_outside: f64,
}

impl SpecialGoodCheck {
    pub fn passed(&self) -> bool {
        self.margin_inside >= -DOMINANCE_TOL && self.margin_outside >= -DOMINANCE_TOL
    }

    pub fn worst_margin(&self) -> f64 {
        self.margin_inside.min(self.margin_outside)
    }
}

/// `v = (mu(1_z) - mu(1_z)^2)^{1/2} u` with constant `C = |u|^2`.
///
/// The square root is taken on the depth block of `u`; `mu(1_z)` preserves every
/// `H_n` with `n >= |z|`, so the block computation is exact.
pub fn make_special_good(real: &Realization, u: &CylinderFn, z: &Word) -> Result<(CylinderFn, GoodVectorCertificate)> {
    let n = u.depth();
    if z.len() > n {
        return Err(Error::DepthTooShallow { depth: n, needed: z.len() });
    }
    if n > real.max_depth() {
        return Err(Error::DepthUnavailable("special good vector", n));
    }
    let a = *real.alphabet();
    let m = real.mu_block(&CylinderFn::indicator(a, z), n)?;
    let defect = &m - &m * &m;
    let v = function_of(a, n, &(denoised_sqrt(&defect)? * vector_of(u, n)?));
    let cert = GoodVectorCertificate {
        v: v.clone(),
        z: Some(z.clone()),
        constant: u.norm_sqr(),
        depth: n,
        mode: CertMode::SpecialExact,
    };
    Ok((v, cert))
}

/// PSD square root with eigenvalues below [`PSD_TOL`] set to zero; those are
/// rounding noise of `mu(1_z) - mu(1_z)^2`, whose square root would amplify them.
fn denoised_sqrt(m: &Mat) -> Result<Mat> {
    psd_sqrt(m)?;
    let (values, u) = eigh(m);
    let roots: Vec<Complex64> = values.iter().map(|&x| c(if x > PSD_TOL { x.sqrt() } else { 0.0 })).collect();
    Ok(&u * Mat::from_diagonal(&Vector::from_vec(roots)) * u.adjoint())
}

/// Both dominances `v ⊗ v̄ <= C mu(1_z)` and `v ⊗ v̄ <= C mu(1 - 1_z)` on the
/// depth block `max(depth v, |z|)`; `v ⊗ v̄` vanishes off that block and both
/// right sides preserve it, so the block check is the full operator inequality.
pub fn check_special_good(real: &Realization, v: &CylinderFn, z: &Word, constant: f64) -> Result<SpecialGoodCheck> {
    let a = *real.alphabet();
    let n = v.depth().max(z.len());
    let vv = vector_of(v, n)?;
    let s = &vv * vv.adjoint();
    let inside = CylinderFn::indicator(a, z);
    let outside = &CylinderFn::one(a) - &inside;
    Ok(SpecialGoodCheck {
        margin_inside: dominance_margin(&s, &real.mu_block(&inside, n)?, constant),
        margin_outside: dominance_margin(&s, &real.mu_block(&outside, n)?, constant),
    })
}

/// Relative eigenvalue cutoff separating the range of `F_a` from its kernel.
const RANGE_TOL: f64 = 1e-10;

/// Smallest `C` with `S <= C F` for PSD `S`, `F`, or `None` when `S` is not
/// supported in the range of `F`.
pub fn dominance_constant(s: &Mat, f: &Mat) -> Option<f64> {
    let (values, u) = eigh(f);
    let top = values.last().copied().unwrap_or(0.0).max(0.0);
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > RANGE_TOL * top.max(1.0)).collect();
    let scale = s.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let kernel: Vec<usize> = (0..values.len()).filter(|i| !keep.contains(i)).collect();
    if !kernel.is_empty() {
        let k = Mat::from_columns(&kernel.iter().map(|&i| u.column(i)).collect::<Vec<_>>());
        if max_eigenvalue(&(k.adjoint() * s * &k)) > 1e-9 * scale.max(1.0) {
            return None;
        }
    }
    if keep.is_empty() {
        return Some(0.0);
    }
    let mut r = Mat::from_columns(&keep.iter().map(|&i| u.column(i)).collect::<Vec<_>>());
    for (j, &i) in keep.iter().enumerate() {
        r.column_mut(j).scale_mut(values[i].sqrt().recip());
    }
    Some(max_eigenvalue(&(r.adjoint() * s * &r)).max(0.0))
}

/// Why [`certify_good`] declined.
#[derive(Clone, Debug)]
pub struct Refusal {
    /// Best dominance constant per power; infinite when `T^n E` leaks into a kernel of `F`.
    pub constants: Vec<f64>,
}

#[derive(Clone, Debug)]
pub enum Certification {
    Certified(GoodVectorCertificate),
    Refused(Refusal),
}

impl Certification {
    pub fn certificate(&self) -> Option<&GoodVectorCertificate> {
        match self {
            Self::Certified(c) => Some(c),
            Self::Refused(_) => None,
        }
    }
}

/// Knobs of [`certify_good`].
#[derive(Clone, Copy, Debug)]
pub struct CertifySetup {
    pub max_power: usize,
    pub max_constant: f64,
    pub observation: usize,
}

impl Default for CertifySetup {
    fn default() -> Self {
        Self { max_power: 3, max_constant: 1e6, observation: 3 }
    }
}

/// Searches the smallest power `n` with `T^n E <= C F` for some `C <= max_constant`,
/// where `E_a = v ⊗ v̄` for every letter, on compressions to the observation depth.
/// The power `n + 1` is checked with the same constant before certifying.
pub fn certify_good(real: &Realization, v: &CylinderFn, setup: CertifySetup, pool: &Pool) -> Result<Certification> {
    let m = setup.observation;
    let f = real.eff()?.blocks(m)?;
    let rep = real.rep();
    let best = |n: usize| -> f64 {
        potenza_t(rep, v, None, n, m, pool)
            .iter()
            .zip(&f)
            .map(|(s, fa)| dominance_constant(s, fa).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    };
    let mut constants = Vec::new();
    let mut next = best(0);
    for n in 0..=setup.max_power {
        let here = next;
        next = best(n + 1);
        constants.push(here);
        let constant = here.max(next);
        if constant <= setup.max_constant && next <= here * (1.0 + 1e-6) + 1e-12 {
            return Ok(Certification::Certified(GoodVectorCertificate {
                v: v.clone(),
                z: None,
                constant,
                depth: v.depth(),
                mode: CertMode::NumericAtDepth { power: n, observation: m },
            }));
        }
    }
    Ok(Certification::Refused(Refusal { constants }))
}

/// Sphere sum `sum_{|x| = n} P_m pi(x) v ⊗ conj(P_m pi(x) v)` and its scalar form.
#[derive(Clone, Debug)]
pub struct SphereBound {
    pub n: usize,
    pub lambda_max: f64,
    /// `sum_{|x| = n} |<w, pi(x) v>|^2` for the supplied `w`.
    pub scalar: Option<f64>,
}

/// Compression of the sphere sum to depth `m` (raised to cover `w`).
pub fn sphere_bound(rep: &PrincipalSeries, v: &CylinderFn, n: usize, m: usize, w: Option<&CylinderFn>, pool: &Pool) -> Result<SphereBound> {
    let a = *rep.alphabet();
    let m = w.map_or(m, |w| m.max(w.depth()));
    let terms = potenza_t(rep, v, None, n, m, pool);
    let d = dim(&a, m);
    let mut total = Mat::zeros(d, d);
    for t in &terms {
        total += t;
    }
    if n > 0 {
        // potenza_t with no letter restriction carries a factor q per component.
        total *= c(1.0 / a.q() as f64);
    } else {
        // every component equals v ⊗ v̄ at n = 0
        total *= c(1.0 / a.size() as f64);
    }
    let scalar = match w {
        Some(w) => {
            let x: Vector = vector_of(w, m)?;
            Some((x.adjoint() * &total * &x)[(0, 0)].re)
        }
        None => None,
    };
    Ok(SphereBound { n, lambda_max: max_eigenvalue(&total), scalar })
}

/// Bound on the depth-`m` compression of `sum_{|x| = n} pi(x) v ⊗ conj(pi(x) v)`
/// implied by a numeric certificate: `C / q` from the certified power on and
/// `|S_n| |v|^2` below it. Special certificates carry no power and give `None`.
pub fn certified_sphere_bound(cert: &GoodVectorCertificate, q: usize, n: usize) -> Option<f64> {
    let CertMode::NumericAtDepth { power, .. } = cert.mode else {
        return None;
    };
    Some(if n >= power {
        cert.constant / q as f64
    } else {
        let size = if n == 0 { 1 } else { (q + 1) * q.pow(n as u32 - 1) };
        size as f64 * cert.v.norm_sqr()
    })
}

/// `eps sum_{n <= n_max} e^{-eps n} s_n` for the scalar sphere sums `s_n`.
pub fn abel_partial(scalars: &[f64], eps: f64) -> f64 {
    scalars.iter().enumerate().map(|(n, s)| eps * (-eps * n as f64).exp() * s).sum()
}

/// Uniform bound over `eps in (0, 1]` of the full Abel sum given sphere sums below
/// the certified power and the per-sphere bound `B |w|^2` above it.
pub fn abel_uniform_bound(head: &[f64], per_sphere: f64) -> f64 {
    head.iter().sum::<f64>() + per_sphere / (1.0 - (-1.0f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::Alphabet;

    fn setup() -> (Realization, Realization, Realization) {
        let a = Alphabet::new(2).unwrap();
        let (plus, minus) = Realization::pair(a, 0.3, 3).unwrap();
        let comb = Realization::combined(&plus, &minus).unwrap();
        (plus, minus, comb)
    }

    #[test]
    fn perfect_realization_gives_zero() {
        let (plus, _, _) = setup();
        let a = *plus.alphabet();
        let u = CylinderFn::one(a).promote(1).unwrap();
        let (v, _) = make_special_good(&plus, &u, &Word::parse(&a, "a").unwrap()).unwrap();
        assert!(v.max_abs() < 1e-12);
    }

    #[test]
    fn identity_witness_gives_zero() {
        let (_, _, comb) = setup();
        let a = *comb.alphabet();
        let u = CylinderFn::indicator(a, &Word::parse(&a, "ab").unwrap());
        let (v, _) = make_special_good(&comb, &u, &Word::identity()).unwrap();
        assert!(v.max_abs() < 1e-12);
    }

    #[test]
    fn combined_construction_is_certified() {
        let (_, _, comb) = setup();
        let a = *comb.alphabet();
        let z = Word::parse(&a, "a").unwrap();
        let u = CylinderFn::one(a).promote(1).unwrap();
        let (v, cert) = make_special_good(&comb, &u, &z).unwrap();
        assert!(v.norm() > 1e-3);
        let check = check_special_good(&comb, &v, &z, cert.constant).unwrap();
        assert!(check.passed(), "{check:?}");
        let scaled = v.scale(c(3.0));
        assert!(check_special_good(&comb, &scaled, &z, 9.0 * cert.constant).unwrap().passed());
    }

    #[test]
    fn constant_function_is_not_special_good() {
        let (_, _, comb) = setup();
        let a = *comb.alphabet();
        let one = CylinderFn::one(a);
        for z in ["a", "A", "b", "ab"] {
            let check = check_special_good(&comb, &one, &Word::parse(&a, z).unwrap(), 1.0).unwrap();
            assert!(!check.passed(), "{z}: {check:?}");
        }
    }

    #[test]
    fn dominance_constant_examples() {
        let f = Mat::from_diagonal(&Vector::from_vec(vec![c(2.0), c(1.0), c(0.0)]));
        let s = Mat::from_diagonal(&Vector::from_vec(vec![c(1.0), c(3.0), c(0.0)]));
        assert!((dominance_constant(&s, &f).unwrap() - 3.0).abs() < 1e-12);
        let leak = Mat::from_diagonal(&Vector::from_vec(vec![c(0.0), c(0.0), c(1.0)]));
        assert!(dominance_constant(&leak, &f).is_none());
    }
}
