//! Verification suites behind the subcommands.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boundary::CylinderFn;
use crate::cli::config::ExperimentConfig;
use crate::cli::report::{num, CheckRecord, Report, Status, Table};
use crate::error::Result;
use crate::freegroup::{Alphabet, Letter, Word};
use crate::goodvec::{
    abel_partial, abel_uniform_bound, certified_sphere_bound, certify_good, check_special_good, make_special_good,
    sphere_bound, CertifySetup, Certification, GoodVectorCertificate,
};
use crate::opalg::{c, dim, inclusion_matrix, max_abs, min_eigenvalue, tuple_pair, vector_of, Mat};
use crate::par::Pool;
use crate::realize::{
    boundary_split, eff_finite_dim_obstruction, equivalence_test, is_finite_eff, mu_from_eff, odd_symm_check,
    operator_norm, perfectness_test, verify_obstruction, GnsSpace, Obstruction, GNS_NULL_TOL,
};
use crate::reps::{letter_indicators, PrincipalSeries, Realization, Weights};
use crate::schur::{schur_compare, schur_lhs, schur_rhs, CompactifiedFn, LhsSetup, SchurVectors};
use crate::transfer::{apply_t_vectors, dup_limit_check, ftc_value, potenza_t, push_forward, DupLimSetup};

/// Subcommands in the order `all` runs them.
pub const SUITES: &[&str] = &["verify-rep", "eff", "ftc", "abel", "good-vectors", "gns", "oddsym", "schur"];

/// Shared state for one run.
pub struct Context {
    pub cfg: ExperimentConfig,
    pub alphabet: Alphabet,
    pub pool: Pool,
    pub plus: Realization,
    pub minus: Realization,
    pub combined: Realization,
    plus_minus: Option<f64>,
    pub report: Report,
    pub tables: Vec<Table>,
}

/// `(mu_+(1_a) - mu_+(1_a)^2)^{1/2}`-type construction used throughout: `u = 1` at
/// depth 1 and witness `a` in the combined realization.
pub fn default_special_good(combined: &Realization) -> Result<(CylinderFn, GoodVectorCertificate)> {
    let a = *combined.alphabet();
    make_special_good(combined, &CylinderFn::one(a).promote(1)?, &Word::letter(&a, 0))
}

/// `1_a / |1_a|`.
pub fn default_probe(alphabet: Alphabet) -> CylinderFn {
    let w = CylinderFn::indicator(alphabet, &Word::letter(&alphabet, 0));
    w.scale(c(w.norm().recip()))
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_fn(rng: &mut ChaCha8Rng, a: Alphabet, depth: usize) -> CylinderFn {
    let values = (0..a.sphere_size(depth)).map(|_| random_complex(rng)).collect();
    CylinderFn::from_values(a, depth, values).expect("sphere size")
}

fn random_word(rng: &mut ChaCha8Rng, a: Alphabet, len: usize) -> Word {
    a.unrank(len, rng.random_range(0..a.sphere_size(len)))
}

fn random_fn_in(rng: &mut ChaCha8Rng, a: Alphabet, depths: std::ops::RangeInclusive<usize>) -> CylinderFn {
    let d = rng.random_range(depths);
    random_fn(rng, a, d)
}

fn random_word_in(rng: &mut ChaCha8Rng, a: Alphabet, lens: std::ops::RangeInclusive<usize>) -> Word {
    let len = rng.random_range(lens);
    random_word(rng, a, len)
}

fn random_psd(rng: &mut ChaCha8Rng, d: usize) -> Mat {
    let m = Mat::from_fn(d, d, |_, _| random_complex(rng));
    &m * m.adjoint() * c(1.0 / d as f64)
}

fn rel(x: f64, scale: f64) -> f64 {
    x / scale.abs().max(1.0)
}

impl Context {
    pub fn new(cfg: ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let alphabet = Alphabet::new(cfg.k)?;
        let pool = if cfg.workers == 0 { Pool::global() } else { Pool::with_workers(cfg.workers) };
        let (plus, minus) = pool.install(|| Realization::pair(alphabet, cfg.t, cfg.depth))?;
        let combined = Realization::combined(&plus, &minus)?;
        let report = Report::new(cfg.clone());
        Ok(Self { cfg, alphabet, pool, plus, minus, combined, plus_minus: None, report, tables: Vec::new() })
    }

    fn rng(&self, suite: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed.wrapping_mul(1_000_003).wrapping_add(suite as u64))
    }

    fn rep(&self) -> &PrincipalSeries {
        self.plus.rep()
    }

    /// Records `value <= tol` (or `>= target` when `lower` is set) as pass/fail.
    #[allow(clippy::too_many_arguments)]
    fn record(&mut self, name: &str, anchor: &str, value: f64, target: f64, tol: f64, pass: bool, start: Instant) {
        let ms = self.cfg.timings.then(|| start.elapsed().as_millis() as u64);
        let status = if pass { Status::Pass } else { Status::Fail };
        self.report.checks.push(CheckRecord {
            name: name.into(),
            anchor: anchor.into(),
            status,
            value,
            target,
            tol,
            ms,
        });
    }

    fn bounded(&mut self, name: &str, anchor: &str, value: f64, tol: f64, start: Instant) {
        self.record(name, anchor, value, 0.0, tol, value <= tol, start);
    }

    fn warn(&mut self, name: &str, anchor: &str, value: f64, start: Instant) {
        self.bounded(name, anchor, value, 0.0, start);
        if let Some(last) = self.report.checks.last_mut() {
            if last.status == Status::Fail {
                last.status = Status::Warn;
            }
        }
    }

    /// `(F_+, F_-)` at depth `N`, computed once.
    pub fn plus_minus(&mut self) -> Result<f64> {
        if let Some(v) = self.plus_minus {
            return Ok(v);
        }
        let v = self.plus.eff()?.pair(&self.minus.eff()?, self.cfg.depth)?;
        self.plus_minus = Some(v);
        Ok(v)
    }

    pub fn run_suite(&mut self, name: &str) -> Result<()> {
        let pool = self.pool.clone();
        match name {
            "verify-rep" => pool.install(|| self.verify_rep()),
            "eff" => pool.install(|| self.eff()),
            "ftc" => pool.install(|| self.ftc()),
            "abel" => pool.install(|| self.abel()),
            "good-vectors" => pool.install(|| self.good_vectors()),
            "gns" => pool.install(|| self.gns()),
            "oddsym" => pool.install(|| self.oddsym()),
            "schur" => pool.install(|| self.schur()),
            other => Err(crate::Error::Config { field: "subcommand".into(), reason: format!("unknown `{other}`") }),
        }
    }

    fn verify_rep(&mut self) -> Result<()> {
        const SAMPLES: usize = 200;
        let mut rng = self.rng(1);
        let a = self.alphabet;
        let rep = self.rep().clone();
        let tol = self.cfg.tol("rep");
        let n = self.cfg.depth;

        let start = Instant::now();
        let mut worst: f64 = 0.0;
        for _ in 0..SAMPLES {
            let d = rng.random_range(0..=2);
            let (f, g) = (random_fn(&mut rng, a, d), random_fn(&mut rng, a, d));
            let x = random_word_in(&mut rng, a, 0..=3);
            let moved = rep.act(&x, &f).inner(&rep.act(&x, &g));
            worst = worst.max(rel((moved - f.inner(&g)).norm(), f.norm() * g.norm()));
        }
        self.bounded("rep.unitarity", "<pi(x) f, pi(x) g> = <f, g>", worst, tol, start);

        let start = Instant::now();
        let mut worst: f64 = 0.0;
        for _ in 0..SAMPLES {
            let f = random_fn_in(&mut rng, a, 0..=2);
            let x = random_word_in(&mut rng, a, 0..=2);
            let y = random_word_in(&mut rng, a, 0..=2);
            let lhs = rep.act(&x.mul(&y), &f);
            let rhs = rep.act(&x, &rep.act(&y, &f));
            worst = worst.max(rel(lhs.max_abs_diff(&rhs), f.max_abs()));
        }
        self.bounded("rep.homomorphism", "pi(xy) = pi(x) pi(y)", worst, tol, start);

        let start = Instant::now();
        let mut worst: f64 = 0.0;
        for _ in 0..SAMPLES {
            let x = random_word_in(&mut rng, a, 0..=3);
            let y = random_word_in(&mut rng, a, 0..=3);
            let omega = random_word(&mut rng, a, x.len() + y.len() + 2 * x.mul(&y).len().max(1));
            let lhs = rep.poisson(&x.mul(&y), &omega)?;
            let rhs = rep.poisson(&x, &omega)? * rep.poisson(&y, &x.inverse().mul(&omega))?;
            worst = worst.max(rel(lhs - rhs, lhs));
        }
        self.bounded("rep.poisson_cocycle", "P(xy, w) = P(x, w) P(y, x^-1 w)", worst, tol, start);

        let start = Instant::now();
        let mut worst: f64 = 0.0;
        for _ in 0..SAMPLES {
            let x = random_word_in(&mut rng, a, 0..=4);
            let nu = crate::boundary::depth_measure(&a, x.len());
            let mut total = 0.0;
            for w in crate::freegroup::Sphere::new(a, x.len(), None, None).words() {
                total += rep.poisson(&x, &w)? * nu;
            }
            worst = worst.max((total - 1.0).abs());
        }
        self.bounded("rep.poisson_integral", "int P(x, w) dnu(w) = 1", worst, tol, start);

        for (label, real) in [("plus", self.plus.clone()), ("minus", self.minus.clone())] {
            let start = Instant::now();
            let mut worst: f64 = 0.0;
            let top = n.min(5);
            for _ in 0..SAMPLES {
                let len = rng.random_range(1..=top.min(2));
                let x = random_word(&mut rng, a, len);
                let gd = rng.random_range(0..=(top - len).min(2));
                let fd = rng.random_range(0..=(top - len).min(1));
                let g = random_fn(&mut rng, a, gd);
                let f = random_fn(&mut rng, a, fd);
                let lhs = rep.act(&x, &real.mu_apply(&g, &rep.act(&x.inverse(), &f))?);
                let rhs = real.mu_apply(&g.translate(&x), &f)?;
                worst = worst.max(rel(lhs.max_abs_diff(&rhs), g.max_abs() * f.max_abs()));
            }
            self.bounded(
                &format!("rep.covariance_{label}"),
                "pi(x) mu(G) pi(x)^-1 = mu(lambda(x) G)",
                worst,
                tol,
                start,
            );
        }

        let start = Instant::now();
        let intw = self.plus.intertwiner().clone();
        let defect = intw.unitarity_defect().max(intw.residuals().iter().copied().fold(0.0, f64::max));
        self.bounded("rep.intertwiner", "I pi_z(x) = pi_{1-z}(x) I, I* I = Id", defect, tol, start);
        let start = Instant::now();
        self.record(
            "rep.intertwiner_unique",
            "dim {I : I pi_z = pi_{1-z} I} = 1",
            intw.solution_dim() as f64,
            1.0,
            0.0,
            intw.solution_dim() == 1,
            start,
        );
        Ok(())
    }

    fn eff(&mut self) -> Result<()> {
        let mut rng = self.rng(2);
        let a = self.alphabet;
        let rep = self.rep().clone();
        let n = self.cfg.depth;
        let tol = self.cfg.tol("realization");
        let fp = self.plus.eff()?;
        let fm = self.minus.eff()?;
        let fc = self.combined.eff()?;

        let start = Instant::now();
        let mut worst: f64 = 0.0;
        for depth in 1..=n {
            let blocks = fp.blocks(depth)?;
            let d = dim(&a, depth);
            let total = blocks.iter().fold(Mat::zeros(d, d), |acc, b| acc + b);
            worst = worst.max(max_abs(&(total - Mat::identity(d, d))));
            for (i, x) in blocks.iter().enumerate() {
                for (j, y) in blocks.iter().enumerate() {
                    let target = if i == j { x.clone() } else { Mat::zeros(d, d) };
                    worst = worst.max(max_abs(&(x * y - target)));
                }
            }
        }
        self.bounded("eff.plus_projections", "F_a F_b = delta_ab F_a, sum_a F_a = Id", worst, tol, start);

        let tol_self = self.cfg.tol("self_pairing");
        for (label, f) in [("plus", &fp), ("minus", &fm)] {
            let start = Instant::now();
            let worst = (1..=n).map(|d| f.pair(f, d)).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
            self.bounded(&format!("eff.{label}_self_pairing"), "(F, F) = 0 for perfect F", worst, tol_self, start);
        }

        let start = Instant::now();
        let mut worst: f64 = 0.0;
        for d in 1..=n {
            worst = worst.max((fc.pair(&fc, d)? - 0.5 * fp.pair(&fm, d)?).abs());
        }
        self.bounded("eff.combined_pairing", "(F, F) = (F_+, F_-) / 2 for F = (F_+ + F_-) / 2", worst, tol, start);

        let tol_t = self.cfg.tol("transfer");
        let start = Instant::now();
        let mut worst: f64 = 0.0;
        let indicators = letter_indicators(a);
        for (f, real) in [(&fp, &self.plus), (&fm, &self.minus)] {
            for _ in 0..50 {
                let g = random_fn_in(&mut rng, a, 0..=n.saturating_sub(2).min(3));
                let tf = apply_t_vectors(&rep, f, &g)?;
                for (l, tg) in a.letters().zip(&tf) {
                    let direct = real.mu_apply(&indicators[l as usize], &g)?;
                    worst = worst.max(rel(tg.max_abs_diff(&direct), g.max_abs()));
                }
            }
        }
        self.bounded("eff.fixed_point", "T F = F for F = F_+, F_-", worst, tol_t, start);

        let start = Instant::now();
        let d = n.saturating_sub(1).min(2);
        let e = inclusion_matrix(&a, d, d + 1);
        let embed = |f: &[Mat]| f.iter().map(|m| &e * m * e.adjoint()).collect::<Vec<_>>();
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let f: Vec<Mat> = a.letters().map(|_| random_psd(&mut rng, dim(&a, d))).collect();
            let g: Vec<Mat> = a.letters().map(|_| random_psd(&mut rng, dim(&a, d))).collect();
            let lhs = tuple_pair(&push_forward(&rep, &f, d), &embed(&g))?;
            let rhs = tuple_pair(&embed(&f), &push_forward(&rep, &g, d))?;
            worst = worst.max(rel(lhs - rhs, lhs));
        }
        self.bounded("eff.adjointness", "(T F, G) = (F, T G)", worst, self.cfg.tol("adjoint"), start);

        let start = Instant::now();
        let mut worst: f64 = 0.0;
        let depth_v = 1;
        for power in 0..=3.min(n.saturating_sub(depth_v)) {
            let v = random_fn(&mut rng, a, depth_v);
            let b = rng.random_range(0..a.size()) as Letter;
            let vv = vector_of(&v, depth_v)?;
            let d0 = dim(&a, depth_v);
            let mut tuple: Vec<Mat> =
                a.letters().map(|l| if l == b { &vv * vv.adjoint() } else { Mat::zeros(d0, d0) }).collect();
            for step in 0..power {
                tuple = push_forward(&rep, &tuple, depth_v + step);
            }
            let enumerated = potenza_t(&rep, &v, Some(b), power, depth_v + power, &self.pool);
            for (x, y) in tuple.iter().zip(&enumerated) {
                worst = worst.max(rel(max_abs(&(x - y)), max_abs(x)));
            }
        }
        self.bounded("eff.two_path", "T^n F_0 by iteration = sum over words (n <= 3)", worst, tol_t, start);

        let start = Instant::now();
        let mut worst: f64 = 0.0;
        if n >= 3 {
            for real in [&self.plus, &self.minus] {
                let f = real.eff()?;
                for _ in 0..5 {
                    let g = random_fn(&mut rng, a, 2);
                    let regen = mu_from_eff(&f, &rep, &g)?.block(2)?;
                    worst = worst.max(rel(max_abs(&(regen - real.mu_block(&g, 2)?)), g.max_abs()));
                }
            }
        }
        self.bounded("eff.mu_round_trip", "mu(1_{xa}) = pi(x) F_a pi(x)^-1", worst, tol, start);

        let start = Instant::now();
        let pp = perfectness_test(&fp)?;
        let pm = perfectness_test(&fm)?;
        let worst = pp.idempotent_defect.max(pm.idempotent_defect);
        let ok = pp.perfect && pm.perfect && pp.consistent && pm.consistent;
        self.record("eff.perfect", "F_a^2 = F_a, sum_a F_a = Id", worst, 0.0, 1e-8, ok, start);

        let start = Instant::now();
        let pc = perfectness_test(&fc)?;
        let witness = self.cfg.tol("imperfect_witness");
        self.record(
            "eff.combined_imperfect",
            "|F_a^2 - F_a| > 0 for F = (F_+ + F_-) / 2",
            pc.idempotent_defect,
            witness,
            witness,
            !pc.perfect && pc.consistent && pc.idempotent_defect > witness,
            start,
        );

        let start = Instant::now();
        let same = equivalence_test(&fp, &fp)?;
        let other = equivalence_test(&fp, &fm)?;
        self.record(
            "eff.equivalence",
            "perfect F, G equivalent iff (F, G) = 0",
            other.pairing,
            0.0,
            1e-8,
            same.equivalent && !other.equivalent,
            start,
        );

        let start = Instant::now();
        let mut accepted = 0usize;
        let mut certified = true;
        for k in 2..=3usize {
            let ak = Alphabet::new(k)?;
            for d in 1..=8usize {
                let o = eff_finite_dim_obstruction(d, k);
                certified &= matches!(o, Obstruction::Infeasible { .. }) && verify_obstruction(k, d, &o);
                let raw: Vec<Mat> = ak.letters().map(|_| random_psd(&mut rng, d)).collect();
                let total = raw.iter().fold(Mat::zeros(d, d), |acc, m| acc + m);
                let (values, u) = crate::opalg::eigh(&total);
                let inv_sqrt = &u
                    * Mat::from_diagonal(&crate::opalg::Vector::from_iterator(d, values.iter().map(|v| c(v.sqrt().recip()))))
                    * u.adjoint();
                let f: Vec<Mat> = raw.iter().map(|m| &inv_sqrt * m * &inv_sqrt).collect();
                let gens: Vec<Mat> = (0..k)
                    .map(|_| {
                        let m = Mat::from_fn(d, d, |_, _| random_complex(&mut rng));
                        m.qr().q()
                    })
                    .collect();
                accepted += usize::from(is_finite_eff(&f, &gens));
            }
        }
        certified &= eff_finite_dim_obstruction(0, 2) == Obstruction::Feasible;
        self.record(
            "eff.finite_dim_obstruction",
            "sum_a tr F_a = d and tr F_a = sum_{b != a^-1} tr F_b force d = 0",
            accepted as f64,
            0.0,
            0.0,
            certified && accepted == 0,
            start,
        );
        Ok(())
    }

    fn ftc(&mut self) -> Result<()> {
        let start = Instant::now();
        let n = self.cfg.depth;
        let depths: Vec<usize> = (0..=n).collect();
        let value = ftc_value(&self.plus.eff()?, &self.minus.eff()?, &depths)?;
        self.plus_minus = Some(value.value);
        let mut table = Table::new("ftc.csv", &["depth", "value"]);
        for (d, v) in value.depths.iter().zip(&value.values) {
            table.push(vec![d.to_string(), num(*v)]);
        }
        self.tables.push(table);
        let drops = value.values.windows(2).map(|w| (w[0] - w[1]).max(0.0)).fold(0.0, f64::max);
        self.bounded("ftc.nondecreasing", "(F_+, F_-)_N <= (F_+, F_-)_{N+1}", drops, 1e-12, start);
        let tol = self.cfg.tol("ftc_increment");
        self.bounded("ftc.converged", "|(F_+, F_-)_N - (F_+, F_-)_{N-1}| / (F_+, F_-)_N", value.last_increment, tol, start);
        self.record("ftc.positive", "(F_+, F_-) > 0", value.value, 0.0, 0.0, value.value > 0.0 && value.value.is_finite(), start);
        Ok(())
    }

    fn abel(&mut self) -> Result<()> {
        let start = Instant::now();
        let plus_minus = self.plus_minus()?;
        let (v, _) = default_special_good(&self.combined)?;
        let schedule = self.cfg.eps_schedule.clone();
        let setup = DupLimSetup {
            plus: &self.plus,
            minus: &self.minus,
            n_obs: self.cfg.n_obs,
            n_max: self.cfg.n_max,
            schedule: &schedule,
            plus_minus,
        };
        let mut table = Table::new("abel.csv", &["letter", "max_rel_err", "abel_error", "tail_bound", "tail_excess", "diverged"]);
        let (mut worst, mut excess, mut diverged) = (0.0f64, f64::NEG_INFINITY, false);
        for b in self.alphabet.letters() {
            let r = dup_limit_check(&v, b, &setup, &self.pool)?;
            worst = worst.max(r.max_rel_err);
            excess = excess.max(r.tail_excess);
            diverged |= r.diverged;
            table.push(vec![
                self.alphabet.letter_char(b).to_string(),
                num(r.max_rel_err),
                num(r.abel_error),
                num(r.tail_bound),
                num(r.tail_excess),
                r.diverged.to_string(),
            ]);
        }
        self.tables.push(table);
        let tol = self.cfg.tol("duplicity");
        self.bounded(
            "abel.duplicity_limit",
            "lim eps sum e^{-eps n} T^n F_0 = [(F_0,F_-) F_+ + (F_0,F_+) F_-] / (F_+,F_-)",
            worst,
            tol,
            start,
        );
        self.bounded("abel.tail_consistent", "|completed tail| <= eps e^{-eps(n+1)} sup|s| / (1 - e^{-eps})", excess, 0.0, start);
        self.warn("abel.divergence_flag", "no linear drift in the terms", f64::from(u8::from(diverged)), start);
        Ok(())
    }

    fn good_vectors(&mut self) -> Result<()> {
        let mut rng = self.rng(5);
        let a = self.alphabet;
        let rep = self.rep().clone();
        let tol = self.cfg.tol("good_vector");
        let q = a.q();

        let start = Instant::now();
        let (v, cert) = default_special_good(&self.combined)?;
        let mut worst = check_special_good(&self.combined, &v, cert.z.as_ref().expect("witness"), cert.constant)?.worst_margin();
        for z in ["B", "ab"] {
            let z = Word::parse(&a, z)?;
            let u = random_fn(&mut rng, a, 2);
            let (w, c2) = make_special_good(&self.combined, &u, &z)?;
            worst = worst.min(check_special_good(&self.combined, &w, &z, c2.constant)?.worst_margin());
        }
        self.record("gv.special_exact", "v ⊗ v̄ <= |u|^2 mu(1_z), v ⊗ v̄ <= |u|^2 mu(1 - 1_z)", worst, 0.0, tol, worst >= -tol, start);

        let start = Instant::now();
        let mut largest: f64 = 0.0;
        for real in [&self.plus, &self.minus] {
            let u = random_fn(&mut rng, a, 2);
            largest = largest.max(make_special_good(real, &u, &Word::parse(&a, "a")?)?.0.max_abs());
        }
        let u = random_fn(&mut rng, a, 2);
        largest = largest.max(make_special_good(&self.combined, &u, &Word::identity())?.0.max_abs());
        self.bounded("gv.zero_for_perfect", "perfect realization or z = e gives v = 0", largest, tol, start);

        let start = Instant::now();
        let mut best = f64::NEG_INFINITY;
        for l in a.letters() {
            let check = check_special_good(&self.combined, &CylinderFn::one(a), &Word::letter(&a, l), 1.0)?;
            best = best.max(check.worst_margin());
        }
        self.record("gv.constant_rejected", "1 ⊗ 1 is not dominated by mu(1_a), mu(1 - 1_a)", best, 0.0, tol, best < -tol, start);

        let start = Instant::now();
        let setup = CertifySetup { observation: self.cfg.n_obs, ..CertifySetup::default() };
        let certification = certify_good(&self.combined, &v, setup, &self.pool)?;
        let Certification::Certified(good) = certification else {
            self.record("gv.certified", "T^N E <= C F", f64::INFINITY, 0.0, 0.0, false, start);
            return Ok(());
        };
        self.record("gv.certified", "T^N E <= C F", good.constant, 0.0, setup.max_constant, true, start);

        let start = Instant::now();
        let moved = rep.act(&Word::letter(&a, 2), &v);
        let ok = certify_good(&self.combined, &moved, setup, &self.pool)?.certificate().is_some();
        self.record("gv.translate_certified", "good vectors are stable under pi(x)", f64::from(u8::from(ok)), 1.0, 0.0, ok, start);

        let start = Instant::now();
        let m = self.cfg.n_obs;
        let probes: Vec<CylinderFn> = (0..5).map(|_| random_fn(&mut rng, a, m.min(2))).collect();
        let mut table = Table::new("good_vectors.csv", &["n", "lambda_max", "bound"]);
        let mut ratio: f64 = 0.0;
        let mut scalar_ratio: f64 = 0.0;
        let mut scalars: Vec<Vec<f64>> = vec![Vec::new(); probes.len()];
        for n in 0..=self.cfg.n_max {
            let bound = certified_sphere_bound(&good, q, n).expect("numeric certificate");
            let sb = sphere_bound(&rep, &v, n, m, None, &self.pool)?;
            ratio = ratio.max(sb.lambda_max / bound);
            table.push(vec![n.to_string(), num(sb.lambda_max), num(bound)]);
            for (w, acc) in probes.iter().zip(scalars.iter_mut()) {
                let s = sphere_bound(&rep, &v, n, m, Some(w), &self.pool)?.scalar.expect("probe");
                scalar_ratio = scalar_ratio.max(s / (bound * w.norm_sqr()));
                acc.push(s);
            }
        }
        self.tables.push(table);
        self.bounded("gv.sphere_bound", "sum_{|x|=n} pi(x) v ⊗ conj(pi(x) v) <= (C / q) Id", ratio - 1.0, tol, start);
        self.bounded("gv.sphere_scalar", "sum_{|x|=n} |<w, pi(x) v>|^2 <= (C / q) |w|^2", scalar_ratio - 1.0, tol, start);

        let start = Instant::now();
        let power = match good.mode {
            crate::goodvec::CertMode::NumericAtDepth { power, .. } => power,
            crate::goodvec::CertMode::SpecialExact => 0,
        };
        let mut worst: f64 = 0.0;
        for (w, s) in probes.iter().zip(&scalars) {
            let per_sphere = certified_sphere_bound(&good, q, power).expect("numeric certificate") * w.norm_sqr();
            let cap = abel_uniform_bound(&s[..power.min(s.len())], per_sphere);
            for eps in [1.0, 0.5, 0.1, 0.05] {
                worst = worst.max(abel_partial(s, eps) / cap);
            }
        }
        self.bounded("gv.abel_uniform", "eps sum e^{-eps |x|} |<w, pi(x) v>|^2 <= C(v, w)", worst - 1.0, tol, start);

        let start = Instant::now();
        let depth = self.cfg.depth.min(3);
        let split = boundary_split(&self.combined, depth, depth)?;
        let plus_split = boundary_split(&self.plus, depth, depth)?;
        let full = dim(&a, depth);
        let ok = split.bad.ncols() == 0 && plus_split.bad.ncols() == full;
        self.record(
            "gv.boundary_split",
            "H_B = {w : mu(1_z) w = mu(1_z)^2 w for all z}",
            split.bad.ncols() as f64,
            0.0,
            0.0,
            ok,
            start,
        );
        Ok(())
    }

    fn gns(&mut self) -> Result<()> {
        let mut rng = self.rng(6);
        let a = self.alphabet;
        let tol = self.cfg.tol("gns");
        let gens = letter_indicators(a);
        let basis: Vec<CylinderFn> = (0..dim(&a, 1))
            .map(|i| {
                let coords: Vec<Complex64> = (0..dim(&a, 1)).map(|j| c(f64::from(u8::from(i == j)))).collect();
                CylinderFn::from_coords(a, 1, &coords).expect("coordinates")
            })
            .collect();
        let build = |real: &Realization| GnsSpace::build(real, &gens, &basis, 1, GNS_NULL_TOL);

        let start = Instant::now();
        let plus = build(&self.plus)?;
        self.record(
            "gns.multiplication_collapse",
            "G ⊗ v ~ G v for mu = mu_+",
            plus.dimension() as f64,
            dim(&a, 1) as f64,
            0.0,
            plus.dimension() == dim(&a, 1),
            start,
        );

        let start = Instant::now();
        let reals = [self.plus.clone(), self.minus.clone(), self.combined.clone()];
        let spaces = reals.iter().map(build).collect::<Result<Vec<_>>>()?;
        let worst = spaces.iter().map(|s| -s.min_gram_eigenvalue()).fold(f64::NEG_INFINITY, f64::max);
        self.bounded("gns.gram_psd", "sum <mu(H_k* G_j) v_j, v_k> >= 0", worst, tol, start);

        let start = Instant::now();
        let iso = spaces.iter().map(|s| s.isometry_defect()).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
        let sub = Realization::mixture(self.rep().clone(), self.plus.intertwiner().clone(), Weights { plus: 0.6, minus: 0.2 });
        let sub_defect = build(&sub)?.isometry_defect()?;
        self.record(
            "gns.isometry_iff_unital",
            "|iota v| = |v| iff mu(1) = Id",
            iso,
            0.0,
            tol,
            iso <= tol && sub_defect > 1e-3,
            start,
        );

        let start = Instant::now();
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let (s, r) = (rng.random_range(0.0..0.5), rng.random_range(0.0..0.5));
            let (s1, r1) = (s + rng.random_range(0.0..0.5), r + rng.random_range(0.0..0.5));
            let mk = |w: Weights| Realization::mixture(self.rep().clone(), self.plus.intertwiner().clone(), w);
            let small = build(&mk(Weights { plus: s, minus: r }))?;
            let big = build(&mk(Weights { plus: s1, minus: r1 }))?;
            worst = worst.max(-min_eigenvalue(&(big.gram() - small.gram())));
        }
        self.bounded("gns.monotone", "mu <= mu_1 implies Gram(mu) <= Gram(mu_1)", worst, tol, start);

        let start = Instant::now();
        let mut worst = f64::NEG_INFINITY;
        let mut reproduction: f64 = 0.0;
        for _ in 0..5 {
            let g = random_fn(&mut rng, a, 1);
            for (real, space) in reals.iter().zip(&spaces) {
                worst = worst.max(operator_norm(&space.multiplication(&g)?) - g.max_abs());
                reproduction = reproduction.max(space.reproduction_defect(real, &g)?);
            }
        }
        self.bounded("gns.norm_bound", "|pi'(G)| <= max |G|", worst, tol, start);
        self.bounded("gns.reproduces_mu", "<pi'(G) iota v, iota w> = <mu(G) v, w>", reproduction, tol, start);

        let start = Instant::now();
        let mut worst: f64 = 0.0;
        if self.cfg.depth >= 2 {
            for (real, space) in reals.iter().zip(&spaces) {
                for l in a.letters() {
                    worst = worst.max(space.unitarity_defect(real, &Word::letter(&a, l))?);
                }
            }
        }
        self.bounded("gns.unitary", "<pi'(x) X, pi'(x) Y> = <X, Y>", worst, tol, start);
        Ok(())
    }

    fn oddsym(&mut self) -> Result<()> {
        let start = Instant::now();
        let tol = self.cfg.tol("oddsym");
        let depth = self.cfg.depth.min(3);
        let blocks = odd_symm_check(&self.plus, &self.minus, depth)?;
        let mut table = Table::new("oddsym.csv", &["depth", "first", "lower", "upper", "second"]);
        for b in &blocks {
            table.push(vec![b.depth.to_string(), num(b.first), num(b.lower), num(b.upper), num(b.second)]);
        }
        self.tables.push(table);
        let spread = blocks.iter().map(|b| b.spread()).fold(0.0, f64::max);
        self.bounded("oddsym.four_way", "(F_1,F_1) = sum |pi'_21(1_a)|^2 = sum |pi'_12(1_a)|^2 = (F_2,F_2)", spread, tol, start);
        let off = blocks.iter().map(|b| b.identity_off_block).fold(0.0, f64::max);
        self.bounded("oddsym.identity_block", "pi'_21(1) = 0", off, tol, start);
        let start = Instant::now();
        let doubled = odd_symm_check(&self.plus, &self.plus, depth)?;
        let worst = doubled
            .iter()
            .map(|b| [b.first, b.lower, b.upper, b.second].into_iter().fold(0.0f64, |m, x| m.max(x.abs())))
            .fold(0.0, f64::max);
        self.bounded("oddsym.doubly_perfect", "iota_- = iota_+ gives (F_1, F_1) = 0", worst, tol, start);
        Ok(())
    }

    fn schur(&mut self) -> Result<()> {
        let mut rng = self.rng(8);
        let a = self.alphabet;
        let rep = self.rep().clone();
        let plus_minus = self.plus_minus()?;
        let tol = self.cfg.tol("schur");
        let (v0, _) = default_special_good(&self.combined)?;
        let v = rep.act(&Word::letter(&a, 2), &v0);
        let w = default_probe(a);
        let schedule = self.cfg.eps_schedule.clone();
        let setup = LhsSetup { n_max: self.cfg.n_max, schedule: &schedule, skip: 1 };
        let one = CompactifiedFn::one(a);
        let ga = CompactifiedFn::indicator(a, &Word::letter(&a, 0));
        let gb = one.combine(c(1.0), &CompactifiedFn::indicator(a, &Word::letter(&a, 2)), c(-1.0));
        let mut table = Table::new("schur.csv", &["case", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_err", "abel_error"]);

        let cases = [("schur.ab", &ga, &gb, "lim eps sum e^{-eps|x|} 1_a(x) (1-1_b)(x^-1) |<w,pi(x)v>|^2 = A [<mu_+(1_a)w,w><mu_-(1-1_b)v,v> + <mu_-(1_a)w,w><mu_+(1-1_b)v,v>]"),
            ("schur.one", &one, &one, "lim eps sum e^{-eps|x|} |<w,pi(x)v>|^2 = 2 A |w|^2 |v|^2")];
        for (name, g, gt, anchor) in cases {
            let start = Instant::now();
            let r = schur_compare(&self.plus, &self.minus, plus_minus, g, gt, &w, &v, setup, &self.pool)?;
            table.push(vec![name.into(), num(r.lhs.limit.re), num(r.lhs.limit.im), num(r.rhs.re), num(r.rhs.im), num(r.rel_err), num(r.lhs.error)]);
            self.bounded(name, anchor, r.rel_err, tol, start);
        }

        let start = Instant::now();
        let z = Word::letter(&a, 2);
        let moved_g = ga.translate(&z);
        let lhs_moved = schur_lhs(&rep, &moved_g, &gb, SchurVectors::diagonal(&w, &v), setup, &self.pool)?;
        let pulled = rep.act(&z.inverse(), &w);
        let lhs_pulled = schur_lhs(&rep, &ga, &gb, SchurVectors::diagonal(&pulled, &v), setup, &self.pool)?;
        let rhs = schur_rhs(&self.plus, &self.minus, &moved_g, &gb, SchurVectors::diagonal(&w, &v), plus_minus)?;
        let diff = (lhs_moved.limit - lhs_pulled.limit).norm() / lhs_pulled.limit.norm().max(f64::MIN_POSITIVE);
        let against_rhs = (lhs_moved.limit - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
        table.push(vec!["schur.translation".into(), num(lhs_moved.limit.re), num(lhs_moved.limit.im), num(rhs.re), num(rhs.im), num(against_rhs), num(lhs_moved.error)]);
        self.tables.push(table);
        self.bounded("schur.translation", "LHS(lambda(z) G, w) = LHS(G, pi(z^-1) w)", diff.max(against_rhs), tol, start);

        let start = Instant::now();
        let finite = CompactifiedFn::finite(a, [(Word::identity(), c(1.0)), (Word::letter(&a, 0), c(2.0))]);
        let vanishing = schur_lhs(&rep, &finite, &one, SchurVectors::diagonal(&w, &v), LhsSetup { skip: 0, ..setup }, &self.pool)?;
        self.bounded("schur.finite_support", "G with finite support and G|∂Γ = 0 gives 0", vanishing.limit.norm(), 1e-9, start);

        let start = Instant::now();
        let w2 = random_fn(&mut rng, a, 1);
        let mixed = schur_lhs(&rep, &ga, &gb, SchurVectors { v1: &w, v2: &w2, v3: &v, v4: &v }, setup, &self.pool)?.limit;
        let mut polar = c(0.0);
        for k in 0..4 {
            let phase = Complex64::i().powu(k);
            let s = &w + &(&w2 * phase);
            polar += phase * schur_lhs(&rep, &ga, &gb, SchurVectors::diagonal(&s, &v), setup, &self.pool)?.limit;
        }
        polar *= c(0.25);
        let polar_err = (mixed - polar).norm() / mixed.norm().max(1e-300);
        self.bounded("schur.polarization", "L(w1, w2) = (1/4) sum_k i^k L(w1 + i^k w2, w1 + i^k w2)", polar_err, 1e-8, start);

        let start = Instant::now();
        let vs = SchurVectors { v1: &w, v2: &w2, v3: &v, v4: &v0 };
        let forward = schur_rhs(&self.plus, &self.minus, &ga, &gb, vs, plus_minus)?;
        let swapped = schur_rhs(&self.minus, &self.plus, &ga, &gb, vs, plus_minus)?;
        self.bounded("schur.rhs_symmetry", "RHS invariant under exchanging the two realizations", (forward - swapped).norm(), 1e-12, start);
        Ok(())
    }
}
