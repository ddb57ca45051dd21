//! Invariants over random inputs, one group per module.

use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;

use duplicity::boundary::{depth_measure, CylinderFn};
use duplicity::cli::config::ExperimentConfig;
use duplicity::freegroup::{Alphabet, Word};
use duplicity::goodvec::{check_special_good, make_special_good};
use duplicity::opalg::{c, max_abs, min_eigenvalue, psd_sqrt, trace_pair, tuple_pair, Mat};
use duplicity::realize::{eff_finite_dim_obstruction, verify_obstruction, Obstruction};
use duplicity::reps::{PrincipalSeries, Realization};
use duplicity::schur::CompactifiedFn;
use duplicity::transfer::push_forward;

const K: usize = 2;
const DEPTH: usize = 3;

fn alphabet() -> Alphabet {
    Alphabet::new(K).unwrap()
}

fn rep() -> PrincipalSeries {
    PrincipalSeries::new(alphabet(), 0.3)
}

fn realizations() -> &'static (Realization, Realization, Realization) {
    static R: OnceLock<(Realization, Realization, Realization)> = OnceLock::new();
    R.get_or_init(|| {
        let (plus, minus) = Realization::pair(alphabet(), 0.3, DEPTH).unwrap();
        let combined = Realization::combined(&plus, &minus).unwrap();
        (plus, minus, combined)
    })
}

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    (0..=max_len, any::<u64>()).prop_map(|(n, r)| {
        let a = alphabet();
        a.unrank(n, (r % a.sphere_size(n) as u64) as usize)
    })
}

fn function(max_depth: usize) -> impl Strategy<Value = CylinderFn> {
    (0..=max_depth).prop_flat_map(|d| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), alphabet().sphere_size(d)).prop_map(move |v| {
            CylinderFn::from_values(alphabet(), d, v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).unwrap()
        })
    })
}

fn psd(d: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * d).prop_map(move |v| {
        let m = Mat::from_iterator(d, d, v.into_iter().map(|(re, im)| Complex64::new(re, im)));
        &m * m.adjoint()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn words_form_a_group(x in word(4), y in word(4), z in word(4)) {
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert!(x.mul(&x.inverse()).is_empty());
        prop_assert!(x.mul(&y).len() <= x.len() + y.len());
    }

    #[test]
    fn rank_inverts_unrank(n in 0usize..5, r in any::<u64>()) {
        let a = alphabet();
        let r = (r % a.sphere_size(n) as u64) as usize;
        prop_assert_eq!(a.rank(a.unrank(n, r).letters()), r);
    }

    #[test]
    fn promotion_preserves_inner_products(f in function(2), g in function(2), up in 0usize..2) {
        let d = f.depth().max(g.depth()) + up;
        let lifted = f.promote(d).unwrap().inner(&g.promote(d).unwrap());
        prop_assert!((lifted - f.inner(&g)).norm() < 1e-12);
        prop_assert!(f.promote(d).unwrap().coarsen(f.depth()).unwrap().max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn cylinder_indicators_integrate_to_their_measure(x in word(4)) {
        let integral = CylinderFn::indicator(alphabet(), &x).integral();
        prop_assert!((integral.re - depth_measure(&alphabet(), x.len())).abs() < 1e-14);
    }

    #[test]
    fn principal_series_is_a_unitary_representation(f in function(2), g in function(2), x in word(3), y in word(3)) {
        let r = rep();
        let moved = r.act(&x, &f).inner(&r.act(&x, &g));
        prop_assert!((moved - f.inner(&g)).norm() < 1e-10);
        let composed = r.act(&x.mul(&y), &f).max_abs_diff(&r.act(&x, &r.act(&y, &f)));
        prop_assert!(composed < 1e-9 * f.max_abs().max(1.0));
    }

    #[test]
    fn coarse_action_is_the_projection(f in function(2), x in word(3), m in 0usize..4) {
        let r = rep();
        let full = r.act(&x, &f);
        let exact = if m <= full.depth() { full.coarsen(m).unwrap() } else { full.promote(m).unwrap() };
        prop_assert!(r.act_coarse(&x, &f, m).max_abs_diff(&exact) < 1e-10);
    }

    #[test]
    fn psd_square_root_squares_back(m in psd(4)) {
        let r = psd_sqrt(&m).unwrap();
        prop_assert!(max_abs(&(&r * &r - &m)) < 1e-9);
    }

    #[test]
    fn trace_pairing_is_nonnegative(s in psd(4), t in psd(4)) {
        prop_assert!(trace_pair(&s, &t).unwrap() >= -1e-10);
    }

    #[test]
    fn push_forward_preserves_positivity_and_is_self_adjoint(
        f in prop::collection::vec(psd(4), 4),
        g in prop::collection::vec(psd(4), 4),
    ) {
        let r = rep();
        let a = alphabet();
        let tf = push_forward(&r, &f, 1);
        for m in &tf {
            prop_assert!(min_eigenvalue(m) > -1e-9);
        }
        let e = duplicity::opalg::inclusion_matrix(&a, 1, 2);
        let embed = |x: &[Mat]| x.iter().map(|m| &e * m * e.adjoint()).collect::<Vec<_>>();
        let lhs = tuple_pair(&tf, &embed(&g)).unwrap();
        let rhs = tuple_pair(&embed(&f), &push_forward(&r, &g, 1)).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-8 * lhs.abs().max(1.0));
    }

    #[test]
    fn constructed_special_good_vectors_certify(f in function(2), z in word(2)) {
        prop_assume!(!z.is_empty() && z.len() <= f.depth());
        let (_, _, combined) = realizations();
        let (v, cert) = make_special_good(combined, &f, &z).unwrap();
        let check = check_special_good(combined, &v, &z, cert.constant).unwrap();
        prop_assert!(check.passed(), "margins {:?}", check);
    }

    #[test]
    fn obstruction_certificates_verify(k in 2usize..5, d in 1usize..16) {
        let o = eff_finite_dim_obstruction(d, k);
        let infeasible = matches!(o, Obstruction::Infeasible { .. });
        prop_assert!(infeasible);
        prop_assert!(verify_obstruction(k, d, &o));
    }

    #[test]
    fn translations_compose(x in word(2), y in word(2), w in word(3), g in word(2)) {
        let a = alphabet();
        let f = CompactifiedFn::indicator(a, &g).combine(c(1.0), &CompactifiedFn::finite(a, [(g.clone(), c(3.0))]), c(1.0));
        let twice = f.translate(&y).translate(&x);
        let once = f.translate(&x.mul(&y));
        prop_assert!((twice.eval(w.letters()) - once.eval(w.letters())).norm() < 1e-12);
        prop_assert!((f.eval_star(w.letters()) - f.eval(w.inverse().letters()).conj()).norm() < 1e-15);
    }

    #[test]
    fn config_assignments_round_trip(k in 2usize..5, t in 0.05..0.9f64, n_max in 3usize..13, seed in any::<u64>()) {
        let text = format!("k = {k}\nt = {t}\nn_max = {n_max}\nseed = {seed}\n");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!((cfg.k, cfg.t, cfg.n_max, cfg.seed), (k, t, n_max, seed));
    }
}
