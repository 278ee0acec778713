mod common;

use kpp_core::model::{
    alpha_derivative, circulant_eigenpairs, decompose, jacobian, reaction, recompose, Circulant3, ModelParams, StateVec,
};
use proptest::prelude::*;

fn state(max: f64) -> impl Strategy<Value = StateVec> {
    (0.0..max, 0.0..max, 0.0..max).prop_map(|(a, b, c)| StateVec::new(a, b, c))
}

fn mu() -> impl Strategy<Value = f64> {
    1e-3..1.0f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jacobian_matches_central_differences(v in state(5.0), mu in mu()) {
        let p = ModelParams::new(mu).unwrap();
        let j = jacobian(&v, &p);
        let h = 1e-6;
        for k in 0..3 {
            let mut up = v.to_array();
            let mut dn = v.to_array();
            up[k] += h;
            dn[k] -= h;
            let fp = reaction(&StateVec::from_array(up), &p);
            let fm = reaction(&StateVec::from_array(dn), &p);
            // a slightly negative probe point is fine for the raw polynomial
            let (fp, fm) = match (fp, fm) {
                (Ok(a), Ok(b)) => (a.to_array(), b.to_array()),
                _ => continue,
            };
            for i in 0..3 {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                prop_assert!((fd - j[(i, k)]).abs() < 1e-6, "entry ({i},{k}): {fd} vs {}", j[(i, k)]);
            }
        }
    }

    #[test]
    fn decompose_recompose_round_trip(v in state(10.0)) {
        let back = recompose(&decompose(&v));
        prop_assert!(back.max_abs_diff(&v) < 1e-12);
    }

    #[test]
    fn beta_bounded_by_alpha(v in state(10.0)) {
        let c = decompose(&v);
        prop_assert!(c.beta.norm() <= 3f64.sqrt() * c.alpha + 1e-12);
    }

    #[test]
    fn alpha_derivative_is_mean_reaction(v in state(5.0), mu in mu()) {
        let p = ModelParams::new(mu).unwrap();
        let r = reaction(&v, &p).unwrap();
        let want = r.mean();
        let got = alpha_derivative(&decompose(&v), &p);
        prop_assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()), "{got} vs {want}");
        // default rows: the same value for every mu
        let q = ModelParams::new(0.5).unwrap();
        prop_assert!((alpha_derivative(&decompose(&v), &q) - got).abs() < 1e-10 * (1.0 + got.abs()));
    }

    #[test]
    fn circulant_spectrum_matches_dense(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64) {
        let m = Circulant3 { a, b, c };
        let dense = common::dense_eigenvalues(&m.to_matrix());
        let closed: Vec<_> = circulant_eigenpairs(&m).iter().map(|e| e.value).collect();
        // multiset equality by greedy matching
        let mut used = [false; 3];
        for z in &closed {
            let (k, d) = (0..3)
                .filter(|&k| !used[k])
                .map(|k| (k, (dense[k] - z).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            used[k] = true;
            prop_assert!(d < 1e-12 * (1.0 + z.norm()), "{z} unmatched, nearest off by {d}");
        }
    }
}

#[test]
fn default_rows() {
    let p = ModelParams::new(0.3).unwrap();
    let m = p.mutation_matrix();
    let ones = nalgebra::Vector3::repeat(1.0);
    assert_eq!(m * ones, nalgebra::Vector3::zeros());
    assert_eq!(m.transpose() * ones, nalgebra::Vector3::zeros());
    assert_eq!(p.competition_row.row_sum(), 1.0);
}
