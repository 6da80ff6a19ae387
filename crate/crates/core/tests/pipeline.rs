use ahyper_core::dwork::eigen::eigenvector_check;
use ahyper_core::dwork::DworkOperator;
use ahyper_core::hypergeom::phi_series;
use ahyper_core::series::PiRing;
use ahyper_core::verify::{verify_mod_p_ratio, verify_ratio_via_operator, OperatorParams};
use ahyper_core::{PiAdic, PointConfiguration, Series, Valuation};
use num_rational::Rational64;
use proptest::prelude::*;

fn params(weight: i64, degree: u32) -> OperatorParams {
    OperatorParams {
        weight,
        degree,
        precision: Rational64::from_integer(3),
        max_iters: 40,
    }
}

#[test]
fn ratio_routes_agree_on_every_fixture() {
    for (config, p, dx, dl) in [
        (PointConfiguration::dwork(2), 3, 4, 9),
        (PointConfiguration::dwork(3), 3, 3, 6),
        (PointConfiguration::hexagon(), 5, 2, 10),
        (PointConfiguration::dwork(2), 5, 3, 10),
    ] {
        let op = DworkOperator::new(&config, p, dx, dl).unwrap();
        let e = verify_ratio_via_operator(&op, &params(dx, dl)).unwrap();
        assert!(e.pass, "{config:?} p={p}: {e:?}");
    }
}

#[test]
fn ratio_margin_grows_with_weight_bound() {
    let config = PointConfiguration::dwork(2);
    let margins: Vec<Valuation> = (2..=6)
        .map(|dx| {
            let op = DworkOperator::new(&config, 3, dx, 9).unwrap();
            verify_ratio_via_operator(&op, &params(dx, 9))
                .unwrap()
                .margin
        })
        .collect();
    assert!(margins.windows(2).all(|w| w[1] >= w[0]), "{margins:?}");
    // adjacent bounds can plateau; two steps apart the margin strictly grows
    assert!(margins[3] > margins[1], "{margins:?}");
}

#[test]
fn alpha_star_is_frobenius_semilinear() {
    let config = PointConfiguration::dwork(2);
    let (p, dl) = (3u32, 9u32);
    let op = DworkOperator::new(&config, p, 3, dl).unwrap();
    let ring = PiRing { p };
    let g = Series::from_terms(
        ring,
        2,
        dl,
        [
            (vec![0, 0], PiAdic::from_int(p, 1)),
            (vec![1, 0], PiAdic::from_int(p, 5)),
            (vec![1, 2], PiAdic::from_int(p, -7).mul_pi_power(1)),
        ],
    );
    let xi = op.seed();
    let scaled = xi.map_components(|_, s| s * &g);
    let left = op.alpha_star(&scaled).unwrap().image;
    let right = op
        .alpha_star(&xi)
        .unwrap()
        .image
        .map_components(|_, s| s * &g.frobenius(p));
    assert_eq!(left.sub(&right).unwrap().valuation(), Valuation::Infinite);
}

fn permutations(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((1..=n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pipeline_is_permutation_invariant(perm in permutations(6)) {
        let hex = PointConfiguration::hexagon();
        let other = hex.permuted(&perm).unwrap();
        let a = verify_mod_p_ratio(&hex, 5, 12);
        let b = verify_mod_p_ratio(&other, 5, 12);
        prop_assert_eq!(a.margin, b.margin);
        let k = Rational64::from_integer(3);
        let ea = eigenvector_check(&DworkOperator::new(&hex, 5, 2, 5).unwrap(), k).unwrap();
        let eb = eigenvector_check(&DworkOperator::new(&other, 5, 2, 5).unwrap(), k).unwrap();
        prop_assert_eq!(ea.defect_valuation, eb.defect_valuation);
        prop_assert_eq!(ea.refined_tail, eb.refined_tail);
    }

    #[test]
    fn phi_coefficients_follow_relabeling(perm in permutations(6)) {
        let config = PointConfiguration::hexagon();
        let other = config.permuted(&perm).unwrap();
        let a = phi_series(&config, 6);
        let b = phi_series(&other, 6);
        prop_assert_eq!(a.len(), b.len());
        for (m, c) in a.terms() {
            let exps: Vec<u32> = (0..6).map(|i| m.exps()[perm[i] - 1]).collect();
            prop_assert_eq!(&b.coeff(&exps), c);
        }
    }
}
