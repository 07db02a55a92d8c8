//! Randomized invariants of the special functions, the cluster inversion
//! and the scaling map.

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use virial_fixpoint::cluster_expansion::{
    density_series, pressure_series, virial_from_clusters, virial_from_series,
    ClusterIntegralVector, FormalSeries, VirialVector,
};
use virial_fixpoint::scaling_map::{rat, ScalingMap};
use virial_fixpoint::specfun::gamma;

fn rational() -> impl Strategy<Value = BigRational> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// b̄_1 = 1 followed by 1..=4 random cluster integrals (L = 2..=5).
fn clusters() -> impl Strategy<Value = ClusterIntegralVector> {
    prop::collection::vec(rational(), 1..=4).prop_map(|tail| {
        let mut v = vec![BigRational::one()];
        v.extend(tail);
        ClusterIntegralVector::new(v).unwrap()
    })
}

/// Σ B_k w^k with no constant term.
fn virial_series(v: &VirialVector) -> FormalSeries {
    let mut c = vec![BigRational::zero()];
    c.extend(v.values().iter().cloned());
    FormalSeries::new(c)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_recurrence(x in -6.0f64..20.0) {
        prop_assume!((x - x.round()).abs() > 1e-3 || x > 0.5);
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-11, "x = {x}: {lhs} vs {rhs}");
    }

    #[test]
    fn gamma_reflection(x in 1e-6f64..(1.0 - 1e-6)) {
        let product = gamma(x).unwrap() * gamma(1.0 - x).unwrap() * (std::f64::consts::PI * x).sin();
        prop_assert!(rel(product, std::f64::consts::PI) < 1e-11, "x = {x}: {product}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn virial_series_reproduces_pressure(b in clusters()) {
        let v = virial_from_clusters(&b).unwrap();
        let p = pressure_series(&b);
        let rho = density_series(&b);
        let recomposed = virial_series(&v).compose(&rho).unwrap();
        prop_assert_eq!(recomposed, p);
    }

    #[test]
    fn second_virial_is_minus_b2(b in clusters()) {
        let v = virial_from_clusters(&b).unwrap();
        prop_assert_eq!(v.get(1), Some(&BigRational::one()));
        prop_assert_eq!(v.get(2).cloned(), Some(-b.values()[1].clone()));
    }

    #[test]
    fn invariant_under_fugacity_rescaling(b in clusters(), c in nonzero_rational()) {
        let p = pressure_series(&b);
        let rho = density_series(&b);
        let direct = virial_from_series(&p, &rho).unwrap();
        let scaled = virial_from_series(&p.rescale_variable(&c), &rho.rescale_variable(&c)).unwrap();
        prop_assert_eq!(direct, scaled);
    }

    #[test]
    fn truncation_is_safe(b in clusters(), extra in prop::collection::vec(rational(), 2)) {
        let short = virial_from_clusters(&b).unwrap();
        let mut longer = b.values().to_vec();
        longer.extend(extra);
        let long = virial_from_clusters(&ClusterIntegralVector::new(longer).unwrap()).unwrap();
        prop_assert_eq!(short.values(), &long.values()[..short.values().len()]);
    }

    #[test]
    fn third_virial_matches_reversion(b2 in rational(), b3 in rational()) {
        // Invert ρ(z), substitute into p(z) and read off [ρ³].
        let b = ClusterIntegralVector::new(vec![BigRational::one(), b2, b3]).unwrap();
        let z_of_rho = density_series(&b).revert().unwrap();
        let p_of_rho = pressure_series(&b).compose(&z_of_rho).unwrap();
        let v = virial_from_clusters(&b).unwrap();
        prop_assert_eq!(v.get(3).cloned(), Some(p_of_rho.coeff(3)));
        prop_assert_eq!(v.get(2).cloned(), Some(p_of_rho.coeff(2)));
    }

    #[test]
    fn map_escapes_above_one(n in 1i64..=900, d in 1i64..=100) {
        let k = BigRational::one() + rat(n, d) * rat(9, 100);
        prop_assume!(k <= rat(10, 1));
        let fk = ScalingMap::default().apply(&k).unwrap();
        prop_assert!(fk > k, "f({k}) = {fk}");
    }

    #[test]
    fn map_contracts_below_one(n in 1i64..=99) {
        let k = rat(n, 100);
        let fk = ScalingMap::default().apply(&k).unwrap();
        prop_assert!(fk < k && fk > BigRational::zero(), "f({k}) = {fk}");
    }

    #[test]
    fn balanced_track_splits_fix_one(a in 1i64..=50, b in 1i64..=50) {
        // Weights a/(2(a+b)) and b/(2(a+b)) sum to one half.
        let s = 2 * (a + b);
        let map = ScalingMap::from_track_terms(vec![(2, rat(a, s)), (3, rat(b, s))]).unwrap();
        prop_assert!(map.apply(&BigRational::one()).unwrap().is_one());
        let overweight = ScalingMap::from_track_terms(vec![(2, rat(a, s)), (3, rat(b, s)), (4, rat(1, 12))]);
        prop_assert!(overweight.is_err());
    }
}

#[test]
fn default_tracks_rebuild_the_map() {
    let map = ScalingMap::default();
    let total: BigRational = map.track_terms().iter().map(|(_, w)| w.clone()).sum();
    assert_eq!(total, rat(1, 2));
    for (degree, weight) in map.track_terms() {
        assert_eq!(map.coefficients()[degree], weight * rat(2, 1));
    }
    assert_eq!(map.to_string(), "1/2*K^2 + 1/3*K^3 + 1/6*K^4");
}
