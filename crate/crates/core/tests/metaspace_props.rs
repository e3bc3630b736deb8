use proptest::prelude::*;
use treeclust_core::metaspace::{cone_path, cone_ratio, dist_euclid, dist_l1, dist_l2_path, frechet_mean};
use treeclust_core::{Metric, SignatureVector};

const TOL: f64 = 1e-12;

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(0.0), 4 => 0.0..10.0f64]
}

fn pair() -> impl Strategy<Value = (SignatureVector, SignatureVector)> {
    (1usize..8).prop_flat_map(|k| {
        (prop::collection::vec(coord(), k), prop::collection::vec(coord(), k))
            .prop_map(|(a, b)| (SignatureVector::new(a).unwrap(), SignatureVector::new(b).unwrap()))
    })
}

fn triple() -> impl Strategy<Value = [SignatureVector; 3]> {
    (1usize..8).prop_flat_map(|k| {
        prop::collection::vec(prop::collection::vec(coord(), k), 3)
            .prop_map(|v| {
                let sigs: Vec<SignatureVector> = v.into_iter().map(|c| SignatureVector::new(c).unwrap()).collect();
                <[SignatureVector; 3]>::try_from(sigs).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn metric_axioms([x, y, z] in triple()) {
        for d in [dist_l1, dist_euclid] {
            let xy = d(&x, &y).unwrap();
            prop_assert!(xy >= 0.0);
            prop_assert_eq!(d(&x, &x).unwrap(), 0.0);
            prop_assert!((xy - d(&y, &x).unwrap()).abs() <= TOL);
            prop_assert!(d(&x, &z).unwrap() <= xy + d(&y, &z).unwrap() + TOL);
            if x.coords() != y.coords() {
                prop_assert!(xy > 0.0);
            }
        }
    }

    #[test]
    fn norm_equivalence((x, y) in pair()) {
        let l1 = dist_l1(&x, &y).unwrap();
        let l2 = dist_euclid(&x, &y).unwrap();
        prop_assert!(l1 + TOL >= l2);
        prop_assert!(l1 <= (x.len() as f64).sqrt() * l2 + TOL);
    }

    #[test]
    fn path_length_chain((x, y) in pair()) {
        let path = cone_path(&x, &y).unwrap();
        prop_assert!(path.l1_length() + TOL >= path.l2_length());
        prop_assert!(path.l2_length() + TOL >= dist_euclid(&x, &y).unwrap());
        prop_assert!(path.l1_length() + TOL >= dist_l1(&x, &y).unwrap());
        prop_assert_eq!(dist_l2_path(&x, &y).unwrap(), path.l2_length());
        prop_assert!(path.waypoints.iter().flatten().all(|&v| v >= 0.0));
        prop_assert_eq!(&path.waypoints[0], &x.coords().to_vec());
        prop_assert_eq!(&path.waypoints[4], &y.coords().to_vec());
    }

    #[test]
    fn metric_dispatch_matches_functions((x, y) in pair()) {
        prop_assert_eq!(Metric::L1.distance(&x, &y).unwrap(), dist_l1(&x, &y).unwrap());
        prop_assert_eq!(Metric::Euclid.distance(&x, &y).unwrap(), dist_euclid(&x, &y).unwrap());
        prop_assert!((Metric::L2Path.distance(&x, &y).unwrap() - dist_l2_path(&x, &y).unwrap()).abs() <= TOL);
    }

    #[test]
    fn cone_ratio_bounded(a1 in 0.0..100.0f64, b1 in 0.0..100.0f64, a2 in 0.0..100.0f64, b2 in 0.0..100.0f64) {
        prop_assume!(a1 + b1 + a2 + b2 > 0.0);
        let r = cone_ratio(a1, b1, a2, b2).unwrap();
        prop_assert!(r >= 1.0 - TOL);
        prop_assert!(r <= std::f64::consts::SQRT_2 + TOL);
    }

    #[test]
    fn frechet_mean_is_arithmetic_mean(points in (1usize..6).prop_flat_map(|k| prop::collection::vec(prop::collection::vec(coord(), k), 1..15))) {
        let n = points.len() as f64;
        let sigs: Vec<SignatureVector> = points.iter().cloned().map(|p| SignatureVector::new(p).unwrap()).collect();
        let mean = frechet_mean(&sigs).unwrap();
        for (j, m) in mean.iter().enumerate() {
            let oracle = points.iter().map(|p| p[j]).sum::<f64>() / n;
            prop_assert!((m - oracle).abs() <= TOL * oracle.abs().max(1.0));
            prop_assert!(*m >= 0.0);
        }
        let mut reversed = sigs.clone();
        reversed.reverse();
        let back = frechet_mean(&reversed).unwrap();
        for (a, b) in mean.iter().zip(back.iter()) {
            prop_assert!((a - b).abs() <= TOL);
        }
    }
}
