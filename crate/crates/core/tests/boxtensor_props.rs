#[allow(dead_code)]
#[path = "acceptance/gen.rs"]
mod gen;

use gstensor::boxtensor as bt;
use gstensor::dieudonne::{self as dm, DieudonneModule};
use gstensor::UnramRing;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn iso(a: &DieudonneModule, b: &DieudonneModule) -> bool {
    a.is_isomorphic(b).unwrap().is_iso()
}

fn small_catalog(r: &UnramRing) -> Vec<DieudonneModule> {
    let mut out = Vec::new();
    for m in 1..=2 {
        out.push(dm::d_const(r, m).unwrap());
        out.push(dm::d_mu(r, m).unwrap());
        out.push(dm::d_alpha(r, m as usize).unwrap());
    }
    out.push(dm::d_wittker(r, 1, 1).unwrap());
    out
}

/// Every coordinate vector of a module over a prime field, `c_i < p^{e_i}`.
fn all_coords(r: &UnramRing, divs: &[u32]) -> Vec<Vec<gstensor::UnramElement>> {
    let mut out = vec![vec![]];
    for &e in divs {
        let n = r.p().pow(e) as i64;
        out = out.into_iter().flat_map(|c| (0..n).map(move |x| [c.clone(), vec![r.from_int(x)]].concat())).collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unipotent_product_is_symmetric_with_nilpotent_v(
        (p, d) in prop::sample::select(vec![(2u64, 1usize), (3, 1), (2, 2)]),
        bound in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let r = UnramRing::new(p, d, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (k, l) = (gen::random_module(&r, &mut rng), gen::random_module(&r, &mut rng));
        let kl = bt::boxast_u(&k, &l, bound).unwrap();
        let lk = bt::boxast_u(&l, &k, bound).unwrap();
        prop_assert!(iso(&kl.module, &lk.module), "{:?} / {:?}", k.to_json(), l.to_json());
        prop_assert_eq!(kl.stabilized, lk.stabilized);
        // V shifts sequences down, so V^bound kills everything
        prop_assert!(kl.module.v.pow(&r, bound as u32).unwrap().is_zero(&r));
    }

    #[test]
    fn truncated_covariant_product_is_symmetric(
        (p, d) in prop::sample::select(vec![(2u64, 1usize), (3, 1), (2, 2)]),
        bound in 1usize..=3,
        seed in any::<u64>(),
    ) {
        let r = UnramRing::new(p, d, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (gen::random_module(&r, &mut rng), gen::random_module(&r, &mut rng));
        let ab = bt::boxc_trunc(&a, &b, bound).unwrap();
        let ba = bt::boxc_trunc(&b, &a, bound).unwrap();
        prop_assert!(iso(&ab, &ba), "{:?} / {:?}", a.to_json(), b.to_json());
    }
}

#[test]
fn evaluation_at_one_is_bijective_when_f_is() {
    for p in [2u64, 3] {
        let r = UnramRing::new(p, 1, 3).unwrap();
        for m in 1..=2 {
            let k = dm::d_const(&r, m).unwrap();
            // with L unipotent the whole product is unipotent, so the sequence model sees all of it
            for l in small_catalog(&r).into_iter().filter(|l| l.is_unipotent()) {
                let u = bt::boxast_u(&k, &l, 3).unwrap();
                let (tor, _) = dm::star(&k, &l).unwrap();
                assert_eq!(u.module.length(), tor.length(), "p={p} m={m} L={:?}", l.to_json());
                // injective on a finite set of equal size
                for c in all_coords(&r, &u.module.module.divisors) {
                    if c.iter().all(|x| r.is_zero_elem(x)) {
                        continue;
                    }
                    let x0 = &u.sequence(&c)[0];
                    assert!(!gstensor::linalg::is_zero_mat(&r, x0), "p={p} m={m} L={:?}", l.to_json());
                }
            }
        }
    }
}
