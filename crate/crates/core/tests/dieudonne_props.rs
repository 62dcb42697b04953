#[allow(dead_code)]
#[path = "acceptance/gen.rs"]
mod gen;

use gstensor::dieudonne::{self as dm, DieudonneModule};
use gstensor::{linalg, Mat, UnramElement, UnramRing};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn iso(a: &DieudonneModule, b: &DieudonneModule) -> bool {
    a.is_isomorphic(b).unwrap().is_iso()
}

fn catalog(r: &UnramRing) -> Vec<DieudonneModule> {
    let mut out = Vec::new();
    for m in 1..=3 {
        out.push(dm::d_const(r, m).unwrap());
        out.push(dm::d_mu(r, m).unwrap());
        out.push(dm::d_alpha(r, m as usize).unwrap());
        out.push(dm::cov_const(r, m).unwrap());
        out.push(dm::cov_mu(r, m).unwrap());
    }
    for (m, n) in [(1, 1), (1, 2), (2, 1)] {
        out.push(dm::d_wittker(r, m, n).unwrap());
        out.push(dm::cov_wittker(r, m, n).unwrap());
    }
    out.push(dm::d_const(r, 1).unwrap().direct_sum(&dm::d_alpha(r, 2).unwrap()));
    out.push(dm::d_mu(r, 1).unwrap().direct_sum(&dm::d_wittker(r, 1, 1).unwrap()));
    out
}

/// Both Fitting splittings reassemble `m`, and Matlis duality swaps them.
fn check_fitting(m: &DieudonneModule) -> Result<(), String> {
    let show = || format!("{:?}", m.to_json());
    let (et, conn) = m.fitting_split_f().map_err(|e| e.to_string())?;
    let (mult, uni) = m.fitting_split_v().map_err(|e| e.to_string())?;
    if !iso(&et.direct_sum(&conn), m) {
        return Err(format!("F-splitting does not reassemble {}", show()));
    }
    if !iso(&mult.direct_sum(&uni), m) {
        return Err(format!("V-splitting does not reassemble {}", show()));
    }
    if !(et.is_f_etale() && conn.is_f_nilpotent() && mult.is_v_bijective() && uni.is_unipotent()) {
        return Err(format!("splitting pieces have the wrong type on {}", show()));
    }
    let dual = m.matlis_dual();
    let (dmult, duni) = dual.fitting_split_v().map_err(|e| e.to_string())?;
    if !iso(&et.matlis_dual(), &dmult) || !iso(&conn.matlis_dual(), &duni) {
        return Err(format!("Matlis dual does not swap the splittings of {}", show()));
    }
    Ok(())
}

fn kron(r: &UnramRing, a: &Mat<UnramElement>, b: &Mat<UnramElement>) -> Mat<UnramElement> {
    Mat::from_fn(a.rows * b.rows, a.cols * b.cols, |i, j| {
        r.mul(&a[(i / b.rows, j / b.cols)], &b[(i % b.rows, j % b.cols)])
    })
}

#[test]
fn catalog_validates_and_splits() {
    for (p, d) in [(2, 1), (3, 1), (2, 2)] {
        let r = UnramRing::new(p, d, 3).unwrap();
        for m in catalog(&r) {
            m.validate().unwrap();
            check_fitting(&m).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_modules_split_and_dualise(
        (p, d) in prop::sample::select(vec![(2u64, 1usize), (3, 1), (2, 2)]),
        seed in any::<u64>(),
    ) {
        let r = UnramRing::new(p, d, 4).unwrap();
        let m = gen::random_module(&r, &mut ChaCha8Rng::seed_from_u64(seed));
        m.validate().unwrap();
        prop_assert!(iso(&m.matlis_dual().matlis_dual(), &m));
        if let Err(e) = check_fitting(&m) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn star_length_is_the_sum_of_minima(
        (p, d) in prop::sample::select(vec![(2u64, 1usize), (3, 1), (2, 2), (3, 2)]),
        seed in any::<u64>(),
    ) {
        let r = UnramRing::new(p, d, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (gen::random_module(&r, &mut rng), gen::random_module(&r, &mut rng));
        let (tor, _) = dm::star(&a, &b).unwrap();
        let expect: u32 = a.module.divisors.iter().flat_map(|&e| b.module.divisors.iter().map(move |&f| e.min(f))).sum();
        prop_assert_eq!(tor.length(), expect);
        // the same group from the resolution 0 → W^r → W^r → A → 0 tensored with B
        let pres = linalg::diag(&r, &a.module.elems(&r));
        let amb: Vec<UnramElement> = (0..pres.rows).flat_map(|_| b.module.elems(&r)).collect();
        let ker = linalg::kernel(&r, &amb, &amb, &kron(&r, &pres, &linalg::identity(&r, b.module.rank())));
        let oracle: u32 = ker.divs.iter().map(|x| r.valuation(x)).sum();
        prop_assert_eq!(tor.length(), oracle);
    }
}
