mod common;

use msr_core::aset::{ASSet, Variant};
use msr_core::construct::r3::assign_lambdas_r3;
use msr_core::construct::r3plus::{assign_lambda_families, find_h, quad_lambdas};
use msr_core::construct::{build_r2, build_r3, candidates, Parity};
use msr_core::gf::{prime_powers, Felt, Field};
use msr_core::linalg::{Mat, Subspace};
use msr_core::msr::CodeSpec;
use msr_core::par::Exec;
use msr_core::verify;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::gf;

const ORDERS: [u64; 12] = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49, 64];

fn field_and_elems(n: usize) -> impl Strategy<Value = (Field, Vec<Felt>)> {
    prop::sample::select(ORDERS.to_vec()).prop_flat_map(move |q| {
        prop::collection::vec(0..q as u32, n).prop_map(move |v| (gf(q), v.into_iter().map(Felt).collect()))
    })
}

fn random_mat(field: &Field, rows: usize, cols: usize, vals: &[u32]) -> Mat {
    let q = field.q();
    let grid: Vec<Vec<u32>> =
        (0..rows).map(|i| (0..cols).map(|j| vals[(i * cols + j) % vals.len()] % q).collect()).collect();
    Mat::from_grid(field, &grid).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms((f, v) in field_and_elems(3)) {
        let (a, b, c) = (v[0], v[1], v[2]);
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Felt::ZERO);
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Felt::ONE);
            prop_assert_eq!(f.pow(a, f.q() as u64 - 1), Felt::ONE);
        } else {
            prop_assert!(f.inv(a).is_err());
        }
        prop_assert_eq!(f.pow(a, f.q() as u64), a);
    }

    #[test]
    fn rref_is_canonical(q in prop::sample::select(vec![3u64, 4, 7, 9]), vals in prop::collection::vec(any::<u32>(), 1..40), rows in 1usize..6, cols in 1usize..7) {
        let f = gf(q);
        let m = random_mat(&f, rows, cols, &vals);
        let (r, piv) = m.rref();
        prop_assert_eq!(r.rref(), (r.clone(), piv.clone()));
        prop_assert_eq!(piv.len(), m.rank());
        for (i, &p) in piv.iter().enumerate() {
            for k in 0..r.rows() {
                prop_assert_eq!(r.get(k, p), if k == i { Felt::ONE } else { Felt::ZERO });
            }
        }
        // Row operations do not change the row space.
        let mut shuffled = m.row_vecs();
        shuffled.reverse();
        let first = shuffled[0].clone();
        if shuffled.len() > 1 {
            let last = shuffled.len() - 1;
            f.add_scaled(&mut shuffled[last], &first, f.from_int(2));
        }
        let twin = Mat::from_rows(&f, cols, &shuffled).unwrap();
        prop_assert_eq!(Subspace::span(&twin), Subspace::span(&m));
    }

    #[test]
    fn intersection_dimension_identity(q in prop::sample::select(vec![2u64, 5, 8]), a in prop::collection::vec(any::<u32>(), 1..30), b in prop::collection::vec(any::<u32>(), 1..30), ra in 1usize..5, rb in 1usize..5) {
        let f = gf(q);
        let n = 5;
        let u = Subspace::span(&random_mat(&f, ra, n, &a));
        let w = Subspace::span(&random_mat(&f, rb, n, &b));
        let sum = u.sum(&w).unwrap();
        prop_assert_eq!(u.dim() + w.dim(), sum.dim() + u.intersection_dim(&w).unwrap());
        for v in u.basis().row_vecs() {
            prop_assert!(sum.contains(&v));
        }
    }

    #[test]
    fn invertible_image_keeps_dimension(q in prop::sample::select(vec![3u64, 4, 13]), vals in prop::collection::vec(any::<u32>(), 1..30), rows in 1usize..5, seed in 1u32..1000) {
        let f = gf(q);
        let n = 4;
        let s = Subspace::span(&random_mat(&f, rows, n, &vals));
        // Unit upper triangular times unit lower triangular is always invertible.
        let mut upper = Mat::identity(&f, n);
        let mut lower = Mat::identity(&f, n);
        for i in 0..n {
            for j in i + 1..n {
                upper.set(i, j, Felt(seed.wrapping_mul(31 + i as u32 * 7 + j as u32) % f.q()));
                lower.set(j, i, Felt(seed.wrapping_mul(17 + j as u32 * 5 + i as u32) % f.q()));
            }
        }
        let a = upper.mul(&lower).unwrap();
        prop_assert!(a.is_invertible());
        let image = s.image_mul(&a).unwrap();
        prop_assert_eq!(image.dim(), s.dim());
        prop_assert_eq!(image.image_mul(&a.invert().unwrap()).unwrap(), s);
    }

    #[test]
    fn encode_then_reconstruct_from_any_k(seed in any::<u64>(), pick in any::<u64>()) {
        let code = CodeSpec::new(build_r2(2, &gf(4)).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let file = code.random_file(&mut rng);
        let store = code.encode(&file).unwrap();
        let all = common::subsets(code.n(), code.k());
        let s = &all[(pick % all.len() as u64) as usize];
        let nodes: Vec<(usize, Vec<Felt>)> = s.iter().map(|&i| (i, store.columns[i].clone())).collect();
        prop_assert_eq!(code.reconstruct(&nodes).unwrap(), file);
    }

    #[test]
    fn repair_recovers_every_node(seed in any::<u64>()) {
        let code = CodeSpec::new(build_r3(1, &gf(7)).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let store = code.encode(&code.random_file(&mut rng)).unwrap();
        for j in 0..code.k() {
            let t = code.repair(&store, j).unwrap();
            prop_assert_eq!(&t.recovered, &store.columns[j]);
            prop_assert_eq!(t.symbols_sent, code.bandwidth_budget().1);
        }
    }
}

#[test]
fn cube_roots_up_to_128() {
    for q in prime_powers(2, 128) {
        let f = gf(q);
        match f.cube_roots() {
            Ok(r) => {
                assert_eq!((q - 1) % 3, 0);
                assert_eq!(f.pow(r.g1, 3), Felt::ONE);
                assert_ne!(r.g1, Felt::ONE);
                assert_eq!(f.mul(r.g1, r.g1), r.g2);
                assert_eq!(f.add(f.add(r.one, r.g1), r.g2), Felt::ZERO, "q={q}");
                let least = f.nonzero().into_iter().find(|&x| x != Felt::ONE && f.pow(x, 3) == Felt::ONE);
                assert_eq!(least, Some(r.g1));
            }
            Err(_) => assert_ne!((q - 1) % 3, 0, "q={q}"),
        }
    }
}

#[test]
fn sixth_power_families_are_disjoint() {
    for (q, max_m) in [(7u64, 1usize), (13, 2)] {
        let f = gf(q);
        let roots = f.cube_roots().unwrap();
        let lambdas = assign_lambdas_r3(&f, max_m).unwrap();
        let eigen = |l: Felt| {
            [roots.one, roots.g1, roots.g2]
                .into_iter()
                .flat_map(|g| [f.mul(l, g), f.neg(f.mul(l, g))])
                .collect::<Vec<_>>()
        };
        for (i, &a) in lambdas.iter().enumerate() {
            for &b in &lambdas[i + 1..] {
                assert_ne!(f.pow(a, 6), f.pow(b, 6));
                assert!(eigen(a).iter().all(|x| !eigen(b).contains(x)), "q={q}");
            }
        }
        assert!(assign_lambdas_r3(&f, max_m + 1).is_err());
    }
}

#[test]
fn long_families_never_share_sixth_powers() {
    for (q, m) in [(49u64, 1usize), (97, 2)] {
        let f = gf(q);
        let h = find_h(&f, m).unwrap();
        let bases = assign_lambda_families(&f, m, h).unwrap();
        let sixths: Vec<Vec<Felt>> =
            bases.iter().map(|&l| quad_lambdas(&f, l, h).iter().map(|&x| f.pow(x, 6)).collect()).collect();
        for (i, a) in sixths.iter().enumerate() {
            for b in &sixths[i + 1..] {
                assert!(a.iter().all(|x| !b.contains(x)));
            }
        }
    }
}

#[test]
fn candidate_orders_respect_bounds() {
    for m in 1..=4 {
        for q in candidates(Variant::R3AccessOptimal, m, Some(Parity::Odd)) {
            assert!(q % 2 == 1 && q > 6 * m as u64 && (q - 1) % 3 == 0 && q % 3 != 0);
        }
        for q in candidates(Variant::R3AccessOptimal, m, Some(Parity::Even)) {
            assert!(q % 2 == 0 && q > 3 * m as u64 && (q - 1) % 3 == 0);
        }
    }
    for m in 2..=7 {
        assert!(candidates(Variant::R2AccessOptimal, m, None).iter().all(|&q| q > m as u64));
    }
}

fn corrupt(set: &ASSet) -> ASSet {
    let mut bad = set.clone();
    bad.pairs[2].a = bad.pairs[0].a.clone();
    bad
}

#[test]
fn sequential_and_parallel_certificates_match() {
    for set in [build_r2(3, &gf(4)).unwrap(), build_r3(2, &gf(13)).unwrap()] {
        for s in [set.clone(), corrupt(&set)] {
            let a = verify::full(&s, Exec::Sequential).unwrap();
            let b = verify::full(&s, Exec::Parallel).unwrap();
            assert_eq!(a.to_json(), b.to_json());
        }
        assert!(!verify::full(&corrupt(&set), Exec::Sequential).unwrap().passed);
    }
}
