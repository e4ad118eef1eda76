//! Randomized invariants for the exact linear algebra kernel and the
//! instance generator. Case counts are modest: everything is exact
//! arithmetic, so a handful of random shapes already exercises the pivoting
//! logic.

use proptest::prelude::*;

use homcat::exact::{ExactMatrix, Field, Scalar};
use homcat::instance::{decode, encode_instance, generate_random, parse_json, to_json};
use homcat::lincat::{ext_dims, hom_dim, random_module};
use homcat::prestack::{diagonal_bimodule, r_category};

fn fields() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::Rationals),
        Just(Field::prime(5).unwrap()),
        Just(Field::prime(2).unwrap()),
    ]
}

fn small_matrix() -> impl Strategy<Value = ExactMatrix> {
    (fields(), 1usize..=5, 1usize..=5).prop_flat_map(|(field, r, c)| {
        proptest::collection::vec(-6i64..=6, r * c).prop_map(move |ents| {
            let mut m = ExactMatrix::zeros(field, r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, field.from_i64(ents[i * c + j]));
                }
            }
            m
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_nullity_and_kernel(m in small_matrix()) {
        let rank = m.rank();
        prop_assert!(rank <= m.rows.min(m.cols));
        let ker = m.kernel_basis();
        prop_assert_eq!(rank + ker.cols, m.cols);
        if ker.cols > 0 {
            prop_assert!(m.mul(&ker).is_zero());
        }
        let col = m.column_space_basis();
        prop_assert_eq!(col.cols, rank);
    }

    #[test]
    fn solve_recovers_a_preimage(m in small_matrix(), coeffs in proptest::collection::vec(-4i64..=4, 5)) {
        let f = m.field;
        let v: Vec<Scalar> = (0..m.cols).map(|j| f.from_i64(coeffs[j])).collect();
        let b = m.apply(&v);
        let w = m.solve(&b);
        prop_assert!(w.is_some());
        prop_assert_eq!(m.apply(&w.unwrap()), b);
    }

    #[test]
    fn scalar_display_parses_back(f in fields(), n in -40i64..=40, d in 1i64..=12) {
        let den = f.from_i64(d);
        prop_assume!(!f.is_zero(&den));
        let x = f.div(&f.from_i64(n), &den);
        let s = format!("{x}");
        let y = f.parse(&s).unwrap();
        prop_assert!(f.is_zero(&f.sub(&x, &y)));
    }

    #[test]
    fn random_instances_validate_and_round_trip(seed in any::<u64>()) {
        let file = generate_random(seed, Field::Rationals);
        let s1 = to_json(&file);
        let inst = decode(&parse_json(&s1, "mem").unwrap()).unwrap();
        inst.prestack.validate().unwrap();
        let s2 = to_json(&encode_instance(&inst));
        prop_assert_eq!(s1, s2);
    }

    #[test]
    fn ext_degree_zero_is_hom(seed in any::<u64>()) {
        let pres = homcat::instance::fixture_prestack("FIX1", Field::Rationals).unwrap();
        let r = r_category(&pres, &pres).unwrap();
        let diag = diagonal_bimodule(&r).unwrap();
        let m = random_module(&r.cat, seed, 2);
        let e = ext_dims(&m, &diag, 1);
        prop_assert_eq!(e[0], hom_dim(&m, &diag));
    }
}
