//! Built-in test instances: small base categories and prestacks on them.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::cat::FiniteCategory;
use crate::exact::{ExactMatrix, Field};
use crate::lincat::{ground_category, LinearCategory, LinearCategoryBuilder, LinearFunctor};
use crate::prestack::Prestack;

fn table(entries: &[(&str, &str, &str)]) -> BTreeMap<(String, String), String> {
    entries
        .iter()
        .map(|(g, f, gf)| ((g.to_string(), f.to_string()), gf.to_string()))
        .collect()
}

/// The terminal category: one object, one morphism.
pub fn base_point() -> FiniteCategory {
    FiniteCategory::new(
        vec!["pt".into()],
        vec![("1pt".into(), "pt".into(), "pt".into())],
        [("pt".to_string(), "1pt".to_string())].into_iter().collect(),
        table(&[("1pt", "1pt", "1pt")]),
    )
    .unwrap()
}

/// The A2 chain: V --u--> U.
pub fn base_a2() -> FiniteCategory {
    FiniteCategory::new(
        vec!["V".into(), "U".into()],
        vec![
            ("1V".into(), "V".into(), "V".into()),
            ("1U".into(), "U".into(), "U".into()),
            ("u".into(), "V".into(), "U".into()),
        ],
        [
            ("V".to_string(), "1V".to_string()),
            ("U".to_string(), "1U".to_string()),
        ]
        .into_iter()
        .collect(),
        table(&[
            ("1V", "1V", "1V"),
            ("1U", "1U", "1U"),
            ("1U", "u", "u"),
            ("u", "1V", "u"),
        ]),
    )
    .unwrap()
}

/// The commutative square poset: V ≤ a, V ≤ b, a ≤ U, b ≤ U.
pub fn base_square() -> FiniteCategory {
    FiniteCategory::new(
        vec!["V".into(), "a".into(), "b".into(), "U".into()],
        vec![
            ("1V".into(), "V".into(), "V".into()),
            ("1a".into(), "a".into(), "a".into()),
            ("1b".into(), "b".into(), "b".into()),
            ("1U".into(), "U".into(), "U".into()),
            ("va".into(), "V".into(), "a".into()),
            ("vb".into(), "V".into(), "b".into()),
            ("au".into(), "a".into(), "U".into()),
            ("bu".into(), "b".into(), "U".into()),
            ("vu".into(), "V".into(), "U".into()),
        ],
        [
            ("V".to_string(), "1V".to_string()),
            ("a".to_string(), "1a".to_string()),
            ("b".to_string(), "1b".to_string()),
            ("U".to_string(), "1U".to_string()),
        ]
        .into_iter()
        .collect(),
        table(&[
            ("1V", "1V", "1V"),
            ("1a", "1a", "1a"),
            ("1b", "1b", "1b"),
            ("1U", "1U", "1U"),
            ("va", "1V", "va"),
            ("1a", "va", "va"),
            ("vb", "1V", "vb"),
            ("1b", "vb", "vb"),
            ("au", "1a", "au"),
            ("1U", "au", "au"),
            ("bu", "1b", "bu"),
            ("1U", "bu", "bu"),
            ("vu", "1V", "vu"),
            ("1U", "vu", "vu"),
            ("au", "va", "vu"),
            ("bu", "vb", "vu"),
        ]),
    )
    .unwrap()
}

/// The one-object category of the group ℤ/2.
pub fn base_z2() -> FiniteCategory {
    FiniteCategory::new(
        vec!["x".into()],
        vec![
            ("1".into(), "x".into(), "x".into()),
            ("g".into(), "x".into(), "x".into()),
        ],
        [("x".to_string(), "1".to_string())].into_iter().collect(),
        table(&[
            ("1", "1", "1"),
            ("1", "g", "g"),
            ("g", "1", "g"),
            ("g", "g", "1"),
        ]),
    )
    .unwrap()
}

/// The constant prestack with fiber k on every object and identity
/// restrictions.
pub fn constant_prestack(base: &FiniteCategory, field: Field) -> Rc<Prestack> {
    let g = ground_category(field);
    let fibers: Vec<Rc<LinearCategory>> = base.objects.iter().map(|_| g.clone()).collect();
    let restrictions = base
        .morphisms
        .iter()
        .map(|_| LinearFunctor::identity(&g))
        .collect();
    Rc::new(Prestack {
        base: base.clone(),
        fibers,
        restrictions,
        coherence: HashMap::new(),
    })
}

/// The dual numbers k[x]/x^2 as a one-object linear category.
pub fn dual_numbers(field: Field) -> Rc<LinearCategory> {
    let mut b = LinearCategoryBuilder::new(field);
    let a = b.add_object("A".into());
    b.set_hom(a, a, vec!["1".into(), "x".into()]);
    b.set_identity(a, vec![field.one(), field.zero()]);
    b.set_compose(a, a, a, 0, 0, vec![field.one(), field.zero()]);
    b.set_compose(a, a, a, 0, 1, vec![field.zero(), field.one()]);
    b.set_compose(a, a, a, 1, 0, vec![field.zero(), field.one()]);
    b.set_compose(a, a, a, 1, 1, vec![field.zero(), field.zero()]);
    b.build().unwrap()
}

/// Constant k on the point.
pub fn fix0(field: Field) -> Rc<Prestack> {
    constant_prestack(&base_point(), field)
}

/// Constant k on the A2 chain.
pub fn fix1(field: Field) -> Rc<Prestack> {
    constant_prestack(&base_a2(), field)
}

/// Constant k on the square poset.
pub fn fix2(field: Field) -> Rc<Prestack> {
    constant_prestack(&base_square(), field)
}

/// Constant k on the one-object category of Z/2.
pub fn fix3(field: Field) -> Rc<Prestack> {
    constant_prestack(&base_z2(), field)
}

/// Dual numbers over U, k over V on the A2 chain; u* kills x.
pub fn fix4(field: Field) -> Rc<Prestack> {
    let base = base_a2();
    let du = dual_numbers(field);
    let g = ground_category(field);
    // sorted object order is [U, V], morphism order [1U, 1V, u]
    let fibers = vec![du.clone(), g.clone()];
    let mut hom_mats = HashMap::new();
    hom_mats.insert((0, 0), ExactMatrix::from_i64(field, &[&[1, 0]]));
    let ru = LinearFunctor {
        source: du.clone(),
        target: g.clone(),
        obj_map: vec![0],
        hom_mats,
    };
    let restrictions = vec![LinearFunctor::identity(&du), LinearFunctor::identity(&g), ru];
    Rc::new(Prestack {
        base,
        fibers,
        restrictions,
        coherence: HashMap::new(),
    })
}

/// Constant k fibers on the square poset with nontrivial coherence scalars on
/// the two composite paths; the poset has no composable nonidentity triples,
/// so any invertible scalars satisfy the cocycle condition.
pub fn fix_twisted_square(field: Field) -> Rc<Prestack> {
    let base = base_square();
    let p = constant_prestack(&base, field);
    let mut p = (*p).clone();
    let au = base.morphism_index("au").unwrap();
    let va = base.morphism_index("va").unwrap();
    let bu = base.morphism_index("bu").unwrap();
    let vb = base.morphism_index("vb").unwrap();
    p.coherence.insert((au, va), vec![vec![field.from_i64(2)]]);
    p.coherence.insert((bu, vb), vec![vec![field.from_i64(3)]]);
    Rc::new(p)
}
