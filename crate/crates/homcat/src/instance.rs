//! Instance files: a versioned JSON format for base categories, prestacks and
//! named bimodules, plus deterministic generators for the built-in fixtures
//! and for random strict instances.
//!
//! All matrices and structure constants are serialized as row-major arrays of
//! scalar strings ("n" or "n/d" over the rationals, decimal residues over a
//! prime field), so exactness survives the round trip. Serialization is
//! canonical: generate -> to_json -> load -> to_json is byte-identical.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::rc::Rc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cat::FiniteCategory;
use crate::comparison::{CheckConfig, Workspace};
use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, Field};
use crate::fixtures;
use crate::lincat::{
    random_module, representable, FDModule, LinearCategory, LinearCategoryBuilder, LinearFunctor,
};
use crate::prestack::{diagonal_bimodule, Prestack};

pub const SCHEMA_VERSION: u32 = 1;
pub const FIXTURE_IDS: &[&str] = &["FIX0", "FIX1", "FIX2", "FIX3", "FIX4"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSpec {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismSpec {
    pub id: String,
    pub src: String,
    pub dst: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompositionSpec {
    pub g: String,
    pub f: String,
    pub gf: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseSpec {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismSpec>,
    pub identities: BTreeMap<String, String>,
    pub composition: Vec<CompositionSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComposeEntry {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub g: usize,
    pub f: usize,
    pub coeffs: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberSpec {
    pub objects: Vec<String>,
    /// basis labels of hom(x, y), row-major in (x, y)
    pub homs: Vec<Vec<String>>,
    /// identity element per object
    pub identities: Vec<Vec<String>>,
    /// nonzero structure constants only
    pub compose: Vec<ComposeEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomMatSpec {
    pub x: usize,
    pub y: usize,
    pub mat: MatrixSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctorSpec {
    pub obj_map: Vec<usize>,
    pub hom_mats: Vec<HomMatSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherenceSpec {
    pub u: String,
    pub v: String,
    /// one element per object of the fiber over dst(u)
    pub elems: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrestackSpec {
    /// one fiber per base object, in sorted object order
    pub fibers: Vec<FiberSpec>,
    /// one restriction functor per base morphism, in sorted morphism order
    pub restrictions: Vec<FunctorSpec>,
    /// only the non-identity coherence cells
    pub coherence: Vec<CoherenceSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BimoduleSpec {
    pub name: String,
    /// "diagonal" | "representable" | "random"
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigSpec {
    pub max_degree: usize,
    pub nerve_cap: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub id: String,
    pub field: FieldSpec,
    pub base: BaseSpec,
    pub prestack_a: PrestackSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prestack_b: Option<PrestackSpec>,
    pub bimodules: Vec<BimoduleSpec>,
    pub config: ConfigSpec,
}

/// A fully validated in-memory instance.
pub struct Instance {
    pub id: String,
    pub field: Field,
    pub prestack: Rc<Prestack>,
    pub prestack_b: Option<Rc<Prestack>>,
    pub bimodules: Vec<BimoduleSpec>,
    pub config: CheckConfig,
}

impl Instance {
    pub fn base(&self) -> &FiniteCategory {
        &self.prestack.base
    }
}

// ---------------------------------------------------------------------------
// encoding
// ---------------------------------------------------------------------------

fn encode_field(field: Field) -> FieldSpec {
    match field {
        Field::Rationals => FieldSpec {
            kind: "rationals".into(),
            p: None,
        },
        Field::Prime(p) => FieldSpec {
            kind: "prime".into(),
            p: Some(p),
        },
    }
}

fn encode_base(c: &FiniteCategory) -> BaseSpec {
    let morphisms = c
        .morphisms
        .iter()
        .map(|(id, s, d)| MorphismSpec {
            id: id.clone(),
            src: c.objects[*s].clone(),
            dst: c.objects[*d].clone(),
        })
        .collect();
    let identities = (0..c.objects.len())
        .map(|o| (c.objects[o].clone(), c.morphism_id(c.identity(o)).to_string()))
        .collect();
    let mut composition = Vec::new();
    for g in 0..c.morphisms.len() {
        for f in 0..c.morphisms.len() {
            if c.dst(f) == c.src(g) {
                composition.push(CompositionSpec {
                    g: c.morphism_id(g).to_string(),
                    f: c.morphism_id(f).to_string(),
                    gf: c.morphism_id(c.compose(g, f)).to_string(),
                });
            }
        }
    }
    BaseSpec {
        objects: c.objects.clone(),
        morphisms,
        identities,
        composition,
    }
}

fn encode_matrix(m: &ExactMatrix) -> MatrixSpec {
    let mut entries = Vec::with_capacity(m.rows * m.cols);
    for r in 0..m.rows {
        for c in 0..m.cols {
            entries.push(m.get(r, c).to_string());
        }
    }
    MatrixSpec {
        rows: m.rows,
        cols: m.cols,
        entries,
    }
}

fn encode_fiber(cat: &LinearCategory) -> FiberSpec {
    let n = cat.object_count();
    let mut homs = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            homs.push(
                (0..cat.dim(x, y))
                    .map(|k| cat.basis_label(x, y, k).to_string())
                    .collect(),
            );
        }
    }
    let identities = (0..n)
        .map(|x| cat.identity_elem(x).iter().map(|s| s.to_string()).collect())
        .collect();
    let fld = cat.field;
    let mut compose = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for g in 0..cat.dim(y, z) {
                    for f in 0..cat.dim(x, y) {
                        let coeffs = cat.compose_elem(
                            x,
                            y,
                            z,
                            &cat.basis_elem(y, z, g),
                            &cat.basis_elem(x, y, f),
                        );
                        if coeffs.iter().all(|c| fld.is_zero(c)) {
                            continue;
                        }
                        compose.push(ComposeEntry {
                            x,
                            y,
                            z,
                            g,
                            f,
                            coeffs: coeffs.iter().map(|s| s.to_string()).collect(),
                        });
                    }
                }
            }
        }
    }
    FiberSpec {
        objects: cat.objects.clone(),
        homs,
        identities,
        compose,
    }
}

fn encode_functor(f: &LinearFunctor) -> FunctorSpec {
    let n = f.source.object_count();
    let mut hom_mats = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if f.source.dim(x, y) == 0 {
                continue;
            }
            if let Some(m) = f.hom_mats.get(&(x, y)) {
                hom_mats.push(HomMatSpec {
                    x,
                    y,
                    mat: encode_matrix(m),
                });
            }
        }
    }
    FunctorSpec {
        obj_map: f.obj_map.clone(),
        hom_mats,
    }
}

fn encode_prestack(p: &Prestack) -> PrestackSpec {
    let fibers = p.fibers.iter().map(|f| encode_fiber(f)).collect();
    let restrictions = p.restrictions.iter().map(encode_functor).collect();
    let mut keys: Vec<&(usize, usize)> = p.coherence.keys().collect();
    keys.sort();
    let coherence = keys
        .into_iter()
        .map(|&(u, v)| CoherenceSpec {
            u: p.base.morphism_id(u).to_string(),
            v: p.base.morphism_id(v).to_string(),
            elems: p.coherence[&(u, v)]
                .iter()
                .map(|e| e.iter().map(|s| s.to_string()).collect())
                .collect(),
        })
        .collect();
    PrestackSpec {
        fibers,
        restrictions,
        coherence,
    }
}

pub fn encode(
    id: &str,
    pres: &Rc<Prestack>,
    pres_b: Option<&Rc<Prestack>>,
    bimodules: Vec<BimoduleSpec>,
    config: &CheckConfig,
) -> InstanceFile {
    InstanceFile {
        schema_version: SCHEMA_VERSION,
        id: id.to_string(),
        field: encode_field(pres.field()),
        base: encode_base(&pres.base),
        prestack_a: encode_prestack(pres),
        prestack_b: pres_b.map(|p| encode_prestack(p)),
        bimodules,
        config: ConfigSpec {
            max_degree: config.max_degree,
            nerve_cap: config.nerve_cap,
            seed: config.seed,
        },
    }
}

pub fn encode_instance(inst: &Instance) -> InstanceFile {
    encode(
        &inst.id,
        &inst.prestack,
        inst.prestack_b.as_ref(),
        inst.bimodules.clone(),
        &inst.config,
    )
}

pub fn to_json(file: &InstanceFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("instance file serializes");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// decoding with path-qualified errors
// ---------------------------------------------------------------------------

fn verr(path: impl Into<String>, axiom: impl Into<String>) -> Error {
    Error::ValidationError {
        path: path.into(),
        axiom: axiom.into(),
    }
}

fn decode_field(spec: &FieldSpec) -> Result<Field> {
    match spec.kind.as_str() {
        "rationals" => Ok(Field::Rationals),
        "prime" => {
            let p = spec
                .p
                .ok_or_else(|| verr("/field/p", "prime field requires p"))?;
            Field::prime(p).map_err(|_| verr("/field/p", format!("{p} is not a usable prime")))
        }
        other => Err(verr("/field/kind", format!("unknown field kind {other:?}"))),
    }
}

fn decode_base(spec: &BaseSpec) -> Result<FiniteCategory> {
    for o in &spec.objects {
        if !spec.identities.contains_key(o) {
            return Err(verr(
                "/base/identities",
                format!("object {o:?} has no identity morphism"),
            ));
        }
    }
    let morphisms = spec
        .morphisms
        .iter()
        .map(|m| (m.id.clone(), m.src.clone(), m.dst.clone()))
        .collect();
    let composition = spec
        .composition
        .iter()
        .map(|c| ((c.g.clone(), c.f.clone()), c.gf.clone()))
        .collect();
    FiniteCategory::new(
        spec.objects.clone(),
        morphisms,
        spec.identities.clone(),
        composition,
    )
    .map_err(|e| verr("/base", e.to_string()))
}

fn decode_scalars(field: Field, path: &str, v: &[String]) -> Result<Vec<crate::exact::Scalar>> {
    v.iter()
        .map(|s| {
            field.parse(s).map_err(|e| Error::ParseError {
                path: path.to_string(),
                message: e.to_string(),
            })
        })
        .collect()
}

fn decode_matrix(field: Field, path: &str, spec: &MatrixSpec) -> Result<ExactMatrix> {
    if spec.entries.len() != spec.rows * spec.cols {
        return Err(verr(path, "matrix entry count does not match shape"));
    }
    let mut m = ExactMatrix::zeros(field, spec.rows, spec.cols);
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            let s = &spec.entries[r * spec.cols + c];
            let val = field.parse(s).map_err(|e| Error::ParseError {
                path: path.to_string(),
                message: e.to_string(),
            })?;
            m.set(r, c, val);
        }
    }
    Ok(m)
}

fn decode_fiber(field: Field, path: &str, spec: &FiberSpec) -> Result<Rc<LinearCategory>> {
    let n = spec.objects.len();
    if spec.homs.len() != n * n {
        return Err(verr(path, "homs must list every ordered object pair"));
    }
    if spec.identities.len() != n {
        return Err(verr(path, "one identity element per object required"));
    }
    let mut b = LinearCategoryBuilder::new(field);
    for o in &spec.objects {
        b.add_object(o.clone());
    }
    for x in 0..n {
        for y in 0..n {
            b.set_hom(x, y, spec.homs[x * n + y].clone());
        }
    }
    for (x, id) in spec.identities.iter().enumerate() {
        b.set_identity(x, decode_scalars(field, path, id)?);
    }
    for (i, e) in spec.compose.iter().enumerate() {
        let epath = format!("{path}/compose/{i}");
        if e.x >= n || e.y >= n || e.z >= n {
            return Err(verr(epath, "object index out of range"));
        }
        if e.g >= spec.homs[e.y * n + e.z].len() || e.f >= spec.homs[e.x * n + e.y].len() {
            return Err(verr(epath, "basis index out of range"));
        }
        b.set_compose(e.x, e.y, e.z, e.g, e.f, decode_scalars(field, &epath, &e.coeffs)?);
    }
    b.build().map_err(|e| verr(path, e.to_string()))
}

fn decode_functor(
    field: Field,
    path: &str,
    spec: &FunctorSpec,
    source: &Rc<LinearCategory>,
    target: &Rc<LinearCategory>,
) -> Result<LinearFunctor> {
    if spec.obj_map.len() != source.object_count() {
        return Err(verr(path, "object map must cover every source object"));
    }
    if spec.obj_map.iter().any(|&o| o >= target.object_count()) {
        return Err(verr(path, "object map hits a nonexistent target object"));
    }
    let mut hom_mats = HashMap::new();
    for (i, h) in spec.hom_mats.iter().enumerate() {
        let hpath = format!("{path}/hom_mats/{i}");
        if h.x >= source.object_count() || h.y >= source.object_count() {
            return Err(verr(hpath, "object index out of range"));
        }
        hom_mats.insert((h.x, h.y), decode_matrix(field, &hpath, &h.mat)?);
    }
    // apply_elem indexes unconditionally, so every pair needs a matrix
    for x in 0..source.object_count() {
        for y in 0..source.object_count() {
            hom_mats.entry((x, y)).or_insert_with(|| {
                ExactMatrix::zeros(
                    field,
                    target.dim(spec.obj_map[x], spec.obj_map[y]),
                    source.dim(x, y),
                )
            });
        }
    }
    let f = LinearFunctor {
        source: source.clone(),
        target: target.clone(),
        obj_map: spec.obj_map.clone(),
        hom_mats,
    };
    f.validate().map_err(|e| verr(path, e.to_string()))?;
    Ok(f)
}

fn decode_prestack(
    field: Field,
    path: &str,
    base: &FiniteCategory,
    spec: &PrestackSpec,
) -> Result<Rc<Prestack>> {
    if spec.fibers.len() != base.objects.len() {
        return Err(verr(
            format!("{path}/fibers"),
            "one fiber per base object required",
        ));
    }
    if spec.restrictions.len() != base.morphisms.len() {
        return Err(verr(
            format!("{path}/restrictions"),
            "one restriction per base morphism required",
        ));
    }
    let fibers: Vec<Rc<LinearCategory>> = spec
        .fibers
        .iter()
        .enumerate()
        .map(|(i, f)| decode_fiber(field, &format!("{path}/fibers/{i}"), f))
        .collect::<Result<_>>()?;
    let restrictions: Vec<LinearFunctor> = spec
        .restrictions
        .iter()
        .enumerate()
        .map(|(m, f)| {
            decode_functor(
                field,
                &format!("{path}/restrictions/{m}"),
                f,
                &fibers[base.dst(m)],
                &fibers[base.src(m)],
            )
        })
        .collect::<Result<_>>()?;
    let mut coherence = HashMap::new();
    for (i, c) in spec.coherence.iter().enumerate() {
        let cpath = format!("{path}/coherence/{i}");
        let u = base
            .morphism_index(&c.u)
            .ok_or_else(|| verr(&cpath, format!("unknown morphism {:?}", c.u)))?;
        let v = base
            .morphism_index(&c.v)
            .ok_or_else(|| verr(&cpath, format!("unknown morphism {:?}", c.v)))?;
        let elems = c
            .elems
            .iter()
            .map(|e| decode_scalars(field, &cpath, e))
            .collect::<Result<_>>()?;
        coherence.insert((u, v), elems);
    }
    let pres = Rc::new(Prestack {
        base: base.clone(),
        fibers,
        restrictions,
        coherence,
    });
    pres.validate().map_err(|e| verr(path, e.to_string()))?;
    Ok(pres)
}

pub fn decode(file: &InstanceFile) -> Result<Instance> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::SchemaVersion(file.schema_version));
    }
    let field = decode_field(&file.field)?;
    let base = decode_base(&file.base)?;
    base.validate().map_err(|e| verr("/base", e.to_string()))?;
    let prestack = decode_prestack(field, "/prestack_a", &base, &file.prestack_a)?;
    let prestack_b = match &file.prestack_b {
        Some(spec) => Some(decode_prestack(field, "/prestack_b", &base, spec)?),
        None => None,
    };
    for (i, b) in file.bimodules.iter().enumerate() {
        let bpath = format!("/bimodules/{i}");
        match b.kind.as_str() {
            "diagonal" => {}
            "representable" => {
                if b.object.is_none() {
                    return Err(verr(bpath, "representable bimodule needs an object index"));
                }
            }
            "random" => {
                if b.seed.is_none() {
                    return Err(verr(bpath, "random bimodule needs a seed"));
                }
            }
            other => return Err(verr(bpath, format!("unknown bimodule kind {other:?}"))),
        }
    }
    Ok(Instance {
        id: file.id.clone(),
        field,
        prestack,
        prestack_b,
        bimodules: file.bimodules.clone(),
        config: CheckConfig {
            max_degree: file.config.max_degree,
            nerve_cap: file.config.nerve_cap,
            seed: file.config.seed,
        },
    })
}

pub fn parse_json(s: &str, origin: &str) -> Result<InstanceFile> {
    serde_json::from_str(s).map_err(|e| Error::ParseError {
        path: origin.to_string(),
        message: e.to_string(),
    })
}

pub fn load(path: &Path) -> Result<Instance> {
    let s = std::fs::read_to_string(path)?;
    decode(&parse_json(&s, &path.display().to_string())?)
}

/// Build a named bimodule over the workspace's 𝔯.
pub fn realize_bimodule(ws: &Workspace, spec: &BimoduleSpec) -> Result<Rc<FDModule>> {
    match spec.kind.as_str() {
        "diagonal" => diagonal_bimodule(&ws.r),
        "representable" => {
            let x = spec.object.unwrap_or(0);
            if x >= ws.r.objects.len() {
                return Err(Error::IndexOutOfRange(format!(
                    "bimodule object {x} out of range"
                )));
            }
            Ok(Rc::new(representable(&ws.r.cat, x)?))
        }
        "random" => Ok(random_module(
            &ws.r.cat,
            spec.seed.unwrap_or(0),
            spec.max_dim.unwrap_or(2),
        )),
        other => Err(Error::ParseError {
            path: "bimodule".into(),
            message: format!("unknown bimodule kind {other:?}"),
        }),
    }
}

// ---------------------------------------------------------------------------
// generation
// ---------------------------------------------------------------------------

pub fn fixture_prestack(id: &str, field: Field) -> Result<Rc<Prestack>> {
    match id {
        "FIX0" => Ok(fixtures::fix0(field)),
        "FIX1" => Ok(fixtures::fix1(field)),
        "FIX2" => Ok(fixtures::fix2(field)),
        "FIX3" => Ok(fixtures::fix3(field)),
        "FIX4" => Ok(fixtures::fix4(field)),
        other => Err(Error::ParseError {
            path: "fixture".into(),
            message: format!("unknown fixture {other:?}; use one of {FIXTURE_IDS:?}"),
        }),
    }
}

fn default_bimodules(seed: u64) -> Vec<BimoduleSpec> {
    vec![
        BimoduleSpec {
            name: "diagonal".into(),
            kind: "diagonal".into(),
            object: None,
            seed: None,
            max_dim: None,
        },
        BimoduleSpec {
            name: "random0".into(),
            kind: "random".into(),
            object: None,
            seed: Some(seed),
            max_dim: Some(2),
        },
    ]
}

pub fn generate_fixture(id: &str, field: Field) -> Result<InstanceFile> {
    let pres = fixture_prestack(id, field)?;
    Ok(encode(
        id,
        &pres,
        None,
        default_bimodules(0),
        &CheckConfig::default(),
    ))
}

/// A random poset base with at most 3 objects, constant fiber drawn from a
/// small library, and strict restriction functors built from a monotone
/// potential, so functoriality holds by construction.
pub fn generate_random(seed: u64, field: Field) -> InstanceFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3usize);
    let names: Vec<String> = (0..n).map(|i| format!("O{i}")).collect();
    // random order relation on the chain positions, transitively closed
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(0.6) {
                rel[i][j] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rel[i][k] && rel[k][j] {
                    rel[i][j] = true;
                }
            }
        }
    }
    let arrow_name = |i: usize, j: usize| {
        if i == j {
            format!("1O{i}")
        } else {
            format!("m{i}{j}")
        }
    };
    let mut morphisms = Vec::new();
    let mut identities = BTreeMap::new();
    let mut composition = BTreeMap::new();
    for i in 0..n {
        identities.insert(names[i].clone(), arrow_name(i, i));
        for j in 0..n {
            if rel[i][j] {
                morphisms.push((arrow_name(i, j), names[i].clone(), names[j].clone()));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !rel[i][j] {
                continue;
            }
            for k in 0..n {
                if rel[j][k] {
                    composition
                        .insert((arrow_name(j, k), arrow_name(i, j)), arrow_name(i, k));
                }
            }
        }
    }
    let base = FiniteCategory::new(names.clone(), morphisms, identities, composition)
        .expect("generated base is a category");

    // fiber library: the ground field, the dual numbers with the truncation
    // endofunctor, or two objects with the swap automorphism
    let kind = rng.gen_range(0..3usize);
    // a monotone 0/1 potential over the poset: arrows crossing the step get
    // the nontrivial endofunctor, so pullback is functorial on the nose
    let cut: Vec<bool> = {
        let raw: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2usize)).collect();
        // enforce monotonicity along the order
        (0..n)
            .map(|j| (0..n).any(|i| rel[i][j] && raw[i] == 1) || raw[j] == 1)
            .collect()
    };
    let fiber: Rc<LinearCategory> = match kind {
        0 => crate::lincat::ground_category(field),
        1 => fixtures::dual_numbers(field),
        _ => {
            let mut b = LinearCategoryBuilder::new(field);
            let x = b.add_object("X".into());
            let y = b.add_object("Y".into());
            b.set_hom(x, x, vec!["1X".into()]);
            b.set_hom(y, y, vec!["1Y".into()]);
            b.set_hom(x, y, vec![]);
            b.set_hom(y, x, vec![]);
            b.set_identity(x, vec![field.one()]);
            b.set_identity(y, vec![field.one()]);
            b.set_compose(x, x, x, 0, 0, vec![field.one()]);
            b.set_compose(y, y, y, 0, 0, vec![field.one()]);
            b.build().expect("discrete pair is a category")
        }
    };
    let nontrivial = |f: &Rc<LinearCategory>| -> LinearFunctor {
        match kind {
            1 => {
                // truncation: x ↦ 0 on the dual numbers
                let mut hom_mats = HashMap::new();
                hom_mats.insert((0, 0), ExactMatrix::from_i64(field, &[&[1, 0], &[0, 0]]));
                LinearFunctor {
                    source: f.clone(),
                    target: f.clone(),
                    obj_map: vec![0],
                    hom_mats,
                }
            }
            2 => {
                // swap the two objects
                let mut hom_mats = HashMap::new();
                hom_mats.insert((0, 0), ExactMatrix::identity(field, 1));
                hom_mats.insert((1, 1), ExactMatrix::identity(field, 1));
                hom_mats.insert((0, 1), ExactMatrix::zeros(field, 0, 0));
                hom_mats.insert((1, 0), ExactMatrix::zeros(field, 0, 0));
                LinearFunctor {
                    source: f.clone(),
                    target: f.clone(),
                    obj_map: vec![1, 0],
                    hom_mats,
                }
            }
            _ => LinearFunctor::identity(f),
        }
    };
    let fibers: Vec<Rc<LinearCategory>> = (0..n).map(|_| fiber.clone()).collect();
    let restrictions: Vec<LinearFunctor> = base
        .morphisms
        .iter()
        .map(|&(_, s, d)| {
            // for the idempotent truncation a monotone step works; the swap
            // is an involution, so any potential difference is functorial
            let twist = match kind {
                1 => cut[d] && !cut[s],
                2 => cut[d] != cut[s],
                _ => false,
            };
            if twist {
                nontrivial(&fiber)
            } else {
                LinearFunctor::identity(&fiber)
            }
        })
        .collect();
    let pres = Rc::new(Prestack {
        base,
        fibers,
        restrictions,
        coherence: HashMap::new(),
    });
    pres.validate().expect("generated prestack is strict");
    let mut cfg = CheckConfig::default();
    cfg.seed = seed;
    encode(
        &format!("RAND{seed}"),
        &pres,
        None,
        default_bimodules(seed),
        &cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn fixture_round_trip_bytes() {
        for id in FIXTURE_IDS {
            let file = generate_fixture(id, q()).unwrap();
            let json = to_json(&file);
            let inst = decode(&parse_json(&json, "mem").unwrap()).unwrap();
            let again = to_json(&encode_instance(&inst));
            assert_eq!(json, again, "round trip differs for {id}");
        }
    }

    #[test]
    fn fixture_round_trip_bytes_fp() {
        let f = Field::prime(5).unwrap();
        let file = generate_fixture("FIX4", f).unwrap();
        let json = to_json(&file);
        let inst = decode(&parse_json(&json, "mem").unwrap()).unwrap();
        assert_eq!(json, to_json(&encode_instance(&inst)));
    }

    #[test]
    fn random_generation_deterministic() {
        for seed in [0, 1, 7, 42] {
            let a = to_json(&generate_random(seed, q()));
            let b = to_json(&generate_random(seed, q()));
            assert_eq!(a, b);
            let inst = decode(&parse_json(&a, "mem").unwrap()).unwrap();
            assert_eq!(a, to_json(&encode_instance(&inst)));
            inst.prestack.validate().unwrap();
        }
    }

    #[test]
    fn twisted_fixture_round_trip() {
        // nontrivial coherence cells survive serialization
        let pres = fixtures::fix_twisted_square(q());
        let file = encode(
            "TWISTED",
            &pres,
            None,
            default_bimodules(0),
            &CheckConfig::default(),
        );
        let json = to_json(&file);
        let inst = decode(&parse_json(&json, "mem").unwrap()).unwrap();
        assert_eq!(json, to_json(&encode_instance(&inst)));
        assert_eq!(inst.prestack.coherence.len(), 2);
    }

    #[test]
    fn bad_schema_version() {
        let mut file = generate_fixture("FIX0", q()).unwrap();
        file.schema_version = 99;
        assert!(matches!(decode(&file), Err(Error::SchemaVersion(99))));
    }

    #[test]
    fn missing_identity_reports_path() {
        let mut file = generate_fixture("FIX1", q()).unwrap();
        file.base.identities.remove("V");
        match decode(&file) {
            Err(Error::ValidationError { path, .. }) => assert_eq!(path, "/base/identities"),
            other => panic!("expected a validation error, got {:?}", other.err()),
        }
    }

    #[test]
    fn bad_prime_reports_path() {
        let mut file = generate_fixture("FIX0", q()).unwrap();
        file.field = FieldSpec {
            kind: "prime".into(),
            p: Some(6),
        };
        match decode(&file) {
            Err(Error::ValidationError { path, .. }) => assert_eq!(path, "/field/p"),
            other => panic!("expected a validation error, got {:?}", other.err()),
        }
    }

    #[test]
    fn fix3_base_is_not_a_poset() {
        let file = generate_fixture("FIX3", q()).unwrap();
        let inst = decode(&file).unwrap();
        assert!(!inst.base().is_poset());
        assert!(decode(&generate_fixture("FIX2", q()).unwrap())
            .unwrap()
            .base()
            .is_poset());
    }

    #[test]
    fn fix1_r_total_dim() {
        // the upper-triangular 2x2 algebra: two idempotents and one arrow
        let inst = decode(&generate_fixture("FIX1", q()).unwrap()).unwrap();
        let r = crate::prestack::r_category(&inst.prestack, &inst.prestack).unwrap();
        assert_eq!(r.cat.object_count(), 2);
        assert_eq!(r.cat.total_hom_dim(), 3);
    }
}
