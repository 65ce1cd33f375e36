//! Serializable reports for classification runs.

use serde::Serialize;

use crate::beauville::{BeauvilleStructure, Classification, Context};
use crate::braid::OrbitClass;
use crate::group::FiniteGroup;
use crate::triples::TripleType;

#[derive(Debug, Clone, Serialize)]
pub struct ClassEntry {
    /// Generators of each kernel, as element names.
    pub kernel_tuple: Vec<Vec<String>>,
    pub triples: Vec<[String; 3]>,
    pub type_tuple: Vec<TripleType>,
    pub genera: Vec<u64>,
    pub chi: i64,
    pub self_intersection: i64,
    pub euler: i64,
    pub kodaira: usize,
    pub canonical_key: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellEntry {
    pub kernel_tuple: Vec<Vec<String>>,
    /// Sorted types, sorted as a multiset.
    pub type_tuple: Vec<TripleType>,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub group_spec: String,
    pub n: usize,
    /// The kernel tuple shared by every class, or of the only kernel orbit searched.
    pub kernel_tuple: Option<Vec<Vec<String>>>,
    pub classes: Vec<ClassEntry>,
    pub cells: Vec<CellEntry>,
    pub total_count: usize,
    pub oracle_checked: bool,
    pub diagnostics: Vec<String>,
}

/// Generator names of every kernel in a tuple of lattice indices.
pub fn kernel_names(ctx: &Context<'_>, kernels: &[usize]) -> Vec<Vec<String>> {
    let g = ctx.group();
    kernels
        .iter()
        .map(|&k| ctx.lattice().get(k).generators(g).iter().map(|&x| g.element_name(x)).collect())
        .collect()
}

/// Stable text key of a structure: kernel indices and element indices.
pub fn canonical_key(s: &BeauvilleStructure) -> String {
    s.kernels
        .iter()
        .zip(&s.triples)
        .map(|(k, t)| format!("{k}:{},{},{}", t[0], t[1], t[2]))
        .collect::<Vec<_>>()
        .join("/")
}

fn shared_kernels(result: &Classification) -> Option<&[usize]> {
    match result.classes.split_first() {
        Some((first, rest)) => {
            let k = &first.structure.kernels;
            rest.iter().all(|c| &c.structure.kernels == k).then_some(k.as_slice())
        }
        None => (result.kernel_orbits.len() == 1).then(|| result.kernel_orbits[0].as_slice()),
    }
}

pub fn class_report(ctx: &Context<'_>, group_spec: &str, result: &Classification, oracle_checked: bool) -> ClassReport {
    let classes = result
        .classes
        .iter()
        .map(|c| {
            let s = &c.structure;
            ClassEntry {
                kernel_tuple: kernel_names(ctx, &s.kernels),
                triples: s.kernels.iter().zip(&s.triples).map(|(&k, t)| t.map(|x| ctx.element_name(k, x))).collect(),
                type_tuple: c.types.clone(),
                genera: c.genera.clone(),
                chi: c.invariants.chi,
                self_intersection: c.invariants.self_intersection,
                euler: c.invariants.euler,
                kodaira: c.invariants.kodaira,
                canonical_key: canonical_key(s),
            }
        })
        .collect();
    let cells = result
        .cells()
        .into_iter()
        .map(|((kernels, types), count)| CellEntry { kernel_tuple: kernel_names(ctx, &kernels), type_tuple: types, count })
        .collect();
    ClassReport {
        group_spec: group_spec.to_string(),
        n: result.n,
        kernel_tuple: shared_kernels(result).map(|k| kernel_names(ctx, k)),
        classes,
        cells,
        total_count: result.total(),
        oracle_checked,
        diagnostics: result.diagnostics.clone(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitEntry {
    pub group: String,
    #[serde(rename = "type")]
    pub ty: TripleType,
    pub genus: u64,
    pub orbit_size: usize,
    pub braid_orbit_size: usize,
    pub representative: [String; 3],
}

pub fn orbit_report(h: &FiniteGroup, classes: &[OrbitClass]) -> Vec<OrbitEntry> {
    classes
        .iter()
        .map(|c| OrbitEntry {
            group: h.label().to_string(),
            ty: c.ty,
            genus: c.genus,
            orbit_size: c.orbit_size,
            braid_orbit_size: c.braid_orbit_size,
            representative: c.representative.map(|x| h.element_name(x)),
        })
        .collect()
}
