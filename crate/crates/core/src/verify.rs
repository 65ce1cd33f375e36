//! Reproduction checks for the published classification results.
//!
//! Each criterion runs standalone and yields a [`CriterionOutcome`]; the CLI's
//! `verify-paper` subcommand and the acceptance test share these runners.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::beauville::{
    beauville_dimension, BeauvilleStructure, Classification, Constraints, Context, Dimension, KernelPolicy, Validation,
};
use crate::braid::{apply_aut, apply_braid, BraidMove, ClassTable};
use crate::catalog::{group, load_group_file};
use crate::error::{Error, Result};
use crate::group::{quotient, subgroup_generated, Elem, FiniteGroup, QuotientGroup, Subgroup};
use crate::invariants::{candidate_tuples, compute_invariants, hurwitz_bound};
use crate::limits::Limits;
use crate::morphisms::{all_automorphisms, automorphism_group, find_isomorphism, GroupHom};
use crate::oracle::{oracle_classify, OracleScope};
use crate::triples::{
    enumerate_triples, genus, is_generating_triple, is_hyperbolic, lift_stabilizer, sorted, stabilizer_set,
    triple_type, Triple, TripleType,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Ran, but only part of the statement is reproducible here.
    Partial,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Partial => "PARTIAL",
            Status::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: u64,
}

impl CriterionOutcome {
    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "criterion {} [{}] {}: {} ({:.2}s)", self.id, self.status, self.name, self.detail, self.seconds)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Include the `d(C5^3) = 3` search.
    pub z5_cubed: bool,
    /// Moduli `n` for the `C_n^3` construction; empty skips it.
    pub zn_values: Vec<u64>,
    /// Directory of GroupFiles covering every group of order below 25.
    pub group_files: Option<PathBuf>,
    /// Restrict to these criterion ids.
    pub only: Option<Vec<u32>>,
}

/// Findings accumulated by a criterion; any failure makes it fail.
struct Checks {
    notes: Vec<String>,
    failures: Vec<String>,
    partial: bool,
}

impl Checks {
    fn new() -> Self {
        Checks { notes: Vec::new(), failures: Vec::new(), partial: false }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn finish(self) -> (Status, String) {
        if !self.failures.is_empty() {
            return (Status::Fail, format!("failed: {}", self.failures.join("; ")));
        }
        (if self.partial { Status::Partial } else { Status::Pass }, self.notes.join("; "))
    }
}

fn run(id: u32, name: &str, budget: u64, f: impl FnOnce(&mut Checks) -> Result<()>) -> CriterionOutcome {
    let start = Instant::now();
    let mut checks = Checks::new();
    let (status, detail) = match f(&mut checks) {
        Ok(()) => checks.finish(),
        Err(Error::Resource(msg)) => (Status::Fail, format!("resource limit: {msg}")),
        Err(e) => (Status::Fail, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let (status, detail) = if status != Status::Fail && elapsed > Duration::from_secs(budget) {
        (Status::Fail, format!("{detail}; exceeded the {budget}s budget"))
    } else {
        (status, detail)
    };
    CriterionOutcome { id, name: name.into(), status, detail, seconds: elapsed.as_secs_f64(), budget_seconds: budget }
}

fn skipped(id: u32, name: &str, why: &str) -> CriterionOutcome {
    CriterionOutcome { id, name: name.into(), status: Status::Skipped, detail: why.into(), seconds: 0.0, budget_seconds: 0 }
}

/// Runs the selected criteria in order.
pub fn run_all(opts: &VerifyOptions) -> Vec<CriterionOutcome> {
    let wanted = |id: u32| opts.only.as_ref().is_none_or(|ids| ids.contains(&id));
    let mut out = Vec::new();
    if wanted(1) {
        out.push(criterion_orbit_uniqueness());
    }
    if wanted(2) {
        out.push(criterion_chi_minus_one());
    }
    if wanted(3) {
        out.push(criterion_chi_minus_five());
    }
    if wanted(4) {
        out.push(criterion_nonabelian_counts());
    }
    if wanted(5) {
        out.push(criterion_zn_construction(&opts.zn_values));
    }
    if wanted(6) {
        out.push(criterion_dimensions(opts.z5_cubed, opts.group_files.as_deref()));
    }
    if wanted(7) {
        out.push(criterion_properties());
    }
    if wanted(8) {
        out.push(criterion_oracle_equivalence(opts.z5_cubed));
    }
    if wanted(9) {
        out.push(criterion_invariant_formulas());
    }
    out
}

fn vector(g: &FiniteGroup, coords: &[i64]) -> Result<Elem> {
    g.element_from_vector(coords).ok_or_else(|| Error::Input(format!("{} has no vector naming", g.label())))
}

/// Criterion 1: one `Aut × B3` class for `C5^2` of type `[5,5,5]` and for `C5`.
pub fn criterion_orbit_uniqueness() -> CriterionOutcome {
    run(1, "unique triple classes for C5^2 and C5", 5, |c| {
        let g = group("C5^2")?;
        let t = [vector(&g, &[1, 0])?, vector(&g, &[0, 1])?, vector(&g, &[4, 4])?];
        let table = ClassTable::new(&g, &automorphism_group(&g), Some([5, 5, 5]));
        c.check(table.classes.len() == 1, format!("C5^2 [5,5,5]: {} class(es)", table.classes.len()));
        c.check(table.class_id(t) == Some(0), "C5^2 class contains [e1, e2, 4e1+4e2]");
        let z5 = group("C5")?;
        let table = ClassTable::new(&z5, &automorphism_group(&z5), None);
        c.check(table.classes.len() == 1, format!("C5: {} class(es)", table.classes.len()));
        c.check(table.class_id([1, 1, 3]) == Some(0), "C5 class contains [e1, e1, 3e1]");
        Ok(())
    })
}

/// Published representatives for `C5^2`, `n = 3`, `χ = −1`, kernels `(1, 1, ⟨e2⟩)`.
///
/// The first two triples are vectors in `C5^2`, the third holds multiples of `ē1` in `C5^2/⟨e2⟩`.
pub const Z5_SQUARED_CHI_MINUS_ONE: [([[i64; 2]; 3], [[i64; 2]; 3], [i64; 3]); 8] = [
    ([[0, 1], [3, 3], [2, 1]], [[4, 3], [3, 0], [3, 2]], [3, 3, 4]),
    ([[0, 1], [3, 3], [2, 1]], [[1, 4], [3, 1], [1, 0]], [1, 1, 3]),
    ([[4, 3], [0, 4], [1, 3]], [[4, 1], [4, 4], [2, 0]], [2, 2, 1]),
    ([[3, 1], [3, 4], [4, 0]], [[0, 3], [4, 1], [1, 1]], [4, 4, 2]),
    ([[2, 2], [2, 4], [1, 4]], [[0, 2], [4, 0], [1, 3]], [4, 4, 2]),
    ([[1, 1], [1, 2], [3, 2]], [[0, 2], [4, 0], [1, 3]], [2, 2, 1]),
    ([[4, 4], [4, 3], [2, 3]], [[0, 1], [2, 0], [3, 4]], [1, 1, 3]),
    ([[0, 1], [2, 2], [3, 2]], [[1, 4], [3, 1], [1, 0]], [3, 3, 4]),
];

/// The published `χ = −1` representatives as structures on `C5^2`.
pub fn z5_squared_rows(ctx: &Context<'_>) -> Result<Vec<BeauvilleStructure>> {
    let g = ctx.group();
    let trivial = ctx.trivial_kernel();
    let e1 = vector(g, &[1, 0])?;
    let k3 = ctx.kernel_index(&[vector(g, &[0, 1])?])?;
    let q = ctx.quotient(k3);
    let bar_e1 = q.project(e1);
    let mut out = Vec::new();
    for (s1, s2, s3) in Z5_SQUARED_CHI_MINUS_ONE {
        let full = |t: [[i64; 2]; 3]| -> Result<Triple> { Ok([vector(g, &t[0])?, vector(g, &t[1])?, vector(g, &t[2])?]) };
        let third = s3.map(|k| q.group.pow(bar_e1, k));
        out.push(BeauvilleStructure { kernels: vec![trivial, trivial, k3], triples: vec![full(s1)?, full(s2)?, third] });
    }
    Ok(out)
}

/// Row 8 as published repeats row 2's second triple and is not free; this replacement is the only
/// valid second triple through `e1` that completes it to the eighth class.
pub const Z5_SQUARED_ROW_EIGHT_S2: [[i64; 2]; 3] = [[2, 1], [2, 4], [1, 0]];

/// Criterion 2: eight classes for `C5^2`, `n = 3`, `χ = −1`, each published row in its own class.
pub fn criterion_chi_minus_one() -> CriterionOutcome {
    run(2, "C5^2 threefolds with chi = -1", 600, |c| {
        let g = group("C5^2")?;
        let ctx = Context::new(&g, Limits::from_env());
        let result = ctx.classify(3, &Constraints { chi: Some(-1), ..Default::default() })?;
        c.check(result.total() == 8, format!("{} classes", result.total()));
        let mut rows = z5_squared_rows(&ctx)?;
        let printed = ctx.validate(&rows[7])?;
        if !printed.free {
            c.partial = true;
            c.note("row 8 as printed is not free (3e1+2e2 and e1+4e2 span one line); checked with S2 = [2e1+e2, 2e1+4e2, e1]");
            let fix = Z5_SQUARED_ROW_EIGHT_S2;
            rows[7].triples[1] = [vector(&g, &fix[0])?, vector(&g, &fix[1])?, vector(&g, &fix[2])?];
        }
        let mut hit = vec![None; result.total()];
        for (r, s) in rows.iter().enumerate() {
            let v = ctx.validate(s)?;
            c.check(v.is_valid(), format!("row {} validates", r + 1));
            let matches: Vec<usize> = (0..result.total())
                .filter(|&i| ctx.equivalent(s, &result.classes[i].structure).unwrap_or(false))
                .collect();
            c.check(matches.len() == 1, format!("row {} lies in exactly one reported class", r + 1));
            if let [i] = matches[..] {
                c.check(hit[i].is_none(), format!("row {} has a class of its own", r + 1));
                hit[i] = Some(r);
            }
        }
        Ok(())
    })
}

/// Published per-row counts for `C5^2`, absolutely faithful, `χ = −5`; the rows differ only in Hodge numbers.
pub const Z5_SQUARED_CHI_MINUS_FIVE_ROWS: [usize; 13] = [2, 3, 1, 13, 3, 14, 4, 12, 8, 3, 7, 4, 3];

/// The total stated alongside those rows.
pub const Z5_SQUARED_CHI_MINUS_FIVE_STATED: usize = 76;

/// Criterion 3: the absolutely faithful count for `C5^2`, with the off-by-one localized.
pub fn criterion_chi_minus_five() -> CriterionOutcome {
    run(3, "C5^2 absolutely faithful threefolds", 7200, |c| {
        let g = group("C5^2")?;
        let ctx = Context::new(&g, Limits::from_env());
        let constraints = Constraints { kernels: KernelPolicy::Trivial, ..Default::default() };
        let result = ctx.classify(3, &constraints)?;
        let total = result.total();
        let row_sum: usize = Z5_SQUARED_CHI_MINUS_FIVE_ROWS.iter().sum();
        c.check(total == row_sum || total == Z5_SQUARED_CHI_MINUS_FIVE_STATED, format!("total {total}"));
        c.check(result.classes.iter().all(|k| k.invariants.chi == -5), "every class has chi = -5");
        let cells = result.cells();
        let cell_ok = cells.len() == 1 && cells[0].0 .1 == vec![[5, 5, 5]; 3];
        c.check(cell_ok, format!("single cell (trivial kernels, [5,5,5]^3) holding {total}"));
        let oracle = oracle_classify(&g, 3, &constraints, &OracleScope::Full, ctx.limits())?;
        c.check(oracle.total() == total, format!("brute-force total {}", oracle.total()));
        let verdict = if total == row_sum {
            format!(
                "matches the per-row counts (sum {row_sum}); the stated total {} is one short, in cell (1,1,1)/[5,5,5]^3",
                Z5_SQUARED_CHI_MINUS_FIVE_STATED
            )
        } else {
            format!("matches the stated total; the per-row counts sum to {row_sum}, one extra in cell (1,1,1)/[5,5,5]^3")
        };
        c.note(verdict);
        // Rows are separated by Hodge numbers only, which are not computed here.
        c.note("per-row split needs Hodge numbers and is not checked");
        Ok(())
    })
}

fn count_with(ctx: &Context<'_>, chi: i64) -> Result<Classification> {
    ctx.classify(3, &Constraints { chi: Some(chi), kernels: KernelPolicy::Trivial, types: None })
}

fn check_candidates(c: &mut Checks, label: &str, order: usize, chi: i64, result: &Classification) -> Result<()> {
    let candidates = candidate_tuples(chi)?;
    let sound = result
        .classes
        .iter()
        .all(|k| candidates.iter().any(|t| t.matches(order as u64, &k.types)));
    c.check(sound, format!("{label}: every class passes the candidate pruning for chi = {chi}"));
    Ok(())
}

/// Criterion 4: absolutely faithful counts for `PSL(2,7)` and `S5`.
pub fn criterion_nonabelian_counts() -> CriterionOutcome {
    run(4, "PSL(2,7) and S5 absolutely faithful threefolds", 3600, |c| {
        let psl = group("PSL(2,7)")?;
        let ctx = Context::new(&psl, Limits::from_env());
        let r = count_with(&ctx, -4)?;
        c.check(r.total() == 8, format!("PSL(2,7), chi = -4: {}", r.total()));
        let cells: BTreeMap<Vec<TripleType>, usize> = r.cells().into_iter().map(|((_, t), n)| (t, n)).collect();
        let expect: BTreeMap<Vec<TripleType>, usize> =
            [(vec![[2, 3, 7], [3, 3, 4], [7, 7, 7]], 4), (vec![[2, 3, 7], [3, 3, 7], [4, 4, 4]], 4)].into_iter().collect();
        c.check(cells == expect, format!("PSL(2,7) cells {cells:?}"));
        check_candidates(c, "PSL(2,7)", 168, -4, &r)?;

        let s5 = group("S5")?;
        let ctx = Context::new(&s5, Limits::from_env());
        for (chi, types) in [(-2, vec![[2, 4, 5], [2, 5, 6], [3, 4, 4]]), (-5, vec![[2, 4, 5], [3, 4, 4], [3, 6, 6]])] {
            let r = count_with(&ctx, chi)?;
            c.check(r.total() == 1, format!("S5, chi = {chi}: {}", r.total()));
            c.check(r.cells().iter().all(|((_, t), _)| *t == types), format!("S5, chi = {chi}: types {types:?}"));
            check_candidates(c, "S5", 120, chi, &r)?;
        }
        c.partial = true;
        c.note("exhaustiveness over all groups up to the order bound needs an external group database");
        Ok(())
    })
}

/// Lifted stabilizer sets of the `C_n^3` construction, as membership predicates in `(l, j, k)`.
fn zn_lifted_descriptions(n: i64) -> [Box<dyn Fn(i64, i64, i64) -> bool>; 3] {
    let m = move |x: i64| x.rem_euclid(n);
    [
        Box::new(move |_l, j, k| m(j + k) == 0 || m(j - k) == 0 || m(k) == 0),
        Box::new(move |l, _j, k| m(l - k) == 0 || m(l + k) == 0 || m(l) == 0),
        Box::new(move |l, j, _k| m(l - 2 * j) == 0 || m(j) == 0 || m(l - 3 * j) == 0),
    ]
}

/// The `C_n^3` structure with kernels `⟨e_i⟩`; returns quotients and triples.
pub fn zn_structure(g: &FiniteGroup) -> Result<(Vec<QuotientGroup>, Vec<Triple>)> {
    let e = |c: [i64; 3]| vector(g, &c);
    let kernels = [e([1, 0, 0])?, e([0, 1, 0])?, e([0, 0, 1])?];
    let quotients: Vec<QuotientGroup> =
        kernels.iter().map(|&k| quotient(g, &subgroup_generated(g, &[k])?)).collect::<Result<_>>()?;
    let lift = |q: &QuotientGroup, t: [[i64; 3]; 3]| -> Result<Triple> {
        Ok([q.project(e(t[0])?), q.project(e(t[1])?), q.project(e(t[2])?)])
    };
    let triples = vec![
        lift(&quotients[0], [[0, 1, -1], [0, 1, 1], [0, -2, 0]])?,
        lift(&quotients[1], [[1, 0, 1], [-1, 0, 1], [0, 0, -2]])?,
        lift(&quotients[2], [[2, 1, 0], [1, 0, 0], [-3, -1, 0]])?,
    ];
    Ok((quotients, triples))
}

/// Checks the defining conditions with explicit quotients, without a normal-subgroup lattice.
pub fn validate_with_quotients(quotients: &[QuotientGroup], triples: &[Triple]) -> Validation {
    let generating = quotients.iter().zip(triples).all(|(q, &t)| is_generating_triple(&q.group, t));
    let hyperbolic = quotients.iter().zip(triples).all(|(q, &t)| is_hyperbolic(triple_type(&q.group, t)));
    let minimal = (0..quotients.len()).all(|skip| {
        let mut acc: Option<Subgroup> = None;
        for (i, q) in quotients.iter().enumerate() {
            if i != skip {
                acc = Some(match acc {
                    None => q.kernel.clone(),
                    Some(a) => a.intersection(&q.kernel),
                });
            }
        }
        acc.is_some_and(|a| a.is_trivial())
    });
    let mut acc: Option<FixedBitSet> = None;
    for (q, &t) in quotients.iter().zip(triples) {
        let lifted = lift_stabilizer(q, t).lifted;
        acc = Some(match acc {
            None => lifted,
            Some(mut a) => {
                a.intersect_with(&lifted);
                a
            }
        });
    }
    let free = acc.is_some_and(|a| a.count_ones(..) == 1);
    Validation { generating, hyperbolic, minimal, free }
}

/// Criterion 5: the `C_n^3` construction for the given `n`, and no threefolds on `C2^3`, `C3^3`.
pub fn criterion_zn_construction(values: &[u64]) -> CriterionOutcome {
    if values.is_empty() {
        return skipped(5, "C_n^3 construction", "no moduli requested");
    }
    let budget = if values.iter().any(|&n| n > 7) { 1800 } else { 60 };
    run(5, "C_n^3 construction", budget, |c| {
        for &n in values {
            let g = group(&format!("C{n}^3"))?;
            let (quotients, triples) = zn_structure(&g)?;
            let v = validate_with_quotients(&quotients, &triples);
            let coprime = n % 2 != 0 && n % 3 != 0;
            c.check(v.is_valid() == coprime, format!("n = {n}: {v:?}"));
            let described = zn_lifted_descriptions(n as i64);
            let mut sets_ok = true;
            for (i, (q, &t)) in quotients.iter().zip(&triples).enumerate() {
                let lifted = lift_stabilizer(q, t).lifted;
                for x in g.elements() {
                    let [l, j, k] = <[u32; 3]>::try_from(g.vector_of(x).expect("vector naming")).expect("three coordinates");
                    sets_ok &= lifted.contains(x as usize) == described[i](l as i64, j as i64, k as i64);
                }
            }
            c.check(sets_ok, format!("n = {n}: lifted stabilizer sets match their descriptions"));
        }
        for p in [2, 3] {
            let g = group(&format!("C{p}^3"))?;
            let ctx = Context::new(&g, Limits::from_env());
            c.check(!ctx.exists(3, &Constraints::default())?, format!("no threefold on C{p}^3"));
        }
        Ok(())
    })
}

/// Group specs covering every isomorphism type of order below 25.
pub const SMALL_GROUP_SPECS: &[&str] = &[
    "C1",
    "C2",
    "C3",
    "C4",
    "C2^2",
    "C5",
    "C6",
    "S3",
    "C7",
    "C8",
    "C4 x C2",
    "C2^3",
    "D4",
    "Q2",
    "C9",
    "C3^2",
    "C10",
    "D5",
    "C11",
    "C12",
    "C6 x C2",
    "D6",
    "A4",
    "Q3",
    "C13",
    "C14",
    "D7",
    "C15",
    "C16",
    "C4^2",
    "Semidirect(C4 x C2, C2, [[a1*a2, a2]])",
    "Semidirect(C4, C4, [[a1^-1]])",
    "C8 x C2",
    "Semidirect(C8, C2, [[a1^5]])",
    "D8",
    "Semidirect(C8, C2, [[a1^3]])",
    "Q4",
    "C4 x C2^2",
    "D4 x C2",
    "Q2 x C2",
    "Semidirect(C4 x C2, C2, [[a1, a1^2*a2]])",
    "C2^4",
    "C17",
    "C18",
    "C6 x C3",
    "D9",
    "S3 x C3",
    "Semidirect(C3^2, C2, [[a1^-1, a2^-1]])",
    "C19",
    "C20",
    "C10 x C2",
    "D10",
    "Q5",
    "Semidirect(C5, C4, [[a1^2]])",
    "C21",
    "Semidirect(C7, C3, [[a1^2]])",
    "C22",
    "D11",
    "C23",
    "Semidirect(C3, C8, [[a1^-1]])",
    "C24",
    "SL(2,3)",
    "Q6",
    "C4 x S3",
    "D12",
    "Q3 x C2",
    "Semidirect(C3, D4, [[a1^-1], [a1]])",
    "C12 x C2",
    "C3 x D4",
    "C3 x Q2",
    "S4",
    "A4 x C2",
    "D6 x C2",
    "C6 x C2^2",
];

/// File name of the exported GroupFile for `spec`, e.g. `08_Q2.group`.
pub fn fixture_file_name(order: usize, spec: &str) -> String {
    let name: String = spec.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    format!("{order:02}_{}.group", name.trim_matches('_'))
}

/// Number of isomorphism types of groups of order `1..=24`.
pub const GROUP_COUNTS_BELOW_25: [usize; 24] = [1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14, 1, 5, 1, 5, 2, 2, 1, 15];

/// Invariant factors of an abelian group, from its element-order statistics.
fn abelian_invariants(g: &FiniteGroup) -> Vec<usize> {
    // Build the invariants of each Sylow subgroup from counts of elements with x^(p^k) = 1.
    let n = g.order();
    let mut factors: Vec<usize> = Vec::new();
    let mut m = n;
    let mut p = 2;
    let mut per_prime: Vec<Vec<usize>> = Vec::new();
    while m > 1 {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            // r_k = log_p #{x : x^(p^k) = 1}; the number of cyclic factors of order ≥ p^k is r_k − r_{k−1}.
            let count = |k: u32| g.elements().filter(|&x| g.pow(x, (p as i64).pow(k)) == 0).count();
            let log = |c: usize| (c as f64).log(p as f64).round() as usize;
            let r: Vec<usize> = (0..=e).map(|k| log(count(k))).collect();
            let mut parts = Vec::new();
            for k in 1..=e as usize {
                let at_least_k = r[k] - r[k - 1];
                let at_least_next = if k < e as usize { r[k + 1] - r[k] } else { 0 };
                for _ in 0..(at_least_k - at_least_next) {
                    parts.push(p.pow(k as u32));
                }
            }
            parts.sort_unstable_by(|a, b| b.cmp(a));
            per_prime.push(parts);
        }
        p += 1;
    }
    let width = per_prime.iter().map(|v| v.len()).max().unwrap_or(0);
    for i in 0..width {
        factors.push(per_prime.iter().map(|v| v.get(i).copied().unwrap_or(1)).product());
    }
    factors.reverse();
    factors
}

/// Abelianization `G/[G,G]` invariants.
pub fn abelianization(g: &FiniteGroup) -> Result<Vec<usize>> {
    let commutators: Vec<Elem> = g
        .elements()
        .flat_map(|x| g.elements().map(move |y| (x, y)))
        .map(|(x, y)| g.mul(g.mul(x, y), g.mul(g.inv(x), g.inv(y))))
        .collect();
    let derived = subgroup_generated(g, &commutators)?;
    Ok(abelian_invariants(&quotient(g, &derived)?.group))
}

/// Loads a directory of GroupFiles and checks it covers every group of order below 25 exactly once.
pub fn load_small_groups(dir: &Path, limits: &Limits) -> Result<Vec<FiniteGroup>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "group"))
        .collect();
    paths.sort();
    let groups: Vec<FiniteGroup> = paths.iter().map(|p| load_group_file(p, limits)).collect::<Result<_>>()?;
    let mut by_order: BTreeMap<usize, Vec<&FiniteGroup>> = BTreeMap::new();
    for g in &groups {
        by_order.entry(g.order()).or_default().push(g);
    }
    for (i, &want) in GROUP_COUNTS_BELOW_25.iter().enumerate() {
        let have = by_order.get(&(i + 1)).map_or(0, |v| v.len());
        if have != want {
            return Err(Error::Validation(format!("order {}: {have} group files, expected {want}", i + 1)));
        }
    }
    if by_order.keys().any(|&o| o >= 25) {
        return Err(Error::Validation("group files of order 25 or more".into()));
    }
    for list in by_order.values() {
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                if find_isomorphism(a, b).is_some() {
                    return Err(Error::Validation(format!("{} and {} are isomorphic", a.label(), b.label())));
                }
            }
        }
    }
    // Each label names the spec it was exported from; rebuild and compare.
    for g in &groups {
        let rebuilt = group(g.label())?;
        if rebuilt.order() != g.order() || rebuilt.is_abelian() != g.is_abelian() {
            return Err(Error::Validation(format!("{}: order or commutativity differs from its label", g.label())));
        }
        if abelianization(&rebuilt)? != abelianization(g)? || find_isomorphism(&rebuilt, g).is_none() {
            return Err(Error::Validation(format!("{}: not isomorphic to its label", g.label())));
        }
    }
    Ok(groups)
}

/// Criterion 6: Beauville dimensions of `C5^2`, `C7^2`, `C5^3`, and no threefolds below order 25.
pub fn criterion_dimensions(z5_cubed: bool, group_files: Option<&Path>) -> CriterionOutcome {
    run(6, "Beauville dimensions and small orders", 3600, |c| {
        let limits = Limits::from_env();
        for (spec, n_max, want) in [("C5^2", 3, 2), ("C7^2", 3, 2)] {
            let g = group(spec)?;
            let d = beauville_dimension(&Context::new(&g, limits), n_max)?;
            c.check(d == Dimension::Exact { n: want }, format!("d({spec}) = {d:?}"));
        }
        if z5_cubed {
            let g = group("C5^3")?;
            let d = beauville_dimension(&Context::new(&g, limits), 3)?;
            c.check(d == Dimension::Exact { n: 3 }, format!("d(C5^3) = {d:?}"));
        } else {
            c.partial = true;
            c.note("d(C5^3) not requested");
        }
        let catalog: Vec<FiniteGroup> = SMALL_GROUP_SPECS.iter().map(|s| group(s)).collect::<Result<_>>()?;
        let empty = catalog.iter().all(|g| !Context::new(g, limits).exists(3, &Constraints::default()).unwrap_or(true));
        c.check(empty, format!("no threefolds on the {} catalog groups of order < 25", catalog.len()));
        match group_files {
            Some(dir) => {
                let groups = load_small_groups(dir, &limits)?;
                let empty = groups.iter().all(|g| !Context::new(g, limits).exists(3, &Constraints::default()).unwrap_or(true));
                c.check(empty, format!("no threefolds on the {} ingested groups of order < 25", groups.len()));
            }
            None => {
                c.partial = true;
                c.note("no group files supplied");
            }
        }
        Ok(())
    })
}

fn random_braid_word<R: Rng>(rng: &mut R, h: &FiniteGroup, mut t: Triple) -> Triple {
    for _ in 0..rng.gen_range(0..8) {
        t = apply_braid(h, BraidMove::ALL[rng.gen_range(0..4)], t);
    }
    t
}

/// Criterion 7: property checks on random and exhaustive samples.
pub fn criterion_properties() -> CriterionOutcome {
    run(7, "property suites", 300, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for spec in ["C5^2", "S5", "PSL(2,7)"] {
            let h = group(spec)?;
            let aut = automorphism_group(&h);
            let all = enumerate_triples(&h, None);
            c.check(all.iter().all(|&t| genus(h.order(), triple_type(&h, t)).is_ok()), format!("{spec}: Hurwitz integrality"));
            let mut relation = true;
            let mut invariant = true;
            for _ in 0..1000 {
                let t = all[rng.gen_range(0..all.len())];
                let s1 = |x| apply_braid(&h, BraidMove::Sigma1, x);
                let s2 = |x| apply_braid(&h, BraidMove::Sigma2, x);
                relation &= s1(s2(s1(t))) == s2(s1(s2(t)));
                let sigma = stabilizer_set(&h, t);
                let ty = sorted(triple_type(&h, t));
                let g0 = genus(h.order(), ty)?;
                let u = random_braid_word(&mut rng, &h, t);
                invariant &= sorted(triple_type(&h, u)) == ty && stabilizer_set(&h, u) == sigma;
                let phi = aut.random(&mut rng);
                let v = apply_aut(&phi, t);
                let mut moved = FixedBitSet::with_capacity(h.order());
                sigma.ones().for_each(|x| moved.insert(phi.apply(x as Elem) as usize));
                invariant &= stabilizer_set(&h, v) == moved && genus(h.order(), triple_type(&h, v))? == g0;
            }
            c.check(relation, format!("{spec}: braid relation on 1000 triples"));
            c.check(invariant, format!("{spec}: type, genus and stabilizer-set invariance"));
            let lattice = crate::morphisms::NormalLattice::new(&h);
            let mut homomorphic = true;
            for k in lattice.subgroups() {
                let q = quotient(&h, k)?;
                for x in h.elements() {
                    for y in h.elements() {
                        homomorphic &= q.project(h.mul(x, y)) == q.group.mul(q.project(x), q.project(y));
                    }
                }
                homomorphic &= h.order() == k.order() * q.group.order();
            }
            c.check(homomorphic, format!("{spec}: every quotient projection is a homomorphism"));
            if spec != "PSL(2,7)" {
                let auts = all_automorphisms(&h, &Limits::default())?;
                let set: std::collections::HashSet<&GroupHom> = auts.iter().collect();
                let closed = auts.iter().all(|a| set.contains(&a.inverse()) && auts.iter().all(|b| set.contains(&a.compose(b))));
                c.check(closed, format!("{spec}: automorphisms closed under composition and inversion"));
            }
        }
        // Freeness is constant along orbits of the full action.
        let g = group("C5^2")?;
        let ctx = Context::new(&g, Limits::default());
        let valid = ctx.classify(3, &Constraints { chi: Some(-1), ..Default::default() })?;
        let t = valid.classes[0].structure.triples[0];
        let non_free = BeauvilleStructure { kernels: vec![0, 0], triples: vec![t, t] };
        let mut stable = true;
        for s in valid.classes.iter().map(|k| k.structure.clone()).chain([non_free]) {
            let before = ctx.is_free(&s)?;
            for _ in 0..100 {
                let alpha = ctx.automorphisms().random(&mut rng);
                let mut tau: Vec<usize> = (0..s.kernels.len()).collect();
                for i in (1..tau.len()).rev() {
                    tau.swap(i, rng.gen_range(0..=i));
                }
                let mut moved = ctx.act(&s, &alpha, &tau);
                for (k, t) in moved.kernels.iter().zip(moved.triples.iter_mut()) {
                    *t = random_braid_word(&mut rng, &ctx.quotient(*k).group, *t);
                }
                stable &= ctx.is_free(&moved)? == before && (!before || ctx.validate(&moved)?.is_valid());
            }
        }
        c.check(stable, "freeness unchanged under 100 random action elements per structure");
        Ok(())
    })
}

/// Whether the fiber-route classes map bijectively onto the brute-force orbits.
pub fn oracle_agrees(ctx: &Context<'_>, fiber: &Classification, oracle: &crate::oracle::OracleResult) -> bool {
    if fiber.total() != oracle.total() {
        return false;
    }
    let mut hit = vec![false; oracle.total()];
    for k in &fiber.classes {
        let ks: Vec<Subgroup> = k.structure.kernels.iter().map(|&i| ctx.lattice().get(i).clone()).collect();
        match oracle.orbit_of(&ks, &k.structure.triples) {
            Some(o) if !hit[o] => hit[o] = true,
            _ => return false,
        }
    }
    true
}

/// Criterion 8: fiber route against brute force.
pub fn criterion_oracle_equivalence(z5_cubed: bool) -> CriterionOutcome {
    run(8, "fiber route against brute force", 1800, |c| {
        let limits = Limits::from_env();
        let g = group("C5^2")?;
        let ctx = Context::new(&g, limits);
        for (n, constraints) in [(2, Constraints::default()), (3, Constraints { chi: Some(-1), ..Default::default() })] {
            let fiber = ctx.classify(n, &constraints)?;
            let oracle = oracle_classify(&g, n, &constraints, &OracleScope::Full, &limits)?;
            c.check(oracle_agrees(&ctx, &fiber, &oracle), format!("C5^2, n = {n}: {} = {}", fiber.total(), oracle.total()));
        }
        let g3 = group("C5^3")?;
        let ctx3 = Context::new(&g3, limits);
        let lines: Vec<usize> = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
            .iter()
            .map(|v| ctx3.kernel_index(&[vector(&g3, v)?]))
            .collect::<Result<_>>()?;
        let rep = ctx3.kernel_representative(&lines);
        let constraints = Constraints { kernels: KernelPolicy::Explicit(rep.clone()), ..Default::default() };
        let fiber = ctx3.classify(3, &constraints)?;
        let fixed: Vec<Subgroup> = rep.iter().map(|&k| ctx3.lattice().get(k).clone()).collect();
        let oracle = oracle_classify(&g3, 3, &Constraints::default(), &OracleScope::FixedKernels(fixed), &limits)?;
        c.check(oracle_agrees(&ctx3, &fiber, &oracle), format!("C5^3, three coordinate lines: {} = {}", fiber.total(), oracle.total()));
        if !z5_cubed {
            c.note("C5^3 restricted to one kernel orbit");
        }
        Ok(())
    })
}

/// Criterion 9: invariant formulas and the order bound.
pub fn criterion_invariant_formulas() -> CriterionOutcome {
    run(9, "invariant formulas", 1, |c| {
        let a = compute_invariants(25, &[6, 6, 2])?;
        let b = compute_invariants(25, &[6, 6, 6])?;
        c.check(a.chi == -1 && b.chi == -5, format!("chi {} and {}", a.chi, b.chi));
        for (chi, want) in [(-1i64, 769u64), (-5, 1721)] {
            // Largest N with N² ≤ 168²·21·|χ|, by bisection.
            let target = 168u128 * 168 * 21 * chi.unsigned_abs() as u128;
            let (mut lo, mut hi) = (0u128, target + 1);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if mid * mid <= target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let bound = hurwitz_bound(chi)?;
            c.check(bound == want && bound as u128 == lo, format!("bound for chi = {chi}: {bound}"));
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_invariants_of_products() {
        assert_eq!(abelian_invariants(&group("C4 x C2").unwrap()), vec![2, 4]);
        assert_eq!(abelian_invariants(&group("C6 x C2^2").unwrap()), vec![2, 2, 6]);
        assert_eq!(abelian_invariants(&group("C12").unwrap()), vec![12]);
        assert_eq!(abelianization(&group("S4").unwrap()).unwrap(), vec![2]);
        assert_eq!(abelianization(&group("Q2").unwrap()).unwrap(), vec![2, 2]);
        assert_eq!(abelianization(&group("A4").unwrap()).unwrap(), vec![3]);
    }

    #[test]
    fn invariant_formula_criterion() {
        let out = criterion_invariant_formulas();
        assert_eq!(out.status, Status::Pass, "{out}");
    }
}
