//! The class `M_F` of F-morphisms and the axioms (A)–(E*).

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use serde_json::{json, Value};

use super::{f_exact_sequences, is_f_exact, seq_from, SubfunctorData};
use crate::error::Result;
use crate::module_cat::{
    canonical_sum, cokernel, compose, hom_space, image_factorization, kernel, zero_module, LambdaModule,
    ModuleMorphism,
};
use crate::rng::Rng;

/// `f ∈ M_F` when the coimage sequence `0 → Ker f → A → Im f → 0` and the image
/// sequence `0 → Im f → B → Coker f → 0` are both F-exact.
pub fn is_f_morphism(f_data: &SubfunctorData, f: &ModuleMorphism) -> Result<bool> {
    let im = image_factorization(f);
    let k = kernel(f);
    let coimage = seq_from(&k.inclusion, &im.epi);
    if !is_f_exact(f_data, &coimage)? {
        return Ok(false);
    }
    let ck = cokernel(f);
    is_f_exact(f_data, &seq_from(&im.mono, &ck.projection))
}

/// Memoized membership in `M_F`.
pub(crate) struct Membership<'a> {
    f: &'a SubfunctorData,
    memo: HashMap<ModuleMorphism, bool>,
}

impl<'a> Membership<'a> {
    pub(crate) fn new(f: &'a SubfunctorData) -> Self {
        Membership {
            f,
            memo: HashMap::new(),
        }
    }

    pub(crate) fn contains(&mut self, m: &ModuleMorphism) -> Result<bool> {
        if let Some(&hit) = self.memo.get(m) {
            return Ok(hit);
        }
        let verdict = is_f_morphism(self.f, m)?;
        self.memo.insert(m.clone(), verdict);
        Ok(verdict)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FClassBudget {
    /// Objects of the exhaustive morphism pool are canonical sums up to this dimension.
    pub object_dim: usize,
    /// Hom spaces with more elements than this are sampled.
    pub morphism_cap: usize,
    pub iso_trials: usize,
    /// Ends of the structured mono/epi pairs for (E) and (E*) go up to this dimension.
    pub structured_dim: usize,
    /// Elements drawn from each `F(C, A)` when building structured pairs.
    pub element_cap: usize,
    pub seed: u64,
}

impl Default for FClassBudget {
    fn default() -> Self {
        FClassBudget {
            object_dim: 2,
            morphism_cap: 16,
            iso_trials: 1,
            structured_dim: 2,
            element_cap: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomResult {
    pub pass: bool,
    pub checked: usize,
    pub witness: Option<Value>,
}

impl AxiomResult {
    fn new() -> Self {
        AxiomResult {
            pass: true,
            checked: 0,
            witness: None,
        }
    }

    fn record(&mut self, holds: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !holds && self.pass {
            self.pass = false;
            self.witness = Some(witness());
        }
    }
}

pub const AXIOMS: [&str; 7] = ["A", "B", "C", "D", "D*", "E", "E*"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MorphismClassVerdict {
    pub axioms: BTreeMap<String, AxiomResult>,
}

impl MorphismClassVerdict {
    pub fn axiom(&self, name: &str) -> &AxiomResult {
        &self.axioms[name]
    }

    /// Axioms (A)–(D*).
    pub fn f_class(&self) -> bool {
        AXIOMS[..5].iter().all(|a| self.axiom(a).pass)
    }

    /// All axioms (A)–(E*).
    pub fn hf_class(&self) -> bool {
        self.f_class() && self.axiom("E").pass && self.axiom("E*").pass
    }
}

pub(crate) fn canonical_objects(f: &SubfunctorData, bound: usize) -> Vec<LambdaModule> {
    f.skeleton()
        .canonical_objects(bound)
        .iter()
        .map(|parts| canonical_sum(f.cfg(), parts).expect("parts within N").object)
        .collect()
}

fn morphism_pool(src: &LambdaModule, tgt: &LambdaModule, cap: usize, rng: &mut Rng) -> Result<Vec<ModuleMorphism>> {
    let hom = hom_space(src, tgt)?;
    let total = (src.p().get() as u128).checked_pow(hom.dim() as u32).unwrap_or(u128::MAX);
    if total <= cap as u128 {
        return Ok(hom.elements());
    }
    let mut out = vec![ModuleMorphism::zero(src, tgt)];
    out.extend((1..cap).map(|_| rng.hom_element(&hom)));
    Ok(out)
}

/// Composable monos `(f, g)` with `f, g` the inclusions of realized F-exact sequences.
fn structured_mono_pairs(
    f: &SubfunctorData,
    budget: &FClassBudget,
    rng: &mut Rng,
) -> Result<Vec<(ModuleMorphism, ModuleMorphism)>> {
    let objects = canonical_objects(f, budget.structured_dim);
    let mut pairs = Vec::new();
    for a in &objects {
        for c1 in &objects {
            for e1 in f_exact_sequences(f, c1, a, budget.element_cap, rng)? {
                for c2 in &objects {
                    for e2 in f_exact_sequences(f, c2, e1.b(), budget.element_cap, rng)? {
                        pairs.push((e1.i().clone(), e2.i().clone()));
                    }
                }
            }
        }
    }
    Ok(pairs)
}

/// Composable epis `(f, g)` with `f, g` the projections of realized F-exact sequences.
fn structured_epi_pairs(
    f: &SubfunctorData,
    budget: &FClassBudget,
    rng: &mut Rng,
) -> Result<Vec<(ModuleMorphism, ModuleMorphism)>> {
    let objects = canonical_objects(f, budget.structured_dim);
    let mut pairs = Vec::new();
    for a2 in &objects {
        for c in &objects {
            for e2 in f_exact_sequences(f, c, a2, budget.element_cap, rng)? {
                for a1 in &objects {
                    for e1 in f_exact_sequences(f, e2.b(), a1, budget.element_cap, rng)? {
                        pairs.push((e1.p().clone(), e2.p().clone()));
                    }
                }
            }
        }
    }
    Ok(pairs)
}

type Pool = Vec<Vec<Vec<ModuleMorphism>>>;

/// The zero module and canonical sums up to `object_dim`, with `pool[x][y]` the
/// (possibly sampled) morphisms between them.
fn build_pool(f: &SubfunctorData, budget: &FClassBudget) -> Result<(Vec<LambdaModule>, Pool)> {
    let mut rng = Rng::fork(budget.seed, 0);
    let mut objects = vec![zero_module(f.cfg())];
    objects.extend(canonical_objects(f, budget.object_dim));
    let mut pool = Vec::new();
    for x in &objects {
        let mut row = Vec::new();
        for y in &objects {
            row.push(morphism_pool(x, y, budget.morphism_cap, &mut rng)?);
        }
        pool.push(row);
    }
    Ok((objects, pool))
}

/// Composable mono pairs and epi pairs `(f, g)` examined for (E) and (E*): those
/// of the pool, followed by the structured pairs.
pub(crate) fn composable_pairs(
    f: &SubfunctorData,
    budget: &FClassBudget,
) -> Result<(Vec<(ModuleMorphism, ModuleMorphism)>, Vec<(ModuleMorphism, ModuleMorphism)>)> {
    let (objects, pool) = build_pool(f, budget)?;
    let n = objects.len();
    let mut monos = Vec::new();
    let mut epis = Vec::new();
    for xi in 0..n {
        for yi in 0..n {
            for zi in 0..n {
                for fm in &pool[xi][yi] {
                    for gm in &pool[yi][zi] {
                        if fm.is_mono() && gm.is_mono() {
                            monos.push((fm.clone(), gm.clone()));
                        }
                        if fm.is_epi() && gm.is_epi() {
                            epis.push((fm.clone(), gm.clone()));
                        }
                    }
                }
            }
        }
    }
    let mut rng = Rng::fork(budget.seed, 2);
    monos.extend(structured_mono_pairs(f, budget, &mut rng)?);
    epis.extend(structured_epi_pairs(f, budget, &mut rng)?);
    Ok((monos, epis))
}

fn pair_witness(f: &ModuleMorphism, g: &ModuleMorphism) -> Value {
    json!({ "f": f, "g": g })
}

/// Evaluates (A)–(E*) for `M_F` over an exhaustive pool of morphisms between
/// small canonical objects, random isomorphism sandwiches, and structured
/// mono/epi pairs built from F-exact sequences.
pub fn check_fclass(f: &SubfunctorData, budget: &FClassBudget) -> Result<MorphismClassVerdict> {
    let mut rng = Rng::fork(budget.seed, 1);
    let mut member = Membership::new(f);
    let mut results: BTreeMap<String, AxiomResult> = AXIOMS.iter().map(|a| (a.to_string(), AxiomResult::new())).collect();
    let zero = zero_module(f.cfg());
    let (objects, pool) = build_pool(f, budget)?;

    for x in objects.iter().skip(1) {
        let zero_mono = ModuleMorphism::zero(&zero, x);
        let zero_epi = ModuleMorphism::zero(x, &zero);
        for m in [zero_mono, zero_epi] {
            let holds = member.contains(&m)?;
            results.get_mut("A").unwrap().record(holds, || json!({ "morphism": m }));
        }
    }

    for row in &pool {
        for maps in row {
            for m in maps {
                let inside = member.contains(m)?;
                for _ in 0..budget.iso_trials {
                    let (src2, y) = rng.conjugate(m.src());
                    let (tgt2, x) = rng.conjugate(m.tgt());
                    let y_inv = y.inverse().expect("conjugation is invertible");
                    let g = compose(&x, &compose(m, &y_inv)?)?;
                    debug_assert!(g.src() == &src2 && g.tgt() == &tgt2);
                    let holds = member.contains(&g)? == inside;
                    results.get_mut("B").unwrap().record(holds, || json!({ "f": m, "g": g }));
                }
                let k = kernel(m).inclusion;
                let c = cokernel(m).projection;
                let holds = inside == (member.contains(&k)? && member.contains(&c)?);
                results.get_mut("C").unwrap().record(holds, || json!({ "f": m, "kernel": k, "cokernel": c }));
            }
        }
    }

    let n = objects.len();
    for xi in 0..n {
        for yi in 0..n {
            for zi in 0..n {
                for fm in &pool[xi][yi] {
                    for gm in &pool[yi][zi] {
                        let gf = compose(gm, fm)?;
                        if fm.is_mono() && gf.is_mono() {
                            let holds = !member.contains(&gf)? || member.contains(fm)?;
                            results.get_mut("D").unwrap().record(holds, || pair_witness(fm, gm));
                        }
                        if gm.is_epi() && gf.is_epi() {
                            let holds = !member.contains(&gf)? || member.contains(gm)?;
                            results.get_mut("D*").unwrap().record(holds, || pair_witness(fm, gm));
                        }
                    }
                }
            }
        }
    }

    let (monos, epis) = composable_pairs(f, budget)?;
    for (fm, gm) in &monos {
        if member.contains(fm)? && member.contains(gm)? {
            let holds = member.contains(&compose(gm, fm)?)?;
            results.get_mut("E").unwrap().record(holds, || pair_witness(fm, gm));
        }
    }
    for (fm, gm) in &epis {
        if member.contains(fm)? && member.contains(gm)? {
            let holds = member.contains(&compose(gm, fm)?)?;
            results.get_mut("E*").unwrap().record(holds, || pair_witness(fm, gm));
        }
    }
    Ok(MorphismClassVerdict { axioms: results })
}
