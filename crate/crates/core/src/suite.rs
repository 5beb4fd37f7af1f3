//! Randomized suite for the Yoneda calculus: pushout/pullback laws, Baer sums
//! and the long exact sequences.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::ext::{ext, verify_les};
use crate::module_cat::{compose, hom_space, CategoryConfig, LambdaModule, ModuleMorphism};
use crate::rng::Rng;
use crate::ses::{baer_sum, baer_sum_ordered, pullback_ses, pushout_ses, split_ses, BaerOrder, ShortExactSeq};

/// Deliberate defects for negative controls of the suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Pushouts return the split sequence instead.
    SplitPushouts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub cfg: CategoryConfig,
    /// Random modules have dimension in `1..=max_dim`.
    pub max_dim: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawResult {
    pub pass: bool,
    pub checked: usize,
    pub witness: Option<Value>,
}

pub const LAWS: [&str; 9] = [
    "a", "b", "c", "d", "e", "baer-additive", "baer-split-identity", "baer-order", "les",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub trials: usize,
    pub laws: BTreeMap<String, LawResult>,
    pub warning: Option<String>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.laws.values().all(|l| l.pass)
    }

    fn merge(&mut self, name: &str, holds: bool, witness: impl FnOnce() -> Value) {
        let law = self.laws.get_mut(name).expect("known law");
        law.checked += 1;
        if !holds && law.pass {
            law.pass = false;
            law.witness = Some(witness());
        }
    }
}

fn pushout(e: &ShortExactSeq, f: &ModuleMorphism, fault: Option<Fault>) -> Result<ShortExactSeq> {
    match fault {
        Some(Fault::SplitPushouts) => split_ses(e.c(), f.tgt()),
        None => Ok(pushout_ses(e, f)?.0),
    }
}

fn pullback(e: &ShortExactSeq, g: &ModuleMorphism) -> Result<ShortExactSeq> {
    Ok(pullback_ses(e, g)?.0)
}

fn class(e: &ShortExactSeq) -> Result<Vec<u32>> {
    ext(e.c(), e.a())?.classify(e)
}

/// A random sequence in `Ext(C, A)` with its middle term twisted by a random isomorphism.
fn random_sequence(c: &LambdaModule, a: &LambdaModule, rng: &mut Rng) -> Result<ShortExactSeq> {
    let basis = ext(c, a)?;
    let coords = rng.vector(c.p(), basis.dim());
    let e = basis.realize(&coords)?;
    let (_, phi) = rng.conjugate(e.b());
    let phi_inv = phi.inverse().expect("conjugation is invertible");
    ShortExactSeq::from_maps(compose(&phi, e.i())?, compose(e.p(), &phi_inv)?)
}

fn random_map(src: &LambdaModule, tgt: &LambdaModule, rng: &mut Rng) -> Result<ModuleMorphism> {
    Ok(rng.hom_element(&hom_space(src, tgt)?))
}

fn run_trial(config: &SuiteConfig, index: usize, fault: Option<Fault>) -> Result<Vec<(&'static str, bool, Value)>> {
    let mut rng = Rng::fork(config.seed, index as u64);
    let cfg = config.cfg;
    let module = |rng: &mut Rng| {
        let d = 1 + rng.index(config.max_dim);
        rng.module(cfg, d)
    };
    let a = module(&mut rng);
    let c = module(&mut rng);
    let a1 = module(&mut rng);
    let a2 = module(&mut rng);
    let c1 = module(&mut rng);
    let c2 = module(&mut rng);
    let x = module(&mut rng);
    let e = random_sequence(&c, &a, &mut rng)?;
    let f = random_map(&a, &a1, &mut rng)?;
    let f2 = random_map(&a1, &a2, &mut rng)?;
    let g = random_map(&c1, &c, &mut rng)?;
    let g2 = random_map(&c2, &c1, &mut rng)?;
    let mut out: Vec<(&'static str, bool, Value)> = Vec::new();
    let base = class(&e)?;
    let ctx = || json!({ "sequence": e, "f": f, "f2": f2, "g": g, "g2": g2 });

    let by_id_a = class(&pushout(&e, &ModuleMorphism::identity(&a), fault)?)?;
    let by_id_c = class(&pullback(&e, &ModuleMorphism::identity(&c))?)?;
    out.push(("a", by_id_a == base && by_id_c == base, ctx()));

    let lhs = class(&pushout(&e, &compose(&f2, &f)?, fault)?)?;
    let rhs = class(&pushout(&pushout(&e, &f, fault)?, &f2, fault)?)?;
    out.push(("b", lhs == rhs, ctx()));

    let lhs = class(&pullback(&e, &compose(&g, &g2)?)?)?;
    let rhs = class(&pullback(&pullback(&e, &g)?, &g2)?)?;
    out.push(("c", lhs == rhs, ctx()));

    let lhs = class(&pullback(&pushout(&e, &f, fault)?, &g)?)?;
    let rhs = class(&pushout(&pullback(&e, &g)?, &f, fault)?)?;
    out.push(("d", lhs == rhs, ctx()));

    let zero_a = class(&pushout(&e, &ModuleMorphism::zero(&a, &x), fault)?)?;
    let zero_c = class(&pullback(&e, &ModuleMorphism::zero(&x, &c))?)?;
    out.push(("e", zero_a.iter().chain(&zero_c).all(|&v| v == 0), ctx()));

    let p = cfg.p();
    let e2 = random_sequence(&c, &a, &mut rng)?;
    let sum = baer_sum(&e, &e2)?;
    let expected: Vec<u32> = base.iter().zip(class(&e2)?).map(|(&u, v)| p.add(u, v)).collect();
    out.push(("baer-additive", class(&sum)? == expected, json!({ "e1": e, "e2": e2 })));
    let with_split = baer_sum(&e, &split_ses(&c, &a)?)?;
    out.push(("baer-split-identity", class(&with_split)? == base, json!({ "sequence": e })));
    let other = baer_sum_ordered(&e, &e2, BaerOrder::PushoutFirst)?;
    out.push(("baer-order", class(&other)? == class(&sum)?, json!({ "e1": e, "e2": e2 })));

    let les = verify_les(&e, &x)?;
    out.push(("les", les.all_exact(), json!({ "sequence": e, "X": x, "report": les })));
    Ok(out)
}

/// Runs `trials` independent instances; each trial draws its own stream from
/// the seed, so the report does not depend on the number of worker threads.
pub fn run_core_suite(config: &SuiteConfig, fault: Option<Fault>) -> Result<SuiteReport> {
    let results: Vec<_> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t, fault))
        .collect::<Result<Vec<_>>>()?;
    let mut report = SuiteReport {
        trials: config.trials,
        laws: LAWS
            .iter()
            .map(|&l| {
                (
                    l.to_string(),
                    LawResult {
                        pass: true,
                        checked: 0,
                        witness: None,
                    },
                )
            })
            .collect(),
        warning: (config.trials == 0).then(|| "trials = 0: nothing was checked".to_string()),
    };
    for trial in results {
        for (name, holds, witness) in trial {
            report.merge(name, holds, || witness);
        }
    }
    Ok(report)
}
