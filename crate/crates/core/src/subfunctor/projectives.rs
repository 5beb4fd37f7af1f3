//! Relative projectives and injectives of a subfunctor.

use serde::Serialize;
use serde_json::{json, Value};

use super::{is_f_exact, SubfunctorData};
use crate::error::Result;
use crate::ext::hom_map_matrix;
use crate::module_cat::{cokernel, direct_sum, hom_basis, hom_space, kernel, LambdaModule, ModuleMorphism};
use crate::rng::{elements_capped, Rng};
use crate::ses::ShortExactSeq;

/// Indecomposables `M_k` with `U_{k,j} = 0` for every `j`.
pub fn relative_projectives(f: &SubfunctorData) -> Vec<usize> {
    let n = f.skeleton().n();
    (1..=n).filter(|&k| (1..=n).all(|j| f.get(k, j).dim() == 0)).collect()
}

/// Indecomposables `M_k` with `U_{i,k} = 0` for every `i`.
pub fn relative_injectives(f: &SubfunctorData) -> Vec<usize> {
    let n = f.skeleton().n();
    (1..=n).filter(|&k| (1..=n).all(|i| f.get(i, k).dim() == 0)).collect()
}

/// Every realized class of every `Ext(M_i, M_j)`, capped per pair.
fn skeleton_sequences(f: &SubfunctorData, cap: usize, seed: u64) -> Result<Vec<(ShortExactSeq, bool)>> {
    let sk = f.skeleton();
    let mut rng = Rng::new(seed);
    let mut out = Vec::new();
    for (i, j) in sk.pairs() {
        let basis = sk.ext(i, j);
        for v in elements_capped(sk.cfg().p(), basis.dim(), cap, &mut rng) {
            let e = basis.realize(&v)?;
            let exact = is_f_exact(f, &e)?;
            out.push((e, exact));
        }
    }
    Ok(out)
}

fn hom_from_onto(x: &LambdaModule, e: &ShortExactSeq) -> Result<bool> {
    let hb = hom_space(x, e.b())?;
    let hc = hom_space(x, e.c())?;
    Ok(hom_map_matrix(&hb, &hc, Some(e.p()), None)?.rank() == hc.dim())
}

fn hom_into_onto(x: &LambdaModule, e: &ShortExactSeq) -> Result<bool> {
    let hb = hom_space(e.b(), x)?;
    let ha = hom_space(e.a(), x)?;
    Ok(hom_map_matrix(&hb, &ha, None, Some(e.i()))?.rank() == ha.dim())
}

/// Indecomposables `P` for which `Hom(P, −)` is exact on every F-exact
/// sequence over skeleton pairs; the direct counterpart of [`relative_projectives`].
pub fn hom_exact_projectives(f: &SubfunctorData, cap: usize, seed: u64) -> Result<Vec<usize>> {
    let seqs = skeleton_sequences(f, cap, seed)?;
    let mut out = Vec::new();
    for (k, x) in f.skeleton().modules().iter().enumerate() {
        let mut exact = true;
        for (e, _) in seqs.iter().filter(|(_, fe)| *fe) {
            if !hom_from_onto(x, e)? {
                exact = false;
                break;
            }
        }
        if exact {
            out.push(k + 1);
        }
    }
    Ok(out)
}

pub fn hom_exact_injectives(f: &SubfunctorData, cap: usize, seed: u64) -> Result<Vec<usize>> {
    let seqs = skeleton_sequences(f, cap, seed)?;
    let mut out = Vec::new();
    for (k, x) in f.skeleton().modules().iter().enumerate() {
        let mut exact = true;
        for (e, _) in seqs.iter().filter(|(_, fe)| *fe) {
            if !hom_into_onto(x, e)? {
                exact = false;
                break;
            }
        }
        if exact {
            out.push(k + 1);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Yes,
    No,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnoughVerdict {
    pub verdict: Tri,
    /// Per indecomposable `M_k`, in order.
    pub per_object: Vec<Tri>,
    pub witnesses: Vec<Value>,
    /// When the verdict is yes: whether F-exactness coincides with exactness of
    /// `Hom(P, −)` (resp. `Hom(−, I)`) for all relative projectives (injectives),
    /// on realized skeleton classes.
    pub characterization: Option<bool>,
}

fn combine(per: &[Tri]) -> Tri {
    if per.contains(&Tri::No) {
        Tri::No
    } else if per.contains(&Tri::Indeterminate) {
        Tri::Indeterminate
    } else {
        Tri::Yes
    }
}

/// For each `M_k`, tests the universal map `⊕ P → M_k` built from Hom bases out
/// of relative projectives. Any F-exact cover by relative projectives factors
/// through it and makes its kernel sequence a pushout of an F-exact sequence,
/// so this map decides the question. Covers above `dim_cap` are indeterminate.
pub fn has_enough_projectives(f: &SubfunctorData, dim_cap: usize, seed: u64) -> Result<EnoughVerdict> {
    let sk = f.skeleton();
    let projs = relative_projectives(f);
    let mut per_object = Vec::new();
    let mut witnesses = Vec::new();
    for c in sk.modules() {
        let mut summands = Vec::new();
        let mut maps = Vec::new();
        for &j in &projs {
            for h in hom_basis(sk.module(j), c)? {
                summands.push(sk.module(j).clone());
                maps.push(h);
            }
        }
        let total: usize = summands.iter().map(|m| m.dim()).sum();
        if total > dim_cap {
            per_object.push(Tri::Indeterminate);
            continue;
        }
        let sum = direct_sum(f.cfg(), &summands)?;
        let refs: Vec<&ModuleMorphism> = maps.iter().collect();
        let cover = sum.copair(c, &refs)?;
        if !cover.is_epi() {
            per_object.push(Tri::No);
            continue;
        }
        let ker = kernel(&cover);
        let e = ShortExactSeq::from_maps(ker.inclusion, cover)?;
        if is_f_exact(f, &e)? {
            per_object.push(Tri::Yes);
            witnesses.push(json!(e));
        } else {
            per_object.push(Tri::No);
        }
    }
    let verdict = combine(&per_object);
    let characterization = if verdict == Tri::Yes {
        let mut agree = true;
        for (e, exact) in skeleton_sequences(f, 16, seed)? {
            let mut hom_exact = true;
            for &k in &projs {
                hom_exact &= hom_from_onto(sk.module(k), &e)?;
            }
            agree &= hom_exact == exact;
        }
        Some(agree)
    } else {
        None
    };
    Ok(EnoughVerdict {
        verdict,
        per_object,
        witnesses,
        characterization,
    })
}

/// Dual of [`has_enough_projectives`] via the universal map `M_k → ⊕ I`.
pub fn has_enough_injectives(f: &SubfunctorData, dim_cap: usize, seed: u64) -> Result<EnoughVerdict> {
    let sk = f.skeleton();
    let injs = relative_injectives(f);
    let mut per_object = Vec::new();
    let mut witnesses = Vec::new();
    for a in sk.modules() {
        let mut summands = Vec::new();
        let mut maps = Vec::new();
        for &j in &injs {
            for h in hom_basis(a, sk.module(j))? {
                summands.push(sk.module(j).clone());
                maps.push(h);
            }
        }
        let total: usize = summands.iter().map(|m| m.dim()).sum();
        if total > dim_cap {
            per_object.push(Tri::Indeterminate);
            continue;
        }
        let sum = direct_sum(f.cfg(), &summands)?;
        let refs: Vec<&ModuleMorphism> = maps.iter().collect();
        let envelope = sum.pair(a, &refs)?;
        if !envelope.is_mono() {
            per_object.push(Tri::No);
            continue;
        }
        let ck = cokernel(&envelope);
        let e = ShortExactSeq::from_maps(envelope, ck.projection)?;
        if is_f_exact(f, &e)? {
            per_object.push(Tri::Yes);
            witnesses.push(json!(e));
        } else {
            per_object.push(Tri::No);
        }
    }
    let verdict = combine(&per_object);
    let characterization = if verdict == Tri::Yes {
        let mut agree = true;
        for (e, exact) in skeleton_sequences(f, 16, seed)? {
            let mut hom_exact = true;
            for &k in &injs {
                hom_exact &= hom_into_onto(sk.module(k), &e)?;
            }
            agree &= hom_exact == exact;
        }
        Some(agree)
    } else {
        None
    };
    Ok(EnoughVerdict {
        verdict,
        per_object,
        witnesses,
        characterization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module_cat::CategoryConfig;
    use crate::subfunctor::build_skeleton;

    #[test]
    fn projectives_of_zero_and_full() {
        for n in 1..=3 {
            let sk = build_skeleton(CategoryConfig::new(2, n).unwrap(), 3).unwrap();
            let zero = SubfunctorData::zero(&sk);
            let all: Vec<usize> = (1..=n).collect();
            assert_eq!(relative_projectives(&zero), all);
            assert_eq!(hom_exact_projectives(&zero, 16, 0).unwrap(), all);
            let full = SubfunctorData::full(&sk);
            let expected = if n == 1 { vec![1] } else { vec![n] };
            assert_eq!(relative_projectives(&full), expected);
            assert_eq!(hom_exact_projectives(&full, 16, 0).unwrap(), expected);
            assert_eq!(relative_injectives(&full), expected);
            assert_eq!(hom_exact_injectives(&full, 16, 0).unwrap(), expected);
        }
    }

    #[test]
    fn enough_projectives_of_zero_and_full() {
        let sk = build_skeleton(CategoryConfig::new(2, 3).unwrap(), 3).unwrap();
        for f in [SubfunctorData::zero(&sk), SubfunctorData::full(&sk)] {
            let v = has_enough_projectives(&f, 32, 0).unwrap();
            assert_eq!(v.verdict, Tri::Yes);
            assert_eq!(v.characterization, Some(true));
            let v = has_enough_injectives(&f, 32, 0).unwrap();
            assert_eq!(v.verdict, Tri::Yes);
        }
        let full = SubfunctorData::full(&sk);
        assert_eq!(has_enough_projectives(&full, 2, 0).unwrap().verdict, Tri::Indeterminate);
    }
}
