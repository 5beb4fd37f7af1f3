//! Short exact sequences `0 → A → B → C → 0` and their Yoneda calculus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SesDefect};
use crate::linalg;
use crate::module_cat::{
    compose, cokernel, direct_sum, direct_sum_morphism, factor_through_epi, factor_through_mono, hom_space,
    kernel, LambdaModule, ModuleMorphism,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShortExactSeq {
    i: ModuleMorphism,
    p: ModuleMorphism,
}

impl ShortExactSeq {
    pub fn a(&self) -> &LambdaModule {
        self.i.src()
    }

    pub fn b(&self) -> &LambdaModule {
        self.i.tgt()
    }

    pub fn c(&self) -> &LambdaModule {
        self.p.tgt()
    }

    pub fn i(&self) -> &ModuleMorphism {
        &self.i
    }

    pub fn p(&self) -> &ModuleMorphism {
        &self.p
    }

    pub fn from_maps(i: ModuleMorphism, p: ModuleMorphism) -> Result<Self> {
        if i.tgt() != p.src() {
            return Err(Error::InvalidSequence(SesDefect::IncompatibleEnds));
        }
        if !i.is_mono() {
            return Err(Error::InvalidSequence(SesDefect::INotMono));
        }
        if !p.is_epi() {
            return Err(Error::InvalidSequence(SesDefect::PNotEpi));
        }
        if !compose(&p, &i)?.is_zero() {
            return Err(Error::InvalidSequence(SesDefect::CompositeNonzero));
        }
        if i.src().dim() + p.tgt().dim() != i.tgt().dim() {
            return Err(Error::InvalidSequence(SesDefect::ImageNotKernel));
        }
        Ok(ShortExactSeq { i, p })
    }

    /// Sequences produced by the calculus below are exact by construction.
    fn trusted(i: ModuleMorphism, p: ModuleMorphism) -> Self {
        debug_assert!(
            ShortExactSeq::from_maps(i.clone(), p.clone()).is_ok(),
            "constructed sequence is not exact"
        );
        ShortExactSeq { i, p }
    }

    pub fn same_ends(&self, other: &ShortExactSeq) -> bool {
        self.a() == other.a() && self.c() == other.c()
    }

    /// Whether the sequence is Yoneda-equivalent to the split sequence on its ends.
    pub fn is_split(&self) -> bool {
        let split = split_ses(self.c(), self.a()).expect("ends share a config");
        yoneda_equivalent(self, &split).expect("same ends").is_some()
    }
}

pub fn make_ses(
    a: &LambdaModule,
    i: &ModuleMorphism,
    b: &LambdaModule,
    p: &ModuleMorphism,
    c: &LambdaModule,
) -> Result<ShortExactSeq> {
    if i.src() != a || i.tgt() != b || p.src() != b || p.tgt() != c {
        return Err(Error::InvalidSequence(SesDefect::IncompatibleEnds));
    }
    ShortExactSeq::from_maps(i.clone(), p.clone())
}

/// A morphism of sequences `(f, g, h) : ε → η`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SesMorphism {
    pub f: ModuleMorphism,
    pub g: ModuleMorphism,
    pub h: ModuleMorphism,
}

impl SesMorphism {
    pub fn new(
        src: &ShortExactSeq,
        tgt: &ShortExactSeq,
        f: ModuleMorphism,
        g: ModuleMorphism,
        h: ModuleMorphism,
    ) -> Result<Self> {
        let m = SesMorphism { f, g, h };
        m.validate(src, tgt)?;
        Ok(m)
    }

    pub fn identity(e: &ShortExactSeq) -> Self {
        SesMorphism {
            f: ModuleMorphism::identity(e.a()),
            g: ModuleMorphism::identity(e.b()),
            h: ModuleMorphism::identity(e.c()),
        }
    }

    /// Checks that both squares commute.
    pub fn validate(&self, src: &ShortExactSeq, tgt: &ShortExactSeq) -> Result<()> {
        let ends = self.f.src() == src.a()
            && self.f.tgt() == tgt.a()
            && self.g.src() == src.b()
            && self.g.tgt() == tgt.b()
            && self.h.src() == src.c()
            && self.h.tgt() == tgt.c();
        if !ends {
            return Err(Error::Input("sequence morphism components do not match the sequences".into()));
        }
        if compose(&self.g, src.i())? != compose(tgt.i(), &self.f)? {
            return Err(Error::InvalidMorphism("left square does not commute".into()));
        }
        if compose(&self.h, src.p())? != compose(tgt.p(), &self.g)? {
            return Err(Error::InvalidMorphism("right square does not commute".into()));
        }
        Ok(())
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &SesMorphism) -> Result<SesMorphism> {
        Ok(SesMorphism {
            f: compose(&self.f, &first.f)?,
            g: compose(&self.g, &first.g)?,
            h: compose(&self.h, &first.h)?,
        })
    }
}

/// The split sequence `0 → A → A ⊕ C → C → 0`.
pub fn split_ses(c: &LambdaModule, a: &LambdaModule) -> Result<ShortExactSeq> {
    if c.cfg() != a.cfg() {
        return Err(Error::Input("split_ses: ends over different configs".into()));
    }
    let sum = direct_sum(a.cfg(), &[a.clone(), c.clone()])?;
    Ok(ShortExactSeq::trusted(
        sum.inclusions[0].clone(),
        sum.projections[1].clone(),
    ))
}

/// Solves for `g : B₁ → B₂` with `g·i₁ = i₂` and `p₂·g = p₁`.
pub fn yoneda_equivalent(e1: &ShortExactSeq, e2: &ShortExactSeq) -> Result<Option<ModuleMorphism>> {
    if !e1.same_ends(e2) {
        return Err(Error::Input("yoneda_equivalent: end objects differ".into()));
    }
    let hom = hom_space(e1.b(), e2.b())?;
    let p = e1.a().p();
    let rows_i = e2.b().dim() * e1.a().dim();
    let rows_p = e1.c().dim() * e1.b().dim();
    let columns: Vec<Vec<u32>> = hom
        .basis
        .iter()
        .map(|g| {
            let mut col = (g.mat() * e1.i().mat()).vectorize();
            col.extend((e2.p().mat() * g.mat()).vectorize());
            col
        })
        .collect();
    let system = linalg::Matrix::from_columns(p, rows_i + rows_p, &columns);
    let mut rhs = e2.i().mat().vectorize();
    rhs.extend(e1.p().mat().vectorize());
    let Some(coords) = linalg::solve_vec(&system, &rhs)? else {
        return Ok(None);
    };
    let g = hom.element(&coords);
    if !g.is_iso() {
        return Err(Error::InvalidMorphism("Yoneda witness is not an isomorphism".into()));
    }
    Ok(Some(g))
}

/// The pushout `f·ε`, with the morphism `(f, l, 1_C) : ε → f·ε`.
pub fn pushout_ses(e: &ShortExactSeq, f: &ModuleMorphism) -> Result<(ShortExactSeq, SesMorphism)> {
    if f.src() != e.a() {
        return Err(Error::Input("pushout_ses: f does not start at A".into()));
    }
    let a2 = f.tgt();
    let sum = direct_sum(e.a().cfg(), &[e.b().clone(), a2.clone()])?;
    let neg_f = f.neg();
    let into_sum = sum.pair(e.a(), &[e.i(), &neg_f])?;
    let ck = cokernel(&into_sum);
    let q = &ck.projection;
    let i2 = compose(q, &sum.inclusions[1])?;
    let l = compose(q, &sum.inclusions[0])?;
    let zero = ModuleMorphism::zero(a2, e.c());
    let p_on_sum = sum.copair(e.c(), &[e.p(), &zero])?;
    let p2 = factor_through_epi(q, &p_on_sum)?.expect("(p, 0) kills the image of (i, -f)");
    let result = ShortExactSeq::trusted(i2, p2);
    let mor = SesMorphism {
        f: f.clone(),
        g: l,
        h: ModuleMorphism::identity(e.c()),
    };
    debug_assert!(mor.validate(e, &result).is_ok());
    Ok((result, mor))
}

/// The pullback `ε·g`, with the morphism `(1_A, w, g) : ε·g → ε`.
pub fn pullback_ses(e: &ShortExactSeq, g: &ModuleMorphism) -> Result<(ShortExactSeq, SesMorphism)> {
    if g.tgt() != e.c() {
        return Err(Error::Input("pullback_ses: g does not land in C".into()));
    }
    let c2 = g.src();
    let sum = direct_sum(e.a().cfg(), &[e.b().clone(), c2.clone()])?;
    let neg_g = g.neg();
    let out_of_sum = sum.copair(e.c(), &[e.p(), &neg_g])?;
    let ker = kernel(&out_of_sum);
    let k = &ker.inclusion;
    let w = compose(&sum.projections[0], k)?;
    let p2 = compose(&sum.projections[1], k)?;
    let zero = ModuleMorphism::zero(e.a(), c2);
    let i_into_sum = sum.pair(e.a(), &[e.i(), &zero])?;
    let i2 = factor_through_mono(k, &i_into_sum)?.expect("(i, 0) lands in the kernel of (p, -g)");
    let result = ShortExactSeq::trusted(i2, p2);
    let mor = SesMorphism {
        f: ModuleMorphism::identity(e.a()),
        g: w,
        h: g.clone(),
    };
    debug_assert!(mor.validate(&result, e).is_ok());
    Ok((result, mor))
}

pub fn direct_sum_ses(e1: &ShortExactSeq, e2: &ShortExactSeq) -> Result<ShortExactSeq> {
    let (_, _, i) = direct_sum_morphism(e1.i(), e2.i())?;
    let (_, _, p) = direct_sum_morphism(e1.p(), e2.p())?;
    Ok(ShortExactSeq::trusted(i, p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaerOrder {
    PullbackFirst,
    PushoutFirst,
}

/// Representative of `[ε₁] + [ε₂] = [∇_A·(ε₁ ⊕ ε₂)·Δ_C]`.
pub fn baer_sum(e1: &ShortExactSeq, e2: &ShortExactSeq) -> Result<ShortExactSeq> {
    baer_sum_ordered(e1, e2, BaerOrder::PullbackFirst)
}

pub fn baer_sum_ordered(e1: &ShortExactSeq, e2: &ShortExactSeq, order: BaerOrder) -> Result<ShortExactSeq> {
    if !e1.same_ends(e2) {
        return Err(Error::Input("baer_sum: end objects differ".into()));
    }
    let cfg = e1.a().cfg();
    let (a, c) = (e1.a(), e1.c());
    let sum = direct_sum_ses(e1, e2)?;
    let a_sum = direct_sum(cfg, &[a.clone(), a.clone()])?;
    let c_sum = direct_sum(cfg, &[c.clone(), c.clone()])?;
    let id_a = ModuleMorphism::identity(a);
    let id_c = ModuleMorphism::identity(c);
    let codiagonal = a_sum.copair(a, &[&id_a, &id_a])?;
    let diagonal = c_sum.pair(c, &[&id_c, &id_c])?;
    Ok(match order {
        BaerOrder::PullbackFirst => {
            let (pulled, _) = pullback_ses(&sum, &diagonal)?;
            pushout_ses(&pulled, &codiagonal)?.0
        }
        BaerOrder::PushoutFirst => {
            let (pushed, _) = pushout_ses(&sum, &codiagonal)?;
            pullback_ses(&pushed, &diagonal)?.0
        }
    })
}

/// Factors `(f, g, h) : ε → ε′` as `(f, l, 1_C) : ε → f·ε` followed by
/// `(1_{A′}, g′, h) : f·ε → ε′`.
#[derive(Clone, Debug)]
pub struct SesFactorization {
    pub middle: ShortExactSeq,
    pub first: SesMorphism,
    pub second: SesMorphism,
}

pub fn factor_ses_morphism(
    src: &ShortExactSeq,
    tgt: &ShortExactSeq,
    mor: &SesMorphism,
) -> Result<SesFactorization> {
    mor.validate(src, tgt)?;
    let a2 = mor.f.tgt();
    let sum = direct_sum(src.a().cfg(), &[src.b().clone(), a2.clone()])?;
    let neg_f = mor.f.neg();
    let into_sum = sum.pair(src.a(), &[src.i(), &neg_f])?;
    let ck = cokernel(&into_sum);
    let (middle, first) = pushout_ses(src, &mor.f)?;
    // pushout_ses realizes the same cokernel, so the quotient maps agree
    debug_assert_eq!(ck.object, *middle.b());
    let on_sum = sum.copair(tgt.b(), &[&mor.g, tgt.i()])?;
    let g2 = factor_through_epi(&ck.projection, &on_sum)?.expect("(g, i′) kills the image of (i, -f)");
    let second = SesMorphism {
        f: ModuleMorphism::identity(a2),
        g: g2,
        h: mor.h.clone(),
    };
    second.validate(&middle, tgt)?;
    Ok(SesFactorization { middle, first, second })
}

#[derive(Serialize, Deserialize)]
struct SesJson {
    a: LambdaModule,
    i: ModuleMorphism,
    b: LambdaModule,
    p: ModuleMorphism,
    c: LambdaModule,
}

impl Serialize for ShortExactSeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SesJson {
            a: self.a().clone(),
            i: self.i.clone(),
            b: self.b().clone(),
            p: self.p.clone(),
            c: self.c().clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ShortExactSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SesJson::deserialize(d)?;
        make_ses(&raw.a, &raw.i, &raw.b, &raw.p, &raw.c).map_err(D::Error::custom)
    }
}
