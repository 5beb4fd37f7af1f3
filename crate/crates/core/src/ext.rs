//! Explicit `Ext¹` groups with canonical coordinates.
//!
//! `Ext(C, A)` is computed from one step of a free presentation
//! `0 → Ω → P → C → 0`: it is the cokernel of restriction
//! `Hom(P, A) → Hom(Ω, A)`. A sequence is classified by lifting the cover
//! `P → C` through it, and a class is realized by pushing the presentation
//! sequence out along a representative `Ω → A`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Subspace};
use crate::module_cat::{
    canonical_iso, canonical_sum, compose, factor_through_mono, hom_space, kernel, HomSpace, LambdaModule,
    ModuleMorphism,
};
use crate::ses::{pullback_ses, pushout_ses, ShortExactSeq};

#[derive(Clone, Debug)]
pub struct ProjPresentation {
    pub c: LambdaModule,
    pub free: LambdaModule,
    pub cover: ModuleMorphism,
    pub syzygy: LambdaModule,
    pub inclusion: ModuleMorphism,
    /// Images in `c` of the generators of the free summands.
    pub generators: Vec<Vec<u32>>,
}

impl ProjPresentation {
    pub fn sequence(&self) -> ShortExactSeq {
        ShortExactSeq::from_maps(self.inclusion.clone(), self.cover.clone()).expect("presentation is exact")
    }
}

/// One copy of `M_N` per Jordan block of `c`, mapping the generator of the
/// t-th copy to the generator of the t-th block.
pub fn projective_presentation(c: &LambdaModule) -> ProjPresentation {
    let cfg = c.cfg();
    let n = cfg.nilpotency();
    let form = canonical_iso(c);
    let blocks = form.partition.len();
    let free = canonical_sum(cfg, &vec![n; blocks]).expect("N is a valid index").object;
    let generators: Vec<Vec<u32>> = (0..blocks).map(|t| form.generator(t)).collect();
    let cover = ModuleMorphism::trusted(&free, c, free_lift(c, &generators));
    let ker = kernel(&cover);
    ProjPresentation {
        c: c.clone(),
        free,
        cover,
        syzygy: ker.object,
        inclusion: ker.inclusion,
        generators,
    }
}

/// The matrix of the map `⊕ M_N → m` sending the t-th generator to `images[t]`.
fn free_lift(m: &LambdaModule, images: &[Vec<u32>]) -> Matrix {
    let n = m.cfg().nilpotency();
    let mut columns = Vec::with_capacity(images.len() * n);
    for v in images {
        let mut cur = v.clone();
        for _ in 0..n {
            let next = m.action().mul_vec(&cur);
            columns.push(cur);
            cur = next;
        }
    }
    Matrix::from_columns(m.p(), m.dim(), &columns)
}

#[derive(Debug)]
pub struct ExtBasis {
    pub c: LambdaModule,
    pub a: LambdaModule,
    pub presentation: ProjPresentation,
    /// Basis of `Hom(Ω, A)`.
    pub syzygy_hom: HomSpace,
    /// Image of restriction `Hom(P, A) → Hom(Ω, A)`, in `syzygy_hom` coordinates.
    pub restricted: Subspace,
    /// Coordinates of `syzygy_hom` not hit by a pivot of `restricted`.
    pub free_coords: Vec<usize>,
    pub reps: Vec<ShortExactSeq>,
}

impl ExtBasis {
    pub fn dim(&self) -> usize {
        self.free_coords.len()
    }

    /// Coordinates of the class of the pushout of the presentation along `alpha : Ω → A`.
    pub fn reduce(&self, alpha: &ModuleMorphism) -> Result<Vec<u32>> {
        let p = self.a.p();
        let mut x = self.syzygy_hom.coordinates(alpha)?;
        for w in self.restricted.vectors() {
            let pivot = w.iter().position(|&v| v != 0).expect("basis vectors are nonzero");
            let factor = x[pivot];
            if factor != 0 {
                for (xi, wi) in x.iter_mut().zip(&w) {
                    *xi = p.sub(*xi, p.mul(factor, *wi));
                }
            }
        }
        Ok(self.free_coords.iter().map(|&k| x[k]).collect())
    }

    /// The cocycle `Ω → A` representing the given coordinates.
    pub fn cocycle(&self, coords: &[u32]) -> Result<ModuleMorphism> {
        if coords.len() != self.dim() {
            return Err(Error::dim("cocycle", format!("{} coords for Ext of dim {}", coords.len(), self.dim())));
        }
        let mut full = vec![0u32; self.syzygy_hom.dim()];
        for (&k, &v) in self.free_coords.iter().zip(coords) {
            full[k] = v % self.a.p().get();
        }
        Ok(self.syzygy_hom.element(&full))
    }

    pub fn classify(&self, e: &ShortExactSeq) -> Result<Vec<u32>> {
        if e.a() != &self.a || e.c() != &self.c {
            return Err(Error::Input("classify: sequence ends do not match the Ext basis".into()));
        }
        let pres = &self.presentation;
        let lifts = pres
            .generators
            .iter()
            .map(|g| linalg::solve_vec(e.p().mat(), g).map(|x| x.expect("p is epi")))
            .collect::<Result<Vec<_>>>()?;
        let phi = ModuleMorphism::trusted(&pres.free, e.b(), free_lift(e.b(), &lifts));
        let restricted = compose(&phi, &pres.inclusion)?;
        let alpha = factor_through_mono(e.i(), &restricted)?.expect("restriction lands in ker p = im i");
        self.reduce(&alpha)
    }

    pub fn realize(&self, coords: &[u32]) -> Result<ShortExactSeq> {
        let alpha = self.cocycle(coords)?;
        Ok(pushout_ses(&self.presentation.sequence(), &alpha)?.0)
    }

    pub fn elements(&self) -> Vec<Vec<u32>> {
        linalg::all_vectors(self.a.p(), self.dim())
    }
}

pub fn ext_basis(c: &LambdaModule, a: &LambdaModule) -> Result<ExtBasis> {
    if c.cfg() != a.cfg() {
        return Err(Error::Input("ext_basis: modules over different configs".into()));
    }
    let presentation = projective_presentation(c);
    let syzygy_hom = hom_space(&presentation.syzygy, a)?;
    let free_hom = hom_space(&presentation.free, a)?;
    let restrictions = free_hom
        .basis
        .iter()
        .map(|h| syzygy_hom.coordinates(&compose(h, &presentation.inclusion)?))
        .collect::<Result<Vec<_>>>()?;
    let restricted = Subspace::span(a.p(), syzygy_hom.dim(), &restrictions);
    let pivots: Vec<usize> = restricted
        .vectors()
        .iter()
        .map(|w| w.iter().position(|&v| v != 0).expect("nonzero"))
        .collect();
    let free_coords: Vec<usize> = (0..syzygy_hom.dim()).filter(|k| !pivots.contains(k)).collect();
    let mut basis = ExtBasis {
        c: c.clone(),
        a: a.clone(),
        presentation,
        syzygy_hom,
        restricted,
        free_coords,
        reps: Vec::new(),
    };
    let d = basis.dim();
    basis.reps = (0..d)
        .map(|k| {
            let mut unit = vec![0u32; d];
            unit[k] = 1;
            basis.realize(&unit)
        })
        .collect::<Result<_>>()?;
    Ok(basis)
}

/// An element of `Ext(C, A)` in the coordinates of a fixed basis.
#[derive(Clone, Debug)]
pub struct ExtClass {
    pub basis: Arc<ExtBasis>,
    pub coords: Vec<u32>,
}

impl ExtClass {
    pub fn new(basis: Arc<ExtBasis>, coords: Vec<u32>) -> Result<Self> {
        if coords.len() != basis.dim() {
            return Err(Error::dim("ExtClass", "coordinate length differs from Ext dimension"));
        }
        Ok(ExtClass { basis, coords })
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&v| v == 0)
    }
}

pub fn classify(e: &ShortExactSeq, basis: &Arc<ExtBasis>) -> Result<ExtClass> {
    Ok(ExtClass {
        basis: Arc::clone(basis),
        coords: basis.classify(e)?,
    })
}

pub fn realize(cls: &ExtClass) -> Result<ShortExactSeq> {
    cls.basis.realize(&cls.coords)
}

/// Write-once table of Ext bases keyed by the pair of end modules.
#[derive(Default)]
pub struct ExtCache {
    table: RwLock<HashMap<(LambdaModule, LambdaModule), Arc<ExtBasis>>>,
}

impl ExtCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Entries are built outside the lock and inserted whole, so readers never
    /// see a partial basis. Concurrent builders of the same key agree, and the
    /// first insertion wins.
    pub fn get(&self, c: &LambdaModule, a: &LambdaModule) -> Result<Arc<ExtBasis>> {
        let key = (c.clone(), a.clone());
        if let Some(hit) = self.table.read().expect("ext cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let built = Arc::new(ext_basis(c, a)?);
        let mut table = self.table.write().expect("ext cache poisoned");
        Ok(Arc::clone(table.entry(key).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("ext cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Process-wide cache shared by the higher-level checks.
pub fn ext_cache() -> &'static ExtCache {
    static CACHE: OnceLock<ExtCache> = OnceLock::new();
    CACHE.get_or_init(ExtCache::new)
}

pub fn ext(c: &LambdaModule, a: &LambdaModule) -> Result<Arc<ExtBasis>> {
    ext_cache().get(c, a)
}

/// Matrix of `Ext(C, f) : Ext(C, A) → Ext(C, A′)`, `[ε] ↦ [f·ε]`.
pub fn ext_covariant_matrix(f: &ModuleMorphism, c: &LambdaModule) -> Result<Matrix> {
    let src = ext(c, f.src())?;
    let tgt = ext(c, f.tgt())?;
    // f·(α·π) = (fα)·π, so the action is composition on cocycles
    let columns = (0..src.dim())
        .map(|k| {
            let mut unit = vec![0u32; src.dim()];
            unit[k] = 1;
            tgt.reduce(&compose(f, &src.cocycle(&unit)?)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(c.p(), tgt.dim(), &columns))
}

/// Matrix of `Ext(g, A) : Ext(C, A) → Ext(C′, A)`, `[ε] ↦ [ε·g]`.
pub fn ext_contravariant_matrix(g: &ModuleMorphism, a: &LambdaModule) -> Result<Matrix> {
    let src = ext(g.tgt(), a)?;
    let tgt = ext(g.src(), a)?;
    let columns = src
        .reps
        .iter()
        .map(|rep| tgt.classify(&pullback_ses(rep, g)?.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(a.p(), tgt.dim(), &columns))
}

/// Connecting maps of `ε` at `X`: `∂ : Hom(X, C) → Ext(X, A)` and `δ : Hom(A, X) → Ext(C, X)`,
/// as matrices with respect to the Hom bases of [`hom_space`].
pub struct Connecting {
    pub covariant: Matrix,
    pub contravariant: Matrix,
}

pub fn connecting_matrices(e: &ShortExactSeq, x: &LambdaModule) -> Result<Connecting> {
    let p = x.p();
    let hom_xc = hom_space(x, e.c())?;
    let ext_xa = ext(x, e.a())?;
    let cov = hom_xc
        .basis
        .iter()
        .map(|f| ext_xa.classify(&pullback_ses(e, f)?.0))
        .collect::<Result<Vec<_>>>()?;
    let hom_ax = hom_space(e.a(), x)?;
    let ext_cx = ext(e.c(), x)?;
    let contra = hom_ax
        .basis
        .iter()
        .map(|f| ext_cx.classify(&pushout_ses(e, f)?.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(Connecting {
        covariant: Matrix::from_columns(p, ext_xa.dim(), &cov),
        contravariant: Matrix::from_columns(p, ext_cx.dim(), &contra),
    })
}

/// Matrix of `h ↦ post ∘ h ∘ pre` between Hom spaces.
pub fn hom_map_matrix(
    domain: &HomSpace,
    codomain: &HomSpace,
    post: Option<&ModuleMorphism>,
    pre: Option<&ModuleMorphism>,
) -> Result<Matrix> {
    let columns = domain
        .basis
        .iter()
        .map(|h| {
            let mut m = h.clone();
            if let Some(pre) = pre {
                m = compose(&m, pre)?;
            }
            if let Some(post) = post {
                m = compose(post, &m)?;
            }
            codomain.coordinates(&m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(domain.src.p(), codomain.dim(), &columns))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LesPosition {
    pub variance: &'static str,
    pub position: &'static str,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LesReport {
    pub positions: Vec<LesPosition>,
}

impl LesReport {
    pub fn all_exact(&self) -> bool {
        self.positions.iter().all(|p| p.exact)
    }
}

/// `im(incoming) = ker(outgoing)`; `None` stands for a zero map at the ends.
fn exact_at(dim: usize, incoming: Option<&Matrix>, outgoing: Option<&Matrix>, p: linalg::Prime) -> bool {
    let image = incoming.map_or_else(|| Subspace::zero(p, dim), linalg::image_basis);
    let kernel = outgoing.map_or_else(|| Subspace::full(p, dim), linalg::kernel_basis);
    image == kernel
}

/// Checks exactness at every position of the six-term sequences
/// `0 → Hom(X,A) → Hom(X,B) → Hom(X,C) → Ext(X,A) → Ext(X,B) → Ext(X,C)` and
/// `0 → Hom(C,X) → Hom(B,X) → Hom(A,X) → Ext(C,X) → Ext(B,X) → Ext(A,X)`.
pub fn verify_les(e: &ShortExactSeq, x: &LambdaModule) -> Result<LesReport> {
    let p = x.p();
    let conn = connecting_matrices(e, x)?;
    let mut positions = Vec::new();

    let (hxa, hxb, hxc) = (hom_space(x, e.a())?, hom_space(x, e.b())?, hom_space(x, e.c())?);
    let i_star = hom_map_matrix(&hxa, &hxb, Some(e.i()), None)?;
    let p_star = hom_map_matrix(&hxb, &hxc, Some(e.p()), None)?;
    let ext_i = ext_covariant_matrix(e.i(), x)?;
    let ext_p = ext_covariant_matrix(e.p(), x)?;
    let cov: [(&'static str, usize, Option<&Matrix>, Option<&Matrix>); 5] = [
        ("Hom(X,A)", hxa.dim(), None, Some(&i_star)),
        ("Hom(X,B)", hxb.dim(), Some(&i_star), Some(&p_star)),
        ("Hom(X,C)", hxc.dim(), Some(&p_star), Some(&conn.covariant)),
        ("Ext(X,A)", conn.covariant.rows(), Some(&conn.covariant), Some(&ext_i)),
        ("Ext(X,B)", ext_i.rows(), Some(&ext_i), Some(&ext_p)),
    ];
    for (position, dim, inc, out) in cov {
        positions.push(LesPosition {
            variance: "covariant",
            position,
            exact: exact_at(dim, inc, out, p),
        });
    }

    let (hcx, hbx, hax) = (hom_space(e.c(), x)?, hom_space(e.b(), x)?, hom_space(e.a(), x)?);
    let p_upper = hom_map_matrix(&hcx, &hbx, None, Some(e.p()))?;
    let i_upper = hom_map_matrix(&hbx, &hax, None, Some(e.i()))?;
    let ext_p_upper = ext_contravariant_matrix(e.p(), x)?;
    let ext_i_upper = ext_contravariant_matrix(e.i(), x)?;
    let contra: [(&'static str, usize, Option<&Matrix>, Option<&Matrix>); 5] = [
        ("Hom(C,X)", hcx.dim(), None, Some(&p_upper)),
        ("Hom(B,X)", hbx.dim(), Some(&p_upper), Some(&i_upper)),
        ("Hom(A,X)", hax.dim(), Some(&i_upper), Some(&conn.contravariant)),
        ("Ext(C,X)", conn.contravariant.rows(), Some(&conn.contravariant), Some(&ext_p_upper)),
        ("Ext(B,X)", ext_p_upper.rows(), Some(&ext_p_upper), Some(&ext_i_upper)),
    ];
    for (position, dim, inc, out) in contra {
        positions.push(LesPosition {
            variance: "contravariant",
            position,
            exact: exact_at(dim, inc, out, p),
        });
    }
    Ok(LesReport { positions })
}
