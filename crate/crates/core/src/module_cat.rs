//! Finite-dimensional modules over Λ = F_p[x]/(x^N).
//!
//! A module is a vector space F_p^d with a nilpotent operator `X` (the action
//! of `x`) satisfying `X^N = 0`. The indecomposables are the Jordan blocks
//! `M_i = Λ/(x^i)` for `1 ≤ i ≤ N`; `M_i` has basis `v_0, …, v_{i-1}` with
//! `X v_k = v_{k+1}` and `X v_{i-1} = 0`, so `v_0` generates it.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Prime, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CategoryConfig {
    p: Prime,
    #[serde(rename = "N")]
    nilpotency: usize,
}

impl CategoryConfig {
    pub fn new(p: u32, nilpotency: usize) -> Result<Self> {
        let p = Prime::new(p)?;
        if nilpotency == 0 {
            return Err(Error::Config("nilpotency bound N must be at least 1".into()));
        }
        Ok(CategoryConfig { p, nilpotency })
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn nilpotency(&self) -> usize {
        self.nilpotency
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LambdaModule {
    cfg: CategoryConfig,
    action: Arc<Matrix>,
}

impl fmt::Debug for LambdaModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ-module(dim {}, X = {:?})", self.dim(), self.action)
    }
}

impl LambdaModule {
    pub fn cfg(&self) -> CategoryConfig {
        self.cfg
    }

    pub fn p(&self) -> Prime {
        self.cfg.p
    }

    pub fn dim(&self) -> usize {
        self.action.rows()
    }

    pub fn action(&self) -> &Matrix {
        &self.action
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }
}

/// Validates `action` as a Λ-module structure.
pub fn make_module(cfg: CategoryConfig, action: Matrix) -> Result<LambdaModule> {
    if action.p() != cfg.p {
        return Err(Error::Modulus(action.p().get(), cfg.p.get()));
    }
    if !action.is_square() {
        return Err(Error::InvalidModule(format!(
            "action must be square, got {}x{}",
            action.rows(),
            action.cols()
        )));
    }
    if !action.pow(cfg.nilpotency).is_zero() {
        return Err(Error::InvalidModule(format!(
            "action is not annihilated by x^{}",
            cfg.nilpotency
        )));
    }
    Ok(LambdaModule {
        cfg,
        action: Arc::new(action),
    })
}

pub fn zero_module(cfg: CategoryConfig) -> LambdaModule {
    LambdaModule {
        cfg,
        action: Arc::new(Matrix::zeros(cfg.p, 0, 0)),
    }
}

fn jordan_block(p: Prime, size: usize) -> Matrix {
    Matrix::from_fn(p, size, size, |r, c| u32::from(r == c + 1))
}

/// The indecomposable `M_i = Λ/(x^i)`.
pub fn indecomposable(cfg: CategoryConfig, i: usize) -> Result<LambdaModule> {
    if i == 0 || i > cfg.nilpotency {
        return Err(Error::Input(format!(
            "indecomposable index {i} outside 1..={}",
            cfg.nilpotency
        )));
    }
    Ok(LambdaModule {
        cfg,
        action: Arc::new(jordan_block(cfg.p, i)),
    })
}

/// The canonical direct sum `M_{λ_1} ⊕ M_{λ_2} ⊕ …` for a partition listed in the given order.
pub fn canonical_sum(cfg: CategoryConfig, partition: &[usize]) -> Result<DirectSum> {
    let parts = partition
        .iter()
        .map(|&i| indecomposable(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    direct_sum(cfg, &parts)
}

/// A Λ-linear map, stored as a `tgt.dim × src.dim` matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModuleMorphism {
    src: LambdaModule,
    tgt: LambdaModule,
    mat: Matrix,
}

impl fmt::Debug for ModuleMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} : dim {} -> dim {}", self.mat, self.src.dim(), self.tgt.dim())
    }
}

impl ModuleMorphism {
    pub fn new(src: &LambdaModule, tgt: &LambdaModule, mat: Matrix) -> Result<Self> {
        if src.cfg != tgt.cfg {
            return Err(Error::InvalidMorphism("source and target configs differ".into()));
        }
        if mat.p() != src.p() {
            return Err(Error::Modulus(mat.p().get(), src.p().get()));
        }
        if mat.rows() != tgt.dim() || mat.cols() != src.dim() {
            return Err(Error::dim(
                "morphism",
                format!(
                    "matrix {}x{} for dim {} -> dim {}",
                    mat.rows(),
                    mat.cols(),
                    src.dim(),
                    tgt.dim()
                ),
            ));
        }
        if &mat * src.action() != tgt.action() * &mat {
            return Err(Error::InvalidMorphism("matrix does not commute with the x-actions".into()));
        }
        Ok(ModuleMorphism {
            src: src.clone(),
            tgt: tgt.clone(),
            mat,
        })
    }

    /// Builds a morphism that is Λ-linear by construction.
    pub(crate) fn trusted(src: &LambdaModule, tgt: &LambdaModule, mat: Matrix) -> Self {
        debug_assert!(
            mat.rows() == tgt.dim()
                && mat.cols() == src.dim()
                && &mat * src.action() == tgt.action() * &mat,
            "trusted morphism is not Λ-linear"
        );
        ModuleMorphism {
            src: src.clone(),
            tgt: tgt.clone(),
            mat,
        }
    }

    pub fn identity(m: &LambdaModule) -> Self {
        ModuleMorphism::trusted(m, m, Matrix::identity(m.p(), m.dim()))
    }

    pub fn zero(src: &LambdaModule, tgt: &LambdaModule) -> Self {
        ModuleMorphism::trusted(src, tgt, Matrix::zeros(src.p(), tgt.dim(), src.dim()))
    }

    pub fn src(&self) -> &LambdaModule {
        &self.src
    }

    pub fn tgt(&self) -> &LambdaModule {
        &self.tgt
    }

    pub fn mat(&self) -> &Matrix {
        &self.mat
    }

    pub fn rank(&self) -> usize {
        self.mat.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    pub fn is_mono(&self) -> bool {
        self.rank() == self.src.dim()
    }

    pub fn is_epi(&self) -> bool {
        self.rank() == self.tgt.dim()
    }

    pub fn is_iso(&self) -> bool {
        self.src.dim() == self.tgt.dim() && self.is_mono()
    }

    pub fn classify(&self) -> MorphismKind {
        let mono = self.is_mono();
        let epi = self.is_epi();
        MorphismKind {
            mono,
            epi,
            iso: mono && epi,
            zero: self.is_zero(),
        }
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &ModuleMorphism) -> Result<ModuleMorphism> {
        compose(self, f)
    }

    pub fn add(&self, other: &ModuleMorphism) -> Result<ModuleMorphism> {
        self.check_parallel(other)?;
        Ok(ModuleMorphism::trusted(&self.src, &self.tgt, &self.mat + &other.mat))
    }

    pub fn sub(&self, other: &ModuleMorphism) -> Result<ModuleMorphism> {
        self.check_parallel(other)?;
        Ok(ModuleMorphism::trusted(&self.src, &self.tgt, &self.mat - &other.mat))
    }

    pub fn neg(&self) -> ModuleMorphism {
        ModuleMorphism::trusted(&self.src, &self.tgt, -&self.mat)
    }

    pub fn scale(&self, s: u32) -> ModuleMorphism {
        ModuleMorphism::trusted(&self.src, &self.tgt, self.mat.scale(s))
    }

    pub fn inverse(&self) -> Option<ModuleMorphism> {
        self.mat
            .inverse()
            .map(|inv| ModuleMorphism::trusted(&self.tgt, &self.src, inv))
    }

    fn check_parallel(&self, other: &ModuleMorphism) -> Result<()> {
        if self.src != other.src || self.tgt != other.tgt {
            return Err(Error::Input("morphisms are not parallel".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MorphismKind {
    pub mono: bool,
    pub epi: bool,
    pub iso: bool,
    pub zero: bool,
}

pub fn classify_morphism(f: &ModuleMorphism) -> MorphismKind {
    f.classify()
}

/// `g ∘ f`.
pub fn compose(g: &ModuleMorphism, f: &ModuleMorphism) -> Result<ModuleMorphism> {
    if f.tgt != g.src {
        return Err(Error::Input(format!(
            "cannot compose: f lands in dim {} but g starts at dim {}",
            f.tgt.dim(),
            g.src.dim()
        )));
    }
    Ok(ModuleMorphism::trusted(&f.src, &g.tgt, &g.mat * &f.mat))
}

/// Finds `h` with `m ∘ h = g`, where `m` is mono (or `None` if `g` does not factor).
pub fn factor_through_mono(m: &ModuleMorphism, g: &ModuleMorphism) -> Result<Option<ModuleMorphism>> {
    if m.tgt != g.tgt {
        return Err(Error::Input("factor_through_mono: targets differ".into()));
    }
    Ok(linalg::solve(&m.mat, &g.mat)?.map(|h| ModuleMorphism::trusted(&g.src, &m.src, h)))
}

/// Finds `h` with `h ∘ e = g`, where `e` is epi (or `None` if `g` does not factor).
pub fn factor_through_epi(e: &ModuleMorphism, g: &ModuleMorphism) -> Result<Option<ModuleMorphism>> {
    if e.src != g.src {
        return Err(Error::Input("factor_through_epi: sources differ".into()));
    }
    let sol = linalg::solve(&e.mat.transpose(), &g.mat.transpose())?;
    Ok(sol.map(|h| ModuleMorphism::trusted(&e.tgt, &g.tgt, h.transpose())))
}

/// A module together with inclusions and projections exhibiting it as a biproduct.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub object: LambdaModule,
    pub inclusions: Vec<ModuleMorphism>,
    pub projections: Vec<ModuleMorphism>,
}

impl DirectSum {
    pub fn summands(&self) -> impl Iterator<Item = &LambdaModule> {
        self.inclusions.iter().map(|m| m.src())
    }

    /// The map `⊕ X_k → T` with components `maps[k]: X_k → T`.
    pub fn copair(&self, target: &LambdaModule, maps: &[&ModuleMorphism]) -> Result<ModuleMorphism> {
        if maps.len() != self.inclusions.len() {
            return Err(Error::Input("copair: wrong number of components".into()));
        }
        for (m, incl) in maps.iter().zip(&self.inclusions) {
            if m.src() != incl.src() || m.tgt() != target {
                return Err(Error::Input("copair: component has wrong source or target".into()));
            }
        }
        let blocks: Vec<&Matrix> = maps.iter().map(|m| m.mat()).collect();
        let mat = Matrix::hstack(target.p(), target.dim(), &blocks)?;
        Ok(ModuleMorphism::trusted(&self.object, target, mat))
    }

    /// The map `S → ⊕ X_k` with components `maps[k]: S → X_k`.
    pub fn pair(&self, source: &LambdaModule, maps: &[&ModuleMorphism]) -> Result<ModuleMorphism> {
        if maps.len() != self.projections.len() {
            return Err(Error::Input("pair: wrong number of components".into()));
        }
        for (m, proj) in maps.iter().zip(&self.projections) {
            if m.tgt() != proj.tgt() || m.src() != source {
                return Err(Error::Input("pair: component has wrong source or target".into()));
            }
        }
        let blocks: Vec<&Matrix> = maps.iter().map(|m| m.mat()).collect();
        let mat = Matrix::vstack(source.p(), source.dim(), &blocks)?;
        Ok(ModuleMorphism::trusted(source, &self.object, mat))
    }
}

pub fn direct_sum(cfg: CategoryConfig, modules: &[LambdaModule]) -> Result<DirectSum> {
    if let Some(m) = modules.iter().find(|m| m.cfg != cfg) {
        return Err(Error::Input(format!("direct_sum: summand config {:?} differs", m.cfg)));
    }
    let p = cfg.p;
    let actions: Vec<&Matrix> = modules.iter().map(|m| m.action()).collect();
    let object = LambdaModule {
        cfg,
        action: Arc::new(Matrix::block_diag(p, &actions)),
    };
    let total = object.dim();
    let mut inclusions = Vec::with_capacity(modules.len());
    let mut projections = Vec::with_capacity(modules.len());
    let mut off = 0;
    for m in modules {
        let d = m.dim();
        let incl = Matrix::from_fn(p, total, d, |r, c| u32::from(r == off + c));
        inclusions.push(ModuleMorphism::trusted(m, &object, incl.clone()));
        projections.push(ModuleMorphism::trusted(&object, m, incl.transpose()));
        off += d;
    }
    Ok(DirectSum {
        object,
        inclusions,
        projections,
    })
}

/// `f ⊕ g : A ⊕ A' → B ⊕ B'` on the canonical block sums.
pub fn direct_sum_morphism(f: &ModuleMorphism, g: &ModuleMorphism) -> Result<(DirectSum, DirectSum, ModuleMorphism)> {
    let cfg = f.src.cfg;
    let src = direct_sum(cfg, &[f.src.clone(), g.src.clone()])?;
    let tgt = direct_sum(cfg, &[f.tgt.clone(), g.tgt.clone()])?;
    let mat = Matrix::block_diag(cfg.p, &[&f.mat, &g.mat]);
    let m = ModuleMorphism::trusted(&src.object, &tgt.object, mat);
    Ok((src, tgt, m))
}

/// Partition of `dim m` recording its Jordan block sizes, in decreasing order.
///
/// Read off from the rank sequence `r_k = rank(X^k)`: the number of blocks of
/// size at least `k` is `r_{k-1} - r_k`.
pub fn jordan_type(m: &LambdaModule) -> Vec<usize> {
    let n = m.cfg.nilpotency;
    let mut ranks = Vec::with_capacity(n + 2);
    let mut power = Matrix::identity(m.p(), m.dim());
    for _ in 0..=n + 1 {
        ranks.push(power.rank());
        power = &power * m.action();
    }
    let at_least: Vec<usize> = (1..=n + 1).map(|k| ranks[k - 1] - ranks[k]).collect();
    let mut parts = Vec::new();
    for k in (1..=n).rev() {
        let exactly = at_least[k - 1] - at_least[k];
        parts.extend(std::iter::repeat_n(k, exactly));
    }
    parts
}

/// An isomorphism from a module onto the canonical sum of its Jordan blocks.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub partition: Vec<usize>,
    pub sum: DirectSum,
    /// `m → ⊕ M_{λ_t}`.
    pub iso: ModuleMorphism,
    /// `⊕ M_{λ_t} → m`.
    pub inverse: ModuleMorphism,
}

impl CanonicalForm {
    /// The embedding `M_{λ_t} → m` of the t-th block.
    pub fn block_inclusion(&self, t: usize) -> ModuleMorphism {
        compose(&self.inverse, &self.sum.inclusions[t]).expect("block inclusion")
    }

    /// The projection `m → M_{λ_t}` onto the t-th block.
    pub fn block_projection(&self, t: usize) -> ModuleMorphism {
        compose(&self.sum.projections[t], &self.iso).expect("block projection")
    }

    /// The image in `m` of the generator `v_0` of the t-th block.
    pub fn generator(&self, t: usize) -> Vec<u32> {
        let offset: usize = self.partition[..t].iter().sum();
        self.inverse.mat().column(offset)
    }
}

/// Computes a Jordan basis by choosing chain generators of each length `k`
/// as a complement of `ker X^{k-1} + X·ker X^{k+1}` inside `ker X^k`,
/// extending with basis vectors of `ker X^k` in index order.
pub fn canonical_iso(m: &LambdaModule) -> CanonicalForm {
    let cfg = m.cfg;
    let p = cfg.p;
    let d = m.dim();
    let n = cfg.nilpotency;
    let x = m.action();
    let mut kernels = Vec::with_capacity(n + 2);
    let mut power = Matrix::identity(p, d);
    for _ in 0..=n {
        kernels.push(linalg::kernel_basis(&power));
        power = &power * x;
    }
    kernels.push(Subspace::full(p, d));

    let mut chains: Vec<(usize, Vec<u32>)> = Vec::new();
    for k in (1..=n).rev() {
        let pushed = kernels[k + 1].image_under(x);
        let mut span = kernels[k - 1].sum(&pushed).expect("same ambient");
        for v in kernels[k].vectors() {
            if !span.contains(&v).expect("ambient") {
                span = span.sum(&Subspace::span(p, d, std::slice::from_ref(&v))).expect("ambient");
                chains.push((k, v));
            }
        }
    }
    let partition: Vec<usize> = chains.iter().map(|(k, _)| *k).collect();
    let mut columns = Vec::with_capacity(d);
    for (k, v) in &chains {
        let mut cur = v.clone();
        for _ in 0..*k {
            let next = x.mul_vec(&cur);
            columns.push(cur);
            cur = next;
        }
    }
    let q = Matrix::from_columns(p, d, &columns);
    let sum = canonical_sum(cfg, &partition).expect("parts bounded by N");
    let q_inv = q.inverse().expect("Jordan chains form a basis");
    let inverse = ModuleMorphism::trusted(&sum.object, m, q);
    let iso = ModuleMorphism::trusted(m, &sum.object, q_inv);
    CanonicalForm {
        partition,
        sum,
        iso,
        inverse,
    }
}

/// A basis of `Hom_Λ(src, tgt)` with coordinate extraction.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub src: LambdaModule,
    pub tgt: LambdaModule,
    pub basis: Vec<ModuleMorphism>,
    /// Vectorized basis elements as columns.
    vectorized: Matrix,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `f` in the basis.
    pub fn coordinates(&self, f: &ModuleMorphism) -> Result<Vec<u32>> {
        if f.src != self.src || f.tgt != self.tgt {
            return Err(Error::Input("coordinates: morphism not in this Hom space".into()));
        }
        linalg::solve_vec(&self.vectorized, &f.mat.vectorize())?
            .ok_or_else(|| Error::InvalidMorphism("morphism outside the Hom space".into()))
    }

    pub fn element(&self, coords: &[u32]) -> ModuleMorphism {
        assert_eq!(coords.len(), self.dim());
        let v = self.vectorized.mul_vec(coords);
        ModuleMorphism::trusted(
            &self.src,
            &self.tgt,
            Matrix::from_vectorized(self.src.p(), self.tgt.dim(), self.src.dim(), &v),
        )
    }

    pub fn elements(&self) -> Vec<ModuleMorphism> {
        linalg::all_vectors(self.src.p(), self.dim())
            .iter()
            .map(|c| self.element(c))
            .collect()
    }
}

/// Solves the commutation equations `f·X_a = X_b·f` for a basis of `Hom(a, b)`.
pub fn hom_space(a: &LambdaModule, b: &LambdaModule) -> Result<HomSpace> {
    if a.cfg != b.cfg {
        return Err(Error::Input("hom_space: modules over different configs".into()));
    }
    let p = a.p();
    let (da, db) = (a.dim(), b.dim());
    let unknowns = da * db;
    let xa = a.action();
    let xb = b.action();
    // Equation (r, c): Σ_k f[r][k]·Xa[k][c] − Σ_k Xb[r][k]·f[k][c] = 0, unknown f[r][c] at r·da + c.
    let mut eqs = vec![0u32; unknowns * unknowns];
    for r in 0..db {
        for c in 0..da {
            let row = r * da + c;
            for k in 0..da {
                let idx = row * unknowns + r * da + k;
                eqs[idx] = p.add(eqs[idx], xa.get(k, c));
            }
            for k in 0..db {
                let idx = row * unknowns + k * da + c;
                eqs[idx] = p.sub(eqs[idx], xb.get(r, k));
            }
        }
    }
    let system = Matrix::from_vectorized(p, unknowns, unknowns, &eqs);
    let kernel = linalg::kernel_basis(&system);
    let vectorized = kernel.basis().clone();
    let basis = kernel
        .vectors()
        .iter()
        .map(|v| ModuleMorphism::trusted(a, b, Matrix::from_vectorized(p, db, da, v)))
        .collect();
    Ok(HomSpace {
        src: a.clone(),
        tgt: b.clone(),
        basis,
        vectorized,
    })
}

pub fn hom_basis(a: &LambdaModule, b: &LambdaModule) -> Result<Vec<ModuleMorphism>> {
    Ok(hom_space(a, b)?.basis)
}

#[derive(Clone, Debug)]
pub struct KernelData {
    pub object: LambdaModule,
    /// The mono `k_f : Ker f → src`.
    pub inclusion: ModuleMorphism,
}

#[derive(Clone, Debug)]
pub struct CokernelData {
    pub object: LambdaModule,
    /// The epi `c_f : tgt → Coker f`.
    pub projection: ModuleMorphism,
}

/// The submodule carried by an `X`-invariant subspace, with its inclusion.
pub fn submodule(m: &LambdaModule, sub: &Subspace) -> Result<KernelData> {
    if sub.ambient() != m.dim() {
        return Err(Error::dim("submodule", "subspace ambient differs from module dim"));
    }
    let k = sub.basis();
    if !sub.contains_subspace(&sub.image_under(m.action()))? {
        return Err(Error::InvalidModule("subspace is not x-invariant".into()));
    }
    let left = k.left_inverse().expect("canonical basis has full column rank");
    let action = &(&left * m.action()) * k;
    let object = LambdaModule {
        cfg: m.cfg,
        action: Arc::new(action),
    };
    let inclusion = ModuleMorphism::trusted(&object, m, k.clone());
    Ok(KernelData { object, inclusion })
}

/// The quotient by an `X`-invariant subspace. The complement is spanned by
/// standard basis vectors added in index order whenever they raise the rank.
pub fn quotient(m: &LambdaModule, sub: &Subspace) -> Result<CokernelData> {
    if sub.ambient() != m.dim() {
        return Err(Error::dim("quotient", "subspace ambient differs from module dim"));
    }
    let p = m.p();
    let d = m.dim();
    if !sub.contains_subspace(&sub.image_under(m.action()))? {
        return Err(Error::InvalidModule("subspace is not x-invariant".into()));
    }
    let mut span = sub.clone();
    let mut extension = Vec::new();
    for i in 0..d {
        let mut e = vec![0u32; d];
        e[i] = 1;
        if !span.contains(&e)? {
            span = span.sum(&Subspace::span(p, d, &[e.clone()]))?;
            extension.push(e);
        }
    }
    let r = sub.dim();
    let section = Matrix::from_columns(p, d, &extension);
    let full = Matrix::hstack(p, d, &[sub.basis(), &section])?;
    let inv = full.inverse().expect("basis extension is invertible");
    let q = inv.submatrix(r..d, 0..d);
    let action = &(&q * m.action()) * &section;
    let object = LambdaModule {
        cfg: m.cfg,
        action: Arc::new(action),
    };
    let projection = ModuleMorphism::trusted(m, &object, q);
    Ok(CokernelData { object, projection })
}

pub fn kernel(f: &ModuleMorphism) -> KernelData {
    submodule(&f.src, &linalg::kernel_basis(&f.mat)).expect("kernels are submodules")
}

pub fn cokernel(f: &ModuleMorphism) -> CokernelData {
    quotient(&f.tgt, &linalg::image_basis(&f.mat)).expect("images are submodules")
}

/// `f = m ∘ e` with `e` epi onto the image and `m` the image inclusion.
#[derive(Clone, Debug)]
pub struct ImageFactorization {
    pub image: LambdaModule,
    pub epi: ModuleMorphism,
    pub mono: ModuleMorphism,
}

pub fn image_factorization(f: &ModuleMorphism) -> ImageFactorization {
    let im = submodule(&f.tgt, &linalg::image_basis(&f.mat)).expect("images are submodules");
    let epi = factor_through_mono(&im.inclusion, f)
        .expect("same target")
        .expect("f lands in its image");
    ImageFactorization {
        image: im.object,
        epi,
        mono: im.inclusion,
    }
}

#[derive(Serialize, Deserialize)]
struct ModuleJson {
    p: u32,
    #[serde(rename = "N")]
    n: usize,
    dim: usize,
    action: Vec<Vec<u32>>,
}

impl Serialize for LambdaModule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModuleJson {
            p: self.p().get(),
            n: self.cfg.nilpotency,
            dim: self.dim(),
            action: self.action.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LambdaModule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ModuleJson::deserialize(d)?;
        let cfg = CategoryConfig::new(raw.p, raw.n).map_err(D::Error::custom)?;
        if raw.action.len() != raw.dim || raw.action.iter().any(|r| r.len() != raw.dim) {
            return Err(D::Error::custom("action does not match dim"));
        }
        let rows: Vec<Vec<i64>> = raw
            .action
            .iter()
            .map(|r| r.iter().map(|&v| i64::from(v)).collect())
            .collect();
        let action = if raw.dim == 0 {
            Matrix::zeros(cfg.p, 0, 0)
        } else {
            Matrix::from_rows(cfg.p, &rows).map_err(D::Error::custom)?
        };
        make_module(cfg, action).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct MorphismJson {
    src: LambdaModule,
    tgt: LambdaModule,
    mat: Matrix,
}

impl Serialize for ModuleMorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MorphismJson {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            mat: self.mat.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModuleMorphism {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MorphismJson::deserialize(d)?;
        ModuleMorphism::new(&raw.src, &raw.tgt, raw.mat).map_err(D::Error::custom)
    }
}
