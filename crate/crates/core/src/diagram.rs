//! 3×3 grids, the Snake-lemma constructions, and grid generators.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Subspace};
use crate::module_cat::{
    cokernel, compose, factor_through_epi, factor_through_mono, kernel, quotient, submodule, zero_module,
    CategoryConfig, LambdaModule, ModuleMorphism,
};
use crate::rng::Rng;
use crate::ses::{SesMorphism, ShortExactSeq};

pub use crate::subfunctor::generate_grids;

const OBJECTS: [[&str; 3]; 3] = [["A", "B", "C"], ["D", "E", "G"], ["H", "I", "J"]];
const ROW_MAPS: [[&str; 2]; 3] = [["a", "b"], ["d", "e"], ["g", "h"]];
const COL_MAPS: [[&str; 2]; 3] = [["i", "k"], ["j", "l"], ["c", "f"]];

/// A commutative 3×3 diagram
///
/// ```text
/// A -a-> B -b-> C
/// |i     |j     |c
/// D -d-> E -e-> G
/// |k     |l     |f
/// H -g-> I -h-> J
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct Grid3x3 {
    objects: [[LambdaModule; 3]; 3],
    rows: [[ModuleMorphism; 2]; 3],
    cols: [[ModuleMorphism; 2]; 3],
}

impl Grid3x3 {
    /// `rows[r] = [left, right]` along row `r`; `cols[c] = [upper, lower]` down column `c`.
    pub fn new(
        objects: [[LambdaModule; 3]; 3],
        rows: [[ModuleMorphism; 2]; 3],
        cols: [[ModuleMorphism; 2]; 3],
    ) -> Result<Self> {
        for r in 0..3 {
            for t in 0..2 {
                let m = &rows[r][t];
                if m.src() != &objects[r][t] || m.tgt() != &objects[r][t + 1] {
                    return Err(Error::dim("grid", format!("map {} does not match its objects", ROW_MAPS[r][t])));
                }
            }
        }
        for c in 0..3 {
            for t in 0..2 {
                let m = &cols[c][t];
                if m.src() != &objects[t][c] || m.tgt() != &objects[t + 1][c] {
                    return Err(Error::dim("grid", format!("map {} does not match its objects", COL_MAPS[c][t])));
                }
            }
        }
        Ok(Grid3x3 { objects, rows, cols })
    }

    pub fn object(&self, r: usize, c: usize) -> &LambdaModule {
        &self.objects[r][c]
    }

    pub fn row_maps(&self, r: usize) -> &[ModuleMorphism; 2] {
        &self.rows[r]
    }

    pub fn col_maps(&self, c: usize) -> &[ModuleMorphism; 2] {
        &self.cols[c]
    }

    pub fn row(&self, r: usize) -> Result<ShortExactSeq> {
        ShortExactSeq::from_maps(self.rows[r][0].clone(), self.rows[r][1].clone())
    }

    pub fn col(&self, c: usize) -> Result<ShortExactSeq> {
        ShortExactSeq::from_maps(self.cols[c][0].clone(), self.cols[c][1].clone())
    }

    pub fn transpose(&self) -> Grid3x3 {
        let objects = std::array::from_fn(|r| std::array::from_fn(|c| self.objects[c][r].clone()));
        Grid3x3 {
            objects,
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    /// The all-zero grid.
    pub fn zero(cfg: CategoryConfig) -> Grid3x3 {
        let z = zero_module(cfg);
        let m = ModuleMorphism::identity(&z);
        Grid3x3 {
            objects: std::array::from_fn(|_| std::array::from_fn(|_| z.clone())),
            rows: std::array::from_fn(|_| [m.clone(), m.clone()]),
            cols: std::array::from_fn(|_| [m.clone(), m.clone()]),
        }
    }

    /// Replaces one map by another with the same ends; used for negative controls.
    pub fn with_map(&self, label: &str, m: ModuleMorphism) -> Result<Grid3x3> {
        let mut rows = self.rows.clone();
        let mut cols = self.cols.clone();
        let mut found = false;
        for r in 0..3 {
            for t in 0..2 {
                if ROW_MAPS[r][t] == label {
                    rows[r][t] = m.clone();
                    found = true;
                }
                if COL_MAPS[r][t] == label {
                    cols[r][t] = m.clone();
                    found = true;
                }
            }
        }
        if !found {
            return Err(Error::Input(format!("no map labelled {label}")));
        }
        Grid3x3::new(self.objects.clone(), rows, cols)
    }

    /// Keyed by the letters of the diagram: objects `A … J`, maps `a … l`.
    pub fn to_json(&self) -> Value {
        let mut out = BTreeMap::new();
        for r in 0..3 {
            for c in 0..3 {
                out.insert(OBJECTS[r][c], json!(self.objects[r][c]));
            }
            for t in 0..2 {
                out.insert(ROW_MAPS[r][t], json!(self.rows[r][t]));
                out.insert(COL_MAPS[r][t], json!(self.cols[r][t]));
            }
        }
        json!(out)
    }

    pub fn from_json(value: &Value) -> Result<Grid3x3> {
        fn field<T: serde::de::DeserializeOwned>(value: &Value, key: &str) -> Result<T> {
            let v = value.get(key).ok_or_else(|| Error::Input(format!("grid JSON lacks {key}")))?;
            serde_json::from_value(v.clone()).map_err(|e| Error::Input(format!("grid JSON {key}: {e}")))
        }
        let mut objects = Vec::new();
        for r in 0..3 {
            for c in 0..3 {
                objects.push(field::<LambdaModule>(value, OBJECTS[r][c])?);
            }
        }
        let mut rows = Vec::new();
        let mut cols = Vec::new();
        for r in 0..3 {
            for t in 0..2 {
                rows.push(field::<ModuleMorphism>(value, ROW_MAPS[r][t])?);
                cols.push(field::<ModuleMorphism>(value, COL_MAPS[r][t])?);
            }
        }
        Grid3x3::new(
            std::array::from_fn(|r| std::array::from_fn(|c| objects[3 * r + c].clone())),
            std::array::from_fn(|r| std::array::from_fn(|t| rows[2 * r + t].clone())),
            std::array::from_fn(|c| std::array::from_fn(|t| cols[2 * c + t].clone())),
        )
    }
}

impl Serialize for Grid3x3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridReport {
    pub commutes: bool,
    /// Non-commuting squares named by their corners, e.g. `A-B-D-E`.
    pub failed_squares: Vec<String>,
    pub rows_exact: [bool; 3],
    pub cols_exact: [bool; 3],
}

impl GridReport {
    pub fn all_pass(&self) -> bool {
        self.commutes && self.rows_exact.iter().all(|&b| b) && self.cols_exact.iter().all(|&b| b)
    }
}

pub fn verify_grid(grid: &Grid3x3) -> GridReport {
    let mut failed_squares = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            let down_then_right = compose(&grid.rows[r + 1][c], &grid.cols[c][r]).expect("grid is composable");
            let right_then_down = compose(&grid.cols[c + 1][r], &grid.rows[r][c]).expect("grid is composable");
            if down_then_right != right_then_down {
                failed_squares.push(format!(
                    "{}-{}-{}-{}",
                    OBJECTS[r][c],
                    OBJECTS[r][c + 1],
                    OBJECTS[r + 1][c],
                    OBJECTS[r + 1][c + 1]
                ));
            }
        }
    }
    GridReport {
        commutes: failed_squares.is_empty(),
        failed_squares,
        rows_exact: std::array::from_fn(|r| grid.row(r).is_ok()),
        cols_exact: std::array::from_fn(|c| grid.col(c).is_ok()),
    }
}

/// The grid for `h = g∘f` with monos `f: A → B`, `g: B → C`:
///
/// ```text
/// A   =   A    →  0
/// |f      |h      |
/// B  -g-> C  -c_g-> Coker g
/// |c_f    |c_h    ‖
/// Coker f -m-> Coker h -n-> Coker g
/// ```
pub fn snake_grid(f: &ModuleMorphism, g: &ModuleMorphism) -> Result<Grid3x3> {
    if !f.is_mono() || !g.is_mono() {
        return Err(Error::Input("snake_grid needs monomorphisms".into()));
    }
    let h = compose(g, f)?;
    let a = f.src().clone();
    let zero = zero_module(a.cfg());
    let cf = cokernel(f);
    let cg = cokernel(g);
    let ch = cokernel(&h);
    let m = factor_through_epi(&cf.projection, &compose(&ch.projection, g)?)?.expect("c_h·g kills Im f");
    let n = factor_through_epi(&ch.projection, &cg.projection)?.expect("c_g kills Im h");
    Grid3x3::new(
        [
            [a.clone(), a.clone(), zero.clone()],
            [f.tgt().clone(), g.tgt().clone(), cg.object.clone()],
            [cf.object.clone(), ch.object.clone(), cg.object.clone()],
        ],
        [
            [ModuleMorphism::identity(&a), ModuleMorphism::zero(&a, &zero)],
            [g.clone(), cg.projection.clone()],
            [m, n],
        ],
        [
            [f.clone(), cf.projection.clone()],
            [h, ch.projection.clone()],
            [ModuleMorphism::zero(&zero, &cg.object), ModuleMorphism::identity(&cg.object)],
        ],
    )
}

/// The dual grid for `h = g∘f` with epis `f: X → Y`, `g: Y → Z`:
///
/// ```text
/// Ker f -u-> Ker h -v-> Ker g
/// ‖          |k_h       |k_g
/// Ker f -k_f-> X  -f->  Y
/// |          |h         |g
/// 0    →     Z    =     Z
/// ```
pub fn snake_epi_grid(f: &ModuleMorphism, g: &ModuleMorphism) -> Result<Grid3x3> {
    if !f.is_epi() || !g.is_epi() {
        return Err(Error::Input("snake_epi_grid needs epimorphisms".into()));
    }
    let h = compose(g, f)?;
    let z = g.tgt().clone();
    let zero = zero_module(z.cfg());
    let kf = kernel(f);
    let kg = kernel(g);
    let kh = kernel(&h);
    let u = factor_through_mono(&kh.inclusion, &kf.inclusion)?.expect("Ker f ⊆ Ker h");
    let v = factor_through_mono(&kg.inclusion, &compose(f, &kh.inclusion)?)?.expect("f maps Ker h into Ker g");
    Grid3x3::new(
        [
            [kf.object.clone(), kh.object.clone(), kg.object.clone()],
            [kf.object.clone(), f.src().clone(), f.tgt().clone()],
            [zero.clone(), z.clone(), z.clone()],
        ],
        [
            [u, v],
            [kf.inclusion.clone(), f.clone()],
            [ModuleMorphism::zero(&zero, &z), ModuleMorphism::identity(&z)],
        ],
        [
            [ModuleMorphism::identity(&kf.object), ModuleMorphism::zero(&kf.object, &zero)],
            [kh.inclusion.clone(), h],
            [kg.inclusion.clone(), g.clone()],
        ],
    )
}

/// The grid of a module `E` with submodules `D` and `B`:
///
/// ```text
/// D∩B → B   → B/(D∩B)
/// D   → E   → E/D
/// D/(D∩B) → E/B → E/(D+B)
/// ```
///
/// Every 3×3 grid with exact rows and columns is isomorphic to one of these.
pub fn submodule_grid(e_mod: &LambdaModule, d_sub: &Subspace, b_sub: &Subspace) -> Result<Grid3x3> {
    let kd = submodule(e_mod, d_sub)?;
    let kb = submodule(e_mod, b_sub)?;
    let ka = submodule(e_mod, &d_sub.intersect(b_sub)?)?;
    let qg = quotient(e_mod, d_sub)?;
    let qi = quotient(e_mod, b_sub)?;
    let qj = quotient(e_mod, &d_sub.sum(b_sub)?)?;
    let a = factor_through_mono(&kb.inclusion, &ka.inclusion)?.expect("D∩B ⊆ B");
    let i = factor_through_mono(&kd.inclusion, &ka.inclusion)?.expect("D∩B ⊆ D");
    let qc = cokernel(&a);
    let qh = cokernel(&i);
    let c = factor_through_epi(&qc.projection, &compose(&qg.projection, &kb.inclusion)?)?.expect("B∩D dies in E/D");
    let g = factor_through_epi(&qh.projection, &compose(&qi.projection, &kd.inclusion)?)?.expect("D∩B dies in E/B");
    let f = factor_through_epi(&qg.projection, &qj.projection)?.expect("D dies in E/(D+B)");
    let h = factor_through_epi(&qi.projection, &qj.projection)?.expect("B dies in E/(D+B)");
    Grid3x3::new(
        [
            [ka.object.clone(), kb.object.clone(), qc.object.clone()],
            [kd.object.clone(), e_mod.clone(), qg.object.clone()],
            [qh.object.clone(), qi.object.clone(), qj.object.clone()],
        ],
        [
            [a, qc.projection.clone()],
            [kd.inclusion.clone(), qg.projection.clone()],
            [g, h],
        ],
        [
            [i, qh.projection.clone()],
            [kb.inclusion.clone(), qi.projection.clone()],
            [c, f],
        ],
    )
}

/// The connecting map of a morphism of short exact sequences and the exactness
/// of `0 → Ker f → Ker g → Ker h → Coker f → Coker g → Coker h → 0`.
#[derive(Clone, Debug, Serialize)]
pub struct SnakeData {
    pub delta: ModuleMorphism,
    /// `Ker f → Ker g` and `Ker g → Ker h`.
    pub kernel_maps: [ModuleMorphism; 2],
    /// `t: Coker f → Coker g` (with `t·c_f = c_g·i′`) and `u: Coker g → Coker h` (with `u·c_g = c_h·p′`).
    pub cokernel_maps: [ModuleMorphism; 2],
    pub kernel_inclusions: [ModuleMorphism; 3],
    pub cokernel_projections: [ModuleMorphism; 3],
    /// Exactness at Ker f (mono), Ker g, Ker h, Coker f, Coker g, Coker h (epi).
    pub exact: [bool; 6],
    /// The chase gave the same `δ` with a second choice of lift and of preimage.
    pub choice_independent: bool,
}

impl SnakeData {
    pub fn all_exact(&self) -> bool {
        self.exact.iter().all(|&b| b)
    }
}

fn exact_at(alpha: &Matrix, beta: &Matrix) -> bool {
    (beta * alpha).is_zero() && linalg::rank(alpha) + linalg::rank(beta) == alpha.rows()
}

fn chase(
    kh: &Matrix,
    lift: &Matrix,
    g: &Matrix,
    preimage: &Matrix,
    cf: &Matrix,
) -> Matrix {
    &(&(&(cf * preimage) * g) * lift) * kh
}

/// Builds `δ: Ker h → Coker f` by lifting through `p`, applying `g` and pulling
/// back through `i′`, then checks the six-term sequence.
pub fn snake_connecting(src: &ShortExactSeq, tgt: &ShortExactSeq, mor: &SesMorphism) -> Result<SnakeData> {
    mor.validate(src, tgt)?;
    let p = src.a().p();
    let kf = kernel(&mor.f);
    let kg = kernel(&mor.g);
    let kh = kernel(&mor.h);
    let cf = cokernel(&mor.f);
    let cg = cokernel(&mor.g);
    let ch = cokernel(&mor.h);

    let lift = src.p().mat().right_inverse().expect("p is epi");
    let preimage = tgt.i().mat().left_inverse().expect("i′ is mono");
    let delta_mat = chase(kh.inclusion.mat(), &lift, mor.g.mat(), &preimage, cf.projection.mat());

    // second choices: shift the lift by Ker p and the preimage by a map killing Im i′
    let ker_p = linalg::kernel_basis(src.p().mat());
    let shift = Matrix::from_fn(p, ker_p.dim(), lift.cols(), |_, _| 1);
    let lift2 = &lift + &(ker_p.basis() * &shift);
    let coker_i = cokernel(tgt.i()).projection;
    let ones = Matrix::from_fn(p, preimage.rows(), coker_i.mat().rows(), |_, _| 1);
    let preimage2 = &preimage + &(&ones * coker_i.mat());
    let delta2 = chase(kh.inclusion.mat(), &lift2, mor.g.mat(), &preimage2, cf.projection.mat());

    let delta = ModuleMorphism::new(&kh.object, &cf.object, delta_mat.clone())?;
    let k1 = factor_through_mono(&kg.inclusion, &compose(src.i(), &kf.inclusion)?)?.expect("i maps Ker f into Ker g");
    let k2 = factor_through_mono(&kh.inclusion, &compose(src.p(), &kg.inclusion)?)?.expect("p maps Ker g into Ker h");
    let t = factor_through_epi(&cf.projection, &compose(&cg.projection, tgt.i())?)?.expect("c_g·i′ kills Im f");
    let u = factor_through_epi(&cg.projection, &compose(&ch.projection, tgt.p())?)?.expect("c_h·p′ kills Im g");

    let p_zero = |rows: usize, cols: usize| Matrix::zeros(p, rows, cols);
    let exact = [
        k1.is_mono(),
        exact_at(k1.mat(), k2.mat()),
        exact_at(k2.mat(), delta.mat()),
        exact_at(delta.mat(), t.mat()),
        exact_at(t.mat(), u.mat()),
        exact_at(u.mat(), &p_zero(0, u.tgt().dim())),
    ];
    Ok(SnakeData {
        delta,
        kernel_maps: [k1, k2],
        cokernel_maps: [t, u],
        kernel_inclusions: [kf.inclusion, kg.inclusion, kh.inclusion],
        cokernel_projections: [cf.projection, cg.projection, ch.projection],
        exact,
        choice_independent: delta2 == delta_mat,
    })
}

/// Random `X`-invariant subspace of `m`: the sum of up to two cyclic submodules.
pub fn random_submodule(m: &LambdaModule, rng: &mut Rng) -> Subspace {
    let p = m.p();
    let d = m.dim();
    let mut gens = Vec::new();
    for _ in 0..rng.index(3) {
        let mut v = rng.vector(p, d);
        while v.iter().any(|&x| x != 0) {
            gens.push(v.clone());
            v = m.action().mul_vec(&v);
        }
    }
    Subspace::span(p, d, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module_cat::{direct_sum, indecomposable};
    use crate::ses::{pushout_ses, split_ses};

    fn cfg(p: u32, n: usize) -> CategoryConfig {
        CategoryConfig::new(p, n).unwrap()
    }

    fn socle(p: u32, n: usize) -> ModuleMorphism {
        let m1 = indecomposable(cfg(p, n), 1).unwrap();
        let m2 = indecomposable(cfg(p, n), 2).unwrap();
        ModuleMorphism::new(&m1, &m2, Matrix::from_rows(m1.p(), &[[0], [1]]).unwrap()).unwrap()
    }

    #[test]
    fn zero_grid_passes() {
        let r = verify_grid(&Grid3x3::zero(cfg(2, 2)));
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn split_grid_passes() {
        let c = cfg(3, 3);
        let m1 = indecomposable(c, 1).unwrap();
        let m2 = indecomposable(c, 2).unwrap();
        let s = direct_sum(c, &[m1.clone(), m2.clone()]).unwrap();
        let grid = submodule_grid(
            &s.object,
            &linalg::image_basis(s.inclusions[0].mat()),
            &linalg::image_basis(s.inclusions[1].mat()),
        )
        .unwrap();
        assert!(verify_grid(&grid).all_pass());
        assert!(grid.row(1).unwrap().is_split());
    }

    #[test]
    fn perturbed_grid_names_the_square() {
        let s = socle(2, 2);
        let grid = snake_grid(&s, &ModuleMorphism::identity(s.tgt())).unwrap();
        assert!(verify_grid(&grid).all_pass());
        let bad = grid.with_map("g", ModuleMorphism::zero(grid.object(2, 0), grid.object(2, 1))).unwrap();
        let r = verify_grid(&bad);
        assert!(!r.commutes);
        assert_eq!(r.failed_squares, vec!["D-E-H-I"]);
    }

    #[test]
    fn snake_grid_examples() {
        let m = indecomposable(cfg(2, 3), 2).unwrap();
        let id = ModuleMorphism::identity(&m);
        let grid = snake_grid(&id, &id).unwrap();
        assert!(verify_grid(&grid).all_pass());
        assert!((0..3).all(|c| grid.object(2, c).is_zero()));

        let s = socle(2, 2);
        let grid = snake_grid(&s, &ModuleMorphism::identity(s.tgt())).unwrap();
        assert_eq!(grid.object(2, 0).dim(), 1);
        assert_eq!(grid.object(2, 1).dim(), 1);
        assert!(grid.object(2, 2).is_zero());
        assert!(grid.row_maps(2)[0].is_iso());
        assert!(snake_grid(&s.neg(), &ModuleMorphism::zero(s.tgt(), s.tgt())).is_err());
    }

    #[test]
    fn snake_epi_grid_passes() {
        let s = socle(3, 3);
        let c = cokernel(&s).projection;
        let m1 = c.tgt().clone();
        let g = ModuleMorphism::identity(&m1);
        let grid = snake_epi_grid(&c, &g).unwrap();
        assert!(verify_grid(&grid).all_pass());
        assert!(verify_grid(&grid.transpose()).all_pass());
    }

    #[test]
    fn grid_json_round_trip() {
        let s = socle(2, 3);
        let grid = snake_grid(&s, &ModuleMorphism::identity(s.tgt())).unwrap();
        let v = grid.to_json();
        assert!(v.get("E").is_some() && v.get("l").is_some());
        assert_eq!(Grid3x3::from_json(&v).unwrap(), grid);
    }

    #[test]
    fn connecting_map_of_identity_is_trivial() {
        let c = cfg(2, 3);
        let e = split_ses(&indecomposable(c, 1).unwrap(), &indecomposable(c, 2).unwrap()).unwrap();
        let data = snake_connecting(&e, &e, &SesMorphism::identity(&e)).unwrap();
        assert!(data.all_exact() && data.choice_independent);
        assert!(data.delta.src().is_zero() && data.delta.tgt().is_zero());
    }

    #[test]
    fn pushout_square_gives_cokernel_isomorphism() {
        let c = cfg(2, 3);
        let m1 = indecomposable(c, 1).unwrap();
        let m2 = indecomposable(c, 2).unwrap();
        let m3 = indecomposable(c, 3).unwrap();
        // 0 → M_2 → M_3 → M_1 → 0 pushed out along the socle-of-M_2 quotient M_2 → M_1
        let i = ModuleMorphism::new(&m2, &m3, Matrix::from_rows(m3.p(), &[[0, 0], [1, 0], [0, 1]]).unwrap()).unwrap();
        let e = ShortExactSeq::from_maps(i.clone(), cokernel(&i).projection).unwrap();
        let pi = ModuleMorphism::new(&m2, &m1, Matrix::from_rows(m1.p(), &[[1, 0]]).unwrap()).unwrap();
        let (po, mor) = pushout_ses(&e, &pi).unwrap();
        let data = snake_connecting(&e, &po, &mor).unwrap();
        assert!(data.all_exact() && data.choice_independent);
        let t = &data.cokernel_maps[0];
        assert!(t.is_iso());
        let lhs = compose(t, &data.cokernel_projections[0]).unwrap();
        let rhs = compose(&data.cokernel_projections[1], po.i()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
