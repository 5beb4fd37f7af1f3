//! Closedness: half-exactness of `F(X, −)` and `F(−, X)` on F-exact sequences.

use serde::Serialize;
use serde_json::{json, Value};

use super::fclass::canonical_objects;
use super::{f_exact_sequences, SubfunctorData};
use crate::error::Result;
use crate::ext::{ext_contravariant_matrix, ext_covariant_matrix};
use crate::linalg;
use crate::module_cat::LambdaModule;
use crate::rng::Rng;
use crate::ses::ShortExactSeq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureBudget {
    /// Ends `A`, `C` range over canonical sums with `dim A + dim C` up to this bound.
    pub end_dim: usize,
    /// Elements drawn from each `F(C, A)`.
    pub element_cap: usize,
    pub seed: u64,
}

impl Default for ClosureBudget {
    fn default() -> Self {
        ClosureBudget {
            end_dim: 4,
            element_cap: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideVerdict {
    pub closed: bool,
    pub checked: usize,
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedReport {
    pub left: Option<SideVerdict>,
    pub right: Option<SideVerdict>,
}

impl ClosedReport {
    pub fn closed(&self) -> bool {
        self.left.as_ref().is_none_or(|v| v.closed) && self.right.as_ref().is_none_or(|v| v.closed)
    }
}

/// Checks exactness in the middle of `F(X,A) → F(X,B) → F(X,C)` (right) and
/// `F(C,X) → F(B,X) → F(A,X)` (left) for `X = M_1, …, M_N` and F-exact
/// sequences with canonical ends within the budget.
pub fn is_closed(f: &SubfunctorData, side: Side, budget: &ClosureBudget) -> Result<ClosedReport> {
    let mut rng = Rng::new(budget.seed);
    let objects = canonical_objects(f, budget.end_dim.saturating_sub(1));
    let mut seqs = Vec::new();
    for a in &objects {
        for c in &objects {
            if a.dim() + c.dim() <= budget.end_dim {
                seqs.extend(f_exact_sequences(f, c, a, budget.element_cap, &mut rng)?);
            }
        }
    }
    let want_left = matches!(side, Side::Left | Side::Both);
    let want_right = matches!(side, Side::Right | Side::Both);
    let mut left = SideVerdict {
        closed: true,
        checked: 0,
        witness: None,
    };
    let mut right = left.clone();
    for e in &seqs {
        for x in f.skeleton().modules() {
            if want_right && right.closed {
                right.checked += 1;
                if let Some(class) = right_defect(f, e, x)? {
                    right.closed = false;
                    right.witness = Some(json!({ "sequence": e, "X": x, "class_in_Ext(X,B)": class }));
                }
            }
            if want_left && left.closed {
                left.checked += 1;
                if let Some(class) = left_defect(f, e, x)? {
                    left.closed = false;
                    left.witness = Some(json!({ "sequence": e, "X": x, "class_in_Ext(B,X)": class }));
                }
            }
        }
    }
    Ok(ClosedReport {
        left: want_left.then_some(left),
        right: want_right.then_some(right),
    })
}

/// A class of `F(X, B)` killed by `F(X, p)` but not coming from `F(X, A)`.
fn right_defect(f: &SubfunctorData, e: &ShortExactSeq, x: &LambdaModule) -> Result<Option<Vec<u32>>> {
    let fxb = f.subspace(x, e.b())?;
    let ext_p = ext_covariant_matrix(e.p(), x)?;
    let killed = fxb.intersect(&linalg::kernel_basis(&ext_p))?;
    let reached = f.subspace(x, e.a())?.image_under(&ext_covariant_matrix(e.i(), x)?);
    first_outside(&killed, &reached)
}

/// A class of `F(B, X)` killed by `F(i, X)` but not coming from `F(C, X)`.
fn left_defect(f: &SubfunctorData, e: &ShortExactSeq, x: &LambdaModule) -> Result<Option<Vec<u32>>> {
    let fbx = f.subspace(e.b(), x)?;
    let ext_i = ext_contravariant_matrix(e.i(), x)?;
    let killed = fbx.intersect(&linalg::kernel_basis(&ext_i))?;
    let reached = f.subspace(e.c(), x)?.image_under(&ext_contravariant_matrix(e.p(), x)?);
    first_outside(&killed, &reached)
}

fn first_outside(sub: &linalg::Subspace, target: &linalg::Subspace) -> Result<Option<Vec<u32>>> {
    for v in sub.vectors() {
        if !target.contains(&v)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}
