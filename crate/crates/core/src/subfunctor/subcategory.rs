//! Subfunctors determined by a set of modules.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Skeleton, SubfunctorData};
use crate::error::{Error, Result};
use crate::ext::{ext_contravariant_matrix, ext_covariant_matrix};
use crate::linalg::{kernel_basis, Subspace};
use crate::module_cat::{hom_basis, LambdaModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// `F_X(C, A)`: classes whose pullback along every `X → C` splits.
    #[serde(rename = "cov")]
    Covariant,
    /// `F^X(C, A)`: classes whose pushout along every `A → X` splits.
    #[serde(rename = "contra")]
    Contravariant,
}

/// `U_{i,j}` is the intersection of the kernels of `Ext(f, M_j)` over
/// `f ∈ Hom(X, M_i)` (covariant) or of `Ext(M_i, g)` over `g ∈ Hom(M_j, X)`
/// (contravariant), for each generator `X`. Hom bases suffice by linearity.
pub fn subfunctor_from_subcategory(
    skeleton: &Arc<Skeleton>,
    generators: &[LambdaModule],
    variant: Variant,
) -> Result<SubfunctorData> {
    let cfg = skeleton.cfg();
    if generators.iter().any(|x| x.cfg() != cfg) {
        return Err(Error::Input("generator config differs from the skeleton".into()));
    }
    let p = cfg.p();
    let mut u = Vec::new();
    for (i, j) in skeleton.pairs() {
        let mi = skeleton.module(i);
        let mj = skeleton.module(j);
        let mut sub = Subspace::full(p, skeleton.ext_dim(i, j));
        for x in generators {
            let maps = match variant {
                Variant::Covariant => hom_basis(x, mi)?
                    .iter()
                    .map(|f| ext_contravariant_matrix(f, mj))
                    .collect::<Result<Vec<_>>>()?,
                Variant::Contravariant => hom_basis(mj, x)?
                    .iter()
                    .map(|g| ext_covariant_matrix(g, mi))
                    .collect::<Result<Vec<_>>>()?,
            };
            for m in maps {
                sub = sub.intersect(&kernel_basis(&m))?;
            }
        }
        u.push(sub);
    }
    SubfunctorData::from_subspaces(skeleton, u)
}
