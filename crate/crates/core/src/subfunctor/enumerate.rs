//! Exhaustive enumeration of subfunctors over a skeleton.

use std::sync::Arc;

use rayon::prelude::*;

use super::{Skeleton, SubfunctorData};
use crate::error::{Error, Result};
use crate::linalg::{count_subspaces, Subspace};

/// Enumeration refuses to start above this many candidate tuples.
pub const ENUMERATION_GUARD: u128 = 1_000_000;

fn subspace_count(p: u32, n: usize) -> u128 {
    // count_subspaces stays exact while p^(n·n) fits
    match u128::from(p).checked_pow((n * n) as u32) {
        Some(_) => count_subspaces(p, n),
        None => u128::MAX,
    }
}

/// Number of tuples `(U_{i,j})` of subspaces, saturating.
pub fn candidate_count(skeleton: &Skeleton) -> u128 {
    let p = skeleton.cfg().p().get();
    skeleton
        .pairs()
        .into_iter()
        .map(|(i, j)| subspace_count(p, skeleton.ext_dim(i, j)))
        .fold(1u128, |acc, c| acc.saturating_mul(c))
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub candidates: u128,
    /// Valid subfunctors in odometer order: pairs lexicographic, the last pair fastest.
    pub valid: Vec<SubfunctorData>,
}

/// Tests every tuple of subspaces for closure under pushouts and pullbacks.
pub fn enumerate_subfunctors(skeleton: &Arc<Skeleton>) -> Result<Enumeration> {
    let candidates = candidate_count(skeleton);
    if candidates > ENUMERATION_GUARD {
        return Err(Error::Guard {
            count: candidates,
            limit: ENUMERATION_GUARD,
        });
    }
    let p = skeleton.cfg().p();
    let choices: Vec<Vec<Subspace>> = skeleton
        .pairs()
        .into_iter()
        .map(|(i, j)| Subspace::enumerate_all(p, skeleton.ext_dim(i, j)))
        .collect();
    let total = candidates as usize;
    let valid: Vec<SubfunctorData> = (0..total)
        .into_par_iter()
        .filter_map(|mut index| {
            let mut u = vec![Subspace::zero(p, 0); choices.len()];
            for (slot, options) in u.iter_mut().zip(&choices).rev() {
                *slot = options[index % options.len()].clone();
                index /= options.len();
            }
            let f = SubfunctorData::from_subspaces(skeleton, u).expect("dims match");
            f.is_valid().then_some(f)
        })
        .collect();
    Ok(Enumeration { candidates, valid })
}
