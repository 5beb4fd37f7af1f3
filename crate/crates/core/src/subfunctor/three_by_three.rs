//! Bounded search for violations of the 3×3-lemma property, and the
//! three-way agreement closed / h.f. class / 3×3.

use serde::Serialize;
use serde_json::{json, Value};

use super::closed::{is_closed, ClosureBudget, Side};
use super::fclass::{check_fclass, composable_pairs, FClassBudget, Membership};
use super::{is_f_exact, SubfunctorData};
use crate::diagram::{random_submodule, snake_epi_grid, snake_grid, submodule_grid, verify_grid, Grid3x3};
use crate::error::Result;
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridBudget {
    /// Random submodule grids examined after the structured ones.
    pub random_grids: usize,
    /// Middle objects of random grids have dimension in `1..=random_dim`.
    pub random_dim: usize,
    /// Budget for the composable pairs feeding the Snake grids.
    pub pairs: FClassBudget,
    pub seed: u64,
}

impl Default for GridBudget {
    fn default() -> Self {
        GridBudget {
            random_grids: 200,
            random_dim: 4,
            pairs: FClassBudget::default(),
            seed: 0,
        }
    }
}

pub const BOUNDED_NOTE: &str =
    "bounded search: the 3x3-lemma property quantifies over all diagrams; a pass means no violation within the budget";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreeByThreeReport {
    pub examined: usize,
    pub premises_held: usize,
    pub violations: usize,
    pub witness: Option<Value>,
    pub budget: GridBudget,
    pub note: &'static str,
}

impl ThreeByThreeReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Rows 1 and 3 and all columns F-exact, middle row exact, squares commuting.
pub fn grid_premises(f: &SubfunctorData, grid: &Grid3x3) -> Result<bool> {
    let report = verify_grid(grid);
    if !report.all_pass() {
        return Ok(false);
    }
    for r in [0, 2] {
        if !is_f_exact(f, &grid.row(r)?)? {
            return Ok(false);
        }
    }
    for c in 0..3 {
        if !is_f_exact(f, &grid.col(c)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Transposed Snake grids of composable monos and epis in `M_F`; their middle
/// rows are the sequences of the composites.
fn structured_grids(f: &SubfunctorData, pairs: &FClassBudget) -> Result<Vec<Grid3x3>> {
    let (monos, epis) = composable_pairs(f, pairs)?;
    let mut member = Membership::new(f);
    let mut grids = Vec::new();
    for (a, b) in &monos {
        if member.contains(a)? && member.contains(b)? {
            grids.push(snake_grid(a, b)?.transpose());
        }
    }
    for (a, b) in &epis {
        if member.contains(a)? && member.contains(b)? {
            grids.push(snake_epi_grid(a, b)?.transpose());
        }
    }
    Ok(grids)
}

fn random_grid(f: &SubfunctorData, max_dim: usize, rng: &mut Rng) -> Result<Grid3x3> {
    let dim = 1 + rng.index(max_dim.max(1));
    let e = rng.module(f.cfg(), dim);
    let d = random_submodule(&e, rng);
    let b = random_submodule(&e, rng);
    submodule_grid(&e, &d, &b)
}

/// Up to `count` grids satisfying the premises of the 3×3-lemma property for `F`:
/// Snake grids of composable F-monos and F-epis first, then random submodule
/// grids that pass the premise check.
pub fn generate_grids(f: &SubfunctorData, seed: u64, count: usize) -> Result<Vec<Grid3x3>> {
    let budget = FClassBudget {
        seed,
        ..FClassBudget::default()
    };
    let mut out = Vec::new();
    for grid in structured_grids(f, &budget)? {
        if out.len() == count {
            return Ok(out);
        }
        if grid_premises(f, &grid)? {
            out.push(grid);
        }
    }
    let mut rng = Rng::fork(seed, 3);
    let mut attempts = 0;
    while out.len() < count && attempts < 50 * count {
        attempts += 1;
        let grid = random_grid(f, 4, &mut rng)?;
        if grid_premises(f, &grid)? {
            out.push(grid);
        }
    }
    Ok(out)
}

/// Examines every structured grid and `random_grids` random ones; a violation
/// is a grid meeting the premises whose middle row is not F-exact.
pub fn check_3x3(f: &SubfunctorData, budget: &GridBudget) -> Result<ThreeByThreeReport> {
    let mut report = ThreeByThreeReport {
        examined: 0,
        premises_held: 0,
        violations: 0,
        witness: None,
        budget: *budget,
        note: BOUNDED_NOTE,
    };
    let mut examine = |grid: &Grid3x3, source: &str| -> Result<()> {
        report.examined += 1;
        if !grid_premises(f, grid)? {
            return Ok(());
        }
        report.premises_held += 1;
        if !is_f_exact(f, &grid.row(1)?)? {
            report.violations += 1;
            if report.witness.is_none() {
                report.witness = Some(json!({ "source": source, "grid": grid }));
            }
        }
        Ok(())
    };
    for grid in structured_grids(f, &budget.pairs)? {
        examine(&grid, "snake")?;
    }
    let mut rng = Rng::fork(budget.seed, 3);
    for _ in 0..budget.random_grids {
        let grid = random_grid(f, budget.random_dim, &mut rng)?;
        examine(&grid, "submodules")?;
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TheoremBudget {
    pub closure: ClosureBudget,
    pub fclass: FClassBudget,
    pub grids: GridBudget,
}

impl TheoremBudget {
    /// Default budgets with larger test objects as `N` grows: closure ends up to
    /// total dimension `max(4, 2N − 2)`, structured pairs up to `max(2, N − 1)`.
    pub fn scaled(n: usize, seed: u64) -> Self {
        let mut b = TheoremBudget::with_seed(seed);
        b.closure.end_dim = b.closure.end_dim.max(2 * n.saturating_sub(1));
        let structured = b.fclass.structured_dim.max(n.saturating_sub(1));
        b.fclass.structured_dim = structured;
        b.grids.pairs.structured_dim = structured;
        b
    }

    pub fn with_seed(seed: u64) -> Self {
        TheoremBudget {
            closure: ClosureBudget {
                seed,
                ..ClosureBudget::default()
            },
            fclass: FClassBudget {
                seed,
                ..FClassBudget::default()
            },
            grids: GridBudget {
                seed,
                pairs: FClassBudget {
                    seed,
                    ..FClassBudget::default()
                },
                ..GridBudget::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MainTheoremReport {
    pub closed_left: bool,
    pub closed_right: bool,
    pub closed: bool,
    /// (A)–(E*) all hold for `M_F`.
    pub hf: bool,
    pub three_by_three: bool,
    /// `closed == hf == three_by_three`; a disagreement is an implementation defect.
    pub agree: bool,
    pub closure_witness: Option<Value>,
    pub fclass_witness: Option<Value>,
    pub grids: ThreeByThreeReport,
}

pub fn main_theorem_report(f: &SubfunctorData, budget: &TheoremBudget) -> Result<MainTheoremReport> {
    let closure = is_closed(f, Side::Both, &budget.closure)?;
    let left = closure.left.expect("both sides requested");
    let right = closure.right.expect("both sides requested");
    let verdict = check_fclass(f, &budget.fclass)?;
    let grids = check_3x3(f, &budget.grids)?;
    let closed = left.closed && right.closed;
    let hf = verdict.hf_class();
    let three_by_three = grids.holds();
    let fclass_witness = verdict
        .axioms
        .iter()
        .find(|(_, r)| !r.pass)
        .map(|(name, r)| json!({ "axiom": name, "witness": r.witness }));
    Ok(MainTheoremReport {
        closed_left: left.closed,
        closed_right: right.closed,
        closed,
        hf,
        three_by_three,
        agree: closed == hf && hf == three_by_three,
        closure_witness: left.witness.or(right.witness),
        fclass_witness,
        grids,
    })
}
