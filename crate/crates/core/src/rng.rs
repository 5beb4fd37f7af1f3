//! Seeded randomness for every sampled check.
//!
//! The generator is xorshift64* (named `xorshift64*-v1` in reports):
//!
//! ```text
//! state₀ = splitmix64(seed), replaced by 0x9E3779B97F4A7C15 if zero
//! x ^= x >> 12; x ^= x << 25; x ^= x >> 27; state = x
//! output = x · 0x2545F4914F6CDD1D (mod 2^64)
//! ```
//!
//! `below(n)` rejects outputs at or above the largest multiple of `n`, so
//! draws are uniform and the stream is reproducible across platforms.

use crate::linalg::{self, Matrix, Prime};
use crate::module_cat::{canonical_sum, make_module, CategoryConfig, HomSpace, LambdaModule, ModuleMorphism};

pub const PRNG_NAME: &str = "xorshift64*-v1";

#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let state = match splitmix64(seed) {
            0 => 0x9E37_79B9_7F4A_7C15,
            s => s,
        };
        Rng { state }
    }

    /// An independent stream for sub-task `index`, so parallel work does not
    /// depend on scheduling.
    pub fn fork(seed: u64, index: u64) -> Self {
        Rng::new(splitmix64(seed ^ splitmix64(index.wrapping_add(1))))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.index(items.len())]
    }

    pub fn coin(&mut self) -> bool {
        self.below(2) == 1
    }

    pub fn scalar(&mut self, p: Prime) -> u32 {
        self.below(u64::from(p.get())) as u32
    }

    pub fn vector(&mut self, p: Prime, n: usize) -> Vec<u32> {
        (0..n).map(|_| self.scalar(p)).collect()
    }

    pub fn matrix(&mut self, p: Prime, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(p, rows, cols, |_, _| self.scalar(p))
    }

    pub fn invertible(&mut self, p: Prime, n: usize) -> Matrix {
        loop {
            let m = self.matrix(p, n, n);
            if m.rank() == n {
                return m;
            }
        }
    }

    /// A partition of `dim` into parts of size at most `max_part`, in decreasing order.
    pub fn partition(&mut self, dim: usize, max_part: usize) -> Vec<usize> {
        let mut parts = Vec::new();
        let mut left = dim;
        while left > 0 {
            let part = 1 + self.index(left.min(max_part));
            parts.push(part);
            left -= part;
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }

    /// A random module of the given dimension: a canonical sum conjugated by a random invertible matrix.
    pub fn module(&mut self, cfg: CategoryConfig, dim: usize) -> LambdaModule {
        let parts = self.partition(dim, cfg.nilpotency());
        let base = canonical_sum(cfg, &parts).expect("parts within N").object;
        self.conjugate(&base).0
    }

    /// A module isomorphic to `m` together with the isomorphism `m → result`.
    pub fn conjugate(&mut self, m: &LambdaModule) -> (LambdaModule, ModuleMorphism) {
        let q = self.invertible(m.p(), m.dim());
        let q_inv = q.inverse().expect("invertible");
        let action = &(&q * m.action()) * &q_inv;
        let twisted = make_module(m.cfg(), action).expect("conjugate of a module");
        let iso = ModuleMorphism::new(m, &twisted, q).expect("conjugation intertwines");
        (twisted, iso)
    }

    pub fn hom_element(&mut self, hom: &HomSpace) -> ModuleMorphism {
        let coords = self.vector(hom.src.p(), hom.dim());
        hom.element(&coords)
    }

    /// A vector of `F_p^n` chosen uniformly among nonzero vectors when `n > 0`.
    pub fn nonzero_vector(&mut self, p: Prime, n: usize) -> Vec<u32> {
        if n == 0 {
            return Vec::new();
        }
        loop {
            let v = self.vector(p, n);
            if v.iter().any(|&x| x != 0) {
                return v;
            }
        }
    }
}

/// Elements of `F_p^dim`: all of them when there are at most `cap`, otherwise
/// the zero vector, the unit vectors and random fill-up to `cap`.
pub fn elements_capped(p: Prime, dim: usize, cap: usize, rng: &mut Rng) -> Vec<Vec<u32>> {
    let total = (p.get() as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if total <= cap as u128 {
        return linalg::all_vectors(p, dim);
    }
    let mut out = vec![vec![0u32; dim]];
    for k in 0..dim {
        let mut e = vec![0u32; dim];
        e[k] = 1;
        out.push(e);
    }
    while out.len() < cap {
        out.push(rng.vector(p, dim));
    }
    out
}
