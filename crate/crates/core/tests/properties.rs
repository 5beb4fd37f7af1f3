use proptest::prelude::*;

use exactkit::diagram::{random_submodule, snake_connecting, submodule_grid, verify_grid, Grid3x3};
use exactkit::ext::{ext, ext_contravariant_matrix, ext_covariant_matrix};
use exactkit::linalg::{kernel_basis, rank, Prime};
use exactkit::module_cat::{
    canonical_iso, cokernel, compose, hom_space, image_factorization, indecomposable, jordan_type, kernel,
    CategoryConfig, LambdaModule, ModuleMorphism,
};
use exactkit::rng::Rng;
use exactkit::ses::{pullback_ses, pushout_ses, ShortExactSeq};
use exactkit::subfunctor::{build_skeleton, enumerate_subfunctors, is_f_exact, is_f_exact_oracle, SubfunctorData};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn small_prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3), Just(5)]
}

fn module(cfg: CategoryConfig, max_dim: usize, rng: &mut Rng) -> LambdaModule {
    let dim = 1 + rng.index(max_dim);
    rng.module(cfg, dim)
}

fn random_sequence(cfg: CategoryConfig, max_dim: usize, rng: &mut Rng) -> ShortExactSeq {
    let c = module(cfg, max_dim, rng);
    let a = module(cfg, max_dim, rng);
    let basis = ext(&c, &a).unwrap();
    basis.realize(&rng.vector(cfg.p(), basis.dim())).unwrap()
}

fn random_map(src: &LambdaModule, tgt: &LambdaModule, rng: &mut Rng) -> ModuleMorphism {
    rng.hom_element(&hom_space(src, tgt).unwrap())
}

fn valid_subfunctors_n3() -> &'static [SubfunctorData] {
    static ALL: std::sync::OnceLock<Vec<SubfunctorData>> = std::sync::OnceLock::new();
    ALL.get_or_init(|| {
        let sk = build_skeleton(CategoryConfig::new(2, 3).unwrap(), 3).unwrap();
        enumerate_subfunctors(&sk).unwrap().valid
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn rank_nullity(p in small_prime(), rows in 0usize..6, cols in 0usize..6, seed: u64) {
        let m = Rng::new(seed).matrix(Prime::new(p).unwrap(), rows, cols);
        let ker = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + ker.dim(), cols);
        prop_assert!((&m * ker.basis()).is_zero());
    }

    #[test]
    fn ext_dimension_formula(p in small_prime(), n in 1usize..6, i in 1usize..6, j in 1usize..6) {
        prop_assume!(i <= n && j <= n);
        let cfg = CategoryConfig::new(p, n).unwrap();
        let dim = ext(&indecomposable(cfg, i).unwrap(), &indecomposable(cfg, j).unwrap()).unwrap().dim();
        prop_assert_eq!(dim, i.min(j).min(n - i).min(n - j));
    }

    #[test]
    fn hom_dimension_is_sum_of_block_minima(p in small_prime(), n in 1usize..4, seed: u64) {
        let cfg = CategoryConfig::new(p, n).unwrap();
        let mut rng = Rng::new(seed);
        let a = module(cfg, 4, &mut rng);
        let b = module(cfg, 4, &mut rng);
        let expected: usize = jordan_type(&a)
            .iter()
            .flat_map(|&x| jordan_type(&b).into_iter().map(move |y| x.min(y)))
            .sum();
        prop_assert_eq!(hom_space(&a, &b).unwrap().dim(), expected);
    }

    #[test]
    fn canonical_form_is_an_isomorphism(p in small_prime(), n in 1usize..5, dim in 1usize..6, seed: u64) {
        let cfg = CategoryConfig::new(p, n).unwrap();
        let mut rng = Rng::new(seed);
        let m = rng.module(cfg, dim);
        let (twisted, _) = rng.conjugate(&m);
        prop_assert_eq!(jordan_type(&twisted), jordan_type(&m));
        prop_assert_eq!(jordan_type(&m).iter().sum::<usize>(), dim);
        let form = canonical_iso(&twisted);
        prop_assert!(form.iso.is_iso());
    }

    #[test]
    fn kernel_cokernel_image(p in small_prime(), n in 1usize..4, seed: u64) {
        let cfg = CategoryConfig::new(p, n).unwrap();
        let mut rng = Rng::new(seed);
        let a = module(cfg, 4, &mut rng);
        let b = module(cfg, 4, &mut rng);
        let f = random_map(&a, &b, &mut rng);
        let k = kernel(&f);
        let c = cokernel(&f);
        prop_assert!(compose(&f, &k.inclusion).unwrap().is_zero() && k.inclusion.is_mono());
        prop_assert!(compose(&c.projection, &f).unwrap().is_zero() && c.projection.is_epi());
        prop_assert_eq!(k.object.dim() + c.object.dim(), a.dim() + b.dim() - 2 * f.rank());
        let im = image_factorization(&f);
        prop_assert_eq!(compose(&im.mono, &im.epi).unwrap(), f);
        prop_assert!(im.mono.is_mono() && im.epi.is_epi());
    }

    #[test]
    fn pushout_and_pullback_act_by_ext_matrices(p in prop_oneof![Just(2u32), Just(3)], n in 2usize..4, seed: u64) {
        let cfg = CategoryConfig::new(p, n).unwrap();
        let mut rng = Rng::new(seed);
        let e = random_sequence(cfg, 3, &mut rng);
        let coords = ext(e.c(), e.a()).unwrap().classify(&e).unwrap();
        let x = module(cfg, 3, &mut rng);

        let f = random_map(e.a(), &x, &mut rng);
        let (pushed, _) = pushout_ses(&e, &f).unwrap();
        let expected = ext_covariant_matrix(&f, e.c()).unwrap().mul_vec(&coords);
        prop_assert_eq!(ext(e.c(), &x).unwrap().classify(&pushed).unwrap(), expected);

        let g = random_map(&x, e.c(), &mut rng);
        let (pulled, _) = pullback_ses(&e, &g).unwrap();
        let expected = ext_contravariant_matrix(&g, e.a()).unwrap().mul_vec(&coords);
        prop_assert_eq!(ext(&x, e.a()).unwrap().classify(&pulled).unwrap(), expected);
    }

    #[test]
    fn submodule_grids_commute_and_are_exact(p in small_prime(), n in 1usize..4, dim in 1usize..6, seed: u64) {
        let cfg = CategoryConfig::new(p, n).unwrap();
        let mut rng = Rng::new(seed);
        let e = rng.module(cfg, dim);
        let d = random_submodule(&e, &mut rng);
        let b = random_submodule(&e, &mut rng);
        let grid = submodule_grid(&e, &d, &b).unwrap();
        let report = verify_grid(&grid);
        prop_assert!(report.all_pass(), "{:?}", report);
        prop_assert!(verify_grid(&grid.transpose()).all_pass());
        prop_assert_eq!(Grid3x3::from_json(&grid.to_json()).unwrap(), grid);
    }

    #[test]
    fn snake_sequence_is_exact(p in prop_oneof![Just(2u32), Just(3)], n in 2usize..4, seed: u64) {
        let cfg = CategoryConfig::new(p, n).unwrap();
        let mut rng = Rng::new(seed);
        let e = random_sequence(cfg, 3, &mut rng);
        let x = module(cfg, 3, &mut rng);
        let f = random_map(e.a(), &x, &mut rng);
        let (pushed, mor) = pushout_ses(&e, &f).unwrap();
        let snake = snake_connecting(&e, &pushed, &mor).unwrap();
        prop_assert!(snake.all_exact(), "{:?}", snake.exact);
        prop_assert!(snake.choice_independent);
    }

    #[test]
    fn ext_actions_commute(p in prop_oneof![Just(2u32), Just(3)], n in 2usize..4, seed: u64) {
        let cfg = CategoryConfig::new(p, n).unwrap();
        let mut rng = Rng::new(seed);
        let (c, a) = (module(cfg, 3, &mut rng), module(cfg, 3, &mut rng));
        let (c2, a2) = (module(cfg, 3, &mut rng), module(cfg, 3, &mut rng));
        let f = random_map(&a, &a2, &mut rng);
        let g = random_map(&c2, &c, &mut rng);
        let push_then_pull = &ext_contravariant_matrix(&g, &a2).unwrap() * &ext_covariant_matrix(&f, &c).unwrap();
        let pull_then_push = &ext_covariant_matrix(&f, &c2).unwrap() * &ext_contravariant_matrix(&g, &a).unwrap();
        prop_assert_eq!(push_then_pull, pull_then_push);
    }

    #[test]
    fn componentwise_f_exactness_matches_oracle(index in 0usize..7, seed: u64) {
        let all = valid_subfunctors_n3();
        prop_assert_eq!(all.len(), 7);
        let f = &all[index];
        let mut rng = Rng::new(seed);
        let cfg = f.cfg();
        let dim_c = 1 + rng.index(3);
        let dim_a = 1 + rng.index(4 - dim_c);
        let block_c = rng.module(cfg, dim_c);
        let (c, _) = rng.conjugate(&block_c);
        let a = rng.module(cfg, dim_a);
        let basis = ext(&c, &a).unwrap();
        let e = basis.realize(&rng.vector(cfg.p(), basis.dim())).unwrap();
        prop_assert_eq!(is_f_exact(f, &e).unwrap(), is_f_exact_oracle(f, &e).unwrap());
    }
}
