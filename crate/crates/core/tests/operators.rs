//! Closure and distribution checks for the variation operators.

use mbfevo::encoding::gp::{subtree_end, tree_depth};
use mbfevo::encoding::tt::{one_point_crossover, shuffle_segment, uniform_crossover};
use mbfevo::encoding::ttw::balanced_crossover;
use mbfevo::encoding::{
    random_genome, Encoding, Genome, GpGenome, GpParams, Node, TreeCrossover, TtGenome, TtwGenome,
};
use mbfevo::TruthTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every node has exactly its arity of children and the sequence is one tree.
fn well_formed(nodes: &[Node], n: usize) -> bool {
    let mut need = 1i64;
    for node in nodes {
        if need <= 0 {
            return false;
        }
        if let Node::Var(j) = node {
            if *j as usize >= n {
                return false;
            }
        }
        need += node.arity() as i64 - 1;
    }
    need == 0 && subtree_end(nodes, 0) == nodes.len()
}

fn naive_depth(nodes: &[Node], i: usize) -> (usize, usize) {
    let mut next = i + 1;
    let mut deepest = 0;
    for _ in 0..nodes[i].arity() {
        let (d, end) = naive_depth(nodes, next);
        deepest = deepest.max(d);
        next = end;
    }
    (deepest + 1, next)
}

#[test]
fn ttw_long_operator_chains_stay_balanced() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=10 {
        let mut pool: Vec<TtwGenome> = (0..8)
            .map(|_| TtwGenome::random(n, &mut rng).unwrap())
            .collect();
        for _ in 0..2_000 {
            let i = rng.gen_range(0..pool.len());
            let j = rng.gen_range(0..pool.len());
            let mut child = pool[i].crossover(&pool[j], &mut rng).unwrap();
            assert_eq!(child.table().weight(), 1 << (n - 1));
            child.mutate(&mut rng);
            assert_eq!(child.table().weight(), 1 << (n - 1));
            pool[i] = child;
        }
    }
}

#[test]
fn ttw_rejects_unbalanced_tables() {
    assert!(TtwGenome::new(TruthTable::zeros(4).unwrap()).is_err());
    let a = TruthTable::zeros(3).unwrap();
    let b = TtwGenome::random(3, &mut ChaCha8Rng::seed_from_u64(1))
        .unwrap()
        .into_table();
    assert!(balanced_crossover(&a, &b, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
}

#[test]
fn balanced_crossover_of_identical_parents_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for n in 1..=9 {
        let a = TtwGenome::random(n, &mut rng).unwrap().into_table();
        assert_eq!(balanced_crossover(&a, &a, &mut rng).unwrap(), a);
    }
}

#[test]
fn gp_operator_chains_respect_arity_and_depth() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let params = GpParams::default();
    for n in [2, 5, 8, 12] {
        let mut pool: Vec<GpGenome> = (0..10)
            .map(|_| GpGenome::random(n, params, &mut rng).unwrap())
            .collect();
        for _ in 0..500 {
            let i = rng.gen_range(0..pool.len());
            let j = rng.gen_range(0..pool.len());
            let mut child = pool[i].crossover(&pool[j], &mut rng).unwrap();
            child.mutate(&mut rng);
            assert!(well_formed(child.nodes(), n));
            let (depth, _) = naive_depth(child.nodes(), 0);
            assert_eq!(depth, tree_depth(child.nodes()));
            assert!(depth <= params.max_depth);
            pool[i] = child;
        }
    }
}

#[test]
fn each_tree_crossover_yields_a_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let params = GpParams::default();
    for _ in 0..300 {
        let a = GpGenome::random(6, params, &mut rng).unwrap();
        let b = GpGenome::random(6, params, &mut rng).unwrap();
        for kind in TreeCrossover::ALL {
            let child = kind.apply(a.nodes(), b.nodes(), &mut rng);
            assert!(well_formed(&child, 6), "{kind:?}");
            // uniform and one-point never grow past the deeper parent
            if matches!(kind, TreeCrossover::Uniform | TreeCrossover::OnePoint) {
                assert!(tree_depth(&child) <= a.depth().max(b.depth()));
            }
        }
    }
}

#[test]
fn size_fair_donation_is_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let params = GpParams::default();
    for _ in 0..300 {
        let a = GpGenome::random(5, params, &mut rng).unwrap();
        let b = GpGenome::random(5, params, &mut rng).unwrap();
        let child = TreeCrossover::SizeFair.apply(a.nodes(), b.nodes(), &mut rng);
        // the child grows by at most s + 1 over the parent, where s <= |a|
        assert!(child.len() <= 2 * a.size() + 1);
    }
}

#[test]
fn random_init_depths_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let params = GpParams::default();
    for _ in 0..500 {
        let g = GpGenome::random(7, params, &mut rng).unwrap();
        assert!(g.depth() <= params.init_max_depth);
        assert!(g.depth() >= 1);
    }
}

#[test]
fn bit_flip_positions_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let n = 4;
    let trials = 32_000;
    let mut counts = [0usize; 16];
    for _ in 0..trials {
        let mut g = TtGenome::new(TruthTable::zeros(n).unwrap());
        g.bit_flip(&mut rng);
        counts[g.table().support().next().unwrap()] += 1;
    }
    let expected = trials as f64 / 16.0;
    let sigma = (trials as f64 * (1.0 / 16.0) * (15.0 / 16.0)).sqrt();
    for c in counts {
        assert!((c as f64 - expected).abs() < 4.0 * sigma, "{counts:?}");
    }
}

#[test]
fn uniform_crossover_takes_half_from_each_parent() {
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    let a = TruthTable::zeros(10).unwrap();
    let b = TruthTable::ones(10).unwrap();
    let mut total = 0usize;
    let trials = 200;
    for _ in 0..trials {
        total += uniform_crossover(&a, &b, &mut rng).weight();
    }
    let bits = (trials * 1024) as f64;
    let sigma = (bits * 0.25).sqrt();
    assert!((total as f64 - bits / 2.0).abs() < 4.0 * sigma);
}

#[test]
fn one_point_crossover_splits_at_point() {
    let a = TruthTable::zeros(7).unwrap();
    let b = TruthTable::ones(7).unwrap();
    for point in [0, 1, 63, 64, 65, 127, 128] {
        let c = one_point_crossover(&a, &b, point);
        assert_eq!(c.weight(), 128 - point);
        assert!((0..point).all(|i| !c.get(i)));
    }
}

#[test]
fn random_tables_have_mean_weight_half() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let n = 8;
    let trials = 5000;
    let total: usize = (0..trials)
        .map(|_| TtGenome::random(n, &mut rng).unwrap().table().weight())
        .sum();
    let mean = total as f64 / trials as f64;
    let sigma = (256.0 * 0.25 / trials as f64).sqrt();
    assert!((mean - 128.0).abs() < 4.0 * sigma, "{mean}");
}

#[test]
fn shuffle_permutes_segment_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let mut hits = [0usize; 8];
    for _ in 0..8000 {
        let mut tt = TruthTable::zeros(4).unwrap();
        tt.set(4, true);
        shuffle_segment(&mut tt, 4, 11, &mut rng);
        assert_eq!(tt.weight(), 1);
        let pos = tt.support().next().unwrap();
        assert!((4..=11).contains(&pos));
        hits[pos - 4] += 1;
    }
    for h in hits {
        assert!(
            (h as f64 - 1000.0).abs() < 4.0 * (8000.0f64 * 0.125 * 0.875).sqrt(),
            "{hits:?}"
        );
    }
}

#[test]
fn genome_dispatch_rejects_mixed_encodings() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let gp = GpParams::default();
    let a = random_genome(Encoding::Tt, 5, gp, &mut rng).unwrap();
    let b = random_genome(Encoding::Gp, 5, gp, &mut rng).unwrap();
    assert!(a.crossover(&b, &mut rng).is_err());
    let c = random_genome(Encoding::Tt, 6, gp, &mut rng).unwrap();
    assert!(a.crossover(&c, &mut rng).is_err());
    assert!(matches!(b, Genome::Gp(_)));
}
