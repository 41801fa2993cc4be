use fade::faults::{enumerate_cofaults, fault_catalog, find_model};
use fade::fuzzer::{crossover, initialize_population, mutate, mutate_one, sample_individual, FaultTarget, Individual};
use fade::rng;
use proptest::prelude::*;

fn targets() -> Vec<FaultTarget> {
    let mut t: Vec<FaultTarget> = fault_catalog().iter().map(|m| FaultTarget::single(&m.id).unwrap()).collect();
    t.extend(enumerate_cofaults(fault_catalog()).iter().map(FaultTarget::co));
    t
}

fn in_bounds(ind: &Individual) -> bool {
    ind.chromosomes.iter().all(|c| find_model(&c.model_id).unwrap().validate(c).is_ok())
}

/// Loci as (chromosome, gene) with the noise seed as the last gene.
fn genes(ind: &Individual) -> Vec<Vec<u64>> {
    ind.chromosomes
        .iter()
        .map(|c| c.values.iter().map(|v| v.to_bits()).chain([c.noise_seed]).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sampled_and_mutated_individuals_stay_in_bounds(t in 0usize..31, seed in any::<u64>(), steps in 1usize..20) {
        let target = &targets()[t];
        let mut ind = sample_individual(target, 0, seed).unwrap();
        prop_assert!(in_bounds(&ind));
        let mut r = rng::rng(seed);
        for _ in 0..steps {
            ind = mutate_one(&ind, &mut r).unwrap();
            prop_assert!(in_bounds(&ind));
        }
    }

    #[test]
    fn mutation_changes_at_most_one_gene(t in 0usize..31, seed in any::<u64>()) {
        let target = &targets()[t];
        let ind = sample_individual(target, 0, seed).unwrap();
        let out = mutate_one(&ind, &mut rng::rng(seed ^ 1)).unwrap();
        let changed: usize = genes(&ind)
            .iter()
            .zip(genes(&out))
            .map(|(a, b)| a.iter().zip(&b).filter(|(x, y)| x != y).count())
            .sum();
        prop_assert!(changed <= 1);
    }

    #[test]
    fn crossover_children_split_parent_loci(t in 0usize..31, seed in any::<u64>()) {
        let target = &targets()[t];
        let p = initialize_population(target, 2, seed).unwrap();
        let (x, y) = crossover(&p[0], &p[1], 0.0001, &mut rng::rng(seed)).unwrap();
        let (ga, gb, gx, gy) = (genes(&p[0]), genes(&p[1]), genes(&x), genes(&y));
        for c in 0..ga.len() {
            for g in 0..ga[c].len() {
                let parents = [ga[c][g], gb[c][g]];
                let mut kids = [gx[c][g], gy[c][g]];
                let mut sorted = parents;
                sorted.sort_unstable();
                kids.sort_unstable();
                prop_assert_eq!(kids, sorted);
            }
            // Co-faults move whole chromosomes.
            if ga.len() > 1 {
                prop_assert!(gx[c] == ga[c] || gx[c] == gb[c]);
            }
        }
    }
}

#[test]
fn mutation_rate_follows_threshold() {
    let target = FaultTarget::single("lidar.deflection").unwrap();
    let ind = sample_individual(&target, 0, 3).unwrap();
    let mut r = rng::rng(9);
    let n = 20_000;
    let threshold = 0.3;
    let mutated = (0..n).filter(|_| mutate(&ind, threshold, &mut r).unwrap() != ind).count();
    let p = 1.0 - threshold;
    let sd = (p * (1.0 - p) / n as f64).sqrt();
    let rate = mutated as f64 / n as f64;
    // A clamped step can land back on the same value; that only happens at
    // the bounds and is rare for an interior individual.
    assert!((rate - p).abs() < 4.0 * sd + 0.01, "rate {rate} vs {p}");
}

#[test]
fn mutation_step_scale() {
    let target = FaultTarget::single("camera.blur").unwrap();
    let m = find_model("camera.blur").unwrap();
    let mut ind = sample_individual(&target, 0, 5).unwrap();
    for (v, p) in ind.chromosomes[0].values.iter_mut().zip(&m.params) {
        *v = (p.lo + p.hi) / 2.0;
    }
    let mut r = rng::rng(1);
    let mut steps: Vec<Vec<f64>> = vec![Vec::new(); m.params.len()];
    for _ in 0..20_000 {
        let out = mutate_one(&ind, &mut r).unwrap();
        for (g, (a, b)) in ind.chromosomes[0].values.iter().zip(&out.chromosomes[0].values).enumerate() {
            if a != b {
                steps[g].push((b - a) / m.params[g].span());
            }
        }
    }
    for (g, s) in steps.iter().enumerate() {
        let n = s.len() as f64;
        assert!(n > 1000.0, "gene {g} mutated {n} times");
        let mean = s.iter().sum::<f64>() / n;
        let sd = (s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 0.01, "gene {g} mean {mean}");
        assert!((sd - 0.1).abs() < 0.01, "gene {g} sd {sd}");
    }
}
