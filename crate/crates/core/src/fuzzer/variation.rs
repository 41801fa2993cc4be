//! Crossover and mutation. Both are gated by a uniform draw per parent that
//! must exceed the configured threshold.

use super::individual::Individual;
use crate::error::Result;
use crate::faults::find_model;
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// Mutation step as a fraction of the parameter interval.
pub const MUTATION_SCALE: f64 = 0.1;

/// Crossover runs when either parent's draw exceeds `threshold_c`.
/// Offspring keep the parents' ids; the caller assigns fresh ones.
pub fn crossover<R: Rng>(a: &Individual, b: &Individual, threshold_c: f64, rng: &mut R) -> Result<(Individual, Individual)> {
    a.same_target(b)?;
    let (ra, rb): (f64, f64) = (rng.gen(), rng.gen());
    if ra > threshold_c || rb > threshold_c {
        Ok(uniform_crossover(a, b, rng))
    } else {
        Ok((a.clone(), b.clone()))
    }
}

/// Single fault: each gene (noise seed included) swaps with probability
/// 1/2. Co-fault: one chromosome, chosen uniformly, swaps whole.
pub fn uniform_crossover<R: Rng>(a: &Individual, b: &Individual, rng: &mut R) -> (Individual, Individual) {
    let (mut x, mut y) = (a.clone(), b.clone());
    if a.chromosomes.len() == 1 {
        let (cx, cy) = (&mut x.chromosomes[0], &mut y.chromosomes[0]);
        for g in 0..cx.values.len() {
            if rng.gen_bool(0.5) {
                std::mem::swap(&mut cx.values[g], &mut cy.values[g]);
            }
        }
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut cx.noise_seed, &mut cy.noise_seed);
        }
    } else {
        let c = rng.gen_range(0..a.chromosomes.len());
        std::mem::swap(&mut x.chromosomes[c], &mut y.chromosomes[c]);
    }
    (x, y)
}

/// One gene of one chromosome changes when the draw exceeds `threshold_m`.
pub fn mutate<R: Rng>(ind: &Individual, threshold_m: f64, rng: &mut R) -> Result<Individual> {
    let r: f64 = rng.gen();
    if r > threshold_m {
        mutate_one(ind, rng)
    } else {
        Ok(ind.clone())
    }
}

/// Gaussian step of σ = 0.1·(hi − lo), clamped; the noise-seed gene has no
/// metric and is resampled instead.
pub fn mutate_one<R: Rng>(ind: &Individual, rng: &mut R) -> Result<Individual> {
    let mut out = ind.clone();
    let c = rng.gen_range(0..out.chromosomes.len());
    let chrom = &mut out.chromosomes[c];
    let model = find_model(&chrom.model_id)?;
    let g = rng.gen_range(0..=chrom.values.len());
    if g == chrom.values.len() {
        chrom.noise_seed = rng.gen();
    } else {
        let spec = &model.params[g];
        let step = Normal::new(0.0, MUTATION_SCALE * spec.span()).expect("finite positive sigma").sample(rng);
        chrom.values[g] = spec.clamp(chrom.values[g] + step);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzer::individual::{initialize_population, FaultTarget};
    use crate::rng;

    #[test]
    fn closed_gates_leave_parents_alone() {
        let t = FaultTarget::single("camera.blur").unwrap();
        let p = initialize_population(&t, 2, 1).unwrap();
        let mut r = rng::rng(0);
        for _ in 0..100 {
            let (x, y) = crossover(&p[0], &p[1], 1.0, &mut r).unwrap();
            assert_eq!((&x, &y), (&p[0], &p[1]));
            assert_eq!(mutate(&p[0], 1.0, &mut r).unwrap(), p[0]);
        }
    }

    #[test]
    fn cofault_crossover_swaps_whole_chromosomes() {
        let t = FaultTarget::parse("camera.deflection+lidar.deflection").unwrap();
        let p = initialize_population(&t, 2, 5).unwrap();
        let mut r = rng::rng(1);
        for _ in 0..50 {
            let (x, y) = uniform_crossover(&p[0], &p[1], &mut r);
            for c in 0..2 {
                let swapped = x.chromosomes[c] == p[1].chromosomes[c] && y.chromosomes[c] == p[0].chromosomes[c];
                let kept = x.chromosomes[c] == p[0].chromosomes[c] && y.chromosomes[c] == p[1].chromosomes[c];
                assert!(swapped || kept);
            }
        }
    }

    #[test]
    fn mismatched_parents_are_rejected() {
        let a = initialize_population(&FaultTarget::single("camera.blur").unwrap(), 1, 1).unwrap();
        let b = initialize_population(&FaultTarget::single("camera.mist").unwrap(), 1, 1).unwrap();
        assert!(crossover(&a[0], &b[0], 0.4, &mut rng::rng(0)).is_err());
    }
}
