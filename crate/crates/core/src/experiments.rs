//! End-to-end difference-set experiments: `|gA - B|` statistics over the
//! rotation group, the good-rotation proportion at a threshold `c p^{2r}`,
//! the bad set of rotations whose translates mostly miss `B`, the coset
//! sharpness constructions, and the balanced-density sweep.

use crate::fourier::difference_set_size;
use crate::ring::{circle, PointSet, RingCtx};
use crate::rotation::{rotate_set, Rotation, RotationGroup};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExperimentError {
    #[error("coset count {0} outside the valid range [1, p^2]")]
    RangeError(u64),
    #[error("gamma * p^2 must be a positive integer at most p^2")]
    BadGamma,
    #[error("Y must be a nonempty subset of the mod-p unit circle")]
    EmptySet,
    #[error("Y contains a point off the mod-p unit circle")]
    NotOnCircle,
}

/// Exact `|gA - B|` via the integer difference table of `gA` and `B`.
pub fn g_difference_size(g: Rotation, a: &PointSet, b: &PointSet) -> usize {
    difference_set_size(&rotate_set(g, a), b)
}

/// How the rotations are swept: the whole group or a seeded sample of `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GSampling {
    Exhaustive,
    Sample(usize),
}

/// Per-instance result of a `|gA - B|` sweep.
#[derive(Debug, Clone)]
pub struct TrialReport {
    /// `|gA - B|` per swept rotation, in group enumeration order.
    pub sizes: Vec<usize>,
    pub swept: usize,
    /// Rotations with `|gA - B| >= c p^{2r}` (exact rational comparison).
    pub good_count: usize,
    pub fraction_good: f64,
    /// `delta_A^{1/2} delta_B >= 2/p`, checked in rationals as
    /// `delta_A delta_B^2 >= 4/p^2`.
    pub cond_sqrt: bool,
    /// `delta_A delta_B >= 2/p`.
    pub cond_prod: bool,
    /// Rotations for which at least half of all translates of `gA` miss `B`.
    pub bad_set_size: usize,
}

fn density_conditions(a: &PointSet, b: &PointSet) -> (bool, bool) {
    let p = a.ctx().p() as u128;
    let da = a.density();
    let db = b.density();
    let cond_sqrt = da * db * db >= Ratio::new(4, p * p);
    let cond_prod = da * db >= Ratio::new(2, p);
    (cond_sqrt, cond_prod)
}

/// Sweeps `|gA - B|` over the group (or a sample) and reports the proportion
/// of rotations clearing the threshold `c p^{2r}`. The default threshold
/// `c = 1/2` is the constant the good/bad dichotomy actually yields.
pub fn proportion_good(
    group: &RotationGroup,
    a: &PointSet,
    b: &PointSet,
    c: Ratio<u64>,
    mode: GSampling,
    rng: &mut ChaCha8Rng,
) -> TrialReport {
    let ctx = group.ctx();
    let rotations: Vec<Rotation> = match mode {
        GSampling::Exhaustive => group.elements().to_vec(),
        GSampling::Sample(k) => {
            let mut picked: Vec<Rotation> = group
                .elements()
                .choose_multiple(rng, k.min(group.order()))
                .copied()
                .collect();
            picked.sort_unstable();
            picked
        }
    };
    let plane = ctx.plane_size() as u64;
    let sizes: Vec<usize> = rotations
        .iter()
        .map(|&g| g_difference_size(g, a, b))
        .collect();
    // |gA - B| >= c p^2r  <=>  |gA - B| * den >= num * p^2r
    let good_count = sizes
        .iter()
        .filter(|&&s| s as u128 * *c.denom() as u128 >= *c.numer() as u128 * plane as u128)
        .count();
    let (cond_sqrt, cond_prod) = density_conditions(a, b);
    TrialReport {
        swept: sizes.len(),
        good_count,
        fraction_good: good_count as f64 / sizes.len() as f64,
        cond_sqrt,
        cond_prod,
        bad_set_size: bad_set_measure(group, a, b),
        sizes,
    }
}

/// Exact size of the bad set: rotations `g` for which the number of `z` with
/// `B` disjoint from `gA + z` (that is `p^{2r} - |B - gA|`) is at least
/// `p^{2r}/2`.
pub fn bad_set_measure(group: &RotationGroup, a: &PointSet, b: &PointSet) -> usize {
    let plane = group.ctx().plane_size();
    group
        .iter()
        .filter(|&g| {
            let nonempty = difference_set_size(b, &rotate_set(g, a));
            2 * (plane - nonempty) >= plane
        })
        .count()
}

/// The lattice coset construction: `X = {x = 0 (mod p)}`, `A` a union of `m`
/// distinct cosets of `X` and `B` of `n`, with representatives drawn
/// deterministically from the seed. `|A| = m p^{2r-2}`, `|B| = n p^{2r-2}`.
pub fn example13_sets(
    ctx: RingCtx,
    m: u64,
    n: u64,
    seed: u64,
) -> Result<(PointSet, PointSet), ExperimentError> {
    let p = ctx.p();
    for count in [m, n] {
        if count == 0 || count > p * p {
            return Err(ExperimentError::RangeError(count));
        }
    }
    let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut reps: Vec<(u64, u64)> = (0..p).flat_map(|c1| (0..p).map(move |c2| (c1, c2))).collect();
    reps.shuffle(&mut rng);
    let a_reps: Vec<(u64, u64)> = reps.iter().take(m as usize).copied().collect();
    reps.shuffle(&mut rng);
    let b_reps: Vec<(u64, u64)> = reps.iter().take(n as usize).copied().collect();
    let build = |chosen: &[(u64, u64)]| {
        PointSet::from_points(
            ctx,
            ctx.points()
                .filter(|x| chosen.contains(&(x.x1 % p, x.x2 % p))),
        )
    };
    Ok((build(&a_reps), build(&b_reps)))
}

/// The balanced circle construction `A = B = X + Y` for `Y` a subset of the
/// mod-p unit circle, lifted to `(Z/p^r Z)^2` coordinatewise.
pub fn circle_coset_sets(ctx: RingCtx, y: &PointSet) -> Result<PointSet, ExperimentError> {
    if y.is_empty() {
        return Err(ExperimentError::EmptySet);
    }
    let base = RingCtx::new(ctx.p(), 1).expect("mod-p ring");
    assert_eq!(y.ctx(), base);
    let unit_circle = circle(base, 1);
    for pt in y.points() {
        if !unit_circle.contains_point(pt) {
            return Err(ExperimentError::NotOnCircle);
        }
    }
    let p = ctx.p();
    let members: Vec<(u64, u64)> = y.points().map(|pt| (pt.x1, pt.x2)).collect();
    Ok(PointSet::from_points(
        ctx,
        ctx.points()
            .filter(|x| members.contains(&(x.x1 % p, x.x2 % p))),
    ))
}

/// Result of the unbalanced sharpness probe with `m = 1` and `n = gamma p^2`.
#[derive(Debug, Clone)]
pub struct SharpnessReport {
    pub n: u64,
    /// `delta_A^{1/2} delta_B` as the exact square `delta_A delta_B^2`.
    pub delta_product_squared: Ratio<u128>,
    pub max_diff: usize,
    /// `gamma p^{2r} = n p^{2r-2}`, the cap `max_g |gA - B|` must respect.
    pub cap: u64,
}

pub fn sharpness_probe(
    ctx: RingCtx,
    group: &RotationGroup,
    gamma: Ratio<u64>,
    seed: u64,
) -> Result<SharpnessReport, ExperimentError> {
    let p2 = ctx.p() * ctx.p();
    let scaled = gamma * Ratio::from_integer(p2);
    if !scaled.is_integer() || scaled.numer() == &0 || *scaled.numer() > p2 {
        return Err(ExperimentError::BadGamma);
    }
    let n = scaled.to_integer();
    let (a, b) = example13_sets(ctx, 1, n, seed)?;
    let max_diff = group
        .iter()
        .map(|g| g_difference_size(g, &a, &b))
        .max()
        .unwrap();
    let da = a.density();
    let db = b.density();
    Ok(SharpnessReport {
        n,
        delta_product_squared: da * db * db,
        max_diff,
        cap: n * ctx.p().pow(2 * ctx.r() - 2),
    })
}

/// One row of the balanced-density sweep: target density, realized densities,
/// and the good fraction at `c = 1/2`. Exploratory output only.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub target: Ratio<u64>,
    pub seed: u64,
    pub realized_a: Ratio<u128>,
    pub realized_b: Ratio<u128>,
    pub fraction_good: f64,
}

pub fn conjecture_sweep(
    group: &RotationGroup,
    deltas: &[Ratio<u64>],
    seeds: &[u64],
) -> Vec<SweepRow> {
    let ctx = group.ctx();
    let mut rows = Vec::new();
    for &target in deltas {
        for &seed in seeds {
            let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let a = random_set(ctx, target, &mut rng);
            let b = random_set(ctx, target, &mut rng);
            let report = proportion_good(
                group,
                &a,
                &b,
                Ratio::new(1, 2),
                GSampling::Exhaustive,
                &mut rng,
            );
            rows.push(SweepRow {
                target,
                seed,
                realized_a: a.density(),
                realized_b: b.density(),
                fraction_good: report.fraction_good,
            });
        }
    }
    rows
}

/// Random set with each point included independently with probability `delta`;
/// the realized cardinality is whatever the coin flips produce.
pub fn random_set(ctx: RingCtx, delta: Ratio<u64>, rng: &mut impl Rng) -> PointSet {
    let prob = *delta.numer() as f64 / *delta.denom() as f64;
    PointSet::from_indices(ctx, (0..ctx.plane_size()).filter(|_| rng.gen_bool(prob)))
}
