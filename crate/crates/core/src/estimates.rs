//! Numeric verification of the restriction/extension estimates on orbits,
//! their dual forms, and the weighted corollary sums. The inequalities carry
//! unspecified absolute constants, so each check reports the empirical ratio
//! `lhs / rhs_no_constant`; callers enforce configurable ceilings and the
//! no-growth-in-p trend test.

use crate::fourier::{dft, extension, indicator_grid, l4_sum};
use crate::ring::{PointSet, ResidueClass, RingCtx, Vec2};
use crate::rotation::Orbit;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EstimateError {
    #[error("estimate is not defined for an empty set")]
    EmptySet,
}

/// Which side of the estimates an orbit falls on. Every nonzero `m` lands in
/// exactly one branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `p = 3 (mod 4)`.
    ThreeMod4,
    /// `p = 1 (mod 4)` with `||m~|| != 0 (mod p)`.
    OneMod4Unit,
    /// `p = 1 (mod 4)` with `||m~|| = 0 (mod p)`; the weak branch.
    OneMod4Singular,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::ThreeMod4 => "3mod4",
            Branch::OneMod4Unit => "1mod4-unit",
            Branch::OneMod4Singular => "1mod4-singular",
        }
    }
}

pub fn branch_of(ctx: RingCtx, orbit: &Orbit) -> Branch {
    match ctx.residue_class() {
        ResidueClass::ThreeMod4 => Branch::ThreeMod4,
        ResidueClass::OneMod4 => {
            if orbit.norm_tilde_mod_p == 0 {
                Branch::OneMod4Singular
            } else {
                Branch::OneMod4Unit
            }
        }
    }
}

/// One evaluated instance of an inequality: left side, right side without the
/// implied constant, and their ratio.
#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub p: u64,
    pub r: u32,
    pub m: Vec2,
    pub v: u32,
    pub branch: Branch,
    pub family: &'static str,
    pub lhs: f64,
    pub rhs_no_constant: f64,
    pub ratio: f64,
}

fn make_report(
    ctx: RingCtx,
    orbit: &Orbit,
    family: &'static str,
    lhs: f64,
    rhs: f64,
) -> EstimateReport {
    EstimateReport {
        p: ctx.p(),
        r: ctx.r(),
        m: orbit.base,
        v: orbit.v,
        branch: branch_of(ctx, orbit),
        family,
        lhs,
        rhs_no_constant: rhs,
        ratio: if lhs == 0.0 { 0.0 } else { lhs / rhs },
    }
}

/// Restriction estimate: `(sum_x |(f dsigma_V)^vee|^4)^{1/2}` against
/// `p^{-(r - 3v + 1)/2} sum |f|^2`, with exponent `-(r - 3v)/2` on the
/// singular `p = 1 (mod 4)` branch. Ratio is 0 for the zero function.
pub fn restriction_ratio(
    ctx: RingCtx,
    orbit: &Orbit,
    f: &[Complex64],
    family: &'static str,
) -> EstimateReport {
    let lhs = l4_sum(&extension(orbit, f)).sqrt();
    let l2: f64 = f.iter().map(|v| v.norm_sqr()).sum();
    let exponent = match branch_of(ctx, orbit) {
        Branch::ThreeMod4 | Branch::OneMod4Unit => {
            -(ctx.r() as f64 - 3.0 * orbit.v as f64 + 1.0) / 2.0
        }
        Branch::OneMod4Singular => -(ctx.r() as f64 - 3.0 * orbit.v as f64) / 2.0,
    };
    let rhs = (ctx.p() as f64).powf(exponent) * l2;
    make_report(ctx, orbit, family, lhs, rhs)
}

/// Dual estimate: `sum_{x in V_m} |E^(x)|^2` against
/// `p^{-(5r + v + 1)/2} |E|^{3/2}` (exponent `-(5r + v)/2` on the singular
/// branch).
pub fn dual_ratio(
    ctx: RingCtx,
    orbit: &Orbit,
    e: &PointSet,
) -> Result<EstimateReport, EstimateError> {
    if e.is_empty() {
        return Err(EstimateError::EmptySet);
    }
    let table = dft(&indicator_grid(e));
    let lhs: f64 = orbit.points.iter().map(|&x| table.at(x).norm_sqr()).sum();
    let exponent = match branch_of(ctx, orbit) {
        Branch::ThreeMod4 | Branch::OneMod4Unit => {
            -((5.0 * ctx.r() as f64) + orbit.v as f64 + 1.0) / 2.0
        }
        Branch::OneMod4Singular => -((5.0 * ctx.r() as f64) + orbit.v as f64) / 2.0,
    };
    let rhs = (ctx.p() as f64).powf(exponent) * (e.len() as f64).powf(1.5);
    Ok(make_report(ctx, orbit, "indicator", lhs, rhs))
}

/// The weighted orbit sum of the corollaries, evaluated in the squared form
/// `sum_{m != 0} sum_{m' in V_m} p^{v_m} |A^(m)|^2 |B^(m')|^2` for both
/// residue classes. The displayed first-power variant of the `p = 1 (mod 4)`
/// corollary is evaluated alongside for comparison.
#[derive(Debug, Clone)]
pub struct CorollaryReport {
    pub squared: EstimateReport,
    /// Same weighted sum with `|A^| |B^|` to the first power.
    pub first_power_lhs: f64,
    pub first_power_ratio: f64,
}

pub fn corollary_weighted_sum(
    ctx: RingCtx,
    orbits: &[Orbit],
    a: &PointSet,
    b: &PointSet,
) -> Result<CorollaryReport, EstimateError> {
    if a.is_empty() || b.is_empty() {
        return Err(EstimateError::EmptySet);
    }
    let a_hat = dft(&indicator_grid(a));
    let b_hat = dft(&indicator_grid(b));
    let mut lhs_sq = 0.0;
    let mut lhs_first = 0.0;
    for orbit in orbits {
        let weight = (ctx.p() as f64).powi(orbit.v as i32);
        let (mut sa2, mut sb2, mut sa1, mut sb1) = (0.0, 0.0, 0.0, 0.0);
        for &m in &orbit.points {
            sa2 += a_hat.at(m).norm_sqr();
            sb2 += b_hat.at(m).norm_sqr();
            sa1 += a_hat.at(m).norm();
            sb1 += b_hat.at(m).norm();
        }
        lhs_sq += weight * sa2 * sb2;
        lhs_first += weight * sa1 * sb1;
    }
    let exponent = match ctx.residue_class() {
        ResidueClass::ThreeMod4 => -(4.0 * ctx.r() as f64) - 1.0,
        ResidueClass::OneMod4 => -(4.0 * ctx.r() as f64) - 0.5,
    };
    let rhs = (ctx.p() as f64).powf(exponent) * a.len() as f64 * (b.len() as f64).powf(1.5);
    let dummy = &orbits[0];
    let mut squared = make_report(ctx, dummy, "indicator", lhs_sq, rhs);
    squared.m = Vec2::ZERO;
    squared.v = 0;
    Ok(CorollaryReport {
        squared,
        first_power_lhs: lhs_first,
        first_power_ratio: if lhs_first == 0.0 { 0.0 } else { lhs_first / rhs },
    })
}

/// Least-squares slope of `y` against `x`; the trend test feeds it
/// `(ln p, ln max_ratio)` pairs.
pub fn log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    num / den
}

/// Test function families probed by the sweeps: indicators drive the
/// corollaries, random signs probe cancellation, singletons give closed-form
/// anchors.
pub mod families {
    use num_complex::Complex64;
    use rand::Rng;

    pub fn all_ones(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0); n]
    }

    pub fn singleton(n: usize) -> Vec<Complex64> {
        let mut f = vec![Complex64::new(0.0, 0.0); n];
        f[0] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn random_indicator(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { 0.0 }, 0.0))
            .collect()
    }

    pub fn random_signs(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::energy_quadruples;
    use crate::rotation::{hensel_enumerate, orbit, orbit_partition};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn branch_selection_is_total() {
        for (p, r) in [(3, 2), (5, 2), (7, 1), (13, 1)] {
            let ctx = RingCtx::new(p, r).unwrap();
            let group = hensel_enumerate(ctx).unwrap();
            for idx in 1..ctx.plane_size() {
                let orb = orbit(&group, ctx.point_at(idx)).unwrap();
                let branch = branch_of(ctx, &orb);
                match ctx.residue_class() {
                    ResidueClass::ThreeMod4 => assert_eq!(branch, Branch::ThreeMod4),
                    ResidueClass::OneMod4 => assert_ne!(branch, Branch::ThreeMod4),
                }
            }
        }
    }

    #[test]
    fn singleton_closed_form() {
        // f = delta: lhs = (p^2r / |V|^4)^{1/2}, sum |f|^2 = 1
        let ctx = RingCtx::new(3, 1).unwrap();
        let group = hensel_enumerate(ctx).unwrap();
        let orb = orbit(&group, Vec2::new(1, 0)).unwrap();
        let report = restriction_ratio(ctx, &orb, &families::singleton(orb.len()), "singleton");
        let expected_lhs = (ctx.plane_size() as f64 / (orb.len() as f64).powi(4)).sqrt();
        assert!((report.lhs - expected_lhs).abs() < 1e-12);
        let expected_rhs = (3.0f64).powf(-1.0); // exponent -(r+1)/2 = -1 at r=1, v=0
        assert!((report.rhs_no_constant - expected_rhs).abs() < 1e-12);
    }

    #[test]
    fn all_ones_matches_energy_count() {
        let ctx = RingCtx::new(3, 1).unwrap();
        let group = hensel_enumerate(ctx).unwrap();
        let orb = orbit(&group, Vec2::new(1, 0)).unwrap();
        let f = families::all_ones(orb.len());
        let report = restriction_ratio(ctx, &orb, &f, "all-ones");
        let energy = energy_quadruples(&orb, &f);
        let expected_lhs =
            (ctx.plane_size() as f64 / (orb.len() as f64).powi(4) * energy).sqrt();
        assert!((report.lhs - expected_lhs).abs() < 1e-9);
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let ctx = RingCtx::new(5, 1).unwrap();
        let group = hensel_enumerate(ctx).unwrap();
        let orb = orbit(&group, Vec2::new(1, 0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = families::random_signs(orb.len(), &mut rng);
        let doubled: Vec<_> = f.iter().map(|v| v * 2.0).collect();
        let r1 = restriction_ratio(ctx, &orb, &f, "signs");
        let r2 = restriction_ratio(ctx, &orb, &doubled, "signs");
        assert!((r1.ratio - r2.ratio).abs() < 1e-9);
    }

    #[test]
    fn zero_function_has_zero_ratio() {
        let ctx = RingCtx::new(3, 1).unwrap();
        let group = hensel_enumerate(ctx).unwrap();
        let orb = orbit(&group, Vec2::new(1, 0)).unwrap();
        let zeros = vec![Complex64::new(0.0, 0.0); orb.len()];
        let report = restriction_ratio(ctx, &orb, &zeros, "zero");
        assert_eq!(report.ratio, 0.0);
    }

    #[test]
    fn dual_ratio_closed_forms() {
        let ctx = RingCtx::new(3, 1).unwrap();
        let group = hensel_enumerate(ctx).unwrap();
        let orb = orbit(&group, Vec2::new(1, 0)).unwrap();

        // full plane: spectrum lives at 0, which is outside every orbit
        let full = PointSet::full(ctx);
        let report = dual_ratio(ctx, &orb, &full).unwrap();
        assert!(report.lhs < 1e-18);
        assert!(report.ratio < 1e-18);

        // single point: |E^| = p^{-2r} everywhere, lhs = |V| p^{-4r}
        let single = PointSet::from_indices(ctx, [3]);
        let report = dual_ratio(ctx, &orb, &single).unwrap();
        let expected = orb.len() as f64 / (ctx.plane_size() as f64).powi(2);
        assert!((report.lhs - expected).abs() < 1e-12);

        let empty = PointSet::empty(ctx);
        assert_eq!(
            dual_ratio(ctx, &orb, &empty).unwrap_err(),
            EstimateError::EmptySet
        );
    }

    #[test]
    fn corollary_closed_forms() {
        let ctx = RingCtx::new(3, 1).unwrap();
        let group = hensel_enumerate(ctx).unwrap();
        let orbits = orbit_partition(&group);

        // full plane: all nonzero frequencies vanish
        let full = PointSet::full(ctx);
        let report = corollary_weighted_sum(ctx, &orbits, &full, &full).unwrap();
        assert!(report.squared.lhs < 1e-18);

        // single point: |A^| = |B^| = p^{-2r} everywhere, so the squared sum
        // is p^{-8r} sum_O p^v |O|^2
        let single = PointSet::from_indices(ctx, [0]);
        let report = corollary_weighted_sum(ctx, &orbits, &single, &single).unwrap();
        let expected: f64 = orbits
            .iter()
            .map(|o| {
                (ctx.p() as f64).powi(o.v as i32) * (o.len() as f64).powi(2)
                    / (ctx.plane_size() as f64).powi(4)
            })
            .sum();
        assert!((report.squared.lhs - expected).abs() < 1e-15);
    }

    #[test]
    fn slope_of_flat_data_is_zero() {
        let pts = [(1.0, 2.0), (2.0, 2.0), (3.0, 2.0)];
        assert!(log_slope(&pts).abs() < 1e-12);
        let rising = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)];
        assert!((log_slope(&rising) - 1.0).abs() < 1e-12);
    }
}
