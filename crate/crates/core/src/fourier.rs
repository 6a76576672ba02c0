//! Normalized discrete Fourier analysis on `(Z/p^r Z)^2`: the transform with
//! forward factor `p^{-2r}`, inversion, Plancherel, the extension operator
//! `(f dsigma_{V_m})^vee`, L^4 sums, exact energy-quadruple counting, and the
//! exact difference-count table behind every `|gA - B|` evaluation.
//!
//! Countable quantities (energies, difference tables) are kept in exact
//! integers; transform-based quantities live in double-precision complex with
//! the tolerances stated at each check site.

use crate::ring::{PointSet, RingCtx, Vec2};
use crate::rotation::{Orbit, Rotation};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// A complex-valued function on the plane, dense in point-index order.
#[derive(Debug, Clone)]
pub struct ComplexGrid {
    ctx: RingCtx,
    values: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn new(ctx: RingCtx, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), ctx.plane_size());
        ComplexGrid { ctx, values }
    }

    pub fn zero(ctx: RingCtx) -> Self {
        ComplexGrid {
            ctx,
            values: vec![Complex64::new(0.0, 0.0); ctx.plane_size()],
        }
    }

    pub fn ctx(&self) -> RingCtx {
        self.ctx
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, x: Vec2) -> Complex64 {
        self.values[self.ctx.index_of(x)]
    }
}

/// A Fourier transform table over frequencies `m`, normalized with the
/// `p^{-2r}` forward factor, so the zero frequency of an indicator is the
/// density `delta_A`.
#[derive(Debug, Clone)]
pub struct SpectralTable {
    ctx: RingCtx,
    values: Vec<Complex64>,
}

impl SpectralTable {
    pub fn ctx(&self) -> RingCtx {
        self.ctx
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, m: Vec2) -> Complex64 {
        self.values[self.ctx.index_of(m)]
    }
}

/// The additive character `chi_r(t) = exp(2 pi i t / p^r)`.
pub fn character(ctx: RingCtx, t: u64) -> Complex64 {
    let t = t % ctx.modulus();
    Complex64::from_polar(1.0, TAU * t as f64 / ctx.modulus() as f64)
}

fn character_table(ctx: RingCtx) -> Vec<Complex64> {
    (0..ctx.modulus()).map(|t| character(ctx, t)).collect()
}

/// Forward transform `f^(m) = p^{-2r} sum_x chi_r(-m.x) f(x)`, computed by
/// row-column separation: two passes of length-`p^r` line transforms.
pub fn dft(f: &ComplexGrid) -> SpectralTable {
    SpectralTable {
        ctx: f.ctx,
        values: separated_transform(f.ctx, &f.values, true),
    }
}

/// Inverse transform `f(x) = sum_m F(m) chi_r(m.x)`.
pub fn idft(table: &SpectralTable) -> ComplexGrid {
    ComplexGrid {
        ctx: table.ctx,
        values: separated_transform(table.ctx, &table.values, false),
    }
}

fn separated_transform(ctx: RingCtx, values: &[Complex64], forward: bool) -> Vec<Complex64> {
    let n = ctx.modulus() as usize;
    let chi = character_table(ctx);
    let kernel = |a: usize, b: usize| {
        let t = (a * b) % n;
        if forward {
            chi[t].conj()
        } else {
            chi[t]
        }
    };
    // pass 1: transform the second coordinate of every row
    let mut half = vec![Complex64::new(0.0, 0.0); n * n];
    for x1 in 0..n {
        for m2 in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for x2 in 0..n {
                acc += kernel(m2, x2) * values[x1 * n + x2];
            }
            half[x1 * n + m2] = acc;
        }
    }
    // pass 2: transform the first coordinate of every column
    let norm = if forward {
        1.0 / ctx.plane_size() as f64
    } else {
        1.0
    };
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for m2 in 0..n {
        for m1 in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for x1 in 0..n {
                acc += kernel(m1, x1) * half[x1 * n + m2];
            }
            out[m1 * n + m2] = acc * norm;
        }
    }
    out
}

pub fn indicator_grid(set: &PointSet) -> ComplexGrid {
    let ctx = set.ctx();
    let mut values = vec![Complex64::new(0.0, 0.0); ctx.plane_size()];
    for idx in set.indices() {
        values[idx] = Complex64::new(1.0, 0.0);
    }
    ComplexGrid { ctx, values }
}

/// Relative Plancherel defect `|sum_m |f^|^2 - p^{-2r} sum_x |f|^2| / rhs`;
/// zero by convention for the zero function.
pub fn plancherel_gap(f: &ComplexGrid) -> f64 {
    let spectral: f64 = dft(f).values.iter().map(|v| v.norm_sqr()).sum();
    let spatial: f64 =
        f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / f.ctx.plane_size() as f64;
    if spatial == 0.0 {
        return 0.0;
    }
    (spectral - spatial).abs() / spatial
}

/// The extension operator `(f dsigma_V)^vee(y) = (1/|V|) sum_{x in V} f(x)
/// chi_r(y.x)`, for `f` given in orbit point order.
pub fn extension(orbit: &Orbit, f: &[Complex64]) -> ComplexGrid {
    assert_eq!(f.len(), orbit.len());
    let ctx = orbit.set.ctx();
    let chi = character_table(ctx);
    let n = ctx.modulus();
    let scale = 1.0 / orbit.len() as f64;
    let mut values = vec![Complex64::new(0.0, 0.0); ctx.plane_size()];
    for (idx, value) in values.iter_mut().enumerate() {
        let y = ctx.point_at(idx);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, fx) in orbit.points.iter().zip(f) {
            let t = (y.x1 as u128 * x.x1 as u128 + y.x2 as u128 * x.x2 as u128) % n as u128;
            acc += chi[t as usize] * fx;
        }
        *value = acc * scale;
    }
    ComplexGrid { ctx, values }
}

pub fn l4_sum(grid: &ComplexGrid) -> f64 {
    grid.values.iter().map(|v| v.norm_sqr().powi(2)).sum()
}

/// Number of energy quadruples `xi - eta = xi' - eta'` weighted by
/// `f(xi) f(xi') conj(f(eta) f(eta'))`, computed as `sum_z |sum_{xi - eta = z}
/// f(xi) conj(f(eta))|^2`. Exact for small-integer-valued `f`.
pub fn energy_quadruples(orbit: &Orbit, f: &[Complex64]) -> f64 {
    assert_eq!(f.len(), orbit.len());
    let ctx = orbit.set.ctx();
    let mut table = vec![Complex64::new(0.0, 0.0); ctx.plane_size()];
    for (x, fx) in orbit.points.iter().zip(f) {
        for (y, fy) in orbit.points.iter().zip(f) {
            table[ctx.index_of(ctx.vec_sub(*x, *y))] += fx * fy.conj();
        }
    }
    table.iter().map(|v| v.norm_sqr()).sum()
}

/// Exact integer table `d -> #{(a, b) in A x B : a - b = d}`, dense over all
/// point indices. The engine behind `|gA - B|` and the incidence fast path.
pub fn difference_count_table(a: &PointSet, b: &PointSet) -> Vec<u64> {
    assert_eq!(a.ctx(), b.ctx());
    let ctx = a.ctx();
    let b_points: Vec<Vec2> = b.points().collect();
    let mut table = vec![0u64; ctx.plane_size()];
    for x in a.points() {
        for y in &b_points {
            table[ctx.index_of(ctx.vec_sub(x, *y))] += 1;
        }
    }
    table
}

/// Number of distinct values in `A - B`.
pub fn difference_set_size(a: &PointSet, b: &PointSet) -> usize {
    difference_count_table(a, b)
        .iter()
        .filter(|&&c| c > 0)
        .count()
}

/// Max over `m` of `|F(gA)(m) - F(A)(g^{-1} m)|`: the transform of a rotated
/// set is the transform at the rotated frequency.
pub fn rotated_spectrum_check(a: &PointSet, g: Rotation) -> f64 {
    let ctx = a.ctx();
    let rotated = crate::rotation::rotate_set(g, a);
    let lhs = dft(&indicator_grid(&rotated));
    let rhs = dft(&indicator_grid(a));
    let g_inv = g.inverse(ctx);
    ctx.points()
        .map(|m| (lhs.at(m) - rhs.at(g_inv.apply(ctx, m))).norm())
        .fold(0.0, f64::max)
}
