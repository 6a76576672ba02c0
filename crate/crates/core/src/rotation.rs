//! The rotation group `G_r = SO_2(Z/p^r Z)`: enumeration by brute scan and by
//! level-by-level Hensel lifting, the group action on the plane, orbits `V_m`
//! with stabilizer data, and the closed-form size formulas.

use crate::ring::{norm_tilde_mod_p, PointSet, ResidueClass, RingCtx, Vec2};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RotationError {
    #[error("orbit of the zero vector is not defined")]
    ZeroVector,
    #[error("level-1 solution with vanishing gradient (internal error)")]
    DegenerateGradient,
}

/// An element of `SO_2(Z/p^r Z)`, the matrix `[a -b; b a]` with
/// `a^2 + b^2 = 1 (mod p^r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rotation {
    pub a: u64,
    pub b: u64,
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation { a: 1, b: 0 };

    pub fn new(a: u64, b: u64) -> Self {
        Rotation { a, b }
    }

    pub fn is_valid(&self, ctx: RingCtx) -> bool {
        ctx.add(ctx.mul(self.a, self.a), ctx.mul(self.b, self.b)) == 1
    }

    /// Matrix-vector product `(a x1 - b x2, b x1 + a x2) mod p^r`.
    pub fn apply(&self, ctx: RingCtx, x: Vec2) -> Vec2 {
        Vec2::new(
            ctx.sub(ctx.mul(self.a, x.x1), ctx.mul(self.b, x.x2)),
            ctx.add(ctx.mul(self.b, x.x1), ctx.mul(self.a, x.x2)),
        )
    }

    pub fn compose(&self, ctx: RingCtx, other: Rotation) -> Rotation {
        Rotation::new(
            ctx.sub(ctx.mul(self.a, other.a), ctx.mul(self.b, other.b)),
            ctx.add(ctx.mul(self.b, other.a), ctx.mul(self.a, other.b)),
        )
    }

    pub fn inverse(&self, ctx: RingCtx) -> Rotation {
        Rotation::new(self.a, ctx.neg(self.b))
    }
}

/// The fully enumerated group, sorted by `(a, b)` for deterministic reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationGroup {
    ctx: RingCtx,
    elements: Vec<Rotation>,
}

impl RotationGroup {
    pub fn ctx(&self) -> RingCtx {
        self.ctx
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Rotation] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = Rotation> + '_ {
        self.elements.iter().copied()
    }

    pub fn contains(&self, g: Rotation) -> bool {
        self.elements.binary_search(&g).is_ok()
    }
}

/// Closed-form `|G_r| = p^r (1 - 1/p)` for `p = 1 (mod 4)` and
/// `p^r (1 + 1/p)` for `p = 3 (mod 4)`.
pub fn group_order_formula(ctx: RingCtx) -> u64 {
    let unit = match ctx.residue_class() {
        ResidueClass::OneMod4 => ctx.p() - 1,
        ResidueClass::ThreeMod4 => ctx.p() + 1,
    };
    ctx.p().pow(ctx.r() - 1) * unit
}

/// Oracle enumeration: scan all `(a, b)` pairs and keep `a^2 + b^2 = 1`.
pub fn brute_enumerate(ctx: RingCtx) -> RotationGroup {
    let n = ctx.modulus();
    let mut elements = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let g = Rotation::new(a, b);
            if g.is_valid(ctx) {
                elements.push(g);
            }
        }
    }
    RotationGroup { ctx, elements }
}

/// Enumeration by Hensel lifting: scan `G_1` over `p^2` pairs, then lift each
/// solution mod `p^l` to exactly `p` solutions mod `p^{l+1}` lying on the line
/// `2a s + 2b t = -(a^2 + b^2 - 1)/p^l (mod p)`.
pub fn hensel_enumerate(ctx: RingCtx) -> Result<RotationGroup, RotationError> {
    let p = ctx.p();
    let base = RingCtx::new(p, 1).expect("level-1 ring");
    let mut level: Vec<Rotation> = brute_enumerate(base).elements;
    for l in 1..ctx.r() {
        let pl = p.pow(l);
        let next_mod = pl * p;
        let mut next = Vec::with_capacity(level.len() * p as usize);
        for g in &level {
            let defect = (g.a as i128 * g.a as i128 + g.b as i128 * g.b as i128 - 1)
                .rem_euclid(next_mod as i128) as u64
                / pl;
            let grad_a = 2 * g.a % p;
            let grad_b = 2 * g.b % p;
            let c = (p - defect % p) % p;
            if grad_a != 0 {
                let inv = base.inverse(grad_a).expect("unit gradient");
                for t in 0..p {
                    let s = base.mul(inv, base.sub(c, base.mul(grad_b, t)));
                    next.push(Rotation::new(g.a + pl * s, g.b + pl * t));
                }
            } else if grad_b != 0 {
                let inv = base.inverse(grad_b).expect("unit gradient");
                let t = base.mul(inv, c);
                for s in 0..p {
                    next.push(Rotation::new(g.a + pl * s, g.b + pl * t));
                }
            } else {
                // cannot occur for odd p since a^2 + b^2 = 1 forces a unit
                return Err(RotationError::DegenerateGradient);
            }
        }
        level = next;
    }
    level.sort_unstable();
    Ok(RotationGroup {
        ctx,
        elements: level,
    })
}

/// The orbit `V_m = {g m : g in G_r}` of a nonzero point, with its valuation,
/// stabilizer order (direct scan), and the branch data `||m~|| mod p`.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub base: Vec2,
    pub v: u32,
    /// Orbit points in ascending index order.
    pub points: Vec<Vec2>,
    pub set: PointSet,
    pub stabilizer_order: u64,
    pub norm_tilde_mod_p: u64,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn orbit(group: &RotationGroup, m: Vec2) -> Result<Orbit, RotationError> {
    if m.is_zero() {
        return Err(RotationError::ZeroVector);
    }
    let ctx = group.ctx();
    let mut set = PointSet::empty(ctx);
    let mut stabilizer_order = 0;
    for g in group.iter() {
        let gm = g.apply(ctx, m);
        set.insert(ctx.index_of(gm));
        if gm == m {
            stabilizer_order += 1;
        }
    }
    let points: Vec<Vec2> = set.points().collect();
    Ok(Orbit {
        base: m,
        v: ctx.vec_valuation(m),
        points,
        set,
        stabilizer_order,
        norm_tilde_mod_p: norm_tilde_mod_p(ctx, m).expect("nonzero"),
    })
}

/// Closed-form `|orb_r(x)| = p^{r-v} (1 +/- 1/p)` for `0 <= v <= r-1`.
pub fn orbit_size_formula(ctx: RingCtx, v: u32) -> u64 {
    assert!(v < ctx.r());
    let unit = match ctx.residue_class() {
        ResidueClass::OneMod4 => ctx.p() - 1,
        ResidueClass::ThreeMod4 => ctx.p() + 1,
    };
    ctx.p().pow(ctx.r() - v - 1) * unit
}

/// Closed-form `|stab_r(x)| = p^{v}`.
pub fn stabilizer_size_formula(ctx: RingCtx, v: u32) -> u64 {
    assert!(v < ctx.r());
    ctx.p().pow(v)
}

/// Exact autocorrelation table of an orbit: `z -> #{(x, y) in V^2 : x - y = z}`,
/// dense over all point indices.
pub fn orbit_autocorrelation(ctx: RingCtx, orbit: &Orbit) -> Vec<u64> {
    let mut table = vec![0u64; ctx.plane_size()];
    for &x in &orbit.points {
        for &y in &orbit.points {
            table[ctx.index_of(ctx.vec_sub(x, y))] += 1;
        }
    }
    table
}

/// Image of a set under a rotation; rotations are bijections so cardinality is
/// preserved.
pub fn rotate_set(g: Rotation, set: &PointSet) -> PointSet {
    let ctx = set.ctx();
    PointSet::from_points(ctx, set.points().map(|x| g.apply(ctx, x)))
}

/// Representatives of all orbits of nonzero points, in first-point index order.
/// Every nonzero `m` lies in exactly one returned orbit.
pub fn orbit_partition(group: &RotationGroup) -> Vec<Orbit> {
    let ctx = group.ctx();
    let mut seen = PointSet::empty(ctx);
    seen.insert(0);
    let mut orbits = Vec::new();
    for idx in 1..ctx.plane_size() {
        if seen.contains(idx) {
            continue;
        }
        let orb = orbit(group, ctx.point_at(idx)).expect("nonzero");
        for i in orb.set.indices() {
            seen.insert(i);
        }
        orbits.push(orb);
    }
    orbits
}
