//! The ambient ring `Z/p^r Z` and its plane `(Z/p^r Z)^2`: canonical modular
//! arithmetic, p-adic valuations, the quadratic norm `||x|| = x1^2 + x2^2`,
//! reduced-vector factorization `x = p^v x~`, circles, and dense point sets.

use num_rational::Ratio;
use thiserror::Error;

/// Hard cap on `p^{2r}`: dense grids and `O(p^{3r})` loops must stay desk-scale.
pub const MAX_PLANE_POINTS: u128 = 1 << 26;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("r must be a positive integer")]
    ZeroExponent,
    #[error("p^2r = {0} exceeds the supported plane size 2^26")]
    TooLarge(u128),
    #[error("{0} is not a unit modulo p^r")]
    NonUnit(u64),
}

/// Residue class of `p` modulo 4; it decides the order of `SO_2(Z/p^r Z)` and
/// which branch of every estimate applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResidueClass {
    OneMod4,
    ThreeMod4,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The ring `Z/p^r Z` for an odd prime `p`. All element values are canonical
/// least non-negative residues; arithmetic reduces eagerly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingCtx {
    p: u64,
    r: u32,
    modulus: u64,
    class: ResidueClass,
}

impl RingCtx {
    pub fn new(p: u64, r: u32) -> Result<Self, RingError> {
        if r == 0 {
            return Err(RingError::ZeroExponent);
        }
        if p < 3 || p % 2 == 0 || !is_prime(p) {
            return Err(RingError::NotOddPrime(p));
        }
        let plane = (p as u128).pow(2 * r);
        if plane > MAX_PLANE_POINTS {
            return Err(RingError::TooLarge(plane));
        }
        let modulus = p.pow(r);
        let class = if p % 4 == 1 {
            ResidueClass::OneMod4
        } else {
            ResidueClass::ThreeMod4
        };
        Ok(RingCtx {
            p,
            r,
            modulus,
            class,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residue_class(&self) -> ResidueClass {
        self.class
    }

    /// Number of points of the plane `(Z/p^r Z)^2`, i.e. `p^{2r}`.
    pub fn plane_size(&self) -> usize {
        (self.modulus * self.modulus) as usize
    }

    pub fn reduce(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus - b % self.modulus) % self.modulus
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.modulus - a % self.modulus) % self.modulus
    }

    /// Multiplicative inverse modulo `p^r`; defined exactly for units.
    pub fn inverse(&self, a: u64) -> Result<u64, RingError> {
        let a = a % self.modulus;
        if a % self.p == 0 {
            return Err(RingError::NonUnit(a));
        }
        // extended Euclid over signed integers
        let (mut r0, mut r1) = (self.modulus as i128, a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce(s0))
    }

    /// p-adic valuation of a canonical residue, with `v_p(0) = r`.
    pub fn valuation(&self, x: u64) -> u32 {
        debug_assert!(x < self.modulus);
        if x == 0 {
            return self.r;
        }
        let mut v = 0;
        let mut x = x;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    pub fn vec_add(&self, a: Vec2, b: Vec2) -> Vec2 {
        Vec2::new(self.add(a.x1, b.x1), self.add(a.x2, b.x2))
    }

    pub fn vec_sub(&self, a: Vec2, b: Vec2) -> Vec2 {
        Vec2::new(self.sub(a.x1, b.x1), self.sub(a.x2, b.x2))
    }

    pub fn vec_neg(&self, a: Vec2) -> Vec2 {
        Vec2::new(self.neg(a.x1), self.neg(a.x2))
    }

    pub fn vec_scale(&self, c: u64, a: Vec2) -> Vec2 {
        Vec2::new(self.mul(c, a.x1), self.mul(c, a.x2))
    }

    pub fn dot(&self, a: Vec2, b: Vec2) -> u64 {
        self.add(self.mul(a.x1, b.x1), self.mul(a.x2, b.x2))
    }

    /// The distance function `||x|| = x1^2 + x2^2 (mod p^r)`.
    pub fn norm(&self, a: Vec2) -> u64 {
        self.dot(a, a)
    }

    /// `v_x = min(v_p(x1), v_p(x2))`, so `v_0 = r`.
    pub fn vec_valuation(&self, a: Vec2) -> u32 {
        self.valuation(a.x1).min(self.valuation(a.x2))
    }

    /// Dense index of a point: `x1 * p^r + x2`. Fixed layout, reused by every
    /// serialized table and golden file.
    pub fn index_of(&self, a: Vec2) -> usize {
        (a.x1 * self.modulus + a.x2) as usize
    }

    pub fn point_at(&self, idx: usize) -> Vec2 {
        let idx = idx as u64;
        Vec2::new(idx / self.modulus, idx % self.modulus)
    }

    /// All points of the plane in index order.
    pub fn points(&self) -> impl Iterator<Item = Vec2> + '_ {
        (0..self.plane_size()).map(|i| self.point_at(i))
    }
}

/// A point of `(Z/p^r Z)^2` in canonical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec2 {
    pub x1: u64,
    pub x2: u64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x1: 0, x2: 0 };

    pub fn new(x1: u64, x2: u64) -> Self {
        Vec2 { x1, x2 }
    }

    pub fn is_zero(&self) -> bool {
        *self == Vec2::ZERO
    }
}

/// Result of factoring `x = p^v x~` with `x~` primitive in the smaller ring
/// `Z/p^{r-v} Z`. The factorization is only defined for `x != 0`; the zero
/// vector gets an explicit sentinel and callers must branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReducedVec {
    Zero,
    Primitive {
        v: u32,
        ctx: RingCtx,
        tilde: Vec2,
    },
}

pub fn vec_reduce(ctx: RingCtx, x: Vec2) -> ReducedVec {
    let v = ctx.vec_valuation(x);
    if v == ctx.r() {
        return ReducedVec::Zero;
    }
    let small = RingCtx::new(ctx.p(), ctx.r() - v).expect("smaller ring always valid");
    let d = ctx.p().pow(v);
    let tilde = Vec2::new((x.x1 / d) % small.modulus(), (x.x2 / d) % small.modulus());
    debug_assert_eq!(small.vec_valuation(tilde), 0);
    ReducedVec::Primitive {
        v,
        ctx: small,
        tilde,
    }
}

/// `||x~|| mod p` for a nonzero `x`; `None` for the zero vector. This is the
/// quantity that selects the estimate branch when `p = 1 (mod 4)`.
pub fn norm_tilde_mod_p(ctx: RingCtx, x: Vec2) -> Option<u64> {
    match vec_reduce(ctx, x) {
        ReducedVec::Zero => None,
        ReducedVec::Primitive { ctx: small, tilde, .. } => Some(small.norm(tilde) % ctx.p()),
    }
}

/// A dense subset of the plane with cached cardinality. Membership is a bitmap
/// over the `p^{2r}` point indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    ctx: RingCtx,
    bits: Vec<u64>,
    card: usize,
}

impl PointSet {
    pub fn empty(ctx: RingCtx) -> Self {
        let words = ctx.plane_size().div_ceil(64);
        PointSet {
            ctx,
            bits: vec![0; words],
            card: 0,
        }
    }

    pub fn full(ctx: RingCtx) -> Self {
        let mut s = Self::empty(ctx);
        for i in 0..ctx.plane_size() {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(ctx: RingCtx, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(ctx);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn from_points(ctx: RingCtx, points: impl IntoIterator<Item = Vec2>) -> Self {
        let mut s = Self::empty(ctx);
        for p in points {
            s.insert(ctx.index_of(p));
        }
        s
    }

    pub fn ctx(&self) -> RingCtx {
        self.ctx
    }

    /// Inserts a point index; returns true if it was newly added.
    pub fn insert(&mut self, idx: usize) -> bool {
        assert!(idx < self.ctx.plane_size());
        let (w, b) = (idx / 64, idx % 64);
        if self.bits[w] >> b & 1 == 0 {
            self.bits[w] |= 1 << b;
            self.card += 1;
            true
        } else {
            false
        }
    }

    pub fn contains(&self, idx: usize) -> bool {
        let (w, b) = (idx / 64, idx % 64);
        self.bits[w] >> b & 1 == 1
    }

    pub fn contains_point(&self, p: Vec2) -> bool {
        self.contains(self.ctx.index_of(p))
    }

    pub fn len(&self) -> usize {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    /// `|A| / p^{2r}` as an exact rational.
    pub fn density(&self) -> Ratio<u128> {
        Ratio::new(self.card as u128, self.ctx.plane_size() as u128)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ctx.plane_size()).filter(|&i| self.contains(i))
    }

    pub fn points(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.indices().map(|i| self.ctx.point_at(i))
    }

    /// Serialization form: sorted ascending list of point indices.
    pub fn sorted_indices(&self) -> Vec<usize> {
        self.indices().collect()
    }
}

/// The circle `C_{j,r} = {x : ||x|| = j (mod p^r)}`, by exhaustive scan.
pub fn circle(ctx: RingCtx, j: u64) -> PointSet {
    let j = j % ctx.modulus();
    PointSet::from_points(ctx, ctx.points().filter(|&x| ctx.norm(x) == j))
}
