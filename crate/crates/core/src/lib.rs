//! Exact arithmetic, rotation groups, discrete Fourier analysis, and incidence
//! counting on the plane over `Z/p^r Z`, together with numeric verification
//! harnesses for the associated restriction/extension and difference-set
//! estimates at desk scale (small `p`, `r`).

pub mod estimates;
pub mod experiments;
pub mod fourier;
pub mod incidence;
pub mod report;
pub mod ring;
pub mod rotation;

pub use ring::{circle, vec_reduce, PointSet, ReducedVec, ResidueClass, RingCtx, RingError, Vec2};
pub use rotation::{Rotation, RotationGroup};
