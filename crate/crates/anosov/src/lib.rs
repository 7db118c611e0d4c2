//! Combinatorial construction game for Anosov flows on closed 3-manifolds.
//!
//! The library models *hyperbolic plugs* — compact 3-manifolds with boundary
//! tori, carrying a vector field transverse to the boundary — together with
//! the pair of measured-sign laminations each boundary torus inherits from
//! the stable/unstable manifolds of the maximal invariant set.  Everything a
//! construction needs is tracked combinatorially and exactly:
//!
//! * [`foliation`] — sign words of compact leaves, canonical types, torus
//!   laminations and the affine torus maps used to glue them,
//! * [`arrangement`] — exact rational piecewise-linear representatives on the
//!   torus, and the strong-transversality certificate built from them,
//! * [`plug`] — the plug catalog (building blocks) and plug reversal,
//! * [`gluing`] — gluing plugs along boundary tori, leaf survival
//!   bookkeeping, and transitivity certification,
//! * [`surgery`] — DA bifurcations and the named construction pipelines,
//! * [`numerics`] — a small ODE engine (RK4) driving the explicit model
//!   vector fields, crossing maps and cone-expansion measurements,
//! * [`traintrack`] — measured train tracks with the switch condition,
//! * [`script`] / [`report`] — a JSON construction-script front end and
//!   deterministic reporting.
//!
//! All combinatorial geometry uses exact big-rational arithmetic; nothing in
//! the library consumes randomness, so identical inputs produce
//! byte-identical reports.

pub mod arrangement;
pub mod error;
pub mod foliation;
pub mod gluing;
pub mod plug;
pub mod surgery;

pub use error::{Error, Result};

use num::BigRational;

/// Exact rational scalar used throughout the combinatorial layer.
pub type Rat = BigRational;

/// Convenience constructor for an exact rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    use num::BigInt;
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Reduce a rational to the fundamental interval `[0, 1)`.
pub fn frac(x: &Rat) -> Rat {
    let f = x - x.floor();
    if f == num::One::one() {
        num::Zero::zero()
    } else {
        f
    }
}
