//! Exact geometric primitives: rational scalars, integer lines and
//! hyperplanes, points, problem instances, generation and duality.
//!
//! All predicates are exact. Lines are restricted to integer slopes and
//! intercepts with pairwise-distinct slopes inside one instance, which
//! rules out vertical lines and parallel pairs by construction.

mod generate;
mod instance;
mod rat;

pub use generate::gen_instance;
pub use instance::{dualize, validate_general_position, Instance, Surfaces, Violation};
pub use rat::Rat;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Magnitude cap on line slopes and intercepts (and hyperplane
/// coefficients): 2^20. Keeps every arrangement comparison inside i128.
pub const COEFF_BOUND: i64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("lines have equal slopes ({0})")]
    EqualSlopes(i64),
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("cannot parse number: {0}")]
    BadNumber(String),
    #[error("coefficient {0} exceeds bound ±2^20")]
    CoefficientOutOfRange(i64),
    #[error("hyperplane needs a nonzero coefficient vector")]
    ZeroNormal,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("duplicate slope {0} inside one instance")]
    DuplicateSlope(i64),
    #[error("two points share x-coordinate {0}; duals would be parallel")]
    DualDegenerate(String),
    #[error("point coordinate {0} is not an integer within ±2^20; dual line not representable")]
    DualOutOfRange(String),
    #[error("duality is defined for d = 2 only")]
    DualDimension,
    #[error("general position not reached within {0} resampling rounds")]
    ExhaustedRetries(u32),
    #[error("invalid generator arguments: {0}")]
    BadGenArgs(String),
    #[error("line id {0} out of range")]
    LineIdOutOfRange(u32),
    #[error("instance JSON malformed: {0}")]
    BadInstanceJson(String),
}

/// Non-vertical line `y = a·x + b` with integer slope and intercept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Line2 {
    pub id: u32,
    pub a: i64,
    pub b: i64,
}

impl Line2 {
    pub fn new(id: u32, a: i64, b: i64) -> Result<Self, GeomError> {
        if a.abs() > COEFF_BOUND {
            return Err(GeomError::CoefficientOutOfRange(a));
        }
        if b.abs() > COEFF_BOUND {
            return Err(GeomError::CoefficientOutOfRange(b));
        }
        Ok(Line2 { id, a, b })
    }

    /// Exact value `a·x + b`.
    pub fn eval_at(&self, x: &Rat) -> Rat {
        &(&Rat::from_int(self.a) * x) + &Rat::from_int(self.b)
    }

    pub fn contains(&self, p: &PointD) -> bool {
        assert_eq!(p.dim(), 2, "Line2 incidence needs a planar point");
        p.coord(1).cmp_affine(self.a, self.b, p.coord(0)) == std::cmp::Ordering::Equal
    }

    /// The same line as a hyperplane `-a·x + y = b`.
    pub fn as_hyperplane(&self) -> Hyperplane {
        Hyperplane {
            id: self.id,
            coeffs: vec![-self.a, 1],
            offset: self.b,
        }
    }
}

/// Hyperplane `Σ a_k · x_k = c` in d ≥ 2 dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hyperplane {
    pub id: u32,
    pub coeffs: Vec<i64>,
    pub offset: i64,
}

impl Hyperplane {
    pub fn new(id: u32, coeffs: Vec<i64>, offset: i64) -> Result<Self, GeomError> {
        if coeffs.len() < 2 {
            return Err(GeomError::DimensionTooSmall(coeffs.len()));
        }
        if coeffs.iter().all(|&c| c == 0) {
            return Err(GeomError::ZeroNormal);
        }
        for &c in coeffs.iter().chain(std::iter::once(&offset)) {
            if c.abs() > COEFF_BOUND {
                return Err(GeomError::CoefficientOutOfRange(c));
            }
        }
        Ok(Hyperplane { id, coeffs, offset })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn contains(&self, p: &PointD) -> bool {
        assert_eq!(p.dim(), self.dim(), "dimension mismatch in incidence test");
        let mut acc = Rat::zero();
        for (a, x) in self.coeffs.iter().zip(p.coords()) {
            acc = &acc + &(&Rat::from_int(*a) * x);
        }
        acc == Rat::from_int(self.offset)
    }
}

/// Point with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointD {
    coords: Vec<Rat>,
}

impl PointD {
    pub fn new(coords: Vec<Rat>) -> Self {
        assert!(coords.len() >= 2, "points live in d >= 2 dimensions");
        PointD { coords }
    }

    pub fn xy(x: Rat, y: Rat) -> Self {
        PointD { coords: vec![x, y] }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        PointD::new(coords.iter().map(|&c| Rat::from_int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, k: usize) -> &Rat {
        &self.coords[k]
    }

    pub fn coords(&self) -> impl Iterator<Item = &Rat> {
        self.coords.iter()
    }

    pub fn x(&self) -> &Rat {
        &self.coords[0]
    }

    pub fn y(&self) -> &Rat {
        &self.coords[1]
    }
}

/// Exact intersection point of two non-parallel lines.
///
/// `x = (b2 − b1)/(a1 − a2)`, `y = a1·x + b1`.
pub fn line_intersection(l1: &Line2, l2: &Line2) -> Result<PointD, GeomError> {
    if l1.a == l2.a {
        return Err(GeomError::EqualSlopes(l1.a));
    }
    let x = Rat::new(l2.b - l1.b, l1.a - l2.a)?;
    let y = l1.eval_at(&x);
    Ok(PointD::xy(x, y))
}

/// Exact value of the line at `x`.
pub fn eval_at(l: &Line2, x: &Rat) -> Rat {
    l.eval_at(x)
}

/// Exact incidence test for anything that behaves like a hyperplane.
pub trait Incidence {
    fn incident(&self, p: &PointD) -> bool;
}

impl Incidence for Line2 {
    fn incident(&self, p: &PointD) -> bool {
        self.contains(p)
    }
}

impl Incidence for Hyperplane {
    fn incident(&self, p: &PointD) -> bool {
        self.contains(p)
    }
}

/// 64-bit avalanche finalizer shared by skip-list levels, fingerprints and
/// the generator's collision tables.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51afd7ed558ccd);
    x ^= x >> 33;
    x = x.wrapping_mul(0xc4ceb9fe1a85ec53);
    x ^= x >> 33;
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(id: u32, a: i64, b: i64) -> Line2 {
        Line2::new(id, a, b).unwrap()
    }

    #[test]
    fn intersection_examples() {
        // (y=x, y=−x+2) → (1,1)
        let p = line_intersection(&l(0, 1, 0), &l(1, -1, 2)).unwrap();
        assert_eq!(p, PointD::from_ints(&[1, 1]));
        // (y=x, y=3) → (3,3)
        let p = line_intersection(&l(0, 1, 0), &l(2, 0, 3)).unwrap();
        assert_eq!(p, PointD::from_ints(&[3, 3]));
        // (y=−x+2, y=3) → (−1,3)
        let p = line_intersection(&l(1, -1, 2), &l(2, 0, 3)).unwrap();
        assert_eq!(p, PointD::from_ints(&[-1, 3]));
    }

    #[test]
    fn equal_slopes_rejected() {
        assert_eq!(
            line_intersection(&l(0, 2, 0), &l(1, 2, 5)),
            Err(GeomError::EqualSlopes(2))
        );
    }

    #[test]
    fn eval_examples() {
        assert_eq!(eval_at(&l(0, 1, 0), &Rat::zero()), Rat::zero());
        assert_eq!(eval_at(&l(1, -1, 2), &Rat::from_int(2)), Rat::zero());
        assert_eq!(eval_at(&l(2, 0, 3), &Rat::from_int(1_000_000)), Rat::from_int(3));
    }

    #[test]
    fn incidence_examples() {
        assert!(l(2, 0, 3).contains(&PointD::from_ints(&[0, 3])));
        assert!(!l(0, 1, 0).contains(&PointD::from_ints(&[0, 3])));
        let h = Hyperplane::new(0, vec![1, 1, 1], 3).unwrap();
        assert!(h.contains(&PointD::from_ints(&[1, 1, 1])));
    }

    #[test]
    fn coefficient_caps_enforced() {
        assert!(Line2::new(0, COEFF_BOUND + 1, 0).is_err());
        assert!(Line2::new(0, 0, -(COEFF_BOUND + 1)).is_err());
        assert!(Hyperplane::new(0, vec![0, 0], 1).is_err());
    }

    proptest! {
        // line_intersection lies on both inputs.
        #[test]
        fn intersection_on_both_lines(
            a1 in -1000i64..1000, b1 in -1000i64..1000,
            a2 in -1000i64..1000, b2 in -1000i64..1000,
        ) {
            prop_assume!(a1 != a2);
            let l1 = l(0, a1, b1);
            let l2 = l(1, a2, b2);
            let p = line_intersection(&l1, &l2).unwrap();
            prop_assert!(l1.contains(&p));
            prop_assert!(l2.contains(&p));
        }

        // eval_at(l, x) equals the y of intersecting l with the horizontal
        // line through that value.
        #[test]
        fn eval_matches_horizontal_intersection(
            a in 1i64..500, b in -500i64..500, c in -500i64..500,
        ) {
            let line = l(0, a, b);
            let horiz = l(1, 0, c);
            let p = line_intersection(&line, &horiz).unwrap();
            prop_assert_eq!(p.y(), &Rat::from_int(c));
            prop_assert_eq!(&line.eval_at(p.x()), p.y());
        }
    }
}
