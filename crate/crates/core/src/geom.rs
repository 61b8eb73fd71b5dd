//! Exact planar vectors: rational points/directions and integer lattice
//! points.
//!
//! `Vec2` carries rational coordinates and serves for points, ray
//! directions and inequality rows alike; `IVec2` is reserved for lattice
//! data (hull vertices, facet normals, boundary integer points). The
//! angular comparator orders directions counter-clockwise starting at the
//! positive x-axis without ever leaving exact arithmetic.

use crate::error::Error;
use crate::rat::Rat;
use num::bigint::BigInt;
use num::{Integer, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Rational vector in the plane.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vec2 {
    pub x: Rat,
    pub y: Rat,
}

/// Integer (lattice) vector in the plane.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IVec2 {
    pub x: BigInt,
    pub y: BigInt,
}

impl fmt::Debug for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", crate::rat::fmt_rat(&self.x), crate::rat::fmt_rat(&self.y))
    }
}

impl fmt::Debug for IVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Vec2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        Vec2 { x, y }
    }

    /// Vector with small integer coordinates; handy in tests and builders.
    pub fn from_ints(x: i64, y: i64) -> Self {
        Vec2::new(crate::rat::rat(x), crate::rat::rat(y))
    }

    pub fn zero() -> Self {
        Vec2::new(Rat::zero(), Rat::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn dot(&self, other: &Vec2) -> Rat {
        &self.x * &other.x + &self.y * &other.y
    }

    /// Determinant `self.x * other.y - self.y * other.x`.
    pub fn cross(&self, other: &Vec2) -> Rat {
        &self.x * &other.y - &self.y * &other.x
    }

    /// Counter-clockwise quarter turn `(-y, x)`.
    pub fn perp(&self) -> Vec2 {
        Vec2::new(-self.y.clone(), self.x.clone())
    }

    pub fn scale(&self, s: &Rat) -> Vec2 {
        Vec2::new(&self.x * s, &self.y * s)
    }

    /// Exact lattice coordinates, when both entries are integers.
    pub fn to_lattice(&self) -> Option<IVec2> {
        if crate::rat::is_integer(&self.x) && crate::rat::is_integer(&self.y) {
            Some(IVec2::new(self.x.to_integer(), self.y.to_integer()))
        } else {
            None
        }
    }

    /// The primitive integer vector with the same direction.
    pub fn primitive_direction(&self) -> Result<IVec2, Error> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        let scale = self.x.denom().lcm(self.y.denom());
        let ix = (&self.x * Rat::from_integer(scale.clone())).to_integer();
        let iy = (&self.y * Rat::from_integer(scale)).to_integer();
        IVec2::new(ix, iy).primitive()
    }
}

impl IVec2 {
    pub fn new(x: BigInt, y: BigInt) -> Self {
        IVec2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        IVec2::new(BigInt::from(x), BigInt::from(y))
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn dot(&self, other: &IVec2) -> BigInt {
        &self.x * &other.x + &self.y * &other.y
    }

    pub fn cross(&self, other: &IVec2) -> BigInt {
        &self.x * &other.y - &self.y * &other.x
    }

    /// Counter-clockwise quarter turn `(-y, x)`.
    pub fn perp(&self) -> IVec2 {
        IVec2::new(-self.y.clone(), self.x.clone())
    }

    /// Divides out the gcd of the coordinates. Errors on the zero vector.
    pub fn primitive(&self) -> Result<IVec2, Error> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        let g = self.x.gcd(&self.y);
        Ok(IVec2::new(&self.x / &g, &self.y / &g))
    }

    pub fn to_vec2(&self) -> Vec2 {
        Vec2::new(
            Rat::from_integer(self.x.clone()),
            Rat::from_integer(self.y.clone()),
        )
    }

    /// Dot product against a rational vector.
    pub fn dot_q(&self, other: &Vec2) -> Rat {
        self.to_vec2().dot(other)
    }
}

/// Some lattice point on the line `n . x = c`, for primitive `n`.
pub fn lattice_on_line(n: &IVec2, c: &BigInt) -> IVec2 {
    let e = n.x.extended_gcd(&n.y);
    debug_assert!(e.gcd == BigInt::from(1));
    IVec2::new(&e.x * c, &e.y * c)
}

/// Lattice points on the segment from `a` to `b`, in that order; `open`
/// drops the endpoints. Exact: finds the primitive direction of the line,
/// checks the line carries lattice points at all, and solves the parameter
/// range, so the cost is linear in the number of points returned.
pub fn segment_lattice_points(a: &Vec2, b: &Vec2, open: bool) -> Vec<IVec2> {
    let d = b - a;
    if d.is_zero() {
        return match (open, a.to_lattice()) {
            (false, Some(p)) => vec![p],
            _ => Vec::new(),
        };
    }
    let w = d.primitive_direction().expect("nonzero direction");
    let n = w.perp();
    let level = n.dot_q(a);
    if !crate::rat::is_integer(&level) {
        return Vec::new();
    }
    let z0 = lattice_on_line(&n, &level.to_integer());
    // z0 + k w lies in the segment iff w.(z - a) ranges within [0, w.d].
    let wd = w.dot_q(&d);
    let base = w.dot_q(&(&z0.to_vec2() - a));
    let ww = Rat::from_integer(w.dot(&w));
    let (lo, hi) = ((-&base) / &ww, (&wd - &base) / &ww);
    let (klo, khi) = if open {
        (crate::rat::floor_int(&lo) + 1, crate::rat::ceil_int(&hi) - 1)
    } else {
        (crate::rat::ceil_int(&lo), crate::rat::floor_int(&hi))
    };
    let mut out = Vec::new();
    let mut k = klo;
    while k <= khi {
        out.push(IVec2::new(&z0.x + &k * &w.x, &z0.y + &k * &w.y));
        k += 1;
    }
    out
}

macro_rules! impl_vec_ops {
    ($t:ty) => {
        impl Add for &$t {
            type Output = $t;
            fn add(self, other: &$t) -> $t {
                <$t>::new(&self.x + &other.x, &self.y + &other.y)
            }
        }
        impl Sub for &$t {
            type Output = $t;
            fn sub(self, other: &$t) -> $t {
                <$t>::new(&self.x - &other.x, &self.y - &other.y)
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                <$t>::new(-self.x.clone(), -self.y.clone())
            }
        }
    };
}

impl_vec_ops!(Vec2);
impl_vec_ops!(IVec2);

/// Lexicographic order on `(x, y)`; the library-wide canonical vector order.
pub fn cmp_vec2(a: &Vec2, b: &Vec2) -> Ordering {
    a.x.cmp(&b.x).then_with(|| a.y.cmp(&b.y))
}

/// Lexicographic order on integer vectors.
pub fn cmp_ivec2(a: &IVec2, b: &IVec2) -> Ordering {
    a.x.cmp(&b.x).then_with(|| a.y.cmp(&b.y))
}

/// Lexicographic order on rational coordinate vectors of equal length.
pub fn cmp_rat_slice(a: &[Rat], b: &[Rat]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (u, v) in a.iter().zip(b.iter()) {
        match u.cmp(v) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Half-plane index used by the angular order: 0 for angles in `[0, pi)`
/// measured from the positive x-axis, 1 for `[pi, 2*pi)`.
fn angular_half(v: &Vec2) -> u8 {
    debug_assert!(!v.is_zero());
    if v.y.is_positive() || (v.y.is_zero() && v.x.is_positive()) {
        0
    } else {
        1
    }
}

/// Orders nonzero directions by counter-clockwise angle from the positive
/// x-axis; collinear same-direction vectors compare equal regardless of
/// length.
pub fn cmp_ccw(a: &Vec2, b: &Vec2) -> Ordering {
    match angular_half(a).cmp(&angular_half(b)) {
        Ordering::Equal => {
            let c = a.cross(b);
            if c.is_positive() {
                Ordering::Less
            } else if c.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        }
        other => other,
    }
}

/// True when the direction `v` lies strictly inside the counter-clockwise
/// sector from `lo` to `hi` (sector angle strictly below pi).
pub fn strictly_between_ccw(lo: &Vec2, hi: &Vec2, v: &Vec2) -> bool {
    lo.cross(v).is_positive() && v.cross(hi).is_positive()
}

/// True when the directions positively span the plane, i.e. every vector of
/// `R^2` is a nonnegative combination of them. Equivalent to every cyclic
/// gap between consecutive (distinct, ccw-sorted) directions being strictly
/// below a half turn; zero vectors are ignored.
pub fn positively_spans(dirs: &[Vec2]) -> bool {
    let mut ds: Vec<&Vec2> = dirs.iter().filter(|d| !d.is_zero()).collect();
    ds.sort_by(|a, b| cmp_ccw(a, b));
    ds.dedup_by(|a, b| a.cross(b).is_zero() && a.dot(b).is_positive());
    if ds.len() < 3 {
        return false;
    }
    (0..ds.len()).all(|i| ds[i].cross(ds[(i + 1) % ds.len()]).is_positive())
}
