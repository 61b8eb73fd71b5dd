//! Integer hulls of two-dimensional affine cones.
//!
//! For a rational apex `f` and two non-parallel rational rays, the convex
//! hull of the lattice points of the cone is a polyhedron: one unbounded
//! facet parallel to each ray plus a finite chain of bounded edges between
//! them. The chain is discovered by support-line probing: each probe solves
//! the two-variable integer program `min c.x` over the cone exactly, via a
//! continued-fraction descent on the boundary slopes, so the hull costs
//! polynomially many exact arithmetic operations in the bit size of the
//! input — no lattice-point enumeration anywhere.

use crate::error::Error;
use crate::geom::{IVec2, Vec2};
use crate::rat::{ceil_int, floor_int, Rat};
use crate::Result;
use num::{BigInt, Integer, One, Signed, Zero};

/// One facet `normal . x >= offset` of a cone's integer hull; `normal` is
/// primitive and points into the hull.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullFacet {
    pub normal: IVec2,
    pub offset: BigInt,
    pub bounded: bool,
}

impl HullFacet {
    /// Whether the lattice point satisfies this facet's inequality.
    pub fn holds(&self, p: &IVec2) -> bool {
        self.normal.dot(p) >= self.offset
    }

    /// Whether the lattice point lies on this facet's boundary line.
    pub fn on_line(&self, p: &IVec2) -> bool {
        self.normal.dot(p) == self.offset
    }
}

/// Integer hull `conv(C cap Z^2)` of the cone `C = f + cone(d1, d2)`.
///
/// `rays = (d1, d2)` are the primitive ray directions oriented so that
/// `cross(d1, d2) > 0`. `vertices` walks the boundary counter-clockwise
/// (interior on the left): it starts at the endpoint of the unbounded edge
/// receding along `d2` and ends at the endpoint of the edge receding along
/// `d1`. `facets` matches that walk: `facets[0]` is the `d2`-side unbounded
/// facet, `facets[i]` for `0 < i < facets.len() - 1` is the bounded edge
/// from `vertices[i - 1]` to `vertices[i]`, and the last facet is the
/// `d1`-side unbounded one, so `facets.len() == vertices.len() + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeHull {
    pub apex: Vec2,
    pub rays: (IVec2, IVec2),
    pub vertices: Vec<IVec2>,
    pub facets: Vec<HullFacet>,
}

impl ConeHull {
    /// Whether `p` belongs to the integer hull.
    pub fn contains(&self, p: &IVec2) -> bool {
        self.facets.iter().all(|fc| fc.holds(p))
    }

    /// The bounded facets, in boundary order.
    pub fn bounded_facets(&self) -> impl Iterator<Item = &HullFacet> {
        self.facets.iter().filter(|fc| fc.bounded)
    }
}

fn rat_int(b: &BigInt) -> Rat {
    Rat::from_integer(b.clone())
}

use crate::geom::lattice_on_line;

fn muladd(base: &IVec2, k: &BigInt, dir: &IVec2) -> IVec2 {
    IVec2::new(&base.x + k * &dir.x, &base.y + k * &dir.y)
}

/// Lowest lattice level of an upward-opening cone.
///
/// The cone has apex `(gu, gy)` and boundary slopes `sl < sr` measured as
/// `du/dy`; its cross-section at height `y >= gy` is the interval
/// `[gu + (y - gy) sl, gu + (y - gy) sr]`. Returns the least integer
/// `y >= ceil(gy)` whose cross-section contains an integer.
fn fip(gu: Rat, gy: Rat, sl: Rat, sr: Rat, fuel: &mut u32) -> Result<BigInt> {
    if *fuel == 0 {
        return Err(Error::Internal(
            "slope descent failed to terminate".to_string(),
        ));
    }
    *fuel -= 1;
    debug_assert!(sl < sr);

    // Shear u -> u - m y so the right slope lands in [0, 1); levels are
    // untouched.
    let m = rat_int(&floor_int(&sr));
    let gu = gu - &m * &gy;
    let sl = sl - &m;
    let sr = sr - &m;

    if !sl.is_positive() {
        // The interval endpoints move apart (weakly) with every level, so
        // once the first level is known to miss, each integer is captured
        // exactly when a boundary crosses it; the first capture is O(1).
        let t0 = ceil_int(&gy);
        let t0r = rat_int(&t0);
        let l0 = &gu + (&t0r - &gy) * &sl;
        let r0 = &gu + (&t0r - &gy) * &sr;
        let n = ceil_int(&l0);
        if rat_int(&n) <= r0 {
            return Ok(t0);
        }
        // Now n - 1 < l0 <= r0 < n: the right boundary reaches n first
        // among larger integers, the left reaches n - 1 first among
        // smaller ones.
        let mut best: Option<BigInt> = None;
        if sr.is_positive() {
            let t = &gy + (rat_int(&n) - &gu) / &sr;
            best = Some(ceil_int(&t));
        }
        if sl.is_negative() {
            let t = &gy + (rat_int(&(&n - 1)) - &gu) / &sl;
            let c = ceil_int(&t);
            best = Some(match best {
                Some(b) => b.min(c),
                None => c,
            });
        }
        return best.ok_or_else(|| Error::Internal("degenerate slopes".to_string()));
    }

    // Lean-right case: 0 < sl < sr < 1. Both boundaries drift right, so a
    // point of minimal x is also feasible at the minimal-y level: if
    // (x1, y1) has minimal y and (x2, y2) minimal x, then (x2, y1) is still
    // in the cone (x2 <= x1 <= R(y1) and L(y1) <= L(y2) <= x2). Minimal x
    // is the same problem with the axes swapped, where slopes become
    // reciprocals and the next shear strictly reduces their denominators:
    // a Euclidean descent.
    let xstar = fip(gy.clone(), gu.clone(), sr.recip(), sl.recip(), fuel)?;
    let lb = &gy + (rat_int(&xstar) - &gu) / &sr;
    let lb = if lb < gy { gy } else { lb };
    Ok(ceil_int(&lb))
}

/// Exact `min c . x` over the lattice points of `f + cone(d1, d2)`,
/// together with the two lattice endpoints of the minimizing segment
/// (equal when the minimizer is unique).
///
/// Requires `c` primitive with `c . d1 > 0` and `c . d2 > 0`, which makes
/// the minimum finite and its level set a bounded segment.
fn support_min(c: &IVec2, f: &Vec2, d1: &IVec2, d2: &IVec2) -> Result<(BigInt, IVec2, IVec2)> {
    assert!(c.dot(d1).is_positive() && c.dot(d2).is_positive());
    let e = c.x.extended_gcd(&c.y);
    assert!(e.gcd.is_one(), "support direction must be primitive");

    // Unimodular map x -> (e.y x1 - e.x x2, c . x): the objective becomes
    // the second coordinate and both rays point strictly upward.
    let gu = rat_int(&e.y) * &f.x - rat_int(&e.x) * &f.y;
    let gy = c.dot_q(f);
    let s1 = Rat::new(&e.y * &d1.x - &e.x * &d1.y, c.dot(d1));
    let s2 = Rat::new(&e.y * &d2.x - &e.x * &d2.y, c.dot(d2));
    let (sl, sr) = if s1 < s2 { (s1, s2) } else { (s2, s1) };
    assert!(sl < sr, "rays must not be parallel");

    let mut fuel = 4096;
    let t = fip(gu, gy, sl, sr, &mut fuel)?;

    // Lattice points on the level line c . x = t are x0 + k w; membership
    // in the cone is two linear conditions on k, each binding on one side
    // because c is strictly positive on both rays.
    let x0 = lattice_on_line(c, &t);
    let w = c.perp();
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    let p = &x0.to_vec2() - f;
    for (coef, cst) in [
        (w.cross(d2), p.cross(&d2.to_vec2())),
        (d1.cross(&w), d1.to_vec2().cross(&p)),
    ] {
        assert!(!coef.is_zero());
        let bound = -cst / rat_int(&coef);
        if coef.is_positive() {
            lo = Some(match lo {
                Some(v) if v >= bound => v,
                _ => bound,
            });
        } else {
            hi = Some(match hi {
                Some(v) if v <= bound => v,
                _ => bound,
            });
        }
    }
    let (lo, hi) = (lo.expect("one lower bound"), hi.expect("one upper bound"));
    let klo = ceil_int(&lo);
    let khi = floor_int(&hi);
    assert!(klo <= khi, "minimizing level must contain a lattice point");
    Ok((t, muladd(&x0, &klo, &w), muladd(&x0, &khi, &w)))
}

/// Recursive support probing between two known hull vertices `a`, `b`
/// (walking with the hull interior on the right). Appends the vertices
/// strictly between them and the edges covering `a..b`, both in walk order.
fn chain(
    a: &IVec2,
    b: &IVec2,
    f: &Vec2,
    d1: &IVec2,
    d2: &IVec2,
    out_v: &mut Vec<IVec2>,
    out_e: &mut Vec<HullFacet>,
) -> Result<()> {
    if a == b {
        return Ok(());
    }
    let e = b - a;
    let c = IVec2::new(e.y.clone(), -&e.x).primitive()?;
    let ca = c.dot(a);
    debug_assert_eq!(ca, c.dot(b));
    let (h, za, zb) = support_min(&c, f, d1, d2)?;
    assert!(h <= ca, "support value cannot exceed a feasible point");
    if h == ca {
        out_e.push(HullFacet {
            normal: c,
            offset: h,
            bounded: true,
        });
        return Ok(());
    }
    // Strictly better support line: its lattice segment endpoints are new
    // hull vertices between a and b. Order them along the walk.
    let (z1, z2) = if e.dot(&za) <= e.dot(&zb) {
        (za, zb)
    } else {
        (zb, za)
    };
    chain(a, &z1, f, d1, d2, out_v, out_e)?;
    out_v.push(z1.clone());
    if z1 != z2 {
        out_e.push(HullFacet {
            normal: c,
            offset: h,
            bounded: true,
        });
        out_v.push(z2.clone());
    }
    chain(&z2, b, f, d1, d2, out_v, out_e)
}

/// Computes the integer hull of the affine cone with apex `f` and ray
/// directions `r1`, `r2`. Fails with [`Error::ParallelRays`] when the rays
/// do not span the plane (and [`Error::ZeroVector`] on a zero ray).
pub fn cone_integer_hull(f: &Vec2, r1: &Vec2, r2: &Vec2) -> Result<ConeHull> {
    let p1 = r1.primitive_direction()?;
    let p2 = r2.primitive_direction()?;
    let cr = p1.cross(&p2);
    if cr.is_zero() {
        return Err(Error::ParallelRays);
    }
    let (d1, d2) = if cr.is_positive() { (p1, p2) } else { (p2, p1) };
    let delta = rat_int(&d1.cross(&d2));

    // The unbounded facet along d_i lies on the first lattice-bearing line
    // parallel to d_i on the hull side of f; its endpoint vertex is the
    // first lattice point of that line inside the cone.
    let n1 = d1.perp();
    let c1 = ceil_int(&n1.dot_q(f));
    let x01 = lattice_on_line(&n1, &c1);
    let k1 = ceil_int(&(-(&x01.to_vec2() - f).cross(&d2.to_vec2()) / &delta));
    let v1 = muladd(&x01, &k1, &d1);

    let n2 = IVec2::new(d2.y.clone(), -&d2.x);
    let c2 = ceil_int(&n2.dot_q(f));
    let x02 = lattice_on_line(&n2, &c2);
    let k2 = ceil_int(&(-d1.to_vec2().cross(&(&x02.to_vec2() - f)) / &delta));
    let v2 = muladd(&x02, &k2, &d2);

    // Walk v1 -> v2 (interior on the right), then reverse for a
    // counter-clockwise boundary.
    let mut walk_v: Vec<IVec2> = Vec::new();
    let mut walk_e: Vec<HullFacet> = Vec::new();
    if v1 != v2 {
        chain(&v1, &v2, f, &d1, &d2, &mut walk_v, &mut walk_e)?;
    }

    let mut vertices = Vec::with_capacity(walk_v.len() + 2);
    vertices.push(v2);
    walk_v.reverse();
    vertices.extend(walk_v);
    if vertices.last() != Some(&v1) {
        vertices.push(v1);
    }

    let mut facets = Vec::with_capacity(walk_e.len() + 2);
    facets.push(HullFacet {
        normal: n2,
        offset: c2,
        bounded: false,
    });
    walk_e.reverse();
    facets.extend(walk_e);
    facets.push(HullFacet {
        normal: n1,
        offset: c1,
        bounded: false,
    });

    let hull = ConeHull {
        apex: f.clone(),
        rays: (d1, d2),
        vertices,
        facets,
    };
    debug_assert!(hull_is_consistent(&hull));
    Ok(hull)
}

/// Vertex list of the cone's integer hull (convenience projection).
pub fn hull_vertex_candidates(f: &Vec2, r1: &Vec2, r2: &Vec2) -> Result<Vec<IVec2>> {
    Ok(cone_integer_hull(f, r1, r2)?.vertices)
}

/// Affine hulls `normal . x = offset` of the bounded integer-hull facets.
pub fn hull_facet_lines(f: &Vec2, r1: &Vec2, r2: &Vec2) -> Result<Vec<(IVec2, BigInt)>> {
    Ok(cone_integer_hull(f, r1, r2)?
        .facets
        .into_iter()
        .filter(|fc| fc.bounded)
        .map(|fc| (fc.normal, fc.offset))
        .collect())
}

/// Internal structural checks: facet/vertex incidence, normal rotation,
/// validity of every facet at every vertex and on both rays.
fn hull_is_consistent(h: &ConeHull) -> bool {
    let (d1, d2) = &h.rays;
    let nf = h.facets.len();
    if nf != h.vertices.len() + 1 {
        return false;
    }
    if h.facets[0].bounded || h.facets[nf - 1].bounded {
        return false;
    }
    for fc in &h.facets {
        if fc.normal.dot(d1).is_negative() || fc.normal.dot(d2).is_negative() {
            return false;
        }
        if !h.vertices.iter().all(|v| fc.holds(v)) {
            return false;
        }
    }
    for (i, v) in h.vertices.iter().enumerate() {
        if !h.facets[i].on_line(v) || !h.facets[i + 1].on_line(v) {
            return false;
        }
    }
    for w in h.facets.windows(2) {
        if !w[0].normal.cross(&w[1].normal).is_positive() {
            return false;
        }
    }
    true
}
