//! Lattice-free bodies `M(B)` and their classification.
//!
//! A body is the polyhedron `{x : b_i . (x - f) <= 1}` described by rows
//! `b_i` around an anchor `f`, which is always strictly interior. The gauge
//! `psi(r) = max_i b_i . r` prices ray directions; when the body has no
//! lattice point in its interior, those prices assemble into valid
//! inequalities for the corner relaxation anchored at `f`. Classification
//! follows the taxonomy of maximal lattice-free planar sets: splits, the
//! three triangle types, and quadrilaterals whose four boundary lattice
//! points span a parallelogram of area one.

use crate::error::Error;
use crate::geom::{
    cmp_ccw, cmp_vec2, lattice_on_line, segment_lattice_points, IVec2, Vec2,
};
use crate::linalg::solve_2x2;
use crate::rat::{ceil_int, floor_int, is_integer, Rat};
use crate::Result;
use num::{BigInt, One, Signed, Zero};
use std::cmp::Ordering;

/// Where a ray leaving `f` meets the body boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RayHit {
    Point(Vec2),
    /// The ray never exits (`psi <= 0`).
    RecessionDirection,
}

/// Taxonomy tag for a body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BodyTag {
    /// Maximal band `level <= normal . x <= level + 1` with `normal`
    /// primitive (sign-canonicalized: first nonzero coordinate positive).
    Split { normal: IVec2, level: BigInt },
    /// Triangle, integral vertices, one lattice point inside each edge.
    Type1,
    /// Triangle with a fractional vertex whose opposite edge carries at
    /// least two lattice points.
    Type2,
    /// Triangle with exactly three boundary lattice points.
    Type3,
    /// Quadrilateral; its four boundary lattice points form a
    /// parallelogram of area one.
    Quadrilateral,
    NonMaximalLatticeFree,
    NotLatticeFree { witness: IVec2 },
}

/// Classification result: the tag plus, for bounded bodies, the lattice
/// points on each facet (closed, and relative-interior only), facet order
/// matching [`Body::facets`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub tag: BodyTag,
    pub facet_points: Vec<Vec<IVec2>>,
    pub facet_relint_points: Vec<Vec<IVec2>>,
}

/// One bounded facet: a defining row, the edge endpoints (counter-clockwise
/// around `f`), and the lattice points on the edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub row: usize,
    pub ends: (Vec2, Vec2),
    pub points: Vec<IVec2>,
    pub relint_points: Vec<IVec2>,
}

/// Candidate family that produced an inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Split,
    Type1,
    Type2,
    Type3,
    Quadrilateral,
}

/// A priced inequality `gamma . s >= 1` together with the body certifying
/// its validity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub gamma: Vec<Rat>,
    pub certificate: Body,
    pub family: Family,
}

/// The polyhedron `{x : b_i . (x - f) <= 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Body {
    f: Vec2,
    rows: Vec<Vec2>,
    vertices: Vec<Vec2>,
    bounded: bool,
}

impl Body {
    /// Builds a body; rejects an empty row list and zero rows (`0 <= 1`
    /// carries no geometry).
    pub fn new(f: Vec2, rows: Vec<Vec2>) -> Result<Body> {
        if rows.is_empty() {
            return Err(Error::InvalidInstance("body needs at least one row".into()));
        }
        if rows.iter().any(Vec2::is_zero) {
            return Err(Error::ZeroVector);
        }
        let vertices = compute_vertices(&f, &rows);
        let bounded = rows_positively_span(&rows);
        Ok(Body {
            f,
            rows,
            vertices,
            bounded,
        })
    }

    pub fn f(&self) -> &Vec2 {
        &self.f
    }

    pub fn rows(&self) -> &[Vec2] {
        &self.rows
    }

    /// Vertices of the body, counter-clockwise around `f`.
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    /// Gauge value `max_i b_i . r`; negative or zero for recession rays.
    pub fn psi(&self, r: &Vec2) -> Rat {
        self.rows
            .iter()
            .map(|b| b.dot(r))
            .max()
            .expect("nonempty rows")
    }

    /// The price vector: `psi` of every ray.
    pub fn gamma(&self, rays: &[Vec2]) -> Vec<Rat> {
        rays.iter().map(|r| self.psi(r)).collect()
    }

    /// Boundary point `f + r / psi(r)` hit by the ray, when it exits.
    pub fn ray_hit(&self, r: &Vec2) -> RayHit {
        let p = self.psi(r);
        if p.is_positive() {
            RayHit::Point(&self.f + &r.scale(&p.recip()))
        } else {
            RayHit::RecessionDirection
        }
    }

    /// Indices of the rows achieving `psi(r)` (0-based).
    pub fn active_rows(&self, r: &Vec2) -> Vec<usize> {
        let m = self.psi(r);
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, b)| b.dot(r) == m)
            .map(|(i, _)| i)
            .collect()
    }

    /// Whether `p` satisfies every row inequality.
    pub fn contains(&self, p: &Vec2) -> bool {
        let d = p - &self.f;
        self.rows.iter().all(|b| b.dot(&d) <= Rat::one())
    }

    /// Whether `p` is in the interior.
    pub fn strictly_contains(&self, p: &Vec2) -> bool {
        let d = p - &self.f;
        self.rows.iter().all(|b| b.dot(&d) < Rat::one())
    }

    /// Ray indices whose boundary hit is a vertex, with that vertex.
    pub fn corner_rays(&self, rays: &[Vec2]) -> Vec<(usize, Vec2)> {
        rays.iter()
            .enumerate()
            .filter_map(|(j, r)| match self.ray_hit(r) {
                RayHit::Point(p) if self.vertices.contains(&p) => Some((j, p)),
                _ => None,
            })
            .collect()
    }

    /// A lattice point strictly inside the body, if any.
    ///
    /// Supported for bounded bodies (column scan over the exact bounding
    /// box) and for bands (integer level strictly between the boundary
    /// levels); other unbounded bodies raise [`Error::UnboundedNonSplit`].
    pub fn interior_lattice_point(&self) -> Result<Option<IVec2>> {
        if self.bounded {
            return Ok(self.bounded_interior_point());
        }
        let band = self.as_band()?;
        let (normal, lo, hi) = band;
        let c = floor_int(&lo) + BigInt::one();
        if Rat::from_integer(c.clone()) < hi {
            Ok(Some(lattice_on_line(&normal, &c)))
        } else {
            Ok(None)
        }
    }

    /// Whether the interior avoids all lattice points; same support as
    /// [`Body::interior_lattice_point`].
    pub fn is_lattice_free(&self) -> Result<bool> {
        Ok(self.interior_lattice_point()?.is_none())
    }

    /// Band decomposition `(normal, lo, hi)` with `normal` primitive and
    /// sign-canonical, meaning `lo <= normal . x <= hi` describes the body.
    /// Errors unless all rows are parallel and bound both sides.
    fn as_band(&self) -> Result<(IVec2, Rat, Rat)> {
        let mut n = self.rows[0].primitive_direction()?;
        if n.x.is_negative() || (n.x.is_zero() && n.y.is_negative()) {
            n = IVec2::new(-&n.x, -&n.y);
        }
        let nq = n.to_vec2();
        let nn = nq.dot(&nq);
        let nf = nq.dot(&self.f);
        let mut lo: Option<Rat> = None;
        let mut hi: Option<Rat> = None;
        for b in &self.rows {
            if !b.cross(&nq).is_zero() {
                return Err(Error::UnboundedNonSplit);
            }
            let lambda = b.dot(&nq) / &nn;
            let level = &nf + lambda.recip();
            if lambda.is_positive() {
                hi = Some(match hi {
                    Some(h) if h <= level => h,
                    _ => level,
                });
            } else {
                lo = Some(match lo {
                    Some(l) if l >= level => l,
                    _ => level,
                });
            }
        }
        match (lo, hi) {
            (Some(lo), Some(hi)) => Ok((n, lo, hi)),
            _ => Err(Error::UnboundedNonSplit),
        }
    }

    fn bounded_interior_point(&self) -> Option<IVec2> {
        let xs: Vec<&Rat> = self.vertices.iter().map(|v| &v.x).collect();
        let minx = ceil_int(xs.iter().min().unwrap());
        let maxx = floor_int(xs.iter().max().unwrap());
        let mut cx = minx;
        while cx <= maxx {
            let cxr = Rat::from_integer(cx.clone());
            let mut lo: Option<Rat> = None;
            let mut hi: Option<Rat> = None;
            let mut feasible = true;
            for b in &self.rows {
                // b . (x - f) < 1 at x = (cx, y):  b.y * y < 1 + b.f - b.x cx
                let rhs = Rat::one() + b.dot(&self.f) - &b.x * &cxr;
                if b.y.is_zero() {
                    if !rhs.is_positive() {
                        feasible = false;
                        break;
                    }
                } else {
                    let bound = &rhs / &b.y;
                    if b.y.is_positive() {
                        hi = Some(match hi {
                            Some(h) if h <= bound => h,
                            _ => bound,
                        });
                    } else {
                        lo = Some(match lo {
                            Some(l) if l >= bound => l,
                            _ => bound,
                        });
                    }
                }
            }
            if feasible {
                let (lo, hi) = (lo.expect("bounded"), hi.expect("bounded"));
                let y0 = floor_int(&lo) + BigInt::one();
                if Rat::from_integer(y0.clone()) < hi {
                    return Some(IVec2::new(cx, y0));
                }
            }
            cx += 1;
        }
        None
    }

    /// All lattice points in the closed body, in column-major order
    /// (bounded bodies only).
    pub fn lattice_points(&self) -> Result<Vec<IVec2>> {
        if !self.bounded {
            return Err(Error::UnboundedNonSplit);
        }
        let xs: Vec<&Rat> = self.vertices.iter().map(|v| &v.x).collect();
        let minx = ceil_int(xs.iter().min().unwrap());
        let maxx = floor_int(xs.iter().max().unwrap());
        let mut out = Vec::new();
        let mut cx = minx;
        while cx <= maxx {
            let cxr = Rat::from_integer(cx.clone());
            let mut lo: Option<Rat> = None;
            let mut hi: Option<Rat> = None;
            let mut feasible = true;
            for b in &self.rows {
                // b . (x - f) <= 1 at x = (cx, y): b.y * y <= 1 + b.f - b.x cx
                let rhs = Rat::one() + b.dot(&self.f) - &b.x * &cxr;
                if b.y.is_zero() {
                    if rhs.is_negative() {
                        feasible = false;
                        break;
                    }
                } else {
                    let bound = &rhs / &b.y;
                    if b.y.is_positive() {
                        hi = Some(match hi {
                            Some(h) if h <= bound => h,
                            _ => bound,
                        });
                    } else {
                        lo = Some(match lo {
                            Some(l) if l >= bound => l,
                            _ => bound,
                        });
                    }
                }
            }
            if feasible {
                let (lo, hi) = (lo.expect("bounded"), hi.expect("bounded"));
                let mut y = ceil_int(&lo);
                let ymax = floor_int(&hi);
                while y <= ymax {
                    out.push(IVec2::new(cx.clone(), y.clone()));
                    y += BigInt::one();
                }
            }
            cx += BigInt::one();
        }
        Ok(out)
    }

    /// The bounded facets (edges) of the body, counter-clockwise around
    /// `f`, each with its lattice points. Redundant rows that define no
    /// edge are skipped; duplicate rows yield one facet.
    pub fn facets(&self) -> Vec<Facet> {
        let mut facets: Vec<Facet> = Vec::new();
        for (i, b) in self.rows.iter().enumerate() {
            let on: Vec<&Vec2> = self
                .vertices
                .iter()
                .filter(|v| b.dot(&(*v - &self.f)) == Rat::one())
                .collect();
            if on.len() < 2 {
                continue;
            }
            // Extreme endpoints along the edge direction.
            let dir = b.perp();
            let mut on = on;
            on.sort_by(|p, q| dir.dot(p).cmp(&dir.dot(q)));
            let (mut a, mut c) = ((*on[0]).clone(), (*on[on.len() - 1]).clone());
            // Orient the edge counter-clockwise as seen from f.
            if (&a - &self.f).cross(&(&c - &self.f)).is_negative() {
                std::mem::swap(&mut a, &mut c);
            }
            if facets.iter().any(|fc| fc.ends == (a.clone(), c.clone())) {
                continue;
            }
            let points = segment_lattice_points(&a, &c, false);
            let relint_points = segment_lattice_points(&a, &c, true);
            facets.push(Facet {
                row: i,
                ends: (a, c),
                points,
                relint_points,
            });
        }
        // Counter-clockwise order by edge midpoint direction from f.
        facets.sort_by(|p, q| {
            let mp = &(&p.ends.0 + &p.ends.1).scale(&crate::rat::ratio(1, 2)) - &self.f;
            let mq = &(&q.ends.0 + &q.ends.1).scale(&crate::rat::ratio(1, 2)) - &self.f;
            cmp_ccw(&mp, &mq)
        });
        facets
    }

    /// Classifies the body within the maximal lattice-free taxonomy.
    ///
    /// Bounded bodies and bands are fully supported; any other unbounded
    /// body raises [`Error::UnboundedNonSplit`].
    pub fn classify(&self) -> Result<Classification> {
        if !self.bounded {
            let (normal, lo, hi) = self.as_band()?;
            let inside = floor_int(&lo) + BigInt::one();
            let tag = if Rat::from_integer(inside.clone()) < hi {
                BodyTag::NotLatticeFree {
                    witness: lattice_on_line(&normal, &inside),
                }
            } else if is_integer(&lo) && is_integer(&hi) && &hi - &lo == Rat::one() {
                BodyTag::Split {
                    normal,
                    level: lo.to_integer(),
                }
            } else {
                BodyTag::NonMaximalLatticeFree
            };
            return Ok(Classification {
                tag,
                facet_points: Vec::new(),
                facet_relint_points: Vec::new(),
            });
        }

        let facets = self.facets();
        let facet_points: Vec<Vec<IVec2>> = facets.iter().map(|fc| fc.points.clone()).collect();
        let facet_relint_points: Vec<Vec<IVec2>> =
            facets.iter().map(|fc| fc.relint_points.clone()).collect();
        let classification = |tag| Classification {
            tag,
            facet_points: facet_points.clone(),
            facet_relint_points: facet_relint_points.clone(),
        };

        if let Some(witness) = self.bounded_interior_point() {
            return Ok(classification(BodyTag::NotLatticeFree { witness }));
        }
        if facets.iter().any(|fc| fc.relint_points.is_empty()) {
            return Ok(classification(BodyTag::NonMaximalLatticeFree));
        }

        let integral_vertices = self
            .vertices
            .iter()
            .filter(|v| v.to_lattice().is_some())
            .count();
        let boundary_total: usize = facets
            .iter()
            .map(|fc| fc.relint_points.len())
            .sum::<usize>()
            + integral_vertices;

        let tag = match facets.len() {
            3 => {
                if integral_vertices == 3 {
                    debug_assert!(facets.iter().all(|fc| fc.relint_points.len() == 1));
                    BodyTag::Type1
                } else if boundary_total == 3 {
                    debug_assert_eq!(integral_vertices, 0);
                    BodyTag::Type3
                } else {
                    debug_assert!(facets.iter().any(|fc| fc.points.len() >= 2));
                    BodyTag::Type2
                }
            }
            4 => {
                debug_assert_eq!(boundary_total, 4);
                debug_assert_eq!(integral_vertices, 0);
                debug_assert!(facets.iter().all(|fc| fc.relint_points.len() == 1));
                debug_assert!(quad_points_area_one(&facets));
                BodyTag::Quadrilateral
            }
            n => {
                return Err(Error::Internal(format!(
                    "maximal lattice-free body with {n} facets"
                )))
            }
        };
        Ok(classification(tag))
    }
}

/// The four edge lattice points of a maximal quadrilateral, in facet
/// order, span a parallelogram of area one.
fn quad_points_area_one(facets: &[Facet]) -> bool {
    let p: Vec<&IVec2> = facets.iter().map(|fc| &fc.relint_points[0]).collect();
    let u = p[1] - p[0];
    let v = p[3] - p[0];
    let w = p[2] - p[3];
    u == w && u.cross(&v).abs() == BigInt::one()
}

/// Intersections of row pairs at level 1 that satisfy all rows, ordered
/// counter-clockwise around `f`.
fn compute_vertices(f: &Vec2, rows: &[Vec2]) -> Vec<Vec2> {
    let one = Vec2::from_ints(1, 1);
    let mut verts: Vec<Vec2> = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let col1 = Vec2::new(rows[i].x.clone(), rows[j].x.clone());
            let col2 = Vec2::new(rows[i].y.clone(), rows[j].y.clone());
            if let Some((ux, uy)) = solve_2x2(&col1, &col2, &one) {
                let u = Vec2::new(ux, uy);
                if rows.iter().all(|b| b.dot(&u) <= Rat::one()) {
                    verts.push(f + &u);
                }
            }
        }
    }
    verts.sort_by(cmp_vec2);
    verts.dedup();
    verts.sort_by(|p, q| cmp_ccw(&(p - f), &(q - f)));
    verts
}

/// Whether the row directions positively span the plane (all angular gaps
/// strictly below half a turn), which is exactly boundedness of the body.
fn rows_positively_span(rows: &[Vec2]) -> bool {
    let mut dirs: Vec<&Vec2> = rows.iter().collect();
    dirs.sort_by(|a, b| cmp_ccw(a, b));
    dirs.dedup_by(|a, b| cmp_ccw(a, b) == Ordering::Equal);
    if dirs.len() < 3 {
        return false;
    }
    (0..dirs.len()).all(|i| {
        let j = (i + 1) % dirs.len();
        dirs[i].cross(dirs[j]).is_positive()
    })
}

/// Checks an inequality against its embedded certificate: the body must be
/// lattice-free and its price vector must reproduce `gamma` exactly.
/// Inequality rows realizing the given polygon around `f` (vertices in
/// any order, polygon convex with `f` interior).
pub(crate) fn rows_from_vertices(f: &Vec2, verts: &[Vec2]) -> Vec<Vec2> {
    let mut vs = verts.to_vec();
    vs.sort_by(|p, q| cmp_ccw(&(p - f), &(q - f)));
    let n = vs.len();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (&vs[i], &vs[(i + 1) % n]);
        // Row v with v.(a - f) = v.(b - f) = 1.
        let col1 = Vec2::new(a.x.clone() - &f.x, b.x.clone() - &f.x);
        let col2 = Vec2::new(a.y.clone() - &f.y, b.y.clone() - &f.y);
        let (vx, vy) = solve_2x2(&col1, &col2, &Vec2::from_ints(1, 1))
            .expect("vertices not collinear with f");
        rows.push(Vec2::new(vx, vy));
    }
    rows
}

pub fn verify_certificate(ineq: &Inequality, rays: &[Vec2]) -> bool {
    matches!(ineq.certificate.is_lattice_free(), Ok(true))
        && ineq.certificate.gamma(rays) == ineq.gamma
}
