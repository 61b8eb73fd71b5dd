//! Enumeration of the candidate cut families: splits, the three types of
//! maximal lattice-free triangles, and maximal lattice-free quadrilaterals.
//!
//! Every enumerator walks a polynomial catalogue of constructions — each
//! pinned to a tuple of instance rays, to integer-hull data of two-ray
//! cones, and to unit lattice bands — and keeps only candidates that pass
//! exact post-validation: the constructed body must be maximal lattice-free
//! of the advertised shape, reproduce its price vector on the instance
//! rays, and carry all designated lattice points on its boundary.
//! Over-generation is harmless (the downstream facet filter prunes), so
//! borderline constructions are emitted rather than suppressed; genuinely
//! ambiguous or certificate-less situations are recorded as diagnostics
//! notes on the returned set.

use crate::body::{
    rows_from_vertices, verify_certificate, Body, BodyTag, Family,
    Inequality, RayHit,
};
use crate::cone::{hull_facet_lines, hull_vertex_candidates};
use crate::geom::{
    cmp_ccw, cmp_ivec2, cmp_rat_slice, lattice_on_line,
    segment_lattice_points, IVec2, Vec2,
};
use crate::instance::{fmt_rat_slice, Instance};
use crate::linalg::solve_2x2;
use crate::rat::{ceil_int, floor_int, is_integer, Rat};
use crate::tilt::{
    quadrilateral_from_rays_and_points, ratio_condition,
    triangle_from_rays_and_points, QuadSolve,
};
use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use std::cmp::Ordering;

/// Bound on how many members of a unit-band family are scanned when the
/// anchor sits inside the band strip itself (the generic position admits
/// at most two members); larger families are truncated with a note.
const BAND_SCAN_CAP: usize = 12;

// ---------------------------------------------------------------------------
// Candidate bookkeeping
// ---------------------------------------------------------------------------

/// One construction that reached a candidate: the enumeration family, the
/// construction case within it, and the ray indices it was built on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Provenance {
    pub family: Family,
    pub case: String,
    pub rays: Vec<usize>,
}

/// A certified inequality together with every construction that reached it.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub inequality: Inequality,
    pub provenance: Vec<Provenance>,
}

/// Candidate pool with exact price-vector deduplication: equal vectors are
/// merged and keep the union of their provenances.
#[derive(Clone, Debug, Default)]
pub struct CandidateSet {
    entries: Vec<Candidate>,
    notes: Vec<String>,
}

impl CandidateSet {
    pub fn new() -> CandidateSet {
        CandidateSet::default()
    }

    /// Candidates in canonical (price-vector) order.
    pub fn entries(&self) -> &[Candidate] {
        &self.entries
    }

    /// Diagnostics accumulated during enumeration.
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The candidate carrying this exact price vector, if any.
    pub fn find(&self, gamma: &[Rat]) -> Option<&Candidate> {
        self.entries.iter().find(|c| c.inequality.gamma == gamma)
    }

    fn insert(&mut self, inequality: Inequality, prov: Provenance) {
        match self
            .entries
            .iter_mut()
            .find(|c| c.inequality.gamma == inequality.gamma)
        {
            Some(c) => {
                if !c.provenance.contains(&prov) {
                    c.provenance.push(prov);
                }
            }
            None => self.entries.push(Candidate {
                inequality,
                provenance: vec![prov],
            }),
        }
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }

    fn canonicalize(&mut self) {
        for c in &mut self.entries {
            c.provenance.sort();
            c.provenance.dedup();
        }
        self.entries.sort_by(|a, b| {
            cmp_rat_slice(&a.inequality.gamma, &b.inequality.gamma)
        });
        self.notes.sort();
        self.notes.dedup();
    }

    /// Inserts a prebuilt candidate, merging provenances on an exact
    /// price-vector match, and restores canonical order.
    pub(crate) fn insert_entry(&mut self, cand: Candidate) {
        let Candidate {
            inequality,
            provenance,
        } = cand;
        if provenance.is_empty() {
            if self.find(&inequality.gamma).is_none() {
                self.entries.push(Candidate {
                    inequality,
                    provenance,
                });
            }
        } else {
            for p in provenance {
                self.insert(inequality.clone(), p);
            }
        }
        self.canonicalize();
    }

    /// Union with another pool; provenances of equal price vectors merge.
    pub fn absorb(&mut self, other: CandidateSet) {
        for c in other.entries {
            let Candidate {
                inequality,
                provenance,
            } = c;
            for p in provenance {
                self.insert(inequality.clone(), p);
            }
        }
        self.notes.extend(other.notes);
        self.canonicalize();
    }
}

// ---------------------------------------------------------------------------
// Geometric helpers
// ---------------------------------------------------------------------------

/// First lattice point on the open half-line `f + t r` (`t > 0`) together
/// with its parameter `t`, or `None` when the half-line misses the lattice.
pub fn first_lattice_hit(f: &Vec2, r: &Vec2) -> Option<(IVec2, Rat)> {
    let d = r.primitive_direction().ok()?;
    let n = d.perp();
    let level = n.dot_q(f);
    if !is_integer(&level) {
        return None;
    }
    let z0 = lattice_on_line(&n, &level.to_integer());
    let dq = d.to_vec2();
    // Lattice points on the line sit at parameters s0 + m (in units of the
    // primitive direction) measured from f; the smallest positive one wins.
    let s0 = dq.dot(&(&z0.to_vec2() - f)) / dq.dot(&dq);
    let m = floor_int(&-s0.clone()) + BigInt::one();
    let s = &s0 + Rat::from_integer(m.clone());
    let q = IVec2::new(&z0.x + &m * &d.x, &z0.y + &m * &d.y);
    let kappa = if d.x.is_zero() {
        &r.y / Rat::from_integer(d.y.clone())
    } else {
        &r.x / Rat::from_integer(d.x.clone())
    };
    debug_assert!(kappa.is_positive());
    debug_assert!(s.is_positive());
    Some((q, s / kappa))
}

/// The split `level <= normal . x <= level + 1` as a body anchored at `f`;
/// `None` when `f` is not strictly inside the band.
pub fn split_body(f: &Vec2, normal: &IVec2, level: &BigInt) -> Option<Body> {
    let nq = normal.to_vec2();
    let nf = nq.dot(f);
    let lo = Rat::from_integer(level.clone());
    let hi = &lo + Rat::one();
    if nf <= lo || nf >= hi {
        return None;
    }
    let rows = vec![
        nq.scale(&(&hi - &nf).recip()),
        (-&nq).scale(&(&nf - &lo).recip()),
    ];
    Body::new(f.clone(), rows).ok()
}

/// Sign-canonical band data: first nonzero coordinate of the normal
/// positive. `(n, c)` and `(-n, -c-1)` describe the same band.
fn canonical_band(n: IVec2, c: BigInt) -> (IVec2, BigInt) {
    let flip = if n.x.is_zero() {
        n.y.is_negative()
    } else {
        n.x.is_negative()
    };
    if flip {
        (-&n, -c - BigInt::one())
    } else {
        (n, c)
    }
}

/// Result of scanning the unit-band family through a lattice point pair.
struct BandScan {
    /// `(normal, level)` with `normal . a = level`, `normal . (a+u) =
    /// level + 1`, and the probe inside the closed band.
    members: Vec<(IVec2, BigInt)>,
    /// The probe lies on the carrier line through `a` along `u`, so every
    /// family member contains it.
    carrier: bool,
    truncated: bool,
}

/// Splits whose boundary lines pass through `a` and `a + u` for primitive
/// `u`: the normals are `n0 + t perp(u)` with `n0 . u = 1`. Returns the
/// members whose closed band contains `p`.
fn unit_bands_containing(a: &IVec2, u: &IVec2, p: &Vec2, cap: usize) -> BandScan {
    debug_assert_eq!(u.x.gcd(&u.y), BigInt::one());
    let n0 = lattice_on_line(u, &BigInt::one());
    let q = u.perp();
    let rel = p - &a.to_vec2();
    let alpha = n0.dot_q(&rel);
    let beta = q.dot_q(&rel);
    if beta.is_zero() {
        let on = !alpha.is_negative() && alpha <= Rat::one();
        return BandScan {
            members: Vec::new(),
            carrier: on,
            truncated: false,
        };
    }
    let b1 = (-alpha.clone()) / &beta;
    let b2 = (Rat::one() - &alpha) / &beta;
    let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
    let mut members = Vec::new();
    let mut t = ceil_int(&lo);
    let hi_int = floor_int(&hi);
    let mut truncated = false;
    while t <= hi_int {
        if members.len() >= cap {
            truncated = true;
            break;
        }
        let n = IVec2::new(&n0.x + &t * &q.x, &n0.y + &t * &q.y);
        let e = n.dot(a);
        members.push((n, e));
        t += 1;
    }
    BandScan {
        members,
        carrier: false,
        truncated,
    }
}

/// A split with the lattice point `q` on its boundary and `f` strictly
/// inside; exists whenever `q - f` has content below one — in particular
/// whenever `q` is the first lattice point on its half-line from `f`.
fn band_through_point(f: &Vec2, q: &IVec2) -> Option<(IVec2, BigInt)> {
    let g = &q.to_vec2() - f;
    let w = g.primitive_direction().ok()?;
    let n0 = lattice_on_line(&w, &BigInt::one());
    let content = n0.dot_q(&g);
    if !content.is_positive() || content >= Rat::one() {
        return None;
    }
    let c = floor_int(&n0.dot_q(f));
    Some((n0, c))
}

/// Where the half-line `f + t r` meets the line `n . x = c`; `allow_zero`
/// admits `t = 0`, otherwise `t` must be positive.
fn half_line_meets_line(
    f: &Vec2,
    r: &Vec2,
    n: &Vec2,
    c: &Rat,
    allow_zero: bool,
) -> Option<Vec2> {
    let denom = n.dot(r);
    if denom.is_zero() {
        return None;
    }
    let t = (c - &n.dot(f)) / denom;
    if t.is_negative() || (t.is_zero() && !allow_zero) {
        return None;
    }
    Some(f + &r.scale(&t))
}

/// Intersection of the lines `n1 . x = c1` and `n2 . x = c2`.
fn line_intersection(n1: &Vec2, c1: &Rat, n2: &Vec2, c2: &Rat) -> Option<Vec2> {
    let col1 = Vec2::new(n1.x.clone(), n2.x.clone());
    let col2 = Vec2::new(n1.y.clone(), n2.y.clone());
    let rhs = Vec2::new(c1.clone(), c2.clone());
    let (x, y) = solve_2x2(&col1, &col2, &rhs)?;
    Some(Vec2::new(x, y))
}

/// The line through two distinct points as `(normal, offset)`.
fn line_through(a: &Vec2, b: &Vec2) -> Option<(Vec2, Rat)> {
    let d = b - a;
    if d.is_zero() {
        return None;
    }
    let n = d.perp();
    let off = n.dot(a);
    Some((n, off))
}

/// Orients the lattice line `n . x = c` so that `n . f < c`; `None` when
/// `f` lies on the line.
fn oriented_away(n: &IVec2, c: &BigInt, f: &Vec2) -> Option<(IVec2, BigInt)> {
    let v = n.dot_q(f);
    match v.cmp(&Rat::from_integer(c.clone())) {
        Ordering::Less => Some((n.clone(), c.clone())),
        Ordering::Greater => Some((-n, -c.clone())),
        Ordering::Equal => None,
    }
}

/// Body with the given strictly-convex counter-clockwise corners, provided
/// `f` is strictly inside.
fn polygon_body(f: &Vec2, corners: &[Vec2]) -> Option<Body> {
    let m = corners.len();
    for i in 0..m {
        let a = &corners[i];
        let edge = &corners[(i + 1) % m] - a;
        if !edge.cross(&(f - a)).is_positive() {
            return None;
        }
    }
    Body::new(f.clone(), rows_from_vertices(f, corners)).ok()
}

/// Triangle with the given corners as a body, provided they are affinely
/// independent and `f` sits strictly inside.
fn triangle_body(f: &Vec2, corners: &[Vec2; 3]) -> Option<Body> {
    if corners.iter().any(|c| c == f) {
        return None;
    }
    let mut cs: Vec<Vec2> = corners.to_vec();
    cs.sort_by(|a, b| cmp_ccw(&(a - f), &(b - f)));
    polygon_body(f, &cs)
}

/// Corners of the triangle cut out by three lines, as pairwise
/// intersections; `None` when two of the lines are parallel.
fn triangle_from_lines(
    l1: &(Vec2, Rat),
    l2: &(Vec2, Rat),
    l3: &(Vec2, Rat),
) -> Option<[Vec2; 3]> {
    Some([
        line_intersection(&l1.0, &l1.1, &l2.0, &l2.1)?,
        line_intersection(&l2.0, &l2.1, &l3.0, &l3.1)?,
        line_intersection(&l3.0, &l3.1, &l1.0, &l1.1)?,
    ])
}

/// Lattice points strictly inside the (possibly degenerate) triangle.
fn lattice_strictly_inside(a: &Vec2, b: &Vec2, c: &Vec2) -> Vec<IVec2> {
    if (b - a).cross(&(c - a)).is_zero() {
        return Vec::new();
    }
    let corners = [a, b, c];
    let xlo = ceil_int(corners.iter().map(|p| &p.x).min().unwrap());
    let xhi = floor_int(corners.iter().map(|p| &p.x).max().unwrap());
    let ylo = ceil_int(corners.iter().map(|p| &p.y).min().unwrap());
    let yhi = floor_int(corners.iter().map(|p| &p.y).max().unwrap());
    let inside = |p: &Vec2| -> bool {
        for i in 0..3 {
            let s = corners[i];
            let edge = corners[(i + 1) % 3] - s;
            let sp = edge.cross(&(p - s));
            let sc = edge.cross(&(corners[(i + 2) % 3] - s));
            if sp.is_zero() || sp.is_positive() != sc.is_positive() {
                return false;
            }
        }
        true
    };
    let mut out = Vec::new();
    let mut x = xlo;
    while x <= xhi {
        let mut y = ylo.clone();
        while y <= yhi {
            let z = IVec2::new(x.clone(), y.clone());
            if inside(&z.to_vec2()) {
                out.push(z);
            }
            y += 1;
        }
        x += 1;
    }
    out
}

/// All `m`-element index combinations of `0..k` in lexicographic order.
fn combinations(k: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(i + 1, k, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, m, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Counter-clockwise cyclic order of the given ray indices when every
/// consecutive pair turns strictly left (the rays positively span the
/// plane); `None` otherwise.
fn ccw_index_order(idx: &[usize], rays: &[Vec2]) -> Option<Vec<usize>> {
    let mut ord = idx.to_vec();
    ord.sort_by(|i, j| cmp_ccw(&rays[*i], &rays[*j]));
    let m = ord.len();
    for i in 0..m {
        if !rays[ord[i]].cross(&rays[ord[(i + 1) % m]]).is_positive() {
            return None;
        }
    }
    Some(ord)
}

/// Convex hull of lattice points, counter-clockwise, collinear interior
/// points dropped. Degenerate inputs return the sorted distinct points.
fn convex_hull(points: &[IVec2]) -> Vec<IVec2> {
    let mut pts: Vec<IVec2> = points.to_vec();
    pts.sort_by(cmp_ivec2);
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let turn_ok = |chain: &[IVec2], p: &IVec2| -> bool {
        let q = &chain[chain.len() - 1];
        let o = &chain[chain.len() - 2];
        (q - o).cross(&(p - q)).is_positive()
    };
    let mut lower: Vec<IVec2> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !turn_ok(&lower, p) {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<IVec2> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !turn_ok(&upper, p) {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

// ---------------------------------------------------------------------------
// Integral hits and their certificates
// ---------------------------------------------------------------------------

/// Hit points and the forced price vector when every ray meets the lattice.
fn integral_hits(inst: &Instance) -> Option<(Vec<IVec2>, Vec<Rat>)> {
    let mut points = Vec::new();
    let mut gamma = Vec::new();
    for r in inst.rays() {
        let (q, lambda) = first_lattice_hit(inst.f(), r)?;
        points.push(q);
        gamma.push(lambda.recip());
    }
    Some((points, gamma))
}

/// Band candidates that could carry every hit point on their boundary.
fn split_candidates_for_hits(f: &Vec2, hits: &[IVec2]) -> Vec<(IVec2, BigInt)> {
    let mut pts: Vec<IVec2> = hits.to_vec();
    pts.sort_by(cmp_ivec2);
    pts.dedup();
    let mut cands: Vec<(IVec2, BigInt)> = Vec::new();
    let push_normal = |n: IVec2, cands: &mut Vec<(IVec2, BigInt)>| {
        let lv = n.dot_q(f);
        if is_integer(&lv) {
            return;
        }
        cands.push(canonical_band(n, floor_int(&lv)));
    };
    // Directions along hit-point differences carry same-line pairs.
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = &pts[j] - &pts[i];
            if let Ok(w) = d.primitive() {
                push_normal(w.perp(), &mut cands);
                // Bands with the two points on opposite boundary lines.
                if w == d {
                    for (a, b) in [(&pts[i], &pts[j]), (&pts[j], &pts[i])] {
                        let u = b - a;
                        let scan = unit_bands_containing(a, &u, f, 4);
                        for (n, e) in scan.members {
                            cands.push(canonical_band(n, e));
                        }
                    }
                }
            }
        }
    }
    for p in &pts {
        if let Some((n, c)) = band_through_point(f, p) {
            cands.push(canonical_band(n, c));
        }
    }
    for n in [(1, 0), (0, 1), (1, 1), (1, -1)] {
        push_normal(IVec2::from_ints(n.0, n.1), &mut cands);
    }
    cands.sort_by(|a, b| cmp_ivec2(&a.0, &b.0).then_with(|| a.1.cmp(&b.1)));
    cands.dedup();
    cands
}

/// Searches the certified-shape catalogue for a maximal lattice-free body
/// through all hit points that reproduces `gamma`. Deterministic order:
/// the hull of the hits, then bands, then pinned triangles, then pinned
/// quadrilaterals.
fn hit_certificate(
    inst: &Instance,
    points: &[IVec2],
    gamma: &[Rat],
) -> Option<Inequality> {
    let f = inst.f();
    let rays = inst.rays();
    let k = rays.len();
    let accept = |body: Body| -> Option<Inequality> {
        let family = match body.classify().ok()?.tag {
            BodyTag::Split { .. } => Family::Split,
            BodyTag::Type1 => Family::Type1,
            BodyTag::Type2 => Family::Type2,
            BodyTag::Type3 => Family::Type3,
            BodyTag::Quadrilateral => Family::Quadrilateral,
            _ => return None,
        };
        if body.gamma(rays) != gamma {
            return None;
        }
        let ineq = Inequality {
            gamma: gamma.to_vec(),
            certificate: body,
            family,
        };
        verify_certificate(&ineq, rays).then_some(ineq)
    };

    for (n, e) in split_candidates_for_hits(f, points) {
        let e1 = &e + BigInt::one();
        if !points.iter().all(|p| {
            let lv = n.dot(p);
            lv == e || lv == e1
        }) {
            continue;
        }
        if let Some(ineq) = split_body(f, &n, &e).and_then(&accept) {
            return Some(ineq);
        }
    }

    let hull = convex_hull(points);
    if hull.len() >= 3 {
        let verts: Vec<Vec2> = hull.iter().map(IVec2::to_vec2).collect();
        if let Some(ineq) = polygon_body(f, &verts).and_then(&accept) {
            return Some(ineq);
        }
    }

    for combo in combinations(k, 3) {
        let Some(ord) = ccw_index_order(&combo, rays) else {
            continue;
        };
        let Some(cands) = sector_hull_candidates(f, rays, &ord) else {
            continue;
        };
        let ray_vec: Vec<Vec2> = ord.iter().map(|&i| rays[i].clone()).collect();
        for tuple in cartesian(&cands) {
            let Ok(body) = triangle_from_rays_and_points(f, &ray_vec, &tuple)
            else {
                continue;
            };
            if let Some(ineq) = accept(body) {
                return Some(ineq);
            }
        }
    }

    for combo in combinations(k, 4) {
        let Some(ord) = ccw_index_order(&combo, rays) else {
            continue;
        };
        let Some(cands) = sector_hull_candidates(f, rays, &ord) else {
            continue;
        };
        let ray_vec: Vec<Vec2> = ord.iter().map(|&i| rays[i].clone()).collect();
        for tuple in cartesian(&cands) {
            let Ok(QuadSolve::Unique(body)) =
                quadrilateral_from_rays_and_points(f, &ray_vec, &tuple)
            else {
                continue;
            };
            if let Some(ineq) = accept(body) {
                return Some(ineq);
            }
        }
    }
    None
}

/// Hull-vertex candidates of each consecutive two-ray cone of a cyclic
/// ray order; `None` when any cone is degenerate or empty of vertices.
fn sector_hull_candidates(
    f: &Vec2,
    rays: &[Vec2],
    ord: &[usize],
) -> Option<Vec<Vec<IVec2>>> {
    let m = ord.len();
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        match hull_vertex_candidates(f, &rays[ord[i]], &rays[ord[(i + 1) % m]]) {
            Ok(v) if !v.is_empty() => out.push(v),
            _ => return None,
        }
    }
    Some(out)
}

/// Cartesian product of the candidate lists, in lexicographic order.
fn cartesian(lists: &[Vec<IVec2>]) -> Vec<Vec<IVec2>> {
    let mut out: Vec<Vec<IVec2>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for item in list {
                let mut t = prefix.clone();
                t.push(item.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// The price vector forced when every ray meets the lattice, certified by
/// a maximal lattice-free body through all the hit points; `None` when a
/// ray misses the lattice or no certificate is found.
pub fn integral_hit_gamma(inst: &Instance) -> Option<Inequality> {
    let (points, gamma) = integral_hits(inst)?;
    hit_certificate(inst, &points, &gamma)
}

/// Inserts the integral-hit candidate under the given enumeration family,
/// or records why it was dropped.
fn push_integral_hit(inst: &Instance, set: &mut CandidateSet, family: Family) {
    let Some((points, gamma)) = integral_hits(inst) else {
        return;
    };
    match hit_certificate(inst, &points, &gamma) {
        Some(ineq) => {
            let rays = (0..inst.rays().len()).collect();
            set.insert(
                ineq,
                Provenance {
                    family,
                    case: "integral hits".into(),
                    rays,
                },
            );
        }
        None => set.note(format!(
            "integral-hit price vector [{}] dropped: no lattice-free certificate found",
            fmt_rat_slice(&gamma)
        )),
    }
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

/// Split candidates: the integral-hit certificate, one band orthogonal to
/// each ray direction, and the bands parallel to bounded integer-hull
/// facets of every two-ray cone.
pub fn enumerate_splits(inst: &Instance) -> CandidateSet {
    let f = inst.f();
    let rays = inst.rays();
    let k = rays.len();
    let mut set = CandidateSet::new();
    push_integral_hit(inst, &mut set, Family::Split);
    let mut budget: usize = 1;

    let emit = |set: &mut CandidateSet, n: &IVec2, case: &str, idx: Vec<usize>| {
        let lv = n.dot_q(f);
        if is_integer(&lv) {
            return; // f sits on a lattice line of this direction
        }
        let c = floor_int(&lv);
        let Some(body) = split_body(f, n, &c) else {
            return;
        };
        let gamma = body.gamma(rays);
        let ineq = Inequality {
            gamma,
            certificate: body,
            family: Family::Split,
        };
        if verify_certificate(&ineq, rays) {
            set.insert(
                ineq,
                Provenance {
                    family: Family::Split,
                    case: case.into(),
                    rays: idx,
                },
            );
        }
    };

    for (j, r) in rays.iter().enumerate() {
        let Ok(d) = r.primitive_direction() else {
            continue;
        };
        emit(&mut set, &d.perp(), "recession ray", vec![j]);
        budget += 1;
    }

    for pair in combinations(k, 2) {
        let Ok(lines) = hull_facet_lines(f, &rays[pair[0]], &rays[pair[1]])
        else {
            continue;
        };
        for (n, _off) in &lines {
            emit(&mut set, n, "cone hull facet", pair.clone());
            budget += 1;
        }
    }
    set.canonicalize();
    assert!(set.len() <= budget, "split candidate count exceeds its bound");
    set
}

// ---------------------------------------------------------------------------
// Type 3 triangles
// ---------------------------------------------------------------------------

/// Type 3 candidates: the integral-hit certificate plus pinned
/// reconstructions from every ray triple and the integer-hull vertices of
/// the three adjacent two-ray cones.
pub fn enumerate_type3(inst: &Instance) -> CandidateSet {
    let f = inst.f();
    let rays = inst.rays();
    let k = rays.len();
    let mut set = CandidateSet::new();
    push_integral_hit(inst, &mut set, Family::Type3);
    let mut budget: usize = 1;
    for combo in combinations(k, 3) {
        let Some(ord) = ccw_index_order(&combo, rays) else {
            continue;
        };
        let Some(cands) = sector_hull_candidates(f, rays, &ord) else {
            continue;
        };
        let ray_vec: Vec<Vec2> = ord.iter().map(|&i| rays[i].clone()).collect();
        for tuple in cartesian(&cands) {
            budget += 1;
            let Ok(body) = triangle_from_rays_and_points(f, &ray_vec, &tuple)
            else {
                continue;
            };
            let Ok(cls) = body.classify() else {
                continue;
            };
            if cls.tag != BodyTag::Type3 {
                continue;
            }
            // The boundary lattice points must be exactly the chosen pins.
            let mut bpts: Vec<IVec2> =
                cls.facet_points.iter().flatten().cloned().collect();
            bpts.sort_by(cmp_ivec2);
            bpts.dedup();
            let mut chosen = tuple.clone();
            chosen.sort_by(cmp_ivec2);
            chosen.dedup();
            if bpts != chosen {
                continue;
            }
            let gamma = body.gamma(rays);
            let ineq = Inequality {
                gamma,
                certificate: body,
                family: Family::Type3,
            };
            if verify_certificate(&ineq, rays) {
                set.insert(
                    ineq,
                    Provenance {
                        family: Family::Type3,
                        case: "three corner rays".into(),
                        rays: combo.clone(),
                    },
                );
            }
        }
    }
    set.canonicalize();
    assert!(set.len() <= budget, "type 3 candidate count exceeds its bound");
    set
}

// ---------------------------------------------------------------------------
// Type 1 triangles
// ---------------------------------------------------------------------------

/// Type 1 candidates. Two rays point to the integral endpoints of the
/// edge with three lattice points; the remaining vertex is fixed either by
/// the unit band through that edge containing `f`, or by a third ray
/// crossing the adjacent lattice line.
pub fn enumerate_type1(inst: &Instance) -> CandidateSet {
    let f = inst.f();
    let rays = inst.rays();
    let k = rays.len();
    let mut set = CandidateSet::new();
    push_integral_hit(inst, &mut set, Family::Type1);
    let mut budget: usize = 1;
    for pair in combinations(k, 2) {
        let Ok(lines) = hull_facet_lines(f, &rays[pair[0]], &rays[pair[1]])
        else {
            continue;
        };
        for (n, off) in &lines {
            let Some((pi, c)) = oriented_away(n, off, f) else {
                continue;
            };
            let pi_q = pi.to_vec2();
            let cq = Rat::from_integer(c.clone());
            let Some(h1) = half_line_meets_line(f, &rays[pair[0]], &pi_q, &cq, false)
            else {
                continue;
            };
            let Some(h2) = half_line_meets_line(f, &rays[pair[1]], &pi_q, &cq, false)
            else {
                continue;
            };
            let (Some(v1), Some(v2)) = (h1.to_lattice(), h2.to_lattice())
            else {
                continue;
            };
            if v1 == v2 {
                continue;
            }
            let d = &v2 - &v1;
            let Ok(u) = d.primitive() else { continue };
            if d != &u + &u {
                continue; // the edge must carry exactly one interior point
            }
            let a_level = &c - BigInt::one();

            // Unit band through the edge endpoints fixes the third vertex.
            let scan = unit_bands_containing(&v1, &u, f, BAND_SCAN_CAP);
            if scan.truncated {
                set.note(format!(
                    "type 1 band family through {:?}/{:?} truncated at {} members",
                    v1, v2, BAND_SCAN_CAP
                ));
            }
            debug_assert!(!scan.carrier, "f on the long facet was filtered");
            for (nb, e) in scan.members {
                budget += 1;
                let Some(y1) = line_intersection(
                    &nb.to_vec2(),
                    &Rat::from_integer(e),
                    &pi_q,
                    &Rat::from_integer(a_level.clone()),
                )
                .and_then(|p| p.to_lattice()) else {
                    continue;
                };
                try_type1(
                    inst, &mut set, &pair, &v1, &v2, &y1, &u, "unit band",
                    pair.clone(),
                );
            }

            // A ray crossing the adjacent lattice line pins the two tilted
            // edges' lattice points around its crossing.
            let z_a = lattice_on_line(&pi, &a_level);
            let aq = Rat::from_integer(a_level.clone());
            let uu = Rat::from_integer(u.dot(&u));
            for j3 in 0..k {
                if pair.contains(&j3) {
                    continue;
                }
                let Some(x) = half_line_meets_line(f, &rays[j3], &pi_q, &aq, true)
                else {
                    continue;
                };
                let s = u.to_vec2().dot(&(&x - &z_a.to_vec2())) / &uu;
                let m0 = floor_int(&s);
                let mut ms = vec![m0.clone()];
                if is_integer(&s) {
                    ms.push(&m0 - BigInt::one());
                }
                for m in ms {
                    budget += 1;
                    let y1 = IVec2::new(&z_a.x + &m * &u.x, &z_a.y + &m * &u.y);
                    let mut idx = pair.clone();
                    idx.push(j3);
                    try_type1(
                        inst, &mut set, &pair, &v1, &v2, &y1, &u, "third ray",
                        idx,
                    );
                }
            }
        }
    }
    set.canonicalize();
    assert!(set.len() <= budget, "type 1 candidate count exceeds its bound");
    set
}

/// Validates and inserts the type 1 triangle with integral corners
/// `v1, v2` and apex mirrored through the tilted-edge lattice point `y1`.
#[allow(clippy::too_many_arguments)]
fn try_type1(
    inst: &Instance,
    set: &mut CandidateSet,
    corner_rays: &[usize],
    v1: &IVec2,
    v2: &IVec2,
    y1: &IVec2,
    u: &IVec2,
    case: &str,
    idx: Vec<usize>,
) {
    let f = inst.f();
    let rays = inst.rays();
    let apex = IVec2::new(
        &(&y1.x + &y1.x) - &v1.x,
        &(&y1.y + &y1.y) - &v1.y,
    );
    let corners = [v1.to_vec2(), v2.to_vec2(), apex.to_vec2()];
    let Some(body) = triangle_body(f, &corners) else {
        return;
    };
    let Ok(cls) = body.classify() else {
        return;
    };
    if cls.tag != BodyTag::Type1 {
        return;
    }
    let y2 = y1 + u;
    let y3 = v1 + u;
    for p in [y1, &y2, &y3] {
        if !body.contains(&p.to_vec2()) {
            return;
        }
    }
    for (j, v) in corner_rays.iter().zip([v1, v2]) {
        match body.ray_hit(&rays[*j]) {
            RayHit::Point(p) if p == v.to_vec2() => {}
            _ => return,
        }
    }
    let gamma = body.gamma(rays);
    let ineq = Inequality {
        gamma,
        certificate: body,
        family: Family::Type1,
    };
    if verify_certificate(&ineq, rays) {
        set.insert(
            ineq,
            Provenance {
                family: Family::Type1,
                case: case.into(),
                rays: idx,
            },
        );
    }
}

// ---------------------------------------------------------------------------
// Type 2 triangles
// ---------------------------------------------------------------------------

/// Requirements checked before a type 2 triangle is accepted.
struct T2Checks {
    /// Rays that must exit exactly at these vertices.
    corner_hits: Vec<(usize, Vec2)>,
    /// Lattice points that must lie on the body.
    boundary: Vec<IVec2>,
    /// When set, the facet through this lattice point must see no
    /// fractional ray hit in its relative interior.
    free_pivot: Option<IVec2>,
}

/// Validates and inserts a type 2 triangle; returns its price vector when
/// it was accepted.
fn try_type2(
    inst: &Instance,
    set: &mut CandidateSet,
    corners: &[Vec2; 3],
    checks: &T2Checks,
    case: &str,
    idx: Vec<usize>,
) -> Option<Vec<Rat>> {
    let f = inst.f();
    let rays = inst.rays();
    let body = triangle_body(f, corners)?;
    let cls = body.classify().ok()?;
    if cls.tag != BodyTag::Type2 {
        return None;
    }
    for p in &checks.boundary {
        if !body.contains(&p.to_vec2()) {
            return None;
        }
    }
    for (j, v) in &checks.corner_hits {
        match body.ray_hit(&rays[*j]) {
            RayHit::Point(p) if &p == v => {}
            _ => return None,
        }
    }
    if let Some(pivot) = &checks.free_pivot {
        let facets = body.facets();
        let carrying: Vec<&crate::body::Facet> = facets
            .iter()
            .filter(|fc| fc.points.contains(pivot))
            .collect();
        if carrying.is_empty() {
            return None;
        }
        for r in rays {
            let RayHit::Point(p) = body.ray_hit(r) else {
                continue;
            };
            if p.to_lattice().is_some() {
                continue;
            }
            let active = body.active_rows(r);
            for fc in &carrying {
                if active.contains(&fc.row) && p != fc.ends.0 && p != fc.ends.1 {
                    return None;
                }
            }
        }
    }
    let gamma = body.gamma(rays);
    let ineq = Inequality {
        gamma: gamma.clone(),
        certificate: body,
        family: Family::Type2,
    };
    if !verify_certificate(&ineq, rays) {
        return None;
    }
    set.insert(
        ineq,
        Provenance {
            family: Family::Type2,
            case: case.into(),
            rays: idx,
        },
    );
    Some(gamma)
}

/// Candidate far points for the facet through `pivot` whose second vertex
/// wanders along a carrier line: the first few lattice positions
/// `base + m step` (including the window where `f` switches sides), plus
/// lattice contact points inside the region swept by the rotating facet.
fn pivot_completions(
    f: &Vec2,
    pivot: &IVec2,
    base: &IVec2,
    step: &IVec2,
    limit_apex: &Vec2,
    apex_line: Option<&(Vec2, Rat)>,
) -> Vec<Vec2> {
    let pq = pivot.to_vec2();
    let mut ms: Vec<BigInt> = (0..4).map(BigInt::from).collect();
    let a0 = (&base.to_vec2() - &pq).cross(&(f - &pq));
    let b0 = step.to_vec2().cross(&(f - &pq));
    if !b0.is_zero() {
        let mstar = -(a0 / b0);
        let mlo = floor_int(&mstar);
        let mut d = &mlo - BigInt::one();
        let stop = &mlo + BigInt::from(3);
        while d <= stop {
            if !d.is_negative() {
                ms.push(d.clone());
            }
            d += 1;
        }
    }
    ms.sort();
    ms.dedup();
    let mut out: Vec<Vec2> = ms
        .iter()
        .map(|m| {
            Vec2::new(
                Rat::from_integer(&base.x + m * &step.x),
                Rat::from_integer(&base.y + m * &step.y),
            )
        })
        .collect();
    // Lattice points the rotating facet may have to touch: they live in
    // the triangle between the deepest wandering vertex, the rotation
    // limit, and the pivot.
    if let Some(line) = apex_line {
        let base_line = line_through(&pq, &base.to_vec2());
        if let Some(bl) = base_line {
            if let Some(apex0) = line_intersection(&bl.0, &bl.1, &line.0, &line.1) {
                for z in lattice_strictly_inside(&apex0, limit_apex, &pq) {
                    out.push(z.to_vec2());
                }
            }
        }
    }
    out.retain(|p| p != &pq);
    out.sort_by(crate::geom::cmp_vec2);
    out.dedup();
    out
}

/// Determined data shared by the long-facet type 2 constructions: the two
/// lattice points on the lattice line adjacent to the long facet.
struct AdjacentPair {
    y1: IVec2,
    y2: IVec2,
    case: &'static str,
    extra_ray: Option<usize>,
}

/// The pairs `(y1, y2 = y1 + u)` on the line `pi . x = level` fixed either
/// by the unit band through `anchor`/`anchor + u` containing `f`, or by a
/// ray crossing that line; `u` runs parallel to it.
#[allow(clippy::too_many_arguments)]
fn adjacent_pairs(
    inst: &Instance,
    set: &mut CandidateSet,
    skip: &[usize],
    anchor: &IVec2,
    u: &IVec2,
    pi: &IVec2,
    level: &BigInt,
    what: &str,
) -> Vec<AdjacentPair> {
    let f = inst.f();
    let rays = inst.rays();
    let mut out = Vec::new();
    let pi_q = pi.to_vec2();
    let level_q = Rat::from_integer(level.clone());

    let scan = unit_bands_containing(anchor, u, f, BAND_SCAN_CAP);
    if scan.truncated {
        set.note(format!(
            "{what}: band family through {:?} truncated at {} members",
            anchor, BAND_SCAN_CAP
        ));
    }
    if scan.carrier {
        set.note(format!("{what}: anchor line carries f; family skipped"));
    }
    for (nb, e) in scan.members {
        let Some(y1) = line_intersection(
            &nb.to_vec2(),
            &Rat::from_integer(e),
            &pi_q,
            &level_q,
        )
        .and_then(|p| p.to_lattice()) else {
            continue;
        };
        let y2 = &y1 + u;
        out.push(AdjacentPair {
            y1,
            y2,
            case: "unit band",
            extra_ray: None,
        });
    }

    let z = lattice_on_line(pi, level);
    let uu = Rat::from_integer(u.dot(u));
    for (j, r) in rays.iter().enumerate() {
        if skip.contains(&j) {
            continue;
        }
        let Some(x) = half_line_meets_line(f, r, &pi_q, &level_q, true) else {
            continue;
        };
        let s = u.to_vec2().dot(&(&x - &z.to_vec2())) / &uu;
        let m0 = floor_int(&s);
        let mut ms = vec![m0.clone()];
        if is_integer(&s) {
            ms.push(&m0 - BigInt::one());
        }
        for m in ms {
            let y1 = IVec2::new(&z.x + &m * &u.x, &z.y + &m * &u.y);
            let y2 = &y1 + u;
            out.push(AdjacentPair {
                y1,
                y2,
                case: "third ray",
                extra_ray: Some(j),
            });
        }
    }
    out
}

/// Type 2 candidates, enumerated over the four ways the paperwork pins the
/// long facet and the two one-point facets; every construction is
/// re-validated exactly before emission.
pub fn enumerate_type2(inst: &Instance) -> CandidateSet {
    let mut set = CandidateSet::new();
    push_integral_hit(inst, &mut set, Family::Type2);
    let mut budget: usize = 1;
    type2_long_facet(inst, &mut set, &mut budget);
    type2_integral_corner(inst, &mut set, &mut budget);
    type2_tilted_pair(inst, &mut set, &mut budget);
    type2_ray_quadruple(inst, &mut set, &mut budget);
    set.canonicalize();
    assert!(set.len() <= budget, "type 2 candidate count exceeds its bound");
    set
}

/// Emits the completions of a type 2 triangle whose long facet line and
/// adjacent pair are fixed: one facet runs from the known corner through
/// `y1`; the facet through `y2` is closed either by a ray pointing to one
/// of the two remaining vertices or by the canonical free-facet sweep.
#[allow(clippy::too_many_arguments)]
fn complete_type2(
    inst: &Instance,
    set: &mut CandidateSet,
    budget: &mut usize,
    long_line: &(Vec2, Rat),
    v: &Vec2,
    corner_ray: usize,
    y1: &IVec2,
    y2: &IVec2,
    boundary: Vec<IVec2>,
    scan_base: &IVec2,
    scan_step: &IVec2,
    case_prefix: &str,
    base_idx: &[usize],
) {
    let f = inst.f();
    let rays = inst.rays();
    let k = rays.len();
    let Some(f1_line) = line_through(v, &y1.to_vec2()) else {
        return;
    };
    let y2q = y2.to_vec2();

    // A second corner ray pins the remaining facet: it may point to the
    // vertex on the long facet or to the vertex on the `y1` facet.
    for j5 in 0..k {
        if j5 == corner_ray {
            continue;
        }
        for (target_line, label) in [
            (long_line, "second corner on long facet"),
            (&f1_line, "second corner on tilted facet"),
        ] {
            *budget += 1;
            let Some(w) = half_line_meets_line(
                f,
                &rays[j5],
                &target_line.0,
                &target_line.1,
                false,
            ) else {
                continue;
            };
            if w == y2q {
                continue;
            }
            let Some(f2_line) = line_through(&y2q, &w) else {
                continue;
            };
            let Some(corners) = triangle_from_lines(long_line, &f1_line, &f2_line)
            else {
                continue;
            };
            let mut idx = base_idx.to_vec();
            idx.push(j5);
            idx.sort_unstable();
            idx.dedup();
            try_type2(
                inst,
                set,
                &corners,
                &T2Checks {
                    corner_hits: vec![(corner_ray, v.clone()), (j5, w.clone())],
                    boundary: boundary.clone(),
                    free_pivot: None,
                },
                &format!("{case_prefix}, {label}"),
                idx,
            );
        }
    }

    // No ray pins the remaining facet: sweep its far vertex along the long
    // facet line in canonical order; all legal completions price equally.
    let completions = pivot_completions(
        f,
        y2,
        scan_base,
        scan_step,
        &y1.to_vec2(),
        Some(&f1_line),
    );
    let mut seen: Option<Vec<Rat>> = None;
    for pt in completions {
        *budget += 1;
        let Some(f2_line) = line_through(&y2q, &pt) else {
            continue;
        };
        let Some(corners) = triangle_from_lines(long_line, &f1_line, &f2_line)
        else {
            continue;
        };
        let gamma = try_type2(
            inst,
            set,
            &corners,
            &T2Checks {
                corner_hits: vec![(corner_ray, v.clone())],
                boundary: boundary.clone(),
                free_pivot: Some(y2.clone()),
            },
            &format!("{case_prefix}, free facet"),
            base_idx.to_vec(),
        );
        if let Some(g) = gamma {
            if let Some(prev) = &seen {
                debug_assert_eq!(
                    prev, &g,
                    "free-facet completions must price equally"
                );
            } else {
                seen = Some(g);
            }
        }
    }
}

/// Long facet on a cone-hull facet line, corner fractional: one ray points
/// to the corner shared by the long facet and a tilted facet, another hits
/// the long facet's interior.
fn type2_long_facet(inst: &Instance, set: &mut CandidateSet, budget: &mut usize) {
    let f = inst.f();
    let rays = inst.rays();
    let k = rays.len();
    for j1 in 0..k {
        for j2 in 0..k {
            if j1 == j2 {
                continue;
            }
            let Ok(lines) = hull_facet_lines(f, &rays[j1], &rays[j2]) else {
                continue;
            };
            for (n, off) in &lines {
                let Some((pi, c)) = oriented_away(n, off, f) else {
                    continue;
                };
                let pi_q = pi.to_vec2();
                let cq = Rat::from_integer(c.clone());
                let long_line = (pi_q.clone(), cq.clone());
                let Some(v) =
                    half_line_meets_line(f, &rays[j1], &pi_q, &cq, false)
                else {
                    continue;
                };
                let Some(p2) =
                    half_line_meets_line(f, &rays[j2], &pi_q, &cq, false)
                else {
                    continue;
                };
                if v == p2 {
                    continue;
                }
                // The long facet needs at least two lattice points between
                // the two hits.
                if segment_lattice_points(&v, &p2, false).len() < 2 {
                    continue;
                }
                let Ok(u) = (&p2 - &v).primitive_direction() else {
                    continue;
                };
                let z0 = lattice_on_line(&pi, &c);
                let sv = u.to_vec2().dot(&(&v - &z0.to_vec2()))
                    / Rat::from_integer(u.dot(&u));
                let m0 = ceil_int(&sv);
                let y3 = IVec2::new(&z0.x + &m0 * &u.x, &z0.y + &m0 * &u.y);
                let y4 = &y3 + &u;
                let a_level = &c - BigInt::one();
                for det in adjacent_pairs(
                    inst,
                    set,
                    &[j1, j2],
                    &y3,
                    &u,
                    &pi,
                    &a_level,
                    "type 2 long facet",
                ) {
                    let mut idx = vec![j1, j2];
                    idx.extend(det.extra_ray);
                    complete_type2(
                        inst,
                        set,
                        budget,
                        &long_line,
                        &v,
                        j1,
                        &det.y1,
                        &det.y2,
                        vec![
                            det.y1.clone(),
                            det.y2.clone(),
                            y3.clone(),
                            y4.clone(),
                        ],
                        &y4,
                        &u,
                        &format!("fractional corner, {}", det.case),
                        &idx,
                    );
                }
            }
        }
    }
}

/// Long facet with an integral corner: one ray points straight at a
/// lattice point that is a vertex of the triangle; the facet line is a
/// bounded hull facet of the two-ray cone incident to that point.
fn type2_integral_corner(
    inst: &Instance,
    set: &mut CandidateSet,
    budget: &mut usize,
) {
    let f = inst.f();
    let rays = inst.rays();
    let k = rays.len();
    for j1 in 0..k {
        let Some((q1, _)) = first_lattice_hit(f, &rays[j1]) else {
            continue;
        };
        for j2 in 0..k {
            if j1 == j2 {
                continue;
            }
            let Ok(lines) = hull_facet_lines(f, &rays[j1], &rays[j2]) else {
                continue;
            };
            for (n, off) in &lines {
                if &n.dot(&q1) != off {
                    continue; // only facet lines through the corner point
                }
                let Some((pi, c)) = oriented_away(n, off, f) else {
                    continue;
                };
                let pi_q = pi.to_vec2();
                let cq = Rat::from_integer(c.clone());
                let long_line = (pi_q.clone(), cq.clone());
                let vq = q1.to_vec2();
                let Some(p2) =
                    half_line_meets_line(f, &rays[j2], &pi_q, &cq, false)
                else {
                    continue;
                };
                if p2 == vq {
                    continue;
                }
                let Ok(u) = (&p2 - &vq).primitive_direction() else {
                    continue;
                };
                // The second hit must reach past the corner's lattice
                // neighbor so the long facet carries two lattice points.
                let s2 = u.to_vec2().dot(&(&p2 - &vq))
                    / Rat::from_integer(u.dot(&u));
                if s2 < Rat::one() {
                    continue;
                }
                let y1 = &q1 + &u;
                let a_level = &c - BigInt::one();
                for det in adjacent_pairs(
                    inst,
                    set,
                    &[j1, j2],
                    &q1,
                    &u,
                    &pi,
                    &a_level,
                    "type 2 integral corner",
                ) {
                    // Here the adjacent pair sits under the long facet:
                    // the lower point spans the facet ending at the
                    // integral corner, the upper point rides the third.
                    let (y4, y2) = (det.y1, det.y2);
                    let mut idx = vec![j1, j2];
                    idx.extend(det.extra_ray);
                    complete_type2(
                        inst,
                        set,
                        budget,
                        &long_line,
                        &vq,
                        j1,
                        &y4,
                        &y2,
                        vec![q1.clone(), y1.clone(), y2.clone(), y4.clone()],
                        &y1,
                        &u,
                        &format!("integral corner, {}", det.case),
                        &idx,
                    );
                }
            }
        }
    }
}

/// Long facet spanned by hull vertices of two tilted rays: the adjacent
/// pair construction walks a unit band transverse to the facet.
fn type2_tilted_pair(inst: &Instance, set: &mut CandidateSet, budget: &mut usize) {
    let f = inst.f();
    let rays = inst.rays();
    let k = rays.len();
    for j1 in 0..k {
        for j2 in 0..k {
            if j2 == j1 {
                continue;
            }
            let Ok(y1cands) = hull_vertex_candidates(f, &rays[j1], &rays[j2])
            else {
                continue;
            };
            for j3 in 0..k {
                if j3 == j1 || j3 == j2 {
                    continue;
                }
                let Ok(y3cands) =
                    hull_vertex_candidates(f, &rays[j1], &rays[j3])
                else {
                    continue;
                };
                for y1 in &y1cands {
                    for y3 in &y3cands {
                        type2_tilted_pair_core(
                            inst, set, budget, j1, j2, j3, y1, y3,
                        );
                    }
                }
            }
        }
    }
}

/// Core of the tilted-pair construction for one choice of lattice points.
#[allow(clippy::too_many_arguments)]
fn type2_tilted_pair_core(
    inst: &Instance,
    set: &mut CandidateSet,
    budget: &mut usize,
    j1: usize,
    j2: usize,
    j3: usize,
    y1: &IVec2,
    y3: &IVec2,
) {
    let f = inst.f();
    let rays = inst.rays();
    let w = y3 - y1;
    if w.is_zero() {
        return;
    }
    let Ok(wp) = w.primitive() else { return };
    if wp != w {
        return; // consecutive lattice points differ by a primitive step
    }
    let n0 = w.perp();
    let nf = n0.dot_q(f);
    let ny = Rat::from_integer(n0.dot(y1));
    let n = match nf.cmp(&ny) {
        Ordering::Less => n0,
        Ordering::Greater => -&n0,
        Ordering::Equal => return,
    };
    let nu0 = n.dot(y1);
    // `f` must lie beyond the lattice line adjacent to the pair, else the
    // pair cannot straddle the region between `f` and the far facet.
    let adj = &nu0 - BigInt::one();
    if n.dot_q(f) >= Rat::from_integer(adj.clone()) {
        return;
    }
    let nq = n.to_vec2();
    let adj_q = Rat::from_integer(adj);
    let scan = unit_bands_containing(y1, &w, f, BAND_SCAN_CAP);
    if scan.truncated {
        set.note(format!(
            "type 2 tilted pair: band family through {:?} truncated",
            y1
        ));
    }
    for (nb, e) in scan.members {
        let Some(y2) = line_intersection(
            &nb.to_vec2(),
            &Rat::from_integer(e),
            &nq,
            &adj_q,
        )
        .and_then(|p| p.to_lattice()) else {
            continue;
        };
        let y4 = &y2 + &w;
        let Some(f3_line) = line_through(&y3.to_vec2(), &y4.to_vec2()) else {
            continue;
        };
        let Some(v) =
            half_line_meets_line(f, &rays[j1], &f3_line.0, &f3_line.1, false)
        else {
            continue;
        };
        let Some(f1_line) = line_through(&v, &y1.to_vec2()) else {
            continue;
        };

        // The second tilted ray pins the remaining corner...
        *budget += 1;
        if let Some(apex) =
            half_line_meets_line(f, &rays[j2], &f1_line.0, &f1_line.1, false)
        {
            if let Some(f2_line) = line_through(&apex, &y2.to_vec2()) {
                if let Some(corners) =
                    triangle_from_lines(&f3_line, &f1_line, &f2_line)
                {
                    try_type2(
                        inst,
                        set,
                        &corners,
                        &T2Checks {
                            corner_hits: vec![
                                (j1, v.clone()),
                                (j2, apex.clone()),
                            ],
                            boundary: vec![
                                y1.clone(),
                                y2.clone(),
                                y3.clone(),
                                y4.clone(),
                            ],
                            free_pivot: None,
                        },
                        "tilted pair, corner ray",
                        vec![j1, j2, j3],
                    );
                }
            }
        }

        // ... or the facet through the adjacent pair's second point is
        // free and swept canonically along the far facet line.
        let step = &y4 - y3;
        let completions = pivot_completions(
            f,
            &y2,
            &y4,
            &step,
            &y1.to_vec2(),
            Some(&f1_line),
        );
        let mut seen: Option<Vec<Rat>> = None;
        for pt in completions {
            *budget += 1;
            let Some(f2_line) = line_through(&y2.to_vec2(), &pt) else {
                continue;
            };
            let Some(corners) =
                triangle_from_lines(&f3_line, &f1_line, &f2_line)
            else {
                continue;
            };
            let gamma = try_type2(
                inst,
                set,
                &corners,
                &T2Checks {
                    corner_hits: vec![(j1, v.clone())],
                    boundary: vec![
                        y1.clone(),
                        y2.clone(),
                        y3.clone(),
                        y4.clone(),
                    ],
                    free_pivot: Some(y2.clone()),
                },
                "tilted pair, free facet",
                vec![j1, j2, j3],
            );
            if let Some(g) = gamma {
                if let Some(prev) = &seen {
                    debug_assert_eq!(
                        prev, &g,
                        "free-facet completions must price equally"
                    );
                } else {
                    seen = Some(g);
                }
            }
        }
    }
}

/// Every facet pinned by a ray: four rays fix the four lattice points of
/// an area-one parallelogram, which determines the triangle outright.
fn type2_ray_quadruple(
    inst: &Instance,
    set: &mut CandidateSet,
    budget: &mut usize,
) {
    let f = inst.f();
    let rays = inst.rays();
    let k = rays.len();
    for j1 in 0..k {
        for j2 in 0..k {
            if j2 == j1 {
                continue;
            }
            let Ok(y1cands) = hull_vertex_candidates(f, &rays[j1], &rays[j2])
            else {
                continue;
            };
            for j3 in 0..k {
                if j3 == j1 || j3 == j2 {
                    continue;
                }
                let Ok(y3cands) =
                    hull_vertex_candidates(f, &rays[j1], &rays[j3])
                else {
                    continue;
                };
                for j4 in 0..k {
                    if j4 == j1 || j4 == j2 || j4 == j3 {
                        continue;
                    }
                    let Ok(y2cands) =
                        hull_vertex_candidates(f, &rays[j2], &rays[j4])
                    else {
                        continue;
                    };
                    for y1 in &y1cands {
                        for y3 in &y3cands {
                            for y2 in &y2cands {
                                *budget += 1;
                                type2_quadruple_core(
                                    inst,
                                    set,
                                    [j1, j2, j3, j4],
                                    y1,
                                    y2,
                                    y3,
                                );
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Builds the parallelogram-determined triangle for one point choice.
fn type2_quadruple_core(
    inst: &Instance,
    set: &mut CandidateSet,
    idx: [usize; 4],
    y1: &IVec2,
    y2: &IVec2,
    y3: &IVec2,
) {
    let f = inst.f();
    let rays = inst.rays();
    let w = y3 - y1;
    let d21 = y2 - y1;
    if w.is_zero() || d21.is_zero() {
        return;
    }
    // The four points close an area-one parallelogram.
    let area = w.cross(&d21);
    if area.abs() != BigInt::one() {
        return;
    }
    let y4 = y3 + &d21;
    let Some(f3_line) = line_through(&y3.to_vec2(), &y4.to_vec2()) else {
        return;
    };
    let Some(v) =
        half_line_meets_line(f, &rays[idx[0]], &f3_line.0, &f3_line.1, false)
    else {
        return;
    };
    let Some(f1_line) = line_through(&v, &y1.to_vec2()) else {
        return;
    };
    let Some(apex) =
        half_line_meets_line(f, &rays[idx[1]], &f1_line.0, &f1_line.1, false)
    else {
        return;
    };
    let Some(f2_line) = line_through(&apex, &y2.to_vec2()) else {
        return;
    };
    let Some(corners) = triangle_from_lines(&f3_line, &f1_line, &f2_line)
    else {
        return;
    };
    try_type2(
        inst,
        set,
        &corners,
        &T2Checks {
            corner_hits: vec![(idx[0], v.clone()), (idx[1], apex.clone())],
            boundary: vec![y1.clone(), y2.clone(), y3.clone(), y4.clone()],
            free_pivot: None,
        },
        "ray quadruple",
        idx.to_vec(),
    );
}

// ---------------------------------------------------------------------------
// Quadrilaterals
// ---------------------------------------------------------------------------

/// Quadrilateral candidates: the integral-hit certificate plus pinned
/// reconstructions from every ray quadruple and hull vertices of the four
/// adjacent cones; only uniquely-determined quadrilaterals qualify.
pub fn enumerate_quadrilaterals(inst: &Instance) -> CandidateSet {
    let f = inst.f();
    let rays = inst.rays();
    let k = rays.len();
    let mut set = CandidateSet::new();
    push_integral_hit(inst, &mut set, Family::Quadrilateral);
    let mut budget: usize = 1;
    for combo in combinations(k, 4) {
        let Some(ord) = ccw_index_order(&combo, rays) else {
            continue;
        };
        let Some(cands) = sector_hull_candidates(f, rays, &ord) else {
            continue;
        };
        let ray_vec: Vec<Vec2> = ord.iter().map(|&i| rays[i].clone()).collect();
        for tuple in cartesian(&cands) {
            budget += 1;
            let solve =
                match quadrilateral_from_rays_and_points(f, &ray_vec, &tuple) {
                    Ok(s) => s,
                    Err(_) => continue,
                };
            let body = match solve {
                QuadSolve::Unique(b) => b,
                QuadSolve::Underdetermined(_) => {
                    set.note(format!(
                        "pinned quadrilateral on rays {:?} underdetermined (ratio condition fails); excluded",
                        combo
                    ));
                    continue;
                }
                QuadSolve::Infeasible => continue,
            };
            let Ok(cls) = body.classify() else {
                continue;
            };
            if cls.tag != BodyTag::Quadrilateral {
                continue;
            }
            let mut bpts: Vec<IVec2> =
                cls.facet_points.iter().flatten().cloned().collect();
            bpts.sort_by(cmp_ivec2);
            bpts.dedup();
            let mut chosen = tuple.clone();
            chosen.sort_by(cmp_ivec2);
            chosen.dedup();
            if bpts != chosen {
                continue;
            }
            if !quad_ratio_holds(&body, &tuple) {
                set.note(format!(
                    "unique pinned quadrilateral on rays {:?} failed the ratio re-check; skipped",
                    combo
                ));
                continue;
            }
            let gamma = body.gamma(rays);
            let ineq = Inequality {
                gamma,
                certificate: body,
                family: Family::Quadrilateral,
            };
            if verify_certificate(&ineq, rays) {
                set.insert(
                    ineq,
                    Provenance {
                        family: Family::Quadrilateral,
                        case: "four corner rays".into(),
                        rays: combo.clone(),
                    },
                );
            }
        }
    }
    set.canonicalize();
    assert!(
        set.len() <= budget,
        "quadrilateral candidate count exceeds its bound"
    );
    set
}

/// Re-checks the edge-ratio uniqueness condition on an emitted
/// quadrilateral: aligns the body's vertices with the pinned points and
/// evaluates the four-edge ratio product.
fn quad_ratio_holds(body: &Body, points: &[IVec2]) -> bool {
    let verts = body.vertices();
    if verts.len() != 4 {
        return false;
    }
    let on_segment = |a: &Vec2, b: &Vec2, p: &Vec2| -> bool {
        let d = b - a;
        let w = p - a;
        if !d.cross(&w).is_zero() {
            return false;
        }
        let t = w.dot(&d) / d.dot(&d);
        !t.is_negative() && t <= Rat::one()
    };
    for o in 0..4 {
        let aligned = (0..4).all(|i| {
            on_segment(
                &verts[(o + i) % 4],
                &verts[(o + i + 1) % 4],
                &points[i].to_vec2(),
            )
        });
        if !aligned {
            continue;
        }
        let corners: Vec<Vec2> =
            (0..4).map(|i| verts[(o + i) % 4].clone()).collect();
        return matches!(ratio_condition(body, &corners, points), Ok(true));
    }
    false
}

// ---------------------------------------------------------------------------
// Unions
// ---------------------------------------------------------------------------

/// Candidates of a single family.
pub fn enumerate_family(inst: &Instance, family: Family) -> CandidateSet {
    match family {
        Family::Split => enumerate_splits(inst),
        Family::Type1 => enumerate_type1(inst),
        Family::Type2 => enumerate_type2(inst),
        Family::Type3 => enumerate_type3(inst),
        Family::Quadrilateral => enumerate_quadrilaterals(inst),
    }
}

/// Union of all five candidate families.
pub fn enumerate_all(inst: &Instance) -> CandidateSet {
    let mut set = CandidateSet::new();
    for family in [
        Family::Split,
        Family::Type1,
        Family::Type2,
        Family::Type3,
        Family::Quadrilateral,
    ] {
        set.absorb(enumerate_family(inst, family));
    }
    set
}
