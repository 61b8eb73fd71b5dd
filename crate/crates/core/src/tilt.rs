//! Tilting: certified perturbations of lattice-free bodies.
//!
//! A tilt moves every row of a body `B` by `eps * a_i` for a matrix `A` of
//! per-row directions chosen so that, for all small `eps`, the prices
//! decompose as `gamma(B) = (gamma(B + eps A) + gamma(B - eps A)) / 2` with
//! both perturbed bodies still lattice-free. An inequality admitting such
//! a decomposition is a midpoint of two other valid inequalities and can
//! never be a facet, so tilting is the pruning engine of the whole
//! pipeline: it eliminates triangles whose lattice points can slide along
//! an edge and reduces triangles with a long multi-point edge to
//! dominating bodies with exactly three boundary lattice points.
//!
//! Admissible directions form the nullspace of a linear system that pins
//! chosen lattice points to their facets and keeps the rows active on each
//! ray balanced; [`nullspace_basis`] computes that space and
//! [`find_tilt_epsilon`] certifies an exact magnitude below every failure
//! threshold. [`triangle_from_rays_and_points`] and
//! [`quadrilateral_from_rays_and_points`] solve the inverse problem —
//! rebuilding a body from its corner rays and pinned lattice points — and
//! [`ratio_condition`] decides when that rebuild is unique for
//! quadrilaterals.

use crate::body::{Body, BodyTag, Facet, RayHit};
use crate::error::Error;
use crate::geom::{cmp_ccw, strictly_between_ccw, IVec2, Vec2};
use crate::instance::Instance;
use crate::linalg::{solve_2x2, solve_or_nullspace, LinearSolution, Mat};
use crate::rat::{ceil_int, floor_int, rat, ratio, Rat};
use crate::Result;
use num::{BigInt, One, Signed, Zero};

/// Per-row lists of lattice points pinned to their facets during a tilt.
///
/// List `i` holds boundary lattice points that must stay on the hyperplane
/// of row `i`; together the lists must reach every lattice point of the
/// body, so that no boundary point can fall into the interior of a
/// perturbed copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    lists: Vec<Vec<IVec2>>,
}

impl Cover {
    pub fn new(lists: Vec<Vec<IVec2>>) -> Cover {
        Cover { lists }
    }

    pub fn lists(&self) -> &[Vec<IVec2>] {
        &self.lists
    }

    /// The maximal cover: every lattice point of each facet listed under
    /// the facet's defining row. Rows defining no facet get empty lists.
    pub fn full(b: &Body) -> Cover {
        let mut lists = vec![Vec::new(); b.rows().len()];
        for fc in b.facets() {
            lists[fc.row] = fc.points.clone();
        }
        Cover { lists }
    }
}

/// A tilt direction together with a certified magnitude: every `eps` with
/// `0 < eps <= delta` preserves active rows, decomposes the prices, and
/// keeps both perturbed bodies lattice-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TiltDirection {
    pub a_bar: Vec<Vec2>,
    pub delta: Rat,
}

/// The body with rows `b_i + eps * a_i`.
pub fn tilt_body(b: &Body, a_bar: &[Vec2], eps: &Rat) -> Result<Body> {
    if a_bar.len() != b.rows().len() {
        return Err(Error::DimensionMismatch(format!(
            "tilt direction has {} rows for a body with {}",
            a_bar.len(),
            b.rows().len()
        )));
    }
    let rows = b
        .rows()
        .iter()
        .zip(a_bar)
        .map(|(row, a)| row + &a.scale(eps))
        .collect();
    Body::new(b.f().clone(), rows)
}

fn pack_rows(flat: &[Rat]) -> Vec<Vec2> {
    flat.chunks(2)
        .map(|c| Vec2::new(c[0].clone(), c[1].clone()))
        .collect()
}

/// Basis of the space of tilt directions compatible with `cover` and
/// `rays`: each covered point stays on its row's hyperplane, and on every
/// ray all active rows keep a common value. Returned as a list of per-row
/// direction matrices.
pub fn nullspace_basis(
    b: &Body,
    cover: &Cover,
    rays: &[Vec2],
) -> Result<Vec<Vec<Vec2>>> {
    let n = b.rows().len();
    if cover.lists.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "cover has {} lists for a body with {} rows",
            cover.lists.len(),
            n
        )));
    }
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for (i, ys) in cover.lists.iter().enumerate() {
        for y in ys {
            let d = &y.to_vec2() - b.f();
            let mut row = vec![Rat::zero(); 2 * n];
            row[2 * i] = d.x;
            row[2 * i + 1] = d.y;
            rows.push(row);
        }
    }
    for r in rays {
        let act = b.active_rows(r);
        for w in act.windows(2) {
            let mut row = vec![Rat::zero(); 2 * n];
            row[2 * w[0]] = r.x.clone();
            row[2 * w[0] + 1] = r.y.clone();
            row[2 * w[1]] = -r.x.clone();
            row[2 * w[1] + 1] = -r.y.clone();
            rows.push(row);
        }
    }
    if rows.is_empty() {
        let mut basis = Vec::new();
        for k in 0..2 * n {
            let mut flat = vec![Rat::zero(); 2 * n];
            flat[k] = Rat::one();
            basis.push(pack_rows(&flat));
        }
        return Ok(basis);
    }
    let rhs = vec![Rat::zero(); rows.len()];
    let m = Mat::from_rows(rows);
    match solve_or_nullspace(&m, &rhs) {
        LinearSolution::Unique(_) => Ok(Vec::new()),
        LinearSolution::Affine { nullspace, .. } => {
            Ok(nullspace.iter().map(|v| pack_rows(v)).collect())
        }
        LinearSolution::Infeasible => Err(Error::Internal(
            "homogeneous tilt system reported infeasible".into(),
        )),
    }
}

/// Direct membership test for the tilt nullspace.
fn satisfies_tilt_equations(
    b: &Body,
    cover: &Cover,
    rays: &[Vec2],
    a_bar: &[Vec2],
) -> bool {
    for (i, ys) in cover.lists.iter().enumerate() {
        for y in ys {
            let d = &y.to_vec2() - b.f();
            if !a_bar[i].dot(&d).is_zero() {
                return false;
            }
        }
    }
    for r in rays {
        let act = b.active_rows(r);
        for w in act.windows(2) {
            if a_bar[w[0]].dot(r) != a_bar[w[1]].dot(r) {
                return false;
            }
        }
    }
    true
}

fn tighten(delta: &mut Option<Rat>, bound: Rat) {
    let better = match delta {
        Some(d) => bound < *d,
        None => true,
    };
    if better {
        *delta = Some(bound);
    }
}

/// All lattice points in the square `|x - f|_inf <= radius`.
fn lattice_box(f: &Vec2, radius: &Rat) -> Vec<IVec2> {
    let x0 = ceil_int(&(&f.x - radius));
    let x1 = floor_int(&(&f.x + radius));
    let y0 = ceil_int(&(&f.y - radius));
    let y1 = floor_int(&(&f.y + radius));
    let mut out = Vec::new();
    let mut x = x0;
    while x <= x1 {
        let mut y = y0.clone();
        while y <= y1 {
            out.push(IVec2::new(x.clone(), y.clone()));
            y += BigInt::one();
        }
        x += BigInt::one();
    }
    out
}

/// Certifies a tilt magnitude for a direction in the nullspace.
///
/// The returned `delta` satisfies, for every `eps` with `0 < eps <=
/// delta`: the rows active on each instance ray are unchanged in both
/// `B + eps A` and `B - eps A`; the prices decompose exactly as
/// `gamma(B) = (gamma(B + eps A) + gamma(B - eps A)) / 2`; and both
/// perturbed bodies are bounded and lattice-free.
///
/// Three exact thresholds are intersected: a bound keeping inactive rows
/// strictly inactive on every ray; `1 / (2 rho alpha)` — where `rho` is
/// the vertex radius of the body around `f` and `alpha` the largest row of
/// `A` in the 1-norm — which traps both perturbed bodies inside the square
/// of radius `2 rho`, certifying boundedness and confining any newly
/// captured lattice point to that square; and, for each lattice point of
/// the square outside the body, the exact magnitude at which it could
/// first enter. Half the minimum is returned after a mandatory exact
/// re-check of all guarantees at half the returned value.
pub fn find_tilt_epsilon(
    b: &Body,
    a_bar: &[Vec2],
    inst: &Instance,
    cover: &Cover,
) -> Result<Rat> {
    let n = b.rows().len();
    if a_bar.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "tilt direction has {} rows for a body with {}",
            a_bar.len(),
            n
        )));
    }
    if cover.lists.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "cover has {} lists for a body with {} rows",
            cover.lists.len(),
            n
        )));
    }
    if inst.f() != b.f() {
        return Err(Error::InvalidInstance(
            "instance anchor differs from body anchor".into(),
        ));
    }
    if !b.is_bounded() {
        return Err(Error::UnboundedNonSplit);
    }
    if !b.is_lattice_free()? {
        return Err(Error::HypothesisViolated(
            "body has an interior lattice point".into(),
        ));
    }
    for (i, ys) in cover.lists.iter().enumerate() {
        for y in ys {
            let yq = y.to_vec2();
            let d = &yq - b.f();
            if b.rows()[i].dot(&d) != Rat::one() || !b.contains(&yq) {
                return Err(Error::HypothesisViolated(format!(
                    "cover point ({}, {}) is not on the facet of row {}",
                    y.x, y.y, i
                )));
            }
        }
    }
    for y in b.lattice_points()? {
        if !cover.lists.iter().any(|ys| ys.contains(&y)) {
            return Err(Error::CoverIncomplete);
        }
    }
    if a_bar.iter().all(|a| a.x.is_zero() && a.y.is_zero()) {
        return Err(Error::NotInNullspace);
    }
    if !satisfies_tilt_equations(b, cover, inst.rays(), a_bar) {
        return Err(Error::NotInNullspace);
    }

    let mut delta: Option<Rat> = None;

    // Active rows must stay strictly ahead of inactive rows on each ray:
    // with g the exact gap and h the perturbation rate, both signs of the
    // tilt survive any eps < g / |h|.
    for r in inst.rays() {
        let act = b.active_rows(r);
        let top = b.rows()[act[0]].dot(r);
        let a_top = a_bar[act[0]].dot(r);
        for (i, row) in b.rows().iter().enumerate() {
            if act.contains(&i) {
                continue;
            }
            let g = &top - &row.dot(r);
            let h = &a_top - &a_bar[i].dot(r);
            if !h.is_zero() {
                tighten(&mut delta, &g / &h.abs());
            }
        }
    }

    // Boundedness: below 1 / (2 rho alpha) the perturbed gauge of any
    // direction is at least half the original, trapping both bodies in
    // the square of radius 2 rho around f.
    let rho = b
        .vertices()
        .iter()
        .map(|v| {
            let d = v - b.f();
            d.x.abs().max(d.y.abs())
        })
        .max()
        .expect("bounded body has vertices");
    let alpha = a_bar
        .iter()
        .map(|a| a.x.abs() + a.y.abs())
        .max()
        .expect("nonempty rows");
    let two_rho = rat(2) * &rho;
    tighten(&mut delta, Rat::one() / (&two_rho * &alpha));

    // Capture thresholds: a lattice point outside the body enters a
    // perturbed copy no sooner than the largest of its per-row entering
    // magnitudes, taken over the rows it currently violates.
    for y in lattice_box(b.f(), &two_rho) {
        let d = &y.to_vec2() - b.f();
        let violated: Vec<(Rat, Rat)> = b
            .rows()
            .iter()
            .zip(a_bar)
            .filter_map(|(row, a)| {
                let g = row.dot(&d) - Rat::one();
                if g.is_positive() {
                    Some((g, a.dot(&d)))
                } else {
                    None
                }
            })
            .collect();
        if violated.is_empty() {
            continue;
        }
        for sign in [1i64, -1] {
            let s = rat(sign);
            let mut never_enters = false;
            let mut entry = Rat::zero();
            for (g, h) in &violated {
                let sh = &s * h;
                if sh >= Rat::zero() {
                    never_enters = true;
                    break;
                }
                let t = g / &(-sh);
                if t > entry {
                    entry = t;
                }
            }
            if !never_enters {
                tighten(&mut delta, entry);
            }
        }
    }

    let delta = delta.expect("boundedness threshold always applies") / rat(2);

    // Mandatory exact re-verification at half the returned magnitude.
    let eps = &delta / &rat(2);
    let plus = tilt_body(b, a_bar, &eps)?;
    let minus = tilt_body(b, a_bar, &(-&eps))?;
    for r in inst.rays() {
        let act = b.active_rows(r);
        if plus.active_rows(r) != act || minus.active_rows(r) != act {
            return Err(Error::Internal(
                "tilt verification: active rows changed".into(),
            ));
        }
    }
    let half = ratio(1, 2);
    let g0 = b.gamma(inst.rays());
    let gp = plus.gamma(inst.rays());
    let gm = minus.gamma(inst.rays());
    for ((base, up), down) in g0.iter().zip(&gp).zip(&gm) {
        if *base != &half * up + &half * down {
            return Err(Error::Internal(
                "tilt verification: prices fail to decompose".into(),
            ));
        }
    }
    if !plus.is_lattice_free()? || !minus.is_lattice_free()? {
        return Err(Error::Internal(
            "tilt verification: perturbed body captured a lattice point"
                .into(),
        ));
    }
    Ok(delta)
}

/// Tilts one facet carrying a single lattice point about that point.
///
/// The facet of `row` must contain exactly one lattice point, in its
/// relative interior; every instance ray meeting the facet must do so in
/// the relative interior; and at least one such meeting point must be
/// non-integral. Returns the two perturbed bodies — whose prices average
/// back to the original, strictly differing in at least one coordinate —
/// plus the smallest index of a ray witnessing the strict difference.
pub fn single_facet_tilt(
    b: &Body,
    row: usize,
    inst: &Instance,
) -> Result<(Body, Body, usize)> {
    if inst.f() != b.f() {
        return Err(Error::InvalidInstance(
            "instance anchor differs from body anchor".into(),
        ));
    }
    if !b.is_bounded() {
        return Err(Error::UnboundedNonSplit);
    }
    let facets = b.facets();
    let fc = facets
        .iter()
        .find(|fc| fc.row == row)
        .ok_or_else(|| {
            Error::HypothesisViolated(format!(
                "row {row} defines no bounded facet"
            ))
        })?;
    if fc.points.len() != 1 {
        return Err(Error::HypothesisViolated(format!(
            "facet of row {row} carries {} lattice points, need exactly one",
            fc.points.len()
        )));
    }
    let y = fc.points[0].clone();
    if fc.relint_points != vec![y.clone()] {
        return Err(Error::HypothesisViolated(
            "the facet lattice point sits on a facet endpoint".into(),
        ));
    }
    let mut witness: Option<usize> = None;
    for (j, r) in inst.rays().iter().enumerate() {
        let act = b.active_rows(r);
        if !act.contains(&row) {
            continue;
        }
        if act.len() > 1 {
            return Err(Error::HypothesisViolated(format!(
                "ray {} meets a corner of the tilted facet",
                j + 1
            )));
        }
        if let RayHit::Point(p) = b.ray_hit(r) {
            if p.to_lattice().is_none() && witness.is_none() {
                witness = Some(j);
            }
        }
    }
    let witness = witness.ok_or_else(|| {
        Error::HypothesisViolated(
            "no ray meets the tilted facet at a non-lattice point".into(),
        )
    })?;

    let mut lists = vec![Vec::new(); b.rows().len()];
    for other in &facets {
        lists[other.row] = if other.row == row {
            vec![y.clone()]
        } else {
            other.points.clone()
        };
    }
    let cover = Cover::new(lists);

    let mut a_bar = vec![Vec2::zero(); b.rows().len()];
    a_bar[row] = (&y.to_vec2() - b.f()).perp();
    let delta = find_tilt_epsilon(b, &a_bar, inst, &cover)?;
    let eps = &delta / &rat(2);
    let plus = tilt_body(b, &a_bar, &eps)?;
    let minus = tilt_body(b, &a_bar, &(-&eps))?;
    if plus.gamma(inst.rays()) == minus.gamma(inst.rays()) {
        return Err(Error::Internal(
            "single-facet tilt failed to separate prices".into(),
        ));
    }
    Ok((plus, minus, witness))
}

/// Decides uniqueness of a quadrilateral pinned at its corner hits.
///
/// `corners` lists the four vertices met by the corner rays in cyclic
/// order and `points` the lattice point on the edge from each corner to
/// the next. Writing each lattice point as the affine combination
/// `y_i = u * p_i + v * p_{i+1}`, the edge ratio is `v / u`; the pinned
/// reconstruction is unique exactly when the product of the four ratios
/// differs from one, which this returns.
pub fn ratio_condition(
    quad: &Body,
    corners: &[Vec2],
    points: &[IVec2],
) -> Result<bool> {
    if corners.len() != 4 || points.len() != 4 {
        return Err(Error::DimensionMismatch(
            "need four corner hits and four lattice points".into(),
        ));
    }
    let cls = quad.classify()?;
    if cls.tag != BodyTag::Quadrilateral {
        return Err(Error::HypothesisViolated(
            "body is not a maximal lattice-free quadrilateral".into(),
        ));
    }
    for p in corners {
        if !quad.vertices().contains(p) {
            return Err(Error::HypothesisViolated(
                "corner hit is not a vertex of the body".into(),
            ));
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if corners[i] == corners[j] {
                return Err(Error::HypothesisViolated(
                    "corner hits must be distinct vertices".into(),
                ));
            }
        }
    }
    let f = quad.f();
    let mut product = Rat::one();
    for i in 0..4 {
        let p1 = &corners[i] - f;
        let p2 = &corners[(i + 1) % 4] - f;
        let yd = &points[i].to_vec2() - f;
        let (u, v) =
            solve_2x2(&p1, &p2, &yd).ok_or(Error::SingularSystem)?;
        if !u.is_positive() || !v.is_positive() || &u + &v != Rat::one() {
            return Err(Error::HypothesisViolated(format!(
                "lattice point {} is not between corner hits {} and {}",
                i + 1,
                i + 1,
                (i + 1) % 4 + 1
            )));
        }
        product = product * (v / u);
    }
    Ok(product != Rat::one())
}

/// Rays sorted counter-clockwise with every consecutive sector strictly
/// below a half turn — the geometry needed for unambiguous sector
/// assignment of lattice points.
fn ccw_spanning<'a>(rays: &'a [Vec2]) -> Option<Vec<&'a Vec2>> {
    let mut s: Vec<&Vec2> = rays.iter().collect();
    s.sort_by(|a, b| cmp_ccw(a, b));
    let k = s.len();
    for i in 0..k {
        if !s[i].cross(s[(i + 1) % k]).is_positive() {
            return None;
        }
    }
    Some(s)
}

/// Assigns each lattice point to the unique ray sector containing it;
/// `None` if a point sits on a ray or two points share a sector.
fn assign_sectors<'a>(
    f: &Vec2,
    s: &[&Vec2],
    points: &'a [IVec2],
) -> Option<Vec<&'a IVec2>> {
    let k = s.len();
    let mut assigned: Vec<Option<&IVec2>> = vec![None; k];
    for y in points {
        let d = &y.to_vec2() - f;
        let mut placed = false;
        for i in 0..k {
            if strictly_between_ccw(s[i], s[(i + 1) % k], &d) {
                if assigned[i].is_some() {
                    return None;
                }
                assigned[i] = Some(y);
                placed = true;
                break;
            }
        }
        if !placed {
            return None;
        }
    }
    assigned.into_iter().collect()
}

/// The pinned-reconstruction system: row `i` must price lattice point
/// `y_i` at one, and consecutive rows must agree on the ray separating
/// their sectors.
fn corner_point_system(
    f: &Vec2,
    s: &[&Vec2],
    ys: &[&IVec2],
) -> (Mat, Vec<Rat>) {
    let k = s.len();
    let mut rows = Vec::with_capacity(2 * k);
    let mut rhs = Vec::with_capacity(2 * k);
    for i in 0..k {
        let d = &ys[i].to_vec2() - f;
        let mut row = vec![Rat::zero(); 2 * k];
        row[2 * i] = d.x;
        row[2 * i + 1] = d.y;
        rows.push(row);
        rhs.push(Rat::one());
        let j = (i + 1) % k;
        let mut row = vec![Rat::zero(); 2 * k];
        row[2 * i] = s[j].x.clone();
        row[2 * i + 1] = s[j].y.clone();
        row[2 * j] = -s[j].x.clone();
        row[2 * j + 1] = -s[j].y.clone();
        rows.push(row);
        rhs.push(Rat::zero());
    }
    (Mat::from_rows(rows), rhs)
}

fn body_from_solution(f: &Vec2, flat: &[Rat]) -> Result<Body> {
    Body::new(f.clone(), pack_rows(flat))
}

/// Exact post-checks on a reconstruction: bounded, each pinned point in
/// the relative interior of its row's facet, each ray meeting a vertex.
fn validate_reconstruction(
    body: &Body,
    s: &[&Vec2],
    ys: &[&IVec2],
) -> Result<()> {
    if !body.is_bounded() {
        return Err(Error::PostValidation(
            "reconstructed body is unbounded".into(),
        ));
    }
    let facets = body.facets();
    for (i, y) in ys.iter().enumerate() {
        let fc = facets.iter().find(|fc| fc.row == i).ok_or_else(|| {
            Error::PostValidation(format!(
                "row {} defines no facet of the reconstruction",
                i + 1
            ))
        })?;
        if !fc.relint_points.contains(y) {
            return Err(Error::PostValidation(format!(
                "lattice point {} is not inside its facet",
                i + 1
            )));
        }
    }
    for r in s {
        match body.ray_hit(r) {
            RayHit::Point(p) if body.vertices().contains(&p) => {}
            _ => {
                return Err(Error::PostValidation(
                    "a corner ray misses the reconstruction's vertices"
                        .into(),
                ))
            }
        }
    }
    Ok(())
}

/// Rebuilds the triangle whose corners are hit by three rays from `f` and
/// whose edges pass through three given lattice points, one per sector.
pub fn triangle_from_rays_and_points(
    f: &Vec2,
    rays: &[Vec2],
    points: &[IVec2],
) -> Result<Body> {
    if rays.len() != 3 || points.len() != 3 {
        return Err(Error::DimensionMismatch(
            "need exactly three rays and three lattice points".into(),
        ));
    }
    let s = ccw_spanning(rays).ok_or(Error::SingularSystem)?;
    let ys = assign_sectors(f, &s, points).ok_or(Error::SingularSystem)?;
    let (m, rhs) = corner_point_system(f, &s, &ys);
    match solve_or_nullspace(&m, &rhs) {
        LinearSolution::Unique(x) => {
            let body = body_from_solution(f, &x).map_err(|_| {
                Error::PostValidation("degenerate facet normal".into())
            })?;
            validate_reconstruction(&body, &s, &ys)?;
            Ok(body)
        }
        _ => Err(Error::SingularSystem),
    }
}

/// Outcome of a pinned quadrilateral reconstruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadSolve {
    Unique(Body),
    /// The pinned system is degenerate; the directions along which the
    /// rows may slide are returned as per-row matrices.
    Underdetermined(Vec<Vec<Vec2>>),
    Infeasible,
}

/// Rebuilds a quadrilateral from four corner rays and the lattice point
/// pinned to each of the four edges.
pub fn quadrilateral_from_rays_and_points(
    f: &Vec2,
    rays: &[Vec2],
    points: &[IVec2],
) -> Result<QuadSolve> {
    if rays.len() != 4 || points.len() != 4 {
        return Err(Error::DimensionMismatch(
            "need exactly four rays and four lattice points".into(),
        ));
    }
    let s = match ccw_spanning(rays) {
        Some(s) => s,
        None => return Ok(QuadSolve::Infeasible),
    };
    let ys = match assign_sectors(f, &s, points) {
        Some(ys) => ys,
        None => return Ok(QuadSolve::Infeasible),
    };
    let (m, rhs) = corner_point_system(f, &s, &ys);
    match solve_or_nullspace(&m, &rhs) {
        LinearSolution::Unique(x) => {
            let body = body_from_solution(f, &x).map_err(|_| {
                Error::PostValidation("degenerate facet normal".into())
            })?;
            validate_reconstruction(&body, &s, &ys)?;
            Ok(QuadSolve::Unique(body))
        }
        LinearSolution::Affine { nullspace, .. } => Ok(
            QuadSolve::Underdetermined(
                nullspace.iter().map(|v| pack_rows(v)).collect(),
            ),
        ),
        LinearSolution::Infeasible => Ok(QuadSolve::Infeasible),
    }
}

/// Position of `p` along the closed segment from `a` to `b`, when the
/// three are collinear: `Some(t)` with `p = a + t (b - a)`.
fn segment_parameter(a: &Vec2, b: &Vec2, p: &Vec2) -> Option<Rat> {
    let d = b - a;
    let w = p - a;
    if !d.cross(&w).is_zero() {
        return None;
    }
    Some(w.dot(&d) / d.dot(&d))
}

/// Reduces a type 2 triangle to a dominating type 3 triangle.
///
/// The long edge is rotated about its lattice point nearest one endpoint
/// `v`, pushing the edge's other lattice points strictly outside while
/// every instance ray that meets the long edge does so on the closed
/// segment between `v` and the pivot — the hypothesis under which no
/// price can increase. Both endpoint labelings of every multi-point edge
/// are tried; if none satisfies the hypothesis the reduction fails with
/// [`Error::HypothesisViolated`].
pub fn type3_dominator(b: &Body, inst: &Instance) -> Result<Body> {
    if inst.f() != b.f() {
        return Err(Error::InvalidInstance(
            "instance anchor differs from body anchor".into(),
        ));
    }
    let cls = b.classify()?;
    if cls.tag != BodyTag::Type2 {
        return Err(Error::HypothesisViolated(
            "body is not a triangle of type 2".into(),
        ));
    }
    let facets = b.facets();
    let gamma0 = b.gamma(inst.rays());
    for fc in &facets {
        if fc.points.len() < 2 {
            continue;
        }
        for flip in [false, true] {
            let (v, pivot) = if flip {
                (&fc.ends.1, fc.relint_points.last().unwrap())
            } else {
                (&fc.ends.0, fc.relint_points.first().unwrap())
            };
            match try_dominator(b, inst, fc, v, pivot, &gamma0)? {
                Some(out) => return Ok(out),
                None => continue,
            }
        }
    }
    Err(Error::HypothesisViolated(
        "no edge labeling confines the ray hits next to a pivot".into(),
    ))
}

/// One labeling attempt for [`type3_dominator`]: rotate `fc` about
/// `pivot` away from `v`, then shrink the magnitude until the result is a
/// lattice-free type 3 triangle whose prices do not exceed `gamma0`.
fn try_dominator(
    b: &Body,
    inst: &Instance,
    fc: &Facet,
    v: &Vec2,
    pivot: &IVec2,
    gamma0: &[Rat],
) -> Result<Option<Body>> {
    let pivot_q = pivot.to_vec2();
    // Every ray meeting the rotated edge must hit the closed segment
    // between v and the pivot.
    for r in inst.rays() {
        if !b.active_rows(r).contains(&fc.row) {
            continue;
        }
        let p = match b.ray_hit(r) {
            RayHit::Point(p) => p,
            RayHit::RecessionDirection => return Ok(None),
        };
        match segment_parameter(v, &pivot_q, &p) {
            Some(t) if !t.is_negative() && t <= Rat::one() => {}
            _ => return Ok(None),
        }
    }

    let edge = &pivot_q - v;
    let mut a_row = (&pivot_q - b.f()).perp();
    let swing = a_row.dot(&edge);
    if swing.is_zero() {
        return Err(Error::Internal(
            "pivot direction degenerate against its edge".into(),
        ));
    }
    if swing.is_negative() {
        a_row = -&a_row;
    }
    let mut a_bar = vec![Vec2::zero(); b.rows().len()];
    a_bar[fc.row] = a_row;

    // Start below the one-sided capture and boundedness thresholds, then
    // halve until the exact acceptance checks pass.
    let rho = b
        .vertices()
        .iter()
        .map(|w| {
            let d = w - b.f();
            d.x.abs().max(d.y.abs())
        })
        .max()
        .expect("bounded body has vertices");
    let alpha = a_bar[fc.row].x.abs() + a_bar[fc.row].y.abs();
    let two_rho = rat(2) * &rho;
    let mut bound: Option<Rat> = Some(Rat::one() / (&two_rho * &alpha));
    for y in lattice_box(b.f(), &two_rho) {
        let d = &y.to_vec2() - b.f();
        let violated: Vec<(Rat, Rat)> = b
            .rows()
            .iter()
            .zip(&a_bar)
            .filter_map(|(row, a)| {
                let g = row.dot(&d) - Rat::one();
                if g.is_positive() {
                    Some((g, a.dot(&d)))
                } else {
                    None
                }
            })
            .collect();
        if violated.is_empty() {
            continue;
        }
        let mut never_enters = false;
        let mut entry = Rat::zero();
        for (g, h) in &violated {
            if *h >= Rat::zero() {
                never_enters = true;
                break;
            }
            let t = g / &(-h);
            if t > entry {
                entry = t;
            }
        }
        if !never_enters {
            tighten(&mut bound, entry);
        }
    }
    let mut eps = bound.expect("boundedness threshold always applies")
        / rat(2);
    for _ in 0..64 {
        let cand = tilt_body(b, &a_bar, &eps)?;
        let ok = cand.is_bounded()
            && cand.is_lattice_free()?
            && cand.classify()?.tag == BodyTag::Type3
            && cand
                .gamma(inst.rays())
                .iter()
                .zip(gamma0)
                .all(|(new, old)| new <= old);
        if ok {
            return Ok(Some(cand));
        }
        eps = eps / rat(2);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::rows_from_vertices;
    use crate::rat::ratio;

    fn v2(x: i64, y: i64) -> Vec2 {
        Vec2::from_ints(x, y)
    }

    fn vq(xn: i64, xd: i64, yn: i64, yd: i64) -> Vec2 {
        Vec2::new(ratio(xn, xd), ratio(yn, yd))
    }

    fn iv(x: i64, y: i64) -> IVec2 {
        IVec2::from_ints(x, y)
    }

    fn half_half() -> Vec2 {
        vq(1, 2, 1, 2)
    }

    /// conv{(0,0),(2,0),(0,2)} around f = (1/2, 1/2).
    fn corner_triangle() -> Body {
        Body::new(
            half_half(),
            vec![v2(-2, 0), v2(0, -2), v2(1, 1)],
        )
        .unwrap()
    }

    /// Type 2 triangle conv{(-1/2,0),(3/2,0),(1/2,2)} around (1/2,1/2):
    /// two lattice points inside the bottom edge.
    fn type2_triangle() -> Body {
        Body::new(
            half_half(),
            vec![v2(0, -2), vq(-4, 3, 2, 3), vq(4, 3, 2, 3)],
        )
        .unwrap()
    }

    /// Triangle with exactly three boundary lattice points and no
    /// integral vertex.
    fn type3_triangle() -> Body {
        let verts = vec![
            vq(4, 7, -1, 7),
            vq(11, 5, 2, 5),
            vq(-1, 3, 5, 3),
        ];
        let rows = rows_from_vertices(&half_half(), &verts);
        Body::new(half_half(), rows).unwrap()
    }

    /// The diamond |x1 - 1/2| + |x2 - 1/2| <= 1: edge ratios all one.
    fn diamond() -> Body {
        Body::new(
            half_half(),
            vec![v2(1, 1), v2(-1, 1), v2(-1, -1), v2(1, -1)],
        )
        .unwrap()
    }

    /// The diamond with its north-east edge re-sloped so one edge ratio
    /// becomes 2 while the others stay 1.
    fn perturbed_diamond() -> Body {
        Body::new(
            half_half(),
            vec![
                vq(4, 3, 2, 3),
                v2(-1, 1),
                v2(-1, -1),
                v2(1, -1),
            ],
        )
        .unwrap()
    }

    fn axis_instance() -> Instance {
        Instance::new(
            None,
            half_half(),
            vec![v2(1, 0), v2(0, 1), v2(-1, 0), v2(0, -1)],
        )
        .unwrap()
    }

    #[test]
    fn nullspace_of_pinned_triangle_rotates_one_facet() {
        let b = corner_triangle();
        let cover = Cover::new(vec![
            vec![iv(0, 1)],
            vec![iv(0, 0), iv(1, 0), iv(2, 0)],
            vec![iv(2, 0), iv(1, 1), iv(0, 2)],
        ]);
        let inst = axis_instance();
        let basis = nullspace_basis(&b, &cover, inst.rays()).unwrap();
        assert_eq!(basis.len(), 1);
        let a = &basis[0];
        // Rows 1 and 2 are pinned by two independent points each.
        assert_eq!(a[1], Vec2::zero());
        assert_eq!(a[2], Vec2::zero());
        // Row 0 may only rotate about (0,1): direction parallel to (1,1).
        assert!(!a[0].x.is_zero());
        assert_eq!(a[0].x, a[0].y);
    }

    #[test]
    fn full_cover_pins_every_boundary_point() {
        let b = corner_triangle();
        let cover = Cover::full(&b);
        let total: usize =
            cover.lists().iter().map(|l| l.len()).sum();
        // 8 closed facet points, corners double-counted.
        assert_eq!(total, 9);
        for y in b.lattice_points().unwrap() {
            assert!(cover.lists().iter().any(|l| l.contains(&y)));
        }
    }

    #[test]
    fn corner_rays_leave_a_tilt_direction_with_all_rows_moving() {
        let b = type3_triangle();
        let cover = Cover::full(&b);
        // Two corner rays toward two of the three fractional vertices.
        let inst = Instance::new(
            None,
            half_half(),
            vec![v2(1, -9), v2(17, -1)],
        )
        .unwrap();
        let basis = nullspace_basis(&b, &cover, inst.rays()).unwrap();
        assert_eq!(basis.len(), 1);
        for row in &basis[0] {
            assert_ne!(*row, Vec2::zero());
        }
    }

    #[test]
    fn diamond_nullspace_is_one_dimensional_with_corner_rays() {
        let b = diamond();
        let inst = axis_instance();
        let basis =
            nullspace_basis(&b, &Cover::full(&b), inst.rays()).unwrap();
        assert_eq!(basis.len(), 1);

        let p = perturbed_diamond();
        let rays = vec![v2(1, 7), v2(-1, 0), v2(0, -1), v2(5, -1)];
        let inst =
            Instance::new(None, half_half(), rays).unwrap();
        let basis =
            nullspace_basis(&p, &Cover::full(&p), inst.rays()).unwrap();
        assert_eq!(basis.len(), 0);
    }

    #[test]
    fn certified_epsilon_on_the_corner_triangle() {
        let b = corner_triangle();
        let cover = Cover::new(vec![
            vec![iv(0, 1)],
            vec![iv(0, 0), iv(1, 0), iv(2, 0)],
            vec![iv(2, 0), iv(1, 1), iv(0, 2)],
        ]);
        let inst = axis_instance();
        let a_bar = vec![v2(1, 1), Vec2::zero(), Vec2::zero()];
        let delta =
            find_tilt_epsilon(&b, &a_bar, &inst, &cover).unwrap();
        // Active-row threshold 1, box threshold 1/6, capture threshold 1;
        // half the minimum.
        assert_eq!(delta, ratio(1, 12));
        // The decomposition must also hold at delta itself.
        let plus = tilt_body(&b, &a_bar, &delta).unwrap();
        let minus = tilt_body(&b, &a_bar, &(-&delta)).unwrap();
        assert!(plus.is_lattice_free().unwrap());
        assert!(minus.is_lattice_free().unwrap());
        let g = b.gamma(inst.rays());
        let gp = plus.gamma(inst.rays());
        let gm = minus.gamma(inst.rays());
        for ((base, up), down) in g.iter().zip(&gp).zip(&gm) {
            assert_eq!(
                *base,
                ratio(1, 2) * up + ratio(1, 2) * down
            );
        }
        assert_ne!(gp, gm);
    }

    #[test]
    fn epsilon_rejects_bad_hypotheses() {
        let b = corner_triangle();
        let inst = axis_instance();
        let zero =
            vec![Vec2::zero(), Vec2::zero(), Vec2::zero()];
        assert!(matches!(
            find_tilt_epsilon(&b, &zero, &inst, &Cover::full(&b)),
            Err(Error::NotInNullspace)
        ));
        // A direction that unpins the covered point (0,1).
        let bad = vec![v2(1, 0), Vec2::zero(), Vec2::zero()];
        assert!(matches!(
            find_tilt_epsilon(&b, &bad, &inst, &Cover::full(&b)),
            Err(Error::NotInNullspace)
        ));
        // A cover missing the boundary point (0,0).
        let partial = Cover::new(vec![
            vec![iv(0, 1), iv(0, 2)],
            vec![iv(1, 0), iv(2, 0)],
            vec![iv(2, 0), iv(1, 1), iv(0, 2)],
        ]);
        let a_bar = vec![v2(1, 1), Vec2::zero(), Vec2::zero()];
        assert!(matches!(
            find_tilt_epsilon(&b, &a_bar, &inst, &partial),
            Err(Error::CoverIncomplete)
        ));
        // A cover point that is not on its claimed facet.
        let misplaced = Cover::new(vec![
            vec![iv(1, 0)],
            vec![iv(0, 0), iv(1, 0), iv(2, 0)],
            vec![iv(2, 0), iv(1, 1), iv(0, 2)],
        ]);
        assert!(matches!(
            find_tilt_epsilon(&b, &a_bar, &inst, &misplaced),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn single_facet_tilt_splits_prices_at_the_witness() {
        let b = type2_triangle();
        // Left facet (row 1) carries only (0,1); the first ray meets it
        // at (-1/4, 1/2), which is not a lattice point.
        let inst = Instance::new(
            None,
            half_half(),
            vec![v2(-1, 0), v2(0, -1), v2(1, 1)],
        )
        .unwrap();
        let (plus, minus, witness) =
            single_facet_tilt(&b, 1, &inst).unwrap();
        assert_eq!(witness, 0);
        let g = b.gamma(inst.rays());
        let gp = plus.gamma(inst.rays());
        let gm = minus.gamma(inst.rays());
        assert_ne!(gp, gm);
        assert_ne!(gp[0], gm[0]);
        for ((base, up), down) in g.iter().zip(&gp).zip(&gm) {
            assert_eq!(
                *base,
                ratio(1, 2) * up + ratio(1, 2) * down
            );
        }
        assert!(plus.is_lattice_free().unwrap());
        assert!(minus.is_lattice_free().unwrap());
    }

    #[test]
    fn single_facet_tilt_requires_a_lone_interior_point() {
        // Every facet of the corner triangle carries three points.
        let b = corner_triangle();
        let inst = axis_instance();
        assert!(matches!(
            single_facet_tilt(&b, 0, &inst),
            Err(Error::HypothesisViolated(_))
        ));
        // Right facet of the type 2 triangle is fine geometrically, but
        // no instance ray meets it at a non-lattice point.
        let b = type2_triangle();
        let inst = Instance::new(
            None,
            half_half(),
            vec![v2(1, 1), v2(0, -1)],
        )
        .unwrap();
        assert!(matches!(
            single_facet_tilt(&b, 2, &inst),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn ratio_condition_separates_the_diamonds() {
        let d = diamond();
        let corners = vec![
            vq(1, 2, 3, 2),
            vq(-1, 2, 1, 2),
            vq(1, 2, -1, 2),
            vq(3, 2, 1, 2),
        ];
        let points =
            vec![iv(0, 1), iv(0, 0), iv(1, 0), iv(1, 1)];
        assert!(!ratio_condition(&d, &corners, &points).unwrap());

        let p = perturbed_diamond();
        let corners = vec![
            vq(2, 3, 5, 3),
            vq(-1, 2, 1, 2),
            vq(1, 2, -1, 2),
            vq(4, 3, 1, 3),
        ];
        assert!(ratio_condition(&p, &corners, &points).unwrap());

        // Lattice points not matching the edge order are rejected.
        let shuffled =
            vec![iv(1, 1), iv(0, 1), iv(0, 0), iv(1, 0)];
        assert!(matches!(
            ratio_condition(&p, &corners, &shuffled),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn triangle_reconstruction_recovers_the_corner_triangle() {
        let f = half_half();
        let rays = vec![v2(-1, -1), v2(3, -1), v2(-1, 3)];
        let points = vec![iv(1, 0), iv(0, 1), iv(1, 1)];
        let body =
            triangle_from_rays_and_points(&f, &rays, &points).unwrap();
        assert_eq!(body.rows(), corner_triangle().rows());

        // A lattice point collinear with a ray cannot be assigned.
        let rays = vec![v2(-1, -1), v2(3, -1), v2(1, 1)];
        assert!(matches!(
            triangle_from_rays_and_points(&f, &rays, &points),
            Err(Error::SingularSystem)
        ));
    }

    #[test]
    fn quadrilateral_reconstruction_detects_degeneracy() {
        let f = half_half();
        let points =
            vec![iv(0, 1), iv(0, 0), iv(1, 0), iv(1, 1)];
        // The exact diamond admits a sliding family.
        let rays = vec![v2(0, 1), v2(-1, 0), v2(0, -1), v2(1, 0)];
        match quadrilateral_from_rays_and_points(&f, &rays, &points)
            .unwrap()
        {
            QuadSolve::Underdetermined(basis) => {
                assert_eq!(basis.len(), 1)
            }
            other => panic!("expected Underdetermined, got {other:?}"),
        }

        // The perturbed diamond is pinned uniquely.
        let rays = vec![v2(1, 7), v2(-1, 0), v2(0, -1), v2(5, -1)];
        match quadrilateral_from_rays_and_points(&f, &rays, &points)
            .unwrap()
        {
            QuadSolve::Unique(body) => {
                let mut got = body.rows().to_vec();
                let mut want = perturbed_diamond().rows().to_vec();
                got.sort_by(crate::geom::cmp_vec2);
                want.sort_by(crate::geom::cmp_vec2);
                assert_eq!(got, want);
            }
            other => panic!("expected Unique, got {other:?}"),
        }

        // Rays that do not positively span the plane cannot bound a
        // quadrilateral around f.
        let rays = vec![v2(1, 0), v2(0, 1), v2(1, 1), v2(1, -1)];
        assert_eq!(
            quadrilateral_from_rays_and_points(&f, &rays, &points)
                .unwrap(),
            QuadSolve::Infeasible
        );
    }

    #[test]
    fn dominator_rotates_the_long_edge_to_a_type3() {
        let b = type2_triangle();
        // First ray exits through (0,0) — the pivot — second strictly
        // inside the segment toward the left endpoint, third toward the
        // apex.
        let inst = Instance::new(
            None,
            half_half(),
            vec![v2(-1, -1), v2(-3, -2), v2(0, 1)],
        )
        .unwrap();
        let g = b.gamma(inst.rays());
        assert_eq!(g, vec![rat(2), rat(4), ratio(2, 3)]);
        let dom = type3_dominator(&b, &inst).unwrap();
        assert_eq!(dom.classify().unwrap().tag, BodyTag::Type3);
        let gd = dom.gamma(inst.rays());
        for (new, old) in gd.iter().zip(&g) {
            assert!(new <= old);
        }
        // The ray through the pivot keeps its price; the one hitting the
        // open segment improves strictly; the apex ray is untouched.
        assert_eq!(gd[0], g[0]);
        assert!(gd[1] < g[1]);
        assert_eq!(gd[2], g[2]);
    }

    #[test]
    fn dominator_requires_hits_beside_one_pivot() {
        let b = type2_triangle();
        // Rays exit on both sides of both pivots: no labeling works.
        let inst = Instance::new(
            None,
            half_half(),
            vec![v2(-3, -2), v2(1, -1), v2(0, 1)],
        )
        .unwrap();
        assert!(matches!(
            type3_dominator(&b, &inst),
            Err(Error::HypothesisViolated(_))
        ));
        // A type 1 triangle is rejected outright.
        let inst = axis_instance();
        assert!(matches!(
            type3_dominator(&corner_triangle(), &inst),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
