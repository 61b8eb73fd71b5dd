//! Brute-force oracle: windowed enumeration of the mixed integer hull,
//! deliberately independent of the candidate pipeline.
//!
//! Nothing here touches lattice-free bodies, cone hulls or the candidate
//! machinery — only exact scalars, plane vectors, a 2x2 solver, and the
//! exact LP. Points of `R_f = {s >= 0 : f + sum_j r^j s_j integral}` are
//! collected lattice point by lattice point inside a box window: every
//! basic solution of `sum_j r^j s_j = x - f, s >= 0` has at most two
//! positive components (the equality system has rank two), so singleton
//! and ray-pair solves enumerate them all. The vertex set of
//! `conv(collected) + R^k_+` follows by exact redundancy elimination, and
//! facets by an exact double description run over the dual cone. Window
//! sufficiency is certified heuristically by radius doubling: callers that
//! need a trustworthy answer use [`stable_facets`], which aborts with a
//! diagnostic instead of silently trusting an unstable window.

use num::{BigInt, Integer, One, Signed, Zero};
use rayon::prelude::*;

use crate::error::Error;
use crate::geom::{cmp_rat_slice, positively_spans, Vec2};
use crate::instance::{fmt_rat_slice, Instance};
use crate::linalg::solve_2x2;
use crate::lp::{lp_membership, Membership};
use crate::rat::{ceil_int, floor_int, Rat};
use crate::Result;

/// Box window `|x - f|_inf <= radius` of lattice points to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    radius: i64,
}

impl Window {
    /// Radii below 2 cannot even see the nearest lattice points in every
    /// direction and are rejected.
    pub fn new(radius: i64) -> Result<Window> {
        if radius < 2 {
            return Err(Error::InvalidInstance(format!(
                "window radius {radius} is below the minimum of 2"
            )));
        }
        Ok(Window { radius })
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn doubled(&self) -> Window {
        Window {
            radius: self.radius * 2,
        }
    }
}

/// Facets of `conv(R_f)` as seen through a window, normalized so every
/// nontrivial inequality reads `gamma . s >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleFacets {
    /// Nontrivial facet price vectors in canonical order.
    pub nontrivial: Vec<Vec<Rat>>,
    /// Indices `j` whose trivial inequality `s_j >= 0` is facet-defining.
    pub trivial: Vec<usize>,
}

fn require_full_cone(inst: &Instance) -> Result<()> {
    if positively_spans(inst.rays()) {
        Ok(())
    } else {
        Err(Error::ConeNotFull)
    }
}

/// All basic solutions of `sum_j r^j s_j = x - f, s >= 0` for one lattice
/// point: singleton solves plus every ray pair (exact 2x2).
fn basic_solutions(rays: &[Vec2], d: &Vec2) -> Vec<Vec<Rat>> {
    let k = rays.len();
    let mut out = Vec::new();
    for (j, r) in rays.iter().enumerate() {
        let t = if !r.x.is_zero() {
            &d.x / &r.x
        } else {
            &d.y / &r.y
        };
        if t.is_positive() && r.scale(&t) == *d {
            let mut s = vec![Rat::zero(); k];
            s[j] = t;
            out.push(s);
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            if let Some((a, b)) = solve_2x2(&rays[i], &rays[j], d) {
                if !a.is_negative() && !b.is_negative() {
                    let mut s = vec![Rat::zero(); k];
                    s[i] = a;
                    s[j] = b;
                    out.push(s);
                }
            }
        }
    }
    out
}

/// Pareto-minimal members of a deduplicated point list: anything that
/// another point undercuts componentwise sits in `point + R^k_+` and can
/// never be a vertex of the hull.
fn pareto_minimal(points: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    let mut order: Vec<(Rat, Vec<Rat>)> = points
        .into_iter()
        .map(|p| (p.iter().sum::<Rat>(), p))
        .collect();
    // A strict dominator has a strictly smaller coordinate sum, so one
    // ascending sweep against the running antichain suffices.
    order.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| cmp_rat_slice(&a.1, &b.1)));
    let mut minimal: Vec<Vec<Rat>> = Vec::new();
    for (_, p) in order {
        let covered = minimal
            .iter()
            .any(|m| m.iter().zip(&p).all(|(a, b)| a <= b));
        if !covered {
            minimal.push(p);
        }
    }
    minimal
}

/// Vertices of `conv(R_f ∩ window) + R^k_+`, canonically ordered.
///
/// Precondition: the ray cone positively spans the plane (complete it
/// first); otherwise `ConeNotFull` is returned.
pub fn brute_force_vertices(
    inst: &Instance,
    w: &Window,
) -> Result<Vec<Vec<Rat>>> {
    require_full_cone(inst)?;
    let f = inst.f();
    let radius = Rat::from_integer(BigInt::from(w.radius()));
    let (x_lo, x_hi) = (ceil_int(&(&f.x - &radius)), floor_int(&(&f.x + &radius)));
    let (y_lo, y_hi) = (ceil_int(&(&f.y - &radius)), floor_int(&(&f.y + &radius)));
    let mut points: Vec<(BigInt, BigInt)> = Vec::new();
    let mut ix = x_lo;
    while ix <= x_hi {
        let mut iy = y_lo.clone();
        while iy <= y_hi {
            points.push((ix.clone(), iy.clone()));
            iy += 1;
        }
        ix += 1;
    }
    let rays = inst.rays();
    let mut collected: Vec<Vec<Rat>> = points
        .par_iter()
        .flat_map_iter(|(ix, iy)| {
            let d = Vec2::new(
                Rat::from_integer(ix.clone()) - &f.x,
                Rat::from_integer(iy.clone()) - &f.y,
            );
            basic_solutions(rays, &d)
        })
        .collect();
    collected.sort_by(|a, b| cmp_rat_slice(a, b));
    collected.dedup();
    let candidates = pareto_minimal(collected);
    let mut alive = vec![true; candidates.len()];
    for i in 0..candidates.len() {
        let gens: Vec<Vec<Rat>> = (0..candidates.len())
            .filter(|&j| alive[j] && j != i)
            .map(|j| candidates[j].clone())
            .collect();
        if gens.is_empty() {
            continue;
        }
        if let Membership::Inside { .. } =
            lp_membership(&candidates[i], &gens, true)?
        {
            alive[i] = false;
        }
    }
    let mut vertices: Vec<Vec<Rat>> = candidates
        .into_iter()
        .zip(alive)
        .filter(|(_, keep)| *keep)
        .map(|(v, _)| v)
        .collect();
    vertices.sort_by(|a, b| cmp_rat_slice(a, b));
    Ok(vertices)
}

/// One ray of the double description state, with the set of constraints it
/// satisfies with equality as a bit mask.
struct DdRay {
    dir: Vec<Rat>,
    tight: u128,
}

/// Rescales to a primitive integer vector (exact canonical form).
fn primitive_dir(dir: &mut [Rat]) {
    let mut scale = BigInt::one();
    for x in dir.iter() {
        scale = scale.lcm(x.denom());
    }
    let mut g = BigInt::zero();
    for x in dir.iter() {
        g = g.gcd(&(x.numer() * &scale / x.denom()));
    }
    if g.is_zero() {
        return;
    }
    let factor = Rat::new(scale, g);
    for x in dir.iter_mut() {
        *x *= &factor;
    }
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact double description over halfspaces `h . y >= 0`: starts from all
/// of `R^d` (a pure lineality basis) and inserts one constraint at a time,
/// using the lineality-absorption step while a free direction remains and
/// the classical adjacency combination afterwards.
fn extreme_rays(dim: usize, halfspaces: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    assert!(
        halfspaces.len() <= 128,
        "double description bit mask supports at most 128 constraints"
    );
    let mut lineality: Vec<Vec<Rat>> = (0..dim)
        .map(|i| {
            let mut e = vec![Rat::zero(); dim];
            e[i] = Rat::one();
            e
        })
        .collect();
    let mut rays: Vec<DdRay> = Vec::new();
    for (ci, h) in halfspaces.iter().enumerate() {
        let hit = lineality.iter().position(|l| !dot(h, l).is_zero());
        if let Some(pos) = hit {
            let mut l0 = lineality.swap_remove(pos);
            let hl0 = dot(h, &l0);
            if hl0.is_negative() {
                for x in &mut l0 {
                    *x = -x.clone();
                }
            }
            let hl0 = dot(h, &l0);
            for l in &mut lineality {
                let c = dot(h, l) / &hl0;
                for (a, b) in l.iter_mut().zip(&l0) {
                    *a -= &c * b;
                }
            }
            for r in &mut rays {
                let c = dot(h, &r.dir) / &hl0;
                for (a, b) in r.dir.iter_mut().zip(&l0) {
                    *a -= &c * b;
                }
                primitive_dir(&mut r.dir);
                r.tight |= 1 << ci;
            }
            // The absorbed lineality direction satisfies every earlier
            // constraint with equality and this one strictly.
            let tight = if ci == 0 { 0 } else { (1u128 << ci) - 1 };
            primitive_dir(&mut l0);
            rays.push(DdRay { dir: l0, tight });
            continue;
        }
        let vals: Vec<Rat> = rays.iter().map(|r| dot(h, &r.dir)).collect();
        let mut next: Vec<DdRay> = Vec::new();
        for (r, v) in rays.iter().zip(&vals) {
            if !v.is_negative() {
                next.push(DdRay {
                    dir: r.dir.clone(),
                    tight: r.tight | if v.is_zero() { 1 << ci } else { 0 },
                });
            }
        }
        for (pi, pv) in vals.iter().enumerate() {
            if !pv.is_positive() {
                continue;
            }
            for (ni, nv) in vals.iter().enumerate() {
                if !nv.is_negative() {
                    continue;
                }
                let common = rays[pi].tight & rays[ni].tight;
                let adjacent = rays.iter().enumerate().all(|(oi, o)| {
                    oi == pi || oi == ni || (o.tight & common) != common
                });
                if !adjacent {
                    continue;
                }
                let mut dir: Vec<Rat> = rays[pi]
                    .dir
                    .iter()
                    .zip(&rays[ni].dir)
                    .map(|(p, n)| pv * n - nv * p)
                    .collect();
                primitive_dir(&mut dir);
                next.push(DdRay {
                    dir,
                    tight: common | (1 << ci),
                });
            }
        }
        rays = next;
    }
    assert!(
        lineality.is_empty(),
        "dual cone of a full-dimensional hull is pointed"
    );
    rays.into_iter().map(|r| r.dir).collect()
}

/// Builds the facet list from a vertex set by double description over the
/// dual cone `{(gamma, c) : gamma >= 0, gamma . v + c >= 0 for all v}`:
/// extreme rays with negative last coordinate normalize to nontrivial
/// facets `gamma . s >= 1`, rays with zero last coordinate are the
/// facet-defining trivial directions, and the single remaining ray is the
/// far facet of the homogenization.
fn facets_from_vertices(k: usize, vertices: &[Vec<Rat>]) -> OracleFacets {
    let mut halfspaces: Vec<Vec<Rat>> = Vec::new();
    for j in 0..k {
        let mut h = vec![Rat::zero(); k + 1];
        h[j] = Rat::one();
        halfspaces.push(h);
    }
    for v in vertices {
        let mut h = v.clone();
        h.push(Rat::one());
        halfspaces.push(h);
    }
    let mut nontrivial = Vec::new();
    let mut trivial = Vec::new();
    for ray in extreme_rays(k + 1, &halfspaces) {
        let c = &ray[k];
        if c.is_negative() {
            let gamma: Vec<Rat> =
                ray[..k].iter().map(|g| g / -c.clone()).collect();
            nontrivial.push(gamma);
        } else if c.is_zero() {
            let support: Vec<usize> = (0..k)
                .filter(|&j| !ray[j].is_zero())
                .collect();
            assert!(
                support.len() == 1 && ray[support[0]].is_positive(),
                "zero-offset extreme ray must be an axis direction"
            );
            trivial.push(support[0]);
        } else {
            assert!(
                ray[..k].iter().all(|g| g.is_zero()),
                "positive-offset extreme ray must be the far facet"
            );
        }
    }
    nontrivial.sort_by(|a, b| cmp_rat_slice(a, b));
    trivial.sort_unstable();
    OracleFacets { nontrivial, trivial }
}

/// Facets of `conv(R_f ∩ window) + R^k_+` by exact double description.
pub fn brute_force_facets(inst: &Instance, w: &Window) -> Result<OracleFacets> {
    let vertices = brute_force_vertices(inst, w)?;
    Ok(facets_from_vertices(inst.rays().len(), &vertices))
}

/// `true` when `gamma . s >= 1` holds at every windowed hull vertex.
pub fn check_validity(
    gamma: &[Rat],
    inst: &Instance,
    w: &Window,
) -> Result<bool> {
    if gamma.len() != inst.rays().len() {
        return Err(Error::DimensionMismatch(format!(
            "price vector has {} entries for {} rays",
            gamma.len(),
            inst.rays().len()
        )));
    }
    let one = Rat::one();
    Ok(brute_force_vertices(inst, w)?
        .iter()
        .all(|v| dot(gamma, v) >= one))
}

/// Facets certified by window doubling: recomputes vertices and facets at
/// twice the radius and aborts with a diagnostic if either list moved.
/// The certificate is heuristic — a stable window can in principle still
/// be too small — but instability is never silently trusted.
pub fn stable_facets(inst: &Instance, w: &Window) -> Result<OracleFacets> {
    let v1 = brute_force_vertices(inst, w)?;
    let v2 = brute_force_vertices(inst, &w.doubled())?;
    if v1 != v2 {
        return Err(Error::PostValidation(format!(
            "window radius {} is unstable: doubling changes the vertex \
             list ({} -> {} vertices)",
            w.radius(),
            v1.len(),
            v2.len()
        )));
    }
    let k = inst.rays().len();
    let f1 = facets_from_vertices(k, &v1);
    let f2 = facets_from_vertices(k, &v2);
    if f1 != f2 {
        return Err(Error::PostValidation(format!(
            "window radius {} is unstable: doubling changes the facet \
             list ({} -> {} nontrivial facets)",
            w.radius(),
            f1.nontrivial.len(),
            f2.nontrivial.len()
        )));
    }
    Ok(f1)
}

/// Renders a facet list the way the CLI prints it, one inequality per
/// line; used in diagnostics.
pub fn describe_facets(facets: &OracleFacets) -> String {
    let mut lines: Vec<String> = facets
        .nontrivial
        .iter()
        .map(|g| format!("{} . s >= 1", fmt_rat_slice(g)))
        .collect();
    for j in &facets.trivial {
        lines.push(format!("s_{} >= 0", j + 1));
    }
    lines.join("\n")
}
