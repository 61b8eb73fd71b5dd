//! Facet filtering: from candidate inequalities to the facets of the mixed
//! integer hull `conv(R_f)` and of the triangle closure.
//!
//! The pipeline completes the ray cone so it positively spans the plane
//! (appending "ghost" axis rays when needed), enumerates the candidate
//! families on the completed instance, and keeps exactly the extreme price
//! vectors: exact deduplication, componentwise-dominance pruning, then an
//! exact LP membership test of each survivor against the convex hull of the
//! others plus the nonnegative orthant. When ghosts were appended, the
//! surviving vectors are truncated back to the original coordinates and
//! filtered once more in that space. Trivial inequalities `s_j >= 0` are
//! reported separately; each is kept exactly when removing it from the
//! system enlarges the feasible set, decided by an exact LP.

use num::{One, Zero};

use crate::body::Family;
use crate::candidates::{enumerate_family, Candidate, CandidateSet};
use crate::geom::{positively_spans, Vec2};
use crate::instance::Instance;
use crate::lp::{lp_membership, solve_min, LpOutcome, Membership};
use crate::rat::Rat;

/// Counters and notes describing what the facet filter did.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Candidates entering the filter (after exact deduplication).
    pub candidates: usize,
    /// Removed because another candidate is componentwise dominating.
    pub dominated: usize,
    /// Removed as convex combinations of the remaining candidates.
    pub combinations: usize,
    /// Indices of ghost rays appended to complete the cone (empty when the
    /// original rays already positively span the plane).
    pub ghosts: Vec<usize>,
    /// Enumeration and filtering diagnostics, canonically ordered.
    pub notes: Vec<String>,
}

/// Facets of a convex relaxation `{s >= 0 : gamma . s >= 1 for all gamma}`.
#[derive(Clone, Debug)]
pub struct FacetList {
    /// Facet-defining inequalities `gamma . s >= 1`, canonically ordered,
    /// each carrying its lattice-free certificate and provenance.
    pub nontrivial: Vec<Candidate>,
    /// Indices `j` whose trivial inequality `s_j >= 0` is facet-defining.
    /// Filled by the full pipelines; [`extreme_filter`] leaves it empty
    /// because the decision needs the instance dimension.
    pub trivial: Vec<usize>,
    pub diagnostics: Diagnostics,
}

impl FacetList {
    /// Price vectors of the nontrivial facets, in canonical order.
    pub fn gammas(&self) -> Vec<Vec<Rat>> {
        self.nontrivial
            .iter()
            .map(|c| c.inequality.gamma.clone())
            .collect()
    }
}

/// The four axis directions in canonical order.
fn axis_rays() -> [Vec2; 4] {
    [
        Vec2::from_ints(1, 0),
        Vec2::from_ints(0, 1),
        Vec2::from_ints(-1, 0),
        Vec2::from_ints(0, -1),
    ]
}

/// Lexicographically ordered `size`-subsets of `0..n`.
fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if idx[size - 1] < n {
            out.push(idx.clone());
        }
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] <= n - (size - i) {
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Completes the ray cone so it positively spans the plane by appending the
/// smallest set of axis directions that works, ties broken by canonical
/// axis order `(1,0), (0,1), (-1,0), (0,-1)`. Returns the completed
/// instance together with the indices of the appended ghost rays; a
/// spanning instance comes back unchanged with no ghosts.
pub fn ensure_full_cone(inst: &Instance) -> (Instance, Vec<usize>) {
    if positively_spans(inst.rays()) {
        return (inst.clone(), Vec::new());
    }
    let axes = axis_rays();
    for size in 1..=4 {
        for combo in subsets(4, size) {
            let mut rays = inst.rays().to_vec();
            rays.extend(combo.iter().map(|&i| axes[i].clone()));
            if positively_spans(&rays) {
                let ghosts = (inst.rays().len()..rays.len()).collect();
                let ext = Instance::new(
                    inst.name().map(str::to_string),
                    inst.f().clone(),
                    rays,
                )
                .expect("appending rays preserves instance validity");
                return (ext, ghosts);
            }
        }
    }
    unreachable!("the four axis directions positively span the plane")
}

/// Dominance and convex-combination pruning over a slice of candidates.
/// Returns the surviving entries (input order preserved) and the counts of
/// dominance and combination removals.
fn extreme_entries(entries: &[Candidate]) -> (Vec<Candidate>, usize, usize) {
    let n = entries.len();
    let mut alive = vec![true; n];
    let mut dominated = 0;
    for i in 0..n {
        let gi = &entries[i].inequality.gamma;
        let is_dominated = entries.iter().enumerate().any(|(j, c)| {
            let gj = &c.inequality.gamma;
            j != i && gj != gi && gj.iter().zip(gi).all(|(a, b)| a <= b)
        });
        if is_dominated {
            alive[i] = false;
            dominated += 1;
        }
    }
    let mut combinations = 0;
    for i in 0..n {
        if !alive[i] {
            continue;
        }
        let gens: Vec<Vec<Rat>> = (0..n)
            .filter(|&j| alive[j] && j != i)
            .map(|j| entries[j].inequality.gamma.clone())
            .collect();
        if gens.is_empty() {
            continue;
        }
        let member =
            lp_membership(&entries[i].inequality.gamma, &gens, true)
                .expect("candidate price vectors share one dimension");
        if let Membership::Inside { .. } = member {
            alive[i] = false;
            combinations += 1;
        }
    }
    let kept = entries
        .iter()
        .zip(&alive)
        .filter(|(_, keep)| **keep)
        .map(|(c, _)| c.clone())
        .collect();
    (kept, dominated, combinations)
}

/// Keeps exactly the extreme price vectors of a candidate pool: drops
/// componentwise-dominated vectors, then every vector lying in the convex
/// hull of the remaining ones plus the nonnegative orthant (exact LP).
/// Idempotent: re-running on the output changes nothing.
pub fn extreme_filter(candidates: &CandidateSet) -> FacetList {
    let (kept, dominated, combinations) =
        extreme_entries(candidates.entries());
    FacetList {
        nontrivial: kept,
        trivial: Vec::new(),
        diagnostics: Diagnostics {
            candidates: candidates.len(),
            dominated,
            combinations,
            ghosts: Vec::new(),
            notes: candidates.notes().to_vec(),
        },
    }
}

/// Decides which trivial inequalities `s_j >= 0` are facet-defining for the
/// full-dimensional set `{s >= 0 : gamma . s >= 1}`: exactly those whose
/// removal enlarges the set, i.e. minimizing `s_j` over the remaining
/// system is negative or unbounded (exact LP; an infeasible system has no
/// facets at all).
fn trivial_facets(nontrivial: &[Candidate], k: usize) -> Vec<usize> {
    (0..k)
        .filter(|&j| {
            let m = nontrivial.len();
            // Variables: s_i >= 0 for i != j, the split s_j = u - w with
            // u, w >= 0, and one surplus per inequality row.
            let n = k + 1 + m;
            let mut a: Vec<Vec<Rat>> = Vec::with_capacity(m);
            for (row, cand) in nontrivial.iter().enumerate() {
                let g = &cand.inequality.gamma;
                let mut r = vec![Rat::zero(); n];
                for (i, gi) in g.iter().enumerate() {
                    r[i] = gi.clone();
                }
                r[k] = -g[j].clone();
                r[k + 1 + row] = -Rat::one();
                a.push(r);
            }
            let b = vec![Rat::one(); m];
            let mut c = vec![Rat::zero(); n];
            c[j] = Rat::one();
            c[k] = -Rat::one();
            match solve_min(&c, &a, &b) {
                LpOutcome::Optimal { value, .. } => value < Rat::zero(),
                LpOutcome::Unbounded => true,
                LpOutcome::Infeasible { .. } => false,
            }
        })
        .collect()
}

/// Shared facet pipeline over a choice of candidate families.
fn facet_pipeline(inst: &Instance, families: &[Family]) -> FacetList {
    let (ext, ghosts) = ensure_full_cone(inst);
    let mut pool = CandidateSet::new();
    for fam in families {
        pool.absorb(enumerate_family(&ext, *fam));
    }
    let mut list = extreme_filter(&pool);
    if !ghosts.is_empty() {
        let k = inst.rays().len();
        let mut truncated = CandidateSet::new();
        for c in &list.nontrivial {
            let mut ineq = c.inequality.clone();
            ineq.gamma.truncate(k);
            truncated.insert_entry(Candidate {
                inequality: ineq,
                provenance: c.provenance.clone(),
            });
        }
        let again = extreme_filter(&truncated);
        list.diagnostics.dominated += again.diagnostics.dominated;
        list.diagnostics.combinations += again.diagnostics.combinations;
        list.diagnostics.notes.push(format!(
            "cone completed with {} ghost ray(s); \
             facets truncated to the original {} coordinate(s)",
            ghosts.len(),
            k
        ));
        list.nontrivial = again.nontrivial;
    }
    list.diagnostics.ghosts = ghosts;
    list.trivial = trivial_facets(&list.nontrivial, inst.rays().len());
    list
}

/// Facets of the mixed integer hull `conv(R_f)`: every candidate family is
/// enumerated on the cone-completed instance, filtered down to extreme
/// price vectors, and (when ghosts were added) truncated back to the
/// original rays and re-filtered.
pub fn mixed_integer_hull_facets(inst: &Instance) -> FacetList {
    facet_pipeline(
        inst,
        &[
            Family::Split,
            Family::Type1,
            Family::Type2,
            Family::Type3,
            Family::Quadrilateral,
        ],
    )
}

/// Facets of the triangle closure: the same pipeline restricted to split
/// and triangle candidates (quadrilaterals excluded).
pub fn triangle_closure_facets(inst: &Instance) -> FacetList {
    facet_pipeline(
        inst,
        &[Family::Split, Family::Type1, Family::Type2, Family::Type3],
    )
}
