//! Exact lattice and cone geometry for a point configuration.
//!
//! A configuration is a list `a_0, a_1, ..., a_N` of points of `Z^n`; the
//! lifts `(1, a_j)` generate a pointed rational cone `C` and a lattice `ZA`.
//! `M = C ∩ ZA` and its interior part `M°` index the auxiliary variables
//! of the Frobenius operator. "Interior" is always relative: relative to
//! the linear span of `C`, and for the polytope `Δ = hull(a_1..a_N)`
//! relative to its affine hull.

mod compositions;
pub mod hermite;

use std::collections::BTreeSet;

pub use compositions::CompositionSolver;

use crate::error::{Error, Result};
use hermite::{dot, hermite_basis, integer_kernel, lattice_coordinates, primitive, rank};

pub type IVec = Vec<i64>;

/// Points `a_0..a_N` of `Z^n`; `a_0` is the candidate interior point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointConfiguration {
    dim: usize,
    points: Vec<IVec>,
}

impl PointConfiguration {
    /// Validates and wraps the points `a_0, a_1, ..., a_N`.
    ///
    /// `a_1..a_N` must be pairwise distinct. `a_0` may coincide with one of
    /// them; such a configuration simply fails the interior-point gate.
    pub fn new(points: Vec<IVec>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidConfiguration(format!(
                "need a_0 and at least one further point, got {} point(s)",
                points.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidConfiguration(
                "points must have dimension >= 1".into(),
            ));
        }
        if let Some((j, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
            return Err(Error::InvalidConfiguration(format!(
                "point a_{j} has length {}, expected {dim}",
                p.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for (j, p) in points.iter().enumerate().skip(1) {
            if !seen.insert(p) {
                return Err(Error::InvalidConfiguration(format!(
                    "point a_{j} = {p:?} is repeated"
                )));
            }
        }
        Ok(Self { dim, points })
    }

    /// The Dwork family in dimension `n`: `a_i = n e_i`, `a_0 = (1,..,1)`.
    pub fn dwork(n: usize) -> Self {
        let mut points = vec![vec![1; n]];
        for i in 0..n {
            let mut a = vec![0; n];
            a[i] = n as i64;
            points.push(a);
        }
        Self::new(points).expect("dwork family is valid")
    }

    /// The reflexive hexagon with interior point at the origin.
    pub fn hexagon() -> Self {
        Self::new(vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![-1, 1],
            vec![-1, 0],
            vec![0, -1],
            vec![1, -1],
        ])
        .expect("hexagon is valid")
    }

    /// `n`
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N`, the number of points besides `a_0`.
    pub fn num_vertices(&self) -> usize {
        self.points.len() - 1
    }

    pub fn points(&self) -> &[IVec] {
        &self.points
    }

    pub fn interior_point(&self) -> &IVec {
        &self.points[0]
    }

    pub fn vertices(&self) -> &[IVec] {
        &self.points[1..]
    }

    pub fn lift(&self, j: usize) -> IVec {
        lift(&self.points[j])
    }

    pub fn lifts(&self) -> Vec<IVec> {
        self.points.iter().map(|a| lift(a)).collect()
    }

    /// Same configuration with `a_1..a_N` reordered by `perm`
    /// (`perm[k]` is the old index, 1-based, of the new `a_{k+1}`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut points = vec![self.points[0].clone()];
        points.extend(perm.iter().map(|&j| self.points[j].clone()));
        Self::new(points)
    }

    pub fn span(&self) -> SpanBasis {
        SpanBasis::of(&self.lifts())
    }

    pub fn cone(&self) -> Result<ConeGeometry> {
        ConeGeometry::new(self.lifts())
    }
}

pub fn lift(a: &[i64]) -> IVec {
    let mut v = Vec::with_capacity(a.len() + 1);
    v.push(1);
    v.extend_from_slice(a);
    v
}

/// Linear span and lattice generated by a set of integer vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanBasis {
    /// Rank of the generators.
    pub dim: usize,
    /// Hermite basis of the generated lattice; it is also a rational basis
    /// of the span.
    pub lattice_basis: Vec<IVec>,
}

impl SpanBasis {
    pub fn of(vectors: &[IVec]) -> Self {
        let lattice_basis = hermite_basis(vectors);
        Self {
            dim: lattice_basis.len(),
            lattice_basis,
        }
    }

    pub fn lattice_contains(&self, v: &[i64]) -> bool {
        lattice_coordinates(&self.lattice_basis, v).is_some()
    }

    pub fn span_contains(&self, v: &[i64]) -> bool {
        let mut rows = self.lattice_basis.clone();
        rows.push(v.to_vec());
        rank(&rows) == self.dim
    }
}

/// The cone over a set of generators, with its facet inequalities
/// relative to the generators' span.
#[derive(Clone, Debug)]
pub struct ConeGeometry {
    pub generators: Vec<IVec>,
    pub span: SpanBasis,
    pub facets: FacetSystem,
}

/// Primitive integer normals `h` lying in the span, `<h, g> >= 0` on every
/// generator, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetSystem {
    pub normals: Vec<IVec>,
}

impl FacetSystem {
    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }
}

/// A lattice point `μ` of the cone together with whether it avoids every
/// proper face.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConePoint {
    pub coords: IVec,
    pub interior: bool,
}

impl ConePoint {
    pub fn weight(&self) -> i64 {
        self.coords[0]
    }
}

impl ConeGeometry {
    pub fn new(generators: Vec<IVec>) -> Result<Self> {
        let mut gens: Vec<IVec> = generators;
        gens.sort();
        gens.dedup();
        if gens.is_empty() || gens.iter().all(|g| g.iter().all(|&x| x == 0)) {
            return Err(Error::DegenerateCone("no nonzero generators".into()));
        }
        let span = SpanBasis::of(&gens);
        let facets = cone_facets(&gens, &span)?;
        Ok(Self {
            generators: gens,
            span,
            facets,
        })
    }

    /// Membership in `M = C ∩ ZA`.
    pub fn in_m(&self, v: &[i64]) -> bool {
        self.span.lattice_contains(v) && self.facets.normals.iter().all(|h| dot(h, v) >= 0)
    }

    /// Membership in `M°`.
    pub fn in_interior(&self, v: &[i64]) -> bool {
        v.first().is_some_and(|&w| w > 0)
            && self.span.lattice_contains(v)
            && self.facets.normals.iter().all(|h| dot(h, v) > 0)
    }

    /// Whether a rational point of the span lies strictly inside the cone;
    /// no lattice condition.
    pub fn in_relative_interior(&self, v: &[i64]) -> bool {
        v.first().is_some_and(|&w| w > 0)
            && self.span.span_contains(v)
            && self.facets.normals.iter().all(|h| dot(h, v) > 0)
    }

    /// Classifies `v`: `None` if `v ∉ M`.
    pub fn classify(&self, v: &[i64]) -> Option<ConePoint> {
        self.in_m(v).then(|| ConePoint {
            coords: v.to_vec(),
            interior: self.in_interior(v),
        })
    }

    /// All points of `M` (or `M°`) of weight at most `weight_bound`, sorted
    /// by weight and then lexicographically.
    ///
    /// Every point of weight `w` in the cone has `i`-th coordinate between
    /// `w * min_j g_ji` and `w * max_j g_ji`, so the scan is over that box.
    pub fn enumerate(&self, weight_bound: i64, interior_only: bool) -> Vec<ConePoint> {
        let dim = self.generators[0].len();
        let lo: Vec<i64> = (0..dim)
            .map(|i| self.generators.iter().map(|g| g[i]).min().unwrap_or(0))
            .collect();
        let hi: Vec<i64> = (0..dim)
            .map(|i| self.generators.iter().map(|g| g[i]).max().unwrap_or(0))
            .collect();
        let mut out = Vec::new();
        for w in 0..=weight_bound.max(-1) {
            let mut v = vec![0i64; dim];
            v[0] = w;
            if dim == 1 {
                self.push_if_member(&v, interior_only, &mut out);
                continue;
            }
            let bounds: Vec<(i64, i64)> = (1..dim).map(|i| (w * lo[i], w * hi[i])).collect();
            let mut idx: Vec<i64> = bounds.iter().map(|b| b.0).collect();
            'scan: loop {
                v[1..].copy_from_slice(&idx);
                self.push_if_member(&v, interior_only, &mut out);
                for k in (0..idx.len()).rev() {
                    if idx[k] < bounds[k].1 {
                        idx[k] += 1;
                        continue 'scan;
                    }
                    idx[k] = bounds[k].0;
                }
                break;
            }
        }
        out
    }

    fn push_if_member(&self, v: &[i64], interior_only: bool, out: &mut Vec<ConePoint>) {
        if let Some(cp) = self.classify(v) {
            if cp.interior || !interior_only {
                out.push(cp);
            }
        }
    }
}

/// Facets of the cone over `gens` inside its span, by brute force over
/// `(d-1)`-subsets of generators.
pub fn cone_facets(gens: &[IVec], span: &SpanBasis) -> Result<FacetSystem> {
    let d = span.dim;
    if d == 0 {
        return Err(Error::DegenerateCone("span is zero-dimensional".into()));
    }
    if d == 1 {
        return Ok(FacetSystem {
            normals: Vec::new(),
        });
    }
    let basis = &span.lattice_basis;
    let mut found = BTreeSet::new();
    for subset in subsets(gens.len(), d - 1) {
        // columns of the pairing matrix: basis vector k against the subset
        let cols: Vec<IVec> = basis
            .iter()
            .map(|b| subset.iter().map(|&s| dot(b, &gens[s])).collect())
            .collect();
        let kernel = integer_kernel(&cols);
        if kernel.len() != 1 {
            continue;
        }
        let y = &kernel[0];
        let mut h = vec![0i64; gens[0].len()];
        for (yk, b) in y.iter().zip(basis) {
            for (hi, bi) in h.iter_mut().zip(b) {
                *hi += yk * bi;
            }
        }
        let h = primitive(&h);
        let pairings: Vec<i64> = gens.iter().map(|g| dot(&h, g)).collect();
        let normal = if pairings.iter().all(|&x| x >= 0) {
            h
        } else if pairings.iter().all(|&x| x <= 0) {
            h.iter().map(|x| -x).collect()
        } else {
            continue;
        };
        if pairings.iter().all(|&x| x == 0) {
            return Err(Error::DegenerateCone(
                "facet normal vanishes on every generator".into(),
            ));
        }
        found.insert(normal);
    }
    if found.len() < 2 {
        return Err(Error::DegenerateCone(format!(
            "expected at least 2 facets in a {d}-dimensional span, found {}",
            found.len()
        )));
    }
    Ok(FacetSystem {
        normals: found.into_iter().collect(),
    })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Integer basis of the relation lattice `L = { l : sum_j l_j â_j = 0 }`.
pub fn relation_lattice_basis(config: &PointConfiguration) -> Vec<IVec> {
    integer_kernel(&config.lifts())
}

/// Lattice points of `Z^n` in the relative interior of `Δ = hull(a_1..a_N)`.
pub fn interior_lattice_points(config: &PointConfiguration) -> Result<Vec<IVec>> {
    let verts = config.vertices();
    let cone = ConeGeometry::new(verts.iter().map(|a| lift(a)).collect())?;
    let n = config.dim();
    let lo: Vec<i64> = (0..n)
        .map(|i| verts.iter().map(|a| a[i]).min().unwrap())
        .collect();
    let hi: Vec<i64> = (0..n)
        .map(|i| verts.iter().map(|a| a[i]).max().unwrap())
        .collect();
    let mut found = Vec::new();
    let mut a = lo.clone();
    'scan: loop {
        if cone.in_relative_interior(&lift(&a)) {
            found.push(a.clone());
        }
        for k in (0..n).rev() {
            if a[k] < hi[k] {
                a[k] += 1;
                continue 'scan;
            }
            a[k] = lo[k];
        }
        break;
    }
    Ok(found)
}

/// Succeeds with `a_0` iff `a_0` is the unique lattice point in the relative
/// interior of `Δ`.
pub fn unique_interior_gate(config: &PointConfiguration) -> Result<IVec> {
    let found = interior_lattice_points(config)?;
    if found.len() == 1 && &found[0] == config.interior_point() {
        Ok(found[0].clone())
    } else {
        Err(Error::GateFailure {
            expected: config.interior_point().clone(),
            found,
        })
    }
}
