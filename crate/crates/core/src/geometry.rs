//! Rational polyhedral cones and integral polytopes: face lattices, normal
//! and tangent cones, subdivision into basic cones, normalized volumes and
//! lattice point enumeration.
//!
//! Face enumeration is brute force over vertex subsets with exact
//! one-sidedness tests, so the ambient dimension is capped.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    cone_index, fmt_vec, int_vec_to_rat, pair_int, parallelepiped_points, primitive, rank_of_int,
    span_lattice, IntVec, Matrix, Rational,
};

/// Largest ambient dimension accepted by face enumeration.
pub const MAX_DIM: usize = 4;

/// Largest bounding box scanned by [`Polytope::lattice_points`].
pub const LATTICE_POINT_CAP: u64 = 5_000_000;

/// Scales a nonzero rational vector to a primitive integer vector with the
/// same direction.
pub fn primitive_from_rational(v: &[Rational]) -> Result<IntVec> {
    let lcm = v.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    ints.iter()
        .map(|x| (x / &g).to_i64())
        .collect::<Option<IntVec>>()
        .ok_or_else(|| Error::TooLarge("normal vector entry".into()))
}

/// A rational polyhedral cone given by primitive integer generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    generators: Vec<IntVec>,
    ambient: usize,
}

impl Cone {
    /// Builds a pointed cone. Generators are made primitive and duplicates
    /// are dropped; redundant (non-extreme) generators are kept.
    pub fn new(generators: Vec<IntVec>, ambient: usize) -> Result<Self> {
        let mut gens: Vec<IntVec> = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != ambient {
                return Err(Error::DimensionMismatch(format!(
                    "generator {} in ambient dimension {ambient}",
                    fmt_vec(&g)
                )));
            }
            let p = primitive(&g)?;
            if !gens.contains(&p) {
                gens.push(p);
            }
        }
        let cone = Cone {
            generators: gens,
            ambient,
        };
        if !cone.is_pointed()? {
            return Err(Error::NotPointed);
        }
        Ok(cone)
    }

    /// Cone from generators already known to be primitive, distinct and
    /// to span a pointed cone.
    pub(crate) fn from_trusted(generators: Vec<IntVec>, ambient: usize) -> Self {
        Cone {
            generators,
            ambient,
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Cone {
            generators: vec![],
            ambient,
        }
    }

    pub fn generators(&self) -> &[IntVec] {
        &self.generators
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn num_rays(&self) -> usize {
        self.generators.len()
    }

    pub fn dim(&self) -> usize {
        rank_of_int(&self.generators, self.ambient)
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_simplicial(&self) -> bool {
        self.dim() == self.generators.len()
    }

    /// Lattice index of a simplicial cone.
    pub fn index(&self) -> Result<u64> {
        if self.is_zero() {
            return Ok(1);
        }
        if !self.is_simplicial() {
            return Err(Error::NotSimplicial);
        }
        cone_index(&self.generators, self.ambient)
    }

    pub fn is_basic(&self) -> bool {
        self.is_simplicial() && self.index().map(|i| i == 1).unwrap_or(false)
    }

    /// Faces of a simplicial cone as generator-index subsets, ordered by
    /// size and then lexicographically. Includes `{}` and the full set.
    pub fn faces(&self) -> Result<Vec<Vec<usize>>> {
        if !self.is_simplicial() {
            return Err(Error::NotSimplicial);
        }
        Ok(subsets(self.generators.len()))
    }

    /// Sub-cone spanned by the given generator indices.
    pub fn face_cone(&self, subset: &[usize]) -> Cone {
        Cone {
            generators: subset.iter().map(|&i| self.generators[i].clone()).collect(),
            ambient: self.ambient,
        }
    }

    /// Inner facet normals of the cone inside its linear span, expressed in
    /// the coordinates of a lattice basis of that span.
    fn span_facets(&self) -> Result<(Vec<IntVec>, Vec<IntVec>, Vec<IntVec>)> {
        let lat = span_lattice(&self.generators, self.ambient)?;
        let r = lat.rank();
        let coords = lat.coords.clone();
        let mut normals: Vec<IntVec> = Vec::new();
        if r == 0 {
            return Ok((lat.basis, coords, normals));
        }
        for sub in subsets_of_size(coords.len(), r - 1) {
            let rows: Vec<IntVec> = sub.iter().map(|&i| coords[i].clone()).collect();
            if rank_of_int(&rows, r) != r - 1 {
                continue;
            }
            let ns = Matrix::from_int_rows(&rows, r).nullspace();
            let mut a = primitive_from_rational(&ns[0])?;
            let vals: Vec<i64> = coords.iter().map(|c| pair_int(&a, c)).collect();
            let pos = vals.iter().any(|&x| x > 0);
            let neg = vals.iter().any(|&x| x < 0);
            if pos && neg {
                continue;
            }
            if neg {
                a.iter_mut().for_each(|x| *x = -*x);
            }
            if !pos && !neg {
                continue;
            }
            if !normals.contains(&a) {
                normals.push(a);
            }
        }
        Ok((lat.basis, coords, normals))
    }

    fn is_pointed(&self) -> Result<bool> {
        if self.generators.is_empty() {
            return Ok(true);
        }
        let (basis, _, normals) = self.span_facets()?;
        Ok(rank_of_int(&normals, basis.len()) == basis.len())
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        if x.iter().all(Zero::is_zero) {
            return Ok(true);
        }
        if self.generators.is_empty() {
            return Ok(false);
        }
        let (basis, _, normals) = self.span_facets()?;
        // coordinates of x in the span basis
        let bt = Matrix::from_int_rows(&basis, self.ambient).transpose();
        let Ok(c) = bt.solve(x) else {
            return Ok(false);
        };
        if bt.mul_vec(&c) != x {
            return Ok(false);
        }
        Ok(normals.iter().all(|a| {
            a.iter().zip(&c).fold(Rational::zero(), |acc, (&ai, ci)| {
                acc + ci * BigInt::from(ai)
            }) >= Rational::zero()
        }))
    }

    /// Placing triangulation of the generators, inserted in order.
    pub fn triangulate(&self) -> Result<Vec<Cone>> {
        if self.generators.is_empty() {
            return Ok(vec![self.clone()]);
        }
        let lat = span_lattice(&self.generators, self.ambient)?;
        let simplices = placing_triangulation(&lat.coords, lat.rank())?;
        Ok(simplices.into_iter().map(|s| self.face_cone(&s)).collect())
    }
}

/// All subsets of `0..k`, by size then lexicographically.
pub fn subsets(k: usize) -> Vec<Vec<usize>> {
    (0..=k).flat_map(|s| subsets_of_size(k, s)).collect()
}

/// All `size`-subsets of `0..k` in lexicographic order.
pub fn subsets_of_size(k: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: usize, k: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            if k - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, k, size, cur, out);
            cur.pop();
        }
    }
    rec(0, k, size, &mut cur, &mut out);
    out
}

/// Placing triangulation of a pointed vector configuration spanning
/// `Q^rank`. Returns simplices as sorted index lists.
fn placing_triangulation(vectors: &[IntVec], rank: usize) -> Result<Vec<Vec<usize>>> {
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    let mut used: Vec<IntVec> = Vec::new();
    for (i, g) in vectors.iter().enumerate() {
        if g.iter().all(|&x| x == 0) {
            continue;
        }
        if simplices.is_empty() {
            simplices.push(vec![i]);
            used.push(g.clone());
            continue;
        }
        let cur_rank = rank_of_int(&used, rank);
        let mut with_g = used.clone();
        with_g.push(g.clone());
        if rank_of_int(&with_g, rank) > cur_rank {
            for s in &mut simplices {
                s.push(i);
            }
        } else {
            // facet -> (occurrences, owning simplex, opposite index)
            let mut facets: BTreeMap<Vec<usize>, (usize, usize, usize)> = BTreeMap::new();
            for (si, s) in simplices.iter().enumerate() {
                for &o in s {
                    let f: Vec<usize> = s.iter().copied().filter(|&x| x != o).collect();
                    let e = facets.entry(f).or_insert((0, si, o));
                    e.0 += 1;
                }
            }
            let mut added = Vec::new();
            for (f, (count, si, o)) in facets {
                if count != 1 {
                    continue;
                }
                let s = &simplices[si];
                // coordinates of g in the simplex basis
                let cols: Vec<IntVec> = s.iter().map(|&j| vectors[j].clone()).collect();
                let a = Matrix::from_int_rows(&cols, rank).transpose();
                let c = a.solve(&int_vec_to_rat(g))?;
                let pos = s.iter().position(|&j| j == o).expect("opposite vertex");
                if c[pos].is_negative() {
                    let mut ns = f.clone();
                    ns.push(i);
                    ns.sort_unstable();
                    added.push(ns);
                }
            }
            simplices.extend(added);
        }
        used.push(g.clone());
    }
    Ok(simplices)
}

/// A subdivision of a cone into simplicial cones of the same dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub parent: Cone,
    pub children: Vec<Cone>,
}

/// Subdivides a pointed cone into basic cones: placing triangulation
/// followed by stellar subdivision of each non-basic simplex.
pub fn subdivide_to_basic(cone: &Cone) -> Result<Subdivision> {
    let mut children = Vec::new();
    for simplex in cone.triangulate()? {
        stellar_to_basic(simplex.generators().to_vec(), cone.ambient(), &mut children)?;
    }
    Ok(Subdivision {
        parent: cone.clone(),
        children: children
            .into_iter()
            .map(|g| Cone::from_trusted(g, cone.ambient()))
            .collect(),
    })
}

/// Stellar subdivision of a simplicial cone at the nonzero point of its
/// half-open parallelepiped with minimal coefficient sum (ties broken
/// lexicographically), recursively until every child is basic.
pub fn stellar_to_basic(
    gens: Vec<IntVec>,
    ambient: usize,
    out: &mut Vec<Vec<IntVec>>,
) -> Result<()> {
    let pts = parallelepiped_points(&gens, ambient)?;
    let Some((p, lambda)) = pts.into_iter().min_by(|a, b| {
        let sa: Rational = a.1.iter().sum();
        let sb: Rational = b.1.iter().sum();
        sa.cmp(&sb).then_with(|| a.0.cmp(&b.0))
    }) else {
        out.push(gens);
        return Ok(());
    };
    for (j, l) in lambda.iter().enumerate() {
        if l.is_zero() {
            continue;
        }
        let mut child = gens.clone();
        child[j] = p.clone();
        stellar_to_basic(child, ambient, out)?;
    }
    Ok(())
}

/// A facet of a full-dimensional polytope: `<normal, x> >= offset` with
/// equality exactly on `vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: IntVec,
    pub offset: i64,
    pub vertices: Vec<usize>,
}

/// A nonempty face, identified by the indices of the vertices it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub dim: usize,
    /// Indices of the facets containing this face.
    pub facets: Vec<usize>,
}

/// A full-dimensional integral polytope given by its vertices.
#[derive(Clone, Debug)]
pub struct Polytope {
    vertices: Vec<IntVec>,
    ambient: usize,
    facets: Vec<Facet>,
    faces: Vec<Face>,
}

impl Polytope {
    /// Builds the polytope and its face lattice. Every input point must be
    /// a vertex. A single point is accepted only in ambient dimension 0.
    pub fn new(vertices: Vec<IntVec>) -> Result<Self> {
        let ambient = vertices
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Parse("polytope without vertices".into()))?;
        if ambient > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: ambient,
                max: MAX_DIM,
            });
        }
        for v in &vertices {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch(format!(
                    "vertex {} in ambient dimension {ambient}",
                    fmt_vec(v)
                )));
            }
        }
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(Error::NonExtremeVertex(fmt_vec(v)));
            }
        }
        let diffs: Vec<IntVec> = vertices
            .iter()
            .map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect())
            .collect();
        if rank_of_int(&diffs, ambient) != ambient {
            return Err(Error::PolytopeNotFullDim);
        }
        if ambient == 0 {
            return Ok(Polytope {
                vertices,
                ambient,
                facets: vec![],
                faces: vec![Face {
                    vertices: vec![0],
                    dim: 0,
                    facets: vec![],
                }],
            });
        }
        let facets = enumerate_facets(&vertices, ambient)?;
        let faces = close_faces(&vertices, ambient, &facets);
        for (i, v) in vertices.iter().enumerate() {
            if !faces.iter().any(|f| f.vertices == [i]) {
                return Err(Error::NonExtremeVertex(fmt_vec(v)));
            }
        }
        Ok(Polytope {
            vertices,
            ambient,
            facets,
            faces,
        })
    }

    /// Parses vertices given as rationals, rejecting non-integral points.
    pub fn from_rational(vertices: &[Vec<Rational>]) -> Result<Self> {
        let mut out = Vec::with_capacity(vertices.len());
        for v in vertices {
            let iv: Option<IntVec> = v.iter().map(crate::exact::to_int).collect();
            match iv {
                Some(iv) => out.push(iv),
                None => {
                    let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                    return Err(Error::NotIntegral(format!("({})", parts.join(","))));
                }
            }
        }
        Self::new(out)
    }

    pub fn vertices(&self) -> &[IntVec] {
        &self.vertices
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ambient
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// All nonempty faces, ordered by dimension and then vertex set. The
    /// last entry is the polytope itself.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_vertices(&self, face: &Face) -> Vec<IntVec> {
        face.vertices
            .iter()
            .map(|&i| self.vertices[i].clone())
            .collect()
    }

    /// Normal cone `C(P, F)`, generated by the inner normals of the facets
    /// containing `F`. It is `{0}` for `F = P`.
    pub fn normal_cone(&self, face: &Face) -> Cone {
        Cone::from_trusted(
            face.facets
                .iter()
                .map(|&i| self.facets[i].normal.clone())
                .collect(),
            self.ambient,
        )
    }

    /// Edge directions leaving a vertex (primitive), i.e. the generators of
    /// the tangent cone at that vertex.
    pub fn vertex_cone_generators(&self, vertex: usize) -> Vec<IntVec> {
        let v = &self.vertices[vertex];
        self.faces
            .iter()
            .filter(|f| f.dim == 1 && f.vertices.contains(&vertex))
            .map(|edge| {
                let other = edge
                    .vertices
                    .iter()
                    .copied()
                    .find(|&j| j != vertex)
                    .expect("edge has two vertices");
                let d: IntVec = self.vertices[other]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a - b)
                    .collect();
                primitive(&d).expect("distinct vertices")
            })
            .collect()
    }

    /// Generators of the tangent cone `T(P, F)`: edge directions from a
    /// vertex of `F` together with both signs of the edge directions of `F`
    /// (its lineality space).
    pub fn tangent_cone(&self, face: &Face) -> Vec<IntVec> {
        let x0 = face.vertices[0];
        let mut gens = self.vertex_cone_generators(x0);
        for &j in &face.vertices[1..] {
            let d: IntVec = self.vertices[j]
                .iter()
                .zip(&self.vertices[x0])
                .map(|(a, b)| a - b)
                .collect();
            let p = primitive(&d).expect("distinct vertices");
            let m: IntVec = p.iter().map(|x| -x).collect();
            for g in [p, m] {
                if !gens.contains(&g) {
                    gens.push(g);
                }
            }
        }
        gens
    }

    /// Supporting cone `P_v = v + T(P, v)` as `(apex, generators)`.
    pub fn supporting_cone(&self, vertex: usize) -> (IntVec, Vec<IntVec>) {
        (
            self.vertices[vertex].clone(),
            self.vertex_cone_generators(vertex),
        )
    }

    /// Volume of a face normalized by the lattice of its affine span, so a
    /// fundamental domain has volume 1 and a vertex has volume 1.
    pub fn normalized_volume(&self, face: &Face) -> Result<Rational> {
        normalized_volume(&self.face_vertices(face), self.ambient)
    }

    /// Exact membership test against the facet inequalities.
    pub fn contains_point(&self, x: &[i64]) -> bool {
        self.facets
            .iter()
            .all(|f| pair_int(&f.normal, x) >= f.offset)
    }

    /// All lattice points, by scanning the bounding box.
    pub fn lattice_points(&self) -> Result<Vec<IntVec>> {
        let n = self.ambient;
        let lo: IntVec = (0..n)
            .map(|i| self.vertices.iter().map(|v| v[i]).min().unwrap_or(0))
            .collect();
        let hi: IntVec = (0..n)
            .map(|i| self.vertices.iter().map(|v| v[i]).max().unwrap_or(0))
            .collect();
        let size = lo
            .iter()
            .zip(&hi)
            .try_fold(1u64, |acc, (l, h)| acc.checked_mul((h - l + 1) as u64))
            .unwrap_or(u64::MAX);
        if size > LATTICE_POINT_CAP {
            return Err(Error::TooLarge(format!("bounding box with {size} points")));
        }
        let mut out = Vec::new();
        let mut x = lo.clone();
        loop {
            if self.contains_point(&x) {
                out.push(x.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    return Ok(out);
                }
                if x[i] < hi[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = lo[i];
                i += 1;
            }
        }
    }

    /// The polytope translated by an integer vector; faces keep their
    /// indices.
    pub fn translate(&self, by: &[i64]) -> Polytope {
        let shift = |v: &IntVec| v.iter().zip(by).map(|(a, b)| a + b).collect::<IntVec>();
        Polytope {
            vertices: self.vertices.iter().map(shift).collect(),
            ambient: self.ambient,
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal.clone(),
                    offset: f.offset + pair_int(&f.normal, by),
                    vertices: f.vertices.clone(),
                })
                .collect(),
            faces: self.faces.clone(),
        }
    }
}

fn enumerate_facets(vertices: &[IntVec], n: usize) -> Result<Vec<Facet>> {
    let mut facets: Vec<Facet> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for sub in subsets_of_size(vertices.len(), n) {
        let base = &vertices[sub[0]];
        let rows: Vec<IntVec> = sub[1..]
            .iter()
            .map(|&i| vertices[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        if rank_of_int(&rows, n) != n - 1 {
            continue;
        }
        let ns = Matrix::from_rows(rows.iter().map(|r| int_vec_to_rat(r)).collect(), n).nullspace();
        let mut a = primitive_from_rational(&ns[0])?;
        let mut b = pair_int(&a, base);
        let vals: Vec<i64> = vertices.iter().map(|v| pair_int(&a, v) - b).collect();
        let pos = vals.iter().any(|&x| x > 0);
        let neg = vals.iter().any(|&x| x < 0);
        if pos && neg {
            continue;
        }
        if neg {
            a.iter_mut().for_each(|x| *x = -*x);
            b = -b;
        }
        let on: Vec<usize> = (0..vertices.len()).filter(|&i| vals[i] == 0).collect();
        if seen.insert(on.clone()) {
            facets.push(Facet {
                normal: a,
                offset: b,
                vertices: on,
            });
        }
    }
    facets.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(facets)
}

fn close_faces(vertices: &[IntVec], n: usize, facets: &[Facet]) -> Vec<Face> {
    let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    let all: Vec<usize> = (0..vertices.len()).collect();
    sets.insert(all);
    let mut frontier: Vec<Vec<usize>> = facets.iter().map(|f| f.vertices.clone()).collect();
    while let Some(s) = frontier.pop() {
        if s.is_empty() || !sets.insert(s.clone()) {
            continue;
        }
        for f in facets {
            let inter: Vec<usize> = s
                .iter()
                .copied()
                .filter(|i| f.vertices.contains(i))
                .collect();
            if !inter.is_empty() && !sets.contains(&inter) {
                frontier.push(inter);
            }
        }
    }
    let mut faces: Vec<Face> = sets
        .into_iter()
        .map(|vs| {
            let base = &vertices[vs[0]];
            let diffs: Vec<IntVec> = vs
                .iter()
                .map(|&i| vertices[i].iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            let dim = rank_of_int(&diffs, n);
            let containing = facets
                .iter()
                .enumerate()
                .filter(|(_, f)| vs.iter().all(|i| f.vertices.contains(i)))
                .map(|(i, _)| i)
                .collect();
            Face {
                vertices: vs,
                dim,
                facets: containing,
            }
        })
        .collect();
    faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.vertices.cmp(&b.vertices)));
    faces
}

/// Lattice simplices triangulating the convex hull of `points`, each given
/// as a list of points. All points must be vertices of their hull or lie
/// in it; non-vertices are allowed.
pub fn triangulate_points(points: &[IntVec], ambient: usize) -> Result<Vec<Vec<IntVec>>> {
    let homog: Vec<IntVec> = points
        .iter()
        .map(|p| std::iter::once(1).chain(p.iter().copied()).collect())
        .collect();
    let lat = span_lattice(&homog, ambient + 1)?;
    let simplices = placing_triangulation(&lat.coords, lat.rank())?;
    Ok(simplices
        .into_iter()
        .map(|s| s.iter().map(|&i| points[i].clone()).collect())
        .collect())
}

/// Edge vectors of a simplex expressed in a lattice basis of its span.
pub fn simplex_lattice_edges(simplex: &[IntVec], ambient: usize) -> Result<Vec<IntVec>> {
    let base = &simplex[0];
    let edges: Vec<IntVec> = simplex[1..]
        .iter()
        .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    Ok(span_lattice(&edges, ambient)?.coords)
}

/// Normalized volume of the convex hull of lattice points, relative to the
/// lattice of their affine span.
pub fn normalized_volume(points: &[IntVec], ambient: usize) -> Result<Rational> {
    if points.len() == 1 {
        return Ok(Rational::one());
    }
    // All simplices share one affine span, so one lattice basis serves all.
    let base = &points[0];
    let diffs: Vec<IntVec> = points
        .iter()
        .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let lat = span_lattice(&diffs, ambient)?;
    let m = lat.rank();
    let local: Vec<IntVec> = lat.coords.clone();
    let mut total = Rational::zero();
    for simplex in triangulate_points(&local, m)? {
        let edges: Vec<IntVec> = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| a - b).collect())
            .collect();
        total += Matrix::from_int_rows(&edges, m).det().abs();
    }
    let fact: BigInt = (1..=m as u64).map(BigInt::from).product();
    Ok(total / Rational::from_integer(fact))
}
