//! Rational polyhedral fans: validation, standard constructions for the
//! test corpus, stellar subdivision, and the complete/simplicial/smooth/
//! projective predicates. All geometry is exact.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactlin::{
    feasible, ivec, lp_feasible_point, rank_over, smith_normal_form, Feasibility, FieldOps,
    FieldSel, IMat, IneqRow, IneqSystem, Int, IntVec, QOps, Rat, Rel,
};

/// A cone of a fan, stored as sorted indices into the fan's ray list.
/// The listed rays are exactly the cone's extremal rays.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Cone {
    pub ray_indices: Vec<usize>,
}

impl Cone {
    pub fn new(mut ray_indices: Vec<usize>) -> Self {
        ray_indices.sort_unstable();
        ray_indices.dedup();
        Cone { ray_indices }
    }
}

/// A fan Δ in N_R: primitive ray generators plus maximal cones.
#[derive(Clone, Debug)]
pub struct Fan {
    pub rank: usize,
    pub rays: Vec<IntVec>,
    pub max_cones: Vec<Cone>,
    complete_cache: std::sync::OnceLock<bool>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.rays == other.rays && self.max_cones == other.max_cones
    }
}

impl Eq for Fan {}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FanViolation {
    #[error("ray {0} is not primitive")]
    NonPrimitiveRay(usize),
    #[error("rays {0} and {1} coincide")]
    DuplicateRay(usize, usize),
    #[error("ray {0} belongs to no maximal cone")]
    DanglingRay(usize),
    #[error("maximal cone {0} is not strongly convex")]
    NotStronglyConvex(usize),
    #[error("maximal cone {cone} lists ray {ray} that is not extremal in it")]
    RedundantRay { cone: usize, ray: usize },
    #[error("maximal cones {0} and {1} do not intersect in a common face")]
    BadIntersection(usize, usize),
    #[error("cone {cone} references ray index {ray} out of range")]
    RayIndexOutOfRange { cone: usize, ray: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FanPredicates {
    pub is_complete: bool,
    pub is_simplicial: bool,
    pub is_smooth: bool,
    pub has_ample: bool,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FanBuildError {
    #[error("weights must be positive with gcd 1")]
    InvalidWeights,
    #[error("blow-up center must be a smooth maximal cone")]
    NotSmoothCone,
    #[error("fan is invalid: {0}")]
    Invalid(FanViolation),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SubdivideError {
    #[error("vector lies outside the support of the fan")]
    NotInSupport,
    #[error("vector is already a ray of the fan")]
    AlreadyARay,
    #[error("vector is not primitive")]
    NotPrimitive,
}

pub fn is_primitive(v: &[Int]) -> bool {
    let g = v.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
    g.is_one()
}

impl Fan {
    pub fn new(rank: usize, rays: Vec<IntVec>, max_cones: Vec<Cone>) -> Self {
        Fan { rank, rays, max_cones, complete_cache: std::sync::OnceLock::new() }
    }

    pub fn is_complete(&self) -> bool {
        *self.complete_cache.get_or_init(|| self.check_complete())
    }

    pub fn ray_matrix(&self, ray_indices: &[usize]) -> IMat {
        IMat::from_rows(ray_indices.iter().map(|&i| self.rays[i].clone()).collect())
    }

    pub fn cone_dim(&self, ray_indices: &[usize]) -> usize {
        if ray_indices.is_empty() {
            return 0;
        }
        rank_over(&self.ray_matrix(ray_indices), FieldSel::Rationals)
    }

    /// Membership of v in the cone generated by the given rays.
    pub fn in_cone(&self, ray_indices: &[usize], v: &[Int]) -> bool {
        self.cone_membership(ray_indices, v, false)
    }

    /// Membership in {Σ λ_i u_i : λ_i > 0}, the relative interior.
    pub fn in_relint(&self, ray_indices: &[usize], v: &[Int]) -> bool {
        self.cone_membership(ray_indices, v, true)
    }

    fn cone_membership(&self, ray_indices: &[usize], v: &[Int], strict: bool) -> bool {
        let k = ray_indices.len();
        if k == 0 {
            return !strict && v.iter().all(|x| x.is_zero());
        }
        if !strict && k == self.cone_dim(ray_indices) {
            // simplicial fast path: unique rational solve
            let ops = QOps;
            let cols: Vec<Vec<Rat>> = (0..self.rank)
                .map(|c| {
                    ray_indices
                        .iter()
                        .map(|&i| Rat::from(self.rays[i][c].clone()))
                        .collect()
                })
                .collect();
            // rows of the system: one per ambient coordinate, unknowns λ
            let m: Vec<Vec<Rat>> = cols;
            let rhs = vec![v.iter().map(|x| Rat::from(x.clone())).collect::<Vec<_>>()];
            return match ops.solve(&m, k, &rhs) {
                Some(sol) => {
                    // consistency: re-check the product (solve ignores
                    // dependent rows only when consistent, so verify)
                    let ok = (0..self.rank).all(|c| {
                        let s: Rat = ray_indices
                            .iter()
                            .zip(&sol[0])
                            .map(|(&i, l)| Rat::from(self.rays[i][c].clone()) * l)
                            .sum();
                        s == Rat::from(v[c].clone())
                    });
                    ok && sol[0].iter().all(|l| !l.is_negative())
                }
                None => false,
            };
        }
        // general case: feasibility in the λ variables
        let rel = if strict { Rel::Gt } else { Rel::Ge };
        let mut rows = Vec::new();
        for c in 0..self.rank {
            let normal: IntVec = ray_indices.iter().map(|&i| self.rays[i][c].clone()).collect();
            rows.push(IneqRow { normal, offset: -Rat::from(v[c].clone()), rel: Rel::Eq });
        }
        for j in 0..k {
            let mut normal = vec![Int::zero(); k];
            normal[j] = Int::one();
            rows.push(IneqRow { normal, offset: Rat::zero(), rel });
        }
        feasible(&IneqSystem::new(k, rows)) != Feasibility::Empty
    }

    /// Proper faces of the cone on the given rays, as ray index subsets
    /// (the zero cone appears as the empty set when it is a face).
    pub fn proper_faces(&self, ray_indices: &[usize]) -> Vec<Vec<usize>> {
        let k = ray_indices.len();
        let mut out = Vec::new();
        for mask in 0..(1u32 << k) {
            let subset: Vec<usize> =
                (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| ray_indices[i]).collect();
            if subset.len() == k {
                continue;
            }
            if self.is_face_of(ray_indices, &subset) {
                out.push(subset);
            }
        }
        out
    }

    /// Facets (codimension-1 faces) of the cone on the given rays.
    pub fn facets_of(&self, ray_indices: &[usize]) -> Vec<Vec<usize>> {
        let d = self.cone_dim(ray_indices);
        if d == 0 {
            return Vec::new();
        }
        if ray_indices.len() == d {
            // simplicial: drop one ray
            return (0..d)
                .map(|i| {
                    ray_indices
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &r)| r)
                        .collect()
                })
                .collect();
        }
        self.proper_faces(ray_indices)
            .into_iter()
            .filter(|f| self.cone_dim(f) + 1 == d)
            .collect()
    }

    /// Does there exist a supporting hyperplane of the cone vanishing
    /// exactly on `subset`? (subset ⊆ ray_indices)
    fn is_face_of(&self, ray_indices: &[usize], subset: &[usize]) -> bool {
        let inside: std::collections::HashSet<usize> = subset.iter().copied().collect();
        let mut rows = Vec::new();
        for &r in ray_indices {
            let rel = if inside.contains(&r) { Rel::Eq } else { Rel::Gt };
            rows.push(IneqRow { normal: self.rays[r].clone(), offset: Rat::zero(), rel });
        }
        feasible(&IneqSystem::new(self.rank, rows)) != Feasibility::Empty
    }

    /// Ray set of the intersection of the listed maximal cones. For a valid
    /// fan this is the common face σ_{i_0} ∩ … ∩ σ_{i_p}.
    pub fn intersect_max_cones(&self, cone_indices: &[usize]) -> Vec<usize> {
        assert!(!cone_indices.is_empty());
        let mut current: Vec<usize> = self.max_cones[cone_indices[0]].ray_indices.clone();
        for &ci in &cone_indices[1..] {
            let target = &self.max_cones[ci].ray_indices;
            current.retain(|&r| self.in_cone(target, &self.rays[r]));
            if current.is_empty() {
                break;
            }
        }
        current
    }

    pub fn validate(&self) -> Vec<FanViolation> {
        let mut v = Vec::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for &r in &cone.ray_indices {
                if r >= self.rays.len() {
                    v.push(FanViolation::RayIndexOutOfRange { cone: ci, ray: r });
                    return v;
                }
            }
        }
        for (i, ray) in self.rays.iter().enumerate() {
            if ray.len() != self.rank || ray.iter().all(|x| x.is_zero()) || !is_primitive(ray) {
                v.push(FanViolation::NonPrimitiveRay(i));
            }
        }
        for i in 0..self.rays.len() {
            for j in i + 1..self.rays.len() {
                if self.rays[i] == self.rays[j] {
                    v.push(FanViolation::DuplicateRay(i, j));
                }
            }
        }
        if !v.is_empty() {
            return v;
        }
        for (i, _) in self.rays.iter().enumerate() {
            if !self.max_cones.iter().any(|c| c.ray_indices.contains(&i)) {
                v.push(FanViolation::DanglingRay(i));
            }
        }
        for (ci, cone) in self.max_cones.iter().enumerate() {
            if !self.strongly_convex(&cone.ray_indices) {
                v.push(FanViolation::NotStronglyConvex(ci));
                continue;
            }
            for (k, &r) in cone.ray_indices.iter().enumerate() {
                let others: Vec<usize> = cone
                    .ray_indices
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &x)| x)
                    .collect();
                if self.in_cone(&others, &self.rays[r]) {
                    v.push(FanViolation::RedundantRay { cone: ci, ray: r });
                }
            }
        }
        if !v.is_empty() {
            return v;
        }
        for i in 0..self.max_cones.len() {
            for j in i + 1..self.max_cones.len() {
                if !self.cones_meet_in_face(i, j) {
                    v.push(FanViolation::BadIntersection(i, j));
                }
            }
        }
        v
    }

    fn strongly_convex(&self, ray_indices: &[usize]) -> bool {
        let k = ray_indices.len();
        if k == 0 {
            return true;
        }
        // nontrivial nonnegative relation Σ λ_i u_i = 0 ⇔ cone contains a line
        let mut rows = Vec::new();
        for c in 0..self.rank {
            let normal: IntVec = ray_indices.iter().map(|&i| self.rays[i][c].clone()).collect();
            rows.push(IneqRow { normal, offset: Rat::zero(), rel: Rel::Eq });
        }
        for j in 0..k {
            let mut normal = vec![Int::zero(); k];
            normal[j] = Int::one();
            rows.push(IneqRow { normal, offset: Rat::zero(), rel: Rel::Ge });
        }
        rows.push(IneqRow {
            normal: vec![Int::one(); k],
            offset: -Rat::one(),
            rel: Rel::Ge,
        });
        feasible(&IneqSystem::new(k, rows)) == Feasibility::Empty
    }

    fn cones_meet_in_face(&self, i: usize, j: usize) -> bool {
        let si = &self.max_cones[i].ray_indices;
        let sj = &self.max_cones[j].ray_indices;
        let f: Vec<usize> =
            si.iter().copied().filter(|&r| self.in_cone(sj, &self.rays[r])).collect();
        let g: Vec<usize> =
            sj.iter().copied().filter(|&r| self.in_cone(si, &self.rays[r])).collect();
        let fs: std::collections::HashSet<usize> = f.iter().copied().collect();
        let gs: std::collections::HashSet<usize> = g.iter().copied().collect();
        if fs != gs {
            return false;
        }
        if fs.len() == si.len() || fs.len() == sj.len() {
            // one maximal cone inside the other
            return false;
        }
        // separating functional: zero on the common face, positive towards
        // σ_i, negative towards σ_j
        let mut rows = Vec::new();
        for &r in si {
            let rel = if fs.contains(&r) { Rel::Eq } else { Rel::Gt };
            rows.push(IneqRow { normal: self.rays[r].clone(), offset: Rat::zero(), rel });
        }
        for &r in sj {
            if fs.contains(&r) {
                continue;
            }
            let neg: IntVec = self.rays[r].iter().map(|x| -x).collect();
            rows.push(IneqRow { normal: neg, offset: Rat::zero(), rel: Rel::Gt });
        }
        feasible(&IneqSystem::new(self.rank, rows)) != Feasibility::Empty
    }

    pub fn predicates(&self) -> FanPredicates {
        debug_assert!(self.validate().is_empty());
        let is_simplicial = self
            .max_cones
            .iter()
            .all(|c| c.ray_indices.len() == self.cone_dim(&c.ray_indices));
        let is_smooth = is_simplicial
            && self.max_cones.iter().all(|c| {
                smith_normal_form(&self.ray_matrix(&c.ray_indices))
                    .diagonal()
                    .iter()
                    .all(|d| d.is_one())
            });
        let is_complete = self.is_complete();
        let has_ample = is_complete && self.find_ample_qdivisor().is_some();
        FanPredicates { is_complete, is_simplicial, is_smooth, has_ample }
    }

    fn check_complete(&self) -> bool {
        if self.max_cones.is_empty() {
            return false;
        }
        if !self.max_cones.iter().all(|c| self.cone_dim(&c.ray_indices) == self.rank) {
            return false;
        }
        // wall pairing: every facet of a maximal cone is shared by exactly
        // two maximal cones, and the dual graph is connected
        let mut wall_owners: std::collections::HashMap<Vec<usize>, Vec<usize>> =
            std::collections::HashMap::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for mut f in self.facets_of(&cone.ray_indices) {
                f.sort_unstable();
                wall_owners.entry(f).or_default().push(ci);
            }
        }
        if wall_owners.values().any(|owners| owners.len() != 2) {
            return false;
        }
        // connectivity
        let n = self.max_cones.len();
        let mut adj = vec![Vec::new(); n];
        for owners in wall_owners.values() {
            adj[owners[0]].push(owners[1]);
            adj[owners[1]].push(owners[0]);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for &d in &adj[c] {
                if !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// A rational coefficient vector d whose support function is strictly
    /// convex, i.e. an ample Q-Cartier Q-divisor Σ d_ρ D_ρ, if one exists.
    /// Only meaningful on complete fans.
    pub fn find_ample_qdivisor(&self) -> Option<Vec<Rat>> {
        let nrays = self.rays.len();
        let ops = QOps;
        let mut ineqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
        let mut eqs: Vec<(Vec<Rat>, Rat)> = Vec::new();
        for cone in &self.max_cones {
            // basis of n independent rays in the cone
            let basis = independent_subset(self, &cone.ray_indices)?;
            let mt: Vec<Vec<Rat>> = (0..self.rank)
                .map(|c| {
                    basis.iter().map(|&i| Rat::from(self.rays[i][c].clone())).collect()
                })
                .collect();
            // w solves M_B^T w = u_ρ; then ⟨m_σ, u_ρ⟩ = −w·d_B
            for (global, u) in self.rays.iter().enumerate() {
                if basis.contains(&global) {
                    continue;
                }
                let rhs = vec![u.iter().map(|x| Rat::from(x.clone())).collect::<Vec<_>>()];
                let w = ops.solve(&mt, self.rank, &rhs)?;
                let mut coeffs = vec![Rat::zero(); nrays];
                for (bi, &b) in basis.iter().enumerate() {
                    coeffs[b] = -&w[0][bi];
                }
                coeffs[global] += Rat::one();
                if cone.ray_indices.contains(&global) {
                    // Cartier consistency inside the cone
                    eqs.push((coeffs, Rat::zero()));
                } else {
                    // strict convexity across walls (homogeneous, so ≥ 1)
                    ineqs.push((coeffs, Rat::one()));
                }
            }
        }
        lp_feasible_point(nrays, &ineqs, &eqs)
    }

    /// Canonical JSON form: rays sorted lexicographically, cone lists sorted.
    pub fn canonicalize(&self) -> Fan {
        let mut order: Vec<usize> = (0..self.rays.len()).collect();
        order.sort_by(|&a, &b| self.rays[a].cmp(&self.rays[b]));
        let mut inv = vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new;
        }
        let rays = order.iter().map(|&o| self.rays[o].clone()).collect();
        let mut max_cones: Vec<Cone> = self
            .max_cones
            .iter()
            .map(|c| Cone::new(c.ray_indices.iter().map(|&r| inv[r]).collect()))
            .collect();
        max_cones.sort_by(|a, b| a.ray_indices.cmp(&b.ray_indices));
        Fan::new(self.rank, rays, max_cones)
    }
}

// ---------------------------------------------------------------------------
// JSON interchange

#[derive(serde::Serialize, serde::Deserialize)]
struct FanJson {
    rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl serde::Serialize for Fan {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use num_traits::ToPrimitive;
        let f = self.canonicalize();
        FanJson {
            rank: f.rank,
            rays: f
                .rays
                .iter()
                .map(|r| r.iter().map(|x| x.to_i64().expect("ray coordinate fits i64")).collect())
                .collect(),
            max_cones: f.max_cones.iter().map(|c| c.ray_indices.clone()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Fan {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = FanJson::deserialize(d)?;
        Ok(Fan::new(
            j.rank,
            j.rays.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect(),
            j.max_cones.into_iter().map(Cone::new).collect(),
        ))
    }
}

fn independent_subset(fan: &Fan, ray_indices: &[usize]) -> Option<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::new();
    for &r in ray_indices {
        let mut trial = chosen.clone();
        trial.push(r);
        if fan.cone_dim(&trial) == trial.len() {
            chosen = trial;
        }
        if chosen.len() == fan.rank {
            return Some(chosen);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Standard constructions

#[derive(Clone, Debug)]
pub enum FanKind {
    ProjectiveSpace(usize),
    WeightedProjective(Vec<u64>),
    Hirzebruch(i64),
    Product(Box<FanKind>, Box<FanKind>),
    /// Stellar subdivision at the ray sum of a smooth maximal cone.
    BlowupAtFixedPoint(Box<Fan>, Cone),
}

pub fn standard_fan(kind: &FanKind) -> Result<Fan, FanBuildError> {
    let fan = match kind {
        FanKind::ProjectiveSpace(n) => projective_space(*n),
        FanKind::WeightedProjective(q) => weighted_projective(q)?,
        FanKind::Hirzebruch(a) => hirzebruch(*a),
        FanKind::Product(k1, k2) => product(&standard_fan(k1)?, &standard_fan(k2)?),
        FanKind::BlowupAtFixedPoint(fan, cone) => blowup_at_fixed_point(fan, cone)?,
    };
    match fan.validate().into_iter().next() {
        None => Ok(fan),
        Some(v) => Err(FanBuildError::Invalid(v)),
    }
}

fn projective_space(n: usize) -> Fan {
    assert!(n >= 1);
    let mut rays: Vec<IntVec> = (0..n)
        .map(|i| {
            let mut v = vec![Int::zero(); n];
            v[i] = Int::one();
            v
        })
        .collect();
    rays.push(vec![-Int::one(); n]);
    let max_cones = (0..=n)
        .map(|skip| Cone::new((0..=n).filter(|&i| i != skip).collect()))
        .collect();
    Fan::new(n, rays, max_cones)
}

fn weighted_projective(q: &[u64]) -> Result<Fan, FanBuildError> {
    let n = q.len().checked_sub(1).ok_or(FanBuildError::InvalidWeights)?;
    if n == 0 || q.iter().any(|&w| w == 0) {
        return Err(FanBuildError::InvalidWeights);
    }
    let g = q.iter().fold(0u64, |acc, &w| acc.gcd(&w));
    if g != 1 {
        return Err(FanBuildError::InvalidWeights);
    }
    // quotient Z^{n+1} / Z·q via Smith form: U·q has a single unit entry,
    // the remaining rows of U give coordinates on the quotient ≅ Z^n
    let qcol = IMat::from_rows(vec![q.iter().map(|&w| Int::from(w)).collect()]);
    let snf = smith_normal_form(&qcol.transpose());
    debug_assert!(snf.s[(0, 0)].is_one());
    let u = snf.u; // (n+1)×(n+1), rows 1.. project to the quotient
    let mut rays = Vec::new();
    for i in 0..=n {
        let mut v: IntVec = (1..=n).map(|r| u[(r, i)].clone()).collect();
        let g = v.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
        if !g.is_zero() && !g.is_one() {
            for x in v.iter_mut() {
                *x = &*x / &g;
            }
        }
        rays.push(v);
    }
    let max_cones = (0..=n)
        .map(|skip| Cone::new((0..=n).filter(|&i| i != skip).collect()))
        .collect();
    Ok(Fan::new(n, rays, max_cones))
}

fn hirzebruch(a: i64) -> Fan {
    let rays = vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, a]), ivec(&[0, -1])];
    let max_cones = vec![
        Cone::new(vec![0, 1]),
        Cone::new(vec![1, 2]),
        Cone::new(vec![2, 3]),
        Cone::new(vec![3, 0]),
    ];
    Fan::new(2, rays, max_cones)
}

pub fn product(f1: &Fan, f2: &Fan) -> Fan {
    let rank = f1.rank + f2.rank;
    let mut rays = Vec::new();
    for r in &f1.rays {
        let mut v = r.clone();
        v.extend(vec![Int::zero(); f2.rank]);
        rays.push(v);
    }
    for r in &f2.rays {
        let mut v = vec![Int::zero(); f1.rank];
        v.extend(r.clone());
        rays.push(v);
    }
    let offset = f1.rays.len();
    let mut max_cones = Vec::new();
    for c1 in &f1.max_cones {
        for c2 in &f2.max_cones {
            let mut idx = c1.ray_indices.clone();
            idx.extend(c2.ray_indices.iter().map(|&i| i + offset));
            max_cones.push(Cone::new(idx));
        }
    }
    Fan::new(rank, rays, max_cones)
}

fn blowup_at_fixed_point(fan: &Fan, cone: &Cone) -> Result<Fan, FanBuildError> {
    let c = fan
        .max_cones
        .iter()
        .find(|mc| mc.ray_indices == cone.ray_indices)
        .ok_or(FanBuildError::NotSmoothCone)?;
    let smooth = c.ray_indices.len() == fan.rank
        && smith_normal_form(&fan.ray_matrix(&c.ray_indices))
            .diagonal()
            .iter()
            .all(|d| d.is_one());
    if !smooth {
        return Err(FanBuildError::NotSmoothCone);
    }
    let mut v = vec![Int::zero(); fan.rank];
    for &r in &c.ray_indices {
        for (i, x) in fan.rays[r].iter().enumerate() {
            v[i] += x;
        }
    }
    stellar_subdivide(fan, &v).map_err(|_| FanBuildError::NotSmoothCone)
}

/// Stellar subdivision of the fan at a primitive vector in its support.
pub fn stellar_subdivide(fan: &Fan, v: &IntVec) -> Result<Fan, SubdivideError> {
    if !is_primitive(v) {
        return Err(SubdivideError::NotPrimitive);
    }
    if fan.rays.iter().any(|r| r == v) {
        return Err(SubdivideError::AlreadyARay);
    }
    let containing: Vec<usize> = (0..fan.max_cones.len())
        .filter(|&ci| fan.in_cone(&fan.max_cones[ci].ray_indices, v))
        .collect();
    if containing.is_empty() {
        return Err(SubdivideError::NotInSupport);
    }
    let mut rays = fan.rays.clone();
    let v_idx = rays.len();
    rays.push(v.clone());
    let mut max_cones = Vec::new();
    for (ci, cone) in fan.max_cones.iter().enumerate() {
        if !containing.contains(&ci) {
            max_cones.push(cone.clone());
            continue;
        }
        for f in fan.facets_of(&cone.ray_indices) {
            if fan.in_cone(&f, v) {
                continue;
            }
            let mut idx = f.clone();
            idx.push(v_idx);
            max_cones.push(Cone::new(idx));
        }
    }
    Ok(Fan::new(fan.rank, rays, max_cones))
}

pub fn projective_plane() -> Fan {
    standard_fan(&FanKind::ProjectiveSpace(2)).unwrap()
}

pub fn projective_line() -> Fan {
    standard_fan(&FanKind::ProjectiveSpace(1)).unwrap()
}
