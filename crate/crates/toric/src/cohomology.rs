//! Sheaf cohomology of rank-1 reflexive invariant sheaves O(D) and twisted
//! log-differential sheaves on complete toric varieties, via graded Čech
//! complexes on the maximal-cone affine cover.
//!
//! Every graded piece lives inside the fixed ambient space ∧^a M (the
//! rational-section model), so Čech maps are literal inclusions with ±1
//! signs. Degrees are enumerated by sign-pattern chambers of the hyperplane
//! arrangement ⟨m,u_ρ⟩ + c_ρ = 0.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::divisors::{QWeilDivisor, ReducedBoundary};
use crate::exactlin::{
    contract, dot, exterior_basis, feasible, lattice_points, Feasibility, FieldOps, FieldSel,
    FpOps, IneqRow, IneqSystem, Int, IntVec, QOps, Rat, Rel,
};
use crate::fans::Fan;

/// The sheaf whose cohomology is computed.
#[derive(Clone, Debug, PartialEq)]
pub enum SheafSpec {
    /// O_X(D) for an integral Weil divisor D.
    ReflexiveDiv(QWeilDivisor),
    /// Ω̃^a_X(log B) ⊗ O_X(G) for an integral Weil twist G.
    LogForms { a: usize, boundary: ReducedBoundary, twist: QWeilDivisor },
}

impl SheafSpec {
    pub fn reflexive(d: QWeilDivisor) -> Self {
        SheafSpec::ReflexiveDiv(d)
    }

    pub fn log_forms(a: usize, boundary: ReducedBoundary, twist: QWeilDivisor) -> Self {
        SheafSpec::LogForms { a, boundary, twist }
    }

    pub fn form_degree(&self) -> usize {
        match self {
            SheafSpec::ReflexiveDiv(_) => 0,
            SheafSpec::LogForms { a, .. } => *a,
        }
    }

    pub fn ray_coeffs(&self) -> &QWeilDivisor {
        match self {
            SheafSpec::ReflexiveDiv(d) => d,
            SheafSpec::LogForms { twist, .. } => twist,
        }
    }

    fn boundary(&self) -> Option<&ReducedBoundary> {
        match self {
            SheafSpec::ReflexiveDiv(_) => None,
            SheafSpec::LogForms { boundary, .. } => Some(boundary),
        }
    }

    fn validate(&self, fan: &Fan) -> Result<(), CohomologyError> {
        let d = self.ray_coeffs();
        if d.coeffs.len() != fan.rays.len() {
            return Err(CohomologyError::InvalidSpec("coefficient count != ray count".into()));
        }
        if !d.is_integral() {
            return Err(CohomologyError::InvalidSpec("divisor must be integral".into()));
        }
        if self.form_degree() > fan.rank {
            return Err(CohomologyError::InvalidSpec("form degree exceeds rank".into()));
        }
        if let Some(b) = self.boundary() {
            if b.ray_indices.iter().any(|&r| r >= fan.rays.len()) {
                return Err(CohomologyError::InvalidSpec("boundary ray out of range".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyTable {
    /// h^0..h^n.
    pub h: Vec<usize>,
    /// Lexicographically sorted (degree m, per-i dimensions).
    pub per_degree: Vec<(IntVec, Vec<usize>)>,
    pub field: FieldSel,
}

impl CohomologyTable {
    pub fn dims_at(&self, m: &IntVec) -> Option<&Vec<usize>> {
        self.per_degree
            .binary_search_by(|(deg, _)| deg.cmp(m))
            .ok()
            .map(|i| &self.per_degree[i].1)
    }

    /// h^i = 0 for all i > i0.
    pub fn is_zero_above(&self, i0: usize) -> bool {
        self.h.iter().skip(i0 + 1).all(|&hv| hv == 0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        use num_traits::ToPrimitive;
        serde_json::json!({
            "h": self.h,
            "field": self.field.label(),
            "per_degree": self.per_degree.iter().map(|(m, dims)| serde_json::json!({
                "m": m.iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>(),
                "dims": dims,
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("fan is not complete")]
    IncompleteFan,
    #[error("unbounded degree chamber carries nonzero cohomology: {0}")]
    EnumerationAnomaly(String),
    #[error("invalid sheaf specification: {0}")]
    InvalidSpec(String),
    #[error("cone is not a cone of the fan")]
    ConeNotInFan,
}

// ---------------------------------------------------------------------------
// Graded pieces

/// Basis (columns in the subset basis of ∧^a M_Q) of the degree-m piece of
/// the sheaf over the affine open of the cone with the given rays.
pub fn graded_piece(
    fan: &Fan,
    spec: &SheafSpec,
    cone_rays: &[usize],
    m: &IntVec,
) -> Result<Vec<Vec<Rat>>, CohomologyError> {
    spec.validate(fan)?;
    if cone_rays.iter().any(|&r| r >= fan.rays.len()) {
        return Err(CohomologyError::ConeNotInFan);
    }
    let in_some_cone = cone_rays.is_empty()
        || fan
            .max_cones
            .iter()
            .any(|c| cone_rays.iter().all(|&r| fan.in_cone(&c.ray_indices, &fan.rays[r])));
    if !in_some_cone {
        return Err(CohomologyError::ConeNotInFan);
    }
    let coeffs = spec.ray_coeffs();
    let pattern: Vec<i8> = fan
        .rays
        .iter()
        .zip(&coeffs.coeffs)
        .map(|(u, c)| sign_of(&(Rat::from(dot(m, u)) + c)))
        .collect();
    let ops = QOps;
    Ok(piece_for_pattern(&ops, fan, spec, cone_rays, &pattern).unwrap_or_default())
}

fn sign_of(x: &Rat) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// None when some ray of the cone has a negative value (piece is zero and
/// stays zero on every larger nerve cone through it).
fn piece_for_pattern<O: FieldOps>(
    ops: &O,
    fan: &Fan,
    spec: &SheafSpec,
    cone_rays: &[usize],
    pattern: &[i8],
) -> Option<Vec<Vec<O::Elem>>> {
    let n = fan.rank;
    let a = spec.form_degree();
    let ambient = exterior_basis(n, a).len();
    if cone_rays.iter().any(|&r| pattern[r] < 0) {
        return None;
    }
    let eq_rays: Vec<usize> = cone_rays
        .iter()
        .copied()
        .filter(|&r| pattern[r] == 0 && spec.boundary().map_or(true, |b| !b.contains(r)))
        .collect();
    if matches!(spec, SheafSpec::ReflexiveDiv(_)) || eq_rays.is_empty() {
        // full ambient space
        let mut basis = Vec::new();
        for j in 0..ambient {
            let mut col = vec![ops.zero(); ambient];
            col[j] = ops.one();
            basis.push(col);
        }
        return Some(basis);
    }
    // kernel of the stacked contraction conditions ι_{u_ρ} η = 0
    let mut rows: Vec<Vec<O::Elem>> = Vec::new();
    for &r in &eq_rays {
        let c = contract(&fan.rays[r], a).expect("degree in range");
        for i in 0..c.rows {
            rows.push((0..c.cols).map(|j| ops.from_int(&c[(i, j)])).collect());
        }
    }
    Some(ops.kernel_basis(&rows, ambient))
}

// ---------------------------------------------------------------------------
// Nerve of the maximal-cone cover

struct NerveEntry {
    rays: Vec<usize>,
}

struct Nerve {
    /// levels[p] = entries for index sets of size p+1, in lexicographic
    /// order of the index set
    levels: Vec<Vec<NerveEntry>>,
    /// position of each index set within its level
    index: HashMap<Vec<usize>, usize>,
}

fn build_nerve(fan: &Fan, max_level: usize) -> Nerve {
    let k = fan.max_cones.len();
    let mut levels = Vec::new();
    let mut index = HashMap::new();
    for p in 0..=max_level.min(k - 1) {
        let mut entries = Vec::new();
        let mut it = SubsetIter::new(k, p + 1);
        while let Some(subset) = it.next() {
            let rays = fan.intersect_max_cones(&subset);
            index.insert(subset, entries.len());
            entries.push(NerveEntry { rays });
        }
        levels.push(entries);
    }
    Nerve { levels, index }
}

// ---------------------------------------------------------------------------
// Per-pattern complexes

/// The Čech complex of one graded degree (equivalently, one sign-pattern
/// chamber), in the bases chosen deterministically by the field backend.
pub struct DegreeComplex<E> {
    /// dims[p] = total dimension of C^p
    pub dims: Vec<usize>,
    /// diffs[p] : C^p → C^{p+1}, rows × cols = dims[p+1] × dims[p]
    pub diffs: Vec<Vec<Vec<E>>>,
    /// piece_dims[p][j] = dimension of the piece over the j-th nerve cone
    pub piece_dims: Vec<Vec<usize>>,
}

/// Reusable nerve of the maximal-cone cover, truncated at level rank+1
/// (sufficient for h^0..h^n).
pub struct CechNerve(Nerve);

impl CechNerve {
    pub fn new(fan: &Fan) -> Self {
        CechNerve(build_nerve(fan, fan.rank + 1))
    }
}

/// Sign pattern of ⟨m,u_ρ⟩ + c_ρ over all rays.
fn degree_pattern(fan: &Fan, spec: &SheafSpec, m: &IntVec) -> Vec<i8> {
    fan.rays
        .iter()
        .zip(&spec.ray_coeffs().coeffs)
        .map(|(u, c)| sign_of(&(Rat::from(dot(m, u)) + c)))
        .collect()
}

pub fn degree_complex<O: FieldOps>(
    ops: &O,
    fan: &Fan,
    spec: &SheafSpec,
    nerve: &CechNerve,
    m: &IntVec,
) -> Result<DegreeComplex<O::Elem>, CohomologyError> {
    spec.validate(fan)?;
    let pattern = degree_pattern(fan, spec, m);
    Ok(build_pattern_complex(ops, fan, spec, &nerve.0, &pattern))
}

/// h^0..h^n of a single degree's complex.
pub fn degree_cohomology<O: FieldOps>(
    ops: &O,
    cx: &DegreeComplex<O::Elem>,
    rank: usize,
) -> Vec<usize> {
    complex_cohomology(ops, cx, rank)
}

fn build_pattern_complex<O: FieldOps>(
    ops: &O,
    fan: &Fan,
    spec: &SheafSpec,
    nerve: &Nerve,
    pattern: &[i8],
) -> DegreeComplex<O::Elem> {
    // pieces per level, with offsets into the direct sum
    let mut bases: Vec<Vec<Vec<Vec<O::Elem>>>> = Vec::new();
    let mut offsets: Vec<Vec<usize>> = Vec::new();
    let mut dims = Vec::new();
    let mut piece_dims = Vec::new();
    for level in &nerve.levels {
        let mut lvl_bases = Vec::new();
        let mut lvl_offsets = Vec::new();
        let mut total = 0usize;
        for entry in level {
            let b = piece_for_pattern(ops, fan, spec, &entry.rays, pattern).unwrap_or_default();
            lvl_offsets.push(total);
            total += b.len();
            lvl_bases.push(b);
        }
        piece_dims.push(lvl_bases.iter().map(|b: &Vec<Vec<O::Elem>>| b.len()).collect());
        bases.push(lvl_bases);
        offsets.push(lvl_offsets);
        dims.push(total);
    }
    let mut diffs = Vec::new();
    for p in 0..nerve.levels.len().saturating_sub(1) {
        let rows = dims[p + 1];
        let cols = dims[p];
        let mut mat = vec![vec![ops.zero(); cols]; rows];
        let mut subset_iter = SubsetIter::new(fan.max_cones.len(), p + 2);
        let mut jpos = 0usize;
        while let Some(j_set) = subset_iter.next() {
            let target_basis = &bases[p + 1][jpos];
            let target_off = offsets[p + 1][jpos];
            jpos += 1;
            if target_basis.is_empty() {
                continue;
            }
            for t in 0..j_set.len() {
                let mut i_set = j_set.clone();
                i_set.remove(t);
                let ipos = nerve.index[&i_set];
                let src_basis = &bases[p][ipos];
                if src_basis.is_empty() {
                    continue;
                }
                let src_off = offsets[p][ipos];
                // inclusion piece(τ_I) ⊆ piece(τ_J) in the chosen bases
                let tb_rows: Vec<Vec<O::Elem>> = transpose_cols(target_basis);
                let coords = ops
                    .solve(&tb_rows, target_basis.len(), src_basis)
                    .expect("graded piece inclusion must be solvable");
                let sign_neg = t % 2 == 1;
                for (c, col) in coords.iter().enumerate() {
                    for (r, v) in col.iter().enumerate() {
                        let v = if sign_neg { ops.neg(v) } else { v.clone() };
                        mat[target_off + r][src_off + c] =
                            ops.add(&mat[target_off + r][src_off + c], &v);
                    }
                }
            }
        }
        diffs.push(mat);
    }
    DegreeComplex { dims, diffs, piece_dims }
}

/// View the basis columns as a matrix with ambient rows.
fn transpose_cols<E: Clone>(cols: &[Vec<E>]) -> Vec<Vec<E>> {
    let rows = cols[0].len();
    (0..rows)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect()
}

struct SubsetIter {
    n: usize,
    k: usize,
    cur: Option<Vec<usize>>,
}

impl SubsetIter {
    fn new(n: usize, k: usize) -> Self {
        let cur = if k <= n { Some((0..k).collect()) } else { None };
        SubsetIter { n, k, cur }
    }

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.cur.clone()?;
        // advance
        let mut next = cur.clone();
        let mut i = self.k;
        let mut advanced = false;
        while i > 0 {
            i -= 1;
            if next[i] != i + self.n - self.k {
                next[i] += 1;
                for j in i + 1..self.k {
                    next[j] = next[j - 1] + 1;
                }
                advanced = true;
                break;
            }
        }
        self.cur = if advanced { Some(next) } else { None };
        Some(cur)
    }
}

fn complex_cohomology<O: FieldOps>(
    ops: &O,
    cx: &DegreeComplex<O::Elem>,
    top: usize,
) -> Vec<usize> {
    let levels = cx.dims.len();
    let rank = |p: usize| -> usize {
        if p >= cx.diffs.len() || cx.diffs[p].is_empty() || cx.dims[p] == 0 {
            0
        } else {
            ops.rank(&cx.diffs[p])
        }
    };
    let mut h = Vec::new();
    let mut prev_rank = 0usize;
    for i in 0..=top {
        let dim_i = if i < levels { cx.dims[i] } else { 0 };
        let r_i = if i < levels { rank(i) } else { 0 };
        let hv = dim_i.saturating_sub(r_i + prev_rank);
        debug_assert!(dim_i >= r_i + prev_rank, "cohomology dimension underflow");
        h.push(hv);
        prev_rank = r_i;
    }
    h
}

// ---------------------------------------------------------------------------
// Degree enumeration and tables

fn pattern_row(fan: &Fan, coeffs: &QWeilDivisor, ray: usize, sign: i8) -> IneqRow {
    let u = &fan.rays[ray];
    let c = &coeffs.coeffs[ray];
    match sign {
        0 => IneqRow { normal: u.clone(), offset: c.clone(), rel: Rel::Eq },
        1 => IneqRow { normal: u.clone(), offset: c.clone(), rel: Rel::Gt },
        _ => IneqRow {
            normal: u.iter().map(|x| -x).collect(),
            offset: -c,
            rel: Rel::Gt,
        },
    }
}

/// Shared analysis for one (fan, sheaf) pair over several fields.
pub fn cohomology_tables(
    fan: &Fan,
    spec: &SheafSpec,
    fields: &[FieldSel],
) -> Result<Vec<CohomologyTable>, CohomologyError> {
    Ok(cohomology_tables_shared(fan, std::slice::from_ref(spec), fields)?.pop().unwrap())
}

/// Shared analysis for several sheaves with identical ray coefficients
/// (hence identical degree chambers) over several fields. The expensive
/// chamber enumeration and lattice-point counting run once; only the
/// per-chamber complexes differ. Result is indexed `[spec][field]`.
pub fn cohomology_tables_shared(
    fan: &Fan,
    specs: &[SheafSpec],
    fields: &[FieldSel],
) -> Result<Vec<Vec<CohomologyTable>>, CohomologyError> {
    assert!(!specs.is_empty());
    for spec in specs {
        spec.validate(fan)?;
        if spec.ray_coeffs() != specs[0].ray_coeffs() {
            return Err(CohomologyError::InvalidSpec(
                "shared tables require identical ray coefficients".into(),
            ));
        }
    }
    if !fan.is_complete() {
        return Err(CohomologyError::IncompleteFan);
    }
    let n = fan.rank;
    let coeffs = specs[0].ray_coeffs();
    let nerve = build_nerve(fan, n + 1);
    let mut per_degree: Vec<Vec<(IntVec, Vec<usize>)>> =
        vec![Vec::new(); specs.len() * fields.len()];

    let nrays = fan.rays.len();
    let mut pattern = vec![0i8; nrays];
    let mut rows: Vec<IneqRow> = Vec::new();
    enumerate_patterns(
        fan,
        specs,
        coeffs,
        &nerve,
        fields,
        &mut pattern,
        &mut rows,
        0,
        &mut per_degree,
    )?;

    let mut out = Vec::new();
    for si in 0..specs.len() {
        let mut per_field = Vec::new();
        for (fi, field) in fields.iter().enumerate() {
            let mut pd = std::mem::take(&mut per_degree[si * fields.len() + fi]);
            pd.sort_by(|a, b| a.0.cmp(&b.0));
            let mut h = vec![0usize; n + 1];
            for (_, dims) in &pd {
                for (i, d) in dims.iter().enumerate() {
                    h[i] += d;
                }
            }
            per_field.push(CohomologyTable { h, per_degree: pd, field: *field });
        }
        out.push(per_field);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_patterns(
    fan: &Fan,
    specs: &[SheafSpec],
    coeffs: &QWeilDivisor,
    nerve: &Nerve,
    fields: &[FieldSel],
    pattern: &mut Vec<i8>,
    rows: &mut Vec<IneqRow>,
    depth: usize,
    per_degree: &mut [Vec<(IntVec, Vec<usize>)>],
) -> Result<(), CohomologyError> {
    let nrays = fan.rays.len();
    if depth == nrays {
        return handle_pattern(fan, specs, nerve, fields, pattern, rows, per_degree);
    }
    for sign in [-1i8, 0, 1] {
        pattern[depth] = sign;
        rows.push(pattern_row(fan, coeffs, depth, sign));
        let sys = IneqSystem::new(fan.rank, rows.clone());
        if feasible(&sys) != Feasibility::Empty {
            enumerate_patterns(
                fan, specs, coeffs, nerve, fields, pattern, rows, depth + 1, per_degree,
            )?;
        }
        rows.pop();
    }
    Ok(())
}

fn handle_pattern(
    fan: &Fan,
    specs: &[SheafSpec],
    nerve: &Nerve,
    fields: &[FieldSel],
    pattern: &[i8],
    rows: &[IneqRow],
    per_degree: &mut [Vec<(IntVec, Vec<usize>)>],
) -> Result<(), CohomologyError> {
    let sys = IneqSystem::new(fan.rank, rows.to_vec());
    let class = feasible(&sys);
    let (points, bounded) = match class {
        Feasibility::Empty => return Ok(()),
        Feasibility::Bounded => (lattice_points(&sys).expect("bounded"), true),
        Feasibility::Unbounded => (box_lattice_points(fan, &specs[0], &sys), false),
    };
    if points.is_empty() {
        return Ok(());
    }
    for (si, spec) in specs.iter().enumerate() {
        let mut any_nonzero = false;
        let mut dims_per_field = Vec::new();
        for field in fields {
            let dims = match field {
                FieldSel::Rationals => {
                    let ops = QOps;
                    let cx = build_pattern_complex(&ops, fan, spec, nerve, pattern);
                    complex_cohomology(&ops, &cx, fan.rank)
                }
                FieldSel::PrimeField(p) => {
                    let ops = FpOps::new(*p);
                    let cx = build_pattern_complex(&ops, fan, spec, nerve, pattern);
                    complex_cohomology(&ops, &cx, fan.rank)
                }
            };
            if dims.iter().any(|&d| d > 0) {
                any_nonzero = true;
            }
            dims_per_field.push(dims);
        }
        if !any_nonzero {
            continue;
        }
        if !bounded {
            return Err(CohomologyError::EnumerationAnomaly(format!(
                "pattern {:?} unbounded with cohomology {:?}",
                pattern, dims_per_field
            )));
        }
        for (fi, dims) in dims_per_field.into_iter().enumerate() {
            if dims.iter().all(|&d| d == 0) {
                continue;
            }
            for m in &points {
                per_degree[si * fields.len() + fi].push((m.clone(), dims.clone()));
            }
        }
    }
    Ok(())
}

/// Diagnostic probe for unbounded chambers: lattice points in a box sized
/// from the coefficient data. Only used to detect enumeration anomalies.
fn box_lattice_points(fan: &Fan, spec: &SheafSpec, sys: &IneqSystem) -> Vec<IntVec> {
    let bound: Int = spec
        .ray_coeffs()
        .coeffs
        .iter()
        .map(|c| c.ceil().to_integer().abs())
        .max()
        .unwrap_or_else(Int::zero)
        + Int::from(10);
    let mut rows = sys.rows.clone();
    for i in 0..fan.rank {
        let mut pos = vec![Int::zero(); fan.rank];
        pos[i] = Int::one();
        rows.push(IneqRow {
            normal: pos.clone(),
            offset: Rat::from(bound.clone()),
            rel: Rel::Ge,
        });
        rows.push(IneqRow {
            normal: pos.iter().map(|x| -x).collect(),
            offset: Rat::from(bound.clone()),
            rel: Rel::Ge,
        });
    }
    lattice_points(&IneqSystem::new(fan.rank, rows)).expect("boxed system is bounded")
}

/// Single-field convenience wrapper.
pub fn cohomology_table(
    fan: &Fan,
    spec: &SheafSpec,
    field: FieldSel,
) -> Result<CohomologyTable, CohomologyError> {
    Ok(cohomology_tables(fan, spec, &[field])?.pop().unwrap())
}

/// Degrees with potentially nonzero cohomology (over Q), sorted.
pub fn relevant_degrees(fan: &Fan, spec: &SheafSpec) -> Result<Vec<IntVec>, CohomologyError> {
    let t = cohomology_table(fan, spec, FieldSel::Rationals)?;
    Ok(t.per_degree.into_iter().map(|(m, _)| m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisors::canonical_divisor;
    use crate::exactlin::ivec;
    use crate::fans::{product, projective_line, projective_plane};

    fn refl(coeffs: &[i64]) -> SheafSpec {
        SheafSpec::reflexive(QWeilDivisor::from_i64(coeffs))
    }

    #[test]
    fn graded_piece_affine_line_log_forms() {
        // A^1-cone inside P^1; log pole toggles the degree-0 piece of Ω̃^1
        let fan = projective_line();
        let no_log = SheafSpec::log_forms(1, ReducedBoundary::empty(), QWeilDivisor::zero(&fan));
        let with_log =
            SheafSpec::log_forms(1, ReducedBoundary::new(vec![0]), QWeilDivisor::zero(&fan));
        let m = ivec(&[0]);
        assert_eq!(graded_piece(&fan, &no_log, &[0], &m).unwrap().len(), 0);
        assert_eq!(graded_piece(&fan, &with_log, &[0], &m).unwrap().len(), 1);
    }

    #[test]
    fn graded_piece_p2_one_equality() {
        let fan = projective_plane();
        let spec = SheafSpec::log_forms(1, ReducedBoundary::empty(), QWeilDivisor::zero(&fan));
        // cone spanned by e_1, e_2; m = (1,0): equality at e_2 only
        let b = graded_piece(&fan, &spec, &[0, 1], &ivec(&[1, 0])).unwrap();
        assert_eq!(b.len(), 1);
        // the surviving form is orthogonal to (0,1)
        assert!(b[0][1].is_zero());
    }

    #[test]
    fn cone_not_in_fan() {
        let fan = projective_plane();
        let spec = refl(&[0, 0, 0]);
        assert_eq!(
            graded_piece(&fan, &spec, &[0, 1, 2], &ivec(&[0, 0])),
            Err(CohomologyError::ConeNotInFan)
        );
    }

    #[test]
    fn p1_line_bundles() {
        let fan = projective_line();
        for (d, h) in [(2i64, vec![3, 0]), (0, vec![1, 0]), (-1, vec![0, 0]), (-2, vec![0, 1])] {
            let t = cohomology_table(&fan, &refl(&[d, 0]), FieldSel::Rationals).unwrap();
            assert_eq!(t.h, h, "O({d}) on P^1");
        }
    }

    #[test]
    fn p1_relevant_degrees() {
        let fan = projective_line();
        let degs = relevant_degrees(&fan, &refl(&[2, 0])).unwrap();
        assert_eq!(degs, vec![ivec(&[-2]), ivec(&[-1]), ivec(&[0])]);
        assert!(relevant_degrees(&fan, &refl(&[-1, 0])).unwrap().is_empty());
    }

    #[test]
    fn p2_canonical() {
        let fan = projective_plane();
        let k = canonical_divisor(&fan);
        let t =
            cohomology_table(&fan, &SheafSpec::reflexive(k), FieldSel::Rationals).unwrap();
        assert_eq!(t.h, vec![0, 0, 1]);
        assert_eq!(t.per_degree.len(), 1);
        // the unique interior chamber {⟨m,u⟩+d < 0 ∀ρ} of K is {0}
        assert_eq!(t.per_degree[0].0, ivec(&[0, 0]));
    }

    #[test]
    fn p2_cotangent_hodge_numbers() {
        let fan = projective_plane();
        let spec = SheafSpec::log_forms(1, ReducedBoundary::empty(), QWeilDivisor::zero(&fan));
        let t = cohomology_table(&fan, &spec, FieldSel::Rationals).unwrap();
        assert_eq!(t.h, vec![0, 1, 0]);
    }

    #[test]
    fn p2_twisted_cotangent() {
        let fan = projective_plane();
        let o1 = QWeilDivisor::from_i64(&[1, 0, 0]);
        let o2 = QWeilDivisor::from_i64(&[2, 0, 0]);
        let t1 = cohomology_table(
            &fan,
            &SheafSpec::log_forms(1, ReducedBoundary::empty(), o1),
            FieldSel::Rationals,
        )
        .unwrap();
        assert_eq!(t1.h, vec![0, 0, 0]);
        let t2 = cohomology_table(
            &fan,
            &SheafSpec::log_forms(1, ReducedBoundary::empty(), o2),
            FieldSel::Rationals,
        )
        .unwrap();
        assert_eq!(t2.h, vec![3, 0, 0]);
    }

    #[test]
    fn structure_sheaf_acyclic_all_characteristics() {
        let fans = vec![projective_plane(), product(&projective_line(), &projective_line())];
        for fan in fans {
            let spec = SheafSpec::reflexive(QWeilDivisor::zero(&fan));
            for field in [FieldSel::Rationals, FieldSel::prime(2).unwrap(), FieldSel::prime(3).unwrap()]
            {
                let t = cohomology_table(&fan, &spec, field).unwrap();
                let mut expect = vec![0; fan.rank + 1];
                expect[0] = 1;
                assert_eq!(t.h, expect);
            }
        }
    }

    #[test]
    fn incomplete_fan_rejected() {
        let fan = crate::fans::Fan::new(
            2,
            vec![ivec(&[1, 0]), ivec(&[0, 1])],
            vec![crate::fans::Cone::new(vec![0, 1])],
        );
        assert_eq!(
            cohomology_table(&fan, &refl(&[0, 0]), FieldSel::Rationals).unwrap_err(),
            CohomologyError::IncompleteFan
        );
    }

    #[test]
    fn log_forms_a0_equals_reflexive() {
        let fan = projective_plane();
        let g = QWeilDivisor::from_i64(&[1, -1, 0]);
        for b in [ReducedBoundary::empty(), ReducedBoundary::new(vec![0, 2])] {
            let t_log = cohomology_table(
                &fan,
                &SheafSpec::log_forms(0, b, g.clone()),
                FieldSel::Rationals,
            )
            .unwrap();
            let t_refl =
                cohomology_table(&fan, &SheafSpec::reflexive(g.clone()), FieldSel::Rationals)
                    .unwrap();
            assert_eq!(t_log.h, t_refl.h);
        }
    }

    #[test]
    fn top_forms_equal_canonical_twist() {
        let fan = projective_plane();
        for g in [
            QWeilDivisor::zero(&fan),
            QWeilDivisor::from_i64(&[2, 0, 0]),
            QWeilDivisor::from_i64(&[4, 0, 0]),
        ] {
            let t_log = cohomology_table(
                &fan,
                &SheafSpec::log_forms(2, ReducedBoundary::empty(), g.clone()),
                FieldSel::Rationals,
            )
            .unwrap();
            let kg = canonical_divisor(&fan).add(&g);
            let t_refl =
                cohomology_table(&fan, &SheafSpec::reflexive(kg), FieldSel::Rationals).unwrap();
            assert_eq!(t_log.h, t_refl.h, "twist {:?}", g);
        }
    }

    #[test]
    fn full_boundary_freeness() {
        let fan = projective_plane();
        let all = ReducedBoundary::new(vec![0, 1, 2]);
        for g in [QWeilDivisor::zero(&fan), QWeilDivisor::from_i64(&[1, 0, 0])] {
            for a in 0..=2usize {
                let t_log = cohomology_table(
                    &fan,
                    &SheafSpec::log_forms(a, all.clone(), g.clone()),
                    FieldSel::Rationals,
                )
                .unwrap();
                let t_refl = cohomology_table(
                    &fan,
                    &SheafSpec::reflexive(g.clone()),
                    FieldSel::Rationals,
                )
                .unwrap();
                let binom = [1usize, 2, 1][a];
                let expect: Vec<usize> = t_refl.h.iter().map(|&x| x * binom).collect();
                assert_eq!(t_log.h, expect, "a={a}");
            }
        }
    }

    #[test]
    fn serre_duality_on_p2() {
        let fan = projective_plane();
        for d in -4i64..=4 {
            let t = cohomology_table(&fan, &refl(&[d, 0, 0]), FieldSel::Rationals).unwrap();
            let dual =
                cohomology_table(&fan, &refl(&[-3 - d, 0, 0]), FieldSel::Rationals).unwrap();
            let rev: Vec<usize> = dual.h.iter().rev().copied().collect();
            assert_eq!(t.h, rev, "O({d}) vs O({})", -3 - d);
        }
    }
}
