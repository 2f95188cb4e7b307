//! The l-times multiplication map F: X → X′ (same fan, lattice rescaled),
//! divisor pullback, the eigensheaf decomposition of F_*O_X(D), the split
//! injections realized as exact graded-degree correspondences, and
//! multiplication-by-section maps on cohomology.
//!
//! X′ is never stored as a rescaled fan: a degree m̃ of X′ corresponds to
//! degree l·m̃ of X, and everything is bookkept in (N, M).

use num_integer::Integer;
use num_traits::Zero;

use crate::cohomology::{
    cohomology_table, degree_complex, CechNerve, CohomologyError, DegreeComplex, SheafSpec,
};
use crate::divisors::{canonical_divisor, positivity, rounding, QWeilDivisor, ReducedBoundary};
use crate::exactlin::{dot, FieldOps, FieldSel, Int, IntVec, Rat};
use crate::fans::Fan;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MultMapError {
    #[error("l·D is not integral")]
    NotIntegral,
    #[error("boundary ray {0} carries a fractional coefficient")]
    FractionalBoundaryRay(usize),
    #[error("w is not a lattice point of the section polytope")]
    NotASection,
    #[error("divisor is not nef")]
    NotNef,
    #[error("divisor is not Cartier")]
    NotCartier,
    #[error("multiplication level must be ≥ 1")]
    BadLevel,
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

/// F^*D′ = l·D′ in X-coordinates.
pub fn pullback_divisor(l: u32, d_prime: &QWeilDivisor) -> QWeilDivisor {
    d_prime.scale_int(l as i64)
}

// ---------------------------------------------------------------------------
// Eigensheaf decomposition of F_* O_X(D)

/// F_*O_X(D) = ⊕_c O_{X′}(E_c) over residue classes c of M/lM.
#[derive(Clone, Debug)]
pub struct EigensheafDecomposition {
    pub l: u32,
    /// (class representative c ∈ {0..l-1}^n, divisor E_c on X′); the c = 0
    /// entry is the split summand O(⌊D/l⌋).
    pub classes: Vec<(IntVec, QWeilDivisor)>,
}

pub fn eigen_decomposition(fan: &Fan, d: &QWeilDivisor, l: u32) -> Result<EigensheafDecomposition, MultMapError> {
    if l == 0 {
        return Err(MultMapError::BadLevel);
    }
    if !d.is_integral() {
        return Err(MultMapError::NotIntegral);
    }
    let li = Int::from(l);
    let mut classes = Vec::new();
    let mut c = vec![Int::zero(); fan.rank];
    loop {
        let coeffs: Vec<Rat> = fan
            .rays
            .iter()
            .zip(&d.coeffs)
            .map(|(u, dr)| {
                let num = dr.to_integer() + dot(&c, u);
                Rat::from(num.div_floor(&li))
            })
            .collect();
        classes.push((c.clone(), QWeilDivisor::new(coeffs)));
        // odometer over {0..l-1}^n
        let mut k = 0;
        loop {
            if k == fan.rank {
                return Ok(EigensheafDecomposition { l, classes });
            }
            c[k] += 1;
            if c[k] < li {
                break;
            }
            c[k] = Int::zero();
            k += 1;
        }
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub l: u32,
    /// Σ_c h^i(X′, O(E_c)) per i.
    pub summand_h: Vec<usize>,
    /// h^i(X, O(D)) per i.
    pub total_h: Vec<usize>,
    /// degrees of O(D) not accounted for by a class, or vice versa
    pub mismatches: Vec<IntVec>,
    pub holds: bool,
}

/// Validates the E_c formula by the identity Σ_c h^i(O(E_c)) = h^i(O(D)),
/// refined per graded degree: h^i(O(D))_{l·m̃+c} = h^i(O(E_c))_{m̃}.
pub fn check_eigen_decomposition(
    fan: &Fan,
    d: &QWeilDivisor,
    l: u32,
    field: FieldSel,
) -> Result<DecompositionReport, MultMapError> {
    let dec = eigen_decomposition(fan, d, l)?;
    let total = cohomology_table(fan, &SheafSpec::reflexive(d.clone()), field)?;
    let li = Int::from(l);
    let mut summand_h = vec![0usize; fan.rank + 1];
    let mut mismatches = Vec::new();
    let mut matched = std::collections::HashSet::new();
    for (c, e_c) in &dec.classes {
        let t = cohomology_table(fan, &SheafSpec::reflexive(e_c.clone()), field)?;
        for (i, hv) in t.h.iter().enumerate() {
            summand_h[i] += hv;
        }
        for (m_tilde, dims) in &t.per_degree {
            let m: IntVec = m_tilde.iter().zip(c).map(|(x, ci)| x * &li + ci).collect();
            if total.dims_at(&m) == Some(dims) {
                matched.insert(m);
            } else {
                mismatches.push(m);
            }
        }
    }
    for (m, _) in &total.per_degree {
        if !matched.contains(m) {
            mismatches.push(m.clone());
        }
    }
    mismatches.sort();
    mismatches.dedup();
    let holds = mismatches.is_empty() && summand_h == total.h;
    Ok(DecompositionReport { l, summand_h, total_h: total.h, mismatches, holds })
}

// ---------------------------------------------------------------------------
// Graded correspondences (the split injections, degreewise)

/// The (small, target) sheaf pairs related by the multiplication map:
/// h^i(target)_{l·m̃} = h^i(small)_{m̃}, hence h^i(small) ≤ h^i(target).
#[derive(Clone, Debug)]
pub enum Family {
    /// (O(⌊D⌋), O(lD)) for rational D with lD integral
    Floor,
    /// (O(K+⌈D⌉), O(K+lD))
    CeilCanonical,
    /// (O(K+B+⌈D⌉), O(K+B+lD)); B must avoid the fractional rays of D
    CeilCanonicalPlusB(ReducedBoundary),
    /// (Ω̃^a(log B)⊗O(G), Ω̃^a(log B)⊗O(lG)) for integral G
    LogForms { a: usize, boundary: ReducedBoundary },
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::Floor => "floor".into(),
            Family::CeilCanonical => "ceil_canonical".into(),
            Family::CeilCanonicalPlusB(_) => "ceil_canonical_plus_b".into(),
            Family::LogForms { a, .. } => format!("log_forms_a{a}"),
        }
    }

    /// The (small, target) sheaf pair for level l and divisor data.
    pub fn sheaves(
        &self,
        fan: &Fan,
        l: u32,
        data: &QWeilDivisor,
    ) -> Result<(SheafSpec, SheafSpec), MultMapError> {
        if l == 0 {
            return Err(MultMapError::BadLevel);
        }
        let ld = data.scale_int(l as i64);
        match self {
            Family::Floor => {
                if !ld.is_integral() {
                    return Err(MultMapError::NotIntegral);
                }
                let r = rounding(data);
                Ok((SheafSpec::reflexive(r.floor), SheafSpec::reflexive(ld)))
            }
            Family::CeilCanonical => {
                if !ld.is_integral() {
                    return Err(MultMapError::NotIntegral);
                }
                let k = canonical_divisor(fan);
                let r = rounding(data);
                Ok((SheafSpec::reflexive(k.add(&r.ceil)), SheafSpec::reflexive(k.add(&ld))))
            }
            Family::CeilCanonicalPlusB(b) => {
                if !ld.is_integral() {
                    return Err(MultMapError::NotIntegral);
                }
                let r = rounding(data);
                for &ri in &b.ray_indices {
                    if !r.frac.coeffs[ri].is_zero() {
                        return Err(MultMapError::FractionalBoundaryRay(ri));
                    }
                }
                let kb = canonical_divisor(fan).add(&b.divisor(fan));
                Ok((SheafSpec::reflexive(kb.add(&r.ceil)), SheafSpec::reflexive(kb.add(&ld))))
            }
            Family::LogForms { a, boundary } => {
                if !data.is_integral() {
                    return Err(MultMapError::NotIntegral);
                }
                Ok((
                    SheafSpec::log_forms(*a, boundary.clone(), data.clone()),
                    SheafSpec::log_forms(*a, boundary.clone(), ld),
                ))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub degree: IntVec,
    pub i: usize,
    /// h^i(target)_{l·m̃}
    pub lhs: usize,
    /// h^i(small)_{m̃}
    pub rhs: usize,
}

#[derive(Clone, Debug)]
pub struct CorrespondenceReport {
    pub family: String,
    pub l: u32,
    pub field: FieldSel,
    pub small_h: Vec<usize>,
    pub target_h: Vec<usize>,
    pub degrees_checked: usize,
    pub violations: Vec<Violation>,
}

impl CorrespondenceReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// h^i(small) ≤ h^i(target) for every i; implied by the per-degree
    /// equalities but asserted independently.
    pub fn monotone(&self) -> bool {
        self.small_h.iter().zip(&self.target_h).all(|(s, t)| s <= t)
    }

    pub fn to_json(&self) -> serde_json::Value {
        use num_traits::ToPrimitive;
        serde_json::json!({
            "family": self.family,
            "l": self.l,
            "field": self.field.label(),
            "small_h": self.small_h,
            "target_h": self.target_h,
            "degrees_checked": self.degrees_checked,
            "violations": self.violations.iter().map(|v| serde_json::json!({
                "degree": v.degree.iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>(),
                "i": v.i,
                "lhs": v.lhs,
                "rhs": v.rhs,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Checks h^i(target)_{l·m̃} = h^i(small)_{m̃} on every degree relevant to
/// either side (target degrees only contribute where divisible by l).
pub fn graded_correspondence_check(
    fan: &Fan,
    family: &Family,
    l: u32,
    data: &QWeilDivisor,
    field: FieldSel,
) -> Result<CorrespondenceReport, MultMapError> {
    let (small, target) = family.sheaves(fan, l, data)?;
    let small_t = cohomology_table(fan, &small, field)?;
    let target_t = cohomology_table(fan, &target, field)?;
    let li = Int::from(l);
    let mut degrees: Vec<IntVec> = small_t.per_degree.iter().map(|(m, _)| m.clone()).collect();
    for (m, _) in &target_t.per_degree {
        if m.iter().all(|x| x.is_multiple_of(&li)) {
            degrees.push(m.iter().map(|x| x / &li).collect());
        }
    }
    degrees.sort();
    degrees.dedup();
    let zero = vec![0usize; fan.rank + 1];
    let mut violations = Vec::new();
    for m_tilde in &degrees {
        let lm: IntVec = m_tilde.iter().map(|x| x * &li).collect();
        let s = small_t.dims_at(m_tilde).unwrap_or(&zero);
        let t = target_t.dims_at(&lm).unwrap_or(&zero);
        for i in 0..=fan.rank {
            if s[i] != t[i] {
                violations.push(Violation { degree: m_tilde.clone(), i, lhs: t[i], rhs: s[i] });
            }
        }
    }
    Ok(CorrespondenceReport {
        family: family.label(),
        l,
        field,
        small_h: small_t.h,
        target_h: target_t.h,
        degrees_checked: degrees.len(),
        violations,
    })
}

// ---------------------------------------------------------------------------
// Multiplication by a section, on cohomology

/// A matrix between cohomology spaces in labeled per-degree bases.
#[derive(Clone, Debug)]
pub struct InducedMap<E> {
    /// (graded degree, index within that degree's H^i basis), one per column
    pub source_basis: Vec<(IntVec, usize)>,
    /// same, one per row
    pub target_basis: Vec<(IntVec, usize)>,
    /// rows × cols = target × source
    pub matrix: Vec<Vec<E>>,
}

impl<E: Clone> InducedMap<E> {
    pub fn is_injective<O: FieldOps<Elem = E>>(&self, ops: &O) -> bool {
        // column rank equals row rank; ops.rank consumes rows
        ops.rank(&self.matrix) == self.source_basis.len()
    }

    /// other ∘ self; bases must agree on the shared space.
    pub fn compose<O: FieldOps<Elem = E>>(&self, ops: &O, other: &InducedMap<E>) -> InducedMap<E> {
        assert_eq!(self.target_basis, other.source_basis, "basis mismatch in composition");
        let rows = other.target_basis.len();
        let cols = self.source_basis.len();
        let mid = self.target_basis.len();
        let mut out = vec![vec![ops.zero(); cols]; rows];
        for r in 0..rows {
            for c in 0..cols {
                let mut acc = ops.zero();
                for k in 0..mid {
                    acc = ops.add(&acc, &ops.mul(&other.matrix[r][k], &self.matrix[k][c]));
                }
                out[r][c] = acc;
            }
        }
        InducedMap {
            source_basis: self.source_basis.clone(),
            target_basis: other.target_basis.clone(),
            matrix: out,
        }
    }
}

/// Basis of H^i of a degree complex, as columns in the C^i coordinates:
/// cycles extended greedily past the boundary space.
fn hi_basis<O: FieldOps>(ops: &O, cx: &DegreeComplex<O::Elem>, i: usize) -> Vec<Vec<O::Elem>> {
    let dim_i = if i < cx.dims.len() { cx.dims[i] } else { 0 };
    if dim_i == 0 {
        return Vec::new();
    }
    let cycles = if i < cx.diffs.len() && !cx.diffs[i].is_empty() {
        ops.kernel_basis(&cx.diffs[i], dim_i)
    } else {
        (0..dim_i)
            .map(|j| {
                let mut col = vec![ops.zero(); dim_i];
                col[j] = ops.one();
                col
            })
            .collect()
    };
    let mut span: Vec<Vec<O::Elem>> = Vec::new();
    if i > 0 && i - 1 < cx.diffs.len() {
        for c in 0..cx.dims[i - 1] {
            span.push(cx.diffs[i - 1].iter().map(|row| row[c].clone()).collect());
        }
    }
    let mut out = Vec::new();
    let mut rank = ops.rank(&span);
    for z in cycles {
        span.push(z.clone());
        let r = ops.rank(&span);
        if r > rank {
            rank = r;
            out.push(z);
        } else {
            span.pop();
        }
    }
    out
}

/// Express cycles in the basis [h | boundaries]; returns the h-coordinates
/// (unique because the h columns are independent modulo boundaries).
fn hi_coordinates<O: FieldOps>(
    ops: &O,
    dim_i: usize,
    h: &[Vec<O::Elem>],
    boundaries: &[Vec<O::Elem>],
    cycles: &[Vec<O::Elem>],
) -> Vec<Vec<O::Elem>> {
    if cycles.is_empty() {
        return Vec::new();
    }
    let mut cols: Vec<Vec<O::Elem>> = h.to_vec();
    cols.extend(boundaries.iter().cloned());
    let rows: Vec<Vec<O::Elem>> = (0..dim_i)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect();
    let sols = ops
        .solve(&rows, cols.len(), cycles)
        .expect("cycle must lie in H-basis + boundaries");
    sols.into_iter().map(|s| s[..h.len()].to_vec()).collect()
}

/// Everything the induced map needs from one graded degree of one side:
/// the C^i piece layout, the H^i basis and the boundary space d^{i-1}(C^{i-1})
/// in C^i coordinates. Deliberately *not* the whole complex: nef-and-big
/// targets have tens of thousands of contributing degrees.
struct DegreeBlock<E> {
    piece_dims: Vec<usize>,
    dim: usize,
    hbasis: Vec<Vec<E>>,
    boundaries: Vec<Vec<E>>,
}

fn degree_block<O: FieldOps>(
    ops: &O,
    cx: &DegreeComplex<O::Elem>,
    i: usize,
) -> DegreeBlock<O::Elem> {
    let hbasis = hi_basis(ops, cx, i);
    let mut boundaries = Vec::new();
    if i > 0 && i - 1 < cx.diffs.len() {
        for c in 0..cx.dims[i - 1] {
            boundaries.push(cx.diffs[i - 1].iter().map(|row| row[c].clone()).collect());
        }
    }
    DegreeBlock { piece_dims: cx.piece_dims[i].clone(), dim: cx.dims[i], hbasis, boundaries }
}

/// Sparse representation of an induced map: per source column, the nonzero
/// (target row, value) pairs sorted by row.
pub type SparseColumns<E> = Vec<Vec<(usize, E)>>;

/// Column rank equals the number of columns? Persistence-style reduction:
/// each column is reduced against the pivot with the same leading row until
/// it acquires a fresh leading row or dies.
pub fn sparse_columns_injective<O: FieldOps>(
    ops: &O,
    cols: &[Vec<(usize, O::Elem)>],
) -> bool {
    let mut pivots: std::collections::HashMap<usize, Vec<(usize, O::Elem)>> =
        std::collections::HashMap::new();
    for col in cols {
        let mut cur: Vec<(usize, O::Elem)> =
            col.iter().filter(|(_, v)| !ops.is_zero(v)).cloned().collect();
        loop {
            let Some((lead, lead_val)) = cur.first().cloned() else { return false };
            let Some(pivot) = pivots.get(&lead) else {
                pivots.insert(lead, cur);
                break;
            };
            // cur -= (lead_val / pivot_lead) * pivot, merging sorted lists
            let factor = ops.mul(&lead_val, &ops.inv(&pivot[0].1));
            let mut merged = Vec::with_capacity(cur.len() + pivot.len());
            let (mut a, mut b) = (cur.iter(), pivot.iter());
            let (mut x, mut y) = (a.next(), b.next());
            while x.is_some() || y.is_some() {
                match (x, y) {
                    (Some((r1, v1)), Some((r2, v2))) if r1 == r2 => {
                        let v = ops.sub(v1, &ops.mul(&factor, v2));
                        if !ops.is_zero(&v) {
                            merged.push((*r1, v));
                        }
                        x = a.next();
                        y = b.next();
                    }
                    (Some((r1, v1)), Some((r2, _))) if r1 < r2 => {
                        merged.push((*r1, v1.clone()));
                        x = a.next();
                    }
                    (Some(_), Some((r2, v2))) => {
                        let v = ops.neg(&ops.mul(&factor, v2));
                        if !ops.is_zero(&v) {
                            merged.push((*r2, v));
                        }
                        y = b.next();
                    }
                    (Some((r1, v1)), None) => {
                        merged.push((*r1, v1.clone()));
                        x = a.next();
                    }
                    (None, Some((r2, v2))) => {
                        let v = ops.neg(&ops.mul(&factor, v2));
                        if !ops.is_zero(&v) {
                            merged.push((*r2, v));
                        }
                        y = b.next();
                    }
                    (None, None) => unreachable!(),
                }
            }
            cur = merged;
        }
    }
    true
}

/// All the w-independent state of the maps ×x^w : H^i(O(K+mL)) →
/// H^i(O(K+(m+l)L)): cohomology bases of both sides, computed once and
/// shared across eigensections.
pub struct SectionMapContext<O: FieldOps> {
    rays: Vec<IntVec>,
    nef_l: QWeilDivisor,
    l: u32,
    i: usize,
    source_blocks: Vec<(IntVec, DegreeBlock<O::Elem>)>,
    source_cols: Vec<(IntVec, usize)>,
    target_rows: Vec<(IntVec, usize)>,
    target_row_offset: std::collections::HashMap<IntVec, usize>,
    target_blocks: std::collections::HashMap<IntVec, DegreeBlock<O::Elem>>,
    /// when built via `for_sections`, the only w values the context serves
    allowed: Option<Vec<IntVec>>,
}

impl<O: FieldOps> SectionMapContext<O> {
    pub fn new(
        ops: &O,
        fan: &Fan,
        field: FieldSel,
        nef_l: &QWeilDivisor,
        l: u32,
        m_pow: u32,
        i: usize,
    ) -> Result<Self, MultMapError> {
        Self::build(ops, fan, field, nef_l, l, m_pow, i, None)
    }

    /// Like `new`, but the target-side bases are prepared only for degrees
    /// reachable as m + w from the given eigensections; the context then
    /// serves exactly those w.
    #[allow(clippy::too_many_arguments)]
    pub fn for_sections(
        ops: &O,
        fan: &Fan,
        field: FieldSel,
        nef_l: &QWeilDivisor,
        l: u32,
        m_pow: u32,
        i: usize,
        sections: &[IntVec],
    ) -> Result<Self, MultMapError> {
        Self::build(ops, fan, field, nef_l, l, m_pow, i, Some(sections))
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        ops: &O,
        fan: &Fan,
        field: FieldSel,
        nef_l: &QWeilDivisor,
        l: u32,
        m_pow: u32,
        i: usize,
        sections: Option<&[IntVec]>,
    ) -> Result<Self, MultMapError> {
        if !nef_l.is_integral() {
            return Err(MultMapError::NotIntegral);
        }
        let pos = positivity(fan, nef_l).map_err(|_| MultMapError::NotCartier)?;
        if !pos.is_nef {
            return Err(MultMapError::NotNef);
        }
        let k = canonical_divisor(fan);
        let source = SheafSpec::reflexive(k.add(&nef_l.scale_int(m_pow as i64)));
        let target = SheafSpec::reflexive(k.add(&nef_l.scale_int((m_pow + l) as i64)));
        let source_t = cohomology_table(fan, &source, field)?;
        let target_t = cohomology_table(fan, &target, field)?;
        let nerve = CechNerve::new(fan);

        let mut source_blocks = Vec::new();
        let mut source_cols: Vec<(IntVec, usize)> = Vec::new();
        for (m, dims) in &source_t.per_degree {
            if dims[i] == 0 {
                continue;
            }
            let cx = degree_complex(ops, fan, &source, &nerve, m)?;
            let block = degree_block(ops, &cx, i);
            assert_eq!(block.hbasis.len(), dims[i]);
            for j in 0..block.hbasis.len() {
                source_cols.push((m.clone(), j));
            }
            source_blocks.push((m.clone(), block));
        }

        // degrees the shift can reach, when the sections are known up front;
        // nef-and-big targets have 10^4+ contributing degrees and only a
        // fraction is ever hit
        let reachable: Option<std::collections::HashSet<IntVec>> = sections.map(|ws| {
            source_blocks
                .iter()
                .flat_map(|(m, _)| {
                    ws.iter().map(move |w| {
                        m.iter().zip(w).map(|(x, y)| x + y).collect::<IntVec>()
                    })
                })
                .collect()
        });

        // global bases, one block per degree with nonzero h^i, in lex order
        let mut target_rows: Vec<(IntVec, usize)> = Vec::new();
        let mut target_row_offset = std::collections::HashMap::new();
        let mut target_blocks = std::collections::HashMap::new();
        for (m, dims) in &target_t.per_degree {
            if dims[i] == 0 {
                continue;
            }
            if let Some(set) = &reachable {
                if !set.contains(m) {
                    continue;
                }
            }
            let cx = degree_complex(ops, fan, &target, &nerve, m)?;
            let block = degree_block(ops, &cx, i);
            assert_eq!(block.hbasis.len(), dims[i]);
            target_row_offset.insert(m.clone(), target_rows.len());
            for j in 0..block.hbasis.len() {
                target_rows.push((m.clone(), j));
            }
            target_blocks.insert(m.clone(), block);
        }

        Ok(SectionMapContext {
            rays: fan.rays.clone(),
            nef_l: nef_l.clone(),
            l,
            i,
            allowed: sections.map(|ws| ws.to_vec()),
            source_blocks,
            source_cols,
            target_rows,
            target_row_offset,
            target_blocks,
        })
    }

    pub fn source_dim(&self) -> usize {
        self.source_cols.len()
    }

    /// The induced map for one eigensection w ∈ P_{lL} ∩ M, as sparse
    /// columns. Nef-and-big targets can have 10^4+ rows, so the dense
    /// matrix is built only on demand (`map_for`).
    pub fn sparse_map_for(
        &self,
        ops: &O,
        w: &IntVec,
    ) -> Result<SparseColumns<O::Elem>, MultMapError> {
        // w ∈ P_{lL}: ⟨w,u_ρ⟩ ≥ -l·λ_ρ for every ray
        for (u, lam) in self.rays.iter().zip(&self.nef_l.coeffs) {
            if Rat::from(dot(w, u)) + lam * Rat::from(Int::from(self.l)) < Rat::zero() {
                return Err(MultMapError::NotASection);
            }
        }
        if let Some(allowed) = &self.allowed {
            assert!(
                allowed.iter().any(|a| a == w),
                "context built via for_sections does not cover this eigensection"
            );
        }
        let mut cols: SparseColumns<O::Elem> = Vec::with_capacity(self.source_cols.len());
        for (m, src) in &self.source_blocks {
            let shifted: IntVec = m.iter().zip(w).map(|(x, y)| x + y).collect();
            if let Some(tgt) = self.target_blocks.get(&shifted) {
                // the chain map is the piecewise inclusion: identify C^i
                // summands
                let images: Vec<Vec<O::Elem>> = src
                    .hbasis
                    .iter()
                    .map(|z| chain_image(ops, &src.piece_dims, &tgt.piece_dims, tgt.dim, z))
                    .collect();
                let coords =
                    hi_coordinates(ops, tgt.dim, &tgt.hbasis, &tgt.boundaries, &images);
                let row_base = self.target_row_offset[&shifted];
                for col in &coords {
                    cols.push(
                        col.iter()
                            .enumerate()
                            .filter(|(_, v)| !ops.is_zero(v))
                            .map(|(r, v)| (row_base + r, v.clone()))
                            .collect(),
                    );
                }
            } else {
                // H^i(target) vanishes in the shifted degree; block is zero
                for _ in 0..src.hbasis.len() {
                    cols.push(Vec::new());
                }
            }
        }
        Ok(cols)
    }

    /// The induced map for one eigensection w, as a dense matrix.
    pub fn map_for(&self, ops: &O, w: &IntVec) -> Result<InducedMap<O::Elem>, MultMapError> {
        let cols = self.sparse_map_for(ops, w)?;
        let mut matrix: Vec<Vec<O::Elem>> =
            vec![vec![ops.zero(); self.source_cols.len()]; self.target_rows.len()];
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col {
                matrix[*r][c] = v.clone();
            }
        }
        Ok(InducedMap {
            source_basis: self.source_cols.clone(),
            target_basis: self.target_rows.clone(),
            matrix,
        })
    }
}

/// ×x^w : H^i(O(K+mL)) → H^i(O(K+(m+l)L)) for an eigensection
/// w ∈ P_{lL} ∩ M of L^l.
pub fn section_multiplication_map<O: FieldOps>(
    ops: &O,
    fan: &Fan,
    field: FieldSel,
    nef_l: &QWeilDivisor,
    l: u32,
    w: &IntVec,
    m_pow: u32,
    i: usize,
) -> Result<InducedMap<O::Elem>, MultMapError> {
    SectionMapContext::new(ops, fan, field, nef_l, l, m_pow, i)?.map_for(ops, w)
}

/// Push a C^i vector of the source complex through the degree-shift chain
/// map (per-nerve-cone inclusions; both sheaves are reflexive, so every
/// piece is 0- or 1-dimensional with basis the constant section).
fn chain_image<O: FieldOps>(
    ops: &O,
    src_pieces: &[usize],
    tgt_pieces: &[usize],
    tgt_dim: usize,
    z: &[O::Elem],
) -> Vec<O::Elem> {
    let mut out = vec![ops.zero(); tgt_dim];
    let mut src_off = 0usize;
    let mut tgt_off = 0usize;
    for (sd, td) in src_pieces.iter().zip(tgt_pieces) {
        if *sd == 1 {
            assert_eq!(*td, 1, "shift by a section must preserve pieces");
            out[tgt_off] = z[src_off].clone();
        }
        src_off += sd;
        tgt_off += td;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{ivec, rat, QOps};
    use crate::fans::{product, projective_line, projective_plane};

    #[test]
    fn pullback_scales_coefficients() {
        let d = QWeilDivisor::from_i64(&[1, 0, 0]);
        assert_eq!(pullback_divisor(2, &d), QWeilDivisor::from_i64(&[2, 0, 0]));
        assert_eq!(pullback_divisor(1, &d), d);
        let z = QWeilDivisor::from_i64(&[0, 0, 0]);
        assert_eq!(pullback_divisor(3, &z), z);
    }

    #[test]
    fn eigen_decomposition_p1_degree_one() {
        let fan = projective_line();
        let d = QWeilDivisor::from_i64(&[1, 0]);
        let dec = eigen_decomposition(&fan, &d, 2).unwrap();
        assert_eq!(dec.classes.len(), 2);
        assert_eq!(dec.classes[0].1, QWeilDivisor::from_i64(&[0, 0]));
        assert_eq!(dec.classes[1].1, QWeilDivisor::from_i64(&[1, -1]));
        let rep = check_eigen_decomposition(&fan, &d, 2, FieldSel::Rationals).unwrap();
        assert!(rep.holds, "{:?}", rep);
        assert_eq!(rep.summand_h, vec![2, 0]);
    }

    #[test]
    fn eigen_decomposition_p1_trivial_divisor() {
        let fan = projective_line();
        let d = QWeilDivisor::zero(&fan);
        let dec = eigen_decomposition(&fan, &d, 2).unwrap();
        assert_eq!(dec.classes[0].1, QWeilDivisor::from_i64(&[0, 0]));
        assert_eq!(dec.classes[1].1, QWeilDivisor::from_i64(&[0, -1]));
        let rep = check_eigen_decomposition(&fan, &d, 2, FieldSel::Rationals).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.summand_h, vec![1, 0]);
    }

    #[test]
    fn eigen_decomposition_l1_is_identity() {
        let fan = projective_plane();
        let d = QWeilDivisor::from_i64(&[3, -1, 0]);
        let dec = eigen_decomposition(&fan, &d, 1).unwrap();
        assert_eq!(dec.classes.len(), 1);
        assert_eq!(dec.classes[0].1, d);
    }

    #[test]
    fn floor_correspondence_p1_half() {
        let fan = projective_line();
        let d = QWeilDivisor::new(vec![rat(1, 2), rat(0, 1)]);
        let rep =
            graded_correspondence_check(&fan, &Family::Floor, 2, &d, FieldSel::Rationals).unwrap();
        assert!(rep.holds(), "{:?}", rep.violations);
        assert!(rep.monotone());
        assert_eq!(rep.small_h, vec![1, 0]);
        assert_eq!(rep.target_h, vec![2, 0]);
    }

    #[test]
    fn correspondence_l1_trivial() {
        let fan = projective_plane();
        let d = QWeilDivisor::from_i64(&[2, 0, -1]);
        for fam in [Family::Floor, Family::CeilCanonical] {
            let rep =
                graded_correspondence_check(&fan, &fam, 1, &d, FieldSel::Rationals).unwrap();
            assert!(rep.holds());
            assert_eq!(rep.small_h, rep.target_h);
        }
    }

    #[test]
    fn log_forms_correspondence_p2() {
        let fan = projective_plane();
        let g = QWeilDivisor::from_i64(&[1, 0, 0]);
        let fam = Family::LogForms { a: 1, boundary: ReducedBoundary::empty() };
        let rep = graded_correspondence_check(&fan, &fam, 2, &g, FieldSel::Rationals).unwrap();
        assert!(rep.holds(), "{:?}", rep.violations);
        assert_eq!(rep.small_h, vec![0, 0, 0]);
        assert_eq!(rep.target_h, vec![3, 0, 0]);
        assert!(rep.monotone());
    }

    #[test]
    fn correspondence_functoriality() {
        // l = 6 agrees with composing l = 2 then l = 3 on per-degree dims
        let fan = projective_line();
        let d = QWeilDivisor::new(vec![rat(5, 6), rat(1, 2)]);
        let r6 =
            graded_correspondence_check(&fan, &Family::Floor, 6, &d, FieldSel::Rationals).unwrap();
        assert!(r6.holds());
        let r2 = graded_correspondence_check(&fan, &Family::Floor, 2, &d, FieldSel::Rationals);
        // 2D is not integral here, so the l=2 step must refuse
        assert_eq!(r2.unwrap_err(), MultMapError::NotIntegral);
        // the steps compose once the first one clears the denominator
        let d23 = QWeilDivisor::new(vec![rat(1, 3), rat(0, 1)]);
        let step3 =
            graded_correspondence_check(&fan, &Family::Floor, 3, &d23, FieldSel::Rationals)
                .unwrap();
        let step2 = graded_correspondence_check(
            &fan,
            &Family::Floor,
            2,
            &d23.scale_int(3),
            FieldSel::Rationals,
        )
        .unwrap();
        let whole =
            graded_correspondence_check(&fan, &Family::Floor, 6, &d23, FieldSel::Rationals)
                .unwrap();
        assert!(step3.holds() && step2.holds() && whole.holds());
        assert_eq!(step3.small_h, whole.small_h);
        assert_eq!(step2.target_h, whole.target_h);
        assert_eq!(step3.target_h, step2.small_h);
    }

    #[test]
    fn fractional_boundary_ray_rejected() {
        let fan = projective_plane();
        let d = QWeilDivisor::new(vec![rat(1, 2), rat(0, 1), rat(0, 1)]);
        let fam = Family::CeilCanonicalPlusB(ReducedBoundary::new(vec![0]));
        assert_eq!(
            graded_correspondence_check(&fan, &fam, 2, &d, FieldSel::Rationals).unwrap_err(),
            MultMapError::FractionalBoundaryRay(0)
        );
        let fam_ok = Family::CeilCanonicalPlusB(ReducedBoundary::new(vec![1]));
        let rep = graded_correspondence_check(&fan, &fam_ok, 2, &d, FieldSel::Rationals).unwrap();
        assert!(rep.holds(), "{:?}", rep.violations);
    }

    #[test]
    fn section_map_identity_when_trivial() {
        let fan = projective_line();
        let l_div = QWeilDivisor::from_i64(&[1, 0]);
        let ops = QOps;
        // l=0 forces w=0 and the map H^1(O(K+2L)) → H^1(O(K+2L)) is the identity
        let map = section_multiplication_map(
            &ops,
            &fan,
            FieldSel::Rationals,
            &l_div,
            0,
            &ivec(&[0]),
            2,
            0,
        )
        .unwrap();
        assert_eq!(map.source_basis, map.target_basis);
        for (r, row) in map.matrix.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert_eq!(*v == ops.one(), r == c);
            }
        }
    }

    #[test]
    fn section_map_kunneth_injectivity() {
        // X = P^1×P^1, L = pullback of O(1): H^1(O(K+mL)) has dim m-1
        let fan = product(&projective_line(), &projective_line());
        let l_div = QWeilDivisor::from_i64(&[1, 0, 0, 0]);
        let ops = QOps;
        let map = section_multiplication_map(
            &ops,
            &fan,
            FieldSel::Rationals,
            &l_div,
            1,
            &ivec(&[0, 0]),
            2,
            1,
        )
        .unwrap();
        assert_eq!(map.source_basis.len(), 1);
        assert_eq!(map.target_basis.len(), 2);
        assert!(map.is_injective(&ops));
    }

    #[test]
    fn section_map_rejects_non_sections() {
        let fan = projective_line();
        let l_div = QWeilDivisor::from_i64(&[1, 0]);
        let ops = QOps;
        let err = section_multiplication_map(
            &ops,
            &fan,
            FieldSel::Rationals,
            &l_div,
            1,
            &ivec(&[5]),
            1,
            0,
        )
        .unwrap_err();
        assert_eq!(err, MultMapError::NotASection);
    }

    #[test]
    fn section_map_composition() {
        let fan = product(&projective_line(), &projective_line());
        let l_div = QWeilDivisor::from_i64(&[1, 0, 0, 0]);
        let ops = QOps;
        let w1 = ivec(&[0, 0]);
        let w2 = ivec(&[-1, 0]);
        let f1 = section_multiplication_map(
            &ops, &fan, FieldSel::Rationals, &l_div, 1, &w1, 1, 1,
        )
        .unwrap();
        let f2 = section_multiplication_map(
            &ops, &fan, FieldSel::Rationals, &l_div, 1, &w2, 2, 1,
        )
        .unwrap();
        let w12: IntVec = w1.iter().zip(&w2).map(|(a, b)| a + b).collect();
        let f12 = section_multiplication_map(
            &ops, &fan, FieldSel::Rationals, &l_div, 2, &w12, 1, 1,
        )
        .unwrap();
        let composed = f1.compose(&ops, &f2);
        assert_eq!(composed.source_basis, f12.source_basis);
        assert_eq!(composed.target_basis, f12.target_basis);
        assert_eq!(composed.matrix, f12.matrix);
    }
}
