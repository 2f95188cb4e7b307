//! Every vanishing and injectivity theorem as an executable predicate over
//! concrete instances, plus deterministic corpus generation and the
//! nef-and-big counterexample regression (blow-up of the plane).
//!
//! Hypothesis failures are strictly separated from theorem failures: an
//! instance that does not satisfy a theorem's assumptions is reported as
//! such and never counts as a counterexample.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohomology::{
    cohomology_table, cohomology_tables_shared, CohomologyError, CohomologyTable, SheafSpec,
};
use crate::divisors::{
    canonical_divisor, is_principal, polytope_and_kappa, positivity, q_cartier_index, rounding,
    section_polytope, DivisorError, Kappa, QWeilDivisor, ReducedBoundary,
};
use crate::exactlin::{
    feasible, lattice_points, rat, Feasibility, FieldOps, FieldSel, FpOps, Int, IntVec, QOps, Rat,
};
use crate::fans::{product, standard_fan, stellar_subdivide, Cone, Fan, FanKind};
use crate::multmap::{
    graded_correspondence_check, sparse_columns_injective, Family, MultMapError,
    SectionMapContext, SparseColumns,
};

/// Bound for the h^0(L^t) > 0 probe deciding κ(X,L) ≥ 0.
pub const KAPPA_SEARCH_CAP: u32 = 12;
/// Bound for Q-Cartier index searches.
pub const Q_CARTIER_CAP: u32 = 60;
/// At most this many eigensections of L^l get individual injectivity
/// checks; larger section polytopes are sampled deterministically.
pub const KOLLAR_SECTION_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum TheoremId {
    MainI,
    Bott,
    Norimatsu,
    NorimatsuPrimeDivisors,
    Kodaira,
    MainII,
    KawamataViehweg,
    Vari,
    Mustata,
    Bogomolov,
    KollarInjectivity,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::MainI,
        TheoremId::Bott,
        TheoremId::Norimatsu,
        TheoremId::NorimatsuPrimeDivisors,
        TheoremId::Kodaira,
        TheoremId::MainII,
        TheoremId::KawamataViehweg,
        TheoremId::Vari,
        TheoremId::Mustata,
        TheoremId::Bogomolov,
        TheoremId::KollarInjectivity,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            TheoremId::MainI => "main_i",
            TheoremId::Bott => "bott",
            TheoremId::Norimatsu => "norimatsu",
            TheoremId::NorimatsuPrimeDivisors => "norimatsu_prime_divisors",
            TheoremId::Kodaira => "kodaira",
            TheoremId::MainII => "main_ii",
            TheoremId::KawamataViehweg => "kawamata_viehweg",
            TheoremId::Vari => "vari",
            TheoremId::Mustata => "mustata",
            TheoremId::Bogomolov => "bogomolov",
            TheoremId::KollarInjectivity => "kollar_injectivity",
        }
    }

    pub fn parse(s: &str) -> Option<TheoremId> {
        TheoremId::ALL.iter().copied().find(|t| t.label() == s)
    }
}

/// One concrete verification input. Which fields matter depends on the
/// theorem: `ample` is the line bundle L, `divisor` is the Q-Weil divisor
/// D, `aux` is the fractional part E of the Mustata statement.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Instance {
    pub fan: Fan,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ample: Option<QWeilDivisor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor: Option<QWeilDivisor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<QWeilDivisor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<ReducedBoundary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
}

impl Instance {
    pub fn new(fan: Fan) -> Self {
        Instance {
            fan,
            ample: None,
            divisor: None,
            aux: None,
            boundary: None,
            a: None,
            l: None,
            m: None,
        }
    }

    /// FNV-1a over the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("instance serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in json.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x1_0000_01b3);
        }
        format!("{h:016x}")
    }

    fn boundary_or_empty(&self) -> ReducedBoundary {
        self.boundary.clone().unwrap_or_else(ReducedBoundary::empty)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum VerifyError {
    /// The instance does not satisfy the theorem's assumptions; never a
    /// statement about the theorem itself.
    #[error("hypothesis failure: {0}")]
    HypothesisFailure(String),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Divisor(#[from] DivisorError),
    #[error(transparent)]
    MultMap(#[from] MultMapError),
}

fn hyp<T>(msg: impl Into<String>) -> Result<T, VerifyError> {
    Err(VerifyError::HypothesisFailure(msg.into()))
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Witness {
    pub check: String,
    pub i: usize,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerdictReport {
    pub theorem: TheoremId,
    pub digest: String,
    pub field: FieldSel,
    /// hypothesis checks that passed, in order
    pub hypotheses: Vec<String>,
    /// labeled h-vectors of every table computed for the verdict
    pub tables: Vec<(String, Vec<usize>)>,
    pub witnesses: Vec<Witness>,
    pub holds: bool,
}

impl VerdictReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "theorem": self.theorem.label(),
            "digest": self.digest,
            "field": self.field.label(),
            "hypotheses": self.hypotheses,
            "tables": self.tables.iter().map(|(k, h)| serde_json::json!({"sheaf": k, "h": h}))
                .collect::<Vec<_>>(),
            "witnesses": self.witnesses,
            "holds": self.holds,
        })
    }
}

struct Verdict {
    hypotheses: Vec<String>,
    tables: Vec<(String, Vec<usize>)>,
    witnesses: Vec<Witness>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { hypotheses: Vec::new(), tables: Vec::new(), witnesses: Vec::new() }
    }

    fn hypothesis(&mut self, s: impl Into<String>) {
        self.hypotheses.push(s.into());
    }

    fn table(&mut self, label: impl Into<String>, t: &CohomologyTable) {
        self.tables.push((label.into(), t.h.clone()));
    }

    fn witness(&mut self, check: impl Into<String>, i: usize, detail: impl Into<String>) {
        self.witnesses.push(Witness { check: check.into(), i, detail: detail.into() });
    }

    /// assert h^i = 0 for every i with the given property
    fn expect_zero(
        &mut self,
        label: &str,
        t: &CohomologyTable,
        bad: impl Fn(usize) -> bool,
    ) {
        self.table(label, t);
        for (i, &hv) in t.h.iter().enumerate() {
            if bad(i) && hv > 0 {
                self.witness(label, i, format!("h^{i} = {hv}, expected 0"));
            }
        }
    }

    fn finish(self, theorem: TheoremId, digest: String, field: FieldSel) -> VerdictReport {
        let holds = self.witnesses.is_empty();
        VerdictReport {
            theorem,
            digest,
            field,
            hypotheses: self.hypotheses,
            tables: self.tables,
            witnesses: self.witnesses,
            holds,
        }
    }
}

// ---------------------------------------------------------------------------
// hypothesis helpers

fn require_complete(fan: &Fan, v: &mut Verdict) -> Result<(), VerifyError> {
    if !fan.is_complete() {
        return hyp("fan is not complete");
    }
    v.hypothesis("fan complete");
    Ok(())
}

fn require_ample_cartier(
    fan: &Fan,
    l: &QWeilDivisor,
    v: &mut Verdict,
) -> Result<(), VerifyError> {
    if !l.is_integral() {
        return hyp("L is not integral");
    }
    match positivity(fan, l) {
        Ok(p) if p.is_ample => {
            v.hypothesis("L ample Cartier");
            Ok(())
        }
        Ok(_) => hyp("L is not ample"),
        Err(e) => hyp(format!("L is not Cartier: {e}")),
    }
}

fn require_nef_cartier(fan: &Fan, l: &QWeilDivisor, v: &mut Verdict) -> Result<(), VerifyError> {
    if !l.is_integral() {
        return hyp("L is not integral");
    }
    match positivity(fan, l) {
        Ok(p) if p.is_nef => {
            v.hypothesis("L nef Cartier");
            Ok(())
        }
        Ok(_) => hyp("L is not nef"),
        Err(e) => hyp(format!("L is not Cartier: {e}")),
    }
}

/// Q-Cartier index of D, with nef-ness of the index multiple.
fn require_nef_qcartier(
    fan: &Fan,
    d: &QWeilDivisor,
    v: &mut Verdict,
) -> Result<u32, VerifyError> {
    let idx = q_cartier_index(fan, d, Q_CARTIER_CAP)
        .map_err(|e| VerifyError::HypothesisFailure(format!("D is not Q-Cartier: {e}")))?;
    let pos = positivity(fan, &d.scale_int(idx as i64))?;
    if !pos.is_nef {
        return hyp("D is not nef");
    }
    v.hypothesis(format!("D nef Q-Cartier (index {idx})"));
    Ok(idx)
}

fn kappa_of(fan: &Fan, d: &QWeilDivisor, idx: u32) -> Result<usize, VerifyError> {
    match polytope_and_kappa(fan, d, idx)?.kappa {
        Kappa::Dim(k) => Ok(k),
        Kappa::NoSections => hyp("Iitaka dimension undefined: no sections of any multiple"),
    }
}

fn need<'a, T>(x: &'a Option<T>, what: &str) -> Result<&'a T, VerifyError> {
    x.as_ref()
        .ok_or_else(|| VerifyError::HypothesisFailure(format!("instance is missing {what}")))
}

fn table(fan: &Fan, spec: &SheafSpec, field: FieldSel) -> Result<CohomologyTable, VerifyError> {
    Ok(cohomology_table(fan, spec, field)?)
}

/// Correspondence preconditions are instance properties, so their
/// violations surface as hypothesis failures.
fn correspondence(
    fan: &Fan,
    family: &Family,
    l: u32,
    data: &QWeilDivisor,
    field: FieldSel,
) -> Result<crate::multmap::CorrespondenceReport, VerifyError> {
    graded_correspondence_check(fan, family, l, data, field).map_err(|e| match e {
        MultMapError::Cohomology(c) => VerifyError::Cohomology(c),
        other => VerifyError::HypothesisFailure(other.to_string()),
    })
}

fn record_correspondence(
    v: &mut Verdict,
    label: &str,
    rep: &crate::multmap::CorrespondenceReport,
) {
    v.tables.push((format!("{label}:small"), rep.small_h.clone()));
    v.tables.push((format!("{label}:target"), rep.target_h.clone()));
    for viol in &rep.violations {
        v.witness(
            label,
            viol.i,
            format!(
                "degree {:?}: h^{}(target) = {} but h^{}(small) = {}",
                viol.degree, viol.i, viol.lhs, viol.i, viol.rhs
            ),
        );
    }
    if !rep.monotone() {
        v.witness(label, 0, "monotonicity h^i(small) <= h^i(target) fails".to_string());
    }
}

// ---------------------------------------------------------------------------
// the theorem checks

pub fn check(id: TheoremId, inst: &Instance, field: FieldSel) -> Result<VerdictReport, VerifyError> {
    let digest = inst.digest();
    let fan = &inst.fan;
    let mut v = Verdict::new();
    require_complete(fan, &mut v)?;
    match id {
        TheoremId::MainI => {
            let l_div = need(&inst.ample, "a line bundle (ample field)")?;
            let level = *need(&inst.l, "l")?;
            let a = *need(&inst.a, "a")?;
            if level == 0 {
                return hyp("l must be positive");
            }
            if a > fan.rank {
                return hyp("a exceeds dim X");
            }
            if !l_div.is_integral() {
                return hyp("L is not integral");
            }
            v.hypothesis(format!("l = {level}, a = {a}"));
            let b = inst.boundary_or_empty();
            let fam = Family::LogForms { a, boundary: b };
            let rep = correspondence(fan, &fam, level, l_div, field)?;
            record_correspondence(&mut v, "main_i", &rep);
            // the "in particular" clause when L is actually ample
            if positivity(fan, l_div).map(|p| p.is_ample).unwrap_or(false) {
                v.hypothesis("L ample: checking the projective conclusion");
                for (i, &hv) in rep.small_h.iter().enumerate() {
                    if i > 0 && hv > 0 {
                        v.witness("main_i:ample", i, format!("h^{i} = {hv}, expected 0"));
                    }
                }
            }
        }
        TheoremId::Bott => {
            let l_div = need(&inst.ample, "an ample line bundle")?;
            require_ample_cartier(fan, l_div, &mut v)?;
            // all a share the twist L, so one chamber enumeration serves every a
            let specs: Vec<SheafSpec> = (0..=fan.rank)
                .map(|a| SheafSpec::log_forms(a, ReducedBoundary::empty(), l_div.clone()))
                .collect();
            let tables = cohomology_tables_shared(fan, &specs, &[field])?;
            for (a, mut per_field) in tables.into_iter().enumerate() {
                let t = per_field.pop().unwrap();
                v.expect_zero(&format!("omega^{a}⊗L"), &t, |i| i > 0);
            }
        }
        TheoremId::Norimatsu => {
            let l_div = need(&inst.ample, "an ample line bundle")?;
            let b = need(&inst.boundary, "a reduced boundary B")?;
            require_ample_cartier(fan, l_div, &mut v)?;
            let d = canonical_divisor(fan).add(&b.divisor(fan)).add(l_div);
            let t = table(fan, &SheafSpec::reflexive(d), field)?;
            v.expect_zero("O(K+B)⊗L", &t, |i| i > 0);
        }
        TheoremId::NorimatsuPrimeDivisors => {
            let l_div = need(&inst.ample, "an ample line bundle")?;
            let b = need(&inst.boundary, "prime divisor indices")?;
            require_ample_cartier(fan, l_div, &mut v)?;
            let d = l_div.add(&b.divisor(fan).neg());
            let t = table(fan, &SheafSpec::reflexive(d), field)?;
            v.expect_zero("L⊗O(-ΣD_j)", &t, |i| i > 0);
        }
        TheoremId::Kodaira => {
            let l_div = need(&inst.ample, "an ample line bundle")?;
            require_ample_cartier(fan, l_div, &mut v)?;
            let t = table(
                fan,
                &SheafSpec::reflexive(canonical_divisor(fan).add(l_div)),
                field,
            )?;
            v.expect_zero("O(K)⊗L", &t, |i| i > 0);
        }
        TheoremId::MainII => {
            let d = need(&inst.divisor, "a Q-Weil divisor D")?;
            let level = *need(&inst.l, "l")?;
            let rep_f = correspondence(fan, &Family::Floor, level, d, field)?;
            record_correspondence(&mut v, "main_ii:floor", &rep_f);
            let rep_c = correspondence(fan, &Family::CeilCanonical, level, d, field)?;
            record_correspondence(&mut v, "main_ii:ceil", &rep_c);
            v.hypothesis(format!("lD integral at l = {level}"));
        }
        TheoremId::KawamataViehweg => {
            let d = need(&inst.divisor, "a nef Q-Cartier divisor D")?;
            let idx = require_nef_qcartier(fan, d, &mut v)?;
            let kappa = kappa_of(fan, d, idx)?;
            v.hypothesis(format!("kappa = {kappa}"));
            let r = rounding(d);
            let tf = table(fan, &SheafSpec::reflexive(r.floor), field)?;
            v.expect_zero("O(⌊D⌋)", &tf, |i| i != 0);
            let tc = table(
                fan,
                &SheafSpec::reflexive(canonical_divisor(fan).add(&r.ceil)),
                field,
            )?;
            v.expect_zero("O(K+⌈D⌉)", &tc, |i| i != fan.rank - kappa);
        }
        TheoremId::Vari => {
            let d = need(&inst.divisor, "a Q-Weil divisor D")?;
            let level = *need(&inst.l, "l")?;
            let b = need(&inst.boundary, "a reduced boundary B")?;
            let fam = Family::CeilCanonicalPlusB(b.clone());
            let rep = correspondence(fan, &fam, level, d, field)?;
            record_correspondence(&mut v, "vari", &rep);
            v.hypothesis(format!("lD integral at l = {level}; B avoids frac(D)"));
            // the unconditional vanishing needs D ample Q-Cartier
            let ample = q_cartier_index(fan, d, Q_CARTIER_CAP)
                .ok()
                .and_then(|idx| positivity(fan, &d.scale_int(idx as i64)).ok())
                .map(|p| p.is_ample)
                .unwrap_or(false);
            if ample {
                v.hypothesis("D ample Q-Cartier: checking the vanishing conclusion");
                for (i, &hv) in rep.small_h.iter().enumerate() {
                    if i > 0 && hv > 0 {
                        v.witness("vari:ample", i, format!("h^{i} = {hv}, expected 0"));
                    }
                }
            }
        }
        TheoremId::Mustata => check_mustata(inst, field, &mut v)?,
        TheoremId::Bogomolov => {
            let l_div = need(&inst.ample, "a line bundle L")?;
            if !l_div.is_integral() {
                return hyp("L is not integral");
            }
            if positivity(fan, l_div).is_err() {
                return hyp("L is not Cartier");
            }
            if is_principal(fan, l_div) {
                return hyp("L ≅ O_X: excluded by the statement's unless-clause");
            }
            let mut kappa_ok = false;
            for t in 1..=KAPPA_SEARCH_CAP {
                if let Ok(pk) = polytope_and_kappa(fan, l_div, t) {
                    if matches!(pk.kappa, Kappa::Dim(_)) {
                        kappa_ok = true;
                        break;
                    }
                }
            }
            if !kappa_ok {
                return hyp(format!("no sections of L^t for t ≤ {KAPPA_SEARCH_CAP}"));
            }
            v.hypothesis("kappa(X, L) ≥ 0 and L nontrivial");
            let b = inst.boundary_or_empty();
            let neg = l_div.neg();
            // all a share the twist L^-1, so one chamber enumeration serves every a
            let specs: Vec<SheafSpec> = (0..=fan.rank)
                .map(|a| SheafSpec::log_forms(a, b.clone(), neg.clone()))
                .collect();
            let tables = cohomology_tables_shared(fan, &specs, &[field])?;
            for (a, mut per_field) in tables.into_iter().enumerate() {
                let t = per_field.pop().unwrap();
                v.table(format!("omega^{a}(log B)⊗L^-1"), &t);
                if t.h[0] > 0 {
                    v.witness(
                        format!("bogomolov:a={a}"),
                        0,
                        format!("h^0 = {}, expected 0", t.h[0]),
                    );
                }
            }
        }
        TheoremId::KollarInjectivity => check_kollar(inst, field, &mut v)?,
    }
    Ok(v.finish(id, digest, field))
}

fn check_mustata(inst: &Instance, field: FieldSel, v: &mut Verdict) -> Result<(), VerifyError> {
    let fan = &inst.fan;
    let d = need(&inst.divisor, "an integral Weil divisor D")?;
    let e = need(&inst.aux, "a divisor E with coefficients in [0,1]")?;
    let m = *need(&inst.m, "m")?;
    if !d.is_integral() {
        return hyp("D is not integral");
    }
    if m == 0 {
        return hyp("m must be ≥ 1");
    }
    if e.coeffs.iter().any(|c| c.is_negative() || *c > Rat::one()) {
        return hyp("E has a coefficient outside [0,1]");
    }
    if !e.scale_int(m as i64).is_integral() {
        return hyp("mE is not integral");
    }
    v.hypothesis(format!("0 ≤ a_j ≤ 1, mE integral at m = {m}"));
    // the reduction of the statement: l := m+1, D† := D + (m/(m+1))E
    let l = m + 1;
    let d_dag = d.add(&e.scale(&rat(m as i64, l as i64)));
    let r = rounding(&d_dag);
    let e_ceil = rounding(e).ceil;
    assert_eq!(r.floor, *d, "⌊D†⌋ must be D");
    assert_eq!(r.ceil, d.add(&e_ceil), "⌈D†⌉ must be D+⌈E⌉");
    let rep_f = correspondence(fan, &Family::Floor, l, &d_dag, field)?;
    record_correspondence(v, "mustata:floor", &rep_f);
    let rep_c = correspondence(fan, &Family::CeilCanonical, l, &d_dag, field)?;
    record_correspondence(v, "mustata:ceil", &rep_c);
    // independent direct evaluation of both implications (second code path)
    let big1 = table(fan, &SheafSpec::reflexive(d_dag.scale_int(l as i64)), field)?;
    let small1 = table(fan, &SheafSpec::reflexive(d.clone()), field)?;
    v.table("O(D+m(D+E))", &big1);
    v.table("O(D)", &small1);
    let k = canonical_divisor(fan);
    let big2 = table(
        fan,
        &SheafSpec::reflexive(k.add(&d_dag.scale_int(l as i64))),
        field,
    )?;
    let small2 = table(fan, &SheafSpec::reflexive(k.add(d).add(&e_ceil)), field)?;
    v.table("O(K+D+m(D+E))", &big2);
    v.table("O(K+D+⌈E⌉)", &small2);
    for i in 0..=fan.rank {
        if big1.h[i] == 0 && small1.h[i] > 0 {
            v.witness("mustata:direct", i, format!("h^{i}(big)=0 but h^{i}(O(D))={}", small1.h[i]));
        }
        if big2.h[i] == 0 && small2.h[i] > 0 {
            v.witness(
                "mustata:direct_canonical",
                i,
                format!("h^{i}(big)=0 but h^{i}(O(K+D+⌈E⌉))={}", small2.h[i]),
            );
        }
    }
    // the two code paths must agree on the h-vectors they share
    if rep_f.small_h != small1.h || rep_f.target_h != big1.h {
        v.witness("mustata:consistency", 0, "floor reduction disagrees with direct tables");
    }
    if rep_c.small_h != small2.h || rep_c.target_h != big2.h {
        v.witness("mustata:consistency", 0, "ceil reduction disagrees with direct tables");
    }
    Ok(())
}

fn check_kollar(inst: &Instance, field: FieldSel, v: &mut Verdict) -> Result<(), VerifyError> {
    let fan = &inst.fan;
    let l_div = need(&inst.ample, "a nef line bundle L")?;
    let l = *need(&inst.l, "l")?;
    let m = *need(&inst.m, "m")?;
    if m == 0 {
        return hyp("m must be ≥ 1");
    }
    require_nef_cartier(fan, l_div, v)?;
    let kappa = kappa_of(fan, l_div, 1)?;
    v.hypothesis(format!("kappa(X, L) = {kappa}, l = {l}, m = {m}"));
    // vanishing part: h^i(O(K+mL)) = 0 for i ≠ n-kappa
    let tm = table(
        fan,
        &SheafSpec::reflexive(canonical_divisor(fan).add(&l_div.scale_int(m as i64))),
        field,
    )?;
    v.expect_zero("O(K+mL)", &tm, |i| i != fan.rank - kappa);
    // eigensections of L^l
    let sys = section_polytope(fan, &l_div.scale_int(l as i64));
    let sections = match feasible(&sys) {
        Feasibility::Bounded => lattice_points(&sys).expect("bounded polytope"),
        Feasibility::Empty => Vec::new(),
        Feasibility::Unbounded => {
            return hyp("section polytope unbounded: fan data inconsistent")
        }
    };
    if sections.is_empty() {
        return hyp("L^l has no sections");
    }
    match field {
        FieldSel::Rationals => kollar_maps(&QOps, inst, field, &sections, l, m, &tm.h, v),
        FieldSel::PrimeField(p) => {
            kollar_maps(&FpOps::new(p), inst, field, &sections, l, m, &tm.h, v)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn kollar_maps<O: FieldOps>(
    ops: &O,
    inst: &Instance,
    field: FieldSel,
    sections: &[IntVec],
    l: u32,
    m: u32,
    source_h: &[usize],
    v: &mut Verdict,
) -> Result<(), VerifyError> {
    let fan = &inst.fan;
    let l_div = inst.ample.as_ref().unwrap();
    // evenly spaced deterministic sample; all eigensections when few
    let sections: Vec<&IntVec> = if sections.len() <= KOLLAR_SECTION_CAP {
        sections.iter().collect()
    } else {
        (0..KOLLAR_SECTION_CAP)
            .map(|k| &sections[k * (sections.len() - 1) / (KOLLAR_SECTION_CAP - 1)])
            .collect()
    };
    for i in 0..=fan.rank {
        // a map out of the zero space is injective; skip degrees where the
        // source H^i(O(K+mL)) already vanished in the table above
        if source_h[i] == 0 {
            continue;
        }
        let ws: Vec<IntVec> = sections.iter().map(|w| (*w).clone()).collect();
        let ctx = SectionMapContext::for_sections(ops, fan, field, l_div, l, m, i, &ws)?;
        let mut maps: Vec<SparseColumns<O::Elem>> = Vec::new();
        for &w in &sections {
            let map = ctx.sparse_map_for(ops, w)?;
            if !sparse_columns_injective(ops, &map) {
                v.witness(
                    format!("kollar:eigensection {w:?}"),
                    i,
                    format!("rank < {} source dims", ctx.source_dim()),
                );
            }
            maps.push(map);
        }
        // seeded random combinations of the eigensections
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE ^ (i as u64));
        for trial in 0..5 {
            // redraw combinations that vanish in the field (e.g. all even
            // over F_2): the zero section is outside the statement
            let coeffs: Vec<i64> = loop {
                let c: Vec<i64> = sections.iter().map(|_| rng.gen_range(1..=5)).collect();
                if c.iter().any(|&x| !ops.is_zero(&ops.from_int(&Int::from(x)))) {
                    break c;
                }
            };
            let sum: SparseColumns<O::Elem> = (0..ctx.source_dim())
                .map(|c| {
                    let mut acc: std::collections::BTreeMap<usize, O::Elem> =
                        std::collections::BTreeMap::new();
                    for (k, map) in maps.iter().enumerate() {
                        let ck = ops.from_int(&Int::from(coeffs[k]));
                        for (r, val) in &map[c] {
                            let add = ops.mul(val, &ck);
                            let e = acc.entry(*r).or_insert_with(|| ops.zero());
                            *e = ops.add(e, &add);
                        }
                    }
                    acc.into_iter().filter(|(_, val)| !ops.is_zero(val)).collect()
                })
                .collect();
            if !sparse_columns_injective(ops, &sum) {
                v.witness(
                    format!("kollar:combination #{trial}"),
                    i,
                    format!("coefficients {coeffs:?} give a non-injective map"),
                );
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// corpus generation

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct CorpusParams {
    pub seed: u64,
    pub size: usize,
    pub max_rank: usize,
    pub max_subdivisions: usize,
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub params: CorpusParams,
    pub instances: Vec<Instance>,
    /// generation attempts rejected with the reason, for auditability
    pub discarded: Vec<String>,
}

impl Corpus {
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        out.push_str(&serde_json::to_string(&self.params).unwrap());
        out.push('\n');
        for inst in &self.instances {
            let rec = serde_json::json!({"digest": inst.digest(), "instance": inst});
            out.push_str(&serde_json::to_string(&rec).unwrap());
            out.push('\n');
        }
        out
    }

    pub fn from_json_lines(s: &str) -> Result<Corpus, serde_json::Error> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let params: CorpusParams = serde_json::from_str(lines.next().unwrap_or("{}"))?;
        let mut instances = Vec::new();
        for line in lines {
            #[derive(serde::Deserialize)]
            struct Rec {
                instance: Instance,
            }
            let rec: Rec = serde_json::from_str(line)?;
            instances.push(rec.instance);
        }
        Ok(Corpus { params, instances, discarded: Vec::new() })
    }
}

fn base_fans(max_rank: usize) -> Vec<Fan> {
    let mut fans = vec![standard_fan(&FanKind::ProjectiveSpace(1)).unwrap()];
    if max_rank >= 2 {
        fans.push(standard_fan(&FanKind::ProjectiveSpace(2)).unwrap());
        let p1 = standard_fan(&FanKind::ProjectiveSpace(1)).unwrap();
        fans.push(product(&p1, &p1));
        for a in 1..=3 {
            fans.push(standard_fan(&FanKind::Hirzebruch(a)).unwrap());
        }
        fans.push(standard_fan(&FanKind::WeightedProjective(vec![1, 1, 2])).unwrap());
        fans.push(standard_fan(&FanKind::WeightedProjective(vec![1, 1, 3])).unwrap());
    }
    if max_rank >= 3 {
        fans.push(standard_fan(&FanKind::ProjectiveSpace(3)).unwrap());
    }
    fans
}

/// Ample integral Cartier divisor on the fan, or None.
fn ample_cartier_divisor(fan: &Fan) -> Option<QWeilDivisor> {
    let q = fan.find_ample_qdivisor()?;
    let denom = q
        .iter()
        .fold(Int::one(), |acc, c| acc.lcm(c.denom()));
    let mut d = QWeilDivisor::new(q).scale(&Rat::from(denom));
    // keep coefficients small: positive rescaling preserves ampleness
    let content = d.coeffs.iter().fold(Int::zero(), |acc, c| acc.gcd(c.numer()));
    if content > Int::one() {
        d = d.scale(&(Rat::one() / Rat::from(content)));
    }
    let idx = q_cartier_index(fan, &d, Q_CARTIER_CAP).ok()?;
    Some(d.scale_int(idx as i64))
}

pub fn generate_corpus(
    seed: u64,
    size: usize,
    max_rank: usize,
    max_subdivisions: usize,
) -> Corpus {
    assert!(max_rank >= 1 && max_rank <= 3, "corpus is limited to rank ≤ 3");
    let params = CorpusParams { seed, size, max_rank, max_subdivisions };
    let bases = base_fans(max_rank);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::new();
    let mut discarded = Vec::new();
    while instances.len() < size {
        let mut fan = bases[rng.gen_range(0..bases.len())].clone();
        let subs = rng.gen_range(0..=max_subdivisions);
        for _ in 0..subs {
            let cone = fan.max_cones[rng.gen_range(0..fan.max_cones.len())].clone();
            let mut v = vec![Int::zero(); fan.rank];
            for &r in &cone.ray_indices {
                let c = rng.gen_range(1..=2i64);
                for (vi, ui) in v.iter_mut().zip(&fan.rays[r]) {
                    *vi += ui * Int::from(c);
                }
            }
            let g = v.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
            if g > Int::one() {
                v = v.iter().map(|x| x / &g).collect();
            }
            match stellar_subdivide(&fan, &v) {
                Ok(f) => fan = f,
                Err(e) => discarded.push(format!("subdivision rejected: {e}")),
            }
        }
        if !fan.validate().is_empty() || !fan.is_complete() {
            discarded.push("subdivided fan invalid or incomplete".into());
            continue;
        }
        // ray order must match the serialized form, since divisor
        // coefficients are indexed by ray
        let fan = fan.canonicalize();
        let Some(ample) = ample_cartier_divisor(&fan) else {
            discarded.push("no ample divisor found (non-projective subdivision)".into());
            continue;
        };
        // very skewed fans force huge ample coefficients, and table sizes
        // grow like |coeff|^rank; keep the corpus inside the time budget
        let size: Int = ample.coeffs.iter().map(|c| c.numer().abs()).sum();
        if size > Int::from(12) {
            discarded.push(format!("minimal ample divisor too large (|coeffs| sum {size})"));
            continue;
        }
        let nrays = fan.rays.len();
        // rational divisor with denominator ≤ 6 and |numerator| ≤ 6
        let den = [1u32, 2, 2, 3, 3, 4, 6][rng.gen_range(0..7)];
        let nef_like = rng.gen_bool(0.5);
        let divisor = if nef_like {
            // rational multiple of the ample divisor: nef, Q-Cartier
            ample.scale(&rat(rng.gen_range(1..=3), den as i64))
        } else {
            QWeilDivisor::new(
                (0..nrays)
                    .map(|_| rat(rng.gen_range(-6..=6), den as i64))
                    .collect(),
            )
        };
        let m = rng.gen_range(1..=3u32);
        let aux = QWeilDivisor::new(
            (0..nrays).map(|_| rat(rng.gen_range(0..=m) as i64, m as i64)).collect(),
        );
        let mut rays: Vec<usize> = (0..nrays).filter(|_| rng.gen_bool(0.3)).collect();
        rays.truncate(nrays.saturating_sub(1)); // keep B a proper boundary
        let boundary = ReducedBoundary::new(rays);
        let a = rng.gen_range(0..=fan.rank);
        let inst = Instance {
            fan,
            ample: Some(ample),
            divisor: Some(divisor),
            aux: Some(aux),
            boundary: Some(boundary),
            a: Some(a),
            l: Some(den * rng.gen_range(1..=2).min(6 / den.max(1)).max(1)),
            m: Some(m),
        };
        instances.push(inst);
    }
    Corpus { params, instances, discarded }
}

// ---------------------------------------------------------------------------
// the blow-up regression (nef and big is not enough)

/// X = blow-up of P^2 at a torus fixed point, B the exceptional divisor,
/// L the pullback of O(1). Nef-and-big L fails Norimatsu-type vanishing:
/// h^1(X, O(K+B)⊗L) = 1.
pub fn regression_instance() -> Instance {
    let p2 = standard_fan(&FanKind::ProjectiveSpace(2)).unwrap();
    let fan = standard_fan(&FanKind::BlowupAtFixedPoint(
        Box::new(p2),
        Cone::new(vec![0, 1]),
    ))
    .unwrap();
    // rays: (1,0), (0,1), (-1,-1), exceptional (1,1)
    let exc = fan
        .rays
        .iter()
        .position(|r| r.iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>() == vec![1, 1])
        .expect("exceptional ray present");
    let mut l_coeffs = vec![Rat::zero(); fan.rays.len()];
    // pullback of O(1) = D_0 on P^2: support function transported to the
    // subdivided fan, value -1 at the exceptional ray direction
    l_coeffs[0] = Rat::one();
    l_coeffs[exc] = Rat::one();
    let mut inst = Instance::new(fan.clone());
    inst.ample = Some(QWeilDivisor::new(l_coeffs));
    inst.boundary = Some(ReducedBoundary::new(vec![exc]));
    inst
}

pub fn regression_blowup_example() -> VerdictReport {
    let inst = regression_instance();
    let fan = &inst.fan;
    let l_div = inst.ample.as_ref().unwrap();
    let b = inst.boundary.as_ref().unwrap();
    let d = canonical_divisor(fan).add(&b.divisor(fan)).add(l_div);
    let spec = SheafSpec::reflexive(d);
    let mut v = Verdict::new();
    v.hypothesis("L = f^*O(1): nef and big but not ample");
    let mut ok = true;
    for field in [FieldSel::Rationals, FieldSel::prime(2).unwrap()] {
        let t = cohomology_table(fan, &spec, field).expect("regression fan is complete");
        v.table(format!("O(K+B)⊗L over {}", field.label()), &t);
        if t.h != vec![0, 1, 0] {
            ok = false;
            v.witness(
                format!("regression over {}", field.label()),
                1,
                format!("expected h = [0, 1, 0], computed {:?}", t.h),
            );
        }
    }
    let mut rep = v.finish(TheoremId::Norimatsu, inst.digest(), FieldSel::Rationals);
    rep.holds = ok;
    rep
}
