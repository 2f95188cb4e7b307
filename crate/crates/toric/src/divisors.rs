//! Torus-invariant Q-Weil divisors: rounding, Cartier data, nef/ample
//! support-function criteria, section polytopes and Iitaka dimension.

use num_traits::{One, Signed, Zero};

use crate::exactlin::{
    dot, feasible, smith_normal_form, Feasibility, IneqRow, IneqSystem, Int, IntVec, Rat, Rel,
};
use crate::fans::Fan;

/// D = Σ d_ρ D_ρ with exact rational coefficients, one per fan ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QWeilDivisor {
    pub coeffs: Vec<Rat>,
}

impl QWeilDivisor {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        QWeilDivisor { coeffs }
    }

    pub fn zero(fan: &Fan) -> Self {
        QWeilDivisor { coeffs: vec![Rat::zero(); fan.rays.len()] }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        QWeilDivisor { coeffs: coeffs.iter().map(|&c| Rat::from(Int::from(c))).collect() }
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn scale(&self, k: &Rat) -> Self {
        QWeilDivisor { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Rat::from(Int::from(k)))
    }

    pub fn add(&self, other: &QWeilDivisor) -> Self {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        QWeilDivisor {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        QWeilDivisor { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Integer coefficients; panics if the divisor is not integral.
    pub fn int_coeffs(&self) -> IntVec {
        self.coeffs.iter().map(|c| {
            assert!(c.is_integer());
            c.to_integer()
        }).collect()
    }
}

/// A reduced torus-invariant Weil divisor B: a subset of the rays.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ReducedBoundary {
    pub ray_indices: Vec<usize>,
}

impl ReducedBoundary {
    pub fn empty() -> Self {
        ReducedBoundary { ray_indices: Vec::new() }
    }

    pub fn new(mut ray_indices: Vec<usize>) -> Self {
        ray_indices.sort_unstable();
        ray_indices.dedup();
        ReducedBoundary { ray_indices }
    }

    pub fn contains(&self, ray: usize) -> bool {
        self.ray_indices.binary_search(&ray).is_ok()
    }

    pub fn divisor(&self, fan: &Fan) -> QWeilDivisor {
        let mut coeffs = vec![Rat::zero(); fan.rays.len()];
        for &r in &self.ray_indices {
            coeffs[r] = Rat::one();
        }
        QWeilDivisor { coeffs }
    }
}

/// Local data m_σ per maximal cone with ⟨m_σ, u_ρ⟩ = −d_ρ on the cone's rays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierData {
    pub per_cone: Vec<IntVec>,
}

#[derive(Clone, Debug)]
pub struct Rounding {
    pub floor: QWeilDivisor,
    pub ceil: QWeilDivisor,
    pub frac: QWeilDivisor,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DivisorError {
    #[error("divisor is not Cartier")]
    NotCartier,
    #[error("no multiple up to {0} is integral Cartier")]
    NotQCartier(u32),
    #[error("divisor is not nef")]
    NotNef,
    #[error("fan is not complete")]
    NotComplete,
}

pub fn rounding(d: &QWeilDivisor) -> Rounding {
    let floor: Vec<Rat> = d.coeffs.iter().map(|c| Rat::from(c.floor().to_integer())).collect();
    let ceil: Vec<Rat> = d.coeffs.iter().map(|c| Rat::from(c.ceil().to_integer())).collect();
    let frac: Vec<Rat> = d.coeffs.iter().zip(&floor).map(|(c, f)| c - f).collect();
    Rounding {
        floor: QWeilDivisor::new(floor),
        ceil: QWeilDivisor::new(ceil),
        frac: QWeilDivisor::new(frac),
    }
}

/// K_X = −Σ_ρ D_ρ.
pub fn canonical_divisor(fan: &Fan) -> QWeilDivisor {
    QWeilDivisor { coeffs: vec![-Rat::one(); fan.rays.len()] }
}

/// Integral solution of ⟨m, u_ρ⟩ = −b_ρ over the given rays, via Smith form.
fn integral_solve(fan: &Fan, ray_indices: &[usize], rhs: &[Int]) -> Option<IntVec> {
    let a = fan.ray_matrix(ray_indices);
    let snf = smith_normal_form(&a);
    // A m = rhs  ⇔  S (V⁻¹ m) = U rhs
    let mut c = vec![Int::zero(); a.rows];
    for i in 0..a.rows {
        for j in 0..a.rows {
            c[i] += &snf.u[(i, j)] * &rhs[j];
        }
    }
    let k = a.rows.min(a.cols);
    let mut y = vec![Int::zero(); a.cols];
    for i in 0..a.rows {
        if i < k && !snf.s[(i, i)].is_zero() {
            let (q, r) = num_integer::div_rem(c[i].clone(), snf.s[(i, i)].clone());
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !c[i].is_zero() {
            return None;
        }
    }
    let mut m = vec![Int::zero(); a.cols];
    for i in 0..a.cols {
        for j in 0..a.cols {
            m[i] += &snf.v[(i, j)] * &y[j];
        }
    }
    Some(m)
}

/// Cartier local data of an integral divisor, or NotCartier.
pub fn cartier_data(fan: &Fan, d: &QWeilDivisor) -> Result<CartierData, DivisorError> {
    assert_eq!(d.coeffs.len(), fan.rays.len());
    if !d.is_integral() {
        return Err(DivisorError::NotCartier);
    }
    let coeffs = d.int_coeffs();
    let mut per_cone = Vec::new();
    for cone in &fan.max_cones {
        let rhs: IntVec = cone.ray_indices.iter().map(|&r| -&coeffs[r]).collect();
        match integral_solve(fan, &cone.ray_indices, &rhs) {
            Some(m) => per_cone.push(m),
            None => return Err(DivisorError::NotCartier),
        }
    }
    Ok(CartierData { per_cone })
}

/// Smallest l ≥ 1 with lD integral Cartier, searched up to `cap`.
pub fn q_cartier_index(fan: &Fan, d: &QWeilDivisor, cap: u32) -> Result<u32, DivisorError> {
    for l in 1..=cap {
        let ld = d.scale_int(l as i64);
        if ld.is_integral() && cartier_data(fan, &ld).is_ok() {
            return Ok(l);
        }
    }
    Err(DivisorError::NotQCartier(cap))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Positivity {
    pub is_nef: bool,
    pub is_ample: bool,
}

/// Nef/ample via the support function of an integral Cartier divisor.
pub fn positivity(fan: &Fan, d: &QWeilDivisor) -> Result<Positivity, DivisorError> {
    let data = cartier_data(fan, d)?;
    let coeffs = d.int_coeffs();
    let mut is_nef = true;
    let mut strict_everywhere = true;
    for (ci, cone) in fan.max_cones.iter().enumerate() {
        for (ri, u) in fan.rays.iter().enumerate() {
            let v = dot(&data.per_cone[ci], u) + &coeffs[ri];
            if v.is_negative() {
                is_nef = false;
            }
            if !cone.ray_indices.contains(&ri) && !v.is_positive() {
                strict_everywhere = false;
            }
        }
    }
    let is_ample = is_nef && strict_everywhere && fan.is_complete();
    Ok(Positivity { is_nef, is_ample })
}

/// Iitaka dimension via the section polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kappa {
    Dim(usize),
    NoSections,
}

#[derive(Clone, Debug)]
pub struct PolytopeAndKappa {
    pub polytope: IneqSystem,
    pub kappa: Kappa,
}

/// Section polytope P_D = {m : ⟨m,u_ρ⟩ ≥ −d_ρ ∀ρ} as an inequality system.
pub fn section_polytope(fan: &Fan, d: &QWeilDivisor) -> IneqSystem {
    let rows = fan
        .rays
        .iter()
        .zip(&d.coeffs)
        .map(|(u, c)| IneqRow { normal: u.clone(), offset: c.clone(), rel: Rel::Ge })
        .collect();
    IneqSystem::new(fan.rank, rows)
}

/// P_D together with κ(X, D) = affine dimension of P_{lD}; requires a
/// complete fan and lD integral Cartier nef.
pub fn polytope_and_kappa(
    fan: &Fan,
    d: &QWeilDivisor,
    l: u32,
) -> Result<PolytopeAndKappa, DivisorError> {
    if !fan.is_complete() {
        return Err(DivisorError::NotComplete);
    }
    let ld = d.scale_int(l as i64);
    let pos = positivity(fan, &ld)?;
    if !pos.is_nef {
        return Err(DivisorError::NotNef);
    }
    let polytope = section_polytope(fan, d);
    let dilated = section_polytope(fan, &ld);
    let kappa = match affine_dim(&dilated) {
        Some(k) => Kappa::Dim(k),
        None => Kappa::NoSections,
    };
    Ok(PolytopeAndKappa { polytope, kappa })
}

/// Affine dimension of the solution set, or None if empty. The set must be
/// bounded or the implicit-equality probe still terminates (FM feasibility).
fn affine_dim(sys: &IneqSystem) -> Option<usize> {
    if feasible(sys) == Feasibility::Empty {
        return None;
    }
    // constraint i is an implicit equality iff it cannot be strict on the set
    let mut eq_rows: Vec<Vec<Int>> = Vec::new();
    for i in 0..sys.rows.len() {
        let mut probe = sys.clone();
        probe.rows[i].rel = Rel::Gt;
        if feasible(&probe) == Feasibility::Empty {
            eq_rows.push(sys.rows[i].normal.clone());
        }
    }
    if eq_rows.is_empty() {
        return Some(sys.rank);
    }
    let m = crate::exactlin::IMat::from_rows(eq_rows);
    Some(sys.rank - crate::exactlin::rank_over(&m, crate::exactlin::FieldSel::Rationals))
}

/// Is D the divisor of a character, i.e. O_X(D) ≅ O_X?
pub fn is_principal(fan: &Fan, d: &QWeilDivisor) -> bool {
    if !d.is_integral() {
        return false;
    }
    let coeffs = d.int_coeffs();
    let all: Vec<usize> = (0..fan.rays.len()).collect();
    let rhs: IntVec = coeffs.iter().map(|c| -c).collect();
    integral_solve(fan, &all, &rhs).is_some()
}

// ---------------------------------------------------------------------------
// JSON interchange: coefficients as strings "p/q" (or "p" when integral)

pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_from_string(s: &str) -> Option<Rat> {
    let mut parts = s.splitn(2, '/');
    let p: Int = parts.next()?.trim().parse().ok()?;
    match parts.next() {
        None => Some(Rat::from(p)),
        Some(q) => {
            let q: Int = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
    }
}

impl serde::Serialize for QWeilDivisor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct J {
            coeffs: Vec<String>,
        }
        J { coeffs: self.coeffs.iter().map(rat_to_string).collect() }.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for QWeilDivisor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct J {
            coeffs: Vec<String>,
        }
        let j = J::deserialize(d)?;
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| {
                rat_from_string(s)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
            })
            .collect::<Result<_, _>>()?;
        Ok(QWeilDivisor { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{ivec, lattice_points, rat};
    use crate::fans::{product, projective_line, projective_plane, standard_fan, FanKind};

    #[test]
    fn rounding_examples() {
        let d = QWeilDivisor::new(vec![rat(3, 2), rat(-1, 3)]);
        let r = rounding(&d);
        assert_eq!(r.floor.coeffs, vec![rat(1, 1), rat(-1, 1)]);
        assert_eq!(r.ceil.coeffs, vec![rat(2, 1), rat(0, 1)]);
        assert_eq!(r.frac.coeffs, vec![rat(1, 2), rat(2, 3)]);
        let m = QWeilDivisor::new(vec![rat(-5, 2)]);
        let rm = rounding(&m);
        assert_eq!(rm.floor.coeffs, vec![rat(-3, 1)]);
        assert_eq!(rm.ceil.coeffs, vec![rat(-2, 1)]);
    }

    #[test]
    fn rounding_identities() {
        let d = QWeilDivisor::new(vec![rat(7, 6), rat(-11, 4), rat(3, 1)]);
        let r = rounding(&d);
        assert_eq!(r.floor.add(&r.frac), d);
        assert_eq!(r.ceil, rounding(&d.neg()).floor.neg());
        assert!(r.frac.coeffs.iter().all(|c| !c.is_negative() && *c < rat(1, 1)));
    }

    #[test]
    fn canonical_divisors() {
        assert_eq!(canonical_divisor(&projective_plane()).coeffs, vec![rat(-1, 1); 3]);
        assert_eq!(canonical_divisor(&projective_line()).coeffs, vec![rat(-1, 1); 2]);
    }

    #[test]
    fn cartier_on_p2() {
        let fan = projective_plane();
        let d = QWeilDivisor::from_i64(&[1, 0, 0]);
        let data = cartier_data(&fan, &d).unwrap();
        // defining equations hold exactly
        for (ci, cone) in fan.max_cones.iter().enumerate() {
            for &r in &cone.ray_indices {
                assert_eq!(dot(&data.per_cone[ci], &fan.rays[r]), -&d.int_coeffs()[r]);
            }
        }
        assert!(cartier_data(&fan, &QWeilDivisor::zero(&fan)).is_ok());
    }

    #[test]
    fn weighted_projective_cartier_index() {
        let fan = standard_fan(&FanKind::WeightedProjective(vec![1, 1, 2])).unwrap();
        // ray (1,0): its divisor has q-Cartier index 2
        let ray_idx = fan.rays.iter().position(|r| *r == ivec(&[1, 0])).unwrap();
        let mut c = vec![0i64; fan.rays.len()];
        c[ray_idx] = 1;
        let d = QWeilDivisor::from_i64(&c);
        assert_eq!(cartier_data(&fan, &d), Err(DivisorError::NotCartier));
        assert_eq!(q_cartier_index(&fan, &d, 60).unwrap(), 2);
    }

    #[test]
    fn positivity_on_p2() {
        let fan = projective_plane();
        let d = QWeilDivisor::from_i64(&[1, 0, 0]);
        let p = positivity(&fan, &d).unwrap();
        assert!(p.is_nef && p.is_ample);
        let neg = positivity(&fan, &QWeilDivisor::from_i64(&[-1, 0, 0])).unwrap();
        assert!(!neg.is_nef);
    }

    #[test]
    fn hirzebruch_fiber_is_nef_not_ample() {
        let fan = standard_fan(&FanKind::Hirzebruch(1)).unwrap();
        // fiber class: divisor of the ray (0,−1)
        let idx = fan.rays.iter().position(|r| *r == ivec(&[0, -1])).unwrap();
        let mut c = vec![0i64; 4];
        c[idx] = 1;
        let p = positivity(&fan, &QWeilDivisor::from_i64(&c)).unwrap();
        assert!(p.is_nef);
        assert!(!p.is_ample);
    }

    #[test]
    fn ample_scaling_stays_ample() {
        let fan = projective_plane();
        let d = QWeilDivisor::from_i64(&[1, 0, 0]);
        for k in 1..4 {
            let p = positivity(&fan, &d.scale_int(k)).unwrap();
            assert!(p.is_ample && p.is_nef);
        }
    }

    #[test]
    fn kappa_on_p2_hyperplane() {
        let fan = projective_plane();
        let d = QWeilDivisor::from_i64(&[1, 0, 0]);
        let pk = polytope_and_kappa(&fan, &d, 1).unwrap();
        assert_eq!(pk.kappa, Kappa::Dim(2));
        assert_eq!(lattice_points(&pk.polytope).unwrap().len(), 3);
    }

    #[test]
    fn kappa_of_fiber_pullback_on_p1xp1() {
        let p1 = projective_line();
        let fan = product(&p1, &p1);
        // pullback of a point from the first factor: coefficient 1 on ray (1,0)
        let idx = fan.rays.iter().position(|r| *r == ivec(&[1, 0])).unwrap();
        let mut c = vec![0i64; 4];
        c[idx] = 1;
        let d = QWeilDivisor::from_i64(&c);
        let pk = polytope_and_kappa(&fan, &d, 1).unwrap();
        assert_eq!(pk.kappa, Kappa::Dim(1));
    }

    #[test]
    fn kappa_zero_divisor() {
        let fan = projective_plane();
        let pk = polytope_and_kappa(&fan, &QWeilDivisor::zero(&fan), 1).unwrap();
        assert_eq!(pk.kappa, Kappa::Dim(0));
    }

    #[test]
    fn kappa_dilation_invariance() {
        let fan = projective_plane();
        let d = QWeilDivisor::from_i64(&[1, 0, 0]);
        for k in 1..=3 {
            let pk = polytope_and_kappa(&fan, &d.scale_int(k), 1).unwrap();
            assert_eq!(pk.kappa, Kappa::Dim(2));
        }
    }

    #[test]
    fn principal_divisors() {
        let fan = projective_line();
        // div(x) on P^1 is D_0 − D_∞
        assert!(is_principal(&fan, &QWeilDivisor::from_i64(&[1, -1])));
        assert!(!is_principal(&fan, &QWeilDivisor::from_i64(&[1, 0])));
        assert!(is_principal(&fan, &QWeilDivisor::zero(&fan)));
    }

    #[test]
    fn divisor_json_roundtrip() {
        let d = QWeilDivisor::new(vec![rat(3, 2), rat(-1, 3), rat(2, 1)]);
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("3/2") && s.contains("-1/3") && s.contains("\"2\""));
        let back: QWeilDivisor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
