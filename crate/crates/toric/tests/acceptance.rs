//! The release gate: one test per criterion, each printing a single
//! PASS/FAIL line. Expected values come from closed formulas and
//! independent oracles, never from the implementation under test.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_traits::Zero;

use toric::cohomology::{cohomology_table, degree_complex, relevant_degrees, CechNerve, SheafSpec};
use toric::divisors::{
    canonical_divisor, rounding, section_polytope, QWeilDivisor, ReducedBoundary,
};
use toric::exactlin::{feasible, lattice_points, Feasibility, FieldOps, FieldSel, Int, IntVec, QOps};
use toric::fans::{product, projective_line, projective_plane, standard_fan, Fan, FanKind};
use toric::multmap::{
    check_eigen_decomposition, graded_correspondence_check, Family, MultMapError,
    SectionMapContext,
};
use toric::verify::{
    check, generate_corpus, regression_blowup_example, Instance, TheoremId, VerifyError,
};

fn criterion(n: usize, name: &str, deadline: Option<Duration>, body: impl FnOnce()) {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    match outcome {
        Ok(()) => {
            if let Some(limit) = deadline {
                if elapsed > limit {
                    println!(
                        "criterion {n} ({name}): FAIL [over budget: {elapsed:.2?} > {limit:.2?}]"
                    );
                    panic!("criterion {n} exceeded its time budget");
                }
            }
            println!("criterion {n} ({name}): PASS [{elapsed:.2?}]");
        }
        Err(e) => {
            println!("criterion {n} ({name}): FAIL [{elapsed:.2?}]");
            std::panic::resume_unwind(e);
        }
    }
}

/// C(a, k) for a ≥ 0; 0 when k > a.
fn binom(a: i64, k: i64) -> usize {
    if k < 0 || a < 0 || k > a {
        return 0;
    }
    let mut out: i64 = 1;
    for j in 0..k {
        out = out * (a - j) / (j + 1);
    }
    out as usize
}

/// Lattice points of the (bounded) section polytope P_D.
fn polytope_points(fan: &Fan, d: &QWeilDivisor) -> Vec<IntVec> {
    let sys = section_polytope(fan, d);
    match feasible(&sys) {
        Feasibility::Bounded => lattice_points(&sys).unwrap(),
        Feasibility::Empty => Vec::new(),
        Feasibility::Unbounded => panic!("section polytope of a nef divisor is bounded"),
    }
}

fn line_bundle(fan: &Fan, d: i64) -> SheafSpec {
    let mut coeffs = vec![0i64; fan.rays.len()];
    coeffs[0] = d;
    SheafSpec::reflexive(QWeilDivisor::from_i64(&coeffs))
}

#[test]
fn criterion_1_blowup_regression() {
    criterion(1, "blow-up counterexample h^1 = 1", Some(Duration::from_secs(1)), || {
        let rep = regression_blowup_example();
        assert!(rep.holds, "witnesses: {:?}", rep.witnesses);
        // Q and F_2 tables, in that order
        assert_eq!(rep.tables.len(), 2);
        for (label, h) in &rep.tables {
            assert_eq!(h, &vec![0, 1, 0], "{label}");
        }
    });
}

#[test]
fn criterion_2_projective_space_tables() {
    criterion(2, "P^n closed-form tables", Some(Duration::from_secs(10)), || {
        for n in 1..=3usize {
            let fan = standard_fan(&FanKind::ProjectiveSpace(n)).unwrap();
            for d in -(n as i64) - 2..=n as i64 + 2 {
                let t = cohomology_table(&fan, &line_bundle(&fan, d), FieldSel::Rationals)
                    .unwrap();
                let mut expect = vec![0usize; n + 1];
                expect[0] = if d >= 0 { binom(n as i64 + d, n as i64) } else { 0 };
                expect[n] = if d <= -(n as i64) - 1 { binom(-d - 1, n as i64) } else { 0 };
                assert_eq!(t.h, expect, "P^{n}, O({d})");
            }
        }
    });
}

/// Bott's formula on P^n, derived from the Euler sequence:
/// h^0(Ω^p(k)) = C(k+n−p, k)·C(k−1, p) for k > p; h^n(Ω^p(k)) =
/// C(p−k, −k)·C(−k−1, n−p) for k < p−n; h^p(Ω^p) = 1; 0 otherwise.
fn bott_oracle(n: i64, p: i64, q: i64, k: i64) -> usize {
    if q == 0 && k > p {
        return binom(k + n - p, n - p) * binom(k - 1, p);
    }
    if q == n && k < p - n {
        return binom(p - k, p) * binom(-k - 1, n - p);
    }
    if q == p && k == 0 {
        return 1;
    }
    0
}

#[test]
fn criterion_3_bott_spot_suite() {
    criterion(3, "Bott formula on P^2", Some(Duration::from_secs(30)), || {
        let fan = projective_plane();
        for p in 0..=2usize {
            for d in -3..=3i64 {
                let mut coeffs = vec![0i64; 3];
                coeffs[0] = d;
                let spec = SheafSpec::log_forms(
                    p,
                    ReducedBoundary::empty(),
                    QWeilDivisor::from_i64(&coeffs),
                );
                let t = cohomology_table(&fan, &spec, FieldSel::Rationals).unwrap();
                for q in 0..=2usize {
                    assert_eq!(
                        t.h[q],
                        bott_oracle(2, p as i64, q as i64, d),
                        "h^{q}(P^2, Omega^{p}({d}))"
                    );
                }
            }
        }
    });
}

#[test]
fn criterion_4_theorem_corpus() {
    criterion(4, "corpus of 100, all theorems, Q/F2/F3", Some(Duration::from_secs(600)), || {
        let corpus = generate_corpus(1, 100, 3, 2);
        assert_eq!(corpus.instances.len(), 100);
        let fields = [
            FieldSel::Rationals,
            FieldSel::prime(2).unwrap(),
            FieldSel::prime(3).unwrap(),
        ];
        let mut holds = 0usize;
        let mut skipped = 0usize;
        for inst in &corpus.instances {
            for id in TheoremId::ALL {
                for field in fields {
                    match check(id, inst, field) {
                        Ok(rep) => {
                            assert!(
                                rep.holds,
                                "{} falsified on {} over {}: {:?}",
                                id.label(),
                                inst.digest(),
                                field.label(),
                                rep.witnesses
                            );
                            holds += 1;
                        }
                        Err(VerifyError::HypothesisFailure(_)) => skipped += 1,
                        Err(e) => panic!("{} errored on {}: {e}", id.label(), inst.digest()),
                    }
                }
            }
        }
        assert!(holds > 500, "too few applicable checks: {holds} held, {skipped} skipped");
    });
}

#[test]
fn criterion_5_graded_correspondences() {
    criterion(5, "graded correspondence families", Some(Duration::from_secs(300)), || {
        let corpus = generate_corpus(1, 30, 2, 1);
        let mut checked = 0usize;
        for inst in &corpus.instances {
            let fan = &inst.fan;
            let d = inst.divisor.as_ref().unwrap();
            let frac = rounding(d).frac;
            let b: ReducedBoundary = ReducedBoundary::new(
                inst.boundary
                    .as_ref()
                    .unwrap()
                    .ray_indices
                    .iter()
                    .copied()
                    .filter(|&r| frac.coeffs[r].is_zero())
                    .collect(),
            );
            let floor_d = rounding(d).floor;
            for l in [2u32, 3, 5] {
                let families = [
                    (Family::Floor, d.clone()),
                    (Family::CeilCanonical, d.clone()),
                    (Family::CeilCanonicalPlusB(b.clone()), d.clone()),
                    (
                        Family::LogForms { a: 1, boundary: inst.boundary.clone().unwrap() },
                        floor_d.clone(),
                    ),
                ];
                for (family, data) in families {
                    match graded_correspondence_check(fan, &family, l, &data, FieldSel::Rationals)
                    {
                        Ok(rep) => {
                            assert!(
                                rep.holds() && rep.monotone(),
                                "{} violated at l={l} on {}: {:?}",
                                family.label(),
                                inst.digest(),
                                rep.violations
                            );
                            checked += 1;
                        }
                        // lD not integral for this l, or B meets a
                        // fractional ray: the family does not apply
                        Err(MultMapError::NotIntegral)
                        | Err(MultMapError::FractionalBoundaryRay(_)) => {}
                        Err(e) => panic!("{} errored: {e}", family.label()),
                    }
                }
            }
        }
        assert!(checked >= 150, "only {checked} correspondence checks applied");
    });
}

#[test]
fn criterion_6_eigensheaf_decomposition() {
    criterion(6, "eigensheaf decomposition identity", Some(Duration::from_secs(120)), || {
        let fans = [
            projective_line(),
            projective_plane(),
            standard_fan(&FanKind::Hirzebruch(1)).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for fan in &fans {
            for _ in 0..10 {
                let coeffs: Vec<i64> =
                    (0..fan.rays.len()).map(|_| rng.gen_range(-4..=4)).collect();
                let d = QWeilDivisor::from_i64(&coeffs);
                for l in [2u32, 3] {
                    let rep =
                        check_eigen_decomposition(fan, &d, l, FieldSel::Rationals).unwrap();
                    assert!(
                        rep.holds,
                        "l={l}, D={coeffs:?}: sum {:?} vs total {:?}, mismatches {:?}",
                        rep.summand_h, rep.total_h, rep.mismatches
                    );
                }
            }
        }
    });
}

#[test]
fn criterion_7_kollar_injectivity_p1xp1() {
    criterion(7, "Kollar injectivity on P^1 x P^1", Some(Duration::from_secs(120)), || {
        let fan = product(&projective_line(), &projective_line());
        // L = pullback of O(1) from the first factor: the ray (-1,0)
        let lray =
            fan.rays.iter().position(|r| r[0] == Int::from(-1) && r[1] == Int::from(0));
        let mut coeffs = vec![0i64; 4];
        coeffs[lray.unwrap()] = 1;
        let l_div = QWeilDivisor::from_i64(&coeffs);
        let ops = QOps;
        for m in 1..=4u32 {
            for l in 1..=3u32 {
                let ctx = SectionMapContext::new(
                    &ops,
                    &fan,
                    FieldSel::Rationals,
                    &l_div,
                    l,
                    m,
                    1,
                )
                .unwrap();
                // Kunneth oracle: h^1(O(K+mL)) = h^1(O(m-2,-2)) = m-1
                assert_eq!(ctx.source_dim(), (m - 1) as usize, "m={m}");
                let sections = polytope_points(&fan, &l_div.scale_int(l as i64));
                assert_eq!(sections.len(), (l + 1) as usize);
                let maps: Vec<_> =
                    sections.iter().map(|w| ctx.map_for(&ops, w).unwrap()).collect();
                for (w, map) in sections.iter().zip(&maps) {
                    assert!(map.is_injective(&ops), "m={m}, l={l}, w={w:?}");
                }
                let mut rng = ChaCha8Rng::seed_from_u64(7);
                for _ in 0..5 {
                    let coeffs: Vec<i64> =
                        maps.iter().map(|_| rng.gen_range(1..=5)).collect();
                    let mut sum = maps[0].clone();
                    for (r, row) in sum.matrix.iter_mut().enumerate() {
                        for (c, val) in row.iter_mut().enumerate() {
                            let mut acc =
                                ops.mul(val, &ops.from_int(&Int::from(coeffs[0])));
                            for (k, map) in maps.iter().enumerate().skip(1) {
                                acc = ops.add(
                                    &acc,
                                    &ops.mul(
                                        &map.matrix[r][c],
                                        &ops.from_int(&Int::from(coeffs[k])),
                                    ),
                                );
                            }
                            *val = acc;
                        }
                    }
                    assert!(sum.is_injective(&ops), "m={m}, l={l}, coeffs={coeffs:?}");
                }
                // the library-level verdict agrees
                let mut inst = Instance::new(fan.clone());
                inst.ample = Some(l_div.clone());
                inst.l = Some(l);
                inst.m = Some(m);
                let rep = check(TheoremId::KollarInjectivity, &inst, FieldSel::Rationals)
                    .unwrap();
                assert!(rep.holds, "m={m}, l={l}: {:?}", rep.witnesses);
            }
        }
    });
}

#[test]
fn criterion_8_internal_consistency() {
    criterion(8, "internal consistency invariants", Some(Duration::from_secs(600)), || {
        let corpus = generate_corpus(1, 100, 3, 2);
        let q = FieldSel::Rationals;
        let ops = QOps;
        for inst in &corpus.instances {
            let fan = &inst.fan;
            let n = fan.rank;
            let digest = inst.digest();
            // structure sheaf is acyclic
            let o = SheafSpec::reflexive(QWeilDivisor::zero(fan));
            let t_o = cohomology_table(fan, &o, q).unwrap();
            let mut acyclic = vec![0usize; n + 1];
            acyclic[0] = 1;
            assert_eq!(t_o.h, acyclic, "structure sheaf on {digest}");
            // nef h^0 equals the lattice-point count of the section polytope
            let ample = inst.ample.as_ref().unwrap();
            let t_l = cohomology_table(fan, &SheafSpec::reflexive(ample.clone()), q).unwrap();
            let pts = polytope_points(fan, ample);
            assert_eq!(t_l.h[0], pts.len(), "nef h^0 on {digest}");
            // a = 0 log forms coincide with the reflexive sheaf
            let g = rounding(inst.divisor.as_ref().unwrap()).floor;
            let b = inst.boundary.clone().unwrap();
            let t_refl = cohomology_table(fan, &SheafSpec::reflexive(g.clone()), q).unwrap();
            let t_a0 =
                cohomology_table(fan, &SheafSpec::log_forms(0, b, g.clone()), q).unwrap();
            assert_eq!(t_a0.h, t_refl.h, "a=0 on {digest}");
            assert_eq!(t_a0.per_degree, t_refl.per_degree, "a=0 degrees on {digest}");
            // a = n without boundary is O(K+G)
            let t_top = cohomology_table(
                fan,
                &SheafSpec::log_forms(n, ReducedBoundary::empty(), g.clone()),
                q,
            )
            .unwrap();
            let t_kg = cohomology_table(
                fan,
                &SheafSpec::reflexive(canonical_divisor(fan).add(&g)),
                q,
            )
            .unwrap();
            assert_eq!(t_top.h, t_kg.h, "a=n on {digest}");
            // full boundary makes the sheaf free: C(n,a) copies of O(G)
            let a = *inst.a.as_ref().unwrap();
            let all = ReducedBoundary::new((0..fan.rays.len()).collect());
            let t_free =
                cohomology_table(fan, &SheafSpec::log_forms(a, all, g.clone()), q).unwrap();
            let factor = binom(n as i64, a as i64);
            let expect: Vec<usize> = t_refl.h.iter().map(|h| h * factor).collect();
            assert_eq!(t_free.h, expect, "full-boundary freeness on {digest}");
            // d ∘ d = 0 on a few degree complexes
            let spec = SheafSpec::reflexive(g.clone());
            let nerve = CechNerve::new(fan);
            for m in relevant_degrees(fan, &spec).unwrap().iter().take(3) {
                let cx = degree_complex(&ops, fan, &spec, &nerve, m).unwrap();
                for p in 0..cx.diffs.len().saturating_sub(1) {
                    let (d0, d1) = (&cx.diffs[p], &cx.diffs[p + 1]);
                    if d0.is_empty() || d1.is_empty() {
                        continue;
                    }
                    for c in 0..cx.dims[p] {
                        for r in 0..cx.dims[p + 2] {
                            let mut acc = ops.zero();
                            for k in 0..cx.dims[p + 1] {
                                acc = ops.add(&acc, &ops.mul(&d1[r][k], &d0[k][c]));
                            }
                            assert!(
                                ops.is_zero(&acc),
                                "d∘d ≠ 0 at degree {m:?} on {digest}"
                            );
                        }
                    }
                }
            }
        }
    });
}
