//! Acceptance gate for the laboratory: ten criteria spanning
//! topology-from-curvature quadrature, the self-dual algebra
//! inequality, the integral identities on Kähler constant-scalar and
//! Einstein entries, Chern-number consistency, the discretized
//! Weitzenböck operator, the star-scalar cross-check, the curvature
//! bound's saturation, and frame independence of the block
//! decomposition.
//!
//! The single test prints one `criterion N: PASS/FAIL — detail` line
//! per criterion (run with `--nocapture` or `--show-output` to see them
//! on success).  Every verifiable statement is asserted; criterion 2
//! carries one sub-claim that is not mathematically attainable — the
//! gap's equality locus does not force W₊(ω)^⊥ to vanish — so its line
//! reports FAIL with the measured counterexample, and the assertions
//! instead pin the behavior the algebra actually dictates.  The
//! criterion's other clauses (nonnegativity over 10⁶ samples, the
//! minimizer reaching the equality locus, the degenerate eigenvalue
//! pair there) are asserted as stated.
//!
//! All randomness is seeded, so the printed lines are byte-stable
//! across runs.

use std::collections::BTreeMap;
use std::time::Instant;

use akcurv::almost_kahler::{self, ak_point};
use akcurv::catalog::{self, CatalogEntry};
use akcurv::functionals::{homogeneous_scheme, integrate_all, scheme_for, IntegralData};
use akcurv::geometry::{decompose, decompose_rotated, random_rotation4, riemann};
use akcurv::grid::{fitted_order, probe_form, weitzenboeck_probe};
use akcurv::sd_algebra::{lemma1_gap, minimize_gap, sample_omega, sample_weyl};
use akcurv::{linalg, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PI2: f64 = 9.869604401089358; // π²

/// |a − b| ≤ tol·max(1, |b|): absolute near zero, relative at scale.
fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn entry(id: &str) -> CatalogEntry<f64> {
    catalog::load_default(id).unwrap()
}

fn entry_with(id: &str, params: &[(&str, f64)]) -> CatalogEntry<f64> {
    let map: BTreeMap<String, f64> = params.iter().map(|&(k, v)| (k.to_owned(), v)).collect();
    catalog::load(id, &map).unwrap()
}

/// Shared quadrature results: every integral criterion reads from one
/// `integrate_all` pass per (entry, scheme), computed up front with the
/// wall time of the node pass recorded for the runtime clause.
struct Quad {
    entry: CatalogEntry<f64>,
    shortcut: IntegralData<f64>,
    nodes: IntegralData<f64>,
    resolution: usize,
    seconds: f64,
}

fn quad(entry: CatalogEntry<f64>, resolution: usize) -> Quad {
    let shortcut = integrate_all(&entry, &homogeneous_scheme(&entry).unwrap()).unwrap();
    let scheme = scheme_for(&entry, resolution).unwrap();
    let t = Instant::now();
    let nodes = integrate_all(&entry, &scheme).unwrap();
    let seconds = t.elapsed().as_secs_f64();
    Quad {
        entry,
        shortcut,
        nodes,
        resolution,
        seconds,
    }
}

// ---------------------------------------------------------------------
// criterion 1: Euler characteristic and signature from curvature
// ---------------------------------------------------------------------

fn criterion_1(quads: &[&Quad]) -> String {
    let expected = [("t4_flat", 0.0, 0.0), ("s4_round", 2.0, 0.0), ("cp2_fs", 3.0, 1.0), ("s2xs2", 4.0, 0.0)];
    let mut worst_exact = 0.0_f64;
    let mut worst_quad = 0.0_f64;
    let mut slowest = 0.0_f64;
    for q in quads {
        let (_, chi, tau) = expected
            .iter()
            .find(|(id, _, _)| *id == q.entry.id)
            .copied()
            .unwrap();
        for (d, tol, worst) in [
            (&q.shortcut, 1e-10, &mut worst_exact),
            (&q.nodes, 1e-4, &mut worst_quad),
        ] {
            let (dc, dt) = ((d.chi() - chi).abs(), (d.tau() - tau).abs());
            assert!(
                dc <= tol && dt <= tol,
                "{}: χ = {}, τ = {} (want {chi}, {tau}, tol {tol:.0e})",
                q.entry.label(),
                d.chi(),
                d.tau()
            );
            *worst = worst.max(dc).max(dt);
        }
        assert!(
            q.seconds < 30.0,
            "{}: node pass took {:.1}s (budget 30s)",
            q.entry.label(),
            q.seconds
        );
        slowest = slowest.max(q.seconds);
    }
    format!(
        "χ, τ on 4 entries: exact shortcut off by ≤ {worst_exact:.1e} (tol 1e-10), \
         chart quadrature off by ≤ {worst_quad:.1e} (tol 1e-4), slowest entry {slowest:.1}s < 30s"
    )
}

// ---------------------------------------------------------------------
// criterion 2: the self-dual algebra gap — nonnegativity and the
// equality locus
// ---------------------------------------------------------------------

fn criterion_2() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    // 10⁶ random (W, ω): the gap never drops below −1e−10.
    let n_samples = 1_000_000_usize;
    let t = Instant::now();
    let mut min_gap = f64::INFINITY;
    for _ in 0..n_samples {
        let w = sample_weyl(&mut rng);
        let omega = sample_omega(&mut rng);
        min_gap = min_gap.min(lemma1_gap(&w, &omega).unwrap());
    }
    let sample_secs = t.elapsed().as_secs_f64();
    assert!(min_gap >= -1e-10, "min gap over {n_samples} samples: {min_gap:.3e}");
    assert!(sample_secs < 10.0, "sampling took {sample_secs:.2}s (budget 10s)");

    // Minimization oracle: projected gradient descent reaches the
    // equality locus from every random start, and the locus is
    // characterized by a degenerate eigenvalue pair of W restricted to
    // ω^⊥ —NOT by W(ω)^⊥ = 0, which the runs below refute.
    let runs = 64;
    let mut max_final_gap = 0.0_f64;
    let mut max_pair_split = 0.0_f64;
    let mut max_perp = 0.0_f64;
    let mut nonzero_perp_runs = 0;
    for _ in 0..runs {
        let start = sample_weyl(&mut rng);
        let omega = sample_omega(&mut rng);
        let m = minimize_gap(&start, &omega, 50_000).unwrap();
        max_final_gap = max_final_gap.max(m.gap);
        max_pair_split = max_pair_split.max(m.pair_split);
        max_perp = max_perp.max(m.perp_norm2);
        if m.perp_norm2 > 1e-3 {
            nonzero_perp_runs += 1;
        }
    }
    assert!(
        max_final_gap < 1e-8,
        "a minimization run stalled at gap {max_final_gap:.3e}"
    );
    assert!(
        max_pair_split < 1e-3,
        "equality locus reached without a degenerate pair: split {max_pair_split:.3e}"
    );
    // The components of W pairing ω with ω^⊥ are flat directions of the
    // gap (in an adapted basis the gap is (d−f)²/2 + 2e², independent
    // of them), so generic starts keep W(ω)^⊥ ≠ 0 all the way to the
    // minimizer.  If this ever stops holding, the FAIL verdict below
    // would be stale — fail loudly instead.
    assert!(
        nonzero_perp_runs > runs / 2 && max_perp > 1e-3,
        "minimizers unexpectedly reached W(ω)^⊥ ≈ 0 (max |W(ω)^⊥|² = {max_perp:.3e}); \
         the equality-locus analysis needs revisiting"
    );

    (
        false,
        format!(
            "gap ≥ −1e-10 over 10⁶ samples (min {min_gap:.1e}, {sample_secs:.1}s < 10s) ✓; \
             {runs}/{runs} descent runs reach gap < 1e-8 with a degenerate pair on ω^⊥ \
             (max split {max_pair_split:.1e}) ✓; but the clause 'equality only where \
             W₊(ω)^⊥ = 0' fails: {nonzero_perp_runs}/{runs} minimizers keep |W₊(ω)^⊥|² \
             up to {max_perp:.2} at gap < 1e-8 — the mixed components are flat \
             directions of the gap, so equality is decided by the degenerate pair alone"
        ),
    )
}

// ---------------------------------------------------------------------
// criterion 3: the divergence-free-W₊ integral identity on Kähler
// constant-scalar entries
// ---------------------------------------------------------------------

fn criterion_3(kahler_csc: &[&Quad], cp2: &Quad) -> String {
    let mut worst = 0.0_f64;
    for q in kahler_csc {
        for d in [&q.shortcut, &q.nodes] {
            let (lhs, rhs) = d.prop1_pair(&q.entry).unwrap();
            let tol = 1e-6 * lhs.abs().max(1.0);
            assert!(
                (lhs - rhs).abs() <= tol,
                "{}: ∫s·W₊(ω,ω) = {lhs}, 8∫(|W₊|²−½|W₊(ω)^⊥|²) = {rhs}",
                q.entry.label()
            );
            worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
    }
    // Closed form on the projective plane: s = 24, Vol = π²/2 makes
    // both sides 96π², exactly under the shortcut and to quadrature
    // accuracy under the radial rule.
    let want = 96.0 * PI2;
    let (ls, rs) = cp2.shortcut.prop1_pair(&cp2.entry).unwrap();
    assert!(close(ls, want, 1e-9) && close(rs, want, 1e-9), "{ls}, {rs}");
    let (lq, rq) = cp2.nodes.prop1_pair(&cp2.entry).unwrap();
    assert!(close(lq, want, 1e-6) && close(rq, want, 1e-6), "{lq}, {rq}");
    format!(
        "both sides agree to ≤ {worst:.1e} relative (tol 1e-6) on {} Kähler \
         constant-scalar entries; on cp2_fs both sides are 96π² (shortcut to 1e-9, \
         quadrature to 1e-6)",
        kahler_csc.len()
    )
}

// ---------------------------------------------------------------------
// criterion 4: ∫s²/24 = ∫|W₊|² on Kähler constant-scalar entries, with
// a strictly positive gap on the round sphere
// ---------------------------------------------------------------------

fn criterion_4(kahler_csc: &[&Quad], s4: &Quad) -> String {
    let mut worst = 0.0_f64;
    for q in kahler_csc {
        for d in [&q.shortcut, &q.nodes] {
            let gap = d.thm3_gap();
            assert!(gap.abs() <= 1e-6, "{}: gap {gap:.3e}", q.entry.label());
            worst = worst.max(gap.abs());
        }
    }
    // Sanity direction outside the Kähler world: the round sphere has
    // W₊ = 0, so the gap is the whole ∫s²/24 = 16π².
    let want = 16.0 * PI2;
    for d in [&s4.shortcut, &s4.nodes] {
        let gap = d.thm3_gap();
        assert!(
            (gap - want).abs() <= 1e-6,
            "s4_round: gap {gap} vs 16π² = {want}"
        );
    }
    format!(
        "|∫s²/24 − ∫|W₊|²| ≤ {worst:.1e} (tol 1e-6) on Kähler constant-scalar entries; \
         on s4_round the gap is 16π² ± 1e-6 by shortcut and by radial quadrature (n = {})",
        s4.resolution
    )
}

// ---------------------------------------------------------------------
// criterion 5: the mixed-scalar identity on Kähler–Einstein entries
// ---------------------------------------------------------------------

fn criterion_5(ke: &[(&Quad, f64)]) -> String {
    let mut worst = 0.0_f64;
    for (q, want) in ke {
        for d in [&q.shortcut, &q.nodes] {
            let (lhs, rhs) = d.cor3_pair(&q.entry).unwrap();
            assert!(
                close(lhs, *want, 1e-6) && close(rhs, *want, 1e-6),
                "{}: sides ({lhs}, {rhs}), want s²·Vol/12 = {want}",
                q.entry.label()
            );
            let scale = want.abs().max(1.0);
            worst = worst
                .max((lhs - want).abs() / scale)
                .max((rhs - want).abs() / scale);
        }
    }
    format!(
        "∫(ss*/8 − s²/24) and ∫(2|W₊|² − |W₊(ω)^⊥|²) both equal s²·Vol/12 to ≤ {worst:.1e} \
         (tol 1e-6) on cp2_fs (24π²), s2xs2 (64π²/3) and t4_flat (0)"
    )
}

// ---------------------------------------------------------------------
// criterion 6: c₁² from the Blair curvature integral vs topology
// ---------------------------------------------------------------------

fn criterion_6(cases: &[&Quad]) -> String {
    let mut worst = 0.0_f64;
    for q in cases {
        for d in [&q.shortcut, &q.nodes] {
            let (topological, blair) = d.c1_squared(&q.entry).unwrap();
            assert!(
                (topological - blair).abs() <= 1e-3,
                "{}: topological c₁² = {topological}, Blair integral {blair}",
                q.entry.label()
            );
            worst = worst.max((topological - blair).abs());
        }
    }
    format!(
        "(1/4π²)∫(|iF⁺|² − |iF⁻|²) reproduces c₁² = 2χ + 3τ within {worst:.1e} \
         (tol 1e-3) on cp2_fs (9) and s2xs2 (8)"
    )
}

// ---------------------------------------------------------------------
// criterion 7: discretized Weitzenböck identity — convergence order on
// a probe field, rounding floor on the parallel Kähler form
// ---------------------------------------------------------------------

fn criterion_7() -> String {
    let t4 = entry("t4_flat");

    // Oscillating self-dual probe: residual is pure stencil truncation,
    // so it must decay at second order across ≥ 3 grid levels.
    let desc = t4.desc.clone();
    let bump = move |x: &[f64; 4]| probe_form(&desc, x).unwrap();
    let mut levels = Vec::new();
    for n in [8, 12, 16] {
        let (resid, h) = weitzenboeck_probe(&t4.desc, &bump, n).unwrap();
        levels.push((h, resid));
    }
    let order = fitted_order(&levels).unwrap();
    assert!(
        (1.8..=2.2).contains(&order),
        "bump-form convergence order {order:.3} outside [1.8, 2.2]; levels {levels:?}"
    );

    // The Kähler form of the flat torus is parallel with constant chart
    // components: every stencil differentiates constants and the
    // curvature terms cancel algebraically, so the residual sits at the
    // rounding floor rather than at a truncation level.
    let j = t4.j.clone().unwrap();
    let desc = t4.desc.clone();
    let kahler_form =
        move |x: &[f64; 4]| almost_kahler::omega_chart_slots(&desc, &j, x).unwrap();
    let (floor, _) = weitzenboeck_probe(&t4.desc, &kahler_form, 8).unwrap();
    assert!(floor <= 1e-11, "Kähler-form residual {floor:.3e} above rounding floor");

    format!(
        "t4_flat probe form: fitted order {order:.2} ∈ [1.8, 2.2] over {} levels \
         (n = 8, 12, 16); the parallel Kähler form sits at the rounding floor \
         ({floor:.1e} ≤ 1e-11)",
        levels.len()
    )
}

// ---------------------------------------------------------------------
// criterion 8: the star-scalar curvature two ways at random points
// ---------------------------------------------------------------------

fn criterion_8() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ids = ["t4_flat", "s2xs2", "cp2_fs", "kodaira_thurston", "ch2_chart"];
    let points_per_entry = 100;
    let mut worst = 0.0_f64;
    let mut kt_min_nabla = f64::INFINITY;
    for id in ids {
        let e = entry(id);
        let j = e.j.as_ref().unwrap();
        let mut accepted = 0;
        let mut draws = 0;
        while accepted < points_per_entry {
            draws += 1;
            assert!(draws < 100 * points_per_entry, "{id}: sampling starved");
            let p = e.desc.sample_point(&mut rng);
            let ak = match ak_point(&e.desc, j, &p) {
                Ok(ak) => ak,
                // Box-corner samples of the complex-hyperbolic chart
                // can fall outside the unit ball; redraw.
                Err(Error::OutsideDomain { .. }) => continue,
                Err(e) => panic!("{id}: {e}"),
            };
            let resid = (ak.s_star - (ak.pg.s + ak.nabla_omega_norm2)).abs();
            assert!(
                resid <= 1e-8,
                "{id} at {p:?}: |2R(ω,ω) − (s + |∇ω|²)| = {resid:.3e}"
            );
            worst = worst.max(resid);
            if id == "kodaira_thurston" {
                kt_min_nabla = kt_min_nabla.min(ak.nabla_omega_norm2);
            }
            accepted += 1;
        }
    }
    // The nilmanifold entry is the strict witness: ∇ω never vanishes.
    assert!(
        kt_min_nabla > 0.9,
        "kodaira_thurston: |∇ω|² = {kt_min_nabla} (expected 1)"
    );
    format!(
        "|2R(ω,ω) − (s + |∇ω|²)| ≤ {worst:.1e} (tol 1e-8) at {points_per_entry} random \
         points on each of {} entries carrying J, including kodaira_thurston where \
         |∇ω|² = {kt_min_nabla:.3} > 0",
        ids.len()
    )
}

// ---------------------------------------------------------------------
// criterion 9: saturation of the curvature bound on the projective
// plane, and the scalar-curvature hypothesis numbers
// ---------------------------------------------------------------------

fn criterion_9(cp2: &Quad) -> String {
    let want_w = 12.0 * PI2;
    let want_s2 = 288.0 * PI2;
    for d in [&cp2.shortcut, &cp2.nodes] {
        let (wp, bound) = d.lebrun_pair(&cp2.entry).unwrap();
        assert!((wp - want_w).abs() <= 1e-6, "∫|W₊|² = {wp} vs 12π²");
        assert!(
            (bound - want_w).abs() <= 1e-9,
            "(4π²/3)(2χ+3τ) = {bound} vs 12π²"
        );
        let (s2, rhs) = d.corollary6_pair(&cp2.entry).unwrap();
        assert!(close(s2, want_s2, 1e-6) && close(rhs, want_s2, 1e-9), "{s2}, {rhs}");
        assert!(close(s2, rhs, 1e-6), "∫s² = {s2} vs 32π²(2χ+3τ) = {rhs}");
    }
    let (wp, _) = cp2.nodes.lebrun_pair(&cp2.entry).unwrap();
    format!(
        "cp2_fs: ∫|W₊|² = (4π²/3)(2χ+3τ) = 12π² within {:.1e} (tol 1e-6, radial n = {}); \
         (∫s², 32π²(2χ+3τ)) = (288π², 288π²) within 1e-6 relative",
        (wp - want_w).abs(),
        cp2.resolution
    )
}

// ---------------------------------------------------------------------
// criterion 10: frame independence of the block invariants
// ---------------------------------------------------------------------

fn criterion_10() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_inv = 0.0_f64;
    let mut worst_swap = 0.0_f64;
    let mut points_checked = 0;
    for id in catalog::IDS {
        let e = entry(id);
        // The representative point plus two random chart points;
        // frame-presented entries are homogeneous, so one point is the
        // whole story there.
        let mut points = vec![e.rep_point];
        if e.desc.is_chart() {
            while points.len() < 3 {
                let p = e.desc.sample_point(&mut rng);
                match riemann(&e.desc, &p) {
                    Ok(_) => points.push(p),
                    Err(Error::OutsideDomain { .. }) => continue,
                    Err(err) => panic!("{id}: {err}"),
                }
            }
        }
        for p in points {
            let pg = riemann(&e.desc, &p).unwrap();
            let base = decompose(&pg);
            let inv = |b: &akcurv::CurvatureBlocks64| {
                [
                    b.s,
                    b.wplus.norm2(),
                    b.wminus_norm2(),
                    linalg::frobenius2(&b.ric0block),
                ]
            };
            let b0 = inv(&base);
            for _ in 0..5 {
                let q = random_rotation4(&mut rng);
                let br = inv(&decompose_rotated(&pg, &q));
                for (a, b) in b0.iter().zip(br.iter()) {
                    let drift = (a - b).abs() / a.abs().max(1.0);
                    assert!(drift <= 1e-8, "{id} at {p:?}: invariant drift {drift:.3e}");
                    worst_inv = worst_inv.max(drift);
                }
            }
            // Reversing the orientation (negate one frame leg) must
            // exchange the two Weyl norms and fix s and |ric₀|².
            let mut qr = random_rotation4::<f64, _>(&mut rng);
            for row in qr.iter_mut() {
                row[3] = -row[3];
            }
            let brev = inv(&decompose_rotated(&pg, &qr));
            for (a, b) in [(b0[1], brev[2]), (b0[2], brev[1]), (b0[0], brev[0]), (b0[3], brev[3])]
            {
                let drift = (a - b).abs() / a.abs().max(1.0);
                assert!(drift <= 1e-8, "{id} at {p:?}: reversal drift {drift:.3e}");
                worst_swap = worst_swap.max(drift);
            }
            points_checked += 1;
        }
    }
    format!(
        "s, |W₊|², |W₋|², |ric₀|² drift ≤ {worst_inv:.1e} under 5 random rotations at \
         each of {points_checked} points across all {} entries (tol 1e-8); orientation \
         reversal swaps |W₊|² ↔ |W₋|² to ≤ {worst_swap:.1e}",
        catalog::IDS.len()
    )
}

#[test]
fn acceptance_gate() {
    // One node pass per (entry, scheme), shared by every criterion.
    let t4 = quad(entry("t4_flat"), 8);
    let s4 = quad(entry("s4_round"), 12);
    let cp2 = quad(entry("cp2_fs"), 12);
    let s2_11 = quad(entry("s2xs2"), 12);
    let s2_12 = quad(entry_with("s2xs2", &[("a", 1.0), ("b", 2.0)]), 12);

    let mut lines = Vec::new();
    let mut push = |n: usize, pass: bool, detail: String| {
        let verdict = if pass { "PASS" } else { "FAIL" };
        let line = format!("criterion {n:2}: {verdict} — {detail}");
        println!("{line}");
        lines.push(pass);
    };

    push(1, true, criterion_1(&[&t4, &s4, &cp2, &s2_12]));
    let (ok2, detail2) = criterion_2();
    push(2, ok2, detail2);
    push(3, true, criterion_3(&[&t4, &s2_11, &s2_12, &cp2], &cp2));
    push(4, true, criterion_4(&[&t4, &s2_11, &s2_12, &cp2], &s4));
    push(
        5,
        true,
        criterion_5(&[(&cp2, 24.0 * PI2), (&s2_11, 64.0 * PI2 / 3.0), (&t4, 0.0)]),
    );
    push(6, true, criterion_6(&[&cp2, &s2_11]));
    push(7, true, criterion_7());
    push(8, true, criterion_8());
    push(9, true, criterion_9(&cp2));
    push(10, true, criterion_10());

    let passed = lines.iter().filter(|&&p| p).count();
    println!(
        "acceptance: {passed}/{} criteria PASS{}",
        lines.len(),
        if passed == lines.len() {
            String::new()
        } else {
            " — criterion 2's equality clause is not attainable; its line carries \
             the measured counterexample, and everything attainable in it is asserted"
                .to_string()
        }
    );
}
