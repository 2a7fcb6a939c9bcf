//! End-to-end acceptance gate: one test per release criterion. Every
//! tolerance is pinned here, independent of the unit suites, and each test
//! ends with a single summary line for the release checklist.

use std::fs;
use std::path::PathBuf;

use avm2d::basis::{BasisFunction, Family};
use avm2d::cli::{execute, parse_config, read_snapshot, RunConfig};
use avm2d::flux1d::{avm_flux, viscosity_jump, EdgeContext};
use avm2d::flux2d::{corner_flux, CornerContext, CornerForm};
use avm2d::grid::{Assembly, Field, Mode, Scheme, StepDiagnostics, Workspace};
use avm2d::physics::{Axis, Euler, Mhd, System};
use avm2d::problems::{euler_field, exact_accuracy, l1_error, mhd_field, row_cut, Problem};
use avm2d::smallmat::SmallMatrix;
use avm2d::state::State;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("avm2d-acceptance-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).expect("temp dir must be creatable");
    dir
}

// ---------------------------------------------------------------------------
// Criterion 1: the accuracy matrix against the reference error table
// ---------------------------------------------------------------------------

/// Reference L1 density errors for the smooth-wave accuracy test at T = 4,
/// CFL 0.5, meshes 25^2 / 50^2 / 100^2.
const REFERENCE_ERRORS: [(&str, Mode, [f64; 3]); 6] = [
    ("hll", Mode::OneD, [4.9299e-1, 4.2625e-1, 3.0486e-1]),
    ("hll", Mode::TwoD, [4.8377e-1, 4.0087e-1, 2.7504e-1]),
    ("int-3", Mode::OneD, [4.6978e-1, 3.7274e-1, 2.4677e-1]),
    ("int-3", Mode::TwoD, [4.5315e-1, 3.4422e-1, 2.2038e-1]),
    ("pade-4-4", Mode::OneD, [4.5418e-1, 3.4670e-1, 2.2308e-1]),
    ("pade-4-4", Mode::TwoD, [4.3194e-1, 3.1343e-1, 1.9403e-1]),
];

const MESHES: [usize; 3] = [25, 50, 100];
const ACCURACY_TOLERANCE: f64 = 0.05;

fn accuracy_error(family: Family, mode: Mode, n: usize) -> f64 {
    let sys = Euler::new(1.4);
    let mut scheme = Scheme::new(sys, family, mode, Assembly::SpeedWeighted, false, 0.5)
        .expect("accuracy scheme must configure");
    if mode == Mode::TwoD {
        scheme.corner = CornerForm::StarDirect;
    }
    let mut field = euler_field(Problem::Accuracy, n, n).expect("accuracy field");
    scheme
        .run(&mut field, 4.0, &[], |_, _| Ok(()))
        .unwrap_or_else(|e| panic!("accuracy run {family} {mode:?} {n}^2 failed: {e}"));
    l1_error(&field, 0, |x, y| exact_accuracy(x, y, 4.0)[0])
}

#[test]
fn criterion_01_accuracy_table_and_orderings() {
    let mut errors: Vec<(&str, Mode, [f64; 3])> = Vec::new();
    let mut worst = 0.0f64;
    for &(name, mode, reference) in &REFERENCE_ERRORS {
        let family: Family = name.parse().expect("reference scheme name parses");
        let mut measured = [0.0; 3];
        for (k, &n) in MESHES.iter().enumerate() {
            let err = accuracy_error(family, mode, n);
            let rel = (err - reference[k]) / reference[k];
            assert!(
                rel.abs() <= ACCURACY_TOLERANCE,
                "{name} {mode:?} {n}^2: error {err:.6e} deviates {:.2}% from reference {:.6e}",
                100.0 * rel,
                reference[k]
            );
            measured[k] = err;
            worst = worst.max(rel.abs());
        }
        errors.push((name, mode, measured));
    }

    let get = |name: &str, mode: Mode| -> [f64; 3] {
        errors
            .iter()
            .find(|(n, m, _)| *n == name && *m == mode)
            .expect("measured entry")
            .2
    };
    for name in ["hll", "int-3", "pade-4-4"] {
        let one_d = get(name, Mode::OneD);
        let two_d = get(name, Mode::TwoD);
        for k in 0..3 {
            assert!(
                two_d[k] < one_d[k],
                "{name} {}^2: 2d error {:.6e} not below 1d error {:.6e}",
                MESHES[k],
                two_d[k],
                one_d[k]
            );
        }
    }
    for mode in [Mode::OneD, Mode::TwoD] {
        let hll = get("hll", mode);
        let int3 = get("int-3", mode);
        let pade = get("pade-4-4", mode);
        for k in 0..3 {
            assert!(
                pade[k] < int3[k] && int3[k] < hll[k],
                "{mode:?} {}^2: ordering pade {:.6e} < int-3 {:.6e} < hll {:.6e} broken",
                MESHES[k],
                pade[k],
                int3[k],
                hll[k]
            );
        }
    }
    println!(
        "criterion 1 PASS: 18/18 accuracy cells within 5% of reference \
         (worst deviation {:.2}%), both orderings hold on every mesh",
        100.0 * worst
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: linear-basis corner flux equals the closed resolved flux
// ---------------------------------------------------------------------------

/// Closed-form resolved x-flux of the four-wave corner model, written from
/// the control-volume balance over (0, S_R dt) x (S_D dt, S_U dt).
fn closed_form_flux_x<S: System<N>, const N: usize>(sys: &S, ctx: &CornerContext<N>) -> State<N> {
    let (s_l, s_r, s_d, s_u) = (ctx.s_l, ctx.s_r, ctx.s_d, ctx.s_u);
    let v = s_r - s_l;
    let w = s_u - s_d;
    let f_ld = sys.flux(Axis::X, &ctx.u_ld);
    let f_rd = sys.flux(Axis::X, &ctx.u_rd);
    let f_lu = sys.flux(Axis::X, &ctx.u_lu);
    let f_ru = sys.flux(Axis::X, &ctx.u_ru);
    let g_ld = sys.flux(Axis::Y, &ctx.u_ld);
    let g_rd = sys.flux(Axis::Y, &ctx.u_rd);
    let g_lu = sys.flux(Axis::Y, &ctx.u_lu);
    let g_ru = sys.flux(Axis::Y, &ctx.u_ru);

    let f_star_d = (f_ld * s_r - f_rd * s_l + (ctx.u_rd - ctx.u_ld) * (s_l * s_r)) * (1.0 / v);
    let f_star_u = (f_lu * s_r - f_ru * s_l + (ctx.u_ru - ctx.u_lu) * (s_l * s_r)) * (1.0 / v);

    let star_l = (ctx.u_lu * s_u - ctx.u_ld * s_d + g_ld - g_lu) * (1.0 / w);
    let star_r = (ctx.u_ru * s_u - ctx.u_rd * s_d + g_rd - g_ru) * (1.0 / w);
    let g_star_l = (g_ld * s_u - g_lu * s_d + (ctx.u_lu - ctx.u_ld) * (s_d * s_u)) * (1.0 / w);
    let g_star_r = (g_rd * s_u - g_ru * s_d + (ctx.u_ru - ctx.u_rd) * (s_d * s_u)) * (1.0 / w);
    let f_trans_l = sys.transverse_flux(Axis::X, &star_l, &g_star_l);
    let f_trans_r = sys.transverse_flux(Axis::X, &star_r, &g_star_r);

    f_star_u * (s_u / w) - f_star_d * (s_d / w)
        - (g_ru - g_lu + g_ld - g_rd) * (s_l * s_r / (v * w))
        + ((f_ru - f_trans_r) * (s_l * s_u) - (f_lu - f_trans_l) * (s_r * s_u)) * (1.0 / (v * w))
        + ((f_ld - f_trans_l) * (s_r * s_d) - (f_rd - f_trans_r) * (s_l * s_d)) * (1.0 / (v * w))
}

/// The y-direction companion, the same balance integrated over
/// (S_L dt, S_R dt) x (0, S_U dt).
fn closed_form_flux_y<S: System<N>, const N: usize>(sys: &S, ctx: &CornerContext<N>) -> State<N> {
    let (s_l, s_r, s_d, s_u) = (ctx.s_l, ctx.s_r, ctx.s_d, ctx.s_u);
    let v = s_r - s_l;
    let w = s_u - s_d;
    let f_ld = sys.flux(Axis::X, &ctx.u_ld);
    let f_rd = sys.flux(Axis::X, &ctx.u_rd);
    let f_lu = sys.flux(Axis::X, &ctx.u_lu);
    let f_ru = sys.flux(Axis::X, &ctx.u_ru);
    let g_ld = sys.flux(Axis::Y, &ctx.u_ld);
    let g_rd = sys.flux(Axis::Y, &ctx.u_rd);
    let g_lu = sys.flux(Axis::Y, &ctx.u_lu);
    let g_ru = sys.flux(Axis::Y, &ctx.u_ru);

    let g_star_l = (g_ld * s_u - g_lu * s_d + (ctx.u_lu - ctx.u_ld) * (s_d * s_u)) * (1.0 / w);
    let g_star_r = (g_rd * s_u - g_ru * s_d + (ctx.u_ru - ctx.u_rd) * (s_d * s_u)) * (1.0 / w);

    let star_d = (ctx.u_rd * s_r - ctx.u_ld * s_l + f_ld - f_rd) * (1.0 / v);
    let star_u = (ctx.u_ru * s_r - ctx.u_lu * s_l + f_lu - f_ru) * (1.0 / v);
    let f_star_d = (f_ld * s_r - f_rd * s_l + (ctx.u_rd - ctx.u_ld) * (s_l * s_r)) * (1.0 / v);
    let f_star_u = (f_lu * s_r - f_ru * s_l + (ctx.u_ru - ctx.u_lu) * (s_l * s_r)) * (1.0 / v);
    let g_trans_d = sys.transverse_flux(Axis::Y, &star_d, &f_star_d);
    let g_trans_u = sys.transverse_flux(Axis::Y, &star_u, &f_star_u);

    g_star_r * (s_r / v) - g_star_l * (s_l / v)
        - (f_ru - f_rd + f_ld - f_lu) * (s_d * s_u / (v * w))
        + ((g_ru - g_trans_u) * (s_d * s_r) - (g_rd - g_trans_d) * (s_u * s_r)) * (1.0 / (v * w))
        + ((g_ld - g_trans_d) * (s_u * s_l) - (g_lu - g_trans_u) * (s_d * s_l)) * (1.0 / (v * w))
}

fn random_subsonic_euler(rng: &mut ChaCha8Rng) -> State<4> {
    let sys = Euler::new(1.4);
    sys.from_primitive(
        rng.gen_range(0.8..2.0),
        rng.gen_range(-0.3..0.3),
        rng.gen_range(-0.3..0.3),
        rng.gen_range(0.8..2.0),
    )
}

fn random_subsonic_mhd(rng: &mut ChaCha8Rng) -> State<8> {
    let sys = Mhd::new(5.0 / 3.0);
    sys.from_primitive(
        rng.gen_range(0.8..2.0),
        [
            rng.gen_range(-0.25..0.25),
            rng.gen_range(-0.25..0.25),
            rng.gen_range(-0.2..0.2),
        ],
        [
            rng.gen_range(-0.4..0.4),
            rng.gen_range(-0.4..0.4),
            rng.gen_range(-0.4..0.4),
        ],
        rng.gen_range(0.8..2.0),
    )
}

fn keystone_worst<S: System<N>, const N: usize>(
    sys: &S,
    draw: impl Fn(&mut ChaCha8Rng) -> State<N>,
    seed: u64,
    contexts: usize,
) -> f64 {
    let prepared = Family::Hll.prepare().expect("linear basis prepares");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..contexts {
        let ctx = CornerContext::from_states(sys, draw(&mut rng), draw(&mut rng), draw(&mut rng), draw(&mut rng))
            .expect("corner context");
        assert!(ctx.is_subsonic(), "draw produced a supersonic fan");
        for (axis, reference) in [
            (Axis::X, closed_form_flux_x(sys, &ctx)),
            (Axis::Y, closed_form_flux_y(sys, &ctx)),
        ] {
            let avm = corner_flux(sys, &prepared, axis, &ctx, CornerForm::Transverse, false)
                .expect("corner flux");
            assert!(!avm.fallback, "subsonic context must not fall back");
            let scale = reference.abs_max().max(1.0);
            worst = worst.max((avm.flux - reference).abs_max() / scale);
        }
    }
    worst
}

#[test]
fn criterion_02_linear_corner_matches_closed_forms() {
    const TOL: f64 = 1e-10;
    let euler = Euler::new(1.4);
    let mhd = Mhd::new(5.0 / 3.0);
    let worst_euler = keystone_worst(&euler, random_subsonic_euler, 2024, 120);
    let worst_mhd = keystone_worst(&mhd, random_subsonic_mhd, 4048, 120);
    assert!(worst_euler <= TOL, "euler worst relative deviation {worst_euler}");
    assert!(worst_mhd <= TOL, "mhd worst relative deviation {worst_mhd}");
    println!(
        "criterion 2 PASS: linear corner flux matches both closed forms on 120 contexts \
         per system (worst euler {worst_euler:.2e}, mhd {worst_mhd:.2e}, tol 1e-10)"
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: scalar stability conditions for every shipped basis
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_basis_stability_suite() {
    let shipped = [
        BasisFunction::HllLinear { s_left: -1.0, s_right: 1.0 },
        BasisFunction::Internal { n: 2 },
        BasisFunction::Internal { n: 3 },
        BasisFunction::Pade { m: 2, k: 2, depth: 1 },
        BasisFunction::Pade { m: 4, k: 4, depth: 1 },
    ];
    for b in &shipped {
        let f0 = b.eval(0.0).expect("f(0)");
        assert!(f0 > 0.0, "{b:?}: f(0) = {f0} not positive");
        for e in [-1.0, 1.0] {
            let fe = b.eval(e).expect("f at endpoint");
            assert!((fe - 1.0).abs() <= 1e-12, "{b:?}: f({e}) = {fe} not 1");
        }
        for i in -1000..=1000i64 {
            let x = i as f64 / 1000.0;
            let f = b.eval(x).expect("pointwise eval");
            assert!(
                x.abs() <= f + 1e-13 && f <= 1.0 + 1e-12,
                "{b:?}: stability violated at x = {x}: f = {f}"
            );
        }
    }

    let max_error = |b: &BasisFunction| -> f64 {
        let mut worst = 0.0f64;
        for i in -1000..=1000i64 {
            let x = i as f64 / 1000.0;
            worst = worst.max(b.eval(x).expect("eval") - x.abs());
        }
        worst
    };
    let internal: Vec<f64> = (1..=6)
        .map(|n| max_error(&BasisFunction::Internal { n }))
        .collect();
    for pair in internal.windows(2) {
        assert!(
            pair[1] < pair[0],
            "internal max error must decrease with order: {internal:?}"
        );
    }
    let pade: Vec<f64> = (1..=4)
        .map(|m| max_error(&BasisFunction::Pade { m, k: m, depth: 1 }))
        .collect();
    for pair in pade.windows(2) {
        assert!(
            pair[1] < pair[0],
            "pade max error must decrease with order: {pade:?}"
        );
    }
    println!(
        "criterion 3 PASS: 5 shipped bases satisfy |x| <= f <= 1+1e-12 on the 1e-3 grid, \
         f(0) > 0, f(+-1) = 1; max errors decrease int {internal:?} pade {pade:?}"
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: flux consistency and exact mass conservation
// ---------------------------------------------------------------------------

fn shipped_families() -> Vec<Family> {
    vec![
        Family::Hll,
        Family::Internal { n: 2 },
        Family::Internal { n: 3 },
        Family::Pade { m: 2, k: 2, depth: 1 },
        Family::Pade { m: 4, k: 4, depth: 1 },
    ]
}

fn assert_consistency<S: System<N>, const N: usize>(sys: &S, u: State<N>, label: &str) {
    let ctx = CornerContext::from_states(sys, u, u, u, u).expect("corner context");
    for family in shipped_families() {
        let prepared = family.prepare().expect("family prepares");
        for axis in [Axis::X, Axis::Y] {
            let f = sys.flux(axis, &u);
            let edge = EdgeContext::from_pair(sys, axis, u, u).expect("edge context");
            let oned = avm_flux(sys, &prepared, &edge, false).expect("edge flux");
            assert!(
                (oned - f).abs_max() < 1e-13,
                "{label} {family} {axis:?}: edge flux not consistent"
            );
            for form in [CornerForm::Transverse, CornerForm::StarDirect] {
                let corner =
                    corner_flux(sys, &prepared, axis, &ctx, form, false).expect("corner flux");
                assert!(
                    (corner.flux - f).abs_max() < 1e-13,
                    "{label} {family} {axis:?} {form:?}: corner flux not consistent"
                );
            }
        }
    }
}

fn mass_drift_per_step<S: System<N> + Sync, const N: usize>(
    scheme: &Scheme<S, N>,
    field: &mut Field<N>,
    steps: usize,
) -> f64 {
    let mut ws = Workspace::new();
    let mass = |f: &Field<N>| f.totals()[0] * f.cell_area();
    let m0 = mass(field);
    let mut prev = m0;
    let mut time = 0.0;
    let mut worst = 0.0f64;
    for _ in 0..steps {
        let d = scheme.step(field, &mut ws, time, f64::INFINITY).expect("step");
        time = d.time;
        let m = mass(field);
        worst = worst.max((m - prev).abs() / m0);
        prev = m;
    }
    worst
}

#[test]
fn criterion_04_consistency_and_mass_conservation() {
    let euler = Euler::new(1.4);
    let mhd = Mhd::new(5.0 / 3.0);
    assert_consistency(&euler, euler.from_primitive(1.2, 0.3, -0.2, 1.1), "euler");
    assert_consistency(
        &mhd,
        mhd.from_primitive(1.1, [0.2, -0.3, 0.1], [0.5, 0.4, -0.2], 0.9),
        "mhd",
    );

    let scheme = Scheme::new(
        euler,
        Family::Internal { n: 3 },
        Mode::TwoD,
        Assembly::Simpson,
        false,
        0.5,
    )
    .expect("euler scheme");
    let mut field = euler_field(Problem::Accuracy, 32, 32).expect("accuracy field");
    let euler_drift = mass_drift_per_step(&scheme, &mut field, 40);
    assert!(
        euler_drift <= 1e-12,
        "euler periodic mass drift {euler_drift:.3e} per step exceeds 1e-12"
    );

    let scheme = Scheme::new(
        mhd,
        Family::Internal { n: 3 },
        Mode::TwoD,
        Assembly::Simpson,
        true,
        0.8,
    )
    .expect("mhd scheme");
    let mut field = mhd_field(Problem::OrszagTang, 32, 32).expect("vortex field");
    let mhd_drift = mass_drift_per_step(&scheme, &mut field, 40);
    assert!(
        mhd_drift <= 1e-12,
        "mhd mass drift {mhd_drift:.3e} per step with divergence cleaning exceeds 1e-12"
    );
    println!(
        "criterion 4 PASS: edge and corner fluxes consistent for all bases and both systems; \
         worst per-step mass drift euler {euler_drift:.2e}, mhd+powell {mhd_drift:.2e}"
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: vortex robustness with divergence cleaning
// ---------------------------------------------------------------------------

fn run_orszag_tang(family: Family) -> Vec<StepDiagnostics> {
    let sys = Mhd::new(5.0 / 3.0);
    let scheme = Scheme::new(sys, family, Mode::TwoD, Assembly::Simpson, true, 0.8)
        .expect("vortex scheme");
    let mut field = mhd_field(Problem::OrszagTang, 200, 200).expect("vortex field");
    scheme
        .run(&mut field, std::f64::consts::PI, &[], |_, _| Ok(()))
        .unwrap_or_else(|e| panic!("orszag-tang {family} run failed: {e}"))
}

#[test]
fn criterion_05_orszag_tang_robustness() {
    let mut report = Vec::new();
    for family in [Family::Internal { n: 3 }, Family::Pade { m: 4, k: 4, depth: 1 }] {
        let diags = run_orszag_tang(family);
        let min_rho = diags.iter().map(|d| d.min_rho).fold(f64::INFINITY, f64::min);
        let min_p = diags
            .iter()
            .map(|d| d.min_pressure)
            .fold(f64::INFINITY, f64::min);
        assert!(min_rho > 0.0, "{family}: density floor {min_rho} not positive");
        assert!(min_p > 0.0, "{family}: pressure floor {min_p} not positive");

        let div: Vec<f64> = diags
            .iter()
            .map(|d| d.divergence_l1.expect("magnetized run reports divergence"))
            .collect();
        let quarter = (div.len() / 4).max(1);
        let early_max = div[..quarter].iter().cloned().fold(0.0, f64::max);
        let last = *div.last().expect("at least one step");
        assert!(
            last < 10.0 * early_max,
            "{family}: divergence grew from early max {early_max:.3e} to {last:.3e}"
        );
        report.push(format!(
            "{family}: min rho {min_rho:.3e}, min p {min_p:.3e}, div {last:.3e} vs early {early_max:.3e}"
        ));
    }
    println!(
        "criterion 5 PASS: vortex at cfl 0.8 stays positive with bounded divergence ({})",
        report.join("; ")
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: rotor run positivity and output fields
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_rotor_fields_and_positivity() {
    let outdir = temp_dir("rotor");
    let cfg = RunConfig {
        problem: Problem::Rotor,
        family: Family::Pade { m: 4, k: 4, depth: 1 },
        mode: Mode::TwoD,
        nx: 200,
        ny: 200,
        delta: 0.8,
        t_final: 0.295,
        powell: true,
        assembly: Assembly::Simpson,
        corner: CornerForm::Transverse,
        outdir: outdir.clone(),
        snapshots: vec![],
        cuts: vec![],
    };
    let summary = execute(&cfg).expect("rotor run completes");
    assert!(summary.steps > 0, "rotor run must take steps");

    let final_path = outdir.join("final.txt");
    let text = fs::read_to_string(&final_path).expect("final snapshot readable");
    let header = text
        .lines()
        .find(|l| l.starts_with("# i j"))
        .expect("column header present");
    for name in ["rho", "p", "pmag", "mach"] {
        assert!(
            header.split_whitespace().any(|c| c == name),
            "final snapshot missing field '{name}': {header}"
        );
    }
    let snap = read_snapshot(&final_path).expect("final snapshot parses");
    assert_eq!(snap.rows.len(), 200 * 200, "one row per interior cell");
    let mut min_p = f64::INFINITY;
    for row in &snap.rows {
        // Columns: i j x y, 8 conserved, then p, pmag, mach.
        let (rho, p, pmag, mach) = (row[4], row[12], row[13], row[14]);
        assert!(rho > 0.0 && p > 0.0, "nonpositive density or pressure in output");
        assert!(pmag >= 0.0 && mach.is_finite(), "derived fields must be physical");
        min_p = min_p.min(p);
    }
    let _ = fs::remove_dir_all(&outdir);
    println!(
        "criterion 6 PASS: rotor completed {} steps at cfl 0.8; final output carries \
         rho/p/pmag/mach with min p {min_p:.3e} > 0",
        summary.steps
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: magnetic field stays uniform across the planar shock
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_by_uniform_across_shock() {
    let sys = Mhd::new(5.0 / 3.0);
    let scheme = Scheme::new(
        sys,
        Family::Internal { n: 3 },
        Mode::TwoD,
        Assembly::Simpson,
        true,
        0.8,
    )
    .expect("riemann scheme");
    let mut field = mhd_field(Problem::Riemann2d, 200, 200).expect("riemann field");
    scheme
        .run(&mut field, 0.2, &[], |_, _| Ok(()))
        .expect("riemann run completes");

    // The cut at y = -0.5 also meets the left-running shock from the
    // vertical initial interface, which by t = 0.2 has reached x ~ -0.35;
    // B_y is tangential to that shock and jumps across it in the exact
    // solution. The uniformity claim concerns the planar region governed by
    // the horizontal interface, so the window stops short of that shock.
    let cut = row_cut(&field, -0.5, 5);
    let window: Vec<f64> = cut
        .iter()
        .filter(|(x, _)| (-1.0..=-0.45).contains(x))
        .map(|&(_, by)| by)
        .collect();
    assert!(window.len() > 50, "cut window should span dozens of cells");
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    let max = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = window.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = (max - min) / mean.abs();
    assert!(
        spread < 0.02,
        "B_y varies {:.3}% of its mean along y = -0.5, x in [-1, -0.45]",
        100.0 * spread
    );
    assert!(
        (mean - 0.5078).abs() < 0.01 * 0.5078,
        "B_y mean {mean:.6} should stay at the shared initial value 0.5078"
    );
    println!(
        "criterion 7 PASS: B_y spread along the shock-normal window is {:.4}% of mean \
         (limit 2%), mean {mean:.6}",
        100.0 * spread
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: CFL caps per spatial mode
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_cfl_caps() {
    let euler = Euler::new(1.4);
    let err = match Scheme::new(euler, Family::Hll, Mode::OneD, Assembly::Simpson, false, 0.6) {
        Ok(_) => panic!("1d mode must reject cfl above 0.5"),
        Err(e) => e,
    };
    assert!(err.to_string().contains("0.5"), "rejection names the cap: {err}");
    Scheme::new(euler, Family::Hll, Mode::OneD, Assembly::Simpson, false, 0.5)
        .expect("1d mode accepts cfl 0.5");
    Scheme::new(euler, Family::Hll, Mode::TwoD, Assembly::Simpson, false, 0.8)
        .expect("2d mode accepts cfl 0.8");

    let err = parse_config(["--problem", "accuracy", "--mode", "1d", "--cfl", "0.8"])
        .expect_err("config parser must reject 1d cfl 0.8");
    assert!(err.to_string().contains("cfl"), "error names the flag: {err}");

    // The large-cfl robustness runs are criteria 5-7; a short magnetized run
    // here keeps this criterion self-contained.
    let sys = Mhd::new(5.0 / 3.0);
    let scheme = Scheme::new(sys, Family::Internal { n: 3 }, Mode::TwoD, Assembly::Simpson, true, 0.8)
        .expect("2d scheme at cfl 0.8");
    let mut field = mhd_field(Problem::OrszagTang, 48, 48).expect("vortex field");
    let diags = scheme
        .run(&mut field, 0.3, &[], |_, _| Ok(()))
        .expect("short 2d run at cfl 0.8 completes");
    assert!(!diags.is_empty());
    println!(
        "criterion 8 PASS: 1d rejects cfl > 0.5 at config time (library and CLI), \
         2d runs at cfl 0.8 ({} steps to t = 0.3)",
        diags.len()
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: analytic Jacobians and matrix-function kernels vs oracles
// ---------------------------------------------------------------------------

fn jacobian_fd_worst<S: System<N>, const N: usize>(sys: &S, states: &[State<N>]) -> f64 {
    let mut worst = 0.0f64;
    for u in states {
        for axis in [Axis::X, Axis::Y] {
            let jac = sys.jacobian(axis, u);
            let scale = jac
                .m
                .iter()
                .flatten()
                .fold(1.0f64, |acc, &a| acc.max(a.abs()));
            for col in 0..N {
                let h = 1e-7 * u[col].abs().max(1.0);
                let mut up = *u;
                let mut dn = *u;
                up[col] += h;
                dn[col] -= h;
                let fd = (sys.flux(axis, &up) - sys.flux(axis, &dn)) * (1.0 / (2.0 * h));
                for row in 0..N {
                    worst = worst.max((fd[row] - jac.m[row][col]).abs() / scale);
                }
            }
        }
    }
    worst
}

#[test]
fn criterion_09_jacobian_and_matrix_function_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let euler = Euler::new(1.4);
    let euler_states: Vec<State<4>> = (0..20)
        .map(|_| {
            euler.from_primitive(
                rng.gen_range(0.5..2.5),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.5..2.5),
            )
        })
        .collect();
    let mhd = Mhd::new(5.0 / 3.0);
    let mhd_states: Vec<State<8>> = (0..20)
        .map(|_| {
            mhd.from_primitive(
                rng.gen_range(0.5..2.5),
                [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ],
                [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ],
                rng.gen_range(0.5..2.5),
            )
        })
        .collect();
    let fd_euler = jacobian_fd_worst(&euler, &euler_states);
    let fd_mhd = jacobian_fd_worst(&mhd, &mhd_states);
    assert!(fd_euler <= 1e-6, "euler jacobian vs finite differences: {fd_euler:.3e}");
    assert!(fd_mhd <= 1e-6, "mhd jacobian vs finite differences: {fd_mhd:.3e}");

    fn eigen_oracle_worst<const N: usize>(rng: &mut ChaCha8Rng, draws: usize) -> f64 {
        let nonlinear = [
            (BasisFunction::Internal { n: 2 }, Family::Internal { n: 2 }),
            (BasisFunction::Internal { n: 3 }, Family::Internal { n: 3 }),
            (
                BasisFunction::Pade { m: 2, k: 2, depth: 1 },
                Family::Pade { m: 2, k: 2, depth: 1 },
            ),
            (
                BasisFunction::Pade { m: 4, k: 4, depth: 1 },
                Family::Pade { m: 4, k: 4, depth: 1 },
            ),
        ];
        let mut worst = 0.0f64;
        for _ in 0..draws {
            let mut a = SmallMatrix::<N> { m: [[0.0; N]; N] };
            for i in 0..N {
                for j in 0..=i {
                    let v = rng.gen_range(-1.0..1.0);
                    a.m[i][j] = v;
                    a.m[j][i] = v;
                }
            }
            let na = DMatrix::from_fn(N, N, |i, j| a.m[i][j]);
            let eig = na.symmetric_eigen();
            let lambda = eig.eigenvalues.amax();
            assert!(lambda > 0.0, "degenerate draw");
            let du_vals: [f64; N] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let du = State::new(du_vals);
            let ndu = DVector::from_fn(N, |i, _| du[i]);
            for (scalar, family) in &nonlinear {
                let prepared = family.prepare().expect("family prepares");
                let mine = viscosity_jump(
                    &prepared,
                    || a,
                    lambda,
                    (-lambda, lambda),
                    &du,
                    &State::ZERO,
                )
                .expect("viscosity action");
                let fvals =
                    eig.eigenvalues.map(|m| lambda * scalar.eval(m / lambda).expect("scalar eval"));
                let q = &eig.eigenvectors
                    * DMatrix::from_diagonal(&fvals)
                    * eig.eigenvectors.transpose();
                let reference = &q * &ndu;
                let scale = reference.amax().max(1.0);
                for i in 0..N {
                    worst = worst.max((mine[i] - reference[i]).abs() / scale);
                }
            }
        }
        worst
    }

    let worst4 = eigen_oracle_worst::<4>(&mut rng, 60);
    let worst8 = eigen_oracle_worst::<8>(&mut rng, 60);
    assert!(worst4 <= 1e-10, "4x4 viscosity vs eigendecomposition: {worst4:.3e}");
    assert!(worst8 <= 1e-10, "8x8 viscosity vs eigendecomposition: {worst8:.3e}");
    println!(
        "criterion 9 PASS: jacobians match finite differences (euler {fd_euler:.2e}, \
         mhd {fd_mhd:.2e}, tol 1e-6); matrix kernels match eigendecomposition \
         (4x4 {worst4:.2e}, 8x8 {worst8:.2e}, tol 1e-10)"
    );
}

// ---------------------------------------------------------------------------
// Criterion 10: unmagnetized explosion symmetry and shock march
// ---------------------------------------------------------------------------

fn four_fold_asymmetry(field: &Field<8>) -> f64 {
    let (nx, ny) = (field.nx, field.ny);
    let mut worst = 0.0f64;
    for j in 1..=ny {
        for i in 1..=nx {
            let rho = field.at(i, j)[0];
            for (a, b) in [(nx + 1 - i, j), (i, ny + 1 - j), (nx + 1 - i, ny + 1 - j)] {
                worst = worst.max((rho - field.at(a, b)[0]).abs());
            }
        }
    }
    worst
}

fn shock_radius(field: &Field<8>) -> f64 {
    let j = field.ny / 2;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 1..=field.nx {
        let x = field.x_center(i);
        let rho = field.at(i, j)[0];
        if x > 0.0 && rho > best.1 {
            best = (x, rho);
        }
    }
    best.0
}

#[test]
fn criterion_10_explosion_symmetry_and_shock_march() {
    let sys = Mhd::new(2.0);
    let scheme = Scheme::new(
        sys,
        Family::Internal { n: 3 },
        Mode::TwoD,
        Assembly::Simpson,
        true,
        0.5,
    )
    .expect("explosion scheme");
    let mut field = mhd_field(Problem::ExplosionB0, 100, 100).expect("explosion field");

    let mut radii = Vec::new();
    let mut worst_asym = four_fold_asymmetry(&field);
    scheme
        .run(&mut field, 1.0, &[0.25, 0.5, 0.75], |f, _| {
            radii.push(shock_radius(f));
            worst_asym = worst_asym.max(four_fold_asymmetry(f));
            Ok(())
        })
        .expect("explosion run completes");
    radii.push(shock_radius(&field));
    worst_asym = worst_asym.max(four_fold_asymmetry(&field));

    assert!(
        worst_asym <= 1e-10,
        "four-fold density asymmetry {worst_asym:.3e} exceeds 1e-10"
    );
    assert_eq!(radii.len(), 4, "three snapshots plus the final state");
    for pair in radii.windows(2) {
        assert!(
            pair[1] > pair[0],
            "shock radius must increase between snapshots: {radii:?}"
        );
    }
    println!(
        "criterion 10 PASS: density four-fold symmetric to {worst_asym:.2e} through t = 1, \
         shock front at x = {radii:?} strictly outgoing"
    );
}
