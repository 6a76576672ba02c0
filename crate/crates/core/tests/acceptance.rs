//! End-to-end acceptance gate. Each test covers one numbered criterion over
//! its full instance grid and prints a single pass line; any assertion failure
//! fails the criterion.

use num_complex::Complex64;
use num_rational::Ratio;
use padic_plane::estimates::{
    branch_of, corollary_weighted_sum, dual_ratio, families, log_slope, restriction_ratio,
};
use padic_plane::experiments::{
    circle_coset_sets, example13_sets, proportion_good, random_set, sharpness_probe, GSampling,
};
use padic_plane::fourier::{
    character, dft, difference_set_size, energy_quadruples, extension, idft, l4_sum,
    plancherel_gap, ComplexGrid,
};
use padic_plane::incidence::{
    deviation_check_universal, deviation_check_weighted, fourier_deviation, incidence_count,
    RigidMotionSet,
};
use padic_plane::ring::{circle, PointSet, ResidueClass, RingCtx, Vec2};
use padic_plane::rotation::{
    brute_enumerate, group_order_formula, hensel_enumerate, orbit_partition, orbit_size_formula,
    rotate_set, stabilizer_size_formula, RotationGroup,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;

fn group(p: u64, r: u32) -> (RingCtx, RotationGroup) {
    let ctx = RingCtx::new(p, r).unwrap();
    let group = hensel_enumerate(ctx).unwrap();
    (ctx, group)
}

fn random_indicator_set(ctx: RingCtx, density: f64, rng: &mut ChaCha8Rng) -> PointSet {
    PointSet::from_indices(ctx, (0..ctx.plane_size()).filter(|_| rng.gen_bool(density)))
}

#[test]
fn criterion_1_group_orders() {
    let grid: Vec<(u64, u32)> = [3, 7, 11]
        .into_iter()
        .flat_map(|p| [1, 2, 3].map(|r| (p, r)))
        .chain([5, 13].into_iter().flat_map(|p| [1, 2].map(|r| (p, r))))
        .collect();
    for (p, r) in grid {
        let (ctx, g) = group(p, r);
        let expected = match ctx.residue_class() {
            // |G_r| = p^r (1 + 1/p) for p = 3 (mod 4), p^r (1 - 1/p) otherwise
            ResidueClass::ThreeMod4 => p.pow(r) / p * (p + 1),
            ResidueClass::OneMod4 => p.pow(r) / p * (p - 1),
        };
        assert_eq!(g.order() as u64, expected, "order at p={p} r={r}");
        assert_eq!(g.order() as u64, group_order_formula(ctx));
        if ctx.plane_size() as u64 <= 13u64.pow(4) {
            let brute = brute_enumerate(ctx);
            assert_eq!(brute.elements(), g.elements(), "oracle at p={p} r={r}");
        }
    }
    println!("criterion 1 (group orders, exact): PASS");
}

#[test]
fn criterion_2_orbit_stabilizer() {
    for p in [3u64, 5, 7] {
        for r in [1u32, 2] {
            let (ctx, g) = group(p, r);
            let mut covered = 0usize;
            for orb in orbit_partition(&g) {
                assert_eq!(orb.stabilizer_order, stabilizer_size_formula(ctx, orb.v));
                assert_eq!(orb.len() as u64, orbit_size_formula(ctx, orb.v));
                assert_eq!(orb.len() as u64 * orb.stabilizer_order, g.order() as u64);
                covered += orb.len();
                if ctx.residue_class() == ResidueClass::ThreeMod4 {
                    // orbit = p^v . C_{|m~|, r-v}
                    let scale = ctx.p().pow(orb.v);
                    let small = RingCtx::new(p, r - orb.v).unwrap();
                    let tilde = Vec2::new(
                        (orb.base.x1 / scale) % small.modulus(),
                        (orb.base.x2 / scale) % small.modulus(),
                    );
                    let scaled = PointSet::from_points(
                        ctx,
                        circle(small, small.norm(tilde))
                            .points()
                            .map(|x| Vec2::new(x.x1 * scale, x.x2 * scale)),
                    );
                    assert_eq!(orb.set, scaled, "circle structure p={p} r={r}");
                }
            }
            // the orbits partition the nonzero vectors, so every m was checked
            assert_eq!(covered, ctx.plane_size() - 1);
        }
    }
    println!("criterion 2 (orbit/stabilizer, exact): PASS");
}

#[test]
fn criterion_3_fourier_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in [3u64, 5, 7] {
        for r in [1u32, 2] {
            let ctx = RingCtx::new(p, r).unwrap();
            // integer side: products beta . alpha are uniform over multiples
            // of p^{v(beta)}, so character sums cancel over full periods
            for beta in ctx.points() {
                let mut counts = vec![0u64; ctx.modulus() as usize];
                for alpha in ctx.points() {
                    counts[ctx.dot(beta, alpha) as usize] += 1;
                }
                let step = ctx.p().pow(ctx.vec_valuation(beta));
                let expected = ctx.plane_size() as u64 / (ctx.modulus() / step);
                for (t, &c) in counts.iter().enumerate() {
                    let want = if t as u64 % step == 0 { expected } else { 0 };
                    assert_eq!(c, want, "orthogonality p={p} r={r}");
                }
            }
            // float side
            for beta in ctx.points() {
                let sum: Complex64 = ctx
                    .points()
                    .map(|alpha| character(ctx, ctx.dot(beta, alpha)))
                    .sum();
                let expected = if beta.is_zero() { ctx.plane_size() as f64 } else { 0.0 };
                assert!((sum - expected).norm() <= 1e-9 * ctx.plane_size() as f64);
            }
            for _ in 0..100 {
                let values: Vec<Complex64> = (0..ctx.plane_size())
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let f = ComplexGrid::new(ctx, values);
                assert!(plancherel_gap(&f) <= 1e-9, "plancherel p={p} r={r}");
                let back = idft(&dft(&f));
                let err = f
                    .values()
                    .iter()
                    .zip(back.values())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0f64, f64::max);
                assert!(err <= 1e-9, "inversion p={p} r={r}");
            }
        }
    }
    println!("criterion 3 (Fourier identities): PASS");
}

#[test]
fn criterion_4_energy_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (p, r) in [(3u64, 1u32), (3, 2), (5, 1), (7, 1)] {
        let (ctx, g) = group(p, r);
        for orb in orbit_partition(&g) {
            for kind in 0..2 {
                let f: Vec<Complex64> = (0..orb.len())
                    .map(|_| {
                        let x = if kind == 0 {
                            if rng.gen_bool(0.5) { 1.0 } else { 0.0 }
                        } else if rng.gen_bool(0.5) {
                            1.0
                        } else {
                            -1.0
                        };
                        Complex64::new(x, 0.0)
                    })
                    .collect();
                let lhs = l4_sum(&extension(&orb, &f));
                let rhs = ctx.plane_size() as f64 / (orb.len() as f64).powi(4)
                    * energy_quadruples(&orb, &f);
                let scale = lhs.abs().max(rhs.abs()).max(1e-30);
                assert!(
                    (lhs - rhs).abs() / scale <= 1e-6,
                    "energy identity p={p} r={r} m={:?}",
                    orb.base
                );
            }
        }
    }
    println!("criterion 4 (energy identity): PASS");
}

#[test]
fn criterion_5_restriction_sweeps() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ceiling = 10.0;
    let mut per_p_max: Vec<(f64, f64)> = Vec::new();
    let grid = [(3u64, 1u32), (3, 2), (5, 1), (5, 2), (7, 1), (11, 1)];
    for (p, r) in grid {
        let (ctx, g) = group(p, r);
        let orbits = orbit_partition(&g);
        let mut max_ratio = 0.0f64;
        for orb in &orbits {
            let _ = branch_of(ctx, orb).label();
            let mut fams: Vec<Vec<Complex64>> = vec![
                families::all_ones(orb.len()),
                families::singleton(orb.len()),
            ];
            for _ in 0..10 {
                fams.push(families::random_indicator(orb.len(), &mut rng));
                fams.push(families::random_signs(orb.len(), &mut rng));
            }
            for f in &fams {
                let rep = restriction_ratio(ctx, orb, f, "sweep");
                assert!(rep.ratio.is_finite() && rep.ratio <= ceiling, "restriction p={p} r={r}");
                max_ratio = max_ratio.max(rep.ratio);
            }
            for _ in 0..10 {
                let e = random_indicator_set(ctx, 0.25, &mut rng);
                if e.is_empty() {
                    continue;
                }
                let rep = dual_ratio(ctx, orb, &e).unwrap();
                assert!(rep.ratio <= ceiling, "dual p={p} r={r}");
                max_ratio = max_ratio.max(rep.ratio);
            }
        }
        for _ in 0..10 {
            let a = random_indicator_set(ctx, 0.5, &mut rng);
            let b = random_indicator_set(ctx, 0.5, &mut rng);
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let rep = corollary_weighted_sum(ctx, &orbits, &a, &b).unwrap();
            assert!(rep.squared.ratio <= ceiling, "corollary p={p} r={r}");
            max_ratio = max_ratio.max(rep.squared.ratio);
        }
        if r == 1 && matches!(p, 3 | 7 | 11) {
            per_p_max.push(((p as f64).ln(), max_ratio.max(1e-30).ln()));
        }
    }
    // the observed constants must not grow with p
    let slope = log_slope(&per_p_max);
    assert!(slope <= 0.2, "log-ratio slope {slope} exceeds 0.2");
    println!("criterion 5 (restriction/dual/corollary sweeps, slope {slope:.3}): PASS");
}

#[test]
fn criterion_6_incidence() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (p, r) in [(3u64, 1u32), (3, 2), (5, 1), (7, 1)] {
        let (ctx, g) = group(p, r);
        let full = RigidMotionSet::full(&g);
        for _ in 0..10 {
            let a = random_indicator_set(ctx, 0.5, &mut rng);
            let b = random_indicator_set(ctx, 0.5, &mut rng);
            // z is determined by (g, x, y), so the count is exactly |P| |G_r|
            let exact = incidence_count(&a, &b, &full);
            assert_eq!(exact, (a.len() * b.len() * g.order()) as u64);
        }
        for _ in 0..20 {
            let a = random_indicator_set(ctx, 0.5, &mut rng);
            let b = random_indicator_set(ctx, 0.5, &mut rng);
            let motions = RigidMotionSet::random(&g, ctx.plane_size(), &mut rng);
            let exact = incidence_count(&a, &b, &motions) as f64;
            let main = (a.len() * b.len() * motions.len()) as f64 / ctx.plane_size() as f64;
            let ii = fourier_deviation(&a, &b, &motions);
            assert!(
                (exact - main - ii.re).abs() <= 1e-6 * exact.max(1.0),
                "decomposition p={p} r={r}"
            );
            let universal = deviation_check_universal(&a, &b, &motions);
            let weighted = deviation_check_weighted(&a, &b, &motions);
            assert!(universal.ratio <= 10.0, "universal ratio p={p} r={r}");
            assert!(weighted.ratio <= 10.0, "weighted ratio p={p} r={r}");
            if ctx.residue_class() == ResidueClass::ThreeMod4
                && (b.len() as u64) < ctx.plane_size() as u64
            {
                assert!(weighted.bound <= universal.bound, "improvement p={p} r={r}");
            }
        }
    }
    println!("criterion 6 (incidence exactness and decomposition): PASS");
}

#[test]
fn criterion_7_proportion_experiments() {
    // (p, r, delta_A, delta_B) with the residue-appropriate density condition
    let instances: [(u64, u32, Ratio<u64>, Ratio<u64>); 4] = [
        (7, 1, Ratio::new(7, 10), Ratio::new(9, 20)),
        (3, 2, Ratio::new(9, 10), Ratio::new(3, 4)),
        (5, 1, Ratio::new(7, 10), Ratio::new(7, 10)),
        (13, 1, Ratio::new(9, 20), Ratio::new(9, 20)),
    ];
    let c = Ratio::new(1u64, 2);
    for (p, r, da, db) in instances {
        let (ctx, g) = group(p, r);
        for trial in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(700 + trial);
            let a = random_set(ctx, da, &mut rng);
            let b = random_set(ctx, db, &mut rng);
            let rep = proportion_good(&g, &a, &b, c, GSampling::Exhaustive, &mut rng);
            let applicable = match ctx.residue_class() {
                ResidueClass::ThreeMod4 => rep.cond_sqrt,
                ResidueClass::OneMod4 => rep.cond_prod,
            };
            if applicable {
                assert!(
                    rep.fraction_good >= 0.5,
                    "fraction {} at p={p} r={r} trial={trial}",
                    rep.fraction_good
                );
            }
        }
    }
    println!("criterion 7 (main-theorem proportion experiments): PASS");
}

#[test]
fn criterion_8_sharpness() {
    for (p, r) in [(3u64, 2u32), (5, 2)] {
        let (ctx, g) = group(p, r);
        let layer = p.pow(2 * r - 2);
        for m in 1..=3u64.min(p) {
            for n in 1..=3u64.min(p) {
                let (a, b) = example13_sets(ctx, m, n, 80 + m * 10 + n).unwrap();
                assert_eq!(a.len() as u64, m * layer);
                assert_eq!(b.len() as u64, n * layer);
                for rot in g.iter() {
                    let ga = rotate_set(rot, &a);
                    assert_eq!(ga.len() as u64, m * layer, "p={p} m={m}");
                    assert!(
                        (difference_set_size(&ga, &b) as u64) <= m * n * layer,
                        "coset cap p={p} m={m} n={n}"
                    );
                }
            }
        }
        for gamma in [Ratio::new(1u64, p), Ratio::new(2u64, p)] {
            let probe = sharpness_probe(ctx, &g, gamma, 81).unwrap();
            assert!(
                probe.max_diff as u64 <= probe.cap,
                "gamma probe p={p} gamma={gamma}"
            );
        }
        // balanced circle-coset construction with recorded constant
        let base = RingCtx::new(p, 1).unwrap();
        let y = circle(base, 1);
        let a = circle_coset_sets(ctx, &y).unwrap();
        let cap = (y.len() * y.len()) as u64 * layer;
        let mut max_diff = 0usize;
        for rot in g.iter() {
            max_diff = max_diff.max(difference_set_size(&rotate_set(rot, &a), &a));
        }
        let constant = max_diff as f64 / cap as f64;
        assert!(constant <= 4.0, "circle-coset constant {constant} at p={p}");
    }
    println!("criterion 8 (sharpness constructions, exact caps): PASS");
}

#[test]
fn criterion_9_determinism() {
    let bin = env!("CARGO_BIN_EXE_padic-plane");
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<(&str, Vec<String>)> = vec![
        ("group", vec!["--p".into(), "5".into(), "--r".into(), "2".into()]),
        ("orbit", vec!["--p".into(), "3".into(), "--r".into(), "2".into()]),
        ("fourier", vec!["--p".into(), "3".into(), "--r".into(), "1".into(), "--trials".into(), "10".into()]),
        ("restriction", vec!["--p".into(), "5".into(), "--r".into(), "1".into(), "--trials".into(), "3".into()]),
        ("incidence", vec!["--p".into(), "3".into(), "--r".into(), "1".into(), "--trials".into(), "3".into()]),
        (
            "mattila",
            vec![
                "--p".into(), "5".into(), "--r".into(), "1".into(),
                "--delta-a".into(), "7/10".into(), "--delta-b".into(), "7/10".into(),
                "--trials".into(), "3".into(),
            ],
        ),
        ("sharpness", vec!["--p".into(), "3".into(), "--r".into(), "2".into(), "--gamma".into(), "1/3".into()]),
        ("conjecture", vec!["--p".into(), "3".into(), "--r".into(), "1".into(), "--trials".into(), "2".into()]),
    ];
    for (sub, args) in &cases {
        for format in ["json", "csv"] {
            let mut outputs = Vec::new();
            for (run, threads) in [(0, "1"), (1, "4")] {
                let out = dir.path().join(format!("{sub}-{run}.{format}"));
                let status = Command::new(bin)
                    .arg(sub)
                    .args(args)
                    .args(["--seed", "11", "--threads", threads, "--format", format])
                    .arg("--out")
                    .arg(&out)
                    .current_dir(dir.path())
                    .stderr(std::process::Stdio::null())
                    .status()
                    .unwrap();
                assert!(status.success(), "{sub} ({format}) exited nonzero");
                let mut bytes = std::fs::read(&out).unwrap();
                if format == "csv" {
                    let sidecar = out.with_file_name(format!("{sub}-{run}.csv.manifest.json"));
                    bytes.extend(std::fs::read(sidecar).unwrap());
                }
                outputs.push(bytes);
            }
            assert_eq!(outputs[0], outputs[1], "{sub} ({format}) not byte-identical");
        }
    }
    println!("criterion 9 (byte-identical determinism): PASS");
}
