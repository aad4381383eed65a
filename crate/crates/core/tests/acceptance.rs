//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line (visible with `--nocapture`) and enforcing its tolerance.

use std::time::Instant;

use nalgebra::{Point3, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use trigrasp_core::device::ActuatorChannel;
use trigrasp_core::geometry::{signed_distance, Shape};
use trigrasp_core::grasp::{closure_margin, force_closure, GraspMap, GraspPhase};
use trigrasp_core::io::report::ticks_csv;
use trigrasp_core::io::synth::{generate, Preset};
use trigrasp_core::io::{replay, serialize_hand_frames};
use trigrasp_core::metrics::summarize_series;
use trigrasp_core::rendering::{
    friction_force, spring_force, update_proxy, ProxyState, RenderParams,
};
use trigrasp_core::taxonomy::{load_taxonomy, GraspType, Opposition, ThumbPosition};

const DEG: f64 = std::f64::consts::PI / 180.0;

// Criterion 1: replaying the tripod press reproduces the published
// rendered-force ranges at steady state, in bounded time.
#[test]
fn criterion_1_rendered_force_ranges() {
    let (scene, frames) = generate(Preset::TripodPress, 20260810, None);
    let start = Instant::now();
    let report = replay(&scene, &frames, None).expect("press replay succeeds");
    let elapsed = start.elapsed();
    assert_eq!(report.ticks.len(), 10_001);

    let ranges = [(5.7, 7.5), (2.6, 4.4), (3.0, 4.5)];
    let mut steady = 0;
    for t in report.ticks.iter().filter(|t| t.time >= 2.5) {
        for k in 0..3 {
            assert!(
                t.vf_magnitude[k] >= ranges[k].0 && t.vf_magnitude[k] <= ranges[k].1,
                "tick {}: vf{} force {} outside [{}, {}]",
                t.tick,
                k + 1,
                t.vf_magnitude[k],
                ranges[k].0,
                ranges[k].1
            );
        }
        steady += 1;
    }
    assert!(steady > 7000, "steady window too short: {steady}");
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "10 s replay took {elapsed:?}, budget 5 s"
    );
    println!(
        "ACCEPTANCE 1 (rendered-force ranges, replay {:.2?}): PASS",
        elapsed
    );
}

// Criterion 2: commanding past the peak saturates at exactly the
// per-channel peaks.
#[test]
fn criterion_2_peak_force_saturation() {
    let mut channels = ActuatorChannel::defaults();
    let expected = [10.4, 10.1, 10.2];
    for (ch, peak) in channels.iter_mut().zip(expected) {
        let mut max_applied = 0.0f64;
        for _ in 0..100 {
            max_applied = max_applied.max(ch.command_force(15.0, 0.001));
        }
        assert!(
            (max_applied - peak).abs() <= 1e-9,
            "{}: applied max {max_applied} vs peak {peak}",
            ch.channel
        );
    }
    println!("ACCEPTANCE 2 (peak-force saturation 10.4/10.1/10.2 N): PASS");
}

// Criterion 3: across all shipped presets with default parameters, no
// rendered per-finger force exceeds 10.5 N.
#[test]
fn criterion_3_force_ceiling() {
    for preset in Preset::all() {
        let (scene, frames) = generate(preset, 7, None);
        let report = replay(&scene, &frames, None).expect("preset replays");
        let max = report.max_vf_force();
        for (k, m) in max.iter().enumerate() {
            assert!(
                *m <= 10.5,
                "{}: vf{} peak {m} exceeds 10.5 N",
                preset.name(),
                k + 1
            );
        }
    }
    println!("ACCEPTANCE 3 (force ceiling 10.5 N over all presets): PASS");
}

// Criterion 4: the 8-edge closure test agrees with a brute-force LP over
// 32-edge cones on 200 seeded configurations, marginal band excluded.
#[test]
fn criterion_4_force_closure_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mus = [0.0, 0.3, 0.6, 1.0];
    let mut compared = 0;
    let mut skipped = 0;
    for case in 0..200 {
        let g = if case % 2 == 0 {
            random_sphere_tripod(&mut rng)
        } else {
            random_box_tripod(&mut rng)
        };
        let mu = mus[case % mus.len()];
        let fast = force_closure(&g, mu, 8).expect("closure computes");
        let margin8 = closure_margin(&g, mu, 8).expect("margin computes");
        let (margin32, rank32) = oracle::closure_oracle(&g, mu, 32);
        let oracle_verdict = margin32 >= 1e-9 && rank32 == 6;
        if margin32.abs() < 1e-6 || margin8.abs() < 1e-6 {
            skipped += 1;
            continue;
        }
        assert_eq!(
            fast, oracle_verdict,
            "case {case} (mu={mu}): fast {fast} vs oracle {oracle_verdict} \
             (margins {margin8:.3e}/{margin32:.3e}, rank {rank32})"
        );
        compared += 1;
    }
    let elapsed = start.elapsed();
    assert!(compared >= 150, "only {compared} non-marginal cases");
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "oracle sweep took {elapsed:?}, budget 30 s"
    );
    println!(
        "ACCEPTANCE 4 (closure oracle equivalence, {compared} compared / {skipped} marginal, {:.2?}): PASS",
        elapsed
    );
}

// Criterion 5: fuzzed HIP walks never sink the proxy and never leave the
// friction cone, over every shape.
#[test]
fn criterion_5_proxy_invariant_suite() {
    let shapes: [Shape; 4] = [
        Shape::Sphere {
            center: Point3::origin(),
            radius: 0.05,
        },
        Shape::Box {
            center: Point3::origin(),
            half_extents: Vector3::new(0.05, 0.035, 0.06),
            orientation: UnitQuaternion::from_euler_angles(0.4, -0.2, 0.8),
        },
        Shape::Cylinder {
            base: Point3::new(0.0, 0.0, -0.06),
            axis: Vector3::z(),
            radius: 0.035,
            height: 0.12,
        },
        Shape::HalfSpace {
            point: Point3::origin(),
            normal: Vector3::z(),
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(55_555);
    let mut violations = 0usize;
    let mut steps = 0usize;
    for shape in &shapes {
        for mu in [0.0, 0.5] {
            let p = RenderParams {
                mu,
                ..RenderParams::default()
            };
            let mut ps = ProxyState::free(Point3::new(0.0, 0.0, 0.09));
            for _ in 0..12_500 {
                let hip = ps.hip
                    + Vector3::new(
                        rng.random_range(-2e-3..2e-3),
                        rng.random_range(-2e-3..2e-3),
                        rng.random_range(-2.4e-3..2e-3),
                    );
                ps = update_proxy(&ps, hip, shape, &p).expect("walk stays in bounds");
                steps += 1;
                if signed_distance(&ps.proxy, shape).distance < -1e-6 {
                    violations += 1;
                }
                if ps.in_contact {
                    let sf = spring_force(&ps, &p);
                    let ff = friction_force(&ps, sf.spring, &p);
                    if ff.friction.norm() > p.mu * ff.normal_magnitude + 1e-9 {
                        violations += 1;
                    }
                }
            }
        }
    }
    assert_eq!(steps, 100_000);
    assert_eq!(violations, 0, "{violations} invariant violations");
    println!("ACCEPTANCE 5 (proxy invariants over {steps} fuzzed steps): PASS");
}

// Criterion 6: metric oracles — exact quartiles, recovered generator
// parameters, and Q-Q discrimination between normal and bimodal data.
#[test]
fn criterion_6_metrics_oracle_suite() {
    // Quartiles: exact match with a sort-based oracle on 1000 fuzzed series.
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..1000 {
        let n = rng.random_range(2..300);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
        let s = summarize_series(&xs).unwrap();
        assert_eq!(s.q1, oracle::quantile(&xs, 0.25));
        assert_eq!(s.median, oracle::quantile(&xs, 0.5));
        assert_eq!(s.q3, oracle::quantile(&xs, 0.75));
    }

    // The free-motion generator recovers the published yaw parameters.
    let (_, frames) = generate(Preset::FreeMotion, 1157, Some(10_000));
    let analysis = trigrasp_core::metrics::analyze_stream(&frames, false).unwrap();
    let yaw = analysis.columns[0].1.as_ref().expect("yaw summarizes");
    assert!(
        (yaw.mean - (-11.57 * DEG)).abs() < 0.5 * DEG,
        "yaw mean {} deg",
        yaw.mean / DEG
    );
    assert!(
        (yaw.sd - 6.7 * DEG).abs() < 0.5 * DEG,
        "yaw sd {} deg",
        yaw.sd / DEG
    );

    // Q-Q correlation separates normal from bimodal data.
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(607);
    let xs: Vec<f64> = (0..10_000).map(|_| normal.sample(&mut rng)).collect();
    let s = summarize_series(&xs).unwrap();
    assert!(s.qq_corr > 0.999, "normal qq_corr {}", s.qq_corr);

    let lo = Normal::new(-3.0, 0.4).unwrap();
    let hi = Normal::new(3.0, 0.4).unwrap();
    let xs: Vec<f64> = (0..10_000)
        .map(|i| {
            if i % 2 == 0 {
                lo.sample(&mut rng)
            } else {
                hi.sample(&mut rng)
            }
        })
        .collect();
    let s = summarize_series(&xs).unwrap();
    assert!(s.qq_corr < 0.98, "bimodal qq_corr {}", s.qq_corr);

    println!("ACCEPTANCE 6 (metrics oracle suite): PASS");
}

// Criterion 7: the exported taxonomy has 33 rows and the published
// spot-check rows.
#[test]
fn criterion_7_taxonomy_fidelity() {
    let table = load_taxonomy().unwrap();
    let csv = table.export_csv();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 33);

    let check = |id: u8, name: &str, ty: GraspType, opp: Opposition, thumb: ThumbPosition, min: u8| {
        let c = table.by_id(id).unwrap();
        assert_eq!(c.name, name, "id {id}");
        assert_eq!(c.grasp_type, ty, "id {id}");
        assert_eq!(c.opposition, opp, "id {id}");
        assert_eq!(c.thumb, thumb, "id {id}");
        assert_eq!(c.min_fingers, min, "id {id}");
    };
    check(2, "Small Diameter", GraspType::Power, Opposition::Palm, ThumbPosition::Abducted, 2);
    check(14, "Tripod", GraspType::Precision, Opposition::Pad, ThumbPosition::Abducted, 3);
    check(16, "Lateral", GraspType::Intermediate, Opposition::Side, ThumbPosition::Adducted, 2);
    check(24, "Tip Pinch", GraspType::Precision, Opposition::Pad, ThumbPosition::Abducted, 2);
    check(25, "Lateral Tripod", GraspType::Intermediate, Opposition::Side, ThumbPosition::Adducted, 3);
    check(29, "Stick", GraspType::Intermediate, Opposition::Side, ThumbPosition::Adducted, 3);
    check(32, "Ventral", GraspType::Intermediate, Opposition::Side, ThumbPosition::Adducted, 3);
    println!("ACCEPTANCE 7 (taxonomy fidelity, 33 rows + spot checks): PASS");
}

// Criterion 8: identical inputs produce byte-identical tick logs.
#[test]
fn criterion_8_determinism() {
    let (scene, frames) = generate(Preset::GraspLift, 99, None);
    let text = serialize_hand_frames(&frames);
    let (reparsed, _) = trigrasp_core::io::parse_hand_frames(&text).unwrap();

    let a = ticks_csv(&replay(&scene, &reparsed, None).unwrap());
    let b = ticks_csv(&replay(&scene, &reparsed, None).unwrap());
    assert_eq!(a.len(), b.len());
    assert!(a == b, "tick logs differ between identical replays");
    println!(
        "ACCEPTANCE 8 (determinism, {} identical bytes): PASS",
        a.len()
    );
}

// Criterion 9: the grasp-lift preset reaches Lifted with friction and ends
// Slipping without it.
#[test]
fn criterion_9_grasp_lift_dichotomy() {
    for seed in [1u64, 2, 3] {
        let (scene, frames) = generate(Preset::GraspLift, seed, None);
        let lifted = replay(&scene, &frames, None).unwrap();
        assert_eq!(
            lifted.outcome(),
            GraspPhase::Lifted,
            "seed {seed}: mu=0.5 must lift"
        );

        let (mut slick, frames) = generate(Preset::GraspLift, seed, None);
        slick.objects[0].mu = 0.0;
        let slipped = replay(&slick, &frames, None).unwrap();
        assert_eq!(
            slipped.outcome(),
            GraspPhase::Slipping,
            "seed {seed}: mu=0 must end slipping"
        );
        assert!(lifted
            .ticks
            .iter()
            .all(|t| t.phase != GraspPhase::Slipping));
        assert!(slipped.ticks.iter().all(|t| t.phase != GraspPhase::Lifted));
    }
    println!("ACCEPTANCE 9 (grasp-lift dichotomy mu=0.5 vs mu=0): PASS");
}

fn random_sphere_tripod(rng: &mut ChaCha8Rng) -> GraspMap {
    let r = rng.random_range(0.02..0.06);
    let mut normals = [Vector3::zeros(); 3];
    let mut arms = [Vector3::zeros(); 3];
    for i in 0..3 {
        let dir = random_unit(rng);
        normals[i] = -dir;
        arms[i] = dir * r;
    }
    GraspMap {
        reference: Point3::origin(),
        normals,
        arms,
    }
}

fn random_box_tripod(rng: &mut ChaCha8Rng) -> GraspMap {
    let h = Vector3::new(
        rng.random_range(0.02..0.05),
        rng.random_range(0.02..0.05),
        rng.random_range(0.02..0.05),
    );
    let mut normals = [Vector3::zeros(); 3];
    let mut arms = [Vector3::zeros(); 3];
    for i in 0..3 {
        let face = rng.random_range(0..6usize);
        let axis = face / 2;
        let sign = if face % 2 == 0 { 1.0 } else { -1.0 };
        let mut point = Vector3::new(
            rng.random_range(-0.9..0.9) * h.x,
            rng.random_range(-0.9..0.9) * h.y,
            rng.random_range(-0.9..0.9) * h.z,
        );
        point[axis] = sign * h[axis];
        let mut outward = Vector3::zeros();
        outward[axis] = sign;
        normals[i] = -outward;
        arms[i] = point;
    }
    GraspMap {
        reference: Point3::origin(),
        normals,
        arms,
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Independent oracles, written against the same math but along different
/// algorithmic routes than the library: a Big-M simplex with Dantzig
/// pivoting (the library uses two-phase with Bland's rule), Gaussian
/// elimination for rank (the library uses SVD), and a plain
/// sort-and-interpolate quantile.
mod oracle {
    use nalgebra::{Point3, Vector3};
    use trigrasp_core::grasp::GraspMap;

    pub fn quantile(xs: &[f64], p: f64) -> f64 {
        let mut v = xs.to_vec();
        v.sort_by(|a, b| a.total_cmp(b));
        let h = p * (v.len() as f64 - 1.0);
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    }

    /// Margin of the closure feasibility program over `edges`-edge cones,
    /// plus the wrench-set rank. Positive margin with rank 6 is closure.
    pub fn closure_oracle(g: &GraspMap, mu: f64, edges: usize) -> (f64, usize) {
        let wrenches = generators(g, mu, edges);
        let rank = rank_by_elimination(&wrenches);
        let margin = margin_lp(&wrenches);
        (margin, rank)
    }

    fn generators(g: &GraspMap, mu: f64, edges: usize) -> Vec<[f64; 6]> {
        let scale = g
            .arms
            .iter()
            .map(|a| a.norm())
            .fold(0.0f64, f64::max)
            .max(1e-12);
        let mut out = Vec::new();
        for i in 0..3 {
            let n = g.normals[i].normalize();
            let pick = if n.x.abs() < 0.9 {
                Vector3::x()
            } else {
                Vector3::y()
            };
            let t1 = n.cross(&pick).normalize();
            let t2 = n.cross(&t1);
            for e in 0..edges {
                let th = 2.0 * std::f64::consts::PI * e as f64 / edges as f64;
                let f = (n + mu * (th.cos() * t1 + th.sin() * t2)).normalize();
                let m = (Point3::from(g.arms[i]) - Point3::origin())
                    .cross(&f)
                    / scale;
                out.push([f.x, f.y, f.z, m.x, m.y, m.z]);
            }
        }
        out
    }

    fn rank_by_elimination(wrenches: &[[f64; 6]]) -> usize {
        // 6 x K matrix, Gaussian elimination with partial pivoting.
        let k = wrenches.len();
        let mut m: Vec<Vec<f64>> = (0..6)
            .map(|r| (0..k).map(|c| wrenches[c][r]).collect())
            .collect();
        let mut rank = 0;
        let mut col = 0;
        while rank < 6 && col < k {
            let (best, mag) = (rank..6)
                .map(|r| (r, m[r][col].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if mag < 1e-9 {
                col += 1;
                continue;
            }
            m.swap(rank, best);
            for r in 0..6 {
                if r != rank && m[r][col].abs() > 0.0 {
                    let f = m[r][col] / m[rank][col];
                    for c in col..k {
                        m[r][c] -= f * m[rank][c];
                    }
                }
            }
            rank += 1;
            col += 1;
        }
        rank
    }

    /// max eps s.t. sum lambda_i w_i = 0, sum lambda_i = 1, lambda_i >= eps,
    /// via Big-M simplex with Dantzig pivoting on the substituted standard
    /// form. Returns a negative infeasibility when no combination exists.
    fn margin_lp(wrenches: &[[f64; 6]]) -> f64 {
        let k = wrenches.len();
        let n = k + 1; // mu_1..mu_k, eps
        let m = 7;
        let big_m = 1e6;
        // Tableau: m rows x (n + m + 1) with artificial identity and rhs.
        let mut t = vec![vec![0.0f64; n + m + 1]; m];
        for (c, w) in wrenches.iter().enumerate() {
            for r in 0..6 {
                t[r][c] = w[r];
            }
            t[6][c] = 1.0;
        }
        for r in 0..6 {
            t[r][k] = wrenches.iter().map(|w| w[r]).sum();
        }
        t[6][k] = k as f64;
        for r in 0..m {
            t[r][n + r] = 1.0;
        }
        t[6][n + m] = 1.0;
        // Costs: maximize eps - M * artificials.
        let mut cost = vec![0.0f64; n + m];
        cost[k] = 1.0;
        for c in cost.iter_mut().skip(n) {
            *c = -big_m;
        }
        let mut basis: Vec<usize> = (n..n + m).collect();

        for _ in 0..50_000 {
            // Dantzig: most positive reduced cost.
            let mut entering = None;
            let mut best = 1e-9;
            for j in 0..n + m {
                if basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j];
                for r in 0..m {
                    reduced -= cost[basis[r]] * t[r][j];
                }
                if reduced > best {
                    best = reduced;
                    entering = Some(j);
                }
            }
            let Some(col) = entering else { break };
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..m {
                if t[r][col] > 1e-11 {
                    let ratio = t[r][n + m] / t[r][col];
                    if leaving.map(|(_, lr)| ratio < lr).unwrap_or(true) {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else { break };
            let pivot = t[row][col];
            for v in t[row].iter_mut() {
                *v /= pivot;
            }
            for r in 0..m {
                if r != row {
                    let f = t[r][col];
                    if f != 0.0 {
                        for c in 0..n + m + 1 {
                            t[r][c] -= f * t[row][c];
                        }
                    }
                }
            }
            basis[row] = col;
        }

        let residual: f64 = basis
            .iter()
            .enumerate()
            .filter(|(_, &j)| j >= n)
            .map(|(r, _)| t[r][n + m])
            .sum();
        if residual > 1e-9 {
            return -residual;
        }
        basis
            .iter()
            .enumerate()
            .find(|(_, &j)| j == k)
            .map(|(r, _)| t[r][n + m])
            .unwrap_or(0.0)
    }
}
