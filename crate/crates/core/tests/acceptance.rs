use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use dirac_ops::algebra::{beta, fw_unitary, hamiltonian, projectors, spin, Kinematics, Mat4, PolarizationSpinor};
use dirac_ops::beams::{
    all_summaries, analyze, boosted_centroid, build_spectrum, default_times, hall_shift_prediction, magnetic_moment_z,
    plane_wave_spin, plane_wave_spin_closed, synthesize_components, unpolarized, zitterbewegung_trace, BeamParams,
    Centroid, OperatorFamily, PacketConfig, RadialProfile,
};
use dirac_ops::numeric::max_abs;
use dirac_ops::operators::{
    curvature_of, projected_position, projected_spin, sample_kinematics, table1_suite, OperatorReport, Representation,
    Table1Config, Table1Report,
};
use dirac_ops::pauli_limit::{pauli_correspondence, r_squared_identity, MomentumPacket};
use nalgebra::{Vector2, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rows<'a>(report: &'a Table1Report, prefix: &str) -> Vec<&'a OperatorReport> {
    let found: Vec<_> = report.reports().filter(|r| r.identity.starts_with(prefix)).collect();
    assert!(!found.is_empty(), "no suite row starts with {prefix:?}");
    found
}

fn worst(rows: &[&OperatorReport]) -> f64 {
    rows.iter().fold(0.0f64, |m, r| m.max(r.max_deviation))
}

fn all_pass(rows: &[&OperatorReport]) -> bool {
    rows.iter().all(|r| r.pass && r.skipped.is_none())
}

fn relative(value: f64, expected: f64) -> f64 {
    (value - expected).abs() / expected.abs()
}

fn fw_and_projectors() -> Outcome {
    let start = Instant::now();
    let samples = sample_kinematics(11, 100, &[0.0, 0.1, 1.0, 10.0]).unwrap();
    let one = Mat4::identity();
    let (mut diag, mut proj) = (0.0f64, 0.0f64);
    for k in &samples {
        let u = fw_unitary(k);
        let h = hamiltonian(k.momentum(), k.mass());
        let d = u * h * u.adjoint() - beta() * Complex64::from(k.energy());
        diag = diag.max(max_abs(&d));
        let (plus, minus) = projectors(k);
        for m in [plus * plus - plus, minus * minus - minus, plus * minus, plus + minus - one] {
            proj = proj.max(max_abs(&m));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        diag < 1e-12 && proj < 1e-12 && secs < 1.0,
        format!("‖UHU† − βE‖ = {diag:.2e}, projector algebra {proj:.2e}, {secs:.3} s"),
    )
}

fn table1_equivalence(report: &Table1Report, secs: f64) -> Outcome {
    let closed: Vec<&OperatorReport> = report.closed_forms.iter().map(|r| &r.report).collect();
    let samples = closed.iter().map(|r| r.samples).min().unwrap_or(0);
    outcome(
        closed.len() == 8 && all_pass(&closed) && samples >= 50 && secs < 10.0,
        format!("8 closed forms, worst {:.2e} over ≥ {samples} samples, suite {secs:.2} s", worst(&closed)),
    )
}

fn conservation_split(report: &Table1Report) -> Outcome {
    let conserved: Vec<_> = rows(report, "[H, 𝓢] = [H, 𝓛] = 0")
        .into_iter()
        .chain(rows(report, "[H, S~] = [H, L~] = 0"))
        .collect();
    let canonical = rows(report, "max_i ‖[H, S_i]‖");
    outcome(
        all_pass(&conserved) && canonical[0].max_deviation > 0.1,
        format!("conserved {:.2e}, max ‖[H, S_i]‖ = {:.3}", worst(&conserved), canonical[0].max_deviation),
    )
}

fn commutator_structure(report: &Table1Report) -> Outcome {
    let algebra: Vec<_> = ["[𝓢_i, 𝓢_j]", "[𝓛_i, 𝓛_j]", "[r~_i, r~_j]", "[S~_i, S~_j]", "[L~_i, L~_j]", "[𝓡_i, 𝓡_j]"]
        .into_iter()
        .flat_map(|p| rows(report, p))
        .collect();
    let noted = rows(report, "[𝓡_i, 𝓡_j]")[0].note.is_some();

    // the curvature on the electron subspace, against both printed forms
    let pos = projected_position(Representation::Standard);
    let ps = projected_spin(Representation::Standard);
    let (mut full, mut sub_s, mut sub_proj) = (0.0f64, 0.0f64, 0.0f64);
    for k in sample_kinematics(5, 10, &[0.1, 1.0, 10.0]).unwrap() {
        let f = curvature_of(&pos, &k).unwrap();
        let e2 = Complex64::from(k.energy() * k.energy());
        let (plus, _) = projectors(&k);
        for i in 0..3 {
            let sp = ps[i].evaluate(&k).unwrap();
            full = full.max(max_abs(&(f[i] + sp / e2)));
            sub_s = sub_s.max(max_abs(&(plus * (f[i] + spin(i) / e2) * plus)));
            sub_proj = sub_proj.max(max_abs(&(plus * (f[i] + sp / e2) * plus)));
        }
    }
    outcome(
        all_pass(&algebra) && noted && full < 1e-6 && sub_s < 1e-6 && sub_proj < 1e-6,
        format!(
            "algebra {:.2e}; F vs −𝓢/E² {full:.2e}; electron subspace vs −S/E² {sub_s:.2e}, vs −𝓢/E² {sub_proj:.2e}",
            worst(&algebra)
        ),
    )
}

fn spin_orbit_conversion() -> Outcome {
    let params = BeamParams::new(2.0, 1.0, PI / 6.0, 1, PolarizationSpinor::up());
    let rows = all_summaries(&build_spectrum(&params).unwrap()).unwrap();
    let delta = (1.0 - 1.0 / 2.0) * (PI / 6.0).sin().powi(2);
    let (sz, lz) = (0.5 * (1.0 - delta), 1.0 + 0.5 * delta);
    let get = |f: OperatorFamily| rows.iter().find(|r| r.family == f).unwrap();
    let (p, n) = (get(OperatorFamily::Projected), get(OperatorFamily::Nwfw));
    let dev = (p.sz - sz).abs().max((p.lz - lz).abs());
    let ndev = (n.sz - 0.5).abs().max((n.lz - 1.0).abs());
    let jdev = (p.sz + p.lz - 1.5).abs().max((n.sz + n.lz - 1.5).abs());
    outcome(
        dev < 1e-9 && ndev < 1e-9 && jdev < 1e-10,
        format!(
            "projected ({:.12}, {:.12}), NWFW ({:.12}, {:.12}), J_z deviation {jdev:.1e}",
            p.sz, p.lz, n.sz, n.lz
        ),
    )
}

fn plane_wave_spin_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut dev = 0.0f64;
    for _ in 0..100 {
        let p = Vector3::from_fn(|_, _| rng.random_range(-3.0..3.0));
        let m = rng.random_range(0.0..3.0);
        let w = PolarizationSpinor::normalized(
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        )
        .unwrap();
        let k = Kinematics::new(p, m).unwrap();
        dev = dev.max((plane_wave_spin(&k, &w) - plane_wave_spin_closed(&k, &w)).amax());
    }
    let k = Kinematics::new(Vector3::new(1.0, 0.0, 0.0), 1.0).unwrap();
    let sz = plane_wave_spin(&k, &PolarizationSpinor::up())[2];
    let bench = (sz - 1.0 / (2.0 * 2f64.sqrt())).abs();
    outcome(dev < 1e-12 && bench < 1e-12, format!("closed form vs contraction {dev:.2e}, ⟨S_z⟩ = {sz:.15}"))
}

fn annulus(theta0: f64, n_phi: usize, n_radial: usize) -> BeamParams {
    BeamParams::new(2.0, 1.0, theta0, 1, PolarizationSpinor::up())
        .with_profile(RadialProfile::GaussianAnnulus { width: None })
        .with_grid(n_phi, n_radial)
}

fn magnetic_moment() -> Outcome {
    let start = Instant::now();
    let spectrum = build_spectrum(&annulus(0.05, 512, 512)).unwrap();
    let polarized = 2.0 * magnetic_moment_z(&spectrum).unwrap();
    let unpol = 2.0 * unpolarized(&spectrum, magnetic_moment_z).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (e1, e2) = (relative(polarized, 2.0), relative(unpol, 1.0));
    outcome(
        e1 < 0.01 && e2 < 0.01 && secs < 30.0,
        format!("E·μ = {polarized:.6} (ℓ + 2s_z = 2), unpolarized {unpol:.6} (ℓ = 1), {secs:.2} s"),
    )
}

fn hall_shift() -> Outcome {
    let spectrum = build_spectrum(&annulus(0.1, 256, 64)).unwrap();
    let v = Vector2::new(0.1, 0.0);
    let predicted = hall_shift_prediction(&spectrum, &v);
    let prob = boosted_centroid(&spectrum, &v, Centroid::Probability).unwrap();
    let energy = boosted_centroid(&spectrum, &v, Centroid::Energy).unwrap();
    let ep = (prob - predicted).norm() / predicted.norm();
    let ee = (energy - predicted * 2.0).norm() / (predicted * 2.0).norm();
    outcome(
        ep < 0.02 && ee < 0.02,
        format!(
            "y-shift: probability {:.5} vs {:.5} (rel. {ep:.3}), energy {:.5} vs {:.5} (rel. {ee:.4})",
            prob[1],
            predicted[1],
            energy[1],
            2.0 * predicted[1]
        ),
    )
}

fn vortex_windings() -> Outcome {
    let mut ok = true;
    let mut seen = Vec::new();
    for ell in [0, 1, 3] {
        for (w, sz) in [(PolarizationSpinor::up(), 1), (PolarizationSpinor::down(), -1)] {
            let params = BeamParams::new(2.0, 1.0, 0.5, ell, w).with_grid(128, 8);
            let c = synthesize_components(&build_spectrum(&params).unwrap(), &[], 1).unwrap();
            let mut found: Vec<i32> = c.windings.iter().flatten().copied().collect();
            found.sort();
            let mut expected = vec![ell, ell, ell + sz];
            expected.sort();
            ok &= found == expected;
            seen.push(format!("ℓ={ell},{}:{found:?}", if sz > 0 { "↑" } else { "↓" }));
        }
    }
    outcome(ok, seen.join(" "))
}

fn pauli_limit() -> Outcome {
    let dir = Vector3::new(1.0, -2.0, 2.0) / 3.0;
    let kin = Kinematics::new(dir * 0.2, 1.0).unwrap();
    let r2 = r_squared_identity(&kin).unwrap();
    let packet = MomentumPacket::new(1.0, dir * 0.1, 0.008, PolarizationSpinor::up());
    let corr = pauli_correspondence(&packet).unwrap();

    let zk = Kinematics::new(Vector3::new(0.0, 0.0, 1.0), 1.0).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mix = [Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
    let trace = zitterbewegung_trace(&zk, mix, &default_times(&zk, 8.0, 256), &PacketConfig::default()).unwrap();
    let an = analyze(&trace);
    let freq = an.frequency.unwrap_or(0.0);
    let fe = relative(freq, 2.0 * zk.energy());
    outcome(
        r2.observed_order >= 1.8 && corr.observed_order >= 3.0 && fe < 0.02 && an.projected_nonlinearity < 1e-6,
        format!(
            "𝓡² order {:.3}, correspondence order {:.3}, ω = {freq:.4} vs 2E = {:.4}, 𝓡-trace nonlinearity {:.1e}",
            r2.observed_order,
            corr.observed_order,
            2.0 * zk.energy(),
            an.projected_nonlinearity
        ),
    )
}

fn massless_continuity(report: &Table1Report) -> Outcome {
    let r = rows(report, "massless continuity");
    outcome(all_pass(&r), format!("max difference {:.2e} over {} momenta", worst(&r), r[0].samples))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let suite = table1_suite(&Table1Config::default()).unwrap();
    let suite_secs = start.elapsed().as_secs_f64();

    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let checks: Vec<(&str, Check)> = vec![
        ("FW diagonalization and projector algebra", Box::new(fw_and_projectors)),
        ("Table 1 closed forms", Box::new(|| table1_equivalence(&suite, suite_secs))),
        ("conservation split", Box::new(|| conservation_split(&suite))),
        ("commutator structure and curvature", Box::new(|| commutator_structure(&suite))),
        ("spin-orbit conversion in a Bessel beam", Box::new(spin_orbit_conversion)),
        ("plane-wave spin", Box::new(plane_wave_spin_check)),
        ("magnetic moment", Box::new(magnetic_moment)),
        ("relativistic Hall shift", Box::new(hall_shift)),
        ("vortex component windings", Box::new(vortex_windings)),
        ("Pauli limit and zitterbewegung", Box::new(pauli_limit)),
        ("massless continuity", Box::new(|| massless_continuity(&suite))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let o = check();
        println!("criterion {:>2} {}: {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria pass", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
