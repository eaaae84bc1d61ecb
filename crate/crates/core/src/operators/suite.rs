//! The Table-1 identity suite: closed forms against their constructive
//! definitions, plus time evolution, commutator and sum-rule properties.

use std::fmt::Write as _;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Serialize;

use super::calculus::{commutator, fw_conjugate, heisenberg_velocity, project_operator, Direction};
use super::families::*;
use super::geometry::{berry_curvature, berry_curvature_from_commutator, curvature_of, pauli_lubanski, pryce_value};
use super::operator::{MomentumOperator, Operator, OperatorValue, Representation};
use super::report::{check_identity, sample_kinematics, Bound, OperatorReport};
use crate::algebra::{dirac, plane_wave_bispinor, projectors, Kinematics, Mat4, PolarizationSpinor};
use crate::error::Result;
use crate::numeric::{max_abs, RELATIVE_STEP};

pub const CLOSED_FORM_TOLERANCE: f64 = 1e-8;
pub const COMMUTATOR_TOLERANCE: f64 = 1e-6;
pub const EXACT_TOLERANCE: f64 = 1e-12;
pub const CONTINUITY_TOLERANCE: f64 = 1e-4;
pub const NWFW_SKIP_REASON: &str = "rest-frame construction";

const MASSES: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Config {
    pub seed: u64,
    pub samples: usize,
    /// Fix every sample to this mass instead of cycling through {0, 0.1, 1, 10}.
    pub mass: Option<f64>,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            samples: 50,
            mass: None,
        }
    }
}

/// Which Table-1 cell a closed-form row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Projected,
    Nwfw,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormRow {
    pub family: Family,
    pub representation: Representation,
    pub operator: &'static str,
    pub report: OperatorReport,
}

/// All rows of the suite.
#[derive(Debug, Clone, Serialize)]
pub struct Table1Report {
    pub seed: u64,
    pub closed_forms: Vec<ClosedFormRow>,
    pub properties: Vec<OperatorReport>,
}

impl Table1Report {
    pub fn all_pass(&self) -> bool {
        self.reports().all(|r| r.pass)
    }

    pub fn reports(&self) -> impl Iterator<Item = &OperatorReport> {
        self.closed_forms.iter().map(|r| &r.report).chain(&self.properties)
    }

    /// Plain-text table: representations as rows, families as columns,
    /// followed by the property checks.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let cell = |fam: Family, rep: Representation| -> String {
            self.closed_forms
                .iter()
                .filter(|r| r.family == fam && r.representation == rep)
                .map(|r| format!("{:<5} {}", r.operator, status(&r.report)))
                .collect::<Vec<_>>()
                .join("   ")
        };
        let _ = writeln!(out, "{:<10} | {:<52} | NWFW", "", "projected");
        let _ = writeln!(out, "{}", "-".repeat(122));
        for rep in [Representation::Standard, Representation::Fw] {
            let _ = writeln!(
                out,
                "{:<10} | {:<52} | {}",
                rep.to_string(),
                cell(Family::Projected, rep),
                cell(Family::Nwfw, rep)
            );
        }
        let _ = writeln!(out);
        for r in &self.properties {
            let _ = writeln!(out, "{:<70} {}", r.identity, status(r));
        }
        out
    }
}

fn status(r: &OperatorReport) -> String {
    if let Some(reason) = &r.skipped {
        return format!("SKIP ({reason})");
    }
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    let cmp = match r.bound {
        Bound::Upper => "<",
        Bound::Lower => ">",
    };
    format!("{verdict} {:.2e} {cmp} {:.0e}", r.max_deviation, r.tolerance)
}

fn general<O: Operator>(ops: &[O; 3]) -> [MomentumOperator; 3] {
    std::array::from_fn(|i| ops[i].to_general())
}

fn triple_deviation(a: &[MomentumOperator; 3], b: &[MomentumOperator; 3], k: &Kinematics) -> Result<f64> {
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        worst = worst.max(x.evaluate(k)?.deviation(&y.evaluate(k)?));
    }
    Ok(worst)
}

fn project_triple<O: Operator>(ops: &[O; 3]) -> Result<[O; 3]> {
    let v: Vec<O> = ops.iter().map(project_operator).collect::<Result<_>>()?;
    Ok(v.try_into().unwrap_or_else(|_| unreachable!()))
}

fn conjugate_triple<O: Operator>(ops: &[O; 3], d: Direction) -> Result<[O; 3]> {
    let v: Vec<O> = ops.iter().map(|o| fw_conjugate(o, d)).collect::<Result<_>>()?;
    Ok(v.try_into().unwrap_or_else(|_| unreachable!()))
}

/// max_ij ‖[X_i, X_j] − iε_ijk Y_k‖ where `rhs(k)` supplies Y_k.
fn commutator_algebra<F>(x: &[MomentumOperator; 3], kin: &Kinematics, rhs: F) -> Result<f64>
where
    F: Fn(usize) -> Result<OperatorValue>,
{
    let mut worst = 0.0f64;
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let c = commutator(&x[i], &x[j], kin, RELATIVE_STEP)?;
        worst = worst.max(c.deviation(&rhs(k)?.scale(Complex64::i())));
    }
    Ok(worst)
}

fn velocity_deviation(ops: &[MomentumOperator; 3], kin: &Kinematics, target: impl Fn(usize) -> Mat4) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, op) in ops.iter().enumerate() {
        worst = worst.max(max_abs(&(heisenberg_velocity(op, kin)? - target(i))));
    }
    Ok(worst)
}

/// p_i H⁻¹ in the given representation.
fn group_velocity(rep: Representation, kin: &Kinematics, i: usize) -> Mat4 {
    let e2 = kin.energy() * kin.energy();
    let hinv = match rep {
        Representation::Standard => dirac::hamiltonian(kin.momentum(), kin.mass()) / Complex64::from(e2),
        Representation::Fw => dirac::beta() / Complex64::from(kin.energy()),
    };
    hinv * Complex64::from(kin.momentum()[i])
}

struct Samples {
    projected: Vec<Kinematics>,
    massive: Vec<Kinematics>,
}

fn closed_form_rows(s: &Samples) -> Result<Vec<ClosedFormRow>> {
    use Representation::{Fw, Standard};
    let r = canonical_position();
    let spin = canonical_spin_in(Standard);
    let r_fw = canonical_position_in(Fw);
    let spin_fw = canonical_spin_in(Fw);

    let proj_r = project_triple(&r)?;
    let proj_s = project_triple(&spin)?;
    let proj_r_fw = conjugate_triple(&proj_r, Direction::ToFw)?;
    let proj_s_fw = conjugate_triple(&proj_s, Direction::ToFw)?;
    let nwfw_r = conjugate_triple(&r_fw, Direction::FromFw)?;
    let nwfw_s = conjugate_triple(&spin_fw, Direction::FromFw)?;
    let nwfw_r_fw = conjugate_triple(&nwfw_position(Standard), Direction::ToFw)?;
    let nwfw_s_fw = conjugate_triple(&nwfw_spin(Standard), Direction::ToFw)?;

    type Entry = (Family, Representation, &'static str, &'static str, [MomentumOperator; 3], [MomentumOperator; 3]);
    let entries: Vec<Entry> = vec![
        (Family::Projected, Standard, "𝓡", "𝓡 = Π⁺rΠ⁺ + Π⁻rΠ⁻", general(&proj_r), projected_position(Standard)),
        (Family::Projected, Standard, "𝓢", "𝓢 = Π⁺SΠ⁺ + Π⁻SΠ⁻", general(&proj_s), general(&projected_spin(Standard))),
        (Family::Projected, Fw, "𝓡_FW", "𝓡_FW = U𝓡U†", general(&proj_r_fw), projected_position(Fw)),
        (Family::Projected, Fw, "𝓢_FW", "𝓢_FW = U𝓢U†", general(&proj_s_fw), general(&projected_spin(Fw))),
        (Family::Nwfw, Standard, "r~", "r~ = U† r U", general(&nwfw_r), nwfw_position(Standard)),
        (Family::Nwfw, Standard, "S~", "S~ = U† S U", general(&nwfw_s), general(&nwfw_spin(Standard))),
        (Family::Nwfw, Fw, "r~_FW", "r~_FW = U r~ U† = r", general(&nwfw_r_fw), r_fw.clone()),
        (Family::Nwfw, Fw, "S~_FW", "S~_FW = U S~ U† = S", general(&nwfw_s_fw), general(&spin_fw)),
    ];
    Ok(entries
        .into_iter()
        .map(|(family, representation, operator, identity, built, closed)| {
            let set = match family {
                Family::Projected => &s.projected,
                Family::Nwfw => &s.massive,
            };
            let report = if set.is_empty() {
                OperatorReport::skipped(identity, CLOSED_FORM_TOLERANCE, NWFW_SKIP_REASON)
            } else {
                check_identity(identity, CLOSED_FORM_TOLERANCE, set, |k| triple_deviation(&built, &closed, k))
            };
            ClosedFormRow {
                family,
                representation,
                operator,
                report,
            }
        })
        .collect())
}

fn skip_or<F>(identity: &str, tol: f64, set: &[Kinematics], f: F) -> OperatorReport
where
    F: Fn(&Kinematics) -> Result<f64> + Sync,
{
    if set.is_empty() {
        OperatorReport::skipped(identity, tol, NWFW_SKIP_REASON)
    } else {
        check_identity(identity, tol, set, f)
    }
}

fn property_rows(s: &Samples) -> Result<Vec<OperatorReport>> {
    use Representation::{Fw, Standard};
    let mut rows = Vec::new();
    let all = &s.projected;
    let massive = &s.massive;

    // Hermiticity of every observable closed form.
    let observables: Vec<MomentumOperator> = [Standard, Fw]
        .into_iter()
        .flat_map(|rep| {
            let mut v: Vec<MomentumOperator> = Vec::new();
            v.extend(projected_position(rep));
            v.extend(general(&projected_spin(rep)));
            v.extend(projected_oam(rep));
            v.extend(nwfw_position(rep));
            v.extend(general(&nwfw_spin(rep)));
            v.extend(nwfw_oam(rep));
            v
        })
        .collect();
    rows.push(check_identity("Hermiticity of 𝓡, 𝓢, 𝓛, r~, S~, L~ (both representations)", 1e-9, massive_or(all, massive), |k| {
        observables.iter().try_fold(0.0f64, |w, op| Ok(w.max(op.hermiticity_defect(k)?)))
    }));

    // Time evolution.
    let r = canonical_position();
    rows.push(check_identity("i[H, r] = α", EXACT_TOLERANCE, all, |k| {
        velocity_deviation(&r, k, dirac::alpha)
    }));
    for rep in [Standard, Fw] {
        let pr = projected_position(rep);
        rows.push(check_identity(&format!("i[H, 𝓡] = pH⁻¹ ({rep})"), 1e-10, all, |k| {
            velocity_deviation(&pr, k, |i| group_velocity(rep, k, i))
        }));
        let nr = nwfw_position(rep);
        rows.push(skip_or(&format!("i[H, r~] = pH⁻¹ ({rep})"), 1e-10, massive, |k| {
            velocity_deviation(&nr, k, |i| group_velocity(rep, k, i))
        }));
        let conserved_projected: Vec<MomentumOperator> =
            general(&projected_spin(rep)).into_iter().chain(projected_oam(rep)).collect();
        rows.push(check_identity(&format!("[H, 𝓢] = [H, 𝓛] = 0 ({rep})"), CLOSED_FORM_TOLERANCE, all, |k| {
            conserved_projected
                .iter()
                .try_fold(0.0f64, |w, op| Ok(w.max(max_abs(&heisenberg_velocity(op, k)?))))
        }));
        let conserved_nwfw: Vec<MomentumOperator> =
            general(&nwfw_spin(rep)).into_iter().chain(nwfw_oam(rep)).collect();
        rows.push(skip_or(&format!("[H, S~] = [H, L~] = 0 ({rep})"), CLOSED_FORM_TOLERANCE, massive, |k| {
            conserved_nwfw
                .iter()
                .try_fold(0.0f64, |w, op| Ok(w.max(max_abs(&heisenberg_velocity(op, k)?))))
        }));
    }
    let spin = canonical_spin_in(Standard);
    let generic = [Kinematics::new(Vector3::new(1.0, 0.0, 0.0), 1.0)?];
    let noncons = check_identity("max_i ‖[H, S_i]‖ (canonical spin not conserved)", 0.1, &generic, |k| {
        spin.iter().try_fold(0.0f64, |w, op| Ok(w.max(max_abs(&heisenberg_velocity(op, k)?))))
    });
    rows.push(OperatorReport {
        pass: noncons.max_deviation > noncons.tolerance,
        bound: Bound::Lower,
        ..noncons
    });

    // Expectation values on electron plane waves.
    let spin_std = projected_spin(Standard);
    let nwfw_std = nwfw_spin(Standard);
    rows.push(check_identity("W†𝓢W = W†SW on electron plane waves", 1e-12, all, |k| {
        let w = plane_wave_bispinor(k, &PolarizationSpinor::up()).components;
        spin_std.iter().enumerate().try_fold(0.0f64, |acc, (i, op)| {
            let a = w.dotc(&(op.evaluate(k)? * w));
            let b = w.dotc(&(dirac::spin(i) * w));
            Ok(acc.max((a - b).norm()))
        })
    }));
    let diff = skip_or("max |W†S~W − W†SW| (NWFW spin differs)", 0.1, massive, |k| {
        let w = plane_wave_bispinor(k, &PolarizationSpinor::up()).components;
        nwfw_std.iter().enumerate().try_fold(0.0f64, |acc, (i, op)| {
            let a = w.dotc(&(op.evaluate(k)? * w));
            let b = w.dotc(&(dirac::spin(i) * w));
            Ok(acc.max((a - b).norm()))
        })
    });
    rows.push(if diff.skipped.is_some() {
        diff
    } else {
        OperatorReport {
            pass: diff.max_deviation > diff.tolerance,
            bound: Bound::Lower,
            ..diff
        }
    });

    // Commutator algebra.
    for rep in [Standard, Fw] {
        let ps = general(&projected_spin(rep));
        rows.push(check_identity(&format!("[𝓢_i, 𝓢_j] = iε(𝓢_k − (p·𝓢)p_k/E²) ({rep})"), COMMUTATOR_TOLERANCE, all, |k| {
            let s = evaluate_triple(&ps, k)?;
            commutator_algebra(&ps, k, |c| Ok(s[c] - longitudinal(&s, k, c)))
        }));
        let pl = projected_oam(rep);
        rows.push(check_identity(&format!("[𝓛_i, 𝓛_j] = iε(𝓛_k − (p·𝓢)p_k/E²) ({rep})"), COMMUTATOR_TOLERANCE, all, |k| {
            let s = evaluate_triple(&ps, k)?;
            let l = evaluate_triple(&pl, k)?;
            commutator_algebra(&pl, k, |c| Ok(l[c] - longitudinal(&s, k, c)))
        }));
        let nr = nwfw_position(rep);
        rows.push(skip_or(&format!("[r~_i, r~_j] = 0 ({rep})"), COMMUTATOR_TOLERANCE, massive, |k| {
            commutator_algebra(&nr, k, |_| Ok(OperatorValue::multiplicative(Mat4::zeros())))
        }));
        let ns = general(&nwfw_spin(rep));
        rows.push(skip_or(&format!("[S~_i, S~_j] = iεS~_k ({rep})"), COMMUTATOR_TOLERANCE, massive, |k| {
            let s = evaluate_triple(&ns, k)?;
            commutator_algebra(&ns, k, |c| Ok(s[c]))
        }));
        let nl = nwfw_oam(rep);
        rows.push(skip_or(&format!("[L~_i, L~_j] = iεL~_k ({rep})"), COMMUTATOR_TOLERANCE, massive, |k| {
            let l = evaluate_triple(&nl, k)?;
            commutator_algebra(&nl, k, |c| Ok(l[c]))
        }));
    }
    rows.push(curvature_row(all)?);
    rows.push(check_identity("Berry curvature: ε∂A − (i/2)ε[A, A] = −(i/2)ε[𝓡, 𝓡] (FW)", COMMUTATOR_TOLERANCE, all, |k| {
        let a = berry_curvature(k);
        let b = berry_curvature_from_commutator(k)?;
        Ok((0..3).fold(0.0f64, |w, i| w.max(max_abs(&(a[i] - b[i])))))
    }));

    // Sum rules.
    for rep in [Standard, Fw] {
        let j = canonical_spin_oam_total_in(rep).total;
        let lp = projected_oam(rep);
        let sp = general(&projected_spin(rep));
        rows.push(check_identity(&format!("𝓛 + 𝓢 = J ({rep})"), EXACT_TOLERANCE, all, |k| {
            sum_rule(&lp, &sp, &j, k)
        }));
        let ln = nwfw_oam(rep);
        let sn = general(&nwfw_spin(rep));
        rows.push(skip_or(&format!("L~ + S~ = J ({rep})"), EXACT_TOLERANCE, massive, |k| {
            sum_rule(&ln, &sn, &j, k)
        }));
    }

    // Pauli-Lubanski and Pryce.
    rows.push(check_identity("𝓢 = 𝓦H⁻¹", EXACT_TOLERANCE, all, |k| {
        let pl = pauli_lubanski(k);
        let h = dirac::hamiltonian(k.momentum(), k.mass());
        let hinv = h / Complex64::from(k.energy() * k.energy());
        spin_std.iter().enumerate().try_fold(0.0f64, |w, (i, op)| -> Result<f64> {
            Ok(w.max(max_abs(&(op.evaluate(k)? - pl.w[i] * hinv))))
        })
    }));
    rows.push(check_identity("W†(W⁰² − 𝓦·𝓦)W = −(3/4)m² (relative to E²)", 1e-10, all, |k| {
        let w = plane_wave_bispinor(k, &PolarizationSpinor::up()).components;
        let inv = w.dotc(&(pauli_lubanski(k).invariant() * w));
        let m2 = k.mass() * k.mass();
        Ok((inv + Complex64::from(0.75 * m2)).norm() / (k.energy() * k.energy()).max(1.0))
    }));
    let closed_r = projected_position(Standard);
    rows.push(check_identity("Pryce q = ½(H⁻¹N + NH⁻¹) = 𝓡", CLOSED_FORM_TOLERANCE, all, |k| {
        (0..3).try_fold(0.0f64, |w, i| Ok(w.max(pryce_value(k, i)?.deviation(&closed_r[i].evaluate(k)?))))
    }));

    rows.push(massless_continuity(all)?);
    Ok(rows)
}

fn massive_or<'a>(all: &'a [Kinematics], massive: &'a [Kinematics]) -> &'a [Kinematics] {
    if massive.is_empty() {
        all
    } else {
        massive
    }
}

fn evaluate_triple(ops: &[MomentumOperator; 3], k: &Kinematics) -> Result<[OperatorValue; 3]> {
    Ok([ops[0].evaluate(k)?, ops[1].evaluate(k)?, ops[2].evaluate(k)?])
}

/// (p·S) p_c / E² for an evaluated spin triple.
fn longitudinal(s: &[OperatorValue; 3], k: &Kinematics, c: usize) -> OperatorValue {
    let p = k.momentum();
    let ps = s[0].scale(p[0].into()) + s[1].scale(p[1].into()) + s[2].scale(p[2].into());
    ps.scale(Complex64::from(p[c] / (k.energy() * k.energy())))
}

fn sum_rule(l: &[MomentumOperator; 3], s: &[MomentumOperator; 3], j: &[MomentumOperator; 3], k: &Kinematics) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..3 {
        let lhs = l[i].evaluate(k)? + s[i].evaluate(k)?;
        worst = worst.max(lhs.deviation(&j[i].evaluate(k)?));
    }
    Ok(worst)
}

/// Curvature from the numeric commutator [R_i, R_j] (standard
/// representation), compared on the full matrix with −S/E² (projected spin)
/// and on the electron subspace with both −S/E² candidates.
fn curvature_row(samples: &[Kinematics]) -> Result<OperatorReport> {
    let pos = projected_position(Representation::Standard);
    let ps = projected_spin(Representation::Standard);
    let devs: Vec<Result<[f64; 4]>> = samples
        .iter()
        .map(|k| {
            let f = curvature_of(&pos, k)?;
            let e2 = Complex64::from(k.energy() * k.energy());
            let (plus, _) = projectors(k);
            let mut d = [0.0f64; 4];
            for i in 0..3 {
                let s = dirac::spin(i);
                let sp = ps[i].evaluate(k)?;
                d[0] = d[0].max(max_abs(&(f[i] + sp / e2)));
                d[1] = d[1].max(max_abs(&(f[i] + s / e2)));
                d[2] = d[2].max(max_abs(&(plus * (f[i] + s / e2) * plus)));
                d[3] = d[3].max(max_abs(&(plus * (f[i] + sp / e2) * plus)));
            }
            Ok(d)
        })
        .collect();
    let mut worst = [0.0f64; 4];
    for d in devs {
        let d = d?;
        for (w, x) in worst.iter_mut().zip(d) {
            *w = w.max(x);
        }
    }
    let note = format!(
        "full matrix: vs −𝓢/E² {:.2e}, vs −S/E² {:.2e}; electron subspace: vs −S/E² {:.2e}, vs −𝓢/E² {:.2e}",
        worst[0], worst[1], worst[2], worst[3]
    );
    Ok(OperatorReport::new(
        "[𝓡_i, 𝓡_j] = iε_ijk F_k, F = −𝓢/E²",
        COMMUTATOR_TOLERANCE,
        worst[0],
        samples.len(),
    )
    .with_note(note))
}

/// Matrix parts at m = 1e-6 against m = 0 for the projected family.
fn massless_continuity(samples: &[Kinematics]) -> Result<OperatorReport> {
    let ops: Vec<MomentumOperator> = [Representation::Standard, Representation::Fw]
        .into_iter()
        .flat_map(|rep| {
            projected_position(rep)
                .into_iter()
                .chain(general(&projected_spin(rep)))
                .chain(projected_oam(rep))
                .collect::<Vec<_>>()
        })
        .collect();
    // the difference scales as m/(2|p|²); fixed momenta are taken with |p| ≥ 0.1
    let fixed: Vec<Kinematics> = samples
        .iter()
        .filter(|k| k.momentum().norm() >= 0.1)
        .map(|k| Kinematics::new(*k.momentum(), 0.0))
        .collect::<Result<_>>()?;
    Ok(check_identity(
        "massless continuity: matrix parts at m = 1e-6 vs m = 0",
        CONTINUITY_TOLERANCE,
        &fixed,
        |k| {
            let small = Kinematics::new(*k.momentum(), 1e-6)?;
            ops.iter().try_fold(0.0f64, |w, op| {
                Ok(w.max(max_abs(&(op.matrix_part().evaluate(&small)? - op.matrix_part().evaluate(k)?))))
            })
        },
    ))
}

/// Runs the whole suite.
pub fn table1_suite(config: &Table1Config) -> Result<Table1Report> {
    let masses: Vec<f64> = match config.mass {
        Some(m) => vec![m],
        None => std::iter::once(0.0).chain(MASSES).collect(),
    };
    let projected = sample_kinematics(config.seed, config.samples, &masses)?;
    let massive = match config.mass {
        Some(m) if m > 0.0 => projected.clone(),
        Some(_) => Vec::new(),
        None => sample_kinematics(config.seed, config.samples, &MASSES)?,
    };
    let s = Samples { projected, massive };
    Ok(Table1Report {
        seed: config.seed,
        closed_forms: closed_form_rows(&s)?,
        properties: property_rows(&s)?,
    })
}
