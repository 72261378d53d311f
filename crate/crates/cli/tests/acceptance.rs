//! Acceptance suite: eight end-to-end checks of the bundled figure
//! configurations against analytic targets, frozen identities, and the
//! independent time-evolution oracle, each at its stated tolerance.
//!
//! Every check prints one `criterion N (label): PASS/FAIL` line (visible
//! with `--nocapture`, or in the captured output of a failing test) so a
//! run reads as a checklist. Failing checks print the measured numbers.

use std::path::PathBuf;
use std::time::Instant;

use blockade_cli::config::{parse_config, SweepSpec};
use blockade_cli::spectrum::manifold_spectrum;
use blockade_cli::sweep::{
    find_blockade_windows, run_sweep, solve_operating_point, solve_point, SweepResult, SweepRow,
};
use blockade_core::hilbert::{annihilation, CompositeSpace, ModeSpace};
use blockade_core::linalg::eigvalsh;
use blockade_core::liouvillian::{propagate, steady_state, DensityMatrix, SteadyState};
use blockade_core::models::{coupled_kerr, kerr, ModelSpec};
use blockade_core::observables::{classify_blockade, expectation, fock_tail, g_n};
use blockade_core::C64;
use ndarray::Array1;

fn config_text(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn config(name: &str) -> SweepSpec {
    parse_config(&config_text(name)).unwrap()
}

fn config_edited(name: &str, edits: &[(&str, &str)]) -> SweepSpec {
    let mut text = config_text(name);
    for (from, to) in edits {
        assert!(text.contains(from), "{name}: expected `{from}`");
        text = text.replace(from, to);
    }
    parse_config(&text).unwrap()
}

/// Print the checklist line, then return whether the criterion held.
fn report(n: usize, label: &str, problems: &[String]) -> bool {
    if problems.is_empty() {
        println!("criterion {n} ({label}): PASS");
        true
    } else {
        println!("criterion {n} ({label}): FAIL");
        for p in problems {
            println!("  {p}");
        }
        false
    }
}

fn mode_rows<'a>(result: &'a SweepResult, mode: &str) -> Vec<&'a SweepRow> {
    result.rows.iter().filter(|r| r.mode == mode).collect()
}

fn nearest<'a>(rows: &[&'a SweepRow], value: f64) -> &'a SweepRow {
    rows.iter()
        .min_by(|a, b| {
            let da = (a.value - value).abs();
            let db = (b.value - value).abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap()
}

fn blockade_verdict(row: &SweepRow, order: usize) -> bool {
    match (row.g.get(&order).copied().flatten(), row.g.get(&(order + 1)).copied().flatten()) {
        (Some(gn), Some(gm)) => classify_blockade(gn, gm).unwrap(),
        _ => false,
    }
}

/// Valid (value, g(order)) pairs within `half_width` of `center`, in grid
/// order.
fn curve_near(rows: &[&SweepRow], order: usize, center: f64, half_width: f64) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| r.valid && (r.value - center).abs() <= half_width)
        .filter_map(|r| r.g.get(&order).copied().flatten().map(|g| (r.value, g)))
        .collect()
}

/// Swept value of the strict interior local maximum of g(order) nearest
/// `center`, among valid points within `half_width`.
fn nearest_local_max(rows: &[&SweepRow], order: usize, center: f64, half_width: f64) -> Option<f64> {
    let pts = curve_near(rows, order, center, half_width);
    pts.windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 > w[2].1)
        .map(|w| w[1].0)
        .min_by(|a, b| (a - center).abs().partial_cmp(&(b - center).abs()).unwrap())
}

/// Like `nearest_local_max` but accepts an extremum of either sense; the
/// blockade feature shows up as a resonant dip in the normalized
/// correlations (the mean photon number peaks there), so the marker of
/// interest is usually a local minimum.
fn nearest_local_extremum(rows: &[&SweepRow], order: usize, center: f64, half_width: f64) -> Option<f64> {
    let pts = curve_near(rows, order, center, half_width);
    pts.windows(3)
        .filter(|w| (w[1].1 > w[0].1 && w[1].1 > w[2].1) || (w[1].1 < w[0].1 && w[1].1 < w[2].1))
        .map(|w| w[1].0)
        .min_by(|a, b| (a - center).abs().partial_cmp(&(b - center).abs()).unwrap())
}

#[test]
fn criterion_1_three_photon_blockade_in_the_atom_cavity_sweep() {
    // Two of the four clauses below state the published reading of this
    // figure and are not reproducible from the converged model, so they
    // fail honestly:
    //
    // - verdict at the resonances: the converged steady state at
    //   delta = +-10 has g3 = 4.24 and g4 = 14.07 (cross-checked against
    //   an independent dense solver; stable from dim 12 through 24), so
    //   four-photon antibunching is absent. The published picture
    //   (g4 ~ 0.4 < 1 at the resonance, large elsewhere) is reproduced
    //   only by truncating the cavity to five levels, which amputates
    //   every process that could place a second drive quantum: an
    //   honest basis (order + 3 levels or more) already gives g4 > 2.
    // - g3 local maximum at the resonances: the converged g3 has a local
    //   MINIMUM there (the mean photon number peaks at the resonance,
    //   and the normalization deflates g3 faster than the three-photon
    //   moment grows); g3 rises monotonically into the flanks.
    //
    // The symmetry and runtime clauses hold.
    let spec = config("fig1b.cfg");
    let started = Instant::now();
    let result = run_sweep(&spec, None);
    let elapsed = started.elapsed().as_secs_f64();
    let rows = mode_rows(&result, "a");
    let mut problems = Vec::new();

    // Blockade verdict and a local g3 maximum at both predicted detunings.
    for target in [-10.0, 10.0] {
        let row = nearest(&rows, target);
        if !(row.valid && blockade_verdict(row, 3)) {
            problems.push(format!(
                "delta {}: g3 {:?}, g4 {:?}, tail {:.2e}, valid {}",
                row.value, row.g[&3], row.g[&4], row.tail, row.valid
            ));
        }
        match nearest_local_max(&rows, 3, target, 2.0) {
            Some(peak) if (peak - target).abs() <= 0.5 => {}
            Some(peak) => problems.push(format!("g3 local maximum near {target} sits at {peak}")),
            None => {
                let probe = curve_near(&rows, 3, target, 2.0);
                let at = probe
                    .iter()
                    .min_by(|a, b| {
                        (a.0 - target).abs().partial_cmp(&(b.0 - target).abs()).unwrap()
                    })
                    .map(|p| p.1);
                let edge = probe.first().map(|p| p.1);
                problems.push(format!(
                    "no interior local maximum of g3 within 2.0 of {target}: the curve \
                     dips to {at:?} at the resonance and climbs to {edge:?} at the window \
                     edge (a local minimum, not a maximum)"
                ));
            }
        }
    }

    // The grid is symmetric, so the curve must be too.
    let mut asymmetry = 0.0f64;
    for (k, row) in rows.iter().enumerate() {
        let mirror = rows[rows.len() - 1 - k];
        match (row.g[&3], mirror.g[&3]) {
            (Some(x), Some(y)) => asymmetry = asymmetry.max((x.ln() - y.ln()).abs()),
            _ => {
                problems.push(format!("g3 undefined at delta {}", row.value));
                break;
            }
        }
    }
    if asymmetry > 0.05 {
        problems.push(format!("log asymmetry {asymmetry:.3} exceeds 0.05"));
    }
    if elapsed >= 120.0 {
        problems.push(format!("sweep took {elapsed:.0} s, target is under 120 s"));
    }

    assert!(
        report(1, "three-photon blockade, atom-cavity sweep", &problems),
        "{problems:?}"
    );
}

#[test]
fn criterion_2_four_photon_blockade_at_the_predicted_detunings() {
    // At this drive strength the four-photon cascade outruns the cavity
    // decay from the bottom of the ladder (the rung amplitude grows like
    // the square of the occupation while the energy cost is fixed), so the
    // converged steady state is a high-occupation plateau at every
    // detuning: means grow with dimension and g5 > g4 > 1. The expected
    // verdict below is therefore not reproducible with converged numerics;
    // this check reports the honest values and fails. The verdict does
    // hold at the minimal legal truncation (three levels above one drive
    // rung), where the wall itself suppresses the cascade, but that state
    // carries ~19% of its weight in the top two levels.
    let spec = config("fig1c.cfg");
    let mut problems = Vec::new();
    for target in [-5.0, 5.0] {
        let rows = solve_point(&spec, target);
        let row = &rows[0];
        if !(row.valid && blockade_verdict(row, 4)) {
            problems.push(format!(
                "delta {target}: g4 {:?}, g5 {:?}, mean {:.3}, tail {:.2e}, dim {}, valid {}",
                row.g[&4], row.g[&5], row.mean, row.tail, row.dim, row.valid
            ));
        }
    }
    assert!(
        report(2, "four-photon blockade, atom-cavity points", &problems),
        "{problems:?}"
    );
}

#[test]
fn criterion_3_kerr_blockade_at_the_anharmonicity_detunings() {
    // The blockade feature is a resonant dip: the mean photon number
    // peaks at the predicted detuning while both normalized correlations
    // pass through interior local minima there, with g(order+1) dipping
    // below 1. Each order's nearest local extremum must sit within 0.5
    // of the prediction.
    let mut problems = Vec::new();
    for (name, order) in [("fig2bc.cfg", 3usize), ("fig2c.cfg", 4usize)] {
        let spec = config(name);
        let target = kerr::blockade_detuning(order, 10.0);
        let result = run_sweep(&spec, None);
        let rows = mode_rows(&result, "a");
        let row = nearest(&rows, target);
        if !(row.valid && blockade_verdict(row, order)) {
            problems.push(format!(
                "{name}: no {order}-photon verdict at delta {}: g{order} {:?}, g{} {:?}",
                row.value,
                row.g[&order],
                order + 1,
                row.g[&(order + 1)]
            ));
        }
        for n in [order, order + 1] {
            match nearest_local_extremum(&rows, n, target, 2.0) {
                Some(at) if (at - target).abs() <= 0.5 => {}
                other => problems.push(format!(
                    "{name}: g{n} extremum near {target} sits at {other:?}"
                )),
            }
        }
    }
    assert!(report(3, "kerr blockade detunings", &problems), "{problems:?}");
}

#[test]
fn criterion_4_parametric_drive_beats_coherent_drive() {
    fn log_extrema(result: &SweepResult, order: usize) -> (f64, f64) {
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for row in result.rows.iter().filter(|r| r.valid) {
            if let Some(g) = row.g.get(&order).copied().flatten() {
                max = max.max(g.ln());
                min = min.min(g.ln());
            }
        }
        (max, min)
    }
    let parametric = run_sweep(&config("fig2de_parametric.cfg"), None);
    let coherent = run_sweep(&config("fig2de_coherent.cfg"), None);
    let (p3_max, _) = log_extrema(&parametric, 3);
    let (c3_max, _) = log_extrema(&coherent, 3);
    let (_, p4_min) = log_extrema(&parametric, 4);
    let (_, c4_min) = log_extrema(&coherent, 4);

    let mut problems = Vec::new();
    if !(p3_max > c3_max) {
        problems.push(format!(
            "three-photon bunching: parametric max ln g3 {p3_max:.3} vs coherent {c3_max:.3}"
        ));
    }
    if !(p4_min < c4_min) {
        problems.push(format!(
            "four-photon antibunching: parametric min ln g4 {p4_min:.3} vs coherent {c4_min:.3}"
        ));
    }
    assert!(
        report(4, "parametric vs coherent drive on the kerr resonator", &problems),
        "{problems:?}"
    );
}

#[test]
fn criterion_5_coupled_cavity_blockade_windows() {
    // The pointwise claim holds: at each predicted detuning both cavities
    // show g2 >= 1 > g3. The three-window form of the claim does not: g3
    // never climbs back above 1 between the left two resonances (interior
    // maxima 0.99 for cavity a, 0.06 for cavity b, cross-checked against
    // an independent dense solver), so the two left verdict intervals are
    // one contiguous run and the extraction reports two windows per mode.
    // This check states the three-window expectation and fails honestly,
    // printing the pointwise verdicts for context.
    let spec = config("fig3.cfg");
    let result = run_sweep(&spec, None);
    let (targets, gaps) = coupled_kerr::blockade_detunings(10.0, 5.0);
    let grid_step = spec.axis.step(0);
    let mut problems = Vec::new();

    for mode in ["a", "b"] {
        let rows = mode_rows(&result, mode);
        for t in &targets {
            let row = nearest(&rows, *t);
            println!(
                "  mode {mode} at delta {:+.2}: g2 {:?}, g3 {:?}, verdict {}",
                row.value,
                row.g[&2],
                row.g[&3],
                blockade_verdict(row, 2)
            );
        }
        let windows: Vec<_> = find_blockade_windows(&result, 2)
            .unwrap()
            .into_iter()
            .filter(|w| w.mode == mode)
            .collect();
        if windows.len() != 3 {
            problems.push(format!(
                "mode {mode}: {} windows instead of 3 (targets {targets:?}): {windows:?}",
                windows.len()
            ));
            continue;
        }
        for (w, t) in windows.iter().zip(&targets) {
            if !w.contains(*t) {
                problems.push(format!(
                    "mode {mode}: window [{:.4}, {:.4}] misses the detuning {t:.4}",
                    w.start, w.stop
                ));
            }
        }
        // Adjacent two-photon levels sit gap/2 apart on the detuning axis.
        let centers: Vec<f64> = windows.iter().map(|w| w.center()).collect();
        for k in 0..2 {
            let spacing = centers[k + 1] - centers[k];
            let predicted = gaps[k] / 2.0;
            if (spacing - predicted).abs() > grid_step {
                problems.push(format!(
                    "mode {mode}: window spacing {spacing:.4} vs predicted {predicted:.4} \
                     (allowed slack one grid step {grid_step:.2})"
                ));
            }
        }
    }
    assert!(report(5, "coupled-cavity blockade windows", &problems), "{problems:?}");
}

#[test]
fn criterion_6_spectra_match_the_closed_forms() {
    let mut problems = Vec::new();

    // Atom-cavity manifolds: 0 and n * delta -/+ sqrt(n) * g.
    for delta in [-10.0, 0.0, 3.7] {
        let spec = config("fig1b.cfg");
        let mut model = spec.model;
        let (g, dim) = match &mut model {
            ModelSpec::Jc(p) => {
                p.delta = delta;
                (p.g, p.cavity_dim)
            }
            _ => unreachable!(),
        };
        for manifold in manifold_spectrum(&model, dim - 2).unwrap() {
            let n = manifold.excitation;
            let expect = if n == 0 {
                vec![0.0]
            } else {
                let split = (n as f64).sqrt() * g;
                vec![n as f64 * delta - split, n as f64 * delta + split]
            };
            for (x, y) in manifold.frequencies.iter().zip(&expect) {
                if (x - y).abs() > 1e-9 {
                    problems.push(format!(
                        "atom-cavity manifold {n} at delta {delta}: {x} vs {y}"
                    ));
                }
            }
        }
    }

    // Kerr ladder: k * delta + U k (k - 1), exact up to the rounding of
    // the operator square-root products (a few ulp at magnitude ~1e3).
    {
        let spec = config_edited("fig2bc.cfg", &[("model.delta = 0", "model.delta = -20")]);
        let (u, dim) = match &spec.model {
            ModelSpec::Kerr(p) => (p.u, p.cavity_dim),
            _ => unreachable!(),
        };
        for manifold in manifold_spectrum(&spec.model, dim - 2).unwrap() {
            let k = manifold.excitation as f64;
            let expect = k * -20.0 + u * k * (k - 1.0);
            let got = manifold.frequencies[0];
            if (got - expect).abs() > 1e-10 {
                problems.push(format!("kerr level {k}: {got} vs {expect}"));
            }
        }
    }

    // Coupled two-photon block: 2 omega + U -/+ sqrt(4 J^2 + U^2) and
    // 2 (omega + U).
    {
        let spec = config_edited("fig3.cfg", &[("model.delta = 0", "model.delta = -10")]);
        let (u, j) = match &spec.model {
            ModelSpec::CoupledKerr(p) => (p.u, p.j),
            _ => unreachable!(),
        };
        let omega = -10.0f64;
        let split = (4.0 * j * j + u * u).sqrt();
        let mut expect = [2.0 * omega + u - split, 2.0 * omega + u + split, 2.0 * (omega + u)];
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let manifolds = manifold_spectrum(&spec.model, 2).unwrap();
        let two = manifolds.iter().find(|m| m.excitation == 2).unwrap();
        for (x, y) in two.frequencies.iter().zip(&expect) {
            if (x - y).abs() > 1e-10 {
                problems.push(format!("coupled two-photon level: {x} vs {y}"));
            }
        }
    }

    assert!(report(6, "undriven spectra against closed forms", &problems), "{problems:?}");
}

/// One figure configuration pinned to its representative operating point.
struct Representative {
    name: &'static str,
    edits: &'static [(&'static str, &'static str)],
    order: usize,
}

const REPRESENTATIVES: &[Representative] = &[
    Representative {
        name: "fig1b.cfg",
        edits: &[("model.delta = 0", "model.delta = 10")],
        order: 3,
    },
    Representative {
        name: "fig1c.cfg",
        edits: &[("model.delta = 0", "model.delta = 5")],
        order: 4,
    },
    Representative {
        name: "fig2bc.cfg",
        edits: &[("model.delta = 0", "model.delta = -20")],
        order: 3,
    },
    Representative {
        name: "fig2c.cfg",
        edits: &[("model.delta = 0", "model.delta = -30")],
        order: 4,
    },
    Representative {
        name: "fig2de_parametric.cfg",
        edits: &[("drive.amplitude = 0.1", "drive.amplitude = 0.3")],
        order: 3,
    },
    Representative { name: "fig2de_coherent.cfg", edits: &[], order: 3 },
    Representative {
        name: "fig3.cfg",
        edits: &[("model.delta = 0", "model.delta = -10")],
        order: 2,
    },
    Representative {
        name: "fig4.cfg",
        edits: &[("drive.amplitude = 0.5", "drive.amplitude = 0.2")],
        order: 2,
    },
];

fn solved_at(spec: &SweepSpec, dims: &[usize]) -> (ModelSpec<f64>, SteadyState<f64>) {
    let model = spec.model.with_cavity_dims(dims);
    let l = model.liouvillian().unwrap();
    let sol = steady_state(&l).unwrap();
    (model, sol)
}

#[test]
fn criterion_7_steady_state_validity_suite() {
    // The fig1c row fails the tail and dimension-stability gates: its
    // truncated steady state is the cascade plateau and never converges.
    // See criterion 2 for the analysis; the numbers print below.
    let mut problems = Vec::new();
    for rep in REPRESENTATIVES {
        let spec = config_edited(rep.name, rep.edits);
        let rows = solve_operating_point(&spec);
        let final_dim = rows[0].dim;
        let cavities = spec.model.cavity_dims().len();
        let (model, sol) = solved_at(&spec, &vec![final_dim; cavities]);
        let rho = &sol.rho;
        let mut gates = Vec::new();

        if sol.residual > 1e-9 {
            gates.push(format!("residual {:.2e}", sol.residual));
        }
        let trace: C64 = rho.matrix().diag().iter().sum();
        if (trace - C64::new(1.0, 0.0)).norm() > 1e-10 {
            gates.push(format!("trace error {:.2e}", (trace - C64::new(1.0, 0.0)).norm()));
        }
        let mut herm = 0.0f64;
        for i in 0..rho.matrix().nrows() {
            for j in 0..rho.matrix().ncols() {
                herm = herm.max((rho.matrix()[(i, j)] - rho.matrix()[(j, i)].conj()).norm());
            }
        }
        if herm > 1e-10 {
            gates.push(format!("hermiticity error {herm:.2e}"));
        }
        let lowest = eigvalsh(rho.matrix()).unwrap()[0];
        if lowest < -1e-8 {
            gates.push(format!("lowest eigenvalue {lowest:.2e}"));
        }

        let vacuum = DensityMatrix::vacuum(model.space());
        let l = model.liouvillian().unwrap();
        let evolved = propagate(&vacuum, &l, 200.0).unwrap();
        let distance = evolved.trace_distance(rho).unwrap();
        if distance > 1e-6 {
            gates.push(format!("distance to the t=200 evolution oracle {distance:.2e}"));
        }

        for (_, slot) in model.cavity_modes() {
            let tail = fock_tail(rho, slot).unwrap();
            if tail > 1e-8 {
                gates.push(format!("fock tail {tail:.2e} (dim {final_dim})"));
                break;
            }
        }

        // Correlations must be stable against more basis headroom: +4
        // levels on a single cavity, +2 per cavity on the pair. Skipped
        // once a gate has failed (the row already fails, and an
        // unconverged point would only repeat the tail diagnosis).
        if gates.is_empty() {
            let bump = if cavities == 2 { 2 } else { 4 };
            if cavities == 2 && final_dim + bump > 10 {
                // A pair of 12-level cavities needs a 20736^2 generator,
                // past the memory budget of this suite.
                gates.push(format!(
                    "stability probe at dims {} per cavity exceeds the memory budget",
                    final_dim + bump
                ));
            } else {
                let (_, bigger) = solved_at(&spec, &vec![final_dim + bump; cavities]);
                for (_, slot) in model.cavity_modes() {
                    let small = g_n(rho, slot, rep.order).unwrap();
                    let large = g_n(&bigger.rho, slot, rep.order).unwrap();
                    let shift = (small.ln() - large.ln()).abs();
                    if shift >= 1e-4 {
                        gates.push(format!(
                            "ln g{} shifts by {shift:.2e} between dim {final_dim} and {}",
                            rep.order,
                            final_dim + bump
                        ));
                        break;
                    }
                }
            }
        }

        if gates.is_empty() {
            println!("  {} ok (dim {final_dim}, residual {:.1e})", rep.name, sol.residual);
        } else {
            problems.push(format!("{}: {}", rep.name, gates.join("; ")));
        }
    }
    assert!(report(7, "steady-state validity suite", &problems), "{problems:?}");
}

#[test]
fn criterion_8_observable_identities() {
    let mut problems = Vec::new();

    // g2 of the Fock state |m> is (m-1)/m.
    for m in 1..=5usize {
        let space = CompositeSpace::single(ModeSpace::Boson { dim: 8 });
        let rho: DensityMatrix<f64> = DensityMatrix::fock(space, &[m]);
        let g2 = g_n(&rho, 0, 2).unwrap();
        let expect = (m as f64 - 1.0) / m as f64;
        if (g2 - expect).abs() > 1e-12 {
            problems.push(format!("fock {m}: g2 {g2} vs {expect}"));
        }
    }

    // Every normalized correlation of a coherent state is 1.
    {
        let dim = 30;
        let alpha = C64::new(0.6, 0.3);
        let mut ket = Array1::<C64>::zeros(dim);
        let mut amp = C64::new(1.0, 0.0);
        for k in 0..dim {
            if k > 0 {
                amp = amp * alpha / C64::new((k as f64).sqrt(), 0.0);
            }
            ket[k] = amp;
        }
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        ket.mapv_inplace(|z| z / C64::new(norm, 0.0));
        let space = CompositeSpace::single(ModeSpace::Boson { dim });
        let rho = DensityMatrix::pure(space, &ket).unwrap();
        for n in 2..=4usize {
            let g = g_n(&rho, 0, n).unwrap();
            if (g - 1.0).abs() > 1e-6 {
                problems.push(format!("coherent state: g{n} = {g}"));
            }
        }
    }

    // A damped cavity under a plain coherent drive settles into the
    // displaced vacuum with amplitude -iF / (i delta + kappa/2).
    {
        let text = "\
model.kind = kerr
model.delta = 0.7
model.u = 0
model.dim = 14
drive.kind = coherent
drive.amplitude = 0.3
sweep.parameter = amplitude
sweep.start = 0.1
sweep.stop = 1
sweep.count = 2
orders = 2
";
        let spec = parse_config(text).unwrap();
        let l = spec.model.liouvillian().unwrap();
        let sol = steady_state(&l).unwrap();
        let f = C64::new(0.3, 0.0);
        let denominator = C64::new(0.5, 0.7);
        let alpha = -C64::i() * f / denominator;
        let a = annihilation::<f64>(14).unwrap();
        let measured = expectation(&sol.rho, &a).unwrap();
        if (measured - alpha).norm() > 1e-6 {
            problems.push(format!("cavity amplitude {measured} vs {alpha}"));
        }
        let g2 = g_n(&sol.rho, 0, 2).unwrap();
        if (g2 - 1.0).abs() > 1e-6 {
            problems.push(format!("driven cavity g2 = {g2}"));
        }
    }

    assert!(report(8, "observable identities", &problems), "{problems:?}");
}
