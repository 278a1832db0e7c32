use rayon::prelude::*;

use super::args::{
    Command, CompareArgs, EvolveArgs, NumList, Physics, ScanEpsArgs, ScanKArgs, SpectrumArgs,
    WignerArgs,
};
use super::table::{Cell, Table};
use super::CliError;
use crate::analytic_oracles::{
    psi1_evolution, psi2_evolution, steady1_approx, steady2_approx, trunc2_eigensystem,
    ApproxOrder, PerturbationParams,
};
use crate::correlations::RegressionTerms;
use crate::fock_algebra::{hermitian_eigenvalues, CMatrix, CVector};
use crate::liouvillian::{build_liouvillian, liouvillian_from_hamiltonian, DensityMatrix, SuperOp};
use crate::model::{hamiltonian_rot, hamiltonian_trunc, SystemParams, TuningPoint};
use crate::observables::{
    coherence_param, fano, linear_entropy, mean_photon_number, offdiag, photon_probs, purity,
    thermalization, truncation_fidelity, vn_entropy,
};
use crate::phase_space::{count_extrema, default_pad, linspace_step, wigner_grid};
use crate::solvers::{evolve_master, evolve_unitary, steady_state, SteadyStateResult};
use crate::Result;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    SolverFailure,
    Mismatch,
}

/// A finished table plus diagnostics destined for standard error.
#[derive(Debug)]
pub struct Report {
    pub table: Table,
    pub outcome: Outcome,
    pub notes: Vec<String>,
}

pub fn execute(cmd: &Command) -> std::result::Result<Report, CliError> {
    match cmd {
        Command::ScanK(a) => scan_k(a),
        Command::ScanEps(a) => scan_eps(a),
        Command::Evolve(a) => evolve(a),
        Command::Wigner(a) => wigner(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Compare(a) => compare(a),
    }
}

const OFFDIAG_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)];

fn params(ph: &Physics, eps: f64, n_th: f64) -> Result<SystemParams> {
    SystemParams::new(ph.chi, eps, ph.gamma, n_th, ph.dim)
}

fn solve(p: &SystemParams, k: f64) -> Result<(SuperOp, SteadyStateResult)> {
    let l = build_liouvillian(p, TuningPoint::resonant(k))?;
    let ss = steady_state(&l)?;
    Ok((l, ss))
}

fn nth_or_nan(v: &[f64], n: usize) -> f64 {
    v.get(n).copied().unwrap_or(f64::NAN)
}

fn cumulative(probs: &[f64], m: usize) -> f64 {
    if m < probs.len() {
        probs[..=m].iter().sum()
    } else {
        f64::NAN
    }
}

/// Equal-length ε and k lists are zipped, a single ε is shared by every k.
pub fn panels(eps: &NumList, k: &NumList) -> std::result::Result<Vec<(f64, f64)>, CliError> {
    match (eps.0.len(), k.0.len()) {
        (1, _) => Ok(k.0.iter().map(|&k| (eps.0[0], k)).collect()),
        (a, b) if a == b => Ok(eps.0.iter().copied().zip(k.0.iter().copied()).collect()),
        (a, b) => Err(CliError::Usage(format!(
            "--eps has {a} values but --k has {b}; give one eps or one per k"
        ))),
    }
}

fn context(what: String) -> impl FnOnce(crate::Error) -> CliError {
    move |source| CliError::Solver {
        context: what,
        source,
    }
}

fn scan_k_cells(p: &SystemParams, k: f64, normalized: bool) -> Result<Vec<Cell>> {
    let (_, ss) = solve(p, k)?;
    let rho = &ss.rho;
    let probs = photon_probs(rho);
    let mut cells: Vec<Cell> = (0..6).map(|n| nth_or_nan(&probs, n).into()).collect();
    for m in 1..=3 {
        cells.push(truncation_fidelity(rho, m).ok().into());
    }
    let c = coherence_param(rho);
    cells.extend([
        fano(rho).into(),
        mean_photon_number(rho).into(),
        purity(rho).into(),
        vn_entropy(rho)?.into(),
        linear_entropy(rho).into(),
        c.into(),
    ]);
    if normalized {
        cells.push((c / (1.0 - 1.0 / p.dim as f64)).into());
    }
    cells.push(thermalization(rho).into());
    for (n, m) in OFFDIAG_PAIRS {
        cells.push(offdiag(rho, n, m).ok().map(|z| z.norm()).into());
    }
    cells.extend([ss.residual.into(), ss.dim_adequate.into(), Cell::Empty]);
    Ok(cells)
}

fn failed_row(prefix: Vec<Cell>, width: usize, err: &crate::Error) -> Vec<Cell> {
    let mut row = prefix;
    row.resize(width - 1, Cell::Empty);
    row.push(Cell::Text(err.to_string()));
    row
}

pub fn scan_k(a: &ScanKArgs) -> std::result::Result<Report, CliError> {
    let ks = match (&a.k, &a.k_range) {
        (Some(l), _) => l.0.clone(),
        (None, Some(r)) => r.0.clone(),
        (None, None) => linspace_step(0.5, 4.5, 0.02),
    };
    let mut cols: Vec<String> = ["eps", "nth", "k"].map(String::from).to_vec();
    cols.extend((0..6).map(|n| format!("P{n}")));
    cols.extend(
        [
            "F1",
            "F2",
            "F3",
            "fano",
            "mean_n",
            "purity",
            "entropy",
            "linear_entropy",
            "coherence",
        ]
        .map(String::from),
    );
    if a.normalized_coherence {
        cols.push("coherence_norm".into());
    }
    cols.push("thermalization".into());
    cols.extend(OFFDIAG_PAIRS.iter().map(|(n, m)| format!("abs_rho{n}{m}")));
    cols.extend(["residual", "dim_adequate", "error"].map(String::from));
    let width = cols.len();

    let mut points = Vec::new();
    for &e in &a.eps.0 {
        for &n in &a.nth.0 {
            for &k in &ks {
                points.push((e, n, k));
            }
        }
    }
    // Reject bad parameters up front rather than once per row.
    for &(e, n, _) in &points {
        params(&a.physics, e, n).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let rows: Vec<(Vec<Cell>, bool)> = points
        .par_iter()
        .map(|&(e, n, k)| {
            let prefix = vec![e.into(), n.into(), k.into()];
            let p = params(&a.physics, e, n).expect("validated above");
            match scan_k_cells(&p, k, a.normalized_coherence) {
                Ok(cells) => ([prefix, cells].concat(), true),
                Err(err) => (failed_row(prefix, width, &err), false),
            }
        })
        .collect();
    Ok(collect_rows(Table::new(&cols), rows))
}

fn collect_rows(mut table: Table, rows: Vec<(Vec<Cell>, bool)>) -> Report {
    let mut outcome = Outcome::Success;
    let mut notes = Vec::new();
    for (row, ok) in rows {
        if !ok {
            outcome = Outcome::SolverFailure;
            if let Some(Cell::Text(msg)) = row.last() {
                notes.push(format!("row {} failed: {msg}", table.rows.len()));
            }
        }
        table.push(row);
    }
    Report {
        table,
        outcome,
        notes,
    }
}

pub fn scan_eps(a: &ScanEpsArgs) -> std::result::Result<Report, CliError> {
    let epss = match (&a.eps, &a.eps_range) {
        (Some(l), _) => l.0.clone(),
        (None, Some(r)) => r.0.clone(),
        (None, None) => linspace_step(0.0, 16.0, 0.02),
    };
    let cols = [
        "k",
        "nth",
        "eps",
        "P0",
        "P1",
        "P2",
        "P3",
        "F1",
        "F2",
        "F3",
        "fano",
        "residual",
        "dim_adequate",
        "error",
    ];
    let width = cols.len();
    let mut points = Vec::new();
    for &k in &a.k.0 {
        for &n in &a.nth.0 {
            for &e in &epss {
                params(&a.physics, e, n).map_err(|e| CliError::Usage(e.to_string()))?;
                points.push((k, n, e));
            }
        }
    }
    let rows: Vec<(Vec<Cell>, bool)> = points
        .par_iter()
        .map(|&(k, n, e)| {
            let prefix: Vec<Cell> = vec![k.into(), n.into(), e.into()];
            let res = params(&a.physics, e, n).and_then(|p| solve(&p, k));
            match res {
                Ok((_, ss)) => {
                    let probs = photon_probs(&ss.rho);
                    let mut row = prefix;
                    row.extend((0..4).map(|i| Cell::from(nth_or_nan(&probs, i))));
                    row.extend((1..=3).map(|m| Cell::from(cumulative(&probs, m))));
                    row.extend([
                        fano(&ss.rho).into(),
                        ss.residual.into(),
                        ss.dim_adequate.into(),
                        Cell::Empty,
                    ]);
                    (row, true)
                }
                Err(err) => (failed_row(prefix, width, &err), false),
            }
        })
        .collect();
    Ok(collect_rows(Table::new(&cols), rows))
}

/// Populations of the closed-form truncated evolution, when one exists for `k`.
fn approx_probs(chi: f64, eps: f64, k: f64, t: f64) -> Result<Option<Vec<f64>>> {
    if k == 2.0 {
        Ok(Some(psi2_evolution(chi, eps / chi, t)?.probabilities()))
    } else if k == 1.0 {
        Ok(Some(psi1_evolution(eps, t).probabilities()))
    } else {
        Ok(None)
    }
}

pub fn evolve(a: &EvolveArgs) -> std::result::Result<Report, CliError> {
    let pairs = panels(&a.eps, &a.k)?;
    let t_max = a.t_max.unwrap_or(50.0 / a.physics.chi);
    if !(t_max > 0.0) || !t_max.is_finite() || a.t_points == 0 {
        return Err(CliError::Usage(
            "need --t-max > 0 and --t-points >= 1".into(),
        ));
    }
    let times: Vec<f64> = (0..=a.t_points)
        .map(|i| t_max * i as f64 / a.t_points as f64)
        .collect();
    let mut cols: Vec<String> = [
        "eps", "k", "t", "P0", "P1", "P2", "P3", "P4", "F1", "F2", "F3", "norm",
    ]
    .map(String::from)
    .to_vec();
    if a.with_approx {
        cols.extend((0..4).map(|n| format!("approx_P{n}")));
    }
    let mut table = Table::new(&cols);
    let mut notes = Vec::new();
    for (eps, k) in pairs {
        let p = params(&a.physics, eps, a.nth).map_err(|e| CliError::Usage(e.to_string()))?;
        let what = format!("evolve eps={eps} k={k}");
        let series: Vec<(Vec<f64>, f64)> = if p.gamma == 0.0 {
            let h = hamiltonian_rot(&p, TuningPoint::resonant(k)).map_err(context(what.clone()))?;
            let psi0 = CVector::basis(p.dim, 0).map_err(context(what.clone()))?;
            let traj = evolve_unitary(&h, &psi0, &times).map_err(context(what.clone()))?;
            traj.states
                .iter()
                .map(|s| (s.probabilities(), s.norm()))
                .collect()
        } else {
            let l =
                build_liouvillian(&p, TuningPoint::resonant(k)).map_err(context(what.clone()))?;
            let rho0 = DensityMatrix::fock(p.dim, 0).map_err(context(what.clone()))?;
            let traj = evolve_master(&l, &rho0, &times).map_err(context(what.clone()))?;
            traj.states
                .iter()
                .map(|s| (diag_real(s), s.trace().re))
                .collect()
        };
        if a.with_approx && k != 1.0 && k != 2.0 {
            notes.push(format!(
                "no closed-form evolution for k={k}; approx columns are nan"
            ));
        }
        for (&t, (probs, norm)) in times.iter().zip(&series) {
            let mut row: Vec<Cell> = vec![eps.into(), k.into(), t.into()];
            row.extend((0..5).map(|n| Cell::from(nth_or_nan(probs, n))));
            row.extend((1..=3).map(|m| Cell::from(cumulative(probs, m))));
            row.push((*norm).into());
            if a.with_approx {
                let ap = approx_probs(p.chi, eps, k, t).map_err(context(what.clone()))?;
                let ap = ap.unwrap_or_default();
                row.extend((0..4).map(|n| Cell::from(nth_or_nan(&ap, n))));
            }
            table.push(row);
        }
    }
    Ok(Report {
        table,
        outcome: Outcome::Success,
        notes,
    })
}

fn diag_real(m: &CMatrix) -> Vec<f64> {
    m.diagonal().iter().map(|z| z.re).collect()
}

pub fn wigner(a: &WignerArgs) -> std::result::Result<Report, CliError> {
    let pairs = panels(&a.eps, &a.k)?;
    let pad = a.pad.unwrap_or_else(|| default_pad(a.physics.dim));
    let mut table = Table::new(&["eps", "nth", "k", "x", "p", "w"]);
    let mut notes = Vec::new();
    for (eps, k) in pairs {
        let p = params(&a.physics, eps, a.nth).map_err(|e| CliError::Usage(e.to_string()))?;
        let what = format!("wigner eps={eps} k={k}");
        let (_, ss) = solve(&p, k).map_err(context(what.clone()))?;
        let grid =
            wigner_grid(&ss.rho, &a.x_range.0, &a.p_range.0, pad).map_err(context(what.clone()))?;
        let (peaks, dips) = count_extrema(&grid);
        notes.push(format!("eps={eps} k={k}: {peaks} peaks, {dips} dips"));
        if grid.truncation_warning {
            notes.push(format!(
                "eps={eps} k={k}: grid reaches the displacement truncation edge, raise --pad"
            ));
        }
        if !ss.dim_adequate {
            notes.push(format!(
                "eps={eps} k={k}: top Fock levels populated, raise --dim"
            ));
        }
        for (ip, &pv) in grid.ps.iter().enumerate() {
            for (ix, &xv) in grid.xs.iter().enumerate() {
                table.push(vec![
                    eps.into(),
                    a.nth.into(),
                    k.into(),
                    xv.into(),
                    pv.into(),
                    grid.values[ip][ix].into(),
                ]);
            }
        }
    }
    Ok(Report {
        table,
        outcome: Outcome::Success,
        notes,
    })
}

pub fn spectrum(a: &SpectrumArgs) -> std::result::Result<Report, CliError> {
    let pairs = panels(&a.eps, &a.k)?;
    if !(a.tau_max > 0.0) || !(a.tau_step > 0.0) || a.tau_step > a.tau_max {
        return Err(CliError::Usage("need 0 < --tau-step <= --tau-max".into()));
    }
    let taus = linspace_step(0.0, a.tau_max, a.tau_step);
    let mut table = Table::new(&[
        "eps",
        "nth",
        "k",
        "theta",
        "omega",
        "s",
        "imag_residual",
        "cov0",
    ]);
    for (eps, k) in pairs {
        let p = params(&a.physics, eps, a.nth).map_err(|e| CliError::Usage(e.to_string()))?;
        let what = format!("spectrum eps={eps} k={k}");
        let (l, ss) = solve(&p, k).map_err(context(what.clone()))?;
        let terms = RegressionTerms::compute(&l, &ss.rho, &taus).map_err(context(what.clone()))?;
        for &theta in &a.thetas.0 {
            let cov = terms.covariance(theta);
            let spec = crate::correlations::squeezing_spectrum(&cov, &a.omega_range.0)
                .map_err(context(format!("{what} theta={theta}")))?;
            for (&om, &s) in spec.omegas.iter().zip(&spec.values) {
                table.push(vec![
                    eps.into(),
                    a.nth.into(),
                    k.into(),
                    theta.into(),
                    om.into(),
                    s.into(),
                    spec.imag_residual.into(),
                    cov.values[0].re.into(),
                ]);
            }
        }
    }
    Ok(Report {
        table,
        outcome: Outcome::Success,
        notes: Vec::new(),
    })
}

/// Largest elementwise deviation of a truncated numerical steady state from a
/// closed-form one, at zero temperature.
pub fn steady_residual(p: PerturbationParams, k: u32) -> Result<f64> {
    let (chi, eps) = p.rates(1.0);
    let trunc = k as usize + 2;
    let sp = SystemParams::new(chi, eps, 1.0, 0.0, trunc)?;
    let h = hamiltonian_trunc(&sp, k, trunc)?;
    let l = liouvillian_from_hamiltonian(&h, 1.0, 0.0)?;
    let rho = steady_state(&l)?.rho;
    let approx = match k {
        1 => steady1_approx(p, ApproxOrder::Delta2),
        2 => steady2_approx(p),
        _ => {
            return Err(crate::Error::InvalidArgument(format!(
                "no closed form for k={k}"
            )))
        }
    };
    Ok(rho.matrix().max_abs_diff(&approx))
}

/// Largest eigenvalue error of the approximate four-level eigensystem.
pub fn eigen_residual(chi: f64, delta: f64) -> Result<f64> {
    let sys = trunc2_eigensystem(chi, delta)?;
    let sp = SystemParams::new(chi, delta * chi, 1.0, 0.0, 4)?;
    let exact = hermitian_eigenvalues(&hamiltonian_trunc(&sp, 2, 4)?)?;
    Ok(sys
        .lambdas
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn unitary_populations(h: &CMatrix, times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let psi0 = CVector::basis(h.dim(), 0)?;
    Ok(evolve_unitary(h, &psi0, times)?
        .states
        .iter()
        .map(CVector::probabilities)
        .collect())
}

/// `max_t |P₁(t) − sin²(εt)|` for the resonant three-level truncation.
pub fn rabi_residual(chi: f64, delta: f64, times: &[f64]) -> Result<f64> {
    let eps = delta * chi;
    let sp = SystemParams::new(chi, eps, 1.0, 0.0, 3)?;
    let pops = unitary_populations(&hamiltonian_trunc(&sp, 1, 3)?, times)?;
    Ok(times
        .iter()
        .zip(&pops)
        .map(|(t, p)| (p[1] - (eps * t).sin().powi(2)).abs())
        .fold(0.0, f64::max))
}

/// `max_{t, n≤3} |P_n − P_n^{approx}|` against the full resonant `k = 2` evolution.
pub fn two_photon_residual(chi: f64, delta: f64, dim: usize, times: &[f64]) -> Result<f64> {
    let sp = SystemParams::new(chi, delta * chi, 1.0, 0.0, dim)?;
    let pops = unitary_populations(&hamiltonian_rot(&sp, TuningPoint::resonant(2.0))?, times)?;
    let mut worst: f64 = 0.0;
    for (&t, p) in times.iter().zip(&pops) {
        let ap = psi2_evolution(chi, delta, t)?.probabilities();
        for n in 0..4 {
            worst = worst.max((p[n] - ap[n]).abs());
        }
    }
    Ok(worst)
}

pub fn compare(a: &CompareArgs) -> std::result::Result<Report, CliError> {
    let mut table = Table::new(&["check", "delta", "d", "residual", "bound", "pass"]);
    let mut all_pass = true;
    let mut push = |table: &mut Table, check: &str, delta: f64, d: f64, r: f64, bound: f64| {
        let pass = r <= bound;
        all_pass &= pass;
        table.push(vec![
            Cell::Text(check.into()),
            delta.into(),
            d.into(),
            r.into(),
            bound.into(),
            pass.into(),
        ]);
    };
    let ctx = |s: &str| context(format!("compare {s}"));
    for &delta in &a.delta.0 {
        for &d in &a.d.0 {
            let p =
                PerturbationParams::new(delta, d).map_err(|e| CliError::Usage(e.to_string()))?;
            let r = steady_residual(p, 2).map_err(ctx("steady2"))?;
            push(&mut table, "steady2", delta, d, r, 5.0 * delta * delta);
            if delta <= 0.1 {
                let r = steady_residual(p, 1).map_err(ctx("steady1"))?;
                push(&mut table, "steady1", delta, d, r, 5.0 * delta.powi(3));
            }
        }
    }
    let (chi, du) = (a.chi, a.delta_unitary);
    let times: Vec<f64> = (0..=1000).map(|i| 50.0 / chi * i as f64 / 1000.0).collect();
    let r = eigen_residual(chi, du).map_err(ctx("eigen"))?;
    push(&mut table, "eigen", du, 1.0, r, 5.0 * chi * du.powi(3));
    let r = rabi_residual(chi, du, &times).map_err(ctx("psi1"))?;
    push(&mut table, "psi1", du, 1.0, r, 3.0 * du * du);
    let r = two_photon_residual(chi, du, a.dim, &times).map_err(ctx("psi2"))?;
    push(&mut table, "psi2", du, 1.0, r, 0.02);
    let outcome = if all_pass {
        Outcome::Success
    } else {
        Outcome::Mismatch
    };
    Ok(Report {
        table,
        outcome,
        notes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::args::{parse_list, Cli};
    use clap::Parser;

    fn parse(args: &[&str]) -> Command {
        Cli::try_parse_from(std::iter::once("kerrpb").chain(args.iter().copied()))
            .unwrap()
            .command
    }

    #[test]
    fn panel_pairing() {
        let one = parse_list("5").unwrap();
        let three = parse_list("1,2,3").unwrap();
        assert_eq!(
            panels(&one, &three).unwrap(),
            vec![(5.0, 1.0), (5.0, 2.0), (5.0, 3.0)]
        );
        let zipped = panels(&parse_list("5,5,11.56").unwrap(), &three).unwrap();
        assert_eq!(zipped[2], (11.56, 3.0));
        assert!(panels(&parse_list("1,2").unwrap(), &three).is_err());
    }

    #[test]
    fn scan_row_errors_do_not_stop_the_scan() {
        // A closed system has no unique steady state.
        let cmd = parse(&["scan-k", "--gamma", "0", "--dim", "4", "--k", "1,2"]);
        let rep = execute(&cmd).unwrap();
        assert_eq!(rep.table.rows.len(), 2);
        assert_eq!(rep.outcome, Outcome::SolverFailure);
        assert!(matches!(rep.table.rows[0].last(), Some(Cell::Text(_))));
    }

    #[test]
    fn small_dimension_gives_nan_columns() {
        let cmd = parse(&["scan-k", "--dim", "4", "--k", "1"]);
        let rep = execute(&cmd).unwrap();
        assert_eq!(rep.outcome, Outcome::Success);
        let col = rep.table.columns.iter().position(|c| c == "P5").unwrap();
        assert!(matches!(rep.table.rows[0][col], Cell::Num(v) if v.is_nan()));
    }

    #[test]
    fn evolve_starts_in_vacuum() {
        let cmd = parse(&[
            "evolve",
            "--gamma",
            "0",
            "--dim",
            "6",
            "--k",
            "1",
            "--t-points",
            "4",
            "--with-approx",
        ]);
        let rep = execute(&cmd).unwrap();
        assert_eq!(rep.table.rows.len(), 5);
        let first = &rep.table.rows[0];
        assert!(matches!(first[3], Cell::Num(v) if (v - 1.0).abs() < 1e-12));
        assert!(matches!(first[first.len() - 1], Cell::Num(v) if v.is_nan()));
    }

    #[test]
    fn compare_passes_on_small_delta() {
        let p = PerturbationParams::new(0.05, 0.5).unwrap();
        assert!(steady_residual(p, 2).unwrap() <= 5.0 * 0.05 * 0.05);
        assert!(steady_residual(p, 1).unwrap() <= 5.0 * 0.05f64.powi(3));
        assert!(steady_residual(p, 3).is_err());
        assert!(eigen_residual(30.0, 0.1).unwrap() <= 5.0 * 30.0 * 1e-3);
    }
}
