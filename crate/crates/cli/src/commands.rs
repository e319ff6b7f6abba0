use qca_core::analysis::{
    continuum_residual, dirac_continuum_residual, group_velocity, matched_error, verify_dirac_dispersion,
    verify_weyl_dispersion, ConvergenceFit, Dispersion,
};
use qca_core::automaton::{check_unitarity_groups, full_report, sampled_unitarity};
use qca_core::derivation::{
    all_solutions, build_b_matrices, classify_equivalence, default_probes, enumerate_gr_solutions, tetrahedron_gram,
};
use qca_core::dirac::{build_dirac, gamma5_conjugate, gamma5_conjugated_set, mass_from_coupling};
use qca_core::dynamics::{centroid_velocity, make_wave_packet, trajectory, write_density_csv, write_trajectory_csv};
use qca_core::lattice::uniform_grid;
use qca_core::smallmat::{max_norm, UnitarySpectral};
use qca_core::{FieldState, WaveVector, WeylSolution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::{CliError, Command, Model, Report, RunConfig};

/// Couplings swept by `dirac` when none is configured.
pub const DEFAULT_COUPLINGS: [f64; 5] = [0.0, 0.25, 0.5, 0.8, 1.0];
pub const CONTINUUM_SCALES: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
const ORDER_RANGE: (f64, f64) = (1.9, 2.1);
const GRAM_TOL: f64 = 1e-14;
const DET_TOL: f64 = 1e-12;

/// Run one command, writing its artifacts and JSON report under the output directory.
pub fn run(command: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    let out = cfg.output_path.as_path();
    std::fs::create_dir_all(out)?;
    let mut report = match command {
        Command::Derive => derive(cfg)?,
        Command::Verify => verify(cfg)?,
        Command::Spectrum => spectrum(cfg, out)?,
        Command::Evolve => evolve(cfg, out)?,
        Command::Limit => limit(cfg, out)?,
        Command::Dirac => dirac(cfg)?,
    };
    let json = out.join(format!("{}_report.json", command.name()));
    report.artifact_paths.push(json.clone());
    serde_json::to_writer_pretty(BufWriter::new(File::create(&json)?), &report)
        .map_err(|e| CliError::Io(e.into()))?;
    Ok(report)
}

fn solution(cfg: &RunConfig) -> WeylSolution {
    let s = cfg.solution;
    WeylSolution::new(s.family, s.sign, s.alpha_branch)
}

fn random_k(rng: &mut ChaCha8Rng) -> WaveVector {
    WaveVector::new(rng.random_range(-PI..PI), rng.random_range(-PI..PI), rng.random_range(-PI..PI))
}

fn create(path: PathBuf, report: &mut Report) -> Result<BufWriter<File>, CliError> {
    let f = BufWriter::new(File::create(&path)?);
    report.artifact_paths.push(path);
    Ok(f)
}

fn derive(_cfg: &RunConfig) -> Result<Report, CliError> {
    let mut r = Report::new(Command::Derive);
    let grs = enumerate_gr_solutions();
    r.equals("admissible G^R", grs.len(), 3);
    for g in &grs {
        let rows = g.gram.row_sums().iter().map(|z| z.norm()).fold(0.0, f64::max);
        r.at_most(format!("G^R (x,y)=({},{}) row sums", g.x, g.y), rows, GRAM_TOL);
    }
    let bs = build_b_matrices();
    r.equals("B matrices", bs.len(), 6);
    let tetra = tetrahedron_gram();
    for b in &bs {
        let (gr, gc) = b.gram_pair();
        let name = format!("B{}{}", b.family.index(), b.sign);
        r.at_most(format!("{name} B†B - tetrahedron"), max_norm(&(gc.0 - tetra.0)), GRAM_TOL);
        r.at_most(format!("{name} |det G^C|"), gc.determinant().norm(), DET_TOL);
        let rows = gr.row_sums().iter().map(|z| z.norm()).fold(0.0, f64::max);
        r.at_most(format!("{name} G^R row sums"), rows, GRAM_TOL);
    }
    let all = all_solutions();
    r.equals("automata", all.len(), 12);
    let sets: Vec<_> = all.iter().map(|s| s.transition_set()).collect();
    let classes = classify_equivalence(&sets, &default_probes())?;
    r.equals("classes", classes.classes.len(), 2);
    let mut cos_at_probe = Vec::new();
    for (i, cl) in classes.classes.iter().enumerate() {
        let rep = all[cl.members[0]].label();
        r.equals(format!("class {} size (representative {rep})", i + 1), cl.members.len(), 6);
        let cos_w = cl.fingerprint[0][0].cos();
        r.info(format!("class {} cos w at (π/4,π/4,π/4)", i + 1), cos_w);
        cos_at_probe.push(cos_w);
    }
    if let [a, b] = cos_at_probe[..] {
        let sep = (a - b).abs();
        r.check("class separation in cos w", sep, 0.7, sep >= 0.7);
    }
    let exchanged = classes.exchanged_by_adjoint_reflection;
    r.check("classes exchanged by A(k) -> A†(-k)", exchanged as u8 as f64, 1.0, exchanged);
    Ok(r)
}

fn verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let tol = cfg.tol_or(1e-12)?;
    let mut r = Report::new(Command::Verify);
    let sol = solution(cfg);
    r.info(format!("solution {}", sol.label()), 0.0);
    let ts = sol.transition_set();
    for e in full_report(&ts, tol).entries {
        r.at_most(e.constraint, e.residual, tol);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ks: Vec<WaveVector> = (0..1000).map(|_| random_k(&mut rng)).collect();
    let (defect, det) = sampled_unitarity(&ts, &ks);
    r.at_most("sampled |A†A - I|", defect, tol);
    r.at_most("sampled ||det A| - 1|", det, tol);
    Ok(r)
}

fn spectrum(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let tol = cfg.tol_or(1e-10)?;
    if cfg.spectrum.grid < 2 {
        return Err(CliError::Config("spectrum grid needs at least two points per axis".into()));
    }
    let mut r = Report::new(Command::Spectrum);
    let sol = solution(cfg);
    let branch = cfg.spectrum.closed_form_branch.unwrap_or(sol.alpha_branch);
    let grid = uniform_grid(cfg.spectrum.grid);
    let res = verify_weyl_dispersion(&sol.transition_set(), branch, &grid)?;
    r.info(format!("solution {} vs closed-form branch {branch}", sol.label()), grid.len() as f64);
    r.at_most("max abs_err", res.max_err, tol);
    let mut f = create(out.join("spectrum.csv"), &mut r)?;
    res.write_csv(&mut f)?;
    f.flush()?;
    Ok(r)
}

fn evolve(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let mut r = Report::new(Command::Evolve);
    let lat = cfg.lattice()?;
    let spec = cfg.packet_spec();
    let sol = solution(cfg);
    let steps = cfg.evolve.steps;
    let (traj, disp) = match cfg.evolve.model {
        Model::Weyl => {
            let ts = sol.transition_set();
            let p = make_wave_packet(&spec, lat, &ts)?;
            (trajectory(&p, &ts, steps)?, Dispersion::Weyl { alpha_branch: sol.alpha_branch })
        }
        Model::Dirac => {
            let s = cfg.dirac.s.ok_or_else(|| CliError::Config("evolve with model dirac needs dirac.s".into()))?;
            let d = build_dirac(s, cfg.dirac.mass_sign, sol)?;
            let p = make_wave_packet(&spec, lat, &d.set)?;
            (trajectory(&p, &d.set, steps)?, Dispersion::Dirac { alpha_branch: sol.alpha_branch, s })
        }
    };
    let measured = centroid_velocity(&traj)?;
    let predicted = group_velocity(&disp, spec.branch, &WaveVector::from(spec.k0), 1e-4)?;
    for (a, axis) in ["x", "y", "z"].iter().enumerate() {
        r.info(format!("measured v{axis}"), measured[a]);
        r.info(format!("predicted v{axis}"), predicted[a]);
    }
    let rel = (measured - predicted).norm() / predicted.norm();
    r.at_most("relative velocity error", rel, cfg.evolve.velocity_rel_tol);
    let drift = traj.iter().map(|s| (s.norm_squared() - 1.0).abs()).fold(0.0, f64::max);
    r.at_most("norm drift", drift, 1e-12);

    let mut f = create(out.join("trajectory.csv"), &mut r)?;
    write_trajectory_csv(&mut f, &traj)?;
    f.flush()?;
    let last: &FieldState = traj.last().expect("trajectory includes the initial state");
    let mut f = create(out.join("density_final.csv"), &mut r)?;
    write_density_csv(&mut f, last)?;
    f.flush()?;
    Ok(r)
}

/// Uniform random unit vectors by rejection from the cube.
pub fn random_directions(seed: u64, n: usize) -> Vec<WaveVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = WaveVector::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let len = v.norm();
        if len > 0.1 && len <= 1.0 {
            out.push(v / len);
        }
    }
    out
}

/// Largest `r = mass_ratio·ε` equals the configured mass, capped at 0.1.
pub fn dirac_mass_ratio(s: f64) -> f64 {
    mass_from_coupling(s).min(0.1) / CONTINUUM_SCALES[0]
}

fn limit(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let mut r = Report::new(Command::Limit);
    let sol = solution(cfg);
    let ts = sol.transition_set();
    let dirs = random_directions(cfg.seed, 20);
    let mut fits: Vec<(&str, usize, ConvergenceFit)> = Vec::new();
    for (i, n) in dirs.iter().enumerate() {
        fits.push(("weyl", i, continuum_residual(&ts, &CONTINUUM_SCALES, n)?));
    }
    if let Some(s) = cfg.dirac.s {
        let ratio = dirac_mass_ratio(s);
        r.info("dirac mass ratio r/ε", ratio);
        for (i, n) in dirs.iter().enumerate() {
            fits.push(("dirac", i, dirac_continuum_residual(sol, &CONTINUUM_SCALES, n, ratio)?));
        }
    }
    let mut f = create(out.join("limit.csv"), &mut r)?;
    writeln!(f, "model,direction,nx,ny,nz,eps,residual,fitted_order")?;
    for (model, i, fit) in &fits {
        let n = dirs[*i];
        for (e, res) in fit.scales.iter().zip(&fit.residuals) {
            writeln!(f, "{model},{i},{},{},{},{e},{res},{}", n.x, n.y, n.z, fit.fitted_order)?;
        }
        let ok = (ORDER_RANGE.0..=ORDER_RANGE.1).contains(&fit.fitted_order);
        r.check(format!("{model} order, direction {i}"), fit.fitted_order, 2.0, ok);
    }
    f.flush()?;
    Ok(r)
}

fn dirac(cfg: &RunConfig) -> Result<Report, CliError> {
    let tol = cfg.tol_or(1e-10)?;
    let mut r = Report::new(Command::Dirac);
    let sol = solution(cfg);
    let couplings = match cfg.dirac.s {
        Some(s) => vec![s],
        None => DEFAULT_COUPLINGS.to_vec(),
    };
    let grid = uniform_grid(9);
    for &s in &couplings {
        let d = build_dirac(s, cfg.dirac.mass_sign, sol)?;
        let groups = check_unitarity_groups(&d.set, 1e-12);
        r.at_most(format!("s={s} unitarity groups max residual"), groups.max_residual(), 1e-12);
        let spec = verify_dirac_dispersion(&d, sol.alpha_branch, &grid)?;
        r.at_most(format!("s={s} spectrum max abs_err"), spec.max_err, tol);
        let paired = spec.multiplicity_two(1e-9);
        r.check(format!("s={s} eigenvalue multiplicity two"), paired as u8 as f64, 1.0, paired);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut spec_dev, mut conj_dev): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let k = random_k(&mut rng);
        let s = rng.random_range(0.0..=1.0);
        let d = build_dirac(s, cfg.dirac.mass_sign, sol)?;
        let flipped = gamma5_conjugate(&d)?;
        let a = d.momentum_operator(&k).eigenphases()?;
        let b = flipped.momentum_operator(&k).eigenphases()?;
        spec_dev = spec_dev.max(matched_error(&a, &b));
        let conj = gamma5_conjugated_set(&d);
        for ((_, x), (_, y)) in conj.entries().iter().zip(flipped.set.entries().iter()) {
            conj_dev = conj_dev.max(max_norm(&(x - y)));
        }
    }
    r.at_most("γ5 pair spectral deviation", spec_dev, 1e-12);
    r.at_most("γ5 B γ5 vs flipped mass", conj_dev, 1e-14);
    r.info(
        format!("mass sign {} (flipped: {})", cfg.dirac.mass_sign, cfg.dirac.mass_sign.flip()),
        cfg.dirac.mass_sign.value(),
    );
    Ok(r)
}
