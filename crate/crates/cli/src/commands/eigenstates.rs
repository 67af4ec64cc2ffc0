use qaept::invariants::{build_invariant, expectation, lowest_eigenvalues, Spectrum};
use qaept::io::json_f64;
use qaept::quantum::dm_eigenstate;
use serde_json::json;

use super::{discrete_params, run_basis, Ctx, Outcome};
use crate::error::CliError;
use crate::output::{time_tag, Staged};
use crate::parallel::par_map;

pub fn run(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let opts = &cfg.eigen;
    let (wt, gt) = discrete_params(&cfg.spec)?;
    let basis = run_basis(cfg)?;

    let jobs: Vec<(usize, f64)> = opts.times.iter().flat_map(|&t| (0..=opts.n_max).map(move |n| (n, t))).collect();
    let states = par_map(&jobs, ctx.threads, |&(n, t)| dm_eigenstate(basis.clone(), wt, gt, n, t, &cfg.grid, &cfg.consts))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    let per_time = par_map(&opts.times, ctx.threads, |&t| -> Result<_, CliError> {
        let op = build_invariant(&cfg.spec, basis.as_ref(), &cfg.grid, &cfg.consts, t)?;
        let grid_vals = if opts.grid_spectrum { Some(lowest_eigenvalues(&op, opts.n_max + 1)?) } else { None };
        Ok((op, grid_vals))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let mut staged = Staged::new();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (ti, &t) in opts.times.iter().enumerate() {
        let (op, grid_vals) = &per_time[ti];
        let tag = time_tag(t);
        let analytic: Vec<f64> = (0..=opts.n_max).map(|n| cfg.spec.eigenvalue(n, cfg.consts.hbar)).collect::<Result<_, _>>()?;
        let mut spectrum = Spectrum { system: cfg.system_kind.clone(), spec: cfg.spec.label.clone(), t, eigenvalues: analytic.clone() }.to_json();
        if let Some(g) = grid_vals {
            spectrum["grid_eigenvalues"] = g.iter().map(|&v| json_f64(v)).collect();
        }
        staged.json(format!("spectrum_{tag}.json"), &spectrum);
        for n in 0..=opts.n_max {
            let psi = &states[ti * (opts.n_max + 1) + n];
            staged.wavefunction(&format!("eigenstate_n{n}_{tag}"), psi, &cfg.formats);
            let ex = expectation(op, psi)?.re;
            let g = grid_vals.as_ref().map_or(f64::NAN, |g| g[n]);
            if g.is_finite() {
                worst = worst.max((g - analytic[n]).abs());
            }
            rows.push(vec![t, n as f64, analytic[n], g, g - analytic[n], ex]);
        }
    }
    staged.table("eigenvalues", &["t", "n", "analytic", "grid", "grid_minus_analytic", "state_expectation"], &rows, &cfg.formats);
    let summary = json!({
        "command": "eigenstates",
        "system": cfg.system_kind,
        "invariant": super::spec_json(&cfg.spec),
        "n_max": opts.n_max,
        "times": opts.times.iter().map(|&t| json_f64(t)).collect::<Vec<_>>(),
        "max_grid_eigenvalue_error": if opts.grid_spectrum { json_f64(worst) } else { serde_json::Value::Null },
        "files": staged.names(),
    });
    Ok(Outcome::ok(staged, summary))
}
