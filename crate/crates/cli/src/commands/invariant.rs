use qaept::invariants::{build_invariant, invariance_residual, lowest_eigenvalues, Spectrum};
use qaept::io::json_f64;
use serde_json::{json, Value};

use super::{run_basis, Ctx, Outcome};
use crate::error::CliError;
use crate::output::{time_tag, Staged};
use crate::parallel::par_map;

pub fn run(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let opts = &cfg.invariant;
    let basis = run_basis(cfg)?;
    let discrete = cfg.spec.big_omega().is_ok();

    let results = par_map(&opts.times, ctx.threads, |&t| -> Result<_, CliError> {
        let op = build_invariant(&cfg.spec, basis.as_ref(), &cfg.grid, &cfg.consts, t)?;
        let residual = invariance_residual(&cfg.spec, basis.as_ref(), &cfg.system, &cfg.grid, &cfg.consts, t, opts.fd_dt)?;
        let eig = if opts.eigensolve { Some(lowest_eigenvalues(&op, opts.n_eigen)?) } else { None };
        Ok((residual, op.matrix.hermiticity_error(), eig))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let mut staged = Staged::new();
    let mut rows = Vec::new();
    for (&t, (residual, herm, eig)) in opts.times.iter().zip(&results) {
        rows.push(vec![t, *residual, *herm]);
        if let Some(eig) = eig {
            let mut s = Spectrum { system: cfg.system_kind.clone(), spec: cfg.spec.label.clone(), t, eigenvalues: eig.clone() }.to_json();
            if discrete {
                s["analytic"] = (0..eig.len())
                    .map(|n| cfg.spec.eigenvalue(n, cfg.consts.hbar).map(json_f64))
                    .collect::<Result<Vec<_>, _>>()?
                    .into();
            }
            staged.json(format!("spectrum_{}.json", time_tag(t)), &s);
        }
    }
    staged.table("invariant", &["t", "residual", "hermiticity_error"], &rows, &cfg.formats);
    let max = |k: usize| json_f64(rows.iter().map(|r| r[k]).fold(0.0, f64::max));
    let summary = json!({
        "command": "invariant",
        "system": cfg.system_kind,
        "invariant": super::spec_json(&cfg.spec),
        "max_residual": max(1),
        "max_hermiticity_error": max(2),
        "regime": if discrete { "discrete" } else { "continuous" },
        "files": Value::from(staged.names()),
    });
    Ok(Outcome::ok(staged, summary))
}
