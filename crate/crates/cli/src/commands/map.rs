use qaept::io::{json_f64, read_wavefunction_binary};
use qaept::quantum::{qaept_apply_with, qaept_inverse_with, InterpolatorRegistry, MapOptions};
use serde_json::json;

use super::{aux_map, run_basis, Ctx, Direction, Outcome};
use crate::config::Auxiliary;
use crate::error::CliError;
use crate::output::Staged;

pub fn run(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let opts = &cfg.map;
    let path = ctx.input.as_ref().ok_or_else(|| CliError::config("map needs --input <state.bin>"))?;
    let psi = read_wavefunction_binary(path)?;
    if psi.consts != cfg.consts {
        return Err(CliError::config(format!(
            "input state has hbar = {}, m = {}; config has hbar = {}, m = {}",
            psi.consts.hbar, psi.consts.m, cfg.consts.hbar, cfg.consts.m
        )));
    }
    let basis = run_basis(cfg)?;
    let map = aux_map(cfg, opts.auxiliary, &basis, opts.gamma_tilde, (0.0, cfg.time.t_final + super::SPAN_MARGIN))?;
    let mopts = MapOptions {
        interpolator: InterpolatorRegistry::default().get(&opts.interpolator)?,
        leakage_tol: opts.leakage_tol,
        target: Some(cfg.grid),
    };
    let mapped = match ctx.direction {
        Direction::Forward => qaept_apply_with(&psi, map.as_ref(), &mopts)?,
        Direction::Inverse => qaept_inverse_with(&psi, map.as_ref(), &mopts)?,
    };
    let mut staged = Staged::new();
    staged.wavefunction("mapped", &mapped.psi, &cfg.formats);
    let summary = json!({
        "command": "map",
        "system": cfg.system_kind,
        "auxiliary": match opts.auxiliary { Auxiliary::Harmonic => "harmonic", Auxiliary::Engineered => "engineered" },
        "direction": match ctx.direction { Direction::Forward => "forward", Direction::Inverse => "inverse" },
        "interpolator": opts.interpolator,
        "t_in": json_f64(psi.t),
        "t_out": json_f64(mapped.psi.t),
        "norm_in": json_f64(psi.norm()),
        "norm_out": json_f64(mapped.psi.norm()),
        "leakage": json_f64(mapped.leakage.max(0.0) + 0.0),
        "files": staged.names(),
    });
    Ok(Outcome::ok(staged, summary))
}
