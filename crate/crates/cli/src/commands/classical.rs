use qaept::io::json_f64;
use qaept::lsode::{count_zeros, ZeroSample};
use qaept::Error;
use serde_json::{json, Value};

use super::{aux_map, basis_for, sample_times, source_name, Ctx, Outcome};
use crate::config::{Auxiliary, BasisChoice};
use crate::error::CliError;
use crate::output::Staged;

const HEADERS: [&str; 11] = ["t", "u1", "u1_dot", "u2", "u2_dot", "up", "up_dot", "W", "b", "b_dot", "t1"];

fn zero_report(samples: Vec<ZeroSample>) -> Result<Value, CliError> {
    match count_zeros(&samples) {
        Ok(scan) => Ok(json!(scan.count)),
        Err(Error::ResolutionWarning { t }) => Ok(json!({"unresolved_near": json_f64(t)})),
        Err(e) => Err(e.into()),
    }
}

pub fn run(ctx: &Ctx) -> Result<Outcome, CliError> {
    let cfg = ctx.cfg;
    let opts = &cfg.classical;
    let times = sample_times(opts.t_min, cfg.time.t_final, cfg.time.dt);
    let (basis, source) = match opts.basis {
        BasisChoice::Auto | BasisChoice::Closed => match basis_for(cfg, BasisChoice::Closed, cfg.time.t_final) {
            Ok(b) => b,
            Err(CliError::Config(_)) if opts.basis == BasisChoice::Auto => {
                if opts.t_min < 0.0 {
                    return Err(CliError::config("negative 'classical.t_min' needs a closed-form basis"));
                }
                (super::numeric_basis(cfg, &times)?, qaept::lsode::BasisSource::Numeric)
            }
            Err(e) => return Err(e),
        },
        BasisChoice::Numeric => (super::numeric_basis(cfg, &times)?, qaept::lsode::BasisSource::Numeric),
    };
    let map = aux_map(cfg, opts.b, &basis, 0.0, (opts.t_min.min(0.0), cfg.time.t_final))?;

    let mut rows = Vec::with_capacity(times.len());
    let mut w_err: f64 = 0.0;
    for &t in &times {
        let p = basis.eval(t)?;
        let w = p.wronskian();
        w_err = w_err.max((w - cfg.system.wronskian(t)).abs());
        rows.push(vec![
            t,
            p.u1,
            p.u1_dot,
            p.u2,
            p.u2_dot,
            p.up,
            p.up_dot,
            w,
            map.value(t)?,
            map.derivative(t)?,
            map.time_map(t)?,
        ]);
    }
    let zeros = |u: usize, du: usize| rows.iter().map(|r| ZeroSample { t: r[0], u: r[u], du: r[du] }).collect();
    let mut summary = json!({
        "command": "classical",
        "system": cfg.system_kind,
        "basis": source_name(source),
        "b": match opts.b { Auxiliary::Harmonic => "harmonic", Auxiliary::Engineered => "engineered" },
        "omega0": json_f64(cfg.omega0),
        "t_range": [json_f64(opts.t_min), json_f64(cfg.time.t_final)],
        "samples": rows.len(),
        "wronskian_max_error": json_f64(w_err),
        "zeros": {"u1": zero_report(zeros(1, 2))?, "u2": zero_report(zeros(3, 4))?},
    });
    if cfg.system_kind == "caldirola_kanai" {
        let (g, w2) = (cfg.system.fdot(0.0), cfg.system.omega_sq(0.0));
        summary["Omega_sq"] = json_f64(w2 - 0.25 * g * g);
        summary["Omega"] = if w2 > 0.25 * g * g { json_f64((w2 - 0.25 * g * g).sqrt()) } else { Value::Null };
    }
    let mut staged = Staged::new();
    staged.table("classical", &HEADERS, &rows, &cfg.formats);
    Ok(Outcome::ok(staged, summary))
}
