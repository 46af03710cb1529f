use serde_json::{json, Value};
use skewfiber::cremer::{greedy_quadratic, growth_profile, linear_example_phi, ln_inverse_divisors, write_growth_csv};
use skewfiber::petals::{
    critical_orbit_check, fatou_slice, forward_invariance_check, iterate_orbit, repelling_expansion_check,
    vertical_derivative_sum, Grid, OrbitConfig, OrbitRecord, ParabolicLocal, Verdict,
};
use skewfiber::{divisor_table, normalize, reduce_parabolic_tail, NormalForm};

use crate::args::{BrjunoArgs, Construction, CremerArgs, HypothesesArgs, IterationArgs, NormalizeArgs, OrbitArgs, PetalArgs, SliceArgs};
use crate::error::{CliError, CliResult};
use crate::inputs::{self, Map};
use crate::output::{self, OutDir};

/// Results section of the summary plus per-stage residuals.
pub struct Outcome {
    pub results: Value,
    pub residuals: Value,
}

fn orbit_config(it: &IterationArgs, run_to_end: bool) -> CliResult<OrbitConfig<f64>> {
    if it.n_max == 0 || it.confirm == 0 || it.max_period == 0 || !(it.escape > 0.0) || !(it.cycle_tol > 0.0) || !(it.arg_tol > 0.0) {
        return Err(CliError::Usage("iteration limits and tolerances must be positive".into()));
    }
    Ok(OrbitConfig {
        n_max: it.n_max,
        escape_radius: it.escape,
        cycle_tol: it.cycle_tol,
        confirm: it.confirm,
        arg_tol: it.arg_tol,
        max_period: it.max_period,
        run_to_end,
        ..OrbitConfig::default()
    })
}

pub fn verdict(v: &Verdict<f64>) -> Value {
    match v {
        Verdict::Escape | Verdict::Undecided => json!({"kind": v.name()}),
        Verdict::ParabolicPetal { point, direction } => json!({"kind": v.name(), "point": point, "direction": direction}),
        Verdict::AttractingBasin {
            period,
            anchor,
            multiplier_log,
        } => json!({"kind": v.name(), "period": period, "anchor": output::complex(*anchor), "multiplier_log": multiplier_log}),
    }
}

pub fn brjuno(a: &BrjunoArgs, out: &OutDir) -> CliResult<Outcome> {
    let (_, rot) = inputs::rotation(&a.rotation)?;
    let m_max = a.m_max.unwrap_or(1usize << (a.k_max + 1));
    if m_max < 2 {
        return Err(CliError::Usage("m_max must be at least 2".into()));
    }
    let table = divisor_table::<f64>(&rot, m_max)?;
    out.write_with("divisors.csv", |w| table.write_csv(w))?;
    let mut sums = Vec::new();
    for k in 0..=a.k_max {
        if (1usize << (k + 1)) > m_max {
            break;
        }
        sums.push(json!({"k": k, "value": table.brjuno_partial_sum(k)?}));
    }
    let max_error = (1..=m_max).map(|p| table.error_bound(p)).fold(0.0, f64::max);
    Ok(Outcome {
        results: json!({
            "m_max": m_max,
            "frac_bits": rot.frac_bits(),
            "possibly_rational": rot.possibly_rational(),
            "omega_min": table.omega(m_max),
            "brjuno_partial_sums": sums,
            "cremer_running_max": table.cremer_running_max(m_max)?,
        }),
        residuals: json!({"divisor_error_bound": max_error}),
    })
}

fn normal_form_json(nf: &NormalForm<f64>) -> Value {
    json!({
        "k": nf.k,
        "h": nf.h,
        "jet": nf.jet.iter().map(|c| output::complex(*c)).collect::<Vec<_>>(),
        "b": nf.b.map(output::complex),
        "tail_start": nf.tail_start,
        "tail": nf.tail.iter().map(output::series).collect::<Vec<_>>(),
        "jet_z_dependence": nf.jet_z_dependence(),
    })
}

pub fn normalize_cmd(a: &NormalizeArgs, out: &OutDir) -> CliResult<Outcome> {
    let mut spec = inputs::germ_spec(&a.germ)?;
    if let Some(n) = a.trunc_z {
        spec.trunc.z = n;
    }
    if let Some(d) = a.trunc_w {
        spec.trunc.w = d;
    }
    let germ = spec.to_germ::<f64>()?;
    let g0 = germ.fiber_jet();
    let (nf, log) = normalize(&germ, a.depth)?;
    let replay = log.replay(&germ)?.rel_distance(&nf.germ)?;
    let mut report = normal_form_json(&nf);
    report["tail_alignment"] = json!(nf.tail_alignment(&g0));
    report["changes"] = Value::Array(log.changes.iter().map(output::change).collect());
    let mut residuals: Vec<Value> = nf.stages.iter().map(|s| json!({"stage": s.stage, "residual": s.residual})).collect();
    residuals.push(json!({"stage": "replay", "residual": replay}));

    let reduced = if nf.h >= nf.k && 2 * nf.k < germ.degree_w() {
        let (red, changes) = reduce_parabolic_tail(&nf)?;
        let mut all = log.changes.clone();
        all.extend(changes.iter().cloned());
        let replay = skewfiber::series::conjugate_all(&germ, &all)?.rel_distance(&red.germ)?;
        residuals.push(json!({"stage": "parabolic_reduction_replay", "residual": replay}));
        let mut r = normal_form_json(&red);
        r["changes"] = Value::Array(changes.iter().map(output::change).collect());
        r
    } else {
        Value::Null
    };
    report["reduced"] = reduced;
    let normal_germ = serde_json::to_value(skewfiber::GermSpec::from_germ(&nf.germ, spec.rotation.clone())).map_err(|source| CliError::Json {
        context: "normal germ".into(),
        source,
    })?;
    report["germ"] = normal_germ;
    out.write_json("normal_form.json", &report)?;
    Ok(Outcome {
        results: json!({
            "k": nf.k,
            "jet": report["jet"].clone(),
            "b": report["reduced"].get("b").cloned().unwrap_or(Value::Null),
            "jet_z_dependence": nf.jet_z_dependence(),
            "tail_alignment": nf.tail_alignment(&g0),
        }),
        residuals: Value::Array(residuals),
    })
}

pub fn cremer(a: &CremerArgs, out: &OutDir) -> CliResult<Outcome> {
    let (_, rot) = inputs::rotation(&a.rotation)?;
    if a.m_max < 1 {
        return Err(CliError::Usage("m_max must be at least 1".into()));
    }
    let inv = ln_inverse_divisors::<f64>(&rot, a.m_max)?;
    let (phi, bits, min_numerator) = match a.construction {
        Construction::Linear => (linear_example_phi(&rot, inputs::complex(&a.phi0)?, a.m_max)?, None, None),
        Construction::Greedy => {
            let g = greedy_quadratic::<f64>(&rot, a.m_max)?;
            let min = g.numerators.iter().skip(1).map(|n| n.log2_abs().exp2()).fold(f64::INFINITY, f64::min);
            (g.phi, Some(g.bits), Some(min))
        }
    };
    let profile = growth_profile(&phi)?;
    out.write_with("growth.csv", |w| write_growth_csv(w, &profile, bits.as_deref(), &inv))?;
    let at_convergents: Vec<Value> = rot
        .convergent_denominators(a.m_max as u64)
        .into_iter()
        .map(|q| json!({"q": q, "e_q": profile[q as usize - 1].exponent}))
        .collect();
    Ok(Outcome {
        results: json!({
            "construction": a.construction,
            "running_max": profile.last().map(|e| e.running_max),
            "at_convergent_denominators": at_convergents,
            "bits": bits,
        }),
        residuals: json!({"min_numerator": min_numerator}),
    })
}

fn orbit_csv(rec: &OrbitRecord<f64>, sums: &[f64], w: &mut dyn std::io::Write) -> std::io::Result<()> {
    writeln!(w, "n,re_z,im_z,re_w,im_w,log_dg,log_growth")?;
    for (n, (z, p)) in rec.points.iter().enumerate() {
        let (ld, s) = match (rec.log_derivatives.get(n), sums.get(n)) {
            (Some(l), Some(s)) => (format!("{l:?}"), format!("{s:?}")),
            _ => (String::new(), String::new()),
        };
        writeln!(w, "{n},{:?},{:?},{:?},{:?},{ld},{s}", z.re, z.im, p.re, p.im)?;
    }
    Ok(())
}

pub fn orbit(a: &OrbitArgs, out: &OutDir) -> CliResult<Outcome> {
    let map = Map::load(&a.map)?;
    let cfg = orbit_config(&a.iteration, a.run_to_end)?;
    let rec = iterate_orbit(map.as_vertical(), inputs::complex(&a.z0)?, inputs::complex(&a.w0)?, cfg)?;
    let sums = vertical_derivative_sum(&rec).unwrap_or_default();
    out.write_with("orbit.csv", |w| orbit_csv(&rec, &sums, w))?;
    let slope = (!sums.is_empty()).then(|| sums[sums.len() - 1] / sums.len() as f64);
    Ok(Outcome {
        results: json!({
            "verdict": verdict(&rec.verdict),
            "n_stop": rec.n_stop,
            "stop_reason": format!("{:?}", rec.reason),
            "steps": rec.log_derivatives.len(),
            "final_point": rec.points.last().map(|(_, w)| output::complex(*w)),
            "mean_log_derivative": slope,
        }),
        residuals: json!({}),
    })
}

pub fn slice(a: &SliceArgs, out: &OutDir) -> CliResult<Outcome> {
    let map = Map::load(&a.map)?;
    let cfg = orbit_config(&a.iteration, false)?;
    let grid: Grid = a.grid.parse()?;
    let z0 = inputs::complex(&a.z0)?;
    let run = || fatou_slice(map.as_vertical(), z0, grid, cfg);
    let s = match a.threads {
        Some(0) => return Err(CliError::Usage("threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    out.write_with("slice.ppm", |w| s.write_ppm(w))?;
    out.write_with("slice.csv", |w| s.write_csv(w))?;
    let mut counts = std::collections::BTreeMap::new();
    for c in &s.codes {
        *counts.entry(c.to_string()).or_insert(0usize) += 1;
    }
    Ok(Outcome {
        results: json!({
            "pixels": s.codes.len(),
            "code_counts": counts,
            "cycle_anchors": s.cycles.iter().map(|c| output::complex(*c)).collect::<Vec<_>>(),
        }),
        residuals: json!({}),
    })
}

pub fn hypotheses(a: &HypothesesArgs, _out: &OutDir) -> CliResult<Outcome> {
    let map = Map::load(&a.map)?;
    let cfg = orbit_config(&a.iteration, false)?;
    let report = critical_orbit_check(&map.central_fiber(), cfg)?;
    let critical: Vec<Value> = report
        .critical
        .iter()
        .map(|c| {
            json!({
                "point": output::complex(c.point),
                "root_converged": c.converged,
                "verdict": verdict(&c.verdict),
                "n_stop": c.n_stop,
            })
        })
        .collect();
    Ok(Outcome {
        results: json!({"critical_points": critical, "hypotheses_plausible": report.plausible}),
        residuals: json!({}),
    })
}

pub fn petals(a: &PetalArgs, _out: &OutDir) -> CliResult<Outcome> {
    let local = match &a.germ {
        Some(path) => {
            let germ = inputs::germ_spec(path)?.to_germ::<f64>()?;
            let (nf, _) = normalize(&germ, a.depth)?;
            let (red, _) = reduce_parabolic_tail(&nf)?;
            ParabolicLocal::from_normal_form(&red, a.rho, a.eta)?
        }
        None => ParabolicLocal::model(a.k, inputs::complex(&a.b)?, a.rho, a.eta)?,
    };
    let inv = forward_invariance_check(&local, a.z_band, a.samples, a.seed)?;
    let exp = repelling_expansion_check(&local, a.samples, a.seed)?;
    Ok(Outcome {
        results: json!({
            "k": local.k(),
            "b": output::complex(local.b()),
            "invariance": {"samples": inv.samples, "violations": inv.violations, "worst_margin": inv.worst_margin},
            "expansion": {"samples": exp.samples, "violations": exp.violations, "min_derivative": exp.min_derivative},
        }),
        residuals: json!({}),
    })
}

