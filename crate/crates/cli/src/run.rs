//! Subcommand implementations.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use qcorr_core::linalg::eigh_values;
use qcorr_core::measures::DEGENERACY_TOL;
use qcorr_core::*;

type CliResult<T> = std::result::Result<T, AppError>;
type CoreResult<T> = std::result::Result<T, Error>;

use crate::output::{dec12, opt_sig12, sig12};
use crate::{AppError, Command, Format, SamplerArgs, Which};

pub fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Info { spec } => info(&spec),
        Command::Measure {
            spec,
            which,
            sampler,
        } => measure(&spec, which, sampler),
        Command::Sweep {
            spec,
            param,
            from,
            to,
            step,
            out,
            format,
        } => sweep(&spec, &param, from, to, step, &out, format),
        Command::Figure2 {
            trials,
            seed,
            bins,
            out,
            refine,
        } => figure2(trials, seed, bins, &out, refine),
    }
}

fn marginal_degeneracy_label(rho: &DensityMatrix) -> String {
    let vals = eigh_values(&measures::marginal(rho));
    let scale = vals.iter().map(|v| v.abs()).fold(1.0_f64, f64::max);
    let degenerate = vals
        .windows(2)
        .any(|w| (w[0] - w[1]).abs() <= DEGENERACY_TOL * scale);
    if degenerate {
        "degenerate".into()
    } else {
        "non-degenerate".into()
    }
}

fn info(spec_str: &str) -> CliResult<()> {
    let spec = StateSpec::from_str(spec_str)?;
    let rho = spec.build()?;
    let report = rho.validate();
    let bf = decompose(&rho)?;
    let marg_vals = eigh_values(&measures::marginal(&rho));

    let mut out = String::new();
    let _ = writeln!(out, "state: {spec}");
    let _ = writeln!(out, "dims: {}x{}", rho.dim_a(), rho.dim_b());
    let _ = writeln!(out, "hermiticity defect: {}", sig12(report.hermiticity_defect));
    let _ = writeln!(out, "trace defect: {}", sig12(report.trace_defect));
    let _ = writeln!(out, "min eigenvalue: {}", sig12(report.min_eigenvalue));
    let _ = writeln!(
        out,
        "marginal eigenvalues: {}",
        marg_vals
            .iter()
            .map(|v| dec12(*v))
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(out, "marginal: {}", marginal_degeneracy_label(&rho));
    let _ = writeln!(out, "ppt: {}", is_ppt(&rho));
    let _ = writeln!(out, "negativity: {}", sig12(negativity(&rho)));
    let _ = writeln!(
        out,
        "bloch norms: |x| {}, |y| {}, |T| {}",
        dec12(bf.x_norm_sq().sqrt()),
        dec12(bf.y_norm_sq().sqrt()),
        dec12(bf.t_norm_sq().sqrt())
    );
    print!("{out}");
    Ok(())
}

/// The exact-GD route that applies to this state, if any: a closed form,
/// the saturated 2⊗n bound, the 3⊗3 candidate projectors, or a known
/// optimal measurement certified by saturating the lower bound.
fn gd_exact_estimate(rho: &DensityMatrix, spec: &StateSpec) -> CoreResult<Option<MeasureEstimate>> {
    if let Some((gd, _)) = closed_forms(spec)? {
        return Ok(Some(gd));
    }
    match rho.dim_a() {
        2 => Ok(Some(gd_exact_2xn(rho)?)),
        3 => {
            if let Some(est) = gd_candidate_3x3(rho)? {
                return Ok(Some(est));
            }
            if let Some(witness) = known_gd_witness(spec.family) {
                let value = normalized_distance(rho, &witness)?;
                let lower = gd_lower_bound(rho)?.value;
                if (value - lower).abs() <= 1e-9 {
                    return Ok(Some(
                        MeasureEstimate::new(lower, EstimateKind::Exact).with_witness(witness),
                    ));
                }
            }
            Ok(None)
        }
        _ => Ok(None),
    }
}

/// Hand-found optimal GD measurements for families where the generic
/// candidate construction fails. Only trusted after the saturation check.
fn known_gd_witness(family: StateFamily) -> Option<Measurement> {
    use nalgebra::DVector;
    use qcorr_core::linalg::cx;
    match family {
        StateFamily::Pyramid => {
            let p1 = DVector::from_vec(vec![
                cx(3f64.sqrt(), 0.0),
                cx(1.0, 0.0),
                cx(2f64.sqrt(), 0.0),
            ]) / cx(6f64.sqrt(), 0.0);
            let p2 = DVector::from_vec(vec![cx(0.0, 0.0), cx(-(2f64.sqrt()), 0.0), cx(1.0, 0.0)])
                / cx(3f64.sqrt(), 0.0);
            Some(Measurement::from_kets(&[p1, p2]).expect("fixed kets form a measurement"))
        }
        _ => None,
    }
}

/// The exact-MIN route that applies to this state, if any.
fn min_exact_estimate(rho: &DensityMatrix, spec: &StateSpec) -> CoreResult<Option<MeasureEstimate>> {
    if let Some((_, min)) = closed_forms(spec)? {
        return Ok(Some(min));
    }
    match min_exact_nondegenerate(rho) {
        Ok(est) => Ok(Some(est)),
        Err(Error::DegenerateMarginal { .. }) => match min_exact_2d_block(rho) {
            Ok(est) => Ok(Some(est)),
            Err(Error::DegeneracyPattern { .. }) => Ok(None),
            Err(e) => Err(e),
        },
        Err(e) => Err(e),
    }
}

fn measure(spec_str: &str, which: Which, sampler: SamplerArgs) -> CliResult<()> {
    let spec = StateSpec::from_str(spec_str)?;
    let rho = spec.build()?;
    let closed = closed_forms(&spec)?;

    let mut out = String::new();
    let _ = writeln!(out, "state: {spec}");
    let _ = writeln!(out, "dims: {}x{}", rho.dim_a(), rho.dim_b());

    let sampled_note = |cfg: &SamplerConfig| {
        format!(
            " [trials={}, seed={}, refine={}]",
            cfg.trials,
            cfg.seed,
            if cfg.refine { "on" } else { "off" }
        )
    };

    if which != Which::Min {
        if let Some((gd_cf, _)) = &closed {
            let _ = writeln!(out, "gd closed-form ({}): {}", gd_cf.kind, dec12(gd_cf.clamped_value()));
        } else {
            let _ = writeln!(out, "gd closed-form: none");
        }
        let lower = gd_lower_bound(&rho)?;
        let _ = writeln!(out, "gd {}: {}", lower.kind, dec12(lower.clamped_value()));
        if spec.family == StateFamily::Horodecki3x3 {
            let tv = normalized_distance(&rho, &beta_trial_measurement())?;
            let _ = writeln!(
                out,
                "gd {} (trial measurement): {}",
                EstimateKind::UpperBound,
                dec12(tv)
            );
        }
        match gd_exact_estimate(&rho, &spec)? {
            Some(est) => {
                let _ = writeln!(out, "gd {}: {}", est.kind, dec12(est.clamped_value()));
            }
            None => {
                let _ = writeln!(out, "gd exact: none");
            }
        }
        if let Some(trials) = sampler.trials {
            let cfg = SamplerConfig::new(trials, sampler.seed).with_refine(sampler.refine);
            let report = sample_gd(&rho, &cfg)?;
            let _ = writeln!(
                out,
                "gd sampled: {}{}",
                dec12(report.best_value),
                sampled_note(&cfg)
            );
        }
    }

    if which != Which::Gd {
        if let Some((_, min_cf)) = &closed {
            let _ = writeln!(out, "min closed-form ({}): {}", min_cf.kind, dec12(min_cf.clamped_value()));
        } else {
            let _ = writeln!(out, "min closed-form: none");
        }
        let upper = min_upper_bound(&rho)?;
        let _ = writeln!(out, "min {}: {}", upper.kind, dec12(upper.clamped_value()));
        match min_exact_estimate(&rho, &spec)? {
            Some(est) => {
                let _ = writeln!(out, "min {}: {}", est.kind, dec12(est.clamped_value()));
            }
            None => {
                let _ = writeln!(out, "min exact: none");
            }
        }
        if let Some(trials) = sampler.trials {
            let cfg = SamplerConfig::new(trials, sampler.seed).with_refine(sampler.refine);
            let report = sample_min(&rho, &cfg)?;
            let _ = writeln!(
                out,
                "min sampled: {}{}",
                dec12(report.best_value),
                sampled_note(&cfg)
            );
        }
    }

    print!("{out}");
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    param: f64,
    gd_lower: Option<f64>,
    gd_exact: Option<f64>,
    gd_trial_upper: Option<f64>,
    min_upper: Option<f64>,
    min_exact: Option<f64>,
    negativity: f64,
    ppt: bool,
    regime: Option<String>,
}

fn grid(from: f64, to: f64, step: f64) -> CoreResult<Vec<f64>> {
    let well_formed =
        step > 0.0 && from <= to && step.is_finite() && from.is_finite() && to.is_finite();
    if !well_formed {
        return Err(Error::Parse {
            token: format!("from={from} to={to} step={step}"),
            reason: "sweep needs step > 0 and from <= to".into(),
        });
    }
    let ratio = (to - from) / step;
    let exact_multiple = (ratio - ratio.round()).abs() < 1e-9;
    let n = if exact_multiple {
        ratio.round() as usize
    } else {
        ratio.floor() as usize
    };
    Ok((0..=n)
        .map(|k| {
            if k == n && exact_multiple {
                to
            } else {
                from + k as f64 * step
            }
        })
        .collect())
}

/// The fixed 3⊗3 trial measurement whose value upper-bounds GD for ρ_β.
fn beta_trial_measurement() -> Measurement {
    use nalgebra::DVector;
    use qcorr_core::linalg::cx;
    let p1 = DVector::from_vec(vec![cx(1.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0)]) / cx(3f64.sqrt(), 0.0);
    let p2 = DVector::from_vec(vec![cx(1.0, 0.0), cx(1.0, 0.0), cx(-2.0, 0.0)]) / cx(6f64.sqrt(), 0.0);
    Measurement::from_kets(&[p1, p2]).expect("fixed kets form a measurement")
}

fn sweep(
    spec_str: &str,
    param: &str,
    from: f64,
    to: f64,
    step: f64,
    out_path: &str,
    format: Format,
) -> CliResult<()> {
    let base = StateSpec::from_str(spec_str)?;
    if !base.family.param_names().contains(&param) {
        return Err(Error::Parse {
            token: param.to_string(),
            reason: format!("not a parameter of {}", base.family),
        }
        .into());
    }

    let trial = beta_trial_measurement();
    let mut rows = Vec::new();
    for value in grid(from, to, step)? {
        let spec = base.clone().with_param(param, value);
        let rho = spec.build()?;
        let gd_trial_upper = if spec.family == StateFamily::Horodecki3x3 {
            Some(normalized_distance(&rho, &trial)?)
        } else {
            None
        };
        let regime = if spec.family == StateFamily::Horodecki3x3 {
            Some(classify_horodecki_3x3(value)?.label().to_string())
        } else {
            None
        };
        rows.push(SweepRow {
            param: value,
            gd_lower: Some(gd_lower_bound(&rho)?.value),
            gd_exact: gd_exact_estimate(&rho, &spec)?.map(|e| e.value),
            gd_trial_upper,
            min_upper: Some(min_upper_bound(&rho)?.value),
            min_exact: min_exact_estimate(&rho, &spec)?.map(|e| e.value),
            negativity: negativity(&rho),
            ppt: is_ppt(&rho),
            regime,
        });
    }

    let content = match format {
        Format::Csv => {
            let mut s = String::from(
                "param,gd_lower,gd_exact,gd_trial_upper,min_upper,min_exact,negativity,ppt,regime\n",
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    sig12(r.param),
                    opt_sig12(r.gd_lower),
                    opt_sig12(r.gd_exact),
                    opt_sig12(r.gd_trial_upper),
                    opt_sig12(r.min_upper),
                    opt_sig12(r.min_exact),
                    sig12(r.negativity),
                    r.ppt,
                    r.regime.as_deref().unwrap_or("")
                );
            }
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
            s.push('\n');
            s
        }
    };
    std::fs::write(out_path, content)?;
    Ok(())
}

fn figure2(trials: usize, seed: u64, bins: usize, out_path: &str, refine: bool) -> CliResult<()> {
    let rho = upb_tiles();
    let bound = gd_lower_bound(&rho)?.value;
    let cfg = SamplerConfig::new(trials, seed).with_refine(refine);
    let report = sample_gd(&rho, &cfg)?;
    let hist = report.histogram(bins)?;

    let mut s = String::from("bin_lower,count\n");
    for (lower, count) in &hist {
        let _ = writeln!(s, "{},{count}", sig12(*lower));
    }
    let _ = writeln!(
        s,
        "# gd_lower_bound={} best_sampled={}",
        sig12(bound),
        sig12(report.best_value)
    );
    std::fs::write(out_path, s)?;
    Ok(())
}
