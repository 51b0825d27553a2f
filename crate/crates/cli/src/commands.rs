use std::io::Write;

use compsize::asymptotics::fit::fit_window;
use compsize::asymptotics::{eta_exponent, ln_intermediate_asymptote, switch_point, AsymptoteModel, Case};
use compsize::degree::edge_density_class;
use compsize::io;
use compsize::{component_sizes, ensemble_estimate, ClosedForm, DegreeDistribution, Error, Family};
use serde_json::{json, Map, Value};

use crate::input::InputArgs;
use crate::{CliResult, Command, Common, Failure, Format, McArgs, OutputArgs, Reference};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Compute(c) => compute(&c),
        Command::ClosedForm { common, as_printed } => closed_form(&common, as_printed),
        Command::Asymptote(c) => asymptote(&c),
        Command::Classify(c) => classify(&c),
        Command::Compare { common, reference, reference_file, mc } => {
            compare(&common, reference, reference_file.as_deref(), &mc)
        }
        Command::Sample { input, mc, output } => sample(&input, &mc, &output),
        Command::Giant(c) => giant(&c),
    }
}

fn emit(
    output: &OutputArgs,
    default: Format,
    csv: impl FnOnce() -> String,
    json: impl FnOnce() -> Value,
) -> CliResult<()> {
    let text = match output.format.unwrap_or(default) {
        Format::Csv => csv(),
        Format::Json => {
            let mut s = json().to_string();
            s.push('\n');
            s
        }
    };
    match &output.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            if !output.quiet {
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::io(e.to_string()))?;
        }
    }
    Ok(())
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn fmt_num(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:?}")
    }
}

fn check_horizon(n: usize) -> CliResult<()> {
    if n < 1 {
        return Err(Error::InvalidParameter("horizon N must be >= 1".into()).into());
    }
    Ok(())
}

/// Turns an unclassifiable distribution into exit code 3 plus the density report.
fn model_or_report(d: &DegreeDistribution, horizon: usize) -> CliResult<AsymptoteModel> {
    match AsymptoteModel::of(d) {
        Ok(m) => Ok(m),
        Err(e @ Error::Unclassifiable { beta, .. }) => {
            let mut failure = Failure::from(e);
            let nodes = horizon.max(2);
            failure.report = edge_density_class(beta, nodes).ok().map(|r| json!({ "density": r }));
            Err(failure)
        }
        Err(e) => Err(e.into()),
    }
}

fn compute(c: &Common) -> CliResult<()> {
    check_horizon(c.horizon)?;
    let d = c.input.load(c.horizon)?;
    let r = component_sizes(&d, c.horizon)?;
    emit(
        &c.output,
        Format::Csv,
        || io::sizes_to_csv(&d, &r),
        || serde_json::from_str(&io::sizes_to_json(&d, &r)).expect("valid json"),
    )
}

fn closed_form_of(input: &InputArgs, as_printed: bool) -> CliResult<ClosedForm> {
    let family = input.family(0)?.ok_or(Error::MissingParameter("--family"))?;
    Ok(match family {
        Family::Exponential { lambda } => ClosedForm::Exponential { lambda },
        Family::Geometric { p } => ClosedForm::Geometric { p },
        Family::Binomial { k_max, c } if as_printed => ClosedForm::BinomialAsPrinted { k_max, c },
        Family::Binomial { k_max, c } => ClosedForm::Binomial { k_max, c },
        other => return Err(Error::InvalidParameter(format!("no closed form for the {} family", other.name())).into()),
    })
}

fn closed_form(c: &Common, as_printed: bool) -> CliResult<()> {
    check_horizon(c.horizon)?;
    let form = closed_form_of(&c.input, as_printed)?;
    let rows: Vec<(usize, f64)> =
        (2..=c.horizon.max(2)).map(|n| Ok((n, form.ln_value(n)?))).collect::<Result<_, Error>>()?;
    let lin = |l: f64| if l == f64::NEG_INFINITY { 0.0 } else { l.exp() };
    emit(
        &c.output,
        Format::Csv,
        || {
            let mut s = format!(
                "# compsize closed form {}\n# form: {}\nn,w,log_w\n",
                io::CSV_VERSION,
                serde_json::to_string(&form).expect("serializable")
            );
            for &(n, l) in &rows {
                s.push_str(&format!("{n},{},{}\n", fmt_num(lin(l)), fmt_num(l)));
            }
            s
        },
        || {
            json!({
                "form": form,
                "n": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
                "w": rows.iter().map(|r| num(lin(r.1))).collect::<Vec<_>>(),
                "log_w": rows.iter().map(|r| num(r.1)).collect::<Vec<_>>(),
            })
        },
    )
}

/// Extra facts about a model: the tail exponent and, for `alpha <= 1`, the transient.
fn model_extras(d: &DegreeDistribution, model: &AsymptoteModel) -> Vec<(&'static str, Value)> {
    let mut extra = Vec::new();
    if let Some(t) = d.tail() {
        if let Ok(eta) = eta_exponent(t.beta(), model.branch()) {
            extra.push(("eta", eta.map_or(Value::Null, num)));
        }
        if matches!(model.case(), Case::E | Case::F) {
            let alpha = t.alpha().min(1.0);
            let alpha = if model.case() == Case::E { 1.0 } else { alpha };
            let exponent = if alpha == 1.0 { -2.0 } else { -alpha - 1.0 };
            let n0 = switch_point(alpha, t.scale()).map(num).unwrap_or(Value::Null);
            extra.push(("intermediate", json!({ "exponent": exponent, "n0": n0 })));
        }
    }
    extra
}

fn asymptote(c: &Common) -> CliResult<()> {
    check_horizon(c.horizon)?;
    let d = c.input.load(c.horizon)?;
    let model = model_or_report(&d, c.horizon)?;
    let extra = model_extras(&d, &model);
    let from = 2.min(c.horizon);
    let mu1 = d.moments().mu1;
    let transient = d
        .tail()
        .filter(|_| matches!(model.case(), Case::E | Case::F))
        .map(|t| (if model.case() == Case::E { 1.0 } else { t.alpha() }, t.scale()));
    emit(
        &c.output,
        Format::Json,
        || {
            let mut s = String::new();
            for (k, v) in io::asymptote_to_json(&model, &extra).as_object().unwrap() {
                if k != "case" && k != "branch" {
                    s.push_str(&format!("# {k}: {v}\n"));
                }
            }
            let series = io::asymptote_series_csv(&model, from, c.horizon);
            let (head, body) = series.split_at(series.find("n,").unwrap());
            format!("{head}{s}{body}")
        },
        || {
            let mut obj = io::asymptote_to_json(&model, &extra);
            let ns: Vec<usize> = (from..=c.horizon).collect();
            let ln: Vec<f64> = ns.iter().map(|&n| model.ln_eval(n as f64)).collect();
            let mut series = Map::new();
            series.insert("n".into(), json!(ns));
            series.insert("asymptote".into(), ln.iter().map(|&l| num(l.exp())).collect());
            series.insert("log_asymptote".into(), ln.iter().map(|&l| num(l)).collect());
            if let Some((alpha, s)) = transient {
                let t: Vec<Value> = ns
                    .iter()
                    .map(|&n| ln_intermediate_asymptote(alpha, s, mu1, n as f64).map(num).unwrap_or(Value::Null))
                    .collect();
                series.insert("log_intermediate".into(), Value::Array(t));
            }
            obj.as_object_mut().unwrap().insert("series".into(), Value::Object(series));
            obj
        },
    )
}

fn classify(c: &Common) -> CliResult<()> {
    let d = c.input.load(c.horizon)?;
    let m = d.moments();
    let model = model_or_report(&d, c.horizon)?;
    let mut obj = json!({
        "label": d.label(),
        "mu1": num(m.mu1),
        "mu2": num(m.mu2),
        "mu3": num(m.mu3),
        "theta": num(m.theta),
        "mu2_finite": m.mu2_finite,
        "mu3_finite": m.mu3_finite,
        "case": model.case().to_string(),
        "branch": model.branch().to_string(),
        "truncated_mass": num(d.truncated_mass()),
    });
    let map = obj.as_object_mut().unwrap();
    if let Some(t) = d.tail() {
        map.insert("tail".into(), json!({"s": num(t.scale()), "beta": num(t.beta()), "alpha": num(t.alpha())}));
        if let Ok(r) = edge_density_class(t.beta(), c.horizon.max(2)) {
            map.insert("density".into(), json!(r));
        }
    }
    for (k, v) in model_extras(&d, &model) {
        map.insert(k.into(), v);
    }
    emit(&c.output, Format::Json, || format!("{obj}\n"), || obj.clone())
}

struct Comparison {
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
    summary: Vec<(&'static str, Value)>,
}

fn compare(c: &Common, reference: Reference, reference_file: Option<&std::path::Path>, mc: &McArgs) -> CliResult<()> {
    check_horizon(c.horizon)?;
    let d = c.input.load(c.horizon)?;
    let r = component_sizes(&d, c.horizon)?;
    let rel = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() / b.abs().max(a.abs()) };
    let mut cmp = match reference {
        Reference::ClosedForm => {
            let form = closed_form_of(&c.input, false)?;
            let mut rows = Vec::new();
            let mut max_dev: f64 = 0.0;
            for n in 2..=c.horizon {
                let exact = form.ln_value(n)?;
                let w = r.ln_w(n);
                // compare where the reference is representable well above underflow
                if exact > -667.0 {
                    max_dev = max_dev.max(rel(w.exp(), exact.exp()));
                }
                rows.push(vec![n as f64, r.w(n), exact.exp(), (w - exact).exp()]);
            }
            Comparison {
                columns: vec!["n", "w", "closed_form", "ratio"],
                rows,
                summary: vec![("max_rel_dev", num(max_dev))],
            }
        }
        Reference::Asymptote => {
            let model = model_or_report(&d, c.horizon)?;
            let rows: Vec<Vec<f64>> = (2..=c.horizon)
                .map(|n| {
                    let a = model.ln_eval(n as f64);
                    vec![n as f64, r.w(n), a.exp(), (r.ln_w(n) - a).exp()]
                })
                .collect();
            let last = rows.last().map_or(f64::NAN, |row| row[3]);
            Comparison {
                columns: vec!["n", "w", "asymptote", "ratio"],
                rows,
                summary: vec![
                    ("case", json!(model.case().to_string())),
                    ("branch", json!(model.branch().to_string())),
                    ("ratio_at_N", num(last)),
                ],
            }
        }
        Reference::MonteCarlo => {
            let e = ensemble_estimate(&d, mc.nodes, mc.replicas, mc.seed)?;
            let mut max_z: f64 = 0.0;
            let rows: Vec<Vec<f64>> = (1..=c.horizon)
                .map(|n| {
                    let (m, se) = e.at(n);
                    let z = if se > 0.0 {
                        (m - r.w(n)) / se
                    } else if m == r.w(n) {
                        0.0
                    } else {
                        f64::INFINITY
                    };
                    max_z = max_z.max(z.abs());
                    vec![n as f64, r.w(n), m, se, z]
                })
                .collect();
            Comparison {
                columns: vec!["n", "w", "w_hat", "se", "z"],
                rows,
                summary: vec![
                    ("nodes", json!(mc.nodes)),
                    ("replicas", json!(mc.replicas)),
                    ("seed", json!(mc.seed)),
                    ("max_abs_z", num(max_z)),
                    ("within_3se", json!(max_z <= 3.0)),
                    ("giant_hat", num(e.giant_hat)),
                    ("giant_se", num(e.giant_se)),
                ],
            }
        }
        Reference::File => {
            let path = reference_file.ok_or(Error::MissingParameter("--reference-file"))?;
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            let previous = io::parse_sizes_json(&text)?;
            let mut identical = true;
            let mut max_dev: f64 = 0.0;
            let mut rows = Vec::new();
            for (n, w, l) in previous {
                if n == 0 || n > r.n_max() {
                    return Err(Error::Parse(format!("reference n={n} outside 1..={}", r.n_max())).into());
                }
                identical &= w.to_bits() == r.w(n).to_bits() && l.to_bits() == r.ln_w(n).to_bits();
                max_dev = max_dev.max(rel(r.w(n), w));
                rows.push(vec![n as f64, r.w(n), w]);
            }
            Comparison {
                columns: vec!["n", "w", "reference"],
                rows,
                summary: vec![("max_rel_dev", num(max_dev)), ("identical", json!(identical))],
            }
        }
    };
    if let Some(w) = &c.window {
        let fit = fit_window(r.log_values(), w[0], w[1])?;
        cmp.summary.push(("window", json!([w[0], w[1]])));
        cmp.summary.push(("slope", num(fit.slope)));
        cmp.summary.push(("slope_ci95", num(fit.ci95)));
        cmp.summary.push(("slope_stderr", num(fit.stderr)));
    }
    emit(
        &c.output,
        Format::Csv,
        || {
            let mut s = format!("# compsize compare {}\n", io::CSV_VERSION);
            for (k, v) in &cmp.summary {
                s.push_str(&format!("# {k}: {v}\n"));
            }
            s.push_str(&cmp.columns.join(","));
            s.push('\n');
            for row in &cmp.rows {
                let cells: Vec<String> = row
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| if i == 0 { format!("{}", x as usize) } else { fmt_num(x) })
                    .collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        },
        || {
            let mut obj = Map::new();
            for (i, name) in cmp.columns.iter().enumerate() {
                let col: Vec<Value> =
                    cmp.rows.iter().map(|row| if i == 0 { json!(row[0] as usize) } else { num(row[i]) }).collect();
                obj.insert(name.to_string(), Value::Array(col));
            }
            let summary: Map<String, Value> = cmp.summary.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            json!({ "rows": obj, "summary": summary })
        },
    )
}

fn sample(input: &InputArgs, mc: &McArgs, output: &OutputArgs) -> CliResult<()> {
    let d = input.load(mc.nodes)?;
    let e = ensemble_estimate(&d, mc.nodes, mc.replicas, mc.seed)?;
    emit(
        output,
        Format::Json,
        || {
            let mut s = format!(
                "# compsize ensemble {}\n# N: {}\n# R: {}\n# seed: {}\n# giant_hat: {:?}\n# giant_se: {:?}\n# fixups: {}\nn,w_hat,se\n",
                io::CSV_VERSION,
                e.node_count,
                e.replicas,
                e.seed,
                e.giant_hat,
                e.giant_se,
                e.fixups
            );
            for &(n, v, se) in &e.w_hat {
                s.push_str(&format!("{n},{v:?},{se:?}\n"));
            }
            s
        },
        || io::ensemble_to_json(&e),
    )
}

fn giant(c: &Common) -> CliResult<()> {
    check_horizon(c.horizon)?;
    let d = c.input.load(c.horizon)?;
    let model = model_or_report(&d, c.horizon)?;
    let r = component_sizes(&d, c.horizon)?;
    let giant = match r.giant_fraction_estimate() {
        Some(g) => g,
        // surfaces the reason the tail could not be summed
        None => compsize::size_dist::giant_fraction(&d, c.horizon, &model)?,
    };
    let m = d.moments();
    let obj = json!({
        "label": d.label(),
        "N": c.horizon,
        "theta": num(m.theta),
        "branch": model.branch().to_string(),
        "finite_mass": num(r.finite_mass()),
        "tail_correction": r.tail_correction().map_or(Value::Null, num),
        "giant_fraction": num(giant),
    });
    emit(&c.output, Format::Json, || format!("{obj}\n"), || obj.clone())
}
