//! Batch front end: spec parsing, command dispatch, JSON reports and CSV curves.

pub mod spec;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::channels::{covariance_residual, validate_cptp, weyl_group_pairs, ChannelFamily, FamilyKind, DEFAULT_TOL};
use crate::comparison::{dominance_check, gap_curve, uniform_grid};
use crate::entanglement::{entanglement_breaking_gp, gp_params_of, ppt_min_eigenvalue, separable_suffices};
use crate::geometry::{ang_nonempty, ang_parallel_property, ang_sample, ang_solve_triangle, samples_to_csv};
use crate::numerics::random::random_state;
use crate::numerics::{eigvalsh, kron_vec, max_entangled, permute_vector, CMatrix, SystemShape};
use crate::optimal_inputs::{
    group_correction_protocol, measurement_input_certify, unital_qubit_protocol, IrrepBlocks, PureState,
};
use crate::repetition::{
    adaptive_vs_identical, fresh_swap_strategy, identical_matches_sequential, identity_rewire,
    random_unitary_interleaver, repeated_output, AdaptivePlan, Strategy,
};

pub use spec::{parse, preset, SpecDocument, PRESETS};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Compare,
    Certify,
    EntAdvantage,
    Sweep,
    Ang,
    Repeat,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Compare => "compare",
            Command::Certify => "certify",
            Command::EntAdvantage => "ent-advantage",
            Command::Sweep => "sweep",
            Command::Ang => "ang",
            Command::Repeat => "repeat",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
}

/// A finished run: the JSON report plus any CSV payload.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub csv: Option<String>,
    /// Set when the report records a failed validation (exit 3).
    pub failed: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, csv: None, failed: false }
    }
}

/// Loads a spec from a path or `preset:<name>`.
pub fn load_spec(arg: &str) -> Result<SpecDocument, CliError> {
    if let Some(name) = arg.strip_prefix("preset:") {
        let text = preset(name).ok_or_else(|| CliError::Parse(format!("unknown preset {:?}", name)))?;
        return parse(text);
    }
    let text = std::fs::read_to_string(arg).map_err(|e| CliError::Io(format!("{}: {}", arg, e)))?;
    parse(&text)
}

/// Rounds every float to 12 significant digits; object keys are already sorted.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            let r: f64 = format!("{:.11e}", x).parse().unwrap_or(x);
            json!(r)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canonical(v))).collect()),
        other => other,
    }
}

pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonical(report.clone())).expect("serializable");
    s.push('\n');
    s
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn need<T>(x: Option<T>, what: &str) -> Result<T, CliError> {
    x.ok_or_else(|| CliError::Parse(format!("missing {}", what)))
}

fn need_seed(opts: &Options, cmd: Command) -> Result<u64, CliError> {
    need(opts.seed, &format!("--seed (required by {})", cmd.name()))
}

fn label_index(fam: &ChannelFamily, label: &str) -> Result<usize, CliError> {
    fam.members()
        .iter()
        .position(|m| m.label == label)
        .ok_or_else(|| CliError::Parse(format!("no member labelled {:?}", label)))
}

pub fn run(cmd: Command, doc: &SpecDocument, opts: &Options) -> Result<Outcome, CliError> {
    let mut out = match cmd {
        Command::Validate => validate(doc, opts),
        Command::Compare => compare(doc, opts),
        Command::Certify => certify(doc, opts),
        Command::EntAdvantage => ent_advantage(doc),
        Command::Sweep => sweep(doc, opts),
        Command::Ang => ang(doc, opts),
        Command::Repeat => repeat(doc, opts),
    }?;
    if let Value::Object(m) = &mut out.report {
        m.insert("command".into(), json!(cmd.name()));
    }
    out.report = canonical(out.report);
    Ok(out)
}

/// Runs and writes `<out>/<report>` and, when present, `<out>/<csv>`.
pub fn run_to_dir(cmd: Command, doc: &SpecDocument, opts: &Options, out: &Path) -> Result<(Outcome, Vec<PathBuf>), CliError> {
    let outcome = run(cmd, doc, opts)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {}", out.display(), e)))?;
    let mut written = Vec::new();
    let report_name = doc.outputs.report.clone().unwrap_or_else(|| format!("{}.json", cmd.name()));
    let path = out.join(report_name);
    std::fs::write(&path, render(&outcome.report)).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e)))?;
    written.push(path);
    if let Some(csv) = &outcome.csv {
        let name = doc.outputs.csv.clone().unwrap_or_else(|| format!("{}.csv", cmd.name()));
        let path = out.join(name);
        std::fs::write(&path, csv).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e)))?;
        written.push(path);
    }
    Ok((outcome, written))
}

fn validate(doc: &SpecDocument, opts: &Options) -> Result<Outcome, CliError> {
    let fam = doc.family()?;
    let tol = opts.tol.unwrap_or(DEFAULT_TOL);
    let members: Vec<Value> = fam
        .members()
        .iter()
        .map(|m| {
            let r = validate_cptp(&m.channel, tol);
            json!({
                "label": m.label,
                "valid": r.valid(),
                "cp": r.cp,
                "trace_preserving": r.trace_preserving,
                "min_choi_eig": r.min_choi_eig,
                "tp_residual": r.tp_residual,
            })
        })
        .collect();
    let all_valid = members.iter().all(|m| m["valid"] == json!(true));
    let mut report = json!({
        "family": doc.family.as_ref().map(|f| f.kind_name()),
        "din": fam.din(),
        "dout": fam.dout(),
        "members": members,
        "all_valid": all_valid,
    });
    if fam.din() == fam.dout() {
        let res = covariance_residual(&fam, &weyl_group_pairs(fam.din()), false)?;
        report["weyl_covariance"] = json!({ "residual": res, "covariant": res <= 1e-8 });
    }
    for (name, psi) in doc.all_inputs(fam.din())? {
        report["inputs"][name] = json!({ "dims": psi.shape.dims() });
    }
    Ok(Outcome { report, csv: None, failed: !all_valid })
}

fn compare(doc: &SpecDocument, opts: &Options) -> Result<Outcome, CliError> {
    let fam = doc.family()?;
    let a = need(doc.analysis.candidate.as_deref(), "analysis.candidate")?;
    let b = need(doc.analysis.challenger.as_deref(), "analysis.challenger")?;
    let ca = doc.input(a, fam.din())?.outputs(&fam)?;
    let cb = doc.input(b, fam.din())?.outputs(&fam)?;
    let grid = opts.grid.map(|n| uniform_grid(doc.analysis.s_max.unwrap_or(3.0), n));
    let v = dominance_check(&ca, &cb, grid.as_deref(), opts.tol.unwrap_or(1e-9))?;
    Ok(Outcome::ok(json!({ "candidate": a, "challenger": b, "verdict": to_value(&v) })))
}

fn certify(doc: &SpecDocument, opts: &Options) -> Result<Outcome, CliError> {
    let fam = doc.family()?;
    let tol = opts.tol.unwrap_or(1e-9);
    let protocol = need(doc.analysis.protocol.as_deref(), "analysis.protocol")?;
    let certs = match protocol {
        "group-correction" => {
            let name = need(doc.analysis.input.as_deref(), "analysis.input (target)")?;
            let target = doc.input(name, fam.din())?.density();
            let group = weyl_group_pairs(fam.din());
            group_correction_protocol(&fam, &group, &IrrepBlocks::single(fam.din()), &target, false)?
        }
        "unital-qubit" => {
            let p = doc.analysis.p.unwrap_or(0.5);
            let v = match &doc.analysis.v {
                Some(m) => spec::matrix(m, "analysis.v")?,
                None => CMatrix::identity(2),
            };
            unital_qubit_protocol(&fam, (p, 1.0 - p), &v)?
        }
        "measurement" => {
            let name = need(doc.analysis.input.as_deref(), "analysis.input")?;
            let v = measurement_input_certify(&fam, &doc.input(name, fam.din())?)?;
            return Ok(Outcome::ok(json!({ "protocol": protocol, "input": name, "verdict": to_value(&v) })));
        }
        other => return Err(CliError::Parse(format!("unknown protocol {:?}", other))),
    };
    let members: Vec<Value> = certs
        .iter()
        .map(|c| json!({ "label": c.label, "residual": c.residual, "success_prob": c.success_prob }))
        .collect();
    let passed = certs.iter().all(|c| c.residual <= tol);
    Ok(Outcome::ok(json!({ "protocol": protocol, "members": members, "passed": passed, "tol": tol })))
}

fn ent_advantage(doc: &SpecDocument) -> Result<Outcome, CliError> {
    let fam = doc.family()?;
    let rep = separable_suffices(&fam)?;
    let params = gp_params_of(&fam)?;
    let eb: Vec<Value> = fam
        .members()
        .iter()
        .zip(&params)
        .map(|(m, p)| {
            Ok(json!({
                "label": m.label,
                "entanglement_breaking": entanglement_breaking_gp(p),
                "ppt_min_eig": ppt_min_eigenvalue(&m.channel)?,
            }))
        })
        .collect::<Result<_, crate::Error>>()?;
    let mut report = to_value(&rep);
    report["members"] = Value::Array(eb);
    Ok(Outcome::ok(report))
}

fn sweep(doc: &SpecDocument, opts: &Options) -> Result<Outcome, CliError> {
    let fam = doc.family()?;
    let grid = uniform_grid(doc.analysis.s_max.unwrap_or(3.0), opts.grid.unwrap_or(301));
    let names: Vec<String> = if doc.analysis.sweep_inputs.is_empty() {
        doc.inputs.keys().cloned().collect()
    } else {
        doc.analysis.sweep_inputs.clone()
    };
    if names.is_empty() {
        return Err(CliError::Parse("sweep needs at least one input".into()));
    }
    let pairs: Vec<(usize, usize)> = if doc.analysis.pairs.is_empty() {
        let n = fam.len();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    } else {
        doc.analysis
            .pairs
            .iter()
            .map(|[a, b]| Ok((label_index(&fam, a)?, label_index(&fam, b)?)))
            .collect::<Result<_, CliError>>()?
    };
    let mut csv = String::from("plus,minus,input,s,norm,is_breakpoint\n");
    let mut curves = Vec::new();
    for name in &names {
        let outs = doc.input(name, fam.din())?.outputs(&fam)?;
        for &(i, j) in &pairs {
            let c = gap_curve(&outs[i], &outs[j], Some(&grid))?;
            let (pl, mi) = (&fam.members()[i].label, &fam.members()[j].label);
            for ((s, n), b) in c.s_values.iter().zip(&c.norms).zip(&c.is_breakpoint) {
                let _ = writeln!(csv, "{},{},{},{},{},{}", pl, mi, name, s, n, b);
            }
            curves.push(json!({
                "plus": pl,
                "minus": mi,
                "input": name,
                "points": c.len(),
                "exact": c.exact,
                "breakpoints": c.breakpoints,
            }));
        }
    }
    Ok(Outcome { report: json!({ "curves": curves, "grid_points": grid.len() }), csv: Some(csv), failed: false })
}

fn ang(doc: &SpecDocument, opts: &Options) -> Result<Outcome, CliError> {
    let spec = need(doc.analysis.ang.as_ref(), "analysis.ang")?;
    let x = &spec.x;
    let nonempty = ang_nonempty(x).map_err(|e| CliError::Parse(format!("analysis.ang.x: {}", e)))?;
    let mut report = json!({ "x": x, "nonempty": nonempty });
    if x.len() == 3 {
        let sols: Vec<Value> = ang_solve_triangle(x)?
            .iter()
            .map(|a| json!(a.omegas.iter().map(|w| [w.re, w.im]).collect::<Vec<_>>()))
            .collect();
        report["triangle_solutions"] = Value::Array(sols);
    }
    let mut csv = None;
    let strict = nonempty && crate::geometry::polygon_excess(x) < 0.0 && x.iter().all(|&v| v > 0.0);
    if strict {
        let seed = need_seed(opts, Command::Ang)?;
        let samples = ang_sample(x, spec.samples, seed)?;
        let worst = samples.iter().map(|a| a.residual(x)).fold(0.0, f64::max);
        let distinct = samples.iter().map(|a| a.distinct_values(1e-6)).max().unwrap_or(0);
        report["samples"] = json!({ "count": samples.len(), "max_residual": worst, "max_distinct_values": distinct });
        csv = Some(samples_to_csv(x, &samples));
        if let Some(xp) = &spec.x_prime {
            let rep = ang_parallel_property(x, xp, spec.samples, seed, opts.tol.unwrap_or(1e-9))?;
            report["parallel"] = json!({
                "x_prime": xp,
                "subset_holds": rep.subset_holds,
                "residual": rep.residual,
                "samples": rep.samples,
            });
        }
    }
    Ok(Outcome { report, csv, failed: false })
}

/// n copies of a two-factor state regrouped as in^{⊗n} ⊗ (R^{⊗n} as one factor).
fn power_block(psi: &PureState, n: usize) -> Result<PureState, CliError> {
    let (din, dr) = (psi.shape.dims()[0], psi.shape.dims()[1]);
    let mut v = psi.amplitudes.clone();
    let mut dims = vec![din, dr];
    for _ in 1..n {
        v = kron_vec(&v, &psi.amplitudes);
        dims.extend([din, dr]);
    }
    let perm: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
    let w = permute_vector(&v, &SystemShape::new(dims)?, &perm)?;
    let mut out_dims = vec![din; n];
    out_dims.push(dr.pow(n as u32));
    Ok(PureState::new(w, SystemShape::new(out_dims)?)?)
}

fn min_eig(m: &CMatrix) -> Result<f64, CliError> {
    Ok(eigvalsh(&m.hermitian_part())?.first().copied().unwrap_or(0.0))
}

fn repeat(doc: &SpecDocument, opts: &Options) -> Result<Outcome, CliError> {
    let fam = doc.family()?;
    let spec = need(doc.analysis.repeat.as_ref(), "analysis.repeat")?;
    let n = spec.n;
    if n == 0 {
        return Err(CliError::Parse("analysis.repeat.n must be positive".into()));
    }
    if fam.kind() == FamilyKind::Measurement {
        let blocks = if spec.blocks.is_empty() { vec![1; n] } else { spec.blocks.clone() };
        if blocks.iter().sum::<usize>() != n {
            return Err(CliError::Parse("analysis.repeat.blocks must sum to n".into()));
        }
        if spec.menu.is_empty() {
            return Err(CliError::Parse("analysis.repeat.menu is empty".into()));
        }
        let menu = spec.menu.iter().map(|m| doc.input(m, fam.din())).collect::<Result<Vec<_>, _>>()?;
        let menus = blocks
            .iter()
            .map(|&b| menu.iter().map(|s| power_block(s, b)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let plan = AdaptivePlan::new(blocks.clone(), menus)?;
        let prior = spec.prior.unwrap_or(0.5);
        let rep = adaptive_vs_identical(&fam, (prior, 1.0 - prior), &plan)?;
        let mut report = to_value(&rep);
        report["blocks"] = json!(blocks);
        report["first_choice_name"] = json!(spec.menu[rep.first_choice]);
        report["adaptation_helps"] = json!(rep.adaptive_risk < rep.identical_risk - 1e-9);
        return Ok(Outcome::ok(report));
    }
    let seed = need_seed(opts, Command::Repeat)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = need(spec.input.as_deref(), "analysis.repeat.input")?;
    let psi = doc.input(name, fam.din())?;
    let (din, dout) = (fam.din(), fam.dout());
    let kind = spec.interleaver.as_deref().unwrap_or("fresh-swap");
    let (seq, layout) = match kind {
        "fresh-swap" => {
            let (s, l) = fresh_swap_strategy(&psi, n, dout)?;
            (s, Some(l))
        }
        "identity" | "random-unitary" => {
            if din != dout {
                return Err(CliError::Parse(format!("{} interleavers need d_in = d_out", kind)));
            }
            let drn = spec.register_dim.unwrap_or(din.pow(n as u32));
            let start = PureState::new(random_state(&mut rng, din * drn), SystemShape::pair(din, drn))?;
            let inter = (1..n)
                .map(|_| if kind == "identity" { identity_rewire(din, drn) } else { random_unitary_interleaver(&mut rng, din, drn) })
                .collect();
            (Strategy::sequential(start, inter)?, None)
        }
        other => return Err(CliError::Parse(format!("unknown interleaver {:?}", other))),
    };
    let ident = Strategy::identical(psi.clone(), n)?;
    let mut joint = psi.amplitudes.clone();
    let mut dims = psi.shape.dims().to_vec();
    for _ in 1..n {
        joint = kron_vec(&joint, &psi.amplitudes);
        dims.extend_from_slice(psi.shape.dims());
    }
    let par = Strategy::parallel(PureState::new(joint, SystemShape::new(dims)?)?, n)?;
    let mut members = Vec::new();
    for m in fam.members() {
        let a = repeated_output(&m.channel, &ident)?;
        let b = repeated_output(&m.channel, &par)?;
        let c = repeated_output(&m.channel, &seq)?;
        let mut entry = json!({
            "label": m.label,
            "identical": { "trace": a.trace().re, "min_eig": min_eig(&a)? },
            "parallel_residual": a.max_abs_diff(&b),
            "sequential": { "trace": c.trace().re, "min_eig": min_eig(&c)? },
        });
        if let Some(l) = &layout {
            entry["fresh_swap_residual"] = json!(l.to_identical_order(&c)?.max_abs_diff(&a));
        }
        members.push(entry);
    }
    let mut report = json!({ "n": n, "input": name, "interleaver": kind, "members": members });
    if din == dout && layout.is_none() {
        let group = weyl_group_pairs(din);
        if covariance_residual(&fam, &group, false)? <= 1e-8 {
            let certs = identical_matches_sequential(&fam, &group, &IrrepBlocks::single(din), &seq, false)?;
            let tol = opts.tol.unwrap_or(1e-8);
            report["identical_matches_sequential"] = json!({
                "members": to_value(&certs),
                "passed": certs.iter().all(|c| c.residual <= tol),
            });
        }
    }
    Ok(Outcome::ok(report))
}

/// Φ_d as an explicit amplitude list, handy for building spec documents.
pub fn phi_amplitudes(d: usize) -> Vec<[f64; 2]> {
    max_entangled(d).iter().map(|z| [z.re, z.im]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preset_doc(name: &str) -> SpecDocument {
        parse(preset(name).unwrap()).unwrap()
    }

    #[test]
    fn presets_round_trip() {
        for (name, text) in PRESETS {
            let doc = parse(text).unwrap_or_else(|e| panic!("{}: {}", name, e));
            let original: Value = serde_json::from_str(text).unwrap();
            assert_eq!(serde_json::to_value(&doc).unwrap(), original, "{}", name);
            if doc.family.is_some() {
                let fam = doc.family().unwrap_or_else(|e| panic!("{}: {}", name, e));
                doc.all_inputs(fam.din()).unwrap();
            }
        }
    }

    #[test]
    fn validate_gp3_passes() {
        let out = run(Command::Validate, &preset_doc("gp3-simplex"), &Options::default()).unwrap();
        assert!(!out.failed);
        assert_eq!(out.report["all_valid"], json!(true));
        assert_eq!(out.report["weyl_covariance"]["covariant"], json!(true));
    }

    #[test]
    fn sweep_damp_rows() {
        let out = run(Command::Sweep, &preset_doc("damp-counterexample"), &Options::default()).unwrap();
        let csv = out.csv.unwrap();
        let value = |input: &str| -> f64 {
            csv.lines()
                .find(|l| {
                    let f: Vec<&str> = l.split(',').collect();
                    f[2] == input && f[3] == "0.5"
                })
                .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
                .unwrap()
        };
        assert!((value("basis") - 0.5).abs() < 1e-9);
        assert!((value("phi") - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn ent_advantage_diag2() {
        let out = run(Command::EntAdvantage, &preset_doc("diag2"), &Options::default()).unwrap();
        assert_eq!(out.report["suffices"], json!(true));
        assert_eq!(out.report["axis"], json!("x"));
    }

    #[test]
    fn reports_are_reproducible() {
        let doc = preset_doc("ang-square");
        let opts = Options { seed: Some(3), ..Options::default() };
        let a = render(&run(Command::Ang, &doc, &opts).unwrap().report);
        let b = render(&run(Command::Ang, &doc, &opts).unwrap().report);
        assert_eq!(a, b);
        assert!(run(Command::Ang, &doc, &Options::default()).unwrap_err().exit_code() == 2);
    }

    #[test]
    fn parse_errors_are_located() {
        let err = parse("{\n \"family\": {\"kind\": \"gp\", \"d\": 2, \"member\": []}\n}").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let msg = err.to_string();
        assert!(msg.contains("member") && msg.contains("line"), "{}", msg);
    }

    #[test]
    fn invalid_parameters_exit_3() {
        let doc = parse(r#"{"family": {"kind": "gp", "d": 2, "members": [{"label": "a", "params": [0.5, 0.5, 0.5, 0.5]}]}}"#)
            .unwrap();
        assert_eq!(run(Command::Validate, &doc, &Options::default()).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        let v = canonical(json!({ "b": 0.123456789012345678, "a": [1.0 / 3.0] }));
        assert_eq!(v["b"], json!(0.123456789012));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"a":[0.333333333333],"b":0.123456789012}"#);
    }

    #[test]
    fn repeat_commands() {
        let opts = Options { seed: Some(1), ..Options::default() };
        let out = run(Command::Repeat, &preset_doc("repeat-gp"), &opts).unwrap();
        assert_eq!(out.report["identical_matches_sequential"]["passed"], json!(true));
        let out = run(Command::Repeat, &preset_doc("mes-rotate"), &opts).unwrap();
        assert_eq!(out.report["adaptation_helps"], json!(false));
    }

    #[test]
    fn certify_commands() {
        let opts = Options::default();
        let out = run(Command::Certify, &preset_doc("unital-qubit"), &opts).unwrap();
        assert_eq!(out.report["passed"], json!(true));
        let out = run(Command::Certify, &preset_doc("ortho-measure"), &opts).unwrap();
        assert_eq!(out.report["verdict"]["relation"], json!("dominates"));
    }
}
