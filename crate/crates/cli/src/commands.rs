use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use qdiv_core::engine::PWitness;
use qdiv_core::hermitian::MinorWitness;
use qdiv_core::io::{Form, GeneratorFile, TraceFile};
use qdiv_core::presets::{self, XRamp};
use qdiv_core::process::{sweep, ProcessClass, SampleVerdict, SweepOptions};
use qdiv_core::scan::{run_scan, Axis, RegionScanSpec, ScanClass, ScanRow};
use qdiv_core::{classify, local_cp, ClassifyOptions, Complex64, MinimizerOptions, VerdictClass};
use serde::{Deserialize, Serialize};

use crate::args::{Cli, Command, EngineFlags, Format, Preset, Target};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<u8> {
    let flags = &cli.engine;
    if let Some(n) = flags.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(format!("--threads: {e}")))?;
    }
    let opts = classify_options(flags)?;
    match cli.command {
        Command::Check { input } => check(&input, &opts, flags.format.unwrap_or(Format::Json)),
        Command::Convert { input, to, output } => convert(&input, to, output.as_deref()),
        Command::Scan { spec, class, fixed, axis, output } => {
            let (spec, spec_output) = match spec {
                Some(path) => read_scan_file(&path)?,
                None => (scan_from_flags(class.as_deref(), &fixed, &axis)?, None),
            };
            let output = output.or(spec_output);
            scan(&spec, &opts, flags.format.unwrap_or(Format::Csv), output.as_deref())
        }
        Command::Sweep { input, kappa_max, margins, output } => {
            let opts = SweepOptions { classify: opts, kappa_max, ..SweepOptions::default() };
            run_sweep(&input, &opts, flags.format.unwrap_or(Format::Json), margins.as_deref(), output.as_deref())
        }
        Command::Preset { kind, t_end, steps, output } => preset(&kind, t_end, steps, output.as_deref()),
    }
}

fn classify_options(flags: &EngineFlags) -> Result<ClassifyOptions> {
    if !(flags.tol.is_finite() && flags.tol >= 0.0) {
        return Err(CliError::Input("--tol must be a finite non-negative number".into()));
    }
    if flags.grid < 2 {
        return Err(CliError::Input("--grid must be at least 2".into()));
    }
    Ok(ClassifyOptions {
        psd_tol: flags.tol,
        minimizer: MinimizerOptions {
            grid_theta: flags.grid,
            grid_beta: flags.grid,
            refine: flags.refine,
            tol: flags.tol,
            ..MinimizerOptions::default()
        },
    })
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Output(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Output(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Output(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct CpWitnessOut {
    indices: Vec<usize>,
    minor: f64,
}

#[derive(Serialize)]
struct PWitnessOut {
    theta: f64,
    beta: f64,
    two_p: f64,
}

impl From<&MinorWitness> for CpWitnessOut {
    fn from(w: &MinorWitness) -> Self {
        Self { indices: w.indices.clone(), minor: w.value }
    }
}

impl From<&PWitness> for PWitnessOut {
    fn from(w: &PWitness) -> Self {
        Self { theta: w.point.theta(), beta: w.point.beta(), two_p: w.two_p }
    }
}

#[derive(Serialize)]
struct CheckReport {
    verdict: &'static str,
    cp: bool,
    /// Absent for `d > 2`.
    p: Option<bool>,
    cp_marginal: bool,
    p_marginal: bool,
    min_eigenvalue: f64,
    /// Failing principal minor when CP fails.
    cp_witness: Option<CpWitnessOut>,
    /// Torus minimizer; `two_p < 0` there when P fails.
    p_witness: Option<PWitnessOut>,
}

fn check(input: &Path, opts: &ClassifyOptions, format: Format) -> Result<u8> {
    let m = GeneratorFile::from_json(&read_input(input)?)?.to_master()?;
    let (report, code) = if m.dim() == 2 {
        let v = classify(&m, opts)?;
        let (verdict, code) = match v.class() {
            VerdictClass::Cp => ("cp", 0),
            VerdictClass::PNotCp => ("p-not-cp", 10),
            VerdictClass::NotP => ("not-p", 20),
        };
        let report = CheckReport {
            verdict,
            cp: v.locally_cp,
            p: Some(v.locally_p),
            cp_marginal: v.cp_marginal,
            p_marginal: v.p_marginal,
            min_eigenvalue: v.min_eigenvalue,
            cp_witness: v.cp_witness.as_ref().map(Into::into),
            p_witness: v.p_witness.as_ref().map(Into::into),
        };
        (report, code)
    } else {
        let c = local_cp(&m, opts.psd_tol)?;
        let report = CheckReport {
            verdict: if c.locally_cp { "cp" } else { "not-cp" },
            cp: c.locally_cp,
            p: None,
            cp_marginal: c.marginal,
            p_marginal: false,
            min_eigenvalue: c.min_eigenvalue,
            cp_witness: c.cp_witness.as_ref().map(Into::into),
            p_witness: None,
        };
        (report, if c.locally_cp { 0 } else { 20 })
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Csv => csv_text(
            &["verdict", "cp", "p", "min_eigenvalue", "min_p", "cp_marginal", "p_marginal"],
            [vec![
                report.verdict.to_string(),
                flag(report.cp),
                report.p.map(flag).unwrap_or_default(),
                report.min_eigenvalue.to_string(),
                opt_num(report.p_witness.as_ref().map(|w| w.two_p)),
                flag(report.cp_marginal),
                flag(report.p_marginal),
            ]],
        )?,
    };
    write_output(None, &text)?;
    Ok(code)
}

fn convert(input: &Path, to: Target, output: Option<&Path>) -> Result<u8> {
    let m = GeneratorFile::from_json(&read_input(input)?)?.to_master()?;
    let form = match to {
        Target::Choi => Form::Choi,
        Target::Master => Form::Master,
        Target::Bloch => Form::Bloch,
        Target::Pauli => Form::Pauli,
    };
    if m.dim() != 2 && form != Form::Master {
        return Err(CliError::Input(format!("--to {} needs a qubit generator, got dimension {}", form.as_str(), m.dim())));
    }
    let out = GeneratorFile::from_master(&m, form)?;
    write_output(output, &(out.to_json() + "\n"))?;
    Ok(0)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanFile {
    class: ScanClass,
    #[serde(default)]
    fixed: BTreeMap<String, f64>,
    axes: [Axis; 2],
    output: Option<PathBuf>,
}

fn read_scan_file(path: &Path) -> Result<(RegionScanSpec, Option<PathBuf>)> {
    let f: ScanFile = serde_json::from_str(&read_input(path)?)
        .map_err(|e| CliError::Input(format!("scan spec {}: {e}", path.display())))?;
    let spec = RegionScanSpec { class: f.class, fixed: f.fixed, axes: f.axes };
    spec.validate()?;
    Ok((spec, f.output))
}

fn scan_from_flags(class: Option<&str>, fixed: &[String], axes: &[String]) -> Result<RegionScanSpec> {
    let class = ScanClass::parse(class.ok_or_else(|| CliError::Input("scan needs --spec or --class".into()))?)?;
    if axes.len() != 2 {
        return Err(CliError::Input(format!("scan needs exactly two --axis options, got {}", axes.len())));
    }
    let mut values = Vec::with_capacity(fixed.len());
    for item in fixed {
        let bad = || CliError::Input(format!("--fixed `{item}` must look like name=value"));
        let (name, value) = item.split_once('=').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        values.push((name.trim(), value));
    }
    let axes = [Axis::parse(&axes[0])?, Axis::parse(&axes[1])?];
    Ok(RegionScanSpec::new(class, &values, axes)?)
}

fn scan(spec: &RegionScanSpec, opts: &ClassifyOptions, format: Format, output: Option<&Path>) -> Result<u8> {
    let rows = run_scan(spec, opts)?;
    let text = match format {
        Format::Csv => {
            let header = [spec.axes[0].name.as_str(), spec.axes[1].name.as_str(), "cp", "p", "margin_cp", "margin_p"];
            csv_text(&header, rows.iter().map(scan_record))?
        }
        Format::Json => serde_json::to_string(&rows).expect("rows serialize") + "\n",
    };
    write_output(output, &text)?;
    Ok(0)
}

fn scan_record(r: &ScanRow) -> Vec<String> {
    vec![r.a1.to_string(), r.a2.to_string(), flag(r.cp), flag(r.p), r.margin_cp.to_string(), r.margin_p.to_string()]
}

fn margin_record(s: &SampleVerdict) -> Vec<String> {
    vec![s.t.to_string(), s.min_eig_d.to_string(), opt_num(s.min_p), s.label().to_string()]
}

fn run_sweep(
    input: &Path,
    opts: &SweepOptions,
    format: Format,
    margins: Option<&Path>,
    output: Option<&Path>,
) -> Result<u8> {
    let trace = TraceFile::from_json(&read_input(input)?)?.into_trace()?;
    let report = sweep(&trace, opts)?;
    let margin_csv = || csv_text(&["t", "min_eig_d", "min_p", "verdict"], report.samples.iter().map(margin_record));
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Csv => margin_csv()?,
    };
    if let Some(path) = margins {
        write_output(Some(path), &margin_csv()?)?;
    }
    write_output(output, &text)?;
    Ok(match report.summary {
        ProcessClass::CpDivisible => 0,
        ProcessClass::PDivisibleNotCp => 10,
        ProcessClass::Neither | ProcessClass::NotCpDivisible => 20,
    })
}

fn preset(kind: &Preset, t_end: f64, steps: usize, output: Option<&Path>) -> Result<u8> {
    if !(t_end.is_finite() && t_end > 0.0) || steps < 2 {
        return Err(CliError::Input("presets need --t-end > 0 and --steps >= 2".into()));
    }
    let times = presets::uniform_times(t_end, steps);
    let trace = match kind {
        Preset::Semigroup { generator } => {
            let m = GeneratorFile::from_json(&read_input(generator)?)?.to_master()?;
            presets::semigroup(&m, &times)?
        }
        Preset::PauliDecay { rates } => {
            let rates: [f64; 3] = rates
                .as_slice()
                .try_into()
                .map_err(|_| CliError::Input(format!("--rates needs three values, got {}", rates.len())))?;
            presets::pauli_decay(rates, &times)?
        }
        Preset::XRamp { a, b, d22, d33, d23 } => {
            let ramp = XRamp { a: *a, b: *b, d22: *d22, d33: *d33, d23: Complex64::new(*d23, 0.0) };
            presets::x_ramp(&ramp, &times)?
        }
    };
    write_output(output, &(TraceFile::from_trace(&trace).to_json() + "\n"))?;
    Ok(0)
}
