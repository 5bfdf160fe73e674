use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use bec_core::edge::{relative_winding, spectral_flow, spectral_flow_direct, track_bands, EdgeOptions, FlowResult};
use bec_core::extension::{affiliation_check, BoundaryCondition, EdgeProblem, Verdict};
use bec_core::models::tables::{run_table, TableId};
use bec_core::models::{builtin, verify_pair, Geometry, ModelDescriptor, Params, Status};
use bec_core::symbol::{chern, find_gap, relative_chern, ChernResult, FAR_VARIATION_TOL};
use bec_core::{BecError, Result};

use crate::modelfile::{boundary_condition, BoundarySpec, ModelFile, ModelSpec};
use crate::plot::{spectrum_csv, spectrum_svg};
use crate::report::{InvariantReport, Setting, Source};

pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "bec", version, about = "Bulk, edge and interface invariants of continuum Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Chern number of the bulk Fermi projection.
    Bulk(Common),
    /// Chern number of the difference of two bulk projections.
    RelativeChern {
        #[command(flatten)]
        common: Common,
        /// Parameter override for the second model, `key=value`; repeatable.
        #[arg(long = "other", value_name = "KEY=VALUE")]
        other: Vec<String>,
    },
    /// Edge dispersion and spectral flow.
    Edge {
        #[command(subcommand)]
        command: EdgeCommand,
    },
    /// Winding of the von Neumann unitary relative to a reference condition.
    Winding(Common),
    /// Checks SF(bc) - SF(ref) against the relative winding.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Also check the identity that includes the bulk invariant.
        #[arg(long)]
        bulk: bool,
    },
    /// Recomputes a reference table and compares it with the tabulated values.
    Tables {
        #[arg(value_parser = ["laplacian", "dirac", "regdirac"])]
        which: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum EdgeCommand {
    /// Tracks edge bands; writes CSV and optionally SVG.
    Spectrum(Common),
    /// Counts signed crossings of edge bands through the reference energy.
    Flow {
        #[command(flatten)]
        common: Common,
        /// Count crossings of tracked bands instead of locating them directly.
        #[arg(long)]
        tracked: bool,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Built-in model name or path to a model file.
    #[arg(long)]
    pub model: Option<String>,
    /// Model parameter `key=value`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Boundary condition `family[:key=value,...]`.
    #[arg(long)]
    pub bc: Option<String>,
    /// Reference boundary condition, same syntax as `--bc`.
    #[arg(long = "ref")]
    pub reference: Option<String>,
    /// Reference energy (Fermi level for bulk commands).
    #[arg(long, allow_hyphen_values = true)]
    pub energy: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub k_window: Option<f64>,
    #[arg(long)]
    pub k_resolution: Option<usize>,
    #[arg(long)]
    pub lambda_resolution: Option<usize>,
    /// CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG output path.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

fn parse_kv(s: &str) -> Result<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| BecError::Input(format!("expected key=value, got `{s}`")))?;
    let v = match v.trim() {
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        x => x.parse::<f64>().map_err(|_| BecError::Input(format!("`{k}` expects a number, got `{v}`")))?,
    };
    Ok((k.trim().to_string(), v))
}

fn parse_params(items: &[String]) -> Result<Params> {
    let mut p = Params::new();
    for s in items {
        let (k, v) = parse_kv(s)?;
        if p.insert(k.clone(), v).is_some() {
            return Err(BecError::Input(format!("parameter `{k}` given twice")));
        }
    }
    Ok(p)
}

/// `family[:key=value,...]`.
pub fn parse_bc_spec(s: &str) -> Result<BoundarySpec> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    let items: Vec<String> = rest.split(',').filter(|x| !x.trim().is_empty()).map(String::from).collect();
    Ok(BoundarySpec::Family { name: name.trim().to_string(), params: parse_params(&items)? })
}

struct Context {
    file: ModelFile,
    model: ModelDescriptor,
    common: Common,
}

impl Context {
    fn load(common: &Common) -> Result<Self> {
        let name = common.model.as_deref().ok_or_else(|| BecError::Input("--model is required".into()))?;
        let overrides = parse_params(&common.params)?;
        let mut file = if Path::new(name).is_file() {
            let text = std::fs::read_to_string(name)
                .map_err(|e| BecError::Input(format!("cannot read model file {name}: {e}")))?;
            ModelFile::parse(&text)?
        } else {
            ModelFile::builtin(name, Params::new())
        };
        if !overrides.is_empty() {
            match &mut file.model {
                ModelSpec::Builtin { params, .. } => params.extend(overrides),
                ModelSpec::Inline { .. } => return Err(BecError::Input("--param does not apply to inline models".into())),
            }
        }
        if let Some(bc) = &common.bc {
            file.boundary = Some(parse_bc_spec(bc)?);
        }
        if let Some(r) = &common.reference {
            file.reference = Some(parse_bc_spec(r)?);
        }
        let model = file.descriptor()?;
        Ok(Context { file, model, common: common.clone() })
    }

    fn label(&self) -> String {
        match &self.file.model {
            ModelSpec::Builtin { name, params } if params.is_empty() => name.clone(),
            ModelSpec::Builtin { name, params } => {
                let ps: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                format!("{name}({})", ps.join(", "))
            }
            ModelSpec::Inline { .. } => "inline".into(),
        }
    }

    fn tol(&self) -> Setting<f64> {
        Setting::resolve(self.common.tol, self.file.numerics.tol, DEFAULT_TOL)
    }

    fn energy(&self) -> Setting<f64> {
        Setting::resolve(self.common.energy, self.file.task.energy, self.model.fiducial_e)
    }

    fn options(&self, report: &mut InvariantReport) -> Result<EdgeOptions> {
        let d = self.model.edge_options();
        let kw = Setting::resolve(self.common.k_window, self.file.numerics.k_window, d.k_window);
        let kr = Setting::resolve(self.common.k_resolution, self.file.numerics.k_resolution, d.k_resolution);
        let lr = Setting::resolve(self.common.lambda_resolution, self.file.numerics.lambda_resolution, d.lambda_resolution);
        let opts = EdgeOptions { k_window: kw.value, k_resolution: kr.value, lambda_resolution: lr.value, far: self.file.numerics.far };
        opts.validate()?;
        report.setting("k_window", kw);
        report.setting("k_resolution", kr);
        report.setting("lambda_resolution", lr);
        let far_source = if self.file.numerics.far.is_some() { Source::File } else { Source::Default };
        report.setting("energy_cutoff", Setting { value: opts.far_cutoff(), source: far_source });
        Ok(opts)
    }

    fn condition(&self, spec: Option<&BoundarySpec>, geometry: Option<Geometry>) -> Result<(BoundaryCondition, Geometry)> {
        match spec {
            Some(s) => boundary_condition(&self.model, s, geometry.or(self.file.task.geometry)),
            None => {
                let g = geometry.or(self.file.task.geometry).unwrap_or(if self.model.halfline.is_some() {
                    Geometry::Halfline
                } else {
                    Geometry::Interface
                });
                Ok((self.model.reference_condition(g)?, g))
            }
        }
    }

    /// The condition under study and the reference it is compared with.
    fn pair(&self) -> Result<(BoundaryCondition, BoundaryCondition, Geometry, EdgeProblem)> {
        let (bc, g) = self.condition(self.file.boundary.as_ref(), None)?;
        let (reference, _) = self.condition(self.file.reference.as_ref(), Some(g))?;
        let p = self.model.problem(g)?;
        Ok((bc, reference, g, p))
    }
}

fn fmt3(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// `chern = -1.000 (resid 3e-4)`, or a NON-INTEGER marker.
pub fn chern_line(name: &str, r: &ChernResult, tol: f64) -> String {
    if r.residual >= tol.max(1e-3) {
        format!("{name} = {} (NON-INTEGER: not strongly affiliated)", fmt3(r.value))
    } else if r.far_variation >= FAR_VARIATION_TOL {
        format!("{name} = {} (not strongly affiliated: projection has no limit at infinity)", fmt3(r.value))
    } else if r.residual == 0.0 {
        format!("{name} = {}", fmt3(r.value))
    } else {
        format!("{name} = {} (resid {:.0e})", fmt3(r.value), r.residual)
    }
}

fn check_level(model: &ModelDescriptor, level: f64) -> Result<()> {
    if let Some(g) = model.declared_gap {
        if !g.contains(level) {
            return Err(BecError::NoGap { around: level });
        }
        return Ok(());
    }
    find_gap(&model.symbol, level, 20.0 * model.gap_scale.max(1.0), 128).map(|_| ())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| BecError::Input(format!("cannot write {}: {e}", path.display())))
}

fn flow_summary(report: &mut InvariantReport, flow: &FlowResult) {
    report.value("spectral_flow", flow.value as f64, None);
    for c in &flow.crossings {
        report.warnings.push(format!(
            "crossing at k = {:.6}, direction {:+}, multiplicity {}",
            c.k, c.direction, c.multiplicity
        ));
    }
    report.warnings.extend(flow.warnings.iter().cloned());
}

fn affiliation_banner(out: &mut dyn Write, report: &mut InvariantReport, p: &EdgeProblem, bc: &BoundaryCondition) -> Result<Verdict> {
    let a = affiliation_check(p, bc)?;
    report.verdict(&bc.label, a.verdict);
    if a.verdict != Verdict::Affiliated {
        let _ = writeln!(out, "WARN: {} is {}; results may depend on the momentum window", bc.label, a.verdict);
    }
    Ok(a.verdict)
}

fn bulk(out: &mut dyn Write, common: &Common) -> Result<i32> {
    let ctx = Context::load(common)?;
    let mut report = InvariantReport::new(ctx.label(), "bulk");
    let (level, tol) = (ctx.energy(), ctx.tol());
    report.setting("level", level);
    report.setting("tol", tol);
    check_level(&ctx.model, level.value)?;
    let r = chern(&ctx.model.symbol, level.value, tol.value)?;
    let _ = writeln!(out, "{}", chern_line("chern", &r, tol.value));
    report.value("chern", r.value, Some(r.residual));
    report.warnings.extend(r.warnings.iter().cloned());
    let _ = write!(out, "{report}");
    Ok(if r.quad.converged { 0 } else { 3 })
}

fn relative(out: &mut dyn Write, common: &Common, other: &[String]) -> Result<i32> {
    let ctx = Context::load(common)?;
    let ModelSpec::Builtin { name, params } = &ctx.file.model else {
        return Err(BecError::Input("relative-chern needs a built-in model".into()));
    };
    let mut p2 = params.clone();
    p2.extend(parse_params(other)?);
    let second = builtin(name, &p2)?;
    let mut report = InvariantReport::new(ctx.label(), "relative-chern");
    let (level, tol) = (ctx.energy(), ctx.tol());
    report.setting("level", level);
    report.setting("tol", tol);
    check_level(&ctx.model, level.value)?;
    check_level(&second, level.value)?;
    let r = relative_chern(&ctx.model.symbol, &second.symbol, level.value, tol.value)?;
    let _ = writeln!(out, "{}", chern_line("relative chern", &r, tol.value));
    report.value("relative_chern", r.value, Some(r.residual));
    report.warnings.extend(r.warnings.iter().cloned());
    let _ = write!(out, "{report}");
    Ok(if r.quad.converged { 0 } else { 3 })
}

fn edge_spectrum(out: &mut dyn Write, common: &Common) -> Result<i32> {
    let ctx = Context::load(common)?;
    let mut report = InvariantReport::new(ctx.label(), "edge spectrum");
    let (bc, _, _, p) = ctx.pair()?;
    let energy = ctx.energy();
    report.setting("energy", energy);
    let opts = ctx.options(&mut report)?;
    affiliation_banner(out, &mut report, &p, &bc)?;
    let spec = track_bands(&p, &bc, energy.value, &opts)?;
    let csv = spectrum_csv(&spec);
    match &common.out {
        Some(path) => write_file(path, &csv)?,
        None => {
            let _ = out.write_all(csv.as_bytes());
        }
    }
    if let Some(path) = &common.plot {
        let title = format!("{} / {}", ctx.label(), bc.label);
        write_file(path, &spectrum_svg(&spec, energy.value, &title))?;
    }
    for (i, b) in spec.bands.iter().enumerate() {
        report.warnings.push(format!(
            "band {i}: {} samples, {} -> {}{}",
            b.samples.len(),
            b.start,
            b.end,
            if b.flat { ", flat" } else { "" }
        ));
    }
    let flow = spectral_flow(&spec.bands, energy.value);
    let _ = writeln!(out, "bands = {}", spec.bands.len());
    let _ = writeln!(out, "spectral flow = {}", flow.value);
    flow_summary(&mut report, &flow);
    let _ = write!(out, "{report}");
    Ok(0)
}

fn edge_flow(out: &mut dyn Write, common: &Common, tracked: bool) -> Result<i32> {
    let ctx = Context::load(common)?;
    let mut report = InvariantReport::new(ctx.label(), if tracked { "edge flow (tracked)" } else { "edge flow" });
    let (bc, _, _, p) = ctx.pair()?;
    let energy = ctx.energy();
    report.setting("energy", energy);
    let opts = ctx.options(&mut report)?;
    affiliation_banner(out, &mut report, &p, &bc)?;
    let flow = if tracked {
        spectral_flow(&track_bands(&p, &bc, energy.value, &opts)?.bands, energy.value)
    } else {
        spectral_flow_direct(&p, &bc, energy.value, &opts)?
    };
    let _ = writeln!(out, "spectral flow = {}{}", flow.value, if flow.flagged { " (flagged)" } else { "" });
    flow_summary(&mut report, &flow);
    let _ = write!(out, "{report}");
    Ok(if flow.flagged { 3 } else { 0 })
}

fn winding_cmd(out: &mut dyn Write, common: &Common) -> Result<i32> {
    let ctx = Context::load(common)?;
    let mut report = InvariantReport::new(ctx.label(), "winding");
    let (bc, reference, _, p) = ctx.pair()?;
    let w = relative_winding(&p, &bc, &reference)?;
    let _ = writeln!(out, "winding = {} (raw {:.6}, relative to {})", w.value, w.raw, reference.label);
    report.value("winding", w.value as f64, Some(w.residual));
    report.warnings.push(format!("{} samples of det U", w.samples));
    let _ = write!(out, "{report}");
    Ok(0)
}

fn verify(out: &mut dyn Write, common: &Common, with_bulk: bool) -> Result<i32> {
    let ctx = Context::load(common)?;
    let mut report = InvariantReport::new(ctx.label(), "verify");
    let (bc, reference, g, _) = ctx.pair()?;
    let (energy, tol) = (ctx.energy(), ctx.tol());
    report.setting("energy", energy);
    if with_bulk {
        report.setting("tol", tol);
    }
    let opts = ctx.options(&mut report)?;
    let r = verify_pair(&ctx.model, g, &bc, &reference, energy.value, &opts, with_bulk, tol.value)?;
    report.verdict(&bc.label, r.verdicts.0);
    report.verdict(&reference.label, r.verdicts.1);
    let summary = match (r.sf, r.sf_ref, r.wind) {
        (Some(a), Some(b), Some(w)) => format!(" (SF {a} vs {b}; wind {w:+})"),
        _ => String::new(),
    };
    let _ = writeln!(out, "verify: {}{summary}", r.status);
    if let (Some(a), Some(b), Some(w)) = (r.sf, r.sf_ref, r.wind) {
        report.value("sf", a as f64, None);
        report.value("sf_reference", b as f64, None);
        report.value("relative_winding", w as f64, r.wind_residual);
    }
    if let Some(b) = &r.bulk {
        let _ = writeln!(
            out,
            "bulk: invariant {} + winding to reference {:+} {} SF",
            fmt3(b.value),
            b.wind_to_reference,
            if b.holds { "matches" } else { "does not match" }
        );
        report.value("bulk_invariant", b.value, Some(b.residual));
    }
    report.warnings.extend(r.warnings.iter().cloned());
    report.status = Some(r.status.clone());
    let _ = write!(out, "{report}");
    Ok(match r.status {
        Status::Pass => 0,
        Status::Fail => 1,
        Status::Skipped(_) => 2,
    })
}

fn tables(out: &mut dyn Write, which: &str) -> Result<i32> {
    let id = TableId::parse(which)?;
    let report = run_table(id)?;
    let _ = write!(out, "{report}");
    if !report.classification_matches() {
        let _ = writeln!(out, "note: some tabulated not-affiliated classes are computed as affiliated");
    }
    let ok = report.values_match();
    let _ = writeln!(out, "{}", if ok { "all tabulated values reproduced" } else { "MISMATCH" });
    Ok(if ok { 0 } else { 1 })
}

/// Runs a parsed command; errors are reported on `err` and mapped to exit codes.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Bulk(c) => bulk(out, c),
        Command::RelativeChern { common, other } => relative(out, common, other),
        Command::Edge { command: EdgeCommand::Spectrum(c) } => edge_spectrum(out, c),
        Command::Edge { command: EdgeCommand::Flow { common, tracked } } => edge_flow(out, common, *tracked),
        Command::Winding(c) => winding_cmd(out, c),
        Command::Verify { common, bulk } => verify(out, common, *bulk),
        Command::Tables { which } => tables(out, which),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Parses arguments and runs, capturing standard output.
pub fn run_args<I, S>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, &mut out, &mut err),
        Err(e) => {
            let _ = write!(err, "{e}");
            if e.use_stderr() { 2 } else { 0 }
        }
    };
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bc_specs() {
        let s = parse_bc_spec("klm:K=1,l=-2,M=1").unwrap();
        let BoundarySpec::Family { name, params } = s else { panic!() };
        assert_eq!(name, "klm");
        assert_eq!(params["l"], -2.0);
        assert!(parse_bc_spec("a:a").is_err());
        assert!(matches!(parse_bc_spec("dirichlet").unwrap(), BoundarySpec::Family { params, .. } if params.is_empty()));
        assert_eq!(parse_kv("a=inf").unwrap().1, f64::INFINITY);
    }

    #[test]
    fn chern_line_formats() {
        use bec_core::numerics::quad::QuadResult;
        let q = QuadResult { value: num_complex::Complex64::new(0.0, 0.0), error: 0.0, converged: true, cells: 1 };
        let mk = |value: f64| ChernResult { value, residual: (value - value.round()).abs(), imag_part: 0.0, quad: q, warnings: vec![], far_variation: 0.0 };
        assert_eq!(chern_line("chern", &mk(-0.9997), 1e-3), "chern = -1.000 (resid 3e-4)");
        assert_eq!(chern_line("chern", &mk(0.5), 1e-6), "chern = 0.500 (NON-INTEGER: not strongly affiliated)");
        assert_eq!(chern_line("chern", &mk(-0.0), 1e-6), "chern = 0.000");
        let mut r = mk(-1.0);
        r.far_variation = 1.0;
        assert!(chern_line("chern", &r, 1e-6).contains("no limit at infinity"));
    }
}
