use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use log::info;
use rayon::prelude::*;

use lensfix_core::caustics::{
    critical_curves, map_to_caustics, multiplicity_scan, Polyline, Window,
};
use lensfix_core::lefschetz::{
    generic_source_reports, jacobian_identity_residual, lefschetz_sum, InvariantReport,
};
use lensfix_core::lens::PotentialForm;
use lensfix_core::oracle::{
    filament_closed_form, multistart_newton_real, point_mass_closed_form, OracleResult,
};
use lensfix_core::{load_model, Complex, DeflectionModel, SolveOptions, SourcePos};

use crate::fmt::{num, JsonRecord};
use crate::{svg, Common};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// Half-width of the square random sources are drawn from, unless a window
/// is given.
const DEFAULT_SOURCE_HALF_WIDTH: f64 = 2.0;
/// Random sources are redrawn while a fixed point has `|det| < this`.
const GENERIC_DET_FLOOR: f64 = 1e-6;
const VERIFY_SOURCES: usize = 20;
const VERIFY_STARTS: usize = 4096;
const JACOBIAN_TOL: f64 = 1e-10;
const ORACLE_POS_TOL: f64 = 1e-6;
const ORACLE_MU_TOL: f64 = 1e-8;
const CLOSED_FORM_TOL: f64 = 1e-9;

pub fn run(command: &str, args: &Common) -> Result<Outcome> {
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring worker pool")?;
    }
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        bail!("--tol must be a positive number");
    }
    let model = load_model(&args.model)?;
    let opts = SolveOptions::default();
    match command {
        "validate" => validate(&model, args),
        "images" => images(&model, args, &opts),
        "invariant" => invariant(&model, args, &opts),
        "scan" => scan(&model, args, &opts),
        "caustics" => caustics(&model, args),
        "verify" => verify(&model, args, &opts),
        other => unreachable!("unknown command {other}"),
    }
}

fn emit(args: &Common, text: &str) -> Result<()> {
    match &args.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn write_svg(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn parse_floats(text: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if parts.len() != n {
        bail!("{what} needs {n} numbers, got {:?}", text);
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| anyhow!("{what}: {p:?} is not a finite number"))
        })
        .collect()
}

fn parse_source(text: &str) -> Result<SourcePos> {
    let v = parse_floats(text, 2, "source")?;
    Ok(SourcePos::new(v[0], v[1]))
}

fn parse_window(text: &str) -> Result<Window> {
    let v = parse_floats(text, 6, "window")?;
    let count = |x: f64| -> Result<usize> {
        if x.fract() != 0.0 || x < 0.0 {
            bail!("window node counts must be whole numbers, got {x}");
        }
        Ok(x as usize)
    };
    Window::new(
        Complex::new(v[0], v[1]),
        v[2],
        v[3],
        count(v[4])?,
        count(v[5])?,
    )
    .map_err(|e| anyhow!("{e}"))
}

fn read_sources(path: &Path) -> Result<Vec<SourcePos>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(k, l)| parse_source(l).with_context(|| format!("{}:{}", path.display(), k + 1)))
        .collect()
}

/// Square that random sources are drawn from: the window if given (its
/// larger half extent, centred at the origin), otherwise the default.
fn source_half_width(args: &Common) -> Result<f64> {
    match &args.window {
        Some(w) => {
            let w = parse_window(w)?;
            Ok(w.half_width.max(w.half_height))
        }
        None => Ok(DEFAULT_SOURCE_HALF_WIDTH),
    }
}

fn validate(model: &DeflectionModel, args: &Common) -> Result<Outcome> {
    let report = model.validate();
    let status = |ok: bool| if ok { "PASS" } else { "FAIL" };
    let mut text = String::new();
    text.push_str(&format!("model: {}\n", model.name));
    text.push_str(&format!("degree_condition: {}\n", status(report.degree_ok)));
    text.push_str(&format!(
        "conjugate_symmetry: {} (max error {})\n",
        status(report.symmetry_ok),
        num(report.max_symmetry_error)
    ));
    text.push_str(&format!(
        "decay: {} (max |alpha| at large radius {})\n",
        status(report.decay_ok),
        num(report.max_decay)
    ));
    emit(args, &text)?;
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    if !report.all_pass() {
        eprintln!("failed: {}", report.failures().join(", "));
    }
    Ok(Outcome::from_bool(report.all_pass()))
}

fn summary_record(model: &str, zeta: SourcePos, report: Option<&InvariantReport>) -> String {
    let mut r = JsonRecord::new();
    r.str("record", "summary")
        .str("model", model)
        .num("zeta_re", zeta.zeta.re)
        .num("zeta_im", zeta.zeta.im);
    match report {
        Some(rep) => r
            .int("n_fixed", rep.n_fixed())
            .int("n_real", rep.n_real())
            .num("complex_sum_re", rep.complex_sum.re)
            .num("complex_sum_im", rep.complex_sum.im)
            .num("real_sum", rep.real_sum)
            .bool("valid", rep.valid),
        None => r
            .int("n_fixed", 0)
            .int("n_real", 0)
            .opt_num("complex_sum_re", None)
            .opt_num("complex_sum_im", None)
            .opt_num("real_sum", None)
            .bool("valid", false),
    };
    r.line()
}

fn images(model: &DeflectionModel, args: &Common, opts: &SolveOptions) -> Result<Outcome> {
    let text = args
        .source
        .as_deref()
        .ok_or_else(|| anyhow!("images needs --source RE,IM"))?;
    let zeta = parse_source(text)?;
    let report = match lefschetz_sum(model, zeta, opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("no fixed-point set for this source: {e}");
            emit(args, &summary_record(&model.name, zeta, None))?;
            return Ok(Outcome::Fail);
        }
    };
    let mut out = String::new();
    for rec in &report.points {
        let p = &rec.point;
        let mut r = JsonRecord::new();
        r.str("record", "point")
            .num("z1_re", p.z1.re)
            .num("z1_im", p.z1.im)
            .num("z2_re", p.z2.re)
            .num("z2_im", p.z2.im)
            .bool("is_real", p.is_real)
            .opt_num("mu_re", rec.mu.map(|m| m.re))
            .opt_num("mu_im", rec.mu.map(|m| m.im))
            .num("residual", p.residual)
            .int("multiplicity", p.multiplicity)
            .bool("degenerate", p.degenerate);
        out.push_str(&r.line());
    }
    out.push_str(&summary_record(&model.name, zeta, Some(&report)));
    emit(args, &out)?;
    if !report.valid {
        eprintln!(
            "source is not generic: it lies on a caustic or fixed points escaped to infinity"
        );
    }
    Ok(Outcome::from_bool(report.valid))
}

fn invariant(model: &DeflectionModel, args: &Common, opts: &SolveOptions) -> Result<Outcome> {
    let rows: Vec<(SourcePos, Option<InvariantReport>)> = match (&args.sources, args.random) {
        (Some(path), None) => {
            let sources = read_sources(path)?;
            sources
                .par_iter()
                .map(|&z| {
                    let rep = lefschetz_sum(model, z, opts);
                    if let Err(e) = &rep {
                        log::warn!("source {}: {e}", crate::fmt::complex_pair(z.zeta));
                    }
                    (z, rep.ok())
                })
                .collect()
        }
        (None, Some(n)) => {
            let hw = source_half_width(args)?;
            info!(
                "drawing {n} generic sources in [-{hw}, {hw}]^2, seed {}",
                args.seed
            );
            generic_source_reports(model, n, args.seed, hw, GENERIC_DET_FLOOR, opts)
                .into_iter()
                .map(|r| (r.source, Some(r)))
                .collect()
        }
        _ => bail!("invariant needs exactly one of --sources FILE or --random N"),
    };
    let mut out = String::from("zeta_re,zeta_im,n_fixed,n_real,sum_re,sum_im,real_sum,valid\n");
    let mut violations = Vec::new();
    for (k, (zeta, rep)) in rows.iter().enumerate() {
        let z = crate::fmt::complex_pair(zeta.zeta);
        match rep {
            Some(r) => {
                out.push_str(&format!(
                    "{z},{},{},{},{},{},{}\n",
                    r.n_fixed(),
                    r.n_real(),
                    num(r.complex_sum.re),
                    num(r.complex_sum.im),
                    num(r.real_sum),
                    r.valid
                ));
                if r.valid && (r.complex_sum - 1.0).norm() >= args.tol {
                    violations.push((k, *zeta, r.complex_sum));
                }
            }
            None => out.push_str(&format!("{z},0,0,nan,nan,nan,false\n")),
        }
    }
    emit(args, &out)?;
    for (k, zeta, sum) in &violations {
        eprintln!(
            "row {}: source ({}) has sum {} + {}i",
            k + 1,
            crate::fmt::complex_pair(zeta.zeta),
            num(sum.re),
            num(sum.im)
        );
    }
    Ok(Outcome::from_bool(violations.is_empty()))
}

fn polyline_csv(curves: &[(&str, &[Polyline])]) -> String {
    let mut out = String::from("polyline_id,curve,vertex,x,y\n");
    let mut id = 0;
    for (name, lines) in curves {
        for line in lines.iter() {
            for (k, z) in line.iter().enumerate() {
                out.push_str(&format!("{id},{name},{k},{},{}\n", num(z.re), num(z.im)));
            }
            id += 1;
        }
    }
    out
}

fn scan(model: &DeflectionModel, args: &Common, opts: &SolveOptions) -> Result<Outcome> {
    let text = args
        .window
        .as_deref()
        .ok_or_else(|| anyhow!("scan needs --window CX,CY,HW,HH,NX,NY"))?;
    let window = parse_window(text)?;
    let grid = multiplicity_scan(model, &window, opts)?;
    let mut out = String::from("y1,y2,count\n");
    for j in 0..window.ny {
        for i in 0..window.nx {
            let z = window.node(i, j);
            out.push_str(&format!(
                "{},{},{}\n",
                num(z.re),
                num(z.im),
                grid.count(i, j)
            ));
        }
    }
    emit(args, &out)?;
    eprintln!("max_count = {}", grid.max_count);
    if let Some(path) = &args.svg {
        write_svg(path, &svg::scan(&grid))?;
    }
    Ok(Outcome::Pass)
}

/// Lens-plane window used when `caustics` gets no `--window`.
fn default_caustics_window() -> Window {
    Window::new(Complex::new(0.0, 0.0), 2.5, 2.5, 256, 256).expect("valid default window")
}

fn caustics(model: &DeflectionModel, args: &Common) -> Result<Outcome> {
    let window = match &args.window {
        Some(w) => parse_window(w)?,
        None => default_caustics_window(),
    };
    let critical = match critical_curves(model, &window) {
        Ok(c) => c,
        Err(e) => bail!("{e}"),
    };
    let caustic = map_to_caustics(model, &critical);
    emit(
        args,
        &polyline_csv(&[("critical", &critical), ("caustic", &caustic)]),
    )?;
    if let Some(path) = &args.svg {
        write_svg(path, &svg::curves(&window, &critical, &caustic))?;
    }
    Ok(Outcome::Pass)
}

/// Collects PASS/FAIL lines; stops at the first failure.
struct Checks {
    text: String,
    failed: bool,
}

impl Checks {
    fn check(&mut self, name: &str, ok: bool, detail: String) -> bool {
        if self.failed {
            return false;
        }
        let status = if ok { "PASS" } else { "FAIL" };
        self.text.push_str(&format!("{status} {name}: {detail}\n"));
        self.failed = !ok;
        ok
    }
}

fn sort_images(mut v: Vec<(Complex, f64)>) -> Vec<(Complex, f64)> {
    v.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    v
}

/// Greatest position and relative-magnification mismatch between two image
/// lists of equal length, matched by nearest neighbour. `None` when the
/// lists cannot be paired one-to-one within `pos_tol`.
fn match_images(a: &[(Complex, f64)], b: &[(Complex, f64)], pos_tol: f64) -> Option<(f64, f64)> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let (mut dpos, mut dmu) = (0.0_f64, 0.0_f64);
    for (z, mu) in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, (w, _))| (k, (z - w).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        if d > pos_tol {
            return None;
        }
        used[k] = true;
        dpos = dpos.max(d);
        dmu = dmu.max((mu - b[k].1).abs() / (1.0 + mu.abs()));
    }
    Some((dpos, dmu))
}

fn oracle_pairs(r: &OracleResult) -> Vec<(Complex, f64)> {
    sort_images(
        r.images
            .iter()
            .copied()
            .zip(r.mus.iter().copied())
            .collect(),
    )
}

fn solver_real_pairs(rep: &InvariantReport) -> Vec<(Complex, f64)> {
    sort_images(
        rep.points
            .iter()
            .filter(|r| r.point.is_real)
            .filter_map(|r| r.mu.map(|mu| (r.point.z1, mu.re)))
            .collect(),
    )
}

fn closed_form(model: &DeflectionModel, zeta: SourcePos) -> Option<OracleResult> {
    match model.potential() {
        PotentialForm::Filament { sigma0 } => Some(filament_closed_form(*sigma0, zeta)),
        PotentialForm::PointEnsemble { masses, positions }
            if masses.len() == 1 && positions[0] == Complex::new(0.0, 0.0) =>
        {
            point_mass_closed_form(masses[0], zeta).ok()
        }
        _ => None,
    }
}

fn verify(model: &DeflectionModel, args: &Common, opts: &SolveOptions) -> Result<Outcome> {
    let mut checks = Checks {
        text: format!("model: {}\n", model.name),
        failed: false,
    };
    let report = model.validate();
    checks.check(
        "degree_condition",
        report.degree_ok,
        "deg numerator < deg denominator".into(),
    );
    checks.check(
        "conjugate_symmetry",
        report.symmetry_ok,
        format!("max error {}", num(report.max_symmetry_error)),
    );
    checks.check(
        "decay",
        report.decay_ok,
        format!("max {}", num(report.max_decay)),
    );

    if !checks.failed {
        let n = args.random.unwrap_or(VERIFY_SOURCES);
        let hw = source_half_width(args)?;
        let reports = generic_source_reports(model, n, args.seed, hw, GENERIC_DET_FLOOR, opts);

        let worst = reports
            .iter()
            .map(|r| (r.complex_sum - 1.0).norm())
            .fold(0.0, f64::max);
        checks.check(
            "lefschetz_sum",
            worst < args.tol,
            format!(
                "max |sum mu - 1| = {} over {} sources",
                num(worst),
                reports.len()
            ),
        );

        let mut worst_jac = 0.0_f64;
        let mut jac_ok = true;
        for r in &reports {
            for rec in r.points.iter().filter(|p| p.point.is_real) {
                let res = jacobian_identity_residual(model, &rec.point)?;
                let scale = 1.0 + rec.point.transversal_det.norm();
                worst_jac = worst_jac.max(res / scale);
                jac_ok &= res < JACOBIAN_TOL * scale;
            }
        }
        checks.check(
            "jacobian_identity",
            jac_ok,
            format!("max relative residual {}", num(worst_jac)),
        );

        let oracle: Vec<OracleResult> = reports
            .par_iter()
            .map(|r| {
                let hw = 5.0_f64.max(2.0 * r.source.zeta.norm() + 2.0);
                let search = Window {
                    half_width: hw,
                    half_height: hw,
                    ..lensfix_core::oracle::default_search_window()
                };
                multistart_newton_real(model, r.source, &search, VERIFY_STARTS)
            })
            .collect();
        let mut worst = (0.0_f64, 0.0_f64);
        let mut bad = None;
        for (r, o) in reports.iter().zip(&oracle) {
            match match_images(&solver_real_pairs(r), &oracle_pairs(o), ORACLE_POS_TOL) {
                Some((dp, dm)) => worst = (worst.0.max(dp), worst.1.max(dm)),
                None => {
                    bad = Some(r.source);
                    break;
                }
            }
        }
        let ok = bad.is_none() && worst.1 < ORACLE_MU_TOL;
        let detail = match bad {
            Some(z) => format!(
                "real images differ from multistart Newton at source ({})",
                crate::fmt::complex_pair(z.zeta)
            ),
            None => format!(
                "max |dz| {}, max relative |dmu| {}",
                num(worst.0),
                num(worst.1)
            ),
        };
        checks.check("multistart_oracle", ok, detail);

        if reports
            .iter()
            .all(|r| closed_form(model, r.source).is_some())
            && !reports.is_empty()
        {
            let mut worst = 0.0_f64;
            let mut ok = true;
            for r in &reports {
                let cf = closed_form(model, r.source).expect("closed form exists");
                match match_images(&solver_real_pairs(r), &oracle_pairs(&cf), CLOSED_FORM_TOL) {
                    Some((dp, dm)) => worst = worst.max(dp).max(dm),
                    None => ok = false,
                }
            }
            checks.check(
                "closed_form",
                ok && worst < CLOSED_FORM_TOL,
                format!("max mismatch {}", num(worst)),
            );
        }
    }
    emit(args, &checks.text)?;
    if checks.failed {
        let first = checks
            .text
            .lines()
            .find(|l| l.starts_with("FAIL"))
            .unwrap_or("");
        eprintln!("{first}");
    }
    Ok(Outcome::from_bool(!checks.failed))
}
