//! Reproducible tables and verification reports.
//!
//! Every command is a pure function from a [`RunConfig`] (plus arguments)
//! to a [`Report`]; identical inputs produce byte-identical output. Reals
//! are printed with 17 significant digits in JSON (round-trip safe) and 12
//! in CSV. Randomized suites are driven by the seeded generator in the
//! config, never by ambient entropy.
//!
//! Exit-status contract: 0 success / verdict true, 1 verdict false,
//! 2 usage error, 3 resource error, 4 internal error.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::cocycle::{self, recurrence_residual, GrowthBound, PotentialKind, RadialProfile};
use crate::edgespace::{divergence, gradient, unit_flow, EdgeFunction, VertexFunction};
use crate::error::{Error, Result};
use crate::green::{self, project};
use crate::kernels::{self, CndReport, KernelMatrix};
use crate::tree::{self, TreeParams, VertexId};

/// Common knobs shared by every command.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub q: u32,
    pub tol: f64,
    pub radius: u32,
    pub format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: 2,
            tol: 1e-10,
            radius: 8,
            format: OutputFormat::Csv,
            seed: 42,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<TreeParams> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "--tol must be positive, got {}",
                self.tol
            )));
        }
        if self.radius < 1 {
            return Err(Error::InvalidParameter(
                "--radius must be at least 1".into(),
            ));
        }
        TreeParams::new(self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One table cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    /// Empty in CSV, null in JSON.
    Missing,
}

/// A titled table with fixed column order: the unit of all command output.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// A command's full output: metadata plus one or more tables.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub meta: Vec<(String, String)>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn meta_entry(&mut self, key: &str, value: impl std::fmt::Display) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k} = {v}");
        }
        for table in &self.tables {
            let _ = writeln!(out, "# table: {}", table.name);
            let _ = writeln!(out, "{}", table.columns.join(","));
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        out
    }

    fn render_json(&self) -> String {
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"meta\": {{");
        for (i, (k, v)) in self.meta.iter().enumerate() {
            let comma = if i + 1 < self.meta.len() { "," } else { "" };
            let _ = writeln!(out, "    {}: {}{comma}", json_string(k), json_string(v));
        }
        let _ = writeln!(out, "  }},");
        let _ = writeln!(out, "  \"tables\": [");
        for (t, table) in self.tables.iter().enumerate() {
            let _ = writeln!(out, "    {{");
            let _ = writeln!(out, "      \"name\": {},", json_string(&table.name));
            let cols: Vec<String> = table.columns.iter().map(|c| json_string(c)).collect();
            let _ = writeln!(out, "      \"columns\": [{}],", cols.join(", "));
            let _ = writeln!(out, "      \"rows\": [");
            for (r, row) in table.rows.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(json_cell).collect();
                let comma = if r + 1 < table.rows.len() { "," } else { "" };
                let _ = writeln!(out, "        [{}]{comma}", cells.join(", "));
            }
            let _ = writeln!(out, "      ]");
            let comma = if t + 1 < self.tables.len() { "," } else { "" };
            let _ = writeln!(out, "    }}{comma}");
        }
        let _ = writeln!(out, "  ]");
        out.push('}');
        out.push('\n');
        out
    }
}

// 12 significant digits for human tables.
fn csv_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format!("{v:.11e}"),
        Cell::Text(v) => v.clone(),
        Cell::Bool(v) => v.to_string(),
        Cell::Missing => String::new(),
    }
}

// 17 significant digits: f64 round-trip safe.
fn json_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format!("{v:.16e}"),
        Cell::Text(v) => json_string(v),
        Cell::Bool(v) => v.to_string(),
        Cell::Missing => "null".to_string(),
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn parse_vertex(params: &TreeParams, text: &str) -> Result<VertexId> {
    VertexId::parse(text, params)
}

/// `green`: closed-form value against the Neumann partial-sum table.
pub fn cmd_green(config: &RunConfig, x: &str, y: &str, steps: u32) -> Result<Report> {
    let params = config.validate()?;
    let x = parse_vertex(&params, x)?;
    let y = parse_vertex(&params, y)?;
    let closed = green::green_value(&params, &x, &y);
    let radius = config.radius.max(tree::distance(&x, &y));
    let mut report = Report::default();
    report.meta_entry("q", params.q());
    report.meta_entry("x", &x);
    report.meta_entry("y", &y);
    report.meta_entry("distance", tree::distance(&x, &y));
    report.meta_entry("radius", radius);
    let mut table = Table::new("neumann_convergence", &["n", "partial_sum", "closed_form", "gap"]);
    for n in (0..=steps).step_by(usize::max(1, steps as usize / 20)) {
        let partial = green::neumann_partial(&params, &x, &y, n, radius)?;
        table.push(vec![
            Cell::Int(n as i64),
            Cell::Float(partial),
            Cell::Float(closed),
            Cell::Float(closed - partial),
        ]);
    }
    report.tables.push(table);
    Ok(report)
}

/// Hard cap for profile tables; far beyond it the q^(−n) terms are below
/// f64 resolution and the exact rational cross-checks overflow.
pub const PROFILE_N_MAX_LIMIT: u32 = 120;

/// `profile`: measured harmonic-cocycle growth against the closed form,
/// the growth bound, and the recurrence residual.
pub fn cmd_profile(config: &RunConfig, n_max: u32) -> Result<Report> {
    let params = config.validate()?;
    if n_max < 1 {
        return Err(Error::InvalidParameter("--n-max must be at least 1".into()));
    }
    if n_max > PROFILE_N_MAX_LIMIT {
        // The tol-driven materialization radius this would ask from a
        // truncated table is n_max plus the tail collar.
        let mut collar = 0u32;
        while green::projection_tail_bound(&params, 1.0, collar) > config.tol && collar < 400 {
            collar += 1;
        }
        return Err(Error::Resource(format!(
            "profile tables are limited to n_max ≤ {PROFILE_N_MAX_LIMIT} (requested {n_max}; \
             a fully materialized truncation at tol {} would need support radius {})",
            config.tol,
            n_max + collar
        )));
    }
    let root = VertexId::root();
    let mut measured = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let y = VertexId::new(vec![0; n as usize], &params)?;
        let res = cocycle::projected_cocycle(params, &root, &y, config.tol)?;
        measured.push(res.harmonic_norm_sq);
    }
    let profile = RadialProfile::new(params, measured.clone())?;
    let w = cocycle::harmonic_norm_sq(&params, 1);
    let bound = GrowthBound::from_first_step(params, w)?;

    let mut report = Report::default();
    report.meta_entry("q", params.q());
    report.meta_entry("tol", format!("{:.16e}", config.tol));
    report.meta_entry("w", format!("{w:.16e}"));
    let mut table = Table::new(
        "growth_profile",
        &["n", "measured", "closed_form", "bound", "slack", "residual"],
    );
    for n in 0..=n_max {
        let closed = cocycle::harmonic_norm_sq(&params, n);
        let b = bound.value(n);
        let residual = if n >= 1 && n < n_max {
            Cell::Float(recurrence_residual(&profile, n)?)
        } else {
            Cell::Missing
        };
        table.push(vec![
            Cell::Int(n as i64),
            Cell::Float(measured[n as usize]),
            Cell::Float(closed),
            Cell::Float(b),
            Cell::Float(b - measured[n as usize]),
            residual,
        ]);
    }
    report.tables.push(table);
    Ok(report)
}

/// `project`: the projection split of the unit flow from x to y.
pub fn cmd_project(config: &RunConfig, x: &str, y: &str) -> Result<Report> {
    let params = config.validate()?;
    let x = parse_vertex(&params, x)?;
    let y = parse_vertex(&params, y)?;
    let chi = unit_flow(params, &x, &y);
    let res = project(&chi, config.tol)?;
    let mut report = Report::default();
    report.meta_entry("q", params.q());
    report.meta_entry("x", &x);
    report.meta_entry("y", &y);
    report.meta_entry("distance", tree::distance(&x, &y));
    report.meta_entry("tol", format!("{:.16e}", config.tol));
    report.meta_entry("support_radius", res.support_radius);
    report.meta_entry("tail_bound", format!("{:.16e}", res.tail_bound));
    report.meta_entry("input_norm_sq", format!("{:.16e}", res.input_norm_sq));
    report.meta_entry(
        "gradient_norm_sq",
        format!("{:.16e}", res.gradient_norm_sq),
    );
    report.meta_entry(
        "harmonic_norm_sq",
        format!("{:.16e}", res.harmonic_norm_sq),
    );
    report.meta_entry(
        "closed_form_gradient_norm_sq",
        format!(
            "{:.16e}",
            green::projected_flow_norm_sq(&params, tree::distance(&x, &y))
        ),
    );
    let mut table = Table::new("projection_entries", &["part", "source", "target", "value"]);
    for (part, func) in [
        ("gradient", &res.gradient_part),
        ("harmonic", &res.harmonic_part),
    ] {
        for entry in func.to_entries() {
            table.push(vec![
                Cell::Text(part.to_string()),
                Cell::Text(entry.source),
                Cell::Text(entry.target),
                Cell::Float(entry.value),
            ]);
        }
    }
    report.tables.push(table);
    Ok(report)
}

/// `potentials`: the three virtual potentials and their divergences.
pub fn cmd_potentials(config: &RunConfig) -> Result<Report> {
    let params = config.validate()?;
    let root = VertexId::root();
    let pot = cocycle::virtual_potentials(params, &root, config.radius, config.tol)?;
    let mut report = Report::default();
    report.meta_entry("q", params.q());
    report.meta_entry("basepoint", &root);
    report.meta_entry("support_radius", pot.support_radius);
    report.meta_entry(
        "expected_divergence",
        format!(
            "{:.16e}",
            cocycle::VirtualPotential::expected_divergence(&params)
        ),
    );

    let mut edges = Table::new(
        "potential_entries",
        &["source", "target", "distance_potential", "green_potential", "harmonic_potential"],
    );
    for (key, value) in pot.harmonic_potential.canonical_entries() {
        let parent = key.parent().expect("non-root key");
        let f = pot
            .distance_potential
            .oriented_value(&parent, key)
            .expect("adjacent");
        let g = pot
            .green_potential
            .oriented_value(&parent, key)
            .expect("adjacent");
        edges.push(vec![
            Cell::Text(parent.to_string()),
            Cell::Text(key.to_string()),
            Cell::Float(f),
            Cell::Float(g),
            Cell::Float(value),
        ]);
    }
    report.tables.push(edges);

    let div = divergence(&pot.harmonic_potential);
    let mut table = Table::new("harmonic_potential_divergence", &["vertex", "divergence"]);
    for v in tree::ball(&params, &root, config.radius.saturating_sub(1)) {
        table.push(vec![Cell::Text(v.to_string()), Cell::Float(div.value(&v))]);
    }
    report.tables.push(table);
    Ok(report)
}

/// Kernel file parsing: CSV (header of addresses, then rows) or JSON.
pub fn parse_kernel_file(params: &TreeParams, content: &str, json: bool) -> Result<KernelMatrix> {
    if json {
        parse_kernel_json(params, content)
    } else {
        parse_kernel_csv(params, content)
    }
}

#[derive(Deserialize)]
struct KernelJson {
    points: Vec<String>,
    values: Vec<Vec<f64>>,
}

fn parse_kernel_json(params: &TreeParams, content: &str) -> Result<KernelMatrix> {
    let parsed: KernelJson = serde_json::from_str(content).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let points = parsed
        .points
        .iter()
        .map(|s| VertexId::parse(s, params))
        .collect::<Result<Vec<_>>>()?;
    KernelMatrix::new(points, parsed.values)
}

fn parse_kernel_csv(params: &TreeParams, content: &str) -> Result<KernelMatrix> {
    let mut lines = content.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty kernel file".into(),
    })?;
    let mut fields = header.split(',');
    let lead = fields.next().unwrap_or_default();
    if lead != "vertex" {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("kernel header must start with 'vertex', got {lead:?}"),
        });
    }
    let points: Vec<VertexId> = fields
        .enumerate()
        .map(|(i, s)| {
            VertexId::parse(s.trim(), params).map_err(|e| Error::Parse {
                line: 1,
                column: i + 2,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = points.len();
    let mut rows = Vec::with_capacity(n);
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label = fields.next().unwrap_or_default().trim().to_string();
        let expect = points
            .get(rows.len())
            .map(|p| p.to_string())
            .unwrap_or_default();
        if label != expect {
            return Err(Error::Parse {
                line: idx + 1,
                column: 1,
                message: format!("row label {label:?} does not match header order ({expect:?})"),
            });
        }
        let mut row = Vec::with_capacity(n);
        for (col, field) in fields.enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: idx + 1,
                column: col + 2,
                message: format!("not a number: {field:?}"),
            })?;
            row.push(value);
        }
        if row.len() != n {
            return Err(Error::Parse {
                line: idx + 1,
                column: row.len() + 2,
                message: format!("expected {n} values, got {}", row.len()),
            });
        }
        rows.push(row);
    }
    KernelMatrix::new(points, rows)
}

/// Renders a kernel matrix in the JSON file format ingested by
/// [`parse_kernel_file`].
pub fn kernel_to_json(kernel: &KernelMatrix) -> String {
    let mut out = String::from("{\n  \"points\": [");
    let points: Vec<String> = kernel
        .points()
        .iter()
        .map(|p| json_string(&p.to_string()))
        .collect();
    let _ = write!(out, "{}", points.join(", "));
    out.push_str("],\n  \"values\": [\n");
    for i in 0..kernel.len() {
        let row: Vec<String> = (0..kernel.len())
            .map(|j| format!("{:.16e}", kernel.value(i, j)))
            .collect();
        let comma = if i + 1 < kernel.len() { "," } else { "" };
        let _ = writeln!(out, "    [{}]{comma}", row.join(", "));
    }
    out.push_str("  ]\n}\n");
    out
}

/// Renders a kernel matrix in the CSV file format ingested by
/// [`parse_kernel_file`].
pub fn kernel_to_csv(kernel: &KernelMatrix) -> String {
    let mut out = String::from("vertex");
    for p in kernel.points() {
        let _ = write!(out, ",{p}");
    }
    out.push('\n');
    for (i, p) in kernel.points().iter().enumerate() {
        let _ = write!(out, "{p}");
        for j in 0..kernel.len() {
            let _ = write!(out, ",{:.11e}", kernel.value(i, j));
        }
        out.push('\n');
    }
    out
}

/// `kernel-check`: CND verdict for a kernel file. The boolean is the
/// verdict (drives the exit status).
pub fn cmd_kernel_check(config: &RunConfig, content: &str, json: bool) -> Result<(Report, bool)> {
    let params = config.validate()?;
    let kernel = parse_kernel_file(&params, content, json)?;
    let report_data = kernels::cnd_check(&kernel, config.tol)?;
    let mut report = Report::default();
    fill_cnd_report(&mut report, &kernel, &report_data);
    Ok((report, report_data.is_cnd))
}

fn fill_cnd_report(report: &mut Report, kernel: &KernelMatrix, data: &CndReport) {
    report.meta_entry("points", kernel.len());
    report.meta_entry("is_cnd", data.is_cnd);
    report.meta_entry(
        "min_centered_eigenvalue",
        format!("{:.16e}", data.min_centered_eigenvalue),
    );
    if let Some(alpha) = &data.witness {
        let mut table = Table::new("witness", &["vertex", "coefficient", "quadratic_form"]);
        let form = kernel.quadratic_form(alpha);
        for (p, a) in kernel.points().iter().zip(alpha) {
            table.push(vec![
                Cell::Text(p.to_string()),
                Cell::Float(*a),
                Cell::Float(form),
            ]);
        }
        report.tables.push(table);
    }
}

/// `valette`: build a Valette kernel from a ψ assignment, check CND and
/// invariance. ψ is either constant or read from `vertex,value` lines.
pub fn cmd_valette(
    config: &RunConfig,
    psi_const: Option<f64>,
    psi_file: Option<&str>,
) -> Result<(Report, bool)> {
    let params = config.validate()?;
    let points = tree::ball(&params, &VertexId::root(), config.radius.min(3));
    let psi: BTreeMap<VertexId, f64> = match (psi_const, psi_file) {
        (Some(c), None) => points.iter().map(|x| (x.clone(), c)).collect(),
        (None, Some(content)) => {
            let mut map = BTreeMap::new();
            for (idx, line) in content.lines().enumerate() {
                if line.trim().is_empty() || line.starts_with('#') {
                    continue;
                }
                let (vertex, value) = line.split_once(',').ok_or(Error::Parse {
                    line: idx + 1,
                    column: 1,
                    message: "expected 'vertex,value'".into(),
                })?;
                let v = VertexId::parse(vertex.trim(), &params)?;
                let value: f64 = value.trim().parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    column: 2,
                    message: format!("not a number: {value:?}"),
                })?;
                map.insert(v, value);
            }
            map
        }
        _ => {
            return Err(Error::InvalidParameter(
                "valette needs exactly one of --psi-const or --psi-file".into(),
            ))
        }
    };
    let kernel = kernels::valette_kernel(&params, &psi, &points)?;
    let cnd = kernels::cnd_check(&kernel, config.tol)?;
    let inv = kernels::invariance_defect(&params, &psi, &points)?;
    let mut report = Report::default();
    report.meta_entry("q", params.q());
    report.meta_entry("points", points.len());
    report.meta_entry("is_cnd", cnd.is_cnd);
    report.meta_entry(
        "min_centered_eigenvalue",
        format!("{:.16e}", cnd.min_centered_eigenvalue),
    );
    report.meta_entry("kernel_defect", format!("{:.16e}", inv.kernel_defect));
    report.meta_entry(
        "constancy_defect",
        format!("{:.16e}", inv.constancy_defect),
    );
    let mut table = Table::new("psi", &["vertex", "psi"]);
    for x in &points {
        table.push(vec![Cell::Text(x.to_string()), Cell::Float(psi[x])]);
    }
    report.tables.push(table);
    Ok((report, cnd.is_cnd))
}

/// Tolerances pinned for the verification suites (shared by `selftest` and
/// the acceptance tests).
pub mod criteria {
    /// Norm-identity agreement for measured vs closed-form quantities.
    pub const NORM_IDENTITY: f64 = 1e-8;
    /// Exact-arithmetic residuals.
    pub const EXACT: f64 = 1e-12;
    /// Projection tolerance handed to `project`.
    pub const PROJECTION_TOL: f64 = 1e-10;
    /// Growth-bound slack floor.
    pub const SLACK_FLOOR: f64 = -1e-10;
    /// Neumann oracle parameters and tolerance.
    pub const NEUMANN_TERMS: u32 = 60;
    pub const NEUMANN_RADIUS: u32 = 40;
    pub const NEUMANN_TOL: f64 = 1e-6;
    /// CND minimum-eigenvalue floor.
    pub const CND_EIGENVALUE_FLOOR: f64 = -1e-10;
    /// GNS reconstruction error cap.
    pub const GNS_ERROR: f64 = 1e-10;
    /// Invariance defect: zero threshold and positive threshold.
    pub const INVARIANCE_ZERO: f64 = 1e-12;
    pub const INVARIANCE_POSITIVE: f64 = 1e-6;
}

/// One line of the self-test: criterion name, pass flag, detail.
#[derive(Debug, Clone)]
pub struct SelftestLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of the self-test suite.
#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub lines: Vec<SelftestLine>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            let status = if line.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status}  {}  ({})", line.name, line.detail);
        }
        let _ = writeln!(
            out,
            "{}: {} of {} criteria passed",
            if self.all_passed() { "OK" } else { "FAIL" },
            self.lines.iter().filter(|l| l.passed).count(),
            self.lines.len()
        );
        out
    }
}

fn push_line(report: &mut SelftestReport, name: &str, passed: bool, detail: String) {
    report.lines.push(SelftestLine {
        name: name.to_string(),
        passed,
        detail,
    });
}

/// `selftest`: runs the ten verification suites and reports one line per
/// criterion. Deterministic for a fixed seed.
pub fn run_selftest(config: &RunConfig) -> Result<SelftestReport> {
    config.validate()?;
    let mut report = SelftestReport { lines: Vec::new() };
    let root = VertexId::root();

    // 1. Projection norm identity.
    {
        let mut worst: f64 = 0.0;
        for q in [2u32, 3, 4] {
            let params = TreeParams::new(q)?;
            for d in 1..=10u32 {
                let y = VertexId::new(vec![0; d as usize], &params)?;
                let res = project(&unit_flow(params, &root, &y), criteria::PROJECTION_TOL)?;
                let want = green::projected_flow_norm_sq(&params, d);
                worst = worst.max((res.gradient_norm_sq - want).abs());
            }
        }
        push_line(
            &mut report,
            "1 projection norm identity",
            worst < criteria::NORM_IDENTITY,
            format!("max |measured − closed| = {worst:.3e}"),
        );
    }

    // 2. Optimal cocycle growth plus radiality.
    {
        let mut worst: f64 = 0.0;
        for q in [2u32, 3] {
            let params = TreeParams::new(q)?;
            for d in 0..=10u32 {
                let y = VertexId::new(vec![0; d as usize], &params)?;
                let res = cocycle::projected_cocycle(params, &root, &y, criteria::PROJECTION_TOL)?;
                let want = cocycle::harmonic_norm_sq(&params, d);
                worst = worst.max((res.harmonic_norm_sq - want).abs());
            }
        }
        let params = TreeParams::new(2)?;
        let mut radial_spread: f64 = 0.0;
        for n in 1..=5u32 {
            let mut first = None;
            for y in tree::sphere(&params, &root, n).into_iter().take(10) {
                let res = cocycle::projected_cocycle(params, &root, &y, criteria::PROJECTION_TOL)?;
                match first {
                    None => first = Some(res.harmonic_norm_sq),
                    Some(f) => radial_spread = radial_spread.max((res.harmonic_norm_sq - f).abs()),
                }
            }
        }
        push_line(
            &mut report,
            "2 optimal cocycle growth and radiality",
            worst < criteria::NORM_IDENTITY && radial_spread < criteria::NORM_IDENTITY,
            format!("max norm defect {worst:.3e}, sphere spread {radial_spread:.3e}"),
        );
    }

    // 3. Recurrence residuals.
    {
        let mut worst_measured: f64 = 0.0;
        let mut worst_haagerup: f64 = 0.0;
        for q in [2u32, 3] {
            let params = TreeParams::new(q)?;
            let measured: Vec<f64> = (0..=10u32)
                .map(|d| cocycle::harmonic_norm_sq(&params, d))
                .collect();
            let measured = RadialProfile::new(params, measured)?;
            for n in 1..=9u32 {
                worst_measured =
                    worst_measured.max(recurrence_residual(&measured, n)?.abs());
            }
            let haag = RadialProfile::new(params, (0..=10).map(f64::from).collect())?;
            let expected = (q as f64 - 1.0) / (q as f64 + 1.0) - 1.0;
            for n in 1..=9u32 {
                worst_haagerup =
                    worst_haagerup.max((recurrence_residual(&haag, n)? - expected).abs());
            }
        }
        push_line(
            &mut report,
            "3 recurrence residuals",
            worst_measured < criteria::NORM_IDENTITY && worst_haagerup < criteria::EXACT,
            format!("measured {worst_measured:.3e}, flat profile defect {worst_haagerup:.3e}"),
        );
    }

    // 4. Growth bound on randomly perturbed admissible profiles.
    {
        let params = TreeParams::new(2)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut min_slack = f64::INFINITY;
        for _ in 0..200 {
            let w = rng.random_range(0.2..1.5);
            let profile = perturbed_admissible_profile(params, 10, w, &mut rng)?;
            for row in cocycle::growth_bound_check(&profile)? {
                min_slack = min_slack.min(row.slack);
            }
        }
        push_line(
            &mut report,
            "4 growth bound on perturbed profiles",
            min_slack >= criteria::SLACK_FLOOR,
            format!("min slack {min_slack:.3e}"),
        );
    }

    // 5. Green inversion and the Neumann oracle.
    {
        let mut worst_inversion: f64 = 0.0;
        for q in [2u32, 3] {
            let params = TreeParams::new(q)?;
            let gd = green::green_delta(&params, &root, 8);
            for v in tree::ball(&params, &root, 7) {
                let want = if v == root { -1.0 } else { 0.0 };
                worst_inversion =
                    worst_inversion.max((crate::edgespace::laplacian(&gd, &v) - want).abs());
            }
        }
        let params = TreeParams::new(2)?;
        let partial = green::neumann_partial(
            &params,
            &root,
            &root,
            criteria::NEUMANN_TERMS,
            criteria::NEUMANN_RADIUS,
        )?;
        let target = params.q() as f64 / (params.q() as f64 - 1.0);
        let neumann_gap = (partial - target).abs();
        push_line(
            &mut report,
            "5 green inversion and neumann oracle",
            worst_inversion < criteria::EXACT && neumann_gap < criteria::NEUMANN_TOL,
            format!(
                "inversion residual {worst_inversion:.3e}, neumann gap {neumann_gap:.3e} \
                 (terms {}, radius {})",
                criteria::NEUMANN_TERMS,
                criteria::NEUMANN_RADIUS
            ),
        );
    }

    // 6. Operator identities on seeded random sparse inputs.
    {
        let params = TreeParams::new(2)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
        let verts = tree::ball(&params, &root, 4);
        let mut worst_adjoint: f64 = 0.0;
        let mut worst_laplacian: f64 = 0.0;
        for _ in 0..100 {
            let f = random_vertex_fn(params, &verts, &mut rng);
            let xi = random_edge_fn(params, &verts, &mut rng);
            let lhs = divergence(&xi).inner(&f)?;
            let rhs = xi.inner(&gradient(&f))?;
            worst_adjoint = worst_adjoint.max((lhs - rhs).abs());
            let composite = divergence(&gradient(&f));
            for v in tree::ball(&params, &root, 5) {
                let a = crate::edgespace::laplacian(&f, &v);
                worst_laplacian = worst_laplacian.max((a + composite.value(&v)).abs());
            }
        }
        let mut worst_split: f64 = 0.0;
        for _ in 0..20 {
            let xi = random_edge_fn(params, &verts, &mut rng);
            let res = project(&xi, criteria::PROJECTION_TOL)?;
            let split =
                (res.input_norm_sq - res.gradient_norm_sq - res.harmonic_norm_sq).abs();
            worst_split = worst_split.max(split);
        }
        push_line(
            &mut report,
            "6 operator identities",
            worst_adjoint < criteria::EXACT
                && worst_laplacian < criteria::EXACT
                && worst_split < criteria::NORM_IDENTITY,
            format!(
                "adjointness {worst_adjoint:.3e}, composition {worst_laplacian:.3e}, \
                 split {worst_split:.3e}"
            ),
        );
    }

    // 7. Virtual coboundaries.
    {
        let params = TreeParams::new(2)?;
        let pot = cocycle::virtual_potentials(params, &root, 8, 0.2)?;
        let mut magnitude_defect: f64 = 0.0;
        for (_, value) in pot.distance_potential.canonical_entries() {
            magnitude_defect = magnitude_defect.max((value.abs() - 0.5).abs());
        }
        let div = divergence(&pot.harmonic_potential);
        let want = cocycle::VirtualPotential::expected_divergence(&params);
        let mut div_defect: f64 = 0.0;
        for v in tree::ball(&params, &root, 7) {
            div_defect = div_defect.max((div.value(&v).abs() - want).abs());
        }
        let mut chi_exact = true;
        let mut entry_defect: f64 = 0.0;
        for d in 0..=4u32 {
            let y = VertexId::new(vec![0; d as usize], &params)?;
            let diff = cocycle::coboundary_difference(&pot, PotentialKind::Distance, &y, 0.2)?;
            chi_exact &= diff == cocycle::haagerup(params, &root, &y);
            let harm = cocycle::coboundary_difference(&pot, PotentialKind::Harmonic, &y, 0.2)?;
            let res = cocycle::projected_cocycle(params, &root, &y, criteria::PROJECTION_TOL)?;
            for (key, value) in harm.canonical_entries() {
                let parent = key.parent().expect("non-root");
                let want = res.harmonic_part.oriented_value(&parent, key)?;
                entry_defect = entry_defect.max((value - want).abs());
            }
        }
        push_line(
            &mut report,
            "7 virtual coboundaries",
            magnitude_defect == 0.0
                && div_defect < criteria::EXACT
                && chi_exact
                && entry_defect < criteria::NORM_IDENTITY,
            format!(
                "|f| defect {magnitude_defect:.1e}, divergence defect {div_defect:.3e}, \
                 chi exact: {chi_exact}, harmonic entry defect {entry_defect:.3e}"
            ),
        );
    }

    // 8. Harmonic-part lower bound.
    {
        let mut ok = true;
        let mut min_margin = f64::INFINITY;
        for q in [2u32, 3, 4] {
            let params = TreeParams::new(q)?;
            let pnorm = green::transition_operator_norm(&params);
            for d in 1..=12u32 {
                let harmonic = cocycle::harmonic_norm_sq(&params, d);
                let bound = d as f64 - 4.0 / ((1.0 - pnorm) * (1.0 - pnorm));
                min_margin = min_margin.min(harmonic - bound);
                ok &= harmonic >= bound;
            }
        }
        push_line(
            &mut report,
            "8 harmonic lower bound",
            ok,
            format!("min margin {min_margin:.3e}"),
        );
    }

    // 9. CND suite.
    {
        let params = TreeParams::new(2)?;
        let pts = tree::ball(&params, &root, 3);
        let dist_ok = kernels::cnd_check(&KernelMatrix::from_distances(pts.clone()), 1e-10)?;
        let pure = KernelMatrix::from_radial(pts.clone(), |d| {
            kernels::pure_unbounded_negative_type(&params, d, 1.0).expect("scale > 0")
        });
        let pure_ok = kernels::cnd_check(&pure, 1e-10)?;
        let neg = KernelMatrix::from_radial(
            pts.iter().take(6).cloned().collect(),
            |d| -(d as f64),
        );
        let neg_report = kernels::cnd_check(&neg, 1e-10)?;
        let witness_ok = match (&neg_report.witness, neg_report.is_cnd) {
            (Some(alpha), false) => neg.quadratic_form(alpha) > 0.0,
            _ => false,
        };
        let emb = kernels::gns_embed(&KernelMatrix::from_distances(pts.clone()), 1e-10)?;
        // Brute-force agreement on a small kernel.
        let small: Vec<VertexId> = pts.iter().take(8).cloned().collect();
        let small_kernel = KernelMatrix::from_distances(small);
        let small_report = kernels::cnd_check(&small_kernel, 1e-10)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(2));
        let mut max_form = f64::NEG_INFINITY;
        for _ in 0..1000 {
            let mut alpha: Vec<f64> = (0..small_kernel.len())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let mean = alpha.iter().sum::<f64>() / alpha.len() as f64;
            for a in &mut alpha {
                *a -= mean;
            }
            max_form = max_form.max(small_kernel.quadratic_form(&alpha));
        }
        let brute_agree = small_report.is_cnd == (max_form <= 1e-9);
        push_line(
            &mut report,
            "9 cnd suite",
            dist_ok.min_centered_eigenvalue >= criteria::CND_EIGENVALUE_FLOOR
                && pure_ok.min_centered_eigenvalue >= criteria::CND_EIGENVALUE_FLOOR
                && !neg_report.is_cnd
                && witness_ok
                && emb.reconstruction_error < criteria::GNS_ERROR
                && brute_agree,
            format!(
                "distance min eig {:.3e}, pure min eig {:.3e}, gns error {:.3e}",
                dist_ok.min_centered_eigenvalue,
                pure_ok.min_centered_eigenvalue,
                emb.reconstruction_error
            ),
        );
    }

    // 10. Valette kernels and invariance.
    {
        let params = TreeParams::new(2)?;
        let pts = tree::ball(&params, &root, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(3));
        let mut all_cnd = true;
        let mut min_nonconstant_defect = f64::INFINITY;
        for _ in 0..20 {
            let psi: BTreeMap<VertexId, f64> = pts
                .iter()
                .map(|x| (x.clone(), rng.random_range(0.0..1.0 / 3.0)))
                .collect();
            let kernel = kernels::valette_kernel(&params, &psi, &pts)?;
            all_cnd &= kernels::cnd_check(&kernel, 1e-10)?.is_cnd;
            let inv = kernels::invariance_defect(&params, &psi, &pts)?;
            min_nonconstant_defect = min_nonconstant_defect.min(inv.kernel_defect);
        }
        let constant: BTreeMap<VertexId, f64> =
            pts.iter().map(|x| (x.clone(), 0.25)).collect();
        let const_report = kernels::invariance_defect(&params, &constant, &pts)?;
        push_line(
            &mut report,
            "10 valette kernels and invariance",
            all_cnd
                && const_report.kernel_defect <= criteria::INVARIANCE_ZERO
                && min_nonconstant_defect > criteria::INVARIANCE_POSITIVE,
            format!(
                "all CND: {all_cnd}, constant defect {:.3e}, min non-constant defect {:.3e}",
                const_report.kernel_defect, min_nonconstant_defect
            ),
        );
    }

    Ok(report)
}

/// An admissible profile: the optimal profile's recurrence driven with
/// seeded nonpositive defect terms.
pub fn perturbed_admissible_profile(
    params: TreeParams,
    n_max: u32,
    w: f64,
    rng: &mut ChaCha8Rng,
) -> Result<RadialProfile> {
    let q = params.q() as f64;
    let deg = q + 1.0;
    let mut values = vec![0.0, w];
    for n in 1..n_max {
        let defect = -rng.random_range(0.0..0.2 * w);
        let phi_next =
            (deg * (values[n as usize] + w + defect) - values[n as usize - 1]) / q;
        values.push(phi_next.max(0.0));
    }
    RadialProfile::new(params, values)
}

fn random_vertex_fn(
    params: TreeParams,
    verts: &[VertexId],
    rng: &mut ChaCha8Rng,
) -> VertexFunction {
    let mut f = VertexFunction::zero(params);
    for _ in 0..6 {
        let x = verts[rng.random_range(0..verts.len())].clone();
        f.set(x, rng.random_range(-1.0..1.0));
    }
    f
}

fn random_edge_fn(params: TreeParams, verts: &[VertexId], rng: &mut ChaCha8Rng) -> EdgeFunction {
    let mut xi = EdgeFunction::zero(params);
    for _ in 0..6 {
        let x = verts[rng.random_range(0..verts.len())].clone();
        if !x.is_root() {
            xi.set_canonical(x, rng.random_range(-1.0..1.0))
                .expect("non-root");
        }
    }
    xi
}
