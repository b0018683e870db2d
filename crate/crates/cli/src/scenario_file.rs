//! Text format for scenario files.
//!
//! A file holds one or more scenarios. Each starts with a `[scenario]`
//! header and owns the sections that follow it until the next `[scenario]`:
//!
//! ```text
//! [scenario]
//! name = demo              # letters, digits, '-', '_', '.'
//! family = SO              # GL | SO | SL
//! n = 3
//! observer = lfso_passive  # lfso_passive | lfso_direct | lpso_passive | lpso_direct
//! gains = 1                # a0, a1, ..., a_{d-1}; d is the chain length
//! log = principal          # principal | so3_closed_form
//!
//! [plant]
//! group = 0, -1, 0; 1, 0, 0; 0, 0, 1   # rows split by ';', entries by ','
//! x2 = zero                             # chain slots x2 ... xd, default zero
//!
//! [estimate]
//! group = identity
//!
//! [input]
//! kind = sinusoid          # zero | constant | sinusoid | tabulated
//! value = ...              # constant only
//! knot = 0.5 | ...         # tabulated only, repeated, "time | matrix"
//!
//! [noise]
//! sigma = 0.4
//! seed = 1                 # required when sigma > 0
//! batch = 50               # number of consecutive seeds to run
//!
//! [integrator]
//! scheme = rkmk4           # lie_euler | rkmk4 | rk4_project
//! dt = 0.001
//! reproject_tol = 1e-12
//!
//! [run]
//! t_end = 10
//! output_period = 0.01
//! ```
//!
//! `#` starts a comment. Matrices also accept the keywords `identity` and
//! `zero`. [`serialize_scenarios`] writes every field explicitly, with
//! floats in shortest round-trip form, so parsing its output gives back
//! the same scenarios.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use lieobs::dynamics::{InitialState, InputSignal, IntegratorConfig, Scenario, Scheme};
use lieobs::group::{GroupFamily, GroupKind};
use lieobs::observer::{LogMethod, ObserverGains, ObserverKind};
use lieobs::SquareMatrix;

use crate::error::ParseError;

/// A scenario together with the number of consecutive seeds to run it for.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    /// Seeds `seed, seed + 1, …, seed + batch − 1`; ignored without a seed.
    pub batch: u32,
}

impl ScenarioSpec {
    pub fn single(scenario: Scenario) -> Self {
        ScenarioSpec { scenario, batch: 1 }
    }
}

pub const DEFAULT_OUTPUT_PERIOD: f64 = 1e-2;
pub const DEFAULT_T_END_FULL_STATE: f64 = 10.0;
pub const DEFAULT_T_END_CHAIN: f64 = 20.0;

const SECTIONS: [&str; 7] = ["scenario", "plant", "estimate", "input", "noise", "integrator", "run"];

#[derive(Debug)]
struct Entry {
    line: usize,
    value: String,
}

#[derive(Debug, Default)]
struct Block {
    header_line: usize,
    /// (section, key) → entries in file order; only `knot` may repeat.
    fields: BTreeMap<(String, String), Vec<Entry>>,
}

fn allowed_key(section: &str, key: &str) -> bool {
    match section {
        "scenario" => matches!(key, "name" | "family" | "n" | "observer" | "gains" | "log"),
        "plant" | "estimate" => key == "group" || chain_slot(key).is_some(),
        "input" => matches!(key, "kind" | "value" | "knot"),
        "noise" => matches!(key, "sigma" | "seed" | "batch"),
        "integrator" => matches!(key, "scheme" | "dt" | "reproject_tol"),
        "run" => matches!(key, "t_end" | "output_period"),
        _ => false,
    }
}

/// `x2`, `x3`, … → 2, 3, …
fn chain_slot(key: &str) -> Option<usize> {
    let k: usize = key.strip_prefix('x')?.parse().ok()?;
    (k >= 2 && key == format!("x{k}")).then_some(k)
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

/// Parses every scenario in `text`.
pub fn parse_scenarios(text: &str) -> Result<Vec<ScenarioSpec>, ParseError> {
    let mut blocks: Vec<Block> = Vec::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ParseError::new(line, None, "unterminated section header"))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(ParseError::new(line, None, format!("unknown section [{name}]")));
            }
            if name == "scenario" {
                blocks.push(Block {
                    header_line: line,
                    ..Block::default()
                });
            } else if blocks.is_empty() {
                return Err(ParseError::new(
                    line,
                    None,
                    format!("[{name}] appears before any [scenario] header"),
                ));
            }
            section = Some(name.to_owned());
            continue;
        }
        let (Some(sec), Some(block)) = (section.as_deref(), blocks.last_mut()) else {
            return Err(ParseError::new(line, None, "expected a [scenario] header"));
        };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ParseError::new(line, None, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        let field = format!("{sec}.{key}");
        if !allowed_key(sec, key) {
            return Err(ParseError::new(line, Some(&field), "unknown key"));
        }
        if value.is_empty() {
            return Err(ParseError::new(line, Some(&field), "missing value"));
        }
        let slot = block.fields.entry((sec.to_owned(), key.to_owned())).or_default();
        if let Some(first) = slot.first() {
            if key != "knot" {
                return Err(ParseError::new(
                    line,
                    Some(&field),
                    format!("duplicate key, first given on line {}", first.line),
                ));
            }
        }
        slot.push(Entry {
            line,
            value: value.to_owned(),
        });
    }
    if blocks.is_empty() {
        return Err(ParseError::new(text.lines().count().max(1), None, "no [scenario] found"));
    }
    blocks.iter().map(build).collect()
}

/// Parses a file that must contain exactly one scenario.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, ParseError> {
    let mut all = parse_scenarios(text)?;
    if all.len() != 1 {
        let line = text.lines().count().max(1);
        return Err(ParseError::new(
            line,
            None,
            format!("expected one scenario, found {}", all.len()),
        ));
    }
    Ok(all.remove(0))
}

struct Reader<'a> {
    block: &'a Block,
}

impl<'a> Reader<'a> {
    fn get(&self, section: &str, key: &str) -> Option<&'a Entry> {
        self.block
            .fields
            .get(&(section.to_owned(), key.to_owned()))
            .and_then(|v| v.first())
    }

    fn all(&self, section: &str, key: &str) -> &'a [Entry] {
        self.block
            .fields
            .get(&(section.to_owned(), key.to_owned()))
            .map_or(&[], Vec::as_slice)
    }

    fn require(&self, section: &str, key: &str) -> Result<&'a Entry, ParseError> {
        self.get(section, key).ok_or_else(|| {
            ParseError::new(
                self.block.header_line,
                Some(&format!("{section}.{key}")),
                "required field is missing",
            )
        })
    }

    fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64, ParseError> {
        match self.get(section, key) {
            Some(e) => parse_f64(&e.value, e.line, &format!("{section}.{key}")),
            None => Ok(default),
        }
    }
}

fn parse_f64(s: &str, line: usize, field: &str) -> Result<f64, ParseError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| ParseError::new(line, Some(field), format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(ParseError::new(line, Some(field), "value must be finite"));
    }
    Ok(v)
}

fn parse_matrix(s: &str, n: usize, line: usize, field: &str) -> Result<SquareMatrix, ParseError> {
    match s.trim() {
        "identity" => return Ok(SquareMatrix::identity(n)),
        "zero" => return Ok(SquareMatrix::zeros(n)),
        _ => {}
    }
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != n {
        return Err(ParseError::new(
            line,
            Some(field),
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    let mut entries = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != n {
            return Err(ParseError::new(
                line,
                Some(field),
                format!("row {} has {} entries, expected {n}", i + 1, cells.len()),
            ));
        }
        for c in cells {
            entries.push(parse_f64(c, line, field)?);
        }
    }
    Ok(SquareMatrix::new(n, &entries).expect("entry count checked above"))
}

fn parse_initial(r: &Reader, section: &str, n: usize, d: usize) -> Result<InitialState, ParseError> {
    let g = r.require(section, "group")?;
    let group = parse_matrix(&g.value, n, g.line, &format!("{section}.group"))?;
    for ((sec, key), entries) in &r.block.fields {
        if sec == section {
            if let Some(k) = chain_slot(key) {
                if k > d {
                    return Err(ParseError::new(
                        entries[0].line,
                        Some(&format!("{section}.{key}")),
                        format!("chain length is {d}, so slots run x2..x{d}"),
                    ));
                }
            }
        }
    }
    let mut algebra = Vec::with_capacity(d.saturating_sub(1));
    for k in 2..=d {
        let key = format!("x{k}");
        algebra.push(match r.get(section, &key) {
            Some(e) => parse_matrix(&e.value, n, e.line, &format!("{section}.{key}"))?,
            None => SquareMatrix::zeros(n),
        });
    }
    Ok(InitialState { group, algebra })
}

fn parse_input(r: &Reader, n: usize) -> Result<InputSignal, ParseError> {
    let kind = r.get("input", "kind").map_or("zero", |e| e.value.as_str());
    let kind_line = r.get("input", "kind").map_or(r.block.header_line, |e| e.line);
    let value = r.get("input", "value");
    let knots = r.all("input", "knot");
    let forbid = |present: bool, key: &str, line: usize| {
        if present {
            Err(ParseError::new(
                line,
                Some(&format!("input.{key}")),
                format!("not used by input kind `{kind}`"),
            ))
        } else {
            Ok(())
        }
    };
    if kind != "constant" {
        forbid(value.is_some(), "value", value.map_or(0, |e| e.line))?;
    }
    if kind != "tabulated" {
        forbid(!knots.is_empty(), "knot", knots.first().map_or(0, |e| e.line))?;
    }
    match kind {
        "zero" => Ok(InputSignal::Zero),
        "sinusoid" => Ok(InputSignal::Sinusoid),
        "constant" => {
            let e = r.require("input", "value")?;
            Ok(InputSignal::Constant(parse_matrix(&e.value, n, e.line, "input.value")?))
        }
        "tabulated" => {
            if knots.is_empty() {
                return Err(ParseError::new(kind_line, Some("input.knot"), "tabulated input needs knots"));
            }
            knots
                .iter()
                .map(|e| {
                    let (t, m) = e.value.split_once('|').ok_or_else(|| {
                        ParseError::new(e.line, Some("input.knot"), "expected `time | matrix`")
                    })?;
                    Ok((
                        parse_f64(t, e.line, "input.knot")?,
                        parse_matrix(m, n, e.line, "input.knot")?,
                    ))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(InputSignal::Tabulated)
        }
        other => Err(ParseError::new(
            kind_line,
            Some("input.kind"),
            format!("unknown input kind `{other}`"),
        )),
    }
}

fn build(block: &Block) -> Result<ScenarioSpec, ParseError> {
    let r = Reader { block };

    let name = r.require("scenario", "name")?;
    if !valid_name(&name.value) {
        return Err(ParseError::new(
            name.line,
            Some("scenario.name"),
            "use only letters, digits, '-', '_' and '.'",
        ));
    }

    let fam = r.require("scenario", "family")?;
    let kind = match fam.value.as_str() {
        "GL" => GroupKind::GL,
        "SO" => GroupKind::SO,
        "SL" => GroupKind::SL,
        other => {
            return Err(ParseError::new(
                fam.line,
                Some("scenario.family"),
                format!("unknown family `{other}`, expected GL, SO or SL"),
            ))
        }
    };
    let n_entry = r.require("scenario", "n")?;
    let n: usize = n_entry
        .value
        .parse()
        .map_err(|_| ParseError::new(n_entry.line, Some("scenario.n"), "expected a positive integer"))?;
    let family = GroupFamily::new(kind, n)
        .map_err(|e| ParseError::new(n_entry.line, Some("scenario.n"), e.to_string()))?;

    let obs = r.require("scenario", "observer")?;
    let observer = ObserverKind::from_name(&obs.value).ok_or_else(|| {
        ParseError::new(obs.line, Some("scenario.observer"), format!("unknown observer `{}`", obs.value))
    })?;

    let g = r.require("scenario", "gains")?;
    let coeffs = g
        .value
        .split(',')
        .map(|c| parse_f64(c, g.line, "scenario.gains"))
        .collect::<Result<Vec<_>, _>>()?;
    let gains = ObserverGains::new(coeffs)
        .map_err(|e| ParseError::new(g.line, Some("scenario.gains"), e.to_string()))?;
    let d = gains.order();

    let log_method = match r.get("scenario", "log") {
        Some(e) => LogMethod::from_name(&e.value).ok_or_else(|| {
            ParseError::new(e.line, Some("scenario.log"), format!("unknown log method `{}`", e.value))
        })?,
        None => LogMethod::default(),
    };

    let plant = parse_initial(&r, "plant", n, d)?;
    let estimate = parse_initial(&r, "estimate", n, d)?;
    let input = parse_input(&r, n)?;

    let noise_sigma = r.f64_or("noise", "sigma", 0.0)?;
    let seed = match r.get("noise", "seed") {
        Some(e) => Some(
            e.value
                .parse::<u64>()
                .map_err(|_| ParseError::new(e.line, Some("noise.seed"), "expected an unsigned integer"))?,
        ),
        None => None,
    };
    let batch = match r.get("noise", "batch") {
        Some(e) => match e.value.parse::<u32>() {
            Ok(b) if b >= 1 => b,
            _ => return Err(ParseError::new(e.line, Some("noise.batch"), "expected an integer >= 1")),
        },
        None => 1,
    };

    let defaults = IntegratorConfig::default();
    let scheme = match r.get("integrator", "scheme") {
        Some(e) => Scheme::from_name(&e.value).ok_or_else(|| {
            ParseError::new(e.line, Some("integrator.scheme"), format!("unknown scheme `{}`", e.value))
        })?,
        None => defaults.scheme,
    };
    let integrator = IntegratorConfig {
        scheme,
        dt: r.f64_or("integrator", "dt", defaults.dt)?,
        reproject_tol: r.f64_or("integrator", "reproject_tol", defaults.reproject_tol)?,
    };

    let default_t_end = if observer.is_full_state() {
        DEFAULT_T_END_FULL_STATE
    } else {
        DEFAULT_T_END_CHAIN
    };
    let t_end = r.f64_or("run", "t_end", default_t_end)?;
    let output_period = r.f64_or("run", "output_period", DEFAULT_OUTPUT_PERIOD)?;

    Ok(ScenarioSpec {
        scenario: Scenario {
            name: name.value.clone(),
            family,
            observer,
            gains,
            plant,
            estimate,
            input,
            noise_sigma,
            seed,
            integrator,
            t_end,
            output_period,
            log_method,
        },
        batch,
    })
}

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_matrix(m: &SquareMatrix) -> String {
    let n = m.dim();
    let same_bits = |other: SquareMatrix| {
        m.as_slice()
            .iter()
            .zip(other.as_slice())
            .all(|(a, b)| a.to_bits() == b.to_bits())
    };
    if same_bits(SquareMatrix::identity(n)) {
        return "identity".into();
    }
    if same_bits(SquareMatrix::zeros(n)) {
        return "zero".into();
    }
    m.as_slice()
        .chunks(n)
        .map(|row| row.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(", "))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Writes one scenario in the grammar accepted by [`parse_scenarios`].
pub fn serialize_scenario(spec: &ScenarioSpec) -> String {
    let s = &spec.scenario;
    let mut out = String::new();
    let gains: Vec<String> = s.gains.as_slice().iter().map(|&a| fmt_f64(a)).collect();
    // writing into a String cannot fail
    let _ = writeln!(out, "[scenario]");
    let _ = writeln!(out, "name = {}", s.name);
    let _ = writeln!(out, "family = {}", s.family.kind().name());
    let _ = writeln!(out, "n = {}", s.family.dim());
    let _ = writeln!(out, "observer = {}", s.observer.name());
    let _ = writeln!(out, "gains = {}", gains.join(", "));
    let _ = writeln!(out, "log = {}", s.log_method.name());
    for (section, init) in [("plant", &s.plant), ("estimate", &s.estimate)] {
        let _ = writeln!(out, "\n[{section}]");
        let _ = writeln!(out, "group = {}", fmt_matrix(&init.group));
        for (k, m) in init.algebra.iter().enumerate() {
            let _ = writeln!(out, "x{} = {}", k + 2, fmt_matrix(m));
        }
    }
    let _ = writeln!(out, "\n[input]");
    let _ = writeln!(out, "kind = {}", s.input.name());
    match &s.input {
        InputSignal::Constant(m) => {
            let _ = writeln!(out, "value = {}", fmt_matrix(m));
        }
        InputSignal::Tabulated(knots) => {
            for (t, m) in knots {
                let _ = writeln!(out, "knot = {} | {}", fmt_f64(*t), fmt_matrix(m));
            }
        }
        InputSignal::Zero | InputSignal::Sinusoid => {}
    }
    let _ = writeln!(out, "\n[noise]");
    let _ = writeln!(out, "sigma = {}", fmt_f64(s.noise_sigma));
    if let Some(seed) = s.seed {
        let _ = writeln!(out, "seed = {seed}");
    }
    let _ = writeln!(out, "batch = {}", spec.batch);
    let _ = writeln!(out, "\n[integrator]");
    let _ = writeln!(out, "scheme = {}", s.integrator.scheme.name());
    let _ = writeln!(out, "dt = {}", fmt_f64(s.integrator.dt));
    let _ = writeln!(out, "reproject_tol = {}", fmt_f64(s.integrator.reproject_tol));
    let _ = writeln!(out, "\n[run]");
    let _ = writeln!(out, "t_end = {}", fmt_f64(s.t_end));
    let _ = writeln!(out, "output_period = {}", fmt_f64(s.output_period));
    out
}

pub fn serialize_scenarios(specs: &[ScenarioSpec]) -> String {
    specs
        .iter()
        .map(serialize_scenario)
        .collect::<Vec<_>>()
        .join("\n")
}
