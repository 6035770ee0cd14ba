//! Run configuration: flat `key = value` lines grouped under `[section]`
//! headers. `#` and `;` start comments. Every error names its line.
//!
//! ```text
//! [scenario]
//! name = hardy          # single_node | grid | hardy | trace_hardy
//! dim = 3
//!
//! [subordinator]
//! name = stable
//! beta = 1
//!
//! [run]
//! couplings = 0.5, 1
//! relative = true
//! sizes = 9, 13, 17
//! tasks = classify, green
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::bernstein::{catalog_lookup, BernsteinEntry, Params};
use crate::criticality::FamilyOptions;
use crate::hardy::{build_scenario, HardyKind, HardyScenario};
use crate::lattice::Boundary;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line, or 0 when the problem is not tied to one line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            f.write_str(&self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line, message: message.into() })
}

/// One section: key → (raw value, line).
#[derive(Debug, Clone, Default)]
struct Section {
    line: usize,
    entries: BTreeMap<String, (String, usize)>,
}

const SECTIONS: [&str; 4] = ["scenario", "subordinator", "run", "sweep"];

fn strip_comment(line: &str) -> &str {
    let cut = line.find(['#', ';']).unwrap_or(line.len());
    line[..cut].trim()
}

fn parse_sections(text: &str) -> Result<BTreeMap<String, Section>, ConfigError> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return err(ln, format!("unterminated section header `{line}`"));
            };
            let name = name.trim().to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return err(ln, format!("unknown section [{name}]; expected one of {}", SECTIONS.join(", ")));
            }
            if sections.contains_key(&name) {
                return err(ln, format!("section [{name}] appears twice"));
            }
            sections.insert(name.clone(), Section { line: ln, entries: BTreeMap::new() });
            current = Some(name);
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return err(ln, format!("expected `key = value`, found `{line}`"));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return err(ln, format!("invalid key `{k}`"));
        }
        let Some(sec) = current.as_ref() else {
            return err(ln, format!("`{k}` appears before any section header"));
        };
        let entries = &mut sections.get_mut(sec).expect("current section exists").entries;
        if entries.insert(k.to_string(), (v.to_string(), ln)).is_some() {
            return err(ln, format!("duplicate key `{k}` in [{sec}]"));
        }
    }
    Ok(sections)
}

/// Typed access to one section that tracks which keys were consumed.
struct Reader<'a> {
    name: &'a str,
    section: Option<&'a Section>,
    used: Vec<String>,
}

impl<'a> Reader<'a> {
    fn new(sections: &'a BTreeMap<String, Section>, name: &'a str) -> Self {
        Reader { name, section: sections.get(name), used: Vec::new() }
    }

    fn raw(&mut self, key: &str) -> Option<(&'a str, usize)> {
        let (v, l) = self.section?.entries.get(key)?;
        self.used.push(key.to_string());
        Some((v.as_str(), *l))
    }

    fn header_line(&self) -> usize {
        self.section.map_or(0, |s| s.line)
    }

    fn string(&mut self, key: &str) -> Result<Option<(String, usize)>, ConfigError> {
        Ok(self.raw(key).map(|(v, l)| (v.to_string(), l)))
    }

    fn required_string(&mut self, key: &str) -> Result<(String, usize), ConfigError> {
        let line = self.header_line();
        let name = self.name;
        self.string(key)?.map_or_else(|| err(line, format!("[{name}] is missing `{key}`")), Ok)
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, l)) => parse_float(v, l).map(Some),
        }
    }

    fn positive(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let line = self.raw_line(key);
        let v = self.float(key)?.unwrap_or(default);
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            err(line, format!("`{key}` must be positive, got {v}"))
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, l)) => v.parse::<usize>().map(Some).or_else(|_| err(l, format!("`{key}` must be a nonnegative integer, got `{v}`"))),
        }
    }

    fn floats(&mut self, key: &str) -> Result<Option<(Vec<f64>, usize)>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, l)) => {
                let vals = split_list(v, l)?.into_iter().map(|s| parse_float(s, l)).collect::<Result<Vec<_>, _>>()?;
                Ok(Some((vals, l)))
            }
        }
    }

    fn counts(&mut self, key: &str) -> Result<Option<(Vec<usize>, usize)>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, l)) => {
                let vals = split_list(v, l)?
                    .into_iter()
                    .map(|s| s.parse::<usize>().or_else(|_| err(l, format!("`{s}` is not a nonnegative integer"))))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Some((vals, l)))
            }
        }
    }

    fn boolean(&mut self, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, l)) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => Ok(Some(true)),
                "false" | "no" | "0" => Ok(Some(false)),
                _ => err(l, format!("`{key}` must be true or false, got `{v}`")),
            },
        }
    }

    fn raw_line(&self, key: &str) -> usize {
        self.section.and_then(|s| s.entries.get(key)).map_or(self.header_line(), |e| e.1)
    }

    /// Everything not consumed, as a numeric parameter map.
    fn remaining_params(&mut self) -> Result<Params, ConfigError> {
        let mut out = Params::new();
        if let Some(sec) = self.section {
            for (k, (v, l)) in &sec.entries {
                if !self.used.contains(k) {
                    let x = match v.as_str() {
                        "+" => 1.0,
                        "-" => -1.0,
                        _ => parse_float(v, *l)?,
                    };
                    out.insert(k.clone(), x);
                }
            }
        }
        self.used.extend(out.keys().cloned());
        Ok(out)
    }

    fn finish(self) -> Result<(), ConfigError> {
        if let Some(sec) = self.section {
            for (k, (_, l)) in &sec.entries {
                if !self.used.contains(k) {
                    return err(*l, format!("unknown key `{k}` in [{}]", self.name));
                }
            }
        }
        Ok(())
    }
}

fn parse_float(v: &str, line: usize) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(line, format!("`{v}` is not a finite number")),
    }
}

fn split_list(v: &str, line: usize) -> Result<Vec<&str>, ConfigError> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return err(line, format!("empty item in list `{v}`"));
    }
    Ok(parts)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSpec {
    /// One node with killing `k` and negative weight `coupling·w`.
    SingleNode { killing: f64, weight: f64 },
    /// Grid with the negative radial weight `coupling·|x|^{-p}`.
    Grid { dim: usize, spacing: f64, p: f64, boundary: Boundary },
    Hardy(HardyScenario),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Task {
    Classify,
    Green,
    Wave,
    Check,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Green => "green",
            Task::Wave => "wave",
            Task::Check => "check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Lambda,
    Size,
    Beta,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Lambda => "lambda",
            Axis::Size => "size",
            Axis::Beta => "beta",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lambda" => Ok(Axis::Lambda),
            "size" => Ok(Axis::Size),
            "beta" => Ok(Axis::Beta),
            _ => Err(format!("unknown axis `{s}`; expected lambda, size or beta")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepSpec {
    pub lambda: Option<Vec<f64>>,
    pub size: Option<Vec<usize>>,
    pub beta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario_name: String,
    pub scenario: ScenarioSpec,
    pub subordinator: BernsteinEntry,
    pub couplings: Vec<f64>,
    /// Couplings are multiples of the per-size critical coupling.
    pub relative: bool,
    pub sizes: Vec<usize>,
    pub tasks: Vec<Task>,
    /// Trichotomy tolerance on `λ(μ)`.
    pub tol: f64,
    pub family: FamilyOptions,
    pub output: PathBuf,
    pub seed: u64,
    pub workers: usize,
    pub sweep: SweepSpec,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError { line: 0, message: format!("{}: {e}", path.display()) })?;
        let mut cfg = Self::parse(&text)?;
        if cfg.output.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.output = dir.join(&cfg.output);
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let sections = parse_sections(text)?;
        if !sections.contains_key("scenario") {
            return err(0, "missing [scenario] section");
        }

        let mut run = Reader::new(&sections, "run");
        let (sizes, sizes_line) = match run.counts("sizes")? {
            Some((s, l)) => (s, l),
            None => (Vec::new(), run.header_line()),
        };
        if sizes.windows(2).any(|w| w[1] <= w[0]) {
            return err(sizes_line, "sizes must be strictly ascending");
        }
        if sizes.contains(&0) {
            return err(sizes_line, "sizes must be positive");
        }

        let mut sc = Reader::new(&sections, "scenario");
        let (scenario_name, name_line) = sc.required_string("name")?;
        let scenario = match scenario_name.as_str() {
            "single_node" => {
                let killing = sc.positive("killing", 2.0)?;
                let weight = sc.positive("weight", 1.0)?;
                ScenarioSpec::SingleNode { killing, weight }
            }
            "grid" => {
                let dim_line = sc.raw_line("dim");
                let dim = sc.count("dim")?.map_or_else(|| err(dim_line, "[scenario] grid needs `dim`"), Ok)?;
                if dim == 0 {
                    return err(dim_line, "`dim` must be at least 1");
                }
                let spacing = sc.positive("spacing", 1.0)?;
                let p = sc.positive("p", 2.0)?;
                let boundary = match sc.string("boundary")? {
                    None => Boundary::Dirichlet,
                    Some((b, l)) => match b.as_str() {
                        "dirichlet" => Boundary::Dirichlet,
                        "free" => Boundary::Free,
                        _ => return err(l, format!("boundary must be dirichlet or free, got `{b}`")),
                    },
                };
                if let Some(&n) = sizes.iter().find(|&&n| n % 2 == 0) {
                    return err(sizes_line, format!("grid sizes must be odd so a node sits at the origin, got {n}"));
                }
                ScenarioSpec::Grid { dim, spacing, p, boundary }
            }
            "hardy" | "trace_hardy" => {
                let kind = if scenario_name == "hardy" { HardyKind::Hardy } else { HardyKind::TraceHardy };
                let dim_line = sc.raw_line("dim");
                let dim = sc.count("dim")?.map_or_else(|| err(dim_line, "[scenario] needs `dim`"), Ok)?;
                let alpha = sc.positive("alpha", 2.0)?;
                let p = sc.float("p")?;
                let spacing = sc.positive("spacing", 1.0)?;
                let hs = build_scenario(kind, dim, alpha, p, spacing, &sizes).or_else(|e| err(name_line, e.to_string()))?;
                ScenarioSpec::Hardy(hs)
            }
            other => return err(name_line, format!("unknown scenario `{other}`; expected single_node, grid, hardy or trace_hardy")),
        };
        sc.finish()?;

        let subordinator = if sections.contains_key("subordinator") {
            let mut sub = Reader::new(&sections, "subordinator");
            let (name, line) = sub.required_string("name")?;
            let params = sub.remaining_params()?;
            let entry = if name == "identity" && params.is_empty() {
                BernsteinEntry::identity()
            } else {
                catalog_lookup(&name, &params).or_else(|e| err(line, e.to_string()))?
            };
            sub.finish()?;
            entry
        } else {
            BernsteinEntry::identity()
        };

        let couplings = run.floats("couplings")?.map_or(vec![1.0], |c| c.0);
        if couplings.iter().any(|&c| c < 0.0) {
            let l = run.raw_line("couplings");
            return err(l, "couplings must be nonnegative");
        }
        let relative = run.boolean("relative")?.unwrap_or(false);
        let tasks_line = run.raw_line("tasks");
        let tasks = match run.string("tasks")? {
            None => return err(run.header_line(), "[run] is missing `tasks`"),
            Some((t, l)) => {
                let mut tasks = Vec::new();
                for item in split_list(&t, l)? {
                    let task = match item {
                        "classify" => Task::Classify,
                        "green" => Task::Green,
                        "wave" => Task::Wave,
                        "check" => Task::Check,
                        _ => return err(l, format!("unknown task `{item}`; expected classify, green, wave or check")),
                    };
                    if !tasks.contains(&task) {
                        tasks.push(task);
                    }
                }
                tasks
            }
        };
        if tasks.is_empty() {
            return err(tasks_line, "tasks must be nonempty");
        }
        let defaults = FamilyOptions::default();
        let tol = run.positive("tol", 1e-9)?;
        let family = FamilyOptions {
            cauchy_tol: run.positive("cauchy_tol", defaults.cauchy_tol)?,
            slope_tol: run.positive("slope_tol", defaults.slope_tol)?,
            dense_limit: run.count("dense_limit")?.unwrap_or(defaults.dense_limit),
            ..defaults
        };
        let output = PathBuf::from(run.string("output")?.map_or_else(|| "subcrit-out".to_string(), |o| o.0));
        let seed_line = run.raw_line("seed");
        let seed = match run.string("seed")? {
            None => 0,
            Some((s, _)) => s.parse::<u64>().or_else(|_| err(seed_line, format!("seed must be a 64-bit unsigned integer, got `{s}`")))?,
        };
        let workers_line = run.raw_line("workers");
        let workers = run.count("workers")?.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if workers == 0 {
            return err(workers_line, "workers must be at least 1");
        }
        let needs_sizes = !matches!(scenario, ScenarioSpec::SingleNode { .. });
        if needs_sizes && sizes.is_empty() {
            return err(run.header_line(), "[run] needs `sizes` for this scenario");
        }
        run.finish()?;

        let mut sw = Reader::new(&sections, "sweep");
        let lambda = sw.floats("lambda")?.map(|v| v.0);
        let size_line = sw.raw_line("size");
        let size = sw.counts("size")?.map(|v| v.0);
        if let Some(s) = &size {
            if s.windows(2).any(|w| w[1] <= w[0]) || s.contains(&0) {
                return err(size_line, "sweep sizes must be positive and strictly ascending");
            }
        }
        let beta_line = sw.raw_line("beta");
        let beta = sw.floats("beta")?.map(|v| v.0);
        if let Some(b) = &beta {
            if b.iter().any(|&x| !(x > 0.0 && x <= 2.0)) {
                return err(beta_line, "beta values must lie in (0, 2]");
            }
        }
        sw.finish()?;

        Ok(RunConfig {
            scenario_name,
            scenario,
            subordinator,
            couplings,
            relative,
            sizes,
            tasks,
            tol,
            family,
            output,
            seed,
            workers,
            sweep: SweepSpec { lambda, size, beta },
        })
    }

    pub fn has(&self, task: Task) -> bool {
        self.tasks.contains(&task)
    }
}
