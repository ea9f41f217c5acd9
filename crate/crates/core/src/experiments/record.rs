//! Line-oriented text persistence for experiment results.
//!
//! ```text
//! dispersal-record v1
//! kind = growth
//! symbol = pm:1.5
//! timestamp = 1760000000
//! digest = <sha256 of the canonical parameters>
//! [params]
//! radii = 64,128,256
//! [series]
//! 64,0.5
//! [fit]
//! slope = 0.5
//! intercept = -1
//! residual = 0
//! [metrics]
//! calibration = 0.25
//! [result]
//! pass = true
//! [end]
//! ```
//!
//! `[fit]` appears only when the series admits a fit; `[end]` guards against
//! truncation. Floats use Rust's `{:?}` form: shortest exact round trip, `.` as
//! decimal separator, exponent notation only for extreme magnitudes.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use super::fit::{fit_exponent, ExponentFit};
use crate::error::{Error, Result};

const HEADER: &str = "dispersal-record v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    Evolve,
    Maximal,
    Growth,
    Rate,
    Transfer,
    Smoothing,
    Positive,
    Check,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Evolve,
        ExperimentKind::Maximal,
        ExperimentKind::Growth,
        ExperimentKind::Rate,
        ExperimentKind::Transfer,
        ExperimentKind::Smoothing,
        ExperimentKind::Positive,
        ExperimentKind::Check,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Evolve => "evolve",
            ExperimentKind::Maximal => "maximal",
            ExperimentKind::Growth => "growth",
            ExperimentKind::Rate => "rate",
            ExperimentKind::Transfer => "transfer",
            ExperimentKind::Smoothing => "smoothing",
            ExperimentKind::Positive => "positive",
            ExperimentKind::Check => "check",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Record(format!("unknown experiment kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub kind: ExperimentKind,
    pub symbol: String,
    pub params: BTreeMap<String, String>,
    pub series: Vec<(f64, f64)>,
    /// Present iff the series has at least three points, all positive.
    pub fit: Option<ExponentFit>,
    pub metrics: BTreeMap<String, f64>,
    pub pass: bool,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub digest: String,
}

fn fit_for(series: &[(f64, f64)]) -> Option<ExponentFit> {
    if series.len() >= 3 && series.iter().all(|&(a, v)| a > 0.0 && v > 0.0) {
        fit_exponent(series).ok()
    } else {
        None
    }
}

/// sha256 over `kind`, `symbol` and the sorted parameters, as lowercase hex.
pub fn config_digest(kind: ExperimentKind, symbol: &str, params: &BTreeMap<String, String>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("{kind}\n{symbol}\n"));
    for (k, v) in params {
        hasher.update(format!("{k}={v}\n"));
    }
    hasher.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl ExperimentRecord {
    /// Builds a record stamped with the current time; the fit and digest are derived.
    pub fn new(
        kind: ExperimentKind,
        symbol: impl Into<String>,
        params: BTreeMap<String, String>,
        series: Vec<(f64, f64)>,
        metrics: BTreeMap<String, f64>,
        pass: bool,
    ) -> Result<Self> {
        let symbol = symbol.into();
        if series.is_empty() {
            return Err(Error::Record("a record needs a nonempty series".into()));
        }
        check_text(&symbol)?;
        for (k, v) in &params {
            check_key(k)?;
            check_text(v)?;
        }
        for k in metrics.keys() {
            check_key(k)?;
        }
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(Self {
            kind,
            digest: config_digest(kind, &symbol, &params),
            fit: fit_for(&series),
            symbol,
            params,
            series,
            metrics,
            pass,
            timestamp,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "kind = {}", self.kind);
        let _ = writeln!(out, "symbol = {}", self.symbol);
        let _ = writeln!(out, "timestamp = {}", self.timestamp);
        let _ = writeln!(out, "digest = {}", self.digest);
        out.push_str("[params]\n");
        for (k, v) in &self.params {
            let _ = writeln!(out, "{k} = {v}");
        }
        out.push_str("[series]\n");
        out.push_str(&series_rows(&self.series));
        if let Some(fit) = &self.fit {
            let _ = writeln!(
                out,
                "[fit]\nslope = {:?}\nintercept = {:?}\nresidual = {:?}",
                fit.slope, fit.intercept, fit.residual
            );
        }
        out.push_str("[metrics]\n");
        for (k, v) in &self.metrics {
            let _ = writeln!(out, "{k} = {v:?}");
        }
        let _ = writeln!(out, "[result]\npass = {}\n[end]", self.pass);
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).record()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// `abscissa,value` rows, one per line.
pub fn series_rows(series: &[(f64, f64)]) -> String {
    series.iter().fold(String::new(), |mut s, (a, v)| {
        let _ = writeln!(s, "{a:?},{v:?}");
        s
    })
}

fn check_key(k: &str) -> Result<()> {
    let ok = !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::Record(format!("invalid key `{k}`")))
    }
}

fn check_text(v: &str) -> Result<()> {
    if v.contains(['\n', '\r']) || v.trim() != v {
        return Err(Error::Record(format!("value `{v}` must be a single trimmed line")));
    }
    Ok(())
}

struct Parser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

fn malformed(line: usize, what: impl fmt::Display) -> Error {
    Error::Record(format!("line {}: {what}", line + 1))
}

fn number<T: FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| malformed(line, format!("bad number `{s}`")))
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate().peekable(),
        }
    }

    fn next(&mut self) -> Result<(usize, &'a str)> {
        self.lines
            .next()
            .ok_or_else(|| Error::Record("record ends before [end]".into()))
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (n, line) = self.next()?;
        match line.split_once(" = ") {
            Some((k, v)) if k == key => Ok((n, v)),
            _ => Err(malformed(n, format!("expected `{key} = ...`"))),
        }
    }

    fn section(&mut self, name: &str) -> Result<()> {
        let (n, line) = self.next()?;
        if line == name {
            Ok(())
        } else {
            Err(malformed(n, format!("expected {name}, found `{line}`")))
        }
    }

    /// Lines up to (not including) the next section header.
    fn body(&mut self) -> Vec<(usize, &'a str)> {
        let mut out = Vec::new();
        while let Some(&(n, line)) = self.lines.peek() {
            if line.starts_with('[') {
                break;
            }
            out.push((n, line));
            self.lines.next();
        }
        out
    }

    fn pairs(&mut self) -> Result<Vec<(usize, &'a str, &'a str)>> {
        self.body()
            .into_iter()
            .map(|(n, line)| {
                line.split_once(" = ")
                    .map(|(k, v)| (n, k, v))
                    .ok_or_else(|| malformed(n, "expected `key = value`"))
            })
            .collect()
    }

    fn record(mut self) -> Result<ExperimentRecord> {
        let (n, header) = self.next()?;
        if header != HEADER {
            return Err(malformed(n, format!("unsupported header `{header}`")));
        }
        let kind = self.field("kind")?.1.parse()?;
        let symbol = self.field("symbol")?.1.to_string();
        let (n, ts) = self.field("timestamp")?;
        let timestamp = number(n, ts)?;
        let digest = self.field("digest")?.1.to_string();

        self.section("[params]")?;
        let params = self
            .pairs()?
            .into_iter()
            .map(|(_, k, v)| (k.to_string(), v.to_string()))
            .collect();

        self.section("[series]")?;
        let series = self
            .body()
            .into_iter()
            .map(|(n, line)| {
                let (a, v) = line.split_once(',').ok_or_else(|| malformed(n, "expected `abscissa,value`"))?;
                Ok((number(n, a)?, number(n, v)?))
            })
            .collect::<Result<Vec<_>>>()?;

        let fit = if matches!(self.lines.peek(), Some((_, "[fit]"))) {
            self.next()?;
            let mut values = BTreeMap::new();
            for (n, k, v) in self.pairs()? {
                values.insert(k, number::<f64>(n, v)?);
            }
            let get = |k: &str| {
                values
                    .get(k)
                    .copied()
                    .ok_or_else(|| Error::Record(format!("fit block lacks `{k}`")))
            };
            Some(ExponentFit {
                slope: get("slope")?,
                intercept: get("intercept")?,
                residual: get("residual")?,
            })
        } else {
            None
        };

        self.section("[metrics]")?;
        let metrics = self
            .pairs()?
            .into_iter()
            .map(|(n, k, v)| Ok((k.to_string(), number(n, v)?)))
            .collect::<Result<_>>()?;

        self.section("[result]")?;
        let (n, p) = self.field("pass")?;
        let pass = number(n, p)?;
        self.section("[end]")?;
        if let Some((n, _)) = self.lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(malformed(n, "content after [end]"));
        }
        if series.is_empty() {
            return Err(Error::Record("record has an empty series".into()));
        }
        Ok(ExperimentRecord {
            kind,
            symbol,
            params,
            series,
            fit,
            metrics,
            pass,
            timestamp,
            digest,
        })
    }
}
