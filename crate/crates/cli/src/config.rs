//! Run configuration: command-line flags, a canonical `key = value` text form,
//! and per-command validation.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use dispersal_core::propagator::weight_exponent;
use dispersal_core::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Maximal,
    Counterexample,
    Rate,
    Transfer,
    Smoothing,
    Positive,
    Check,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Evolve,
        Command::Maximal,
        Command::Counterexample,
        Command::Rate,
        Command::Transfer,
        Command::Smoothing,
        Command::Positive,
        Command::Check,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Maximal => "maximal",
            Command::Counterexample => "counterexample",
            Command::Rate => "rate",
            Command::Transfer => "transfer",
            Command::Smoothing => "smoothing",
            Command::Positive => "positive",
            Command::Check => "check",
        }
    }

    /// Parameter keys the command reads; `out` and `threads` apply everywhere.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Command::Evolve | Command::Maximal | Command::Transfer => {
                &["symbol", "h", "cutoff", "ball_spacing", "t_count", "seed"]
            }
            Command::Counterexample => &["symbol", "R", "m"],
            Command::Rate => &["symbol", "delta", "s", "h", "cutoff", "ball_spacing"],
            Command::Smoothing => &["m", "h", "ball_spacing", "t_count", "seed"],
            Command::Positive => &["m", "R", "h", "ball_spacing", "t_count"],
            Command::Check => &["seed"],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

const KEYS: [&str; 13] = [
    "command",
    "symbol",
    "R",
    "m",
    "delta",
    "s",
    "h",
    "cutoff",
    "ball_spacing",
    "t_count",
    "seed",
    "out",
    "threads",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub symbol: Option<String>,
    pub radii: Option<Vec<f64>>,
    pub m: Option<f64>,
    pub delta: Option<f64>,
    pub s: Option<f64>,
    pub h: Option<f64>,
    pub cutoff: Option<f64>,
    pub ball_spacing: Option<f64>,
    pub t_count: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn number<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.trim()
        .parse()
        .map_err(|_| format!("`{key}`: malformed number `{v}`"))
}

fn float(key: &str, v: &str) -> Result<f64, String> {
    let x: f64 = number(key, v)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{key}`: value must be finite"))
    }
}

fn floats(key: &str, v: &str) -> Result<Vec<f64>, String> {
    v.split(',').map(|x| float(key, x)).collect()
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            symbol: None,
            radii: None,
            m: None,
            delta: None,
            s: None,
            h: None,
            cutoff: None,
            ball_spacing: None,
            t_count: None,
            seed: None,
            out: None,
            threads: None,
        }
    }

    fn get(&self, key: &str) -> Option<String> {
        let f = |v: Option<f64>| v.map(|x| x.to_string());
        match key {
            "command" => Some(self.command.to_string()),
            "symbol" => self.symbol.clone(),
            "R" => self
                .radii
                .as_ref()
                .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
            "m" => f(self.m),
            "delta" => f(self.delta),
            "s" => f(self.s),
            "h" => f(self.h),
            "cutoff" => f(self.cutoff),
            "ball_spacing" => f(self.ball_spacing),
            "t_count" => self.t_count.map(|v| v.to_string()),
            "seed" => self.seed.map(|v| v.to_string()),
            "out" => self.out.as_ref().map(|p| p.display().to_string()),
            "threads" => self.threads.map(|v| v.to_string()),
            _ => None,
        }
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "command" => self.command = v.parse()?,
            "symbol" => self.symbol = Some(v.to_string()),
            "R" => self.radii = Some(floats(key, v)?),
            "m" => self.m = Some(float(key, v)?),
            "delta" => self.delta = Some(float(key, v)?),
            "s" => self.s = Some(float(key, v)?),
            "h" => self.h = Some(float(key, v)?),
            "cutoff" => self.cutoff = Some(float(key, v)?),
            "ball_spacing" => self.ball_spacing = Some(float(key, v)?),
            "t_count" => self.t_count = Some(number(key, v)?),
            "seed" => self.seed = Some(number(key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "threads" => self.threads = Some(number(key, v)?),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// One `key = value` line per set field, in a fixed key order.
    pub fn to_canonical(&self) -> String {
        KEYS.iter()
            .filter_map(|k| self.get(k).map(|v| format!("{k} = {v}\n")))
            .collect()
    }

    /// Inverse of [`to_canonical`](Self::to_canonical). Blank lines and `#`
    /// comments are skipped; unknown or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg: Option<RunConfig> = None;
        let mut pending = Vec::new();
        let mut seen = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(format!("line {}: unknown key `{k}`", n + 1));
            }
            if seen.contains(&k) {
                return Err(format!("line {}: duplicate key `{k}`", n + 1));
            }
            seen.push(k);
            if k == "command" {
                cfg = Some(RunConfig::new(v.parse()?));
            } else {
                pending.push((k, v));
            }
        }
        let mut cfg = cfg.ok_or("missing `command`")?;
        for (k, v) in pending {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Fields of `other` that are set replace those of `self`.
    pub fn overlay(&mut self, other: &RunConfig) {
        for k in &KEYS[1..] {
            if let Some(v) = other.get(k) {
                self.set(k, &v).expect("values of a RunConfig re-parse");
            }
        }
    }

    pub fn symbol(&self) -> Result<Option<Symbol>, String> {
        self.symbol
            .as_deref()
            .map(|s| s.parse::<Symbol>().map_err(|e| e.to_string()))
            .transpose()
    }

    /// Rejects keys the command does not read and values outside their domain.
    pub fn validate(&self) -> Result<(), String> {
        let allowed = self.command.keys();
        for k in &KEYS[1..] {
            if self.get(k).is_some() && !allowed.contains(k) && *k != "out" && *k != "threads" {
                let flag = if *k == "R" { "R".to_string() } else { k.replace('_', "-") };
                return Err(format!("`--{flag}` does not apply to `{}`", self.command));
            }
        }
        let positive = [("h", self.h), ("cutoff", self.cutoff), ("ball_spacing", self.ball_spacing)];
        for (k, v) in positive {
            if v.is_some_and(|x| x <= 0.0) {
                return Err(format!("`{k}` must be positive"));
            }
        }
        if self.t_count.is_some_and(|n| n < 2) {
            return Err("`t_count` must be at least 2".into());
        }
        if self.threads == Some(0) {
            return Err("`threads` must be at least 1".into());
        }
        let symbol = self.symbol()?;
        match self.command {
            Command::Counterexample => {
                let p = self.counterexample_symbol()?;
                if !matches!(p, Symbol::Boussinesq | Symbol::FiniteType { .. }) {
                    return Err(format!("no counterexample for `{p}`; use boussinesq or pm:<m> with 1 < m < 2"));
                }
                if let Symbol::FiniteType { m } = p {
                    if !(m > 1.0 && m < 2.0) {
                        return Err(format!("the pm counterexample needs 1 < m < 2, got {m}"));
                    }
                }
                if let Some(r) = &self.radii {
                    if r.len() < 3 || r.windows(2).any(|w| w[1] <= w[0]) || r[0] < 64.0 {
                        return Err("`--R` needs at least three ascending radii, all >= 64".into());
                    }
                }
            }
            Command::Rate => {
                let p = symbol.unwrap_or(Symbol::Elliptic);
                weight_exponent(&p, self.delta.unwrap_or(1.0)).map_err(|e| e.to_string())?;
            }
            Command::Smoothing | Command::Positive => {
                if self.m.is_some_and(|m| m < 1.0) {
                    return Err("`m` must be at least 1".into());
                }
                if let Some(r) = &self.radii {
                    if r.iter().any(|&x| !(x >= 1.0 && x.log2().fract() == 0.0)) {
                        return Err("`--R` must list powers of two for the positive run".into());
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// `--symbol`, or `pm:<m>` from `--m`; Boussinesq when neither is given.
    pub fn counterexample_symbol(&self) -> Result<Symbol, String> {
        match (self.symbol()?, self.m) {
            (Some(_), Some(_)) => Err("give either `--symbol` or `--m`, not both".into()),
            (Some(p), None) => Ok(p),
            (None, Some(m)) => Symbol::finite_type(m).map_err(|e| e.to_string()),
            (None, None) => Ok(Symbol::Boussinesq),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let mut cfg = RunConfig::new(Command::Counterexample);
        cfg.symbol = Some("pm:1.5".into());
        cfg.radii = Some(vec![64.0, 128.0, 256.0]);
        cfg.out = Some(PathBuf::from("runs/a"));
        let text = cfg.to_canonical();
        assert_eq!(text, "command = counterexample\nsymbol = pm:1.5\nR = 64,128,256\nout = runs/a\n");
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_canonical(), text);
    }

    #[test]
    fn parse_is_canonicalizing() {
        let text = "# run\n\nseed=7\ncommand = check\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.to_canonical(), "command = check\nseed = 7\n");
        let h = RunConfig::parse("command = rate\nh = 0.50\n").unwrap();
        assert_eq!(h.to_canonical(), "command = rate\nh = 0.5\n");
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        assert!(RunConfig::parse("command = check\ncolour = red\n").is_err());
        assert!(RunConfig::parse("command = check\nseed = 1\nseed = 2\n").is_err());
        assert!(RunConfig::parse("command = rate\ndelta = one\n").is_err());
        assert!(RunConfig::parse("command = rate\ndelta = inf\n").is_err());
        assert!(RunConfig::parse("seed = 1\n").is_err());
        assert!(RunConfig::parse("command = launch\n").is_err());
        assert!(RunConfig::parse("command check\n").is_err());
    }

    #[test]
    fn validation() {
        let mut rate = RunConfig::new(Command::Rate);
        rate.symbol = Some("elliptic".into());
        rate.delta = Some(3.0);
        assert!(rate.validate().is_err());
        rate.delta = Some(1.0);
        rate.s = Some(0.4);
        assert!(rate.validate().is_ok());
        rate.seed = Some(1);
        assert!(rate.validate().is_err());

        let mut ce = RunConfig::new(Command::Counterexample);
        ce.symbol = Some("elliptic".into());
        assert!(ce.validate().is_err());
        ce.symbol = Some("pm:1.5".into());
        assert!(ce.validate().is_ok());
        ce.m = Some(1.5);
        assert!(ce.validate().is_err());
        ce.symbol = None;
        assert_eq!(ce.counterexample_symbol().unwrap(), Symbol::FiniteType { m: 1.5 });
        ce.radii = Some(vec![64.0, 32.0, 128.0]);
        assert!(ce.validate().is_err());

        let mut pos = RunConfig::new(Command::Positive);
        pos.radii = Some(vec![8.0, 12.0]);
        assert!(pos.validate().is_err());
        pos.radii = Some(vec![8.0, 16.0]);
        assert!(pos.validate().is_ok());
    }

    #[test]
    fn overlay_replaces_set_fields() {
        let mut base = RunConfig::parse("command = transfer\nseed = 1\nh = 0.5\n").unwrap();
        let mut flags = RunConfig::new(Command::Transfer);
        flags.seed = Some(9);
        base.overlay(&flags);
        assert_eq!(base.to_canonical(), "command = transfer\nh = 0.5\nseed = 9\n");
    }
}
