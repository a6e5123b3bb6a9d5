use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    #[value(name = "md")]
    Markdown,
    #[value(name = "csv")]
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "md" | "markdown" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}' (expected md or csv)")),
        }
    }
}

/// Flags shared by every subcommand. Each can also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    /// Circle radius or chart scale, in (0, 1).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Comma-separated list of α values.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub alpha: Option<Vec<f64>>,
    /// Lower end of the eigenvalue interval.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// Upper end of the eigenvalue interval.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t2: Option<f64>,
    /// Schatten exponent.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Test function: pow:<p> or poly:<c1,c2,...> (coefficients of s, s², ...).
    #[arg(long, global = true)]
    pub phi: Option<String>,
    /// Built-in chart name.
    #[arg(long, global = true)]
    pub chart: Option<String>,
    /// Block count or trace power.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Real dimension of the random metric pair.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// RNG seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat key = value file supplying defaults for any flag (and `command`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError(format!("config key '{key}': cannot parse '{value}'")))
}

/// Parameters read from a config file, plus an optional command name.
#[derive(Debug, Default)]
pub struct FileConfig {
    pub command: Option<String>,
    pub params: Params,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = FileConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim().trim_matches('"');
            let p = &mut cfg.params;
            match key {
                "command" => cfg.command = Some(value.to_string()),
                "r" => p.r = Some(parse_value(key, value)?),
                "alpha" => {
                    p.alpha = Some(
                        value
                            .trim_matches(|c| c == '[' || c == ']')
                            .split(',')
                            .map(|v| parse_value(key, v.trim()))
                            .collect::<Result<_, _>>()?,
                    )
                }
                "t1" => p.t1 = Some(parse_value(key, value)?),
                "t2" => p.t2 = Some(parse_value(key, value)?),
                "p" => p.p = Some(parse_value(key, value)?),
                "phi" => p.phi = Some(value.to_string()),
                "chart" => p.chart = Some(value.to_string()),
                "m" => p.m = Some(parse_value(key, value)?),
                "d" => p.d = Some(parse_value(key, value)?),
                "seed" => p.seed = Some(parse_value(key, value)?),
                "format" => p.format = Some(value.parse().map_err(ConfigError)?),
                "out" => p.out = Some(PathBuf::from(value)),
                other => return Err(ConfigError(format!("unknown config key '{other}'"))),
            }
        }
        Ok(cfg)
    }
}

impl Params {
    /// Fill every unset field from `base`.
    pub fn or(self, base: Params) -> Params {
        Params {
            r: self.r.or(base.r),
            alpha: self.alpha.or(base.alpha),
            t1: self.t1.or(base.t1),
            t2: self.t2.or(base.t2),
            p: self.p.or(base.p),
            phi: self.phi.or(base.phi),
            chart: self.chart.or(base.chart),
            m: self.m.or(base.m),
            d: self.d.or(base.d),
            seed: self.seed.or(base.seed),
            format: self.format.or(base.format),
            out: self.out.or(base.out),
            config: self.config.or(base.config),
        }
    }
}
