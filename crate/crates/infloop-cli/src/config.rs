use std::ops::RangeInclusive;

/// Environment variable holding the default worker count for `verify`.
pub const THREADS_ENV: &str = "INFLOOP_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputMode {
    Human,
    Record,
}

/// Scan limits shared by the subcommands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub q_max: u64,
    pub n_range: (u64, u64),
    pub l: usize,
    pub depth: usize,
    pub count: usize,
    pub mode: OutputMode,
    pub seed: u64,
    pub threads: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            q_max: 150,
            n_range: (4, 25),
            l: 20,
            depth: 1000,
            count: 1000,
            mode: OutputMode::Human,
            seed: 0x5eed,
            threads: 1,
        }
    }
}

pub fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u64 = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let b: u64 = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

fn positive<T: std::str::FromStr + PartialOrd + Default>(key: &str, v: &str) -> Result<T, String> {
    match v.parse::<T>() {
        Ok(x) if x > T::default() => Ok(x),
        _ => Err(format!("{key} must be a positive integer, got {v:?}")),
    }
}

impl Config {
    pub fn n_range(&self) -> RangeInclusive<u64> {
        self.n_range.0..=self.n_range.1
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "q_max" => self.q_max = positive(key, value)?,
            "n_range" => self.n_range = parse_range(value)?,
            "L" | "l" => self.l = positive(key, value)?,
            "depth" => self.depth = positive(key, value)?,
            "count" => self.count = positive(key, value)?,
            "threads" => self.threads = positive(key, value)?,
            "seed" => self.seed = value.parse().map_err(|_| format!("bad seed {value:?}"))?,
            "mode" => {
                self.mode = match value {
                    "human" => OutputMode::Human,
                    "record" => OutputMode::Record,
                    _ => return Err(format!("unknown mode {value:?}")),
                }
            }
            _ => return Err(format!("unknown config key {key:?}")),
        }
        Ok(())
    }

    /// Reads `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Config, String> {
        let mut c = Config::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            c.set(k.trim(), v.trim()).map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        Ok(c)
    }

    pub fn threads_from_env(&mut self) -> Result<(), String> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => self.set("threads", &v),
            Err(_) => Ok(()),
        }
    }
}
