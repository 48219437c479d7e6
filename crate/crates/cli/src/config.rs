//! Flag resolution: command-line values override entries from an optional
//! flat JSON config file keyed by flag name (without the leading dashes).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Usage-level error: bad flag value, missing parameter, malformed config.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// Parsed config file contents.
#[derive(Debug, Default, Clone)]
pub struct ConfigMap {
    map: serde_json::Map<String, serde_json::Value>,
}

impl ConfigMap {
    pub fn load(path: Option<&Path>) -> Result<Self, UsageError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("--config {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| usage(format!("--config {}: invalid JSON: {e}", path.display())))?;
        match value {
            serde_json::Value::Object(map) => Ok(Self { map }),
            _ => Err(usage(format!(
                "--config {}: expected a flat JSON object",
                path.display()
            ))),
        }
    }

    fn raw(&self, key: &str) -> Option<&serde_json::Value> {
        self.map.get(key)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, UsageError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .or_else(|| v.as_str().and_then(|s| s.parse().ok()))
                .map(Some)
                .ok_or_else(|| usage(format!("config key {key:?} is not a number"))),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, UsageError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .or_else(|| v.as_str().and_then(|s| s.parse().ok()))
                .map(Some)
                .ok_or_else(|| usage(format!("config key {key:?} is not an integer"))),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, UsageError> {
        Ok(self.u64(key)?.map(|v| v as usize))
    }

    pub fn string(&self, key: &str) -> Result<Option<String>, UsageError> {
        match self.raw(key) {
            None => Ok(None),
            Some(serde_json::Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Ok(Some(v.to_string())),
        }
    }

    pub fn grid(&self, key: &str) -> Result<Option<GridSpec>, UsageError> {
        match self.string(key)? {
            None => Ok(None),
            Some(s) => s.parse().map(Some),
        }
    }
}

/// Evenly spaced half-open scan grid written as "start:stop:steps"; the
/// points are start + i (stop - start)/steps for i = 0..steps, so `steps`
/// is exactly the number of emitted rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let span = self.stop - self.start;
        let steps = self.steps;
        (0..steps).map(move |i| self.start + span * i as f64 / steps as f64)
    }
}

impl FromStr for GridSpec {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!(
                "grid {s:?} must be start:stop:steps"
            )));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|_| usage(format!("grid start {:?} is not a number", parts[0])))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|_| usage(format!("grid stop {:?} is not a number", parts[1])))?;
        let steps: usize = parts[2]
            .parse()
            .map_err(|_| usage(format!("grid steps {:?} is not an integer", parts[2])))?;
        if steps < 1 {
            return Err(usage("grid steps must be >= 1"));
        }
        Ok(GridSpec { start, stop, steps })
    }
}

/// Comma-separated ascending prime list, e.g. "2,3,5".
pub fn parse_sites(s: &str) -> Result<Vec<u64>, UsageError> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u64>()
                .map_err(|_| usage(format!("--sites entry {tok:?} is not an integer")))
        })
        .collect()
}
