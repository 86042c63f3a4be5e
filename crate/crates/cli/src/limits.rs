//! Resource limits: built-in defaults, then `OBSLAB_LIMITS`, then flags.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub degree_cap: u32,
    /// overrides the input's truncation order when set
    pub trunc: Option<usize>,
    pub time_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { degree_cap: 8, trunc: None, time_budget: 600 }
    }
}

impl Limits {
    /// Apply `key=value` pairs separated by commas, or a JSON object with the same keys.
    pub fn apply_env(&mut self, spec: &str) -> Result<(), String> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(());
        }
        let pairs: Vec<(String, String)> = if spec.starts_with('{') {
            let v: serde_json::Map<String, serde_json::Value> = serde_json::from_str(spec).map_err(|e| format!("OBSLAB_LIMITS: {e}"))?;
            v.into_iter().map(|(k, v)| (k, v.to_string().trim_matches('"').to_string())).collect()
        } else {
            spec.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|kv| {
                    kv.split_once('=')
                        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                        .ok_or_else(|| format!("OBSLAB_LIMITS: expected key=value, got {kv:?}"))
                })
                .collect::<Result<_, _>>()?
        };
        for (k, v) in pairs {
            let n: u64 = v.parse().map_err(|_| format!("OBSLAB_LIMITS: {k} must be a positive integer"))?;
            match k.replace('-', "_").as_str() {
                "degree_cap" => self.degree_cap = n as u32,
                "trunc" => self.trunc = Some(n as usize),
                "time_budget" => self.time_budget = n,
                other => return Err(format!("OBSLAB_LIMITS: unknown key {other}")),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.degree_cap == 0 || self.time_budget == 0 || self.trunc == Some(0) {
            return Err("limits must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_forms() {
        let mut l = Limits::default();
        l.apply_env("degree_cap=4, trunc=3").unwrap();
        assert_eq!(l, Limits { degree_cap: 4, trunc: Some(3), time_budget: 600 });
        l.apply_env(r#"{"time_budget": 9}"#).unwrap();
        assert_eq!(l.time_budget, 9);
        assert!(l.apply_env("speed=3").is_err());
        assert!(Limits { degree_cap: 0, ..Limits::default() }.validate().is_err());
    }
}
