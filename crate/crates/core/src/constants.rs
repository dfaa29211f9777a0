//! Registry of equivalence constants used by bound expressions. Paper-explicit
//! constants are marked as such; everything else defaults to 1.0 and is
//! flagged uncalibrated until a calibration run fits it.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BoundConstants {
    pub c_low: f64,
    pub c_high: f64,
    pub calibrated: bool,
    pub source: String,
}

impl BoundConstants {
    pub fn paper(c_low: f64, c_high: f64) -> Self {
        BoundConstants { c_low, c_high, calibrated: true, source: "paper".into() }
    }

    pub fn uncalibrated() -> Self {
        BoundConstants { c_low: 1.0, c_high: 1.0, calibrated: false, source: "default".into() }
    }
}

/// Map from theorem tag to its constants.
#[derive(Clone, Debug, Default)]
pub struct ConstantsRegistry {
    entries: BTreeMap<String, BoundConstants>,
}

impl ConstantsRegistry {
    /// Registry holding the constants the paper states explicitly.
    pub fn with_defaults() -> Self {
        let mut entries = BTreeMap::new();
        entries.insert("base-characterization".to_string(), BoundConstants::paper(0.5, 4.0));
        ConstantsRegistry { entries }
    }

    /// Constants for a tag; uncalibrated defaults when absent.
    pub fn get(&self, tag: &str) -> BoundConstants {
        self.entries.get(tag).cloned().unwrap_or_else(BoundConstants::uncalibrated)
    }

    pub fn set(&mut self, tag: &str, constants: BoundConstants) {
        self.entries.insert(tag.to_string(), constants);
    }

    /// Fits the smallest valid constants over (exact, shape) samples:
    /// c_low = min exact/shape, c_high = max exact/shape.
    pub fn calibrate(&mut self, tag: &str, samples: &[(f64, f64)]) -> Result<BoundConstants> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("calibration needs samples".into()));
        }
        let mut c_low = f64::INFINITY;
        let mut c_high = 0.0f64;
        for &(exact, shape) in samples {
            if !(exact > 0.0) || !(shape > 0.0) {
                return Err(Error::InvalidParameter(
                    "calibration samples must be positive".into(),
                ));
            }
            let r = exact / shape;
            c_low = c_low.min(r);
            c_high = c_high.max(r);
        }
        let fitted = BoundConstants {
            c_low,
            c_high,
            calibrated: true,
            source: format!("fitted on {} samples", samples.len()),
        };
        self.entries.insert(tag.to_string(), fitted.clone());
        Ok(fitted)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        for (tag, c) in &self.entries {
            obj.insert(
                tag.clone(),
                json!({
                    "c_low": c.c_low,
                    "c_high": c.c_high,
                    "calibrated": c.calibrated,
                    "calibrated_on": c.source,
                }),
            );
        }
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("expected JSON object".into()))?;
        let mut entries = BTreeMap::new();
        for (tag, entry) in obj {
            let get = |name: &str| -> Result<f64> {
                entry
                    .get(name)
                    .and_then(Value::as_f64)
                    .ok_or_else(|| Error::Parse(format!("registry entry {tag} misses {name}")))
            };
            entries.insert(
                tag.clone(),
                BoundConstants {
                    c_low: get("c_low")?,
                    c_high: get("c_high")?,
                    calibrated: entry.get("calibrated").and_then(Value::as_bool).unwrap_or(false),
                    source: entry
                        .get("calibrated_on")
                        .and_then(Value::as_str)
                        .unwrap_or("unknown")
                        .to_string(),
                },
            );
        }
        Ok(ConstantsRegistry { entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_hold_base_characterization() {
        let reg = ConstantsRegistry::with_defaults();
        let c = reg.get("base-characterization");
        assert_eq!((c.c_low, c.c_high), (0.5, 4.0));
        assert!(c.calibrated);
        let missing = reg.get("no-such-tag");
        assert_eq!((missing.c_low, missing.c_high), (1.0, 1.0));
        assert!(!missing.calibrated);
    }

    #[test]
    fn calibration_fits_envelope() {
        let mut reg = ConstantsRegistry::with_defaults();
        let fitted = reg
            .calibrate("demo", &[(1.0, 2.0), (3.0, 2.0), (2.0, 2.0)])
            .unwrap();
        assert_eq!((fitted.c_low, fitted.c_high), (0.5, 1.5));
        assert!(fitted.calibrated);
    }

    #[test]
    fn json_round_trip() {
        let mut reg = ConstantsRegistry::with_defaults();
        reg.calibrate("demo", &[(1.0, 4.0)]).unwrap();
        let v = reg.to_json();
        let back = ConstantsRegistry::from_json(&v).unwrap();
        assert_eq!(back.get("demo"), reg.get("demo"));
        assert_eq!(back.get("base-characterization"), reg.get("base-characterization"));
    }
}
