//! Simulated experiments: operator bases, devices, correlation injection and
//! Born-rule synthesis of data tensors.

mod basis;
mod devices;
pub mod rng;
mod synth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use basis::{make_basis, OperatorBasis};
pub use devices::{
    random_devices, Devices, MeasurementDevice, StateDevice, DEVICE_KAPPA_MAX, RESAMPLE_BUDGET,
};
pub use synth::{
    add_shot_noise, nonlocal_gamma, spam_tau, synthesize,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("qudit dimension {0} is below 2")]
    BadDimension(usize),
    #[error("bad settings: {0}")]
    BadSettings(String),
    #[error("no well-conditioned devices after {attempts} draws")]
    ConditioningFailure { attempts: usize },
    #[error("incompatible devices: {0}")]
    IncompatibleDevices(String),
    #[error("invalid correlation config: {0}")]
    InvalidConfig(String),
    #[error("shot count must be at least 1")]
    InvalidShots,
}

/// Which dependency a synthesized experiment violates. Qudits are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CorrelationKind {
    None,
    /// State device correlated with qudit `qudit`'s measurement device.
    Spam { qudit: usize },
    /// Measurement devices of qudits `p` and `q` correlated with each other.
    Nonlocal { p: usize, q: usize },
}

impl CorrelationKind {
    pub fn validate(&self, m: usize) -> Result<(), ModelError> {
        let ok = |q: usize| (1..=m).contains(&q);
        match *self {
            Self::None => Ok(()),
            Self::Spam { qudit } if ok(qudit) => Ok(()),
            Self::Nonlocal { p, q } if ok(p) && ok(q) && p != q => Ok(()),
            other => Err(ModelError::InvalidConfig(format!(
                "{other} does not name valid qudits of a {m}-qudit system"
            ))),
        }
    }

    /// All single correlations of an `m`-qudit system, `none` excluded.
    pub fn all(m: usize) -> Vec<Self> {
        let mut out: Vec<Self> = (1..=m).map(|qudit| Self::Spam { qudit }).collect();
        for p in 1..=m {
            for q in (p + 1)..=m {
                out.push(Self::Nonlocal { p, q });
            }
        }
        out
    }
}

impl fmt::Display for CorrelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => write!(f, "none"),
            Self::Spam { qudit } => write!(f, "spam:{qudit}"),
            Self::Nonlocal { p, q } => write!(f, "nonlocal:{p},{q}"),
        }
    }
}

impl FromStr for CorrelationKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidConfig(format!("cannot parse correlation {s:?}"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let s = s.trim();
        if s == "none" {
            return Ok(Self::None);
        }
        if let Some(rest) = s.strip_prefix("spam:") {
            return Ok(Self::Spam { qudit: num(rest)? });
        }
        if let Some(rest) = s.strip_prefix("nonlocal:") {
            let (p, q) = rest.split_once(',').ok_or_else(bad)?;
            let (p, q) = (num(p)?, num(q)?);
            if p == q {
                return Err(bad());
            }
            return Ok(Self::Nonlocal {
                p: p.min(q),
                q: p.max(q),
            });
        }
        Err(bad())
    }
}

impl Serialize for CorrelationKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CorrelationKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationConfig {
    pub kind: CorrelationKind,
    pub epsilon: f64,
    pub seed: u64,
}

impl CorrelationConfig {
    pub fn none() -> Self {
        Self {
            kind: CorrelationKind::None,
            epsilon: 0.0,
            seed: 0,
        }
    }

    pub fn new(kind: CorrelationKind, epsilon: f64, seed: u64) -> Result<Self, ModelError> {
        let config = Self {
            kind,
            epsilon,
            seed,
        };
        config.check()?;
        Ok(config)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(ModelError::InvalidConfig(format!(
                "strength {} outside [0, 1]",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// True when synthesis takes the uncorrelated path.
    pub fn is_inert(&self) -> bool {
        self.kind == CorrelationKind::None || self.epsilon == 0.0
    }
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotNoise {
    pub shots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Synthesized {
        device_seed: u64,
        settings: Vec<usize>,
        correlation: CorrelationConfig,
    },
    Ingested {
        source: String,
    },
}

/// Where a data tensor came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shot_noise: Option<ShotNoise>,
}

impl Provenance {
    pub fn ingested(source: &str) -> Self {
        Self {
            source: Source::Ingested {
                source: source.to_string(),
            },
            shot_noise: None,
        }
    }

    pub fn synthesized(device_seed: u64, settings: Vec<usize>, correlation: CorrelationConfig) -> Self {
        Self {
            source: Source::Synthesized {
                device_seed,
                settings,
                correlation,
            },
            shot_noise: None,
        }
    }

    pub fn shots(&self) -> Option<u64> {
        self.shot_noise.as_ref().map(|s| s.shots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correlation_strings_round_trip() {
        for text in ["none", "spam:2", "nonlocal:1,3"] {
            let kind: CorrelationKind = text.parse().unwrap();
            assert_eq!(kind.to_string(), text);
        }
        assert_eq!(
            "nonlocal:3,1".parse::<CorrelationKind>().unwrap(),
            CorrelationKind::Nonlocal { p: 1, q: 3 }
        );
        for bad in ["spam", "spam:x", "nonlocal:1", "nonlocal:2,2", "other"] {
            assert!(bad.parse::<CorrelationKind>().is_err(), "{bad}");
        }
    }

    #[test]
    fn config_checks_strength() {
        assert!(CorrelationConfig::new(CorrelationKind::Spam { qudit: 1 }, 1.5, 0).is_err());
        assert!(CorrelationConfig::new(CorrelationKind::Spam { qudit: 1 }, -0.1, 0).is_err());
        let c = CorrelationConfig::new(CorrelationKind::Spam { qudit: 1 }, 0.0, 0).unwrap();
        assert!(c.is_inert());
    }

    #[test]
    fn kinds_validate_against_qudit_count() {
        assert!(CorrelationKind::Spam { qudit: 3 }.validate(2).is_err());
        assert!(CorrelationKind::Nonlocal { p: 1, q: 2 }.validate(2).is_ok());
        assert_eq!(CorrelationKind::all(3).len(), 6);
    }

    #[test]
    fn provenance_json() {
        let p = Provenance::synthesized(
            4,
            vec![2, 2],
            CorrelationConfig::new(CorrelationKind::Nonlocal { p: 1, q: 2 }, 0.1, 9).unwrap(),
        );
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"nonlocal:1,2\""));
        let back: Provenance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }
}
