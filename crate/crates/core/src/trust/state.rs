use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Trusted,
    Untrusted,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Trusted => "trusted",
            Self::Untrusted => "untrusted",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Classification {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trusted" => Ok(Self::Trusted),
            "untrusted" => Ok(Self::Untrusted),
            _ => Err(format!("unknown classification {s:?}")),
        }
    }
}

/// Total trust: behavioral plus data trust.
pub fn total_trust(behavioral: f64, data: f64) -> f64 {
    behavioral + data
}

/// Trusted iff `total >= threshold`.
pub fn classify(total: f64, threshold: f64) -> Classification {
    if total >= threshold {
        Classification::Trusted
    } else {
        Classification::Untrusted
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustState {
    pub behavioral: f64,
    pub data: f64,
    pub total: f64,
    pub classification: Classification,
    pub last_update: f64,
}

impl TrustState {
    pub fn new(behavioral: f64, data: f64, threshold: f64, now: f64) -> Self {
        let total = total_trust(behavioral, data);
        Self {
            behavioral,
            data,
            total,
            classification: classify(total, threshold),
            last_update: now,
        }
    }
}
