use serde::{Deserialize, Serialize};
use std::fmt;

/// Logarithm base in which an information value is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    #[default]
    Bits,
    Nats,
}

impl Unit {
    /// Convert a value expressed in nats into this unit.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            Unit::Bits => nats / std::f64::consts::LN_2,
            Unit::Nats => nats,
        }
    }

    /// Convert a value expressed in bits into this unit.
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            Unit::Bits => bits,
            Unit::Nats => bits * std::f64::consts::LN_2,
        }
    }

    /// Convert a value in this unit to `other`.
    pub fn convert(self, value: f64, other: Unit) -> f64 {
        match self {
            Unit::Bits => other.from_bits(value),
            Unit::Nats => other.from_nats(value),
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::Bits => f.write_str("bit"),
            Unit::Nats => f.write_str("nat"),
        }
    }
}

/// An information value tagged with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub value: f64,
    pub unit: Unit,
}

impl MeasureValue {
    pub fn bits(value: f64) -> Self {
        Self {
            value,
            unit: Unit::Bits,
        }
    }

    pub fn nats(value: f64) -> Self {
        Self {
            value,
            unit: Unit::Nats,
        }
    }

    pub fn to(self, unit: Unit) -> Self {
        Self {
            value: self.unit.convert(self.value, unit),
            unit,
        }
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} {}", self.value, self.unit)
    }
}

/// Pointwise values of a measure, one per realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct LocalSeries {
    pub values: Vec<f64>,
}

impl LocalSeries {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}
