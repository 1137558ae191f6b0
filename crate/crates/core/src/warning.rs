use serde::Serialize;

/// Structured soft-guard diagnostic. Guards on the paraxial small parameters
/// are asymptotic conditions, so exceeding them is reported instead of failing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Warning {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl Warning {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
            location: None,
            value: None,
        }
    }

    pub fn at(mut self, x: f64, y: f64) -> Self {
        self.location = Some((x, y));
        self
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }
}

/// Thresholds for the "much smaller than one" conditions of the paraxial model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GuardConfig {
    /// Bound on |V|/m.
    pub potential_ratio: f64,
    /// Bound on E/m.
    pub energy_ratio: f64,
    /// Bound on eps''/eps'.
    pub loss_tangent: f64,
    /// Bound on Gamma*D0 for the linearised mode profile.
    pub leakage_depth: f64,
    /// Turn guard violations into hard errors.
    pub strict: bool,
}

impl Default for GuardConfig {
    fn default() -> Self {
        Self {
            potential_ratio: 0.1,
            energy_ratio: 0.1,
            loss_tangent: 0.1,
            leakage_depth: 0.1,
            strict: false,
        }
    }
}
