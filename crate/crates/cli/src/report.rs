use std::io::Write;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: Vec<String>,
    pub verdicts: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    /// Wall-clock milliseconds; only with `--timings`, since it breaks
    /// byte-identical output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

impl RunReport {
    pub fn new(command: &'static str, inputs: Vec<String>) -> Self {
        RunReport {
            tool: "latkit",
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            verdicts: Value::Null,
            error: None,
            timings_ms: None,
        }
    }

    pub fn failed(mut self, kind: &str, message: impl Into<String>) -> Self {
        self.error = Some(ErrorInfo {
            kind: kind.to_string(),
            message: message.into(),
        });
        self
    }

    pub fn print(mut self, started: Option<Instant>) {
        self.timings_ms = started.map(|t| t.elapsed().as_secs_f64() * 1e3);
        let text = serde_json::to_string_pretty(&self).expect("reports serialize");
        // a closed pipe (`| head`) is not an error worth a panic
        let _ = writeln!(std::io::stdout().lock(), "{text}");
    }
}
