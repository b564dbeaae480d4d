//! Error taxonomy shared by every subcommand, with the exit-code mapping and
//! the machine-readable stderr form.

use zigzag_core::diagram::ValidationFailure;
use zigzag_core::textfmt::json_escape;

/// Everything a command can fail with, bucketed by exit code: I/O and parse
/// problems exit 2, rejected inputs (validation, unsupported dimensions)
/// exit 1, violated internal invariants exit 3.
#[derive(Debug)]
pub enum CliError {
    Io { path: String, message: String },
    Parse { message: String },
    Validation { message: String, failures: Vec<ValidationFailure> },
    Unsupported { message: String },
    Internal { message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } => 2,
            CliError::Validation { .. } | CliError::Unsupported { .. } => 1,
            CliError::Internal { .. } => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Validation { .. } => "validation",
            CliError::Unsupported { .. } => "unsupported",
            CliError::Internal { .. } => "internal",
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Io { path, message } => format!("{path}: {message}"),
            CliError::Parse { message }
            | CliError::Validation { message, .. }
            | CliError::Unsupported { message }
            | CliError::Internal { message } => message.clone(),
        }
    }

    /// The `--json-errors` stderr document.
    pub fn to_json(&self) -> String {
        let mut out = format!(
            "{{\"kind\":\"{}\",\"exit\":{},\"message\":\"{}\"",
            self.kind(),
            self.exit_code(),
            json_escape(&self.message())
        );
        if let CliError::Validation { failures, .. } = self {
            let items: Vec<String> = failures
                .iter()
                .map(|f| {
                    format!(
                        "{{\"path\":\"{}\",\"failure\":\"{}\"}}",
                        json_escape(&f.path.to_string()),
                        json_escape(&f.kind.to_string())
                    )
                })
                .collect();
            out.push_str(&format!(",\"failures\":[{}]", items.join(",")));
        }
        out.push('}');
        out
    }
}

impl From<zigzag_core::layout::LayoutError> for CliError {
    fn from(e: zigzag_core::layout::LayoutError) -> Self {
        // Layout runs on validated diagrams, so any failure here means an
        // internal invariant broke, not bad input.
        CliError::Internal {
            message: format!("layout failed on a validated diagram: {e}"),
        }
    }
}

impl From<zigzag_core::render::RenderError> for CliError {
    fn from(e: zigzag_core::render::RenderError) -> Self {
        use zigzag_core::render::RenderError;
        match e {
            RenderError::UnsupportedDimension { .. }
            | RenderError::NotPlanar { .. }
            | RenderError::NotSpatial { .. } => CliError::Unsupported {
                message: e.to_string(),
            },
            other => CliError::Internal {
                message: format!("scene extraction failed on a validated diagram: {other}"),
            },
        }
    }
}
