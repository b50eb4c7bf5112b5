/// Line-oriented log that costs nothing when disabled.
#[derive(Debug, Clone, Default)]
pub struct TraceLog {
    enabled: bool,
    text: String,
}

impl TraceLog {
    pub fn new(enabled: bool) -> Self {
        TraceLog {
            enabled,
            text: String::new(),
        }
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    /// Appends the line built by `line` (newline added) when enabled.
    pub fn record(&mut self, line: impl FnOnce() -> String) {
        if self.enabled {
            self.text.push_str(&line());
            self.text.push('\n');
        }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }
}
