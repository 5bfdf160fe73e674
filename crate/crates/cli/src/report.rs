use std::fmt;

use bec_core::models::Status;

/// Where a numerical setting came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Flag,
    File,
    Default,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Flag => "flag",
            Source::File => "model file",
            Source::Default => "default",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setting<T> {
    pub value: T,
    pub source: Source,
}

impl<T: Copy> Setting<T> {
    /// Flag beats file beats default.
    pub fn resolve(flag: Option<T>, file: Option<T>, default: T) -> Self {
        match (flag, file) {
            (Some(value), _) => Setting { value, source: Source::Flag },
            (None, Some(value)) => Setting { value, source: Source::File },
            _ => Setting { value: default, source: Source::Default },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Value {
    pub name: String,
    pub value: f64,
    pub residual: Option<f64>,
}

/// Everything a command computed, with the settings that produced it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InvariantReport {
    pub model: String,
    pub task: String,
    pub values: Vec<Value>,
    pub verdicts: Vec<(String, String)>,
    pub status: Option<Status>,
    pub settings: Vec<(String, String, Source)>,
    pub warnings: Vec<String>,
}

impl InvariantReport {
    pub fn new(model: impl Into<String>, task: impl Into<String>) -> Self {
        InvariantReport { model: model.into(), task: task.into(), ..Default::default() }
    }

    pub fn value(&mut self, name: &str, value: f64, residual: Option<f64>) {
        self.values.push(Value { name: name.into(), value, residual });
    }

    pub fn verdict(&mut self, label: &str, verdict: impl fmt::Display) {
        self.verdicts.push((label.into(), verdict.to_string()));
    }

    pub fn setting<T: fmt::Display + Copy>(&mut self, name: &str, s: Setting<T>) {
        self.settings.push((name.into(), s.value.to_string(), s.source));
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model: {}", self.model)?;
        writeln!(f, "task: {}", self.task)?;
        for v in &self.values {
            match v.residual {
                Some(r) => writeln!(f, "  {} = {} (residual {:.2e})", v.name, v.value, r)?,
                None => writeln!(f, "  {} = {}", v.name, v.value)?,
            }
        }
        for (label, verdict) in &self.verdicts {
            writeln!(f, "  affiliation[{label}] = {verdict}")?;
        }
        if let Some(s) = &self.status {
            writeln!(f, "  correspondence: {s}")?;
        }
        for (name, value, source) in &self.settings {
            writeln!(f, "  setting {name} = {value} ({source})")?;
        }
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_order() {
        assert_eq!(Setting::resolve(Some(1), Some(2), 3), Setting { value: 1, source: Source::Flag });
        assert_eq!(Setting::resolve(None, Some(2), 3), Setting { value: 2, source: Source::File });
        assert_eq!(Setting::resolve(None, None, 3), Setting { value: 3, source: Source::Default });
    }

    #[test]
    fn rendering() {
        let mut r = InvariantReport::new("dirac", "verify");
        r.value("sf", 1.0, None);
        r.status = Some(Status::Skipped("not affiliated".into()));
        r.setting("tol", Setting::resolve(None, None, 1e-6));
        let s = r.to_string();
        assert!(s.contains("SKIPPED(not affiliated)"));
        assert!(s.contains("setting tol = 0.000001 (default)"));
    }
}
