//! Reports: ordered sections of key/value entries, rendered as text or JSON.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Neither confirmed nor refuted, e.g. no witness within the bound.
    Undecided,
    Info,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Undecided => "UNDECIDED",
            Status::Info => "INFO",
        }
    }

    fn color(self) -> &'static str {
        match self {
            Status::Pass => "\x1b[32m",
            Status::Fail => "\x1b[31m",
            Status::Undecided => "\x1b[33m",
            Status::Info => "\x1b[36m",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Section {
    pub title: String,
    pub status: Status,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn new(title: impl Into<String>, status: Status) -> Self {
        Section {
            title: title.into(),
            status,
            entries: Vec::new(),
        }
    }

    pub fn entry(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.push(key, value);
        self
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push(Entry {
            key: key.into(),
            value: value.into(),
        });
    }

    /// Downgrades a passing section to failing when `ok` is false.
    pub fn require(&mut self, ok: bool) {
        if !ok {
            self.status = Status::Fail;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub sections: Vec<Section>,
    pub exit_code: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Report {
    pub fn new(command: impl Into<String>, sections: Vec<Section>) -> Self {
        let refuted = sections
            .iter()
            .any(|s| matches!(s.status, Status::Fail | Status::Undecided));
        Report {
            command: command.into(),
            sections,
            exit_code: if refuted { 1 } else { 0 },
        }
    }

    pub fn passed(&self) -> bool {
        self.exit_code == 0
    }

    pub fn render(&self, format: Format, color: bool) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(color),
        }
    }

    fn render_text(&self, color: bool) -> String {
        let mut out = format!("$ {}\n", self.command);
        let paint = |status: Status| {
            if color {
                format!("{}[{}]\x1b[0m", status.color(), status.label())
            } else {
                format!("[{}]", status.label())
            }
        };
        for s in &self.sections {
            out.push_str(&format!("{} {}\n", paint(s.status), s.title));
            for e in &s.entries {
                let mut lines = e.value.lines();
                out.push_str(&format!("    {}: {}\n", e.key, lines.next().unwrap_or("")));
                for l in lines {
                    out.push_str(&format!("      {l}\n"));
                }
            }
        }
        let count = |st: Status| self.sections.iter().filter(|s| s.status == st).count();
        out.push_str(&format!(
            "summary: {} passed, {} failed, {} undecided; exit {}\n",
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Undecided),
            self.exit_code
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_statuses() {
        let ok = Report::new(
            "x",
            vec![Section::new("a", Status::Pass), Section::new("b", Status::Info)],
        );
        assert_eq!(ok.exit_code, 0);
        let undecided = Report::new("x", vec![Section::new("a", Status::Undecided)]);
        assert_eq!(undecided.exit_code, 1);
        let failed = Report::new(
            "x",
            vec![Section::new("a", Status::Pass), Section::new("b", Status::Fail)],
        );
        assert_eq!(failed.exit_code, 1);
    }

    #[test]
    fn text_layout() {
        let r = Report::new(
            "tml demo",
            vec![Section::new("check", Status::Pass).entry("value", "one\ntwo")],
        );
        assert_eq!(
            r.render(Format::Text, false),
            "$ tml demo\n[PASS] check\n    value: one\n      two\nsummary: 1 passed, 0 failed, 0 undecided; exit 0\n"
        );
        assert!(r.render(Format::Text, true).contains("\x1b[32m[PASS]"));
        assert!(r.render(Format::Json, false).contains("\"status\": \"pass\""));
    }
}
