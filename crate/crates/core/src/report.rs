//! Named pass/fail checks with witnesses, shared by the verification
//! suites and the command line.

use std::fmt;

/// One named check with an optional witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, witness: Option<String>) -> Self {
        Check {
            name: name.into(),
            passed: witness.is_none(),
            detail: witness,
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        if self.detail.is_none() {
            self.detail = Some(note.into());
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            match &c.detail {
                Some(d) if !c.passed => writeln!(f, "  {status} {}: witness {d}", c.name)?,
                Some(d) => writeln!(f, "  {status} {} ({d})", c.name)?,
                None => writeln!(f, "  {status} {}", c.name)?,
            }
        }
        Ok(())
    }
}
