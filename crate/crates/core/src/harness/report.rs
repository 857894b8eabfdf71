use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

/// Where a check came from: geometry, pair, t, seed and so on.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Context(BTreeMap<String, String>);

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<String>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn extend(mut self, other: &Context) -> Self {
        for (k, v) in &other.0 {
            self.0.entry(k.clone()).or_insert_with(|| v.clone());
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

fn sig<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    match crate::fmt_sig(*x).parse::<f64>() {
        Ok(v) if v.is_finite() => s.serialize_f64(v),
        _ => s.serialize_none(),
    }
}

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// The inequality being tested, in words.
    pub anchor: String,
    #[serde(serialize_with = "sig")]
    pub lhs: f64,
    #[serde(serialize_with = "sig")]
    pub rhs: f64,
    pub pass: bool,
    pub status: CheckStatus,
    pub context: Context,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
    /// A failure is a finding about sampled data and does not fail the run.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub heuristic: bool,
}

impl Check {
    pub fn with_pass(name: &str, anchor: &str, lhs: f64, rhs: f64, pass: bool, context: Context) -> Self {
        Self {
            name: name.to_string(),
            anchor: anchor.to_string(),
            lhs,
            rhs,
            pass,
            status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
            context,
            caveats: Vec::new(),
            heuristic: false,
        }
    }

    pub fn leq(name: &str, anchor: &str, lhs: f64, rhs: f64, context: Context) -> Self {
        Self::with_pass(name, anchor, lhs, rhs, lhs <= rhs, context)
    }

    /// Outside the range where the inequality is claimed; never fails.
    pub fn skipped(name: &str, anchor: &str, context: Context) -> Self {
        Self {
            name: name.to_string(),
            anchor: anchor.to_string(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            pass: true,
            status: CheckStatus::Skipped,
            context,
            caveats: Vec::new(),
            heuristic: false,
        }
    }

    pub fn with_caveat(mut self, caveat: &str) -> Self {
        self.caveats.push(caveat.to_string());
        self
    }

    pub fn heuristic(mut self) -> Self {
        self.heuristic = true;
        self
    }

    pub fn with_context(mut self, extra: &Context) -> Self {
        self.context = self.context.extend(extra);
        self
    }

    pub fn is_skipped(&self) -> bool {
        self.status == CheckStatus::Skipped
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }

    /// Failed and not heuristic.
    pub fn hard_failed(&self) -> bool {
        self.failed() && !self.heuristic
    }

    fn describe(&self) -> String {
        let ctx: Vec<String> = self.context.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "{} failed: {} with lhs {} and rhs {} [{}]",
            self.name,
            self.anchor,
            crate::fmt_sig(self.lhs),
            crate::fmt_sig(self.rhs),
            ctx.join(", ")
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    /// Hard failures only.
    pub failed: usize,
    pub heuristic_failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub findings: Vec<String>,
}

impl VerificationReport {
    /// Heuristic failures are copied into `findings`.
    pub fn new(seed: u64, checks: Vec<Check>) -> Self {
        let summary = Summary {
            total: checks.len(),
            passed: checks.iter().filter(|c| c.status == CheckStatus::Pass).count(),
            failed: checks.iter().filter(|c| c.hard_failed()).count(),
            heuristic_failed: checks.iter().filter(|c| c.failed() && c.heuristic).count(),
            skipped: checks.iter().filter(|c| c.is_skipped()).count(),
        };
        let findings = checks.iter().filter(|c| c.failed() && c.heuristic).map(Check::describe).collect();
        Self { seed, checks, summary, findings }
    }

    pub fn with_findings(mut self, findings: impl IntoIterator<Item = String>) -> Self {
        self.findings.extend(findings);
        self
    }

    /// No hard check failed.
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.hard_failed())
    }

    /// One line per check.
    pub fn to_csv(&self) -> String {
        let f = super::csv_field;
        let mut out = String::from("name,status,heuristic,lhs,rhs,anchor,context,caveats,seed\n");
        for c in &self.checks {
            let status = serde_json::to_value(c.status).expect("status serializes");
            let ctx: Vec<String> = c.context.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let num = |x: f64| if x.is_nan() { String::new() } else { crate::fmt_sig(x) };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                f(&c.name),
                status.as_str().unwrap_or_default(),
                c.heuristic,
                num(c.lhs),
                num(c.rhs),
                f(&c.anchor),
                f(&ctx.join(";")),
                f(&c.caveats.join(";")),
                self.seed
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_json() {
        let c = Check::leq("chain", "s <= m", 2.0, 1.0 / 3.0, Context::new().with("t", "1"));
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["pass"], false);
        assert_eq!(v["status"], "fail");
        assert_eq!(v["rhs"].as_f64().unwrap(), 0.333333333333);
        assert_eq!(v["context"]["t"], "1");
        assert!(v.get("caveats").is_none());
        let s = Check::skipped("x", "a <= b", Context::new());
        assert!(s.pass && s.is_skipped());
        assert!(serde_json::to_value(&s).unwrap()["lhs"].is_null());
    }

    #[test]
    fn summary_counts() {
        let r = VerificationReport::new(
            42,
            vec![
                Check::leq("a", "", 1.0, 2.0, Context::new()),
                Check::leq("b", "", 3.0, 2.0, Context::new()),
                Check::skipped("c", "", Context::new()),
            ],
        );
        assert_eq!(r.summary, Summary { total: 3, passed: 1, failed: 1, heuristic_failed: 0, skipped: 1 });
        assert!(!r.all_passed());
    }

    #[test]
    fn heuristic_failures_become_findings() {
        let r = VerificationReport::new(
            7,
            vec![
                Check::leq("a", "x <= y", 1.0, 2.0, Context::new()),
                Check::leq("b", "p <= q", 3.0, 2.0, Context::new().with("t", "4")).heuristic(),
            ],
        );
        assert!(r.all_passed());
        assert_eq!(r.summary.heuristic_failed, 1);
        assert_eq!(r.findings, vec!["b failed: p <= q with lhs 3 and rhs 2 [t=4]".to_string()]);
        assert_eq!(r.failures().count(), 0);
    }
}
