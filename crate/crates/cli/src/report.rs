use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub expected: Value,
    pub observed: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub millis: u128,
}

#[derive(Debug, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub q: u64,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
    pub total_millis: u128,
}

impl VerificationReport {
    pub fn new(n: usize, q: u64) -> Self {
        VerificationReport {
            n,
            q,
            pass: true,
            checks: Vec::new(),
            total_millis: 0,
        }
    }

    /// Records a check. `run` returns `(expected, observed, witness)`; the
    /// check passes when expected equals observed.
    pub fn check<F>(&mut self, name: &str, run: F) -> pluecker::Result<()>
    where
        F: FnOnce() -> pluecker::Result<(Value, Value, Option<String>)>,
    {
        let start = Instant::now();
        let (expected, observed, witness) = run()?;
        let pass = expected == observed;
        self.pass &= pass;
        let millis = start.elapsed().as_millis();
        self.total_millis += millis;
        self.checks.push(CheckResult {
            name: name.to_string(),
            expected,
            observed,
            pass,
            witness: if pass { None } else { witness },
            millis,
        });
        Ok(())
    }
}
