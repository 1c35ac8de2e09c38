//! Certificates: the structured output of every validator.
//!
//! A [`Check`] records one law, how many instances were swept, and the
//! witnesses found (empty means the law held).  A [`Certificate`] is the
//! ordered list of checks a validator ran.  Serialization is stable:
//! field order is fixed and check order follows validator code order, so
//! reports are byte-identical across runs for the same input.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub tag: String,
    pub instances: u64,
    pub witnesses: Vec<Witness>,
}

impl Check {
    pub fn pass(tag: &str, instances: u64) -> Self {
        Check { tag: tag.into(), instances, witnesses: Vec::new() }
    }

    pub fn of(tag: &str, instances: u64, witness: Option<Witness>) -> Self {
        Check { tag: tag.into(), instances, witnesses: witness.into_iter().collect() }
    }

    pub fn ok(&self) -> bool {
        self.witnesses.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
pub struct Certificate {
    pub checked: Vec<Check>,
}

impl Certificate {
    pub fn new() -> Self {
        Certificate::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checked.push(check);
    }

    /// Run `law` over `0..instances` with `find`, recording the first
    /// counterexample if any.
    pub fn sweep<F>(&mut self, tag: &str, instances: u64, find: F)
    where
        F: Fn(u64) -> Option<Witness> + Sync + Send,
    {
        let witness = crate::exec::find_first(instances, find);
        self.push(Check::of(tag, instances, witness));
    }

    pub fn merge(&mut self, other: Certificate) {
        self.checked.extend(other.checked);
    }

    /// Prefix every tag, for embedding one validator's output in another's.
    pub fn scoped(mut self, prefix: &str) -> Certificate {
        for c in &mut self.checked {
            c.tag = format!("{prefix}.{}", c.tag);
        }
        self
    }

    pub fn ok(&self) -> bool {
        self.checked.iter().all(Check::ok)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checked.iter().filter(|c| !c.ok()).collect()
    }

    pub fn witnesses(&self) -> Vec<&Witness> {
        self.checked.iter().flat_map(|c| c.witnesses.iter()).collect()
    }

    /// Total instances swept, summed over checks.
    pub fn instances(&self) -> u64 {
        self.checked.iter().map(|c| c.instances).sum()
    }

    /// Convert the first recorded failure into an error, or pass the
    /// certificate through untouched.
    pub fn require(self) -> Result<Certificate> {
        match self.checked.iter().find_map(|c| c.witnesses.first()) {
            Some(w) => Err(Error::Law(w.clone())),
            None => Ok(self),
        }
    }
}

// The wire form adds redundant `failures` and `witnesses` summaries so a
// report consumer can see what failed without walking every check.
impl Serialize for Certificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let failures: Vec<&str> =
            self.checked.iter().filter(|c| !c.ok()).map(|c| c.tag.as_str()).collect();
        let witnesses = self.witnesses();
        let mut st = s.serialize_struct("Certificate", 3)?;
        st.serialize_field("checked", &self.checked)?;
        st.serialize_field("failures", &failures)?;
        st.serialize_field("witnesses", &witnesses)?;
        st.end()
    }
}

/// Top-level report emitted by the command-line interface.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    #[serde(flatten)]
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Report {
    pub fn from_certificate(command: &str, certificate: Certificate) -> Self {
        let status = if certificate.ok() { Status::Pass } else { Status::Fail };
        Report { command: command.into(), status, certificate }
    }

    pub fn error(command: &str, err: &Error) -> Self {
        let mut certificate = Certificate::new();
        let witnesses = err.witness().cloned().into_iter().collect();
        certificate.push(Check { tag: format!("error: {err}"), instances: 0, witnesses });
        Report { command: command.into(), status: Status::Error, certificate }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_require_surfaces_first_witness() {
        let mut cert = Certificate::new();
        cert.push(Check::pass("a", 10));
        cert.push(Check::of("b", 5, Some(Witness::new("b", &[("x", 3)]))));
        let err = cert.require().unwrap_err();
        assert_eq!(err.witness().unwrap().get("x"), Some(3));
    }

    #[test]
    fn serialized_certificate_lists_failures() {
        let mut cert = Certificate::new();
        cert.push(Check::pass("fine", 1));
        cert.push(Check::of("broken", 2, Some(Witness::new("broken", &[("y", 0)]))));
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["failures"], serde_json::json!(["broken"]));
        assert_eq!(json["witnesses"][0]["law"], "broken");
    }

    #[test]
    fn report_exit_codes() {
        let pass = Report::from_certificate("check", Certificate::new());
        assert_eq!(pass.exit_code(), 0);
        let mut cert = Certificate::new();
        cert.push(Check::of("t", 1, Some(Witness::new("t", &[]))));
        assert_eq!(Report::from_certificate("check", cert).exit_code(), 1);
        assert_eq!(Report::error("check", &Error::input("nope")).exit_code(), 2);
    }
}
