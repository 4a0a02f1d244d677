//! Machine-checkable verification records.
//!
//! A certificate names a construction, embeds every input needed to rebuild
//! it, and lists exact checks of the form `lhs relation rhs`. Numbers are
//! written as exact rationals (`p/q`). The checksum covers everything except
//! the checksum field itself.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    /// Numeric comparison when both sides parse as rationals, otherwise
    /// string (in)equality. Ordering relations on non-numbers never hold.
    pub fn evaluate(self, lhs: &str, rhs: &str) -> bool {
        match (exact::parse(lhs), exact::parse(rhs)) {
            (Some(a), Some(b)) => self.compare(&a, &b),
            _ => match self {
                Relation::Eq => lhs == rhs,
                Relation::Ne => lhs != rhs,
                _ => false,
            },
        }
    }

    pub fn compare(self, a: &Rational, b: &Rational) -> bool {
        match self {
            Relation::Eq => a == b,
            Relation::Ne => a != b,
            Relation::Lt => a < b,
            Relation::Le => a <= b,
            Relation::Gt => a > b,
            Relation::Ge => a >= b,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub relation: Relation,
    pub verdict: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: impl Into<String>, relation: Relation, rhs: impl Into<String>) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        let verdict = relation.evaluate(&lhs, &rhs);
        Check {
            name: name.into(),
            lhs,
            rhs,
            relation,
            verdict,
        }
    }

    pub fn rational(name: impl Into<String>, lhs: &Rational, relation: Relation, rhs: &Rational) -> Self {
        Self::new(name, exact::fmt(lhs), relation, exact::fmt(rhs))
    }

    /// A boolean fact, recorded as `value = true`.
    pub fn fact(name: impl Into<String>, value: bool) -> Self {
        Self::new(name, value.to_string(), Relation::Eq, "true")
    }

    pub fn reproduces(&self) -> bool {
        self.relation.evaluate(&self.lhs, &self.rhs) == self.verdict
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub construction: String,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Conventions and flags the verdict depends on.
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub verdict: Verdict,
    #[serde(default)]
    pub checksum: String,
}

#[derive(Serialize)]
struct ChecksummedRegion<'a> {
    construction: &'a str,
    params: &'a BTreeMap<String, Value>,
    seed: u64,
    checks: &'a [Check],
    notes: &'a [String],
    witness: &'a Option<Value>,
    verdict: Verdict,
}

/// Result of re-examining a certificate without rebuilding it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recheck {
    pub checksum_ok: bool,
    /// names of checks whose stored verdict does not follow from lhs/rhs
    pub unreproduced: Vec<String>,
    pub verdict_consistent: bool,
}

impl Recheck {
    pub fn ok(&self) -> bool {
        self.checksum_ok && self.unreproduced.is_empty() && self.verdict_consistent
    }
}

pub struct CertificateBuilder {
    construction: String,
    params: BTreeMap<String, Value>,
    seed: u64,
    checks: Vec<Check>,
    notes: Vec<String>,
    witness: Option<Value>,
}

impl CertificateBuilder {
    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameters serialize"),
        );
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        self.checks.push(c);
        self
    }

    pub fn note(&mut self, n: impl Into<String>) -> &mut Self {
        self.notes.push(n.into());
        self
    }

    pub fn witness(&mut self, w: impl Serialize) -> &mut Self {
        self.witness = Some(serde_json::to_value(w).expect("witness serializes"));
        self
    }

    pub fn finish(self) -> Certificate {
        let verdict = Verdict::from_bool(self.checks.iter().all(|c| c.verdict));
        let mut cert = Certificate {
            construction: self.construction,
            params: self.params,
            seed: self.seed,
            checks: self.checks,
            notes: self.notes,
            witness: self.witness,
            verdict,
            checksum: String::new(),
        };
        cert.checksum = cert.compute_checksum();
        cert
    }
}

impl Certificate {
    pub fn builder(construction: &str) -> CertificateBuilder {
        CertificateBuilder {
            construction: construction.to_string(),
            params: BTreeMap::new(),
            seed: 0,
            checks: Vec::new(),
            notes: Vec::new(),
            witness: None,
        }
    }

    pub fn compute_checksum(&self) -> String {
        let region = ChecksummedRegion {
            construction: &self.construction,
            params: &self.params,
            seed: self.seed,
            checks: &self.checks,
            notes: &self.notes,
            witness: &self.witness,
            verdict: self.verdict,
        };
        let bytes = serde_json::to_vec(&region).expect("certificate serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    /// Records `seed` (for constructions that draw no randomness) and
    /// refreshes the checksum.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.checksum = self.compute_checksum();
        self
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn param<T: serde::de::DeserializeOwned>(&self, key: &str) -> Result<T> {
        let v = self
            .params
            .get(key)
            .ok_or_else(|| Error::invalid(format!("certificate lacks parameter `{key}`")))?;
        serde_json::from_value(v.clone())
            .map_err(|e| Error::invalid(format!("parameter `{key}`: {e}")))
    }

    pub fn param_opt<T: serde::de::DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        match self.params.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(_) => self.param(key).map(Some),
        }
    }

    pub fn recheck(&self) -> Recheck {
        Recheck {
            checksum_ok: self.checksum == self.compute_checksum(),
            unreproduced: self
                .checks
                .iter()
                .filter(|c| !c.reproduces())
                .map(|c| c.name.clone())
                .collect(),
            verdict_consistent: self.verdict == Verdict::from_bool(self.checks.iter().all(|c| c.verdict)),
        }
    }

    /// Pretty JSON with a trailing newline; byte-identical for equal certificates.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }

    /// Same construction, inputs, checks and verdict.
    pub fn same_region(&self, other: &Certificate) -> bool {
        self.compute_checksum() == other.compute_checksum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn sample() -> Certificate {
        let mut b = Certificate::builder("demo").param("n", 3).seed(7);
        b.check(Check::rational("measure", &ratio(7, 8), Relation::Eq, &ratio(7, 8)));
        b.check(Check::fact("disjoint", true));
        b.note("toy");
        b.finish()
    }

    #[test]
    fn relations_are_exact() {
        assert!(Relation::Le.evaluate("1/3", "2/6"));
        assert!(!Relation::Lt.evaluate("1/3", "2/6"));
        assert!(Relation::Gt.evaluate("1000000000000000000000001", "1000000000000000000000000"));
        assert!(Relation::Eq.evaluate("true", "true"));
        assert!(!Relation::Le.evaluate("abc", "abd"));
        assert!(Relation::Ne.evaluate("0101", "0110"));
    }

    #[test]
    fn json_round_trip_is_byte_exact() {
        let c = sample();
        let txt = c.to_json();
        let back = Certificate::from_json(&txt).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), txt);
        assert!(back.recheck().ok());
        assert_eq!(c.param::<u64>("n").unwrap(), 3);
        assert!(c.param::<u64>("m").is_err());
    }

    #[test]
    fn tampering_is_detected() {
        let mut c = sample();
        c.checks[0].rhs = "3/4".into();
        let r = c.recheck();
        assert!(!r.checksum_ok);
        assert_eq!(r.unreproduced, ["measure"]);

        let mut c = sample();
        c.verdict = Verdict::Fail;
        assert!(!c.recheck().verdict_consistent);
    }

    #[test]
    fn failing_check_fails_the_verdict() {
        let mut b = Certificate::builder("demo");
        b.check(Check::rational("bound", &ratio(1, 2), Relation::Gt, &ratio(1, 2)));
        let c = b.finish();
        assert!(!c.passed());
        assert!(c.recheck().ok());
    }
}
