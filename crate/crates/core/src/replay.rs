//! Rebuilding a certificate from its embedded parameters.

use crate::certificate::{Certificate, Recheck};
use crate::construct::{bj, indep, noncover, shelah};
use crate::error::{Error, Result};
use crate::{solve, twoscale};

/// Constructions whose output depends on the seed.
pub const SEEDED: [&str; 2] = [indep::CONSTRUCTION, noncover::CONSTRUCTION];

/// Reconstructs the certificate from its parameters and seed alone.
pub fn replay(cert: &Certificate) -> Result<Certificate> {
    let rebuilt = rebuild(cert)?;
    if SEEDED.contains(&cert.construction.as_str()) {
        Ok(rebuilt)
    } else {
        Ok(rebuilt.with_seed(cert.seed))
    }
}

fn rebuild(cert: &Certificate) -> Result<Certificate> {
    match cert.construction.as_str() {
        indep::CONSTRUCTION => indep::replay(cert),
        shelah::TREE_CONSTRUCTION => shelah::replay_tree(cert),
        shelah::COUNTING_CONSTRUCTION => shelah::replay_counting(cert),
        shelah::LOCALIZATION_CONSTRUCTION => shelah::replay_localization(cert),
        bj::LEVEL_CONSTRUCTION => bj::replay_level(cert),
        bj::EVADE_CONSTRUCTION => bj::replay_evade(cert),
        noncover::CONSTRUCTION => noncover::replay(cert),
        twoscale::CONSTRUCTION => twoscale::replay(cert),
        twoscale::ESCAPE_CONSTRUCTION => twoscale::replay_escape(cert),
        solve::COV | solve::COF => solve::replay_cover(cert),
        solve::MATCH => solve::replay_match(cert),
        solve::LOCALIZE => solve::replay_localize(cert),
        solve::INCLUDES => solve::replay_includes(cert),
        other => Err(Error::invalid(format!("unknown construction `{other}`"))),
    }
}

#[derive(Clone, Debug)]
pub struct Verification {
    pub recheck: Recheck,
    /// the rebuilt certificate has the same checksummed region
    pub reproduced: bool,
    /// verdict of the rebuilt certificate
    pub replayed_pass: bool,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.recheck.ok() && self.reproduced
    }
}

/// Re-evaluates every stored check, recomputes the checksum, and rebuilds
/// the certificate to compare against.
pub fn verify(cert: &Certificate) -> Result<Verification> {
    let recheck = cert.recheck();
    let rebuilt = replay(cert)?;
    Ok(Verification {
        recheck,
        reproduced: rebuilt.same_region(cert) && rebuilt.checksum == cert.checksum,
        replayed_pass: rebuilt.passed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_certificates_verify() {
        let c = indep::certify_indep(3, (0, 6), 2, 10, 1).unwrap();
        assert!(verify(&c).unwrap().ok());
        let mut t = c.clone();
        t.checks[0].rhs = "3/4".into();
        let v = verify(&t).unwrap();
        assert!(!v.ok());
        assert!(!v.recheck.checksum_ok);
    }

    #[test]
    fn unknown_construction() {
        let c = Certificate::builder("nope").finish();
        assert!(replay(&c).is_err());
    }
}
