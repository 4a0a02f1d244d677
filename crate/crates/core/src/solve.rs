//! Certificates for the finite covering numbers, interval matching,
//! localization and the meager-basis inclusion test.

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Check, Relation};
use crate::meagerrep::MeagerRep;
use crate::slalom::{
    self, captures, CaptureMode, CoverInstance, CoverKind, CoverOutcome, GrowthFn, Path,
    SearchOptions,
};
use crate::error::Result;
use crate::trees::CutSequence;

pub const COV: &str = "cov";
pub const COF: &str = "cof";

/// Guards that change what is computed and therefore go into the certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverGuards {
    pub path_guard: u64,
    pub coverage_guard: u64,
    pub max_family: Option<usize>,
}

impl From<&SearchOptions> for CoverGuards {
    fn from(o: &SearchOptions) -> Self {
        CoverGuards {
            path_guard: o.path_guard,
            coverage_guard: o.coverage_guard,
            max_family: o.max_family,
        }
    }
}

/// Runs the exact search and records the value, the canonical witness and
/// an independent check that the witness covers every path. The worker
/// count is deliberately not recorded: it never changes the outcome.
pub fn certify_cover(
    f: &GrowthFn,
    widths: &[u64],
    kind: CoverKind,
    opts: &SearchOptions,
) -> Result<(Certificate, CoverOutcome)> {
    let inst = CoverInstance::new(f, widths, kind, opts)?;
    let outcome = inst.solve(opts)?;
    let name = match kind {
        CoverKind::Cof => COF,
        CoverKind::Cov { .. } => COV,
    };
    let mut b = Certificate::builder(name)
        .param("f", f)
        .param("w", widths)
        .param("guards", CoverGuards::from(opts));
    if let CoverKind::Cov { t, from } = kind {
        b = b.param("t", t).param("from", from);
    }
    match &outcome {
        CoverOutcome::Optimal { value, witness } => {
            b.check(Check::new("value", value.to_string(), Relation::Eq, value.to_string()));
            b.check(Check::fact("witness captures every path", inst.is_cover(witness)));
            if let (CoverKind::Cof, Some(vb)) = (kind, slalom::volume_bound(f, widths)) {
                b.check(Check::new(
                    "value >= volume bound",
                    value.to_string(),
                    Relation::Ge,
                    vb.to_string(),
                ));
            }
            b.witness(witness.iter().map(|s| s.levels().to_vec()).collect::<Vec<_>>());
        }
        CoverOutcome::Infeasible { uncapturable } => {
            b.check(Check::fact("every path is capturable", false));
            b.witness(uncapturable);
        }
        CoverOutcome::AboveCap { cap } => {
            b.check(Check::new("value found within cap", "none", Relation::Eq, cap.to_string()));
        }
    }
    b.note(format!(
        "{} paths, {} maximal candidate slaloms",
        inst.path_count(),
        inst.candidate_count()
    ));
    Ok((b.finish(), outcome))
}

pub const MATCH: &str = "match";

/// `cuts` given explicitly, or `block` for consecutive blocks of that length.
pub fn certify_match(family: &[Path], block: Option<usize>, cuts: Option<&CutSequence>) -> Result<Certificate> {
    let policy = match (block, cuts) {
        (_, Some(c)) => slalom::BlockPolicy::Cuts(c.clone()),
        (Some(len), None) => slalom::BlockPolicy::Fixed(len),
        (None, None) => slalom::BlockPolicy::Fixed(family.len().max(1)),
    };
    let m = slalom::match_intervals(family, &policy)?;
    let mut b = Certificate::builder(MATCH)
        .param("family", family)
        .param("block", block)
        .param("cuts", cuts);
    b.check(Check::fact("h agrees with every member in every block", slalom::verify_matching(family, &m)));
    b.witness(serde_json::json!({ "cuts": m.cuts, "h": m.h }));
    Ok(b.finish())
}

pub const LOCALIZE: &str = "localize";

pub fn certify_localize(family: &[Path], f: &GrowthFn, from: usize) -> Result<Certificate> {
    let s = slalom::localize(family, f, from)?;
    let mut b = Certificate::builder(LOCALIZE)
        .param("family", family)
        .param("f", f)
        .param("from", from);
    let all = family
        .iter()
        .map(|g| captures(&s, g, CaptureMode::AlmostEverywhere, from, 0))
        .collect::<Result<Vec<_>>>()?;
    b.check(Check::fact("every member localized from n0", all.iter().all(|&x| x)));
    let widest = (from..f.len()).all(|n| s.level(n).len() <= n);
    b.check(Check::fact("|S(n)| <= n", widest));
    b.witness(s.levels());
    Ok(b.finish())
}

pub const INCLUDES: &str = "includes";

pub fn certify_includes(r1: &MeagerRep, r2: &MeagerRep, oracle_guard: usize) -> Result<Certificate> {
    let mut b = Certificate::builder(INCLUDES)
        .param("r1", r1.to_text())
        .param("r2", r2.to_text())
        .param("oracle_guard", oracle_guard);
    let crit = r1.includes(r2)?;
    b.check(Check::new("criterion", crit.to_string(), Relation::Eq, crit.to_string()));
    let (a, z) = r1.span();
    if z - a <= oracle_guard {
        let semantic = r1.includes_oracle_guarded(r2, oracle_guard)?;
        // the criterion is sufficient, never necessary
        b.check(Check::fact("criterion implies semantic inclusion", !crit || semantic));
        b.note(format!("semantic inclusion: {semantic}"));
    } else {
        b.note("span exceeds the oracle guard; semantic inclusion not checked");
    }
    b.witness(r1.inclusion_witnesses(r2)?);
    Ok(b.finish())
}

pub(crate) fn replay_cover(cert: &Certificate) -> Result<Certificate> {
    let guards: CoverGuards = cert.param("guards")?;
    let opts = SearchOptions {
        path_guard: guards.path_guard,
        coverage_guard: guards.coverage_guard,
        max_family: guards.max_family,
        ..SearchOptions::default()
    };
    let kind = if cert.construction == COF {
        CoverKind::Cof
    } else {
        CoverKind::Cov {
            t: cert.param("t")?,
            from: cert.param("from")?,
        }
    };
    let w: Vec<u64> = cert.param("w")?;
    Ok(certify_cover(&cert.param("f")?, &w, kind, &opts)?.0)
}

pub(crate) fn replay_match(cert: &Certificate) -> Result<Certificate> {
    let family: Vec<Path> = cert.param("family")?;
    let cuts: Option<CutSequence> = cert.param_opt("cuts")?;
    certify_match(&family, cert.param_opt("block")?, cuts.as_ref())
}

pub(crate) fn replay_localize(cert: &Certificate) -> Result<Certificate> {
    let family: Vec<Path> = cert.param("family")?;
    certify_localize(&family, &cert.param("f")?, cert.param("from")?)
}

pub(crate) fn replay_includes(cert: &Certificate) -> Result<Certificate> {
    let r1 = MeagerRep::from_text(&cert.param::<String>("r1")?)?;
    let r2 = MeagerRep::from_text(&cert.param::<String>("r2")?)?;
    certify_includes(&r1, &r2, cert.param("oracle_guard")?)
}
