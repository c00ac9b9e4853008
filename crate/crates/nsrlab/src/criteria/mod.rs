//! The interior regularity-criterion engine, lemma audits and the
//! parabolic box-counting dimension estimator.

mod boxcount;
mod engine;
mod lemmas;
mod verdict;

pub use boxcount::{singular_set_dimension, SingularSetEstimate, SpaceTimePoint};
pub use engine::{ckn_check, contraction_trace, evaluate_criterion};
pub use lemmas::{lemma_audit, AuditContext, AuditOptions, AuditReport, LemmaId, LemmaReport};
pub use verdict::{
    ContractionEntry, ContractionTrace, CriterionConfig, CriterionVerdict, VerdictStatus,
    DEFAULT_EPSILON,
};
