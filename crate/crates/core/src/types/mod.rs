//! Intersection and union types for the source calculus, strict intersection
//! types for the target, derivations for both, and the bridges between them.

pub mod ccv;
pub mod cderiv;
pub mod fixtures;
pub mod infer;
pub mod strict;
pub(crate) mod syntax;
pub mod tderiv;
pub mod translate;
pub mod transport;

pub use ccv::{subtype_ccv, CcvType, Raw, Sub, Union};
pub use cderiv::{check_ccv, CcvDerivation, CcvJudgment, CcvRule, Delta, Gamma};
pub use infer::{expand_subject, infer_nf, type_sn};
pub use strict::{classify, subtype_tgt, Class, Inter, Sty};
pub use tderiv::{check_tgt, DerivError, TEnv, TNode, TRule, TgtDerivation};
pub use translate::translate_type;
pub use transport::transport_aei16;
