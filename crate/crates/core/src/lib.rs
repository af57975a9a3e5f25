//! Toolkit for speech dialogue translation experiments: bilingual dialogue
//! corpora, cross-language splits, context construction for context-aware
//! translation, ASR/MT adapters, cascade orchestration and evaluation.

pub mod backends;
pub mod cascade;
pub mod cli;
pub mod context;
pub mod corpus;
pub mod lang;
pub mod metrics;
