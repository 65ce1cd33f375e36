//! Group constructors, the group-spec language and the GroupFile format.

mod build;
mod groupfile;
mod parse;

pub use build::{build, direct_product, eval_word, group};
pub use groupfile::{load_group_file, regular_group_file, GroupFile};
pub use parse::{parse_group_spec, GroupSpec, SpecNode, Word};
