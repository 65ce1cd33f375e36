//! Writes one GroupFile per isomorphism type of group of order below 25.
//!
//! Usage: `cargo run --example export_small_groups -- <output dir>`
//!
//! Each group is built from a spec, exported as its regular permutation
//! representation, and labelled with the spec it came from.

use std::path::PathBuf;

use beauville::catalog::{group, regular_group_file};
use beauville::verify::{fixture_file_name, SMALL_GROUP_SPECS};

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "small_groups".into()));
    std::fs::create_dir_all(&dir).expect("create output directory");
    for spec in SMALL_GROUP_SPECS {
        let g = group(spec).unwrap_or_else(|e| panic!("{spec}: {e}"));
        let file = regular_group_file(&g, Some(spec.to_string()));
        let path = dir.join(fixture_file_name(g.order(), spec));
        std::fs::write(&path, file.to_string()).expect("write group file");
    }
    println!("wrote {} files to {}", SMALL_GROUP_SPECS.len(), dir.display());
}
