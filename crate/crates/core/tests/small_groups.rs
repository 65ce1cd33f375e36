//! The exported GroupFiles cover every group of order below 25 exactly once and carry no threefolds.

use std::path::PathBuf;

use beauville::beauville::{Constraints, Context};
use beauville::catalog::{group, load_group_file, regular_group_file, GroupFile};
use beauville::verify::{fixture_file_name, load_small_groups, GROUP_COUNTS_BELOW_25, SMALL_GROUP_SPECS};
use beauville::Limits;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/small_groups")
}

#[test]
fn fixtures_cover_every_small_group() {
    let groups = load_small_groups(&fixture_dir(), &Limits::default()).unwrap();
    assert_eq!(groups.len(), GROUP_COUNTS_BELOW_25.iter().sum::<usize>());
    assert_eq!(groups.len(), SMALL_GROUP_SPECS.len());
    for g in &groups {
        let ctx = Context::new(g, Limits::default());
        assert!(!ctx.exists(3, &Constraints::default()).unwrap(), "{}", g.label());
    }
}

#[test]
fn fixtures_match_a_fresh_export() {
    for spec in SMALL_GROUP_SPECS {
        let g = group(spec).unwrap();
        let text = regular_group_file(&g, Some(spec.to_string())).to_string();
        let name = fixture_file_name(g.order(), spec);
        let on_disk = std::fs::read_to_string(fixture_dir().join(&name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(GroupFile::parse(&on_disk).unwrap(), GroupFile::parse(&text).unwrap(), "{name}");
    }
}

#[test]
fn duplicate_isomorphism_types_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(fixture_dir()).unwrap() {
        let path = entry.unwrap().path();
        std::fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
    }
    // Replace D4 by a second copy of Q2: the per-order count still holds, but two files are isomorphic.
    let q2 = std::fs::read_to_string(dir.path().join("08_Q2.group")).unwrap();
    std::fs::write(dir.path().join("08_D4.group"), q2).unwrap();
    assert!(load_small_groups(dir.path(), &Limits::default()).is_err());
    std::fs::remove_file(dir.path().join("08_D4.group")).unwrap();
    assert!(load_small_groups(dir.path(), &Limits::default()).is_err());
}

#[test]
fn loaded_files_keep_their_labels() {
    let g = load_group_file(&fixture_dir().join("24_SL_2_3.group"), &Limits::default()).unwrap();
    assert_eq!(g.label(), "SL(2,3)");
    assert_eq!(g.order(), 24);
}
