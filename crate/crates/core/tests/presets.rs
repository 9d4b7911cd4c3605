use std::path::PathBuf;

use cavity::poly::{parse_polynomial, parse_preset};
use cavity::presets;

fn preset_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

#[test]
fn shipped_files_match_library_presets() {
    let files = [
        ("circle", "circle.poly"),
        ("sphere", "sphere.poly"),
        ("degree6", "degree6.poly"),
        ("hypotrochoid", "hypotrochoid.poly"),
        ("crystal", "crystal.poly"),
        ("hyperbola", "hyperbola.poly"),
    ];
    for (name, file) in files {
        let text = std::fs::read_to_string(preset_dir().join(file)).unwrap();
        let parsed = parse_preset(&text).unwrap();
        let pr = presets::by_name(name).unwrap_or_else(|| panic!("no preset {name}"));
        assert_eq!(parsed.p, pr.p, "{file}");
        assert_eq!(parsed.point.as_deref(), Some(pr.point.as_slice()), "{file}");
    }
    let text = std::fs::read_to_string(preset_dir().join("hypotrochoid_separator.poly")).unwrap();
    assert_eq!(parse_polynomial(&text).unwrap(), presets::hypotrochoid().q.unwrap());
}

#[test]
fn every_library_preset_is_named() {
    for pr in presets::all() {
        assert_eq!(presets::by_name(pr.name).unwrap().p, pr.p);
    }
    assert!(presets::by_name("torus").is_none());
}
