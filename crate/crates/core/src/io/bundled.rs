//! Case files shipped with the library.

use std::path::Path;

use super::case_file::CaseFile;
use crate::error::Result;

const CASES: [(&str, &str); 3] = [
    ("rts24", include_str!("../../cases/rts24.toml")),
    ("micro1", include_str!("../../cases/micro1.toml")),
    ("micro-overload", include_str!("../../cases/micro-overload.toml")),
];

pub fn bundled_names() -> Vec<&'static str> {
    CASES.iter().map(|(n, _)| *n).collect()
}

pub fn bundled_source(name: &str) -> Option<&'static str> {
    CASES.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// A bundled case name or a path to a case file.
pub fn resolve_case_file(spec: &str) -> Result<CaseFile> {
    match bundled_source(spec) {
        Some(src) => CaseFile::parse(src),
        None => CaseFile::read(Path::new(spec)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_case_builds() {
        for name in bundled_names() {
            let c = resolve_case_file(name).unwrap().to_case().unwrap();
            assert_eq!(c.name, name);
        }
    }

    #[test]
    fn unknown_names_fall_through_to_the_filesystem() {
        assert!(bundled_source("rts25").is_none());
        assert!(matches!(resolve_case_file("rts25"), Err(crate::Error::Io(_))));
    }
}
