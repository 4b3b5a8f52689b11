//! Embedded reference data: Casimir fields in the current basis, golden OPE
//! tables and normally ordered relations.
//!
//! Every file is listed in `fixtures/SHA256SUMS`; [`verify_integrity`]
//! recomputes the digests of the embedded bytes.

use sha2::{Digest, Sha256};

macro_rules! fixture_table {
    ($($path:literal),* $(,)?) => {
        /// `(relative path, contents)` for every embedded fixture.
        pub const FILES: &[(&str, &str)] = &[
            $(($path, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/", $path)))),*
        ];
    };
}

fixture_table!(
    "casimir/n2_C2.txt",
    "casimir/n3_C2.txt",
    "casimir/n3_C3.txt",
    "casimir/n4_C2.txt",
    "casimir/n4_C3.txt",
    "casimir/n4_C4.txt",
    "golden/n2_ope.txt",
    "golden/n3_ope.txt",
    "golden/n4_ope.txt",
    "golden/n2_relations.txt",
    "golden/n3_relations.txt",
    "golden/n4_relations.txt",
);

const MANIFEST: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/SHA256SUMS"));

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixtureError {
    #[error("fixture {0} is not listed in SHA256SUMS")]
    Unlisted(String),
    #[error("fixture {path} digest mismatch: manifest {expected}, embedded {actual}")]
    Digest { path: String, expected: String, actual: String },
}

/// Raw text of an embedded fixture.
pub fn get(path: &str) -> Option<&'static str> {
    FILES.iter().find(|(p, _)| *p == path).map(|(_, t)| *t)
}

/// The `i`-th Casimir field of the rank-`n` current algebra, for `i >= 2`.
pub fn casimir(n: u8, i: u8) -> Option<&'static str> {
    get(&format!("casimir/n{n}_C{i}.txt"))
}

pub fn golden_ope(n: u8) -> Option<&'static str> {
    get(&format!("golden/n{n}_ope.txt"))
}

pub fn golden_relations(n: u8) -> Option<&'static str> {
    get(&format!("golden/n{n}_relations.txt"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Checks every embedded fixture against the manifest.
pub fn verify_integrity() -> Result<(), FixtureError> {
    for (path, text) in FILES {
        let expected = MANIFEST
            .lines()
            .filter_map(|l| l.split_once("  "))
            .find(|(_, p)| p.trim() == *path)
            .map(|(d, _)| d.to_string())
            .ok_or_else(|| FixtureError::Unlisted(path.to_string()))?;
        let actual = sha256_hex(text.as_bytes());
        if actual != expected {
            return Err(FixtureError::Digest { path: path.to_string(), expected, actual });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_matches() {
        verify_integrity().unwrap();
    }

    #[test]
    fn lookup() {
        assert!(casimir(4, 4).is_some());
        assert!(casimir(5, 2).is_none());
        assert!(casimir(2, 3).is_none());
    }
}
