//! Every random draw must flow from an explicit seed.

use std::fs;
use std::path::Path;

const FORBIDDEN: [&str; 6] = ["thread_rng", "from_entropy", "OsRng", "rand::random", "SystemTime", "getrandom"];

fn scan(dir: &Path, hits: &mut Vec<String>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            scan(&path, hits);
        } else if path.extension().is_some_and(|e| e == "rs") {
            let text = fs::read_to_string(&path).unwrap();
            for (i, line) in text.lines().enumerate() {
                if FORBIDDEN.iter().any(|f| line.contains(f)) && !line.contains("const FORBIDDEN") {
                    hits.push(format!("{}:{}", path.display(), i + 1));
                }
            }
        }
    }
}

#[test]
fn no_unseeded_entropy_sources() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut hits = Vec::new();
    scan(&root.join("src"), &mut hits);
    scan(&root.join("../cli/src"), &mut hits);
    assert!(hits.is_empty(), "unseeded randomness at {hits:?}");
}
