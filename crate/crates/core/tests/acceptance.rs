//! One line per acceptance criterion; exits non-zero if any fails.
//! `cargo test --test acceptance -- --bless` regenerates the golden files.

use std::path::Path;
use std::process::ExitCode;

use gwrecon::selftest;

fn main() -> ExitCode {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    if std::env::args().any(|a| a == "--bless") {
        for (name, doc) in selftest::golden_documents().expect("golden documents compute") {
            std::fs::write(golden.join(name), serde_json::to_string_pretty(&doc).unwrap() + "\n").unwrap();
            println!("wrote {name}");
        }
        return ExitCode::SUCCESS;
    }
    let results = selftest::run(Some(&golden));
    for c in &results {
        println!("{c}");
    }
    let passed = results.iter().filter(|c| c.passed).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
