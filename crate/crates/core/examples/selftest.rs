//! The acceptance suite, as printed by `gwrecon --selftest`.
fn main() {
    let results = gwrecon::selftest::run(None);
    for c in &results {
        println!("{c}");
    }
    std::process::exit(if results.iter().all(|c| c.passed) { 0 } else { 1 });
}
