//! Prints one line per acceptance criterion and fails if any criterion fails.

use smlab_core::selftest;

fn main() {
    let mut failed = Vec::new();
    for id in 1..=selftest::TITLES.len() {
        let c = selftest::run(id);
        println!("{}", c.line());
        if !c.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", selftest::TITLES.len());
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
