use tysys_core::acceptance::{run, run_all};

/// Runs every criterion, or only the one named by `TYSYS_CRITERION`.
#[test]
fn acceptance() {
    let outcomes = match std::env::var("TYSYS_CRITERION") {
        Ok(id) => vec![run(id.parse().expect("criterion number")).expect("known criterion")],
        Err(_) => run_all(),
    };
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
