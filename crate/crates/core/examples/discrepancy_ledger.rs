// Printed closed-form expressions evaluated against computed values at the
// reference point, listing the entries that disagree.
//
// Run with `cargo run --example discrepancy_ledger`.

use raman_photostat::ledger::{build_ledger, reference_point};

fn main() {
    let (params, t) = reference_point();
    let entries = build_ledger(&params, t).expect("ledger");
    let agreeing = entries.iter().filter(|e| e.agrees).count();
    println!("{agreeing} of {} entries agree within tolerance\n", entries.len());
    println!("{:<28} {:<24} {:>12} {:>12}", "group", "entry", "printed", "computed");
    for e in entries.iter().filter(|e| !e.agrees) {
        println!("{:<28} {:<24} {:>12.6} {:>12.6}", e.group, e.entry, e.printed, e.computed);
    }
}
