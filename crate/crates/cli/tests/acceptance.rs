//! Acceptance suite: one line per criterion, plus negative controls that
//! must fail. Exits nonzero if anything is off.

use enriques_core::lattice::Lattice;
use enriques_kit::acceptance::{self, Status, CRITERIA};
use num_bigint::BigInt;
use std::process::ExitCode;

fn main() -> ExitCode {
    let budget = acceptance::default_budget();
    let mut bad = 0;
    println!("\nacceptance suite ({} criteria)", CRITERIA.len());
    for c in &CRITERIA {
        let e = acceptance::run_criterion(c, budget);
        let mark = if e.status == Status::Verified { "PASS" } else { "FAIL" };
        println!("{mark} {:<6} {:>8} ms  {}", e.id, e.ms, e.detail);
        if e.status != Status::Verified {
            bad += 1;
        }
    }

    // detaching the first node turns the D4 diagram into A1 + A3
    let mut gram = Lattice::d4_negative().gram().clone();
    let i = (1..4).find(|&j| gram[0][j] != BigInt::from(0)).expect("node 0 has a neighbour");
    gram[0][i] = BigInt::from(0);
    gram[i][0] = BigInt::from(0);
    let corrupted = Lattice::new(gram).expect("still symmetric");
    let control = acceptance::ac1(&corrupted);
    let rejected = control.status == Status::Failed;
    println!(
        "{} control AC-1 against A1+A3 is rejected: {}",
        if rejected { "PASS" } else { "FAIL" },
        control.detail
    );
    if !rejected {
        bad += 1;
    }

    // a D4 Gram with a changed determinant
    let mut gram = Lattice::d4_negative().gram().clone();
    gram[3][3] -= BigInt::from(2);
    let control = acceptance::ac1(&Lattice::new(gram).expect("symmetric"));
    let rejected = control.status == Status::Failed;
    println!(
        "{} control AC-1 with wrong determinant is rejected: {}",
        if rejected { "PASS" } else { "FAIL" },
        control.detail
    );
    if !rejected {
        bad += 1;
    }

    println!("acceptance: {} failure(s)\n", bad);
    if bad == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
