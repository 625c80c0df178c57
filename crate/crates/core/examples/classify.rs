//! De Finetti classification of a few hand-built states, with replayable witnesses.
//!
//! `cargo run --example classify`

use boolefock::{BooleanState, FockVector, Index, TraceClassOperator, Verifier, C64};

fn main() -> boolefock::Result<()> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let tilted = FockVector::from_components([(Index::Vacuum, C64::new(h, 0.0)), (Index::site(1), C64::new(0.0, h))]);
    let states = [
        ("vacuum", BooleanState::vacuum()),
        ("symmetric, gamma = 0.3", BooleanState::symmetric(0.3)?),
        ("omega_infinity", BooleanState::infinity()),
        ("|e_1><e_1|", BooleanState::normal(TraceClassOperator::pure(&FockVector::basis(Index::site(1)))?)),
        ("tilted vacuum", BooleanState::new(0.8, TraceClassOperator::pure(&tilted)?)?),
    ];
    let verifier = Verifier::new().samples(50);
    for (name, st) in &states {
        let c = verifier.classify_definetti(st, 1);
        println!(
            "{name:<24} symmetric={:<5} expected={:<5} iid={:<5} consistent={}",
            c.symmetric, c.expected, c.iid, c.consistent
        );
        for r in c.reports.iter().filter(|r| !r.passed) {
            let w = r.witness.as_ref().expect("failed reports carry a witness");
            println!("    {} failed, deviation {:.3e}, replayed {:.3e}", r.name, w.deviation(), w.recompute()?);
        }
        if let Some(ce) = &c.counterexample {
            println!("    counterexample ratio {:.6}", ce.ratio);
        }
    }
    Ok(())
}
