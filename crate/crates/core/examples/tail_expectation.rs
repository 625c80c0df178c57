//! The tail algebra `ℂP_# ⊕ ℂP_#^⊥` and the conditional expectations onto it.
//!
//! `cargo run --example tail_expectation`

use boolefock::tail::{module_property_check, vacuum_compression};
use boolefock::{
    cond_expect, embed, BooleanElement, FockVector, Index, PhiState, Site, TailElement, TestAlgebraElement,
    TraceClassOperator, C64,
};

fn main() -> boolefock::Result<()> {
    let a = TestAlgebraElement::real(1.0, 2.0, 3.0, 4.0, 5.0);
    let x = embed(Site::new(1), &a).mul(&embed(Site::new(2), &a.adjoint()));

    let singular = PhiState::Singular;
    let normal = PhiState::normal(TraceClassOperator::new(vec![
        (0.75, FockVector::basis(Index::site(1))),
        (0.25, FockVector::basis(Index::site(2))),
    ])?)?;
    println!("phi JSON: {}", serde_json::to_string(&normal)?);

    for (name, phi) in [("singular", &singular), ("normal", &normal)] {
        let e = cond_expect(phi, &x);
        println!("F_phi(X) with {name} phi: x = {}, y = {}", e.x, e.y);
        let z = TailElement::new(C64::new(2.0, 0.0), C64::new(0.0, 1.0));
        let w = TailElement::new(C64::new(-1.0, 0.5), C64::new(3.0, 0.0));
        println!("  module property holds: {}", module_property_check(phi, &z, &x, &w));
    }

    // E(X) keeps the vacuum corner and the far-away scalar
    let e = vacuum_compression(&x);
    println!("E(X) = {}", serde_json::to_string(&e)?);
    println!("E(I) = I: {}", vacuum_compression(&BooleanElement::identity()) == BooleanElement::identity());
    Ok(())
}
