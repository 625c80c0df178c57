//! Boolean creation/annihilation operators, the matrix-unit dictionary and
//! the embeddings of the sample algebra.
//!
//! `cargo run --example relations`

use boolefock::fock::{annihilator_at, creator_at};
use boolefock::{annihilator, creator, embed, BooleanElement, FockVector, Index, Site, TestAlgebraElement, C64};

fn main() -> boolefock::Result<()> {
    let f = FockVector::wave([(Site::new(1), C64::new(1.0, 0.5)), (Site::new(4), C64::new(-0.25, 0.0))]);
    let g = FockVector::wave([(Site::new(1), C64::new(0.0, 1.0)), (Site::new(2), C64::new(2.0, 0.0))]);

    // b(f) b†(g) collapses to a multiple of the vacuum projection
    let bb = annihilator(&f)?.mul(&creator(&g)?);
    let expected = BooleanElement::vacuum_projection().scale(g.inner(&f));
    println!("b(f) b†(g) = {}", serde_json::to_string(&bb)?);
    println!("<g, f> e_## = {}", serde_json::to_string(&expected)?);
    println!("deviation    {:e}", bb.max_abs_diff(&expected));

    // b†(f) b(g) acts as the rank-one map v ↦ <v, g> f on the one-particle space
    let op = creator(&f)?.mul(&annihilator(&g)?);
    let v = FockVector::basis(Index::site(2));
    println!("b†(f) b(g) e_2 = {}", serde_json::to_string(&op.apply(&v))?);

    let (i, j) = (Site::new(3), Site::new(7));
    let vac = annihilator_at(i).mul(&creator_at(i));
    let eij = creator_at(i).mul(&annihilator_at(j));
    println!("b_3 b†_3 == e_##: {}", vac == BooleanElement::vacuum_projection());
    println!("b†_3 b_7 == e_37: {}", eij == BooleanElement::matrix_unit(Index::Site(i), Index::Site(j)));

    let a = TestAlgebraElement::real(1.0, 2.0, 3.0, 4.0, 5.0);
    let e = embed(Site::new(2), &a);
    println!("iota_2(A) in normal form: {}", serde_json::to_string(&e)?);
    let sq = e.mul(&e).max_abs_diff(&embed(Site::new(2), &a.compose(&a)));
    println!("iota_2(A)^2 - iota_2(A^2): {sq:e}");
    Ok(())
}
