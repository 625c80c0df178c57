//! A small randomized classification sweep, run on the sparse kernel and
//! again on the dense oracle.
//!
//! `cargo run --release --example sweep -- 300`

use boolefock::dense::DenseKernel;
use boolefock::report::sweep_csv;
use boolefock::verify::sweep;
use boolefock::Verifier;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(60);
    let sparse = sweep(&Verifier::new().words(100, 4).samples(40), n, 4, 2024);
    let dense = sweep(&Verifier::with_kernel(DenseKernel).words(100, 4).samples(40), n, 4, 2024);

    let count = |f: fn(&boolefock::SweepRow) -> bool| sparse.iter().filter(|r| f(r)).count();
    println!("states {n}");
    println!("symmetric {}", count(|r| r.symmetric));
    println!("expected but not iid {}", count(|r| r.expected && !r.iid));
    println!("not expected {}", count(|r| !r.expected));
    println!("inconsistent {}", count(|r| !r.consistent));
    let same = sparse.iter().zip(&dense).all(|(a, b)| {
        (a.symmetric, a.expected, a.iid) == (b.symmetric, b.expected, b.iid)
    });
    println!("dense oracle agrees on every row: {same}");
    print!("{}", sweep_csv(&sparse[..sparse.len().min(6)]));
}
