//! Builds the projection certificate for plane cubics and compares it with
//! the direct linear program on random data.

use rand::SeedableRng;
use semistable::lp::{certify_projection, DEFAULT_ROW_BOUND};

fn main() -> semistable::Result<()> {
    let cert = certify_projection(2, 3, DEFAULT_ROW_BOUND)?;
    println!("{} rows, common row sum {}", cert.rows.len(), cert.e);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let report = cert.check_by_sampling(1000, &mut rng);
    println!("{} samples, {} solvable, {} mismatches", report.samples, report.feasible, report.mismatches);
    Ok(())
}
