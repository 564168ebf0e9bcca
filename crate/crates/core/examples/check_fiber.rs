//! Stability verdicts for a handful of plane curves over finite fields, with
//! the destabilizing frames found by the flag search.

use semistable::forms;
use semistable::git_stability::{check_fiber, FiberVerdict};
use semistable::ResidueField;

fn main() -> semistable::Result<()> {
    let cases = [
        (2, "x0^2*x2 + x1^3"),
        (5, "x0^4 + 2*x0^2*x1*x2 + x1^2*x2^2"),
        (7, "x0^3 + x1^3 + x2^3"),
        (3, "x0^3*x2^2 + x1^3*x2^2 + x1^5"),
    ];
    for (p, text) in cases {
        let rf = ResidueField::finite(p, 1)?;
        let f = forms::parse_residue_poly(&rf, 2, text)?;
        let verdict = check_fiber(&rf, &f, 2)?;
        println!("{text} over F_{p}: {}", verdict.name());
        if let FiberVerdict::Unstable(c) = &verdict {
            println!("  weights {:?}, sigma {}", c.weights, c.sigma);
        }
    }
    Ok(())
}
