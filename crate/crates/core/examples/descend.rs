//! Descent to a stable model of the cubic `x0^2*x2 - x1^3 + t*x2^3` over
//! Q((t)), printing the trace.

use semistable::cli::report_text;
use semistable::descent::{descend, DescentOptions};
use semistable::{forms, ResidueField, ValuedField};

fn main() -> semistable::Result<()> {
    let k = ValuedField::laurent(ResidueField::Rationals);
    let f = forms::parse_poly(&k, 2, "x0^2*x2 - x1^3 + t*x2^3")?;
    let report = descend(&f, &k, &DescentOptions::default())?;
    print!("{}", report_text(&report));
    Ok(())
}
