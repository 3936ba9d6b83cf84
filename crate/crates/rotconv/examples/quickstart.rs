//! Build a pose in one convention, read it out in another, and compute the
//! overlay geometry a visualizer would draw. Run with:
//!
//! ```text
//! cargo run -p rotconv --example quickstart
//! ```

use rotconv::{
    builtin, conversion_rule, convert_rotation, extract_for, three_line_endpoints, Result, W300LP,
    WIKI_ZYX,
};

fn main() -> Result<()> {
    // A label as a 300W-LP-style dataset states it (degrees -> radians).
    let w300 = builtin(W300LP).expect("built-in");
    let m = w300.matrix_of(
        6.208_f64.to_radians(),
        5.876_f64.to_radians(),
        (-1.694_f64).to_radians(),
    );

    // Matrix -> Euler, with the mirrored second solution when one exists.
    let ex = extract_for(&w300, &m)?;
    let [p, y, r] = ex.primary.degrees();
    println!("{W300LP:>16}  pitch {p:+.3}  yaw {y:+.3}  roll {r:+.3}");
    if let Some(second) = ex.secondary {
        let [p, y, r] = second.degrees();
        println!("{:>16}  pitch {p:+.3}  yaw {y:+.3}  roll {r:+.3}", "(second)");
    }

    // The same physical pose expressed in another convention's terms.
    let rule = conversion_rule(W300LP, WIKI_ZYX)?;
    let in_wiki = convert_rotation(&m, &rule);
    let wiki = builtin(WIKI_ZYX).expect("built-in");
    let [p, y, r] = extract_for(&wiki, &in_wiki)?.primary.degrees();
    println!("{WIKI_ZYX:>16}  pitch {p:+.3}  yaw {y:+.3}  roll {r:+.3}");

    // Screen endpoints of the red/green/blue axis lines centered at (320, 240).
    let lines = three_line_endpoints(&m, &w300, [320.0, 240.0], 100.0)?;
    println!(
        "red axis line: (320.00, 240.00) -> ({:.2}, {:.2})",
        lines.x_end[0], lines.x_end[1]
    );
    Ok(())
}
