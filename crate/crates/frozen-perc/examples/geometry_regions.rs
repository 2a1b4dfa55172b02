//! The discretized proof regions, printed as a map: concentric boxes, the
//! feeder rectangle R jutting east, the enlarged hull, the two corridors,
//! and the neck R'.
//!
//!     cargo run --release -p frozen-perc --example geometry_regions

use frozen_perc::lattice::{build_proof_geometry, ProofParams, Rect, Vertex, Window};

fn main() -> frozen_perc::Result<()> {
    let params = ProofParams::new(0.25, 0.5, 0.75, 0.8, 0.05);
    let n = 128;
    let g = build_proof_geometry(params, n, Window::new(4 * n)?)?;

    println!("N = {n}, params (a,c,b,l,eps) = (0.25, 0.5, 0.75, 0.8, 0.05)\n");
    let row = |name: &str, r: Rect| {
        println!("  {name:<12} [{:>4},{:>4}] x [{:>4},{:>4}]", r.x_min, r.x_max, r.y_min, r.y_max);
    };
    println!("  box sides: k_a={}, k_c={}, k_b={}, corridor scale d={}", g.k_a, g.k_c, g.k_b, g.d);
    row("box_a", g.box_a);
    row("box_c", g.box_c);
    row("box_b", g.box_b);
    row("box_b2e", g.box_b2e);
    row("R", g.r);
    row("R'", g.r_prime);
    row("L1 (north)", g.l1);
    row("L2 (south)", g.l2);
    row("protrusion", g.protrusion);

    // Coarse ASCII sketch, 4 lattice steps per character.
    println!("\n  map (4 steps/char): a/c/b boxes, R feeder, ' neck, L corridors");
    let step = 4;
    let (x_lo, x_hi) = (-(g.k_b / 2) - 8, g.protrusion.x_max + 8);
    let (y_lo, y_hi) = (-(g.k_b / 2) - 8, g.k_b / 2 + 8);
    let mut y = y_hi;
    while y >= y_lo {
        let mut line = String::from("  ");
        let mut x = x_lo;
        while x <= x_hi {
            let v = Vertex::new(x, y);
            let ch = if g.r_prime.contains(v) && g.r.contains(v) {
                '\''
            } else if g.r.contains(v) {
                'R'
            } else if g.l1.contains(v) || g.l2.contains(v) {
                'L'
            } else if g.box_a.contains(v) {
                'a'
            } else if g.box_c.contains(v) {
                'c'
            } else if g.box_b.contains(v) {
                'b'
            } else if g.r_prime.contains(v) {
                '\''
            } else {
                '.'
            };
            line.push(ch);
            x += step;
        }
        println!("{line}");
        y -= step;
    }
    Ok(())
}
