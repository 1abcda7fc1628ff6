//! The acoustic metric at a perturbed state and the null frame built from
//! an eikonal gradient: component matrices, frame vectors, a gradient
//! split along `L`, `X`, `Y`, and the largest identity defect.
//!
//! `cargo run --example acoustic_frame`

use shockform::eos::Eos;
use shockform::geometry::{frame_decompose_gradient, frame_from_eikonal, identity_defect, metric_at, AcousticPoint};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let eos = Eos::polytropic(3.0)?;
    let p = AcousticPoint::new(0.02, [0.015, -0.004], &eos)?;
    let m = metric_at(&p);
    println!("c = {:.6}, c' = {:.6}, det g = {:.6e}", p.c, p.dc, m.det);
    for (name, mat) in [("g", m.lower), ("g^-1", m.upper)] {
        for row in mat {
            println!("  {name:<5} [{:+.6} {:+.6} {:+.6}]", row[0], row[1], row[2]);
        }
    }

    // Level curves slightly tilted against x2, u decreasing in x1.
    let grad_u = [-1.05, 0.03];
    let frame = frame_from_eikonal(&p, grad_u);
    println!("mu = {:.6}", frame.mu);
    println!("L = {:?}\nX = {:?}\nY = {:?}", frame.l, frame.x, frame.y);

    let gradient = [0.3, -1.2, 0.4];
    let parts = frame_decompose_gradient(&p, &frame, &gradient);
    println!(
        "L f = {:+.6}, X f = {:+.6}, Y f = {:+.6}, rebuilt spatial gradient {:?}",
        parts.along_l, parts.along_x, parts.along_y, parts.spatial
    );

    let defect = identity_defect(&p, &frame, Some(grad_u));
    println!("largest identity defect {defect:.2e}");
    assert!(defect < 1e-12);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
