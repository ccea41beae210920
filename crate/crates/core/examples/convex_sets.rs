//! Feasible sets as intersections of atoms, grid sampling, and the polar of
//! the tangent cone at a boundary point.

use qcx::{Atom, Config, ConvexSetDescriptor, Window};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = Config::default();
    // 1 <= x1 <= 2, 0 <= x2 <= x1
    let s = ConvexSetDescriptor::new(
        2,
        vec![Atom::Box { lo: vec![1.0, 0.0], hi: vec![2.0, 2.0] }, Atom::Halfspace { a: vec![-1.0, 1.0], b: 0.0 }],
    )?;
    let w = Window::new(vec![1.0, 0.0], vec![2.0, 2.0])?;

    for x in [[1.5, 0.5], [1.5, 1.8], [1.0, 0.0]] {
        println!("{x:?}: inside = {}, interior = {}", s.contains(&x, cfg.eps_feas), s.is_interior(&x, &cfg));
    }
    let pts = s.sample_grid(&w, 3, &cfg)?;
    println!("3x3 grid keeps {} points: {:?}", pts.len(), pts.iter().map(|p| p.as_slice()).collect::<Vec<_>>());

    // at the corner (1, 0) the box faces x1 >= 1 and x2 >= 0 are active
    let polar = s.tangent_polar_at(&[1.0, 0.0], &cfg)?;
    println!("polar of the tangent cone at (1,0): {}", serde_json::to_string(&polar)?);
    println!("direction (1,1) in it: {}", polar.contains(&[1.0, 1.0], cfg.eps_feas));

    let disk = ConvexSetDescriptor::new(2, vec![Atom::Ball { center: vec![0.0, 0.0], radius: 2f64.sqrt() }])?;
    println!("disk polyhedral: {}", disk.is_polyhedral());
    Ok(())
}
