// Simplex weight grids, both scalarizations, weight recovery and weak Pareto probes.

use paretoscope::problem::{builtin, evaluate};
use paretoscope::scalarize::{
    grid_count, is_weak_pareto, recover_weight, simplex_grid, weighted_max, weighted_sum,
    WeakParetoVerdict,
};

pub fn run() -> paretoscope::Result<()> {
    let grid = simplex_grid(3, 4);
    println!("{} weights on the 3-simplex at N=4 (expected {})", grid.len(), grid_count(3, 4));

    let p = builtin("warburton_quasiconvex")?;
    let x = [2.0, 0.5];
    for w in simplex_grid(2, 4) {
        println!(
            "xi={:?}  sum={:.6}  max={:.6}",
            w.coords,
            weighted_sum(&p, &w, &x)?,
            weighted_max(&p, &w, &x)?
        );
    }

    // the weight that equalizes xi_i f_i(x) at a point with positive values
    let f = evaluate(&p, &x)?;
    let xi = recover_weight(&f)?;
    let products: Vec<f64> = xi.coords.iter().zip(&f).map(|(a, b)| a * b).collect();
    println!("f(x)={f:?} recovered xi={:?} products={products:?}", xi.coords);

    let r = builtin("rectangle_identity")?;
    let probes: Vec<Vec<f64>> = (0..=10)
        .flat_map(|i| (0..=10).map(move |j| vec![-1.0 + i as f64 / 10.0, j as f64 / 10.0]))
        .collect();
    for x in [[-1.0, 0.5], [-0.5, 0.5]] {
        match is_weak_pareto(&r, &x, &probes, 1e-12)? {
            WeakParetoVerdict::UndominatedAmongProbes => println!("{x:?} weakly efficient among probes"),
            WeakParetoVerdict::Dominated { witness } => println!("{x:?} dominated by {witness:?}"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> paretoscope::Result<()> {
    run()
}
