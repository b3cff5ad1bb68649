use polycon_core::{mesh, metrics, PolyconSpec};
fn main() {
    for n in [2, 3, 4, 6] {
        let s = PolyconSpec::new(n, 1.0).unwrap();
        let v = metrics::volume(&s).unwrap();
        let a = metrics::surface_area(&s).unwrap();
        let t = std::time::Instant::now();
        let errs: Vec<(f64, f64)> = [64, 128, 256]
            .iter()
            .map(|&m| {
                let i = mesh::integrate_mesh(&mesh::assemble_polycon(&s, m).unwrap()).unwrap();
                ((v - i.volume) / v, (a - i.area) / a)
            })
            .collect();
        println!(
            "n={n} {:?} orders v {:.3} {:.3} a {:.3} {:.3} {:?}",
            errs,
            (errs[0].0 / errs[1].0).log2(),
            (errs[1].0 / errs[2].0).log2(),
            (errs[0].1 / errs[1].1).log2(),
            (errs[1].1 / errs[2].1).log2(),
            t.elapsed()
        );
    }
}
