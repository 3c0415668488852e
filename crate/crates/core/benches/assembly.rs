//! Rayon assembly against the sequential path on the same meshes.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use slipflow::assembly::{assemble_convection, assemble_viscous, DofMap};
use slipflow::mesh::mesh_annulus;
use slipflow::parallel::set_sequential;

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assembly");
    g.sample_size(20);
    for &(nr, na) in &[(16, 64), (32, 128)] {
        let m = mesh_annulus(1.0, 2.0, nr, na).unwrap();
        let d = DofMap::new(&m);
        let w: Vec<f64> = (0..d.n_velocity()).map(|i| (i as f64 * 0.37).sin()).collect();
        let label = format!("{nr}x{na}");
        for (mode, seq) in [("parallel", false), ("sequential", true)] {
            set_sequential(seq);
            g.bench_with_input(BenchmarkId::new(format!("viscous/{mode}"), &label), &(), |b, _| {
                b.iter(|| assemble_viscous(&m, &d, 1.0))
            });
            g.bench_with_input(BenchmarkId::new(format!("convection/{mode}"), &label), &(), |b, _| {
                b.iter(|| assemble_convection(&m, &d, &w))
            });
        }
        set_sequential(false);
    }
    g.finish();
}

criterion_group!(benches, assembly);
criterion_main!(benches);
