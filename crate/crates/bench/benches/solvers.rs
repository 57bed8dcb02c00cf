use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use tresca_bench::reference_space;
use tresca_core::fem::{apply_dirichlet, assemble_load, assemble_stiffness, solve_spd};
use tresca_core::sensitivity::{family_problem, reference_family, reference_mesh};
use tresca_core::solvers::{solve_tresca_switching, SwitchingOptions};
use tresca_core::{CgOptions, FieldFn};

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assemble_stiffness");
    for n in [48, 95, 190] {
        let mesh = reference_mesh(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &mesh, |b, m| {
            b.iter(|| assemble_stiffness(black_box(m)).unwrap())
        });
    }
    g.finish();
}

fn pcg(c: &mut Criterion) {
    // Dirichlet-reduced stiffness with a unit load
    let mut g = c.benchmark_group("pcg_stiffness");
    for n in [95, 190] {
        let space = reference_space(n);
        let fixed = space.dirichlet_dofs();
        let load = assemble_load(space.mesh(), &FieldFn::constant(1.0)).unwrap();
        let sys = apply_dirichlet(space.stiffness(), &load, &fixed, &vec![0.0; fixed.len()]).unwrap();
        g.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| {
                let mut x = vec![0.0; sys.rhs.len()];
                solve_spd(&sys.matrix, black_box(&sys.rhs), &mut x, CgOptions::default()).unwrap()
            })
        });
    }
    g.finish();
}

fn tresca(c: &mut Criterion) {
    let mut g = c.benchmark_group("tresca_switching");
    g.sample_size(10);
    let family = reference_family();
    for n in [48, 95] {
        let space = reference_space(n);
        let problem = family_problem(&family, 0.0, &space).unwrap();
        g.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| solve_tresca_switching(black_box(&problem), &SwitchingOptions::default()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, assembly, pcg, tresca);
criterion_main!(benches);
