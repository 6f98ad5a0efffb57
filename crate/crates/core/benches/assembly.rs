use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use optbasis::lengths::{length_for_rule, LengthRule};
use optbasis::reference::reference_value;
use optbasis::sinc::{collocation_block, MeshSpec};
use optbasis::spectrum::convergence_series;
use optbasis::trigbasis::{assemble, Parity};
use optbasis::{Exec, Potential, Precision, Problem, Sector};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn trig_assembly(c: &mut Criterion) {
    let prec = Precision::new(256).unwrap();
    let pot = Potential::parse("[[2,-2],[4,2],[6,1]]").unwrap();
    let n = 60;
    let length = length_for_rule(LengthRule::Op, 6, n, prec).unwrap().length;
    let mut group = c.benchmark_group("trig_assembly_N60");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| assemble(&pot, Parity::Even, n, &length, exec).unwrap())
        });
    }
    group.finish();
}

fn sinc_block(c: &mut Criterion) {
    let prec = Precision::new(256).unwrap();
    let pot = Potential::monomial(4).unwrap();
    let mesh = MeshSpec::auto(&pot, 60, prec).unwrap();
    let mut group = c.benchmark_group("sinc_block_N60");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| collocation_block(&pot, &mesh, Parity::Even, exec))
        });
    }
    group.finish();
}

fn convergence(c: &mut Criterion) {
    let prec = Precision::new(192).unwrap();
    let pot = Potential::monomial(4).unwrap();
    let reference = vec![reference_value(&pot, 0, prec).unwrap()];
    let ns: Vec<usize> = (8..=24).collect();
    let mut group = c.benchmark_group("convergence_N8_to_24");
    group.sample_size(10);
    for (name, exec) in MODES {
        let mut problem = Problem::trig(pot.clone(), 8, LengthRule::Op2, prec).sector(Sector::Even);
        problem.exec = exec;
        group.bench_function(name, |b| {
            b.iter(|| convergence_series(&problem, &ns, &[0], &reference).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, trig_assembly, sinc_block, convergence);
criterion_main!(benches);
