use std::f64::consts::FRAC_PI_2;
use std::hint::black_box;

use ancilla_metrology::circuit::{circuit_unitary, hamiltonian, optimal_generator, optimal_settings};
use ancilla_metrology::fisher::qfi_general;
use ancilla_metrology::spin_algebra::eigenbasis;
use ancilla_metrology::states::{ancilla_state, polarized_probe, Polarization};
use ancilla_metrology::{EnsembleDim, ModelParams, Schedule};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const SIZES: [usize; 4] = [4, 16, 50, 100];

fn eigen(c: &mut Criterion) {
    let params = ModelParams::default();
    let mut group = c.benchmark_group("eigenbasis");
    for n in SIZES {
        let h = hamiltonian(&params, EnsembleDim::new(n).unwrap());
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| eigenbasis(black_box(h)).unwrap())
        });
    }
    group.finish();
}

fn unitary(c: &mut Criterion) {
    let params = ModelParams::default();
    let sched = Schedule::conjugate(FRAC_PI_2, 0.3).unwrap();
    let mut group = c.benchmark_group("circuit_unitary");
    for n in SIZES {
        let dim = EnsembleDim::new(n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &dim, |b, &dim| {
            b.iter(|| circuit_unitary(&params, dim, black_box(&sched)))
        });
    }
    group.finish();
}

fn qfi(c: &mut Criterion) {
    let params = ModelParams::default();
    let t1 = optimal_settings(&params, 0).t1;
    let sched = Schedule::conjugate(t1, 0.3).unwrap();
    let ancilla = ancilla_state(FRAC_PI_2, 0.0);
    let mut group = c.benchmark_group("qfi_general");
    for n in SIZES {
        let dim = EnsembleDim::new(n).unwrap();
        let probe = polarized_probe(dim, &optimal_generator(&params, dim, t1), Polarization::Up).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &probe, |b, probe| {
            b.iter(|| qfi_general(black_box(probe), &ancilla, &params, &sched).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, eigen, unitary, qfi);
criterion_main!(benches);
