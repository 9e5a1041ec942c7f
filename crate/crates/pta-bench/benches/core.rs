use criterion::{black_box, criterion_group, criterion_main, Criterion};
use pta_core::analysis::{hurwitz_window, log_norm_integral};
use pta_core::controller::{pt_gain, PtGainParams};
use pta_core::matrix::{eig, induced_norm, log_norm, Mat, PNorm};
use pta_core::sim::{integrate, IntegratorConfig};
use pta_core::systems::{catalog_get, params_from};

fn closed_loop_matrices() -> Vec<Mat> {
    let sys = catalog_get("paper-example", &params_from(&[("tau", 10.0), ("alpha", 0.1)])).unwrap();
    (0..64).map(|i| sys.matrix_at(9.9 * (i as f64) / 63.0).unwrap()).collect()
}

fn dense_8x8() -> Mat {
    // fixed pseudo-random fill, deterministic across runs
    Mat::from_fn(8, 8, |i, j| {
        let mut state = (i as u64 * 8 + j as u64).wrapping_add(0x243f_6a88_85a3_08d3);
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        state ^= state >> 29;
        state = state.wrapping_mul(6364136223846793005);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 10.0 - 5.0
    })
    .unwrap()
}

fn bench_eig(c: &mut Criterion) {
    let mats = closed_loop_matrices();
    c.bench_function("eig_4x4_closed_loop_sweep", |b| {
        b.iter(|| {
            for m in &mats {
                black_box(eig(m).unwrap());
            }
        })
    });
    let big = dense_8x8();
    c.bench_function("eig_8x8_dense", |b| b.iter(|| black_box(eig(&big).unwrap())));
}

fn bench_norms(c: &mut Criterion) {
    let a = dense_8x8();
    c.bench_function("log_norm2_8x8", |b| b.iter(|| black_box(log_norm(&a, PNorm::Two).unwrap())));
    c.bench_function("induced_norm2_8x8", |b| {
        b.iter(|| black_box(induced_norm(&a, PNorm::Two).unwrap()))
    });
}

fn bench_integrate(c: &mut Criterion) {
    let sys = catalog_get("scalar-power", &params_from(&[("tau", 1.0), ("k", 2.0)])).unwrap();
    let cfg = IntegratorConfig::for_tau(1.0);
    c.bench_function("integrate_scalar_power_to_0999", |b| {
        b.iter(|| black_box(integrate(&sys, &[1.0], 0.0, 0.999, &cfg).unwrap().len()))
    });
}

fn bench_analysis(c: &mut Criterion) {
    let sys = catalog_get("remark2-diagonal", &params_from(&[("tau", 1.0)])).unwrap();
    c.bench_function("hurwitz_window_remark2_1000pts", |b| {
        b.iter(|| black_box(hurwitz_window(&sys, 1000, 1e-4).unwrap().epsilon))
    });
    let scalar = catalog_get("scalar-power", &params_from(&[("tau", 1.0), ("k", 2.0)])).unwrap();
    c.bench_function("log_norm_integral_to_1em3", |b| {
        b.iter(|| black_box(log_norm_integral(&scalar, PNorm::Two, 1.0 - 1e-3, 16).unwrap()))
    });
}

fn bench_gain(c: &mut Criterion) {
    let params = PtGainParams::new(10.0, 0.1).unwrap();
    c.bench_function("pt_gain", |b| {
        b.iter(|| {
            for i in 0..100 {
                black_box(pt_gain(9.9 * (i as f64) / 99.0, &params).unwrap());
            }
        })
    });
}

criterion_group!(benches, bench_eig, bench_norms, bench_integrate, bench_analysis, bench_gain);
criterion_main!(benches);
