use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use pcgroup::catalog::get_spec;
use pcgroup::identities::{verify_claims, ClaimOptions};
use pcgroup::properties::is_semi_abelian_pi;
use pcgroup::structure::{lower_central_series, power_table};
use pcgroup::{Limits, Mode, PcGroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn group(spec: &str) -> PcGroup {
    PcGroup::build(&get_spec(spec).unwrap(), true).unwrap()
}

fn random_pairs(g: &PcGroup, n: usize) -> Vec<(Vec<u64>, Vec<u64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    (0..n).map(|_| (g.unpack(rng.gen_range(0..g.order())), g.unpack(rng.gen_range(0..g.order())))).collect()
}

fn collection(c: &mut Criterion) {
    for spec in ["heis27xheis27", "sg729_95", "example38:n=3"] {
        let g = group(spec);
        let pairs = random_pairs(&g, 1024);
        c.bench_function(&format!("multiply 1024 pairs in {spec}"), |b| {
            b.iter_batched(
                || pairs.clone(),
                |ps| {
                    for (mut x, y) in ps {
                        g.mul_raw(&mut x, &y);
                        black_box(x);
                    }
                },
                BatchSize::SmallInput,
            )
        });
        c.bench_function(&format!("27th powers of 1024 elements in {spec}"), |b| {
            b.iter(|| pairs.iter().map(|(x, _)| black_box(g.pow_raw(x, 27))).count())
        });
    }
}

fn structure(c: &mut Criterion) {
    let mut c = c.benchmark_group("structure");
    c.sample_size(10);
    let g = group("example38:n=3");
    c.bench_function("lower central series of example38", |b| b.iter(|| lower_central_series(black_box(&g))));
    c.bench_function("consistency of example38", |b| b.iter(|| g.check_consistency()));
    let l = Limits::default();
    let h = group("sg729_95");
    c.bench_function("semi-9 by cosets on sg729_95", |b| {
        b.iter(|| {
            let h = group("sg729_95");
            is_semi_abelian_pi(&h, 2, &l).unwrap()
        })
    });
    c.bench_function("power table of sg729_95", |b| b.iter(|| power_table(&group("sg729_95"), &l).unwrap().len()));
    let opts = ClaimOptions { mode: Mode::sampled(0, 10_000), ..ClaimOptions::default() };
    let ids = vec!["L3.1".to_string(), "L3.4".to_string()];
    c.bench_function("sampled identities on sg729_95", |b| b.iter(|| verify_claims(&h, Some(&ids), &opts)));
    c.finish();
}

criterion_group!(benches, collection, structure);
criterion_main!(benches);
