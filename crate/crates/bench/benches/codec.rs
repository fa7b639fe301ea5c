use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ringcode::{naive_repair, GRElement, TraceRepairScheme};
use ringcode_bench::{random_elements, random_messages, worked_code, worked_tower};

fn ring_ops(c: &mut Criterion) {
    let code = worked_code(2);
    let elems = random_elements(&code, 256, 1);
    let tower = worked_tower();

    let mut group = c.benchmark_group("ring");
    let mut i = 0;
    group.bench_function("mul", |b| {
        b.iter(|| {
            i = (i + 1) % 255;
            black_box(elems[i].mul(&elems[i + 1]))
        })
    });
    group.bench_function("inverse", |b| {
        let units: Vec<&GRElement> = elems.iter().filter(|e| e.is_unit()).collect();
        let mut j = 0;
        b.iter(|| {
            j = (j + 1) % units.len();
            black_box(units[j].inverse().unwrap())
        })
    });
    group.bench_function("frobenius", |b| {
        let mut j = 0;
        b.iter(|| {
            j = (j + 1) % 256;
            black_box(elems[j].frobenius(1))
        })
    });
    group.bench_function("relative_trace", |b| {
        let mut j = 0;
        b.iter(|| {
            j = (j + 1) % 256;
            black_box(tower.relative_trace(&elems[j]))
        })
    });
    group.finish();
}

fn coding(c: &mut Criterion) {
    let code = worked_code(2);
    let messages = random_messages(&code, 128, 2);
    let words: Vec<Vec<GRElement>> = messages.iter().map(|m| code.encode(m).unwrap()).collect();

    let mut group = c.benchmark_group("code");
    let mut i = 0;
    group.bench_function("encode_record", |b| {
        b.iter(|| {
            i = (i + 1) % messages.len();
            black_box(code.encode(&messages[i]).unwrap())
        })
    });
    group.bench_function("erasure_decode_record", |b| {
        let mut j = 0;
        b.iter(|| {
            j = (j + 1) % words.len();
            let known = vec![(3usize, words[j][3].clone()), (6usize, words[j][6].clone())];
            black_box(code.erasure_decode(&known).unwrap())
        })
    });
    group.finish();
}

fn repair(c: &mut Criterion) {
    let code = worked_code(2);
    let scheme = TraceRepairScheme::new(code.clone(), 0).unwrap();
    let messages = random_messages(&code, 128, 3);
    let words: Vec<Vec<GRElement>> = messages.iter().map(|m| code.encode(m).unwrap()).collect();

    let mut group = c.benchmark_group("repair");
    let mut i = 0;
    group.bench_function("trace_record", |b| {
        b.iter(|| {
            i = (i + 1) % words.len();
            let word = &words[i];
            let msgs: Vec<GRElement> = scheme
                .helpers()
                .iter()
                .map(|&h| scheme.helper_message(h, &word[h]).unwrap())
                .collect();
            black_box(scheme.reconstruct(&msgs).unwrap())
        })
    });
    group.bench_function("naive_record", |b| {
        let mut j = 0;
        b.iter(|| {
            j = (j + 1) % words.len();
            let shards: Vec<(usize, GRElement)> =
                (1..8).map(|t| (t, words[j][t].clone())).collect();
            black_box(naive_repair(&code, 0, &shards).unwrap())
        })
    });
    group.finish();
}

criterion_group!(benches, ring_ops, coding, repair);
criterion_main!(benches);
