use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use streamplify::geom::{clip, intersect_convex, ConvexPolygon, HalfPlane};
use streamplify::{make_template, simplify_static, Point, SimplifierState};

fn walk(n: usize, seed: u64) -> Vec<Point> {
    // xorshift; enough for a benchmark input.
    let mut s = seed | 1;
    let mut next = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut p = Point::new(0.0, 0.0);
    (0..n)
        .map(|_| {
            p = p + Point::new(next(), next());
            p
        })
        .collect()
}

fn regular(n: usize, r: f64, c: Point) -> ConvexPolygon {
    let v = (0..n)
        .map(|i| {
            let a = i as f64 * std::f64::consts::TAU / n as f64;
            c + Point::new(r * a.cos(), r * a.sin())
        })
        .collect();
    ConvexPolygon::from_ccw_unchecked(v)
}

fn geometry(c: &mut Criterion) {
    let p = regular(64, 1.0, Point::new(0.0, 0.0));
    let q = regular(64, 1.0, Point::new(0.5, 0.3));
    let h = HalfPlane::left_of(Point::new(0.0, -1.0), Point::new(0.2, 1.0));
    c.bench_function("clip/64", |b| b.iter(|| clip(black_box(&p), black_box(&h))));
    c.bench_function("intersect_convex/64x64", |b| b.iter(|| intersect_convex(black_box(&p), black_box(&q))));
}

fn templates(c: &mut Criterion) {
    let mut g = c.benchmark_group("make_template");
    for eps in [0.5, 0.25, 0.1] {
        g.bench_with_input(BenchmarkId::from_parameter(eps), &eps, |b, &e| {
            b.iter(|| make_template(e, 1.0).unwrap())
        });
    }
    g.finish();
}

fn per_vertex(c: &mut Criterion) {
    let mut g = c.benchmark_group("simplify");
    let curve = walk(2_000, 7);
    g.throughput(Throughput::Elements(curve.len() as u64));
    for eps in [0.5, 0.25] {
        g.bench_with_input(BenchmarkId::new("walk_2000", eps), &eps, |b, &e| {
            b.iter(|| simplify_static(black_box(&curve), e, 1.0).unwrap())
        });
    }
    g.bench_function("streaming_no_retain/walk_2000/0.25", |b| {
        b.iter(|| {
            let mut s = SimplifierState::new(0.25, 1.0).unwrap().without_retained_output();
            for &v in &curve {
                s.push(v).unwrap();
            }
            s.emitted_count()
        })
    });
    g.finish();
}

criterion_group!(benches, geometry, templates, per_vertex);
criterion_main!(benches);
