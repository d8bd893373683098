use fpcert::algebra::{from_f64_exact, Backend};
use fpcert::bench::{case, run_case, BenchOptions};
use fpcert::report::{CertificateStatus, LpDims, Method, ReportEntry, Value};
use proptest::prelude::*;

fn value() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()).prop_map(|v| Value {
            decimal: format!("{v:e}"),
            exact: from_f64_exact(v).map(|r| r.to_string()),
        }),
        Just(Value::infinite()),
        Just(Value::neg_infinite()),
    ]
}

fn entry() -> impl Strategy<Value = ReportEntry> {
    let head = (
        "[a-z][a-z0-9-]{0,12}",
        prop_oneof![Just(Method::Bern), Just(Method::Ks)],
        prop_oneof![Just(Backend::Exact), Just(Backend::Float)],
        0usize..20,
        0usize..200,
        1u32..8,
        prop::collection::vec(0u32..30, 1..5),
    );
    let values = (value(), value(), value(), value(), value(), value());
    let extras = (
        prop::option::of(any::<bool>()),
        prop::option::of(any::<bool>()),
        prop::option::of(0u32..5),
        prop::option::of((1usize..1_000_000, 1usize..100_000).prop_map(|(columns, rows)| LpDims { columns, rows })),
        prop::option::of(value()),
        0.0f64..1e4,
        prop_oneof![
            Just(CertificateStatus::NotApplicable),
            Just(CertificateStatus::Verified),
            Just(CertificateStatus::Repaired),
            Just(CertificateStatus::Trivial),
        ],
    );
    (head, values, extras).prop_map(|((name, method, backend, n, m, d, k), v, x)| ReportEntry {
        name,
        method,
        backend,
        n,
        m,
        d,
        k,
        eps: v.0,
        linear_lo: v.1,
        linear_hi: v.2,
        remainder_lo: v.3,
        remainder_hi: v.4,
        total: v.5,
        sharp_lower: x.0,
        sharp_upper: x.1,
        elevations: x.2,
        lp: x.3,
        convergence_gap: x.4,
        wall_time_secs: x.5,
        certificate: x.6,
    })
}

proptest! {
    #[test]
    fn json_round_trips(r in entry()) {
        prop_assert_eq!(ReportEntry::from_json(&r.to_json()).unwrap(), r.clone());
        let compact = serde_json::to_string(&r).unwrap();
        prop_assert_eq!(serde_json::from_str::<ReportEntry>(&compact).unwrap(), r);
    }

    #[test]
    fn decimal_values_parse_back(v in value()) {
        let f = v.as_f64();
        prop_assert_eq!(format!("{f:e}"), v.decimal.clone());
    }
}

#[test]
fn real_reports_round_trip() {
    let c = case("rigidBody1").unwrap();
    for backend in [Backend::Exact, Backend::Float] {
        let opts = BenchOptions { backend, ..BenchOptions::default() };
        for m in [Method::Bern, Method::Ks] {
            let r = run_case(&c, m, &opts).unwrap();
            assert_eq!(ReportEntry::from_json(&r.to_json()).unwrap(), r);
            if backend == Backend::Exact {
                let exact = r.total.as_rational().unwrap();
                let up = from_f64_exact(r.total.as_f64()).unwrap();
                assert!(up >= exact, "decimal must round the total upward");
            }
        }
    }
}
