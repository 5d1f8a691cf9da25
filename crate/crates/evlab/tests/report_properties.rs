use evlab::report::{strip_timing, MuRecord, Real, ReportDocument};
use evlab::config::RunConfig;
use proptest::prelude::*;

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => any::<f64>().prop_filter("finite", |x| x.is_finite()),
        1 => Just(f64::INFINITY),
        1 => Just(f64::NEG_INFINITY),
    ]
}

fn record() -> impl Strategy<Value = MuRecord> {
    (real(), real(), proptest::option::of(real()), proptest::option::of(real()), "[a-z_]{1,12}").prop_map(
        |(mu, sigma, lo, hi, class)| MuRecord {
            mu: Real(mu),
            sigma_min: Real(sigma),
            lower_margin: lo.map(Real),
            upper_margin: hi.map(Real),
            c_hat: lo.zip(hi).map(|(a, b)| Real(a.abs().max(b.abs()))),
            classification: class,
        },
    )
}

proptest! {
    #[test]
    fn reports_round_trip(records in proptest::collection::vec(record(), 0..20), elapsed in 0.0f64..1e6) {
        let cfg = RunConfig::new("scan", &Default::default());
        let mut doc = ReportDocument::new(cfg.echo());
        doc.records = records;
        doc.timing.elapsed_ms = Real(elapsed);
        let text = doc.to_json().unwrap();
        let back: ReportDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_json().unwrap(), text.clone());
        prop_assert!(!strip_timing(&text).contains("elapsed_ms"));
    }
}
