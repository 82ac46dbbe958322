use num_rational::Ratio;
use symlab::probes::{
    diam_mean_probe, mean_equicontinuity_scan, mean_sensitivity_witness, Sampling, Verdict, DEFAULT_M_SCAN,
};
use symlab::suite::{builtin_suite, emit_report, run_suite, ProbeRecord, ReportFormat, SuiteConfig};
use symlab::systems::{powers_subshift, regular_toeplitz_example, single_one_subshift, Cylinder};

fn sampling(horizon: u64) -> Sampling {
    Sampling {
        horizon,
        budget: 16,
        seed: 11,
    }
}

#[test]
fn single_one_is_mean_but_not_diam_mean_equicontinuous() {
    let m = single_one_subshift();
    let v = mean_equicontinuity_scan(&m, m.base_point(), Ratio::new(1, 10), &DEFAULT_M_SCAN, &sampling(1 << 16)).unwrap();
    assert_eq!(v.verdict, Verdict::Pass);
    let u = Cylinder::at_origin(vec![0; 4]).unwrap();
    let d = diam_mean_probe(&m, &u, 1, 1 << 16, 1 << 20, false).unwrap();
    assert_eq!(d.verdict, Verdict::Fail);
    assert_eq!(d.statistic, Ratio::new(1, 1));
    let w = mean_sensitivity_witness(&m, Ratio::new(1, 10), &u, &sampling(1 << 16)).unwrap();
    assert!(w.is_none());
}

#[test]
fn powers_is_mean_equicontinuous() {
    let m = powers_subshift();
    let v = mean_equicontinuity_scan(&m, m.base_point(), Ratio::new(1, 10), &DEFAULT_M_SCAN, &sampling(1 << 16)).unwrap();
    assert_eq!(v.verdict, Verdict::Pass);
}

#[test]
fn toeplitz_is_diam_mean_equicontinuous_at_r1() {
    let h = 1 << 18;
    let m = regular_toeplitz_example(h).unwrap();
    let u = Cylinder::at_origin(m.base_point().prefix(8)[..8].to_vec()).unwrap();
    let d = diam_mean_probe(&m, &u, 1, h, 1 << 20, false).unwrap();
    assert_eq!(d.verdict, Verdict::Pass);
    let lower = diam_mean_probe(&m, &u, 1, h, 1 << 20, true).unwrap();
    assert!(lower.statistic <= d.statistic);
}

#[test]
fn builtin_suite_is_deterministic() {
    let config = builtin_suite(42, 1 << 14);
    let a = emit_report(&run_suite(&config).unwrap(), ReportFormat::Json).unwrap();
    let b = emit_report(&run_suite(&config).unwrap(), ReportFormat::Json).unwrap();
    assert_eq!(a, b);
    let csv_a = emit_report(&run_suite(&config).unwrap(), ReportFormat::Csv).unwrap();
    let csv_b = emit_report(&run_suite(&config).unwrap(), ReportFormat::Csv).unwrap();
    assert_eq!(csv_a, csv_b);
}

#[test]
fn every_verdict_carries_provenance() {
    let rows = run_suite(&builtin_suite(5, 1 << 14)).unwrap();
    for row in &rows {
        assert!(row.chain_consistent);
        for record in row.verdicts.values() {
            let ProbeRecord::Verdict(v) = record else { panic!("{record:?}") };
            for key in ["horizon", "seed", "budget"] {
                assert!(v.parameters.contains_key(key), "{} lacks {key}", v.probe);
            }
        }
    }
}

#[test]
fn config_from_json_text() {
    let text = r#"{
        "seed": 9,
        "horizon": 8192,
        "format": "csv",
        "systems": [
            {"name": "golden", "kind": "sturmian", "alpha": "golden"},
            {"name": "toeplitz", "kind": "toeplitz"}
        ],
        "probes": [
            {"probe": "diam_mean", "cylinder": {"prefix": 8}, "r": 1},
            {"probe": "regularity", "tolerance": "1/512", "max_period": 64, "systems": ["golden"]}
        ]
    }"#;
    let config = SuiteConfig::from_json(text).unwrap();
    let rows = run_suite(&config).unwrap();
    assert_eq!(rows.len(), 2);
    let ProbeRecord::Verdict(reg) = &rows[0].verdicts["regularity"] else { panic!() };
    assert_eq!(reg.verdict, Verdict::Fail);
    let csv = emit_report(&rows, config.format).unwrap();
    assert_eq!(csv.lines().count(), 3);
}
