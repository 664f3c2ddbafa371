use hodgelim_wasm::{example, example_names, limit_table, validate, zero_test};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.expect("export succeeds")).unwrap()
}

#[test]
fn every_example_validates() {
    let names: Vec<String> = serde_json::from_str(&example_names()).unwrap();
    assert!(!names.is_empty());
    for name in names {
        let v = parse(validate(&example(&name).unwrap(), 0));
        assert_eq!(v["valid"], true, "{name}: {v}");
    }
    assert!(example("missing").is_err());
}

#[test]
fn limit_table_converges_on_the_named_sequence() {
    let v = parse(limit_table(&example("nf_acceptance").unwrap(), "a1", 40, 1e-3));
    assert_eq!(v["converged"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 40);
    assert_eq!(v["limit"][1][0], "1/2");
    assert_eq!(v["limit"][2][0], "-1");
}

#[test]
fn zero_test_on_and_off_the_diagonal() {
    let text = example("diagonal_locus").unwrap();
    let on = parse(zero_test(&text, &[0.3, 0.0, 0.3, 0.0], 1e-9));
    assert_eq!(on["zero"], true);
    let off = parse(zero_test(&text, &[0.3, 0.0, 0.5, 0.0], 1e-9));
    assert_eq!(off["zero"], false);
    assert!(zero_test(&text, &[0.3, 0.0], 1e-9).is_err());
    assert!(zero_test(&text, &[1.5, 0.0, 0.3, 0.0], 1e-9).is_err());
}

#[test]
fn malformed_input_is_reported() {
    assert!(validate("{", 0).is_err());
}
