use gonal::algebra::FiniteField;
use gonal::construct::{construct_curve, SearchConfig};
use gonal::verify::{count_points_ext, verify_certificate, Certificate, Place, VerifyError};

const GOLDEN_9: &str = include_str!("golden/q3_g2_genus9.json");
const GOLDEN_F9: &str = include_str!("golden/q9_g2_genus20.json");

fn keys_at_indent(text: &str, indent: usize) -> Vec<String> {
    let pad = " ".repeat(indent);
    text.lines()
        .filter_map(|l| l.strip_prefix(&pad))
        .filter(|l| l.starts_with('"'))
        .map(|l| l[1..].split('"').next().unwrap().to_string())
        .collect()
}

#[test]
fn canonical_key_order() {
    assert_eq!(
        keys_at_indent(GOLDEN_9, 2),
        ["version", "field", "gamma", "genus", "profile", "right", "n", "m", "d", "beta", "gTuple", "f", "polygon", "checks", "meta"]
    );
    let checks = &GOLDEN_9[GOLDEN_9.find("\"checks\"").unwrap()..GOLDEN_9.find("\"meta\"").unwrap()];
    assert_eq!(keys_at_indent(checks, 4), ["discriminant", "fibres", "polygonInterior", "genus", "N1", "gonality"]);
    let v: serde_json::Value = serde_json::from_str(GOLDEN_9).unwrap();
    assert_eq!(v["checks"]["fibres"][3]["place"], "inf");
    assert_eq!(v["polygon"][0], serde_json::json!([0, 0]));
}

#[test]
fn json_round_trip() {
    for text in [GOLDEN_9, GOLDEN_F9] {
        let cert = Certificate::from_json(text).unwrap();
        assert_eq!(cert.to_json(), text);
    }
    let cert = Certificate::from_json(GOLDEN_9).unwrap();
    assert_eq!(cert.checks.fibres.last().unwrap().place, Place::Infinity);
    assert_eq!(cert.checks.fibres[1].place, Place::Finite(gonal::algebra::FqElem(1)));
}

#[test]
fn schema_violations() {
    let mut v: serde_json::Value = serde_json::from_str(GOLDEN_9).unwrap();
    v["extra"] = 1.into();
    assert!(matches!(Certificate::from_json(&v.to_string()), Err(VerifyError::Schema(_))));

    let mut v: serde_json::Value = serde_json::from_str(GOLDEN_9).unwrap();
    v["gTuple"].as_array_mut().unwrap().pop();
    assert!(matches!(Certificate::from_json(&v.to_string()), Err(VerifyError::Schema(_))));

    let mut v: serde_json::Value = serde_json::from_str(GOLDEN_9).unwrap();
    v["checks"]["fibres"][0]["place"] = "zero".into();
    assert!(matches!(Certificate::from_json(&v.to_string()), Err(VerifyError::Schema(_))));

    let mut v: serde_json::Value = serde_json::from_str(GOLDEN_9).unwrap();
    v["gTuple"][0][0] = 7.into();
    let cert = Certificate::from_json(&v.to_string()).unwrap();
    assert!(matches!(verify_certificate(&cert), Err(VerifyError::Schema(_))));
}

#[test]
fn stored_checks_must_match() {
    let mut cert = Certificate::from_json(GOLDEN_9).unwrap();
    cert.checks.n1 = 9;
    match verify_certificate(&cert) {
        Err(VerifyError::Check { name, .. }) => assert_eq!(name, "checks.N1"),
        other => panic!("{other:?}"),
    }
    let mut cert = Certificate::from_json(GOLDEN_9).unwrap();
    cert.d[0] = 4;
    match verify_certificate(&cert) {
        Err(VerifyError::Check { name, .. }) => assert_eq!(name, "instance.degrees"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn first_extension_count_is_n1() {
    for text in [GOLDEN_9, GOLDEN_F9] {
        let v = verify_certificate(&Certificate::from_json(text).unwrap()).unwrap();
        let n1 = v.certificate().checks.n1;
        assert_eq!(count_points_ext(&v, 1, 1 << 24, None).unwrap(), n1);
        assert!(matches!(count_points_ext(&v, 40, 1 << 24, None), Err(VerifyError::CapExceeded { .. })));
    }
}

#[test]
fn jobs_do_not_change_output() {
    let f3 = FiniteField::prime(3).unwrap();
    let a = construct_curve(f3.clone(), 3, 28, &SearchConfig { seed: 9, jobs: Some(1), ..Default::default() }).unwrap();
    let b = construct_curve(f3, 3, 28, &SearchConfig { seed: 9, jobs: Some(3), ..Default::default() }).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let v = verify_certificate(&a).unwrap();
    assert_eq!(count_points_ext(&v, 3, 1 << 24, Some(1)), count_points_ext(&v, 3, 1 << 24, Some(3)));
}
