use subrule::corpus::{corpus, CORPUS_NAMES};
use subrule::rulefile::{parse_complex, parse_rule, serialize_complex, serialize_rule, RuleFileError};
use subrule::{CheckedRule, ViolationCode};

const CANTOR_RULE: &str = include_str!("fixtures/cantor.rule.json");
const CANTOR_COMPLEX: &str = include_str!("fixtures/cantor.complex.json");
const CANTOR_PERMUTED: &str = include_str!("fixtures/cantor.complex.permuted.json");

fn cantor_rule() -> CheckedRule {
    CheckedRule::new(parse_rule(CANTOR_RULE.as_bytes()).unwrap()).unwrap()
}

#[test]
fn cantor_fixture_parses_to_corpus_entry() {
    let e = corpus("cantor").unwrap();
    let rule = cantor_rule();
    assert_eq!(rule.rule(), &e.rule);
    let x = parse_complex(CANTOR_COMPLEX.as_bytes(), &rule).unwrap();
    assert_eq!(x, e.complex);
    assert_eq!(x.len(), 3);
}

#[test]
fn round_trip_is_byte_identical() {
    for name in CORPUS_NAMES {
        let e = corpus(name).unwrap();
        let first = serialize_rule(&e.rule);
        let parsed = parse_rule(first.as_bytes()).unwrap();
        assert_eq!(parsed, e.rule, "{name}");
        assert_eq!(serialize_rule(&parsed), first, "{name}");

        let checked = CheckedRule::new(parsed).unwrap();
        let cx = serialize_complex(checked.rule(), &e.complex);
        let x = parse_complex(cx.as_bytes(), &checked).unwrap();
        assert_eq!(x, e.complex, "{name}");
        assert_eq!(serialize_complex(checked.rule(), &x), cx, "{name}");
    }
}

#[test]
fn key_order_does_not_matter() {
    let rule = cantor_rule();
    let x = parse_complex(CANTOR_PERMUTED.as_bytes(), &rule).unwrap();
    assert_eq!(serialize_complex(rule.rule(), &x), CANTOR_COMPLEX);
}

#[test]
fn truncated_file_reports_offset() {
    let cut = &CANTOR_RULE.as_bytes()[..200];
    match parse_rule(cut) {
        Err(RuleFileError::Parse { line, offset, .. }) => {
            assert_eq!(line, 1);
            assert_eq!(offset, 200);
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn attach_to_absent_local_names_the_path() {
    let broken = CANTOR_RULE.replacen(r#""a":"m1","b":"m2","top":"c""#, r#""a":"m1","b":"zz","top":"c""#, 1);
    assert_ne!(broken, CANTOR_RULE);
    match parse_rule(broken.as_bytes()) {
        Err(RuleFileError::Schema { path, .. }) => assert_eq!(path, "celltypes.A.subdivision.cells.c.attach.b"),
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn missing_field_is_a_schema_error() {
    let broken = CANTOR_COMPLEX.replacen(r#""rank":1,"#, "", 1);
    match parse_complex(broken.as_bytes(), &cantor_rule()) {
        Err(RuleFileError::Schema { path, message }) => {
            assert_eq!(path, "cells[0]");
            assert!(message.contains("rank"), "{message}");
        }
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn unknown_type_in_complex() {
    let broken = CANTOR_COMPLEX.replacen(r#""type":"A""#, r#""type":"Q""#, 1);
    match parse_complex(broken.as_bytes(), &cantor_rule()) {
        Err(RuleFileError::Validation(r)) => assert!(r.has(ViolationCode::UnknownType)),
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn empty_complex_is_valid() {
    let x = parse_complex(br#"{"format_version":"1","cells":[]}"#, &cantor_rule()).unwrap();
    assert!(x.is_empty());
}

#[test]
fn version_is_checked() {
    let err = parse_complex(br#"{"format_version":"2","cells":[]}"#, &cantor_rule()).unwrap_err();
    assert!(matches!(err, RuleFileError::Schema { ref path, .. } if path == "format_version"), "{err}");
    let err = parse_complex(br#"{"cells":[]}"#, &cantor_rule()).unwrap_err();
    assert!(matches!(err, RuleFileError::Schema { .. }), "{err}");
}

#[test]
fn top_attach_may_be_omitted() {
    let short =
        CANTOR_RULE.replace(r#"{"attach":{"a":"a","b":"b","top":"top"},"local_id":"top""#, r#"{"local_id":"top""#);
    assert_ne!(short, CANTOR_RULE);
    let rule = parse_rule(short.as_bytes()).unwrap();
    assert_eq!(serialize_rule(&rule), CANTOR_RULE);
}

#[test]
fn semantic_errors_are_reported() {
    // Ideal B now produces a non-ideal A child.
    let broken =
        CANTOR_RULE.replacen(r#""local_id":"e","rank":1,"type":"B""#, r#""local_id":"e","rank":1,"type":"A""#, 1);
    assert_ne!(broken, CANTOR_RULE);
    match parse_rule(broken.as_bytes()) {
        Err(RuleFileError::Validation(r)) => assert!(r.has(ViolationCode::IdealClosureViolation), "{r}"),
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn bad_character_offset() {
    match parse_complex(b"{\n  \"cells\": x}", &cantor_rule()) {
        Err(RuleFileError::Parse { line, column, offset, .. }) => {
            assert_eq!((line, column), (2, 12));
            assert_eq!(offset, 13);
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}
