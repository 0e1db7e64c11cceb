use opman::format::ManifoldFile;
use opman::io::{load_manifold, parse_document, save_manifold, write_document};
use opman::Error;
use opman_core::{examples, generate_random_manifold};

#[test]
fn save_then_load_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    for om in [
        examples::scalar(2),
        examples::spinor(4),
        generate_random_manifold(6, 10, &[3, 0, 2, 1, 4, 0], 21).unwrap(),
    ] {
        let path = dir.path().join("m.json");
        save_manifold(&om, &path).unwrap();
        // Shortest round-trip float formatting makes this exact.
        assert_eq!(load_manifold(&path).unwrap(), om);
    }
}

#[test]
fn zero_weight_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = ManifoldFile::from_manifold(&examples::scalar(3));
    file.cells[1].weight = 0.0;
    let path = dir.path().join("m.json");
    write_document(&file, &path).unwrap();
    let err = load_manifold(&path).unwrap_err();
    assert!(matches!(err, Error::Content { .. }));
    assert!(err.to_string().contains("weight must be positive"), "{err}");
    assert!(err.to_string().starts_with("cells[1]"), "{err}");
}

#[test]
fn incomplete_frames_are_rejected_with_residual() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = ManifoldFile::from_manifold(&examples::scalar(3));
    // Cell c2 now spans e_1 instead of e_2: ranks still sum to N, but E(X) != 1.
    file.cells[2].frame = vec![vec![[0.0, 0.0]], vec![[1.0, 0.0]], vec![[0.0, 0.0]]];
    let path = dir.path().join("m.json");
    write_document(&file, &path).unwrap();
    let err = load_manifold(&path).unwrap_err();
    let Error::Validation { report, .. } = &err else {
        panic!("expected a validation failure, got {err}");
    };
    let completeness = report.get("completeness").unwrap();
    assert!(!completeness.passed());
    assert!(
        err.to_string()
            .contains(&format!("{:e}", completeness.residual)),
        "{err}"
    );
}

#[test]
fn parse_errors_carry_a_path() {
    let mut file = ManifoldFile::from_manifold(&examples::scalar(2));
    let mut text = serde_json::to_string(&file).unwrap();
    text = text.replace("\"weight\":1.0", "\"weight\":\"heavy\"");
    let err = parse_document::<ManifoldFile>(&text).unwrap_err();
    assert!(err.to_string().starts_with("cells[0].weight: "), "{err}");

    file.cells[0].frame[0][0] = [1.0, 0.0];
    let text = serde_json::to_string(&file)
        .unwrap()
        .replace("[1.0,0.0]", "[1.0]");
    let err = parse_document::<ManifoldFile>(&text).unwrap_err();
    assert!(err.to_string().starts_with("cells[0].frame[0][0]"), "{err}");

    let err =
        parse_document::<ManifoldFile>("{\"format\": \"opman/1\", \"colour\": 1}").unwrap_err();
    assert!(err.to_string().contains("colour"), "{err}");
}

#[test]
fn duplicate_ids_are_rejected() {
    let mut file = ManifoldFile::from_manifold(&examples::scalar(2));
    file.cells[1].id = "c0".into();
    assert!(matches!(file.to_manifold(), Err(Error::Content { .. })));
}
