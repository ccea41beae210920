//! Kept in its own binary: it sets a process-wide environment variable.

use qcx::cli::{run, CONFIG_ENV};

#[test]
fn config_file_sits_below_flags() {
    let path = std::env::temp_dir().join(format!("qcx-config-{}.json", std::process::id()));
    // a huge optimality gap makes every feasible node a "solution"
    std::fs::write(&path, r#"{"eps_opt": 10.0}"#).unwrap();
    std::env::set_var(CONFIG_ENV, &path);

    let oracle = |extra: &[&str]| {
        let mut out = Vec::new();
        let args = [&["qcx", "oracle", "--example", "ex4_1", "--resolution", "5"][..], extra].concat();
        assert_eq!(run(args, &mut out, &mut Vec::new()), 0);
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        v["solution_points"].as_array().unwrap().len()
    };
    assert_eq!(oracle(&[]), 5);
    assert_eq!(oracle(&["--eps-opt", "1e-9"]), 3);

    std::fs::write(&path, r#"{"eps_typo": 1.0}"#).unwrap();
    assert_eq!(run(["qcx", "oracle", "--example", "ex4_1"], &mut Vec::new(), &mut Vec::new()), 2);
    std::env::remove_var(CONFIG_ENV);
    std::fs::remove_file(&path).unwrap();
}
