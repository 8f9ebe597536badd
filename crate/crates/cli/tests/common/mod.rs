#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

/// Fixed invocations whose output is pinned under `tests/golden/`.
pub const GOLDEN: &[(&str, &[&str])] = &[
    (
        "partners_generic_5",
        &[
            "partners", "--class", "generic", "--m", "5", "--point", "1,0",
        ],
    ),
    (
        "partners_square_5",
        &[
            "partners", "--class", "square", "--m", "5", "--point", "2,1",
        ],
    ),
    (
        "partners_square_3",
        &[
            "partners", "--class", "square", "--m", "3", "--point", "1,0",
        ],
    ),
    (
        "partners_square_13_json",
        &[
            "partners", "--class", "square", "--m", "13", "--point", "5,1", "--json",
        ],
    ),
    (
        "partners_hexagonal_7_json",
        &[
            "partners",
            "--class",
            "hexagonal",
            "--m",
            "7",
            "--point",
            "3,1",
            "--json",
        ],
    ),
    (
        "classify_square_13_json",
        &[
            "classify", "--class", "square", "--m", "13", "--point", "5,1", "--json",
        ],
    ),
    (
        "classify_hexagonal_7",
        &[
            "classify",
            "--class",
            "hexagonal",
            "--m",
            "7",
            "--point",
            "3,1",
        ],
    ),
    (
        "classify_generic_9_json",
        &[
            "classify", "--class", "generic", "--m", "9", "--point", "1,0", "--json",
        ],
    ),
    (
        "classify_square_3",
        &[
            "classify", "--class", "square", "--m", "3", "--point", "1,0",
        ],
    ),
    (
        "classify_square_13_outside",
        &[
            "classify", "--class", "square", "--m", "13", "--point", "1,0",
        ],
    ),
    (
        "hgroup_hexagonal_7_json",
        &[
            "hgroup",
            "--class",
            "hexagonal",
            "--m",
            "7",
            "--point",
            "3,1",
            "--json",
        ],
    ),
    (
        "hgroup_square_10",
        &["hgroup", "--class", "square", "--m", "10", "--point", "3,1"],
    ),
    (
        "hgroup_generic_8",
        &["hgroup", "--class", "generic", "--m", "8", "--point", "1,2"],
    ),
    ("roots_1105_json", &["roots", "--m", "1105", "--json"]),
    (
        "roots_91_hexagonal",
        &["roots", "--m", "91", "--class", "hexagonal"],
    ),
    ("verify_12_json", &["verify", "--max-m", "12", "--json"]),
    ("verify_small", &["verify", "--min-m", "1", "--max-m", "4"]),
    (
        "verify_square_30",
        &["verify", "--classes", "square", "--max-m", "30"],
    ),
    (
        "autoeq_from_point_json",
        &[
            "autoeq",
            "--m",
            "5",
            "--from-point",
            "square,5,2,1",
            "--matrix",
            "3,1,5,2",
            "--json",
        ],
    ),
    (
        "autoeq_non_member",
        &["autoeq", "--m", "5", "--h", "1,4", "--matrix", "3,1,5,2"],
    ),
    (
        "autoeq_identity_lift_json",
        &[
            "autoeq",
            "--m",
            "7",
            "--h",
            "1",
            "--matrix",
            "1,0,0,1",
            "--lift",
            "--closure-samples",
            "50",
            "--seed",
            "3",
            "--json",
        ],
    ),
];

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_fmpartners"))
        .args(args)
        .output()
        .expect("failed to run fmpartners");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("stdout is UTF-8"),
        stderr: String::from_utf8(out.stderr).expect("stderr is UTF-8"),
    }
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.txt"))
}
