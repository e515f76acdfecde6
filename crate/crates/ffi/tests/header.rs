use std::path::Path;
use std::process::Command;

const HEADER: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/include/crimedyn.h");

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(HEADER).unwrap();
    let source = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = source.split("extern \"C\" fn ").skip(1).map(|s| s.split('(').next().unwrap()).collect();
    assert!(exports.len() >= 12, "{exports:?}");
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct CrimedynParams CrimedynParams;"));
    assert!(header.contains("CRIMEDYN_STATUS_INADMISSIBLE = 3"));
}

/// Compiles a small C translation unit against the header when a C compiler is around.
#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        r#"#include "crimedyn.h"
int use(void) {
    CrimedynParams *p = 0;
    double r0 = 0.0;
    CrimedynThresholds t;
    if (crimedyn_params_preset("table4", &p) != CRIMEDYN_STATUS_OK) return 1;
    if (crimedyn_r0(p, &r0) != CRIMEDYN_STATUS_OK) return 2;
    crimedyn_thresholds(p, &t);
    crimedyn_params_free(p);
    return (int)(t.r0 > 1.0);
}
"#,
    )
    .unwrap();
    let include = Path::new(HEADER).parent().unwrap();
    let out = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
