//! Compiles tests/smoke.c against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/c_smoke-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_walks_a_trip() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libwayfind_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let compiler = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&compiler).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler `{compiler}` on PATH");
        return;
    }
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new(&compiler)
        .args(["-std=c11", "-Wall", "-Wextra", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");

    let out = Command::new(&exe)
        .arg(manifest.join("../core/maps/square.json"))
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        out.status.success(),
        "{stdout}\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout.contains(r#""nodes":["A","B","C"]"#), "{stdout}");
    assert!(stdout.contains("\"kind\":\"arrived\""), "{stdout}");
    assert!(stdout.contains("bad scan undecodable"), "{stdout}");
    assert!(stdout.contains("\"state\":\"arrived\""), "{stdout}");
}
