use std::path::PathBuf;
use std::process::Command;

/// Compiles a small C program against the generated header and the static
/// library, then runs it. Skipped when no C compiler is on the path.
#[test]
fn c_program_links_and_runs() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libgradual_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no cc or no static library at {}", lib.display());
        return;
    }
    let out = std::env::temp_dir().join(format!("gradual_ffi_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "C program exited with {:?}", run.status.code());
    let text = String::from_utf8_lossy(&run.stdout);
    assert!(text.starts_with("phases="), "{text}");
    assert!(text.contains("self-loop") || text.contains("loop"), "{text}");
}
