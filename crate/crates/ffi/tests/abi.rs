use std::ffi::{CStr, CString};
use std::ptr;

use qttt_ffi::*;

const B1: [f64; 9] = [1., 0., 0., 0., 0., 0., 0., 0., 0.];
const B2: [f64; 9] = [0., 1., 0., 0., 0., 0., 0., 0., 0.];
const B9: [f64; 9] = [0., 0., 0., 0., 0., 0., 0., 0., 1.];

fn last_error() -> String {
    let p = qttt_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Game(*mut QtttGame);

impl Drop for Game {
    fn drop(&mut self) {
        unsafe { qttt_game_free(self.0) }
    }
}

#[test]
fn classical_win_through_the_abi() {
    let g = Game(qttt_game_new());
    unsafe {
        assert_eq!(qttt_game_to_move(g.0), 1);
        assert_eq!(qttt_game_apply(g.0, 1, B1.as_ptr()), QtttStatus::Ok);
        assert_eq!(qttt_game_apply(g.0, 2, B9.as_ptr()), QtttStatus::Ok);
        assert_eq!(qttt_game_apply(g.0, 1, B2.as_ptr()), QtttStatus::Ok);

        let mut w = 0.0;
        assert_eq!(qttt_game_oracle_max_weight(g.0, 1, 0, &mut w, ptr::null_mut()), QtttStatus::Ok);
        assert!((w - 3.0).abs() < 1e-12);
        assert_eq!(qttt_game_line_weight(g.0, 1, 0, &mut w), QtttStatus::Ok);
        assert_eq!(w, 2.0);

        let b8 = [0., 0., 0., 0., 0., 0., 0., 1., 0.];
        let b3 = [0., 0., 1., 0., 0., 0., 0., 0., 0.];
        assert_eq!(qttt_game_apply(g.0, 2, b8.as_ptr()), QtttStatus::Ok);
        assert_eq!(qttt_game_apply(g.0, 1, b3.as_ptr()), QtttStatus::Ok);
        let mut win = false;
        assert_eq!(qttt_game_is_win(g.0, 1, &mut win), QtttStatus::Ok);
        assert!(win);
        let mut line = -1;
        assert_eq!(qttt_game_max_weight(g.0, 1, &mut w, &mut line), QtttStatus::Ok);
        assert_eq!((w, line), (3.0, 0));
    }
}

#[test]
fn rejections_carry_codes_and_messages() {
    let g = Game(qttt_game_new());
    unsafe {
        let long = [2.0, 0., 0., 0., 0., 0., 0., 0., 0.];
        assert_eq!(qttt_game_apply(g.0, 1, long.as_ptr()), QtttStatus::NotNormalized);
        assert!(last_error().contains("norm"));
        assert_eq!(qttt_game_apply(g.0, 2, B1.as_ptr()), QtttStatus::WrongTurn);
        assert_eq!(qttt_game_apply(g.0, 3, B1.as_ptr()), QtttStatus::InvalidArgument);
        assert_eq!(qttt_game_apply(g.0, 1, ptr::null()), QtttStatus::NullPointer);
        assert_eq!(qttt_game_apply(ptr::null_mut(), 1, B1.as_ptr()), QtttStatus::NullPointer);
        assert_eq!(qttt_game_apply(g.0, 1, B1.as_ptr()), QtttStatus::Ok);
        assert_eq!(qttt_game_apply(g.0, 2, B1.as_ptr()), QtttStatus::NotOrthogonal);
        let mut out = [0.0; 9];
        assert_eq!(qttt_game_apply_assisted(g.0, 2, B1.as_ptr(), out.as_mut_ptr()), QtttStatus::DegenerateResidual);
        let mut w = 0.0;
        assert_eq!(qttt_game_line_weight(g.0, 1, 8, &mut w), QtttStatus::InvalidArgument);
        let nan = [f64::NAN; 9];
        assert_eq!(qttt_game_apply(g.0, 2, nan.as_ptr()), QtttStatus::InvalidArgument);
    }
}

#[test]
fn engine_moves_and_json_roundtrip() {
    let g = Game(qttt_game_new());
    let wb = CString::new("wb").unwrap();
    let uniform = CString::new("uniform").unwrap();
    let mut mv = [0.0; 9];
    unsafe {
        assert_eq!(qttt_game_engine_move(g.0, wb.as_ptr(), uniform.as_ptr(), 3, 20, mv.as_mut_ptr()), QtttStatus::Ok);
        assert!(mv.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(qttt_game_engine_move(g.0, wb.as_ptr(), uniform.as_ptr(), 3, 20, mv.as_mut_ptr()), QtttStatus::Ok);
        assert_eq!(qttt_game_total_moves(g.0), 2);
        assert_eq!(qttt_game_engine_move(g.0, wb.as_ptr(), uniform.as_ptr(), 3, 0, ptr::null_mut()), QtttStatus::InvalidArgument);

        let json = qttt_game_to_json(g.0);
        assert!(!json.is_null());
        let mut copy: *mut QtttGame = ptr::null_mut();
        assert_eq!(qttt_game_from_json(json, &mut copy), QtttStatus::Ok);
        let copy = Game(copy);
        let again = qttt_game_to_json(copy.0);
        assert_eq!(CStr::from_ptr(json), CStr::from_ptr(again));
        qttt_string_free(json);
        qttt_string_free(again);

        let bad = CString::new(r#"{"moves1":[[1,0,0,0,0,0,0,0,0]],"moves2":[[1,0,0,0,0,0,0,0,0]]}"#).unwrap();
        let mut out: *mut QtttGame = ptr::null_mut();
        assert_eq!(qttt_game_from_json(bad.as_ptr(), &mut out), QtttStatus::NotOrthogonal);
        assert!(out.is_null());
        let garbage = CString::new("not json").unwrap();
        assert_eq!(qttt_game_from_json(garbage.as_ptr(), &mut out), QtttStatus::ParseError);
    }
}

#[test]
fn full_board_reports_game_over() {
    let g = Game(qttt_game_new());
    unsafe {
        for (i, site) in [5, 1, 9, 3, 2, 8, 7, 4, 6].into_iter().enumerate() {
            let mut a = [0.0; 9];
            a[site - 1] = 1.0;
            assert_eq!(qttt_game_apply(g.0, (i % 2) as i32 + 1, a.as_ptr()), QtttStatus::Ok, "move {i}");
        }
        assert_eq!(qttt_game_to_move(g.0), 0);
        let mut w = 0.0;
        assert_eq!(qttt_game_oracle_max_weight(g.0, 1, 0, &mut w, ptr::null_mut()), QtttStatus::GameOver);
        let s = CString::new("wb").unwrap();
        let o = CString::new("classical").unwrap();
        assert_eq!(qttt_game_engine_move(g.0, s.as_ptr(), o.as_ptr(), 1, 20, ptr::null_mut()), QtttStatus::GameOver);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qttt.h")).unwrap();
    for name in [
        "typedef struct QtttGame QtttGame",
        "QTTT_STATUS_NOT_ORTHOGONAL = 4",
        "qttt_game_new(void)",
        "qttt_game_free(",
        "qttt_game_apply(",
        "qttt_game_apply_assisted(",
        "qttt_game_line_weight(",
        "qttt_game_max_weight(",
        "qttt_game_is_win(",
        "qttt_game_oracle_max_weight(",
        "qttt_game_engine_move(",
        "qttt_game_to_json(",
        "qttt_game_from_json(",
        "qttt_string_free(",
        "qttt_last_error(void)",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Builds the C smoke test against the generated header and the shared library.
#[test]
fn c_program_links_and_runs() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    if !lib_dir.join("libqttt_ffi.so").exists() || std::process::Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or shared library");
        return;
    }
    let out_dir = tempfile::tempdir().unwrap();
    let bin = out_dir.path().join("smoke");
    let status = std::process::Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(lib_dir)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .args(["-lqttt_ffi", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = std::process::Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
