use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use braidqp_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    bq_string_free(s);
    out
}

unsafe fn graph(name: &str) -> *mut BqGraph {
    let mut g = ptr::null_mut();
    assert_eq!(bq_graph_builtin(c(name).as_ptr(), &mut g), BqStatus::Ok);
    g
}

unsafe fn quiver(g: *const BqGraph, word: &str) -> *mut BqBraidQuiver {
    let mut bq = ptr::null_mut();
    assert_eq!(bq_build_qxtilde(g, c(word).as_ptr(), &mut bq), BqStatus::Ok);
    bq
}

#[test]
fn build_and_classify_the_triangle_word() {
    unsafe {
        let g = graph("cycle3");
        let mut betti = 0;
        assert_eq!(bq_graph_betti(g, &mut betti), BqStatus::Ok);
        assert_eq!(betti, 1);
        let bq = quiver(g, "1 2 3 1 2 3 1 2 3 3~ 2~ 1~ 3~ 2~ 1~");
        let mut qp = ptr::null_mut();
        assert_eq!(bq_qp_primitive(bq, BqSeeding::Ones, 0, 0, &mut qp), BqStatus::Ok);
        let (mut rank, mut class) = (0, ptr::null_mut());
        assert_eq!(bq_twisted_class(bq, qp, &mut rank, &mut class), BqStatus::Ok);
        assert_eq!(rank, 1);
        assert_eq!(take(class), "[-1]");

        let mut other = ptr::null_mut();
        assert_eq!(bq_qp_primitive(bq, BqSeeding::PowersOfTwo, 3, 4, &mut other), BqStatus::Ok);
        let mut same = true;
        assert_eq!(bq_right_equivalent(bq, qp, qp, &mut same), BqStatus::Ok);
        assert!(same);
        assert_eq!(bq_right_equivalent(bq, qp, other, &mut same), BqStatus::Ok);

        bq_qp_free(other);
        bq_qp_free(qp);
        bq_braid_quiver_free(bq);
        bq_graph_free(g);
    }
}

#[test]
fn move_and_json_round_trip() {
    unsafe {
        let g = graph("a2");
        let bq = quiver(g, "1 2 1 2 1 2 1 2");
        let mut qp = ptr::null_mut();
        assert_eq!(bq_qp_primitive(bq, BqSeeding::PowersOfTwo, 7, 3, &mut qp), BqStatus::Ok);
        let (mut bq2, mut qp2) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(bq_mutate_along_move(bq, qp, c("aba@2").as_ptr(), &mut bq2, &mut qp2), BqStatus::Ok);
        assert_eq!(take_word(bq2), "1 1 2 1 1 2 1 2");

        let mut json = ptr::null_mut();
        assert_eq!(bq_qp_to_json(qp2, &mut json), BqStatus::Ok);
        let text = take(json);
        let mut back = ptr::null_mut();
        assert_eq!(bq_qp_from_json(c(&text).as_ptr(), &mut back), BqStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(bq_qp_to_json(back, &mut again), BqStatus::Ok);
        assert_eq!(take(again), text);

        for p in [qp, qp2, back] {
            bq_qp_free(p);
        }
        bq_braid_quiver_free(bq2);
        bq_braid_quiver_free(bq);
        bq_graph_free(g);
    }
}

unsafe fn take_word(bq: *const BqBraidQuiver) -> String {
    let mut w = ptr::null_mut();
    assert_eq!(bq_braid_quiver_word(bq, &mut w), BqStatus::Ok);
    take(w)
}

#[test]
fn errors_are_reported_with_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(bq_graph_builtin(c("e8").as_ptr(), &mut g), BqStatus::InvalidGraph);
        assert!(g.is_null());
        let msg = CStr::from_ptr(bq_last_error_message()).to_str().unwrap();
        assert!(msg.contains("e8"));

        assert_eq!(bq_graph_parse(c("vertices: 1 2\nedge: 1 3\n").as_ptr(), &mut g), BqStatus::Parse);
        assert_eq!(bq_graph_parse(ptr::null(), &mut g), BqStatus::NullArgument);

        let g = graph("a2");
        assert!(bq_last_error_message().is_null());
        let mut bq = ptr::null_mut();
        assert_eq!(bq_build_qxtilde(g, c("1 1 2 2 2").as_ptr(), &mut bq), BqStatus::Conditions);
        assert_eq!(bq_build_qxtilde(g, c("1 5").as_ptr(), &mut bq), BqStatus::Parse);
        let mut json = ptr::null_mut();
        assert_eq!(bq_build_qx_json(g, c("1 2 1").as_ptr(), &mut json), BqStatus::Ok);
        assert!(take(json).contains("eps2"));
        bq_graph_free(g);
        bq_graph_free(ptr::null_mut());
    }
}

#[test]
fn header_is_generated_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/braidqp.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["bq_graph_builtin", "bq_mutate_along_move", "bq_twisted_class", "BQ_STATUS_UNSUPPORTED"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"braidqp.h\"\nint main(void) { BqGraph *g = 0; return bq_graph_builtin(\"a2\", &g) == BQ_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let Ok(status) = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler found, skipping compile check");
        return;
    };
    assert!(status.success());
}
