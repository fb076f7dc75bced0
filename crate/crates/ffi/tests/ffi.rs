use std::ffi::{c_char, CStr, CString};
use std::ptr;

use opencomp::params::SimParams;
use opencomp::sim::SimState;
use opencomp_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe {
        oc_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn default_params() -> OcSimParams {
    let mut p = std::mem::MaybeUninit::<OcSimParams>::uninit();
    assert_eq!(
        unsafe { oc_sim_params_default(p.as_mut_ptr()) },
        OcStatus::Ok
    );
    unsafe { p.assume_init() }
}

#[test]
fn params_round_trip() {
    let p = default_params();
    assert_eq!(SimParams::from(&p), SimParams::default());
    let core = SimParams {
        noise: opencomp::params::NoiseSchedule::Ramp {
            p0: 0.0,
            rate: 1e-5,
            onset_step: 100,
        },
        ..SimParams::default()
    };
    assert_eq!(SimParams::from(&OcSimParams::from(&core)), core);
}

#[test]
fn simulation_matches_core() {
    let mut p = default_params();
    p.seed = 11;
    p.noise_p0 = 0.05;
    p.interplay_enabled = true;
    let mut sim = ptr::null_mut();
    assert_eq!(unsafe { oc_sim_new(&p, &mut sim) }, OcStatus::Ok);
    let mut clusters = vec![0usize; 2000];
    let mut active = vec![0usize; 2000];
    assert_eq!(
        unsafe { oc_sim_run(sim, 2000, clusters.as_mut_ptr(), active.as_mut_ptr()) },
        OcStatus::Ok
    );

    let core = SimParams::from(&p);
    let mut state = SimState::new(&core).unwrap();
    for i in 0..2000 {
        state.step(&core);
        assert_eq!(
            (clusters[i], active[i]),
            (state.c_max(), state.active_count()),
            "step {i}"
        );
    }

    let mut report = OcStepReport::default();
    assert_eq!(unsafe { oc_sim_step(sim, &mut report) }, OcStatus::Ok);
    state.step(&core);
    assert_eq!(report.cluster_count, state.c_max());
    let (mut c, mut a, mut v) = (0, 0, 99);
    unsafe {
        assert_eq!(oc_sim_counts(sim, &mut c, &mut a), OcStatus::Ok);
        assert_eq!(oc_sim_audit(sim, &mut v), OcStatus::Ok);
        oc_sim_free(sim);
    }
    assert_eq!((c, a, v), (state.c_max(), state.active_count(), 0));
}

#[test]
fn invalid_params_and_null_pointers() {
    let mut p = default_params();
    p.theta_c = 2.0;
    let mut sim = ptr::null_mut();
    assert_eq!(unsafe { oc_sim_new(&p, &mut sim) }, OcStatus::Config);
    assert!(sim.is_null());
    assert!(last_error().contains("theta_c"));
    assert_eq!(
        unsafe { oc_sim_new(ptr::null(), &mut sim) },
        OcStatus::NullPointer
    );
    assert_eq!(
        unsafe { oc_sim_step(ptr::null_mut(), ptr::null_mut()) },
        OcStatus::NullPointer
    );
    unsafe {
        oc_sim_free(ptr::null_mut());
        oc_relation_free(ptr::null_mut());
        oc_lattice_free(ptr::null_mut());
    }
}

#[test]
fn relation_parse_errors_carry_messages() {
    let text = CString::new("1 0\n0 0\n").unwrap();
    let mut rel = ptr::null_mut();
    assert_eq!(
        unsafe { oc_relation_parse(text.as_ptr(), &mut rel) },
        OcStatus::Parse
    );
    assert!(last_error().contains("empty row"));
    let ok = CString::new("# diagonal\n1 0\n0 1\n").unwrap();
    assert_eq!(
        unsafe { oc_relation_parse(ok.as_ptr(), &mut rel) },
        OcStatus::Ok
    );
    let (mut r, mut c) = (0, 0);
    unsafe {
        assert_eq!(oc_relation_dims(rel, &mut r, &mut c), OcStatus::Ok);
        oc_relation_free(rel);
    }
    assert_eq!((r, c), (2, 2));
}

#[test]
fn worked_example_through_the_abi() {
    let sizes = [3usize, 3, 2];
    let overlap = [3usize];
    let mut rel = ptr::null_mut();
    let status =
        unsafe { oc_relation_generate(sizes.as_ptr(), 3, overlap.as_ptr(), 1, true, &mut rel) };
    assert_eq!(status, OcStatus::Ok);
    let closure = |mask: u64| {
        let mut out = 0;
        assert_eq!(
            unsafe { oc_relation_closure(rel, mask, &mut out) },
            OcStatus::Ok
        );
        out
    };
    assert_eq!(closure(0b1), 0b1);
    assert_eq!(closure(0b100), 0b100);
    assert_eq!(closure(0b11), 0b11011);
    assert_eq!(closure(0b100001), 0b1111111);
    let mut upper = 0;
    assert_eq!(
        unsafe { oc_relation_upper(rel, 0b1, &mut upper) },
        OcStatus::Ok
    );
    assert_eq!(upper, 0b1111001);
    let mut lower = 0;
    assert_eq!(
        unsafe { oc_relation_lower(rel, upper, &mut lower) },
        OcStatus::Ok
    );
    assert_eq!(lower, 0b1);
    assert_eq!(
        unsafe { oc_relation_closure(rel, 1 << 9, &mut lower) },
        OcStatus::InvalidArgument
    );

    let mut lat = ptr::null_mut();
    assert_eq!(unsafe { oc_lattice_enumerate(rel, &mut lat) }, OcStatus::Ok);
    let mut len = 0;
    assert_eq!(
        unsafe { oc_lattice_elements(lat, ptr::null_mut(), 0, &mut len) },
        OcStatus::BufferTooSmall
    );
    let mut masks = vec![0u64; len];
    assert_eq!(
        unsafe { oc_lattice_elements(lat, masks.as_mut_ptr(), len, &mut len) },
        OcStatus::Ok
    );
    assert!(masks.windows(2).all(|w| w[0] < w[1]));
    assert!(masks.contains(&0b11011));

    let mut join = 0;
    assert_eq!(
        unsafe { oc_lattice_join(lat, 0b1, 0b10, &mut join) },
        OcStatus::Ok
    );
    assert_eq!(join, 0b11011);
    assert_eq!(
        unsafe { oc_lattice_meet(lat, 0b11, 0b1, &mut join) },
        OcStatus::NotAnElement
    );

    let mut n = 0;
    assert_eq!(
        unsafe { oc_lattice_laws_json(lat, ptr::null_mut(), 0, &mut n) },
        OcStatus::BufferTooSmall
    );
    let mut buf = vec![0 as c_char; n + 1];
    assert_eq!(
        unsafe { oc_lattice_laws_json(lat, buf.as_mut_ptr(), buf.len(), &mut n) },
        OcStatus::Ok
    );
    let json: serde_json::Value =
        serde_json::from_str(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap()).unwrap();
    assert_eq!(json["orthomodular"], true);
    assert_eq!(json["shared"].as_array().unwrap().len(), 4);
    for key in [
        "distributive",
        "witness",
        "blocks",
        "shared",
        "orthomodular",
    ] {
        assert!(json.get(key).is_some(), "missing {key}");
    }

    assert_eq!(
        unsafe { oc_lattice_dot(lat, ptr::null_mut(), 0, &mut n) },
        OcStatus::BufferTooSmall
    );
    let mut dot = vec![0 as c_char; n + 1];
    assert_eq!(
        unsafe { oc_lattice_dot(lat, dot.as_mut_ptr(), dot.len(), &mut n) },
        OcStatus::Ok
    );
    assert!(unsafe { CStr::from_ptr(dot.as_ptr()) }
        .to_str()
        .unwrap()
        .starts_with("digraph"));

    unsafe {
        oc_lattice_free(lat);
        oc_relation_free(rel);
    }
}

#[test]
fn capacity_is_reported() {
    let sizes = [21usize];
    let mut rel = ptr::null_mut();
    let mut lat = ptr::null_mut();
    unsafe {
        assert_eq!(
            oc_relation_generate(sizes.as_ptr(), 1, ptr::null(), 0, false, &mut rel),
            OcStatus::Ok
        );
        assert_eq!(oc_lattice_enumerate(rel, &mut lat), OcStatus::Capacity);
        oc_relation_free(rel);
    }
    assert!(last_error().contains("21 rows"));
}

#[test]
fn status_strings_and_version() {
    let msg = unsafe { CStr::from_ptr(oc_status_message(OcStatus::BufferTooSmall)) };
    assert_eq!(msg.to_str().unwrap(), "output buffer too small");
    let v = unsafe { CStr::from_ptr(oc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/opencomp.h"))
            .unwrap();
    let source =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20);
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    for ty in [
        "typedef struct OcSim OcSim;",
        "typedef struct OcLattice OcLattice;",
        "OC_STATUS_NOT_AN_ELEMENT = 6",
    ] {
        assert!(header.contains(ty), "{ty}");
    }
}
