//! C ABI over the simulator and the lattice layer.
//!
//! Every function returns an [`OcStatus`]. Objects are opaque handles that
//! the caller releases with the matching `*_free` function. Subsets travel
//! as 64-bit masks, bit `i` standing for class `i + 1`. After a failure,
//! `oc_last_error` yields a message for the calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use opencomp::error::{ConfigError, LatticeError};
use opencomp::lattice::{build_block_relation, law_report, to_dot, Lattice, Relation, Subset};
use opencomp::params::{NoiseSchedule, RatioMode, SimParams};
use opencomp::sim::SimState;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Parse = 4,
    Capacity = 5,
    NotAnElement = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Simulation constants. A zero `noise_rate` and zero `noise_onset_step`
/// give constant noise `noise_p0`; anything else selects the ramp.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcSimParams {
    pub n_molecules: usize,
    pub theta_c: f64,
    pub theta_dec: f64,
    pub noise_p0: f64,
    pub noise_rate: f64,
    pub noise_onset_step: u64,
    pub theta_a: f64,
    pub p_coh: f64,
    pub interplay_enabled: bool,
    /// Pool every cluster of the modal size (true) or use the first one.
    pub pooled_ratio: bool,
    pub max_steps: u64,
    pub seed: u64,
}

impl From<&SimParams> for OcSimParams {
    fn from(p: &SimParams) -> Self {
        let (noise_p0, noise_rate, noise_onset_step) = match p.noise {
            NoiseSchedule::Constant { p0 } => (p0, 0.0, 0),
            NoiseSchedule::Ramp {
                p0,
                rate,
                onset_step,
            } => (p0, rate, onset_step),
        };
        OcSimParams {
            n_molecules: p.n_molecules,
            theta_c: p.theta_c,
            theta_dec: p.theta_dec,
            noise_p0,
            noise_rate,
            noise_onset_step,
            theta_a: p.theta_a,
            p_coh: p.p_coh,
            interplay_enabled: p.interplay_enabled,
            pooled_ratio: p.ratio_mode == RatioMode::Pooled,
            max_steps: p.max_steps,
            seed: p.seed,
        }
    }
}

impl From<&OcSimParams> for SimParams {
    fn from(p: &OcSimParams) -> Self {
        let noise = if p.noise_rate == 0.0 && p.noise_onset_step == 0 {
            NoiseSchedule::Constant { p0: p.noise_p0 }
        } else {
            NoiseSchedule::Ramp {
                p0: p.noise_p0,
                rate: p.noise_rate,
                onset_step: p.noise_onset_step,
            }
        };
        SimParams {
            n_molecules: p.n_molecules,
            theta_c: p.theta_c,
            theta_dec: p.theta_dec,
            noise,
            theta_a: p.theta_a,
            p_coh: p.p_coh,
            interplay_enabled: p.interplay_enabled,
            ratio_mode: if p.pooled_ratio {
                RatioMode::Pooled
            } else {
                RatioMode::Representative
            },
            max_steps: p.max_steps,
            seed: p.seed,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OcStepReport {
    pub t: u64,
    pub cluster_count: usize,
    pub active_count: usize,
    pub noise_p: f64,
}

/// Opaque simulation state.
pub struct OcSim {
    state: SimState,
    params: SimParams,
}

/// Opaque binary relation.
pub struct OcRelation(Relation);

/// Opaque fixed-point lattice.
pub struct OcLattice(Lattice);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(OcStatus, String);

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure(OcStatus::Config, e.to_string())
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        let status = match e {
            LatticeError::Parse { .. } | LatticeError::EmptyLine { .. } => OcStatus::Parse,
            LatticeError::Capacity { .. } | LatticeError::TooLarge { .. } => OcStatus::Capacity,
            LatticeError::NotAnElement(_) => OcStatus::NotAnElement,
            LatticeError::Generator(_) => OcStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(OcStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OcStatus {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(Failure(OcStatus::Panic, msg))
    });
    match result {
        Ok(()) => {
            LAST_ERROR.with(|e| e.borrow_mut().clear());
            OcStatus::Ok
        }
        Err(Failure(status, msg)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = msg);
            status
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Copies `text` plus a NUL into `buf` when it fits; always stores the
/// length without the NUL in `len_out`.
unsafe fn write_text(
    text: &str,
    buf: *mut c_char,
    cap: usize,
    len_out: *mut usize,
) -> Result<(), Failure> {
    *out(len_out, "len_out")? = text.len();
    if buf.is_null() || cap < text.len() + 1 {
        return Err(Failure(
            OcStatus::BufferTooSmall,
            format!("need {} bytes, got {cap}", text.len() + 1),
        ));
    }
    ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, text.len());
    *buf.add(text.len()) = 0;
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// NUL-terminated) and returns its full length.
#[no_mangle]
pub unsafe extern "C" fn oc_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn oc_status_message(status: OcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        OcStatus::Ok => c"ok",
        OcStatus::NullPointer => c"null pointer argument",
        OcStatus::InvalidArgument => c"invalid argument",
        OcStatus::Config => c"invalid simulation parameters",
        OcStatus::Parse => c"relation parse error",
        OcStatus::Capacity => c"input exceeds supported size",
        OcStatus::NotAnElement => c"subset is not a lattice element",
        OcStatus::BufferTooSmall => c"output buffer too small",
        OcStatus::Panic => c"internal error",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn oc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn oc_sim_params_default(params_out: *mut OcSimParams) -> OcStatus {
    guard(|| {
        *out(params_out, "params_out")? = OcSimParams::from(&SimParams::default());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn oc_sim_new(
    params: *const OcSimParams,
    sim_out: *mut *mut OcSim,
) -> OcStatus {
    guard(|| {
        let slot = out(sim_out, "sim_out")?;
        let params = SimParams::from(get(params, "params")?);
        let state = SimState::new(&params)?;
        *slot = Box::into_raw(Box::new(OcSim { state, params }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn oc_sim_free(sim: *mut OcSim) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances one step. `report_out` may be null.
#[no_mangle]
pub unsafe extern "C" fn oc_sim_step(sim: *mut OcSim, report_out: *mut OcStepReport) -> OcStatus {
    guard(|| {
        let sim = out(sim, "sim")?;
        let r = sim.state.step(&sim.params);
        if let Some(slot) = report_out.as_mut() {
            *slot = OcStepReport {
                t: r.t,
                cluster_count: sim.state.c_max(),
                active_count: sim.state.active_count(),
                noise_p: r.noise_p,
            };
        }
        Ok(())
    })
}

/// Advances `n_steps` steps, writing per-step counts into the arrays of
/// length `n_steps`. Either array may be null.
#[no_mangle]
pub unsafe extern "C" fn oc_sim_run(
    sim: *mut OcSim,
    n_steps: usize,
    cluster_counts_out: *mut usize,
    active_counts_out: *mut usize,
) -> OcStatus {
    guard(|| {
        let sim = out(sim, "sim")?;
        for i in 0..n_steps {
            sim.state.step(&sim.params);
            if !cluster_counts_out.is_null() {
                *cluster_counts_out.add(i) = sim.state.c_max();
            }
            if !active_counts_out.is_null() {
                *active_counts_out.add(i) = sim.state.active_count();
            }
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn oc_sim_counts(
    sim: *const OcSim,
    cluster_count_out: *mut usize,
    active_count_out: *mut usize,
) -> OcStatus {
    guard(|| {
        let sim = get(sim, "sim")?;
        *out(cluster_count_out, "cluster_count_out")? = sim.state.c_max();
        *out(active_count_out, "active_count_out")? = sim.state.active_count();
        Ok(())
    })
}

/// Number of consistency violations in the current state (0 when sound).
#[no_mangle]
pub unsafe extern "C" fn oc_sim_audit(sim: *const OcSim, violations_out: *mut usize) -> OcStatus {
    guard(|| {
        let sim = get(sim, "sim")?;
        *out(violations_out, "violations_out")? = sim.state.audit().len();
        Ok(())
    })
}

/// Parses a NUL-terminated relation text of `0`/`1` rows.
#[no_mangle]
pub unsafe extern "C" fn oc_relation_parse(
    text: *const c_char,
    relation_out: *mut *mut OcRelation,
) -> OcStatus {
    guard(|| {
        let slot = out(relation_out, "relation_out")?;
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(OcStatus::Parse, format!("relation text is not UTF-8: {e}")))?;
        *slot = Box::into_raw(Box::new(OcRelation(Relation::parse(text)?)));
        Ok(())
    })
}

/// Block-diagonal relation; see the generator documentation of the core crate.
#[no_mangle]
pub unsafe extern "C" fn oc_relation_generate(
    block_sizes: *const usize,
    n_blocks: usize,
    overlap: *const usize,
    n_overlap: usize,
    fill_off_blocks: bool,
    relation_out: *mut *mut OcRelation,
) -> OcStatus {
    guard(|| {
        let slot = out(relation_out, "relation_out")?;
        if block_sizes.is_null() {
            return Err(null("block_sizes"));
        }
        let sizes = std::slice::from_raw_parts(block_sizes, n_blocks);
        let shared = if n_overlap == 0 {
            &[][..]
        } else if overlap.is_null() {
            return Err(null("overlap"));
        } else {
            std::slice::from_raw_parts(overlap, n_overlap)
        };
        let rel = build_block_relation(sizes, shared, fill_off_blocks)?;
        *slot = Box::into_raw(Box::new(OcRelation(rel)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn oc_relation_free(relation: *mut OcRelation) {
    if !relation.is_null() {
        drop(Box::from_raw(relation));
    }
}

#[no_mangle]
pub unsafe extern "C" fn oc_relation_dims(
    relation: *const OcRelation,
    rows_out: *mut usize,
    cols_out: *mut usize,
) -> OcStatus {
    guard(|| {
        let rel = &get(relation, "relation")?.0;
        *out(rows_out, "rows_out")? = rel.n_rows();
        *out(cols_out, "cols_out")? = rel.n_cols();
        Ok(())
    })
}

fn check_mask(mask: u64, width: usize, what: &str) -> Result<Subset, Failure> {
    let s = Subset(mask);
    if s.is_subset_of(Subset::full(width)) {
        Ok(s)
    } else {
        Err(Failure(
            OcStatus::InvalidArgument,
            format!("{what} mask {mask:#x} exceeds {width} classes"),
        ))
    }
}

/// Columns related to any row in `rows`.
#[no_mangle]
pub unsafe extern "C" fn oc_relation_upper(
    relation: *const OcRelation,
    rows: u64,
    cols_out: *mut u64,
) -> OcStatus {
    guard(|| {
        let rel = &get(relation, "relation")?.0;
        let x = check_mask(rows, rel.n_rows(), "row")?;
        *out(cols_out, "cols_out")? = rel.upper_approx(x).0;
        Ok(())
    })
}

/// Rows whose related columns all lie in `cols`.
#[no_mangle]
pub unsafe extern "C" fn oc_relation_lower(
    relation: *const OcRelation,
    cols: u64,
    rows_out: *mut u64,
) -> OcStatus {
    guard(|| {
        let rel = &get(relation, "relation")?.0;
        let y = check_mask(cols, rel.n_cols(), "column")?;
        *out(rows_out, "rows_out")? = rel.lower_approx(y).0;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn oc_relation_closure(
    relation: *const OcRelation,
    rows: u64,
    rows_out: *mut u64,
) -> OcStatus {
    guard(|| {
        let rel = &get(relation, "relation")?.0;
        let x = check_mask(rows, rel.n_rows(), "row")?;
        *out(rows_out, "rows_out")? = rel.closure(x).0;
        Ok(())
    })
}

/// Enumerates every fixed point of the closure (at most 20 rows).
#[no_mangle]
pub unsafe extern "C" fn oc_lattice_enumerate(
    relation: *const OcRelation,
    lattice_out: *mut *mut OcLattice,
) -> OcStatus {
    guard(|| {
        let slot = out(lattice_out, "lattice_out")?;
        let lat = Lattice::enumerate(&get(relation, "relation")?.0)?;
        *slot = Box::into_raw(Box::new(OcLattice(lat)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn oc_lattice_free(lattice: *mut OcLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

#[no_mangle]
pub unsafe extern "C" fn oc_lattice_len(
    lattice: *const OcLattice,
    len_out: *mut usize,
) -> OcStatus {
    guard(|| {
        *out(len_out, "len_out")? = get(lattice, "lattice")?.0.len();
        Ok(())
    })
}

/// Writes the element masks in increasing order. `len_out` always receives
/// the element count; a short buffer yields `BUFFER_TOO_SMALL`.
#[no_mangle]
pub unsafe extern "C" fn oc_lattice_elements(
    lattice: *const OcLattice,
    masks_out: *mut u64,
    cap: usize,
    len_out: *mut usize,
) -> OcStatus {
    guard(|| {
        let els = get(lattice, "lattice")?.0.elements();
        *out(len_out, "len_out")? = els.len();
        if masks_out.is_null() || cap < els.len() {
            return Err(Failure(
                OcStatus::BufferTooSmall,
                format!("need {} slots, got {cap}", els.len()),
            ));
        }
        for (i, e) in els.iter().enumerate() {
            *masks_out.add(i) = e.0;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn oc_lattice_meet(
    lattice: *const OcLattice,
    x: u64,
    y: u64,
    meet_out: *mut u64,
) -> OcStatus {
    guard(|| {
        let lat = &get(lattice, "lattice")?.0;
        *out(meet_out, "meet_out")? = lat.meet(Subset(x), Subset(y))?.0;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn oc_lattice_join(
    lattice: *const OcLattice,
    x: u64,
    y: u64,
    join_out: *mut u64,
) -> OcStatus {
    guard(|| {
        let lat = &get(lattice, "lattice")?.0;
        *out(join_out, "join_out")? = lat.join(Subset(x), Subset(y))?.0;
        Ok(())
    })
}

/// Law report as JSON (keys `distributive`, `witness`, `blocks`, `shared`,
/// `orthomodular`, ...). Call with a null buffer to learn the length.
#[no_mangle]
pub unsafe extern "C" fn oc_lattice_laws_json(
    lattice: *const OcLattice,
    buf: *mut c_char,
    cap: usize,
    len_out: *mut usize,
) -> OcStatus {
    guard(|| {
        let report = law_report(&get(lattice, "lattice")?.0)?;
        let text =
            serde_json::to_string(&report).map_err(|e| Failure(OcStatus::Panic, e.to_string()))?;
        write_text(&text, buf, cap, len_out)
    })
}

/// Hasse diagram in Graphviz DOT. Call with a null buffer to learn the length.
#[no_mangle]
pub unsafe extern "C" fn oc_lattice_dot(
    lattice: *const OcLattice,
    buf: *mut c_char,
    cap: usize,
    len_out: *mut usize,
) -> OcStatus {
    guard(|| write_text(&to_dot(&get(lattice, "lattice")?.0), buf, cap, len_out))
}
