use std::ptr;

use gelfond_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { gelfond_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf.iter().take(n.min(255)).map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn digit_sum_and_errors() {
    let mut out = 0u64;
    assert_eq!(unsafe { gelfond_digit_sum(255, 2, &mut out) }, GelfondStatus::Ok);
    assert_eq!(out, 8);
    assert_eq!(unsafe { gelfond_digit_sum(10, 1, &mut out) }, GelfondStatus::InvalidArgument);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { gelfond_digit_sum(10, 2, ptr::null_mut()) }, GelfondStatus::NullPointer);
    assert_eq!(last_error(), "null output pointer");
}

#[test]
fn truncated_error_message() {
    let mut out = 0u64;
    unsafe { gelfond_digit_sum(10, 0, &mut out) };
    let mut buf = [0 as std::ffi::c_char; 4];
    let n = unsafe { gelfond_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 3);
    assert_eq!(buf[3], 0);
}

#[test]
fn cube_symbols() {
    let prefix: String = (0..28).map(|n| char::from(b'0' + gelfond_thue_morse_cube(n))).collect();
    assert_eq!(prefix, "0110100010000100100000010110");
    let mut count = 0u64;
    assert_eq!(unsafe { gelfond_count_cube_zeros(8, &mut count) }, GelfondStatus::Ok);
    assert_eq!(count, 5);
    assert_eq!(unsafe { gelfond_count_cube_zeros(u64::MAX, &mut count) }, GelfondStatus::GuardExceeded);
}

#[test]
fn s0_and_gowers() {
    let mut z = [0.0f64; 2];
    assert_eq!(unsafe { gelfond_s0(0, 0.3, &mut z) }, GelfondStatus::Ok);
    assert!((z[0] - 1.0).abs() < 1e-15 && z[1].abs() < 1e-15);
    let mut g = 0.0;
    assert_eq!(unsafe { gelfond_gowers_norm(0, 2, &mut g) }, GelfondStatus::Ok);
    assert_eq!(g, 1.0);
    assert_eq!(unsafe { gelfond_gowers_norm(99, 2, &mut g) }, GelfondStatus::GuardExceeded);
}

#[test]
fn schedule_handle_lifecycle() {
    let mut h: *mut GelfondSchedule = ptr::null_mut();
    assert_eq!(unsafe { gelfond_schedule_new(1_000_000_000, 1, 15000, &mut h) }, GelfondStatus::Ok);
    assert!(!h.is_null());
    let mut v = 0u64;
    assert_eq!(unsafe { gelfond_schedule_get(h, GelfondScheduleField::Lambda, &mut v) }, GelfondStatus::Ok);
    assert_eq!(v % 3, 0);
    let mut tau = 0u64;
    unsafe { gelfond_schedule_get(h, GelfondScheduleField::Tau, &mut tau) };
    assert_eq!(3 * tau, v);
    let mut viol = usize::MAX;
    assert_eq!(unsafe { gelfond_schedule_violations(h, &mut viol) }, GelfondStatus::Ok);
    assert_eq!(viol, 0);
    let mut e = 0.0;
    assert_eq!(unsafe { gelfond_schedule_budget_log2(h, 4, &mut e) }, GelfondStatus::Ok);
    assert!(e > 0.0);
    assert_eq!(unsafe { gelfond_schedule_budget_log2(h, 11, &mut e) }, GelfondStatus::Ok);
    assert!(e.is_nan());
    assert_eq!(unsafe { gelfond_schedule_budget_log2(h, 15, &mut e) }, GelfondStatus::InvalidArgument);
    unsafe { gelfond_schedule_free(h) };
}

#[test]
fn schedule_failures() {
    let mut h: *mut GelfondSchedule = ptr::null_mut();
    assert_eq!(unsafe { gelfond_schedule_new(100, 0, 1, &mut h) }, GelfondStatus::InvalidArgument);
    assert!(h.is_null());
    assert_eq!(unsafe { gelfond_schedule_new(100, 1, 15000, &mut h) }, GelfondStatus::Ok);
    let mut e = 0.0;
    assert_eq!(unsafe { gelfond_schedule_budget_log2(h, 0, &mut e) }, GelfondStatus::Infeasible);
    unsafe { gelfond_schedule_free(h) };
    let mut v = 0u64;
    assert_eq!(
        unsafe { gelfond_schedule_get(ptr::null(), GelfondScheduleField::Nu, &mut v) },
        GelfondStatus::NullPointer
    );
    unsafe { gelfond_schedule_free(ptr::null_mut()) };
}
