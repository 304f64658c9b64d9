use std::ffi::{CStr, CString};
use std::ptr;

use tokenprune_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(tp_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn default_plan_matches_the_reference_quotas() {
    unsafe {
        let cfg = tp_config_new_default();
        let (w, h) = ([336u32; 4], [616u32; 4]);
        let mut plan = ptr::null_mut();
        assert_eq!(tp_plan_history(cfg, w.as_ptr(), h.as_ptr(), 4, &mut plan), TpStatus::Ok);
        assert_eq!(tp_plan_frame_count(plan), 4);
        assert_eq!(tp_plan_budget(plan), 105);

        let mut quotas = Vec::new();
        for i in 0..4 {
            let mut f = std::mem::zeroed::<TpFramePlan>();
            assert_eq!(tp_plan_frame(plan, i, &mut f), TpStatus::Ok);
            assert_eq!(f.lag, i + 1);
            assert!(f.realized_tokens <= f.quota);
            assert_eq!(f.target_width % 28, 0);
            quotas.push(f.quota);
        }
        assert_eq!(quotas, [44, 32, 20, 9]);

        let mut f = std::mem::zeroed::<TpFramePlan>();
        assert_eq!(tp_plan_frame(plan, 4, &mut f), TpStatus::OutOfRange);
        assert!(last_error().contains("frame 4"));

        let json = tp_plan_to_json(plan);
        assert!(CStr::from_ptr(json).to_str().unwrap().contains("\"budget_total\": 105"));
        tp_string_free(json);
        tp_plan_free(plan);
        tp_config_free(cfg);
    }
}

#[test]
fn status_codes_follow_the_error_class() {
    unsafe {
        let mut cfg = ptr::null_mut();
        let bad = CString::new(r#"{"mu": 2.0}"#).unwrap();
        assert_eq!(tp_config_from_json(bad.as_ptr(), &mut cfg), TpStatus::InvalidConfig);
        assert!(cfg.is_null());
        assert!(!last_error().is_empty());

        let good = CString::new(r#"{"lambda": 0.5}"#).unwrap();
        assert_eq!(tp_config_from_json(good.as_ptr(), &mut cfg), TpStatus::Ok);
        assert_eq!(last_error(), "");

        let dims = [28u32; 4];
        let mut plan = ptr::null_mut();
        assert_eq!(tp_plan_history(cfg, dims.as_ptr(), dims.as_ptr(), 4, &mut plan), TpStatus::Domain);
        assert!(plan.is_null());

        assert_eq!(tp_config_set_ratios(cfg, 0.3, 0.2, 0.0, 0.5), TpStatus::InvalidConfig);
        assert_eq!(tp_config_set_history_len(cfg, 0), TpStatus::InvalidConfig);
        let json = tp_config_to_json(cfg);
        assert!(CStr::from_ptr(json).to_str().unwrap().contains("\"lambda\": 0.5"));
        tp_string_free(json);

        assert_eq!(tp_plan_history(ptr::null(), dims.as_ptr(), dims.as_ptr(), 4, &mut plan), TpStatus::NullPointer);
        assert_eq!(tp_plan_history(cfg, ptr::null(), dims.as_ptr(), 4, &mut plan), TpStatus::NullPointer);
        tp_config_free(cfg);
    }
}

#[test]
fn prune_returns_budgeted_strata() {
    unsafe {
        let cfg = tp_config_new_default();
        assert_eq!(tp_config_set_ratios(cfg, 0.3, 0.2, 0.5, 0.4), TpStatus::Ok);
        let (rows, cols) = (6usize, 5usize);
        let n = rows * cols;
        let scores: Vec<f64> = (0..n).map(|i| (i * 7 % 11) as f64).collect();
        let fg: Vec<u8> = (0..n).map(|i| (i % 3 == 0) as u8).collect();

        let mut b = std::mem::zeroed::<TpStratumBudget>();
        assert_eq!(tp_stratum_budgets(n, 10, 0.5, 0.4, &mut b), TpStatus::Ok);
        assert_eq!((b.k_total, b.k_fg, b.k_bg, b.k_res), (15, 5, 4, 6));

        let mut sel = ptr::null_mut();
        assert_eq!(tp_prune(cfg, rows, cols, scores.as_ptr(), fg.as_ptr(), &mut sel), TpStatus::Ok);
        assert_eq!(tp_selection_len(sel), 15);

        let mut strata = vec![TpStratum::Pruned; n];
        assert_eq!(tp_selection_strata(sel, strata.as_mut_ptr(), n), TpStatus::Ok);
        let count = |s| strata.iter().filter(|&&x| x == s).count();
        assert_eq!(count(TpStratum::Foreground), 5);
        assert_eq!(count(TpStratum::Background), 4);
        assert_eq!(count(TpStratum::Uniform), 6);

        let mut prev = None;
        for i in 0..15 {
            let (mut t, mut s) = (0usize, TpStratum::Pruned);
            assert_eq!(tp_selection_get(sel, i, &mut t, &mut s), TpStatus::Ok);
            assert_eq!(strata[t], s);
            assert!(prev.is_none_or(|p| p < t));
            prev = Some(t);
        }
        assert_eq!(tp_selection_strata(sel, strata.as_mut_ptr(), n - 1), TpStatus::OutOfRange);
        assert_eq!(tp_prune(cfg, rows, cols, scores.as_ptr(), fg.as_ptr(), ptr::null_mut()), TpStatus::NullPointer);
        tp_selection_free(sel);
        tp_config_free(cfg);
    }
}

#[test]
fn partition_of_a_flat_frame_is_empty() {
    unsafe {
        let cfg = tp_config_new_default();
        let (w, h) = (112u32, 84u32);
        let pixels = vec![200u8; (w * h * 3) as usize];
        let (mut rows, mut cols) = (0, 0);
        let mut mask = vec![9u8; 12];
        let st = tp_partition(cfg, pixels.as_ptr(), w, h, 3, mask.as_mut_ptr(), mask.len(), &mut rows, &mut cols);
        assert_eq!(st, TpStatus::Ok);
        assert_eq!((rows, cols), (3, 4));
        assert!(mask.iter().all(|&m| m == 0));

        let st = tp_partition(cfg, pixels.as_ptr(), w, h, 3, mask.as_mut_ptr(), 5, &mut rows, &mut cols);
        assert_eq!(st, TpStatus::OutOfRange);
        let st = tp_partition(cfg, pixels.as_ptr(), w, h, 2, mask.as_mut_ptr(), 12, &mut rows, &mut cols);
        assert_eq!(st, TpStatus::InvalidInput);
        tp_config_free(cfg);
    }
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        tp_config_free(ptr::null_mut());
        tp_plan_free(ptr::null_mut());
        tp_selection_free(ptr::null_mut());
        tp_string_free(ptr::null_mut());
        assert_eq!(tp_plan_budget(ptr::null()), 0);
        assert_eq!(tp_selection_len(ptr::null()), 0);
        assert!(tp_config_to_json(ptr::null()).is_null());
    }
    let v = unsafe { CStr::from_ptr(tp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
