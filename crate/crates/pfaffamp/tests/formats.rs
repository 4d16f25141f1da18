use pfaffamp::formats::{load_state, save_state, StateFile};
use pfaffamp_core::state::random_skew;
use pfaffamp_core::{Complex64, GaussianPureState};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn save_load_is_bit_exact(l in 0usize..=12, seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let state = GaussianPureState::new(random_skew(l, seed, scale));
        save_state(&path, &state).unwrap();
        let back = load_state(&path).unwrap();
        prop_assert_eq!(back.r_matrix(), state.r_matrix());
        prop_assert_eq!(back.norm().to_bits(), state.norm().to_bits());
    }
}

#[test]
fn missing_entries_are_zero() {
    let f: StateFile = serde_json::from_str(r#"{"kind":"matrix","L":4,"entries":[[1,3,0.5,-0.25]]}"#).unwrap();
    let s = f.to_state().unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let want = match (i, j) {
                (1, 3) => Complex64::new(0.5, -0.25),
                (3, 1) => Complex64::new(-0.5, 0.25),
                _ => Complex64::new(0.0, 0.0),
            };
            assert_eq!(s.r_matrix().get(i, j), want);
        }
    }
}

#[test]
fn malformed_files_are_rejected() {
    for text in [
        r#"{"kind":"matrix","L":2,"entries":[[0,2,1.0,0.0]]}"#,
        r#"{"kind":"matrix","L":2,"entries":[[0,0,1.0,0.0]]}"#,
        r#"{"kind":"matrix","L":2,"entries":[[0,1,1.0,0.0],[0,1,1.0,0.0]]}"#,
        r#"{"kind":"list","L":2,"entries":[]}"#,
    ] {
        let f: StateFile = serde_json::from_str(text).unwrap();
        assert!(f.to_state().is_err(), "{text}");
    }
    assert!(serde_json::from_str::<StateFile>(r#"{"kind":"matrix","L":2}"#).is_err());
}

#[test]
fn non_vacuum_base_is_converted() {
    let f: StateFile =
        serde_json::from_str(r#"{"kind":"matrix","L":4,"entries":[[0,1,0.5,0.0],[2,3,0.25,0.0],[0,2,0.1,0.2]],"base":"1100"}"#).unwrap();
    let s = f.to_state().unwrap();
    assert!(s.is_vacuum_based());
}
