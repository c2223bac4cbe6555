//! Round-trip properties of the text formats.

use hankel_nuclear::formats::{
    antidiag_csv, heatmap_text, parse_heatmap, parse_pinned, parse_sweep_csv, sweep_csv,
};
use hankel_nuclear_core::experiments::{DiffGrid, SweepRecord};
use hankel_nuclear_core::hankel::HankelSpec;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        prop::num::f64::NORMAL,
        prop::num::f64::SUBNORMAL,
        Just(0.0),
        Just(-0.0),
        -1.0f64..1.0,
    ]
}

fn record() -> impl Strategy<Value = SweepRecord> {
    (
        finite(),
        finite(),
        finite(),
        finite(),
        finite(),
        any::<bool>(),
        any::<usize>(),
    )
        .prop_map(
            |(h1, h2, nuc_g0, nuc_ghat, diff, recovered, iterations)| SweepRecord {
                h1,
                h2,
                nuc_g0,
                nuc_ghat,
                diff,
                recovered,
                iterations,
            },
        )
}

fn same_bits(a: &SweepRecord, b: &SweepRecord) -> bool {
    [a.h1, a.h2, a.nuc_g0, a.nuc_ghat, a.diff]
        .iter()
        .zip([b.h1, b.h2, b.nuc_g0, b.nuc_ghat, b.diff])
        .all(|(x, y)| x.to_bits() == y.to_bits())
        && a.recovered == b.recovered
        && a.iterations == b.iterations
}

proptest! {
    #[test]
    fn sweep_csv_round_trips_bit_exact(records in prop::collection::vec(record(), 1..40)) {
        let text = sweep_csv(&records).unwrap();
        prop_assert_eq!(text.lines().count(), records.len() + 1);
        let back = parse_sweep_csv(&text).unwrap();
        prop_assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            prop_assert!(same_bits(a, b), "{:?} vs {:?}", a, b);
        }
        prop_assert_eq!(sweep_csv(&back).unwrap(), text);
    }

    #[test]
    fn heatmap_round_trips(
        labels in prop::collection::btree_set(-999i32..999, 1..8),
        seed_cells in prop::collection::vec(finite(), 64),
    ) {
        let hs: Vec<f64> = labels.into_iter().map(|l| f64::from(l) / 1000.0).collect();
        let m = hs.len();
        let grid = DiffGrid {
            rows: hs.clone(),
            cols: hs,
            cells: seed_cells[..m * m].to_vec(),
        };
        prop_assert_eq!(parse_heatmap(&heatmap_text(&grid)).unwrap(), grid);
    }

    #[test]
    fn pinned_values_round_trip(values in prop::collection::vec(-1e6f64..1e6, 1..20)) {
        let text: String = values.iter().map(|v| format!("{v:e}  # entry\n")).collect();
        prop_assert_eq!(parse_pinned(&format!("# header\n\n{text}")).unwrap(), values);
    }
}

#[test]
fn antidiag_csv_lists_every_entry() {
    let spec = HankelSpec::new(3, vec![1.0, 0.5, 0.25, 0.125, 0.0625]).unwrap();
    assert_eq!(
        antidiag_csv(&spec),
        "k,value\n\
         0,1.0000000000000000e0\n\
         1,5.0000000000000000e-1\n\
         2,2.5000000000000000e-1\n\
         3,1.2500000000000000e-1\n\
         4,6.2500000000000000e-2\n"
    );
}

#[test]
fn csv_header_is_checked() {
    assert!(parse_sweep_csv("h1,h2\n0.1,0.2\n").is_err());
    let err = parse_sweep_csv(
        "h1,h2,nuc_g0,nuc_ghat,diff,recovered,iterations\n0.1,0.1,1,1,0,true,3\n0.1,0.2,1,1,0,maybe,3\n",
    )
    .unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
}
