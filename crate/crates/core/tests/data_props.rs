use ndarray::Array2;
use proptest::prelude::*;

use resample_kernel::data::{load_csv, load_libsvm, standardize, write_csv, Dataset, LabelColumn};
use resample_kernel::Error;

fn first_appearance(labels: &[usize]) -> Vec<usize> {
    let mut seen = Vec::new();
    labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(p) => p,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect()
}

fn dataset(values: Vec<f64>, d: usize, classes: Option<Vec<usize>>) -> Dataset {
    let n = values.len() / d;
    let labels = classes.map(|c| {
        // Contiguous ids: remap the raw draws in order of first appearance.
        first_appearance(&c[..n])
    });
    Dataset::new("p", Array2::from_shape_vec((n, d), values).unwrap(), labels).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip(d in 1usize..5, rows in 2usize..12, seed_vals in prop::collection::vec(-1e6f64..1e6, 60),
                      classes in prop::collection::vec(0usize..4, 12)) {
        let values: Vec<f64> = seed_vals.iter().cycle().take(rows * d).copied().collect();
        let ds = dataset(values, d, Some(classes));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        write_csv(&ds, &path).unwrap();
        let back = load_csv(&path, LabelColumn::Last, false).unwrap();
        prop_assert_eq!(back.features(), ds.features());
        prop_assert_eq!(back.labels().unwrap(), &first_appearance(ds.labels().unwrap())[..]);
    }

    #[test]
    fn standardize_is_idempotent(d in 1usize..5, rows in 2usize..15, vals in prop::collection::vec(-50f64..50.0, 75)) {
        let values: Vec<f64> = vals.iter().cycle().take(rows * d).copied().collect();
        let ds = dataset(values, d, None);
        let once = standardize(&ds);
        let twice = standardize(&once);
        for (a, b) in once.features().iter().zip(twice.features()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn string_labels_in_first_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    std::fs::write(&path, "id,x,y\nB,1,2\nA,3,4\nB,5,6\n").unwrap();
    let ds = load_csv(&path, LabelColumn::First, true).unwrap();
    assert_eq!(ds.labels().unwrap(), &[0, 1, 0]);
    assert_eq!(ds.d(), 2);
}

#[test]
fn libsvm_format_cases() {
    let dir = tempfile::tempdir().unwrap();
    let ok = dir.path().join("ok.svm");
    std::fs::write(&ok, "1 1:0.5 3:2.0\n2 2:1.0\n").unwrap();
    let ds = load_libsvm(&ok).unwrap();
    assert_eq!(ds.features(), &ndarray::array![[0.5, 0.0, 2.0], [0.0, 1.0, 0.0]]);
    assert_eq!(ds.labels().unwrap(), &[0, 1]);

    let bad = dir.path().join("bad.svm");
    std::fs::write(&bad, "1 3:1 2:1\n2 1:1\n").unwrap();
    assert!(matches!(load_libsvm(&bad), Err(Error::Parse { line: 1, .. })));

    let empty = dir.path().join("empty.svm");
    std::fs::write(&empty, "").unwrap();
    assert!(matches!(load_libsvm(&empty), Err(Error::InvalidDataset(_))));
}
