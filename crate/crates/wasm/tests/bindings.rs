use opfam::spectra::PointClass;
use opfam_wasm::{class_count, local_grid, roots, spectrum_grid};

const DIAG: &str = "dim 2\nconst\n2\n1 0\n0 -1\n";

#[test]
fn diagonal_family_spectrum() {
    let g = spectrum_grid(DIAG, 16, "-2:2:-2:2", "").unwrap();
    assert_eq!((g.nx(), g.ny()), (16, 16));
    assert_eq!(g.classes().len(), 256);
    let s = class_count(&g, PointClass::Spectrum);
    assert!((2..=8).contains(&s), "{s} spectrum cells");
}

#[test]
fn local_grid_sees_one_eigenvalue() {
    let g = local_grid(DIAG, "2\n1 0\n", 16, "-2:2:-2:2", "").unwrap();
    let idx: Vec<usize> = g
        .classes()
        .char_indices()
        .filter(|&(_, c)| c == 'S')
        .map(|(k, _)| k)
        .collect();
    assert!(!idx.is_empty());
    let rect = g.rect();
    let dx = (rect[1] - rect[0]) / g.nx() as f64;
    for k in idx {
        let re = rect[0] + (k % g.nx()) as f64 * dx + dx / 2.0;
        assert!(re > 0.0, "cell {k} at re {re}");
    }
}

#[test]
fn bracket_roots_of_distinct_diagonals() {
    let b = roots("2\n0 0\n0 1\n", "2\n0 0\n0 2\n", 8).unwrap();
    assert_eq!(b.forward().len(), 8);
    assert!(b.forward().iter().chain(&b.backward()).all(|r| (r - 1.0).abs() < 1e-9));
    assert_eq!(b.verdict(), "not-equivalent");
}

#[test]
fn bad_input_is_reported() {
    assert!(spectrum_grid("dim x", 16, "", "").unwrap_err().starts_with("family"));
    assert!(spectrum_grid(DIAG, 4, "", "").is_err());
}
