#![no_main]

use libfuzzer_sys::fuzz_target;

// Tabulated-tail construction interpolates and integrates user-supplied
// grids; arbitrary (r, g) tables must either validate or be rejected, never
// panic, and accepted tables must evaluate their functionals without
// panicking.
fuzz_target!(|data: &[u8]| {
    if data.len() < 16 {
        return;
    }
    let mut grid = Vec::new();
    for chunk in data.chunks_exact(16).take(64) {
        let r = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
        let g = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
        grid.push((r, g));
    }
    let hint = -1.5;
    if let Ok(measure) = simma::noise::LevyMeasure::tabulated(grid, hint) {
        let _ = measure.tail_mass(1.0);
        let _ = measure.tail_first_moment(0.5);
        let _ = measure.truncated_second_moment(2.0);
        let _ = measure.xi(1.0);
        let _ = measure.infinite_variation_at_origin();
    }
});
