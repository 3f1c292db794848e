//! Published result tables, typed in by hand.

/// Speaker, ground truth, our estimate, our error %, baseline estimate,
/// baseline error %. Inches.
pub const GEOMETRY_ROWS: [(&str, f64, f64, f64, f64, f64); 4] = [
    ("S0", 36.70, 34.16, 6.92, 19.74, 46.21),
    ("S1", 35.59, 41.27, 15.96, 24.32, 31.67),
    ("S2", 42.12, 43.88, 4.18, 27.79, 34.02),
    ("S3", 34.99, 29.29, 16.29, 27.79, 20.58),
];
pub const GEOMETRY_MEAN_ERROR: (f64, f64) = (10.84, 33.12);

/// Keyword, then sensitivity and specificity for our system and for the
/// reference system.
pub const KEYWORD_ROWS: [(&str, f64, f64, f64, f64); 9] = [
    ("uno", 0.50, 0.95, 0.13, 1.00),
    ("dos", 0.24, 0.91, 0.06, 1.00),
    ("tres", 0.63, 0.92, 0.00, 1.00),
    ("cuatro", 0.30, 0.99, 0.00, 1.00),
    ("cinco", 0.25, 0.99, 0.23, 1.00),
    ("cero", 0.36, 0.93, 0.00, 1.00),
    ("computadora", 0.25, 0.99, 0.25, 1.00),
    ("numero", 0.27, 0.97, 0.45, 1.00),
    ("Others", 0.65, 0.67, 1.00, 0.13),
];
/// Published averages: ours (sens, spec), reference (sens, spec).
pub const KEYWORD_AVERAGES: [f64; 4] = [0.38, 0.92, 0.24, 0.90];

/// Confusion matrices (row = true class, column = predicted, both in
/// `KEYWORD_ROWS` order) whose one-vs-rest rates round to the published
/// rows. Found offline by a small integer search; any matrix with those
/// rounded rates would do.
pub const OURS_CONFUSION: [[usize; 9]; 9] = [
    [16, 0, 12, 0, 0, 0, 0, 2, 2],
    [2, 13, 1, 0, 0, 0, 0, 2, 36],
    [2, 0, 19, 2, 1, 6, 0, 0, 0],
    [5, 0, 1, 9, 3, 1, 1, 0, 10],
    [1, 0, 6, 2, 8, 4, 0, 1, 10],
    [1, 0, 6, 0, 0, 9, 3, 0, 6],
    [0, 0, 1, 0, 0, 7, 8, 6, 10],
    [5, 0, 0, 0, 0, 5, 0, 10, 17],
    [0, 28, 0, 0, 0, 1, 0, 0, 54],
];
pub const REFERENCE_CONFUSION: [[usize; 9]; 9] = [
    [6, 0, 0, 0, 0, 0, 0, 0, 40],
    [0, 3, 0, 0, 0, 0, 0, 0, 46],
    [0, 0, 0, 0, 0, 0, 0, 0, 59],
    [0, 0, 0, 0, 0, 0, 0, 0, 46],
    [0, 0, 0, 0, 11, 0, 0, 0, 36],
    [0, 0, 0, 0, 0, 0, 0, 0, 34],
    [0, 0, 0, 0, 0, 0, 6, 0, 18],
    [0, 0, 0, 0, 0, 0, 0, 17, 21],
    [0, 0, 0, 0, 0, 0, 0, 0, 89],
];

pub fn keyword_classes() -> Vec<String> {
    KEYWORD_ROWS.iter().map(|r| r.0.to_string()).collect()
}

/// Expands a confusion matrix into (predicted, true) decisions, row-major.
pub fn decisions_from(matrix: &[[usize; 9]; 9]) -> Vec<(String, String)> {
    let classes = keyword_classes();
    let mut out = Vec::new();
    for (t, row) in matrix.iter().enumerate() {
        for (p, &n) in row.iter().enumerate() {
            for _ in 0..n {
                out.push((classes[p].clone(), classes[t].clone()));
            }
        }
    }
    out
}

/// Rounds to two decimals the way the table prints.
pub fn round2(x: f64) -> f64 {
    (x * 100.0 + 1e-9).round() / 100.0
}
