//! Published reference values, stored as decimal strings so they can be
//! parsed at any working precision.

/// `e − li(e)`, the first Stieltjes approximation error.
pub const EPSILON_ONE: &str = "0.823164012103108479";

/// Half-width of the enclosure placed around [`EPSILON_ONE`]. The literal
/// is a truncation of the true value, which exceeds it by about `9e-19`.
pub const EPSILON_ONE_RADIUS: &str = "1e-18";

/// Euler–Mascheroni constant to 90 digits (about 300 bits).
pub const EULER_GAMMA: &str =
    "0.577215664901532860606512090082402431042159335939923598805767234884867726777664670936947063";

/// Rows of the published bounds on `ε_n`: `(n, lower, upper)`.
pub const EPSILON_TABLE: [(u64, &str, &str); 9] = [
    (1, "0.8231640121031085", "0.8231640121031085"),
    (2, "0.5875573613276722", "0.5875580750651299"),
    (5, "0.3730720858991260", "0.3730734415998585"),
    (10, "0.2640420034092351", "0.2640436853557264"),
    (50, "0.1181488169851442", "0.1181509360842480"),
    (100, "0.0835484190371273", "0.0835506419001847"),
    (200, "0.0590789874390479", "0.0590812836969822"),
    (500, "0.0373650103755665", "0.0373673717698551"),
    (1000, "0.0264208377545706", "0.0264232319801236"),
];

/// Rows of the published Riemann lower sums and local errors for `Δ_k`
/// at `M = 10^6`: `(k, S_lower, δ_k)`.
pub const DELTA_TABLE: [(u64, &str, &str); 8] = [
    (2, "0.23560593703797863551763", "7.1373745771830562e-7"),
    (5, "0.04381091597775917112489", "1.3102433738077051e-7"),
    (10, "0.01425767373640696514259", "4.2683260542898670e-8"),
    (50, "0.00119922512965914230751", "3.5959328273767800e-9"),
    (100, "0.00042085723494096768070", "1.2622623535039300e-9"),
    (200, "0.00014824785827815327942", "4.4468903335579000e-10"),
    (500, "0.00003742143750172932936", "1.1225888313116000e-10"),
    (1000, "0.00001322076646303534214", "3.9661368685840000e-11"),
];

/// Rows of the published constants: `(s, κ_lo, τ_lo, κ_hi, τ_hi)`.
pub const KAPPA_TAU_TABLE: [(u64, &str, &str, &str, &str); 8] = [
    (
        2,
        "1.0425469052",
        "-0.0283980643",
        "0.9777512372",
        "0.0098850932",
    ),
    (
        5,
        "1.0168063304",
        "-0.0068739508",
        "0.9914303730",
        "0.0026095394",
    ),
    (
        10,
        "1.0083681522",
        "-0.0023908648",
        "0.9957734200",
        "0.0009386202",
    ),
    (
        50,
        "1.0016680563",
        "-0.0002118766",
        "0.9991642430",
        "0.0000861021",
    ),
    (
        100,
        "1.0008336807",
        "-0.0000755144",
        "0.9995827265",
        "0.0000312311",
    ),
    (
        200,
        "1.0004167535",
        "-0.0000274301",
        "0.9997915149",
        "0.0000118063",
    ),
    (
        500,
        "1.0001666806",
        "-0.0000078260",
        "0.9999166424",
        "0.0000038785",
    ),
    (
        1000,
        "1.0000833368",
        "-0.0000035462",
        "0.9999583273",
        "0.0000021511",
    ),
];

/// Rows of the published gaps between Riemann and closed-form bounds on
/// `Δ_k`: `(k, S_lower − Δ_lower, Δ_upper − S_upper)`.
pub const SIMPLE_GAP_TABLE: [(u64, &str, &str); 8] = [
    (2, "0.09483462840553488759632", "0.21847075294803794398568"),
    (5, "0.00684724231125105609053", "0.00950973357118596596127"),
    (10, "0.00110872085707076906136", "0.00135923160248245002146"),
    (50, "0.00001859700335527414601", "0.00002083681129835270561"),
    (
        100,
        "0.00000326194418089222450",
        "0.00000361586030275616978",
    ),
    (
        200,
        "0.00000057431975072027067",
        "0.00000063326519249957101",
    ),
    (
        500,
        "0.00000005795042826999713",
        "0.00000006369861681718348",
    ),
    (
        1000,
        "0.00000001022656457829113",
        "0.00000001123003124923371",
    ),
];

/// `Σ δ_k` for `k = 2..=1000` at `M = 10^6`.
pub const ACCUMULATED_DELTA: &str = "2.39422555282981724e-6";

/// Offsets of the explicit large-`x` envelope on `ε(x)`.
pub const ENVELOPE_LOWER_OFFSET: &str = "0.0000035462";
pub const ENVELOPE_UPPER_OFFSET: &str = "0.0000021511";

/// Largest index covered by the tabulated telescoped bounds; beyond it the
/// explicit envelope is used.
pub const TELESCOPE_LIMIT: u64 = 1000;

/// Subdivision count used for the published tables.
pub const TABLE_M: u64 = 1_000_000;

/// Rows indexed in the published tables.
pub const TABLE_ROWS: [u64; 8] = [2, 5, 10, 50, 100, 200, 500, 1000];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_consistently_indexed() {
        let delta: Vec<u64> = DELTA_TABLE.iter().map(|r| r.0).collect();
        let kappa: Vec<u64> = KAPPA_TAU_TABLE.iter().map(|r| r.0).collect();
        let gaps: Vec<u64> = SIMPLE_GAP_TABLE.iter().map(|r| r.0).collect();
        let eps: Vec<u64> = EPSILON_TABLE.iter().skip(1).map(|r| r.0).collect();
        assert_eq!(delta, TABLE_ROWS);
        assert_eq!(kappa, TABLE_ROWS);
        assert_eq!(gaps, TABLE_ROWS);
        assert_eq!(eps, TABLE_ROWS);
    }

    #[test]
    fn envelope_offsets_match_last_kappa_row() {
        let last = KAPPA_TAU_TABLE[7];
        assert_eq!(last.2.trim_start_matches('-'), ENVELOPE_LOWER_OFFSET);
        assert_eq!(last.4, ENVELOPE_UPPER_OFFSET);
    }
}
