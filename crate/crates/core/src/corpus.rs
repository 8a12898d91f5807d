//! Reference substitutions used in tests, benchmarks and documentation.

use crate::words::{Alphabet, Morphism};

fn rules(r: &[(&str, &str)]) -> Morphism {
    Morphism::from_char_rules(r).expect("corpus rules are well formed")
}

/// `0 -> 01, 1 -> 0`.
pub fn fibonacci() -> Morphism {
    rules(&[("0", "01"), ("1", "0")])
}

/// `0 -> 01, 1 -> 10`.
pub fn thue_morse() -> Morphism {
    rules(&[("0", "01"), ("1", "10")])
}

/// `0 -> 01, 1 -> 00`.
pub fn period_doubling() -> Morphism {
    rules(&[("0", "01"), ("1", "00")])
}

/// `0 -> 1000, 1 -> 1010`, a Toeplitz substitution.
pub fn toeplitz() -> Morphism {
    rules(&[("0", "1000"), ("1", "1010")])
}

/// `0 -> 01, 1 -> 0110`: left-proper, spectrum `{3^m, 2·3^m}`.
pub fn proper_01_0110() -> Morphism {
    rules(&[("0", "01"), ("1", "0110")])
}

/// Length 4, height 3.
pub fn height_three_length_four() -> Morphism {
    rules(&[
        ("0", "0213"),
        ("1", "1341"),
        ("2", "4104"),
        ("3", "0413"),
        ("4", "2134"),
    ])
}

/// Left-proper six-letter substitution with trivial spectrum.
pub fn proper_six_letter() -> Morphism {
    rules(&[
        ("1", "6134242"),
        ("2", "61342426134242"),
        ("3", "6134261356135"),
        ("4", "613426135"),
        ("5", "6134261356135"),
        ("6", "613426135"),
    ])
}

/// `0 -> 0120, 1 -> 121, 2 -> 200`: primitive, neither proper nor of
/// constant length.
pub fn open_three_letter() -> Morphism {
    rules(&[("0", "0120"), ("1", "121"), ("2", "200")])
}

/// Length 3, height 2, no constant arithmetic subsequence.
pub fn length_three_height_two() -> Morphism {
    rules(&[("0", "013"), ("1", "102"), ("2", "231"), ("3", "320")])
}

/// Length 5, height 2; `x_{1+10n} = 1`.
pub fn length_five_height_two() -> Morphism {
    rules(&[("0", "01230"), ("1", "12301"), ("2", "21012"), ("3", "30123")])
}

/// Length 2, height 3, unbounded essential periods.
pub fn length_two_height_three() -> Morphism {
    rules(&[("0", "01"), ("1", "20"), ("2", "13"), ("3", "12")])
}

/// `0 -> 01, 1 -> 01`, with periodic fixed point `0101...`.
pub fn alternating() -> Morphism {
    rules(&[("0", "01"), ("1", "01")])
}

/// `0 -> 10, 1 -> 01`, which has no one-sided seed.
pub fn rotation_pair() -> Morphism {
    rules(&[("0", "10"), ("1", "01")])
}

/// `0 -> a, 1 -> b, 2 -> c, 3 -> a` on the digits `0..4`.
pub fn four_to_three_coding() -> Morphism {
    Morphism::coding_from_pairs(
        &Alphabet::digits(4),
        &[("0", "a"), ("1", "b"), ("2", "c"), ("3", "a")],
    )
    .expect("coding is well formed")
}

/// The primitive constant-length substitutions above.
pub fn constant_length() -> Vec<Morphism> {
    vec![
        thue_morse(),
        period_doubling(),
        toeplitz(),
        height_three_length_four(),
        length_three_height_two(),
        length_five_height_two(),
        length_two_height_three(),
        alternating(),
    ]
}
