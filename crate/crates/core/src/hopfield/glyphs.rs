//! Built-in 8x8 letter glyphs used by the associative-memory examples.
//!
//! Seven letters spelling KURAMOT: the first three (K, U, R) form the
//! originally stored set written into the spatial coupling, the last four
//! (A, M, O, T) the later set written into the attention coupling.

use super::Pattern;
use crate::error::{Error, Result};

/// Letters of the originally stored set, in order.
pub const OLD_LETTERS: [char; 3] = ['K', 'U', 'R'];
/// Letters of the later (attention-side) set, in order.
pub const NEW_LETTERS: [char; 4] = ['A', 'M', 'O', 'T'];

const K: [&str; 8] = [
    "##..##..",
    "##.##...",
    "####....",
    "###.....",
    "####....",
    "##.##...",
    "##..##..",
    "##...##.",
];

const U: [&str; 8] = [
    "#.....#.",
    "#.....#.",
    "#.....#.",
    "#.....#.",
    "#.....#.",
    "#.....#.",
    "##...##.",
    ".#####..",
];

const R: [&str; 8] = [
    "######..",
    "##...##.",
    "##...##.",
    "######..",
    "##.##...",
    "##..##..",
    "##...##.",
    "##....##",
];

const A: [&str; 8] = [
    "...##...",
    "..####..",
    ".##..##.",
    ".##..##.",
    ".######.",
    ".##..##.",
    ".##..##.",
    ".##..##.",
];

const M: [&str; 8] = [
    "##....##",
    "###..###",
    "########",
    "##.##.##",
    "##....##",
    "##....##",
    "##....##",
    "##....##",
];

const O: [&str; 8] = [
    "..####..",
    ".######.",
    "##....##",
    "##....##",
    "##....##",
    "##....##",
    ".######.",
    "..####..",
];

const T: [&str; 8] = [
    "########",
    "########",
    "...##...",
    "...##...",
    "...##...",
    "...##...",
    "..####..",
    ".######.",
];

fn rows(letter: char) -> Option<&'static [&'static str; 8]> {
    match letter.to_ascii_uppercase() {
        'K' => Some(&K),
        'U' => Some(&U),
        'R' => Some(&R),
        'A' => Some(&A),
        'M' => Some(&M),
        'O' => Some(&O),
        'T' => Some(&T),
        _ => None,
    }
}

/// The 64-site pattern for one of the seven built-in letters.
pub fn pattern(letter: char) -> Result<Pattern> {
    let rows = rows(letter).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "no built-in glyph {letter:?}; available: K U R A M O T"
        ))
    })?;
    Pattern::from_bitmap(&rows.join("\n"))
}

/// All letters with a built-in glyph, stored set first.
pub fn available() -> Vec<char> {
    OLD_LETTERS.iter().chain(NEW_LETTERS.iter()).copied().collect()
}

/// The originally stored patterns (K, U, R).
pub fn old_set() -> Vec<Pattern> {
    OLD_LETTERS.iter().map(|&l| pattern(l).unwrap()).collect()
}

/// The later patterns carried by attention (A, M, O, T).
pub fn new_set() -> Vec<Pattern> {
    NEW_LETTERS.iter().map(|&l| pattern(l).unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glyphs_are_8x8_and_round_trip() {
        for l in available() {
            let p = pattern(l).unwrap();
            assert_eq!(p.len(), 64);
            let rendered = p.render(8);
            assert_eq!(Pattern::from_bitmap(&rendered).unwrap(), p);
        }
    }

    #[test]
    fn sets_are_distinct_and_modestly_correlated() {
        let all: Vec<_> = available().iter().map(|&l| pattern(l).unwrap()).collect();
        for i in 0..all.len() {
            for j in 0..i {
                assert!(all[i] != all[j]);
                // Hebbian storage needs limited crosstalk.
                assert!(all[i].overlap(&all[j]).unwrap() < 0.8, "{i} vs {j}");
            }
        }
    }

    #[test]
    fn unknown_letter_is_rejected() {
        assert!(pattern('Z').is_err());
    }
}
