//! Canonical minimal DFAs for the seven Tomita grammars over {0, 1},
//! plus independent membership predicates used to cross-check them.

use crate::automata::{Alphabet, Dfa};
use crate::error::{Error, Result};

/// Hand-coded canonical minimal complete DFA for Tomita grammar `id` (1..7).
pub fn tomita_dfa(id: u8) -> Result<Dfa> {
    let a = Alphabet::binary();
    // state 0 is always initial; delta rows are [on '0', on '1']
    let (accepting, delta): (Vec<bool>, Vec<Vec<usize>>) = match id {
        // 1*
        1 => (vec![true, false], vec![vec![1, 0], vec![1, 1]]),
        // (10)*
        2 => (vec![true, false, false], vec![vec![2, 1], vec![0, 2], vec![2, 2]]),
        // no odd run of 0s immediately followed by an odd run of 1s
        // 0: neutral, 1: odd trailing 0-run, 2: odd 1-run after odd 0s,
        // 3: even 1-run after odd 0s, 4: dead
        3 => (
            vec![true, true, false, true, false],
            vec![vec![1, 0], vec![0, 2], vec![4, 3], vec![1, 2], vec![4, 4]],
        ),
        // no 000 substring; states count trailing zeros, 3 dead
        4 => (
            vec![true, true, true, false],
            vec![vec![1, 0], vec![2, 0], vec![3, 0], vec![3, 3]],
        ),
        // even number of 0s and even number of 1s; state = (p0, p1) bits
        5 => (
            vec![true, false, false, false],
            vec![vec![1, 2], vec![0, 3], vec![3, 0], vec![2, 1]],
        ),
        // (#0 - #1) mod 3 == 0
        6 => (vec![true, false, false], vec![vec![1, 2], vec![2, 0], vec![0, 1]]),
        // 0*1*0*1*
        7 => (
            vec![true, true, true, true, false],
            vec![vec![0, 1], vec![2, 1], vec![2, 3], vec![4, 3], vec![4, 4]],
        ),
        _ => return Err(Error::InvalidParameter(format!("tomita id {id} not in 1..7"))),
    };
    Dfa::new(a, 0, accepting, delta)
}

/// Independent membership predicate for grammar `id`, implemented by direct
/// counting/pattern logic rather than automaton evaluation.
pub fn tomita_predicate(id: u8, w: &str) -> Result<bool> {
    if !w.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::UnknownSymbol {
            symbol: w.chars().find(|&c| c != '0' && c != '1').unwrap().to_string(),
            alphabet: vec!["0".into(), "1".into()],
        });
    }
    let ok = match id {
        1 => w.chars().all(|c| c == '1'),
        2 => {
            let mut rest = w;
            loop {
                if rest.is_empty() {
                    break true;
                }
                match rest.strip_prefix("10") {
                    Some(r) => rest = r,
                    None => break false,
                }
            }
        }
        3 => {
            // scan maximal runs; forbidden: odd 0-run immediately followed by
            // odd 1-run
            let bytes = w.as_bytes();
            let mut i = 0;
            let mut ok = true;
            while i < bytes.len() {
                let c = bytes[i];
                let mut j = i;
                while j < bytes.len() && bytes[j] == c {
                    j += 1;
                }
                let run = j - i;
                if c == b'0' && run % 2 == 1 {
                    let mut k = j;
                    while k < bytes.len() && bytes[k] == b'1' {
                        k += 1;
                    }
                    if k > j && (k - j) % 2 == 1 {
                        ok = false;
                        break;
                    }
                }
                i = j;
            }
            ok
        }
        4 => !w.contains("000"),
        5 => {
            let zeros = w.chars().filter(|&c| c == '0').count();
            let ones = w.len() - zeros;
            zeros % 2 == 0 && ones % 2 == 0
        }
        6 => {
            let zeros = w.chars().filter(|&c| c == '0').count() as i64;
            let ones = w.len() as i64 - zeros;
            (zeros - ones).rem_euclid(3) == 0
        }
        7 => {
            // 0*1*0*1*: at most three alternation boundaries starting from 0s
            let mut phase = 0; // 0: 0*, 1: 1*, 2: 0*, 3: 1*
            let mut ok = true;
            for c in w.chars() {
                let want_zero = phase % 2 == 0;
                let is_zero = c == '0';
                if is_zero != want_zero {
                    phase += 1;
                    if phase > 3 {
                        ok = false;
                        break;
                    }
                }
            }
            ok
        }
        _ => return Err(Error::InvalidParameter(format!("tomita id {id} not in 1..7"))),
    };
    Ok(ok)
}
