//! Accelerated recurrence search.
//!
//! All paths are exact: packed keys are injective, and hashed keys are
//! confirmed against the data before a match is reported.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use super::key::KeyScheme;
use crate::sources::Alphabet;

/// Dense last-occurrence tables are used up to this key width.
const DENSE_KEY_BITS: u32 = 22;

#[derive(Default)]
struct U64Hasher(u64);

impl Hasher for U64Hasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(8) ^ b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        }
    }
    fn write_u64(&mut self, v: u64) {
        self.0 = (v ^ (v >> 29)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    }
}

type FastMap<V> = HashMap<u64, V, BuildHasherDefault<U64Hasher>>;

/// Smallest `j` in `1..=j_max` with `data[start-j..start-j+n] == data[start..start+n]`.
/// Requires `start >= j_max` and `start + n <= data.len()`.
pub(crate) fn scan_naive(data: &[u8], start: usize, n: usize, j_max: usize) -> Option<usize> {
    let block = &data[start..start + n];
    (1..=j_max).find(|&j| &data[start - j..start - j + n] == block)
}

/// Same contract as [`scan_naive`], using a rolling key per shift.
pub(crate) fn scan_rolling(
    data: &[u8],
    alphabet: Alphabet,
    start: usize,
    n: usize,
    j_max: usize,
) -> Option<usize> {
    if j_max == 0 {
        return None;
    }
    let scheme = KeyScheme::new(alphabet, n);
    let block = &data[start..start + n];
    let target = scheme.key(block);
    let mut s = start - 1;
    let mut key = scheme.key(&data[s..s + n]);
    for j in 1..=j_max {
        if j > 1 {
            s -= 1;
            key = scheme.prepend(key, data[s], data[s + n]);
        }
        if key == target && (scheme.is_exact() || &data[s..s + n] == block) {
            return Some(j);
        }
    }
    None
}

/// Outcome of one window in a batch query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WindowHit {
    Found(usize),
    /// No match for any `j <= j_max`.
    Censored,
    /// No match in the data, but fewer than `j_max` shifts were available.
    Unresolved,
}

enum LastSeen {
    Dense(Vec<u32>),
    Sparse(FastMap<u32>),
}

/// Recurrence times of the `count` consecutive windows whose blocks start at
/// `first_start, first_start + 1, …`, searched over `j <= j_max` and over
/// whatever data lies before each window.
///
/// One left-to-right pass records the last occurrence of every window key,
/// so a window's nearest previous copy is read off in O(1).
pub(crate) fn batch_recurrence(
    data: &[u8],
    alphabet: Alphabet,
    first_start: usize,
    count: usize,
    n: usize,
    j_max: usize,
) -> Vec<WindowHit> {
    assert!(first_start + count - 1 + n <= data.len());
    let scheme = KeyScheme::new(alphabet, n);
    let lo = first_start.saturating_sub(j_max);
    let last_window = first_start + count - 1;

    let mut seen = match scheme.packed_width() {
        Some(width) if width <= DENSE_KEY_BITS => LastSeen::Dense(vec![0u32; 1usize << width]),
        _ => {
            let mut map = FastMap::default();
            let mut key = scheme.key(&data[first_start..first_start + n]);
            map.insert(key, 0);
            for s in first_start + 1..=last_window {
                key = scheme.append(key, data[s - 1], data[s + n - 1]);
                map.insert(key, 0);
            }
            LastSeen::Sparse(map)
        }
    };

    let mut out = Vec::with_capacity(count);
    let mut key = scheme.key(&data[lo..lo + n]);
    for s in lo..=last_window {
        if s > lo {
            key = scheme.append(key, data[s - 1], data[s + n - 1]);
        }
        let slot = match &mut seen {
            LastSeen::Dense(table) => Some(&mut table[key as usize]),
            LastSeen::Sparse(map) => map.get_mut(&key),
        };
        let Some(slot) = slot else { continue };
        if s >= first_start {
            let hit = match *slot {
                0 if s >= j_max => WindowHit::Censored,
                0 => WindowHit::Unresolved,
                prev => {
                    let prev = prev as usize - 1;
                    let j = s - prev;
                    if !scheme.is_exact() && data[prev..prev + n] != data[s..s + n] {
                        // hash collision: fall back to an exact scan
                        match scan_rolling(data, alphabet, s, n, j_max.min(s)) {
                            Some(j) => WindowHit::Found(j),
                            None if s >= j_max => WindowHit::Censored,
                            None => WindowHit::Unresolved,
                        }
                    } else if j <= j_max {
                        WindowHit::Found(j)
                    } else {
                        WindowHit::Censored
                    }
                }
            };
            out.push(hit);
        }
        *slot = u32::try_from(s + 1).expect("realization exceeds u32 index range");
    }
    out
}

/// Streaming recurrence: `block` is `x_1^n`, `past` yields `x_0, x_{-1}, …`.
/// Returns the smallest `j <= limit` at which the block recurs, drawing at
/// most `limit` past symbols.
pub fn first_return_streaming<F: FnMut() -> u8>(
    block: &[u8],
    alphabet: Alphabet,
    limit: usize,
    mut past: F,
) -> Option<usize> {
    let n = block.len();
    let scheme = KeyScheme::new(alphabet, n);
    let target = scheme.key(block);
    match scheme {
        KeyScheme::Packed { bits, top_shift, .. } => {
            let mut key = target;
            for j in 1..=limit {
                key = ((past() as u64) << top_shift) | (key >> bits);
                if key == target {
                    return Some(j);
                }
            }
            None
        }
        KeyScheme::Hashed { .. } => {
            // seq[i] holds x_{n-i}: block reversed, then the past as drawn
            let mut seq: Vec<u8> = block.iter().rev().copied().collect();
            let mut key = target;
            for j in 1..=limit {
                let c = past();
                seq.push(c);
                // window x_{-j+1}..x_{-j+n}; leaving symbol is x_{-j+n+1}
                key = scheme.prepend(key, c, seq[j - 1]);
                if key == target {
                    let len = seq.len();
                    if (0..n).all(|t| seq[len - 1 - t] == block[t]) {
                        return Some(j);
                    }
                }
            }
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rolling_matches_naive_on_small_cases() {
        let data: Vec<u8> = (0..400u32).map(|i| (i.wrapping_mul(2654435761u32) >> 29) as u8 & 1).collect();
        for n in 1..10 {
            for start in [50, 100, 200, 380] {
                for j_max in [1, 10, 50] {
                    assert_eq!(
                        scan_rolling(&data, Alphabet::BINARY, start, n, j_max),
                        scan_naive(&data, start, n, j_max)
                    );
                }
            }
        }
    }

    #[test]
    fn batch_flags_unresolved_only_when_past_runs_out() {
        let data = vec![0, 0, 0, 1, 0, 0, 1, 1];
        // windows of length 2 starting at 4..=6: (0,0), (0,1), (1,1)
        let hits = batch_recurrence(&data, Alphabet::BINARY, 4, 3, 2, 10);
        assert_eq!(hits, vec![WindowHit::Found(3), WindowHit::Found(3), WindowHit::Unresolved]);
        let hits = batch_recurrence(&data, Alphabet::BINARY, 4, 3, 2, 2);
        assert_eq!(hits, vec![WindowHit::Censored, WindowHit::Censored, WindowHit::Censored]);
    }

    #[test]
    fn streaming_matches_materialized() {
        let block = [0u8, 1, 1];
        // x_0 … x_{-7} = 0,1,1,0,1,0,0,1  (i.e. past −7…0 = 1,0,0,1,0,1,1,0)
        let past = [0u8, 1, 1, 0, 1, 0, 0, 1];
        let mut it = past.iter().copied();
        assert_eq!(first_return_streaming(&block, Alphabet::BINARY, 8, || it.next().unwrap()), Some(4));
        let mut it = past.iter().copied();
        assert_eq!(first_return_streaming(&block, Alphabet::BINARY, 3, || it.next().unwrap()), None);
    }
}
