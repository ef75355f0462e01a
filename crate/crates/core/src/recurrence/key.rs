//! Rolling keys over fixed-length windows.
//!
//! Windows of up to 64 bits of packed symbols are keyed exactly. Longer
//! windows use a polynomial hash modulo 2^61 − 1; callers must confirm
//! hash hits by direct comparison.

use crate::sources::Alphabet;

const MERSENNE61: u64 = (1 << 61) - 1;
const HASH_BASE: u64 = 0x0A7C_15C3_9E37_79B9 % MERSENNE61;

#[inline]
fn mulmod(a: u64, b: u64) -> u64 {
    let wide = a as u128 * b as u128;
    let lo = (wide as u64) & MERSENNE61;
    let hi = (wide >> 61) as u64;
    let s = lo + hi;
    if s >= MERSENNE61 {
        s - MERSENNE61
    } else {
        s
    }
}

#[inline]
fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MERSENNE61 {
        s - MERSENNE61
    } else {
        s
    }
}

#[inline]
fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MERSENNE61 - b
    }
}

fn powmod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base);
        }
        base = mulmod(base, base);
        exp >>= 1;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum KeyScheme {
    /// First symbol in the highest bits.
    Packed { bits: u32, top_shift: u32, mask: u64 },
    /// `Σ (x_{s+t}+1)·B^{n-1-t} mod 2^61-1`.
    Hashed { top_power: u64, base_inverse: u64 },
}

impl KeyScheme {
    pub(crate) fn new(alphabet: Alphabet, n: usize) -> Self {
        assert!(n >= 1);
        let bits = alphabet.bits_per_symbol();
        let total = bits as usize * n;
        if total <= 64 {
            let mask = if total == 64 { u64::MAX } else { (1u64 << total) - 1 };
            KeyScheme::Packed { bits, top_shift: bits * (n as u32 - 1), mask }
        } else {
            KeyScheme::Hashed {
                top_power: powmod(HASH_BASE, n as u64 - 1),
                base_inverse: powmod(HASH_BASE, MERSENNE61 - 2),
            }
        }
    }

    pub(crate) fn is_exact(self) -> bool {
        matches!(self, KeyScheme::Packed { .. })
    }

    /// Packed width in bits, if exact.
    pub(crate) fn packed_width(self) -> Option<u32> {
        match self {
            KeyScheme::Packed { mask, .. } => Some(64 - mask.leading_zeros()),
            KeyScheme::Hashed { .. } => None,
        }
    }

    pub(crate) fn key(self, window: &[u8]) -> u64 {
        match self {
            KeyScheme::Packed { bits, .. } => window.iter().fold(0u64, |k, &x| (k << bits) | x as u64),
            KeyScheme::Hashed { .. } => {
                window.iter().fold(0u64, |h, &x| addmod(mulmod(h, HASH_BASE), x as u64 + 1))
            }
        }
    }

    /// Window moves one step left: `first` enters at the front, `last` leaves.
    #[inline]
    pub(crate) fn prepend(self, key: u64, first: u8, last: u8) -> u64 {
        match self {
            KeyScheme::Packed { bits, top_shift, .. } => ((first as u64) << top_shift) | (key >> bits),
            KeyScheme::Hashed { top_power, base_inverse } => addmod(
                mulmod(first as u64 + 1, top_power),
                mulmod(submod(key, last as u64 + 1), base_inverse),
            ),
        }
    }

    /// Window moves one step right: `first` leaves, `last` enters at the back.
    #[inline]
    pub(crate) fn append(self, key: u64, first: u8, last: u8) -> u64 {
        match self {
            KeyScheme::Packed { bits, mask, .. } => ((key << bits) | last as u64) & mask,
            KeyScheme::Hashed { top_power, .. } => addmod(
                mulmod(submod(key, mulmod(first as u64 + 1, top_power)), HASH_BASE),
                last as u64 + 1,
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_rolling(alphabet: Alphabet, n: usize, data: &[u8]) {
        let scheme = KeyScheme::new(alphabet, n);
        let keys: Vec<u64> = data.windows(n).map(|w| scheme.key(w)).collect();
        for s in 1..keys.len() {
            assert_eq!(scheme.append(keys[s - 1], data[s - 1], data[s + n - 1]), keys[s]);
            assert_eq!(scheme.prepend(keys[s], data[s - 1], data[s + n - 1]), keys[s - 1]);
        }
    }

    #[test]
    fn packed_rolls() {
        let data: Vec<u8> = (0..200u32).map(|i| ((i * 7 + i / 3) % 2) as u8).collect();
        check_rolling(Alphabet::BINARY, 5, &data);
        check_rolling(Alphabet::BINARY, 64, &data);
        assert!(KeyScheme::new(Alphabet::BINARY, 64).is_exact());
    }

    #[test]
    fn hashed_rolls() {
        let a = Alphabet::new(256).unwrap();
        let data: Vec<u8> = (0..300u32).map(|i| (i.wrapping_mul(2654435761) >> 13) as u8).collect();
        assert!(!KeyScheme::new(a, 9).is_exact());
        check_rolling(a, 9, &data);
        check_rolling(Alphabet::BINARY, 100, &data.iter().map(|x| x & 1).collect::<Vec<_>>());
    }
}
