//! Fixed-width bitsets stored as `u64` words.

use alloc::vec;
use alloc::vec::Vec;

pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

pub(crate) fn zeroed(bits: usize) -> Vec<u64> {
    vec![0; words_for(bits)]
}

pub(crate) fn full(bits: usize) -> Vec<u64> {
    let mut v = vec![u64::MAX; words_for(bits)];
    let rem = bits % 64;
    if rem != 0 {
        *v.last_mut().unwrap() = (1u64 << rem) - 1;
    }
    v
}

#[inline]
pub(crate) fn set(words: &mut [u64], i: usize) {
    words[i / 64] |= 1u64 << (i % 64);
}

#[inline]
pub(crate) fn clear(words: &mut [u64], i: usize) {
    words[i / 64] &= !(1u64 << (i % 64));
}

pub(crate) fn count(words: &[u64]) -> u64 {
    words.iter().map(|w| w.count_ones() as u64).sum()
}

pub(crate) fn and_into(dst: &mut [u64], a: &[u64], b: &[u64]) {
    for ((d, x), y) in dst.iter_mut().zip(a).zip(b) {
        *d = x & y;
    }
}
