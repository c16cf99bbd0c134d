use crate::error::{Error, Result};

/// Fixed-size bitset over `0..len`, allocated fallibly.
pub(crate) struct Bitset {
    words: Vec<u64>,
    len: u64,
}

impl Bitset {
    pub(crate) fn new(len: u64) -> Result<Self> {
        let n = len.div_ceil(64) as usize;
        let mut words = Vec::new();
        words.try_reserve_exact(n).map_err(|_| Error::Allocation { bytes: n * 8 })?;
        words.resize(n, 0);
        Ok(Bitset { words, len })
    }

    #[inline(always)]
    #[cfg(test)]
    pub(crate) fn get(&self, i: u64) -> bool {
        self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    #[inline(always)]
    pub(crate) fn set(&mut self, i: u64) {
        self.words[(i >> 6) as usize] |= 1 << (i & 63);
    }

    /// Index of the first clear bit at or after `from`, if any.
    pub(crate) fn next_clear(&self, from: u64) -> Option<u64> {
        if from >= self.len {
            return None;
        }
        let mut wi = (from >> 6) as usize;
        let mut word = !self.words[wi] & (u64::MAX << (from & 63));
        loop {
            if word != 0 {
                let i = ((wi as u64) << 6) + word.trailing_zeros() as u64;
                return (i < self.len).then_some(i);
            }
            wi += 1;
            if wi == self.words.len() {
                return None;
            }
            word = !self.words[wi];
        }
    }

    /// Longest run of consecutive set bits as `(start, length)`; the lowest start wins ties.
    pub(crate) fn longest_run(&self) -> (u64, u64) {
        let (mut best_start, mut best_len) = (0, 0);
        let (mut start, mut len) = (0u64, 0u64);
        for (wi, &w) in self.words.iter().enumerate() {
            let base = (wi as u64) << 6;
            if w == u64::MAX && base + 64 <= self.len {
                if len == 0 {
                    start = base;
                }
                len += 64;
                continue;
            }
            let top = (self.len - base).min(64);
            for b in 0..top {
                if w >> b & 1 == 1 {
                    if len == 0 {
                        start = base + b;
                    }
                    len += 1;
                } else {
                    if len > best_len {
                        (best_start, best_len) = (start, len);
                    }
                    len = 0;
                }
            }
        }
        if len > best_len {
            (best_start, best_len) = (start, len);
        }
        (best_start, best_len)
    }
}
