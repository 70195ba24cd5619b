//! Knuth's subtractive (lagged Fibonacci, lags 55/24) pseudo-random generator.
//!
//! The 64-bit seed is folded into the 31-bit initial value through splitmix64 so that
//! neighbouring seeds start from unrelated states. Every operation is integer or exact
//! floating-point arithmetic, so streams are identical across platforms.

use rand_core::RngCore;

const MBIG: i32 = i32::MAX;
const MSEED: i32 = 161_803_398;

const LONG_LAG: usize = 55;
const SHORT_LAG: usize = 31;

#[derive(Debug, Clone)]
pub struct SubtractiveRng {
    /// Entries `1..=55`; index 0 is unused.
    table: [i32; 56],
    /// Next entry to hand out; past 55 the table is regenerated.
    pos: usize,
}

/// One round of splitmix64; also used to derive independent per-cell seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines a base seed with stream coordinates into a new seed.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

impl SubtractiveRng {
    pub fn new(seed: u64) -> Self {
        let folded = (splitmix64(seed) >> 33) as i32 % MBIG;
        let mut table = [0i32; 56];
        let mut mj = MSEED - folded;
        if mj < 0 {
            mj += MBIG;
        }
        table[55] = mj;
        let mut mk = 1i32;
        for i in 1..55 {
            let ii = (21 * i) % 55;
            table[ii] = mk;
            mk = mj - mk;
            if mk < 0 {
                mk += MBIG;
            }
            mj = table[ii];
        }
        for _ in 1..5 {
            for i in 1..56 {
                table[i] = table[i].wrapping_sub(table[1 + (i + 30) % 55]);
                if table[i] < 0 {
                    table[i] += MBIG;
                }
            }
        }
        SubtractiveRng { table, pos: LONG_LAG + 1 }
    }

    /// Applies the recurrence to all 55 entries in order, exactly as 55 single steps would.
    fn refill(&mut self) {
        #[inline(always)]
        fn step(a: i32, b: i32) -> i32 {
            let mut v = a - b;
            if v == MBIG {
                v -= 1;
            }
            if v < 0 {
                v += MBIG;
            }
            v
        }
        let t = &mut self.table;
        for i in 1..=LONG_LAG - SHORT_LAG {
            t[i] = step(t[i], t[i + SHORT_LAG]);
        }
        for i in LONG_LAG - SHORT_LAG + 1..=LONG_LAG {
            t[i] = step(t[i], t[i + SHORT_LAG - LONG_LAG]);
        }
        self.pos = 1;
    }

    /// Raw output in `0..i32::MAX`.
    #[inline]
    fn sample(&mut self) -> i32 {
        if self.pos > LONG_LAG {
            self.refill();
        }
        let v = self.table[self.pos];
        self.pos += 1;
        v
    }

    /// Uniform integer in `0..n`, unbiased by rejection. Panics when `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "empty range");
        if n <= MBIG as usize {
            // One raw sample covers the range.
            let n = n as i32;
            let zone = MBIG - MBIG % n;
            loop {
                let v = self.sample();
                if v < zone {
                    return (v % n) as usize;
                }
            }
        }
        let n = n as u64;
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return (v % n) as usize;
            }
        }
    }

    /// Uniform integer in `lo..=hi`.
    pub fn uniform_int(&mut self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        lo + self.below(hi - lo + 1)
    }

    /// Uniform real in `[0, 1)` with 53 random bits from two raw samples.
    pub fn uniform(&mut self) -> f64 {
        let hi = (self.sample() as u64) << 22;
        let lo = (self.sample() as u64) >> 9;
        (hi | lo) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform choice between `+1.0` and `-1.0`.
    pub fn sign(&mut self) -> f64 {
        if self.below(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl RngCore for SubtractiveRng {
    fn next_u32(&mut self) -> u32 {
        // Top 16 bits of two 31-bit samples.
        let hi = (self.sample() as u32) >> 15;
        let lo = (self.sample() as u32) >> 15;
        (hi << 16) | lo
    }

    fn next_u64(&mut self) -> u64 {
        ((self.next_u32() as u64) << 32) | self.next_u32() as u64
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(4) {
            let bytes = self.next_u32().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
