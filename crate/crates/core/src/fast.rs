//! Native-word versions of the shipped generators, for hot loops.
//!
//! These produce exactly the same sequences as [`RomuState`](crate::RomuState) with the matching
//! shipped spec, without the per-call dispatch on the family.

const M64: u64 = 15241094284759029579;
const M32: u32 = 3323815723;
const M_MONO32: u32 = 3611795771;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RomuQuad {
    pub w: u64,
    pub x: u64,
    pub y: u64,
    pub z: u64,
}

impl RomuQuad {
    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        let (wp, xp, yp, zp) = (self.w, self.x, self.y, self.z);
        self.w = M64.wrapping_mul(zp);
        self.x = zp.wrapping_add(wp.rotate_left(52));
        self.y = yp.wrapping_sub(xp);
        self.z = yp.wrapping_add(wp).rotate_left(19);
        xp
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RomuTrio {
    pub x: u64,
    pub y: u64,
    pub z: u64,
}

impl RomuTrio {
    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        let (xp, yp, zp) = (self.x, self.y, self.z);
        self.x = M64.wrapping_mul(zp);
        self.y = yp.wrapping_sub(xp).rotate_left(12);
        self.z = zp.wrapping_sub(yp).rotate_left(44);
        xp
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RomuDuo {
    pub x: u64,
    pub y: u64,
}

impl RomuDuo {
    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        let xp = self.x;
        self.x = M64.wrapping_mul(self.y);
        self.y = self
            .y
            .rotate_left(36)
            .wrapping_add(self.y.rotate_left(15))
            .wrapping_sub(xp);
        xp
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RomuDuoJr {
    pub x: u64,
    pub y: u64,
}

impl RomuDuoJr {
    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        let xp = self.x;
        self.x = M64.wrapping_mul(self.y);
        self.y = self.y.wrapping_sub(xp).rotate_left(27);
        xp
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RomuQuad32 {
    pub w: u32,
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl RomuQuad32 {
    #[inline(always)]
    pub fn next_u32(&mut self) -> u32 {
        let (wp, xp, yp, zp) = (self.w, self.x, self.y, self.z);
        self.w = M32.wrapping_mul(zp);
        self.x = zp.wrapping_add(wp.rotate_left(26));
        self.y = yp.wrapping_sub(xp);
        self.z = yp.wrapping_add(wp).rotate_left(9);
        xp
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RomuTrio32 {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl RomuTrio32 {
    #[inline(always)]
    pub fn next_u32(&mut self) -> u32 {
        let (xp, yp, zp) = (self.x, self.y, self.z);
        self.x = M32.wrapping_mul(zp);
        self.y = yp.wrapping_sub(xp).rotate_left(6);
        self.z = zp.wrapping_sub(yp).rotate_left(22);
        xp
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RomuMono32 {
    pub state: u32,
}

impl RomuMono32 {
    pub fn new(seed: u32) -> Self {
        RomuMono32 {
            state: (seed & 0x1fff_ffff) + crate::generators::MONO32_BLOCK_BASE,
        }
    }

    #[inline(always)]
    pub fn next_u16(&mut self) -> u16 {
        let result = (self.state >> 16) as u16;
        self.state = self.state.wrapping_mul(M_MONO32).rotate_left(12);
        result
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RomuMono {
    pub state: u64,
}

impl RomuMono {
    #[inline(always)]
    pub fn next_u32(&mut self) -> u32 {
        let result = self.state as u32;
        self.state = self.state.rotate_left(32).wrapping_mul(M64);
        result
    }
}
