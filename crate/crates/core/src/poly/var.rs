//! The fixed, totally ordered variable alphabet shared by every stage.

use std::fmt;

/// Highest index of a series tail coefficient (`a2 ..= a16`).
pub const MAX_TAIL: usize = 16;

/// Variable names in alphabet order.  The order is part of the canonical
/// serialization format and must never change.
pub const ALPHABET: [&str; NVARS] = [
    "x1", "y1", "x2", "y2", "u1", "v1", "u2", "v2", "r12", "r13", "r23", "w13", "w23", "h", "om",
    "s", "k", "u", "a", "t", "a2", "a3", "a4", "a5", "a6", "a7", "a8", "a9", "a10", "a11", "a12",
    "a13", "a14", "a15", "a16",
];

/// Number of variables in the alphabet.
pub const NVARS: usize = 35;

/// A variable of the fixed alphabet, identified by its position.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(u8);

impl VarId {
    pub const X1: VarId = VarId(0);
    pub const Y1: VarId = VarId(1);
    pub const X2: VarId = VarId(2);
    pub const Y2: VarId = VarId(3);
    pub const U1: VarId = VarId(4);
    pub const V1: VarId = VarId(5);
    pub const U2: VarId = VarId(6);
    pub const V2: VarId = VarId(7);
    pub const R12: VarId = VarId(8);
    pub const R13: VarId = VarId(9);
    pub const R23: VarId = VarId(10);
    pub const W13: VarId = VarId(11);
    pub const W23: VarId = VarId(12);
    pub const H: VarId = VarId(13);
    pub const OM: VarId = VarId(14);
    /// Series parameter.
    pub const S: VarId = VarId(15);
    /// Leading coefficient of a face root.
    pub const K: VarId = VarId(16);
    /// Correction term `r13 = k + u(s)` in the Newton-diagram path.
    pub const U: VarId = VarId(17);
    /// Leading coefficient of a candidate branch `u = a s^d`.
    pub const A: VarId = VarId(18);
    /// Auxiliary variable for the `a t - 1` nonvanishing constraint.
    pub const T: VarId = VarId(19);

    /// The eight phase-space coordinates, in alphabet order.
    pub const PHASE: [VarId; 8] = [
        Self::X1,
        Self::Y1,
        Self::X2,
        Self::Y2,
        Self::U1,
        Self::V1,
        Self::U2,
        Self::V2,
    ];

    /// Series tail coefficient `a_j` for `2 <= j <= MAX_TAIL`.
    pub fn tail(j: usize) -> VarId {
        assert!((2..=MAX_TAIL).contains(&j), "tail index a{j} outside a2..a{MAX_TAIL}");
        VarId((20 + j - 2) as u8)
    }

    /// Inverse of [`VarId::tail`].
    pub fn tail_index(self) -> Option<usize> {
        let i = self.0 as usize;
        (i >= 20).then(|| i - 20 + 2)
    }

    pub fn from_index(i: usize) -> VarId {
        assert!(i < NVARS, "variable index {i} out of range");
        VarId(i as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        ALPHABET[self.index()]
    }

    pub fn parse(name: &str) -> Option<VarId> {
        ALPHABET.iter().position(|n| *n == name).map(|i| VarId(i as u8))
    }

    pub fn all() -> impl Iterator<Item = VarId> {
        (0..NVARS).map(|i| VarId(i as u8))
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for v in VarId::all() {
            assert_eq!(VarId::parse(v.name()), Some(v));
        }
        assert_eq!(VarId::parse("r13"), Some(VarId::R13));
        assert_eq!(VarId::parse("zz"), None);
    }

    #[test]
    fn tail_variables() {
        assert_eq!(VarId::tail(2).name(), "a2");
        assert_eq!(VarId::tail(MAX_TAIL).name(), "a16");
        assert_eq!(VarId::tail(7).tail_index(), Some(7));
        assert_eq!(VarId::A.tail_index(), None);
    }
}
