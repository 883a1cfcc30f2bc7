use std::fmt;

use crate::error::{Error, Result};

/// A multiple-control Toffoli gate `TOF(C;t)`.
///
/// Controls are stored as a bit mask over line indices; bit `i` set means
/// line `i` is a control. Line 0 is the least significant bit of a pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToffoliGate {
    controls: u32,
    target: u8,
}

impl ToffoliGate {
    pub fn from_mask(controls: u32, target: usize) -> Result<Self> {
        if target >= 32 {
            return Err(Error::InvalidGate(format!("target line {target} out of range")));
        }
        if controls & (1 << target) != 0 {
            return Err(Error::InvalidGate(format!(
                "target line {target} is also a control"
            )));
        }
        Ok(ToffoliGate {
            controls,
            target: target as u8,
        })
    }

    pub fn new<I: IntoIterator<Item = usize>>(controls: I, target: usize) -> Result<Self> {
        let mut mask = 0u32;
        for c in controls {
            if c >= 32 {
                return Err(Error::InvalidGate(format!("control line {c} out of range")));
            }
            mask |= 1 << c;
        }
        Self::from_mask(mask, target)
    }

    pub fn not(target: usize) -> Self {
        Self::from_mask(0, target).expect("NOT gate has no controls")
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new([control], target).expect("control and target must differ")
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        Self::new([c1, c2], target).expect("controls and target must differ")
    }

    #[inline]
    pub fn controls(&self) -> u32 {
        self.controls
    }

    #[inline]
    pub fn target(&self) -> usize {
        self.target as usize
    }

    #[inline]
    pub fn control_count(&self) -> usize {
        self.controls.count_ones() as usize
    }

    /// Mask of every line the gate touches.
    #[inline]
    pub fn lines(&self) -> u32 {
        self.controls | (1 << self.target)
    }

    /// Highest line index used plus one.
    pub fn span(&self) -> usize {
        32 - self.lines().leading_zeros() as usize
    }

    pub fn fits(&self, width: usize) -> bool {
        self.span() <= width
    }

    /// Flip the target bit iff every control bit is set.
    #[inline]
    pub fn apply(&self, pattern: u32) -> u32 {
        if pattern & self.controls == self.controls {
            pattern ^ (1 << self.target)
        } else {
            pattern
        }
    }

    /// Relabel lines through `map` (old index -> new index).
    pub fn remap(&self, map: &[usize]) -> Self {
        let mut controls = 0u32;
        let mut rest = self.controls;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            controls |= 1 << map[c];
        }
        ToffoliGate {
            controls,
            target: map[self.target()] as u8,
        }
    }

    /// Control line indices in ascending order.
    pub fn control_lines(&self) -> impl Iterator<Item = usize> {
        let mut rest = self.controls;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let c = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(c)
            }
        })
    }

    /// Neither target lies in the other gate's control set; adjacent
    /// occurrences of such a pair may be swapped.
    pub fn commutes_with(&self, other: &ToffoliGate) -> bool {
        other.controls & (1 << self.target) == 0 && self.controls & (1 << other.target) == 0
    }
}

/// Default line names: `a`, `b`, `c`, ...
pub fn line_name(index: usize) -> String {
    if index < 26 {
        ((b'a' + index as u8) as char).to_string()
    } else {
        format!("x{index}")
    }
}

pub fn default_line_names(width: usize) -> Vec<String> {
    (0..width).map(line_name).collect()
}

impl fmt::Display for ToffoliGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let controls: Vec<String> = self.control_lines().map(line_name).collect();
        write!(f, "TOF({};{})", controls.join(","), line_name(self.target()))
    }
}
