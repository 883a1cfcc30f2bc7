use crate::error::{Error, Result};
use crate::MAX_WIDTH;

/// A bijection on `{0, ..., 2^width - 1}` stored as its truth table:
/// `table[x]` is the output pattern for input pattern `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReversibleFunction {
    width: usize,
    table: Vec<u32>,
}

impl ReversibleFunction {
    pub fn new(width: usize, table: Vec<u32>) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange {
                width,
                cap: MAX_WIDTH,
            });
        }
        let size = 1usize << width;
        if table.len() != size {
            return Err(Error::NotBijection(format!(
                "expected {size} entries for width {width}, got {}",
                table.len()
            )));
        }
        let mut seen = vec![false; size];
        for (i, &v) in table.iter().enumerate() {
            let v = v as usize;
            if v >= size {
                return Err(Error::NotBijection(format!(
                    "entry {i} maps to {v}, outside 0..{size}"
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::NotBijection(format!("value {v} appears twice")));
            }
        }
        Ok(ReversibleFunction { width, table })
    }

    /// Caller guarantees `table` is a permutation of the right size.
    pub(crate) fn from_table_unchecked(width: usize, table: Vec<u32>) -> Self {
        debug_assert_eq!(table.len(), 1 << width);
        ReversibleFunction { width, table }
    }

    pub fn identity(width: usize) -> Self {
        Self::from_table_unchecked(width, (0..1u32 << width).collect())
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn into_table(self) -> Vec<u32> {
        self.table
    }

    #[inline]
    pub fn apply(&self, pattern: u32) -> u32 {
        self.table[pattern as usize]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.table.len()];
        for (i, &v) in self.table.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Self::from_table_unchecked(self.width, inv)
    }

    /// `self` followed by `next` (i.e. `next ∘ self`).
    pub fn then(&self, next: &ReversibleFunction) -> Self {
        assert_eq!(self.width, next.width, "width mismatch");
        let table = self.table.iter().map(|&v| next.apply(v)).collect();
        Self::from_table_unchecked(self.width, table)
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }
}
