use std::fmt;

use crate::error::{Error, Result};

pub type Symbol = u8;

/// A first-symbol tag rule: delete `deletion` symbols, append the block
/// selected by the first deleted symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TagRule {
    alphabet_size: u8,
    deletion: usize,
    appends: Vec<Vec<Symbol>>,
}

impl TagRule {
    pub fn new(alphabet_size: u8, deletion: usize, appends: Vec<Vec<Symbol>>) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::InvalidRule(format!("alphabet size {alphabet_size} is below 2")));
        }
        if deletion < 1 {
            return Err(Error::InvalidRule("deletion count must be at least 1".into()));
        }
        if appends.len() != alphabet_size as usize {
            return Err(Error::InvalidRule(format!(
                "expected {} append blocks, got {}",
                alphabet_size,
                appends.len()
            )));
        }
        for block in &appends {
            if let Some(&s) = block.iter().find(|&&s| s >= alphabet_size) {
                return Err(Error::SymbolOutOfRange { symbol: s, alphabet: alphabet_size });
            }
        }
        Ok(TagRule { alphabet_size, deletion, appends })
    }

    /// Post's rule: delete 3, 0 -> 00, 1 -> 1101.
    pub fn post() -> Self {
        TagRule { alphabet_size: 2, deletion: 3, appends: vec![vec![0, 0], vec![1, 1, 0, 1]] }
    }

    pub fn alphabet_size(&self) -> u8 {
        self.alphabet_size
    }

    pub fn deletion(&self) -> usize {
        self.deletion
    }

    pub fn appends(&self) -> &[Vec<Symbol>] {
        &self.appends
    }

    pub fn append_for(&self, symbol: Symbol) -> &[Symbol] {
        &self.appends[symbol as usize]
    }

    pub fn is_post(&self) -> bool {
        *self == TagRule::post()
    }
}

impl fmt::Display for TagRule {
    /// Rule literal, e.g. `k=2 r=3 0:00 1:1101`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} r={}", self.alphabet_size, self.deletion)?;
        for (s, block) in self.appends.iter().enumerate() {
            write!(f, " {s}:")?;
            for d in block {
                write!(f, "{d}")?;
            }
        }
        Ok(())
    }
}
