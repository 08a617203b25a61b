use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Symbol index into an [`Alphabet`].
pub type Symbol = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate symbol name `{0}`")]
    DuplicateSymbol(String),
    #[error("symbol name `{0}` is empty or contains whitespace")]
    BadSymbolName(String),
    #[error("alphabet must have at least one symbol")]
    Empty,
}

/// Ordered list of distinct printable symbol names mapped to dense indices.
#[derive(Clone)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, AlphabetError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(AlphabetError::Empty);
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(AlphabetError::BadSymbolName(name.clone()));
            }
            if index.insert(name.clone(), i as Symbol).is_some() {
                return Err(AlphabetError::DuplicateSymbol(name.clone()));
            }
        }
        Ok(Self { names, index })
    }

    /// Symbols named `0`, `1`, ..., `n-1`.
    pub fn numeric(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string())).expect("numeric names are valid")
    }

    /// Names of the form `left,right`, index `l * right.len() + r`.
    pub fn product(left: &Alphabet, right: &Alphabet) -> Self {
        let names = left
            .names
            .iter()
            .flat_map(|l| right.names.iter().map(move |r| format!("{l},{r}")));
        Self::new(names).expect("product of distinct names is distinct")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Result<Symbol, AlphabetError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| AlphabetError::UnknownSymbol(name.to_string()))
    }

    /// Parses a whitespace-separated list of symbol names.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Symbol>, AlphabetError> {
        text.split_whitespace().map(|t| self.lookup(t)).collect()
    }

    pub fn format_word(&self, word: &[Symbol]) -> String {
        word.iter().map(|&s| self.name(s)).collect::<Vec<_>>().join(" ")
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

/// Enumerates every word of a fixed length over `0..n` in lexicographic order.
///
/// The word at position `i` has the base-`n` digits of `i`, most significant first.
pub fn word_at(n: usize, len: usize, mut i: u64, out: &mut [Symbol]) {
    debug_assert_eq!(out.len(), len);
    for slot in out.iter_mut().rev() {
        *slot = (i % n as u64) as Symbol;
        i /= n as u64;
    }
}

/// `n^len`, or `None` when it overflows `u64`.
pub fn word_count(n: usize, len: usize) -> Option<u64> {
    (n as u64).checked_pow(u32::try_from(len).ok()?)
}
