//! Memory caps shared by every module that materializes words.

use crate::error::{ForgeError, Result};

/// Environment variable overriding [`DEFAULT_MAX_WORD_LEN`].
pub const MAX_WORD_LEN_ENV: &str = "FORGE_MAX_WORD_LEN";

/// One letter per byte, so this is also roughly the byte budget of a single word.
pub const DEFAULT_MAX_WORD_LEN: u64 = 1 << 31;

pub fn max_word_len() -> u64 {
    std::env::var(MAX_WORD_LEN_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_WORD_LEN)
}

/// Fails with a resource error if a word of `len` letters may not be materialized.
pub fn check_word_len(len: u128, what: &str) -> Result<usize> {
    let cap = max_word_len();
    if len > cap as u128 {
        return Err(ForgeError::Resource(format!(
            "{what} would have {len} letters, above the cap of {cap} ({MAX_WORD_LEN_ENV}); try demo mode"
        )));
    }
    Ok(len as usize)
}
