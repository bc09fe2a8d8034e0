//! Loader for base64 rank files (`<base64 token bytes> <rank>` per line).
//!
//! Rank files carry no pre-tokenizer, so the split pattern is supplied by the
//! caller (see [`super::patterns`] for the built-in family table). Merges are
//! implied by the ranks: merging two adjacent spans is allowed exactly when
//! their concatenated bytes form a token, and lower-ranked tokens merge
//! first.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;

use super::{build_spec, MergeTable, TokenizerError, TokenizerSpec};

/// Load a rank-file tokenizer from disk. `pattern` is the pre-tokenization
/// regex to apply before merging.
pub fn load_tiktoken(
    path: impl AsRef<Path>,
    pattern: &str,
) -> Result<TokenizerSpec, TokenizerError> {
    let path = path.as_ref();
    let data = std::fs::read_to_string(path).map_err(|source| TokenizerError::FileUnreadable {
        path: path.to_owned(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "tokenizer".to_owned());
    load_tiktoken_from_str(&data, &name, pattern)
}

/// Load a rank-file tokenizer from its text content.
pub fn load_tiktoken_from_str(
    data: &str,
    name: &str,
    pattern: &str,
) -> Result<TokenizerSpec, TokenizerError> {
    let mut entries: Vec<(Vec<u8>, u32)> = Vec::new();
    let mut seen_ranks: HashMap<u32, usize> = HashMap::new();
    let mut seen_bytes: HashMap<Vec<u8>, usize> = HashMap::new();
    for (idx, line) in data.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let (b64, rank_str) = line.split_once(' ').ok_or_else(|| {
            TokenizerError::MalformedRankLine {
                line: line_no,
                reason: "expected `<base64> <rank>`".into(),
            }
        })?;
        let bytes = BASE64
            .decode(b64)
            .map_err(|e| TokenizerError::MalformedRankLine {
                line: line_no,
                reason: format!("invalid base64: {e}"),
            })?;
        let rank: u32 = rank_str
            .parse()
            .map_err(|e| TokenizerError::MalformedRankLine {
                line: line_no,
                reason: format!("invalid rank: {e}"),
            })?;
        if seen_ranks.insert(rank, line_no).is_some() {
            return Err(TokenizerError::DuplicateRank {
                rank,
                line: line_no,
            });
        }
        if seen_bytes.insert(bytes.clone(), line_no).is_some() {
            return Err(TokenizerError::MalformedRankLine {
                line: line_no,
                reason: "duplicate token bytes".into(),
            });
        }
        entries.push((bytes, rank));
    }

    build_spec(
        name.to_owned(),
        entries,
        MergeTable::ByMergedToken,
        Some(pattern),
        true,
        false,
        false,
        BTreeSet::new(),
    )
}
