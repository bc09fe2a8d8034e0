//! Byte-level BPE tokenization with per-token character accounting.
//!
//! Loads tokenizer definitions from the two common on-disk formats
//! (serialized JSON with a BPE model section, and base64 rank files) and
//! reproduces the reference greedy merge encoding exactly. Unlike a model
//! runtime, this engine never matches special tokens in user input and never
//! adds sequence markers: the character-per-token statistics must reflect the
//! input text alone.

mod byte_map;
mod hf;
pub mod patterns;
mod tiktoken;

pub use hf::{load_hf_tokenizer, load_hf_tokenizer_from_str};
pub use tiktoken::{load_tiktoken, load_tiktoken_from_str};

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while loading or running a tokenizer.
#[derive(Debug, Error)]
pub enum TokenizerError {
    #[error("cannot read tokenizer file {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed tokenizer file: {0}")]
    MalformedTokenizerFile(String),
    #[error("malformed rank line {line}: {reason}")]
    MalformedRankLine { line: usize, reason: String },
    #[error("duplicate rank {rank} on line {line}")]
    DuplicateRank { rank: u32, line: usize },
    #[error("tokenizer invariant violated: {0}")]
    InvariantViolation(String),
    #[error("invalid pre-tokenization pattern: {0}")]
    InvalidPattern(String),
    #[error("unknown token id {0}")]
    UnknownTokenId(u32),
    #[error("input contains a unit not present in the vocabulary: {0:?}")]
    UnencodableByte(Vec<u8>),
    #[error("pre-tokenization failed: {0}")]
    PretokenizeFailed(String),
}

/// A single vocabulary entry: raw token bytes plus the character count of the
/// token decoded on its own (lossily), precomputed at load time.
#[derive(Debug, Clone)]
struct TokenInfo {
    bytes: Box<[u8]>,
    char_count: u32,
}

/// How merge priorities are resolved during encoding.
#[derive(Debug, Clone)]
enum MergeTable {
    /// Explicit merge list: (left id, right id) -> (rank, merged id).
    Pairs(HashMap<(u32, u32), (u32, u32)>),
    /// Rank-file semantics: the rank of a pair is the id of the token whose
    /// bytes are the concatenation of the pair.
    ByMergedToken,
}

#[derive(Debug)]
struct Pretokenizer {
    pattern: String,
    regex: fancy_regex::Regex,
}

/// An immutable, loaded BPE tokenizer.
///
/// Safe to share across threads; encoding and decoding are pure functions of
/// the spec and its input.
#[derive(Debug)]
pub struct TokenizerSpec {
    name: String,
    vocab: HashMap<Box<[u8]>, u32>,
    tokens: HashMap<u32, TokenInfo>,
    merges: MergeTable,
    pretokenizer: Option<Pretokenizer>,
    byte_level: bool,
    add_prefix_space: bool,
    ignore_merges: bool,
    special_tokens: BTreeSet<String>,
}

/// Result of encoding one text: token ids plus per-token decoded character
/// counts and the character count of the raw input.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence {
    pub token_ids: Vec<u32>,
    pub char_counts: Vec<u32>,
    pub total_chars: usize,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.token_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.token_ids.is_empty()
    }

    /// Sum of per-token decoded character counts.
    pub fn decoded_char_sum(&self) -> u64 {
        self.char_counts.iter().map(|&c| u64::from(c)).sum()
    }
}

/// Node in the merge work list: a live byte range of the chunk plus the token
/// id currently covering it.
struct Node {
    id: u32,
    start: usize,
    end: usize,
    prev: i32,
    next: i32,
    alive: bool,
}

/// Candidate merge in the priority queue. Ordered by (rank, position) so the
/// lowest-rank, leftmost applicable merge always wins, matching the reference
/// implementations.
#[derive(PartialEq, Eq)]
struct Candidate {
    rank: u32,
    pos: usize,
    left_id: u32,
    right_id: u32,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reversed: BinaryHeap is a max-heap and we want the smallest rank.
        (other.rank, other.pos, other.left_id, other.right_id).cmp(&(
            self.rank,
            self.pos,
            self.left_id,
            self.right_id,
        ))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl TokenizerSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vocab_size(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_byte_level(&self) -> bool {
        self.byte_level
    }

    /// The pre-tokenization pattern, if the spec splits input before merging.
    pub fn pretokenize_pattern(&self) -> Option<&str> {
        self.pretokenizer.as_ref().map(|p| p.pattern.as_str())
    }

    /// Token strings recorded as special in the source file. They receive no
    /// special treatment during encoding; occurrences in input are tokenized
    /// as plain text.
    pub fn special_tokens(&self) -> impl Iterator<Item = &str> {
        self.special_tokens.iter().map(String::as_str)
    }

    pub fn token_id(&self, bytes: &[u8]) -> Option<u32> {
        self.vocab.get(bytes).copied()
    }

    /// Encode `text` into a [`TokenSequence`].
    ///
    /// The text is split by the pre-tokenization pattern and each piece is
    /// merged greedily by ascending merge rank. Empty input encodes to an
    /// empty sequence.
    pub fn encode(&self, text: &str) -> Result<TokenSequence, TokenizerError> {
        let total_chars = text.chars().count();
        if text.is_empty() {
            return Ok(TokenSequence::default());
        }

        let prefixed;
        let input = if self.byte_level && self.add_prefix_space && !text.starts_with(' ') {
            prefixed = format!(" {text}");
            prefixed.as_str()
        } else {
            text
        };

        let mut token_ids = Vec::new();
        for piece in self.pretokenize(input)? {
            self.merge_chunk(piece.as_bytes(), &mut token_ids)?;
        }
        let char_counts = token_ids
            .iter()
            .map(|id| self.tokens[id].char_count)
            .collect();
        Ok(TokenSequence {
            token_ids,
            char_counts,
            total_chars,
        })
    }

    /// Decode a single token id to text, lossily replacing byte sequences
    /// that do not form valid UTF-8.
    pub fn decode_token(&self, token_id: u32) -> Result<String, TokenizerError> {
        let info = self
            .tokens
            .get(&token_id)
            .ok_or(TokenizerError::UnknownTokenId(token_id))?;
        Ok(String::from_utf8_lossy(&info.bytes).into_owned())
    }

    /// Decode a sequence of token ids. All token bytes are concatenated
    /// first, then decoded once, so multi-byte characters split across
    /// tokens survive the round trip.
    pub fn decode(&self, token_ids: &[u32]) -> Result<String, TokenizerError> {
        let mut bytes = Vec::new();
        for &id in token_ids {
            let info = self
                .tokens
                .get(&id)
                .ok_or(TokenizerError::UnknownTokenId(id))?;
            bytes.extend_from_slice(&info.bytes);
        }
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }

    /// Split text into pieces. Pattern matches become pieces and any text
    /// between matches is kept as its own piece, so the pieces always tile
    /// the input.
    fn pretokenize<'t>(&self, text: &'t str) -> Result<Vec<&'t str>, TokenizerError> {
        let Some(pre) = &self.pretokenizer else {
            return Ok(vec![text]);
        };
        let mut pieces = Vec::new();
        let mut cursor = 0;
        for m in pre.regex.find_iter(text) {
            let m = m.map_err(|e| TokenizerError::PretokenizeFailed(e.to_string()))?;
            if m.start() > cursor {
                pieces.push(&text[cursor..m.start()]);
            }
            if !m.as_str().is_empty() {
                pieces.push(m.as_str());
            }
            cursor = m.end();
        }
        if cursor < text.len() {
            pieces.push(&text[cursor..]);
        }
        Ok(pieces)
    }

    /// Rank of merging two adjacent nodes, together with the resulting token
    /// id, if the merge exists.
    fn pair_rank(&self, chunk: &[u8], left: &Node, right: &Node) -> Option<(u32, u32)> {
        match &self.merges {
            MergeTable::Pairs(map) => map.get(&(left.id, right.id)).copied(),
            MergeTable::ByMergedToken => self
                .vocab
                .get(&chunk[left.start..right.end])
                .map(|&id| (id, id)),
        }
    }

    /// Greedily merge one pre-tokenized chunk, appending token ids to `out`.
    fn merge_chunk(&self, chunk: &[u8], out: &mut Vec<u32>) -> Result<(), TokenizerError> {
        if chunk.is_empty() {
            return Ok(());
        }
        if self.ignore_merges {
            if let Some(&id) = self.vocab.get(chunk) {
                out.push(id);
                return Ok(());
            }
        }

        // Seed one node per unit: single bytes for byte-level specs, single
        // characters otherwise.
        let mut nodes: Vec<Node> = Vec::new();
        if self.byte_level {
            for (i, b) in chunk.iter().enumerate() {
                let id = *self
                    .vocab
                    .get(std::slice::from_ref(b))
                    .ok_or_else(|| TokenizerError::UnencodableByte(vec![*b]))?;
                nodes.push(Node {
                    id,
                    start: i,
                    end: i + 1,
                    prev: i as i32 - 1,
                    next: i as i32 + 1,
                    alive: true,
                });
            }
        } else {
            let text = std::str::from_utf8(chunk).map_err(|_| {
                TokenizerError::UnencodableByte(chunk.to_vec())
            })?;
            for (start, c) in text.char_indices() {
                let end = start + c.len_utf8();
                let unit = &chunk[start..end];
                let id = *self
                    .vocab
                    .get(unit)
                    .ok_or_else(|| TokenizerError::UnencodableByte(unit.to_vec()))?;
                let i = nodes.len() as i32;
                nodes.push(Node {
                    id,
                    start,
                    end,
                    prev: i - 1,
                    next: i + 1,
                    alive: true,
                });
            }
        }
        let last = nodes.len() - 1;
        nodes[last].next = -1;

        let mut heap = std::collections::BinaryHeap::new();
        for pos in 0..nodes.len().saturating_sub(1) {
            if let Some((rank, _)) = self.pair_rank(chunk, &nodes[pos], &nodes[pos + 1]) {
                heap.push(Candidate {
                    rank,
                    pos,
                    left_id: nodes[pos].id,
                    right_id: nodes[pos + 1].id,
                });
            }
        }

        while let Some(cand) = heap.pop() {
            let left = &nodes[cand.pos];
            if !left.alive || left.id != cand.left_id || left.next < 0 {
                continue;
            }
            let right_pos = left.next as usize;
            if nodes[right_pos].id != cand.right_id {
                continue;
            }
            let Some((rank, merged_id)) = self.pair_rank(chunk, left, &nodes[right_pos]) else {
                continue;
            };
            if rank != cand.rank {
                continue;
            }

            let right_end = nodes[right_pos].end;
            let right_next = nodes[right_pos].next;
            nodes[right_pos].alive = false;
            let left_pos = cand.pos;
            nodes[left_pos].id = merged_id;
            nodes[left_pos].end = right_end;
            nodes[left_pos].next = right_next;
            if right_next >= 0 {
                nodes[right_next as usize].prev = left_pos as i32;
            }

            let prev = nodes[left_pos].prev;
            if prev >= 0 {
                let prev = prev as usize;
                if let Some((rank, _)) = self.pair_rank(chunk, &nodes[prev], &nodes[left_pos]) {
                    heap.push(Candidate {
                        rank,
                        pos: prev,
                        left_id: nodes[prev].id,
                        right_id: nodes[left_pos].id,
                    });
                }
            }
            if right_next >= 0 {
                let next = right_next as usize;
                if let Some((rank, _)) = self.pair_rank(chunk, &nodes[left_pos], &nodes[next]) {
                    heap.push(Candidate {
                        rank,
                        pos: left_pos,
                        left_id: nodes[left_pos].id,
                        right_id: nodes[next].id,
                    });
                }
            }
        }

        out.extend(nodes.iter().filter(|n| n.alive).map(|n| n.id));
        Ok(())
    }
}

/// Shared construction and validation for the format loaders.
fn build_spec(
    name: String,
    entries: Vec<(Vec<u8>, u32)>,
    merges: MergeTable,
    pattern: Option<&str>,
    byte_level: bool,
    add_prefix_space: bool,
    ignore_merges: bool,
    special_tokens: BTreeSet<String>,
) -> Result<TokenizerSpec, TokenizerError> {
    if entries.is_empty() {
        return Err(TokenizerError::InvariantViolation(
            "vocabulary is empty".into(),
        ));
    }
    let mut vocab = HashMap::with_capacity(entries.len());
    let mut tokens = HashMap::with_capacity(entries.len());
    for (bytes, id) in entries {
        if bytes.is_empty() {
            return Err(TokenizerError::InvariantViolation(format!(
                "token id {id} has empty bytes"
            )));
        }
        let char_count = String::from_utf8_lossy(&bytes).chars().count() as u32;
        if tokens
            .insert(
                id,
                TokenInfo {
                    bytes: bytes.clone().into_boxed_slice(),
                    char_count,
                },
            )
            .is_some()
        {
            return Err(TokenizerError::InvariantViolation(format!(
                "token id {id} assigned twice"
            )));
        }
        vocab.insert(bytes.into_boxed_slice(), id);
    }
    if byte_level {
        for b in 0..=255u8 {
            if !vocab.contains_key([b].as_slice()) {
                return Err(TokenizerError::InvariantViolation(format!(
                    "byte-level vocabulary is missing single-byte token 0x{b:02x}"
                )));
            }
        }
    }
    let pretokenizer = match pattern {
        Some(p) => Some(Pretokenizer {
            pattern: p.to_owned(),
            regex: fancy_regex::Regex::new(p)
                .map_err(|e| TokenizerError::InvalidPattern(e.to_string()))?,
        }),
        None => None,
    };
    Ok(TokenizerSpec {
        name,
        vocab,
        tokens,
        merges,
        pretokenizer,
        byte_level,
        add_prefix_space,
        ignore_merges,
        special_tokens,
    })
}

#[cfg(test)]
mod tests;
