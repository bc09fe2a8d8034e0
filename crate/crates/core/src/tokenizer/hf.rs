//! Loader for serialized-tokenizer JSON files with a BPE model section.
//!
//! Supports the common byte-level layouts: a `ByteLevel` pre-tokenizer (with
//! or without its built-in split regex) optionally preceded by a `Split`
//! pre-tokenizer carrying a custom pattern. Vocabulary keys of byte-level
//! models are un-remapped to raw bytes at load time so the encoder operates
//! on bytes throughout. Normalizers are not applied; texts are encoded as
//! given.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::Deserialize;

use super::byte_map::char_to_byte_map;
use super::patterns::GPT2_PATTERN;
use super::{build_spec, MergeTable, TokenizerError, TokenizerSpec};

#[derive(Deserialize)]
struct TokenizerFile {
    model: ModelSection,
    #[serde(default)]
    added_tokens: Vec<AddedToken>,
    #[serde(default)]
    pre_tokenizer: Option<serde_json::Value>,
}

#[derive(Deserialize)]
struct ModelSection {
    #[serde(rename = "type", default)]
    model_type: Option<String>,
    vocab: HashMap<String, u32>,
    merges: Vec<MergeEntry>,
    #[serde(default)]
    ignore_merges: bool,
}

/// Merge rules appear either as `"left right"` strings or `["left","right"]`
/// pairs depending on the serializer version.
#[derive(Deserialize)]
#[serde(untagged)]
enum MergeEntry {
    Joined(String),
    Pair(String, String),
}

#[derive(Deserialize)]
struct AddedToken {
    id: u32,
    content: String,
    #[serde(default)]
    special: bool,
}

#[derive(Default)]
struct PreTokSettings {
    split_pattern: Option<String>,
    byte_level: bool,
    add_prefix_space: bool,
    use_builtin_regex: bool,
}

fn walk_pre_tokenizer(
    value: &serde_json::Value,
    out: &mut PreTokSettings,
) -> Result<(), TokenizerError> {
    let kind = value
        .get("type")
        .and_then(|t| t.as_str())
        .ok_or_else(|| malformed("pre-tokenizer entry without a type"))?;
    match kind {
        "Sequence" => {
            let parts = value
                .get("pretokenizers")
                .and_then(|p| p.as_array())
                .ok_or_else(|| malformed("Sequence pre-tokenizer without members"))?;
            for part in parts {
                walk_pre_tokenizer(part, out)?;
            }
        }
        "ByteLevel" => {
            out.byte_level = true;
            out.add_prefix_space = value
                .get("add_prefix_space")
                .and_then(|v| v.as_bool())
                .unwrap_or(true);
            if value
                .get("use_regex")
                .and_then(|v| v.as_bool())
                .unwrap_or(true)
            {
                out.use_builtin_regex = true;
            }
        }
        "Split" => {
            let behavior = value.get("behavior").and_then(|v| v.as_str());
            if behavior != Some("Isolated") {
                return Err(malformed(&format!(
                    "unsupported Split behavior {behavior:?}"
                )));
            }
            let pattern = value
                .get("pattern")
                .and_then(|p| p.get("Regex"))
                .and_then(|r| r.as_str())
                .ok_or_else(|| malformed("Split pre-tokenizer without a Regex pattern"))?;
            out.split_pattern = Some(pattern.to_owned());
        }
        other => {
            return Err(malformed(&format!("unsupported pre-tokenizer type {other:?}")));
        }
    }
    Ok(())
}

fn malformed(msg: &str) -> TokenizerError {
    TokenizerError::MalformedTokenizerFile(msg.to_owned())
}

/// Convert a vocabulary key to raw token bytes. Byte-level keys are mapped
/// through the stand-in alphabet; keys containing characters outside that
/// alphabet (added tokens stored as literal text) fall back to their UTF-8
/// bytes.
fn key_to_bytes(key: &str, byte_level: bool, inverse: &HashMap<char, u8>) -> Vec<u8> {
    if byte_level {
        let mut bytes = Vec::with_capacity(key.len());
        for c in key.chars() {
            match inverse.get(&c) {
                Some(&b) => bytes.push(b),
                None => return key.as_bytes().to_vec(),
            }
        }
        bytes
    } else {
        key.as_bytes().to_vec()
    }
}

/// Load a tokenizer from a serialized JSON definition on disk.
pub fn load_hf_tokenizer(path: impl AsRef<Path>) -> Result<TokenizerSpec, TokenizerError> {
    let path = path.as_ref();
    let data = std::fs::read_to_string(path).map_err(|source| TokenizerError::FileUnreadable {
        path: path.to_owned(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "tokenizer".to_owned());
    load_hf_tokenizer_from_str(&data, &name)
}

/// Load a tokenizer from JSON text. `name` becomes the spec name.
pub fn load_hf_tokenizer_from_str(
    json: &str,
    name: &str,
) -> Result<TokenizerSpec, TokenizerError> {
    let file: TokenizerFile =
        serde_json::from_str(json).map_err(|e| malformed(&e.to_string()))?;
    if let Some(model_type) = &file.model.model_type {
        if model_type != "BPE" {
            return Err(malformed(&format!(
                "model type {model_type:?} is not BPE"
            )));
        }
    }

    let mut settings = PreTokSettings::default();
    if let Some(pre) = &file.pre_tokenizer {
        if !pre.is_null() {
            walk_pre_tokenizer(pre, &mut settings)?;
        }
    }
    let pattern = match (&settings.split_pattern, settings.use_builtin_regex) {
        (Some(p), _) => Some(p.as_str()),
        (None, true) => Some(GPT2_PATTERN),
        (None, false) => None,
    };

    let inverse = char_to_byte_map();
    let mut entries: Vec<(Vec<u8>, u32)> = file
        .model
        .vocab
        .iter()
        .map(|(key, &id)| (key_to_bytes(key, settings.byte_level, &inverse), id))
        .collect();
    // Map ids before merge resolution so merge pairs can be validated.
    let by_bytes: HashMap<&[u8], u32> = entries
        .iter()
        .map(|(bytes, id)| (bytes.as_slice(), *id))
        .collect();

    let mut pair_ranks: HashMap<(u32, u32), (u32, u32)> =
        HashMap::with_capacity(file.model.merges.len());
    for (rank, entry) in file.model.merges.iter().enumerate() {
        let (left, right) = match entry {
            MergeEntry::Pair(l, r) => (l.as_str(), r.as_str()),
            MergeEntry::Joined(joined) => joined
                .split_once(' ')
                .ok_or_else(|| malformed(&format!("merge entry {joined:?} is not a pair")))?,
        };
        let left_bytes = key_to_bytes(left, settings.byte_level, &inverse);
        let right_bytes = key_to_bytes(right, settings.byte_level, &inverse);
        let left_id = *by_bytes.get(left_bytes.as_slice()).ok_or_else(|| {
            TokenizerError::InvariantViolation(format!(
                "merge pair side {left:?} missing from vocabulary"
            ))
        })?;
        let right_id = *by_bytes.get(right_bytes.as_slice()).ok_or_else(|| {
            TokenizerError::InvariantViolation(format!(
                "merge pair side {right:?} missing from vocabulary"
            ))
        })?;
        let mut merged = left_bytes;
        merged.extend_from_slice(&right_bytes);
        let merged_id = *by_bytes.get(merged.as_slice()).ok_or_else(|| {
            TokenizerError::InvariantViolation(format!(
                "merge result of {left:?} + {right:?} missing from vocabulary"
            ))
        })?;
        pair_ranks.insert((left_id, right_id), (rank as u32, merged_id));
    }

    let mut special_tokens = BTreeSet::new();
    let mut added_entries = Vec::new();
    for added in &file.added_tokens {
        if added.special {
            special_tokens.insert(added.content.clone());
        }
        // Keep added tokens decodable even when absent from the model vocab.
        if !by_bytes.contains_key(added.content.as_bytes()) {
            added_entries.push((added.content.as_bytes().to_vec(), added.id));
        }
    }
    drop(by_bytes);
    entries.extend(added_entries);

    build_spec(
        name.to_owned(),
        entries,
        MergeTable::Pairs(pair_ranks),
        pattern,
        settings.byte_level,
        settings.add_prefix_space,
        file.model.ignore_merges,
        special_tokens,
    )
}
