//! Built-in pre-tokenization patterns for well-known tokenizer families.
//!
//! Rank-file tokenizers carry no pre-tokenizer of their own, so the split
//! pattern must be supplied by the caller; these constants cover the families
//! the toolkit is normally run with. Serialized-JSON tokenizers embed their
//! pattern and do not need this table.

/// The classic GPT-2 split pattern, also the implied pattern of byte-level
/// pre-tokenizers that enable their built-in regex.
pub const GPT2_PATTERN: &str =
    r"'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+";

/// cl100k-style pattern (Llama 3.x and Gemma-class tokenizers).
pub const CL100K_STYLE_PATTERN: &str = r"(?i:'s|'t|'re|'ve|'m|'ll|'d)|[^\r\n\p{L}\p{N}]?\p{L}+|\p{N}{1,3}| ?[^\s\p{L}\p{N}]+[\r\n]*|\s*[\r\n]+|\s+(?!\S)|\s+";

/// Qwen-style pattern: single-digit numerics, otherwise cl100k-like.
pub const QWEN_PATTERN: &str = r"(?i:'s|'t|'re|'ve|'m|'ll|'d)|[^\r\n\p{L}\p{N}]?\p{L}+|\p{N}| ?[^\s\p{L}\p{N}]+[\r\n]*|\s*[\r\n]+|\s+(?!\S)|\s+";

/// o200k-style pattern (GPT-4o-class tokenizers).
pub const O200K_STYLE_PATTERN: &str = r"[^\r\n\p{L}\p{N}]?[\p{Lu}\p{Lt}\p{Lm}\p{Lo}\p{M}]*[\p{Ll}\p{Lm}\p{Lo}\p{M}]+(?i:'s|'t|'re|'ve|'m|'ll|'d)?|[^\r\n\p{L}\p{N}]?[\p{Lu}\p{Lt}\p{Lm}\p{Lo}\p{M}]+[\p{Ll}\p{Lm}\p{Lo}\p{M}]*(?i:'s|'t|'re|'ve|'m|'ll|'d)?|\p{N}{1,3}| ?[^\s\p{L}\p{N}]+[\r\n/]*|\s*[\r\n]+|\s+(?!\S)|\s+";

/// Look up the built-in pattern for a tokenizer family name.
pub fn builtin_pattern(family: &str) -> Option<&'static str> {
    match family {
        "gpt2" => Some(GPT2_PATTERN),
        "qwen3" => Some(QWEN_PATTERN),
        "llama3.2" | "gemma3" => Some(CL100K_STYLE_PATTERN),
        "gpt4o" => Some(O200K_STYLE_PATTERN),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_families_resolve() {
        for family in ["gpt2", "qwen3", "llama3.2", "gemma3", "gpt4o"] {
            assert!(builtin_pattern(family).is_some(), "{family}");
        }
        assert!(builtin_pattern("wordpiece").is_none());
    }

    #[test]
    fn patterns_compile() {
        for pat in [
            GPT2_PATTERN,
            CL100K_STYLE_PATTERN,
            QWEN_PATTERN,
            O200K_STYLE_PATTERN,
        ] {
            fancy_regex::Regex::new(pat).expect("pattern must compile");
        }
    }
}
