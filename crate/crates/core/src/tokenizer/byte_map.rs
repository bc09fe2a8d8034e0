//! Printable-unicode byte remapping used by byte-level BPE vocabularies.
//!
//! Serialized byte-level vocabularies store token bytes as strings over a
//! 256-character alphabet: printable latin bytes map to themselves and the
//! rest are shifted into the U+0100.. range. This table inverts that mapping
//! so raw token bytes can be recovered from vocabulary keys.

use std::collections::HashMap;

/// Byte -> stand-in character table, index is the byte value.
pub(crate) fn byte_to_char_table() -> [char; 256] {
    let mut printable: Vec<u8> = Vec::with_capacity(188);
    printable.extend(b'!'..=b'~');
    printable.extend(0xA1u8..=0xAC);
    printable.extend(0xAEu8..=0xFF);

    let mut table = ['\0'; 256];
    let mut shifted = 0u32;
    for b in 0..=255u8 {
        table[b as usize] = if printable.contains(&b) {
            char::from(b)
        } else {
            let c = char::from_u32(256 + shifted).expect("remap char in range");
            shifted += 1;
            c
        };
    }
    table
}

/// Inverse of [`byte_to_char_table`]: stand-in character -> byte.
pub(crate) fn char_to_byte_map() -> HashMap<char, u8> {
    byte_to_char_table()
        .iter()
        .enumerate()
        .map(|(b, &c)| (c, b as u8))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_a_bijection() {
        let table = byte_to_char_table();
        let inverse = char_to_byte_map();
        assert_eq!(inverse.len(), 256);
        for b in 0..=255u8 {
            assert_eq!(inverse[&table[b as usize]], b);
        }
    }

    #[test]
    fn printable_ascii_maps_to_itself() {
        let table = byte_to_char_table();
        assert_eq!(table[b'A' as usize], 'A');
        assert_eq!(table[b'~' as usize], '~');
        // Space and newline are outside the printable range and get shifted.
        assert_eq!(table[b' ' as usize], '\u{0120}');
        assert_eq!(table[b'\n' as usize], '\u{010A}');
    }
}
