//! Whitespace normalization with a map back to original byte offsets.

use std::ops::Range;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedText {
    /// The text with every Unicode whitespace character removed.
    pub chars: String,
    /// Original byte offset of each normalized character.
    pub index_map: Vec<usize>,
    /// Byte offset of each normalized character within `chars`, plus a final
    /// entry equal to `chars.len()`.
    byte_starts: Vec<usize>,
    /// Byte length in the original text of each normalized character.
    widths: Vec<u8>,
}

pub fn normalize(text: &str) -> NormalizedText {
    let mut chars = String::with_capacity(text.len());
    let mut index_map = Vec::new();
    let mut byte_starts = Vec::new();
    let mut widths = Vec::new();
    for (offset, c) in text.char_indices() {
        if c.is_whitespace() {
            continue;
        }
        index_map.push(offset);
        byte_starts.push(chars.len());
        widths.push(c.len_utf8() as u8);
        chars.push(c);
    }
    byte_starts.push(chars.len());
    NormalizedText {
        chars,
        index_map,
        byte_starts,
        widths,
    }
}

impl NormalizedText {
    /// Number of normalized characters.
    pub fn len(&self) -> usize {
        self.index_map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_map.is_empty()
    }

    /// The normalized characters `start..start + width` as a string slice.
    pub fn window(&self, start: usize, width: usize) -> &str {
        &self.chars[self.byte_starts[start]..self.byte_starts[start + width]]
    }

    /// Every width-`width` window, stride 1, in order.
    pub fn windows(&self, width: usize) -> impl Iterator<Item = &str> + '_ {
        let count = (self.len() + 1).saturating_sub(width);
        let count = if width == 0 { 0 } else { count };
        (0..count).map(move |i| self.window(i, width))
    }

    /// Projects a normalized character range onto the original text.
    pub fn original_range(&self, range: Range<usize>) -> Range<usize> {
        if range.is_empty() {
            let at = self.index_map.get(range.start).copied().unwrap_or(0);
            return at..at;
        }
        let last = range.end - 1;
        self.index_map[range.start]..self.index_map[last] + usize::from(self.widths[last])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_whitespace_and_maps_offsets() {
        let n = normalize("a  b\n\tc");
        assert_eq!(n.chars, "abc");
        assert_eq!(n.index_map, [0, 3, 6]);
        assert!(normalize(" \n\t\u{a0}").is_empty());
    }

    #[test]
    fn windows_and_projection() {
        let n = normalize("ab c\u{e9}d");
        assert_eq!(n.windows(2).collect::<Vec<_>>(), ["ab", "bc", "c\u{e9}", "\u{e9}d"]);
        assert_eq!(n.windows(9).count(), 0);
        assert_eq!(n.original_range(1..3), 1..4);
        assert_eq!(&"ab c\u{e9}d"[n.original_range(2..4)], "c\u{e9}");
    }

    #[test]
    fn idempotent() {
        let once = normalize(" x = 1 \n y\t= 2 ");
        assert_eq!(normalize(&once.chars).chars, once.chars);
    }
}
