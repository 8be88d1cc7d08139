use alloc::vec::Vec;

use super::ModelConfig;

pub const PADDING_CODE: u32 = 0;
/// Code of `'?'`, used for characters outside the vocabulary.
pub const REPLACEMENT_CODE: u32 = b'?' as u32;

/// A title as a fixed-length sequence of character codes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EncodedTitle {
    pub codes: Vec<u32>,
}

impl EncodedTitle {
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

impl From<Vec<u32>> for EncodedTitle {
    fn from(codes: Vec<u32>) -> Self {
        Self { codes }
    }
}

/// Maps `text` to exactly `buffer_size` codes: one code per character, tail
/// truncated, right-padded with [`PADDING_CODE`].
///
/// Characters whose code point is not below `vocab_size` become `'?'`. For
/// vocabularies too small to hold `'?'` the last code is used instead.
pub fn encode_title(text: &str, config: &ModelConfig) -> EncodedTitle {
    let vocab = config.vocab_size as u32;
    let replacement = if REPLACEMENT_CODE < vocab {
        REPLACEMENT_CODE
    } else {
        vocab.saturating_sub(1)
    };
    let mut codes: Vec<u32> = text
        .chars()
        .take(config.buffer_size)
        .map(|c| {
            let code = c as u32;
            if code < vocab {
                code
            } else {
                replacement
            }
        })
        .collect();
    codes.resize(config.buffer_size, PADDING_CODE);
    EncodedTitle { codes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config(buffer_size: usize) -> ModelConfig {
        ModelConfig {
            buffer_size,
            ..ModelConfig::default()
        }
    }

    #[test]
    fn ascii_values_and_padding() {
        assert_eq!(encode_title("abc", &config(5)).codes, [97, 98, 99, 0, 0]);
    }

    #[test]
    fn truncates_tail() {
        assert_eq!(
            encode_title("hello!!", &config(5)).codes,
            [104, 101, 108, 108, 111]
        );
    }

    #[test]
    fn empty_is_all_padding() {
        assert_eq!(encode_title("", &config(4)).codes, [0, 0, 0, 0]);
    }

    #[test]
    fn non_ascii_becomes_question_mark() {
        assert_eq!(encode_title("é€a", &config(3)).codes, [63, 63, 97]);
    }

    #[test]
    fn tiny_vocab_falls_back_to_last_code() {
        let cfg = ModelConfig::tiny(6, 8, 2, 1, 2);
        assert_eq!(encode_title("\u{3}z", &cfg).codes, [3, 7, 0, 0, 0, 0]);
    }

    proptest! {
        #[test]
        fn length_and_range_invariant(text in ".{0,200}", buffer in 6usize..120) {
            let cfg = config(buffer);
            let enc = encode_title(&text, &cfg);
            prop_assert_eq!(enc.len(), buffer);
            prop_assert!(enc.codes.iter().all(|&c| (c as usize) < cfg.vocab_size));
        }
    }
}
