use super::{Sentence, Token};

/// Rule-based sentence and token splitter used when no external parse is
/// available. Sentences end at `.`, `!` or `?` followed by whitespace; tokens
/// split on whitespace with leading and trailing ASCII punctuation peeled off
/// into tokens of their own. Surfaces are left in their original case and
/// internal punctuation (as in "don't") is kept.
pub fn tokenize(text: &str) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            if let Some(&(_, next)) = chars.peek() {
                if next.is_whitespace() {
                    let end = i + c.len_utf8();
                    push_sentence(&mut sentences, &text[start..end]);
                    start = end;
                }
            }
        }
    }
    push_sentence(&mut sentences, &text[start..]);
    sentences
}

fn push_sentence(sentences: &mut Vec<Sentence>, chunk: &str) {
    let tokens = split_tokens(chunk);
    if !tokens.is_empty() {
        sentences.push(Sentence {
            tokens: tokens.into_iter().map(Token::new).collect(),
            sentiment: None,
            phrases: Vec::new(),
        });
    }
}

fn split_tokens(chunk: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in chunk.split_whitespace() {
        let chars: Vec<char> = word.chars().collect();
        let mut lo = 0;
        let mut hi = chars.len();
        while lo < hi && chars[lo].is_ascii_punctuation() {
            lo += 1;
        }
        while hi > lo && chars[hi - 1].is_ascii_punctuation() {
            hi -= 1;
        }
        for &c in &chars[..lo] {
            out.push(c.to_string());
        }
        if lo < hi {
            out.push(chars[lo..hi].iter().collect());
        }
        for &c in &chars[hi..] {
            out.push(c.to_string());
        }
    }
    out
}
