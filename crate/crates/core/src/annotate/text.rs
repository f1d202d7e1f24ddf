use super::Token;
use crate::error::{Error, Result};

const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "jr.", "sr.", "e.g.", "i.e.", "vs.", "etc.",
    "gen.", "col.", "lt.", "mt.", "inc.", "ltd.", "co.", "approx.",
];

const TRAILING: &[char] = &['.', ',', '?', '!', ';', ':', ')', '"'];
const LEADING: &[char] = &['(', '"'];

/// Tokens that attach to the previous token when rendering.
fn attaches_left(token: &str) -> bool {
    matches!(token, "." | "," | "?" | "!" | ";" | ":" | ")" | "'s" | "’s")
}

pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_ascii_punctuation()) && token != "'s"
}

pub(crate) fn space_before(prev: &str, token: &str) -> bool {
    !attaches_left(token) && prev != "("
}

/// Joins tokens back into text: no space before closing punctuation or "'s".
pub fn detokenize<'a>(tokens: impl IntoIterator<Item = &'a str>) -> String {
    let mut out = String::new();
    let mut prev: Option<&str> = None;
    for token in tokens {
        if let Some(p) = prev {
            if space_before(p, token) {
                out.push(' ');
            }
        }
        out.push_str(token);
        prev = Some(token);
    }
    out
}

fn is_abbreviation(word: &str) -> bool {
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    let chars: Vec<char> = word.chars().collect();
    // initials such as "A." and dotted acronyms such as "U.S."
    if chars.len() == 2 && chars[0].is_uppercase() && chars[1] == '.' {
        return true;
    }
    chars.len() >= 4
        && chars.len().is_multiple_of(2)
        && chars
            .chunks(2)
            .all(|pair| pair[0].is_alphabetic() && pair[1] == '.')
}

/// Splits a whitespace-free chunk into tokens.
fn split_chunk(chunk: &str) -> Vec<&str> {
    let count = chunk.chars().count();
    if count > 1 {
        let first = chunk.chars().next().unwrap();
        if LEADING.contains(&first) {
            let (head, rest) = chunk.split_at(first.len_utf8());
            let mut out = vec![head];
            out.extend(split_chunk(rest));
            return out;
        }
        if is_abbreviation(chunk) {
            return vec![chunk];
        }
        let last = chunk.chars().next_back().unwrap();
        if TRAILING.contains(&last) {
            let (rest, tail) = chunk.split_at(chunk.len() - last.len_utf8());
            let mut out = split_chunk(rest);
            out.push(tail);
            return out;
        }
        for possessive in ["'s", "’s"] {
            if let Some(rest) = chunk.strip_suffix(possessive) {
                if !rest.is_empty() {
                    let mut out = split_chunk(rest);
                    out.push(&chunk[rest.len()..]);
                    return out;
                }
            }
        }
    }
    vec![chunk]
}

/// Whitespace tokenization with terminal punctuation and possessive "'s" split off.
pub fn tokenize(sentence: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut char_pos = 0;
    let mut chunk_start: Option<(usize, usize)> = None; // (byte, char)
    let push_chunk = |start: (usize, usize), end_byte: usize, tokens: &mut Vec<Token>| {
        let chunk = &sentence[start.0..end_byte];
        let mut offset = start.1;
        for piece in split_chunk(chunk) {
            tokens.push(Token {
                text: piece.to_string(),
                index: tokens.len(),
                char_offset: offset,
            });
            offset += piece.chars().count();
        }
    };
    for (byte, c) in sentence.char_indices() {
        if c.is_whitespace() {
            if let Some(start) = chunk_start.take() {
                push_chunk(start, byte, &mut tokens);
            }
        } else if chunk_start.is_none() {
            chunk_start = Some((byte, char_pos));
        }
        char_pos += 1;
    }
    if let Some(start) = chunk_start {
        push_chunk(start, sentence.len(), &mut tokens);
    }
    if tokens.is_empty() {
        return Err(Error::EmptySentence);
    }
    Ok(tokens)
}

/// Splits running text into sentences at `.`, `!` or `?` followed by
/// whitespace and a capital letter, skipping known abbreviations and initials.
/// Internal whitespace of each sentence is collapsed to single spaces.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if matches!(chars[i], '.' | '!' | '?') {
            let mut end = i + 1;
            while end < chars.len() && matches!(chars[end], '"' | ')' | '\'') {
                end += 1;
            }
            let mut next = end;
            while next < chars.len() && chars[next].is_whitespace() {
                next += 1;
            }
            let mut probe = next;
            while probe < chars.len() && matches!(chars[probe], '"' | '(') {
                probe += 1;
            }
            let boundary = next > end
                && probe < chars.len()
                && chars[probe].is_uppercase()
                && !(chars[i] == '.' && is_abbreviation(&word_before(&chars, i)));
            if boundary {
                push_sentence(&mut sentences, &chars[start..end]);
                start = next;
                i = next;
                continue;
            }
        }
        i += 1;
    }
    push_sentence(&mut sentences, &chars[start..]);
    sentences
}

fn word_before(chars: &[char], dot: usize) -> String {
    let mut begin = dot;
    while begin > 0 && !chars[begin - 1].is_whitespace() {
        begin -= 1;
    }
    chars[begin..=dot]
        .iter()
        .collect::<String>()
        .trim_start_matches(['(', '"'])
        .to_string()
}

fn push_sentence(out: &mut Vec<String>, chars: &[char]) {
    let s: String = chars.iter().collect();
    let normalized = s.split_whitespace().collect::<Vec<_>>().join(" ");
    if !normalized.is_empty() {
        out.push(normalized);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn texts(s: &str) -> Vec<String> {
        tokenize(s).unwrap().into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn splits_terminal_punctuation() {
        assert_eq!(
            texts("Peter Sagan comes from Slovakia."),
            ["Peter", "Sagan", "comes", "from", "Slovakia", "."]
        );
        let q = texts("Is Egypt situated in the north?");
        assert_eq!(q.len(), 7);
        assert_eq!(&q[5..], ["north", "?"]);
        assert_eq!(texts("A"), ["A"]);
    }

    #[test]
    fn possessive_and_abbreviations() {
        assert_eq!(
            texts("Slovakia's capital."),
            ["Slovakia", "'s", "capital", "."]
        );
        assert_eq!(
            texts("Dr. Who, e.g. him."),
            ["Dr.", "Who", ",", "e.g.", "him", "."]
        );
        assert_eq!(texts("(born 1962)"), ["(", "born", "1962", ")"]);
    }

    #[test]
    fn offsets_are_character_positions() {
        let toks = tokenize("Žilina  is nice.").unwrap();
        let offsets: Vec<usize> = toks.iter().map(|t| t.char_offset).collect();
        assert_eq!(offsets, [0, 8, 11, 15]);
    }

    #[test]
    fn blank_sentence_is_an_error() {
        assert!(matches!(tokenize("   \t"), Err(Error::EmptySentence)));
    }

    #[test]
    fn sentence_splitting() {
        assert!(split_sentences("").is_empty());
        assert_eq!(
            split_sentences("Peter Sagan comes from Slovakia."),
            ["Peter Sagan comes from Slovakia."]
        );
        assert_eq!(
            split_sentences("The capital of Czechia is Prague. Peter Sagan comes from Slovakia."),
            [
                "The capital of Czechia is Prague.",
                "Peter Sagan comes from Slovakia."
            ]
        );
        assert_eq!(
            split_sentences("Mr. Kiska met Dr. Havel.  A. Kiska is\n president! Really?"),
            [
                "Mr. Kiska met Dr. Havel.",
                "A. Kiska is president!",
                "Really?"
            ]
        );
        assert_eq!(
            split_sentences("It costs 3.5 euro. ok"),
            ["It costs 3.5 euro. ok"]
        );
    }

    #[test]
    fn detokenize_attaches_punctuation() {
        assert_eq!(
            detokenize(["Who", "is", "the", "president", "of", "Slovakia", "?"]),
            "Who is the president of Slovakia?"
        );
        assert_eq!(detokenize(["(", "born", ")", ","]), "(born),");
    }

    proptest! {
        #[test]
        fn retokenizing_joined_tokens_is_a_fixed_point(s in "[A-Za-z'.,?!;:()\" ]{1,40}") {
            if let Ok(tokens) = tokenize(&s) {
                let first: Vec<String> = tokens.iter().map(|t| t.text.clone()).collect();
                prop_assert!(first.iter().all(|t| !t.is_empty()));
                let again = texts(&first.join(" "));
                prop_assert_eq!(first, again);
            }
        }

        #[test]
        fn split_covers_all_non_whitespace(s in "[A-Za-z.!? ]{0,60}") {
            let joined: String = split_sentences(&s).concat();
            let strip = |x: &str| x.chars().filter(|c| !c.is_whitespace()).collect::<String>();
            prop_assert_eq!(strip(&joined), strip(&s));
        }
    }
}
