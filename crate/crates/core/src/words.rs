//! Words over finite generator alphabets: parsing, formatting and free
//! reduction.
//!
//! The wire syntax is a whitespace-separated list of tokens `NAMEINDEX` with
//! an optional `^-1` suffix, e.g. `x1 x2^-1` or `b1 a1 b1^-1`. Powers are
//! written as repeated letters. Generator names are fixed per kind: `a` for
//! lamp generators, `b` for translations of the base lattice, `x` for free
//! metabelian generators.

use std::fmt;
use std::io::{self, BufRead};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GeneratorKind {
    Lamp,
    Translation,
    Metabelian,
}

impl GeneratorKind {
    pub fn name(self) -> char {
        match self {
            GeneratorKind::Lamp => 'a',
            GeneratorKind::Translation => 'b',
            GeneratorKind::Metabelian => 'x',
        }
    }

    pub fn from_name(c: char) -> Option<Self> {
        match c {
            'a' => Some(GeneratorKind::Lamp),
            'b' => Some(GeneratorKind::Translation),
            'x' => Some(GeneratorKind::Metabelian),
            _ => None,
        }
    }

    fn family(self) -> Family {
        match self {
            GeneratorKind::Lamp | GeneratorKind::Translation => Family::Wreath,
            GeneratorKind::Metabelian => Family::Metabelian,
        }
    }
}

/// Which kind of group a word's letters belong to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    Wreath,
    Metabelian,
}

impl Family {
    fn label(self) -> &'static str {
        match self {
            Family::Wreath => "wreath",
            Family::Metabelian => "metabelian",
        }
    }
}

/// A generator with a 1-based index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub index: u32,
}

impl Generator {
    pub fn new(kind: GeneratorKind, index: u32) -> Self {
        Generator { kind, index }
    }

    pub fn lamp(index: u32) -> Self {
        Generator::new(GeneratorKind::Lamp, index)
    }

    pub fn translation(index: u32) -> Self {
        Generator::new(GeneratorKind::Translation, index)
    }

    pub fn metabelian(index: u32) -> Self {
        Generator::new(GeneratorKind::Metabelian, index)
    }

    /// 0-based index, convenient for indexing vectors.
    pub fn slot(&self) -> usize {
        self.index as usize - 1
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn of(value: i64) -> Self {
        if value < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter {
    pub generator: Generator,
    pub sign: Sign,
}

impl Letter {
    pub fn new(generator: Generator, sign: Sign) -> Self {
        Letter { generator, sign }
    }

    pub fn inverse(self) -> Self {
        Letter::new(self.generator, self.sign.flip())
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.sign != other.sign
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.generator.kind.name(), self.generator.index)?;
        if self.sign == Sign::Minus {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// A finite letter sequence. `reduced` is set only by operations that
/// guarantee no adjacent cancelling pair.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word {
    letters: Vec<Letter>,
    reduced: bool,
}

impl Word {
    pub fn empty() -> Self {
        Word {
            letters: Vec::new(),
            reduced: true,
        }
    }

    /// Wraps a letter sequence without reducing it.
    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word {
            reduced: letters.is_empty(),
            letters,
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// The family of the word's letters; `None` for the empty word.
    pub fn family(&self) -> Option<Family> {
        self.letters.first().map(|l| l.generator.kind.family())
    }

    pub fn push(&mut self, letter: Letter) {
        self.letters.push(letter);
        self.reduced = false;
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_word(self))
    }
}

/// The generator names and ranks accepted by [`parse_word`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    ranks: Vec<(GeneratorKind, u32)>,
}

impl Alphabet {
    pub fn new(ranks: Vec<(GeneratorKind, u32)>) -> Self {
        Alphabet { ranks }
    }

    pub fn metabelian(rank: u32) -> Self {
        Alphabet::new(vec![(GeneratorKind::Metabelian, rank)])
    }

    pub fn wreath(lamp_generators: u32, base_rank: u32) -> Self {
        Alphabet::new(vec![
            (GeneratorKind::Lamp, lamp_generators),
            (GeneratorKind::Translation, base_rank),
        ])
    }

    pub fn rank(&self, kind: GeneratorKind) -> Option<u32> {
        self.ranks.iter().find(|(k, _)| *k == kind).map(|(_, r)| *r)
    }

    /// Every letter of the alphabet, in the order `g1, g1^-1, g2, …`.
    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for &(kind, rank) in &self.ranks {
            for index in 1..=rank {
                let g = Generator::new(kind, index);
                out.push(Letter::new(g, Sign::Plus));
                out.push(Letter::new(g, Sign::Minus));
            }
        }
        out
    }

    pub fn contains(&self, g: Generator) -> bool {
        self.rank(g.kind).is_some_and(|r| g.index >= 1 && g.index <= r)
    }
}

pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word> {
    let letters = text
        .split_whitespace()
        .enumerate()
        .map(|(i, tok)| parse_token(tok, i + 1, alphabet))
        .collect::<Result<Vec<_>>>()?;
    Ok(Word {
        letters,
        reduced: false,
    })
}

fn parse_token(tok: &str, position: usize, alphabet: &Alphabet) -> Result<Letter> {
    let err = |reason: String| Error::Parse {
        position,
        token: tok.to_string(),
        reason,
    };
    let (body, sign) = match tok.split_once('^') {
        None => (tok, Sign::Plus),
        Some((body, "-1")) => (body, Sign::Minus),
        Some((_, exp)) => return Err(err(format!("malformed exponent `^{exp}` (only `^-1` is allowed)"))),
    };
    let mut chars = body.chars();
    let name = chars.next().ok_or_else(|| err("missing generator name".into()))?;
    let kind = GeneratorKind::from_name(name)
        .filter(|k| alphabet.rank(*k).is_some())
        .ok_or_else(|| err(format!("unknown generator name `{name}`")))?;
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("expected a decimal generator index".into()));
    }
    let index: u32 = digits.parse().map_err(|_| err("generator index too large".into()))?;
    if index == 0 {
        return Err(err("index 0 is invalid (indices start at 1)".into()));
    }
    let rank = alphabet.rank(kind).unwrap_or(0);
    if index > rank {
        return Err(err(format!("index {index} exceeds rank {rank}")));
    }
    Ok(Letter::new(Generator::new(kind, index), sign))
}

pub fn format_word(w: &Word) -> String {
    let mut out = String::new();
    for (i, l) in w.letters.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&l.to_string());
    }
    out
}

pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in &w.letters {
        match stack.last() {
            Some(&top) if top.cancels(l) => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Word {
        letters: stack,
        reduced: true,
    }
}

pub fn invert(w: &Word) -> Word {
    Word {
        letters: w.letters.iter().rev().map(|l| l.inverse()).collect(),
        reduced: w.reduced,
    }
}

/// Juxtaposition followed by free reduction.
pub fn concat(u: &Word, v: &Word) -> Result<Word> {
    if let (Some(a), Some(b)) = (u.family(), v.family()) {
        if a != b {
            return Err(Error::AlphabetMismatch {
                left: a.label(),
                right: b.label(),
            });
        }
    }
    let mut letters = Vec::with_capacity(u.len() + v.len());
    letters.extend_from_slice(&u.letters);
    letters.extend_from_slice(&v.letters);
    Ok(free_reduce(&Word::from_letters(letters)))
}

/// Entries of a word file: one word per line, `#` comments skipped, blank
/// lines kept as the identity word. Yields `(line_number, trimmed_text)`.
pub fn word_file_entries<R: BufRead>(reader: R) -> impl Iterator<Item = io::Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e)),
        Ok(line) => {
            let t = line.trim();
            if t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(i: u32, s: Sign) -> Letter {
        Letter::new(Generator::metabelian(i), s)
    }

    fn meta2() -> Alphabet {
        Alphabet::metabelian(2)
    }

    #[test]
    fn parse_examples() {
        let w = parse_word("x1 x2^-1", &meta2()).unwrap();
        assert_eq!(w.letters(), &[x(1, Sign::Plus), x(2, Sign::Minus)]);
        assert!(!w.is_reduced());

        let w = parse_word("x1 x1^-1", &meta2()).unwrap();
        assert_eq!(w.len(), 2);

        assert!(parse_word("", &meta2()).unwrap().is_empty());
    }

    #[test]
    fn parse_errors_report_position() {
        let cases = [
            ("x0", 1, "index 0"),
            ("x1 x3", 2, "exceeds rank"),
            ("x1 y1", 2, "unknown generator"),
            ("x1 x1 x2^2", 3, "malformed exponent"),
            ("x1^", 1, "malformed exponent"),
            ("x", 1, "decimal"),
            ("x1a", 1, "decimal"),
            ("a1", 1, "unknown generator"),
        ];
        for (text, pos, needle) in cases {
            match parse_word(text, &meta2()) {
                Err(Error::Parse { position, reason, .. }) => {
                    assert_eq!(position, pos, "{text}");
                    assert!(reason.contains(needle), "{text}: {reason}");
                }
                other => panic!("{text}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn wreath_alphabet_parses_lamps_and_translations() {
        let w = parse_word("b1 a1 b2^-1", &Alphabet::wreath(1, 2)).unwrap();
        assert_eq!(w.letters()[1].generator, Generator::lamp(1));
        assert_eq!(w.family(), Some(Family::Wreath));
        assert!(parse_word("a2", &Alphabet::wreath(1, 2)).is_err());
    }

    #[test]
    fn free_reduce_examples() {
        let w = Word::from_letters(vec![x(1, Sign::Plus), x(1, Sign::Minus)]);
        assert!(free_reduce(&w).is_empty());
        let w = Word::from_letters(vec![
            x(1, Sign::Plus),
            x(2, Sign::Plus),
            x(2, Sign::Minus),
            x(1, Sign::Plus),
        ]);
        let r = free_reduce(&w);
        assert_eq!(r.letters(), &[x(1, Sign::Plus), x(1, Sign::Plus)]);
        assert!(r.is_reduced());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(
            invert(&Word::from_letters(vec![x(1, Sign::Plus)])).letters(),
            &[x(1, Sign::Minus)]
        );
        assert!(invert(&Word::empty()).is_empty());
        assert_eq!(
            invert(&Word::from_letters(vec![x(1, Sign::Plus), x(2, Sign::Minus)])).letters(),
            &[x(2, Sign::Plus), x(1, Sign::Minus)]
        );
    }

    #[test]
    fn concat_examples() {
        let a = meta2();
        let p = |s| parse_word(s, &a).unwrap();
        assert!(concat(&p("x1"), &p("x1^-1")).unwrap().is_empty());
        let w = p("x2 x1 x1^-1");
        assert_eq!(concat(&Word::empty(), &w).unwrap(), free_reduce(&w));
        assert_eq!(format_word(&concat(&p("x1 x2"), &p("x2^-1 x2")).unwrap()), "x1 x2");

        let wr = parse_word("a1", &Alphabet::wreath(1, 1)).unwrap();
        assert!(matches!(concat(&p("x1"), &wr), Err(Error::AlphabetMismatch { .. })));
    }

    #[test]
    fn format_examples() {
        let w = Word::from_letters(vec![x(1, Sign::Plus), x(2, Sign::Minus)]);
        assert_eq!(format_word(&w), "x1 x2^-1");
        assert_eq!(format_word(&Word::empty()), "");
    }

    #[test]
    fn word_file_skips_comments_and_keeps_blank_lines() {
        let text = "# header\nx1 x2\n\n  # indented comment\nx2^-1\n";
        let entries: Vec<_> = word_file_entries(text.as_bytes()).map(|e| e.unwrap()).collect();
        assert_eq!(
            entries,
            vec![(2, "x1 x2".to_string()), (3, String::new()), (5, "x2^-1".to_string())]
        );
    }

    /// Rewriting oracle: delete the leftmost cancelling pair until none is left.
    fn reduce_by_rewriting(mut letters: Vec<Letter>) -> Vec<Letter> {
        loop {
            let Some(i) = (1..letters.len()).find(|&i| letters[i - 1].cancels(letters[i])) else {
                return letters;
            };
            letters.drain(i - 1..=i);
        }
    }

    fn arb_word(rank: u32, max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((1..=rank, any::<bool>()), 0..max_len).prop_map(|v| {
            Word::from_letters(
                v.into_iter()
                    .map(|(i, neg)| x(i, if neg { Sign::Minus } else { Sign::Plus }))
                    .collect(),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn word_times_inverse_reduces_to_empty(w in arb_word(3, 30)) {
            let ww = concat(&w, &invert(&w)).unwrap();
            prop_assert!(ww.is_empty());
            let mut raw = w.letters().to_vec();
            raw.extend(invert(&w).letters());
            prop_assert!(reduce_by_rewriting(raw).is_empty());
        }

        #[test]
        fn free_reduce_matches_rewriting(w in arb_word(2, 40)) {
            let r = free_reduce(&w);
            prop_assert_eq!(r.letters(), &reduce_by_rewriting(w.letters().to_vec())[..]);
            prop_assert_eq!(free_reduce(&r), r.clone());
            prop_assert!(r.len() <= w.len());
            prop_assert_eq!(r.len() % 2, w.len() % 2);
        }

        #[test]
        fn parse_format_round_trip(w in arb_word(4, 30)) {
            let text = format_word(&w);
            let back = parse_word(&text, &Alphabet::metabelian(4)).unwrap();
            prop_assert_eq!(back.letters(), w.letters());
        }
    }
}
