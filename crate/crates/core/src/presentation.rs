//! Alphabets, finite presentations and their text format.
//!
//! ```text
//! gens: x, y
//! rels: x^2, y^4, (x*y)^8
//! ```
//!
//! `word ::= term ('*' term)*`, `term ::= atom ('^' integer)*`,
//! `atom ::= name | '(' word ')'`. Whitespace is ignored, `#` starts a
//! comment. Relators are freely and cyclically reduced on ingest.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::word::{free_reduce, Letter, Word};

#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut lookup = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(Error::InvalidName(n.clone()));
            }
            if lookup.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateGenerator(n.clone()));
            }
        }
        Ok(Alphabet { names, lookup })
    }

    /// Generators named `prefix1, prefix2, ...`.
    pub fn numbered(prefix: &str, n: usize) -> Self {
        Alphabet::new((1..=n).map(|i| format!("{prefix}{i}"))).expect("numbered names are valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    /// Resolves `x` or `x^-1`.
    pub fn letter(&self, symbol: &str) -> Result<Letter> {
        let s = symbol.trim();
        let (name, inverse) = match s.strip_suffix("^-1") {
            Some(n) => (n.trim_end(), true),
            None => (s, false),
        };
        self.index_of(name)
            .map(|g| Letter::new(g, inverse))
            .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
    }

    pub fn symbol(&self, l: Letter) -> String {
        if l.is_inverse() {
            format!("{}^-1", self.names[l.generator()])
        } else {
            self.names[l.generator()].clone()
        }
    }

    /// Freely reduces a sequence of symbols such as `["x", "y^-1"]`.
    pub fn reduce_symbols(&self, symbols: &[&str]) -> Result<Word> {
        let letters = symbols
            .iter()
            .map(|s| self.letter(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(free_reduce(letters))
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.max_generator() {
            Some(g) if g >= self.len() => Err(Error::AlphabetMismatch {
                generator: g,
                ngens: self.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Formats a word with `*` and run-length powers, e.g. `x^2*y^-1`.
    /// The empty word prints as `1`.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        let letters = w.letters();
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let mut j = i;
            while j < letters.len() && letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64 * l.sign();
            let name = &self.names[l.generator()];
            parts.push(if run == 1 { name.clone() } else { format!("{name}^{run}") });
            i = j;
        }
        parts.join("*")
    }

    /// Parses a single word in the presentation syntax.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut p = Parser::new(text, 1, 1, self);
        let w = p.word()?;
        p.skip_ws();
        if let Some((col, c)) = p.peek() {
            return Err(p.err_at(col, format!("unexpected character {c:?}")));
        }
        Ok(w)
    }

    /// Parses a list of words separated by commas or newlines. Blank lines,
    /// `#` comments and an optional leading `subgroup:` keyword are ignored.
    pub fn parse_word_list(&self, text: &str) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            let (body, offset) = match line.trim_start().strip_prefix("subgroup:") {
                Some(rest) => (rest, line.len() - rest.len()),
                None => (line, 0),
            };
            let mut p = Parser::new(body, lineno + 1, offset + 1, self);
            out.extend(p.list()?);
        }
        Ok(out)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.names).finish()
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Generators plus cyclically reduced, non-empty relators.
#[derive(Clone, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    /// Validates letters and cyclically reduces every relator. A relator that
    /// reduces to the empty word is rejected.
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self> {
        let mut rels = Vec::with_capacity(relators.len());
        for (index, r) in relators.into_iter().enumerate() {
            alphabet.check_word(&r)?;
            let r = r.cyclically_reduced();
            if r.is_empty() {
                return Err(Error::EmptyRelator { index });
            }
            rels.push(r);
        }
        Ok(Presentation { alphabet, relators: rels })
    }

    /// Like [`Presentation::new`] but silently drops relators that reduce to
    /// the empty word.
    pub fn new_lossy(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self> {
        let kept = relators
            .into_iter()
            .map(|r| r.cyclically_reduced())
            .filter(|r| !r.is_empty())
            .collect();
        Presentation::new(alphabet, kept)
    }

    pub fn free(alphabet: Alphabet) -> Self {
        Presentation { alphabet, relators: Vec::new() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn ngens(&self) -> usize {
        self.alphabet.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Same alphabet, extra relators appended.
    pub fn with_relators(&self, extra: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut rels = self.relators.clone();
        rels.extend(extra);
        Presentation::new(self.alphabet.clone(), rels)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_presentation(text)
    }

    pub fn word(&self, text: &str) -> Result<Word> {
        self.alphabet.parse_word(text)
    }

    pub fn format_word(&self, w: &Word) -> String {
        self.alphabet.format_word(w)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gens: {}", self.alphabet.names().join(","))?;
        let rels: Vec<String> = self.relators.iter().map(|r| self.alphabet.format_word(r)).collect();
        if rels.is_empty() {
            writeln!(f, "rels:")
        } else {
            writeln!(f, "rels: {}", rels.join(", "))
        }
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses the two-line presentation format.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut gens: Option<(usize, usize, &str)> = None;
    let mut rels: Option<(usize, usize, &str)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - trimmed.len();
        let (slot, key) = if trimmed.starts_with("gens:") {
            (&mut gens, "gens:")
        } else if trimmed.starts_with("rels:") {
            (&mut rels, "rels:")
        } else {
            return Err(Error::Syntax {
                line: i + 1,
                column: indent + 1,
                message: "expected `gens:` or `rels:`".into(),
            });
        };
        if slot.is_some() {
            return Err(Error::Syntax {
                line: i + 1,
                column: indent + 1,
                message: format!("duplicate `{key}` line"),
            });
        }
        let body_start = indent + key.len();
        *slot = Some((i + 1, body_start + 1, &line[body_start..]));
    }
    let (gline, gcol, gbody) = gens.ok_or(Error::Syntax {
        line: 1,
        column: 1,
        message: "missing `gens:` line".into(),
    })?;
    let mut names = Vec::new();
    let mut col = gcol;
    for part in gbody.split(',') {
        let name = part.trim();
        let lead = part.len() - part.trim_start().len();
        if !valid_name(name) {
            return Err(Error::Syntax {
                line: gline,
                column: col + lead,
                message: format!("invalid generator name {name:?}"),
            });
        }
        names.push(name.to_string());
        col += part.len() + 1;
    }
    let alphabet = Alphabet::new(names).map_err(|e| Error::Syntax {
        line: gline,
        column: gcol,
        message: e.to_string(),
    })?;
    let relators = match rels {
        Some((line, col, body)) => Parser::new(body, line, col, &alphabet).list()?,
        None => Vec::new(),
    };
    Presentation::new(alphabet, relators)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col0: usize,
    alphabet: &'a Alphabet,
}

impl<'a> Parser<'a> {
    fn new(text: &str, line: usize, col0: usize, alphabet: &'a Alphabet) -> Self {
        Parser { chars: text.chars().collect(), pos: 0, line, col0, alphabet }
    }

    fn err_at(&self, pos: usize, message: String) -> Error {
        Error::Syntax { line: self.line, column: self.col0 + pos, message }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<(usize, char)> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&c| (self.pos, c))
    }

    fn list(&mut self) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        if self.peek().is_none() {
            return Ok(out);
        }
        loop {
            out.push(self.word()?);
            match self.peek() {
                None => return Ok(out),
                Some((_, ',')) => {
                    self.pos += 1;
                    if self.peek().is_none() {
                        return Ok(out);
                    }
                }
                Some((p, c)) => return Err(self.err_at(p, format!("unexpected character {c:?}"))),
            }
        }
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = self.term()?;
        while let Some((_, '*')) = self.peek() {
            self.pos += 1;
            w.mul_assign(&self.term()?);
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<Word> {
        let mut w = self.atom()?;
        while let Some((caret, '^')) = self.peek() {
            self.pos += 1;
            let n = self.integer(caret)?;
            w = w.pow(n);
        }
        Ok(w)
    }

    fn integer(&mut self, caret: usize) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.chars.get(self.pos) == Some(&'-') {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            return Err(self.err_at(caret, "expected an integer exponent after '^'".into()));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<i64>()
            .ok()
            .filter(|n| n.unsigned_abs() <= 1 << 20)
            .ok_or_else(|| self.err_at(start, format!("exponent {s} out of range")))
    }

    fn atom(&mut self) -> Result<Word> {
        match self.peek() {
            Some((_, '(')) => {
                self.pos += 1;
                let w = self.word()?;
                match self.peek() {
                    Some((_, ')')) => {
                        self.pos += 1;
                        Ok(w)
                    }
                    Some((p, c)) => Err(self.err_at(p, format!("expected ')' but found {c:?}"))),
                    None => Err(self.err_at(self.chars.len(), "expected ')'".into())),
                }
            }
            Some((_, '1')) => {
                self.pos += 1;
                Ok(Word::identity())
            }
            Some((p, c)) if c.is_ascii_alphabetic() || c == '_' => {
                let start = p;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match self.alphabet.index_of(&name) {
                    Some(g) => Ok(Word::letter(Letter::gen(g))),
                    None => Err(self.err_at(start, format!("unknown generator {name:?}"))),
                }
            }
            Some((p, c)) => Err(self.err_at(p, format!("unexpected character {c:?}"))),
            None => Err(self.err_at(self.chars.len(), "unexpected end of input".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_the_2_4_8_group() {
        let p = Presentation::parse("gens: x,y\nrels: x^2, y^4, (x*y)^8").unwrap();
        assert_eq!(p.ngens(), 2);
        assert_eq!(p.relators().len(), 3);
        assert_eq!(p.relators()[2].len(), 16);
        assert_eq!(p.relators()[0], Word::from_signed(&[1, 1]));
    }

    #[test]
    fn empty_relator_list_is_free() {
        let p = Presentation::parse("gens: a,b\nrels:").unwrap();
        assert_eq!(p.ngens(), 2);
        assert!(p.relators().is_empty());
    }

    #[test]
    fn dangling_caret_reports_its_column() {
        let err = Presentation::parse("gens: x\nrels: x^").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax { line: 2, column: 8, message: "expected an integer exponent after '^'".into() }
        );
    }

    #[test]
    fn rejects_relators_reducing_to_identity() {
        let err = Presentation::parse("gens: x,y\nrels: x^2, y*x*x^-1*y^-1").unwrap_err();
        assert_eq!(err, Error::EmptyRelator { index: 1 });
    }

    #[test]
    fn cyclic_reduction_on_ingest() {
        let p = Presentation::parse("gens: x,y\nrels: y*x^3*y^-1").unwrap();
        assert_eq!(p.relators()[0], Word::from_signed(&[1, 1, 1]));
    }

    #[test]
    fn unknown_generator_and_symbol() {
        assert!(matches!(
            Presentation::parse("gens: x\nrels: x*z"),
            Err(Error::Syntax { line: 2, column: 9, .. })
        ));
        let a = Alphabet::new(["x", "y"]).unwrap();
        assert_eq!(a.reduce_symbols(&["x", "q"]), Err(Error::UnknownSymbol("q".into())));
        assert_eq!(a.reduce_symbols(&["x", "y", "y^-1", "x^-1"]).unwrap(), Word::identity());
    }

    #[test]
    fn printing_compresses_runs() {
        let p = Presentation::parse("gens: x,y\nrels: x*x*y^-1*y^-1*y^-1*x").unwrap();
        assert_eq!(p.to_string(), "gens: x,y\nrels: x^2*y^-3*x\n");
    }

    #[test]
    fn word_lists() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let ws = a.parse_word_list("# B\nsubgroup: x*y*x^-1*y^-1,\n  x*y^2*x^-1*y^-2\n\n").unwrap();
        assert_eq!(ws.len(), 2);
        assert_eq!(ws[1].len(), 6);
    }

    fn presentation_text() -> impl Strategy<Value = String> {
        let atom = prop_oneof![Just("a".to_string()), Just("b".to_string()), Just("c".to_string())];
        let term = atom.prop_recursive(3, 12, 3, |inner| {
            prop_oneof![
                (inner.clone(), -3i64..4).prop_map(|(w, n)| format!("({w})^{n}")),
                prop::collection::vec(inner, 1..3).prop_map(|v| v.join("*")),
            ]
        });
        prop::collection::vec(term, 0..4).prop_map(|rs| format!("gens: a,b,c\nrels: {}", rs.join(", ")))
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(text in presentation_text()) {
            match Presentation::parse(&text) {
                Ok(p) => {
                    let again = Presentation::parse(&p.to_string()).unwrap();
                    prop_assert_eq!(&again, &p);
                    prop_assert_eq!(again.to_string(), p.to_string());
                }
                Err(Error::EmptyRelator { .. }) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
