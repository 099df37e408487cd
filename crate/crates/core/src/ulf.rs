//! Unscoped logical form: typed atoms, S-expression trees, reader and printer.
//!
//! Atoms carry their surface text verbatim and a [`AtomKind`] derived purely
//! from that text, so `Ulf` values compare by surface alone.

use std::fmt;

use thiserror::Error;

/// Syntactic category of an atom, determined by its surface shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AtomKind {
    Determiner,
    Noun,
    Verb,
    Preposition,
    PrepArg,
    Adjective,
    Pronoun,
    SentencePrep,
    AdjModifier,
    Name,
    TenseOp,
    PlurOp,
    AdverbialOp,
    LocRecord,
    EpisodicOp,
    Punct,
    Numeral,
    /// A `.suffix` outside the core table (`do.aux-s`, `and.cc`, ...).
    Suffixed(String),
    /// Suffix-less token: variables like `?x`, record tags like `loc`.
    Symbol,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UlfAtom {
    surface: String,
    kind: AtomKind,
}

impl UlfAtom {
    pub fn new(token: &str) -> Self {
        classify_atom(token)
    }

    /// Builds a name atom `|text|`.
    pub fn name(text: &str) -> Self {
        UlfAtom {
            surface: format!("|{text}|"),
            kind: AtomKind::Name,
        }
    }

    /// Canonical decimal numeral: at most 4 fractional digits, trailing zeros trimmed.
    pub fn numeral(value: f64) -> Self {
        UlfAtom {
            surface: format_decimal(value),
            kind: AtomKind::Numeral,
        }
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn kind(&self) -> &AtomKind {
        &self.kind
    }

    /// Text before the final type suffix (`block` for `block.n`), or the
    /// interior of a name.
    pub fn stem(&self) -> &str {
        match self.kind {
            AtomKind::Name => &self.surface[1..self.surface.len() - 1],
            AtomKind::Numeral | AtomKind::Symbol | AtomKind::Punct => &self.surface,
            _ => match self.surface.rfind('.') {
                Some(i) if i > 0 => &self.surface[..i],
                _ => &self.surface,
            },
        }
    }

    /// The `.suffix` part, if any.
    pub fn suffix(&self) -> Option<&str> {
        match self.kind {
            AtomKind::Name
            | AtomKind::Numeral
            | AtomKind::Symbol
            | AtomKind::Punct
            | AtomKind::TenseOp
            | AtomKind::PlurOp
            | AtomKind::AdverbialOp
            | AtomKind::LocRecord
            | AtomKind::EpisodicOp => None,
            _ => self.surface.rfind('.').map(|i| &self.surface[i + 1..]),
        }
    }

    pub fn name_text(&self) -> Option<&str> {
        (self.kind == AtomKind::Name).then(|| self.stem())
    }

    pub fn number(&self) -> Option<f64> {
        (self.kind == AtomKind::Numeral).then(|| self.surface.parse().ok())?
    }

    /// Case-insensitive comparison of the full surface.
    pub fn is(&self, surface: &str) -> bool {
        self.surface.eq_ignore_ascii_case(surface)
    }
}

impl fmt::Display for UlfAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surface)
    }
}

pub(crate) fn format_decimal(value: f64) -> String {
    let mut s = format!("{value:.4}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Assigns a kind to a token by its shape. Total: every token gets a kind.
pub fn classify_atom(token: &str) -> UlfAtom {
    let kind = if token.len() >= 2 && token.starts_with('|') && token.ends_with('|') {
        AtomKind::Name
    } else {
        match token {
            "pres" | "past" => AtomKind::TenseOp,
            "plur" => AtomKind::PlurOp,
            "adv-e" | "adv-f" | "adv-s" => AtomKind::AdverbialOp,
            "$" => AtomKind::LocRecord,
            "*" => AtomKind::EpisodicOp,
            "?" | "!" => AtomKind::Punct,
            _ if is_numeral(token) => AtomKind::Numeral,
            _ => match token.rfind('.') {
                Some(i) if i > 0 && i + 1 < token.len() => suffix_kind(&token[i + 1..]),
                _ => AtomKind::Symbol,
            },
        }
    };
    UlfAtom {
        surface: token.to_string(),
        kind,
    }
}

fn is_numeral(token: &str) -> bool {
    let body = token.strip_prefix('-').unwrap_or(token);
    !body.is_empty()
        && body.chars().any(|c| c.is_ascii_digit())
        && body.chars().all(|c| c.is_ascii_digit() || c == '.')
        && body.matches('.').count() <= 1
}

fn suffix_kind(suffix: &str) -> AtomKind {
    match suffix {
        "d" => AtomKind::Determiner,
        "n" => AtomKind::Noun,
        "v" => AtomKind::Verb,
        "p" => AtomKind::Preposition,
        "p-arg" => AtomKind::PrepArg,
        "a" => AtomKind::Adjective,
        "pro" => AtomKind::Pronoun,
        "ps" => AtomKind::SentencePrep,
        "mod-a" => AtomKind::AdjModifier,
        other => AtomKind::Suffixed(other.to_string()),
    }
}

/// A ULF tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ulf {
    Atom(UlfAtom),
    List(Vec<Ulf>),
}

/// The empty list, produced only by deletion transforms.
impl Default for Ulf {
    fn default() -> Self {
        Ulf::List(Vec::new())
    }
}

impl Ulf {
    pub fn atom(token: &str) -> Ulf {
        Ulf::Atom(classify_atom(token))
    }

    pub fn name(text: &str) -> Ulf {
        Ulf::Atom(UlfAtom::name(text))
    }

    pub fn numeral(value: f64) -> Ulf {
        Ulf::Atom(UlfAtom::numeral(value))
    }

    pub fn list(items: impl IntoIterator<Item = Ulf>) -> Ulf {
        Ulf::List(items.into_iter().collect())
    }

    /// A `($ loc x y z)` record.
    pub fn loc(p: [f64; 3]) -> Ulf {
        Ulf::list([
            Ulf::atom("$"),
            Ulf::atom("loc"),
            Ulf::numeral(p[0]),
            Ulf::numeral(p[1]),
            Ulf::numeral(p[2]),
        ])
    }

    pub fn as_atom(&self) -> Option<&UlfAtom> {
        match self {
            Ulf::Atom(a) => Some(a),
            Ulf::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Ulf]> {
        match self {
            Ulf::List(v) => Some(v),
            Ulf::Atom(_) => None,
        }
    }

    pub fn is_atom(&self, surface: &str) -> bool {
        self.as_atom().is_some_and(|a| a.is(surface))
    }

    pub fn kind(&self) -> Option<&AtomKind> {
        self.as_atom().map(UlfAtom::kind)
    }

    pub fn is_empty_list(&self) -> bool {
        matches!(self, Ulf::List(v) if v.is_empty())
    }

    /// Visits every atom in depth-first order.
    pub fn atoms(&self) -> Vec<&UlfAtom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a UlfAtom>) {
        match self {
            Ulf::Atom(a) => out.push(a),
            Ulf::List(v) => v.iter().for_each(|u| u.collect_atoms(out)),
        }
    }

    /// Returns a copy with every subtree for which `f` yields `Some` replaced.
    pub fn map_subtrees(&self, f: &mut impl FnMut(&Ulf) -> Option<Ulf>) -> Ulf {
        if let Some(r) = f(self) {
            return r;
        }
        match self {
            Ulf::Atom(_) => self.clone(),
            Ulf::List(v) => Ulf::List(v.iter().map(|u| u.map_subtrees(f)).collect()),
        }
    }

    pub fn contains(&self, pred: &impl Fn(&Ulf) -> bool) -> bool {
        pred(self)
            || match self {
                Ulf::Atom(_) => false,
                Ulf::List(v) => v.iter().any(|u| u.contains(pred)),
            }
    }
}

impl fmt::Display for Ulf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ulf::Atom(a) => f.write_str(a.surface()),
            Ulf::List(v) => {
                f.write_str("(")?;
                for (i, u) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{u}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl std::str::FromStr for Ulf {
    type Err = ReadError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sexpr(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReadError {
    #[error("unbalanced parentheses at position {0}")]
    UnbalancedParens(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("unterminated |name| starting at position {0}")]
    UnterminatedName(usize),
    #[error("empty list at position {0}")]
    EmptyList(usize),
    #[error("unexpected trailing input at position {0}")]
    TrailingInput(usize),
}

impl ReadError {
    pub fn position(&self) -> Option<usize> {
        match *self {
            ReadError::EmptyInput => None,
            ReadError::UnbalancedParens(p)
            | ReadError::UnterminatedName(p)
            | ReadError::EmptyList(p)
            | ReadError::TrailingInput(p) => Some(p),
        }
    }
}

/// Reads exactly one S-expression.
pub fn parse_sexpr(text: &str) -> Result<Ulf, ReadError> {
    let mut reader = Reader::new(text, false);
    reader.skip_ws();
    if reader.at_end() {
        return Err(ReadError::EmptyInput);
    }
    let u = reader.read()?;
    reader.skip_ws();
    if !reader.at_end() {
        let pos = reader.pos;
        return Err(if reader.peek() == Some(')') {
            ReadError::UnbalancedParens(pos)
        } else {
            ReadError::TrailingInput(pos)
        });
    }
    Ok(u)
}

/// Reads a sequence of top-level forms, skipping `;` line comments.
/// Each form is paired with the byte offset where it starts.
pub fn parse_all(text: &str) -> Result<Vec<(usize, Ulf)>, ReadError> {
    let mut reader = Reader::new(text, true);
    let mut out = Vec::new();
    loop {
        reader.skip_ws();
        if reader.at_end() {
            return Ok(out);
        }
        let start = reader.pos;
        if reader.peek() == Some(')') {
            return Err(ReadError::UnbalancedParens(start));
        }
        out.push((start, reader.read()?));
    }
}

/// Canonical single-space printing.
pub fn print_sexpr(u: &Ulf) -> String {
    u.to_string()
}

struct Reader<'a> {
    text: &'a str,
    pos: usize,
    comments: bool,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str, comments: bool) -> Self {
        Reader {
            text,
            pos: 0,
            comments,
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' && self.comments {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Ulf, ReadError> {
        self.skip_ws();
        match self.peek() {
            None => Err(ReadError::UnbalancedParens(self.pos)),
            Some('(') => {
                let open = self.pos;
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        None => return Err(ReadError::UnbalancedParens(self.pos)),
                        Some(')') => {
                            self.bump();
                            if items.is_empty() {
                                return Err(ReadError::EmptyList(open));
                            }
                            return Ok(Ulf::List(items));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(')') => Err(ReadError::UnbalancedParens(self.pos)),
            Some(_) => self.read_token(),
        }
    }

    fn read_token(&mut self) -> Result<Ulf, ReadError> {
        let start = self.pos;
        let mut in_name = false;
        let mut name_start = start;
        while let Some(c) = self.peek() {
            if c == '|' {
                if !in_name {
                    name_start = self.pos;
                }
                in_name = !in_name;
            } else if !in_name && (c.is_whitespace() || c == '(' || c == ')') {
                break;
            }
            self.bump();
        }
        if in_name {
            return Err(ReadError::UnterminatedName(name_start));
        }
        Ok(Ulf::Atom(classify_atom(&self.text[start..self.pos])))
    }
}

/// Structural sanity check over the operator forms.
///
/// Tense operators wrap exactly one verb expression, `plur` wraps a noun
/// expression, `adv-*` wraps exactly one constituent and `($ loc ...)` carries
/// exactly three numerals. Operators may only appear at the head of a list.
pub fn well_formed(u: &Ulf) -> bool {
    match u {
        Ulf::Atom(_) => true,
        Ulf::List(items) => {
            if items.is_empty() {
                return false;
            }
            if items[1..].iter().any(|x| matches!(x.kind(), Some(k) if is_head_operator(k))) {
                return false;
            }
            let head_ok = match items[0].kind() {
                Some(AtomKind::TenseOp) => items.len() == 2 && is_verb_expr(&items[1]),
                Some(AtomKind::PlurOp) => items.len() == 2 && is_noun_expr(&items[1]),
                Some(AtomKind::AdverbialOp) => items.len() == 2,
                Some(AtomKind::LocRecord) => {
                    if items.get(1).is_some_and(|x| x.is_atom("loc")) {
                        items.len() == 5 && items[2..].iter().all(|x| x.kind() == Some(&AtomKind::Numeral))
                    } else {
                        items.len() >= 2
                    }
                }
                _ => true,
            };
            head_ok && items.iter().all(well_formed)
        }
    }
}

fn is_head_operator(k: &AtomKind) -> bool {
    matches!(
        k,
        AtomKind::TenseOp | AtomKind::PlurOp | AtomKind::AdverbialOp | AtomKind::LocRecord
    )
}

fn is_verb_expr(u: &Ulf) -> bool {
    match u {
        Ulf::Atom(a) => match a.kind() {
            AtomKind::Verb => true,
            AtomKind::Suffixed(s) => s.starts_with("aux"),
            _ => false,
        },
        Ulf::List(v) => v.first().is_some_and(is_verb_expr),
    }
}

fn is_noun_expr(u: &Ulf) -> bool {
    match u {
        Ulf::Atom(a) => a.kind() == &AtomKind::Noun,
        Ulf::List(v) => {
            !v.is_empty()
                && (v.last().is_some_and(is_noun_expr) || v.first().is_some_and(is_noun_expr))
        }
    }
}
