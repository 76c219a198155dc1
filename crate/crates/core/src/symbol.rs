use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// An atomic terminal symbol shared by grammars and automata.
///
/// OTP representations use the five tier marks `-`, `+`, `[`, `]` and `|`;
/// any other non-empty token (such as `0` and `1`) is an opaque terminal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(token: &str) -> Self {
        Symbol(Arc::from(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The tier mark this symbol spells, if any.
    pub fn mark(&self) -> Option<Mark> {
        Mark::from_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl From<Mark> for Symbol {
    fn from(m: Mark) -> Self {
        Symbol::new(m.as_str())
    }
}

/// The OTP gestural-score alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mark {
    /// `-`: outside any constituent.
    Out,
    /// `+`: constituent interior.
    In,
    /// `[`: left edge.
    Open,
    /// `]`: right edge.
    Close,
    /// `|`: right edge of one constituent abutting the left edge of the next.
    Boundary,
}

impl Mark {
    pub const ALL: [Mark; 5] = [Mark::Out, Mark::In, Mark::Open, Mark::Close, Mark::Boundary];

    pub fn as_char(self) -> char {
        match self {
            Mark::Out => '-',
            Mark::In => '+',
            Mark::Open => '[',
            Mark::Close => ']',
            Mark::Boundary => '|',
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mark::Out => "-",
            Mark::In => "+",
            Mark::Open => "[",
            Mark::Close => "]",
            Mark::Boundary => "|",
        }
    }

    pub fn from_char(c: char) -> Option<Mark> {
        Some(match c {
            '-' => Mark::Out,
            '+' => Mark::In,
            '[' => Mark::Open,
            ']' => Mark::Close,
            '|' => Mark::Boundary,
            _ => return None,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(s: &str) -> Option<Mark> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Mark::from_char(c),
            _ => None,
        }
    }

    pub fn symbol(self) -> Symbol {
        Symbol::from(self)
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A string over [`Symbol`]s.
pub type Word = Vec<Symbol>;

/// Splits a compact string into one symbol per character.
pub fn word(s: &str) -> Word {
    s.chars()
        .map(|c| {
            let mut buf = [0u8; 4];
            Symbol::new(c.encode_utf8(&mut buf))
        })
        .collect()
}

/// Renders a word compactly when every symbol is one character, space-separated otherwise.
pub fn render_word(w: &[Symbol]) -> alloc::string::String {
    use alloc::string::String;
    let compact = w.iter().all(|s| s.as_str().chars().count() == 1);
    let mut out = String::new();
    for (i, s) in w.iter().enumerate() {
        if i > 0 && !compact {
            out.push(' ');
        }
        out.push_str(s.as_str());
    }
    out
}
