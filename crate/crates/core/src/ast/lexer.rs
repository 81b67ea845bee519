//! Total tokenizer for Java source.
//!
//! "Total" means it never fails: every byte of input lands in exactly one
//! token or in skipped whitespace, unterminated strings and comments end at
//! the line or file boundary, and bytes that fit nothing become
//! [`TokenKind::Garbage`]. Comments are emitted as tokens (not discarded)
//! so lexical feature extraction can count keywords and identifiers outside
//! comments and strings by construction; the parser filters them out.

/// The 50 reserved words of Java SE 8. `true`, `false`, and `null` are
/// literals, not keywords, and are tokenized as such.
pub const JAVA_KEYWORDS: [&str; 50] = [
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
    "class", "const", "continue", "default", "do", "double", "else", "enum",
    "extends", "final", "finally", "float", "for", "goto", "if", "implements",
    "import", "instanceof", "int", "interface", "long", "native", "new",
    "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "try", "void", "volatile", "while",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Identifier,
    Keyword,
    IntLiteral,
    FloatLiteral,
    StringLiteral,
    CharLiteral,
    BoolLiteral,
    NullLiteral,
    /// Operator or separator, possibly multi-character (`>>=`, `...`).
    Punct,
    LineComment,
    BlockComment,
    /// Block comment opening with `/**` (and longer than `/**/`).
    DocComment,
    /// A character that fits no token class.
    Garbage,
}

impl TokenKind {
    pub fn is_comment(self) -> bool {
        matches!(self, TokenKind::LineComment | TokenKind::BlockComment | TokenKind::DocComment)
    }
}

/// Byte range `[start, end)` of one token; the text is `&source[start..end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        &source[self.start..self.end]
    }
}

/// Multi-character operators, longest first so maximal munch works by
/// first match.
const MULTI_PUNCT: [&str; 25] = [
    ">>>=", ">>>", ">>=", "<<=", "...", "->", "::", "<<", ">>", "<=", ">=",
    "==", "!=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=",
    "|=", "^=",
];

const SINGLE_PUNCT: &str = "(){}[];,.=<>!~?:+-*/&|^%@";

struct Cursor<'a> {
    src: &'a str,
    /// (byte offset, char) pairs for the whole input.
    chars: Vec<(usize, char)>,
    i: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Cursor<'a> {
        Cursor { src, chars: src.char_indices().collect(), i: 0 }
    }

    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.i + ahead).map(|&(_, c)| c)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.i).map_or(self.src.len(), |&(b, _)| b)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.i += 1;
        Some(c)
    }

    fn eat_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek(0).is_some_and(&pred) {
            self.i += 1;
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos()..].starts_with(s)
    }
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

/// Tokenize the whole input, comments included.
pub fn lex(source: &str) -> Vec<Token> {
    let mut cur = Cursor::new(source);
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek(0) {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        let start = cur.pos();
        let kind = if cur.starts_with("//") {
            cur.eat_while(|c| c != '\n');
            TokenKind::LineComment
        } else if cur.starts_with("/*") {
            lex_block_comment(&mut cur)
        } else if c == '"' {
            lex_string(&mut cur);
            TokenKind::StringLiteral
        } else if c == '\'' {
            lex_char(&mut cur);
            TokenKind::CharLiteral
        } else if c.is_ascii_digit() || (c == '.' && cur.peek(1).is_some_and(|d| d.is_ascii_digit())) {
            lex_number(&mut cur)
        } else if is_ident_start(c) {
            cur.eat_while(is_ident_continue);
            classify_word(&source[start..cur.pos()])
        } else if let Some(op) = MULTI_PUNCT.iter().find(|op| cur.starts_with(op)) {
            for _ in 0..op.len() {
                cur.bump();
            }
            TokenKind::Punct
        } else if SINGLE_PUNCT.contains(c) {
            cur.bump();
            TokenKind::Punct
        } else {
            cur.bump();
            TokenKind::Garbage
        };
        tokens.push(Token { kind, start, end: cur.pos() });
    }
    tokens
}

fn classify_word(word: &str) -> TokenKind {
    if JAVA_KEYWORDS.contains(&word) {
        TokenKind::Keyword
    } else if word == "true" || word == "false" {
        TokenKind::BoolLiteral
    } else if word == "null" {
        TokenKind::NullLiteral
    } else {
        TokenKind::Identifier
    }
}

fn lex_block_comment(cur: &mut Cursor) -> TokenKind {
    let start = cur.pos();
    cur.bump(); // '/'
    cur.bump(); // '*'
    loop {
        if cur.starts_with("*/") {
            cur.bump();
            cur.bump();
            break;
        }
        if cur.bump().is_none() {
            break; // unterminated: comment runs to end of file
        }
    }
    let text = &cur.src[start..cur.pos()];
    if text.starts_with("/**") && text.len() >= 5 {
        TokenKind::DocComment
    } else {
        TokenKind::BlockComment
    }
}

/// String literal; stops at the closing quote, end of line, or end of file
/// (Java strings cannot span lines, so a lost quote damages one line only).
fn lex_string(cur: &mut Cursor) {
    cur.bump(); // opening '"'
    while let Some(c) = cur.peek(0) {
        match c {
            '"' => {
                cur.bump();
                return;
            }
            '\n' => return,
            '\\' => {
                cur.bump();
                cur.bump(); // escaped char, whatever it is
            }
            _ => {
                cur.bump();
            }
        }
    }
}

fn lex_char(cur: &mut Cursor) {
    cur.bump(); // opening '\''
    while let Some(c) = cur.peek(0) {
        match c {
            '\'' => {
                cur.bump();
                return;
            }
            '\n' => return,
            '\\' => {
                cur.bump();
                cur.bump();
            }
            _ => {
                cur.bump();
            }
        }
    }
}

fn lex_number(cur: &mut Cursor) -> TokenKind {
    let mut float = false;
    if cur.starts_with("0x") || cur.starts_with("0X") || cur.starts_with("0b") || cur.starts_with("0B") {
        cur.bump();
        cur.bump();
        cur.eat_while(|c| c.is_ascii_hexdigit() || c == '_');
        if cur.peek(0).is_some_and(|c| c == 'l' || c == 'L') {
            cur.bump();
        }
        return TokenKind::IntLiteral;
    }
    cur.eat_while(|c| c.is_ascii_digit() || c == '_');
    if cur.peek(0) == Some('.') && cur.peek(1).is_some_and(|c| c.is_ascii_digit()) {
        float = true;
        cur.bump();
        cur.eat_while(|c| c.is_ascii_digit() || c == '_');
    } else if cur.peek(0) == Some('.') && !cur.peek(1).is_some_and(is_ident_start) {
        // trailing-dot float like `1.` but not a method call like `1.toString()`
        float = true;
        cur.bump();
    }
    if cur.peek(0).is_some_and(|c| c == 'e' || c == 'E') {
        let save = cur.i;
        cur.bump();
        if cur.peek(0).is_some_and(|c| c == '+' || c == '-') {
            cur.bump();
        }
        if cur.peek(0).is_some_and(|c| c.is_ascii_digit()) {
            float = true;
            cur.eat_while(|c| c.is_ascii_digit() || c == '_');
        } else {
            cur.i = save; // not an exponent after all
        }
    }
    match cur.peek(0) {
        Some('f') | Some('F') | Some('d') | Some('D') => {
            cur.bump();
            TokenKind::FloatLiteral
        }
        Some('l') | Some('L') => {
            cur.bump();
            TokenKind::IntLiteral
        }
        _ if float => TokenKind::FloatLiteral,
        _ => TokenKind::IntLiteral,
    }
}

/// 1-based line and column (in characters) of a byte offset.
pub fn line_col(source: &str, byte: usize) -> (usize, usize) {
    let byte = byte.min(source.len());
    let before = &source[..byte];
    let line = before.matches('\n').count() + 1;
    let col = match before.rfind('\n') {
        Some(nl) => before[nl + 1..].chars().count() + 1,
        None => before.chars().count() + 1,
    };
    (line, col)
}
