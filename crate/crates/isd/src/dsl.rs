//! Textual surface syntax for interaction terms and traces.
//!
//! The grammar is whitespace-insensitive and ASCII-only:
//!
//! ```text
//! doc    := header? expr
//! header := "lifelines" ident+ ";" "messages" ident+ ";"
//! expr   := "0" | action | binop "(" expr ("," expr)+ ")" | loopop "(" expr ")"
//! binop  := "strict" | "seq" | "par" | "alt"
//! loopop := "loopX" | "loopH" | "loopS" | "loopP"
//! action := ident ("!" | "?") ident
//! ident  := letter (letter | digit | "_")*
//! ```
//!
//! N-ary operator calls desugar right-associatively to nested binary nodes.
//! Traces are actions separated by `.`; the bare word `eps` is the empty
//! trace. When a document has no header, the signature is inferred as
//! exactly the identifiers appearing in the body.

use std::fmt;

use crate::syntax::{
    Action, ActionKind, Ident, Interaction, LoopKind, Signature, Trace, TraceSet,
};

/// A parsed document: the interaction with its governing signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDocument {
    pub interaction: Interaction,
    pub signature: Signature,
    /// Whether the signature came from an explicit header rather than
    /// inference.
    pub has_header: bool,
}

/// A syntax or well-formedness error with its exact position (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>, expected: &[&str]) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Zero,
    Symbol(char),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("`{name}`"),
            Tok::Zero => "`0`".to_string(),
            Tok::Symbol(c) => format!("`{c}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexed {
    tokens: Vec<Spanned>,
    end_line: usize,
    end_column: usize,
}

fn lex(text: &str) -> Result<Lexed, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let (tok_line, tok_column) = (line, column);
        if c.is_ascii_alphabetic() {
            let mut name = String::new();
            while let Some(&c2) = chars.peek() {
                if c2.is_ascii_alphanumeric() || c2 == '_' {
                    name.push(c2);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            tokens.push(Spanned {
                tok: Tok::Ident(name),
                line: tok_line,
                column: tok_column,
            });
        } else if c == '0' {
            chars.next();
            column += 1;
            if let Some(&c2) = chars.peek() {
                if c2.is_ascii_alphanumeric() || c2 == '_' {
                    return Err(ParseError::new(
                        line,
                        column,
                        format!("unexpected `{c2}` after `0`"),
                        &[],
                    ));
                }
            }
            tokens.push(Spanned {
                tok: Tok::Zero,
                line: tok_line,
                column: tok_column,
            });
        } else if matches!(c, '!' | '?' | '(' | ')' | ',' | ';' | '.') {
            chars.next();
            column += 1;
            tokens.push(Spanned {
                tok: Tok::Symbol(c),
                line: tok_line,
                column: tok_column,
            });
        } else {
            return Err(ParseError::new(
                line,
                column,
                format!("unexpected character `{c}`"),
                &[],
            ));
        }
    }
    Ok(Lexed {
        tokens,
        end_line: line,
        end_column: column,
    })
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_column: usize,
    declared: Option<Signature>,
}

impl Parser {
    fn new(lexed: Lexed) -> Self {
        Parser {
            tokens: lexed.tokens,
            pos: 0,
            end_line: lexed.end_line,
            end_column: lexed.end_column,
            declared: None,
        }
    }

    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&Spanned> {
        self.tokens.get(self.pos + offset)
    }

    fn advance(&mut self) -> Option<Spanned> {
        let spanned = self.tokens.get(self.pos).cloned();
        if spanned.is_some() {
            self.pos += 1;
        }
        spanned
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(s) => (s.line, s.column),
            None => (self.end_line, self.end_column),
        }
    }

    fn error_here(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let (line, column) = self.here();
        ParseError::new(line, column, message, expected)
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(s) => s.tok.describe(),
            None => "end of input".to_string(),
        }
    }

    fn expect_symbol(&mut self, symbol: char, expected: &[&str]) -> Result<Spanned, ParseError> {
        match self.peek() {
            Some(s) if s.tok == Tok::Symbol(symbol) => Ok(self.advance().unwrap()),
            _ => Err(self.error_here(format!("found {}", self.found()), expected)),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        match self.peek() {
            Some(s) => {
                if let Tok::Ident(name) = &s.tok {
                    let (name, line, column) = (name.clone(), s.line, s.column);
                    self.advance();
                    Ok((name, line, column))
                } else {
                    Err(self.error_here(format!("found {}", self.found()), &[what]))
                }
            }
            None => Err(self.error_here("found end of input", &[what])),
        }
    }

    fn parse_header_if_present(&mut self) -> Result<(), ParseError> {
        let starts_header = matches!(
            (self.peek(), self.peek_at(1)),
            (Some(Spanned { tok: Tok::Ident(kw), .. }), Some(Spanned { tok: Tok::Ident(_), .. }))
                if kw == "lifelines"
        );
        if !starts_header {
            return Ok(());
        }
        self.advance();
        let lifelines = self.parse_ident_list("a lifeline identifier")?;
        let (kw, line, column) = self.expect_ident("`messages`")?;
        if kw != "messages" {
            return Err(ParseError::new(
                line,
                column,
                format!("found `{kw}`"),
                &["`messages`"],
            ));
        }
        let messages = self.parse_ident_list("a message identifier")?;
        // Non-emptiness is guaranteed by the grammar; duplicates were
        // rejected with positions in parse_ident_list.
        let signature = Signature::new(lifelines, messages)
            .expect("header grammar guarantees a valid signature");
        self.declared = Some(signature);
        Ok(())
    }

    /// One or more identifiers terminated by `;`, duplicate-free.
    fn parse_ident_list(&mut self, what: &str) -> Result<Vec<Ident>, ParseError> {
        let mut idents: Vec<Ident> = Vec::new();
        loop {
            match self.peek() {
                Some(Spanned { tok: Tok::Ident(name), line, column }) => {
                    let (name, line, column) = (name.clone(), *line, *column);
                    if idents.iter().any(|i| i.as_str() == name) {
                        return Err(ParseError::new(
                            line,
                            column,
                            format!("duplicate identifier `{name}` in header"),
                            &[],
                        ));
                    }
                    idents.push(Ident::new(&name));
                    self.advance();
                }
                Some(Spanned { tok: Tok::Symbol(';'), .. }) if !idents.is_empty() => {
                    self.advance();
                    return Ok(idents);
                }
                _ => {
                    let expected: Vec<&str> = if idents.is_empty() {
                        vec![what]
                    } else {
                        vec![what, "`;`"]
                    };
                    return Err(self.error_here(format!("found {}", self.found()), &expected));
                }
            }
        }
    }

    fn parse_expr(&mut self) -> Result<Interaction, ParseError> {
        match self.peek().cloned() {
            None => Err(self.error_here(
                "found end of input",
                &["an interaction expression"],
            )),
            Some(Spanned { tok: Tok::Zero, .. }) => {
                self.advance();
                Ok(Interaction::Empty)
            }
            Some(Spanned { tok: Tok::Symbol(_), .. }) => Err(self.error_here(
                format!("found {}", self.found()),
                &["an interaction expression"],
            )),
            Some(Spanned { tok: Tok::Ident(name), line, column }) => {
                let next_is_call = matches!(
                    self.peek_at(1),
                    Some(Spanned { tok: Tok::Symbol('('), .. })
                );
                if next_is_call {
                    if let Some(op) = binary_op(&name) {
                        self.advance();
                        return self.parse_binary_call(op, &name);
                    }
                    if let Some(kind) = loop_op(&name) {
                        self.advance();
                        return self.parse_loop_call(kind);
                    }
                }
                self.advance();
                self.parse_action_tail(name, line, column)
                    .map(Interaction::Act)
            }
        }
    }

    fn parse_binary_call(
        &mut self,
        op: fn(Interaction, Interaction) -> Interaction,
        name: &str,
    ) -> Result<Interaction, ParseError> {
        self.expect_symbol('(', &["`(`"])?;
        let mut args = vec![self.parse_expr()?];
        loop {
            match self.peek() {
                Some(Spanned { tok: Tok::Symbol(','), .. }) => {
                    self.advance();
                    args.push(self.parse_expr()?);
                }
                Some(Spanned { tok: Tok::Symbol(')'), .. }) => {
                    if args.len() < 2 {
                        return Err(self.error_here(
                            format!("`{name}` takes at least two operands"),
                            &["`,`"],
                        ));
                    }
                    self.advance();
                    break;
                }
                _ => {
                    return Err(self.error_here(format!("found {}", self.found()), &["`)`", "`,`"]));
                }
            }
        }
        // Right-associative desugaring of the n-ary surface form.
        Ok(args
            .into_iter()
            .rev()
            .reduce(|acc, arg| op(arg, acc))
            .expect("at least two operands"))
    }

    fn parse_loop_call(&mut self, kind: LoopKind) -> Result<Interaction, ParseError> {
        self.expect_symbol('(', &["`(`"])?;
        let body = self.parse_expr()?;
        self.expect_symbol(')', &["`)`"])?;
        Ok(Interaction::loop_(kind, body))
    }

    fn parse_action_tail(
        &mut self,
        lifeline: String,
        line: usize,
        column: usize,
    ) -> Result<Action, ParseError> {
        let kind = match self.peek() {
            Some(Spanned { tok: Tok::Symbol('!'), .. }) => {
                self.advance();
                ActionKind::Emission
            }
            Some(Spanned { tok: Tok::Symbol('?'), .. }) => {
                self.advance();
                ActionKind::Reception
            }
            _ => {
                let can_call = binary_op(&lifeline).is_some() || loop_op(&lifeline).is_some();
                let expected: Vec<&str> = if can_call {
                    vec!["`(`", "`!`", "`?`"]
                } else {
                    vec!["`!`", "`?`"]
                };
                return Err(self.error_here(format!("found {}", self.found()), &expected));
            }
        };
        let (message, msg_line, msg_column) = self.expect_ident("a message identifier")?;
        let action = Action::new(lifeline.as_str(), kind, message.as_str());
        if let Some(sig) = &self.declared {
            if !sig.has_lifeline(action.lifeline()) {
                return Err(ParseError::new(
                    line,
                    column,
                    format!("lifeline `{lifeline}` is not declared in the header"),
                    &[],
                ));
            }
            if !sig.has_message(&action.message) {
                return Err(ParseError::new(
                    msg_line,
                    msg_column,
                    format!("message `{message}` is not declared in the header"),
                    &[],
                ));
            }
        }
        Ok(action)
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.peek().is_some() {
            Err(self.error_here(format!("found {}", self.found()), &["end of input"]))
        } else {
            Ok(())
        }
    }
}

fn binary_op(name: &str) -> Option<fn(Interaction, Interaction) -> Interaction> {
    match name {
        "strict" => Some(Interaction::strict),
        "seq" => Some(Interaction::seq),
        "par" => Some(Interaction::par),
        "alt" => Some(Interaction::alt),
        _ => None,
    }
}

fn loop_op(name: &str) -> Option<LoopKind> {
    match name {
        "loopX" => Some(LoopKind::X),
        "loopH" => Some(LoopKind::H),
        "loopS" => Some(LoopKind::S),
        "loopP" => Some(LoopKind::P),
        _ => None,
    }
}

/// Parses a full document: an optional signature header followed by one
/// interaction expression.
pub fn parse_document(text: &str) -> Result<SourceDocument, ParseError> {
    let mut parser = Parser::new(lex(text)?);
    parser.parse_header_if_present()?;
    let interaction = parser.parse_expr()?;
    parser.expect_end()?;
    let has_header = parser.declared.is_some();
    let signature = parser
        .declared
        .take()
        .unwrap_or_else(|| Signature::inferred_from(&interaction));
    Ok(SourceDocument {
        interaction,
        signature,
        has_header,
    })
}

/// Parses an interaction and returns it with its governing signature
/// (declared or inferred).
pub fn parse_interaction(text: &str) -> Result<(Interaction, Signature), ParseError> {
    let doc = parse_document(text)?;
    Ok((doc.interaction, doc.signature))
}

/// The canonical text of an interaction: binary form, no sugar, `0` for the
/// empty interaction. Parsing the result reproduces the term exactly.
pub fn render_interaction(interaction: &Interaction) -> String {
    interaction.to_string()
}

/// Parses a single action such as `l1!m1`.
pub fn parse_action(text: &str) -> Result<Action, ParseError> {
    let mut parser = Parser::new(lex(text)?);
    let (lifeline, line, column) = parser.expect_ident("a lifeline identifier")?;
    let action = parser.parse_action_tail(lifeline, line, column)?;
    parser.expect_end()?;
    Ok(action)
}

/// Parses a trace: actions separated by `.`, or the bare word `eps` for the
/// empty trace.
pub fn parse_trace(text: &str) -> Result<Trace, ParseError> {
    let mut parser = Parser::new(lex(text)?);
    if let Some(Spanned { tok: Tok::Ident(name), .. }) = parser.peek() {
        if name == "eps" && parser.peek_at(1).is_none() {
            return Ok(Trace::empty());
        }
    }
    let mut actions = Vec::new();
    loop {
        let (lifeline, line, column) = parser.expect_ident(if actions.is_empty() {
            "a trace (actions separated by `.`, or `eps`)"
        } else {
            "an action"
        })?;
        actions.push(parser.parse_action_tail(lifeline, line, column)?);
        match parser.peek() {
            Some(Spanned { tok: Tok::Symbol('.'), .. }) => {
                parser.advance();
            }
            None => break,
            _ => {
                return Err(parser.error_here(
                    format!("found {}", parser.found()),
                    &["`.`", "end of input"],
                ));
            }
        }
    }
    Ok(Trace::new(actions))
}

/// The canonical text of a trace; the empty trace renders as `eps`.
pub fn render_trace(trace: &Trace) -> String {
    trace.to_string()
}

/// Parses each entry as a trace and collects the set. Handy for golden
/// fixtures and one-trace-per-line files.
pub fn parse_traces<S: AsRef<str>>(entries: &[S]) -> Result<TraceSet, ParseError> {
    entries
        .iter()
        .map(|entry| parse_trace(entry.as_ref()))
        .collect()
}
