//! S-expression reader with source positions. `;` starts a line comment.

use crate::error::{LangError, Result};
use crate::syntax::Pos;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom { text: String, pos: Pos },
    List { items: Vec<Sexp>, pos: Pos },
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom { pos, .. } | Sexp::List { pos, .. } => *pos,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom { text, .. } => Some(text),
            Sexp::List { .. } => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List { items, .. } => Some(items),
            Sexp::Atom { .. } => None,
        }
    }

    /// The head symbol of a list form.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|l| l.first()).and_then(Sexp::atom)
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
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

    fn read(&mut self) -> Result<Option<Sexp>> {
        self.skip_trivia();
        let pos = self.pos();
        match self.chars.peek() {
            None => Ok(None),
            Some(')') => Err(LangError::syntax(pos, "unexpected `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(LangError::syntax(pos, "unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexp::List { items, pos }));
                        }
                        _ => items.push(self.read()?.expect("input is not exhausted")),
                    }
                }
            }
            Some(_) => {
                let mut text = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Ok(Some(Sexp::Atom { text, pos }))
            }
        }
    }
}

/// Reads every top-level form in `src`.
pub fn read_all(src: &str) -> Result<Vec<Sexp>> {
    let mut r = Reader { chars: src.chars().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(s) = r.read()? {
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let forms = read_all("(a (b 1)) ; note\n(c)").unwrap();
        assert_eq!(forms.len(), 2);
        assert_eq!(forms[0].head(), Some("a"));
        let inner = &forms[0].list().unwrap()[1];
        assert_eq!((inner.pos().line, inner.pos().col), (1, 4));
        assert_eq!((forms[1].pos().line, forms[1].pos().col), (2, 1));
    }

    #[test]
    fn reports_unbalanced_input() {
        let e = read_all("(a (b)").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (1, 1));
        assert!(read_all(")").is_err());
    }
}
