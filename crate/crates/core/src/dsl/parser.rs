use super::{Literal, ParseError, PipelineExpr};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number { value: f64, int: Option<i64> },
    Str(String),
    Then,
    Plus,
    Star,
    LParen,
    RParen,
    Comma,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number { value, int: Some(i) } if *value == *i as f64 => format!("number `{i}`"),
            Tok::Number { value, .. } => format!("number `{value:?}`"),
            Tok::Str(_) => "string".to_string(),
            Tok::Then => "`>>`".to_string(),
            Tok::Plus => "`+`".to_string(),
            Tok::Star => "`*`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Eq => "`=`".to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

fn error_at(src: &str, offset: usize, expected: &[&str], found: String) -> ParseError {
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    ParseError {
        line,
        column: before[line_start..].chars().count() + 1,
        offset,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found,
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'>' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::Then
            }
            b'+' => {
                i += 1;
                Tok::Plus
            }
            b'*' => {
                i += 1;
                Tok::Star
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'=' => {
                i += 1;
                Tok::Eq
            }
            b'a'..=b'z' | b'_' => {
                while i < bytes.len() && matches!(bytes[i], b'a'..=b'z' | b'0'..=b'9' | b'_') {
                    i += 1;
                }
                Tok::Ident(src[start..i].to_string())
            }
            b'-' | b'0'..=b'9' => {
                let (tok, end) = lex_number(src, start)?;
                i = end;
                tok
            }
            b'"' => {
                let (s, end) = lex_string(src, start)?;
                i = end;
                Tok::Str(s)
            }
            _ => {
                let ch = src[start..].chars().next().expect("non-empty");
                return Err(error_at(
                    src,
                    start,
                    &["identifier", "number", "string", "operator"],
                    format!("character `{ch}`"),
                ));
            }
        };
        out.push((start, tok));
    }
    out.push((src.len(), Tok::Eof));
    Ok(out)
}

fn lex_number(src: &str, start: usize) -> Result<(Tok, usize), ParseError> {
    let bytes = src.as_bytes();
    let digits = |mut i: usize| {
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        i
    };
    let mut i = start;
    if bytes[i] == b'-' {
        i += 1;
    }
    let int_start = i;
    i = digits(i);
    if i == int_start {
        return Err(error_at(src, i, &["digit"], found_char(src, i)));
    }
    let mut is_int = true;
    if i < bytes.len() && bytes[i] == b'.' {
        is_int = false;
        let frac = i + 1;
        i = digits(frac);
        if i == frac {
            return Err(error_at(src, i, &["digit"], found_char(src, i)));
        }
    }
    if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
        is_int = false;
        i += 1;
        if i < bytes.len() && matches!(bytes[i], b'+' | b'-') {
            i += 1;
        }
        let exp = i;
        i = digits(exp);
        if i == exp {
            return Err(error_at(src, i, &["digit"], found_char(src, i)));
        }
    }
    let text = &src[start..i];
    let value: f64 = text.parse().expect("lexed number parses");
    if !value.is_finite() {
        return Err(error_at(src, start, &["finite number"], format!("`{text}`")));
    }
    let int = if is_int {
        Some(
            text.parse::<i64>()
                .map_err(|_| error_at(src, start, &["64-bit integer"], format!("`{text}`")))?,
        )
    } else {
        None
    };
    Ok((Tok::Number { value, int }, i))
}

fn lex_string(src: &str, start: usize) -> Result<(String, usize), ParseError> {
    let mut out = String::new();
    let mut chars = src[start + 1..].char_indices();
    while let Some((off, c)) = chars.next() {
        let at = start + 1 + off;
        match c {
            '"' => return Ok((out, at + 1)),
            '\\' => match chars.next() {
                Some((_, '"')) => out.push('"'),
                Some((_, '\\')) => out.push('\\'),
                Some((_, 'n')) => out.push('\n'),
                Some((_, 't')) => out.push('\t'),
                Some((eoff, e)) => {
                    return Err(error_at(
                        src,
                        start + 1 + eoff,
                        &["`\"`", "`\\`", "`n`", "`t`"],
                        format!("escape `\\{e}`"),
                    ))
                }
                None => break,
            },
            c => out.push(c),
        }
    }
    Err(error_at(src, src.len(), &["`\"`"], "end of input".to_string()))
}

fn found_char(src: &str, i: usize) -> String {
    match src[i..].chars().next() {
        Some(c) => format!("character `{c}`"),
        None => "end of input".to_string(),
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

const ATOM_START: &[&str] = &["number", "identifier", "`(`"];

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail(&self, expected: &[&str]) -> ParseError {
        let (offset, tok) = &self.toks[self.pos];
        error_at(self.src, *offset, expected, tok.describe())
    }

    fn expect(&mut self, tok: Tok, expected: &[&str]) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.fail(expected))
        }
    }

    fn pipeline(&mut self) -> Result<PipelineExpr, ParseError> {
        let mut stages = vec![self.sum()?];
        while *self.peek() == Tok::Then {
            self.bump();
            stages.push(self.sum()?);
        }
        Ok(if stages.len() == 1 {
            stages.pop().expect("one stage")
        } else {
            PipelineExpr::Then(stages)
        })
    }

    fn sum(&mut self) -> Result<PipelineExpr, ParseError> {
        let mut terms = vec![self.term()?];
        while *self.peek() == Tok::Plus {
            self.bump();
            terms.push(self.term()?);
        }
        if let [(None, _)] = terms.as_slice() {
            return Ok(terms.pop().expect("one term").1);
        }
        let (weights, children) = terms.into_iter().map(|(w, e)| (w.unwrap_or(1.0), e)).unzip();
        Ok(PipelineExpr::Linear { children, weights })
    }

    fn term(&mut self) -> Result<(Option<f64>, PipelineExpr), ParseError> {
        if let Tok::Number { value, .. } = *self.peek() {
            self.bump();
            self.expect(Tok::Star, &["`*`"])?;
            return Ok((Some(value), self.atom()?));
        }
        Ok((None, self.atom()?))
    }

    fn atom(&mut self) -> Result<PipelineExpr, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if name == "rrf" && *self.peek2() == Tok::LParen => {
                self.bump();
                self.bump();
                self.rrf_args()
            }
            Tok::Ident(name) => {
                self.bump();
                let kwargs = if *self.peek() == Tok::LParen {
                    self.bump();
                    self.kwargs()?
                } else {
                    Vec::new()
                };
                Ok(PipelineExpr::Leaf { name, kwargs })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.pipeline()?;
                self.expect(Tok::RParen, &["`>>`", "`+`", "`)`"])?;
                Ok(inner)
            }
            _ => Err(self.fail(ATOM_START)),
        }
    }

    fn rrf_args(&mut self) -> Result<PipelineExpr, ParseError> {
        let mut children = vec![self.pipeline()?];
        let mut k = None;
        loop {
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen if children.len() >= 2 => {
                    self.bump();
                    break;
                }
                _ if children.len() >= 2 => return Err(self.fail(&["`>>`", "`+`", "`,`", "`)`"])),
                _ => return Err(self.fail(&["`>>`", "`+`", "`,`"])),
            }
            let is_k = matches!(self.peek(), Tok::Ident(s) if s == "k") && *self.peek2() == Tok::Eq;
            if is_k && children.len() >= 2 {
                self.bump();
                self.bump();
                match self.bump() {
                    Tok::Number { value, .. } => k = Some(value),
                    _ => {
                        self.pos -= 1;
                        return Err(self.fail(&["number"]));
                    }
                }
                self.expect(Tok::RParen, &["`)`"])?;
                break;
            }
            children.push(self.pipeline()?);
        }
        Ok(PipelineExpr::Rrf { children, k })
    }

    fn kwargs(&mut self) -> Result<Vec<(String, Literal)>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(out);
        }
        loop {
            let Tok::Ident(key) = self.peek().clone() else {
                return Err(self.fail(if out.is_empty() {
                    &["identifier", "`)`"]
                } else {
                    &["identifier"]
                }));
            };
            self.bump();
            self.expect(Tok::Eq, &["`=`"])?;
            let value = match self.peek().clone() {
                Tok::Number { int: Some(i), .. } => Literal::Int(i),
                Tok::Number { value, .. } => Literal::Float(value),
                Tok::Str(s) => Literal::Str(s),
                _ => return Err(self.fail(&["number", "string"])),
            };
            self.bump();
            out.push((key, value));
            match self.bump() {
                Tok::Comma => {}
                Tok::RParen => return Ok(out),
                _ => {
                    self.pos -= 1;
                    return Err(self.fail(&["`,`", "`)`"]));
                }
            }
        }
    }
}

pub fn parse(src: &str) -> Result<PipelineExpr, ParseError> {
    let mut p = Parser {
        src,
        toks: lex(src)?,
        pos: 0,
    };
    let expr = p.pipeline()?;
    if *p.peek() != Tok::Eof {
        return Err(p.fail(&["`>>`", "`+`", "end of input"]));
    }
    Ok(expr)
}
