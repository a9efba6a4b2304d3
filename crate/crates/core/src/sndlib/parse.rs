use std::collections::HashSet;

use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub struct RawLink {
    pub id: String,
    pub source: String,
    pub target: String,
    pub capacity: f64,
    /// Library cost of the link, if the file provides one.
    pub cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawDemand {
    pub id: String,
    pub source: String,
    pub target: String,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawInstance {
    pub nodes: Vec<String>,
    pub links: Vec<RawLink>,
    pub demands: Vec<RawDemand>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Word(String),
}

fn tokenize(text: &str) -> Vec<(usize, Tok)> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let body = line.split('#').next().unwrap_or("");
        if body.trim_start().starts_with('?') {
            continue;
        }
        let mut word = String::new();
        let flush = |word: &mut String, out: &mut Vec<(usize, Tok)>| {
            if !word.is_empty() {
                out.push((line_no, Tok::Word(std::mem::take(word))));
            }
        };
        for ch in body.chars() {
            match ch {
                '(' | ')' => {
                    flush(&mut word, &mut out);
                    out.push((line_no, if ch == '(' { Tok::Open } else { Tok::Close }));
                }
                c if c.is_whitespace() => flush(&mut word, &mut out),
                c => word.push(c),
            }
        }
        flush(&mut word, &mut out);
    }
    out
}

struct Cursor {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Cursor {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(1, |t| t.0)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line(), message: message.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn expect_open(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Open) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err("expected '('")),
        }
    }

    fn expect_close(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Close) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err("expected ')'")),
        }
    }

    fn word(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn number(&mut self, what: &str) -> Result<f64, ParseError> {
        let line = self.line();
        let w = self.word(what)?;
        w.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or(ParseError { line, message: format!("{what}: '{w}' is not a number") })
    }

    /// Skips a balanced parenthesised block starting at '('.
    fn skip_block(&mut self) -> Result<(), ParseError> {
        self.expect_open()?;
        let mut depth = 1;
        while depth > 0 {
            match self.next() {
                Some(Tok::Open) => depth += 1,
                Some(Tok::Close) => depth -= 1,
                Some(Tok::Word(_)) => {}
                None => return Err(self.err("unterminated section")),
            }
        }
        Ok(())
    }

    fn at_close(&self) -> bool {
        matches!(self.peek(), Some(Tok::Close))
    }
}

/// Parses the SNDlib native text format.
///
/// Link capacity is the pre-installed capacity, or the first module
/// capacity when nothing is pre-installed. Link cost is the first module
/// cost, or the pre-installed capacity cost when no modules are listed.
pub fn parse_sndlib(text: &str) -> Result<RawInstance, ParseError> {
    let mut cur = Cursor { toks: tokenize(text), pos: 0 };
    let mut raw = RawInstance::default();
    let mut seen = [false; 3];
    while let Some(tok) = cur.next() {
        let Tok::Word(section) = tok else {
            cur.pos -= 1;
            return Err(cur.err("expected a section name"));
        };
        match section.as_str() {
            "NODES" => {
                seen[0] = true;
                cur.expect_open()?;
                while !cur.at_close() {
                    let name = cur.word("node id")?;
                    if matches!(cur.peek(), Some(Tok::Open)) {
                        cur.skip_block()?;
                    }
                    if raw.nodes.contains(&name) {
                        return Err(cur.err(format!("duplicate node '{name}'")));
                    }
                    raw.nodes.push(name);
                }
                cur.expect_close()?;
            }
            "LINKS" => {
                seen[1] = true;
                cur.expect_open()?;
                let mut ids = HashSet::new();
                while !cur.at_close() {
                    let line = cur.line();
                    let id = cur.word("link id")?;
                    let (source, target) = endpoints(&mut cur, &raw.nodes)?;
                    let pre_cap = cur.number("pre-installed capacity")?;
                    let pre_cost = cur.number("pre-installed capacity cost")?;
                    cur.number("routing cost")?;
                    cur.number("setup cost")?;
                    let mut modules = Vec::new();
                    if matches!(cur.peek(), Some(Tok::Open)) {
                        cur.expect_open()?;
                        while !cur.at_close() {
                            let cap = cur.number("module capacity")?;
                            let cost = cur.number("module cost")?;
                            modules.push((cap, cost));
                        }
                        cur.expect_close()?;
                    }
                    if !ids.insert(id.clone()) {
                        return Err(ParseError { line, message: format!("duplicate link id '{id}'") });
                    }
                    let capacity = if pre_cap > 0.0 || modules.is_empty() { pre_cap } else { modules[0].0 };
                    let cost = match modules.first() {
                        Some(m) => Some(m.1),
                        None if pre_cost > 0.0 => Some(pre_cost),
                        None => None,
                    };
                    if capacity < 0.0 {
                        return Err(ParseError { line, message: format!("link '{id}' has negative capacity") });
                    }
                    raw.links.push(RawLink { id, source, target, capacity, cost });
                }
                cur.expect_close()?;
            }
            "DEMANDS" => {
                seen[2] = true;
                cur.expect_open()?;
                while !cur.at_close() {
                    let line = cur.line();
                    let id = cur.word("demand id")?;
                    let (source, target) = endpoints(&mut cur, &raw.nodes)?;
                    cur.word("routing unit")?;
                    let value = cur.number("demand value")?;
                    cur.word("max path length")?;
                    if value <= 0.0 {
                        return Err(ParseError { line, message: format!("demand '{id}' must be positive") });
                    }
                    raw.demands.push(RawDemand { id, source, target, value });
                }
                cur.expect_close()?;
            }
            _ => {
                // META, ADMISSIBLE_PATHS and anything else: ignored. Some
                // files write `NAME = value` lines outside sections.
                match cur.peek() {
                    Some(Tok::Open) => cur.skip_block()?,
                    Some(Tok::Word(w)) if w == "=" => {
                        cur.pos += 1;
                        cur.word("value")?;
                    }
                    _ => {
                        cur.pos -= 1;
                        return Err(cur.err(format!("malformed section '{section}'")));
                    }
                }
            }
        }
    }
    for (name, ok) in ["NODES", "LINKS", "DEMANDS"].iter().zip(seen) {
        if !ok {
            return Err(cur.err(format!("missing {name} section")));
        }
    }
    Ok(raw)
}

fn endpoints(cur: &mut Cursor, nodes: &[String]) -> Result<(String, String), ParseError> {
    cur.expect_open()?;
    let line = cur.line();
    let s = cur.word("source node")?;
    let t = cur.word("target node")?;
    cur.expect_close()?;
    for n in [&s, &t] {
        if !nodes.contains(n) {
            return Err(ParseError { line, message: format!("unknown node '{n}'") });
        }
    }
    Ok((s, t))
}
