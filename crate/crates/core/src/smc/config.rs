//! Line-oriented model configuration.
//!
//! ```text
//! # comment
//! alphabet = a b c
//! param q = 1/2
//! rule a = q/4: ab | q/4: ba | q/4: ac | q/4: ca | 1-q: a
//! rule b = 1: b
//! rule c = 1: c
//! root = a
//! ```
//!
//! Weights are rational arithmetic expressions over literals and declared
//! parameters (`+ - * /`, parentheses).

use super::{ModelError, RuleEntry, SmcModel};
use crate::rational::{self, Rational};
use crate::words::{Alphabet, Letter, WordError};
use num_traits::Zero;
use std::collections::HashMap;

pub fn parse_model(text: &str) -> Result<SmcModel, ModelError> {
    parse_model_with(text, &[])
}

/// Parses a config, overriding any `param` lines named in `overrides`.
pub fn parse_model_with(text: &str, overrides: &[(String, Rational)]) -> Result<SmcModel, ModelError> {
    let mut alphabet: Option<Alphabet> = None;
    let mut params: Vec<(String, Rational)> = Vec::new();
    let mut rules: Vec<(Letter, Vec<RuleEntry>, usize)> = Vec::new();
    let mut root: Option<Letter> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| ModelError::Syntax { line, message };
        let split = content.find(|c: char| !c.is_alphabetic()).unwrap_or(content.len());
        let (keyword, rest) = (&content[..split], content[split..].trim_start());
        match keyword {
            "alphabet" => {
                let rest = rest.strip_prefix('=').ok_or_else(|| syntax("expected 'alphabet = ...'".into()))?;
                let symbols: Vec<&str> = rest.split_whitespace().collect();
                if alphabet.is_some() {
                    return Err(syntax("alphabet declared twice".into()));
                }
                alphabet = Some(Alphabet::new(&symbols).map_err(|e| syntax(e.to_string()))?);
            }
            "param" => {
                let (name, value) = rest
                    .split_once('=')
                    .ok_or_else(|| syntax("expected 'param <name> = <value>'".into()))?;
                let name = name.trim();
                if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(syntax(format!("invalid parameter name '{name}'")));
                }
                let env: HashMap<&str, &Rational> = params.iter().map(|(k, v)| (k.as_str(), v)).collect();
                let mut value = eval(value.trim(), &env).map_err(|m| ModelError::InvalidWeight { line, message: m })?;
                if let Some((_, v)) = overrides.iter().find(|(k, _)| k == name) {
                    value = v.clone();
                }
                params.retain(|(k, _)| k != name);
                params.push((name.to_string(), value));
            }
            "rule" => {
                let al = alphabet.as_ref().ok_or_else(|| syntax("rule before alphabet".into()))?;
                let (letter, body) = rest
                    .split_once('=')
                    .ok_or_else(|| syntax("expected 'rule <letter> = <p>: <word> | ...'".into()))?;
                let letter = letter.trim();
                let letter = al.letter(letter).map_err(|_| ModelError::UnknownLetter {
                    line,
                    token: letter.to_string(),
                })?;
                let env: HashMap<&str, &Rational> = params.iter().map(|(k, v)| (k.as_str(), v)).collect();
                let mut entries = Vec::new();
                for alt in body.split('|') {
                    let (weight, word) = alt
                        .split_once(':')
                        .ok_or_else(|| syntax(format!("expected '<weight>: <word>' in '{}'", alt.trim())))?;
                    let weight = weight.trim();
                    let prob = eval(weight, &env).map_err(|m| ModelError::InvalidWeight { line, message: m })?;
                    let word_text = word.trim();
                    if word_text.is_empty() {
                        return Err(syntax("missing word after weight".into()));
                    }
                    let word = al.parse_word(word_text).map_err(|e| match e {
                        WordError::UnknownLetter(token) => ModelError::UnknownLetter { line, token },
                        other => syntax(other.to_string()),
                    })?;
                    let expr = rational::parse(weight).is_none().then(|| weight.to_string());
                    entries.push(RuleEntry { word, prob, expr });
                }
                rules.push((letter, entries, line));
            }
            "root" => {
                let al = alphabet.as_ref().ok_or_else(|| syntax("root before alphabet".into()))?;
                let rest = rest.strip_prefix('=').ok_or_else(|| syntax("expected 'root = <letter>'".into()))?;
                let token = rest.trim();
                root = Some(al.letter(token).map_err(|_| ModelError::UnknownLetter {
                    line,
                    token: token.to_string(),
                })?);
            }
            other => return Err(syntax(format!("unknown directive '{other}'"))),
        }
    }
    let alphabet = alphabet.ok_or(ModelError::Syntax { line: 0, message: "missing alphabet".into() })?;
    SmcModel::assemble(alphabet, rules, root, params)
}

/// Renders a model back into the config grammar.
pub fn export_model(model: &SmcModel) -> String {
    let al = model.alphabet();
    let mut out = String::new();
    out.push_str(&format!("alphabet = {}\n", al.symbols().join(" ")));
    for (name, value) in model.params() {
        out.push_str(&format!("param {name} = {}\n", rational::format(value)));
    }
    for (letter, rule) in model.rules() {
        let alts: Vec<String> = rule
            .entries()
            .iter()
            .map(|e| {
                let w = e.expr.clone().unwrap_or_else(|| rational::format(&e.prob));
                format!("{w}: {}", al.render(&e.word))
            })
            .collect();
        out.push_str(&format!("rule {} = {}\n", al.symbol(letter), alts.join(" | ")));
    }
    if let Some(r) = model.root() {
        out.push_str(&format!("root = {}\n", al.symbol(r)));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            let v = rational::parse(&lit).ok_or_else(|| format!("bad number '{lit}'"))?;
            out.push(Token::Num(v));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character '{c}' in weight"));
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    env: &'a HashMap<&'a str, &'a Rational>,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<Rational, String> {
        let mut acc = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            if op == '+' {
                acc += rhs;
            } else {
                acc -= rhs;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Rational, String> {
        let mut acc = self.factor()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.factor()?;
            if op == '*' {
                acc *= rhs;
            } else {
                if rhs.is_zero() {
                    return Err("division by zero".into());
                }
                acc /= rhs;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Rational, String> {
        match self.peek().cloned() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(&Token::Op(')')) {
                    return Err("missing ')'".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                self.env
                    .get(name.as_str())
                    .map(|v| (*v).clone())
                    .ok_or_else(|| format!("unknown parameter '{name}'"))
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("unexpected end of weight".into()),
        }
    }
}

fn eval(text: &str, env: &HashMap<&str, &Rational>) -> Result<Rational, String> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err("missing weight".into());
    }
    let mut p = ExprParser { tokens, pos: 0, env };
    let v = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(format!("trailing input in weight '{text}'"));
    }
    Ok(v)
}
