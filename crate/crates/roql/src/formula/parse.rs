//! Text grammar for read-once formulas.
//!
//! Variables are `x<k>` (1-based), negation is prefix `~`, the infix
//! operators `&`, `|`, `^` and `<=>` require explicit parentheses, constants
//! are `0` and `1`, and arbitrary gates can be written inline as
//! `g{<hex table>,<arity>}(arg, ...)`. Every gate used must be present in the
//! basis, and no variable may appear twice.

use crate::error::{Error, Result};
use crate::truth::{TruthTable, VarIndex};

use super::{Basis, BasisFunction, FormulaNode, ReadOnceFormula};

pub fn parse_formula(text: &str, n: usize, basis: &Basis) -> Result<ReadOnceFormula> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, n, basis };
    let root = parser.expr()?;
    parser.expect_end()?;
    ReadOnceFormula::new(n, root)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Var(usize),
    Const(bool),
    Not,
    And,
    Or,
    Xor,
    Nxor,
    LParen,
    RParen,
    Comma,
    Gate { bits: u64, arity: usize },
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            ',' => {
                out.push(Token::Comma);
                i += 1;
            }
            '~' => {
                out.push(Token::Not);
                i += 1;
            }
            '&' => {
                out.push(Token::And);
                i += 1;
            }
            '|' => {
                out.push(Token::Or);
                i += 1;
            }
            '^' => {
                out.push(Token::Xor);
                i += 1;
            }
            '<' => {
                if chars.get(i + 1) == Some(&'=') && chars.get(i + 2) == Some(&'>') {
                    out.push(Token::Nxor);
                    i += 3;
                } else {
                    return Err(Error::Parse("expected `<=>`".into()));
                }
            }
            '0' => {
                out.push(Token::Const(false));
                i += 1;
            }
            '1' => {
                out.push(Token::Const(true));
                i += 1;
            }
            'x' => {
                let start = i + 1;
                let mut end = start;
                while end < chars.len() && chars[end].is_ascii_digit() {
                    end += 1;
                }
                if end == start {
                    return Err(Error::Parse("expected digits after `x`".into()));
                }
                let k: usize = chars[start..end]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse("bad variable number".into()))?;
                if k == 0 {
                    return Err(Error::Parse("variables are numbered from x1".into()));
                }
                out.push(Token::Var(k - 1));
                i = end;
            }
            'g' => {
                if chars.get(i + 1) != Some(&'{') {
                    return Err(Error::Parse("expected `{` after `g`".into()));
                }
                let start = i + 2;
                let mut end = start;
                while end < chars.len() && chars[end] != '}' {
                    end += 1;
                }
                if end == chars.len() {
                    return Err(Error::Parse("unterminated gate literal".into()));
                }
                let body: String = chars[start..end].iter().collect();
                let (hex, arity) = body
                    .split_once(',')
                    .ok_or_else(|| Error::Parse("gate literal needs `<hex>,<arity>`".into()))?;
                let bits = u64::from_str_radix(hex.trim(), 16)
                    .map_err(|_| Error::Parse("bad hex truth table in gate literal".into()))?;
                let arity: usize = arity
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse("bad arity in gate literal".into()))?;
                if arity > 6 {
                    return Err(Error::Parse("gate literals support arity <= 6".into()));
                }
                out.push(Token::Gate { bits, arity });
                i = end + 1;
            }
            _ => return Err(Error::Parse(format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    n: usize,
    basis: &'a Basis,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_end(&self) -> Result<()> {
        if self.pos != self.tokens.len() {
            return Err(Error::Parse("trailing input after formula".into()));
        }
        Ok(())
    }

    fn resolve_gate(&self, table: TruthTable, display: &str) -> Result<BasisFunction> {
        match self.basis.lookup(&table) {
            Some(f) => Ok(f.clone()),
            None => Err(Error::GateNotInBasis(display.to_string())),
        }
    }

    fn expr(&mut self) -> Result<FormulaNode> {
        match self.next() {
            Some(Token::Not) => {
                let inner = self.expr()?;
                let not = self.resolve_gate(TruthTable::from_bits_u64(1, 0b01).unwrap(), "~")?;
                Ok(FormulaNode::Gate { func: not, children: vec![inner] })
            }
            Some(Token::Var(k)) => {
                if k >= self.n {
                    return Err(Error::Parse(format!(
                        "variable x{} out of range for arity {}",
                        k + 1,
                        self.n
                    )));
                }
                Ok(FormulaNode::Var(VarIndex(k)))
            }
            Some(Token::Const(b)) => {
                let c = self.resolve_gate(
                    TruthTable::constant(0, b).unwrap(),
                    if b { "1" } else { "0" },
                )?;
                Ok(FormulaNode::Gate { func: c, children: vec![] })
            }
            Some(Token::LParen) => {
                let left = self.expr()?;
                let (table, display) = match self.next() {
                    Some(Token::And) => (TruthTable::from_bits_u64(2, 0b1000).unwrap(), "&"),
                    Some(Token::Or) => (TruthTable::from_bits_u64(2, 0b1110).unwrap(), "|"),
                    Some(Token::Xor) => (TruthTable::from_bits_u64(2, 0b0110).unwrap(), "^"),
                    Some(Token::Nxor) => (TruthTable::from_bits_u64(2, 0b1001).unwrap(), "<=>"),
                    _ => return Err(Error::Parse("expected a binary operator".into())),
                };
                let right = self.expr()?;
                if self.next() != Some(Token::RParen) {
                    return Err(Error::Parse("expected `)`".into()));
                }
                let func = self.resolve_gate(table, display)?;
                Ok(FormulaNode::Gate { func, children: vec![left, right] })
            }
            Some(Token::Gate { bits, arity }) => {
                let table = TruthTable::from_bits_u64(arity, bits)
                    .map_err(|e| Error::Parse(format!("bad gate literal: {e}")))?;
                let display = format!("g{{{bits:x},{arity}}}");
                let func = self.resolve_gate(table, &display)?;
                let mut children = Vec::new();
                if arity > 0 {
                    if self.next() != Some(Token::LParen) {
                        return Err(Error::Parse("expected `(` after gate literal".into()));
                    }
                    loop {
                        children.push(self.expr()?);
                        match self.next() {
                            Some(Token::Comma) => continue,
                            Some(Token::RParen) => break,
                            _ => return Err(Error::Parse("expected `,` or `)`".into())),
                        }
                    }
                } else if self.peek() == Some(&Token::LParen) {
                    self.next();
                    if self.next() != Some(Token::RParen) {
                        return Err(Error::Parse("nullary gate takes no arguments".into()));
                    }
                }
                if children.len() != arity {
                    return Err(Error::Parse(format!(
                        "gate of arity {arity} applied to {} arguments",
                        children.len()
                    )));
                }
                Ok(FormulaNode::Gate { func, children })
            }
            _ => Err(Error::Parse("expected a formula".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::truth::VarSet;

    #[test]
    fn parses_nested_formula() {
        let b2 = Basis::b2();
        let f = parse_formula("(x1 & (x2 | ~x3))", 3, &b2).unwrap();
        assert_eq!(f.leaf_vars(), VarSet::full(3));
        assert_eq!(f.to_string(), "and(x1,or(x2,not(x3)))");
    }

    #[test]
    fn lone_variable_leaves_others_fictitious() {
        let b2 = Basis::b2();
        let f = parse_formula("x1", 2, &b2).unwrap();
        let t = f.truth_table().unwrap();
        assert!(!t.is_essential(VarIndex(1)));
    }

    #[test]
    fn rejects_repeated_variable() {
        let b2 = Basis::b2();
        assert!(matches!(
            parse_formula("(x1 & x1)", 2, &b2),
            Err(Error::RepeatedVariable(VarIndex(0)))
        ));
    }

    #[test]
    fn rejects_gates_outside_basis() {
        let ao = Basis::and_or();
        assert!(matches!(parse_formula("(x1 ^ x2)", 2, &ao), Err(Error::GateNotInBasis(_))));
        assert!(matches!(parse_formula("~x1", 1, &ao), Err(Error::GateNotInBasis(_))));
        assert!(parse_formula("(x1 & (x2 | x3))", 3, &ao).is_ok());
    }

    #[test]
    fn custom_gate_literal() {
        let b3 = Basis::b_l(3);
        // 3-way multiplexer: x1 selects between x2 (when 1) and x3 (when 0)
        let f = parse_formula("g{d8,3}(x1,x2,x3)", 3, &b3).unwrap();
        let t = f.truth_table().unwrap();
        assert_eq!(t, TruthTable::from_bits_u64(3, 0xd8).unwrap());
    }

    #[test]
    fn syntax_errors() {
        let b2 = Basis::b2();
        assert!(parse_formula("x1 &", 2, &b2).is_err());
        assert!(parse_formula("(x1 & x2", 2, &b2).is_err());
        assert!(parse_formula("x9", 2, &b2).is_err());
        assert!(parse_formula("", 2, &b2).is_err());
    }
}
