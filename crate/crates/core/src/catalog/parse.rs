//! Recursive-descent parser for the group-spec mini-language.
//!
//! ```text
//! spec     := product
//! product  := power (('x' | '×') power)*
//! power    := atom ('^' INT)?
//! atom     := ('C' | 'Z') INT | 'S' INT | 'A' INT | 'D' INT | 'Q' INT
//!           | 'He' '(' INT ')' | 'PSL' '(' INT ',' INT ')' | 'SL' '(' INT ',' INT ')'
//!           | 'Semidirect' '(' spec ',' spec ',' action ')'
//!           | 'Perm' '[' perm (',' perm)* ']' | 'File' '(' STRING ')' | '(' spec ')'
//! action   := '[' row (',' row)* ']'          one row per generator of the acting group
//! row      := '[' word (',' word)* ']'        image of each generator of the normal factor
//! word     := '1' | letter ('*' letter)*      letter := 'a' INT ('^' '-'? INT)?
//! perm     := '()' | ('(' INT (',' INT)* ')')+
//! ```

use std::fmt;

use crate::error::{Error, Result};

/// A word in the chosen generators `a1, a2, …` of a group; empty means the identity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(pub Vec<(u32, i64)>);

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(g, e)| if e == 1 { format!("a{g}") } else { format!("a{g}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecNode {
    Cyclic(u32),
    Symmetric(u32),
    Alternating(u32),
    /// Dihedral group of order `2n`.
    Dihedral(u32),
    /// Dicyclic group of order `4n`.
    Dicyclic(u32),
    /// Heisenberg group of order `p³`.
    Heisenberg(u32),
    Psl(u32, u32),
    Sl(u32, u32),
    Power(Box<SpecNode>, u32),
    Product(Vec<SpecNode>),
    Semidirect {
        normal: Box<SpecNode>,
        acting: Box<SpecNode>,
        /// `action[j][i]` is the image of normal generator `i` under acting generator `j`.
        action: Vec<Vec<Word>>,
    },
    /// Generators given as lists of 1-based cycles.
    Permutations(Vec<Vec<Vec<u32>>>),
    File(String),
}

impl SpecNode {
    fn is_compound(&self) -> bool {
        matches!(self, SpecNode::Power(..) | SpecNode::Product(..))
    }
}

fn fmt_operand(node: &SpecNode, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if node.is_compound() {
        write!(f, "({node})")
    } else {
        write!(f, "{node}")
    }
}

impl fmt::Display for SpecNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecNode::Cyclic(n) => write!(f, "C{n}"),
            SpecNode::Symmetric(n) => write!(f, "S{n}"),
            SpecNode::Alternating(n) => write!(f, "A{n}"),
            SpecNode::Dihedral(n) => write!(f, "D{n}"),
            SpecNode::Dicyclic(n) => write!(f, "Q{n}"),
            SpecNode::Heisenberg(p) => write!(f, "He({p})"),
            SpecNode::Psl(d, q) => write!(f, "PSL({d},{q})"),
            SpecNode::Sl(d, q) => write!(f, "SL({d},{q})"),
            SpecNode::Power(base, k) => {
                fmt_operand(base, f)?;
                write!(f, "^{k}")
            }
            SpecNode::Product(factors) => {
                for (i, factor) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, " x ")?;
                    }
                    if matches!(factor, SpecNode::Product(..)) {
                        write!(f, "({factor})")?;
                    } else {
                        write!(f, "{factor}")?;
                    }
                }
                Ok(())
            }
            SpecNode::Semidirect { normal, acting, action } => {
                let rows: Vec<String> = action
                    .iter()
                    .map(|row| format!("[{}]", row.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ")))
                    .collect();
                write!(f, "Semidirect({normal}, {acting}, [{}])", rows.join(", "))
            }
            SpecNode::Permutations(gens) => {
                let rendered: Vec<String> = gens
                    .iter()
                    .map(|cycles| {
                        if cycles.is_empty() {
                            "()".to_string()
                        } else {
                            cycles
                                .iter()
                                .map(|c| format!("({})", c.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")))
                                .collect::<String>()
                        }
                    })
                    .collect();
                write!(f, "Perm[{}]", rendered.join(", "))
            }
            SpecNode::File(path) => {
                write!(f, "File(\"")?;
                for ch in path.chars() {
                    if ch == '"' || ch == '\\' {
                        write!(f, "\\")?;
                    }
                    write!(f, "{ch}")?;
                }
                write!(f, "\")")
            }
        }
    }
}

/// A parsed group specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub source: String,
    pub ast: SpecNode,
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast)
    }
}

impl std::str::FromStr for GroupSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_group_spec(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Str(String),
    Times,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Caret,
    Star,
    Minus,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            'x' | '×' => {
                out.push((pos, Tok::Times));
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_alphabetic() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().map(|&(_, ch)| ch).collect();
                out.push((pos, Tok::Ident(word)));
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|&(_, ch)| ch).collect();
                let value = digits
                    .parse::<u64>()
                    .map_err(|_| Error::Syntax { pos, msg: format!("integer {digits} is too large") })?;
                out.push((pos, Tok::Int(value)));
            }
            '"' => {
                i += 1;
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None => return Err(Error::Syntax { pos, msg: "unterminated string".into() }),
                        Some(&(_, '"')) => {
                            i += 1;
                            break;
                        }
                        Some(&(_, '\\')) => {
                            match chars.get(i + 1) {
                                Some(&(_, ch)) => s.push(ch),
                                None => return Err(Error::Syntax { pos, msg: "unterminated string".into() }),
                            }
                            i += 2;
                        }
                        Some(&(_, ch)) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                out.push((pos, Tok::Str(s)));
            }
            '(' => {
                out.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                i += 1;
            }
            '[' => {
                out.push((pos, Tok::LBracket));
                i += 1;
            }
            ']' => {
                out.push((pos, Tok::RBracket));
                i += 1;
            }
            ',' => {
                out.push((pos, Tok::Comma));
                i += 1;
            }
            '^' => {
                out.push((pos, Tok::Caret));
                i += 1;
            }
            '*' => {
                out.push((pos, Tok::Star));
                i += 1;
            }
            '-' => {
                out.push((pos, Tok::Minus));
                i += 1;
            }
            other => return Err(Error::Syntax { pos, msg: format!("unexpected character {other:?}") }),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|&(p, _)| p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn int(&mut self, what: &str) -> Result<u32> {
        match self.peek() {
            Some(&Tok::Int(v)) => {
                let pos = self.pos();
                self.at += 1;
                u32::try_from(v).map_err(|_| Error::Syntax { pos, msg: format!("{what} {v} is too large") })
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn spec(&mut self) -> Result<SpecNode> {
        let first = self.power()?;
        if self.peek() != Some(&Tok::Times) {
            return Ok(first);
        }
        let mut factors = vec![first];
        while self.peek() == Some(&Tok::Times) {
            self.at += 1;
            factors.push(self.power()?);
        }
        Ok(SpecNode::Product(factors))
    }

    fn power(&mut self) -> Result<SpecNode> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.at += 1;
            let k = self.int("exponent")?;
            if self.peek() == Some(&Tok::Caret) {
                return self.err("chained exponents need parentheses");
            }
            return Ok(SpecNode::Power(Box::new(base), k));
        }
        Ok(base)
    }

    fn paren_ints(&mut self, count: usize) -> Result<Vec<u32>> {
        self.expect(Tok::LParen, "'('")?;
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            if i > 0 {
                self.expect(Tok::Comma, "','")?;
            }
            out.push(self.int("integer")?);
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(out)
    }

    fn atom(&mut self) -> Result<SpecNode> {
        let start = self.pos();
        match self.bump() {
            Some(Tok::LParen) => {
                let inner = self.spec()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "C" | "Z" => Ok(SpecNode::Cyclic(self.int("cyclic order")?)),
                "S" => Ok(SpecNode::Symmetric(self.int("degree")?)),
                "A" => Ok(SpecNode::Alternating(self.int("degree")?)),
                "D" => Ok(SpecNode::Dihedral(self.int("dihedral parameter")?)),
                "Q" => Ok(SpecNode::Dicyclic(self.int("dicyclic parameter")?)),
                "He" => Ok(SpecNode::Heisenberg(self.paren_ints(1)?[0])),
                "PSL" => {
                    let v = self.paren_ints(2)?;
                    Ok(SpecNode::Psl(v[0], v[1]))
                }
                "SL" => {
                    let v = self.paren_ints(2)?;
                    Ok(SpecNode::Sl(v[0], v[1]))
                }
                "Semidirect" => self.semidirect(),
                "Perm" => self.perm_literal(),
                "File" => {
                    self.expect(Tok::LParen, "'('")?;
                    let path = match self.bump() {
                        Some(Tok::Str(s)) => s,
                        _ => {
                            self.at -= 1;
                            return self.err("expected quoted path");
                        }
                    };
                    self.expect(Tok::RParen, "')'")?;
                    Ok(SpecNode::File(path))
                }
                "GL" | "PGL" | "SmallGroup" => {
                    Err(Error::Unsupported(format!("constructor {name} at position {start}")))
                }
                other => Err(Error::Syntax { pos: start, msg: format!("unknown constructor {other:?}") }),
            },
            _ => Err(Error::Syntax { pos: start, msg: "expected a group constructor".into() }),
        }
    }

    fn semidirect(&mut self) -> Result<SpecNode> {
        self.expect(Tok::LParen, "'('")?;
        let normal = self.spec()?;
        self.expect(Tok::Comma, "','")?;
        let acting = self.spec()?;
        self.expect(Tok::Comma, "','")?;
        self.expect(Tok::LBracket, "'['")?;
        let mut action = Vec::new();
        loop {
            self.expect(Tok::LBracket, "'['")?;
            let mut row = vec![self.word()?];
            while self.peek() == Some(&Tok::Comma) {
                self.at += 1;
                row.push(self.word()?);
            }
            self.expect(Tok::RBracket, "']'")?;
            action.push(row);
            if self.peek() == Some(&Tok::Comma) {
                self.at += 1;
            } else {
                break;
            }
        }
        self.expect(Tok::RBracket, "']'")?;
        self.expect(Tok::RParen, "')'")?;
        Ok(SpecNode::Semidirect { normal: Box::new(normal), acting: Box::new(acting), action })
    }

    fn word(&mut self) -> Result<Word> {
        if self.peek() == Some(&Tok::Int(1)) {
            self.at += 1;
            return Ok(Word::default());
        }
        let mut letters = vec![self.letter()?];
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            letters.push(self.letter()?);
        }
        Ok(Word(letters))
    }

    fn letter(&mut self) -> Result<(u32, i64)> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == "a" => self.at += 1,
            _ => return self.err("expected generator a<k>"),
        }
        let g = self.int("generator number")?;
        if g == 0 {
            return self.err("generators are numbered from 1");
        }
        let mut e: i64 = 1;
        if self.peek() == Some(&Tok::Caret) {
            self.at += 1;
            let negative = if self.peek() == Some(&Tok::Minus) {
                self.at += 1;
                true
            } else {
                false
            };
            let v = self.int("exponent")? as i64;
            e = if negative { -v } else { v };
        }
        Ok((g, e))
    }

    fn perm_literal(&mut self) -> Result<SpecNode> {
        self.expect(Tok::LBracket, "'['")?;
        let mut gens = vec![self.perm()?];
        while self.peek() == Some(&Tok::Comma) {
            self.at += 1;
            gens.push(self.perm()?);
        }
        self.expect(Tok::RBracket, "']'")?;
        Ok(SpecNode::Permutations(gens))
    }

    fn perm(&mut self) -> Result<Vec<Vec<u32>>> {
        let mut cycles = Vec::new();
        if self.peek() != Some(&Tok::LParen) {
            return self.err("expected '(' starting a cycle");
        }
        while self.peek() == Some(&Tok::LParen) {
            self.at += 1;
            if self.peek() == Some(&Tok::RParen) {
                self.at += 1;
                if cycles.is_empty() && self.peek() != Some(&Tok::LParen) {
                    return Ok(cycles);
                }
                return self.err("empty cycle inside a permutation");
            }
            let mut cycle = vec![self.int("point")?];
            while self.peek() == Some(&Tok::Comma) {
                self.at += 1;
                cycle.push(self.int("point")?);
            }
            self.expect(Tok::RParen, "')'")?;
            cycles.push(cycle);
        }
        Ok(cycles)
    }
}

/// Parses a group spec such as `C5^2`, `PSL(2,7)` or `Semidirect(C7, C3, [[a1^2]])`.
pub fn parse_group_spec(text: &str) -> Result<GroupSpec> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len() };
    let ast = p.spec()?;
    if p.at < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(GroupSpec { source: text.to_string(), ast })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_the_basic_constructors() {
        assert_eq!(
            parse_group_spec("C5^2").unwrap().ast,
            SpecNode::Power(Box::new(SpecNode::Cyclic(5)), 2)
        );
        assert_eq!(parse_group_spec("He(5)").unwrap().ast, SpecNode::Heisenberg(5));
        assert_eq!(parse_group_spec("C1").unwrap().ast, SpecNode::Cyclic(1));
        assert_eq!(parse_group_spec("PSL(2, 7)").unwrap().ast, SpecNode::Psl(2, 7));
        assert_eq!(
            parse_group_spec("S3 x C2^2").unwrap().ast,
            SpecNode::Product(vec![
                SpecNode::Symmetric(3),
                SpecNode::Power(Box::new(SpecNode::Cyclic(2)), 2)
            ])
        );
        assert_eq!(
            parse_group_spec("C5xC5").unwrap().ast,
            SpecNode::Product(vec![SpecNode::Cyclic(5), SpecNode::Cyclic(5)])
        );
    }

    #[test]
    fn parses_semidirect_and_permutation_literals() {
        let spec = parse_group_spec("Semidirect(C4 x C2, C2, [[a1, a1^2*a2]])").unwrap();
        match spec.ast {
            SpecNode::Semidirect { action, .. } => {
                assert_eq!(action, vec![vec![Word(vec![(1, 1)]), Word(vec![(1, 2), (2, 1)])]]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let spec = parse_group_spec("Perm[(1,2,3,4,5), (1,2)]").unwrap();
        assert_eq!(spec.ast, SpecNode::Permutations(vec![vec![vec![1, 2, 3, 4, 5]], vec![vec![1, 2]]]));
        let spec = parse_group_spec("File(\"groups/a b.grp\")").unwrap();
        assert_eq!(spec.ast, SpecNode::File("groups/a b.grp".into()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_group_spec("C5^") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_group_spec("C5 ]") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_group_spec("Foo(3)"), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse_group_spec("GL(2,5)"), Err(Error::Unsupported(_))));
        assert!(matches!(parse_group_spec("C5^2^3"), Err(Error::Syntax { .. })));
    }

    fn leaf() -> impl Strategy<Value = SpecNode> {
        prop_oneof![
            (1u32..30).prop_map(SpecNode::Cyclic),
            (1u32..7).prop_map(SpecNode::Symmetric),
            (1u32..7).prop_map(SpecNode::Alternating),
            (1u32..12).prop_map(SpecNode::Dihedral),
            (1u32..6).prop_map(SpecNode::Dicyclic),
            prop::sample::select(vec![2u32, 3, 5, 7]).prop_map(SpecNode::Heisenberg),
            prop::sample::select(vec![2u32, 3, 5, 7, 11, 13]).prop_map(|q| SpecNode::Psl(2, q)),
            prop::sample::select(vec![2u32, 3, 5]).prop_map(|q| SpecNode::Sl(2, q)),
            "[a-z/._ \"\\\\]{1,12}".prop_map(SpecNode::File),
            prop::collection::vec(
                prop::collection::vec(prop::collection::vec(1u32..9, 1..4), 0..3),
                1..3
            )
            .prop_map(SpecNode::Permutations),
        ]
    }

    fn word() -> impl Strategy<Value = Word> {
        prop::collection::vec((1u32..4, -5i64..6), 0..3).prop_map(Word)
    }

    fn node() -> impl Strategy<Value = SpecNode> {
        leaf().prop_recursive(3, 12, 3, |inner| {
            prop_oneof![
                (inner.clone(), 1u32..4).prop_map(|(b, k)| SpecNode::Power(Box::new(b), k)),
                prop::collection::vec(inner.clone(), 2..4).prop_map(SpecNode::Product),
                (inner.clone(), inner, prop::collection::vec(prop::collection::vec(word(), 1..3), 1..3))
                    .prop_map(|(n, a, action)| SpecNode::Semidirect {
                        normal: Box::new(n),
                        acting: Box::new(a),
                        action
                    }),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_round_trips(ast in node()) {
            let printed = ast.to_string();
            let reparsed = parse_group_spec(&printed).unwrap();
            prop_assert_eq!(&reparsed.ast, &ast);
            prop_assert_eq!(reparsed.ast.to_string(), printed);
        }
    }
}
