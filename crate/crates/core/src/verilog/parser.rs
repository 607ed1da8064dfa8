use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::ParseError;

/// Keywords that belong to Verilog but not to the accepted subset.
const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "if",
    "else",
    "case",
    "casez",
    "casex",
    "for",
    "while",
    "repeat",
    "forever",
    "function",
    "task",
    "initial",
    "parameter",
    "localparam",
    "integer",
    "generate",
    "genvar",
    "inout",
    "signed",
    "real",
    "time",
    "defparam",
    "specify",
    "primitive",
    "fork",
    "supply0",
    "supply1",
    "tri",
    "wand",
    "wor",
    "logic",
    "always_ff",
    "always_comb",
    "assert",
];

pub fn parse(src: &str) -> Result<SourceFile, ParseError> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, at: 0 };
    let mut modules = Vec::new();
    while p.peek() != &Tok::Eof {
        modules.push(p.module()?);
    }
    Ok(SourceFile { modules })
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.at + k).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let pos = self.pos();
        ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }

    fn unsupported(&self, construct: impl Into<String>) -> ParseError {
        let pos = self.pos();
        ParseError::Unsupported {
            line: pos.line,
            col: pos.col,
            construct: construct.into(),
        }
    }

    /// Turns tokens that are valid Verilog but outside the subset into
    /// unsupported-construct errors, and anything else into a syntax error.
    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Tok::Foreign(op) => self.unsupported(format!("operator `{op}`")),
            Tok::Ident(k) if UNSUPPORTED_KEYWORDS.contains(&k.as_str()) => {
                self.unsupported(format!("`{k}`"))
            }
            Tok::Eof => self.error(format!("expected {expected}, found end of file")),
            t => self.error(format!("expected {expected}, found {}", describe(t))),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), ParseError> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{k}`")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if !is_keyword(&name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn const_int(&mut self) -> Result<u32, ParseError> {
        match *self.peek() {
            Tok::Number { value, .. } if value <= u32::MAX as u64 => {
                self.bump();
                Ok(value as u32)
            }
            _ => match self.peek() {
                Tok::Ident(_) => Err(self.unsupported("non-constant index or width")),
                _ => Err(self.unexpected("integer constant")),
            },
        }
    }

    fn module(&mut self) -> Result<Module, ParseError> {
        let pos = self.pos();
        if self.is_kw("macromodule") {
            return Err(self.unsupported("`macromodule`"));
        }
        self.expect_kw("module")?;
        let name = self.ident()?;
        if self.is_sym("#") {
            return Err(self.unsupported("module parameters"));
        }
        let mut ports = Vec::new();
        if self.eat_sym("(") {
            if !self.is_sym(")") {
                self.port_list(&mut ports)?;
            }
            self.expect_sym(")")?;
        }
        self.expect_sym(";")?;
        let mut decls = Vec::new();
        let mut items = Vec::new();
        while !self.is_kw("endmodule") {
            self.item(&mut decls, &mut items)?;
        }
        self.bump();
        Ok(Module {
            name,
            ports,
            decls,
            items,
            pos,
        })
    }

    fn port_list(&mut self, ports: &mut Vec<Port>) -> Result<(), ParseError> {
        let mut current: Option<(Direction, bool, Option<Range>)> = None;
        loop {
            let pos = self.pos();
            let dir = if self.is_kw("input") {
                Some(Direction::Input)
            } else if self.is_kw("output") {
                Some(Direction::Output)
            } else if self.is_kw("inout") {
                return Err(self.unsupported("`inout` port"));
            } else {
                None
            };
            match dir {
                Some(dir) => {
                    self.bump();
                    let mut is_reg = false;
                    if self.is_kw("reg") {
                        self.bump();
                        is_reg = true;
                    } else if self.is_kw("wire") {
                        self.bump();
                    }
                    if dir == Direction::Input && is_reg {
                        return Err(self.error("input ports cannot be `reg`"));
                    }
                    let range = self.opt_range()?;
                    current = Some((dir, is_reg, range));
                }
                None if current.is_none() => {
                    return Err(self.unsupported("non-ANSI port list"));
                }
                None => {}
            }
            let (dir, is_reg, range) = current.unwrap();
            let name = self.ident()?;
            ports.push(Port {
                name,
                dir,
                is_reg,
                range,
                pos,
            });
            if !self.eat_sym(",") {
                return Ok(());
            }
        }
    }

    fn opt_range(&mut self) -> Result<Option<Range>, ParseError> {
        if !self.eat_sym("[") {
            return Ok(None);
        }
        let msb = self.const_int()?;
        self.expect_sym(":")?;
        let lsb = self.const_int()?;
        self.expect_sym("]")?;
        if msb < lsb {
            return Err(self.unsupported("ascending range [lsb:msb]"));
        }
        Ok(Some(Range { msb, lsb }))
    }

    fn item(&mut self, decls: &mut Vec<Decl>, items: &mut Vec<Item>) -> Result<(), ParseError> {
        let pos = self.pos();
        let Tok::Ident(word) = self.peek().clone() else {
            return Err(self.unexpected("module item"));
        };
        match word.as_str() {
            "wire" | "reg" => {
                self.bump();
                let kind = if word == "reg" {
                    NetKind::Reg
                } else {
                    NetKind::Wire
                };
                let range = self.opt_range()?;
                loop {
                    let pos = self.pos();
                    let name = self.ident()?;
                    if self.is_sym("=") {
                        return Err(self.unsupported("declaration with initializer"));
                    }
                    decls.push(Decl {
                        name,
                        kind,
                        range,
                        pos,
                    });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(";")
            }
            "input" | "output" => Err(self.unsupported("port declaration in module body")),
            "assign" => {
                self.bump();
                loop {
                    let pos = self.pos();
                    let lhs = self.lvalue()?;
                    self.expect_sym("=")?;
                    let rhs = self.expr()?;
                    items.push(Item::Assign(Assign { lhs, rhs, pos }));
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(";")
            }
            "always" => {
                self.bump();
                self.expect_sym("@")?;
                if self.eat_sym("*") {
                    return self.comb_block(items);
                }
                self.expect_sym("(")?;
                if self.eat_sym("*") {
                    self.expect_sym(")")?;
                    return self.comb_block(items);
                }
                if self.is_kw("negedge") {
                    return Err(self.unsupported("`negedge` clocking"));
                }
                if !self.is_kw("posedge") {
                    return Err(self.unsupported("explicit sensitivity list"));
                }
                self.bump();
                let clock = self.ident()?;
                if self.is_kw("or") || self.is_sym(",") {
                    return Err(self.unsupported("multiple clock/reset edges"));
                }
                self.expect_sym(")")?;
                let assigns = self.statements(true)?;
                items.push(Item::Clocked {
                    clock,
                    assigns,
                    pos,
                });
                Ok(())
            }
            w if is_keyword(w) || UNSUPPORTED_KEYWORDS.contains(&w) => {
                Err(self.unexpected("module item"))
            }
            _ => {
                let module = self.ident()?;
                if self.is_sym("#") || matches!(self.peek(), Tok::Foreign(f) if f == "#") {
                    return Err(self.unsupported("parameter override"));
                }
                let name = self.ident()?;
                self.expect_sym("(")?;
                let connections = if self.is_sym(".") && self.peek_at(1) == &Tok::Sym("*") {
                    self.bump();
                    self.bump();
                    Connections::Wildcard
                } else {
                    let mut named = Vec::new();
                    if !self.is_sym(")") {
                        loop {
                            if !self.is_sym(".") {
                                return Err(self.unsupported("positional port connection"));
                            }
                            self.bump();
                            if self.is_sym("*") {
                                return Err(self.unsupported("`.*` mixed with named connections"));
                            }
                            let port = self.ident()?;
                            self.expect_sym("(")?;
                            let expr = if self.is_sym(")") {
                                None
                            } else {
                                Some(self.expr()?)
                            };
                            self.expect_sym(")")?;
                            named.push((port, expr));
                            if !self.eat_sym(",") {
                                break;
                            }
                        }
                    }
                    Connections::Named(named)
                };
                self.expect_sym(")")?;
                self.expect_sym(";")?;
                items.push(Item::Instance {
                    module,
                    name,
                    connections,
                    pos,
                });
                Ok(())
            }
        }
    }

    fn comb_block(&mut self, items: &mut Vec<Item>) -> Result<(), ParseError> {
        let assigns = self.statements(false)?;
        items.push(Item::Comb(assigns));
        Ok(())
    }

    /// A single assignment or a `begin ... end` list of them.
    fn statements(&mut self, clocked: bool) -> Result<Vec<Assign>, ParseError> {
        let mut out = Vec::new();
        if self.is_kw("begin") {
            self.bump();
            if self.eat_sym(":") {
                self.ident()?;
            }
            while !self.is_kw("end") {
                out.push(self.assignment(clocked)?);
            }
            self.bump();
        } else {
            out.push(self.assignment(clocked)?);
        }
        Ok(out)
    }

    fn assignment(&mut self, clocked: bool) -> Result<Assign, ParseError> {
        let pos = self.pos();
        let lhs = self.lvalue()?;
        match (clocked, self.peek()) {
            (true, Tok::Sym("<=")) | (false, Tok::Sym("=")) => {
                self.bump();
            }
            (true, Tok::Sym("=")) => {
                return Err(self.unsupported("blocking assignment in clocked block"))
            }
            (false, Tok::Sym("<=")) => {
                return Err(self.unsupported("non-blocking assignment in combinational block"))
            }
            _ => return Err(self.unexpected("assignment operator")),
        }
        let rhs = self.expr()?;
        self.expect_sym(";")?;
        Ok(Assign { lhs, rhs, pos })
    }

    fn lvalue(&mut self) -> Result<LValue, ParseError> {
        if self.eat_sym("{") {
            let mut parts = vec![self.lvalue()?];
            while self.eat_sym(",") {
                parts.push(self.lvalue()?);
            }
            self.expect_sym("}")?;
            return Ok(LValue::Concat(parts));
        }
        let name = self.ident()?;
        Ok(match self.select()? {
            None => LValue::Whole(name),
            Some(Select::Bit(b)) => LValue::Bit(name, b),
            Some(Select::Part(r)) => LValue::Part(name, r),
        })
    }

    fn select(&mut self) -> Result<Option<Select>, ParseError> {
        if !self.eat_sym("[") {
            return Ok(None);
        }
        let hi = self.const_int()?;
        let sel = if self.eat_sym(":") {
            let lo = self.const_int()?;
            if hi < lo {
                return Err(self.unsupported("ascending part-select"));
            }
            Select::Part(Range { msb: hi, lsb: lo })
        } else {
            Select::Bit(hi)
        };
        if matches!(self.peek(), Tok::Foreign(f) if f == "+" || f == "-") {
            return Err(self.unsupported("indexed part-select"));
        }
        self.expect_sym("]")?;
        Ok(Some(sel))
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let cond = self.binary(0)?;
        if self.eat_sym("?") {
            let t = self.expr()?;
            self.expect_sym(":")?;
            let e = self.expr()?;
            return Ok(Expr::Ternary(Box::new(cond), Box::new(t), Box::new(e)));
        }
        Ok(cond)
    }

    /// Precedence climbing over `|` < `^` < `&`.
    fn binary(&mut self, level: usize) -> Result<Expr, ParseError> {
        const LEVELS: [(&str, BinaryOp); 3] = [
            ("|", BinaryOp::Or),
            ("^", BinaryOp::Xor),
            ("&", BinaryOp::And),
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let (sym, op) = LEVELS[level];
        let mut lhs = self.binary(level + 1)?;
        while self.eat_sym(sym) {
            let rhs = self.binary(level + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        if let Tok::Foreign(f) = self.peek() {
            return Err(self.unsupported(format!("operator `{f}`")));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let op = match self.peek() {
            Tok::Sym("~") => UnaryOp::Not,
            Tok::Sym("&") => UnaryOp::ReduceAnd,
            Tok::Sym("|") => UnaryOp::ReduceOr,
            Tok::Sym("^") => UnaryOp::ReduceXor,
            _ => return self.primary(),
        };
        self.bump();
        Ok(Expr::Unary(op, Box::new(self.unary()?)))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Number { width, value } => {
                self.bump();
                Ok(Expr::Number { width, value })
            }
            Tok::Ident(name) if !is_keyword(&name) => {
                self.bump();
                if self.is_sym("(") {
                    return Err(self.unsupported("function call"));
                }
                Ok(match self.select()? {
                    None => Expr::Ident(name),
                    Some(Select::Bit(b)) => Expr::Bit(name, b),
                    Some(Select::Part(r)) => Expr::Part(name, r),
                })
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Sym("{") => {
                self.bump();
                if let Tok::Number { .. } = self.peek() {
                    if self.peek_at(1) == &Tok::Sym("{") {
                        let count = self.const_int()?;
                        if count == 0 {
                            return Err(self.error("replication count must be positive"));
                        }
                        self.expect_sym("{")?;
                        let parts = self.expr_list()?;
                        self.expect_sym("}")?;
                        self.expect_sym("}")?;
                        return Ok(Expr::Replicate(count, parts));
                    }
                }
                let parts = self.expr_list()?;
                self.expect_sym("}")?;
                Ok(Expr::Concat(parts))
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn expr_list(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut parts = vec![self.expr()?];
        while self.eat_sym(",") {
            parts.push(self.expr()?);
        }
        Ok(parts)
    }
}

enum Select {
    Bit(u32),
    Part(Range),
}

fn is_keyword(word: &str) -> bool {
    matches!(
        word,
        "module"
            | "endmodule"
            | "input"
            | "output"
            | "wire"
            | "reg"
            | "assign"
            | "always"
            | "posedge"
            | "negedge"
            | "begin"
            | "end"
            | "or"
    ) || UNSUPPORTED_KEYWORDS.contains(&word)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number { value, .. } => format!("number {value}"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Foreign(s) => format!("`{s}`"),
        Tok::Eof => "end of file".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_through() {
        let f = parse("module m(input a, output b); assign b = a; endmodule").unwrap();
        let m = &f.modules[0];
        assert_eq!(m.ports.len(), 2);
        assert_eq!(m.comb_assign_count(), 1);
        assert_eq!(m.clocked_assign_count(), 0);
    }

    #[test]
    fn toy_corpus() {
        let f = parse(include_str!("../../../../corpus/toy/toy.v")).unwrap();
        let toy = f.module("toy").unwrap();
        assert_eq!(toy.comb_assign_count(), 2);
        assert_eq!(toy.clocked_assign_count(), 2);
        assert_eq!(
            toy.port("in").unwrap().range,
            Some(Range { msb: 1, lsb: 0 })
        );
        assert!(toy.port("out").unwrap().is_reg);
        let top = f.module("top").unwrap();
        assert_eq!(top.clocked_assign_count(), 3);
        assert!(top.items.iter().any(|i| matches!(
            i,
            Item::Instance { module, name, connections: Connections::Wildcard, .. }
                if module == "toy" && name == "des"
        )));
    }

    #[test]
    fn precedence() {
        let f = parse("module m(input a, b, c, output y); assign y = a | b & ~c ^ a; endmodule")
            .unwrap();
        let Item::Assign(a) = &f.modules[0].items[0] else {
            panic!()
        };
        // a | ((b & ~c) ^ a)
        let Expr::Binary(BinaryOp::Or, _, rhs) = &a.rhs else {
            panic!("{:?}", a.rhs)
        };
        assert!(matches!(**rhs, Expr::Binary(BinaryOp::Xor, _, _)));
    }

    #[test]
    fn replication_and_selects() {
        let f = parse(
            "module m(input [3:0] a, output [3:0] y); assign y = {2{a[0]}} ^ {a[3:2], 2'b01}; endmodule",
        )
        .unwrap();
        let Item::Assign(a) = &f.modules[0].items[0] else {
            panic!()
        };
        let Expr::Binary(BinaryOp::Xor, l, r) = &a.rhs else {
            panic!()
        };
        assert_eq!(**l, Expr::Replicate(2, vec![Expr::Bit("a".into(), 0)]));
        assert!(matches!(&**r, Expr::Concat(v) if v.len() == 2));
    }

    #[test]
    fn negedge_is_unsupported() {
        let err = parse(
            "module m(input clk, input d, output reg q); always@(negedge clk) q <= d; endmodule",
        )
        .unwrap_err();
        assert!(
            matches!(&err, ParseError::Unsupported { construct, line: 1, .. } if construct.contains("negedge")),
            "{err}"
        );
    }

    #[test]
    fn unsupported_and_syntax_errors() {
        let e = parse("module m(input a, output b); assign b = a + a; endmodule").unwrap_err();
        assert!(
            matches!(e, ParseError::Unsupported { ref construct, .. } if construct.contains('+'))
        );
        let e = parse("module m(input a, output reg b);\n always@* if (a) b = 1; endmodule")
            .unwrap_err();
        assert!(matches!(e, ParseError::Unsupported { line: 2, .. }), "{e}");
        let e = parse("module m(input a output b); endmodule").unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 1, .. }), "{e}");
        let e =
            parse("module m(input clk, d, output reg q); always@(posedge clk) q = d; endmodule")
                .unwrap_err();
        assert!(matches!(e, ParseError::Unsupported { .. }), "{e}");
    }
}
