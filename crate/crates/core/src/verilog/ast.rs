/// Source position, 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFile {
    pub modules: Vec<Module>,
}

impl SourceFile {
    pub fn module(&self, name: &str) -> Option<&Module> {
        self.modules.iter().find(|m| m.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Module {
    pub name: String,
    pub ports: Vec<Port>,
    pub decls: Vec<Decl>,
    pub items: Vec<Item>,
    pub pos: Pos,
}

impl Module {
    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    /// Number of `assign` and `always@*` assignments.
    pub fn comb_assign_count(&self) -> usize {
        self.items
            .iter()
            .map(|i| match i {
                Item::Assign(_) => 1,
                Item::Comb(a) => a.len(),
                _ => 0,
            })
            .sum()
    }

    /// Number of non-blocking assignments in clocked blocks.
    pub fn clocked_assign_count(&self) -> usize {
        self.items
            .iter()
            .map(|i| match i {
                Item::Clocked { assigns, .. } => assigns.len(),
                _ => 0,
            })
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Input,
    Output,
}

/// `[msb:lsb]` with `msb >= lsb`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Range {
    pub msb: u32,
    pub lsb: u32,
}

impl Range {
    pub fn width(&self) -> usize {
        (self.msb - self.lsb + 1) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub dir: Direction,
    pub is_reg: bool,
    pub range: Option<Range>,
    pub pos: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetKind {
    Wire,
    Reg,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub kind: NetKind,
    pub range: Option<Range>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    /// Continuous `assign`.
    Assign(Assign),
    /// `always@*` block; one blocking assignment per target.
    Comb(Vec<Assign>),
    /// `always@(posedge clock)` block of non-blocking assignments.
    Clocked {
        clock: String,
        assigns: Vec<Assign>,
        pos: Pos,
    },
    Instance {
        module: String,
        name: String,
        connections: Connections,
        pos: Pos,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Connections {
    /// `.*`
    Wildcard,
    /// `.port(expr)`; an empty expression leaves the port open.
    Named(Vec<(String, Option<Expr>)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assign {
    pub lhs: LValue,
    pub rhs: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LValue {
    Whole(String),
    Bit(String, u32),
    Part(String, Range),
    Concat(Vec<LValue>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    ReduceAnd,
    ReduceOr,
    ReduceXor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    And,
    Or,
    Xor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Ident(String),
    /// `width` is `None` for unsized literals, which take their width from context.
    Number {
        width: Option<u32>,
        value: u64,
    },
    Bit(String, u32),
    Part(String, Range),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Ternary(Box<Expr>, Box<Expr>, Box<Expr>),
    Concat(Vec<Expr>),
    Replicate(u32, Vec<Expr>),
}
