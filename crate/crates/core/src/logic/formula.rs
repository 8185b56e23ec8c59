use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::logic::atom::{canonical_order, Atom};
use crate::logic::table::{atom_column, check_atom_count, Bits, TruthTable};

/// Propositional expression tree. `And`/`Or` are n-ary.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    True,
    False,
    Atom(Atom),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn atom(atom: Atom) -> Expr {
        Expr::Atom(atom)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn implies(a: Expr, b: Expr) -> Expr {
        Expr::Implies(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Expr, b: Expr) -> Expr {
        Expr::Xor(Box::new(a), Box::new(b))
    }

    /// Conjunction that collapses the zero- and one-operand cases.
    pub fn and_all(mut parts: Vec<Expr>) -> Expr {
        match parts.len() {
            0 => Expr::True,
            1 => parts.pop().unwrap(),
            _ => Expr::And(parts),
        }
    }

    /// Disjunction that collapses the zero- and one-operand cases.
    pub fn or_all(mut parts: Vec<Expr>) -> Expr {
        match parts.len() {
            0 => Expr::False,
            1 => parts.pop().unwrap(),
            _ => Expr::Or(parts),
        }
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Expr::True | Expr::False => {}
            Expr::Atom(a) => {
                out.insert(a.clone());
            }
            Expr::Not(e) => e.collect_atoms(out),
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.collect_atoms(out)),
            Expr::Implies(a, b) | Expr::Xor(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    /// Satisfying rows over `order` (which must contain every atom used).
    pub fn eval_bits(&self, order: &[Atom]) -> Result<Bits> {
        check_atom_count(order.len())?;
        let n = order.len();
        let rows = 1usize << n;
        Ok(match self {
            Expr::True => Bits::full(rows),
            Expr::False => Bits::empty(rows),
            Expr::Atom(a) => {
                let j = order
                    .iter()
                    .position(|b| b == a)
                    .ok_or_else(|| Error::UndeclaredAtom(a.to_string()))?;
                atom_column(j, n)
            }
            Expr::Not(e) => e.eval_bits(order)?.not(),
            Expr::And(es) => es
                .iter()
                .try_fold(Bits::full(rows), |acc, e| Ok::<_, Error>(acc.and(&e.eval_bits(order)?)))?,
            Expr::Or(es) => es
                .iter()
                .try_fold(Bits::empty(rows), |acc, e| Ok::<_, Error>(acc.or(&e.eval_bits(order)?)))?,
            Expr::Implies(a, b) => a.eval_bits(order)?.not().or(&b.eval_bits(order)?),
            Expr::Xor(a, b) => a.eval_bits(order)?.xor(&b.eval_bits(order)?),
        })
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::True | Expr::False | Expr::Atom(_) => 1,
            Expr::Not(e) => 1 + e.size(),
            Expr::And(es) | Expr::Or(es) => 1 + es.iter().map(Expr::size).sum::<usize>(),
            Expr::Implies(a, b) | Expr::Xor(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, op: &str, parts: &[&Expr]) -> fmt::Result {
            write!(f, "({op}")?;
            for p in parts {
                write!(f, " {p}")?;
            }
            f.write_str(")")
        }
        match self {
            Expr::True => f.write_str("true"),
            Expr::False => f.write_str("false"),
            Expr::Atom(a) => write!(f, "{a}"),
            Expr::Not(e) => list(f, "not", &[e]),
            Expr::And(es) => list(f, "and", &es.iter().collect::<Vec<_>>()),
            Expr::Or(es) => list(f, "or", &es.iter().collect::<Vec<_>>()),
            Expr::Implies(a, b) => list(f, "implies", &[a, b]),
            Expr::Xor(a, b) => list(f, "xor", &[a, b]),
        }
    }
}

/// A formula: an expression tree together with its truth table over a
/// canonical atom order. Equality and hashing use the truth table only.
#[derive(Debug, Clone)]
pub struct Formula {
    expr: Expr,
    table: TruthTable,
}

impl Formula {
    /// Build over the atoms the expression mentions.
    pub fn new(expr: Expr) -> Result<Formula> {
        let atoms: Vec<Atom> = expr.atoms().into_iter().collect();
        Formula::with_atoms(expr, &atoms)
    }

    /// Build over `atoms` (canonicalized); every atom of `expr` must be listed.
    pub fn with_atoms(expr: Expr, atoms: &[Atom]) -> Result<Formula> {
        let order = canonical_order(atoms.iter().cloned());
        let bits = expr.eval_bits(&order)?;
        let table = TruthTable::new(order, bits)?;
        Ok(Formula { expr, table })
    }

    pub fn top(atoms: &[Atom]) -> Result<Formula> {
        Formula::with_atoms(Expr::True, atoms)
    }

    pub fn bottom(atoms: &[Atom]) -> Result<Formula> {
        Formula::with_atoms(Expr::False, atoms)
    }

    pub fn from_atom(atom: Atom) -> Formula {
        Formula::new(Expr::Atom(atom)).expect("single atom is within limits")
    }

    pub(crate) fn from_parts(expr: Expr, table: TruthTable) -> Formula {
        debug_assert_eq!(expr.eval_bits(table.atoms()).ok().as_ref(), Some(table.bits()));
        Formula { expr, table }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn atoms(&self) -> &[Atom] {
        self.table.atoms()
    }

    pub fn num_atoms(&self) -> usize {
        self.table.num_atoms()
    }

    /// The set of satisfying assignments.
    pub fn models(&self) -> &TruthTable {
        &self.table
    }

    pub fn bits(&self) -> &Bits {
        self.table.bits()
    }

    pub fn is_tautology(&self) -> bool {
        self.bits().all()
    }

    pub fn is_unsatisfiable(&self) -> bool {
        self.bits().none()
    }

    /// Same expression over a larger atom order.
    pub fn extend_to(&self, atoms: &[Atom]) -> Result<Formula> {
        let order = canonical_order(atoms.iter().cloned().chain(self.atoms().iter().cloned()));
        if order == self.atoms() {
            return Ok(self.clone());
        }
        Ok(Formula {
            expr: self.expr.clone(),
            table: self.table.extend_to(&order)?,
        })
    }

    /// Logical equivalence after extending both sides to the union of their atoms.
    pub fn equivalent(&self, other: &Formula) -> Result<bool> {
        let (a, b) = harmonize(self, other)?;
        Ok(a.bits() == b.bits())
    }

    /// `self ⊨ other`: every model of `self` is a model of `other`.
    pub fn entails(&self, other: &Formula) -> Result<bool> {
        let (a, b) = harmonize(self, other)?;
        Ok(a.bits().is_subset(b.bits()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(&self) -> Formula {
        Formula {
            expr: Expr::not(self.expr.clone()),
            table: TruthTable::new(self.atoms().to_vec(), self.bits().not()).unwrap(),
        }
    }

    pub fn and(&self, other: &Formula) -> Result<Formula> {
        self.combine(other, |a, b| Expr::And(vec![a, b]), Bits::and)
    }

    pub fn or(&self, other: &Formula) -> Result<Formula> {
        self.combine(other, |a, b| Expr::Or(vec![a, b]), Bits::or)
    }

    pub fn implies(&self, other: &Formula) -> Result<Formula> {
        self.combine(other, Expr::implies, |a, b| a.not().or(b))
    }

    pub fn xor(&self, other: &Formula) -> Result<Formula> {
        self.combine(other, Expr::xor, Bits::xor)
    }

    fn combine(
        &self,
        other: &Formula,
        node: impl FnOnce(Expr, Expr) -> Expr,
        op: impl FnOnce(&Bits, &Bits) -> Bits,
    ) -> Result<Formula> {
        let (a, b) = harmonize(self, other)?;
        let bits = op(a.bits(), b.bits());
        Ok(Formula {
            expr: node(a.expr, b.expr),
            table: TruthTable::new(a.table.atoms().to_vec(), bits)?,
        })
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.table.hash(state);
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

/// Union of two canonical atom orders.
pub fn union_atoms(a: &[Atom], b: &[Atom]) -> Vec<Atom> {
    canonical_order(a.iter().chain(b).cloned())
}

/// Extend both formulas to the union of their atom orders.
pub fn harmonize(a: &Formula, b: &Formula) -> Result<(Formula, Formula)> {
    let order = union_atoms(a.atoms(), b.atoms());
    Ok((a.extend_to(&order)?, b.extend_to(&order)?))
}

/// Parse an s-expression formula; every atom token must appear in `declared`.
pub fn parse_formula(text: &str, declared: &[Atom]) -> Result<Formula> {
    let expr = parse_expr(text)?;
    if let Some(undeclared) = expr.atoms().into_iter().find(|a| !declared.contains(a)) {
        return Err(Error::UndeclaredAtom(undeclared.to_string()));
    }
    Formula::with_atoms(expr, declared)
}

/// Parse an s-expression without an atom declaration.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let tokens = tokenize(text);
    let mut pos = 0;
    let expr = parse_node(&tokens, &mut pos, text.len())?;
    if let Some(tok) = tokens.get(pos) {
        return Err(Error::Syntax {
            pos: tok.offset,
            message: format!("unexpected trailing `{}`", tok.text),
        });
    }
    Ok(expr)
}

struct Token<'a> {
    text: &'a str,
    offset: usize,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        let is_delim = c.is_whitespace() || c == '(' || c == ')';
        if is_delim {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &text[s..i],
                    offset: s,
                });
            }
            if c != ' ' && !c.is_whitespace() {
                tokens.push(Token {
                    text: &text[i..i + 1],
                    offset: i,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &text[s..],
            offset: s,
        });
    }
    tokens
}

fn parse_node(tokens: &[Token<'_>], pos: &mut usize, end: usize) -> Result<Expr> {
    let tok = tokens.get(*pos).ok_or_else(|| Error::Syntax {
        pos: end,
        message: "unexpected end of input".into(),
    })?;
    *pos += 1;
    match tok.text {
        "(" => {
            let op = tokens.get(*pos).ok_or_else(|| Error::Syntax {
                pos: end,
                message: "expected operator".into(),
            })?;
            *pos += 1;
            let mut args = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => {
                        return Err(Error::Syntax {
                            pos: end,
                            message: "unclosed `(`".into(),
                        })
                    }
                    Some(t) if t.text == ")" => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => args.push(parse_node(tokens, pos, end)?),
                }
            }
            build_op(op, args)
        }
        ")" => Err(Error::Syntax {
            pos: tok.offset,
            message: "unexpected `)`".into(),
        }),
        "true" => Ok(Expr::True),
        "false" => Ok(Expr::False),
        atom => atom.parse::<Atom>().map(Expr::Atom).map_err(|_| Error::Syntax {
            pos: tok.offset,
            message: format!("invalid atom `{atom}`"),
        }),
    }
}

fn build_op(op: &Token<'_>, mut args: Vec<Expr>) -> Result<Expr> {
    let arity_error = |want: &str| Error::Syntax {
        pos: op.offset,
        message: format!("`{}` takes {want} operands, got {}", op.text, args.len()),
    };
    match op.text {
        "not" if args.len() == 1 => Ok(Expr::not(args.pop().unwrap())),
        "not" => Err(arity_error("1")),
        "and" if args.len() >= 2 => Ok(Expr::And(args)),
        "and" => Err(arity_error("at least 2")),
        "or" if args.len() >= 2 => Ok(Expr::Or(args)),
        "or" => Err(arity_error("at least 2")),
        "implies" | "xor" if args.len() == 2 => {
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            Ok(if op.text == "implies" {
                Expr::implies(a, b)
            } else {
                Expr::xor(a, b)
            })
        }
        "implies" | "xor" => Err(arity_error("2")),
        other => Err(Error::Syntax {
            pos: op.offset,
            message: format!("unknown operator `{other}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wl() -> Vec<Atom> {
        vec!["theta:yw".parse().unwrap(), "theta:yl".parse().unwrap()]
    }

    fn rows(f: &Formula) -> Vec<String> {
        let n = f.num_atoms();
        f.bits().ones().map(|r| TruthTable::row_label(r, n)).collect()
    }

    #[test]
    fn implication_truth_table() {
        let f = parse_formula("(implies theta:yl theta:yw)", &wl()).unwrap();
        assert_eq!(rows(&f), ["FF", "TF", "TT"]);
    }

    #[test]
    fn constants_and_xor() {
        assert!(parse_formula("true", &wl()).unwrap().is_tautology());
        assert!(parse_formula("false", &wl()).unwrap().is_unsatisfiable());
        let x = parse_formula("(xor theta:yl theta:yw)", &wl()).unwrap();
        assert_eq!(rows(&x), ["FT", "TF"]);
        let a = parse_formula("(and theta:yw (not theta:yl))", &wl()).unwrap();
        assert_eq!(rows(&a), ["TF"]);
    }

    #[test]
    fn parse_errors_report_position() {
        match parse_formula("(and theta:yw)", &wl()) {
            Err(Error::Syntax { pos: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_formula("(or theta:yw theta:yl", &wl()) {
            Err(Error::Syntax { pos: 21, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_formula("(or theta:yw ref:yl)", &wl()) {
            Err(Error::UndeclaredAtom(a)) => assert_eq!(a, "ref:yl"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_formula("(nand theta:yw theta:yl)", &wl()),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_formula("theta:yw )", &wl()),
            Err(Error::Syntax { pos: 9, .. })
        ));
    }

    #[test]
    fn display_round_trips() {
        let text = "(implies (and ref:yw theta:yl) (and ref:yl (not theta:yw)))";
        let e = parse_expr(text).unwrap();
        assert_eq!(e.to_string(), text);
    }

    #[test]
    fn equivalence_and_entailment() {
        let w = Formula::from_atom("theta:yw".parse().unwrap());
        let l = Formula::from_atom("theta:yl".parse().unwrap());
        let raw = w.and(&l.not()).unwrap().implies(&l.and(&w.not()).unwrap()).unwrap();
        // (W ∧ ¬L) → (L ∧ ¬W) is ¬W ∨ L, not L → W; check the ORPO orientation
        let orpo = l.and(&w.not()).unwrap().implies(&w.and(&l.not()).unwrap()).unwrap();
        assert!(orpo.equivalent(&l.implies(&w).unwrap()).unwrap());
        assert!(!raw.equivalent(&l.implies(&w).unwrap()).unwrap());
        assert!(!w.equivalent(&l).unwrap());

        let w_and_not_l = w.and(&l.not()).unwrap();
        assert!(w_and_not_l.entails(&l.implies(&w).unwrap()).unwrap());
        let top = Formula::top(&[]).unwrap();
        assert!(!top.entails(&w).unwrap());
        assert!(Formula::bottom(&[]).unwrap().entails(&w).unwrap());
    }

    #[test]
    fn unused_atoms_do_not_change_verdicts() {
        let f = parse_formula("(or theta:yw theta:yl)", &wl()).unwrap();
        let mut wider = wl();
        wider.push("ref:yw".parse().unwrap());
        let g = parse_formula("(or theta:yw theta:yl)", &wider).unwrap();
        assert_ne!(f, g);
        assert!(f.equivalent(&g).unwrap());
        assert!(f.entails(&g).unwrap() && g.entails(&f).unwrap());
    }
}
