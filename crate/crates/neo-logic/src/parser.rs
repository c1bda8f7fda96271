//! S-expression surface syntax.
//!
//! Grammar sketch (all forms are parenthesized, `;` starts a line comment):
//!
//! ```text
//! formula  := (exists VAR... body) | body
//! body     := atom | (and body...) | (or body...) | (not body)
//!           | (exists VAR... body)
//! atom     := (= term term) | (subseteq term term) | (supseteq term term)
//!           | (geq (card term) NAT) | (leq (card term) NAT)
//!           | (= (card term) NAT)
//!           | (conn term) | (acy term) | (clique term)
//!           | (in VAR term) | (adj VAR VAR)
//! term     := VAR | V | E | empty | (color NAME)
//!           | (cup term term) | (cap term term) | (setminus term term)
//!           | (comp term) | (N sigma term) | (N sigma term term)
//! sigma    := (geq NAT) | (eq NAT) | (leq NAT) | (mod NAT NAT...)
//!           | (set NAT...) | (finrec (low NAT...) NAT NAT (res NAT...))
//! ```
//!
//! Variable sorts (vertex set, edge set, vertex element) are inferred: the
//! second argument of `N` is edge-sort, its first argument and result are
//! vertex-sort, `V`/`E` anchor their sort, terms combined by set operations
//! or compared by equality/inclusion share a sort, `in`/`adj` arguments are
//! vertex elements. Unconstrained variables default to vertex sets.

use crate::{Atom, Body, CardCmp, FinRecSet, Formula, LogicError, Term, VarKind};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
enum Sexp {
    Sym(String, usize, usize),
    List(Vec<Sexp>, usize, usize),
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Sym(_, l, c) | Sexp::List(_, l, c) => (*l, *c),
        }
    }
}

fn err(pos: (usize, usize), msg: impl Into<String>) -> LogicError {
    LogicError::Syntax {
        line: pos.0,
        col: pos.1,
        msg: msg.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(String, usize, usize)>, LogicError> {
    let mut toks = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let mut cur = String::new();
        let mut start = 0usize;
        for (ci, ch) in line.chars().enumerate() {
            if ch == ';' {
                break;
            }
            if ch == '(' || ch == ')' || ch.is_whitespace() {
                if !cur.is_empty() {
                    toks.push((std::mem::take(&mut cur), li + 1, start + 1));
                }
                if !ch.is_whitespace() {
                    toks.push((ch.to_string(), li + 1, ci + 1));
                }
            } else {
                if cur.is_empty() {
                    start = ci;
                }
                cur.push(ch);
            }
        }
        if !cur.is_empty() {
            toks.push((cur, li + 1, start + 1));
        }
    }
    Ok(toks)
}

fn parse_sexp(
    toks: &[(String, usize, usize)],
    i: &mut usize,
) -> Result<Sexp, LogicError> {
    if *i >= toks.len() {
        return Err(err((0, 0), "unexpected end of input"));
    }
    let (t, l, c) = toks[*i].clone();
    *i += 1;
    match t.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                if *i >= toks.len() {
                    return Err(err((l, c), "unclosed parenthesis"));
                }
                if toks[*i].0 == ")" {
                    *i += 1;
                    return Ok(Sexp::List(items, l, c));
                }
                items.push(parse_sexp(toks, i)?);
            }
        }
        ")" => Err(err((l, c), "unexpected `)`")),
        _ => Ok(Sexp::Sym(t, l, c)),
    }
}

const RESERVED: &[&str] = &[
    "exists", "and", "or", "not", "=", "subseteq", "supseteq", "geq", "leq", "card", "conn",
    "acy", "clique", "in", "adj", "cup", "cap", "setminus", "comp", "N", "color", "V", "E",
    "empty", "eq", "mod", "set", "finrec", "low", "res",
];

fn check_var_name(s: &Sexp) -> Result<String, LogicError> {
    let Sexp::Sym(name, ..) = s else {
        return Err(err(s.pos(), "expected a variable name"));
    };
    if name.starts_with('_') {
        return Err(LogicError::ReservedName(name.clone()));
    }
    if RESERVED.contains(&name.as_str()) || name.parse::<u64>().is_ok() {
        return Err(err(s.pos(), format!("reserved word {name:?} used as variable")));
    }
    Ok(name.clone())
}

fn parse_nat(s: &Sexp) -> Result<u64, LogicError> {
    let Sexp::Sym(t, ..) = s else {
        return Err(err(s.pos(), "expected a number"));
    };
    t.parse().map_err(|_| err(s.pos(), format!("expected a number, got {t:?}")))
}

fn parse_sigma(s: &Sexp) -> Result<FinRecSet, LogicError> {
    let Sexp::List(items, l, c) = s else {
        return Err(err(s.pos(), "expected a neighborhood-condition set"));
    };
    let Some(Sexp::Sym(head, hl, hc)) = items.first() else {
        return Err(err((*l, *c), "empty neighborhood-condition set"));
    };
    let nats = |from: usize| -> Result<Vec<u32>, LogicError> {
        items[from..].iter().map(|x| parse_nat(x).map(|n| n as u32)).collect()
    };
    match head.as_str() {
        "geq" if items.len() == 2 => Ok(FinRecSet::geq(parse_nat(&items[1])? as u32)),
        "eq" if items.len() == 2 => Ok(FinRecSet::eq(parse_nat(&items[1])? as u32)),
        "leq" if items.len() == 2 => Ok(FinRecSet::leq(parse_nat(&items[1])? as u32)),
        "mod" if items.len() >= 3 => {
            let p = parse_nat(&items[1])? as u32;
            if p == 0 {
                return Err(err((*l, *c), "period must be at least 1"));
            }
            Ok(FinRecSet::modular(p, nats(2)?))
        }
        "set" => Ok(FinRecSet::finite(nats(1)?)),
        "finrec" if items.len() == 5 => {
            let low = match &items[1] {
                Sexp::List(xs, ..) if matches!(xs.first(), Some(Sexp::Sym(h, ..)) if h == "low") => {
                    xs[1..].iter().map(|x| parse_nat(x).map(|n| n as u32)).collect::<Result<Vec<_>, _>>()?
                }
                other => return Err(err(other.pos(), "expected `(low ...)`")),
            };
            let d = parse_nat(&items[2])? as u32;
            let p = parse_nat(&items[3])? as u32;
            if p == 0 {
                return Err(err((*l, *c), "period must be at least 1"));
            }
            let res = match &items[4] {
                Sexp::List(xs, ..) if matches!(xs.first(), Some(Sexp::Sym(h, ..)) if h == "res") => {
                    xs[1..].iter().map(|x| parse_nat(x).map(|n| n as u32)).collect::<Result<Vec<_>, _>>()?
                }
                other => return Err(err(other.pos(), "expected `(res ...)`")),
            };
            Ok(FinRecSet::new(low, d, p, res))
        }
        _ => Err(LogicError::UnknownSigmaName {
            name: head.clone(),
            line: *hl,
            col: *hc,
        }),
    }
}

fn parse_term(s: &Sexp) -> Result<Term, LogicError> {
    match s {
        Sexp::Sym(t, ..) => match t.as_str() {
            "V" => Ok(Term::AllV),
            "E" => Ok(Term::AllE),
            "empty" => Ok(Term::Empty),
            _ => Ok(Term::Var(check_var_name(s)?)),
        },
        Sexp::List(items, l, c) => {
            let Some(Sexp::Sym(head, ..)) = items.first() else {
                return Err(err((*l, *c), "expected a term"));
            };
            let binary = |ctor: fn(Box<Term>, Box<Term>) -> Term| -> Result<Term, LogicError> {
                if items.len() != 3 {
                    return Err(err((*l, *c), format!("`{head}` takes two terms")));
                }
                Ok(ctor(
                    Box::new(parse_term(&items[1])?),
                    Box::new(parse_term(&items[2])?),
                ))
            };
            match head.as_str() {
                "cup" => binary(Term::Cup),
                "cap" => binary(Term::Cap),
                "setminus" => binary(Term::SetMinus),
                "comp" => {
                    if items.len() != 2 {
                        return Err(err((*l, *c), "`comp` takes one term"));
                    }
                    Ok(Term::Comp(Box::new(parse_term(&items[1])?)))
                }
                "color" => {
                    if items.len() != 2 {
                        return Err(err((*l, *c), "`color` takes a name"));
                    }
                    let Sexp::Sym(name, ..) = &items[1] else {
                        return Err(err(items[1].pos(), "expected a color name"));
                    };
                    Ok(Term::Color(name.clone()))
                }
                "N" => {
                    if items.len() != 3 && items.len() != 4 {
                        return Err(err((*l, *c), "`N` takes a condition set and one or two terms"));
                    }
                    Ok(Term::N {
                        sigma: parse_sigma(&items[1])?,
                        arg: Box::new(parse_term(&items[2])?),
                        edges: if items.len() == 4 {
                            Some(Box::new(parse_term(&items[3])?))
                        } else {
                            None
                        },
                    })
                }
                _ => Err(err((*l, *c), format!("unknown term head {head:?}"))),
            }
        }
    }
}

fn parse_body(s: &Sexp, decls: &mut Vec<String>) -> Result<Body, LogicError> {
    let Sexp::List(items, l, c) = s else {
        return Err(err(s.pos(), "expected a formula"));
    };
    let Some(Sexp::Sym(head, ..)) = items.first() else {
        return Err(err((*l, *c), "expected a formula"));
    };
    match head.as_str() {
        "exists" => {
            if items.len() < 3 {
                return Err(err((*l, *c), "`exists` takes variables and a body"));
            }
            let names: Vec<String> = items[1..items.len() - 1]
                .iter()
                .map(check_var_name)
                .collect::<Result<_, _>>()?;
            for n in &names {
                if decls.contains(n) {
                    return Err(LogicError::Redeclared(n.clone()));
                }
                decls.push(n.clone());
            }
            let inner = parse_body(items.last().unwrap(), decls)?;
            Ok(Body::Exists(names, Box::new(inner)))
        }
        "and" | "or" => {
            let xs: Vec<Body> = items[1..]
                .iter()
                .map(|x| parse_body(x, decls))
                .collect::<Result<_, _>>()?;
            if xs.is_empty() {
                return Err(err((*l, *c), format!("`{head}` needs at least one operand")));
            }
            Ok(if head == "and" { Body::And(xs) } else { Body::Or(xs) })
        }
        "not" => {
            if items.len() != 2 {
                return Err(err((*l, *c), "`not` takes one formula"));
            }
            Ok(Body::Not(Box::new(parse_body(&items[1], decls)?)))
        }
        "=" | "subseteq" | "supseteq" => {
            if items.len() != 3 {
                return Err(err((*l, *c), format!("`{head}` takes two arguments")));
            }
            // (= (card t) k) is a size measurement
            if head == "="
                && matches!(&items[1], Sexp::List(xs, ..) if matches!(xs.first(), Some(Sexp::Sym(h, ..)) if h == "card"))
            {
                return parse_card(&items[1], CardCmp::Eq, &items[2]);
            }
            let t1 = parse_term(&items[1])?;
            let t2 = parse_term(&items[2])?;
            Ok(Body::Atom(match head.as_str() {
                "=" => Atom::Eq(t1, t2),
                "subseteq" => Atom::SubsetEq(t1, t2),
                _ => Atom::SupsetEq(t1, t2),
            }))
        }
        "geq" | "leq" => {
            if items.len() != 3 {
                return Err(err((*l, *c), format!("`{head}` takes `(card t)` and a bound")));
            }
            let cmp = if head == "geq" { CardCmp::Geq } else { CardCmp::Leq };
            parse_card(&items[1], cmp, &items[2])
        }
        "conn" | "acy" | "clique" => {
            if items.len() != 2 {
                return Err(err((*l, *c), format!("`{head}` takes one term")));
            }
            let t = parse_term(&items[1])?;
            Ok(Body::Atom(match head.as_str() {
                "conn" => Atom::Conn(t),
                "acy" => Atom::Acy(t),
                _ => Atom::Clique(t),
            }))
        }
        "in" => {
            if items.len() != 3 {
                return Err(err((*l, *c), "`in` takes a variable and a term"));
            }
            Ok(Body::Atom(Atom::In(
                check_var_name(&items[1])?,
                parse_term(&items[2])?,
            )))
        }
        "adj" => {
            if items.len() != 3 {
                return Err(err((*l, *c), "`adj` takes two variables"));
            }
            Ok(Body::Atom(Atom::Adj(
                check_var_name(&items[1])?,
                check_var_name(&items[2])?,
            )))
        }
        _ => Err(err((*l, *c), format!("unknown form {head:?}"))),
    }
}

fn parse_card(card: &Sexp, cmp: CardCmp, bound: &Sexp) -> Result<Body, LogicError> {
    let Sexp::List(xs, l, c) = card else {
        return Err(err(card.pos(), "expected `(card t)`"));
    };
    if xs.len() != 2 || !matches!(&xs[0], Sexp::Sym(h, ..) if h == "card") {
        return Err(err((*l, *c), "expected `(card t)`"));
    }
    Ok(Body::Atom(Atom::Card(
        parse_term(&xs[1])?,
        cmp,
        parse_nat(bound)?,
    )))
}

// --- sort inference ------------------------------------------------------

struct UnionFind {
    parent: BTreeMap<String, String>,
}

impl UnionFind {
    fn find(&mut self, x: &str) -> String {
        let p = self.parent.get(x).cloned().unwrap_or_else(|| {
            self.parent.insert(x.to_string(), x.to_string());
            x.to_string()
        });
        if p == x {
            return p;
        }
        let r = self.find(&p);
        self.parent.insert(x.to_string(), r.clone());
        r
    }

    fn union(&mut self, a: &str, b: &str) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // keep anchors as roots so their classes stay identifiable
            if rb.starts_with('\0') {
                self.parent.insert(ra, rb);
            } else {
                self.parent.insert(rb, ra);
            }
        }
    }
}

const VERTEX_ANCHOR: &str = "\0V";
const EDGE_ANCHOR: &str = "\0E";

/// Class key of a term, unifying operand classes; `None` for sort-neutral
/// terms (`empty`, colors alone carry no constraint).
fn term_class(t: &Term, uf: &mut UnionFind) -> Result<Option<String>, LogicError> {
    Ok(match t {
        Term::Var(x) => Some(uf.find(&format!("v:{x}"))),
        Term::AllV => Some(uf.find(VERTEX_ANCHOR)),
        Term::AllE => Some(uf.find(EDGE_ANCHOR)),
        Term::Empty | Term::Color(_) => None,
        Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
            let ca = term_class(a, uf)?;
            let cb = term_class(b, uf)?;
            match (ca, cb) {
                (Some(x), Some(y)) => {
                    uf.union(&x, &y);
                    Some(uf.find(&x))
                }
                (Some(x), None) | (None, Some(x)) => Some(x),
                (None, None) => None,
            }
        }
        Term::Comp(a) => term_class(a, uf)?,
        Term::N { arg, edges, .. } => {
            if let Some(c) = term_class(arg, uf)? {
                uf.union(&c, VERTEX_ANCHOR);
            }
            if let Some(e) = edges {
                if let Some(c) = term_class(e, uf)? {
                    uf.union(&c, EDGE_ANCHOR);
                }
            }
            Some(uf.find(VERTEX_ANCHOR))
        }
    })
}

fn infer_atom(a: &Atom, uf: &mut UnionFind) -> Result<(), LogicError> {
    match a {
        Atom::Eq(s, t) | Atom::SubsetEq(s, t) | Atom::SupsetEq(s, t) => {
            let cs = term_class(s, uf)?;
            let ct = term_class(t, uf)?;
            if let (Some(x), Some(y)) = (cs, ct) {
                uf.union(&x, &y);
            }
        }
        Atom::Card(t, _, _) | Atom::Conn(t) | Atom::Acy(t) => {
            term_class(t, uf)?;
        }
        Atom::Clique(t) => {
            if let Some(c) = term_class(t, uf)? {
                uf.union(&c, VERTEX_ANCHOR);
            }
        }
        Atom::In(_, t) => {
            if let Some(c) = term_class(t, uf)? {
                uf.union(&c, VERTEX_ANCHOR);
            }
        }
        Atom::Adj(..) => {}
    }
    Ok(())
}

fn infer_body(b: &Body, uf: &mut UnionFind, elems: &mut Vec<String>) -> Result<(), LogicError> {
    match b {
        Body::Atom(a) => {
            match a {
                Atom::In(x, _) => {
                    if !elems.contains(x) {
                        elems.push(x.clone());
                    }
                }
                Atom::Adj(x, y) => {
                    for v in [x, y] {
                        if !elems.contains(v) {
                            elems.push(v.clone());
                        }
                    }
                }
                _ => {}
            }
            infer_atom(a, uf)
        }
        Body::And(xs) | Body::Or(xs) => {
            xs.iter().try_for_each(|x| infer_body(x, uf, elems))
        }
        Body::Not(x) | Body::Exists(_, x) => infer_body(x, uf, elems),
    }
}

fn check_declared(b: &Body, decls: &[String]) -> Result<(), LogicError> {
    fn term_vars(t: &Term, out: &mut Vec<String>) {
        match t {
            Term::Var(x) => out.push(x.clone()),
            Term::Cup(a, b) | Term::Cap(a, b) | Term::SetMinus(a, b) => {
                term_vars(a, out);
                term_vars(b, out);
            }
            Term::Comp(a) => term_vars(a, out),
            Term::N { arg, edges, .. } => {
                term_vars(arg, out);
                if let Some(e) = edges {
                    term_vars(e, out);
                }
            }
            _ => {}
        }
    }
    let mut used = Vec::new();
    fn walk(b: &Body, used: &mut Vec<String>, tv: &dyn Fn(&Term, &mut Vec<String>)) {
        match b {
            Body::Atom(a) => match a {
                Atom::Eq(s, t) | Atom::SubsetEq(s, t) | Atom::SupsetEq(s, t) => {
                    tv(s, used);
                    tv(t, used);
                }
                Atom::Card(t, _, _) | Atom::Conn(t) | Atom::Acy(t) | Atom::Clique(t) => {
                    tv(t, used)
                }
                Atom::In(x, t) => {
                    used.push(x.clone());
                    tv(t, used);
                }
                Atom::Adj(x, y) => {
                    used.push(x.clone());
                    used.push(y.clone());
                }
            },
            Body::And(xs) | Body::Or(xs) => xs.iter().for_each(|x| walk(x, used, tv)),
            Body::Not(x) | Body::Exists(_, x) => walk(x, used, tv),
        }
    }
    walk(b, &mut used, &term_vars);
    for u in used {
        if !decls.contains(&u) {
            return Err(LogicError::Undeclared(u));
        }
    }
    Ok(())
}

/// Parse a formula file into an AST with inferred variable sorts. All
/// quantifier declarations (including nested ones) are hoisted into the
/// returned prefix; the body keeps its boolean structure.
pub fn parse(text: &str) -> Result<Formula, LogicError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(err((1, 1), "empty formula"));
    }
    let mut i = 0;
    let sexp = parse_sexp(&toks, &mut i)?;
    if i != toks.len() {
        return Err(err(toks[i].pos_tuple(), "trailing input after formula"));
    }
    let mut decls = Vec::new();
    let body = parse_body(&sexp, &mut decls)?;
    check_declared(&body, &decls)?;
    fn no_exists_under_not(b: &Body, under_not: bool) -> Result<(), LogicError> {
        match b {
            Body::Exists(_, x) => {
                if under_not {
                    return Err(LogicError::QuantifierUnderNegation);
                }
                no_exists_under_not(x, under_not)
            }
            Body::Not(x) => no_exists_under_not(x, true),
            Body::And(xs) | Body::Or(xs) => {
                xs.iter().try_for_each(|x| no_exists_under_not(x, under_not))
            }
            Body::Atom(_) => Ok(()),
        }
    }
    no_exists_under_not(&body, false)?;

    let mut uf = UnionFind {
        parent: BTreeMap::new(),
    };
    let mut elems = Vec::new();
    infer_body(&body, &mut uf, &mut elems)?;
    // element variables are vertices
    for x in &elems {
        let c = uf.find(&format!("v:{x}"));
        uf.union(&c, VERTEX_ANCHOR);
    }
    let rv = uf.find(VERTEX_ANCHOR);
    let re = uf.find(EDGE_ANCHOR);
    if rv == re {
        return Err(LogicError::SortConflict(
            "a term mixes vertex and edge sorts".into(),
        ));
    }
    let vars = decls
        .into_iter()
        .map(|name| {
            let r = uf.find(&format!("v:{name}"));
            let kind = if elems.contains(&name) {
                VarKind::VertexElem
            } else if r == re {
                VarKind::EdgeSet
            } else {
                VarKind::VertexSet
            };
            (name, kind)
        })
        .collect();
    // strip nested Exists wrappers: declarations are already hoisted
    fn strip(b: Body) -> Body {
        match b {
            Body::Exists(_, inner) => strip(*inner),
            Body::And(xs) => Body::And(xs.into_iter().map(strip).collect()),
            Body::Or(xs) => Body::Or(xs.into_iter().map(strip).collect()),
            Body::Not(x) => Body::Not(Box::new(strip(*x))),
            atom => atom,
        }
    }
    Ok(Formula {
        vars,
        body: strip(body),
    })
}

trait PosTuple {
    fn pos_tuple(&self) -> (usize, usize);
}

impl PosTuple for (String, usize, usize) {
    fn pos_tuple(&self) -> (usize, usize) {
        (self.1, self.2)
    }
}
