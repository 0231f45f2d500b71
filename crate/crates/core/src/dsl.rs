//! Line-oriented declaration language for categories, classes, functors,
//! setups, posets, selectors and replacements. Parsing reports precise
//! line/column positions; printing emits a canonical layout that parses
//! back to the identical document.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::category::{identity_name, FinCategory, FinPoset, FunctorData, MorphClass};
use crate::error::{Error, Result};
use crate::hypotheses::clauses::KSelector;
use crate::hypotheses::weak::WeakReplacement;
use crate::setup::LocalisationSetup;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryDecl {
    pub name: String,
    pub objects: Vec<String>,
    /// (id, src, dst)
    pub mors: Vec<(String, String, String)>,
    /// (g, f, h) meaning g∘f = h
    pub comps: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDecl {
    pub name: String,
    pub carrier: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctorDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub omap: Vec<(String, String)>,
    pub mmap: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetupDecl {
    pub name: String,
    pub c: String,
    pub d: String,
    pub t: String,
    pub s: String,
    pub sprime: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosetDecl {
    pub name: String,
    pub elements: Vec<String>,
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KSelectorDecl {
    pub name: String,
    pub setup: String,
    pub entries: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakDecl {
    pub name: String,
    pub setup: String,
    pub objects: Vec<(String, Vec<String>)>,
    pub arrows: Vec<(String, Vec<String>)>,
    /// ((g, f), selection) for the composable pair g∘f
    pub pairs: Vec<((String, String), Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Item {
    Category(CategoryDecl),
    Class(ClassDecl),
    Functor(FunctorDecl),
    Setup(SetupDecl),
    Poset(PosetDecl),
    KSelector(KSelectorDecl),
    Weak(WeakDecl),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DslDocument {
    pub items: Vec<Item>,
}

// ---------------------------------------------------------------- lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    Colon,
    Semi,
    Comma,
    Eq,
    Lt,
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn bare(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        let bump = |ch: char, line: &mut usize, col: &mut usize| {
            if ch == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                chars.next();
                bump(c, &mut line, &mut col);
            }
            '#' => {
                while let Some(&ch) = chars.peek() {
                    chars.next();
                    bump(ch, &mut line, &mut col);
                    if ch == '\n' {
                        break;
                    }
                }
            }
            '{' | '}' | ':' | ';' | ',' | '=' | '<' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    '=' => Tok::Eq,
                    _ => Tok::Lt,
                };
                out.push(Token { tok, line: l0, col: c0 });
            }
            '-' => {
                chars.next();
                bump(c, &mut line, &mut col);
                match chars.peek() {
                    Some('>') => {
                        chars.next();
                        bump('>', &mut line, &mut col);
                        out.push(Token { tok: Tok::Arrow, line: l0, col: c0 });
                    }
                    _ => return Err(perr(l0, c0, "expected `->`")),
                }
            }
            '"' => {
                chars.next();
                bump(c, &mut line, &mut col);
                let mut text = String::new();
                loop {
                    match chars.next() {
                        None => return Err(perr(l0, c0, "unterminated string")),
                        Some('"') => {
                            bump('"', &mut line, &mut col);
                            break;
                        }
                        Some('\\') => {
                            bump('\\', &mut line, &mut col);
                            match chars.next() {
                                Some(e @ ('"' | '\\')) => {
                                    bump(e, &mut line, &mut col);
                                    text.push(e);
                                }
                                _ => return Err(perr(line, col, "bad escape")),
                            }
                        }
                        Some(ch) => {
                            if ch == '\n' {
                                return Err(perr(l0, c0, "unterminated string"));
                            }
                            bump(ch, &mut line, &mut col);
                            text.push(ch);
                        }
                    }
                }
                out.push(Token { tok: Tok::Ident(text), line: l0, col: c0 });
            }
            c if bare(c) => {
                let mut text = String::new();
                while let Some(&ch) = chars.peek() {
                    if bare(ch) {
                        text.push(ch);
                        chars.next();
                        bump(ch, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                out.push(Token { tok: Tok::Ident(text), line: l0, col: c0 });
            }
            other => return Err(perr(l0, c0, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

// --------------------------------------------------------------- parser

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token> {
        let t = self.next();
        if t.tok == tok {
            Ok(t)
        } else {
            Err(perr(t.line, t.col, format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize, usize)> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.line, t.col)),
            _ => Err(perr(t.line, t.col, format!("expected {what}"))),
        }
    }

    /// `a, b, c` — at least one entry.
    fn ident_list(&mut self, what: &str) -> Result<Vec<String>> {
        let mut out = vec![self.ident(what)?.0];
        while self.peek().tok == Tok::Comma {
            self.next();
            out.push(self.ident(what)?.0);
        }
        Ok(out)
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            _ => Err(perr(t.line, t.col, format!("expected `{kw}`"))),
        }
    }

    fn category(&mut self) -> Result<CategoryDecl> {
        let (name, ..) = self.ident("category name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut decl = CategoryDecl { name, objects: Vec::new(), mors: Vec::new(), comps: Vec::new() };
        // src/dst per declared morphism or identity, for composability checks
        let mut ends: BTreeMap<String, (String, String)> = BTreeMap::new();
        loop {
            let t = self.next();
            match &t.tok {
                Tok::RBrace => break,
                Tok::Ident(kw) if kw == "objects" => {
                    self.expect(Tok::Colon, "`:`")?;
                    let objs = self.ident_list("object name")?;
                    self.expect(Tok::Semi, "`;`")?;
                    for o in &objs {
                        if decl.objects.contains(o) {
                            return Err(perr(t.line, t.col, format!("duplicate object `{o}`")));
                        }
                        ends.insert(identity_name(o), (o.clone(), o.clone()));
                    }
                    decl.objects.extend(objs);
                }
                Tok::Ident(kw) if kw == "mor" => {
                    let (id, il, ic) = self.ident("morphism name")?;
                    self.expect(Tok::Colon, "`:`")?;
                    let (src, sl, sc) = self.ident("source object")?;
                    self.expect(Tok::Arrow, "`->`")?;
                    let (dst, dl, dc) = self.ident("target object")?;
                    self.expect(Tok::Semi, "`;`")?;
                    if ends.contains_key(&id) {
                        return Err(perr(il, ic, format!("duplicate morphism `{id}`")));
                    }
                    if !decl.objects.contains(&src) {
                        return Err(perr(sl, sc, format!("unknown object `{src}`")));
                    }
                    if !decl.objects.contains(&dst) {
                        return Err(perr(dl, dc, format!("unknown object `{dst}`")));
                    }
                    ends.insert(id.clone(), (src.clone(), dst.clone()));
                    decl.mors.push((id, src, dst));
                }
                Tok::Ident(kw) if kw == "compose" => {
                    let (g, gl, gc) = self.ident("morphism name")?;
                    let (f, fl, fc) = self.ident("morphism name")?;
                    self.expect(Tok::Eq, "`=`")?;
                    let (h, hl, hc) = self.ident("morphism name")?;
                    self.expect(Tok::Semi, "`;`")?;
                    let (gs, _gd) = ends
                        .get(&g)
                        .ok_or_else(|| perr(gl, gc, format!("unknown morphism `{g}`")))?
                        .clone();
                    let (_fs, fd) = ends
                        .get(&f)
                        .ok_or_else(|| perr(fl, fc, format!("unknown morphism `{f}`")))?
                        .clone();
                    if !ends.contains_key(&h) {
                        return Err(perr(hl, hc, format!("unknown morphism `{h}`")));
                    }
                    if fd != gs {
                        return Err(perr(
                            gl,
                            gc,
                            format!("`{g}` and `{f}` are not composable"),
                        ));
                    }
                    decl.comps.push((g, f, h));
                }
                _ => return Err(perr(t.line, t.col, "expected `objects`, `mor`, `compose` or `}`")),
            }
        }
        Ok(decl)
    }

    fn class(&mut self) -> Result<ClassDecl> {
        let (name, ..) = self.ident("class name")?;
        self.keyword("in")?;
        let (carrier, ..) = self.ident("category name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut members = Vec::new();
        loop {
            let t = self.next();
            match t.tok {
                Tok::RBrace => break,
                Tok::Ident(m) => {
                    self.expect(Tok::Semi, "`;`")?;
                    members.push(m);
                }
                _ => return Err(perr(t.line, t.col, "expected a morphism name or `}`")),
            }
        }
        Ok(ClassDecl { name, carrier, members })
    }

    fn functor(&mut self) -> Result<FunctorDecl> {
        let (name, ..) = self.ident("functor name")?;
        self.expect(Tok::Colon, "`:`")?;
        let (source, ..) = self.ident("source category")?;
        self.expect(Tok::Arrow, "`->`")?;
        let (target, ..) = self.ident("target category")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut decl =
            FunctorDecl { name, source, target, omap: Vec::new(), mmap: Vec::new() };
        loop {
            let t = self.next();
            match &t.tok {
                Tok::RBrace => break,
                Tok::Ident(kw) if kw == "obj" => {
                    let (a, ..) = self.ident("object name")?;
                    self.expect(Tok::Arrow, "`->`")?;
                    let (x, ..) = self.ident("object name")?;
                    self.expect(Tok::Semi, "`;`")?;
                    decl.omap.push((a, x));
                }
                Tok::Ident(kw) if kw == "mor" => {
                    let (f, ..) = self.ident("morphism name")?;
                    self.expect(Tok::Arrow, "`->`")?;
                    let (u, ..) = self.ident("morphism name")?;
                    self.expect(Tok::Semi, "`;`")?;
                    decl.mmap.push((f, u));
                }
                _ => return Err(perr(t.line, t.col, "expected `obj`, `mor` or `}`")),
            }
        }
        Ok(decl)
    }

    fn setup(&mut self) -> Result<SetupDecl> {
        let (name, line, col) = self.ident("setup name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut fields: BTreeMap<String, String> = BTreeMap::new();
        loop {
            let t = self.next();
            match &t.tok {
                Tok::RBrace => break,
                Tok::Ident(k)
                    if matches!(k.as_str(), "C" | "D" | "T" | "S" | "Sprime") =>
                {
                    self.expect(Tok::Eq, "`=`")?;
                    let (v, ..) = self.ident("name")?;
                    self.expect(Tok::Semi, "`;`")?;
                    if fields.insert(k.clone(), v).is_some() {
                        return Err(perr(t.line, t.col, format!("duplicate field `{k}`")));
                    }
                }
                _ => {
                    return Err(perr(t.line, t.col, "expected `C`, `D`, `T`, `S`, `Sprime` or `}`"))
                }
            }
        }
        for k in ["C", "D", "T", "S", "Sprime"] {
            if !fields.contains_key(k) {
                return Err(perr(line, col, format!("setup is missing `{k}`")));
            }
        }
        Ok(SetupDecl {
            name,
            c: fields["C"].clone(),
            d: fields["D"].clone(),
            t: fields["T"].clone(),
            s: fields["S"].clone(),
            sprime: fields["Sprime"].clone(),
        })
    }

    fn poset(&mut self) -> Result<PosetDecl> {
        let (name, ..) = self.ident("poset name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut decl = PosetDecl { name, elements: Vec::new(), pairs: Vec::new() };
        loop {
            let t = self.next();
            match &t.tok {
                Tok::RBrace => break,
                Tok::Ident(kw) if kw == "elements" => {
                    self.expect(Tok::Colon, "`:`")?;
                    decl.elements.extend(self.ident_list("element name")?);
                    self.expect(Tok::Semi, "`;`")?;
                }
                Tok::Ident(a) => {
                    self.expect(Tok::Lt, "`<`")?;
                    let (b, ..) = self.ident("element name")?;
                    self.expect(Tok::Semi, "`;`")?;
                    decl.pairs.push((a.clone(), b));
                }
                _ => return Err(perr(t.line, t.col, "expected `elements`, a relation or `}`")),
            }
        }
        Ok(decl)
    }

    fn kselector(&mut self) -> Result<KSelectorDecl> {
        let (name, ..) = self.ident("selector name")?;
        self.keyword("for")?;
        let (setup, ..) = self.ident("setup name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut entries = Vec::new();
        loop {
            let t = self.next();
            match t.tok {
                Tok::RBrace => break,
                Tok::Ident(d) => {
                    self.expect(Tok::Arrow, "`->`")?;
                    let js = self.ident_list("slice object name")?;
                    self.expect(Tok::Semi, "`;`")?;
                    entries.push((d, js));
                }
                _ => return Err(perr(t.line, t.col, "expected an object name or `}`")),
            }
        }
        Ok(KSelectorDecl { name, setup, entries })
    }

    fn weak(&mut self) -> Result<WeakDecl> {
        let (name, ..) = self.ident("replacement name")?;
        self.keyword("for")?;
        let (setup, ..) = self.ident("setup name")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut decl = WeakDecl {
            name,
            setup,
            objects: Vec::new(),
            arrows: Vec::new(),
            pairs: Vec::new(),
        };
        loop {
            let t = self.next();
            match &t.tok {
                Tok::RBrace => break,
                Tok::Ident(kw) if kw == "object" => {
                    let (d, ..) = self.ident("object name")?;
                    self.expect(Tok::Colon, "`:`")?;
                    let sel = self.ident_list("slice object name")?;
                    self.expect(Tok::Semi, "`;`")?;
                    decl.objects.push((d, sel));
                }
                Tok::Ident(kw) if kw == "arrow" => {
                    let (f, ..) = self.ident("morphism name")?;
                    self.expect(Tok::Colon, "`:`")?;
                    let sel = self.ident_list("slice object name")?;
                    self.expect(Tok::Semi, "`;`")?;
                    decl.arrows.push((f, sel));
                }
                Tok::Ident(kw) if kw == "pair" => {
                    let (g, ..) = self.ident("morphism name")?;
                    let (f, ..) = self.ident("morphism name")?;
                    self.expect(Tok::Colon, "`:`")?;
                    let sel = self.ident_list("slice object name")?;
                    self.expect(Tok::Semi, "`;`")?;
                    decl.pairs.push(((g, f), sel));
                }
                _ => return Err(perr(t.line, t.col, "expected `object`, `arrow`, `pair` or `}`")),
            }
        }
        Ok(decl)
    }

    fn document(&mut self) -> Result<DslDocument> {
        let mut doc = DslDocument::default();
        loop {
            let t = self.next();
            match &t.tok {
                Tok::Eof => break,
                Tok::Ident(kw) => {
                    let item = match kw.as_str() {
                        "category" => Item::Category(self.category()?),
                        "class" => Item::Class(self.class()?),
                        "functor" => Item::Functor(self.functor()?),
                        "setup" => Item::Setup(self.setup()?),
                        "poset" => Item::Poset(self.poset()?),
                        "kselector" => Item::KSelector(self.kselector()?),
                        "weak" => Item::Weak(self.weak()?),
                        other => {
                            return Err(perr(t.line, t.col, format!("unknown block `{other}`")))
                        }
                    };
                    doc.items.push(item);
                }
                _ => return Err(perr(t.line, t.col, "expected a block keyword")),
            }
        }
        Ok(doc)
    }
}

pub fn parse(text: &str) -> Result<DslDocument> {
    Parser { toks: lex(text)?, at: 0 }.document()
}

// -------------------------------------------------------------- printer

fn quoted(s: &str) -> String {
    if !s.is_empty() && s.chars().all(bare) {
        s.to_string()
    } else {
        let mut out = String::from("\"");
        for c in s.chars() {
            if c == '"' || c == '\\' {
                out.push('\\');
            }
            out.push(c);
        }
        out.push('"');
        out
    }
}

fn quoted_list(items: &[String]) -> String {
    items.iter().map(|s| quoted(s)).collect::<Vec<_>>().join(", ")
}

/// Canonical textual form; `parse(print(doc)) == doc` for every document.
pub fn print(doc: &DslDocument) -> String {
    let mut out = String::new();
    for (i, item) in doc.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match item {
            Item::Category(c) => {
                out.push_str(&format!("category {} {{\n", quoted(&c.name)));
                if !c.objects.is_empty() {
                    out.push_str(&format!("  objects: {};\n", quoted_list(&c.objects)));
                }
                for (id, s, d) in &c.mors {
                    out.push_str(&format!(
                        "  mor {}: {} -> {};\n",
                        quoted(id),
                        quoted(s),
                        quoted(d)
                    ));
                }
                for (g, f, h) in &c.comps {
                    out.push_str(&format!(
                        "  compose {} {} = {};\n",
                        quoted(g),
                        quoted(f),
                        quoted(h)
                    ));
                }
                out.push_str("}\n");
            }
            Item::Class(s) => {
                out.push_str(&format!(
                    "class {} in {} {{\n",
                    quoted(&s.name),
                    quoted(&s.carrier)
                ));
                for m in &s.members {
                    out.push_str(&format!("  {};\n", quoted(m)));
                }
                out.push_str("}\n");
            }
            Item::Functor(f) => {
                out.push_str(&format!(
                    "functor {}: {} -> {} {{\n",
                    quoted(&f.name),
                    quoted(&f.source),
                    quoted(&f.target)
                ));
                for (a, x) in &f.omap {
                    out.push_str(&format!("  obj {} -> {};\n", quoted(a), quoted(x)));
                }
                for (m, u) in &f.mmap {
                    out.push_str(&format!("  mor {} -> {};\n", quoted(m), quoted(u)));
                }
                out.push_str("}\n");
            }
            Item::Setup(s) => {
                out.push_str(&format!("setup {} {{\n", quoted(&s.name)));
                out.push_str(&format!("  C = {};\n", quoted(&s.c)));
                out.push_str(&format!("  D = {};\n", quoted(&s.d)));
                out.push_str(&format!("  T = {};\n", quoted(&s.t)));
                out.push_str(&format!("  S = {};\n", quoted(&s.s)));
                out.push_str(&format!("  Sprime = {};\n", quoted(&s.sprime)));
                out.push_str("}\n");
            }
            Item::Poset(p) => {
                out.push_str(&format!("poset {} {{\n", quoted(&p.name)));
                if !p.elements.is_empty() {
                    out.push_str(&format!("  elements: {};\n", quoted_list(&p.elements)));
                }
                for (a, b) in &p.pairs {
                    out.push_str(&format!("  {} < {};\n", quoted(a), quoted(b)));
                }
                out.push_str("}\n");
            }
            Item::KSelector(k) => {
                out.push_str(&format!(
                    "kselector {} for {} {{\n",
                    quoted(&k.name),
                    quoted(&k.setup)
                ));
                for (d, js) in &k.entries {
                    out.push_str(&format!("  {} -> {};\n", quoted(d), quoted_list(js)));
                }
                out.push_str("}\n");
            }
            Item::Weak(w) => {
                out.push_str(&format!(
                    "weak {} for {} {{\n",
                    quoted(&w.name),
                    quoted(&w.setup)
                ));
                for (d, sel) in &w.objects {
                    out.push_str(&format!("  object {}: {};\n", quoted(d), quoted_list(sel)));
                }
                for (f, sel) in &w.arrows {
                    out.push_str(&format!("  arrow {}: {};\n", quoted(f), quoted_list(sel)));
                }
                for ((g, f), sel) in &w.pairs {
                    out.push_str(&format!(
                        "  pair {} {}: {};\n",
                        quoted(g),
                        quoted(f),
                        quoted_list(sel)
                    ));
                }
                out.push_str("}\n");
            }
        }
    }
    out
}

pub fn to_json(doc: &DslDocument) -> String {
    serde_json::to_string_pretty(doc).expect("document serialises")
}

// ------------------------------------------------------------- resolver

/// Everything a document declares, materialised and cross-checked.
#[derive(Default)]
pub struct Resolved {
    pub categories: BTreeMap<String, Arc<FinCategory>>,
    pub classes: BTreeMap<String, MorphClass>,
    pub functors: BTreeMap<String, FunctorData>,
    pub setups: BTreeMap<String, LocalisationSetup>,
    pub posets: BTreeMap<String, FinPoset>,
    pub kselectors: BTreeMap<String, (String, KSelector)>,
    pub weaks: BTreeMap<String, (String, WeakReplacement)>,
}

const CLOSURE_CAP: usize = 10_000;

fn unique<T>(map: &BTreeMap<String, T>, name: &str, kind: &str) -> Result<()> {
    if map.contains_key(name) {
        return Err(Error::Invalid(format!("duplicate {kind} `{name}`")));
    }
    Ok(())
}

/// Materialise every declaration. Categories with incomplete composition
/// tables are closed by word saturation; all referenced names must have
/// been declared earlier in the document.
pub fn resolve(doc: &DslDocument) -> Result<Resolved> {
    let mut r = Resolved::default();
    for item in &doc.items {
        match item {
            Item::Category(decl) => {
                unique(&r.categories, &decl.name, "category")?;
                let direct = FinCategory::from_parts(
                    decl.objects.clone(),
                    decl.mors.clone(),
                    decl.comps.clone(),
                )?;
                let cat = if crate::category::validate_category(&direct).pass() {
                    direct
                } else {
                    let sat = crate::sat::close_category(
                        decl.objects.clone(),
                        decl.mors.clone(),
                        decl.comps.clone(),
                        CLOSURE_CAP,
                    )?;
                    if !crate::category::validate_category(&sat.category).pass() {
                        return Err(Error::Invalid(format!(
                            "category `{}` does not close into a valid composition table",
                            decl.name
                        )));
                    }
                    sat.category
                };
                r.categories.insert(decl.name.clone(), Arc::new(cat));
            }
            Item::Class(decl) => {
                unique(&r.classes, &decl.name, "class")?;
                let carrier = r
                    .categories
                    .get(&decl.carrier)
                    .ok_or_else(|| Error::UnresolvedRef {
                        kind: "category",
                        name: decl.carrier.clone(),
                    })?
                    .clone();
                let class = MorphClass::from_ids(carrier, &decl.members, true)?;
                if !crate::category::validate_class(&class).pass() {
                    return Err(Error::Invalid(format!(
                        "class `{}` is not composition-closed",
                        decl.name
                    )));
                }
                r.classes.insert(decl.name.clone(), class);
            }
            Item::Functor(decl) => {
                unique(&r.functors, &decl.name, "functor")?;
                let source = r
                    .categories
                    .get(&decl.source)
                    .ok_or_else(|| Error::UnresolvedRef {
                        kind: "category",
                        name: decl.source.clone(),
                    })?
                    .clone();
                let target = r
                    .categories
                    .get(&decl.target)
                    .ok_or_else(|| Error::UnresolvedRef {
                        kind: "category",
                        name: decl.target.clone(),
                    })?
                    .clone();
                let omap: BTreeMap<String, String> = decl.omap.iter().cloned().collect();
                let mmap: BTreeMap<String, String> = decl.mmap.iter().cloned().collect();
                let f = FunctorData::from_maps(source, target, &omap, &mmap)?;
                let report = crate::category::validate_functor(&f, None);
                if !report.report.pass() {
                    return Err(Error::Invalid(format!(
                        "functor `{}` does not respect composition",
                        decl.name
                    )));
                }
                r.functors.insert(decl.name.clone(), f);
            }
            Item::Setup(decl) => {
                unique(&r.setups, &decl.name, "setup")?;
                let t = r
                    .functors
                    .get(&decl.t)
                    .ok_or_else(|| Error::UnresolvedRef { kind: "functor", name: decl.t.clone() })?
                    .clone();
                for (name, expect) in
                    [(&decl.c, &t.source), (&decl.d, &t.target)]
                {
                    let cat = r.categories.get(name).ok_or_else(|| Error::UnresolvedRef {
                        kind: "category",
                        name: name.clone(),
                    })?;
                    if cat.as_ref() != expect.as_ref() {
                        return Err(Error::Invalid(format!(
                            "setup `{}`: functor `{}` does not run between `{}` and `{}`",
                            decl.name, decl.t, decl.c, decl.d
                        )));
                    }
                }
                let s = r
                    .classes
                    .get(&decl.s)
                    .ok_or_else(|| Error::UnresolvedRef { kind: "class", name: decl.s.clone() })?
                    .clone();
                let sprime = r
                    .classes
                    .get(&decl.sprime)
                    .ok_or_else(|| Error::UnresolvedRef {
                        kind: "class",
                        name: decl.sprime.clone(),
                    })?
                    .clone();
                let setup = LocalisationSetup::new(t, s, sprime)?;
                if !setup.validate().pass() {
                    return Err(Error::Invalid(format!(
                        "setup `{}` violates the localisation invariants",
                        decl.name
                    )));
                }
                r.setups.insert(decl.name.clone(), setup);
            }
            Item::Poset(decl) => {
                unique(&r.posets, &decl.name, "poset")?;
                let mut seen = BTreeSet::new();
                for e in &decl.elements {
                    if !seen.insert(e.clone()) {
                        return Err(Error::Invalid(format!("duplicate element `{e}`")));
                    }
                }
                for (a, b) in &decl.pairs {
                    for e in [a, b] {
                        if !seen.contains(e) {
                            return Err(Error::UnresolvedRef {
                                kind: "element",
                                name: e.clone(),
                            });
                        }
                    }
                }
                let p = FinPoset::from_pairs(decl.elements.clone(), &decl.pairs)?;
                r.posets.insert(decl.name.clone(), p);
            }
            Item::KSelector(decl) => {
                unique(&r.kselectors, &decl.name, "kselector")?;
                if !r.setups.contains_key(&decl.setup) {
                    return Err(Error::UnresolvedRef { kind: "setup", name: decl.setup.clone() });
                }
                let mut selected = BTreeMap::new();
                for (d, js) in &decl.entries {
                    if selected.insert(d.clone(), js.clone()).is_some() {
                        return Err(Error::Invalid(format!("duplicate selector entry `{d}`")));
                    }
                }
                r.kselectors
                    .insert(decl.name.clone(), (decl.setup.clone(), KSelector { selected }));
            }
            Item::Weak(decl) => {
                unique(&r.weaks, &decl.name, "replacement")?;
                if !r.setups.contains_key(&decl.setup) {
                    return Err(Error::UnresolvedRef { kind: "setup", name: decl.setup.clone() });
                }
                let mut w = WeakReplacement {
                    objects: BTreeMap::new(),
                    arrows: BTreeMap::new(),
                    pairs: BTreeMap::new(),
                };
                for (d, sel) in &decl.objects {
                    if w.objects.insert(d.clone(), sel.clone()).is_some() {
                        return Err(Error::Invalid(format!("duplicate object entry `{d}`")));
                    }
                }
                for (f, sel) in &decl.arrows {
                    if w.arrows.insert(f.clone(), sel.clone()).is_some() {
                        return Err(Error::Invalid(format!("duplicate arrow entry `{f}`")));
                    }
                }
                for ((g, f), sel) in &decl.pairs {
                    let key = format!("({g},{f})");
                    if w.pairs.insert(key.clone(), sel.clone()).is_some() {
                        return Err(Error::Invalid(format!("duplicate pair entry `{key}`")));
                    }
                }
                r.weaks.insert(decl.name.clone(), (decl.setup.clone(), w));
            }
        }
    }
    Ok(r)
}

/// Express a live setup as a five-block document (plus nothing else), so
/// fuzz counterexamples can be kept as fixtures.
pub fn document_of_setup(name: &str, setup: &LocalisationSetup) -> DslDocument {
    let sketch = crate::fuzz::SetupSketch::from_setup(setup);
    let items = vec![
        Item::Category(CategoryDecl {
            name: format!("{name}_C"),
            objects: sketch.c_objects.clone(),
            mors: sketch.c_mors.clone(),
            comps: sketch.c_comps.clone(),
        }),
        Item::Category(CategoryDecl {
            name: format!("{name}_D"),
            objects: sketch.d_objects.clone(),
            mors: sketch.d_mors.clone(),
            comps: sketch.d_comps.clone(),
        }),
        Item::Functor(FunctorDecl {
            name: format!("{name}_T"),
            source: format!("{name}_C"),
            target: format!("{name}_D"),
            omap: sketch.t_omap.iter().map(|(a, b)| (a.clone(), b.clone())).collect(),
            mmap: sketch.t_mmap.iter().map(|(a, b)| (a.clone(), b.clone())).collect(),
        }),
        Item::Class(ClassDecl {
            name: format!("{name}_S"),
            carrier: format!("{name}_C"),
            members: sketch.s.clone(),
        }),
        Item::Class(ClassDecl {
            name: format!("{name}_Sp"),
            carrier: format!("{name}_D"),
            members: sketch.sprime.clone(),
        }),
        Item::Setup(SetupDecl {
            name: name.to_string(),
            c: format!("{name}_C"),
            d: format!("{name}_D"),
            t: format!("{name}_T"),
            s: format!("{name}_S"),
            sprime: format!("{name}_Sp"),
        }),
    ];
    DslDocument { items }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const RIOU_FIX: &str = r#"
# inclusion of the terminal object into the arrow, everything inverted
category C {
  objects: 1;
}
category D {
  objects: 0, 1;
  mor f: 0 -> 1;
}
functor T: C -> D {
  obj 1 -> 1;
}
class S in C {
}
class Sp in D {
  f;
}
setup L {
  C = C;
  D = D;
  T = T;
  S = S;
  Sprime = Sp;
}
"#;

    #[test]
    fn fixture_source_matches_the_fixture() {
        let doc = parse(RIOU_FIX).unwrap();
        let resolved = resolve(&doc).unwrap();
        let parsed = &resolved.setups["L"];
        let fix = fixtures::riou_fix();
        assert_eq!(parsed.c.as_ref(), fix.c.as_ref());
        assert_eq!(parsed.d.as_ref(), fix.d.as_ref());
        assert_eq!(parsed.t.omap, fix.t.omap);
        assert_eq!(parsed.t.mmap, fix.t.mmap);
        assert_eq!(parsed.s.member_indices(), fix.s.member_indices());
        assert_eq!(parsed.sprime.member_indices(), fix.sprime.member_indices());
    }

    #[test]
    fn empty_file_is_an_empty_document() {
        assert_eq!(parse("").unwrap(), DslDocument::default());
        assert_eq!(parse("# only a comment\n").unwrap(), DslDocument::default());
    }

    #[test]
    fn non_composable_compose_is_rejected_in_place() {
        let text = "category X {\n  objects: a, b;\n  mor f: a -> b;\n  compose f f = f;\n}\n";
        match parse(text) {
            Err(Error::Parse { line, col, msg }) => {
                assert_eq!((line, col), (4, 11));
                assert!(msg.contains("not composable"), "{msg}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let doc = parse(RIOU_FIX).unwrap();
        let printed = print(&doc);
        assert_eq!(parse(&printed).unwrap(), doc);
        // canonical form is a fixed point of print ∘ parse
        assert_eq!(print(&parse(&printed).unwrap()), printed);
    }

    #[test]
    fn quoted_identifiers_survive() {
        let doc = DslDocument {
            items: vec![Item::Category(CategoryDecl {
                name: "odd name".into(),
                objects: vec!["(c,s)".into(), "x\"y\\z".into()],
                mors: vec![("a->b".into(), "(c,s)".into(), "x\"y\\z".into())],
                comps: Vec::new(),
            })],
        };
        let printed = print(&doc);
        assert_eq!(parse(&printed).unwrap(), doc);
    }

    #[test]
    fn setup_documents_replay() {
        let cfg = crate::fuzz::GenConfig::default();
        let mut rng = crate::fuzz::Rng::new(11);
        for i in 0..20 {
            let setup = crate::fuzz::gen_setup(&cfg, &mut rng);
            let doc = document_of_setup(&format!("case{i}"), &setup);
            let text = print(&doc);
            let back = resolve(&parse(&text).unwrap()).unwrap();
            let replayed = &back.setups[&format!("case{i}")];
            assert_eq!(replayed.c.as_ref(), setup.c.as_ref());
            assert_eq!(replayed.d.as_ref(), setup.d.as_ref());
            assert_eq!(replayed.t.mmap, setup.t.mmap);
            assert_eq!(replayed.s.member_indices(), setup.s.member_indices());
            assert_eq!(replayed.sprime.member_indices(), setup.sprime.member_indices());
        }
    }

    #[test]
    fn incomplete_tables_close_by_saturation() {
        // two composable arrows with no declared composite: the loader
        // synthesises g*f
        let text = "category Y {\n  objects: a, b, c;\n  mor f: a -> b;\n  mor g: b -> c;\n}\n";
        let resolved = resolve(&parse(text).unwrap()).unwrap();
        let y = &resolved.categories["Y"];
        assert!(crate::category::validate_category(y).pass());
        assert_eq!(y.morphism_count(), 6);
        assert!(y.morphism_idx("g*f").is_some());
    }

    #[test]
    fn selectors_and_replacements_resolve() {
        let mut text = RIOU_FIX.to_string();
        text.push_str(
            "kselector K for L {\n  0 -> \"(1,f)\";\n}\nweak W for L {\n  object 0: \"(1,f)\";\n  arrow f: \"(1,f)\";\n}\n",
        );
        let resolved = resolve(&parse(&text).unwrap()).unwrap();
        let (owner, k) = &resolved.kselectors["K"];
        assert_eq!(owner, "L");
        assert_eq!(k.selected["0"], vec!["(1,f)".to_string()]);
        let (_, w) = &resolved.weaks["W"];
        assert_eq!(w.objects.len(), 1);
        assert_eq!(w.arrows.len(), 1);
    }
}
