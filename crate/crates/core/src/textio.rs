//! Text formats: polynomial expressions, `.fol` system documents and report
//! emission.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::field::{AffineVectorField, FieldError, ProjectiveOneForm};
use crate::polyring::{Arity, GaussianRational, MultiPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: variable `{name}` is not allowed in {arity:?} polynomials")]
    WrongVariable { line: usize, col: usize, name: String, arity: Arity },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("section [{section}] is missing key `{key}`")]
    MissingKey { section: String, key: String },
    #[error("line {line}: {msg}")]
    Document { line: usize, msg: String },
    #[error("section [{section}]: {source}")]
    Field {
        section: String,
        #[source]
        source: FieldError,
    },
    #[error("unknown name `{0}`")]
    UnknownName(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Int(usize, usize),
    Ident(usize, usize),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    arity: Arity,
    line_base: usize,
    col_base: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, arity: Arity, line_base: usize, col_base: usize) -> Result<Self, TextError> {
        let mut p = Self { src, toks: Vec::new(), pos: 0, arity, line_base, col_base };
        p.lex()?;
        Ok(p)
    }

    fn loc(&self, offset: usize) -> (usize, usize) {
        let before = &self.src[..offset.min(self.src.len())];
        let line = before.matches('\n').count();
        let col = match before.rfind('\n') {
            Some(nl) => before[nl + 1..].chars().count() + 1,
            None => before.chars().count() + 1 + self.col_base,
        };
        (self.line_base + line, col)
    }

    fn err(&self, offset: usize, msg: impl Into<String>) -> TextError {
        let (line, col) = self.loc(offset);
        TextError::Syntax { line, col, msg: msg.into() }
    }

    fn lex(&mut self) -> Result<(), TextError> {
        let bytes = self.src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let tok = match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '^' => Tok::Caret,
                '/' => Tok::Slash,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                d if d.is_ascii_digit() => {
                    let start = i;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                    if i < bytes.len() && (bytes[i] == b'.' || (bytes[i] as char).is_ascii_alphabetic()) {
                        return Err(self.err(i, "expected operator after number (use explicit `*`, no decimals)"));
                    }
                    self.toks.push((Tok::Int(start, i), start));
                    continue;
                }
                a if a.is_ascii_alphabetic() || a == '_' => {
                    let start = i;
                    while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    self.toks.push((Tok::Ident(start, i), start));
                    continue;
                }
                other => return Err(self.err(i, format!("unexpected character `{}`", other))),
            };
            self.toks.push((tok, i));
            i += 1;
        }
        self.toks.push((Tok::End, self.src.len()));
        Ok(())
    }

    fn peek(&self) -> Tok {
        self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0;
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<MultiPoly, TextError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, TextError> {
        let mut acc = self.unary()?;
        while self.peek() == Tok::Star {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        match self.peek() {
            Tok::Int(..) | Tok::Ident(..) | Tok::LParen => {
                Err(self.err(self.offset(), "implicit multiplication is not allowed; write `*`"))
            }
            _ => Ok(acc),
        }
    }

    fn unary(&mut self) -> Result<MultiPoly, TextError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, TextError> {
        let base = self.atom()?;
        if self.peek() == Tok::Caret {
            self.bump();
            let off = self.offset();
            match self.bump() {
                Tok::Int(s, e) => {
                    let n: u32 = self.src[s..e]
                        .parse()
                        .map_err(|_| self.err(off, "exponent too large"))?;
                    Ok(base.pow(n))
                }
                _ => Err(self.err(off, "exponent must be a nonnegative integer literal")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, TextError> {
        let off = self.offset();
        match self.bump() {
            Tok::Int(s, e) => {
                let num: BigInt = self.src[s..e].parse().expect("digits");
                if self.peek() == Tok::Slash {
                    self.bump();
                    let doff = self.offset();
                    match self.bump() {
                        Tok::Int(ds, de) => {
                            let den: BigInt = self.src[ds..de].parse().expect("digits");
                            if den.is_zero() {
                                return Err(self.err(doff, "zero denominator"));
                            }
                            let r = BigRational::new(num, den);
                            Ok(MultiPoly::constant(self.arity, GaussianRational::from_rational(r)))
                        }
                        _ => Err(self.err(doff, "expected integer denominator after `/`")),
                    }
                } else {
                    let r = BigRational::from_integer(num);
                    Ok(MultiPoly::constant(self.arity, GaussianRational::from_rational(r)))
                }
            }
            Tok::Ident(s, e) => {
                let name = &self.src[s..e];
                if name == "i" {
                    return Ok(MultiPoly::constant(self.arity, GaussianRational::i()));
                }
                if let Some(idx) = self.arity.var_names().iter().position(|v| *v == name) {
                    return Ok(MultiPoly::var(self.arity, idx));
                }
                let (line, col) = self.loc(off);
                if ["x", "y", "X", "Y", "Z"].contains(&name) {
                    Err(TextError::WrongVariable { line, col, name: name.to_string(), arity: self.arity })
                } else {
                    Err(TextError::Syntax { line, col, msg: format!("unknown identifier `{}`", name) })
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                let coff = self.offset();
                match self.bump() {
                    Tok::RParen => Ok(inner),
                    _ => Err(self.err(coff, "expected `)`")),
                }
            }
            Tok::End => Err(self.err(off, "unexpected end of input")),
            _ => Err(self.err(off, "expected a number, variable or `(`")),
        }
    }
}

/// Parses a polynomial expression in `x y` (affine) or `X Y Z` (projective).
pub fn parse_poly(text: &str, arity: Arity) -> Result<MultiPoly, TextError> {
    parse_poly_at(text, arity, 1, 0)
}

fn parse_poly_at(text: &str, arity: Arity, line: usize, col: usize) -> Result<MultiPoly, TextError> {
    let mut p = Parser::new(text, arity, line, col)?;
    let out = p.expr()?;
    if p.peek() != Tok::End {
        return Err(p.err(p.offset(), "unexpected trailing input"));
    }
    Ok(out)
}

/// Canonical text of `p` (graded-lex descending).
pub fn print_poly(p: &MultiPoly) -> String {
    p.to_string()
}

pub fn parse_constant(text: &str) -> Result<GaussianRational, TextError> {
    let p = parse_poly(text, Arity::Affine)?;
    if !p.is_constant() {
        return Err(TextError::Syntax { line: 1, col: 1, msg: "expected a constant".into() });
    }
    Ok(p.constant_term())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveEntry {
    pub poly: MultiPoly,
    /// Names of curves whose product is this curve, when supplied.
    pub components: Vec<String>,
}

/// Contents of a `.fol` document.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SystemDocument {
    pub fields: Vec<(String, AffineVectorField)>,
    pub forms: Vec<(String, ProjectiveOneForm)>,
    pub curves: Vec<(String, CurveEntry)>,
    pub params: Vec<(String, GaussianRational)>,
}

impl SystemDocument {
    pub fn is_empty(&self) -> bool {
        self.fields.is_empty() && self.forms.is_empty() && self.curves.is_empty() && self.params.is_empty()
    }

    pub fn field(&self, name: &str) -> Option<&AffineVectorField> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn form(&self, name: &str) -> Option<&ProjectiveOneForm> {
        self.forms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn curve(&self, name: &str) -> Option<&CurveEntry> {
        self.curves.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    pub fn param(&self, name: &str) -> Option<&GaussianRational> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    fn names(&self) -> impl Iterator<Item = &str> {
        self.fields
            .iter()
            .map(|(n, _)| n.as_str())
            .chain(self.forms.iter().map(|(n, _)| n.as_str()))
            .chain(self.curves.iter().map(|(n, _)| n.as_str()))
            .chain(self.params.iter().map(|(n, _)| n.as_str()))
    }

    fn check_new_name(&self, name: &str) -> Result<(), TextError> {
        if self.names().any(|n| n == name) {
            Err(TextError::DuplicateName(name.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn add_field(&mut self, name: &str, f: AffineVectorField) -> Result<(), TextError> {
        self.check_new_name(name)?;
        self.fields.push((name.to_string(), f));
        Ok(())
    }

    pub fn add_form(&mut self, name: &str, f: ProjectiveOneForm) -> Result<(), TextError> {
        self.check_new_name(name)?;
        self.forms.push((name.to_string(), f));
        Ok(())
    }

    pub fn add_curve(&mut self, name: &str, poly: MultiPoly, components: Vec<String>) -> Result<(), TextError> {
        self.check_new_name(name)?;
        self.curves.push((name.to_string(), CurveEntry { poly, components }));
        Ok(())
    }

    pub fn add_param(&mut self, name: &str, v: GaussianRational) -> Result<(), TextError> {
        self.check_new_name(name)?;
        self.params.push((name.to_string(), v));
        Ok(())
    }

    /// Checks that component lists resolve and multiply to the composite
    /// curve up to a nonzero constant.
    pub fn validate_components(&self) -> Result<(), TextError> {
        for (name, entry) in &self.curves {
            if entry.components.is_empty() {
                continue;
            }
            let mut prod = MultiPoly::one(entry.poly.arity());
            for c in &entry.components {
                let comp = self.curve(c).ok_or_else(|| TextError::UnknownName(c.clone()))?;
                prod = prod.checked_mul(&comp.poly).map_err(|e| TextError::Document {
                    line: 0,
                    msg: format!("curve `{}`: {}", name, e),
                })?;
            }
            if prod.monic() != entry.poly.monic() {
                return Err(TextError::Document {
                    line: 0,
                    msg: format!("curve `{}`: product of components does not match", name),
                });
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct Section {
    kind: String,
    name: String,
    line: usize,
    keys: Vec<(String, String, usize, usize)>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&(String, String, usize, usize)> {
        self.keys.iter().find(|(k, ..)| k == key)
    }

    fn label(&self) -> String {
        format!("{} {}", self.kind, self.name)
    }

    fn poly(&self, key: &str, arity: Arity) -> Result<Option<MultiPoly>, TextError> {
        match self.get(key) {
            None => Ok(None),
            Some((_, v, line, col)) => parse_poly_at(v, arity, *line, *col).map(Some),
        }
    }

    fn required(&self, key: &str, arity: Arity) -> Result<MultiPoly, TextError> {
        self.poly(key, arity)?.ok_or_else(|| TextError::MissingKey { section: self.label(), key: key.into() })
    }
}

/// Parses a `.fol` document: `[field <name>]` (keys `p`, `q`, optional `r`),
/// `[form <name>]` (keys `P`, `Q`, `R`), `[curve <name>]` (key `f` or
/// homogeneous `F`, optional `components`), `[param <name>]` (key `value`).
/// `#` starts a comment.
pub fn parse_system(text: &str) -> Result<SystemDocument, TextError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let content = match raw.find('#') {
            Some(h) => &raw[..h],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(inner) = trimmed.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or(TextError::Document { line: line_no, msg: "unterminated section header".into() })?;
            let mut parts = inner.split_whitespace();
            let kind = parts.next().unwrap_or("").to_string();
            let name = parts.next().unwrap_or("").to_string();
            if !["field", "form", "curve", "param"].contains(&kind.as_str()) {
                return Err(TextError::Document { line: line_no, msg: format!("unknown section kind `{}`", kind) });
            }
            if name.is_empty() || parts.next().is_some() {
                return Err(TextError::Document { line: line_no, msg: "section header needs exactly one name".into() });
            }
            sections.push(Section { kind, name, line: line_no, keys: Vec::new() });
            continue;
        }
        let eq = content
            .find('=')
            .ok_or(TextError::Document { line: line_no, msg: "expected `key = value`".into() })?;
        let key = content[..eq].trim().to_string();
        let value = &content[eq + 1..];
        let col = content[..eq + 1].chars().count();
        let section = sections
            .last_mut()
            .ok_or(TextError::Document { line: line_no, msg: "key outside of a section".into() })?;
        if section.get(&key).is_some() {
            return Err(TextError::Document { line: line_no, msg: format!("duplicate key `{}`", key) });
        }
        section.keys.push((key, value.to_string(), line_no, col));
    }

    let mut doc = SystemDocument::default();
    for s in &sections {
        let allowed: &[&str] = match s.kind.as_str() {
            "field" => &["p", "q", "r"],
            "form" => &["P", "Q", "R"],
            "curve" => &["f", "F", "components"],
            _ => &["value"],
        };
        if let Some((k, _, line, _)) = s.keys.iter().find(|(k, ..)| !allowed.contains(&k.as_str())) {
            return Err(TextError::Document { line: *line, msg: format!("unknown key `{}` in [{}]", k, s.label()) });
        }
        match s.kind.as_str() {
            "field" => {
                let p = s.required("p", Arity::Affine)?;
                let q = s.required("q", Arity::Affine)?;
                let r = s.poly("r", Arity::Affine)?.unwrap_or_else(|| MultiPoly::zero(Arity::Affine));
                let f = AffineVectorField::new(p, q, r)
                    .map_err(|e| TextError::Field { section: s.label(), source: e })?;
                doc.add_field(&s.name, f)?;
            }
            "form" => {
                let p = s.required("P", Arity::Projective)?;
                let q = s.required("Q", Arity::Projective)?;
                let r = s.required("R", Arity::Projective)?;
                let f = ProjectiveOneForm::new(p, q, r)
                    .map_err(|e| TextError::Field { section: s.label(), source: e })?;
                doc.add_form(&s.name, f)?;
            }
            "curve" => {
                let poly = match (s.poly("f", Arity::Affine)?, s.poly("F", Arity::Projective)?) {
                    (Some(f), None) => f,
                    (None, Some(f)) => f,
                    (Some(_), Some(_)) => {
                        return Err(TextError::Document { line: s.line, msg: "give either `f` or `F`, not both".into() })
                    }
                    (None, None) => return Err(TextError::MissingKey { section: s.label(), key: "f".into() }),
                };
                let components = s
                    .get("components")
                    .map(|(_, v, ..)| {
                        v.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect()
                    })
                    .unwrap_or_default();
                doc.add_curve(&s.name, poly, components)?;
            }
            _ => {
                let (_, v, line, col) = s
                    .get("value")
                    .ok_or_else(|| TextError::MissingKey { section: s.label(), key: "value".into() })?;
                let p = parse_poly_at(v, Arity::Affine, *line, *col)?;
                if !p.is_constant() {
                    return Err(TextError::Document { line: *line, msg: "parameter must be a constant".into() });
                }
                doc.add_param(&s.name, p.constant_term())?;
            }
        }
    }
    doc.validate_components()?;
    Ok(doc)
}

/// Canonical `.fol` text for a document.
pub fn print_system(doc: &SystemDocument) -> String {
    let mut out = String::new();
    for (name, f) in &doc.fields {
        let _ = writeln!(out, "[field {}]", name);
        let _ = writeln!(out, "p = {}", f.p());
        let _ = writeln!(out, "q = {}", f.q());
        if !f.r().is_zero() {
            let _ = writeln!(out, "r = {}", f.r());
        }
        out.push('\n');
    }
    for (name, f) in &doc.forms {
        let _ = writeln!(out, "[form {}]", name);
        let _ = writeln!(out, "P = {}", f.p());
        let _ = writeln!(out, "Q = {}", f.q());
        let _ = writeln!(out, "R = {}", f.r());
        out.push('\n');
    }
    for (name, c) in &doc.curves {
        let _ = writeln!(out, "[curve {}]", name);
        let key = if c.poly.arity() == Arity::Affine { "f" } else { "F" };
        let _ = writeln!(out, "{} = {}", key, c.poly);
        if !c.components.is_empty() {
            let _ = writeln!(out, "components = {}", c.components.join(", "));
        }
        out.push('\n');
    }
    for (name, v) in &doc.params {
        let _ = writeln!(out, "[param {}]", name);
        let _ = writeln!(out, "value = {}", v);
        out.push('\n');
    }
    out
}

/// A floating-point quantity with its stated precision, serialized as a
/// fixed-width decimal string so reports are byte-stable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub digits: usize,
}

impl Approx {
    pub fn new(value: f64) -> Self {
        Self { value, digits: 10 }
    }

    pub fn render(&self) -> String {
        format!("{:.*e}", self.digits, self.value)
    }
}

impl Serialize for Approx {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Approx", 2)?;
        st.serialize_field("approx", &self.render())?;
        st.serialize_field("significant_digits", &(self.digits + 1))?;
        st.end()
    }
}

/// Anything that can be emitted both as text and as stable JSON.
pub trait Report: Serialize {
    fn to_text(&self) -> String;

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_circle_and_projective_curve() {
        let c = parse_poly("x^2 + y^2 - 1", Arity::Affine).unwrap();
        assert_eq!(c.to_string(), "x^2 + y^2 - 1");
        let f = parse_poly("X*Y*(Y - X - Z)", Arity::Projective).unwrap();
        assert_eq!(f.to_string(), "-X^2*Y + X*Y^2 - X*Y*Z");
    }

    #[test]
    fn gaussian_coefficients() {
        let p = parse_poly("(1/2 + 3*i)*x", Arity::Affine).unwrap();
        let (_, c) = p.terms().next().unwrap();
        assert_eq!(*c, GaussianRational::from_parts((1, 2), (3, 1)));
    }

    #[test]
    fn caret_binds_tighter_than_minus() {
        let p = parse_poly("-x^2", Arity::Affine).unwrap();
        assert_eq!(p.to_string(), "-x^2");
        let q = parse_poly("(-x)^2", Arity::Affine).unwrap();
        assert_eq!(q.to_string(), "x^2");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_poly("x^2 +\n 2x", Arity::Affine) {
            Err(TextError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{:?}", other),
        }
        assert!(matches!(parse_poly("x y", Arity::Affine), Err(TextError::Syntax { .. })));
        assert!(matches!(parse_poly("x^y", Arity::Affine), Err(TextError::Syntax { .. })));
        assert!(matches!(parse_poly("(x + 1", Arity::Affine), Err(TextError::Syntax { .. })));
        assert!(matches!(parse_poly("1.5*x", Arity::Affine), Err(TextError::Syntax { .. })));
        match parse_poly("X + y", Arity::Affine) {
            Err(TextError::WrongVariable { name, col, .. }) => {
                assert_eq!(name, "X");
                assert_eq!(col, 1);
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn system_document_roundtrip() {
        let text = "# demo\n[field eee]\np = x^2+y^2-1 - (x-2)*2*y\nq = x^2+y^2-1 + (x-2)*2*x\n\n[curve g]\nf = x^2 + y^2 - 1\n\n[param a]\nvalue = 1/2\n";
        let doc = parse_system(text).unwrap();
        assert_eq!(doc.fields.len(), 1);
        assert_eq!(doc.field("eee").unwrap().degree(), 2);
        assert_eq!(doc.param("a"), Some(&GaussianRational::from_ratio(1, 2)));
        let again = parse_system(&print_system(&doc)).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn system_document_errors() {
        match parse_system("[field f]\np = x\n") {
            Err(TextError::MissingKey { section, key }) => {
                assert_eq!(section, "field f");
                assert_eq!(key, "q");
            }
            other => panic!("{:?}", other),
        }
        assert!(parse_system("").unwrap().is_empty());
        assert!(matches!(
            parse_system("[curve a]\nf = x\n[curve a]\nf = y\n"),
            Err(TextError::DuplicateName(_))
        ));
        assert!(matches!(parse_system("[curve a]\nf = x +\n"), Err(TextError::Syntax { line: 2, .. })));
        assert!(parse_system("[curve a]\r\nf = x\r\n").is_ok());
    }

    #[test]
    fn components_must_multiply_out() {
        let ok = "[curve l1]\nf = x\n[curve l2]\nf = y\n[curve both]\nf = x*y\ncomponents = l1, l2\n";
        assert!(parse_system(ok).is_ok());
        let bad = "[curve l1]\nf = x\n[curve l2]\nf = y\n[curve both]\nf = x*y + 1\ncomponents = l1, l2\n";
        assert!(parse_system(bad).is_err());
    }
}
