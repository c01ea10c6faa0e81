//! Matrix expression language.
//!
//! ```text
//! expr := prod ('+' prod)*
//! prod := term ('*' term)*
//! term := name '(' args ')' | name | '(' expr ')'
//! ```
//!
//! `+` and `*` are free additive and multiplicative convolution. Function
//! names ignore case and underscores, so `free_add` and `freeadd` agree.
//! Scalars are integers, fractions `p/q` or decimals, all kept exact; atoms
//! are written `weight@location`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::bipoly::Rational;
use crate::encodings::{self, EncodedDistribution};
use crate::error::{Error, Result};
use crate::oplaws::{self, AtomicSpec, MobiusParams};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Identity,
    Atomic(AtomicSpec),
    Wigner,
    Wishart(Rational),
    Mobius(Box<Expr>, MobiusParams),
    Inv(Box<Expr>),
    Scale(Box<Expr>, Rational),
    Shift(Box<Expr>, Rational),
    Square(Box<Expr>),
    BlockDiag(Box<Expr>, Box<Expr>, Rational),
    Corner(Box<Expr>, Rational, Rational),
    AddAtomicWishart(Box<Expr>, Rational, AtomicSpec),
    MulWishart(Box<Expr>, Rational),
    InfoPlusNoise(Box<Expr>, Rational, Rational),
    FreeAdd(Box<Expr>, Box<Expr>),
    FreeMul(Box<Expr>, Box<Expr>),
    Compress(Box<Expr>, Rational),
    WishartCov(Box<Expr>, Box<Expr>, Rational),
    TransposeSwap(Box<Expr>, Rational),
}

/// Every node kind, by the name the printer uses.
pub const NODE_NAMES: [&str; 19] = [
    "identity",
    "atomic",
    "wigner",
    "wishart",
    "mobius",
    "inv",
    "scale",
    "shift",
    "square",
    "blockdiag",
    "corner",
    "addatomicwishart",
    "mulwishart",
    "infoplusnoise",
    "freeadd",
    "freemul",
    "compress",
    "wishartcov",
    "transposeswap",
];

impl Expr {
    pub fn node_name(&self) -> &'static str {
        use Expr::*;
        match self {
            Identity => "identity",
            Atomic(_) => "atomic",
            Wigner => "wigner",
            Wishart(_) => "wishart",
            Mobius(..) => "mobius",
            Inv(_) => "inv",
            Scale(..) => "scale",
            Shift(..) => "shift",
            Square(_) => "square",
            BlockDiag(..) => "blockdiag",
            Corner(..) => "corner",
            AddAtomicWishart(..) => "addatomicwishart",
            MulWishart(..) => "mulwishart",
            InfoPlusNoise(..) => "infoplusnoise",
            FreeAdd(..) => "freeadd",
            FreeMul(..) => "freemul",
            Compress(..) => "compress",
            WishartCov(..) => "wishartcov",
            TransposeSwap(..) => "transposeswap",
        }
    }

    /// The limiting distribution, as an `mz` encoding.
    pub fn distribution(&self) -> Result<EncodedDistribution> {
        use Expr::*;
        Ok(match self {
            Identity => encodings::identity(),
            Atomic(t) => encodings::atomic(t)?,
            Wigner => encodings::semicircle(),
            Wishart(c) => encodings::marcenko_pastur(c)?,
            Mobius(a, t) => oplaws::mobius(&a.distribution()?, t)?,
            Inv(a) => oplaws::inverse(&a.distribution()?)?,
            Scale(a, s) => oplaws::scale(&a.distribution()?, s)?,
            Shift(a, s) => oplaws::shift(&a.distribution()?, s)?,
            Square(a) => oplaws::square(&a.distribution()?)?,
            BlockDiag(a, b, c) => oplaws::block_diag(&a.distribution()?, &b.distribution()?, c)?,
            Corner(a, c, al) => oplaws::corner(&a.distribution()?, c, al)?,
            AddAtomicWishart(a, c, t) => oplaws::add_atomic_wishart(&a.distribution()?, c, t)?,
            MulWishart(a, c) => oplaws::multiply_wishart(&a.distribution()?, c)?,
            InfoPlusNoise(a, c, s) => oplaws::info_plus_noise(&a.distribution()?, c, s)?,
            FreeAdd(a, b) => oplaws::free_add(&a.distribution()?, &b.distribution()?)?,
            FreeMul(a, b) => oplaws::free_mul(&a.distribution()?, &b.distribution()?)?,
            Compress(a, c) => oplaws::compress(&a.distribution()?, c)?,
            WishartCov(a, b, c) => oplaws::wishart_covariance(&a.distribution()?, &b.distribution()?, c)?,
            TransposeSwap(a, c) => oplaws::transpose_swap(&a.distribution()?, c)?,
        })
    }
}

fn fmt_atoms(t: &AtomicSpec) -> String {
    t.iter().map(|(p, l)| format!("{p}@{l}")).collect::<Vec<_>>().join(", ")
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::FreeAdd(..) => 1,
            Expr::FreeMul(..) => 2,
            _ => 3,
        }
    }

    fn fmt_side(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expr::*;
        match self {
            Identity => write!(f, "identity"),
            Wigner => write!(f, "wigner"),
            Atomic(t) => write!(f, "atomic({})", fmt_atoms(t)),
            Wishart(c) => write!(f, "wishart({c})"),
            Mobius(a, t) => write!(f, "mobius({a}, {}, {}, {}, {})", t.p, t.q, t.r, t.s),
            Inv(a) => write!(f, "inv({a})"),
            Scale(a, s) => write!(f, "scale({a}, {s})"),
            Shift(a, s) => write!(f, "shift({a}, {s})"),
            Square(a) => write!(f, "square({a})"),
            BlockDiag(a, b, c) => write!(f, "blockdiag({a}, {b}, {c})"),
            Corner(a, c, al) => write!(f, "corner({a}, {c}, {al})"),
            AddAtomicWishart(a, c, t) => write!(f, "addatomicwishart({a}, {c}, {})", fmt_atoms(t)),
            MulWishart(a, c) => write!(f, "mulwishart({a}, {c})"),
            InfoPlusNoise(a, c, s) => write!(f, "infoplusnoise({a}, {c}, {s})"),
            Compress(a, c) => write!(f, "compress({a}, {c})"),
            WishartCov(a, b, c) => write!(f, "wishartcov({a}, {b}, {c})"),
            TransposeSwap(a, c) => write!(f, "transposeswap({a}, {c})"),
            FreeAdd(a, b) => {
                a.fmt_side(f, 1)?;
                write!(f, " + ")?;
                b.fmt_side(f, 2)
            }
            FreeMul(a, b) => {
                a.fmt_side(f, 2)?;
                write!(f, " * ")?;
                b.fmt_side(f, 3)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Num(Rational),
    Sym(char),
    End,
}

fn position(src: &str, byte: usize) -> (usize, usize) {
    let before = &src[..byte.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn err_at(src: &str, byte: usize, msg: impl Into<String>) -> Error {
    let (line, col) = position(src, byte);
    Error::Parse { line, col, msg: msg.into() }
}

/// Exact value of a decimal literal such as `12`, `0.4` or `.25`.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(digits, den))
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let mut toks = Vec::new();
    let b = src.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            toks.push((Tok::Name(src[s..i].to_string()), s));
        } else if c.is_ascii_digit() || c == '.' {
            let s = i;
            while i < b.len() && ((b[i] as char).is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            let v = parse_decimal(&src[s..i]).ok_or_else(|| err_at(src, s, format!("bad number '{}'", &src[s..i])))?;
            toks.push((Tok::Num(v), s));
        } else if "()+*,@/-".contains(c) {
            toks.push((Tok::Sym(c), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(err_at(src, i, format!("unexpected character '{ch}'")));
        }
    }
    toks.push((Tok::End, src.len()));
    Ok(toks)
}

enum Arg {
    Expr(Expr, usize),
    Scalar(Rational, usize),
    Atom(Rational, Rational, usize),
}

impl Arg {
    fn pos(&self) -> usize {
        match self {
            Arg::Expr(_, p) | Arg::Scalar(_, p) | Arg::Atom(_, _, p) => *p,
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    i: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        err_at(self.src, self.pos(), msg)
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.prod()?;
        while self.eat('+') {
            let r = self.prod()?;
            e = Expr::FreeAdd(Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn prod(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        while self.eat('*') {
            let r = self.term()?;
            e = Expr::FreeMul(Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr> {
        let start = self.pos();
        match self.peek().clone() {
            Tok::Sym('(') => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Name(name) => {
                self.i += 1;
                let args = if self.eat('(') { self.args()? } else { Vec::new() };
                build(self.src, &name, start, args)
            }
            Tok::Num(_) | Tok::Sym('-') => Err(self.err("expected a matrix expression, found a number")),
            Tok::End => Err(self.err("unexpected end of input")),
            Tok::Sym(c) => Err(self.err(format!("unexpected '{c}'"))),
        }
    }

    fn scalar(&mut self) -> Result<Rational> {
        let neg = self.eat('-');
        let Tok::Num(mut v) = self.peek().clone() else {
            return Err(self.err("expected a number"));
        };
        self.i += 1;
        if self.eat('/') {
            let at = self.pos();
            let Tok::Num(d) = self.peek().clone() else {
                return Err(self.err("expected a denominator"));
            };
            if d.is_zero() {
                return Err(err_at(self.src, at, "zero denominator"));
            }
            self.i += 1;
            v /= d;
        }
        Ok(if neg { -v } else { v })
    }

    fn args(&mut self) -> Result<Vec<Arg>> {
        let mut out = Vec::new();
        if self.eat(')') {
            return Ok(out);
        }
        loop {
            let at = self.pos();
            let arg = match self.peek() {
                Tok::Num(_) | Tok::Sym('-') => {
                    let v = self.scalar()?;
                    if self.eat('@') {
                        Arg::Atom(v, self.scalar()?, at)
                    } else {
                        Arg::Scalar(v, at)
                    }
                }
                _ => Arg::Expr(self.expr()?, at),
            };
            out.push(arg);
            if self.eat(')') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }
}

fn build(src: &str, name: &str, at: usize, args: Vec<Arg>) -> Result<Expr> {
    let key: String = name.chars().filter(|c| *c != '_').collect::<String>().to_ascii_lowercase();
    let mut a = Args { src, name, at, args, i: 0 };
    use Expr::*;
    let e = match key.as_str() {
        "identity" | "eye" => Identity,
        "wigner" | "semicircle" => Wigner,
        "atomic" => Atomic(a.atoms(1)?),
        "wishart" | "marcenkopastur" => Wishart(a.scalar()?),
        "mobius" => {
            let x = a.expr()?;
            Mobius(x, MobiusParams::new(a.scalar()?, a.scalar()?, a.scalar()?, a.scalar()?))
        }
        "inv" | "inverse" => Inv(a.expr()?),
        "scale" => Scale(a.expr()?, a.scalar()?),
        "shift" => Shift(a.expr()?, a.scalar()?),
        "square" => Square(a.expr()?),
        "blockdiag" => BlockDiag(a.expr()?, a.expr()?, a.scalar()?),
        "corner" => Corner(a.expr()?, a.scalar()?, a.scalar()?),
        "addatomicwishart" | "addwishart" => AddAtomicWishart(a.expr()?, a.scalar()?, a.atoms(1)?),
        "mulwishart" | "multiplywishart" => MulWishart(a.expr()?, a.scalar()?),
        "infoplusnoise" => InfoPlusNoise(a.expr()?, a.scalar()?, a.scalar()?),
        "freeadd" => FreeAdd(a.expr()?, a.expr()?),
        "freemul" => FreeMul(a.expr()?, a.expr()?),
        "compress" => Compress(a.expr()?, a.scalar()?),
        "wishartcov" | "wishartcovariance" => WishartCov(a.expr()?, a.expr()?, a.scalar()?),
        "transposeswap" | "transpose" => TransposeSwap(a.expr()?, a.scalar()?),
        _ => return Err(err_at(src, at, format!("unknown function '{name}'"))),
    };
    a.finish()?;
    Ok(e)
}

struct Args<'a> {
    src: &'a str,
    name: &'a str,
    at: usize,
    args: Vec<Arg>,
    i: usize,
}

impl<'a> Args<'a> {
    fn next(&mut self, what: &str) -> Result<&Arg> {
        let n = self.i;
        self.i += 1;
        self.args.get(n).ok_or_else(|| {
            err_at(self.src, self.at, format!("{}: missing argument {} ({what})", self.name, n + 1))
        })
    }

    fn expr(&mut self) -> Result<Box<Expr>> {
        let (src, name) = (self.src, self.name);
        match self.next("matrix expression")? {
            Arg::Expr(e, _) => Ok(Box::new(e.clone())),
            a => Err(err_at(src, a.pos(), format!("{name}: expected a matrix expression"))),
        }
    }

    fn scalar(&mut self) -> Result<Rational> {
        let (src, name) = (self.src, self.name);
        match self.next("number")? {
            Arg::Scalar(v, _) => Ok(v.clone()),
            a => Err(err_at(src, a.pos(), format!("{name}: expected a number"))),
        }
    }

    fn atoms(&mut self, min: usize) -> Result<AtomicSpec> {
        let mut out = Vec::new();
        while let Some(Arg::Atom(p, l, _)) = self.args.get(self.i) {
            out.push((p.clone(), l.clone()));
            self.i += 1;
        }
        if out.len() < min {
            let at = self.args.get(self.i).map_or(self.at, Arg::pos);
            return Err(err_at(self.src, at, format!("{}: expected atoms written weight@location", self.name)));
        }
        Ok(out)
    }

    fn finish(&self) -> Result<()> {
        match self.args.get(self.i) {
            None => Ok(()),
            Some(a) => Err(err_at(
                self.src,
                a.pos(),
                format!("{}: takes {} arguments, got {}", self.name, self.i, self.args.len()),
            )),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser { src: text, toks, i: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::rat;
    use Expr::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn spec_examples() {
        assert_eq!(parse("freeadd(wigner, wishart(2))").unwrap(), FreeAdd(b(Wigner), b(Wishart(rat(2, 1)))));
        assert_eq!(
            parse("inv(mulwishart(identity, 1/10))").unwrap(),
            Inv(b(MulWishart(b(Identity), rat(1, 10))))
        );
        assert_eq!(parse("wigner + wishart(2)").unwrap(), parse("free_add(Wigner, wishart(2))").unwrap());
    }

    #[test]
    fn precedence_and_literals() {
        let e = parse("wigner + wigner * wishart(0.4)").unwrap();
        assert_eq!(e, FreeAdd(b(Wigner), b(FreeMul(b(Wigner), b(Wishart(rat(2, 5)))))));
        let e = parse("(wigner + identity) * wishart(1)").unwrap();
        assert!(matches!(e, FreeMul(..)));
        let e = parse("atomic(1/2@-1, 0.5@1)").unwrap();
        assert_eq!(e, Atomic(vec![(rat(1, 2), rat(-1, 1)), (rat(1, 2), rat(1, 1))]));
        assert_eq!(parse_decimal("0.125"), Some(rat(1, 8)));
        assert_eq!(parse_decimal("."), None);
    }

    #[test]
    fn errors_have_positions() {
        match parse("freeadd(wigner,\n  bogus(1))") {
            Err(Error::Parse { line, col, msg }) => {
                assert_eq!((line, col), (2, 3));
                assert!(msg.contains("bogus"));
            }
            e => panic!("{e:?}"),
        }
        assert!(matches!(parse("scale(wigner)"), Err(Error::Parse { .. })));
        assert!(matches!(parse("scale(wigner, 2, 3)"), Err(Error::Parse { col: 18, .. })));
        assert!(matches!(parse("wigner +"), Err(Error::Parse { col: 9, .. })));
        assert!(matches!(parse("wigner $"), Err(Error::Parse { col: 8, .. })));
        assert!(matches!(parse("wishart(1/0)"), Err(Error::Parse { .. })));
    }

    #[test]
    fn printer_round_trip() {
        for s in [
            "wigner + wishart(1/2)",
            "wigner + (wigner + wigner)",
            "(wigner + identity) * wishart(2) * wigner",
            "wigner * (wishart(2) * wigner)",
            "mobius(wigner, 1, 2, -3, 4)",
            "addatomicwishart(wigner, 2, 1/3@1, 2/3@-1/2)",
            "corner(blockdiag(wigner, identity, 2/5), 5/2, 1)",
            "wishartcov(identity, atomic(1@2), 1/2)",
            "transposeswap(infoplusnoise(compress(square(shift(scale(inv(identity), 2), 1)), 1/2), 1, 1), 2)",
        ] {
            let e = parse(s).unwrap();
            let again = parse(&e.to_string()).unwrap();
            assert_eq!(again, e, "{s}");
        }
    }

    #[test]
    fn evaluates_intro_sum() {
        let d = parse("wigner + wishart(1/2)").unwrap().distribution().unwrap();
        let want = EncodedDistribution::parse(crate::encodings::Kind::Mz, "m^3+(z+2)*m^2-(-2*z+1)*m+2").unwrap();
        assert!(d.equivalent(&want));
    }
}
