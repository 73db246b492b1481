//! Canonical text and JSON forms.  Polynomials read and write
//! `c*x1^a1*...*xn^an + ...` with exact rational coefficients; operators
//! add `d1..dn` factors, and divided-power operators use `D1^(k)`.
//! Parsing the rendered form returns the original object bit-exactly.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::charp::{fp_inv, DpOp, FpPoly};
use crate::error::{Error, Result};
use crate::mono::Mono;
use crate::poly::Poly;
use crate::rat::Rat;
use crate::weyl::{QOp, WeylOp};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Tok::Num(chars[start..i].iter().collect()));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Tok::Name(chars[start..i].iter().collect()));
            }
            other => {
                return Err(Error::Parse(format!("unexpected character '{other}'")));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum VarKind {
    X(usize),
    D(usize),
    Dp(usize),
}

fn resolve_name(name: &str, n: usize) -> Result<VarKind> {
    let (head, digits) = name.split_at(1);
    let kind = if digits.is_empty() {
        match head {
            "x" => Some(VarKind::X(0)),
            "y" => Some(VarKind::X(1)),
            "z" => Some(VarKind::X(2)),
            "w" => Some(VarKind::X(3)),
            "d" => Some(VarKind::D(0)),
            "D" => Some(VarKind::Dp(0)),
            _ => None,
        }
    } else {
        let k: usize = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad variable index in '{name}'")))?;
        if k == 0 {
            return Err(Error::Parse(format!("indices are 1-based: '{name}'")));
        }
        match head {
            "x" => Some(VarKind::X(k - 1)),
            "d" => Some(VarKind::D(k - 1)),
            "D" => Some(VarKind::Dp(k - 1)),
            _ => None,
        }
    };
    let Some(kind) = kind else {
        return Err(Error::Parse(format!("unknown variable '{name}'")));
    };
    let j = match kind {
        VarKind::X(j) | VarKind::D(j) | VarKind::Dp(j) => j,
    };
    if j >= n {
        return Err(Error::Parse(format!(
            "variable '{name}' exceeds the {n}-variable ring"
        )));
    }
    Ok(kind)
}

struct RawTerm {
    coeff: Rat,
    x: Vec<u32>,
    d: Vec<u32>,
    dp: Vec<u32>,
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_num(&mut self) -> Result<String> {
        match self.next() {
            Some(Tok::Num(s)) => Ok(s),
            other => Err(Error::Parse(format!("expected a number, found {other:?}"))),
        }
    }

    fn parse_exponent(&mut self) -> Result<u32> {
        match self.next() {
            Some(Tok::Num(s)) => s
                .parse()
                .map_err(|_| Error::Parse(format!("exponent '{s}' too large"))),
            Some(Tok::LParen) => {
                let s = self.expect_num()?;
                match self.next() {
                    Some(Tok::RParen) => s
                        .parse()
                        .map_err(|_| Error::Parse(format!("exponent '{s}' too large"))),
                    other => Err(Error::Parse(format!(
                        "expected ')' after exponent, found {other:?}"
                    ))),
                }
            }
            other => Err(Error::Parse(format!("expected an exponent, found {other:?}"))),
        }
    }

    fn parse_term(&mut self) -> Result<RawTerm> {
        let mut term = RawTerm {
            coeff: Rat::from(BigInt::from(1)),
            x: vec![0; self.n],
            d: vec![0; self.n],
            dp: vec![0; self.n],
        };
        loop {
            match self.peek() {
                Some(Tok::Num(_)) => {
                    let Some(Tok::Num(numstr)) = self.next() else {
                        unreachable!()
                    };
                    let num: BigInt = numstr
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad number '{numstr}'")))?;
                    let c = if matches!(self.peek(), Some(Tok::Slash)) {
                        self.next();
                        let denstr = self.expect_num()?;
                        let den: BigInt = denstr
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad number '{denstr}'")))?;
                        if den.is_zero() {
                            return Err(Error::Parse("zero denominator".into()));
                        }
                        Rat::new(num, den)
                    } else {
                        Rat::from(num)
                    };
                    term.coeff *= c;
                }
                Some(Tok::Name(_)) => {
                    let Some(Tok::Name(name)) = self.next() else {
                        unreachable!()
                    };
                    let kind = resolve_name(&name, self.n)?;
                    let exp = if matches!(self.peek(), Some(Tok::Caret)) {
                        self.next();
                        self.parse_exponent()?
                    } else {
                        1
                    };
                    match kind {
                        VarKind::X(j) => term.x[j] += exp,
                        VarKind::D(j) => term.d[j] += exp,
                        VarKind::Dp(j) => term.dp[j] += exp,
                    }
                }
                other => {
                    return Err(Error::Parse(format!(
                        "expected a factor, found {other:?}"
                    )))
                }
            }
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                }
                _ => break,
            }
        }
        Ok(term)
    }

    fn parse_sum(&mut self) -> Result<Vec<RawTerm>> {
        let mut terms = Vec::new();
        let mut negate = false;
        match self.peek() {
            Some(Tok::Minus) => {
                self.next();
                negate = true;
            }
            Some(Tok::Plus) => {
                self.next();
            }
            _ => {}
        }
        loop {
            let mut term = self.parse_term()?;
            if negate {
                term.coeff = -term.coeff;
            }
            terms.push(term);
            match self.next() {
                None => break,
                Some(Tok::Plus) => negate = false,
                Some(Tok::Minus) => negate = true,
                other => {
                    return Err(Error::Parse(format!(
                        "expected '+' or '-' between terms, found {other:?}"
                    )))
                }
            }
        }
        Ok(terms)
    }
}

fn parse_terms(s: &str, n: usize) -> Result<Vec<RawTerm>> {
    if s.trim().is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    if s.trim() == "0" {
        return Ok(vec![]);
    }
    let mut parser = Parser {
        toks: lex(s)?,
        pos: 0,
        n,
    };
    parser.parse_sum()
}

/// Parses the canonical polynomial form over n variables.
pub fn parse_poly(s: &str, n: usize) -> Result<Poly> {
    let mut out = Poly::zero(n);
    for term in parse_terms(s, n)? {
        if term.d.iter().any(|&e| e > 0) || term.dp.iter().any(|&e| e > 0) {
            return Err(Error::Parse(
                "derivative factors are not allowed in a polynomial".into(),
            ));
        }
        out = out.add(&Poly::monomial(Mono(term.x), term.coeff));
    }
    Ok(out)
}

/// Parses the canonical operator form (x and d factors) over n variables.
pub fn parse_qop(s: &str, n: usize) -> Result<QOp> {
    let mut out = WeylOp::zero(n);
    for term in parse_terms(s, n)? {
        if term.dp.iter().any(|&e| e > 0) {
            return Err(Error::Parse(
                "divided powers D are characteristic-p syntax; use d1..dn".into(),
            ));
        }
        out = out.add(&WeylOp::term(Mono(term.x), Mono(term.d), term.coeff));
    }
    Ok(out)
}

/// Parses a divided-power operator over F_p.  `Dj^(k)` is the k-th divided
/// power; a bare `dj` is accepted as `Dj^(1)` since both denote the first
/// partial.  Rational coefficients reduce mod p when the denominator is
/// invertible.
pub fn parse_dp_op(s: &str, n: usize, p: u64) -> Result<DpOp> {
    let mut out = DpOp::zero(p, n)?;
    for term in parse_terms(s, n)? {
        let mut dp = term.dp;
        for (j, &e) in term.d.iter().enumerate() {
            if e > 1 {
                return Err(Error::Parse(
                    "write repeated partials as divided powers Dj^(k) in characteristic p"
                        .into(),
                ));
            }
            if e == 1 {
                if dp[j] > 0 {
                    return Err(Error::Parse(
                        "mixed dj and Dj factors for one variable".into(),
                    ));
                }
                dp[j] = 1;
            }
        }
        let c = rat_mod_p(&term.coeff, p)?;
        out = out.add(&DpOp::term(p, Mono(term.x), Mono(dp), c)?);
    }
    Ok(out)
}

/// Parses a polynomial and reduces its coefficients into F_p.
pub fn parse_fp_poly(s: &str, n: usize, p: u64) -> Result<FpPoly> {
    let mut out = FpPoly::zero(p, n)?;
    for term in parse_terms(s, n)? {
        if term.d.iter().any(|&e| e > 0) || term.dp.iter().any(|&e| e > 0) {
            return Err(Error::Parse(
                "derivative factors are not allowed in a polynomial".into(),
            ));
        }
        let c = rat_mod_p(&term.coeff, p)?;
        out = out.add(&FpPoly::monomial(p, Mono(term.x), c)?);
    }
    Ok(out)
}

fn rat_mod_p(c: &Rat, p: u64) -> Result<u64> {
    let pbig = BigInt::from(p);
    let num = ((c.numer() % &pbig) + &pbig) % &pbig;
    let den = ((c.denom() % &pbig) + &pbig) % &pbig;
    let den = den.to_u64().expect("reduced residue");
    if den == 0 {
        return Err(Error::Parse(format!(
            "denominator of {c} vanishes mod {p}"
        )));
    }
    Ok(num.to_u64().expect("reduced residue") * fp_inv(den, p) % p)
}

/// JSON term list `[{"coeff": "...", "exps": [...]}]`.
pub fn poly_to_json(f: &Poly) -> Value {
    let terms: Vec<Value> = f
        .sorted_terms()
        .into_iter()
        .map(|(m, c)| json!({"coeff": c.to_string(), "exps": m.0}))
        .collect();
    Value::Array(terms)
}

pub fn poly_from_json(v: &Value, n: usize) -> Result<Poly> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected a JSON array of terms".into()))?;
    let mut out = Poly::zero(n);
    for item in arr {
        let coeff = json_coeff(item)?;
        let exps = json_exps(item, "exps", n)?;
        out = out.add(&Poly::monomial(Mono(exps), coeff));
    }
    Ok(out)
}

/// JSON term list `[{"coeff": "...", "x": [...], "d": [...]}]`.
pub fn qop_to_json(op: &QOp) -> Value {
    let terms: Vec<Value> = op
        .terms()
        .map(|((x, d), c)| json!({"coeff": c.to_string(), "x": x.0, "d": d.0}))
        .collect();
    Value::Array(terms)
}

pub fn qop_from_json(v: &Value, n: usize) -> Result<QOp> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected a JSON array of terms".into()))?;
    let mut out = WeylOp::zero(n);
    for item in arr {
        let coeff = json_coeff(item)?;
        let x = json_exps(item, "x", n)?;
        let d = json_exps(item, "d", n)?;
        out = out.add(&WeylOp::term(Mono(x), Mono(d), coeff));
    }
    Ok(out)
}

fn json_coeff(item: &Value) -> Result<Rat> {
    let s = item
        .get("coeff")
        .and_then(|c| c.as_str())
        .ok_or_else(|| Error::Parse("term misses a string 'coeff'".into()))?;
    crate::rat::parse_rat(s)
}

fn json_exps(item: &Value, key: &str, n: usize) -> Result<Vec<u32>> {
    let arr = item
        .get(key)
        .and_then(|e| e.as_array())
        .ok_or_else(|| Error::Parse(format!("term misses an array '{key}'")))?;
    if arr.len() != n {
        return Err(Error::Parse(format!(
            "'{key}' has {} entries, expected {n}",
            arr.len()
        )));
    }
    arr.iter()
        .map(|x| {
            x.as_u64()
                .and_then(|v| u32::try_from(v).ok())
                .ok_or_else(|| Error::Parse(format!("bad exponent in '{key}'")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_i};
    use crate::weyl::random_qop;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn poly_goldens() {
        let f = parse_poly("x^2", 1).unwrap();
        assert_eq!(f, Poly::var(1, 0).pow(2));

        let f = parse_poly("x1^2 - 3/2*x2", 2).unwrap();
        let expected = Poly::var(2, 0)
            .pow(2)
            .add(&Poly::monomial(Mono(vec![0, 1]), rat(-3, 2)));
        assert_eq!(f, expected);

        let f = parse_poly("x*y + z^3", 3).unwrap();
        let expected = Poly::monomial(Mono(vec![1, 1, 0]), rat_i(1))
            .add(&Poly::monomial(Mono(vec![0, 0, 3]), rat_i(1)));
        assert_eq!(f, expected);

        assert_eq!(parse_poly("1/2", 1).unwrap(), Poly::constant(1, rat(1, 2)));
        assert_eq!(parse_poly("0", 2).unwrap(), Poly::zero(2));
        assert_eq!(
            parse_poly("-x", 1).unwrap(),
            Poly::monomial(Mono(vec![1]), rat_i(-1))
        );
        assert_eq!(
            parse_poly("x*x*2", 1).unwrap(),
            Poly::monomial(Mono(vec![2]), rat_i(2))
        );
    }

    #[test]
    fn poly_errors() {
        assert!(parse_poly("x3", 2).is_err());
        assert!(parse_poly("q + 1", 2).is_err());
        assert!(parse_poly("3/0", 1).is_err());
        assert!(parse_poly("", 1).is_err());
        assert!(parse_poly("x^", 1).is_err());
        assert!(parse_poly("x d1", 1).is_err());
        assert!(parse_poly("d1", 1).is_err());
        assert!(parse_poly("x0", 1).is_err());
    }

    #[test]
    fn qop_goldens() {
        let op = parse_qop("x1*d1 + 1", 1).unwrap();
        let expected = WeylOp::term(Mono(vec![1]), Mono(vec![1]), rat_i(1))
            .add(&WeylOp::one(1));
        assert_eq!(op, expected);

        let op = parse_qop("d2^3", 2).unwrap();
        assert_eq!(op, WeylOp::term(Mono(vec![0, 0]), Mono(vec![0, 3]), rat_i(1)));

        assert!(parse_qop("D1", 1).is_err());
    }

    #[test]
    fn dp_goldens() {
        let op = parse_dp_op("D1^(2)*x1", 1, 2).unwrap();
        let expected = DpOp::term(2, Mono(vec![1]), Mono(vec![2]), 1).unwrap();
        assert_eq!(op, expected);

        let op = parse_dp_op("d1", 1, 3).unwrap();
        assert_eq!(op, DpOp::dp(3, Mono(vec![1])).unwrap());

        let op = parse_dp_op("1/2*D1", 1, 3).unwrap();
        assert_eq!(op, DpOp::dp(3, Mono(vec![1])).unwrap().scale(2));

        assert!(parse_dp_op("1/3*D1", 1, 3).is_err());
        assert!(parse_dp_op("d1^2", 1, 3).is_err());
    }

    #[test]
    fn rendered_forms_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let op = random_qop(&mut rng, 2, 3, 3, 4);
            let back = parse_qop(&op.to_string(), 2).unwrap();
            assert_eq!(op, back);
        }
        for text in ["x1^2 - 3/2*x1*x2 + 7", "-x2 + 1/3"] {
            let f = parse_poly(text, 2).unwrap();
            assert_eq!(parse_poly(&f.to_string(), 2).unwrap(), f);
        }
        let dp = parse_dp_op("2*x1*D1^(3) + D2 + 1", 2, 5).unwrap();
        assert_eq!(parse_dp_op(&dp.to_string(), 2, 5).unwrap(), dp);
    }

    #[test]
    fn json_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let op = random_qop(&mut rng, 2, 3, 3, 4);
            let v = qop_to_json(&op);
            assert_eq!(qop_from_json(&v, 2).unwrap(), op);
        }
        let f = parse_poly("x1^4 - 5/3*x2 + 2", 2).unwrap();
        let v = poly_to_json(&f);
        assert_eq!(poly_from_json(&v, 2).unwrap(), f);
        assert!(poly_from_json(&json!([{ "coeff": "1", "exps": [1] }]), 2).is_err());
        assert!(poly_from_json(&json!([{ "exps": [1, 0] }]), 2).is_err());
    }
}
