//! Symbolic polynomials in the real coordinates `x_j = re z_j`,
//! `y_j = im z_j`, used to describe boundary perturbations in domain
//! configurations. Parsing accepts sums of monomials such as
//! `0.5*x1^3 - 0.25*y2^2*x1 + 1e-3*x2`.

use num_complex::Complex64;

use crate::error::Error;
use crate::Result;

/// One monomial: coefficient times a product of variable powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    /// (real variable index, exponent); index 2j is x_{j+1}, 2j+1 is y_{j+1}.
    pub powers: Vec<(usize, u32)>,
}

/// Polynomial in the 2n real coordinates of C^n.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPoly {
    pub dimension: usize,
    pub terms: Vec<Monomial>,
}

impl SymPoly {
    pub fn zero(dimension: usize) -> Self {
        Self { dimension, terms: Vec::new() }
    }

    /// Parses an expression in variables `x1..xn, y1..yn`.
    pub fn parse(input: &str, dimension: usize) -> Result<Self> {
        let tokens = tokenize(input)?;
        let mut terms = Vec::new();
        let mut pos = 0usize;
        let mut sign = 1.0f64;
        let mut expect_term = true;
        while pos < tokens.len() {
            match &tokens[pos] {
                Token::Plus => {
                    if expect_term && sign != 1.0 {
                        return Err(Error::Parse("dangling sign".into()));
                    }
                    expect_term = true;
                    pos += 1;
                }
                Token::Minus => {
                    sign = -sign;
                    expect_term = true;
                    pos += 1;
                }
                _ => {
                    if !expect_term {
                        return Err(Error::Parse("missing '+' or '-' between terms".into()));
                    }
                    let (mono, next) = parse_monomial(&tokens, pos, dimension)?;
                    terms.push(Monomial { coeff: sign * mono.coeff, powers: mono.powers });
                    pos = next;
                    sign = 1.0;
                    expect_term = false;
                }
            }
        }
        if expect_term && !terms.is_empty() {
            return Err(Error::Parse("trailing operator".into()));
        }
        if terms.is_empty() && !tokens.is_empty() {
            return Err(Error::Parse("no terms parsed".into()));
        }
        Ok(Self { dimension, terms })
    }

    /// Value at a complex point (via its real coordinates).
    pub fn value(&self, z: &[Complex64]) -> f64 {
        let coords = real_coords(z);
        self.terms
            .iter()
            .map(|m| {
                m.coeff
                    * m.powers
                        .iter()
                        .map(|&(v, e)| coords[v].powi(e as i32))
                        .product::<f64>()
            })
            .sum()
    }

    /// Partial derivative with respect to real variable `var`.
    pub fn derivative(&self, var: usize) -> SymPoly {
        let mut terms = Vec::new();
        for m in &self.terms {
            if let Some(&(_, e)) = m.powers.iter().find(|&&(v, _)| v == var) {
                let mut powers: Vec<(usize, u32)> = m
                    .powers
                    .iter()
                    .filter(|&&(v, _)| v != var)
                    .cloned()
                    .collect();
                if e > 1 {
                    powers.push((var, e - 1));
                }
                powers.sort_unstable();
                terms.push(Monomial { coeff: m.coeff * e as f64, powers });
            }
        }
        SymPoly { dimension: self.dimension, terms }
    }

    /// Real gradient packed as complex components `d/dx_j + i d/dy_j`.
    pub fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        (0..self.dimension)
            .map(|j| {
                Complex64::new(
                    self.derivative(2 * j).value(z),
                    self.derivative(2 * j + 1).value(z),
                )
            })
            .collect()
    }

    /// Full real Hessian in the interleaved (x1, y1, ...) ordering.
    pub fn real_hessian(&self, z: &[Complex64]) -> nalgebra::DMatrix<f64> {
        let k = 2 * self.dimension;
        let mut h = nalgebra::DMatrix::zeros(k, k);
        for i in 0..k {
            let di = self.derivative(i);
            for j in i..k {
                let v = di.derivative(j).value(z);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        h
    }

    /// Canonical text form that `parse` accepts back.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(if m.coeff < 0.0 { " - " } else { " + " });
            } else if m.coeff < 0.0 {
                out.push('-');
            }
            out.push_str(&format!("{}", m.coeff.abs()));
            for &(v, e) in &m.powers {
                let name = if v % 2 == 0 { "x" } else { "y" };
                out.push_str(&format!("*{}{}", name, v / 2 + 1));
                if e > 1 {
                    out.push_str(&format!("^{e}"));
                }
            }
        }
        out
    }
}

fn real_coords(z: &[Complex64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * z.len());
    for c in z {
        v.push(c.re);
        v.push(c.im);
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Var(usize), // real variable index
    Star,
    Caret,
    Plus,
    Minus,
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            'x' | 'y' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(Error::Parse(format!("variable '{c}' without index")));
                }
                let idx: usize = input[i + 1..j]
                    .parse()
                    .map_err(|_| Error::Parse("bad variable index".into()))?;
                if idx == 0 || idx > 64 {
                    return Err(Error::Parse(format!("variable index {idx} out of range")));
                }
                let var = 2 * (idx - 1) + if c == 'y' { 1 } else { 0 };
                tokens.push(Token::Var(var));
                i = j;
            }
            '0'..='9' | '.' => {
                let mut j = i;
                let mut seen_e = false;
                while j < bytes.len() {
                    let d = bytes[j] as char;
                    if d.is_ascii_digit() || d == '.' {
                        j += 1;
                    } else if (d == 'e' || d == 'E') && !seen_e {
                        seen_e = true;
                        j += 1;
                        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                            j += 1;
                        }
                    } else {
                        break;
                    }
                }
                let num: f64 = input[i..j]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number '{}'", &input[i..j])))?;
                tokens.push(Token::Number(num));
                i = j;
            }
            other => return Err(Error::Parse(format!("unexpected character '{other}'"))),
        }
        if tokens.len() > 4096 {
            return Err(Error::Parse("expression too long".into()));
        }
    }
    Ok(tokens)
}

fn parse_monomial(tokens: &[Token], mut pos: usize, dimension: usize) -> Result<(Monomial, usize)> {
    let mut coeff = 1.0f64;
    let mut powers: Vec<(usize, u32)> = Vec::new();

    let consume_factor =
        |pos: &mut usize, coeff: &mut f64, powers: &mut Vec<(usize, u32)>| -> Result<()> {
            match tokens.get(*pos) {
                Some(Token::Number(v)) => {
                    *coeff *= v;
                    *pos += 1;
                    Ok(())
                }
                Some(Token::Var(var)) => {
                    if *var >= 2 * dimension {
                        return Err(Error::Parse(format!(
                            "variable index exceeds dimension {dimension}"
                        )));
                    }
                    let mut exp = 1u32;
                    if let Some(Token::Caret) = tokens.get(*pos + 1) {
                        match tokens.get(*pos + 2) {
                            Some(Token::Number(e)) => {
                                if *e < 0.0 || e.fract() != 0.0 || *e > 32.0 {
                                    return Err(Error::Parse(format!("bad exponent {e}")));
                                }
                                exp = *e as u32;
                                *pos += 3;
                            }
                            _ => return Err(Error::Parse("'^' without integer exponent".into())),
                        }
                    } else {
                        *pos += 1;
                    }
                    match powers.iter_mut().find(|(v, _)| v == var) {
                        Some((_, e)) => *e += exp,
                        None => powers.push((*var, exp)),
                    }
                    Ok(())
                }
                _ => Err(Error::Parse("expected a number or a variable".into())),
            }
        };

    consume_factor(&mut pos, &mut coeff, &mut powers)?;
    while let Some(Token::Star) = tokens.get(pos) {
        pos += 1;
        consume_factor(&mut pos, &mut coeff, &mut powers)?;
    }
    // Factors must be '*'-separated; adjacency like "x1 x2" is rejected.
    match tokens.get(pos) {
        Some(Token::Number(_)) | Some(Token::Var(_)) | Some(Token::Caret) => {
            return Err(Error::Parse("missing '*' between factors".into()));
        }
        _ => {}
    }
    powers.sort_unstable();
    powers.retain(|&(_, e)| e > 0);
    Ok((Monomial { coeff, powers }, pos))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parse_and_evaluate() {
        let p = SymPoly::parse("0.5*x1^3 + 2*y2 - x1*y1", 2).unwrap();
        // x1 = 2, y1 = 1, x2 = 0, y2 = 3.
        let z = [c(2.0, 1.0), c(0.0, 3.0)];
        assert!((p.value(&z) - (0.5 * 8.0 + 6.0 - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_hand_computation() {
        let p = SymPoly::parse("x1^2*y1", 1).unwrap();
        let dx = p.derivative(0);
        let z = [c(3.0, 2.0)];
        assert!((dx.value(&z) - 2.0 * 3.0 * 2.0).abs() < 1e-15);
        let dy = p.derivative(1);
        assert!((dy.value(&z) - 9.0).abs() < 1e-15);
    }

    #[test]
    fn hessian_is_symmetric_and_correct() {
        let p = SymPoly::parse("x1^3 + x1*y1^2", 1).unwrap();
        let z = [c(2.0, -1.0)];
        let h = p.real_hessian(&z);
        assert!((h[(0, 0)] - 12.0).abs() < 1e-15); // 6 x1
        assert!((h[(0, 1)] - (-2.0)).abs() < 1e-15); // 2 y1
        assert!((h[(1, 1)] - 4.0).abs() < 1e-15); // 2 x1
        assert_eq!(h[(0, 1)], h[(1, 0)]);
    }

    #[test]
    fn text_round_trip() {
        let p = SymPoly::parse("1.25*x1^2*y2 - 0.5*x2", 2).unwrap();
        let q = SymPoly::parse(&p.to_text(), 2).unwrap();
        let z = [c(0.3, -0.7), c(1.1, 0.4)];
        assert!((p.value(&z) - q.value(&z)).abs() < 1e-15);
    }

    #[test]
    fn rejects_garbage() {
        assert!(SymPoly::parse("x", 1).is_err());
        assert!(SymPoly::parse("x1 +", 1).is_err());
        assert!(SymPoly::parse("x3", 1).is_err());
        assert!(SymPoly::parse("1..2*x1", 1).is_err());
        assert!(SymPoly::parse("x1^-2", 1).is_err());
        assert!(SymPoly::parse("x1 x2", 2).is_err());
    }

    #[test]
    fn implicit_products_and_signs() {
        let p = SymPoly::parse("-x1 + 3*x1*x1", 1).unwrap();
        let z = [c(2.0, 0.0)];
        assert!((p.value(&z) - (-2.0 + 12.0)).abs() < 1e-15);
    }
}
