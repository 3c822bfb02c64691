//! Canonical text form of expressions.
//!
//! Grammar shared with the parser: base variables `x1..xn`, fiber
//! variables `u1..um`, jet coordinates like `u1_x1x1x2` (multi-index by
//! counting axis repetitions), parameters as bare identifiers, operators
//! `+ - * / ^`, functions `sin cos exp log sqrt`. Round-trips through
//! [`super::parse_expr`] are stable on canonical forms.

use num_traits::{One, Signed};

use super::{rational_is_negative, Expr};

// Binding strengths used to decide parenthesization.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", print(self))
    }
}

pub fn print(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(e, &mut s);
    s
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) => {
            if rational_is_negative(c) {
                PREC_NEG
            } else if c.denom().is_one() {
                PREC_ATOM
            } else {
                PREC_PRODUCT // printed as p/q
            }
        }
        Expr::Param(_) | Expr::Base(_) | Expr::Jet(_) | Expr::Apply(..) => PREC_ATOM,
        Expr::Pow(..) => PREC_POW,
        Expr::Neg(_) => PREC_NEG,
        Expr::Product(_) => PREC_PRODUCT,
        Expr::Sum(_) => PREC_SUM,
    }
}

fn write_child(e: &Expr, min_prec: u8, out: &mut String) {
    if precedence(e) < min_prec {
        out.push('(');
        write_expr(e, out);
        out.push(')');
    } else {
        write_expr(e, out);
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Const(c) => {
            if c.denom().is_one() {
                out.push_str(&c.numer().to_string());
            } else {
                out.push_str(&format!("{}/{}", c.numer(), c.denom()));
            }
        }
        Expr::Param(p) => out.push_str(p),
        Expr::Base(i) => out.push_str(&format!("x{}", i + 1)),
        Expr::Jet(jv) => {
            out.push_str(&format!("u{}", jv.fiber + 1));
            if jv.index.order() > 0 {
                out.push('_');
                for (axis, &exp) in jv.index.exponents().iter().enumerate() {
                    for _ in 0..exp {
                        out.push_str(&format!("x{}", axis + 1));
                    }
                }
            }
        }
        Expr::Apply(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(a, out);
            out.push(')');
        }
        Expr::Pow(b, n) => {
            write_child(b, PREC_ATOM, out);
            out.push('^');
            if *n < 0 {
                out.push_str(&format!("({n})"));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Expr::Neg(a) => {
            out.push('-');
            write_child(a, PREC_NEG, out);
        }
        Expr::Product(fs) => {
            // a leading -1 coefficient prints as a sign, and a leading
            // rational as "p/q*rest"
            let (sign, rest): (bool, &[Expr]) = match fs.first() {
                Some(Expr::Const(c)) if *c == -num_rational::BigRational::one() => (true, &fs[1..]),
                _ => (false, &fs[..]),
            };
            if sign {
                out.push('-');
            }
            let mut first = true;
            for f in rest {
                if !first {
                    out.push('*');
                }
                // a leading rational coefficient needs no parens; later
                // factors bind as full product operands
                let min = if first { PREC_PRODUCT } else { PREC_PRODUCT + 1 };
                write_child(f, min, out);
                first = false;
            }
            if rest.is_empty() {
                out.push('1');
            }
        }
        Expr::Sum(ts) => {
            let mut first = true;
            for t in ts {
                if first {
                    write_child(t, PREC_SUM, out);
                    first = false;
                    continue;
                }
                if let Some(pos) = strip_sign(t) {
                    out.push_str(" - ");
                    write_child(&pos, PREC_SUM + 1, out);
                } else {
                    out.push_str(" + ");
                    write_child(t, PREC_SUM + 1, out);
                }
            }
        }
    }
}

/// If a canonical term has a negative rational coefficient, return the term
/// with the coefficient negated.
fn strip_sign(t: &Expr) -> Option<Expr> {
    let (c, core) = t.coeff_core();
    if c.is_negative() {
        Some(core.scale(-c))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Expr, Func};

    #[test]
    fn prints_jet_coordinates_with_repetitions() {
        let e = Expr::jet(0, vec![2, 1]);
        assert_eq!(e.to_string(), "u1_x1x1x2");
        assert_eq!(Expr::jet(1, vec![0, 0]).to_string(), "u2");
    }

    #[test]
    fn prints_signs_and_rationals() {
        let e = (Expr::int(-1) * Expr::jet(0, vec![2])).canon();
        assert_eq!(e.to_string(), "-u1_x1x1");
        let h = Expr::rational(1, 2) * Expr::base(0);
        assert_eq!(h.canon().to_string(), "1/2*x1");
        let s = (Expr::base(0) - Expr::int(2) * Expr::base(1)).canon();
        assert_eq!(s.to_string(), "x1 - 2*x2");
    }

    #[test]
    fn prints_powers_and_functions() {
        let e = Expr::apply(Func::Sin, Expr::base(0)).pow(2);
        assert_eq!(e.to_string(), "sin(x1)^2");
        let inv = Expr::base(0).pow(-1);
        assert_eq!(inv.to_string(), "x1^(-1)");
        let grouped = (Expr::base(0) + Expr::int(1)).canon().pow(3);
        assert_eq!(grouped.to_string(), "(1 + x1)^3");
    }
}
