//! Canonical printing in the input syntax. Output re-parses to the same tree.

use std::fmt::{self, Display, Formatter};

use super::{Expression, NnfExpression, Problem};

const OR: u8 = 0;
const AND: u8 = 1;
const PREFIX: u8 = 2;

fn write_expr(e: &Expression, level: u8, f: &mut Formatter<'_>) -> fmt::Result {
    let (own, parens) = match e {
        Expression::Or(..) => (OR, level > OR),
        Expression::And(..) => (AND, level > AND),
        _ => (PREFIX, false),
    };
    if parens {
        f.write_str("(")?;
    }
    match e {
        Expression::Prop(p) => f.write_str(p)?,
        Expression::Nom(x) => write!(f, "@{x}")?,
        Expression::Not(t) => {
            f.write_str("!")?;
            write_expr(t, PREFIX, f)?;
        }
        Expression::And(a, b) | Expression::Or(a, b) => {
            write_expr(a, own, f)?;
            f.write_str(if own == AND { " & " } else { " | " })?;
            write_expr(b, own + 1, f)?;
        }
        Expression::Diamond(r, n, t) => {
            write!(f, "<{r}>{n} ")?;
            write_expr(t, PREFIX, f)?;
        }
        Expression::Box(r, n, t) => {
            write!(f, "[{r}]{n} ")?;
            write_expr(t, PREFIX, f)?;
        }
        Expression::Exists(n, t) => {
            write!(f, "E{n} ")?;
            write_expr(t, PREFIX, f)?;
        }
        Expression::Forall(n, t) => {
            write!(f, "A{n} ")?;
            write_expr(t, PREFIX, f)?;
        }
    }
    if parens {
        f.write_str(")")?;
    }
    Ok(())
}

impl Display for Expression {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(self, OR, f)
    }
}

impl Display for NnfExpression {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(&Expression::from(self), OR, f)
    }
}

impl Display for Problem {
    /// One declaration per line: role assertions, edges, equations,
    /// disequations, then labels.
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut decls = Vec::new();
        decls.extend(self.inclusions.iter().map(|(r, s)| format!("{r} <= {s}")));
        decls.extend(self.reflexive.iter().map(|r| format!("refl {r}")));
        decls.extend(self.transitive.iter().map(|r| format!("trans {r}")));
        decls.extend(self.edges.iter().map(|(r, x, y)| format!("{r}({x}, {y})")));
        decls.extend(self.equations.iter().map(|(x, y)| format!("{x} = {y}")));
        decls.extend(self.disequations.iter().map(|(x, y)| format!("{x} != {y}")));
        decls.extend(self.labels.iter().map(|(e, x)| format!("at {x}: {e}")));
        for d in decls {
            writeln!(f, "{d};")?;
        }
        Ok(())
    }
}
