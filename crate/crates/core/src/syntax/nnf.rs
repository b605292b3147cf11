use super::{Expression, NnfExpression};

/// Pushes negation inward until it only sits on propositions and nominal
/// tests. Graded modalities dualize with the same grade:
/// `!<r>n t == [r]n !t` and `!En t == An !t`.
pub fn to_nnf(e: &Expression) -> NnfExpression {
    convert(e, true)
}

fn convert(e: &Expression, positive: bool) -> NnfExpression {
    let bx = |e: &Expression, pos: bool| Box::new(convert(e, pos));
    match (e, positive) {
        (Expression::Prop(p), true) => NnfExpression::Prop(p.clone()),
        (Expression::Prop(p), false) => NnfExpression::NegProp(p.clone()),
        (Expression::Nom(x), true) => NnfExpression::Nom(x.clone()),
        (Expression::Nom(x), false) => NnfExpression::NegNom(x.clone()),
        (Expression::Not(t), pos) => convert(t, !pos),
        (Expression::And(a, b), true) => NnfExpression::And(bx(a, true), bx(b, true)),
        (Expression::And(a, b), false) => NnfExpression::Or(bx(a, false), bx(b, false)),
        (Expression::Or(a, b), true) => NnfExpression::Or(bx(a, true), bx(b, true)),
        (Expression::Or(a, b), false) => NnfExpression::And(bx(a, false), bx(b, false)),
        (Expression::Diamond(r, n, t), true) => NnfExpression::Diamond(r.clone(), *n, bx(t, true)),
        (Expression::Diamond(r, n, t), false) => NnfExpression::Box(r.clone(), *n, bx(t, false)),
        (Expression::Box(r, n, t), true) => NnfExpression::Box(r.clone(), *n, bx(t, true)),
        (Expression::Box(r, n, t), false) => NnfExpression::Diamond(r.clone(), *n, bx(t, false)),
        (Expression::Exists(n, t), true) => NnfExpression::Exists(*n, bx(t, true)),
        (Expression::Exists(n, t), false) => NnfExpression::Forall(*n, bx(t, false)),
        (Expression::Forall(n, t), true) => NnfExpression::Forall(*n, bx(t, true)),
        (Expression::Forall(n, t), false) => NnfExpression::Exists(*n, bx(t, false)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expression;

    fn nnf(src: &str) -> NnfExpression {
        to_nnf(&parse_expression(src).unwrap())
    }

    #[test]
    fn negated_conjunction_of_graded_modalities() {
        let got = nnf("!(<r>1 p & [r]1 !p)");
        let want = NnfExpression::Or(
            Box::new(NnfExpression::Box(
                "r".into(),
                1,
                Box::new(NnfExpression::NegProp("p".into())),
            )),
            Box::new(NnfExpression::Diamond(
                "r".into(),
                1,
                Box::new(NnfExpression::Prop("p".into())),
            )),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn atoms_are_unchanged() {
        assert_eq!(nnf("p"), NnfExpression::Prop("p".into()));
        assert_eq!(nnf("!@x"), NnfExpression::NegNom("x".into()));
    }

    #[test]
    fn double_negation_vanishes() {
        let want = NnfExpression::Exists(0, Box::new(NnfExpression::Prop("p".into())));
        assert_eq!(nnf("!!E0 p"), want);
        assert_eq!(nnf("!A0 !p"), want);
    }
}
