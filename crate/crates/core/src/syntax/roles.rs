use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::{Namespace, NnfExpression, Problem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("`{name}` is used both as a {first} and as a {second}")]
    NamespaceClash {
        name: String,
        first: Namespace,
        second: Namespace,
    },
    #[error("graded box `{expression}` on role `{role}`, which is not simple (grade must be 0)")]
    GradedBoxOnNonSimpleRole { role: String, expression: String },
}

/// Reflexive-transitive closure of the declared inclusions: maps every role
/// of the problem to the set of its super-roles (itself included).
pub fn sub_role_closure(p: &Problem) -> BTreeMap<String, BTreeSet<String>> {
    let mut sup: BTreeMap<String, BTreeSet<String>> = p
        .roles()
        .into_iter()
        .map(|r| (r.clone(), BTreeSet::from([r])))
        .collect();
    loop {
        let mut changed = false;
        for (r, s) in &p.inclusions {
            let above = sup[s].clone();
            for (_, set) in sup.iter_mut().filter(|(_, set)| set.contains(r)) {
                for t in &above {
                    changed |= set.insert(t.clone());
                }
            }
        }
        if !changed {
            return sup;
        }
    }
}

/// Roles without a transitive sub-role (including themselves).
pub fn simple_roles(p: &Problem) -> BTreeSet<String> {
    let closure = sub_role_closure(p);
    let mut simple: BTreeSet<String> = closure.keys().cloned().collect();
    for t in &p.transitive {
        for s in &closure[t] {
            simple.remove(s);
        }
    }
    simple
}

pub(super) fn validate(p: &Problem) -> Result<(), ValidationError> {
    let mut seen: HashMap<&str, Namespace> = HashMap::new();
    for (name, ns) in p.name_occurrences() {
        let first = *seen.entry(name).or_insert(ns);
        if first != ns {
            return Err(ValidationError::NamespaceClash {
                name: name.to_string(),
                first,
                second: ns,
            });
        }
    }
    let simple = simple_roles(p);
    for (e, _) in &p.labels {
        for sub in e.subexpressions() {
            if let NnfExpression::Box(r, n, _) = sub {
                if *n > 0 && !simple.contains(r) {
                    return Err(ValidationError::GradedBoxOnNonSimpleRole {
                        role: r.clone(),
                        expression: sub.to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(inclusions: &[(&str, &str)], transitive: &[&str], roles: &[&str]) -> Problem {
        let mut p = Problem::default();
        for r in roles {
            p.edges.push((r.to_string(), "x".into(), "x".into()));
        }
        p.inclusions = inclusions
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        p.transitive = transitive.iter().map(|s| s.to_string()).collect();
        p
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn unconstrained_role_is_simple() {
        assert_eq!(simple_roles(&problem(&[], &[], &["r"])), set(&["r"]));
    }

    #[test]
    fn transitive_subrole_makes_super_non_simple() {
        assert_eq!(simple_roles(&problem(&[("r", "s")], &["r"], &[])), set(&[]));
    }

    #[test]
    fn transitive_super_leaves_sub_simple() {
        assert_eq!(simple_roles(&problem(&[("r", "s")], &["s"], &[])), set(&["r"]));
    }

    #[test]
    fn closure_is_transitive() {
        let c = sub_role_closure(&problem(&[("a", "b"), ("b", "c")], &[], &[]));
        assert_eq!(c["a"], set(&["a", "b", "c"]));
        assert_eq!(c["c"], set(&["c"]));
    }

    #[test]
    fn error_names_box_and_role() {
        let mut p = problem(&[("r", "s")], &["r"], &[]);
        p.labels.push((
            NnfExpression::Box("s".into(), 1, Box::new(NnfExpression::Prop("p".into()))),
            "x".into(),
        ));
        let err = p.validate().unwrap_err();
        assert_eq!(
            err,
            ValidationError::GradedBoxOnNonSimpleRole {
                role: "s".into(),
                expression: "[s]1 p".into()
            }
        );
    }
}
