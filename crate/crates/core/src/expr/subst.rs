use std::collections::BTreeSet;

use super::{Expr, Ident};

/// Capture-avoiding substitution of `replacement` for the free occurrences
/// of `name` in `e`.
///
/// A binder is renamed only when it would capture a free variable of
/// `replacement`. The new name appends `'` and then, if that collides, `'2`,
/// `'3`, ... to the original binder name.
pub fn substitute(e: &Expr, name: &Ident, replacement: &Expr) -> Expr {
    let fv = replacement.free_vars();
    subst(e, name, replacement, &fv)
}

fn subst(e: &Expr, name: &Ident, r: &Expr, fv_r: &BTreeSet<Ident>) -> Expr {
    if !e.has_free(name) {
        return e.clone();
    }
    match e {
        Expr::Var(_) => r.clone(),
        Expr::Lam(p, body) => {
            let (p, body) = rebind(p, body, None, name, fv_r);
            Expr::Lam(p, Box::new(subst(&body, name, r, fv_r)))
        }
        Expr::App(f, a) => Expr::App(
            Box::new(subst(f, name, r, fv_r)),
            Box::new(subst(a, name, r, fv_r)),
        ),
        Expr::Let(n, bound, body) => {
            let bound = subst(bound, name, r, fv_r);
            if n == name || !body.has_free(name) {
                return Expr::Let(n.clone(), Box::new(bound), body.clone());
            }
            let (n, body) = rebind(n, body, None, name, fv_r);
            Expr::Let(n, Box::new(bound), Box::new(subst(&body, name, r, fv_r)))
        }
        Expr::LetRec(n, bound, body) => {
            let (n, body, bound) = {
                let (n2, body2) = rebind(n, body, Some(bound), name, fv_r);
                let bound2 = if &n2 == n {
                    (**bound).clone()
                } else {
                    rename(bound, n, &n2)
                };
                (n2, body2, bound2)
            };
            Expr::LetRec(
                n,
                Box::new(subst(&bound, name, r, fv_r)),
                Box::new(subst(&body, name, r, fv_r)),
            )
        }
        Expr::If(c, t, f) => Expr::If(
            Box::new(subst(c, name, r, fv_r)),
            Box::new(subst(t, name, r, fv_r)),
            Box::new(subst(f, name, r, fv_r)),
        ),
        Expr::ListLit(items) => {
            Expr::ListLit(items.iter().map(|i| subst(i, name, r, fv_r)).collect())
        }
        Expr::LitInt(_)
        | Expr::LitFloat(_)
        | Expr::LitBool(_)
        | Expr::LitStr(_)
        | Expr::LitUnit => e.clone(),
    }
}

/// Renames binder `b` (scoping over `body`, and `also` for letrec) when it
/// would capture a free variable of the replacement.
fn rebind(
    b: &Ident,
    body: &Expr,
    also: Option<&Expr>,
    name: &Ident,
    fv_r: &BTreeSet<Ident>,
) -> (Ident, Expr) {
    if !fv_r.contains(b) {
        return (b.clone(), body.clone());
    }
    let mut avoid = fv_r.clone();
    avoid.extend(body.free_vars());
    if let Some(extra) = also {
        avoid.extend(extra.free_vars());
    }
    avoid.insert(name.clone());
    let fresh = fresh_name(b, &avoid);
    let body = rename(body, b, &fresh);
    (fresh, body)
}

fn rename(e: &Expr, from: &Ident, to: &Ident) -> Expr {
    let to_var = Expr::Var(to.clone());
    let mut fv = BTreeSet::new();
    fv.insert(to.clone());
    subst(e, from, &to_var, &fv)
}

fn fresh_name(base: &Ident, avoid: &BTreeSet<Ident>) -> Ident {
    (1u64..)
        .map(|n| {
            let candidate = if n == 1 {
                format!("{base}'")
            } else {
                format!("{base}'{n}")
            };
            Ident::new(&candidate).expect("primed identifier stays valid")
        })
        .find(|c| !avoid.contains(c))
        .expect("unbounded candidate sequence")
}
