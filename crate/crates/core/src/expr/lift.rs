use thiserror::Error;

use super::{Expr, FiniteF64};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("value cannot be lifted into a literal: {0}")]
pub struct UnliftableValue(pub String);

/// Host values that can be spliced into a quotation as literals.
pub trait Lift {
    fn lift(&self) -> Result<Expr, UnliftableValue>;
}

/// Turns a host value into the equivalent literal expression.
pub fn lift<T: Lift + ?Sized>(v: &T) -> Result<Expr, UnliftableValue> {
    v.lift()
}

impl Lift for i64 {
    fn lift(&self) -> Result<Expr, UnliftableValue> {
        Ok(Expr::LitInt(*self))
    }
}

impl Lift for i32 {
    fn lift(&self) -> Result<Expr, UnliftableValue> {
        Ok(Expr::LitInt(i64::from(*self)))
    }
}

impl Lift for f64 {
    fn lift(&self) -> Result<Expr, UnliftableValue> {
        FiniteF64::new(*self)
            .map(Expr::LitFloat)
            .map_err(|_| UnliftableValue(format!("non-finite float {self}")))
    }
}

impl Lift for bool {
    fn lift(&self) -> Result<Expr, UnliftableValue> {
        Ok(Expr::LitBool(*self))
    }
}

impl Lift for str {
    fn lift(&self) -> Result<Expr, UnliftableValue> {
        Ok(Expr::LitStr(self.to_string()))
    }
}

impl Lift for String {
    fn lift(&self) -> Result<Expr, UnliftableValue> {
        Ok(Expr::LitStr(self.clone()))
    }
}

impl Lift for () {
    fn lift(&self) -> Result<Expr, UnliftableValue> {
        Ok(Expr::LitUnit)
    }
}

impl<T: Lift> Lift for [T] {
    fn lift(&self) -> Result<Expr, UnliftableValue> {
        self.iter().map(Lift::lift).collect::<Result<_, _>>().map(Expr::ListLit)
    }
}

impl<T: Lift> Lift for Vec<T> {
    fn lift(&self) -> Result<Expr, UnliftableValue> {
        self.as_slice().lift()
    }
}

impl<T: Lift + ?Sized> Lift for &T {
    fn lift(&self) -> Result<Expr, UnliftableValue> {
        (**self).lift()
    }
}
