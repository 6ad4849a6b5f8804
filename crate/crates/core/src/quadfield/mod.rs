//! Real (and imaginary) quadratic fields `Q(√d)`: elements, primes, local
//! valuations and residue fields.

mod number;
mod prime;
mod residue;

use thiserror::Error;

use crate::exactnum::Integer;

pub use number::{qf_arith, ArithOp, QuadNum, QuadraticField};
pub use prime::{primes_above, Branch, KPrime, PrimeKind};
pub use residue::{count_distinct_roots, roots, ResidueElem, ResidueField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a valid field discriminant radicand (need squarefree, not 0 or 1)")]
    BadRadicand(Integer),
    #[error("elements belong to different fields: Q(√{0}) vs Q(√{1})")]
    FieldMismatch(Integer, Integer),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(Integer),
    #[error("element is not integral at the prime (valuation {0})")]
    NegativeValuation(i64),
}
