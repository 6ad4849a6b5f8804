pub mod exactnum;
pub mod quadfield;
pub mod curve;
pub mod family;
pub mod localred;
pub mod survey;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exactnum.md")]
    mod exactnum {}
    #[doc = include_str!("../../../book/src/quadfield.md")]
    mod quadfield {}
    #[doc = include_str!("../../../book/src/curve.md")]
    mod curve {}
    #[doc = include_str!("../../../book/src/family.md")]
    mod family {}
    #[doc = include_str!("../../../book/src/localred.md")]
    mod localred {}
    #[doc = include_str!("../../../book/src/survey.md")]
    mod survey {}
}
