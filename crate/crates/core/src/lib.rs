pub mod bisim;
pub mod models;
pub mod proof;
pub mod semantics;
pub mod syntax;
pub mod transform;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    pub mod formulas {}
    #[doc = include_str!("../../../book/src/models.md")]
    pub mod models {}
    #[doc = include_str!("../../../book/src/semantics.md")]
    pub mod semantics {}
    #[doc = include_str!("../../../book/src/transforms.md")]
    pub mod transforms {}
    #[doc = include_str!("../../../book/src/bisimulation.md")]
    pub mod bisimulation {}
    #[doc = include_str!("../../../book/src/proofs.md")]
    pub mod proofs {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
