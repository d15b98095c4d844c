pub mod catalog;
pub mod graph;
pub mod surgery;
pub mod partitions;
pub mod spectral;
pub mod optimize;

// The guide's listings run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    pub mod graphs {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    pub mod spectra {}
    #[doc = include_str!("../../../book/src/surgery.md")]
    pub mod surgery {}
    #[doc = include_str!("../../../book/src/energies.md")]
    pub mod energies {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub mod bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
