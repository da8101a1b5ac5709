//! Zig-zag persistence modules as constructible cosheaves on a stratified real line.
//!
//! The crate is organized around a small exact linear algebra kernel and a
//! handful of geometric/algebraic layers on top of it:
//!
//! * [`exactlin`] — matrices over a prime field or the rationals, ranks,
//!   kernels, and limits/colimits of finite diagrams of vector spaces.
//! * [`stratline`] — the real line stratified by finitely many points, its
//!   strata indexing, entrance-path poset, and stratified maps (including the
//!   collapse map from an index line onto a coarser value line).
//! * [`simplicial`] — simplicial complexes, monotone and index filtrations,
//!   homology with induced maps, and augmented ranks counting instantaneous
//!   events.
//! * [`cosheaf`] — the [`cosheaf::ZZModule`] data structure (a constructible
//!   cosheaf on a stratified line), constructions from poset representations
//!   and filtrations, pushforward along stratified maps, and weak-equivalence
//!   normal forms.
//! * [`barcode_k`] — interval decomposition, persistence diagrams, virtual
//!   diagrams, K₀ classes, Euler curves, and injective set-valued modules.
//! * [`reduction`] — a self-contained persistence column-reduction routine
//!   used as an independent cross-check for monotone filtrations.
//! * [`cli`] — the `zzco` command-line front end.
//!
//! Everything is exact: no floating point appears anywhere in the crate.

pub mod barcode_k;
pub mod check;
pub mod cli;
pub mod cosheaf;
pub mod exactlin;
pub mod rational;
pub mod reduction;
pub mod sampling;
pub mod simplicial;
pub mod stratline;
pub mod svg;
