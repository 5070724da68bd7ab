//! Guide listings. Each module includes one chapter of the guide so that its
//! code blocks run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/matrices.md")]
pub mod matrices {}

#[doc = include_str!("../../../book/src/players.md")]
pub mod players {}

#[doc = include_str!("../../../book/src/self-games.md")]
pub mod self_games {}

#[doc = include_str!("../../../book/src/baselines.md")]
pub mod baselines {}

#[doc = include_str!("../../../book/src/eigengame.md")]
pub mod eigengame {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
