pub mod config;
pub mod estimate;
pub mod etas;
pub mod expr;
pub mod family;
pub mod jet;
pub mod montecarlo;
pub mod normal;
pub mod quad;
pub mod roots;
