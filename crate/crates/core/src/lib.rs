pub mod exec;
pub mod flow;
pub mod generate;
pub mod homotopy;
pub mod linalg;
pub mod morse;
pub mod named;
pub mod poly;
pub mod projective;
pub mod regions;
