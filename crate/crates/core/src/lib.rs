pub mod error;
pub mod geometry;
pub mod gf;
pub mod linalg;
pub mod gq;
pub mod models;
pub mod cover;
pub mod search;
pub mod redei;
pub mod transport;
pub mod census;
pub mod pipeline;
pub mod manifest;
