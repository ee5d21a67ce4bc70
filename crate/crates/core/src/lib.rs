pub mod error;
pub mod limits;
pub mod words;
pub mod rotation;
pub mod sturmian;
pub mod seed;
pub mod coded;
pub mod tower;
pub mod spectrum;
pub mod artifact;
