pub mod demo;
pub mod entropy;
pub mod export;
pub mod odometer;
pub mod rees;
pub mod tower;
