pub mod corollary;
pub mod divisor;
pub mod gamma;
pub mod lambda;
pub mod lemma2;
