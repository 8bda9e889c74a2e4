pub mod golden;
pub mod edgeworth;
pub mod mle;
pub mod moments;
pub mod numeric;
pub mod symbolic;
