pub mod arith;
pub mod certify;
pub mod linsolve;
pub mod operator;
pub mod telescope;
pub mod term;
pub mod identity;
pub mod dsl;
pub mod certfile;
