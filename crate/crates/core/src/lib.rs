//! Elementary first integrals of rational second-order ODEs `y'' = M/N`
//! from Darboux polynomials.

pub mod cli;
pub mod darboux;
pub mod integrate;
pub mod io;
pub mod linalg;
pub mod ode;
pub mod poly;
pub mod ps_solver;
