pub mod asymptotics;
pub mod deligne;
pub mod filtration;
pub mod io;
pub mod matrix;
pub mod mhs;
pub mod normal_functions;
pub mod orbits;
pub mod scalar;
pub mod splitting;
pub mod subspace;
pub mod weight;
