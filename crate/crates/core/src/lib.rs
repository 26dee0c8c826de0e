pub mod camps;
pub mod clifford2;
pub mod dmrg;
pub mod error;
pub mod fcidump;
pub mod fci;
pub mod fermion;
pub mod linalg;
pub mod model;
pub mod mps_mpo;
pub mod pauli;
pub mod tensor;
