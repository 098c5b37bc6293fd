pub mod barcode;
pub mod ext;
pub mod field;
pub mod harness;
pub mod homology;
pub mod module;
pub mod persistence;
pub mod poset;
pub mod reduction;
pub mod simplicial;

pub use ext::ExtNat;
pub use field::{FieldMatrix, Prime};
pub use module::PersistenceModule;
