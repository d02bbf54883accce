//! Base correlators and double-bracket generating functions.

mod bracket;
mod key;
mod point;
mod table;

pub use bracket::{resum, Backend, Insertion, Resummed, TauVector, MAX_RESUM_TERMS};
pub use key::{factorial, CorrelatorKey, CycleType, Slot};
pub use point::PointBackend;
pub use table::{
    bundled_point_table, fixture_genus_constant, fixture_point_table, fixture_value, sha256_hex, validate_table, CorrelatorTable,
    FixtureBounds, TableValue, ValidationReport, Violation, BUNDLED_POINT_NAME, BUNDLED_POINT_TABLE, FIXTURE_PROVENANCE, TABLE_SCHEMA,
};
