//! Regenerates the bundled point-target table: `cargo run --example regen_table`.

use qkrec_core::correlators::{fixture_point_table, FixtureBounds};

fn main() {
    let table = fixture_point_table(FixtureBounds::default());
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/point_table.json");
    std::fs::write(path, table.to_json()).expect("write bundled table");
    println!("{} entries -> {path}", table.len());
}
