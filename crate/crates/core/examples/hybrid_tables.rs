//! Writes the model-generated hybrid-fiber dispersion tables to
//! `crates/core/data/`.

use std::path::Path;

use topdc_core::materials::MaterialDatabase;
use topdc_core::platform::hybrid_model;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let db = MaterialDatabase::embedded();
    let (pump, ir) = hybrid_model::tables(&db)?;
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::write(dir.join("hybrid_pump.csv"), pump.to_csv())?;
    std::fs::write(dir.join("hybrid_ir.csv"), ir.to_csv())?;
    println!("pump radius {:e} m", hybrid_model::pump_radius(&db)?);
    Ok(())
}
