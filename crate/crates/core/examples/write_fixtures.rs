//! Regenerates the state files under `fixtures/`.

use std::fs;
use std::path::Path;

use sepcrit::states::fixtures;
use sepcrit::states::io::write_state;

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    fs::create_dir_all(&dir)?;
    for (name, rho) in fixtures::all() {
        fs::write(dir.join(format!("{name}.json")), write_state(&rho) + "\n")?;
    }
    Ok(())
}
