//! Run one named preset and write its CSV to a directory.
//!
//! cargo run --release --example run_preset -- fig4a out/

use std::io::Write;
use std::path::PathBuf;

use becfano::io::{create_output, write_grid_csv, write_spectrum_csv};
use becfano::sweep::{preset, PresetOutput};

fn main() -> becfano::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig7".into());
    let dir = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    std::fs::create_dir_all(&dir)?;

    let p = preset(&name)?;
    println!("{name}: {}", p.description);
    let path = dir.join(format!("{name}.csv"));
    let mut w = create_output(&path, true)?;
    let prov = match p.run()? {
        PresetOutput::Spectra(set) => {
            write_spectrum_csv(&mut w, &set)?;
            set.provenance
        }
        PresetOutput::Grid(r) => {
            write_grid_csv(&mut w, &r)?;
            r.provenance
        }
    };
    w.flush()?;
    println!(
        "{} points, {} unstable, {} empty -> {}",
        prov.points,
        prov.unstable_points,
        prov.empty_cells,
        path.display()
    );
    Ok(())
}
