//! Codebook presets, beam gains, and TRN training lengths.
//!
//! ```bash
//! cargo run --example codebooks
//! ```

use bisense::phy::{
    array_gain, steering_vector, training_length, Codebook, TrnConfig, TrnMode, HALF_WAVELENGTH,
};

fn main() -> bisense::Result<()> {
    let books = [
        Codebook::preset_2x2(),
        Codebook::preset_2x8(),
        Codebook::preset_8x8(),
    ];
    let rx = TrnConfig::with_mode(TrnMode::RxTraining);
    let tx = TrnConfig::with_mode(TrnMode::TxTraining);

    println!(
        "{:<6} {:>10} {:>12} {:>12} {:>12}",
        "book", "directions", "peak gain", "TRN-R units", "TRN-T units"
    );
    for book in &books {
        let (az, el) = book.directions()[book.n_directions() / 2];
        let awv = steering_vector(book.n_rows, book.n_cols, az, el, HALF_WAVELENGTH)?;
        let peak = array_gain(&awv, az, el)?.norm_sqr();
        println!(
            "{:<6} {:>10} {:>9.1} dB {:>12} {:>12}",
            book.name,
            book.n_directions(),
            10.0 * peak.log10(),
            training_length(book, &rx),
            training_length(book, &tx),
        );
    }

    // Codebooks are plain TOML; ship one to disk and read it back.
    let out = std::path::Path::new("examples_out/codebooks");
    std::fs::create_dir_all(out)?;
    let path = out.join("custom.toml");
    let mut custom = Codebook::preset_2x2();
    custom.name = "custom".into();
    custom.azimuths = vec![300.0, 315.0, 330.0, 345.0];
    std::fs::write(&path, custom.to_toml_string()?)?;
    let loaded = Codebook::load(&path)?;
    println!(
        "wrote and reloaded {} ({} directions)",
        path.display(),
        loaded.n_directions()
    );
    Ok(())
}
