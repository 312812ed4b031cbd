//! Save a trained encoder stack, reload it and encode unseen points.

use std::io::BufReader;

use resample_kernel::data::generate_blobs;
use resample_kernel::encoder::{encode_stack, load_models, save_models, stack_layers_with_models, EncoderConfig};

fn main() -> resample_kernel::Result<()> {
    let train = generate_blobs(2, 25, 3, 6.0, 0.7, 1)?;
    let unseen = generate_blobs(2, 5, 3, 6.0, 0.7, 2)?;
    let config = EncoderConfig { units: 20, layers: 2, master_seed: 3, ..Default::default() };
    let (models, train_codes) = stack_layers_with_models(train.features().view(), &config)?;

    let path = std::env::temp_dir().join("resample_kernel_models.txt");
    save_models(&models, std::fs::File::create(&path)?)?;
    let reloaded = load_models(BufReader::new(std::fs::File::open(&path)?))?;
    println!("reloaded {} layers, identical: {}", reloaded.len(), reloaded == models);

    let again = encode_stack(&reloaded, train.features().view())?;
    println!("training codes reproduced: {}", again == train_codes);

    let codes = encode_stack(&reloaded, unseen.features().view())?;
    for (i, row) in codes.active().rows().into_iter().enumerate() {
        println!("unseen point {i}: first units {:?}", &row.to_vec()[..6]);
    }
    Ok(())
}
