//! Encode synthetic blobs with a small ensemble and inspect the codes.

use resample_kernel::data::generate_blobs;
use resample_kernel::encoder::{centroid_count, feature_count, stack_layers_with_models, EncoderConfig};

fn main() -> resample_kernel::Result<()> {
    let blobs = generate_blobs(3, 20, 4, 8.0, 0.5, 7)?;
    let config = EncoderConfig { units: 8, delta: 0.5, feature_fraction: 0.5, ..Default::default() };
    println!(
        "n = {}, d = {}: each unit keeps {} features and {} centroids",
        blobs.n(),
        blobs.d(),
        feature_count(blobs.d(), config.feature_fraction),
        centroid_count(blobs.n(), config.delta)
    );

    let (models, codes) = stack_layers_with_models(blobs.features().view(), &config)?;
    for (u, unit) in models[0].units.iter().enumerate().take(3) {
        println!("unit {u}: features {:?}, k = {}", unit.feature_indices, unit.k());
    }
    println!("code: {} points x {} dims, {} active per row", codes.n(), codes.total_dim(), codes.units());

    // Points of the same blob share centroids far more often than points of
    // different blobs.
    let labels = blobs.labels().expect("labeled");
    let (mut same, mut same_pairs, mut cross, mut cross_pairs) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..codes.n() {
        for j in i + 1..codes.n() {
            let shared = codes.active().row(i).iter().zip(codes.active().row(j)).filter(|(a, b)| a == b).count();
            if labels[i] == labels[j] {
                same += shared;
                same_pairs += 1;
            } else {
                cross += shared;
                cross_pairs += 1;
            }
        }
    }
    println!("mean shared units: same blob {:.3}, different blobs {:.3}", same as f64 / same_pairs as f64, cross as f64 / cross_pairs as f64);
    Ok(())
}
