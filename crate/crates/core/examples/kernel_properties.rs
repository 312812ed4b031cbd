//! Build the resample kernel and the RBF baseline on the same data and check
//! the basic properties of each.

use resample_kernel::data::generate_blobs;
use resample_kernel::encoder::{stack_layers, EncoderConfig};
use resample_kernel::kernel::{build_rbf_kernel, build_resample_kernel, normalize_kernel, RbfParams};
use resample_kernel::spectral::eigen::min_eigenvalue;

fn main() -> resample_kernel::Result<()> {
    let ds = generate_blobs(2, 30, 3, 6.0, 1.0, 3)?;
    let x = ds.features().view();
    let v = 40;
    let codes = stack_layers(x, &EncoderConfig { units: v, master_seed: 11, ..Default::default() })?;
    let k = build_resample_kernel(&codes);
    let values = k.values();

    let symmetric = (0..k.n()).all(|i| (0..k.n()).all(|j| values[[i, j]] == values[[j, i]]));
    let diagonal = (0..k.n()).all(|i| values[[i, i]] == v as f64);
    println!("resample kernel: symmetric {symmetric}, diagonal = V {diagonal}");
    println!("  min eigenvalue {:.3e}", min_eigenvalue(values.view())?);
    let labels = ds.labels().expect("labeled");
    let mean_by = |same: bool| {
        let mut sum = 0.0;
        let mut count = 0;
        for i in 0..k.n() {
            for j in 0..k.n() {
                if i != j && (labels[i] == labels[j]) == same {
                    sum += values[[i, j]];
                    count += 1;
                }
            }
        }
        sum / count as f64
    };
    println!("  mean off-diagonal entry: same blob {:.3}, different blobs {:.3}", mean_by(true), mean_by(false));

    let normalized = normalize_kernel(&k)?;
    println!("  normalized diagonal {}", normalized.values()[[0, 0]]);

    let params = RbfParams::from_data(x, 1.0)?;
    let rbf = build_rbf_kernel(x, &params)?;
    println!(
        "rbf kernel: mean pairwise distance A = {:.3}, sigma = {:.3}, K(0,1) = {:.3}, K(0,59) = {:.3}",
        params.mean_distance,
        params.sigma,
        rbf.values()[[0, 1]],
        rbf.values()[[0, 59]]
    );
    Ok(())
}
