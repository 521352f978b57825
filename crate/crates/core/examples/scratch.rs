use patchbound::exact::{exact_low_spectrum, spectral_gap};
use patchbound::models::{build_model, ModelKind, ModelParams};

fn main() {
    for n in [8, 10, 12] {
        let m = build_model(ModelKind::TransverseIsing, n, ModelParams::default(), 0).unwrap();
        let gap = spectral_gap(&m).unwrap();
        let formula = 2.0 * (1.1 - 1.0) / (2.0 * (1.0f64 + 1.1 * 1.1).sqrt());
        println!("N={n}: gap = {gap:.6}, formula = {formula:.6}, ratio = {:.3}", gap / formula);
    }
    // also check low spectrum structure at N=12
    let m = build_model(ModelKind::TransverseIsing, 12, ModelParams::default(), 0).unwrap();
    let pairs = exact_low_spectrum(&m, 4).unwrap();
    for (i, (e, _)) in pairs.iter().enumerate() {
        println!("E{i} = {e:.8}");
    }
}
