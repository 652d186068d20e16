//! Intervals where the coherence of an equal superposition grows, as a
//! function of the bias.

use spinboson::dynamics::recoherence_mask;
use spinboson::model::SystemParams;

fn main() -> spinboson::Result<()> {
    let p = SystemParams::from_ratios(0.0, 10.0, 0.01)?;
    let times: Vec<f64> = (0..=2000).map(|k| k as f64 * 1e-3).collect();
    let ratios: Vec<f64> = (0..=10).map(|i| 0.05 * i as f64).collect();
    let map = recoherence_mask(&p, &times, &ratios)?;
    for (i, ratio) in ratios.iter().enumerate() {
        let intervals: Vec<String> = map
            .intervals(i)
            .iter()
            .map(|(a, b)| format!("[{a:.3}, {b:.3}]"))
            .collect();
        println!(
            "eps/Delta = {ratio:.2}: {}",
            if intervals.is_empty() {
                "none".into()
            } else {
                intervals.join(" ")
            }
        );
    }
    Ok(())
}
