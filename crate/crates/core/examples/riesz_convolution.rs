//! Riesz convolution by FFT and directly, and the HLS ratio.

use std::time::Instant;

use choquard_lattice::lattice::LatticeBox;
use choquard_lattice::operators::{sample_hls_pair, ConvolutionMethod, GreenConvolver};
use choquard_lattice::spectral::compute_green_table;
use choquard_lattice::verify::nonnegative_field;

fn main() -> choquard_lattice::Result<()> {
    let lattice = LatticeBox::new(2, 16)?;
    let conv = GreenConvolver::new(lattice, compute_green_table(2, 1.0, 16, 256)?)?;
    let g = nonnegative_field(lattice, 7);
    for method in [ConvolutionMethod::Direct, ConvolutionMethod::Fft] {
        let t = Instant::now();
        let r = conv.convolve(&g, method)?;
        println!("{method:?}: sup = {:.10}, {:.2} ms", r.sup_norm(), 1e3 * t.elapsed().as_secs_f64());
    }
    println!("relative discrepancy {:e}", conv.method_discrepancy(&g)?);
    let hls = sample_hls_pair(&conv, 200, 3)?;
    println!("HLS ratio over {} bump pairs: max {:.6}, mean {:.6}", hls.samples, hls.max_ratio, hls.mean_ratio);
    Ok(())
}
