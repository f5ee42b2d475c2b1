//! What the toy decoder does with a latent: Fourier coefficients in, a 2D
//! path out. Moving along one latent axis bends the path smoothly.

use prefsearch::decoder::ToyDecoder;
use prefsearch::priors::toy_embed_with_dim;

fn main() -> prefsearch::Result<()> {
    let d = 6;
    let c = toy_embed_with_dim("a person draws a figure eight", 16)?;
    let decoder = ToyDecoder::new(d, c.dim(), 0);

    let mut z = vec![0.0; d];
    z[0] = 1.0;
    let coeffs = decoder.coefficients(&z, c.as_slice())?;
    let [ax, ay] = coeffs.amplitudes();
    println!("harmonic  |x amplitude|  |y amplitude|");
    for h in 0..ax.len() {
        println!("{:>8}  {:>13.4}  {:>13.4}", h + 1, ax[h], ay[h]);
    }

    println!("\nshift along z[0]: mean squared displacement of the decoded path");
    let base = decoder.decode(&z, c.as_slice())?;
    for step in [0.05, 0.1, 0.2, 0.4, 0.8] {
        let mut moved = z.clone();
        moved[0] += step;
        let t = decoder.decode(&moved, c.as_slice())?;
        println!("{step:>5.2}  {:.6}", t.mean_squared_distance(&base)?);
    }
    Ok(())
}
