use std::time::Instant;
fn main() {
    for n in [1024usize, 2048] {
        let s = epmp_core::Spectrum::gapped(n, 10.0, 5.0, 1).unwrap();
        let t = Instant::now();
        let a = epmp_core::generate_planted(n, &s, 2).unwrap();
        println!("n={n}: {:.2}s (asym {})", t.elapsed().as_secs_f64(), a.max_asymmetry());
    }
}
