//! Totality of the samples-CSV parser, plus its round-trip invariant:
//! whatever the parser accepts must re-serialize and re-parse to
//! bit-identical values.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(samples) = lossywave::report::parse_samples_csv(text) {
            let csv = lossywave::report::samples_csv(&samples);
            let again = lossywave::report::parse_samples_csv(&csv)
                .expect("serialized samples must re-parse");
            assert_eq!(samples.len(), again.len());
            for (a, b) in samples.iter().zip(&again) {
                assert_eq!(a.frequency.to_bits(), b.frequency.to_bits());
                assert_eq!(a.omega.to_bits(), b.omega.to_bits());
                assert_eq!(a.x1.to_bits(), b.x1.to_bits());
                assert_eq!(a.x2.to_bits(), b.x2.to_bits());
                assert_eq!(a.amplitude_ratio.to_bits(), b.amplitude_ratio.to_bits());
                assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
            }
        }
    }
});
