#![no_main]

use coulomb_glue_core::constructions::{Partition, PunctureData};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = Partition::parse(text) {
        assert_eq!(p.parts().iter().sum::<usize>(), p.n());
    }
    if let Ok(h) = PunctureData::parse(text) {
        assert!(h.parts().windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(h.leg_dims().len() + 1, h.parts().len());
    }
});
