#![no_main]

use libfuzzer_sys::fuzz_target;
use wsms_crb_cli::sweep::sweep_base;
use wsms_crb_cli::{Axis, ConfigMap, SweepSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = text.trim().parse::<Axis>();
    let Ok(map) = ConfigMap::parse(text) else { return };
    let Ok(spec) = SweepSpec::from_map(&map) else { return };
    // large step counts are legal but not worth materialising here
    if spec.steps <= 10_000 {
        let v = spec.values();
        assert_eq!(v.len(), spec.steps);
        assert_eq!(*v.last().unwrap(), spec.stop);
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }
    let _ = sweep_base(&map, &spec);
});
