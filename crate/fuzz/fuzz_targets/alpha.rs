#![no_main]

use libfuzzer_sys::fuzz_target;
use wsms_crb_cli::config::parse_alpha;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(z) = parse_alpha(s) {
        assert!(z.re.is_finite() && z.im.is_finite());
    }
});
