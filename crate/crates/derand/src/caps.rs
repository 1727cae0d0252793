//! Enumeration caps.
//!
//! Constructors and audits that enumerate a space first bound the amount of
//! work and refuse (`Error::TooLarge`) when the bound exceeds the active cap.
//! Caps are deliberate: the crate targets desk-scale instances where
//! exhaustive checking is the point, and a silent week-long loop is a bug.
//!
//! The environment variable `DERAND_CAPS` overrides the defaults, e.g.
//! `DERAND_CAPS=field_enum=2097152,enumerate=500000000`. Unknown keys are
//! ignored so scripts stay forward-compatible.

/// Active work bounds. `field_enum` caps field sizes `q = p^m` (and other
/// single-domain enumerations); `enumerate` caps generic work counts such as
/// codeword enumeration, verification combinations, and joint audit domains.
#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub field_enum: u128,
    pub enumerate: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { field_enum: 1 << 20, enumerate: 100_000_000 }
    }
}

/// Read the caps in force, applying any `DERAND_CAPS` overrides.
pub fn current() -> Caps {
    let mut caps = Caps::default();
    if let Ok(spec) = std::env::var("DERAND_CAPS") {
        for part in spec.split(',') {
            let Some((key, value)) = part.split_once('=') else { continue };
            let Ok(n) = value.trim().parse::<u128>() else { continue };
            match key.trim() {
                "field_enum" | "field" => caps.field_enum = n,
                "enumerate" | "work" => caps.enumerate = n,
                _ => {}
            }
        }
    }
    caps
}
