//! Processing-time variants and fleet rules for TSPLIB-derived instances.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `seed_from_u64`, so generated instances are reproducible across platforms.
//! Base processing times are drawn from a stream seeded with the variant seed
//! alone; multiplier streams mix in the replicate index and the variant kind.
//! Every kind built from the same seed therefore shares its base draws.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FleetConfig, Instance, InstanceError, RawTsplib};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VariantKind {
    Base,
    Double,
    Quintuple,
    Random10,
    Random20,
}

impl VariantKind {
    pub const ALL: [VariantKind; 5] = [
        VariantKind::Base,
        VariantKind::Double,
        VariantKind::Quintuple,
        VariantKind::Random10,
        VariantKind::Random20,
    ];

    /// Whether each replicate draws fresh multipliers.
    pub fn is_stochastic(self) -> bool {
        matches!(self, VariantKind::Random10 | VariantKind::Random20)
    }

    fn stream_tag(self) -> u64 {
        match self {
            VariantKind::Base => 0,
            VariantKind::Double => 2,
            VariantKind::Quintuple => 5,
            VariantKind::Random10 => 10,
            VariantKind::Random20 => 20,
        }
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VariantKind::Base => "base",
            VariantKind::Double => "2x",
            VariantKind::Quintuple => "5x",
            VariantKind::Random10 => "1R10",
            VariantKind::Random20 => "1R20",
        })
    }
}

impl FromStr for VariantKind {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "base" => Ok(VariantKind::Base),
            "2x" => Ok(VariantKind::Double),
            "5x" => Ok(VariantKind::Quintuple),
            "1r10" => Ok(VariantKind::Random10),
            "1r20" => Ok(VariantKind::Random20),
            _ => Err(InstanceError::UnknownVariant(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantSpec {
    pub kind: VariantKind,
    pub seed: u64,
    /// Replicate index for the stochastic kinds; ignored by the others.
    #[serde(default)]
    pub replicate: u32,
}

impl VariantSpec {
    pub fn new(kind: VariantKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            replicate: 0,
        }
    }

    pub fn with_replicate(mut self, replicate: u32) -> Self {
        self.replicate = replicate;
        self
    }
}

/// SplitMix64 finalizer over `seed` and a stream index.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fleet rule keyed on the customer count.
pub fn fleet_for(n: usize) -> FleetConfig {
    if n < 24 {
        FleetConfig { m: 3, k: 5 }
    } else {
        FleetConfig { m: 6, k: 4 }
    }
}

/// Builds an instance with depot at location 0 and processing times per `variant`.
pub fn build_instance(raw: &RawTsplib, variant: VariantSpec) -> Result<Instance, InstanceError> {
    let dim = raw.edge_weights.size();
    if dim < 2 {
        return Err(InstanceError::TooSmall(dim));
    }
    let n = dim - 1;
    let (d_min, d_max) = raw.edge_weights.off_diagonal_range();
    let integral = raw.edge_weights.is_integral();

    let mut base_rng = ChaCha8Rng::seed_from_u64(variant.seed);
    let base: Vec<f64> = (0..n)
        .map(|_| {
            if integral {
                base_rng.gen_range(d_min as i64..=d_max as i64) as f64
            } else if d_max > d_min {
                base_rng.gen_range(d_min..=d_max)
            } else {
                d_min
            }
        })
        .collect();

    let mult_seed = derive_seed(
        derive_seed(variant.seed, u64::from(variant.replicate)),
        variant.kind.stream_tag(),
    );
    let mut mult_rng = ChaCha8Rng::seed_from_u64(mult_seed);
    let processing: Vec<f64> = base
        .iter()
        .map(|&b| match variant.kind {
            VariantKind::Base => b,
            VariantKind::Double => 2.0 * b,
            VariantKind::Quintuple => 5.0 * b,
            VariantKind::Random10 => b * mult_rng.gen_range(1..=10) as f64,
            VariantKind::Random20 => b * mult_rng.gen_range(1..=20) as f64,
        })
        .collect();

    let label = if variant.kind.is_stochastic() {
        format!("{}-{}-s{}-r{}", raw.name, variant.kind, variant.seed, variant.replicate)
    } else {
        format!("{}-{}-s{}", raw.name, variant.kind, variant.seed)
    };
    let mut inst = Instance::new(label, raw.edge_weights.clone(), processing, fleet_for(n))?;
    inst.variant = Some(variant);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_tsplib;

    fn raw() -> RawTsplib {
        let text = "NAME: small\nTYPE: TSP\nDIMENSION: 5\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 10 0\n3 0 20\n4 30 40\n5 7 9\nEOF\n";
        parse_tsplib(text).unwrap()
    }

    #[test]
    fn fleet_rule() {
        assert_eq!(fleet_for(16), FleetConfig { m: 3, k: 5 });
        assert_eq!(fleet_for(23), FleetConfig { m: 3, k: 5 });
        assert_eq!(fleet_for(24), FleetConfig { m: 6, k: 4 });
        assert_eq!(fleet_for(1000), FleetConfig { m: 6, k: 4 });
    }

    #[test]
    fn variants_share_base_draws() {
        let raw = raw();
        let base = build_instance(&raw, VariantSpec::new(VariantKind::Base, 7)).unwrap();
        let x2 = build_instance(&raw, VariantSpec::new(VariantKind::Double, 7)).unwrap();
        let x5 = build_instance(&raw, VariantSpec::new(VariantKind::Quintuple, 7)).unwrap();
        let r20 = build_instance(&raw, VariantSpec::new(VariantKind::Random20, 7)).unwrap();
        let (lo, hi) = raw.edge_weights.off_diagonal_range();
        for c in base.customers() {
            assert!(base.p(c) >= lo && base.p(c) <= hi);
            assert_eq!(x2.p(c), 2.0 * base.p(c));
            assert_eq!(x5.p(c), 5.0 * base.p(c));
            let ratio = r20.p(c) / base.p(c);
            assert_eq!(ratio.fract(), 0.0);
            assert!((1.0..=20.0).contains(&ratio));
        }
    }

    #[test]
    fn replicates_differ_only_in_multipliers() {
        let raw = raw();
        let a = build_instance(&raw, VariantSpec::new(VariantKind::Random10, 3)).unwrap();
        let b = build_instance(&raw, VariantSpec::new(VariantKind::Random10, 3).with_replicate(1)).unwrap();
        let again = build_instance(&raw, VariantSpec::new(VariantKind::Random10, 3)).unwrap();
        assert_eq!(a, again);
        assert_ne!(a.label, b.label);
    }

    #[test]
    fn parse_variant_names() {
        for kind in VariantKind::ALL {
            assert_eq!(kind.to_string().parse::<VariantKind>().unwrap(), kind);
        }
        assert_eq!("1r20".parse::<VariantKind>().unwrap(), VariantKind::Random20);
        assert!("3x".parse::<VariantKind>().is_err());
    }

    #[test]
    fn too_small() {
        let raw = RawTsplib {
            name: "one".into(),
            dimension: 1,
            edge_weights: crate::instance::DistMatrix::zeros(1),
        };
        assert!(matches!(
            build_instance(&raw, VariantSpec::new(VariantKind::Base, 0)),
            Err(InstanceError::TooSmall(1))
        ));
    }
}
