//! Seven-gene normalized genome and its decoding into model parameters.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neuron::{Density, ModelParams};
use crate::topology::{
    ModelKind, CA_RADIUS_MAX, CA_RADIUS_MIN, NETWORK_DENSITY_MAX, NETWORK_DENSITY_MIN,
};

pub const GENE_COUNT: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gene {
    Leak = 0,
    Integration = 1,
    Refractory = 2,
    Threshold = 3,
    SpontProb = 4,
    InhibRatio = 5,
    Density = 6,
}

impl Gene {
    pub const ALL: [Gene; GENE_COUNT] = [
        Gene::Leak,
        Gene::Integration,
        Gene::Refractory,
        Gene::Threshold,
        Gene::SpontProb,
        Gene::InhibRatio,
        Gene::Density,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Gene::Leak => "leak",
            Gene::Integration => "integration",
            Gene::Refractory => "refractory",
            Gene::Threshold => "threshold",
            Gene::SpontProb => "spont_prob",
            Gene::InhibRatio => "inhib_ratio",
            Gene::Density => "density",
        }
    }
}

/// Normalized genes in `[0, 1]`, ordered as [`Gene::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Genome([f64; GENE_COUNT]);

impl Genome {
    pub fn new(genes: [f64; GENE_COUNT]) -> Result<Self> {
        for (i, g) in genes.iter().enumerate() {
            if !(0.0..=1.0).contains(g) {
                return Err(Error::validation(format!(
                    "gene {} ({}) must lie in [0, 1], got {g}",
                    i,
                    Gene::ALL[i].name()
                )));
            }
        }
        Ok(Genome(genes))
    }

    pub fn splat(value: f64) -> Result<Self> {
        Genome::new([value; GENE_COUNT])
    }

    pub fn genes(&self) -> &[f64; GENE_COUNT] {
        &self.0
    }

    pub fn gene(&self, gene: Gene) -> f64 {
        self.0[gene as usize]
    }

    /// Seven independent uniform draws.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Genome(std::array::from_fn(|_| rng.random::<f64>()))
    }

    // Only the crate's operators construct genomes without range checks, and
    // they only ever copy or draw values in [0, 1).
    pub(crate) fn from_unchecked(genes: [f64; GENE_COUNT]) -> Self {
        Genome(genes)
    }
}

impl TryFrom<Vec<f64>> for Genome {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        let genes: [f64; GENE_COUNT] = v.try_into().map_err(|v: Vec<f64>| {
            Error::validation(format!("genome needs {GENE_COUNT} genes, got {}", v.len()))
        })?;
        Genome::new(genes)
    }
}

impl From<Genome> for Vec<f64> {
    fn from(g: Genome) -> Self {
        g.0.to_vec()
    }
}

/// Inclusive `[lower, upper]` range of one decoded parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Bound {
    pub lower: f64,
    pub upper: f64,
}

impl Bound {
    pub const fn new(lower: f64, upper: f64) -> Self {
        Bound { lower, upper }
    }

    fn lerp(&self, g: f64) -> f64 {
        self.lower + g * (self.upper - self.lower)
    }

    fn unlerp(&self, v: f64) -> f64 {
        ((v - self.lower) / (self.upper - self.lower)).clamp(0.0, 1.0)
    }

    fn within(&self, lo: f64, hi: f64) -> bool {
        self.lower >= lo && self.upper <= hi
    }

    fn is_integral(&self) -> bool {
        self.lower.fract() == 0.0 && self.upper.fract() == 0.0
    }
}

impl From<[f64; 2]> for Bound {
    fn from([lower, upper]: [f64; 2]) -> Self {
        Bound { lower, upper }
    }
}

impl From<Bound> for [f64; 2] {
    fn from(b: Bound) -> Self {
        [b.lower, b.upper]
    }
}

/// Per-gene decoding ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneBounds {
    pub kind: ModelKind,
    pub leak: Bound,
    pub integration: Bound,
    pub refractory: Bound,
    pub threshold: Bound,
    pub spont_prob: Bound,
    pub inhib_ratio: Bound,
    pub density: Bound,
}

impl GeneBounds {
    /// Default ranges. Only the density ranges are fixed by the model
    /// definitions; the rest are tunable engineering defaults.
    pub fn defaults(kind: ModelKind) -> Self {
        GeneBounds {
            kind,
            leak: Bound::new(0.0, 1.0),
            integration: Bound::new(0.0, 1.0),
            refractory: Bound::new(0.0, 10.0),
            threshold: Bound::new(0.1, 2.0),
            spont_prob: Bound::new(0.0, 0.1),
            inhib_ratio: Bound::new(0.0, 0.5),
            density: match kind {
                ModelKind::Ca => Bound::new(CA_RADIUS_MIN as f64, CA_RADIUS_MAX as f64),
                ModelKind::Network => Bound::new(NETWORK_DENSITY_MIN, NETWORK_DENSITY_MAX),
            },
        }
    }

    pub fn get(&self, gene: Gene) -> Bound {
        match gene {
            Gene::Leak => self.leak,
            Gene::Integration => self.integration,
            Gene::Refractory => self.refractory,
            Gene::Threshold => self.threshold,
            Gene::SpontProb => self.spont_prob,
            Gene::InhibRatio => self.inhib_ratio,
            Gene::Density => self.density,
        }
    }

    pub fn set(&mut self, gene: Gene, bound: Bound) {
        let slot = match gene {
            Gene::Leak => &mut self.leak,
            Gene::Integration => &mut self.integration,
            Gene::Refractory => &mut self.refractory,
            Gene::Threshold => &mut self.threshold,
            Gene::SpontProb => &mut self.spont_prob,
            Gene::InhibRatio => &mut self.inhib_ratio,
            Gene::Density => &mut self.density,
        };
        *slot = bound;
    }

    pub fn validate(&self) -> Result<()> {
        for gene in Gene::ALL {
            let b = self.get(gene);
            if !b.lower.is_finite() || !b.upper.is_finite() || b.lower >= b.upper {
                return Err(Error::validation(format!(
                    "bound for {} must satisfy lower < upper, got [{}, {}]",
                    gene.name(),
                    b.lower,
                    b.upper
                )));
            }
        }
        let bad = |gene: Gene, why: &str| {
            Err(Error::validation(format!(
                "bound for {} {why}, got [{}, {}]",
                gene.name(),
                self.get(gene).lower,
                self.get(gene).upper
            )))
        };
        if !self.refractory.is_integral() || self.refractory.lower < 0.0 {
            return bad(Gene::Refractory, "must be non-negative integers");
        }
        if self.threshold.lower <= 0.0 {
            return bad(Gene::Threshold, "must be > 0");
        }
        if !self.spont_prob.within(0.0, 1.0) {
            return bad(Gene::SpontProb, "must lie within [0, 1]");
        }
        if !self.inhib_ratio.within(0.0, 1.0) {
            return bad(Gene::InhibRatio, "must lie within [0, 1]");
        }
        match self.kind {
            ModelKind::Ca => {
                if !self.density.is_integral()
                    || !self
                        .density
                        .within(CA_RADIUS_MIN as f64, CA_RADIUS_MAX as f64)
                {
                    return bad(Gene::Density, "must be integer radii within [1, 6] for the CA");
                }
            }
            ModelKind::Network => {
                if !self.density.within(NETWORK_DENSITY_MIN, NETWORK_DENSITY_MAX) {
                    return bad(Gene::Density, "must lie within [0.1, 4.1] for the network");
                }
            }
        }
        Ok(())
    }

    /// Affine decoding of every gene. The refractory period rounds to the
    /// nearest step; the CA radius splits `[0, 1]` into equal-width buckets,
    /// one per integer radius, with gene 1 mapping to the upper radius.
    pub fn decode(&self, genome: &Genome) -> Result<ModelParams> {
        self.validate()?;
        Genome::new(*genome.genes())?;
        let g = |gene| genome.gene(gene);
        let density = match self.kind {
            ModelKind::Ca => {
                let b = self.density;
                let radius = (b.lower + g(Gene::Density) * (b.upper - b.lower + 1.0))
                    .floor()
                    .min(b.upper);
                Density::Radius(radius as u32)
            }
            ModelKind::Network => Density::Length(self.density.lerp(g(Gene::Density))),
        };
        Ok(ModelParams {
            leak: self.leak.lerp(g(Gene::Leak)),
            integration: self.integration.lerp(g(Gene::Integration)),
            refractory_steps: self.refractory.lerp(g(Gene::Refractory)).round() as u32,
            threshold: self.threshold.lerp(g(Gene::Threshold)),
            spont_prob: self.spont_prob.lerp(g(Gene::SpontProb)),
            inhib_ratio: self.inhib_ratio.lerp(g(Gene::InhibRatio)),
            density,
        })
    }

    /// Inverse of [`GeneBounds::decode`]. Integer parameters map to the
    /// center of their bucket; out-of-range values clamp to the nearest end.
    pub fn encode(&self, params: &ModelParams) -> Result<Genome> {
        self.validate()?;
        if params.density.kind() != self.kind {
            return Err(Error::validation(format!(
                "density is for the {} model but bounds are for the {} model",
                params.density.kind(),
                self.kind
            )));
        }
        let density = match params.density {
            Density::Radius(r) => {
                let b = self.density;
                ((r as f64 - b.lower + 0.5) / (b.upper - b.lower + 1.0)).clamp(0.0, 1.0)
            }
            Density::Length(c) => self.density.unlerp(c),
        };
        Genome::new([
            self.leak.unlerp(params.leak),
            self.integration.unlerp(params.integration),
            self.refractory.unlerp(params.refractory_steps as f64),
            self.threshold.unlerp(params.threshold),
            self.spont_prob.unlerp(params.spont_prob),
            self.inhib_ratio.unlerp(params.inhib_ratio),
            density,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;

    #[test]
    fn zeros_decode_to_lower_bounds() {
        for kind in [ModelKind::Ca, ModelKind::Network] {
            let b = GeneBounds::defaults(kind);
            let p = b.decode(&Genome::splat(0.0).unwrap()).unwrap();
            assert_eq!(p.leak, b.leak.lower);
            assert_eq!(p.integration, b.integration.lower);
            assert_eq!(p.refractory_steps as f64, b.refractory.lower);
            assert_eq!(p.threshold, b.threshold.lower);
            assert_eq!(p.spont_prob, b.spont_prob.lower);
            assert_eq!(p.inhib_ratio, b.inhib_ratio.lower);
            assert_eq!(p.density.as_f64(), b.density.lower);
        }
    }

    #[test]
    fn ones_decode_to_upper_bounds() {
        for kind in [ModelKind::Ca, ModelKind::Network] {
            let b = GeneBounds::defaults(kind);
            let p = b.decode(&Genome::splat(1.0).unwrap()).unwrap();
            assert_eq!(p.leak, b.leak.upper);
            assert_eq!(p.integration, b.integration.upper);
            assert_eq!(p.refractory_steps as f64, b.refractory.upper);
            assert_eq!(p.threshold, b.threshold.upper);
            assert_eq!(p.spont_prob, b.spont_prob.upper);
            assert_eq!(p.inhib_ratio, b.inhib_ratio.upper);
            assert_eq!(p.density.as_f64(), b.density.upper);
        }
    }

    #[test]
    fn network_density_midpoint() {
        let b = GeneBounds::defaults(ModelKind::Network);
        let p = b.decode(&Genome::splat(0.5).unwrap()).unwrap();
        match p.density {
            Density::Length(c) => assert!((c - 2.1).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ca_radius_buckets() {
        let b = GeneBounds::defaults(ModelKind::Ca);
        let radius = |g: f64| {
            let mut genes = [0.5; GENE_COUNT];
            genes[Gene::Density as usize] = g;
            match b.decode(&Genome::new(genes).unwrap()).unwrap().density {
                Density::Radius(r) => r,
                other => panic!("unexpected {other:?}"),
            }
        };
        assert_eq!(radius(0.0), 1);
        assert_eq!(radius(0.16), 1);
        assert_eq!(radius(0.17), 2);
        assert_eq!(radius(0.5), 4);
        assert_eq!(radius(0.99), 6);
        assert_eq!(radius(1.0), 6);
    }

    #[test]
    fn invalid_inputs() {
        assert!(Genome::new([0.5, 0.5, 0.5, 1.2, 0.5, 0.5, 0.5]).is_err());
        assert!(Genome::try_from(vec![0.5; 6]).is_err());
        let mut b = GeneBounds::defaults(ModelKind::Ca);
        b.leak = Bound::new(1.0, 1.0);
        assert!(b.validate().is_err());
        let mut b = GeneBounds::defaults(ModelKind::Ca);
        b.density = Bound::new(0.1, 4.1);
        assert!(b.validate().is_err());
        let mut b = GeneBounds::defaults(ModelKind::Network);
        b.density = Bound::new(0.0, 4.1);
        assert!(b.validate().is_err());
        let mut b = GeneBounds::defaults(ModelKind::Network);
        b.threshold = Bound::new(0.0, 1.0);
        assert!(b.validate().is_err());
    }

    #[test]
    fn random_genome_statistics() {
        let mut s = rng::stream(1);
        let n = 100_000;
        let mut sums = [0.0; GENE_COUNT];
        for _ in 0..n {
            let g = Genome::random(&mut s);
            for (acc, &v) in sums.iter_mut().zip(g.genes()) {
                assert!((0.0..1.0).contains(&v));
                *acc += v;
            }
        }
        for sum in sums {
            assert!((sum / n as f64 - 0.5).abs() < 0.01);
        }
        assert_eq!(
            Genome::random(&mut rng::stream(4)),
            Genome::random(&mut rng::stream(4))
        );
    }

    #[test]
    fn json_shape() {
        let g = Genome::splat(0.25).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, "[0.25,0.25,0.25,0.25,0.25,0.25,0.25]");
        assert!(serde_json::from_str::<Genome>("[0.1,0.2]").is_err());
        assert!(serde_json::from_str::<Genome>("[2,0,0,0,0,0,0]").is_err());
    }

    fn genome_strategy() -> impl Strategy<Value = Genome> {
        prop::array::uniform7(0.0..=1.0f64).prop_map(|g| Genome::new(g).unwrap())
    }

    fn kind_strategy() -> impl Strategy<Value = ModelKind> {
        prop_oneof![Just(ModelKind::Ca), Just(ModelKind::Network)]
    }

    proptest! {
        #[test]
        fn decoded_params_stay_in_bounds(g in genome_strategy(), kind in kind_strategy()) {
            let b = GeneBounds::defaults(kind);
            let p = b.decode(&g).unwrap();
            let inside = |v: f64, gene| {
                let bd = b.get(gene);
                v >= bd.lower && v <= bd.upper
            };
            prop_assert!(inside(p.leak, Gene::Leak));
            prop_assert!(inside(p.integration, Gene::Integration));
            prop_assert!(inside(p.refractory_steps as f64, Gene::Refractory));
            prop_assert!(inside(p.threshold, Gene::Threshold));
            prop_assert!(inside(p.spont_prob, Gene::SpontProb));
            prop_assert!(inside(p.inhib_ratio, Gene::InhibRatio));
            prop_assert!(inside(p.density.as_f64(), Gene::Density));
            prop_assert!(p.validate().is_ok());
        }

        #[test]
        fn decode_is_monotone(
            g in genome_strategy(),
            kind in kind_strategy(),
            idx in 0..GENE_COUNT,
            bump in 0.0..=1.0f64,
        ) {
            let b = GeneBounds::defaults(kind);
            let mut genes = *g.genes();
            genes[idx] = (genes[idx] + bump).min(1.0);
            let lo = b.decode(&g).unwrap();
            let hi = b.decode(&Genome::new(genes).unwrap()).unwrap();
            prop_assert!(hi.leak >= lo.leak);
            prop_assert!(hi.integration >= lo.integration);
            prop_assert!(hi.refractory_steps >= lo.refractory_steps);
            prop_assert!(hi.threshold >= lo.threshold);
            prop_assert!(hi.spont_prob >= lo.spont_prob);
            prop_assert!(hi.inhib_ratio >= lo.inhib_ratio);
            prop_assert!(hi.density.as_f64() >= lo.density.as_f64());
        }

        #[test]
        fn encode_inverts_decode(g in genome_strategy(), kind in kind_strategy()) {
            let b = GeneBounds::defaults(kind);
            let p = b.decode(&g).unwrap();
            let back = b.decode(&b.encode(&p).unwrap()).unwrap();
            prop_assert_eq!(back.refractory_steps, p.refractory_steps);
            prop_assert_eq!(back.density.kind(), p.density.kind());
            prop_assert!((back.density.as_f64() - p.density.as_f64()).abs() < 1e-9);
            prop_assert!((back.leak - p.leak).abs() < 1e-9);
            prop_assert!((back.integration - p.integration).abs() < 1e-9);
            prop_assert!((back.threshold - p.threshold).abs() < 1e-9);
            prop_assert!((back.spont_prob - p.spont_prob).abs() < 1e-9);
            prop_assert!((back.inhib_ratio - p.inhib_ratio).abs() < 1e-9);
        }
    }
}
