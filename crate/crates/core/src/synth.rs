//! Planted-cluster tensors: a sum of rank-1 signals on index blocks plus
//! i.i.d. Gaussian noise.
//!
//! Noise comes from ChaCha20 (`rand_chacha`, seeded with `seed_from_u64`)
//! mapped to standard normals by the Box–Muller transform. Uniforms use the
//! top 53 bits of each `u64`, and both Box–Muller outputs are consumed in
//! order, so a given seed produces the same tensor on every platform.

use std::f64::consts::TAU;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{IndexSet, Mode, Tensor3};

/// One rank-1 signal term with its member set in each mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub gamma: f64,
    pub members: [IndexSet; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub dims: [usize; 3],
    pub components: Vec<Component>,
    pub seed: u64,
    /// Noise standard deviation; 1 is standard normal.
    pub noise_scale: f64,
}

impl SynthSpec {
    /// Spec with `gammas.len()` components on consecutive leading blocks
    /// of `cluster_size` indices in every mode.
    pub fn leading_blocks(
        dims: [usize; 3],
        gammas: &[f64],
        cluster_size: usize,
        seed: u64,
        noise_scale: f64,
    ) -> Result<Self> {
        if cluster_size == 0 {
            return Err(Error::Argument("cluster size must be positive".into()));
        }
        let components = gammas
            .iter()
            .enumerate()
            .map(|(c, &gamma)| {
                let block: Vec<usize> = (c * cluster_size..(c + 1) * cluster_size).collect();
                let members = [
                    IndexSet::new(Mode::One, block.clone(), dims[0])?,
                    IndexSet::new(Mode::Two, block.clone(), dims[1])?,
                    IndexSet::new(Mode::Three, block, dims[2])?,
                ];
                Ok(Component { gamma, members })
            })
            .collect::<Result<_>>()?;
        let spec = SynthSpec {
            dims,
            components,
            seed,
            noise_scale,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.contains(&0) {
            return Err(Error::Validation(format!(
                "dimensions must be positive: {:?}",
                self.dims
            )));
        }
        if !(self.noise_scale >= 0.0) || !self.noise_scale.is_finite() {
            return Err(Error::Validation(format!(
                "noise scale must be >= 0, got {}",
                self.noise_scale
            )));
        }
        for (c, comp) in self.components.iter().enumerate() {
            if !(comp.gamma > 0.0) || !comp.gamma.is_finite() {
                return Err(Error::Validation(format!(
                    "component {c}: gamma must be > 0, got {}",
                    comp.gamma
                )));
            }
            for (set, mode) in comp.members.iter().zip(Mode::ALL) {
                if set.mode() != mode {
                    return Err(Error::Validation(format!(
                        "component {c}: set for {} in {mode} slot",
                        set.mode()
                    )));
                }
                if set.is_empty() {
                    return Err(Error::Validation(format!("component {c}: empty {mode} member set")));
                }
                if set.indices().last().is_some_and(|&i| i >= self.dims[mode.axis()]) {
                    return Err(Error::Validation(format!("component {c}: {mode} member out of range")));
                }
            }
        }
        for a in 0..self.components.len() {
            for b in (a + 1)..self.components.len() {
                for mode in Mode::ALL {
                    let (sa, sb) = (
                        &self.components[a].members[mode.axis()],
                        &self.components[b].members[mode.axis()],
                    );
                    if !sa.is_disjoint(sb) {
                        return Err(Error::Validation(format!("components {a} and {b} overlap in {mode}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Planted memberships, per mode and per component.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub dims: [usize; 3],
    /// `labels[axis][i]` is the component id of slice `i`, or −1.
    pub labels: [Vec<i64>; 3],
    pub components: Vec<[IndexSet; 3]>,
    pub gammas: Vec<f64>,
    pub seed: u64,
}

impl GroundTruth {
    pub fn from_spec(spec: &SynthSpec) -> Self {
        let mut labels = spec.dims.map(|m| vec![-1i64; m]);
        for (c, comp) in spec.components.iter().enumerate() {
            for (axis, set) in comp.members.iter().enumerate() {
                for &i in set.indices() {
                    labels[axis][i] = c as i64;
                }
            }
        }
        GroundTruth {
            dims: spec.dims,
            labels,
            components: spec.components.iter().map(|c| c.members.clone()).collect(),
            gammas: spec.components.iter().map(|c| c.gamma).collect(),
            seed: spec.seed,
        }
    }

    pub fn to_json(&self) -> TruthJson {
        TruthJson {
            dims: self.dims,
            modes: Mode::ALL
                .iter()
                .map(|&mode| TruthMode {
                    mode,
                    clusters: self
                        .components
                        .iter()
                        .map(|c| c[mode.axis()].indices().to_vec())
                        .collect(),
                })
                .collect(),
            gammas: self.gammas.clone(),
            seed: self.seed,
        }
    }
}

/// On-disk ground truth document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthJson {
    pub dims: [usize; 3],
    pub modes: Vec<TruthMode>,
    pub gammas: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthMode {
    pub mode: Mode,
    pub clusters: Vec<Vec<usize>>,
}

impl TruthJson {
    /// Per-mode labels (component id or −1), validated against `dims`.
    pub fn labels(&self) -> Result<[Vec<i64>; 3]> {
        let mut labels = self.dims.map(|m| vec![-1i64; m]);
        for tm in &self.modes {
            let row = &mut labels[tm.mode.axis()];
            for (c, members) in tm.clusters.iter().enumerate() {
                for &i in members {
                    if i >= row.len() {
                        return Err(Error::Validation(format!(
                            "truth {} member {i} exceeds dimension {}",
                            tm.mode,
                            row.len()
                        )));
                    }
                    if row[i] != -1 {
                        return Err(Error::Validation(format!("truth {} member {i} listed twice", tm.mode)));
                    }
                    row[i] = c as i64;
                }
            }
        }
        Ok(labels)
    }
}

/// `1/√|J|` on `j`, zero elsewhere.
pub fn unit_cluster_vector(j: &IndexSet, m: usize) -> Result<Vec<f64>> {
    if j.is_empty() {
        return Err(Error::Argument("cluster vector of an empty set".into()));
    }
    if let Some(&last) = j.indices().last() {
        if last >= m {
            return Err(Error::range(format!("{} member", j.mode()), last, m));
        }
    }
    let w = 1.0 / (j.len() as f64).sqrt();
    let mut v = vec![0.0; m];
    for &i in j.indices() {
        v[i] = w;
    }
    Ok(v)
}

/// Standard normal stream: ChaCha20 + Box–Muller.
pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        GaussianStream {
            rng: ChaCha20Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on [0, 1) with 53 bits of precision.
    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 − u lies in (0, 1], keeping the log finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Draws `T = Σ γ_c w_c ⊗ u_c ⊗ v_c + σ Z` for the spec.
pub fn generate(spec: &SynthSpec) -> Result<(Tensor3, GroundTruth)> {
    spec.validate()?;
    let [m1, m2, m3] = spec.dims;
    let len = m1
        .checked_mul(m2)
        .and_then(|x| x.checked_mul(m3))
        .ok_or_else(|| Error::Argument("tensor too large".into()))?;
    let mut data = vec![0.0; len];
    if spec.noise_scale > 0.0 {
        let mut z = GaussianStream::new(spec.seed);
        for x in data.iter_mut() {
            *x = spec.noise_scale * z.next_normal();
        }
    }
    for comp in &spec.components {
        let w = unit_cluster_vector(&comp.members[0], m1)?;
        let u = unit_cluster_vector(&comp.members[1], m2)?;
        let v = unit_cluster_vector(&comp.members[2], m3)?;
        for &i in comp.members[0].indices() {
            for &j in comp.members[1].indices() {
                let gwu = comp.gamma * w[i] * u[j];
                for &k in comp.members[2].indices() {
                    data[(i * m2 + j) * m3 + k] += gwu * v[k];
                }
            }
        }
    }
    Ok((Tensor3::from_vec(spec.dims, data)?, GroundTruth::from_spec(spec)))
}

/// The two-component benchmark: 50³, blocks {0..9} and {10..19} in every
/// mode, equal strength `gamma`, unit noise.
pub fn benchmark_spec(gamma: f64, seed: u64) -> Result<SynthSpec> {
    if !(gamma > 0.0) {
        return Err(Error::Argument(format!("gamma must be positive, got {gamma}")));
    }
    SynthSpec::leading_blocks([50, 50, 50], &[gamma, gamma], 10, seed, 1.0)
}
