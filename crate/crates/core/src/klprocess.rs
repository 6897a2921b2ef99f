//! Karhunen-Loeve bases of the driving noise and reproducible Gaussian draws.
//!
//! Two bases are provided: the standard Wiener process with frequencies
//! `lambda_k = (k - 1/2) pi / T` and the Brownian bridge with
//! `lambda_k = k pi / T`, both with amplitude `sqrt(2 / T)` on the horizon
//! `[0, T]`. The truncated path at time `t` is
//!
//! ```text
//! W_t^m = sqrt(2/T) * sum_{k=1..m} Z_k sin(lambda_k t) / lambda_k
//! ```
//!
//! with i.i.d. standard normal vectors `Z_k`. Draws come from a counter-based
//! generator keyed by `(seed, sample index)`, so any sample of a batch is
//! reproducible on its own regardless of batch order or thread count.

use nalgebra::DVector;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based random stream: output `j` is a pure function of
/// `(seed, stream, j)`, with no sequential state beyond the position.
#[derive(Debug, Clone)]
pub struct StreamRng {
    key: u64,
    pos: u64,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = mix64(seed) ^ mix64(stream.wrapping_mul(STREAM_SALT).wrapping_add(GOLDEN));
        StreamRng { key, pos: 0 }
    }

    #[inline]
    fn value_at(&self, pos: u64) -> u64 {
        // keyed double mix; the outer xor breaks the additive lattice between
        // streams so shifted streams cannot alias
        mix64(mix64(pos.wrapping_mul(GOLDEN).wrapping_add(self.key)) ^ self.key)
    }

    /// Next standard normal variate.
    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }
}

impl RngCore for StreamRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let v = self.value_at(self.pos);
        self.pos = self.pos.wrapping_add(1);
        v
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

/// Which orthonormal expansion of the noise is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlBasisKind {
    /// Standard Brownian motion on `[0, T]`.
    Wiener,
    /// Brownian bridge pinned to zero at both ends of `[0, T]`.
    BrownianBridge,
}

/// Frequency sequence and amplitude of a Karhunen-Loeve basis on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlBasis {
    kind: KlBasisKind,
    horizon: f64,
}

impl KlBasis {
    pub fn new(kind: KlBasisKind, horizon: f64) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::Domain(format!(
                "basis horizon {horizon} must be finite and positive"
            )));
        }
        Ok(KlBasis { kind, horizon })
    }

    pub fn wiener(horizon: f64) -> Result<Self> {
        Self::new(KlBasisKind::Wiener, horizon)
    }

    pub fn brownian_bridge(horizon: f64) -> Result<Self> {
        Self::new(KlBasisKind::BrownianBridge, horizon)
    }

    pub fn kind(&self) -> KlBasisKind {
        self.kind
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `k`-th frequency (1-based).
    pub fn frequency(&self, k: usize) -> f64 {
        let k = k as f64;
        match self.kind {
            KlBasisKind::Wiener => (k - 0.5) * std::f64::consts::PI / self.horizon,
            KlBasisKind::BrownianBridge => k * std::f64::consts::PI / self.horizon,
        }
    }

    /// First `m` frequencies.
    pub fn frequencies(&self, m: usize) -> Vec<f64> {
        (1..=m).map(|k| self.frequency(k)).collect()
    }

    /// Common amplitude `sqrt(2 / T)` of all expansion terms.
    pub fn amplitude(&self) -> f64 {
        (2.0 / self.horizon).sqrt()
    }
}

/// First `m` basis frequencies.
pub fn kl_frequencies(basis: &KlBasis, m: usize) -> Vec<f64> {
    basis.frequencies(m)
}

/// A materialized block of `m` i.i.d. standard normal vectors of dimension
/// `n`, reproducible from `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct GaussianDraw {
    seed: u64,
    stream: u64,
    m: usize,
    n: usize,
    z: Vec<f64>, // term-major: z[k * n + i]
}

impl GaussianDraw {
    /// Generate the draw for one sample stream.
    pub fn generate(seed: u64, stream: u64, m: usize, n: usize) -> Self {
        let mut d = GaussianDraw {
            seed,
            stream,
            m,
            n,
            z: vec![0.0; m * n],
        };
        d.fill();
        d
    }

    /// Re-key the draw to another sample stream, reusing the buffer.
    pub fn regenerate(&mut self, stream: u64) {
        self.stream = stream;
        self.fill();
    }

    fn fill(&mut self) {
        let mut rng = StreamRng::new(self.seed, self.stream);
        for v in self.z.iter_mut() {
            *v = rng.next_normal();
        }
    }

    /// Build from explicit values (tests, coupling constructions).
    pub fn from_flat(m: usize, n: usize, z: Vec<f64>) -> Result<Self> {
        if z.len() != m * n {
            return Err(Error::Dimension(format!(
                "flat draw needs {} values, got {}",
                m * n,
                z.len()
            )));
        }
        Ok(GaussianDraw {
            seed: 0,
            stream: 0,
            m,
            n,
            z,
        })
    }

    /// The `k`-th normal vector (0-based), as a slice of length `n`.
    #[inline]
    pub fn term(&self, k: usize) -> &[f64] {
        &self.z[k * self.n..(k + 1) * self.n]
    }

    pub fn flat(&self) -> &[f64] {
        &self.z
    }

    /// A draw consisting of the first `m` terms of this one.
    pub fn truncated(&self, m: usize) -> GaussianDraw {
        assert!(m <= self.m);
        GaussianDraw {
            seed: self.seed,
            stream: self.stream,
            m,
            n: self.n,
            z: self.z[..m * self.n].to_vec(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

/// Draw `m` standard normal vectors of dimension `n` from the base stream of
/// `seed`.
pub fn draw_gaussians(seed: u64, m: usize, n: usize) -> GaussianDraw {
    GaussianDraw::generate(seed, 0, m, n)
}

/// Draw for sample `sample` of a batch; independent of all other samples.
pub fn draw_gaussians_for_sample(seed: u64, sample: u64, m: usize, n: usize) -> GaussianDraw {
    GaussianDraw::generate(seed, sample, m, n)
}

/// Evaluate the truncated expansion path at time `t in [0, horizon]`.
pub fn kl_path(basis: &KlBasis, draw: &GaussianDraw, t: f64) -> Result<DVector<f64>> {
    if !(0.0..=basis.horizon()).contains(&t) {
        return Err(Error::Domain(format!(
            "time {t} outside the basis horizon [0, {}]",
            basis.horizon()
        )));
    }
    let n = draw.n();
    let mut out = DVector::<f64>::zeros(n);
    for k in 1..=draw.m() {
        let lambda = basis.frequency(k);
        let w = (lambda * t).sin() / lambda;
        let zk = draw.term(k - 1);
        for i in 0..n {
            out[i] += w * zk[i];
        }
    }
    Ok(out * basis.amplitude())
}
