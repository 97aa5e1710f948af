//! Synthetic moving stimuli.
//!
//! A scene is a horizontally translating pattern over a fixed pixel grid.
//! Luminance is unitless in [0, 1]. With displacement `d(t)` in pixels
//! (positive speed moves the pattern rightward), the three kinds are:
//!
//! - `bar`: `background + contrast` where `(x - d(t)) mod width` falls in
//!   `[0, bar_width_px)`, `background` elsewhere.
//! - `grating`: `background + contrast * (1 + sin(2*pi*(x - d(t)) / spatial_period_px)) / 2`.
//! - `texture`: `background + contrast * N((x - d(t)) mod width, y)` where
//!   `N` is a seeded static value-noise field in [0, 1] with ~4 px
//!   correlation length, bilinearly sampled and wrapping horizontally.
//!
//! Plain sampling uses `d(t) = speed * t / 1e6`. An oscillating sampler
//! replaces `t` with a triangle wave of the configured half-period, so the
//! pattern sweeps back and forth over the same ground track.

use serde::{Deserialize, Serialize};

use crate::event::{EventError, SensorGeometry};

/// Pattern kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SceneKind {
    Bar,
    Grating,
    Texture,
}

/// Lattice spacing of the texture noise field, in pixels.
pub const TEXTURE_CORRELATION_PX: usize = 4;

fn default_spatial_period() -> f64 {
    16.0
}

fn default_bar_width() -> u16 {
    8
}

/// Declarative scene description; serializes as a flat JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub width: u16,
    pub height: u16,
    pub duration_us: u64,
    pub kind: SceneKind,
    /// Pattern speed in pixels per second; sign sets direction.
    pub speed_px_s: f64,
    /// Peak luminance above background, in [0, 1].
    pub contrast: f64,
    /// Base luminance, in [0, 1]; `contrast + background <= 1`.
    pub background: f64,
    /// Grating wavelength in pixels (>= 2). Ignored by other kinds.
    #[serde(default = "default_spatial_period")]
    pub spatial_period_px: f64,
    /// Bar width in pixels (>= 1). Ignored by other kinds.
    #[serde(default = "default_bar_width")]
    pub bar_width_px: u16,
    /// Seed for the texture noise field. Ignored by other kinds.
    #[serde(default)]
    pub seed: u64,
    /// When present, motion follows a triangle wave with this half-period:
    /// forward for `half_period_us`, then backward over the same track.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_period_us: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SceneError {
    #[error(transparent)]
    Geometry(#[from] EventError),
    #[error("duration_us must be positive")]
    ZeroDuration,
    #[error("half_period_us must be positive when present")]
    ZeroHalfPeriod,
    #[error("{field} = {value} outside [0, 1]")]
    UnitRange { field: &'static str, value: f64 },
    #[error("contrast + background = {0} exceeds 1")]
    Overbright(f64),
    #[error("spatial_period_px = {0} must be >= 2 and finite")]
    BadSpatialPeriod(f64),
    #[error("bar_width_px = {0} must be >= 1")]
    BadBarWidth(u16),
    #[error("speed_px_s = {0} must be finite")]
    BadSpeed(f64),
    #[error("coordinates ({x},{y}) outside {width}x{height} scene")]
    OutOfBounds {
        x: u16,
        y: u16,
        width: u16,
        height: u16,
    },
    #[error("t = {t} outside scene duration {duration_us}")]
    TimeOutOfRange { t: u64, duration_us: u64 },
}

impl SceneSpec {
    /// The default desk-scale scene: a 64x64 seeded texture oscillating at
    /// 60 px/s with a 1 s half-period for 5 s.
    pub fn desk_default() -> SceneSpec {
        SceneSpec {
            width: 64,
            height: 64,
            duration_us: 5_000_000,
            kind: SceneKind::Texture,
            speed_px_s: 60.0,
            contrast: 0.6,
            background: 0.2,
            spatial_period_px: default_spatial_period(),
            bar_width_px: default_bar_width(),
            seed: 0,
            half_period_us: Some(1_000_000),
        }
    }

    pub fn geometry(&self) -> Result<SensorGeometry, SceneError> {
        Ok(SensorGeometry::new(self.width, self.height)?)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        self.geometry()?;
        if self.duration_us == 0 {
            return Err(SceneError::ZeroDuration);
        }
        if self.half_period_us == Some(0) {
            return Err(SceneError::ZeroHalfPeriod);
        }
        if !self.speed_px_s.is_finite() {
            return Err(SceneError::BadSpeed(self.speed_px_s));
        }
        for (field, value) in [("contrast", self.contrast), ("background", self.background)] {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(SceneError::UnitRange { field, value });
            }
        }
        if self.contrast + self.background > 1.0 {
            return Err(SceneError::Overbright(self.contrast + self.background));
        }
        match self.kind {
            SceneKind::Grating => {
                if !self.spatial_period_px.is_finite() || self.spatial_period_px < 2.0 {
                    return Err(SceneError::BadSpatialPeriod(self.spatial_period_px));
                }
            }
            SceneKind::Bar => {
                if self.bar_width_px < 1 {
                    return Err(SceneError::BadBarWidth(self.bar_width_px));
                }
            }
            SceneKind::Texture => {}
        }
        Ok(())
    }

    /// Luminance under plain linear motion (`d(t) = speed * t / 1e6`),
    /// ignoring `half_period_us`. Checked single-point evaluation.
    pub fn luminance(&self, x: u16, y: u16, t_us: u64) -> Result<f64, SceneError> {
        self.validate()?;
        if x >= self.width || y >= self.height {
            return Err(SceneError::OutOfBounds {
                x,
                y,
                width: self.width,
                height: self.height,
            });
        }
        if t_us > self.duration_us {
            return Err(SceneError::TimeOutOfRange {
                t: t_us,
                duration_us: self.duration_us,
            });
        }
        let disp = self.speed_px_s * t_us as f64 / 1e6;
        Ok(self.sample_at(x as usize, y as usize, disp))
    }

    /// Builds a reusable sampler honoring the spec's own `half_period_us`.
    pub fn sampler(&self) -> Result<SceneSampler, SceneError> {
        self.validate()?;
        Ok(SceneSampler::build(self, self.half_period_us))
    }

    /// Builds a sampler that oscillates with the given half-period,
    /// overriding whatever the spec itself says.
    pub fn oscillating(&self, half_period_us: u64) -> Result<SceneSampler, SceneError> {
        self.validate()?;
        if half_period_us == 0 {
            return Err(SceneError::ZeroHalfPeriod);
        }
        Ok(SceneSampler::build(self, Some(half_period_us)))
    }

    /// Single-point pattern evaluation at a given displacement. Shared by
    /// the checked API and the sampler so both produce identical values.
    fn sample_at(&self, x: usize, y: usize, disp: f64) -> f64 {
        let xf = x as f64 - disp;
        match self.kind {
            SceneKind::Bar => {
                let u = wrap(xf, self.width as f64);
                if u < self.bar_width_px as f64 {
                    self.background + self.contrast
                } else {
                    self.background
                }
            }
            SceneKind::Grating => {
                let phase = std::f64::consts::TAU * xf / self.spatial_period_px;
                self.background + self.contrast * (1.0 + phase.sin()) / 2.0
            }
            SceneKind::Texture => {
                let u = wrap(xf, self.width as f64);
                let (gw, gh) = lattice_dims(self.width, self.height);
                let n = sample_noise(u, y, gw, gh, |gx, gy| lattice_value(self.seed, gx, gy));
                self.background + self.contrast * n
            }
        }
    }
}

/// A validated, ready-to-sample scene. Texture lattices are precomputed so
/// bulk sampling touches no hash functions.
#[derive(Debug, Clone)]
pub struct SceneSampler {
    spec: SceneSpec,
    half_period_us: Option<u64>,
    /// Row-major `gh x gw` noise lattice; empty for bar/grating.
    lattice: Vec<f64>,
    gw: usize,
    gh: usize,
}

impl SceneSampler {
    fn build(spec: &SceneSpec, half_period_us: Option<u64>) -> SceneSampler {
        let (gw, gh) = lattice_dims(spec.width, spec.height);
        let lattice = match spec.kind {
            SceneKind::Texture => {
                let mut v = Vec::with_capacity(gw * gh);
                for gy in 0..gh {
                    for gx in 0..gw {
                        v.push(lattice_value(spec.seed, gx, gy));
                    }
                }
                v
            }
            _ => Vec::new(),
        };
        SceneSampler {
            spec: spec.clone(),
            half_period_us,
            lattice,
            gw,
            gh,
        }
    }

    pub fn spec(&self) -> &SceneSpec {
        &self.spec
    }

    pub fn geometry(&self) -> SensorGeometry {
        // The spec was validated at construction.
        SensorGeometry::new(self.spec.width, self.spec.height).unwrap()
    }

    pub fn duration_us(&self) -> u64 {
        self.spec.duration_us
    }

    /// Pattern displacement in pixels at time `t`: linear in `t`, or a
    /// triangle wave when a half-period is configured (rising to
    /// `speed * half_period / 1e6` and back down, repeating).
    pub fn displacement_px(&self, t_us: u64) -> f64 {
        let effective_us = match self.half_period_us {
            None => t_us as f64,
            Some(hp) => {
                let cycle = 2 * hp;
                let tau = t_us % cycle;
                (if tau <= hp { tau } else { cycle - tau }) as f64
            }
        };
        self.spec.speed_px_s * effective_us / 1e6
    }

    /// Checked single-point sampling (honors the oscillation, if any).
    pub fn luminance(&self, x: u16, y: u16, t_us: u64) -> Result<f64, SceneError> {
        if x >= self.spec.width || y >= self.spec.height {
            return Err(SceneError::OutOfBounds {
                x,
                y,
                width: self.spec.width,
                height: self.spec.height,
            });
        }
        if t_us > self.spec.duration_us {
            return Err(SceneError::TimeOutOfRange {
                t: t_us,
                duration_us: self.spec.duration_us,
            });
        }
        Ok(self.sample_unchecked(x as usize, y as usize, self.displacement_px(t_us)))
    }

    /// Fills `out` (row-major, `width * height` long) with the luminance of
    /// every pixel at time `t`. Equivalent to calling [`Self::luminance`]
    /// per pixel, but the displacement is computed once.
    pub fn fill_row_major(&self, t_us: u64, out: &mut [f64]) {
        let w = self.spec.width as usize;
        let h = self.spec.height as usize;
        assert_eq!(out.len(), w * h, "buffer must hold width * height samples");
        let disp = self.displacement_px(t_us);
        for y in 0..h {
            let row = &mut out[y * w..(y + 1) * w];
            for (x, slot) in row.iter_mut().enumerate() {
                *slot = self.sample_unchecked(x, y, disp);
            }
        }
    }

    fn sample_unchecked(&self, x: usize, y: usize, disp: f64) -> f64 {
        match self.spec.kind {
            SceneKind::Texture => {
                // Same math as SceneSpec::sample_at, but corners come from
                // the precomputed lattice.
                let u = wrap(x as f64 - disp, self.spec.width as f64);
                let n = sample_noise(u, y, self.gw, self.gh, |gx, gy| {
                    self.lattice[gy * self.gw + gx]
                });
                self.spec.background + self.spec.contrast * n
            }
            _ => self.spec.sample_at(x, y, disp),
        }
    }
}

/// Euclidean wrap of `v` into `[0, w)`, safe against the `r + w == w`
/// rounding edge when `v` is a tiny negative value.
fn wrap(v: f64, w: f64) -> f64 {
    let r = v.rem_euclid(w);
    if r >= w {
        0.0
    } else {
        r
    }
}

fn lattice_dims(width: u16, height: u16) -> (usize, usize) {
    let gw = (width as usize).div_ceil(TEXTURE_CORRELATION_PX);
    let gh = (height as usize - 1) / TEXTURE_CORRELATION_PX + 2;
    (gw, gh)
}

/// Bilinear value-noise sample at horizontal position `u` (wrapped) and
/// integer row `y` (clamped at the bottom lattice row). `corner` supplies
/// the lattice value at a grid point.
fn sample_noise(
    u: f64,
    y: usize,
    gw: usize,
    gh: usize,
    corner: impl Fn(usize, usize) -> f64,
) -> f64 {
    let cu = u / TEXTURE_CORRELATION_PX as f64;
    let gx0 = (cu.floor() as usize).min(gw - 1);
    let fx = cu - gx0 as f64;
    let gx1 = (gx0 + 1) % gw; // horizontal wrap
    let gy0 = y / TEXTURE_CORRELATION_PX;
    let fy = (y % TEXTURE_CORRELATION_PX) as f64 / TEXTURE_CORRELATION_PX as f64;
    let gy1 = (gy0 + 1).min(gh - 1); // vertical clamp
    let top = lerp(corner(gx0, gy0), corner(gx1, gy0), fx);
    let bot = lerp(corner(gx0, gy1), corner(gx1, gy1), fx);
    lerp(top, bot, fy)
}

fn lerp(a: f64, b: f64, f: f64) -> f64 {
    a + f * (b - a)
}

/// Deterministic lattice value in [0, 1): two rounds of splitmix64 over the
/// seed and the packed grid coordinates. Stable across platforms.
fn lattice_value(seed: u64, gx: usize, gy: usize) -> f64 {
    let packed = ((gx as u64) << 32) | (gy as u64 & 0xFFFF_FFFF);
    let z = splitmix64(splitmix64(seed ^ packed));
    (z >> 11) as f64 / (1u64 << 53) as f64
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
