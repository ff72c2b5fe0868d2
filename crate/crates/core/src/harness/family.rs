//! Seeded test-function families.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::grid::{DomainGrid, GridFunction};
use crate::operators::{fractional_integral, weight_power};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// `|x − x₀|^α`. With no explicit `alphas`, `count` exponents are drawn
    /// one per stratum of `[−0.4·n/p₊, 2]`.
    Power {
        #[serde(default)]
        alphas: Vec<f64>,
        #[serde(default = "default_count")]
        count: usize,
    },
    /// Smooth bumps `exp(−1/(1−|x−c|²/w²))` supported inside the domain.
    Bump {
        #[serde(default = "default_count")]
        count: usize,
    },
    /// Random trigonometric polynomials.
    Trig {
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default = "default_terms")]
        terms: usize,
    },
    /// `χ_{B̃(z,r)}`.
    Indicator { center: Point, radius: f64 },
    /// Bumps together with their analytic gradient magnitude.
    GradientPair {
        #[serde(default = "default_count")]
        count: usize,
    },
    /// Sources `g` from `base` together with `f = I_{2s} g`.
    PotentialPair { s: f64, base: Box<FamilySpec> },
    /// Powers, bumps and trig polynomials, `count` of each.
    Mixed {
        #[serde(default = "default_count")]
        count: usize,
    },
}

fn default_count() -> usize {
    10
}

fn default_terms() -> usize {
    4
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec::Mixed { count: 10 }
    }
}

/// Case data the generators need: the weight centre and `p₊`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyContext {
    pub x0: Point,
    pub p_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MemberKind {
    Power,
    Bump,
    Trig,
    Indicator,
    GradientPair,
    PotentialPair,
}

#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub id: String,
    pub kind: MemberKind,
    pub f: GridFunction,
    /// `|∇f|`, exact, for gradient pairs.
    pub gradient: Option<GridFunction>,
    /// The source `g` with `f = I_{2s} g`, for potential pairs.
    pub source: Option<GridFunction>,
}

impl FamilyMember {
    fn plain(id: String, kind: MemberKind, f: GridFunction) -> Self {
        FamilyMember {
            id,
            kind,
            f,
            gradient: None,
            source: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FunctionFamily {
    pub spec: FamilySpec,
    pub seed: u64,
    pub members: Vec<FamilyMember>,
}

impl FunctionFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

// Each generator draws from its own stream so that, e.g., the bumps of a
// mixed family equal those of a plain bump family with the same seed.
fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn normalized(f: GridFunction) -> GridFunction {
    let m = f.max_abs();
    if m > 0.0 && m.is_finite() {
        f.scale(1.0 / m)
    } else {
        f
    }
}

pub fn generate_family(
    spec: &FamilySpec,
    grid: &Arc<DomainGrid>,
    seed: u64,
    ctx: &FamilyContext,
) -> Result<FunctionFamily> {
    let members = match spec {
        FamilySpec::Power { alphas, count } => powers(grid, seed, ctx, alphas, *count)?,
        FamilySpec::Bump { count } => bumps(grid, seed, *count, false)?,
        FamilySpec::Trig { count, terms } => trigs(grid, seed, *count, *terms)?,
        FamilySpec::Indicator { center, radius } => {
            let ball = grid.ball_subset(center, *radius)?;
            vec![FamilyMember::plain(
                "indicator".into(),
                MemberKind::Indicator,
                GridFunction::indicator(grid, &ball.node_indices),
            )]
        }
        FamilySpec::GradientPair { count } => bumps(grid, seed, *count, true)?,
        FamilySpec::PotentialPair { s, base } => {
            if !(*s > 0.0) {
                return Err(Error::config(format!(
                    "potential-pair needs s > 0, got {s}"
                )));
            }
            let base = generate_family(base, grid, seed, ctx)?;
            base.members
                .into_iter()
                .map(|m| {
                    let f = fractional_integral(&m.f, 2.0 * s)?;
                    Ok(FamilyMember {
                        id: format!("pot-{}", m.id),
                        kind: MemberKind::PotentialPair,
                        f,
                        gradient: None,
                        source: Some(m.f),
                    })
                })
                .collect::<Result<_>>()?
        }
        FamilySpec::Mixed { count } => {
            let mut all = powers(grid, seed, ctx, &[], *count)?;
            all.extend(bumps(grid, seed, *count, false)?);
            all.extend(trigs(grid, seed, *count, default_terms())?);
            all
        }
    };
    Ok(FunctionFamily {
        spec: spec.clone(),
        seed,
        members,
    })
}

fn powers(
    grid: &Arc<DomainGrid>,
    seed: u64,
    ctx: &FamilyContext,
    alphas: &[f64],
    count: usize,
) -> Result<Vec<FamilyMember>> {
    let n = grid.dimension() as f64;
    let alphas = if alphas.is_empty() {
        let lo = -0.4 * n / ctx.p_plus;
        let hi = 2.0;
        let mut r = rng(seed, 1);
        (0..count)
            .map(|i| lo + (i as f64 + r.gen::<f64>()) * (hi - lo) / count as f64)
            .collect()
    } else {
        alphas.to_vec()
    };
    alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            if !(alpha * ctx.p_plus > -n) {
                return Err(Error::config(format!(
                    "power exponent {alpha} is not integrable at x0: need alpha*p+ > -{n} (p+ = {})",
                    ctx.p_plus
                )));
            }
            let f = normalized(weight_power(grid, &ctx.x0, alpha));
            Ok(FamilyMember::plain(format!("power-{i:02}"), MemberKind::Power, f))
        })
        .collect()
}

fn bumps(
    grid: &Arc<DomainGrid>,
    seed: u64,
    count: usize,
    with_gradient: bool,
) -> Result<Vec<FamilyMember>> {
    let shape = grid.shape();
    let inradius = shape.inset(&shape.centroid());
    let (x_lo, x_hi, y_lo, y_hi) = shape.bounding_box();
    let h = grid.h();
    let mut r = rng(seed, 2);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        // at least two cells wide so coarse grids still resolve it
        let w = (inradius * r.gen_range(0.15..0.6)).max(2.0 * h);
        let mut center = shape.centroid();
        for _ in 0..1000 {
            let c = Point::new(
                r.gen_range(x_lo..=x_hi),
                if grid.dimension() == 2 {
                    r.gen_range(y_lo..=y_hi)
                } else {
                    0.0
                },
            );
            if shape.inset(&c) > w {
                center = c;
                break;
            }
        }
        if w >= inradius {
            return Err(Error::config(format!(
                "grid spacing {h} is too coarse for a bump inside the domain"
            )));
        }
        let value = |x: &Point| {
            let s = x.distance(&center).powi(2) / (w * w);
            if s < 1.0 {
                (-1.0 / (1.0 - s)).exp()
            } else {
                0.0
            }
        };
        let grad = |x: &Point| {
            let d = x.distance(&center);
            let s = d * d / (w * w);
            if s < 1.0 {
                (-1.0 / (1.0 - s)).exp() * 2.0 * d / (w * w * (1.0 - s).powi(2))
            } else {
                0.0
            }
        };
        let f = GridFunction::from_fn(grid, value);
        let scale = f.max_abs();
        if scale == 0.0 {
            return Err(Error::config(format!(
                "bump of width {w} misses every node"
            )));
        }
        let member = if with_gradient {
            FamilyMember {
                id: format!("grad-{i:02}"),
                kind: MemberKind::GradientPair,
                f: f.scale(1.0 / scale),
                gradient: Some(GridFunction::from_fn(grid, grad).scale(1.0 / scale)),
                source: None,
            }
        } else {
            FamilyMember::plain(
                format!("bump-{i:02}"),
                MemberKind::Bump,
                f.scale(1.0 / scale),
            )
        };
        out.push(member);
    }
    Ok(out)
}

fn trigs(
    grid: &Arc<DomainGrid>,
    seed: u64,
    count: usize,
    terms: usize,
) -> Result<Vec<FamilyMember>> {
    if terms == 0 {
        return Err(Error::config("trig family needs at least one term"));
    }
    let shape = grid.shape();
    let c = shape.centroid();
    let half = 0.5 * shape.diameter();
    let two_d = grid.dimension() == 2;
    let mut r = rng(seed, 3);
    (0..count)
        .map(|i| {
            let offset: f64 = r.gen_range(-0.5..0.5);
            let waves: Vec<(f64, f64, f64, f64)> = (0..terms)
                .map(|_| {
                    let kx = r.gen_range(0..=4) as f64;
                    let ky = if two_d {
                        r.gen_range(0..=4) as f64
                    } else {
                        0.0
                    };
                    let (kx, ky) = if kx == 0.0 && ky == 0.0 {
                        (1.0, ky)
                    } else {
                        (kx, ky)
                    };
                    let amp = r.gen_range(-1.0..1.0) / (1.0 + kx.hypot(ky));
                    let phase = r.gen_range(0.0..std::f64::consts::TAU);
                    (kx, ky, amp, phase)
                })
                .collect();
            let f = GridFunction::from_fn(grid, |x| {
                let (u, v) = ((x.x - c.x) / half, (x.y - c.y) / half);
                offset
                    + waves
                        .iter()
                        .map(|&(kx, ky, amp, phase)| {
                            amp * (std::f64::consts::PI * (kx * u + ky * v) + phase).cos()
                        })
                        .sum::<f64>()
            });
            Ok(FamilyMember::plain(
                format!("trig-{i:02}"),
                MemberKind::Trig,
                normalized(f),
            ))
        })
        .collect()
}
