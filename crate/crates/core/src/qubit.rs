//! Single-qubit real-amplitude state algebra: rotations, bit encoding,
//! computational-basis measurement, and 2x2 density-matrix helpers.
//!
//! States live on the unit circle in the real `(|0>, |1>)` plane. A rotation
//! by the physical angle `phi` acts as the plane rotation by `phi / 2`, so
//! `R(pi)|0> = |1>` and the two encodings of a bit are exactly orthogonal.
//! Angles are kept symbolic as integer multiples of the grid
//! `theta_n = pi / 2^(n-1)` plus whole half-turns, and are converted to
//! radians only when a rotation matrix is built, so chained encode/decode
//! steps accumulate no float drift.

use std::f64::consts::PI;

use crate::error::Error;
use crate::rng::SplitMix64;
use crate::Result;

/// Largest supported security parameter; keeps `2^n` in range and the angle
/// grid far above the double-precision floor.
pub const MAX_SECURITY_PARAMETER: u32 = 32;

/// The angle grid `theta_n = pi / 2^(n-1)`. Exact in double precision
/// (a power-of-two scaling of `pi`).
pub fn theta(n: u32) -> f64 {
    assert!(
        (1..=MAX_SECURITY_PARAMETER).contains(&n),
        "security parameter out of range"
    );
    PI / (1u64 << (n - 1)) as f64
}

/// A protocol angle `sign * s * theta_n + half_turns * pi`, stored
/// symbolically and evaluated lazily.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Angle {
    steps: u32,
    n: u32,
    negative: bool,
    half_turns: u32,
}

impl Angle {
    /// The key rotation `(-1)^direction * s * theta_n`. Fails if `s` is not a
    /// valid rotation count for the given security parameter.
    pub fn key_rotation(steps: u32, n: u32, direction: bool) -> Result<Self> {
        if !(1..=MAX_SECURITY_PARAMETER).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "security parameter {n} outside 1..={MAX_SECURITY_PARAMETER}"
            )));
        }
        if u64::from(steps) >= 1u64 << n {
            return Err(Error::KeyOutOfRange {
                value: u64::from(steps),
                n,
            });
        }
        Ok(Self {
            steps,
            n,
            negative: direction,
            half_turns: 0,
        })
    }

    /// Add `count` half-turns (`count * pi`); houses the `m_i * pi` term of
    /// the encoding.
    pub fn with_half_turns(mut self, count: u32) -> Self {
        self.half_turns += count;
        self
    }

    /// Physical angle in radians.
    pub fn radians(&self) -> f64 {
        let grid = self.steps as f64 * theta(self.n);
        let signed = if self.negative { -grid } else { grid };
        signed + self.half_turns as f64 * PI
    }
}

/// A pure single-qubit state with real amplitudes on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    amp0: f64,
    amp1: f64,
}

impl QubitState {
    /// `|0>`.
    pub fn zero() -> Self {
        Self {
            amp0: 1.0,
            amp1: 0.0,
        }
    }

    /// `|1>`.
    pub fn one() -> Self {
        Self {
            amp0: 0.0,
            amp1: 1.0,
        }
    }

    /// Build from amplitudes; rejects vectors off the unit circle by more
    /// than 1e-12 in squared norm.
    pub fn new(amp0: f64, amp1: f64) -> Result<Self> {
        let norm2 = amp0 * amp0 + amp1 * amp1;
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "state norm^2 = {norm2}, expected 1 within 1e-12"
            )));
        }
        Ok(Self { amp0, amp1 })
    }

    pub fn amp0(&self) -> f64 {
        self.amp0
    }

    pub fn amp1(&self) -> f64 {
        self.amp1
    }

    /// Inner product (real amplitudes, so symmetric).
    pub fn inner(&self, other: &Self) -> f64 {
        self.amp0 * other.amp0 + self.amp1 * other.amp1
    }

    /// Squared norm; 1 within 1e-12 for any state built by this module.
    pub fn norm_sqr(&self) -> f64 {
        self.amp0 * self.amp0 + self.amp1 * self.amp1
    }

    /// Outer product `|psi><psi|`.
    pub fn outer(&self) -> SymMatrix2 {
        SymMatrix2 {
            m00: self.amp0 * self.amp0,
            m01: self.amp0 * self.amp1,
            m11: self.amp1 * self.amp1,
        }
    }
}

/// Apply the rotation by the symbolic angle to a state.
pub fn rotate(state: QubitState, angle: Angle) -> QubitState {
    rotate_radians(state, angle.radians())
}

/// Apply the rotation by `phi` radians: the plane rotation by `phi / 2`.
pub fn rotate_radians(state: QubitState, phi: f64) -> QubitState {
    let (sin, cos) = (phi / 2.0).sin_cos();
    QubitState {
        amp0: cos * state.amp0 - sin * state.amp1,
        amp1: sin * state.amp0 + cos * state.amp1,
    }
}

/// Encode a bit: `R(bit * pi + (-1)^direction * s * theta_n)|0>`.
/// Rejects `s` outside `{0, ..., 2^n - 1}` (a corrupted key).
pub fn encode_bit(bit: u8, steps: u32, direction: bool, n: u32) -> Result<QubitState> {
    debug_assert!(bit <= 1);
    let angle = Angle::key_rotation(steps, n, direction)?.with_half_turns(bit as u32);
    Ok(rotate(QubitState::zero(), angle))
}

/// Born-rule measurement in the computational basis: returns 0 with
/// probability `amp0^2`, consuming exactly one uniform draw.
pub fn measure_computational(state: &QubitState, rng: &mut SplitMix64) -> u8 {
    if rng.next_f64() < state.amp0 * state.amp0 {
        0
    } else {
        1
    }
}

/// Symmetric real 2x2 matrix `[[m00, m01], [m01, m11]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix2 {
    pub m00: f64,
    pub m01: f64,
    pub m11: f64,
}

impl SymMatrix2 {
    pub fn zero() -> Self {
        Self {
            m00: 0.0,
            m01: 0.0,
            m11: 0.0,
        }
    }

    pub fn trace(&self) -> f64 {
        self.m00 + self.m11
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            m00: self.m00 + other.m00,
            m01: self.m01 + other.m01,
            m11: self.m11 + other.m11,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            m00: self.m00 - other.m00,
            m01: self.m01 - other.m01,
            m11: self.m11 - other.m11,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            m00: self.m00 * factor,
            m01: self.m01 * factor,
            m11: self.m11 * factor,
        }
    }

    /// Quadratic form `v^T M v` for a unit vector given as a state.
    pub fn quad_form(&self, v: &QubitState) -> f64 {
        let (a, b) = (v.amp0(), v.amp1());
        self.m00 * a * a + 2.0 * self.m01 * a * b + self.m11 * b * b
    }

    /// Closed-form eigendecomposition, eigenvalues in descending order with
    /// orthonormal eigenvectors.
    pub fn eigen(&self) -> [(f64, [f64; 2]); 2] {
        let half_trace = 0.5 * (self.m00 + self.m11);
        let half_gap = 0.5 * (self.m00 - self.m11);
        let radius = (half_gap * half_gap + self.m01 * self.m01).sqrt();
        let hi = half_trace + radius;
        let lo = half_trace - radius;

        // Pick the better-conditioned eigenvector form for the top value.
        let v_hi = {
            let c1 = [self.m01, hi - self.m00];
            let c2 = [hi - self.m11, self.m01];
            let n1 = c1[0] * c1[0] + c1[1] * c1[1];
            let n2 = c2[0] * c2[0] + c2[1] * c2[1];
            let (v, n) = if n1 >= n2 { (c1, n1) } else { (c2, n2) };
            if n == 0.0 {
                // Scalar matrix; any orthonormal pair will do.
                [1.0, 0.0]
            } else {
                let inv = 1.0 / n.sqrt();
                [v[0] * inv, v[1] * inv]
            }
        };
        let v_lo = [-v_hi[1], v_hi[0]];
        [(hi, v_hi), (lo, v_lo)]
    }

    /// Sum of absolute eigenvalues (the trace norm for symmetric matrices).
    pub fn abs_eigen_sum(&self) -> f64 {
        let [(hi, _), (lo, _)] = self.eigen();
        hi.abs() + lo.abs()
    }

    /// Projector onto the strictly positive eigenspace; eigenvalues within
    /// `tol` of zero are excluded.
    pub fn positive_projector(&self, tol: f64) -> SymMatrix2 {
        let mut proj = SymMatrix2::zero();
        for (value, v) in self.eigen() {
            if value > tol {
                proj = proj.add(&SymMatrix2 {
                    m00: v[0] * v[0],
                    m01: v[0] * v[1],
                    m11: v[1] * v[1],
                });
            }
        }
        proj
    }
}

/// A 2x2 density matrix: symmetric, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    matrix: SymMatrix2,
}

impl DensityMatrix2 {
    /// Validate and wrap a symmetric matrix.
    pub fn new(matrix: SymMatrix2) -> Result<Self> {
        if (matrix.trace() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace = {}, expected 1 within 1e-12",
                matrix.trace()
            )));
        }
        let [_, (lo, _)] = matrix.eigen();
        if lo < -1e-12 {
            return Err(Error::InvalidParameter(format!(
                "density matrix has negative eigenvalue {lo}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &SymMatrix2 {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }
}

/// Mixture density `sum_i p_i |psi_i><psi_i|`. Rejects weights that do not
/// sum to 1 within 1e-9.
pub fn density_of_ensemble(states: &[(QubitState, f64)]) -> Result<DensityMatrix2> {
    let sum: f64 = states.iter().map(|(_, p)| p).sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::ProbabilitySum { sum });
    }
    let mut acc = SymMatrix2::zero();
    for (state, p) in states {
        acc = acc.add(&state.outer().scale(*p));
    }
    DensityMatrix2::new(acc)
}

/// Closed-form optimal discrimination probability between the two
/// equal-prior bit encodings with rotation count `s`, averaged over the
/// hidden direction: `(1 + |cos(s * theta_n)|) / 2`.
pub fn helstrom_probability(steps: u32, n: u32) -> f64 {
    let angle = Angle::key_rotation(steps, n, false).expect("rotation count out of range");
    0.5 * (1.0 + angle.radians().cos().abs())
}
