//! Constant-velocity linear Kalman filter over box observations, using the
//! common (center x, center y, aspect ratio, height) measurement space with
//! velocity components appended, and height-scaled noise magnitudes.

use crate::error::{Error, Result};
use crate::mask::BoundingBox;
use nalgebra::{SMatrix, SVector};

type Vec8 = SVector<f64, 8>;
type Mat8 = SMatrix<f64, 8, 8>;
type Vec4 = SVector<f64, 4>;
type Mat4 = SMatrix<f64, 4, 4>;
type Mat4x8 = SMatrix<f64, 4, 8>;
type Mat8x4 = SMatrix<f64, 8, 4>;

/// Noise magnitudes of the motion model. Position/velocity standard
/// deviations scale with the object's height; the two scale knobs let tests
/// and ablations run the filter with reduced or zero noise.
#[derive(Debug, Clone, Copy)]
pub struct KalmanConfig {
    /// Base ratio of position noise to object height.
    pub std_weight_position: f64,
    /// Base ratio of velocity noise to object height.
    pub std_weight_velocity: f64,
    /// Multiplier on the process-noise standard deviations (0 = trust the
    /// motion model completely).
    pub process_noise_scale: f64,
    /// Multiplier on the measurement-noise standard deviations (0 = trust
    /// measurements completely).
    pub measurement_noise_scale: f64,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        KalmanConfig {
            std_weight_position: 1.0 / 20.0,
            std_weight_velocity: 1.0 / 160.0,
            process_noise_scale: 1.0,
            measurement_noise_scale: 1.0,
        }
    }
}

impl KalmanConfig {
    fn validate(&self) -> Result<()> {
        let fields = [
            self.std_weight_position,
            self.std_weight_velocity,
            self.process_noise_scale,
            self.measurement_noise_scale,
        ];
        if fields.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidConfig(
                "Kalman noise weights must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Gaussian belief over the 8-dimensional state
/// (cx, cy, aspect, height, and their per-frame velocities).
#[derive(Debug, Clone)]
pub struct KalmanState {
    mean: Vec8,
    covariance: Mat8,
}

impl KalmanState {
    pub fn mean(&self) -> [f64; 8] {
        self.mean.into()
    }

    pub fn covariance(&self) -> Mat8 {
        self.covariance
    }

    /// State box as real-valued (x_min, y_min, x_max, y_max).
    pub fn bbox_ltrb(&self) -> [f64; 4] {
        let (cx, cy, aspect, h) = (self.mean[0], self.mean[1], self.mean[2], self.mean[3]);
        let w = aspect * h;
        [cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0]
    }

    fn check_valid(&self) -> Result<()> {
        if self.mean.iter().any(|v| !v.is_finite())
            || self.covariance.iter().any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("Kalman state"));
        }
        if self.mean[3] <= 0.0 {
            return Err(Error::NonFinite("Kalman state height"));
        }
        Ok(())
    }
}

/// A track coasting through rapid shrinkage (e.g. a box vanishing behind an
/// occluder) can integrate a learned negative size velocity until its extent
/// collapses. Floor the extent components at physical minima and stop any
/// velocity still pushing below the floor.
fn clamp_extent(mean: &mut Vec8) {
    const MIN_ASPECT: f64 = 1e-2;
    const MIN_HEIGHT: f64 = 1.0;
    if mean[2] < MIN_ASPECT {
        mean[2] = MIN_ASPECT;
        mean[6] = mean[6].max(0.0);
    }
    if mean[3] < MIN_HEIGHT {
        mean[3] = MIN_HEIGHT;
        mean[7] = mean[7].max(0.0);
    }
}

/// Measurement vector (cx, cy, aspect, height) of a pixel box.
fn box_to_xyah(b: &BoundingBox) -> Vec4 {
    let (cx, cy) = b.center();
    let w = f64::from(b.width());
    let h = f64::from(b.height());
    Vec4::new(cx, cy, w / h, h)
}

/// The filter itself: pure state-in/state-out operations.
#[derive(Debug, Clone)]
pub struct KalmanFilter {
    cfg: KalmanConfig,
    /// Constant-velocity transition (dt = 1).
    motion: Mat8,
    /// Projection onto the measured components.
    observation: Mat4x8,
}

impl KalmanFilter {
    pub fn new(cfg: KalmanConfig) -> Result<Self> {
        cfg.validate()?;
        let mut motion = Mat8::identity();
        for i in 0..4 {
            motion[(i, i + 4)] = 1.0;
        }
        let mut observation = Mat4x8::zeros();
        for i in 0..4 {
            observation[(i, i)] = 1.0;
        }
        Ok(KalmanFilter {
            cfg,
            motion,
            observation,
        })
    }

    pub fn config(&self) -> &KalmanConfig {
        &self.cfg
    }

    /// Belief for a first observation: measured components from the box,
    /// zero velocities, diagonal covariance from the configured base noise.
    pub fn initiate(&self, bbox: &BoundingBox) -> KalmanState {
        let z = box_to_xyah(bbox);
        let mut mean = Vec8::zeros();
        for i in 0..4 {
            mean[i] = z[i];
        }
        let h = z[3];
        let wp = self.cfg.std_weight_position;
        let wv = self.cfg.std_weight_velocity;
        let std = [
            2.0 * wp * h,
            2.0 * wp * h,
            1e-2,
            2.0 * wp * h,
            10.0 * wv * h,
            10.0 * wv * h,
            1e-5,
            10.0 * wv * h,
        ];
        let mut covariance = Mat8::zeros();
        for (i, s) in std.iter().enumerate() {
            covariance[(i, i)] = s * s;
        }
        KalmanState { mean, covariance }
    }

    fn process_noise(&self, h: f64) -> Mat8 {
        let wp = self.cfg.std_weight_position * self.cfg.process_noise_scale;
        let wv = self.cfg.std_weight_velocity * self.cfg.process_noise_scale;
        let scale_only = self.cfg.process_noise_scale;
        let std = [
            wp * h,
            wp * h,
            1e-2 * scale_only,
            wp * h,
            wv * h,
            wv * h,
            1e-5 * scale_only,
            wv * h,
        ];
        let mut q = Mat8::zeros();
        for (i, s) in std.iter().enumerate() {
            q[(i, i)] = s * s;
        }
        q
    }

    fn measurement_noise(&self, h: f64) -> Mat4 {
        let wp = self.cfg.std_weight_position * self.cfg.measurement_noise_scale;
        let std = [
            wp * h,
            wp * h,
            1e-1 * self.cfg.measurement_noise_scale,
            wp * h,
        ];
        let mut r = Mat4::zeros();
        for (i, s) in std.iter().enumerate() {
            r[(i, i)] = s * s;
        }
        r
    }

    /// One constant-velocity step: positions advance by their velocities,
    /// covariance inflates by the process noise.
    pub fn predict(&self, state: &KalmanState) -> Result<KalmanState> {
        state.check_valid()?;
        let q = self.process_noise(state.mean[3]);
        let mut mean = self.motion * state.mean;
        clamp_extent(&mut mean);
        let covariance = self.motion * state.covariance * self.motion.transpose() + q;
        let next = KalmanState {
            mean,
            covariance: symmetrize(&covariance),
        };
        next.check_valid()?;
        Ok(next)
    }

    /// Standard linear correction against a measured box. The posterior
    /// covariance uses the Joseph form, which stays symmetric PSD even with
    /// zero measurement noise.
    pub fn update(&self, state: &KalmanState, measurement: &BoundingBox) -> Result<KalmanState> {
        state.check_valid()?;
        let z = box_to_xyah(measurement);
        let r = self.measurement_noise(state.mean[3]);
        let h = self.observation;
        let s = h * state.covariance * h.transpose() + r;
        let s_inv = s
            .try_inverse()
            .ok_or(Error::NonFinite("Kalman innovation covariance inverse"))?;
        let gain: Mat8x4 = state.covariance * h.transpose() * s_inv;
        let innovation = z - h * state.mean;
        let mut mean = state.mean + gain * innovation;
        clamp_extent(&mut mean);
        let identity = Mat8::identity();
        let ikh = identity - gain * h;
        let covariance = ikh * state.covariance * ikh.transpose() + gain * r * gain.transpose();
        let next = KalmanState {
            mean,
            covariance: symmetrize(&covariance),
        };
        next.check_valid()?;
        Ok(next)
    }
}

fn symmetrize(m: &Mat8) -> Mat8 {
    (m + m.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(x0: u32, y0: u32, x1: u32, y1: u32) -> BoundingBox {
        BoundingBox::new(x0, y0, x1, y1).unwrap()
    }

    fn default_filter() -> KalmanFilter {
        KalmanFilter::new(KalmanConfig::default()).unwrap()
    }

    #[test]
    fn initiate_centers_measurement_with_zero_velocity() {
        let f = default_filter();
        let s = f.initiate(&bb(10, 20, 30, 60));
        let m = s.mean();
        assert_eq!(&m[0..4], &[20.0, 40.0, 0.5, 40.0]);
        assert_eq!(&m[4..8], &[0.0, 0.0, 0.0, 0.0]);
        // Diagonal positive covariance.
        let p = s.covariance();
        for i in 0..8 {
            assert!(p[(i, i)] > 0.0);
        }
    }

    #[test]
    fn predict_moves_by_velocity() {
        let f = default_filter();
        let mut s = f.initiate(&bb(10, 20, 30, 60));
        // Zero velocity: position unchanged.
        let s1 = f.predict(&s).unwrap();
        assert_eq!(&s1.mean()[0..4], &s.mean()[0..4]);

        // Velocity (2, 0): center x advances by 2 per step.
        s.mean[4] = 2.0;
        let s2 = f.predict(&s).unwrap();
        assert_eq!(s2.mean()[0], s.mean()[0] + 2.0);
        assert_eq!(s2.mean()[1], s.mean()[1]);
    }

    #[test]
    fn predict_inflates_covariance_with_process_noise() {
        let f = default_filter();
        let s = f.initiate(&bb(10, 20, 30, 60));
        let before: f64 = (0..8).map(|i| s.covariance()[(i, i)]).sum();
        let after: f64 = {
            let s1 = f.predict(&s).unwrap();
            (0..8).map(|i| s1.covariance()[(i, i)]).sum()
        };
        assert!(after > before);
    }

    #[test]
    fn update_with_predicted_measurement_keeps_mean() {
        let f = default_filter();
        let s = f.initiate(&bb(10, 20, 30, 60));
        // Measurement identical to the current mean (state from this very box).
        let s1 = f.update(&s, &bb(10, 20, 30, 60)).unwrap();
        for i in 0..8 {
            assert!((s1.mean()[i] - s.mean()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_measurement_noise_trusts_measurement_fully() {
        let f = KalmanFilter::new(KalmanConfig {
            measurement_noise_scale: 0.0,
            ..KalmanConfig::default()
        })
        .unwrap();
        let s = f.initiate(&bb(0, 0, 20, 40));
        let s1 = f.predict(&s).unwrap();
        let z = bb(6, 8, 26, 48);
        let s2 = f.update(&s1, &z).unwrap();
        let m = s2.mean();
        assert!((m[0] - 16.0).abs() < 1e-9);
        assert!((m[1] - 28.0).abs() < 1e-9);
        assert!((m[2] - 0.5).abs() < 1e-9);
        assert!((m[3] - 40.0).abs() < 1e-9);
    }

    #[test]
    fn three_cycles_track_constant_velocity_target() {
        // Noise-free regime: no process noise, vanishing measurement noise.
        let f = KalmanFilter::new(KalmanConfig {
            process_noise_scale: 0.0,
            measurement_noise_scale: 1e-12,
            ..KalmanConfig::default()
        })
        .unwrap();
        // Target: 20x40 box starting at (0,0), moving +3 px/frame in x, +2 in y.
        let target = |t: u32| bb(3 * t, 2 * t, 3 * t + 20, 2 * t + 40);
        let mut state = f.initiate(&target(0));
        for t in 1..=3 {
            state = f.predict(&state).unwrap();
            state = f.update(&state, &target(t)).unwrap();
        }
        // After 3 cycles the velocity estimate has converged; the next
        // prediction must land on the true frame-4 position.
        let predicted = f.predict(&state).unwrap();
        let truth = box_to_xyah(&target(4));
        for i in 0..4 {
            assert!(
                (predicted.mean()[i] - truth[i]).abs() < 1e-6,
                "component {i}: {} vs {}",
                predicted.mean()[i],
                truth[i]
            );
        }
    }

    #[test]
    fn covariance_stays_symmetric_psd_through_random_sequence() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = default_filter();
        let mut s = f.initiate(&bb(50, 50, 90, 130));
        for step in 0..1000 {
            s = f.predict(&s).unwrap();
            if rng.random_range(0.0..1.0) < 0.7 {
                let x0: u32 = rng.random_range(0..200);
                let y0: u32 = rng.random_range(0..200);
                let w: u32 = rng.random_range(10..60);
                let h: u32 = rng.random_range(20..80);
                s = f.update(&s, &bb(x0, y0, x0 + w, y0 + h)).unwrap();
            }
            let p = s.covariance();
            for i in 0..8 {
                for j in 0..8 {
                    assert!(
                        (p[(i, j)] - p[(j, i)]).abs() < 1e-9,
                        "asymmetry at step {step}"
                    );
                }
            }
            let eig = p.symmetric_eigenvalues();
            assert!(
                eig.iter().all(|&l| l >= -1e-9),
                "negative eigenvalue {eig:?} at step {step}"
            );
        }
    }

    #[test]
    fn coasting_after_rapid_shrinkage_keeps_extent_positive() {
        let f = default_filter();
        // Teach the filter a steep negative height velocity, then coast.
        let mut s = f.initiate(&bb(50, 50, 90, 90));
        for (step, h) in [30u32, 20, 10, 4, 2].iter().enumerate() {
            s = f.predict(&s).unwrap();
            s = f.update(&s, &bb(50, 50, 50 + h, 50 + h)).unwrap();
            let _ = step;
        }
        for _ in 0..100 {
            s = f.predict(&s).unwrap();
            assert!(s.mean[3] > 0.0 && s.mean[2] > 0.0);
            let ltrb = s.bbox_ltrb();
            assert!(ltrb[2] > ltrb[0] && ltrb[3] > ltrb[1]);
        }
    }

    #[test]
    fn rejects_non_finite_state() {
        let f = default_filter();
        let mut s = f.initiate(&bb(0, 0, 10, 20));
        s.mean[0] = f64::NAN;
        assert!(matches!(f.predict(&s), Err(Error::NonFinite(_))));
    }

    #[test]
    fn bbox_ltrb_roundtrip() {
        let f = default_filter();
        let s = f.initiate(&bb(10, 20, 30, 60));
        assert_eq!(s.bbox_ltrb(), [10.0, 20.0, 30.0, 60.0]);
    }
}
